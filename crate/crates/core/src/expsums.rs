//! Complete exponential sums behind the p-set discrepancy bound, evaluated
//! by brute force, and sweeps that check the Weil-type inequalities they
//! satisfy.
//!
//! For a prime p, dimension d and integer frequencies h = (h_1, …, h_d)
//! with p ∤ h_j for at least one j:
//!
//!   |Σ_{n<p}  e((h_1 n + … + h_d n^d)/p)  | <= (d-1) √p   (family P)
//!   |Σ_{n<p²} e((h_1 n + … + h_d n^d)/p²) | <= (d-1) p    (family Q)
//!   |Σ_{a<p} Σ_{k<p} e(k(h_1 + h_2 a + … + h_d a^{d-1})/p)| <= (d-1) p  (family R)
//!
//! where e(t) = exp(2πi t). Frequency vectors with p | h_j for every j sit
//! outside the hypothesis and are reported as skipped, not as failures.
//!
//! The P and Q inequalities hold for p > d; when p <= d the Fermat
//! collapse n^p ≡ n mod p can make the phase polynomial vanish as a
//! function while its coefficients stay nonzero, and the sum then reaches
//! the full mass (for instance p=2, h=(1,1): n + n² is always even, so
//! the modulus is 2 > √2). The sweeps report whatever they measure. The R
//! inequality needs no such restriction: a nonzero polynomial of degree
//! at most d-1 over the field has at most d-1 roots.
//!
//! Phases are reduced to integers mod the modulus in exact arithmetic
//! before any conversion to an angle, so the floating modulus of a sum is
//! accurate to far below the 1e-9 comparison slack.

use num::complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::korobov::{is_prime, PSetFamily};

/// Absolute slack for bound comparisons.
pub const BOUND_SLACK: f64 = 1e-9;

/// Outcome of one frequency-vector check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WeilStatus {
    /// Eligible and within the bound.
    Pass,
    /// Eligible and above the bound (an implementation bug, not an input error).
    Fail,
    /// p divides every component; outside the hypothesis.
    Skipped,
}

impl std::fmt::Display for WeilStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeilStatus::Pass => write!(f, "PASS"),
            WeilStatus::Fail => write!(f, "FAIL"),
            WeilStatus::Skipped => write!(f, "SKIPPED"),
        }
    }
}

/// One checked inequality instance.
#[derive(Debug, Clone, Serialize)]
pub struct WeilReport {
    pub family: PSetFamily,
    pub p: u64,
    pub d: usize,
    pub h: Vec<i64>,
    pub modulus_of_sum: f64,
    pub bound: f64,
    pub status: WeilStatus,
}

impl WeilReport {
    pub fn satisfied(&self) -> bool {
        self.modulus_of_sum <= self.bound + BOUND_SLACK
    }
}

/// Aggregate of an exhaustive sweep over a frequency box.
#[derive(Debug, Clone, Serialize)]
pub struct WeilSummary {
    pub family: PSetFamily,
    pub p: u64,
    pub d: usize,
    pub h_max: i64,
    pub n_total: u64,
    pub n_eligible: u64,
    pub n_skipped: u64,
    pub n_violations: u64,
    /// Largest modulus seen over eligible vectors.
    pub max_modulus: f64,
    /// max(modulus - bound) over eligible vectors; <= 0 when all pass.
    pub worst_excess: f64,
    /// Family R only: largest |complex double sum - p * root count|.
    pub max_root_count_dev: Option<f64>,
}

/// The Weil-type bound for one family.
pub fn weil_bound(family: PSetFamily, p: u64, d: usize) -> f64 {
    let df = (d as f64) - 1.0;
    match family {
        PSetFamily::P => df * (p as f64).sqrt(),
        PSetFamily::Q | PSetFamily::R => df * p as f64,
    }
}

/// True when p does not divide every component of h.
pub fn is_eligible(p: u64, h: &[i64]) -> bool {
    h.iter().any(|&x| x.rem_euclid(p as i64) != 0)
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Largest modulus the brute-force evaluators accept. Keeps the phase
/// tables small and lets d-term phase accumulations stay in u64 before a
/// single reduction.
const MAX_MODULUS: u64 = 1 << 26;

/// e(t/m) for integer phases t in [0, m).
fn unit_table(m: u64) -> Result<Vec<Complex64>> {
    if m > MAX_MODULUS {
        return Err(Error::TooLarge {
            what: "exponential-sum modulus",
            detail: format!("{m} > 2^26"),
        });
    }
    Ok((0..m)
        .map(|t| {
            let angle = std::f64::consts::TAU * t as f64 / m as f64;
            Complex64::new(angle.cos(), angle.sin())
        })
        .collect())
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn reduce_h(h: &[i64], m: u64) -> Vec<u64> {
    h.iter().map(|&x| x.rem_euclid(m as i64) as u64).collect()
}

/// powers[n*d + j] = n^{j+1} mod m for n in [0, count), j in [0, d).
fn power_table(count: u64, d: usize, m: u64) -> Vec<u64> {
    let mut table = Vec::with_capacity(count as usize * d);
    for n in 0..count {
        let mut power = 1u64;
        for _ in 0..d {
            power = mul_mod(power, n % m, m);
            table.push(power);
        }
    }
    table
}

/// |Σ_{n=0}^{count-1} e((h_1 n + … + h_d n^d)/m)| with exact integer
/// phases. Products h_j n^j mod m are at most (m-1)² < 2^52, so a row of
/// them sums in u64 and one reduction per term suffices.
fn monomial_sum_modulus(h_red: &[u64], powers: &[u64], m: u64, units: &[Complex64]) -> f64 {
    let d = h_red.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for row in powers.chunks_exact(d) {
        let mut phase = 0u64;
        for (hj, power) in h_red.iter().zip(row) {
            phase += hj * power % m;
        }
        acc += units[(phase % m) as usize];
    }
    acc.norm()
}

/// Family P sum: length p, modulus p.
pub fn exp_sum_p(p: u64, h: &[i64]) -> Result<f64> {
    require_prime(p)?;
    let units = unit_table(p)?;
    let powers = power_table(p, h.len(), p);
    Ok(monomial_sum_modulus(&reduce_h(h, p), &powers, p, &units))
}

/// Family Q sum: length p², modulus p².
pub fn exp_sum_q(p: u64, h: &[i64]) -> Result<f64> {
    require_prime(p)?;
    let p2 = p.checked_mul(p).ok_or(Error::TooLarge {
        what: "p^2",
        detail: format!("p = {p}"),
    })?;
    let units = unit_table(p2)?;
    let powers = power_table(p2, h.len(), p2);
    Ok(monomial_sum_modulus(&reduce_h(h, p2), &powers, p2, &units))
}

/// g(a) = h_1 + h_2 a + … + h_d a^{d-1} mod p, by Horner.
#[inline]
fn r_polynomial(h_red: &[u64], a: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for &hj in h_red.iter().rev() {
        acc = (mul_mod(acc, a, p) + hj) % p;
    }
    acc
}

/// Number of a in [0,p) with g(a) ≡ 0 mod p. The inner geometric sum over
/// k collapses to p exactly at such roots and to 0 elsewhere, so the R
/// family double sum equals p times this count.
pub fn r_root_count(p: u64, h: &[i64]) -> Result<u64> {
    require_prime(p)?;
    let h_red = reduce_h(h, p);
    Ok((0..p).filter(|&a| r_polynomial(&h_red, a, p) == 0).count() as u64)
}

fn r_double_sum_modulus(h_red: &[u64], p: u64, units: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..p {
        let g = r_polynomial(h_red, a, p) as usize;
        // phases k·g mod p step by g; no multiplication in the inner loop
        let mut phase = 0usize;
        for _ in 0..p {
            acc += units[phase];
            phase += g;
            if phase >= p as usize {
                phase -= p as usize;
            }
        }
    }
    acc.norm()
}

/// Family R double sum: evaluates the p² complex terms directly, checks
/// the result against p * (root count), and returns the direct modulus.
/// Disagreement beyond 1e-9 p² means a broken evaluator and surfaces as
/// an internal error.
pub fn exp_sum_r(p: u64, h: &[i64]) -> Result<f64> {
    require_prime(p)?;
    let h_red = reduce_h(h, p);
    let units = unit_table(p)?;
    let direct = r_double_sum_modulus(&h_red, p, &units);
    let expected = (p * r_root_count(p, h)?) as f64;
    let tol = 1e-9 * (p as f64) * (p as f64);
    if (direct - expected).abs() > tol {
        return Err(Error::Internal(format!(
            "R family sum {direct} disagrees with root-count value {expected} at p={p}, h={h:?}"
        )));
    }
    Ok(direct)
}

/// Evaluates moduli for one family at fixed (p, d), caching by residue
/// class where the sum only depends on h mod p.
enum Evaluator {
    /// cache[residue index] = modulus; families P and R.
    Cached {
        p: u64,
        d: usize,
        cache: Vec<f64>,
        max_root_count_dev: Option<f64>,
    },
    /// Family Q: the sum depends on h mod p², so a cache over the box is
    /// pointless; compute per vector.
    Direct {
        p2: u64,
        units: Vec<Complex64>,
        powers: Vec<u64>,
    },
}

impl Evaluator {
    fn build(family: PSetFamily, p: u64, d: usize) -> Result<Evaluator> {
        require_prime(p)?;
        match family {
            PSetFamily::P => {
                let units = unit_table(p)?;
                let powers = power_table(p, d, p);
                let cache = build_cache(p, d, |h_red| {
                    monomial_sum_modulus(h_red, &powers, p, &units)
                });
                Ok(Evaluator::Cached {
                    p,
                    d,
                    cache,
                    max_root_count_dev: None,
                })
            }
            PSetFamily::R => {
                let units = unit_table(p)?;
                let entries: Vec<(f64, f64)> = build_cache_vec(p, d)
                    .into_par_iter()
                    .map(|h_red| {
                        let direct = r_double_sum_modulus(&h_red, p, &units);
                        let roots =
                            (0..p).filter(|&a| r_polynomial(&h_red, a, p) == 0).count() as u64;
                        (direct, (direct - (p * roots) as f64).abs())
                    })
                    .collect();
                let max_dev = entries.iter().map(|e| e.1).fold(0.0, f64::max);
                Ok(Evaluator::Cached {
                    p,
                    d,
                    cache: entries.into_iter().map(|e| e.0).collect(),
                    max_root_count_dev: Some(max_dev),
                })
            }
            PSetFamily::Q => {
                let p2 = p.checked_mul(p).ok_or(Error::TooLarge {
                    what: "p^2",
                    detail: format!("p = {p}"),
                })?;
                Ok(Evaluator::Direct {
                    p2,
                    units: unit_table(p2)?,
                    powers: power_table(p2, d, p2),
                })
            }
        }
    }

    fn modulus(&self, h: &[i64]) -> f64 {
        match self {
            Evaluator::Cached { p, d, cache, .. } => {
                let mut idx = 0usize;
                for &hj in h.iter().take(*d) {
                    idx = idx * (*p as usize) + hj.rem_euclid(*p as i64) as usize;
                }
                cache[idx]
            }
            Evaluator::Direct { p2, units, powers } => {
                monomial_sum_modulus(&reduce_h(h, *p2), powers, *p2, units)
            }
        }
    }

    fn max_root_count_dev(&self) -> Option<f64> {
        match self {
            Evaluator::Cached {
                max_root_count_dev, ..
            } => *max_root_count_dev,
            Evaluator::Direct { .. } => None,
        }
    }
}

/// All residue vectors in [0,p)^d, most significant digit first.
fn build_cache_vec(p: u64, d: usize) -> Vec<Vec<u64>> {
    let size = (p as usize).pow(d as u32);
    (0..size)
        .map(|mut idx| {
            let mut h = vec![0u64; d];
            for j in (0..d).rev() {
                h[j] = (idx % p as usize) as u64;
                idx /= p as usize;
            }
            h
        })
        .collect()
}

fn build_cache(p: u64, d: usize, f: impl Fn(&[u64]) -> f64 + Sync) -> Vec<f64> {
    build_cache_vec(p, d)
        .into_par_iter()
        .map(|h| f(&h))
        .collect()
}

fn box_side(h_max: i64) -> Result<u64> {
    if h_max < 0 {
        return Err(Error::OutOfDomain {
            what: "h_max",
            value: h_max as f64,
            lo: 0.0,
            hi: i64::MAX as f64,
        });
    }
    Ok(2 * h_max as u64 + 1)
}

fn check_box_size(side: u64, d: usize) -> Result<u64> {
    (side as u128)
        .checked_pow(d as u32)
        .filter(|&n| n <= 1 << 32)
        .map(|n| n as u64)
        .ok_or_else(|| Error::TooLarge {
            what: "frequency box",
            detail: format!("({side})^{d} vectors"),
        })
}

/// Advances h through [-h_max, h_max]^d in lexicographic order. Returns
/// false after the last vector.
fn advance(h: &mut [i64], h_max: i64) -> bool {
    for j in (0..h.len()).rev() {
        if h[j] < h_max {
            h[j] += 1;
            return true;
        }
        h[j] = -h_max;
    }
    false
}

fn report_for(evaluator: &Evaluator, family: PSetFamily, p: u64, d: usize, h: &[i64]) -> WeilReport {
    let modulus = evaluator.modulus(h);
    let bound = weil_bound(family, p, d);
    let status = if !is_eligible(p, h) {
        WeilStatus::Skipped
    } else if modulus <= bound + BOUND_SLACK {
        WeilStatus::Pass
    } else {
        WeilStatus::Fail
    };
    WeilReport {
        family,
        p,
        d,
        h: h.to_vec(),
        modulus_of_sum: modulus,
        bound,
        status,
    }
}

/// Streams one report per h in [-h_max, h_max]^d, in lexicographic order.
pub fn for_each_weil_report(
    family: PSetFamily,
    p: u64,
    d: usize,
    h_max: i64,
    mut sink: impl FnMut(&WeilReport),
) -> Result<()> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let side = box_side(h_max)?;
    check_box_size(side, d)?;
    let evaluator = Evaluator::build(family, p, d)?;
    let mut h = vec![-h_max; d];
    loop {
        sink(&report_for(&evaluator, family, p, d, &h));
        if !advance(&mut h, h_max) {
            break;
        }
    }
    Ok(())
}

/// Materialized reports for a frequency box. Intended for small boxes;
/// use [`verify_weil_exhaustive`] for large sweeps.
pub fn check_weil_bounds(
    family: PSetFamily,
    p: u64,
    d: usize,
    h_max: i64,
) -> Result<Vec<WeilReport>> {
    let mut out = Vec::new();
    for_each_weil_report(family, p, d, h_max, |r| out.push(r.clone()))?;
    Ok(out)
}

/// Exhaustive bound check over [-h_max, h_max]^d, parallel over the first
/// coordinate, returning counts rather than per-vector reports.
pub fn verify_weil_exhaustive(
    family: PSetFamily,
    p: u64,
    d: usize,
    h_max: i64,
) -> Result<WeilSummary> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let side = box_side(h_max)?;
    let n_total = check_box_size(side, d)?;
    let evaluator = Evaluator::build(family, p, d)?;
    let bound = weil_bound(family, p, d);

    let partials: Vec<(u64, u64, u64, f64, f64)> = (-h_max..=h_max)
        .into_par_iter()
        .map(|h0| {
            let mut h = vec![-h_max; d];
            h[0] = h0;
            let mut eligible = 0u64;
            let mut skipped = 0u64;
            let mut violations = 0u64;
            let mut max_modulus = 0.0f64;
            let mut worst_excess = f64::NEG_INFINITY;
            loop {
                if is_eligible(p, &h) {
                    let modulus = evaluator.modulus(&h);
                    eligible += 1;
                    max_modulus = max_modulus.max(modulus);
                    worst_excess = worst_excess.max(modulus - bound);
                    if modulus > bound + BOUND_SLACK {
                        violations += 1;
                    }
                } else {
                    skipped += 1;
                }
                // advance within the sub-box that has h[0] fixed
                if d == 1 || !advance(&mut h[1..], h_max) {
                    break;
                }
            }
            (eligible, skipped, violations, max_modulus, worst_excess)
        })
        .collect();

    let mut summary = WeilSummary {
        family,
        p,
        d,
        h_max,
        n_total,
        n_eligible: 0,
        n_skipped: 0,
        n_violations: 0,
        max_modulus: 0.0,
        worst_excess: f64::NEG_INFINITY,
        max_root_count_dev: evaluator.max_root_count_dev(),
    };
    for (e, s, v, mm, we) in partials {
        summary.n_eligible += e;
        summary.n_skipped += s;
        summary.n_violations += v;
        summary.max_modulus = summary.max_modulus.max(mm);
        summary.worst_excess = summary.worst_excess.max(we);
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_frequency_gives_full_mass() {
        assert!((exp_sum_p(7, &[0, 0]).unwrap() - 7.0).abs() < 1e-12);
        assert!((exp_sum_q(3, &[0]).unwrap() - 9.0).abs() < 1e-12);
        assert!((exp_sum_r(5, &[0, 0]).unwrap() - 25.0).abs() < 1e-9);
    }

    #[test]
    fn geometric_cancellation() {
        assert!(exp_sum_p(5, &[1]).unwrap() < 1e-12);
        assert!(exp_sum_q(3, &[1]).unwrap() < 1e-11);
    }

    #[test]
    fn quadratic_gauss_sum_attains_bound() {
        let m = exp_sum_p(7, &[1, 1]).unwrap();
        assert!((m - 7.0f64.sqrt()).abs() < 1e-12, "got {m}");
        assert!((m - weil_bound(PSetFamily::P, 7, 2)).abs() < 1e-12);
    }

    #[test]
    fn q_family_example_within_bound() {
        let m = exp_sum_q(3, &[0, 1]).unwrap();
        assert!(m <= weil_bound(PSetFamily::Q, 3, 2) + BOUND_SLACK, "got {m}");
        // n² mod 9 lands on 0 three times, so the sum is exactly 3
        assert!((m - 3.0).abs() < 1e-12);
    }

    #[test]
    fn r_family_root_count_examples() {
        // 1 + a has one root mod 5 → modulus 5, meeting (d-1)p with equality
        assert_eq!(r_root_count(5, &[1, 1]).unwrap(), 1);
        assert!((exp_sum_r(5, &[1, 1]).unwrap() - 5.0).abs() < 1e-9);
        // constant polynomial 1: no roots → 0
        assert_eq!(r_root_count(5, &[1, 0]).unwrap(), 0);
        assert!(exp_sum_r(5, &[1, 0]).unwrap() < 1e-9);
    }

    #[test]
    fn conjugate_symmetry() {
        for h in [[1i64, 2], [3, -4], [-2, 5]] {
            let neg: Vec<i64> = h.iter().map(|x| -x).collect();
            assert!((exp_sum_p(11, &h).unwrap() - exp_sum_p(11, &neg).unwrap()).abs() < 1e-12);
            assert!((exp_sum_q(5, &h).unwrap() - exp_sum_q(5, &neg).unwrap()).abs() < 1e-11);
            assert!((exp_sum_r(7, &h).unwrap() - exp_sum_r(7, &neg).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn periodicity_in_h() {
        let p = 7u64;
        for h in [[1i64, 3], [2, -5]] {
            let bumped = [h[0] + p as i64, h[1]];
            assert!((exp_sum_p(p, &h).unwrap() - exp_sum_p(p, &bumped).unwrap()).abs() < 1e-12);
            assert!((exp_sum_r(p, &h).unwrap() - exp_sum_r(p, &bumped).unwrap()).abs() < 1e-9);
        }
        // family Q is periodic with period p², not p
        let h = [1i64, 2];
        let shifted = [1 + 25i64, 2];
        assert!((exp_sum_q(5, &h).unwrap() - exp_sum_q(5, &shifted).unwrap()).abs() < 1e-11);
    }

    #[test]
    fn skipped_vectors_reported() {
        let reports = check_weil_bounds(PSetFamily::P, 3, 2, 3).unwrap();
        assert_eq!(reports.len(), 49);
        let skipped: Vec<_> = reports
            .iter()
            .filter(|r| r.status == WeilStatus::Skipped)
            .collect();
        // components in {-3, 0, 3}: 9 all-divisible vectors
        assert_eq!(skipped.len(), 9);
        assert!(reports
            .iter()
            .filter(|r| r.status != WeilStatus::Skipped)
            .all(|r| r.satisfied()));
    }

    #[test]
    fn d1_family_p_meets_zero_bound_with_equality() {
        let reports = check_weil_bounds(PSetFamily::P, 13, 1, 13).unwrap();
        for r in reports {
            match r.status {
                WeilStatus::Skipped => {}
                _ => {
                    assert_eq!(r.status, WeilStatus::Pass);
                    assert_eq!(r.bound, 0.0);
                    assert!(r.modulus_of_sum < 1e-11);
                }
            }
        }
    }

    #[test]
    fn exhaustive_small_cases_have_no_violations() {
        for family in PSetFamily::ALL {
            let s = verify_weil_exhaustive(family, 5, 3, 5).unwrap();
            assert_eq!(s.n_violations, 0, "{family}");
            assert_eq!(s.n_total, 11u64.pow(3));
            assert_eq!(s.n_eligible + s.n_skipped, s.n_total);
            // residues {-5,0,5} per axis are divisible: 3^3 skipped
            assert_eq!(s.n_skipped, 27);
        }
    }

    #[test]
    fn summary_agrees_with_streamed_reports() {
        let family = PSetFamily::R;
        let summary = verify_weil_exhaustive(family, 3, 2, 4).unwrap();
        let mut eligible = 0;
        let mut skipped = 0;
        let mut max_modulus = 0.0f64;
        for_each_weil_report(family, 3, 2, 4, |r| match r.status {
            WeilStatus::Skipped => skipped += 1,
            _ => {
                eligible += 1;
                max_modulus = max_modulus.max(r.modulus_of_sum);
            }
        })
        .unwrap();
        assert_eq!(summary.n_eligible, eligible);
        assert_eq!(summary.n_skipped, skipped);
        assert!((summary.max_modulus - max_modulus).abs() < 1e-12);
    }

    #[test]
    fn rejects_composite_p() {
        assert!(exp_sum_p(9, &[1]).is_err());
        assert!(check_weil_bounds(PSetFamily::Q, 8, 1, 2).is_err());
    }

    #[test]
    fn degenerate_small_primes_exceed_classical_bound() {
        // p <= d: the phase polynomial can vanish as a function while the
        // hypothesis p ∤ h_j still holds, and the sum reaches full mass.
        // These pin the evaluator against hand computation.
        let s = exp_sum_p(2, &[1, 1]).unwrap(); // n + n² always even
        assert!((s - 2.0).abs() < 1e-12);
        assert!(s > weil_bound(PSetFamily::P, 2, 2));

        let s = exp_sum_q(2, &[0, 1]).unwrap(); // Σ_{n<4} e(n²/4) = 2 + 2i
        assert!((s - 8.0f64.sqrt()).abs() < 1e-12);
        assert!(s > weil_bound(PSetFamily::Q, 2, 2));

        let s = exp_sum_q(3, &[0, 0, 1]).unwrap(); // cubes mod 9 hit {0,1,8}
        let expect = 3.0 * (1.0 + 2.0 * (std::f64::consts::TAU / 9.0).cos());
        assert!((s - expect).abs() < 1e-11);
        assert!(s > weil_bound(PSetFamily::Q, 3, 3));

        // p > d restores the inequality on the same shapes
        for p in [3u64, 5, 7] {
            let s = verify_weil_exhaustive(PSetFamily::P, p, 2, p as i64).unwrap();
            assert_eq!(s.n_violations, 0);
        }
    }
}
