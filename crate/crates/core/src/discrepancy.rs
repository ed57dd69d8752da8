//! Periodic and plain L2 discrepancy by several independent routes.
//!
//! Routes implemented:
//!   * `B2_EXACT` — the O(N²d) pair sum over the Bernoulli kernel
//!     1/3 + B₂(|x_n - x_m|), for equal and arbitrary weights.
//!   * exact rational — the same pair sum in exact integer arithmetic for
//!     rational point sets; the highest-authority oracle.
//!   * `WARNOCK` — the pair-sum form of the plain (anchored) L2 discrepancy.
//!   * `FOURIER_TRUNCATED` — the exponential-sum expansion truncated to a
//!     finite frequency box, with a rigorous bound on the omitted tail.
//!   * `MC_ORACLE` — direct Monte Carlo integration of the defining double
//!     integral, and the random-shift estimator that averages exact plain
//!     L2 values over uniform shifts.
//!
//! The pair sums and the final combination of nearly cancelling terms are
//! carried in double-double precision (see [`crate::dd`]) and rounded to
//! f64 once. For N in the hundreds the squared discrepancy can be ~1e-6
//! against intermediate terms of size ~1/3; plain f64 or Kahan
//! accumulation would leave routes agreeing only to ~1e-11 relative.
//!
//! All reductions combine fixed-size batches in index order, so results
//! are bit-identical regardless of the number of worker threads.

use num::complex::Complex64;
use num::{BigInt, BigRational};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::pointset::{
    frac_add, in_interval, interval_length, PointSet, Points, WeightVector,
};

/// Which route produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "B2_EXACT")]
    B2Exact,
    #[serde(rename = "WARNOCK")]
    Warnock,
    #[serde(rename = "FOURIER_TRUNCATED")]
    FourierTruncated,
    #[serde(rename = "MC_ORACLE")]
    McOracle,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::B2Exact => "B2_EXACT",
            Method::Warnock => "WARNOCK",
            Method::FourierTruncated => "FOURIER_TRUNCATED",
            Method::McOracle => "MC_ORACLE",
        };
        write!(f, "{s}")
    }
}

/// A discrepancy value with method metadata.
///
/// `value` is sqrt(max(value_squared, 0)); `value_squared` keeps the raw
/// signed result so a tiny negative from rounding stays visible.
/// `n_terms_or_samples` counts pair terms (B2/Warnock), frequency-grid
/// entries (Fourier) or samples (MC).
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyResult {
    pub value: f64,
    pub value_squared: f64,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(rename = "n")]
    pub n_terms_or_samples: u64,
}

impl DiscrepancyResult {
    fn from_squared(value_squared: f64, method: Method, n: u64) -> DiscrepancyResult {
        DiscrepancyResult {
            value: value_squared.max(0.0).sqrt(),
            value_squared,
            method,
            tail_bound: None,
            std_error: None,
            n_terms_or_samples: n,
        }
    }
}

const ONE_THIRD: f64 = 1.0 / 3.0;
const ONE_SIXTH: f64 = 1.0 / 6.0;

/// Rows per task in the pair-sum reduction. Fixed so the reduction tree
/// does not depend on the thread count.
const PAIR_CHUNK_ROWS: usize = 64;
/// Samples per RNG stream in the box-sampling Monte Carlo oracle.
const MC_BATCH: u64 = 4096;
/// Shifts per RNG stream in the shift-based estimators.
const SHIFT_BATCH: u64 = 256;
/// Cap on frequency-grid entries for the Fourier route.
const MAX_FOURIER_GRID: u128 = 1 << 31;
/// Cap on the per-axis phase-table size for the Fourier route.
const MAX_FOURIER_TABLE: u128 = 1 << 26;

/// Second Bernoulli polynomial B₂(x) = x² - x + 1/6 on [0,1].
pub fn bernoulli_b2(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain {
            what: "bernoulli_b2 argument",
            value: x,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(b2_raw(x))
}

#[inline]
fn b2_raw(x: f64) -> f64 {
    x.mul_add(x - 1.0, ONE_SIXTH)
}

/// Pair kernel factor 1/3 + B₂(t).
#[inline]
fn kernel_factor(t: f64) -> f64 {
    ONE_THIRD + b2_raw(t)
}

/// 1/3^d rounded to f64 from the double-double value. The empty-set
/// discrepancy and `bounds::initial_periodic_l2` both derive from this so
/// they agree bit for bit.
pub(crate) fn third_pow_f64(dim: usize) -> f64 {
    Dd::third_pow(dim as u32).to_f64()
}

/// Σ over ordered pairs (n,m) with n < m of `term(n, m)`, in fixed chunk
/// order. The diagonal is excluded.
fn upper_pair_sum<F>(n: usize, term: F) -> Dd
where
    F: Fn(usize, usize) -> Dd + Sync,
{
    let n_chunks = n.div_ceil(PAIR_CHUNK_ROWS);
    let partials: Vec<Dd> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * PAIR_CHUNK_ROWS;
            let hi = (lo + PAIR_CHUNK_ROWS).min(n);
            let mut acc = Dd::ZERO;
            for i in lo..hi {
                for j in (i + 1)..n {
                    acc = acc.add(term(i, j));
                }
            }
            acc
        })
        .collect();
    partials.into_iter().fold(Dd::ZERO, Dd::add)
}

#[inline]
fn b2_pair_term<P: Points + ?Sized>(set: &P, n: usize, m: usize) -> f64 {
    let mut prod = 1.0;
    for j in 0..set.dim() {
        prod *= kernel_factor(set.coord_diff_abs(n, m, j));
    }
    prod
}

/// Periodic L2 discrepancy of a weighted point set via the B₂ pair sum:
/// value² = 1/3^d - 2/3^d Σ w_n + Σ w_n w_m Π_j (1/3 + B₂(|x_nj - x_mj|)).
pub fn periodic_l2_weighted<P: Points + ?Sized>(
    set: &P,
    weights: &WeightVector,
) -> Result<DiscrepancyResult> {
    weights.check_matches(set.n_points())?;
    let n = set.n_points();
    let third = Dd::third_pow(set.dim() as u32);
    if n == 0 {
        // initial discrepancy: value² = 1/3^d
        return Ok(DiscrepancyResult::from_squared(
            third.to_f64(),
            Method::B2Exact,
            0,
        ));
    }
    let w = weights.as_slice();
    let diag_d2 = kernel_factor(0.0).powi(set.dim() as i32);
    let mut pair = Dd::ZERO;
    for wi in w {
        pair = pair.add(Dd::from_prod(*wi, *wi).mul_f64(diag_d2));
    }
    let off = upper_pair_sum(n, |i, j| {
        Dd::from_prod(w[i], w[j]).mul_f64(b2_pair_term(set, i, j))
    });
    pair = pair.add(off.mul_f64(2.0));

    let w_sum = crate::dd::sum_f64(w.iter().copied());
    let value_sq = third
        .add(third.mul(w_sum).mul_f64(-2.0))
        .add(pair)
        .to_f64();
    Ok(DiscrepancyResult::from_squared(
        value_sq,
        Method::B2Exact,
        (n as u64) * (n as u64),
    ))
}

/// Equal-weight periodic L2 discrepancy:
/// value² = -1/3^d + (1/N²) Σ_{n,m} Π_j (1/3 + B₂(|x_nj - x_mj|)).
/// Rejects N = 0; the weighted entry point covers the empty set.
pub fn periodic_l2<P: Points + ?Sized>(set: &P) -> Result<DiscrepancyResult> {
    let n = set.n_points();
    if n == 0 {
        return Err(Error::EmptyPointSet);
    }
    let diag = kernel_factor(0.0).powi(set.dim() as i32);
    let off = upper_pair_sum(n, |i, j| Dd::from_f64(b2_pair_term(set, i, j)));
    let total = off.mul_f64(2.0).add(Dd::from_prod(n as f64, diag));
    let n_sq = (n as f64) * (n as f64);
    let value_sq = total
        .div_f64(n_sq)
        .sub(Dd::third_pow(set.dim() as u32))
        .to_f64();
    Ok(DiscrepancyResult::from_squared(
        value_sq,
        Method::B2Exact,
        (n as u64) * (n as u64),
    ))
}

/// Equal-weight periodic L2 discrepancy squared in exact rational
/// arithmetic. Only meaningful for rational sets; cost grows with N² and
/// the bit size of D^{2d}, so keep N small (a few hundred).
///
/// Per axis, 1/3 + B₂(a/D) = ((D-a)² + a²) / (2D²) exactly.
pub fn periodic_l2_exact_sq(set: &PointSet) -> BigRational {
    let d = set.dim();
    let n = set.n_points();
    let big_d = BigInt::from(set.denom());
    let three_d = BigInt::from(3u32).pow(d as u32);
    if n == 0 {
        return BigRational::new(BigInt::from(1), three_d);
    }
    let d_sq = set.denom() as u128 * set.denom() as u128;

    let axis_num = |a: u64| -> u128 {
        let a = a as u128;
        let dd = set.denom() as u128;
        (dd - a) * (dd - a) + a * a
    };

    // diagonal term is D^{2d} per point
    let mut total = BigInt::from(n) * BigInt::from(d_sq).pow(d as u32);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut prod = BigInt::from(1u32);
            for axis in 0..d {
                let a = set.numerator(i, axis).abs_diff(set.numerator(j, axis));
                prod *= BigInt::from(axis_num(a));
            }
            total += prod * 2;
        }
    }
    // value² = total / (N² (2D²)^d) - 1/3^d
    let denom = BigInt::from(n) * BigInt::from(n) * (BigInt::from(2u32) * &big_d * &big_d).pow(d as u32);
    BigRational::new(total, denom) - BigRational::new(BigInt::from(1), three_d)
}

/// Plain (anchored) L2 discrepancy of a weighted point set:
/// value² = Σ w_n w_m Π_j min(1-x_nj, 1-x_mj)
///        - 2 Σ w_n Π_j (1-x_nj²)/2 + 1/3^d.
pub fn plain_l2_weighted<P: Points + ?Sized>(set: &P, weights: &WeightVector) -> Result<DiscrepancyResult> {
    weights.check_matches(set.n_points())?;
    let value_sq = warnock_sq(set, weights.as_slice()).to_f64();
    let n = set.n_points() as u64;
    Ok(DiscrepancyResult::from_squared(
        value_sq,
        Method::Warnock,
        n * n,
    ))
}

/// Equal-weight plain L2 discrepancy (N = 0 allowed: the empty set has
/// value 3^{-d/2}).
pub fn plain_l2<P: Points + ?Sized>(set: &P) -> Result<DiscrepancyResult> {
    plain_l2_weighted(set, &WeightVector::equal(set.n_points()))
}

fn warnock_sq<P: Points + ?Sized>(set: &P, w: &[f64]) -> Dd {
    let n = set.n_points();
    let d = set.dim();
    let third = Dd::third_pow(d as u32);
    if n == 0 {
        return third;
    }
    let pair_term = |i: usize, j: usize| -> f64 {
        let mut prod = 1.0;
        for axis in 0..d {
            prod *= 1.0 - set.coord(i, axis).max(set.coord(j, axis));
        }
        prod
    };
    let mut pair = Dd::ZERO;
    for i in 0..n {
        let mut prod = 1.0;
        for axis in 0..d {
            prod *= 1.0 - set.coord(i, axis);
        }
        pair = pair.add(Dd::from_prod(w[i], w[i]).mul_f64(prod));
    }
    let off = upper_pair_sum(n, |i, j| Dd::from_prod(w[i], w[j]).mul_f64(pair_term(i, j)));
    pair = pair.add(off.mul_f64(2.0));

    let mut cross = Dd::ZERO;
    for i in 0..n {
        let mut prod = 1.0;
        for axis in 0..d {
            let x = set.coord(i, axis);
            prod *= (1.0 - x * x) * 0.5;
        }
        cross = cross.add(Dd::from_prod(w[i], prod));
    }
    pair.add(cross.mul_f64(-2.0)).add(third)
}

/// Serial variant used inside the shift estimators, where parallelism
/// already lives at the shift level.
fn warnock_sq_serial(coords: &[f64], dim: usize, w: &[f64]) -> Dd {
    let n = w.len();
    let third = Dd::third_pow(dim as u32);
    if n == 0 {
        return third;
    }
    let row = |i: usize| &coords[i * dim..(i + 1) * dim];
    let mut pair = Dd::ZERO;
    let mut cross = Dd::ZERO;
    for i in 0..n {
        let xi = row(i);
        let mut diag = 1.0;
        let mut anchored = 1.0;
        for &x in xi {
            diag *= 1.0 - x;
            anchored *= (1.0 - x * x) * 0.5;
        }
        pair = pair.add(Dd::from_prod(w[i], w[i]).mul_f64(diag));
        cross = cross.add(Dd::from_prod(w[i], anchored));
        for j in (i + 1)..n {
            let xj = row(j);
            let mut prod = 1.0;
            for axis in 0..dim {
                prod *= 1.0 - xi[axis].max(xj[axis]);
            }
            pair = pair.add(Dd::from_prod(w[i], w[j]).mul_f64(2.0 * prod));
        }
    }
    pair.add(cross.mul_f64(-2.0)).add(third)
}

/// Frequency weight 1/r(k)² of the exponential-sum expansion: 1 for
/// k = 0, 6/(4π²k²) otherwise. Positive, symmetric in k, decreasing in |k|.
pub fn fourier_weight_recip_sq(k: i64) -> f64 {
    if k == 0 {
        1.0
    } else {
        let k = k as f64;
        6.0 / (4.0 * std::f64::consts::PI.powi(2) * k * k)
    }
}

/// Per-axis weight sum truncated at |k| <= k_max. The full sum (k_max → ∞)
/// is 3/2.
pub fn fourier_axis_sum(k_max: u32) -> f64 {
    // sum ascending in 1/k² magnitude (k descending) for accuracy
    let mut h = 0.0;
    for k in (1..=k_max as u64).rev() {
        let k = k as f64;
        h += 1.0 / (k * k);
    }
    1.0 + 3.0 / std::f64::consts::PI.powi(2) * h
}

/// Truncated exponential-sum (Fourier) evaluation of the periodic L2
/// discrepancy:
/// value² = 3^{-d} [ (1 - Σw)² + Σ_{k ∈ [-K,K]^d \ 0} 1/r(k)² |S_w(k)|² ]
/// with S_w(k) = Σ_h w_h exp(2πi k·x_h). For weights summing to 1 the
/// first term vanishes and this is the plain truncation of the
/// exponential-sum identity.
///
/// The omitted mass is bounded by
/// tail_bound = ((3/2)^d - T(K)^d) (Σ|w_h|)² / 3^d,
/// where T(K) is the truncated per-axis weight sum, so
/// value²_true - value² ∈ [0, tail_bound].
pub fn periodic_l2_fourier<P: Points + ?Sized>(
    set: &P,
    weights: &WeightVector,
    k_max: u32,
) -> Result<DiscrepancyResult> {
    weights.check_matches(set.n_points())?;
    if k_max == 0 {
        return Err(Error::OutOfDomain {
            what: "k_max",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let d = set.dim();
    let n = set.n_points();
    let side = 2 * k_max as u128 + 1;
    let grid = side
        .checked_pow(d as u32)
        .filter(|&g| g <= MAX_FOURIER_GRID)
        .ok_or_else(|| Error::TooLarge {
            what: "Fourier frequency grid",
            detail: format!("(2*{k_max}+1)^{d} entries exceed the budget"),
        })?;
    if (n as u128) * (d as u128) * side > MAX_FOURIER_TABLE {
        return Err(Error::TooLarge {
            what: "Fourier phase table",
            detail: format!("N*d*(2K+1) too large at N={n}, d={d}, K={k_max}"),
        });
    }

    let kk = k_max as i64;
    let w = weights.as_slice();
    // tables[axis][(k + K)*N + h] = exp(2πi k x_{h,axis})
    let tables: Vec<Vec<Complex64>> = (0..d)
        .map(|axis| {
            let mut t = Vec::with_capacity(side as usize * n);
            for k in -kk..=kk {
                for h in 0..n {
                    let angle = std::f64::consts::TAU * k as f64 * set.coord(h, axis);
                    t.push(Complex64::new(angle.cos(), angle.sin()));
                }
            }
            t
        })
        .collect();
    let wr: Vec<f64> = (0..=kk).map(fourier_weight_recip_sq).collect();

    let partials: Vec<Dd> = (-kk..=kk)
        .into_par_iter()
        .map(|k0| {
            let mut scratch: Vec<Vec<Complex64>> = (0..d).map(|_| vec![Complex64::new(0.0, 0.0); n]).collect();
            let table0 = &tables[0];
            let base = ((k0 + kk) as usize) * n;
            if d == 1 {
                if k0 == 0 {
                    return Dd::ZERO;
                }
                let mut s = Complex64::new(0.0, 0.0);
                for h in 0..n {
                    s += w[h] * table0[base + h];
                }
                return Dd::from_f64(wr[k0.unsigned_abs() as usize] * s.norm_sqr());
            }
            for h in 0..n {
                scratch[0][h] = w[h] * table0[base + h];
            }
            let (head, rest) = scratch.split_at_mut(1);
            fourier_subtree(
                &tables,
                &wr,
                kk,
                n,
                1,
                k0 == 0,
                wr[k0.unsigned_abs() as usize],
                &head[0],
                rest,
            )
        })
        .collect();
    let partial = partials.into_iter().fold(Dd::ZERO, Dd::add);

    let third = Dd::third_pow(d as u32);
    let w_sum = crate::dd::sum_f64(w.iter().copied());
    let one_minus = Dd::from_f64(1.0).sub(w_sum);
    let value_sq = third.mul(one_minus.mul(one_minus).add(partial)).to_f64();

    let abs_w = weights.abs_sum();
    let full_axis: f64 = pow_mul(1.5, d as u32);
    let trunc_axis = pow_mul(fourier_axis_sum(k_max), d as u32);
    // A single point attains the bound with equality (every |S(k)| equals
    // the weight mass), so inflate by a hair to keep the bound an upper
    // bound under the rounding of this very computation.
    let raw = (full_axis - trunc_axis) * abs_w * abs_w / pow_mul(3.0, d as u32);
    let tail_bound = (raw * (1.0 + 1e-9) + 1e-18).max(0.0);

    let mut result =
        DiscrepancyResult::from_squared(value_sq, Method::FourierTruncated, (grid - 1) as u64);
    result.tail_bound = Some(tail_bound);
    Ok(result)
}

#[allow(clippy::too_many_arguments)]
fn fourier_subtree(
    tables: &[Vec<Complex64>],
    wr: &[f64],
    kk: i64,
    n: usize,
    level: usize,
    zero_prefix: bool,
    w_prefix: f64,
    prod: &[Complex64],
    scratch: &mut [Vec<Complex64>],
) -> Dd {
    let table = &tables[level];
    let last = level == tables.len() - 1;
    let mut acc = Dd::ZERO;
    for k in -kk..=kk {
        let base = ((k + kk) as usize) * n;
        let w_here = w_prefix * wr[k.unsigned_abs() as usize];
        if last {
            if zero_prefix && k == 0 {
                continue;
            }
            let mut s = Complex64::new(0.0, 0.0);
            for h in 0..n {
                s += prod[h] * table[base + h];
            }
            acc = acc.add_f64(w_here * s.norm_sqr());
        } else {
            let (head, rest) = scratch.split_at_mut(1);
            let next = &mut head[0][..n];
            for h in 0..n {
                next[h] = prod[h] * table[base + h];
            }
            acc = acc.add(fourier_subtree(
                tables,
                wr,
                kk,
                n,
                level + 1,
                zero_prefix && k == 0,
                w_here,
                next,
                rest,
            ));
        }
    }
    acc
}

/// x^d by repeated multiplication.
pub(crate) fn pow_mul(x: f64, d: u32) -> f64 {
    let mut v = 1.0;
    for _ in 0..d {
        v *= x;
    }
    v
}

/// Monte Carlo estimate of the squared periodic L2 discrepancy: averages
/// the squared local discrepancy over `n_samples` uniform anchor pairs
/// (x,y). Unbiased; the reported `std_error` is the sample standard error
/// of the mean. Sampling is ChaCha8 with one stream per fixed-size batch,
/// so results do not depend on the thread count.
pub fn periodic_l2_mc<P: Points + ?Sized>(
    set: &P,
    weights: &WeightVector,
    n_samples: u64,
    seed: u64,
) -> Result<DiscrepancyResult> {
    weights.check_matches(set.n_points())?;
    if n_samples < 2 {
        return Err(Error::OutOfDomain {
            what: "n_samples",
            value: n_samples as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    let d = set.dim();
    let n = set.n_points();
    let w = weights.as_slice();
    let n_batches = n_samples.div_ceil(MC_BATCH);
    let partials: Vec<(Dd, Dd)> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let lo = b * MC_BATCH;
            let hi = (lo + MC_BATCH).min(n_samples);
            let mut x = vec![0.0f64; d];
            let mut y = vec![0.0f64; d];
            let mut q_sum = Dd::ZERO;
            let mut q2_sum = Dd::ZERO;
            for _ in lo..hi {
                for xj in x.iter_mut() {
                    *xj = rng.random();
                }
                for yj in y.iter_mut() {
                    *yj = rng.random();
                }
                let mut vol = 1.0;
                for j in 0..d {
                    vol *= interval_length(x[j], y[j]);
                }
                let mut inside_w = 0.0;
                'points: for i in 0..n {
                    for j in 0..d {
                        if !in_interval(set.coord(i, j), x[j], y[j]) {
                            continue 'points;
                        }
                    }
                    inside_w += w[i];
                }
                let delta = inside_w - vol;
                let q = delta * delta;
                q_sum = q_sum.add_f64(q);
                q2_sum = q2_sum.add_f64(q * q);
            }
            (q_sum, q2_sum)
        })
        .collect();
    let (q_sum, q2_sum) = partials
        .into_iter()
        .fold((Dd::ZERO, Dd::ZERO), |(a, b), (c, d)| (a.add(c), b.add(d)));
    let (mean, se) = mean_and_se(q_sum, q2_sum, n_samples);
    let mut result = DiscrepancyResult::from_squared(mean, Method::McOracle, n_samples);
    result.std_error = Some(se);
    Ok(result)
}

fn mean_and_se(q_sum: Dd, q2_sum: Dd, m: u64) -> (f64, f64) {
    let mf = m as f64;
    let mean = q_sum.div_f64(mf).to_f64();
    if m < 2 {
        return (mean, f64::NAN);
    }
    let var = q2_sum
        .sub(q_sum.mul(q_sum).div_f64(mf))
        .div_f64(mf - 1.0)
        .to_f64()
        .max(0.0);
    (mean, (var / mf).sqrt())
}

/// Root-mean-square plain L2 discrepancy over uniform random shifts:
/// draws `n_shifts` shifts, evaluates the exact plain L2² of each shifted
/// set and averages. By the shift identity this estimates the squared
/// periodic L2 discrepancy. `std_error` is None for a single shift.
pub fn rms_shifted_l2_mc<P: Points + ?Sized>(
    set: &P,
    weights: &WeightVector,
    n_shifts: u64,
    seed: u64,
) -> Result<DiscrepancyResult> {
    weights.check_matches(set.n_points())?;
    if n_shifts < 1 {
        return Err(Error::OutOfDomain {
            what: "n_shifts",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let d = set.dim();
    let w = weights.as_slice();
    let n_batches = n_shifts.div_ceil(SHIFT_BATCH);
    let partials: Vec<(Dd, Dd)> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = shift_rng(seed, b);
            let lo = b * SHIFT_BATCH;
            let hi = (lo + SHIFT_BATCH).min(n_shifts);
            let mut delta = vec![0.0f64; d];
            let mut coords = vec![0.0f64; set.n_points() * d];
            let mut q_sum = Dd::ZERO;
            let mut q2_sum = Dd::ZERO;
            for _ in lo..hi {
                for dj in delta.iter_mut() {
                    *dj = rng.random();
                }
                shift_into(set, &delta, &mut coords);
                let q = warnock_sq_serial(&coords, d, w).to_f64();
                q_sum = q_sum.add_f64(q);
                q2_sum = q2_sum.add_f64(q * q);
            }
            (q_sum, q2_sum)
        })
        .collect();
    let (q_sum, q2_sum) = partials
        .into_iter()
        .fold((Dd::ZERO, Dd::ZERO), |(a, b), (c, d)| (a.add(c), b.add(d)));
    let (mean, se) = mean_and_se(q_sum, q2_sum, n_shifts);
    let mut result = DiscrepancyResult::from_squared(mean, Method::McOracle, n_shifts);
    result.std_error = if n_shifts >= 2 { Some(se) } else { None };
    Ok(result)
}

fn shift_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

fn shift_into<P: Points + ?Sized>(set: &P, delta: &[f64], coords: &mut [f64]) {
    let d = set.dim();
    for i in 0..set.n_points() {
        for j in 0..d {
            coords[i * d + j] = frac_add(set.coord(i, j), delta[j]);
        }
    }
}

/// Best-effort search for a shift with small plain L2 discrepancy.
/// Candidate 0 is the zero shift; the remaining `n_candidates - 1` are
/// drawn uniformly. Returns the best shift and its (equal-weight) plain
/// L2 discrepancy. The minimum over the sampled set never exceeds the
/// RMS over the same sample.
pub fn find_good_shift<P: Points + ?Sized>(
    set: &P,
    n_candidates: u64,
    seed: u64,
) -> Result<(Vec<f64>, f64)> {
    if n_candidates < 1 {
        return Err(Error::OutOfDomain {
            what: "n_candidates",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let d = set.dim();
    let w = WeightVector::equal(set.n_points());
    let n_batches = n_candidates.div_ceil(SHIFT_BATCH);
    let per_batch: Vec<(f64, Vec<f64>)> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = shift_rng(seed, b);
            let lo = b * SHIFT_BATCH;
            let hi = (lo + SHIFT_BATCH).min(n_candidates);
            let mut delta = vec![0.0f64; d];
            let mut coords = vec![0.0f64; set.n_points() * d];
            let mut best_q = f64::INFINITY;
            let mut best_delta = vec![0.0f64; d];
            for idx in lo..hi {
                for dj in delta.iter_mut() {
                    *dj = rng.random();
                }
                if idx == 0 {
                    // forced zero-shift candidate; the draw above keeps
                    // subsequent candidates aligned with rms_shifted_l2_mc
                    delta.iter_mut().for_each(|dj| *dj = 0.0);
                }
                shift_into(set, &delta, &mut coords);
                let q = warnock_sq_serial(&coords, d, w.as_slice()).to_f64();
                if q < best_q {
                    best_q = q;
                    best_delta.copy_from_slice(&delta);
                }
            }
            (best_q, best_delta)
        })
        .collect();
    let mut best_q = f64::INFINITY;
    let mut best_delta = vec![0.0f64; d];
    for (q, delta) in per_batch {
        if q < best_q {
            best_q = q;
            best_delta = delta;
        }
    }
    Ok((best_delta, best_q.max(0.0).sqrt()))
}
