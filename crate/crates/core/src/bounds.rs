//! Closed-form quantities the p-sets are measured against: the guaranteed
//! discrepancy bound, the random-set average, the empty-set baseline, and
//! the lower/upper bounds on the inverse discrepancy (the smallest N that
//! reaches a target fraction of the baseline).

use num::{BigInt, BigRational, FromPrimitive, ToPrimitive};
use serde::Serialize;

use crate::discrepancy::{periodic_l2, pow_mul, third_pow_f64};
use crate::error::{Error, Result};
use crate::korobov::{generate, next_prime, PSetFamily};

/// Guaranteed periodic L2 discrepancy bound for the p-sets:
/// d · 2^{-d/2} / √N.
pub fn pset_l2_bound(d: u32, n: u64) -> f64 {
    d as f64 / (pow_mul(2.0, d).sqrt() * (n as f64).sqrt())
}

/// Average periodic L2 discrepancy of N uniform random points, as the
/// root of the exact expectation of the squared discrepancy:
/// sqrt((2^{-d} - 3^{-d}) / N). The plain L2 average has the same closed
/// form, so this one function serves both.
pub fn average_l2(n: u64, d: u32) -> f64 {
    average_l2_sq(n, d).sqrt()
}

/// The exact expectation (2^{-d} - 3^{-d}) / N of the squared discrepancy
/// of N uniform random points.
pub fn average_l2_sq(n: u64, d: u32) -> f64 {
    (pow_mul(0.5, d) - pow_mul(1.0 / 3.0, d)) / n as f64
}

/// Periodic L2 discrepancy of the empty point set, 3^{-d/2}. Derived from
/// the same 1/3^d value the discrepancy engine uses, so the two agree bit
/// for bit.
pub fn initial_periodic_l2(d: u32) -> f64 {
    third_pow_f64(d as usize).sqrt()
}

fn check_eps(eps: f64, hi_inclusive: bool) -> Result<()> {
    let ok = eps > 0.0 && if hi_inclusive { eps <= 1.0 } else { eps < 1.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            what: "eps",
            value: eps,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

/// Lower bound on the inverse discrepancy with equal weights:
/// (3/2)^d / (1 + ε²).
pub fn inverse_lower_equal(eps: f64, d: u32) -> Result<f64> {
    check_eps(eps, false)?;
    Ok(pow_mul(1.5, d) / (1.0 + eps * eps))
}

/// Lower bound when only positive weights are allowed:
/// (1 - ε²) (3/2)^d.
pub fn inverse_lower_posweights(eps: f64, d: u32) -> Result<f64> {
    check_eps(eps, false)?;
    Ok((1.0 - eps * eps) * pow_mul(1.5, d))
}

/// Lower bound with arbitrary weights. Only the exponential base is
/// known; the constant in front is existential and depends on the ε
/// range, so the bound is reported as exponent-only together with the
/// weaker explicit intermediate (1 - ε²) · 1.125^d.
#[derive(Debug, Clone, Serialize)]
pub struct WeightedLowerBound {
    pub base: f64,
    pub d: u32,
    pub intermediate: f64,
    pub note: &'static str,
}

pub const WEIGHTED_LOWER_BASE: f64 = 1.0628;

pub fn inverse_lower_weighted(eps: f64, d: u32) -> Result<WeightedLowerBound> {
    check_eps(eps, false)?;
    Ok(WeightedLowerBound {
        base: WEIGHTED_LOWER_BASE,
        d,
        intermediate: (1.0 - eps * eps) * pow_mul(1.125, d),
        note: "exponent-only: the constant multiplying base^d is existential and unspecified",
    })
}

/// Constructive upper bound via the P family:
/// M = ceil((3/2)^d d²/ε²), N' = next prime >= M, and N' < 2M by
/// Bertrand's postulate. The P set with p = N' reaches discrepancy
/// ε · 3^{-d/2}.
#[derive(Debug, Clone, Serialize)]
pub struct PsetUpperBound {
    pub m: u64,
    pub n_prime: u64,
    pub upper: u64,
}

pub fn inverse_upper_from_psets(eps: f64, d: u32) -> Result<PsetUpperBound> {
    check_eps(eps, true)?;
    // exact rational ceiling: 3^d d² / (2^d eps²) with eps taken at its
    // exact binary value, so results near integer boundaries are stable
    let eps_rat = BigRational::from_f64(eps).ok_or(Error::OutOfDomain {
        what: "eps",
        value: eps,
        lo: 0.0,
        hi: 1.0,
    })?;
    let d_sq = BigInt::from(d) * BigInt::from(d);
    let ratio = BigRational::new(BigInt::from(3u32).pow(d) * d_sq, BigInt::from(2u32).pow(d))
        / (&eps_rat * &eps_rat);
    let m = ratio
        .ceil()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::TooLarge {
            what: "inverse upper bound",
            detail: format!("M overflows u64 at d={d}, eps={eps}"),
        })?;
    let n_prime = next_prime(m.max(1))?;
    let upper = m.checked_mul(2).ok_or(Error::TooLarge {
        what: "inverse upper bound",
        detail: "2M overflows u64".into(),
    })?;
    if !(m <= n_prime && n_prime < upper || m <= 1) {
        return Err(Error::Internal(format!(
            "Bertrand violated: M={m}, next prime {n_prime}"
        )));
    }
    Ok(PsetUpperBound { m, n_prime, upper })
}

/// One verified discrepancy-vs-bound instance.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub family: PSetFamily,
    pub p: u64,
    pub d: u32,
    pub n_points: u64,
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Comparison slack for the discrepancy-vs-bound checks.
pub const BOUND_CHECK_SLACK: f64 = 1e-12;

/// Generates the requested p-set, computes its periodic L2 discrepancy by
/// the pair-sum route, and compares against `pset_l2_bound`.
pub fn check_pset_bound(family: PSetFamily, p: u64, d: u32) -> Result<BoundReport> {
    let set = generate(family, p, d as usize)?;
    let n = family.n_points(p);
    let value = periodic_l2(&set)?.value;
    let bound = pset_l2_bound(d, n);
    Ok(BoundReport {
        family,
        p,
        d,
        n_points: n,
        value,
        bound,
        ratio: value / bound,
        pass: value <= bound + BOUND_CHECK_SLACK,
    })
}

/// One row of the inverse-discrepancy table.
#[derive(Debug, Clone, Serialize)]
pub struct InverseRow {
    pub d: u32,
    pub eps: f64,
    pub lower_equal: f64,
    pub lower_posweights: f64,
    pub weighted_base: f64,
    pub weighted_intermediate: f64,
    pub m: u64,
    pub n_prime: u64,
    pub upper: u64,
}

pub fn inverse_table(ds: &[u32], epss: &[f64]) -> Result<Vec<InverseRow>> {
    let mut rows = Vec::with_capacity(ds.len() * epss.len());
    for &d in ds {
        for &eps in epss {
            let weighted = inverse_lower_weighted(eps, d)?;
            let upper = inverse_upper_from_psets(eps, d)?;
            rows.push(InverseRow {
                d,
                eps,
                lower_equal: inverse_lower_equal(eps, d)?,
                lower_posweights: inverse_lower_posweights(eps, d)?,
                weighted_base: weighted.base,
                weighted_intermediate: weighted.intermediate,
                m: upper.m,
                n_prime: upper.n_prime,
                upper: upper.upper,
            });
        }
    }
    Ok(rows)
}
