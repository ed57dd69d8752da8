//! Point sets on the d-dimensional torus, periodic boxes and the local
//! discrepancy function.
//!
//! Two representations coexist. [`PointSet`] stores exact rational
//! coordinates as integer numerators over a common denominator, which the
//! p-set generators produce and the pair-sum discrepancy formulas exploit
//! (coordinate differences stay exact). [`FreePointSet`] stores plain
//! floating coordinates and is what shifting or random sampling yields.

use crate::dd::Dd;
use crate::error::{Error, Result};

/// Largest denominator for which `numerator as f64 / denom as f64` is the
/// correctly rounded value of the fraction.
const MAX_EXACT_DENOM: u64 = 1 << 53;

/// Point set with exact rational coordinates k/D in [0,1).
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    n_points: usize,
    denom: u64,
    /// Row-major N×d numerators, each in [0, denom).
    numerators: Vec<u64>,
    /// Derived floating coordinates, never authoritative.
    float_coords: Vec<f64>,
}

/// Point set with floating coordinates in [0,1).
#[derive(Debug, Clone, PartialEq)]
pub struct FreePointSet {
    dim: usize,
    n_points: usize,
    coords: Vec<f64>,
}

/// Read access shared by both point-set representations.
///
/// `coord_diff_abs` exists so the pair-sum kernels see exact coordinate
/// differences when the set is rational.
pub trait Points: Sync {
    fn dim(&self) -> usize;
    fn n_points(&self) -> usize;
    fn coord(&self, point: usize, axis: usize) -> f64;

    /// |x_{n,axis} - x_{m,axis}| in [0,1].
    #[inline]
    fn coord_diff_abs(&self, n: usize, m: usize, axis: usize) -> f64 {
        (self.coord(n, axis) - self.coord(m, axis)).abs()
    }
}

impl PointSet {
    /// Builds a point set from row-major numerators over denominator `denom`.
    /// Numerators outside [0, denom) are reduced into range mod `denom`.
    pub fn from_numerators(dim: usize, denom: u64, numerators: &[i64]) -> Result<PointSet> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if denom == 0 {
            return Err(Error::ZeroDenominator);
        }
        if denom > MAX_EXACT_DENOM {
            return Err(Error::TooLarge {
                what: "denominator",
                detail: format!("{denom} > 2^53 breaks exact float derivation"),
            });
        }
        if numerators.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: numerators.len() % dim,
            });
        }
        let reduced: Vec<u64> = numerators
            .iter()
            .map(|&v| v.rem_euclid(denom as i64) as u64)
            .collect();
        Ok(Self::from_reduced(dim, denom, reduced))
    }

    /// Builds from numerators already known to lie in [0, denom).
    pub(crate) fn from_reduced(dim: usize, denom: u64, numerators: Vec<u64>) -> PointSet {
        debug_assert!(numerators.iter().all(|&v| v < denom));
        debug_assert_eq!(numerators.len() % dim, 0);
        let float_coords = numerators
            .iter()
            .map(|&v| v as f64 / denom as f64)
            .collect();
        PointSet {
            dim,
            n_points: numerators.len() / dim,
            denom,
            numerators,
            float_coords,
        }
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn numerator(&self, point: usize, axis: usize) -> u64 {
        self.numerators[point * self.dim + axis]
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn float_coords(&self) -> &[f64] {
        &self.float_coords
    }
}

impl Points for PointSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    fn coord(&self, point: usize, axis: usize) -> f64 {
        self.float_coords[point * self.dim + axis]
    }

    /// Exact: |a - b| / D with the integer difference formed first.
    #[inline]
    fn coord_diff_abs(&self, n: usize, m: usize, axis: usize) -> f64 {
        let a = self.numerators[n * self.dim + axis];
        let b = self.numerators[m * self.dim + axis];
        a.abs_diff(b) as f64 / self.denom as f64
    }
}

impl FreePointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<FreePointSet> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coords.len() % dim,
            });
        }
        for &c in &coords {
            if !(0.0..1.0).contains(&c) {
                return Err(Error::OutOfDomain {
                    what: "coordinate",
                    value: c,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(FreePointSet {
            dim,
            n_points: coords.len() / dim,
            coords,
        })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

impl Points for FreePointSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    fn coord(&self, point: usize, axis: usize) -> f64 {
        self.coords[point * self.dim + axis]
    }
}

/// Real weights attached to a point set. Values may be negative; the
/// equal-weight constructor yields w_j = 1/N (each the same rounded f64).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> WeightVector {
        WeightVector(weights)
    }

    pub fn equal(n: usize) -> WeightVector {
        WeightVector(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Σ w_j, accumulated without cancellation loss.
    pub fn sum(&self) -> f64 {
        crate::dd::sum_f64(self.0.iter().copied()).to_f64()
    }

    /// Σ |w_j|.
    pub fn abs_sum(&self) -> f64 {
        crate::dd::sum_f64(self.0.iter().map(|w| w.abs())).to_f64()
    }

    pub(crate) fn check_matches(&self, n_points: usize) -> Result<()> {
        if self.0.len() != n_points {
            return Err(Error::LengthMismatch {
                expected: n_points,
                got: self.0.len(),
            });
        }
        Ok(())
    }
}

/// Periodic box B(x,y): per axis the interval [x,y) when x <= y, otherwise
/// the wrap-around set [0,y) ∪ [x,1). x = y gives the empty interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicBox {
    anchor_x: Vec<f64>,
    anchor_y: Vec<f64>,
}

impl PeriodicBox {
    pub fn new(anchor_x: Vec<f64>, anchor_y: Vec<f64>) -> Result<PeriodicBox> {
        if anchor_x.len() != anchor_y.len() {
            return Err(Error::DimensionMismatch {
                expected: anchor_x.len(),
                got: anchor_y.len(),
            });
        }
        if anchor_x.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for &c in anchor_x.iter().chain(anchor_y.iter()) {
            if !(0.0..1.0).contains(&c) {
                return Err(Error::OutOfDomain {
                    what: "box anchor",
                    value: c,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(PeriodicBox { anchor_x, anchor_y })
    }

    pub fn dim(&self) -> usize {
        self.anchor_x.len()
    }

    pub fn anchor_x(&self) -> &[f64] {
        &self.anchor_x
    }

    pub fn anchor_y(&self) -> &[f64] {
        &self.anchor_y
    }

    /// Product over axes of the periodic interval length.
    pub fn volume(&self) -> f64 {
        self.anchor_x
            .iter()
            .zip(&self.anchor_y)
            .map(|(&x, &y)| interval_length(x, y))
            .product()
    }

    /// Half-open membership test for a point in [0,1)^d.
    pub fn contains(&self, point: &[f64]) -> bool {
        debug_assert_eq!(point.len(), self.dim());
        point
            .iter()
            .zip(self.anchor_x.iter().zip(&self.anchor_y))
            .all(|(&p, (&x, &y))| in_interval(p, x, y))
    }

    fn contains_point_of<P: Points + ?Sized>(&self, set: &P, i: usize) -> bool {
        (0..self.dim()).all(|j| in_interval(set.coord(i, j), self.anchor_x[j], self.anchor_y[j]))
    }
}

/// Length of the periodic interval I(x,y).
#[inline]
pub fn interval_length(x: f64, y: f64) -> f64 {
    if x <= y {
        y - x
    } else {
        1.0 - x + y
    }
}

/// Membership p ∈ I(x,y) with half-open semantics on both branches.
#[inline]
pub fn in_interval(p: f64, x: f64, y: f64) -> bool {
    if x <= y {
        x <= p && p < y
    } else {
        p < y || x <= p
    }
}

/// Exact membership a/b ∈ I(xn/xd, yn/yd) by integer cross-multiplication.
/// Removes boundary ambiguity when both the point and the anchors are
/// rational; used as an oracle for the floating test.
pub fn in_interval_rational(a: u64, b: u64, xn: u64, xd: u64, yn: u64, yd: u64) -> bool {
    debug_assert!(b > 0 && xd > 0 && yd > 0);
    debug_assert!(a < b && xn < xd && yn < yd);
    // p >= x  <=>  a*xd >= xn*b ; p < y  <=>  a*yd < yn*b
    let ge_x = (a as u128) * (xd as u128) >= (xn as u128) * (b as u128);
    let lt_y = (a as u128) * (yd as u128) < (yn as u128) * (b as u128);
    let x_le_y = (xn as u128) * (yd as u128) <= (yn as u128) * (xd as u128);
    if x_le_y {
        ge_x && lt_y
    } else {
        lt_y || ge_x
    }
}

/// Weighted local discrepancy Δ_P(B,w): weight of points inside B minus
/// the volume of B.
pub fn local_discrepancy<P: Points + ?Sized>(
    set: &P,
    weights: &WeightVector,
    bbox: &PeriodicBox,
) -> Result<f64> {
    weights.check_matches(set.n_points())?;
    if bbox.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: bbox.dim(),
        });
    }
    let mut acc = Dd::ZERO;
    for i in 0..set.n_points() {
        if bbox.contains_point_of(set, i) {
            acc = acc.add_f64(weights.as_slice()[i]);
        }
    }
    Ok(acc.add_f64(-bbox.volume()).to_f64())
}

/// Fractional part of x + delta for x, delta in [0,1).
#[inline]
pub fn frac_add(x: f64, delta: f64) -> f64 {
    let s = x + delta;
    if s >= 1.0 {
        s - 1.0
    } else {
        s
    }
}

/// Component-wise shift modulo 1. The result is always a free set.
pub fn shift_point_set<P: Points + ?Sized>(set: &P, delta: &[f64]) -> Result<FreePointSet> {
    if delta.len() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: delta.len(),
        });
    }
    for &c in delta {
        if !(0.0..1.0).contains(&c) {
            return Err(Error::OutOfDomain {
                what: "shift component",
                value: c,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    let d = set.dim();
    let mut coords = Vec::with_capacity(set.n_points() * d);
    for i in 0..set.n_points() {
        for j in 0..d {
            coords.push(frac_add(set.coord(i, j), delta[j]));
        }
    }
    Ok(FreePointSet {
        dim: d,
        n_points: set.n_points(),
        coords,
    })
}
