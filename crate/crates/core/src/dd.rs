//! Double-double accumulation for the O(N²) pair sums.
//!
//! A value is kept as an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 106 bits of precision. The discrepancy formulas subtract
//! two nearly equal quantities of size ~3^{-d} to produce a result that can
//! be many orders of magnitude smaller, so the accumulation and the final
//! combination are carried out in this representation and rounded to f64
//! only once at the end.

/// Double-double value `hi + lo`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Exact sum: returns (s, e) with s = fl(a + b) and a + b = s + e.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Exact sum under |a| >= |b|.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Exact product via FMA: returns (p, e) with a * b = p + e.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact product of two f64 values.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Dd {
        let (p, e) = two_prod(a, b);
        Dd { hi: p, lo: e }
    }

    #[inline]
    pub fn add_f64(self, x: f64) -> Dd {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let (hi, lo) = quick_two_sum(s, e + self.lo + other.lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let (hi, lo) = quick_two_sum(p, e + self.lo * x);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div_f64(self, x: f64) -> Dd {
        let q1 = self.hi / x;
        let (p, e) = two_prod(q1, x);
        let r = ((self.hi - p) - e + self.lo) / x;
        let (hi, lo) = quick_two_sum(q1, r);
        Dd { hi, lo }
    }

    /// 1/3^d as a double-double, by repeated division.
    pub fn third_pow(d: u32) -> Dd {
        let mut v = Dd::from_f64(1.0);
        for _ in 0..d {
            v = v.div_f64(3.0);
        }
        v
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Sums f64 terms produced by an iterator without cancellation loss.
pub fn sum_f64<I: IntoIterator<Item = f64>>(iter: I) -> Dd {
    let mut acc = Dd::ZERO;
    for t in iter {
        acc = acc.add_f64(t);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_prod_is_exact() {
        let a = 1.0 / 3.0;
        let b = 1.0 / 7.0;
        let d = Dd::from_prod(a, b);
        // residual recovered exactly by FMA
        assert_eq!(a.mul_add(b, -d.hi), d.lo);
    }

    #[test]
    fn sums_many_tiny_terms_exactly() {
        // 2^26 copies of 2^-26 must sum to exactly 1 despite each partial
        // sum rounding away the increment in plain f64 past 2^27 terms.
        let n = 1u64 << 26;
        let t = (2.0f64).powi(-26);
        let s = sum_f64((0..n).map(|_| t));
        assert_eq!(s.to_f64(), 1.0);
        assert_eq!(s.lo, 0.0);
    }

    #[test]
    fn cancellation_preserves_low_bits() {
        // (1/3 + 1e-20) - 1/3 recovered to full precision
        let third = Dd::from_f64(1.0).div_f64(3.0);
        let x = third.add_f64(1e-20);
        let diff = x.sub(third);
        assert!((diff.to_f64() - 1e-20).abs() < 1e-33);
    }

    #[test]
    fn third_pow_matches_rational() {
        let v = Dd::third_pow(10);
        let expect = 1.0 / 59049.0;
        assert!((v.to_f64() - expect).abs() <= expect * 1e-15);
    }
}
