//! Point sets on the torus, Korobov's p-set constructions, and their
//! periodic and plain L2 discrepancy computed by several independent
//! routes (exact pair sums, exact rational arithmetic, truncated
//! exponential-sum expansion, Monte Carlo), together with brute-force
//! verification of the Weil-type exponential-sum bounds and the
//! closed-form bound and average formulas these constructions satisfy.

pub mod bounds;
pub mod dd;
pub mod discrepancy;
pub mod error;
pub mod expsums;
pub mod format;
pub mod korobov;
pub mod pointset;

pub use error::{Error, Result};
pub use pointset::{FreePointSet, PeriodicBox, PointSet, Points, WeightVector};
