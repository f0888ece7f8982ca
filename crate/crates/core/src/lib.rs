//! Pivot-movement probabilities for Gaussian elimination with partial
//! pivoting (GEPP) on random matrix ensembles.
//!
//! The crate is split along the lines of the computation:
//!
//! - [`scalar`]: real, complex and quaternion scalars with the two pivot
//!   magnitudes (L1 and modulus).
//! - [`rng`]: seedable, substream-splittable random streams.
//! - [`ensembles`]: GOE / GUE / GSE, the tridiagonal β-Hermite model and
//!   iid Gaussian matrices.
//! - [`gepp`]: `PA = LU` with a swappable pivot rule, plus permutation
//!   statistics.
//! - [`exact`]: incomplete beta, F CDF, closed-form 2×2 pivot
//!   probabilities and spherical-area quadrature.
//! - [`montecarlo`]: reproducible parallel Bernoulli estimators.
//! - [`cli`]: the `pivotlab` command-line front end.

pub mod cli;
pub mod ensembles;
pub mod error;
pub mod exact;
pub mod gepp;
pub mod montecarlo;
pub mod rng;
pub mod scalar;

pub use ensembles::{sample, EnsembleSpec, Family, Matrix};
pub use error::{Error, Result};
pub use gepp::{cycle_count, factorize, Factorization, Permutation, PivotRule};
pub use montecarlo::{EstimateResult, McOptions};
pub use rng::RandomStream;
pub use scalar::{Kind, Scalar};
