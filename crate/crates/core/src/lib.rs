//! Quantile versions of the Lorenz curve and the Gini coefficient.
//!
//! The classical Lorenz curve `L0(p) = p * mu_p / mu` compares the mean income of
//! the poorest fraction `p` with the population mean. This crate implements three
//! quantile analogues that replace both means by medians or quantile midranges:
//!
//! - `L1(p) = p * x_{p/2} / x_{1/2}`
//! - `L2(p) = p * x_{p/2} / x_{1-p/2}`
//! - `L3(p) = 2p * x_{p/2} / (x_{p/2} + x_{1-p/2})`
//!
//! together with their coefficients of inequality `G_i = 2 * int_0^1 (p - L_i(p)) dp`.
//!
//! # Modules
//!
//! - [`distributions`]: parametric income models with CDF, density, quantile and
//!   quantile-density machinery, cumulative income and inverse-transform sampling.
//! - [`empirical`]: the Hyndman-Fan Type 8 quantile estimator, empirical curves and
//!   the grid estimator of the coefficients.
//! - [`curves`] and [`coefficients`]: population curves and coefficients, the
//!   expectation oracle and coefficient rankings with Spearman correlations.
//! - [`transfer`]: median-preserving income transfers (poverty-line levy).
//! - [`influence`]: influence functions of quantiles, curves and coefficients and
//!   the asymptotic standard errors they imply.
//! - [`simulation`]: seeded, worker-count independent Monte Carlo studies.
//! - [`convexity`]: numerical and closed-form second derivatives of the curves.
//!
//! ```
//! use qlorenz::{coefficients, distributions::DistributionModel, CurveIndex};
//!
//! let uniform = DistributionModel::uniform(1.0).unwrap();
//! let g1 = coefficients::coefficient(&uniform, CurveIndex::Median, 1000).unwrap();
//! assert!((g1 - 1.0 / 3.0).abs() < 1e-6);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalogue;
pub mod coefficients;
pub mod convexity;
pub mod curves;
pub mod distributions;
pub mod empirical;
mod error;
pub mod influence;
pub mod quadrature;
pub mod rng;
pub mod simulation;
pub(crate) mod special;
pub mod transfer;

pub use curves::{CurveIndex, CurveTable, HeavyTailPolicy};
pub use distributions::{DistributionModel, ExtendedReal, Family};
pub use empirical::{Grid, Sample};
pub use error::{Error, Result};
pub use rng::RandomStream;

/// Default number of grid points used to approximate the coefficient integrals.
pub const DEFAULT_GRID: usize = 1000;
