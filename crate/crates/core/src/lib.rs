//! Likelihood-based inference for micro-data observed only through
//! distributional summaries: order-statistic intervals, min/max and
//! quantile rectangles, and fixed- or random-bin histograms.
//!
//! ```
//! use symlik::distributions::Family;
//! use symlik::symbols::make_interval;
//! use symlik::likelihood::loglik_interval;
//!
//! let sym = make_interval(&[0.3, 1.2, -0.4, 0.8, 2.1], 2, 4).unwrap();
//! let fam = Family::normal(0.0, 1.0).unwrap();
//! let ll = loglik_interval(&sym, &fam).unwrap();
//! assert!(ll.is_finite());
//! ```

pub mod cli;
pub mod data;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod likelihood;
pub mod quadrature;
pub mod rng;
pub mod simulation;
pub mod symbols;

pub use data::DataMatrix;
pub use distributions::{Family, FamilyKind};
pub use error::{Error, Result};
