//! Probability measures whose moments are the binomial numbers `C(np+r, n)`
//! and the Raney numbers `C(np+r, n) r/(np+r)`.
//!
//! The crate computes the moment sequences, their generating functions,
//! the densities `V_{p,r}` (through Slater sums of hypergeometric functions
//! or elementary closed forms), Mellin-product factorizations with a
//! sampler, free-probability transforms, and numerical certificates for
//! positive definiteness.

pub mod binom;
pub mod classify;
pub mod closedform;
pub mod error;
pub mod exact;
pub mod freeconv;
pub mod gamma;
pub mod genfun;
pub mod hypergeom;
pub mod mellin;
pub mod parallel;
pub mod quadrature;
pub mod series;
pub mod slater;
pub mod verify;

pub use binom::{binom_general, c_of_p, raney_general, Params};
pub use classify::{classify_binomial, classify_raney, Branch, RegionVerdict};
pub use closedform::{density_v, eval_closed, measure_model, ClosedFormId};
pub use error::{Error, Result};
pub use exact::{format_g17, ExactRational, Scalar};
pub use freeconv::MomentVector;
pub use gamma::gamma as gamma_real;
pub use mellin::{factorize, sample, MeasureModel, MellinFactorization};
pub use parallel::Execution;
pub use series::{Coeff, TruncatedSeries};
pub use slater::{build_slater, eval_v, SlaterExpansion};
pub use verify::{certify_measure, find_negativity_witness, Witness};
