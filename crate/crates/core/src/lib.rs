//! Statistical inference on persistent homology.
//!
//! The crate covers the whole pipeline from raw data to hypothesis tests:
//!
//! - [`morse1d`]: sublevel-set persistence of smoothed 1D signals.
//! - [`complex`]: Rips skeletons, boundary matrices, Hodge Laplacians and
//!   exact Betti numbers.
//! - [`graphfilt`]: graph filtrations, monotone Betti curves and the
//!   birth-death decomposition of edge weights.
//! - [`wasserstein`]: closed-form Wasserstein distances between graph
//!   persistence diagrams, with an assignment-based reference solver.
//! - [`inference`]: ratio statistic with permutation and transposition tests.
//! - [`clustering`]: Wasserstein k-means, accuracy scoring and the circle
//!   simulations used to benchmark it.
//!
//! Batch operations take an [`Execution`] policy. The `parallel` feature
//! (on by default) runs them on rayon; without it they run sequentially with
//! identical results.

pub mod assignment;
pub mod clustering;
pub mod complex;
pub mod error;
pub mod graphfilt;
pub mod inference;
pub mod io;
pub mod matrix;
pub mod morse1d;
pub mod par;
pub mod unionfind;
pub mod wasserstein;

pub use error::{Error, Result};
pub use matrix::SymmetricMatrix;
pub use par::Execution;
