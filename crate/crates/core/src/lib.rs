//! Shift and dispersion decompositions of one-dimensional divergences.
//!
//! Covers the area validation metric (AVM), the p-th power of the
//! p-Wasserstein distance (WD_p) and the Cramér distance (CD). Each is split
//! into four non-negative parts: upward shift, downward shift, increased
//! dispersion and decreased dispersion.

pub mod closed_forms;
pub mod decomp;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod orders;
pub mod quantile;
pub mod random;
pub mod selftest;
pub mod special;
pub mod suites;

pub use decomp::{
    avm, avm_alpha_components, avm_decompose, cd_decompose, cd_quantile_rep, cd_via_cdf, decompose, spread_plot_data,
    wd_decompose, wd_p, AlphaComponents, Decomposition, DivergenceKind, QuadratureConfig, SpreadPlotData,
};
pub use error::{Error, Result};
pub use quantile::{CentralInterval, Distribution, Interpolation, Knots};
