//! Exponent estimation and the explicit Holder reparametrization.

mod fit;
mod holder;
mod summary;

pub use fit::{dyadic_scales, fit_exponent, fit_line, sample_counts, ExponentFit};
pub use holder::{reparametrize_holder, verify_modulus, ModulusReport, Parametrization};
pub use summary::{default_window, dimension_summary, DimensionSummary};
