//! Young-function machinery: φ, Φ, Φ*, indices and Luxemburg norms.

mod checks;
mod phi;
mod young;

pub use checks::{
    conjugate_by_sup, convexity_gap, delta2_ratio, luxemburg_modular, luxemburg_norm, sqrt_convexity_check,
    sqrt_convexity_slack, young_gap,
};
pub use phi::PhiSpec;
pub(crate) use young::golden_section_max;
pub use young::{
    BigPhiStrategy, IndexEstimate, IndexWindow, YoungPair, DEFAULT_INDEX_SAMPLES, QUADRATURE_BUDGET, QUADRATURE_TOL,
};
