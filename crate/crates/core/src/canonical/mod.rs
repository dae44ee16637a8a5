//! Identity-design (block canonical) estimation: closed-form SURE, its total
//! variation, universal thresholds, the information criterion and oracle risk.

mod oracle;
mod search;
mod sequence;
mod sl2wic;
mod tv;
mod universal;

pub use oracle::{oracle_bound, oracle_bound_constant, oracle_risk};
pub use search::select_canonical_sure;
pub use sequence::{block_sure_term, denoise_canonical, sure_canonical, sure_canonical_side, BlockSequence, Side};
pub use sl2wic::{
    prior_scale_sq, select_sl2wic, sl2wic, sl2wic_profile, sl2wic_with, threshold_prior_density,
    threshold_prior_neg_log,
};
pub use tv::{block_total_variation_exact, blockwise_total_variation, sure_total_variation};
pub use universal::{
    gumbel_cdf, location_equation, robust_universal_threshold, universal_threshold, UniversalThreshold,
};
