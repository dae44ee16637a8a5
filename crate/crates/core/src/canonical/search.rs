use super::sequence::{sure_from_norms, BlockSequence, Side};
use crate::error::Result;
use crate::risk::{two_stage_search, SearchGrids, SearchOutcome};

/// Two-stage SURE selection of `(λ, ν, s)` for the identity design.
pub fn select_canonical_sure(data: &BlockSequence, grids: &SearchGrids) -> Result<SearchOutcome<()>> {
    let norms = data.norms();
    let q = data.q() as f64;
    let peak = norms.iter().cloned().fold(0.0, f64::max);
    two_stage_search(grids, |_| peak, |hp| Some((sure_from_norms(&norms, q, hp, Side::Left), ())))
}
