//! meanfix: a numerical laboratory for mean nonexpansive mappings.
//!
//! The crate builds finite truncations of sequence-space points, the mapping
//! algebra around a self-map `T` of a ball (`T^k`, the averaged map
//! `T_alpha`, the reversed composition `tau_alpha`, the product lift, and
//! the diagonal composite `J`), iteration schemes that drive `||Jz - z||` to
//! zero, and sampled checks of the inequalities that make the whole
//! construction work.
//!
//! Modules mirror the pipeline: [`space`] for points and norms, [`mapping`]
//! for the derived maps, [`examples`] for the concrete mappings under study,
//! [`afps`] for iteration schemes and residual chains, [`verify`] for
//! sampled inequality checks and threshold conditions, and [`driver`] +
//! [`report`] for the CLI commands and their serialization.

pub mod afps;
pub mod driver;
pub mod examples;
pub mod mapping;
pub mod report;
pub mod sampler;
pub mod space;
pub mod verify;

pub use afps::{
    anchored_afps, gjp_chain_check, km_iterate, residual_family, residual_family_with_exponents,
    AfpsError, AnchoredOutcome, GjpChainCheck, IterationTrace, ResidualReport, StepRecord,
};
pub use examples::{
    baseline_map, discontinuous_f, example1_handle, example1_t, example2_handle, example2_s,
    registry_get, sigma_breakpoint, sigma_scalar, tau_scalar, BaselineKind, ExampleError,
    REGISTRY_IDS,
};
pub use mapping::{
    collapse_zero_weights, estimate_lipschitz, iterate, j_map, j_map_with_exponents, t_alpha,
    tau_alpha, tilde_t, tilde_t_with_exponents, LipschitzEstimate, MappingError, MappingHandle,
    MultiIndex, ProductMap,
};
pub use sampler::PairSampler;
pub use space::{
    convex_combine, in_ball, lp_dist, lp_norm, product_norm_raw, BallDomain, PExponent,
    ProductPoint, SeqVec, SpaceError, EXACT_TOL, SAMPLED_SLACK,
};
pub use verify::{
    check_mean_nonexpansive, cond_gjp2, cond_gjp_general, cond_gjp_n3_improved, cond_n3,
    cond_n3_dual_form, cond_remark_general, find_expansion_witness, mean_slack, simplex_grid,
    ConditionResult, MeanCheckReport, VerifyError, WitnessReport,
};

/// `||(x_1..x_n)||_{alpha,p}` with the ambient exponent supplied by the
/// caller (ball domains carry it; product points do not).
pub fn product_norm(
    pp: &ProductPoint,
    ambient: PExponent,
    alpha: &MultiIndex,
) -> Result<f64, SpaceError> {
    product_norm_raw(pp, ambient, alpha.weights(), alpha.p())
}
