//! Approximate-fixed-point production on the product space and the derived
//! residual chains.
//!
//! Two schemes drive `||J z - z||_{alpha,p}` toward zero:
//!
//! * Krasnoselskii-Mann averaging `z_{k+1} = (1 - lambda) z_k + lambda J z_k`,
//!   whose residual is nonincreasing when `J` is nonexpansive;
//! * an anchored Picard loop on `z -> (1 - eps) J z + eps * anchor`, a
//!   `(1 - eps)`-contraction whose limit has residual at most
//!   `eps * diam + inner_tol`.
//!
//! From a terminal product point the residual family recovers every chain
//! needed to transfer an approximate fixed point of `J` down to `tau_alpha`,
//! `T_alpha`, and `T` itself: the per-slot conditions
//! `||T^{k_j} xbar - x_j||`, the links `||T^{k_j - 1} x - x_j||`, and the
//! residuals of the three derived maps at the first slot.

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::mapping::{MappingHandle, MultiIndex, ProductMap};
use crate::space::{convex_combine, lp_dist, ProductPoint, SeqVec, SpaceError};

/// Hard cap on anchored Picard steps; exceeding it signals an expansive map.
pub const MAX_INNER_STEPS: usize = 10_000_000;

/// Residual increases beyond this slack are recorded as monotonicity
/// violations (they signal a non-nonexpansive map, not a fatal error).
pub const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AfpsError {
    #[error("non-finite residual at step {step}")]
    NonFinite { step: usize },
    #[error("lambda must lie strictly between 0 and 1, got {lambda}")]
    InvalidLambda { lambda: f64 },
    #[error("eps must lie strictly between 0 and 1, got {eps}")]
    InvalidEps { eps: f64 },
    #[error("inner tolerance must be positive, got {tol}")]
    InvalidInnerTol { tol: f64 },
    #[error("anchored iteration exceeded {limit} steps; the map looks expansive")]
    InnerIterationLimit { limit: usize },
    #[error("gjp chain check requires a length-2 multi-index, got {n}")]
    RequiresTwoWeights { n: usize },
    #[error(
        "gjp chain check needs alpha_2^p < alpha_1 strictly (got {lhs} vs {rhs}); \
             the bound degenerates at equality"
    )]
    GjpConditionNotStrict { lhs: f64, rhs: f64 },
    #[error("product point has {got} parts, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// One residual sample along an iteration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub residual: f64,
}

/// Full record of an afps run.
///
/// Wall-clock time stays in memory only; serialized outputs must be
/// byte-identical for identical configurations.
#[derive(Debug, Clone, Serialize)]
pub struct IterationTrace {
    pub scheme: String,
    /// `lambda` for Krasnoselskii-Mann, `eps` for the anchored scheme.
    pub param: f64,
    pub records: Vec<StepRecord>,
    pub final_point: ProductPoint,
    pub seed: u64,
    pub converged: bool,
    pub tol: f64,
    pub max_iter: usize,
    /// Steps whose residual exceeded the previous one by more than
    /// [`MONOTONE_SLACK`], with the observed increase.
    pub monotonicity_violations: Vec<(usize, f64)>,
    #[serde(skip)]
    pub wall: Duration,
}

impl IterationTrace {
    pub fn final_residual(&self) -> f64 {
        self.records.last().map(|r| r.residual).unwrap_or(f64::NAN)
    }

    pub fn steps(&self) -> usize {
        self.records.len().saturating_sub(1)
    }
}

/// Krasnoselskii-Mann iteration `z_{k+1} = (1 - lambda) z_k + lambda F z_k`
/// until the residual reaches `tol` or `max_iter` update steps have run.
///
/// Every iterate stays in `C^n` by convexity. Residual increases are
/// recorded, not fatal; non-finite values are fatal.
pub fn km_iterate(
    f: &ProductMap,
    z0: &ProductPoint,
    lambda: f64,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<IterationTrace, AfpsError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(AfpsError::InvalidLambda { lambda });
    }
    if z0.n() != f.n() {
        return Err(AfpsError::LengthMismatch {
            expected: f.n(),
            got: z0.n(),
        });
    }
    let start = Instant::now();
    let mut z = z0.clone();
    let mut records = Vec::new();
    let mut violations = Vec::new();
    let mut prev = f64::INFINITY;
    let mut converged = false;
    for step in 0..=max_iter {
        let fz = f.apply(&z);
        let residual = f.dist(&fz, &z);
        if !residual.is_finite() {
            return Err(AfpsError::NonFinite { step });
        }
        records.push(StepRecord { step, residual });
        if residual > prev + MONOTONE_SLACK {
            violations.push((step, residual - prev));
        }
        prev = residual;
        if residual <= tol {
            converged = true;
            break;
        }
        if step == max_iter {
            break;
        }
        let parts = z
            .parts()
            .iter()
            .zip(fz.parts())
            .map(|(zi, fi)| zi.scale(1.0 - lambda).add(&fi.scale(lambda)))
            .collect();
        z = ProductPoint::new(parts)?;
    }
    Ok(IterationTrace {
        scheme: "km".to_string(),
        param: lambda,
        records,
        final_point: z,
        seed,
        converged,
        tol,
        max_iter,
        monotonicity_violations: violations,
        wall: start.elapsed(),
    })
}

/// Outcome of the anchored contraction scheme.
#[derive(Debug, Clone, Serialize)]
pub struct AnchoredOutcome {
    pub point: ProductPoint,
    /// `||F z* - z*||_{alpha,p}` at the returned point.
    pub residual: f64,
    pub inner_steps: usize,
}

/// Picard iteration on the `(1 - eps)`-contraction
/// `z -> (1 - eps) F z + eps * anchor`, stopped when successive iterates
/// differ by less than `inner_tol`.
///
/// At the stop point, `||F z - z|| <= eps * diam(C^n) + inner_tol` whenever
/// `F` is nonexpansive.
pub fn anchored_afps(
    f: &ProductMap,
    anchor: &ProductPoint,
    eps: f64,
    inner_tol: f64,
) -> Result<AnchoredOutcome, AfpsError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(AfpsError::InvalidEps { eps });
    }
    if inner_tol.is_nan() || inner_tol <= 0.0 {
        return Err(AfpsError::InvalidInnerTol { tol: inner_tol });
    }
    if anchor.n() != f.n() {
        return Err(AfpsError::LengthMismatch {
            expected: f.n(),
            got: anchor.n(),
        });
    }
    let mut z = anchor.clone();
    for step in 1..=MAX_INNER_STEPS {
        let fz = f.apply(&z);
        let parts = fz
            .parts()
            .iter()
            .zip(anchor.parts())
            .map(|(fi, ai)| fi.scale(1.0 - eps).add(&ai.scale(eps)))
            .collect();
        let next = ProductPoint::new(parts)?;
        let diff = f.dist(&next, &z);
        if !diff.is_finite() {
            return Err(AfpsError::NonFinite { step });
        }
        z = next;
        if diff < inner_tol {
            let residual = f.residual(&z);
            return Ok(AnchoredOutcome {
                point: z,
                residual,
                inner_steps: step,
            });
        }
    }
    Err(AfpsError::InnerIterationLimit {
        limit: MAX_INNER_STEPS,
    })
}

/// The residual family extracted from one product point.
///
/// With `xbar = sum_j w_j x_j` and `x = x_1`:
///
/// * `conditions[j] = ||T^{k_j} xbar - x_j||` (the per-slot system),
/// * `chain[j-1]    = ||T^{k_j - 1} x - x_j||` for `j >= 2`,
/// * `r_tau         = ||tau_alpha x - x||`,
/// * `r_t_alpha     = ||T_alpha z - z||` at `z = sum_j w_j T^{k_j - 1} x`,
/// * `r_t           = ||T x - x||`.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub conditions: Vec<f64>,
    pub chain: Vec<f64>,
    pub r_tau: f64,
    pub r_t_alpha: f64,
    pub r_t: f64,
}

impl ResidualReport {
    /// Largest entry across the whole family.
    pub fn max_entry(&self) -> f64 {
        self.conditions
            .iter()
            .chain(&self.chain)
            .chain([&self.r_tau, &self.r_t_alpha])
            .fold(0.0f64, |m, &v| m.max(v))
    }
}

/// [`residual_family_with_exponents`] with the natural exponents `1..=n`.
pub fn residual_family(
    t: &MappingHandle,
    alpha: &MultiIndex,
    pp: &ProductPoint,
) -> Result<ResidualReport, AfpsError> {
    let exponents: Vec<usize> = (1..=alpha.n()).collect();
    residual_family_with_exponents(t, alpha, &exponents, pp)
}

/// Residual family for a (possibly collapsed) multi-index whose j-th slot
/// carries the power `T^{k_j}`.
pub fn residual_family_with_exponents(
    t: &MappingHandle,
    alpha: &MultiIndex,
    exponents: &[usize],
    pp: &ProductPoint,
) -> Result<ResidualReport, AfpsError> {
    let nu = alpha.n();
    if pp.n() != nu || exponents.len() != nu {
        return Err(AfpsError::LengthMismatch {
            expected: nu,
            got: pp.n(),
        });
    }
    let ambient = t.domain().p();
    let weights = alpha.weights();
    let k_max = *exponents.last().expect("multi-index is nonempty");

    // powers[m] = T^m applied to the seed, m = 0..=k_max.
    let powers = |seed: &SeqVec| -> Vec<SeqVec> {
        let mut out = Vec::with_capacity(k_max + 1);
        out.push(seed.clone());
        let mut cur = seed.clone();
        for _ in 0..k_max {
            cur = t.evaluate(&cur);
            out.push(cur.clone());
        }
        out
    };

    let xbar = convex_combine(weights, pp.parts())?;
    let pow_xbar = powers(&xbar);
    let conditions: Vec<f64> = exponents
        .iter()
        .zip(pp.parts())
        .map(|(&k, part)| lp_dist(&pow_xbar[k], part, ambient))
        .collect();

    let x = pp.part(0);
    let pow_x = powers(x);
    let chain: Vec<f64> = exponents
        .iter()
        .zip(pp.parts())
        .skip(1)
        .map(|(&k, part)| lp_dist(&pow_x[k - 1], part, ambient))
        .collect();

    // z = sum_j w_j T^(k_j - 1) x; tau_alpha x = T z.
    let inner_terms: Vec<SeqVec> = exponents.iter().map(|&k| pow_x[k - 1].clone()).collect();
    let z = convex_combine(weights, &inner_terms)?;
    let r_tau = lp_dist(&t.evaluate(&z), x, ambient);

    // T_alpha z = sum_j w_j T^(k_j) z.
    let pow_z = powers(&z);
    let t_alpha_terms: Vec<SeqVec> = exponents.iter().map(|&k| pow_z[k].clone()).collect();
    let t_alpha_z = convex_combine(weights, &t_alpha_terms)?;
    let r_t_alpha = lp_dist(&t_alpha_z, &z, ambient);

    let r_t = lp_dist(&pow_x[1], x, ambient);

    Ok(ResidualReport {
        conditions,
        chain,
        r_tau,
        r_t_alpha,
        r_t,
    })
}

/// The chain estimate `||Tx - x|| <= r_tau / (1 - a_2 a_1^(-1/p))`, valid
/// when `T` is actually `(alpha, p)`-nonexpansive (so that
/// `k(T) <= a_1^(-1/p)`).
#[derive(Debug, Clone, Serialize)]
pub struct GjpChainCheck {
    /// `1 - a_2 * a_1^(-1/p)`, the contraction constant of the chain.
    pub constant: f64,
    pub bound: f64,
    pub observed: f64,
    pub pass: bool,
}

/// Evaluates the chain bound at one point; refuses the non-strict case
/// `a_2^p >= a_1`, where the constant is zero or negative.
pub fn gjp_chain_check(
    t: &MappingHandle,
    alpha: &MultiIndex,
    x: &SeqVec,
    tau_residual: f64,
) -> Result<GjpChainCheck, AfpsError> {
    if alpha.n() != 2 {
        return Err(AfpsError::RequiresTwoWeights { n: alpha.n() });
    }
    let p = alpha.p().get();
    let a1 = alpha.weight(0);
    let a2 = alpha.weight(1);
    if a2.powf(p) >= a1 {
        return Err(AfpsError::GjpConditionNotStrict {
            lhs: a2.powf(p),
            rhs: a1,
        });
    }
    let constant = 1.0 - a2 * a1.powf(-1.0 / p);
    let bound = tau_residual / constant;
    let observed = lp_dist(&t.evaluate(x), x, t.domain().p());
    Ok(GjpChainCheck {
        constant,
        bound,
        observed,
        pass: observed <= bound * (1.0 + 1e-6),
    })
}
