//! Sampled verification of the defining inequalities, expansion-witness
//! search, and the closed-form threshold conditions.
//!
//! Sampling can refute an inequality but never prove it; every sampled
//! verdict is "violated" or "no violation found", never "holds".

use serde::Serialize;
use thiserror::Error;

use crate::mapping::{MappingHandle, MultiIndex, COINCIDENCE_TOL};
use crate::sampler::PairSampler;
use crate::space::{lp_dist, lp_norm, BallDomain, SeqVec, EXACT_TOL, SAMPLED_SLACK};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("condition {id} requires a multi-index of length {expected}, got {got}")]
    WrongLength {
        id: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("condition {id} requires p = 1, got {p}")]
    RequiresPOne { id: &'static str, p: f64 },
    #[error("k_ests[0] stands for k(T^0) = k(I) and must be 1, got {got}")]
    BadIdentityEstimate { got: f64 },
    #[error("need {expected} Lipschitz estimates k(T^0)..k(T^(n-2)), got {got}")]
    WrongEstimateCount { expected: usize, got: usize },
}

/// Verdict of one closed-form threshold condition, stated as
/// `lhs <= rhs + 1e-12`.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionResult {
    pub id: &'static str,
    pub alpha: Vec<f64>,
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_ests: Option<Vec<f64>>,
    pub verdict: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl ConditionResult {
    fn new(id: &'static str, alpha: &MultiIndex, lhs: f64, rhs: f64) -> Self {
        Self {
            id,
            alpha: alpha.weights().to_vec(),
            p: alpha.p().get(),
            k_ests: None,
            verdict: lhs <= rhs + EXACT_TOL,
            lhs,
            rhs,
        }
    }
}

/// A pair violating an inequality, with the observed ratio.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub x: SeqVec,
    pub y: SeqVec,
    pub ratio: f64,
    pub inequality: ViolatedInequality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolatedInequality {
    /// `||Tx - Ty|| > ||x - y||`.
    PlainNonexpansive,
    /// `sum_k a_k ||T^k x - T^k y||^p > ||x - y||^p`.
    MeanNonexpansive,
}

/// One sampled violation of the mean inequality.
#[derive(Debug, Clone, Serialize)]
pub struct MeanViolation {
    pub x: SeqVec,
    pub y: SeqVec,
    pub slack: f64,
}

/// Outcome of sampling the mean-nonexpansiveness inequality.
#[derive(Debug, Clone, Serialize)]
pub struct MeanCheckReport {
    /// Largest observed `sum_k a_k ||T^k x - T^k y||^p - ||x - y||^p`.
    pub max_slack: f64,
    pub violations: Vec<MeanViolation>,
    pub trials: usize,
    pub seed: u64,
}

impl MeanCheckReport {
    pub fn no_violation_found(&self) -> bool {
        self.violations.is_empty()
    }
}

fn pow_p(v: f64, p: f64) -> f64 {
    if p == 1.0 {
        v
    } else if p == 2.0 {
        v * v
    } else {
        v.powf(p)
    }
}

/// `sum_k a_k ||T^k x - T^k y||^p - ||x - y||^p` for one pair; positive
/// values violate the defining inequality.
pub fn mean_slack(t: &MappingHandle, alpha: &MultiIndex, x: &SeqVec, y: &SeqVec) -> f64 {
    let ambient = t.domain().p();
    let p = alpha.p().get();
    let mut sum = 0.0;
    let mut cx = x.clone();
    let mut cy = y.clone();
    for &w in alpha.weights() {
        cx = t.evaluate(&cx);
        cy = t.evaluate(&cy);
        sum += w * pow_p(lp_dist(&cx, &cy, ambient), p);
    }
    sum - pow_p(lp_dist(x, y, ambient), p)
}

/// Samples the mean inequality over seeded pairs; pairs with slack above
/// 1e-9 are recorded as violations.
pub fn check_mean_nonexpansive(
    t: &MappingHandle,
    alpha: &MultiIndex,
    trials: usize,
    seed: u64,
) -> MeanCheckReport {
    let mut sampler = PairSampler::new(t.domain().clone(), seed);
    let mut max_slack = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for _ in 0..trials {
        let (x, y) = sampler.pair();
        let slack = mean_slack(t, alpha, &x, &y);
        if slack > max_slack {
            max_slack = slack;
        }
        if slack > SAMPLED_SLACK {
            violations.push(MeanViolation { x, y, slack });
        }
    }
    MeanCheckReport {
        max_slack,
        violations,
        trials,
        seed,
    }
}

fn expansion_ratio(t: &MappingHandle, x: &SeqVec, y: &SeqVec) -> Option<f64> {
    let p = t.domain().p();
    let denom = lp_dist(x, y, p);
    if denom <= COINCIDENCE_TOL {
        return None;
    }
    Some(lp_dist(&t.evaluate(x), &t.evaluate(y), p) / denom)
}

fn project_into_ball(v: SeqVec, dom: &BallDomain) -> SeqVec {
    let rel = v.sub(dom.center());
    let n = lp_norm(&rel, dom.p());
    if n <= dom.radius() {
        v
    } else {
        dom.center().add(&rel.scale(dom.radius() / n))
    }
}

/// Random search plus coordinatewise hill climbing for a pair with
/// `||Tx - Ty|| > ||x - y||`. Returns the best pair found, or `None` when no
/// ratio exceeds 1.
///
/// The refinement perturbs one coordinate of one endpoint at a time, with
/// geometrically shrinking step sizes; pure random search misses the
/// measure-zero worst pairs of the piecewise-linear examples.
pub fn find_expansion_witness(
    t: &MappingHandle,
    trials: usize,
    refine_steps: usize,
    seed: u64,
) -> Option<WitnessReport> {
    let dom = t.domain().clone();
    let mut sampler = PairSampler::new(dom.clone(), seed);
    let mut best: Option<(f64, SeqVec, SeqVec)> = None;
    for _ in 0..trials {
        let (x, y) = sampler.pair();
        if let Some(r) = expansion_ratio(t, &x, &y) {
            if best.as_ref().map(|(b, _, _)| r > *b).unwrap_or(true) {
                best = Some((r, x, y));
            }
        }
    }
    let (mut ratio, mut x, mut y) = best?;

    if refine_steps > 0 {
        let h0 = 0.25 * dom.radius();
        let shrink = (1e-6f64 / 0.25).powf(1.0 / refine_steps as f64);
        let mut h = h0;
        for _ in 0..refine_steps {
            let mut improved: Option<(f64, SeqVec, SeqVec)> = None;
            for point_idx in 0..2 {
                let base = if point_idx == 0 { &x } else { &y };
                for coord in 0..dom.dim() {
                    for sign in [1.0, -1.0] {
                        let mut coords = base.coords().to_vec();
                        coords[coord] += sign * h;
                        let Ok(cand) = SeqVec::new(coords) else {
                            continue;
                        };
                        let cand = project_into_ball(cand, &dom);
                        let (cx, cy) = if point_idx == 0 {
                            (&cand, &y)
                        } else {
                            (&x, &cand)
                        };
                        if let Some(r) = expansion_ratio(t, cx, cy) {
                            let current_best =
                                improved.as_ref().map(|(b, _, _)| *b).unwrap_or(ratio);
                            if r > current_best {
                                improved = Some((r, cx.clone(), cy.clone()));
                            }
                        }
                    }
                }
            }
            if let Some((r, nx, ny)) = improved {
                ratio = r;
                x = nx;
                y = ny;
            }
            h *= shrink;
        }
    }

    if ratio > 1.0 + EXACT_TOL {
        Some(WitnessReport {
            x,
            y,
            ratio,
            inequality: ViolatedInequality::PlainNonexpansive,
        })
    } else {
        None
    }
}

/// `alpha_2^p <= alpha_1` (for p = 1 this reads `alpha_1 >= 1/2`).
pub fn cond_gjp2(alpha: &MultiIndex) -> Result<ConditionResult, VerifyError> {
    if alpha.n() != 2 {
        return Err(VerifyError::WrongLength {
            id: "gjp2",
            expected: 2,
            got: alpha.n(),
        });
    }
    let p = alpha.p().get();
    let lhs = pow_p(alpha.weight(1), p);
    Ok(ConditionResult::new("gjp2", alpha, lhs, alpha.weight(0)))
}

fn require_n3_p1(id: &'static str, alpha: &MultiIndex) -> Result<(), VerifyError> {
    if alpha.n() != 3 {
        return Err(VerifyError::WrongLength {
            id,
            expected: 3,
            got: alpha.n(),
        });
    }
    if alpha.p().get() != 1.0 {
        return Err(VerifyError::RequiresPOne {
            id,
            p: alpha.p().get(),
        });
    }
    Ok(())
}

/// The length-3 afps condition `1 - 2 alpha_1^2 <= alpha_2` (p = 1). The two
/// algebraic forms of the condition are cross-checked internally.
pub fn cond_n3(alpha: &MultiIndex) -> Result<ConditionResult, VerifyError> {
    require_n3_p1("n3", alpha)?;
    let primary = cond_n3_primary(alpha);
    let dual = cond_n3_dual_form(alpha)?;
    debug_assert_eq!(
        primary.verdict,
        dual.verdict,
        "the two algebraic forms disagree at alpha = {:?}",
        alpha.weights()
    );
    Ok(primary)
}

fn cond_n3_primary(alpha: &MultiIndex) -> ConditionResult {
    let a1 = alpha.weight(0);
    ConditionResult::new("n3", alpha, 1.0 - 2.0 * a1 * a1, alpha.weight(1))
}

/// The equivalent form `alpha_1^2 - alpha_1 (alpha_2 + alpha_3) - alpha_3 >= 0`,
/// reported as `-expr <= 0`.
pub fn cond_n3_dual_form(alpha: &MultiIndex) -> Result<ConditionResult, VerifyError> {
    require_n3_p1("n3-dual", alpha)?;
    let (a1, a2, a3) = (alpha.weight(0), alpha.weight(1), alpha.weight(2));
    let expr = a1 * a1 - a1 * (a2 + a3) - a3;
    Ok(ConditionResult::new("n3-dual", alpha, -expr, 0.0))
}

/// The sharper length-3 window `alpha_1 in [1/2, sqrt(2)/2)` and
/// `alpha_2 >= (1 - alpha_1)/2` (p = 1).
///
/// Reported as `max(1/2 - a_1, a_1 - sqrt(2)/2, (1-a_1)/2 - a_2) <= 0`; the
/// half-open right end is closed up to the 1e-12 tolerance.
pub fn cond_gjp_n3_improved(alpha: &MultiIndex) -> Result<ConditionResult, VerifyError> {
    require_n3_p1("gjp-n3-improved", alpha)?;
    let a1 = alpha.weight(0);
    let a2 = alpha.weight(1);
    let lhs = (0.5 - a1)
        .max(a1 - 2f64.sqrt() / 2.0)
        .max(0.5 * (1.0 - a1) - a2);
    Ok(ConditionResult::new("gjp-n3-improved", alpha, lhs, 0.0))
}

/// The general-length condition
/// `(1 - a_1)(1 - a_1^((n-1)/p)) <= a_1^((n-1)/p) (1 - a_1^(1/p))`,
/// which depends only on `alpha_1`, `n`, and `p`.
pub fn cond_gjp_general(alpha: &MultiIndex) -> ConditionResult {
    let a1 = alpha.weight(0);
    let n = alpha.n() as f64;
    let p = alpha.p().get();
    let a_pow = a1.powf((n - 1.0) / p);
    let lhs = (1.0 - a1) * (1.0 - a_pow);
    let rhs = a_pow * (1.0 - a1.powf(1.0 / p));
    ConditionResult::new("gjp-general", alpha, lhs, rhs)
}

/// The general remark condition
/// `k(T) * sum_{m=2}^n (sum_{j=m}^n a_j) k(T^(m-2)) <= 1`, evaluated with
/// supplied Lipschitz estimates `k_ests[j] ~ k(T^j)` for
/// `j = 0..=max(1, n-2)` (so `k_ests[1]` is the leading `k(T)` even when
/// `n = 2`).
///
/// Sampled estimates are lower bounds, so a `true` verdict is
/// necessary-condition flavored; the report carries the estimates used.
pub fn cond_remark_general(
    alpha: &MultiIndex,
    k_ests: &[f64],
) -> Result<ConditionResult, VerifyError> {
    let n = alpha.n();
    let expected = (n - 1).max(2);
    if k_ests.len() != expected {
        return Err(VerifyError::WrongEstimateCount {
            expected,
            got: k_ests.len(),
        });
    }
    if (k_ests[0] - 1.0).abs() > EXACT_TOL {
        return Err(VerifyError::BadIdentityEstimate { got: k_ests[0] });
    }
    let k_t = k_ests[1];
    let weights = alpha.weights();
    let mut sum = 0.0;
    for m in 2..=n {
        let tail: f64 = weights[m - 1..].iter().sum();
        sum += tail * k_ests[m - 2];
    }
    let mut result = ConditionResult::new("remark-general", alpha, k_t * sum, 1.0);
    result.k_ests = Some(k_ests.to_vec());
    Ok(result)
}

/// Weight grids over the simplex with the given step; boundary weights of
/// the first and last slot stay at least one step away from zero.
pub fn simplex_grid(n: usize, step: f64) -> Vec<Vec<f64>> {
    assert!(n == 2 || n == 3, "grids are generated for n = 2 or 3");
    let m = (1.0 / step).round() as i64;
    let mut out = Vec::new();
    match n {
        2 => {
            for i in 1..m {
                let a1 = i as f64 * step;
                out.push(vec![a1, 1.0 - a1]);
            }
        }
        _ => {
            for i in 1..m {
                for j in 0..=(m - i - 1) {
                    let a1 = i as f64 * step;
                    let a2 = j as f64 * step;
                    let a3 = 1.0 - a1 - a2;
                    if a3 >= step - 1e-9 {
                        out.push(vec![a1, a2, a3]);
                    }
                }
            }
        }
    }
    out
}
