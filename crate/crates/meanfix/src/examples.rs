//! The concrete mappings under study: the scalar pieces `tau`, `sigma`, the
//! two-case function `f`, the shift-style maps `T` on the unit l1 ball and
//! `S` on the unit l2 ball, plus nonexpansive control maps and a string
//! registry for the CLI.
//!
//! Both `T` and `S` read coordinates 2 and up and shift everything left;
//! a vector supported in the first `d` coordinates maps to one supported in
//! the first `d - 1`, so a fixed truncation dimension is exact.

use thiserror::Error;

use crate::mapping::MappingHandle;
use crate::space::{in_ball, BallDomain, PExponent, SeqVec, SpaceError, SAMPLED_SLACK};

#[derive(Debug, Error, PartialEq)]
pub enum ExampleError {
    #[error("scalar input {t} lies outside [-1, 1]")]
    OutsideInterval { t: f64 },
    #[error("scalar input {x} lies outside [0, 1]")]
    OutsideUnitInterval { x: f64 },
    #[error("point lies outside the map's domain (norm {norm}, radius {radius})")]
    OutsideDomain { norm: f64, radius: f64 },
    #[error("unknown example id {0:?}")]
    UnknownExample(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Interval inputs within this slack of the endpoint are accepted; iterated
/// maps can land a rounding error outside a closed domain.
const DOMAIN_SLACK: f64 = SAMPLED_SLACK;

/// The piecewise-linear odd function behind the l1 example:
/// `2t+1` on `[-1,-1/2]`, `0` on `[-1/2,1/2]`, `2t-1` on `[1/2,1]`.
///
/// The middle branch is evaluated on the closed interval; the formulas agree
/// at the breakpoints, so the choice is value-neutral.
pub fn tau_scalar(t: f64) -> Result<f64, ExampleError> {
    if !(t.is_finite() && t.abs() <= 1.0 + DOMAIN_SLACK) {
        return Err(ExampleError::OutsideInterval { t });
    }
    Ok(if t.abs() <= 0.5 {
        0.0
    } else if t > 0.5 {
        2.0 * t - 1.0
    } else {
        2.0 * t + 1.0
    })
}

/// Breakpoint `t0 = (sqrt(2) - 1) / sqrt(2)` of `sigma`.
pub fn sigma_breakpoint() -> f64 {
    (2f64.sqrt() - 1.0) / 2f64.sqrt()
}

/// The steeper piecewise-linear odd function behind the l2 example:
/// `sqrt(2) t + (sqrt(2)-1)` on `[-1,-t0]`, `0` on `[-t0,t0]`,
/// `sqrt(2) t - (sqrt(2)-1)` on `[t0,1]`.
pub fn sigma_scalar(t: f64) -> Result<f64, ExampleError> {
    if !(t.is_finite() && t.abs() <= 1.0 + DOMAIN_SLACK) {
        return Err(ExampleError::OutsideInterval { t });
    }
    let t0 = sigma_breakpoint();
    let r = 2f64.sqrt();
    Ok(if t.abs() <= t0 {
        0.0
    } else if t > t0 {
        r * t - (r - 1.0)
    } else {
        r * t + (r - 1.0)
    })
}

/// The l1 example map `T(x_1, x_2, x_3, ...) = (tau(x_2), (2/3) x_3, x_4, ...)`
/// on the unit ball of l1.
pub fn example1_t(x: &SeqVec) -> Result<SeqVec, ExampleError> {
    let dom = BallDomain::unit(x.dim(), PExponent::ONE);
    check_domain(x, &dom)?;
    let d = x.dim();
    let mut coords = Vec::with_capacity(d);
    coords.push(tau_scalar(x.coord(1))?);
    if d >= 2 {
        coords.push(2.0 / 3.0 * x.coord(2));
    }
    for j in 2..d {
        coords.push(x.coord(j + 1));
    }
    Ok(SeqVec::new(coords)?)
}

/// The l2 example map `S(x_1, x_2, x_3, ...) = (sigma(x_2), sqrt(2/3) x_3, x_4, ...)`
/// on the unit ball of l2.
pub fn example2_s(x: &SeqVec) -> Result<SeqVec, ExampleError> {
    let dom = BallDomain::unit(x.dim(), PExponent::TWO);
    check_domain(x, &dom)?;
    let d = x.dim();
    let mut coords = Vec::with_capacity(d);
    coords.push(sigma_scalar(x.coord(1))?);
    if d >= 2 {
        coords.push((2f64 / 3.0).sqrt() * x.coord(2));
    }
    for j in 2..d {
        coords.push(x.coord(j + 1));
    }
    Ok(SeqVec::new(coords)?)
}

/// The discontinuous two-case function on `[0,1]`: 1 at exactly 0, else 0.
pub fn discontinuous_f(x: f64) -> Result<f64, ExampleError> {
    if !(x.is_finite() && (-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&x)) {
        return Err(ExampleError::OutsideUnitInterval { x });
    }
    Ok(if x == 0.0 { 1.0 } else { 0.0 })
}

fn check_domain(x: &SeqVec, dom: &BallDomain) -> Result<(), ExampleError> {
    if in_ball(x, dom, DOMAIN_SLACK) {
        Ok(())
    } else {
        Err(ExampleError::OutsideDomain {
            norm: crate::space::lp_dist(x, dom.center(), dom.p()),
            radius: dom.radius(),
        })
    }
}

/// Handle for the l1 example map on the unit ball of dimension `dim`.
pub fn example1_handle(dim: usize) -> MappingHandle {
    let dom = BallDomain::unit(dim, PExponent::ONE);
    MappingHandle::new(dom, "ex1-l1", |v| {
        example1_t(v).expect("input escaped the unit l1 ball")
    })
}

/// Handle for the l2 example map on the unit ball of dimension `dim`.
pub fn example2_handle(dim: usize) -> MappingHandle {
    let dom = BallDomain::unit(dim, PExponent::TWO);
    MappingHandle::new(dom, "ex2-l2", |v| {
        example2_s(v).expect("input escaped the unit l2 ball")
    })
}

/// Handle for the two-case function, with `[0,1]` encoded as the radius-1/2
/// ball around 1/2 in dimension 1.
pub fn discontinuous_f_handle() -> MappingHandle {
    let center = SeqVec::new(vec![0.5]).expect("finite center");
    let dom = BallDomain::new(1, PExponent::ONE, 0.5, center).expect("valid interval domain");
    MappingHandle::new(dom, "disc-f", |v| {
        let y = discontinuous_f(v.coord(0)).expect("input escaped [0, 1]");
        SeqVec::new(vec![y]).expect("finite output")
    })
}

/// Genuinely nonexpansive control maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    /// `x -> center + (x - center)/2 + c` with a small fixed offset `c`;
    /// a 1/2-contraction with fixed point `center + 2c`.
    AffineContraction,
    /// The average of the identity and the left coordinate shift.
    CoordinateShiftAverage,
    Identity,
}

/// Offset used by [`BaselineKind::AffineContraction`]: `radius/8` along the
/// first coordinate, small enough to keep the ball invariant.
pub fn affine_offset(dom: &BallDomain) -> SeqVec {
    SeqVec::basis(dom.dim(), 0).scale(dom.radius() / 8.0)
}

/// Builds a nonexpansive self-map of the requested ball.
pub fn baseline_map(kind: BaselineKind, dom: &BallDomain) -> MappingHandle {
    match kind {
        BaselineKind::Identity => {
            MappingHandle::new(dom.clone(), "identity", |v: &SeqVec| v.clone())
        }
        BaselineKind::AffineContraction => affine_contraction(dom, affine_offset(dom)),
        BaselineKind::CoordinateShiftAverage => {
            let center = dom.center().clone();
            MappingHandle::new(dom.clone(), "shift-avg", move |v: &SeqVec| {
                let rel = v.sub(&center);
                let d = rel.dim();
                let shifted =
                    SeqVec::new((0..d).map(|j| rel.coord(j + 1)).collect()).expect("finite shift");
                center.add(&rel.add(&shifted).scale(0.5))
            })
        }
    }
}

/// Affine 1/2-contraction with an explicit offset; requires
/// `||c|| <= radius/2` so the ball stays invariant.
pub fn affine_contraction(dom: &BallDomain, c: SeqVec) -> MappingHandle {
    assert_eq!(c.dim(), dom.dim(), "offset dimension mismatch");
    assert!(
        crate::space::lp_norm(&c, dom.p()) <= dom.radius() / 2.0 + 1e-12,
        "offset too large for the ball"
    );
    let center = dom.center().clone();
    MappingHandle::new(dom.clone(), "affine", move |v: &SeqVec| {
        center.add(&v.sub(&center).scale(0.5)).add(&c)
    })
}

/// Ids exposed by the example registry.
pub const REGISTRY_IDS: [&str; 5] = ["ex1-l1", "ex2-l2", "disc-f", "affine", "identity"];

/// Looks up a map by id. `dim` sizes the truncation; `p` picks the ball for
/// the baseline maps (the named examples carry their own canonical domain,
/// and `disc-f` always lives on `[0,1]` in dimension 1).
pub fn registry_get(id: &str, dim: usize, p: PExponent) -> Result<MappingHandle, ExampleError> {
    match id {
        "ex1-l1" => Ok(example1_handle(dim)),
        "ex2-l2" => Ok(example2_handle(dim)),
        "disc-f" => Ok(discontinuous_f_handle()),
        "affine" => Ok(baseline_map(
            BaselineKind::AffineContraction,
            &BallDomain::unit(dim, p),
        )),
        "identity" => Ok(baseline_map(
            BaselineKind::Identity,
            &BallDomain::unit(dim, p),
        )),
        other => Err(ExampleError::UnknownExample(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::{estimate_lipschitz, iterate, t_alpha, tau_alpha, MultiIndex};
    use crate::sampler::PairSampler;
    use crate::space::{lp_dist, lp_norm, EXACT_TOL};

    #[test]
    fn tau_scalar_paper_values() {
        assert_eq!(tau_scalar(1.0 / 3.0).unwrap(), 0.0);
        assert!((tau_scalar(2.0 / 3.0).unwrap() - 1.0 / 3.0).abs() <= EXACT_TOL);
        assert_eq!(tau_scalar(-1.0).unwrap(), -1.0);
        assert!(tau_scalar(1.5).is_err());
    }

    #[test]
    fn sigma_scalar_values() {
        assert!((sigma_scalar(1.0).unwrap() - 1.0).abs() <= EXACT_TOL);
        assert_eq!(sigma_scalar(sigma_breakpoint()).unwrap(), 0.0);
        let expected = 2f64.sqrt() * 0.9 - (2f64.sqrt() - 1.0);
        assert!((sigma_scalar(0.9).unwrap() - expected).abs() <= EXACT_TOL);
        assert!(sigma_scalar(-1.2).is_err());
    }

    #[test]
    fn piecewise_branches_agree_at_breakpoints() {
        // Outer-branch formulas evaluated at the breakpoints match the zero
        // middle branch, so closed-interval evaluation is value-neutral.
        for bp in [0.5, -0.5] {
            let outer = if bp > 0.0 {
                2.0 * bp - 1.0
            } else {
                2.0 * bp + 1.0
            };
            assert!((outer - tau_scalar(bp).unwrap()).abs() <= EXACT_TOL);
        }
        let t0 = sigma_breakpoint();
        let r = 2f64.sqrt();
        for bp in [t0, -t0] {
            let outer = if bp > 0.0 {
                r * bp - (r - 1.0)
            } else {
                r * bp + (r - 1.0)
            };
            assert!((outer - sigma_scalar(bp).unwrap()).abs() <= EXACT_TOL);
        }
    }

    #[test]
    fn scalar_pieces_are_odd_and_dominated() {
        for i in 0..=2000 {
            let t = -1.0 + i as f64 * 0.001;
            let tau = tau_scalar(t).unwrap();
            assert!((tau + tau_scalar(-t).unwrap()).abs() <= EXACT_TOL);
            assert!(tau.abs() <= t.abs() + EXACT_TOL);
            let sig = sigma_scalar(t).unwrap();
            assert!((sig + sigma_scalar(-t).unwrap()).abs() <= EXACT_TOL);
            assert!(sig.abs() <= 1.0 + EXACT_TOL);
        }
    }

    #[test]
    fn scalar_pieces_lipschitz_on_grid() {
        // tau is 2-Lipschitz, sigma is sqrt(2)-Lipschitz.
        let mut prev_tau = tau_scalar(-1.0).unwrap();
        let mut prev_sig = sigma_scalar(-1.0).unwrap();
        let mut prev_t = -1.0;
        for i in 1..=4000 {
            let t = -1.0 + i as f64 * 0.0005;
            let tau = tau_scalar(t).unwrap();
            let sig = sigma_scalar(t).unwrap();
            let dt = t - prev_t;
            assert!((tau - prev_tau).abs() <= 2.0 * dt + EXACT_TOL);
            assert!((sig - prev_sig).abs() <= 2f64.sqrt() * dt + EXACT_TOL);
            prev_tau = tau;
            prev_sig = sig;
            prev_t = t;
        }
    }

    #[test]
    fn example1_at_e3_and_zero() {
        let e3 = SeqVec::basis(8, 2);
        let out = example1_t(&e3).unwrap();
        assert_eq!(out.coord(0), 0.0);
        assert!((out.coord(1) - 2.0 / 3.0).abs() <= EXACT_TOL);
        assert!(out.coords()[2..].iter().all(|&c| c == 0.0));
        assert!(example1_t(&SeqVec::zeros(8)).unwrap().is_zero());
        assert!(in_ball(&out, &BallDomain::unit(8, PExponent::ONE), 0.0));
    }

    #[test]
    fn example1_expansion_pair() {
        let x = SeqVec::basis(6, 1);
        let y = SeqVec::basis(6, 1).scale(0.5);
        let tx = example1_t(&x).unwrap();
        let ty = example1_t(&y).unwrap();
        assert_eq!(tx.coord(0), 1.0);
        assert!(ty.is_zero());
        let ratio = lp_dist(&tx, &ty, PExponent::ONE) / lp_dist(&x, &y, PExponent::ONE);
        assert!((ratio - 2.0).abs() <= EXACT_TOL);
    }

    #[test]
    fn example1_rejects_outside_ball() {
        let v = SeqVec::new(vec![1.02, 0.0, 0.0]).unwrap();
        assert!(matches!(
            example1_t(&v),
            Err(ExampleError::OutsideDomain { .. })
        ));
    }

    #[test]
    fn example2_values_and_witness() {
        assert!(example2_s(&SeqVec::zeros(8)).unwrap().is_zero());
        let e3 = SeqVec::basis(8, 2);
        let out = example2_s(&e3).unwrap();
        assert!((out.coord(1) - (2f64 / 3.0).sqrt()).abs() <= EXACT_TOL);

        let t0 = sigma_breakpoint();
        let x = SeqVec::basis(8, 1);
        let y = SeqVec::basis(8, 1).scale(t0);
        let num = lp_dist(
            &example2_s(&x).unwrap(),
            &example2_s(&y).unwrap(),
            PExponent::TWO,
        );
        let den = lp_dist(&x, &y, PExponent::TWO);
        assert!((num - 1.0).abs() <= EXACT_TOL);
        assert!((den - 1.0 / 2f64.sqrt()).abs() <= EXACT_TOL);
        assert!(num > den);
    }

    #[test]
    fn discontinuous_f_values() {
        assert_eq!(discontinuous_f(0.0).unwrap(), 1.0);
        assert_eq!(discontinuous_f(0.5).unwrap(), 0.0);
        assert_eq!(discontinuous_f(1.0).unwrap(), 0.0);
        assert!(discontinuous_f(1.5).is_err());
        assert!(discontinuous_f(-0.5).is_err());
    }

    #[test]
    fn discontinuous_composite_vanishes_on_grid() {
        // f(a1 x + a2 f(x)) = 0 for every x in [0,1]; exact on a grid that
        // contains 0 itself.
        for (a1, a2) in [(0.5, 0.5), (0.3, 0.7), (0.9, 0.1)] {
            for k in 0..=10_000u64 {
                let x = k as f64 / 10_000.0;
                let inner = a1 * x + a2 * discontinuous_f(x).unwrap();
                assert_eq!(discontinuous_f(inner).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn truncation_is_exact_for_shift_maps() {
        // Embed a short vector in a longer truncation; the images agree on
        // the common coordinates and vanish beyond them.
        let short = SeqVec::new(vec![0.1, -0.2, 0.3, 0.05, -0.15, 0.0, 0.0, 0.0]).unwrap();
        let mut long_coords = short.coords().to_vec();
        long_coords.extend([0.0; 5]);
        let long = SeqVec::new(long_coords).unwrap();
        let out_short = example1_t(&short).unwrap();
        let out_long = example1_t(&long).unwrap();
        for j in 0..short.dim() {
            assert_eq!(out_short.coord(j), out_long.coord(j));
        }
        assert!(out_long.coords()[short.dim()..].iter().all(|&c| c == 0.0));
        // Same for S, in l2.
        let n = lp_norm(&short, PExponent::TWO);
        let short2 = short.scale(1.0 / n.max(1.0));
        let mut long2_coords = short2.coords().to_vec();
        long2_coords.extend([0.0; 5]);
        let long2 = SeqVec::new(long2_coords).unwrap();
        let s_short = example2_s(&short2).unwrap();
        let s_long = example2_s(&long2).unwrap();
        for j in 0..short2.dim() {
            assert_eq!(s_short.coord(j), s_long.coord(j));
        }
        assert!(s_long.coords()[short2.dim()..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn self_map_contract_sampled() {
        let cases = [
            (example1_handle(16), PExponent::ONE),
            (example2_handle(16), PExponent::TWO),
        ];
        let alpha_l1 = MultiIndex::flat(vec![0.5, 0.5]).unwrap();
        let alpha_l2 = MultiIndex::new(vec![0.5, 0.5], PExponent::TWO).unwrap();
        for (t, p) in cases {
            let alpha = if p == PExponent::ONE {
                &alpha_l1
            } else {
                &alpha_l2
            };
            let derived = [
                t.clone(),
                iterate(&t, 2),
                t_alpha(&t, alpha),
                tau_alpha(&t, alpha),
            ];
            let dom = t.domain().clone();
            let mut sampler = PairSampler::new(dom.clone(), 2024);
            for _ in 0..100_000 {
                let x = sampler.point();
                for map in &derived {
                    assert!(
                        in_ball(&map.evaluate(&x), &dom, SAMPLED_SLACK),
                        "{} left the ball",
                        map.label()
                    );
                }
            }
        }
    }

    #[test]
    fn half_average_with_image_matches_display_formula() {
        // (1/2) x + (1/2) Tx at e_3 comes out as (0, 1/3, 1/2, 0, ...),
        // matching the coordinatewise formula
        // (x1/2 + tau(x2)/2, x2/2 + x3/3, x3/2 + x4/2, ...).
        let dim = 8;
        let e3 = SeqVec::basis(dim, 2);
        let te3 = example1_t(&e3).unwrap();
        let avg = crate::space::convex_combine(&[0.5, 0.5], &[e3.clone(), te3]).unwrap();
        let formula = |x: &SeqVec, j: usize| match j {
            0 => 0.5 * x.coord(0) + 0.5 * tau_scalar(x.coord(1)).unwrap(),
            1 => 0.5 * x.coord(1) + 0.5 * (2.0 / 3.0 * x.coord(2)),
            _ => 0.5 * x.coord(j) + 0.5 * x.coord(j + 1),
        };
        for j in 0..dim {
            assert!(
                (avg.coord(j) - formula(&e3, j)).abs() <= EXACT_TOL,
                "coord {j}"
            );
        }
        let expected = [0.0, 1.0 / 3.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0];
        for (j, want) in expected.iter().enumerate() {
            assert!((avg.coord(j) - want).abs() <= EXACT_TOL, "coord {j}");
        }
    }

    #[test]
    fn tau_alpha_of_two_case_map_is_identically_zero() {
        let f = discontinuous_f_handle();
        for weights in [vec![0.5, 0.5], vec![0.3, 0.7], vec![0.9, 0.1]] {
            let alpha = MultiIndex::flat(weights).unwrap();
            let tau = tau_alpha(&f, &alpha);
            // The discontinuity point itself, the endpoints, and a grid.
            for k in 0..=1000u64 {
                let x = SeqVec::new(vec![k as f64 / 1000.0]).unwrap();
                assert_eq!(tau.evaluate(&x).coord(0), 0.0);
            }
        }
    }

    #[test]
    fn baselines_are_mean_nonexpansive_for_any_index() {
        use crate::verify::check_mean_nonexpansive;
        let alphas = [
            MultiIndex::flat(vec![0.5, 0.5]).unwrap(),
            MultiIndex::flat(vec![0.3, 0.7]).unwrap(),
            MultiIndex::new(vec![0.5, 0.5], PExponent::TWO).unwrap(),
            MultiIndex::flat(vec![0.2, 0.3, 0.5]).unwrap(),
        ];
        for p in [PExponent::ONE, PExponent::TWO] {
            let dom = BallDomain::unit(8, p);
            for kind in [
                BaselineKind::AffineContraction,
                BaselineKind::CoordinateShiftAverage,
                BaselineKind::Identity,
            ] {
                let map = baseline_map(kind, &dom);
                for alpha in &alphas {
                    let report = check_mean_nonexpansive(&map, alpha, 3_000, 77);
                    assert!(
                        report.no_violation_found(),
                        "{kind:?} with {:?}: max slack {}",
                        alpha.weights(),
                        report.max_slack
                    );
                }
            }
        }
    }

    #[test]
    fn baselines_are_nonexpansive_self_maps() {
        let dom = BallDomain::unit(8, PExponent::ONE);
        for kind in [
            BaselineKind::AffineContraction,
            BaselineKind::CoordinateShiftAverage,
            BaselineKind::Identity,
        ] {
            let map = baseline_map(kind, &dom);
            let mut sampler = PairSampler::new(dom.clone(), 8);
            let est = estimate_lipschitz(&map, &mut sampler, 10_000).unwrap();
            assert!(est.k_hat <= 1.0 + SAMPLED_SLACK, "{kind:?}: {}", est.k_hat);
            for _ in 0..5000 {
                let x = sampler.point();
                assert!(in_ball(&map.evaluate(&x), &dom, SAMPLED_SLACK));
            }
        }
    }

    #[test]
    fn affine_contraction_with_zero_offset_fixes_origin() {
        let dom = BallDomain::unit(4, PExponent::ONE);
        let a = affine_contraction(&dom, SeqVec::zeros(4));
        assert!(a.evaluate(&SeqVec::zeros(4)).is_zero());
    }

    #[test]
    fn registry_roundtrip() {
        for id in REGISTRY_IDS {
            let map = registry_get(id, 8, PExponent::ONE).unwrap();
            assert_eq!(map.label(), id);
        }
        assert!(matches!(
            registry_get("nope", 8, PExponent::ONE),
            Err(ExampleError::UnknownExample(_))
        ));
        assert_eq!(
            registry_get("disc-f", 8, PExponent::ONE)
                .unwrap()
                .domain()
                .dim(),
            1
        );
    }
}
