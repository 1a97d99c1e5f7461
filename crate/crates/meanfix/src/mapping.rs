//! The mapping algebra: multi-indices, self-maps of ball domains, and the
//! derived maps `T^k`, `T_alpha`, `tau_alpha`, the product lift `T~`, and the
//! diagonal composite `J`, plus sampled Lipschitz estimation.
//!
//! For a multi-index `alpha = (a_1, ..., a_n)` and a self-map `T`:
//!
//! * `T_alpha x  = sum_k a_k T^k x`           (averaged iterates)
//! * `tau_alpha  = T o (a_1 I + a_2 T + ... + a_n T^(n-1))`, with `T^0 = I`
//! * `T~ (x_1, ..., x_n) = (T x_1, T^2 x_2, ..., T^n x_n)`
//! * `J  (x_1, ..., x_n) = T~ (xbar, ..., xbar)` with `xbar = sum_k a_k x_k`
//!
//! The two compositions `T_alpha` and `tau_alpha` agree for affine `T` but
//! not in general.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::sampler::PairSampler;
use crate::space::{
    convex_combine, lp_dist, product_norm_raw, product_sub, BallDomain, PExponent, ProductPoint,
    SeqVec, SpaceError, EXACT_TOL,
};

/// Pairs closer than this are skipped by ratio estimators: below that
/// separation the quotient is dominated by rounding noise rather than by the
/// map.
pub const COINCIDENCE_TOL: f64 = 1e-5;

#[derive(Debug, Error)]
pub enum MappingError {
    #[error("multi-index weights must be nonnegative, got {value} at {index}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("multi-index weights must sum to 1 within {tol}, got {sum}")]
    WeightSum { sum: f64, tol: f64 },
    #[error("first and last weights must be positive")]
    ZeroEndpointWeight,
    #[error("multi-index needs at least one weight")]
    Empty,
    #[error("all {trials} sampled pairs were coincident")]
    DegenerateSampling { trials: usize },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// The weight vector `(a_1, ..., a_n)` with its exponent `p`.
///
/// Invariants: weights are nonnegative and sum to 1 within 1e-12, the first
/// and last weights are strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiIndex {
    weights: Vec<f64>,
    p: PExponent,
}

impl MultiIndex {
    pub fn new(weights: Vec<f64>, p: PExponent) -> Result<Self, MappingError> {
        if weights.is_empty() {
            return Err(MappingError::Empty);
        }
        let mut sum = 0.0;
        for (index, &w) in weights.iter().enumerate() {
            if w < 0.0 {
                return Err(MappingError::NegativeWeight { index, value: w });
            }
            sum += w;
        }
        if (sum - 1.0).abs() > EXACT_TOL {
            return Err(MappingError::WeightSum {
                sum,
                tol: EXACT_TOL,
            });
        }
        if weights[0] <= 0.0 || *weights.last().unwrap() <= 0.0 {
            return Err(MappingError::ZeroEndpointWeight);
        }
        Ok(Self { weights, p })
    }

    /// Convenience constructor for the ubiquitous `p = 1` case.
    pub fn flat(weights: Vec<f64>) -> Result<Self, MappingError> {
        Self::new(weights, PExponent::ONE)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights[index]
    }

    pub fn p(&self) -> PExponent {
        self.p
    }
}

/// An evaluatable self-map of a ball domain.
///
/// Evaluation is deterministic and pure; derived maps share the base map's
/// domain. The self-map contract (images stay in the domain, slack 1e-9) is
/// checked statistically by the verification layer, not proven.
#[derive(Clone)]
pub struct MappingHandle {
    domain: BallDomain,
    label: String,
    eval: Arc<dyn Fn(&SeqVec) -> SeqVec + Send + Sync>,
}

impl MappingHandle {
    pub fn new<F>(domain: BallDomain, label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&SeqVec) -> SeqVec + Send + Sync + 'static,
    {
        Self {
            domain,
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn evaluate(&self, v: &SeqVec) -> SeqVec {
        (self.eval)(v)
    }

    pub fn domain(&self) -> &BallDomain {
        &self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl std::fmt::Debug for MappingHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MappingHandle")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish()
    }
}

/// The k-fold composition `T^k`, `k >= 1`.
pub fn iterate(t: &MappingHandle, k: usize) -> MappingHandle {
    assert!(k >= 1, "iterate needs k >= 1");
    let base = t.clone();
    let label = if k == 1 {
        t.label().to_string()
    } else {
        format!("{}^{}", t.label(), k)
    };
    MappingHandle::new(t.domain().clone(), label, move |v| {
        let mut cur = base.evaluate(v);
        for _ in 1..k {
            cur = base.evaluate(&cur);
        }
        cur
    })
}

/// The averaged map `x -> sum_k a_k T^k x`.
pub fn t_alpha(t: &MappingHandle, alpha: &MultiIndex) -> MappingHandle {
    let base = t.clone();
    let weights = alpha.weights().to_vec();
    let label = format!("{}_alpha", t.label());
    MappingHandle::new(t.domain().clone(), label, move |v| {
        let mut acc = SeqVec::zeros(v.dim());
        let mut cur = v.clone();
        for &w in &weights {
            cur = base.evaluate(&cur);
            acc = acc.add(&cur.scale(w));
        }
        acc
    })
}

/// The reversed composition `x -> T(sum_k a_k T^(k-1) x)` with `T^0 = I`.
pub fn tau_alpha(t: &MappingHandle, alpha: &MultiIndex) -> MappingHandle {
    let base = t.clone();
    let weights = alpha.weights().to_vec();
    let label = format!("tau_alpha({})", t.label());
    MappingHandle::new(t.domain().clone(), label, move |v| {
        let mut acc = v.scale(weights[0]);
        let mut cur = v.clone();
        for &w in &weights[1..] {
            cur = base.evaluate(&cur);
            acc = acc.add(&cur.scale(w));
        }
        base.evaluate(&acc)
    })
}

/// A self-map of the product `C^n` measured by the weighted product norm.
#[derive(Clone)]
pub struct ProductMap {
    alpha: MultiIndex,
    component_domain: BallDomain,
    label: String,
    eval: Arc<dyn Fn(&ProductPoint) -> ProductPoint + Send + Sync>,
}

impl ProductMap {
    pub fn new<F>(
        alpha: MultiIndex,
        component_domain: BallDomain,
        label: impl Into<String>,
        eval: F,
    ) -> Self
    where
        F: Fn(&ProductPoint) -> ProductPoint + Send + Sync + 'static,
    {
        Self {
            alpha,
            component_domain,
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn apply(&self, pp: &ProductPoint) -> ProductPoint {
        assert_eq!(pp.n(), self.n(), "product point length mismatch");
        (self.eval)(pp)
    }

    pub fn n(&self) -> usize {
        self.alpha.n()
    }

    pub fn alpha(&self) -> &MultiIndex {
        &self.alpha
    }

    pub fn component_domain(&self) -> &BallDomain {
        &self.component_domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `||pp||_{alpha,p}` with the ambient norm of the component domain.
    pub fn norm(&self, pp: &ProductPoint) -> f64 {
        product_norm_raw(
            pp,
            self.component_domain.p(),
            self.alpha.weights(),
            self.alpha.p(),
        )
        .expect("alpha length matches the product")
    }

    pub fn dist(&self, a: &ProductPoint, b: &ProductPoint) -> f64 {
        self.norm(&product_sub(a, b).expect("equal product lengths"))
    }

    /// `||F z - z||_{alpha,p}`.
    pub fn residual(&self, z: &ProductPoint) -> f64 {
        self.dist(&self.apply(z), z)
    }

    /// Diameter of `C^n` under the product norm: the weights sum to 1, so it
    /// equals the diameter `2 r` of the component ball.
    pub fn diameter(&self) -> f64 {
        2.0 * self.component_domain.radius()
    }
}

impl std::fmt::Debug for ProductMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProductMap")
            .field("label", &self.label)
            .field("n", &self.n())
            .finish()
    }
}

fn natural_exponents(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

/// The lift `(x_1, ..., x_n) -> (T^{k_1} x_1, ..., T^{k_n} x_n)`.
///
/// With the natural exponents `k_j = j` this is the standard lift
/// `(T x_1, T^2 x_2, ..., T^n x_n)`; the general form serves the
/// zero-weight collapse.
pub fn tilde_t_with_exponents(
    t: &MappingHandle,
    alpha: &MultiIndex,
    exponents: &[usize],
) -> ProductMap {
    check_exponents(alpha, exponents);
    let base = t.clone();
    let exps = exponents.to_vec();
    let label = format!("tilde({})", t.label());
    ProductMap::new(alpha.clone(), t.domain().clone(), label, move |pp| {
        let parts = pp
            .parts()
            .iter()
            .zip(&exps)
            .map(|(part, &k)| {
                let mut cur = base.evaluate(part);
                for _ in 1..k {
                    cur = base.evaluate(&cur);
                }
                cur
            })
            .collect();
        ProductPoint::new(parts).expect("lift preserves the dimension")
    })
}

pub fn tilde_t(t: &MappingHandle, alpha: &MultiIndex) -> ProductMap {
    tilde_t_with_exponents(t, alpha, &natural_exponents(alpha.n()))
}

/// The composite `J(x_1, ..., x_n) = T~(xbar, ..., xbar)`, i.e. the tuple
/// `(T^{k_1} xbar, ..., T^{k_n} xbar)` with `xbar = sum_k a_k x_k`.
///
/// `J` depends on its argument only through `xbar`, and the successive
/// powers are computed incrementally so that `J(pp)` is bit-identical to
/// `T~` applied to the diagonal of `xbar`.
pub fn j_map_with_exponents(
    t: &MappingHandle,
    alpha: &MultiIndex,
    exponents: &[usize],
) -> ProductMap {
    check_exponents(alpha, exponents);
    let base = t.clone();
    let weights = alpha.weights().to_vec();
    let exps = exponents.to_vec();
    let label = format!("J({})", t.label());
    ProductMap::new(alpha.clone(), t.domain().clone(), label, move |pp| {
        let xbar = convex_combine(&weights, pp.parts())
            .expect("multi-index weights are a convex combination");
        let mut parts = Vec::with_capacity(exps.len());
        let mut cur = xbar;
        let mut power = 0usize;
        for &k in &exps {
            while power < k {
                cur = base.evaluate(&cur);
                power += 1;
            }
            parts.push(cur.clone());
        }
        ProductPoint::new(parts).expect("powers preserve the dimension")
    })
}

pub fn j_map(t: &MappingHandle, alpha: &MultiIndex) -> ProductMap {
    j_map_with_exponents(t, alpha, &natural_exponents(alpha.n()))
}

fn check_exponents(alpha: &MultiIndex, exponents: &[usize]) {
    assert_eq!(
        alpha.n(),
        exponents.len(),
        "one exponent per multi-index weight"
    );
    assert!(
        exponents.windows(2).all(|w| w[0] < w[1]),
        "exponents must be strictly increasing"
    );
    assert_eq!(exponents[0], 1, "the first exponent is always 1");
}

/// Drops zero weights from a multi-index, returning the reduced index and
/// the original (1-based) positions `k_1 < ... < k_nu` of the survivors.
///
/// With zero weights present the weighted product-space functional is no
/// longer a norm; downstream constructions use powers `T^{k_j}` and only the
/// surviving weights.
pub fn collapse_zero_weights(alpha: &MultiIndex) -> (MultiIndex, Vec<usize>) {
    let mut weights = Vec::new();
    let mut exponents = Vec::new();
    for (i, &w) in alpha.weights().iter().enumerate() {
        if w != 0.0 {
            weights.push(w);
            exponents.push(i + 1);
        }
    }
    let collapsed = MultiIndex::new(weights, alpha.p())
        .expect("nonzero weights of a valid multi-index form a valid multi-index");
    (collapsed, exponents)
}

/// Sampled lower bound for a Lipschitz constant.
#[derive(Debug, Clone, Serialize)]
pub struct LipschitzEstimate {
    /// Max observed ratio `||Tx - Ty|| / ||x - y||`; a lower bound for the
    /// true constant.
    pub k_hat: f64,
    /// Number of distinct pairs that contributed a ratio.
    pub pairs_sampled: usize,
    /// The maximizing pair.
    pub argmax_pair: (SeqVec, SeqVec),
}

/// Max difference-quotient over `trials` sampled pairs. Coincident pairs
/// (distance below [`COINCIDENCE_TOL`]) are skipped; it is an error for all
/// trials to degenerate.
pub fn estimate_lipschitz(
    t: &MappingHandle,
    sampler: &mut PairSampler,
    trials: usize,
) -> Result<LipschitzEstimate, MappingError> {
    if trials == 0 {
        return Err(MappingError::NoTrials);
    }
    let p = t.domain().p();
    let mut best: Option<(f64, SeqVec, SeqVec)> = None;
    let mut pairs_sampled = 0usize;
    for _ in 0..trials {
        let (x, y) = sampler.pair();
        let denom = lp_dist(&x, &y, p);
        if denom <= COINCIDENCE_TOL {
            continue;
        }
        let ratio = lp_dist(&t.evaluate(&x), &t.evaluate(&y), p) / denom;
        pairs_sampled += 1;
        match &best {
            Some((r, _, _)) if *r >= ratio => {}
            _ => best = Some((ratio, x, y)),
        }
    }
    let (k_hat, x, y) = best.ok_or(MappingError::DegenerateSampling { trials })?;
    Ok(LipschitzEstimate {
        k_hat,
        pairs_sampled,
        argmax_pair: (x, y),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{baseline_map, discontinuous_f_handle, example1_handle, BaselineKind};
    use crate::space::lp_norm;

    fn e3(dim: usize) -> SeqVec {
        SeqVec::basis(dim, 2)
    }

    fn half_half() -> MultiIndex {
        MultiIndex::flat(vec![0.5, 0.5]).unwrap()
    }

    fn assert_close(v: &SeqVec, expected: &[f64], tol: f64) {
        assert_eq!(v.dim(), expected.len());
        for (i, (&got, &want)) in v.coords().iter().zip(expected).enumerate() {
            assert!(
                (got - want).abs() <= tol,
                "coord {i}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn multi_index_invariants() {
        assert!(MultiIndex::flat(vec![0.5, 0.5]).is_ok());
        assert!(MultiIndex::flat(vec![1.0]).is_ok());
        assert!(MultiIndex::flat(vec![0.5, 0.0, 0.5]).is_ok());
        assert!(matches!(
            MultiIndex::flat(vec![0.0, 1.0]),
            Err(MappingError::ZeroEndpointWeight)
        ));
        assert!(matches!(
            MultiIndex::flat(vec![0.6, 0.6]),
            Err(MappingError::WeightSum { .. })
        ));
        assert!(matches!(
            MultiIndex::flat(vec![1.5, -0.5]),
            Err(MappingError::NegativeWeight { .. })
        ));
        assert!(matches!(MultiIndex::flat(vec![]), Err(MappingError::Empty)));
    }

    #[test]
    fn iterate_once_is_the_map() {
        let t = example1_handle(8);
        let t1 = iterate(&t, 1);
        let x = e3(8);
        assert_eq!(t1.evaluate(&x), t.evaluate(&x));
    }

    #[test]
    fn iterate_twice_matches_paper_value() {
        // T^2 e_3 = T(0, 2/3, 0, ...) = (tau(2/3), 0, ...) = (1/3, 0, ...)
        let t = example1_handle(8);
        let t2 = iterate(&t, 2);
        let mut expected = vec![0.0; 8];
        expected[0] = 1.0 / 3.0;
        assert_close(&t2.evaluate(&e3(8)), &expected, EXACT_TOL);
    }

    #[test]
    fn iterate_discontinuous_f() {
        let f = discontinuous_f_handle();
        let f2 = iterate(&f, 2);
        assert_eq!(f2.evaluate(&SeqVec::new(vec![0.0]).unwrap()).coord(0), 0.0);
        assert_eq!(f2.evaluate(&SeqVec::new(vec![0.5]).unwrap()).coord(0), 1.0);
    }

    #[test]
    fn t_alpha_matches_paper_value() {
        // T_alpha e_3 = (1/6, 1/3, 0, ...)
        let t = example1_handle(8);
        let ta = t_alpha(&t, &half_half());
        let mut expected = vec![0.0; 8];
        expected[0] = 1.0 / 6.0;
        expected[1] = 1.0 / 3.0;
        assert_close(&ta.evaluate(&e3(8)), &expected, EXACT_TOL);
    }

    #[test]
    fn t_alpha_fixes_origin_of_contraction() {
        let dom = BallDomain::unit(4, PExponent::ONE);
        let half = baseline_map(BaselineKind::Identity, &dom);
        let scaled = MappingHandle::new(dom, "half", move |v: &SeqVec| half.evaluate(v).scale(0.5));
        let ta = t_alpha(&scaled, &half_half());
        assert!(ta.evaluate(&SeqVec::zeros(4)).is_zero());
    }

    #[test]
    fn t_alpha_degenerate_singleton() {
        let t = example1_handle(8);
        let alpha = MultiIndex::flat(vec![1.0]).unwrap();
        let ta = t_alpha(&t, &alpha);
        let x = e3(8);
        assert_eq!(ta.evaluate(&x), t.evaluate(&x));
    }

    #[test]
    fn t_alpha_two_routes_agree() {
        // sum a_k T^k x == ((a_1 I + a_2 T) o T)(x) pointwise.
        let t = example1_handle(16);
        let alpha = half_half();
        let ta = t_alpha(&t, &alpha);
        let mut sampler = PairSampler::new(t.domain().clone(), 5);
        for _ in 0..200 {
            let x = sampler.point();
            // Route 1: a_1 T x + a_2 T^2 x evaluated term by term.
            let tx = t.evaluate(&x);
            let direct = tx.scale(0.5).add(&t.evaluate(&tx).scale(0.5));
            // Route 2: apply T first, then the averaged map a_1 I + a_2 T.
            let u = t.evaluate(&x);
            let composed = u.scale(0.5).add(&t.evaluate(&u).scale(0.5));
            let via_op = ta.evaluate(&x);
            assert!(lp_dist(&via_op, &direct, PExponent::ONE) <= EXACT_TOL);
            assert!(lp_dist(&via_op, &composed, PExponent::ONE) <= EXACT_TOL);
        }
    }

    #[test]
    fn tau_alpha_matches_paper_value() {
        // tau_alpha e_3 = (0, 1/3, 0, ...)
        let t = example1_handle(8);
        let ta = tau_alpha(&t, &half_half());
        let mut expected = vec![0.0; 8];
        expected[1] = 1.0 / 3.0;
        assert_close(&ta.evaluate(&e3(8)), &expected, EXACT_TOL);
    }

    #[test]
    fn tau_alpha_and_t_alpha_differ_by_one_sixth_at_e3() {
        let t = example1_handle(16);
        let alpha = half_half();
        let gap = lp_dist(
            &tau_alpha(&t, &alpha).evaluate(&e3(16)),
            &t_alpha(&t, &alpha).evaluate(&e3(16)),
            PExponent::ONE,
        );
        assert!((gap - 1.0 / 6.0).abs() <= EXACT_TOL);
    }

    #[test]
    fn affine_maps_commute() {
        let dom = BallDomain::unit(8, PExponent::ONE);
        let a = baseline_map(BaselineKind::AffineContraction, &dom);
        for alpha in [
            half_half(),
            MultiIndex::flat(vec![0.3, 0.7]).unwrap(),
            MultiIndex::flat(vec![0.2, 0.3, 0.5]).unwrap(),
        ] {
            let lhs = tau_alpha(&a, &alpha);
            let rhs = t_alpha(&a, &alpha);
            let mut sampler = PairSampler::new(dom.clone(), 17);
            for _ in 0..300 {
                let x = sampler.point();
                assert!(lp_dist(&lhs.evaluate(&x), &rhs.evaluate(&x), PExponent::ONE) <= 1e-10);
            }
        }
    }

    #[test]
    fn tilde_t_at_e3_pair() {
        let t = example1_handle(8);
        let lift = tilde_t(&t, &half_half());
        let pp = ProductPoint::diagonal(&e3(8), 2);
        let out = lift.apply(&pp);
        let mut first = vec![0.0; 8];
        first[1] = 2.0 / 3.0;
        let mut second = vec![0.0; 8];
        second[0] = 1.0 / 3.0;
        assert_close(out.part(0), &first, EXACT_TOL);
        assert_close(out.part(1), &second, EXACT_TOL);
    }

    #[test]
    fn tilde_t_zero_pair_under_contraction() {
        let dom = BallDomain::unit(4, PExponent::ONE);
        let c = MappingHandle::new(dom.clone(), "half", |v: &SeqVec| v.scale(0.5));
        let lift = tilde_t(&c, &half_half());
        let zero = ProductPoint::diagonal(&SeqVec::zeros(4), 2);
        let out = lift.apply(&zero);
        assert!(out.part(0).is_zero() && out.part(1).is_zero());
    }

    #[test]
    fn j_map_depends_only_on_xbar() {
        // Dyadic weights make the diagonal recombination exact in floating
        // point, so the reduction holds bitwise.
        let t = example1_handle(8);
        let alpha = half_half();
        let j = j_map(&t, &alpha);
        let lift = tilde_t(&t, &alpha);
        let mut sampler = PairSampler::new(t.domain().clone(), 23);
        for _ in 0..100 {
            let x = sampler.point();
            let y = sampler.point();
            let pp = ProductPoint::new(vec![x.clone(), y.clone()]).unwrap();
            let xbar = convex_combine(alpha.weights(), pp.parts()).unwrap();
            let direct = j.apply(&pp);
            let via_diag = j.apply(&ProductPoint::diagonal(&xbar, 2));
            let via_lift = lift.apply(&ProductPoint::diagonal(&xbar, 2));
            assert_eq!(direct, via_diag);
            assert_eq!(direct, via_lift);
        }
    }

    #[test]
    fn j_map_at_e3() {
        let t = example1_handle(8);
        let j = j_map(&t, &half_half());
        let out = j.apply(&ProductPoint::diagonal(&e3(8), 2));
        let mut first = vec![0.0; 8];
        first[1] = 2.0 / 3.0;
        let mut second = vec![0.0; 8];
        second[0] = 1.0 / 3.0;
        assert_close(out.part(0), &first, EXACT_TOL);
        assert_close(out.part(1), &second, EXACT_TOL);
    }

    #[test]
    fn j_fixed_point_characterization() {
        // For the affine contraction the fixed point of J solves a linear
        // system; at it, T(xbar) = x and T^2(xbar) = y.
        let dom = BallDomain::unit(4, PExponent::ONE);
        let a = baseline_map(BaselineKind::AffineContraction, &dom);
        let alpha = MultiIndex::flat(vec![0.6, 0.4]).unwrap();
        let j = j_map(&a, &alpha);
        // Solve u = a1 (u/2 + c) + a2 (u/4 + 3c/2) coordinatewise; c is the
        // affine offset, read off from a(0).
        let c = a.evaluate(&SeqVec::zeros(4));
        let denom = 1.0 - 0.6 / 2.0 - 0.4 / 4.0;
        let u = c.scale((0.6 + 1.5 * 0.4) / denom);
        let x = u.scale(0.5).add(&c);
        let y = u.scale(0.25).add(&c.scale(1.5));
        let pp = ProductPoint::new(vec![x.clone(), y.clone()]).unwrap();
        let out = j.apply(&pp);
        assert!(lp_dist(out.part(0), &x, PExponent::ONE) <= 1e-10);
        assert!(lp_dist(out.part(1), &y, PExponent::ONE) <= 1e-10);
        let xbar = convex_combine(alpha.weights(), pp.parts()).unwrap();
        assert!(lp_dist(&a.evaluate(&xbar), &x, PExponent::ONE) <= 1e-10);
        assert!(lp_dist(&iterate(&a, 2).evaluate(&xbar), &y, PExponent::ONE) <= 1e-10);
    }

    #[test]
    fn collapse_examples() {
        let (c, k) = collapse_zero_weights(&MultiIndex::flat(vec![0.5, 0.0, 0.5]).unwrap());
        assert_eq!(c.weights(), &[0.5, 0.5]);
        assert_eq!(k, vec![1, 3]);

        let third = 1.0 / 3.0;
        let (c, k) = collapse_zero_weights(
            &MultiIndex::flat(vec![third, third, 1.0 - 2.0 * third]).unwrap(),
        );
        assert_eq!(c.n(), 3);
        assert_eq!(k, vec![1, 2, 3]);

        let (c, k) = collapse_zero_weights(&MultiIndex::flat(vec![0.6, 0.4]).unwrap());
        assert_eq!(c.weights(), &[0.6, 0.4]);
        assert_eq!(k, vec![1, 2]);
    }

    #[test]
    fn lipschitz_of_identity_is_one() {
        let dom = BallDomain::unit(6, PExponent::ONE);
        let id = baseline_map(BaselineKind::Identity, &dom);
        let mut sampler = PairSampler::new(dom, 31);
        let est = estimate_lipschitz(&id, &mut sampler, 5000).unwrap();
        assert_eq!(est.k_hat, 1.0);
        assert!(est.pairs_sampled > 0);
    }

    #[test]
    fn lipschitz_witness_pair_for_example1() {
        // x = (0,1,0,...), y = (0,1/2,0,...): ||Tx-Ty||_1 = 1, ||x-y||_1 = 1/2.
        let t = example1_handle(8);
        let x = SeqVec::basis(8, 1);
        let y = SeqVec::basis(8, 1).scale(0.5);
        let num = lp_dist(&t.evaluate(&x), &t.evaluate(&y), PExponent::ONE);
        let den = lp_dist(&x, &y, PExponent::ONE);
        assert!((num / den - 2.0).abs() <= EXACT_TOL);
    }

    #[test]
    fn lipschitz_estimate_reaches_expansion() {
        let t = example1_handle(16);
        let mut sampler = PairSampler::new(t.domain().clone(), 42);
        let est = estimate_lipschitz(&t, &mut sampler, 50_000).unwrap();
        assert!(est.k_hat > 1.5, "k_hat = {}", est.k_hat);
        assert!(est.k_hat <= 2.0 + 1e-6, "k_hat = {}", est.k_hat);
        // The recorded pair reproduces the recorded ratio.
        let (x, y) = &est.argmax_pair;
        let r =
            lp_dist(&t.evaluate(x), &t.evaluate(y), PExponent::ONE) / lp_dist(x, y, PExponent::ONE);
        assert!((r - est.k_hat).abs() <= EXACT_TOL);
    }

    #[test]
    fn lipschitz_example2_below_sqrt2() {
        let s = crate::examples::example2_handle(16);
        let mut sampler = PairSampler::new(s.domain().clone(), 42);
        let est = estimate_lipschitz(&s, &mut sampler, 50_000).unwrap();
        assert!(est.k_hat <= 2f64.sqrt() + 1e-9, "k_hat = {}", est.k_hat);
    }

    #[test]
    fn product_map_norm_uses_alpha() {
        let dom = BallDomain::unit(2, PExponent::TWO);
        let alpha = MultiIndex::new(vec![0.5, 0.5], PExponent::TWO).unwrap();
        let id = ProductMap::new(alpha, dom, "id", |pp: &ProductPoint| pp.clone());
        let pp = ProductPoint::new(vec![
            SeqVec::new(vec![3.0, 0.0]).unwrap(),
            SeqVec::new(vec![0.0, 4.0]).unwrap(),
        ])
        .unwrap();
        assert!((id.norm(&pp) - 12.5f64.sqrt()).abs() <= EXACT_TOL);
        assert_eq!(id.diameter(), 2.0);
    }

    #[test]
    fn lipschitz_requires_trials() {
        let dom = BallDomain::unit(2, PExponent::ONE);
        let id = baseline_map(BaselineKind::Identity, &dom);
        let mut sampler = PairSampler::new(dom, 1);
        assert!(matches!(
            estimate_lipschitz(&id, &mut sampler, 0),
            Err(MappingError::NoTrials)
        ));
    }

    #[test]
    fn lipschitz_norm_uses_domain_norm() {
        let v = SeqVec::new(vec![0.6, 0.8]).unwrap();
        assert!((lp_norm(&v, PExponent::TWO) - 1.0).abs() <= EXACT_TOL);
    }
}
