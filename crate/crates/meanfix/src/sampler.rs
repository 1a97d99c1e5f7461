//! Seeded point- and pair-samplers over ball domains.
//!
//! Three strategies are mixed 40/40/20 when drawing pairs: uniform-in-ball,
//! boundary-biased, and sparse (at most 3 nonzero coordinates). The worst
//! expansion pairs of the shift-style example maps are sparse boundary
//! points, so plain uniform sampling alone badly underestimates Lipschitz
//! constants.
//!
//! A sampler owns its RNG and is confined to one thread; parallel runs use
//! independently seeded instances.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::space::{lp_norm, BallDomain, ProductPoint, SeqVec};

/// Deterministic sampler for points and pairs in one [`BallDomain`].
pub struct PairSampler {
    domain: BallDomain,
    rng: ChaCha8Rng,
    seed: u64,
    gamma: Gamma<f64>,
}

impl PairSampler {
    pub fn new(domain: BallDomain, seed: u64) -> Self {
        let shape = 1.0 / domain.p().get();
        let gamma = Gamma::new(shape, 1.0).expect("gamma shape is positive");
        Self {
            domain,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            gamma,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn domain(&self) -> &BallDomain {
        &self.domain
    }

    /// A direction on the unit lp sphere via the p-generalized normal:
    /// |g_i| = G_i^(1/p) with G_i ~ Gamma(1/p, 1) and random signs.
    fn sphere_direction(&mut self) -> SeqVec {
        let dim = self.domain.dim();
        let p = self.domain.p().get();
        loop {
            let mut coords = Vec::with_capacity(dim);
            for _ in 0..dim {
                let g: f64 = self.gamma.sample(&mut self.rng);
                let mag = g.powf(1.0 / p);
                let sign = if self.rng.random::<bool>() { 1.0 } else { -1.0 };
                coords.push(sign * mag);
            }
            let v = SeqVec::new(coords).expect("gamma samples are finite");
            let n = lp_norm(&v, self.domain.p());
            if n > 1e-12 {
                return v.scale(1.0 / n);
            }
        }
    }

    /// Exactly uniform draw from the ball (direction on the sphere, radius
    /// scaled by U^(1/d)).
    pub fn uniform_point(&mut self) -> SeqVec {
        let dir = self.sphere_direction();
        let u: f64 = self.rng.random();
        let r = self.domain.radius() * u.powf(1.0 / self.domain.dim() as f64);
        self.domain.center().add(&dir.scale(r))
    }

    /// A point on the boundary sphere.
    pub fn boundary_point(&mut self) -> SeqVec {
        let dir = self.sphere_direction();
        self.domain.center().add(&dir.scale(self.domain.radius()))
    }

    /// A point with at most 3 nonzero coordinates (relative to the center),
    /// projected back into the ball when it lands outside.
    pub fn sparse_point(&mut self) -> SeqVec {
        let dim = self.domain.dim();
        let k = self.rng.random_range(1..=3usize.min(dim));
        let mut coords = vec![0.0; dim];
        for _ in 0..k {
            let idx = self.rng.random_range(0..dim);
            coords[idx] = self.rng.random_range(-1.0..1.0) * self.domain.radius();
        }
        let mut offset = SeqVec::new(coords).expect("finite coords");
        let n = lp_norm(&offset, self.domain.p());
        if n > self.domain.radius() {
            offset = offset.scale(self.domain.radius() / n);
        }
        self.domain.center().add(&offset)
    }

    /// Sparse pair sharing one support pattern, so the two points differ in
    /// few coordinates (where the example maps' worst ratios live).
    fn sparse_pair_shared_support(&mut self) -> (SeqVec, SeqVec) {
        let dim = self.domain.dim();
        let k = self.rng.random_range(1..=3usize.min(dim));
        let indices: Vec<usize> = (0..k).map(|_| self.rng.random_range(0..dim)).collect();
        let draw = |sampler: &mut Self| {
            let mut coords = vec![0.0; dim];
            for &idx in &indices {
                coords[idx] = sampler.rng.random_range(-1.0..1.0) * sampler.domain.radius();
            }
            let mut offset = SeqVec::new(coords).expect("finite coords");
            let n = lp_norm(&offset, sampler.domain.p());
            if n > sampler.domain.radius() {
                offset = offset.scale(sampler.domain.radius() / n);
            }
            sampler.domain.center().add(&offset)
        };
        let x = draw(self);
        let y = draw(self);
        (x, y)
    }

    /// One point drawn with the 40/40/20 strategy mix.
    pub fn point(&mut self) -> SeqVec {
        let u: f64 = self.rng.random();
        if u < 0.4 {
            self.uniform_point()
        } else if u < 0.8 {
            self.boundary_point()
        } else {
            self.sparse_point()
        }
    }

    /// A pair drawn with the 40/40/20 strategy mix; sparse pairs share their
    /// support pattern half the time.
    pub fn pair(&mut self) -> (SeqVec, SeqVec) {
        let u: f64 = self.rng.random();
        if u < 0.4 {
            (self.uniform_point(), self.uniform_point())
        } else if u < 0.8 {
            (self.boundary_point(), self.boundary_point())
        } else if self.rng.random::<bool>() {
            self.sparse_pair_shared_support()
        } else {
            (self.sparse_point(), self.sparse_point())
        }
    }

    pub fn product_point(&mut self, n: usize) -> ProductPoint {
        ProductPoint::new((0..n).map(|_| self.point()).collect())
            .expect("sampler parts share the domain dimension")
    }

    pub fn product_pair(&mut self, n: usize) -> (ProductPoint, ProductPoint) {
        (self.product_point(n), self.product_point(n))
    }
}
