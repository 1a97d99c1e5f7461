//! Finite-dimensional real vectors with lp norms, ball domains, convex
//! combinations, and the weighted product norm on n-tuples.
//!
//! All points are finitely supported truncations of sequence-space elements.
//! For the shift-style maps in [`crate::examples`] this truncation is exact,
//! not approximate: a vector supported in the first `d` coordinates has its
//! image supported in the first `d - 1`, so no mass ever falls off the end.

use serde::Serialize;
use thiserror::Error;

/// Absolute tolerance for exact-style equality checks (norms, weight sums).
pub const EXACT_TOL: f64 = 1e-12;

/// Slack used by sampled inequality checks to absorb floating-point noise.
pub const SAMPLED_SLACK: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("coordinate {index} is not finite")]
    NonFiniteCoord { index: usize },
    #[error("vector must have at least one coordinate")]
    EmptyVector,
    #[error("exponent must satisfy 1 <= p < infinity, got {p}")]
    InvalidExponent { p: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("weights must sum to 1 within {tol}, got {sum}")]
    WeightSum { sum: f64, tol: f64 },
    #[error("weight {index} is negative: {value}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("product point needs at least one part")]
    EmptyProduct,
    #[error("weight/part count mismatch: {weights} weights, {parts} parts")]
    LengthMismatch { weights: usize, parts: usize },
    #[error("radius must be positive, got {radius}")]
    InvalidRadius { radius: f64 },
}

/// A point of a (truncated) real sequence space.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SeqVec {
    coords: Vec<f64>,
}

impl SeqVec {
    /// Builds a vector, rejecting NaN/infinite coordinates and zero length.
    pub fn new(coords: Vec<f64>) -> Result<Self, SpaceError> {
        if coords.is_empty() {
            return Err(SpaceError::EmptyVector);
        }
        for (index, c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(SpaceError::NonFiniteCoord { index });
            }
        }
        Ok(Self { coords })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            coords: vec![0.0; dim],
        }
    }

    /// Standard basis vector `e_{index+1}` (zero-based `index`).
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dim {dim}"
        );
        let mut coords = vec![0.0; dim];
        coords[index] = 1.0;
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Coordinate by zero-based index; indices past the truncation are 0.
    pub fn coord(&self, index: usize) -> f64 {
        self.coords.get(index).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    pub fn add(&self, other: &SeqVec) -> SeqVec {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in add");
        SeqVec {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &SeqVec) -> SeqVec {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in sub");
        SeqVec {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> SeqVec {
        SeqVec {
            coords: self.coords.iter().map(|c| c * factor).collect(),
        }
    }
}

/// The exponent of an lp norm, restricted to `[1, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PExponent(f64);

impl PExponent {
    pub const ONE: PExponent = PExponent(1.0);
    pub const TWO: PExponent = PExponent(2.0);

    pub fn new(p: f64) -> Result<Self, SpaceError> {
        if !p.is_finite() || p < 1.0 {
            return Err(SpaceError::InvalidExponent { p });
        }
        Ok(Self(p))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// An n-tuple of equal-dimension vectors, an element of `C^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProductPoint {
    parts: Vec<SeqVec>,
}

impl ProductPoint {
    pub fn new(parts: Vec<SeqVec>) -> Result<Self, SpaceError> {
        let first = parts.first().ok_or(SpaceError::EmptyProduct)?;
        let dim = first.dim();
        for part in &parts {
            if part.dim() != dim {
                return Err(SpaceError::DimensionMismatch {
                    expected: dim,
                    got: part.dim(),
                });
            }
        }
        Ok(Self { parts })
    }

    /// The diagonal tuple `(x, x, ..., x)`.
    pub fn diagonal(x: &SeqVec, n: usize) -> Self {
        assert!(n >= 1, "product length must be positive");
        Self {
            parts: vec![x.clone(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.parts.len()
    }

    pub fn dim(&self) -> usize {
        self.parts[0].dim()
    }

    pub fn parts(&self) -> &[SeqVec] {
        &self.parts
    }

    pub fn part(&self, index: usize) -> &SeqVec {
        &self.parts[index]
    }
}

/// A closed ball `{ v : ||v - center||_p <= radius }` used as a map domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallDomain {
    dim: usize,
    p: PExponent,
    radius: f64,
    center: SeqVec,
}

impl BallDomain {
    pub fn new(dim: usize, p: PExponent, radius: f64, center: SeqVec) -> Result<Self, SpaceError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(SpaceError::InvalidRadius { radius });
        }
        if center.dim() != dim {
            return Err(SpaceError::DimensionMismatch {
                expected: dim,
                got: center.dim(),
            });
        }
        Ok(Self {
            dim,
            p,
            radius,
            center,
        })
    }

    /// Unit ball centered at the origin.
    pub fn unit(dim: usize, p: PExponent) -> Self {
        Self {
            dim,
            p,
            radius: 1.0,
            center: SeqVec::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> PExponent {
        self.p
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> &SeqVec {
        &self.center
    }
}

/// `(sum |v_i|^p)^(1/p)`. The p = 1 and p = 2 cases avoid `powf` so that
/// hand-checked values come out bit-clean.
pub fn lp_norm(v: &SeqVec, p: PExponent) -> f64 {
    let p = p.get();
    if p == 1.0 {
        v.coords().iter().map(|c| c.abs()).sum()
    } else if p == 2.0 {
        v.coords().iter().map(|c| c * c).sum::<f64>().sqrt()
    } else {
        let sum: f64 = v.coords().iter().map(|c| c.abs().powf(p)).sum();
        sum.powf(1.0 / p)
    }
}

/// `||x - y||_p`.
pub fn lp_dist(x: &SeqVec, y: &SeqVec, p: PExponent) -> f64 {
    lp_norm(&x.sub(y), p)
}

/// Coordinatewise weighted sum of points with nonnegative weights summing
/// to 1 (within [`EXACT_TOL`]).
pub fn convex_combine(weights: &[f64], points: &[SeqVec]) -> Result<SeqVec, SpaceError> {
    if weights.len() != points.len() {
        return Err(SpaceError::LengthMismatch {
            weights: weights.len(),
            parts: points.len(),
        });
    }
    let first = points.first().ok_or(SpaceError::EmptyProduct)?;
    let dim = first.dim();
    for pt in points {
        if pt.dim() != dim {
            return Err(SpaceError::DimensionMismatch {
                expected: dim,
                got: pt.dim(),
            });
        }
    }
    let mut sum = 0.0;
    for (index, &w) in weights.iter().enumerate() {
        if w < 0.0 {
            return Err(SpaceError::NegativeWeight { index, value: w });
        }
        sum += w;
    }
    if (sum - 1.0).abs() > EXACT_TOL {
        return Err(SpaceError::WeightSum {
            sum,
            tol: EXACT_TOL,
        });
    }
    let mut acc = SeqVec::zeros(dim);
    for (w, pt) in weights.iter().zip(points) {
        acc = acc.add(&pt.scale(*w));
    }
    Ok(acc)
}

/// `(sum_k w_k ||x_k||_ambient^p)^(1/p)` with the outer exponent `outer`.
///
/// On a diagonal tuple this collapses to the plain norm of the repeated part
/// because the weights sum to 1.
pub fn product_norm_raw(
    pp: &ProductPoint,
    ambient: PExponent,
    weights: &[f64],
    outer: PExponent,
) -> Result<f64, SpaceError> {
    if weights.len() != pp.n() {
        return Err(SpaceError::LengthMismatch {
            weights: weights.len(),
            parts: pp.n(),
        });
    }
    let p = outer.get();
    if p == 1.0 {
        Ok(weights
            .iter()
            .zip(pp.parts())
            .map(|(w, part)| w * lp_norm(part, ambient))
            .sum())
    } else if p == 2.0 {
        let sum: f64 = weights
            .iter()
            .zip(pp.parts())
            .map(|(w, part)| {
                let n = lp_norm(part, ambient);
                w * n * n
            })
            .sum();
        Ok(sum.sqrt())
    } else {
        let sum: f64 = weights
            .iter()
            .zip(pp.parts())
            .map(|(w, part)| w * lp_norm(part, ambient).powf(p))
            .sum();
        Ok(sum.powf(1.0 / p))
    }
}

/// Componentwise difference of two product points.
pub fn product_sub(a: &ProductPoint, b: &ProductPoint) -> Result<ProductPoint, SpaceError> {
    if a.n() != b.n() {
        return Err(SpaceError::LengthMismatch {
            weights: a.n(),
            parts: b.n(),
        });
    }
    ProductPoint::new(
        a.parts()
            .iter()
            .zip(b.parts())
            .map(|(x, y)| x.sub(y))
            .collect(),
    )
}

/// True iff `||v - center||_p <= radius + slack`.
pub fn in_ball(v: &SeqVec, dom: &BallDomain, slack: f64) -> bool {
    v.dim() == dom.dim() && lp_dist(v, dom.center(), dom.p()) <= dom.radius() + slack
}
