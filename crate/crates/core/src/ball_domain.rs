//! Finite-dimensional vectors under the max-norm, closed balls ordered by
//! reverse inclusion, and certified fixed-point iteration of contractions.
//!
//! A contraction `f` with Lipschitz constant `k < 1` lifts to the ball map
//! `T([x, r]) = [f(x), k·r]`. Iterating `T` from `[x0, ‖f(x0) − x0‖]` produces
//! an ascending chain of balls whose radii `kⁿ·r0` shrink geometrically, and
//! `kⁿ·r0 / (1 − k)` bounds the distance from the n-th center to the unique
//! fixed point.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Absolute slack added to floating-point comparisons.
pub const FP_SLACK: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BallError {
    #[error("vector must have at least one component")]
    EmptyVector,
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("radius must be finite and non-negative, got {0}")]
    InvalidRadius(f64),
    #[error("Lipschitz constant must lie in (0, 1), got {0}")]
    InvalidLipschitz(f64),
    #[error("tolerance must be finite and positive, got {0}")]
    InvalidTolerance(f64),
    #[error("max_iter must be at least 1")]
    ZeroIterations,
    #[error("every sample pair is degenerate (x = y)")]
    DegenerateSamples,
    #[error("empty ball sequence")]
    EmptySequence,
    #[error("sequence is not ascending at index {index}: radius grows from {from} to {to}")]
    NotAscending { index: usize, from: f64, to: f64 },
    #[error("sequence is not Cauchy within tolerance {tol}")]
    NotCauchy { tol: f64 },
    #[error("no convergence after {steps} evaluations: a-priori bound still {last_bound:e}")]
    NotConverged {
        steps: usize,
        last_bound: f64,
        last: Vector,
    },
}

/// The norms available for vectors. Only the max-norm is supported; its balls
/// are axis-aligned squares, which is what makes origin-centered balls nest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    #[default]
    Max,
}

#[derive(Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(components: Vec<f64>) -> Result<Self, BallError> {
        if components.is_empty() {
            return Err(BallError::EmptyVector);
        }
        if let Some(&bad) = components.iter().find(|c| !c.is_finite()) {
            return Err(BallError::NonFinite(bad));
        }
        Ok(Vector(components))
    }

    pub fn zeros(dim: usize) -> Result<Self, BallError> {
        Vector::new(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self, kind: Norm) -> f64 {
        norm(self, kind)
    }

    fn check_dim(&self, other: &Vector) -> Result<(), BallError> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(BallError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            })
        }
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector, BallError> {
        self.check_dim(other)?;
        Vector::new(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Vector) -> Result<Vector, BallError> {
        self.check_dim(other)?;
        Vector::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, factor: f64) -> Result<Vector, BallError> {
        Vector::new(self.0.iter().map(|c| c * factor).collect())
    }

    /// Componentwise modulus `|x|`.
    pub fn abs(&self) -> Vector {
        Vector(self.0.iter().map(|c| c.abs()).collect())
    }

    pub fn distance(&self, other: &Vector, kind: Norm) -> Result<f64, BallError> {
        Ok(norm(&self.sub(other)?, kind))
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Vector").field(&self.0).finish()
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

pub fn norm(v: &Vector, kind: Norm) -> f64 {
    match kind {
        Norm::Max => v.0.iter().fold(0.0, |m, c| m.max(c.abs())),
    }
}

/// Closed ball `[center, radius]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vector,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vector, radius: f64) -> Result<Self, BallError> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(BallError::InvalidRadius(radius));
        }
        Ok(Ball { center, radius })
    }

    pub fn at_origin(dim: usize, radius: f64) -> Result<Self, BallError> {
        Ball::new(Vector::zeros(dim)?, radius)
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, point: &Vector, kind: Norm) -> Result<bool, BallError> {
        Ok(self.center.distance(point, kind)? <= self.radius)
    }
}

/// Reverse-inclusion order: the bigger ball is the smaller element.
pub fn ball_leq(a: &Ball, b: &Ball) -> Result<bool, BallError> {
    a.center.check_dim(&b.center)?;
    Ok(a.radius >= b.radius)
}

/// A dimension-homogeneous sequence of balls.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BallSequence {
    items: Vec<Ball>,
}

impl BallSequence {
    pub fn new(items: Vec<Ball>) -> Result<Self, BallError> {
        if let Some(first) = items.first() {
            for b in &items[1..] {
                first.center.check_dim(&b.center)?;
            }
        }
        Ok(BallSequence { items })
    }

    pub fn items(&self) -> &[Ball] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn last(&self) -> Option<&Ball> {
        self.items.last()
    }

    pub fn map<F>(&self, f: F) -> Result<BallSequence, BallError>
    where
        F: Fn(&Ball) -> Result<Ball, BallError>,
    {
        BallSequence::new(self.items.iter().map(f).collect::<Result<_, _>>()?)
    }
}

type VectorMap = dyn Fn(&Vector) -> Vector + Send + Sync;

/// A dimension-preserving map together with its claimed Lipschitz constant.
#[derive(Clone)]
pub struct ContractionSpec {
    dim: usize,
    k: f64,
    map: Arc<VectorMap>,
}

impl fmt::Debug for ContractionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContractionSpec")
            .field("dim", &self.dim)
            .field("k", &self.k)
            .finish_non_exhaustive()
    }
}

impl ContractionSpec {
    pub fn new<F>(dim: usize, k: f64, map: F) -> Result<Self, BallError>
    where
        F: Fn(&Vector) -> Vector + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(BallError::EmptyVector);
        }
        if !(k > 0.0 && k < 1.0) {
            return Err(BallError::InvalidLipschitz(k));
        }
        let spec = ContractionSpec {
            dim,
            k,
            map: Arc::new(map),
        };
        #[cfg(debug_assertions)]
        spec.warn_if_constant_too_small();
        Ok(spec)
    }

    /// `x ↦ k·x`, whose only fixed point is the origin.
    pub fn scaling(dim: usize, k: f64) -> Result<Self, BallError> {
        ContractionSpec::new(dim, k, move |x: &Vector| {
            Vector(x.components().iter().map(|c| c * k).collect())
        })
    }

    #[cfg(debug_assertions)]
    fn warn_if_constant_too_small(&self) {
        let probe = |seed: f64| {
            Vector(
                (0..self.dim)
                    .map(|i| seed * ((i as f64 + 1.0) * 0.7).sin())
                    .collect(),
            )
        };
        let pairs: Vec<(Vector, Vector)> = [(1.0, -1.0), (0.5, 2.0), (-3.0, 0.25), (10.0, 9.0)]
            .iter()
            .map(|&(a, b)| (probe(a), probe(b)))
            .collect();
        if let Ok(est) = estimate_lipschitz(|x| (self.map)(x), &pairs) {
            if est > self.k + FP_SLACK {
                log::warn!(
                    "sampled Lipschitz estimate {est} exceeds the declared constant {}",
                    self.k
                );
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector, BallError> {
        if x.dim() != self.dim {
            return Err(BallError::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        let y = (self.map)(x);
        if y.dim() != self.dim {
            return Err(BallError::DimensionMismatch {
                expected: self.dim,
                found: y.dim(),
            });
        }
        Vector::new(y.0)
    }
}

/// The ball map `[x, r] ↦ [f(x), k·r]`.
pub fn lift_map(spec: &ContractionSpec) -> impl Fn(&Ball) -> Result<Ball, BallError> + '_ {
    move |ball| Ball::new(spec.apply(&ball.center)?, spec.k * ball.radius)
}

/// Largest observed ratio `‖f(x) − f(y)‖ / ‖x − y‖` over the sample pairs.
///
/// This is a lower bound on the true Lipschitz constant.
pub fn estimate_lipschitz<F>(map: F, samples: &[(Vector, Vector)]) -> Result<f64, BallError>
where
    F: Fn(&Vector) -> Vector,
{
    let mut best: Option<f64> = None;
    for (x, y) in samples {
        let dx = x.distance(y, Norm::Max)?;
        if dx == 0.0 {
            continue;
        }
        let dy = map(x).distance(&map(y), Norm::Max)?;
        let ratio = dy / dx;
        best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
    }
    best.ok_or(BallError::DegenerateSamples)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    pub fixed_point: Vector,
    /// `[x_n, kⁿ·r0]` for n = 0 up to the stopping step.
    pub iterates: BallSequence,
    /// A-priori error bound `kⁿ·r0 / (1 − k)` at each iterate.
    pub bounds: Vec<f64>,
    pub certified_bound: f64,
    /// Number of map evaluations.
    pub steps: usize,
    pub k: f64,
    pub r0: f64,
}

/// Banach iteration `x_{n+1} = f(x_n)` stopped by the a-priori bound.
///
/// Returns the first iterate `x_n` whose bound `kⁿ·r0 / (1 − k)` is at most
/// `tol`, where `r0 = ‖x1 − x0‖`. At most `max_iter` evaluations of `f` are
/// made.
pub fn iterate_fixed_point(
    spec: &ContractionSpec,
    x0: &Vector,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointReport, BallError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(BallError::InvalidTolerance(tol));
    }
    if max_iter == 0 {
        return Err(BallError::ZeroIterations);
    }
    let k = spec.k;
    let mut current = x0.clone();
    let mut next = spec.apply(&current)?;
    let r0 = next.distance(&current, Norm::Max)?;

    let mut balls = Vec::new();
    let mut bounds = Vec::new();
    for n in 0usize.. {
        // map evaluations so far
        let steps = n + 1;
        let radius = r0 * k.powi(n.min(i32::MAX as usize) as i32);
        let bound = radius / (1.0 - k);
        balls.push(Ball::new(current.clone(), radius)?);
        bounds.push(bound);
        if bound <= tol {
            return Ok(FixedPointReport {
                fixed_point: current,
                iterates: BallSequence { items: balls },
                bounds,
                certified_bound: bound,
                steps,
                k,
                r0,
            });
        }
        if steps >= max_iter {
            return Err(BallError::NotConverged {
                steps,
                last_bound: bound,
                last: current,
            });
        }
        current = std::mem::replace(&mut next, Vector(Vec::new()));
        next = spec.apply(&current)?;
    }
    unreachable!()
}

fn radii_non_increasing(seq: &BallSequence) -> Result<(), BallError> {
    for (i, w) in seq.items.windows(2).enumerate() {
        let (from, to) = (w[0].radius, w[1].radius);
        if to > from + FP_SLACK * from.max(1.0) {
            return Err(BallError::NotAscending {
                index: i + 1,
                from,
                to,
            });
        }
    }
    Ok(())
}

/// Smallest index `N` such that all centers from `N` on lie within `tol` of
/// each other (max-norm diameter of the tail).
pub fn stabilization_index(seq: &BallSequence, tol: f64) -> Option<usize> {
    let dim = seq.items.first()?.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    let mut index = seq.len();
    for (n, ball) in seq.items.iter().enumerate().rev() {
        for (d, &c) in ball.center.components().iter().enumerate() {
            lo[d] = lo[d].min(c);
            hi[d] = hi[d].max(c);
        }
        let diameter = lo.iter().zip(&hi).fold(0.0f64, |m, (l, h)| m.max(h - l));
        if diameter > tol + FP_SLACK {
            break;
        }
        index = n;
    }
    Some(index)
}

/// Finite-sample Cauchy test: radii never grow, and the tail of centers that
/// stays within `tol` of itself has at least two members (or the sequence is
/// a single ball).
pub fn is_cauchy(seq: &BallSequence, tol: f64) -> Result<bool, BallError> {
    if seq.is_empty() {
        return Err(BallError::EmptySequence);
    }
    if seq.len() == 1 {
        return Ok(true);
    }
    if radii_non_increasing(seq).is_err() {
        return Ok(false);
    }
    let n = stabilization_index(seq, tol).unwrap_or(seq.len());
    Ok(n + 2 <= seq.len())
}

/// Least upper bound of an ascending Cauchy chain of balls.
///
/// The center is the last center. The radius is the infimum of the radii,
/// extrapolated to 0 when the radii have fallen below `tol` or decay with a
/// constant ratio below 1 (geometric decay has limit 0).
pub fn lub_of_ascending(seq: &BallSequence, tol: f64) -> Result<Ball, BallError> {
    let last = seq.last().ok_or(BallError::EmptySequence)?;
    radii_non_increasing(seq)?;
    if !is_cauchy(seq, tol)? {
        return Err(BallError::NotCauchy { tol });
    }
    let radii: Vec<f64> = seq.items.iter().map(|b| b.radius).collect();
    let inf = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let geometric = match radii.as_slice() {
        [.., a, b, c] if *a > 0.0 && *b > 0.0 && c < b && b < a => {
            let (q1, q2) = (b / a, c / b);
            (q1 - q2).abs() <= 1e-9 * q1.max(q2)
        }
        _ => false,
    };
    let radius = if inf <= tol || geometric { 0.0 } else { inf };
    Ball::new(last.center.clone(), radius)
}
