//! Graded closed itemsets and graded concepts of a many-valued context.
//!
//! Every cell (object `i`, attribute `j`) whose degree reaches the threshold
//! becomes the point `(i, j)` of the plane, with 1-based indices. The grade of
//! a set of cells is the radius of the smallest origin-centered max-norm ball
//! containing them. Origin-centered max-norm balls are squares anchored at the
//! origin, so the balls of any family of grades are nested.

use thiserror::Error;

use crate::ball_domain::{
    iterate_fixed_point, norm, Ball, BallError, ContractionSpec, FixedPointReport, Norm, Vector,
};
use crate::context::{check_theta, threshold, ContextError, FormalContext, ManyValuedContext};
use crate::galois::{closure_intent, extent_bits, AttributeSet, GaloisError, ObjectSet};
use crate::lattice::{enumerate_concepts, Concept};

/// Threshold at which the worked health-center example builds its lattice.
pub const EXAMPLE_THETA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GradedError {
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error("undefined grade: no qualifying cells for the {0}")]
    UndefinedGrade(&'static str),
    #[error("all entries are zero; no contraction constant can be chosen")]
    AllZero,
}

/// A selected cell of a many-valued context placed in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPoint {
    /// 1-based.
    pub object_index: usize,
    /// 1-based.
    pub attribute_index: usize,
    pub membership: f64,
    pub point: Vector,
}

pub fn embed_cells(mv: &ManyValuedContext, theta: f64) -> Result<Vec<CellPoint>, GradedError> {
    check_theta(theta)?;
    let mut cells = Vec::new();
    for (i, row) in mv.values().iter().enumerate() {
        for (j, &membership) in row.iter().enumerate() {
            if membership >= theta {
                cells.push(CellPoint {
                    object_index: i + 1,
                    attribute_index: j + 1,
                    membership,
                    point: Vector::new(vec![(i + 1) as f64, (j + 1) as f64])?,
                });
            }
        }
    }
    Ok(cells)
}

/// The smallest origin-centered ball containing every point.
pub fn least_enclosing_origin_ball(points: &[Vector], kind: Norm) -> Result<Ball, GradedError> {
    let first = points.first().ok_or(GradedError::UndefinedGrade("point set"))?;
    let mut radius = 0.0f64;
    for p in points {
        if p.dim() != first.dim() {
            return Err(BallError::DimensionMismatch {
                expected: first.dim(),
                found: p.dim(),
            }
            .into());
        }
        radius = radius.max(norm(p, kind));
    }
    Ok(Ball::at_origin(first.dim(), radius)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedItemset {
    pub items: AttributeSet,
    pub ball: Ball,
    pub grade: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedConcept {
    pub concept: Concept,
    pub extent_ball: Ball,
    pub intent_ball: Ball,
}

impl GradedConcept {
    /// Intent grade.
    pub fn r(&self) -> f64 {
        self.intent_ball.radius
    }

    /// Extent grade.
    pub fn s(&self) -> f64 {
        self.extent_ball.radius
    }
}

/// A concept at least one of whose grades is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct UngradedConcept {
    pub concept: Concept,
    pub r: Option<f64>,
    pub s: Option<f64>,
}

/// Thresholded context plus its selected cells, shared by the grading
/// operations.
struct Grader {
    ctx: FormalContext,
    cells: Vec<CellPoint>,
}

impl Grader {
    fn new(mv: &ManyValuedContext, theta: f64) -> Result<Self, GradedError> {
        Ok(Grader {
            ctx: threshold(mv, theta)?,
            cells: embed_cells(mv, theta)?,
        })
    }

    fn ball_where<F>(&self, keep: F) -> Option<Ball>
    where
        F: Fn(&CellPoint) -> bool,
    {
        let points: Vec<Vector> = self
            .cells
            .iter()
            .filter(|c| keep(c))
            .map(|c| c.point.clone())
            .collect();
        least_enclosing_origin_ball(&points, Norm::Max).ok()
    }

    fn intent_ball(&self, items: &AttributeSet) -> Option<Ball> {
        self.ball_where(|c| items.contains(c.attribute_index - 1))
    }

    fn extent_ball(&self, objects: &ObjectSet) -> Option<Ball> {
        self.ball_where(|c| objects.contains(c.object_index - 1))
    }

    fn grade(&self, concept: Concept) -> Result<GradedConcept, UngradedConcept> {
        match (self.intent_ball(&concept.intent), self.extent_ball(&concept.extent)) {
            (Some(intent_ball), Some(extent_ball)) => Ok(GradedConcept {
                concept,
                extent_ball,
                intent_ball,
            }),
            (r, s) => Err(UngradedConcept {
                concept,
                r: r.map(|b| b.radius),
                s: s.map(|b| b.radius),
            }),
        }
    }
}

/// The closure of `items` on the thresholded context, graded by the cells of
/// its columns.
pub fn graded_closed_itemset(
    mv: &ManyValuedContext,
    theta: f64,
    items: &AttributeSet,
) -> Result<GradedItemset, GradedError> {
    let grader = Grader::new(mv, theta)?;
    let items = closure_intent(&grader.ctx, items)?;
    let ball = grader
        .intent_ball(&items)
        .ok_or(GradedError::UndefinedGrade("itemset"))?;
    Ok(GradedItemset {
        grade: ball.radius,
        items,
        ball,
    })
}

pub fn graded_concept(
    mv: &ManyValuedContext,
    theta: f64,
    items: &AttributeSet,
) -> Result<GradedConcept, GradedError> {
    let grader = Grader::new(mv, theta)?;
    let intent = closure_intent(&grader.ctx, items)?;
    let extent = ObjectSet::from_bits(extent_bits(&grader.ctx, intent.bits()));
    grader
        .grade(Concept { extent, intent })
        .map_err(|u| match (u.r, u.s) {
            (None, _) => GradedError::UndefinedGrade("intent"),
            _ => GradedError::UndefinedGrade("extent"),
        })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedLattice {
    pub theta: f64,
    /// The thresholded context the concepts belong to.
    pub context: FormalContext,
    /// Sorted by `(r, s)`, ties broken by lectic intent order.
    pub entries: Vec<GradedConcept>,
    /// Concepts with an empty cell set on either side, in lectic order.
    pub undefined: Vec<UngradedConcept>,
    /// Distinct intent balls by increasing radius.
    pub chain: Vec<Ball>,
}

impl GradedLattice {
    pub fn max_radius(&self) -> Option<f64> {
        self.chain.last().map(|b| b.radius)
    }

    pub fn concept_count(&self) -> usize {
        self.entries.len() + self.undefined.len()
    }

    /// Every ball in the chain contains its predecessor.
    pub fn is_nested(&self) -> bool {
        self.chain.windows(2).all(|w| {
            w[0].radius <= w[1].radius
                && w[1].center.distance(&w[0].center, Norm::Max).unwrap_or(f64::INFINITY) + w[0].radius
                    <= w[1].radius
        })
    }
}

pub fn graded_lattice(mv: &ManyValuedContext, theta: f64) -> Result<GradedLattice, GradedError> {
    let grader = Grader::new(mv, theta)?;
    let mut entries = Vec::new();
    let mut undefined = Vec::new();
    // enumeration is lectic, so a stable sort keeps lectic order within ties
    for concept in enumerate_concepts(&grader.ctx) {
        match grader.grade(concept) {
            Ok(g) => entries.push(g),
            Err(u) => undefined.push(u),
        }
    }
    entries.sort_by(|a, b| a.r().total_cmp(&b.r()).then(a.s().total_cmp(&b.s())));

    let mut chain: Vec<Ball> = Vec::new();
    let mut radii: Vec<f64> = entries
        .iter()
        .map(GradedConcept::r)
        .chain(undefined.iter().filter_map(|u| u.r))
        .collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    for r in radii {
        chain.push(Ball::at_origin(2, r)?);
    }

    Ok(GradedLattice {
        theta,
        context: grader.ctx,
        entries,
        undefined,
        chain,
    })
}

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub cell: CellPoint,
    pub report: FixedPointReport,
}

#[derive(Debug, Clone)]
pub struct ExampleReport {
    /// Smallest strictly positive degree, used as the contraction constant.
    pub k: f64,
    /// `(x, y) ↦ (k·x, k·y)`.
    pub contraction: ContractionSpec,
    /// One iteration per cell of the context.
    pub runs: Vec<SeedRun>,
    pub lattice: GradedLattice,
}

impl ExampleReport {
    /// The run seeded farthest from the origin.
    pub fn farthest_run(&self) -> Option<&SeedRun> {
        self.runs.iter().max_by(|a, b| {
            norm(&a.cell.point, Norm::Max)
                .total_cmp(&norm(&b.cell.point, Norm::Max))
                .then(a.cell.object_index.cmp(&b.cell.object_index))
        })
    }
}

/// Contraction `k·x` with `k` the smallest positive degree, iterated from
/// every cell, plus the graded lattice at [`EXAMPLE_THETA`].
pub fn reproduce_example(
    mv: &ManyValuedContext,
    tol: f64,
    max_iter: usize,
) -> Result<ExampleReport, GradedError> {
    let k = mv.min_positive().ok_or(GradedError::AllZero)?;
    let contraction = ContractionSpec::scaling(2, k)?;
    let mut runs = Vec::new();
    for cell in embed_cells(mv, 0.0)? {
        let report = iterate_fixed_point(&contraction, &cell.point, tol, max_iter)?;
        debug_assert!(norm(&report.fixed_point, Norm::Max) <= report.certified_bound + tol);
        runs.push(SeedRun { cell, report });
    }
    let lattice = graded_lattice(mv, EXAMPLE_THETA)?;
    debug_assert!(lattice.is_nested());
    debug_assert!(lattice
        .entries
        .iter()
        .all(|e| e.concept.is_valid(&lattice.context)));
    Ok(ExampleReport {
        k,
        contraction,
        runs,
        lattice,
    })
}
