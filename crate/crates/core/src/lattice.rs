//! Concept enumeration in lectic order, the concept lattice with its Hasse
//! covers, and the closed-itemset view of a context.
//!
//! Attributes are ordered by position. For two attribute sets the lectically
//! smaller one is the one missing the smallest index at which they differ, so
//! `∅` comes first and the full attribute set last.

use thiserror::Error;

use crate::bitset::BitSet;
use crate::context::FormalContext;
use crate::galois::{
    closure_bits, closure_intent, derive_extent, derive_intent, extent_bits, intent_bits,
    AttributeSet, GaloisError, ObjectSet,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error("attribute set {0:?} is not closed")]
    NotClosed(AttributeSet),
    #[error("generators do not determine a concept: extent closure {extent:?} and intent closure {intent:?} disagree")]
    InconsistentGenerators { extent: ObjectSet, intent: AttributeSet },
}

/// An extent/intent pair closed under the derivation operators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Concept {
    pub extent: ObjectSet,
    pub intent: AttributeSet,
}

impl Concept {
    /// The concept whose intent is the closure of `attributes`.
    pub fn from_intent(ctx: &FormalContext, attributes: &AttributeSet) -> Result<Self, GaloisError> {
        let extent = derive_extent(ctx, attributes)?;
        let intent = derive_intent(ctx, &extent)?;
        Ok(Concept { extent, intent })
    }

    pub fn is_valid(&self, ctx: &FormalContext) -> bool {
        derive_intent(ctx, &self.extent).is_ok_and(|i| i == self.intent)
            && derive_extent(ctx, &self.intent).is_ok_and(|e| e == self.extent)
    }
}

/// Lectic successor of a closed attribute set; `None` as input means "before
/// the first", `None` as output means `current` was the last closed set.
pub fn next_closure(
    ctx: &FormalContext,
    current: Option<&AttributeSet>,
) -> Result<Option<AttributeSet>, LatticeError> {
    let m = ctx.attribute_count();
    let Some(current) = current else {
        return Ok(Some(AttributeSet::from_bits(closure_bits(ctx, &BitSet::new(m)))));
    };
    if closure_intent(ctx, current)? != *current {
        return Err(LatticeError::NotClosed(current.clone()));
    }
    Ok(next_closed_bits(ctx, current.bits()).map(AttributeSet::from_bits))
}

fn next_closed_bits(ctx: &FormalContext, current: &BitSet) -> Option<BitSet> {
    let mut prefix = current.clone();
    for i in (0..ctx.attribute_count()).rev() {
        if prefix.remove(i) {
            continue;
        }
        let mut candidate = prefix.clone();
        candidate.insert(i);
        let closed = closure_bits(ctx, &candidate);
        // no attribute below i may be gained
        if closed.first_difference(&prefix) == Some(i) {
            return Some(closed);
        }
    }
    None
}

/// Iterator over closed attribute sets in lectic order.
pub struct ClosedSets<'c> {
    ctx: &'c FormalContext,
    next: Option<BitSet>,
}

impl Iterator for ClosedSets<'_> {
    type Item = AttributeSet;

    fn next(&mut self) -> Option<AttributeSet> {
        let current = self.next.take()?;
        self.next = next_closed_bits(self.ctx, &current);
        Some(AttributeSet::from_bits(current))
    }
}

pub fn closed_sets(ctx: &FormalContext) -> ClosedSets<'_> {
    ClosedSets {
        ctx,
        next: Some(closure_bits(ctx, &BitSet::new(ctx.attribute_count()))),
    }
}

/// All concepts, sorted lectically by intent.
pub fn enumerate_concepts(ctx: &FormalContext) -> Vec<Concept> {
    closed_sets(ctx)
        .map(|intent| Concept {
            extent: ObjectSet::from_bits(extent_bits(ctx, intent.bits())),
            intent,
        })
        .collect()
}

/// Closed itemsets of the context read as transactions × items; a
/// many-valued context is binarized with [`crate::context::threshold`] first.
pub fn closed_itemsets(ctx: &FormalContext) -> Vec<AttributeSet> {
    closed_sets(ctx).collect()
}

pub fn smallest_closed_containing(
    ctx: &FormalContext,
    items: &AttributeSet,
) -> Result<AttributeSet, GaloisError> {
    closure_intent(ctx, items)
}

pub fn is_subconcept(lower: &Concept, upper: &Concept) -> bool {
    lower.extent.is_subset(&upper.extent)
}

pub fn meet(ctx: &FormalContext, a: &Concept, b: &Concept) -> Concept {
    let extent = a.extent.intersection(&b.extent);
    let intent = AttributeSet::from_bits(intent_bits(ctx, extent.bits()));
    Concept { extent, intent }
}

pub fn join(ctx: &FormalContext, a: &Concept, b: &Concept) -> Concept {
    let intent = a.intent.intersection(&b.intent);
    let extent = ObjectSet::from_bits(extent_bits(ctx, intent.bits()));
    Concept { extent, intent }
}

/// The concept generated by an object set and an attribute set: the extent
/// closure of `objects` paired with the intent closure of `attributes`, which
/// must describe the same concept.
pub fn concept_generated_by(
    ctx: &FormalContext,
    objects: &ObjectSet,
    attributes: &AttributeSet,
) -> Result<Concept, LatticeError> {
    let extent = crate::galois::closure_extent(ctx, objects)?;
    let intent = closure_intent(ctx, attributes)?;
    if derive_intent(ctx, &extent)? != intent {
        return Err(LatticeError::InconsistentGenerators { extent, intent });
    }
    Ok(Concept { extent, intent })
}

/// All concepts of a context with the covering relation of the subconcept
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptLattice {
    pub concepts: Vec<Concept>,
    /// `(lower, upper)` index pairs where `upper` covers `lower`.
    pub covers: Vec<(usize, usize)>,
    pub top: usize,
    pub bottom: usize,
}

impl ConceptLattice {
    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        is_subconcept(&self.concepts[a], &self.concepts[b])
    }

    pub fn index_of_intent(&self, intent: &AttributeSet) -> Option<usize> {
        self.concepts
            .binary_search_by(|c| c.intent.bits().lectic_cmp(intent.bits()))
            .ok()
    }

    pub fn upper_covers(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.covers.iter().filter(move |&&(l, _)| l == a).map(|&(_, u)| u)
    }
}

pub fn build_lattice(ctx: &FormalContext) -> ConceptLattice {
    let concepts = enumerate_concepts(ctx);
    let n = concepts.len();

    // strict upper sets, then keep only their minimal elements
    let mut covers = Vec::new();
    for a in 0..n {
        let uppers: Vec<usize> = (0..n)
            .filter(|&b| b != a && concepts[a].extent.is_subset(&concepts[b].extent))
            .collect();
        for &b in &uppers {
            let implied = uppers
                .iter()
                .any(|&c| c != b && concepts[c].extent.is_subset(&concepts[b].extent));
            if !implied {
                covers.push((a, b));
            }
        }
    }

    let by_extent = |pick_max: bool| {
        (0..n)
            .max_by_key(|&i| {
                let size = concepts[i].extent.len();
                if pick_max {
                    size as isize
                } else {
                    -(size as isize)
                }
            })
            .unwrap_or(0)
    };
    let top = by_extent(true);
    let bottom = by_extent(false);

    ConceptLattice {
        concepts,
        covers,
        top,
        bottom,
    }
}
