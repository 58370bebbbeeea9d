//! Derivation operators, the two Galois closure operators, and a fixed-point
//! driver for monotone operators on finite powersets.
//!
//! Object and attribute sets are positional: they hold indices into the
//! context's name lists and carry the size of the universe they live in, so a
//! set built for one context cannot silently be applied to a differently
//! shaped one.

use std::fmt;

use thiserror::Error;

use crate::bitset::{self, BitSet};
use crate::context::FormalContext;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaloisError {
    #[error("index {index} out of range for universe of size {universe}")]
    IndexOutOfRange { index: usize, universe: usize },
    #[error("set over a universe of size {found} used with a context expecting {expected}")]
    UniverseMismatch { expected: usize, found: usize },
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("operator not inflationary/monotone: no fixed point after {steps} changing steps (universe size {universe})")]
    NotInflationary { steps: usize, universe: usize },
}

macro_rules! index_set {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, Hash)]
        pub struct $name(BitSet);

        impl $name {
            pub fn empty(universe: usize) -> Self {
                $name(BitSet::new(universe))
            }

            pub fn full(universe: usize) -> Self {
                $name(BitSet::full(universe))
            }

            pub fn from_indices<I>(universe: usize, indices: I) -> Result<Self, GaloisError>
            where
                I: IntoIterator<Item = usize>,
            {
                BitSet::from_indices(universe, indices)
                    .map($name)
                    .map_err(|index| GaloisError::IndexOutOfRange { index, universe })
            }

            pub fn from_bits(bits: BitSet) -> Self {
                $name(bits)
            }

            pub fn bits(&self) -> &BitSet {
                &self.0
            }

            pub fn into_bits(self) -> BitSet {
                self.0
            }

            pub fn universe(&self) -> usize {
                self.0.universe()
            }

            pub fn len(&self) -> usize {
                self.0.count()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn contains(&self, index: usize) -> bool {
                self.0.contains(index)
            }

            /// Panics if `index` is outside the universe.
            pub fn insert(&mut self, index: usize) -> bool {
                self.0.insert(index)
            }

            pub fn iter(&self) -> bitset::Iter<'_> {
                self.0.iter()
            }

            pub fn is_subset(&self, other: &Self) -> bool {
                self.0.is_subset(&other.0)
            }

            pub fn intersection(&self, other: &Self) -> Self {
                $name(self.0.intersection(&other.0))
            }

            pub fn union(&self, other: &Self) -> Self {
                $name(self.0.union(&other.0))
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_set().entries(self.0.iter()).finish()
            }
        }

        impl<'a> IntoIterator for &'a $name {
            type Item = usize;
            type IntoIter = bitset::Iter<'a>;

            fn into_iter(self) -> Self::IntoIter {
                self.0.iter()
            }
        }
    };
}

index_set!(
    /// A set of object positions.
    ObjectSet
);
index_set!(
    /// A set of attribute positions.
    AttributeSet
);

fn check_universe(expected: usize, found: usize) -> Result<(), GaloisError> {
    if expected == found {
        Ok(())
    } else {
        Err(GaloisError::UniverseMismatch { expected, found })
    }
}

pub(crate) fn intent_bits(ctx: &FormalContext, objects: &BitSet) -> BitSet {
    let mut out = BitSet::full(ctx.attribute_count());
    for i in objects {
        out.intersect_with(ctx.row(i));
    }
    out
}

pub(crate) fn extent_bits(ctx: &FormalContext, attributes: &BitSet) -> BitSet {
    let mut out = BitSet::full(ctx.object_count());
    for j in attributes {
        out.intersect_with(ctx.column(j));
    }
    out
}

pub(crate) fn closure_bits(ctx: &FormalContext, attributes: &BitSet) -> BitSet {
    intent_bits(ctx, &extent_bits(ctx, attributes))
}

/// Attributes shared by every object in `objects`; all attributes for the
/// empty set.
pub fn derive_intent(ctx: &FormalContext, objects: &ObjectSet) -> Result<AttributeSet, GaloisError> {
    check_universe(ctx.object_count(), objects.universe())?;
    Ok(AttributeSet(intent_bits(ctx, objects.bits())))
}

/// Objects having every attribute in `attributes`; all objects for the empty
/// set.
pub fn derive_extent(ctx: &FormalContext, attributes: &AttributeSet) -> Result<ObjectSet, GaloisError> {
    check_universe(ctx.attribute_count(), attributes.universe())?;
    Ok(ObjectSet(extent_bits(ctx, attributes.bits())))
}

/// `Y ↦ Y''` on attribute sets.
pub fn closure_intent(ctx: &FormalContext, attributes: &AttributeSet) -> Result<AttributeSet, GaloisError> {
    check_universe(ctx.attribute_count(), attributes.universe())?;
    Ok(AttributeSet(closure_bits(ctx, attributes.bits())))
}

/// `X ↦ X''` on object sets.
pub fn closure_extent(ctx: &FormalContext, objects: &ObjectSet) -> Result<ObjectSet, GaloisError> {
    check_universe(ctx.object_count(), objects.universe())?;
    Ok(ObjectSet(extent_bits(ctx, &intent_bits(ctx, objects.bits()))))
}

pub fn object_set<S: AsRef<str>>(ctx: &FormalContext, names: &[S]) -> Result<ObjectSet, GaloisError> {
    let mut set = ObjectSet::empty(ctx.object_count());
    for name in names {
        let name = name.as_ref();
        let i = ctx
            .object_index(name)
            .ok_or_else(|| GaloisError::UnknownName(name.to_string()))?;
        set.insert(i);
    }
    Ok(set)
}

pub fn attribute_set<S: AsRef<str>>(ctx: &FormalContext, names: &[S]) -> Result<AttributeSet, GaloisError> {
    let mut set = AttributeSet::empty(ctx.attribute_count());
    for name in names {
        let name = name.as_ref();
        let j = ctx
            .attribute_index(name)
            .ok_or_else(|| GaloisError::UnknownName(name.to_string()))?;
        set.insert(j);
    }
    Ok(set)
}

pub fn object_names<'c>(ctx: &'c FormalContext, set: &ObjectSet) -> Vec<&'c str> {
    set.iter().map(|i| ctx.objects()[i].as_str()).collect()
}

pub fn attribute_names<'c>(ctx: &'c FormalContext, set: &AttributeSet) -> Vec<&'c str> {
    set.iter().map(|j| ctx.attributes()[j].as_str()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KleeneOutcome<S> {
    pub value: S,
    /// Number of operator applications that changed the set.
    pub steps: usize,
}

/// Iterates `S ← op(S)` from `seed` until `op(S) = S`.
///
/// For an inflationary monotone operator every changing step adds at least one
/// element, so more than `universe_size` changing steps means the operator
/// breaks that contract.
pub fn kleene_fixed_point<S, F>(
    mut op: F,
    seed: S,
    universe_size: usize,
) -> Result<KleeneOutcome<S>, GaloisError>
where
    S: PartialEq,
    F: FnMut(&S) -> S,
{
    let mut current = seed;
    let mut steps = 0;
    loop {
        let next = op(&current);
        if next == current {
            return Ok(KleeneOutcome {
                value: current,
                steps,
            });
        }
        steps += 1;
        if steps > universe_size {
            return Err(GaloisError::NotInflationary {
                steps,
                universe: universe_size,
            });
        }
        current = next;
    }
}
