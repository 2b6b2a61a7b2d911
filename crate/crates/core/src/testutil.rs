//! Helpers shared by the unit tests of several modules.

use crate::bundle::{parse_bundle, VectorBundle};
use crate::rat::rat;
use proptest::prelude::*;

/// Parses a bundle literal, panicking on bad input.
pub(crate) fn b(text: &str) -> VectorBundle {
    parse_bundle(text).unwrap_or_else(|e| panic!("bad bundle literal {:?}: {}", text, e))
}

prop_compose! {
    /// Random canonical bundle with up to `max_summands` raw parts, slopes
    /// with numerators in [-8, 8] and denominators up to 4.
    pub(crate) fn arb_bundle(max_summands: usize)
        (parts in prop::collection::vec((-8i64..=8, 1i64..=4, 1usize..=3), 0..=max_summands))
        -> VectorBundle
    {
        VectorBundle::from_summands(parts.into_iter().map(|(n, d, m)| (rat(n, d), m)))
    }
}

prop_compose! {
    /// Like [`arb_bundle`] but never zero.
    pub(crate) fn arb_nonzero_bundle(max_summands: usize)
        (first in (-8i64..=8, 1i64..=4, 1usize..=3),
         rest in prop::collection::vec((-8i64..=8, 1i64..=4, 1usize..=3), 0..max_summands))
        -> VectorBundle
    {
        let parts = std::iter::once(first).chain(rest);
        VectorBundle::from_summands(parts.map(|(n, d, m)| (rat(n, d), m)))
    }
}
