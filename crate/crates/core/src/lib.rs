//! Exact decision procedures for short exact sequences of vector bundles
//! classified by Harder-Narasimhan data.
//!
//! Every bundle here is determined by its Harder-Narasimhan (HN) polygon,
//! so all questions about extensions reduce to exact combinatorics on
//! tuples of rational slopes. This crate implements that combinatorics:
//!
//! * [`polygon`]: rationally tuplar polygons (slope tuples with integral
//!   endpoints), dominance, concavity, upper hulls.
//! * [`bundle`]: the bundle model itself, a formal sum of stable bundles
//!   `O(d/r)`, with parsing, duals, pullbacks and slope truncations.
//! * [`permutation`]: the permutation criterion for a middle term, with a
//!   polynomial-time search, a brute-force oracle and witness normalization.
//! * [`extension`]: deciders for "is E an extension of D by F", from the
//!   semistable base cases up to the general recursion, plus enumeration of
//!   all middle terms.
//! * [`oracle`]: deterministic generators and a cross-check harness that
//!   replays the crate's invariants over generated instances.
//!
//! All arithmetic is exact; no floating point is used anywhere.

pub mod bundle;
pub mod extension;
pub mod oracle;
pub mod permutation;
pub mod polygon;
pub mod rat;
#[cfg(test)]
pub(crate) mod testutil;

pub use bundle::{bundle_from_polygon, parse_bundle, StableSlope, TruncateMode, VectorBundle};
pub use extension::{
    decide, decide_semistable_case, decide_ss_pair, decide_with, enumerate_intermediates,
    enumerate_middle_terms, DecideOptions, Decider, ExtensionChain,
};
pub use oracle::{
    cross_check_report, cross_check_report_with, enumerate_bundles, random_bundle,
    random_bundle_from, random_triple, GenBounds, Report,
};
pub use permutation::{
    brute_force_e_permutation, find_e_permutation, is_e_permutation, sort_witness, CapExceeded,
    IndexPartition, Leniency, PermutationWitness,
};
pub use polygon::TuplarPolygon;
pub use rat::Rat;
