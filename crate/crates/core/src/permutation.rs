//! The permutation criterion for middle terms of extensions.
//!
//! Fix bundles `D`, `E`, `F` whose ranks and degrees add up. A candidate
//! witness is a rearrangement `P` of the HN slope tuple of `D ⊕ F` such
//! that
//!
//! 1. `P` dominates `HN(E)`, and
//! 2. the index set splits into `S_D` and `S_F` where the slopes over `S_D`
//!    permute `HN(D)` and sit on or below `HN(E)` index by index, and the
//!    slopes over `S_F` permute `HN(F)` and sit on or above `HN(E)`.
//!
//! Such a `P` certifies `E` as a plausible middle term of an extension of
//! `D` by `F`; when `D` or `F` is semistable the certificate is exact.
//!
//! [`find_e_permutation`] looks only for *sorted* witnesses (each of the two
//! parts laid out in decreasing order). Whenever any witness with a given
//! partition exists, the sorted rearrangement with the same partition is
//! also a witness, so the search over interleavings of the two sorted
//! tuples is complete; it runs in `O(rank(D) * rank(F))` states.
//! [`brute_force_e_permutation`] checks every distinct rearrangement and is
//! the oracle the fast search is tested against.
//!
//! Slope arithmetic is scaled to a common denominator and performed in
//! `i128` when it provably cannot overflow, with an arbitrary-precision
//! fallback otherwise. Both paths are exact.

use crate::bundle::VectorBundle;
use crate::polygon::TuplarPolygon;
use crate::rat::{format_rat, Rat};
use num_traits::Zero;
use serde_json::json;
use thiserror::Error;

/// Default cap on `rank(D ⊕ F)` for the brute-force search.
pub const BRUTE_FORCE_CAP: usize = 9;

/// How strictly the per-index slope conditions bind a value to a side.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Leniency {
    /// The conditions as stated: indices in `S_D` need `P_i <= HN(E)_i`,
    /// indices in `S_F` need `P_i >= HN(E)_i`.
    #[default]
    Strict,
    /// Slope values occurring in both `D` and `F` may join either side
    /// regardless of the inequality.
    SharedValues,
    /// Any value may join any side that contains it; only dominance and the
    /// multiset split remain.
    AnyValues,
}

/// A split of the witness indices (1-based) into the `D` part and `F` part.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IndexPartition {
    s_d: Vec<usize>,
    s_f: Vec<usize>,
}

impl IndexPartition {
    /// Stores both index sets in ascending order. Disjointness and coverage
    /// are checked by [`PermutationWitness::validates`], not here.
    pub fn new(mut s_d: Vec<usize>, mut s_f: Vec<usize>) -> Self {
        s_d.sort_unstable();
        s_f.sort_unstable();
        IndexPartition { s_d, s_f }
    }

    pub fn s_d(&self) -> &[usize] {
        &self.s_d
    }

    pub fn s_f(&self) -> &[usize] {
        &self.s_f
    }
}

/// A witness polygon with its index partition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PermutationWitness {
    pub polygon: TuplarPolygon,
    pub partition: IndexPartition,
    /// True when the slopes over `s_d` appear in `HN(D)` order and the
    /// slopes over `s_f` appear in `HN(F)` order.
    pub sorted: bool,
}

impl PermutationWitness {
    /// Full re-validation against a triple: rank and degree bookkeeping,
    /// partition shape, multiset split, per-index slope conditions for the
    /// given leniency, dominance, and the accuracy of the `sorted` flag.
    pub fn validates(
        &self,
        d: &VectorBundle,
        e: &VectorBundle,
        f: &VectorBundle,
        leniency: Leniency,
    ) -> bool {
        self.valid_ignoring_flag(d, e, f, leniency)
            && self.sorted
                == sorted_flag(
                    self.polygon.slopes(),
                    &self.partition,
                    d.hn_polygon().slopes(),
                    f.hn_polygon().slopes(),
                )
    }

    /// [`Self::validates`] without the `sorted` flag accuracy check.
    fn valid_ignoring_flag(
        &self,
        d: &VectorBundle,
        e: &VectorBundle,
        f: &VectorBundle,
        leniency: Leniency,
    ) -> bool {
        let n = e.rank();
        if d.rank() + f.rank() != n
            || d.degree() + f.degree() != e.degree()
            || self.polygon.len() != n
        {
            return false;
        }
        if self.partition.s_d.len() + self.partition.s_f.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &i in self.partition.s_d.iter().chain(&self.partition.s_f) {
            if i == 0 || i > n || seen[i - 1] {
                return false;
            }
            seen[i - 1] = true;
        }
        let hd = d.hn_polygon();
        let he = e.hn_polygon();
        let hf = f.hn_polygon();
        let p = self.polygon.slopes();
        if !self.polygon.dominates(&he) {
            return false;
        }
        let shared = |v: &Rat| hd.slopes().contains(v) && hf.slopes().contains(v);
        let part_ok = |part: &[usize], side: &TuplarPolygon, is_d: bool| {
            let mut got: Vec<&Rat> = part.iter().map(|&i| &p[i - 1]).collect();
            got.sort();
            let mut want: Vec<&Rat> = side.slopes().iter().collect();
            want.sort();
            if got != want {
                return false;
            }
            part.iter().all(|&i| {
                let v = &p[i - 1];
                let ineq = if is_d {
                    v <= &he.slopes()[i - 1]
                } else {
                    v >= &he.slopes()[i - 1]
                };
                match leniency {
                    Leniency::Strict => ineq,
                    Leniency::SharedValues => ineq || shared(v),
                    Leniency::AnyValues => true,
                }
            })
        };
        part_ok(&self.partition.s_d, &hd, true) && part_ok(&self.partition.s_f, &hf, false)
    }

    /// JSON form: slopes as reduced fraction strings, 1-based index sets.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "polygon": self.polygon.slopes().iter().map(format_rat).collect::<Vec<_>>(),
            "s_d": self.partition.s_d,
            "s_f": self.partition.s_f,
            "sorted": self.sorted,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("rank {rank} exceeds the brute-force cap {cap}")]
pub struct CapExceeded {
    pub rank: usize,
    pub cap: usize,
}

fn sorted_flag(p: &[Rat], partition: &IndexPartition, hd: &[Rat], hf: &[Rat]) -> bool {
    let d_ok = partition
        .s_d
        .iter()
        .zip(hd)
        .all(|(&i, want)| &p[i - 1] == want);
    let f_ok = partition
        .s_f
        .iter()
        .zip(hf)
        .all(|(&j, want)| &p[j - 1] == want);
    d_ok && f_ok
}

/// Tests whether `p` is a witness for `(D, E, F)` and returns a partition
/// certifying it. The partition is picked deterministically: per slope
/// value, forced indices first, then the earliest flexible indices fill the
/// `F` side.
///
/// Panics when the ranks or degrees of the triple do not add up.
pub fn is_e_permutation(
    p: &TuplarPolygon,
    d: &VectorBundle,
    e: &VectorBundle,
    f: &VectorBundle,
    leniency: Leniency,
) -> Option<IndexPartition> {
    assert_eq!(
        d.rank() + f.rank(),
        e.rank(),
        "rank mismatch: rank(D) + rank(F) != rank(E)"
    );
    assert_eq!(
        d.degree() + f.degree(),
        e.degree(),
        "degree mismatch: deg(D) + deg(F) != deg(E)"
    );
    if p.len() != e.rank() {
        return None;
    }
    let hd = d.hn_polygon();
    let he = e.hn_polygon();
    let hf = f.hn_polygon();
    let (s_d, s_f) = match engine::try_scale(&[p.slopes(), hd.slopes(), he.slopes(), hf.slopes()])
    {
        Some(scaled) => engine::check(&scaled[0], &scaled[1], &scaled[2], &scaled[3], leniency)?,
        None => engine::check(p.slopes(), hd.slopes(), he.slopes(), hf.slopes(), leniency)?,
    };
    Some(IndexPartition::new(
        s_d.into_iter().map(|i| i + 1).collect(),
        s_f.into_iter().map(|i| i + 1).collect(),
    ))
}

/// Searches for a sorted witness. Deterministic: of the two admissible
/// moves at each step the `F` side is preferred, so larger slopes are
/// placed as early as the constraints allow.
///
/// Returns `None` when ranks or degrees do not add up (no witness can
/// exist) or when no witness exists at all.
pub fn find_e_permutation(
    d: &VectorBundle,
    e: &VectorBundle,
    f: &VectorBundle,
) -> Option<PermutationWitness> {
    if d.rank() + f.rank() != e.rank() || d.degree() + f.degree() != e.degree() {
        return None;
    }
    let hd = d.hn_polygon();
    let he = e.hn_polygon();
    let hf = f.hn_polygon();
    let sides = match engine::try_scale(&[hd.slopes(), he.slopes(), hf.slopes()]) {
        Some(scaled) => engine::dp_search(&scaled[0], &scaled[1], &scaled[2]),
        None => engine::dp_search(hd.slopes(), he.slopes(), hf.slopes()),
    }?;
    let mut slopes = Vec::with_capacity(sides.len());
    let mut s_d = Vec::new();
    let mut s_f = Vec::new();
    let (mut a, mut b) = (0usize, 0usize);
    for (i, side) in sides.iter().enumerate() {
        match side {
            engine::Side::D => {
                slopes.push(hd.slopes()[a].clone());
                a += 1;
                s_d.push(i + 1);
            }
            engine::Side::F => {
                slopes.push(hf.slopes()[b].clone());
                b += 1;
                s_f.push(i + 1);
            }
        }
    }
    Some(PermutationWitness {
        polygon: TuplarPolygon::from_integral_slopes(slopes),
        partition: IndexPartition::new(s_d, s_f),
        sorted: true,
    })
}

/// Exhaustive oracle: enumerates every distinct rearrangement of the slopes
/// of `HN(D ⊕ F)` in ascending lexicographic order and returns the first
/// witness, using [`is_e_permutation`]'s conditions under `leniency`.
///
/// Fails with [`CapExceeded`] when `rank(D ⊕ F)` exceeds
/// [`BRUTE_FORCE_CAP`].
pub fn brute_force_e_permutation(
    d: &VectorBundle,
    e: &VectorBundle,
    f: &VectorBundle,
    leniency: Leniency,
) -> Result<Option<PermutationWitness>, CapExceeded> {
    brute_force_with_cap(d, e, f, leniency, BRUTE_FORCE_CAP)
}

/// [`brute_force_e_permutation`] with an explicit rank cap.
pub fn brute_force_with_cap(
    d: &VectorBundle,
    e: &VectorBundle,
    f: &VectorBundle,
    leniency: Leniency,
    cap: usize,
) -> Result<Option<PermutationWitness>, CapExceeded> {
    let n = d.rank() + f.rank();
    if n > cap {
        return Err(CapExceeded { rank: n, cap });
    }
    if n != e.rank() || d.degree() + f.degree() != e.degree() {
        return Ok(None);
    }
    let hd = d.hn_polygon();
    let he = e.hn_polygon();
    let hf = f.hn_polygon();
    // distinct slope values ascending, with multiplicities
    let mut all: Vec<Rat> = hd.slopes().iter().chain(hf.slopes()).cloned().collect();
    all.sort();
    let mut values: Vec<Rat> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for v in all {
        if values.last() == Some(&v) {
            *counts.last_mut().unwrap() += 1;
        } else {
            values.push(v);
            counts.push(1);
        }
    }
    let found = match engine::try_scale(&[&values, hd.slopes(), he.slopes(), hf.slopes()]) {
        Some(scaled) => engine::brute_lex(
            &scaled[0], &counts, &scaled[1], &scaled[2], &scaled[3], leniency,
        ),
        None => engine::brute_lex(
            &values,
            &counts,
            hd.slopes(),
            he.slopes(),
            hf.slopes(),
            leniency,
        ),
    };
    Ok(found.map(|(chosen, s_d, s_f)| {
        let slopes: Vec<Rat> = chosen.iter().map(|&vi| values[vi].clone()).collect();
        let partition = IndexPartition::new(
            s_d.into_iter().map(|i| i + 1).collect(),
            s_f.into_iter().map(|i| i + 1).collect(),
        );
        let sorted = sorted_flag(&slopes, &partition, hd.slopes(), hf.slopes());
        PermutationWitness {
            polygon: TuplarPolygon::from_integral_slopes(slopes),
            partition,
            sorted,
        }
    }))
}

/// Rearranges a valid strict witness into the sorted witness with the same
/// partition: the `s_d` positions receive `HN(D)` in order and the `s_f`
/// positions receive `HN(F)` in order. Whenever the input is valid, the
/// output is too.
///
/// Panics if the input witness does not validate in strict mode, or (never
/// expected) if the sorted rearrangement fails re-validation; the latter
/// would signal an implementation bug.
pub fn sort_witness(
    w: &PermutationWitness,
    d: &VectorBundle,
    e: &VectorBundle,
    f: &VectorBundle,
) -> PermutationWitness {
    assert!(
        w.valid_ignoring_flag(d, e, f, Leniency::Strict),
        "sort_witness precondition: input must be a valid strict witness"
    );
    let hd = d.hn_polygon();
    let hf = f.hn_polygon();
    let n = w.polygon.len();
    let mut slopes = vec![Rat::zero(); n];
    for (k, &i) in w.partition.s_d.iter().enumerate() {
        slopes[i - 1] = hd.slopes()[k].clone();
    }
    for (k, &j) in w.partition.s_f.iter().enumerate() {
        slopes[j - 1] = hf.slopes()[k].clone();
    }
    let out = PermutationWitness {
        polygon: TuplarPolygon::from_integral_slopes(slopes),
        partition: w.partition.clone(),
        sorted: true,
    };
    assert!(
        out.validates(d, e, f, Leniency::Strict),
        "internal inconsistency: sorted rearrangement failed re-validation"
    );
    out
}

/// Exact slope arithmetic, generic over `i128` (scaled to a common
/// denominator) and arbitrary-precision rationals.
mod engine {
    use super::Leniency;
    use crate::rat::Rat;
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{ToPrimitive, Zero};
    use std::collections::BTreeMap;

    pub(super) trait Num: Clone + Ord {
        fn zero() -> Self;
        fn plus(&self, other: &Self) -> Self;
    }

    impl Num for i128 {
        fn zero() -> Self {
            0
        }
        fn plus(&self, other: &Self) -> Self {
            self + other
        }
    }

    impl Num for Rat {
        fn zero() -> Self {
            <Rat as Zero>::zero()
        }
        fn plus(&self, other: &Self) -> Self {
            self + other
        }
    }

    #[derive(Clone, Copy, PartialEq, Eq, Debug)]
    pub(super) enum Side {
        D,
        F,
    }

    /// Rewrites the tuples over their common denominator as `i128`
    /// numerators, or `None` when that could overflow prefix-sum
    /// arithmetic.
    pub(super) fn try_scale(tuples: &[&[Rat]]) -> Option<Vec<Vec<i128>>> {
        let mut lcm = BigInt::from(1);
        for t in tuples {
            for x in *t {
                lcm = lcm.lcm(x.denom());
            }
        }
        let entries: usize = tuples.iter().map(|t| t.len()).sum::<usize>() + 2;
        let limit = i128::MAX / 4 / entries as i128;
        let mut out = Vec::with_capacity(tuples.len());
        for t in tuples {
            let mut v = Vec::with_capacity(t.len());
            for x in *t {
                let scaled: BigInt = x.numer() * (&lcm / x.denom());
                let value = scaled.to_i128()?;
                if value.checked_abs()? > limit {
                    return None;
                }
                v.push(value);
            }
            out.push(v);
        }
        Some(out)
    }

    fn prefixes<T: Num>(xs: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(xs.len() + 1);
        out.push(T::zero());
        for x in xs {
            out.push(out.last().unwrap().plus(x));
        }
        out
    }

    /// Depth-first search over interleavings of the two sorted tuples,
    /// preferring the `F` move, with dead states memoized. Returns the move
    /// sequence of the first witness found.
    pub(super) fn dp_search<T: Num>(hd: &[T], he: &[T], hf: &[T]) -> Option<Vec<Side>> {
        struct Dp<'a, T> {
            hd: &'a [T],
            he: &'a [T],
            hf: &'a [T],
            pd: Vec<T>,
            pe: Vec<T>,
            pf: Vec<T>,
            dead: Vec<bool>,
            width: usize,
            path: Vec<Side>,
        }
        impl<T: Num> Dp<'_, T> {
            fn go(&mut self, a: usize, b: usize) -> bool {
                let i = a + b;
                if i == self.he.len() {
                    return true;
                }
                if self.dead[a * self.width + b] {
                    return false;
                }
                if b < self.hf.len()
                    && self.hf[b] >= self.he[i]
                    && self.pd[a].plus(&self.pf[b + 1]) >= self.pe[i + 1]
                    && self.go(a, b + 1)
                {
                    self.path.push(Side::F);
                    return true;
                }
                if a < self.hd.len()
                    && self.hd[a] <= self.he[i]
                    && self.pd[a + 1].plus(&self.pf[b]) >= self.pe[i + 1]
                    && self.go(a + 1, b)
                {
                    self.path.push(Side::D);
                    return true;
                }
                self.dead[a * self.width + b] = true;
                false
            }
        }
        let mut dp = Dp {
            pd: prefixes(hd),
            pe: prefixes(he),
            pf: prefixes(hf),
            dead: vec![false; (hd.len() + 1) * (hf.len() + 1)],
            width: hf.len() + 1,
            path: Vec::with_capacity(he.len()),
            hd,
            he,
            hf,
        };
        if dp.go(0, 0) {
            dp.path.reverse();
            Some(dp.path)
        } else {
            None
        }
    }

    /// Dominance plus the partition split (multiset and per-index
    /// conditions). Returns 0-based `(s_d, s_f)`.
    pub(super) fn check<T: Num>(
        p: &[T],
        hd: &[T],
        he: &[T],
        hf: &[T],
        leniency: Leniency,
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        if p.len() != he.len() {
            return None;
        }
        // dominance with equal endpoints
        let mut a = T::zero();
        let mut b = T::zero();
        for (x, y) in p.iter().zip(he) {
            a = a.plus(x);
            b = b.plus(y);
            if a < b {
                return None;
            }
        }
        if a != b {
            return None;
        }
        partition(p, hd, he, hf, leniency)
    }

    /// The multiset split behind the witness conditions. Exact per value:
    /// an index can only consume copies of its own slope value, so the
    /// split is feasible iff within every value class no index is
    /// ineligible for both sides and the forced indices fit their side's
    /// count.
    pub(super) fn partition<T: Num>(
        p: &[T],
        hd: &[T],
        he: &[T],
        hf: &[T],
        leniency: Leniency,
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        if p.len() != hd.len() + hf.len() {
            return None;
        }
        let mut cd: BTreeMap<&T, usize> = BTreeMap::new();
        for v in hd {
            *cd.entry(v).or_insert(0) += 1;
        }
        let mut cf: BTreeMap<&T, usize> = BTreeMap::new();
        for v in hf {
            *cf.entry(v).or_insert(0) += 1;
        }
        let mut groups: BTreeMap<&T, Vec<usize>> = BTreeMap::new();
        for (i, v) in p.iter().enumerate() {
            groups.entry(v).or_default().push(i);
        }
        let mut s_d = Vec::with_capacity(hd.len());
        let mut s_f = Vec::with_capacity(hf.len());
        for (v, idxs) in &groups {
            let cdv = cd.get(v).copied().unwrap_or(0);
            let cfv = cf.get(v).copied().unwrap_or(0);
            if idxs.len() != cdv + cfv {
                return None;
            }
            let shared = cdv > 0 && cfv > 0;
            let mut d_only = Vec::new();
            let mut f_only = Vec::new();
            let mut both = Vec::new();
            for &i in idxs {
                let ineq_d = *v <= &he[i];
                let ineq_f = *v >= &he[i];
                let de = cdv > 0
                    && match leniency {
                        Leniency::Strict => ineq_d,
                        Leniency::SharedValues => ineq_d || shared,
                        Leniency::AnyValues => true,
                    };
                let fe = cfv > 0
                    && match leniency {
                        Leniency::Strict => ineq_f,
                        Leniency::SharedValues => ineq_f || shared,
                        Leniency::AnyValues => true,
                    };
                match (de, fe) {
                    (false, false) => return None,
                    (true, false) => d_only.push(i),
                    (false, true) => f_only.push(i),
                    (true, true) => both.push(i),
                }
            }
            if d_only.len() > cdv || f_only.len() > cfv {
                return None;
            }
            let need_f = cfv - f_only.len();
            s_f.extend(f_only);
            s_f.extend(&both[..need_f]);
            s_d.extend(d_only);
            s_d.extend(&both[need_f..]);
        }
        debug_assert_eq!(s_d.len(), hd.len());
        debug_assert_eq!(s_f.len(), hf.len());
        Some((s_d, s_f))
    }

    /// Ascending lexicographic enumeration of rearrangements with dominance
    /// and membership pruning. Returns the value index per position and the
    /// partition of the first witness.
    #[allow(clippy::type_complexity)]
    pub(super) fn brute_lex<T: Num>(
        values: &[T],
        counts: &[usize],
        hd: &[T],
        he: &[T],
        hf: &[T],
        leniency: Leniency,
    ) -> Option<(Vec<usize>, Vec<usize>, Vec<usize>)> {
        let n = he.len();
        let pe = prefixes(he);
        let in_d: Vec<bool> = values.iter().map(|v| hd.contains(v)).collect();
        let in_f: Vec<bool> = values.iter().map(|v| hf.contains(v)).collect();
        struct Search<'a, T> {
            values: &'a [T],
            counts: Vec<usize>,
            hd: &'a [T],
            he: &'a [T],
            hf: &'a [T],
            pe: &'a [T],
            in_d: &'a [bool],
            in_f: &'a [bool],
            leniency: Leniency,
            chosen: Vec<usize>,
            result: Option<(Vec<usize>, Vec<usize>)>,
        }
        impl<T: Num> Search<'_, T> {
            fn rec(&mut self, i: usize, prefix: &T) -> bool {
                if i == self.he.len() {
                    let p: Vec<T> = self
                        .chosen
                        .iter()
                        .map(|&vi| self.values[vi].clone())
                        .collect();
                    if let Some(split) =
                        partition(&p, self.hd, self.he, self.hf, self.leniency)
                    {
                        self.result = Some(split);
                        return true;
                    }
                    return false;
                }
                for vi in 0..self.values.len() {
                    if self.counts[vi] == 0 {
                        continue;
                    }
                    let v = &self.values[vi];
                    let np = prefix.plus(v);
                    if np < self.pe[i + 1] {
                        continue;
                    }
                    let shared = self.in_d[vi] && self.in_f[vi];
                    let (ineq_d, ineq_f) = (*v <= self.he[i], *v >= self.he[i]);
                    let eligible = match self.leniency {
                        Leniency::Strict => {
                            (self.in_d[vi] && ineq_d) || (self.in_f[vi] && ineq_f)
                        }
                        Leniency::SharedValues => {
                            (self.in_d[vi] && (ineq_d || shared))
                                || (self.in_f[vi] && (ineq_f || shared))
                        }
                        Leniency::AnyValues => true,
                    };
                    if !eligible {
                        continue;
                    }
                    self.counts[vi] -= 1;
                    self.chosen.push(vi);
                    if self.rec(i + 1, &np) {
                        return true;
                    }
                    self.chosen.pop();
                    self.counts[vi] += 1;
                }
                false
            }
        }
        let mut search = Search {
            values,
            counts: counts.to_vec(),
            hd,
            he,
            hf,
            pe: &pe,
            in_d: &in_d,
            in_f: &in_f,
            leniency,
            chosen: Vec::with_capacity(n),
            result: None,
        };
        let zero = T::zero();
        if search.rec(0, &zero) {
            let (s_d, s_f) = search.result.unwrap();
            Some((search.chosen, s_d, s_f))
        } else {
            None
        }
    }
}
