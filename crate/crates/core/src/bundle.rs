//! Vector bundles as formal sums of stable bundles.
//!
//! Every bundle decomposes uniquely as a direct sum of stable bundles
//! `O(d/r)` with `d/r` in lowest terms; `O(d/r)` has rank `r` and degree
//! `d`. A [`VectorBundle`] is therefore stored as its summands in strictly
//! decreasing slope order with positive multiplicities, which makes
//! structural equality the same thing as isomorphism.
//!
//! Text grammar (whitespace insignificant):
//!
//! ```text
//! bundle := term ("+" term)* | "0"
//! term   := "O(" int ["/" posint] ")" ["^" posint]
//! ```
//!
//! Slopes must be written in lowest terms: `O(2/4)` is rejected rather than
//! silently reduced, because the rank of a stable bundle is read off the
//! denominator.

use crate::polygon::TuplarPolygon;
use crate::rat::{format_rat, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// A stable bundle `O(slope)`, determined by its reduced slope.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StableSlope {
    slope: Rat,
}

impl StableSlope {
    pub fn new(slope: Rat) -> Self {
        StableSlope { slope }
    }

    pub fn slope(&self) -> &Rat {
        &self.slope
    }

    /// Rank: the denominator of the reduced slope.
    pub fn rank(&self) -> usize {
        self.slope
            .denom()
            .to_usize()
            .expect("stable rank exceeds usize")
    }

    /// Degree: the numerator of the reduced slope.
    pub fn degree(&self) -> BigInt {
        self.slope.numer().clone()
    }
}

/// Which summands a slope truncation keeps relative to the cut `mu`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TruncateMode {
    /// Slopes strictly above `mu`.
    Above,
    /// Slopes at least `mu`.
    AtLeast,
    /// Slopes strictly below `mu`.
    Below,
    /// Slopes at most `mu`.
    AtMost,
}

/// Finite direct sum of stable bundles, in canonical form: summands sorted
/// by strictly decreasing slope, every multiplicity positive. The empty sum
/// is the zero bundle.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VectorBundle {
    summands: Vec<(StableSlope, usize)>,
}

impl VectorBundle {
    pub fn zero() -> Self {
        VectorBundle {
            summands: Vec::new(),
        }
    }

    /// `O(slope)^mult`.
    pub fn stable(slope: Rat, mult: usize) -> Self {
        VectorBundle::from_summands(std::iter::once((slope, mult)))
    }

    /// Canonicalizes an arbitrary list of `(slope, multiplicity)` pairs:
    /// equal slopes merge, zero multiplicities drop out.
    pub fn from_summands<I: IntoIterator<Item = (Rat, usize)>>(items: I) -> Self {
        let mut list: Vec<(Rat, usize)> = Vec::new();
        for (slope, mult) in items {
            if mult == 0 {
                continue;
            }
            list.push((slope, mult));
        }
        list.sort_by(|a, b| b.0.cmp(&a.0));
        let mut summands: Vec<(StableSlope, usize)> = Vec::new();
        for (slope, mult) in list {
            match summands.last_mut() {
                Some((s, m)) if *s.slope() == slope => *m += mult,
                _ => summands.push((StableSlope::new(slope), mult)),
            }
        }
        VectorBundle { summands }
    }

    /// Summands in strictly decreasing slope order.
    pub fn summands(&self) -> &[(StableSlope, usize)] {
        &self.summands
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    /// At most one distinct slope. The zero bundle counts as semistable.
    pub fn is_semistable(&self) -> bool {
        self.summands.len() <= 1
    }

    pub fn rank(&self) -> usize {
        self.summands.iter().map(|(s, m)| s.rank() * m).sum()
    }

    pub fn degree(&self) -> BigInt {
        self.summands
            .iter()
            .map(|(s, m)| s.degree() * BigInt::from(*m))
            .sum()
    }

    /// Total slope `degree / rank`; `None` for the zero bundle.
    pub fn slope(&self) -> Option<Rat> {
        if self.is_zero() {
            return None;
        }
        Some(Rat::new(self.degree(), BigInt::from(self.rank())))
    }

    /// Largest slope of a summand; `None` for the zero bundle.
    pub fn mu_max(&self) -> Option<&Rat> {
        self.summands.first().map(|(s, _)| s.slope())
    }

    /// Smallest slope of a summand; `None` for the zero bundle.
    pub fn mu_min(&self) -> Option<&Rat> {
        self.summands.last().map(|(s, _)| s.slope())
    }

    /// True when every slope is an integer.
    pub fn has_integral_slopes(&self) -> bool {
        self.summands.iter().all(|(s, _)| s.slope().is_integer())
    }

    /// The HN polygon: each summand `O(d/r)^m` contributes `m * r` unit
    /// intervals of slope `d/r`, laid out in decreasing order.
    pub fn hn_polygon(&self) -> TuplarPolygon {
        let mut slopes = Vec::with_capacity(self.rank());
        for (s, m) in &self.summands {
            let copies = s.rank() * m;
            for _ in 0..copies {
                slopes.push(s.slope().clone());
            }
        }
        TuplarPolygon::from_integral_slopes(slopes)
    }

    /// Semistable HN pieces in decreasing slope order: `O(s)^m` per summand.
    pub fn hn_pieces(&self) -> Vec<VectorBundle> {
        self.summands
            .iter()
            .map(|(s, m)| VectorBundle {
                summands: vec![(s.clone(), *m)],
            })
            .collect()
    }

    /// Dual bundle: every slope negated.
    pub fn dual(&self) -> VectorBundle {
        let summands = self
            .summands
            .iter()
            .rev()
            .map(|(s, m)| (StableSlope::new(-s.slope()), *m))
            .collect();
        VectorBundle { summands }
    }

    pub fn direct_sum(&self, other: &VectorBundle) -> VectorBundle {
        VectorBundle::from_summands(
            self.summands
                .iter()
                .chain(&other.summands)
                .map(|(s, m)| (s.slope().clone(), *m)),
        )
    }

    /// Keeps the summands selected by `mode` relative to `mu`.
    pub fn truncate(&self, mu: &Rat, mode: TruncateMode) -> VectorBundle {
        let keep = |slope: &Rat| match mode {
            TruncateMode::Above => slope > mu,
            TruncateMode::AtLeast => slope >= mu,
            TruncateMode::Below => slope < mu,
            TruncateMode::AtMost => slope <= mu,
        };
        VectorBundle {
            summands: self
                .summands
                .iter()
                .filter(|(s, _)| keep(s.slope()))
                .cloned()
                .collect(),
        }
    }

    /// Pullback along the degree-`d` cover: slopes multiply by `d`, rank is
    /// preserved, degree multiplies by `d`. `O(s)^m` becomes `O(d*s)^(m*g)`
    /// where `g = gcd(d, denom(s))`.
    pub fn pullback(&self, d: u32) -> VectorBundle {
        assert!(d >= 1, "cover degree must be positive");
        let factor = Rat::from_integer(BigInt::from(d));
        VectorBundle::from_summands(self.summands.iter().map(|(s, m)| {
            let new_slope = s.slope() * &factor;
            let g = s.rank() / StableSlope::new(new_slope.clone()).rank();
            (new_slope, m * g)
        }))
    }
}

impl std::fmt::Display for VectorBundle {
    /// Canonical text form, e.g. `O(3/2) + O(0)^2`; the zero bundle is `0`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, m)) in self.summands.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "O({})", format_rat(s.slope()))?;
            if *m > 1 {
                write!(f, "^{}", m)?;
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for VectorBundle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "VectorBundle[{}]", self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleParseError {
    #[error("unexpected character {found:?} at byte {at}")]
    UnexpectedChar { found: char, at: usize },
    #[error("expected {expected} at byte {at}")]
    Expected { expected: &'static str, at: usize },
    #[error("integer literal out of range at byte {at}")]
    IntOutOfRange { at: usize },
    #[error("slope {num}/{den} at byte {at} is not in lowest terms")]
    NotLowestTerms { num: BigInt, den: BigInt, at: usize },
    #[error("zero is not a valid {what} at byte {at}")]
    ZeroValue { what: &'static str, at: usize },
    #[error("trailing input at byte {at}")]
    TrailingInput { at: usize },
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect_byte(&mut self, b: u8, what: &'static str) -> Result<(), BundleParseError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(BundleParseError::Expected {
                expected: what,
                at: self.pos,
            })
        }
    }

    /// Unsigned decimal literal.
    fn number(&mut self, what: &'static str) -> Result<(BigInt, usize), BundleParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(BundleParseError::Expected {
                expected: what,
                at: start,
            });
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let value = text
            .parse::<BigInt>()
            .map_err(|_| BundleParseError::IntOutOfRange { at: start })?;
        Ok((value, start))
    }

    /// Signed integer: optional `-` then digits.
    fn int(&mut self) -> Result<(BigInt, usize), BundleParseError> {
        self.skip_ws();
        let start = self.pos;
        let negative = if self.bytes.get(self.pos) == Some(&b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let (value, _) = self.number("integer")?;
        Ok((if negative { -value } else { value }, start))
    }

    fn term(&mut self) -> Result<(Rat, usize), BundleParseError> {
        self.skip_ws();
        if self.peek() != Some(b'O') {
            return Err(BundleParseError::Expected {
                expected: "term `O(...)`",
                at: self.pos,
            });
        }
        self.pos += 1;
        self.expect_byte(b'(', "`(`")?;
        let (num, _) = self.int()?;
        let den = if self.peek() == Some(b'/') {
            self.pos += 1;
            let (den, den_at) = self.number("positive denominator")?;
            if den.is_zero() {
                return Err(BundleParseError::ZeroValue {
                    what: "denominator",
                    at: den_at,
                });
            }
            if num.abs().gcd(&den) != BigInt::from(1) {
                return Err(BundleParseError::NotLowestTerms {
                    num,
                    den,
                    at: den_at,
                });
            }
            den
        } else {
            BigInt::from(1)
        };
        self.expect_byte(b')', "`)`")?;
        let mult = if self.peek() == Some(b'^') {
            self.pos += 1;
            let (m, m_at) = self.number("positive multiplicity")?;
            if m.is_zero() {
                return Err(BundleParseError::ZeroValue {
                    what: "multiplicity",
                    at: m_at,
                });
            }
            m.to_usize()
                .ok_or(BundleParseError::IntOutOfRange { at: m_at })?
        } else {
            1
        };
        Ok((Rat::new(num, den), mult))
    }
}

/// Parses the bundle grammar; see the module docs. The result is canonical
/// regardless of the order terms are written in.
pub fn parse_bundle(text: &str) -> Result<VectorBundle, BundleParseError> {
    let mut p = Parser::new(text);
    // the zero bundle is the single token `0`
    if p.peek() == Some(b'0') {
        p.pos += 1;
        return match p.peek() {
            None => Ok(VectorBundle::zero()),
            Some(_) => Err(BundleParseError::TrailingInput { at: p.pos }),
        };
    }
    let mut terms = Vec::new();
    loop {
        terms.push(p.term()?);
        match p.peek() {
            Some(b'+') => {
                p.pos += 1;
            }
            Some(c) => {
                return Err(BundleParseError::UnexpectedChar {
                    found: c as char,
                    at: p.pos,
                })
            }
            None => break,
        }
    }
    Ok(VectorBundle::from_summands(terms))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FromPolygonError {
    #[error("polygon is not concave")]
    NotConcave,
    #[error("run of slope {slope} has length {len}, not divisible by the rank {rank}")]
    RunNotDivisible { slope: String, len: usize, rank: usize },
}

/// Reads a bundle off a concave polygon: each maximal run of a slope `d/r`
/// must have length `m * r` and yields `O(d/r)^m`. These are exactly the HN
/// polygons of bundles, and the map inverts [`VectorBundle::hn_polygon`].
pub fn bundle_from_polygon(p: &TuplarPolygon) -> Result<VectorBundle, FromPolygonError> {
    if !p.is_concave() {
        return Err(FromPolygonError::NotConcave);
    }
    let mut summands = Vec::new();
    let slopes = p.slopes();
    let mut i = 0;
    while i < slopes.len() {
        let slope = &slopes[i];
        let mut j = i;
        while j < slopes.len() && &slopes[j] == slope {
            j += 1;
        }
        let len = j - i;
        let stable = StableSlope::new(slope.clone());
        let rank = stable.rank();
        if len % rank != 0 {
            return Err(FromPolygonError::RunNotDivisible {
                slope: format_rat(slope),
                len,
                rank,
            });
        }
        summands.push((stable, len / rank));
        i = j;
    }
    Ok(VectorBundle { summands })
}

/// Necessary condition for `W` to embed into `V` as a subsheaf: the i-th
/// largest HN slope of `W` is at most the i-th largest HN slope of `V`, for
/// `i = 1, ..., rank(W)`.
///
/// Panics if `rank(W) > rank(V)`.
pub fn subsheaf_slope_test(w: &VectorBundle, v: &VectorBundle) -> bool {
    let hw = w.hn_polygon();
    let hv = v.hn_polygon();
    assert!(
        hw.len() <= hv.len(),
        "subsheaf test needs rank(W) <= rank(V)"
    );
    hw.slopes()
        .iter()
        .zip(hv.slopes())
        .all(|(a, b)| a <= b)
}

/// Necessary condition for `W` to arise as a quotient of `V`: the i-th HN
/// slope of `W` is at least the HN slope of `V` aligned from the right,
/// `slope_i(W) >= slope_(rank(V) - rank(W) + i)(V)`.
///
/// Panics if `rank(W) > rank(V)`.
pub fn quotient_slope_test(w: &VectorBundle, v: &VectorBundle) -> bool {
    let hw = w.hn_polygon();
    let hv = v.hn_polygon();
    assert!(
        hw.len() <= hv.len(),
        "quotient test needs rank(W) <= rank(V)"
    );
    let shift = hv.len() - hw.len();
    hw.slopes()
        .iter()
        .zip(&hv.slopes()[shift..])
        .all(|(a, b)| a >= b)
}

/// All bundles with the given rank and degree whose slopes lie in
/// `[lo, hi]` with denominators at most `max_den`. Results come out in
/// decreasing lexicographic order of their HN slope tuples.
pub(crate) fn bundles_with(
    rank: usize,
    degree: &BigInt,
    lo: &Rat,
    hi: &Rat,
    max_den: usize,
) -> Vec<VectorBundle> {
    if rank == 0 {
        return if degree.is_zero() {
            vec![VectorBundle::zero()]
        } else {
            Vec::new()
        };
    }
    // distinct admissible slopes, decreasing
    let mut slopes: Vec<Rat> = Vec::new();
    for r in 1..=max_den.min(rank) {
        let rb = BigInt::from(r);
        let a_min = (lo * Rat::from_integer(rb.clone())).ceil().to_integer();
        let a_max = (hi * Rat::from_integer(rb.clone())).floor().to_integer();
        let mut a = a_min;
        while a <= a_max {
            if a.abs().gcd(&rb) == BigInt::from(1) {
                slopes.push(Rat::new(a.clone(), rb.clone()));
            }
            a += BigInt::from(1);
        }
    }
    slopes.sort_by(|x, y| y.cmp(x));
    slopes.dedup();

    let mut out = Vec::new();
    let mut acc: Vec<(Rat, usize)> = Vec::new();
    fn recurse(
        slopes: &[Rat],
        from: usize,
        rem_rank: usize,
        rem_deg: Rat,
        lo: &Rat,
        acc: &mut Vec<(Rat, usize)>,
        out: &mut Vec<VectorBundle>,
    ) {
        if rem_rank == 0 {
            if rem_deg.is_zero() {
                out.push(VectorBundle::from_summands(acc.iter().cloned()));
            }
            return;
        }
        let rem = Rat::from_integer(BigInt::from(rem_rank));
        for (idx, s) in slopes.iter().enumerate().skip(from) {
            // the remaining degree must be reachable with slopes in [lo, s]
            if rem_deg > &rem * s || rem_deg < &rem * lo {
                continue;
            }
            let stable = StableSlope::new(s.clone());
            let r = stable.rank();
            if r > rem_rank {
                continue;
            }
            let num = Rat::from_integer(stable.degree());
            for m in (1..=rem_rank / r).rev() {
                let used = Rat::from_integer(BigInt::from(m)) * &num;
                acc.push((s.clone(), m));
                recurse(
                    slopes,
                    idx + 1,
                    rem_rank - m * r,
                    &rem_deg - &used,
                    lo,
                    acc,
                    out,
                );
                acc.pop();
            }
        }
    }
    recurse(
        &slopes,
        0,
        rank,
        Rat::from_integer(degree.clone()),
        lo,
        &mut acc,
        &mut out,
    );
    out
}
