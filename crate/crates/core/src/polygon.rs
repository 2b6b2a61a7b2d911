//! Rationally tuplar polygons.
//!
//! A polygon of length `n` is the graph of a piecewise linear function on
//! `[0, n]` starting at the origin, encoded by its tuple of slopes over the
//! unit intervals `[i-1, i]`. Vertices sit at integer x-coordinates and the
//! right endpoint has integral height. The length-0 polygon is the point at
//! the origin.

use crate::rat::{format_rat, parse_rat, Rat, RatParseError};
use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("right endpoint {0} is not an integer")]
    NonIntegralEndpoint(String),
    #[error("polygon text must be wrapped in parentheses")]
    MissingParens,
    #[error("bad slope entry: {0}")]
    BadSlope(#[from] RatParseError),
}

/// Tuple of rational slopes, one per unit interval, with integral endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TuplarPolygon {
    slopes: Vec<Rat>,
}

impl TuplarPolygon {
    /// Builds a polygon from its slope tuple. Fails when the slopes do not
    /// sum to an integer.
    pub fn new(slopes: Vec<Rat>) -> Result<Self, PolygonError> {
        let total: Rat = slopes.iter().sum();
        if !total.is_integer() {
            return Err(PolygonError::NonIntegralEndpoint(format_rat(&total)));
        }
        Ok(TuplarPolygon { slopes })
    }

    /// The point polygon: length 0, both endpoints at the origin.
    pub fn point() -> Self {
        TuplarPolygon { slopes: Vec::new() }
    }

    /// Slope tuple sums of bundles are integral by construction, so internal
    /// callers skip the endpoint check.
    pub(crate) fn from_integral_slopes(slopes: Vec<Rat>) -> Self {
        debug_assert!(slopes.iter().sum::<Rat>().is_integer());
        TuplarPolygon { slopes }
    }

    pub fn slopes(&self) -> &[Rat] {
        &self.slopes
    }

    // a zero-length polygon is a point, not an empty collection, so the
    // usual is_empty pairing does not apply
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.slopes.len()
    }

    pub fn is_point(&self) -> bool {
        self.slopes.is_empty()
    }

    /// Heights of the polygon at x = 1, ..., n (the origin is omitted).
    pub fn partial_sums(&self) -> Vec<Rat> {
        let mut out = Vec::with_capacity(self.slopes.len());
        let mut acc = Rat::zero();
        for s in &self.slopes {
            acc += s;
            out.push(acc.clone());
        }
        out
    }

    /// Height of the right endpoint; an integer by the type invariant.
    pub fn end_height(&self) -> BigInt {
        let total: Rat = self.slopes.iter().sum();
        total.to_integer()
    }

    /// `self >= other` in the dominance order: equal length, equal total
    /// rise, and every partial sum of `self` at least the corresponding
    /// partial sum of `other`.
    pub fn dominates(&self, other: &TuplarPolygon) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut a = Rat::zero();
        let mut b = Rat::zero();
        for (s, t) in self.slopes.iter().zip(&other.slopes) {
            a += s;
            b += t;
            if a < b {
                return false;
            }
        }
        a == b
    }

    /// True when the slopes are weakly decreasing.
    pub fn is_concave(&self) -> bool {
        self.slopes.windows(2).all(|w| w[0] >= w[1])
    }

    /// Least concave polygon with the same endpoints lying on or above this
    /// one: the upper convex hull of the vertex set.
    pub fn upper_hull(&self) -> TuplarPolygon {
        if self.slopes.len() < 2 {
            return self.clone();
        }
        // Hull vertices as (x, height), scanned left to right. A vertex is
        // popped when it falls on or below the chord of its neighbours.
        let mut hull: Vec<(usize, Rat)> = vec![(0, Rat::zero())];
        let mut acc = Rat::zero();
        for (i, s) in self.slopes.iter().enumerate() {
            acc += s;
            let pt = (i + 1, acc.clone());
            while hull.len() >= 2 {
                let (x1, y1) = &hull[hull.len() - 2];
                let (x2, y2) = &hull[hull.len() - 1];
                // keep x2 only if slope(x1,x2) > slope(x2,pt)
                let lhs = (y2 - y1) * Rat::from_integer(BigInt::from(pt.0 - x2));
                let rhs = (&pt.1 - y2) * Rat::from_integer(BigInt::from(x2 - x1));
                if lhs > rhs {
                    break;
                }
                hull.pop();
            }
            hull.push(pt);
        }
        let mut slopes = Vec::with_capacity(self.slopes.len());
        for w in hull.windows(2) {
            let (x1, y1) = &w[0];
            let (x2, y2) = &w[1];
            let span = x2 - x1;
            let slope = (y2 - y1) / Rat::from_integer(BigInt::from(span));
            for _ in 0..span {
                slopes.push(slope.clone());
            }
        }
        TuplarPolygon { slopes }
    }

    /// Concatenation: `other` translated to start at this polygon's right
    /// endpoint.
    pub fn concat(&self, other: &TuplarPolygon) -> TuplarPolygon {
        let mut slopes = self.slopes.clone();
        slopes.extend(other.slopes.iter().cloned());
        TuplarPolygon { slopes }
    }

    /// Parses the canonical text form `(3, 1/2, -2/3)`. The point polygon is
    /// `()`.
    pub fn parse(text: &str) -> Result<Self, PolygonError> {
        let t = text.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or(PolygonError::MissingParens)?;
        let inner = inner.trim();
        if inner.is_empty() {
            return Ok(TuplarPolygon::point());
        }
        let slopes = inner
            .split(',')
            .map(parse_rat)
            .collect::<Result<Vec<_>, _>>()?;
        TuplarPolygon::new(slopes)
    }
}

impl std::fmt::Display for TuplarPolygon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.slopes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rat(s))?;
        }
        write!(f, ")")
    }
}

impl std::fmt::Debug for TuplarPolygon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TuplarPolygon{}", self)
    }
}
