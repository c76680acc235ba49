//! Newton polygons: lower convex hulls of `(n, v_p(c_n))`, and the slope
//! sequences read off them.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::valuation::{vp, Valuation};

/// Lower convex hull through the origin. Vertices are strictly increasing
/// in index and the segment slopes strictly increase from left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    vertices: Vec<(usize, i64)>,
}

/// Where a slope sequence came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SlopeSource {
    Classical,
    Conjectural,
    Spectral,
    Diagonal,
}

/// Slopes with multiplicity, in nondecreasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeSequence {
    pub slopes: Vec<BigRational>,
    pub source: SlopeSource,
}

impl SlopeSequence {
    /// The slopes as integers, if they all are.
    pub fn as_integers(&self) -> Option<Vec<i64>> {
        self.slopes
            .iter()
            .map(|s| if s.is_integer() { i64::try_from(s.to_integer()).ok() } else { None })
            .collect()
    }
}

impl Serialize for SlopeSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let slopes: Vec<String> = self.slopes.iter().map(ToString::to_string).collect();
        let mut st = s.serialize_struct("SlopeSequence", 2)?;
        st.serialize_field("slopes", &slopes)?;
        st.serialize_field("source", &self.source)?;
        st.end()
    }
}

/// `(b - a) x (c - a)` sign test: is `c` on or below the line through `a` and `b`?
fn not_above(a: (usize, i64), b: (usize, i64), c: (usize, i64)) -> bool {
    let (ax, ay) = (a.0 as i128, a.1 as i128);
    let (bx, by) = (b.0 as i128, b.1 as i128);
    let (cx, cy) = (c.0 as i128, c.1 as i128);
    (bx - ax) * (cy - ay) - (by - ay) * (cx - ax) <= 0
}

impl NewtonPolygon {
    /// Lower hull of the given points. Points at infinite valuation are
    /// skipped; the origin `(0, 0)` must be present and indices distinct.
    pub fn from_points(points: &[(usize, Valuation)]) -> Result<NewtonPolygon> {
        let mut finite: Vec<(usize, i64)> = Vec::with_capacity(points.len());
        let mut seen = std::collections::HashSet::new();
        for &(i, v) in points {
            if !seen.insert(i) {
                return Err(Error::DuplicateIndex(i));
            }
            if let Valuation::Finite(h) = v {
                finite.push((i, h));
            }
        }
        if !finite.contains(&(0, 0)) {
            return Err(Error::MissingOrigin);
        }
        finite.sort_unstable();
        // Andrew's monotone chain, lower half; collinear points are dropped
        let mut hull: Vec<(usize, i64)> = Vec::with_capacity(finite.len());
        for p in finite {
            while hull.len() >= 2 && not_above(hull[hull.len() - 2], hull[hull.len() - 1], p) {
                hull.pop();
            }
            hull.push(p);
        }
        Ok(NewtonPolygon { vertices: hull })
    }

    pub fn vertices(&self) -> &[(usize, i64)] {
        &self.vertices
    }

    /// Horizontal length of the polygon.
    pub fn extent(&self) -> usize {
        self.vertices.last().map_or(0, |v| v.0)
    }

    /// Segment slopes, one per edge.
    pub fn segment_slopes(&self) -> Vec<BigRational> {
        self.vertices
            .windows(2)
            .map(|w| BigRational::new(BigInt::from(w[1].1 - w[0].1), BigInt::from((w[1].0 - w[0].0) as i64)))
            .collect()
    }

    /// The first `count` unit-step slopes, with multiplicity.
    pub fn slopes(&self, count: usize, source: SlopeSource) -> Result<SlopeSequence> {
        if count > self.extent() {
            return Err(Error::InsufficientExtent { extent: self.extent(), requested: count });
        }
        let mut slopes = Vec::with_capacity(count);
        for (w, s) in self.vertices.windows(2).zip(self.segment_slopes()) {
            for _ in w[0].0..w[1].0 {
                if slopes.len() == count {
                    break;
                }
                slopes.push(s.clone());
            }
        }
        Ok(SlopeSequence { slopes, source })
    }

    /// Height of the hull above index `x` (a vertex height or an interpolation).
    pub fn height_at(&self, x: usize) -> Option<BigRational> {
        let w = self.vertices.windows(2).find(|w| w[0].0 <= x && x <= w[1].0);
        match w {
            Some(w) => {
                let (x0, y0) = w[0];
                let (x1, y1) = w[1];
                let num = BigInt::from(y0) * BigInt::from((x1 - x) as i64) + BigInt::from(y1) * BigInt::from((x - x0) as i64);
                Some(BigRational::new(num, BigInt::from((x1 - x0) as i64)))
            }
            None if x == 0 && self.vertices.len() == 1 => Some(BigRational::zero()),
            None => None,
        }
    }
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|(i, h)| format!("({i},{h})")).collect();
        f.write_str(&parts.join(" "))
    }
}

pub fn polygon_from_points(points: &[(usize, Valuation)]) -> Result<NewtonPolygon> {
    NewtonPolygon::from_points(points)
}

/// p-adic Newton polygon of `sum c_n X^n`; requires `c_0 = 1`.
pub fn polygon_of_poly(coeffs: &[BigRational], p: u64) -> Result<NewtonPolygon> {
    match coeffs.first() {
        Some(c) if c.is_one() => {}
        _ => return Err(Error::InvalidArgument("constant coefficient must be 1".into())),
    }
    let points = coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| Ok((n, vp(c, p)?)))
        .collect::<Result<Vec<_>>>()?;
    NewtonPolygon::from_points(&points)
}

pub fn slopes_of(np: &NewtonPolygon, count: usize, source: SlopeSource) -> Result<SlopeSequence> {
    np.slopes(count, source)
}

/// Do the hulls agree on `[0, upto]`? Equivalent to equal unit-step slopes
/// over that window, since both hulls start at the origin.
pub fn polygons_equal(a: &NewtonPolygon, b: &NewtonPolygon, upto: usize) -> Result<bool> {
    let sa = a.slopes(upto, SlopeSource::Diagonal)?;
    let sb = b.slopes(upto, SlopeSource::Diagonal)?;
    Ok(sa.slopes == sb.slopes)
}
