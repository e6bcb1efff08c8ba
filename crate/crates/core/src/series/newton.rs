use num_rational::Rational64;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::PadicSeries;

/// What is known about one coefficient's valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientValuation {
    Exact(i64),
    /// Indistinguishable from zero: valuation at least this bound.
    AtLeast(i64),
    Vanishing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NewtonVertex {
    pub index: usize,
    pub valuation: i64,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NewtonSegment {
    pub slope: Rational64,
    pub length: usize,
    pub certified: bool,
}

impl Serialize for NewtonSegment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("NewtonSegment", 3)?;
        s.serialize_field("slope", &self.slope.to_string())?;
        s.serialize_field("length", &self.length)?;
        s.serialize_field("certified", &self.certified)?;
        s.end()
    }
}

/// Lower convex hull of the points `(i, v_p(a_i))` of a truncated series.
///
/// A vertex is certified when its coefficient's valuation is known and no
/// coefficient known only modulo `p^A` could fall below the hull.
/// Coefficients past the truncation degree are not considered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    vertices: Vec<NewtonVertex>,
    segments: Vec<NewtonSegment>,
}

impl NewtonPolygon {
    pub fn of_series(f: &PadicSeries) -> Self {
        let mut vals = vec![CoefficientValuation::Exact(0)];
        vals.extend(f.tail().iter().map(|c| match (c.valuation(), c.absprec()) {
            (Some(v), _) => CoefficientValuation::Exact(v),
            (None, Some(a)) => CoefficientValuation::AtLeast(a),
            (None, None) => CoefficientValuation::Vanishing,
        }));
        Self::from_valuations(&vals)
    }

    /// Polygon of the points `(i, vals[i])`; index 0 must be known.
    pub fn from_valuations(vals: &[CoefficientValuation]) -> Self {
        let mut hull: Vec<(i64, i64)> = Vec::new();
        for (i, v) in vals.iter().enumerate() {
            let CoefficientValuation::Exact(v) = *v else { continue };
            let pt = (i as i64, v);
            while hull.len() >= 2 {
                let (x0, y0) = hull[hull.len() - 2];
                let (x1, y1) = hull[hull.len() - 1];
                // drop the middle point unless the slope strictly increases there
                if ((y1 - y0) as i128) * ((pt.0 - x1) as i128) >= ((pt.1 - y1) as i128) * ((x1 - x0) as i128) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        let mut certified = vec![true; hull.len()];
        for (i, v) in vals.iter().enumerate() {
            let CoefficientValuation::AtLeast(bound) = *v else { continue };
            let i = i as i64;
            // segment whose span contains i, or the last one extended to the right
            let k = hull.iter().position(|&(x, _)| x > i).unwrap_or(hull.len());
            if hull.len() < 2 {
                continue;
            }
            let beyond = k == hull.len();
            let (left, right) = if beyond { (hull.len() - 2, hull.len() - 1) } else { (k - 1, k) };
            let (x0, y0) = hull[left];
            let (x1, y1) = hull[right];
            let lhs = (bound as i128) * ((x1 - x0) as i128);
            let rhs = (y0 as i128) * ((x1 - x0) as i128) + ((y1 - y0) as i128) * ((i - x0) as i128);
            // past the last vertex, a point on the extended line already lengthens the segment
            if lhs < rhs || (beyond && lhs == rhs) {
                certified[right] = false;
                if !beyond && left > 0 {
                    certified[left] = false;
                }
            }
        }
        let vertices: Vec<NewtonVertex> = hull
            .iter()
            .zip(&certified)
            .map(|(&(x, y), &c)| NewtonVertex { index: x as usize, valuation: y, certified: c })
            .collect();
        let segments = vertices
            .windows(2)
            .map(|w| NewtonSegment {
                slope: Rational64::new(w[1].valuation - w[0].valuation, (w[1].index - w[0].index) as i64),
                length: w[1].index - w[0].index,
                certified: w[0].certified && w[1].certified,
            })
            .collect();
        Self { vertices, segments }
    }

    pub fn vertices(&self) -> &[NewtonVertex] {
        &self.vertices
    }

    pub fn segments(&self) -> &[NewtonSegment] {
        &self.segments
    }

    /// Slopes with multiplicity, left to right.
    pub fn slopes(&self) -> Vec<Rational64> {
        self.segments.iter().flat_map(|s| std::iter::repeat_n(s.slope, s.length)).collect()
    }

    /// Horizontal length of the segment of the given slope (0 if absent) and
    /// whether that segment is certified.
    pub fn multiplicity(&self, slope: Rational64) -> (usize, bool) {
        self.segments.iter().find(|s| s.slope == slope).map(|s| (s.length, s.certified)).unwrap_or((0, true))
    }

    pub fn unit_slope_multiplicity(&self) -> (usize, bool) {
        self.multiplicity(Rational64::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::CoefficientValuation::{AtLeast, Exact, Vanishing};
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn staircase() {
        let p = NewtonPolygon::from_valuations(&[Exact(0), Exact(0), Exact(1), Exact(3)]);
        assert_eq!(p.slopes(), vec![r(0, 1), r(1, 1), r(2, 1)]);
        assert!(p.vertices().iter().all(|v| v.certified));
    }

    #[test]
    fn skips_high_point() {
        let p = NewtonPolygon::from_valuations(&[Exact(0), Exact(5), Exact(1)]);
        let idx: Vec<_> = p.vertices().iter().map(|v| (v.index, v.valuation)).collect();
        assert_eq!(idx, vec![(0, 0), (2, 1)]);
        assert_eq!(p.slopes(), vec![r(1, 2), r(1, 2)]);
        assert_eq!(p.segments().len(), 1);
    }

    #[test]
    fn constant_series() {
        let p = NewtonPolygon::from_valuations(&[Exact(0), Vanishing, Vanishing]);
        assert!(p.segments().is_empty());
        assert_eq!(p.unit_slope_multiplicity(), (0, true));
    }

    #[test]
    fn collinear_points_merge() {
        let p = NewtonPolygon::from_valuations(&[Exact(0), Exact(1), Exact(2), Exact(3)]);
        assert_eq!(p.vertices().len(), 2);
        assert_eq!(p.multiplicity(r(1, 1)), (3, true));
    }

    #[test]
    fn imprecise_coefficient_below_hull() {
        // a_1 known only mod p^0 could be a unit, so the vertex at 2 is in doubt
        let p = NewtonPolygon::from_valuations(&[Exact(0), AtLeast(0), Exact(2)]);
        assert_eq!(p.multiplicity(r(1, 1)), (2, false));
        assert!(p.vertices()[0].certified);
        // known mod p^1: it can sit on the hull but not below it
        let p = NewtonPolygon::from_valuations(&[Exact(0), AtLeast(1), Exact(2)]);
        assert_eq!(p.multiplicity(r(1, 1)), (2, true));
    }

    #[test]
    fn imprecise_tail_beyond_last_vertex() {
        let p = NewtonPolygon::from_valuations(&[Exact(0), Exact(0), AtLeast(0)]);
        assert_eq!(p.unit_slope_multiplicity(), (1, false));
        let p = NewtonPolygon::from_valuations(&[Exact(0), Exact(0), AtLeast(1)]);
        assert_eq!(p.unit_slope_multiplicity(), (1, true));
    }
}
