//! Newton polygons and Gauss-norm evaluation.
//!
//! The polygon of Σ c_i z^i is the lower convex hull of the points
//! (i, val(c_i)); a hull segment of slope s certifies exactly its horizontal
//! extent many roots of valuation −s in the algebraic closure. Evaluating a
//! polynomial at the disk point ζ_{a,ρ} is the degree-wise envelope of the
//! same data: val |f(ζ_{a,ρ})| = min_i (val(c_i(a)) + i·ρ) over the
//! recentered coefficients c_i(a).

use crate::valfield::poly::Poly;
use crate::valfield::{Elem, QRat, ValQ};
use crate::{Error, Result};

/// Lower convex hull of coefficient valuations.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonPolygon {
    /// Hull vertices (exponent, valuation), exponent strictly increasing,
    /// slopes strictly increasing left to right. Exponents start at the
    /// order of vanishing.
    pub vertices: Vec<(usize, QRat)>,
    /// Polygon slopes with horizontal multiplicities, ascending.
    pub slopes: Vec<(QRat, usize)>,
    /// Order of vanishing at z = 0.
    pub ord: usize,
    pub degree: usize,
}

impl NewtonPolygon {
    /// Root valuations certified by the polygon: (valuation, count), in
    /// decreasing valuation order. Roots at z = 0 (valuation INF) are
    /// reported through `ord`, not here.
    pub fn root_valuations(&self) -> Vec<(QRat, usize)> {
        self.slopes.iter().rev().map(|&(s, m)| (-s, m)).collect()
    }
}

pub fn newton_polygon(coeffs: &[Elem]) -> Result<NewtonPolygon> {
    let pts: Vec<(usize, ValQ)> = coeffs.iter().map(|c| c.val()).enumerate().collect();
    let finite: Vec<(usize, QRat)> = pts
        .iter()
        .filter_map(|&(i, v)| v.finite().map(|q| (i, q)))
        .collect();
    if finite.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let ord = finite[0].0;
    let degree = finite.last().unwrap().0;

    // monotone chain keeping strictly increasing slopes
    let mut hull: Vec<(usize, QRat)> = vec![];
    for &(i, v) in &finite {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // slope(p1,p2) >= slope(p2,p): p2 is not a strict hull vertex
            let lhs = (y2 - y1) * QRat::from_integer((i - x2) as i64);
            let rhs = (v - y2) * QRat::from_integer((x2 - x1) as i64);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        // drop a single previous point lying on or above the segment start
        if hull.len() == 1 {
            let (x1, y1) = hull[0];
            debug_assert!(x1 < i);
            let _ = (x1, y1);
        }
        hull.push((i, v));
    }

    let mut slopes = vec![];
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        let m = x2 - x1;
        let s = (y2 - y1) / QRat::from_integer(m as i64);
        slopes.push((s, m));
    }
    debug_assert!(slopes.windows(2).all(|w| w[0].0 < w[1].0));
    Ok(NewtonPolygon {
        vertices: hull,
        slopes,
        ord,
        degree,
    })
}

pub fn newton_polygon_of(f: &Poly) -> Result<NewtonPolygon> {
    newton_polygon(f.coeffs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Closed,
    Open,
}

/// Number of roots z (with multiplicity, in the algebraic closure) with
/// val(z − center) ≥ rho (closed) or > rho (open).
pub fn count_roots_in_disk(
    f: &Poly,
    center: &Elem,
    rho: ValQ,
    boundary: Boundary,
) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let shifted = f.shift(center);
    let np = newton_polygon_of(&shifted)?;
    // roots exactly at the center have valuation INF
    let mut count = match (rho, boundary) {
        (ValQ::Inf, Boundary::Open) => return Ok(0),
        _ => np.ord,
    };
    if let ValQ::Fin(r) = rho {
        for (v, m) in np.root_valuations() {
            let inside = match boundary {
                Boundary::Closed => v >= r,
                Boundary::Open => v > r,
            };
            if inside {
                count += m;
            }
        }
    }
    Ok(count)
}

/// val |f(ζ_{center, rho})| at the disk point of radius-valuation rho: the
/// Gauss norm of the recentered polynomial.
pub fn gauss_eval(f: &Poly, center: &Elem, rho: QRat) -> Result<ValQ> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let shifted = f.shift(center);
    let mut best = ValQ::Inf;
    for (i, c) in shifted.coeffs().iter().enumerate() {
        let v = c.val().add(&ValQ::Fin(rho * QRat::from_integer(i as i64)));
        best = best.min(v);
    }
    debug_assert!(best.is_finite());
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valfield::{qrat, CoeffDomain};

    fn m(p: u64) -> CoeffDomain {
        CoeffDomain::mixed(p).unwrap()
    }

    #[test]
    fn polygon_of_z2_minus_9() {
        let d = m(3);
        let f = Poly::from_i64_coeffs(&d, &[-9, 0, 1]);
        let np = newton_polygon_of(&f).unwrap();
        assert_eq!(np.vertices, vec![(0, qrat(2, 1)), (2, qrat(0, 1))]);
        assert_eq!(np.slopes, vec![(qrat(-1, 1), 2)]);
        assert_eq!(np.root_valuations(), vec![(qrat(1, 1), 2)]);
        assert_eq!(np.ord, 0);
    }

    #[test]
    fn polygon_of_z3_minus_z() {
        let d = m(3);
        let f = Poly::from_i64_coeffs(&d, &[0, -1, 0, 1]);
        let np = newton_polygon_of(&f).unwrap();
        assert_eq!(np.ord, 1);
        assert_eq!(np.root_valuations(), vec![(qrat(0, 1), 2)]);
    }

    #[test]
    fn polygon_of_z_minus_p() {
        for p in [2u64, 5, 7] {
            let d = m(p);
            let f = Poly::new(d.clone(), vec![d.uniformizer().neg(), d.one()]);
            let np = newton_polygon_of(&f).unwrap();
            assert_eq!(np.root_valuations(), vec![(qrat(1, 1), 1)]);
        }
    }

    #[test]
    fn disk_counts_for_z2_minus_9() {
        let d = m(3);
        let f = Poly::from_i64_coeffs(&d, &[-9, 0, 1]);
        let zero = d.zero();
        assert_eq!(
            count_roots_in_disk(&f, &zero, ValQ::int(1), Boundary::Closed).unwrap(),
            2
        );
        assert_eq!(
            count_roots_in_disk(&f, &zero, ValQ::int(1), Boundary::Open).unwrap(),
            0
        );
        // centered at a root, the root itself always counts
        let three = d.from_i64(3);
        assert!(count_roots_in_disk(&f, &three, ValQ::Inf, Boundary::Closed).unwrap() >= 1);
    }

    #[test]
    fn gauss_eval_examples() {
        let d = m(3);
        let z = Poly::var(&d);
        assert_eq!(
            gauss_eval(&z, &d.zero(), qrat(3, 2)).unwrap(),
            ValQ::rat(3, 2)
        );
        let f = Poly::from_i64_coeffs(&d, &[-9, 0, 1]);
        assert_eq!(gauss_eval(&f, &d.zero(), qrat(1, 1)).unwrap(), ValQ::int(2));
        let sq = Poly::from_i64_coeffs(&d, &[0, 0, 1]);
        assert_eq!(
            gauss_eval(&sq, &d.zero(), qrat(7, 3)).unwrap(),
            ValQ::rat(14, 3)
        );
    }

    #[test]
    fn slope_sum_matches_degree_minus_ord() {
        let d = m(5);
        let f = Poly::from_i64_coeffs(&d, &[0, 0, 50, 5, 0, 1]);
        let np = newton_polygon_of(&f).unwrap();
        let total: usize = np.slopes.iter().map(|&(_, m)| m).sum();
        assert_eq!(total, np.degree - np.ord);
    }
}
