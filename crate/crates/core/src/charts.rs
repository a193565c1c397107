//! Projective chart bookkeeping: poly-radius tuples of open balls seen
//! through the two standard charts of the line, the ordering functionals
//! that measure them, the radius/tuple case formulas, and the conversion
//! between the tuple-sized and chart-capped radius functions.
//!
//! Everything is stored additively: a multiplicative entry r ∈ [0,1]
//! appears as its valuation in [0, INF], with INF playing the role of 0.

use crate::berkline::BerkPoint;
use crate::valfield::fp::FpRatFn;
use crate::valfield::{Elem, QRat, ValQ};
use crate::{Error, Result};
use num_traits::Zero;
use std::fmt;

/// (n+1)×(n+1) array of radius valuations; the line uses n = 1. Row t
/// describes the ball in chart t; a row of ones (valuation zeros) marks a
/// chart not containing the base point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRadiusTuple {
    pub entries: Vec<Vec<ValQ>>,
}

impl PolyRadiusTuple {
    pub fn two_by_two(v11: ValQ, v12: ValQ, v21: ValQ, v22: ValQ) -> Self {
        PolyRadiusTuple {
            entries: vec![vec![v11, v12], vec![v21, v22]],
        }
    }

    pub fn n(&self) -> usize {
        self.entries.len() - 1
    }

    /// Entrywise comparison: self ≤ other as multiplicative radii, i.e.
    /// every valuation of self is ≥ the corresponding one of other.
    pub fn le(&self, other: &Self) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(r, s)| r.iter().zip(s).all(|(a, b)| a >= b))
    }
}

impl fmt::Display for PolyRadiusTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                format!("({})", cells.join(","))
            })
            .collect();
        write!(f, "({})", rows.join(","))
    }
}

/// An open ball described in a chart: homogeneous center plus its tuple.
#[derive(Debug, Clone)]
pub struct OpenBallSpec {
    pub chart: usize,
    pub center: Vec<Elem>,
    pub tuple: PolyRadiusTuple,
}

impl OpenBallSpec {
    pub fn new(chart: usize, center: Vec<Elem>, tuple: PolyRadiusTuple) -> Result<Self> {
        let vals: Vec<ValQ> = center.iter().map(|c| c.val()).collect();
        let min = vals
            .iter()
            .copied()
            .min()
            .ok_or_else(|| Error::invalid("empty center"))?;
        if vals.get(chart) != Some(&min) {
            return Err(Error::invalid(
                "declared chart does not carry a maximal-absolute-value coordinate",
            ));
        }
        Ok(OpenBallSpec {
            chart,
            center,
            tuple,
        })
    }
}

/// Size functionals on tuples: monotone, continuous, sending any tuple
/// with a zero entry to zero. The product of all entries is the instance
/// everything downstream uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingG {
    Product,
}

/// Apply the functional; valuation form, so the product is a sum and a
/// zero entry (INF) is absorbing.
pub fn g_eval(g: &OrderingG, tuple: &PolyRadiusTuple) -> ValQ {
    match g {
        OrderingG::Product => {
            let mut acc = ValQ::zero();
            for row in &tuple.entries {
                for v in row {
                    acc = acc.add(v);
                }
            }
            acc
        }
    }
}

/// Tuple of the open ball B([a:1], r), r = c^rval ≤ 1, by the three
/// |a|-cases. Valuation convention: case |a| < 1 gives ((0,0),(rval,0)),
/// case |a| = 1 gives ((0,rval),(rval,0)), case |a| > 1 gives
/// ((0, rval − 2·val a),(0,0)).
pub fn tuple_of_ball(a: &Elem, rval: QRat) -> Result<PolyRadiusTuple> {
    if rval < QRat::zero() {
        return Err(Error::RadiusOutOfRange);
    }
    let va = a.val();
    let z = ValQ::zero();
    let r = ValQ::Fin(rval);
    Ok(if va > ValQ::zero() {
        PolyRadiusTuple::two_by_two(z, z, r, z)
    } else if va == ValQ::zero() {
        PolyRadiusTuple::two_by_two(z, r, r, z)
    } else {
        let shifted = ValQ::Fin(rval - QRat::from_integer(2) * va.expect_finite());
        PolyRadiusTuple::two_by_two(z, shifted, z, z)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RadiusOutcome {
    /// Radius valuation of the ball around the base point.
    Radius(QRat),
    /// The tuple cuts out an open neighbourhood of ∞, not an affine ball.
    InfinityNeighborhood,
}

/// Inverse of `tuple_of_ball`: read the ball radius off a tuple.
pub fn radius_of_tuple(a: &Elem, tuple: &PolyRadiusTuple) -> Result<RadiusOutcome> {
    if tuple.n() != 1 {
        return Err(Error::MalformedTuple("only 2×2 tuples convert".into()));
    }
    let e = &tuple.entries;
    let va = a.val();
    let z = ValQ::zero();
    if va > z {
        if e[0][0] != z || e[0][1] != z || e[1][1] != z {
            return Err(Error::MalformedTuple(format!(
                "{tuple} is not a |a|<1 tuple"
            )));
        }
        match e[1][0] {
            ValQ::Fin(r) => Ok(RadiusOutcome::Radius(r)),
            ValQ::Inf => Err(Error::MalformedTuple("zero radius".into())),
        }
    } else if va == z {
        if e[0][0] != z || e[1][1] != z || e[0][1] != e[1][0] {
            return Err(Error::MalformedTuple(format!(
                "{tuple} is not a |a|=1 tuple"
            )));
        }
        match e[0][1] {
            ValQ::Fin(r) => Ok(RadiusOutcome::Radius(r)),
            ValQ::Inf => Err(Error::MalformedTuple("zero radius".into())),
        }
    } else {
        if e[0][0] != z || e[1][0] != z || e[1][1] != z {
            return Err(Error::MalformedTuple(format!(
                "{tuple} is not a |a|>1 tuple"
            )));
        }
        let ValQ::Fin(r) = e[0][1] else {
            return Err(Error::MalformedTuple("zero radius".into()));
        };
        let vaf = va.expect_finite();
        // multiplicative r ≤ 1/|a| becomes valuation r + val(a) ≥ 0
        if r + vaf >= QRat::zero() {
            Ok(RadiusOutcome::Radius(r + QRat::from_integer(2) * vaf))
        } else {
            Ok(RadiusOutcome::InfinityNeighborhood)
        }
    }
}

/// Convert the tuple-product size M″ at a point into the chart-capped ball
/// radius M, by the position of the point between the charts: δ is
/// val T₁(p) − val T₂(p).
pub fn m_from_chart(mpp: ValQ, delta: QRat) -> ValQ {
    if delta > QRat::zero() {
        // |T1| < |T2|
        mpp
    } else if delta.is_zero() {
        mpp.scale(QRat::new(1, 2))
    } else {
        // min{1, M″·(|T1|/|T2|)²} multiplicatively = max(0, val + 2δ)
        mpp.add(&ValQ::Fin(QRat::from_integer(2) * delta))
            .max(ValQ::zero())
    }
}

/// Image of a point of the closed unit disk under the reduction map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResiduePoint {
    /// Closed point of the residue line.
    Closed(FpRatFn),
    /// The generic point: image of the Gauss point of the disk.
    Generic,
}

impl fmt::Display for ResiduePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResiduePoint::Closed(r) => write!(f, "{}", r.to_string_in("s")),
            ResiduePoint::Generic => write!(f, "generic"),
        }
    }
}

/// Reduction of a point of the closed unit disk: type-I points map to
/// their residues, proper subdisks to the residue of any center, and the
/// Gauss point to the generic point.
pub fn reduce_disk_point(x: &BerkPoint) -> Result<ResiduePoint> {
    match x {
        BerkPoint::Infinity => Err(Error::OutsideUnitDisk),
        BerkPoint::TypeI(a) => {
            if a.val().is_negative() {
                return Err(Error::OutsideUnitDisk);
            }
            Ok(ResiduePoint::Closed(a.residue()?))
        }
        BerkPoint::TypeII { center, rho } => {
            if center.val().is_negative() || *rho < QRat::zero() {
                return Err(Error::OutsideUnitDisk);
            }
            if rho.is_zero() {
                Ok(ResiduePoint::Generic)
            } else {
                Ok(ResiduePoint::Closed(center.residue()?))
            }
        }
    }
}

/// Whether `probe` lies in the open unit ball around the type-I point `x`:
/// exactly membership in the reduction fiber of x.
pub fn reduction_fiber_contains(x: &Elem, probe: &BerkPoint) -> Result<bool> {
    if x.val().is_negative() {
        return Err(Error::OutsideUnitDisk);
    }
    match probe {
        BerkPoint::Infinity => Ok(false),
        BerkPoint::TypeI(b) => {
            if b.val().is_negative() {
                return Err(Error::OutsideUnitDisk);
            }
            Ok(b.sub(x).val() > ValQ::zero())
        }
        BerkPoint::TypeII { center, rho } => {
            if center.val().is_negative() {
                return Err(Error::OutsideUnitDisk);
            }
            Ok(*rho > QRat::zero() && center.sub(x).val() > ValQ::zero())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valfield::{qrat, CoeffDomain};

    fn m(p: u64) -> CoeffDomain {
        CoeffDomain::mixed(p).unwrap()
    }

    #[test]
    fn tuple_case_small_center() {
        let d = m(3);
        let a = d.from_i64(3); // |a| < 1
        let t = tuple_of_ball(&a, qrat(1, 1)).unwrap();
        assert_eq!(
            t,
            PolyRadiusTuple::two_by_two(ValQ::zero(), ValQ::zero(), ValQ::int(1), ValQ::zero())
        );
        assert_eq!(
            radius_of_tuple(&a, &t).unwrap(),
            RadiusOutcome::Radius(qrat(1, 1))
        );
    }

    #[test]
    fn tuple_case_unit_center() {
        let d = m(3);
        let a = d.from_i64(1);
        let t = tuple_of_ball(&a, qrat(1, 1)).unwrap();
        assert_eq!(
            t,
            PolyRadiusTuple::two_by_two(ValQ::zero(), ValQ::int(1), ValQ::int(1), ValQ::zero())
        );
        assert_eq!(
            radius_of_tuple(&a, &t).unwrap(),
            RadiusOutcome::Radius(qrat(1, 1))
        );
        assert_eq!(t.to_string(), "((0,1),(1,0))");
    }

    #[test]
    fn tuple_case_large_center() {
        let d = m(2);
        let a = d.from_ratio(1, 2).unwrap(); // val −1, |a| = 2
        let t = tuple_of_ball(&a, qrat(1, 1)).unwrap();
        // r/|a|² has valuation 1 + 2 = 3
        assert_eq!(
            t,
            PolyRadiusTuple::two_by_two(ValQ::zero(), ValQ::int(3), ValQ::zero(), ValQ::zero())
        );
        assert_eq!(
            radius_of_tuple(&a, &t).unwrap(),
            RadiusOutcome::Radius(qrat(1, 1))
        );
        // the worked case: tuple entry 1/8 with |a| = 2 gives ball radius 1/2
        let t8 =
            PolyRadiusTuple::two_by_two(ValQ::zero(), ValQ::int(3), ValQ::zero(), ValQ::zero());
        assert_eq!(
            radius_of_tuple(&a, &t8).unwrap(),
            RadiusOutcome::Radius(qrat(1, 1))
        );
        // entry above 1/|a|: a neighbourhood of infinity
        let tbig =
            PolyRadiusTuple::two_by_two(ValQ::zero(), ValQ::rat(1, 2), ValQ::zero(), ValQ::zero());
        assert_eq!(
            radius_of_tuple(&a, &tbig).unwrap(),
            RadiusOutcome::InfinityNeighborhood
        );
    }

    #[test]
    fn product_functional() {
        let z = ValQ::zero();
        let r = ValQ::int(2);
        let t = PolyRadiusTuple::two_by_two(z, z, r, z);
        assert_eq!(g_eval(&OrderingG::Product, &t), ValQ::int(2));
        let ones = PolyRadiusTuple::two_by_two(z, z, z, z);
        assert_eq!(g_eval(&OrderingG::Product, &ones), ValQ::zero());
        let with_zero = PolyRadiusTuple::two_by_two(z, ValQ::Inf, z, z);
        assert_eq!(g_eval(&OrderingG::Product, &with_zero), ValQ::Inf);
    }

    #[test]
    fn m_conversion_cases() {
        // halving branch: 2^{-2} -> 2^{-1}
        assert_eq!(m_from_chart(ValQ::int(2), qrat(0, 1)), ValQ::int(1));
        // identity branch
        assert_eq!(m_from_chart(ValQ::rat(5, 2), qrat(3, 1)), ValQ::rat(5, 2));
        // capped branch: ratio p, M″ = p^{-1}: min{1, p} = 1
        assert_eq!(m_from_chart(ValQ::int(1), qrat(-1, 1)), ValQ::zero());
        // capped branch without the cap binding
        assert_eq!(m_from_chart(ValQ::int(5), qrat(-1, 1)), ValQ::int(3));
        assert_eq!(m_from_chart(ValQ::Inf, qrat(-1, 1)), ValQ::Inf);
    }

    #[test]
    fn reduction_fiber_examples() {
        let d = m(3);
        let x = d.from_i64(1);
        assert!(reduction_fiber_contains(&x, &BerkPoint::TypeI(d.from_i64(4))).unwrap());
        assert!(!reduction_fiber_contains(&x, &BerkPoint::TypeI(d.from_i64(2))).unwrap());
        assert!(reduction_fiber_contains(&x, &BerkPoint::TypeI(d.from_i64(1))).unwrap());
        assert!(matches!(
            reduction_fiber_contains(&d.from_ratio(1, 3).unwrap(), &BerkPoint::TypeI(d.zero())),
            Err(Error::OutsideUnitDisk)
        ));
    }

    #[test]
    fn reduction_matches_fiber_membership() {
        let d = m(3);
        let x = d.from_i64(1);
        for probe in [0i64, 1, 2, 4, 7, 10, 3, 9] {
            let b = BerkPoint::TypeI(d.from_i64(probe));
            let in_fiber = reduction_fiber_contains(&x, &b).unwrap();
            let same_res = reduce_disk_point(&b).unwrap()
                == reduce_disk_point(&BerkPoint::TypeI(x.clone())).unwrap();
            assert_eq!(in_fiber, same_res, "probe {probe}");
        }
    }

    #[test]
    fn gauss_point_reduces_to_generic() {
        let d = m(5);
        assert_eq!(
            reduce_disk_point(&BerkPoint::gauss(&d)).unwrap(),
            ResiduePoint::Generic
        );
        assert!(matches!(
            reduce_disk_point(&BerkPoint::TypeI(d.from_ratio(1, 5).unwrap())),
            Err(Error::OutsideUnitDisk)
        ));
    }

    #[test]
    fn open_ball_spec_validates_chart() {
        let d = m(3);
        // center [3 : 1]: chart 1 carries the max-|·| coordinate
        let c = vec![d.from_i64(3), d.one()];
        assert!(OpenBallSpec::new(
            1,
            c.clone(),
            tuple_of_ball(&d.from_i64(3), qrat(1, 1)).unwrap()
        )
        .is_ok());
        assert!(
            OpenBallSpec::new(0, c, tuple_of_ball(&d.from_i64(3), qrat(1, 1)).unwrap()).is_err()
        );
    }
}
