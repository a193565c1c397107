//! Candidate skeleta and exact verification of the two structural claims:
//! the splitting radius is constant on retraction fibers, and its
//! valuation is piecewise linear along the skeleton.
//!
//! The skeleton itself is a heuristic — the spine through 0 and ∞ plus the
//! branch values of the map — and acceptance is defined by the verifier,
//! not by matching any canonical subtree. Piecewise linearity is checked by
//! exact collinearity of rational samples, with breakpoints solved exactly
//! as line intersections and confirmed by evaluation.

use super::{fiber_poly, split_radius_at_point, FiberPoint, RationalMapNF};
use crate::berkline::{convex_hull, retract, BerkPoint, FiniteTree};
use crate::roots::resultant::{resultant_z, BiPoly};
use crate::roots::{isolate, ClusterNode, ClusterTree};
use crate::valfield::poly::Poly;
use crate::valfield::{Elem, QRat, ValQ};
use crate::{Error, Result};
use num_traits::Signed;
use std::collections::BTreeMap;

/// Branch values of the map on the target line: the points whose fiber has
/// fewer than d distinct preimages.
#[derive(Debug, Clone)]
pub struct BranchValues {
    /// Cluster tree of the z-discriminant of P − wQ, as a polynomial in w;
    /// None when the discriminant is constant.
    pub tree: Option<ClusterTree>,
    /// Verified (or unexcludable) finite branch values.
    pub finite: Vec<Elem>,
    /// Whether the fiber over ∞ is degenerate.
    pub includes_infinity: bool,
}

fn fiber_distinct_count(map: &RationalMapNF, x: &FiberPoint) -> Result<usize> {
    let fiber = fiber_poly(map, x);
    let finite = if fiber.poly.degree().is_none_or(|d| d == 0) {
        0
    } else {
        crate::roots::distinct_root_count_full(&fiber.poly)?
    };
    Ok(finite + usize::from(fiber.infinity_mult > 0))
}

/// Branch values via the z-discriminant of the fiber family P(z) − w·Q(z),
/// isolated as clusters in the w-line. ∞ is appended when the fiber over ∞
/// is degenerate.
pub fn branch_values(map: &RationalMapNF) -> Result<BranchValues> {
    let domain = map.domain().clone();
    let n = map.d_sep;
    // F(z, w) = P(z) − w·Q(z) as a z-polynomial with w-coefficients
    let wline = |i: usize| {
        Poly::new(
            domain.clone(),
            vec![map.num.coeff(i), map.den.coeff(i).neg()],
        )
    };
    let mut fc: Vec<Poly> = (0..=n).map(wline).collect();
    while fc.last().is_some_and(|c| c.is_zero()) {
        fc.pop();
    }
    let mut dfc: Vec<Poly> = (1..=n)
        .map(|i| wline(i).scale(&domain.from_i64(i as i64)))
        .collect();
    while dfc.last().is_some_and(|c| c.is_zero()) {
        dfc.pop();
    }

    let mut finite: Vec<Elem> = vec![];
    let mut tree = None;
    if !fc.is_empty() && !dfc.is_empty() {
        let disc = resultant_z(
            &BiPoly {
                coeffs: fc,
                domain: domain.clone(),
            },
            &BiPoly {
                coeffs: dfc,
                domain: domain.clone(),
            },
        )?;
        if disc.is_zero() {
            return Err(Error::invalid("identically vanishing discriminant"));
        }
        if disc.degree().is_some_and(|d| d > 0) {
            let t = isolate(&disc)?;
            let mut leaves = vec![];
            collect_leaf_centers(&t.children, &mut leaves);
            for (center, certain) in leaves {
                // spurious candidates from leading-coefficient drops get
                // filtered when the center is known exactly
                if certain {
                    let dc = fiber_distinct_count(map, &FiberPoint::Affine(center.clone()))?;
                    if dc < map.d_sep {
                        finite.push(center);
                    }
                } else {
                    finite.push(center);
                }
            }
            tree = Some(t);
        }
    }
    // a degree drop of two or more puts a ramified preimage at ∞
    if map.num.degree() == Some(n) && map.den.degree() == Some(n) {
        let w0 = map.num.lc().div(&map.den.lc());
        let drop = fiber_poly(map, &FiberPoint::Affine(w0.clone()));
        if drop.infinity_mult >= 2 && !finite.contains(&w0) {
            let dc = fiber_distinct_count(map, &FiberPoint::Affine(w0.clone()))?;
            if dc < map.d_sep {
                finite.push(w0);
            }
        }
    }
    let includes_infinity = fiber_distinct_count(map, &FiberPoint::Infinity)? < map.d_sep;
    finite.sort_by_key(|c| c.to_string());
    finite.dedup();
    Ok(BranchValues {
        tree,
        finite,
        includes_infinity,
    })
}

fn collect_leaf_centers(nodes: &[ClusterNode], out: &mut Vec<(Elem, bool)>) {
    for n in nodes {
        if n.children.is_empty() {
            out.push((n.center.clone(), n.center_exact));
        } else {
            collect_leaf_centers(&n.children, out);
        }
    }
}

/// Candidate skeleton: the convex hull of {0, ∞}, the branch values, and
/// any extra vertices the caller wants to force.
pub fn skeleton_for(map: &RationalMapNF) -> Result<FiniteTree> {
    skeleton_with_extra(map, &[])
}

pub fn skeleton_with_extra(map: &RationalMapNF, extra: &[BerkPoint]) -> Result<FiniteTree> {
    let domain = map.domain().clone();
    let bv = branch_values(map)?;
    let mut pts = vec![BerkPoint::TypeI(domain.zero()), BerkPoint::Infinity];
    for c in bv.finite {
        pts.push(BerkPoint::TypeI(c));
    }
    pts.extend(extra.iter().cloned());
    convex_hull(&pts)
}

/// One maximal linear piece of val f along an edge: on [lo, hi] the value
/// is `value_lo + slope·(ρ − lo)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlPiece {
    pub lo: QRat,
    pub hi: QRat,
    pub slope: QRat,
    pub value_lo: QRat,
}

#[derive(Debug, Clone)]
pub struct EdgeReport {
    pub from: String,
    pub to: String,
    pub center: Elem,
    /// Sampled (ρ, val f) pairs, ascending in ρ.
    pub samples: Vec<(QRat, QRat)>,
    pub pieces: Vec<PlPiece>,
}

#[derive(Debug, Clone)]
pub struct ConstancySample {
    pub point: BerkPoint,
    pub image: BerkPoint,
    pub val_at_point: ValQ,
    pub val_at_image: ValQ,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct SkeletonReport {
    pub tree: FiniteTree,
    pub edges: Vec<EdgeReport>,
    pub constancy: Vec<ConstancySample>,
    pub pl_ok: bool,
    pub constancy_ok: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyBudget {
    /// Cap on evaluations of val f per edge during piecewise-linear fitting.
    pub edge_samples: usize,
    /// Number of off-skeleton fiber-constancy samples.
    pub constancy_samples: usize,
}

impl Default for VerifyBudget {
    fn default() -> Self {
        VerifyBudget {
            edge_samples: 64,
            constancy_samples: 30,
        }
    }
}

fn collinear(a: (QRat, QRat), b: (QRat, QRat), c: (QRat, QRat)) -> bool {
    (b.1 - a.1) * (c.0 - a.0) == (c.1 - a.1) * (b.0 - a.0)
}

struct EdgeFitter<'a> {
    map: &'a RationalMapNF,
    center: Elem,
    samples: BTreeMap<QRat, QRat>,
    evals: usize,
    budget: usize,
}

impl<'a> EdgeFitter<'a> {
    fn eval(&mut self, rho: QRat) -> Result<QRat> {
        if let Some(v) = self.samples.get(&rho) {
            return Ok(*v);
        }
        if self.evals >= self.budget {
            return Err(Error::BudgetExceeded(format!(
                "edge through {} after {} samples",
                self.center, self.evals
            )));
        }
        self.evals += 1;
        let r = super::split_radius_typeii(self.map, &self.center, rho)?;
        let v = r
            .val
            .finite()
            .ok_or_else(|| Error::invalid("vanishing splitting radius at a disk point"))?;
        self.samples.insert(rho, v);
        Ok(v)
    }

    fn refine(&mut self, a: QRat, b: QRat, depth: usize) -> Result<()> {
        let fa = self.eval(a)?;
        let fb = self.eval(b)?;
        let two = QRat::from_integer(2);
        let four = QRat::from_integer(4);
        let mid = (a + b) / two;
        let fm = self.eval(mid)?;
        let q1 = (a * QRat::from_integer(3) + b) / four;
        let q3 = (a + b * QRat::from_integer(3)) / four;
        if collinear((a, fa), (mid, fm), (b, fb)) {
            let f1 = self.eval(q1)?;
            let f3 = self.eval(q3)?;
            if collinear((a, fa), (q1, f1), (b, fb)) && collinear((a, fa), (q3, f3), (b, fb)) {
                return Ok(());
            }
        }
        // two-line shortcut: a single interior breakpoint resolves exactly
        let f1 = self.eval(q1)?;
        let f3 = self.eval(q3)?;
        let left_ok = collinear((a, fa), (q1, f1), (mid, fm));
        let right_ok = collinear((mid, fm), (q3, f3), (b, fb));
        if left_ok && right_ok {
            let sl = (fm - fa) / (mid - a);
            let sr = (fb - fm) / (b - mid);
            if sl != sr {
                // intersection of y = fa + sl(x−a) and y = fb + sr(x−b)
                let rho_star = (fb - fa + sl * a - sr * b) / (sl - sr);
                if rho_star > a && rho_star < b {
                    let fstar = self.eval(rho_star)?;
                    let on_left = fstar == fa + sl * (rho_star - a);
                    let on_right = fstar == fb + sr * (rho_star - b);
                    if on_left && on_right {
                        return Ok(());
                    }
                }
            }
        }
        if depth == 0 {
            return Err(Error::BudgetExceeded(format!(
                "piecewise-linear fit did not stabilise on [{a}, {b}]"
            )));
        }
        self.refine(a, mid, depth - 1)?;
        self.refine(mid, b, depth - 1)
    }

    fn pieces(&self) -> Vec<PlPiece> {
        let pts: Vec<(QRat, QRat)> = self.samples.iter().map(|(&r, &v)| (r, v)).collect();
        let mut out: Vec<PlPiece> = vec![];
        if pts.len() < 2 {
            return out;
        }
        let mut start = pts[0];
        let mut prev = pts[1];
        let mut slope = (prev.1 - start.1) / (prev.0 - start.0);
        for &p in &pts[2..] {
            if collinear(start, prev, p) {
                prev = p;
                continue;
            }
            out.push(PlPiece {
                lo: start.0,
                hi: prev.0,
                slope,
                value_lo: start.1,
            });
            start = prev;
            prev = p;
            slope = (prev.1 - start.1) / (prev.0 - start.0);
        }
        out.push(PlPiece {
            lo: start.0,
            hi: prev.0,
            slope,
            value_lo: start.1,
        });
        out
    }
}

fn sampling_window(map: &RationalMapNF, tree: &FiniteTree) -> QRat {
    let mut w = QRat::from_integer(3);
    let mut note = |v: ValQ| {
        if let ValQ::Fin(q) = v {
            let bound = q.abs() + QRat::from_integer(2);
            if bound > w {
                w = bound;
            }
        }
    };
    for v in &tree.vertices {
        match v {
            BerkPoint::TypeI(a) => note(a.val()),
            BerkPoint::TypeII { center, rho } => {
                note(center.val());
                note(ValQ::Fin(*rho));
            }
            BerkPoint::Infinity => {}
        }
    }
    for c in map.num.coeffs().iter().chain(map.den.coeffs()) {
        note(c.val());
    }
    w
}

/// Exact verification of both conclusions on a candidate skeleton. On a
/// constancy failure the witnessing retraction images are grafted onto the
/// skeleton and the verification reruns once.
pub fn verify_theorem(
    map: &RationalMapNF,
    tree: &FiniteTree,
    budget: VerifyBudget,
) -> Result<SkeletonReport> {
    let first = verify_once(map, tree, budget)?;
    if first.constancy_ok {
        return Ok(first);
    }
    // graft the witnessing retraction images as candidate breakpoints and
    // rerun once
    let mut extra: Vec<BerkPoint> = tree.vertices.clone();
    for s in first.constancy.iter().filter(|s| !s.ok) {
        extra.push(s.image.clone());
        extra.push(s.point.clone());
    }
    let enlarged = convex_hull(&extra)?;
    verify_once(map, &enlarged, budget)
}

fn verify_once(
    map: &RationalMapNF,
    tree: &FiniteTree,
    budget: VerifyBudget,
) -> Result<SkeletonReport> {
    let window = sampling_window(map, tree);
    let mut edge_reports = vec![];
    let mut pl_ok = true;
    for e in &tree.edges {
        let lo = e.lo.unwrap_or(-window);
        let hi = match e.hi {
            ValQ::Fin(h) => h,
            ValQ::Inf => window.max(lo + QRat::from_integer(3)),
        };
        if lo >= hi {
            continue;
        }
        let mut fitter = EdgeFitter {
            map,
            center: e.center.clone(),
            samples: BTreeMap::new(),
            evals: 0,
            budget: budget.edge_samples,
        };
        fitter.refine(lo, hi, 12)?;
        let pieces = fitter.pieces();
        // every sample must sit exactly on its fitted piece
        for (&r, &v) in &fitter.samples {
            let piece = pieces.iter().find(|p| p.lo <= r && r <= p.hi);
            let ok = piece.is_some_and(|p| p.value_lo + p.slope * (r - p.lo) == v);
            if !ok {
                pl_ok = false;
            }
        }
        edge_reports.push(EdgeReport {
            from: tree.vertices[e.child].to_string(),
            to: tree.vertices[e.parent].to_string(),
            center: e.center.clone(),
            samples: fitter.samples.into_iter().collect(),
            pieces,
        });
    }

    let constancy = constancy_samples(map, tree, budget.constancy_samples)?;
    let constancy_ok = constancy.iter().all(|c| c.ok);
    Ok(SkeletonReport {
        tree: tree.clone(),
        edges: edge_reports,
        constancy,
        pl_ok,
        constancy_ok,
    })
}

fn constancy_samples(
    map: &RationalMapNF,
    tree: &FiniteTree,
    want: usize,
) -> Result<Vec<ConstancySample>> {
    let domain = map.domain().clone();
    let window = sampling_window(map, tree);
    let mut out = vec![];
    let unit_offsets: Vec<Elem> = vec![
        domain.one(),
        domain.one().add(&domain.uniformizer()),
        domain.from_i64(2),
        domain.from_i64(2).add(&domain.uniformizer()),
        domain.from_i64(3),
    ];
    'outer: for round in 0.. {
        if out.len() >= want {
            break;
        }
        let mut produced = false;
        for e in &tree.edges {
            if out.len() >= want {
                break 'outer;
            }
            let lo = e.lo.unwrap_or(-window);
            let hi = match e.hi {
                ValQ::Fin(h) => h,
                ValQ::Inf => window,
            };
            if lo >= hi {
                continue;
            }
            // integer-valuation targets inside the edge, shifted per round
            let lo_i = lo.ceil().to_integer() + 1 + round as i64;
            let t = QRat::from_integer(lo_i);
            if t >= hi {
                continue;
            }
            let Some(pi) = domain.elem_of_val(t) else {
                continue;
            };
            let target = BerkPoint::type_ii(e.center.clone(), t);
            let mut per_target = 0usize;
            for (gi, g) in unit_offsets.iter().enumerate() {
                if out.len() >= want || per_target >= 6 {
                    break;
                }
                let x = e.center.add(&pi.mul(g));
                let xp = BerkPoint::TypeI(x.clone());
                if tree.contains_vertex(&xp) {
                    continue;
                }
                if retract(&xp, tree)? != target {
                    continue;
                }
                let vx = split_radius_at_point(map, &xp)?.val;
                let vi = split_radius_at_point(map, &target)?.val;
                out.push(ConstancySample {
                    point: xp.clone(),
                    image: target.clone(),
                    val_at_point: vx,
                    val_at_image: vi,
                    ok: vx == vi,
                });
                per_target += 1;
                produced = true;
                // type-II samples hanging off the same point
                if out.len() < want && gi < 2 {
                    let deep = BerkPoint::type_ii(x.clone(), t + QRat::from_integer(1));
                    if retract(&deep, tree)? == target {
                        let vd = split_radius_at_point(map, &deep)?.val;
                        out.push(ConstancySample {
                            point: deep.clone(),
                            image: target.clone(),
                            val_at_point: vd,
                            val_at_image: vi,
                            ok: vd == vi,
                        });
                        per_target += 1;
                    }
                }
            }
        }
        if !produced {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splitting::normalize;
    use crate::valfield::{qrat, CoeffDomain};

    fn m(p: u64) -> CoeffDomain {
        CoeffDomain::mixed(p).unwrap()
    }

    fn e(p: u64) -> CoeffDomain {
        CoeffDomain::equal(p).unwrap()
    }

    fn map_zk(d: &CoeffDomain, k: usize) -> RationalMapNF {
        let mut c = vec![0i64; k + 1];
        c[k] = 1;
        normalize(&Poly::from_i64_coeffs(d, &c), &Poly::constant(d.one())).unwrap()
    }

    #[test]
    fn branch_values_of_square() {
        let d = m(3);
        let sq = map_zk(&d, 2);
        let bv = branch_values(&sq).unwrap();
        assert_eq!(bv.finite.len(), 1);
        assert!(bv.finite[0].is_zero());
        assert!(bv.includes_infinity);
    }

    #[test]
    fn branch_values_of_artin_schreier() {
        for p in [2u64, 3] {
            let d = e(p);
            let mut c = vec![0i64; p as usize + 1];
            c[1] = -1;
            c[p as usize] = 1;
            let map = normalize(&Poly::from_i64_coeffs(&d, &c), &Poly::constant(d.one())).unwrap();
            let bv = branch_values(&map).unwrap();
            assert!(bv.finite.is_empty(), "p = {p}: {:?}", bv.finite);
            assert!(bv.includes_infinity);
        }
    }

    #[test]
    fn branch_values_of_z_plus_inverse() {
        let d = m(3);
        let map = normalize(
            &Poly::from_i64_coeffs(&d, &[1, 0, 1]),
            &Poly::from_i64_coeffs(&d, &[0, 1]),
        )
        .unwrap();
        let bv = branch_values(&map).unwrap();
        let mut centers: Vec<String> = bv.finite.iter().map(|c| c.to_string()).collect();
        centers.sort();
        assert_eq!(centers, vec!["-2".to_string(), "2".to_string()]);
        assert!(!bv.includes_infinity);
    }

    #[test]
    fn skeleton_of_square_is_spine() {
        let d = m(3);
        let sq = map_zk(&d, 2);
        let t = skeleton_for(&sq).unwrap();
        assert_eq!(t.vertices.len(), 2);
        assert_eq!(t.edges.len(), 1);
    }

    #[test]
    fn verify_square_spine() {
        let d = m(3);
        let sq = map_zk(&d, 2);
        let t = skeleton_for(&sq).unwrap();
        let rep = verify_theorem(&sq, &t, VerifyBudget::default()).unwrap();
        assert!(rep.pl_ok);
        assert!(rep.constancy_ok);
        assert_eq!(rep.edges.len(), 1);
        let pieces = &rep.edges[0].pieces;
        assert_eq!(pieces.len(), 2, "{pieces:?}");
        // breakpoint at the Gauss point, slopes 0 then 1
        assert_eq!(pieces[0].hi, qrat(0, 1));
        assert_eq!(pieces[0].slope, qrat(0, 1));
        assert_eq!(pieces[1].lo, qrat(0, 1));
        assert_eq!(pieces[1].slope, qrat(1, 1));
    }

    #[test]
    fn verify_artin_schreier_flat() {
        let d = e(2);
        let map = normalize(
            &Poly::from_i64_coeffs(&d, &[0, -1, 1]),
            &Poly::constant(d.one()),
        )
        .unwrap();
        let t = skeleton_for(&map).unwrap();
        let rep = verify_theorem(&map, &t, VerifyBudget::default()).unwrap();
        assert!(rep.pl_ok && rep.constancy_ok);
        for e in &rep.edges {
            assert_eq!(e.pieces.len(), 1, "single flat piece per edge");
            assert_eq!(e.pieces[0].slope, qrat(0, 1));
            assert_eq!(e.pieces[0].value_lo, qrat(0, 1));
        }
    }
}
