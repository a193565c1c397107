//! Points and finite trees on the Berkovich projective line.
//!
//! Only type-I points (field points) and type-II points (closed disks with
//! radius in the value group) are representable here; with value group ℚ
//! and rational inputs nothing else arises. The line is a real tree:
//! two disks are comparable when nested, and any two points have a join,
//! the smallest closed disk containing both. Finite subtrees carry an
//! explicit ρ-parametrization on every edge so that retraction is a clamp.

use crate::valfield::{Elem, QRat, ValQ};
use crate::{Error, Result};
use std::fmt;

#[derive(Debug, Clone)]
pub enum BerkPoint {
    TypeI(Elem),
    /// The closed disk D(center, c^rho); rho is finite by construction
    /// (an infinite radius-valuation would be the type-I center itself).
    TypeII {
        center: Elem,
        rho: QRat,
    },
    Infinity,
}

impl BerkPoint {
    pub fn type_ii(center: Elem, rho: QRat) -> BerkPoint {
        BerkPoint::TypeII { center, rho }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, BerkPoint::Infinity)
    }

    /// Gauss point of the unit disk around 0.
    pub fn gauss(domain: &crate::valfield::CoeffDomain) -> BerkPoint {
        BerkPoint::TypeII {
            center: domain.zero(),
            rho: QRat::from_integer(0),
        }
    }
}

impl PartialEq for BerkPoint {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (BerkPoint::Infinity, BerkPoint::Infinity) => true,
            (BerkPoint::TypeI(a), BerkPoint::TypeI(b)) => a == b,
            (BerkPoint::TypeII { center: a, rho: r }, BerkPoint::TypeII { center: b, rho: s }) => {
                // same closed disk: equal radius and centers within it
                r == s && a.sub(b).val() >= ValQ::Fin(*r)
            }
            _ => false,
        }
    }
}

impl fmt::Display for BerkPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BerkPoint::TypeI(a) => write!(f, "{a}"),
            BerkPoint::TypeII { center, rho } => {
                write!(f, "disk({center}; {})", ValQ::Fin(*rho))
            }
            BerkPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Containment: x ≤ y when the point/disk x lies inside the disk y.
/// Infinity is the top element.
pub fn contained_in(x: &BerkPoint, y: &BerkPoint) -> bool {
    match (x, y) {
        (_, BerkPoint::Infinity) => true,
        (BerkPoint::Infinity, _) => false,
        (BerkPoint::TypeI(a), BerkPoint::TypeI(b)) => a == b,
        (BerkPoint::TypeI(a), BerkPoint::TypeII { center, rho }) => {
            a.sub(center).val() >= ValQ::Fin(*rho)
        }
        (BerkPoint::TypeII { .. }, BerkPoint::TypeI(_)) => false,
        (BerkPoint::TypeII { center: a, rho: r }, BerkPoint::TypeII { center: b, rho: s }) => {
            r >= s && a.sub(b).val() >= ValQ::Fin(*s)
        }
    }
}

/// Smallest closed disk containing both points; joins with Infinity give
/// Infinity, the direction handling is the caller's.
pub fn join(x: &BerkPoint, y: &BerkPoint) -> Result<BerkPoint> {
    match (x, y) {
        (BerkPoint::Infinity, BerkPoint::Infinity) => Err(Error::BothInfinite),
        (BerkPoint::Infinity, _) | (_, BerkPoint::Infinity) => Ok(BerkPoint::Infinity),
        (BerkPoint::TypeI(a), BerkPoint::TypeI(b)) => {
            if a == b {
                Ok(BerkPoint::TypeI(a.clone()))
            } else {
                let d = a.sub(b).val().expect_finite();
                Ok(BerkPoint::type_ii(a.clone(), d))
            }
        }
        (BerkPoint::TypeI(a), BerkPoint::TypeII { center, rho })
        | (BerkPoint::TypeII { center, rho }, BerkPoint::TypeI(a)) => {
            let d = a.sub(center).val();
            let m = ValQ::Fin(*rho).min(d).expect_finite();
            Ok(BerkPoint::type_ii(center.clone(), m))
        }
        (BerkPoint::TypeII { center: a, rho: r }, BerkPoint::TypeII { center: b, rho: s }) => {
            let d = a.sub(b).val();
            let m = ValQ::Fin(*r).min(ValQ::Fin(*s)).min(d).expect_finite();
            Ok(BerkPoint::type_ii(a.clone(), m))
        }
    }
}

/// One edge of a finite tree: the segment ζ_{center, ρ}, ρ ∈ [lo, hi].
/// `hi = Inf` means the deep end is the type-I point `center`; `lo = None`
/// means the shallow end is Infinity (the edge is a ray).
#[derive(Debug, Clone)]
pub struct TreeEdge {
    pub child: usize,
    pub parent: usize,
    pub center: Elem,
    pub hi: ValQ,
    pub lo: Option<QRat>,
}

/// Finite subtree: vertices closed under pairwise joins, edges between
/// containment-adjacent vertices.
#[derive(Debug, Clone)]
pub struct FiniteTree {
    pub vertices: Vec<BerkPoint>,
    pub edges: Vec<TreeEdge>,
}

impl FiniteTree {
    pub fn vertex_index(&self, p: &BerkPoint) -> Option<usize> {
        self.vertices.iter().position(|v| v == p)
    }

    pub fn contains_vertex(&self, p: &BerkPoint) -> bool {
        self.vertex_index(p).is_some()
    }
}

/// Smallest subtree containing all the input points: vertex set is the
/// inputs together with all pairwise joins, edges split at branch vertices.
pub fn convex_hull(points: &[BerkPoint]) -> Result<FiniteTree> {
    if points.is_empty() {
        return Err(Error::EmptyTree);
    }
    let mut verts: Vec<BerkPoint> = vec![];
    let add = |p: BerkPoint, verts: &mut Vec<BerkPoint>| {
        if !verts.contains(&p) {
            verts.push(p);
        }
    };
    for p in points {
        add(p.clone(), &mut verts);
    }
    let finite: Vec<BerkPoint> = verts.iter().filter(|p| !p.is_infinity()).cloned().collect();
    for i in 0..finite.len() {
        for j in i + 1..finite.len() {
            let j_ = join(&finite[i], &finite[j])?;
            add(j_, &mut verts);
        }
    }

    // parent = the deepest vertex strictly containing each vertex
    let mut edges = vec![];
    for (i, v) in verts.iter().enumerate() {
        if v.is_infinity() {
            continue;
        }
        let mut best: Option<usize> = None;
        for (j, w) in verts.iter().enumerate() {
            if i == j || w.is_infinity() {
                continue;
            }
            if contained_in(v, w) && v != w {
                match best {
                    None => best = Some(j),
                    Some(b) => {
                        if contained_in(w, &verts[b]) {
                            best = Some(j);
                        }
                    }
                }
            }
        }
        let (center, hi) = match v {
            BerkPoint::TypeI(a) => (a.clone(), ValQ::Inf),
            BerkPoint::TypeII { center, rho } => (center.clone(), ValQ::Fin(*rho)),
            BerkPoint::Infinity => unreachable!(),
        };
        match best {
            Some(parent) => {
                let lo = match &verts[parent] {
                    BerkPoint::TypeII { rho, .. } => Some(*rho),
                    _ => unreachable!("finite parent must be a disk"),
                };
                edges.push(TreeEdge {
                    child: i,
                    parent,
                    center,
                    hi,
                    lo,
                });
            }
            None => {
                // root-most finite vertex: attach toward Infinity if present
                if let Some(inf) = verts.iter().position(|w| w.is_infinity()) {
                    edges.push(TreeEdge {
                        child: i,
                        parent: inf,
                        center,
                        hi,
                        lo: None,
                    });
                }
            }
        }
    }
    Ok(FiniteTree {
        vertices: verts,
        edges,
    })
}

/// The point of the segment {ζ_{c,ρ}} closest to x along the tree: project,
/// then clamp to the edge's ρ-interval.
fn project_to_edge(x: &BerkPoint, e: &TreeEdge) -> BerkPoint {
    let d: ValQ = match x {
        BerkPoint::Infinity => match e.lo {
            Some(lo) => ValQ::Fin(lo),
            None => return BerkPoint::Infinity,
        },
        BerkPoint::TypeI(a) => a.sub(&e.center).val(),
        BerkPoint::TypeII { center, rho } => ValQ::Fin(*rho).min(center.sub(&e.center).val()),
    };
    let mut rho = d.min(e.hi);
    if let Some(lo) = e.lo {
        rho = rho.max(ValQ::Fin(lo));
    }
    match rho {
        ValQ::Inf => BerkPoint::TypeI(e.center.clone()),
        ValQ::Fin(r) => BerkPoint::type_ii(e.center.clone(), r),
    }
}

/// Retraction onto a finite subtree: the first point of the tree on the
/// path from x toward it. Idempotent on tree points.
pub fn retract(x: &BerkPoint, tree: &FiniteTree) -> Result<BerkPoint> {
    if tree.vertices.is_empty() {
        return Err(Error::EmptyTree);
    }
    if tree.edges.is_empty() {
        return Ok(tree.vertices[0].clone());
    }
    let mut best: Option<BerkPoint> = None;
    for e in &tree.edges {
        let cand = project_to_edge(x, e);
        best = Some(match best {
            None => cand,
            Some(b) => {
                if contained_in(&cand, &b) && cand != b {
                    cand
                } else {
                    b
                }
            }
        });
    }
    Ok(best.unwrap())
}

/// Vertices of the tree lying on the path between two of its points,
/// ordered from x to y.
pub fn path_vertices(x: &BerkPoint, y: &BerkPoint, tree: &FiniteTree) -> Result<Vec<BerkPoint>> {
    if tree.vertices.is_empty() {
        return Err(Error::EmptyTree);
    }
    let j = join(x, y)?;
    let on_up_path =
        |from: &BerkPoint, v: &BerkPoint| -> bool { contained_in(from, v) && contained_in(v, &j) };
    let mut up: Vec<BerkPoint> = tree
        .vertices
        .iter()
        .filter(|v| on_up_path(x, v))
        .cloned()
        .collect();
    let mut down: Vec<BerkPoint> = tree
        .vertices
        .iter()
        .filter(|v| on_up_path(y, v) && !up.contains(v))
        .cloned()
        .collect();
    let depth_key = |p: &BerkPoint| -> (u8, ValQ) {
        match p {
            BerkPoint::TypeI(_) => (1, ValQ::Inf),
            BerkPoint::TypeII { rho, .. } => (1, ValQ::Fin(*rho)),
            BerkPoint::Infinity => (0, ValQ::zero()),
        }
    };
    up.sort_by(|a, b| depth_key(b).cmp(&depth_key(a)));
    down.sort_by_key(|a| depth_key(a));
    up.extend(down);
    Ok(up)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valfield::{qrat, CoeffDomain};

    fn m(p: u64) -> CoeffDomain {
        CoeffDomain::mixed(p).unwrap()
    }

    fn pt(d: &CoeffDomain, n: i64) -> BerkPoint {
        BerkPoint::TypeI(d.from_i64(n))
    }

    #[test]
    fn join_examples() {
        for p in [2u64, 3, 5] {
            let d = m(p);
            let j = join(&pt(&d, 0), &BerkPoint::TypeI(d.uniformizer())).unwrap();
            assert_eq!(j, BerkPoint::type_ii(d.zero(), qrat(1, 1)));
        }
        let d = m(3);
        assert_eq!(join(&pt(&d, 7), &pt(&d, 7)).unwrap(), pt(&d, 7));
        let d2 = m(2);
        let j = join(&pt(&d2, 1), &pt(&d2, -1)).unwrap();
        assert_eq!(j, BerkPoint::type_ii(d2.from_i64(1), qrat(1, 1)));
        assert!(matches!(
            join(&BerkPoint::Infinity, &BerkPoint::Infinity),
            Err(Error::BothInfinite)
        ));
    }

    #[test]
    fn disk_equality_is_disk_equality() {
        let d = m(3);
        let a = BerkPoint::type_ii(d.from_i64(1), qrat(1, 1));
        let b = BerkPoint::type_ii(d.from_i64(4), qrat(1, 1));
        let c = BerkPoint::type_ii(d.from_i64(2), qrat(1, 1));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn spine_retraction() {
        let d = m(5);
        let spine = convex_hull(&[pt(&d, 0), BerkPoint::Infinity]).unwrap();
        assert_eq!(spine.edges.len(), 1);
        let x = BerkPoint::type_ii(d.from_i64(5), qrat(3, 1));
        assert_eq!(
            retract(&x, &spine).unwrap(),
            BerkPoint::type_ii(d.zero(), qrat(1, 1))
        );
        let g = BerkPoint::gauss(&d);
        assert_eq!(retract(&g, &spine).unwrap(), g);
        let d3 = m(3);
        let spine3 = convex_hull(&[pt(&d3, 0), BerkPoint::Infinity]).unwrap();
        assert_eq!(
            retract(&pt(&d3, 1), &spine3).unwrap(),
            BerkPoint::gauss(&d3)
        );
        assert_eq!(
            retract(&BerkPoint::Infinity, &spine3).unwrap(),
            BerkPoint::Infinity
        );
    }

    #[test]
    fn tripod_hull() {
        let d = m(3);
        let t = convex_hull(&[pt(&d, 0), pt(&d, 1), BerkPoint::Infinity]).unwrap();
        assert_eq!(t.vertices.len(), 4);
        assert!(t.contains_vertex(&BerkPoint::gauss(&d)));
        assert_eq!(t.edges.len(), 3);
    }

    #[test]
    fn singleton_hull() {
        let d = m(3);
        let x = BerkPoint::type_ii(d.from_i64(2), qrat(5, 1));
        let t = convex_hull(&[x.clone()]).unwrap();
        assert_eq!(t.vertices.len(), 1);
        assert!(t.edges.is_empty());
        let far = pt(&d, 100);
        assert_eq!(retract(&far, &t).unwrap(), x);
    }

    #[test]
    fn hull_is_input_order_independent() {
        let d = m(3);
        let pts = vec![pt(&d, 0), pt(&d, 1), pt(&d, 3), BerkPoint::Infinity];
        let t1 = convex_hull(&pts).unwrap();
        let rev: Vec<BerkPoint> = pts.iter().rev().cloned().collect();
        let t2 = convex_hull(&rev).unwrap();
        assert_eq!(t1.vertices.len(), t2.vertices.len());
        for v in &t1.vertices {
            assert!(t2.contains_vertex(v));
        }
    }

    #[test]
    fn retraction_composition_is_retraction() {
        let d = m(3);
        let tree = convex_hull(&[pt(&d, 0), pt(&d, 1), BerkPoint::Infinity]).unwrap();
        let samples = vec![
            pt(&d, 7),
            pt(&d, -2),
            BerkPoint::type_ii(d.from_i64(10), qrat(3, 2)),
            BerkPoint::type_ii(d.from_i64(1), qrat(2, 1)),
        ];
        for x in samples {
            let r1 = retract(&x, &tree).unwrap();
            let r2 = retract(&r1, &tree).unwrap();
            assert_eq!(r1, r2);
        }
    }

    #[test]
    fn retraction_depth_is_monotone_along_a_spine() {
        // points hanging deeper along one branch retract to deeper images
        let d = m(3);
        let spine = convex_hull(&[pt(&d, 0), BerkPoint::Infinity]).unwrap();
        let mut last: Option<BerkPoint> = None;
        for k in (-3i64..=4).rev() {
            let x = BerkPoint::TypeI(d.from_i64(2).mul(&d.uniformizer().powi(k)));
            let r = retract(&x, &spine).unwrap();
            assert_eq!(r, BerkPoint::type_ii(d.zero(), qrat(k, 1)));
            if let Some(prev) = &last {
                assert!(
                    contained_in(prev, &r),
                    "shallower points retract to larger disks"
                );
            }
            last = Some(r);
        }
    }

    #[test]
    fn points_and_trees_cross_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<BerkPoint>();
        assert_send_sync::<FiniteTree>();
        assert_send_sync::<crate::valfield::Elem>();
        assert_send_sync::<crate::valfield::CoeffDomain>();
    }

    #[test]
    fn path_between_leaves() {
        let d = m(3);
        let tree = convex_hull(&[pt(&d, 0), pt(&d, 1), BerkPoint::Infinity]).unwrap();
        let path = path_vertices(&pt(&d, 0), &pt(&d, 1), &tree).unwrap();
        assert_eq!(path.len(), 3);
        assert_eq!(path[0], pt(&d, 0));
        assert_eq!(path[1], BerkPoint::gauss(&d));
        assert_eq!(path[2], pt(&d, 1));
    }
}
