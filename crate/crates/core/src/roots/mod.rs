//! Isolation of root clusters over the algebraic closure.
//!
//! The engine descends through Newton polygons: the polygon at the current
//! center splits roots by valuation, the residue polynomial of each slope
//! group splits them by residue, simple residue roots lift to refined
//! centers, repeated residue roots recenter and recurse. A simple residue
//! factor of degree e > 1 certifies a cohort of e conjugate roots sitting
//! pairwise at the current scale. Where no representable center exists
//! (ramified scale or unliftable residue) the cluster is left pending and
//! settled afterwards against the resultant distance oracle; if the oracle
//! data does not pin the interior down uniquely, isolation fails loudly
//! with `UnresolvedCluster` rather than guessing.
//!
//! Two surfaces exist: the strict [`isolate`], which insists on
//! representable centers for every leaf and reports the offending residue
//! factor otherwise, and the crate-internal system isolation used by the
//! splitting engine, which tolerates virtual centers because all of its
//! later evaluations are tree-based.

pub mod resultant;

use crate::polygon::newton_polygon_of;
use crate::valfield::fp::FpRatFn;
use crate::valfield::poly::{separable_parts, Poly};
use crate::valfield::{bp_divrem, bp_gcd, bp_trim, CoeffDomain, Elem, QRat, ValQ};
use crate::{Error, Result};
use num_traits::Zero;
use std::collections::BTreeMap;

pub use resultant::{cross_distance_multiset, flatten_multiset, pairwise_distance_multiset};

// ---------------------------------------------------------------------------
// Residue polynomials over F_p(s)
// ---------------------------------------------------------------------------

type RPoly = Vec<FpRatFn>;

fn rp_deg(r: &RPoly) -> usize {
    assert!(!r.is_empty());
    r.len() - 1
}

fn rp_monic(r: &RPoly) -> RPoly {
    let lead = r.last().unwrap().clone();
    r.iter().map(|c| c.div(&lead).unwrap()).collect()
}

fn rp_derivative(r: &RPoly, p: u64) -> RPoly {
    if r.len() <= 1 {
        return vec![];
    }
    let mut out = vec![];
    for (i, c) in r.iter().enumerate().skip(1) {
        out.push(c.mul(&FpRatFn::constant(p, (i as u64) % p)));
    }
    bp_trim(out)
}

fn rp_compress(r: &RPoly, p: usize) -> Option<RPoly> {
    let mut out = vec![];
    for (i, c) in r.iter().enumerate() {
        if i % p == 0 {
            out.push(c.clone());
        } else if !c.is_zero() {
            return None;
        }
    }
    Some(bp_trim(out))
}

/// Coefficient Frobenius: every root gets raised to the p^k-th power.
fn rp_twist(r: &RPoly, p: u64, k: u32) -> RPoly {
    let e = (p as u128).pow(k) as u64;
    r.iter().map(|c| c.pow(e)).collect()
}

/// One residue class family: `q` separable monic. The actual residues are
/// the p^depth-th roots of the roots of q; each actual residue carries
/// `count` roots of the slope group above it.
#[derive(Debug, Clone)]
struct ResidueClass {
    q: RPoly,
    count: usize,
    depth: u32,
}

/// Multiplicity ladder for residue polynomials, characteristic p aware.
fn residue_ladder(r: &RPoly, p: u64) -> Result<Vec<ResidueClass>> {
    let mut out = vec![];
    ladder_rec(&rp_monic(r), p, 1, 0, &mut out)?;
    Ok(out)
}

fn ladder_rec(
    r: &RPoly,
    p: u64,
    count: usize,
    depth: u32,
    out: &mut Vec<ResidueClass>,
) -> Result<()> {
    if rp_deg(r) == 0 {
        return Ok(());
    }
    let model = FpRatFn::zero(p);
    let rd = rp_derivative(r, p);
    if rd.is_empty() {
        let s = rp_compress(r, p as usize)
            .ok_or_else(|| Error::invalid("residue derivative vanished without p-power shape"))?;
        return ladder_rec(&rp_monic(&s), p, count * p as usize, depth + 1, out);
    }
    let mut c = bp_gcd(r, &rd, &model);
    let mut w = bp_divrem(r, &c, &model).0;
    let mut i = 1usize;
    while rp_deg(&w) > 0 {
        let y = bp_gcd(&w, &c, &model);
        let z = bp_divrem(&w, &y, &model).0;
        if rp_deg(&z) > 0 {
            let zd = rp_derivative(&z, p);
            if zd.is_empty() {
                ladder_rec(&rp_monic(&z), p, count * i, depth, out)?;
            } else {
                out.push(ResidueClass {
                    q: rp_monic(&z),
                    count: count * i,
                    depth,
                });
            }
        }
        i += 1;
        c = bp_divrem(&c, &y, &model).0;
        w = y;
    }
    if rp_deg(&c) > 0 {
        ladder_rec(&rp_monic(&c), p, count, depth, out)?;
    }
    Ok(())
}

/// Lift a residue-field element back into the domain: constants lift to
/// integers, the reduced parameter s lifts to t^b·π^{-c}.
fn residue_lift(domain: &CoeffDomain, r: &FpRatFn) -> Elem {
    if let Some(c) = r.as_constant() {
        return domain.from_i64(c as i64);
    }
    let (b, c) = domain
        .residue_parameter_exponents()
        .expect("nonconstant residue in a base domain");
    let s_elem = domain
        .parameter()
        .powi(b)
        .div(&domain.uniformizer().powi(c));
    let eval_poly = |poly: &crate::valfield::fp::FpPoly| -> Elem {
        let mut acc = domain.zero();
        for &coef in poly.coeffs.iter().rev() {
            acc = acc.mul(&s_elem).add(&domain.from_i64(coef as i64));
        }
        acc
    };
    eval_poly(&r.num).div(&eval_poly(&r.den))
}

// ---------------------------------------------------------------------------
// System trees
// ---------------------------------------------------------------------------

/// A separable constituent fed to the joint descent. `poly` lives in the
/// Frobenius-unwrapped variable w = z^{p^depth} shared by the whole system;
/// `mult` multiplies the multiplicity of each of its roots.
#[derive(Debug, Clone)]
pub(crate) struct TrackedItem {
    pub poly: Poly,
    pub label: u8,
    pub mult: usize,
}

#[derive(Debug, Clone)]
pub(crate) enum SysKind {
    Interior {
        children: Vec<usize>,
    },
    /// A single root of one item. `exact` marks a center that is the root
    /// itself; otherwise the center approximates the root strictly beyond
    /// the separation scale (or exactly at it when `virtual_center`).
    Leaf {
        item: usize,
        exact: bool,
        virtual_center: bool,
    },
    /// `count` conjugate roots of one item, pairwise at the node's scale.
    Cohort {
        item: usize,
        count: usize,
    },
    /// Unsettled cluster of (item, root count) pairs; resolved against the
    /// distance oracle before a tree is returned.
    Pending {
        counts: Vec<(usize, usize)>,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct SysNode {
    pub parent: Option<usize>,
    /// Interior: diameter valuation. Leaf/Cohort/Pending: the scale at
    /// which the unit hangs (= the parent's diameter). All w-space.
    pub scale: QRat,
    pub center: Elem,
    pub kind: SysKind,
}

/// Joint ultrametric tree of the roots of a tracked polynomial system,
/// valuations in the w-space variable; z-space data is w-space divided by
/// p^depth.
#[derive(Debug, Clone)]
pub(crate) struct SysTree {
    pub domain: CoeffDomain,
    pub depth: u32,
    pub items: Vec<TrackedItem>,
    pub nodes: Vec<SysNode>,
    pub root: Option<usize>,
}

/// One root position in the tree (cohorts hold several).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Position {
    pub node: usize,
    pub member: usize,
}

impl SysTree {
    pub fn wrap_factor(&self) -> QRat {
        QRat::from_integer((self.domain.p() as i64).pow(self.depth))
    }

    pub fn diam_z(&self, node: usize) -> QRat {
        self.nodes[node].scale / self.wrap_factor()
    }

    pub fn positions(&self) -> Vec<Position> {
        let mut out = vec![];
        for (id, n) in self.nodes.iter().enumerate() {
            match &n.kind {
                SysKind::Leaf { .. } => out.push(Position {
                    node: id,
                    member: 0,
                }),
                SysKind::Cohort { count, .. } => {
                    for m in 0..*count {
                        out.push(Position {
                            node: id,
                            member: m,
                        });
                    }
                }
                _ => {}
            }
        }
        out
    }

    pub fn item_of(&self, pos: Position) -> usize {
        match &self.nodes[pos.node].kind {
            SysKind::Leaf { item, .. } => *item,
            SysKind::Cohort { item, .. } => *item,
            _ => unreachable!("position on a non-root-bearing node"),
        }
    }

    pub fn label_of(&self, pos: Position) -> u8 {
        self.items[self.item_of(pos)].label
    }

    /// Multiplicity in the original z-space polynomial.
    pub fn zmult_of(&self, pos: Position) -> usize {
        self.items[self.item_of(pos)].mult * (self.domain.p() as usize).pow(self.depth)
    }

    fn depth_in_tree(&self, mut n: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.nodes[n].parent {
            n = p;
            d += 1;
        }
        d
    }

    fn lca_of_nodes(&self, a: usize, b: usize) -> usize {
        let (mut x, mut y) = (a, b);
        let (mut dx, mut dy) = (self.depth_in_tree(x), self.depth_in_tree(y));
        while dx > dy {
            x = self.nodes[x].parent.unwrap();
            dx -= 1;
        }
        while dy > dx {
            y = self.nodes[y].parent.unwrap();
            dy -= 1;
        }
        while x != y {
            x = self.nodes[x].parent.unwrap();
            y = self.nodes[y].parent.unwrap();
        }
        x
    }

    /// Deepest common ancestor of two distinct positions; for two members
    /// of one cohort this is the cohort's own node scale holder: the parent.
    pub fn lca_node(&self, a: Position, b: Position) -> usize {
        if a.node == b.node {
            return self.nodes[a.node].parent.expect("cohort without parent");
        }
        let l = self.lca_of_nodes(a.node, b.node);
        debug_assert!(matches!(self.nodes[l].kind, SysKind::Interior { .. }));
        l
    }

    /// Separation valuation (w-space) between two distinct positions.
    pub fn separation_w(&self, a: Position, b: Position) -> QRat {
        self.nodes[self.lca_node(a, b)].scale
    }

    /// min(val(center_N − root), scale(N)): the contribution of one root to
    /// a Gauss-norm evaluation at the disk point of node N (w-space).
    fn contribution_w(&self, node: usize, pos: Position) -> QRat {
        let node_scale = self.nodes[node].scale;
        let mut n = Some(pos.node);
        while let Some(id) = n {
            if id == node {
                return node_scale;
            }
            n = self.nodes[id].parent;
        }
        self.nodes[self.lca_of_nodes(node, pos.node)]
            .scale
            .min(node_scale)
    }

    /// val of the monic product over all roots with the given label,
    /// evaluated at the disk point of `node`, in z-space valuation.
    pub fn monic_val_at_node_z(&self, node: usize, label: u8) -> QRat {
        let wf = self.wrap_factor();
        let mut acc = QRat::zero();
        for pos in self.positions() {
            if self.label_of(pos) != label {
                continue;
            }
            let mult = QRat::from_integer(self.items[self.item_of(pos)].mult as i64);
            acc += self.contribution_w(node, pos) * mult;
        }
        acc / wf * wf // zmult · (contribution/wf) = mult · contribution
    }

    /// Same, but at an arbitrary z-space scale s on the path through the
    /// node with s ≤ the node's scale: contributions clamp at s.
    pub fn monic_val_on_path_z(&self, node: usize, s_z: QRat, label: u8) -> QRat {
        let wf = self.wrap_factor();
        let s_w = s_z * wf;
        let mut acc = QRat::zero();
        for pos in self.positions() {
            if self.label_of(pos) != label {
                continue;
            }
            let mult = QRat::from_integer(self.items[self.item_of(pos)].mult as i64);
            acc += self.contribution_w(node, pos).min(s_w) * mult;
        }
        acc
    }

    /// Ancestor chain of a position, nearest first, up to the tree root.
    pub fn ancestors(&self, pos: Position) -> Vec<usize> {
        let mut out = vec![];
        let mut n = self.nodes[pos.node].parent;
        while let Some(id) = n {
            out.push(id);
            n = self.nodes[id].parent;
        }
        out
    }

    pub fn describe_position(&self, pos: Position) -> String {
        let n = &self.nodes[pos.node];
        let wf = self.wrap_factor();
        match &n.kind {
            SysKind::Leaf {
                exact,
                virtual_center,
                ..
            } => {
                let c = self.root_center_string(pos.node);
                if *exact {
                    c
                } else if *virtual_center {
                    format!("~{c}@{}", ValQ::Fin(n.scale / wf))
                } else {
                    format!("{c}+O({})", ValQ::Fin(n.scale / wf))
                }
            }
            SysKind::Cohort { count, .. } => {
                let c = self.root_center_string(pos.node);
                format!(
                    "conj[{}/{count}]~{c}@{}",
                    pos.member + 1,
                    ValQ::Fin(n.scale / wf)
                )
            }
            _ => unreachable!(),
        }
    }

    fn root_center_string(&self, node: usize) -> String {
        let c = &self.nodes[node].center;
        if self.depth == 0 {
            format!("{c}")
        } else {
            format!("({c})^(1/{})", (self.domain.p() as i64).pow(self.depth))
        }
    }
}

// ---------------------------------------------------------------------------
// The descent
// ---------------------------------------------------------------------------

struct Builder<'a> {
    domain: CoeffDomain,
    items: &'a [TrackedItem],
    nodes: Vec<SysNode>,
    pendings: Vec<usize>,
}

const LEAF_REFINE_STEPS: usize = 8;

impl<'a> Builder<'a> {
    fn push(&mut self, node: SysNode) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn positions_in(&self, id: usize) -> usize {
        match &self.nodes[id].kind {
            SysKind::Leaf { .. } => 1,
            SysKind::Cohort { count, .. } => *count,
            SysKind::Pending { counts } => counts.iter().map(|&(_, c)| c).sum(),
            SysKind::Interior { children } => children.iter().map(|&c| self.positions_in(c)).sum(),
        }
    }

    /// Subtree spanning all roots α with val(α − center) strictly above
    /// `vfloor`; None when the region holds no roots.
    fn descend(&mut self, center: &Elem, vfloor: Option<QRat>) -> Result<Option<usize>> {
        let shifted: Vec<Option<Poly>> = self
            .items
            .iter()
            .map(|it| {
                if it.poly.degree().is_none_or(|d| d == 0) {
                    None
                } else {
                    Some(it.poly.shift(center))
                }
            })
            .collect();

        let mut exact_item: Option<usize> = None;
        let mut levels: BTreeMap<QRat, Vec<(usize, usize, usize)>> = BTreeMap::new();
        for (i, sh) in shifted.iter().enumerate() {
            let Some(sh) = sh else { continue };
            let np = newton_polygon_of(sh)?;
            if np.ord >= 1 {
                assert_eq!(np.ord, 1, "separable item with a multiple root at center");
                assert!(exact_item.is_none(), "two coprime items sharing a root");
                exact_item = Some(i);
            }
            for w in np.vertices.windows(2) {
                let (x1, y1) = w[0];
                let (x2, y2) = w[1];
                let v = -(y2 - y1) / QRat::from_integer((x2 - x1) as i64);
                if vfloor.is_none_or(|fl| v > fl) {
                    levels.entry(v).or_default().push((i, x1, x2));
                }
            }
        }

        let mut carried: Option<usize> = exact_item.map(|i| {
            self.push(SysNode {
                parent: None,
                scale: QRat::zero(),
                center: center.clone(),
                kind: SysKind::Leaf {
                    item: i,
                    exact: true,
                    virtual_center: false,
                },
            })
        });

        let levels: Vec<(QRat, Vec<(usize, usize, usize)>)> = levels.into_iter().collect();
        for (v, groups) in levels.into_iter().rev() {
            let mut children = self.analyze_level(center, &shifted, v, &groups)?;
            if let Some(c) = carried {
                children.push(c);
            }
            let total_positions: usize = children.iter().map(|&c| self.positions_in(c)).sum();
            if children.len() == 1
                && (total_positions == 1
                    || matches!(self.nodes[children[0]].kind, SysKind::Interior { .. }))
            {
                // one residue class clustering deeper, nothing separates here
                carried = Some(children[0]);
                continue;
            }
            let node = self.push(SysNode {
                parent: None,
                scale: v,
                center: center.clone(),
                kind: SysKind::Interior {
                    children: children.clone(),
                },
            });
            for &c in &children {
                self.nodes[c].parent = Some(node);
                if !matches!(self.nodes[c].kind, SysKind::Interior { .. }) {
                    self.nodes[c].scale = v;
                }
            }
            carried = Some(node);
        }
        Ok(carried)
    }

    fn analyze_level(
        &mut self,
        center: &Elem,
        shifted: &[Option<Poly>],
        v: QRat,
        groups: &[(usize, usize, usize)],
    ) -> Result<Vec<usize>> {
        let Some(pi_v) = self.domain.elem_of_val(v) else {
            // ramified scale: the whole slope group is one pending cluster
            let counts: Vec<(usize, usize)> =
                groups.iter().map(|&(i, x1, x2)| (i, x2 - x1)).collect();
            let id = self.push(SysNode {
                parent: None,
                scale: v,
                center: center.clone(),
                kind: SysKind::Pending { counts },
            });
            self.pendings.push(id);
            return Ok(vec![id]);
        };

        let p = self.domain.p();
        let mut raw: Vec<(usize, ResidueClass)> = vec![];
        for &(i, x1, x2) in groups {
            let sh = shifted[i].as_ref().unwrap();
            let lead_val = sh.coeff(x1).val().expect_finite() + QRat::from_integer(x1 as i64) * v;
            let sigma = self
                .domain
                .elem_of_val(lead_val)
                .expect("segment level must lie in the value group");
            let mut rpoly: RPoly = vec![];
            for k in x1..=x2 {
                let ck = sh.coeff(k);
                if ck.is_zero() {
                    rpoly.push(FpRatFn::zero(p));
                } else {
                    rpoly.push(ck.mul(&pi_v.powi(k as i64)).div(&sigma).residue()?);
                }
            }
            let rpoly = bp_trim(rpoly);
            assert_eq!(
                rp_deg(&rpoly),
                x2 - x1,
                "residue polynomial degree mismatch"
            );
            assert!(
                !rpoly[0].is_zero(),
                "vanishing constant term in residue polynomial"
            );
            for class in residue_ladder(&rpoly, p)? {
                raw.push((i, class));
            }
        }

        let dmax = raw.iter().map(|(_, c)| c.depth).max().unwrap_or(0);
        let model = FpRatFn::zero(p);
        let mut basis: Vec<(RPoly, Vec<(usize, usize)>)> = vec![];
        for (item, class) in raw {
            let q = rp_monic(&rp_twist(&class.q, p, dmax - class.depth));
            basis_insert(&mut basis, q, item, class.count, &model);
        }
        for (_, tags) in basis.iter_mut() {
            tags.sort();
            tags.dedup_by(|a, b| {
                if a.0 == b.0 {
                    b.1 += a.1;
                    true
                } else {
                    false
                }
            });
        }

        let mut units = vec![];
        for (q, counts) in basis {
            let total: usize = counts.iter().map(|&(_, c)| c).sum();
            // peel off the residue-field roots of q; the remainder has only
            // residues in proper extensions
            let (field_roots, rest) = split_residue_roots(&q, p);
            for delta_desc in field_roots {
                // untwist the descriptor back to the actual residue
                let mut delta = delta_desc;
                let mut liftable = true;
                for _ in 0..dmax {
                    match delta.pth_root() {
                        Some(r) => delta = r,
                        None => {
                            liftable = false;
                            break;
                        }
                    }
                }
                if total == 1 {
                    let (item, _) = counts[0];
                    let id = if liftable {
                        let c0 = center.add(&pi_v.mul(&residue_lift(&self.domain, &delta)));
                        let (c_ref, exact) = self.refine_leaf(item, c0, v);
                        self.push(SysNode {
                            parent: None,
                            scale: v,
                            center: c_ref,
                            kind: SysKind::Leaf {
                                item,
                                exact,
                                virtual_center: false,
                            },
                        })
                    } else {
                        self.push(SysNode {
                            parent: None,
                            scale: v,
                            center: center.clone(),
                            kind: SysKind::Leaf {
                                item,
                                exact: false,
                                virtual_center: true,
                            },
                        })
                    };
                    units.push(id);
                } else if liftable {
                    let c_new = center.add(&pi_v.mul(&residue_lift(&self.domain, &delta)));
                    let sub = self
                        .descend(&c_new, Some(v))?
                        .expect("recentred cluster cannot be empty");
                    units.push(sub);
                } else {
                    let id = self.push(SysNode {
                        parent: None,
                        scale: v,
                        center: center.clone(),
                        kind: SysKind::Pending {
                            counts: counts.clone(),
                        },
                    });
                    self.pendings.push(id);
                    units.push(id);
                }
            }
            if let Some(rest) = rest {
                let degr = rp_deg(&rest);
                if total == 1 {
                    let (item, _) = counts[0];
                    let id = self.push(SysNode {
                        parent: None,
                        scale: v,
                        center: center.clone(),
                        kind: SysKind::Cohort { item, count: degr },
                    });
                    units.push(id);
                } else {
                    return Err(Error::unresolved(format!(
                        "repeated residue factor of degree {degr} at scale {v}: {}",
                        rpoly_string(&rest)
                    )));
                }
            }
        }
        Ok(units)
    }

    /// Keep Hensel digits flowing while the chain stays simple, stopping at
    /// an exact root or after a fixed number of extra digits.
    fn refine_leaf(&self, item: usize, mut c: Elem, mut v: QRat) -> (Elem, bool) {
        let f = &self.items[item].poly;
        // Over a Gauss extension every digit multiplies the parameter degree
        // by p, so the chain is cut off at the first lift; that is already
        // accurate strictly beyond the separation level, which is all the
        // tree-based evaluations need.
        let steps = if self.domain.is_gauss() {
            1
        } else {
            LEAF_REFINE_STEPS
        };
        for _ in 0..steps {
            let sh = f.shift(&c);
            if sh.ord().is_some_and(|o| o >= 1) {
                return (c, true);
            }
            let Ok(np) = newton_polygon_of(&sh) else {
                return (c, false);
            };
            let seg = np.vertices.windows(2).find_map(|w| {
                let (x1, y1) = w[0];
                let (x2, y2) = w[1];
                let sv = -(y2 - y1) / QRat::from_integer((x2 - x1) as i64);
                if sv > v && x2 - x1 == 1 {
                    Some((x1, sv))
                } else {
                    None
                }
            });
            let Some((x1, v_next)) = seg else {
                return (c, false);
            };
            let Some(pi) = self.domain.elem_of_val(v_next) else {
                return (c, false);
            };
            let lead_val =
                sh.coeff(x1).val().expect_finite() + QRat::from_integer(x1 as i64) * v_next;
            let Some(sigma) = self.domain.elem_of_val(lead_val) else {
                return (c, false);
            };
            let res_at = |k: usize| -> Option<FpRatFn> {
                sh.coeff(k)
                    .mul(&pi.powi(k as i64))
                    .div(&sigma)
                    .residue()
                    .ok()
            };
            let (Some(r0), Some(r1)) = (res_at(x1), res_at(x1 + 1)) else {
                return (c, false);
            };
            let Ok(delta) = r0.neg().div(&r1) else {
                return (c, false);
            };
            let digit = residue_lift(&self.domain, &delta);
            // a negatively-signed digit may complete a short expansion that
            // the canonical one never reaches, e.g. the root −2 in Z_3
            if let Some(dc) = delta.as_constant() {
                if dc != 0 {
                    let signed = self.domain.from_i64(dc as i64 - self.domain.p() as i64);
                    let cand = c.add(&pi.mul(&signed));
                    if f.eval(&cand).is_zero() {
                        return (cand, true);
                    }
                }
            }
            c = c.add(&pi.mul(&digit));
            v = v_next;
        }
        (c, false)
    }
}

/// Roots of a squarefree residue polynomial that lie in the residue field
/// itself: constants of F_p by exhaustive trial, plus the exact root when
/// the remainder becomes linear. Returns the roots and the rootless
/// remainder (None when fully split).
fn split_residue_roots(q: &RPoly, p: u64) -> (Vec<FpRatFn>, Option<RPoly>) {
    let model = FpRatFn::zero(p);
    let eval = |f: &RPoly, x: &FpRatFn| -> FpRatFn {
        let mut acc = FpRatFn::zero(p);
        for c in f.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    };
    let mut rest = rp_monic(q);
    let mut roots = vec![];
    for c in 0..p {
        if rp_deg(&rest) == 0 {
            break;
        }
        let x = FpRatFn::constant(p, c);
        if eval(&rest, &x).is_zero() {
            roots.push(x.clone());
            let lin = vec![x.neg(), FpRatFn::one(p)];
            rest = bp_divrem(&rest, &lin, &model).0;
        }
    }
    if rp_deg(&rest) == 1 {
        roots.push(rest[0].neg());
        return (roots, None);
    }
    if rp_deg(&rest) == 0 {
        (roots, None)
    } else {
        (roots, Some(rest))
    }
}

fn basis_insert(
    basis: &mut Vec<(RPoly, Vec<(usize, usize)>)>,
    mut q: RPoly,
    item: usize,
    count: usize,
    model: &FpRatFn,
) {
    let mut k = 0;
    while k < basis.len() {
        if rp_deg(&q) == 0 {
            break;
        }
        let g = bp_gcd(&basis[k].0, &q, model);
        if rp_deg(&g) == 0 {
            k += 1;
            continue;
        }
        let rest_b = bp_divrem(&basis[k].0, &g, model).0;
        if rp_deg(&rest_b) > 0 {
            let mut tags_shared = basis[k].1.clone();
            tags_shared.push((item, count));
            basis[k].0 = rest_b;
            basis.push((g.clone(), tags_shared));
        } else {
            basis[k].1.push((item, count));
        }
        q = bp_divrem(&q, &g, model).0;
        k += 1;
    }
    if rp_deg(&q) > 0 {
        basis.push((q, vec![(item, count)]));
    }
}

fn rpoly_string(q: &RPoly) -> String {
    let parts: Vec<String> = q
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("{}*w^{i}", c.to_string_in("s")))
        .collect();
    parts.join("+")
}

// ---------------------------------------------------------------------------
// Pending clusters: certificate against the distance oracle
// ---------------------------------------------------------------------------

type PairKey = (usize, usize);
type Multiset = BTreeMap<QRat, i64>;

fn ms_add(ms: &mut Multiset, v: QRat, n: i64) {
    *ms.entry(v).or_insert(0) += n;
}

fn resolve_pendings(
    items: &[TrackedItem],
    mut nodes: Vec<SysNode>,
    pendings: Vec<usize>,
    root: Option<usize>,
) -> Result<(Vec<SysNode>, Option<usize>)> {
    if pendings.is_empty() {
        return Ok((nodes, root));
    }
    if pendings.len() > 1 {
        return Err(Error::unresolved(format!(
            "{} ramified clusters: pairwise distance data cannot be attributed",
            pendings.len()
        )));
    }
    let pid = pendings[0];

    // unordered pair multisets per item pair, straight from the oracle
    let mut actual: BTreeMap<PairKey, Multiset> = BTreeMap::new();
    for i in 0..items.len() {
        for j in i..items.len() {
            let mut ms = Multiset::new();
            if i == j {
                for (v, m) in pairwise_distance_multiset(&items[i].poly)? {
                    assert!(m % 2 == 0, "ordered pair count must be even");
                    ms_add(&mut ms, v, (m / 2) as i64);
                }
            } else {
                for (v, m) in cross_distance_multiset(&items[i].poly, &items[j].poly)? {
                    ms_add(&mut ms, v, m as i64);
                }
            }
            actual.insert((i, j), ms);
        }
    }

    // predicted pairs from the settled tree; the pending cluster only
    // contributes its cross pairs
    let view = TreeView { nodes: &nodes };
    let mut posns: Vec<(usize, usize, usize)> = vec![];
    for (id, n) in nodes.iter().enumerate() {
        match &n.kind {
            SysKind::Leaf { item, .. } => posns.push((id, 0, *item)),
            SysKind::Cohort { item, count } => {
                for m in 0..*count {
                    posns.push((id, m, *item));
                }
            }
            SysKind::Pending { counts } => {
                let mut m = 0;
                for &(item, c) in counts {
                    for _ in 0..c {
                        posns.push((id, m, item));
                        m += 1;
                    }
                }
            }
            _ => {}
        }
    }
    let mut predicted: BTreeMap<PairKey, Multiset> = BTreeMap::new();
    for a in 0..posns.len() {
        for b in a + 1..posns.len() {
            let (na, _, ia) = posns[a];
            let (nb, _, ib) = posns[b];
            if na == pid && nb == pid {
                continue;
            }
            let sep = if na == nb {
                nodes[nodes[na].parent.expect("cohort without parent")].scale
            } else {
                view.separation(na, nb)
            };
            let key = if ia <= ib { (ia, ib) } else { (ib, ia) };
            ms_add(predicted.entry(key).or_default(), sep, 1);
        }
    }

    let mut interior: BTreeMap<PairKey, Multiset> = BTreeMap::new();
    for (key, ms) in &actual {
        let pred = predicted.get(key).cloned().unwrap_or_default();
        let mut left = ms.clone();
        for (v, n) in pred {
            let e = left.entry(v).or_insert(0);
            *e -= n;
            if *e < 0 {
                return Err(Error::unresolved(
                    "oracle distances disagree with the settled part of the tree",
                ));
            }
            if *e == 0 {
                left.remove(&v);
            }
        }
        if !left.is_empty() {
            interior.insert(*key, left);
        }
    }

    let SysKind::Pending { counts } = nodes[pid].kind.clone() else {
        unreachable!()
    };
    let level = nodes[pid].scale;
    let center = nodes[pid].center.clone();
    let total: usize = counts.iter().map(|&(_, c)| c).sum();
    let expected_pairs = (total * (total - 1) / 2) as i64;
    let got_pairs: i64 = interior.values().flat_map(|ms| ms.values()).sum();
    if got_pairs != expected_pairs {
        return Err(Error::unresolved(format!(
            "ramified cluster of {total} roots: oracle yields {got_pairs} interior pairs, expected {expected_pairs}"
        )));
    }

    let mut flat: Vec<(QRat, i64, PairKey)> = vec![];
    for (k, ms) in &interior {
        for (&v, &n) in ms {
            flat.push((v, n, *k));
        }
    }
    flat.sort_by_key(|a| a.0);

    let mk_virtual_leaf = |item: usize, scale: QRat, center: &Elem| SysNode {
        parent: None,
        scale,
        center: center.clone(),
        kind: SysKind::Leaf {
            item,
            exact: false,
            virtual_center: true,
        },
    };

    // reconstruct the interior; replacements are siblings at the pending's
    // attachment scale
    enum Rebuilt {
        Unit(SysNode),
        Node {
            inner: SysNode,
            pre_children: Vec<usize>,
        },
    }
    let mut rebuilt: Vec<Rebuilt> = vec![];
    if flat.len() == 1 {
        let d = flat[0].0;
        if d < level {
            return Err(Error::unresolved(
                "interior distances below the attachment scale",
            ));
        }
        let members: Vec<SysNode> = counts
            .iter()
            .map(|&(item, c)| {
                if c == 1 {
                    mk_virtual_leaf(item, d, &center)
                } else {
                    SysNode {
                        parent: None,
                        scale: d,
                        center: center.clone(),
                        kind: SysKind::Cohort { item, count: c },
                    }
                }
            })
            .collect();
        if d > level {
            let mut pre = vec![];
            for m in members {
                nodes.push(m);
                pre.push(nodes.len() - 1);
            }
            rebuilt.push(Rebuilt::Node {
                inner: SysNode {
                    parent: None,
                    scale: d,
                    center: center.clone(),
                    kind: SysKind::Interior {
                        children: pre.clone(),
                    },
                },
                pre_children: pre,
            });
        } else {
            for m in members {
                rebuilt.push(Rebuilt::Unit(m));
            }
        }
    } else if total == 3 && flat.len() == 2 {
        let (a, na, _) = flat[0];
        let (b, nb, kb) = flat[1];
        if na != 2 || nb != 1 || a < level {
            return Err(Error::unresolved(
                "three-root cluster with inconsistent distances",
            ));
        }
        let (i0, j0) = kb;
        let mut rem: BTreeMap<usize, i64> = BTreeMap::new();
        for &(item, c) in &counts {
            *rem.entry(item).or_insert(0) += c as i64;
        }
        *rem.entry(i0).or_insert(0) -= 1;
        *rem.entry(j0).or_insert(0) -= 1;
        let outliers: Vec<usize> = rem
            .into_iter()
            .filter(|&(_, c)| c > 0)
            .flat_map(|(i, c)| std::iter::repeat_n(i, c as usize))
            .collect();
        if outliers.len() != 1 {
            return Err(Error::unresolved(
                "three-root cluster: ambiguous attribution",
            ));
        }
        nodes.push(mk_virtual_leaf(i0, b, &center));
        nodes.push(mk_virtual_leaf(j0, b, &center));
        let pre = vec![nodes.len() - 2, nodes.len() - 1];
        let deep = SysNode {
            parent: None,
            scale: b,
            center: center.clone(),
            kind: SysKind::Interior {
                children: pre.clone(),
            },
        };
        if a > level {
            nodes.push(deep);
            let deep_id = nodes.len() - 1;
            for &c in &pre {
                nodes[c].parent = Some(deep_id);
            }
            nodes.push(mk_virtual_leaf(outliers[0], a, &center));
            let out_id = nodes.len() - 1;
            rebuilt.push(Rebuilt::Node {
                inner: SysNode {
                    parent: None,
                    scale: a,
                    center: center.clone(),
                    kind: SysKind::Interior {
                        children: vec![deep_id, out_id],
                    },
                },
                pre_children: vec![deep_id, out_id],
            });
        } else {
            rebuilt.push(Rebuilt::Node {
                inner: deep,
                pre_children: pre,
            });
            rebuilt.push(Rebuilt::Unit(mk_virtual_leaf(outliers[0], a, &center)));
        }
    } else {
        return Err(Error::unresolved(format!(
            "ramified cluster of {total} roots with {} distinct interior distances",
            flat.len()
        )));
    }

    let parent = nodes[pid].parent;
    let mut new_ids = vec![];
    for r in rebuilt {
        match r {
            Rebuilt::Unit(mut n) => {
                n.parent = parent;
                nodes.push(n);
                new_ids.push(nodes.len() - 1);
            }
            Rebuilt::Node {
                mut inner,
                pre_children,
            } => {
                inner.parent = parent;
                nodes.push(inner);
                let rid = nodes.len() - 1;
                for c in pre_children {
                    nodes[c].parent = Some(rid);
                }
                new_ids.push(rid);
            }
        }
    }
    let mut root = root;
    match parent {
        Some(par) => {
            let SysKind::Interior { children } = &mut nodes[par].kind else {
                unreachable!("pending parent must be interior");
            };
            children.retain(|&c| c != pid);
            children.extend(new_ids.iter());
        }
        None => {
            assert_eq!(
                new_ids.len(),
                1,
                "rootless pending must resolve to one subtree"
            );
            root = Some(new_ids[0]);
        }
    }
    nodes[pid].kind = SysKind::Interior { children: vec![] };
    nodes[pid].parent = None;

    Ok((nodes, root))
}

struct TreeView<'a> {
    nodes: &'a [SysNode],
}

impl<'a> TreeView<'a> {
    fn depth(&self, mut n: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.nodes[n].parent {
            n = p;
            d += 1;
        }
        d
    }

    fn separation(&self, a: usize, b: usize) -> QRat {
        let (mut x, mut y) = (a, b);
        let (mut dx, mut dy) = (self.depth(x), self.depth(y));
        while dx > dy {
            x = self.nodes[x].parent.unwrap();
            dx -= 1;
        }
        while dy > dx {
            y = self.nodes[y].parent.unwrap();
            dy -= 1;
        }
        while x != y {
            x = self.nodes[x].parent.unwrap();
            y = self.nodes[y].parent.unwrap();
        }
        self.nodes[x].scale
    }
}

fn collapse_trivial(nodes: &mut [SysNode], root: Option<usize>) -> Option<usize> {
    let mut root = root?;
    loop {
        let SysKind::Interior { children } = &nodes[root].kind else {
            break;
        };
        if children.len() == 1 {
            let only = children[0];
            if matches!(
                nodes[only].kind,
                SysKind::Leaf { .. } | SysKind::Interior { .. }
            ) {
                nodes[only].parent = None;
                root = only;
                continue;
            }
        }
        break;
    }
    Some(root)
}

// ---------------------------------------------------------------------------
// System isolation (crate surface for the splitting engine)
// ---------------------------------------------------------------------------

/// Decompose labelled polynomials into tracked separable items sharing one
/// Frobenius depth.
pub(crate) fn build_items(polys: &[(&Poly, u8)]) -> Result<(u32, Vec<TrackedItem>)> {
    let mut depth: Option<u32> = None;
    let mut items = vec![];
    for (f, label) in polys {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if f.degree() == Some(0) {
            continue;
        }
        for part in separable_parts(f)? {
            if part.poly.degree().is_none_or(|d| d == 0) {
                continue;
            }
            match depth {
                None => depth = Some(part.depth),
                Some(d) if d == part.depth => {}
                Some(_) => {
                    return Err(Error::unresolved(
                        "mixed Frobenius depths across root systems",
                    ))
                }
            }
            items.push(TrackedItem {
                poly: part.poly,
                label: *label,
                mult: part.mult,
            });
        }
    }
    Ok((depth.unwrap_or(0), items))
}

pub(crate) fn isolate_system(
    domain: &CoeffDomain,
    depth: u32,
    items: Vec<TrackedItem>,
) -> Result<SysTree> {
    let mut b = Builder {
        domain: domain.clone(),
        items: &items,
        nodes: vec![],
        pendings: vec![],
    };
    let root = b.descend(&domain.zero(), None)?;
    let Builder {
        nodes, pendings, ..
    } = b;
    let (mut nodes, root) = resolve_pendings(&items, nodes, pendings, root)?;
    let root = collapse_trivial(&mut nodes, root);
    Ok(SysTree {
        domain: domain.clone(),
        depth,
        items,
        nodes,
        root,
    })
}

pub(crate) fn isolate_system_of(polys: &[(&Poly, u8)]) -> Result<SysTree> {
    let domain = polys
        .first()
        .map(|(f, _)| f.domain().clone())
        .ok_or_else(|| Error::invalid("empty system"))?;
    let (depth, items) = build_items(polys)?;
    isolate_system(&domain, depth, items)
}

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------

/// Rooted ultrametric tree of root clusters. The top-level clusters are the
/// children; each node separates from its siblings at `sep_val`, strictly
/// increasing along every root-to-leaf path.
#[derive(Debug, Clone)]
pub struct ClusterTree {
    pub domain: CoeffDomain,
    pub mult_total: usize,
    pub distinct_count: usize,
    pub children: Vec<ClusterNode>,
}

#[derive(Debug, Clone)]
pub struct ClusterNode {
    /// A representable center: the root itself for exact leaves, otherwise
    /// an approximation agreeing with the root strictly beyond `sep_val`.
    pub center: Elem,
    /// Whether the center is the root itself (leaves only).
    pub center_exact: bool,
    pub sep_val: ValQ,
    pub mult_total: usize,
    pub distinct_count: usize,
    pub children: Vec<ClusterNode>,
}

impl ClusterTree {
    /// Separation valuations over ordered pairs of distinct leaves, sorted
    /// descending; comparable with the resultant oracle output.
    pub fn pairwise_separations(&self) -> Vec<QRat> {
        fn leaf_count(n: &ClusterNode) -> usize {
            if n.children.is_empty() {
                1
            } else {
                n.children.iter().map(leaf_count).sum()
            }
        }
        fn collect(children: &[ClusterNode], acc: &mut Vec<QRat>) {
            for (i, ci) in children.iter().enumerate() {
                for cj in &children[i + 1..] {
                    let sep = cj.sep_val.expect_finite();
                    let pairs = leaf_count(ci) * leaf_count(cj);
                    for _ in 0..2 * pairs {
                        acc.push(sep);
                    }
                }
                collect(&ci.children, acc);
            }
        }
        let mut acc = vec![];
        collect(&self.children, &mut acc);
        acc.sort();
        acc.reverse();
        acc
    }

    /// Check the ultrametric triple law on every leaf triple.
    pub fn ultrametric_law_holds(&self) -> bool {
        fn leaf_seps(children: &[ClusterNode], prefix: &mut Vec<QRat>, out: &mut Vec<Vec<QRat>>) {
            for c in children {
                if c.children.is_empty() {
                    let mut path = prefix.clone();
                    path.push(c.sep_val.finite().unwrap_or(QRat::zero()));
                    out.push(path);
                } else {
                    prefix.push(c.sep_val.expect_finite());
                    leaf_seps(&c.children, prefix, out);
                    prefix.pop();
                }
            }
        }
        // separation of two leaves = the sep at which their paths diverge
        let mut paths = vec![];
        leaf_seps(&self.children, &mut vec![], &mut paths);
        let sep = |a: &Vec<QRat>, b: &Vec<QRat>| -> QRat {
            let mut k = 0;
            while k < a.len().min(b.len()) && a[k] == b[k] {
                k += 1;
            }
            if k < a.len().min(b.len()) {
                a[k].min(b[k])
            } else {
                a[k.min(a.len() - 1)].min(b[k.min(b.len() - 1)])
            }
        };
        let n = paths.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let dij = sep(&paths[i], &paths[j]);
                    let dik = sep(&paths[i], &paths[k]);
                    let djk = sep(&paths[j], &paths[k]);
                    // valuation form: the two smallest must coincide
                    let mut v = [dij, dik, djk];
                    v.sort();
                    if v[0] != v[1] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Strict isolation: every leaf must have a representable center.
pub fn isolate(f: &Poly) -> Result<ClusterTree> {
    let sys = isolate_system_of(&[(f, 0)])?;
    systree_to_public(&sys, f)
}

fn systree_to_public(sys: &SysTree, f: &Poly) -> Result<ClusterTree> {
    fn conv(sys: &SysTree, id: usize, sep: ValQ) -> Result<ClusterNode> {
        let n = &sys.nodes[id];
        let mut center = n.center.clone();
        for _ in 0..sys.depth {
            center = center.pth_root().ok_or_else(|| {
                Error::unresolved(format!(
                    "cluster center {} requires a p-th root outside the domain",
                    n.center
                ))
            })?;
        }
        match &n.kind {
            SysKind::Leaf { exact, virtual_center, .. } => {
                if *virtual_center {
                    return Err(Error::unresolved(format!(
                        "leaf near {} at scale {} has no representable center",
                        n.center,
                        ValQ::Fin(sys.diam_z(id))
                    )));
                }
                Ok(ClusterNode {
                    center,
                    center_exact: *exact && sys.depth == 0,
                    sep_val: sep,
                    mult_total: sys.zmult_of(Position { node: id, member: 0 }),
                    distinct_count: 1,
                    children: vec![],
                })
            }
            SysKind::Cohort { count, .. } => Err(Error::unresolved(format!(
                "irreducible residue factor of degree {count} near {}: conjugate roots have no representable centers",
                n.center
            ))),
            SysKind::Interior { children } => {
                let child_sep = ValQ::Fin(sys.diam_z(id));
                let mut kids = vec![];
                for &c in children {
                    kids.push(conv(sys, c, child_sep)?);
                }
                kids.sort_by_key(|a| a.center.to_string());
                let mult: usize = kids.iter().map(|k| k.mult_total).sum();
                let distinct: usize = kids.iter().map(|k| k.distinct_count).sum();
                Ok(ClusterNode {
                    center,
                    center_exact: false,
                    sep_val: sep,
                    mult_total: mult,
                    distinct_count: distinct,
                    children: kids,
                })
            }
            SysKind::Pending { .. } => unreachable!("pendings resolved before conversion"),
        }
    }
    let children = match sys.root {
        None => vec![],
        Some(r) => {
            let top = conv(sys, r, ValQ::zero())?;
            if matches!(sys.nodes[r].kind, SysKind::Interior { .. }) {
                top.children
            } else {
                vec![top]
            }
        }
    };
    let mult_total: usize = children.iter().map(|k| k.mult_total).sum();
    let distinct: usize = children.iter().map(|k| k.distinct_count).sum();
    debug_assert_eq!(mult_total, f.deg());
    Ok(ClusterTree {
        domain: sys.domain.clone(),
        mult_total,
        distinct_count: distinct,
        children,
    })
}

/// Isolation from caller-supplied exact roots: each hint is verified to be
/// a root, multiplicities are read off by deflation, and the tree is built
/// from the explicit pairwise distances.
pub fn isolate_with_hints(f: &Poly, hints: &[Elem]) -> Result<ClusterTree> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let domain = f.domain().clone();
    let mut mults = vec![];
    let mut rest = f.clone();
    for h in hints {
        if !f.eval(h).is_zero() {
            return Err(Error::invalid(format!("hint {h} is not a root")));
        }
        let lin = Poly::new(domain.clone(), vec![h.neg(), domain.one()]);
        let mut m = 0;
        loop {
            let (q, r) = rest.divrem(&lin);
            if r.is_zero() {
                rest = q;
                m += 1;
            } else {
                break;
            }
        }
        if m == 0 {
            return Err(Error::invalid(format!("hint {h} repeats an earlier hint")));
        }
        mults.push(m);
    }
    if rest.degree().is_some_and(|d| d > 0) {
        return Err(Error::unresolved(format!(
            "root hints do not exhaust the fiber: degree {} remains",
            rest.deg()
        )));
    }
    Ok(tree_from_explicit_roots(&domain, hints, &mults))
}

fn tree_from_explicit_roots(domain: &CoeffDomain, roots: &[Elem], mults: &[usize]) -> ClusterTree {
    fn build(idx: &[usize], roots: &[Elem], mults: &[usize], sep: ValQ) -> ClusterNode {
        if idx.len() == 1 {
            return ClusterNode {
                center: roots[idx[0]].clone(),
                center_exact: true,
                sep_val: sep,
                mult_total: mults[idx[0]],
                distinct_count: 1,
                children: vec![],
            };
        }
        let mut dmin: Option<QRat> = None;
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                let d = roots[i].sub(&roots[j]).val().expect_finite();
                dmin = Some(dmin.map_or(d, |m: QRat| m.min(d)));
            }
        }
        let d = dmin.unwrap();
        let mut groups: Vec<Vec<usize>> = vec![];
        'outer: for &i in idx {
            for g in groups.iter_mut() {
                if roots[g[0]].sub(&roots[i]).val() > ValQ::Fin(d) {
                    g.push(i);
                    continue 'outer;
                }
            }
            groups.push(vec![i]);
        }
        let kids: Vec<ClusterNode> = groups
            .iter()
            .map(|g| build(g, roots, mults, ValQ::Fin(d)))
            .collect();
        ClusterNode {
            center: roots[idx[0]].clone(),
            center_exact: false,
            sep_val: sep,
            mult_total: kids.iter().map(|k| k.mult_total).sum(),
            distinct_count: kids.iter().map(|k| k.distinct_count).sum(),
            children: kids,
        }
    }
    if roots.is_empty() {
        return ClusterTree {
            domain: domain.clone(),
            mult_total: 0,
            distinct_count: 0,
            children: vec![],
        };
    }
    let idx: Vec<usize> = (0..roots.len()).collect();
    let top = build(&idx, roots, mults, ValQ::zero());
    let children = if top.children.is_empty() {
        vec![top]
    } else {
        top.children
    };
    ClusterTree {
        domain: domain.clone(),
        mult_total: children.iter().map(|k| k.mult_total).sum(),
        distinct_count: children.iter().map(|k| k.distinct_count).sum(),
        children,
    }
}

/// Number of distinct roots in the algebraic closure, as
/// deg(f / gcd(f, f')). The derivative must not vanish at this level; a
/// fully inseparable layer is the caller's responsibility to unwrap first.
pub fn distinct_root_count(f: &Poly) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.degree() == Some(0) {
        return Ok(0);
    }
    let fd = f.derivative();
    if fd.is_zero() {
        return Err(Error::InseparableResidual);
    }
    let g = f.gcd(&fd);
    Ok(f.div_exact(&g).deg())
}

/// Distinct-root count that divides out inseparable exponent layers itself.
pub fn distinct_root_count_full(f: &Poly) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.degree() == Some(0) {
        return Ok(0);
    }
    if f.derivative().is_zero() {
        let p = f.domain().p() as usize;
        let s = f
            .compress(p)
            .ok_or_else(|| Error::invalid("vanishing derivative without p-power exponents"))?;
        return distinct_root_count_full(&s);
    }
    distinct_root_count(f)
}
