//! The splitting radius of a rational map on the Berkovich line.
//!
//! For a normalized map φ = P/Q of separable degree d and a point x, the
//! preimage of the open ball B(x, r) decomposes into d homeomorphic copies
//! exactly when the fiber over x has d distinct points and no two of them
//! have merged at radius r. The merge level of a pair of preimages is the
//! minimum of val |φ(ξ) − x| along the tree path between them; every local
//! extremum of that function sits at a vertex of the finite tree spanned by
//! the fiber roots and the poles, so the minimum over path vertices is
//! exact. The splitting radius caps the smallest pairwise merge level at 1.
//!
//! Evaluations at tree vertices use the factored form of val |F| at a disk
//! point — the sum over roots of min(val(center − root), ρ) — which needs
//! only the joint cluster tree, never an explicit root.

mod skeleton;

pub use skeleton::{
    branch_values, skeleton_for, skeleton_with_extra, verify_theorem, BranchValues,
    ConstancySample, EdgeReport, PlPiece, SkeletonReport, VerifyBudget,
};

use crate::berkline::BerkPoint;
use crate::roots::{
    self, distinct_root_count_full, isolate_system, Position, SysTree, TrackedItem,
};
use crate::valfield::poly::{separable_parts, Poly};
use crate::valfield::{CoeffDomain, Elem, QRat, ValQ};
use crate::{Error, Result};
use num_traits::Zero;

pub(crate) const LABEL_FIBER: u8 = 0;
pub(crate) const LABEL_POLE: u8 = 1;

/// A rational map in normalized form: coprime numerator and denominator,
/// the inseparable exponent extracted, φ(z) = φ_sep(z^{p^k}).
#[derive(Debug, Clone)]
pub struct RationalMapNF {
    domain: CoeffDomain,
    /// Numerator of the separable part.
    pub num: Poly,
    /// Denominator of the separable part.
    pub den: Poly,
    /// Inseparable exponent k; zero in mixed characteristic.
    pub insep_exp: u32,
    /// Separable degree d = max(deg num, deg den).
    pub d_sep: usize,
}

/// Reduce to lowest terms and peel Frobenius layers: while both numerator
/// and denominator only involve exponents divisible by p, substitute
/// z^p ↦ z.
pub fn normalize(p_raw: &Poly, q_raw: &Poly) -> Result<RationalMapNF> {
    if q_raw.is_zero() || p_raw.is_zero() && q_raw.is_zero() {
        return Err(Error::ZeroMap);
    }
    if p_raw.domain() != q_raw.domain() {
        return Err(Error::invalid(
            "numerator and denominator over different domains",
        ));
    }
    let domain = p_raw.domain().clone();
    let g = if p_raw.is_zero() {
        q_raw.monic()
    } else {
        p_raw.gcd(q_raw)
    };
    let mut num = p_raw.div_exact(&g);
    let mut den = q_raw.div_exact(&g);
    // canonical scale: monic denominator
    let lc = den.lc();
    num = num.scale(&domain.one().div(&lc));
    den = den.scale(&domain.one().div(&lc));

    let mut k = 0u32;
    if domain.has_char_p() {
        let p = domain.p() as usize;
        loop {
            if num.exponents_divisible_by(p) && den.exponents_divisible_by(p) {
                num = num.compress(p).unwrap();
                den = den.compress(p).unwrap();
                k += 1;
            } else {
                break;
            }
        }
    }
    let d_sep = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0));
    if d_sep == 0 {
        return Err(Error::ZeroMap);
    }
    Ok(RationalMapNF {
        domain,
        num,
        den,
        insep_exp: k,
        d_sep,
    })
}

impl RationalMapNF {
    pub fn domain(&self) -> &CoeffDomain {
        &self.domain
    }

    /// Formal identity check φ(z) = φ_sep(z^{p^k}): cross-multiplied over
    /// the raw input.
    pub fn resubstitution_matches(&self, p_raw: &Poly, q_raw: &Poly) -> bool {
        let pk = (self.domain.p() as usize).pow(self.insep_exp);
        let pn = self.num.stretch(pk);
        let pd = self.den.stretch(pk);
        p_raw.mul(&pd) == q_raw.mul(&pn)
    }

    /// The chart swap z ↦ 1/z: 1/φ(1/z), with numerator and denominator
    /// reversed at the separable degree.
    pub fn swap_chart(&self) -> RationalMapNF {
        let num = self.den.reverse_at(self.d_sep);
        let den = self.num.reverse_at(self.d_sep);
        let lc = den.lc();
        let one_over = self.domain.one().div(&lc);
        RationalMapNF {
            domain: self.domain.clone(),
            num: num.scale(&one_over),
            den: den.scale(&one_over),
            insep_exp: self.insep_exp,
            d_sep: self.d_sep,
        }
    }

    /// Lift the separable part into a Gauss extension of the base domain.
    pub fn lift_to(&self, ext: &CoeffDomain) -> RationalMapNF {
        let lift_poly = |f: &Poly| {
            Poly::new(
                ext.clone(),
                f.coeffs().iter().map(|c| c.lift_to(ext)).collect(),
            )
        };
        RationalMapNF {
            domain: ext.clone(),
            num: lift_poly(&self.num),
            den: lift_poly(&self.den),
            insep_exp: self.insep_exp,
            d_sep: self.d_sep,
        }
    }
}

/// A point of the target line a fiber is taken over.
#[derive(Debug, Clone)]
pub enum FiberPoint {
    Affine(Elem),
    Infinity,
}

/// The fiber polynomial with its bookkeeping for a preimage at ∞.
#[derive(Debug, Clone)]
pub struct FiberPoly {
    pub poly: Poly,
    /// d_sep − deg(poly): a positive value records a preimage at ∞ of that
    /// multiplicity.
    pub infinity_mult: usize,
}

pub fn fiber_poly(map: &RationalMapNF, x: &FiberPoint) -> FiberPoly {
    let poly = match x {
        FiberPoint::Affine(a) => map.num.sub(&map.den.scale(a)),
        FiberPoint::Infinity => map.den.clone(),
    };
    let deg = poly.degree().unwrap_or(0);
    FiberPoly {
        infinity_mult: map.d_sep - deg,
        poly,
    }
}

// ---------------------------------------------------------------------------
// The merge-level engine
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Preimage {
    Finite(Position),
    Infinity,
}

/// Fiber analysis over the (possibly extended) domain: the joint cluster
/// tree of the fiber polynomial F = P − xQ and the poles Q, plus the data
/// needed to evaluate val |φ − x| at its vertices.
pub(crate) struct FiberAnalysis {
    pub tree: SysTree,
    pub d_sep: usize,
    pub preimages: Vec<Preimage>,
    pub distinct: usize,
    pub lc_f_val: QRat,
    pub lc_g_val: QRat,
}

pub(crate) fn analyze_fiber(
    map: &RationalMapNF,
    x: &Elem,
    hints: Option<&[Elem]>,
) -> Result<FiberAnalysis> {
    let domain = x.domain().clone();
    assert_eq!(
        &domain,
        map.domain(),
        "fiber point outside the map's domain"
    );
    let fiber = fiber_poly(map, &FiberPoint::Affine(x.clone()));
    let f = fiber.poly;
    let g = map.den.clone();

    let mut items: Vec<TrackedItem> = vec![];
    let mut depth: Option<u32> = None;
    let mut note_depth = |d: u32| -> Result<()> {
        match depth {
            None => {
                depth = Some(d);
                Ok(())
            }
            Some(e) if e == d => Ok(()),
            Some(_) => Err(Error::unresolved(
                "mixed Frobenius depths in one fiber system",
            )),
        }
    };

    let f_const_val = if f.degree().is_none_or(|d| d == 0) {
        Some(f.coeffs().first().map_or(ValQ::Inf, |c| c.val()))
    } else {
        None
    };

    // fibers with at most one distinct preimage never need the tree: they
    // are branch points (or the whole map has separable degree one)
    let finite_distinct = match (&f_const_val, hints) {
        (Some(_), _) => 0,
        (None, Some(h)) => h.len(),
        (None, None) => distinct_root_count_full(&f)?,
    };
    let early_distinct = finite_distinct + usize::from(fiber.infinity_mult > 0);
    if early_distinct <= 1 {
        let tree = isolate_system(&domain, 0, vec![])?;
        // the stand-in marker is never described or paired: with at most
        // one preimage there is no merge data to compute
        let preimages = vec![Preimage::Infinity];
        return Ok(FiberAnalysis {
            tree,
            d_sep: map.d_sep,
            preimages,
            distinct: early_distinct,
            lc_f_val: QRat::zero(),
            lc_g_val: QRat::zero(),
        });
    }

    if let Some(hints) = hints {
        // explicit fiber roots supplied: verify and deflate
        let mut rest = f.clone();
        for h in hints {
            if !f.eval(h).is_zero() {
                return Err(Error::invalid(format!("root hint {h} is not a fiber root")));
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
                return Err(Error::invalid(format!(
                    "root hint {h} repeats an earlier hint"
                )));
            }
            note_depth(0)?;
            items.push(TrackedItem {
                poly: Poly::new(domain.clone(), vec![h.neg(), domain.one()]),
                label: LABEL_FIBER,
                mult: m,
            });
        }
        if rest.degree().is_some_and(|d| d > 0) {
            return Err(Error::unresolved(format!(
                "root hints do not exhaust the fiber: degree {} remains",
                rest.deg()
            )));
        }
    } else if f_const_val.is_none() {
        for part in separable_parts(&f)? {
            if part.poly.degree().is_none_or(|d| d == 0) {
                continue;
            }
            note_depth(part.depth)?;
            items.push(TrackedItem {
                poly: part.poly,
                label: LABEL_FIBER,
                mult: part.mult,
            });
        }
    }
    if g.degree().is_some_and(|d| d > 0) {
        for part in separable_parts(&g)? {
            if part.poly.degree().is_none_or(|d| d == 0) {
                continue;
            }
            note_depth(part.depth)?;
            items.push(TrackedItem {
                poly: part.poly,
                label: LABEL_POLE,
                mult: part.mult,
            });
        }
    }

    let tree = isolate_system(&domain, depth.unwrap_or(0), items)?;

    let mut preimages: Vec<Preimage> = tree
        .positions()
        .iter()
        .filter(|p| tree.label_of(**p) == LABEL_FIBER)
        .map(|p| Preimage::Finite(*p))
        .collect();
    let finite_mult: usize = tree
        .positions()
        .iter()
        .filter(|p| tree.label_of(**p) == LABEL_FIBER)
        .map(|p| tree.zmult_of(*p))
        .sum();
    if fiber.infinity_mult > 0 {
        preimages.push(Preimage::Infinity);
    }
    assert_eq!(
        finite_mult + fiber.infinity_mult,
        map.d_sep,
        "fiber multiplicities must sum to the separable degree"
    );
    let distinct = preimages.len();

    let lc_f_val = match &f_const_val {
        Some(_) => QRat::zero(), // unused: no finite roots
        None => f.lc().val().expect_finite(),
    };
    let lc_g_val = g.lc().val().expect_finite();
    Ok(FiberAnalysis {
        tree,
        d_sep: map.d_sep,
        preimages,
        distinct,
        lc_f_val,
        lc_g_val,
    })
}

impl FiberAnalysis {
    /// val |φ(ξ) − x| at the disk point of a tree node.
    pub fn phi_val_at_node(&self, node: usize) -> QRat {
        let vf = self.lc_f_val + self.tree.monic_val_at_node_z(node, LABEL_FIBER);
        let vg = self.lc_g_val + self.tree.monic_val_at_node_z(node, LABEL_POLE);
        vf - vg
    }

    /// Same at an arbitrary scale s on the ray through a node (s ≤ scale).
    pub fn phi_val_on_path(&self, node: usize, s_z: QRat) -> QRat {
        let vf = self.lc_f_val + self.tree.monic_val_on_path_z(node, s_z, LABEL_FIBER);
        let vg = self.lc_g_val + self.tree.monic_val_on_path_z(node, s_z, LABEL_POLE);
        vf - vg
    }

    /// Merge level of a pair of distinct preimages: the minimum of
    /// val |φ − x| over the tree path between them.
    pub fn merge_val(&self, a: Preimage, b: Preimage) -> QRat {
        let nodes: Vec<usize> = match (a, b) {
            (Preimage::Finite(pa), Preimage::Finite(pb)) => {
                let lca = self.tree.lca_node(pa, pb);
                let mut v = vec![];
                for anc in self.tree.ancestors(pa) {
                    v.push(anc);
                    if anc == lca {
                        break;
                    }
                }
                for anc in self.tree.ancestors(pb) {
                    if anc == lca {
                        break;
                    }
                    v.push(anc);
                }
                v
            }
            (Preimage::Finite(p), Preimage::Infinity)
            | (Preimage::Infinity, Preimage::Finite(p)) => self.tree.ancestors(p),
            (Preimage::Infinity, Preimage::Infinity) => unreachable!("one point at infinity"),
        };
        assert!(!nodes.is_empty(), "merge path without interior vertices");
        nodes
            .into_iter()
            .map(|n| self.phi_val_at_node(n))
            .min()
            .unwrap()
    }

    pub fn describe(&self, p: Preimage) -> String {
        match p {
            Preimage::Finite(pos) => self.tree.describe_position(pos),
            Preimage::Infinity => "inf".to_string(),
        }
    }

    /// Largest merge level over all pairs, with an achieving pair. None
    /// when fewer than two preimages exist.
    pub fn max_merge(&self) -> Option<(QRat, Preimage, Preimage)> {
        let mut best: Option<(QRat, Preimage, Preimage)> = None;
        for i in 0..self.preimages.len() {
            for j in i + 1..self.preimages.len() {
                let vm = self.merge_val(self.preimages[i], self.preimages[j]);
                if best.as_ref().is_none_or(|(b, _, _)| vm > *b) {
                    best = Some((vm, self.preimages[i], self.preimages[j]));
                }
            }
        }
        best
    }

    /// Connected components of the preimage of the open ball of radius
    /// valuation rval: preimages merge when their merge level exceeds rval.
    pub fn component_count(&self, rval: QRat) -> usize {
        let n = self.preimages.len();
        if n == 0 {
            return 0;
        }
        let mut dsu: Vec<usize> = (0..n).collect();
        fn find(dsu: &mut Vec<usize>, i: usize) -> usize {
            if dsu[i] != i {
                let r = find(dsu, dsu[i]);
                dsu[i] = r;
            }
            dsu[i]
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.merge_val(self.preimages[i], self.preimages[j]) > rval {
                    let (ri, rj) = (find(&mut dsu, i), find(&mut dsu, j));
                    dsu[ri] = rj;
                }
            }
        }
        (0..n)
            .map(|i| find(&mut dsu, i))
            .collect::<std::collections::BTreeSet<_>>()
            .len()
    }

    /// Interior-sample check: on the edge above each node, val |φ − x| must
    /// stay above the min of the node values it interpolates.
    pub fn edge_interior_samples_consistent(&self) -> bool {
        for (id, n) in self.tree.nodes.iter().enumerate() {
            let Some(parent) = n.parent else { continue };
            let lo = self.tree.diam_z(parent);
            let hi = self.tree.diam_z(id);
            if !matches!(self.tree.nodes[id].kind, roots::SysKind::Interior { .. }) {
                continue;
            }
            if lo >= hi {
                continue;
            }
            let mid = (lo + hi) / QRat::from_integer(2);
            let vm = self.phi_val_on_path(id, mid);
            let ve = self.phi_val_at_node(id).min(self.phi_val_at_node(parent));
            if vm < ve {
                return false;
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Verdict of the splitting predicate at one radius.
#[derive(Debug, Clone)]
pub struct SplittingReport {
    /// The queried point, as displayed.
    pub point: String,
    pub radius_val: QRat,
    pub d_sep: usize,
    pub distinct_fiber: usize,
    pub n_components: usize,
    pub splits: bool,
    pub certificate: String,
}

/// Witness attached to a splitting radius.
#[derive(Debug, Clone)]
pub enum SplitWitness {
    /// All pairs stay separate out to radius 1: the cap binds.
    CapAtOne,
    /// The pair of preimage clusters achieving the smallest merge radius.
    Pair {
        a: String,
        b: String,
        merge_val: QRat,
    },
    /// The fiber has fewer than d distinct points.
    BranchPoint,
}

/// The splitting radius f(x): valuation form, INF encoding f = 0.
#[derive(Debug, Clone)]
pub struct SplitRadius {
    pub val: ValQ,
    pub witness: SplitWitness,
}

impl SplitRadius {
    pub fn witness_kind(&self) -> &'static str {
        match self.witness {
            SplitWitness::CapAtOne => "cap",
            SplitWitness::Pair { .. } => "pair",
            SplitWitness::BranchPoint => "branch",
        }
    }
}

/// Number of connected components of φ^{-1}(B(x, r)) for the open ball of
/// radius valuation rval ≥ 0 around the affine point x.
pub fn components_at(map: &RationalMapNF, x: &Elem, rval: QRat) -> Result<usize> {
    components_at_with_hints(map, x, rval, None)
}

pub fn components_at_with_hints(
    map: &RationalMapNF,
    x: &Elem,
    rval: QRat,
    hints: Option<&[Elem]>,
) -> Result<usize> {
    if rval < QRat::zero() {
        return Err(Error::RadiusOutOfRange);
    }
    let fa = analyze_fiber(map, x, hints)?;
    debug_assert!(fa.edge_interior_samples_consistent());
    Ok(fa.component_count(rval))
}

/// The splitting predicate at one radius, with its certificate data.
pub fn splits_at(map: &RationalMapNF, x: &Elem, rval: QRat) -> Result<SplittingReport> {
    splits_at_with_hints(map, x, rval, None)
}

pub fn splits_at_with_hints(
    map: &RationalMapNF,
    x: &Elem,
    rval: QRat,
    hints: Option<&[Elem]>,
) -> Result<SplittingReport> {
    if rval < QRat::zero() {
        return Err(Error::RadiusOutOfRange);
    }
    let fa = analyze_fiber(map, x, hints)?;
    let n_components = fa.component_count(rval);
    let splits = fa.distinct == fa.d_sep && n_components == fa.d_sep;
    let certificate = match fa.max_merge() {
        None => "single preimage".to_string(),
        Some((vm, a, b)) => format!(
            "closest pair {} | {} merges at valuation {}",
            fa.describe(a),
            fa.describe(b),
            ValQ::Fin(vm)
        ),
    };
    Ok(SplittingReport {
        point: x.to_string(),
        radius_val: rval,
        d_sep: fa.d_sep,
        distinct_fiber: fa.distinct,
        n_components,
        splits,
        certificate,
    })
}

fn split_radius_from_analysis(fa: &FiberAnalysis, shift: QRat) -> SplitRadius {
    if fa.distinct < fa.d_sep {
        return SplitRadius {
            val: ValQ::Inf,
            witness: SplitWitness::BranchPoint,
        };
    }
    match fa.max_merge() {
        None => SplitRadius {
            val: ValQ::zero(),
            witness: SplitWitness::CapAtOne,
        },
        Some((vm, a, b)) => {
            let val = vm + shift;
            if val <= QRat::zero() {
                SplitRadius {
                    val: ValQ::zero(),
                    witness: SplitWitness::CapAtOne,
                }
            } else {
                SplitRadius {
                    val: ValQ::Fin(val),
                    witness: SplitWitness::Pair {
                        a: fa.describe(a),
                        b: fa.describe(b),
                        merge_val: vm,
                    },
                }
            }
        }
    }
}

/// Splitting radius at a type-I point (or ∞). Affine points of any size are
/// handled directly; ∞ goes through the chart swap z ↦ 1/z.
pub fn split_radius(map: &RationalMapNF, x: &FiberPoint) -> Result<SplitRadius> {
    split_radius_with_hints(map, x, None)
}

pub fn split_radius_with_hints(
    map: &RationalMapNF,
    x: &FiberPoint,
    hints: Option<&[Elem]>,
) -> Result<SplitRadius> {
    match x {
        FiberPoint::Affine(a) => {
            let fa = analyze_fiber(map, a, hints)?;
            debug_assert!(fa.edge_interior_samples_consistent());
            Ok(split_radius_from_analysis(&fa, QRat::zero()))
        }
        FiberPoint::Infinity => {
            let swapped = map.swap_chart();
            let fa = analyze_fiber(&swapped, &map.domain().zero(), hints)?;
            Ok(split_radius_from_analysis(&fa, QRat::zero()))
        }
    }
}

/// Splitting radius at the type-II point ζ_{a,ρ}: the disk is probed by the
/// generic element a + t over the Gauss extension of parameter valuation ρ.
/// Points with ρ < 0 go through the chart swap first.
pub fn split_radius_typeii(map: &RationalMapNF, center: &Elem, rho: QRat) -> Result<SplitRadius> {
    let domain = map.domain().clone();
    assert!(
        !domain.is_gauss(),
        "type-II evaluation starts from a base domain"
    );
    if rho >= QRat::zero() {
        let ext = domain.gauss_extend(rho)?;
        let x = center.lift_to(&ext).add(&ext.parameter());
        let fa = analyze_fiber(&map.lift_to(&ext), &x, None)?;
        return Ok(split_radius_from_analysis(&fa, QRat::zero()));
    }
    // ρ < 0: swap the chart; the disk maps to a nonnegative-radius disk
    let va = center.val();
    let swapped = map.swap_chart();
    let (c_w, rho_w, val_std) = if va >= ValQ::Fin(rho) {
        // 0 lies in the disk: it is centered at 0
        (domain.zero(), -rho, rho)
    } else {
        let vaf = va.expect_finite();
        (
            domain.one().div(center),
            rho - QRat::from_integer(2) * vaf,
            vaf,
        )
    };
    debug_assert!(rho_w > QRat::zero());
    let ext = domain.gauss_extend(rho_w)?;
    let x = c_w.lift_to(&ext).add(&ext.parameter());
    let fa = analyze_fiber(&swapped.lift_to(&ext), &x, None)?;
    Ok(split_radius_from_analysis(
        &fa,
        QRat::from_integer(2) * val_std,
    ))
}

/// Splitting radius at any representable point of the line.
pub fn split_radius_at_point(map: &RationalMapNF, point: &BerkPoint) -> Result<SplitRadius> {
    match point {
        BerkPoint::Infinity => split_radius(map, &FiberPoint::Infinity),
        BerkPoint::TypeI(a) => split_radius(map, &FiberPoint::Affine(a.clone())),
        BerkPoint::TypeII { center, rho } => split_radius_typeii(map, center, *rho),
    }
}
