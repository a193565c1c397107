//! Module-level invariant suites: the ultrametric laws of the valued
//! domains, Gauss-norm multiplicativity and concavity, polygon/root
//! consistency over explicit corpora, and the cross-oracle agreement
//! between the cluster engine and the resultant distance oracle.

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use splitrad::polygon::{count_roots_in_disk, gauss_eval, newton_polygon_of, Boundary};
use splitrad::roots::{
    flatten_multiset, isolate, pairwise_distance_multiset, resultant::direct_pairwise_valuations,
};
use splitrad::valfield::poly::Poly;
use splitrad::valfield::{qrat, CoeffDomain, Elem, QRat, ValQ};

fn mixed(p: u64) -> CoeffDomain {
    CoeffDomain::mixed(p).unwrap()
}

fn equal(p: u64) -> CoeffDomain {
    CoeffDomain::equal(p).unwrap()
}

/// Deterministic random element of moderate height for each domain kind.
fn random_elem(rng: &mut StdRng, d: &CoeffDomain) -> Elem {
    let base = |rng: &mut StdRng, d: &CoeffDomain| {
        let n = rng.random_range(-40i64..=40);
        let den = rng.random_range(1i64..=12);
        match d.from_ratio(n, den) {
            Ok(e) => e,
            Err(_) => d.from_i64(n),
        }
    };
    match d {
        CoeffDomain::GaussExt { .. } => {
            let b = d.base().clone();
            let t = d.parameter();
            let c0 = base(rng, &b).lift_to(d);
            let c1 = base(rng, &b).lift_to(d);
            c0.add(&c1.mul(&t))
        }
        CoeffDomain::EqualChar { .. } => {
            // small rational function in u
            let u = d.uniformizer();
            let a = d.from_i64(rng.random_range(0..d.p() as i64));
            let b2 = d.from_i64(rng.random_range(0..d.p() as i64));
            let k = rng.random_range(-3i64..=3);
            a.add(&b2.mul(&u)).mul(&u.powi(k))
        }
        _ => base(rng, d),
    }
}

#[test]
fn ultrametric_and_multiplicative_laws() {
    let domains: Vec<CoeffDomain> = vec![
        mixed(3),
        mixed(5),
        equal(2),
        equal(3),
        mixed(3).gauss_extend(qrat(1, 2)).unwrap(),
        equal(2).gauss_extend(qrat(2, 3)).unwrap(),
    ];
    let mut rng = StdRng::seed_from_u64(0xA11CE);
    for d in &domains {
        for _ in 0..1500 {
            let a = random_elem(&mut rng, d);
            let b = random_elem(&mut rng, d);
            let va = a.val();
            let vb = b.val();
            let vsum = a.add(&b).val();
            assert!(vsum >= va.min(vb), "ultrametric law: {a} + {b}");
            if va != vb {
                assert_eq!(vsum, va.min(vb), "equality when valuations differ");
            }
            assert_eq!(a.mul(&b).val(), va.add(&vb), "multiplicativity: {a} * {b}");
        }
    }
    // bulk of the 10^4 pairs per domain on the cheap base domains
    for d in [mixed(3), equal(2)] {
        for _ in 0..10_000 {
            let a = random_elem(&mut rng, &d);
            let b = random_elem(&mut rng, &d);
            let (va, vb) = (a.val(), b.val());
            let vs = a.add(&b).val();
            assert!(vs >= va.min(vb));
            if va != vb {
                assert_eq!(vs, va.min(vb));
            }
            assert_eq!(a.mul(&b).val(), va.add(&vb));
        }
    }
}

#[test]
fn residue_is_a_ring_homomorphism() {
    let mut rng = StdRng::seed_from_u64(0xBEEF);
    for d in [
        mixed(3),
        equal(2),
        mixed(2).gauss_extend(qrat(1, 2)).unwrap(),
    ] {
        let mut done = 0;
        while done < 300 {
            let a = random_elem(&mut rng, &d);
            let b = random_elem(&mut rng, &d);
            if a.val() < ValQ::zero() || b.val() < ValQ::zero() {
                continue;
            }
            let ra = a.residue().unwrap();
            let rb = b.residue().unwrap();
            assert_eq!(a.add(&b).residue().unwrap(), ra.add(&rb));
            assert_eq!(a.mul(&b).residue().unwrap(), ra.mul(&rb));
            done += 1;
        }
    }
}

proptest! {
    // The p-adic valuation of products of small rationals is additive; the
    // polygon of a product of linear factors reads the roots back exactly.
    #[test]
    fn polygon_reads_linear_factor_valuations(
        roots in proptest::collection::vec(-30i64..=30, 1..=5),
        p in prop_oneof![Just(2u64), Just(3), Just(5)],
    ) {
        let d = CoeffDomain::mixed(p).unwrap();
        let elems: Vec<Elem> = roots.iter().map(|&r| d.from_i64(r)).collect();
        let f = Poly::from_roots(&d, &elems);
        let np = newton_polygon_of(&f).unwrap();
        let mut from_polygon: Vec<QRat> = vec![];
        for (v, m) in np.root_valuations() {
            for _ in 0..m {
                from_polygon.push(v);
            }
        }
        for _ in 0..np.ord {
            // roots exactly at zero live in ord, not in the slopes
        }
        let mut direct: Vec<QRat> = elems
            .iter()
            .filter(|e| !e.is_zero())
            .map(|e| e.val().expect_finite())
            .collect();
        from_polygon.sort();
        direct.sort();
        prop_assert_eq!(from_polygon, direct);
        prop_assert_eq!(np.ord, elems.iter().filter(|e| e.is_zero()).count());
    }

    // Gauss norms multiply.
    #[test]
    fn gauss_eval_is_multiplicative(
        fc in proptest::collection::vec(-9i64..=9, 1..=4),
        gc in proptest::collection::vec(-9i64..=9, 1..=4),
        center in -6i64..=6,
        rho_num in -4i64..=6,
        rho_den in 1i64..=3,
    ) {
        let d = CoeffDomain::mixed(3).unwrap();
        let f = Poly::from_i64_coeffs(&d, &fc);
        let g = Poly::from_i64_coeffs(&d, &gc);
        prop_assume!(!f.is_zero() && !g.is_zero());
        let c = d.from_i64(center);
        let rho = qrat(rho_num, rho_den);
        let vf = gauss_eval(&f, &c, rho).unwrap();
        let vg = gauss_eval(&g, &c, rho).unwrap();
        let vfg = gauss_eval(&f.mul(&g), &c, rho).unwrap();
        prop_assert_eq!(vfg, vf.add(&vg));
    }
}

#[test]
fn gauss_eval_is_concave_piecewise_linear_in_rho() {
    // breakpoints of ρ ↦ val f(ζ_{0,ρ}) are the polygon slopes; between
    // adjacent breakpoints three exact samples are collinear, and at any
    // midpoint the value is ≥ the chord (a min of affine functions)
    let d = mixed(3);
    let polys = [
        Poly::from_i64_coeffs(&d, &[-9, 0, 1]),
        Poly::from_i64_coeffs(&d, &[27, -3, 9, 1]),
        Poly::from_i64_coeffs(&d, &[1, 1, 1, 1, 1]),
        Poly::from_i64_coeffs(&d, &[-6, 7, 0, 3]),
    ];
    for f in &polys {
        let np = newton_polygon_of(f).unwrap();
        let mut breaks: Vec<QRat> = np.root_valuations().iter().map(|&(v, _)| v).collect();
        breaks.sort();
        breaks.dedup();
        let mut grid = vec![breaks[0] - qrat(2, 1)];
        grid.extend(breaks.iter().copied());
        grid.push(breaks[breaks.len() - 1] + qrat(2, 1));
        let eval = |r: QRat| gauss_eval(f, &d.zero(), r).unwrap().expect_finite();
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            let q1 = a + (b - a) / qrat(4, 1);
            let q2 = a + (b - a) / qrat(2, 1);
            let q3 = a + (b - a) * qrat(3, 4);
            let (f1, f2, f3) = (eval(q1), eval(q2), eval(q3));
            assert_eq!(
                (f2 - f1) * (q3 - q1),
                (f3 - f1) * (q2 - q1),
                "collinear inside a piece of {f:?}"
            );
        }
        // concavity across the whole range
        for w in grid.windows(3) {
            let (a, m, b) = (w[0], w[1], w[2]);
            let (fa, fm, fb) = (eval(a), eval(m), eval(b));
            let lhs = fm * (b - a);
            let rhs = fa * (b - m) + fb * (m - a);
            assert!(lhs >= rhs, "concavity at the breakpoint {m} of {f:?}");
        }
    }
}

#[test]
fn disk_counts_partition_the_roots() {
    let mut rng = StdRng::seed_from_u64(0xC0DE);
    for _ in 0..50 {
        let d = mixed(3);
        let n = rng.random_range(1..=5usize);
        let roots: Vec<Elem> = (0..n)
            .map(|_| d.from_i64(rng.random_range(-20i64..=20)))
            .collect();
        let f = Poly::from_roots(&d, &roots);
        let np = newton_polygon_of(&f).unwrap();
        // count roots in each valuation class via half-open disk differences
        let mut classes: Vec<QRat> = np.root_valuations().iter().map(|&(v, _)| v).collect();
        classes.sort();
        classes.dedup();
        let mut total = np.ord;
        for v in classes {
            let closed =
                count_roots_in_disk(&f, &d.zero(), ValQ::Fin(v), Boundary::Closed).unwrap();
            let open = count_roots_in_disk(&f, &d.zero(), ValQ::Fin(v), Boundary::Open).unwrap();
            total += closed - open;
        }
        assert_eq!(total, f.deg(), "partition must exhaust the roots");
    }
}

#[test]
fn cluster_trees_agree_with_resultant_oracle() {
    // 100 random squarefree instances of degree ≤ 4 with explicit roots
    let mut rng = StdRng::seed_from_u64(0xD15C);
    let mut done = 0;
    while done < 100 {
        let d = match rng.random_range(0..3) {
            0 => mixed(2),
            1 => mixed(3),
            _ => mixed(5),
        };
        let n = rng.random_range(2..=4usize);
        let mut roots: Vec<Elem> = vec![];
        while roots.len() < n {
            let r = d.from_i64(rng.random_range(0..=40i64));
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
        let f = Poly::from_roots(&d, &roots);
        let tree = isolate(&f).unwrap();
        let mut via_tree = tree.pairwise_separations();
        let mut via_resultant = flatten_multiset(&pairwise_distance_multiset(&f).unwrap());
        let mut direct = direct_pairwise_valuations(&roots);
        via_tree.sort();
        via_resultant.sort();
        direct.sort();
        assert_eq!(via_tree, direct);
        assert_eq!(via_resultant, direct);
        assert!(tree.ultrametric_law_holds());
        done += 1;
    }
}

#[test]
fn base_change_leaves_tuples_alone() {
    // tuples only mention valuations, so extending the scalars of the
    // center's domain must not change them
    let d = mixed(3);
    let ext = d.gauss_extend(qrat(1, 2)).unwrap();
    for (va, rv) in [(1i64, qrat(1, 1)), (0, qrat(2, 1)), (-1, qrat(1, 2))] {
        let a = d.uniformizer().powi(va);
        let t_base = splitrad::charts::tuple_of_ball(&a, rv).unwrap();
        let t_ext = splitrad::charts::tuple_of_ball(&a.lift_to(&ext), rv).unwrap();
        assert_eq!(t_base, t_ext, "val(a) = {va}");
    }
}
