//! Acceptance suite: one test per criterion, each printing a pass line.
//! Expected values are frozen from independent computations — explicit
//! root arithmetic, the resultant distance oracle, and hand-checked small
//! cases — never from the engine under test.

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use splitrad::berkline::BerkPoint;
use splitrad::charts::{
    g_eval, m_from_chart, radius_of_tuple, reduce_disk_point, reduction_fiber_contains,
    tuple_of_ball, OrderingG, RadiusOutcome,
};
use splitrad::cli::{cmd_verify, parse_problem};
use splitrad::polygon::gauss_eval;
use splitrad::roots::{flatten_multiset, isolate, pairwise_distance_multiset};
use splitrad::splitting::{
    components_at, normalize, split_radius, split_radius_typeii, splits_at, FiberPoint,
    RationalMapNF,
};
use splitrad::valfield::poly::Poly;
use splitrad::valfield::{qrat, CoeffDomain, Elem, QRat, ValQ};
use std::time::Instant;

fn power_map(d: &CoeffDomain, k: usize) -> RationalMapNF {
    let mut c = vec![0i64; k + 1];
    c[k] = 1;
    normalize(&Poly::from_i64_coeffs(d, &c), &Poly::constant(d.one())).unwrap()
}

fn artin_schreier(d: &CoeffDomain) -> RationalMapNF {
    let p = d.p() as usize;
    let mut c = vec![0i64; p + 1];
    c[1] = -1;
    c[p] = 1;
    normalize(&Poly::from_i64_coeffs(d, &c), &Poly::constant(d.one())).unwrap()
}

/// Criterion 1: the Artin–Schreier map z^p − z in equal characteristic has
/// splitting radius 1 at every point except ∞, where it vanishes.
#[test]
fn acceptance_1_artin_schreier_reproduction() {
    let t0 = Instant::now();
    for p in [2u64, 3] {
        let d = CoeffDomain::equal(p).unwrap();
        let map = artin_schreier(&d);
        let u = d.uniformizer();

        // 13 type-I points with valuations spanning −2..3
        let mut type_i: Vec<Elem> = vec![];
        for v in -2i64..=3 {
            type_i.push(u.powi(v));
            type_i.push(u.powi(v).mul(&d.one().add(&u)));
        }
        type_i.push(d.zero());
        assert_eq!(type_i.len(), 13);

        // 12 type-II points over three centers and four radii
        let centers = [d.zero(), d.one(), u.powi(-1)];
        let rhos = [qrat(0, 1), qrat(1, 2), qrat(1, 1), qrat(3, 1)];

        let mut checked = 0;
        for x in &type_i {
            let r = split_radius(&map, &FiberPoint::Affine(x.clone())).unwrap();
            assert_eq!(r.val, ValQ::zero(), "p={p}, x={x}");
            checked += 1;
        }
        for a in &centers {
            for &rho in &rhos {
                let r = split_radius_typeii(&map, a, rho).unwrap();
                assert_eq!(r.val, ValQ::zero(), "p={p}, center={a}, rho={rho}");
                checked += 1;
            }
        }
        assert_eq!(checked, 25);

        let rinf = split_radius(&map, &FiberPoint::Infinity).unwrap();
        assert_eq!(rinf.val, ValQ::Inf, "p={p}: f(inf) = 0");
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 5, "criterion 1 exceeded 5 s: {dt:?}");
    println!("ACCEPTANCE 1 (z^p - z reproduction, p = 2, 3): PASS in {dt:?}");
}

/// Criterion 2: the wild Kummer value — split_radius of z^p at x = 1 equals
/// p^{−p/(p−1)}. The expected value is derived here from the resultant
/// oracle: the pairwise distances of the p-th roots of unity all equal
/// 1/(p−1), and the Gauss-norm of the fiber at the common join gives the
/// merge valuation.
#[test]
fn acceptance_2_wild_kummer_value() {
    let t0 = Instant::now();
    for p in [2u64, 3, 5] {
        let d = CoeffDomain::mixed(p).unwrap();
        let map = power_map(&d, p as usize);

        // oracle: distances of mu_p from the difference resultant
        let mut c = vec![0i64; p as usize + 1];
        c[0] = -1;
        c[p as usize] = 1;
        let fiber = Poly::from_i64_coeffs(&d, &c);
        let dists = flatten_multiset(&pairwise_distance_multiset(&fiber).unwrap());
        assert_eq!(dists.len(), (p as usize) * (p as usize - 1));
        let delta = dists[0];
        assert!(
            dists.iter().all(|&v| v == delta),
            "mu_p distances are all equal"
        );
        assert_eq!(delta, qrat(1, p as i64 - 1));
        // merge valuation = val of the fiber at the join of any pair
        let expected = gauss_eval(&fiber, &d.one(), delta).unwrap();
        assert_eq!(expected, ValQ::rat(p as i64, p as i64 - 1));

        let r = split_radius(&map, &FiberPoint::Affine(d.one())).unwrap();
        assert_eq!(r.val, expected, "p = {p}");
    }
    // hand check at p = 2: roots ±1, val(2) = 1, merge val = min(1+1, 2) = 2
    let d2 = CoeffDomain::mixed(2).unwrap();
    let r2 = split_radius(&power_map(&d2, 2), &FiberPoint::Affine(d2.one())).unwrap();
    assert_eq!(r2.val, ValQ::int(2));
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 5, "criterion 2 exceeded 5 s: {dt:?}");
    println!("ACCEPTANCE 2 (wild Kummer value, p = 2, 3, 5): PASS in {dt:?}");
}

/// Criterion 3: the squaring map over Q_3, end to end through the command
/// surface: verification passes on the spine with exactly one breakpoint at
/// the Gauss point and slopes {1, 0}; at least 30 exact constancy samples;
/// both finite branch points have radius zero.
#[test]
fn acceptance_3_tame_square_end_to_end() {
    let t0 = Instant::now();
    let text = "\
[field]
mode = mixed
p = 3

[map]
numerator = 0, 0, 1
denominator = 1

[skeleton]
vertex = 0
vertex = inf

[budget]
constancy_samples = 30
";
    let problem = parse_problem(text).unwrap();
    let out = cmd_verify(&problem, None).unwrap();
    assert!(!out.failed, "verification must pass");
    assert!(out.text.contains("conclusion\tpiecewise-linear\tPASS"));
    assert!(out.text.contains("conclusion\tfiber-constancy\tPASS"));

    // exactly one breakpoint, at the Gauss point, slopes {0, 1}
    let pieces: Vec<&str> = out
        .text
        .lines()
        .filter(|l| l.starts_with("piece\t"))
        .collect();
    assert_eq!(pieces.len(), 2, "{pieces:?}");
    let cols: Vec<Vec<&str>> = pieces.iter().map(|l| l.split('\t').collect()).collect();
    assert_eq!(cols[0][3], "0", "first piece ends at the Gauss point");
    assert_eq!(cols[0][4], "0", "slope toward infinity is 0");
    assert_eq!(cols[1][2], "0", "second piece starts at the Gauss point");
    assert_eq!(cols[1][4], "1", "slope toward 0 is 1");

    let n_constancy = out
        .text
        .lines()
        .filter(|l| l.starts_with("constancy\t"))
        .count();
    assert!(
        n_constancy >= 30,
        "want ≥ 30 constancy samples, got {n_constancy}"
    );
    assert!(out
        .text
        .lines()
        .filter(|l| l.starts_with("constancy\t"))
        .all(|l| l.ends_with("\tok")));

    // branch points
    let d = CoeffDomain::mixed(3).unwrap();
    let sq = power_map(&d, 2);
    assert_eq!(
        split_radius(&sq, &FiberPoint::Affine(d.zero()))
            .unwrap()
            .val,
        ValQ::Inf
    );
    assert_eq!(
        split_radius(&sq, &FiberPoint::Infinity).unwrap().val,
        ValQ::Inf
    );

    // the closed form f(x) = min(1, |x|), sampled against the engine
    for (x, want) in [
        (d.from_i64(9), ValQ::int(2)),
        (d.from_i64(3), ValQ::int(1)),
        (d.from_i64(2), ValQ::zero()),
        (d.from_ratio(1, 3).unwrap(), ValQ::zero()),
        (d.from_i64(12), ValQ::int(1)),
    ] {
        let r = split_radius(&sq, &FiberPoint::Affine(x.clone())).unwrap();
        assert_eq!(r.val, want, "x = {x}");
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 30, "criterion 3 exceeded 30 s: {dt:?}");
    println!("ACCEPTANCE 3 (tame square end-to-end): PASS in {dt:?}");
}

/// Criterion 4: the chart formula tables, bit exact — 12 tuple/radius
/// round-trips over the three size regimes and 6 size conversions
/// including the halved-valuation branch.
#[test]
fn acceptance_4_chart_formula_tables() {
    let t0 = Instant::now();
    let p = 3u64;
    let d = CoeffDomain::mixed(p).unwrap();
    let mut cases = 0;
    for va in [1i64, 0, -1, -2] {
        let a = d.uniformizer().powi(va);
        for rv in [qrat(1, 1), qrat(2, 1), qrat(0, 1)] {
            let t = tuple_of_ball(&a, rv).unwrap();
            // structural invariants: diagonal zeros; a row of ones for the
            // chart missing the point
            assert_eq!(t.entries[0][0], ValQ::zero());
            assert_eq!(t.entries[1][1], ValQ::zero());
            if va > 0 {
                assert_eq!(
                    t.entries[0][1],
                    ValQ::zero(),
                    "row of ones at val(a) = {va}"
                );
            } else if va < 0 {
                assert_eq!(
                    t.entries[1][0],
                    ValQ::zero(),
                    "row of ones at val(a) = {va}"
                );
            }
            match radius_of_tuple(&a, &t).unwrap() {
                RadiusOutcome::Radius(r) => assert_eq!(r, rv, "roundtrip at val(a)={va}, r={rv}"),
                RadiusOutcome::InfinityNeighborhood => {
                    panic!("unexpected infinity neighbourhood in the roundtrip table")
                }
            }
            cases += 1;
        }
    }
    assert_eq!(cases, 12);

    let m_cases = [
        (ValQ::int(2), qrat(0, 1), ValQ::int(1)), // halving branch
        (ValQ::rat(1, 2), qrat(0, 1), ValQ::rat(1, 4)),
        (ValQ::rat(5, 2), qrat(3, 1), ValQ::rat(5, 2)), // identity branch
        (ValQ::Inf, qrat(2, 1), ValQ::Inf),
        (ValQ::int(1), qrat(-1, 1), ValQ::zero()), // capped branch, cap binds
        (ValQ::int(5), qrat(-1, 1), ValQ::int(3)), // capped branch, no cap
    ];
    for (mpp, delta, want) in m_cases {
        assert_eq!(
            m_from_chart(mpp, delta),
            want,
            "M'' = {mpp}, delta = {delta}"
        );
    }
    let dt = t0.elapsed();
    assert!(dt.as_millis() < 1000, "criterion 4 exceeded 1 s: {dt:?}");
    println!("ACCEPTANCE 4 (chart formula tables): PASS in {dt:?}");
}

// ---------------------------------------------------------------------------
// Criterion 5: property suites
// ---------------------------------------------------------------------------

/// Random rational maps whose fiber over `x0` splits into explicit small
/// integer roots: numerator Π(z − r_i) + x0·den, so the fiber polynomial at
/// x0 has exactly the chosen roots.
struct CorpusCase {
    map: RationalMapNF,
    x0: Elem,
    roots: Vec<Elem>,
    den: Poly,
}

fn random_root(rng: &mut StdRng, d: &CoeffDomain) -> Elem {
    if d.has_char_p() {
        // small polynomial in the uniformizer, shifted by a power of u
        let p = d.p() as i64;
        let u = d.uniformizer();
        let c0 = d.from_i64(rng.random_range(0..p));
        let c1 = d.from_i64(rng.random_range(0..p));
        let c2 = d.from_i64(rng.random_range(0..p));
        let shift = rng.random_range(-2i64..=2);
        c0.add(&c1.mul(&u))
            .add(&c2.mul(&u.powi(2)))
            .mul(&u.powi(shift))
    } else {
        d.from_i64(rng.random_range(-9i64..=9))
    }
}

fn gen_case(rng: &mut StdRng, d: &CoeffDomain) -> CorpusCase {
    let deg = rng.random_range(2..=4usize);
    let with_pole = rng.random_bool(0.3);
    let mut roots = vec![];
    let mut guard = 0;
    while roots.len() < deg {
        let r = random_root(rng, d);
        // keep the fiber roots away from the pole so the map stays reduced
        if !roots.contains(&r) && !(with_pole && r.is_zero()) {
            roots.push(r);
        }
        guard += 1;
        assert!(guard < 1000, "root generation stalled");
    }
    let den = if with_pole {
        Poly::var(d)
    } else {
        Poly::constant(d.one())
    };
    let x0 = random_root(rng, d);
    let num = Poly::from_roots(d, &roots).add(&den.scale(&x0));
    let map = normalize(&num, &den).unwrap();
    CorpusCase {
        map,
        x0,
        roots,
        den,
    }
}

/// Independent merge-level computation from the explicit roots, using only
/// direct valuations of differences and the Gauss-norm evaluator.
fn oracle_components(case: &CorpusCase, rval: QRat) -> usize {
    let d = case.map.domain().clone();
    let fiber = Poly::from_roots(&d, &case.roots);
    let n = case.roots.len();
    let vm = |i: usize, j: usize| -> QRat {
        let a = &case.roots[i];
        let b = &case.roots[j];
        let dist = a.sub(b).val().expect_finite();
        let mut best: Option<QRat> = None;
        for c in [a, b] {
            // candidate radii: separations from every root and pole plus
            // the join itself
            let mut radii = vec![dist];
            for other in &case.roots {
                let v = c.sub(other).val();
                if let ValQ::Fin(q) = v {
                    if q >= dist {
                        radii.push(q);
                    }
                }
            }
            if case.den.degree() == Some(1) {
                if let ValQ::Fin(q) = c.val() {
                    if q >= dist {
                        radii.push(q);
                    }
                }
            }
            for s in radii {
                let vf = gauss_eval(&fiber, c, s).unwrap().expect_finite();
                let vg = match case.den.degree() {
                    Some(1) => gauss_eval(&case.den, c, s).unwrap().expect_finite(),
                    _ => QRat::zero(),
                };
                let v = vf - vg;
                best = Some(best.map_or(v, |b: QRat| b.min(v)));
            }
        }
        best.unwrap()
    };
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
            if vm(i, j) > rval {
                let (a, b) = (find(&mut dsu, i), find(&mut dsu, j));
                dsu[a] = b;
            }
        }
    }
    let mut reps: Vec<usize> = (0..n).map(|i| find(&mut dsu, i)).collect();
    reps.sort();
    reps.dedup();
    reps.len()
}

#[test]
fn acceptance_5_property_suites() {
    let t0 = Instant::now();
    let domains = [
        CoeffDomain::mixed(2).unwrap(),
        CoeffDomain::mixed(3).unwrap(),
        CoeffDomain::mixed(5).unwrap(),
        CoeffDomain::equal(2).unwrap(),
        CoeffDomain::equal(3).unwrap(),
    ];

    // splitting monotone in the radius: 200 trials
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let mut monotone_trials = 0;
    while monotone_trials < 200 {
        let d = &domains[rng.random_range(0..domains.len())];
        let case = gen_case(&mut rng, d);
        let r_small = qrat(rng.random_range(0..8), rng.random_range(1..4));
        let r_big = r_small + qrat(rng.random_range(0..5), 1);
        // valuation form: bigger valuation = smaller ball
        let at_big_ball = splits_at(&case.map, &case.x0, r_small).unwrap();
        let at_small_ball = splits_at(&case.map, &case.x0, r_big).unwrap();
        if at_big_ball.splits {
            assert!(
                at_small_ball.splits,
                "splitting at a larger ball implies splitting at a smaller one"
            );
        }
        monotone_trials += 1;
    }

    // attainment: splitting holds exactly at the critical radius
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let mut attained = 0;
    while attained < 100 {
        let d = &domains[rng.random_range(0..domains.len())];
        let case = gen_case(&mut rng, d);
        let r = split_radius(&case.map, &FiberPoint::Affine(case.x0.clone())).unwrap();
        if let ValQ::Fin(v) = r.val {
            let rep = splits_at(&case.map, &case.x0, v).unwrap();
            assert!(rep.splits, "attainment at the critical radius");
            attained += 1;
        }
    }

    // Frobenius invariance: 50 wrapped maps in characteristic p
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    for _ in 0..50 {
        let p = if rng.random_bool(0.5) { 2u64 } else { 3 };
        let d = CoeffDomain::equal(p).unwrap();
        // a separable polynomial map with small coefficients
        let deg = rng.random_range(2..=3usize);
        let mut coeffs: Vec<i64> = (0..=deg).map(|_| rng.random_range(-3i64..=3)).collect();
        coeffs[1] = 1; // force a nonzero derivative
        coeffs[deg] = 1;
        let sep = Poly::from_i64_coeffs(&d, &coeffs);
        let wrapped = sep.stretch(p as usize);
        let m_sep = normalize(&sep, &Poly::constant(d.one())).unwrap();
        let m_wrapped = normalize(&wrapped, &Poly::constant(d.one())).unwrap();
        assert_eq!(m_wrapped.insep_exp, 1);
        let x = d.from_i64(rng.random_range(-4i64..=4));
        let r1 = split_radius(&m_sep, &FiberPoint::Affine(x.clone()));
        let r2 = split_radius(&m_wrapped, &FiberPoint::Affine(x.clone()));
        match (r1, r2) {
            (Ok(a), Ok(b)) => assert_eq!(a.val, b.val, "p={p}, x={x}"),
            (Err(_), Err(_)) => {}
            (a, b) => panic!("Frobenius invariance broke: {a:?} vs {b:?}"),
        }
    }

    // fiber bound: the number of distinct preimages never exceeds d. The
    // count itself needs no clustering, so it covers every query; the
    // clustering verdict is additionally checked when the fiber resolves.
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    for _ in 0..100 {
        let d = &domains[rng.random_range(0..domains.len())];
        let case = gen_case(&mut rng, d);
        let x = random_root(&mut rng, d);
        let fiber = splitrad::splitting::fiber_poly(&case.map, &FiberPoint::Affine(x.clone()));
        let finite = if fiber.poly.degree().map_or(true, |dd| dd == 0) {
            0
        } else {
            splitrad::roots::distinct_root_count_full(&fiber.poly).unwrap()
        };
        let distinct = finite + usize::from(fiber.infinity_mult > 0);
        assert!(distinct <= case.map.d_sep, "fiber bound at x={x}");
        if let Ok(rep) = splits_at(&case.map, &x, qrat(1, 1)) {
            assert!(rep.distinct_fiber <= rep.d_sep);
            assert_eq!(rep.distinct_fiber, distinct);
        }
    }

    // size functional monotone on nested tuples: 500 pairs
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let d3 = CoeffDomain::mixed(3).unwrap();
    for _ in 0..500 {
        let va = rng.random_range(-2i64..=2);
        let a = d3.uniformizer().powi(va);
        let v_outer = qrat(rng.random_range(0..6), rng.random_range(1..3));
        let v_inner = v_outer + qrat(rng.random_range(0..5), rng.random_range(1..3));
        let t_inner = tuple_of_ball(&a, v_inner).unwrap();
        let t_outer = tuple_of_ball(&a, v_outer).unwrap();
        assert!(
            t_inner.le(&t_outer),
            "nested balls give entrywise-smaller tuples"
        );
        // multiplicative g(inner) ≤ g(outer) is valuation ≥
        assert!(
            g_eval(&OrderingG::Product, &t_inner) >= g_eval(&OrderingG::Product, &t_outer),
            "size functional must be monotone"
        );
    }

    // ultrametric law on every produced cluster tree
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    for _ in 0..60 {
        let d = &domains[rng.random_range(0..domains.len())];
        let case = gen_case(&mut rng, d);
        let fiber = Poly::from_roots(d, &case.roots);
        let tree = isolate(&fiber).unwrap();
        assert!(tree.ultrametric_law_holds());
    }

    // component counts agree with the explicit-root oracle: 100 instances
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    for trial in 0..100 {
        let d = &domains[rng.random_range(0..domains.len())];
        let case = gen_case(&mut rng, d);
        let rval = qrat(rng.random_range(0..7), rng.random_range(1..3));
        let engine = components_at(&case.map, &case.x0, rval).unwrap();
        let oracle = oracle_components(&case, rval);
        assert_eq!(
            engine, oracle,
            "trial {trial}: components at valuation {rval}"
        );
    }

    // fiber multiplicities conserve the separable degree
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    for _ in 0..50 {
        let d = &domains[rng.random_range(0..domains.len())];
        let case = gen_case(&mut rng, d);
        let rep = splits_at(&case.map, &case.x0, qrat(0, 1)).unwrap();
        assert_eq!(rep.d_sep, case.map.d_sep);
    }

    let dt = t0.elapsed();
    assert!(dt.as_secs() < 120, "criterion 5 exceeded 2 min: {dt:?}");
    println!("ACCEPTANCE 5 (property suites): PASS in {dt:?}");
}

/// Criterion 6: the reduction-fiber law — membership in the open unit ball
/// around x is exactly equality of reductions, and the boundary behaves
/// strictly.
#[test]
fn acceptance_6_reduction_fiber_law() {
    let t0 = Instant::now();
    let d = CoeffDomain::mixed(3).unwrap();
    let mut rng = StdRng::seed_from_u64(0x5eed_0009);
    for _ in 0..100 {
        // random unit-disk pair: integers are exactly the generic elements
        // of the valuation ring here
        let x = d.from_i64(rng.random_range(0..81i64));
        let y = d.from_i64(rng.random_range(0..81i64));
        let in_fiber = reduction_fiber_contains(&x, &BerkPoint::TypeI(y.clone())).unwrap();
        let same_reduction = reduce_disk_point(&BerkPoint::TypeI(y.clone())).unwrap()
            == reduce_disk_point(&BerkPoint::TypeI(x.clone())).unwrap();
        assert_eq!(in_fiber, same_reduction, "x={x}, y={y}");
    }
    // 20 boundary probes: distance valuation exactly 0 must be excluded,
    // strictly positive valuation included
    let x = d.from_i64(4);
    for k in 1..=10i64 {
        let probe_out = x.add(&d.from_i64(3 * k + 1)); // val(probe − x) = 0
        assert!(!probe_out.sub(&x).val().is_negative());
        assert_eq!(probe_out.sub(&x).val(), ValQ::zero());
        assert!(!reduction_fiber_contains(&x, &BerkPoint::TypeI(probe_out)).unwrap());
        let probe_in = x.add(&d.from_i64(3 * k).mul(&d.from_i64(3))); // val ≥ 2 > 0
        assert!(reduction_fiber_contains(&x, &BerkPoint::TypeI(probe_in)).unwrap());
    }
    let dt = t0.elapsed();
    assert!(dt.as_millis() < 1000, "criterion 6 exceeded 1 s: {dt:?}");
    println!("ACCEPTANCE 6 (reduction fiber law): PASS in {dt:?}");
}

/// Fractional valuations like 5/4 only exist on an exact data path; a
/// rounded engine could not return them.
#[test]
fn acceptance_data_path_is_exact() {
    let d = CoeffDomain::mixed(5).unwrap();
    let map = power_map(&d, 5);
    let r = split_radius(&map, &FiberPoint::Affine(d.one())).unwrap();
    assert_eq!(r.val, ValQ::rat(5, 4));
    println!("ACCEPTANCE exactness spot check: PASS");
}
