//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Everything here is an exact algebraic identity, so every comparison is
//! exact-match with zero tolerance.

use klein4diff::cli::{run, run_decompositions, InstanceConfig, Mode};
use klein4diff::cover::analyze;
use klein4diff::field::{FieldCtx, FieldElement};
use klein4diff::holo::{action_matrices, build_basis};
use klein4diff::klein4rep::{
    build_indecomposable, cohort, decompose, filtration_subquotient_dims, lambda_add_one,
    lambda_inv, Decomposition, GroupPerm, IndecLabel, KleinModule,
};
use klein4diff::linalg::Mat;
use klein4diff::local::compute_all;
use klein4diff::predict::{
    branch_data, canonical_probes, decompose_p1, epsilon_constraints, filtration_dims,
};
use klein4diff::ratfun::{Poly, ProjPoint, RatFun};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn k16() -> FieldCtx {
    FieldCtx::new(4).unwrap()
}

fn n_label(n: u64, lambda: ProjPoint) -> IndecLabel {
    IndecLabel::N { n, lambda }
}

/// Run the library pipeline on explicit rational functions: returns
/// (genus, basis size, predicted, verified).
fn pipeline(p: &RatFun, q: &RatFun, k: &FieldCtx) -> (u64, usize, Decomposition, Decomposition) {
    let an = analyze(p, q, k).expect("admissible cover");
    let locals = compute_all(&an, k).expect("local data");
    let data = branch_data(&locals);
    let predicted = decompose_p1(&data);
    let basis = build_basis(&an, &locals, k);
    let module = action_matrices(&an, &basis, k).expect("action matrices");
    let verified = decompose(&module, k).expect("decomposition");
    (an.genus, basis.elems.len(), predicted, verified)
}

// ---------------------------------------------------------------------------
// Criterion 1: the four-branch-point example end to end
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_four_point_example_end_to_end() {
    let t0 = Instant::now();
    let cfg = InstanceConfig {
        field_degree: 4,
        modulus: None,
        p_expr: "1/(t*(t-1)^3*(t-a)^3*(t-b)^3)".into(),
        q_expr: "a/(t^3*(t-1)*(t-a)^3*(t-b)^3)".into(),
        mode: Mode::Full,
        probes: Vec::new(),
        lets: vec![("a".into(), "g^5".into()), ("b".into(), "1/(1+a*g)".into())],
    };
    let report = run(&cfg).unwrap();
    assert_eq!(report.verdict, "MATCH");
    assert_eq!(report.genus, 18);
    let (predicted, verified) = run_decompositions(&cfg).unwrap();
    let k = k16();
    let want = Decomposition::from_labels(&[
        (n_label(1, ProjPoint::Infinity), 1),
        (n_label(1, ProjPoint::Finite(FieldElement::ZERO)), 1),
        (n_label(1, ProjPoint::Finite(FieldElement::ONE)), 1),
        (n_label(1, ProjPoint::Finite(k.generator())), 1),
        (IndecLabel::M1 { n: 1 }, 3),
        (IndecLabel::Triv, 1),
    ]);
    assert_eq!(predicted, want);
    assert_eq!(verified, want);
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 5.0, "took {:?}", dt);
    println!(
        "criterion 01 PASS: four-point example matches exactly ({} ms)",
        dt.as_millis()
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: the quintic family for n = 1..5
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_quintic_family() {
    let k = k16();
    for n in 1..=5u64 {
        let t0 = Instant::now();
        let lambdas: Vec<FieldElement> = (0..n).map(|i| k.gpow(i + 2)).collect();
        let mut den = Poly::one();
        for &l in &lambdas {
            den = den.mul(&Poly::from_coeffs(vec![l, FieldElement::ONE]).pow(5, &k), &k);
        }
        let p = RatFun::new(Poly::one(), den.clone(), &k).unwrap();
        let q = RatFun::new(Poly::monomial(FieldElement::ONE, 2), den, &k).unwrap();
        let (genus, basis, predicted, verified) = pipeline(&p, &q, &k);
        let mut want = Decomposition::new();
        for &l in &lambdas {
            want.add(n_label(1, ProjPoint::Finite(l)), 1);
        }
        want.add(IndecLabel::M1 { n: 1 }, 2 * n - 1);
        want.add(IndecLabel::Triv, n);
        assert_eq!(predicted, want, "prediction for n = {}", n);
        assert_eq!(verified, want, "verification for n = {}", n);
        assert_eq!(genus as usize, basis);
        assert_eq!(want.total_dim(), genus);
        let dt = t0.elapsed();
        assert!(dt.as_secs_f64() < 10.0, "n = {} took {:?}", n, dt);
    }
    println!("criterion 02 PASS: quintic family n = 1..5 matches exactly");
}

// ---------------------------------------------------------------------------
// Criterion 3: the one-branch-point families, both paths agreeing
// ---------------------------------------------------------------------------

fn kg_family(case: &str, d: u64, k: &FieldCtx) -> (RatFun, RatFun) {
    let l0 = k.generator();
    let l2 = k.mul(l0, l0);
    let mono = |c: FieldElement, e: u64| RatFun::from_poly(Poly::monomial(c, e as usize));
    let f = mono(FieldElement::ONE, 8 * d - 5);
    let g = mono(l2, 8 * d - 1);
    let h = g.add(&f, k); // t^(8d-1)(l0^2 + t^-4)
    match case {
        "1" => {
            let p = mono(FieldElement::ONE, 8 * d + 3);
            let q = mono(l2, 8 * d + 3).add(&mono(l2, 8 * d - 1), k);
            (p, q)
        }
        "2a" => (f, g),
        "2b" => (g, f),
        "2c" => (h, g),
        _ => unreachable!(),
    }
}

#[test]
fn criterion_03_one_point_families() {
    let k = k16();
    for d in 1..=4u64 {
        for case in ["1", "2a", "2b", "2c"] {
            let t0 = Instant::now();
            let (p, q) = kg_family(case, d, &k);
            let (genus, basis, predicted, verified) = pipeline(&p, &q, &k);
            let (lambda, m1_mult, triv_mult) = match case {
                "1" => (ProjPoint::Finite(k.generator()), 2 * d, 2 * d + 1),
                "2a" => (ProjPoint::Infinity, 2 * d - 2, 2 * d - 1),
                "2b" => (ProjPoint::Finite(FieldElement::ZERO), 2 * d - 2, 2 * d - 1),
                "2c" => (ProjPoint::Finite(FieldElement::ONE), 2 * d - 2, 2 * d - 1),
                _ => unreachable!(),
            };
            let mut want = Decomposition::new();
            want.add(n_label(d + 1, lambda), 1);
            want.add(n_label(d, lambda), 1);
            want.add(IndecLabel::M1 { n: 1 }, m1_mult);
            want.add(IndecLabel::Triv, triv_mult);
            assert_eq!(predicted, want, "formula path, case {} d {}", case, d);
            assert_eq!(verified, want, "matrix path, case {} d {}", case, d);
            assert_eq!(genus as usize, basis);
            let dt = t0.elapsed();
            assert!(dt.as_secs_f64() < 30.0, "case {} d {} took {:?}", case, d, dt);
        }
    }
    println!("criterion 03 PASS: one-point families cases 1/2a/2b/2c, d = 1..4");
}

// ---------------------------------------------------------------------------
// Criterion 4: randomized oracle equivalence sweep
// ---------------------------------------------------------------------------

/// Build a random admissible (p, q) over the given field with at most
/// `max_points` branch points and all ramification jumps <= `max_m`.
fn random_cover(
    rng: &mut ChaCha8Rng,
    k: &FieldCtx,
    max_points: usize,
    max_m: u64,
) -> (RatFun, RatFun) {
    let n_points = rng.gen_range(1..=max_points);
    // distinct branch coordinates, with infinity a candidate
    let mut points: Vec<ProjPoint> = Vec::new();
    while points.len() < n_points {
        let cand = if rng.gen_bool(0.3) && !points.contains(&ProjPoint::Infinity) {
            ProjPoint::Infinity
        } else {
            ProjPoint::Finite(k.elem(rng.gen_range(0..k.size() as u64)))
        };
        if !points.contains(&cand) {
            points.push(cand);
        }
    }
    // a uniformly random odd number in 1..=hi
    let odd = |rng: &mut ChaCha8Rng, hi: u64| -> u64 { 2 * rng.gen_range(0..=(hi - 1) / 2) + 1 };
    let nonzero = |rng: &mut ChaCha8Rng| -> FieldElement {
        k.elem(rng.gen_range(1..k.size() as u64))
    };
    let pi_pow = |y: ProjPoint, e: i64| klein4diff::holo::pi_power(y, e, k);
    // a principal part with prescribed leading order -m and random tail
    let principal = |rng: &mut ChaCha8Rng, y: ProjPoint, m: u64, lead: FieldElement| -> RatFun {
        let mut acc = pi_pow(y, -(m as i64)).scale(lead, k);
        for e in 1..m {
            if rng.gen_bool(0.4) {
                let c = k.elem(rng.gen_range(0..k.size() as u64));
                if !c.is_zero() {
                    acc = acc.add(&pi_pow(y, -(e as i64)).scale(c, k), k);
                }
            }
        }
        acc
    };
    let mut p = RatFun::zero();
    let mut q = RatFun::zero();
    for &y in &points {
        let tag = rng.gen_range(0..4);
        if tag == 0 {
            // case I: equal odd orders, leading ratio outside {0, 1}
            let m = odd(rng, max_m);
            let cp = nonzero(rng);
            let ratio = loop {
                let r = nonzero(rng);
                if r != FieldElement::ONE {
                    break r;
                }
            };
            p = p.add(&principal(rng, y, m, cp), k);
            q = q.add(&principal(rng, y, m, k.mul(cp, ratio)), k);
        } else {
            let m = odd(rng, max_m - 2);
            let big_m = m + 2 * rng.gen_range(1..=(max_m - m) / 2);
            debug_assert!(m < big_m && big_m % 2 == 1);
            let (c1, c2) = (nonzero(rng), nonzero(rng));
            match tag {
                1 => {
                    // IIa: p small
                    p = p.add(&principal(rng, y, m, c1), k);
                    q = q.add(&principal(rng, y, big_m, c2), k);
                }
                2 => {
                    // IIb: q small
                    p = p.add(&principal(rng, y, big_m, c1), k);
                    q = q.add(&principal(rng, y, m, c2), k);
                }
                _ => {
                    // IIc: p + q small, p and q share the leading term
                    let shared = principal(rng, y, big_m, c1);
                    let small = principal(rng, y, m, c2);
                    p = p.add(&shared, k).add(&small, k);
                    q = q.add(&shared, k);
                }
            }
        }
    }
    // obfuscate with a random Artin-Schreier trivial summand half the time
    if rng.gen_bool(0.5) {
        let mu = k.elem(rng.gen_range(0..k.size() as u64));
        let e = rng.gen_range(1..=2i64);
        let (c1, c2) = (nonzero(rng), nonzero(rng));
        let s = pi_pow(ProjPoint::Finite(mu), -e)
            .scale(c1, k)
            .add(&RatFun::t().scale(c2, k), k);
        p = p.add(&s.square(k).add(&s, k), k);
    }
    (p, q)
}

#[test]
fn criterion_04_and_05_oracle_sweep_with_riemann_hurwitz() {
    let k = FieldCtx::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a5c_9e02);
    let mut checked = 0;
    while checked < 100 {
        let (p, q) = random_cover(&mut rng, &k, 3, 11);
        let (genus, basis, predicted, verified) = pipeline(&p, &q, &k);
        assert_eq!(
            predicted, verified,
            "oracle mismatch on instance {} (p = {}, q = {})",
            checked,
            p.to_string(&k),
            q.to_string(&k)
        );
        // Riemann-Hurwitz consistency on every sweep instance
        assert_eq!(basis as u64, genus);
        assert_eq!(predicted.total_dim(), genus);
        checked += 1;
    }
    println!("criterion 04 PASS: 100 random instances, formula = linear algebra on all");
    println!("criterion 05 PASS: basis size = genus = decomposition dimension on the sweep");
}

/// A larger, slower sweep beyond the required 100 instances; run with
/// `cargo test -- --ignored` when touching the pipeline.
#[test]
#[ignore]
fn extended_oracle_sweep() {
    let k = FieldCtx::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xbeef_0001);
    for trial in 0..300 {
        let (p, q) = random_cover(&mut rng, &k, 3, 11);
        let (genus, basis, predicted, verified) = pipeline(&p, &q, &k);
        assert_eq!(predicted, verified, "trial {}", trial);
        assert_eq!(basis as u64, genus);
    }
    // the whole machinery also works over a small field where the branch
    // parameters collide with {0, 1} far more often
    let k4 = k16();
    let mut rng = ChaCha8Rng::seed_from_u64(0xbeef_0002);
    for trial in 0..100 {
        let (p, q) = random_cover(&mut rng, &k4, 2, 7);
        let (genus, basis, predicted, verified) = pipeline(&p, &q, &k4);
        assert_eq!(predicted, verified, "small-field trial {}", trial);
        assert_eq!(basis as u64, genus);
    }
    println!("extended sweep PASS: 400 additional random instances");
}

#[test]
fn criterion_05_riemann_hurwitz_on_fixtures() {
    let k = k16();
    let mut instances: Vec<(RatFun, RatFun)> = Vec::new();
    for d in 1..=4 {
        for case in ["1", "2a", "2b", "2c"] {
            instances.push(kg_family(case, d, &k));
        }
    }
    for n in 1..=5u64 {
        let lambdas: Vec<FieldElement> = (0..n).map(|i| k.gpow(i + 2)).collect();
        let mut den = Poly::one();
        for &l in &lambdas {
            den = den.mul(&Poly::from_coeffs(vec![l, FieldElement::ONE]).pow(5, &k), &k);
        }
        instances.push((
            RatFun::new(Poly::one(), den.clone(), &k).unwrap(),
            RatFun::new(Poly::monomial(FieldElement::ONE, 2), den, &k).unwrap(),
        ));
    }
    for (p, q) in &instances {
        let (genus, basis, predicted, verified) = pipeline(p, q, &k);
        assert_eq!(basis as u64, genus);
        assert_eq!(predicted.total_dim(), genus);
        assert_eq!(verified.total_dim(), genus);
    }
    println!(
        "criterion 05 PASS: basis size = genus = total dimension on {} fixture instances",
        instances.len()
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: the subquotient dimension table
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_subquotient_table() {
    let k = k16();
    let hit = ProjPoint::Finite(k.gpow(7));
    let miss = ProjPoint::Finite(k.gpow(3));
    for n in 1..=6u64 {
        let nn = n as usize;
        // N(2n, lambda) for finite lambda and for infinity
        for lambda in [hit, ProjPoint::Infinity] {
            let m = build_indecomposable(n_label(n, lambda), &k);
            for probe in [hit, miss, ProjPoint::Infinity] {
                let d = filtration_subquotient_dims(&m, probe, &k);
                let hit_probe = probe == lambda;
                let want = if hit_probe { [0, nn - 1, 1, nn] } else { [0, nn, 0, nn] };
                assert_eq!(d, want, "N({}, {:?}) at probe {:?}", 2 * n, lambda, probe);
            }
        }
        for probe in [hit, miss, ProjPoint::Infinity] {
            let m1 = build_indecomposable(IndecLabel::M1 { n }, &k);
            assert_eq!(filtration_subquotient_dims(&m1, probe, &k), [0, nn, 1, nn]);
            let m2 = build_indecomposable(IndecLabel::M2 { n }, &k);
            assert_eq!(filtration_subquotient_dims(&m2, probe, &k), [0, nn, 0, nn + 1]);
        }
    }
    for probe in [hit, miss, ProjPoint::Infinity] {
        let triv = build_indecomposable(IndecLabel::Triv, &k);
        assert_eq!(filtration_subquotient_dims(&triv, probe, &k), [0, 0, 0, 1]);
        let free = build_indecomposable(IndecLabel::Free, &k);
        assert_eq!(filtration_subquotient_dims(&free, probe, &k), [1, 1, 1, 1]);
    }

    // additivity over random direct sums of <= 10 summands
    let mut rng = ChaCha8Rng::seed_from_u64(0xadd1_7111);
    for _ in 0..30 {
        let count = rng.gen_range(1..=10);
        let labels: Vec<IndecLabel> = (0..count).map(|_| random_label(&mut rng, &k, 4)).collect();
        let parts: Vec<KleinModule> =
            labels.iter().map(|&l| build_indecomposable(l, &k)).collect();
        let total = KleinModule::direct_sum(&parts);
        for probe in [hit, miss, ProjPoint::Infinity] {
            let whole = filtration_subquotient_dims(&total, probe, &k);
            let mut sum = [0usize; 4];
            for part in &parts {
                let d = filtration_subquotient_dims(part, probe, &k);
                for i in 0..4 {
                    sum[i] += d[i];
                }
            }
            assert_eq!(whole, sum);
            assert_eq!(whole.iter().sum::<usize>(), total.dim);
        }
    }
    println!("criterion 06 PASS: subquotient table rows n = 1..6 and additivity");
}

fn random_label(rng: &mut ChaCha8Rng, k: &FieldCtx, max_n: u64) -> IndecLabel {
    let n = rng.gen_range(1..=max_n);
    match rng.gen_range(0..5) {
        0 => IndecLabel::Triv,
        1 => IndecLabel::Free,
        2 => {
            let lambda = if rng.gen_bool(0.2) {
                ProjPoint::Infinity
            } else {
                ProjPoint::Finite(k.elem(rng.gen_range(0..k.size() as u64)))
            };
            IndecLabel::N { n, lambda }
        }
        3 => IndecLabel::M1 { n },
        _ => IndecLabel::M2 { n },
    }
}

// ---------------------------------------------------------------------------
// Criterion 7: Kronecker round trip under random basis change
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_kronecker_round_trip() {
    let k = FieldCtx::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    for trial in 0..500 {
        let mut labels = Vec::new();
        let mut dim = 0u64;
        loop {
            let l = random_label(&mut rng, &k, 6);
            if dim + l.dim() > 120 || (labels.len() >= 2 && rng.gen_bool(0.25)) {
                break;
            }
            dim += l.dim();
            labels.push(l);
        }
        if labels.is_empty() {
            labels.push(IndecLabel::Triv);
        }
        let want = {
            let mut d = Decomposition::new();
            for &l in &labels {
                d.add(l, 1);
            }
            d
        };
        let parts: Vec<KleinModule> =
            labels.iter().map(|&l| build_indecomposable(l, &k)).collect();
        let m = KleinModule::direct_sum(&parts);
        let p = random_invertible(&mut rng, &k, m.dim);
        let got = decompose(&m.conjugate(&p, &k), &k).unwrap();
        assert_eq!(got, want, "trial {}", trial);
    }
    println!("criterion 07 PASS: 500 random direct sums recovered exactly");
}

fn random_invertible(rng: &mut ChaCha8Rng, k: &FieldCtx, n: usize) -> Mat {
    // product of a random unit lower and unit upper triangular matrix plus a
    // permutation: invertible by construction
    let mut lower = Mat::identity(n);
    let mut upper = Mat::identity(n);
    for r in 0..n {
        for c in 0..r {
            if rng.gen_bool(0.3) {
                lower.set(r, c, k.elem(rng.gen_range(0..k.size() as u64)));
            }
            if rng.gen_bool(0.3) {
                upper.set(c, r, k.elem(rng.gen_range(0..k.size() as u64)));
            }
        }
    }
    let mut perm = Mat::zeros(n, n);
    let mut cols: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        cols.swap(i, rng.gen_range(0..=i));
    }
    for (r, &c) in cols.iter().enumerate() {
        perm.set(r, c, FieldElement::ONE);
    }
    lower.mul(&upper, k).mul(&perm, k)
}

// ---------------------------------------------------------------------------
// Criterion 8: filtration dimensions, formula vs matrices
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_filtration_dims_cross_check() {
    let k = k16();
    let mut instances: Vec<(RatFun, RatFun)> = Vec::new();
    for d in 1..=3 {
        for case in ["1", "2a", "2b", "2c"] {
            instances.push(kg_family(case, d, &k));
        }
    }
    // the four-point fixture
    let a = k.gpow(5);
    let b = k.inv(k.add(FieldElement::ONE, k.mul(a, k.generator()))).unwrap();
    let lin = |mu: FieldElement| Poly::from_coeffs(vec![mu, FieldElement::ONE]);
    let pden = lin(FieldElement::ZERO)
        .mul(&lin(FieldElement::ONE).pow(3, &k), &k)
        .mul(&lin(a).pow(3, &k), &k)
        .mul(&lin(b).pow(3, &k), &k);
    let qden = lin(FieldElement::ZERO)
        .pow(3, &k)
        .mul(&lin(FieldElement::ONE), &k)
        .mul(&lin(a).pow(3, &k), &k)
        .mul(&lin(b).pow(3, &k), &k);
    instances.push((
        RatFun::new(Poly::one(), pden, &k).unwrap(),
        RatFun::new(Poly::constant(a), qden, &k).unwrap(),
    ));

    for (idx, (p, q)) in instances.iter().enumerate() {
        let an = analyze(p, q, &k).unwrap();
        let locals = compute_all(&an, &k).unwrap();
        let data = branch_data(&locals);
        let basis = build_basis(&an, &locals, &k);
        let module = action_matrices(&an, &basis, &k).unwrap();
        for probe in canonical_probes(&data, &k) {
            let fd = filtration_dims(&data, probe, &k);
            let dims = filtration_subquotient_dims(&module, probe.0, &k);
            let matrix_r = [
                dims[3] as u64 + 1,
                dims[2] as u64 + 1,
                dims[1] as u64 + 1,
                dims[0] as u64 + 1,
            ];
            assert_eq!(
                [fd.r0, fd.r1, fd.r2, fd.r3],
                matrix_r,
                "instance {} probe {:?}",
                idx,
                probe
            );
        }
    }
    println!(
        "criterion 08 PASS: formula and matrix filtration dimensions agree on {} instances",
        instances.len()
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: epsilon constraints on every verified decomposition
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_epsilon_constraints() {
    let k = k16();
    let mut instances: Vec<(RatFun, RatFun)> = Vec::new();
    for d in 1..=3 {
        for case in ["1", "2a", "2b", "2c"] {
            instances.push(kg_family(case, d, &k));
        }
    }
    let k8 = FieldCtx::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xe9_51_10);
    for (field, p, q) in instances
        .iter()
        .map(|(p, q)| (&k, p.clone(), q.clone()))
        .chain((0..20).map(|_| {
            let (p, q) = random_cover(&mut rng, &k8, 3, 9);
            (&k8, p, q)
        }))
        .collect::<Vec<_>>()
    {
        let an = analyze(&p, &q, field).unwrap();
        let locals = compute_all(&an, field).unwrap();
        let data = branch_data(&locals);
        let basis = build_basis(&an, &locals, field);
        let module = action_matrices(&an, &basis, field).unwrap();
        let verified = decompose(&module, field).unwrap();
        let eps = epsilon_constraints(&data, 0);
        // extract the epsilons of the verified decomposition
        let mut got_eps1 = std::collections::BTreeMap::new();
        let mut got_eps2 = 0;
        let mut got_eps3 = 0;
        let mut got_eps4 = 0;
        let mut got_eps5 = 0;
        for (label, mult) in verified.entries() {
            match label {
                IndecLabel::N { lambda, .. } => {
                    *got_eps1.entry(lambda).or_insert(0u64) += mult;
                }
                IndecLabel::M1 { .. } => got_eps2 += mult,
                IndecLabel::M2 { .. } => got_eps3 += mult,
                IndecLabel::Triv => got_eps4 += mult,
                IndecLabel::Free => got_eps5 += mult,
            }
        }
        // (i): Lambda_M inside Lambda_br with the stated multiplicities
        let branch_lambdas: std::collections::BTreeSet<ProjPoint> =
            data.iter().map(|bd| bd.lambda).collect();
        for (&lambda, &mult) in &got_eps1 {
            assert!(branch_lambdas.contains(&lambda));
            assert_eq!(mult, eps.eps1[&lambda]);
        }
        // (ii)-(iv)
        assert_eq!(got_eps2, eps.eps2);
        assert_eq!(got_eps3 + got_eps4, eps.eps3_plus_eps4);
        assert_eq!(got_eps3, 0, "no M2 summands over a rational base");
        assert_eq!(got_eps5, eps.eps5);
        // excluded-lambda rule: dropped parameters only with case-I m = 1
        for &lambda in branch_lambdas.iter() {
            if got_eps1.get(&lambda).copied().unwrap_or(0) == 0 {
                for bd in data.iter().filter(|bd| bd.lambda == lambda) {
                    assert!(bd.delta == 0 && bd.m == 1);
                }
            }
        }
    }
    println!("criterion 09 PASS: epsilon constraints hold on every verified decomposition");
}

// ---------------------------------------------------------------------------
// Criterion 10: relabeling patterns and parameter cohorts
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_cohorts_and_relabeling() {
    let k = FieldCtx::new(8).unwrap();
    // the three generator patterns: a module whose first generator acts by
    // the Jordan pattern and second by the identity pattern is N(2n, .) with
    // parameter infinity, 0, 1 for the pairings (sigma,tau), (tau,sigma),
    // (sigma tau, tau)
    for n in 1..=4u64 {
        let jordan = build_indecomposable(n_label(n, ProjPoint::Infinity), &k);
        // (sigma, tau) pattern is the definition of N(2n, infinity)
        let got = decompose(&jordan, &k).unwrap();
        assert_eq!(got, Decomposition::from_labels(&[(n_label(n, ProjPoint::Infinity), 1)]));
        // (tau, sigma): swap the two generator matrices
        let swapped = KleinModule::new(jordan.t.clone(), jordan.s.clone());
        let got = decompose(&swapped, &k).unwrap();
        assert_eq!(
            got,
            Decomposition::from_labels(&[(n_label(n, ProjPoint::Finite(FieldElement::ZERO)), 1)])
        );
        // (sigma tau, tau): sigma tau acts by the Jordan pattern, tau by the
        // identity; then sigma - 1 = (st - 1) + (t - 1) + (st - 1)(t - 1)
        let st_m1 = &jordan.s;
        let t_m1 = &jordan.t;
        let s_m1 = st_m1.add(t_m1).add(&st_m1.mul(t_m1, &k));
        let third = KleinModule::new(s_m1, t_m1.clone());
        let got = decompose(&third, &k).unwrap();
        assert_eq!(
            got,
            Decomposition::from_labels(&[(n_label(n, ProjPoint::Finite(FieldElement::ONE)), 1)])
        );
    }

    // cohort identities for 20 random parameters and n = 1..4
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0_4007);
    for _ in 0..20 {
        let lambda = if rng.gen_bool(0.15) {
            ProjPoint::Infinity
        } else {
            ProjPoint::Finite(k.elem(rng.gen_range(0..256)))
        };
        for n in 1..=4u64 {
            let m = build_indecomposable(n_label(n, lambda), &k);
            let xi1 = decompose(&m.relabel(&GroupPerm::xi1(), &k), &k).unwrap();
            assert_eq!(
                xi1,
                Decomposition::from_labels(&[(n_label(n, lambda_inv(lambda, &k)), 1)])
            );
            let xi2 = decompose(&m.relabel(&GroupPerm::xi2(), &k), &k).unwrap();
            assert_eq!(
                xi2,
                Decomposition::from_labels(&[(n_label(n, lambda_add_one(lambda, &k)), 1)])
            );
            // the parameters reachable by iterated relabeling are the cohort
            let mut reached = std::collections::BTreeSet::new();
            let mut frontier = vec![m.clone()];
            let mut seen_params = std::collections::BTreeSet::new();
            while let Some(cur) = frontier.pop() {
                let dec = decompose(&cur, &k).unwrap();
                let (label, _) = dec.entries().next().unwrap();
                let IndecLabel::N { lambda: param, .. } = label else { panic!() };
                if seen_params.insert(param) {
                    reached.insert(param);
                    frontier.push(cur.relabel(&GroupPerm::xi1(), &k));
                    frontier.push(cur.relabel(&GroupPerm::xi2(), &k));
                }
            }
            assert_eq!(reached, cohort(lambda, &k));
        }
    }
    println!("criterion 10 PASS: relabeling patterns and cohorts for 20 parameters, n = 1..4");
}
