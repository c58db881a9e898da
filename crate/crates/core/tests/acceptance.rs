//! One pass/fail line per acceptance criterion; exits nonzero if any line fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wonder_core::algebra::{pd_of, Element, GradedAlgebra, GradedMap};
use wonder_core::blowup::{
    blow_up, blowup_propagation, bundle_propagation, expected_blowup_dims, projective_bundle,
};
use wonder_core::diagram::{BurrowDiagram, ChernPolynomial};
use wonder_core::duality::{block_structure_check, discrepancy_table, pd_equivalence_report};
use wonder_core::engine::{build_ring, EngineOptions, DEFAULT_MAX_REWRITES};
use wonder_core::linalg::int;
use wonder_core::models::{
    broken_burrow_fixture, fm_power, keel_model, p2_point_fixture, random_blowup_instance, random_bundle_instance,
    synthetic_diagram, DiagonalFlag, Fiber,
};
use wonder_core::nest::li_decomposition;
use wonder_core::oracle::{compare_with_oracle, fm_p1_three_script, keel_three_script, keel_two_script, run};
use wonder_core::presentation::presentation_report;

fn opts() -> EngineOptions {
    EngineOptions::default()
}

fn within(start: Instant, limit: Duration) {
    let t = start.elapsed();
    assert!(t < limit, "took {t:?}, limit {limit:?}");
}

fn all_fixtures() -> Vec<(String, BurrowDiagram)> {
    let mut out = vec![
        ("fm-p1-3".to_string(), fm_power(Fiber::P1, 3, DiagonalFlag::AtLeastTwo).unwrap()),
        ("fm-p1-4".into(), fm_power(Fiber::P1, 4, DiagonalFlag::AtLeastTwo).unwrap()),
        ("fm-p1-4-min3".into(), fm_power(Fiber::P1, 4, DiagonalFlag::AtLeastThree).unwrap()),
        ("fm-p2-3".into(), fm_power(Fiber::P2, 3, DiagonalFlag::AtLeastTwo).unwrap()),
        ("fm-curve-3".into(), fm_power(Fiber::Curve, 3, DiagonalFlag::AtLeastTwo).unwrap()),
        ("keel-1".into(), keel_model(1).unwrap()),
        ("keel-2".into(), keel_model(2).unwrap()),
        ("keel-3".into(), keel_model(3).unwrap()),
        ("point".into(), p2_point_fixture()),
        ("broken-1".into(), broken_burrow_fixture(1).unwrap()),
        ("broken-2".into(), broken_burrow_fixture(2).unwrap()),
    ];
    for (i, brk) in [None, Some(1), Some(2)].into_iter().enumerate() {
        out.push((format!("synth-{i}"), synthetic_diagram(&[1, 3, 3, 1], brk, 11 + i as u64).unwrap()));
    }
    out
}

fn criterion_1() {
    let start = Instant::now();
    let y = GradedAlgebra::truncated_polynomial("h", 2);
    let z = GradedAlgebra::trivial();
    let pull = GradedMap::from_images(&y, &z, 0, &[Element::basis(0), Element::zero(), Element::zero()]).unwrap();
    let push = GradedMap::from_images(&z, &y, 2, &[Element::basis(2)]).unwrap();
    let chern = ChernPolynomial::new(vec![Element::zero(), Element::basis(2)]);
    let r = blow_up(&y, &z, &pull, &push, &chern).unwrap();
    assert_eq!(r.algebra.dims(), vec![1, 2, 1]);
    let e = r.exceptional.clone().unwrap();
    let pt = r.ambient_embedding.apply(&Element::basis(2));
    assert_eq!(r.algebra.multiply(&e, &e).unwrap(), pt.scaled(&int(-1)));
    assert!(pd_of(&r.algebra, 2).unwrap().is_pd);
    // the same space through the engine
    let ring = build_ring(&p2_point_fixture(), opts()).unwrap();
    let e = ring.exceptional(0).unwrap();
    let pt = ring.ambient_class(&Element::basis(2)).unwrap();
    assert_eq!(ring.multiply(&e, &e).unwrap(), pt.scaled(&int(-1)));
    within(start, Duration::from_secs(1));
}

fn criterion_2() {
    let start = Instant::now();
    for seed in 0..50 {
        let inst = random_blowup_instance(1000 + seed, seed % 3 == 0).unwrap();
        let r = blow_up(&inst.y, &inst.z, &inst.pullback, &inst.pushforward, &inst.chern).unwrap();
        let c = inst.chern.degree();
        assert_eq!(r.algebra.dims(), expected_blowup_dims(&inst.y.dims(), &inst.z.dims(), c), "seed {seed}");
    }
    within(start, Duration::from_secs(10));
}

fn criterion_3() {
    for broken in [false, true] {
        for seed in 0..50 {
            let inst = random_blowup_instance(2000 + seed, broken).unwrap();
            let r = blow_up(&inst.y, &inst.z, &inst.pullback, &inst.pushforward, &inst.chern).unwrap();
            let rep = blowup_propagation(&inst.y, &inst.z, &inst.pushforward, &r, inst.socle_degree);
            assert!(rep.hypothesis_failures.is_empty(), "seed {seed}: {:?}", rep.hypothesis_failures);
            assert!(rep.equivalence_holds, "blow-up seed {seed} broken {broken}");
            assert_eq!(rep.output_pd, !broken, "seed {seed}");

            let (z, d, chern) = random_bundle_instance(3000 + seed, broken).unwrap();
            let bundle = projective_bundle(&z, &chern).unwrap();
            let rep = bundle_propagation(&z, &bundle, chern.len(), d);
            assert!(rep.hypothesis_failures.is_empty(), "seed {seed}: {:?}", rep.hypothesis_failures);
            assert!(rep.equivalence_holds, "bundle seed {seed} broken {broken}");
            assert_eq!(rep.output_pd, !broken, "seed {seed}");
        }
    }
}

fn criterion_4() {
    let start = Instant::now();
    let d3 = fm_power(Fiber::P1, 3, DiagonalFlag::AtLeastTwo).unwrap();
    let expected = vec![1, 4, 4, 1];
    assert_eq!(li_decomposition(&d3).poincare, expected);
    let ring = build_ring(&d3, opts()).unwrap();
    assert_eq!(ring.dims(), expected);
    let oracle = run(&fm_p1_three_script().unwrap()).unwrap();
    assert_eq!(oracle.dims(), expected);
    assert!(compare_with_oracle(&ring, &oracle).unwrap().agrees());
    let d4 = fm_power(Fiber::P1, 4, DiagonalFlag::AtLeastTwo).unwrap();
    assert_eq!(build_ring(&d4, opts()).unwrap().dims(), li_decomposition(&d4).poincare);
    within(start, Duration::from_secs(30));
}

fn criterion_5() {
    let start = Instant::now();
    let k2 = build_ring(&keel_model(2).unwrap(), opts()).unwrap();
    assert_eq!(k2.dims(), vec![1, 5, 1]);
    assert!(pd_of(k2.algebra(), 2).unwrap().is_pd);
    let o2 = run(&keel_two_script().unwrap()).unwrap();
    assert!(compare_with_oracle(&k2, &o2).unwrap().agrees());
    let k3 = build_ring(&keel_model(3).unwrap(), opts()).unwrap();
    assert_eq!(k3.dims(), vec![1, 16, 16, 1]);
    assert!(pd_of(k3.algebra(), 3).unwrap().is_pd);
    let o3 = run(&keel_three_script().unwrap()).unwrap();
    assert_eq!(o3.dims(), vec![1, 16, 16, 1]);
    let cmp = compare_with_oracle(&k3, &o3).unwrap();
    assert!(cmp.agrees(), "{}", cmp.summary());
    within(start, Duration::from_secs(120));
}

fn criterion_6() {
    for fiber in [Fiber::P1, Fiber::Curve] {
        let d = fm_power(fiber, 3, DiagonalFlag::AtLeastTwo).unwrap();
        let ring = build_ring(&d, opts()).unwrap();
        let rep = presentation_report(&ring).unwrap();
        assert!(rep.all_vanish(), "{fiber:?}: {}", rep.render());
        for family in &rep.families {
            assert!(family.instances > 0, "{fiber:?}: empty family {}", family.name);
        }
    }
}

fn criterion_7() {
    for (name, d) in all_fixtures() {
        let ring = build_ring(&d, opts()).unwrap().to_ring_data();
        let blocks = block_structure_check(&ring);
        assert!(blocks.certified(), "{name}: {}", blocks.render(&ring));
        let table = discrepancy_table(&ring);
        assert!(table.sums_match, "{name}: {}", table.render(&ring));
        let eq = pd_equivalence_report(&d, &ring);
        assert!(eq.holds, "{name}: {}", eq.render());
        if name == "broken-1" {
            assert!(!eq.ring_pd);
            assert_eq!(eq.failing_burrows, vec!["Z1".to_string()]);
            assert_eq!(table.ring, vec![0, 0, 2, 0, 0]);
        }
    }
}

fn criterion_8() {
    for fiber in [Fiber::P1, Fiber::Curve] {
        for n in [3, 4] {
            let a = fm_power(fiber, n, DiagonalFlag::AtLeastTwo).unwrap();
            let b = fm_power(fiber, n, DiagonalFlag::AtLeastThree).unwrap();
            let (ra, rb) = (build_ring(&a, opts()).unwrap(), build_ring(&b, opts()).unwrap());
            assert_eq!(ra.dims(), rb.dims(), "{fiber:?} n={n}");
            let pa = pd_of(ra.algebra(), a.socle_degree).unwrap();
            let pb = pd_of(rb.algebra(), b.socle_degree).unwrap();
            assert_eq!(pa, pb, "{fiber:?} n={n}");
        }
    }
}

fn criterion_9() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checks = 0;
    for (name, d) in all_fixtures() {
        let ring = build_ring(&d, opts()).unwrap();
        let n = ring.basis_len();
        for _ in 0..200 {
            let (p, q) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let (_, stats) = ring
                .basis_product(p, q, DEFAULT_MAX_REWRITES)
                .unwrap_or_else(|e| panic!("{name}: product {p}*{q}: {e}"));
            assert!(stats.max_rewrites_per_product < DEFAULT_MAX_REWRITES, "{name}");
            checks += stats.measure_checks;
        }
        assert!(ring.stats().max_rewrites_per_product < DEFAULT_MAX_REWRITES, "{name}");
    }
    assert!(checks > 0, "no rewrite was exercised");
}

fn main() {
    let criteria: [(&str, fn()); 9] = [
        ("blow-up of a point in the plane", criterion_1),
        ("dimension formula on 50 random blow-ups", criterion_2),
        ("duality propagation on 100 random blow-ups and bundles", criterion_3),
        ("FM (P1)^3 and (P1)^4 dimensions across methods", criterion_4),
        ("Keel models n = 2, 3 against iterated blow-ups", criterion_5),
        ("presentation relations vanish", criterion_6),
        ("block structure and discrepancy accounting", criterion_7),
        ("diagonals of size >= 2 versus >= 3", criterion_8),
        ("termination measure on random products", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f));
        let status = if result.is_ok() { "PASS" } else { "FAIL" };
        println!("criterion {}: {status} {name} ({:.2?})", i + 1, start.elapsed());
        if result.is_err() {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
