use std::sync::Arc;

use proptest::prelude::*;
use stablerank::certify::{min_modulus_pl, BernsteinBudget};
use stablerank::instances::{random_pair, torus_triple, unitary_pair};
use stablerank::mesh::SimplicialMesh;
use stablerank::pl::{urysohn_from_levels, PlFunction, PlTuple};
use stablerank::reduce::{
    all_units_reduce, approx_invertible, minimal_invertible_subtuple, norm_one_reduce, small_norm_reduce,
    stabilize_reduce, thresholds, unitary_reduce, verify_witness, ReduceOptions, ReductionKind, ReductionWitness,
};
use stablerank::{Field, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn interval(n: usize) -> Arc<SimplicialMesh> {
    Arc::new(SimplicialMesh::interval(n).unwrap())
}

fn constant(mesh: &Arc<SimplicialMesh>, z: C64) -> PlFunction {
    PlFunction::constant(mesh.clone(), Field::Complex, z).unwrap()
}

/// `x` and `1 - x` on the unit interval.
fn ramp_pair(n: usize) -> (PlTuple, PlFunction) {
    let mesh = interval(n);
    let x = PlFunction::from_fn(mesh.clone(), Field::Complex, |p| c(p[0], 0.0)).unwrap();
    let y = PlFunction::from_fn(mesh, Field::Complex, |p| c(1.0 - p[0], 0.0)).unwrap();
    (PlTuple::single(x), y)
}

fn reduced_min(w: &ReductionWitness) -> f64 {
    w.reduced_certificate().lower_bound
}

fn assert_verifies(w: &ReductionWitness) {
    let v = verify_witness(w, BernsteinBudget::default());
    assert!(v.passed, "{:?}", v.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
}

#[test]
fn approximation_examples() {
    let mesh = interval(16);
    let opts = ReduceOptions::default();
    let h = PlTuple::single(constant(&mesh, c(1.0, 1.0)));
    let a = approx_invertible(&h, 0.1, &opts).unwrap();
    assert_eq!(a.perturbation.max_sup_norm(), 0.0);
    assert_eq!(a.u.component(0).values(), h.component(0).values());

    let centered = PlFunction::from_fn(mesh.clone(), Field::Complex, |p| c(p[0] - 0.5, 0.0)).unwrap();
    let a = approx_invertible(&PlTuple::single(centered.clone()), 0.1, &opts).unwrap();
    assert!(a.perturbation.max_sup_norm() < 0.1);
    assert!(min_modulus_pl(&a.u).1.certifies_positive());

    let real = PlFunction::from_fn(mesh, Field::Real, |p| c(p[0] - 0.5, 0.0)).unwrap();
    let err = approx_invertible(&PlTuple::single(real), 0.01, &opts).unwrap_err();
    assert!(err.is_honest_failure());
}

#[test]
fn small_norm_examples() {
    let mesh = interval(8);
    let f = PlTuple::single(constant(&mesh, c(0.0, 2.0)));
    let w = small_norm_reduce(&f, &constant(&mesh, c(1.0, 0.0)), 0.3, &ReduceOptions::default()).unwrap();
    assert_eq!(w.multiplier.max_sup_norm(), 0.0);

    let (f, g) = ramp_pair(32);
    for eps in [0.1, 1e-6] {
        let w = small_norm_reduce(&f, &g, eps, &ReduceOptions::default().with_seed(7)).unwrap();
        assert_eq!(w.kind, ReductionKind::SmallNorm);
        assert!(w.multiplier.max_sup_norm() <= eps);
        assert!(reduced_min(&w) > 0.0);
        assert_verifies(&w);
    }
}

#[test]
fn norm_one_examples() {
    let mesh = interval(4);
    let w = norm_one_reduce(
        &PlTuple::single(PlFunction::zero(mesh.clone(), Field::Complex)),
        &constant(&mesh, c(1.0, 0.0)),
        &ReduceOptions::default(),
    )
    .unwrap();
    assert!(w.multiplier.component(0).values().iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));
    assert_eq!(w.multiplier.component(0).sup_norm(), 1.0);

    let (f, g) = ramp_pair(32);
    let w = norm_one_reduce(&f, &g, &ReduceOptions::default().with_seed(7)).unwrap();
    assert_eq!(w.params.case.as_deref(), Some("B"));
    assert_eq!(w.multiplier.component(0).sup_norm(), 1.0);
    let peak = w.params.peak_vertex.unwrap();
    assert_eq!(w.multiplier.component(0).value(peak).norm(), 1.0);
    assert_eq!(w.f.mesh().vertices()[peak][0], 1.0);
    assert!(reduced_min(&w) >= w.params.c * 3f64.sqrt() / 4.0 * (1.0 - 1e-6));
    assert_verifies(&w);

    let torus = Arc::new(SimplicialMesh::torus(8).unwrap());
    let (f, g) = torus_triple(&torus, 3).unwrap();
    let w = norm_one_reduce(&f, &g, &ReduceOptions::default().with_seed(3)).unwrap();
    assert_eq!(w.params.case.as_deref(), Some("C"));
    assert!(w.multiplier.components().iter().all(|v| v.sup_norm() == 1.0));
    assert_verifies(&w);
}

#[test]
fn minimal_subtuple_examples() {
    let mesh = interval(8);
    let (x, _) = ramp_pair(8);
    let u = PlTuple::new(vec![constant(&mesh, c(1.0, 0.0)), x.component(0).clone()]).unwrap();
    assert_eq!(minimal_invertible_subtuple(&u).unwrap().indices, vec![0]);

    let (f, g) = ramp_pair(8);
    let both = PlTuple::new(vec![f.component(0).clone(), g]).unwrap();
    let s = minimal_invertible_subtuple(&both).unwrap();
    assert_eq!(s.indices, vec![0, 1]);
    assert!(s.dropped_minima.iter().all(|&m| m <= 1e-12));
}

#[test]
fn minimal_subtuple_is_minimal_on_rectangle() {
    let mesh = Arc::new(SimplicialMesh::rectangle(8).unwrap());
    for seed in 0..10 {
        let (f, g) = random_pair(&mesh, Field::Complex, 2, 600 + seed, true, false).unwrap();
        let u = PlTuple::new(vec![f.component(0).clone(), f.component(1).clone(), g]).unwrap();
        let s = minimal_invertible_subtuple(&u).unwrap();
        let positive = |idx: &[usize]| min_modulus_pl(&u.select(idx).unwrap()).1.certifies_positive();
        assert!(positive(&s.indices));
        for drop in 0..s.indices.len() {
            let rest: Vec<usize> = s.indices.iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, &j)| j).collect();
            assert!(rest.is_empty() || !positive(&rest), "seed {seed}: {rest:?} is still invertible");
        }
    }
}

#[test]
fn all_units_examples() {
    let mesh = interval(8);
    let f = PlTuple::single(constant(&mesh, c(2.0, 0.0)));
    let w = all_units_reduce(&f, &PlFunction::zero(mesh.clone(), Field::Complex), 0.5, &ReduceOptions::default()).unwrap();
    assert!(w.multiplier.component(0).values().iter().all(|&v| v == c(-1.0, 0.0)));

    let (f, g) = ramp_pair(32);
    let w = all_units_reduce(&f, &g, 0.5, &ReduceOptions::default().with_seed(5)).unwrap();
    for u in w.multiplier.components() {
        assert!(min_modulus_pl(&PlTuple::single(u.clone())).0 >= 0.5 - 1e-12);
    }
    assert_verifies(&w);
    assert!(all_units_reduce(&f, &g, 1.0, &ReduceOptions::default()).is_err());
}

#[test]
fn unitary_examples() {
    let mesh = interval(8);
    let a = PlTuple::single(constant(&mesh, c(1.0, 0.0)));
    let w = unitary_reduce(&a, &PlFunction::zero(mesh, Field::Complex), &ReduceOptions::default()).unwrap();
    assert!(w.multiplier.component(0).values().iter().all(|&v| v == c(1.0, 0.0)));

    let (f, g) = ramp_pair(32);
    let w = unitary_reduce(&f, &g, &ReduceOptions::default().with_seed(2)).unwrap();
    assert!(min_modulus_pl(&w.multiplier).1.certifies_positive());
    assert!(reduced_min(&w) > 0.0);
    assert_eq!(w.params.case.as_deref(), Some("w = e"));
    assert_verifies(&w);

    let (a, b) = unitary_pair(&interval(32), 1, 4).unwrap();
    let w = unitary_reduce(&a, &b, &ReduceOptions::default().with_seed(4)).unwrap();
    assert_eq!(w.params.case.as_deref(), Some("bezout"));
    assert!(w.params.delta_prime.unwrap() > 0.0);
    assert!(w.certificates.iter().all(|c| c.certifies_positive()));
    assert_verifies(&w);
}

#[test]
fn stabilize_examples() {
    let mesh = interval(32);
    let (x, g) = ramp_pair(32);
    let f = PlTuple::new(vec![constant(&mesh, c(1.0, 0.0)), x.component(0).clone()]).unwrap();
    let w = stabilize_reduce(&f, &g, 1, &ReduceOptions::default()).unwrap();
    assert_eq!(w.multiplier.component(1).values().iter().filter(|&&v| v != c(1.0, 0.0)).count(), 0);
    assert_verifies(&w);

    let (f, g) = random_pair(&mesh, Field::Complex, 3, 77, false, false).unwrap();
    let w = stabilize_reduce(&f, &g, 1, &ReduceOptions::default().with_seed(77)).unwrap();
    assert_eq!(w.kind, ReductionKind::Stabilize);
    assert!(min_modulus_pl(&w.multiplier).1.certifies_positive());
    assert_verifies(&w);

    let (f, g) = random_pair(&mesh, Field::Complex, 1, 78, false, false).unwrap();
    let same = stabilize_reduce(&f, &g, 1, &ReduceOptions::default()).unwrap();
    let direct = small_norm_reduce(&f, &g, 0.5, &ReduceOptions::default()).unwrap();
    assert_eq!(same.multiplier.component(0).values(), direct.multiplier.component(0).values());
}

#[test]
fn thresholds_are_ordered() {
    for c in [1e-3, 0.2, 1.0, 7.5] {
        for n in 1..6 {
            let (t_w, t_v) = thresholds(c, n);
            assert!(0.0 < t_w && t_w < t_v && t_v < c);
            assert!((c * c - t_v * t_v).sqrt() >= c * 3f64.sqrt() / 2.0 - 1e-15);
        }
    }
}

#[test]
fn reductions_are_deterministic() {
    let mesh = interval(24);
    let (f, g) = random_pair(&mesh, Field::Complex, 2, 11, true, true).unwrap();
    let opts = ReduceOptions::default().with_seed(99);
    let runs = [0, 1].map(|_| {
        let w = norm_one_reduce(&f, &g, &opts).unwrap();
        let s = small_norm_reduce(&f, &g, 0.01, &opts).unwrap();
        (
            serde_json::to_string(&(w.multiplier.components().iter().map(|v| v.values()).collect::<Vec<_>>(), &w.certificates, &w.params)).unwrap(),
            serde_json::to_string(&(s.multiplier.components().iter().map(|v| v.values()).collect::<Vec<_>>(), &s.certificates, &s.params)).unwrap(),
        )
    });
    assert_eq!(runs[0], runs[1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_one_witnesses_hold(seed in 0u64..10_000, n in 1usize..3, zero_in_g in any::<bool>()) {
        let mesh = interval(16);
        let (f, g) = random_pair(&mesh, Field::Complex, n, seed, false, zero_in_g).unwrap();
        let w = norm_one_reduce(&f, &g, &ReduceOptions::default().with_seed(seed)).unwrap();
        for v in w.multiplier.components() {
            prop_assert_eq!(v.sup_norm(), 1.0);
        }
        prop_assert!(verify_witness(&w, BernsteinBudget::default()).passed);
        if w.params.case.as_deref() == Some("B") {
            prop_assert!(reduced_min(&w) >= w.params.c * 3f64.sqrt() / 4.0 * (1.0 - 1e-6));
            let psi = urysohn_from_levels(&w.g, w.params.t_w.unwrap(), w.params.t_v.unwrap()).unwrap();
            let peak = w.params.peak_vertex.unwrap();
            for v in w.multiplier.components() {
                for k in 0..v.values().len() {
                    let p = if k == peak { 1.0 } else { psi.value(k).re };
                    prop_assert!(v.value(k).norm() <= p + 0.5 * (1.0 - p) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn small_norm_budget_is_exact(seed in 0u64..10_000, eps in prop::sample::select(vec![0.5, 0.1, 1e-3, 1e-6])) {
        let mesh = interval(16);
        let (f, g) = random_pair(&mesh, Field::Complex, 1, seed, false, true).unwrap();
        let w = small_norm_reduce(&f, &g, eps, &ReduceOptions::default().with_seed(seed)).unwrap();
        prop_assert!(w.multiplier.max_sup_norm() <= eps);
        prop_assert!(verify_witness(&w, BernsteinBudget::default()).passed);
    }

    #[test]
    fn all_units_multipliers_stay_outside_half_disk(seed in 0u64..10_000) {
        let mesh = interval(16);
        let (f, g) = random_pair(&mesh, Field::Complex, 2, seed, false, true).unwrap();
        let w = all_units_reduce(&f, &g, 0.5, &ReduceOptions::default().with_seed(seed)).unwrap();
        for u in w.multiplier.components() {
            prop_assert!(u.values().iter().all(|v| v.norm() >= 0.5 - 1e-12));
        }
        prop_assert!(verify_witness(&w, BernsteinBudget::default()).passed);
    }
}
