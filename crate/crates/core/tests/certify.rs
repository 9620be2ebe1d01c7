use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stablerank::certify::{
    bernstein_rounds, certify_min_modulus_expr, certify_positive, check_invertible, max_duality_gap, min_modulus_pl,
    BernsteinBudget, CertKind, TupleExpr,
};
use stablerank::instances::smooth_random;
use stablerank::mesh::{MeshPoint, SimplicialMesh};
use stablerank::pl::{PlFunction, PlTuple};
use stablerank::{Field, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn segment(a: C64, b: C64) -> PlTuple {
    let mesh = Arc::new(SimplicialMesh::interval(1).unwrap());
    PlTuple::single(PlFunction::new(mesh, Field::Complex, vec![a, b]).unwrap())
}

/// Dense sampling along every edge of every simplex, where minima of the
/// piecewise magnitude often sit on a kink.
fn edge_sampled_min(expr: &TupleExpr, per_edge: usize) -> f64 {
    let mut m = f64::INFINITY;
    for (s, verts) in expr.mesh().simplices().iter().enumerate() {
        let k = verts.len();
        for a in 0..k {
            for b in a + 1..k {
                for i in 0..=per_edge {
                    let t = i as f64 / per_edge as f64;
                    let mut bary = vec![0.0; k];
                    bary[a] = 1.0 - t;
                    bary[b] = t;
                    m = m.min(expr.magnitude_at(&MeshPoint { simplex: s, bary }));
                }
            }
        }
    }
    m
}

fn sampled_min(expr: &TupleExpr, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| expr.magnitude_at(&expr.mesh().sample_point(&mut rng)))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn exact_minimum_examples() {
    let mesh = Arc::new(SimplicialMesh::interval(3).unwrap());
    let constant = PlTuple::new(vec![
        PlFunction::constant(mesh.clone(), Field::Complex, c(1.0, 0.0)).unwrap(),
        PlFunction::constant(mesh, Field::Complex, c(0.0, 1.0)).unwrap(),
    ])
    .unwrap();
    let (m, cert) = min_modulus_pl(&constant);
    assert!((m - 2f64.sqrt()).abs() < 1e-14);
    assert_eq!(cert.kind, CertKind::ExactMin);

    assert_eq!(min_modulus_pl(&segment(c(1.0, 0.0), c(-1.0, 0.0))).0, 0.0);

    // distance from the origin to the chord [1, i], by the point-to-line formula
    let (a, b) = ((1.0, 0.0), (0.0, 1.0));
    let cross: f64 = a.0 * b.1 - a.1 * b.0;
    let chord = cross.abs() / ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
    assert!((min_modulus_pl(&segment(c(1.0, 0.0), c(0.0, 1.0))).0 - chord).abs() < 1e-14);
}

#[test]
fn bernstein_examples() {
    let mesh = Arc::new(SimplicialMesh::interval(4).unwrap());
    let one = TupleExpr::constant(mesh.clone(), Field::Complex, &[c(1.0, 0.0)]);
    let cert = certify_min_modulus_expr(&one, 0.5, BernsteinBudget::default()).unwrap();
    assert!(cert.lower_bound >= 0.5 && cert.value >= 1.0 - 1e-12);
    assert!(cert.trace.iter().all(|s| s.pieces == 1));

    let f = PlTuple::single(smooth_random(&mesh, Field::Complex, 4, "f"));
    let zero = PlTuple::single(PlFunction::zero(mesh.clone(), Field::Complex));
    let g = smooth_random(&mesh, Field::Complex, 5, "g");
    let expr = TupleExpr::reduced(&f, &zero, &g).unwrap();
    let exact = min_modulus_pl(&f).0;
    let bern = certify_positive(&expr, BernsteinBudget::default());
    assert!((bern.value - exact).abs() < 1e-9, "{} vs {exact}", bern.value);

    let unit = Arc::new(SimplicialMesh::interval(1).unwrap());
    let x = PlFunction::from_fn(unit.clone(), Field::Real, |p| c(p[0], 0.0)).unwrap();
    let one_minus_x = PlFunction::from_fn(unit, Field::Real, |p| c(1.0 - p[0], 0.0)).unwrap();
    let parabola = TupleExpr::product(&x, &one_minus_x, c(1.0, 0.0)).unwrap();
    let fail = certify_min_modulus_expr(&parabola, 0.3, BernsteinBudget::default()).unwrap_err();
    assert_eq!(fail.simplices(), vec![0]);
    assert!(fail.observed_min() < 0.3);
}

#[test]
fn check_invertible_examples() {
    let mesh = Arc::new(SimplicialMesh::interval(2).unwrap());
    let pair = PlTuple::new(vec![
        PlFunction::constant(mesh.clone(), Field::Complex, c(1.0, 0.0)).unwrap(),
        PlFunction::zero(mesh, Field::Complex),
    ])
    .unwrap();
    let (ok, cert) = check_invertible(&pair);
    assert!(ok);
    assert!((cert.value - 1.0).abs() < 1e-14);

    let crossing = segment(c(-1.0, 0.0), c(1.0, 0.0));
    assert!(!check_invertible(&crossing).0);
}

#[test]
fn torus_pairs_agree_with_dense_sampling() {
    let mesh = Arc::new(SimplicialMesh::torus(8).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for k in 0..100 {
        let t = PlTuple::new(vec![
            smooth_random(&mesh, Field::Complex, 2 * k, "pair"),
            smooth_random(&mesh, Field::Complex, 2 * k + 1, "pair"),
        ])
        .unwrap();
        let (ok, cert) = check_invertible(&t);
        let sampled = (0..100_000)
            .map(|_| t.magnitude_at(&mesh.sample_point(&mut rng)))
            .fold(f64::INFINITY, f64::min);
        assert!(cert.value <= sampled + 1e-12);
        if sampled > 1e-3 {
            assert!(ok, "pair {k}: sampled min {sampled}, certificate {}", cert.value);
        }
    }
}

#[test]
fn duality_gap_is_tiny() {
    for (k, mesh) in [SimplicialMesh::interval(16), SimplicialMesh::torus(6), SimplicialMesh::sphere(1)]
        .into_iter()
        .enumerate()
    {
        let mesh = Arc::new(mesh.unwrap());
        for seed in 0..10 {
            let t = PlTuple::new(vec![
                smooth_random(&mesh, Field::Complex, seed, &format!("gap{k}")),
                smooth_random(&mesh, Field::Complex, seed + 100, &format!("gap{k}")),
            ])
            .unwrap();
            assert!(max_duality_gap(&t) <= 1e-10);
        }
    }
}

#[test]
fn bernstein_rounds_converge() {
    let mesh = Arc::new(SimplicialMesh::rectangle(3).unwrap());
    for seed in 0..10 {
        // pairs: a complex scalar on a surface generically has zeros
        let pair = |s: &str| {
            PlTuple::new(vec![
                smooth_random(&mesh, Field::Complex, seed, &format!("{s}0")),
                smooth_random(&mesh, Field::Complex, seed, &format!("{s}1")),
            ])
            .unwrap()
        };
        let (f, v) = (pair("round-f"), pair("round-v"));
        let g = smooth_random(&mesh, Field::Complex, seed, "round-g");
        let expr = TupleExpr::reduced(&f, &v, &g).unwrap();
        let rounds = bernstein_rounds(&expr, 8);
        assert!(rounds.windows(2).all(|w| w[1] >= w[0] - 1e-15), "{rounds:?}");
        let sampled = sampled_min(&expr, 100_000, seed).min(edge_sampled_min(&expr, 2000));
        assert!(*rounds.last().unwrap() <= sampled);
        assert!(sampled - rounds.last().unwrap() < 1e-3, "{rounds:?} vs {sampled}");
    }
}

fn expr_strategy() -> impl Strategy<Value = (TupleExpr, u64)> {
    (any::<u64>(), 1usize..3, prop::bool::ANY).prop_map(|(seed, n, flat)| {
        let mesh = Arc::new(if flat { SimplicialMesh::interval(6) } else { SimplicialMesh::rectangle(2) }.unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut random = |scale: f64| {
            let vals = (0..mesh.num_vertices())
                .map(|_| c(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
                .collect();
            PlFunction::new(mesh.clone(), Field::Complex, vals).unwrap()
        };
        let f = PlTuple::new((0..n).map(|_| random(1.0)).collect()).unwrap();
        let v = PlTuple::new((0..n).map(|_| random(1.0)).collect()).unwrap();
        let g = random(1.0);
        (TupleExpr::reduced(&f, &v, &g).unwrap(), seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bernstein_bound_is_sound((expr, seed) in expr_strategy()) {
        let cert = certify_positive(&expr, BernsteinBudget::default());
        prop_assert!(cert.value <= sampled_min(&expr, 20_000, seed) + 1e-12);
    }

    #[test]
    fn exact_minimum_is_below_samples(seed in any::<u64>(), n in 1usize..4) {
        let mesh = Arc::new(SimplicialMesh::rectangle(3).unwrap());
        let t = PlTuple::new((0..n).map(|j| smooth_random(&mesh, Field::Complex, seed, &format!("c{j}"))).collect()).unwrap();
        let (m, _) = min_modulus_pl(&t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sampled = f64::INFINITY;
        for _ in 0..5000 {
            let s = t.magnitude_at(&mesh.sample_point(&mut rng));
            prop_assert!(m <= s + 1e-12);
            sampled = sampled.min(s);
        }
        // the sampling gap on this mesh is far below 0.1
        prop_assert!(sampled - m < 0.1);
    }

    #[test]
    fn certificate_does_not_depend_on_thread_count(seed in 0u64..1000) {
        let mesh = Arc::new(SimplicialMesh::torus(6).unwrap());
        let f = PlTuple::single(smooth_random(&mesh, Field::Complex, seed, "thr-f"));
        let v = PlTuple::single(smooth_random(&mesh, Field::Complex, seed, "thr-v"));
        let g = smooth_random(&mesh, Field::Complex, seed, "thr-g");
        let expr = TupleExpr::reduced(&f, &v, &g).unwrap();
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = single.install(|| certify_positive(&expr, BernsteinBudget::default()));
        let b = many.install(|| certify_positive(&expr, BernsteinBudget::default()));
        prop_assert_eq!(a, b);
    }
}
