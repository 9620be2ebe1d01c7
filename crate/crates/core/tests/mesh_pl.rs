use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stablerank::instances::smooth_random;
use stablerank::mesh::{MeshPoint, Refinement, ShapeTag, SimplicialMesh};
use stablerank::pl::{bezout_coefficients, blend, normalize, urysohn_from_levels, PlFunction, PlTuple};
use stablerank::{Field, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn euler_characteristic(m: &SimplicialMesh) -> i64 {
    m.num_vertices() as i64 - m.edges().len() as i64 + m.num_simplices() as i64
}

#[test]
fn builder_counts() {
    let i = SimplicialMesh::interval(4).unwrap();
    assert_eq!((i.num_vertices(), i.num_simplices(), i.dimension()), (5, 4, 1));

    let circle = SimplicialMesh::circle(3).unwrap();
    assert_eq!((circle.num_vertices(), circle.num_simplices()), (3, 3));
    for v in 0..3 {
        assert_eq!(circle.simplices().iter().filter(|s| s.contains(&v)).count(), 2);
    }

    let sphere = SimplicialMesh::sphere(1).unwrap();
    assert_eq!((sphere.num_vertices(), sphere.num_simplices()), (42, 80));
    // count edges independently of the mesh's own edge list
    let mut edges = HashSet::new();
    for s in sphere.simplices() {
        for (a, b) in [(s[0], s[1]), (s[1], s[2]), (s[0], s[2])] {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    assert_eq!(42 - edges.len() as i64 + 80, 2);
    assert_eq!(euler_characteristic(&sphere), 2);
    for v in sphere.vertices() {
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((r - 1.0).abs() < 1e-12);
    }

    assert_eq!(euler_characteristic(&SimplicialMesh::torus(6).unwrap()), 0);
    for m in [sphere, SimplicialMesh::torus(5).unwrap(), SimplicialMesh::rectangle(4).unwrap()] {
        assert!(m.is_consistently_oriented());
    }
}

#[test]
fn builder_rejects_bad_input() {
    assert!(SimplicialMesh::interval(0).is_err());
    assert!(SimplicialMesh::build(ShapeTag::Custom, 3).is_err());
    assert!(SimplicialMesh::new(1, vec![vec![0.0], vec![1.0]], vec![vec![0, 0]]).is_err());
    assert!(SimplicialMesh::new(1, vec![vec![0.0], vec![1.0]], vec![vec![0, 2]]).is_err());
    assert!(SimplicialMesh::new(1, vec![vec![0.0], vec![f64::NAN]], vec![vec![0, 1]]).is_err());
    let m = SimplicialMesh::interval(4).unwrap();
    assert!(m.refine(&Refinement::Subset(vec![])).is_err());
}

#[test]
fn single_triangle_refines_into_four_children() {
    let tri = SimplicialMesh::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], vec![vec![0, 1, 2]]).unwrap();
    let (fine, map) = tri.refine(&Refinement::Global).unwrap();
    assert_eq!(fine.num_simplices(), 4);
    assert!(map.children().iter().all(|ch| ch.parent == 0));
    let area = |m: &SimplicialMesh, s: &[usize]| {
        let (a, b, c) = (&m.vertices()[s[0]], &m.vertices()[s[1]], &m.vertices()[s[2]]);
        ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs() / 2.0
    };
    let total: f64 = fine.simplices().iter().map(|s| area(&fine, s)).sum();
    assert!((total - 0.5).abs() < 1e-15);
}

#[test]
fn interval_refinement_matches_finer_builder() {
    let coarse = Arc::new(SimplicialMesh::interval(4).unwrap());
    let (fine, map) = coarse.refine(&Refinement::Global).unwrap();
    assert_eq!(fine.num_simplices(), 8);
    let f = smooth_random(&coarse, Field::Complex, 3, "t");
    let g = f.transfer(&map);
    for k in 0..=100 {
        let x = k as f64 / 100.0;
        let at = |m: &SimplicialMesh, h: &PlFunction| {
            let s = m
                .simplices()
                .iter()
                .position(|s| {
                    let (a, b) = (m.vertices()[s[0]][0], m.vertices()[s[1]][0]);
                    a.min(b) <= x && x <= a.max(b)
                })
                .unwrap();
            let (a, b) = (m.vertices()[m.simplices()[s][0]][0], m.vertices()[m.simplices()[s][1]][0]);
            let t = (x - a) / (b - a);
            h.eval(&MeshPoint { simplex: s, bary: vec![1.0 - t, t] })
        };
        assert!((at(&coarse, &f) - at(&fine, &g)).norm() < 1e-14);
    }
}

#[test]
fn sup_norm_examples() {
    let m = Arc::new(SimplicialMesh::interval(2).unwrap());
    let f = PlFunction::new(m.clone(), Field::Complex, vec![c(0.0, 0.0), c(0.0, 1.0), c(-2.0, 0.0)]).unwrap();
    assert_eq!(f.sup_norm(), 2.0);
    assert_eq!(PlFunction::constant(m, Field::Real, c(1.0, 0.0)).unwrap().sup_norm(), 1.0);
}

#[test]
fn pointwise_identities() {
    let mesh = Arc::new(SimplicialMesh::rectangle(4).unwrap());
    let f1 = smooth_random(&mesh, Field::Complex, 1, "a");
    let f2 = smooth_random(&mesh, Field::Complex, 2, "a");
    let g = smooth_random(&mesh, Field::Complex, 3, "a");
    let f = PlTuple::new(vec![f1, f2]).unwrap();
    let (x, y) = bezout_coefficients(&f, &g).unwrap();
    for v in 0..mesh.num_vertices() {
        let s = (0..2).map(|j| x.component(j).value(v) * f.component(j).value(v)).sum::<C64>() + y.value(v) * g.value(v);
        assert!((s - 1.0).norm() < 1e-14);
    }

    let unimodular: Vec<C64> = (0..mesh.num_vertices()).map(|k| C64::from_polar(1.0, k as f64)).collect();
    let u = PlTuple::single(PlFunction::new(mesh.clone(), Field::Complex, unimodular.clone()).unwrap());
    let nu = normalize(&u).unwrap();
    for (a, b) in nu.component(0).values().iter().zip(&unimodular) {
        assert!((a - b).norm() < 1e-15);
    }
}

#[test]
fn urysohn_examples() {
    let mesh = Arc::new(SimplicialMesh::interval(10).unwrap());
    let zero = PlFunction::zero(mesh.clone(), Field::Real);
    assert!(urysohn_from_levels(&zero, 0.2, 0.4).unwrap().values().iter().all(|v| *v == c(1.0, 0.0)));
    let one = PlFunction::constant(mesh.clone(), Field::Real, c(1.0, 0.0)).unwrap();
    assert!(urysohn_from_levels(&one, 0.25, 0.5).unwrap().values().iter().all(|v| *v == c(0.0, 0.0)));

    let x = PlFunction::from_fn(mesh.clone(), Field::Real, |p| c(p[0], 0.0)).unwrap();
    let psi = urysohn_from_levels(&x, 0.2, 0.4).unwrap();
    let order: Vec<usize> = {
        let mut idx: Vec<usize> = (0..mesh.num_vertices()).collect();
        idx.sort_by(|&a, &b| mesh.vertices()[a][0].total_cmp(&mesh.vertices()[b][0]));
        idx
    };
    assert_eq!(psi.value(order[0]).re, 1.0);
    assert_eq!(psi.value(*order.last().unwrap()).re, 0.0);
    assert!(order.windows(2).all(|w| psi.value(w[0]).re >= psi.value(w[1]).re));

    assert!(urysohn_from_levels(&x, 0.4, 0.2).is_err());
    assert!(urysohn_from_levels(&x, 0.0, 0.2).is_err());
}

/// Largest gap between the vertex-wise map of an affine function and the
/// exact composite, sampled on each simplex.
fn composite_error(mesh: &Arc<SimplicialMesh>, seed: u64) -> f64 {
    let lin = |p: &[f64]| c(p[0] - 0.37, p[1] - 0.61);
    let exact = |z: C64| z / (1.0 + z.norm());
    let h = PlFunction::from_fn(mesh.clone(), Field::Complex, lin).unwrap();
    let out = PlFunction::new(mesh.clone(), Field::Complex, h.values().iter().map(|&z| exact(z)).collect()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..1000)
        .map(|_| {
            let p = mesh.sample_point(&mut rng);
            let xy = mesh.point_coords(&p);
            (out.eval(&p) - exact(lin(&xy))).norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn nonlinear_maps_converge_under_refinement() {
    let mut mesh = Arc::new(SimplicialMesh::rectangle(3).unwrap());
    let mut errs = vec![composite_error(&mesh, 1)];
    for _ in 0..3 {
        mesh = mesh.refine(&Refinement::Global).unwrap().0;
        errs.push(composite_error(&mesh, 1));
    }
    assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{errs:?}");
    assert!(errs[3] < errs[0] / 8.0, "{errs:?}");
}

#[test]
fn affine_maps_commute_with_interpolation() {
    let mesh = Arc::new(SimplicialMesh::torus(4).unwrap());
    let f = smooth_random(&mesh, Field::Complex, 9, "t");
    let a = c(0.3, -1.1);
    let b = c(2.0, 0.5);
    let mapped = PlFunction::new(mesh.clone(), Field::Complex, f.values().iter().map(|&z| a * z + b).collect()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let p = mesh.sample_point(&mut rng);
        assert!((mapped.eval(&p) - (a * f.eval(&p) + b)).norm() < 1e-13);
    }
}

fn mesh_strategy() -> impl Strategy<Value = SimplicialMesh> {
    prop_oneof![
        (1usize..12).prop_map(|n| SimplicialMesh::interval(n).unwrap()),
        (3usize..12).prop_map(|n| SimplicialMesh::circle(n).unwrap()),
        (1usize..5).prop_map(|n| SimplicialMesh::rectangle(n).unwrap()),
        (3usize..5).prop_map(|n| SimplicialMesh::torus(n).unwrap()),
        Just(SimplicialMesh::sphere(1).unwrap()),
    ]
}

fn function_on(mesh: SimplicialMesh, seed: u64) -> PlFunction {
    let mesh = Arc::new(mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..mesh.num_vertices()).map(|_| c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))).collect();
    PlFunction::new(mesh, Field::Complex, vals).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sup_norm_dominates_samples_and_is_attained(mesh in mesh_strategy(), seed in any::<u64>()) {
        let f = function_on(mesh, seed);
        let sup = f.sup_norm();
        prop_assert!(f.values().iter().any(|v| v.norm() == sup));
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        for _ in 0..10_000 {
            let p = f.mesh().sample_point(&mut rng);
            prop_assert!(f.eval(&p).norm() <= sup * (1.0 + 1e-15));
        }
    }

    #[test]
    fn transfer_preserves_values(mesh in mesh_strategy(), seed in any::<u64>(), subset in any::<bool>()) {
        let f = function_on(mesh, seed);
        let strategy = if subset {
            Refinement::Subset((0..f.mesh().num_simplices()).step_by(2).collect())
        } else {
            Refinement::Global
        };
        let (_, map) = f.mesh().refine(&strategy).unwrap();
        let g = f.transfer(&map);
        prop_assert_eq!(g.sup_norm(), f.sup_norm());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        for _ in 0..1000 {
            let p = f.mesh().sample_point(&mut rng);
            let q = map.locate(&p);
            let (a, b) = (f.eval(&p), g.eval(&q));
            prop_assert!((a - b).norm() <= 4.0 * f64::EPSILON * a.norm().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn refinement_partitions_parents(mesh in mesh_strategy()) {
        let (fine, map) = mesh.refine(&Refinement::Global).unwrap();
        let mut per_parent = vec![0usize; mesh.num_simplices()];
        for ch in map.children() {
            per_parent[ch.parent] += 1;
        }
        let expected = 1usize << mesh.dimension();
        prop_assert!(per_parent.iter().all(|&k| k == expected));
        prop_assert_eq!(fine.num_simplices(), expected * mesh.num_simplices());
    }

    #[test]
    fn blend_stays_in_unit_ball(psi in proptest::collection::vec(0.0f64..=1.0, 9),
                                y in proptest::collection::vec((0.0f64..=0.5, 0.0f64..std::f64::consts::TAU), 9)) {
        let mesh = Arc::new(SimplicialMesh::interval(8).unwrap());
        let psi = PlFunction::new(mesh.clone(), Field::Complex, psi.iter().map(|&p| c(p, 0.0)).collect()).unwrap();
        let y = PlFunction::new(mesh, Field::Complex, y.iter().map(|&(r, t)| C64::from_polar(r, t)).collect()).unwrap();
        let v = blend(&psi, &PlTuple::single(y)).unwrap();
        for k in 0..9 {
            let p = psi.value(k).re;
            prop_assert!(v.component(0).value(k).norm() <= p + 0.5 * (1.0 - p) + 1e-15);
        }
        prop_assert!(v.component(0).sup_norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn urysohn_output_is_bounded(mesh in mesh_strategy(), seed in any::<u64>(), t in 0.01f64..2.0) {
        let g = function_on(mesh, seed);
        let psi = urysohn_from_levels(&g, t, 2.0 * t).unwrap();
        prop_assert!(psi.values().iter().all(|v| (0.0..=1.0).contains(&v.re) && v.im == 0.0));
        prop_assert!(psi.sup_norm() <= 1.0);
    }
}
