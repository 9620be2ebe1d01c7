use std::f64::consts::TAU;

use proptest::prelude::*;
use stablerank::disk::{
    disk_check_invertible, disk_norm_one_reduce, disk_small_norm_witness, disk_sup_norm, mobius, mobius_param,
    peak_function, verify_disk_witness, DiskBudget, DiskElement, DiskOptions, DiskReductionWitness, DiskTuple, Poly,
    Verdict,
};
use stablerank::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn poly(coeffs: &[(f64, f64)]) -> DiskElement {
    DiskElement::polynomial(Poly::new(coeffs.iter().map(|&(re, im)| c(re, im)).collect()))
}

fn circle(k: usize, n: usize) -> C64 {
    C64::from_polar(1.0, TAU * k as f64 / n as f64)
}

/// `f = (z, 1 - 2z)`, `g = (z - 1)/2`.
fn main_instance() -> (DiskTuple, DiskElement) {
    let f = DiskTuple::new(vec![poly(&[(0.0, 0.0), (1.0, 0.0)]), poly(&[(1.0, 0.0), (-2.0, 0.0)])]).unwrap();
    (f, poly(&[(-0.5, 0.0), (0.5, 0.0)]))
}

/// Pointwise check of `|v_j| <= (|1 + p|^2 + |1 - p|^2)/4 <= 1` with
/// `p = L_a(Phi)` at boundary samples.
fn blend_bound_holds(w: &DiskReductionWitness, samples: usize) -> bool {
    let phi = peak_function(w.params.x1, w.params.m).unwrap();
    (0..samples).all(|k| {
        let z = circle(k, samples);
        let p = mobius(w.params.a, phi.eval(z));
        let bound = ((1.0 + p).norm_sqr() + (1.0 - p).norm_sqr()) / 4.0;
        bound <= 1.0 + 1e-12 && w.multiplier.components().iter().all(|v| v.eval(z).norm() <= bound + 1e-9)
    })
}

#[test]
fn arithmetic_examples() {
    let z = DiskElement::z();
    let sq = z.mul(&z);
    assert_eq!(sq.numerator().coeffs(), &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    assert_eq!(sq.denominator().coeffs(), &[c(1.0, 0.0)]);

    let l = z.compose_mobius(0.5).unwrap();
    assert!(l.denom_certificate() >= 0.5 - 1e-12);
    assert!(l.denom_certificate() <= 0.5);
    for k in 0..64 {
        let w = circle(k, 64) * 0.7;
        assert!((l.eval(w) - (w - 0.5) / (1.0 - 0.5 * w)).norm() < 1e-14);
    }

    let q = z.shift(c(1.0, 0.0)).scale(c(0.5, 0.0));
    let h = q.shift(c(1.0, 0.0)).scale(c(0.5, 0.0));
    assert!(h.is_polynomial());
    assert!((h.eval(c(1.0, 0.0)) - 1.0).norm() < 1e-15);

    assert!(DiskElement::rational(Poly::one(), Poly::new(vec![c(0.0, 0.0), c(1.0, 0.0)])).is_err());
    assert!(z.compose_mobius(1.0).is_err());
    assert!(z.scale(c(2.0, 0.0)).compose_mobius(0.6).is_err());
}

#[test]
fn sup_norm_examples() {
    let b = DiskBudget::default();
    let (hi, lo) = disk_sup_norm(&DiskElement::constant(c(1.0, 0.0)), &b);
    assert!((hi - 1.0).abs() < 1e-12 && (lo - 1.0).abs() < 1e-12);

    let z7 = DiskElement::z().pow(7);
    let (hi, lo) = disk_sup_norm(&z7, &b);
    assert!((hi - 1.0).abs() < 1e-6 && (lo - 1.0).abs() < 1e-6);

    let half = poly(&[(0.5, 0.0), (0.5, 0.0)]);
    let (hi, lo) = disk_sup_norm(&half, &b);
    assert!((hi - 1.0).abs() < 1e-6 && (lo - 1.0).abs() < 1e-6 && lo <= hi);
    // |1 + e^{it}|/2 = |cos(t/2)|
    for k in 0..100 {
        let t = TAU * k as f64 / 100.0;
        assert!((half.eval(C64::from_polar(1.0, t)).norm() - (t / 2.0).cos().abs()).abs() < 1e-14);
    }
}

#[test]
fn invertibility_examples() {
    let b = DiskBudget::default();
    let single = |e: DiskElement| disk_check_invertible(&DiskTuple::single(e), &b).verdict;
    assert_eq!(single(DiskElement::z()), Verdict::NotInvertible);
    assert_eq!(single(poly(&[(-2.0, 0.0), (1.0, 0.0)])), Verdict::Invertible);

    let (f, _) = main_instance();
    let check = disk_check_invertible(&f, &b);
    assert!(check.is_invertible());
    // grid oracle for min sqrt(|z|^2 + |1 - 2z|^2) over the closed disk
    let mut grid = f64::INFINITY;
    for i in 0..=400 {
        for j in 0..=400 {
            let z = c(-1.0 + i as f64 / 200.0, -1.0 + j as f64 / 200.0);
            if z.norm() <= 1.0 {
                grid = grid.min(f.magnitude_at(z));
            }
        }
    }
    assert!(check.certificate.lower_bound > 0.0);
    assert!(check.certificate.lower_bound <= grid);
    assert!((grid - 1.0 / 5f64.sqrt()).abs() < 1e-2);
}

#[test]
fn peak_examples() {
    for m in [2, 5, 17] {
        for zeta in [c(1.0, 0.0), c(0.0, 1.0), C64::from_polar(1.0, 2.0)] {
            let phi = peak_function(zeta, m).unwrap();
            assert!((phi.eval(zeta) - 1.0).norm() < 1e-12);
        }
    }
    let phi = peak_function(c(1.0, 0.0), 2).unwrap();
    assert!((phi.eval(c(-1.0, 0.0)) - 0.25).norm() < 1e-15);

    let off_region_max = |m: u32| {
        let phi = peak_function(c(1.0, 0.0), m).unwrap();
        (0..20_000)
            .map(|k| circle(k, 20_000))
            .filter(|z| (z - 1.0).norm() >= 0.5)
            .map(|z| phi.eval(z).norm())
            .fold(0.0, f64::max)
    };
    let maxima: Vec<f64> = (2..12).map(off_region_max).collect();
    assert!(maxima.windows(2).all(|w| w[1] < w[0]), "{maxima:?}");
}

#[test]
fn mobius_examples() {
    let p = mobius_param(0.5, 0.1).unwrap();
    assert!((p.a - 0.99375).abs() < 1e-15);
    assert_eq!(p.apply(c(1.0, 0.0)), c(1.0, 0.0));
    assert_eq!(p.apply(c(-1.0, 0.0)), c(-1.0, 0.0));
    assert_eq!(p.apply(c(p.a, 0.0)), c(0.0, 0.0));
    let mut worst = 0.0f64;
    for i in 0..100 {
        for j in 0..100 {
            let z = C64::from_polar(i as f64 / 99.0, TAU * j as f64 / 100.0);
            if (z - 1.0).norm() >= 0.5 {
                worst = worst.max((p.apply(z) + 1.0).norm());
            }
        }
    }
    assert!(worst < 0.1, "{worst}");
    assert!(mobius_param(1.0, 0.1).is_err());
    assert!(mobius_param(0.5, 0.0).is_err());
}

#[test]
fn norm_one_examples() {
    let (f, g) = main_instance();
    let opts = DiskOptions::default();
    for y in [
        DiskTuple::zeros(2).unwrap(),
        DiskTuple::new(vec![DiskElement::constant(c(0.1, 0.0)), DiskElement::constant(c(0.0, -0.1))]).unwrap(),
    ] {
        let w = disk_norm_one_reduce(&f, &g, &y, &opts).unwrap();
        assert!((w.params.x1 - 1.0).norm() < 1e-9);
        for v in w.multiplier.components() {
            let (hi, lo) = disk_sup_norm(v, &opts.budget);
            assert!((hi - 1.0).abs() <= 1e-6 && (lo - 1.0).abs() <= 1e-6, "{lo} {hi}");
            assert!((v.eval(w.params.x1).norm() - 1.0).abs() < 1e-9);
        }
        assert!(disk_check_invertible(&w.reduced_tuple(), &opts.budget).is_invertible());
        assert!(verify_disk_witness(&w, &opts).passed);
        assert!(blend_bound_holds(&w, 10_000));
    }

    let one = DiskElement::constant(c(1.0, 0.0));
    let err = disk_norm_one_reduce(&f, &one, &DiskTuple::zeros(2).unwrap(), &opts).unwrap_err();
    assert!(err.is_honest_failure());
}

#[test]
fn witness_search_examples() {
    let (f, g) = main_instance();
    let opts = DiskOptions::default();
    let y = disk_small_norm_witness(&f, &g, 0.5, &opts).unwrap();
    assert!(y.components().iter().all(|e| e.numerator().is_zero()));

    // a witness may not exist here; only the honest outcome is checked
    let z = DiskTuple::single(DiskElement::z());
    match disk_small_norm_witness(&z, &g, 0.4, &opts) {
        Ok(y) => {
            let u = DiskTuple::reduced(&z, &y, &g).unwrap();
            assert!(disk_check_invertible(&u, &opts.budget).is_invertible());
        }
        Err(e) => assert!(e.is_honest_failure()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mobius_preserves_the_circle(a in 1e-6f64..(1.0 - 1e-6), t in 0.0f64..TAU) {
        let z = C64::from_polar(1.0, t);
        prop_assert!((mobius(a, z).norm() - 1.0).abs() < 1e-12);
        prop_assert!((mobius(a, c(1.0, 0.0)) - 1.0).norm() < 1e-12);
        prop_assert!((mobius(a, c(-1.0, 0.0)) + 1.0).norm() < 1e-12);
    }

    #[test]
    fn peak_is_normalized(t in 0.0f64..TAU, m in 2u32..40) {
        let zeta = C64::from_polar(1.0, t);
        let phi = peak_function(zeta, m).unwrap();
        prop_assert!((phi.eval(zeta) - 1.0).norm() < 1e-12);
        let (hi, _) = disk_sup_norm(&phi, &DiskBudget::default());
        prop_assert!(hi <= 1.0 + 1e-6);
    }

    #[test]
    fn containment_holds(eta in 0.1f64..0.9, eps in 0.02f64..0.5, r in 0.0f64..=1.0, t in 0.0f64..TAU) {
        let p = mobius_param(eta, eps).unwrap();
        let z = C64::from_polar(r, t);
        if (z - 1.0).norm() >= eta {
            prop_assert!((p.apply(z) + 1.0).norm() < eps);
        }
    }

    #[test]
    fn blended_multipliers_stay_in_the_unit_disk(y0 in (-0.35f64..0.35, -0.35f64..0.35), y1 in (-0.35f64..0.35, -0.35f64..0.35)) {
        let (f, g) = main_instance();
        let y = DiskTuple::new(vec![DiskElement::constant(c(y0.0, y0.1)), DiskElement::constant(c(y1.0, y1.1))]).unwrap();
        let opts = DiskOptions::default();
        // f + y g stays invertible for these small constants
        let w = disk_norm_one_reduce(&f, &g, &y, &opts).unwrap();
        prop_assert!(blend_bound_holds(&w, 10_000));
    }
}
