use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::certify::{CertKind, Certificate};
use crate::error::{Error, Result};
use crate::reduce::{stream_rng, Check, Verification};
use crate::scalar::{guarded, Field, C64};

use super::certify::{angle_of, disk_check_invertible, disk_min, sup_norm_bounds, DiskBudget, Verdict};
use super::element::{DiskElement, DiskTuple};
use super::enclosure::Ball;
use super::peak::{mobius_param, peak_exponent, peak_function, peak_off_region_bound};
use super::poly::Poly;

/// Tolerances and search budgets of the disk-algebra constructions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskOptions {
    pub budget: DiskBudget,
    /// Largest `|g|` at the boundary point accepted as a zero of `g`.
    pub zero_tol: f64,
    /// Allowed distance of each multiplier sup-norm from one.
    pub norm_tol: f64,
    pub eta: f64,
    pub seed: u64,
    /// Random draws of the small-norm witness search.
    pub attempts: usize,
}

impl Default for DiskOptions {
    fn default() -> Self {
        DiskOptions { budget: DiskBudget::default(), zero_tol: 1e-9, norm_tol: 1e-6, eta: 0.5, seed: 0, attempts: 64 }
    }
}

/// Quantities chosen by the disk norm-one construction.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiskWitnessParams {
    pub case: String,
    /// Boundary point where the multiplier attains modulus one.
    pub x1: C64,
    pub g_at_x1: f64,
    /// Lower bound of `|f|` on the region `V`.
    pub delta: f64,
    /// Radius of `V`, a disk about `x1` intersected with the closed disk.
    pub region_radius: f64,
    /// Upper bound of `|g|` on `V`; at most `delta/(2 sqrt(n))`.
    pub g_on_region: f64,
    pub m: u32,
    /// Certified minimum of `|f + y g|` over the closed disk.
    pub delta_prime: f64,
    pub g_sup: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub a: f64,
}

/// Norm-one witness for a tuple over the disk algebra.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiskReductionWitness {
    pub f: DiskTuple,
    pub g: DiskElement,
    /// The small-norm witness the construction started from.
    pub y: DiskTuple,
    pub multiplier: DiskTuple,
    /// Certificates; the first is the reduced tuple's.
    pub certificates: Vec<Certificate>,
    pub params: DiskWitnessParams,
    pub trace: Vec<String>,
}

impl DiskReductionWitness {
    pub fn reduced_tuple(&self) -> DiskTuple {
        DiskTuple::reduced(&self.f, &self.multiplier, &self.g).expect("witness lengths agree")
    }
}

fn ones(n: usize) -> Result<DiskTuple> {
    DiskTuple::new(vec![DiskElement::constant(C64::new(1.0, 0.0)); n])
}

fn is_zero(e: &DiskElement) -> bool {
    e.numerator().is_zero()
}

/// Boundary argmin of `|g|`: the best of 4096 equally spaced angles (ties to
/// the smallest angle), then a golden-section refinement around it.
pub fn boundary_argmin(g: &DiskElement) -> C64 {
    const N: usize = 4096;
    let h = TAU / N as f64;
    let value = |t: f64| g.eval(C64::from_polar(1.0, t)).norm();
    let mut best = (0.0, value(0.0));
    for k in 1..N {
        let t = k as f64 * h;
        let v = value(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    if best.1 == 0.0 {
        return C64::from_polar(1.0, best.0);
    }
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best.0 - h, best.0 + h);
    for _ in 0..80 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if value(a) <= value(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let t = 0.5 * (lo + hi);
    if value(t) < best.1 {
        C64::from_polar(1.0, angle_of(C64::from_polar(1.0, t)))
    } else {
        C64::from_polar(1.0, best.0)
    }
}

/// Builds `v` with `||v_j|| = 1` and `f + v g` invertible, given a witness
/// `y` with `||y_j|| < 1/2` and `f + y g` invertible, when `g` vanishes at a
/// boundary point.
///
/// With `x1` the boundary argmin of `|g|` and `V` a disk about it on which
/// `|f| > delta` and `|g| < delta/(2 sqrt(n))`, a peak function `Phi` at `x1`
/// with `|Phi| <= 1/2` off `V` is pushed towards `-1` by a Mobius map:
/// `psi = (1 + L_a(Phi))/2` is one at `x1` and below
/// `delta'/(8 sqrt(n) ||g||)` off `V`. Then `v_j = psi^2 + y_j (1 - psi)^2`.
pub fn disk_norm_one_reduce(
    f: &DiskTuple,
    g: &DiskElement,
    y: &DiskTuple,
    opts: &DiskOptions,
) -> Result<DiskReductionWitness> {
    let n = f.len();
    if y.len() != n {
        return Err(Error::InvalidParameter(format!("y has {} components, f has {n}", y.len())));
    }
    let budget = &opts.budget;
    let joint = disk_check_invertible(&f.with(g), budget);
    if !joint.is_invertible() {
        return Err(Error::NotInvertible(format!("(f, g) is {:?}", joint.verdict)));
    }
    let mut trace = vec![format!("(f, g) certified invertible with bound {}", joint.certificate.lower_bound)];

    if f.components().iter().all(is_zero) || is_zero(g) {
        let v = ones(n)?;
        let case = if is_zero(g) { "g = 0: v = e" } else { "f = 0: v = e" };
        trace.push(case.into());
        return finish(f, g, y, v, DiskWitnessParams { case: case.into(), ..Default::default() }, trace, opts);
    }

    for (j, yj) in y.components().iter().enumerate() {
        let s = sup_norm_bounds(yj, budget).upper;
        if !(s < 0.5) {
            return Err(Error::InvalidParameter(format!("sup |y_{j}| <= {s} is not below 1/2")));
        }
    }
    let u = DiskTuple::reduced(f, y, g)?;
    let um = disk_min(u.components(), budget);
    let delta_prime = guarded(um.lower);
    if !(delta_prime > 0.0) {
        return Err(Error::NotInvertible("f + y g is not certified invertible".into()));
    }
    trace.push(format!("delta' = min |f + y g| >= {delta_prime} over {} cells", um.cells));

    let x1 = boundary_argmin(g);
    let gx1 = g.eval(x1).norm();
    if !(gx1 <= opts.zero_tol) {
        return Err(Error::Hypothesis(format!(
            "min |g| on the circle is {gx1} > {}: g has no boundary zero",
            opts.zero_tol
        )));
    }
    trace.push(format!("x1 = {} + {}i (angle {}), |g(x1)| = {gx1}", x1.re, x1.im, angle_of(x1)));

    let sqrt_n = (n as f64).sqrt();
    let fx1 = f.magnitude_at(x1);
    // the widest region wins: it gives the smallest peak exponent
    let mut region: Option<(f64, f64, f64)> = None;
    for s in [0.9, 0.75, 0.5, 0.25, 0.125, 0.0625, 0.03125] {
        let delta = s * fx1;
        let t = delta / (2.0 * sqrt_n);
        let mut rho = 2.0;
        for _ in 0..300 {
            let ball = Ball::new(x1, rho);
            let g_hi = g.enclose(ball).map_or(f64::INFINITY, |b| b.upper_abs());
            if g_hi < t && f_lower(f, ball) > delta {
                if region.is_none_or(|r| rho > r.1) {
                    region = Some((delta, rho, g_hi));
                }
                break;
            }
            rho *= 0.9;
        }
    }
    let Some((delta, rho, g_hi)) = region else {
        return Err(Error::Budget("no region about x1 separates |f| from |g|".into()));
    };
    trace.push(format!(
        "V = {{|z - x1| < {rho}}}: |f| > delta = {delta}, |g| <= {g_hi} < delta/(2 sqrt(n)) = {}",
        delta / (2.0 * sqrt_n)
    ));

    let m = peak_exponent(rho)?;
    let phi = peak_function(x1, m)?;
    trace.push(format!("m = {m}: |Phi| <= {} <= 1/2 off V", peak_off_region_bound(rho, m)));

    let g_sup = sup_norm_bounds(g, budget).upper;
    let raw_eps = delta_prime / (4.0 * sqrt_n * g_sup);
    let epsilon = raw_eps.min(0.5);
    let mp = mobius_param(opts.eta, epsilon)?;
    trace.push(format!("eps = delta'/(4 sqrt(n) ||g||) = {raw_eps}, used {epsilon}; a = {}", mp.a));

    let one = C64::new(1.0, 0.0);
    let psi = phi.compose_mobius(mp.a)?.shift(one).scale(C64::new(0.5, 0.0));
    let omp = psi.scale(-one).shift(one);
    let psi2 = psi.mul(&psi);
    let omp2 = omp.mul(&omp);
    let v = DiskTuple::new(y.components().iter().map(|yj| psi2.add(&yj.mul(&omp2))).collect())?;

    let params = DiskWitnessParams {
        case: "boundary zero of g".into(),
        x1,
        g_at_x1: gx1,
        delta,
        region_radius: rho,
        g_on_region: g_hi,
        m,
        delta_prime,
        g_sup,
        epsilon,
        eta: opts.eta,
        a: mp.a,
    };
    trace.extend(sampled_bounds(y, &v, &psi, x1, rho, delta_prime / (8.0 * sqrt_n * g_sup)));
    finish(f, g, y, v, params, trace, opts)
}

fn f_lower(f: &DiskTuple, ball: Ball) -> f64 {
    let mut mid2 = 0.0;
    let mut rad2 = 0.0;
    for e in f.components() {
        let Some(b) = e.enclose(ball) else { return 0.0 };
        mid2 += b.mid.norm_sqr();
        rad2 += b.rad * b.rad;
    }
    mid2.sqrt() - rad2.sqrt()
}

/// Logs the pointwise estimates of the construction at boundary samples:
/// `|v_j| <= 1`, and off `V` both `|psi| < bound` and `|v_j - y_j| <= 4|psi|`.
fn sampled_bounds(y: &DiskTuple, v: &DiskTuple, psi: &DiskElement, x1: C64, rho: f64, bound: f64) -> Vec<String> {
    const SAMPLES: usize = 10_000;
    let mut v_max = 0.0f64;
    let mut psi_off = 0.0f64;
    let mut excess = f64::NEG_INFINITY;
    for k in 0..SAMPLES {
        let z = C64::from_polar(1.0, TAU * k as f64 / SAMPLES as f64);
        let p = psi.eval(z).norm();
        let off = (z - x1).norm() >= rho;
        if off {
            psi_off = psi_off.max(p);
        }
        for (vj, yj) in v.components().iter().zip(y.components()) {
            let vz = vj.eval(z);
            v_max = v_max.max(vz.norm());
            if off {
                excess = excess.max((vz - yj.eval(z)).norm() - 4.0 * p);
            }
        }
    }
    vec![
        format!("max |v_j| over {SAMPLES} boundary samples = {v_max} (blend bound 1)"),
        format!("max |psi| off V = {psi_off} (bound {bound})"),
        format!("max (|v_j - y_j| - 4|psi|) off V = {excess}"),
    ]
}

fn sup_certificate(h: &DiskElement, budget: &DiskBudget, target: String) -> (Certificate, f64, f64) {
    let s = sup_norm_bounds(h, budget);
    let cert = Certificate::new(CertKind::SupNorm, s.upper, s.lower, target)
        .with_note(format!("sup in [{}, {}] over {} arcs", s.lower, s.upper, s.cells));
    (cert, s.lower, s.upper)
}

fn finish(
    f: &DiskTuple,
    g: &DiskElement,
    y: &DiskTuple,
    v: DiskTuple,
    params: DiskWitnessParams,
    mut trace: Vec<String>,
    opts: &DiskOptions,
) -> Result<DiskReductionWitness> {
    let red_t = DiskTuple::reduced(f, &v, g)?;
    let red = disk_check_invertible(&red_t, &opts.budget);
    if !red.is_invertible() {
        return Err(Error::Budget(format!("f + v g is {:?}", red.verdict)));
    }
    trace.push(format!("f + v g certified invertible with bound {}", red.certificate.lower_bound));
    let mut certificates = vec![red.certificate.with_target("f + v*g").with_seed(Some(opts.seed))];
    for (j, vj) in v.components().iter().enumerate() {
        let (cert, lo, hi) = sup_certificate(vj, &opts.budget, format!("sup |v_{j}|"));
        if !(lo >= 1.0 - opts.norm_tol && hi <= 1.0 + opts.norm_tol) {
            return Err(Error::Budget(format!("sup |v_{j}| in [{lo}, {hi}] is not within {} of 1", opts.norm_tol)));
        }
        certificates.push(cert);
        if !params.case.ends_with("v = e") {
            let at = vj.eval(params.x1).norm();
            trace.push(format!("|v_{j}(x1)| = {at}"));
        }
    }
    Ok(DiskReductionWitness {
        f: f.clone(),
        g: g.clone(),
        y: y.clone(),
        multiplier: v,
        certificates,
        params,
        trace,
    })
}

/// Randomized search for `y` with `||y_j|| <= bound` and `f + y g`
/// invertible. Returns `y = 0` at once when `f` itself is certified
/// invertible. Candidates are polynomials of degree at most 3 whose
/// coefficient moduli sum to at most `bound`, which bounds their sup-norm.
pub fn disk_small_norm_witness(f: &DiskTuple, g: &DiskElement, bound: f64, opts: &DiskOptions) -> Result<DiskTuple> {
    if !(bound > 0.0 && bound <= 0.5) {
        return Err(Error::InvalidParameter(format!("bound must lie in (0, 1/2], got {bound}")));
    }
    let budget = &opts.budget;
    if !disk_check_invertible(&f.with(g), budget).is_invertible() {
        return Err(Error::NotInvertible("(f, g) is not certified invertible".into()));
    }
    let n = f.len();
    if disk_check_invertible(f, budget).is_invertible() {
        return DiskTuple::zeros(n);
    }
    let mut rng = stream_rng(opts.seed, "disk-witness", 0);
    for attempt in 0..opts.attempts {
        let degree = attempt % 4;
        let comps = (0..n)
            .map(|_| {
                let raw: Vec<C64> = (0..=degree).map(|_| Field::Complex.sample_ball(&mut rng, 1.0)).collect();
                let total: f64 = raw.iter().map(|c| c.norm()).sum();
                let scale = bound * rng.gen_range(0.2..1.0) / total.max(f64::MIN_POSITIVE);
                DiskElement::polynomial(Poly::new(raw.iter().map(|c| c * scale).collect()))
            })
            .collect();
        let y = DiskTuple::new(comps)?;
        let check = disk_check_invertible(&DiskTuple::reduced(f, &y, g)?, budget);
        if check.verdict == Verdict::Invertible {
            return Ok(y);
        }
    }
    Err(Error::Budget(format!("no witness with sup-norm <= {bound} in {} draws", opts.attempts)))
}

/// Re-derives the claims of a disk witness from its data alone.
pub fn verify_disk_witness(w: &DiskReductionWitness, opts: &DiskOptions) -> Verification {
    let mut checks = Vec::new();
    let red = disk_check_invertible(&w.reduced_tuple(), &opts.budget);
    checks.push(Check {
        name: "reduced tuple invertible".into(),
        passed: red.is_invertible(),
        value: red.certificate.lower_bound,
    });
    for (j, vj) in w.multiplier.components().iter().enumerate() {
        let s = sup_norm_bounds(vj, &opts.budget);
        let ok = s.lower >= 1.0 - opts.norm_tol && s.upper <= 1.0 + opts.norm_tol;
        checks.push(Check { name: format!("sup |v_{j}| = 1 within tolerance"), passed: ok, value: s.upper });
        if !w.params.case.ends_with("v = e") {
            let at = vj.eval_rational(w.params.x1).norm();
            checks.push(Check { name: format!("|v_{j}(x1)| = 1"), passed: (at - 1.0).abs() <= 1e-9, value: at });
        }
    }
    Verification::from_checks(checks)
}
