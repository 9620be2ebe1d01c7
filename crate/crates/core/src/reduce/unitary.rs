use crate::certify::{certify_positive, min_modulus_pl, Certificate, TupleExpr};
use crate::error::{Error, Result};
use crate::pl::{bezout_coefficients, PlFunction, PlTuple};
use crate::scalar::C64;

use super::approx::{add_tuples, perturbation};
use super::witness::{ReductionKind, ReductionParams, ReductionWitness};
use super::{joint_min, ladder, ReduceOptions};

const HALVINGS: usize = 6;

/// Builds `w` with `w` itself invertible and `a + w*b` certified invertible.
///
/// The all-ones tuple is tried first. Otherwise, with Bezout coefficients
/// `x.a + y b = 1`, an invertible `u` near `x` keeps `v = u.a + y b`
/// invertible; `y' = y conj(u)/|u|^2` satisfies `u.y' = y`, so `a + y' b` is
/// invertible, and an invertible `w` near `y'` keeps it so.
pub fn unitary_reduce(a: &PlTuple, b: &PlFunction, opts: &ReduceOptions) -> Result<ReductionWitness> {
    joint_min(a, b)?;
    ladder(a, b, opts, |a, b, r| unitary_on_mesh(a, b, opts, r))
}

fn ones(a: &PlTuple) -> Result<PlTuple> {
    PlTuple::new(vec![PlFunction::constant(a.mesh().clone(), a.field(), C64::new(1.0, 0.0))?; a.len()])
}

fn unitary_on_mesh(a: &PlTuple, b: &PlFunction, opts: &ReduceOptions, round: usize) -> Result<ReductionWitness> {
    let n = a.len();
    let c = joint_min(a, b)?;
    let mut params = ReductionParams {
        c,
        max_retries: opts.max_retries,
        max_refinements: opts.max_refinements,
        seed: opts.seed,
        refinements_used: round,
        ..Default::default()
    };

    let e = ones(a)?;
    let direct = certify_positive(&TupleExpr::reduced(a, &e, b)?, opts.bernstein);
    if direct.certifies_positive() {
        params.case = Some("w = e".into());
        params.attempts = 1;
        let trace = vec!["a + e*b certified directly; w = e".to_string()];
        return Ok(finish(a, b, e, direct, vec![], params, trace, opts));
    }

    let (x, y) = bezout_coefficients(a, b)?;
    let sqrt_n = (n as f64).sqrt();
    let mut trace = vec!["canonical Bezout coefficients x, y with x.a + y b = 1 at vertices".to_string()];

    // step 1: invertible u near x with v = u.a + y b still invertible
    let mut eps0 = 1.0 / (sqrt_n * a.aggregate_norm().max(f64::MIN_POSITIVE));
    let mut found = None;
    let mut attempts = 0;
    'outer: for h in 0..HALVINGS {
        for attempt in 1..opts.max_retries + 2 {
            attempts += 1;
            let d = perturbation(&x, eps0, opts.seed, "unitary-u", round, h * 1000 + attempt)?;
            let u = add_tuples(&x, &d)?;
            if !min_modulus_pl(&u).1.certifies_positive() {
                continue;
            }
            let vcert = certify_positive(&TupleExpr::dot_plus(&u, a, &y, b)?, opts.bernstein);
            if vcert.certifies_positive() {
                found = Some((u, vcert.with_target("u.a + y*b")));
                break 'outer;
            }
        }
        eps0 /= 2.0;
    }
    let Some((u, vcert)) = found else {
        return Err(Error::Budget("unitary: no invertible u near x keeps u.a + y b certified".into()));
    };
    trace.push(format!("u within {eps0} of x; v = u.a + y b certified with bound {}", vcert.lower_bound));
    params.epsilon = Some(eps0);
    params.delta_prime = Some(vcert.lower_bound);

    // step 2: y' with u.y' = y at vertices
    let yp = u.with(&y)?.map_vertices(n, |vals, k| {
        let s: f64 = vals[..n].iter().map(|z| z.norm_sqr()).sum();
        if s == 0.0 {
            return Err(Error::DivisionByZero { vertex: k });
        }
        Ok(vals[..n].iter().map(|uj| vals[n] * uj.conj() / s).collect())
    })?;

    // step 3: invertible w near y' with a + w b invertible
    let near = (0..a.mesh().num_vertices())
        .map(|k| {
            (0..n)
                .map(|j| (a.component(j).value(k) + yp.component(j).value(k) * b.value(k)).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    let mut eps1 = (near / (sqrt_n * b.sup_norm().max(f64::MIN_POSITIVE))).min(1.0);
    for h in 0..HALVINGS {
        for attempt in 0..opts.max_retries + 2 {
            attempts += 1;
            let d = perturbation(&yp, eps1, opts.seed, "unitary-w", round, h * 1000 + attempt)?;
            let w = add_tuples(&yp, &d)?;
            if !min_modulus_pl(&w).1.certifies_positive() {
                continue;
            }
            let red = certify_positive(&TupleExpr::reduced(a, &w, b)?, opts.bernstein);
            if red.certifies_positive() {
                params.case = Some("bezout".into());
                params.attempts = attempts;
                trace.push(format!("w within {eps1} of y' = y conj(u)/|u|^2"));
                return Ok(finish(a, b, w, red, vec![vcert], params, trace, opts));
            }
        }
        eps1 /= 2.0;
    }
    Err(Error::Budget("unitary: no invertible w near y' keeps a + w b certified".into()))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    a: &PlTuple,
    b: &PlFunction,
    w: PlTuple,
    red: Certificate,
    extra: Vec<Certificate>,
    params: ReductionParams,
    trace: Vec<String>,
    opts: &ReduceOptions,
) -> ReductionWitness {
    let r = params.refinements_used;
    let mut certificates = vec![red.with_target("a + w*b").with_seed(Some(opts.seed)).with_refinements(r)];
    certificates.push(min_modulus_pl(&w).1.with_target("|w|"));
    certificates.extend(extra);
    ReductionWitness { kind: ReductionKind::Unitary, f: a.clone(), g: b.clone(), multiplier: w, certificates, params, trace }
}
