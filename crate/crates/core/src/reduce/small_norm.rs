use crate::certify::{certify_positive, min_modulus_pl, sup_norm_certificate, Certificate, TupleExpr};
use crate::error::{Error, Result};
use crate::pl::{divide, urysohn_from_levels, PlFunction, PlTuple};
use crate::scalar::C64;

use super::approx::{check_radius, perturbation};
use super::witness::{ReductionKind, ReductionParams, ReductionWitness};
use super::{joint_min, ladder, thresholds, ReduceOptions};

/// Builds `a` with `sup |a_j| <= eps` and `f + a*g` certified invertible.
///
/// When `|g|` stays above the sublevel radius `t_V`, `a` is a small
/// perturbation `d` making `f/g + d` invertible, so that `f + a*g = (f/g + d) g`
/// at the vertices. Otherwise a Urysohn function `phi` vanishing where
/// `|g| <= t_W` localizes a perturbation `p` of `f` away from the zeros of `g`:
/// `a = p*phi/g`, which is zero near those zeros and has modulus at most
/// `eps/2` elsewhere. The reduced tuple is certified directly in both cases.
///
/// ```
/// use std::sync::Arc;
/// use stablerank::{mesh::SimplicialMesh, pl::{PlFunction, PlTuple}, reduce::{small_norm_reduce, ReduceOptions}, Field, C64};
/// let mesh = Arc::new(SimplicialMesh::interval(32).unwrap());
/// let f = PlFunction::from_fn(mesh.clone(), Field::Complex, |p| C64::new(p[0], 0.0)).unwrap();
/// let g = PlFunction::from_fn(mesh, Field::Complex, |p| C64::new(1.0 - p[0], 0.0)).unwrap();
/// let w = small_norm_reduce(&PlTuple::single(f), &g, 0.1, &ReduceOptions::default()).unwrap();
/// assert!(w.multiplier.component(0).sup_norm() <= 0.1);
/// assert!(w.reduced_certificate().certifies_positive());
/// ```
pub fn small_norm_reduce(f: &PlTuple, g: &PlFunction, eps: f64, opts: &ReduceOptions) -> Result<ReductionWitness> {
    check_radius(eps)?;
    joint_min(f, g)?;
    ladder(f, g, opts, |f, g, r| small_norm_on_mesh(f, g, eps, opts, r, "small-norm"))
}

pub(crate) fn small_norm_on_mesh(
    f: &PlTuple,
    g: &PlFunction,
    eps: f64,
    opts: &ReduceOptions,
    round: usize,
    stream: &str,
) -> Result<ReductionWitness> {
    let n = f.len();
    let c = joint_min(f, g)?;
    let (t_w, t_v) = thresholds(c, n);
    let mut params = ReductionParams {
        epsilon: Some(eps),
        t_w: Some(t_w),
        t_v: Some(t_v),
        c,
        max_retries: opts.max_retries,
        max_refinements: opts.max_refinements,
        seed: opts.seed,
        refinements_used: round,
        ..Default::default()
    };
    let mut trace = Vec::new();
    let zero = PlTuple::new(vec![PlFunction::zero(f.mesh().clone(), f.field()); n])?;

    let f_cert = min_modulus_pl(f).1;
    if f_cert.certifies_positive() {
        params.case = Some("f invertible".into());
        params.attempts = 1;
        params.delta_prime = Some(f_cert.lower_bound);
        trace.push("f already certified invertible; a = 0".into());
        return finish(f, g, zero, f_cert, params, trace, opts);
    }

    let min_g = min_modulus_pl(&PlTuple::single(g.clone())).1.lower_bound;
    let (template, scale, phi): (PlTuple, f64, Option<PlFunction>) = if min_g >= t_v {
        params.case = Some("g bounded below".into());
        trace.push(format!("min |g| = {min_g} >= t_V = {t_v}: a perturbs f/g"));
        (divide(f, g)?, eps, None)
    } else {
        params.case = Some("g small somewhere".into());
        params.delta = Some(t_w);
        let psi = urysohn_from_levels(g, t_w, t_v)?;
        let phi = psi.with_values(psi.values().iter().map(|z| C64::new(1.0 - z.re, 0.0)).collect())?;
        trace.push(format!("min |g| = {min_g} < t_V = {t_v}: a = p*phi/g with |p| <= eps*t_W/2"));
        (f.clone(), eps * t_w, Some(phi))
    };

    let mut best = f64::NEG_INFINITY;
    for attempt in 1..opts.max_retries + 2 {
        let d = perturbation(&template, scale, opts.seed, stream, round, attempt)?;
        let a = match &phi {
            None => d,
            Some(phi) => {
                let joint = d.with(phi)?.with(g)?;
                joint.map_vertices(n, |vals, _| {
                    let (ph, gv) = (vals[n].re, vals[n + 1]);
                    Ok(vals[..n].iter().map(|&p| if ph > 0.0 { p * ph / gv } else { C64::new(0.0, 0.0) }).collect())
                })?
            }
        };
        if a.max_sup_norm() > eps {
            continue;
        }
        let expr = TupleExpr::reduced(f, &a, g)?;
        let cert = certify_positive(&expr, opts.bernstein);
        best = best.max(cert.lower_bound);
        if cert.certifies_positive() {
            params.attempts = attempt + 1;
            params.delta_prime = Some(cert.lower_bound);
            return finish(f, g, a, cert, params, trace, opts);
        }
    }
    Err(Error::Budget(format!(
        "small-norm: no certified candidate after {} attempts (best bound {best})",
        opts.max_retries + 1
    )))
}

fn finish(
    f: &PlTuple,
    g: &PlFunction,
    a: PlTuple,
    red: Certificate,
    params: ReductionParams,
    trace: Vec<String>,
    opts: &ReduceOptions,
) -> Result<ReductionWitness> {
    let red = red.with_target("f + a*g").with_seed(Some(opts.seed)).with_refinements(params.refinements_used);
    let mut certificates = vec![red];
    for (j, aj) in a.components().iter().enumerate() {
        certificates.push(sup_norm_certificate(aj, format!("sup |a_{j}|")));
    }
    Ok(ReductionWitness {
        kind: ReductionKind::SmallNorm,
        f: f.clone(),
        g: g.clone(),
        multiplier: a,
        certificates,
        params,
        trace,
    })
}
