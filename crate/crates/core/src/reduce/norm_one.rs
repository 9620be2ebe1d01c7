use serde::{Deserialize, Serialize};

use crate::certify::{
    certify_min_modulus_expr, certify_positive, min_modulus_pl, sup_norm_certificate, Certificate, TupleExpr,
};
use crate::error::{Error, Result};
use crate::pl::{blend, divide, normalize, urysohn_from_levels, PlFunction, PlTuple};
use crate::scalar::{clamp_to_unit, unit_normalize, Field, C64, GUARD};

use super::approx::{add_tuples, perturbation};
use super::small_norm::small_norm_on_mesh;
use super::witness::{ReductionKind, ReductionParams, ReductionWitness};
use super::{joint_min, ladder, thresholds, ReduceOptions};

/// Result of [`minimal_invertible_subtuple`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimalSubtuple {
    /// Kept indices, increasing, 0-based.
    pub indices: Vec<usize>,
    /// For each kept index `j`, the exact minimum of the subtuple without `j`:
    /// zero or below the guard, attained near a common zero of the others.
    pub dropped_minima: Vec<f64>,
}

fn subtuple_min(u: &PlTuple, idx: &[usize]) -> Result<Certificate> {
    Ok(min_modulus_pl(&u.select(idx)?).1)
}

/// Inclusion-minimal index set whose subtuple is certified invertible, by
/// greedy removal. Falls back to the full set when `u` itself is not
/// certified.
pub fn minimal_invertible_subtuple(u: &PlTuple) -> Result<MinimalSubtuple> {
    let mut keep: Vec<usize> = (0..u.len()).collect();
    if subtuple_min(u, &keep)?.certifies_positive() {
        let mut j = 0;
        while j < keep.len() {
            if keep.len() > 1 {
                let rest: Vec<usize> = keep.iter().copied().filter(|&k| k != keep[j]).collect();
                if subtuple_min(u, &rest)?.certifies_positive() {
                    keep = rest;
                    continue;
                }
            }
            j += 1;
        }
    }
    let dropped_minima = keep
        .iter()
        .map(|&j| {
            let rest: Vec<usize> = keep.iter().copied().filter(|&k| k != j).collect();
            if rest.is_empty() {
                Ok(0.0)
            } else {
                Ok(subtuple_min(u, &rest)?.value)
            }
        })
        .collect::<Result<_>>()?;
    Ok(MinimalSubtuple { indices: keep, dropped_minima })
}

/// Builds `v` with `sup |v_j| = 1` exactly and `f + v*g` certified invertible.
///
/// Three constructions, chosen by the certified minimum of `|g|` against the
/// sublevel radius `t_V`:
///
/// * `|g| >= t_V`, one component: `v = u/|u|` for an invertible `u` within
///   `1/2` of `f/g`;
/// * `|g| < t_V` somewhere: `v = psi + y (1 - psi)` for a small-norm witness
///   `y` and a Urysohn function `psi` that is one at the vertex minimizing
///   `|g|`;
/// * `|g| >= t_V`, several components: normalize a minimal invertible subtuple
///   of an approximation of `f/g`, set the other components to one.
///
/// ```
/// use std::sync::Arc;
/// use stablerank::{mesh::SimplicialMesh, pl::{PlFunction, PlTuple}, reduce::{norm_one_reduce, ReduceOptions}, Field, C64};
/// let mesh = Arc::new(SimplicialMesh::interval(32).unwrap());
/// let f = PlFunction::from_fn(mesh.clone(), Field::Complex, |p| C64::new(p[0], 0.0)).unwrap();
/// let g = PlFunction::from_fn(mesh, Field::Complex, |p| C64::new(1.0 - p[0], 0.0)).unwrap();
/// let w = norm_one_reduce(&PlTuple::single(f), &g, &ReduceOptions::default()).unwrap();
/// assert_eq!(w.multiplier.component(0).sup_norm(), 1.0);
/// assert!(w.reduced_certificate().certifies_positive());
/// ```
pub fn norm_one_reduce(f: &PlTuple, g: &PlFunction, opts: &ReduceOptions) -> Result<ReductionWitness> {
    joint_min(f, g)?;
    ladder(f, g, opts, |f, g, r| norm_one_on_mesh(f, g, opts, r))
}

fn norm_one_on_mesh(f: &PlTuple, g: &PlFunction, opts: &ReduceOptions, round: usize) -> Result<ReductionWitness> {
    let n = f.len();
    let c = joint_min(f, g)?;
    let (t_w, t_v) = thresholds(c, n);
    let params = ReductionParams {
        t_w: Some(t_w),
        t_v: Some(t_v),
        c,
        max_retries: opts.max_retries,
        max_refinements: opts.max_refinements,
        seed: opts.seed,
        refinements_used: round,
        ..Default::default()
    };
    let min_g = min_modulus_pl(&PlTuple::single(g.clone())).1.lower_bound;
    if min_g < t_v {
        case_b(f, g, params, opts, round)
    } else if n == 1 {
        case_a(f, g, params, opts, round)
    } else {
        case_c(f, g, params, opts, round)
    }
}

fn witness(
    f: &PlTuple,
    g: &PlFunction,
    v: PlTuple,
    red: Certificate,
    params: ReductionParams,
    trace: Vec<String>,
) -> ReductionWitness {
    let red = red.with_target("f + v*g").with_seed(Some(params.seed)).with_refinements(params.refinements_used);
    let mut certificates = vec![red];
    for (j, vj) in v.components().iter().enumerate() {
        certificates.push(sup_norm_certificate(vj, format!("sup |v_{j}|")));
    }
    ReductionWitness { kind: ReductionKind::NormOne, f: f.clone(), g: g.clone(), multiplier: v, certificates, params, trace }
}

fn case_a(f: &PlTuple, g: &PlFunction, mut params: ReductionParams, opts: &ReduceOptions, round: usize) -> Result<ReductionWitness> {
    params.case = Some("A".into());
    let big_f = divide(f, g)?;
    let mut best = f64::NEG_INFINITY;
    for attempt in 0..opts.max_retries + 2 {
        let d = perturbation(&big_f, 0.5, opts.seed, "norm-one-a", round, attempt)?;
        let u = add_tuples(&big_f, &d)?;
        let ucert = min_modulus_pl(&u).1;
        if !ucert.certifies_positive() {
            continue;
        }
        let v = normalize(&u)?;
        let cert = certify_positive(&TupleExpr::reduced(f, &v, g)?, opts.bernstein);
        best = best.max(cert.lower_bound);
        if cert.certifies_positive() {
            params.attempts = attempt + 1;
            params.delta_prime = Some(ucert.lower_bound);
            let trace = vec![format!("case A: u within 1/2 of f/g, min |u| = {}; v = u/|u|", ucert.value)];
            return Ok(witness(f, g, v, cert, params, trace));
        }
    }
    Err(Error::Budget(format!("norm-one case A: no certified candidate (best bound {best})")))
}

/// Rescales `v` so its largest vertex modulus is exactly one.
fn force_unit_sup(v: &PlFunction) -> Result<(PlFunction, f64)> {
    let s = v.sup_norm();
    if s == 1.0 {
        return Ok((v.clone(), 1.0));
    }
    let k = v.argmax_vertex();
    let vals = v
        .values()
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            if i == k {
                unit_normalize(z).expect("sup of an invertible normalization is positive")
            } else {
                clamp_to_unit(z / s)
            }
        })
        .collect();
    Ok((v.with_values(vals)?, 1.0 / s))
}

fn case_c(f: &PlTuple, g: &PlFunction, mut params: ReductionParams, opts: &ReduceOptions, round: usize) -> Result<ReductionWitness> {
    params.case = Some("C".into());
    let n = f.len();
    let big_f = divide(f, g)?;
    let radius = 1.0 / (2.0 * (n as f64).sqrt());
    let mut best = f64::NEG_INFINITY;
    for attempt in 0..opts.max_retries + 2 {
        let d = perturbation(&big_f, radius, opts.seed, "norm-one-c", round, attempt)?;
        let u = add_tuples(&big_f, &d)?;
        let ucert = min_modulus_pl(&u).1;
        if !ucert.certifies_positive() {
            continue;
        }
        let sub = minimal_invertible_subtuple(&u)?;
        let us = u.select(&sub.indices)?;
        let normalized = normalize(&us)?;
        let mut comps = Vec::with_capacity(n);
        let mut trace = vec![format!(
            "case C: u within {radius} of f/g per component, min |u| = {}; minimal subtuple {:?}, minima without each index {:?}",
            ucert.value, sub.indices, sub.dropped_minima
        )];
        for j in 0..n {
            match sub.indices.iter().position(|&k| k == j) {
                Some(p) => {
                    let (vj, factor) = force_unit_sup(normalized.component(p))?;
                    trace.push(format!("v_{j} = u_{j}/|u_S| rescaled by {factor}"));
                    comps.push(vj);
                }
                None => comps.push(PlFunction::constant(f.mesh().clone(), f.field(), C64::new(1.0, 0.0))?),
            }
        }
        let v = PlTuple::new(comps)?;
        let cert = certify_positive(&TupleExpr::reduced(f, &v, g)?, opts.bernstein);
        best = best.max(cert.lower_bound);
        if cert.certifies_positive() {
            params.attempts = attempt + 1;
            params.delta_prime = Some(ucert.lower_bound);
            params.subtuple = Some(sub.indices);
            return Ok(witness(f, g, v, cert, params, trace));
        }
    }
    Err(Error::Budget(format!("norm-one case C: no certified candidate (best bound {best})")))
}

/// Vertex-wise `y_j = phase(f_j conj g + shift |g|^2) / 2`. With a zero shift
/// this makes `|f_j + y_j g| = |f_j| + |g|/2` at every vertex; a small nonzero
/// shift keeps the phase from flipping across a segment where `f_j` passes
/// near zero, at the cost of slightly imperfect alignment elsewhere.
fn aligned_half(f: &PlTuple, g: &PlFunction, shift: C64) -> Result<PlTuple> {
    let n = f.len();
    f.with(g)?.map_vertices(n, |vals, _| {
        let gv = vals[n];
        Ok(vals[..n]
            .iter()
            .map(|&fj| match unit_normalize(fj * gv.conj() + shift * gv.norm_sqr()) {
                Some(w) => w * 0.5,
                None => C64::new(0.5, 0.0),
            })
            .collect())
    })
}

fn case_b(f: &PlTuple, g: &PlFunction, mut params: ReductionParams, opts: &ReduceOptions, round: usize) -> Result<ReductionWitness> {
    params.case = Some("B".into());
    let n = f.len();
    let c = params.c;
    let (t_w, t_v) = (params.t_w.unwrap(), params.t_v.unwrap());
    let margin = c * 3f64.sqrt() / 4.0;
    params.delta = Some((c * c - t_v * t_v).max(0.0).sqrt());
    params.margin = Some(margin);

    let x0 = (0..g.values().len())
        .min_by(|&a, &b| g.value(a).norm().total_cmp(&g.value(b).norm()))
        .expect("meshes have vertices");
    params.peak_vertex = Some(x0);
    let psi = urysohn_from_levels(g, t_w, t_v)?;
    let mut psi_vals = psi.values().to_vec();
    psi_vals[x0] = C64::new(1.0, 0.0);
    let psi = psi.with_values(psi_vals)?;

    let mut candidates: Vec<(String, PlTuple)> = Vec::new();
    match small_norm_on_mesh(f, g, 0.5, opts, round, "norm-one-y") {
        Ok(w) => candidates.push(("small-norm witness".into(), w.multiplier)),
        Err(e) if e.is_honest_failure() => {}
        Err(e) => return Err(e),
    }
    candidates.push(("phase-aligned".into(), aligned_half(f, g, C64::new(0.0, 0.0))?));
    let dirs: &[C64] = match f.field() {
        Field::Complex => &[
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, -1.0),
        ],
        Field::Real => &[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)],
    };
    for lambda in [0.1, 0.05, 0.2] {
        for &d in dirs {
            let shift = d * lambda;
            candidates.push((format!("phase-aligned, shift {shift}"), aligned_half(f, g, shift)?));
        }
    }
    let mut consts = vec![C64::new(0.5, 0.0), C64::new(-0.5, 0.0)];
    if f.field() == Field::Complex {
        consts.extend([C64::new(0.0, 0.5), C64::new(0.0, -0.5)]);
    }
    consts.push(C64::new(0.0, 0.0));
    for k in consts {
        let comp = PlFunction::constant(f.mesh().clone(), f.field(), k)?;
        candidates.push((format!("constant {k}"), PlTuple::new(vec![comp; n])?));
    }

    let floor = margin * (1.0 - 1e-6);
    let mut fallback: Option<(String, PlTuple, PlTuple, Certificate)> = None;
    for (attempt, (label, y)) in candidates.into_iter().enumerate() {
        if y.max_sup_norm() > 0.5 {
            continue;
        }
        let v = blend(&psi, &y)?;
        let v = v.map_vertices(n, |vals, _| Ok(vals.iter().map(|&z| clamp_to_unit(z)).collect()))?;
        let expr = TupleExpr::reduced(f, &v, g)?;
        match certify_min_modulus_expr(&expr, floor, opts.bernstein) {
            Ok(cert) => {
                params.attempts = attempt + 1;
                return finish_b(f, g, &y, v, cert, params, label, true, opts);
            }
            Err(_) => {
                let cert = certify_positive(&expr, opts.bernstein);
                let better = fallback.as_ref().is_none_or(|(_, _, _, c)| cert.lower_bound > c.lower_bound);
                if cert.certifies_positive() && better {
                    fallback = Some((label, y, v, cert));
                }
            }
        }
    }
    match fallback {
        Some((label, y, v, cert)) if round >= opts.max_refinements => {
            finish_b(f, g, &y, v, cert, params, label, false, opts)
        }
        _ => Err(Error::Budget(format!(
            "norm-one case B: no candidate certified above the margin {floor}"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_b(
    f: &PlTuple,
    g: &PlFunction,
    y: &PlTuple,
    v: PlTuple,
    cert: Certificate,
    mut params: ReductionParams,
    label: String,
    margin_met: bool,
    opts: &ReduceOptions,
) -> Result<ReductionWitness> {
    let u = certify_positive(&TupleExpr::reduced(f, y, g)?, opts.bernstein);
    params.delta_prime = Some(u.lower_bound);
    let trace = vec![
        format!("case B: y = {label}, sup |y| = {}", y.max_sup_norm()),
        format!(
            "psi = 1 at vertex {} where |g| = {}",
            params.peak_vertex.unwrap(),
            g.value(params.peak_vertex.unwrap()).norm()
        ),
        format!(
            "reduced bound {} {} margin c*sqrt(3)/4 = {} (guard {GUARD})",
            cert.lower_bound,
            if margin_met { "meets" } else { "misses" },
            params.margin.unwrap()
        ),
    ];
    Ok(witness(f, g, v, cert, params, trace))
}
