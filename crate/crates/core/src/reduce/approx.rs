use crate::certify::{min_modulus_pl, Certificate};
use crate::error::{Error, Result};
use crate::mesh::Refinement;
use crate::pl::{PlFunction, PlTuple};
use crate::scalar::C64;

use super::{stream_rng, ReduceOptions};

/// An invertible tuple near a given one.
#[derive(Clone, Debug)]
pub struct Approximation {
    /// The certified invertible tuple `h + perturbation`.
    pub u: PlTuple,
    pub perturbation: PlTuple,
    pub certificate: Certificate,
    /// Candidates examined on the final mesh.
    pub attempts: usize,
    pub refinements: usize,
}

/// Candidate perturbation number `attempt` for tuples shaped like `h`:
/// zero, then a constant real shift of `eps/4`, then a random constant plus
/// random vertex noise, each of modulus at most `eps/4`. Every candidate has
/// vertex moduli at most `eps/2`.
pub(crate) fn perturbation(h: &PlTuple, eps: f64, seed: u64, stream: &str, round: usize, attempt: usize) -> Result<PlTuple> {
    let mesh = h.mesh().clone();
    let field = h.field();
    let nv = mesh.num_vertices();
    let quarter = eps / 4.0;
    let d: Vec<Vec<C64>> = match attempt {
        0 => vec![vec![C64::new(0.0, 0.0); nv]; h.len()],
        1 => vec![vec![C64::new(quarter, 0.0); nv]; h.len()],
        _ => {
            let mut rng = stream_rng(seed, stream, (round * 10_000 + attempt) as u64);
            (0..h.len())
                .map(|_| {
                    let shift = field.sample_ball(&mut rng, quarter);
                    (0..nv).map(|_| shift + field.sample_ball(&mut rng, quarter)).collect()
                })
                .collect()
        }
    };
    PlTuple::new(d.into_iter().map(|vals| PlFunction::new(mesh.clone(), field, vals)).collect::<Result<_>>()?)
}

pub(crate) fn add_tuples(a: &PlTuple, b: &PlTuple) -> Result<PlTuple> {
    PlTuple::new(a.components().iter().zip(b.components()).map(|(x, y)| x.add(y)).collect::<Result<_>>()?)
}

pub(crate) fn check_radius(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("approximation radius must be positive, got {eps}")))
    }
}

pub(crate) fn approx_on_mesh(h: &PlTuple, eps: f64, seed: u64, stream: &str, retries: usize, round: usize) -> Result<Approximation> {
    check_radius(eps)?;
    let mut best_value = f64::NEG_INFINITY;
    for attempt in 0..retries + 2 {
        let perturbation = perturbation(h, eps, seed, stream, round, attempt)?;
        let u = add_tuples(h, &perturbation)?;
        let (value, cert) = min_modulus_pl(&u);
        best_value = best_value.max(value);
        if cert.certifies_positive() {
            return Ok(Approximation { u, perturbation, certificate: cert, attempts: attempt + 1, refinements: 0 });
        }
    }
    Err(Error::Budget(format!(
        "no certified invertible tuple within {eps} after {} candidates (best minimum {best_value})",
        retries + 2
    )))
}

/// Finds `u` with `sup |u_j - h_j| < eps` and `min |u| > 0` certified.
///
/// Random candidates are tried on the current mesh, then on global
/// refinements; the result lives on the final mesh. Failure is expected when
/// invertible tuples are not dense, as for a sign-changing real scalar.
///
/// ```
/// use std::sync::Arc;
/// use stablerank::{mesh::SimplicialMesh, pl::{PlFunction, PlTuple}, reduce::{approx_invertible, ReduceOptions}, Field, C64};
/// let mesh = Arc::new(SimplicialMesh::interval(16).unwrap());
/// let h = PlFunction::from_fn(mesh.clone(), Field::Complex, |p| C64::new(p[0] - 0.5, 0.0)).unwrap();
/// let a = approx_invertible(&PlTuple::single(h.clone()), 0.1, &ReduceOptions::default()).unwrap();
/// assert!(a.certificate.certifies_positive());
/// assert!(a.perturbation.component(0).sup_norm() < 0.1);
///
/// let real = PlFunction::from_fn(mesh, Field::Real, |p| C64::new(p[0] - 0.5, 0.0)).unwrap();
/// assert!(approx_invertible(&PlTuple::single(real), 0.01, &ReduceOptions::default()).is_err());
/// ```
pub fn approx_invertible(h: &PlTuple, eps: f64, opts: &ReduceOptions) -> Result<Approximation> {
    let mut h = h.clone();
    let mut trail = Vec::new();
    for r in 0..=opts.max_refinements {
        match approx_on_mesh(&h, eps, opts.seed, "approx", opts.max_retries, r) {
            Ok(mut a) => {
                a.refinements = r;
                a.certificate = a.certificate.with_seed(Some(opts.seed)).with_refinements(r).with_target("|u|");
                return Ok(a);
            }
            Err(e @ Error::Budget(_)) => {
                trail.push(e.to_string());
                if r == opts.max_refinements {
                    break;
                }
                let Ok((_, map)) = h.mesh().refine(&Refinement::Global) else { break };
                h = h.transfer(&map);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Budget(trail.join("; ")))
}
