//! Invertibility and norm certificates.
//!
//! A tuple of continuous functions generates the whole algebra exactly when
//! it has no common zero, so invertibility is certified by a strictly positive
//! lower bound for the pointwise magnitude. PL tuples get the exact minimum
//! from per-simplex convex-hull programs ([`min_modulus_pl`]). Degree-two
//! expressions such as `f + v*g` get Bernstein lower bounds with adaptive
//! subdivision ([`certify_min_modulus_expr`]).

pub mod bernstein;
pub mod expr;
pub mod hull;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::pl::{PlFunction, PlTuple};
use crate::scalar::guarded;

pub use expr::{ExprComponent, QuadForm, Term, TupleExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertKind {
    ExactMin,
    BernsteinLowerBound,
    SupNorm,
    Composite,
    ArgumentPrinciple,
    DiskEnclosure,
}

/// Bound recorded for one top simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexBound {
    pub simplex: usize,
    pub lower_bound: f64,
    /// Pieces examined (1 when no subdivision was needed).
    pub pieces: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertKind,
    /// Computed quantity: the exact minimum, the raw Bernstein bound, or the
    /// sup-norm, depending on `kind`.
    pub value: f64,
    /// `value` shrunk by the rounding guard; positive means invertible for
    /// the minimum-type kinds.
    pub lower_bound: f64,
    pub target: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<SimplexBound>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub refinements_used: usize,
}

impl Certificate {
    pub fn new(kind: CertKind, value: f64, lower_bound: f64, target: impl Into<String>) -> Self {
        Certificate {
            kind,
            value,
            lower_bound,
            target: target.into(),
            trace: Vec::new(),
            notes: Vec::new(),
            seed: None,
            refinements_used: 0,
        }
    }

    pub fn certifies_positive(&self) -> bool {
        self.lower_bound > 0.0
    }

    pub fn without_trace(mut self) -> Self {
        self.trace.clear();
        self
    }

    pub fn with_target(mut self, t: impl Into<String>) -> Self {
        self.target = t.into();
        self
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_refinements(mut self, r: usize) -> Self {
        self.refinements_used = r;
        self
    }

    pub fn with_note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

fn simplex_points(t: &PlTuple, verts: &[usize]) -> Vec<Vec<f64>> {
    verts
        .iter()
        .map(|&v| t.components().iter().flat_map(|c| [c.value(v).re, c.value(v).im]).collect())
        .collect()
}

/// Exact minimum of the pointwise magnitude of a PL tuple.
///
/// ```
/// use std::sync::Arc;
/// use stablerank::{certify::min_modulus_pl, mesh::SimplicialMesh, pl::{PlFunction, PlTuple}, Field, C64};
/// let mesh = Arc::new(SimplicialMesh::interval(1).unwrap());
/// let f = PlFunction::new(mesh, Field::Complex, vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
/// let (m, cert) = min_modulus_pl(&PlTuple::single(f));
/// assert!((m - 0.5f64.sqrt()).abs() < 1e-15);
/// assert!(cert.certifies_positive());
/// ```
pub fn min_modulus_pl(t: &PlTuple) -> (f64, Certificate) {
    let mesh = t.mesh();
    let results: Vec<hull::HullDistance> = mesh
        .simplices()
        .par_iter()
        .map(|s| hull::origin_distance(&simplex_points(t, s)))
        .collect();
    let value = results.iter().map(|r| r.distance).fold(f64::INFINITY, f64::min);
    let lb = results.iter().map(|r| r.lower_bound).fold(f64::INFINITY, f64::min);
    let mut cert = Certificate::new(CertKind::ExactMin, value, guarded(lb.min(value)), "|f|");
    cert.trace = results
        .iter()
        .enumerate()
        .map(|(k, r)| SimplexBound { simplex: k, lower_bound: r.lower_bound, pieces: 1 })
        .collect();
    (value, cert)
}

/// Largest duality gap over the per-simplex programs of [`min_modulus_pl`].
pub fn max_duality_gap(t: &PlTuple) -> f64 {
    t.mesh()
        .simplices()
        .iter()
        .map(|s| hull::origin_distance(&simplex_points(t, s)).gap())
        .fold(0.0, f64::max)
}

/// Exact sup-norm certificate of one function.
pub fn sup_norm_certificate(f: &PlFunction, target: impl Into<String>) -> Certificate {
    let s = f.sup_norm();
    Certificate::new(CertKind::SupNorm, s, s, target)
}

/// Subdivision budget for the Bernstein path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BernsteinBudget {
    pub max_depth: usize,
    pub max_pieces: usize,
}

impl Default for BernsteinBudget {
    fn default() -> Self {
        BernsteinBudget { max_depth: 12, max_pieces: 4096 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureReason {
    /// A corner value below the floor was found: the true minimum is below it.
    BelowFloor,
    /// Depth or piece budget ran out first.
    Budget,
}

/// Offending simplex of a failed Bernstein certification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Offender {
    pub simplex: usize,
    pub reason: FailureReason,
    /// Smallest magnitude seen at a piece corner; an upper bound for the
    /// minimum on this simplex.
    pub observed_min: f64,
}

/// Failure of [`certify_min_modulus_expr`], with a refinement hint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertFailure {
    pub floor: f64,
    pub offending: Vec<Offender>,
}

impl CertFailure {
    pub fn simplices(&self) -> Vec<usize> {
        self.offending.iter().map(|o| o.simplex).collect()
    }

    /// Smallest magnitude observed anywhere.
    pub fn observed_min(&self) -> f64 {
        self.offending.iter().map(|o| o.observed_min).fold(f64::INFINITY, f64::min)
    }

    pub fn budget_limited(&self) -> bool {
        self.offending.iter().all(|o| o.reason == FailureReason::Budget)
    }
}

fn certify_simplex(
    forms: Vec<QuadForm>,
    floor: f64,
    budget: BernsteinBudget,
) -> Result<(f64, usize), (FailureReason, f64)> {
    let k = forms[0].len();
    let children = bernstein::child_corners(k);
    let mut stack = vec![(forms, 0usize)];
    let mut pieces = 0usize;
    let mut lower = f64::INFINITY;
    let mut observed = f64::INFINITY;
    while let Some((f, depth)) = stack.pop() {
        pieces += 1;
        let pb = bernstein::piece_bound(&f);
        let corner = pb.min_corner.sqrt();
        observed = observed.min(corner);
        let lb = pb.magnitude_lower();
        if guarded(lb) >= floor && lb > 0.0 {
            lower = lower.min(lb);
            continue;
        }
        if corner < floor {
            return Err((FailureReason::BelowFloor, observed));
        }
        if depth >= budget.max_depth || pieces + stack.len() + children.len() > budget.max_pieces {
            return Err((FailureReason::Budget, observed));
        }
        for q in &children {
            let sub = f.iter().map(|b| bernstein::subdivide_form(b, q)).collect();
            stack.push((sub, depth + 1));
        }
    }
    Ok((lower, pieces))
}

/// Certifies `min |expr| >= floor` with Bernstein enclosures.
///
/// Affine expressions go through the exact path. On success the certificate's
/// guarded lower bound is at least `floor`.
pub fn certify_min_modulus_expr(
    expr: &TupleExpr,
    floor: f64,
    budget: BernsteinBudget,
) -> Result<Certificate, CertFailure> {
    if let Some(t) = expr.as_pl() {
        let (_, cert) = min_modulus_pl(&t);
        let cert = cert.with_target(expr.description());
        return if cert.lower_bound >= floor && cert.certifies_positive() {
            Ok(cert)
        } else {
            Err(CertFailure {
                floor,
                offending: cert
                    .trace
                    .iter()
                    .filter(|b| guarded(b.lower_bound) < floor || b.lower_bound <= 0.0)
                    .map(|b| Offender { simplex: b.simplex, reason: FailureReason::BelowFloor, observed_min: cert.value })
                    .collect(),
            })
        };
    }
    let results: Vec<_> = (0..expr.mesh().num_simplices())
        .into_par_iter()
        .map(|s| certify_simplex(expr.quad_forms(s), floor, budget))
        .collect();
    let mut offending = Vec::new();
    let mut trace = Vec::with_capacity(results.len());
    for (s, r) in results.into_iter().enumerate() {
        match r {
            Ok((lb, pieces)) => trace.push(SimplexBound { simplex: s, lower_bound: lb, pieces }),
            Err((reason, observed_min)) => offending.push(Offender { simplex: s, reason, observed_min }),
        }
    }
    if !offending.is_empty() {
        return Err(CertFailure { floor, offending });
    }
    let value = trace.iter().map(|b| b.lower_bound).fold(f64::INFINITY, f64::min);
    let mut cert = Certificate::new(CertKind::BernsteinLowerBound, value, guarded(value), expr.description());
    cert.trace = trace;
    Ok(cert)
}

/// Smallest magnitude at vertices and edge midpoints; an upper bound for the
/// minimum.
pub fn sampled_upper_min(expr: &TupleExpr) -> f64 {
    let mesh = expr.mesh();
    let mut m = (0..mesh.num_vertices())
        .map(|v| expr.eval_vertex(v).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min);
    for (s, verts) in mesh.simplices().iter().enumerate() {
        let k = verts.len();
        for i in 0..k {
            for j in i + 1..k {
                let mut bary = vec![0.0; k];
                bary[i] = 0.5;
                bary[j] = 0.5;
                m = m.min(expr.magnitude_at(&crate::mesh::MeshPoint { simplex: s, bary }));
            }
        }
    }
    m
}

/// Certifies `min |expr| > 0` without a caller-supplied floor.
///
/// Floors start at half the observed minimum and shrink until the
/// Bernstein path succeeds or the floor is negligible. The returned
/// certificate has a zero lower bound when nothing could be certified.
pub fn certify_positive(expr: &TupleExpr, budget: BernsteinBudget) -> Certificate {
    if let Some(t) = expr.as_pl() {
        return min_modulus_pl(&t).1.with_target(expr.description());
    }
    let mut observed = sampled_upper_min(expr);
    let scale = observed.max(1e-300);
    let mut floor = observed / 2.0;
    let mut last: Option<CertFailure> = None;
    for _ in 0..12 {
        if !(floor > 1e-12 * scale.max(1.0)) {
            break;
        }
        match certify_min_modulus_expr(expr, floor, budget) {
            Ok(c) => return c,
            Err(fail) => {
                let seen = fail.observed_min();
                if seen < observed {
                    observed = seen;
                    floor = floor.min(observed / 4.0);
                } else {
                    floor /= 8.0;
                }
                last = Some(fail);
            }
        }
    }
    let mut cert = Certificate::new(CertKind::BernsteinLowerBound, 0.0, 0.0, expr.description());
    if let Some(f) = last {
        cert.notes.push(format!(
            "no positive bound; offending simplices {:?}, smallest observed magnitude {}",
            f.simplices(),
            f.observed_min()
        ));
    }
    cert
}

/// Branch-and-bound Bernstein bounds after `0..=rounds` subdivision rounds.
///
/// Each round splits every piece whose bound is below the best observed
/// corner value, so the returned sequence is nondecreasing.
pub fn bernstein_rounds(expr: &TupleExpr, rounds: usize) -> Vec<f64> {
    let k = expr.mesh().dimension() + 1;
    let children = bernstein::child_corners(k);
    let mut pieces: Vec<(Vec<QuadForm>, bernstein::PieceBound)> = (0..expr.mesh().num_simplices())
        .map(|s| {
            let f = expr.quad_forms(s);
            let b = bernstein::piece_bound(&f);
            (f, b)
        })
        .collect();
    let lower = |p: &[(Vec<QuadForm>, bernstein::PieceBound)]| {
        p.iter().map(|(_, b)| b.magnitude_lower()).fold(f64::INFINITY, f64::min)
    };
    let mut out = vec![lower(&pieces)];
    for _ in 0..rounds {
        let ub = pieces.iter().map(|(_, b)| b.min_corner.sqrt()).fold(f64::INFINITY, f64::min);
        let mut next = Vec::with_capacity(pieces.len());
        for (f, b) in pieces {
            if b.magnitude_lower() < ub {
                for q in &children {
                    let sub: Vec<QuadForm> = f.iter().map(|m| bernstein::subdivide_form(m, q)).collect();
                    let sb = bernstein::piece_bound(&sub);
                    next.push((sub, sb));
                }
            } else {
                next.push((f, b));
            }
        }
        pieces = next;
        out.push(lower(&pieces));
    }
    out
}

/// Uniform entry point for invertibility checks.
pub trait Certifiable {
    fn certify_invertible(&self) -> Certificate;
}

impl Certifiable for PlTuple {
    fn certify_invertible(&self) -> Certificate {
        min_modulus_pl(self).1
    }
}

impl Certifiable for PlFunction {
    fn certify_invertible(&self) -> Certificate {
        min_modulus_pl(&PlTuple::single(self.clone())).1
    }
}

impl Certifiable for TupleExpr {
    fn certify_invertible(&self) -> Certificate {
        certify_positive(self, BernsteinBudget::default())
    }
}

/// `(true, cert)` iff a strictly positive lower bound was certified.
pub fn check_invertible<T: Certifiable + ?Sized>(t: &T) -> (bool, Certificate) {
    let c = t.certify_invertible();
    (c.certifies_positive(), c)
}
