use crate::certify::{certify_positive, min_modulus_pl, TupleExpr};
use crate::error::{Error, Result};
use crate::pl::{PlFunction, PlTuple};
use crate::scalar::C64;

use super::small_norm::small_norm_on_mesh;
use super::witness::{ReductionKind, ReductionWitness};
use super::{joint_min, ladder, ReduceOptions};

/// Builds `u` with every component a unit and `f + u*g` certified invertible.
///
/// A small-norm witness `x` for `(f - e*g, g)` with radius `eps` gives
/// `u = x - e`, whose vertex values lie in the disk of radius `eps` about
/// `-1`; since that disk is convex, `|u_j| >= 1 - eps` everywhere.
/// `eps` must lie in `(0, 1)`; the usual choice is `1/2`.
pub fn all_units_reduce(f: &PlTuple, g: &PlFunction, eps: f64, opts: &ReduceOptions) -> Result<ReductionWitness> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "all-units radius must lie in (0, 1) so that |1 - x| >= 1 - eps > 0, got {eps}"
        )));
    }
    joint_min(f, g)?;
    ladder(f, g, opts, |f, g, r| {
        let shifted = PlTuple::new(f.components().iter().map(|fj| fj.sub(g)).collect::<Result<_>>()?)?;
        let sw = small_norm_on_mesh(&shifted, g, eps, opts, r, "all-units")?;
        let one = C64::new(1.0, 0.0);
        let u = sw.multiplier.map_vertices(f.len(), |vals, _| Ok(vals.iter().map(|&x| x - one).collect()))?;
        let red = certify_positive(&TupleExpr::reduced(f, &u, g)?, opts.bernstein);
        if !red.certifies_positive() {
            return Err(Error::Budget("all-units: reduced tuple not certified".into()));
        }
        let mut certificates = vec![red.with_target("f + u*g").with_seed(Some(opts.seed)).with_refinements(r)];
        for (j, uj) in u.components().iter().enumerate() {
            certificates.push(min_modulus_pl(&PlTuple::single(uj.clone())).1.with_target(format!("|u_{j}|")));
        }
        let mut params = sw.params;
        params.epsilon = Some(eps);
        let mut trace = vec!["u = x - e with x a small-norm witness for (f - e*g, g)".to_string()];
        trace.extend(sw.trace);
        Ok(ReductionWitness {
            kind: ReductionKind::AllUnits,
            f: f.clone(),
            g: g.clone(),
            multiplier: u,
            certificates,
            params,
            trace,
        })
    })
}
