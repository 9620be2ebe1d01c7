use crate::certify::{certify_positive, min_modulus_pl, TupleExpr};
use crate::error::{Error, Result};
use crate::pl::{bezout_coefficients, PlFunction, PlTuple};
use crate::scalar::C64;

use super::small_norm::{small_norm_on_mesh, small_norm_reduce};
use super::witness::{ReductionKind, ReductionWitness};
use super::{joint_min, ladder, ReduceOptions};

/// Reduces an invertible `(m+1)`-tuple through a length-`n` reduction.
///
/// With `T = (f_1..f_n, f_{n+1}+g, .., f_m+g, g)` and its canonical Bezout
/// coefficients `a`, the function `h = sum_{j>n} a_j (f_j+g) + a_{m+1} g`
/// makes `(f_1..f_n, h)` invertible. A small-norm witness `x` for it yields
/// the multiplier `c = (x_1 a_{m+1}, .., x_n a_{m+1}, 1, .., 1)`, which is
/// invertible because a component is `1`. Indices above are 1-based; `n` is a
/// count. When `n == m` the call is a plain small-norm reduction with radius
/// `1/2`.
pub fn stabilize_reduce(f: &PlTuple, g: &PlFunction, n: usize, opts: &ReduceOptions) -> Result<ReductionWitness> {
    let m = f.len();
    if n == 0 || n > m {
        return Err(Error::InvalidParameter(format!("need 1 <= n <= m, got n = {n}, m = {m}")));
    }
    if n == m {
        let mut w = small_norm_reduce(f, g, 0.5, opts)?;
        w.trace.insert(0, "n = m: no stabilization needed, small-norm reduction".into());
        return Ok(w);
    }
    joint_min(f, g)?;
    ladder(f, g, opts, |f, g, r| {
        let mut tcomps: Vec<PlFunction> = f.components()[..n].to_vec();
        for fj in &f.components()[n..] {
            tcomps.push(fj.add(g)?);
        }
        let head_t = PlTuple::new(tcomps.clone())?;
        let tcert = min_modulus_pl(&head_t.with(g)?).1;
        if !tcert.certifies_positive() {
            return Err(Error::NotInvertible("transformed tuple not certified".into()));
        }
        let (acoef, a_last) = bezout_coefficients(&head_t, g)?;
        let nv = f.mesh().num_vertices();
        let hvals: Vec<C64> = (0..nv)
            .map(|k| {
                (n..m).map(|j| acoef.component(j).value(k) * tcomps[j].value(k)).sum::<C64>()
                    + a_last.value(k) * g.value(k)
            })
            .collect();
        let h = PlFunction::new(f.mesh().clone(), f.field(), hvals)?;
        let head = f.select(&(0..n).collect::<Vec<_>>())?;
        let hcert = min_modulus_pl(&head.with(&h)?).1;
        if !hcert.certifies_positive() {
            return Err(Error::Budget("(f_1..f_n, h) not certified invertible".into()));
        }
        let sw = small_norm_on_mesh(&head, &h, 0.5, opts, r, "stabilize")?;
        let mut comps = Vec::with_capacity(m);
        for j in 0..n {
            comps.push(sw.multiplier.component(j).mul_vertexwise(&a_last)?);
        }
        for _ in n..m {
            comps.push(PlFunction::constant(f.mesh().clone(), f.field(), C64::new(1.0, 0.0))?);
        }
        let cvec = PlTuple::new(comps)?;
        let red = certify_positive(&TupleExpr::reduced(f, &cvec, g)?, opts.bernstein);
        if !red.certifies_positive() {
            return Err(Error::Budget("stabilize: f + c g not certified".into()));
        }
        let mut params = sw.params.clone();
        params.c = joint_min(f, g)?;
        params.delta_prime = Some(hcert.lower_bound);
        params.case = Some(format!("m = {m}, n = {n}"));
        let certificates = vec![
            red.with_target("f + c*g").with_seed(Some(opts.seed)).with_refinements(r),
            min_modulus_pl(&cvec).1.with_target("|c|"),
            hcert.with_target("|(f_1..f_n, h)|"),
        ];
        let mut trace = vec![format!(
            "T certified with bound {}; h from canonical Bezout coefficients of T",
            tcert.lower_bound
        )];
        trace.extend(sw.trace);
        Ok(ReductionWitness { kind: ReductionKind::Stabilize, f: f.clone(), g: g.clone(), multiplier: cvec, certificates, params, trace })
    })
}
