//! Reductions of invertible tuples over `C(X, K)`.
//!
//! Each operation takes `(f, g)` with no common zero and builds a multiplier
//! tuple `m` such that `f + m*g` has no common zero and `m` satisfies the
//! constraint of its kind: small sup-norms, sup-norms exactly one, unit
//! components, an invertible multiplier tuple, or a stabilized multiplier with
//! a constant component. Every claim in a returned [`ReductionWitness`] is a
//! certificate computed on the final PL data, never an inference from an
//! algebraic identity.

mod all_units;
mod approx;
mod norm_one;
mod small_norm;
mod stabilize;
mod unitary;
mod witness;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certify::{min_modulus_pl, BernsteinBudget};
use crate::error::{Error, Result};
use crate::mesh::Refinement;
use crate::pl::{PlFunction, PlTuple};

pub use all_units::all_units_reduce;
pub use approx::{approx_invertible, Approximation};
pub use norm_one::{minimal_invertible_subtuple, norm_one_reduce, MinimalSubtuple};
pub use small_norm::small_norm_reduce;
pub use stabilize::stabilize_reduce;
pub use unitary::unitary_reduce;
pub use witness::{verify_witness, Check, ReductionKind, ReductionParams, ReductionWitness, Verification};

/// Search budgets and the RNG seed shared by every reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReduceOptions {
    pub seed: u64,
    /// Random attempts per mesh before refining.
    pub max_retries: usize,
    /// Global refinements before giving up.
    pub max_refinements: usize,
    pub bernstein: BernsteinBudget,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions { seed: 0, max_retries: 8, max_refinements: 3, bernstein: BernsteinBudget::default() }
    }
}

impl ReduceOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Deterministic generator for one named stream of random attempts.
pub fn stream_rng(seed: u64, stream: &str, index: u64) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stream.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ h);
    rng.set_stream(index);
    rng
}

/// Certified lower bound `c` of `|(f, g)|`, or [`Error::NotInvertible`].
pub(crate) fn joint_min(f: &PlTuple, g: &PlFunction) -> Result<f64> {
    let (value, cert) = min_modulus_pl(&f.with(g)?);
    if !cert.certifies_positive() {
        return Err(Error::NotInvertible(format!("min |(f, g)| = {value} is not certified positive")));
    }
    Ok(cert.lower_bound)
}

/// Sublevel radii `(t_W, t_V)` with `t_V = min(c/2, c*sqrt(3)/(4*sqrt(n)))`.
pub fn thresholds(c: f64, n: usize) -> (f64, f64) {
    let t_v = (c / 2.0).min(c * 3f64.sqrt() / (4.0 * (n as f64).sqrt()));
    (t_v / 2.0, t_v)
}

/// Retry ladder: runs `body` on the current mesh, then on global refinements
/// of it, until it succeeds or the refinement budget is spent. Only honest
/// failures trigger refinement.
pub(crate) fn ladder<T>(
    f: &PlTuple,
    g: &PlFunction,
    opts: &ReduceOptions,
    mut body: impl FnMut(&PlTuple, &PlFunction, usize) -> Result<T>,
) -> Result<T> {
    let mut f = f.clone();
    let mut g = g.clone();
    let mut trail = Vec::new();
    for r in 0..=opts.max_refinements {
        match body(&f, &g, r) {
            Ok(t) => return Ok(t),
            Err(e) if e.is_honest_failure() => {
                trail.push(format!("mesh {r}: {e}"));
                if r == opts.max_refinements {
                    break;
                }
                let Ok((_, map)) = f.mesh().refine(&Refinement::Global) else { break };
                f = f.transfer(&map);
                g = g.transfer(&map);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Budget(trail.join("; ")))
}
