use std::fmt;

use serde::{Deserialize, Serialize};

use crate::certify::{certify_positive, min_modulus_pl, BernsteinBudget, Certificate, TupleExpr};
use crate::pl::{PlFunction, PlTuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    SmallNorm,
    NormOne,
    AllUnits,
    Unitary,
    Stabilize,
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionKind::SmallNorm => "small-norm",
            ReductionKind::NormOne => "norm-one",
            ReductionKind::AllUnits => "all-units",
            ReductionKind::Unitary => "unitary",
            ReductionKind::Stabilize => "stabilize",
        })
    }
}

/// Snapshot of the quantities a reduction used. Every bound recorded here is
/// a certificate output.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReductionParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_v: Option<f64>,
    /// Certified minimum of `|(f, g)|`.
    pub c: f64,
    /// Lower bound for `|f|` on the `t_V`-sublevel of `|g|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Certified minimum of the intermediate invertible tuple.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_prime: Option<f64>,
    pub max_retries: usize,
    pub max_refinements: usize,
    pub seed: u64,
    /// Which branch of the construction ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub refinements_used: usize,
    pub attempts: usize,
    /// Vertex where the norm-one multiplier attains modulus one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_vertex: Option<usize>,
    /// Index set kept by the minimal-subtuple search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtuple: Option<Vec<usize>>,
    /// Target lower bound for the reduced tuple, when the construction has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

/// A multiplier together with the certificates of its defining predicate.
#[derive(Clone, Debug)]
pub struct ReductionWitness {
    pub kind: ReductionKind,
    /// Input tuple on the final mesh.
    pub f: PlTuple,
    /// Input function on the final mesh.
    pub g: PlFunction,
    pub multiplier: PlTuple,
    /// Certificates; the first is always the reduced tuple's.
    pub certificates: Vec<Certificate>,
    pub params: ReductionParams,
    pub trace: Vec<String>,
}

impl ReductionWitness {
    /// `f + multiplier * g`.
    pub fn reduced_tuple(&self) -> TupleExpr {
        TupleExpr::reduced(&self.f, &self.multiplier, &self.g)
            .expect("witness components share one mesh")
            .with_description("f + m*g")
    }

    pub fn reduced_certificate(&self) -> &Certificate {
        &self.certificates[0]
    }
}

/// One re-checked predicate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
}

/// Result of re-certifying a witness from scratch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Verification {
    pub(crate) fn from_checks(checks: Vec<Check>) -> Self {
        Verification { passed: checks.iter().all(|c| c.passed), checks }
    }
}

/// Re-derives every certificate of the witness from its data alone.
pub fn verify_witness(w: &ReductionWitness, budget: BernsteinBudget) -> Verification {
    let mut checks = Vec::new();
    let red = certify_positive(&w.reduced_tuple(), budget);
    checks.push(Check { name: "reduced tuple invertible".into(), passed: red.certifies_positive(), value: red.lower_bound });
    let comps = w.multiplier.components();
    match w.kind {
        ReductionKind::SmallNorm => {
            let eps = w.params.epsilon.unwrap_or(f64::NAN);
            for (j, a) in comps.iter().enumerate() {
                let s = a.sup_norm();
                checks.push(Check { name: format!("sup |m_{j}| <= epsilon"), passed: s <= eps, value: s });
            }
        }
        ReductionKind::NormOne => {
            for (j, v) in comps.iter().enumerate() {
                let s = v.sup_norm();
                checks.push(Check { name: format!("sup |m_{j}| = 1"), passed: s == 1.0, value: s });
            }
        }
        ReductionKind::AllUnits => {
            for (j, u) in comps.iter().enumerate() {
                let c = min_modulus_pl(&PlTuple::single(u.clone())).1;
                checks.push(Check { name: format!("m_{j} invertible"), passed: c.certifies_positive(), value: c.lower_bound });
            }
        }
        ReductionKind::Unitary | ReductionKind::Stabilize => {
            let c = min_modulus_pl(&w.multiplier).1;
            checks.push(Check { name: "multiplier tuple invertible".into(), passed: c.certifies_positive(), value: c.lower_bound });
            if w.kind == ReductionKind::Stabilize {
                let has_one = comps.iter().any(is_constant_one);
                checks.push(Check {
                    name: "a multiplier component is 1".into(),
                    passed: has_one,
                    value: if has_one { 1.0 } else { 0.0 },
                });
            }
        }
    }
    Verification::from_checks(checks)
}

pub(crate) fn is_constant_one(f: &PlFunction) -> bool {
    f.values().iter().all(|z| z.re == 1.0 && z.im == 0.0)
}
