//! Problem files and witness documents.
//!
//! Both are JSON. Complex numbers are `[re, im]` pairs and every real is
//! written in its shortest round-trip form, so parsing a document and writing
//! it again reproduces the same bytes.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::certify::{certify_min_modulus_expr, certify_positive, min_modulus_pl, BernsteinBudget, Certificate};
use crate::disk::{
    disk_check_invertible, disk_norm_one_reduce, disk_small_norm_witness, sup_norm_bounds, verify_disk_witness,
    DiskBudget, DiskElement, DiskOptions, DiskReductionWitness, DiskTuple, Poly,
};
use crate::error::{Error, Result};
use crate::mesh::{Refinement, ShapeTag, SimplicialMesh};
use crate::pl::{PlFunction, PlTuple};
use crate::reduce::{
    all_units_reduce, norm_one_reduce, small_norm_reduce, stabilize_reduce, unitary_reduce, verify_witness, Check,
    ReduceOptions, ReductionKind, ReductionParams, ReductionWitness, Verification,
};
use crate::scalar::{Field, C64};

/// Version of the JSON layout written by this build.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algebra {
    PlMesh,
    Disk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operation {
    SmallNorm,
    NormOne,
    AllUnits,
    Unitary,
    Stabilize,
    Certify,
    DiskNormOne,
    DiskWitnessSearch,
}

impl Operation {
    pub const ALL: [Operation; 8] = [
        Operation::SmallNorm,
        Operation::NormOne,
        Operation::AllUnits,
        Operation::Unitary,
        Operation::Stabilize,
        Operation::Certify,
        Operation::DiskNormOne,
        Operation::DiskWitnessSearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operation::SmallNorm => "small-norm",
            Operation::NormOne => "norm-one",
            Operation::AllUnits => "all-units",
            Operation::Unitary => "unitary",
            Operation::Stabilize => "stabilize",
            Operation::Certify => "certify",
            Operation::DiskNormOne => "disk-norm-one",
            Operation::DiskWitnessSearch => "disk-witness-search",
        }
    }

    fn reduction_kind(self) -> Option<ReductionKind> {
        Some(match self {
            Operation::SmallNorm => ReductionKind::SmallNorm,
            Operation::NormOne => ReductionKind::NormOne,
            Operation::AllUnits => ReductionKind::AllUnits,
            Operation::Unitary => ReductionKind::Unitary,
            Operation::Stabilize => ReductionKind::Stabilize,
            _ => return None,
        })
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Operation::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown operation `{s}`")))
    }
}

/// A mesh given by a builder or written out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeshSpec {
    Builder {
        shape: ShapeTag,
        resolution: usize,
    },
    Inline {
        dimension: usize,
        vertices: Vec<Vec<f64>>,
        simplices: Vec<Vec<usize>>,
    },
}

impl MeshSpec {
    pub fn build(&self) -> Result<SimplicialMesh> {
        match self {
            MeshSpec::Builder { shape, resolution } => SimplicialMesh::build(*shape, *resolution),
            MeshSpec::Inline { dimension, vertices, simplices } => {
                SimplicialMesh::new(*dimension, vertices.clone(), simplices.clone())
            }
        }
    }
}

/// Vertex values of a PL function, coefficients of a polynomial, or a
/// quotient of two coefficient arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionData {
    Values(Vec<C64>),
    Rational { numerator: Vec<C64>, denominator: Vec<C64> },
}

impl FunctionData {
    fn pl(&self, mesh: &Arc<SimplicialMesh>, field: Field) -> Result<PlFunction> {
        match self {
            FunctionData::Values(v) => PlFunction::new(mesh.clone(), field, v.clone()),
            FunctionData::Rational { .. } => {
                Err(Error::InvalidParameter("PL functions are given by vertex values".into()))
            }
        }
    }

    fn disk(&self) -> Result<DiskElement> {
        match self {
            FunctionData::Values(c) => {
                if c.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                    return Err(Error::InvalidParameter("non-finite coefficient".into()));
                }
                Ok(DiskElement::polynomial(Poly::new(c.clone())))
            }
            FunctionData::Rational { numerator, denominator } => {
                DiskElement::rational(Poly::new(numerator.clone()), Poly::new(denominator.clone()))
            }
        }
    }

    pub fn from_pl(f: &PlFunction) -> Self {
        FunctionData::Values(f.values().to_vec())
    }

    pub fn from_disk(e: &DiskElement) -> Self {
        if e.is_polynomial() && e.denominator().coeffs() == [C64::new(1.0, 0.0)] {
            FunctionData::Values(e.numerator().coeffs().to_vec())
        } else {
            FunctionData::Rational {
                numerator: e.numerator().coeffs().to_vec(),
                denominator: e.denominator().coeffs().to_vec(),
            }
        }
    }
}

/// Operation parameters. Absent entries take the library defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Length of the reduced tuple for `stabilize`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_retries: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_refinements: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bernstein: Option<BernsteinBudget>,
    /// Small-norm witness the disk norm-one construction starts from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<FunctionData>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disk_budget: Option<DiskBudget>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub algebra: Algebra,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<MeshSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<Field>,
    pub tuple_f: Vec<FunctionData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<FunctionData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operation: Option<Operation>,
    #[serde(default)]
    pub params: Params,
}

/// Flag values that take precedence over the problem file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub operation: Option<Operation>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub max_retries: Option<usize>,
    pub max_refinements: Option<usize>,
}

impl ProblemSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem specs serialize")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if o.operation.is_some() {
            self.operation = o.operation;
        }
        let p = &mut self.params;
        p.epsilon = o.epsilon.or(p.epsilon);
        p.seed = o.seed.or(p.seed);
        p.max_retries = o.max_retries.or(p.max_retries);
        p.max_refinements = o.max_refinements.or(p.max_refinements);
    }

    pub fn operation(&self) -> Result<Operation> {
        self.operation.ok_or_else(|| Error::InvalidParameter("no operation given".into()))
    }

    fn field(&self) -> Field {
        self.field.unwrap_or(Field::Complex)
    }

    pub fn reduce_options(&self) -> ReduceOptions {
        let d = ReduceOptions::default();
        let p = &self.params;
        ReduceOptions {
            seed: p.seed.unwrap_or(d.seed),
            max_retries: p.max_retries.unwrap_or(d.max_retries),
            max_refinements: p.max_refinements.unwrap_or(d.max_refinements),
            bernstein: p.bernstein.unwrap_or(d.bernstein),
        }
    }

    pub fn disk_options(&self) -> DiskOptions {
        let d = DiskOptions::default();
        let p = &self.params;
        DiskOptions {
            budget: p.disk_budget.unwrap_or(d.budget),
            zero_tol: p.zero_tol.unwrap_or(d.zero_tol),
            norm_tol: p.norm_tol.unwrap_or(d.norm_tol),
            eta: p.eta.unwrap_or(d.eta),
            seed: p.seed.unwrap_or(d.seed),
            attempts: p.attempts.unwrap_or(d.attempts),
        }
    }

    /// The problem's mesh, `f` and `g` as PL data.
    pub fn pl_data(&self) -> Result<(PlTuple, Option<PlFunction>)> {
        self.expect_algebra(Algebra::PlMesh)?;
        let mesh = Arc::new(
            self.mesh
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("a PL problem needs a mesh".into()))?
                .build()?,
        );
        let field = self.field();
        let f = PlTuple::new(self.tuple_f.iter().map(|d| d.pl(&mesh, field)).collect::<Result<_>>()?)?;
        let g = self.g.as_ref().map(|d| d.pl(&mesh, field)).transpose()?;
        Ok((f, g))
    }

    pub fn disk_data(&self) -> Result<(DiskTuple, Option<DiskElement>)> {
        self.expect_algebra(Algebra::Disk)?;
        if self.mesh.is_some() || self.field.is_some_and(|f| f != Field::Complex) {
            return Err(Error::InvalidParameter("disk problems take neither a mesh nor a real field".into()));
        }
        let f = DiskTuple::new(self.tuple_f.iter().map(FunctionData::disk).collect::<Result<_>>()?)?;
        let g = self.g.as_ref().map(FunctionData::disk).transpose()?;
        Ok((f, g))
    }

    fn expect_algebra(&self, a: Algebra) -> Result<()> {
        if self.algebra == a {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("expected a {a:?} problem, found {:?}", self.algebra)))
        }
    }
}

fn need<T>(v: Option<T>, what: &str, op: Operation) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParameter(format!("operation {op} needs `{what}`")))
}

/// A PL reduction witness written out on the mesh it was certified on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlWitness {
    pub kind: ReductionKind,
    pub mesh: SimplicialMesh,
    pub field: Field,
    pub f: Vec<Vec<C64>>,
    pub g: Vec<C64>,
    pub multiplier: Vec<Vec<C64>>,
    pub params: ReductionParams,
    pub trace: Vec<String>,
}

impl PlWitness {
    fn from_reduction(w: &ReductionWitness) -> Self {
        let values = |t: &PlTuple| t.components().iter().map(|c| c.values().to_vec()).collect();
        PlWitness {
            kind: w.kind,
            mesh: (**w.g.mesh()).clone(),
            field: w.g.field(),
            f: values(&w.f),
            g: w.g.values().to_vec(),
            multiplier: values(&w.multiplier),
            params: w.params.clone(),
            trace: w.trace.clone(),
        }
    }

    fn to_reduction(&self, certificates: Vec<Certificate>) -> Result<ReductionWitness> {
        let mesh = Arc::new(self.mesh.clone());
        let tuple = |rows: &[Vec<C64>]| -> Result<PlTuple> {
            PlTuple::new(
                rows.iter().map(|v| PlFunction::new(mesh.clone(), self.field, v.clone())).collect::<Result<_>>()?,
            )
        };
        Ok(ReductionWitness {
            kind: self.kind,
            f: tuple(&self.f)?,
            g: PlFunction::new(mesh.clone(), self.field, self.g.clone())?,
            multiplier: tuple(&self.multiplier)?,
            certificates,
            params: self.params.clone(),
            trace: self.trace.clone(),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Witness {
    Pl(PlWitness),
    Disk(DiskReductionWitness),
    DiskSmallNorm { y: DiskTuple },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub solve_ms: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessDocument {
    pub schema_version: u32,
    pub library_version: String,
    pub problem: ProblemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub certificates: Vec<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl WitnessDocument {
    pub fn from_json(s: &str) -> Result<Self> {
        let doc: WitnessDocument = serde_json::from_str(s)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidParameter(format!(
                "schema version {} is not supported (expected {SCHEMA_VERSION})",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness documents serialize")
    }
}

/// Runs the problem's operation and packages the certified result.
///
/// ```
/// use stablerank::io::{solve, Algebra, FunctionData, Operation, ProblemSpec, Params};
/// use stablerank::C64;
/// let c = |re: f64, im: f64| C64::new(re, im);
/// let problem = ProblemSpec {
///     algebra: Algebra::Disk,
///     mesh: None,
///     field: None,
///     tuple_f: vec![FunctionData::Values(vec![c(0.0, 0.0), c(1.0, 0.0)])],
///     g: Some(FunctionData::Values(vec![c(1.0, 0.0)])),
///     operation: Some(Operation::Certify),
///     params: Params::default(),
/// };
/// let doc = solve(&problem).unwrap();
/// assert!(doc.certificates[0].certifies_positive());
/// ```
pub fn solve(problem: &ProblemSpec) -> Result<WitnessDocument> {
    let op = problem.operation()?;
    let p = &problem.params;
    let (witness, certificates) = match problem.algebra {
        Algebra::PlMesh => {
            let (f, g) = problem.pl_data()?;
            let opts = problem.reduce_options();
            if op == Operation::Certify {
                let t = match &g {
                    Some(g) => f.with(g)?,
                    None => f,
                };
                let (_, cert) = min_modulus_pl(&t);
                if !cert.certifies_positive() {
                    return Err(Error::NotInvertible(format!("minimum modulus {} is not positive", cert.value)));
                }
                (None, vec![cert])
            } else {
                let g = need(g, "g", op)?;
                let w = match op {
                    Operation::SmallNorm => small_norm_reduce(&f, &g, need(p.epsilon, "epsilon", op)?, &opts)?,
                    Operation::NormOne => norm_one_reduce(&f, &g, &opts)?,
                    Operation::AllUnits => all_units_reduce(&f, &g, p.epsilon.unwrap_or(0.5), &opts)?,
                    Operation::Unitary => unitary_reduce(&f, &g, &opts)?,
                    Operation::Stabilize => stabilize_reduce(&f, &g, need(p.n, "n", op)?, &opts)?,
                    _ => return Err(Error::InvalidParameter(format!("operation {op} needs the disk algebra"))),
                };
                let certs = w.certificates.clone();
                (Some(Witness::Pl(PlWitness::from_reduction(&w))), certs)
            }
        }
        Algebra::Disk => {
            let (f, g) = problem.disk_data()?;
            let opts = problem.disk_options();
            match op {
                Operation::Certify => {
                    let t = match &g {
                        Some(g) => f.with(g),
                        None => f,
                    };
                    let check = disk_check_invertible(&t, &opts.budget);
                    if !check.is_invertible() {
                        return Err(Error::NotInvertible(format!("tuple is {:?}", check.verdict)));
                    }
                    (None, vec![check.certificate])
                }
                Operation::DiskNormOne => {
                    let g = need(g, "g", op)?;
                    let y = match &p.y {
                        Some(y) => DiskTuple::new(y.iter().map(FunctionData::disk).collect::<Result<_>>()?)?,
                        None => DiskTuple::zeros(f.len())?,
                    };
                    let w = disk_norm_one_reduce(&f, &g, &y, &opts)?;
                    let certs = w.certificates.clone();
                    (Some(Witness::Disk(w)), certs)
                }
                Operation::DiskWitnessSearch => {
                    let g = need(g, "g", op)?;
                    let eps = need(p.epsilon, "epsilon", op)?;
                    let y = disk_small_norm_witness(&f, &g, eps, &opts)?;
                    let check = disk_check_invertible(&DiskTuple::reduced(&f, &y, &g)?, &opts.budget);
                    (Some(Witness::DiskSmallNorm { y }), vec![check.certificate.with_target("f + y*g")])
                }
                _ => return Err(Error::InvalidParameter(format!("operation {op} needs the PL algebra"))),
            }
        }
    };
    Ok(WitnessDocument {
        schema_version: SCHEMA_VERSION,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        problem: problem.clone(),
        witness,
        certificates,
        timings: None,
    })
}

/// [`solve`] with the wall time recorded.
pub fn solve_timed(problem: &ProblemSpec) -> Result<WitnessDocument> {
    let t = Instant::now();
    let mut doc = solve(problem)?;
    doc.timings = Some(Timings { solve_ms: t.elapsed().as_secs_f64() * 1e3 });
    Ok(doc)
}

fn same_tuple(a: &[Vec<C64>], b: &PlTuple) -> bool {
    a.len() == b.len() && a.iter().zip(b.components()).all(|(x, y)| x.as_slice() == y.values())
}

fn same_disk(a: &DiskElement, b: &DiskElement) -> bool {
    a.numerator() == b.numerator() && a.denominator() == b.denominator()
}

fn near(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// Whether a recorded certificate matches one computed afresh, down to the
/// per-simplex bounds when both carry them.
fn reproduces(stored: Option<&Certificate>, fresh: &Certificate) -> Check {
    let ok = stored.is_some_and(|s| {
        s.kind == fresh.kind
            && near(s.value, fresh.value)
            && near(s.lower_bound, fresh.lower_bound)
            && (s.trace.is_empty()
                || (s.trace.len() == fresh.trace.len()
                    && s.trace.iter().zip(&fresh.trace).all(|(a, b)| {
                        a.simplex == b.simplex && a.pieces == b.pieces && near(a.lower_bound, b.lower_bound)
                    })))
    });
    Check { name: "recorded certificate reproduces".into(), passed: ok, value: fresh.lower_bound }
}

fn check(name: &str, passed: bool) -> Check {
    Check { name: name.into(), passed, value: if passed { 1.0 } else { 0.0 } }
}

/// Re-checks a document from its data alone: the witness must belong to the
/// echoed problem, and every claim is certified again. Malformed documents
/// are errors; a failed claim is a failed check.
pub fn verify_document(doc: &WitnessDocument) -> Result<Verification> {
    let problem = &doc.problem;
    let op = problem.operation()?;
    let mut checks = Vec::new();
    match (problem.algebra, &doc.witness) {
        (Algebra::PlMesh, None) if op == Operation::Certify => {
            let (f, g) = problem.pl_data()?;
            let t = match &g {
                Some(g) => f.with(g)?,
                None => f,
            };
            let (_, cert) = min_modulus_pl(&t);
            checks.push(Check { name: "tuple invertible".into(), passed: cert.certifies_positive(), value: cert.lower_bound });
            checks.push(reproduces(doc.certificates.first(), &cert));
        }
        (Algebra::Disk, None) if op == Operation::Certify => {
            let (f, g) = problem.disk_data()?;
            let t = match &g {
                Some(g) => f.with(g),
                None => f,
            };
            let c = disk_check_invertible(&t, &problem.disk_options().budget);
            checks.push(Check { name: "tuple invertible".into(), passed: c.is_invertible(), value: c.certificate.lower_bound });
            checks.push(reproduces(doc.certificates.first(), &c.certificate));
        }
        (Algebra::PlMesh, Some(Witness::Pl(w))) if op.reduction_kind() == Some(w.kind) => {
            let (mut f, g) = problem.pl_data()?;
            let mut g = need(g, "g", op)?;
            for _ in 0..w.params.refinements_used {
                let (_, map) = f.mesh().refine(&Refinement::Global)?;
                f = f.transfer(&map);
                g = g.transfer(&map);
            }
            let matches = **f.mesh() == w.mesh && same_tuple(&w.f, &f) && g.values() == w.g.as_slice();
            checks.push(check("witness data matches the problem", matches));
            let rw = w.to_reduction(doc.certificates.clone())?;
            let budget = problem.reduce_options().bernstein;
            checks.extend(verify_witness(&rw, budget).checks);
            // a construction with a target margin certifies against that floor
            let expr = rw.reduced_tuple();
            let mut repro = reproduces(doc.certificates.first(), &certify_positive(&expr, budget));
            if let (false, Some(margin)) = (repro.passed, w.params.margin) {
                if let Ok(cert) = certify_min_modulus_expr(&expr, margin * (1.0 - 1e-6), budget) {
                    repro = reproduces(doc.certificates.first(), &cert);
                }
            }
            checks.push(repro);
        }
        (Algebra::Disk, Some(Witness::Disk(w))) if op == Operation::DiskNormOne => {
            let (f, g) = problem.disk_data()?;
            let g = need(g, "g", op)?;
            let matches = f.len() == w.f.len()
                && f.components().iter().zip(w.f.components()).all(|(a, b)| same_disk(a, b))
                && same_disk(&g, &w.g);
            checks.push(check("witness data matches the problem", matches));
            let opts = problem.disk_options();
            checks.extend(verify_disk_witness(w, &opts).checks);
            let fresh = disk_check_invertible(&w.reduced_tuple(), &opts.budget).certificate;
            checks.push(reproduces(doc.certificates.first(), &fresh));
        }
        (Algebra::Disk, Some(Witness::DiskSmallNorm { y })) if op == Operation::DiskWitnessSearch => {
            let (f, g) = problem.disk_data()?;
            let g = need(g, "g", op)?;
            let eps = need(problem.params.epsilon, "epsilon", op)?;
            let budget = problem.disk_options().budget;
            let red = disk_check_invertible(&DiskTuple::reduced(&f, y, &g)?, &budget);
            checks.push(Check {
                name: "reduced tuple invertible".into(),
                passed: red.is_invertible(),
                value: red.certificate.lower_bound,
            });
            checks.push(reproduces(doc.certificates.first(), &red.certificate));
            for (j, yj) in y.components().iter().enumerate() {
                let s = sup_norm_bounds(yj, &budget).upper;
                checks.push(Check { name: format!("sup |y_{j}| <= epsilon"), passed: s <= eps, value: s });
            }
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "witness does not fit a {:?} problem with operation {op}",
                problem.algebra
            )))
        }
    }
    Ok(Verification { passed: checks.iter().all(|c| c.passed), checks })
}
