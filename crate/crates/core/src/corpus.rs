//! Built-in instance sets exercised by `stablerank corpus`.
//!
//! Every entry is a complete [`ProblemSpec`]; random instances are generated
//! from fixed seeds, so two runs produce the same documents byte for byte.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instances::{random_pair, torus_triple, unitary_pair, vanish_at};
use crate::io::{solve, verify_document, Algebra, FunctionData, MeshSpec, Operation, Params, ProblemSpec, WitnessDocument};
use crate::mesh::{ShapeTag, SimplicialMesh};
use crate::pl::{PlFunction, PlTuple};
use crate::scalar::{Field, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subset {
    PlQuick,
    PlFull,
    Disk,
    All,
}

impl FromStr for Subset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "pl-quick" => Subset::PlQuick,
            "pl-full" => Subset::PlFull,
            "disk" => Subset::Disk,
            "all" => Subset::All,
            other => return Err(Error::InvalidParameter(format!("unknown corpus subset `{other}`"))),
        })
    }
}

/// What an entry must produce to count as passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    /// A witness that re-verifies from its serialized form.
    Witness,
    /// An honest mathematical failure, such as a violated hypothesis.
    Failure,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub problem: ProblemSpec,
    pub expect: Expect,
}

#[derive(Clone, Debug)]
pub struct EntryOutcome {
    pub name: String,
    pub passed: bool,
    pub status: String,
    pub document: Option<WitnessDocument>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct CorpusReport {
    pub subset: String,
    pub outcomes: Vec<EntryOutcome>,
}

impl CorpusReport {
    pub fn passed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.passed).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.outcomes.len()
    }

    /// Pass/fail table; contains no timings, so it is reproducible.
    pub fn summary(&self) -> String {
        let width = self.outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
        let mut s = format!("corpus {}: {} entries\n", self.subset, self.outcomes.len());
        for o in &self.outcomes {
            let mark = if o.passed { "pass" } else { "FAIL" };
            let _ = writeln!(s, "{:width$}  {mark}  {}", o.name, o.status);
        }
        let _ = writeln!(s, "passed {} / {}", self.passed(), self.outcomes.len());
        s
    }

    pub fn timing_table(&self) -> String {
        let mut s = String::new();
        for o in &self.outcomes {
            let _ = writeln!(s, "{}  {:.3} ms", o.name, o.elapsed.as_secs_f64() * 1e3);
        }
        let total: Duration = self.outcomes.iter().map(|o| o.elapsed).sum();
        let _ = writeln!(s, "total  {:.3} s", total.as_secs_f64());
        s
    }
}

fn pl_problem(
    shape: ShapeTag,
    resolution: usize,
    f: &PlTuple,
    g: &PlFunction,
    op: Operation,
    params: Params,
) -> ProblemSpec {
    ProblemSpec {
        algebra: Algebra::PlMesh,
        mesh: Some(MeshSpec::Builder { shape, resolution }),
        field: Some(g.field()),
        tuple_f: f.components().iter().map(FunctionData::from_pl).collect(),
        g: Some(FunctionData::from_pl(g)),
        operation: Some(op),
        params,
    }
}

fn seeded(seed: u64) -> Params {
    Params { seed: Some(seed), ..Params::default() }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// PL entries; `count` random instances per family in the full set.
fn pl_entries(full: bool) -> Result<Vec<CorpusEntry>> {
    let count = |quick: u64, full_n: u64| if full { full_n } else { quick };
    let interval = Arc::new(SimplicialMesh::interval(32)?);
    let torus = Arc::new(SimplicialMesh::torus(8)?);
    let mut out = Vec::new();
    let mut push = |name: String, problem: ProblemSpec, expect: Expect| out.push(CorpusEntry { name, problem, expect });

    for seed in 0..count(5, 100) {
        let (f, g) = random_pair(&interval, Field::Complex, 1, seed, true, true)?;
        let p = pl_problem(ShapeTag::Interval, 32, &f, &g, Operation::NormOne, seeded(seed));
        push(format!("norm-one/interval/seed-{seed}"), p, Expect::Witness);
    }

    let x = PlFunction::from_fn(interval.clone(), Field::Complex, |p| c(p[0], 0.0))?;
    let one_minus_x = PlFunction::from_fn(interval.clone(), Field::Complex, |p| c(1.0 - p[0], 0.0))?;
    let p = pl_problem(ShapeTag::Interval, 32, &PlTuple::single(x), &one_minus_x, Operation::NormOne, seeded(0));
    push("norm-one/boundary-zero/x".into(), p, Expect::Witness);
    for seed in 0..count(3, 50) {
        let (f, g) = random_pair(&interval, Field::Complex, 1, 500 + seed, false, true)?;
        let p = pl_problem(ShapeTag::Interval, 32, &f, &g, Operation::NormOne, seeded(seed));
        push(format!("norm-one/boundary-zero/seed-{seed}"), p, Expect::Witness);
    }

    for seed in 0..count(2, 50) {
        let (f, g) = torus_triple(&torus, seed)?;
        let p = pl_problem(ShapeTag::Torus, 8, &f, &g, Operation::NormOne, seeded(seed));
        push(format!("norm-one/torus/seed-{seed}"), p, Expect::Witness);
    }

    for eps in [0.1, 0.01, 1e-4] {
        for seed in 0..count(2, 50) {
            let (f, g) = random_pair(&interval, Field::Complex, 1, 1000 + seed, true, true)?;
            let params = Params { epsilon: Some(eps), ..seeded(seed) };
            let p = pl_problem(ShapeTag::Interval, 32, &f, &g, Operation::SmallNorm, params);
            push(format!("small-norm/eps-{eps}/seed-{seed}"), p, Expect::Witness);
        }
    }

    for seed in 0..count(3, 50) {
        let (f, g) = random_pair(&interval, Field::Complex, 1, 2000 + seed, true, true)?;
        let params = Params { epsilon: Some(0.5), ..seeded(seed) };
        let p = pl_problem(ShapeTag::Interval, 32, &f, &g, Operation::AllUnits, params);
        push(format!("all-units/seed-{seed}"), p, Expect::Witness);
    }

    for seed in 0..count(3, 50) {
        let (a, b) = unitary_pair(&interval, 1, 3000 + seed)?;
        let p = pl_problem(ShapeTag::Interval, 32, &a, &b, Operation::Unitary, seeded(seed));
        push(format!("unitary/seed-{seed}"), p, Expect::Witness);
    }

    for seed in 0..count(3, 25) {
        let (f, g) = random_pair(&interval, Field::Complex, 3, 4000 + seed, true, true)?;
        let params = Params { n: Some(1), ..seeded(seed) };
        let p = pl_problem(ShapeTag::Interval, 32, &f, &g, Operation::Stabilize, params);
        push(format!("stabilize/m-3-n-1/seed-{seed}"), p, Expect::Witness);
    }

    let (f, g) = random_pair(&interval, Field::Complex, 2, 5000, true, true)?;
    push(
        "certify/invertible".into(),
        pl_problem(ShapeTag::Interval, 32, &f, &g, Operation::Certify, Params::default()),
        Expect::Witness,
    );
    let h = PlFunction::from_fn(interval.clone(), Field::Real, |p| c(p[0] - 0.5, 0.0))?;
    let shared = vanish_at(&h, 16);
    push(
        "certify/common-zero".into(),
        pl_problem(ShapeTag::Interval, 32, &PlTuple::single(h), &shared, Operation::Certify, Params::default()),
        Expect::Failure,
    );
    Ok(out)
}

fn disk_problem(f: Vec<Vec<C64>>, g: Option<Vec<C64>>, op: Operation, params: Params) -> ProblemSpec {
    ProblemSpec {
        algebra: Algebra::Disk,
        mesh: None,
        field: None,
        tuple_f: f.into_iter().map(FunctionData::Values).collect(),
        g: g.map(FunctionData::Values),
        operation: Some(op),
        params,
    }
}

fn disk_entries() -> Vec<CorpusEntry> {
    let f = || vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(-2.0, 0.0)]];
    let g = || Some(vec![c(-0.5, 0.0), c(0.5, 0.0)]);
    let entry = |name: &str, problem, expect| CorpusEntry { name: name.into(), problem, expect };
    let y = vec![FunctionData::Values(vec![c(0.1, 0.0)]), FunctionData::Values(vec![c(0.0, -0.1)])];
    vec![
        entry("disk/certify/pair", disk_problem(f(), g(), Operation::Certify, Params::default()), Expect::Witness),
        entry(
            "disk/certify/z-alone",
            disk_problem(vec![vec![c(0.0, 0.0), c(1.0, 0.0)]], None, Operation::Certify, Params::default()),
            Expect::Failure,
        ),
        entry("disk/norm-one/y-zero", disk_problem(f(), g(), Operation::DiskNormOne, Params::default()), Expect::Witness),
        entry(
            "disk/norm-one/y-constant",
            disk_problem(f(), g(), Operation::DiskNormOne, Params { y: Some(y), ..Params::default() }),
            Expect::Witness,
        ),
        entry(
            "disk/norm-one/g-without-boundary-zero",
            disk_problem(f(), Some(vec![c(3.0, 0.0), c(1.0, 0.0)]), Operation::DiskNormOne, Params::default()),
            Expect::Failure,
        ),
        entry(
            "disk/witness-search/pair",
            disk_problem(f(), g(), Operation::DiskWitnessSearch, Params { epsilon: Some(0.4), ..Params::default() }),
            Expect::Witness,
        ),
    ]
}

pub fn entries(subset: Subset) -> Result<Vec<CorpusEntry>> {
    Ok(match subset {
        Subset::PlQuick => pl_entries(false)?,
        Subset::PlFull => pl_entries(true)?,
        Subset::Disk => disk_entries(),
        Subset::All => {
            let mut v = pl_entries(true)?;
            v.extend(disk_entries());
            v
        }
    })
}

/// Solves an entry, then re-verifies its document after a serialization
/// round trip, which must reproduce the same bytes.
pub fn run_entry(e: &CorpusEntry) -> EntryOutcome {
    let t = Instant::now();
    let (passed, status, document) = match (solve(&e.problem), e.expect) {
        (Ok(doc), Expect::Witness) => {
            let text = doc.to_json();
            match WitnessDocument::from_json(&text).and_then(|back| Ok((verify_document(&back)?, back.to_json()))) {
                Ok((v, again)) if v.passed && again == text => (true, "witness verified".to_string(), Some(doc)),
                Ok((v, again)) if again != text => (false, format!("round trip changed the document ({v:?})"), Some(doc)),
                Ok((v, _)) => {
                    let failed: Vec<_> = v.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
                    (false, format!("failed checks: {}", failed.join(", ")), Some(doc))
                }
                Err(err) => (false, format!("document rejected: {err}"), Some(doc)),
            }
        }
        (Ok(doc), Expect::Failure) => (false, "expected a failure, got a witness".into(), Some(doc)),
        (Err(err), Expect::Failure) if err.is_honest_failure() => (true, format!("failure as expected: {err}"), None),
        (Err(err), _) => (false, format!("error: {err}"), None),
    };
    EntryOutcome { name: e.name.clone(), passed, status, document, elapsed: t.elapsed() }
}

/// Runs the entries in parallel; outcomes keep the entry order.
pub fn run_corpus(subset: Subset, label: &str) -> Result<CorpusReport> {
    let outcomes = entries(subset)?.par_iter().map(run_entry).collect();
    Ok(CorpusReport { subset: label.to_string(), outcomes })
}
