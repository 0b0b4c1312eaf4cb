//! The classification pipeline: candidate enumeration, per-lattice Vinberg
//! analysis, and assembly of machine-readable reports.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::coxeter;
use crate::enumeration::{self, FrameCheck, TableEntry};
use crate::error::{Error, Result};
use crate::io;
use crate::lattice::QuadraticLattice;
use crate::vinberg::{self, RunStatus, VinbergConfig, VinbergRun};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Enumerate,
    Full,
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub stage: Stage,
    pub max_roots: usize,
    pub max_height: u64,
    pub threads: Option<usize>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            stage: Stage::Full,
            max_roots: 64,
            max_height: 1000,
            threads: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeStatus {
    OneTwoReflective,
    ReflectiveNotOneTwo,
    Inconclusive,
}

impl LatticeStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            LatticeStatus::OneTwoReflective => "ONE_TWO_REFLECTIVE",
            LatticeStatus::ReflectiveNotOneTwo => "REFLECTIVE_NOT_ONE_TWO",
            LatticeStatus::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Flat summary of one Vinberg run for reports.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub norms_restricted_to: Option<Vec<u64>>,
    pub status: RunStatus,
    pub cone_size: usize,
    pub steps: u64,
    pub roots: Vec<Vec<BigInt>>,
    pub root_norms: Vec<BigInt>,
    pub priorities: Vec<String>,
}

impl RunSummary {
    pub fn from_run(run: &VinbergRun, norms: Option<Vec<u64>>) -> Self {
        RunSummary {
            norms_restricted_to: norms,
            status: run.status,
            cone_size: run.cone_size,
            steps: run.steps,
            roots: run.roots.iter().map(|r| r.coords().to_vec()).collect(),
            root_norms: run.roots.iter().map(|r| r.norm().clone()).collect(),
            priorities: run.priorities().iter().map(|p| p.to_string()).collect(),
        }
    }
}

/// Verdict for one maximal lattice of the candidate table.
#[derive(Clone, Debug)]
pub struct LatticeVerdict {
    pub name: String,
    pub diag: [i64; 4],
    pub status: LatticeStatus,
    pub restricted: Option<RunSummary>,
    pub unrestricted: RunSummary,
    pub bad_reflections_finite: Option<bool>,
    pub diagram_dot: Option<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ClassifyReport {
    pub stage: Stage,
    pub candidate_count: usize,
    pub table: Vec<&'static TableEntry>,
    pub frame_checks: Vec<FrameCheck>,
    pub verdicts: Vec<LatticeVerdict>,
    pub one_two_reflective: Vec<String>,
    pub notes: Vec<String>,
}

/// Reference mirror sets reproduced by the default runs; used for report
/// notes and golden checks.
pub const L5_MIRRORS: [[i64; 4]; 7] = [
    [0, 0, 0, -1],
    [0, 0, -1, 1],
    [0, -1, 0, 0],
    [1, 0, 3, 0],
    [1, 1, 0, 0],
    [2, 1, 2, 2],
    [10, 6, 10, 5],
];

pub const L10_MIRRORS: [[i64; 4]; 6] = [
    [0, 0, 0, -1],
    [0, 0, -1, 0],
    [0, -1, 1, 0],
    [1, 1, 0, 0],
    [1, 0, 0, 1],
    [6, 2, 2, 3],
];

/// Alternate Gram form in circulation for the discriminant -18 entry; its
/// run does not reproduce the recorded mirrors (see verdict note).
pub const L10_ALTERNATE_DIAG: [i64; 4] = [-1, 3, 2, 2];

fn known_nonreflective_note(name: &str) -> Option<String> {
    match name {
        "L(3)" | "L(4)" | "L(6)" | "L(7)" | "L(8)" | "L(9)" => Some(format!(
            "{name} is recorded as non-reflective in external classifications \
             (A. Mark 2013; J. McLeod 2013); the bounded search reports budget \
             exhaustion rather than a proof",
        )),
        _ => None,
    }
}

fn basic_point_for(l: &QuadraticLattice) -> Vec<BigInt> {
    // the table forms are diagonal with a single negative entry first
    debug_assert!(l.gram_entry(0, 0) < &BigInt::from(0));
    let mut v = vec![BigInt::from(0); l.rank()];
    v[0] = BigInt::from(1);
    v
}

fn run_with(
    lattice: &Arc<QuadraticLattice>,
    norms: Option<Vec<u64>>,
    opts: &ClassifyOptions,
) -> Result<(VinbergRun, RunSummary)> {
    let config = VinbergConfig {
        basic_point: Some(basic_point_for(lattice)),
        allowed_norms: norms.clone().map(|v| v.into_iter().collect()),
        max_roots: opts.max_roots,
        max_height: opts.max_height,
    };
    let run = vinberg::run(lattice, &config)?;
    let summary = RunSummary::from_run(&run, norms);
    Ok((run, summary))
}

fn mirrors_match(run: &VinbergRun, expected: &[[i64; 4]]) -> bool {
    if run.roots.len() != expected.len() {
        return false;
    }
    let got: BTreeSet<Vec<BigInt>> =
        run.roots.iter().map(|r| r.coords().to_vec()).collect();
    let want: BTreeSet<Vec<BigInt>> = expected
        .iter()
        .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    got == want
}

/// Classify one table entry: an unrestricted run decides reflectivity and
/// the bad-reflection test; if it exhausts the budget, a run restricted to
/// norms {1,2} gets a chance to certify 1.2-reflectivity directly.
fn verdict_for(entry: &TableEntry, opts: &ClassifyOptions) -> Result<LatticeVerdict> {
    let lattice = enumeration::table_lattice(entry).shared();
    let mut notes = Vec::new();
    let (unres_run, unres_summary) = run_with(&lattice, None, opts)?;
    let mut restricted = None;
    let mut bad_finite = None;
    let mut diagram_dot = None;
    let status = match unres_run.status {
        RunStatus::FiniteVolume => {
            let finite = coxeter::bad_reflections_finite(&unres_run.roots)?;
            bad_finite = Some(finite);
            let diagram = coxeter::build_diagram(&unres_run.roots)?;
            diagram_dot = Some(coxeter::emit_dot(&diagram));
            if finite {
                LatticeStatus::OneTwoReflective
            } else {
                LatticeStatus::ReflectiveNotOneTwo
            }
        }
        RunStatus::BudgetExhausted => {
            let (res_run, res_summary) =
                run_with(&lattice, Some(vec![1, 2]), opts)?;
            restricted = Some(res_summary);
            match res_run.status {
                RunStatus::FiniteVolume => {
                    let diagram = coxeter::build_diagram(&res_run.roots)?;
                    diagram_dot = Some(coxeter::emit_dot(&diagram));
                    LatticeStatus::OneTwoReflective
                }
                RunStatus::BudgetExhausted => LatticeStatus::Inconclusive,
            }
        }
    };
    if let Some(note) = known_nonreflective_note(entry.name) {
        notes.push(note);
    }
    if entry.name == "L(5)" && mirrors_match(&unres_run, &L5_MIRRORS) {
        notes.push("mirror set matches the recorded seven roots".into());
    }
    if entry.name == "L(10)" {
        if mirrors_match(&unres_run, &L10_MIRRORS) {
            notes.push("mirror set matches the recorded six roots".into());
        }
        // the alternate recorded form must be run and flagged
        let alt = QuadraticLattice::diagonal(&L10_ALTERNATE_DIAG).shared();
        let (alt_run, _) = run_with(&alt, None, opts)?;
        let alt_matches = mirrors_match(&alt_run, &L10_MIRRORS);
        notes.push(format!(
            "a variant Gram form diag{:?} is also on record for this entry; its run \
             yields {} mirrors and does {}reproduce the recorded set, while \
             diag{:?} does",
            L10_ALTERNATE_DIAG,
            alt_run.roots.len(),
            if alt_matches { "" } else { "not " },
            entry.diag,
        ));
    }
    Ok(LatticeVerdict {
        name: entry.name.to_string(),
        diag: entry.diag,
        status,
        restricted,
        unrestricted: unres_summary,
        bad_reflections_finite: bad_finite,
        diagram_dot,
        notes,
    })
}

/// Run the pipeline: enumeration, table assembly and (for the full stage)
/// the per-lattice reflectivity analysis.
pub fn classify(opts: &ClassifyOptions) -> Result<ClassifyReport> {
    let candidates = enumeration::frames_to_candidates()?;
    let table = enumeration::candidate_table(&candidates)?;
    let frame_checks = enumeration::check_reference_frames()?;
    let mut notes = Vec::new();
    for check in &frame_checks {
        if let Some(note) = &check.note {
            notes.push(format!("frame {}: {}", check.index, note));
        }
    }
    let verdicts = if opts.stage == Stage::Full {
        let entries: Vec<&'static TableEntry> = table.clone();
        let compute = || -> Result<Vec<LatticeVerdict>> {
            use rayon::prelude::*;
            entries
                .par_iter()
                .map(|entry| verdict_for(entry, opts))
                .collect()
        };
        match opts.threads {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?
                .install(compute),
            None => compute(),
        }?
    } else {
        Vec::new()
    };
    let one_two_reflective = verdicts
        .iter()
        .filter(|v| v.status == LatticeStatus::OneTwoReflective)
        .map(|v| v.name.clone())
        .collect();
    Ok(ClassifyReport {
        stage: opts.stage,
        candidate_count: candidates.len(),
        table,
        frame_checks,
        verdicts,
        one_two_reflective,
        notes,
    })
}

// ---------------------------------------------------------------------------
// JSON rendering
// ---------------------------------------------------------------------------

fn coords_json(coords: &[Vec<BigInt>]) -> Value {
    Value::Array(
        coords
            .iter()
            .map(|c| Value::Array(c.iter().map(io::bigint_to_json).collect()))
            .collect(),
    )
}

pub fn run_summary_json(s: &RunSummary) -> Value {
    let mut obj = Map::new();
    obj.insert(
        "norms".into(),
        match &s.norms_restricted_to {
            Some(n) => json!(n),
            None => json!("all"),
        },
    );
    obj.insert(
        "status".into(),
        json!(match s.status {
            RunStatus::FiniteVolume => "FINITE_VOLUME",
            RunStatus::BudgetExhausted => "BUDGET_EXHAUSTED",
        }),
    );
    obj.insert("cone_size".into(), json!(s.cone_size));
    obj.insert("steps".into(), json!(s.steps));
    obj.insert("roots".into(), coords_json(&s.roots));
    obj.insert(
        "root_norms".into(),
        Value::Array(s.root_norms.iter().map(io::bigint_to_json).collect()),
    );
    obj.insert("priorities".into(), json!(s.priorities));
    Value::Object(obj)
}

pub fn verdict_json(v: &LatticeVerdict) -> Value {
    let mut obj = Map::new();
    obj.insert("name".into(), json!(v.name));
    obj.insert("gram".into(), json!(diag_gram(&v.diag)));
    obj.insert("status".into(), json!(v.status.as_str()));
    obj.insert("unrestricted_run".into(), run_summary_json(&v.unrestricted));
    if let Some(r) = &v.restricted {
        obj.insert("restricted_run".into(), run_summary_json(r));
    }
    if let Some(b) = v.bad_reflections_finite {
        obj.insert("bad_reflections_finite".into(), json!(b));
    }
    if let Some(d) = &v.diagram_dot {
        obj.insert("diagram_dot".into(), json!(d));
    }
    if !v.notes.is_empty() {
        obj.insert("notes".into(), json!(v.notes));
    }
    Value::Object(obj)
}

fn diag_gram(diag: &[i64; 4]) -> Vec<Vec<i64>> {
    (0..4)
        .map(|i| (0..4).map(|j| if i == j { diag[i] } else { 0 }).collect())
        .collect()
}

pub fn report_json(r: &ClassifyReport) -> Value {
    let table: Vec<Value> = r
        .table
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "gram": diag_gram(&e.diag),
                "invariant_factors": e.invariant_factors,
                "discriminant": e.discriminant,
            })
        })
        .collect();
    let frames: Vec<Value> = r
        .frame_checks
        .iter()
        .map(|c| {
            let mut obj = Map::new();
            obj.insert("index".into(), json!(c.index));
            obj.insert("det".into(), io::bigint_to_json(&c.det_computed));
            obj.insert("det_recorded".into(), json!(c.det_recorded));
            obj.insert("det_matches".into(), json!(c.det_matches));
            obj.insert(
                "maximal_form".into(),
                json!(c.maximal_form_computed.unwrap_or("?")),
            );
            obj.insert("maximal_form_recorded".into(), json!(c.maximal_form_recorded));
            obj.insert("claim_consistent".into(), json!(c.claim_consistent));
            if let Some(n) = &c.note {
                obj.insert("note".into(), json!(n));
            }
            Value::Object(obj)
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert(
        "stage".into(),
        json!(match r.stage {
            Stage::Enumerate => "enumerate",
            Stage::Full => "full",
        }),
    );
    obj.insert("candidate_count".into(), json!(r.candidate_count));
    obj.insert("table".into(), Value::Array(table));
    obj.insert("frame_checks".into(), Value::Array(frames));
    obj.insert(
        "verdicts".into(),
        Value::Array(r.verdicts.iter().map(verdict_json).collect()),
    );
    obj.insert("one_two_reflective".into(), json!(r.one_two_reflective));
    if !r.notes.is_empty() {
        obj.insert("notes".into(), json!(r.notes));
    }
    Value::Object(obj)
}

/// The stable subset of the report compared by `classify --check`.
pub fn check_summary_json(r: &ClassifyReport) -> Value {
    let statuses: Map<String, Value> = r
        .verdicts
        .iter()
        .map(|v| (v.name.clone(), json!(v.status.as_str())))
        .collect();
    let mirrors: Map<String, Value> = r
        .verdicts
        .iter()
        .filter(|v| v.name == "L(5)" || v.name == "L(10)")
        .map(|v| {
            (
                v.name.clone(),
                coords_json(&v.unrestricted.roots),
            )
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "table": r.table.iter().map(|e| json!({
            "name": e.name,
            "invariant_factors": e.invariant_factors,
            "discriminant": e.discriminant,
        })).collect::<Vec<Value>>(),
        "frame_dets": r.frame_checks.iter().map(|c| json!(c.det_recorded)).collect::<Vec<Value>>(),
        "frame_claims_consistent": r.frame_checks.iter().map(|c| json!(c.claim_consistent)).collect::<Vec<Value>>(),
        "statuses": statuses,
        "one_two_reflective": r.one_two_reflective,
        "mirrors": mirrors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_stage_produces_table_only() {
        let opts = ClassifyOptions { stage: Stage::Enumerate, ..Default::default() };
        let report = classify(&opts).unwrap();
        assert_eq!(report.table.len(), 10);
        assert!(report.verdicts.is_empty());
        let json = report_json(&report);
        assert_eq!(json["schema_version"], 1);
        assert_eq!(json["table"].as_array().unwrap().len(), 10);
    }

    #[test]
    fn enumerate_stage_is_deterministic() {
        let opts = ClassifyOptions { stage: Stage::Enumerate, ..Default::default() };
        let a = serde_json::to_string(&report_json(&classify(&opts).unwrap())).unwrap();
        let b = serde_json::to_string(&report_json(&classify(&opts).unwrap())).unwrap();
        assert_eq!(a, b);
    }
}
