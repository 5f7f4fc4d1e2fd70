//! Machine-readable encoding of every classified case — configuration data,
//! applicable characteristics, expected invariants — and a regression runner
//! comparing computed invariants against the tables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::{ConfigSpec, TowerSpec};
use crate::exactalg::AlgError;
use crate::negcurves::{ade_type, effective_negative, parse_ade};
use crate::vectorfields::{
    family_tangent_dim, smoothness_verdict, verify_family, SmoothVerdict, StabFamily,
};

/// Expected invariants of a case, mirroring the table columns.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Expected {
    pub ade: String,
    pub lines: usize,
    pub h0: usize,
    pub smooth: bool,
    pub family: StabFamily,
    pub moduli: String,
}

/// One classified case.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseRecord {
    pub id: String,
    pub char_constraint: String,
    pub towers: Vec<TowerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_exclusions: Option<Vec<i64>>,
    pub expected: Expected,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

/// A secondary construction of an existing case; its computed invariants must
/// agree with the primary's expectations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AltRecord {
    pub id: String,
    pub alt_of: String,
    pub char_constraint: String,
    pub towers: Vec<TowerSpec>,
}

/// Static metadata for the two degree-8 surfaces that are not blow-ups of
/// the plane; never computed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StaticRecord {
    pub id: String,
    pub ade: String,
    pub lines: usize,
    pub h0: usize,
    pub smooth: bool,
    pub aut: String,
    pub char_constraint: String,
}

const TABLE1: &str = include_str!("data/table1.json");
const TABLE2: &str = include_str!("data/table2.json");
const TABLE3: &str = include_str!("data/table3.json");
const TABLE4: &str = include_str!("data/table4.json");
const TABLE5: &str = include_str!("data/table5.json");
const TABLE6: &str = include_str!("data/table6.json");
const ALTERNATES: &str = include_str!("data/alternates.json");

/// All case records, tables concatenated, sorted by id.
pub fn all_records() -> Vec<CaseRecord> {
    let mut out: Vec<CaseRecord> = Vec::new();
    for src in [TABLE1, TABLE3, TABLE4, TABLE5, TABLE6] {
        let mut v: Vec<CaseRecord> = serde_json::from_str(src).expect("corpus data parses");
        out.append(&mut v);
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

pub fn alternate_records() -> Vec<AltRecord> {
    serde_json::from_str(ALTERNATES).expect("alternates parse")
}

pub fn static_records() -> Vec<StaticRecord> {
    serde_json::from_str(TABLE2).expect("static table parses")
}

/// Does the characteristic constraint admit p?
pub fn constraint_admits(cc: &str, p: u64) -> bool {
    match cc {
        "any" => true,
        "=2" => p == 2,
        "=3" => p == 3,
        "!=2" => p != 2,
        "!=3" => p != 3,
        "!=2,3" => p != 2 && p != 3,
        _ => false,
    }
}

/// Admissible α values for the given characteristic and exclusion set, in the
/// deterministic order 1, 2, 3, 4, 0 within the prime field, then the two
/// non-prime elements of 𝔽_{p²}. Returns (extension, value-string) pairs.
pub fn alpha_candidates(p: u64, exclusions: &[i64]) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let excluded = |v: i64| -> bool {
        exclusions.iter().any(|&e| {
            if p == 0 {
                e == v
            } else {
                e.rem_euclid(p as i64) == v.rem_euclid(p as i64)
            }
        })
    };
    for v in [1i64, 2, 3, 4, 0] {
        if p > 0 && (v as u64) >= p {
            continue;
        }
        if !excluded(v) {
            out.push((1, v.to_string()));
        }
    }
    if p > 0 {
        // exclusions are prime-field elements, so proper extension elements
        // are always admissible
        out.push((2, "t".to_string()));
        out.push((2, "t+1".to_string()));
    }
    out
}

/// A case instantiated at a characteristic: the config spec with α chosen.
#[derive(Clone, Debug)]
pub struct InstantiatedCase {
    pub record: CaseRecord,
    pub p: u64,
    pub spec: ConfigSpec,
    pub alpha: Option<String>,
}

fn needs_alpha(towers: &[TowerSpec]) -> bool {
    towers.iter().any(|t| t.carrier.as_deref().is_some_and(|c| c.contains('a')))
}

pub fn instantiate(rec: &CaseRecord, p: u64) -> Result<InstantiatedCase, AlgError> {
    instantiate_with(rec, p, 0)
}

/// Instantiate with the `which`-th admissible α (0 = default).
pub fn instantiate_with(
    rec: &CaseRecord,
    p: u64,
    which: usize,
) -> Result<InstantiatedCase, AlgError> {
    let mut params = std::collections::BTreeMap::new();
    let mut extension = 1;
    let mut alpha = None;
    if needs_alpha(&rec.towers) {
        let excl = rec.alpha_exclusions.clone().unwrap_or_default();
        let cands = alpha_candidates(p, &excl);
        let (ext, val) = cands
            .get(which)
            .ok_or_else(|| AlgError::Invalid(format!("no admissible α for {} at p={}", rec.id, p)))?
            .clone();
        extension = ext;
        alpha = Some(val.clone());
        params.insert("a".to_string(), val);
    }
    let spec = ConfigSpec {
        characteristic: p,
        extension,
        towers: rec.towers.clone(),
        params,
        expected: None,
    };
    Ok(InstantiatedCase { record: rec.clone(), p, spec, alpha })
}

/// All cases admitted at characteristic p (p ∈ {0,2,3,5}; 5 stands in for
/// "generic positive"), α instantiated to the default admissible value.
pub fn load_corpus(p: u64) -> Result<Vec<InstantiatedCase>, AlgError> {
    if ![0, 2, 3, 5].contains(&p) {
        return Err(AlgError::Invalid(format!("characteristic {} not in {{0,2,3,5}}", p)));
    }
    all_records()
        .iter()
        .filter(|r| constraint_admits(&r.char_constraint, p))
        .map(|r| instantiate(r, p))
        .collect()
}

/// Default field sizes for the point-count probe: the two smallest powers of
/// p that contain the coordinate field, capped at 27 for prime-field configs.
pub fn default_qs(p: u64, extension: usize) -> Vec<u64> {
    match (p, extension) {
        (2, 1) => vec![4, 8],
        (2, 2) => vec![4, 16],
        (3, 1) => vec![9, 27],
        (3, 2) => vec![9, 81],
        (5, 1) => vec![5, 25],
        _ => vec![p.pow(extension as u32), p.pow(2 * extension as u32)],
    }
}

/// Computed invariants and their comparison against the expectations.
#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub id: String,
    pub p: u64,
    pub alpha: Option<String>,
    pub ade: String,
    pub lines: usize,
    pub h0: usize,
    pub smooth: Option<SmoothVerdict>,
    pub family_verified: Option<bool>,
    pub family_tangent_dim: Option<usize>,
    pub point_counts: Vec<(u64, u64)>,
    pub diffs: Vec<String>,
}

impl CaseReport {
    pub fn pass(&self) -> bool {
        self.diffs.is_empty()
    }
}

/// What the runner should compute beyond the curve configuration.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// run the finite-field point-count probe and the smoothness verdict
    pub point_counts: bool,
    /// verify the table family symbolically and compare tangent dimensions
    pub families: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { point_counts: true, families: true }
    }
}

/// Run one case: negative curves, ADE type, line count, h⁰, smoothness, and
/// the family checks, diffed against the expectations.
pub fn run_case(inst: &InstantiatedCase, opts: RunOptions) -> Result<CaseReport, AlgError> {
    let exp = &inst.record.expected;
    let mut diffs = Vec::new();
    let cfg = inst.spec.build().map_err(|e| {
        AlgError::Invalid(format!("corpus-encoding bug in {}: {}", inst.record.id, e))
    })?;
    let set = effective_negative(&cfg)?;
    let ade = ade_type(&set)?;
    if parse_ade(&ade)? != parse_ade(&exp.ade)? {
        diffs.push(format!("ade: computed {} expected {}", ade, exp.ade));
    }
    let lines = set.one_curves.len();
    if lines != exp.lines {
        diffs.push(format!("lines: computed {} expected {}", lines, exp.lines));
    }
    let h0 = crate::vectorfields::h0_vector_fields(&cfg)?;
    if h0 != exp.h0 {
        diffs.push(format!("h0: computed {} expected {}", h0, exp.h0));
    }
    let mut smooth = None;
    let mut point_counts = Vec::new();
    if opts.point_counts {
        let qs = default_qs(inst.p, inst.spec.extension);
        let report = if inst.p == 0 {
            smoothness_verdict(&cfg, &[])?
        } else {
            smoothness_verdict(&cfg, &qs)?
        };
        point_counts = report.point_counts.clone();
        smooth = Some(report.smooth);
        let expected_verdict =
            if exp.smooth { SmoothVerdict::Smooth } else { SmoothVerdict::NonReduced };
        if report.smooth != expected_verdict {
            diffs.push(format!(
                "smooth: computed {:?} expected {:?}",
                report.smooth, expected_verdict
            ));
        }
        if report.h0 != h0 {
            diffs.push("h0 mismatch between runs".to_string());
        }
    }
    let mut family_verified = None;
    let mut family_dim = None;
    if opts.families {
        let ok = verify_family(&cfg, &exp.family)?;
        family_verified = Some(ok);
        if !ok {
            diffs.push("family: symbolic verification failed".to_string());
        }
        let dim = family_tangent_dim(&exp.family, inst.p)?;
        family_dim = Some(dim);
        if dim != exp.h0 {
            diffs.push(format!("family tangent dim {} ≠ h0 column {}", dim, exp.h0));
        }
    }
    Ok(CaseReport {
        id: inst.record.id.clone(),
        p: inst.p,
        alpha: inst.alpha.clone(),
        ade,
        lines,
        h0,
        smooth,
        family_verified,
        family_tangent_dim: family_dim,
        point_counts,
        diffs,
    })
}

/// Summary of a full corpus run.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub p: u64,
    pub cases: Vec<CaseReport>,
    pub passed: usize,
    pub failed: usize,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    /// Aligned text table mirroring the classification layout.
    pub fn text_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<6} {:<12} {:>6} {:>4} {:<12} {:<8} {}\n",
            "case", "(-2)-curves", "lines", "h0", "smooth", "alpha", "result"
        ));
        for c in &self.cases {
            let smooth = match c.smooth {
                Some(SmoothVerdict::Smooth) => "smooth",
                Some(SmoothVerdict::NonReduced) => "non-reduced",
                Some(SmoothVerdict::Undetermined) => "undetermined",
                None => "-",
            };
            out.push_str(&format!(
                "{:<6} {:<12} {:>6} {:>4} {:<12} {:<8} {}\n",
                c.id,
                c.ade,
                c.lines,
                c.h0,
                smooth,
                c.alpha.as_deref().unwrap_or("-"),
                if c.pass() { "pass" } else { "FAIL" }
            ));
            for d in &c.diffs {
                out.push_str(&format!("       ! {}\n", d));
            }
        }
        out.push_str(&format!("{} passed, {} failed of {}\n", self.passed, self.failed, self.cases.len()));
        out
    }
}

/// Run every case admitted at p, in parallel, reports merged in case order.
pub fn run_all(p: u64, opts: RunOptions) -> Result<RunReport, AlgError> {
    let insts = load_corpus(p)?;
    let mut cases: Vec<CaseReport> = insts
        .par_iter()
        .map(|inst| run_case(inst, opts))
        .collect::<Result<Vec<_>, _>>()?;
    cases.sort_by(|a, b| a.id.cmp(&b.id));
    let passed = cases.iter().filter(|c| c.pass()).count();
    let failed = cases.len() - passed;
    Ok(RunReport { p, cases, passed, failed })
}

/// The boundary degrees below which non-reduced automorphism schemes occur:
/// none for p ∉ {2,3}, degree ≤ 3 for p = 3, degree ≤ 4 for p = 2. Returns
/// the verdict together with the largest degree carrying a non-reduced case.
pub fn corollary_check(p: u64, report: &RunReport) -> (bool, Option<i64>) {
    let mut boundary: Option<i64> = None;
    for c in &report.cases {
        if c.smooth == Some(SmoothVerdict::NonReduced) {
            // the degree is the leading digit of the case id
            let degree: i64 = c.id[..1].parse().unwrap_or(0);
            boundary = Some(boundary.map_or(degree, |m: i64| m.max(degree)));
        }
    }
    let ok = match p {
        2 => boundary == Some(4),
        3 => boundary == Some(3),
        _ => boundary.is_none(),
    };
    (ok, boundary)
}
