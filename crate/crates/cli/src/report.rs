//! Serializable report shapes shared by every subcommand.
//!
//! Reports must be byte-identical across runs with the same inputs, so
//! everything here serializes in declaration order, group elements are
//! walked in table order, and no map type with nondeterministic iteration
//! appears anywhere.

use serde::Serialize;
use unicoh_core::cohomology::{Cochain2Abelian, Cocycle1};
use unicoh_core::indexsets::ConvexSet;
use unicoh_core::unipotent::PartialMatrix;
use unicoh_core::verify::SuiteReport;

/// Top-level wrapper around every JSON report.
#[derive(Serialize)]
pub struct Envelope<R: Serialize> {
    pub schema: u32,
    pub command: &'static str,
    pub seed: u64,
    pub params: serde_json::Value,
    pub result: R,
}

pub fn strict_pairs(set: &ConvexSet) -> Vec<[u8; 2]> {
    set.strict_pairs().iter().map(|&(i, j)| [i, j]).collect()
}

/// One level of a filtration chain, annotated against its predecessor.
#[derive(Serialize)]
pub struct ChainLevel {
    pub t: u32,
    pub pairs: Vec<[u8; 2]>,
    pub full: bool,
    pub strict_over_previous: bool,
}

#[derive(Serialize)]
pub struct SetsResult {
    pub n: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub letter: Option<String>,
    pub z: Vec<u8>,
    pub runs: Vec<[u8; 2]>,
    pub one_exception: Vec<[u8; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_word: Option<Vec<[u8; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub requested: Option<ChainLevel>,
    pub chain: Vec<ChainLevel>,
}

#[derive(Serialize)]
pub struct SuiteOut {
    pub name: String,
    pub configs: u64,
    pub checks: u64,
    pub failures: u64,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl From<&SuiteReport> for SuiteOut {
    fn from(r: &SuiteReport) -> SuiteOut {
        SuiteOut {
            name: r.name.to_string(),
            configs: r.configs,
            checks: r.checks,
            failures: r.failures,
            passed: r.passed(),
            notes: r.notes.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct VerifyResult {
    pub suite: String,
    pub passed: bool,
    pub reports: Vec<SuiteOut>,
}

#[derive(Serialize)]
pub struct SteinbergResult {
    pub q: u64,
    pub m: u64,
    pub z: u64,
    pub base_level: u32,
    pub factor: u32,
    pub level: u32,
    pub verdict: &'static str,
    pub cup_zero: bool,
    pub elements: Vec<String>,
    pub witness: Vec<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cup: Option<Vec<Vec<Vec<u64>>>>,
}

#[derive(Serialize)]
pub struct MatrixEntry {
    pub i: u8,
    pub j: u8,
    pub value: u64,
}

#[derive(Serialize)]
pub struct ElementEntries {
    pub element: String,
    pub entries: Vec<MatrixEntry>,
}

#[derive(Serialize)]
pub struct LiftCocycle {
    pub support: Vec<[u8; 2]>,
    pub entries: Vec<ElementEntries>,
}

#[derive(Serialize)]
pub struct LiftResult {
    pub word: String,
    pub q: u64,
    pub m: u64,
    pub z: u64,
    pub variant: &'static str,
    pub verdict: &'static str,
    pub k: u32,
    pub elements: Vec<String>,
    pub chi: Vec<u64>,
    pub targets: Vec<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<LiftCocycle>,
}

#[derive(Serialize)]
pub struct MasseyResult {
    pub group: String,
    pub m: u64,
    pub n: u8,
    pub elements: Vec<String>,
    pub chi: Vec<u64>,
    pub corner: Vec<u64>,
    pub identity_holds: bool,
    pub class_zero: bool,
    pub verdict: &'static str,
    pub cup_sum: Vec<Vec<Vec<u64>>>,
    pub corner_coboundary: Vec<Vec<Vec<u64>>>,
    pub obstruction: Vec<Vec<Vec<u64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lift: Option<Vec<ElementEntries>>,
}

pub fn matrix_entries(mat: &PartialMatrix) -> Vec<MatrixEntry> {
    mat.support()
        .strict_pairs()
        .iter()
        .map(|&(i, j)| MatrixEntry { i, j, value: mat.entry(i, j).expect("pair in support") })
        .collect()
}

pub fn cocycle_entries(c: &Cocycle1) -> Vec<ElementEntries> {
    let group = c.group();
    group
        .elements()
        .map(|g| ElementEntries {
            element: group.label(g).to_string(),
            entries: matrix_entries(c.value(g)),
        })
        .collect()
}

/// Full o x o table of slice values, rows indexed by g, columns by h.
pub fn cochain_table(c: &Cochain2Abelian) -> Vec<Vec<Vec<u64>>> {
    let group = c.group();
    group.elements().map(|g| group.elements().map(|h| c.value(g, h).to_vec()).collect()).collect()
}

pub fn element_labels(group: &unicoh_core::cohomology::FiniteGroup) -> Vec<String> {
    group.elements().map(|g| group.label(g).to_string()).collect()
}

pub fn pair_brace(pairs: &[[u8; 2]]) -> String {
    if pairs.is_empty() {
        return "{}".to_string();
    }
    let body: Vec<String> = pairs.iter().map(|p| format!("({},{})", p[0], p[1])).collect();
    format!("{{{}}}", body.join(", "))
}

pub fn vec_brace(v: &[u64]) -> String {
    let body: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", body.join(", "))
}
