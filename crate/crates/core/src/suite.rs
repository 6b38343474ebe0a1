//! Property suites run over generated or supplied cases, with a
//! machine-readable report.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::blocks::{block_oracle, minimal_m};
use crate::dmod::{dual, dual_window, expand, find_core_isomorphism, v_filtration_formula, v_filtration_oracle, CoreData};
use crate::dmod::double_dual_witness;
use crate::error::{Error, Result};
use crate::filtration::{check_relative_monodromy, IncreasingFiltration};
use crate::format::{to_value, Document};
use crate::fourier::fourier_oracle;
use crate::generate::{generate_case, GeneratorConfig};
use crate::gluing::{functor_f, functor_g, roundtrip_gluing, validate_gluing, GluingDatum};
use crate::linalg::Matrix;
use crate::mhm::MonodromicMhm;

/// Window half-widths used by the suites.
pub const VFILT_WINDOW: u32 = 2;
pub const SPECIALIZE_WINDOW: u32 = 3;
pub const FOURIER_WINDOW: u32 = 2;
pub const DUAL_WINDOW: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Roundtrip,
    Specialize,
    Vfilt,
    Arashi,
    Blocks,
    Fourier,
    Dual,
    All,
}

impl SuiteName {
    pub const EACH: [SuiteName; 7] = [
        SuiteName::Roundtrip,
        SuiteName::Specialize,
        SuiteName::Vfilt,
        SuiteName::Arashi,
        SuiteName::Blocks,
        SuiteName::Fourier,
        SuiteName::Dual,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Roundtrip => "roundtrip",
            SuiteName::Specialize => "specialize",
            SuiteName::Vfilt => "vfilt",
            SuiteName::Arashi => "arashi",
            SuiteName::Blocks => "blocks",
            SuiteName::Fourier => "fourier",
            SuiteName::Dual => "dual",
            SuiteName::All => "all",
        }
    }

    fn members(self) -> Vec<SuiteName> {
        if self == SuiteName::All {
            Self::EACH.to_vec()
        } else {
            vec![self]
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::EACH
            .iter()
            .chain([SuiteName::All].iter())
            .find(|n| n.as_str() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub suite: SuiteName,
    pub index: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    /// The input document, echoed on failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub seed: Option<u64>,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
    pub wall_time_ms: f64,
    pub results: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.results.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

type Check = std::result::Result<(), String>;

fn joined(problems: Vec<String>) -> Check {
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems.join("; "))
    }
}

/// The gluing datum behind a document; core documents carry no filtrations.
pub fn gluing_of(doc: &Document) -> std::result::Result<GluingDatum, String> {
    match doc {
        Document::Gluing(g) => {
            let problems = validate_gluing(g);
            if problems.is_empty() {
                Ok(g.clone())
            } else {
                Err(format!("invalid gluing datum: {}", problems.join("; ")))
            }
        }
        Document::Mmhm(m) => functor_f(m).map_err(|e| e.to_string()),
        Document::Core(_) => Err("a core document carries no Hodge data".to_string()),
    }
}

pub fn module_of(doc: &Document) -> std::result::Result<MonodromicMhm, String> {
    match doc {
        Document::Mmhm(m) => {
            let problems = m.validate();
            if problems.is_empty() {
                Ok(m.clone())
            } else {
                Err(format!("invalid module: {}", problems.join("; ")))
            }
        }
        _ => functor_g(&gluing_of(doc)?).map_err(|e| e.to_string()),
    }
}

pub fn core_of(doc: &Document) -> std::result::Result<CoreData, String> {
    match doc {
        Document::Core(c) => {
            let problems = c.validate();
            if problems.is_empty() {
                Ok(c.clone())
            } else {
                Err(format!("invalid core: {}", problems.join("; ")))
            }
        }
        _ => Ok(module_of(doc)?.core),
    }
}

fn check_roundtrip(doc: &Document) -> Check {
    roundtrip_gluing(&gluing_of(doc)?).map(|_| ())
}

fn check_specialize(doc: &Document) -> Check {
    let m = module_of(doc)?;
    let fw = m.propagate_filtration(SPECIALIZE_WINDOW).map_err(|e| e.to_string())?;
    let mut problems = fw.check_specializable();
    problems.extend(fw.check_decomposition(&m));
    joined(problems)
}

fn check_vfilt(doc: &Document) -> Check {
    let core = core_of(doc)?;
    let win = expand(&core, VFILT_WINDOW).map_err(|e| e.to_string())?;
    let oracle = v_filtration_oracle(&win).map_err(|e| e.to_string())?;
    if oracle == v_filtration_formula(&win) {
        Ok(())
    } else {
        Err("axiom oracle and direct-sum formula disagree".to_string())
    }
}

fn relative_monodromy(label: &str, n: &Matrix, w: &IncreasingFiltration, out: &mut Vec<String>) {
    match check_relative_monodromy(n, w, w) {
        Ok(r) if r.ok => {}
        Ok(r) => out.push(format!("{label}: relative monodromy fails at {:?}", r.failure)),
        Err(e) => out.push(format!("{label}: {e}")),
    }
}

fn check_arashi(doc: &Document) -> Check {
    let g = gluing_of(doc)?;
    let mut problems = Vec::new();
    for (a, c) in &g.psi.components {
        relative_monodromy(&format!("psi at alpha {a}"), &c.n, &c.filt.w, &mut problems);
    }
    relative_monodromy("phi", &g.phi_n(), &g.phi.w, &mut problems);
    // on the glued module, t∂ - α lowers the weight by two
    let m = functor_g(&g).map_err(|e| e.to_string())?;
    for (a, n) in m.core.components() {
        if !IncreasingFiltration::is_filtered(n, &m.filtration(a).w, &m.filtration(a).w, -2) {
            problems.push(format!("N W_k ⊄ W_(k-2) on the module at alpha {a}"));
        }
    }
    joined(problems)
}

fn check_blocks(doc: &Document) -> Check {
    let psi = gluing_of(doc)?.psi;
    block_oracle(&psi, minimal_m(&psi))
        .map_err(|e| e.to_string())
        .and_then(joined)
}

fn check_fourier(doc: &Document, seed: u64) -> Check {
    let m = module_of(doc)?;
    fourier_oracle(&m, FOURIER_WINDOW, seed)
        .map_err(|e| e.to_string())
        .and_then(joined)
}

fn check_dual(doc: &Document, seed: u64) -> Check {
    let core = core_of(doc)?;
    let d = dual(&core).map_err(|e| e.to_string())?;
    let win = expand(&core, DUAL_WINDOW).map_err(|e| e.to_string())?;
    let brute = dual_window(&win).to_core().map_err(|e| e.to_string())?;
    let mut problems = Vec::new();
    if find_core_isomorphism(&brute, &d, seed).is_none() {
        problems.push("dual differs from the transposed window".to_string());
    }
    let dd = dual(&d).map_err(|e| e.to_string())?;
    if !double_dual_witness(&core).is_isomorphism(&core, &dd) {
        problems.push("double dual witness is not an isomorphism".to_string());
    }
    joined(problems)
}

/// Runs one suite's check on one document.
pub fn check_case(suite: SuiteName, doc: &Document, seed: u64) -> Check {
    match suite {
        SuiteName::Roundtrip => check_roundtrip(doc),
        SuiteName::Specialize => check_specialize(doc),
        SuiteName::Vfilt => check_vfilt(doc),
        SuiteName::Arashi => check_arashi(doc),
        SuiteName::Blocks => check_blocks(doc),
        SuiteName::Fourier => check_fourier(doc, seed),
        SuiteName::Dual => check_dual(doc, seed),
        SuiteName::All => SuiteName::EACH.iter().try_for_each(|s| check_case(*s, doc, seed)),
    }
}

fn run_cases(name: SuiteName, docs: &[Document], seed: Option<u64>) -> SuiteReport {
    let start = Instant::now();
    let jobs: Vec<(SuiteName, usize)> = name
        .members()
        .into_iter()
        .flat_map(|s| (0..docs.len()).map(move |i| (s, i)))
        .collect();
    let results: Vec<CaseResult> = jobs
        .par_iter()
        .map(|&(suite, index)| {
            let t = Instant::now();
            let doc = &docs[index];
            let outcome = check_case(suite, doc, seed.unwrap_or(0) ^ index as u64);
            let wall_time_ms = t.elapsed().as_secs_f64() * 1e3;
            match outcome {
                Ok(()) => CaseResult {
                    suite,
                    index,
                    pass: true,
                    message: None,
                    counterexample: None,
                    wall_time_ms,
                },
                Err(message) => CaseResult {
                    suite,
                    index,
                    pass: false,
                    message: Some(message),
                    counterexample: Some(to_value(doc)),
                    wall_time_ms,
                },
            }
        })
        .collect();
    let failed = results.iter().filter(|r| !r.pass).count();
    SuiteReport {
        suite: name,
        seed,
        cases: docs.len(),
        passed: results.len() - failed,
        failed,
        pass: failed == 0,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        results,
    }
}

/// Generates `cfg.case_count` cases from `cfg.seed` and runs the suite.
pub fn run_suite(name: SuiteName, cfg: &GeneratorConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let docs: Vec<Document> = (0..cfg.case_count as u64)
        .into_par_iter()
        .map(|i| Document::Gluing(generate_case(cfg, i)))
        .collect();
    Ok(run_cases(name, &docs, Some(cfg.seed)))
}

/// Runs the suite on supplied documents.
pub fn run_suite_on(name: SuiteName, docs: &[Document]) -> SuiteReport {
    run_cases(name, docs, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_parse() {
        for s in SuiteName::EACH {
            assert_eq!(s.as_str().parse::<SuiteName>().unwrap(), s);
        }
        assert_eq!("all".parse::<SuiteName>().unwrap(), SuiteName::All);
        assert!(matches!("nope".parse::<SuiteName>(), Err(Error::Config(_))));
    }

    #[test]
    fn empty_case_set_passes() {
        let cfg = GeneratorConfig {
            case_count: 0,
            ..GeneratorConfig::default()
        };
        let report = run_suite(SuiteName::All, &cfg).unwrap();
        assert!(report.pass);
        assert_eq!(report.cases, 0);
    }

    #[test]
    fn small_run_of_everything() {
        let cfg = GeneratorConfig {
            case_count: 8,
            max_dim: 4,
            ..GeneratorConfig::default()
        };
        let report = run_suite(SuiteName::All, &cfg).unwrap();
        let failures: Vec<_> = report.failures().collect();
        assert!(failures.is_empty(), "{failures:#?}");
        assert_eq!(report.results.len(), 8 * SuiteName::EACH.len());
    }

    #[test]
    fn corrupted_datum_fails_with_echo() {
        // nonzero N_0 but no vanishing cycles, so v·c = 0 ≠ -N_0
        let doc = Document::Gluing(GluingDatum::from_psi(crate::blocks::l_block(2)));
        let report = run_suite_on(SuiteName::Roundtrip, std::slice::from_ref(&doc));
        assert!(!report.pass);
        assert_eq!(report.results[0].counterexample, Some(to_value(&doc)));
    }
}
