//! Times both analyzers over a matrix of generated contracts and clients.
//!
//! BFA timings exclude parsing; DFA timings include contract expansion,
//! which that approach cannot skip.

use std::io::Write;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use tsa_core::analysis::{analyze_program, dfa_analyze_program};
use tsa_core::automata::DEFAULT_STATE_LIMIT;
use tsa_core::frontend::{parse_program, Program};
use tsa_core::{AnalysisError, AutomatonError, FrontendError};

use crate::client_gen::{gen_client, GeneratedClient};
use crate::contract_gen::{gen_contract, GeneratedContract};
use crate::spec::{MatrixCell, SpecError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("generated program does not parse: {0}")]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Analyzer {
    Bfa,
    Dfa,
}

/// One CSV row. `run` is the 1-based timed run, or `median`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub contract_id: String,
    pub methods: usize,
    pub states_min: Option<usize>,
    pub annotations_bfa: usize,
    pub annotations_dfa: Option<usize>,
    pub loc: usize,
    pub base_classes: usize,
    pub analyzer: Analyzer,
    pub run: String,
    /// Empty when the DFA analyzer hit the state limit.
    pub wall_ms: Option<f64>,
    /// Warning count, or `StateExplosionLimit`.
    pub warnings: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UsabilityRow {
    pub contract_id: String,
    pub methods: usize,
    pub states_min: Option<usize>,
    pub bfa_terms: usize,
    pub dfa_terms: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub usability: Vec<UsabilityRow>,
}

impl BenchReport {
    /// Median wall time of one cell and analyzer.
    pub fn median_ms(&self, contract_id: &str, analyzer: Analyzer) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.contract_id == contract_id && r.analyzer == analyzer && r.run == "median")
            .and_then(|r| r.wall_ms)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), BenchError> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// The annotation-count table as aligned text.
    pub fn usability_table(&self) -> String {
        let show = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
        let mut out = format!(
            "{:<16} {:>7} {:>7} {:>9} {:>9}\n",
            "contract", "methods", "states", "bfa_terms", "dfa_terms"
        );
        for u in &self.usability {
            out.push_str(&format!(
                "{:<16} {:>7} {:>7} {:>9} {:>9}\n",
                u.contract_id,
                u.methods,
                show(u.states_min),
                u.bfa_terms,
                show(u.dfa_terms)
            ));
        }
        out
    }
}

/// The base classes of a cell: one contract per base class, all of the
/// same shape.
pub fn cell_contracts(cell: &MatrixCell) -> Result<Vec<GeneratedContract>, SpecError> {
    (0..cell.client.num_base_classes)
        .map(|i| gen_contract(&cell.contract, &format!("B{i}")))
        .collect()
}

pub fn cell_program(cell: &MatrixCell) -> Result<(Vec<GeneratedContract>, GeneratedClient, String), SpecError> {
    let contracts = cell_contracts(cell)?;
    let client = gen_client(&cell.client, &contracts)?;
    let text = client.program_text(&contracts);
    Ok((contracts, client, text))
}

/// Shortest total time one timed run should cover; faster analyses are
/// repeated and averaged.
const MIN_RUN: Duration = Duration::from_millis(100);

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// One warmup, then `runs` timed runs. Each run repeats the analysis
/// enough times to cover [`MIN_RUN`] and reports the mean per analysis.
fn time_runs<F>(runs: usize, mut analyze: F) -> Result<(Vec<f64>, usize), AnalysisError>
where
    F: FnMut() -> Result<usize, AnalysisError>,
{
    let start = Instant::now();
    let warnings = analyze()?;
    let once = start.elapsed();
    let reps = if once >= MIN_RUN {
        1
    } else {
        (MIN_RUN.as_secs_f64() / once.as_secs_f64().max(1e-7)).ceil() as usize
    };
    let mut times = Vec::with_capacity(runs);
    for _ in 0..runs {
        let start = Instant::now();
        for _ in 0..reps {
            std::hint::black_box(analyze()?);
        }
        times.push(start.elapsed().as_secs_f64() * 1000.0 / reps as f64);
    }
    Ok((times, warnings))
}

fn time_cell(cell: &MatrixCell, program: &Program, report: &mut BenchReport, base: BenchRow) -> Result<(), BenchError> {
    let (bfa, bfa_warnings) = time_runs(cell.runs, || Ok(analyze_program(program)?.len()))?;
    let dfa = time_runs(cell.runs, || Ok(dfa_analyze_program(program, DEFAULT_STATE_LIMIT)?.len()));
    let mut push = |analyzer, run: String, wall_ms, warnings: String| {
        report.rows.push(BenchRow {
            analyzer,
            run,
            wall_ms,
            warnings,
            ..base.clone()
        });
    };
    for (i, t) in bfa.iter().enumerate() {
        push(Analyzer::Bfa, (i + 1).to_string(), Some(*t), bfa_warnings.to_string());
    }
    push(Analyzer::Bfa, "median".into(), Some(median(&bfa)), bfa_warnings.to_string());
    match dfa {
        Ok((times, warnings)) => {
            for (i, t) in times.iter().enumerate() {
                push(Analyzer::Dfa, (i + 1).to_string(), Some(*t), warnings.to_string());
            }
            push(Analyzer::Dfa, "median".into(), Some(median(&times)), warnings.to_string());
        }
        Err(AnalysisError::Automaton(AutomatonError::StateExplosionLimit { .. })) => {
            push(Analyzer::Dfa, "median".into(), None, "StateExplosionLimit".into());
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

/// Generates, parses and times every cell in order.
pub fn run_bench(cells: &[MatrixCell]) -> Result<BenchReport, BenchError> {
    let mut report = BenchReport::default();
    for cell in cells {
        let (contracts, client, text) = cell_program(cell)?;
        let program = parse_program(&text)?;
        let c = &contracts[0];
        report.usability.push(UsabilityRow {
            contract_id: cell.contract_id.clone(),
            methods: c.methods,
            states_min: c.states_min,
            bfa_terms: c.annotation_terms,
            dfa_terms: c.dfa_terms(),
        });
        let base = BenchRow {
            contract_id: cell.contract_id.clone(),
            methods: c.methods,
            states_min: c.states_min,
            annotations_bfa: c.annotation_terms,
            annotations_dfa: c.dfa_terms(),
            loc: client.loc,
            base_classes: contracts.len(),
            analyzer: Analyzer::Bfa,
            run: String::new(),
            wall_ms: None,
            warnings: String::new(),
            seed: cell.client.seed,
        };
        time_cell(cell, &program, &mut report, base)?;
    }
    Ok(report)
}

/// Geometric mean of DFA-over-BFA median ratios across the cells where
/// both analyzers finished.
pub fn geomean_speedup(report: &BenchReport) -> Option<f64> {
    let ratios: Vec<f64> = report
        .usability
        .iter()
        .filter_map(|u| {
            let b = report.median_ms(&u.contract_id, Analyzer::Bfa)?;
            let d = report.median_ms(&u.contract_id, Analyzer::Dfa)?;
            Some(d / b)
        })
        .collect();
    if ratios.is_empty() {
        return None;
    }
    Some((ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_matrix;

    #[test]
    fn small_matrix() {
        let cells = parse_matrix("id=cr1 methods=3 chain_length=3 loc=40 runs=2 depth=1\nid=t2 methods=8 toggle_pairs=2 chain_length=3 loc=40 runs=1").unwrap();
        let r = run_bench(&cells).unwrap();
        assert_eq!(r.usability.len(), 2);
        assert_eq!(r.usability[0].bfa_terms, 3);
        // 2 timed runs + median per analyzer, then 1 + median
        assert_eq!(r.rows.len(), 6 + 4);
        assert!(r.rows.iter().all(|row| row.warnings == "0"));
        assert!(r.median_ms("t2", Analyzer::Dfa).unwrap() >= 0.0);
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with(
            "contract_id,methods,states_min,annotations_bfa,annotations_dfa,loc,base_classes,analyzer,run,wall_ms,warnings,seed\n"
        ));
        assert!(geomean_speedup(&r).is_some());
        assert!(r.usability_table().contains("cr1"));
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
