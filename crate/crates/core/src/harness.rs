//! Experiment driver: seeded success-rate trials, query-scaling sweeps, a
//! least-squares fit of mean queries against `log2 n`, and report output
//! as JSON Lines plus a CSV summary.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{verify_witness, PatternWitness};
use crate::generators::{generate, GenError, InstanceSpec, Style};
use crate::tester::{find_monotone, AlgorithmConstants, TesterError, TrialRng};
use crate::view::{IndexInterval, SequenceView, ValueRange};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Generator(#[from] GenError),
    #[error(transparent)]
    Tester(#[from] TesterError),
    #[error("trial {seed}: witness {witness:?} does not verify against the instance")]
    OneSidedViolation { seed: u64, witness: Vec<usize> },
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("scaling needs at least 3 distinct sizes, got {0}")]
    TooFewSizes(usize),
    #[error("fit needs at least 2 distinct sizes")]
    DegenerateFit,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TesterParams {
    pub k: usize,
    pub eps: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub delta: f64,
    pub style: Style,
    pub found: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<PatternWitness>,
    pub queries: u64,
    #[serde(with = "micros")]
    pub wall_time_us: Duration,
}

mod micros {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_micros() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        u64::deserialize(d).map(Duration::from_micros)
    }
}

impl TrialRecord {
    /// One JSON object; `with_time = false` drops the wall-clock field.
    pub fn to_json_line(&self, with_time: bool) -> String {
        let mut v = serde_json::to_value(self).expect("record serializes");
        if !with_time {
            v.as_object_mut().expect("object").remove("wall_time_us");
        }
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub delta: f64,
    pub style: Style,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_queries: f64,
    pub max_queries: u64,
}

#[derive(Debug, Clone)]
pub struct SuccessConfig {
    pub instance: InstanceSpec,
    pub params: TesterParams,
    pub trials: usize,
    pub base_seed: u64,
    pub constants: AlgorithmConstants,
}

#[derive(Debug, Clone)]
pub struct SuccessReport {
    pub success_rate: f64,
    pub records: Vec<TrialRecord>,
}

impl SuccessReport {
    pub fn summary(&self) -> SummaryRow {
        let r = &self.records[0];
        let trials = self.records.len();
        SummaryRow {
            n: r.n,
            k: r.k,
            eps: r.eps,
            delta: r.delta,
            style: r.style,
            trials,
            success_rate: self.success_rate,
            mean_queries: self.records.iter().map(|r| r.queries as f64).sum::<f64>() / trials as f64,
            max_queries: self.records.iter().map(|r| r.queries).max().unwrap_or(0),
        }
    }
}

/// Runs `trials` searches on a fixed sequence with seeds `base_seed + i`.
pub fn run_trials(
    values: &[f64],
    style: Style,
    params: TesterParams,
    trials: usize,
    base_seed: u64,
    consts: &AlgorithmConstants,
) -> Result<Vec<TrialRecord>, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    let full = IndexInterval::full(values.len()).map_err(TesterError::from)?;
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let start = Instant::now();
            let view = SequenceView::new(values).map_err(TesterError::from)?;
            let mut rng = TrialRng::seeded(seed);
            let out = find_monotone(&view, params.k, params.eps, params.delta, consts, &mut rng)?;
            if let Some(w) = &out.witness {
                if w.len() != params.k || !verify_witness(values, w, full, &ValueRange::full()) {
                    return Err(HarnessError::OneSidedViolation { seed, witness: w.indices.clone() });
                }
            }
            Ok(TrialRecord {
                seed,
                n: values.len(),
                k: params.k,
                eps: params.eps,
                delta: params.delta,
                style,
                found: out.found,
                witness: out.witness,
                queries: out.queries,
                wall_time_us: start.elapsed(),
            })
        })
        .collect()
}

pub fn estimate_success(cfg: &SuccessConfig) -> Result<SuccessReport, HarnessError> {
    if cfg.trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    let inst = generate(&cfg.instance)?;
    let records = run_trials(&inst.values, cfg.instance.style, cfg.params, cfg.trials, cfg.base_seed, &cfg.constants)?;
    let found = records.iter().filter(|r| r.found).count();
    Ok(SuccessReport { success_rate: found as f64 / cfg.trials as f64, records })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    pub r2: f64,
}

impl LogFit {
    pub fn predict(&self, n: usize) -> f64 {
        self.a + self.b * (n as f64).log2()
    }
}

/// Ordinary least squares of `mean` against `log2 n`.
pub fn fit_log_slope(rows: &[(usize, f64)]) -> Result<LogFit, HarnessError> {
    let mut distinct: Vec<usize> = rows.iter().map(|r| r.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 || distinct[0] == 0 {
        return Err(HarnessError::DegenerateFit);
    }
    let m = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| (r.0 as f64).log2()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = rows.iter().map(|r| r.1).sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(rows).map(|(x, r)| (x - mx) * (r.1 - my)).sum();
    let syy: f64 = rows.iter().map(|r| (r.1 - my).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let sse: f64 = xs.iter().zip(rows).map(|(x, r)| (r.1 - a - b * x).powi(2)).sum();
    // a flat response is fit perfectly by a flat line
    let r2 = if syy <= f64::EPSILON * my.abs().max(1.0) { 1.0 } else { 1.0 - sse / syy };
    Ok(LogFit { a, b, r2 })
}

#[derive(Debug, Clone)]
pub struct ScalingConfig {
    pub ns: Vec<usize>,
    pub style: Style,
    pub params: TesterParams,
    pub trials: usize,
    pub base_seed: u64,
    pub instance_seed: u64,
    pub constants: AlgorithmConstants,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub mean_queries: f64,
    pub max_queries: u64,
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    pub fit: LogFit,
    pub summaries: Vec<SummaryRow>,
    pub records: Vec<TrialRecord>,
}

pub fn scaling_experiment(cfg: &ScalingConfig) -> Result<ScalingReport, HarnessError> {
    let mut ns = cfg.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(HarnessError::TooFewSizes(ns.len()));
    }
    let mut rows = Vec::with_capacity(ns.len());
    let mut summaries = Vec::with_capacity(ns.len());
    let mut records = Vec::new();
    for &n in &ns {
        let report = estimate_success(&SuccessConfig {
            instance: InstanceSpec { style: cfg.style, n, k: cfg.params.k, eps: cfg.params.eps, seed: cfg.instance_seed },
            params: cfg.params,
            trials: cfg.trials,
            base_seed: cfg.base_seed,
            constants: cfg.constants.clone(),
        })?;
        let s = report.summary();
        rows.push(ScalingRow { n, mean_queries: s.mean_queries, max_queries: s.max_queries, trials: s.trials });
        summaries.push(s);
        records.extend(report.records);
    }
    let pts: Vec<(usize, f64)> = rows.iter().map(|r| (r.n, r.mean_queries)).collect();
    let fit = fit_log_slope(&pts)?;
    Ok(ScalingReport { rows, fit, summaries, records })
}

pub fn write_jsonl<W: Write>(mut out: W, records: &[TrialRecord], with_time: bool) -> Result<(), HarnessError> {
    for r in records {
        writeln!(out, "{}", r.to_json_line(with_time))?;
    }
    Ok(())
}

pub fn write_summary_csv<W: Write>(out: W, rows: &[SummaryRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
