//! Batch runs over a list of separations, with CSV and JSON output.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::extrapolate::{fit_series, power_law_fit, run_chain, ChainStep, FitRule, PowerLawFit};
use crate::kernel::Separation;
use crate::reference::{excess_over_geometric, ReferenceSet};
use crate::solver::GalerkinSystem;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "LOVECAP_THREADS";

pub const CSV_HEADER: &str =
    "kappa,N,f0_raw,c_extrapolated,method,alpha,beta,delta_c,kirchhoff,ignatowsky,excess_geometric";

/// Separations at or below this are checked against the Ignatowsky bound.
const BOUND_CHECK_KAPPA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Raw,
    Power,
    Heuristic,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Raw => "raw",
            Mode::Power => "power",
            Mode::Heuristic => "heuristic",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Mode::Raw),
            "power" => Ok(Mode::Power),
            "heuristic" => Ok(Mode::Heuristic),
            _ => Err(Error::Config(format!(
                "unknown mode '{s}' (raw, power, heuristic)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!("unknown format '{s}' (csv, json)"))),
        }
    }
}

/// One truncation for every separation, or one per separation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TruncSpec {
    Uniform(usize),
    PerKappa(Vec<usize>),
}

impl TruncSpec {
    fn at(&self, i: usize) -> usize {
        match self {
            TruncSpec::Uniform(n) => *n,
            TruncSpec::PerKappa(v) => v[i],
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kappas: Vec<Separation>,
    pub trunc: TruncSpec,
    pub mode: Mode,
    pub fit_rule: FitRule,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub thread_count: Option<usize>,
}

impl RunConfig {
    pub fn new(kappas: Vec<Separation>, trunc: usize, mode: Mode) -> Self {
        RunConfig {
            kappas,
            trunc: TruncSpec::Uniform(trunc),
            mode,
            fit_rule: FitRule::default(),
            output_format: OutputFormat::Csv,
            output_path: None,
            thread_count: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappas.is_empty() {
            return Err(Error::Config("no separations given".into()));
        }
        if let TruncSpec::PerKappa(v) = &self.trunc {
            if v.len() != self.kappas.len() {
                return Err(Error::Config(format!(
                    "{} truncations for {} separations",
                    v.len(),
                    self.kappas.len()
                )));
            }
            if self.mode == Mode::Heuristic {
                return Err(Error::Config(
                    "heuristic mode takes a single truncation budget".into(),
                ));
            }
        }
        if self.mode == Mode::Heuristic {
            if self.kappas.len() < 2 {
                return Err(Error::Config(
                    "heuristic mode needs at least two separations".into(),
                ));
            }
            if self.kappas.windows(2).any(|w| !(w[1] < w[0])) {
                return Err(Error::Config(
                    "heuristic mode needs strictly decreasing separations".into(),
                ));
            }
        }
        if self.thread_count == Some(0) {
            return Err(Error::Config("thread count must be positive".into()));
        }
        if !(self.fit_rule.second > 1.0 && self.fit_rule.third > self.fit_rule.second) {
            return Err(Error::Config(
                "fit divisors must satisfy 1 < second < third".into(),
            ));
        }
        Ok(())
    }
}

/// Thread count from the flag, else from [`THREADS_ENV`].
pub fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(s) if !s.trim().is_empty() => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!(
                "{THREADS_ENV}='{s}' is not a positive integer"
            ))),
        },
        _ => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacitanceEstimate {
    pub kappa: Separation,
    pub trunc: usize,
    pub f0_raw: f64,
    pub c_extrapolated: Option<f64>,
    pub method: Mode,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub delta_c: Option<f64>,
    pub kirchhoff: f64,
    pub ignatowsky: f64,
    /// Relative excess of the best available value over `π/(4κ)`.
    pub excess_geometric: f64,
    pub warnings: Vec<String>,
}

impl CapacitanceEstimate {
    fn new(kappa: Separation, trunc: usize, f0: f64, method: Mode) -> Self {
        let refs = ReferenceSet::new(kappa);
        CapacitanceEstimate {
            kappa,
            trunc,
            f0_raw: f0,
            c_extrapolated: None,
            method,
            alpha: None,
            beta: None,
            delta_c: None,
            kirchhoff: refs.c_kirchhoff,
            ignatowsky: refs.c_ignatowsky,
            excess_geometric: excess_over_geometric(f0, kappa),
            warnings: Vec::new(),
        }
    }

    fn with_extrapolated(mut self, c: f64) -> Self {
        self.c_extrapolated = Some(c);
        self.excess_geometric = excess_over_geometric(c, self.kappa);
        if self.kappa.value() <= BOUND_CHECK_KAPPA && !(c > self.ignatowsky) {
            let msg = format!(
                "extrapolated value {c} is not above the Ignatowsky bound {}: not converged",
                self.ignatowsky
            );
            log::warn!("kappa = {}: {msg}", self.kappa);
            self.warnings.push(msg);
        }
        self
    }

    fn from_fit(fit: &PowerLawFit, method: Mode) -> Self {
        let mut e =
            Self::new(fit.kappa, fit.trunc(), fit.f0(), method).with_extrapolated(fit.c_hat);
        e.alpha = Some(fit.alpha);
        e.beta = Some(fit.beta);
        e
    }

    fn from_step(step: &ChainStep) -> Self {
        let mut e = Self::new(step.kappa, step.trunc, step.f0, Mode::Heuristic)
            .with_extrapolated(step.c_tilde);
        e.delta_c = Some(step.delta_c);
        e
    }

    /// Best available capacitance.
    pub fn value(&self) -> f64 {
        self.c_extrapolated.unwrap_or(self.f0_raw)
    }
}

/// A separation that produced no estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub kappa: Separation,
    pub trunc: usize,
    pub message: String,
}

pub type RowOutcome = std::result::Result<CapacitanceEstimate, ErrorRecord>;

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub mode: Mode,
    /// One entry per requested separation, in request order.
    pub rows: Vec<RowOutcome>,
}

impl RunReport {
    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| r.is_err())
    }

    pub fn estimates(&self) -> impl Iterator<Item = &CapacitanceEstimate> {
        self.rows.iter().filter_map(|r| r.as_ref().ok())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(CSV_HEADER);
        s.push('\n');
        for row in &self.rows {
            s.push_str(&csv_row(row));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self.rows.iter().map(json_row).collect();
        let mut s =
            serde_json::to_string_pretty(&Value::Array(rows)).expect("json values serialize");
        s.push('\n');
        s
    }

    pub fn write<W: Write>(&self, format: OutputFormat, mut w: W) -> Result<()> {
        let text = match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        };
        w.write_all(text.as_bytes())?;
        Ok(())
    }
}

/// Rounds to 10 significant digits and prints in fixed notation.
pub fn format_sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.9e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    let decimals = (9 - exp).max(0) as usize;
    let v: f64 = sci.parse().unwrap();
    format!("{v:.decimals$}")
}

fn round_sig10(x: f64) -> f64 {
    format_sig10(x).parse().unwrap_or(x)
}

fn csv_row(row: &RowOutcome) -> String {
    let opt = |v: Option<f64>| v.map(format_sig10).unwrap_or_default();
    match row {
        Ok(e) => [
            format_sig10(e.kappa.value()),
            e.trunc.to_string(),
            format_sig10(e.f0_raw),
            opt(e.c_extrapolated),
            e.method.as_str().to_string(),
            opt(e.alpha),
            opt(e.beta),
            opt(e.delta_c),
            format_sig10(e.kirchhoff),
            format_sig10(e.ignatowsky),
            format_sig10(e.excess_geometric),
        ]
        .join(","),
        Err(r) => format!(
            "{},{},,,error,,,,,,",
            format_sig10(r.kappa.value()),
            r.trunc
        ),
    }
}

fn json_row(row: &RowOutcome) -> Value {
    let num = |x: f64| json!(round_sig10(x));
    let opt = |v: Option<f64>| v.map(num).unwrap_or(Value::Null);
    match row {
        Ok(e) => {
            let mut m = Map::new();
            m.insert("kappa".into(), num(e.kappa.value()));
            m.insert("N".into(), json!(e.trunc));
            m.insert("f0_raw".into(), num(e.f0_raw));
            m.insert("c_extrapolated".into(), opt(e.c_extrapolated));
            m.insert("method".into(), json!(e.method.as_str()));
            m.insert("alpha".into(), opt(e.alpha));
            m.insert("beta".into(), opt(e.beta));
            m.insert("delta_c".into(), opt(e.delta_c));
            m.insert("kirchhoff".into(), num(e.kirchhoff));
            m.insert("ignatowsky".into(), num(e.ignatowsky));
            m.insert("excess_geometric".into(), num(e.excess_geometric));
            m.insert("warnings".into(), json!(e.warnings));
            Value::Object(m)
        }
        Err(r) => json!({
            "kappa": num(r.kappa.value()),
            "N": r.trunc,
            "method": "error",
            "error": r.message,
        }),
    }
}

fn estimate_one(
    kappa: Separation,
    trunc: usize,
    mode: Mode,
    rule: FitRule,
) -> Result<CapacitanceEstimate> {
    let system = GalerkinSystem::assemble(kappa, trunc)?;
    let top = system.solve(trunc)?;
    let mut e = match mode {
        Mode::Raw => CapacitanceEstimate::new(kappa, trunc, top.f0, Mode::Raw),
        _ => {
            let [_, n2, n3] = rule.points(trunc);
            let samples = [(trunc, top.f0), (n2, system.f0(n2)?), (n3, system.f0(n3)?)];
            CapacitanceEstimate::from_fit(&power_law_fit(kappa, samples)?, Mode::Power)
        }
    };
    e.warnings.extend(top.warnings);
    Ok(e)
}

fn run_independent(config: &RunConfig) -> Vec<RowOutcome> {
    config
        .kappas
        .par_iter()
        .enumerate()
        .map(|(i, &kappa)| {
            let trunc = config.trunc.at(i);
            estimate_one(kappa, trunc, config.mode, config.fit_rule).map_err(|e| ErrorRecord {
                kappa,
                trunc,
                message: e.to_string(),
            })
        })
        .collect()
}

fn run_heuristic(config: &RunConfig) -> Vec<RowOutcome> {
    let budget = config.trunc.at(0);
    let k0 = config.kappas[0];
    let n0 = budget;
    let seeded = GalerkinSystem::assemble(k0, n0)
        .and_then(|s| fit_series(&s, n0, config.fit_rule).map(|f| (s, f)));
    let (series, fit) = match seeded {
        Ok(v) => v,
        Err(e) => {
            return config
                .kappas
                .iter()
                .map(|&kappa| {
                    Err(ErrorRecord {
                        kappa,
                        trunc: budget,
                        message: format!("seed fit at kappa = {k0} failed: {e}"),
                    })
                })
                .collect()
        }
    };
    let (chain, failure) = match run_chain(&config.kappas, budget, &fit, series) {
        Ok(c) => (c, None),
        Err(f) => (f.completed.clone(), Some(f)),
    };
    let mut rows: Vec<RowOutcome> = chain
        .steps
        .iter()
        .enumerate()
        .map(|(i, step)| {
            let mut e = CapacitanceEstimate::from_step(step);
            if i == 0 {
                e.alpha = Some(fit.alpha);
                e.beta = Some(fit.beta);
                e.warnings.extend(chain.warnings.iter().cloned());
            }
            Ok(e)
        })
        .collect();
    if let Some(f) = failure {
        for &kappa in &config.kappas[rows.len()..] {
            let message = if kappa == f.failed_kappa {
                f.error.to_string()
            } else {
                format!("not reached: chain stopped at kappa = {}", f.failed_kappa)
            };
            rows.push(Err(ErrorRecord {
                kappa,
                trunc: budget,
                message,
            }));
        }
    }
    rows
}

/// Runs `config`, one row per separation. Per-separation failures become
/// error records; only configuration problems fail the whole run.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let body = || match config.mode {
        Mode::Heuristic => run_heuristic(config),
        _ => run_independent(config),
    };
    let rows = match config.thread_count {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(body),
        None => body(),
    };
    for r in rows.iter().filter_map(|r| r.as_ref().err()) {
        log::error!("kappa = {}, N = {}: {}", r.kappa, r.trunc, r.message);
    }
    Ok(RunReport {
        mode: config.mode,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::k00;

    fn sep(k: f64) -> Separation {
        Separation::new(k).unwrap()
    }

    #[test]
    fn sig10_formatting() {
        assert_eq!(format_sig10(80.434402057), "80.43440206");
        assert_eq!(format_sig10(0.01), "0.01000000000");
        assert_eq!(format_sig10(0.005150123456789), "0.005150123457");
        assert_eq!(format_sig10(9.9999999999), "10.00000000");
        assert_eq!(format_sig10(-2.5), "-2.500000000");
        assert_eq!(format_sig10(123456789012.0), "123456789000");
    }

    #[test]
    fn zero_truncation_raw_row() {
        let r = run(&RunConfig::new(vec![sep(0.01)], 0, Mode::Raw)).unwrap();
        let e = r.rows[0].as_ref().unwrap();
        assert_eq!(e.f0_raw, 1.0 / (1.0 - k00(sep(0.01))));
        assert_eq!(e.c_extrapolated, None);
        let csv = r.to_csv();
        let line = csv.lines().nth(1).unwrap();
        assert_eq!(line.split(',').count(), 11);
        assert!(line.contains(",raw,,,,"));
    }

    #[test]
    fn guard_failure_becomes_error_record() {
        let cfg = RunConfig::new(vec![sep(0.1), sep(1.0)], 40, Mode::Raw);
        let r = run(&cfg).unwrap();
        assert!(r.rows[0].is_ok());
        assert!(r.rows[1].is_err());
        assert!(r.has_errors());
        assert!(r
            .to_csv()
            .lines()
            .nth(2)
            .unwrap()
            .starts_with("1.000000000,40,,,error"));
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(vec![sep(0.01)], 10, Mode::Heuristic);
        assert!(c.validate().is_err());
        c.kappas = vec![sep(0.01), sep(0.02)];
        assert!(c.validate().is_err());
        c.kappas = vec![sep(0.02), sep(0.01)];
        assert!(c.validate().is_ok());
        c.trunc = TruncSpec::PerKappa(vec![10, 20]);
        assert!(c.validate().is_err());
        let mut p = RunConfig::new(vec![sep(0.01), sep(0.02)], 10, Mode::Power);
        p.trunc = TruncSpec::PerKappa(vec![10]);
        assert!(p.validate().is_err());
        p.trunc = TruncSpec::Uniform(10);
        p.thread_count = Some(0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn output_is_independent_of_thread_count() {
        let mut c = RunConfig::new(vec![sep(0.05), sep(0.03)], 60, Mode::Power);
        c.thread_count = Some(1);
        let a = run(&c).unwrap().to_csv();
        c.thread_count = Some(3);
        let b = run(&c).unwrap().to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_enums() {
        assert_eq!("power".parse::<Mode>().unwrap(), Mode::Power);
        assert!("fast".parse::<Mode>().is_err());
        assert_eq!("json".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
    }
}
