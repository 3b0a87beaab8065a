//! Parameter sweeps over particle number, coupling, method, subsystem and
//! partition, written as CSV.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::discord::{quantum_discord, CorrelationReport, OptimizerConfig, Partition};
use crate::error::{Error, Result};
use crate::gcm::{hill_wheeler, GcmConfig};
use crate::mean_field::{energy_expectation, hf_amplitudes, hf_orbital, phf_project};
use crate::model::{exact_ground_state, ModelParams};
use crate::rdm::{embed_to_fock, rdm_from_hf, rdm_from_pq, NineStateDensity, Subsystem};

/// Ground-state approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Exact,
    Hf,
    Phf,
    Gcm,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Exact, Method::Hf, Method::Phf, Method::Gcm];

    pub fn label(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Hf => "hf",
            Method::Phf => "phf",
            Method::Gcm => "gcm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Method::Exact),
            "hf" => Ok(Method::Hf),
            "phf" => Ok(Method::Phf),
            "gcm" => Ok(Method::Gcm),
            other => Err(Error::InvalidConfig(format!("unknown method '{other}'"))),
        }
    }
}

/// Parses an `A:B` partition spec such as `1,3:0,2`.
pub fn parse_partition(spec: &str) -> Result<Partition> {
    spec.parse()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub n_list: Vec<usize>,
    pub chi_min: f64,
    pub chi_max: f64,
    pub chi_steps: usize,
    pub methods: Vec<Method>,
    pub subsystems: Vec<Subsystem>,
    pub partitions: Vec<Partition>,
    pub epsilon: f64,
    pub optimizer: OptimizerConfig,
    pub out: PathBuf,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Fill the `wall_ms` column. Off by default so that output is reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            n_list: vec![4, 8, 20],
            chi_min: 0.0,
            chi_max: 6.0,
            chi_steps: 121,
            methods: Method::ALL.to_vec(),
            subsystems: Subsystem::ALL.to_vec(),
            partitions: vec![
                "1,3:0,2".parse().expect("valid"),
                "2,3:0,1".parse().expect("valid"),
                "1:0".parse().expect("valid"),
            ],
            epsilon: 1.0,
            optimizer: OptimizerConfig::default(),
            out: PathBuf::from("scan.csv"),
            threads: None,
            record_timing: false,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_list.is_empty() {
            return bad("empty N list".into());
        }
        for &n in &self.n_list {
            ModelParams::<f64>::new(n, 1.0, 0.0).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        }
        if !(self.chi_min.is_finite() && self.chi_max.is_finite()) || self.chi_min < 0.0 {
            return bad(format!("chi range [{}, {}] must be finite and nonnegative", self.chi_min, self.chi_max));
        }
        if self.chi_min > self.chi_max {
            return bad(format!("chi_min {} > chi_max {}", self.chi_min, self.chi_max));
        }
        if self.chi_steps == 0 {
            return bad("chi_steps must be at least 1".into());
        }
        if self.methods.is_empty() || self.subsystems.is_empty() || self.partitions.is_empty() {
            return bad("methods, subsystems and partitions must be nonempty".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon = {}, need > 0", self.epsilon));
        }
        if self.optimizer.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        if !(self.optimizer.tol > 0.0) {
            return bad(format!("tol = {}, need > 0", self.optimizer.tol));
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }

    /// `chi_min + i (chi_max − chi_min) / (chi_steps − 1)`.
    pub fn chi_grid(&self) -> Vec<f64> {
        if self.chi_steps == 1 {
            return vec![self.chi_min];
        }
        let span = self.chi_max - self.chi_min;
        (0..self.chi_steps)
            .map(|i| self.chi_min + i as f64 * span / (self.chi_steps - 1) as f64)
            .collect()
    }
}

pub const CSV_HEADER: &str = "N,chi,method,subsystem,partition,energy,S_A,S_B,S_AB,mutual_info,classical_J,discord,\
restarts_used,stationarity_residual,converged,h11,h22,re_h12,im_h12,re_d12,im_d12,wall_ms";

/// One CSV line.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub n: usize,
    pub chi_index: usize,
    pub chi: f64,
    pub method: Method,
    pub subsystem: Subsystem,
    pub partition_index: usize,
    pub partition: Partition,
    pub energy: f64,
    pub report: Option<CorrelationReport<f64>>,
    pub wall_ms: u64,
    pub error: Option<String>,
}

impl ScanRow {
    pub fn converged(&self) -> bool {
        self.error.is_none() && self.report.as_ref().is_some_and(|r| r.converged)
    }

    fn sort_key(&self) -> (usize, usize, Method, Subsystem, usize) {
        (self.n, self.chi_index, self.method, self.subsystem, self.partition_index)
    }

    pub fn to_csv(&self) -> String {
        let g = |x: f64| format!("{x:.16e}");
        let mut cells = vec![
            self.n.to_string(),
            g(self.chi),
            self.method.to_string(),
            self.subsystem.to_string(),
            format!("\"{}\"", self.partition),
            g(self.energy),
        ];
        match &self.report {
            Some(r) => {
                let p = &r.best_params;
                cells.extend([
                    g(r.s_a),
                    g(r.s_b),
                    g(r.s_ab),
                    g(r.mutual_info),
                    g(r.classical_j),
                    g(r.discord),
                    r.restarts_used.to_string(),
                    g(r.stationarity_residual),
                    self.converged().to_string(),
                    g(p.h11),
                    g(p.h22),
                    g(p.h12.re),
                    g(p.h12.im),
                    g(p.d12.re),
                    g(p.d12.im),
                ]);
            }
            None => {
                cells.extend(std::iter::repeat_n("NaN".to_string(), 6));
                cells.extend(["0".into(), "NaN".into(), "false".into()]);
                cells.extend(std::iter::repeat_n("NaN".to_string(), 6));
            }
        }
        cells.push(self.wall_ms.to_string());
        cells.join(",")
    }
}

/// Outcome of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSummary {
    pub rows: usize,
    pub failures: usize,
    pub not_converged: usize,
    pub max_residual: f64,
    pub out: PathBuf,
}

impl fmt::Display for ScanSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "wrote {} rows to {} ({} failed points, {} not converged, max stationarity residual {:.3e})",
            self.rows,
            self.out.display(),
            self.failures,
            self.not_converged,
            self.max_residual
        )
    }
}

/// A ground state reduced to what the rows need.
struct MethodState {
    energy: f64,
    rdms: Vec<(Subsystem, Result<NineStateDensity<f64>>)>,
}

fn method_state(params: &ModelParams<f64>, method: Method, subs: &[Subsystem]) -> Result<MethodState> {
    let from_pq = |energy: f64, state: &crate::model::PqState<f64>| MethodState {
        energy,
        rdms: subs.iter().map(|&s| (s, rdm_from_pq(state, s))).collect(),
    };
    match method {
        Method::Exact => {
            let gs = exact_ground_state(params)?;
            Ok(from_pq(gs.energy, &gs.state))
        }
        Method::Hf => {
            let orb = hf_orbital(params.chi())?;
            let energy = energy_expectation(&hf_amplitudes(params), params)?;
            Ok(MethodState {
                energy,
                rdms: subs.iter().map(|&s| (s, Ok(rdm_from_hf(&orb, s)))).collect(),
            })
        }
        Method::Phf => {
            let state = phf_project(&hf_amplitudes(params))?;
            Ok(from_pq(energy_expectation(&state, params)?, &state))
        }
        Method::Gcm => {
            let sol = hill_wheeler(&GcmConfig::new(*params)?)?;
            Ok(from_pq(sol.energy, &sol.state))
        }
    }
}

/// Computes every row of the scan in deterministic order.
pub fn scan_rows(cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    cfg.validate()?;
    let work = || compute_rows(cfg);
    match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn compute_rows(cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    let grid = cfg.chi_grid();
    let mut points = Vec::new();
    for &n in &cfg.n_list {
        for (ci, &chi) in grid.iter().enumerate() {
            for &m in &cfg.methods {
                points.push((n, ci, chi, m));
            }
        }
    }
    let states: Vec<_> = points
        .par_iter()
        .map(|&(n, _, chi, m)| {
            let start = Instant::now();
            let st = ModelParams::from_chi(n, cfg.epsilon, chi).and_then(|p| method_state(&p, m, &cfg.subsystems));
            (st, start.elapsed())
        })
        .collect();

    let mut jobs = Vec::new();
    for (pi, &(n, ci, chi, m)) in points.iter().enumerate() {
        for (si, &sub) in cfg.subsystems.iter().enumerate() {
            for (qi, part) in cfg.partitions.iter().enumerate() {
                jobs.push((pi, n, ci, chi, m, si, sub, qi, part));
            }
        }
    }
    let mut rows: Vec<ScanRow> = jobs
        .par_iter()
        .map(|&(pi, n, ci, chi, method, si, sub, qi, part)| {
            let start = Instant::now();
            let (state, prep_time) = &states[pi];
            let mut row = ScanRow {
                n,
                chi_index: ci,
                chi,
                method,
                subsystem: sub,
                partition_index: qi,
                partition: part.clone(),
                energy: f64::NAN,
                report: None,
                wall_ms: 0,
                error: None,
            };
            let outcome = match state {
                Ok(st) => {
                    row.energy = st.energy;
                    match &st.rdms[si].1 {
                        Ok(rho) => quantum_discord(&embed_to_fock(rho), part, &cfg.optimizer),
                        Err(e) => Err(e.clone()),
                    }
                }
                Err(e) => Err(e.clone()),
            };
            match outcome {
                Ok(r) => row.report = Some(r),
                Err(e) => row.error = Some(e.to_string()),
            }
            if cfg.record_timing {
                row.wall_ms = (start.elapsed() + *prep_time).as_millis() as u64;
            }
            row
        })
        .collect();
    rows.sort_by_key(|a| a.sort_key());
    Ok(rows)
}

/// Writes the header and rows.
pub fn write_csv<W: Write>(rows: &[ScanRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv())?;
    }
    out.flush()?;
    Ok(())
}

/// Runs the scan and writes the CSV to `cfg.out`.
pub fn run_scan(cfg: &ScanConfig) -> Result<ScanSummary> {
    cfg.validate()?;
    let file = File::create(&cfg.out).map_err(|e| Error::Io(format!("{}: {e}", cfg.out.display())))?;
    let rows = scan_rows(cfg)?;
    write_csv(&rows, BufWriter::new(file))?;
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    let not_converged = rows.iter().filter(|r| !r.converged()).count();
    let max_residual = rows
        .iter()
        .filter_map(|r| r.report.as_ref().map(|x| x.stationarity_residual))
        .fold(0.0, f64::max);
    Ok(ScanSummary {
        rows: rows.len(),
        failures,
        not_converged,
        max_residual,
        out: cfg.out.clone(),
    })
}
