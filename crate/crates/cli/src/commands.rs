//! The five subcommands, as library functions so tests can drive them directly.

use std::path::{Path, PathBuf};

use serde::Serialize;

use qht_core::baths::BORN_MARKOV_WARN;
use qht_core::metrics::{linspace, ParamPath, SweepRow};
use qht_core::{
    evaluate, sweep, Evaluation, MetricsReport, Mode, OpenSystem, SystemSpec, Trajectory, TransientWindow,
};

use crate::config::{ensure_writable, PropagatorChoice, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{
    fmt_f64, read_gradients_file, write_json, write_trajectory_file, CrossCheck, MetricsDocument,
};
use crate::plot::render_svg;

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub propagator: Option<PropagatorChoice>,
    pub margin: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(t) = self.t_final {
            cfg.run.t_final = t;
        }
        if let Some(dt) = self.dt {
            cfg.run.dt = dt;
        }
        if let Some(p) = self.propagator {
            cfg.run.propagator = p;
        }
        if let Some(m) = self.margin {
            cfg.run.margin = m;
        }
        crate::config::validate_config(cfg)
    }
}

/// Sweep worker count: `QHT_THREADS`, else the machine's parallelism.
pub fn thread_count() -> Result<usize> {
    match std::env::var("QHT_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Usage(format!("QHT_THREADS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

fn warn_born_markov(system: &OpenSystem) {
    if let Some(m) = system.born_markov_margin() {
        if m >= BORN_MARKOV_WARN {
            eprintln!(
                "{}",
                serde_json::json!({ "warning": "born_markov_margin", "value": m, "threshold": BORN_MARKOV_WARN })
            );
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub report: MetricsReport,
    pub trajectory_csv: PathBuf,
    pub metrics_json: PathBuf,
    pub plot_svg: Option<PathBuf>,
    pub cross_check: Option<CrossCheck>,
}

/// RK4 alongside the expm trajectory; populations compared at shared sample times.
fn cross_check(system: &OpenSystem, cfg: &RunConfig, reference: &Trajectory) -> Result<CrossCheck> {
    let spacing = cfg.run.t_final / (cfg.run.samples - 1) as f64;
    let per_sample = (spacing / cfg.run.dt).ceil().max(1.0) as usize;
    let rk4 = system.integrate_rk4(cfg.run.t_final, spacing / per_sample as f64, per_sample, false)?;
    let tol = 1e-9 * cfg.run.t_final;
    let (mut worst, mut compared, mut j) = (0.0f64, 0usize, 0usize);
    for (t, pops) in rk4.times.iter().zip(&rk4.populations) {
        while j + 1 < reference.len() && reference.times[j] < t - tol {
            j += 1;
        }
        if (reference.times[j] - t).abs() <= tol {
            compared += 1;
            for (a, b) in pops.iter().zip(&reference.populations[j]) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok(CrossCheck { max_population_difference: worst, compared_samples: compared })
}

/// Evaluates the config and writes the trajectory CSV, metrics JSON and plot.
pub fn cmd_run(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    let outputs = cfg.outputs.resolved(out_dir);
    ensure_writable(&outputs.trajectory_csv)?;
    ensure_writable(&outputs.metrics_json)?;
    if let Some(p) = &outputs.plot_svg {
        ensure_writable(p)?;
    }
    let spec = cfg.spec();
    let system = OpenSystem::from_spec(&spec)?;
    warn_born_markov(&system);

    let mut opts = cfg.run.options();
    if spec.n_qubits() != 3 {
        opts.rate_window = None;
    }
    let Evaluation { report, trajectory, .. } = evaluate(&spec, &opts)?;
    let check = match cfg.run.propagator {
        PropagatorChoice::Both => Some(cross_check(&system, cfg, &trajectory)?),
        _ => None,
    };

    write_trajectory_file(&trajectory, &outputs.trajectory_csv)?;
    let doc = MetricsDocument {
        system: &spec,
        run: &cfg.run,
        report: &report,
        diagnostics: trajectory.diagnostics,
        born_markov_margin: system.born_markov_margin(),
        cross_check: check,
    };
    write_json(&doc, &outputs.metrics_json)?;
    if let Some(svg) = &outputs.plot_svg {
        cmd_plot(&outputs.trajectory_csv, svg, &plot_title(&spec))?;
    }
    Ok(RunSummary {
        report,
        trajectory_csv: outputs.trajectory_csv,
        metrics_json: outputs.metrics_json,
        plot_svg: outputs.plot_svg,
        cross_check: check,
    })
}

fn plot_title(spec: &SystemSpec) -> String {
    let taus: Vec<String> = spec.qubits.iter().map(|q| format!("{}", q.bath.temperature)).collect();
    format!("{} g={} tau=({})", spec.kind, spec.g, taus.join(", "))
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadyReport {
    pub temperatures: Vec<f64>,
    #[serde(rename = "dTp")]
    pub dtp: f64,
    #[serde(rename = "dTs")]
    pub dts: f64,
    pub capacity: f64,
    pub mode: Mode,
    pub unique: bool,
    pub residual: f64,
}

pub fn steady_report(spec: &SystemSpec) -> Result<SteadyReport> {
    let ss = qht_core::steady_state(spec)?;
    let temps = ss.temperatures(&spec.energies())?;
    let gap = |a: usize, b: usize| (temps[a] - temps[b]).abs();
    let dtp = gap(spec.primary.0, spec.primary.1);
    let dts = gap(spec.secondary.0, spec.secondary.1);
    Ok(SteadyReport {
        temperatures: temps,
        dtp,
        dts,
        capacity: dtp - dts,
        mode: Mode::from_capacity(dtp - dts),
        unique: ss.unique,
        residual: ss.residual,
    })
}

/// Steady-state temperatures and capacity, also written to `steady_json` when configured.
pub fn cmd_steady(cfg: &RunConfig, out_dir: &Path) -> Result<SteadyReport> {
    let path = cfg.outputs.resolved(out_dir).steady_json;
    if let Some(p) = &path {
        ensure_writable(p)?;
    }
    let report = steady_report(&cfg.spec())?;
    if let Some(p) = &path {
        write_json(&report, p)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub path: ParamPath,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepRequest {
    /// Command-line values first, then the config's `sweep` section.
    pub fn resolve(
        cfg: &RunConfig,
        param: Option<&str>,
        from: Option<f64>,
        to: Option<f64>,
        steps: Option<usize>,
    ) -> Result<Self> {
        let section = cfg.sweep.as_ref();
        let missing = |what: &str| CliError::Usage(format!("sweep needs --{what} or a sweep.{what} entry"));
        let param = param.map(str::to_string).or_else(|| section.map(|s| s.param.clone())).ok_or_else(|| missing("param"))?;
        let req = SweepRequest {
            path: param.parse()?,
            from: from.or(section.map(|s| s.from)).ok_or_else(|| missing("from"))?,
            to: to.or(section.map(|s| s.to)).ok_or_else(|| missing("to"))?,
            steps: steps.or(section.map(|s| s.steps)).ok_or_else(|| missing("steps"))?,
        };
        if req.steps == 0 {
            return Err(CliError::Usage("--steps must be at least 1".into()));
        }
        req.path.apply(&cfg.spec(), req.from)?;
        Ok(req)
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.from, self.to, self.steps)
    }
}

pub const SWEEP_HEADER: &str = "param,value,dTp_f,dTs_f,capacity,mode,transient_end,error";

/// One CSV line per row, failures kept in place with their message.
pub fn sweep_csv(path: ParamPath, rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let line = match &row.report {
            Ok(r) => format!(
                "{path},{},{},{},{},{},{},",
                fmt_f64(row.value),
                fmt_f64(r.dtp_f),
                fmt_f64(r.dts_f),
                fmt_f64(r.capacity),
                r.mode,
                r.transient_window.map(|w| fmt_f64(w.t_end)).unwrap_or_default(),
            ),
            Err(e) => format!("{path},{},,,,,,\"{}\"", fmt_f64(row.value), e.replace('"', "'")),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Evaluates the sweep and writes its CSV to `sweep_csv` when configured.
pub fn cmd_sweep(cfg: &RunConfig, req: &SweepRequest, threads: usize, out_dir: &Path) -> Result<(Vec<SweepRow>, String)> {
    let path = cfg.outputs.resolved(out_dir).sweep_csv;
    if let Some(p) = &path {
        ensure_writable(p)?;
    }
    let mut opts = cfg.run.options();
    opts.rate_window = None;
    let rows = sweep(&cfg.spec(), req.path, &req.values(), &opts, threads)?;
    let text = sweep_csv(req.path, &rows);
    if let Some(p) = &path {
        std::fs::write(p, &text).map_err(|e| CliError::io(p, e))?;
    }
    Ok((rows, text))
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub mode: Mode,
    pub capacity: f64,
    pub t_f: f64,
    pub transient_window: Option<TransientWindow>,
}

pub fn cmd_classify(cfg: &RunConfig) -> Result<Classification> {
    let mut opts = cfg.run.options();
    opts.rate_window = None;
    let report = evaluate(&cfg.spec(), &opts)?.report;
    Ok(Classification {
        mode: report.mode,
        capacity: report.capacity,
        t_f: report.t_f,
        transient_window: report.transient_window,
    })
}

/// Renders the gradient columns of a trajectory CSV to SVG.
pub fn cmd_plot(csv: &Path, out: &Path, title: &str) -> Result<()> {
    let series = read_gradients_file(csv)?;
    ensure_writable(out)?;
    std::fs::write(out, render_svg(&series, title)).map_err(|e| CliError::io(out, e))
}
