//! Trajectory CSV and metrics JSON emitters.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use qht_core::{gradients, Diagnostics, MetricsReport, SystemSpec, Trajectory};

use crate::config::RunSection;
use crate::error::{CliError, Result};

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn csv_header(n_qubits: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..=n_qubits).map(|j| format!("T{j}")));
    h.extend(["dTp", "dTs", "diff"].map(String::from));
    h
}

/// `t,T1,...,Tn,dTp,dTs,diff`, one row per sample.
pub fn write_trajectory<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let grads = gradients(traj)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(traj.n_qubits()))?;
    for k in 0..traj.len() {
        let mut row = vec![fmt_f64(traj.times[k])];
        row.extend(traj.temperatures[k].iter().map(|&t| fmt_f64(t)));
        let (p, s) = (grads.primary[k], grads.secondary[k]);
        row.extend([fmt_f64(p), fmt_f64(s), fmt_f64(p - s)]);
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| CliError::io("<csv>", e))?;
    Ok(())
}

pub fn write_trajectory_file(traj: &Trajectory, path: &Path) -> Result<()> {
    let f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_trajectory(traj, std::io::BufWriter::new(f))
}

/// The gradient columns of a trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSeries {
    pub t: Vec<f64>,
    pub dtp: Vec<f64>,
    pub dts: Vec<f64>,
}

pub fn read_gradients<R: Read>(input: R) -> Result<GradientSeries> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Usage(format!("trajectory CSV lacks a {name} column")))
    };
    let (ti, pi, si) = (col("t")?, col("dTp")?, col("dTs")?);
    let mut out = GradientSeries { t: vec![], dtp: vec![], dts: vec![] };
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let get = |i: usize| {
            rec.get(i).unwrap_or("").trim().parse::<f64>().map_err(|_| {
                CliError::Usage(format!("row {}: bad number {:?}", line + 2, rec.get(i).unwrap_or("")))
            })
        };
        out.t.push(get(ti)?);
        out.dtp.push(get(pi)?);
        out.dts.push(get(si)?);
    }
    Ok(out)
}

pub fn read_gradients_file(path: &Path) -> Result<GradientSeries> {
    let f = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_gradients(f)
}

/// Population agreement between the expm trajectory and the RK4 cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCheck {
    pub max_population_difference: f64,
    pub compared_samples: usize,
}

/// Contents of the metrics JSON written by `run`.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsDocument<'a> {
    pub system: &'a SystemSpec,
    pub run: &'a RunSection,
    pub report: &'a MetricsReport,
    pub diagnostics: Diagnostics,
    pub born_markov_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheck>,
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}
