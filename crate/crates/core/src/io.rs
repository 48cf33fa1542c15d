//! File formats: systems and identified models as JSON, experiment logs as
//! CSV, design traces as JSON lines.
//!
//! Scalars are written as text: `"n"` or `"n/d"` for rationals, decimal
//! notation for floats. Exact values round-trip bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{ExperimentLog, InformativityReport};
use crate::design::DesignTrace;
use crate::error::{Error, Result};
use crate::lti::StateSpaceSystem;
use crate::matrix::Mat;
use crate::realization::IdentifiedModel;
use crate::scalar::Scalar;

fn parse_scalar<T: Scalar>(s: &str) -> Result<T> {
    T::parse_text(s).ok_or_else(|| Error::Parse(format!("not a number: {s:?}")))
}

fn texts<T: Scalar>(v: &[T]) -> Vec<String> {
    v.iter().map(Scalar::to_text).collect()
}

fn parse_vec<T: Scalar>(v: &[String]) -> Result<Vec<T>> {
    v.iter().map(|s| parse_scalar(s)).collect()
}

fn matrix_rows<T: Scalar>(m: &Mat<T>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| texts(r)).collect()
}

fn parse_matrix<T: Scalar>(name: &str, rows: usize, cols: usize, v: &[Vec<String>]) -> Result<Mat<T>> {
    if v.len() != rows || v.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse(format!("{name} must be {rows} × {cols}")));
    }
    let parsed = v.iter().map(|r| parse_vec(r)).collect::<Result<Vec<_>>>()?;
    Mat::from_rows(cols, &parsed)
}

/// On-disk form of a state-space system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemFile {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<String>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<String>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<String>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<String>>,
}

impl SystemFile {
    pub fn from_system<T: Scalar>(sys: &StateSpaceSystem<T>) -> Self {
        SystemFile {
            n: sys.n(),
            m: sys.m(),
            p: sys.p(),
            a: matrix_rows(sys.a()),
            b: matrix_rows(sys.b()),
            c: matrix_rows(sys.c()),
            d: matrix_rows(sys.d()),
        }
    }

    pub fn to_system<T: Scalar>(&self) -> Result<StateSpaceSystem<T>> {
        let (n, m, p) = (self.n, self.m, self.p);
        StateSpaceSystem::new(
            parse_matrix("A", n, n, &self.a)?,
            parse_matrix("B", n, m, &self.b)?,
            parse_matrix("C", p, n, &self.c)?,
            parse_matrix("D", p, m, &self.d)?,
        )
    }
}

pub fn system_to_json<T: Scalar>(sys: &StateSpaceSystem<T>) -> String {
    serde_json::to_string_pretty(&SystemFile::from_system(sys)).expect("plain data serializes")
}

pub fn system_from_json<T: Scalar>(text: &str) -> Result<StateSpaceSystem<T>> {
    serde_json::from_str::<SystemFile>(text)?.to_system()
}

pub fn read_system<T: Scalar>(path: &Path) -> Result<StateSpaceSystem<T>> {
    system_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_system<T: Scalar>(path: &Path, sys: &StateSpaceSystem<T>) -> Result<()> {
    Ok(std::fs::write(path, system_to_json(sys) + "\n")?)
}

/// Writes `log` as CSV with header `t,u_1..u_m,y_1..y_p`.
pub fn write_log_csv<T: Scalar, W: Write>(log: &ExperimentLog<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=log.m()).map(|i| format!("u_{i}")));
    header.extend((1..=log.p()).map(|i| format!("y_{i}")));
    w.write_record(&header)?;
    for t in 0..log.len() {
        let mut rec = vec![t.to_string()];
        rec.extend(texts(log.input(t)));
        rec.extend(texts(log.output(t)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn log_to_csv<T: Scalar>(log: &ExperimentLog<T>) -> String {
    let mut buf = Vec::new();
    write_log_csv(log, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Reads a log written by [`write_log_csv`]. Rows must be numbered `0, 1, …`.
pub fn read_log_csv<T: Scalar, R: Read>(input: R) -> Result<ExperimentLog<T>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = r.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names.first() != Some(&"t") {
        return Err(Error::Parse("first column must be t".into()));
    }
    let m = names.iter().filter(|s| s.starts_with("u_")).count();
    let p = names.iter().filter(|s| s.starts_with("y_")).count();
    let expected: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=m).map(|i| format!("u_{i}")))
        .chain((1..=p).map(|i| format!("y_{i}")))
        .collect();
    if names != expected {
        return Err(Error::Parse(format!(
            "header must be {}, found {}",
            expected.join(","),
            names.join(",")
        )));
    }
    let mut log = ExperimentLog::new(m, p)?;
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 1 + m + p {
            return Err(Error::Parse(format!("row {row} has {} fields", rec.len())));
        }
        if rec[0].parse::<usize>().ok() != Some(row) {
            return Err(Error::Parse(format!("row {row} is labelled t = {}", &rec[0])));
        }
        let vals = rec.iter().skip(1).map(parse_scalar).collect::<Result<Vec<T>>>()?;
        log.push(vals[..m].to_vec(), vals[m..].to_vec())?;
    }
    Ok(log)
}

pub fn log_from_csv<T: Scalar>(text: &str) -> Result<ExperimentLog<T>> {
    read_log_csv(text.as_bytes())
}

pub fn read_log<T: Scalar>(path: &Path) -> Result<ExperimentLog<T>> {
    read_log_csv(std::fs::File::open(path)?)
}

pub fn write_log<T: Scalar>(path: &Path, log: &ExperimentLog<T>) -> Result<()> {
    write_log_csv(log, std::fs::File::create(path)?)
}

pub fn report_to_json(report: &InformativityReport) -> String {
    serde_json::to_string_pretty(report).expect("plain data serializes")
}

/// One line of a trace file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceLine {
    pub t: usize,
    pub k: usize,
    pub kind: String,
    #[serde(rename = "rank_H")]
    pub rank_h: usize,
    #[serde(rename = "rank_G")]
    pub rank_g: usize,
    #[serde(rename = "rank_H_next")]
    pub rank_h_next: usize,
    pub eta: Option<Vec<String>>,
    pub beta: Option<String>,
    pub u: Vec<String>,
}

pub fn trace_lines<T: Scalar>(trace: &DesignTrace<T>) -> Vec<TraceLine> {
    trace
        .steps
        .iter()
        .map(|s| TraceLine {
            t: s.t,
            k: s.k,
            kind: s.kind.as_str().to_string(),
            rank_h: s.rank_h,
            rank_g: s.rank_g,
            rank_h_next: s.rank_h_next,
            eta: s.hyperplane.as_ref().map(|h| texts(&h.eta)),
            beta: s.hyperplane.as_ref().map(|h| h.beta.to_text()),
            u: texts(&s.u),
        })
        .collect()
}

pub fn trace_to_jsonl<T: Scalar>(trace: &DesignTrace<T>) -> String {
    trace_lines(trace)
        .iter()
        .map(|l| serde_json::to_string(l).expect("plain data serializes") + "\n")
        .collect()
}

pub fn trace_from_jsonl(text: &str) -> Result<Vec<TraceLine>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

/// Where an identified model came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Provenance {
    /// Path or label of the source log.
    pub source: String,
    pub mode: String,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(flatten)]
    pub system: SystemFile,
    pub x0: Vec<String>,
    pub residual: String,
    pub report: InformativityReport,
    pub provenance: Provenance,
}

pub fn model_to_json<T: Scalar>(model: &IdentifiedModel<T>, provenance: Provenance) -> String {
    let file = ModelFile {
        system: SystemFile::from_system(&model.system),
        x0: texts(&model.x0),
        residual: model.residual.to_text(),
        report: model.source_report.clone(),
        provenance,
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

/// Reads either a plain system file or an identified-model file.
pub fn any_system_from_json<T: Scalar>(text: &str) -> Result<StateSpaceSystem<T>> {
    system_from_json(text)
}
