use std::path::{Path, PathBuf};
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use online_sysid::design::{baseline_sample_counts, DesignTrace};
use online_sysid::io::{self, Provenance};
use online_sysid::lti::random_minimal_system;
use online_sysid::plant::{Plant, ReplayPlant, SimulatedPlant};
use online_sysid::reproduce::{reproduce as reproduce_checks, ReproduceOptions};
use online_sysid::{
    are_isomorphic, check_informativity, identify as identify_model, online_experiment, Error,
    ExperimentLog, ExperimentOptions, InformativityReport, InputPolicy, Mat, Rational, Scalar,
};

use crate::config::{PolicySpec, RunConfig};
use crate::{Bounds, Mode};

/// Exit statuses; stable for scripting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok = 0,
    Negative = 1,
    Usage = 2,
    Internal = 3,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s as u8)
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: Status,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: Status::Usage,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Io(_) | Error::InvalidArgument(_) | Error::DimensionMismatch(_) => {
                Status::Usage
            }
            Error::NotInformative(_) | Error::ZeroInput | Error::NotMinimal => Status::Negative,
            _ => Status::Internal,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<Status, Failure>;

fn bounds_or(bounds: &Bounds, lag: Option<usize>, states: Option<usize>) -> Result<(usize, usize), Failure> {
    let l = bounds.lag_bound.or(lag).ok_or_else(|| Failure::usage("missing lag bound (-L)"))?;
    let n = bounds.upper_n.or(states).ok_or_else(|| Failure::usage("missing state bound (--upper-n)"))?;
    Ok((l, n))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))
}

fn parse_vec<T: Scalar>(what: &str, v: &[String]) -> Result<Vec<T>, Failure> {
    v.iter()
        .map(|s| T::parse_text(s).ok_or_else(|| Failure::usage(format!("{what}: not a number: {s:?}"))))
        .collect()
}

fn parse_rows<T: Scalar>(what: &str, rows: &[Vec<String>]) -> Result<Mat<T>, Failure> {
    let parsed = rows.iter().map(|r| parse_vec(what, r)).collect::<Result<Vec<_>, _>>()?;
    let cols = parsed.first().map_or(0, Vec::len);
    Mat::from_rows(cols, &parsed).map_err(|e| Failure::usage(format!("{what}: {e}")))
}

/// Everything recorded next to the data of one run.
#[derive(Serialize)]
struct RunSummary<'a> {
    #[serde(flatten)]
    report: &'a InformativityReport,
    #[serde(rename = "L")]
    lag_bound: usize,
    #[serde(rename = "N")]
    state_bound: usize,
    final_k: usize,
    mode: &'static str,
    policy: &'static str,
    seed: u64,
}

struct RunOutcome {
    informative: bool,
    summary: String,
}

fn build_plant<T: Scalar>(cfg: &RunConfig, seed: u64) -> Result<(Box<dyn Plant<T>>, Option<ExperimentLog<T>>), Failure> {
    let p = &cfg.plant;
    let system = if let Some(s) = &p.system {
        Some(s.to_system::<T>()?)
    } else if let Some(path) = &p.system_path {
        Some(io::read_system::<T>(path)?)
    } else if let Some(r) = p.random {
        Some(random_minimal_system::<T>(r.n, r.m, r.p, seed)?)
    } else {
        None
    };
    if let Some(system) = system {
        let x0 = match (&p.x0, p.random) {
            (Some(x0), _) => parse_vec("x0", x0)?,
            (None, Some(_)) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(1);
                (0..system.n()).map(|_| T::from_int(rng.gen_range(-3..=3))).collect()
            }
            (None, None) => vec![T::zero(); system.n()],
        };
        return Ok((Box::new(SimulatedPlant::new(system, x0)?), None));
    }
    let path = p.replay_log.as_ref().expect("validated plant source");
    let log = io::read_log::<T>(path)?;
    Ok((Box::new(ReplayPlant::new(log.clone())), Some(log)))
}

fn build_policy<T: Scalar>(
    spec: &PolicySpec,
    seed: u64,
    replay: Option<&ExperimentLog<T>>,
) -> Result<InputPolicy<T>, Failure> {
    Ok(match spec {
        PolicySpec::CanonicalScan => InputPolicy::CanonicalScan,
        PolicySpec::ClosedForm => InputPolicy::ClosedForm,
        PolicySpec::SeededRandom { seed: s } => InputPolicy::SeededRandom { seed: s.unwrap_or(seed) },
        PolicySpec::Replay { inputs, strict } => {
            let inputs = match (inputs, replay) {
                (Some(rows), _) => parse_rows("policy.inputs", rows)?,
                (None, Some(log)) => log.inputs(),
                (None, None) => return Err(Failure::usage("replay policy has no inputs")),
            };
            InputPolicy::Replay { inputs, strict: *strict }
        }
    })
}

fn run_once<T: Scalar>(
    cfg: &RunConfig,
    (lag_bound, state_bound): (usize, usize),
    seed: u64,
    out_dir: &Path,
) -> Result<RunOutcome, Failure> {
    let (mut plant, replay) = build_plant::<T>(cfg, seed)?;
    let policy = build_policy(&cfg.policy, seed, replay.as_ref())?;
    let options = ExperimentOptions {
        initial_block: cfg.initial_block.as_ref().map(|r| parse_rows("initial_block", r)).transpose()?,
        free_input: cfg.free_input.as_ref().map(|v| parse_vec("free_input", v)).transpose()?,
    };
    let (log, trace): (ExperimentLog<T>, DesignTrace<T>) =
        online_experiment(plant.as_mut(), lag_bound, state_bound, &policy, &options)?;
    let report = check_informativity(&log, lag_bound, state_bound)?;
    let summary = serde_json::to_string_pretty(&RunSummary {
        report: &report,
        lag_bound,
        state_bound,
        final_k: trace.final_k,
        mode: T::MODE,
        policy: policy.name(),
        seed,
    })
    .expect("plain data serializes");
    create_dir(out_dir)?;
    io::write_log(&out_dir.join(&cfg.output.log), &log)?;
    write_file(&out_dir.join(&cfg.output.trace), &io::trace_to_jsonl(&trace))?;
    write_file(&out_dir.join(&cfg.output.report), &(summary.clone() + "\n"))?;
    Ok(RunOutcome {
        informative: report.informative,
        summary,
    })
}

fn run_in_mode(cfg: &RunConfig, mode: Mode, bounds: (usize, usize), seed: u64, out: &Path) -> Result<RunOutcome, Failure> {
    match mode {
        Mode::Exact => run_once::<Rational>(cfg, bounds, seed, out),
        Mode::Float => run_once::<f64>(cfg, bounds, seed, out),
    }
}

fn parse_mode(s: &str) -> Result<Mode, Failure> {
    match s {
        "exact" => Ok(Mode::Exact),
        "float" => Ok(Mode::Float),
        other => Err(Failure::usage(format!("unknown mode {other:?}; use exact or float"))),
    }
}

pub fn run(
    config: &Path,
    bounds: &Bounds,
    mode: Option<Mode>,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    trials: Option<usize>,
) -> CmdResult {
    let cfg = RunConfig::load(config).map_err(Failure::usage)?;
    let mode = match mode {
        Some(m) => m,
        None => cfg.mode.as_deref().map(parse_mode).transpose()?.unwrap_or(Mode::Exact),
    };
    let b = bounds_or(bounds, cfg.lag_bound, cfg.state_bound)?;
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let out = out_dir.or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("."));

    let Some(k) = trials else {
        let outcome = run_in_mode(&cfg, mode, b, seed, &out)?;
        println!("{}", outcome.summary);
        return Ok(if outcome.informative { Status::Ok } else { Status::Negative });
    };
    if k == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let results: Vec<(u64, Result<RunOutcome, Failure>)> = (0..k as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed + i;
            (s, run_in_mode(&cfg, mode, b, s, &out.join(format!("trial_{i}"))))
        })
        .collect();
    let mut worst = Status::Ok;
    for (i, (s, r)) in results.iter().enumerate() {
        match r {
            Ok(o) if o.informative => println!("trial {i} seed {s}: informative"),
            Ok(_) => {
                println!("trial {i} seed {s}: not informative");
                worst = worst.max(Status::Negative);
            }
            Err(f) => {
                println!("trial {i} seed {s}: error: {}", f.message);
                worst = worst.max(f.code);
            }
        }
    }
    Ok(worst)
}

fn check_in<T: Scalar>(log_path: &Path, b: (usize, usize)) -> Result<(InformativityReport, ExperimentLog<T>), Failure> {
    let log = io::read_log::<T>(log_path)?;
    let report = check_informativity(&log, b.0, b.1)?;
    Ok((report, log))
}

pub fn check(log: &Path, bounds: &Bounds, mode: Mode, out_dir: Option<PathBuf>) -> CmdResult {
    let b = bounds_or(bounds, None, None)?;
    let report = match mode {
        Mode::Exact => check_in::<Rational>(log, b)?.0,
        Mode::Float => check_in::<f64>(log, b)?.0,
    };
    let json = io::report_to_json(&report);
    println!("{json}");
    if let Some(dir) = out_dir {
        create_dir(&dir)?;
        write_file(&dir.join("report.json"), &(json + "\n"))?;
    }
    if let Some(reason) = report.failing_condition() {
        eprintln!("not informative: {reason}");
        return Ok(Status::Negative);
    }
    Ok(Status::Ok)
}

fn identify_in<T: Scalar>(log_path: &Path, b: (usize, usize), out_dir: Option<PathBuf>) -> CmdResult {
    let (report, log) = check_in::<T>(log_path, b)?;
    if let Some(reason) = report.failing_condition() {
        eprintln!("not informative: {reason}");
        return Ok(Status::Negative);
    }
    let model = identify_model(&log, &report)?;
    let json = io::model_to_json(
        &model,
        Provenance {
            source: log_path.display().to_string(),
            mode: T::MODE.to_string(),
            seed: None,
        },
    );
    match out_dir {
        Some(dir) => {
            create_dir(&dir)?;
            let path = dir.join("model.json");
            write_file(&path, &(json + "\n"))?;
            println!("states: {}", model.system.n());
            println!("residual: {}", model.residual.to_text());
            println!("model: {}", path.display());
        }
        None => {
            println!("{json}");
            eprintln!("residual: {}", model.residual.to_text());
        }
    }
    Ok(Status::Ok)
}

pub fn identify(log: &Path, bounds: &Bounds, mode: Mode, out_dir: Option<PathBuf>) -> CmdResult {
    let b = bounds_or(bounds, None, None)?;
    match mode {
        Mode::Exact => identify_in::<Rational>(log, b, out_dir),
        Mode::Float => identify_in::<f64>(log, b, out_dir),
    }
}

fn parse_corruption(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::usage(format!("--corrupt expects T,I with I ≥ 1, got {s:?}"));
    let (t, i) = s.split_once(',').ok_or_else(bad)?;
    let t: usize = t.trim().parse().map_err(|_| bad())?;
    let i: usize = i.trim().parse().map_err(|_| bad())?;
    if i == 0 {
        return Err(bad());
    }
    Ok((t, i - 1))
}

pub fn reproduce(mode: Mode, corrupt: Option<&str>) -> CmdResult {
    let corrupt_output = corrupt.map(parse_corruption).transpose()?;
    if let Some((t, i)) = corrupt_output {
        if t >= online_sysid::fixtures::EXAMPLE_T || i >= 2 {
            return Err(Failure::usage("corruption target outside the recorded data"));
        }
    }
    let options = ReproduceOptions { corrupt_output };
    let rep = match mode {
        Mode::Exact => reproduce_checks::<Rational>(&options)?,
        Mode::Float => reproduce_checks::<f64>(&options)?,
    };
    print!("{}", rep.table());
    match rep.first_failure() {
        None => {
            println!("all {} checks passed", rep.checks.len());
            Ok(Status::Ok)
        }
        Some(c) => {
            eprintln!(
                "first mismatch: {}: expected {}, got {}",
                c.name, c.expected, c.actual
            );
            Ok(Status::Negative)
        }
    }
}

fn compare_in<T: Scalar>(a: &Path, b: &Path) -> CmdResult {
    let read = |p: &Path| -> Result<_, Failure> {
        let text = std::fs::read_to_string(p)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", p.display())))?;
        Ok(io::any_system_from_json::<T>(&text)?)
    };
    let (s1, s2) = (read(a)?, read(b)?);
    let iso = are_isomorphic(&s1, &s2)?;
    println!("states: {} vs {}", s1.n(), s2.n());
    println!("isomorphic: {iso}");
    Ok(if iso { Status::Ok } else { Status::Negative })
}

pub fn compare(
    systems: &[PathBuf],
    bounds: &Bounds,
    mode: Mode,
    inputs: Option<usize>,
    lag: Option<usize>,
    states: Option<usize>,
) -> CmdResult {
    match systems {
        [a, b] => match mode {
            Mode::Exact => compare_in::<Rational>(a, b),
            Mode::Float => compare_in::<f64>(a, b),
        },
        [] => {
            let (l, n) = bounds_or(bounds, None, None)?;
            let (Some(m), Some(ell), Some(nt)) = (inputs, lag, states) else {
                return Err(Failure::usage(
                    "give two system files, or --inputs, --lag, --states with -L and --upper-n",
                ));
            };
            let c = baseline_sample_counts(m, l, n, ell, nt)?;
            println!("m = {m}, L = {l}, N = {n}, lag = {ell}, states = {nt}");
            println!("{:<28} {:>10}", "design", "samples");
            println!("{:<28} {:>10}", "online, adaptive depth", c.online);
            println!("{:<28} {:>10}", "persistency of excitation", c.persistency);
            println!("{:<28} {:>10}", "online, fixed depth", c.fixed_depth);
            Ok(Status::Ok)
        }
        _ => Err(Failure::usage("compare takes exactly two system files")),
    }
}
