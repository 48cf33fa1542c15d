//! Run configuration: a single JSON document.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use online_sysid::io::SystemFile;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub plant: PlantSpec,
    #[serde(rename = "L")]
    pub lag_bound: Option<usize>,
    #[serde(rename = "N")]
    pub state_bound: Option<usize>,
    #[serde(default)]
    pub policy: PolicySpec,
    pub mode: Option<String>,
    pub seed: Option<u64>,
    /// Rows of the initial `m × m` input block.
    pub initial_block: Option<Vec<Vec<String>>>,
    pub free_input: Option<Vec<String>>,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Exactly one of `system`, `system_path`, `replay_log` or `random` must be set.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSpec {
    pub system: Option<SystemFile>,
    pub system_path: Option<PathBuf>,
    /// Initial state; zero when omitted.
    pub x0: Option<Vec<String>>,
    pub replay_log: Option<PathBuf>,
    /// A random minimal system drawn from the run seed.
    pub random: Option<RandomPlant>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPlant {
    pub n: usize,
    pub m: usize,
    pub p: usize,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolicySpec {
    #[default]
    CanonicalScan,
    ClosedForm,
    SeededRandom {
        seed: Option<u64>,
    },
    /// Recorded inputs as rows (one row per input channel); taken from the
    /// replay log when omitted.
    Replay {
        inputs: Option<Vec<Vec<String>>>,
        #[serde(default)]
        strict: bool,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    #[serde(default = "default_log")]
    pub log: String,
    #[serde(default = "default_trace")]
    pub trace: String,
    #[serde(default = "default_report")]
    pub report: String,
}

fn default_log() -> String {
    "log.csv".into()
}

fn default_trace() -> String {
    "trace.jsonl".into()
}

fn default_report() -> String {
    "report.json".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: None,
            log: default_log(),
            trace: default_trace(),
            report: default_report(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(p) = p {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        };
        fix(&mut self.plant.system_path);
        fix(&mut self.plant.replay_log);
        fix(&mut self.output.dir);
    }

    pub fn validate(&self) -> Result<(), String> {
        let p = &self.plant;
        let sources = [
            p.system.is_some(),
            p.system_path.is_some(),
            p.replay_log.is_some(),
            p.random.is_some(),
        ];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(
                "plant needs exactly one of system, system_path, replay_log, random".into(),
            );
        }
        if p.x0.is_some() && (p.replay_log.is_some() || p.random.is_some()) {
            return Err("x0 only applies to system and system_path plants".into());
        }
        if let PolicySpec::Replay { inputs: None, .. } = self.policy {
            if p.replay_log.is_none() {
                return Err("replay policy needs inputs unless the plant is a replay log".into());
            }
        }
        Ok(())
    }
}
