//! Experiment configuration: a flat key-value text file with `[section]`
//! headers. No environment variables are consulted, so a run is fully
//! reproducible from the file plus CLI overrides.
//!
//! ```text
//! [experiment]
//! topology = configs/x4600_like.topo
//! seed = 42
//! reps = 5
//!
//! [benchmark]
//! name = fft
//! n = 131072
//! cutoff = 16
//!
//! [sweep]
//! policies = bf,wf,dfwspt,dfwsrpt
//! placements = numa,naive
//! threads = 1,2,4,8,16
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::ConfigError;
use crate::policy::PolicyKind;
use crate::sim::{LatencyModel, StealCost};
use crate::taskgen::{Benchmark, GraphSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacementMode {
    /// Master on a highest-priority core, workers nearest-first.
    NumaAware,
    /// Master on core 0, workers on ascending core ids.
    NaiveFirstCore,
}

impl PlacementMode {
    pub fn name(self) -> &'static str {
        match self {
            PlacementMode::NumaAware => "numa",
            PlacementMode::NaiveFirstCore => "naive",
        }
    }
}

impl FromStr for PlacementMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "numa" => Ok(PlacementMode::NumaAware),
            "naive" => Ok(PlacementMode::NaiveFirstCore),
            other => Err(format!("unknown placement '{other}' (expected numa|naive)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Table,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "table" => Ok(OutputFormat::Table),
            other => Err(format!("unknown format '{other}' (expected csv|table)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub topology_path: PathBuf,
    pub benchmark: GraphSpec,
    pub policies: Vec<PolicyKind>,
    pub placements: Vec<PlacementMode>,
    pub team_sizes: Vec<usize>,
    /// None means the default weight rule (powers of two by distance).
    pub weights: Option<Vec<u128>>,
    pub latency: LatencyModel,
    pub seed: u64,
    pub repetitions: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub native: bool,
    pub pin: bool,
}

struct Sections {
    path: String,
    map: BTreeMap<String, (usize, String)>, // "section.key" -> (line, value)
}

impl Sections {
    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|(_, v)| v.as_str())
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|e| ConfigError::Parse {
                path: self.path.clone(),
                line: *line,
                msg: format!("{key} = {v}: {e}"),
            }),
        }
    }

    fn parse_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<T>().map_err(|e| ConfigError::Parse {
                        path: self.path.clone(),
                        line: *line,
                        msg: format!("{key}: bad element '{}': {e}", tok.trim()),
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.parse(key)?.ok_or_else(|| ConfigError::MissingKey {
            path: self.path.clone(),
            key: key.to_string(),
        })
    }
}

fn read_sections(path: &Path, text: &str) -> Result<Sections, ConfigError> {
    let path_str = path.display().to_string();
    let mut map = BTreeMap::new();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Parse {
                path: path_str,
                line: lineno,
                msg: format!("expected 'key = value', got '{line}'"),
            });
        };
        // strip trailing same-line comments
        let value = value.split('#').next().unwrap_or("").trim().to_string();
        let full = if section.is_empty() {
            key.trim().to_string()
        } else {
            format!("{section}.{}", key.trim())
        };
        if map.insert(full.clone(), (lineno, value)).is_some() {
            return Err(ConfigError::Parse {
                path: path_str,
                line: lineno,
                msg: format!("duplicate key '{full}'"),
            });
        }
    }
    Ok(Sections { path: path_str, map })
}

/// Loads and validates an experiment config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let s = read_sections(path, &text)?;

    let topology_rel: String = s.require("experiment.topology")?;
    // topology paths are relative to the config file's directory
    let topology_path = match path.parent() {
        Some(dir) if !Path::new(&topology_rel).is_absolute() => dir.join(&topology_rel),
        _ => PathBuf::from(&topology_rel),
    };

    let bench_name: String = s.require("benchmark.name")?;
    let benchmark = Benchmark::from_str(&bench_name).map_err(|e| ConfigError::Invalid {
        path: s.path.clone(),
        msg: e.to_string(),
    })?;
    let mut spec = GraphSpec::desk_scale(benchmark, s.parse("benchmark.seed")?.unwrap_or(1));
    if let Some(n) = s.parse("benchmark.n")? {
        spec.n = n;
    }
    if let Some(cutoff) = s.parse("benchmark.cutoff")? {
        spec.cutoff = cutoff;
    }
    if let Some(jitter) = s.parse("benchmark.jitter")? {
        spec.jitter = jitter;
    }

    let mut latency = LatencyModel::default();
    if let Some(v) = s.parse("latency.local_access_cost")? {
        latency.local_access_cost = v;
    }
    if let Some(v) = s.parse_list("latency.numa_factor")? {
        latency.numa_factor = v;
    }
    if let Some(v) = s.parse("latency.steal_base")? {
        latency.steal_cost = StealCost { base: v, ..latency.steal_cost };
    }
    if let Some(v) = s.parse("latency.steal_per_hop")? {
        latency.steal_cost = StealCost { per_hop: v, ..latency.steal_cost };
    }
    if let Some(v) = s.parse("latency.shared_queue_cost")? {
        latency.shared_queue_cost = v;
    }
    if let Some(v) = s.parse("latency.warm_discount")? {
        latency.warm_data_discount = v;
    }

    let policies = s
        .parse_list::<PolicyKind>("sweep.policies")?
        .ok_or_else(|| ConfigError::MissingKey { path: s.path.clone(), key: "sweep.policies".into() })?;
    let placements = s
        .parse_list::<PlacementMode>("sweep.placements")?
        .unwrap_or(vec![PlacementMode::NumaAware]);
    let team_sizes = s
        .parse_list::<usize>("sweep.threads")?
        .ok_or_else(|| ConfigError::MissingKey { path: s.path.clone(), key: "sweep.threads".into() })?;

    let cfg = ExperimentConfig {
        topology_path,
        benchmark: spec,
        policies,
        placements,
        team_sizes,
        weights: s.parse_list::<u128>("weights.weights")?,
        latency,
        seed: s.parse("experiment.seed")?.unwrap_or(1),
        repetitions: s.parse("experiment.reps")?.unwrap_or(5),
        out: s.get("experiment.out").map(PathBuf::from),
        format: s.parse("experiment.format")?.unwrap_or(OutputFormat::Csv),
        native: false,
        pin: false,
    };
    validate_config(&cfg, &s.path)?;
    Ok(cfg)
}

fn validate_config(cfg: &ExperimentConfig, path: &str) -> Result<(), ConfigError> {
    let invalid = |msg: String| ConfigError::Invalid { path: path.to_string(), msg };
    if cfg.policies.is_empty() || cfg.team_sizes.is_empty() || cfg.placements.is_empty() {
        return Err(invalid("sweep must name at least one policy, placement and team size".into()));
    }
    if cfg.repetitions == 0 {
        return Err(invalid("reps must be >= 1".into()));
    }
    if cfg.team_sizes.iter().any(|&n| n == 0) {
        return Err(invalid("team sizes must be >= 1".into()));
    }
    cfg.latency.validate().map_err(|e| invalid(e.to_string()))?;
    Ok(())
}
