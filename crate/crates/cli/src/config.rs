//! Sectioned key-value run configuration.
//!
//! The format is deliberately plain: `[section]` headers, `key = value`
//! lines, `#` comments. Every key must be consumed by the schema below;
//! unknown sections or keys are errors so typos cannot silently change a
//! run. The raw text is kept for verbatim echoing into outputs.
//!
//! ```text
//! format_version = 1
//!
//! [function]
//! family = power          # constant | power | logpower | table
//! gamma = 0.5             # p = ... for constant, beta = ... for logpower,
//!                         # path = values.txt (+ table_gamma) for table
//! z_index = next          # next | current
//!
//! [run]
//! kind = maxdeg           # gen | martingale | maxdeg | outbreak |
//!                         # recurrence | conditions
//! seed = 42
//! replicas = 500
//! threads = 0             # 0 = all cores
//! out_dir = out
//! ```
//!
//! plus one section per kind (`[gen]`, `[martingale]`, `[maxdeg]`,
//! `[outbreak]`, `[recurrence]`, `[conditions]`) holding its grids.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use edgestep::experiments::{
    ConditionsParams, ExperimentConfig, ExperimentKind, MartingaleParams, MaxDegreeParams,
    OutbreakParams, RecurrenceParams, VertexPick,
};
use edgestep::{EdgeStepFunction, RateSequence, StepIndexConvention};

/// A configuration problem: reported with exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()))
}

/// What to run, parsed and validated.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub function: EdgeStepFunction,
    pub convention: StepIndexConvention,
    pub kind: RunKind,
    pub seed: u64,
    pub replicas: u64,
    pub threads: usize,
    pub out_dir: PathBuf,
    /// The raw config text, echoed into outputs.
    pub raw_text: String,
}

#[derive(Debug, Clone)]
pub enum RunKind {
    Gen {
        t_final: u64,
        snapshots: Vec<u64>,
        step_log: bool,
    },
    Experiment(ExperimentKind),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parses and validates; `base_dir` anchors relative paths inside the
    /// config (e.g. table files).
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut sections = Sections::parse(text)?;

        if let Some(v) = sections.take("", "format_version")? {
            if v.trim() != "1" {
                return err(format!("format_version: unsupported version `{v}`"));
            }
        }

        let function = parse_function(&mut sections, base_dir)?;
        let convention = match sections.take("function", "z_index")?.as_deref() {
            None | Some("next") => StepIndexConvention::Next,
            Some("current") => StepIndexConvention::Current,
            Some(other) => return err(format!("z_index: expected next|current, got `{other}`")),
        };

        let kind_name = sections.require("run", "kind")?;
        let seed = sections.parse_or("run", "seed", 0u64)?;
        let replicas = sections.parse_or("run", "replicas", 1u64)?;
        let threads = sections.parse_or("run", "threads", 0usize)?;
        let out_dir = PathBuf::from(
            sections
                .take("run", "out_dir")?
                .unwrap_or_else(|| "out".to_string()),
        );

        let kind = match kind_name.as_str() {
            "gen" => RunKind::Gen {
                t_final: sections.parse_require("gen", "t")?,
                snapshots: sections.parse_list_or("gen", "snapshots", Vec::new())?,
                step_log: sections.parse_or("gen", "step_log", false)?,
            },
            "martingale" => RunKind::Experiment(ExperimentKind::Martingale(MartingaleParams {
                tracked_time: sections.parse_require("martingale", "n")?,
                s_grid: sections.parse_list_require("martingale", "s_grid")?,
            })),
            "maxdeg" => RunKind::Experiment(ExperimentKind::MaxDegree(MaxDegreeParams {
                t_grid: sections.parse_list_require("maxdeg", "t_grid")?,
                n_grid: sections.parse_list_require("maxdeg", "n_grid")?,
            })),
            "outbreak" => RunKind::Experiment(ExperimentKind::Outbreak(OutbreakParams {
                t_grid: sections.parse_list_require("outbreak", "t_grid")?,
                r: sections.parse_require("outbreak", "r")?,
                rate: parse_rate(&sections.require("outbreak", "rate")?)?,
                c_list: sections.parse_list_or("outbreak", "c_list", Vec::new())?,
                runs_per_graph: sections.parse_or("outbreak", "runs_per_graph", 1u64)?,
                max_rounds: sections.parse_or("outbreak", "max_rounds", 1_000_000u64)?,
            })),
            "recurrence" => RunKind::Experiment(ExperimentKind::Recurrence(RecurrenceParams {
                s_grid: sections.parse_list_require("recurrence", "s_grid")?,
                picks: parse_picks(&sections.require("recurrence", "vertices")?)?,
                resamples: sections.parse_require("recurrence", "resamples")?,
            })),
            "conditions" => RunKind::Experiment(ExperimentKind::Conditions(parse_conditions(
                &mut sections,
            )?)),
            other => return err(format!("kind: unknown experiment kind `{other}`")),
        };

        sections.reject_leftovers()?;

        Ok(Self {
            function,
            convention,
            kind,
            seed,
            replicas,
            threads,
            out_dir,
            raw_text: text.to_string(),
        })
    }

    /// The core experiment config for experiment kinds.
    pub fn experiment(&self, kind: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig {
            function: self.function.clone(),
            convention: self.convention,
            replicas: self.replicas,
            master_seed: self.seed,
            kind,
        }
    }
}

impl RunConfig {
    /// The `conditions` subcommand view: ignores `[run].kind` and reads the
    /// `[conditions]` section directly.
    fn parse_conditions_only(text: &str, base_dir: &Path) -> Result<(RunConfig, ConditionsParams)> {
        let mut sections = Sections::parse(text)?;
        if let Some(v) = sections.take("", "format_version")? {
            if v.trim() != "1" {
                return err(format!("format_version: unsupported version `{v}`"));
            }
        }
        let function = parse_function(&mut sections, base_dir)?;
        let convention = match sections.take("function", "z_index")?.as_deref() {
            None | Some("next") => StepIndexConvention::Next,
            Some("current") => StepIndexConvention::Current,
            Some(other) => return err(format!("z_index: expected next|current, got `{other}`")),
        };
        let params = parse_conditions(&mut sections)?;
        let seed = sections.parse_or("run", "seed", 0u64)?;
        let threads = sections.parse_or("run", "threads", 0usize)?;
        let out_dir = PathBuf::from(
            sections
                .take("run", "out_dir")?
                .unwrap_or_else(|| "out".to_string()),
        );
        // leftover keys in other sections are fine here: the same file may
        // describe a full experiment; the conditions view reads a subset
        let cfg = RunConfig {
            function,
            convention,
            kind: RunKind::Experiment(ExperimentKind::Conditions(params.clone())),
            seed,
            replicas: 1,
            threads,
            out_dir,
            raw_text: text.to_string(),
        };
        Ok((cfg, params))
    }

    pub fn load_conditions(path: &Path) -> Result<(RunConfig, ConditionsParams)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_conditions_only(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

fn parse_conditions(sections: &mut Sections) -> Result<ConditionsParams> {
    let tail_horizon = sections.parse_or("conditions", "tail_horizon", 1_000_000u64)?;
    Ok(ConditionsParams {
        grid: sections.parse_list_require("conditions", "grid")?,
        tail_horizon,
        table_horizon: sections.parse_or("conditions", "table_horizon", tail_horizon)?,
    })
}

fn parse_function(sections: &mut Sections, base_dir: &Path) -> Result<EdgeStepFunction> {
    let family = sections.require("function", "family")?;
    let built = match family.as_str() {
        "constant" => EdgeStepFunction::constant(sections.parse_require("function", "p")?),
        "power" => EdgeStepFunction::power(sections.parse_require("function", "gamma")?),
        "logpower" => EdgeStepFunction::log_power(sections.parse_require("function", "beta")?),
        "table" => {
            let rel: String = sections.require("function", "path")?;
            let path = base_dir.join(rel);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| ConfigError(format!("path: cannot read {}: {e}", path.display())))?;
            let mut values = Vec::new();
            for (idx, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let v: f64 = line.parse().map_err(|_| {
                    ConfigError(format!("path: bad table value at line {}", idx + 1))
                })?;
                values.push(v);
            }
            let gamma = sections.parse_or("function", "table_gamma", 0.0f64)?;
            EdgeStepFunction::from_table(values, gamma)
        }
        other => return err(format!("family: unknown function family `{other}`")),
    };
    built.map_err(|e| ConfigError(format!("{e}")))
}

fn parse_rate(text: &str) -> Result<RateSequence> {
    if text == "log" {
        return Ok(RateSequence::Log);
    }
    if text == "full" {
        return Ok(RateSequence::Full);
    }
    if let Some(alpha) = text.strip_prefix("power:") {
        return alpha
            .parse()
            .map(|alpha| RateSequence::Power { alpha })
            .map_err(|_| ConfigError(format!("rate: bad exponent in `{text}`")));
    }
    if let Some(c) = text.strip_prefix("const:") {
        return c
            .parse()
            .map(|c| RateSequence::Constant { c })
            .map_err(|_| ConfigError(format!("rate: bad level in `{text}`")));
    }
    err(format!(
        "rate: expected log|full|power:<alpha>|const:<c>, got `{text}`"
    ))
}

fn parse_picks(text: &str) -> Result<Vec<VertexPick>> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            match item {
                "first" => Ok(VertexPick::First),
                "max_degree" => Ok(VertexPick::MaxDegree),
                "mid_born" => Ok(VertexPick::MidBorn),
                "last_born" => Ok(VertexPick::LastBorn),
                other => {
                    if let Some(id) = other.strip_prefix("id:") {
                        id.parse()
                            .map(VertexPick::Id)
                            .map_err(|_| ConfigError(format!("vertices: bad id in `{other}`")))
                    } else {
                        err(format!("vertices: unknown selection `{other}`"))
                    }
                }
            }
        })
        .collect()
}

/// Raw parsed sections with consumption tracking.
struct Sections {
    // (section, key) -> value; consumed entries are removed
    entries: BTreeMap<(String, String), String>,
}

impl Sections {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError(format!("line {}: unterminated section", idx + 1)))?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected `key = value`", idx + 1)))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if entries
                .insert((section.clone(), key.clone()), value)
                .is_some()
            {
                return err(format!("line {}: duplicate key `{section}.{key}`", idx + 1));
            }
        }
        Ok(Self { entries })
    }

    fn take(&mut self, section: &str, key: &str) -> Result<Option<String>> {
        Ok(self
            .entries
            .remove(&(section.to_string(), key.to_string())))
    }

    fn require(&mut self, section: &str, key: &str) -> Result<String> {
        self.take(section, key)?
            .ok_or_else(|| ConfigError(format!("missing required key `{section}.{key}`")))
    }

    fn parse_require<T: FromStr>(&mut self, section: &str, key: &str) -> Result<T> {
        let raw = self.require(section, key)?;
        raw.parse()
            .map_err(|_| ConfigError(format!("{key}: cannot parse `{raw}`")))
    }

    fn parse_or<T: FromStr>(&mut self, section: &str, key: &str, default: T) -> Result<T> {
        match self.take(section, key)? {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| ConfigError(format!("{key}: cannot parse `{raw}`"))),
        }
    }

    fn parse_list_require<T: FromStr>(&mut self, section: &str, key: &str) -> Result<Vec<T>> {
        let raw = self.require(section, key)?;
        parse_list(&raw, key)
    }

    fn parse_list_or<T: FromStr>(
        &mut self,
        section: &str,
        key: &str,
        default: Vec<T>,
    ) -> Result<Vec<T>> {
        match self.take(section, key)? {
            None => Ok(default),
            Some(raw) => parse_list(&raw, key),
        }
    }

    fn reject_leftovers(&self) -> Result<()> {
        if let Some(((section, key), _)) = self.entries.iter().next() {
            let name = if section.is_empty() {
                key.clone()
            } else {
                format!("{section}.{key}")
            };
            return err(format!("unknown key `{name}`"));
        }
        Ok(())
    }
}

fn parse_list<T: FromStr>(raw: &str, key: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(|item| {
            item.trim()
                .parse()
                .map_err(|_| ConfigError(format!("{key}: cannot parse `{}`", item.trim())))
        })
        .collect()
}
