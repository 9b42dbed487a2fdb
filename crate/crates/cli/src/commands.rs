//! Subcommand implementations: load config, run the requested job, write
//! artifacts and a manifest.
//!
//! Error policy: anything wrong with *inputs* (config file unreadable or
//! malformed, values out of range, a referenced Q-table missing) is a
//! [`CliError::Config`] and exits 2; anything that fails while *writing
//! artifacts* is a [`CliError::Io`] and exits 3.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use energentic::export::{
    compare_csv, heatmap_csv, horizon_map_csv, sha256_hex, training_log_csv, trajectory_csv,
};
use energentic::metrics::compute_report;
use energentic::policy::{train, Policy, QTable};
use energentic::simulation::{heatmap_channels, run_episode, sweep_horizon_map, Trajectory};

use crate::config::{PolicySelector, RunConfig};

/// A failure with a defined process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad or inconsistent input; exits 2.
    Config(String),
    /// Artifact writing failed; exits 3.
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

fn config_error(err: impl fmt::Display) -> CliError {
    CliError::Config(err.to_string())
}

/// A parsed and validated config plus the digest of its exact bytes.
pub struct Loaded {
    pub config: RunConfig,
    pub config_digest: String,
}

/// Read, parse, and validate a config file.
pub fn load_config(path: &Path) -> Result<Loaded, CliError> {
    let bytes = fs::read(path).map_err(|e| {
        CliError::Config(format!("cannot read config `{}`: {e}", path.display()))
    })?;
    let config: RunConfig = serde_json::from_slice(&bytes).map_err(|e| {
        CliError::Config(format!("invalid config `{}`: {e}", path.display()))
    })?;
    config.validate().map_err(config_error)?;
    Ok(Loaded {
        config,
        config_digest: sha256_hex(&bytes),
    })
}

fn resolve_out_dir(cli_out: Option<PathBuf>, config: &RunConfig) -> Result<PathBuf, CliError> {
    cli_out.or_else(|| config.output_dir.clone()).ok_or_else(|| {
        CliError::Config(
            "no output directory: pass --out or set `output_dir` in the config".into(),
        )
    })
}

fn create_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| {
        CliError::Io(format!("cannot create output directory `{}`: {e}", dir.display()))
    })
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", path.display())))
}

fn load_qtable(path: &Path) -> Result<QTable, CliError> {
    let bytes = fs::read(path).map_err(|e| {
        CliError::Config(format!(
            "cannot read Q-table `{}` (train one first?): {e}",
            path.display()
        ))
    })?;
    let table: QTable = serde_json::from_slice(&bytes).map_err(|e| {
        CliError::Config(format!("invalid Q-table `{}`: {e}", path.display()))
    })?;
    table.validate().map_err(config_error)?;
    Ok(table)
}

fn build_policy(selector: &PolicySelector) -> Result<Policy, CliError> {
    match selector {
        PolicySelector::FixedCompute => Ok(Policy::FixedCompute),
        PolicySelector::GreedyHarvest => Ok(Policy::GreedyHarvest),
        PolicySelector::QLearning {
            qtable_path,
            epsilon,
        } => {
            let path = qtable_path.as_ref().ok_or_else(|| {
                CliError::Config(
                    "`policy.q_learning.qtable_path` is required; train a table first".into(),
                )
            })?;
            Ok(Policy::QLearning {
                table: load_qtable(path)?,
                epsilon: *epsilon,
            })
        }
    }
}

/// Provenance record written next to every artifact set. Identifies
/// inputs by content digest, never by path.
#[derive(Serialize)]
struct Manifest {
    command: &'static str,
    config_digest: String,
    env_digest: String,
    seed: u64,
    policy: String,
    artifacts: BTreeMap<String, String>,
    metadata: BTreeMap<String, String>,
}

fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes to JSON");
    write_artifact(dir, "manifest.json", &format!("{json}\n"))
}

fn artifact_map(names: &[&str]) -> BTreeMap<String, String> {
    names
        .iter()
        .map(|n| (n.to_string(), n.to_string()))
        .collect()
}

fn pretty_json<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_string_pretty(value).expect("value serializes to JSON");
    format!("{json}\n")
}

/// `run`: one episode -> trajectory.csv, metrics.json, heatmap.csv.
pub fn cmd_run(
    config_path: &Path,
    out: Option<PathBuf>,
    seed_override: Option<u64>,
) -> Result<(), CliError> {
    let loaded = load_config(config_path)?;
    let config = &loaded.config;
    let seed = seed_override.unwrap_or(config.seed);
    let out_dir = resolve_out_dir(out, config)?;
    let policy = build_policy(&config.policy)?;

    let traj = run_episode(
        &config.environment,
        &policy,
        &config.init,
        seed,
        &config.forecaster,
        &config.thresholds,
    )
    .map_err(config_error)?;
    let report = compute_report(&traj, config.environment.t_crit).map_err(config_error)?;
    let channels = heatmap_channels(&traj, &config.environment).map_err(config_error)?;

    create_out_dir(&out_dir)?;
    write_artifact(&out_dir, "trajectory.csv", &trajectory_csv(&traj))?;
    write_artifact(&out_dir, "metrics.json", &pretty_json(&report))?;
    write_artifact(&out_dir, "heatmap.csv", &heatmap_csv(&channels))?;
    let mut metadata = BTreeMap::new();
    metadata.insert(
        "viability_channel".to_string(),
        "autonomy score (EAS) over the trajectory prefix, substituted for an instantaneous \
         viability index"
            .to_string(),
    );
    metadata.insert(
        "terminal_cause".to_string(),
        traj.termination.cause.label().to_string(),
    );
    write_manifest(
        &out_dir,
        &Manifest {
            command: "run",
            config_digest: loaded.config_digest,
            env_digest: traj.env_digest.clone(),
            seed,
            policy: config.policy.label().to_string(),
            artifacts: artifact_map(&["trajectory.csv", "metrics.json", "heatmap.csv"]),
            metadata,
        },
    )?;
    println!(
        "run: {} steps ({}), eas {:.6}, artifacts in {}",
        traj.num_steps(),
        traj.termination.cause.label(),
        report.eas,
        out_dir.display()
    );
    Ok(())
}

/// `train`: Q-learning -> qtable.json, training_log.csv.
pub fn cmd_train(
    config_path: &Path,
    out: Option<PathBuf>,
    seed_override: Option<u64>,
) -> Result<(), CliError> {
    let loaded = load_config(config_path)?;
    let config = &loaded.config;
    let training = config.training.as_ref().ok_or_else(|| {
        CliError::Config("a `training` section is required for the train command".into())
    })?;
    let seed = seed_override.unwrap_or(config.seed);
    let out_dir = resolve_out_dir(out, config)?;

    let (table, log) = train(
        &config.environment,
        &config.reward,
        &config.init,
        training,
        seed,
    )
    .map_err(config_error)?;

    create_out_dir(&out_dir)?;
    write_artifact(&out_dir, "qtable.json", &pretty_json(&table))?;
    write_artifact(&out_dir, "training_log.csv", &training_log_csv(&log))?;
    let mut metadata = BTreeMap::new();
    metadata.insert("episodes".to_string(), training.episodes.to_string());
    metadata.insert("table_rows".to_string(), table.len().to_string());
    write_manifest(
        &out_dir,
        &Manifest {
            command: "train",
            config_digest: loaded.config_digest,
            env_digest: config.environment.digest(),
            seed,
            policy: "q_learning".to_string(),
            artifacts: artifact_map(&["qtable.json", "training_log.csv"]),
            metadata,
        },
    )?;
    let final_length = log.last().map_or(0, |e| e.length);
    println!(
        "train: {} episodes, final episode survived {} steps, {} table rows, artifacts in {}",
        training.episodes,
        final_length,
        table.len(),
        out_dir.display()
    );
    Ok(())
}

/// `sweep`: horizon map over initial conditions -> horizon_map.csv.
pub fn cmd_sweep(
    config_path: &Path,
    out: Option<PathBuf>,
    seed_override: Option<u64>,
    threads: usize,
) -> Result<(), CliError> {
    let loaded = load_config(config_path)?;
    let config = &loaded.config;
    let sweep = config.sweep.as_ref().ok_or_else(|| {
        CliError::Config("a `sweep` section is required for the sweep command".into())
    })?;
    let seed = seed_override.unwrap_or(config.seed);
    let out_dir = resolve_out_dir(out, config)?;
    let policy = build_policy(&config.policy)?;

    let map = sweep_horizon_map(
        &config.environment,
        &policy,
        (config.init.x, config.init.y),
        &sweep.e0.axis(),
        &sweep.t0.axis(),
        seed,
        threads,
    )
    .map_err(config_error)?;

    create_out_dir(&out_dir)?;
    write_artifact(&out_dir, "horizon_map.csv", &horizon_map_csv(&map))?;
    let mut metadata = BTreeMap::new();
    metadata.insert(
        "grid".to_string(),
        format!("{}x{}", map.t0_axis.len(), map.e0_axis.len()),
    );
    write_manifest(
        &out_dir,
        &Manifest {
            command: "sweep",
            config_digest: loaded.config_digest,
            env_digest: config.environment.digest(),
            seed,
            policy: config.policy.label().to_string(),
            artifacts: artifact_map(&["horizon_map.csv"]),
            metadata,
        },
    )?;
    println!(
        "sweep: {} t0 x {} e0 cells, artifacts in {}",
        map.t0_axis.len(),
        map.e0_axis.len(),
        out_dir.display()
    );
    Ok(())
}

/// `compare`: the three baseline policies on one seed -> compare.csv.
pub fn cmd_compare(
    config_path: &Path,
    out: Option<PathBuf>,
    seed_override: Option<u64>,
) -> Result<(), CliError> {
    let loaded = load_config(config_path)?;
    let config = &loaded.config;
    let compare = config.compare.as_ref().ok_or_else(|| {
        CliError::Config("a `compare` section is required for the compare command".into())
    })?;
    let seed = seed_override.unwrap_or(config.seed);
    let out_dir = resolve_out_dir(out, config)?;
    let table = load_qtable(&compare.qtable_path)?;

    let run_one = |policy: &Policy| -> Result<Trajectory, CliError> {
        run_episode(
            &config.environment,
            policy,
            &config.init,
            seed,
            &config.forecaster,
            &config.thresholds,
        )
        .map_err(config_error)
    };
    let fixed = run_one(&Policy::FixedCompute)?;
    let greedy = run_one(&Policy::GreedyHarvest)?;
    let survival = run_one(&Policy::QLearning {
        table,
        epsilon: 0.0,
    })?;

    create_out_dir(&out_dir)?;
    write_artifact(
        &out_dir,
        "compare.csv",
        &compare_csv(
            &fixed.energy_series(),
            &greedy.energy_series(),
            &survival.energy_series(),
        ),
    )?;
    let mut metadata = BTreeMap::new();
    for (name, traj) in [
        ("fixed_compute", &fixed),
        ("greedy_harvest", &greedy),
        ("survival", &survival),
    ] {
        metadata.insert(
            format!("{name}_lifespan"),
            format!("{} ({})", traj.num_steps(), traj.termination.cause.label()),
        );
    }
    write_manifest(
        &out_dir,
        &Manifest {
            command: "compare",
            config_digest: loaded.config_digest,
            env_digest: config.environment.digest(),
            seed,
            policy: "fixed_compute,greedy_harvest,q_learning".to_string(),
            artifacts: artifact_map(&["compare.csv"]),
            metadata,
        },
    )?;
    println!(
        "compare: fixed {} / greedy {} / survival {} steps, artifacts in {}",
        fixed.num_steps(),
        greedy.num_steps(),
        survival.num_steps(),
        out_dir.display()
    );
    Ok(())
}
