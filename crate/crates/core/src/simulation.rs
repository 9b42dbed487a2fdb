//! Seeded episode execution, operating-mode classification, horizon
//! sweeps over initial conditions, and plot-ready per-step channels.
//!
//! A trajectory records one row per state visited: `k` steps produce
//! `k + 1` rows. Row `t < k` carries the state *before* step `t` together
//! with the action taken from it and that step's energy ledger; the final
//! row carries the terminal state with no action and a zeroed ledger.
//! This makes the ledger identity `energy[t+1] = energy[t] + (e_in[t] -
//! e_out[t])` hold row by row, exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{apply_action, Action, AgentState, InitialConditions, TerminalCause};
use crate::environment::EnvironmentSpec;
use crate::error::Error;
use crate::metrics::{forecast_horizon, Forecaster};
use crate::policy::{select_action, Policy};

/// Coarse operating regime of a single step, for at-a-glance plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Doing nothing this step.
    Dormant,
    /// Acting with comfortable reserves and temperature.
    Active,
    /// Acting while energy-starved or near-critical heat.
    Degraded,
}

impl Mode {
    /// Stable lowercase label used in CSV output.
    pub fn label(self) -> &'static str {
        match self {
            Mode::Dormant => "dormant",
            Mode::Active => "active",
            Mode::Degraded => "degraded",
        }
    }
}

/// Thresholds separating [`Mode::Active`] from [`Mode::Degraded`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModeThresholds {
    /// Energy below `e_low * e_cap` counts as starved.
    pub e_low: f64,
    /// Temperature above `t_ambient + t_high * (t_crit - t_ambient)`
    /// counts as hot.
    pub t_high: f64,
}

impl Default for ModeThresholds {
    fn default() -> Self {
        ModeThresholds {
            e_low: 0.2,
            t_high: 0.8,
        }
    }
}

impl ModeThresholds {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.e_low.is_finite() && (0.0..=1.0).contains(&self.e_low)) {
            return Err(Error::invalid("thresholds.e_low", "must be in [0, 1]"));
        }
        if !(self.t_high.is_finite() && (0.0..=1.0).contains(&self.t_high)) {
            return Err(Error::invalid("thresholds.t_high", "must be in [0, 1]"));
        }
        Ok(())
    }
}

/// Classify the regime of taking `action` from `state`.
pub fn classify_mode(
    state: &AgentState,
    action: Action,
    spec: &EnvironmentSpec,
    thresholds: &ModeThresholds,
) -> Mode {
    if action == Action::Idle {
        return Mode::Dormant;
    }
    let starved = state.energy < thresholds.e_low * spec.e_cap;
    let hot = state.temperature
        > spec.t_ambient + thresholds.t_high * (spec.t_crit - spec.t_ambient);
    if starved || hot {
        Mode::Degraded
    } else {
        Mode::Active
    }
}

/// One recorded row of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Step count when this state was observed (0 for the start).
    pub step: u32,
    pub x: u32,
    pub y: u32,
    pub energy: f64,
    pub temperature: f64,
    /// Action taken from this state; `None` on the terminal row.
    pub action: Option<Action>,
    /// Energy credited by that action (0 on the terminal row).
    pub e_in: f64,
    /// Energy debited by that action (0 on the terminal row).
    pub e_out: f64,
    /// Regime of this row; the terminal row is classified against the
    /// action that produced it.
    pub mode: Mode,
    /// Estimated remaining lifetime at this row.
    pub forecast: f64,
}

/// Why and when an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Termination {
    pub cause: TerminalCause,
    /// Total steps taken (index of the terminal row).
    pub final_step: u32,
}

/// A complete episode: `final_step + 1` rows plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Digest of the environment that produced this run.
    pub env_digest: String,
    /// RNG seed the episode was run with.
    pub seed: u64,
    pub steps: Vec<StepRecord>,
    pub termination: Termination,
}

impl Trajectory {
    /// Number of steps taken (one less than the number of rows).
    pub fn num_steps(&self) -> u32 {
        self.steps.len().saturating_sub(1) as u32
    }

    /// Energy column, one value per row.
    pub fn energy_series(&self) -> Vec<f64> {
        self.steps.iter().map(|r| r.energy).collect()
    }
}

/// Run one episode of `policy` in `spec` from `init`, seeding a fresh
/// generator with `seed`.
///
/// The episode always terminates: the step budget is enforced by the
/// dynamics. Forecasts are filled in for every row using `forecaster`.
pub fn run_episode(
    spec: &EnvironmentSpec,
    policy: &Policy,
    init: &InitialConditions,
    seed: u64,
    forecaster: &Forecaster,
    thresholds: &ModeThresholds,
) -> Result<Trajectory, Error> {
    spec.validate()?;
    forecaster.validate()?;
    thresholds.validate()?;
    init.validate(spec)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut state = init.to_state();

    let termination = loop {
        let action = select_action(policy, &state, spec, &mut rng)?;
        let outcome = apply_action(&state, action, spec)?;
        steps.push(StepRecord {
            step: state.step,
            x: state.x,
            y: state.y,
            energy: state.energy,
            temperature: state.temperature,
            action: Some(action),
            e_in: outcome.e_in,
            e_out: outcome.e_out,
            mode: classify_mode(&state, action, spec, thresholds),
            forecast: 0.0,
        });
        state = outcome.next_state;
        if let Some(cause) = outcome.terminal {
            steps.push(StepRecord {
                step: state.step,
                x: state.x,
                y: state.y,
                energy: state.energy,
                temperature: state.temperature,
                action: None,
                e_in: 0.0,
                e_out: 0.0,
                mode: classify_mode(&state, action, spec, thresholds),
                forecast: 0.0,
            });
            break Termination {
                cause,
                final_step: state.step,
            };
        }
    };

    let mut traj = Trajectory {
        env_digest: spec.digest(),
        seed,
        steps,
        termination,
    };
    let forecasts = forecast_horizon(forecaster, &traj, spec.max_steps)?;
    for (row, forecast) in traj.steps.iter_mut().zip(forecasts) {
        row.forecast = forecast;
    }
    Ok(traj)
}

/// A survival-horizon map over a grid of initial conditions.
///
/// `cells[i][j]` is the lifespan starting at temperature `t0_axis[i]` and
/// energy `e0_axis[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonMap {
    pub e0_axis: Vec<f64>,
    pub t0_axis: Vec<f64>,
    pub cells: Vec<Vec<u32>>,
}

fn validate_axis(axis: &[f64], key: &str) -> Result<(), Error> {
    if axis.is_empty() {
        return Err(Error::invalid(key, "must not be empty"));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(key, "must be finite"));
    }
    if axis.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(key, "must be strictly increasing"));
    }
    Ok(())
}

/// Measure the empirical lifespan for every `(t0, e0)` pair, starting at
/// `position` and running `policy` with the *same* seed in every cell so
/// the map varies only with the initial conditions.
///
/// `threads` bounds the worker count; the output is byte-identical
/// regardless of its value because each cell's episode is independent and
/// results are written by index.
pub fn sweep_horizon_map(
    spec: &EnvironmentSpec,
    policy: &Policy,
    position: (u32, u32),
    e0_axis: &[f64],
    t0_axis: &[f64],
    seed: u64,
    threads: usize,
) -> Result<HorizonMap, Error> {
    spec.validate()?;
    validate_axis(e0_axis, "sweep.e0_axis")?;
    validate_axis(t0_axis, "sweep.t0_axis")?;
    // Every cell must be a legal starting point; checking the extremes up
    // front gives one clear error instead of a mid-sweep failure.
    for &energy in [e0_axis[0], *e0_axis.last().unwrap()].iter() {
        for &temperature in [t0_axis[0], *t0_axis.last().unwrap()].iter() {
            InitialConditions {
                x: position.0,
                y: position.1,
                energy,
                temperature,
            }
            .validate(spec)?;
        }
    }

    let cols = e0_axis.len();
    let total = t0_axis.len() * cols;
    let mut flat = vec![0u32; total];
    let workers = threads.max(1).min(total);
    let chunk_len = total.div_ceil(workers);
    let forecaster = Forecaster::Oracle;
    let thresholds = ModeThresholds::default();

    std::thread::scope(|scope| -> Result<(), Error> {
        let mut handles = Vec::with_capacity(workers);
        for (chunk_idx, chunk) in flat.chunks_mut(chunk_len).enumerate() {
            let offset = chunk_idx * chunk_len;
            handles.push(scope.spawn(move || -> Result<(), Error> {
                for (i, out) in chunk.iter_mut().enumerate() {
                    let idx = offset + i;
                    let init = InitialConditions {
                        x: position.0,
                        y: position.1,
                        energy: e0_axis[idx % cols],
                        temperature: t0_axis[idx / cols],
                    };
                    let traj =
                        run_episode(spec, policy, &init, seed, &forecaster, &thresholds)?;
                    *out = traj.num_steps();
                }
                Ok(())
            }));
        }
        for handle in handles {
            handle.join().expect("sweep worker panicked")?;
        }
        Ok(())
    })?;

    Ok(HorizonMap {
        e0_axis: e0_axis.to_vec(),
        t0_axis: t0_axis.to_vec(),
        cells: flat.chunks(cols).map(|row| row.to_vec()).collect(),
    })
}

/// Per-row normalized channels for heatmap-style plots: energy as a
/// fraction of `e_cap`, temperature as a fraction of the ambient-to-
/// critical band, and a viability channel — the autonomy score computed
/// over the trajectory prefix ending at that row. All three are clamped
/// to `[0, 1]`.
pub fn heatmap_channels(
    traj: &Trajectory,
    spec: &EnvironmentSpec,
) -> Result<Vec<(f64, f64, f64)>, Error> {
    let k = traj.num_steps() as usize;
    if k == 0 {
        return Err(Error::usage("trajectory contains no steps"));
    }
    let rows = &traj.steps;
    let band = spec.t_crit - spec.t_ambient;
    let channel = |row: &StepRecord, viability: f64| {
        (
            (row.energy / spec.e_cap).clamp(0.0, 1.0),
            ((row.temperature - spec.t_ambient) / band).clamp(0.0, 1.0),
            viability.clamp(0.0, 1.0),
        )
    };

    let mut out = Vec::with_capacity(k + 1);
    out.push(channel(&rows[0], 0.0));
    // Running prefix accumulators for the autonomy score: net energy on
    // active steps, overheated-step count, and absolute forecast error
    // against the realized horizon.
    let mut active_net = 0.0;
    let mut overheated = 0u32;
    let mut abs_err = 0.0;
    for t in 1..=k {
        let acted = &rows[t - 1];
        if acted.action != Some(Action::Idle) {
            active_net += acted.e_in - acted.e_out;
        }
        if rows[t].temperature > spec.t_crit {
            overheated += 1;
        }
        abs_err += (acted.forecast - (k - (t - 1)) as f64).abs();
        let steps = t as f64;
        let evs_t = active_net / steps;
        let tri_t = 1.0 - overheated as f64 / steps;
        let she_t = abs_err / steps;
        out.push(channel(&rows[t], evs_t * tri_t / (1.0 + she_t)));
    }
    Ok(out)
}
