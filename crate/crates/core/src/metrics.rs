//! Viability metrics over completed trajectories.
//!
//! Four numbers summarize how well an agent managed its own survival:
//!
//! - **EVS** (energy viability surplus): mean net energy gathered on
//!   *active* (non-idle) steps, averaged over all steps. Positive means
//!   the agent's activity paid for itself.
//! - **TRI** (thermal regulation index): fraction of steps that stayed at
//!   or below the critical temperature. 1.0 means perfect regulation.
//! - **SHE** (survival-horizon error): mean absolute error between the
//!   agent's per-step forecast of its remaining lifetime and the horizon
//!   actually realized. 0.0 means the agent always knew how long it had.
//! - **EAS** (energetic autonomy score): `EVS * TRI / (1 + SHE)`, the
//!   combined figure of merit.
//!
//! There are two notions of horizon. The *empirical lifespan* is simply
//! how many steps the episode ran. The *net-positive horizon*
//! ([`survival_horizon_eq2`]) is the last step index at which cumulative
//! net energy was still non-negative — the point past which the agent was
//! living off reserves it never earned back.

use serde::{Deserialize, Serialize};

use crate::dynamics::Action;
use crate::error::Error;
use crate::simulation::Trajectory;

/// Guard against division by a vanishing depletion rate when
/// extrapolating time-to-empty.
pub const RATE_GUARD: f64 = 1e-6;

/// How the agent estimates its remaining lifetime at each step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Forecaster {
    /// Divide the current reserve by the mean depletion rate over the
    /// last `window` steps. If the recent trend is non-negative the
    /// forecast saturates at the remaining step budget.
    RateExtrapolation { window: u32 },
    /// Perfect hindsight: the exact number of steps that remained. Useful
    /// as a zero-error reference for calibrating SHE.
    Oracle,
}

impl Default for Forecaster {
    fn default() -> Self {
        Forecaster::RateExtrapolation { window: 10 }
    }
}

impl Forecaster {
    pub fn validate(&self) -> Result<(), Error> {
        if let Forecaster::RateExtrapolation { window } = self {
            if *window < 1 {
                return Err(Error::invalid(
                    "forecaster.rate_extrapolation.window",
                    "must be at least 1",
                ));
            }
        }
        Ok(())
    }
}

fn require_steps(traj: &Trajectory) -> Result<usize, Error> {
    let k = traj.num_steps() as usize;
    if k == 0 {
        return Err(Error::usage("trajectory contains no steps"));
    }
    Ok(k)
}

/// Per-step net energy (`e_in - e_out`), one entry per step taken.
///
/// By construction `energy[t+1] = energy[t] + euf[t]` exactly, so prefix
/// sums of this series reproduce the energy column of the trajectory.
pub fn euf_series(traj: &Trajectory) -> Result<Vec<f64>, Error> {
    let k = require_steps(traj)?;
    Ok(traj.steps[..k].iter().map(|r| r.e_in - r.e_out).collect())
}

/// The last step index `t` whose cumulative net energy `sum(euf[0..=t])`
/// is still non-negative, or `None` if the agent was in deficit from the
/// first step.
pub fn survival_horizon_eq2(euf: &[f64]) -> Option<u32> {
    let mut sum = 0.0;
    let mut horizon = None;
    for (t, net) in euf.iter().enumerate() {
        sum += net;
        if sum >= 0.0 {
            horizon = Some(t as u32);
        }
    }
    horizon
}

/// Energy viability surplus: net energy summed over non-idle steps,
/// divided by total steps.
pub fn evs(traj: &Trajectory) -> Result<f64, Error> {
    let k = require_steps(traj)?;
    let active_sum: f64 = traj.steps[..k]
        .iter()
        .filter(|r| r.action != Some(Action::Idle))
        .map(|r| r.e_in - r.e_out)
        .sum();
    Ok(active_sum / k as f64)
}

/// Thermal regulation index: fraction of steps whose resulting
/// temperature stayed at or below `t_crit`.
pub fn tri(traj: &Trajectory, t_crit: f64) -> Result<f64, Error> {
    let k = require_steps(traj)?;
    let over = traj.steps[1..=k]
        .iter()
        .filter(|r| r.temperature > t_crit)
        .count();
    Ok(1.0 - over as f64 / k as f64)
}

/// One remaining-lifetime estimate per recorded row (steps taken plus the
/// terminal row). `max_steps` caps optimistic extrapolations at the
/// remaining step budget.
pub fn forecast_horizon(
    forecaster: &Forecaster,
    traj: &Trajectory,
    max_steps: u32,
) -> Result<Vec<f64>, Error> {
    forecaster.validate()?;
    let k = require_steps(traj)?;
    match forecaster {
        Forecaster::Oracle => Ok((0..=k).map(|t| (k - t) as f64).collect()),
        Forecaster::RateExtrapolation { window } => {
            let window = *window as usize;
            let nets: Vec<f64> = traj.steps[..k].iter().map(|r| r.e_in - r.e_out).collect();
            Ok((0..=k)
                .map(|t| {
                    let lo = t.saturating_sub(window);
                    let recent = &nets[lo..t];
                    let mean = if recent.is_empty() {
                        0.0
                    } else {
                        recent.iter().sum::<f64>() / recent.len() as f64
                    };
                    if mean < 0.0 {
                        (traj.steps[t].energy / (-mean).max(RATE_GUARD)).max(0.0)
                    } else {
                        // Reserves are holding steady or growing; the
                        // only bound left is the step budget.
                        (max_steps - traj.steps[t].step) as f64
                    }
                })
                .collect())
        }
    }
}

/// Survival-horizon error: mean absolute difference between forecasts and
/// the realized remaining lifetime. `forecasts` must hold one entry per
/// step taken (the terminal row has no remaining lifetime to predict).
pub fn she(forecasts: &[f64], traj: &Trajectory) -> Result<f64, Error> {
    let k = require_steps(traj)?;
    if forecasts.len() != k {
        return Err(Error::usage(format!(
            "forecast series has {} entries but the trajectory has {} steps",
            forecasts.len(),
            k
        )));
    }
    let total: f64 = forecasts
        .iter()
        .enumerate()
        .map(|(t, f)| (f - (k - t) as f64).abs())
        .sum();
    Ok(total / k as f64)
}

/// Energetic autonomy score: `evs * tri / (1 + she)`.
///
/// Errors if `tri` is outside `[0, 1]` or `she` is negative, since those
/// can only arise from corrupted inputs.
pub fn eas(evs: f64, tri: f64, she: f64) -> Result<f64, Error> {
    if !evs.is_finite() {
        return Err(Error::usage("evs must be finite"));
    }
    if !(tri.is_finite() && (0.0..=1.0).contains(&tri)) {
        return Err(Error::usage("tri must lie in [0, 1]"));
    }
    if !(she.is_finite() && she >= 0.0) {
        return Err(Error::usage("she must be non-negative"));
    }
    Ok(evs * tri / (1.0 + she))
}

/// All viability metrics for one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    pub evs: f64,
    pub tri: f64,
    pub she: f64,
    pub eas: f64,
    /// Last step with non-negative cumulative net energy, if any.
    pub horizon_eq2: Option<u32>,
    /// Steps survived.
    pub empirical_lifespan: u32,
}

/// Compute the full report from a trajectory, using the forecasts
/// recorded in its rows.
pub fn compute_report(traj: &Trajectory, t_crit: f64) -> Result<MetricsReport, Error> {
    let k = require_steps(traj)?;
    let forecasts: Vec<f64> = traj.steps[..k].iter().map(|r| r.forecast).collect();
    let euf = euf_series(traj)?;
    let evs_v = evs(traj)?;
    let tri_v = tri(traj, t_crit)?;
    let she_v = she(&forecasts, traj)?;
    let eas_v = eas(evs_v, tri_v, she_v)?;
    Ok(MetricsReport {
        evs: evs_v,
        tri: tri_v,
        she: she_v,
        eas: eas_v,
        horizon_eq2: survival_horizon_eq2(&euf),
        empirical_lifespan: k as u32,
    })
}
