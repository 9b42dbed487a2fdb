//! The agent's synthetic metabolism: action application, energy and
//! thermal bookkeeping, boundary clamping, and terminal detection.
//!
//! A single step does, in order:
//!
//! 1. sample the harvest and cooling fields at the agent's *current* cell,
//! 2. charge the action's energy cost and credit the harvested gain,
//! 3. add the action's waste heat and subtract local cooling (floored at
//!    ambient),
//! 4. move the agent if the action was a move (clamped at grid edges; the
//!    cost is charged even when the clamp makes the move a no-op),
//! 5. decide whether the episode ended and why.
//!
//! Energy depletion is checked before overheating, which is checked before
//! the step limit, so a step that trips several conditions at once reports
//! a single unambiguous cause.

use serde::{Deserialize, Serialize};

use crate::environment::EnvironmentSpec;
use crate::error::Error;

/// The four movement directions. North decreases `y`, south increases it;
/// east increases `x`, west decreases it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    North,
    East,
    South,
    West,
}

/// One agent action per step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    /// Do nothing. Cheapest, coolest, and (with full gain factor) the best
    /// harvester — but it accomplishes no work.
    Idle,
    /// Step one cell in a direction.
    Move(Direction),
    /// Perform useful work. Expensive and hot.
    Compute,
}

/// Coarse action category used to index cost/heat/gain tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    Idle,
    Compute,
    Move,
}

impl Action {
    /// Every action in canonical order. This order defines tie-breaking
    /// for policy argmaxes and the column order of Q-value arrays, so it
    /// must never change: idle, the four moves clockwise from north, then
    /// compute.
    pub const ALL: [Action; 6] = [
        Action::Idle,
        Action::Move(Direction::North),
        Action::Move(Direction::East),
        Action::Move(Direction::South),
        Action::Move(Direction::West),
        Action::Compute,
    ];

    /// Index of this action in [`Action::ALL`].
    pub fn index(self) -> usize {
        match self {
            Action::Idle => 0,
            Action::Move(Direction::North) => 1,
            Action::Move(Direction::East) => 2,
            Action::Move(Direction::South) => 3,
            Action::Move(Direction::West) => 4,
            Action::Compute => 5,
        }
    }

    /// Category for table lookups.
    pub fn kind(self) -> ActionKind {
        match self {
            Action::Idle => ActionKind::Idle,
            Action::Move(_) => ActionKind::Move,
            Action::Compute => ActionKind::Compute,
        }
    }

    /// Stable lowercase label used in CSV output.
    pub fn label(self) -> &'static str {
        match self {
            Action::Idle => "idle",
            Action::Move(Direction::North) => "move_n",
            Action::Move(Direction::East) => "move_e",
            Action::Move(Direction::South) => "move_s",
            Action::Move(Direction::West) => "move_w",
            Action::Compute => "compute",
        }
    }
}

/// Why an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalCause {
    /// Energy reserve reached zero or below.
    EnergyDepleted,
    /// Temperature exceeded the critical threshold.
    Overheated,
    /// The step budget ran out with the agent still alive.
    MaxSteps,
}

impl TerminalCause {
    /// Stable lowercase label used in CSV output.
    pub fn label(self) -> &'static str {
        match self {
            TerminalCause::EnergyDepleted => "energy_depleted",
            TerminalCause::Overheated => "overheated",
            TerminalCause::MaxSteps => "max_steps",
        }
    }
}

/// Full agent state between steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentState {
    pub x: u32,
    pub y: u32,
    /// Energy reserve. Positive while alive; the terminal step may leave
    /// it at or below zero.
    pub energy: f64,
    /// Internal temperature, never below ambient.
    pub temperature: f64,
    /// The action that produced this state, if any.
    pub last_action: Option<Action>,
    /// Number of steps taken so far.
    pub step: u32,
}

impl AgentState {
    /// Whether this state ends the episode under `spec`.
    pub fn is_terminal(&self, spec: &EnvironmentSpec) -> bool {
        self.energy <= 0.0 || self.temperature > spec.t_crit || self.step >= spec.max_steps
    }
}

/// Where an agent starts: position, reserve, and temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConditions {
    pub x: u32,
    pub y: u32,
    pub energy: f64,
    pub temperature: f64,
}

impl InitialConditions {
    /// Check that the start is alive and on the grid.
    pub fn validate(&self, spec: &EnvironmentSpec) -> Result<(), Error> {
        if self.x >= spec.width {
            return Err(Error::invalid(
                "init.x",
                format!("must be below grid width {}", spec.width),
            ));
        }
        if self.y >= spec.height {
            return Err(Error::invalid(
                "init.y",
                format!("must be below grid height {}", spec.height),
            ));
        }
        if !(self.energy.is_finite() && self.energy > 0.0) {
            return Err(Error::invalid("init.energy", "must be positive"));
        }
        if !(self.temperature.is_finite()
            && self.temperature >= spec.t_ambient
            && self.temperature <= spec.t_crit)
        {
            return Err(Error::invalid(
                "init.temperature",
                "must lie in [t_ambient, t_crit]",
            ));
        }
        Ok(())
    }

    /// The step-zero agent state.
    pub fn to_state(self) -> AgentState {
        AgentState {
            x: self.x,
            y: self.y,
            energy: self.energy,
            temperature: self.temperature,
            last_action: None,
            step: 0,
        }
    }
}

/// The result of applying one action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub next_state: AgentState,
    /// Energy credited this step: `eta * P * gain(a)`.
    pub e_in: f64,
    /// Energy debited this step: `cost(a)`.
    pub e_out: f64,
    /// `Some` if this step ended the episode.
    pub terminal: Option<TerminalCause>,
}

/// Destination of `action` from `(x, y)`, clamped to the grid. Idle and
/// compute stay put.
pub fn destination(x: u32, y: u32, action: Action, spec: &EnvironmentSpec) -> (u32, u32) {
    match action {
        Action::Move(Direction::North) => (x, y.saturating_sub(1)),
        Action::Move(Direction::South) => (x, (y + 1).min(spec.height - 1)),
        Action::Move(Direction::East) => ((x + 1).min(spec.width - 1), y),
        Action::Move(Direction::West) => (x.saturating_sub(1), y),
        Action::Idle | Action::Compute => (x, y),
    }
}

/// Energy update for one step. Returns `(e_next, e_in, e_out)` where
/// `e_next = energy + (e_in - e_out)` exactly (same floating-point
/// expression trajectory ledgers are audited against).
pub fn step_energy(
    energy: f64,
    potential: f64,
    action: Action,
    spec: &EnvironmentSpec,
) -> (f64, f64, f64) {
    let e_in = spec.eta * potential * spec.gain_factors.get(action.kind());
    let e_out = spec.action_costs.get(action.kind());
    (energy + (e_in - e_out), e_in, e_out)
}

/// Thermal update for one step: heat from the action, cooling from the
/// local field, floored at ambient.
pub fn step_thermal(
    temperature: f64,
    action: Action,
    dissipation: f64,
    spec: &EnvironmentSpec,
) -> f64 {
    let heated = temperature + spec.alpha * spec.action_heat.get(action.kind())
        - spec.beta * dissipation;
    heated.max(spec.t_ambient)
}

/// Apply one action to a live agent state.
///
/// Fields are sampled at the agent's position *before* any movement, so a
/// move harvests from (and is cooled by) the cell it departs. Errors if
/// `state` is already terminal.
pub fn apply_action(
    state: &AgentState,
    action: Action,
    spec: &EnvironmentSpec,
) -> Result<StepOutcome, Error> {
    if state.is_terminal(spec) {
        return Err(Error::usage(format!(
            "cannot step a terminal state (energy {:.3}, temperature {:.3}, step {})",
            state.energy, state.temperature, state.step
        )));
    }
    let potential = spec.potential_at(state.x, state.y, state.step as u64)?;
    let dissipation = spec.dissipation_at(state.x, state.y)?;

    let (e_next, e_in, e_out) = step_energy(state.energy, potential, action, spec);
    let t_next = step_thermal(state.temperature, action, dissipation, spec);
    let (x_next, y_next) = destination(state.x, state.y, action, spec);
    let step_next = state.step + 1;

    let terminal = if e_next <= 0.0 {
        Some(TerminalCause::EnergyDepleted)
    } else if t_next > spec.t_crit {
        Some(TerminalCause::Overheated)
    } else if step_next >= spec.max_steps {
        Some(TerminalCause::MaxSteps)
    } else {
        None
    };

    Ok(StepOutcome {
        next_state: AgentState {
            x: x_next,
            y: y_next,
            energy: e_next,
            temperature: t_next,
            last_action: Some(action),
            step: step_next,
        },
        e_in,
        e_out,
        terminal,
    })
}
