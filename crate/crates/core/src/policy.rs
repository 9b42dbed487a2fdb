//! Action-selection policies and tabular Q-learning.
//!
//! Three controllers are provided:
//!
//! - [`Policy::FixedCompute`] computes every step regardless of reserves —
//!   the "workload first" baseline.
//! - [`Policy::GreedyHarvest`] maximizes immediate net energy and never
//!   computes — the "hoarder" baseline.
//! - [`Policy::QLearning`] acts epsilon-greedily from a learned table over
//!   a discretized (energy bin, temperature bin, cell) state.
//!
//! All tie-breaking uses the canonical order of [`Action::ALL`]: the first
//! action attaining the maximum wins. This makes every policy a pure
//! function of `(state, table, rng)` and keeps runs reproducible.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    apply_action, destination, Action, AgentState, InitialConditions, StepOutcome, TerminalCause,
};
use crate::environment::EnvironmentSpec;
use crate::error::Error;

/// Discretized agent state: energy bin, temperature bin, and cell index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateKey {
    pub energy_bin: u32,
    pub temp_bin: u32,
    /// Row-major cell index `y * width + x`.
    pub cell: u64,
}

/// Map a state onto its discretized key.
///
/// Energy bins cover `[0, e_cap]` and temperature bins `[t_ambient,
/// t_crit]`; values beyond either end clamp into the edge bins, so a
/// reserve above the nominal cap simply reads as "full".
pub fn discretize(
    state: &AgentState,
    spec: &EnvironmentSpec,
    energy_bins: u32,
    temp_bins: u32,
) -> StateKey {
    StateKey {
        energy_bin: bin_index(state.energy, 0.0, spec.e_cap, energy_bins),
        temp_bin: bin_index(state.temperature, spec.t_ambient, spec.t_crit, temp_bins),
        cell: state.y as u64 * spec.width as u64 + state.x as u64,
    }
}

fn bin_index(value: f64, lo: f64, hi: f64, bins: u32) -> u32 {
    let frac = (value - lo) / (hi - lo);
    if frac <= 0.0 {
        return 0;
    }
    let idx = (frac * bins as f64).floor() as u32;
    idx.min(bins - 1)
}

/// Serialize the sparse value map with `"e,t,c"` string keys so it stays a
/// plain JSON object.
mod qvalue_map {
    use super::StateKey;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<StateKey, [f64; 6]>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let keyed: BTreeMap<String, &[f64; 6]> = map
            .iter()
            .map(|(k, v)| (format!("{},{},{}", k.energy_bin, k.temp_bin, k.cell), v))
            .collect();
        keyed.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<StateKey, [f64; 6]>, D::Error> {
        let keyed = BTreeMap::<String, [f64; 6]>::deserialize(de)?;
        keyed
            .into_iter()
            .map(|(k, v)| {
                let mut parts = k.split(',');
                let parse = |s: Option<&str>| {
                    s.and_then(|p| p.parse::<u64>().ok())
                        .ok_or_else(|| D::Error::custom(format!("malformed state key `{k}`")))
                };
                let energy_bin = parse(parts.next())? as u32;
                let temp_bin = parse(parts.next())? as u32;
                let cell = parse(parts.next())?;
                if parts.next().is_some() {
                    return Err(D::Error::custom(format!("malformed state key `{k}`")));
                }
                Ok((
                    StateKey {
                        energy_bin,
                        temp_bin,
                        cell,
                    },
                    v,
                ))
            })
            .collect()
    }
}

/// A sparse tabular action-value function.
///
/// Rows absent from `values` are implicitly all-zero, and updates that
/// would only write a zero into an absent row are skipped, so a freshly
/// initialized table and a table "trained" with a zero learning rate
/// serialize identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QTable {
    pub energy_bins: u32,
    pub temp_bins: u32,
    pub learning_rate: f64,
    pub discount: f64,
    #[serde(with = "qvalue_map")]
    values: BTreeMap<StateKey, [f64; 6]>,
}

impl QTable {
    /// An empty (all-zero) table.
    pub fn new(
        energy_bins: u32,
        temp_bins: u32,
        learning_rate: f64,
        discount: f64,
    ) -> Result<Self, Error> {
        let table = QTable {
            energy_bins,
            temp_bins,
            learning_rate,
            discount,
            values: BTreeMap::new(),
        };
        table.validate()?;
        Ok(table)
    }

    /// Check hyperparameter ranges (also applied to tables loaded from
    /// disk).
    pub fn validate(&self) -> Result<(), Error> {
        if self.energy_bins < 1 {
            return Err(Error::invalid("energy_bins", "must be at least 1"));
        }
        if self.temp_bins < 1 {
            return Err(Error::invalid("temp_bins", "must be at least 1"));
        }
        if !(self.learning_rate.is_finite() && (0.0..=1.0).contains(&self.learning_rate)) {
            return Err(Error::invalid("learning_rate", "must be in [0, 1]"));
        }
        if !(self.discount.is_finite() && (0.0..=1.0).contains(&self.discount)) {
            return Err(Error::invalid("discount", "must be in [0, 1]"));
        }
        for value_row in self.values.values() {
            if value_row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("values", "must all be finite"));
            }
        }
        Ok(())
    }

    /// Q-values for a state, in [`Action::ALL`] order. Absent rows read as
    /// all zeros.
    pub fn values_for(&self, key: &StateKey) -> [f64; 6] {
        self.values.get(key).copied().unwrap_or([0.0; 6])
    }

    /// Q-value of one `(state, action)` pair.
    pub fn action_value(&self, key: &StateKey, action: Action) -> f64 {
        self.values_for(key)[action.index()]
    }

    /// Highest Q-value available from a state.
    pub fn best_value(&self, key: &StateKey) -> f64 {
        self.values_for(key)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The greedy action: first action (canonical order) attaining the
    /// maximum Q-value.
    pub fn greedy_action(&self, key: &StateKey) -> Action {
        let values = self.values_for(key);
        let mut best = Action::ALL[0];
        let mut best_value = values[0];
        for &action in &Action::ALL[1..] {
            if values[action.index()] > best_value {
                best_value = values[action.index()];
                best = action;
            }
        }
        best
    }

    fn set_action_value(&mut self, key: StateKey, action: Action, value: f64) {
        if value == 0.0 && !self.values.contains_key(&key) {
            // Writing a zero into an implicitly all-zero row is a no-op;
            // skipping it keeps the serialized table minimal.
            return;
        }
        self.values.entry(key).or_insert([0.0; 6])[action.index()] = value;
    }

    /// Number of explicitly stored state rows.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One temporal-difference backup:
///
/// ```text
/// Q(s,a) += lr * (r + discount * max_a' Q(s',a') - Q(s,a))
/// ```
///
/// with the bootstrap term dropped when `terminal` is set.
pub fn q_update(
    table: &mut QTable,
    key: StateKey,
    action: Action,
    reward: f64,
    next_key: StateKey,
    terminal: bool,
) {
    let current = table.action_value(&key, action);
    let future = if terminal {
        0.0
    } else {
        table.best_value(&next_key)
    };
    let updated =
        current + table.learning_rate * (reward + table.discount * future - current);
    table.set_action_value(key, action, updated);
}

/// Survival-shaped step reward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardSpec {
    /// Granted every non-terminal step.
    pub alive_bonus: f64,
    /// Extra credit for computing on a non-terminal step.
    pub compute_bonus: f64,
    /// Charged once when the agent dies (not when steps run out).
    pub death_penalty: f64,
}

impl Default for RewardSpec {
    fn default() -> Self {
        RewardSpec {
            alive_bonus: 1.0,
            compute_bonus: 0.2,
            death_penalty: 10.0,
        }
    }
}

impl RewardSpec {
    pub fn validate(&self) -> Result<(), Error> {
        for (name, v) in [
            ("alive_bonus", self.alive_bonus),
            ("compute_bonus", self.compute_bonus),
            ("death_penalty", self.death_penalty),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("reward.{name}"), "must be non-negative"));
            }
        }
        Ok(())
    }
}

/// Reward for taking `action` and observing `outcome`.
///
/// Dying costs the death penalty and forfeits that step's bonuses; hitting
/// the step budget is not death and earns (and costs) nothing.
pub fn reward(outcome: &StepOutcome, action: Action, rspec: &RewardSpec) -> f64 {
    match outcome.terminal {
        Some(TerminalCause::EnergyDepleted) | Some(TerminalCause::Overheated) => {
            -rspec.death_penalty
        }
        Some(TerminalCause::MaxSteps) => 0.0,
        None => {
            let compute = if action == Action::Compute {
                rspec.compute_bonus
            } else {
                0.0
            };
            rspec.alive_bonus + compute
        }
    }
}

/// Exponentially decaying exploration rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub decay: f64,
    pub min: f64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule {
            start: 1.0,
            decay: 0.99,
            min: 0.05,
        }
    }
}

impl EpsilonSchedule {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.start.is_finite() && (0.0..=1.0).contains(&self.start)) {
            return Err(Error::invalid("epsilon.start", "must be in [0, 1]"));
        }
        if !(self.decay.is_finite() && self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::invalid("epsilon.decay", "must be in (0, 1]"));
        }
        if !(self.min.is_finite() && self.min >= 0.0 && self.min <= self.start) {
            return Err(Error::invalid("epsilon.min", "must be in [0, start]"));
        }
        Ok(())
    }

    /// Exploration rate for an episode: `max(min, start * decay^episode)`.
    pub fn epsilon_for(&self, episode: u32) -> f64 {
        (self.start * self.decay.powi(episode as i32)).max(self.min)
    }
}

/// An action-selection strategy.
#[derive(Debug, Clone)]
pub enum Policy {
    /// Compute every step, no matter what.
    FixedCompute,
    /// Maximize immediate net energy over idle and the four moves; never
    /// compute.
    GreedyHarvest,
    /// Epsilon-greedy over a (possibly trained) Q-table. Set `epsilon` to
    /// zero for deterministic greedy evaluation.
    QLearning { table: QTable, epsilon: f64 },
}

impl Policy {
    /// Stable lowercase name used in manifests and logs.
    pub fn label(&self) -> &'static str {
        match self {
            Policy::FixedCompute => "fixed_compute",
            Policy::GreedyHarvest => "greedy_harvest",
            Policy::QLearning { .. } => "q_learning",
        }
    }
}

/// Immediate net energy of a candidate action, scoring moves by the
/// potential at their (clamped) destination: the value of relocating is
/// what the agent could harvest once there.
fn harvest_value(state: &AgentState, action: Action, spec: &EnvironmentSpec) -> Result<f64, Error> {
    let (x, y) = destination(state.x, state.y, action, spec);
    let potential = spec.potential_at(x, y, state.step as u64)?;
    Ok(spec.eta * potential * spec.gain_factors.get(action.kind())
        - spec.action_costs.get(action.kind()))
}

fn greedy_harvest_action(state: &AgentState, spec: &EnvironmentSpec) -> Result<Action, Error> {
    // Candidates in canonical order, compute excluded; first strict max wins.
    let mut best = Action::Idle;
    let mut best_value = f64::NEG_INFINITY;
    for &action in &Action::ALL[..5] {
        let value = harvest_value(state, action, spec)?;
        if value > best_value {
            best_value = value;
            best = action;
        }
    }
    Ok(best)
}

fn epsilon_greedy(
    table: &QTable,
    key: &StateKey,
    epsilon: f64,
    rng: &mut ChaCha8Rng,
) -> Action {
    if rng.gen::<f64>() < epsilon {
        Action::ALL[rng.gen_range(0..Action::ALL.len())]
    } else {
        table.greedy_action(key)
    }
}

/// Choose the next action for a live agent. Errors if `state` is terminal.
pub fn select_action(
    policy: &Policy,
    state: &AgentState,
    spec: &EnvironmentSpec,
    rng: &mut ChaCha8Rng,
) -> Result<Action, Error> {
    if state.is_terminal(spec) {
        return Err(Error::usage(
            "cannot select an action for a terminal state",
        ));
    }
    match policy {
        Policy::FixedCompute => Ok(Action::Compute),
        Policy::GreedyHarvest => greedy_harvest_action(state, spec),
        Policy::QLearning { table, epsilon } => {
            let key = discretize(state, spec, table.energy_bins, table.temp_bins);
            Ok(epsilon_greedy(table, &key, *epsilon, rng))
        }
    }
}

/// Q-learning hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingSpec {
    pub episodes: u32,
    pub energy_bins: u32,
    pub temp_bins: u32,
    pub learning_rate: f64,
    pub discount: f64,
    pub epsilon: EpsilonSchedule,
}

impl Default for TrainingSpec {
    fn default() -> Self {
        TrainingSpec {
            episodes: 2000,
            energy_bins: 8,
            temp_bins: 8,
            learning_rate: 0.1,
            discount: 0.95,
            epsilon: EpsilonSchedule::default(),
        }
    }
}

impl TrainingSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if self.episodes < 1 {
            return Err(Error::invalid("training.episodes", "must be at least 1"));
        }
        if self.energy_bins < 1 {
            return Err(Error::invalid("training.energy_bins", "must be at least 1"));
        }
        if self.temp_bins < 1 {
            return Err(Error::invalid("training.temp_bins", "must be at least 1"));
        }
        if !(self.learning_rate.is_finite() && (0.0..=1.0).contains(&self.learning_rate)) {
            return Err(Error::invalid("training.learning_rate", "must be in [0, 1]"));
        }
        if !(self.discount.is_finite() && (0.0..=1.0).contains(&self.discount)) {
            return Err(Error::invalid("training.discount", "must be in [0, 1]"));
        }
        self.epsilon.validate()
    }
}

/// Per-episode training summary.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub episode: u32,
    /// Steps survived.
    pub length: u32,
    /// Undiscounted return.
    pub return_sum: f64,
    pub cause: TerminalCause,
    /// Exploration rate used for this episode.
    pub epsilon: f64,
}

/// Train a Q-table by running `training.episodes` episodes from `init`.
///
/// All randomness comes from one sequentially consumed generator seeded
/// with `seed`, so identical inputs produce an identical table and log.
pub fn train(
    spec: &EnvironmentSpec,
    rspec: &RewardSpec,
    init: &InitialConditions,
    training: &TrainingSpec,
    seed: u64,
) -> Result<(QTable, Vec<EpisodeLog>), Error> {
    spec.validate()?;
    rspec.validate()?;
    training.validate()?;
    init.validate(spec)?;

    let mut table = QTable::new(
        training.energy_bins,
        training.temp_bins,
        training.learning_rate,
        training.discount,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = Vec::with_capacity(training.episodes as usize);

    for episode in 0..training.episodes {
        let epsilon = training.epsilon.epsilon_for(episode);
        let mut state = init.to_state();
        let mut return_sum = 0.0;
        let cause = loop {
            let key = discretize(&state, spec, table.energy_bins, table.temp_bins);
            let action = epsilon_greedy(&table, &key, epsilon, &mut rng);
            let outcome = apply_action(&state, action, spec)?;
            let r = reward(&outcome, action, rspec);
            return_sum += r;
            let next_key = discretize(
                &outcome.next_state,
                spec,
                table.energy_bins,
                table.temp_bins,
            );
            q_update(
                &mut table,
                key,
                action,
                r,
                next_key,
                outcome.terminal.is_some(),
            );
            state = outcome.next_state;
            if let Some(cause) = outcome.terminal {
                break cause;
            }
        };
        log.push(EpisodeLog {
            episode,
            length: state.step,
            return_sum,
            cause,
            epsilon,
        });
    }
    Ok((table, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Direction;
    use crate::environment::{FieldSpec, Hotspot, SpatialField};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn live_state(x: u32, y: u32) -> AgentState {
        AgentState {
            x,
            y,
            energy: 1.0,
            temperature: 20.0,
            last_action: None,
            step: 0,
        }
    }

    #[test]
    fn fixed_compute_always_computes() {
        let spec = EnvironmentSpec::default();
        let mut r = rng(1);
        for _ in 0..5 {
            let a = select_action(&Policy::FixedCompute, &live_state(3, 3), &spec, &mut r).unwrap();
            assert_eq!(a, Action::Compute);
        }
    }

    #[test]
    fn greedy_idles_on_a_uniform_field() {
        // Everywhere identical: idle has the best gain factor and the
        // lowest cost, so it wins outright.
        let spec = EnvironmentSpec::default();
        let mut r = rng(1);
        let a = select_action(&Policy::GreedyHarvest, &live_state(3, 3), &spec, &mut r).unwrap();
        assert_eq!(a, Action::Idle);
    }

    #[test]
    fn greedy_moves_toward_a_strong_hotspot() {
        // 3x3 world, high-amplitude hotspot in the far corner. The spot
        // must be strong enough that harvesting near it (even at the
        // reduced move gain) beats idling on the weak tail at the origin:
        // move east nets 0.9 * 30 * e^-2.5 * 0.3 - 0.1 ~ 0.565 versus
        // idle's 0.9 * 30 * e^-4 - 0.01 ~ 0.484.
        let spec = EnvironmentSpec {
            width: 3,
            height: 3,
            harvest_field: FieldSpec {
                spatial: SpatialField::GaussianHotspots(vec![Hotspot {
                    cx: 2.0,
                    cy: 2.0,
                    amplitude: 30.0,
                    sigma: 1.0,
                }]),
                temporal: Default::default(),
            },
            ..EnvironmentSpec::default()
        };
        let mut r = rng(1);
        let a = select_action(&Policy::GreedyHarvest, &live_state(0, 0), &spec, &mut r).unwrap();
        // East and south are symmetric here; east precedes south in
        // canonical order.
        assert_eq!(a, Action::Move(Direction::East));
    }

    #[test]
    fn greedy_never_computes_even_when_compute_pays_best() {
        // Make compute wildly profitable; greedy must still refuse.
        let spec = EnvironmentSpec {
            harvest_field: FieldSpec::constant(5.0),
            gain_factors: crate::environment::ActionTable::new(0.0, 1.0, 0.0),
            ..EnvironmentSpec::default()
        };
        let mut r = rng(1);
        for _ in 0..10 {
            let a =
                select_action(&Policy::GreedyHarvest, &live_state(3, 3), &spec, &mut r).unwrap();
            assert_ne!(a, Action::Compute);
        }
    }

    #[test]
    fn reward_matches_contract() {
        let rspec = RewardSpec::default();
        let spec = EnvironmentSpec::default();
        let state = live_state(3, 3);

        let alive = apply_action(&state, Action::Idle, &spec).unwrap();
        assert_eq!(reward(&alive, Action::Idle, &rspec), 1.0);

        let computing = apply_action(&state, Action::Compute, &spec).unwrap();
        assert!((reward(&computing, Action::Compute, &rspec) - 1.2).abs() < 1e-15);

        let mut dying = alive;
        dying.terminal = Some(TerminalCause::EnergyDepleted);
        assert_eq!(reward(&dying, Action::Idle, &rspec), -10.0);
        dying.terminal = Some(TerminalCause::Overheated);
        assert_eq!(reward(&dying, Action::Compute, &rspec), -10.0);

        // Surviving to the step budget is not death: no penalty, no bonus.
        dying.terminal = Some(TerminalCause::MaxSteps);
        assert_eq!(reward(&dying, Action::Compute, &rspec), 0.0);
    }

    #[test]
    fn q_update_moves_toward_the_target() {
        let mut table = QTable::new(4, 4, 0.5, 0.9).unwrap();
        let s = StateKey {
            energy_bin: 1,
            temp_bin: 1,
            cell: 0,
        };
        let s2 = StateKey {
            energy_bin: 1,
            temp_bin: 1,
            cell: 1,
        };
        // Terminal update from zero with lr = 0.5: Q = 0.5 * r.
        q_update(&mut table, s, Action::Compute, 2.0, s2, true);
        assert!((table.action_value(&s, Action::Compute) - 1.0).abs() < 1e-12);
        // Non-terminal update bootstraps from the best next value.
        q_update(&mut table, s2, Action::Idle, 1.0, s, false);
        // target = 1.0 + 0.9 * 1.0 = 1.9; Q = 0 + 0.5 * 1.9 = 0.95.
        assert!((table.action_value(&s2, Action::Idle) - 0.95).abs() < 1e-12);
    }

    #[test]
    fn zero_learning_rate_leaves_the_table_empty() {
        let mut table = QTable::new(4, 4, 0.0, 0.9).unwrap();
        let s = StateKey {
            energy_bin: 0,
            temp_bin: 0,
            cell: 0,
        };
        q_update(&mut table, s, Action::Idle, 5.0, s, false);
        assert!(table.is_empty());
    }

    #[test]
    fn greedy_action_breaks_ties_in_canonical_order() {
        let table = QTable::new(4, 4, 0.5, 0.9).unwrap();
        let s = StateKey {
            energy_bin: 0,
            temp_bin: 0,
            cell: 0,
        };
        // All zeros: idle (index 0) wins.
        assert_eq!(table.greedy_action(&s), Action::Idle);

        let mut table = table;
        table.set_action_value(s, Action::Move(Direction::East), 1.0);
        table.set_action_value(s, Action::Compute, 1.0);
        // East precedes compute in canonical order.
        assert_eq!(table.greedy_action(&s), Action::Move(Direction::East));
    }

    #[test]
    fn epsilon_schedule_decays_to_its_floor() {
        let schedule = EpsilonSchedule {
            start: 1.0,
            decay: 0.5,
            min: 0.1,
        };
        assert_eq!(schedule.epsilon_for(0), 1.0);
        assert_eq!(schedule.epsilon_for(1), 0.5);
        assert_eq!(schedule.epsilon_for(2), 0.25);
        // Far along, the floor holds.
        assert_eq!(schedule.epsilon_for(30), 0.1);
    }

    #[test]
    fn discretize_clamps_into_edge_bins() {
        let spec = EnvironmentSpec::default(); // e_cap 5, T in [20, 40]
        let mut state = live_state(3, 2);
        state.energy = 0.0;
        state.temperature = 20.0;
        let k = discretize(&state, &spec, 8, 8);
        assert_eq!((k.energy_bin, k.temp_bin), (0, 0));
        assert_eq!(k.cell, 2 * 8 + 3);

        state.energy = 5.0; // exactly at cap -> top bin
        state.temperature = 40.0; // exactly critical -> top bin
        let k = discretize(&state, &spec, 8, 8);
        assert_eq!((k.energy_bin, k.temp_bin), (7, 7));

        state.energy = 12.0; // beyond cap clamps
        state.temperature = 55.0;
        let k = discretize(&state, &spec, 8, 8);
        assert_eq!((k.energy_bin, k.temp_bin), (7, 7));

        state.energy = 0.625; // exactly one bin width
        let k = discretize(&state, &spec, 8, 8);
        assert_eq!(k.energy_bin, 1);
    }

    #[test]
    fn qtable_round_trips_through_json() {
        let mut table = QTable::new(8, 8, 0.2, 0.95).unwrap();
        let s = StateKey {
            energy_bin: 3,
            temp_bin: 1,
            cell: 17,
        };
        table.set_action_value(s, Action::Compute, -0.125);
        table.set_action_value(s, Action::Idle, 2.5);
        let json = serde_json::to_string(&table).unwrap();
        let back: QTable = serde_json::from_str(&json).unwrap();
        assert_eq!(table, back);
        // Keys are strings of the form "e,t,c".
        assert!(json.contains("\"3,1,17\""), "got: {json}");
    }

    #[test]
    fn malformed_qtable_keys_are_rejected() {
        let json = r#"{
            "energy_bins": 8, "temp_bins": 8,
            "learning_rate": 0.1, "discount": 0.95,
            "values": {"1,2": [0, 0, 0, 0, 0, 0]}
        }"#;
        assert!(serde_json::from_str::<QTable>(json).is_err());
    }

    #[test]
    fn training_is_deterministic_in_the_seed() {
        let spec = EnvironmentSpec {
            width: 3,
            height: 3,
            max_steps: 20,
            ..EnvironmentSpec::default()
        };
        let init = InitialConditions {
            x: 0,
            y: 0,
            energy: 1.0,
            temperature: 20.0,
        };
        let training = TrainingSpec {
            episodes: 50,
            ..TrainingSpec::default()
        };
        let (table_a, log_a) =
            train(&spec, &RewardSpec::default(), &init, &training, 7).unwrap();
        let (table_b, log_b) =
            train(&spec, &RewardSpec::default(), &init, &training, 7).unwrap();
        assert_eq!(table_a, table_b);
        assert_eq!(log_a, log_b);

        let (table_c, _) = train(&spec, &RewardSpec::default(), &init, &training, 8).unwrap();
        assert_ne!(table_a, table_c);
    }

    #[test]
    fn zero_learning_rate_training_yields_a_pristine_table() {
        let spec = EnvironmentSpec {
            width: 2,
            height: 2,
            max_steps: 5,
            ..EnvironmentSpec::default()
        };
        let init = InitialConditions {
            x: 0,
            y: 0,
            energy: 1.0,
            temperature: 20.0,
        };
        let training = TrainingSpec {
            episodes: 1,
            learning_rate: 0.0,
            ..TrainingSpec::default()
        };
        let (table, log) = train(&spec, &RewardSpec::default(), &init, &training, 3).unwrap();
        assert!(table.is_empty());
        assert_eq!(log.len(), 1);
        let pristine = QTable::new(8, 8, 0.0, 0.95).unwrap();
        assert_eq!(
            serde_json::to_string(&table).unwrap(),
            serde_json::to_string(&pristine).unwrap()
        );
    }

    #[test]
    fn training_log_lengths_respect_the_step_budget() {
        let spec = EnvironmentSpec {
            width: 3,
            height: 3,
            max_steps: 15,
            ..EnvironmentSpec::default()
        };
        let init = InitialConditions {
            x: 1,
            y: 1,
            energy: 2.0,
            temperature: 20.0,
        };
        let training = TrainingSpec {
            episodes: 30,
            ..TrainingSpec::default()
        };
        let (_, log) = train(&spec, &RewardSpec::default(), &init, &training, 11).unwrap();
        assert_eq!(log.len(), 30);
        for entry in &log {
            assert!(entry.length >= 1 && entry.length <= 15);
            if entry.cause == TerminalCause::MaxSteps {
                assert_eq!(entry.length, 15);
            }
        }
    }
}
