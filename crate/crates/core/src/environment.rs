//! World definition: grid extents, harvest and cooling fields, and the
//! physical constants that drive the energy and thermal updates.
//!
//! Field values are defined per cell and are always clamped to be
//! non-negative after spatial and temporal evaluation, so the rest of the
//! crate can rely on `potential >= 0` and `dissipation >= 0` without
//! re-checking.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::dynamics::ActionKind;
use crate::error::Error;

/// One isotropic Gaussian bump contributing to a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hotspot {
    /// Center x coordinate (may be fractional, i.e. between cells).
    pub cx: f64,
    /// Center y coordinate.
    pub cy: f64,
    /// Peak contribution at the center.
    pub amplitude: f64,
    /// Standard deviation controlling the falloff radius.
    pub sigma: f64,
}

/// Spatial layout of a scalar field over the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpatialField {
    /// The same value in every cell.
    Constant(f64),
    /// A sum of Gaussian bumps: `sum_i a_i * exp(-d_i^2 / (2 sigma_i^2))`.
    GaussianHotspots(Vec<Hotspot>),
    /// An affine ramp `base + dx * x + dy * y`.
    LinearGradient { base: f64, dx: f64, dy: f64 },
}

/// Periodic modulation applied on top of the spatial layout.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TemporalMod {
    /// No time dependence.
    #[default]
    Static,
    /// Multiply the spatial value by `1 + amplitude_fraction * sin(2*pi*t/period)`.
    Sinusoidal {
        /// Cycle length in steps. Must be at least 1.
        period: u64,
        /// Relative swing around the spatial value, in `[0, 1]`.
        amplitude_fraction: f64,
    },
}

/// A scalar field over the grid: spatial layout plus optional modulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub spatial: SpatialField,
    #[serde(default)]
    pub temporal: TemporalMod,
}

impl FieldSpec {
    /// A time-invariant field with the same value everywhere.
    pub fn constant(value: f64) -> Self {
        FieldSpec {
            spatial: SpatialField::Constant(value),
            temporal: TemporalMod::Static,
        }
    }

    /// Evaluate the field at cell `(x, y)` and step `t`. Does not bounds
    /// check; callers go through [`EnvironmentSpec::potential_at`] /
    /// [`EnvironmentSpec::dissipation_at`] for that.
    fn value_at(&self, x: u32, y: u32, t: u64) -> f64 {
        let spatial = match &self.spatial {
            SpatialField::Constant(v) => *v,
            SpatialField::GaussianHotspots(spots) => spots
                .iter()
                .map(|h| {
                    let dx = x as f64 - h.cx;
                    let dy = y as f64 - h.cy;
                    let d2 = dx * dx + dy * dy;
                    h.amplitude * (-d2 / (2.0 * h.sigma * h.sigma)).exp()
                })
                .sum(),
            SpatialField::LinearGradient { base, dx, dy } => {
                base + dx * x as f64 + dy * y as f64
            }
        };
        let factor = match &self.temporal {
            TemporalMod::Static => 1.0,
            TemporalMod::Sinusoidal {
                period,
                amplitude_fraction,
            } => 1.0 + amplitude_fraction * (TAU * t as f64 / *period as f64).sin(),
        };
        // Fields are physical quantities (available power, cooling
        // capacity); negative lobes of gradients or deep sinusoidal
        // troughs clamp to zero rather than turning into sinks.
        (spatial * factor).max(0.0)
    }

    /// Validate parameters, using `key` as the config-path prefix in errors.
    fn validate(&self, key: &str) -> Result<(), Error> {
        match &self.spatial {
            SpatialField::Constant(v) => {
                if !v.is_finite() {
                    return Err(Error::invalid(format!("{key}.spatial.constant"), "must be finite"));
                }
            }
            SpatialField::GaussianHotspots(spots) => {
                for (i, h) in spots.iter().enumerate() {
                    let at = |field: &str| format!("{key}.spatial.gaussian_hotspots[{i}].{field}");
                    for (name, v) in [("cx", h.cx), ("cy", h.cy), ("amplitude", h.amplitude)] {
                        if !v.is_finite() {
                            return Err(Error::invalid(at(name), "must be finite"));
                        }
                    }
                    if !(h.sigma.is_finite() && h.sigma > 0.0) {
                        return Err(Error::invalid(at("sigma"), "must be positive"));
                    }
                }
            }
            SpatialField::LinearGradient { base, dx, dy } => {
                for (name, v) in [("base", base), ("dx", dx), ("dy", dy)] {
                    if !v.is_finite() {
                        return Err(Error::invalid(
                            format!("{key}.spatial.linear_gradient.{name}"),
                            "must be finite",
                        ));
                    }
                }
            }
        }
        if let TemporalMod::Sinusoidal {
            period,
            amplitude_fraction,
        } = &self.temporal
        {
            if *period == 0 {
                return Err(Error::invalid(
                    format!("{key}.temporal.sinusoidal.period"),
                    "must be at least 1",
                ));
            }
            if !(amplitude_fraction.is_finite() && (0.0..=1.0).contains(amplitude_fraction)) {
                return Err(Error::invalid(
                    format!("{key}.temporal.sinusoidal.amplitude_fraction"),
                    "must be in [0, 1]",
                ));
            }
        }
        Ok(())
    }
}

/// Per-action-kind scalar table (cost, heat, or harvest gain).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionTable {
    pub idle: f64,
    pub compute: f64,
    #[serde(rename = "move")]
    pub r#move: f64,
}

impl ActionTable {
    pub fn new(idle: f64, compute: f64, r#move: f64) -> Self {
        ActionTable {
            idle,
            compute,
            r#move,
        }
    }

    /// Look up the entry for an action kind.
    pub fn get(&self, kind: ActionKind) -> f64 {
        match kind {
            ActionKind::Idle => self.idle,
            ActionKind::Compute => self.compute,
            ActionKind::Move => self.r#move,
        }
    }

    fn validate(&self, key: &str, lo: f64, hi: f64, range_desc: &str) -> Result<(), Error> {
        for (name, v) in [
            ("idle", self.idle),
            ("compute", self.compute),
            ("move", self.r#move),
        ] {
            if !(v.is_finite() && (lo..=hi).contains(&v)) {
                return Err(Error::invalid(format!("{key}.{name}"), range_desc));
            }
        }
        Ok(())
    }
}

fn default_e_cap() -> f64 {
    5.0
}

/// Complete description of a world: geometry, fields, and physics.
///
/// The energy reserve of an agent at cell `(x, y)` taking action `a`
/// evolves as
///
/// ```text
/// e' = e + eta * P(x, y, t) * gain(a) - cost(a)
/// ```
///
/// and its temperature as
///
/// ```text
/// T' = max(t_ambient, T + alpha * heat(a) - beta * D(x, y))
/// ```
///
/// where `P` is the harvest field and `D` the cooling field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSpec {
    /// Grid width in cells. Valid x coordinates are `0..width`.
    pub width: u32,
    /// Grid height in cells. Valid y coordinates are `0..height`.
    pub height: u32,
    /// Harvestable energy potential per cell (may vary over time).
    pub harvest_field: FieldSpec,
    /// Cooling capacity per cell (time-invariant; see `dissipation_at`).
    pub dissipation_field: FieldSpec,
    /// Harvest conversion efficiency, in `[0, 1]`.
    pub eta: f64,
    /// Heating coefficient applied to action heat output.
    pub alpha: f64,
    /// Cooling coefficient applied to the dissipation field.
    pub beta: f64,
    /// Ambient temperature; the agent never cools below this.
    pub t_ambient: f64,
    /// Critical temperature; exceeding it is fatal.
    pub t_crit: f64,
    /// Energy cost per action kind.
    pub action_costs: ActionTable,
    /// Heat output per action kind.
    pub action_heat: ActionTable,
    /// Harvest gain factor per action kind, in `[0, 1]`.
    pub gain_factors: ActionTable,
    /// Nominal full reserve, used to normalize energy for binning and
    /// plotting. Energy may exceed it; consumers clamp.
    #[serde(default = "default_e_cap")]
    pub e_cap: f64,
    /// Episodes end after this many steps if the agent is still alive.
    pub max_steps: u32,
}

impl Default for EnvironmentSpec {
    /// A small benign world: flat fields, cheap idling, survivable compute.
    fn default() -> Self {
        EnvironmentSpec {
            width: 8,
            height: 8,
            harvest_field: FieldSpec::constant(0.5),
            dissipation_field: FieldSpec::constant(1.0),
            eta: 0.9,
            alpha: 1.0,
            beta: 0.5,
            t_ambient: 20.0,
            t_crit: 40.0,
            action_costs: ActionTable::new(0.01, 0.3, 0.1),
            action_heat: ActionTable::new(0.0, 2.0, 0.5),
            gain_factors: ActionTable::new(1.0, 0.6, 0.3),
            e_cap: 5.0,
            max_steps: 200,
        }
    }
}

impl EnvironmentSpec {
    /// Check every structural invariant, reporting the first violation
    /// with the offending key name.
    pub fn validate(&self) -> Result<(), Error> {
        if self.width < 1 {
            return Err(Error::invalid("width", "must be at least 1"));
        }
        if self.height < 1 {
            return Err(Error::invalid("height", "must be at least 1"));
        }
        if self.max_steps < 1 {
            return Err(Error::invalid("max_steps", "must be at least 1"));
        }
        if !(self.eta.is_finite() && (0.0..=1.0).contains(&self.eta)) {
            return Err(Error::invalid("eta", "must be in [0, 1]"));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::invalid("alpha", "must be non-negative"));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::invalid("beta", "must be non-negative"));
        }
        if !self.t_ambient.is_finite() {
            return Err(Error::invalid("t_ambient", "must be finite"));
        }
        if !(self.t_crit.is_finite() && self.t_crit > self.t_ambient) {
            return Err(Error::invalid("t_crit", "must exceed t_ambient"));
        }
        if !(self.e_cap.is_finite() && self.e_cap > 0.0) {
            return Err(Error::invalid("e_cap", "must be positive"));
        }
        self.action_costs
            .validate("action_costs", 0.0, f64::INFINITY, "must be non-negative")?;
        self.action_heat
            .validate("action_heat", 0.0, f64::INFINITY, "must be non-negative")?;
        self.gain_factors
            .validate("gain_factors", 0.0, 1.0, "must be in [0, 1]")?;
        self.harvest_field.validate("harvest_field")?;
        self.dissipation_field.validate("dissipation_field")?;
        // The thermal update reads cooling as D(x, y): time-invariant. A
        // sinusoidal cooling field would silently never be applied, so
        // reject it outright.
        if !matches!(self.dissipation_field.temporal, TemporalMod::Static) {
            return Err(Error::invalid(
                "dissipation_field.temporal",
                "cooling is time-invariant; only `static` is supported",
            ));
        }
        Ok(())
    }

    fn check_bounds(&self, x: u32, y: u32) -> Result<(), Error> {
        if x >= self.width {
            return Err(Error::OutOfBounds {
                axis: "x",
                value: x,
                extent: self.width,
            });
        }
        if y >= self.height {
            return Err(Error::OutOfBounds {
                axis: "y",
                value: y,
                extent: self.height,
            });
        }
        Ok(())
    }

    /// Harvestable potential at cell `(x, y)` and step `t`. Always
    /// non-negative. Errors if the coordinate is out of bounds.
    pub fn potential_at(&self, x: u32, y: u32, t: u64) -> Result<f64, Error> {
        self.check_bounds(x, y)?;
        Ok(self.harvest_field.value_at(x, y, t))
    }

    /// Cooling capacity at cell `(x, y)`. Always non-negative. Errors if
    /// the coordinate is out of bounds.
    pub fn dissipation_at(&self, x: u32, y: u32) -> Result<f64, Error> {
        self.check_bounds(x, y)?;
        Ok(self.dissipation_field.value_at(x, y, 0))
    }

    /// Number of grid cells.
    pub fn cell_count(&self) -> u64 {
        self.width as u64 * self.height as u64
    }

    /// SHA-256 hex digest of the canonical JSON form of this spec. Stable
    /// across runs; used to tie artifacts back to the exact world that
    /// produced them without embedding file paths.
    pub fn digest(&self) -> String {
        let canonical =
            serde_json::to_string(self).expect("environment spec serializes to JSON");
        crate::export::sha256_hex(canonical.as_bytes())
    }
}
