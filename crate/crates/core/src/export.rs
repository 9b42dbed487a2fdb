//! Plot-ready text artifacts with byte-stable formatting.
//!
//! Every float is rendered as scientific notation with nine significant
//! digits (`{:.8e}`), which round-trips f64 closely enough for plotting
//! while guaranteeing the same bytes on every platform and run. All
//! writers emit a header row, `\n` line endings, and a trailing newline.

use sha2::{Digest, Sha256};

use crate::policy::EpisodeLog;
use crate::simulation::{HorizonMap, Trajectory};

/// Render a float as scientific notation with nine significant digits.
pub fn fmt_float(value: f64) -> String {
    format!("{value:.8e}")
}

/// SHA-256 of `bytes` as lowercase hex; used to fingerprint configs and
/// environments in manifests without embedding paths.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let mut hex = String::with_capacity(64);
    for byte in hash {
        use std::fmt::Write;
        write!(hex, "{byte:02x}").expect("writing to a String cannot fail");
    }
    hex
}

/// Render a trajectory as CSV: one data row per recorded state. The
/// terminal row has an empty `action` field and a zeroed ledger.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("step,x,y,energy,temperature,action,e_in,e_out,mode,forecast\n");
    for row in &traj.steps {
        let action = row.action.map_or("", |a| a.label());
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.step,
            row.x,
            row.y,
            fmt_float(row.energy),
            fmt_float(row.temperature),
            action,
            fmt_float(row.e_in),
            fmt_float(row.e_out),
            row.mode.label(),
            fmt_float(row.forecast),
        ));
    }
    out
}

/// Render per-step heatmap channels as CSV.
pub fn heatmap_csv(channels: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("step,energy_norm,temp_norm,viability\n");
    for (step, (energy, temp, viability)) in channels.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            step,
            fmt_float(*energy),
            fmt_float(*temp),
            fmt_float(*viability),
        ));
    }
    out
}

/// Render a horizon map as CSV: the first row carries the starting-energy
/// axis, the first column the starting-temperature axis, and the corner
/// cell is empty. Interior cells are integer lifespans.
pub fn horizon_map_csv(map: &HorizonMap) -> String {
    let mut out = String::new();
    for e0 in &map.e0_axis {
        out.push(',');
        out.push_str(&fmt_float(*e0));
    }
    out.push('\n');
    for (t0, row) in map.t0_axis.iter().zip(&map.cells) {
        out.push_str(&fmt_float(*t0));
        for cell in row {
            out.push(',');
            out.push_str(&cell.to_string());
        }
        out.push('\n');
    }
    out
}

/// Render a training log as CSV, one row per episode.
pub fn training_log_csv(log: &[EpisodeLog]) -> String {
    let mut out = String::from("episode,length,return,cause,epsilon\n");
    for entry in log {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            entry.episode,
            entry.length,
            fmt_float(entry.return_sum),
            entry.cause.label(),
            fmt_float(entry.epsilon),
        ));
    }
    out
}

/// Render per-policy energy series side by side. Series may have
/// different lengths (policies die at different times); exhausted series
/// leave their field empty.
pub fn compare_csv(fixed: &[f64], greedy: &[f64], survival: &[f64]) -> String {
    let mut out = String::from("step,fixed,greedy,survival\n");
    let rows = fixed.len().max(greedy.len()).max(survival.len());
    for step in 0..rows {
        let cell = |series: &[f64]| series.get(step).map_or(String::new(), |v| fmt_float(*v));
        out.push_str(&format!(
            "{},{},{},{}\n",
            step,
            cell(fixed),
            cell(greedy),
            cell(survival),
        ));
    }
    out
}
