//! CSV files with a commented header block.
//!
//! Every file starts with `#` lines holding the resolved config, the derived
//! pump amplitudes and mode frequencies, a SHA-256 hash of the config and a
//! `# generated_unix_time` line. Apart from that last line, output is a
//! function of the config alone.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};
use sqzcav::model::ModelParams;

use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};
use crate::records::{
    num, record_columns, ENHANCEMENT_COLUMNS, TRAJECTORY_COLUMNS, WIGNER_SUMMARY_COLUMNS,
};
use crate::runner::ScenarioOutput;

/// Prefix of the only header line that differs between identical runs.
pub const TIMESTAMP_PREFIX: &str = "# generated_unix_time = ";

/// Lowercase hex SHA-256 of the canonical config text.
pub fn config_hash(cfg: &ScenarioConfig) -> String {
    let digest = Sha256::digest(cfg.canonical_toml().as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn derived_lines(cfg: &ScenarioConfig) -> Vec<String> {
    let mut out = Vec::new();
    let mut detunings = vec![cfg.delta_c_over_kappa];
    detunings.extend(&cfg.sensitivity_delta_c);
    for dc in detunings {
        let Ok(rs) = cfg.r_values_at(dc) else { continue };
        for r in rs {
            if let Ok(p) = ModelParams::from_squeezing(dc, r) {
                out.push(format!(
                    "derived delta_c_over_kappa={} r={} omega_p_over_kappa={} omega_s_over_kappa={}",
                    num(dc),
                    num(r),
                    num(p.omega_p_amp()),
                    num(p.omega_s())
                ));
            }
        }
    }
    out
}

/// The commented header block, ending with the timestamp line.
pub fn header(cfg: &ScenarioConfig, contents: &str) -> String {
    let mut h = String::new();
    let _ = writeln!(h, "# sqzcav {} {}", env!("CARGO_PKG_VERSION"), contents);
    let _ = writeln!(h, "# units: rates and times in units of kappa (kappa = 1)");
    let _ = writeln!(h, "# [config]");
    for line in cfg.canonical_toml().lines().filter(|l| !l.is_empty()) {
        let _ = writeln!(h, "# {line}");
    }
    let _ = writeln!(h, "# [derived]");
    for line in derived_lines(cfg) {
        let _ = writeln!(h, "# {line}");
    }
    let _ = writeln!(h, "# config_sha256 = {}", config_hash(cfg));
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let _ = writeln!(h, "{TIMESTAMP_PREFIX}{secs}");
    h
}

/// File contents with the timestamp line removed.
pub fn payload(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with(TIMESTAMP_PREFIX)).map(|l| format!("{l}\n")).collect()
}

fn table<S: AsRef<str>>(columns: &[S], rows: impl IntoIterator<Item = String>) -> String {
    let mut s = columns.iter().map(|c| c.as_ref()).collect::<Vec<_>>().join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row);
        s.push('\n');
    }
    s
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes all files of a scenario into `dir` and returns their paths.
pub fn write_outputs(cfg: &ScenarioConfig, out: &ScenarioOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = cfg.scenario.name();
    let mut files = Vec::new();
    let mut emit = |file: String, contents: &str, body: String| -> Result<()> {
        let path = dir.join(file);
        write_file(&path, &(header(cfg, contents) + &body))?;
        files.push(path);
        Ok(())
    };
    if !out.enhancement.is_empty() {
        emit(
            format!("{name}.csv"),
            "coupling enhancement",
            table(&ENHANCEMENT_COLUMNS, out.enhancement.iter().map(|r| r.csv_row())),
        )?;
    }
    if !out.records.is_empty() {
        emit(format!("{name}.csv"), "steady-state observables", table(&record_columns(), out.records.iter().map(|r| r.csv_row())))?;
    }
    if !out.sensitivity.is_empty() {
        emit(
            format!("{name}_sensitivity.csv"),
            "steady-state observables, delta_c sensitivity",
            table(&record_columns(), out.sensitivity.iter().map(|r| r.csv_row())),
        )?;
    }
    if !out.trajectories.is_empty() {
        emit(format!("{name}.csv"), "transients", table(&TRAJECTORY_COLUMNS, out.trajectories.iter().map(|r| r.csv_row())))?;
    }
    if !out.wigner.is_empty() {
        emit(
            format!("{name}_wigner_summary.csv"),
            "wigner summary",
            table(&WIGNER_SUMMARY_COLUMNS, out.wigner.iter().map(|w| w.summary.csv_row())),
        )?;
        for w in &out.wigner {
            let g = &w.grid;
            let mut body = String::from("p\\x");
            for &x in &g.x_axis {
                body.push(',');
                body.push_str(&num(x));
            }
            body.push('\n');
            for (j, &p) in g.p_axis.iter().enumerate() {
                body.push_str(&num(p));
                for i in 0..g.x_axis.len() {
                    body.push(',');
                    body.push_str(&num(g.values[(j, i)]));
                }
                body.push('\n');
            }
            let what = format!("wigner grid {} g0={} r={}, rows p, columns x", w.summary.case, w.summary.g0_over_kappa, w.summary.r);
            emit(w.summary.grid_file.clone(), &what, body)?;
        }
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Scenario;

    #[test]
    fn hash_is_hex_and_stable() {
        let cfg = ScenarioConfig::for_scenario(Scenario::Fig8).unwrap();
        let h = config_hash(&cfg);
        assert_eq!(h.len(), 64);
        assert!(h.chars().all(|c| c.is_ascii_hexdigit()));
        assert_eq!(h, config_hash(&ScenarioConfig::for_scenario(Scenario::Fig8).unwrap()));
        assert_ne!(h, config_hash(&ScenarioConfig::for_scenario(Scenario::Fig7).unwrap()));
    }

    #[test]
    fn header_carries_derived_values() {
        let cfg = ScenarioConfig::from_toml("scenario = \"custom\"\ndelta_c_over_kappa = 10.0\nr_values = [1.0]").unwrap();
        let h = header(&cfg, "test");
        assert!(h.lines().all(|l| l.starts_with('#')));
        assert!(h.contains("omega_p_over_kappa=9.640275800758e0"));
        assert!(h.contains("omega_s_over_kappa=2.658022288341e0"));
        assert_eq!(payload(&h).lines().count() + 1, h.lines().count());
    }
}
