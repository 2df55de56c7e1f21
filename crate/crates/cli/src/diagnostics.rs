//! `validate`: reports what a config implies without running it.

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::error::CliError;
use crate::records::num;
use crate::runner::{estimate_cutoff, model_params};

#[derive(Debug, Default)]
pub struct Diagnostics {
    pub lines: Vec<String>,
    pub problems: Vec<CliError>,
}

impl Diagnostics {
    pub fn is_clean(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Threshold margin, implied `Ω_p` and `ω_s`, the RWA ratio of each atom case
/// and the starting cutoff for every sweep point.
pub fn validate_config(cfg: &ScenarioConfig) -> Diagnostics {
    let mut d = Diagnostics::default();
    d.lines.push(format!("scenario {}: {}", cfg.scenario, cfg.scenario.summary()));
    if cfg.scenario.kind() == ScenarioKind::Enhancement {
        match cfg.r_values() {
            Ok(r) => d.lines.push(format!("{} analytic points, no simulation", r.len())),
            Err(e) => d.problems.push(e),
        }
        return d;
    }
    d.lines.push(format!(
        "frame {:?}, coupling {:?}, gamma/kappa {}, cases {}",
        cfg.frame,
        cfg.coupling,
        cfg.gamma_over_kappa,
        cfg.cases.iter().map(|c| format!("{}(g0={})", c.label(), c.g0_over_kappa)).collect::<Vec<_>>().join(" ")
    ));
    let mut detunings = vec![cfg.delta_c_over_kappa];
    detunings.extend(&cfg.sensitivity_delta_c);
    for dc in detunings {
        let rs = match cfg.r_values_at(dc) {
            Ok(rs) => rs,
            Err(e) => {
                d.lines.push(format!("delta_c={dc}: {e}"));
                d.problems.push(e);
                continue;
            }
        };
        for r in rs {
            let mut line = String::new();
            for case in &cfg.cases {
                match model_params(cfg, *case, dc, r) {
                    Ok(p) => {
                        if line.is_empty() {
                            line = format!(
                                "delta_c={} r={} omega_p={} omega_s={} threshold_margin={} cutoff_estimate={}",
                                dc,
                                r,
                                num(p.omega_p_amp()),
                                num(p.omega_s()),
                                num(p.threshold_margin()),
                                estimate_cutoff(r)
                            );
                        }
                        if case.atom_present {
                            line.push_str(&format!(" rwa_ratio(g0={})={}", case.g0_over_kappa, num(p.rwa_ratio())));
                        }
                    }
                    Err(e) => {
                        d.lines.push(format!("delta_c={dc} r={r}: {e}"));
                        d.problems.push(e);
                    }
                }
            }
            if !line.is_empty() {
                d.lines.push(line);
            }
        }
    }
    d
}
