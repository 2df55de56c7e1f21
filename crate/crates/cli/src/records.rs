//! Output records and their CSV rows.
//!
//! Column order and names are fixed; downstream plotting relies on them.

use sqzcav::dynamics::STEADY_RESIDUAL_TOL;
use sqzcav::observables::REPORTED_LEVELS;
use sqzcav::operators::DensityMatrix;

use crate::error::{CliError, Result};

/// Formats a float for CSV output.
pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

/// Steady-state observables of one case at one squeezing strength.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableRecord {
    pub scenario: String,
    pub case: String,
    pub frame: String,
    pub coupling: String,
    pub atom_present: bool,
    pub g0_over_kappa: f64,
    pub gamma_over_kappa: f64,
    pub delta_c_over_kappa: f64,
    pub r: f64,
    pub omega_p_over_kappa: f64,
    pub omega_s_over_kappa: f64,
    /// `⟨a†a⟩` of the simulated frame's mode.
    pub mean_photon: f64,
    /// `|⟨a²⟩|` of the simulated frame's mode.
    pub abs_second_moment: f64,
    pub lab_mean_photon: f64,
    pub lab_abs_second_moment: f64,
    /// `κ⟨a†a⟩` in the lab frame.
    pub output_flux: f64,
    /// Populations of the squeezed Fock states `S(r)|n⟩`, `n = 0..=10`.
    pub photon_probs: Vec<f64>,
    pub rwa_ratio: f64,
    pub cutoff: usize,
    pub residual: f64,
    pub truncation_tail: f64,
    pub cutoff_converged: bool,
}

pub fn record_columns() -> Vec<String> {
    let mut cols: Vec<String> = [
        "scenario",
        "case",
        "frame",
        "coupling",
        "atom_present",
        "g0_over_kappa",
        "gamma_over_kappa",
        "delta_c_over_kappa",
        "r",
        "omega_p_over_kappa",
        "omega_s_over_kappa",
        "mean_photon",
        "abs_second_moment",
        "lab_mean_photon",
        "lab_abs_second_moment",
        "output_flux",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cols.extend((0..=REPORTED_LEVELS).map(|n| format!("p{n}")));
    cols.extend(["rwa_ratio", "cutoff", "residual", "truncation_tail", "cutoff_converged"].map(String::from));
    cols
}

fn invalid(context: String, reason: impl Into<String>) -> CliError {
    CliError::InvalidRecord { context, reason: reason.into() }
}

impl ObservableRecord {
    fn context(&self) -> String {
        format!("{} {} g0={} r={}", self.scenario, self.case, self.g0_over_kappa, self.r)
    }

    /// Checks the invariants every written record must satisfy. A cutoff that
    /// failed its adequacy checks is only accepted with `allow_inadequate`.
    pub fn validate(&self, allow_inadequate: bool) -> Result<()> {
        let ctx = self.context();
        let finite = [
            self.mean_photon,
            self.abs_second_moment,
            self.lab_mean_photon,
            self.lab_abs_second_moment,
            self.output_flux,
            self.residual,
            self.truncation_tail,
        ];
        if finite.iter().chain(&self.photon_probs).any(|x| !x.is_finite()) {
            return Err(invalid(ctx, "non-finite value"));
        }
        if self.photon_probs.len() != REPORTED_LEVELS + 1 {
            return Err(invalid(ctx, format!("expected {} populations, got {}", REPORTED_LEVELS + 1, self.photon_probs.len())));
        }
        if self.photon_probs.iter().any(|&p| !(-1e-10..=1.0 + 1e-10).contains(&p))
            || self.photon_probs.iter().sum::<f64>() > 1.0 + 1e-8
        {
            return Err(invalid(ctx, format!("populations out of range: {:?}", self.photon_probs)));
        }
        for (n, m) in [(self.mean_photon, self.abs_second_moment), (self.lab_mean_photon, self.lab_abs_second_moment)] {
            if n < -1e-10 || m > (n.max(0.0) * (n.max(0.0) + 1.0)).sqrt() + 1e-8 {
                return Err(invalid(ctx, format!("moments violate |<a^2>|^2 <= n(n+1): n = {n}, |<a^2>| = {m}")));
            }
        }
        if self.residual > STEADY_RESIDUAL_TOL {
            return Err(invalid(ctx, format!("solver residual {:.3e} above {STEADY_RESIDUAL_TOL:e}", self.residual)));
        }
        if !allow_inadequate && (self.truncation_tail > DensityMatrix::TAIL_TOL || !self.cutoff_converged) {
            return Err(invalid(
                ctx,
                format!("cutoff {} not adequate (tail {:.3e}, converged {})", self.cutoff, self.truncation_tail, self.cutoff_converged),
            ));
        }
        Ok(())
    }

    pub fn csv_row(&self) -> String {
        let mut f: Vec<String> = vec![
            self.scenario.clone(),
            self.case.clone(),
            self.frame.clone(),
            self.coupling.clone(),
            self.atom_present.to_string(),
            num(self.g0_over_kappa),
            num(self.gamma_over_kappa),
            num(self.delta_c_over_kappa),
            num(self.r),
            num(self.omega_p_over_kappa),
            num(self.omega_s_over_kappa),
            num(self.mean_photon),
            num(self.abs_second_moment),
            num(self.lab_mean_photon),
            num(self.lab_abs_second_moment),
            num(self.output_flux),
        ];
        f.extend(self.photon_probs.iter().map(|&p| num(p)));
        f.push(num(self.rwa_ratio));
        f.push(self.cutoff.to_string());
        f.push(num(self.residual));
        f.push(num(self.truncation_tail));
        f.push(self.cutoff_converged.to_string());
        f.join(",")
    }
}

/// One time sample of a transient.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub scenario: String,
    pub case: String,
    pub frame: String,
    pub atom_present: bool,
    pub g0_over_kappa: f64,
    pub r: f64,
    pub t: f64,
    pub mean_photon: f64,
    pub abs_second_moment: f64,
    pub min_eigenvalue: f64,
    pub cutoff: usize,
}

pub const TRAJECTORY_COLUMNS: [&str; 11] = [
    "scenario",
    "case",
    "frame",
    "atom_present",
    "g0_over_kappa",
    "r",
    "t",
    "mean_photon",
    "abs_second_moment",
    "min_eigenvalue",
    "cutoff",
];

impl TrajectoryPoint {
    pub fn validate(&self) -> Result<()> {
        let ctx = format!("{} {} r={} t={}", self.scenario, self.case, self.r, self.t);
        if ![self.mean_photon, self.abs_second_moment, self.min_eigenvalue].iter().all(|x| x.is_finite()) {
            return Err(invalid(ctx, "non-finite value"));
        }
        if self.min_eigenvalue < -DensityMatrix::POSITIVITY_TOL {
            return Err(invalid(ctx, format!("state not positive: min eigenvalue {:.3e}", self.min_eigenvalue)));
        }
        Ok(())
    }

    pub fn csv_row(&self) -> String {
        [
            self.scenario.clone(),
            self.case.clone(),
            self.frame.clone(),
            self.atom_present.to_string(),
            num(self.g0_over_kappa),
            num(self.r),
            num(self.t),
            num(self.mean_photon),
            num(self.abs_second_moment),
            num(self.min_eigenvalue),
            self.cutoff.to_string(),
        ]
        .join(",")
    }
}

/// Coupling enhancement at one squeezing strength.
#[derive(Clone, Debug, PartialEq)]
pub struct EnhancementRow {
    pub r: f64,
    /// `g_s/g₀ = cosh r`
    pub cosh_r: f64,
    /// The large-`r` approximation `e^r/2`.
    pub half_exp_r: f64,
    /// `|cosh r − e^r/2| / cosh r`
    pub relative_difference: f64,
    /// `g_s'/g₀ = sinh r`
    pub sinh_r: f64,
}

pub const ENHANCEMENT_COLUMNS: [&str; 5] = ["r", "cosh_r", "half_exp_r", "relative_difference", "sinh_r"];

impl EnhancementRow {
    pub fn new(r: f64) -> Self {
        let cosh_r = r.cosh();
        let half_exp_r = 0.5 * r.exp();
        Self { r, cosh_r, half_exp_r, relative_difference: (cosh_r - half_exp_r).abs() / cosh_r, sinh_r: r.sinh() }
    }

    pub fn csv_row(&self) -> String {
        [self.r, self.cosh_r, self.half_exp_r, self.relative_difference, self.sinh_r].map(num).join(",")
    }
}

/// Summary statistics of one Wigner grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerSummary {
    pub scenario: String,
    pub case: String,
    pub atom_present: bool,
    pub g0_over_kappa: f64,
    pub r: f64,
    pub integral: f64,
    pub min_value: f64,
    pub max_value: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub variance_major: f64,
    pub variance_minor: f64,
    pub variance_ratio: f64,
    pub cutoff: usize,
    pub residual: f64,
    pub grid_file: String,
}

pub const WIGNER_SUMMARY_COLUMNS: [&str; 16] = [
    "scenario",
    "case",
    "atom_present",
    "g0_over_kappa",
    "r",
    "integral",
    "min_value",
    "max_value",
    "mean_x",
    "mean_p",
    "variance_major",
    "variance_minor",
    "variance_ratio",
    "cutoff",
    "residual",
    "grid_file",
];

impl WignerSummary {
    pub fn validate(&self) -> Result<()> {
        let ctx = format!("{} {} r={}", self.scenario, self.case, self.r);
        let vals = [self.integral, self.min_value, self.max_value, self.variance_major, self.variance_minor];
        if !vals.iter().all(|x| x.is_finite()) {
            return Err(invalid(ctx, "non-finite value"));
        }
        let bound = std::f64::consts::FRAC_2_PI + 1e-9;
        if self.min_value < -bound || self.max_value > bound {
            return Err(invalid(ctx, format!("values outside ±2/π: [{}, {}]", self.min_value, self.max_value)));
        }
        if !(self.variance_minor > 0.0) {
            return Err(invalid(ctx, format!("non-positive quadrature variance {}", self.variance_minor)));
        }
        Ok(())
    }

    pub fn csv_row(&self) -> String {
        [
            self.scenario.clone(),
            self.case.clone(),
            self.atom_present.to_string(),
            num(self.g0_over_kappa),
            num(self.r),
            num(self.integral),
            num(self.min_value),
            num(self.max_value),
            num(self.mean_x),
            num(self.mean_p),
            num(self.variance_major),
            num(self.variance_minor),
            num(self.variance_ratio),
            self.cutoff.to_string(),
            num(self.residual),
            self.grid_file.clone(),
        ]
        .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ObservableRecord {
        ObservableRecord {
            scenario: "fig5".into(),
            case: "atom".into(),
            frame: "squeezed".into(),
            coupling: "rwa".into(),
            atom_present: true,
            g0_over_kappa: 5.0,
            gamma_over_kappa: 1.0,
            delta_c_over_kappa: 0.5,
            r: 0.4,
            omega_p_over_kappa: 0.33,
            omega_s_over_kappa: 0.37,
            mean_photon: 0.2,
            abs_second_moment: 0.1,
            lab_mean_photon: 0.3,
            lab_abs_second_moment: 0.2,
            output_flux: 0.3,
            photon_probs: vec![0.05; 11],
            rwa_ratio: 0.5,
            cutoff: 20,
            residual: 1e-14,
            truncation_tail: 1e-12,
            cutoff_converged: true,
        }
    }

    #[test]
    fn row_matches_columns() {
        let rec = sample();
        assert_eq!(rec.csv_row().split(',').count(), record_columns().len());
        assert!(rec.validate(false).is_ok());
    }

    #[test]
    fn unphysical_moments_rejected() {
        let mut rec = sample();
        rec.abs_second_moment = 1.0;
        assert!(rec.validate(false).is_err());
    }

    #[test]
    fn inadequate_cutoff_needs_override() {
        let mut rec = sample();
        rec.cutoff_converged = false;
        assert!(rec.validate(false).is_err());
        assert!(rec.validate(true).is_ok());
    }

    #[test]
    fn enhancement_row() {
        let row = EnhancementRow::new(0.0);
        assert_eq!(row.cosh_r, 1.0);
        assert_eq!(row.relative_difference, 0.5);
        assert_eq!(row.csv_row().split(',').count(), ENHANCEMENT_COLUMNS.len());
    }

    #[test]
    fn number_format() {
        assert_eq!(num(0.1), "1.000000000000e-1");
        assert_eq!(num(-2.5e-13), "-2.500000000000e-13");
    }
}
