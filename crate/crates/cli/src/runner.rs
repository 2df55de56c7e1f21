//! Scenario execution: builds the model for every (case, r) point, solves it
//! at an adequate Fock cutoff and turns the result into records.

use rayon::prelude::*;
use sqzcav::dynamics::{evolve, steady_state_for, uniform_grid, Liouvillian, SteadyState};
use sqzcav::model::{Frame, ModelParams};
use sqzcav::observables::{
    lab_moments_from_squeezed, linspace, moments, output_flux, photon_distribution, squeezed_frame_distribution,
    squeezed_to_lab, squeezed_vacuum_series, squeezed_vacuum_state, wigner, MomentSet, PhotonBasis, WignerGrid,
};
use sqzcav::{DensityMatrix, HilbertDims};

use crate::config::{Case, CutoffChoice, ScenarioConfig, ScenarioKind};
use crate::error::{CliError, Result};
use crate::records::{EnhancementRow, ObservableRecord, TrajectoryPoint, WignerSummary};

/// Cutoff increment used when escalating and for the convergence check.
pub const CUTOFF_STEP: usize = 10;
/// Largest absolute change of any reported observable between cutoffs `N`
/// and `N + 10` for the pair to count as converged.
pub const CONVERGENCE_TOL: f64 = 1e-6;

/// Starting cutoff for the automatic search.
///
/// Uses the squeezed-reservoir occupation `N_s = sinh² r` as a thermal
/// estimate and asks for a geometric tail below 1e-7 at `0.8 N`.
pub fn estimate_cutoff(r: f64) -> usize {
    let occupation = r.sinh().powi(2);
    let level = if occupation < 1e-12 { 0.0 } else { 7.0 * std::f64::consts::LN_10 / ((occupation + 1.0) / occupation).ln() };
    let n = ((level + 1.0) / 0.8).ceil() as usize;
    n.max(10).div_ceil(5) * 5
}

pub fn model_params(cfg: &ScenarioConfig, case: Case, delta_c: f64, r: f64) -> Result<ModelParams> {
    Ok(ModelParams::from_squeezing(delta_c, r)?
        .with_gamma(cfg.gamma_over_kappa)?
        .with_g0(case.g0_over_kappa)?
        .with_frame(cfg.frame.into())
        .with_atom(case.atom_present)
        .with_coupling(cfg.coupling.into()))
}

/// Observables of one steady state, in the frame it was computed in and
/// mapped to the lab frame.
#[derive(Clone, Debug)]
pub struct PointObservables {
    pub frame_moments: MomentSet,
    pub lab_moments: MomentSet,
    pub photon_probs: Vec<f64>,
}

impl PointObservables {
    pub fn of(state: &DensityMatrix, params: &ModelParams) -> Result<Self> {
        let r = params.r();
        Ok(match params.frame() {
            Frame::Squeezed => {
                let ms = moments(state, Frame::Squeezed);
                Self {
                    frame_moments: ms,
                    lab_moments: lab_moments_from_squeezed(&ms, r)?,
                    photon_probs: squeezed_frame_distribution(state, r).probs,
                }
            }
            Frame::Lab => {
                let ms = moments(state, Frame::Lab);
                Self {
                    frame_moments: ms,
                    lab_moments: ms,
                    photon_probs: photon_distribution(state, PhotonBasis::SqueezedFock { r })?.probs,
                }
            }
        })
    }

    fn fingerprint(&self) -> Vec<f64> {
        let mut v = vec![self.frame_moments.mean_photon, self.frame_moments.abs_second_moment()];
        v.extend(&self.photon_probs);
        v
    }

    fn close_to(&self, other: &Self) -> bool {
        self.fingerprint()
            .iter()
            .zip(other.fingerprint())
            .all(|(a, b)| (a - b).abs() <= CONVERGENCE_TOL)
    }
}

/// A steady state at the cutoff chosen for it.
#[derive(Clone, Debug)]
pub struct SolvedPoint {
    pub params: ModelParams,
    pub steady: SteadyState,
    pub observables: PointObservables,
    pub cutoff: usize,
    pub truncation_tail: f64,
    pub converged: bool,
}

fn solve_at(params: &ModelParams, cutoff: usize) -> Result<(SteadyState, PointObservables)> {
    let ss = steady_state_for(params, HilbertDims::new(cutoff)?)?;
    let obs = PointObservables::of(&ss.state, params)?;
    Ok((ss, obs))
}

/// Solves for the steady state, raising the cutoff in steps of 10 until the
/// population above `0.8 N` is below 1e-6 and (if enabled) the observables
/// agree with those at `N + 10`. A converged point reports the `N + 10`
/// solve.
pub fn solve_point(cfg: &ScenarioConfig, params: &ModelParams) -> Result<SolvedPoint> {
    let (mut n, fixed) = match cfg.fock_cutoff {
        CutoffChoice::Auto => (estimate_cutoff(params.r()).min(cfg.max_fock_cutoff), false),
        CutoffChoice::Fixed(n) => (n, true),
    };
    let mut current = solve_at(params, n)?;
    loop {
        let tail = current.0.state.truncation_tail();
        let mut next = None;
        let mut converged = tail <= DensityMatrix::TAIL_TOL;
        if converged && cfg.check_cutoff_convergence {
            let finer = solve_at(params, n + CUTOFF_STEP)?;
            converged = current.1.close_to(&finer.1);
            if converged {
                let tail = finer.0.state.truncation_tail();
                let (steady, observables) = finer;
                return Ok(SolvedPoint {
                    params: params.clone(),
                    steady,
                    observables,
                    cutoff: n + CUTOFF_STEP,
                    truncation_tail: tail,
                    converged,
                });
            }
            next = Some(finer);
        }
        if converged || fixed || n + CUTOFF_STEP > cfg.max_fock_cutoff {
            if !converged && !cfg.allow_inadequate_cutoff {
                return Err(CliError::Cutoff(format!(
                    "r = {}, g0 = {}, atom {}: cutoff {n} leaves tail {tail:.3e} (limit {:e}){}",
                    params.r(),
                    params.g0(),
                    params.atom_present(),
                    DensityMatrix::TAIL_TOL,
                    if fixed { "; use fock_cutoff = \"auto\" or a larger value" } else { "; raise max_fock_cutoff" }
                )));
            }
            let (steady, observables) = current;
            return Ok(SolvedPoint {
                params: params.clone(),
                steady,
                observables,
                cutoff: n,
                truncation_tail: tail,
                converged,
            });
        }
        n += CUTOFF_STEP;
        current = match next {
            Some(finer) => finer,
            None => solve_at(params, n)?,
        };
    }
}

fn record(cfg: &ScenarioConfig, case: Case, p: &SolvedPoint) -> Result<ObservableRecord> {
    let params = &p.params;
    let lab = &p.observables.lab_moments;
    Ok(ObservableRecord {
        scenario: cfg.scenario.name().into(),
        case: case.label().into(),
        frame: params.frame().as_str().into(),
        coupling: params.coupling().as_str().into(),
        atom_present: case.atom_present,
        g0_over_kappa: case.g0_over_kappa,
        gamma_over_kappa: cfg.gamma_over_kappa,
        delta_c_over_kappa: params.delta_c(),
        r: params.r(),
        omega_p_over_kappa: params.omega_p_amp(),
        omega_s_over_kappa: params.omega_s(),
        mean_photon: p.observables.frame_moments.mean_photon,
        abs_second_moment: p.observables.frame_moments.abs_second_moment(),
        lab_mean_photon: lab.mean_photon,
        lab_abs_second_moment: lab.abs_second_moment(),
        output_flux: output_flux(lab, params.kappa())?,
        photon_probs: p.observables.photon_probs.clone(),
        rwa_ratio: params.rwa_ratio(),
        cutoff: p.cutoff,
        residual: p.steady.residual,
        truncation_tail: p.truncation_tail,
        cutoff_converged: p.converged,
    })
}

/// Everything a scenario produces, before it is written to disk.
#[derive(Clone, Debug, Default)]
pub struct ScenarioOutput {
    pub records: Vec<ObservableRecord>,
    pub sensitivity: Vec<ObservableRecord>,
    pub trajectories: Vec<TrajectoryPoint>,
    pub enhancement: Vec<EnhancementRow>,
    pub wigner: Vec<WignerResult>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct WignerResult {
    pub summary: WignerSummary,
    pub grid: WignerGrid,
}

#[derive(Clone, Copy, Debug)]
struct Job {
    case: Case,
    delta_c: f64,
    r: f64,
}

fn jobs(cfg: &ScenarioConfig, delta_c: f64) -> Result<Vec<Job>> {
    let rs = cfg.r_values_at(delta_c)?;
    Ok(cfg.cases.iter().flat_map(|&case| rs.iter().map(move |&r| Job { case, delta_c, r })).collect())
}

fn rwa_warnings(cfg: &ScenarioConfig, jobs: &[Job]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for job in jobs {
        let params = model_params(cfg, job.case, job.delta_c, job.r)?;
        if let Some(w) = params.rwa_warning() {
            out.push(format!("{} {} g0={} Δ_c={} r={}: {w}", cfg.scenario, job.case.label(), job.case.g0_over_kappa, job.delta_c, job.r));
        }
    }
    Ok(out)
}

fn steady_records(cfg: &ScenarioConfig, jobs: &[Job]) -> Result<Vec<ObservableRecord>> {
    jobs.par_iter()
        .map(|job| {
            let params = model_params(cfg, job.case, job.delta_c, job.r)?;
            let solved = solve_point(cfg, &params)?;
            let rec = record(cfg, job.case, &solved)?;
            rec.validate(cfg.allow_inadequate_cutoff)?;
            Ok(rec)
        })
        .collect()
}

fn trajectory(cfg: &ScenarioConfig, job: &Job) -> Result<Vec<TrajectoryPoint>> {
    let params = model_params(cfg, job.case, job.delta_c, job.r)?;
    let solved = solve_point(cfg, &params)?;
    let mut cutoff = solved.cutoff;
    let rho0 = match params.frame() {
        Frame::Squeezed => DensityMatrix::ground_vacuum(HilbertDims::new(cutoff)?),
        Frame::Lab => {
            // |g⟩ ⊗ S(r)|0⟩ has to fit as well
            while squeezed_vacuum_series(job.r, cutoff).tail > DensityMatrix::TAIL_TOL * 1e-2 && cutoff < cfg.max_fock_cutoff {
                cutoff += CUTOFF_STEP;
            }
            squeezed_vacuum_state(job.r, HilbertDims::new(cutoff)?)?
        }
    };
    let l = Liouvillian::for_model(&params, HilbertDims::new(cutoff)?)?;
    let grid = uniform_grid(cfg.time_horizon, cfg.time_points);
    let traj = evolve(&rho0, &l, &grid, cfg.integrator())?;
    let worst_tail = traj.states.iter().map(|s| s.truncation_tail()).fold(0.0, f64::max);
    if worst_tail > DensityMatrix::TAIL_TOL && !cfg.allow_inadequate_cutoff {
        return Err(CliError::Cutoff(format!("r = {}: transient reaches tail {worst_tail:.3e} at cutoff {cutoff}", job.r)));
    }
    let frame = params.frame();
    traj.times
        .iter()
        .zip(&traj.states)
        .zip(&traj.min_eigenvalues)
        .map(|((&t, state), &min_eig)| {
            let ms = moments(state, frame);
            let point = TrajectoryPoint {
                scenario: cfg.scenario.name().into(),
                case: job.case.label().into(),
                frame: frame.as_str().into(),
                atom_present: job.case.atom_present,
                g0_over_kappa: job.case.g0_over_kappa,
                r: job.r,
                t,
                mean_photon: ms.mean_photon,
                abs_second_moment: ms.abs_second_moment(),
                min_eigenvalue: min_eig,
                cutoff,
            };
            point.validate()?;
            Ok(point)
        })
        .collect()
}

/// Lab-frame state of a solved point; squeezed-frame solutions are mapped
/// with `S(r)` onto a lab cutoff large enough to hold them.
fn lab_state(cfg: &ScenarioConfig, p: &SolvedPoint) -> Result<(DensityMatrix, usize)> {
    match p.params.frame() {
        Frame::Lab => Ok((p.steady.state.clone(), p.cutoff)),
        Frame::Squeezed => {
            let mut n = p.cutoff.max(estimate_cutoff(2.0 * p.params.r()));
            loop {
                match squeezed_to_lab(&p.steady.state, p.params.r(), HilbertDims::new(n)?) {
                    Ok(rho) => return Ok((rho, n)),
                    Err(sqzcav::Error::TruncationInsufficient(_)) if n + CUTOFF_STEP <= cfg.max_fock_cutoff => {
                        n += CUTOFF_STEP;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
}

/// File name of one Wigner grid.
pub fn wigner_file_name(cfg: &ScenarioConfig, case: Case, r: f64) -> String {
    format!("{}_wigner_{}_g0_{}_r_{}.csv", cfg.scenario, case.label(), case.g0_over_kappa, r)
}

fn wigner_point(cfg: &ScenarioConfig, job: &Job) -> Result<WignerResult> {
    let params = model_params(cfg, job.case, job.delta_c, job.r)?;
    let solved = solve_point(cfg, &params)?;
    let (rho, cutoff) = lab_state(cfg, &solved)?;
    let axis = linspace(-cfg.wigner_range, cfg.wigner_range, cfg.wigner_points);
    let grid = wigner(&rho, &axis, &axis);
    let stats = grid.quadrature_stats();
    let (major, minor) = stats.principal_variances();
    let summary = WignerSummary {
        scenario: cfg.scenario.name().into(),
        case: job.case.label().into(),
        atom_present: job.case.atom_present,
        g0_over_kappa: job.case.g0_over_kappa,
        r: job.r,
        integral: grid.integral(),
        min_value: grid.values.min(),
        max_value: grid.values.max(),
        mean_x: stats.mean.0,
        mean_p: stats.mean.1,
        variance_major: major,
        variance_minor: minor,
        variance_ratio: major / minor,
        cutoff,
        residual: solved.steady.residual,
        grid_file: wigner_file_name(cfg, job.case, job.r),
    };
    summary.validate()?;
    Ok(WignerResult { summary, grid })
}

/// Runs every computation of a scenario. Points are solved in parallel;
/// results keep the (case, r) order of the config.
pub fn compute_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let kind = cfg.scenario.kind();
    if !cfg.sensitivity_delta_c.is_empty() && kind != ScenarioKind::SteadyState {
        return Err(CliError::Config(format!("sensitivity_delta_c only applies to steady-state scenarios, not {}", cfg.scenario)));
    }
    let mut out = ScenarioOutput::default();
    if kind == ScenarioKind::Enhancement {
        out.enhancement = cfg.r_values()?.into_iter().map(EnhancementRow::new).collect();
        return Ok(out);
    }
    let main = jobs(cfg, cfg.delta_c_over_kappa)?;
    out.warnings = rwa_warnings(cfg, &main)?;
    match kind {
        ScenarioKind::SteadyState => {
            out.records = steady_records(cfg, &main)?;
            for &dc in &cfg.sensitivity_delta_c {
                let extra = jobs(cfg, dc)?;
                out.warnings.extend(rwa_warnings(cfg, &extra)?);
                out.sensitivity.extend(steady_records(cfg, &extra)?);
            }
        }
        ScenarioKind::Trajectory => {
            let parts: Vec<Vec<TrajectoryPoint>> = main.par_iter().map(|job| trajectory(cfg, job)).collect::<Result<_>>()?;
            out.trajectories = parts.into_iter().flatten().collect();
        }
        ScenarioKind::Wigner => {
            out.wigner = main.par_iter().map(|job| wigner_point(cfg, job)).collect::<Result<_>>()?;
        }
        ScenarioKind::Enhancement => unreachable!(),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScenarioConfig;

    #[test]
    fn cutoff_estimate_grows_with_r() {
        assert_eq!(estimate_cutoff(0.0), 10);
        let a = estimate_cutoff(0.4);
        let b = estimate_cutoff(1.2);
        assert!(a < b);
        assert_eq!(b % 5, 0);
        // thermal tail at 0.8 N is below 1e-7 for the estimate
        let ns = 1.2f64.sinh().powi(2);
        let q = ns / (ns + 1.0);
        assert!(q.powi((4 * b / 5 + 1) as i32) < 1e-7);
    }

    #[test]
    fn auto_cutoff_is_adequate_and_converged() {
        let cfg = ScenarioConfig::from_toml("scenario = \"custom\"\nr_values = [0.6]\ng0_over_kappa = 2.0").unwrap();
        let params = model_params(&cfg, cfg.cases[1], 0.5, 0.6).unwrap();
        let p = solve_point(&cfg, &params).unwrap();
        assert!(p.converged);
        assert!(p.truncation_tail < DensityMatrix::TAIL_TOL);
        let rec = record(&cfg, cfg.cases[1], &p).unwrap();
        assert!(rec.validate(false).is_ok());
    }

    #[test]
    fn small_fixed_cutoff_is_a_hard_error() {
        let text = "scenario = \"custom\"\nr_values = [1.2]\natom_present = false\nfock_cutoff = 6";
        let cfg = ScenarioConfig::from_toml(text).unwrap();
        let params = model_params(&cfg, cfg.cases[0], 0.5, 1.2).unwrap();
        let err = solve_point(&cfg, &params).unwrap_err();
        assert_eq!(err.category(), "cutoff");
        let cfg = ScenarioConfig::from_toml(&format!("{text}\nallow_inadequate_cutoff = true")).unwrap();
        let p = solve_point(&cfg, &params).unwrap();
        assert!(!p.converged);
    }

    #[test]
    fn lab_and_squeezed_empty_cavity_agree_on_lab_moments() {
        let base = "scenario = \"custom\"\nr_values = [0.5]\natom_present = false\n";
        let sq = ScenarioConfig::from_toml(base).unwrap();
        let lab = ScenarioConfig::from_toml(&format!("{base}frame = \"lab\"")).unwrap();
        let a = compute_scenario(&sq).unwrap().records.remove(0);
        let b = compute_scenario(&lab).unwrap().records.remove(0);
        assert!((a.lab_mean_photon - b.lab_mean_photon).abs() < 1e-6);
        assert!((a.lab_abs_second_moment - b.lab_abs_second_moment).abs() < 1e-6);
        for (p, q) in a.photon_probs.iter().zip(&b.photon_probs) {
            assert!((p - q).abs() < 1e-6);
        }
    }
}
