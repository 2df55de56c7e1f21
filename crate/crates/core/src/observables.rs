//! Cavity-field observables: moments, output flux, photon distributions in
//! the bare and squeezed Fock bases, and the Wigner function.

use std::f64::consts::FRAC_2_PI;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{trace_product, CMatrix, CVector, ONE, ZERO};
use crate::model::Frame;
use crate::operators::{
    destroy, displacement_operator, number, squeeze_block, AtomLevel, DensityMatrix, HilbertDims,
};

/// Highest photon number reported in distributions.
pub const REPORTED_LEVELS: usize = 10;

/// Mean photon number and second moment `⟨a²⟩` of the cavity mode of one
/// frame (`a` in the lab frame, `a_s` in the squeezed frame).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentSet {
    pub mean_photon: f64,
    pub second_moment: C64,
    pub frame: Frame,
}

impl MomentSet {
    pub fn abs_second_moment(&self) -> f64 {
        self.second_moment.norm()
    }

    /// `|⟨a²⟩| − √(⟨n⟩(⟨n⟩+1))`, non-positive for any physical state.
    pub fn bound_excess(&self) -> f64 {
        let n = self.mean_photon;
        self.abs_second_moment() - (n * (n + 1.0)).sqrt()
    }
}

/// `⟨a†a⟩` and `⟨a²⟩` of `rho`, labelled with the frame the state belongs to.
pub fn moments(rho: &DensityMatrix, frame: Frame) -> MomentSet {
    let dims = rho.dims();
    let a = destroy(dims);
    let a2 = a.compose(&a).expect("same dims");
    let mean = trace_product(number(dims).matrix(), rho.matrix()).re;
    let second = trace_product(a2.matrix(), rho.matrix());
    MomentSet { mean_photon: mean, second_moment: second, frame }
}

/// Maps squeezed-frame moments to the lab frame (`a = a_s cosh r − a_s† sinh r`):
///
/// `⟨a†a⟩ = sinh²r + ⟨a_s†a_s⟩ cosh 2r − Re⟨a_s²⟩ sinh 2r`,
/// `⟨a²⟩ = cosh²r ⟨a_s²⟩ + sinh²r ⟨a_s²⟩* − ⟨a_s†a_s⟩ sinh 2r − sinh r cosh r`.
pub fn lab_moments_from_squeezed(ms: &MomentSet, r: f64) -> Result<MomentSet> {
    if ms.frame != Frame::Squeezed {
        return Err(Error::WrongFrame("moments to map must come from the squeezed frame".into()));
    }
    let (s, c) = (r.sinh(), r.cosh());
    let (ch2, sh2) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let n = ms.mean_photon;
    let m = ms.second_moment;
    let mean = s * s + n * ch2 - m.re * sh2;
    let second = m * (c * c) + m.conj() * (s * s) - C64::new(n * sh2 + s * c, 0.0);
    Ok(MomentSet { mean_photon: mean, second_moment: second, frame: Frame::Lab })
}

/// Output photon flux `κ⟨a†a⟩` of lab-frame moments.
pub fn output_flux(ms: &MomentSet, kappa: f64) -> Result<f64> {
    if ms.frame != Frame::Lab {
        return Err(Error::WrongFrame("output flux needs lab-frame moments".into()));
    }
    Ok(kappa * ms.mean_photon)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhotonBasis {
    BareFock,
    /// The states `S(r)|n⟩`.
    SqueezedFock { r: f64 },
}

/// Populations `P_0 … P_n` of the cavity field in a given basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonDistribution {
    pub basis: PhotonBasis,
    pub probs: Vec<f64>,
}

impl PhotonDistribution {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Checks `P_n ∈ [−1e-10, 1]` and `Σ P_n ≤ 1 + 1e-8`.
    pub fn is_valid(&self) -> bool {
        self.probs.iter().all(|&p| (-1e-10..=1.0 + 1e-10).contains(&p)) && self.total() <= 1.0 + 1e-8
    }
}

/// Cavity populations `n = 0..=10` of a lab-frame state in `basis`.
///
/// In the squeezed basis `P_n = ⟨n|S†(r) ρ_cav S(r)|n⟩`, using the exact
/// squeeze-operator elements between the retained levels.
pub fn photon_distribution(rho_lab: &DensityMatrix, basis: PhotonBasis) -> Result<PhotonDistribution> {
    let cav = rho_lab.cavity_state();
    let levels = (REPORTED_LEVELS + 1).min(cav.nrows());
    let probs = match basis {
        PhotonBasis::BareFock => (0..levels).map(|n| cav[(n, n)].re).collect(),
        PhotonBasis::SqueezedFock { r } => {
            let block = squeeze_block(r, 0.0, cav.nrows(), REPORTED_LEVELS + 1)?;
            let pops = block.adjoint() * cav * &block;
            (0..=REPORTED_LEVELS).map(|n| pops[(n, n)].re).collect()
        }
    };
    Ok(PhotonDistribution { basis, probs })
}

/// Populations of a squeezed-frame state, which are its squeezed-Fock
/// populations in the lab frame.
pub fn squeezed_frame_distribution(rho_s: &DensityMatrix, r: f64) -> PhotonDistribution {
    let cav = rho_s.cavity_state();
    let levels = (REPORTED_LEVELS + 1).min(cav.nrows());
    PhotonDistribution { basis: PhotonBasis::SqueezedFock { r }, probs: (0..levels).map(|n| cav[(n, n)].re).collect() }
}

/// Lab-frame image `S(r) ρ_s S†(r)` of a squeezed-frame state on `lab_dims`.
///
/// Fails with [`Error::TruncationInsufficient`] when more than 1e-8 of the
/// transformed state falls outside the lab cutoff.
pub fn squeezed_to_lab(rho_s: &DensityMatrix, r: f64, lab_dims: HilbertDims) -> Result<DensityMatrix> {
    let sd = rho_s.dims();
    let s = squeeze_block(r, 0.0, lab_dims.cavity_dim(), sd.cavity_dim())?;
    let (lc, sc) = (lab_dims.cavity_dim(), sd.cavity_dim());
    let mut out = CMatrix::zeros(lab_dims.dim(), lab_dims.dim());
    for a in 0..2 {
        for b in 0..2 {
            let block = rho_s.matrix().view((a * sc, b * sc), (sc, sc));
            let img = &s * block * s.adjoint();
            out.view_mut((a * lc, b * lc), (lc, lc)).copy_from(&img);
        }
    }
    let lost = (ONE - out.trace()).norm();
    if lost > 1e-8 {
        return Err(Error::TruncationInsufficient(format!(
            "{lost:.3e} of the squeezed state lies above lab cutoff {}",
            lab_dims.fock_cutoff()
        )));
    }
    let out = (&out + out.adjoint()) * C64::new(0.5 / out.trace().re, 0.0);
    DensityMatrix::new(lab_dims, out)
}

/// Truncated expansion of the squeezed vacuum
/// `|0_s⟩ = (cosh r)^{-1/2} Σ_n (−1)^n √((2n)!)/(2^n n!) tanh^n r |2n⟩`.
#[derive(Clone, Debug)]
pub struct SqueezedVacuumSeries {
    /// Amplitudes on levels `0..=N_max` (odd entries are zero).
    pub amplitudes: CVector,
    /// `1 − Σ |c_n|²`, the weight beyond the cutoff.
    pub tail: f64,
}

pub fn squeezed_vacuum_series(r: f64, fock_cutoff: usize) -> SqueezedVacuumSeries {
    let t = r.tanh();
    let mut amps = CVector::zeros(fock_cutoff + 1);
    let mut c = 1.0 / r.cosh().sqrt();
    let mut n = 0usize;
    while 2 * n <= fock_cutoff {
        amps[2 * n] = C64::new(c, 0.0);
        c *= -t * (((2 * n + 1) as f64) / ((2 * n + 2) as f64)).sqrt();
        n += 1;
    }
    // the complementary sum converges faster than 1 − Σ|c|² loses digits
    let mut tail = 0.0;
    let mut term = c * c;
    let mut k = n;
    while term > 1e-300 * (1.0 + tail) && k < n + 100_000 {
        tail += term;
        term *= t * t * ((2 * k + 1) as f64) / ((2 * k + 2) as f64);
        k += 1;
        if term < 1e-18 * tail {
            break;
        }
    }
    SqueezedVacuumSeries { amplitudes: amps, tail }
}

/// `|g⟩ ⊗ |0_s⟩` from the series, renormalized after truncation. Fails when
/// the weight beyond the cutoff exceeds 1e-6.
pub fn squeezed_vacuum_state(r: f64, dims: HilbertDims) -> Result<DensityMatrix> {
    let series = squeezed_vacuum_series(r, dims.fock_cutoff());
    if series.tail > DensityMatrix::TAIL_TOL {
        return Err(Error::TruncationInsufficient(format!(
            "squeezed vacuum at r = {r} leaves {:.3e} beyond cutoff {}",
            series.tail,
            dims.fock_cutoff()
        )));
    }
    let norm = series.amplitudes.norm();
    let mut ket = CVector::zeros(dims.dim());
    for n in 0..dims.cavity_dim() {
        ket[dims.index(AtomLevel::Ground, n)] = series.amplitudes[n] / norm;
    }
    let m = &ket * ket.adjoint();
    DensityMatrix::new(dims, (&m + m.adjoint()) * C64::new(0.5, 0.0))
}

/// Wigner function sampled on a rectangular grid, `α = x + i p`.
/// `values[(j, i)]` is `W(x_i, p_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    pub values: DMatrix<f64>,
}

/// Mean and covariance of the quadratures under a sampled Wigner function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureStats {
    pub mean: (f64, f64),
    pub covariance: Matrix2<f64>,
}

impl QuadratureStats {
    /// Principal variances `(major, minor)`.
    pub fn principal_variances(&self) -> (f64, f64) {
        let e = self.covariance.symmetric_eigenvalues();
        (e[0].max(e[1]), e[0].min(e[1]))
    }

    pub fn variance_ratio(&self) -> f64 {
        let (major, minor) = self.principal_variances();
        major / minor
    }
}

impl WignerGrid {
    pub const VALUE_BOUND: f64 = FRAC_2_PI;

    /// The default sampling: 81 × 81 points on `[−4, 4]²`.
    pub fn default_axes() -> (Vec<f64>, Vec<f64>) {
        let axis = linspace(-4.0, 4.0, 81);
        (axis.clone(), axis)
    }

    fn cell_area(&self) -> f64 {
        spacing(&self.x_axis) * spacing(&self.p_axis)
    }

    /// Riemann-sum integral of `W` over the grid.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.cell_area()
    }

    /// Checks `|W| ≤ 2/π` up to 1e-9.
    pub fn within_bounds(&self) -> bool {
        self.values.iter().all(|&w| w.abs() <= Self::VALUE_BOUND + 1e-9)
    }

    pub fn quadrature_stats(&self) -> QuadratureStats {
        let total = self.values.sum();
        let mut mx = 0.0;
        let mut mp = 0.0;
        for (j, &p) in self.p_axis.iter().enumerate() {
            for (i, &x) in self.x_axis.iter().enumerate() {
                let w = self.values[(j, i)];
                mx += w * x;
                mp += w * p;
            }
        }
        mx /= total;
        mp /= total;
        let (mut sxx, mut spp, mut sxp) = (0.0, 0.0, 0.0);
        for (j, &p) in self.p_axis.iter().enumerate() {
            for (i, &x) in self.x_axis.iter().enumerate() {
                let w = self.values[(j, i)];
                sxx += w * (x - mx) * (x - mx);
                spp += w * (p - mp) * (p - mp);
                sxp += w * (x - mx) * (p - mp);
            }
        }
        QuadratureStats { mean: (mx, mp), covariance: Matrix2::new(sxx, sxp, sxp, spp) / total }
    }
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n).map(|k| start + (stop - start) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn spacing(axis: &[f64]) -> f64 {
    if axis.len() < 2 {
        1.0
    } else {
        (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64
    }
}

/// Matrix elements `⟨m|D(β)|n⟩`, `m, n < dim`, of the untruncated
/// displacement operator, from the associated-Laguerre closed form
/// `⟨n+k|D(β)|n⟩ = √(n!/(n+k)!) β^k e^{−|β|²/2} L_n^{(k)}(|β|²)`.
fn displacement_elements(beta: C64, dim: usize) -> CMatrix {
    let mut out = CMatrix::zeros(dim, dim);
    let x = beta.norm_sqr();
    if x == 0.0 {
        for n in 0..dim {
            out[(n, n)] = ONE;
        }
        return out;
    }
    let phase = beta / beta.norm();
    let lower_phase = -phase.conj();
    let ln_mod = beta.norm().ln();
    for k in 0..dim {
        // f_n = √(n!/(n+k)!) e^{−x/2} |β|^k L_n^{(k)}(x), by the normalized recurrence
        let kf = k as f64;
        let log_f0 = -0.5 * x + kf * ln_mod - 0.5 * ln_factorial(k);
        let mut prev = 0.0;
        let mut cur = log_f0.exp();
        let up = phase.powu(k as u32);
        let down = lower_phase.powu(k as u32);
        for n in 0..dim - k {
            out[(n + k, n)] = up * cur;
            if k > 0 {
                out[(n, n + k)] = down * cur;
            }
            let nf = n as f64;
            let next = ((2.0 * nf + 1.0 + kf - x) * cur - (nf * (nf + kf)).sqrt() * prev) / ((nf + 1.0) * (nf + kf + 1.0)).sqrt();
            prev = cur;
            cur = next;
        }
    }
    out
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

fn parity_weighted(cav: &CMatrix) -> CMatrix {
    // Π ρ
    let mut m = cav.clone();
    for n in (1..m.nrows()).step_by(2) {
        m.row_mut(n).neg_mut();
    }
    m
}

/// `W(α) = (2/π) Tr[D(α) Π D†(α) ρ_cav]` on a grid, `Π = (−1)^{a†a}`.
///
/// Uses `D(α) Π D†(α) = D(2α) Π` and exact displacement matrix elements, so
/// the only approximation is the truncation already present in the state.
pub fn wigner(rho_lab: &DensityMatrix, x_grid: &[f64], p_grid: &[f64]) -> WignerGrid {
    let cav = rho_lab.cavity_state();
    let pr = parity_weighted(&cav);
    let dim = cav.nrows();
    let mut values = DMatrix::zeros(p_grid.len(), x_grid.len());
    for (j, &p) in p_grid.iter().enumerate() {
        for (i, &x) in x_grid.iter().enumerate() {
            let d = displacement_elements(C64::new(2.0 * x, 2.0 * p), dim);
            values[(j, i)] = FRAC_2_PI * trace_product(&d, &pr).re;
        }
    }
    WignerGrid { x_axis: x_grid.to_vec(), p_axis: p_grid.to_vec(), values }
}

/// Single-point Wigner value evaluated literally as
/// `(2/π) Tr[D(α) Π D†(α) ρ]`, with the displacement operator exponentiated
/// on a padded cavity space. Independent of the route used by [`wigner`].
pub fn wigner_direct(rho_lab: &DensityMatrix, alpha: C64) -> Result<f64> {
    let cav = rho_lab.cavity_state();
    let dim = cav.nrows();
    let reach = (dim as f64).sqrt() + alpha.norm();
    let padded = dim + (reach * reach + 12.0 * reach).ceil() as usize + 40;
    let pdims = HilbertDims::new(padded - 1)?;
    let d = displacement_operator(pdims, alpha)?.cavity_block();
    let mut parity = d.clone();
    for k in (1..padded).step_by(2) {
        parity.column_mut(k).neg_mut();
    }
    let kernel = parity * d.adjoint();
    let mut acc = ZERO;
    for i in 0..dim {
        for j in 0..dim {
            acc += kernel[(i, j)] * cav[(j, i)];
        }
    }
    Ok(FRAC_2_PI * acc.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::operators::squeeze_operator;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dims(n: usize) -> HilbertDims {
        HilbertDims::new(n).unwrap()
    }

    fn squeezed_vacuum_by_operator(r: f64, d: HilbertDims) -> CVector {
        let s = squeeze_operator(d, r, 0.0).unwrap();
        s.matrix().column(d.index(AtomLevel::Ground, 0)).into_owned()
    }

    #[test]
    fn vacuum_and_fock_moments() {
        let d = dims(5);
        let m = moments(&DensityMatrix::ground_vacuum(d), Frame::Lab);
        assert_eq!((m.mean_photon, m.second_moment), (0.0, ZERO));
        let m = moments(&DensityMatrix::basis(d, AtomLevel::Excited, 2), Frame::Lab);
        assert!((m.mean_photon - 2.0).abs() < 1e-15 && m.second_moment == ZERO);
    }

    #[test]
    fn squeezed_vacuum_moments_lock_the_phase_convention() {
        let d = dims(60);
        let r = 0.7;
        let rho = DensityMatrix::from_ket(d, &squeezed_vacuum_by_operator(r, d)).unwrap();
        let m = moments(&rho, Frame::Lab);
        assert!((m.mean_photon - r.sinh().powi(2)).abs() < 1e-10);
        assert!((m.second_moment - C64::new(-r.sinh() * r.cosh(), 0.0)).norm() < 1e-10);
        assert!(m.bound_excess() < 1e-8);
    }

    #[test]
    fn lab_map_examples() {
        let ms = MomentSet { mean_photon: 0.37, second_moment: C64::new(0.1, -0.2), frame: Frame::Squeezed };
        let same = lab_moments_from_squeezed(&ms, 0.0).unwrap();
        assert!((same.mean_photon - 0.37).abs() < 1e-15 && (same.second_moment - ms.second_moment).norm() < 1e-15);
        let vac = MomentSet { mean_photon: 0.0, second_moment: ZERO, frame: Frame::Squeezed };
        let lab = lab_moments_from_squeezed(&vac, 1.0).unwrap();
        assert!((lab.mean_photon - 1.38110).abs() < 1e-5);
        assert!((lab.abs_second_moment() - 1.81343).abs() < 1e-5);
        assert!(lab_moments_from_squeezed(&lab, 1.0).is_err());
    }

    #[test]
    fn lab_map_matches_conjugated_state() {
        // ρ_lab = S ρ_s S† for a random low-lying squeezed-frame state
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let sd = dims(4);
        let n = sd.dim();
        let a = CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let m = &a * a.adjoint();
        let tr = m.trace();
        let rho_s = DensityMatrix::new(sd, m / tr).unwrap();
        let r = 0.5;
        let rho_lab = squeezed_to_lab(&rho_s, r, dims(70)).unwrap();
        let direct = moments(&rho_lab, Frame::Lab);
        let mapped = lab_moments_from_squeezed(&moments(&rho_s, Frame::Squeezed), r).unwrap();
        assert!((direct.mean_photon - mapped.mean_photon).abs() < 1e-9);
        assert!((direct.second_moment - mapped.second_moment).norm() < 1e-9);
    }

    #[test]
    fn flux_examples() {
        let lab = MomentSet { mean_photon: 1.38110, second_moment: ZERO, frame: Frame::Lab };
        assert_eq!(output_flux(&lab, 1.0).unwrap(), 1.38110);
        let zero = MomentSet { mean_photon: 0.0, ..lab };
        assert_eq!(output_flux(&zero, 1.0).unwrap(), 0.0);
        assert!(output_flux(&MomentSet { frame: Frame::Squeezed, ..lab }, 1.0).is_err());
    }

    #[test]
    fn squeezed_basis_alignment() {
        let d = dims(90);
        let r = 1.0;
        let rho = DensityMatrix::from_ket(d, &squeezed_vacuum_by_operator(r, d)).unwrap();
        let dist = photon_distribution(&rho, PhotonBasis::SqueezedFock { r }).unwrap();
        assert!((dist.probs[0] - 1.0).abs() < 1e-10);
        assert!(dist.probs[1..].iter().all(|p| p.abs() < 1e-10));
        assert!(dist.is_valid());
    }

    #[test]
    fn vacuum_in_squeezed_basis() {
        let d = dims(20);
        let dist = photon_distribution(&DensityMatrix::ground_vacuum(d), PhotonBasis::SqueezedFock { r: 1.0 }).unwrap();
        assert!((dist.probs[0] - 1.0 / 1f64.cosh()).abs() < 1e-12);
        assert!((dist.probs[0] - 0.64805).abs() < 1e-5);
        assert!(dist.probs[1] < 1e-12);
        // tanh²(1)/(2 cosh 1) from the series coefficient
        assert!((dist.probs[2] - 1f64.tanh().powi(2) / (2.0 * 1f64.cosh())).abs() < 1e-12);
        assert!((dist.probs[2] - 0.1879441).abs() < 1e-6);
    }

    #[test]
    fn series_matches_operator() {
        let d = dims(100);
        for r in [0.0, 0.3, 0.8, 1.2] {
            let series = squeezed_vacuum_series(r, d.fock_cutoff());
            let op = squeezed_vacuum_by_operator(r, d);
            let overlap: C64 = (0..d.cavity_dim()).map(|n| series.amplitudes[n].conj() * op[n]).sum();
            assert!(1.0 - overlap.norm_sqr() < 1e-8, "r = {r}");
            for n in (1..d.cavity_dim()).step_by(2) {
                assert!(op[n].norm_sqr() < 1e-12);
            }
        }
        let vac = squeezed_vacuum_state(0.0, dims(4)).unwrap();
        assert_eq!(vac, DensityMatrix::ground_vacuum(dims(4)));
    }

    #[test]
    fn series_tail() {
        // frozen from an independent summation of the series
        let tail40 = squeezed_vacuum_series(1.2, 40).tail;
        assert!((tail40 - 1.0157e-4).abs() < 1e-7, "{tail40}");
        let direct = 1.0 - squeezed_vacuum_series(1.2, 40).amplitudes.norm_squared();
        assert!((direct - tail40).abs() < 1e-13);
        assert!(squeezed_vacuum_series(1.2, 80).tail < 1e-6);
        assert!(squeezed_vacuum_state(1.2, dims(40)).is_err());
        assert!(squeezed_vacuum_state(1.2, dims(80)).is_ok());
    }

    #[test]
    fn displacement_elements_match_exponential() {
        let d = dims(25);
        let beta = C64::new(1.1, -0.6);
        let exact = displacement_operator(d, beta).unwrap().cavity_block();
        let lag = displacement_elements(beta, d.cavity_dim());
        assert!(max_abs(&(exact - lag)) < 1e-12);
    }

    #[test]
    fn wigner_special_values() {
        let d = dims(10);
        let w = wigner(&DensityMatrix::ground_vacuum(d), &[0.0], &[0.0]);
        assert!((w.values[(0, 0)] - FRAC_2_PI).abs() < 1e-12);
        let w = wigner(&DensityMatrix::basis(d, AtomLevel::Ground, 1), &[0.0], &[0.0]);
        assert!((w.values[(0, 0)] + FRAC_2_PI).abs() < 1e-12);
    }

    #[test]
    fn vacuum_grid_statistics() {
        let d = dims(10);
        let (x, p) = WignerGrid::default_axes();
        let w = wigner(&DensityMatrix::ground_vacuum(d), &x, &p);
        assert!((w.integral() - 1.0).abs() < 1e-2);
        assert!(w.within_bounds());
        let (major, minor) = w.quadrature_stats().principal_variances();
        assert!((major - 0.25).abs() < 1e-3 && (minor - 0.25).abs() < 1e-3);
    }

    #[test]
    fn squeezed_vacuum_grid_variances() {
        let d = dims(60);
        let r = 1.0;
        let rho = squeezed_vacuum_state(r, d).unwrap();
        let axis = linspace(-6.0, 6.0, 121);
        let w = wigner(&rho, &axis, &axis);
        let stats = w.quadrature_stats();
        let (major, minor) = stats.principal_variances();
        assert!((major / ((2.0 * r).exp() / 4.0) - 1.0).abs() < 0.02, "{major}");
        assert!((minor / ((-2.0 * r).exp() / 4.0) - 1.0).abs() < 0.02, "{minor}");
        // x is the squeezed quadrature of S(r)|0⟩
        assert!(stats.covariance[(0, 0)] < stats.covariance[(1, 1)]);
        assert!((w.integral() - 1.0).abs() < 1e-2);
        assert!(w.within_bounds());
    }

    #[test]
    fn wigner_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let d = dims(12);
        let n = d.dim();
        let a = CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let m = &a * a.adjoint();
        let tr = m.trace();
        let rho = DensityMatrix::new(d, m / tr).unwrap();
        for _ in 0..5 {
            let alpha = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let w = wigner(&rho, &[alpha.re], &[alpha.im]).values[(0, 0)];
            let direct = wigner_direct(&rho, alpha).unwrap();
            assert!((w - direct).abs() < 1e-8, "{alpha}: {w} vs {direct}");
        }
    }
}
