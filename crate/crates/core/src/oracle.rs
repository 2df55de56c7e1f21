//! Reference calculations that share no code with the main solvers.
//!
//! # Moment equations of the empty pumped cavity
//!
//! With `H = Δ a†a + (Ω/2)(e^{iθ}a² + e^{−iθ}a†²)` and decay `κ D[a]`, the
//! adjoint master equation `d⟨O⟩/dt = i⟨[H, O]⟩ + κ⟨a†Oa − ½{a†a, O}⟩` gives
//!
//! ```text
//! d⟨a⟩/dt   = −(κ/2 + iΔ)⟨a⟩ − iΩ e^{−iθ}⟨a†⟩
//! d⟨a²⟩/dt  = −(κ + 2iΔ)⟨a²⟩ − iΩ e^{−iθ}(2⟨a†a⟩ + 1)
//! d⟨a†a⟩/dt = −κ⟨a†a⟩ − 2Ω Im(e^{iθ}⟨a²⟩)
//! ```
//!
//! In the real variables `n = ⟨a†a⟩`, `u + iv = ⟨a²⟩` this is the closed
//! linear system
//!
//! ```text
//! ṅ = −κn − 2Ω(sin θ u + cos θ v)
//! u̇ = −κu + 2Δv − 2Ω sin θ n − Ω sin θ
//! v̇ = −2Δu − κv − 2Ω cos θ n − Ω cos θ
//! ```
//!
//! whose fixed point is the steady state. For `θ = 0` it reduces to
//! `n = 2Ω²/(κ² + 4Δ² − 4Ω²)`.

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::DissipatorSpec;
use crate::operators::{DensityMatrix, FockOperator};

/// Steady-state `⟨a†a⟩` and `⟨a²⟩` of the empty cavity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianMoments {
    pub mean_photon: f64,
    pub second_moment: C64,
}

/// Fixed point of the moment equations with `θ_p = 0`.
pub fn empty_cavity_steady_moments(delta_c: f64, omega_p_amp: f64, kappa: f64) -> Result<GaussianMoments> {
    empty_cavity_steady_moments_with_phase(delta_c, omega_p_amp, 0.0, kappa)
}

pub fn empty_cavity_steady_moments_with_phase(
    delta_c: f64,
    omega_p_amp: f64,
    theta_p: f64,
    kappa: f64,
) -> Result<GaussianMoments> {
    if !(kappa > 0.0) || omega_p_amp < 0.0 || !delta_c.is_finite() || !omega_p_amp.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need κ > 0 and Ω_p ≥ 0, got κ = {kappa}, Ω_p = {omega_p_amp}, Δ_c = {delta_c}"
        )));
    }
    if omega_p_amp >= delta_c.abs() {
        return Err(Error::AtThreshold { delta_c, omega_p: omega_p_amp });
    }
    let (s, c) = theta_p.sin_cos();
    let (d, o, k) = (delta_c, omega_p_amp, kappa);
    let m = Matrix3::new(
        -k, -2.0 * o * s, -2.0 * o * c, //
        -2.0 * o * s, -k, 2.0 * d, //
        -2.0 * o * c, -2.0 * d, -k,
    );
    if m.complex_eigenvalues().iter().any(|z| z.re >= 0.0) {
        return Err(Error::AtThreshold { delta_c, omega_p: omega_p_amp });
    }
    let b = Vector3::new(0.0, o * s, o * c);
    let y = m.lu().solve(&b).ok_or_else(|| Error::Solver("singular moment system".into()))?;
    Ok(GaussianMoments { mean_photon: y[0], second_moment: C64::new(y[1], y[2]) })
}

/// Largest composite dimension accepted by [`small_system_brute_force`].
pub const BRUTE_FORCE_MAX_DIM: usize = 8;

fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (br, bc) = b.shape();
    DMatrix::from_fn(a.nrows() * br, a.ncols() * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// `exp(tL) vec(ρ₀)` with the generator written out densely as Kronecker
/// products and exponentiated in one shot.
pub fn small_system_brute_force(
    h: &FockOperator,
    dissipators: &[DissipatorSpec],
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    let dims = h.dims();
    let d = dims.dim();
    if d > BRUTE_FORCE_MAX_DIM {
        return Err(Error::TooLarge { dim: d, max: BRUTE_FORCE_MAX_DIM });
    }
    if rho0.dims() != dims {
        return Err(Error::DimensionMismatch { expected: d, found: rho0.dims().dim() });
    }
    let id = DMatrix::<C64>::identity(d, d);
    let hm = h.matrix();
    let mi = C64::new(0.0, -1.0);
    let mut gen = (kron(&id, hm) - kron(&hm.transpose(), &id)) * mi;
    let half = C64::new(0.5, 0.0);
    for spec in dissipators {
        let j = spec.jump_operator.matrix();
        let jd = j.adjoint();
        let jdj = &jd * j;
        gen += (kron(&j.conjugate(), j) - (kron(&id, &jdj) + kron(&jdj.transpose(), &id)) * half) * C64::new(spec.rate, 0.0);
        for cross in &spec.cross_terms {
            let (l, r) = (cross.left.matrix(), cross.right.matrix());
            let rl = r * l;
            gen += (kron(&r.transpose(), l) - (kron(&id, &rl) + kron(&rl.transpose(), &id)) * half) * cross.coefficient;
        }
    }
    let prop = (gen * C64::new(t, 0.0)).exp();
    let v0 = DMatrix::from_column_slice(d * d, 1, rho0.matrix().as_slice());
    let v = prop * v0;
    let rho = DMatrix::from_column_slice(d, d, v.as_slice());
    let rho = (&rho + rho.adjoint()) * half;
    DensityMatrix::new(dims, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::model::{build_dissipators, build_hamiltonian, ModelParams};
    use crate::operators::{AtomLevel, HilbertDims};

    #[test]
    fn unpumped_cavity_is_empty() {
        let g = empty_cavity_steady_moments(1.3, 0.0, 1.0).unwrap();
        assert_eq!(g.mean_photon, 0.0);
        assert_eq!(g.second_moment.norm(), 0.0);
    }

    #[test]
    fn closed_form_at_zero_phase() {
        let (d, o, k) = (1.0, 0.7, 1.0);
        let g = empty_cavity_steady_moments(d, o, k).unwrap();
        let want = 2.0 * o * o / (k * k + 4.0 * d * d - 4.0 * o * o);
        assert!((g.mean_photon - want).abs() < 1e-14);
    }

    #[test]
    fn scale_invariance() {
        let a = empty_cavity_steady_moments(0.8, 0.5, 1.0).unwrap();
        let b = empty_cavity_steady_moments(2.4, 1.5, 3.0).unwrap();
        assert!((a.mean_photon - b.mean_photon).abs() < 1e-13);
        assert!((a.second_moment.norm() - b.second_moment.norm()).abs() < 1e-13);
    }

    #[test]
    fn threshold_rejected() {
        assert!(matches!(empty_cavity_steady_moments(1.0, 1.0, 1.0), Err(Error::AtThreshold { .. })));
    }

    #[test]
    fn brute_force_at_zero_time_is_identity() {
        let dims = HilbertDims::new(2).unwrap();
        let p = ModelParams::from_pump(1.0, 0.3).unwrap().with_g0(1.0).unwrap();
        let h = build_hamiltonian(&p, dims).unwrap();
        let diss = build_dissipators(&p, dims).unwrap();
        let rho0 = DensityMatrix::basis(dims, AtomLevel::Excited, 1);
        let out = small_system_brute_force(&h, &diss, &rho0, 0.0).unwrap();
        assert!(max_abs(&(out.matrix() - rho0.matrix())) < 1e-14);
    }

    #[test]
    fn brute_force_semigroup() {
        let dims = HilbertDims::new(3).unwrap();
        let p = ModelParams::from_pump(1.0, 0.4).unwrap().with_g0(0.8).unwrap();
        let h = build_hamiltonian(&p, dims).unwrap();
        let diss = build_dissipators(&p, dims).unwrap();
        let rho0 = DensityMatrix::basis(dims, AtomLevel::Excited, 0);
        let once = small_system_brute_force(&h, &diss, &rho0, 1.1).unwrap();
        let mid = small_system_brute_force(&h, &diss, &rho0, 0.4).unwrap();
        let twice = small_system_brute_force(&h, &diss, &mid, 0.7).unwrap();
        assert!(max_abs(&(once.matrix() - twice.matrix())) < 1e-10);
    }

    #[test]
    fn brute_force_rejects_large_systems() {
        let dims = HilbertDims::new(4).unwrap();
        let h = FockOperator::zeros(dims);
        let rho = DensityMatrix::ground_vacuum(dims);
        assert!(matches!(small_system_brute_force(&h, &[], &rho, 1.0), Err(Error::TooLarge { .. })));
    }
}
