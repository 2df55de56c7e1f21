//! Physical parameters and the Hamiltonians and dissipators of both frames.
//!
//! All rates and frequencies are in units of the cavity decay rate κ. The
//! lab frame is the pumped cavity with detuning `Δ_c` and two-photon drive
//! `Ω_p`; the squeezed frame is the one in which that drive is diagonal,
//! `Δ_c a†a + (Ω_p/2)(a² + a†²) → ω_s a_s†a_s`, reached with the squeeze
//! `a = a_s cosh r − a_s† sinh r`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, CMatrix};
use crate::operators::{atom_ops, create, destroy, number, squeeze_columns, FockOperator, HilbertDims};

/// Hermiticity defect above which an assembled Hamiltonian is rejected.
const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    Lab,
    Squeezed,
}

impl Frame {
    pub fn as_str(&self) -> &'static str {
        match self {
            Frame::Lab => "lab",
            Frame::Squeezed => "squeezed",
        }
    }
}

/// Atom–cavity coupling used in the squeezed frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coupling {
    /// Rotating-wave form `g_s (a_s σ_eg + a_s† σ_ge)`.
    Rotating,
    /// Full transformed coupling `(g_s a_s − g_s' a_s†) σ_eg + h.c.`, exactly
    /// equivalent to the lab-frame Jaynes–Cummings term.
    Full,
}

impl Coupling {
    pub fn as_str(&self) -> &'static str {
        match self {
            Coupling::Rotating => "rwa",
            Coupling::Full => "full",
        }
    }
}

/// `r = ¼ ln((Δ_c + Ω_p)/(Δ_c − Ω_p))`, i.e. `tanh 2r = Ω_p/Δ_c`.
pub fn squeezing_param(delta_c: f64, omega_p_amp: f64) -> Result<f64> {
    check_below_threshold(delta_c, omega_p_amp)?;
    Ok(0.5 * (omega_p_amp / delta_c).atanh())
}

/// Inverse of [`squeezing_param`]: `Ω_p = Δ_c tanh 2r`.
pub fn pump_amplitude(delta_c: f64, r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("squeezing parameter must be finite and non-negative, got {r}")));
    }
    if !(delta_c > 0.0) || !delta_c.is_finite() {
        return Err(Error::InvalidParameter(format!("cavity detuning must be positive, got {delta_c}")));
    }
    Ok(delta_c * (2.0 * r).tanh())
}

/// `ω_s = √(Δ_c² − Ω_p²)`.
pub fn squeezed_frequency(delta_c: f64, omega_p_amp: f64) -> Result<f64> {
    check_below_threshold(delta_c, omega_p_amp)?;
    Ok(((delta_c - omega_p_amp) * (delta_c + omega_p_amp)).sqrt())
}

/// `(g_s, g_s') = (g₀ cosh r, g₀ sinh r)`.
pub fn enhanced_couplings(g0: f64, r: f64) -> (f64, f64) {
    (g0 * r.cosh(), g0 * r.sinh())
}

/// Thermal-like occupation and two-photon correlation of the effective
/// squeezed reservoir seen by the squeezed mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReservoirNoise {
    /// `N_s = sinh² r`
    pub thermal: f64,
    /// `M_s = sinh r cosh r`
    pub correlation: f64,
}

pub fn noise_params(r: f64) -> ReservoirNoise {
    let (s, c) = (r.sinh(), r.cosh());
    ReservoirNoise { thermal: s * s, correlation: s * c }
}

fn check_below_threshold(delta_c: f64, omega_p_amp: f64) -> Result<()> {
    if !delta_c.is_finite() || !omega_p_amp.is_finite() || omega_p_amp < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "need finite Δ_c and Ω_p ≥ 0, got Δ_c = {delta_c}, Ω_p = {omega_p_amp}"
        )));
    }
    if omega_p_amp >= delta_c {
        return Err(Error::AtThreshold { delta_c, omega_p: omega_p_amp });
    }
    Ok(())
}

/// Full parameter set of one simulation.
///
/// Constructed from `(Δ_c, Ω_p)` or `(Δ_c, r)`; the derived `r`, `Ω_p`, `ω_s`
/// are stored consistently. The atom detuning defaults to the resonance
/// `Δ_A = ω_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    kappa: f64,
    gamma: f64,
    g0: f64,
    delta_c: f64,
    omega_p_amp: f64,
    theta_p: f64,
    delta_a: f64,
    r: f64,
    omega_s: f64,
    frame: Frame,
    atom_present: bool,
    coupling: Coupling,
}

impl ModelParams {
    /// Ratio `|g_s'|/(ω_s + Δ_A)` above which the rotating-wave coupling is
    /// flagged as unreliable.
    pub const RWA_RATIO_LIMIT: f64 = 0.1;

    /// Parameters for a given pump amplitude. Defaults: κ = γ = 1, g₀ = 0,
    /// θ_p = 0, Δ_A = ω_s, lab frame, atom present, rotating-wave coupling.
    pub fn from_pump(delta_c: f64, omega_p_amp: f64) -> Result<Self> {
        let r = squeezing_param(delta_c, omega_p_amp)?;
        let omega_s = squeezed_frequency(delta_c, omega_p_amp)?;
        Ok(Self::assemble(delta_c, omega_p_amp, r, omega_s))
    }

    /// Parameters for a given squeezing strength, deriving `Ω_p = Δ_c tanh 2r`.
    pub fn from_squeezing(delta_c: f64, r: f64) -> Result<Self> {
        let omega_p_amp = pump_amplitude(delta_c, r)?;
        check_below_threshold(delta_c, omega_p_amp)?;
        let omega_s = delta_c / (2.0 * r).cosh();
        Ok(Self::assemble(delta_c, omega_p_amp, r, omega_s))
    }

    fn assemble(delta_c: f64, omega_p_amp: f64, r: f64, omega_s: f64) -> Self {
        Self {
            kappa: 1.0,
            gamma: 1.0,
            g0: 0.0,
            delta_c,
            omega_p_amp,
            theta_p: 0.0,
            delta_a: omega_s,
            r,
            omega_s,
            frame: Frame::Lab,
            atom_present: true,
            coupling: Coupling::Rotating,
        }
    }

    pub fn with_kappa(mut self, kappa: f64) -> Result<Self> {
        self.kappa = non_negative("κ", kappa)?;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        self.gamma = non_negative("γ", gamma)?;
        Ok(self)
    }

    pub fn with_g0(mut self, g0: f64) -> Result<Self> {
        self.g0 = non_negative("g₀", g0)?;
        Ok(self)
    }

    pub fn with_theta_p(mut self, theta_p: f64) -> Result<Self> {
        if !theta_p.is_finite() {
            return Err(Error::InvalidParameter(format!("pump phase must be finite, got {theta_p}")));
        }
        self.theta_p = theta_p;
        Ok(self)
    }

    pub fn with_delta_a(mut self, delta_a: f64) -> Result<Self> {
        if !delta_a.is_finite() {
            return Err(Error::InvalidParameter(format!("atom detuning must be finite, got {delta_a}")));
        }
        self.delta_a = delta_a;
        Ok(self)
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn with_atom(mut self, atom_present: bool) -> Self {
        self.atom_present = atom_present;
        self
    }

    pub fn with_coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn g0(&self) -> f64 {
        self.g0
    }
    pub fn delta_c(&self) -> f64 {
        self.delta_c
    }
    pub fn omega_p_amp(&self) -> f64 {
        self.omega_p_amp
    }
    pub fn theta_p(&self) -> f64 {
        self.theta_p
    }
    pub fn delta_a(&self) -> f64 {
        self.delta_a
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn omega_s(&self) -> f64 {
        self.omega_s
    }
    pub fn frame(&self) -> Frame {
        self.frame
    }
    pub fn atom_present(&self) -> bool {
        self.atom_present
    }
    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    /// Coupling actually applied: `g₀` with the atom present, otherwise 0.
    pub fn effective_g0(&self) -> f64 {
        if self.atom_present {
            self.g0
        } else {
            0.0
        }
    }

    pub fn enhanced_couplings(&self) -> (f64, f64) {
        enhanced_couplings(self.effective_g0(), self.r)
    }

    pub fn noise(&self) -> ReservoirNoise {
        noise_params(self.r)
    }

    /// Threshold margin `1 − Ω_p/Δ_c`.
    pub fn threshold_margin(&self) -> f64 {
        1.0 - self.omega_p_amp / self.delta_c
    }

    /// `|g_s'|/(ω_s + Δ_A)`; small values justify the rotating-wave coupling.
    pub fn rwa_ratio(&self) -> f64 {
        let (_, gsp) = self.enhanced_couplings();
        let denom = self.omega_s + self.delta_a;
        if gsp == 0.0 {
            0.0
        } else {
            gsp.abs() / denom.abs()
        }
    }

    /// A warning message when the rotating-wave coupling is in use outside
    /// its validity range.
    pub fn rwa_warning(&self) -> Option<String> {
        let ratio = self.rwa_ratio();
        (self.frame == Frame::Squeezed && self.coupling == Coupling::Rotating && ratio >= Self::RWA_RATIO_LIMIT).then(|| {
            format!(
                "rotating-wave coupling outside its validity range: |g_s'|/(ω_s + Δ_A) = {ratio:.4} ≥ {}",
                Self::RWA_RATIO_LIMIT
            )
        })
    }

    /// Largest violation of the stored-value relations between `r`, `Ω_p`, `ω_s`.
    pub fn consistency_defect(&self) -> f64 {
        let r_err = (0.5 * (self.omega_p_amp / self.delta_c).atanh() - self.r).abs();
        let w_err = (self.omega_s * self.omega_s + self.omega_p_amp * self.omega_p_amp - self.delta_c * self.delta_c).abs();
        r_err.max(w_err)
    }

    fn require_frame(&self, frame: Frame) -> Result<()> {
        if self.frame != frame {
            return Err(Error::WrongFrame(format!(
                "operation needs the {} frame, parameters are in the {} frame",
                frame.as_str(),
                self.frame.as_str()
            )));
        }
        Ok(())
    }
}

fn non_negative(name: &str, v: f64) -> Result<f64> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} must be finite and non-negative, got {v}")));
    }
    Ok(v)
}

fn checked_hermitian(op: FockOperator) -> Result<FockOperator> {
    let defect = op.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::NonHermitian(defect));
    }
    Ok(op)
}

/// `H = Δ_A σ_ee + g₀(a σ_eg + a† σ_ge) + Δ_c a†a + (Ω_p/2)(e^{iθ_p} a² + e^{-iθ_p} a†²)`.
pub fn build_hamiltonian_lab(params: &ModelParams, dims: HilbertDims) -> Result<FockOperator> {
    params.require_frame(Frame::Lab)?;
    let a = destroy(dims);
    let ad = create(dims);
    let s = atom_ops(dims);
    let a2 = a.compose(&a)?;
    let ad2 = ad.compose(&ad)?;
    let g = params.effective_g0();
    let half = 0.5 * params.omega_p_amp;
    let h = s
        .sigma_ee
        .scaled_re(params.delta_a)
        .plus(&a.compose(&s.sigma_eg)?.plus(&ad.compose(&s.sigma_ge)?)?.scaled_re(g))?
        .plus(&number(dims).scaled_re(params.delta_c))?
        .plus(&a2.scaled(C64::from_polar(half, params.theta_p)))?
        .plus(&ad2.scaled(C64::from_polar(half, -params.theta_p)))?;
    checked_hermitian(h.with_label("H_lab"))
}

/// Squeezed-frame Hamiltonian `Δ_A σ_ee + ω_s a_s†a_s + coupling`, with the
/// squeezed mode represented by the ordinary ladder matrices.
///
/// The coupling is `g_s(a_s σ_eg + a_s† σ_ge)` for [`Coupling::Rotating`] and
/// `(g_s a_s − g_s' a_s†)σ_eg + (g_s a_s† − g_s' a_s)σ_ge` for [`Coupling::Full`].
/// See [`ModelParams::rwa_warning`] for the validity flag of the former.
pub fn build_hamiltonian_squeezed(params: &ModelParams, dims: HilbertDims) -> Result<FockOperator> {
    params.require_frame(Frame::Squeezed)?;
    require_zero_phase(params)?;
    let a = destroy(dims);
    let ad = create(dims);
    let s = atom_ops(dims);
    let (gs, gsp) = params.enhanced_couplings();
    let mut h = s.sigma_ee.scaled_re(params.delta_a).plus(&number(dims).scaled_re(params.omega_s))?;
    let raising = a.compose(&s.sigma_eg)?.plus(&ad.compose(&s.sigma_ge)?)?;
    h = h.plus(&raising.scaled_re(gs))?;
    if params.coupling == Coupling::Full {
        let counter = ad.compose(&s.sigma_eg)?.plus(&a.compose(&s.sigma_ge)?)?;
        h = h.minus(&counter.scaled_re(gsp))?;
    }
    checked_hermitian(h.with_label("H_s"))
}

fn require_zero_phase(params: &ModelParams) -> Result<()> {
    if params.theta_p != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "the squeezed frame is derived for θ_p = 0, got θ_p = {}",
            params.theta_p
        )));
    }
    Ok(())
}

/// Hamiltonian of the frame selected in `params`.
pub fn build_hamiltonian(params: &ModelParams, dims: HilbertDims) -> Result<FockOperator> {
    match params.frame {
        Frame::Lab => build_hamiltonian_lab(params, dims),
        Frame::Squeezed => build_hamiltonian_squeezed(params, dims),
    }
}

/// Two-sided term `c (J ρ K − ½{K J, ρ})` of a master equation. Pairs
/// `(a, a)` and `(a†, a†)` carry the two-photon correlations of a squeezed
/// reservoir.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossTerm {
    pub left: FockOperator,
    pub right: FockOperator,
    pub coefficient: C64,
}

/// Lindblad dissipator `rate·(L ρ L† − ½{L†L, ρ})` together with any cross
/// terms belonging to the same reservoir.
#[derive(Clone, Debug, PartialEq)]
pub struct DissipatorSpec {
    pub jump_operator: FockOperator,
    pub rate: f64,
    pub cross_terms: Vec<CrossTerm>,
}

impl DissipatorSpec {
    pub fn plain(jump_operator: FockOperator, rate: f64) -> Self {
        Self { jump_operator, rate, cross_terms: Vec::new() }
    }
}

/// Dissipators of the selected frame.
///
/// Lab frame: `κ D[a]` and `γ D[σ_ge]`. Squeezed frame: `κ(N_s+1) D[a_s]`
/// (carrying the cross terms of the squeezed reservoir), `κ N_s D[a_s†]` and
/// `γ D[σ_ge]`. The cross terms reproduce
/// `+κ M_s/2 (a_s²ρ − 2a_sρa_s + ρa_s²) + κ M_s/2 (a_s†²ρ − 2a_s†ρa_s† + ρa_s†²)`.
///
/// The atomic decay is kept when the atom is absent: the coupling is then
/// zero and the decay only fixes the decoupled atom in its ground state.
pub fn build_dissipators(params: &ModelParams, dims: HilbertDims) -> Result<Vec<DissipatorSpec>> {
    let a = destroy(dims);
    let ad = create(dims);
    let sigma_ge = atom_ops(dims).sigma_ge;
    let kappa = params.kappa;
    let out = match params.frame {
        Frame::Lab => vec![DissipatorSpec::plain(a, kappa), DissipatorSpec::plain(sigma_ge, params.gamma)],
        Frame::Squeezed => {
            require_zero_phase(params)?;
            let noise = params.noise();
            let corr = C64::new(-kappa * noise.correlation, 0.0);
            let cross = vec![
                CrossTerm { left: a.clone(), right: a.clone(), coefficient: corr },
                CrossTerm { left: ad.clone(), right: ad.clone(), coefficient: corr.conj() },
            ];
            vec![
                DissipatorSpec { jump_operator: a, rate: kappa * (noise.thermal + 1.0), cross_terms: cross },
                DissipatorSpec::plain(ad, kappa * noise.thermal),
                DissipatorSpec::plain(sigma_ge, params.gamma),
            ]
        }
    };
    Ok(out)
}

/// Residual of `S†(r) H_NL S(r) − ω_s a†a − c` over the lower two thirds of
/// the Fock block, `H_NL = Δ_c a†a + (Ω_p/2)(e^{iθ_p}a² + h.c.)`, with `r`
/// and `ω_s` from `params` and the constant `c` fitted.
pub fn diagonalization_residual(params: &ModelParams, dims: HilbertDims) -> Result<f64> {
    conjugation_residual(params, dims, params.r)
}

/// As [`diagonalization_residual`] but conjugating with an arbitrary trial
/// squeezing strength `r`, to show that only the derived value diagonalizes.
pub fn conjugation_residual(params: &ModelParams, dims: HilbertDims, r: f64) -> Result<f64> {
    let k = 2 * dims.fock_cutoff() / 3 + 1;
    let (work, cols) = squeeze_columns(r, -params.theta_p, k)?;
    let half = 0.5 * params.omega_p_amp;
    let up = C64::from_polar(half, params.theta_p);
    let down = up.conj();
    // H_NL applied to each column on the working space
    let mut hcols = CMatrix::zeros(work, k);
    for j in 0..k {
        for n in 0..work {
            let mut acc = cols[(n, j)] * params.delta_c * n as f64;
            if n + 2 < work {
                acc += up * (((n + 1) * (n + 2)) as f64).sqrt() * cols[(n + 2, j)];
            }
            if n >= 2 {
                acc += down * ((n * (n - 1)) as f64).sqrt() * cols[(n - 2, j)];
            }
            hcols[(n, j)] = acc;
        }
    }
    let mut m = cols.adjoint() * hcols;
    for n in 0..k {
        m[(n, n)] -= params.omega_s * n as f64;
    }
    let offset = (0..k).map(|n| m[(n, n)].re).sum::<f64>() / k as f64;
    for n in 0..k {
        m[(n, n)] -= offset;
    }
    Ok(max_abs(&m))
}
