//! Liouvillian assembly, time evolution and steady states.
//!
//! The generator acts on column-stacked density matrices (see
//! [`crate::operators::vectorize`]). Both solvers work on the smallest
//! invariant sector of the generator that can hold the state: the
//! Liouvillian graph splits into disconnected blocks (for these models, the
//! two relative-parity classes of matrix elements), and only the blocks
//! touched by the initial state or by the trace functional matter.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect, CMatrix, SparseMatrix, ONE, ZERO};
use crate::model::{build_dissipators, build_hamiltonian, DissipatorSpec, Frame, ModelParams};
use crate::operators::{sprepost, spost, spre, unvectorize_matrix, vectorize, DensityMatrix, FockOperator, HilbertDims};

/// Generator `ρ ↦ −i[H, ρ] + Σ dissipators` as a sparse superoperator.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    dims: HilbertDims,
    frame: Option<Frame>,
    matrix: SparseMatrix,
}

fn push_scaled(acc: &mut Vec<(usize, usize, C64)>, m: &SparseMatrix, s: C64) {
    if s == ZERO {
        return;
    }
    acc.extend(m.triplets().map(|(i, j, v)| (i, j, v * s)));
}

/// Assembles the generator from a Hamiltonian and dissipators.
pub fn build_liouvillian(h: &FockOperator, dissipators: &[DissipatorSpec]) -> Result<Liouvillian> {
    let dims = h.dims();
    let d2 = dims.dim() * dims.dim();
    let mut acc = Vec::new();
    let minus_i = C64::new(0.0, -1.0);
    push_scaled(&mut acc, &spre(h), minus_i);
    push_scaled(&mut acc, &spost(h), -minus_i);
    let half = C64::new(-0.5, 0.0);
    for spec in dissipators {
        let jump = &spec.jump_operator;
        if jump.dims() != dims {
            return Err(Error::DimensionMismatch { expected: dims.dim(), found: jump.dims().dim() });
        }
        if !(spec.rate >= 0.0) {
            return Err(Error::InvalidParameter(format!("dissipator rate must be non-negative, got {}", spec.rate)));
        }
        let rate = C64::new(spec.rate, 0.0);
        if spec.rate > 0.0 {
            let dag = jump.adjoint();
            let number = dag.compose(jump)?;
            push_scaled(&mut acc, &sprepost(jump, &dag)?, rate);
            push_scaled(&mut acc, &spre(&number), rate * half);
            push_scaled(&mut acc, &spost(&number), rate * half);
        }
        for cross in &spec.cross_terms {
            let kj = cross.right.compose(&cross.left)?;
            push_scaled(&mut acc, &sprepost(&cross.left, &cross.right)?, cross.coefficient);
            push_scaled(&mut acc, &spre(&kj), cross.coefficient * half);
            push_scaled(&mut acc, &spost(&kj), cross.coefficient * half);
        }
    }
    Ok(Liouvillian { dims, frame: None, matrix: SparseMatrix::from_triplets(d2, d2, acc) })
}

impl Liouvillian {
    /// Generator of the model described by `params` in its frame.
    pub fn for_model(params: &ModelParams, dims: HilbertDims) -> Result<Self> {
        let h = build_hamiltonian(params, dims)?;
        let diss = build_dissipators(params, dims)?;
        let mut l = build_liouvillian(&h, &diss)?;
        l.frame = Some(params.frame());
        Ok(l)
    }

    pub fn zero(dims: HilbertDims) -> Self {
        let d2 = dims.dim() * dims.dim();
        Self { dims, frame: None, matrix: SparseMatrix::from_triplets(d2, d2, Vec::new()) }
    }

    pub fn dims(&self) -> HilbertDims {
        self.dims
    }

    pub fn frame(&self) -> Option<Frame> {
        self.frame
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn to_dense(&self) -> CMatrix {
        self.matrix.to_dense()
    }

    /// `L(ρ)` as a matrix.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        let d = self.dims.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: rho.nrows() });
        }
        let out = self.matrix.matvec(rho.as_slice());
        Ok(unvectorize_matrix(d, &out))
    }

    /// `max |L(ρ)|`
    pub fn residual(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok(self.apply(rho.matrix())?.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Sorted indices of the vectorized space that lie in the blocks of the
    /// generator connected to any of `seeds`.
    fn sector(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let n = self.matrix.nrows();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, j, _) in self.matrix.triplets() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut wanted = vec![false; n];
        for s in seeds {
            let root = find(&mut parent, s);
            wanted[root] = true;
        }
        (0..n).filter(|&k| wanted[find(&mut parent, k)]).collect()
    }

    fn diagonal_indices(&self) -> impl Iterator<Item = usize> {
        let d = self.dims.dim();
        (0..d).map(move |i| i + d * i)
    }
}

/// Steady state and solver diagnostics.
#[derive(Clone, Debug)]
pub struct SteadyState {
    pub state: DensityMatrix,
    /// `max |L(ρ_ss)|`
    pub residual: f64,
    /// Estimate of the smallest non-zero `|eigenvalue|` of the generator,
    /// capped at 1.
    pub spectral_gap: f64,
    /// Hermiticity defect of the raw solution before it was symmetrized.
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub sector_dim: usize,
}

/// Residual bound a steady state has to meet.
pub const STEADY_RESIDUAL_TOL: f64 = 1e-10;
/// A second generator eigenvalue this close to zero makes the steady state
/// ambiguous.
pub const DEGENERACY_TOL: f64 = 1e-8;

fn to_faer(m: &SparseMatrix) -> Result<SparseColMat<usize, C64>> {
    let t: Vec<Triplet<usize, usize, C64>> = m.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    SparseColMat::try_new_from_triplets(m.nrows(), m.ncols(), &t).map_err(|e| Error::Solver(format!("{e:?}")))
}

fn col_from(v: &[C64]) -> Mat<C64> {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

fn max_norm(v: impl IntoIterator<Item = C64>) -> f64 {
    v.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Unique trace-one null vector of the generator.
///
/// Solves the bordered system `(L + e_k tᵀ) x = e_k`, where `t` is the trace
/// functional and `k` the `⟨0|ρ|0⟩` slot; since `tᵀL = 0`, its solution obeys
/// `L x = 0` and `tr x = 1`. The bordered matrix has spectrum
/// `{1} ∪ {non-zero eigenvalues of L}`, so its smallest eigenvalue (from a
/// few inverse-iteration steps) measures the gap to a second stationary state.
pub fn steady_state(l: &Liouvillian) -> Result<SteadyState> {
    let d = l.dims.dim();
    let keep = l.sector(l.diagonal_indices());
    let mut local = vec![usize::MAX; d * d];
    for (new, &old) in keep.iter().enumerate() {
        local[old] = new;
    }
    let n = keep.len();
    let border_row = local[0];
    let restricted = l.matrix.restrict(&keep);
    let trace_slots: Vec<usize> = l.diagonal_indices().map(|k| local[k]).collect();
    let mut t: Vec<(usize, usize, C64)> = restricted.triplets().collect();
    t.extend(trace_slots.iter().map(|&c| (border_row, c, ONE)));
    let bordered = SparseMatrix::from_triplets(n, n, t);
    // Each empty column of L is a stationary basis element; two of them
    // already make the null space degenerate (and the bordered matrix
    // structurally singular).
    let mut filled = vec![false; n];
    for (_, j, v) in restricted.triplets() {
        if v != ZERO {
            filled[j] = true;
        }
    }
    if filled.iter().filter(|&&f| !f).count() > 1 {
        return Err(Error::DegenerateNullSpace { gap: 0.0 });
    }
    let faer_matrix = to_faer(&bordered)?;
    let lu = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| faer_matrix.sp_lu()))
        .map_err(|_| Error::Solver("sparse LU factorization aborted".into()))?
        .map_err(|_| Error::DegenerateNullSpace { gap: 0.0 })?;

    let mut rhs = vec![ZERO; n];
    rhs[border_row] = ONE;
    let mut x = lu.solve(col_from(&rhs));
    for _ in 0..2 {
        let xs: Vec<C64> = (0..n).map(|i| x[(i, 0)]).collect();
        let ax = bordered.matvec(&xs);
        let r: Vec<C64> = (0..n).map(|i| rhs[i] - ax[i]).collect();
        let dx = lu.solve(col_from(&r));
        x += dx;
    }
    if (0..n).any(|i| !x[(i, 0)].re.is_finite() || !x[(i, 0)].im.is_finite()) {
        return Err(Error::DegenerateNullSpace { gap: 0.0 });
    }

    let gap = inverse_iteration_gap(n, |v| lu.solve(v));
    if gap < DEGENERACY_TOL {
        return Err(Error::DegenerateNullSpace { gap });
    }

    let mut full = vec![ZERO; d * d];
    for (new, &old) in keep.iter().enumerate() {
        full[old] = x[(new, 0)];
    }
    let raw = unvectorize_matrix(d, &full);
    let defect = hermiticity_defect(&raw);
    let sym = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
    let trace = sym.trace();
    let sym = sym / trace;
    let residual = max_norm(l.matrix.matvec(sym.as_slice()));
    if !(residual < STEADY_RESIDUAL_TOL) {
        return Err(Error::NonConvergence { residual });
    }
    let min_eigenvalue = hermitian_eigenvalues(&sym).min();
    if min_eigenvalue < -DensityMatrix::POSITIVITY_TOL {
        return Err(Error::PositivityViolation { t: f64::INFINITY, min_eigenvalue });
    }
    Ok(SteadyState {
        state: DensityMatrix::from_matrix_unchecked(l.dims, sym),
        residual,
        spectral_gap: gap,
        hermiticity_defect: defect,
        min_eigenvalue,
        sector_dim: n,
    })
}

/// Smallest eigenvalue magnitude of `A` estimated with inverse iteration,
/// where `solve` applies `A⁻¹`.
fn inverse_iteration_gap(n: usize, solve: impl Fn(Mat<C64>) -> Mat<C64>) -> f64 {
    // deterministic, generic start vector
    let mut v = Mat::from_fn(n, 1, |i, _| C64::new(1.0 + (i % 7) as f64 * 0.1, (i % 5) as f64 * 0.05));
    let mut estimate = f64::INFINITY;
    for _ in 0..20 {
        let norm = v.norm_l2();
        if !(norm > 0.0) || !norm.is_finite() {
            return 0.0;
        }
        v = Mat::from_fn(n, 1, |i, _| v[(i, 0)] / norm);
        let w = solve(v.clone());
        let growth = w.norm_l2();
        if !growth.is_finite() {
            return 0.0;
        }
        estimate = 1.0 / growth;
        v = w;
    }
    estimate.min(1.0)
}

/// Builds the model generator and solves for its steady state.
pub fn steady_state_for(params: &ModelParams, dims: HilbertDims) -> Result<SteadyState> {
    steady_state(&Liouvillian::for_model(params, dims)?)
}

/// Time-stepping scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Integrator {
    /// Dormand–Prince 5(4) with per-step error control.
    Adaptive { rtol: f64, atol: f64 },
    /// Classical fourth-order Runge–Kutta with a fixed step (validation mode).
    FixedRk4 { step: f64 },
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::Adaptive { rtol: 1e-9, atol: 1e-12 }
    }
}

/// Trace drift allowed over a whole trajectory.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;

/// States on a time grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Smallest eigenvalue of each recorded state.
    pub min_eigenvalues: Vec<f64>,
    pub max_trace_drift: f64,
    pub max_hermiticity_defect: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * *xi;
    }
}

// Dormand–Prince 5(4) tableau
const DP_A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Stepper<'a> {
    matrix: &'a SparseMatrix,
    k: Vec<Vec<C64>>,
    tmp: Vec<C64>,
}

impl<'a> Stepper<'a> {
    fn new(matrix: &'a SparseMatrix) -> Self {
        let n = matrix.nrows();
        Self { matrix, k: vec![vec![ZERO; n]; 7], tmp: vec![ZERO; n] }
    }

    /// One Dormand–Prince step; returns the fifth-order solution and the
    /// weighted error norm. `k[0]` must hold `f(y)` on entry; on return
    /// `k[6]` holds `f(y_new)`.
    fn dopri(&mut self, y: &[C64], h: f64, rtol: f64, atol: f64) -> (Vec<C64>, f64) {
        for stage in 0..6 {
            self.tmp.copy_from_slice(y);
            for (j, &a) in DP_A[stage].iter().enumerate() {
                if a != 0.0 {
                    axpy(&mut self.tmp, C64::new(h * a, 0.0), &self.k[j]);
                }
            }
            self.matrix.matvec_into(&self.tmp, &mut self.k[stage + 1]);
        }
        // tmp holds the fifth-order solution (stage 7 argument), k[6] = f(y_new)
        let y_new = self.tmp.clone();
        let mut err = 0.0;
        for i in 0..y.len() {
            let mut e = ZERO;
            for (j, &w) in DP_E.iter().enumerate() {
                if w != 0.0 {
                    e += self.k[j][i] * w;
                }
            }
            let scale = atol + rtol * y[i].norm().max(y_new[i].norm());
            let q = (e * h).norm() / scale;
            err += q * q;
        }
        (y_new, (err / y.len() as f64).sqrt())
    }

    fn rk4(&mut self, y: &[C64], h: f64) -> Vec<C64> {
        let n = y.len();
        let mut k1 = vec![ZERO; n];
        let mut k2 = vec![ZERO; n];
        let mut k3 = vec![ZERO; n];
        let mut k4 = vec![ZERO; n];
        self.matrix.matvec_into(y, &mut k1);
        self.tmp.copy_from_slice(y);
        axpy(&mut self.tmp, C64::new(0.5 * h, 0.0), &k1);
        self.matrix.matvec_into(&self.tmp, &mut k2);
        self.tmp.copy_from_slice(y);
        axpy(&mut self.tmp, C64::new(0.5 * h, 0.0), &k2);
        self.matrix.matvec_into(&self.tmp, &mut k3);
        self.tmp.copy_from_slice(y);
        axpy(&mut self.tmp, C64::new(h, 0.0), &k3);
        self.matrix.matvec_into(&self.tmp, &mut k4);
        let mut out = y.to_vec();
        for i in 0..n {
            out[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        out
    }
}

/// Integrates `dρ/dt = L(ρ)` from `t = t_grid[0]` and records the state at
/// every grid time.
///
/// Every recorded state is checked: trace drift beyond 1e-8 or an eigenvalue
/// below −1e-8 aborts with an error naming the time. Recorded states are
/// symmetrized; the largest Hermiticity defect removed is reported.
pub fn evolve(rho0: &DensityMatrix, l: &Liouvillian, t_grid: &[f64], integrator: Integrator) -> Result<Trajectory> {
    let dims = l.dims;
    if rho0.dims() != dims {
        return Err(Error::DimensionMismatch { expected: dims.dim(), found: rho0.dims().dim() });
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("time grid must be finite and strictly increasing".into()));
    }
    let d = dims.dim();
    let v0 = vectorize(rho0);
    let support = (0..d * d).filter(|&k| v0[k] != ZERO);
    let keep = l.sector(support);
    let restricted = l.matrix.restrict(&keep);
    let mut y: Vec<C64> = keep.iter().map(|&k| v0[k]).collect();
    let trace0 = rho0.trace();

    let mut stepper = Stepper::new(&restricted);
    let mut traj = Trajectory {
        times: Vec::with_capacity(t_grid.len()),
        states: Vec::with_capacity(t_grid.len()),
        min_eigenvalues: Vec::with_capacity(t_grid.len()),
        max_trace_drift: 0.0,
        max_hermiticity_defect: 0.0,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let mut t = t_grid[0];
    let mut h = match integrator {
        Integrator::Adaptive { .. } => 1e-3,
        Integrator::FixedRk4 { step } => {
            if !(step > 0.0) {
                return Err(Error::InvalidParameter(format!("fixed step must be positive, got {step}")));
            }
            step
        }
    };
    let mut have_derivative = false;

    for (idx, &target) in t_grid.iter().enumerate() {
        if idx > 0 {
            while t < target {
                let remaining = target - t;
                match integrator {
                    Integrator::FixedRk4 { step } => {
                        let steps = (remaining / step).ceil().max(1.0) as usize;
                        let hs = remaining / steps as f64;
                        for _ in 0..steps {
                            y = stepper.rk4(&y, hs);
                            traj.accepted_steps += 1;
                        }
                        t = target;
                    }
                    Integrator::Adaptive { rtol, atol } => {
                        let last = h >= remaining;
                        let hs = if last { remaining } else { h };
                        if hs < 1e-13 * t.abs().max(1.0) && !last {
                            return Err(Error::StepSizeFailure { t, h: hs });
                        }
                        if !have_derivative {
                            restricted.matvec_into(&y, &mut stepper.k[0]);
                            have_derivative = true;
                        }
                        let (y_new, err) = stepper.dopri(&y, hs, rtol, atol);
                        if !err.is_finite() {
                            return Err(Error::StepSizeFailure { t, h: hs });
                        }
                        if err <= 1.0 {
                            y = y_new;
                            t = if last { target } else { t + hs };
                            stepper.k.swap(0, 6);
                            traj.accepted_steps += 1;
                        } else {
                            traj.rejected_steps += 1;
                        }
                        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                        let proposed = hs * factor;
                        // a short final step must not shrink the regular step size
                        h = if last && err <= 1.0 { h.max(proposed) } else { proposed };
                    }
                }
            }
        }
        let mut full = vec![ZERO; d * d];
        for (new, &old) in keep.iter().enumerate() {
            full[old] = y[new];
        }
        let raw = unvectorize_matrix(d, &full);
        let drift = (raw.trace() - trace0).norm();
        if drift > TRACE_DRIFT_TOL {
            return Err(Error::TraceDrift { t: target, drift });
        }
        traj.max_trace_drift = traj.max_trace_drift.max(drift);
        traj.max_hermiticity_defect = traj.max_hermiticity_defect.max(hermiticity_defect(&raw));
        let sym = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
        let min_eig = hermitian_eigenvalues(&sym).min();
        if min_eig < -DensityMatrix::POSITIVITY_TOL {
            return Err(Error::PositivityViolation { t: target, min_eigenvalue: min_eig });
        }
        traj.times.push(target);
        traj.states.push(DensityMatrix::from_matrix_unchecked(dims, sym));
        traj.min_eigenvalues.push(min_eig);
    }
    Ok(traj)
}

/// Evenly spaced grid `0, dt, …, horizon` (the end point included).
pub fn uniform_grid(horizon: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points).map(|k| horizon * k as f64 / (points - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::model::{Coupling, CrossTerm};
    use crate::operators::{atom_ops, create, destroy, number, AtomLevel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dims(n: usize) -> HilbertDims {
        HilbertDims::new(n).unwrap()
    }

    fn random_state(rng: &mut ChaCha8Rng, d: HilbertDims) -> DensityMatrix {
        let n = d.dim();
        let a = CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let m = &a * a.adjoint();
        let tr = m.trace();
        DensityMatrix::new(d, m / tr).unwrap()
    }

    fn dissipator_direct(spec: &DissipatorSpec, rho: &CMatrix) -> CMatrix {
        let l = spec.jump_operator.matrix();
        let ld = l.adjoint();
        let ldl = &ld * l;
        let mut out = (l * rho * &ld - (&ldl * rho + rho * &ldl) * C64::new(0.5, 0.0)) * C64::new(spec.rate, 0.0);
        for CrossTerm { left, right, coefficient } in &spec.cross_terms {
            let (j, k) = (left.matrix(), right.matrix());
            let kj = k * j;
            out += (j * rho * k - (&kj * rho + rho * &kj) * C64::new(0.5, 0.0)) * *coefficient;
        }
        out
    }

    #[test]
    fn decay_only_vacuum_is_stationary() {
        let d = dims(3);
        let h = FockOperator::zeros(d);
        let l = build_liouvillian(&h, &[DissipatorSpec::plain(destroy(d), 1.0)]).unwrap();
        let out = l.apply(DensityMatrix::ground_vacuum(d).matrix()).unwrap();
        assert!(max_abs(&out) < 1e-12);
    }

    #[test]
    fn action_matches_term_by_term_lab() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = dims(2);
        let p = ModelParams::from_pump(1.3, 0.7).unwrap().with_g0(0.9).unwrap().with_gamma(0.4).unwrap().with_theta_p(0.3).unwrap();
        let h = build_hamiltonian(&p, d).unwrap();
        let diss = build_dissipators(&p, d).unwrap();
        let l = build_liouvillian(&h, &diss).unwrap();
        for _ in 0..4 {
            let rho = random_state(&mut rng, d);
            let r = rho.matrix();
            let hm = h.matrix();
            let mut want = (hm * r - r * hm) * C64::new(0.0, -1.0);
            for s in &diss {
                want += dissipator_direct(s, r);
            }
            assert!(max_abs(&(l.apply(r).unwrap() - want)) < 1e-12);
        }
    }

    #[test]
    fn squeezed_cross_terms_match_written_form() {
        // κM/2 (a²ρ − 2aρa + ρa²) + κM/2 (a†²ρ − 2a†ρa† + ρa†²)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = dims(2);
        let p = ModelParams::from_squeezing(1.0, 0.7).unwrap().with_frame(Frame::Squeezed).with_g0(1.0).unwrap();
        let h = build_hamiltonian(&p, d).unwrap();
        let l = Liouvillian::for_model(&p, d).unwrap();
        let a = destroy(d).matrix().clone();
        let ad = create(d).matrix().clone();
        let sge = atom_ops(d).sigma_ge.matrix().clone();
        let noise = p.noise();
        let lind = |c: &CMatrix, rho: &CMatrix| {
            let cd = c.adjoint();
            let n = &cd * c;
            c * rho * &cd - (&n * rho + rho * &n) * C64::new(0.5, 0.0)
        };
        let rho = random_state(&mut rng, d);
        let r = rho.matrix();
        let hm = h.matrix();
        let km = C64::new(0.5 * noise.correlation, 0.0);
        let want = (hm * r - r * hm) * C64::new(0.0, -1.0)
            + lind(&a, r) * C64::new(noise.thermal + 1.0, 0.0)
            + lind(&ad, r) * C64::new(noise.thermal, 0.0)
            + lind(&sge, r)
            + (&a * &a * r - &a * r * &a * C64::new(2.0, 0.0) + r * &a * &a) * km
            + (&ad * &ad * r - &ad * r * &ad * C64::new(2.0, 0.0) + r * &ad * &ad) * km;
        assert!(max_abs(&(l.apply(r).unwrap() - want)) < 1e-12);
    }

    #[test]
    fn squeezed_at_zero_equals_unpumped_lab() {
        let d = dims(4);
        let lab = ModelParams::from_pump(1.7, 0.0).unwrap().with_g0(2.0).unwrap();
        let sq = lab.clone().with_frame(Frame::Squeezed);
        let a = Liouvillian::for_model(&lab, d).unwrap().to_dense();
        let b = Liouvillian::for_model(&sq, d).unwrap().to_dense();
        assert!(max_abs(&(a - b)) < 1e-12);
    }

    #[test]
    fn generator_preserves_trace_and_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = dims(5);
        for frame in [Frame::Lab, Frame::Squeezed] {
            let p = ModelParams::from_squeezing(0.8, 0.6).unwrap().with_g0(1.5).unwrap().with_frame(frame).with_coupling(Coupling::Full);
            let l = Liouvillian::for_model(&p, d).unwrap();
            let dense = l.to_dense();
            let dd = d.dim();
            for col in 0..dd * dd {
                let s: C64 = (0..dd).map(|i| dense[(i + dd * i, col)]).sum();
                assert!(s.norm() < 1e-12);
            }
            let rho = random_state(&mut rng, d);
            let out = l.apply(rho.matrix()).unwrap();
            assert!(out.trace().norm() < 1e-10);
            assert!(hermiticity_defect(&out) < 1e-10);
        }
    }

    #[test]
    fn decay_only_steady_state_is_vacuum() {
        let d = dims(4);
        let h = FockOperator::zeros(d);
        let diss = [DissipatorSpec::plain(destroy(d), 1.0), DissipatorSpec::plain(atom_ops(d).sigma_ge, 1.0)];
        let ss = steady_state(&build_liouvillian(&h, &diss).unwrap()).unwrap();
        let vac = DensityMatrix::ground_vacuum(d);
        assert!(max_abs(&(ss.state.matrix() - vac.matrix())) < 1e-12);
        assert!(ss.residual < 1e-12);
    }

    #[test]
    fn degenerate_null_space_is_reported() {
        // cavity decay only: the atom never relaxes, so every atomic state is stationary
        let d = dims(3);
        let l = build_liouvillian(&FockOperator::zeros(d), &[DissipatorSpec::plain(destroy(d), 1.0)]).unwrap();
        assert!(matches!(steady_state(&l), Err(Error::DegenerateNullSpace { .. })));
    }

    #[test]
    fn zero_generator_gives_constant_trajectory() {
        let d = dims(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_state(&mut rng, d);
        let traj = evolve(&rho, &Liouvillian::zero(d), &[0.0, 1.0, 2.5], Integrator::default()).unwrap();
        for s in &traj.states {
            assert!(max_abs(&(s.matrix() - rho.matrix())) < 1e-15);
        }
    }

    #[test]
    fn single_photon_decay_law() {
        let d = dims(3);
        let l = build_liouvillian(&FockOperator::zeros(d), &[DissipatorSpec::plain(destroy(d), 1.0)]).unwrap();
        let rho0 = DensityMatrix::basis(d, AtomLevel::Ground, 1);
        let grid = uniform_grid(5.0, 11);
        for integ in [Integrator::default(), Integrator::FixedRk4 { step: 0.01 }] {
            let traj = evolve(&rho0, &l, &grid, integ).unwrap();
            for (t, s) in traj.times.iter().zip(&traj.states) {
                let n = s.expect(&number(d)).unwrap().re;
                assert!((n - (-t).exp()).abs() < 1e-6, "{t}: {n}");
            }
        }
    }

    #[test]
    fn rejects_bad_grid() {
        let d = dims(2);
        let rho = DensityMatrix::ground_vacuum(d);
        assert!(evolve(&rho, &Liouvillian::zero(d), &[0.0, 0.0], Integrator::default()).is_err());
    }
}
