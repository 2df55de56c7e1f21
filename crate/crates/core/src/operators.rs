//! Operators and states on the truncated atom ⊗ cavity Hilbert space.
//!
//! Composite basis ordering is `atom ⊗ cavity`: the state `|a, n⟩` (atom level
//! `a ∈ {g = 0, e = 1}`, photon number `n`) sits at index `a·(N+1) + n`.
//!
//! Density matrices are vectorized by column stacking, `vec(ρ)[i + d·j] = ρ[i, j]`,
//! so that `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{
    chain_exp_columns, hermitian_eigenvalues, hermiticity_defect, kron, max_abs, nonzeros, trace_product,
    Chain, CMatrix, CVector, SparseMatrix, ONE, ZERO,
};

/// Leaked weight allowed at the edge of the padded working space when a
/// squeeze or displacement column is certified.
const BOUNDARY_LEAK_TOL: f64 = 1e-14;
/// Hard cap on the padded working space used for operator exponentials.
const MAX_WORK_DIM: usize = 6000;

/// Dimensions of the truncated two-level-atom ⊗ cavity space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HilbertDims {
    fock_cutoff: usize,
}

impl HilbertDims {
    pub const ATOM_DIM: usize = 2;

    /// `fock_cutoff` is the highest retained photon number `N_max` (≥ 2).
    pub fn new(fock_cutoff: usize) -> Result<Self> {
        if fock_cutoff < 2 {
            return Err(Error::InvalidDims(format!("fock cutoff must be at least 2, got {fock_cutoff}")));
        }
        Ok(Self { fock_cutoff })
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn cavity_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    /// Composite dimension `2·(N_max + 1)`.
    pub fn dim(&self) -> usize {
        Self::ATOM_DIM * self.cavity_dim()
    }

    pub fn index(&self, atom: AtomLevel, n: usize) -> usize {
        assert!(n <= self.fock_cutoff, "photon number {n} above cutoff {}", self.fock_cutoff);
        atom as usize * self.cavity_dim() + n
    }

    /// Inverse of [`HilbertDims::index`].
    pub fn levels(&self, index: usize) -> (AtomLevel, usize) {
        let atom = if index / self.cavity_dim() == 0 { AtomLevel::Ground } else { AtomLevel::Excited };
        (atom, index % self.cavity_dim())
    }

    fn ensure_same(&self, other: &HilbertDims) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomLevel {
    Ground = 0,
    Excited = 1,
}

/// A linear operator on the composite space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    dims: HilbertDims,
    matrix: CMatrix,
    label: String,
}

impl FockOperator {
    pub fn new(dims: HilbertDims, matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        if matrix.nrows() != dims.dim() || matrix.ncols() != dims.dim() {
            return Err(Error::DimensionMismatch { expected: dims.dim(), found: matrix.nrows().max(matrix.ncols()) });
        }
        Ok(Self { dims, matrix, label: label.into() })
    }

    /// `I_atom ⊗ m` for a cavity-factor matrix `m` of size `N_max + 1`.
    pub fn on_cavity(dims: HilbertDims, m: &CMatrix, label: impl Into<String>) -> Result<Self> {
        if m.nrows() != dims.cavity_dim() || m.ncols() != dims.cavity_dim() {
            return Err(Error::DimensionMismatch { expected: dims.cavity_dim(), found: m.nrows() });
        }
        let id = CMatrix::identity(HilbertDims::ATOM_DIM, HilbertDims::ATOM_DIM);
        Self::new(dims, kron(&id, m), label)
    }

    /// `m ⊗ I_cavity` for a 2×2 atomic matrix `m`.
    pub fn on_atom(dims: HilbertDims, m: &CMatrix, label: impl Into<String>) -> Result<Self> {
        if m.nrows() != HilbertDims::ATOM_DIM || m.ncols() != HilbertDims::ATOM_DIM {
            return Err(Error::DimensionMismatch { expected: HilbertDims::ATOM_DIM, found: m.nrows() });
        }
        let id = CMatrix::identity(dims.cavity_dim(), dims.cavity_dim());
        Self::new(dims, kron(m, &id), label)
    }

    pub fn identity(dims: HilbertDims) -> Self {
        Self { dims, matrix: CMatrix::identity(dims.dim(), dims.dim()), label: "I".into() }
    }

    pub fn zeros(dims: HilbertDims) -> Self {
        Self { dims, matrix: CMatrix::zeros(dims.dim(), dims.dim()), label: "0".into() }
    }

    pub fn dims(&self) -> HilbertDims {
        self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn adjoint(&self) -> Self {
        Self { dims: self.dims, matrix: self.matrix.adjoint(), label: format!("{}†", self.label) }
    }

    /// Operator product `self · rhs`.
    pub fn compose(&self, rhs: &FockOperator) -> Result<Self> {
        self.dims.ensure_same(&rhs.dims)?;
        Ok(Self { dims: self.dims, matrix: &self.matrix * &rhs.matrix, label: format!("{}·{}", self.label, rhs.label) })
    }

    pub fn plus(&self, rhs: &FockOperator) -> Result<Self> {
        self.dims.ensure_same(&rhs.dims)?;
        Ok(Self { dims: self.dims, matrix: &self.matrix + &rhs.matrix, label: format!("{} + {}", self.label, rhs.label) })
    }

    pub fn minus(&self, rhs: &FockOperator) -> Result<Self> {
        self.dims.ensure_same(&rhs.dims)?;
        Ok(Self { dims: self.dims, matrix: &self.matrix - &rhs.matrix, label: format!("{} - {}", self.label, rhs.label) })
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { dims: self.dims, matrix: &self.matrix * s, label: format!("({s})·{}", self.label) }
    }

    pub fn scaled_re(&self, s: f64) -> Self {
        self.scaled(C64::new(s, 0.0))
    }

    pub fn commutator(&self, rhs: &FockOperator) -> Result<Self> {
        self.dims.ensure_same(&rhs.dims)?;
        let m = &self.matrix * &rhs.matrix - &rhs.matrix * &self.matrix;
        Ok(Self { dims: self.dims, matrix: m, label: format!("[{}, {}]", self.label, rhs.label) })
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn apply(&self, ket: &CVector) -> Result<CVector> {
        if ket.len() != self.dims.dim() {
            return Err(Error::DimensionMismatch { expected: self.dims.dim(), found: ket.len() });
        }
        Ok(&self.matrix * ket)
    }

    /// Cavity-factor block `⟨g, m| O |g, n⟩`; equals the cavity factor for
    /// operators of the form `I_atom ⊗ O_c`.
    pub fn cavity_block(&self) -> CMatrix {
        let c = self.dims.cavity_dim();
        self.matrix.view((0, 0), (c, c)).into_owned()
    }

    pub(crate) fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        nonzeros(&self.matrix)
    }
}

impl fmt::Display for FockOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}×{}]", self.label, self.dims.dim(), self.dims.dim())
    }
}

/// Results of checking the density-matrix invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateCheck {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl StateCheck {
    pub fn is_valid(&self) -> bool {
        self.hermiticity_defect <= DensityMatrix::HERMITICITY_TOL
            && self.trace_defect <= DensityMatrix::TRACE_TOL
            && self.min_eigenvalue >= -DensityMatrix::POSITIVITY_TOL
    }
}

/// Hermitian, unit-trace, positive semidefinite state of the composite system.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: HilbertDims,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub const HERMITICITY_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const POSITIVITY_TOL: f64 = 1e-8;
    /// Population allowed above level ⌊0.8·N_max⌋ before the cutoff is
    /// declared inadequate.
    pub const TAIL_TOL: f64 = 1e-6;

    /// Validates all invariants.
    pub fn new(dims: HilbertDims, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != dims.dim() || matrix.ncols() != dims.dim() {
            return Err(Error::DimensionMismatch { expected: dims.dim(), found: matrix.nrows() });
        }
        let rho = Self { dims, matrix };
        let check = rho.check();
        if !check.is_valid() {
            return Err(Error::InvalidState(format!(
                "hermiticity defect {:e}, trace defect {:e}, min eigenvalue {:e}",
                check.hermiticity_defect, check.trace_defect, check.min_eigenvalue
            )));
        }
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(dims: HilbertDims, matrix: CMatrix) -> Self {
        Self { dims, matrix }
    }

    /// Pure state `|ψ⟩⟨ψ|`; the ket must be normalized to 1e-10.
    pub fn from_ket(dims: HilbertDims, ket: &CVector) -> Result<Self> {
        if ket.len() != dims.dim() {
            return Err(Error::DimensionMismatch { expected: dims.dim(), found: ket.len() });
        }
        Self::new(dims, ket * ket.adjoint())
    }

    /// `ρ_atom ⊗ ρ_cavity`.
    pub fn product(dims: HilbertDims, atom: &CMatrix, cavity: &CMatrix) -> Result<Self> {
        if cavity.nrows() != dims.cavity_dim() {
            return Err(Error::DimensionMismatch { expected: dims.cavity_dim(), found: cavity.nrows() });
        }
        Self::new(dims, kron(atom, cavity))
    }

    /// The basis projector `|a, n⟩⟨a, n|`.
    pub fn basis(dims: HilbertDims, atom: AtomLevel, n: usize) -> Self {
        let k = dims.index(atom, n);
        let mut m = CMatrix::zeros(dims.dim(), dims.dim());
        m[(k, k)] = ONE;
        Self { dims, matrix: m }
    }

    /// `|g, 0⟩⟨g, 0|`
    pub fn ground_vacuum(dims: HilbertDims) -> Self {
        Self::basis(dims, AtomLevel::Ground, 0)
    }

    /// Maximally mixed state.
    pub fn maximally_mixed(dims: HilbertDims) -> Self {
        let d = dims.dim();
        Self { dims, matrix: CMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0) }
    }

    pub fn dims(&self) -> HilbertDims {
        self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn check(&self) -> StateCheck {
        StateCheck {
            hermiticity_defect: hermiticity_defect(&self.matrix),
            trace_defect: (self.matrix.trace() - ONE).norm(),
            min_eigenvalue: hermitian_eigenvalues(&self.matrix).min(),
        }
    }

    /// `Tr(O ρ)`
    pub fn expect(&self, op: &FockOperator) -> Result<C64> {
        self.dims.ensure_same(&op.dims)?;
        Ok(trace_product(&op.matrix, &self.matrix))
    }

    /// Reduced cavity state `Tr_atom ρ`.
    pub fn cavity_state(&self) -> CMatrix {
        let c = self.dims.cavity_dim();
        let g = self.matrix.view((0, 0), (c, c));
        let e = self.matrix.view((c, c), (c, c));
        g + e
    }

    /// Reduced atomic state `Tr_cavity ρ` (2×2).
    pub fn atom_state(&self) -> CMatrix {
        let c = self.dims.cavity_dim();
        CMatrix::from_fn(2, 2, |a, b| (0..c).map(|n| self.matrix[(a * c + n, b * c + n)]).sum())
    }

    /// Cavity population above level ⌊0.8·N_max⌋.
    pub fn truncation_tail(&self) -> f64 {
        let cav = self.cavity_state();
        let start = (4 * self.dims.fock_cutoff()) / 5 + 1;
        (start..self.dims.cavity_dim()).map(|n| cav[(n, n)].re).sum::<f64>().max(0.0)
    }

    pub fn cutoff_adequate(&self) -> bool {
        self.truncation_tail() < Self::TAIL_TOL
    }
}

/// Cavity annihilation operator `I ⊗ a`, `⟨n−1|a|n⟩ = √n`.
pub fn destroy(dims: HilbertDims) -> FockOperator {
    let a = ladder(dims.cavity_dim());
    FockOperator::on_cavity(dims, &a, "a").expect("cavity factor has matching size")
}

/// Cavity creation operator `I ⊗ a†`.
pub fn create(dims: HilbertDims) -> FockOperator {
    destroy(dims).adjoint().with_label("a†")
}

/// Photon number `I ⊗ a†a`.
pub fn number(dims: HilbertDims) -> FockOperator {
    let n = CMatrix::from_fn(dims.cavity_dim(), dims.cavity_dim(), |i, j| if i == j { C64::new(i as f64, 0.0) } else { ZERO });
    FockOperator::on_cavity(dims, &n, "a†a").expect("cavity factor has matching size")
}

/// Cavity-factor ladder matrix of dimension `dim`.
pub(crate) fn ladder(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| if j == i + 1 { C64::new((j as f64).sqrt(), 0.0) } else { ZERO })
}

/// Atomic projector and transition operators, each `⊗ I_cavity`.
#[derive(Clone, Debug)]
pub struct AtomOperators {
    /// `|e⟩⟨e|`
    pub sigma_ee: FockOperator,
    /// `|e⟩⟨g|`
    pub sigma_eg: FockOperator,
    /// `|g⟩⟨e|`
    pub sigma_ge: FockOperator,
}

pub fn atom_ops(dims: HilbertDims) -> AtomOperators {
    let g = AtomLevel::Ground as usize;
    let e = AtomLevel::Excited as usize;
    let unit = |r: usize, c: usize| {
        let mut m = CMatrix::zeros(2, 2);
        m[(r, c)] = ONE;
        m
    };
    let mk = |m: CMatrix, l: &str| FockOperator::on_atom(dims, &m, l).expect("atomic factor is 2×2");
    AtomOperators {
        sigma_ee: mk(unit(e, e), "σee"),
        sigma_eg: mk(unit(e, g), "σeg"),
        sigma_ge: mk(unit(g, e), "σge"),
    }
}

/// Squeeze generator `(r/2)(e^{-iθ} a² − e^{iθ} a†²)` as parity chains on a
/// cavity space of dimension `work`.
fn squeeze_chains(r: f64, theta: f64, work: usize) -> Vec<Chain> {
    let pref = -C64::from_polar(r / 2.0, theta);
    (0..2)
        .map(|parity| {
            let indices: Vec<usize> = (parity..work).step_by(2).collect();
            let sub = indices
                .iter()
                .take(indices.len().saturating_sub(1))
                .map(|&n| pref * (((n + 1) * (n + 2)) as f64).sqrt())
                .collect();
            Chain { indices, sub }
        })
        .collect()
}

/// Displacement generator `α a† − α* a` as a single chain.
fn displacement_chain(alpha: C64, work: usize) -> Vec<Chain> {
    let sub = (0..work - 1).map(|n| alpha * ((n + 1) as f64).sqrt()).collect();
    vec![Chain { indices: (0..work).collect(), sub }]
}

/// Evaluates leading columns of an operator exponential on a padded working
/// space, growing the space until the columns carry no weight near its edge.
/// Returns the working dimension and the `work × ncols` column block.
fn certified_columns(
    what: &str,
    chains: impl Fn(usize) -> Vec<Chain>,
    initial_work: usize,
    ncols: usize,
) -> Result<(usize, CMatrix)> {
    let mut work = initial_work.max(ncols + 20);
    loop {
        if work > MAX_WORK_DIM {
            return Err(Error::TruncationInsufficient(format!(
                "{what}: working space would exceed {MAX_WORK_DIM} levels for {ncols} columns"
            )));
        }
        let cols = chain_exp_columns(&chains(work), work, ncols);
        let edge = work - (work / 10).max(10);
        let leak = (0..ncols)
            .map(|c| (edge..work).map(|k| cols[(k, c)].norm_sqr()).sum::<f64>())
            .fold(0.0, f64::max);
        if leak <= BOUNDARY_LEAK_TOL {
            return Ok((work, cols));
        }
        work = work * 3 / 2;
    }
}

/// Leading `ncols` columns of the squeeze operator on a certified padded space.
pub(crate) fn squeeze_columns(r: f64, theta: f64, ncols: usize) -> Result<(usize, CMatrix)> {
    if !r.is_finite() || !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("squeeze parameters must be finite (r = {r}, θ = {theta})")));
    }
    let initial = (1.5 * ncols as f64 * (2.0 * r.abs()).exp()).ceil() as usize + 60;
    certified_columns("squeeze operator", |w| squeeze_chains(r, theta, w), initial, ncols)
}

/// Block `⟨m|S(r,θ)|n⟩`, `m < rows`, `n < ncols`, of the exact squeeze operator.
pub(crate) fn squeeze_block(r: f64, theta: f64, rows: usize, ncols: usize) -> Result<CMatrix> {
    let (_, cols) = squeeze_columns(r, theta, ncols)?;
    Ok(cols.rows(0, rows).into_owned())
}

/// Squeeze operator `S(r, θ) = exp[(r/2)(e^{-iθ} a² − e^{iθ} a†²)]` on the
/// cavity factor, so that `S† a S = a cosh r − e^{iθ} a† sinh r` and
/// `S|0⟩` is the squeezed vacuum with `⟨a²⟩ = −e^{iθ} sinh r cosh r`.
///
/// The matrix elements are those of the untruncated operator restricted to
/// the `N_max + 1` retained levels: the exponential is taken on a padded
/// working space that is enlarged until every retained column has a
/// unitarity defect (weight at the working-space edge) below 1e-14. Fails
/// with [`Error::TruncationInsufficient`] when that needs more than 6000
/// levels.
pub fn squeeze_operator(dims: HilbertDims, r: f64, theta: f64) -> Result<FockOperator> {
    let c = dims.cavity_dim();
    let block = squeeze_block(r, theta, c, c)?;
    FockOperator::on_cavity(dims, &block, format!("S({r}, {theta})"))
}

/// Displacement operator `D(α) = exp(α a† − α* a)` on the cavity factor,
/// evaluated like [`squeeze_operator`] on a certified padded space.
pub fn displacement_operator(dims: HilbertDims, alpha: C64) -> Result<FockOperator> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::InvalidParameter(format!("displacement must be finite, got {alpha}")));
    }
    let c = dims.cavity_dim();
    let reach = (c as f64).sqrt() + alpha.norm();
    let initial = (reach * reach + 12.0 * reach).ceil() as usize + 40;
    let (_, cols) = certified_columns("displacement operator", |w| displacement_chain(alpha, w), initial, c)?;
    FockOperator::on_cavity(dims, &cols.rows(0, c).into_owned(), format!("D({alpha})"))
}

/// Column-stacking vectorization `vec(ρ)[i + d·j] = ρ[i, j]`.
pub fn vectorize(rho: &DensityMatrix) -> CVector {
    vectorize_matrix(&rho.matrix)
}

pub(crate) fn vectorize_matrix(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub(crate) fn unvectorize_matrix(d: usize, v: &[C64]) -> CMatrix {
    DMatrix::from_column_slice(d, d, v)
}

/// Inverse of [`vectorize`]; the result must satisfy the density-matrix
/// invariants.
pub fn unvectorize(dims: HilbertDims, v: &CVector) -> Result<DensityMatrix> {
    let d = dims.dim();
    if v.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: v.len() });
    }
    DensityMatrix::new(dims, unvectorize_matrix(d, v.as_slice()))
}

/// Superoperator of `ρ ↦ A ρ` under column stacking (`I ⊗ A`).
pub fn spre(a: &FockOperator) -> SparseMatrix {
    let d = a.dims.dim();
    let mut t = Vec::new();
    for (i, k, v) in a.nonzeros() {
        for j in 0..d {
            t.push((i + d * j, k + d * j, v));
        }
    }
    SparseMatrix::from_triplets(d * d, d * d, t)
}

/// Superoperator of `ρ ↦ ρ B` (`Bᵀ ⊗ I`).
pub fn spost(b: &FockOperator) -> SparseMatrix {
    let d = b.dims.dim();
    let mut t = Vec::new();
    for (l, j, v) in b.nonzeros() {
        for i in 0..d {
            t.push((i + d * j, i + d * l, v));
        }
    }
    SparseMatrix::from_triplets(d * d, d * d, t)
}

/// Superoperator of `ρ ↦ A ρ B` (`Bᵀ ⊗ A`).
pub fn sprepost(a: &FockOperator, b: &FockOperator) -> Result<SparseMatrix> {
    a.dims.ensure_same(&b.dims)?;
    let d = a.dims.dim();
    let an = a.nonzeros();
    let bn = b.nonzeros();
    let mut t = Vec::with_capacity(an.len() * bn.len());
    for &(l, j, bv) in &bn {
        for &(i, k, av) in &an {
            t.push((i + d * j, k + d * l, av * bv));
        }
    }
    Ok(SparseMatrix::from_triplets(d * d, d * d, t))
}

/// Largest elementwise difference between two operators.
pub fn max_difference(a: &FockOperator, b: &FockOperator) -> Result<f64> {
    a.dims.ensure_same(&b.dims)?;
    Ok(max_abs(&(&a.matrix - &b.matrix)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dims(n: usize) -> HilbertDims {
        HilbertDims::new(n).unwrap()
    }

    fn fock_ket(d: HilbertDims, atom: AtomLevel, n: usize) -> CVector {
        let mut v = CVector::zeros(d.dim());
        v[d.index(atom, n)] = ONE;
        v
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_state(rng: &mut ChaCha8Rng, d: HilbertDims) -> DensityMatrix {
        let a = random_matrix(rng, d.dim());
        let m = &a * a.adjoint();
        let tr = m.trace();
        DensityMatrix::new(d, m / tr).unwrap()
    }

    #[test]
    fn rejects_small_cutoff() {
        assert!(matches!(HilbertDims::new(1), Err(Error::InvalidDims(_))));
        assert_eq!(dims(2).dim(), 6);
    }

    #[test]
    fn tensor_ordering_is_atom_then_cavity() {
        let d = dims(3);
        assert_eq!(d.index(AtomLevel::Ground, 2), 2);
        assert_eq!(d.index(AtomLevel::Excited, 0), 4);
        assert_eq!(d.levels(5), (AtomLevel::Excited, 1));
        // a acts within each atomic block
        let a = destroy(d);
        assert_eq!(a.matrix()[(d.index(AtomLevel::Excited, 0), d.index(AtomLevel::Excited, 1))], ONE);
    }

    #[test]
    fn ladder_elements() {
        let d = dims(2);
        let a = destroy(d);
        let g = AtomLevel::Ground;
        assert_eq!(a.matrix()[(d.index(g, 0), d.index(g, 1))], ONE);
        assert!((a.matrix()[(d.index(g, 1), d.index(g, 2))].re - 2f64.sqrt()).abs() < 1e-15);
        let vac = fock_ket(d, g, 0);
        assert!(a.apply(&vac).unwrap().iter().all(|z| *z == ZERO));
    }

    #[test]
    fn canonical_commutator_below_boundary() {
        let d = dims(6);
        let a = destroy(d);
        let comm = a.commutator(&a.adjoint()).unwrap();
        for atom in [AtomLevel::Ground, AtomLevel::Excited] {
            for n in 0..d.fock_cutoff() {
                for m in 0..d.fock_cutoff() {
                    let z = comm.matrix()[(d.index(atom, n), d.index(atom, m))];
                    let want = if n == m { ONE } else { ZERO };
                    assert!((z - want).norm() < 1e-14);
                }
            }
        }
        // the truncation boundary carries -N instead of 1
        let top = d.index(AtomLevel::Ground, d.fock_cutoff());
        assert!((comm.matrix()[(top, top)].re + d.fock_cutoff() as f64).abs() < 1e-12);
    }

    #[test]
    fn atom_algebra() {
        let d = dims(3);
        let s = atom_ops(d);
        assert_eq!(s.sigma_eg.adjoint().matrix(), s.sigma_ge.matrix());
        let ee = s.sigma_eg.compose(&s.sigma_ge).unwrap();
        assert_eq!(ee.matrix(), s.sigma_ee.matrix());
        let gg = s.sigma_ge.compose(&s.sigma_eg).unwrap();
        let sum = gg.plus(&s.sigma_ee).unwrap();
        assert_eq!(sum.matrix(), FockOperator::identity(d).matrix());
        assert_eq!(s.sigma_ee.compose(&s.sigma_eg).unwrap().matrix(), s.sigma_eg.matrix());
        assert!((s.sigma_ee.matrix().trace().re - 4.0).abs() < 1e-15);
        let g0 = fock_ket(d, AtomLevel::Ground, 0);
        assert_eq!(s.sigma_eg.apply(&g0).unwrap(), fock_ket(d, AtomLevel::Excited, 0));
    }

    #[test]
    fn mixing_dims_is_an_error() {
        let a = destroy(dims(3));
        let b = destroy(dims(4));
        assert!(matches!(a.compose(&b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(a.plus(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn factories_are_reproducible() {
        let d = dims(12);
        assert_eq!(squeeze_operator(d, 0.7, 0.3).unwrap(), squeeze_operator(d, 0.7, 0.3).unwrap());
        assert_eq!(displacement_operator(d, C64::new(0.4, -0.2)).unwrap(), displacement_operator(d, C64::new(0.4, -0.2)).unwrap());
        assert_eq!(destroy(d), destroy(d));
    }

    #[test]
    fn squeeze_at_zero_is_identity() {
        let d = dims(8);
        let s = squeeze_operator(d, 0.0, 0.0).unwrap();
        assert!(max_difference(&s, &FockOperator::identity(d)).unwrap() < 1e-14);
    }

    #[test]
    fn squeezed_vacuum_vacuum_amplitude() {
        // P0 = 1/cosh r
        let d = dims(60);
        let s = squeeze_operator(d, 1.0, 0.0).unwrap();
        let col = s.apply(&fock_ket(d, AtomLevel::Ground, 0)).unwrap();
        let p0 = col[d.index(AtomLevel::Ground, 0)].norm_sqr();
        assert!((p0 - 1.0 / 1f64.cosh()).abs() < 1e-12, "{p0}");
        assert!((p0 - 0.64805).abs() < 1e-5);
        for n in (1..=d.fock_cutoff()).step_by(2) {
            assert!(col[d.index(AtomLevel::Ground, n)].norm_sqr() < 1e-12);
        }
    }

    #[test]
    fn squeeze_inverse_on_contained_block() {
        // S(r) S(-r) = I wherever the image of the block stays inside it.
        let d = dims(100);
        let k = 2 * d.fock_cutoff() / 3 + 1;
        for r in [0.05, 0.1] {
            let p = squeeze_operator(d, r, 0.4).unwrap().compose(&squeeze_operator(d, -r, 0.4).unwrap()).unwrap();
            let block = p.cavity_block();
            let dev = max_abs(&(block.view((0, 0), (k, k)) - CMatrix::identity(k, k)));
            assert!(dev < 1e-8, "r = {r}: {dev}");
        }
    }

    #[test]
    fn squeeze_columns_are_unitary_on_working_space() {
        let (work, cols) = squeeze_columns(1.2, 0.0, 11).unwrap();
        let gram = cols.adjoint() * &cols;
        assert!(max_abs(&(gram - CMatrix::identity(11, 11))) < 1e-12);
        assert!(work > 11);
    }

    #[test]
    fn squeeze_transforms_ladder() {
        // S† a S = a cosh r − e^{iθ} a† sinh r on columns that stay inside.
        let (r, theta) = (0.6, 0.9);
        let (work, cols) = squeeze_columns(r, theta, 8).unwrap();
        let a = ladder(work);
        let lhs = cols.adjoint() * &a * &cols;
        let a8 = ladder(8);
        let rhs = &a8 * C64::new(r.cosh(), 0.0) - a8.adjoint() * C64::from_polar(r.sinh(), theta);
        assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn displacement_identity_and_inverse() {
        let d = dims(40);
        let dz = displacement_operator(d, ZERO).unwrap();
        assert!(max_difference(&dz, &FockOperator::identity(d)).unwrap() < 1e-14);
        let alpha = C64::new(0.8, 0.5);
        let p = displacement_operator(d, alpha).unwrap().compose(&displacement_operator(d, -alpha).unwrap()).unwrap();
        let k = 8;
        let dev = max_abs(&(p.cavity_block().view((0, 0), (k, k)) - CMatrix::identity(k, k)));
        assert!(dev < 1e-8, "{dev}");
    }

    #[test]
    fn coherent_state_mean_photon() {
        let d = dims(20);
        let disp = displacement_operator(d, ONE).unwrap();
        let ket = disp.apply(&fock_ket(d, AtomLevel::Ground, 0)).unwrap();
        let rho = DensityMatrix::from_ket(d, &ket).unwrap();
        let n = rho.expect(&number(d)).unwrap().re;
        assert!((n - 1.0).abs() < 1e-6, "{n}");
    }

    #[test]
    fn vectorization_round_trip_and_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = dims(3);
        let rho = random_state(&mut rng, d);
        let back = unvectorize(d, &vectorize(&rho)).unwrap();
        assert_eq!(back, rho);
        let mixed = DensityMatrix::maximally_mixed(d);
        let norm = vectorize(&mixed).norm();
        assert!((norm - 1.0 / (d.dim() as f64).sqrt()).abs() < 1e-14);
        assert!(matches!(unvectorize(d, &CVector::zeros(5)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn superoperators_match_direct_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = dims(2);
        for _ in 0..5 {
            let a = FockOperator::new(d, random_matrix(&mut rng, d.dim()), "A").unwrap();
            let b = FockOperator::new(d, random_matrix(&mut rng, d.dim()), "B").unwrap();
            let rho = random_matrix(&mut rng, d.dim());
            let v = vectorize_matrix(&rho);
            let direct = [
                (spre(&a), a.matrix() * &rho),
                (spost(&b), &rho * b.matrix()),
                (sprepost(&a, &b).unwrap(), a.matrix() * &rho * b.matrix()),
            ];
            for (sup, want) in direct {
                let got = unvectorize_matrix(d.dim(), &sup.matvec(v.as_slice()));
                assert!(max_abs(&(got - want)) < 1e-12);
            }
        }
    }

    #[test]
    fn partial_traces() {
        let d = dims(3);
        let rho = DensityMatrix::basis(d, AtomLevel::Excited, 2);
        let cav = rho.cavity_state();
        assert_eq!(cav[(2, 2)], ONE);
        assert_eq!(rho.atom_state()[(1, 1)], ONE);
        assert_eq!(rho.truncation_tail(), 0.0);
        let top = DensityMatrix::basis(d, AtomLevel::Ground, 3);
        assert!(!top.cutoff_adequate());
    }

    #[test]
    fn density_matrix_validation() {
        let d = dims(2);
        let mut m = DensityMatrix::ground_vacuum(d).into_matrix();
        m[(0, 0)] = C64::new(1.1, 0.0);
        assert!(matches!(DensityMatrix::new(d, m), Err(Error::InvalidState(_))));
        let mut neg = CMatrix::zeros(6, 6);
        neg[(0, 0)] = C64::new(1.5, 0.0);
        neg[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(DensityMatrix::new(d, neg).is_err());
    }
}
