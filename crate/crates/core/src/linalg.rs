//! Small linear-algebra toolkit shared by the operator factories and the
//! dynamics: a CSR sparse matrix, Kronecker helpers and the exponential of
//! chain-structured anti-Hermitian generators.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Compressed sparse row matrix over complex numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicate entries
    /// are summed in a fixed order, so the result is reproducible.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Self { nrows, ncols, indptr, indices, values }
    }

    pub fn from_dense(m: &CMatrix) -> Self {
        let mut t = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != ZERO {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.row(i).find(|&(c, _)| c == j).map_or(ZERO, |(_, v)| v)
    }

    /// `y = A x`
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *yi = acc;
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    /// Iterates over all stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// Principal submatrix on `keep` (sorted indices), renumbered densely.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.ncols.max(self.nrows)];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut t = Vec::new();
        for (new_r, &old_r) in keep.iter().enumerate() {
            for (c, v) in self.row(old_r) {
                let nc = map[c];
                if nc != usize::MAX {
                    t.push((new_r, nc, v));
                }
            }
        }
        Self::from_triplets(keep.len(), keep.len(), t)
    }
}

/// Lists the non-zero entries of a dense matrix in column-major order.
pub(crate) fn nonzeros(m: &CMatrix) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != ZERO {
                out.push((i, j, v));
            }
        }
    }
    out
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    assert_eq!(a.ncols(), b.nrows());
    assert_eq!(a.nrows(), b.ncols());
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Eigenvalues of a Hermitian matrix (the anti-Hermitian part is ignored).
pub fn hermitian_eigenvalues(m: &CMatrix) -> DVector<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues()
}

/// One connected chain of an anti-Hermitian generator `G`:
/// `G[idx[j+1], idx[j]] = sub[j]` and `G[idx[j], idx[j+1]] = -conj(sub[j])`,
/// with zero diagonal.
#[derive(Clone, Debug)]
pub(crate) struct Chain {
    pub indices: Vec<usize>,
    pub sub: Vec<C64>,
}

/// Columns `0..ncols` of `exp(G)` for a generator made of disjoint chains on a
/// space of dimension `dim`.
///
/// Each chain is tridiagonal, so `iG` restricted to it is a Hermitian
/// tridiagonal matrix. A diagonal phase gauge makes it real symmetric, whose
/// eigendecomposition gives the exponential exactly up to rounding.
pub(crate) fn chain_exp_columns(chains: &[Chain], dim: usize, ncols: usize) -> CMatrix {
    let mut out = CMatrix::zeros(dim, ncols);
    for chain in chains {
        let n = chain.indices.len();
        if n == 0 {
            continue;
        }
        debug_assert_eq!(chain.sub.len() + 1, n);
        let wanted: Vec<(usize, usize)> = chain
            .indices
            .iter()
            .enumerate()
            .filter(|&(_, &g)| g < ncols)
            .map(|(local, &g)| (local, g))
            .collect();
        if wanted.is_empty() {
            continue;
        }
        // H = iG; H[j+1, j] = i * sub[j]
        let mut phase = vec![ONE; n];
        let mut t = DMatrix::<f64>::zeros(n, n);
        for j in 0..n - 1 {
            let h = I * chain.sub[j];
            let mag = h.norm();
            phase[j + 1] = if mag > 0.0 { phase[j] * (h / mag) } else { phase[j] };
            t[(j + 1, j)] = mag;
            t[(j, j + 1)] = mag;
        }
        let eig = SymmetricEigen::new(t);
        let q = &eig.eigenvectors;
        // exp(G) = exp(-iH) = P Q diag(exp(-i λ)) Q^T P^†
        let rot: Vec<C64> = eig.eigenvalues.iter().map(|&l| C64::new(0.0, -l).exp()).collect();
        for &(local, global) in &wanted {
            let coeff: Vec<C64> = (0..n).map(|m| rot[m] * q[(local, m)] * phase[local].conj()).collect();
            for row in 0..n {
                let mut acc = ZERO;
                for (m, c) in coeff.iter().enumerate() {
                    acc += *c * q[(row, m)];
                }
                out[(chain.indices[row], global)] = phase[row] * acc;
            }
        }
    }
    out
}
