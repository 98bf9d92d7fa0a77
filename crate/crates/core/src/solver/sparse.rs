//! Symmetric sparse storage (upper triangle, compressed columns) and the
//! linear solvers working on it.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, LltRef, SymbolicCholesky, SymmetricOrdering,
};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, MatMut, Par, Side};

use crate::error::{Error, Result};

/// Upper-triangular CSC sparsity pattern with sorted row indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePattern {
    pub n: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
}

impl SparsePattern {
    /// Pattern from equation-index groups that couple all-to-all (one
    /// group per element).
    pub fn from_groups<'a>(n: usize, groups: impl Iterator<Item = &'a [usize]>) -> Self {
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
        for g in groups {
            for &c in g {
                for &r in g {
                    if r <= c {
                        cols[c].push(r);
                    }
                }
            }
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0);
        for mut rows in cols {
            rows.sort_unstable();
            rows.dedup();
            row_idx.extend_from_slice(&rows);
            col_ptr.push(row_idx.len());
        }
        SparsePattern { n, col_ptr, row_idx }
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// Storage slot of `(row, col)` with `row <= col`.
    pub fn position(&self, row: usize, col: usize) -> Option<usize> {
        let (lo, hi) = (self.col_ptr[col], self.col_ptr[col + 1]);
        self.row_idx[lo..hi].binary_search(&row).ok().map(|p| lo + p)
    }

    fn symbolic(&self) -> SymbolicSparseColMatRef<'_, usize> {
        SymbolicSparseColMatRef::new_checked(self.n, self.n, &self.col_ptr, None, &self.row_idx)
    }
}

/// Symmetric matrix stored as its upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    pub values: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(pattern: &SparsePattern) -> Self {
        SymmetricMatrix {
            values: vec![0.0; pattern.nnz()],
        }
    }

    pub fn get(&self, pattern: &SparsePattern, row: usize, col: usize) -> f64 {
        let (r, c) = if row <= col { (row, col) } else { (col, row) };
        pattern.position(r, c).map_or(0.0, |p| self.values[p])
    }

    pub fn diagonal(&self, pattern: &SparsePattern) -> Vec<f64> {
        (0..pattern.n)
            .map(|c| {
                let last = pattern.col_ptr[c + 1] - 1;
                if pattern.col_ptr[c + 1] > pattern.col_ptr[c] && pattern.row_idx[last] == c {
                    self.values[last]
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// `y = A x`.
    pub fn mul(&self, pattern: &SparsePattern, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for c in 0..pattern.n {
            let mut acc = 0.0;
            for p in pattern.col_ptr[c]..pattern.col_ptr[c + 1] {
                let r = pattern.row_idx[p];
                let v = self.values[p];
                acc += v * x[r];
                if r != c {
                    y[r] += v * x[c];
                }
            }
            y[c] += acc;
        }
    }
}

/// Symbolic Cholesky analysis of a pattern; reusable across numeric
/// factorizations with different values.
pub struct Analysis {
    symbolic: SymbolicCholesky<usize>,
}

impl std::fmt::Debug for Analysis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Analysis").field("len_val", &self.symbolic.len_val()).finish()
    }
}

impl Analysis {
    pub fn new(pattern: &SparsePattern) -> Result<Self> {
        let symbolic = factorize_symbolic_cholesky(
            pattern.symbolic(),
            Side::Upper,
            SymmetricOrdering::Amd,
            Default::default(),
        )
        .map_err(|e| Error::Solver(format!("symbolic factorization failed: {e:?}")))?;
        Ok(Analysis { symbolic })
    }

    /// Nonzeros in the Cholesky factor.
    pub fn factor_nnz(&self) -> usize {
        self.symbolic.len_val()
    }
}

/// Numeric sparse Cholesky factor.
pub struct CholeskyFactor {
    values: Vec<f64>,
    scratch: MemBuffer,
}

impl std::fmt::Debug for CholeskyFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CholeskyFactor").field("nnz", &self.values.len()).finish()
    }
}

impl CholeskyFactor {
    pub fn new(analysis: &Analysis, pattern: &SparsePattern, a: &SymmetricMatrix) -> Result<Self> {
        let sym = &analysis.symbolic;
        let par = Par::Seq;
        let mut values = vec![0.0; sym.len_val()];
        let req = sym
            .factorize_numeric_llt_scratch::<f64>(par, Default::default())
            .or(sym.solve_in_place_scratch::<f64>(1, par));
        let mut scratch = MemBuffer::new(req);
        let mat = SparseColMatRef::new(pattern.symbolic(), &a.values);
        sym.factorize_numeric_llt(
            &mut values,
            mat,
            Side::Upper,
            Default::default(),
            par,
            MemStack::new(&mut scratch),
            Default::default(),
        )
        .map_err(|_| {
            Error::Solver(
                "stiffness matrix is not positive definite (missing supports or detached nodes?)".into(),
            )
        })?;
        Ok(CholeskyFactor { values, scratch })
    }

    /// Solves in place.
    pub fn solve(&mut self, analysis: &Analysis, rhs: &mut [f64]) {
        let n = rhs.len();
        let llt = LltRef::new(&analysis.symbolic, &self.values);
        let mat = MatMut::from_column_major_slice_mut(rhs, n, 1);
        llt.solve_in_place_with_conj(Conj::No, mat, Par::Seq, MemStack::new(&mut self.scratch));
    }
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients on `A x = b`, starting from
/// the given `x`.
pub fn conjugate_gradient(
    pattern: &SparsePattern,
    a: &SymmetricMatrix,
    diag_inv: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgReport> {
    let n = b.len();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| p * q).sum::<f64>();
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgReport {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut r = vec![0.0; n];
    a.mul(pattern, x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(diag_inv).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut res = dot(&r, &r).sqrt() / b_norm;
    for it in 0..max_iter {
        if res <= tol {
            return Ok(CgReport {
                iterations: it,
                relative_residual: res,
            });
        }
        a.mul(pattern, &p, &mut q);
        let alpha = rz / dot(&p, &q);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        for i in 0..n {
            z[i] = r[i] * diag_inv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        res = dot(&r, &r).sqrt() / b_norm;
    }
    if res <= tol {
        return Ok(CgReport {
            iterations: max_iter,
            relative_residual: res,
        });
    }
    Err(Error::Solver(format!(
        "conjugate gradient did not converge: relative residual {res:.3e} after {max_iter} iterations (tol {tol:.1e})"
    )))
}
