use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{RecoveryConfig, Stopping};
use crate::error::{Error, Result};
use crate::measurement::{MatrixA, MatrixB, SparseMap};
use crate::CMatrix;

/// Output of a greedy recovery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmpOutcome {
    pub map: SparseMap,
    pub residual_norm: f64,
    /// Residual Frobenius norm before the first and after every iteration.
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    /// False when threshold stopping ran out of atoms first.
    pub converged: bool,
}

/// Ratio below which the smallest pivot of the Gram factorization marks the
/// least-squares system as singular.
const SINGULAR_PIVOT: f64 = 1e-12;

/// Matrix OMP for Y = A X B^T.
pub fn matrix_omp(y: &CMatrix, a: &MatrixA, b: &MatrixB, cfg: &RecoveryConfig) -> Result<OmpOutcome> {
    omp_core(y, a.matrix(), b.matrix(), b.block_width(), cfg.stopping())
}

/// The greedy loop on raw matrices. Per iteration: matched filter
/// |a_n^H R conj(b_c)| / (||a_n|| ||b_c||) over unselected atoms with
/// nonzero norms (ties to the lowest (n, c)), joint least squares on the
/// support with columns b_c (x) a_n, residual update.
pub fn omp_core(
    y: &CMatrix,
    a: &CMatrix,
    b: &CMatrix,
    block_width: usize,
    stopping: Stopping,
) -> Result<OmpOutcome> {
    let (k, pulses) = y.shape();
    if a.nrows() != k || b.nrows() != pulses {
        return Err(Error::DimensionMismatch(format!(
            "Y is {k}x{pulses}, A has {} rows, B has {} rows",
            a.nrows(),
            b.nrows()
        )));
    }
    let (na, nb) = (a.ncols(), b.ncols());
    let a_norm: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    let b_norm: Vec<f64> = b.column_iter().map(|c| c.norm()).collect();
    let admissible =
        a_norm.iter().filter(|&&v| v > 0.0).count() * b_norm.iter().filter(|&&v| v > 0.0).count();
    let cap = admissible.min(k * pulses);
    let limit = match stopping {
        Stopping::TargetCount(l) => {
            if l > cap {
                return Err(Error::TooManyAtoms {
                    requested: l,
                    available: cap,
                });
            }
            l
        }
        Stopping::ResidualThreshold(_) => cap,
    };

    let ah = a.adjoint();
    let bc = b.map(|v| v.conj());
    let corr_y = &ah * y * &bc;

    let mut map = SparseMap::new(na, nb, block_width)?;
    let mut support: Vec<(usize, usize)> = Vec::new();
    let mut gram = DMatrix::<Complex64>::zeros(0, 0);
    let mut amps = DVector::<Complex64>::zeros(0);
    let mut residual = y.clone();
    let mut history = vec![residual.norm()];
    let mut converged = true;

    loop {
        let rnorm = *history.last().unwrap();
        if let Stopping::ResidualThreshold(t) = stopping {
            if rnorm <= t {
                break;
            }
        }
        if support.len() == limit {
            converged = matches!(stopping, Stopping::TargetCount(_));
            break;
        }

        let corr = &ah * &residual * &bc;
        let mut best: Option<(usize, usize, f64)> = None;
        for n in 0..na {
            if a_norm[n] == 0.0 {
                continue;
            }
            for c in 0..nb {
                if b_norm[c] == 0.0 || support.contains(&(n, c)) {
                    continue;
                }
                let s = corr[(n, c)].norm() / (a_norm[n] * b_norm[c]);
                if best.is_none_or(|(_, _, bs)| s > bs) {
                    best = Some((n, c, s));
                }
            }
        }
        let Some((n, c, _)) = best else {
            converged = false;
            break;
        };
        support.push((n, c));

        let s = support.len();
        let mut g = DMatrix::zeros(s, s);
        g.view_mut((0, 0), (s - 1, s - 1)).copy_from(&gram);
        for (i, &(ni, ci)) in support.iter().enumerate() {
            let ga = a.column(ni).dotc(&a.column(n));
            let gb = b.column(ci).dotc(&b.column(c));
            g[(i, s - 1)] = ga * gb;
            g[(s - 1, i)] = (ga * gb).conj();
        }
        gram = g;
        let rhs = DVector::from_iterator(s, support.iter().map(|&(ni, ci)| corr_y[(ni, ci)]));
        amps = solve_gram(&gram, &rhs).ok_or_else(|| Error::SingularLeastSquares {
            iteration: s,
            support: support.clone(),
        })?;

        residual = y.clone();
        for (&(ni, ci), &amp) in support.iter().zip(amps.iter()) {
            residual -= (a.column(ni) * b.column(ci).transpose()) * amp;
        }
        history.push(residual.norm());
    }

    for (&(n, c), &amp) in support.iter().zip(amps.iter()) {
        map.push(n, c, amp)?;
    }
    Ok(OmpOutcome {
        map,
        residual_norm: *history.last().unwrap(),
        iterations: support.len(),
        residual_history: history,
        converged,
    })
}

/// Solves G x = r for a Hermitian positive definite Gram matrix; `None`
/// when a pivot collapses relative to the diagonal.
pub(crate) fn solve_gram(gram: &CMatrix, rhs: &DVector<Complex64>) -> Option<DVector<Complex64>> {
    if gram.nrows() == 0 {
        return Some(DVector::zeros(0));
    }
    let max_diag = (0..gram.nrows()).map(|i| gram[(i, i)].re).fold(0.0, f64::max);
    let chol = Cholesky::new(gram.clone())?;
    let l = chol.l_dirty();
    let min_pivot = (0..l.nrows()).map(|i| l[(i, i)].norm_sqr()).fold(f64::INFINITY, f64::min);
    if !(min_pivot > SINGULAR_PIVOT * max_diag) {
        return None;
    }
    Some(chol.solve(rhs))
}

/// A sparse length-n vector as (index, value) pairs in selection order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorRecovery {
    pub len: usize,
    pub entries: Vec<(usize, Complex64)>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl VectorRecovery {
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.entries.iter().map(|e| e.0).collect();
        s.sort_unstable();
        s
    }

    pub fn to_dense(&self) -> DVector<Complex64> {
        let mut x = DVector::zeros(self.len);
        for &(i, v) in &self.entries {
            x[i] = v;
        }
        x
    }
}

/// OMP for g = B x, the matrix loop with a 1 x 1 unit A.
pub fn omp_vector(g: &DVector<Complex64>, b: &CMatrix, cfg: &RecoveryConfig) -> Result<VectorRecovery> {
    let y = DMatrix::from_row_slice(1, g.len(), g.as_slice());
    let a = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    let out = omp_core(&y, &a, b, b.ncols().max(1), cfg.stopping())?;
    Ok(VectorRecovery {
        len: b.ncols(),
        entries: out.map.entries().iter().map(|e| (e.col, e.amplitude)).collect(),
        residual_norm: out.residual_norm,
        iterations: out.iterations,
        converged: out.converged,
    })
}
