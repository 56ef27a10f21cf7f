use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FrequencySubset;
use crate::dft::twiddle;
use crate::error::{invalid, Error, Result};
use crate::signal_model::{PhaseCode, RadarParams, TargetScene};
use crate::{CMatrix, CVector};

/// Partial Fourier matrix, A[k, n] = e^{-j 2 pi m_k n / grid}, n = 0..grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixA {
    matrix: CMatrix,
    subset: FrequencySubset,
    grid: usize,
}

impl MatrixA {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn subset(&self) -> &FrequencySubset {
        &self.subset
    }

    /// Number of delay grid points (columns).
    pub fn grid(&self) -> usize {
        self.grid
    }
}

/// Phase-coded slow-time matrix made of Q blocks,
/// B^(q)[b, p] = e^{-j 2 pi b p / grid} z[b - q], p = 0..grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixB {
    matrix: CMatrix,
    blocks: usize,
    grid: usize,
}

impl MatrixB {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// Doppler grid points per block.
    pub fn block_width(&self) -> usize {
        self.grid
    }
}

pub(crate) fn partial_fourier(subset: &FrequencySubset, grid: usize) -> MatrixA {
    let idx = subset.indices();
    let matrix = DMatrix::from_fn(idx.len(), grid, |k, n| twiddle(idx[k] * n, grid));
    MatrixA {
        matrix,
        subset: subset.clone(),
        grid,
    }
}

pub(crate) fn coded_blocks(code: &PhaseCode, blocks: usize, grid: usize) -> Result<MatrixB> {
    let pulses = code.len();
    if blocks == 0 || blocks > pulses {
        return Err(invalid("q", format!("need 1 <= Q <= P = {pulses}, got {blocks}")));
    }
    let matrix = DMatrix::from_fn(pulses, grid * blocks, |b, c| {
        let (q, p) = (c / grid, c % grid);
        let z = code.z(b as isize - q as isize);
        if z.norm_sqr() == 0.0 {
            z
        } else {
            twiddle(b * p, grid) * z
        }
    });
    Ok(MatrixB {
        matrix,
        blocks,
        grid,
    })
}

/// K x N partial DFT matrix on the rows m_k of the subset.
#[allow(non_snake_case)]
pub fn build_A(subset: &FrequencySubset) -> MatrixA {
    partial_fourier(subset, subset.bins())
}

/// P x PQ block matrix [B^(0) ... B^(Q-1)].
#[allow(non_snake_case)]
pub fn build_B(code: &PhaseCode, blocks: usize) -> Result<MatrixB> {
    coded_blocks(code, blocks, code.len())
}

/// One nonzero entry of the delay-Doppler map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparseEntry {
    pub row: usize,
    pub col: usize,
    pub amplitude: Complex64,
}

/// Sparse rows x cols delay-Doppler map. Column c belongs to ambiguity
/// block c / block_width at Doppler index c % block_width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMap {
    rows: usize,
    cols: usize,
    block_width: usize,
    entries: Vec<SparseEntry>,
}

impl SparseMap {
    pub fn new(rows: usize, cols: usize, block_width: usize) -> Result<Self> {
        if rows == 0 || block_width == 0 || cols == 0 || !cols.is_multiple_of(block_width) {
            return Err(invalid(
                "cols",
                format!("{rows} x {cols} map with block width {block_width}"),
            ));
        }
        Ok(Self {
            rows,
            cols,
            block_width,
            entries: Vec::new(),
        })
    }

    pub fn push(&mut self, row: usize, col: usize, amplitude: Complex64) -> Result<()> {
        if row >= self.rows || col >= self.cols {
            return Err(invalid(
                "entry",
                format!("({row}, {col}) outside {} x {}", self.rows, self.cols),
            ));
        }
        if self.entries.iter().any(|e| e.row == row && e.col == col) {
            return Err(invalid("entry", format!("({row}, {col}) already present")));
        }
        self.entries.push(SparseEntry { row, col, amplitude });
        Ok(())
    }

    /// Map of an on-grid scene for Q blocks of width P.
    pub fn from_scene(scene: &TargetScene, params: &RadarParams, blocks: usize) -> Result<Self> {
        let pulses = params.pulse_count();
        let cells = scene
            .grid_cells()
            .ok_or_else(|| Error::OffGrid("sparse map needs an on-grid scene".into()))?;
        let mut map = Self::new(params.nyquist_bins(), pulses * blocks, pulses)?;
        for (st, g) in scene.targets().iter().zip(cells) {
            if g.order >= blocks {
                return Err(invalid(
                    "blocks",
                    format!("target of order {} needs Q > {}", g.order, g.order),
                ));
            }
            map.push(g.range_bin, g.column(pulses), st.effective_amplitude)?;
        }
        Ok(map)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn block_width(&self) -> usize {
        self.block_width
    }

    pub fn entries(&self) -> &[SparseEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// (block q, Doppler index p) of column c.
    pub fn readout(&self, col: usize) -> (usize, usize) {
        (col / self.block_width, col % self.block_width)
    }

    /// Support sorted by (row, col).
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut s: Vec<_> = self.entries.iter().map(|e| (e.row, e.col)).collect();
        s.sort_unstable();
        s
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut x = DMatrix::zeros(self.rows, self.cols);
        for e in &self.entries {
            x[(e.row, e.col)] = e.amplitude;
        }
        x
    }
}

/// Y = A X B^T.
pub fn forward_model(a: &MatrixA, x: &SparseMap, b: &MatrixB) -> Result<CMatrix> {
    let (am, bm) = (a.matrix(), b.matrix());
    if am.ncols() != x.rows() || bm.ncols() != x.cols() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}, X is {}x{}, B is {}x{}",
            am.nrows(),
            am.ncols(),
            x.rows(),
            x.cols(),
            bm.nrows(),
            bm.ncols()
        )));
    }
    let mut y = DMatrix::zeros(am.nrows(), bm.nrows());
    for e in x.entries() {
        let an = am.column(e.row);
        let bc = bm.column(e.col);
        y += (an * bc.transpose()) * e.amplitude;
    }
    Ok(y)
}

/// Default limit on the entry count of an explicit Kronecker product.
pub const KRON_CAP: usize = 4_000_000;

/// T = B (x) A, so that T vec(X) = vec(A X B^T). For tests and oracles only.
pub fn vectorize_model(a: &CMatrix, b: &CMatrix, cap: usize) -> Result<CMatrix> {
    let entries = a.nrows() * b.nrows() * a.ncols() * b.ncols();
    if entries > cap {
        return Err(Error::KroneckerCap { entries, cap });
    }
    Ok(b.kronecker(a))
}

/// Column-stacking vectorization.
pub fn vec(m: &CMatrix) -> CVector {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvec(v: &CVector, rows: usize, cols: usize) -> Result<CMatrix> {
    if v.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} into {rows} x {cols}",
            v.len()
        )));
    }
    Ok(DMatrix::from_column_slice(rows, cols, v.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal_model::GridIndex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn a_examples() {
        let a0 = build_A(&FrequencySubset::explicit(4, &[0]).unwrap());
        assert!(a0.matrix().iter().all(|v| *v == c(1.0, 0.0)));
        let a1 = build_A(&FrequencySubset::explicit(4, &[1]).unwrap());
        let row: Vec<_> = a1.matrix().iter().copied().collect();
        assert_eq!(row, vec![c(1.0, 0.0), c(0.0, -1.0), c(-1.0, 0.0), c(0.0, 1.0)]);
        let full = build_A(&FrequencySubset::nyquist(4));
        let g = full.matrix().adjoint() * full.matrix();
        let want = CMatrix::identity(4, 4) * c(4.0, 0.0);
        assert!((g - want).norm() < 1e-12);
    }

    #[test]
    fn a_entries_unit_modulus() {
        let a = build_A(&FrequencySubset::explicit(64, &[3, 17, 40, 63]).unwrap());
        assert!(a.matrix().iter().all(|v| (v.norm() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn b_uncoded_single_block_is_dft() {
        let b = build_B(&PhaseCode::uncoded(4), 1).unwrap();
        for r in 0..4 {
            for p in 0..4 {
                assert_eq!(b.matrix()[(r, p)], twiddle(r * p, 4));
            }
        }
    }

    #[test]
    fn b_block_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let code = PhaseCode::random(6, &mut rng);
        let b = build_B(&code, 3).unwrap();
        let m = b.matrix();
        assert_eq!(m.shape(), (6, 18));
        assert_eq!(m[(0, 6)], c(0.0, 0.0));
        for q in 0..3 {
            let nonzero_rows = (0..6)
                .filter(|&r| (0..6).any(|p| m[(r, 6 * q + p)].norm() > 0.0))
                .count();
            assert_eq!(nonzero_rows, 6 - q);
            for r in 0..q {
                assert!((0..6).all(|p| m[(r, 6 * q + p)] == c(0.0, 0.0)));
            }
        }
        for r in 0..6 {
            for p in 0..6 {
                let want = code.z(r as isize) * twiddle(r * p, 6);
                assert_eq!(m[(r, p)], want);
            }
        }
    }

    #[test]
    fn collapse_identity_without_coding() {
        for p in 4..9 {
            let b = build_B(&PhaseCode::uncoded(p), 2).unwrap();
            let m = b.matrix();
            let lhs = m.column(0) - m.column(1);
            let rhs = m.column(p) - m.column(p + 1);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn b_rejects_bad_q() {
        assert!(build_B(&PhaseCode::uncoded(3), 0).is_err());
        assert!(build_B(&PhaseCode::uncoded(3), 4).is_err());
    }

    #[test]
    fn forward_single_entry_gives_code() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let code = PhaseCode::random(5, &mut rng);
        let a = build_A(&FrequencySubset::explicit(8, &[1, 4, 6]).unwrap());
        let b = build_B(&code, 2).unwrap();
        let mut x = SparseMap::new(8, 10, 5).unwrap();
        assert!(forward_model(&a, &x, &b).unwrap().iter().all(|v| v.norm() == 0.0));
        x.push(0, 0, c(1.0, 0.0)).unwrap();
        let y = forward_model(&a, &x, &b).unwrap();
        for k in 0..3 {
            for r in 0..5 {
                assert_eq!(y[(k, r)], code.z(r as isize));
            }
        }
    }

    #[test]
    fn forward_dimension_mismatch() {
        let a = build_A(&FrequencySubset::nyquist(4));
        let b = build_B(&PhaseCode::uncoded(3), 1).unwrap();
        let x = SparseMap::new(5, 3, 3).unwrap();
        assert!(matches!(forward_model(&a, &x, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn kron_small_examples() {
        let i2 = CMatrix::identity(2, 2);
        assert_eq!(vectorize_model(&i2, &i2, KRON_CAP).unwrap(), CMatrix::identity(4, 4));
        let a = CMatrix::from_element(1, 1, c(2.0, 1.0));
        let b = CMatrix::from_element(1, 1, c(0.5, -3.0));
        let t = vectorize_model(&a, &b, KRON_CAP).unwrap();
        assert_eq!(t[(0, 0)], c(2.0, 1.0) * c(0.5, -3.0));
        assert!(matches!(
            vectorize_model(&CMatrix::zeros(10, 10), &CMatrix::zeros(10, 10), 9_999),
            Err(Error::KroneckerCap { entries: 10_000, cap: 9_999 })
        ));
    }

    #[test]
    fn kron_identity_against_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut g = || c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let a = CMatrix::from_fn(2, 3, |_, _| g());
        let b = CMatrix::from_fn(2, 4, |_, _| g());
        let x = CMatrix::from_fn(3, 4, |_, _| g());
        let y = &a * &x * b.transpose();
        let t = vectorize_model(&a, &b, KRON_CAP).unwrap();
        // oracle: vec(Y)[k + K b] = sum_{n,c} B[b,c] A[k,n] X[n,c]
        for bi in 0..2 {
            for k in 0..2 {
                let mut s = c(0.0, 0.0);
                for n in 0..3 {
                    for cc in 0..4 {
                        s += b[(bi, cc)] * a[(k, n)] * x[(n, cc)];
                    }
                }
                assert!((s - y[(k, bi)]).norm() < 1e-14);
            }
        }
        let lhs = vec(&y);
        let rhs = &t * vec(&x);
        assert!((lhs - rhs).norm() <= 1e-12 * y.norm());
        assert_eq!(unvec(&vec(&x), 3, 4).unwrap(), x);
        assert!(unvec(&vec(&x), 4, 4).is_err());
    }

    #[test]
    fn sparse_map_from_scene_and_readout() {
        let params = RadarParams::desk_scale();
        let cells = [
            (GridIndex { range_bin: 3, doppler_bin: 5, order: 2 }, c(1.0, 0.0)),
            (GridIndex { range_bin: 0, doppler_bin: 0, order: 0 }, c(0.0, 1.0)),
        ];
        let scene = TargetScene::on_grid(&params, &cells).unwrap();
        let map = SparseMap::from_scene(&scene, &params, 3).unwrap();
        assert_eq!(map.len(), 2);
        assert_eq!(map.support(), vec![(0, 0), (3, 2 * 12 + 5)]);
        assert_eq!(map.readout(29), (2, 5));
        assert!(SparseMap::from_scene(&scene, &params, 2).is_err());
        let mut m = SparseMap::new(4, 4, 2).unwrap();
        m.push(1, 1, c(1.0, 0.0)).unwrap();
        assert!(m.push(1, 1, c(2.0, 0.0)).is_err());
        assert!(m.push(4, 0, c(2.0, 0.0)).is_err());
    }
}
