use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::CMatrix;

/// Column limit for exhaustive subset enumeration.
pub const SPARK_COLUMN_LIMIT: usize = 24;
/// Default singular-value ratio below which a subset is dependent.
pub const RANK_TOLERANCE: f64 = 1e-9;
/// Relative Gram-Schmidt residual that sends a subset to the SVD test.
const SCREEN: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spark {
    Finite(usize),
    /// No dependent column subset exists.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparkReport {
    pub rows: usize,
    pub cols: usize,
    pub spark: Spark,
    /// Lexicographically first smallest dependent subset.
    pub witness: Option<Vec<usize>>,
    pub rank_tolerance: f64,
}

impl SparkReport {
    /// Spark as a number, with a full matrix counted as cols + 1.
    pub fn value(&self) -> usize {
        match self.spark {
            Spark::Finite(s) => s,
            Spark::Full => self.cols + 1,
        }
    }
}

/// Whether the columns `cols` of `m` are dependent: more columns than rows,
/// or smallest / largest singular value <= tol.
pub fn is_dependent(m: &CMatrix, cols: &[usize], tol: f64) -> bool {
    if cols.is_empty() {
        return false;
    }
    if cols.len() > m.nrows() {
        return true;
    }
    let sub = DMatrix::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])]);
    let sv = sub.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return true;
    }
    sv.min() <= tol * max
}

struct Search<'a> {
    m: &'a CMatrix,
    norms: Vec<f64>,
    tol: f64,
    target: usize,
    chosen: Vec<usize>,
    basis: Vec<DVector<Complex64>>,
}

impl Search<'_> {
    fn residual(&self, j: usize) -> DVector<Complex64> {
        let mut r = self.m.column(j).into_owned();
        for _ in 0..2 {
            for q in &self.basis {
                let c = q.dotc(&r);
                r -= q * c;
            }
        }
        r
    }

    fn dfs(&mut self, start: usize) -> Option<Vec<usize>> {
        let depth = self.chosen.len();
        let remaining = self.target - depth;
        for j in start..=(self.m.ncols() - remaining) {
            let r = self.residual(j);
            let rn = r.norm();
            if depth + 1 == self.target {
                if rn <= SCREEN * self.norms[j] {
                    self.chosen.push(j);
                    let hit = is_dependent(self.m, &self.chosen, self.tol);
                    let cand = self.chosen.clone();
                    self.chosen.pop();
                    if hit {
                        return Some(cand);
                    }
                }
                continue;
            }
            if rn == 0.0 {
                continue;
            }
            self.chosen.push(j);
            self.basis.push(r / Complex64::new(rn, 0.0));
            let found = self.dfs(j + 1);
            self.basis.pop();
            self.chosen.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

/// Smallest dependent column subset by exhaustive search over subsets of
/// increasing size.
pub fn spark_bruteforce(m: &CMatrix, tol: f64) -> Result<SparkReport> {
    let (rows, cols) = m.shape();
    if cols > SPARK_COLUMN_LIMIT {
        return Err(Error::SparkGuard {
            columns: cols,
            limit: SPARK_COLUMN_LIMIT,
        });
    }
    let norms: Vec<f64> = m.column_iter().map(|c| c.norm()).collect();
    let report = |spark, witness| SparkReport {
        rows,
        cols,
        spark,
        witness,
        rank_tolerance: tol,
    };
    if let Some(j) = norms.iter().position(|&v| v == 0.0) {
        return Ok(report(Spark::Finite(1), Some(vec![j])));
    }
    for size in 2..=cols.min(rows + 1) {
        let mut s = Search {
            m,
            norms: norms.clone(),
            tol,
            target: size,
            chosen: Vec::with_capacity(size),
            basis: Vec::with_capacity(size),
        };
        if let Some(w) = s.dfs(0) {
            return Ok(report(Spark::Finite(size), Some(w)));
        }
    }
    Ok(report(Spark::Full, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::build_B;
    use crate::signal_model::PhaseCode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Oracle: test every subset in order of size with the SVD criterion.
    fn naive_spark(m: &CMatrix, tol: f64) -> usize {
        let n = m.ncols();
        for size in 1..=n {
            let mut best = None;
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != size {
                    continue;
                }
                let cols: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                if is_dependent(m, &cols, tol) {
                    best = Some(size);
                    break;
                }
            }
            if let Some(s) = best {
                return s;
            }
        }
        n + 1
    }

    #[test]
    fn identity_is_full() {
        let r = spark_bruteforce(&CMatrix::identity(3, 3), RANK_TOLERANCE).unwrap();
        assert_eq!(r.spark, Spark::Full);
        assert_eq!(r.value(), 4);
        assert!(r.witness.is_none());
    }

    #[test]
    fn duplicated_column_gives_two() {
        let m = DMatrix::from_row_slice(2, 3, &[c(1.0), c(2.0), c(2.0), c(0.0), c(1.0), c(1.0)]);
        let r = spark_bruteforce(&m, RANK_TOLERANCE).unwrap();
        assert_eq!(r.spark, Spark::Finite(2));
        assert_eq!(r.witness, Some(vec![1, 2]));
    }

    #[test]
    fn wide_matrix_bounded_by_rows_plus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let code = PhaseCode::random(3, &mut rng);
        let b = build_B(&code, 1).unwrap();
        let m = b.matrix().clone().insert_column(3, c(1.0));
        let r = spark_bruteforce(&m, RANK_TOLERANCE).unwrap();
        assert_eq!(r.value(), 4);
    }

    #[test]
    fn random_phase_block_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let code = PhaseCode::random(5, &mut rng);
        let b = build_B(&code, 2).unwrap();
        let r = spark_bruteforce(b.matrix(), RANK_TOLERANCE).unwrap();
        assert_eq!(r.spark, Spark::Finite(5));
        assert_eq!(naive_spark(b.matrix(), RANK_TOLERANCE), 5);
        assert!(is_dependent(b.matrix(), r.witness.as_ref().unwrap(), RANK_TOLERANCE));
    }

    #[test]
    fn uncoded_collapse_witness() {
        let b = build_B(&PhaseCode::uncoded(4), 2).unwrap();
        let r = spark_bruteforce(b.matrix(), RANK_TOLERANCE).unwrap();
        assert!(r.value() <= 4);
        assert!(is_dependent(b.matrix(), &[0, 1, 4, 5], RANK_TOLERANCE));
        assert_eq!(r.witness, Some(vec![0, 1, 4, 5]));
    }

    #[test]
    fn agrees_with_naive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in 3..6 {
            for q in 1..=p.min(3) {
                let code = PhaseCode::random(p, &mut rng);
                let b = build_B(&code, q).unwrap();
                if b.matrix().ncols() > 12 {
                    continue;
                }
                let r = spark_bruteforce(b.matrix(), RANK_TOLERANCE).unwrap();
                assert_eq!(r.value(), naive_spark(b.matrix(), RANK_TOLERANCE), "P={p} Q={q}");
            }
        }
    }

    #[test]
    fn zero_column_and_guard() {
        let mut m = CMatrix::identity(3, 3);
        m.column_mut(1).fill(c(0.0));
        assert_eq!(spark_bruteforce(&m, RANK_TOLERANCE).unwrap().spark, Spark::Finite(1));
        let wide = CMatrix::zeros(2, 25);
        assert!(matches!(
            spark_bruteforce(&wide, RANK_TOLERANCE),
            Err(Error::SparkGuard { columns: 25, limit: 24 })
        ));
    }
}
