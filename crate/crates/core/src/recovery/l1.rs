use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::omp::{solve_gram, VectorRecovery};
use super::{RecoveryConfig, StepRule, Stopping};
use crate::error::{Error, Result};
use crate::CMatrix;

fn soft_threshold(v: Complex64, tau: f64) -> Complex64 {
    let m = v.norm();
    if m <= tau {
        Complex64::new(0.0, 0.0)
    } else {
        v * ((m - tau) / m)
    }
}

/// Sparse solution of g = B x by penalized FISTA,
/// min 0.5 ||B x - g||^2 + lambda ||x||_1, with lambda decreased
/// geometrically from max|B^H g| to lambda_ratio * max|B^H g|. The final
/// iterate is thresholded at support_threshold * max|x| (and truncated to
/// the L largest entries under target-count stopping), then re-fit by
/// least squares on that support when debiasing is on.
pub fn l1_vector(g: &DVector<Complex64>, b: &CMatrix, cfg: &RecoveryConfig) -> Result<VectorRecovery> {
    let p = cfg.l1();
    let n = b.ncols();
    if g.len() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "g has length {}, B has {} rows",
            g.len(),
            b.nrows()
        )));
    }
    let corr = b.adjoint() * g;
    let lambda_max = corr.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if lambda_max == 0.0 {
        return Ok(VectorRecovery {
            len: n,
            entries: Vec::new(),
            residual_norm: g.norm(),
            iterations: 0,
            converged: true,
        });
    }
    let step = match p.step {
        StepRule::Fixed(s) => s,
        StepRule::Lipschitz => {
            let smax = b.clone().singular_values().max();
            1.0 / (smax * smax)
        }
    };

    let mut lambdas = Vec::new();
    let lambda_min = p.lambda_ratio * lambda_max;
    let mut lam = lambda_max * p.continuation;
    while lam > lambda_min {
        lambdas.push(lam);
        lam *= p.continuation;
    }
    lambdas.push(lambda_min);
    let per_stage = (p.max_iterations / lambdas.len()).max(1);

    let rows = b.nrows();
    let bs = b.as_slice();
    let mut x = DVector::<Complex64>::zeros(n);
    let mut x_new = DVector::<Complex64>::zeros(n);
    let mut z = DVector::<Complex64>::zeros(n);
    let mut r = vec![Complex64::new(0.0, 0.0); rows];
    let mut iterations = 0;
    let mut converged = false;
    let mut best = (f64::INFINITY, x.clone());
    for (stage, &lambda) in lambdas.iter().enumerate() {
        let last = stage + 1 == lambdas.len();
        z.copy_from(&x);
        let mut t = 1.0f64;
        converged = false;
        for _ in 0..per_stage {
            iterations += 1;
            // r = B z - g, column by column
            for (ri, gi) in r.iter_mut().zip(g.iter()) {
                *ri = -gi;
            }
            for (col, zj) in bs.chunks_exact(rows).zip(z.iter()) {
                if *zj != Complex64::new(0.0, 0.0) {
                    for (ri, bij) in r.iter_mut().zip(col) {
                        *ri += bij * zj;
                    }
                }
            }
            if last {
                let cost = 0.5 * r.iter().map(|v| v.norm_sqr()).sum::<f64>()
                    + lambda * z.iter().map(|v| v.norm()).sum::<f64>();
                if cost < best.0 {
                    best = (cost, z.clone());
                }
            }
            let tau = step * lambda;
            let mut delta2 = 0.0;
            for (j, col) in bs.chunks_exact(rows).enumerate() {
                let grad: Complex64 = col.iter().zip(&r).map(|(bij, ri)| bij.conj() * ri).sum();
                let v = soft_threshold(z[j] - grad * step, tau);
                delta2 += (v - x[j]).norm_sqr();
                x_new[j] = v;
            }
            let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let mom = (t - 1.0) / t_new;
            for j in 0..n {
                z[j] = x_new[j] + (x_new[j] - x[j]) * mom;
            }
            std::mem::swap(&mut x, &mut x_new);
            t = t_new;
            if delta2.sqrt() <= p.tolerance * x.norm().max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        log::debug!("l1_vector: no convergence after {iterations} iterations");
        let lambda = lambda_min;
        let cost = 0.5 * (b * &x - g).norm_squared() + lambda * x.iter().map(|v| v.norm()).sum::<f64>();
        if best.0 < cost {
            x = best.1;
        }
    }

    let xmax = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut support: Vec<usize> = (0..n)
        .filter(|&i| x[i].norm() > p.support_threshold * xmax && x[i].norm() > 0.0)
        .collect();
    if let Stopping::TargetCount(l) = cfg.stopping() {
        if support.len() > l {
            support.sort_by(|&i, &j| x[j].norm().total_cmp(&x[i].norm()).then(i.cmp(&j)));
            support.truncate(l);
        }
    }
    support.sort_unstable();

    let mut values: Vec<Complex64> = support.iter().map(|&i| x[i]).collect();
    if p.debias && !support.is_empty() {
        let cols = DMatrix::from_fn(b.nrows(), support.len(), |r, c| b[(r, support[c])]);
        let gram = cols.adjoint() * &cols;
        let rhs = cols.adjoint() * g;
        if let Some(sol) = solve_gram(&gram, &rhs) {
            values = sol.iter().copied().collect();
        }
    }
    let entries: Vec<(usize, Complex64)> = support.into_iter().zip(values).collect();
    let mut fit = DVector::<Complex64>::zeros(b.nrows());
    for &(i, v) in &entries {
        fit += b.column(i) * v;
    }
    Ok(VectorRecovery {
        len: n,
        residual_norm: (g - fit).norm(),
        entries,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::build_B;
    use crate::signal_model::PhaseCode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn coded(p: usize, q: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        build_B(&PhaseCode::random(p, &mut rng), q).unwrap().matrix().clone()
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let b = coded(8, 2, 1);
        let out = l1_vector(&DVector::zeros(8), &b, &RecoveryConfig::known_targets(2)).unwrap();
        assert!(out.entries.is_empty());
        assert!(out.converged);
    }

    #[test]
    fn planted_single_column() {
        let b = coded(10, 2, 2);
        for col in [0usize, 4, 11, 19] {
            let g = b.column(col).into_owned();
            let out = l1_vector(&g, &b, &RecoveryConfig::residual_threshold(1e-9).unwrap()).unwrap();
            assert_eq!(out.support(), vec![col]);
            assert!((out.entries[0].1 - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn planted_three_sparse() {
        let b = coded(16, 2, 3);
        let mut x = DVector::<Complex64>::zeros(32);
        x[2] = Complex64::from_polar(1.0, 0.3);
        x[17] = Complex64::from_polar(1.0, 2.0);
        x[29] = Complex64::from_polar(1.0, -1.1);
        let g = &b * &x;
        let out = l1_vector(&g, &b, &RecoveryConfig::known_targets(3)).unwrap();
        assert_eq!(out.support(), vec![2, 17, 29]);
        assert!((out.to_dense() - x).norm() < 1e-8);
    }
}
