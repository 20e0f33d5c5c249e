use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measure::C64;

/// Extreme eigenvalues of a Hermitian operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremeEigen {
    pub min: f64,
    pub max: f64,
    pub iterations: usize,
}

const START_SEED: u64 = 0x5eed_f4a3;

/// Lanczos with full reorthogonalization on a Hermitian operator of size `n`.
///
/// Stops once both extreme Ritz pairs have residual at most
/// `rel_tol·‖T‖`, when the Krylov space becomes invariant, or after `n`
/// steps (where the tridiagonal matrix is exact). More than `cap` steps
/// is a `NonConvergence` error. The start vector is pseudo-random with a
/// fixed seed.
pub fn lanczos_extremes<F>(apply: F, n: usize, rel_tol: f64, cap: usize) -> Result<ExtremeEigen>
where
    F: Fn(&DVector<C64>) -> DVector<C64>,
{
    if n == 0 {
        return Ok(ExtremeEigen {
            min: 0.0,
            max: 0.0,
            iterations: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut v = DVector::from_fn(n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    v /= C64::new(v.norm(), 0.0);
    let mut basis: Vec<DVector<C64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    loop {
        let j = alphas.len();
        if j >= cap {
            return Err(Error::NonConvergence(cap));
        }
        let q = &basis[j];
        let mut w = apply(q);
        let alpha = q.dotc(&w).re;
        w -= q * C64::new(alpha, 0.0);
        if j > 0 {
            w -= &basis[j - 1] * C64::new(betas[j - 1], 0.0);
        }
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&w);
                w -= b * c;
            }
        }
        let beta = w.norm();
        alphas.push(alpha);

        let k = alphas.len();
        let t = DMatrix::from_fn(k, k, |r, c| {
            if r == c {
                alphas[r]
            } else if r + 1 == c {
                betas[r]
            } else if c + 1 == r {
                betas[c]
            } else {
                0.0
            }
        });
        let eig = t.clone().symmetric_eigen();
        let (mut imin, mut imax) = (0, 0);
        for i in 0..k {
            if eig.eigenvalues[i] < eig.eigenvalues[imin] {
                imin = i;
            }
            if eig.eigenvalues[i] > eig.eigenvalues[imax] {
                imax = i;
            }
        }
        let scale = eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(f64::MIN_POSITIVE);
        let res_min = beta * eig.eigenvectors[(k - 1, imin)].abs();
        let res_max = beta * eig.eigenvectors[(k - 1, imax)].abs();
        let invariant = beta <= 1e-13 * scale;
        if invariant || k == n || (res_min <= rel_tol * scale && res_max <= rel_tol * scale) {
            return Ok(ExtremeEigen {
                min: eig.eigenvalues[imin],
                max: eig.eigenvalues[imax],
                iterations: k,
            });
        }
        betas.push(beta);
        basis.push(w / C64::new(beta, 0.0));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian_psd(n: usize, seed: u64) -> DMatrix<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        a.adjoint() * a
    }

    #[test]
    fn matches_dense_eigensolver() {
        for seed in 0..5 {
            let m = random_hermitian_psd(12, seed);
            let got = lanczos_extremes(|v| &m * v, 12, 1e-10, 10_000).unwrap();
            let dense = m.clone().symmetric_eigen().eigenvalues;
            let lo = dense.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = dense.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!((got.min - lo).abs() < 1e-8 * hi, "{} vs {lo}", got.min);
            assert!((got.max - hi).abs() < 1e-8 * hi);
        }
    }

    #[test]
    fn identity_converges_in_one_step() {
        let got = lanczos_extremes(|v| v * C64::new(2.0, 0.0), 50, 1e-9, 10).unwrap();
        assert_eq!(got.iterations, 1);
        assert!((got.min - 2.0).abs() < 1e-14 && (got.max - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cap_is_enforced() {
        let m = random_hermitian_psd(30, 9);
        assert!(matches!(
            lanczos_extremes(|v| &m * v, 30, 1e-15, 2),
            Err(Error::NonConvergence(2))
        ));
    }
}
