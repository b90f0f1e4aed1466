//! Dominant-eigenvalue magnitude estimation by power iteration.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sparse::SparseMatrix;

/// Result of a power-iteration run.
///
/// `converged == false` is a warning, not a failure: `value` still carries the
/// last estimate so callers can decide whether it is usable.
#[derive(Debug, Clone, Copy)]
pub struct EigenEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Estimates the spectral radius of a square non-negative matrix.
///
/// Starts from a seeded random positive vector and repeatedly applies the
/// matrix; the estimate after each step is the norm growth `‖Ax‖ / ‖x‖`, which
/// for a non-negative matrix converges to the dominant eigenvalue magnitude
/// and is exact from the first step for permutation-structured input. The
/// iteration stops once successive estimates differ by less than `tol`; if
/// `max_iter` steps pass without that happening the last estimate is returned
/// flagged as non-converged. A vector annihilated by the matrix (nilpotent
/// case) yields an exact zero.
pub fn spectral_radius(a: &SparseMatrix, tol: f64, max_iter: usize, seed: u64) -> EigenEstimate {
    assert_eq!(
        a.n_rows(),
        a.n_cols(),
        "spectral radius needs a square matrix"
    );
    let n = a.n_rows();
    if n == 0 {
        return EigenEstimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    normalize(&mut x);

    let mut estimate = f64::NAN;
    for it in 1..=max_iter {
        let y = a.matvec(&x).expect("square matrix times own-length vector");
        let growth = norm(&y);
        if growth == 0.0 {
            return EigenEstimate {
                value: 0.0,
                iterations: it,
                converged: true,
            };
        }
        if (growth - estimate).abs() < tol {
            return EigenEstimate {
                value: growth,
                iterations: it,
                converged: true,
            };
        }
        estimate = growth;
        x = y;
        normalize(&mut x);
    }
    EigenEstimate {
        value: estimate,
        iterations: max_iter,
        converged: false,
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn normalize(x: &mut [f64]) {
    let n = norm(x);
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
}
