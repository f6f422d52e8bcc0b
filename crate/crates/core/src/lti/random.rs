use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::model::DiscreteStateSpace;
use crate::error::{domain, Result};

/// Smallest distance kept between any two eigenvalues of a random matrix.
pub const MIN_POLE_SEPARATION: f64 = 0.05;

/// Random real `n × n` matrix whose eigenvalue moduli lie in `[r_lo, r_hi]`.
///
/// Eigenvalues are drawn as conjugate pairs or real values at least
/// [`MIN_POLE_SEPARATION`] apart, placed in a real block-diagonal form and
/// mixed by a well-conditioned similarity.
pub fn random_stable_matrix<R: Rng>(n: usize, r_lo: f64, r_hi: f64, rng: &mut R) -> Result<DMatrix<f64>> {
    if n == 0 || !(0.0 <= r_lo && r_lo <= r_hi) {
        return domain(format!("invalid random matrix request n = {n}, radii [{r_lo}, {r_hi}]"));
    }
    for _ in 0..10_000 {
        let j = draw_block_diagonal(n, r_lo, r_hi, rng);
        let eig = crate::linalg::eigenvalues(&j);
        let separated = eig
            .iter()
            .enumerate()
            .all(|(i, a)| eig[i + 1..].iter().all(|b| (a - b).norm() >= MIN_POLE_SEPARATION));
        if separated {
            return mix(j, rng);
        }
    }
    domain(format!("cannot place {n} separated eigenvalues in radii [{r_lo}, {r_hi}]"))
}

fn draw_block_diagonal<R: Rng>(n: usize, r_lo: f64, r_hi: f64, rng: &mut R) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(n, n);
    let mut k = 0;
    while k < n {
        let r = rng.random_range(r_lo..=r_hi);
        if k + 1 < n && rng.random_bool(0.5) {
            let th = rng.random_range(0.05..PI - 0.05);
            let (s, c) = th.sin_cos();
            j[(k, k)] = r * c;
            j[(k, k + 1)] = -r * s;
            j[(k + 1, k)] = r * s;
            j[(k + 1, k + 1)] = r * c;
            k += 2;
        } else {
            j[(k, k)] = if rng.random_bool(0.5) { r } else { -r };
            k += 1;
        }
    }
    j
}

fn mix<R: Rng>(j: DMatrix<f64>, rng: &mut R) -> Result<DMatrix<f64>> {
    let n = j.nrows();
    let t = DMatrix::<f64>::identity(n, n) + DMatrix::from_fn(n, n, |_, _| 0.3 * rng.sample::<f64, _>(StandardNormal));
    let t_inv = t
        .clone()
        .try_inverse()
        .ok_or_else(|| crate::SidError::Numerical("singular similarity".into()))?;
    Ok(&t * j * t_inv)
}

/// Random discrete model with poles of modulus in `[r_lo, r_hi]` and Gaussian B, C, D.
pub fn random_stable_model(
    n: usize,
    inputs: usize,
    outputs: usize,
    r_lo: f64,
    r_hi: f64,
    ts: f64,
    seed: u64,
) -> Result<DiscreteStateSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_stable_matrix(n, r_lo, r_hi, &mut rng)?;
    let mut normal = |r, c| DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal));
    let b = normal(n, inputs);
    let c = normal(outputs, n);
    let d = normal(outputs, inputs);
    DiscreteStateSpace::new(a, b, c, d, ts)
}
