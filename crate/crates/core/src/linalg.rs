//! Dense linear-algebra helpers shared by the modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{dim, Result, SidError};

/// Full SVD with both singular-vector factors, iterated to machine precision.
pub fn svd(m: DMatrix<f64>) -> Result<nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    m.try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| SidError::Numerical("SVD did not converge".into()))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == 0.0 {
                continue;
            }
            out.view_mut((i * br, j * bc), (br, bc)).copy_from(&(b * s));
        }
    }
    out
}

/// Real symmetric embedding `[[Re, -Im], [Im, Re]]` of a Hermitian matrix.
///
/// Every eigenvalue of `h` appears twice in the embedding.
pub fn real_embedding(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let m = h.nrows();
    let mut out = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let z = h[(i, j)];
            out[(i, j)] = z.re;
            out[(i + m, j + m)] = z.re;
            out[(i, j + m)] = -z.im;
            out[(i + m, j)] = z.im;
        }
    }
    out
}

/// Smallest eigenvalue of a real symmetric matrix. Only the lower triangle is read.
pub fn sym_min_eig(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return f64::INFINITY;
    }
    if a.nrows() == 1 {
        return a[(0, 0)];
    }
    let sym = symmetrize(a);
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn hermitian_min_eig(h: &DMatrix<Complex64>) -> f64 {
    sym_min_eig(&real_embedding(h))
}

/// `(a + aᵀ) / 2`.
pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Eigenvalues of a general real square matrix.
pub fn eigenvalues(a: &DMatrix<f64>) -> Vec<Complex64> {
    if a.is_empty() {
        return Vec::new();
    }
    if a.nrows() == 1 {
        return vec![Complex64::new(a[(0, 0)], 0.0)];
    }
    a.clone().complex_eigenvalues().iter().copied().collect()
}

pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    eigenvalues(a).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Roots of a polynomial with coefficients in descending powers.
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let first = coeffs.iter().position(|c| *c != 0.0);
    let Some(first) = first else {
        return Err(SidError::Domain("zero polynomial has no roots".into()));
    };
    let c = &coeffs[first..];
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let mut comp = DMatrix::zeros(deg, deg);
    for j in 0..deg {
        comp[(0, j)] = -c[j + 1] / c[0];
    }
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    Ok(eigenvalues(&comp))
}

/// Solves `X = A X Aᵀ + Q` through the vectorized Kronecker system.
pub fn discrete_lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || q.shape() != (n, n) {
        return dim("discrete Lyapunov needs square A and Q of equal size");
    }
    let lhs = DMatrix::identity(n * n, n * n) - kron(a, a);
    let rhs = DVector::from_column_slice(q.as_slice());
    let sol = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| SidError::Numerical("Lyapunov operator is singular".into()))?;
    Ok(symmetrize(&DMatrix::from_column_slice(n, n, sol.as_slice())))
}

/// Largest distance between two spectra after greedy nearest matching.
///
/// Returns `f64::INFINITY` when the spectra have different sizes.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for za in a {
        let mut best = (usize::MAX, f64::INFINITY);
        for (j, zb) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (za - zb).norm();
            if d < best.1 {
                best = (j, d);
            }
        }
        used[best.0] = true;
        worst = worst.max(best.1);
    }
    worst
}

/// Row-major nested vectors, the on-disk matrix layout.
pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let r = rows.len();
    if r == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let c = rows[0].len();
    if rows.iter().any(|row| row.len() != c) {
        return dim("ragged matrix rows");
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

/// Serde adapter storing a `DMatrix<f64>` as row-major nested arrays.
pub mod rows_serde {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        super::to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        super::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}
