use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{dim, domain, Result};
use crate::linalg::{self, from_rows, to_rows};

/// Default tolerance on the smallest eigenvalue of the characteristic function.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

/// Convex region `{ z : λ + βz + βᵀz̄ ⪰ 0 }` of the complex plane.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiRegion {
    lambda: DMatrix<f64>,
    beta: DMatrix<f64>,
    pub label: String,
}

impl LmiRegion {
    pub fn new(lambda: DMatrix<f64>, beta: DMatrix<f64>, label: impl Into<String>) -> Result<Self> {
        let m = lambda.nrows();
        if m == 0 || lambda.ncols() != m || beta.shape() != (m, m) {
            return dim(format!(
                "region needs square λ and β of equal size, got {:?} and {:?}",
                lambda.shape(),
                beta.shape()
            ));
        }
        let asym = (&lambda - lambda.transpose()).amax();
        if asym > 1e-12 {
            return domain(format!("λ must be symmetric (asymmetry {asym:e})"));
        }
        Ok(Self { lambda, beta, label: label.into() })
    }

    pub fn lambda(&self) -> &DMatrix<f64> {
        &self.lambda
    }

    pub fn beta(&self) -> &DMatrix<f64> {
        &self.beta
    }

    /// Size `m` of the characteristic function.
    pub fn size(&self) -> usize {
        self.lambda.nrows()
    }

    /// `f(z) = λ + βz + βᵀz̄`, Hermitian for every `z`.
    pub fn char_fn_eval(&self, z: Complex64) -> DMatrix<Complex64> {
        let m = self.size();
        DMatrix::from_fn(m, m, |i, j| {
            Complex64::new(self.lambda[(i, j)], 0.0) + z * self.beta[(i, j)] + z.conj() * self.beta[(j, i)]
        })
    }

    /// Smallest eigenvalue of `f(z)`.
    pub fn min_eig(&self, z: Complex64) -> f64 {
        linalg::hermitian_min_eig(&self.char_fn_eval(z))
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.min_eig(z) >= -tol
    }

    /// `f(x)` at a real point, a real symmetric matrix.
    pub fn char_fn_real(&self, x: f64) -> DMatrix<f64> {
        &self.lambda + (&self.beta + self.beta.transpose()) * x
    }

    /// Real point deepest inside the region over `[-10, 10]`, or `None` when
    /// no real point is strictly inside.
    ///
    /// The smallest eigenvalue of an affine matrix function is concave, so a
    /// golden-section search finds the maximum.
    pub fn real_center(&self) -> Option<f64> {
        let score = |x: f64| linalg::sym_min_eig(&self.char_fn_real(x));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (-10.0, 10.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (score(c), score(d));
        while b - a > 1e-10 {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = score(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = score(d);
            }
        }
        let x = 0.5 * (a + b);
        let scale = self.lambda.amax().max(self.beta.amax()).max(1.0);
        (score(x) > 1e-9 * scale).then_some(x)
    }

    pub fn to_file(&self) -> RegionFile {
        RegionFile {
            label: self.label.clone(),
            lambda: to_rows(&self.lambda),
            beta: to_rows(&self.beta),
        }
    }
}

/// Region `{ z : f(z) ⪰ 0 }` of the whole list: block-diagonal λ and β.
pub fn intersect(regions: &[LmiRegion]) -> Result<LmiRegion> {
    if regions.is_empty() {
        return domain("cannot intersect an empty list of regions");
    }
    if regions.len() == 1 {
        return Ok(regions[0].clone());
    }
    let m: usize = regions.iter().map(LmiRegion::size).sum();
    let mut lambda = DMatrix::zeros(m, m);
    let mut beta = DMatrix::zeros(m, m);
    let mut off = 0;
    for r in regions {
        let k = r.size();
        lambda.view_mut((off, off), (k, k)).copy_from(&r.lambda);
        beta.view_mut((off, off), (k, k)).copy_from(&r.beta);
        off += k;
    }
    let label = regions.iter().map(|r| r.label.as_str()).collect::<Vec<_>>().join(" ∩ ");
    LmiRegion::new(lambda, beta, label)
}

/// JSON region file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RegionFile {
    pub label: String,
    pub lambda: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
}

impl RegionFile {
    pub fn to_region(&self) -> Result<LmiRegion> {
        LmiRegion::new(from_rows(&self.lambda)?, from_rows(&self.beta)?, self.label.clone())
    }
}
