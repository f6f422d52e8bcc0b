use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{dim, domain, Result, SidError};
use crate::linalg::{self, from_rows, to_rows};

/// Rational transfer function in descending powers of `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferFunction {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl TransferFunction {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        let den = strip_leading_zeros(den);
        let num = strip_leading_zeros(num);
        if den.is_empty() {
            return domain("denominator must have a nonzero coefficient");
        }
        let num = if num.is_empty() { vec![0.0] } else { num };
        if num.len() > den.len() {
            return Err(SidError::Improper {
                num: num.len() - 1,
                den: den.len() - 1,
            });
        }
        Ok(Self { num, den })
    }

    pub fn order(&self) -> usize {
        self.den.len() - 1
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        linalg::poly_roots(&self.den)
    }

    /// Value at a complex point `s`.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let horner = |c: &[f64]| {
            c.iter()
                .fold(Complex64::new(0.0, 0.0), |acc, &x| acc * s + x)
        };
        horner(&self.num) / horner(&self.den)
    }

    /// Steady-state gain `G(0)`.
    pub fn dc_gain(&self) -> f64 {
        self.num.last().copied().unwrap_or(0.0) / self.den.last().copied().unwrap_or(1.0)
    }
}

fn strip_leading_zeros(mut v: Vec<f64>) -> Vec<f64> {
    let first = v.iter().position(|c| *c != 0.0).unwrap_or(v.len());
    v.drain(..first);
    v
}

/// `K wn² / (s² + 2 ζ wn s + wn²)`.
pub fn second_order_tf(k: f64, zeta: f64, wn: f64) -> Result<TransferFunction> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return domain(format!("damping ratio must lie in (0, 1), got {zeta}"));
    }
    if !(wn > 0.0) {
        return domain(format!("natural frequency must be positive, got {wn}"));
    }
    TransferFunction::new(vec![k * wn * wn], vec![1.0, 2.0 * zeta * wn, wn * wn])
}

fn check_dims(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n {
        return dim(format!("A must be square, got {:?}", a.shape()));
    }
    if b.nrows() != n {
        return dim(format!("B must have {n} rows, got {}", b.nrows()));
    }
    if c.ncols() != n {
        return dim(format!("C must have {n} columns, got {}", c.ncols()));
    }
    if d.shape() != (c.nrows(), b.ncols()) {
        return dim(format!(
            "D must be {}x{}, got {:?}",
            c.nrows(),
            b.ncols(),
            d.shape()
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousStateSpace {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl ContinuousStateSpace {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        check_dims(&a, &b, &c, &d)?;
        Ok(Self { a, b, c, d })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn poles(&self) -> Vec<Complex64> {
        linalg::eigenvalues(&self.a)
    }
}

/// `x[k+1] = A x[k] + B u[k]`, `y[k] = C x[k] + D u[k]`, sampled every `ts` seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteStateSpace {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub ts: f64,
}

impl DiscreteStateSpace {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
        ts: f64,
    ) -> Result<Self> {
        if !(ts > 0.0) {
            return Err(SidError::SamplingPeriod(ts));
        }
        check_dims(&a, &b, &c, &d)?;
        Ok(Self { a, b, c, d, ts })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn poles(&self) -> Vec<Complex64> {
        linalg::eigenvalues(&self.a)
    }

    pub fn spectral_radius(&self) -> f64 {
        linalg::spectral_radius(&self.a)
    }

    /// Copy with the state matrix replaced; B, C, D and `ts` are kept.
    pub fn with_a(&self, a: DMatrix<f64>) -> Result<Self> {
        Self::new(a, self.b.clone(), self.c.clone(), self.d.clone(), self.ts)
    }

    /// Markov parameters `D, CB, CAB, ...` up to `lags` (inclusive of `D`).
    pub fn markov_parameters(&self, lags: usize) -> Vec<DMatrix<f64>> {
        let mut out = Vec::with_capacity(lags + 1);
        out.push(self.d.clone());
        let mut ak_b = self.b.clone();
        for _ in 0..lags {
            out.push(&self.c * &ak_b);
            ak_b = &self.a * ak_b;
        }
        out
    }

    /// DC gain `C (I - A)⁻¹ B + D`, when `I - A` is invertible.
    pub fn dc_gain(&self) -> Option<DMatrix<f64>> {
        let n = self.order();
        let lhs = DMatrix::identity(n, n) - &self.a;
        let x = lhs.lu().solve(&self.b)?;
        Some(&self.c * x + &self.d)
    }
}

/// JSON model file: row-major matrices and a sampling period (`null` for continuous time).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModelFile {
    pub ts: Option<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
}

impl ModelFile {
    pub fn from_discrete(m: &DiscreteStateSpace) -> Self {
        Self {
            ts: Some(m.ts),
            a: to_rows(&m.a),
            b: to_rows(&m.b),
            c: to_rows(&m.c),
            d: to_rows(&m.d),
        }
    }

    pub fn from_continuous(m: &ContinuousStateSpace) -> Self {
        Self {
            ts: None,
            a: to_rows(&m.a),
            b: to_rows(&m.b),
            c: to_rows(&m.c),
            d: to_rows(&m.d),
        }
    }

    fn matrices(&self) -> Result<[DMatrix<f64>; 4]> {
        let a = from_rows(&self.a)?;
        let n = a.nrows();
        // Empty rows lose their column count; rebuild from the neighbours.
        let mut b = from_rows(&self.b)?;
        let mut c = from_rows(&self.c)?;
        let d = from_rows(&self.d)?;
        if n == 0 {
            b = DMatrix::zeros(0, d.ncols());
            c = DMatrix::zeros(d.nrows(), 0);
        }
        Ok([a, b, c, d])
    }

    pub fn to_discrete(&self) -> Result<DiscreteStateSpace> {
        let ts = self
            .ts
            .ok_or_else(|| SidError::Config("model file has no sampling period".into()))?;
        let [a, b, c, d] = self.matrices()?;
        DiscreteStateSpace::new(a, b, c, d, ts)
    }

    pub fn to_continuous(&self) -> Result<ContinuousStateSpace> {
        let [a, b, c, d] = self.matrices()?;
        ContinuousStateSpace::new(a, b, c, d)
    }
}

/// Controllable-canonical realization of a proper transfer function.
pub fn tf_to_ss(tf: &TransferFunction) -> Result<ContinuousStateSpace> {
    let tf = TransferFunction::new(tf.num.clone(), tf.den.clone())?;
    let n = tf.order();
    let lead = tf.den[0];
    let den: Vec<f64> = tf.den.iter().map(|c| c / lead).collect();
    let mut num = vec![0.0; n + 1 - tf.num.len()];
    num.extend(tf.num.iter().map(|c| c / lead));

    let d0 = num[0];
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, 1);
    let mut c = DMatrix::zeros(1, n);
    if n > 0 {
        for j in 0..n {
            a[(0, j)] = -den[j + 1];
            c[(0, j)] = num[j + 1] - d0 * den[j + 1];
        }
        for i in 1..n {
            a[(i, i - 1)] = 1.0;
        }
        b[(0, 0)] = 1.0;
    }
    ContinuousStateSpace::new(a, b, c, DMatrix::from_element(1, 1, d0))
}

/// Zero-order-hold discretization through the exponential of `[[A, B], [0, 0]]·ts`.
pub fn c2d_zoh(css: &ContinuousStateSpace, ts: f64) -> Result<DiscreteStateSpace> {
    if !(ts > 0.0) {
        return Err(SidError::SamplingPeriod(ts));
    }
    let n = css.order();
    let m = css.b.ncols();
    let mut aug = DMatrix::zeros(n + m, n + m);
    aug.view_mut((0, 0), (n, n)).copy_from(&(&css.a * ts));
    aug.view_mut((0, n), (n, m)).copy_from(&(&css.b * ts));
    let e = aug.exp();
    let ad = e.view((0, 0), (n, n)).into_owned();
    let bd = e.view((0, n), (n, m)).into_owned();
    DiscreteStateSpace::new(ad, bd, css.c.clone(), css.d.clone(), ts)
}
