use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::model::DiscreteStateSpace;
use super::signal::SignalRecord;
use crate::error::{dim, Result, SidError};

/// Number of samples covering `[0, duration]` at period `ts`.
pub fn samples_for_duration(duration: f64, ts: f64) -> usize {
    (duration / ts + 1e-9).floor() as usize + 1
}

/// Additive disturbances for [`simulate_with_noise`]; matrices are `channels × samples`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Disturbances<'a> {
    pub process: Option<&'a DMatrix<f64>>,
    pub output: Option<&'a DMatrix<f64>>,
}

/// State recursion returning outputs as a `n_y × N` matrix, from `x0` (zero when `None`).
pub fn simulate_outputs(
    dss: &DiscreteStateSpace,
    u: &DMatrix<f64>,
    x0: Option<&DVector<f64>>,
) -> Result<DMatrix<f64>> {
    run(dss, u, x0, Disturbances::default())
}

fn run(
    dss: &DiscreteStateSpace,
    u: &DMatrix<f64>,
    x0: Option<&DVector<f64>>,
    noise: Disturbances<'_>,
) -> Result<DMatrix<f64>> {
    let n = dss.order();
    let len = u.ncols();
    if u.nrows() != dss.inputs() {
        return dim(format!("input has {} channels, model expects {}", u.nrows(), dss.inputs()));
    }
    if len == 0 {
        return Err(SidError::InsufficientData("input sequence is empty".into()));
    }
    let mut x = match x0 {
        Some(x0) if x0.len() != n => return dim(format!("x0 has length {}, expected {n}", x0.len())),
        Some(x0) => x0.clone(),
        None => DVector::zeros(n),
    };
    if let Some(w) = noise.process {
        if w.shape() != (n, len) {
            return dim("process noise must be n × samples");
        }
    }
    if let Some(v) = noise.output {
        if v.shape() != (dss.outputs(), len) {
            return dim("output noise must be n_y × samples");
        }
    }
    let mut y = DMatrix::zeros(dss.outputs(), len);
    for k in 0..len {
        let uk = u.column(k);
        let mut yk = &dss.c * &x + &dss.d * uk;
        if let Some(v) = noise.output {
            yk += v.column(k);
        }
        y.set_column(k, &yk);
        let mut next = &dss.a * &x + &dss.b * uk;
        if let Some(w) = noise.process {
            next += w.column(k);
        }
        x = next;
    }
    Ok(y)
}

/// Simulates `x[k+1] = A x[k] + B u[k]`, `y[k] = C x[k] + D u[k] + ν[k]`.
pub fn simulate(
    dss: &DiscreteStateSpace,
    u: &DMatrix<f64>,
    x0: &DVector<f64>,
    output_noise: Option<&DMatrix<f64>>,
) -> Result<SignalRecord> {
    simulate_with_noise(
        dss,
        u,
        x0,
        Disturbances { process: None, output: output_noise },
    )
}

pub fn simulate_with_noise(
    dss: &DiscreteStateSpace,
    u: &DMatrix<f64>,
    x0: &DVector<f64>,
    noise: Disturbances<'_>,
) -> Result<SignalRecord> {
    let y = run(dss, u, Some(x0), noise)?;
    let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
    };
    SignalRecord::new(dss.ts, rows(u), rows(&y))
}

/// Unit step on the first input from rest, over `[0, duration]`.
pub fn step_response(
    model: &DiscreteStateSpace,
    duration: f64,
    noise: Option<&[f64]>,
) -> Result<SignalRecord> {
    if model.inputs() == 0 {
        return dim("model has no inputs");
    }
    let len = samples_for_duration(duration, model.ts);
    let mut u = DMatrix::zeros(model.inputs(), len);
    u.row_mut(0).fill(1.0);
    let noise = match noise {
        Some(v) if v.len() != len => {
            return dim(format!("step noise has {} samples, expected {len}", v.len()))
        }
        Some(v) => Some(DMatrix::from_fn(model.outputs(), len, |_, k| v[k])),
        None => None,
    };
    simulate(model, &u, &DVector::zeros(model.order()), noise.as_ref())
}

/// `C (e^{jωts} I − A)⁻¹ B + D` for each angular frequency (rad/s).
pub fn frequency_response(
    dss: &DiscreteStateSpace,
    frequencies: &[f64],
) -> Result<Vec<DMatrix<Complex64>>> {
    let nyquist = std::f64::consts::PI / dss.ts;
    let n = dss.order();
    let to_c = |m: &DMatrix<f64>| m.map(|x| Complex64::new(x, 0.0));
    let (a, b, c, d) = (to_c(&dss.a), to_c(&dss.b), to_c(&dss.c), to_c(&dss.d));
    frequencies
        .iter()
        .map(|&w| {
            if !(w > 0.0) || w > nyquist * (1.0 + 1e-12) {
                return Err(SidError::Domain(format!(
                    "frequency {w} rad/s outside (0, {nyquist}]"
                )));
            }
            let z = Complex64::from_polar(1.0, w * dss.ts);
            let lhs = DMatrix::<Complex64>::identity(n, n) * z - &a;
            let x = lhs
                .lu()
                .solve(&b)
                .ok_or_else(|| SidError::Numerical(format!("pole on the unit circle at {w} rad/s")))?;
            Ok(&c * x + &d)
        })
        .collect()
}

/// `count` log-spaced frequencies in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
