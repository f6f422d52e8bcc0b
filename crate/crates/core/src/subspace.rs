//! PI-MOESP subspace identification with past inputs as instruments.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{dim, Result, SidError};
use crate::linalg;
use crate::lti::{DiscreteStateSpace, SignalRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HankelConfig {
    /// Past horizon (block rows of the instrument).
    pub past: usize,
    /// Future horizon (block rows of the observability matrix).
    pub future: usize,
    /// Fixed model order; `None` applies the singular-value ratio rule.
    pub order: Option<usize>,
    /// Smallest `σ_k/σ_1` kept by the ratio rule.
    pub threshold: f64,
    /// Subtract channel means from `u` and `y` before identifying.
    pub detrend: bool,
    /// Estimate the initial state together with B and D.
    pub estimate_x0: bool,
}

impl Default for HankelConfig {
    fn default() -> Self {
        Self { past: 10, future: 10, order: None, threshold: 1e-3, detrend: false, estimate_x0: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationResult {
    pub model: DiscreteStateSpace,
    /// Singular values of the instrumented output projection, descending.
    pub singular_values: Vec<f64>,
    pub order: usize,
}

/// Block Hankel matrix of a `channels × N` sequence: block `(i, j)` holds sample `i + j`.
pub fn block_hankel(seq: &DMatrix<f64>, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    let (ch, len) = seq.shape();
    if rows == 0 || cols == 0 {
        return dim("Hankel matrix needs at least one block row and column");
    }
    if rows + cols - 1 > len {
        return Err(SidError::InsufficientData(format!(
            "{rows} block rows × {cols} columns need {} samples, have {len}",
            rows + cols - 1
        )));
    }
    Ok(DMatrix::from_fn(rows * ch, cols, |r, j| seq[(r % ch, r / ch + j)]))
}

/// Largest `k` with `σ_k/σ_1 ≥ threshold`; zero for empty or vanishing values.
pub fn select_order(singular_values: &[f64], threshold: f64) -> usize {
    match singular_values.first() {
        Some(&s1) if s1 > 0.0 => singular_values.iter().take_while(|&&s| s / s1 >= threshold).count(),
        _ => 0,
    }
}

pub fn identify(record: &SignalRecord, cfg: &HankelConfig) -> Result<IdentificationResult> {
    pi_moesp(&record.input_matrix(), &record.output_matrix(), record.ts, cfg)
}

/// Identifies `(A, B, C, D)` from `channels × N` input and output matrices.
pub fn pi_moesp(u: &DMatrix<f64>, y: &DMatrix<f64>, ts: f64, cfg: &HankelConfig) -> Result<IdentificationResult> {
    let (m, len) = u.shape();
    let l = y.nrows();
    if y.ncols() != len {
        return dim(format!("input has {len} samples, output has {}", y.ncols()));
    }
    if m == 0 || l == 0 {
        return dim("identification needs at least one input and one output");
    }
    let (p, f) = (cfg.past, cfg.future);
    if p == 0 || f < 2 {
        return Err(SidError::Config("horizons need past ≥ 1 and future ≥ 2".into()));
    }
    let rows = m * (p + f) + l * f;
    let cols = (len + 1).saturating_sub(p + f);
    if cols < rows {
        return Err(SidError::InsufficientData(format!(
            "{len} samples give {cols} Hankel columns; horizons ({p}, {f}) need at least {rows}"
        )));
    }

    let (u, y) = if cfg.detrend { (demean(u), demean(y)) } else { (u.clone(), y.clone()) };

    let up = block_hankel(&u.columns(0, p + cols - 1).into_owned(), p, cols)?;
    let uf = block_hankel(&u.columns(p, f + cols - 1).into_owned(), f, cols)?;
    let yf = block_hankel(&y.columns(p, f + cols - 1).into_owned(), f, cols)?;

    let mut stacked = DMatrix::zeros(rows, cols);
    stacked.rows_mut(0, m * f).copy_from(&uf);
    stacked.rows_mut(m * f, m * p).copy_from(&up);
    stacked.rows_mut(m * (f + p), l * f).copy_from(&yf);
    stacked /= (cols as f64).sqrt();

    // LQ of the stacked Hankels through QR of the transpose
    let r = stacked.transpose().qr().r();
    let l32 = r.transpose().view((m * (f + p), m * f), (l * f, m * p)).into_owned();

    let svd = linalg::svd(l32)?;
    let mut order_idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    order_idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order_idx.iter().map(|&i| svd.singular_values[i]).collect();
    let s1 = sv.first().copied().unwrap_or(0.0);
    let rank_floor = f64::EPSILON * rows.max(cols) as f64 * s1;
    if !(s1 > 0.0) || s1 <= f64::EPSILON * stacked.amax() {
        return Err(SidError::RankDeficient("output projection vanishes (no output signal?)".into()));
    }

    let n = cfg.order.unwrap_or_else(|| select_order(&sv, cfg.threshold));
    if n == 0 {
        return Err(SidError::RankDeficient("singular-value rule found no order".into()));
    }
    if n > sv.len() || n > l * (f - 1) {
        return Err(SidError::Config(format!(
            "order {n} exceeds what horizons ({p}, {f}) can resolve ({})",
            sv.len().min(l * (f - 1))
        )));
    }
    if sv[n - 1] <= rank_floor {
        return Err(SidError::RankDeficient(format!("only {} numerically nonzero singular values", sv.iter().filter(|s| **s > rank_floor).count())));
    }

    let uu = svd.u.as_ref().ok_or_else(|| SidError::Numerical("SVD returned no left vectors".into()))?;
    let gamma = DMatrix::from_fn(l * f, n, |i, j| uu[(i, order_idx[j])] * sv[j].sqrt());
    let c = gamma.rows(0, l).into_owned();
    let upper = gamma.rows(0, l * (f - 1)).into_owned();
    let lower = gamma.rows(l, l * (f - 1)).into_owned();
    let a = linalg::svd(upper)?
        .solve(&lower, f64::EPSILON)
        .map_err(|e| SidError::Numerical(format!("shift-invariance solve failed: {e}")))?;

    let (b, d) = input_matrices(&a, &c, &u, &y, cfg.estimate_x0)?;
    let model = DiscreteStateSpace::new(a, b, c, d, ts)?;
    Ok(IdentificationResult { model, singular_values: sv, order: n })
}

fn demean(x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = x.clone();
    for mut row in out.row_iter_mut() {
        let mean = row.mean();
        row.add_scalar_mut(-mean);
    }
    out
}

/// Least-squares `B`, `D` (and optionally `x₀`) for fixed `A`, `C` over the whole record.
fn input_matrices(
    a: &DMatrix<f64>,
    c: &DMatrix<f64>,
    u: &DMatrix<f64>,
    y: &DMatrix<f64>,
    with_x0: bool,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let (m, len) = u.shape();
    let l = c.nrows();
    let unknowns = n * m + l * m + if with_x0 { n } else { 0 };
    let mut phi = DMatrix::zeros(len * l, unknowns);

    // state sensitivity to each entry of B, one n × n block per input channel
    for j in 0..m {
        let mut s = DMatrix::<f64>::zeros(n, n);
        for k in 0..len {
            let out = c * &s;
            for r in 0..l {
                for i in 0..n {
                    phi[(k * l + r, j * n + i)] = out[(r, i)];
                }
            }
            s = a * s;
            for i in 0..n {
                s[(i, i)] += u[(j, k)];
            }
        }
    }
    for k in 0..len {
        for j in 0..m {
            for r in 0..l {
                phi[(k * l + r, n * m + j * l + r)] = u[(j, k)];
            }
        }
    }
    if with_x0 {
        let mut ca = c.clone();
        for k in 0..len {
            for r in 0..l {
                for i in 0..n {
                    phi[(k * l + r, n * m + l * m + i)] = ca[(r, i)];
                }
            }
            ca = &ca * a;
        }
    }
    let target = DMatrix::from_fn(len * l, 1, |row, _| y[(row % l, row / l)]);
    let theta = linalg::svd(phi)?
        .solve(&target, f64::EPSILON * len as f64)
        .map_err(|e| SidError::Numerical(format!("B/D regression failed: {e}")))?;
    let b = DMatrix::from_fn(n, m, |i, j| theta[j * n + i]);
    let d = DMatrix::from_fn(l, m, |r, j| theta[n * m + j * l + r]);
    Ok((b, d))
}

#[cfg(test)]
mod tests;
