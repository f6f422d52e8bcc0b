use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::problem::{SdpProblem, SdpSolution, SolverStatus, TraceRow};
use crate::error::{dim, Result, SidError};
use crate::linalg::{sym_min_eig, symmetrize};

/// `tr P ≤ TRACE_CAP · n · p_floor`.
pub const TRACE_CAP: f64 = 1e6;

/// Barrier interior-point solve of the constrained re-estimation problem.
///
/// Variables are `x = (svec P, vec Q)`. Each stage minimizes
/// `t·‖A*P − Q‖² − log det M(P, Q) − log det(P − p_floor·I) − log(cap − tr P)`
/// by damped Newton steps from a strictly feasible point; the centered iterate
/// is within `ν/t` of the optimum, `ν = m·n + n + 1`, and `t` grows until that
/// bound meets the tolerances. The trace cap keeps the barrier bounded below
/// on cone-shaped regions, where `P` could otherwise grow along a ray of zero
/// objective. Every iterate is strictly feasible, so `Â` lies inside the
/// region even when the iteration cap is hit.
pub fn solve_constrained(problem: &SdpProblem) -> Result<SdpSolution> {
    let n = problem.a_star.nrows();
    if n == 0 || problem.a_star.ncols() != n {
        return dim(format!("A* must be square, got {:?}", problem.a_star.shape()));
    }
    if !(problem.p_floor > 0.0) {
        return Err(SidError::Domain(format!("P floor must be positive, got {}", problem.p_floor)));
    }
    let model = Model::new(problem);

    let Some(center) = problem.region.real_center() else {
        return Ok(infeasible(n));
    };
    let p0 = DMatrix::identity(n, n) * (2.0 * problem.p_floor);
    let q0 = &p0 * center;
    let mut x = model.pack(&p0, &q0);

    let opts = &problem.options;
    let nu = (problem.region.size() * n + n + 1) as f64;
    let f0 = model.objective(&x);
    let mut t = (nu / f0.max(1e-6)).clamp(1e-6, 1e6);
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut stage = 0;
    let mut status = SolverStatus::MaxIterations;

    'outer: loop {
        stage += 1;
        loop {
            if iterations >= opts.max_iterations {
                break 'outer;
            }
            let Some(ev) = model.evaluate(&x, t, true) else {
                return Err(SidError::Numerical("iterate left the feasible set".into()));
            };
            let (dx, decrement) = newton_direction(&ev.hessian, &ev.gradient)?;
            if decrement * decrement / 2.0 <= 1e-12 {
                break;
            }
            let slope = ev.gradient.dot(&dx);
            let mut step = 1.0;
            let accepted = loop {
                let trial = &x + &dx * step;
                if let Some(v) = model.value(&trial, t) {
                    if v <= ev.value + 0.25 * step * slope {
                        break Some(trial);
                    }
                }
                step *= 0.5;
                if step < 1e-14 {
                    break None;
                }
            };
            iterations += 1;
            let Some(next) = accepted else { break };
            let moved = (&next - &x).amax() > f64::EPSILON * x.amax().max(1.0);
            let improved = model.value(&next, t).is_some_and(|v| ev.value - v > 1e-14 * ev.value.abs().max(1.0));
            x = next;
            let (lmi_min_eig, p_margin) = model.margins(&x);
            trace.push(TraceRow {
                iteration: iterations,
                stage,
                t,
                objective: model.objective(&x),
                gap: nu / t,
                decrement,
                step,
                lmi_min_eig,
                p_margin,
            });
            // centered, or as close as floating point allows
            if (decrement * decrement / 2.0 <= 1e-9 && step == 1.0) || !moved || !improved {
                break;
            }
        }
        let f = model.objective(&x);
        if nu / t <= opts.gap_abs + opts.gap_rel * f {
            status = SolverStatus::Optimal;
            break;
        }
        t *= opts.growth;
    }

    let (p, q) = model.unpack(&x);
    let a_hat = recover_a(&p, &q)?;
    let eig = p.clone().symmetric_eigen().eigenvalues;
    let cond_p = eig.max() / eig.min();
    Ok(SdpSolution {
        objective: model.objective(&x),
        a_hat,
        p,
        q,
        status,
        iterations,
        gap: nu / t,
        cond_p,
        trace,
    })
}

fn infeasible(n: usize) -> SdpSolution {
    SdpSolution {
        p: DMatrix::zeros(n, n),
        q: DMatrix::zeros(n, n),
        a_hat: DMatrix::zeros(n, n),
        objective: f64::NAN,
        status: SolverStatus::Infeasible,
        iterations: 0,
        gap: f64::INFINITY,
        cond_p: f64::NAN,
        trace: Vec::new(),
    }
}

/// `Â = QP⁻¹` from `P X = Qᵀ`, `Â = Xᵀ`.
fn recover_a(p: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let x = Cholesky::new(p.clone())
        .map(|c| c.solve(&q.transpose()))
        .or_else(|| p.clone().lu().solve(&q.transpose()))
        .ok_or_else(|| SidError::Numerical("P is numerically singular".into()))?;
    Ok(x.transpose())
}

struct Evaluation {
    value: f64,
    gradient: DVector<f64>,
    hessian: DMatrix<f64>,
}

/// Affine structure of the problem in `x = (svec P, vec Q)`.
struct Model {
    n: usize,
    floor: f64,
    /// Upper bound on `tr P`.
    cap: f64,
    /// Indicator of the diagonal entries of `P` within `x`.
    diag: DVector<f64>,
    /// `M(x) = Σ xᵢ Fᵢ`.
    f_basis: Vec<DMatrix<f64>>,
    /// `P(x) = Σ xᵢ Gᵢ` over the first `n(n+1)/2` coordinates.
    g_basis: Vec<DMatrix<f64>>,
    /// `vec(A*P − Q) = L x`; the objective is `‖Lx‖²`.
    l: DMatrix<f64>,
    lt_l: DMatrix<f64>,
}

impl Model {
    fn new(problem: &SdpProblem) -> Self {
        let n = problem.a_star.nrows();
        let lam = problem.region.lambda();
        let beta = problem.region.beta();
        let beta_t = beta.transpose();
        let np = n * (n + 1) / 2;
        let dimx = np + n * n;
        let mut f_basis = Vec::with_capacity(dimx);
        let mut g_basis = Vec::with_capacity(np);
        let mut l = DMatrix::zeros(n * n, dimx);
        let mut col = 0;
        for j in 0..n {
            for i in 0..=j {
                let mut e = DMatrix::zeros(n, n);
                e[(i, j)] = 1.0;
                e[(j, i)] = 1.0;
                f_basis.push(crate::linalg::kron(lam, &e));
                let ae = &problem.a_star * &e;
                l.column_mut(col).copy_from_slice(ae.as_slice());
                g_basis.push(e);
                col += 1;
            }
        }
        for j in 0..n {
            for i in 0..n {
                let mut e = DMatrix::zeros(n, n);
                e[(i, j)] = 1.0;
                let fq = crate::linalg::kron(beta, &e) + crate::linalg::kron(&beta_t, &e.transpose());
                f_basis.push(fq);
                l[(j * n + i, col)] = -1.0;
                col += 1;
            }
        }
        let lt_l = l.transpose() * &l;
        let mut diag = DVector::zeros(dimx);
        for j in 0..n {
            diag[j * (j + 1) / 2 + j] = 1.0;
        }
        let cap = TRACE_CAP * n as f64 * problem.p_floor;
        Self { n, floor: problem.p_floor, cap, diag, f_basis, g_basis, l, lt_l }
    }

    fn pack(&self, p: &DMatrix<f64>, q: &DMatrix<f64>) -> DVector<f64> {
        let mut x = Vec::with_capacity(self.f_basis.len());
        for j in 0..self.n {
            for i in 0..=j {
                x.push(p[(i, j)]);
            }
        }
        x.extend_from_slice(q.as_slice());
        DVector::from_vec(x)
    }

    fn unpack(&self, x: &DVector<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.n;
        let mut p = DMatrix::zeros(n, n);
        let mut k = 0;
        for j in 0..n {
            for i in 0..=j {
                p[(i, j)] = x[k];
                p[(j, i)] = x[k];
                k += 1;
            }
        }
        let q = DMatrix::from_column_slice(n, n, &x.as_slice()[k..]);
        (p, q)
    }

    fn objective(&self, x: &DVector<f64>) -> f64 {
        (&self.l * x).norm_squared()
    }

    fn lmi(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let size = self.f_basis[0].nrows();
        let mut m = DMatrix::zeros(size, size);
        for (xi, f) in x.iter().zip(&self.f_basis) {
            if *xi != 0.0 {
                m += f * *xi;
            }
        }
        symmetrize(&m)
    }

    fn p_slack(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let (p, _) = self.unpack(x);
        p - DMatrix::identity(self.n, self.n) * self.floor
    }

    fn margins(&self, x: &DVector<f64>) -> (f64, f64) {
        (sym_min_eig(&self.lmi(x)), sym_min_eig(&self.p_slack(x)))
    }

    /// Barrier objective, `None` outside the strictly feasible set.
    fn value(&self, x: &DVector<f64>, t: f64) -> Option<f64> {
        let cm = Cholesky::new(self.lmi(x))?;
        let cp = Cholesky::new(self.p_slack(x))?;
        let room = self.trace_room(x)?;
        Some(t * self.objective(x) - log_det(&cm) - log_det(&cp) - room.ln())
    }

    fn trace_room(&self, x: &DVector<f64>) -> Option<f64> {
        let room = self.cap - self.diag.dot(x);
        (room > 0.0).then_some(room)
    }

    fn evaluate(&self, x: &DVector<f64>, t: f64, hessian: bool) -> Option<Evaluation> {
        let cm = Cholesky::new(self.lmi(x))?;
        let cp = Cholesky::new(self.p_slack(x))?;
        let room = self.trace_room(x)?;
        let value = t * self.objective(x) - log_det(&cm) - log_det(&cp) - room.ln();
        let s = symmetrize(&cm.inverse());
        let w = symmetrize(&cp.inverse());
        let sf: Vec<DMatrix<f64>> = self.f_basis.iter().map(|f| &s * f).collect();
        let wg: Vec<DMatrix<f64>> = self.g_basis.iter().map(|g| &w * g).collect();
        let dimx = self.f_basis.len();
        let mut gradient = &self.lt_l * x * (2.0 * t);
        for i in 0..dimx {
            gradient[i] -= sf[i].trace();
        }
        for (i, wgi) in wg.iter().enumerate() {
            gradient[i] -= wgi.trace();
        }
        gradient += &self.diag / room;
        let mut h = &self.lt_l * (2.0 * t) + &self.diag * self.diag.transpose() / (room * room);
        if hessian {
            for i in 0..dimx {
                for j in 0..=i {
                    let mut v = trace_product(&sf[i], &sf[j]);
                    if i < wg.len() && j < wg.len() {
                        v += trace_product(&wg[i], &wg[j]);
                    }
                    h[(i, j)] += v;
                    if i != j {
                        h[(j, i)] += v;
                    }
                }
            }
        }
        Some(Evaluation { value, gradient, hessian: h })
    }
}

fn log_det(c: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * c.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}

/// `tr(A B)` without forming the product.
fn trace_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for k in 0..n {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

/// Newton step `−H⁻¹g` with Jacobi scaling, and the decrement `√(gᵀH⁻¹g)`.
fn newton_direction(h: &DMatrix<f64>, g: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let d = DVector::from_iterator(h.nrows(), h.diagonal().iter().map(|v| 1.0 / v.abs().max(1e-300).sqrt()));
    let hs = DMatrix::from_fn(h.nrows(), h.ncols(), |i, j| h[(i, j)] * d[i] * d[j]);
    let gs = g.component_mul(&d);
    // after scaling the diagonal is one, so a small ridge is a relative shift
    let ys = [0.0, 1e-12, 1e-10, 1e-8]
        .iter()
        .find_map(|&ridge| {
            let shifted = &hs + DMatrix::identity(hs.nrows(), hs.ncols()) * ridge;
            Cholesky::new(shifted).map(|c| c.solve(&gs))
        })
        .ok_or_else(|| SidError::Numerical("singular Newton system".into()))?;
    let dx = -ys.component_mul(&d);
    let dec2 = gs.dot(&ys).max(0.0);
    Ok((dx, dec2.sqrt()))
}
