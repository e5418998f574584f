use super::SPEED_TOL;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::models::FluxModel;

#[derive(Debug, Clone)]
pub struct ImplicitStep {
    pub frame: GridFunction,
    /// Residual evaluations performed, counting the initial guess.
    pub iterations: usize,
    pub residual: f64,
}

/// Backward Euler step with default Newton tolerance 1e−12 and 50 iterations.
pub fn backward_euler_step(model: &dyn FluxModel, g: &GridFunction, dt: f64) -> Result<ImplicitStep> {
    backward_euler_step_with(model, g, dt, 1e-12, 50)
}

/// Solves V = U − dt·D⁻f(V) by damped Newton, D⁻ the upwind difference with
/// constant extension on the left.
pub fn backward_euler_step_with(
    model: &dyn FluxModel,
    g: &GridFunction,
    dt: f64,
    tol: f64,
    max_iter: usize,
) -> Result<ImplicitStep> {
    for (i, u) in g.cells().enumerate() {
        model.check_state(u)?;
        if let Some(&l) = model.eigenvalues(u).iter().find(|&&l| l < -SPEED_TOL) {
            return Err(Error::NonPositiveSpeed { cell: i, speed: l });
        }
    }
    let n = g.n_comp;
    let cells = g.n_cells();
    let r = dt / g.mesh.dx;
    let residual_of = |v: &[f64], flux: &mut [f64], res: &mut [f64]| -> Option<f64> {
        for j in 0..cells {
            let s = &v[j * n..(j + 1) * n];
            if model.check_state(s).is_err() {
                return None;
            }
            model.flux_into(s, &mut flux[j * n..(j + 1) * n]);
        }
        let mut worst: f64 = 0.0;
        for j in 0..cells {
            for k in 0..n {
                let left = if j == 0 { flux[k] } else { flux[(j - 1) * n + k] };
                let e = v[j * n + k] - g.values[j * n + k] + r * (flux[j * n + k] - left);
                res[j * n + k] = e;
                worst = worst.max(e.abs());
            }
        }
        worst.is_finite().then_some(worst)
    };

    let mut v = g.values.clone();
    let mut flux = vec![0.0; v.len()];
    let mut res = vec![0.0; v.len()];
    let mut norm = residual_of(&v, &mut flux, &mut res).expect("input states checked");
    let mut iterations = 1;
    let mut delta = vec![0.0; v.len()];
    let mut trial = vec![0.0; v.len()];
    let mut trial_res = vec![0.0; v.len()];
    while norm > tol {
        if iterations >= max_iter {
            return Err(Error::ImplicitDiverged { iterations, residual: norm });
        }
        // block lower-bidiagonal solve J δ = −F
        let mut prev_jac: Vec<f64> = Vec::new();
        for j in 0..cells {
            let s = &v[j * n..(j + 1) * n];
            let jac = model.jacobian(s);
            let mut rhs: Vec<f64> = res[j * n..(j + 1) * n].iter().map(|e| -e).collect();
            let mut a = vec![0.0; n * n];
            for p in 0..n {
                a[p * n + p] = 1.0;
            }
            if j > 0 {
                for p in 0..n {
                    for q in 0..n {
                        a[p * n + q] += r * jac[p * n + q];
                    }
                }
                for p in 0..n {
                    let acc: f64 = (0..n).map(|q| prev_jac[p * n + q] * delta[(j - 1) * n + q]).sum();
                    rhs[p] += r * acc;
                }
            }
            let x = solve_dense(&mut a, &mut rhs, n).ok_or(Error::ImplicitDiverged {
                iterations,
                residual: norm,
            })?;
            delta[j * n..(j + 1) * n].copy_from_slice(&x);
            prev_jac = jac;
        }
        let mut step = 1.0;
        loop {
            for ((t, a), d) in trial.iter_mut().zip(&v).zip(&delta) {
                *t = a + step * d;
            }
            if let Some(tn) = residual_of(&trial, &mut flux, &mut trial_res) {
                if tn < norm || tn <= tol {
                    std::mem::swap(&mut v, &mut trial);
                    std::mem::swap(&mut res, &mut trial_res);
                    norm = tn;
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-10 {
                return Err(Error::ImplicitDiverged { iterations, residual: norm });
            }
        }
        iterations += 1;
    }
    Ok(ImplicitStep {
        frame: GridFunction::new(g.mesh, n, v)?.with_pairing(g.pairing),
        iterations,
        residual: norm,
    })
}

/// Gaussian elimination with partial pivoting on a row-major n×n system.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs()))?;
        if a[p * n + c].abs() < 1e-300 {
            return None;
        }
        if p != c {
            for k in 0..n {
                a.swap(p * n + k, c * n + k);
            }
            b.swap(p, c);
        }
        for i in c + 1..n {
            let f = a[i * n + c] / a[c * n + c];
            for k in c..n {
                a[i * n + k] -= f * a[c * n + k];
            }
            b[i] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i * n + k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i * n + i];
    }
    Some(x)
}
