//! Periodic mollification: every ε the profile is convolved with K_δ, and
//! in between it is advanced by sub-stepped Richtmyer Lax-Wendroff as a
//! stand-in for the classical smooth evolution.

use std::sync::OnceLock;

use super::SchemeConfig;
use crate::error::{Error, Result};
use crate::grid::{total_variation_all, GridFunction, SchemeId, SolutionHistory};
use crate::models::{estimate_mg, max_abs_speed, max_left_norm, FluxModel};
use crate::quad::Composite;

/// Unnormalized bump exp(−1/(1−x²)) on |x| < 1.
fn raw_bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// ∫ exp(−1/(1−x²)) dx over (−1, 1).
pub fn bump_norm() -> f64 {
    static NORM: OnceLock<f64> = OnceLock::new();
    *NORM.get_or_init(|| Composite::new(-1.0, 1.0, 256, 16).integrate(raw_bump))
}

/// Normalized kernel K with ∫K = 1.
pub fn bump(x: f64) -> f64 {
    raw_bump(x) / bump_norm()
}

/// ‖K‖∞ = K(0).
pub fn bump_sup() -> f64 {
    bump(0.0)
}

/// Discrete convolution with K_δ, exact for piecewise-constant data up to quadrature.
#[derive(Debug, Clone)]
pub struct Mollifier {
    pub delta: f64,
    pub dx: f64,
    /// Weights for offsets −reach..=reach.
    weights: Vec<f64>,
    reach: usize,
}

impl Mollifier {
    /// Weight k is (1/dx)∫K_δ(s)·max(0, dx − |s − k·dx|) ds, the cell average of
    /// K_δ * (indicator of the cell k places to the left).
    pub fn new(delta: f64, dx: f64) -> Self {
        let reach = (delta / dx).ceil() as usize + 1;
        let kd = |s: f64| bump(s / delta) / delta;
        let mut weights = Vec::with_capacity(2 * reach + 1);
        for k in -(reach as isize)..=reach as isize {
            let c = k as f64 * dx;
            let mut w = 0.0;
            for (lo, hi) in [(c - dx, c), (c, c + dx)] {
                let (lo, hi) = (lo.max(-delta), hi.min(delta));
                if hi > lo {
                    let rule = Composite::new(lo, hi, 8, 12);
                    w += rule.integrate(|s| kd(s) * (dx - (s - c).abs()).max(0.0)) / dx;
                }
            }
            weights.push(w);
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Mollifier { delta, dx, weights, reach }
    }

    pub fn apply(&self, g: &GridFunction) -> GridFunction {
        let n = g.n_comp;
        let cells = g.n_cells() as isize;
        let mut out = vec![0.0; g.values.len()];
        for i in 0..cells {
            for (idx, w) in self.weights.iter().enumerate() {
                let src = g.cell_clamped(i - (idx as isize - self.reach as isize));
                for k in 0..n {
                    out[i as usize * n + k] += w * src[k];
                }
            }
        }
        GridFunction { values: out, pairing: None, ..g.clone() }
    }
}

/// One Richtmyer two-step Lax-Wendroff step with constant extension.
fn lax_wendroff(model: &dyn FluxModel, g: &GridFunction, dt: f64) -> Result<GridFunction> {
    let n = g.n_comp;
    let cells = g.n_cells();
    let r = dt / g.mesh.dx;
    let flux = |u: &[f64]| model.flux(u);
    // half-step values at interfaces 0..=cells (ghosts on both sides)
    let mut half_flux = Vec::with_capacity((cells + 1) * n);
    for i in 0..=cells {
        let a = g.cell_clamped(i as isize - 1);
        let b = g.cell_clamped(i as isize);
        let (fa, fb) = (flux(a), flux(b));
        let mid: Vec<f64> = (0..n).map(|k| 0.5 * (a[k] + b[k]) - 0.5 * r * (fb[k] - fa[k])).collect();
        model.check_state(&mid)?;
        half_flux.extend(flux(&mid));
    }
    let mut out = g.values.clone();
    for j in 0..cells {
        for k in 0..n {
            out[j * n + k] -= r * (half_flux[(j + 1) * n + k] - half_flux[j * n + k]);
        }
    }
    GridFunction::new(g.mesh, n, out)
}

/// Largest time step ε for which the mollified gradients cannot blow up before
/// the next mollification.
fn admissible_eps(model: &dyn FluxModel, g0: &GridFunction, delta: f64) -> f64 {
    let tv = total_variation_all(g0);
    if tv == 0.0 {
        return f64::INFINITY;
    }
    let stride = (g0.n_cells() / 200).max(1);
    let mut states: Vec<Vec<f64>> = g0.cells().step_by(stride).map(|c| c.to_vec()).collect();
    states.push(g0.cell(g0.n_cells() - 1).to_vec());
    let n = g0.n_comp as f64;
    let mg = estimate_mg(model, &states);
    let lmax = max_left_norm(model, &states);
    let denom = n * n * mg * bump_sup() * tv * lmax;
    if denom > 0.0 {
        delta / denom
    } else {
        f64::INFINITY
    }
}

/// Frames u(t_m) = K_δ * u(t_m−); frame 0 is the mollified initial data.
pub fn smoothing_run(model: &dyn FluxModel, g0: &GridFunction, cfg: &SchemeConfig) -> Result<SolutionHistory> {
    let delta = cfg
        .smoothing_delta
        .ok_or_else(|| Error::SchemeConfig("smoothing scheme needs smoothing_delta".into()))?;
    let admissible = admissible_eps(model, g0, delta);
    if !(cfg.dt < admissible) {
        return Err(Error::SmoothingBlowUp { eps: cfg.dt, admissible });
    }
    let moll = Mollifier::new(delta, g0.mesh.dx);
    let mut current = moll.apply(g0);
    let stride = cfg.record_stride.max(1);
    let mut history = SolutionHistory::new(cfg.dt * stride as f64, 0.0, current.clone(), SchemeId::Smoothing)?;
    history.eps = cfg.dt.max(cfg.dx);
    for m in 1..=cfg.n_steps() {
        let speed = current.cells().map(|u| max_abs_speed(model, u)).fold(0.0, f64::max);
        let subs = ((speed * cfg.dt / (0.5 * g0.mesh.dx)).ceil() as usize).max(1);
        let h = cfg.dt / subs as f64;
        for _ in 0..subs {
            current = lax_wendroff(model, &current, h)?;
        }
        current = moll.apply(&current);
        if m % stride == 0 {
            history.push(current.clone())?;
        }
    }
    Ok(history)
}
