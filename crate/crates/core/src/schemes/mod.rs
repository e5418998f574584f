//! The four approximate-solution generators: upwind Godunov, staggered
//! Lax-Friedrichs, backward Euler and periodic mollification.

mod backward_euler;
mod godunov;
mod lax_friedrichs;
mod smoothing;

pub use backward_euler::{backward_euler_step, backward_euler_step_with, ImplicitStep};
pub use godunov::godunov_step;
pub use lax_friedrichs::{lax_friedrichs_step, pair_project};
pub use smoothing::{bump, bump_norm, bump_sup, smoothing_run, Mollifier};

pub use crate::grid::SchemeId;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, SolutionHistory};
use crate::models::{validate_entropy_pair, FluxModel};

/// Tolerance for the Courant-number and speed-sign checks.
pub(crate) const SPEED_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub scheme_id: SchemeId,
    pub dx: f64,
    pub dt: f64,
    pub t_final: f64,
    pub cfl_guard: f64,
    /// Mollifier radius δ (smoothing scheme only).
    pub smoothing_delta: Option<f64>,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Keep every k-th frame in the history.
    pub record_stride: usize,
}

impl SchemeConfig {
    pub fn new(scheme_id: SchemeId, dx: f64, dt: f64, t_final: f64) -> Self {
        SchemeConfig {
            scheme_id,
            dx,
            dt,
            t_final,
            cfl_guard: 1.0,
            smoothing_delta: None,
            newton_tol: 1e-12,
            newton_max_iter: 50,
            record_stride: 1,
        }
    }

    pub fn validate(&self, model: &dyn FluxModel) -> Result<()> {
        let bad = |m: String| Err(Error::SchemeConfig(m));
        if !(self.dx > 0.0 && self.dt > 0.0 && self.t_final > 0.0) {
            return bad(format!(
                "dx, dt, t_final must be positive (got {}, {}, {})",
                self.dx, self.dt, self.t_final
            ));
        }
        if !(self.cfl_guard > 0.0 && self.cfl_guard <= 1.0) {
            return bad(format!("cfl_guard must lie in (0, 1], got {}", self.cfl_guard));
        }
        if self.record_stride == 0 {
            return bad("record_stride must be positive".into());
        }
        let (lo, hi) = model.speed_bounds();
        let r = self.dt / self.dx;
        let courant = match self.scheme_id {
            SchemeId::Godunov | SchemeId::BackwardEuler => hi * r,
            SchemeId::LaxFriedrichs => lo.abs().max(hi.abs()) * r,
            SchemeId::Smoothing | SchemeId::Exact => 0.0,
        };
        if courant > self.cfl_guard * (1.0 + SPEED_TOL) {
            return bad(format!(
                "courant number {courant} exceeds cfl_guard {} for {}",
                self.cfl_guard,
                self.scheme_id.name()
            ));
        }
        match self.scheme_id {
            SchemeId::Smoothing => match self.smoothing_delta {
                Some(d) if d > self.dx => {}
                Some(d) => return bad(format!("smoothing_delta {d} must exceed dx {}", self.dx)),
                None => return bad("smoothing scheme needs smoothing_delta".into()),
            },
            SchemeId::Exact => return bad("the exact scheme id cannot be run".into()),
            _ => {}
        }
        if self.scheme_id == SchemeId::BackwardEuler && self.newton_max_iter == 0 {
            return bad("newton_max_iter must be positive".into());
        }
        Ok(())
    }

    /// Number of time steps with m·dt ≤ t_final.
    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt + 1e-9).floor() as usize
    }
}

/// Runs the configured scheme from `g0` and returns frames at t_m ≤ t_final.
pub fn run(model: &dyn FluxModel, g0: &GridFunction, cfg: &SchemeConfig) -> Result<SolutionHistory> {
    cfg.validate(model)?;
    validate_entropy_pair(model, 64, 0x5eed)?;
    if g0.n_comp != model.n_comp() {
        return Err(Error::ComponentMismatch { left: g0.n_comp, right: model.n_comp() });
    }
    if (g0.mesh.dx - cfg.dx).abs() > 1e-9 * cfg.dx {
        return Err(Error::SchemeConfig(format!(
            "initial mesh dx {} differs from configured dx {}",
            g0.mesh.dx, cfg.dx
        )));
    }
    for u in g0.cells() {
        model.check_state(u)?;
    }
    if cfg.scheme_id == SchemeId::Smoothing {
        return smoothing_run(model, g0, cfg);
    }
    let start = match cfg.scheme_id {
        SchemeId::LaxFriedrichs => pair_project(g0),
        _ => g0.clone(),
    };
    let stride = cfg.record_stride;
    let mut history = SolutionHistory::new(cfg.dt * stride as f64, 0.0, start.clone(), cfg.scheme_id)?;
    history.eps = cfg.dt.max(cfg.dx);
    let mut current = start;
    for m in 1..=cfg.n_steps() {
        current = match cfg.scheme_id {
            SchemeId::Godunov => godunov_step(model, &current, cfg.dt)?,
            SchemeId::LaxFriedrichs => lax_friedrichs_step(model, &current, cfg.dt)?,
            SchemeId::BackwardEuler => {
                backward_euler_step_with(model, &current, cfg.dt, cfg.newton_tol, cfg.newton_max_iter)?.frame
            }
            SchemeId::Smoothing | SchemeId::Exact => unreachable!("handled above"),
        };
        if m % stride == 0 {
            history.push(current.clone())?;
        }
    }
    Ok(history)
}

/// Checks that every eigenvalue at every cell state lies in [0, dx/dt].
pub(crate) fn check_upwind_cfl(model: &dyn FluxModel, g: &GridFunction, dt: f64) -> Result<()> {
    let r = dt / g.mesh.dx;
    for (i, u) in g.cells().enumerate() {
        model.check_state(u)?;
        for l in model.eigenvalues(u) {
            let courant = l * r;
            if !(courant >= -SPEED_TOL && courant <= 1.0 + SPEED_TOL) {
                return Err(Error::CflViolated { cell: i, courant, limit: 1.0 });
            }
        }
    }
    Ok(())
}
