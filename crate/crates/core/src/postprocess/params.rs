use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::SolutionHistory;
use crate::models::FluxModel;

/// User-chosen detection thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionSettings {
    /// Window half-width σ of the flag test.
    pub sigma_flag: f64,
    /// Slope threshold K of the flag test.
    pub k_flag: f64,
    /// Oscillation cap κ′ beside a traced shock.
    pub kappa_prime: f64,
    /// Smallest traced jump.
    pub sigma_min: f64,
    /// Total variation cap δ₀.
    pub tv_cap: f64,
    /// Constant K₁ of the large-jump advisory.
    pub k1: f64,
}

impl DetectionSettings {
    /// σ = 0.0063, K = 25, κ′ = 0.1, σ_min = 0.4 as in the p-system interaction example.
    pub fn interaction_example() -> Self {
        DetectionSettings { sigma_flag: 0.0063, k_flag: 25.0, kappa_prime: 0.1, sigma_min: 0.4, tv_cap: 10.0, k1: 1.0 }
    }
}

/// Everything the post-processing steps need, derived from a history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PostprocessParams {
    pub eps: f64,
    /// Strip height, a multiple of the frame spacing.
    pub h: f64,
    pub rho: f64,
    pub delta: f64,
    pub sigma_flag: f64,
    pub k_flag: f64,
    pub kappa_prime: f64,
    pub sigma_min: f64,
    pub tv_cap: f64,
    pub k1: f64,
    pub c0: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    /// Frame spacing of the history the parameters were derived for.
    pub frame_dt: f64,
}

/// Largest multiple of `step` not above `x` (with snapping).
fn floor_to(x: f64, step: f64) -> f64 {
    (x / step + 1e-9).floor() * step
}

fn is_multiple(x: f64, step: f64) -> bool {
    let r = x / step;
    (r - r.round()).abs() <= 1e-9 * r.abs().max(1.0)
}

impl PostprocessParams {
    /// h ≈ ε^(1/3) rounded down to a multiple of ε (or of the frame spacing when
    /// multiples of ε are not frame times), ρ = h, δ = ε^(2/3).
    pub fn for_history(history: &SolutionHistory, model: &dyn FluxModel, s: DetectionSettings) -> Result<Self> {
        let eps = history.eps();
        let target = eps.cbrt();
        let mut h = floor_to(target, eps);
        if !is_multiple(h, history.dt) || h <= 0.0 {
            h = floor_to(target, history.dt);
        }
        let (lambda_minus, lambda_plus) = model.speed_bounds();
        let p = PostprocessParams {
            eps,
            h,
            rho: h,
            delta: eps.powf(2.0 / 3.0),
            sigma_flag: s.sigma_flag,
            k_flag: s.k_flag,
            kappa_prime: s.kappa_prime,
            sigma_min: s.sigma_min,
            tv_cap: s.tv_cap,
            k1: s.k1,
            c0: 0.5,
            lambda_minus,
            lambda_plus,
            frame_dt: history.dt,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let target = self.eps.cbrt();
        if !(self.h >= self.c0 * target * (1.0 - 1e-12) && self.h <= target * (1.0 + 1e-12)) {
            return Err(Error::Params(format!(
                "strip height h = {} outside [{}, {}]",
                self.h,
                self.c0 * target,
                target
            )));
        }
        if !is_multiple(self.h, self.frame_dt) {
            return Err(Error::Params(format!("h = {} is not a multiple of the frame spacing {}", self.h, self.frame_dt)));
        }
        if !(self.sigma_flag > self.eps) {
            return Err(Error::Params(format!("sigma_flag = {} must exceed eps = {}", self.sigma_flag, self.eps)));
        }
        if !(self.k_flag > 0.0 && self.rho > 0.0 && self.delta > 0.0 && self.kappa_prime >= 0.0) {
            return Err(Error::Params("K, rho, delta must be positive and kappa' nonnegative".into()));
        }
        if !(self.lambda_plus >= self.lambda_minus) {
            return Err(Error::Params("speed bounds out of order".into()));
        }
        Ok(())
    }

    /// True when σ_min is below K₁(2ε^(1/3) + 2κ′)^(1/3), so the sharper
    /// shock estimate is not available. Advisory only.
    pub fn jump_advisory(&self) -> bool {
        self.sigma_min < self.k1 * (2.0 * self.eps.cbrt() + 2.0 * self.kappa_prime).cbrt()
    }

    /// Number of whole strips ν = ⌊T/h⌋.
    pub fn n_strips(&self, history: &SolutionHistory) -> usize {
        let span = history.t_final() - history.t0;
        ((span / self.h) + 1e-9).floor() as usize
    }

    pub fn strip_time(&self, history: &SolutionHistory, j: usize) -> f64 {
        history.t0 + j as f64 * self.h
    }

    /// Minimum upper-edge length h(λ⁺ − λ⁻) + 2ε^(2/3) of an interior cover trapezoid.
    pub fn min_edge(&self) -> f64 {
        self.h * (self.lambda_plus - self.lambda_minus) + 2.0 * self.delta
    }
}
