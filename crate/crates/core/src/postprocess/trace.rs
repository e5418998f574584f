use serde::Serialize;

use super::{region_oscillation, PostprocessParams};
use crate::error::Result;
use crate::grid::{dist, Mesh, SolutionHistory, Trapezoid};

/// A cluster of flagged cells, stored by its extreme cell centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub a: f64,
    pub b: f64,
}

impl Candidate {
    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Candidates {
    /// Narrow, isolated clusters that may locate a shock.
    pub traceable: Vec<Candidate>,
    /// Clusters that are too wide or have flags within ρ.
    pub untraceable: Vec<Candidate>,
}

/// Groups adjacent flagged cells into clusters and sorts them by the width
/// (≤ δ) and isolation (no other flag within ρ) conditions.
pub fn detect_shock_candidates(mesh: &Mesh, flags: &[usize], params: &PostprocessParams) -> Candidates {
    let mut clusters: Vec<Candidate> = Vec::new();
    let mut i = 0;
    while i < flags.len() {
        let mut k = i;
        while k + 1 < flags.len() && flags[k + 1] == flags[k] + 1 {
            k += 1;
        }
        clusters.push(Candidate { a: mesh.center(flags[i]), b: mesh.center(flags[k]) });
        i = k + 1;
    }
    let tol = 1e-9 * mesh.dx;
    let mut out = Candidates::default();
    for (n, c) in clusters.iter().enumerate() {
        let narrow = c.b - c.a <= params.delta + tol;
        let left_clear = n == 0 || clusters[n - 1].b < c.a - params.rho - tol;
        let right_clear = n + 1 == clusters.len() || clusters[n + 1].a > c.b + params.rho + tol;
        if narrow && left_clear && right_clear {
            out.traceable.push(*c);
        } else {
            out.untraceable.push(*c);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    NoMatch,
    OscillationTooBig,
    JumpTooSmall,
}

impl Rejection {
    pub fn name(self) -> &'static str {
        match self {
            Rejection::NoMatch => "no_match",
            Rejection::OscillationTooBig => "oscillation_too_big",
            Rejection::JumpTooSmall => "jump_too_small",
        }
    }
}

/// A shock followed across one strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShockTrace {
    pub j: usize,
    pub x0: f64,
    pub lambda: f64,
    /// Γ: |x − x₀ − λ(t − t_j)| ≤ δ.
    pub gamma_region: Trapezoid,
    /// The trapezoid enclosing the shock and both side domains.
    pub enclosing: Trapezoid,
    pub jump_size: f64,
    pub side_oscillations: (f64, f64),
}

/// Outcome of one tracing attempt, accepted or not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceAttempt {
    pub j: usize,
    pub t_lo: f64,
    pub t_hi: f64,
    pub candidate: Candidate,
    pub x0: f64,
    pub lambda: f64,
    pub jump: f64,
    pub osc_left: f64,
    pub osc_right: f64,
    pub trace: Option<ShockTrace>,
    pub rejection: Option<Rejection>,
}

/// Tries to follow `candidate` at t_j to a traceable candidate at t_{j+1}
/// inside [a + λ⁻h, b + λ⁺h], then tests the side oscillations against κ′
/// and the jump |u(t_j, x₀ + δ) − u(t_j, x₀ − δ)| against σ_min.
pub fn trace_shock(
    history: &SolutionHistory,
    j: usize,
    candidate: Candidate,
    next: &[Candidate],
    params: &PostprocessParams,
) -> Result<TraceAttempt> {
    let PostprocessParams { h, rho, delta, lambda_minus: lm, lambda_plus: lp, .. } = *params;
    let t_lo = params.strip_time(history, j);
    let t_hi = t_lo + h;
    let x0 = candidate.center();
    let mut attempt = TraceAttempt {
        j,
        t_lo,
        t_hi,
        candidate,
        x0,
        lambda: f64::NAN,
        jump: f64::NAN,
        osc_left: f64::NAN,
        osc_right: f64::NAN,
        trace: None,
        rejection: None,
    };
    let tol = 1e-9 * history.mesh().dx;
    let (lo, hi) = (candidate.a + lm * h - tol, candidate.b + lp * h + tol);
    let matched = next
        .iter()
        .filter(|c| c.a >= lo && c.b <= hi)
        .min_by(|p, q| {
            (p.center() - x0).abs().total_cmp(&(q.center() - x0).abs()).then(p.center().total_cmp(&q.center()))
        });
    let Some(m) = matched else {
        attempt.rejection = Some(Rejection::NoMatch);
        return Ok(attempt);
    };
    let lambda = ((m.center() - x0) / h).clamp(lm, lp);
    attempt.lambda = lambda;

    let spread = (lp - lm) * h;
    let a_prime = x0 - rho - delta - spread;
    let b_prime = x0 + rho + delta + spread;
    let left = Trapezoid::new(t_lo, t_hi, a_prime, x0 - delta, lp, lambda, 0.0)?;
    let right = Trapezoid::new(t_lo, t_hi, x0 + delta, b_prime, lambda, lm, 0.0)?;
    attempt.osc_left = region_oscillation(history, &left);
    attempt.osc_right = region_oscillation(history, &right);
    let frame = &history.frames[history.frame_at(t_lo)];
    attempt.jump = dist(frame.value_at(x0 + delta), frame.value_at(x0 - delta));

    if attempt.osc_left > params.kappa_prime || attempt.osc_right > params.kappa_prime {
        attempt.rejection = Some(Rejection::OscillationTooBig);
    } else if attempt.jump < params.sigma_min {
        attempt.rejection = Some(Rejection::JumpTooSmall);
    } else {
        attempt.trace = Some(ShockTrace {
            j,
            x0,
            lambda,
            gamma_region: Trapezoid::new(t_lo, t_hi, x0 - delta, x0 + delta, lambda, lambda, 0.0)?,
            enclosing: Trapezoid::new(t_lo, t_hi, a_prime, b_prime, lp, lm, 0.0)?,
            jump_size: attempt.jump,
            side_oscillations: (attempt.osc_left, attempt.osc_right),
        });
    }
    Ok(attempt)
}
