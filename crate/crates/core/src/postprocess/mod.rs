//! Post-processing of a history into strips: the total-variation gate,
//! flagged points, shock tracing, trapezoid covers and the κ series.

mod cover;
mod flags;
mod params;
mod trace;

use std::io::Write;

use serde::Serialize;

pub use cover::{cover_strip, kappa_series, region_oscillation, StripCover};
pub use flags::{
    check_tv_gate, flag_points, flag_strip_times, flag_windows, unflagged_runs, verify_unflagged_bound, FlagSet,
    UnflaggedBound,
};
pub use params::{DetectionSettings, PostprocessParams};
pub use trace::{detect_shock_candidates, trace_shock, Candidate, Candidates, Rejection, ShockTrace, TraceAttempt};

use crate::error::Result;
use crate::grid::{fmt_real, SolutionHistory};

/// Everything produced by the three post-processing steps.
#[derive(Debug, Clone, Serialize)]
pub struct PostprocessOutput {
    pub params: PostprocessParams,
    pub tv_ok: bool,
    pub sup_tv: f64,
    pub flags: FlagSet,
    pub candidates: Vec<Candidates>,
    pub attempts: Vec<TraceAttempt>,
    pub covers: Vec<StripCover>,
}

impl PostprocessOutput {
    pub fn kappa(&self) -> Vec<(f64, f64)> {
        kappa_series(&self.covers)
    }

    /// Σ_j N′(j), the number of traced shock segments.
    pub fn n_traced(&self) -> usize {
        self.covers.iter().map(StripCover::n_traced).sum()
    }
}

/// Runs the gate, then flags, traces and covers every strip. When the gate
/// fails the later steps are skipped and their outputs are empty.
pub fn postprocess(history: &SolutionHistory, params: &PostprocessParams) -> Result<PostprocessOutput> {
    params.validate()?;
    let (tv_ok, sup_tv) = check_tv_gate(history, params);
    let mut out = PostprocessOutput {
        params: *params,
        tv_ok,
        sup_tv,
        flags: FlagSet { times: Vec::new(), cells: Vec::new() },
        candidates: Vec::new(),
        attempts: Vec::new(),
        covers: Vec::new(),
    };
    if !tv_ok {
        return Ok(out);
    }
    let mesh = *history.mesh();
    out.flags = flag_strip_times(history, params);
    out.candidates = out.flags.cells.iter().map(|f| detect_shock_candidates(&mesh, f, params)).collect();
    let nu = params.n_strips(history);
    for j in 0..nu {
        let mut traced = Vec::new();
        for &c in &out.candidates[j].traceable {
            let a = trace_shock(history, j, c, &out.candidates[j + 1].traceable, params)?;
            traced.extend(a.trace);
            out.attempts.push(a);
        }
        out.covers.push(cover_strip(history, j, &traced, params)?);
    }
    Ok(out)
}

/// CSV `t,x` of flagged points.
pub fn write_flags_csv<W: Write>(mut w: W, history: &SolutionHistory, flags: &FlagSet) -> Result<()> {
    writeln!(w, "t,x")?;
    let mesh = history.mesh();
    for (t, cells) in flags.times.iter().zip(&flags.cells) {
        for &i in cells {
            writeln!(w, "{},{}", fmt_real(*t), fmt_real(mesh.center(i)))?;
        }
    }
    Ok(())
}

/// CSV `j,t_lo,t_hi,x0,lambda,jump,osc_left,osc_right,accepted,reason`.
pub fn write_traces_csv<W: Write>(mut w: W, attempts: &[TraceAttempt]) -> Result<()> {
    writeln!(w, "j,t_lo,t_hi,x0,lambda,jump,osc_left,osc_right,accepted,reason")?;
    for a in attempts {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            a.j,
            fmt_real(a.t_lo),
            fmt_real(a.t_hi),
            fmt_real(a.x0),
            fmt_real(a.lambda),
            fmt_real(a.jump),
            fmt_real(a.osc_left),
            fmt_real(a.osc_right),
            a.trace.is_some(),
            a.rejection.map_or("", Rejection::name)
        )?;
    }
    Ok(())
}

/// CSV `j,k,base_lo,base_hi,kappa` with the oscillation of each trapezoid.
pub fn write_covers_csv<W: Write>(mut w: W, covers: &[StripCover]) -> Result<()> {
    writeln!(w, "j,k,base_lo,base_hi,kappa")?;
    for c in covers {
        for (k, (z, osc)) in c.trapezoids.iter().zip(&c.oscillations).enumerate() {
            writeln!(w, "{},{},{},{},{}", c.j, k, fmt_real(z.base_lo), fmt_real(z.base_hi), fmt_real(*osc))?;
        }
    }
    Ok(())
}

/// CSV `t,kappa`.
pub fn write_kappa_csv<W: Write>(mut w: W, kappa: &[(f64, f64)]) -> Result<()> {
    writeln!(w, "t,kappa")?;
    for (t, k) in kappa {
        writeln!(w, "{},{}", fmt_real(*t), fmt_real(*k))?;
    }
    Ok(())
}
