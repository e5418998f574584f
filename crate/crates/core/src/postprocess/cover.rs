use serde::Serialize;

use super::{PostprocessParams, ShockTrace};
use crate::error::{Error, Result};
use crate::grid::{component_ranges, SolutionHistory, Trapezoid};

/// Cover of one strip: traced shock enclosures plus regular trapezoids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripCover {
    pub j: usize,
    pub t_lo: f64,
    pub t_hi: f64,
    pub traced: Vec<ShockTrace>,
    pub trapezoids: Vec<Trapezoid>,
    /// Oscillation of each trapezoid.
    pub oscillations: Vec<f64>,
    pub kappa_j: f64,
}

impl StripCover {
    pub fn n_traced(&self) -> usize {
        self.traced.len()
    }
}

/// Oscillation over the cells inside a region, 0 if it holds none.
pub fn region_oscillation(history: &SolutionHistory, region: &Trapezoid) -> f64 {
    component_ranges(history, region).map_or(0.0, |r| r.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Populated extent of the frames spanning [t_lo, t_hi].
fn strip_extent(history: &SolutionHistory, t_lo: f64, t_hi: f64) -> Option<(f64, f64)> {
    history
        .frames_in(t_lo, t_hi)
        .filter_map(|m| history.frames[m].populated_extent(1e-12))
        .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
}

/// Splits a finite segment into the largest number of equal pieces no shorter than `w`.
fn split(p: f64, q: f64, w: f64) -> Vec<f64> {
    let m = (((q - p) / w).floor() as usize).max(1);
    (0..=m).map(|k| if k == m { q } else { p + (q - p) * k as f64 / m as f64 }).collect()
}

/// Upper-edge breakpoints for a free segment between enclosures (or ±∞).
fn segment_edges(p: f64, q: f64, extent: Option<(f64, f64)>, w: f64) -> Vec<f64> {
    match (p.is_finite(), q.is_finite()) {
        (true, true) => split(p, q, w),
        (false, true) => {
            // infinite piece up to the populated extent, then regular pieces
            let s = extent.map_or(q, |(lo, _)| lo.min(q));
            if q - s < w {
                vec![p, q]
            } else {
                let mut e = vec![p];
                e.extend(split(s, q, w));
                e
            }
        }
        (true, false) => {
            let s = extent.map_or(p, |(_, hi)| hi.max(p));
            if s - p < w {
                vec![p, q]
            } else {
                let mut e = split(p, s, w);
                e.push(q);
                e
            }
        }
        (false, false) => match extent {
            None => vec![p, q],
            Some((lo, hi)) => {
                if hi - lo < w {
                    let mid = 0.5 * (lo + hi);
                    vec![p, mid, q]
                } else {
                    let mut e = vec![p];
                    e.extend(split(lo, hi, w));
                    e.push(q);
                    e
                }
            }
        },
    }
}

/// Covers strip j outside the traced enclosures with trapezoids whose upper
/// edges [p, q] partition the rest of the line; the base is
/// [p − hλ⁺ − ε^(2/3), q − hλ⁻ + ε^(2/3)]. Interior upper edges have length
/// at least h(λ⁺ − λ⁻) + 2ε^(2/3), so trapezoids two apart never meet.
pub fn cover_strip(
    history: &SolutionHistory,
    j: usize,
    traced: &[ShockTrace],
    params: &PostprocessParams,
) -> Result<StripCover> {
    let t_lo = params.strip_time(history, j);
    let t_hi = t_lo + params.h;
    let mesh = history.mesh();
    let w = params.min_edge() * (1.0 + 1e-9);
    if mesh.x_max - mesh.x_min < w {
        return Err(Error::StripTooNarrow { strip: j });
    }
    let mut traced: Vec<ShockTrace> = traced.to_vec();
    traced.sort_by(|a, b| a.x0.total_cmp(&b.x0));
    let extent = strip_extent(history, t_lo, t_hi);

    // free segments between enclosure upper edges
    let mut segments = Vec::new();
    let mut cursor = f64::NEG_INFINITY;
    for t in &traced {
        let (a, b) = t.enclosing.upper_edge();
        if a > cursor {
            segments.push((cursor, a));
        }
        cursor = cursor.max(b);
    }
    segments.push((cursor, f64::INFINITY));

    let (lp, lm, e) = (params.lambda_plus, params.lambda_minus, params.delta);
    let h = params.h;
    let mut trapezoids = Vec::new();
    for (p, q) in segments {
        let edges = segment_edges(p, q, extent, w);
        for s in edges.windows(2) {
            let c = s[0] - h * lp - e;
            let d = s[1] - h * lm + e;
            trapezoids.push(Trapezoid::new(t_lo, t_hi, c, d, lp, lm, e)?);
        }
    }
    let oscillations: Vec<f64> = trapezoids.iter().map(|t| region_oscillation(history, t)).collect();
    let kappa_j = oscillations.iter().copied().fold(0.0, f64::max);
    Ok(StripCover { j, t_lo, t_hi, traced, trapezoids, oscillations, kappa_j })
}

/// κ(t): one (t_j, κ_j) per strip.
pub fn kappa_series(covers: &[StripCover]) -> Vec<(f64, f64)> {
    covers.iter().map(|c| (c.t_lo, c.kappa_j)).collect()
}
