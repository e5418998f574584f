use serde::Serialize;

use super::PostprocessParams;
use crate::error::{Error, Result};
use crate::grid::{dist, GridFunction, SolutionHistory};

/// Flagged cell indices of each strip time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlagSet {
    pub times: Vec<f64>,
    pub cells: Vec<Vec<usize>>,
}

/// (ok, sup TV): ok iff every frame has total variation at most the cap.
pub fn check_tv_gate(history: &SolutionHistory, params: &PostprocessParams) -> (bool, f64) {
    let sup = history.sup_tv();
    (sup <= params.tv_cap, sup)
}

/// Prefix sums of interface jumps: `p[i]` is the variation across interfaces 1..i.
fn jump_prefix(frame: &GridFunction) -> Vec<f64> {
    let n = frame.n_cells();
    let mut p = vec![0.0; n + 1];
    for i in 1..=n {
        p[i] = p[i - 1] + frame.jump_at_interface(i);
    }
    p
}

fn window_tv(prefix: &[f64], lo: isize, hi: isize) -> f64 {
    let n = prefix.len() as isize - 1;
    let lo = lo.max(1);
    let hi = hi.min(n - 1);
    if hi < lo {
        0.0
    } else {
        prefix[hi as usize] - prefix[lo as usize - 1]
    }
}

/// The two one-sided window variations TV[x − σ, x + ε] and TV[x − ε, x + σ]
/// at the center of cell `i`, with the window ends snapped outward to interfaces.
pub fn flag_windows(frame: &GridFunction, prefix: &[f64], i: usize, sigma: f64, eps: f64) -> (f64, f64) {
    let mesh = &frame.mesh;
    let x = mesh.center(i);
    let left = window_tv(prefix, mesh.interface_floor(x - sigma), mesh.interface_ceil(x + eps));
    let right = window_tv(prefix, mesh.interface_floor(x - eps), mesh.interface_ceil(x + sigma));
    (left, right)
}

/// Cells whose center is a flagged point: both windows carry variation above Kσ.
pub fn flag_points(frame: &GridFunction, params: &PostprocessParams) -> Vec<usize> {
    let prefix = jump_prefix(frame);
    let threshold = params.k_flag * params.sigma_flag;
    (0..frame.n_cells())
        .filter(|&i| {
            let (l, r) = flag_windows(frame, &prefix, i, params.sigma_flag, params.eps);
            l.min(r) > threshold
        })
        .collect()
}

/// Flags at every strip time t_j, j = 0..=ν.
pub fn flag_strip_times(history: &SolutionHistory, params: &PostprocessParams) -> FlagSet {
    let nu = params.n_strips(history);
    let mut times = Vec::with_capacity(nu + 1);
    let mut cells = Vec::with_capacity(nu + 1);
    for j in 0..=nu {
        let t = params.strip_time(history, j);
        let m = history.frame_at(t);
        times.push(t);
        cells.push(flag_points(&history.frames[m], params));
    }
    FlagSet { times, cells }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnflaggedBound {
    pub lhs: f64,
    pub bound: f64,
    pub holds: bool,
}

/// On an interval [a, b] free of flagged cell centers, checks
/// |u(a) − u(b)| ≤ (1 + (b − a)/(σ + ε))·2σK.
pub fn verify_unflagged_bound(
    frame: &GridFunction,
    flags: &[usize],
    a: f64,
    b: f64,
    params: &PostprocessParams,
) -> Result<UnflaggedBound> {
    let mesh = &frame.mesh;
    if let Some(&cell) = flags.iter().find(|&&i| (a..=b).contains(&mesh.center(i))) {
        return Err(Error::FlaggedInside { cell });
    }
    let (s, k, e) = (params.sigma_flag, params.k_flag, params.eps);
    let lhs = dist(frame.value_at(a), frame.value_at(b));
    let bound = (1.0 + (b - a) / (s + e)) * 2.0 * s * k;
    Ok(UnflaggedBound { lhs, bound, holds: lhs <= bound + 1e-12 })
}

/// Maximal runs of unflagged cells, as inclusive index ranges.
pub fn unflagged_runs(n_cells: usize, flags: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for &f in flags.iter().chain(std::iter::once(&n_cells)) {
        if f > start {
            out.push((start, f - 1));
        }
        start = f + 1;
    }
    out
}
