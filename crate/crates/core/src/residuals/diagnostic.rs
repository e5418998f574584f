use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{dist, SolutionHistory, Trapezoid};
use crate::models::FluxModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearComparison {
    /// ∫|u(t_hi) − w(t_hi)| over the upper edge of the region.
    pub lhs: f64,
    /// (τ·sup|u − u(t_lo, ξ)| + τ ε^(1/3) + ε^(2/3))·sup TV, with unit constant.
    pub rhs: f64,
    /// lhs / rhs, the constant needed for the estimate to hold.
    pub ratio: f64,
}

/// Compares the history on a trapezoid with the solution w of the system
/// frozen at u(t_lo, ξ): w_t + A w_x = 0 with A = Df(u(t_lo, ξ)), started
/// from u(t_lo). Each characteristic component ℓ_i·u is shifted by λ_i τ.
///
/// Pass the region with the inset already applied to its upper edge.
pub fn linear_comparison_diagnostic(
    history: &SolutionHistory,
    model: &dyn FluxModel,
    region: &Trapezoid,
    xi: f64,
) -> Result<LinearComparison> {
    if !(region.base_lo <= xi && xi <= region.base_hi) {
        return Err(Error::InvalidRegion(format!(
            "freeze point {xi} outside base [{}, {}]",
            region.base_lo, region.base_hi
        )));
    }
    let m0 = history
        .exact_frame(region.t_lo)
        .ok_or_else(|| Error::InvalidRegion(format!("t_lo = {} is not a frame time", region.t_lo)))?;
    let m1 = history
        .exact_frame(region.t_hi)
        .ok_or_else(|| Error::InvalidRegion(format!("t_hi = {} is not a frame time", region.t_hi)))?;
    let mesh = *history.mesh();
    let (p, q) = region.upper_edge();
    let (p, q) = (p.max(mesh.x_min), q.min(mesh.x_max));
    if !(q > p) {
        return Err(Error::EmptyRegion);
    }
    let u0 = &history.frames[m0];
    let u1 = &history.frames[m1];
    let frozen = u0.value_at(xi).to_vec();
    let eig = model.eigen(&frozen);
    let n = history.n_comp();
    let tau = region.t_hi - region.t_lo;

    let mut cuts: Vec<f64> = vec![p, q];
    let mut add_interfaces = |shift: f64| {
        let lo = mesh.interface_floor(p - shift).max(0);
        let hi = mesh.interface_ceil(q - shift).min(mesh.n_cells as isize);
        for i in lo..=hi {
            let x = mesh.interface(i as usize) + shift;
            if x > p && x < q {
                cuts.push(x);
            }
        }
    };
    add_interfaces(0.0);
    for &l in &eig.values {
        add_interfaces(l * tau);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let w_at = |x: f64| -> Vec<f64> {
        let mut w = vec![0.0; n];
        for i in 0..n {
            let src = u0.value_at(x - eig.values[i] * tau);
            let c: f64 = eig.left[i].iter().zip(src).map(|(a, b)| a * b).sum();
            for (wk, rk) in w.iter_mut().zip(&eig.right[i]) {
                *wk += c * rk;
            }
        }
        w
    };
    let lhs: f64 = cuts
        .windows(2)
        .map(|s| {
            let x = 0.5 * (s[0] + s[1]);
            (s[1] - s[0]) * dist(u1.value_at(x), &w_at(x))
        })
        .sum();

    let mut osc: f64 = 0.0;
    let mut any = false;
    for m in history.frames_in(region.t_lo, region.t_hi) {
        for i in region.cell_range_at(&mesh, history.times[m]) {
            any = true;
            osc = osc.max(dist(history.frames[m].cell(i), &frozen));
        }
    }
    if !any {
        return Err(Error::EmptyRegion);
    }
    let eps = history.eps();
    let tv = history.sup_tv_between(region.t_lo, region.t_hi);
    let rhs = (tau * osc + tau * eps.cbrt() + eps.powf(2.0 / 3.0)) * tv;
    let ratio = if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(LinearComparison { lhs, rhs, ratio })
}
