//! Uniform-grid state containers and the BV/oscillation calculus.
//!
//! A [`GridFunction`] is a piecewise-constant vector-valued state on a
//! uniform mesh. Outside the mesh it is extended by its end values, so
//! total variation and L¹ distances never see the far field.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when snapping coordinates to mesh interfaces.
const SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub n_cells: usize,
}

impl Mesh {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if n_cells == 0 || !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidMesh(format!(
                "need finite x_min < x_max and n_cells > 0, got [{x_min}, {x_max}] with {n_cells}"
            )));
        }
        Ok(Mesh { x_min, x_max, dx: (x_max - x_min) / n_cells as f64, n_cells })
    }

    /// Mesh of width `dx`; the extent must be an integer number of cells.
    pub fn with_dx(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::InvalidMesh(format!("dx must be positive, got {dx}")));
        }
        let cells = (x_max - x_min) / dx;
        let n = cells.round();
        if n < 1.0 || ((cells - n) / cells).abs() > 1e-9 {
            return Err(Error::InvalidMesh(format!(
                "extent {} is not a whole number of cells of width {dx}",
                x_max - x_min
            )));
        }
        Mesh::new(x_min, x_max, n as usize)
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    /// Position of interface `i`; interface 0 is `x_min`, interface `n_cells` is `x_max`.
    pub fn interface(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    /// Cell containing `x`, clamped to the mesh.
    pub fn cell_of(&self, x: f64) -> usize {
        let s = ((x - self.x_min) / self.dx).floor();
        if s < 0.0 {
            0
        } else {
            (s as usize).min(self.n_cells - 1)
        }
    }

    /// Index of the first interface at or right of `x` (with snapping tolerance).
    pub fn interface_ceil(&self, x: f64) -> isize {
        ((x - self.x_min) / self.dx - SNAP).ceil() as isize
    }

    /// Index of the last interface at or left of `x` (with snapping tolerance).
    pub fn interface_floor(&self, x: f64) -> isize {
        ((x - self.x_min) / self.dx + SNAP).floor() as isize
    }

    pub fn same_as(&self, other: &Mesh) -> bool {
        self.n_cells == other.n_cells
            && (self.x_min - other.x_min).abs() <= 1e-12 * self.dx
            && (self.dx - other.dx).abs() <= 1e-12 * self.dx
    }
}

/// Which neighbouring primal cells share a value on a staggered Lax-Friedrichs frame.
///
/// `Even` pairs cells (2k, 2k+1); `Odd` pairs (2k-1, 2k), leaving cell 0 alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pairing {
    Even,
    Odd,
}

impl Pairing {
    pub fn flipped(self) -> Self {
        match self {
            Pairing::Even => Pairing::Odd,
            Pairing::Odd => Pairing::Even,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub mesh: Mesh,
    pub n_comp: usize,
    /// Row-major `n_cells × n_comp` cell averages.
    pub values: Vec<f64>,
    /// Half-cell offset flag for staggered frames.
    pub pairing: Option<Pairing>,
}

impl GridFunction {
    pub fn new(mesh: Mesh, n_comp: usize, values: Vec<f64>) -> Result<Self> {
        if n_comp == 0 {
            return Err(Error::InvalidGridFunction("n_comp must be positive".into()));
        }
        if values.len() != mesh.n_cells * n_comp {
            return Err(Error::InvalidGridFunction(format!(
                "expected {} values, got {}",
                mesh.n_cells * n_comp,
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGridFunction(format!(
                "non-finite value in cell {}",
                k / n_comp
            )));
        }
        Ok(GridFunction { mesh, n_comp, values, pairing: None })
    }

    pub fn constant(mesh: Mesh, state: &[f64]) -> Result<Self> {
        let values = state.iter().copied().cycle().take(mesh.n_cells * state.len()).collect();
        GridFunction::new(mesh, state.len(), values)
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(mesh: Mesh, n_comp: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(mesh.n_cells * n_comp);
        for i in 0..mesh.n_cells {
            let s = f(mesh.center(i));
            if s.len() != n_comp {
                return Err(Error::ComponentMismatch { left: n_comp, right: s.len() });
            }
            values.extend_from_slice(&s);
        }
        GridFunction::new(mesh, n_comp, values)
    }

    pub fn with_pairing(mut self, pairing: Option<Pairing>) -> Self {
        self.pairing = pairing;
        self
    }

    pub fn n_cells(&self) -> usize {
        self.mesh.n_cells
    }

    pub fn cell(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_comp..(i + 1) * self.n_comp]
    }

    /// Cell value with constant extension beyond either end.
    pub fn cell_clamped(&self, i: isize) -> &[f64] {
        self.cell(i.clamp(0, self.n_cells() as isize - 1) as usize)
    }

    /// Value of the piecewise-constant function at `x` (right-continuous, extended).
    pub fn value_at(&self, x: f64) -> &[f64] {
        self.cell(self.mesh.cell_of(x))
    }

    pub fn cells(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_comp)
    }

    /// Euclidean norm of the jump across interface `i` (between cells `i-1` and `i`).
    pub fn jump_at_interface(&self, i: usize) -> f64 {
        if i == 0 || i >= self.n_cells() {
            return 0.0;
        }
        dist(self.cell(i - 1), self.cell(i))
    }

    /// Total variation over interfaces with index in `[lo, hi]`.
    pub fn tv_between_interfaces(&self, lo: isize, hi: isize) -> f64 {
        let lo = lo.max(1);
        let hi = hi.min(self.n_cells() as isize - 1);
        (lo..=hi).map(|i| self.jump_at_interface(i as usize)).sum()
    }

    /// Per-component integral Σ U_j·dx.
    pub fn mass(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n_comp];
        for c in self.cells() {
            for (mk, ck) in m.iter_mut().zip(c) {
                *mk += ck * self.mesh.dx;
            }
        }
        m
    }

    /// Smallest interval outside which the function equals its end values within `tol`.
    ///
    /// Returns `None` when the function is constant up to `tol`.
    pub fn populated_extent(&self, tol: f64) -> Option<(f64, f64)> {
        let n = self.n_cells();
        let first = self.cell(0);
        let last = self.cell(n - 1);
        let lo = (0..n).find(|&i| dist(self.cell(i), first) > tol);
        let hi = (0..n).rev().find(|&i| dist(self.cell(i), last) > tol);
        match (lo, hi) {
            (None, None) => None,
            (lo, hi) => {
                let lo = lo.unwrap_or(n);
                let hi = hi.map(|h| h + 1).unwrap_or(0);
                let (a, b) = (lo.min(hi), lo.max(hi));
                Some((self.mesh.interface(a), self.mesh.interface(b)))
            }
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = (0..self.n_comp).map(|k| format!("comp{k}")).collect();
        writeln!(w, "x,{}", header.join(","))?;
        for i in 0..self.n_cells() {
            let row: Vec<String> = self.cell(i).iter().map(|&v| fmt_real(v)).collect();
            writeln!(w, "{},{}", fmt_real(self.mesh.center(i)), row.join(","))?;
        }
        Ok(())
    }

    /// Reads the format produced by [`GridFunction::write_csv`]; the mesh is
    /// reconstructed from the (uniformly spaced) cell centers.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty csv".into()))??;
        let n_comp = header.split(',').count().saturating_sub(1);
        if n_comp == 0 || !header.starts_with("x,") {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
                .collect::<Result<_>>()?;
            if fields.len() != n_comp + 1 {
                return Err(Error::Parse(format!("row has {} fields", fields.len())));
            }
            xs.push(fields[0]);
            values.extend_from_slice(&fields[1..]);
        }
        if xs.len() < 2 {
            return Err(Error::Parse("need at least two cells".into()));
        }
        let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        let mesh = Mesh::new(xs[0] - 0.5 * dx, xs[xs.len() - 1] + 0.5 * dx, xs.len())?;
        GridFunction::new(mesh, n_comp, values)
    }
}

/// Euclidean distance between two states.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Formats a real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Total variation over the interfaces lying in the closed interval `[a, b]`.
pub fn total_variation(g: &GridFunction, interval: (f64, f64)) -> f64 {
    let (a, b) = interval;
    if !(b >= a) {
        return 0.0;
    }
    g.tv_between_interfaces(g.mesh.interface_ceil(a), g.mesh.interface_floor(b))
}

/// Total variation over the whole line.
pub fn total_variation_all(g: &GridFunction) -> f64 {
    g.tv_between_interfaces(1, g.n_cells() as isize - 1)
}

/// Exact L¹ distance over `[a, b]` between two piecewise-constant functions.
pub fn l1_distance(g1: &GridFunction, g2: &GridFunction, interval: (f64, f64)) -> Result<f64> {
    if g1.n_comp != g2.n_comp {
        return Err(Error::ComponentMismatch { left: g1.n_comp, right: g2.n_comp });
    }
    let (a, b) = interval;
    if !(b > a) {
        return Ok(0.0);
    }
    let mut pts = vec![a, b];
    for g in [g1, g2] {
        let lo = g.mesh.interface_ceil(a).max(1);
        let hi = g.mesh.interface_floor(b).min(g.n_cells() as isize - 1);
        pts.extend((lo..=hi).map(|i| g.mesh.interface(i as usize)).filter(|&x| x > a && x < b));
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut total = 0.0;
    for w in pts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        total += (w[1] - w[0]) * dist(g1.value_at(mid), g2.value_at(mid));
    }
    Ok(total)
}

/// Scheme that produced a [`SolutionHistory`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeId {
    Godunov,
    LaxFriedrichs,
    BackwardEuler,
    Smoothing,
    /// Frames sampled from a known exact solution.
    Exact,
}

impl SchemeId {
    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Godunov => "godunov",
            SchemeId::LaxFriedrichs => "lax_friedrichs",
            SchemeId::BackwardEuler => "backward_euler",
            SchemeId::Smoothing => "smoothing",
            SchemeId::Exact => "exact",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "godunov" => SchemeId::Godunov,
            "lax_friedrichs" | "lax-friedrichs" => SchemeId::LaxFriedrichs,
            "backward_euler" | "backward-euler" => SchemeId::BackwardEuler,
            "smoothing" => SchemeId::Smoothing,
            "exact" => SchemeId::Exact,
            other => return Err(Error::Config(format!("unknown scheme {other:?}"))),
        })
    }
}

/// Frames at t_m = t0 + m·dt sharing one mesh.
#[derive(Debug, Clone)]
pub struct SolutionHistory {
    pub dt: f64,
    pub t0: f64,
    pub times: Vec<f64>,
    pub frames: Vec<GridFunction>,
    pub scheme_id: SchemeId,
    /// Total variation of each frame.
    pub tv: Vec<f64>,
    /// Mesh parameter ε of the producing scheme.
    pub eps: f64,
}

impl SolutionHistory {
    pub fn new(dt: f64, t0: f64, first: GridFunction, scheme_id: SchemeId) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidHistory(format!("dt must be positive, got {dt}")));
        }
        let tv = total_variation_all(&first);
        let eps = dt.max(first.mesh.dx);
        Ok(SolutionHistory {
            dt,
            t0,
            times: vec![t0],
            frames: vec![first],
            scheme_id,
            tv: vec![tv],
            eps,
        })
    }

    /// Builds a history from frames at t0, t0 + dt, …
    pub fn from_frames(
        dt: f64,
        t0: f64,
        frames: Vec<GridFunction>,
        scheme_id: SchemeId,
    ) -> Result<Self> {
        let mut it = frames.into_iter();
        let first = it.next().ok_or_else(|| Error::InvalidHistory("no frames".into()))?;
        let mut h = SolutionHistory::new(dt, t0, first, scheme_id)?;
        for f in it {
            h.push(f)?;
        }
        Ok(h)
    }

    pub fn push(&mut self, frame: GridFunction) -> Result<()> {
        let first = &self.frames[0];
        if frame.n_comp != first.n_comp || !frame.mesh.same_as(&first.mesh) {
            return Err(Error::InvalidHistory("frame mesh or n_comp differs".into()));
        }
        self.tv.push(total_variation_all(&frame));
        self.times.push(self.t0 + self.frames.len() as f64 * self.dt);
        self.frames.push(frame);
        Ok(())
    }

    pub fn mesh(&self) -> &Mesh {
        &self.frames[0].mesh
    }

    pub fn n_comp(&self) -> usize {
        self.frames[0].n_comp
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn last(&self) -> &GridFunction {
        self.frames.last().expect("history has at least one frame")
    }

    pub fn t_final(&self) -> f64 {
        *self.times.last().expect("history has at least one time")
    }

    /// Mesh parameter ε: max(dx, dt) of the producing scheme.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn sup_tv(&self) -> f64 {
        self.tv.iter().copied().fold(0.0, f64::max)
    }

    /// Supremum of frame TV over frames relevant to [tau, tau'].
    pub fn sup_tv_between(&self, tau: f64, tau_prime: f64) -> f64 {
        let lo = self.frame_at(tau);
        let hi = self.frame_at(tau_prime);
        self.tv[lo..=hi].iter().copied().fold(0.0, f64::max)
    }

    /// Index of the frame holding the solution at time `t` (held constant between frames).
    pub fn frame_at(&self, t: f64) -> usize {
        let s = ((t - self.t0) / self.dt + SNAP).floor();
        if s < 0.0 {
            0
        } else {
            (s as usize).min(self.len() - 1)
        }
    }

    /// Index of the frame whose time equals `t`, if any.
    pub fn exact_frame(&self, t: f64) -> Option<usize> {
        let s = (t - self.t0) / self.dt;
        let m = s.round();
        if (s - m).abs() <= SNAP * s.abs().max(1.0) && m >= 0.0 && (m as usize) < self.len() {
            Some(m as usize)
        } else {
            None
        }
    }

    /// Indices of frames with time in the closed interval `[t_lo, t_hi]`.
    pub fn frames_in(&self, t_lo: f64, t_hi: f64) -> std::ops::Range<usize> {
        let lo = ((t_lo - self.t0) / self.dt - SNAP).ceil().max(0.0) as usize;
        let hi = ((t_hi - self.t0) / self.dt + SNAP).floor();
        if hi < 0.0 {
            return 0..0;
        }
        let hi = ((hi as usize) + 1).min(self.len());
        lo.min(hi)..hi
    }
}

/// Space-time trapezoid over a strip `[t_lo, t_hi]`.
///
/// The left edge starts at `base_lo` and moves with `slope_left`, the right
/// edge starts at `base_hi` and moves with `slope_right`; both are pulled
/// inward linearly in time until they are inset by `inset` at `t_hi`.
/// Infinite bases give unbounded trapezoids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trapezoid {
    pub t_lo: f64,
    pub t_hi: f64,
    pub base_lo: f64,
    pub base_hi: f64,
    pub slope_left: f64,
    pub slope_right: f64,
    pub inset: f64,
}

impl Trapezoid {
    pub fn new(
        t_lo: f64,
        t_hi: f64,
        base_lo: f64,
        base_hi: f64,
        slope_left: f64,
        slope_right: f64,
        inset: f64,
    ) -> Result<Self> {
        let tz = Trapezoid { t_lo, t_hi, base_lo, base_hi, slope_left, slope_right, inset };
        if !(t_hi > t_lo) {
            return Err(Error::InvalidRegion(format!("t_hi {t_hi} must exceed t_lo {t_lo}")));
        }
        if !(inset >= 0.0) {
            return Err(Error::InvalidRegion(format!("inset must be nonnegative, got {inset}")));
        }
        let (p, q) = tz.upper_edge();
        if !(q > p) {
            return Err(Error::InvalidRegion(format!("upper edge [{p}, {q}] is empty")));
        }
        Ok(tz)
    }

    fn frac(&self, t: f64) -> f64 {
        (t - self.t_lo) / (self.t_hi - self.t_lo)
    }

    pub fn left_at(&self, t: f64) -> f64 {
        self.base_lo + (t - self.t_lo) * self.slope_left + self.frac(t) * self.inset
    }

    pub fn right_at(&self, t: f64) -> f64 {
        self.base_hi + (t - self.t_lo) * self.slope_right - self.frac(t) * self.inset
    }

    pub fn upper_edge(&self) -> (f64, f64) {
        (self.left_at(self.t_hi), self.right_at(self.t_hi))
    }

    /// Closed-in-time membership test; `strict` excludes the lateral edges.
    pub fn contains(&self, t: f64, x: f64, strict: bool) -> bool {
        let tol = SNAP * (self.t_hi - self.t_lo);
        if t < self.t_lo - tol || t > self.t_hi + tol {
            return false;
        }
        let (l, r) = (self.left_at(t), self.right_at(t));
        if strict {
            l < x && x < r
        } else {
            l <= x && x <= r
        }
    }

    /// Range of cell indices whose centers lie strictly inside the slice at time `t`.
    pub fn cell_range_at(&self, mesh: &Mesh, t: f64) -> std::ops::Range<usize> {
        let (l, r) = (self.left_at(t), self.right_at(t));
        if !(r > l) {
            return 0..0;
        }
        // centers c_i = x_min + (i + 1/2) dx with l < c_i < r
        let lo = ((l - mesh.x_min) / mesh.dx - 0.5).floor() + 1.0;
        let hi = ((r - mesh.x_min) / mesh.dx - 0.5).ceil() - 1.0;
        let lo = lo.max(0.0);
        let hi = hi.min(mesh.n_cells as f64 - 1.0);
        if hi < lo {
            return 0..0;
        }
        let (lo, hi) = (lo as usize, hi as usize);
        // guard roundoff at the strict inequalities
        let lo = if mesh.center(lo) <= l { lo + 1 } else { lo };
        let hi = if mesh.center(hi) >= r { hi.wrapping_sub(1) } else { hi };
        if hi == usize::MAX || hi < lo {
            0..0
        } else {
            lo..hi + 1
        }
    }
}

/// The (time index, cell index) pairs of cell centers inside `region`.
pub fn cells_in_region(history: &SolutionHistory, region: &Trapezoid) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for m in history.frames_in(region.t_lo, region.t_hi) {
        for i in region.cell_range_at(history.mesh(), history.times[m]) {
            out.push((m, i));
        }
    }
    out
}

/// Per-component value ranges over the cells inside `region`.
pub fn component_ranges(history: &SolutionHistory, region: &Trapezoid) -> Option<Vec<f64>> {
    let n = history.n_comp();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    let mut any = false;
    for m in history.frames_in(region.t_lo, region.t_hi) {
        let frame = &history.frames[m];
        for i in region.cell_range_at(history.mesh(), history.times[m]) {
            any = true;
            for (k, &v) in frame.cell(i).iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
    }
    any.then(|| lo.iter().zip(&hi).map(|(a, b)| b - a).collect())
}

/// Euclidean norm of the per-component ranges over the region.
///
/// This bounds the diameter of the value set from above and from below by
/// a factor √n.
pub fn oscillation(history: &SolutionHistory, region: &Trapezoid) -> Result<f64> {
    let ranges = component_ranges(history, region).ok_or(Error::EmptyRegion)?;
    Ok(ranges.iter().map(|r| r * r).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn rd_v() -> GridFunction {
        let mesh = Mesh::new(-1.0, 4.5, 2750).unwrap();
        GridFunction::from_fn(mesh, 1, |x| {
            vec![if x < 0.0 {
                2.0
            } else if x < 0.5 {
                3.0
            } else {
                1.0
            }]
        })
        .unwrap()
    }

    fn scalar(mesh: Mesh, vals: &[f64]) -> GridFunction {
        GridFunction::new(mesh, 1, vals.to_vec()).unwrap()
    }

    #[test]
    fn tv_of_constant_is_zero() {
        let g = GridFunction::constant(Mesh::new(0.0, 1.0, 10).unwrap(), &[1.0, 2.0]).unwrap();
        assert_eq!(total_variation(&g, (0.0, 1.0)), 0.0);
    }

    #[test]
    fn tv_of_rd_velocity_is_three() {
        assert_abs_diff_eq!(total_variation(&rd_v(), (-1.0, 1.0)), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn tv_single_vector_jump_is_euclidean() {
        let mesh = Mesh::new(0.0, 1.0, 4).unwrap();
        let g = GridFunction::new(mesh, 2, vec![0.0, 0.0, 0.0, 0.0, 3.0, 4.0, 3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(total_variation(&g, (0.0, 1.0)), 5.0, epsilon = 1e-14);
        assert_eq!(total_variation(&g, (0.6, 0.4)), 0.0);
    }

    #[test]
    fn oscillation_examples() {
        let mesh = Mesh::new(0.0, 1.0, 4).unwrap();
        let region = Trapezoid::new(0.0, 1.0, -1.0, 2.0, 0.0, 0.0, 0.0).unwrap();
        let c = SolutionHistory::new(0.1, 0.0, GridFunction::constant(mesh, &[2.0]).unwrap(), SchemeId::Exact)
            .unwrap();
        assert_eq!(oscillation(&c, &region).unwrap(), 0.0);
        let s = SolutionHistory::new(0.1, 0.0, scalar(mesh, &[0.0, 1.0, 1.0, 0.0]), SchemeId::Exact).unwrap();
        assert_eq!(oscillation(&s, &region).unwrap(), 1.0);
        let v = GridFunction::new(mesh, 2, vec![0.0, 0.0, 3.0, 1.0, 1.0, 4.0, 2.0, 2.0]).unwrap();
        let v = SolutionHistory::new(0.1, 0.0, v, SchemeId::Exact).unwrap();
        assert_abs_diff_eq!(oscillation(&v, &region).unwrap(), 5.0, epsilon = 1e-14);
        let outside = Trapezoid::new(0.0, 1.0, 5.0, 6.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(oscillation(&v, &outside), Err(Error::EmptyRegion)));
    }

    #[test]
    fn l1_examples() {
        let mesh = Mesh::new(0.0, 1.0, 4).unwrap();
        let g1 = scalar(mesh, &[0.0, 1.0, 0.0, 0.0]);
        let g2 = scalar(mesh, &[0.0, 0.0, 0.0, 0.0]);
        assert_eq!(l1_distance(&g1, &g1, (0.0, 1.0)).unwrap(), 0.0);
        assert_abs_diff_eq!(l1_distance(&g1, &g2, (0.0, 1.0)).unwrap(), 0.25, epsilon = 1e-15);
        let fine = Mesh::new(0.0, 1.0, 8).unwrap();
        let g1f = scalar(fine, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(l1_distance(&g1, &g1f, (0.0, 1.0)).unwrap(), 0.0);
        let two = GridFunction::constant(mesh, &[0.0, 0.0]).unwrap();
        assert!(l1_distance(&g1, &two, (0.0, 1.0)).is_err());
    }

    #[test]
    fn cells_in_region_examples() {
        let mesh = Mesh::new(0.0, 1.0, 4).unwrap();
        let mut h = SolutionHistory::new(0.5, 0.0, GridFunction::constant(mesh, &[1.0]).unwrap(), SchemeId::Exact)
            .unwrap();
        h.push(GridFunction::constant(mesh, &[1.0]).unwrap()).unwrap();
        let below = Trapezoid::new(-2.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(cells_in_region(&h, &below).is_empty());
        let strip0 = Trapezoid::new(0.0, 0.4, -1.0, 2.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(cells_in_region(&h, &strip0), (0..4).map(|i| (0, i)).collect::<Vec<_>>());
        let both = Trapezoid::new(0.0, 0.5, -1.0, 2.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(cells_in_region(&h, &both).len(), 8);
        // zero-width upper edge: only frame 0 contributes
        let thin = Trapezoid {
            t_lo: 0.0,
            t_hi: 0.5,
            base_lo: 0.0,
            base_hi: 1.0,
            slope_left: 1.0,
            slope_right: -1.0,
            inset: 0.0,
        };
        let got = cells_in_region(&h, &thin);
        let expect: Vec<_> = (0..4)
            .map(|i| (0, i))
            .filter(|&(m, i)| thin.contains(h.times[m], mesh.center(i), true))
            .collect();
        assert_eq!(got, expect);
        assert_eq!(got.len(), 4);
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let mesh = Mesh::new(-0.3, 0.7, 5).unwrap();
        let g = GridFunction::new(mesh, 2, (0..10).map(|k| (k as f64).sin() / 3.0).collect()).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let back = GridFunction::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.values, g.values);
        assert!((back.mesh.dx - mesh.dx).abs() < 1e-15);
    }

    #[test]
    fn populated_extent_finds_the_bump() {
        let mesh = Mesh::new(0.0, 1.0, 10).unwrap();
        let g = scalar(mesh, &[0.0, 0.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let (a, b) = g.populated_extent(1e-12).unwrap();
        assert_abs_diff_eq!(a, 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(b, 0.5, epsilon = 1e-14);
        assert!(GridFunction::constant(mesh, &[3.0]).unwrap().populated_extent(1e-12).is_none());
    }

    fn arb_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-2.0..2.0f64, n)
    }

    proptest! {
        #[test]
        fn tv_is_additive_at_interior_points(vals in arb_values(40), b in 0.0..1.0f64) {
            let mesh = Mesh::new(0.0, 1.0, 20).unwrap();
            let g = GridFunction::new(mesh, 2, vals).unwrap();
            let whole = total_variation(&g, (0.0, 1.0));
            let split = total_variation(&g, (0.0, b)) + total_variation(&g, (b, 1.0));
            let i = mesh.interface_floor(b);
            let on_interface = (mesh.interface(i.max(0) as usize) - b).abs() < 1e-9 * mesh.dx;
            let jump = if on_interface { g.jump_at_interface(i as usize) } else { 0.0 };
            prop_assert!(split <= whole + jump + 1e-12);
            if !on_interface {
                prop_assert!((split - whole).abs() < 1e-12);
            }
        }

        #[test]
        fn oscillation_is_monotone_and_bounds_pairwise(vals in arb_values(60), shrink in 0.0..0.4f64) {
            let mesh = Mesh::new(0.0, 1.0, 10).unwrap();
            let frames: Vec<_> = vals.chunks(20).map(|c| GridFunction::new(mesh, 2, c.to_vec()).unwrap()).collect();
            let h = SolutionHistory::from_frames(0.1, 0.0, frames, SchemeId::Exact).unwrap();
            let big = Trapezoid::new(0.0, 0.2, -0.1, 1.1, -0.5, 0.5, 0.0).unwrap();
            let small = Trapezoid::new(0.0, 0.2, shrink, 1.0 - shrink, 0.0, 0.0, 0.0).unwrap();
            let ob = oscillation(&h, &big).unwrap();
            if let Ok(os) = oscillation(&h, &small) {
                prop_assert!(os <= ob);
            }
            let pts: Vec<&[f64]> = cells_in_region(&h, &big).iter().map(|&(m, i)| h.frames[m].cell(i)).collect();
            let mut diam: f64 = 0.0;
            for a in &pts { for b in &pts { diam = diam.max(dist(a, b)); } }
            prop_assert!(diam <= ob + 1e-12);
            prop_assert!(ob <= 2f64.sqrt() * diam + 1e-12);
        }

        #[test]
        fn l1_is_a_metric(a in arb_values(16), b in arb_values(16), c in arb_values(16)) {
            let mesh = Mesh::new(0.0, 2.0, 8).unwrap();
            let (ga, gb, gc) = (
                GridFunction::new(mesh, 2, a).unwrap(),
                GridFunction::new(mesh, 2, b).unwrap(),
                GridFunction::new(mesh, 2, c).unwrap(),
            );
            let d = |x: &GridFunction, y: &GridFunction| l1_distance(x, y, (0.0, 2.0)).unwrap();
            prop_assert!((d(&ga, &gb) - d(&gb, &ga)).abs() < 1e-14);
            prop_assert!(d(&ga, &gc) <= d(&ga, &gb) + d(&gb, &gc) + 1e-12);
        }
    }
}
