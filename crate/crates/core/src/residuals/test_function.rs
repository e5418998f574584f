use std::sync::OnceLock;

use crate::quad::Composite;

/// Smooth bump B(s) = exp(1 − 1/(1 − s²)) on |s| < 1, with B(0) = 1.
pub fn unit_bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

pub fn unit_bump_derivative(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let d = 1.0 - s * s;
        unit_bump(s) * (-2.0 * s / (d * d))
    }
}

/// sup |B′|, located by a dense scan refined with golden-section search.
pub fn unit_bump_derivative_sup() -> f64 {
    static SUP: OnceLock<f64> = OnceLock::new();
    *SUP.get_or_init(|| {
        let f = |s: f64| unit_bump_derivative(s).abs();
        let n = 20_000;
        let best = (0..n).map(|k| -1.0 + 2.0 * k as f64 / n as f64).max_by(|a, b| f(*a).total_cmp(&f(*b))).unwrap();
        let (mut lo, mut hi) = (best - 2.0 / n as f64, best + 2.0 / n as f64);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let (c, d) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if f(c) > f(d) {
                hi = d;
            } else {
                lo = c;
            }
        }
        f(0.5 * (lo + hi))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimeProfile {
    Constant,
    /// B((t − center)/radius).
    Bump { center: f64, radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceProfile {
    Zero,
    /// B((x − center)/radius).
    Bump { center: f64, radius: f64 },
    /// Piecewise-linear interpolant of (xs, ys), zero outside [xs₀, xs_last].
    PiecewiseLinear { xs: Vec<f64>, ys: Vec<f64> },
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Bump { center, radius } => unit_bump((t - center) / radius),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 0.0,
            TimeProfile::Bump { center, radius } => unit_bump_derivative((t - center) / radius) / radius,
        }
    }

    /// ∫ over [t0, t1] using `panels` Gauss panels.
    pub fn integral(&self, t0: f64, t1: f64, panels: usize) -> f64 {
        match *self {
            TimeProfile::Constant => t1 - t0,
            TimeProfile::Bump { center, radius } => {
                let (a, b) = (t0.max(center - radius), t1.min(center + radius));
                if b <= a {
                    0.0
                } else {
                    Composite::new(a, b, panels, 6).integrate(|t| self.value(t))
                }
            }
        }
    }

    fn sup(&self) -> f64 {
        1.0
    }

    fn derivative_sup(&self) -> f64 {
        match *self {
            TimeProfile::Constant => 0.0,
            TimeProfile::Bump { radius, .. } => unit_bump_derivative_sup() / radius,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            TimeProfile::Constant => (f64::NEG_INFINITY, f64::INFINITY),
            TimeProfile::Bump { center, radius } => (center - radius, center + radius),
        }
    }
}

impl SpaceProfile {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            SpaceProfile::Zero => 0.0,
            SpaceProfile::Bump { center, radius } => unit_bump((x - center) / radius),
            SpaceProfile::PiecewiseLinear { xs, ys } => {
                if xs.is_empty() || x < xs[0] || x > xs[xs.len() - 1] {
                    return 0.0;
                }
                let k = xs.partition_point(|&p| p <= x).clamp(1, xs.len() - 1);
                let (x0, x1) = (xs[k - 1], xs[k]);
                if x1 == x0 {
                    return ys[k];
                }
                ys[k - 1] + (ys[k] - ys[k - 1]) * (x - x0) / (x1 - x0)
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            SpaceProfile::Zero => 0.0,
            SpaceProfile::Bump { center, radius } => unit_bump_derivative((x - center) / radius) / radius,
            SpaceProfile::PiecewiseLinear { xs, ys } => {
                if xs.len() < 2 || x < xs[0] || x > xs[xs.len() - 1] {
                    return 0.0;
                }
                let k = xs.partition_point(|&p| p <= x).clamp(1, xs.len() - 1);
                let w = xs[k] - xs[k - 1];
                if w > 0.0 {
                    (ys[k] - ys[k - 1]) / w
                } else {
                    0.0
                }
            }
        }
    }

    /// ∫ over [a, b]; exact for piecewise-linear profiles.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            SpaceProfile::Zero => 0.0,
            SpaceProfile::Bump { center, radius } => {
                let (lo, hi) = (a.max(center - radius), b.min(center + radius));
                if hi <= lo {
                    0.0
                } else {
                    Composite::new(lo, hi, 1, 8).integrate(|x| self.value(x))
                }
            }
            SpaceProfile::PiecewiseLinear { xs, .. } => {
                let mut pts: Vec<f64> = xs.iter().copied().filter(|&x| x > a && x < b).collect();
                pts.insert(0, a);
                pts.push(b);
                pts.windows(2)
                    .map(|w| 0.5 * (w[1] - w[0]) * (self.value(w[0]) + self.value(w[1])))
                    .sum()
            }
        }
    }

    fn sup(&self) -> f64 {
        match self {
            SpaceProfile::Zero => 0.0,
            SpaceProfile::Bump { .. } => 1.0,
            SpaceProfile::PiecewiseLinear { ys, .. } => ys.iter().fold(0.0, |m, y| m.max(y.abs())),
        }
    }

    fn derivative_sup(&self) -> f64 {
        match self {
            SpaceProfile::Zero => 0.0,
            SpaceProfile::Bump { radius, .. } => unit_bump_derivative_sup() / radius,
            SpaceProfile::PiecewiseLinear { xs, ys } => {
                let mut m: f64 = 0.0;
                for k in 1..xs.len() {
                    let w = xs[k] - xs[k - 1];
                    if w > 0.0 {
                        m = m.max(((ys[k] - ys[k - 1]) / w).abs());
                    }
                }
                // jumps to zero at the ends are not allowed; the end values are zero by construction
                m
            }
        }
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            SpaceProfile::Zero => None,
            SpaceProfile::Bump { center, radius } => Some((center - radius, center + radius)),
            SpaceProfile::PiecewiseLinear { xs, .. } => (!xs.is_empty()).then(|| (xs[0], xs[xs.len() - 1])),
        }
    }

    pub fn nonnegative(&self) -> bool {
        match self {
            SpaceProfile::PiecewiseLinear { ys, .. } => ys.iter().all(|&y| y >= 0.0),
            _ => true,
        }
    }
}

/// Separable test function φ(t, x) = T(t)·X(x)·w with a constant weight vector w.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub time: TimeProfile,
    pub space: SpaceProfile,
    pub weights: Vec<f64>,
    /// sup |φ|.
    pub sup_norm: f64,
    /// sup |φ_t|.
    pub dt_norm: f64,
    /// sup |φ_x|.
    pub dx_norm: f64,
}

impl TestFunction {
    pub fn new(time: TimeProfile, space: SpaceProfile, weights: Vec<f64>) -> Self {
        let w = weights.iter().map(|x| x * x).sum::<f64>().sqrt();
        // tiny relative margin so the reported norms bound the true suprema
        let up = 1.0 + 1e-9;
        let sup_norm = up * w * time.sup() * space.sup();
        let dt_norm = up * w * time.derivative_sup() * space.sup();
        let dx_norm = up * w * time.sup() * space.derivative_sup();
        TestFunction { time, space, weights, sup_norm, dt_norm, dx_norm }
    }

    pub fn zero(n_comp: usize) -> Self {
        TestFunction::new(TimeProfile::Constant, SpaceProfile::Zero, vec![0.0; n_comp])
    }

    /// Space-time bump of the given radii, scaled by `weights`.
    pub fn bump(tc: f64, rt: f64, xc: f64, rx: f64, weights: Vec<f64>) -> Self {
        TestFunction::new(
            TimeProfile::Bump { center: tc, radius: rt },
            SpaceProfile::Bump { center: xc, radius: rx },
            weights,
        )
    }

    /// Time-independent piecewise-linear scalar profile.
    pub fn static_piecewise_linear(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        TestFunction::new(TimeProfile::Constant, SpaceProfile::PiecewiseLinear { xs, ys }, vec![1.0])
    }

    /// ‖φ‖_{W1,∞} = max(sup|φ|, sup|φ_t|, sup|φ_x|).
    pub fn w1inf_norm(&self) -> f64 {
        self.sup_norm.max(self.dt_norm).max(self.dx_norm)
    }

    pub fn scalar(&self, t: f64, x: f64) -> f64 {
        self.time.value(t) * self.space.value(x)
    }

    pub fn eval(&self, t: f64, x: f64) -> Vec<f64> {
        let s = self.scalar(t, x);
        self.weights.iter().map(|w| w * s).collect()
    }

    /// Space-time bounding box (t_lo, t_hi, x_lo, x_hi), or `None` for φ ≡ 0.
    pub fn support(&self) -> Option<(f64, f64, f64, f64)> {
        if self.weights.iter().all(|&w| w == 0.0) {
            return None;
        }
        let (t0, t1) = self.time.support();
        self.space.support().map(|(a, b)| (t0, t1, a, b))
    }

    pub fn is_zero(&self) -> bool {
        self.support().is_none() || self.sup_norm == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_bound_sampled_differences() {
        let phis = [
            TestFunction::bump(0.5, 0.3, 0.2, 0.1, vec![1.0, -2.0]),
            TestFunction::static_piecewise_linear(vec![0.0, 0.1, 0.4, 0.5], vec![0.0, 1.0, 1.0, 0.0]),
        ];
        for phi in &phis {
            let (t0, t1, x0, x1) = phi.support().unwrap();
            let (t0, t1) = if t0.is_finite() { (t0, t1) } else { (0.0, 1.0) };
            let n = 100;
            let (ht, hx) = ((t1 - t0) / n as f64, (x1 - x0) / n as f64);
            let w = phi.weights.iter().map(|x| x * x).sum::<f64>().sqrt();
            let (mut s, mut st, mut sx) = (0.0f64, 0.0f64, 0.0f64);
            for i in 0..n {
                for j in 0..n {
                    let t = t0 + i as f64 * ht;
                    let x = x0 + j as f64 * hx;
                    s = s.max(w * phi.scalar(t, x).abs());
                    st = st.max(w * (phi.scalar(t + ht, x) - phi.scalar(t, x)).abs() / ht);
                    sx = sx.max(w * (phi.scalar(t, x + hx) - phi.scalar(t, x)).abs() / hx);
                }
            }
            assert!(s <= phi.sup_norm && phi.sup_norm <= 1.05 * s.max(1e-300) + 1e-12);
            assert!(sx <= phi.dx_norm && phi.dx_norm <= 1.05 * sx + 1e-12);
            assert!(st <= phi.dt_norm + 1e-12 && phi.dt_norm <= 1.05 * st + 1e-12);
        }
    }

    #[test]
    fn piecewise_linear_integral_is_exact() {
        let p = SpaceProfile::PiecewiseLinear { xs: vec![0.0, 1.0, 2.0], ys: vec![0.0, 2.0, 0.0] };
        assert!((p.integral(-1.0, 3.0) - 2.0).abs() < 1e-14);
        assert!((p.integral(0.5, 1.5) - 1.5).abs() < 1e-14);
    }
}
