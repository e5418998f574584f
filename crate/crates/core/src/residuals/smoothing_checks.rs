//! Sampled checks of the two smoothing estimates used by the schemes:
//! cell averaging against a C¹ test function, and mollification by K_δ.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use super::sign::PiecewiseConstant;
use crate::quad::Composite;
use crate::schemes::{bump, bump_sup};

/// φ(x) = c + Σ a_k cos(ω_k x) + b_k sin(ω_k x).
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    pub offset: f64,
    pub terms: Vec<(f64, f64, f64)>,
}

impl TrigPolynomial {
    /// Random polynomial with up to `modes` terms and frequencies up to 2π·modes/`length`.
    pub fn random(rng: &mut impl Rng, modes: usize, length: f64) -> Self {
        let n = rng.gen_range(1..=modes);
        let terms = (0..n)
            .map(|_| {
                let k = rng.gen_range(1..=modes) as f64;
                (2.0 * PI * k / length, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
            .collect();
        TrigPolynomial { offset: rng.gen_range(-1.0..1.0), terms }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.offset + self.terms.iter().map(|&(w, a, b)| a * (w * x).cos() + b * (w * x).sin()).sum::<f64>()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(w, a, b)| w * (b * (w * x).cos() - a * (w * x).sin())).sum()
    }

    pub fn antiderivative(&self, x: f64) -> f64 {
        self.offset * x + self.terms.iter().map(|&(w, a, b)| (a * (w * x).sin() - b * (w * x).cos()) / w).sum::<f64>()
    }

    fn sampled_sup(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let n = 2000;
        (0..=n).map(|k| f(a + (b - a) * k as f64 / n as f64).abs()).fold(0.0, f64::max)
    }

    /// Sampled sup |φ_x| on [a, b].
    pub fn derivative_sup(&self, a: f64, b: f64) -> f64 {
        Self::sampled_sup(|x| self.derivative(x), a, b)
    }

    /// Sampled max(sup|φ|, sup|φ_x|) on [a, b].
    pub fn w1inf_norm(&self, a: f64, b: f64) -> f64 {
        Self::sampled_sup(|x| self.value(x), a, b).max(self.derivative_sup(a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AveragingCheck {
    /// |∫(w − w̄)φ| over the domain of w.
    pub lhs: f64,
    /// TV(w)·ε²·sup|φ_x| with ε the domain length.
    pub bound: f64,
    pub holds: bool,
}

/// Compares the averaging defect of a piecewise-constant w with its bound.
pub fn check_averaging(w: &PiecewiseConstant, phi: &TrigPolynomial) -> AveragingCheck {
    let (a, b) = w.domain();
    let eps = b - a;
    let mean = w.pieces().map(|(lo, hi, v)| v * (hi - lo)).sum::<f64>() / eps;
    let lhs = w
        .pieces()
        .map(|(lo, hi, v)| (v - mean) * (phi.antiderivative(hi) - phi.antiderivative(lo)))
        .sum::<f64>()
        .abs();
    let bound = w.total_variation() * eps * eps * phi.derivative_sup(a, b);
    AveragingCheck { lhs, bound, holds: lhs <= bound + 1e-15 * eps }
}

/// Cumulative distribution of the normalized bump kernel on [−1, 1].
#[derive(Debug, Clone)]
pub struct KernelCdf {
    nodes: Vec<f64>,
    cumulative: Vec<f64>,
}

impl KernelCdf {
    pub fn new() -> Self {
        let n = 400;
        let nodes: Vec<f64> = (0..=n).map(|k| -1.0 + 2.0 * k as f64 / n as f64).collect();
        let mut cumulative = vec![0.0];
        for w in nodes.windows(2) {
            let step = Composite::new(w[0], w[1], 1, 10).integrate(bump);
            cumulative.push(cumulative.last().unwrap() + step);
        }
        KernelCdf { nodes, cumulative }
    }

    /// C(s) = ∫_{−1}^{s} K.
    pub fn at(&self, s: f64) -> f64 {
        if s <= -1.0 {
            return 0.0;
        }
        if s >= 1.0 {
            return 1.0;
        }
        let k = ((s + 1.0) / 2.0 * (self.nodes.len() - 1) as f64).floor() as usize;
        let k = k.min(self.nodes.len() - 2);
        self.cumulative[k] + Composite::new(self.nodes[k], s, 1, 10).integrate(bump)
    }
}

impl Default for KernelCdf {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MollificationCheck {
    /// |∫(K_δ * w − w)φ|.
    pub lhs: f64,
    /// δ²·‖φ‖_{W1,∞}·TV(w).
    pub scale: f64,
    pub ratio: f64,
    /// 2‖K‖∞.
    pub limit: f64,
    pub holds: bool,
}

/// Mollification defect of a piecewise-constant w (extended by its end values).
///
/// A jump J at x_k contributes J ∫_{−δ}^{δ}(C(y/δ) − 1_{y>0}) φ(x_k + y) dy,
/// where C is the cumulative kernel.
pub fn check_mollification(
    w: &PiecewiseConstant,
    delta: f64,
    phi: &TrigPolynomial,
    cdf: &KernelCdf,
) -> MollificationCheck {
    let mut total = 0.0;
    for (k, pair) in w.values.windows(2).enumerate() {
        let jump = pair[1] - pair[0];
        if jump == 0.0 {
            continue;
        }
        let xk = w.breaks[k + 1];
        let left = Composite::new(-delta, 0.0, 8, 10).integrate(|y| cdf.at(y / delta) * phi.value(xk + y));
        let right = Composite::new(0.0, delta, 8, 10).integrate(|y| (cdf.at(y / delta) - 1.0) * phi.value(xk + y));
        total += jump * (left + right);
    }
    let (a, b) = w.domain();
    let lhs = total.abs();
    let scale = delta * delta * phi.w1inf_norm(a - delta, b + delta) * w.total_variation();
    let ratio = if scale > 0.0 { lhs / scale } else { 0.0 };
    let limit = 2.0 * bump_sup();
    MollificationCheck { lhs, scale, ratio, limit, holds: ratio <= limit }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::Mollifier;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cdf_is_monotone_and_symmetric() {
        let c = KernelCdf::new();
        assert!((c.at(0.0) - 0.5).abs() < 1e-13);
        assert!((c.at(0.3) + c.at(-0.3) - 1.0).abs() < 1e-13);
        assert!((c.at(0.999999) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn antiderivative_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = TrigPolynomial::random(&mut rng, 5, 1.0);
        let q = Composite::new(0.1, 0.7, 20, 8).integrate(|x| p.value(x));
        assert!((p.antiderivative(0.7) - p.antiderivative(0.1) - q).abs() < 1e-12);
    }

    #[test]
    fn averaging_of_a_constant_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = TrigPolynomial::random(&mut rng, 3, 1.0);
        let c = check_averaging(&PiecewiseConstant::constant(0.0, 1e-3, 0.7), &p);
        assert!(c.lhs < 1e-15 && c.holds);
    }

    #[test]
    fn jump_formula_matches_discrete_mollification() {
        // a single step mollified on a fine grid
        let delta = 0.05;
        let mesh = crate::grid::Mesh::new(-0.5, 0.5, 4000).unwrap();
        let g = crate::grid::GridFunction::from_fn(mesh, 1, |x| vec![if x < 0.0 { 0.0 } else { 1.0 }]).unwrap();
        let s = Mollifier::new(delta, mesh.dx).apply(&g);
        let phi = TrigPolynomial { offset: 0.2, terms: vec![(3.0, 0.5, 1.0)] };
        let brute: f64 = (0..mesh.n_cells)
            .map(|i| {
                let (a, b) = (mesh.interface(i), mesh.interface(i + 1));
                (s.values[i] - g.values[i]) * (phi.antiderivative(b) - phi.antiderivative(a))
            })
            .sum();
        let w = PiecewiseConstant::new(vec![-0.5, 0.0, 0.5], vec![0.0, 1.0]);
        let c = check_mollification(&w, delta, &phi, &KernelCdf::new());
        assert!((c.lhs - brute.abs()).abs() < 1e-6, "{} vs {}", c.lhs, brute);
    }
}
