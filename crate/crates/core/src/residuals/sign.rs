use serde::Serialize;

use super::test_function::{SpaceProfile, TestFunction};

/// Piecewise-constant scalar function: `values[k]` on `[breaks[k], breaks[k+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseConstant {
    /// Panics unless `breaks` is strictly increasing with one more entry than `values`.
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(breaks.len(), values.len() + 1, "need one more break than values");
        assert!(breaks.windows(2).all(|w| w[1] > w[0]), "breaks must increase");
        PiecewiseConstant { breaks, values }
    }

    pub fn constant(a: f64, b: f64, value: f64) -> Self {
        PiecewiseConstant::new(vec![a, b], vec![value])
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breaks[0], self.breaks[self.breaks.len() - 1])
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breaks.windows(2).zip(&self.values).map(|(w, &v)| (w[0], w[1], v))
    }

    /// Sum of |jumps| between consecutive pieces.
    pub fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    pub fn value(&self, x: f64) -> f64 {
        let k = self.breaks.partition_point(|&b| b <= x).clamp(1, self.values.len());
        self.values[k - 1]
    }

    /// ∫|g| over [a, b] clipped to the domain.
    pub fn abs_integral(&self, a: f64, b: f64) -> f64 {
        self.pieces().map(|(lo, hi, v)| (hi.min(b) - lo.max(a)).max(0.0) * v.abs()).sum()
    }

    /// Exact ∫ φ g for a piecewise-linear φ.
    pub fn integral_against(&self, phi: &SpaceProfile) -> f64 {
        self.pieces().filter(|p| p.2 != 0.0).map(|(lo, hi, v)| v * phi.integral(lo, hi)).sum()
    }

    /// Maximal runs of pieces with one strict sign, as (a, b, sign).
    pub fn sign_intervals(&self) -> Vec<(f64, f64, f64)> {
        let mut out: Vec<(f64, f64, f64)> = Vec::new();
        let mut open: Option<(f64, f64, f64)> = None;
        for (lo, hi, v) in self.pieces() {
            let s = if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            };
            open = match open {
                Some((a, _, sa)) if sa == s => Some((a, hi, s)),
                prev => {
                    out.extend(prev);
                    (s != 0.0).then_some((lo, hi, s))
                }
            };
        }
        out.extend(open);
        out
    }
}

/// The signed tent test function: on every maximal sign interval [a, b] of
/// g it is ±min{1, (x − a)/e, (b − x)/e} with e = eps^(2/3), and zero elsewhere.
pub fn build_sign_test_function(g: &PiecewiseConstant, eps: f64) -> TestFunction {
    let e = eps.powf(2.0 / 3.0);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (a, b, s) in g.sign_intervals() {
        if b - a > 2.0 * e {
            xs.extend([a, a + e, b - e, b]);
            ys.extend([0.0, s, s, 0.0]);
        } else {
            xs.extend([a, 0.5 * (a + b), b]);
            ys.extend([0.0, s * 0.5 * (b - a) / e, 0.0]);
        }
    }
    if xs.is_empty() {
        return TestFunction::zero(1);
    }
    let mut phi = TestFunction::static_piecewise_linear(xs, ys);
    if phi.dx_norm > 0.0 {
        phi.dx_norm = 1.0 / e;
    }
    phi
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignLemmaCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates both sides of the sign-test-function estimate: for single-signed g,
/// ∫_{α+e}^{β−e}|g| ≤ ∫φg; otherwise ∫|g| ≤ ∫φg + 2e·TV(g).
pub fn verify_sign_lemma(g: &PiecewiseConstant, eps: f64) -> SignLemmaCheck {
    let e = eps.powf(2.0 / 3.0);
    let (alpha, beta) = g.domain();
    let phi = build_sign_test_function(g, eps);
    let pairing = g.integral_against(&phi.space);
    let single = g.values.iter().all(|&v| v > 0.0) || g.values.iter().all(|&v| v < 0.0);
    let (lhs, rhs) = if single {
        (g.abs_integral(alpha + e, beta - e), pairing)
    } else {
        (g.abs_integral(alpha, beta), pairing + 2.0 * e * g.total_variation())
    };
    SignLemmaCheck { lhs, rhs, holds: lhs <= rhs + 1e-12 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn positive_g_gives_one_tent() {
        let g = PiecewiseConstant::constant(0.0, 1.0, 2.0);
        let eps: f64 = 1e-3;
        let e: f64 = eps.powf(2.0 / 3.0);
        let phi = build_sign_test_function(&g, eps);
        assert_eq!(phi.scalar(0.0, 0.0), 0.0);
        assert!((phi.scalar(0.0, 0.5 * e) - 0.5).abs() < 1e-12);
        assert_eq!(phi.scalar(0.0, 0.5), 1.0);
        assert_eq!(phi.scalar(0.0, 1.0), 0.0);
        assert!((phi.dx_norm - 1.0 / e).abs() < 1e-9);
    }

    #[test]
    fn zero_g_gives_zero() {
        let g = PiecewiseConstant::constant(0.0, 1.0, 0.0);
        assert!(build_sign_test_function(&g, 1e-3).is_zero());
        let c = verify_sign_lemma(&g, 1e-3);
        assert_eq!((c.lhs, c.rhs, c.holds), (0.0, 0.0, true));
    }

    #[test]
    fn one_sign_change_gives_two_tents_meeting_at_zero() {
        let g = PiecewiseConstant::new(vec![0.0, 0.4, 1.0], vec![1.0, -0.5]);
        let phi = build_sign_test_function(&g, 1e-3);
        assert_eq!(phi.scalar(0.0, 0.4), 0.0);
        assert!(phi.scalar(0.0, 0.2) > 0.0 && phi.scalar(0.0, 0.7) < 0.0);
    }

    #[test]
    fn unit_g_closed_form() {
        let c = verify_sign_lemma(&PiecewiseConstant::constant(0.0, 1.0, 1.0), 1e-3);
        assert!((c.lhs - 0.98).abs() < 1e-12);
        assert!((c.rhs - 0.99).abs() < 1e-12);
        assert!(c.holds);
    }

    fn random_g() -> impl Strategy<Value = PiecewiseConstant> {
        (1usize..=50).prop_flat_map(|n| {
            (
                prop::collection::vec(0.01f64..1.0, n),
                prop::collection::vec(prop_oneof![Just(0.0), -1.0f64..1.0], n),
            )
                .prop_map(|(widths, values)| {
                    let mut breaks = vec![0.0];
                    for w in widths {
                        breaks.push(breaks.last().unwrap() + w);
                    }
                    PiecewiseConstant::new(breaks, values)
                })
        })
    }

    proptest! {
        #[test]
        fn tent_is_bounded_sign_compatible_and_lipschitz(g in random_g(), le in -6.0f64..-2.0) {
            let eps: f64 = 10f64.powf(le);
            let e = eps.powf(2.0 / 3.0);
            let phi = build_sign_test_function(&g, eps);
            let (a, b) = g.domain();
            let n = 4000;
            let h = (b - a) / n as f64;
            let mut lip: f64 = 0.0;
            for k in 0..n {
                let x = a + k as f64 * h;
                let p = phi.scalar(0.0, x);
                prop_assert!(p.abs() <= 1.0 + 1e-15);
                prop_assert!(p * g.value(x) >= 0.0);
                lip = lip.max((phi.scalar(0.0, x + h) - p).abs() / h);
            }
            prop_assert!(lip <= 1.0 / e * (1.0 + 1e-9));
        }

        #[test]
        fn lemma_holds(g in random_g(), le in -6.0f64..-2.0) {
            prop_assert!(verify_sign_lemma(&g, 10f64.powf(le)).holds);
        }
    }
}
