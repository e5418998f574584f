//! Flux models: flux, eigen-structure, entropy pair and Riemann solver.

mod burgers;
mod linear;
mod psystem;

use std::fmt::Debug;

use rand::Rng;

pub use burgers::Burgers;
pub use linear::LinearDiagonal;
pub use psystem::PSystem;

use crate::error::{Error, Result};

/// Eigenvalues in increasing order with unit right eigenvectors and dual left eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub right: Vec<Vec<f64>>,
    pub left: Vec<Vec<f64>>,
}

pub trait FluxModel: Send + Sync + Debug {
    fn name(&self) -> &str;
    fn n_comp(&self) -> usize;
    fn flux_into(&self, u: &[f64], out: &mut [f64]);
    /// Row-major Jacobian Df(u).
    fn jacobian(&self, u: &[f64]) -> Vec<f64>;
    fn eigen(&self, u: &[f64]) -> Eigen;
    fn entropy(&self, u: &[f64]) -> f64;
    fn entropy_flux(&self, u: &[f64]) -> f64;
    /// Interval [λ⁻, λ⁺] containing every characteristic speed on the validity region.
    fn speed_bounds(&self) -> (f64, f64);
    /// Rejects states outside the domain of the model.
    fn check_state(&self, u: &[f64]) -> Result<()>;
    /// Random state from the region where the speed bounds hold.
    fn sample_state(&self, rng: &mut dyn rand::RngCore) -> Vec<f64>;
    /// Solution of the Riemann problem with data `ul`, `ur`.
    fn solve_riemann(&self, ul: &[f64], ur: &[f64]) -> Result<RiemannFan<'_>>;
    /// State inside the rarefaction of `family` starting at `left` where the speed equals `xi`.
    fn rarefaction_state(&self, family: usize, left: &[f64], xi: f64) -> Vec<f64>;

    fn flux(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_comp()];
        self.flux_into(u, &mut out);
        out
    }

    fn eigenvalues(&self, u: &[f64]) -> Vec<f64> {
        self.eigen(u).values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Shock,
    Rarefaction,
    Contact,
}

/// One wave of a Riemann fan, between `states[family]` and `states[family + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wave {
    pub family: usize,
    pub kind: WaveKind,
    /// Speed of a shock or contact, or of the rarefaction's leading (left) edge.
    pub speed_lo: f64,
    /// Equal to `speed_lo` except for rarefactions.
    pub speed_hi: f64,
    pub strength: f64,
}

/// Self-similar Riemann solution.
#[derive(Debug, Clone)]
pub struct RiemannFan<'a> {
    pub model: &'a dyn FluxModel,
    /// u₀ = u⁻, u₁, …, u_n = u⁺.
    pub states: Vec<Vec<f64>>,
    pub waves: Vec<Wave>,
}

impl RiemannFan<'_> {
    pub fn left_state(&self) -> &[f64] {
        &self.states[0]
    }

    pub fn right_state(&self) -> &[f64] {
        self.states.last().expect("fan has states")
    }

    /// Value at x/t = xi; a shock exactly at xi yields its left state.
    pub fn sample(&self, xi: f64) -> Vec<f64> {
        for (k, w) in self.waves.iter().enumerate() {
            if xi <= w.speed_lo {
                return self.states[k].clone();
            }
            if w.kind == WaveKind::Rarefaction && xi < w.speed_hi {
                return self.model.rarefaction_state(w.family, &self.states[k], xi);
            }
        }
        self.right_state().to_vec()
    }

    /// Positions x/t of the fan's discontinuities and rarefaction edges.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .waves
            .iter()
            .flat_map(|w| [w.speed_lo, w.speed_hi])
            .collect();
        v.dedup();
        v
    }
}

/// Model lookup by configuration name.
pub fn model_by_name(name: &str) -> Result<Box<dyn FluxModel>> {
    match name {
        "psystem" => Ok(Box::new(PSystem)),
        "burgers" => Ok(Box::new(Burgers)),
        other => Err(Error::Config(format!("unknown model {other:?}"))),
    }
}

/// Largest |λ| at the given state.
pub fn max_abs_speed(model: &dyn FluxModel, u: &[f64]) -> f64 {
    model.eigenvalues(u).iter().fold(0.0, |m, l| m.max(l.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Central-difference gradient of a scalar function.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, u: &[f64], h: f64) -> Vec<f64> {
    let mut p = u.to_vec();
    (0..u.len())
        .map(|k| {
            p[k] = u[k] + h;
            let fp = f(&p);
            p[k] = u[k] - h;
            let fm = f(&p);
            p[k] = u[k];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Max over k of |Σ_i ∂η/∂u_i · ∂f_i/∂u_k − ∂q/∂u_k|, relative to the size of Dq.
pub fn entropy_compatibility_residual(model: &dyn FluxModel, u: &[f64]) -> f64 {
    let n = model.n_comp();
    let h = 1e-6;
    let deta = fd_gradient(|s| model.entropy(s), u, h);
    let dq = fd_gradient(|s| model.entropy_flux(s), u, h);
    let jac = model.jacobian(u);
    let scale = dq.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    (0..n)
        .map(|k| {
            let lhs: f64 = (0..n).map(|i| deta[i] * jac[i * n + k]).sum();
            (lhs - dq[k]).abs() / scale
        })
        .fold(0.0, f64::max)
}

/// Largest deviation from |r_i| = 1, ℓ_i·r_j = δ_ij and Df·r_i = λ_i r_i.
pub fn eigen_normalization_residual(model: &dyn FluxModel, u: &[f64]) -> f64 {
    let n = model.n_comp();
    let e = model.eigen(u);
    let jac = model.jacobian(u);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        worst = worst.max((dot(&e.right[i], &e.right[i]).sqrt() - 1.0).abs());
        for j in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(&e.left[i], &e.right[j]) - want).abs());
        }
        for row in 0..n {
            let ar: f64 = (0..n).map(|k| jac[row * n + k] * e.right[i][k]).sum();
            worst = worst.max((ar - e.values[i] * e.right[i][row]).abs());
        }
    }
    worst
}

/// Smallest eigenvalue of the finite-difference Hessian of η (2×2 or scalar models).
pub fn entropy_hessian_min_eigenvalue(model: &dyn FluxModel, u: &[f64]) -> f64 {
    let n = model.n_comp();
    let h = 1e-4;
    let mut hess = vec![0.0; n * n];
    let mut p = u.to_vec();
    for a in 0..n {
        for b in 0..n {
            let mut acc = 0.0;
            for (sa, sb, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                p.copy_from_slice(u);
                p[a] += sa * h;
                p[b] += sb * h;
                acc += w * model.entropy(&p);
            }
            hess[a * n + b] = acc / (4.0 * h * h);
        }
    }
    match n {
        1 => hess[0],
        2 => {
            let (a, b, d) = (hess[0], 0.5 * (hess[1] + hess[2]), hess[3]);
            let mean = 0.5 * (a + d);
            mean - (0.25 * (a - d) * (a - d) + b * b).sqrt()
        }
        _ => {
            // Gershgorin lower bound
            (0..n)
                .map(|i| {
                    hess[i * n + i]
                        - (0..n).filter(|&j| j != i).map(|j| hess[i * n + j].abs()).sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// Startup check of the entropy pair at `samples` random states.
pub fn validate_entropy_pair(model: &dyn FluxModel, samples: usize, seed: u64) -> Result<()> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let u = model.sample_state(&mut rng);
        let r = entropy_compatibility_residual(model, &u);
        if r > 1e-6 {
            return Err(Error::EntropyPair(format!(
                "{}: Dη·Df − Dq = {r:e} at {u:?}",
                model.name()
            )));
        }
        let m = entropy_hessian_min_eigenvalue(model, &u);
        if m < -1e-6 {
            return Err(Error::EntropyPair(format!(
                "{}: entropy Hessian has eigenvalue {m} at {u:?}",
                model.name()
            )));
        }
    }
    Ok(())
}

/// Sampled bound M_g on the quadratic interaction coefficients g^i_{jk} of
/// the gradient components w^i = ℓ_i·u_x, over the listed states.
pub fn estimate_mg(model: &dyn FluxModel, states: &[Vec<f64>]) -> f64 {
    let n = model.n_comp();
    let h = 1e-6;
    let mut mg: f64 = 0.0;
    for u in states {
        let e = model.eigen(u);
        // directional derivative of a vector field along direction d
        let ddir = |field: &dyn Fn(&[f64]) -> Vec<f64>, d: &[f64]| -> Vec<f64> {
            let up: Vec<f64> = u.iter().zip(d).map(|(a, b)| a + h * b).collect();
            let um: Vec<f64> = u.iter().zip(d).map(|(a, b)| a - h * b).collect();
            field(&up).iter().zip(field(&um)).map(|(p, m)| (p - m) / (2.0 * h)).collect()
        };
        for i in 0..n {
            let mut coef = vec![0.0; n * n];
            for j in 0..n {
                for k in (j + 1)..n {
                    let rk = |s: &[f64]| model.eigen(s).right[k].clone();
                    let rj = |s: &[f64]| model.eigen(s).right[j].clone();
                    let a = ddir(&rk, &e.right[j]);
                    let b = ddir(&rj, &e.right[k]);
                    let bracket: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
                    let c = (e.values[j] - e.values[k]) * dot(&e.left[i], &bracket);
                    coef[j * n + k] += 0.5 * c;
                    coef[k * n + j] += 0.5 * c;
                }
                let li = |s: &[f64]| vec![model.eigen(s).values[i]];
                let grad_r = ddir(&li, &e.right[j])[0];
                if j == i {
                    coef[i * n + i] -= grad_r;
                } else {
                    coef[j * n + i] -= 0.5 * grad_r;
                    coef[i * n + j] -= 0.5 * grad_r;
                }
            }
            mg = coef.iter().fold(mg, |m, c| m.max(c.abs()));
        }
    }
    mg
}

/// Sup over the listed states of max_i |ℓ_i|.
pub fn max_left_norm(model: &dyn FluxModel, states: &[Vec<f64>]) -> f64 {
    states
        .iter()
        .flat_map(|u| model.eigen(u).left)
        .map(|l| dot(&l, &l).sqrt())
        .fold(0.0, f64::max)
}

/// Random state within a ball of radius `r` around `u`, retried until admissible.
pub fn perturb_state(model: &dyn FluxModel, u: &[f64], r: f64, rng: &mut dyn rand::RngCore) -> Vec<f64> {
    loop {
        let p: Vec<f64> = u.iter().map(|x| x + rng.gen_range(-r..r) / (u.len() as f64).sqrt()).collect();
        if model.check_state(&p).is_ok() {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn models() -> Vec<Box<dyn FluxModel>> {
        vec![
            Box::new(PSystem),
            Box::new(Burgers),
            Box::new(LinearDiagonal::new(vec![0.25, 0.75], (0.0, 1.0))),
        ]
    }

    #[test]
    fn model_lookup() {
        assert_eq!(model_by_name("psystem").unwrap().n_comp(), 2);
        assert_eq!(model_by_name("burgers").unwrap().n_comp(), 1);
        assert!(model_by_name("euler").is_err());
    }

    #[test]
    fn invariants_at_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in models() {
            validate_entropy_pair(m.as_ref(), 200, 3).unwrap();
            let (lo, hi) = m.speed_bounds();
            for _ in 0..200 {
                let u = m.sample_state(&mut rng);
                assert!(eigen_normalization_residual(m.as_ref(), &u) < 1e-10, "{}", m.name());
                for l in m.eigenvalues(&u) {
                    assert!(lo < l && l < hi, "{}: {l} outside ({lo}, {hi})", m.name());
                }
                let e0 = m.eigen(&u);
                let du: Vec<f64> = u.iter().map(|x| x + 1e-6).collect();
                let e1 = m.eigen(&du);
                for i in 0..m.n_comp() {
                    assert!((e0.values[i] - e1.values[i]).abs() <= 1e-4);
                    assert!(e0.right[i].iter().zip(&e1.right[i]).all(|(a, b)| (a - b).abs() <= 1e-4));
                }
            }
        }
    }

    #[test]
    fn riemann_fans_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in models() {
            for _ in 0..300 {
                let ul = m.sample_state(&mut rng);
                let ur = perturb_state(m.as_ref(), &ul, 0.5, &mut rng);
                let fan = m.solve_riemann(&ul, &ur).unwrap();
                assert_eq!(fan.sample(-1e3), ul);
                assert_eq!(fan.sample(1e3), ur);
                let speeds = fan.breakpoints();
                assert!(speeds.windows(2).all(|w| w[0] <= w[1] + 1e-12), "{speeds:?}");
                for (k, w) in fan.waves.iter().enumerate() {
                    let (a, b) = (&fan.states[k], &fan.states[k + 1]);
                    match w.kind {
                        WaveKind::Shock | WaveKind::Contact => {
                            let (fa, fb) = (m.flux(a), m.flux(b));
                            for c in 0..m.n_comp() {
                                let rh = w.speed_lo * (b[c] - a[c]) - (fb[c] - fa[c]);
                                assert!(rh.abs() <= 1e-8, "{}: RH residual {rh}", m.name());
                            }
                            if w.kind == WaveKind::Shock {
                                assert!(w.strength <= 0.0);
                                // dissipation for the admissible orientation
                                let d = w.speed_lo * (m.entropy(b) - m.entropy(a))
                                    - (m.entropy_flux(b) - m.entropy_flux(a));
                                assert!(d >= -1e-12, "{}: entropy production {d}", m.name());
                            }
                        }
                        WaveKind::Rarefaction => {
                            assert!(w.strength >= 0.0);
                            assert!((w.speed_lo - m.eigenvalues(a)[w.family]).abs() < 1e-10);
                            assert!((w.speed_hi - m.eigenvalues(b)[w.family]).abs() < 1e-10);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn equal_states_give_trivial_fan() {
        for m in models() {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let u = m.sample_state(&mut rng);
            let fan = m.solve_riemann(&u, &u).unwrap();
            assert!(fan.waves.iter().all(|w| w.strength == 0.0));
            for xi in [-1.0, 0.0, 0.5, 1.0, 1.5, 3.0] {
                assert_eq!(fan.sample(xi), u);
            }
        }
    }

    #[test]
    fn burgers_interaction_coefficient_is_minus_one() {
        let states: Vec<Vec<f64>> = (0..5).map(|k| vec![k as f64 * 0.1]).collect();
        assert!((estimate_mg(&Burgers, &states) - 1.0).abs() < 1e-6);
        let lin = LinearDiagonal::new(vec![0.2, 0.6], (0.0, 1.0));
        assert!(estimate_mg(&lin, &[vec![0.3, 0.1]]) < 1e-8);
    }
}
