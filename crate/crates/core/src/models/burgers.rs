//! Shifted Burgers equation f(u) = u²/2 + u, so that speeds u + 1 lie in
//! [0, 2] for |u| ≤ 1.

use rand::Rng;

use super::{Eigen, FluxModel, RiemannFan, Wave, WaveKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct Burgers;

impl FluxModel for Burgers {
    fn name(&self) -> &str {
        "burgers"
    }

    fn n_comp(&self) -> usize {
        1
    }

    fn flux_into(&self, u: &[f64], out: &mut [f64]) {
        out[0] = 0.5 * u[0] * u[0] + u[0];
    }

    fn jacobian(&self, u: &[f64]) -> Vec<f64> {
        vec![u[0] + 1.0]
    }

    fn eigen(&self, u: &[f64]) -> Eigen {
        Eigen { values: vec![u[0] + 1.0], right: vec![vec![1.0]], left: vec![vec![1.0]] }
    }

    fn entropy(&self, u: &[f64]) -> f64 {
        u[0] * u[0]
    }

    fn entropy_flux(&self, u: &[f64]) -> f64 {
        2.0 / 3.0 * u[0].powi(3) + u[0] * u[0]
    }

    fn speed_bounds(&self) -> (f64, f64) {
        (0.0, 2.0)
    }

    fn check_state(&self, u: &[f64]) -> Result<()> {
        if u[0].is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidGridFunction(format!("non-finite state {u:?}")))
        }
    }

    fn sample_state(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        vec![rng.gen_range(-0.95..0.95)]
    }

    fn solve_riemann(&self, ul: &[f64], ur: &[f64]) -> Result<RiemannFan<'_>> {
        let (a, b) = (ul[0], ur[0]);
        let strength = b - a;
        let wave = if strength <= 0.0 {
            let s = 0.5 * (a + b) + 1.0;
            Wave { family: 0, kind: WaveKind::Shock, speed_lo: s, speed_hi: s, strength }
        } else {
            Wave { family: 0, kind: WaveKind::Rarefaction, speed_lo: a + 1.0, speed_hi: b + 1.0, strength }
        };
        Ok(RiemannFan { model: self, states: vec![ul.to_vec(), ur.to_vec()], waves: vec![wave] })
    }

    fn rarefaction_state(&self, _family: usize, _left: &[f64], xi: f64) -> Vec<f64> {
        vec![xi - 1.0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_simpson;

    #[test]
    fn flux_and_speed() {
        assert_eq!(Burgers.flux(&[0.0]), vec![0.0]);
        assert_eq!(Burgers.eigenvalues(&[0.5]), vec![1.5]);
    }

    #[test]
    fn entropy_flux_is_integral_of_eta_prime_f_prime() {
        let u = 0.3;
        let q = adaptive_simpson(&|s: f64| 2.0 * s * (s + 1.0), 0.0, u, 1e-14);
        assert!((q - Burgers.entropy_flux(&[u])).abs() < 1e-10);
    }

    #[test]
    fn shock_speed_and_tie_break() {
        let fan = Burgers.solve_riemann(&[1.0], &[0.0]).unwrap();
        assert_eq!(fan.waves.len(), 1);
        assert_eq!(fan.waves[0].kind, WaveKind::Shock);
        assert_eq!(fan.waves[0].speed_lo, 1.5);
        assert_eq!(fan.sample(1.5), vec![1.0]);
        assert_eq!(fan.sample(1.5 + 1e-12), vec![0.0]);
    }
}
