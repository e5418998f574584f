//! Decoupled linear advection f(u) = Λu with constant diagonal Λ.

use rand::Rng;

use super::{Eigen, FluxModel, RiemannFan, Wave, WaveKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LinearDiagonal {
    speeds: Vec<f64>,
    bounds: (f64, f64),
}

impl LinearDiagonal {
    /// `speeds` must be strictly increasing and lie inside `bounds`.
    pub fn new(speeds: Vec<f64>, bounds: (f64, f64)) -> Self {
        assert!(speeds.windows(2).all(|w| w[0] < w[1]), "speeds must increase");
        LinearDiagonal { speeds, bounds }
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }
}

impl FluxModel for LinearDiagonal {
    fn name(&self) -> &str {
        "linear"
    }

    fn n_comp(&self) -> usize {
        self.speeds.len()
    }

    fn flux_into(&self, u: &[f64], out: &mut [f64]) {
        for ((o, l), x) in out.iter_mut().zip(&self.speeds).zip(u) {
            *o = l * x;
        }
    }

    fn jacobian(&self, _u: &[f64]) -> Vec<f64> {
        let n = self.n_comp();
        let mut j = vec![0.0; n * n];
        for (i, l) in self.speeds.iter().enumerate() {
            j[i * n + i] = *l;
        }
        j
    }

    fn eigen(&self, _u: &[f64]) -> Eigen {
        let n = self.n_comp();
        let basis: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect()).collect();
        Eigen { values: self.speeds.clone(), right: basis.clone(), left: basis }
    }

    fn entropy(&self, u: &[f64]) -> f64 {
        0.5 * u.iter().map(|x| x * x).sum::<f64>()
    }

    fn entropy_flux(&self, u: &[f64]) -> f64 {
        0.5 * u.iter().zip(&self.speeds).map(|(x, l)| l * x * x).sum::<f64>()
    }

    fn speed_bounds(&self) -> (f64, f64) {
        self.bounds
    }

    fn check_state(&self, u: &[f64]) -> Result<()> {
        if u.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidGridFunction(format!("non-finite state {u:?}")))
        }
    }

    fn sample_state(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        (0..self.n_comp()).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    fn solve_riemann(&self, ul: &[f64], ur: &[f64]) -> Result<RiemannFan<'_>> {
        let n = self.n_comp();
        let mut states = vec![ul.to_vec()];
        let mut waves = Vec::with_capacity(n);
        for i in 0..n {
            let mut next = states[i].clone();
            next[i] = ur[i];
            waves.push(Wave {
                family: i,
                kind: WaveKind::Contact,
                speed_lo: self.speeds[i],
                speed_hi: self.speeds[i],
                strength: ur[i] - ul[i],
            });
            states.push(next);
        }
        Ok(RiemannFan { model: self, states, waves })
    }

    fn rarefaction_state(&self, _family: usize, left: &[f64], _xi: f64) -> Vec<f64> {
        left.to_vec()
    }
}
