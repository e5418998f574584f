//! Isentropic gas dynamics in Lagrangian coordinates, shifted so that both
//! characteristic speeds are nonnegative when v ≥ 1.
//!
//! State (v, u), flux f(v, u) = (v − u, u + 1/(2v²)), speeds 1 ± v^{-3/2}.
//! The shift is the change of frame x ↦ x + t applied to the classical
//! p-system with pressure p(v) = 1/(2v²), so Riemann curves are the
//! classical ones and all wave speeds move by +1.

use rand::Rng;

use super::{Eigen, FluxModel, RiemannFan, Wave, WaveKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct PSystem;

fn pressure(v: f64) -> f64 {
    0.5 / (v * v)
}

fn sound_speed(v: f64) -> f64 {
    v.powf(-1.5)
}

/// u on the 1-wave curve through (vl, ul).
fn u_from_left(vl: f64, ul: f64, v: f64) -> f64 {
    if v >= vl {
        ul + 2.0 * (vl.powf(-0.5) - v.powf(-0.5))
    } else {
        ul - ((pressure(v) - pressure(vl)) * (vl - v)).sqrt()
    }
}

/// u of states joined to (vr, ur) by a 2-wave.
fn u_from_right(vr: f64, ur: f64, v: f64) -> f64 {
    if v >= vr {
        ur - 2.0 * (vr.powf(-0.5) - v.powf(-0.5))
    } else {
        ur + ((pressure(v) - pressure(vr)) * (vr - v)).sqrt()
    }
}

const MAX_ITER: usize = 200;
const TOL: f64 = 1e-12;

impl PSystem {
    fn wave(family: usize, a: &[f64], b: &[f64]) -> Wave {
        let (va, vb) = (a[0], b[0]);
        // strength is the change of v, signed so that negative means shock
        let (strength, sign) = if family == 0 { (vb - va, -1.0) } else { (va - vb, 1.0) };
        if strength == 0.0 {
            let s = 1.0 + sign * sound_speed(va);
            return Wave { family, kind: WaveKind::Shock, speed_lo: s, speed_hi: s, strength };
        }
        if strength < 0.0 {
            let s = 1.0 + sign * ((pressure(vb) - pressure(va)) / (va - vb)).abs().sqrt();
            Wave { family, kind: WaveKind::Shock, speed_lo: s, speed_hi: s, strength }
        } else {
            Wave {
                family,
                kind: WaveKind::Rarefaction,
                speed_lo: 1.0 + sign * sound_speed(va),
                speed_hi: 1.0 + sign * sound_speed(vb),
                strength,
            }
        }
    }
}

impl FluxModel for PSystem {
    fn name(&self) -> &str {
        "psystem"
    }

    fn n_comp(&self) -> usize {
        2
    }

    fn flux_into(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0] - u[1];
        out[1] = u[1] + pressure(u[0]);
    }

    fn jacobian(&self, u: &[f64]) -> Vec<f64> {
        vec![1.0, -1.0, -1.0 / (u[0] * u[0] * u[0]), 1.0]
    }

    fn eigen(&self, u: &[f64]) -> Eigen {
        let c = sound_speed(u[0]);
        let s = (1.0 + c * c).sqrt();
        Eigen {
            values: vec![1.0 - c, 1.0 + c],
            right: vec![vec![1.0 / s, c / s], vec![-1.0 / s, c / s]],
            left: vec![vec![0.5 * s, 0.5 * s / c], vec![-0.5 * s, 0.5 * s / c]],
        }
    }

    fn entropy(&self, u: &[f64]) -> f64 {
        0.5 * u[1] * u[1] + 0.5 / u[0]
    }

    fn entropy_flux(&self, u: &[f64]) -> f64 {
        u[1] * pressure(u[0]) + self.entropy(u)
    }

    fn speed_bounds(&self) -> (f64, f64) {
        (0.0, 2.0)
    }

    fn check_state(&self, u: &[f64]) -> Result<()> {
        if u[0] > 0.0 && u.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::Vacuum(u[0]))
        }
    }

    fn sample_state(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        vec![rng.gen_range(1.05..4.0), rng.gen_range(-1.0..1.0)]
    }

    fn solve_riemann(&self, ul: &[f64], ur: &[f64]) -> Result<RiemannFan<'_>> {
        self.check_state(ul)?;
        self.check_state(ur)?;
        let (vl, uul, vr, uur) = (ul[0], ul[1], ur[0], ur[1]);
        let g = |v: f64| u_from_left(vl, uul, v) - u_from_right(vr, uur, v);
        let (vm, um) = if ul == ur {
            (vl, uul)
        } else {
            let limit = uul - uur + 2.0 * (vl.powf(-0.5) + vr.powf(-0.5));
            if limit <= 0.0 {
                return Err(Error::RiemannDiverged(format!(
                    "states {ul:?}, {ur:?} are joined through vacuum"
                )));
            }
            let mut lo = 0.5 * vl.min(vr);
            let mut hi = 2.0 * vl.max(vr);
            let mut n = 0;
            while g(lo) > 0.0 {
                lo *= 0.5;
                n += 1;
                if n > MAX_ITER {
                    return Err(Error::RiemannDiverged("no lower bracket".into()));
                }
            }
            while g(hi) < 0.0 {
                hi *= 2.0;
                n += 1;
                if n > MAX_ITER || !hi.is_finite() {
                    return Err(Error::RiemannDiverged("no upper bracket".into()));
                }
            }
            let mut iter = 0;
            while hi - lo > TOL * hi.max(1.0) {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                iter += 1;
                if iter > MAX_ITER {
                    return Err(Error::RiemannDiverged(format!(
                        "bisection did not converge (bracket [{lo}, {hi}])"
                    )));
                }
            }
            let vm = 0.5 * (lo + hi);
            (vm, 0.5 * (u_from_left(vl, uul, vm) + u_from_right(vr, uur, vm)))
        };
        let mid = vec![vm, um];
        let waves = vec![PSystem::wave(0, ul, &mid), PSystem::wave(1, &mid, ur)];
        Ok(RiemannFan { model: self, states: vec![ul.to_vec(), mid, ur.to_vec()], waves })
    }

    fn rarefaction_state(&self, family: usize, left: &[f64], xi: f64) -> Vec<f64> {
        let (va, ua) = (left[0], left[1]);
        if family == 0 {
            let v = (1.0 - xi).powf(-2.0 / 3.0);
            vec![v, u_from_left(va, ua, v)]
        } else {
            let v = (xi - 1.0).powf(-2.0 / 3.0);
            vec![v, ua + 2.0 * (v.powf(-0.5) - va.powf(-0.5))]
        }
    }
}
