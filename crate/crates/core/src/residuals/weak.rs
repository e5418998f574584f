use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::test_function::TestFunction;
use crate::error::{Error, Result};
use crate::grid::{l1_distance, SolutionHistory};
use crate::models::FluxModel;

/// One evaluation of a weak-form residual against a test function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub tau: f64,
    pub tau_prime: f64,
    /// |defect| for the conservation form; the signed value for the entropy form.
    pub residual: f64,
    /// ε·‖φ‖_{W1,∞}·(τ′ − τ)·sup TV.
    pub normalizer: f64,
    pub ratio: f64,
    /// max(0, −ratio): the constant C with residual ≥ −C·normalizer.
    pub c_report: f64,
}

impl ResidualReport {
    fn new(tau: f64, tau_prime: f64, residual: f64, normalizer: f64) -> Self {
        let ratio = if normalizer > 0.0 {
            residual / normalizer
        } else if residual == 0.0 {
            0.0
        } else {
            residual.signum() * f64::INFINITY
        };
        ResidualReport { tau, tau_prime, residual, normalizer, ratio, c_report: (-ratio).max(0.0) }
    }
}

/// Writes reports as `tau,tau_prime,phi_id,residual,normalizer,ratio`.
pub fn write_residual_csv<W: std::io::Write>(mut w: W, rows: &[(String, ResidualReport)]) -> Result<()> {
    writeln!(w, "tau,tau_prime,phi_id,residual,normalizer,ratio")?;
    for (id, r) in rows {
        writeln!(
            w,
            "{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e}",
            r.tau, r.tau_prime, id, r.residual, r.normalizer, r.ratio
        )?;
    }
    Ok(())
}

/// Frame indices of τ and τ′, which must be frame times with τ < τ′.
fn frame_span(history: &SolutionHistory, tau: f64, tau_prime: f64) -> Result<(usize, usize)> {
    let a = history
        .exact_frame(tau)
        .ok_or_else(|| Error::InvalidHistory(format!("tau = {tau} is not a frame time")))?;
    let b = history
        .exact_frame(tau_prime)
        .ok_or_else(|| Error::InvalidHistory(format!("tau' = {tau_prime} is not a frame time")))?;
    if b <= a {
        return Err(Error::InvalidHistory(format!("need tau < tau', got {tau} and {tau_prime}")));
    }
    Ok((a, b))
}

fn check_support(history: &SolutionHistory, phi: &TestFunction) -> Result<()> {
    if let Some((_, _, lo, hi)) = phi.support() {
        let mesh = history.mesh();
        let tol = 1e-12 * (mesh.x_max - mesh.x_min);
        if lo < mesh.x_min - tol || hi > mesh.x_max + tol {
            return Err(Error::SupportOutsideMesh { lo, hi });
        }
    }
    Ok(())
}

/// Evaluates ∫u(τ)φ(τ) − ∫u(τ′)φ(τ′) + ∫∫(u φ_t + F(u) φ_x) for a scalar
/// density `density(u)` and flux `flux(u)` already contracted with the weights.
///
/// Frames are held constant on [t_m, t_{m+1}), which makes the u φ_t part
/// telescope into Σ ∫(U_m − U_{m+1}) φ(t_{m+1}); the flux part is exact in
/// space and uses refined Gauss quadrature for ∫T dt.
fn weak_defect(
    history: &SolutionHistory,
    phi: &TestFunction,
    (a, b): (usize, usize),
    density: &dyn Fn(&[f64]) -> f64,
    flux: &dyn Fn(&[f64]) -> f64,
    normalizer: f64,
) -> f64 {
    let mesh = *history.mesh();
    let Some((_, _, xlo, xhi)) = phi.support() else { return 0.0 };
    let i0 = mesh.cell_of(xlo);
    let i1 = mesh.cell_of(xhi);
    // X averaged over each cell, and X at the interfaces bounding those cells
    let xbar: Vec<f64> =
        (i0..=i1).map(|i| phi.space.integral(mesh.interface(i), mesh.interface(i + 1))).collect();
    let xint: Vec<f64> = (i0..=i1 + 1).map(|i| phi.space.value(mesh.interface(i))).collect();

    let dens: Vec<Vec<f64>> = (a..=b)
        .map(|m| (i0..=i1).map(|i| density(history.frames[m].cell(i))).collect())
        .collect();
    let flux_sums: Vec<f64> = (a..b)
        .map(|m| {
            let f = &history.frames[m];
            (i0..=i1).map(|i| flux(f.cell(i)) * (xint[i - i0 + 1] - xint[i - i0])).sum()
        })
        .collect();

    let mut mass = 0.0;
    for m in a..b {
        let tn = phi.time.value(history.times[m + 1]);
        if tn == 0.0 {
            continue;
        }
        let (d0, d1) = (&dens[m - a], &dens[m + 1 - a]);
        mass += tn * (0..xbar.len()).map(|k| (d0[k] - d1[k]) * xbar[k]).sum::<f64>();
    }
    let flux_term = |panels: usize| -> f64 {
        (a..b)
            .map(|m| {
                if flux_sums[m - a] == 0.0 {
                    0.0
                } else {
                    flux_sums[m - a] * phi.time.integral(history.times[m], history.times[m + 1], panels)
                }
            })
            .sum()
    };
    let mut panels = 1;
    let mut prev = flux_term(panels);
    loop {
        panels *= 2;
        let next = flux_term(panels);
        let change = (next - prev).abs();
        prev = next;
        if change <= (0.01 * normalizer).max(1e-13 * next.abs().max(1e-300)) || panels >= 1 << 12 {
            break;
        }
    }
    mass + prev
}

fn normalizer(history: &SolutionHistory, phi: &TestFunction, tau: f64, tau_prime: f64) -> f64 {
    history.eps() * phi.w1inf_norm() * (tau_prime - tau) * history.sup_tv_between(tau, tau_prime)
}

/// Conservation-form residual of the history against a vector test function.
pub fn weak_residual_q1(
    history: &SolutionHistory,
    model: &dyn FluxModel,
    phi: &TestFunction,
    tau: f64,
    tau_prime: f64,
) -> Result<ResidualReport> {
    let span = frame_span(history, tau, tau_prime)?;
    if phi.weights.len() != history.n_comp() {
        return Err(Error::ComponentMismatch { left: phi.weights.len(), right: history.n_comp() });
    }
    check_support(history, phi)?;
    let norm = normalizer(history, phi, tau, tau_prime);
    if phi.is_zero() {
        return Ok(ResidualReport::new(tau, tau_prime, 0.0, norm));
    }
    let w = &phi.weights;
    let density = |u: &[f64]| u.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
    let flux = |u: &[f64]| model.flux(u).iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
    let r = weak_defect(history, phi, span, &density, &flux, norm);
    Ok(ResidualReport::new(tau, tau_prime, r.abs(), norm))
}

/// Signed entropy-form residual against a scalar nonnegative test function.
pub fn entropy_residual_q2(
    history: &SolutionHistory,
    model: &dyn FluxModel,
    phi: &TestFunction,
    tau: f64,
    tau_prime: f64,
) -> Result<ResidualReport> {
    let span = frame_span(history, tau, tau_prime)?;
    if phi.weights.len() != 1 {
        return Err(Error::ComponentMismatch { left: phi.weights.len(), right: 1 });
    }
    check_support(history, phi)?;
    let norm = normalizer(history, phi, tau, tau_prime);
    if phi.is_zero() {
        return Ok(ResidualReport::new(tau, tau_prime, 0.0, norm));
    }
    let (t0, t1, x0, x1) = phi.support().expect("nonzero test function");
    let (t0, t1) = (t0.max(tau), t1.min(tau_prime));
    for i in 0..=100 {
        for j in 0..=100 {
            let t = t0 + (t1 - t0) * i as f64 / 100.0;
            let x = x0 + (x1 - x0) * j as f64 / 100.0;
            if phi.weights[0] * phi.scalar(t, x) < 0.0 {
                return Err(Error::NegativeTestFunction { t, x });
            }
        }
    }
    let w = phi.weights[0];
    let density = |u: &[f64]| w * model.entropy(u);
    let flux = |u: &[f64]| w * model.entropy_flux(u);
    let r = weak_defect(history, phi, span, &density, &flux, norm);
    Ok(ResidualReport::new(tau, tau_prime, r, norm))
}

/// Empirical L in ‖u(τ′) − u(τ)‖_{L¹} ≤ L (τ′ − τ) sup TV, over every
/// adjacent pair and at least 100 seeded random pairs.
pub fn check_lipschitz_al(history: &SolutionHistory) -> Result<f64> {
    if history.len() < 2 {
        return Err(Error::InvalidHistory("need at least two frames".into()));
    }
    let tv = history.sup_tv();
    if tv == 0.0 {
        return Ok(0.0);
    }
    let mesh = *history.mesh();
    let extent = (mesh.x_min, mesh.x_max);
    let mut pairs: Vec<(usize, usize)> = (0..history.len() - 1).map(|m| (m, m + 1)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xa1);
    for _ in 0..100 {
        let a = rng.gen_range(0..history.len() - 1);
        let b = rng.gen_range(a + 1..history.len());
        pairs.push((a, b));
    }
    let mut worst: f64 = 0.0;
    for (a, b) in pairs {
        let d = l1_distance(&history.frames[a], &history.frames[b], extent)?;
        worst = worst.max(d / ((history.times[b] - history.times[a]) * tv));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridFunction, Mesh, SchemeId};
    use crate::models::{Burgers, LinearDiagonal, PSystem};
    use crate::residuals::SpaceProfile;
    use crate::schemes::{run, SchemeConfig};

    fn constant_history() -> SolutionHistory {
        let g = GridFunction::constant(Mesh::new(0.0, 1.0, 50).unwrap(), &[2.0, 0.1]).unwrap();
        SolutionHistory::from_frames(0.01, 0.0, vec![g; 11], SchemeId::Godunov).unwrap()
    }

    fn burgers_run(cells: usize) -> SolutionHistory {
        let mesh = Mesh::new(0.0, 1.0, cells).unwrap();
        let g0 = GridFunction::from_fn(mesh, 1, |x| vec![0.3 * (2.0 * std::f64::consts::PI * x).sin()]).unwrap();
        let cfg = SchemeConfig::new(SchemeId::Godunov, mesh.dx, 0.5 * mesh.dx, 0.2);
        run(&Burgers, &g0, &cfg).unwrap()
    }

    #[test]
    fn zero_test_function_gives_zero() {
        let h = constant_history();
        let r = weak_residual_q1(&h, &PSystem, &TestFunction::zero(2), 0.0, 0.1).unwrap();
        assert_eq!(r.residual, 0.0);
        let r = entropy_residual_q2(&h, &PSystem, &TestFunction::zero(1), 0.0, 0.1).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn constant_history_cancels() {
        let h = constant_history();
        let phi = TestFunction::bump(0.05, 0.04, 0.5, 0.2, vec![1.0, 0.5]);
        assert!(weak_residual_q1(&h, &PSystem, &phi, 0.0, 0.1).unwrap().residual < 1e-13);
        let phi = TestFunction::bump(0.05, 0.04, 0.5, 0.2, vec![1.0]);
        assert!(entropy_residual_q2(&h, &PSystem, &phi, 0.0, 0.1).unwrap().residual.abs() < 1e-13);
    }

    #[test]
    fn support_and_sign_errors() {
        let h = constant_history();
        let wide = TestFunction::bump(0.05, 0.04, 0.9, 0.2, vec![1.0, 0.0]);
        assert!(matches!(weak_residual_q1(&h, &PSystem, &wide, 0.0, 0.1), Err(Error::SupportOutsideMesh { .. })));
        let neg = TestFunction::bump(0.05, 0.04, 0.5, 0.2, vec![-1.0]);
        assert!(matches!(
            entropy_residual_q2(&h, &PSystem, &neg, 0.0, 0.1),
            Err(Error::NegativeTestFunction { .. })
        ));
    }

    #[test]
    fn residual_halves_with_the_mesh() {
        let phi = TestFunction::bump(0.1, 0.09, 0.5, 0.3, vec![1.0]);
        let coarse = weak_residual_q1(&burgers_run(100), &Burgers, &phi, 0.0, 0.2).unwrap();
        let fine = weak_residual_q1(&burgers_run(200), &Burgers, &phi, 0.0, 0.2).unwrap();
        let q = coarse.residual / fine.residual;
        assert!((1.4..=2.6).contains(&q), "ratio {q}");
    }

    #[test]
    fn shift_compensated_linear_residual_is_invariant() {
        // f(u) = a u; adding c to u and using f(u) − a c leaves the residual unchanged
        let a = 0.7;
        let model = LinearDiagonal::new(vec![a], (0.0, 1.0));
        let mesh = Mesh::new(0.0, 1.0, 80).unwrap();
        let g0 = GridFunction::from_fn(mesh, 1, |x| vec![if (0.2..0.4).contains(&x) { 1.0 } else { 0.0 }]).unwrap();
        let cfg = SchemeConfig::new(SchemeId::Godunov, mesh.dx, 0.5 * mesh.dx, 0.1);
        let h = run(&model, &g0, &cfg).unwrap();
        let c = 3.0;
        let shifted_frames: Vec<_> = h
            .frames
            .iter()
            .map(|f| GridFunction::new(f.mesh, 1, f.values.iter().map(|v| v + c).collect()).unwrap())
            .collect();
        let hs = SolutionHistory::from_frames(h.dt, h.t0, shifted_frames, h.scheme_id).unwrap();
        let phi = TestFunction::bump(0.05, 0.04, 0.4, 0.3, vec![1.0]);
        let (t1, t2) = (h.times[0], h.times[h.len() - 1]);
        let norm = normalizer(&h, &phi, t1, t2);
        let span = frame_span(&h, t1, t2).unwrap();
        let base = weak_defect(&h, &phi, span, &|u| u[0], &|u| a * u[0], norm);
        let moved = weak_defect(&hs, &phi, span, &|u| u[0], &|u| a * u[0] - a * c, norm);
        assert!((base - moved).abs() < 1e-12, "{base} vs {moved}");
    }

    #[test]
    fn piecewise_linear_phi_is_accepted() {
        let h = burgers_run(100);
        let phi = TestFunction::new(
            crate::residuals::TimeProfile::Constant,
            SpaceProfile::PiecewiseLinear { xs: vec![0.2, 0.3, 0.6, 0.7], ys: vec![0.0, 1.0, 1.0, 0.0] },
            vec![1.0],
        );
        let r = entropy_residual_q2(&h, &Burgers, &phi, 0.0, 0.2).unwrap();
        assert!(r.residual.is_finite());
    }

    #[test]
    fn lipschitz_constant_is_bounded_by_the_speed() {
        assert_eq!(check_lipschitz_al(&constant_history()).unwrap(), 0.0);
        let h = burgers_run(100);
        // speeds 1 + u lie in [0.7, 1.3]
        let l = check_lipschitz_al(&h).unwrap();
        assert!(l > 0.0 && l <= 1.3 + 1e-6, "L = {l}");
    }
}
