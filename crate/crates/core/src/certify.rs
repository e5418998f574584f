//! Assembly of the structural L¹ error certificate from the strip covers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{l1_distance, SolutionHistory};
use crate::postprocess::{PostprocessOutput, PostprocessParams, StripCover};

/// Unquantified constants of the error bound, all 1 unless calibrated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsConfig {
    #[serde(rename = "C_prime")]
    pub c_prime: f64,
    #[serde(rename = "C_dprime")]
    pub c_dprime: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    /// Stand-in for the Lipschitz constant of the semigroup.
    #[serde(rename = "L0")]
    pub l0: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig { c_prime: 1.0, c_dprime: 1.0, k1: 1.0, l0: 1.0 }
    }
}

impl ConstantsConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [self.c_prime, self.c_dprime, self.k1, self.l0];
        if all.iter().all(|c| *c > 0.0 && c.is_finite()) {
            Ok(())
        } else {
            Err(Error::Params(format!("constants must be positive, got {self:?}")))
        }
    }
}

/// Per-strip contributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripRecord {
    pub j: usize,
    pub t_lo: f64,
    pub kappa: f64,
    pub n_traced: usize,
    /// κ_j h + ε^(2/3) + h ε^(1/3).
    pub smooth_term: f64,
    /// Sum of the unreduced shock terms of the traced shocks.
    pub shock_term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorCertificate {
    /// "ok", or "no estimate" when the total variation gate failed.
    pub status: String,
    pub tv_ok: bool,
    pub sup_tv: f64,
    pub eps: f64,
    pub h: f64,
    pub rho: f64,
    pub delta: f64,
    pub nu: usize,
    pub kappa: Vec<f64>,
    pub traced_counts: Vec<usize>,
    /// (νh + Σκ_j) ε^(1/3) plus the tail L₀ (T − νh) sup TV.
    pub term_smooth: Option<f64>,
    /// (ε^(1/3) κ′ + ε^(2/3)) Σ N′(j).
    pub term_shock: Option<f64>,
    /// C′ term_smooth + C″ term_shock.
    pub bound: Option<f64>,
    pub jbig2_satisfied: bool,
    pub per_strip: Vec<StripRecord>,
    pub constants: ConstantsConfig,
    pub params: PostprocessParams,
    pub true_error: Option<f64>,
    pub ratio: Option<f64>,
}

impl ErrorCertificate {
    /// Records a measured error and its ratio to the bound.
    pub fn with_true_error(mut self, err: f64) -> Self {
        self.true_error = Some(err);
        self.ratio = self.bound.filter(|b| *b > 0.0).map(|b| err / b);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Structural error of one strip away from traced shocks: κ_j h + ε^(2/3) + h ε^(1/3).
pub fn smooth_strip_term(kappa_j: f64, params: &PostprocessParams) -> f64 {
    let e = params.eps;
    kappa_j * params.h + e.powf(2.0 / 3.0) + params.h * e.cbrt()
}

/// Structural error near one traced shock over one strip. With a large jump
/// this is h·S + ρκ′ + hκ′ + δ, S = ε/ρ + κ′ + (ρκ′ + δ)/h; otherwise S
/// enters with the power 2/3.
pub fn shock_strip_term(params: &PostprocessParams, large_jump: bool) -> f64 {
    let PostprocessParams { eps, h, rho, delta, kappa_prime: k, .. } = *params;
    let s = eps / rho + k + (rho * k + delta) / h;
    let s = if large_jump { s } else { s.powf(2.0 / 3.0) };
    h * s + rho * k + h * k + delta
}

/// σ_min ≥ K₁ (2ε^(1/3) + 2κ′)^(1/3).
pub fn jbig2_satisfied(params: &PostprocessParams, constants: &ConstantsConfig) -> bool {
    params.sigma_min >= constants.k1 * (2.0 * params.eps.cbrt() + 2.0 * params.kappa_prime).cbrt()
}

/// Per-shock large-jump test |u⁺ − u⁻| ≥ K₁ (ε/δ + κ′ + (ρκ′ + δ)/h)^(1/3).
pub fn jump_is_large(jump: f64, params: &PostprocessParams, constants: &ConstantsConfig) -> bool {
    let PostprocessParams { eps, h, rho, delta, kappa_prime: k, .. } = *params;
    jump >= constants.k1 * (eps / delta + k + (rho * k + delta) / h).cbrt()
}

/// (term_smooth, term_shock, bound) from νh, Σκ_j, ΣN′(j) and the time tail.
pub fn structural_bound(
    span: f64,
    kappa_sum: f64,
    n_traced: usize,
    tail: f64,
    params: &PostprocessParams,
    constants: &ConstantsConfig,
) -> (f64, f64, f64) {
    let e13 = params.eps.cbrt();
    let term_smooth = (span + kappa_sum) * e13 + tail;
    let term_shock = (e13 * params.kappa_prime + params.eps.powf(2.0 / 3.0)) * n_traced as f64;
    (term_smooth, term_shock, constants.c_prime * term_smooth + constants.c_dprime * term_shock)
}

fn no_estimate(sup_tv: f64, params: &PostprocessParams, constants: &ConstantsConfig, nu: usize) -> ErrorCertificate {
    ErrorCertificate {
        status: "no estimate".into(),
        tv_ok: false,
        sup_tv,
        eps: params.eps,
        h: params.h,
        rho: params.rho,
        delta: params.delta,
        nu,
        kappa: Vec::new(),
        traced_counts: Vec::new(),
        term_smooth: None,
        term_shock: None,
        bound: None,
        jbig2_satisfied: jbig2_satisfied(params, constants),
        per_strip: Vec::new(),
        constants: *constants,
        params: *params,
        true_error: None,
        ratio: None,
    }
}

/// Combines the covers of all ν strips into a certificate.
pub fn assemble(
    history: &SolutionHistory,
    covers: &[StripCover],
    params: &PostprocessParams,
    constants: &ConstantsConfig,
) -> Result<ErrorCertificate> {
    constants.validate()?;
    let nu = params.n_strips(history);
    let sup_tv = history.sup_tv();
    if sup_tv > params.tv_cap {
        return Ok(no_estimate(sup_tv, params, constants, nu));
    }
    if covers.len() != nu || covers.iter().enumerate().any(|(j, c)| c.j != j) {
        return Err(Error::MissingStrips { expected: nu, got: covers.len() });
    }
    let jbig2 = jbig2_satisfied(params, constants);
    let per_strip: Vec<StripRecord> = covers
        .iter()
        .map(|c| StripRecord {
            j: c.j,
            t_lo: c.t_lo,
            kappa: c.kappa_j,
            n_traced: c.n_traced(),
            smooth_term: smooth_strip_term(c.kappa_j, params),
            shock_term: c
                .traced
                .iter()
                .map(|s| shock_strip_term(params, jbig2 || jump_is_large(s.jump_size, params, constants)))
                .sum(),
        })
        .collect();
    let kappa: Vec<f64> = covers.iter().map(|c| c.kappa_j).collect();
    let traced_counts: Vec<usize> = covers.iter().map(StripCover::n_traced).collect();
    let span = nu as f64 * params.h;
    let tail = constants.l0 * (history.t_final() - history.t0 - span).max(0.0) * sup_tv;
    let (term_smooth, term_shock, bound) = structural_bound(
        span,
        kappa.iter().sum(),
        traced_counts.iter().sum(),
        tail,
        params,
        constants,
    );
    Ok(ErrorCertificate {
        status: "ok".into(),
        tv_ok: true,
        sup_tv,
        eps: params.eps,
        h: params.h,
        rho: params.rho,
        delta: params.delta,
        nu,
        kappa,
        traced_counts,
        term_smooth: Some(term_smooth),
        term_shock: Some(term_shock),
        bound: Some(bound),
        jbig2_satisfied: jbig2,
        per_strip,
        constants: *constants,
        params: *params,
        true_error: None,
        ratio: None,
    })
}

/// [`assemble`] on the output of [`crate::postprocess::postprocess`].
pub fn certify(history: &SolutionHistory, out: &PostprocessOutput, constants: &ConstantsConfig) -> Result<ErrorCertificate> {
    if !out.tv_ok {
        constants.validate()?;
        return Ok(no_estimate(out.sup_tv, &out.params, constants, out.params.n_strips(history)));
    }
    assemble(history, &out.covers, &out.params, constants)
}

/// L¹ distance between the final frames of `history` and of a reference run on
/// a mesh at least four times finer, over the populated extent of either.
pub fn measure_true_error(history: &SolutionHistory, reference: &SolutionHistory) -> Result<f64> {
    let (t, tr) = (history.t_final(), reference.t_final());
    if (t - tr).abs() > 1e-9 * t.abs().max(1.0) {
        return Err(Error::TimeMismatch { history: t, reference: tr });
    }
    let (m, mr) = (history.mesh(), reference.mesh());
    let same = std::ptr::eq(history, reference) || (m.same_as(mr) && history.frames.len() == reference.frames.len());
    if !same && mr.dx > m.dx / 4.0 * (1.0 + 1e-9) {
        return Err(Error::ReferenceTooCoarse { history: m.dx, reference: mr.dx });
    }
    let (u, v) = (history.last(), reference.last());
    let window = (m.x_min.max(mr.x_min), m.x_max.min(mr.x_max));
    let extent = [u.populated_extent(1e-12), v.populated_extent(1e-12)]
        .into_iter()
        .flatten()
        .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
        .map_or(window, |(a, b)| (a.max(window.0), b.min(window.1)));
    l1_distance(u, v, extent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridFunction, Mesh, SchemeId};
    use crate::models::{Burgers, PSystem};
    use crate::postprocess::{cover_strip, postprocess, DetectionSettings};
    use crate::schemes::{run, SchemeConfig};
    use approx::assert_relative_eq;

    fn params_for(eps: f64, h: f64) -> PostprocessParams {
        let g = GridFunction::constant(Mesh::with_dx(-1.0, 4.5, 1e-3).unwrap(), &[2.0, 0.0]).unwrap();
        let hist = SolutionHistory::from_frames(1e-3, 0.0, vec![g; 2], SchemeId::Godunov).unwrap();
        let mut p = PostprocessParams::for_history(&hist, &PSystem, DetectionSettings::interaction_example()).unwrap();
        p.eps = eps;
        p.h = h;
        p.rho = h;
        p.delta = eps.powf(2.0 / 3.0);
        p
    }

    #[test]
    fn smooth_term_examples() {
        let p = params_for(1e-3, 0.1);
        assert_relative_eq!(smooth_strip_term(0.0, &p), 0.02, max_relative = 1e-12);
        let e = 1e-6f64;
        let q = params_for(e, e.cbrt());
        assert_relative_eq!(smooth_strip_term(1.0, &q), e.cbrt() + 2.0 * e.powf(2.0 / 3.0), max_relative = 1e-12);
        let tiny = params_for(1e-12, 1e-4);
        assert!(smooth_strip_term(0.0, &tiny) < 1e-7);
    }

    #[test]
    fn shock_term_examples() {
        let mut p = params_for(1e-3, 0.1);
        p.kappa_prime = 0.0;
        // h(ε/ρ + δ/h) + δ = ε + 2ε^(2/3)
        assert_relative_eq!(shock_strip_term(&p, true), 1e-3 + 0.02, max_relative = 1e-12);
        p.kappa_prime = 0.1;
        // 0.1·(0.01 + 0.1 + 0.2) + (0.01 + 0.01 + 0.01)
        assert_relative_eq!(shock_strip_term(&p, true), 0.061, max_relative = 1e-12);
        // the small-jump form is weaker since S < 1
        assert!(shock_strip_term(&p, false) > shock_strip_term(&p, true));
        let mut q = params_for(1e-12, 1e-4);
        q.kappa_prime = 0.1;
        let mut r = params_for(1e-15, 1e-5);
        r.kappa_prime = 0.1;
        assert!(shock_strip_term(&r, true) < shock_strip_term(&q, true));
    }

    fn constant_history(n: usize) -> SolutionHistory {
        let g = GridFunction::constant(Mesh::with_dx(-1.0, 4.5, 0.004).unwrap(), &[2.0, 0.0]).unwrap();
        SolutionHistory::from_frames(0.002, 0.0, vec![g; n], SchemeId::Godunov).unwrap()
    }

    #[test]
    fn constant_history_gives_the_time_term_only() {
        let h = constant_history(301);
        let p = PostprocessParams::for_history(&h, &PSystem, DetectionSettings::interaction_example()).unwrap();
        let out = postprocess(&h, &p).unwrap();
        let c = certify(&h, &out, &ConstantsConfig::default()).unwrap();
        assert!(c.kappa.iter().all(|k| *k == 0.0) && c.traced_counts.iter().all(|n| *n == 0));
        let span = c.nu as f64 * p.h;
        assert_relative_eq!(c.bound.unwrap(), span * p.eps.cbrt(), max_relative = 1e-12);
        assert_eq!(c.term_shock, Some(0.0));
    }

    #[test]
    fn failed_gate_gives_no_estimate() {
        let h = constant_history(301);
        let mut s = DetectionSettings::interaction_example();
        s.tv_cap = -1.0;
        let p = PostprocessParams::for_history(&h, &PSystem, s).unwrap();
        let out = postprocess(&h, &p).unwrap();
        let c = certify(&h, &out, &ConstantsConfig::default()).unwrap();
        assert!(!c.tv_ok && c.bound.is_none());
        assert_eq!(c.status, "no estimate");
        assert!(c.to_json().unwrap().contains("\"bound\": null"));
    }

    #[test]
    fn missing_strips_is_an_error() {
        let h = constant_history(301);
        let p = PostprocessParams::for_history(&h, &PSystem, DetectionSettings::interaction_example()).unwrap();
        let one = vec![cover_strip(&h, 0, &[], &p).unwrap()];
        assert!(matches!(assemble(&h, &one, &p, &ConstantsConfig::default()), Err(Error::MissingStrips { .. })));
    }

    #[test]
    fn bound_is_monotone_and_deterministic() {
        let h = constant_history(301);
        let p = PostprocessParams::for_history(&h, &PSystem, DetectionSettings::interaction_example()).unwrap();
        let out = postprocess(&h, &p).unwrap();
        let k = ConstantsConfig::default();
        let base = assemble(&h, &out.covers, &p, &k).unwrap();
        assert_eq!(base.to_json().unwrap(), assemble(&h, &out.covers, &p, &k).unwrap().to_json().unwrap());
        let mut covers = out.covers.clone();
        covers[1].kappa_j = 0.3;
        let more = assemble(&h, &covers, &p, &k).unwrap();
        assert!(more.bound.unwrap() > base.bound.unwrap());
        let mut q = p;
        q.kappa_prime = 0.5;
        let c = assemble(&h, &covers, &q, &k).unwrap();
        assert!(c.bound.unwrap() >= more.bound.unwrap());
        let b = |c: &ErrorCertificate| c.bound.unwrap();
        assert_eq!(b(&base), k.c_prime * base.term_smooth.unwrap() + k.c_dprime * base.term_shock.unwrap());
    }

    #[test]
    fn true_error_of_a_traveling_shock() {
        assert_eq!(measure_true_error(&constant_history(5), &constant_history(5)).unwrap(), 0.0);
        // Burgers with u⁻ = 1, u⁺ = 0 moves at speed 1.5 in the shifted flux
        let mesh = Mesh::new(0.0, 2.0, 500).unwrap();
        let g0 = GridFunction::from_fn(mesh, 1, |x| vec![if x < 0.3 { 1.0 } else { 0.0 }]).unwrap();
        let cfg = SchemeConfig::new(SchemeId::Godunov, mesh.dx, 0.5 * mesh.dx, 0.6);
        let h = run(&Burgers, &g0, &cfg).unwrap();
        let fine = Mesh::new(0.0, 2.0, 4000).unwrap();
        let t = h.t_final();
        let exact = GridFunction::from_fn(fine, 1, |x| vec![if x < 0.3 + 1.5 * t { 1.0 } else { 0.0 }]).unwrap();
        let reference = SolutionHistory::new(1.0, t, exact, SchemeId::Godunov).unwrap();
        let err = measure_true_error(&h, &reference).unwrap();
        assert!(err > 0.0 && err <= 3.0 * mesh.dx, "{err}");
        let coarse = SolutionHistory::new(1.0, t, GridFunction::constant(mesh, &[0.0]).unwrap(), SchemeId::Godunov)
            .unwrap();
        assert!(matches!(measure_true_error(&h, &coarse), Err(Error::ReferenceTooCoarse { .. })));
        let off = SolutionHistory::new(1.0, t + 0.1, GridFunction::constant(fine, &[0.0]).unwrap(), SchemeId::Godunov)
            .unwrap();
        assert!(matches!(measure_true_error(&h, &off), Err(Error::TimeMismatch { .. })));
    }

    #[test]
    fn bound_vanishes_as_eps_shrinks() {
        let k = ConstantsConfig::default();
        let bounds: Vec<f64> = [1e-3, 1e-6, 1e-9]
            .iter()
            .map(|&eps| {
                let p = params_for(eps, eps.cbrt());
                let nu = (1.0 / p.h).floor();
                structural_bound(nu * p.h, 1.0, 3, 0.0, &p, &k).2
            })
            .collect();
        assert!(bounds.windows(2).all(|w| w[1] < w[0]), "{bounds:?}");
        assert!(bounds[2] < 0.01);
    }
}
