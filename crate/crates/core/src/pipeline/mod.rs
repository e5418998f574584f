//! Configuration-driven runs: build the model, advance the scheme, check the
//! residual hypotheses, post-process and write the certificate.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::certify::{certify, measure_true_error, ConstantsConfig, ErrorCertificate};
use crate::error::{Error, Result};
use crate::grid::{fmt_real, GridFunction, Mesh, SchemeId, SolutionHistory};
use crate::models::{model_by_name, FluxModel};
use crate::postprocess::{
    postprocess, write_covers_csv, write_flags_csv, write_kappa_csv, write_traces_csv, DetectionSettings,
    PostprocessOutput, PostprocessParams,
};
use crate::residuals::{
    check_lipschitz_al, entropy_residual_q2, weak_residual_q1, write_residual_csv, ResidualReport, TestFunction,
};
use crate::schemes::{run, SchemeConfig};

/// Overrides `output.dir` when set.
pub const OUTPUT_DIR_ENV: &str = "SHOCKCERT_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub name: String,
}

/// Either a named preset or piecewise-constant data on a window.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDataSection {
    pub preset: Option<String>,
    pub window: Option<[f64; 2]>,
    #[serde(default)]
    pub breaks: Vec<f64>,
    #[serde(default)]
    pub states: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub id: String,
    pub dx: f64,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "one")]
    pub cfl_guard: f64,
    pub smoothing_delta: Option<f64>,
    #[serde(default = "one_usize")]
    pub record_stride: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PostprocessSection {
    pub sigma_flag: f64,
    pub k_flag: f64,
    pub kappa_prime: f64,
    pub sigma_min: f64,
    pub tv_cap: f64,
    pub h: Option<f64>,
    pub rho: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Write every k-th recorded frame; 0 writes only the first and last.
    #[serde(default)]
    pub snapshot_stride: usize,
    /// Refinement of the reference run for the true error; 0 skips it.
    #[serde(default)]
    pub reference_refinement: usize,
    #[serde(default = "yes")]
    pub residuals: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: default_dir(), snapshot_stride: 0, reference_refinement: 0, residuals: true }
    }
}

fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn yes() -> bool {
    true
}
fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub initial_data: InitialDataSection,
    pub scheme: SchemeSection,
    pub postprocess: PostprocessSection,
    #[serde(default)]
    pub constants: ConstantsConfig,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// The p-system interaction example on [−1, 4.5] with σ = 0.0063, K = 25,
    /// κ′ = 0.1, σ_min = 0.4.
    pub fn paper_rd(dx: f64, dt: f64, t_final: f64) -> Self {
        let s = DetectionSettings::interaction_example();
        RunConfig {
            model: ModelSection { name: "psystem".into() },
            initial_data: InitialDataSection { preset: Some("paper-rd".into()), window: None, breaks: vec![], states: vec![] },
            scheme: SchemeSection {
                id: "godunov".into(),
                dx,
                dt,
                t_final,
                cfl_guard: 1.0,
                smoothing_delta: None,
                record_stride: 1,
            },
            postprocess: PostprocessSection {
                sigma_flag: s.sigma_flag,
                k_flag: s.k_flag,
                kappa_prime: s.kappa_prime,
                sigma_min: s.sigma_min,
                tv_cap: s.tv_cap,
                h: None,
                rho: None,
                delta: None,
            },
            constants: ConstantsConfig::default(),
            output: OutputSection::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let model = model_by_name(&self.model.name)?;
        self.scheme_config()?;
        self.constants.validate()?;
        self.initial_data(model.as_ref())?;
        let r = self.output.reference_refinement;
        if r != 0 && r < 4 {
            return Err(Error::Config(format!("reference_refinement must be 0 or at least 4, got {r}")));
        }
        Ok(())
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig> {
        let s = &self.scheme;
        let id = SchemeId::from_name(&s.id)?;
        if id == SchemeId::Exact {
            return Err(Error::Config("scheme \"exact\" cannot be run".into()));
        }
        if s.record_stride == 0 {
            return Err(Error::Config("record_stride must be at least 1".into()));
        }
        let mut c = SchemeConfig::new(id, s.dx, s.dt, s.t_final);
        c.cfl_guard = s.cfl_guard;
        c.smoothing_delta = s.smoothing_delta;
        c.record_stride = s.record_stride;
        Ok(c)
    }

    /// Initial grid function on the configured window and dx.
    pub fn initial_data(&self, model: &dyn FluxModel) -> Result<GridFunction> {
        let d = &self.initial_data;
        let (window, breaks, states) = match d.preset.as_deref() {
            Some("paper-rd") => {
                if self.model.name != "psystem" {
                    return Err(Error::Config("preset \"paper-rd\" needs model \"psystem\"".into()));
                }
                if !d.breaks.is_empty() || !d.states.is_empty() {
                    return Err(Error::Config("preset and explicit states are exclusive".into()));
                }
                let w = d.window.unwrap_or([-1.0, 4.5]);
                (w, vec![0.0, 0.5], vec![vec![2.0, 0.0], vec![3.0, 0.0], vec![1.0, 0.0]])
            }
            Some(other) => return Err(Error::Config(format!("unknown preset {other:?}"))),
            None => {
                let w = d.window.ok_or_else(|| Error::Config("initial_data.window is required".into()))?;
                (w, d.breaks.clone(), d.states.clone())
            }
        };
        if states.len() != breaks.len() + 1 {
            return Err(Error::Config(format!("{} breaks need {} states, got {}", breaks.len(), breaks.len() + 1, states.len())));
        }
        if breaks.windows(2).any(|b| b[1] <= b[0]) {
            return Err(Error::Config("breaks must increase".into()));
        }
        if let Some(s) = states.iter().find(|s| s.len() != model.n_comp()) {
            return Err(Error::Config(format!("state {s:?} needs {} components", model.n_comp())));
        }
        let mesh = Mesh::with_dx(window[0], window[1], self.scheme.dx)?;
        GridFunction::from_fn(mesh, model.n_comp(), |x| states[breaks.partition_point(|b| *b <= x)].clone())
    }

    pub fn detection(&self) -> DetectionSettings {
        let p = &self.postprocess;
        DetectionSettings {
            sigma_flag: p.sigma_flag,
            k_flag: p.k_flag,
            kappa_prime: p.kappa_prime,
            sigma_min: p.sigma_min,
            tv_cap: p.tv_cap,
            k1: self.constants.k1,
        }
    }

    pub fn postprocess_params(&self, history: &SolutionHistory, model: &dyn FluxModel) -> Result<PostprocessParams> {
        let mut p = PostprocessParams::for_history(history, model, self.detection())?;
        let o = &self.postprocess;
        if let Some(h) = o.h {
            p.h = h;
            p.rho = h;
        }
        if let Some(r) = o.rho {
            p.rho = r;
        }
        if let Some(d) = o.delta {
            p.delta = d;
        }
        p.validate()?;
        Ok(p)
    }

    /// `output.dir`, unless the environment override is set.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => self.output.dir.clone(),
        }
    }

    /// Same configuration with dx and dt scaled by `1/factor`.
    pub fn refined(&self, factor: f64) -> Self {
        let mut c = self.clone();
        c.scheme.dx /= factor;
        c.scheme.dt /= factor;
        c
    }
}

/// Default residual suite: conservation-form bumps for every component and
/// nonnegative entropy bumps, spread over the mesh, over the whole run.
pub fn residual_suite(history: &SolutionHistory, model: &dyn FluxModel) -> Result<Vec<(String, ResidualReport)>> {
    let mesh = history.mesh();
    let (tau, tau_prime) = (history.t0, history.t_final());
    let mid_t = 0.5 * (tau + tau_prime);
    let rt = 0.49 * (tau_prime - tau);
    let len = mesh.x_max - mesh.x_min;
    let n = 6;
    let rx = len / (2.0 * n as f64 + 2.0);
    let mut rows = Vec::new();
    for k in 0..n {
        let xc = mesh.x_min + len * (k as f64 + 1.0) / (n as f64 + 1.0);
        for c in 0..model.n_comp() {
            let mut w = vec![0.0; model.n_comp()];
            w[c] = 1.0;
            let phi = TestFunction::bump(mid_t, rt, xc, rx, w);
            rows.push((format!("q1_c{c}_k{k}"), weak_residual_q1(history, model, &phi, tau, tau_prime)?));
        }
        let phi = TestFunction::bump(mid_t, rt, xc, rx, vec![1.0]);
        rows.push((format!("q2_k{k}"), entropy_residual_q2(history, model, &phi, tau, tau_prime)?));
    }
    Ok(rows)
}

/// Everything computed by one configured run, before anything is written.
#[derive(Debug, Clone)]
pub struct RunProducts {
    pub history: SolutionHistory,
    pub post: PostprocessOutput,
    pub certificate: ErrorCertificate,
    pub residuals: Vec<(String, ResidualReport)>,
    pub lipschitz: Option<f64>,
}

fn simulate(config: &RunConfig, model: &dyn FluxModel) -> Result<SolutionHistory> {
    let g0 = config.initial_data(model)?;
    run(model, &g0, &config.scheme_config()?)
}

/// Final frame of a run at `factor` times finer dx and dt.
fn reference_run(config: &RunConfig, model: &dyn FluxModel, factor: f64) -> Result<SolutionHistory> {
    let fine = config.refined(factor);
    let mut cfg = fine.scheme_config()?;
    cfg.record_stride = cfg.n_steps().max(1);
    run(model, &fine.initial_data(model)?, &cfg)
}

/// Runs scheme, residuals, post-processing and certification without writing files.
pub fn compute(config: &RunConfig) -> Result<RunProducts> {
    config.validate()?;
    let model = model_by_name(&config.model.name)?;
    let history = simulate(config, model.as_ref())?;
    let params = config.postprocess_params(&history, model.as_ref())?;
    let (residuals, lipschitz) = if config.output.residuals {
        (residual_suite(&history, model.as_ref())?, Some(check_lipschitz_al(&history)?))
    } else {
        (Vec::new(), None)
    };
    let post = postprocess(&history, &params)?;
    let mut certificate = certify(&history, &post, &config.constants)?;
    let r = config.output.reference_refinement;
    if r > 0 {
        let reference = reference_run(config, model.as_ref(), r as f64)?;
        certificate = certificate.with_true_error(measure_true_error(&history, &reference)?);
    }
    Ok(RunProducts { history, post, certificate, residuals, lipschitz })
}

/// How a completed run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Certified,
    /// Total variation gate failed; a "no estimate" certificate was written.
    NoEstimate,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Certified => 0,
            RunStatus::NoEstimate => 2,
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(BufWriter::new(f))
}

fn write_snapshots(dir: &Path, history: &SolutionHistory, stride: usize) -> Result<()> {
    let snaps = dir.join("snapshots");
    fs::create_dir_all(&snaps)?;
    let last = history.len() - 1;
    let mut index = create(&snaps.join("index.csv"))?;
    writeln!(index, "m,t,file")?;
    for m in 0..=last {
        if m == 0 || m == last || (stride > 0 && m % stride == 0) {
            let name = format!("frame_{m:06}.csv");
            history.frames[m].write_csv(create(&snaps.join(&name))?)?;
            writeln!(index, "{m},{},{name}", fmt_real(history.times[m]))?;
        }
    }
    index.flush()?;
    Ok(())
}

/// Writes every artifact of `products` into `dir`.
pub fn write_products(dir: &Path, config: &RunConfig, products: &RunProducts) -> Result<()> {
    fs::create_dir_all(dir)?;
    let h = &products.history;
    write_snapshots(dir, h, config.output.snapshot_stride)?;
    write_flags_csv(create(&dir.join("flags.csv"))?, h, &products.post.flags)?;
    write_traces_csv(create(&dir.join("traces.csv"))?, &products.post.attempts)?;
    write_covers_csv(create(&dir.join("covers.csv"))?, &products.post.covers)?;
    write_kappa_csv(create(&dir.join("kappa.csv"))?, &products.post.kappa())?;
    if config.output.residuals {
        write_residual_csv(create(&dir.join("residuals.csv"))?, &products.residuals)?;
    }
    let mut cert = create(&dir.join("certificate.json"))?;
    writeln!(cert, "{}", products.certificate.to_json()?)?;
    cert.flush()?;
    Ok(())
}

fn write_manifest(dir: &Path, config: &RunConfig, products: &RunProducts, seconds: f64) -> Result<()> {
    let mut m = create(&dir.join("run_manifest.txt"))?;
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let c = &products.certificate;
    writeln!(m, "version = {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(m, "unix_time = {stamp}")?;
    writeln!(m, "wall_seconds = {seconds:.3}")?;
    writeln!(m, "model = {}", config.model.name)?;
    writeln!(m, "scheme = {}", config.scheme.id)?;
    writeln!(m, "dx = {}", fmt_real(config.scheme.dx))?;
    writeln!(m, "dt = {}", fmt_real(config.scheme.dt))?;
    writeln!(m, "t_final = {}", fmt_real(config.scheme.t_final))?;
    writeln!(m, "frames = {}", products.history.len())?;
    writeln!(m, "status = {}", c.status)?;
    if let Some(l) = products.lipschitz {
        writeln!(m, "lipschitz_al = {}", fmt_real(l))?;
    }
    if !c.jbig2_satisfied {
        writeln!(m, "advisory = sigma_min below K1*(2*eps^(1/3) + 2*kappa')^(1/3); small-jump shock terms in use")?;
    }
    m.flush()?;
    Ok(())
}

/// Runs the configured pipeline and writes its artifacts to the output directory.
pub fn run_pipeline(config: &RunConfig) -> Result<(RunStatus, RunProducts)> {
    let start = std::time::Instant::now();
    let products = compute(config)?;
    let dir = config.output_dir();
    write_products(&dir, config, &products)?;
    write_manifest(&dir, config, &products, start.elapsed().as_secs_f64())?;
    let status = if products.certificate.tv_ok { RunStatus::Certified } else { RunStatus::NoEstimate };
    Ok((status, products))
}

/// Residual suite only. Returns the reports and the empirical Lipschitz constant.
pub fn verify(config: &RunConfig) -> Result<(Vec<(String, ResidualReport)>, f64)> {
    config.validate()?;
    let model = model_by_name(&config.model.name)?;
    let history = simulate(config, model.as_ref())?;
    let rows = residual_suite(&history, model.as_ref())?;
    let l = check_lipschitz_al(&history)?;
    let dir = config.output_dir();
    fs::create_dir_all(&dir)?;
    write_residual_csv(create(&dir.join("residuals.csv"))?, &rows)?;
    Ok((rows, l))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub dx: f64,
    pub dt: f64,
    pub eps: f64,
    pub true_error: f64,
    pub term_smooth: Option<f64>,
    pub term_shock: Option<f64>,
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
}

/// Runs the configuration at each dx (dt scaled alike) and measures the error
/// against one reference run at the finest dx divided by max(4, refinement).
pub fn convergence_sweep(config: &RunConfig, dxs: &[f64]) -> Result<Vec<SweepRow>> {
    if dxs.len() < 2 {
        return Err(Error::Config("a sweep needs at least two meshes".into()));
    }
    for (i, a) in dxs.iter().enumerate() {
        if dxs[i + 1..].iter().any(|b| (a - b).abs() <= 1e-12 * a.abs()) {
            return Err(Error::MeshesMustDiffer);
        }
    }
    config.validate()?;
    let model = model_by_name(&config.model.name)?;
    let finest = dxs.iter().copied().fold(f64::INFINITY, f64::min);
    let factor = config.output.reference_refinement.max(4) as f64;
    let reference = reference_run(&config.refined(config.scheme.dx / finest), model.as_ref(), factor)?;
    let mut rows = Vec::new();
    for &dx in dxs {
        let mut c = config.refined(config.scheme.dx / dx);
        c.scheme.dx = dx;
        c.output.reference_refinement = 0;
        c.output.residuals = false;
        let p = compute(&c)?;
        let err = measure_true_error(&p.history, &reference)?;
        let cert = p.certificate.with_true_error(err);
        rows.push(SweepRow {
            dx,
            dt: c.scheme.dt,
            eps: cert.eps,
            true_error: err,
            term_smooth: cert.term_smooth,
            term_shock: cert.term_shock,
            bound: cert.bound,
            ratio: cert.ratio,
        });
    }
    Ok(rows)
}

/// CSV `dx,dt,eps,true_error,term_smooth,term_shock,bound,ratio`; absent values are empty.
pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> Result<()> {
    let opt = |x: Option<f64>| x.map(fmt_real).unwrap_or_default();
    writeln!(w, "dx,dt,eps,true_error,term_smooth,term_shock,bound,ratio")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt_real(r.dx),
            fmt_real(r.dt),
            fmt_real(r.eps),
            fmt_real(r.true_error),
            opt(r.term_smooth),
            opt(r.term_shock),
            opt(r.bound),
            opt(r.ratio)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONSTANT: &str = r#"
[model]
name = "psystem"

[initial_data]
window = [-1.0, 4.5]
states = [[2.0, 0.0]]

[scheme]
id = "godunov"
dx = 0.01
dt = 0.005
t_final = 0.5

[postprocess]
sigma_flag = 0.05
k_flag = 25.0
kappa_prime = 0.1
sigma_min = 0.4
tv_cap = 10.0
"#;

    fn temp_dir(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("shockcert-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = CONSTANT.replace("k_flag", "k_flgg");
        assert!(matches!(RunConfig::from_toml(&bad), Err(Error::Config(_))));
        let bad = CONSTANT.replace("name = \"psystem\"", "name = \"euler\"");
        assert!(RunConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn interaction_preset_builds_the_three_states() {
        let c = RunConfig::paper_rd(0.002, 0.001, 1.5);
        let g = c.initial_data(&crate::models::PSystem).unwrap();
        assert_eq!(g.mesh.n_cells, 2750);
        assert_eq!(g.value_at(-0.5), &[2.0, 0.0]);
        assert_eq!(g.value_at(0.25), &[3.0, 0.0]);
        assert_eq!(g.value_at(3.0), &[1.0, 0.0]);
    }

    #[test]
    fn constant_run_writes_deterministic_files() {
        let mut c = RunConfig::from_toml(CONSTANT).unwrap();
        let names = ["flags.csv", "traces.csv", "covers.csv", "kappa.csv", "residuals.csv", "certificate.json"];
        let mut first = Vec::new();
        for pass in 0..2 {
            let dir = temp_dir(&format!("const{pass}"));
            c.output.dir = dir.clone();
            let p = compute(&c).unwrap();
            write_products(&dir, &c, &p).unwrap();
            let cert = &p.certificate;
            assert!(cert.kappa.iter().all(|k| *k == 0.0));
            assert_eq!(cert.bound.unwrap(), cert.nu as f64 * cert.h * cert.eps.cbrt());
            assert_eq!(fs::read_to_string(dir.join("flags.csv")).unwrap(), "t,x\n");
            let files: Vec<String> = names.iter().map(|n| fs::read_to_string(dir.join(n)).unwrap()).collect();
            if pass == 0 {
                first = files;
            } else {
                assert_eq!(first, files);
            }
            fs::remove_dir_all(&dir).unwrap();
        }
    }

    #[test]
    fn tiny_tv_cap_stops_without_estimate() {
        let text = CONSTANT.replace("states = [[2.0, 0.0]]", "breaks = [0.5]\nstates = [[2.0, 0.0], [1.5, 0.0]]");
        let mut c = RunConfig::from_toml(&text.replace("tv_cap = 10.0", "tv_cap = 1e-3")).unwrap();
        let dir = temp_dir("gate");
        c.output.dir = dir.clone();
        c.output.residuals = false;
        let p = compute(&c).unwrap();
        write_products(&dir, &c, &p).unwrap();
        assert!(!p.certificate.tv_ok);
        let json = fs::read_to_string(dir.join("certificate.json")).unwrap();
        assert!(json.contains("no estimate"));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn sweep_rejects_repeated_meshes() {
        let c = RunConfig::from_toml(CONSTANT).unwrap();
        assert!(matches!(convergence_sweep(&c, &[0.01, 0.01]), Err(Error::MeshesMustDiffer)));
        assert!(convergence_sweep(&c, &[0.01]).is_err());
    }

    #[test]
    fn burgers_sweep_error_decreases() {
        let text = r#"
[model]
name = "burgers"
[initial_data]
window = [0.0, 2.0]
breaks = [0.3]
states = [[1.0], [0.0]]
[scheme]
id = "godunov"
dx = 0.004
dt = 0.002
t_final = 0.6
[postprocess]
sigma_flag = 0.02
k_flag = 25.0
kappa_prime = 0.1
sigma_min = 0.4
tv_cap = 10.0
"#;
        let c = RunConfig::from_toml(text).unwrap();
        let rows = convergence_sweep(&c, &[0.004, 0.002, 0.001]).unwrap();
        assert!(rows.windows(2).all(|w| w[1].true_error < w[0].true_error), "{rows:?}");
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 4);
    }
}
