//! Flagged points, shock candidates and traces for the p-system interaction
//! example at a coarse resolution.

use shockcert::models::PSystem;
use shockcert::pipeline::RunConfig;
use shockcert::postprocess::{postprocess, DetectionSettings, PostprocessParams};
use shockcert::schemes::run;

fn main() -> shockcert::Result<()> {
    let cfg = RunConfig::paper_rd(0.004, 0.002, 1.5);
    let h = run(&PSystem, &cfg.initial_data(&PSystem)?, &cfg.scheme_config()?)?;
    let p = PostprocessParams::for_history(&h, &PSystem, DetectionSettings::interaction_example())?;
    println!("eps {}, h {}, rho {}, delta {:.4}, strips {}", p.eps, p.h, p.rho, p.delta, p.n_strips(&h));
    let out = postprocess(&h, &p)?;
    println!("sup TV {:.4} (gate {})", out.sup_tv, if out.tv_ok { "passed" } else { "failed" });
    for (j, (t, cells)) in out.flags.times.iter().zip(&out.flags.cells).enumerate() {
        let c = &out.candidates[j];
        println!(
            "t = {t:.3}: {:>3} flagged, {} traceable, {} untraceable",
            cells.len(),
            c.traceable.len(),
            c.untraceable.len()
        );
    }
    for a in &out.attempts {
        let verdict = a.rejection.map_or("traced", |r| r.name());
        println!("strip {:>2} x0 = {:.3} lambda = {:.3} jump = {:.3}: {verdict}", a.j, a.x0, a.lambda, a.jump);
    }
    for (t, k) in out.kappa() {
        println!("kappa({t:.3}) = {k:.4}");
    }
    Ok(())
}
