//! Runs all four schemes on the same Burgers data and compares them with the
//! exact solution at the final time.

use shockcert::grid::l1_distance;
use shockcert::models::{Burgers, FluxModel};
use shockcert::schemes::{run, SchemeConfig};
use shockcert::{GridFunction, Mesh, SchemeId};

fn main() -> shockcert::Result<()> {
    let mesh = Mesh::new(0.0, 2.0, 800)?;
    let g0 = GridFunction::from_fn(mesh, 1, |x| vec![if x < 0.3 { 1.0 } else { 0.0 }])?;
    let t = 0.6;
    let exact = GridFunction::from_fn(mesh, 1, |x| vec![if x < 0.3 + 1.5 * t { 1.0 } else { 0.0 }])?;
    println!("Burgers shock, speed 1.5, {} cells, T = {t}", mesh.n_cells);
    for id in [SchemeId::Godunov, SchemeId::LaxFriedrichs, SchemeId::BackwardEuler, SchemeId::Smoothing] {
        let mut cfg = SchemeConfig::new(id, mesh.dx, 0.25 * mesh.dx, t);
        cfg.smoothing_delta = Some(8.0 * mesh.dx);
        let h = run(&Burgers as &dyn FluxModel, &g0, &cfg)?;
        let err = l1_distance(h.last(), &exact, (mesh.x_min, mesh.x_max))?;
        // inflow f(1) = 1.5 at the left end, none at the right
        let drift = (h.last().mass()[0] - g0.mass()[0] - 1.5 * h.t_final()).abs();
        println!(
            "  {:<15} frames {:>5}  L1 error {:.3e}  sup TV {:.4}  mass balance {:.3e}",
            id.name(),
            h.len(),
            err,
            h.sup_tv(),
            drift
        );
    }
    Ok(())
}
