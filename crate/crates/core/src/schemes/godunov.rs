use super::check_upwind_cfl;
use crate::error::Result;
use crate::grid::GridFunction;
use crate::models::FluxModel;

/// One upwind Godunov step, valid while every speed lies in [0, dx/dt]:
/// U_j ← U_j + (dt/dx)(f(U_{j−1}) − f(U_j)), with constant extension on the left.
pub fn godunov_step(model: &dyn FluxModel, g: &GridFunction, dt: f64) -> Result<GridFunction> {
    check_upwind_cfl(model, g, dt)?;
    let n = g.n_comp;
    let r = dt / g.mesh.dx;
    let mut fluxes = vec![0.0; g.values.len()];
    for (u, f) in g.cells().zip(fluxes.chunks_exact_mut(n)) {
        model.flux_into(u, f);
    }
    let mut out = g.values.clone();
    for j in 1..g.n_cells() {
        for k in 0..n {
            out[j * n + k] += r * (fluxes[(j - 1) * n + k] - fluxes[j * n + k]);
        }
    }
    Ok(GridFunction::new(g.mesh, n, out)?.with_pairing(g.pairing))
}
