//! Staggered Lax-Friedrichs on the primal mesh.
//!
//! A staggered cell of width 2·dx is stored as two primal cells holding the
//! same value; [`Pairing`] says which neighbours are paired. Each step flips
//! the pairing, so frames are already on the primal grid and no resampling
//! is needed before post-processing.

use super::SPEED_TOL;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, Pairing};
use crate::models::FluxModel;

/// Averages neighbouring cells into even pairs, conserving mass.
pub fn pair_project(g: &GridFunction) -> GridFunction {
    if g.pairing.is_some() {
        return g.clone();
    }
    let n = g.n_comp;
    let mut out = g.values.clone();
    let mut j = 0;
    while j + 1 < g.n_cells() {
        for k in 0..n {
            let avg = 0.5 * (g.values[j * n + k] + g.values[(j + 1) * n + k]);
            out[j * n + k] = avg;
            out[(j + 1) * n + k] = avg;
        }
        j += 2;
    }
    GridFunction { values: out, pairing: Some(Pairing::Even), ..g.clone() }
}

/// U ← ½(U_{j+1} + U_{j−1}) − (dt/2dx)(f(U_{j+1}) − f(U_{j−1})) on the opposite parity.
pub fn lax_friedrichs_step(model: &dyn FluxModel, g: &GridFunction, dt: f64) -> Result<GridFunction> {
    let pairing = g.pairing.ok_or_else(|| {
        Error::InvalidGridFunction("lax-friedrichs input must carry a pairing".into())
    })?;
    let n = g.n_comp;
    let cells = g.n_cells() as isize;
    let r = dt / g.mesh.dx;
    for (i, u) in g.cells().enumerate() {
        model.check_state(u)?;
        for l in model.eigenvalues(u) {
            let courant = l.abs() * r;
            if courant > 1.0 + SPEED_TOL {
                return Err(Error::CflViolated { cell: i, courant, limit: 1.0 });
            }
        }
    }
    let next = pairing.flipped();
    // new pairs cover cells (s, s+1) with s ≡ 0 (even) or s ≡ −1 (odd) mod 2
    let mut s: isize = match next {
        Pairing::Even => 0,
        Pairing::Odd => -1,
    };
    let mut out = vec![0.0; g.values.len()];
    let mut fa = vec![0.0; n];
    let mut fb = vec![0.0; n];
    while s < cells {
        let a = g.cell_clamped(s);
        let b = g.cell_clamped(s + 1);
        model.flux_into(a, &mut fa);
        model.flux_into(b, &mut fb);
        for c in [s, s + 1] {
            if (0..cells).contains(&c) {
                for k in 0..n {
                    out[c as usize * n + k] = 0.5 * (a[k] + b[k]) - 0.5 * r * (fb[k] - fa[k]);
                }
            }
        }
        s += 2;
    }
    Ok(GridFunction::new(g.mesh, n, out)?.with_pairing(Some(next)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Mesh;
    use crate::models::{Burgers, LinearDiagonal};

    fn paired(vals: &[f64]) -> GridFunction {
        let mesh = Mesh::new(0.0, 1.0, vals.len()).unwrap();
        GridFunction::new(mesh, 1, vals.to_vec()).unwrap().with_pairing(Some(Pairing::Even))
    }

    #[test]
    fn constant_state_is_fixed() {
        let g = paired(&[0.3; 10]);
        assert_eq!(lax_friedrichs_step(&Burgers, &g, 0.02).unwrap().values, g.values);
    }

    #[test]
    fn zero_flux_is_pure_averaging() {
        let still = LinearDiagonal::new(vec![0.0], (-1.0, 1.0));
        let g = paired(&[0.0, 0.0, 0.0, 0.0, 2.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
        let one = lax_friedrichs_step(&still, &g, 0.05).unwrap();
        assert_eq!(one.pairing, Some(Pairing::Odd));
        assert_eq!(one.values, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        // binomial smoothing after two steps
        let two = lax_friedrichs_step(&still, &one, 0.05).unwrap();
        assert_eq!(two.values, vec![0.0, 0.0, 0.5, 0.5, 1.0, 1.0, 0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn hand_evaluated_burgers_step() {
        // staggered neighbours U_{j-1} = 1, U_{j+1} = 0
        let g = paired(&[1.0, 1.0, 0.0, 0.0]);
        let dx = g.mesh.dx;
        let out = lax_friedrichs_step(&Burgers, &g, 0.4 * dx).unwrap();
        assert!((out.values[1] - 0.8).abs() < 1e-15);
        assert!((out.values[2] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn projection_conserves_mass() {
        let mesh = Mesh::new(0.0, 1.0, 7).unwrap();
        let g = GridFunction::new(mesh, 1, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]).unwrap();
        let p = pair_project(&g);
        assert!((p.mass()[0] - g.mass()[0]).abs() < 1e-15);
        assert_eq!(p.values, vec![1.5, 1.5, 3.5, 3.5, 5.5, 5.5, 7.0]);
    }
}
