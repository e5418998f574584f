//! Weak-form and entropy residuals of a Godunov p-system run, the empirical
//! Lipschitz constant in time, and a frozen-coefficient comparison.

use shockcert::models::PSystem;
use shockcert::residuals::{
    check_lipschitz_al, entropy_residual_q2, linear_comparison_diagnostic, weak_residual_q1, TestFunction,
};
use shockcert::schemes::{run, SchemeConfig};
use shockcert::{GridFunction, Mesh, SchemeId, Trapezoid};

fn main() -> shockcert::Result<()> {
    let mesh = Mesh::with_dx(-1.0, 4.5, 0.004)?;
    let g0 = GridFunction::from_fn(mesh, 2, |x| vec![2.0 + 0.3 * (-(x - 1.0) * (x - 1.0) * 8.0).exp(), 0.0])?;
    let cfg = SchemeConfig::new(SchemeId::Godunov, mesh.dx, 0.5 * mesh.dx, 0.8);
    let h = run(&PSystem, &g0, &cfg)?;

    for xc in [0.5, 1.0, 1.5, 2.0] {
        let q1 = weak_residual_q1(&h, &PSystem, &TestFunction::bump(0.4, 0.39, xc, 0.4, vec![1.0, 0.5]), 0.0, 0.8)?;
        let q2 = entropy_residual_q2(&h, &PSystem, &TestFunction::bump(0.4, 0.39, xc, 0.4, vec![1.0]), 0.0, 0.8)?;
        println!(
            "x = {xc}: q1 {:.3e} (ratio {:.3}), q2 {:+.3e} (ratio {:+.3})",
            q1.residual, q1.ratio, q2.residual, q2.ratio
        );
    }
    println!("L = {:.4}", check_lipschitz_al(&h)?);

    let region = Trapezoid::new(0.2, 0.3, 0.6, 1.6, 2.0, 0.0, 0.0)?;
    let c = linear_comparison_diagnostic(&h, &PSystem, &region, 1.1)?;
    println!("frozen comparison on [0.2, 0.3]: lhs {:.3e}, rhs {:.3e}", c.lhs, c.rhs);
    Ok(())
}
