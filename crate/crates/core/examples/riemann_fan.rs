//! Exact Riemann fans for the p-system and Burgers' equation.

use shockcert::models::{Burgers, FluxModel, PSystem};

fn show(model: &dyn FluxModel, ul: &[f64], ur: &[f64]) -> shockcert::Result<()> {
    let fan = model.solve_riemann(ul, ur)?;
    println!("{}: {:?} -> {:?}", model.name(), ul, ur);
    for (w, s) in fan.waves.iter().zip(fan.states.windows(2)) {
        println!(
            "  family {} {:?}: speeds [{:.4}, {:.4}], strength {:+.4}, {:?} -> {:?}",
            w.family, w.kind, w.speed_lo, w.speed_hi, w.strength, s[0], s[1]
        );
    }
    for xi in [0.0, 0.5, 1.0, 1.5, 2.0] {
        println!("  u(x/t = {xi}) = {:?}", fan.sample(xi));
    }
    Ok(())
}

fn main() -> shockcert::Result<()> {
    // the two initial jumps of the interaction example
    show(&PSystem, &[2.0, 0.0], &[3.0, 0.0])?;
    show(&PSystem, &[3.0, 0.0], &[1.0, 0.0])?;
    show(&Burgers, &[1.0], &[0.0])?;
    show(&Burgers, &[0.0], &[1.0])?;
    Ok(())
}
