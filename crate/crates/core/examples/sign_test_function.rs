//! Builds the sign test function of a piecewise-constant g and checks that
//! ∫gφ recovers ∫|g| up to the mollification error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shockcert::residuals::{build_sign_test_function, verify_sign_lemma, PiecewiseConstant};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 12;
    let mut breaks: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.0..1.0)).collect();
    breaks.push(0.0);
    breaks.push(1.0);
    breaks.sort_by(f64::total_cmp);
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let g = PiecewiseConstant::new(breaks, values);
    for eps in [1e-2, 1e-4, 1e-6] {
        let phi = build_sign_test_function(&g, eps);
        let check = verify_sign_lemma(&g, eps);
        println!(
            "eps = {eps:e}: |phi_x| <= {:.3e}, int|g| - int g phi = {:.3e} <= {:.3e}: {}",
            phi.dx_norm,
            check.lhs,
            check.rhs,
            check.holds
        );
    }
}
