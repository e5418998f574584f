//! Cell averaging and mollification defects against smooth test functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shockcert::residuals::{check_averaging, check_mollification, KernelCdf, PiecewiseConstant, TrigPolynomial};

fn random_step(rng: &mut ChaCha8Rng, a: f64, b: f64, n: usize) -> PiecewiseConstant {
    let mut breaks: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(a..b)).collect();
    breaks.extend([a, b]);
    breaks.sort_by(f64::total_cmp);
    PiecewiseConstant::new(breaks, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let eps = 1e-3;
    let w = random_step(&mut rng, 0.0, eps, 5);
    let phi = TrigPolynomial::random(&mut rng, 4, 1.0);
    let avg = check_averaging(&w, &phi);
    println!("averaging on [0, {eps}]: {:.3e} <= {:.3e}", avg.lhs, avg.bound);

    let cdf = KernelCdf::new();
    let w = random_step(&mut rng, 0.0, 1.0, 20);
    for delta in [0.1, 0.02] {
        let m = check_mollification(&w, delta, &phi, &cdf);
        println!("mollification delta = {delta}: ratio {:.4} (limit {:.4})", m.ratio, m.limit);
    }
}
