//! Certificate for a Burgers shock, with the true error against a fine run.

use shockcert::pipeline::{compute, RunConfig};

const CONFIG: &str = r#"
[model]
name = "burgers"
[initial_data]
window = [0.0, 2.0]
breaks = [0.3]
states = [[1.0], [0.0]]
[scheme]
id = "godunov"
dx = 0.002
dt = 0.001
t_final = 0.6
[postprocess]
sigma_flag = 0.0063
k_flag = 25.0
kappa_prime = 0.1
sigma_min = 0.4
tv_cap = 10.0
[output]
reference_refinement = 4
residuals = false
"#;

fn main() -> shockcert::Result<()> {
    let cfg = RunConfig::from_toml(CONFIG)?;
    let p = compute(&cfg)?;
    let c = &p.certificate;
    println!("status {}, nu {}, traced {:?}", c.status, c.nu, c.traced_counts);
    println!("term_smooth {:.4e}, term_shock {:.4e}, bound {:.4e}", c.term_smooth.unwrap(), c.term_shock.unwrap(), c.bound.unwrap());
    println!("true error {:.4e}, ratio {:.4e}", c.true_error.unwrap(), c.ratio.unwrap());
    Ok(())
}
