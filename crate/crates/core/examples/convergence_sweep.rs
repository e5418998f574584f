//! Error and bound of a Burgers shock over three meshes.

use shockcert::pipeline::{convergence_sweep, write_sweep_csv, RunConfig};

fn main() -> shockcert::Result<()> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/burgers_shock.toml"))?;
    let cfg = RunConfig::from_toml(&text)?;
    let rows = convergence_sweep(&cfg, &[0.004, 0.002, 0.001])?;
    write_sweep_csv(std::io::stdout().lock(), &rows)?;
    Ok(())
}
