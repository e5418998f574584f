//! Full-resolution interaction example (dx = 0.0005, dt = 0.00025, T = 1.5).
//! Writes to out/paper_rd_full unless SHOCKCERT_OUTPUT_DIR is set.
//!
//!     cargo run --release --example full_scale

use shockcert::pipeline::{run_pipeline, RunConfig};

fn main() -> shockcert::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/paper_rd_full.toml");
    let cfg = RunConfig::load(std::path::Path::new(path))?;
    let (status, p) = run_pipeline(&cfg)?;
    let c = &p.certificate;
    println!("{status:?}: bound {:?}, traced segments {}", c.bound, c.traced_counts.iter().sum::<usize>());
    for (t, k) in p.post.kappa() {
        println!("{t:.4} {k:.4}");
    }
    println!("wrote {}", cfg.output_dir().display());
    Ok(())
}
