use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shockcert::pipeline::{self, RunConfig};

/// Finite-volume runs with a-posteriori L1 error certificates.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write all artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Repeat the run at several mesh sizes and tabulate error and bound.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        dx: Vec<f64>,
    },
    /// Run the scheme and the residual suite only.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(command: Command) -> shockcert::Result<u8> {
    match command {
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let (status, products) = pipeline::run_pipeline(&cfg)?;
            let c = &products.certificate;
            match c.bound {
                Some(b) => println!(
                    "bound = {b:.6e} (term_smooth {:.6e}, term_shock {:.6e}), traced segments = {}",
                    c.term_smooth.unwrap_or(0.0),
                    c.term_shock.unwrap_or(0.0),
                    c.traced_counts.iter().sum::<usize>()
                ),
                None => println!("no estimate: sup TV {:.6} exceeds tv_cap {}", c.sup_tv, c.params.tv_cap),
            }
            if let Some(e) = c.true_error {
                println!("true error = {e:.6e}");
            }
            println!("wrote {}", cfg.output_dir().display());
            Ok(status.exit_code() as u8)
        }
        Command::Sweep { config, dx } => {
            let cfg = RunConfig::load(&config)?;
            let rows = pipeline::convergence_sweep(&cfg, &dx)?;
            let dir = cfg.output_dir();
            std::fs::create_dir_all(&dir)?;
            let path = dir.join("sweep.csv");
            pipeline::write_sweep_csv(std::fs::File::create(&path)?, &rows)?;
            pipeline::write_sweep_csv(std::io::stdout().lock(), &rows)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Verify { config } => {
            let cfg = RunConfig::load(&config)?;
            let (rows, l) = pipeline::verify(&cfg)?;
            for (id, r) in &rows {
                println!("{id:>10}  residual {:+.3e}  ratio {:+.3e}", r.residual, r.ratio);
            }
            println!("lipschitz constant L = {l:.4}");
            Ok(0)
        }
    }
}
