use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ringgap::runner::{exit_code, run, Command, RunConfig};
use ringgap::Result;

#[derive(Parser)]
#[command(name = "ringgap", version, about = "Exact diagonalization of the two-ring hole-hopping Hamiltonian")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full-space checks: ground state, sectors, embeddings, entropy, LOCC, brick chain.
    Verify(Common),
    /// Gaps and class minima of the effective operators.
    GapScan {
        #[command(flatten)]
        common: Common,
        /// Comma list of singlet, worst, custom, all, headline.
        #[arg(long)]
        classes: Option<String>,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Ring-ring entanglement of the ground state against the gap.
    EntropyScan(Common),
    /// Lowest eigenvalues of one effective class operator.
    Effective {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        class: ClassArgs,
        /// Number of eigenvalues.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Necklace classes of Bell lists.
    Necklaces(Common),
    /// Single-fermion return amplitude A(x, t).
    Fermion {
        #[command(flatten)]
        common: Common,
        /// Site offsets, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Times, comma separated.
        #[arg(long)]
        t: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// `key = value` settings; flags override them.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ring sizes: `5`, `3..5`, `8,16,32`.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    v1: Option<f64>,
    #[arg(long)]
    v2: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    dense_cap: Option<usize>,
    /// Write here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// csv, json or jsonl.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct ClassArgs {
    /// Period `p` dividing `N − 1`.
    #[arg(long)]
    p: Option<usize>,
    /// Penalized shifts, comma separated.
    #[arg(long)]
    bad: Option<String>,
}

fn settings(common: &Common) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    let mut put = |k: &'static str, v: Option<String>| {
        if let Some(v) = v {
            out.push((k, v));
        }
    };
    put("n", common.n.clone());
    put("v1", common.v1.map(|x| x.to_string()));
    put("v2", common.v2.map(|x| x.to_string()));
    put("tol", common.tol.map(|x| x.to_string()));
    put("seed", common.seed.map(|x| x.to_string()));
    put("max_iter", common.max_iter.map(|x| x.to_string()));
    put("dense_cap", common.dense_cap.map(|x| x.to_string()));
    put("output", common.output.as_ref().map(|p| p.display().to_string()));
    put("format", common.format.clone());
    out
}

fn class_settings(class: &ClassArgs) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    if let Some(p) = class.p {
        out.push(("p", p.to_string()));
    }
    if let Some(b) = &class.bad {
        out.push(("bad", b.clone()));
    }
    out
}

fn build_config(cli: Cli) -> Result<RunConfig> {
    let (command, common, mut extra) = match cli.command {
        Cmd::Verify(c) => (Command::Verify, c, Vec::new()),
        Cmd::EntropyScan(c) => (Command::EntropyScan, c, Vec::new()),
        Cmd::Necklaces(c) => (Command::Necklaces, c, Vec::new()),
        Cmd::GapScan { common, classes, class } => {
            let mut extra = class_settings(&class);
            if let Some(c) = classes {
                extra.push(("classes", c));
            }
            (Command::GapScan, common, extra)
        }
        Cmd::Effective { common, class, k } => {
            let mut extra = class_settings(&class);
            if let Some(k) = k {
                extra.push(("k", k.to_string()));
            }
            (Command::Effective, common, extra)
        }
        Cmd::Fermion { common, x, t } => {
            let mut extra = Vec::new();
            if let Some(x) = x {
                extra.push(("x", x));
            }
            if let Some(t) = t {
                extra.push(("t", t));
            }
            (Command::Fermion, common, extra)
        }
    };
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_file(command, path)?,
        None => RunConfig::new(command),
    };
    extra.extend(settings(&common));
    for (k, v) in extra {
        cfg.set(k, &v)?;
    }
    Ok(cfg)
}

fn execute(cfg: &RunConfig) -> (Result<ringgap::runner::CommandOutput>, Result<()>) {
    let result = run(cfg);
    let written = match &result {
        Ok(out) => (|| -> Result<()> {
            match &cfg.output {
                Some(path) => {
                    let mut w = BufWriter::new(File::create(path)?);
                    out.table.write(cfg, &mut w)?;
                    w.flush()?;
                }
                None => {
                    let stdout = io::stdout();
                    let mut w = stdout.lock();
                    out.table.write(cfg, &mut w)?;
                    w.flush()?;
                }
            }
            Ok(())
        })(),
        Err(_) => Ok(()),
    };
    (result, written)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("ringgap: {e}");
            return ExitCode::from(2);
        }
    };
    let (result, written) = execute(&cfg);
    if let Err(e) = &result {
        eprintln!("ringgap: {e}");
    }
    if let Err(e) = written {
        eprintln!("ringgap: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if let Ok(out) = &result {
        if out.failures > 0 {
            eprintln!("ringgap: {} row(s) failed", out.failures);
        }
    }
    ExitCode::from(exit_code(&result) as u8)
}
