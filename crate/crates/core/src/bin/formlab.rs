use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use formlab::runner::{self, Mode, RunConfig, Suite, EXIT_USAGE};

#[derive(Parser)]
#[command(
    name = "formlab",
    version,
    about = "Verify integral identities and boundary spectra for forms on balls"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integral identities and pointwise lemmas on random inputs.
    Verify(Flags),
    /// Boundary operator spectra with exact certificates.
    Spectrum(Flags),
    /// Eigenvalue bounds, radius scaling and proof-chain replays.
    Bounds(Flags),
    /// Curvature terms on coordinate charts.
    Curvature(Flags),
    /// Every suite.
    All(Flags),
}

#[derive(Args, Clone)]
struct Flags {
    /// Ambient dimensions m (comma separated).
    #[arg(long, value_delimiter = ',')]
    dim: Option<Vec<usize>>,
    /// Form degrees p (comma separated).
    #[arg(long, value_delimiter = ',')]
    degree: Option<Vec<usize>>,
    /// Ball radii, integers or fractions such as 1/2 (comma separated).
    #[arg(long, value_delimiter = ',')]
    radius: Option<Vec<String>>,
    /// Highest harmonic degree in the spectral trial spaces.
    #[arg(long)]
    lmax: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Arithmetic for the identity checks.
    #[arg(long, value_parser = ["exact", "float"])]
    mode: Option<String>,
    /// Directory that receives the run folder.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for cached harmonic bases.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// `key = value` configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn build_config(suites: Option<Suite>, f: &Flags) -> formlab::Result<RunConfig> {
    let mut cfg = match &f.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = suites {
        cfg.suites = vec![s];
    }
    if let Some(v) = &f.dim {
        cfg.set("dims", &join(v))?;
    }
    if let Some(v) = &f.degree {
        cfg.set("degrees", &join(v))?;
    }
    if let Some(v) = &f.radius {
        cfg.set("radii", &v.join(","))?;
    }
    if let Some(v) = f.lmax {
        cfg.l_max = v;
    }
    if let Some(v) = f.seed {
        cfg.seed = v;
    }
    if let Some(v) = &f.mode {
        cfg.mode = v.parse::<Mode>()?;
    }
    if let Some(v) = &f.out {
        cfg.out = v.clone();
    }
    if let Some(v) = &f.cache {
        cfg.cache = Some(v.clone());
    }
    if let Some(v) = f.jobs {
        cfg.jobs = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (suite, flags) = match &cli.command {
        Command::Verify(f) => (Some(Suite::Identities), f),
        Command::Spectrum(f) => (Some(Suite::Spectra), f),
        Command::Bounds(f) => (Some(Suite::Bounds), f),
        Command::Curvature(f) => (Some(Suite::Curvature), f),
        Command::All(f) => (None, f),
    };
    let cfg = match build_config(suite, flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let result = runner::run(&cfg).and_then(|out| runner::write_outputs(&out, &cfg.out).map(|dir| (out, dir)));
    match result {
        Ok((out, dir)) => {
            let s = &out.document.summary;
            for (name, c) in &s.suites {
                println!("{name}: {}/{} passed", c.passed, c.total);
            }
            for c in out.document.checks.iter().filter(|c| !c.pass) {
                println!("FAIL {} {} {:?}", c.suite.name(), c.id, c.params);
            }
            println!("{}/{} checks passed; results in {}", s.passed, s.total, dir.display());
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                formlab::Error::Config(_) | formlab::Error::Io { .. } => EXIT_USAGE,
                _ => runner::EXIT_CHECK_FAILURE,
            };
            ExitCode::from(code as u8)
        }
    }
}
