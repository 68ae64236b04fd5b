use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dumbbell_core::geometry::{sphere_volume, GeometryReport};
use dumbbell_core::harness::{
    geometry_csv, geometry_key_values, profile_csv, run_acceptance, run_sweep, solve_point, spectrum_csv,
    sweep_csv, AcceptanceOptions, SweepConfig,
};
use dumbbell_core::spectral::{eigenvalue_bound, bound_constant};
use dumbbell_core::{build_chain, DumbbellSpec, Error, SmoothCutoff};

const EXIT_ACCEPTANCE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "dumbbell", version, about = "Hyperbolic dumbbell chains: profiles, geometry and small eigenvalues")]
struct Cli {
    /// `key = value` sweep configuration; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// CSV output where a subcommand supports both forms.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample the warp profile F and its derivatives.
    Profile {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        k: usize,
        /// Fiber dimension; does not change F.
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1001)]
        samples: usize,
    },
    /// Curvature extremes, volumes and the normalization factor.
    Geometry {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        p: usize,
        /// Defaults to n + p.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long = "vol-h2")]
        vol_h2: Option<f64>,
        #[arg(long, default_value_t = dumbbell_core::geometry::DEFAULT_CURVATURE_SAMPLES)]
        samples: usize,
    },
    /// Lowest eigenvalues of the chain for p-forms on S^p × chain.
    Spectrum {
        #[command(flatten)]
        point: PointArgs,
        /// Defaults to k + 2.
        #[arg(long)]
        modes: Option<usize>,
        #[arg(long, default_value_t = 8192)]
        grid: usize,
    },
    /// Closed-form upper bound for the first k normalized eigenvalues.
    Bound {
        #[command(flatten)]
        point: PointArgs,
    },
    /// Parameter sweep; writes CSV.
    Sweep(SweepArgs),
    /// Run the acceptance criteria.
    Accept {
        /// Only the oracle criteria.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        grid: Option<usize>,
        /// Replace the connector cutoff window (negative control).
        #[arg(long = "cutoff-a", hide = true, requires = "cutoff_b")]
        cutoff_a: Option<f64>,
        #[arg(long = "cutoff-b", hide = true, requires = "cutoff_a")]
        cutoff_b: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    p: usize,
    /// Defaults to vol(S^m).
    #[arg(long = "vol-h2")]
    vol_h2: Option<f64>,
}

impl PointArgs {
    fn spec(&self) -> Result<DumbbellSpec<f64>, Error> {
        let vol_h2 = self.vol_h2.unwrap_or_else(|| sphere_volume(self.m));
        DumbbellSpec::new(self.eps, self.k, self.m, self.p, vol_h2)
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated eps values.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// Comma-separated `m:p` pairs.
    #[arg(long)]
    mp: Option<String>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long = "vol-h2")]
    vol_h2: Option<f64>,
    #[arg(long = "b-p")]
    b_p: Option<usize>,
}

fn load_config(cli: &Cli) -> Result<SweepConfig, Error> {
    match &cli.config {
        Some(path) => SweepConfig::from_file(path),
        None => Ok(SweepConfig::default()),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Config(_) | Error::Degree { .. } => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Profile { eps, k, n, samples } => {
            let spec = DumbbellSpec::new(*eps, *k, *n, 0, 0.0)?;
            emit(cli, &profile_csv(&build_chain(&spec)?, *samples)?)?;
        }
        Command::Geometry { eps, k, n, p, m, vol_h2, samples } => {
            let m = m.unwrap_or(n + p);
            if m != n + p {
                return Err(Error::Domain(format!("m = {m} but n + p = {}", n + p)));
            }
            let spec = DumbbellSpec::new(*eps, *k, m, *p, vol_h2.unwrap_or_else(|| sphere_volume(m)))?;
            let chain = build_chain(&spec)?;
            let report = GeometryReport::compute_with(&spec, &chain, *samples, 1e-3)?;
            let text = if cli.csv { geometry_csv(&report) } else { geometry_key_values(&report) };
            emit(cli, &text)?;
        }
        Command::Spectrum { point, modes, grid } => {
            let spec = point.spec()?;
            let modes = modes.unwrap_or(spec.k + 2);
            if modes == 0 {
                return Err(Error::Domain("modes must be at least 1".into()));
            }
            let sol = solve_point(&spec, SmoothCutoff::connector(), *grid, modes)?;
            let text = if cli.csv {
                spectrum_csv(&sol, modes)
            } else {
                let mut s = format!(
                    "eps={} k={} m={} p={} grid={} volume_M={:.10e} bound={:.10e}\n",
                    spec.eps, spec.k, spec.m, spec.p, sol.spectrum.grid_size, sol.volume_m, sol.bound
                );
                for (j, (l, nl)) in sol.spectrum.eigenvalues.iter().zip(&sol.normalized).enumerate() {
                    s.push_str(&format!("j={j} lambda={l:.10e} normalized={nl:.10e} ratio={:.4e}\n", nl / sol.bound));
                }
                s
            };
            emit(cli, &text)?;
        }
        Command::Bound { point } => {
            let spec = point.spec()?;
            let c: f64 = bound_constant(spec.m, spec.p)?;
            let b = eigenvalue_bound(&spec)?;
            let l = spec.half_neck();
            let text = if cli.csv {
                format!("eps,k,m,p,C,bound\n{:.16e},{},{},{},{c:.16e},{b:.16e}\n", spec.eps, spec.k, spec.m, spec.p)
            } else {
                format!("C={c:.10e}\nL={l:.10e}\nbound={b:.10e}\nbound_times_L2={:.10e}\n", b * l * l)
            };
            emit(cli, &text)?;
        }
        Command::Sweep(args) => {
            let mut cfg = load_config(cli)?;
            if let Some(e) = &args.eps {
                cfg.eps_list = e.clone();
            }
            if let Some(k) = &args.k {
                cfg.k_list = k.clone();
            }
            if let Some(mp) = &args.mp {
                cfg.set("mp", mp)?;
            }
            if let Some(g) = args.grid {
                cfg.grid = g;
            }
            if args.modes.is_some() {
                cfg.modes = args.modes;
            }
            if args.vol_h2.is_some() {
                cfg.vol_h2 = args.vol_h2;
            }
            if let Some(b) = args.b_p {
                cfg.b_p = b;
            }
            if let Some(out) = &cli.out {
                cfg.output = Some(out.clone());
            }
            cfg.validate()?;
            let outcome = run_sweep(&cfg)?;
            let text = sweep_csv(&outcome);
            match &cfg.output {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
            for f in &outcome.failures {
                eprintln!("point eps={} k={} m={} p={} failed: {}", f.point.eps, f.point.k, f.point.m, f.point.p, f.error);
            }
            if !outcome.failures.is_empty() {
                return Ok(EXIT_NUMERICAL);
            }
        }
        Command::Accept { oracle, grid, cutoff_a, cutoff_b } => {
            let mut config = load_config(cli)?;
            if let Some(g) = grid {
                config.grid = *g;
            }
            let cutoff = match (cutoff_a, cutoff_b) {
                (Some(a), Some(b)) => SmoothCutoff::new_unchecked(*a, *b),
                _ => SmoothCutoff::connector(),
            };
            let report = run_acceptance(&AcceptanceOptions {
                config,
                cutoff,
                oracle_only: *oracle,
            })?;
            emit(cli, &format!("{report}\n"))?;
            if !report.passed() {
                return Ok(EXIT_ACCEPTANCE);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
