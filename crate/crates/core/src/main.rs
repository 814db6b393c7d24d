use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use curvatlas::capacity::{build_hierarchy, capacity_lower_bound, capacity_qp, hierarchy_measure};
use curvatlas::curve::io::{parse_curveset, write_curveset};
use curvatlas::experiment::{emit_table, run_experiment, ExperimentConfig, ExperimentKind, TableFormat};
use curvatlas::generators::{generate, write_field, GeneratorSpec};
use curvatlas::metric::{config_distance, distance_matrix, matrix_csv};
use curvatlas::regularity::dimension_summary;
use curvatlas::{CurveConfig, Error};

#[derive(Parser)]
#[command(name = "curvatlas", version, about = "Regularity, crossing and capacity analysis of random curves")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// experiment config (key = value with [generator] and [params] sections)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw one sample from the config's generator and write it as a curveset.
    Generate {
        /// also write the lattice field, when there is one
        #[arg(long)]
        field: Option<PathBuf>,
    },
    /// Tortuosity and box-dimension fits for each curve of a curveset.
    Analyze {
        input: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Shell-crossing scan (lambda_scan, or rho_scan when the config says so).
    Crossings,
    /// Hierarchy, capacity and its closed-form lower bound for a curve.
    Capacity {
        input: PathBuf,
        #[arg(long, default_value_t = 5.0)]
        gamma: f64,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        k_max: usize,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        ell: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// print the hierarchy as well
        #[arg(long)]
        hierarchy: bool,
    },
    /// Configuration distance between two curvesets; --out gets the matrix.
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Run the configured experiment; the record goes to --out (or stdout)
    /// and its table next to it as CSV.
    Experiment,
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_config(c: &Common) -> Result<ExperimentConfig, Error> {
    let path = c.config.as_ref().ok_or_else(|| Error::InvalidConfig("--config is required".into()))?;
    ExperimentConfig::parse(&read(path)?)?.with_overrides(c.seed, c.trials, c.threads)
}

fn load_curves(path: &Path) -> Result<CurveConfig, Error> {
    parse_curveset(&read(path)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_config(c: &Common, cfg: ExperimentConfig) -> Result<(), Error> {
    let rec = run_experiment(&cfg)?;
    let out = c.out.clone().or_else(|| cfg.output_path.clone());
    match out {
        Some(p) => {
            emit_table(&rec, TableFormat::Records, &p)?;
            emit_table(&rec, TableFormat::Csv, &p.with_extension("csv"))?;
        }
        None => print!("{}", rec.to_text()),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let c = &cli.common;
    match cli.cmd {
        Cmd::Generate { field } => {
            let cfg = load_config(c)?;
            let sample = generate(&GeneratorSpec { kind: cfg.generator.kind, seed: cfg.seed })?;
            emit(c.out.as_deref(), &write_curveset(&sample.config))?;
            if let (Some(p), Some(f)) = (field, &sample.field) {
                std::fs::write(p, write_field(f))?;
            }
            Ok(())
        }
        Cmd::Analyze { input, eps, k } => {
            let f = load_curves(&input)?;
            let mut text = String::new();
            for (i, cv) in f.curves.iter().enumerate() {
                let d = dimension_summary(cv, eps, k, None)?;
                text += &format!(
                    "curve {i}\n{}\n{}\nalpha_lower={:.6} tempered={} kfold_scale={:e}\n",
                    d.tau.record("tau"),
                    d.dim_b.record("dimB"),
                    d.alpha_lower,
                    d.tempered,
                    d.kfold_scale
                );
            }
            emit(c.out.as_deref(), &text)
        }
        Cmd::Crossings => {
            let mut cfg = load_config(c)?;
            if cfg.experiment != ExperimentKind::RhoScan {
                cfg.experiment = ExperimentKind::LambdaScan;
            }
            run_config(c, cfg)
        }
        Cmd::Capacity { input, gamma, m, k_max, s, ell, tol, hierarchy } => {
            let f = load_curves(&input)?;
            let mut text = String::new();
            for (i, cv) in f.curves.iter().enumerate() {
                let h = build_hierarchy(cv, gamma, m, k_max)?;
                let mu = hierarchy_measure(cv, &h);
                let s = s.unwrap_or(0.9 * h.beta().ln() / gamma.ln());
                let q = capacity_qp(&mu.support, s, ell.unwrap_or(h.scale(h.k_max())), tol)?;
                let lb = capacity_lower_bound(&h, s, 0)?;
                text += &format!("curve {i} leaves={}\n{}\nbound {lb:.12e}\n", mu.support.len(), q.record());
                if hierarchy {
                    text += &h.to_text();
                }
            }
            emit(c.out.as_deref(), &text)
        }
        Cmd::Distance { a, b, tol } => {
            let (fa, fb) = (load_curves(&a)?, load_curves(&b)?);
            let d = config_distance(&fa, &fb, tol)?;
            println!("distance {d:e}");
            if let Some(p) = &c.out {
                std::fs::write(p, matrix_csv(&distance_matrix(&fa, &fb, tol)?))?;
            }
            Ok(())
        }
        Cmd::Experiment => {
            let cfg = load_config(c)?;
            run_config(c, cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("curvatlas: {e}");
            ExitCode::from(match e {
                Error::InvalidConfig(_) | Error::InvalidParameter(_) | Error::Parse { .. } => 2,
                Error::Aborted { .. } => 3,
                _ => 1,
            })
        }
    }
}
