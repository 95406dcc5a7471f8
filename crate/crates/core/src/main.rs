use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use flatfront::front::FlatFrontFamily;
use flatfront::gauss::{affine_lifts, darboux_propagate, DarbouxPair};
use flatfront::grid::{QuadGrid, Vertex};
use flatfront::holo::{make_linear, DualData, HolomorphicMap};
use flatfront::invert::{invert_pair_with, InvertOptions};
use flatfront::io::{
    self, DualDoc, FrontDoc, HoloDoc, PairDoc, RunConfig, Tolerances, WeierstrassDoc,
};
use flatfront::{Error, Result};

/// Discrete flat fronts in hyperbolic space.
///
/// Exit status: 0 on success, 1 when validation fails, 2 on input errors.
#[derive(Parser)]
#[command(name = "flatfront", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Defaults to standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    t: f64,
    /// Parallel-family member; repeatable.
    #[arg(long, allow_negative_numbers = true)]
    s: Vec<f64>,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long = "tolerance")]
    tolerances: Vec<String>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    root_m: usize,
    #[arg(long, default_value_t = 0)]
    root_n: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Write the linear holomorphic map with labels alpha^2, -beta^2.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        rows: usize,
        #[arg(long, default_value_t = 10)]
        cols: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Christoffel dual and factorizing function of a holomorphic map.
    Dual {
        #[command(flatten)]
        common: Common,
    },
    /// Build the front family and evaluate it at the requested s.
    Weierstrass {
        #[command(flatten)]
        common: Common,
    },
    /// Extract the Darboux pair of Gauss maps of a front.
    Gauss {
        #[command(flatten)]
        common: Common,
    },
    /// Propagate a Darboux partner of the input map, whose labelling is used as b.
    Darboux {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        seed_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        seed_im: f64,
    },
    /// Recover Weierstrass data from a Darboux pair.
    Invert {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        w_root_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        w_root_im: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        g_root_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        g_root_im: f64,
    },
    /// Run every check; input is a holomorphic map or Weierstrass data.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Write the front at one s as an OBJ mesh in the Poincaré ball.
    Export {
        #[command(flatten)]
        common: Common,
    },
}

fn config(c: &Common) -> Result<RunConfig> {
    let mut tolerances = Tolerances::default();
    for arg in &c.tolerances {
        tolerances.apply(arg)?;
    }
    let cfg = RunConfig {
        input: c.input.clone(),
        output: c.output.clone(),
        report: c.report.clone(),
        t: c.t,
        s: c.s.clone(),
        tolerances,
        root: Vertex::new(c.root_m, c.root_n),
        ..Default::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn input(cfg: &RunConfig) -> Result<&Path> {
    cfg.input
        .as_deref()
        .ok_or_else(|| Error::Config("--input is required".into()))
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(cfg: &RunConfig, doc: &T) -> Result<()> {
    emit(cfg, &(io::to_json(doc)? + "\n"))
}

fn load_map(cfg: &RunConfig) -> Result<HolomorphicMap> {
    io::load_json::<HoloDoc>(input(cfg)?)?.to_map()
}

fn build(cfg: &RunConfig) -> Result<FlatFrontFamily> {
    FlatFrontFamily::build(&load_map(cfg)?, cfg.t)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate { common, rows, cols, alpha, beta } => {
            let cfg = config(&common)?;
            let h = make_linear(QuadGrid::new(rows, cols)?, alpha, beta)?;
            emit_json(&cfg, &HoloDoc::from_map(&h))?;
        }
        Command::Dual { common } => {
            let cfg = config(&common)?;
            let h = load_map(&cfg)?;
            let dual = DualData::compute(&h, cfg.root)?;
            emit_json(&cfg, &DualDoc::from_data(h.grid(), &dual))?;
        }
        Command::Weierstrass { common } => {
            let cfg = config(&common)?;
            emit_json(&cfg, &FrontDoc::from_family(&build(&cfg)?, &cfg.s_values()))?;
        }
        Command::Gauss { common } => {
            let cfg = config(&common)?;
            emit_json(&cfg, &PairDoc::from_pair(&DarbouxPair::from_front(&build(&cfg)?)?))?;
        }
        Command::Darboux { common, seed_re, seed_im } => {
            let cfg = config(&common)?;
            let h = load_map(&cfg)?;
            let seed = [Complex64::new(seed_re, seed_im), Complex64::new(1.0, 0.0)];
            let (pair, report) = darboux_propagate(&affine_lifts(&h), h.labelling(), cfg.t, seed, cfg.root)?;
            report.ensure(cfg.tolerances.get("gauss_cross_ratios").max(1e-9))?;
            emit_json(&cfg, &PairDoc::from_pair(&pair))?;
        }
        Command::Invert { common, w_root_re, w_root_im, g_root_re, g_root_im } => {
            let mut cfg = config(&common)?;
            cfg.w_root = Complex64::new(w_root_re, w_root_im);
            cfg.g_root = Complex64::new(g_root_re, g_root_im);
            cfg.validate()?;
            let pair = io::load_json::<PairDoc>(input(&cfg)?)?.to_pair()?;
            let options = InvertOptions {
                root: cfg.root,
                w_root: cfg.w_root,
                g_root: cfg.g_root,
                ..Default::default()
            };
            let inversion = invert_pair_with(&pair, &options)?;
            emit_json(&cfg, &WeierstrassDoc::from_data(&inversion.data))?;
        }
        Command::Validate { common } => {
            let cfg = config(&common)?;
            let text = std::fs::read_to_string(input(&cfg)?)?;
            let (h, t) = match io::from_json::<WeierstrassDoc>(&text) {
                Ok(doc) => (doc.holo.to_map()?, doc.t),
                Err(_) => (io::from_json::<HoloDoc>(&text)?.to_map()?, cfg.t),
            };
            let report = io::run_validation(&h, t, &cfg.s, &cfg.tolerances);
            match &cfg.report {
                Some(path) => io::save_json(&report, path)?,
                None => emit_json(&cfg, &report)?,
            }
            for check in report.failures() {
                eprintln!("FAIL {} (s = {:?}): {:?} > {:e}", check.name, check.s, check.max_residual, check.tolerance);
            }
            return Ok(report.passed);
        }
        Command::Export { common } => {
            let cfg = config(&common)?;
            let s = match cfg.s.as_slice() {
                [] => 0.0,
                [s] => *s,
                _ => return Err(Error::Config("export takes a single --s".into())),
            };
            emit(&cfg, &io::obj_string(&build(&cfg)?.eval(s))?)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
