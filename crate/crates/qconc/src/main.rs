//! Command-line surface for entanglement analysis and figure-data emission.
//!
//! Exit codes: 0 success, 2 bad input (arguments, files, validation),
//! 3 numerical failure, 4 output I/O failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use qconc::io::{read_state, write_state, StateFile};
use qconc::isotropic::{
    exact_isotropic_qc, isotropic_state, xi_central_derivatives, Fidelity, DEFAULT_GRID,
};
use qconc::qconcurrence::{bound_report, critical_s, BoundOptions, BoundReport, QParam};
use qconc::separability::detect;
use qconc::state::{random_density, BipartiteDims};
use qconc::QcError;

#[derive(Parser)]
#[command(name = "qconc", version, about = "Bipartite entanglement detection and q-concurrence bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run both separability tests and the full bound report on a state file.
    Analyze {
        /// Path to a JSON state file.
        #[arg(long)]
        input: PathBuf,
        /// Measure exponent, q >= 2.
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        /// Convex-roof upper-bound search budget (0 = skip).
        #[arg(long, default_value_t = 0)]
        iterations: usize,
        /// Seed for the upper-bound search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the bound report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Emit only the bound report (JSON) for a state file.
    Bounds {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write CSV columns F,exact,theorem1,prior over a fidelity grid.
    IsotropicSweep {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        f_min: f64,
        #[arg(long, default_value_t = 1.0)]
        f_max: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write CSV columns F,dxi_dF,d2xi_dF2 (central differences, step 1e-5).
    Derivatives {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        f_min: Option<f64>,
        #[arg(long)]
        f_max: Option<f64>,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded random density-matrix state file.
    Random {
        #[arg(long)]
        d_a: usize,
        #[arg(long)]
        d_b: usize,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the critical parameter s to 12 decimals.
    CriticalS {
        #[arg(long)]
        json: bool,
    },
}

struct CliError {
    code: i32,
    msg: String,
}

impl CliError {
    fn input(msg: impl Into<String>) -> Self {
        Self {
            code: 2,
            msg: msg.into(),
        }
    }

    fn output(msg: impl Into<String>) -> Self {
        Self {
            code: 4,
            msg: msg.into(),
        }
    }
}

impl From<QcError> for CliError {
    fn from(e: QcError) -> Self {
        let code = match e {
            QcError::SvdFailure => 3,
            _ => 2,
        };
        Self {
            code,
            msg: e.to_string(),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.msg);
        std::process::exit(e.code);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze {
            input,
            q,
            iterations,
            seed,
            json,
        } => cmd_analyze(&input, q, iterations, seed, json),
        Command::Bounds {
            input,
            q,
            iterations,
            seed,
        } => {
            let report = report_for(&input, q, iterations, seed)?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(())
        }
        Command::IsotropicSweep {
            d,
            q,
            f_min,
            f_max,
            steps,
            out,
        } => cmd_isotropic_sweep(d, q, f_min, f_max, steps, &out),
        Command::Derivatives {
            d,
            q,
            f_min,
            f_max,
            steps,
            out,
        } => cmd_derivatives(d, q, f_min, f_max, steps, out.as_deref()),
        Command::Random {
            d_a,
            d_b,
            rank,
            seed,
            out,
        } => cmd_random(d_a, d_b, rank, seed, &out),
        Command::CriticalS { json } => {
            let s = critical_s();
            if json {
                println!("{{\"s\": {s:.12}}}");
            } else {
                println!("{s:.12}");
            }
            Ok(())
        }
    }
}

fn report_for(input: &PathBuf, q: f64, iterations: usize, seed: u64) -> Result<BoundReport, CliError> {
    let file = File::open(input).map_err(|e| CliError::input(format!("{}: {e}", input.display())))?;
    let state = read_state(file).map_err(CliError::input)?;
    let q = QParam::new(q)?;
    let rho = state.density();
    let report = bound_report(
        &rho,
        q,
        BoundOptions {
            upper_iterations: iterations,
            seed,
        },
    )?;
    Ok(report)
}

fn cmd_analyze(
    input: &PathBuf,
    q: f64,
    iterations: usize,
    seed: u64,
    json: bool,
) -> Result<(), CliError> {
    let file = File::open(input).map_err(|e| CliError::input(format!("{}: {e}", input.display())))?;
    let state = read_state(file).map_err(CliError::input)?;
    let q = QParam::new(q)?;
    let rho = state.density();
    let detection = detect(&rho)?;
    let report = bound_report(
        &rho,
        q,
        BoundOptions {
            upper_iterations: iterations,
            seed,
        },
    )?;

    if json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
        return Ok(());
    }

    let dims = rho.dims();
    println!("state: {} x {} (d = {})", dims.da(), dims.db(), dims.d());
    for v in [&detection.ppt, &detection.ccnr] {
        println!(
            "{:<5} {:?} (witness {:+.6e})",
            format!("{:?}:", v.criterion),
            v.status,
            v.witness
        );
    }
    println!("overall: {}", if detection.entangled { "Entangled" } else { "Inconclusive" });
    println!("q = {}", report.q);
    println!("regime: {:?}", report.regime);
    println!("ppt_norm      = {:.12}", report.ppt_norm);
    println!("realign_norm  = {:.12}", report.realign_norm);
    match report.theorem1_bound {
        Some(b) => println!("theorem1_bound = {b:.12}"),
        None => println!("theorem1_bound = (not applicable in this regime)"),
    }
    println!("prior_bound   = {:.12}", report.prior_bound);
    println!("best_lower    = {:.12}", report.best_lower);
    match report.upper_estimate {
        Some(u) => println!("upper_estimate = {u:.12}"),
        None => println!("upper_estimate = (skipped; pass --iterations)"),
    }
    Ok(())
}

/// Worker-thread cap for sweep evaluation, from QC_THREADS (default 1).
fn thread_cap() -> Result<usize, CliError> {
    match std::env::var("QC_THREADS") {
        Err(_) => Ok(1),
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| CliError::input(format!("QC_THREADS must be a positive integer, got {v:?}"))),
    }
}

fn fmt_cell(x: f64) -> String {
    assert!(x.is_finite(), "non-finite CSV cell");
    format!("{x:.12}")
}

fn cmd_isotropic_sweep(
    d: usize,
    q: f64,
    f_min: f64,
    f_max: f64,
    steps: usize,
    out: &PathBuf,
) -> Result<(), CliError> {
    if d < 2 {
        return Err(CliError::input("d must be at least 2"));
    }
    if !(0.0..=1.0).contains(&f_min) || !(0.0..=1.0).contains(&f_max) || f_min >= f_max {
        return Err(CliError::input("need 0 <= f_min < f_max <= 1"));
    }
    if steps < 2 {
        return Err(CliError::input("steps must be at least 2"));
    }
    let q = QParam::new(q)?;
    let envelope = exact_isotropic_qc(q, d, DEFAULT_GRID);
    let grid: Vec<f64> = (0..steps)
        .map(|i| f_min + (f_max - f_min) * i as f64 / (steps - 1) as f64)
        .collect();

    let threads = thread_cap()?.min(grid.len());
    let chunk = grid.len().div_ceil(threads);
    let mut rows: Vec<Result<(f64, f64, f64, f64), QcError>> = Vec::with_capacity(grid.len());
    std::thread::scope(|scope| {
        let handles: Vec<_> = grid
            .chunks(chunk)
            .map(|fs| {
                let envelope = &envelope;
                scope.spawn(move || {
                    fs.iter()
                        .map(|&f| sweep_row(f, q, d, envelope))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            rows.extend(h.join().expect("sweep worker panicked"));
        }
    });

    let file = File::create(out).map_err(|e| CliError::output(format!("{}: {e}", out.display())))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>, line: String| {
        writeln!(w, "{line}").map_err(|e| CliError::output(e.to_string()))
    };
    write(&mut w, "F,exact,theorem1,prior".into())?;
    for row in rows {
        let (f, exact, theorem1, prior) = row?;
        write(
            &mut w,
            format!(
                "{},{},{},{}",
                fmt_cell(f),
                fmt_cell(exact),
                fmt_cell(theorem1),
                fmt_cell(prior)
            ),
        )?;
    }
    w.flush().map_err(|e| CliError::output(e.to_string()))?;
    Ok(())
}

/// One sweep row, computed through the actual matrix pipeline. In the d = 2,
/// q < s regime the theorem bound makes no claim and the column falls back to
/// the trivial lower bound 0.
fn sweep_row(
    f: f64,
    q: QParam,
    d: usize,
    envelope: &qconc::isotropic::PiecewiseLinear,
) -> Result<(f64, f64, f64, f64), QcError> {
    let rho = isotropic_state(Fidelity::new(f)?, d)?;
    let report = bound_report(&rho, q, BoundOptions::default())?;
    Ok((
        f,
        envelope.eval(f),
        report.theorem1_bound.unwrap_or(0.0),
        report.prior_bound,
    ))
}

fn cmd_derivatives(
    d: usize,
    q: f64,
    f_min: Option<f64>,
    f_max: Option<f64>,
    steps: usize,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    if d < 2 {
        return Err(CliError::input("d must be at least 2"));
    }
    if steps < 2 {
        return Err(CliError::input("steps must be at least 2"));
    }
    let q = QParam::new(q)?;
    let step = 1e-5;
    let f_min = f_min.unwrap_or(1.0 / d as f64 + 1e-3);
    let f_max = f_max.unwrap_or(1.0 - 1e-3);
    if f_min >= f_max || f_min - step <= 1.0 / d as f64 || f_max + step > 1.0 {
        return Err(CliError::input(
            "fidelity range must satisfy 1/d < f_min - 1e-5 and f_max + 1e-5 <= 1",
        ));
    }

    let mut lines = vec!["F,dxi_dF,d2xi_dF2".to_string()];
    for i in 0..steps {
        let f = f_min + (f_max - f_min) * i as f64 / (steps - 1) as f64;
        let (d1, d2) = xi_central_derivatives(Fidelity::new(f)?, q, d, step)?;
        lines.push(format!("{},{},{}", fmt_cell(f), fmt_cell(d1), fmt_cell(d2)));
    }

    match out {
        None => {
            for line in lines {
                println!("{line}");
            }
        }
        Some(path) => {
            let file =
                File::create(path).map_err(|e| CliError::output(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            for line in lines {
                writeln!(w, "{line}").map_err(|e| CliError::output(e.to_string()))?;
            }
            w.flush().map_err(|e| CliError::output(e.to_string()))?;
        }
    }
    Ok(())
}

fn cmd_random(d_a: usize, d_b: usize, rank: usize, seed: u64, out: &PathBuf) -> Result<(), CliError> {
    let dims = BipartiteDims::new(d_a, d_b)?;
    let rho = random_density(dims, rank, seed)?;
    let file = File::create(out).map_err(|e| CliError::output(format!("{}: {e}", out.display())))?;
    let mut w = BufWriter::new(file);
    write_state(&mut w, &StateFile::from_density(&rho))
        .map_err(|e| CliError::output(e.to_string()))?;
    w.flush().map_err(|e| CliError::output(e.to_string()))?;
    Ok(())
}
