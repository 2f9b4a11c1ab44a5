//! Command-line surface: single evaluations, parameter sweeps, oracle
//! cross-checks, lattice-rule generation, and scenario benchmarks.
//!
//! Result rows use the stable CSV schema
//! `beta,L,n,method,value,log_scale,seconds` (17 significant digits);
//! `--json` switches to one JSON object with the same fields plus
//! diagnostics. Exit statuses: 0 success, 1 tolerance failure, 2 usage
//! error, 3 capacity guard.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lattice_trace_core::engine::{
    build_factor_matrix, circulant_trace, naive_product_rule, trace_chain, trace_power,
    CouplingProblem, KernelFunction,
};
use lattice_trace_core::models::fourier::FourierTable;
use lattice_trace_core::models::rotor::{
    rotor_central_difference, rotor_f, rotor_f0, rotor_ratio, rotor_spectra,
    rotor_susceptibility, Discretization, RotorObservable, RotorSpec,
};
use lattice_trace_core::models::u1::{u1_2d, wilson11, U1Spec2D, WilsonSpec};
use lattice_trace_core::models::u1_3d::{u1_3d_fourier_sum, u1_3d_nullspace};
use lattice_trace_core::oracles::{bessel_ratio_oracle, monte_carlo_ratio};
use lattice_trace_core::rules::{cbc_criterion, cbc_generate, rectangle_rule, CbcConfig};
use lattice_trace_core::{Error, Result};

const CSV_HEADER: &str = "beta,L,n,method,value,log_scale,seconds";

#[derive(Parser)]
#[command(name = "lattice-trace", version, about = "Recursive trace evaluation of lattice integrals")]
struct Cli {
    /// Working precision in bits (binary64 only: 53 or 64 accepted).
    #[arg(long, global = true, default_value_t = 53)]
    precision: u32,
    /// Emit a JSON object instead of a CSV row.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantum rotor observables (plaquette ratio or susceptibility).
    Rotor(RotorArgs),
    /// 2D compact U(1) plaquette expectation.
    #[command(name = "u1-2d")]
    U12d(U12dArgs),
    /// 1x1 Wilson loop partition value via the Fourier closed form.
    Wilson11(WilsonArgs),
    /// 3D compact U(1) partition value via the constrained Fourier sum.
    #[command(name = "u1-3d")]
    U13d(U13dArgs),
    /// Parameter sweep over a (beta, L, n) grid, CSV output.
    Sweep(SweepArgs),
    /// Cross-check the rotor ratio against an independent oracle.
    Oracle(OracleArgs),
    /// Generate a rank-1 lattice generating vector by CBC construction.
    #[command(name = "lattice-gen")]
    LatticeGen(LatticeGenArgs),
    /// Time trace scenarios across L and n grids.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ObservableArg {
    Plaquette,
    #[value(name = "topological-susceptibility")]
    TopologicalSusceptibility,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiscretizationArg {
    Forward,
    Central2,
    Central4,
}

#[derive(Args)]
struct RotorArgs {
    #[arg(long)]
    beta: String,
    #[arg(long = "L")]
    l: u64,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = ObservableArg::Plaquette)]
    observable: ObservableArg,
    #[arg(long, value_enum, default_value_t = DiscretizationArg::Forward)]
    discretization: DiscretizationArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Reduced,
    Nested,
}

#[derive(Args)]
struct U12dArgs {
    #[arg(long)]
    beta: String,
    #[arg(long = "L")]
    l: u64,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Reduced)]
    method: MethodArg,
    /// Outer quadrature points (nested method; defaults to n).
    #[arg(long = "N")]
    n_outer: Option<usize>,
}

#[derive(Args)]
struct WilsonArgs {
    #[arg(long)]
    beta: String,
    #[arg(long = "L")]
    l: u64,
    /// Loop extent (only 1 has a closed-form path).
    #[arg(long, default_value_t = 1)]
    r: u64,
    #[arg(long, default_value_t = 40)]
    lmax: i64,
}

#[derive(Args)]
struct U13dArgs {
    #[arg(long)]
    beta: String,
    #[arg(long = "L")]
    l: usize,
    #[arg(long, default_value_t = 24)]
    lmax: i64,
    #[arg(long = "coeff-bound", default_value_t = 2)]
    coeff_bound: i64,
}

#[derive(Args)]
struct SweepArgs {
    /// Single value, comma list, or arithmetic progression start:step:stop.
    #[arg(long)]
    beta: String,
    /// Comma-separated list of L values.
    #[arg(long = "L")]
    l: String,
    /// Comma-separated list of n values.
    #[arg(long)]
    n: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Reduced)]
    method: MethodArg,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleChoice {
    Bessel,
    Naive,
    Mc,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    beta: String,
    #[arg(long = "L")]
    l: u64,
    #[arg(long)]
    n: usize,
    /// Which oracle to compare against.
    #[arg(long, value_enum, default_value_t = OracleChoice::Bessel)]
    method: OracleChoice,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 60)]
    lmax: i64,
    /// Tolerance: relative difference (bessel/naive) or standard-error
    /// units (mc). Exceeding it exits with status 1.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct LatticeGenArgs {
    /// Rule dimension.
    #[arg(long)]
    s: usize,
    /// Number of lattice points (prime).
    #[arg(long = "N")]
    n: u64,
    #[arg(long, default_value_t = 2)]
    alpha: u32,
    /// Comma-separated product weights (last entry repeats).
    #[arg(long, default_value = "1.0")]
    gamma: String,
    /// Output path for the generating-vector file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    A1,
    A2,
    A6,
    A7,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    scenario: ScenarioArg,
    #[arg(long = "L")]
    l: String,
    #[arg(long)]
    n: String,
    #[arg(long, default_value = "1.0")]
    beta: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.precision != 53 && cli.precision != 64 {
        eprintln!(
            "error: --precision {} unsupported; this build is binary64 (accepted: 53, 64)",
            cli.precision
        );
        return ExitCode::from(2);
    }
    if let Ok(threads) = std::env::var("LATTICE_TRACE_THREADS") {
        match threads.parse::<usize>() {
            Ok(k) if k >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => {
                eprintln!("error: LATTICE_TRACE_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Capacity(_) => 3,
        Error::InvalidArgument(_) | Error::Parse(_) | Error::Unsupported(_) | Error::Io(_) => 2,
        _ => 3,
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Rotor(a) => cmd_rotor(cli, a),
        Command::U12d(a) => cmd_u1_2d(cli, a),
        Command::Wilson11(a) => cmd_wilson11(cli, a),
        Command::U13d(a) => cmd_u1_3d(cli, a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::LatticeGen(a) => cmd_lattice_gen(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn parse_beta(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("invalid beta {s:?}")))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    let out: std::result::Result<Vec<T>, _> =
        s.split(',').map(|t| t.trim().parse::<T>()).collect();
    let out = out.map_err(|_| Error::Parse(format!("invalid {what} list {s:?}")))?;
    if out.is_empty() {
        return Err(Error::Parse(format!("empty {what} list")));
    }
    Ok(out)
}

/// `start:step:stop` progression, comma list, or single value.
fn parse_betas(s: &str) -> Result<Vec<f64>> {
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "beta progression must be start:step:stop, got {s:?}"
            )));
        }
        let start = parse_beta(parts[0])?;
        let step = parse_beta(parts[1])?;
        let stop = parse_beta(parts[2])?;
        if step <= 0.0 || stop < start {
            return Err(Error::Parse("beta progression needs step > 0 and stop >= start".into()));
        }
        let count = ((stop - start) / step + 0.5).floor() as usize + 1;
        Ok((0..count).map(|i| start + step * i as f64).collect())
    } else {
        parse_list::<f64>(s, "beta")
    }
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

struct Row {
    beta: f64,
    l: u64,
    n: usize,
    method: String,
    value: f64,
    log_scale: i64,
    seconds: f64,
}

impl Row {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            fmt17(self.beta),
            self.l,
            self.n,
            self.method,
            fmt17(self.value),
            self.log_scale,
            fmt17(self.seconds)
        )
    }
}

fn emit_row(json: bool, row: &Row) {
    if json {
        let obj = serde_json::json!({
            "beta": row.beta,
            "L": row.l,
            "n": row.n,
            "method": row.method,
            "value": row.value,
            "log_scale": row.log_scale,
            "seconds": row.seconds,
            "imag_residue": 0.0,
        });
        println!("{obj}");
    } else {
        println!("{CSV_HEADER}");
        println!("{}", row.csv());
    }
}

fn cmd_rotor(cli: &Cli, a: &RotorArgs) -> Result<ExitCode> {
    let beta = parse_beta(&a.beta)?;
    let spec = RotorSpec {
        beta,
        l: a.l,
        n: a.n,
        observable: match a.observable {
            ObservableArg::Plaquette => RotorObservable::Plaquette,
            ObservableArg::TopologicalSusceptibility => {
                RotorObservable::TopologicalSusceptibility
            }
        },
        discretization: match a.discretization {
            DiscretizationArg::Forward => Discretization::Forward,
            DiscretizationArg::Central2 => Discretization::Central2,
            DiscretizationArg::Central4 => Discretization::Central4,
        },
    };
    let start = Instant::now();
    let (value, method) = match spec.observable {
        RotorObservable::Plaquette => (
            rotor_central_difference(&spec, None)?,
            match spec.discretization {
                Discretization::Forward => "rotor-forward",
                Discretization::Central2 => "rotor-central2",
                Discretization::Central4 => "rotor-central4",
            },
        ),
        RotorObservable::TopologicalSusceptibility => {
            (rotor_susceptibility(&spec)?, "rotor-susceptibility")
        }
    };
    emit_row(
        cli.json,
        &Row {
            beta,
            l: a.l,
            n: a.n,
            method: method.into(),
            value,
            log_scale: 0,
            seconds: start.elapsed().as_secs_f64(),
        },
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_u1_2d(cli: &Cli, a: &U12dArgs) -> Result<ExitCode> {
    let beta = parse_beta(&a.beta)?;
    let spec = match a.method {
        MethodArg::Reduced => U1Spec2D::reduced(beta, a.l, a.n),
        MethodArg::Nested => U1Spec2D::nested(beta, a.l, a.n, a.n_outer.unwrap_or(a.n)),
    };
    let start = Instant::now();
    let value = u1_2d(&spec)?;
    emit_row(
        cli.json,
        &Row {
            beta,
            l: a.l,
            n: a.n,
            method: match a.method {
                MethodArg::Reduced => "reduced".into(),
                MethodArg::Nested => "nested".into(),
            },
            value,
            log_scale: 0,
            seconds: start.elapsed().as_secs_f64(),
        },
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_wilson11(cli: &Cli, a: &WilsonArgs) -> Result<ExitCode> {
    let beta = parse_beta(&a.beta)?;
    let spec = WilsonSpec {
        beta,
        l: a.l,
        r_a: a.r,
        r_b: a.r,
        l_max: a.lmax,
    };
    let start = Instant::now();
    let value = wilson11(&spec)?;
    emit_row(
        cli.json,
        &Row {
            beta,
            l: a.l,
            n: (2 * a.lmax + 1) as usize,
            method: "wilson11".into(),
            value,
            log_scale: 0,
            seconds: start.elapsed().as_secs_f64(),
        },
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_u1_3d(cli: &Cli, a: &U13dArgs) -> Result<ExitCode> {
    let beta = parse_beta(&a.beta)?;
    let start = Instant::now();
    let cs = u1_3d_nullspace(a.l)?;
    let table = FourierTable::from_bessel(beta, a.lmax)?;
    let value = u1_3d_fourier_sum(&cs, &table, a.coeff_bound)?;
    emit_row(
        cli.json,
        &Row {
            beta,
            l: a.l as u64,
            n: (2 * a.coeff_bound + 1) as usize,
            method: "u1-3d".into(),
            value,
            log_scale: 0,
            seconds: start.elapsed().as_secs_f64(),
        },
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(a: &SweepArgs) -> Result<ExitCode> {
    use rayon::prelude::*;
    let betas = parse_betas(&a.beta)?;
    let ls = parse_list::<u64>(&a.l, "L")?;
    let ns = parse_list::<usize>(&a.n, "n")?;
    let method_name = match a.method {
        MethodArg::Reduced => "reduced",
        MethodArg::Nested => "nested",
    };
    let mut cells: Vec<(f64, u64, usize)> = Vec::new();
    for &beta in &betas {
        for &l in &ls {
            for &n in &ns {
                cells.push((beta, l, n));
            }
        }
    }
    let rows: Result<Vec<Row>> = cells
        .par_iter()
        .map(|&(beta, l, n)| {
            let spec = match a.method {
                MethodArg::Reduced => U1Spec2D::reduced(beta, l, n),
                MethodArg::Nested => U1Spec2D::nested(beta, l, n, n),
            };
            let value = u1_2d(&spec)?;
            Ok(Row {
                beta,
                l,
                n,
                method: method_name.into(),
                value,
                log_scale: 0,
                // deterministic placeholder: sweep files must be
                // byte-identical across reruns
                seconds: 0.0,
            })
        })
        .collect();
    let mut rows = rows?;
    rows.sort_by(|x, y| {
        x.beta
            .total_cmp(&y.beta)
            .then(x.l.cmp(&y.l))
            .then(x.n.cmp(&y.n))
    });
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    match &a.out {
        Some(path) => {
            std::fs::write(path, out).map_err(|e| {
                Error::Io(std::io::Error::new(
                    e.kind(),
                    format!("{}: {e}", path.display()),
                ))
            })?;
        }
        None => {
            print!("{out}");
            std::io::stdout().flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(a: &OracleArgs) -> Result<ExitCode> {
    let beta = parse_beta(&a.beta)?;
    let model = rotor_ratio(&RotorSpec::plaquette(beta, a.l, a.n))?;
    let (name, oracle, stderr) = match a.method {
        OracleChoice::Bessel => ("bessel", bessel_ratio_oracle(beta, a.l, a.lmax)?, None),
        OracleChoice::Naive => {
            let kernel = KernelFunction::difference_1d(move |x: f64| rotor_f(beta, x), true);
            let kernel0 = KernelFunction::difference_1d(move |x: f64| rotor_f0(beta, x), true);
            let rule = rectangle_rule::<f64>(a.n)?;
            let num = naive_product_rule(
                &CouplingProblem::first_order(a.l as usize, &kernel, Some(&kernel0))?,
                &rule,
            )?;
            let den = naive_product_rule(
                &CouplingProblem::first_order(a.l as usize, &kernel, None)?,
                &rule,
            )?;
            ("naive", num.value.div(&den.value).real(), None)
        }
        OracleChoice::Mc => {
            let l = a.l as usize;
            let num = move |x: &[f64]| {
                let mut p = rotor_f0(beta, x[1 % l] - x[0]);
                for i in 1..l {
                    p *= rotor_f(beta, x[(i + 1) % l] - x[i]);
                }
                p
            };
            let den = move |x: &[f64]| {
                let mut p = 1.0;
                for i in 0..l {
                    p *= rotor_f(beta, x[(i + 1) % l] - x[i]);
                }
                p
            };
            let est = monte_carlo_ratio(num, den, l, a.samples, a.seed)?;
            ("mc", est.mean, Some(est.stderr))
        }
    };
    let abs_diff = (model - oracle).abs();
    let rel_diff = abs_diff / oracle.abs().max(1e-300);
    println!("model   = {}", fmt17(model));
    println!("{name:7} = {}", fmt17(oracle));
    println!("abs_diff = {abs_diff:.3e}");
    println!("rel_diff = {rel_diff:.3e}");
    let measure = if let Some(se) = stderr {
        let sigma = abs_diff / se.max(1e-300);
        println!("stderr   = {se:.3e}");
        println!("sigma    = {sigma:.3}");
        sigma
    } else {
        rel_diff
    };
    if let Some(tol) = a.tol {
        if measure > tol {
            println!("tolerance {tol:.3e} exceeded");
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_lattice_gen(a: &LatticeGenArgs) -> Result<ExitCode> {
    let gamma = parse_list::<f64>(&a.gamma, "gamma")?;
    let cfg = CbcConfig {
        alpha: a.alpha,
        gamma,
    };
    let res = cbc_generate(a.s, a.n, &cfg)?;
    let recomputed = cbc_criterion(a.n, res.rule.generating_vector(), &cfg);
    let z: Vec<String> = res
        .rule
        .generating_vector()
        .iter()
        .map(u64::to_string)
        .collect();
    let text = format!("{}\n{}\n{}\n", res.rule.count(), res.rule.dim(), z.join(" "));
    match &a.out {
        Some(path) => {
            std::fs::write(path, text)?;
            println!("e2 = {}", fmt17(recomputed));
        }
        None => {
            print!("{text}");
            eprintln!("e2 = {}", fmt17(recomputed));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(a: &BenchArgs) -> Result<ExitCode> {
    let beta = parse_beta(&a.beta)?;
    let ls = parse_list::<u64>(&a.l, "L")?;
    let ns = parse_list::<usize>(&a.n, "n")?;
    println!("scenario,L,n,seconds");
    for &n in &ns {
        for &l in &ls {
            let seconds = match a.scenario {
                ScenarioArg::A1 => {
                    let kernel =
                        KernelFunction::difference_1d(move |x: f64| rotor_f(beta, x), true);
                    let rule = rectangle_rule::<f64>(n)?;
                    let start = Instant::now();
                    let m = build_factor_matrix(&kernel, &rule.points);
                    let ms = vec![m; l as usize];
                    trace_chain(&ms, &rule.weights)?;
                    start.elapsed().as_secs_f64()
                }
                ScenarioArg::A2 => {
                    let kernel =
                        KernelFunction::difference_1d(move |x: f64| rotor_f(beta, x), true);
                    let rule = rectangle_rule::<f64>(n)?;
                    let start = Instant::now();
                    let m = build_factor_matrix(&kernel, &rule.points);
                    trace_power(&m, &rule.weights, l)?;
                    start.elapsed().as_secs_f64()
                }
                ScenarioArg::A6 => {
                    let start = Instant::now();
                    let (f, _) = rotor_spectra(beta, n)?;
                    circulant_trace(&[(&f, l)])?;
                    start.elapsed().as_secs_f64()
                }
                ScenarioArg::A7 => {
                    let start = Instant::now();
                    let (f, f0) = rotor_spectra(beta, n)?;
                    circulant_trace(&[(&f0, 1), (&f, l - 1)])?;
                    start.elapsed().as_secs_f64()
                }
            };
            let name = match a.scenario {
                ScenarioArg::A1 => "A1",
                ScenarioArg::A2 => "A2",
                ScenarioArg::A6 => "A6",
                ScenarioArg::A7 => "A7",
            };
            println!("{name},{l},{n},{}", fmt17(seconds));
        }
    }
    Ok(ExitCode::SUCCESS)
}
