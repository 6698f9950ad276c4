use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use twisted_moment::arith::gcd;
use twisted_moment::kernels::{
    cot_kernel, harmonic_kernel, harmonic_kernel_rational, log_sine_kernel, KernelConfig,
};
use twisted_moment::moments::{moment_report, MomentReport, ReportOptions};
use twisted_moment::sweep::{format_sig, write_sweep, Format, ModulusFilter, SweepSpec};
use twisted_moment::verify::{run_all, VerifyConfig, DEFAULT_TOLERANCE};
use twisted_moment::Error;

const DISPLAY_DIGITS: usize = 12;

#[derive(Parser)]
#[command(
    name = "twisted-moment",
    version,
    about = "Twisted quadratic moments of Dirichlet L(1, chi)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact, brute-force and asymptotic moments for one (f, c)
    Compute {
        f: u64,
        c: u64,
        /// Skip the brute-force sums above this modulus
        #[arg(long, default_value_t = 2000)]
        brute_cap: u64,
        /// Allow c = 1
        #[arg(long)]
        untwisted: bool,
    },
    /// Run the identity suites
    Verify {
        #[arg(long, default_value_t = 100)]
        fmax: u64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Sweep a grid of (f, c) pairs
    Sweep(SweepArgs),
    /// Evaluate a single kernel
    Kernel {
        #[command(subcommand)]
        kernel: KernelCommand,
    },
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 5)]
    f_min: u64,
    #[arg(long, default_value_t = 50)]
    f_max: u64,
    /// Only prime moduli
    #[arg(long, group = "filter")]
    primes: bool,
    /// Only squarefree moduli
    #[arg(long, group = "filter")]
    squarefree: bool,
    /// Every modulus (default)
    #[arg(long, group = "filter")]
    all: bool,
    /// Comma-separated twists
    #[arg(long = "c", default_value = "2")]
    c_list: String,
    #[arg(long, default_value_t = 2000)]
    brute_cap: u64,
    /// Worker threads; 0 uses every core
    #[arg(long, env = "TM_THREADS", default_value_t = 0)]
    threads: usize,
    /// Output file; stdout if omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Allow c = 1
    #[arg(long)]
    untwisted: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum KernelCommand {
    /// Log-sine kernel R(c, d)
    R { c: u64, d: u64 },
    /// Cotangent kernel S(c, d)
    S {
        c: u64,
        #[arg(allow_hyphen_values = true)]
        d: i64,
    },
    /// Harmonic kernel F(x); x may be a decimal or a fraction p/q
    F {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

enum Failure {
    Verification,
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute {
            f,
            c,
            brute_cap,
            untwisted,
        } => compute(f, c, brute_cap, untwisted),
        Command::Verify { fmax, tol } => verify(fmax, tol),
        Command::Sweep(args) => sweep(args),
        Command::Kernel { kernel } => kernel_cmd(kernel),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn show(x: f64) -> String {
    format_sig(x, DISPLAY_DIGITS)
}

fn compute(f: u64, c: u64, brute_cap: u64, untwisted: bool) -> Result<(), Failure> {
    if c > 0 && gcd(f, c) != 1 {
        return Err(Failure::Usage(format!("gcd(f,c) must be 1 (f={f}, c={c})")));
    }
    if f <= c {
        return Err(Failure::Usage(format!("f must exceed c (f={f}, c={c})")));
    }
    let options = ReportOptions {
        brute_cap,
        allow_untwisted: untwisted,
    };
    let report = moment_report(f, c, &options)?;
    print_report(&report);
    Ok(())
}

/// Values below the last displayed digit of the largest moment print as 0.
fn print_report(r: &MomentReport) {
    let scale = [
        r.m_plus_exact,
        r.m_minus_exact,
        r.m_exact,
        r.m_asym,
        r.m_plus_asym,
    ]
    .iter()
    .fold(1.0f64, |m, x| m.max(x.abs()));
    let flush = |x: f64| if x.abs() < scale * 1e-12 { 0.0 } else { x };
    let val = |x: f64| show(flush(x));
    let brute = |z: Option<twisted_moment::Complex64>| match z {
        Some(z) => {
            let im = flush(z.im);
            let sign = if im.is_sign_negative() { '-' } else { '+' };
            format!("{} {sign} {}i", val(z.re), show(im.abs()))
        }
        None => "skipped (f above brute cap)".to_string(),
    };
    println!("f                    {}", r.f);
    println!("c                    {}", r.c);
    println!("phi_f                {}", r.phi_f);
    println!("m_plus_exact         {}", val(r.m_plus_exact));
    println!("m_minus_exact        {}", val(r.m_minus_exact));
    println!("m_exact              {}", val(r.m_exact));
    println!("m_plus_brute         {}", brute(r.m_plus_brute));
    println!("m_minus_brute        {}", brute(r.m_minus_brute));
    println!("m_brute              {}", brute(r.m_brute));
    if let Some(dev) = r.exact_brute_deviation() {
        println!("exact_brute_dev      {}", show(dev));
    }
    println!("m_asym               {}", val(r.m_asym));
    println!("m_plus_asym          {}", val(r.m_plus_asym));
    println!("m_minus_asym         {}", val(r.m_minus_asym));
    println!("residual             {}", val(r.residual));
    println!("residual_over_logf   {}", show(r.residual_over_logf));
    println!("residual_over_scale  {}", show(r.residual_over_scale));
    println!("plus_residual        {}", val(r.plus_residual));
}

fn verify(fmax: u64, tol: f64) -> Result<(), Failure> {
    if fmax < 5 {
        return Err(Failure::Usage(format!(
            "--fmax must be at least 5, got {fmax}"
        )));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
    }
    let start = Instant::now();
    let reports = run_all(&VerifyConfig::for_fmax(fmax, tol))?;
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    println!(
        "{} of {} suites passed in {:.1}s",
        reports.len() - failed,
        reports.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn parse_c_list(raw: &str) -> Result<Vec<u64>, Failure> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u64>()
                .map_err(|e| Failure::Usage(format!("bad twist {s:?}: {e}")))
        })
        .collect()
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let f_filter = if args.primes {
        ModulusFilter::Primes
    } else if args.squarefree {
        ModulusFilter::Squarefree
    } else {
        ModulusFilter::All
    };
    let spec = SweepSpec {
        f_min: args.f_min,
        f_max: args.f_max,
        f_filter,
        c_list: parse_c_list(&args.c_list)?,
        brute_cap: args.brute_cap,
        threads: args.threads,
        output_path: args.out.clone(),
        format: match args.format {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        },
        allow_untwisted: args.untwisted,
    };
    let (text, outcome) = write_sweep(&spec).map_err(|e| match (&e, &args.out) {
        (Error::Io(io), Some(path)) => {
            Failure::Usage(format!("cannot write {}: {io}", path.display()))
        }
        _ => e.into(),
    })?;
    if args.out.is_none() {
        print!("{text}");
    }
    eprintln!(
        "{} rows written, {} pairs skipped",
        outcome.reports.len(),
        outcome.skipped
    );
    Ok(())
}

fn parse_point(x: &str) -> Result<Result<(i64, u64), f64>, Failure> {
    let bad = |e: &dyn std::fmt::Display| Failure::Usage(format!("bad point {x:?}: {e}"));
    match x.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|e| bad(&e))?;
            let q: u64 = q.trim().parse().map_err(|e| bad(&e))?;
            Ok(Ok((p, q)))
        }
        None => x.trim().parse::<f64>().map(Err).map_err(|e| bad(&e)),
    }
}

fn kernel_cmd(kernel: KernelCommand) -> Result<(), Failure> {
    let value = match kernel {
        KernelCommand::R { c, d } => log_sine_kernel(c, d)?,
        KernelCommand::S { c, d } => cot_kernel(c, d)?,
        KernelCommand::F { x, tol } => {
            let cfg = KernelConfig::for_tolerance(tol)?;
            match parse_point(&x)? {
                Ok((p, q)) => harmonic_kernel_rational(p, q, &cfg)?,
                Err(x) if x.is_finite() => harmonic_kernel(x, &cfg),
                Err(x) => return Err(Failure::Usage(format!("x must be finite, got {x}"))),
            }
        }
    };
    println!("{}", show(value));
    Ok(())
}
