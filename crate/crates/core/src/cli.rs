//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a well-formed negative answer (infeasible design,
//! channel not pure-LDP), 2 usage or validation errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::calibration::{min_feasible_support, sweep_param, sweep_support, DesignResult, SweepRow};
use crate::error::Error;
use crate::format::{full, table, OutputFormat};
use crate::mechanism::{FamilyKind, MechanismSpec, TruncatedMechanism, TruncatedParams};
use crate::privacy::{defect_profile, pure_ldp_epsilon, worst_case_defect, PureLdpResult};
use crate::sampling::{histogram, sample};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sparse-ldp",
    version,
    about = "Exact privacy defects and support-size calibration for sparse Laplace/Gaussian channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Worst-case defect of a truncated channel over separations 0..=range.
    Defect(DefectArgs),
    /// Smallest support size meeting an (eps, delta) target.
    Design(DesignArgs),
    /// Tabulate defect and distortion over support sizes or kernel parameters.
    Sweep {
        #[command(subcommand)]
        kind: SweepKind,
    },
    /// Exact pure-LDP level of a mechanism spec given as JSON.
    CheckPure(CheckPureArgs),
    /// Draw seeded samples from a truncated channel.
    Sample(SampleArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// csv, json or table
    #[arg(long, default_value = "table")]
    format: OutputFormat,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct KernelArgs {
    /// laplace or gaussian
    #[arg(long)]
    family: FamilyKind,
    /// lambda (laplace) or sigma (gaussian)
    #[arg(long)]
    param: f64,
}

#[derive(Debug, Args)]
struct DefectArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    /// Support size (odd).
    #[arg(long)]
    s: u64,
    #[arg(long)]
    eps: f64,
    /// Privacy range H.
    #[arg(long)]
    range: u64,
    /// One row per separation h with its leakage/overlap split.
    #[arg(long)]
    per_h: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct DesignArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    range: u64,
    /// Largest support size to scan (odd).
    #[arg(long)]
    s_max: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Subcommand)]
enum SweepKind {
    /// Vary the support size at a fixed kernel parameter.
    Support {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        range: u64,
        /// Comma-separated odd support sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Vary the kernel parameter at a fixed support size.
    Param {
        #[arg(long)]
        family: FamilyKind,
        /// Comma-separated kernel parameters.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        range: u64,
        #[arg(long)]
        s: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct CheckPureArgs {
    /// Mechanism spec JSON file.
    spec: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long)]
    s: u64,
    /// Private input.
    #[arg(long, allow_negative_numbers = true)]
    x: i64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit per-output counts and frequencies instead of raw draws.
    #[arg(long)]
    histogram: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug)]
enum Failure {
    Invalid(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(Failure::Invalid(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let (text, output, code) = match command {
        Command::Defect(args) => {
            let (text, code) = defect(&args)?;
            (text, args.output, code)
        }
        Command::Design(args) => {
            let (text, code) = design(&args)?;
            (text, args.output, code)
        }
        Command::Sweep { kind } => match kind {
            SweepKind::Support {
                kernel,
                eps,
                range,
                values,
                output,
            } => {
                let family = kernel.family.with_param(kernel.param)?;
                let rows = sweep_support(family, eps, range, &values)?;
                (render_sweep("s", &rows, output.format), output, EXIT_OK)
            }
            SweepKind::Param {
                family,
                values,
                eps,
                range,
                s,
                output,
            } => {
                let rows = sweep_param(family, &values, eps, range, s)?;
                let label = match family {
                    FamilyKind::Laplace => "lambda",
                    FamilyKind::Gaussian => "sigma",
                };
                (render_sweep(label, &rows, output.format), output, EXIT_OK)
            }
        },
        Command::CheckPure(args) => {
            let text = std::fs::read_to_string(&args.spec).map_err(|e| {
                Error::InvalidArgument(format!("cannot read {}: {e}", args.spec.display()))
            })?;
            let spec = MechanismSpec::from_json(&text)?;
            let result = pure_ldp_epsilon(&spec);
            let code = if result.finite { EXIT_OK } else { EXIT_NEGATIVE };
            (render_pure(&result, args.output.format), args.output, code)
        }
        Command::Sample(args) => {
            let text = sample_cmd(&args)?;
            (text, args.output, EXIT_OK)
        }
    };

    match output.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(code)
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn defect(args: &DefectArgs) -> Result<(String, i32), Error> {
    let family = args.kernel.family.with_param(args.kernel.param)?;
    let params = TruncatedParams::new(family, args.s, args.range, args.eps)?;
    let mut out = String::new();
    if args.per_h {
        let profile = defect_profile(&params);
        match args.output.format {
            OutputFormat::Json => {
                #[derive(Serialize)]
                struct Row {
                    h: u64,
                    delta_h: f64,
                    leakage: f64,
                    overlap: f64,
                }
                let rows: Vec<Row> = profile
                    .iter()
                    .map(|(h, b)| Row {
                        h: *h,
                        delta_h: b.total,
                        leakage: b.support_leakage,
                        overlap: b.overlap_excess,
                    })
                    .collect();
                out = to_json(&rows);
            }
            OutputFormat::Csv => {
                out.push_str("h,delta_h,leakage,overlap\n");
                for (h, b) in &profile {
                    let _ = writeln!(
                        out,
                        "{h},{},{},{}",
                        full(b.total),
                        full(b.support_leakage),
                        full(b.overlap_excess)
                    );
                }
            }
            OutputFormat::Table => {
                let _ = writeln!(out, "{:>4}  {:>8}  {:>8}  {:>8}", "h", "delta_h", "leakage", "overlap");
                for (h, b) in &profile {
                    let _ = writeln!(
                        out,
                        "{h:>4}  {:>8}  {:>8}  {:>8}",
                        table(b.total),
                        table(b.support_leakage),
                        table(b.overlap_excess)
                    );
                }
            }
        }
    } else {
        let worst = worst_case_defect(&params);
        out = match args.output.format {
            OutputFormat::Json => to_json(&worst),
            OutputFormat::Csv => format!(
                "delta_star,argmax_h\n{},{}\n",
                full(worst.delta_star),
                worst.argmax_h
            ),
            OutputFormat::Table => format!(
                "delta_star={}\nargmax_h={}\n",
                table(worst.delta_star),
                worst.argmax_h
            ),
        };
    }
    Ok((out, EXIT_OK))
}

fn design(args: &DesignArgs) -> Result<(String, i32), Error> {
    let family = args.kernel.family.with_param(args.kernel.param)?;
    let result = min_feasible_support(family, args.eps, args.delta, args.range, args.s_max)?;
    let code = if result.feasible { EXIT_OK } else { EXIT_NEGATIVE };
    Ok((render_design(&result, args.output.format), code))
}

fn render_design(r: &DesignResult, format: OutputFormat) -> String {
    let opt = |v: Option<f64>, f: fn(f64) -> String| v.map(f).unwrap_or_default();
    match format {
        OutputFormat::Json => to_json(r),
        OutputFormat::Csv => format!(
            "feasible,s_chosen,delta_star,r1,r2,s_scanned_max\n{},{},{},{},{},{}\n",
            r.feasible,
            r.s_chosen.map(|s| s.to_string()).unwrap_or_default(),
            opt(r.achieved_delta_star, full),
            opt(r.moments.map(|m| m.r1), full),
            opt(r.moments.map(|m| m.r2), full),
            r.s_scanned_max
        ),
        OutputFormat::Table => {
            let mut out = format!("feasible={}\n", r.feasible);
            if let (Some(s), Some(d), Some(m)) = (r.s_chosen, r.achieved_delta_star, r.moments) {
                let _ = writeln!(out, "s={s}");
                let _ = writeln!(out, "delta_star={}", table(d));
                let _ = writeln!(out, "r1={}", table(m.r1));
                let _ = writeln!(out, "r2={}", table(m.r2));
            }
            let _ = writeln!(out, "s_scanned_max={}", r.s_scanned_max);
            out
        }
    }
}

fn render_sweep(label: &str, rows: &[SweepRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_json(rows),
        OutputFormat::Csv => {
            let mut out = String::from("varied,delta_star,r1,r2\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    full(r.varied),
                    full(r.delta_star),
                    full(r.r1),
                    full(r.r2)
                );
            }
            out
        }
        OutputFormat::Table => {
            let mut out = format!("{label:>6}  {:>10}  {:>7}  {:>7}\n", "delta_star", "r1", "r2");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{:>6}  {:>10}  {:>7}  {:>7}",
                    full(r.varied),
                    table(r.delta_star),
                    table(r.r1),
                    table(r.r2)
                );
            }
            out
        }
    }
}

fn render_pure(r: &PureLdpResult, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_json(r),
        OutputFormat::Csv => {
            let (wx, wxp, wy) = r
                .witness
                .map(|w| (w.x.to_string(), w.x_prime.to_string(), w.output.to_string()))
                .unwrap_or_default();
            format!(
                "finite,epsilon_star,witness_x,witness_x_prime,witness_output\n{},{},{wx},{wxp},{wy}\n",
                r.finite,
                r.epsilon_star.map(full).unwrap_or_default()
            )
        }
        OutputFormat::Table => {
            let mut out = format!("finite={}\n", r.finite);
            match r.epsilon_star {
                Some(e) => {
                    let _ = writeln!(out, "epsilon_star={}", table(e));
                }
                None => out.push_str("epsilon_star=inf\n"),
            }
            if let Some(w) = r.witness {
                let _ = writeln!(out, "witness=(x={}, x'={}, y={})", w.x, w.x_prime, w.output);
            }
            out
        }
    }
}

fn sample_cmd(args: &SampleArgs) -> Result<String, Error> {
    let family = args.kernel.family.with_param(args.kernel.param)?;
    let mechanism = TruncatedMechanism::new(family, args.s)?;
    let draws = sample(&mechanism, args.x, args.seed, args.n)?;
    let format = args.output.format;
    if !args.histogram {
        return Ok(match format {
            OutputFormat::Json => to_json(&draws),
            OutputFormat::Csv => {
                let mut out = String::from("output\n");
                for d in &draws {
                    let _ = writeln!(out, "{d}");
                }
                out
            }
            OutputFormat::Table => {
                let joined: Vec<String> = draws.iter().map(i64::to_string).collect();
                format!("{}\n", joined.join(","))
            }
        });
    }

    #[derive(Serialize)]
    struct Bin {
        output: i64,
        count: u64,
        frequency: f64,
        pmf: f64,
    }
    let n = draws.len().max(1) as f64;
    let bins: Vec<Bin> = histogram(&mechanism, args.x, &draws)?
        .into_iter()
        .zip(mechanism.support_pmf(args.x))
        .map(|((output, count), (_, pmf))| Bin {
            output,
            count,
            frequency: count as f64 / n,
            pmf,
        })
        .collect();
    Ok(match format {
        OutputFormat::Json => to_json(&bins),
        OutputFormat::Csv => {
            let mut out = String::from("output,count,frequency,pmf\n");
            for b in &bins {
                let _ = writeln!(out, "{},{},{},{}", b.output, b.count, full(b.frequency), full(b.pmf));
            }
            out
        }
        OutputFormat::Table => {
            let mut out = format!("{:>8}  {:>10}  {:>9}  {:>6}\n", "output", "count", "frequency", "pmf");
            for b in &bins {
                let _ = writeln!(
                    out,
                    "{:>8}  {:>10}  {:>9}  {:>6}",
                    b.output,
                    b.count,
                    table(b.frequency),
                    table(b.pmf)
                );
            }
            out
        }
    })
}
