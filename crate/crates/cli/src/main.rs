//! `ocslopes`: run the slope verifications from the command line.
//!
//! Exit codes: 0 when every report passes, 1 on any failed or errored
//! report, 2 on a usage error.

mod sink;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use ocslopes::classical::verify_conjecture1;
use ocslopes::qseries::{appendix_identities, named_series, SERIES_NAMES};
use ocslopes::spectral::{
    np_lemma_check, spectral_slopes, verify_adb_grid, verify_integrality, verify_minor_identities,
    verify_selfadjoint_grid, verify_uf_cross,
};
use ocslopes::valuation::{slope_p11, slope_weight0};
use ocslopes::VerificationReport;

use sink::{Format, ReportSink};

const CI_KMAX: i64 = 512;
const LONG_KMAX: i64 = 2048;

#[derive(Parser)]
#[command(name = "ocslopes", version, about = "Exact 2-adic slope computations and verification sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the Newton polygon of T2 with the conjectured one, weight by weight.
    VerifyClassical(VerifyClassical),
    /// Print predicted (and for weight 0, computed) slopes.
    Slopes(Slopes),
    /// Run named verification suites.
    Suite(Suite),
    /// Dump q-expansion coefficients as `n<TAB>num/den`.
    Qexp(Qexp),
}

#[derive(Args)]
struct Output {
    /// Report format: one JSON object per line, or flat CSV.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, env = "OCSLOPES_JOBS")]
    jobs: Option<usize>,
    /// Emit reports in parameter order instead of completion order.
    #[arg(long)]
    ordered: bool,
}

#[derive(Args)]
struct VerifyClassical {
    /// A single even weight >= 12.
    #[arg(long, conflicts_with_all = ["from", "to"])]
    k: Option<i64>,
    #[arg(long)]
    from: Option<i64>,
    #[arg(long)]
    to: Option<i64>,
    #[arg(long, default_value_t = 2)]
    step: i64,
    /// Allow weights above 512 (up to 2048). Slow.
    #[arg(long)]
    long: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
#[command(group(ArgGroup::new("family").required(true).args(["weight0", "p11"])))]
struct Slopes {
    /// Weight-0 overconvergent slopes at p = 2, predicted and computed.
    #[arg(long)]
    weight0: bool,
    /// Conjectured slopes at p = 11 (formula only).
    #[arg(long)]
    p11: bool,
    #[arg(long)]
    count: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteName {
    Adb,
    Integrality,
    Minors,
    Selfadjoint,
    Nplemma,
    Appendix,
    Ufcross,
}

#[derive(Args)]
struct Suite {
    #[arg(required = true, value_enum)]
    names: Vec<SuiteName>,
    /// Size bound for grid suites (matrix size for nplemma, k for ufcross).
    #[arg(long)]
    nmax: Option<usize>,
    /// Series precision for the appendix suite.
    #[arg(long, default_value_t = 200)]
    prec: usize,
    /// Number of seeds for nplemma.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Qexp {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(SERIES_NAMES))]
    name: String,
    /// Highest exponent to print.
    #[arg(long)]
    terms: usize,
    /// Write to a file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::VerifyClassical(args) => verify_classical(args),
        Command::Slopes(args) => slopes(args),
        Command::Suite(args) => suite(args),
        Command::Qexp(args) => qexp(args),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}

fn weights(args: &VerifyClassical) -> Result<Vec<i64>, String> {
    let ceiling = if args.long { LONG_KMAX } else { CI_KMAX };
    let ks: Vec<i64> = match (args.k, args.from, args.to) {
        (Some(k), _, _) => vec![k],
        (None, from, to) => {
            if args.step <= 0 {
                return Err(format!("step must be positive, got {}", args.step));
            }
            let (from, to) = (from.unwrap_or(12), to.unwrap_or(ceiling));
            if from > to {
                return Err(format!("empty range {from}..={to}"));
            }
            (from..=to).step_by(args.step as usize).collect()
        }
    };
    for &k in &ks {
        if k < 12 || k % 2 != 0 {
            return Err(format!("weight {k} is not an even integer >= 12"));
        }
        if k > ceiling {
            return Err(if args.long {
                format!("weight {k} exceeds {LONG_KMAX}")
            } else {
                format!("weight {k} exceeds {CI_KMAX}; pass --long for the extended sweep")
            });
        }
    }
    Ok(ks)
}

fn thread_pool(jobs: Option<usize>) -> io::Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    builder.build().map_err(io::Error::other)
}

/// Run `task` on every input in a worker pool, streaming reports to stdout.
/// Returns whether every report passed.
fn run_all<T, F>(inputs: Vec<T>, output: &Output, task: F) -> io::Result<bool>
where
    T: Send,
    F: Fn(T) -> VerificationReport + Sync,
{
    let pool = thread_pool(output.jobs)?;
    let mut sink = ReportSink::new(io::stdout().lock(), output.format)?;
    let (tx, rx) = std::sync::mpsc::channel();
    let ordered = output.ordered;
    let total = inputs.len();
    std::thread::scope(|scope| -> io::Result<()> {
        let task = &task;
        scope.spawn(move || {
            pool.install(|| {
                inputs
                    .into_par_iter()
                    .enumerate()
                    .for_each_with(tx, |tx, (i, x)| {
                        let _ = tx.send((i, task(x)));
                    })
            })
        });
        if ordered {
            let mut slots: Vec<Option<VerificationReport>> = (0..total).map(|_| None).collect();
            let mut next = 0;
            for (i, report) in rx {
                slots[i] = Some(report);
                while next < total {
                    let Some(r) = slots[next].take() else { break };
                    sink.write(&r)?;
                    next += 1;
                }
            }
        } else {
            for (_, report) in rx {
                sink.write(&report)?;
            }
        }
        Ok(())
    })?;
    sink.finish()
}

fn verify_classical(args: VerifyClassical) -> io::Result<ExitCode> {
    let ks = match weights(&args) {
        Ok(ks) => ks,
        Err(e) => return Ok(usage_error(e)),
    };
    let ok = run_all(ks, &args.output, verify_conjecture1)?;
    Ok(exit_for(ok))
}

fn exit_for(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn slopes(args: Slopes) -> io::Result<ExitCode> {
    if args.count == 0 {
        return Ok(usage_error("--count must be at least 1"));
    }
    let mut out = io::stdout().lock();
    if args.p11 {
        writeln!(out, "n\tpredicted")?;
        for n in 1..=args.count as i64 {
            let s = slope_p11(n).map_err(io::Error::other)?;
            writeln!(out, "{n}\t{s}")?;
        }
        return Ok(ExitCode::SUCCESS);
    }
    let computed = match spectral_slopes(args.count) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::FAILURE);
        }
    };
    let values = computed.slopes.as_integers();
    let mut ok = true;
    writeln!(out, "n\tpredicted\tcomputed\tN")?;
    for (i, s) in computed.slopes.slopes.iter().enumerate() {
        let n = i as i64 + 1;
        let predicted = slope_weight0(n).map_err(io::Error::other)?;
        ok &= values.as_ref().is_some_and(|v| v[i] == predicted as i64);
        writeln!(out, "{n}\t{predicted}\t{s}\t{}", computed.certified_at)?;
    }
    Ok(exit_for(ok))
}

enum Job {
    Adb(i64),
    Integrality(i64),
    Minors(i64),
    Selfadjoint(i64),
    NpLemma(usize, u64),
    Appendix(usize),
    UfCross(usize),
}

impl Job {
    fn run(self) -> VerificationReport {
        match self {
            Job::Adb(n) => verify_adb_grid(n),
            Job::Integrality(n) => verify_integrality(n),
            Job::Minors(n) => verify_minor_identities(n),
            Job::Selfadjoint(n) => verify_selfadjoint_grid(n),
            Job::NpLemma(n, seed) => np_lemma_check(n, seed),
            Job::Appendix(prec) => appendix_identities(prec),
            Job::UfCross(k) => verify_uf_cross(k),
        }
    }
}

fn suite(args: Suite) -> io::Result<ExitCode> {
    if args.nmax == Some(0) {
        return Ok(usage_error("--nmax must be at least 1"));
    }
    let size = |default: usize| args.nmax.unwrap_or(default);
    let mut names = args.names.clone();
    names.dedup();
    let mut jobs = Vec::new();
    for name in names {
        match name {
            SuiteName::Adb => jobs.push(Job::Adb(size(60) as i64)),
            SuiteName::Integrality => jobs.push(Job::Integrality(size(200) as i64)),
            SuiteName::Minors => jobs.push(Job::Minors(size(40) as i64)),
            SuiteName::Selfadjoint => jobs.push(Job::Selfadjoint(size(60) as i64)),
            SuiteName::Nplemma => {
                for n in 1..=size(8) {
                    jobs.extend((0..args.seeds).map(|s| Job::NpLemma(n, s)));
                }
            }
            SuiteName::Appendix => jobs.push(Job::Appendix(args.prec)),
            SuiteName::Ufcross => jobs.push(Job::UfCross(size(24))),
        }
    }
    let ok = run_all(jobs, &args.output, Job::run)?;
    Ok(exit_for(ok))
}

fn qexp(args: Qexp) -> io::Result<ExitCode> {
    let Some(series) = named_series(&args.name, args.terms) else {
        return Ok(usage_error(format!("unknown series {}", args.name)));
    };
    match args.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            series.write_dump(&mut w)?;
            w.flush()?;
        }
        None => series.write_dump(io::stdout().lock())?,
    }
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> VerifyClassical {
        let cli = Cli::try_parse_from(["ocslopes", "verify-classical"].iter().chain(args)).unwrap();
        match cli.command {
            Command::VerifyClassical(v) => v,
            _ => unreachable!(),
        }
    }

    #[test]
    fn default_ranges() {
        let ks = weights(&parse(&[])).unwrap();
        assert_eq!((ks[0], *ks.last().unwrap(), ks.len()), (12, 512, 251));
        let ks = weights(&parse(&["--long"])).unwrap();
        assert_eq!(*ks.last().unwrap(), 2048);
        assert_eq!(weights(&parse(&["--from", "20", "--to", "30", "--step", "4"])).unwrap(), vec![20, 24, 28]);
    }

    #[test]
    fn rejected_ranges() {
        assert!(weights(&parse(&["--from", "13", "--to", "15"])).is_err());
        assert!(weights(&parse(&["--from", "12", "--to", "20", "--step", "3"])).is_err());
        assert!(weights(&parse(&["--to", "600"])).is_err());
        assert!(weights(&parse(&["--to", "600", "--long"])).is_ok());
        assert!(Cli::try_parse_from(["ocslopes", "verify-classical", "--k", "12", "--from", "12"]).is_err());
    }
}
