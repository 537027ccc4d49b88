use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use frobst_core::endo::{write_lattice, LatticeRow};
use frobst_core::stats::{format_moment, split_filter_for, SplitField, DEFAULT_BINS};
use frobst_core::stgroup::DEFAULT_QUADRATURE;
use frobst_core::{
    builtin_group, component_group_profile, emit_csv, haar_moments, lattice_report, parse_words, scan, trace,
    Coefficient, CurveFamily, EndoContext, Family, GroupName, PrimeField, Rational, ScanOptions, SqrtStrategy,
};

#[derive(Parser)]
#[command(name = "frobst", version, about = "Frobenius trace statistics for y^2 = x^8 + c and y^2 = x^7 - cx")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print `p,t_p,a1` for one good prime.
    Trace {
        #[command(flatten)]
        curve: CurveArgs,
        /// An odd prime of good reduction below 2^62.
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        sqrt: SqrtArgs,
    },
    /// Accumulate a1 moments and a histogram over all good primes up to a bound.
    Scan {
        #[command(flatten)]
        curve: CurveArgs,
        /// Inclusive bound; accepts `2^k`.
        #[arg(long, default_value = "2^22", value_parser = parse_limit)]
        limit: u64,
        /// Restrict to primes splitting completely in this field.
        #[arg(long, default_value = "q", value_parser = parse_display::<SplitField>)]
        filter: SplitField,
        /// Histogram bins over [-6, 6].
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        /// Worker threads; 0 uses one per core.
        #[arg(long, env = "FROBST_THREADS", default_value_t = 0)]
        threads: usize,
        /// Width of the prime intervals handed to workers; accepts `2^k`.
        #[arg(long, default_value = "2^20", value_parser = parse_limit)]
        chunk: u64,
        /// Output stem for `<stem>.moments.csv` and `<stem>.hist.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        sqrt: SqrtArgs,
    },
    /// Haar moments `n,Mn` of a coefficient over a Sato-Tate group.
    StMoments {
        #[arg(long, value_parser = parse_display::<GroupName>)]
        group: GroupName,
        #[arg(long, default_value = "a1", value_parser = parse_display::<Coefficient>)]
        coeff: Coefficient,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
        /// Equispaced angles per torus dimension.
        #[arg(long, default_value_t = DEFAULT_QUADRATURE)]
        quadrature: usize,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Component group order, commutativity and element orders.
    Components {
        #[arg(long, value_parser = parse_display::<GroupName>)]
        group: GroupName,
    },
    /// Fixed-algebra profile of the subgroup generated by words in r, s, t.
    Endotype {
        /// Comma-separated words, e.g. "t,(rs)^2".
        #[arg(long)]
        subgroup: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fixed-algebra profiles of every subgroup in the lattice.
    Lattice {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CurveArgs {
    /// `c1` for y^2 = x^8 + c, `c2` for y^2 = x^7 - cx.
    #[arg(long, value_parser = parse_display::<Family>)]
    family: Family,
    /// Nonzero integer or `num/den`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_display::<Rational>)]
    c: Rational,
}

impl CurveArgs {
    fn curve(&self) -> Result<CurveFamily, Failure> {
        CurveFamily::new(self.family, self.c).map_err(|e| Failure::Invalid(e.into()))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SqrtKind {
    Ts,
    Cipolla,
}

#[derive(Args)]
struct SqrtArgs {
    /// Square-root algorithm used inside the trace formulas.
    #[arg(long, value_enum, default_value = "ts")]
    sqrt: SqrtKind,
    /// Seed for Cipolla's search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SqrtArgs {
    fn strategy(&self) -> SqrtStrategy {
        match self.sqrt {
            SqrtKind::Ts => SqrtStrategy::TonelliShanks,
            SqrtKind::Cipolla => SqrtStrategy::Cipolla { seed: self.seed },
        }
    }
}

fn parse_display<T>(s: &str) -> Result<T, String>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| e.to_string())
}

fn parse_limit(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if let Some((base, exp)) = s.split_once('^') {
        let base: u64 = base.trim().parse().map_err(|_| format!("bad base in {s:?}"))?;
        let exp: u32 = exp.trim().parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        base.checked_pow(exp).ok_or_else(|| format!("{s} overflows 64 bits"))
    } else {
        s.parse().map_err(|_| format!("expected an integer or b^k, got {s:?}"))
    }
}

/// Validation problems exit with 2, everything else with 3.
enum Failure {
    Invalid(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn invalid(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Invalid(e.into())
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Trace { curve, p, sqrt } => {
            let curve = curve.curve()?;
            if p == 2 || !primal_check::miller_rabin(p) {
                return Err(invalid(anyhow!("{p} is not an odd prime")));
            }
            if !curve.is_good_prime(p) {
                return Err(invalid(anyhow!("{curve} has bad reduction at {p}")));
            }
            let field = PrimeField::new(p).map_err(invalid)?;
            let t = trace(&curve, &field, sqrt.strategy()).map_err(invalid)?;
            writeln!(out, "{p},{},{:.6}", t.t, t.a1(p))?;
        }
        Command::Scan { curve, limit, filter, bins, threads, chunk, out: stem, sqrt } => {
            let curve = curve.curve()?;
            if bins == 0 {
                return Err(invalid(anyhow!("--bins must be positive")));
            }
            let split = split_filter_for(filter, &curve);
            let opts = ScanOptions { bins, threads, chunk, sqrt: sqrt.strategy() };
            let start = Instant::now();
            let report = scan(&curve, limit, &split, &opts).map_err(|e| match e {
                frobst_core::ScanError::Trace { .. } | frobst_core::ScanError::ThreadPool(_) => runtime(e),
                _ => invalid(e),
            })?;
            let elapsed = start.elapsed();
            let stem = stem.unwrap_or_else(|| default_stem(&curve, filter));
            let (moments, hist) = emit_csv(&report, &stem).map_err(runtime)?;
            let show = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "NA".into());
            writeln!(
                out,
                "count={} M2={} M4={} zero_fraction={} elapsed={:.3}s",
                report.count(),
                show(report.moment(2)),
                show(report.moment(4)),
                show(report.zero_fraction()),
                elapsed.as_secs_f64()
            )?;
            eprintln!("wrote {} and {}", moments.display(), hist.display());
        }
        Command::StMoments { group, coeff, nmax, quadrature, out: path } => {
            let seq = haar_moments(&builtin_group(group), coeff, nmax, quadrature).map_err(invalid)?;
            match path {
                Some(path) => seq.write_csv(&path).map_err(runtime)?,
                None => {
                    writeln!(out, "n,Mn")?;
                    for n in 1..=nmax {
                        writeln!(out, "{n},{}", format_moment(seq.get(n)))?;
                    }
                }
            }
        }
        Command::Components { group } => {
            let profile = component_group_profile(&builtin_group(group));
            let orders: Vec<String> = profile.element_orders.iter().map(|(o, k)| format!("{o}:{k}")).collect();
            writeln!(out, "group,components,abelian,element_orders")?;
            writeln!(
                out,
                "{group},{},{},{}",
                profile.order,
                if profile.abelian { "yes" } else { "no" },
                orders.join(" ")
            )?;
        }
        Command::Endotype { subgroup, out: path } => {
            let words = parse_words(&subgroup).map_err(invalid)?;
            let (alg, order) = EndoContext::new().fixed_subalgebra(&words).map_err(invalid)?;
            let label = format!("<{}>", subgroup.trim().trim_start_matches(['<', '⟨']).trim_end_matches(['>', '⟩']));
            let row = LatticeRow { label, order, profile: alg.profile() };
            emit_rows(&[row], path, &mut out)?;
        }
        Command::Lattice { out: path } => emit_rows(&lattice_report(), path, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn emit_rows(rows: &[LatticeRow], path: Option<PathBuf>, out: &mut impl Write) -> Result<(), Failure> {
    match path {
        Some(path) => {
            let at_path = |e: &dyn std::fmt::Display| runtime(anyhow!("{}: {e}", path.display()));
            let file = std::fs::File::create(&path).map_err(|e| at_path(&e))?;
            write_lattice(rows, file).map_err(|e| at_path(&e))
        }
        None => write_lattice(rows, out).map_err(runtime),
    }
}

fn default_stem(curve: &CurveFamily, filter: SplitField) -> PathBuf {
    let c = curve.c.to_string().replace('/', "over").replace('-', "m");
    PathBuf::from(format!("{}_c{c}_{filter}", curve.family))
}
