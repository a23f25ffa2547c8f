use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use sumset_core::bounds::multiplicity_bounds;
use sumset_core::classifier::dual_pairs;
use sumset_core::error::Error;
use sumset_core::group::FiniteAbelianGroup;
use sumset_core::harness::{
    classify_pair, enumerate, verify_suite, write_csv, write_jsonl, Config, Dedup, EnumerationTask, PairRecord,
    Status, Suite,
};
use sumset_core::parse::{format_set, parse_group, parse_set};

#[derive(Parser)]
#[command(name = "sumset", version, about = "Structure of small sumsets in finite abelian groups")]
struct Cli {
    /// TOML file with budgets and parallelism.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one pair and print its certificate.
    Classify {
        group: String,
        a: String,
        b: String,
        /// Print the record as a single JSON line.
        #[arg(long)]
        json: bool,
    },
    /// Classify every pair of a group matching the filters.
    Enumerate {
        group: String,
        /// Keep pairs with |A+B| - |A| - |B| = r.
        #[arg(long, allow_hyphen_values = true)]
        r: Option<i64>,
        #[arg(long)]
        min_a: Option<usize>,
        #[arg(long)]
        max_a: Option<usize>,
        #[arg(long)]
        min_b: Option<usize>,
        #[arg(long)]
        max_b: Option<usize>,
        /// none, translations or automorphisms.
        #[arg(long, default_value = "translations")]
        dedup: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: Format,
        /// Record per-pair wall time.
        #[arg(long)]
        timing: bool,
    },
    /// Check the statement suites on each group.
    Verify {
        #[arg(required = true)]
        groups: Vec<String>,
        /// all, kneser, kst, beyond, lemmas or bounds.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        json: bool,
    },
    /// Lower bounds for |A+B| and |T| when ν_x(A,-B) <= k off T.
    Bounds {
        group: String,
        a: String,
        b: String,
        t: String,
        k: usize,
    },
    /// The pairs (-A, C) and (-B, C) with C the complement of A+B.
    Dual { group: String, a: String, b: String },
}

enum Failure {
    Verification(String),
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Io(_) => Failure::Io(e.to_string()),
            Error::Internal(_) => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Verification(m) => (1, m),
                Failure::Usage(m) => (2, m),
                Failure::Io(m) => (3, m),
            };
            eprintln!("sumset: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Classify { group, a, b, json } => classify(&mut out, &group, &a, &b, json),
        Command::Enumerate {
            group,
            r,
            min_a,
            max_a,
            min_b,
            max_b,
            dedup,
            out: path,
            format,
            timing,
        } => {
            let g = parse_group(&group)?;
            let mut task = EnumerationTask::new(g).with_dedup(dedup.parse::<Dedup>()?);
            task.r = r;
            task.min_a = min_a.unwrap_or(task.min_a);
            task.max_a = max_a.unwrap_or(task.max_a);
            task.min_b = min_b.unwrap_or(task.min_b);
            task.max_b = max_b.unwrap_or(task.max_b);
            task.parallelism = config.parallelism;
            task.timing = timing;
            let recs = enumerate(&task, &config)?;
            match path {
                Some(p) => {
                    let file = File::create(&p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
                    let mut w = BufWriter::new(file);
                    emit(&recs, format, &mut w)?;
                    w.flush()?;
                }
                None => emit(&recs, format, &mut out)?,
            }
            let bad = recs
                .iter()
                .filter(|r| matches!(r.verification, Status::Fail | Status::Error))
                .count();
            if bad > 0 {
                return Err(Failure::Verification(format!("{bad} of {} records failed verification", recs.len())));
            }
            Ok(())
        }
        Command::Verify { groups, suite, json } => {
            let groups = groups.iter().map(|s| parse_group(s)).collect::<Result<Vec<_>, _>>()?;
            let report = verify_suite(&groups, suite.parse::<Suite>()?, &config)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
            } else {
                write!(out, "{report}")?;
            }
            if !report.passed() {
                return Err(Failure::Verification("some statements failed".into()));
            }
            Ok(())
        }
        Command::Bounds { group, a, b, t, k } => {
            let g = parse_group(&group)?;
            let p = multiplicity_bounds(&g, &parse_set(&g, &a)?, &parse_set(&g, &b)?, &parse_set(&g, &t)?, k)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&p).expect("bounds serialize"))?;
            Ok(())
        }
        Command::Dual { group, a, b } => {
            let g = parse_group(&group)?;
            let (a, b) = (parse_set(&g, &a)?, parse_set(&g, &b)?);
            let d = dual_pairs(&g, &a, &b)?;
            let v = json!({
                "C": format_set(&g, &d.complement),
                "-A": format_set(&g, &d.neg_a),
                "-B": format_set(&g, &d.neg_b),
                "r": d.excess,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json value serializes"))?;
            Ok(())
        }
    }
}

fn emit(recs: &[PairRecord], format: Format, w: &mut impl Write) -> Outcome {
    match format {
        Format::Jsonl => write_jsonl(recs, w)?,
        Format::Csv => write_csv(recs, w)?,
    }
    Ok(())
}

fn classify(out: &mut impl Write, group: &str, a: &str, b: &str, json: bool) -> Outcome {
    let g: FiniteAbelianGroup = parse_group(group)?;
    let (a, b) = (parse_set(&g, a)?, parse_set(&g, b)?);
    let rec = classify_pair(&g, &a, &b, false);
    if json {
        writeln!(out, "{}", serde_json::to_string(&rec).expect("record serializes"))?;
    } else {
        writeln!(out, "group:        {g}")?;
        writeln!(out, "A:            {}", format_set(&g, &a))?;
        writeln!(out, "B:            {}", format_set(&g, &b))?;
        writeln!(out, "|A+B|:        {} (r = {})", rec.sumset_size, rec.r)?;
        writeln!(out, "type:         {}", rec.matched_types().join(", "))?;
        writeln!(out, "verification: {}", status(rec.verification))?;
        for f in &rec.failures {
            writeln!(out, "  - {f}")?;
        }
        writeln!(out, "certificate:")?;
        writeln!(out, "{}", serde_json::to_string_pretty(&rec.outcome).expect("outcome serializes"))?;
    }
    if matches!(rec.verification, Status::Fail | Status::Error) {
        return Err(Failure::Verification("certificate did not verify".into()));
    }
    Ok(())
}

fn status(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::None => "none (r >= 1 is not classified)",
        Status::Error => "error",
    }
}
