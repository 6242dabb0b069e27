//! `resgen` — build, inspect, verify and export residue generator circuits
//! for the conjugate moduli `2^n - 1` and `2^n + 1`.
//!
//! Exit codes: 0 on success or a passing verification, 1 on a failing
//! verification or runtime error, 2 on a usage error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use resgen_core::csa::render_shorthand;
use resgen_core::export::{export_hdl, export_json, import_json};
use resgen_core::generators::{self, Generated, GeneratorSpec};
use resgen_core::verify::{self, SweepPlan, DEFAULT_EXHAUSTIVE_BUDGET};
use resgen_core::{Error, Family};

/// Environment variable overriding the exhaustive sweep budget.
const BUDGET_ENV: &str = "RESGEN_EXHAUSTIVE_BUDGET";

#[derive(Parser)]
#[command(name = "resgen", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    ClassicMersenne,
    ClassicFermat,
    UniversalD1,
    BiResidue,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::ClassicMersenne => Family::ClassicMersenne,
            FamilyArg::ClassicFermat => Family::ClassicFermat,
            FamilyArg::UniversalD1 => Family::UniversalD1,
            FamilyArg::BiResidue => Family::BiResidue,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Hdl,
}

#[derive(Args)]
struct SpecArgs {
    /// Generator family
    #[arg(long)]
    family: FamilyArg,
    /// Input width in bits
    #[arg(long)]
    p: usize,
    /// Modulus parameter (modulus 2^n-1, 2^n+1 or both)
    #[arg(long)]
    n: u32,
}

impl SpecArgs {
    fn build(&self) -> Result<Generated, Error> {
        let spec = GeneratorSpec::new(self.family.into(), self.p, self.n)?;
        generators::build(&spec)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a generator and write its netlist (build report goes to stderr)
    Gen {
        #[command(flatten)]
        spec: SpecArgs,
        /// Netlist serialization format
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Output path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the shorthand table(s) of a generator's CSA tree
    Table {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Print the build report: parameters, corrections, gate counts, tables
    Report {
        #[command(flatten)]
        spec: SpecArgs,
        /// Emit the report as JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Sweep a generator against the arithmetic oracle
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        /// Sample count; exhaustive sweep when omitted
        #[arg(long)]
        samples: Option<u64>,
        /// Seed for random sweeps
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Evaluation budget for exhaustive sweeps
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Compare two standalone generators against the shared bi-residue build
    Compare {
        /// Input width in bits
        #[arg(long)]
        p: usize,
        /// Modulus parameter
        #[arg(long)]
        n: u32,
        /// Emit the comparison as JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Re-serialize a saved JSON netlist (e.g. to structural HDL)
    Export {
        /// Path to a netlist in JSON form
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Hdl)]
        format: Format,
        /// Output path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParams(_) | Error::BudgetExceeded { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => write_stdout(text)?,
    }
    Ok(())
}

/// Writes to stdout, exiting quietly when the reading end has gone away
/// (e.g. `resgen report ... | head`).
fn write_stdout(text: &str) -> Result<(), Error> {
    let mut stdout = std::io::stdout();
    match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        other => Ok(other?),
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Gen { spec, format, out } => {
            let generated = spec.build()?;
            let text = match format {
                Format::Json => export_json(&generated.netlist),
                Format::Hdl => export_hdl(&generated.netlist),
            };
            emit(&out, &text)?;
            let report = serde_json::to_string(&generated.report)
                .map_err(|e| Error::Serialization(e.to_string()))?;
            eprintln!("{report}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Table { spec } => {
            let generated = spec.build()?;
            let mut text = String::new();
            for labeled in &generated.report.tables {
                text.push_str(&format!(
                    "{} ({}, p={}, n={}):\n",
                    labeled.label, generated.report.family, spec.p, spec.n
                ));
                push_table(&mut text, labeled);
            }
            write_stdout(&text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { spec, json } => {
            let generated = spec.build()?;
            let text = if json {
                let mut t = serde_json::to_string_pretty(&generated.report)
                    .map_err(|e| Error::Serialization(e.to_string()))?;
                t.push('\n');
                t
            } else {
                report_text(&generated)
            };
            write_stdout(&text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { spec, samples, seed, budget } => {
            let family: Family = spec.family.into();
            let plan = match samples {
                Some(samples) => SweepPlan::random(family, spec.p, spec.n, samples, seed),
                None => SweepPlan::exhaustive(family, spec.p, spec.n),
            };
            let budget = budget
                .or_else(|| {
                    std::env::var(BUDGET_ENV).ok().and_then(|v| v.parse().ok())
                })
                .unwrap_or(DEFAULT_EXHAUSTIVE_BUDGET);
            let verdict = verify::run_sweep(&plan.with_budget(budget))?;
            let mut text = serde_json::to_string_pretty(&verdict)
                .map_err(|e| Error::Serialization(e.to_string()))?;
            text.push('\n');
            write_stdout(&text)?;
            Ok(if verdict.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Compare { p, n, json } => compare(p, n, json),
        Command::Export { input, format, out } => {
            let text = std::fs::read_to_string(&input)?;
            let nl = import_json(&text)?;
            let serialized = match format {
                Format::Json => export_json(&nl),
                Format::Hdl => export_hdl(&nl),
            };
            emit(&out, &serialized)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn push_table(text: &mut String, labeled: &resgen_core::generators::LabeledTable) {
    text.push_str(&render_shorthand(&labeled.table));
    if labeled.table.is_empty() {
        text.push_str("(empty: inputs already feed the final adders, p <= 4n)\n");
    }
}

fn report_text(generated: &Generated) -> String {
    let r = &generated.report;
    let mut text = String::new();
    text.push_str(&format!("family:          {}\n", r.family));
    text.push_str(&format!("input width p:   {}\n", r.p));
    text.push_str(&format!("parameter n:     {}\n", r.n));
    if let Some(q) = r.q {
        text.push_str(&format!("blocks q:        {q}\n"));
    }
    text.push_str(&format!("padded zeros:    {}\n", r.padded_zero_bits));
    text.push_str(&format!("correction COR:  {}\n", r.cor));
    if let Some(shared) = r.shared_fa_count {
        text.push_str(&format!("shared FAs:      {shared}\n"));
    }
    let c = r.cost;
    text.push_str(&format!(
        "cost:            {} FA, {} HA, {} INV, depth {}\n",
        c.fa_count, c.ha_count, c.not_count, c.depth
    ));
    for labeled in &r.tables {
        text.push_str(&format!("\n{}:\n", labeled.label));
        push_table(&mut text, labeled);
    }
    text
}

fn compare(p: usize, n: u32, json: bool) -> Result<ExitCode, Error> {
    if p < 4 * n as usize {
        return Err(Error::InvalidParams(format!(
            "compare requires p >= 4n (got p={p}, n={n})"
        )));
    }
    let uni = generators::build_universal_d1(p, n)?;
    let mers = generators::build_classic_mersenne(p, n)?;
    let bi = generators::build_bi_residue(p, n)?;
    let (u, m, b) = (uni.report.cost, mers.report.cost, bi.report.cost);
    let saved_fa = (u.fa_count + m.fa_count) as isize - b.fa_count as isize;
    let expected = (p - 4 * n as usize) as isize;

    let text = if json {
        let doc = serde_json::json!({
            "p": p,
            "n": n,
            "standalone": { "universal_d1": u, "classic_mersenne": m },
            "bi_residue": b,
            "saved_fa": saved_fa,
            "expected_saved_fa": expected,
        });
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("static shape"))
    } else {
        format!(
            "p={p}, n={n}\n\
             universal-d1 standalone:  {} FA, {} HA, depth {}\n\
             classic-mersenne alone:   {} FA, {} HA, depth {}\n\
             two standalone circuits:  {} FA, {} HA\n\
             bi-residue (shared):      {} FA, {} HA, depth {}\n\
             saved FAs:                {saved_fa} (p - 4n = {expected})\n",
            u.fa_count, u.ha_count, u.depth,
            m.fa_count, m.ha_count, m.depth,
            u.fa_count + m.fa_count, u.ha_count + m.ha_count,
            b.fa_count, b.ha_count, b.depth,
        )
    };
    write_stdout(&text)?;
    if saved_fa != expected {
        eprintln!("error: sharing delta {saved_fa} differs from p - 4n = {expected}");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
