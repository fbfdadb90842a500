//! `pbcg`: evaluate PB rules, margins, equilibria and cost dynamics on
//! Pabulib files or the built-in gallery.
//!
//! Exit codes: 0 success, 1 domain failure (no construction applies, a
//! profile is not an equilibrium), 2 usage or input error.

mod input;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pbcg_core::dynamics::{run_dynamics, DynamicsConfig};
use pbcg_core::money::{self, Money};
use pbcg_core::response::{default_tolerance, margins, verify_ne, MarginKind, NeReport};
use pbcg_core::rules::evaluate;
use pbcg_core::{ApprovalProfile, RuleId, TieBreakOrder};
use pbcg_pabulib::export::{write_dynamics_csv, write_margins_csv, write_ne_csv};
use pbcg_pabulib::json::*;

use input::Source;

pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

#[derive(Parser)]
#[command(name = "pbcg", version, about = "Participatory-budgeting cost games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Pabulib .pb file
    #[arg(long, value_name = "PATH", required_unless_present = "gallery", conflicts_with = "gallery")]
    file: Option<PathBuf>,
    /// Gallery game: G1..G6, or W<γ> for the small-cost witness
    #[arg(long, value_name = "NAME")]
    gallery: Option<String>,
    /// basicav, avcost, phragmen, mescost, mesapr, mescost-ph, mesapr-ph
    #[arg(long)]
    rule: RuleId,
    /// default, ad, or a comma-separated list of project ids
    #[arg(long, default_value = "default", value_name = "SPEC")]
    order: String,
    /// zero, frac:φ, or file:PATH (JSON map id → amount)
    #[arg(long, value_name = "POLICY")]
    delivery: Option<String>,
    /// Print a schema-v1 JSON document on stdout
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a rule and print the outcome
    Evaluate {
        #[command(flatten)]
        input: Input,
        /// Costs to evaluate instead of the loaded ones (JSON)
        #[arg(long, value_name = "PATH")]
        profile: Option<PathBuf>,
    },
    /// Winning and losing margins of every project
    Margins {
        #[command(flatten)]
        input: Input,
        /// Bisection bracket width (default B·10⁻⁹)
        #[arg(long, value_name = "DEC")]
        tolerance: Option<String>,
        #[arg(long, value_name = "PATH")]
        profile: Option<PathBuf>,
        /// Write the margins JSON here
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Write the CSV mirror here
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Construct an equilibrium where one is known to exist, and verify it
    Equilibrium {
        #[command(flatten)]
        input: Input,
        /// Bisection bracket width used by the verification
        #[arg(long, value_name = "DEC")]
        tolerance: Option<String>,
        /// Write the equilibrium JSON here
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Write the CSV mirror here
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Randomized cost dynamics from the loaded costs
    Dynamics {
        #[command(flatten)]
        input: Input,
        /// Number of moves
        #[arg(long)]
        iterations: u64,
        /// PRNG seed
        #[arg(long)]
        seed: u64,
        /// Snapshot period in iterations (0 disables snapshots)
        #[arg(long, default_value_t = 100)]
        record_every: u64,
        /// Largest move as a fraction of the current cost
        #[arg(long, default_value = "1/10", value_name = "FRACTION")]
        step_fraction: String,
        /// Start from these costs instead of the loaded ones (JSON)
        #[arg(long, value_name = "PATH")]
        profile: Option<PathBuf>,
        /// Write the trace JSON here
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Write the per-project CSV here
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Check a profile for profitable unilateral deviations
    Verify {
        #[command(flatten)]
        input: Input,
        /// Costs to check (JSON)
        #[arg(long, value_name = "PATH")]
        profile: PathBuf,
        /// Bisection bracket width; 0 uses B·10⁻⁹ plus exact candidate probes
        #[arg(long, value_name = "DEC")]
        tolerance: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = match &cli.command {
        Command::Evaluate { input, .. }
        | Command::Margins { input, .. }
        | Command::Equilibrium { input, .. }
        | Command::Dynamics { input, .. }
        | Command::Verify { input, .. } => input.json,
    };
    match threads().and_then(|()| run(cli.command)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            if json {
                let doc = serde_json::json!({ "schema": SCHEMA, "kind": "error", "code": f.code, "message": f.message });
                println!("{doc:#}");
            }
            ExitCode::from(f.code)
        }
    }
}

/// `PBCG_THREADS` caps the worker pool.
fn threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("PBCG_THREADS") else { return Ok(()) };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("PBCG_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::usage(e.to_string()))
}

fn load(input: &Input) -> Result<(Source, TieBreakOrder), Failure> {
    let source = input::load(input.file.as_ref(), input.gallery.as_deref(), input.delivery.as_deref())?;
    for w in &source.warnings {
        eprintln!("warning: {w}");
    }
    let order = input::order(&source, &input.order)?;
    Ok((source, order))
}

fn tolerance(text: Option<&String>, source: &Source) -> Result<Money, Failure> {
    text.map(|t| input::amount("--tolerance", t)).transpose().map(|t| t.unwrap_or_else(|| default_tolerance(&source.game)))
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn emit(json: bool, doc_text: &str, human: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let _ = if json { out.write_all(doc_text.as_bytes()) } else { human(&mut out) };
}

fn t(m: &Money) -> String {
    money::to_text(m)
}

fn names(a: &ApprovalProfile, ps: &[usize]) -> String {
    ps.iter().map(|&p| a.project_id(p)).collect::<Vec<_>>().join(", ")
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Evaluate { input, profile } => {
            let (source, order) = load(&input)?;
            let profile = input::profile(&source, profile.as_ref())?;
            let game = &source.game;
            let outcome = evaluate(game.election(profile.costs(), &order), input.rule);
            let doc = outcome_doc(&game.approvals, &game.budget, profile.costs(), &order, input.rule, &outcome);
            emit(input.json, &write_outcome_json(&doc), |out| {
                let a = &game.approvals;
                writeln!(out, "rule: {}", input.rule)?;
                writeln!(out, "order: {}", names(a, order.ranking()).replace(", ", " > "))?;
                writeln!(out, "funded: [{}]", names(a, &outcome.funded))?;
                writeln!(out, "spent: {} of {}", t(&outcome.spent(profile.costs())), t(&game.budget))?;
                if !outcome.removed.is_empty() {
                    writeln!(out, "removed: [{}]", names(a, &outcome.removed))?;
                }
                if !doc.balances.is_empty() {
                    writeln!(out, "balances:")?;
                    for b in &doc.balances {
                        writeln!(out, "  {} {}", b.id, t(&b.balance.0))?;
                    }
                }
                Ok(())
            });
            Ok(0)
        }
        Command::Margins { input, tolerance: tol, profile, out, csv } => {
            let (source, order) = load(&input)?;
            let profile = input::profile(&source, profile.as_ref())?;
            let tol = tolerance(tol.as_ref(), &source)?;
            if money::sign(&tol) == 0 {
                return Err(Failure::usage("--tolerance must be positive for margins"));
            }
            let game = &source.game;
            let ms = margins(game, input.rule, &profile, &order, &tol);
            let doc = margins_doc(game, input.rule, &profile, &tol, &ms);
            for w in &doc.warnings {
                eprintln!("warning: {w}");
            }
            let text = write_margins_json(&doc);
            if let Some(path) = &out {
                write_file(path, &text)?;
            }
            if let Some(path) = &csv {
                write_file(path, &write_margins_csv(&doc))?;
            }
            emit(input.json, &text, |out| {
                writeln!(out, "{:<12} {:>6} {:>16} {:>8} {:>16} {:>16}", "project", "score", "cost", "kind", "margin", "best response")?;
                for m in &ms {
                    let kind = if m.kind == MarginKind::Winning { "winning" } else { "losing" };
                    writeln!(
                        out,
                        "{:<12} {:>6} {:>16} {:>8} {:>16} {:>16}",
                        game.approvals.project_id(m.project),
                        game.approvals.score(m.project),
                        money::to_decimal(profile.cost(m.project), 6).0,
                        kind,
                        money::to_decimal(&m.value, 6).0,
                        money::to_decimal(&m.response.lower, 6).0,
                    )?;
                }
                Ok(())
            });
            Ok(0)
        }
        Command::Equilibrium { input, tolerance: tol, out, csv } => {
            let (source, order) = load(&input)?;
            let game = &source.game;
            let (name, construction) = table::dispatch(game, input.rule, &order).map_err(Failure::domain)?;
            let tol = tolerance(tol.as_ref(), &source)?;
            let report = verify_ne(game, input.rule, &construction.profile, &construction.order, &tol);
            let outcome = evaluate(game.election(construction.profile.costs(), &construction.order), input.rule);
            let doc = ne_doc(
                game,
                input.rule,
                &construction.profile,
                &construction.order,
                &outcome,
                Some((name, &construction)),
                &report,
                &tol,
            );
            write_ne_outputs(&doc, out.as_ref(), csv.as_ref())?;
            emit(input.json, &write_ne_json(&doc), |out| {
                writeln!(out, "construction: {name}")?;
                let scope = match doc.guarantee.as_deref() {
                    Some("all_orders") => "equilibrium under every tie-break order",
                    _ => "equilibrium under this A/D tie-break order",
                };
                writeln!(out, "guarantee: {scope}")?;
                print_ne(out, &doc, &report)
            });
            Ok(verdict(&report))
        }
        Command::Dynamics { input, iterations, seed, record_every, step_fraction, profile, out, csv } => {
            let (source, order) = load(&input)?;
            let start = input::profile(&source, profile.as_ref())?;
            let step = input::amount("--step-fraction", &step_fraction)?;
            if money::sign(&step) == 0 || step > money::int(1) {
                return Err(Failure::usage("--step-fraction must lie in (0, 1]"));
            }
            let config = DynamicsConfig { iterations, seed, step_fraction: step, record_every };
            let game = &source.game;
            let trace = run_dynamics(game, input.rule, &start, &config, &order);
            let doc = dynamics_doc(game, &trace);
            let text = write_dynamics_json(&doc);
            write_file(&out, &text)?;
            if let Some(path) = &csv {
                write_file(path, &write_dynamics_csv(&doc))?;
            }
            emit(input.json, &text, |w| {
                writeln!(w, "rule: {} generator: {} seed: {seed} iterations: {iterations}", input.rule, trace.generator)?;
                writeln!(w, "{:<12} {:>16} {:>16} {:>8}", "project", "initial", "final", "funded")?;
                for p in &doc.projects {
                    writeln!(
                        w,
                        "{:<12} {:>16} {:>16} {:>8}",
                        p.id,
                        money::to_decimal(&p.initial_cost.0, 6).0,
                        money::to_decimal(&p.final_cost.0, 6).0,
                        p.finally_funded
                    )?;
                }
                writeln!(w, "trace written to {}", out.display())
            });
            Ok(0)
        }
        Command::Verify { input, profile, tolerance: tol } => {
            let (source, order) = load(&input)?;
            let profile = input::profile(&source, Some(&profile))?;
            let tol = tolerance(tol.as_ref(), &source)?;
            let game = &source.game;
            let report = verify_ne(game, input.rule, &profile, &order, &tol);
            let outcome = evaluate(game.election(profile.costs(), &order), input.rule);
            let doc = ne_doc(game, input.rule, &profile, &order, &outcome, None, &report, &tol);
            emit(input.json, &write_ne_json(&doc), |out| print_ne(out, &doc, &report));
            Ok(verdict(&report))
        }
    }
}

fn write_ne_outputs(doc: &NeDoc, out: Option<&PathBuf>, csv: Option<&PathBuf>) -> Result<(), Failure> {
    if let Some(path) = out {
        write_file(path, &write_ne_json(doc))?;
    }
    if let Some(path) = csv {
        write_file(path, &write_ne_csv(doc))?;
    }
    Ok(())
}

fn verdict(report: &NeReport) -> u8 {
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if report.verified {
        0
    } else {
        eprintln!("not an equilibrium: {} profitable deviation(s)", report.violations.len());
        1
    }
}

fn print_ne(out: &mut dyn Write, doc: &NeDoc, report: &NeReport) -> std::io::Result<()> {
    writeln!(out, "rule: {}", doc.rule)?;
    writeln!(out, "order: {}", doc.order.join(" > "))?;
    writeln!(out, "{:<12} {:>6} {:>16} {:>16} {:>8}", "project", "score", "cost", "delivery", "funded")?;
    for p in &doc.projects {
        writeln!(out, "{:<12} {:>6} {:>16} {:>16} {:>8}", p.id, p.score, t(&p.cost.0), t(&p.delivery.0), p.funded)?;
    }
    writeln!(out, "funded: [{}]", doc.funded.join(", "))?;
    if report.verified {
        writeln!(out, "verified: no profitable deviation")?;
    } else {
        writeln!(out, "verified: false")?;
        for v in &doc.violations {
            writeln!(out, "  {} gains {} by reporting {}", v.project, t(&v.gain.0), t(&v.cost.0))?;
        }
    }
    Ok(())
}
