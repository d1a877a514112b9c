//! `wars`: batch analyses of weighted reduction systems.
//!
//! Exit codes: `eval` 0 (done) / 2 (visit cap hit); `bound` 0 (certified) /
//! 3 (sampled) / 4 (unknown) / 5 (unbounded); `loop` 0 (certified loop) /
//! 3 (candidates only) / 4 (none); `oracle` 0 (agree) / 2 (tree count cap)
//! / 3 (disagree). Any usage, spec or I/O error exits with 1.

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wars::boundedness::{
    check_nf_top, check_sufficient_extremal, check_sufficient_selective, verify_embedding, BoundednessReport,
    Embedding, InstanceSource, Verdict,
};
use wars::evaluator::{evaluate_to_fixpoint, oracle_equivalence, EvalError, EvalReport, OracleLevel};
use wars::system::{builtin_catalog, load_system};
use wars::unboundedness::{analyze_loops, conclude_unbounded, LoopReport, LoopStatus, UnboundedReport};
use wars::{Budgets, ObjectId, SystemHandle};

#[derive(Parser)]
#[command(
    name = "wars",
    version,
    about = "Weights, boundedness and loops of weighted reduction systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower bounds on object weights by value iteration.
    Eval(Common),
    /// Boundedness checks.
    Bound {
        #[command(flatten)]
        common: Common,
        /// `selective[:C]`, `extremal` or `embed:<walk3n|trs_add|zwalk_case|path.json>`.
        #[arg(long)]
        mode: String,
        /// Universal normal-form bound for `selective`.
        #[arg(long)]
        bound: Option<String>,
        /// Objects visited for infinite systems.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Search for increasing loops.
    Loop {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 16)]
        max_witnesses: usize,
    },
    /// Compare value iteration with the join over enumerated trees.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Largest weight set built per object and depth.
        #[arg(long, default_value_t = 100_000)]
        count_cap: usize,
    },
    /// List the built-in systems.
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// `builtin:<name>(k=v,...)` or `file:<path>`.
    #[arg(long)]
    system: String,
    /// Start object; repeatable. Defaults to the system's canonical start.
    #[arg(long)]
    start: Vec<String>,
    #[arg(long, default_value_t = 16)]
    depth: usize,
    #[arg(long, default_value_t = 16)]
    rule_budget: usize,
    #[arg(long, default_value_t = 16)]
    branch_trunc: usize,
    #[arg(long, env = "WARS_VISIT_CAP", default_value_t = 100_000)]
    visit_cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for sampled checks.
    #[arg(long)]
    seed: Option<u64>,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

impl Common {
    fn budgets(&self) -> Budgets {
        Budgets::new(self.rule_budget, self.branch_trunc, self.visit_cap)
    }

    fn load(&self) -> Result<(SystemHandle, Vec<ObjectId>), Failure> {
        let sys = load_system(&self.system)?;
        let starts = if self.start.is_empty() {
            vec![sys
                .default_start()
                .ok_or_else(|| Failure(format!("{} has no default start object; pass --start", sys.name())))?]
        } else {
            self.start
                .iter()
                .map(|s| sys.parse_object(s))
                .collect::<Result<_, _>>()?
        };
        Ok((sys, starts))
    }
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> Result<(), Failure> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value)?),
        Format::Text => print!("{}", text()),
    }
    Ok(())
}

#[derive(Serialize)]
struct EvalEntry {
    #[serde(flatten)]
    report: EvalReport,
    visit_cap_hit: bool,
}

#[derive(Serialize)]
struct EvalOutput {
    system: String,
    semiring: String,
    results: Vec<EvalEntry>,
}

fn cmd_eval(c: &Common) -> Result<u8, Failure> {
    let (sys, starts) = c.load()?;
    let desc = sys.semiring();
    let mut results = Vec::new();
    for a in &starts {
        let entry = match evaluate_to_fixpoint(&*sys, a, c.depth, &c.budgets()) {
            Ok(b) => EvalEntry {
                report: b.report(desc, &a.to_string()),
                visit_cap_hit: false,
            },
            Err(EvalError::VisitCap { partial, .. }) => EvalEntry {
                report: partial.bound.report(desc, &a.to_string()),
                visit_cap_hit: true,
            },
            Err(e) => return Err(e.into()),
        };
        results.push(entry);
    }
    let partial = results.iter().any(|r| r.visit_cap_hit);
    let out = EvalOutput {
        system: sys.name(),
        semiring: desc.kind().name().to_string(),
        results,
    };
    emit(c.format, &out, || {
        out.results
            .iter()
            .map(|r| {
                let cap = if r.visit_cap_hit { " [visit cap hit]" } else { "" };
                format!("{}{cap}\n", r.report.render_text())
            })
            .collect()
    })?;
    Ok(if partial { 2 } else { 0 })
}

fn cmd_bound(c: &Common, mode: &str, bound: Option<&str>, samples: usize) -> Result<u8, Failure> {
    let sys = load_system(&c.system)?;
    let desc = sys.semiring();
    let source = if sys.all_objects().is_some() {
        InstanceSource::Exhaustive
    } else if let Some(seed) = c.seed {
        InstanceSource::Random { seed, count: samples }
    } else {
        InstanceSource::Prefix(samples)
    };
    let (kind, arg) = match mode.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (mode, None),
    };
    let report: BoundednessReport = match kind {
        "selective" => {
            let text = arg
                .or(bound)
                .ok_or_else(|| Failure("selective mode needs a bound: selective:<C> or --bound".into()))?;
            check_sufficient_selective(&*sys, &desc.parse_value(text)?, &source)?
        }
        "extremal" => check_sufficient_extremal(&*sys, &source)?,
        "embed" => {
            let name = arg.ok_or_else(|| Failure("embed mode needs a name or a path: embed:<name|path>".into()))?;
            let e = match Embedding::builtin(name) {
                Ok(e) => e,
                Err(_) if Path::new(name).exists() => Embedding::from_json(&*sys, &std::fs::read_to_string(name)?)?,
                Err(_) => return Err(Failure(format!("no built-in embedding and no file named `{name}`"))),
            };
            match check_nf_top(&*sys, &source)? {
                Some(r) => r,
                None => verify_embedding(&*sys, &e, &source)?,
            }
        }
        other => {
            return Err(Failure(format!(
                "unknown mode `{other}` (selective[:C], extremal, embed:<name|path>)"
            )))
        }
    };
    emit(c.format, &report, || report.render_text())?;
    Ok(match report.verdict {
        Verdict::BoundedCertified => 0,
        Verdict::BoundedSampled { .. } => 3,
        Verdict::Unknown => 4,
        Verdict::Unbounded { .. } => 5,
    })
}

#[derive(Serialize)]
struct LoopOutput {
    system: String,
    loops: Vec<LoopReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unbounded: Option<UnboundedReport>,
}

fn cmd_loop(c: &Common, max_witnesses: usize) -> Result<u8, Failure> {
    let (sys, starts) = c.load()?;
    let desc = sys.semiring();
    let budgets = c.budgets();
    let witnesses = analyze_loops(&*sys, &starts, c.depth, &budgets, max_witnesses)?;
    let unbounded = match witnesses.iter().find(|w| w.status() == LoopStatus::Certified) {
        Some(w) => Some(conclude_unbounded(&*sys, w, &budgets)?),
        None => None,
    };
    let out = LoopOutput {
        system: sys.name(),
        loops: witnesses.iter().map(|w| w.report(desc)).collect(),
        unbounded,
    };
    emit(c.format, &out, || {
        let mut text: String = out.loops.iter().map(|l| format!("{}\n", l.render_text())).collect();
        match &out.unbounded {
            Some(u) => text.push_str(&format!(
                "weight of {} is {} (W at multiples of the loop depth: {}; consistent: {})\n",
                u.object,
                u.weight,
                u.series.join(", "),
                u.evaluator_consistent
            )),
            None if out.loops.is_empty() => text.push_str("no loop found\n"),
            None => {}
        }
        text
    })?;
    Ok(if out.unbounded.is_some() {
        0
    } else if out.loops.is_empty() {
        4
    } else {
        3
    })
}

#[derive(Serialize)]
struct OracleEntry {
    start: String,
    levels: Vec<OracleLevel>,
}

fn cmd_oracle(c: &Common, count_cap: usize) -> Result<u8, Failure> {
    let sys = load_system(&c.system)?;
    let starts = if c.start.is_empty() {
        sys.all_objects()
            .or_else(|| sys.default_start().map(|a| vec![a]))
            .ok_or_else(|| Failure("pass --start".into()))?
    } else {
        c.start.iter().map(|s| sys.parse_object(s)).collect::<Result<_, _>>()?
    };
    let mut entries = Vec::new();
    for a in &starts {
        match oracle_equivalence(&*sys, a, c.depth, &c.budgets(), count_cap) {
            Ok(levels) => entries.push(OracleEntry {
                start: a.to_string(),
                levels,
            }),
            Err(EvalError::CountCap { cap }) => {
                eprintln!("error: more than {cap} weights at {a}; lower --depth or raise --count-cap");
                return Ok(2);
            }
            Err(e) => return Err(e.into()),
        }
    }
    let agree = entries.iter().all(|e| e.levels.iter().all(|l| l.agree));
    emit(c.format, &entries, || {
        let mut text = String::new();
        for e in &entries {
            for l in &e.levels {
                text.push_str(&format!(
                    "{} depth {}: iterated {} oracle {} ({} weights) {}\n",
                    e.start,
                    l.depth,
                    l.iterated,
                    l.oracle,
                    l.distinct_weights,
                    if l.agree { "agree" } else { "DISAGREE" }
                ));
            }
        }
        text
    })?;
    Ok(if agree { 0 } else { 3 })
}

fn cmd_list(format: Format) -> Result<u8, Failure> {
    let catalog = builtin_catalog();
    emit(format, &catalog, || {
        catalog
            .iter()
            .map(|b| {
                let params = if b.params.is_empty() {
                    String::new()
                } else {
                    format!("({})", b.params)
                };
                let aliases = if b.aliases.is_empty() {
                    String::new()
                } else {
                    format!(" [{}]", b.aliases.join(", "))
                };
                format!("{}{params}{aliases}: {}\n", b.name, b.summary)
            })
            .collect()
    })?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(c) => cmd_eval(c),
        Command::Bound {
            common,
            mode,
            bound,
            samples,
        } => cmd_bound(common, mode, bound.as_deref(), *samples),
        Command::Loop { common, max_witnesses } => cmd_loop(common, *max_witnesses),
        Command::Oracle { common, count_cap } => cmd_oracle(common, *count_cap),
        Command::List { format } => cmd_list(*format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
