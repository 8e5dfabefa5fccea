//! Command-line driver: parsing, saturation, proofs, entailment, translation
//! and evaluation of programs.

mod demo;

use std::collections::BTreeSet;
use std::fmt::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use diaglog::effects::{
    evaluate_program, parse_program, Event, Order, Outcome, State, DEFAULT_MODULUS,
};
use diaglog::engine::{saturate, SaturationConfig, SaturationStatus, Specification};
use diaglog::fraction::{check_entailment, run_proof, Verdict};
use diaglog::logic::{builtin, far, near, translate, DiagrammaticLogic, BUILTIN_NAMES};
use diaglog::syntax::{format_spec, parse_document, spec_json, step_json, Document, Env};
use diaglog::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Via {
    Far,
    Near,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DemoKind {
    Mp,
    Seqprod,
}

#[derive(Debug, Parser)]
#[command(name = "diaglog", version, about = "Diagrammatic logics at desk scale")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Bounds {
    /// Maximum number of rule applications.
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    /// Largest term depth of created elements.
    #[arg(long, default_value_t = 4)]
    depth: usize,
}

impl Bounds {
    fn config(&self) -> SaturationConfig {
        SaturationConfig {
            budget: self.budget,
            depth: self.depth,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate sketch, specification and logic files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the theory generated by a specification.
    Saturate {
        file: PathBuf,
        #[arg(long)]
        logic: Option<String>,
        /// The specification to saturate (default: the last one).
        #[arg(long)]
        spec: Option<String>,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Run a proof script on a specification.
    Prove {
        file: PathBuf,
        #[arg(long)]
        logic: Option<String>,
        #[arg(long)]
        spec: Option<String>,
        /// The proof to run (default: the first one).
        #[arg(long)]
        proof: Option<String>,
    },
    /// Decide whether a morphism is an entailment.
    Entail {
        file: PathBuf,
        #[arg(long)]
        logic: Option<String>,
        /// The morphism to check (default: the last one).
        #[arg(long)]
        morphism: Option<String>,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Translate a decorated specification.
    Translate {
        file: PathBuf,
        #[arg(long, value_enum)]
        via: Via,
        #[arg(long)]
        spec: Option<String>,
    },
    /// Evaluate a program with explicit state.
    Eval {
        /// A file holding the program.
        file: Option<PathBuf>,
        /// The program text.
        #[arg(short = 'e', long = "expr", conflicts_with = "file")]
        expr: Option<String>,
        #[arg(long, value_enum, default_value = "left")]
        order: OrderArg,
        /// Initial values, as `x=1,y=2`.
        #[arg(long, default_value = "")]
        state: String,
        #[arg(long, default_value_t = DEFAULT_MODULUS)]
        modulus: u64,
    },
    /// The worked examples end to end.
    Demo {
        #[arg(value_enum)]
        which: DemoKind,
    },
}

/// What an invocation printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Command output with its exit code: 0 on success, 1 on a domain failure.
pub(crate) struct Report {
    pub text: String,
    pub json: Value,
    pub code: i32,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report {
            text,
            json,
            code: 0,
        }
    }
}

pub fn run<I, T>(argv: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                RunOutput {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                RunOutput {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(report) => {
            let stdout = match cli.format {
                Format::Text => report.text,
                Format::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&report.json).expect("json")
                ),
            };
            RunOutput {
                stdout,
                stderr: String::new(),
                code: report.code,
            }
        }
        Err(e) => RunOutput {
            stdout: String::new(),
            stderr: format!("error: {e:#}\n"),
            code: 2,
        },
    }
}

fn dispatch(command: &Command) -> anyhow::Result<Report> {
    match command {
        Command::Check { files } => check(files),
        Command::Saturate {
            file,
            logic,
            spec,
            bounds,
        } => {
            let doc = load(file)?;
            let s = pick_spec(&doc, spec.as_deref())?;
            let logic = pick_logic(&doc, logic.as_deref(), &s)?;
            Ok(saturate_report(&logic, s, bounds.config()))
        }
        Command::Prove {
            file,
            logic,
            spec,
            proof,
        } => {
            let doc = load(file)?;
            let s = pick_spec(&doc, spec.as_deref())?;
            let logic = pick_logic(&doc, logic.as_deref(), &s)?;
            prove(&doc, &logic, s, proof.as_deref())
        }
        Command::Entail {
            file,
            logic,
            morphism,
            bounds,
        } => {
            let doc = load(file)?;
            let (name, tau) = match morphism {
                Some(n) => doc
                    .morphisms
                    .iter()
                    .find(|(m, _)| m == n)
                    .ok_or_else(|| anyhow!("no morphism `{n}`"))?,
                None => doc
                    .morphisms
                    .last()
                    .ok_or_else(|| anyhow!("no morphism in the file"))?,
            };
            let logic = pick_logic(&doc, logic.as_deref(), &tau.source)?;
            let verdict = check_entailment(&logic, tau, bounds.config());
            let word = serde_json::to_value(verdict)?;
            Ok(Report {
                text: format!("{name}: {}\n", word.as_str().expect("string")),
                json: json!({ "morphism": name, "verdict": word }),
                code: i32::from(verdict != Verdict::Confirmed),
            })
        }
        Command::Translate { file, via, spec } => {
            let doc = load(file)?;
            let s = pick_spec(&doc, spec.as_deref())?;
            let f = match via {
                Via::Far => far(),
                Via::Near => near(),
            };
            let t = translate(&f, &s)?;
            Ok(Report::ok(format_spec(&t.spec), spec_json(&t.spec)))
        }
        Command::Eval {
            file,
            expr,
            order,
            state,
            modulus,
        } => {
            let src = match (file, expr) {
                (Some(f), None) => read(f)?,
                (None, Some(e)) => e.clone(),
                _ => bail!("give a program file or --expr"),
            };
            let order = match order {
                OrderArg::Left => Order::Left,
                OrderArg::Right => Order::Right,
            };
            eval(&src, order, &parse_state(state)?, *modulus)
        }
        Command::Demo { which } => match which {
            DemoKind::Mp => demo::modus_ponens(),
            DemoKind::Seqprod => demo::sequential_products(),
        },
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn env() -> Env {
    BUILTIN_NAMES.iter().fold(Env::new(), |env, name| {
        env.with_logic(&builtin(name).expect("builtin"))
    })
}

fn load(path: &Path) -> anyhow::Result<Document> {
    let src = read(path)?;
    parse_document(&src, &env()).with_context(|| path.display().to_string())
}

fn pick_spec(doc: &Document, name: Option<&str>) -> anyhow::Result<Arc<Specification>> {
    match name {
        Some(n) => doc
            .spec(n)
            .cloned()
            .ok_or_else(|| anyhow!("no specification `{n}`")),
        None => doc
            .specs
            .last()
            .cloned()
            .ok_or_else(|| anyhow!("no specification in the file")),
    }
}

/// A logic named on the command line or in the file, else the one whose
/// sketch the specification is over.
fn pick_logic(
    doc: &Document,
    name: Option<&str>,
    spec: &Specification,
) -> anyhow::Result<DiagrammaticLogic> {
    let declared = |n: &str| doc.logics.iter().find(|l| l.name == n).cloned();
    if let Some(n) = name {
        return declared(n)
            .or_else(|| builtin(n))
            .ok_or_else(|| anyhow!("unknown logic `{n}`"));
    }
    let sketch = &spec.sketch().name;
    doc.logics
        .iter()
        .find(|l| &l.sketch.name == sketch)
        .cloned()
        .or_else(|| {
            BUILTIN_NAMES
                .iter()
                .filter_map(|n| builtin(n))
                .find(|l| &l.sketch.name == sketch)
        })
        .ok_or_else(|| anyhow!("no logic over `{sketch}`; pass --logic"))
}

fn check(files: &[PathBuf]) -> anyhow::Result<Report> {
    let mut text = String::new();
    let mut entries = Vec::new();
    for f in files {
        let doc = load(f)?;
        if doc.is_empty() {
            bail!("{}: nothing declared", f.display());
        }
        let _ = writeln!(
            text,
            "{}: sketches {}, specifications {}, morphisms {}, logics {}, proofs {}",
            f.display(),
            doc.sketches.len(),
            doc.specs.len(),
            doc.morphisms.len(),
            doc.logics.len(),
            doc.proofs.len()
        );
        entries.push(json!({
            "file": f.display().to_string(),
            "sketches": doc.sketches.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
            "specifications": doc.specs.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
            "morphisms": doc.morphisms.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
            "logics": doc.logics.iter().map(|l| l.name.clone()).collect::<Vec<_>>(),
            "proofs": doc.proofs.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        }));
    }
    Ok(Report::ok(text, Value::Array(entries)))
}

fn status_word(s: SaturationStatus) -> &'static str {
    match s {
        SaturationStatus::Fixpoint => "fixpoint",
        SaturationStatus::Truncated => "truncated",
    }
}

fn saturate_report(
    logic: &DiagrammaticLogic,
    spec: Arc<Specification>,
    config: SaturationConfig,
) -> Report {
    let sat = saturate(logic, spec, config);
    let mut text = format!(
        "status: {} after {} applications ({} skipped by depth)\n",
        status_word(sat.status),
        sat.applications,
        sat.skipped
    );
    text.push_str(&format_spec(&sat.spec));
    let json = json!({
        "status": sat.status,
        "applications": sat.applications,
        "skipped": sat.skipped,
        "spec": spec_json(&sat.spec),
    });
    Report::ok(text, json)
}

fn prove(
    doc: &Document,
    logic: &DiagrammaticLogic,
    start: Arc<Specification>,
    name: Option<&str>,
) -> anyhow::Result<Report> {
    let (pname, script) = match name {
        Some(n) => doc
            .proofs
            .iter()
            .find(|(p, _)| p == n)
            .ok_or_else(|| anyhow!("no proof `{n}`"))?,
        None => doc
            .proofs
            .first()
            .ok_or_else(|| anyhow!("no proof in the file"))?,
    };
    match run_proof(logic, script, start) {
        Ok(outcome) => {
            let mut text = String::new();
            for (i, step) in outcome.trace.iter().enumerate() {
                let fresh: Vec<String> =
                    step.fresh.iter().map(|(p, x)| format!("{p} {x}")).collect();
                let _ = writeln!(
                    text,
                    "step {}: {} adds [{}]",
                    i + 1,
                    step.rule,
                    fresh.join(", ")
                );
            }
            text.push_str(&format_spec(&outcome.spec));
            let json = json!({
                "proof": pname,
                "steps": outcome.trace.iter().map(step_json).collect::<Vec<_>>(),
                "spec": spec_json(&outcome.spec),
            });
            Ok(Report::ok(text, json))
        }
        Err(e @ Error::NoMatch { .. }) => Ok(Report {
            text: format!("{e}\n"),
            json: json!({ "proof": pname, "error": e.to_string() }),
            code: 1,
        }),
        Err(e) => Err(e.into()),
    }
}

fn parse_state(s: &str) -> anyhow::Result<State> {
    let mut state = State::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("`{item}` is not of the form name=value"))?;
        let v: u64 = v.trim().parse().with_context(|| format!("`{item}`"))?;
        state.insert(k.trim().to_string(), v);
    }
    Ok(state)
}

pub(crate) fn outcome_text(out: &Outcome) -> String {
    let mut text = format!(
        "value: {}\n",
        serde_json::to_string(&out.value).expect("json")
    );
    let state: Vec<String> = out
        .final_state
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let _ = writeln!(text, "final state: {}", state.join(", "));
    for e in &out.trace {
        let _ = match e {
            Event::Lookup { var, value } => writeln!(text, "  lookup {var} = {value}"),
            Event::Assign { var, value } => writeln!(text, "  assign {var} := {value}"),
        };
    }
    text
}

fn eval(src: &str, order: Order, state: &State, modulus: u64) -> anyhow::Result<Report> {
    let program = parse_program(src)?;
    if !state.is_empty() {
        let declared: BTreeSet<String> = state.keys().cloned().collect();
        program.check_variables(&declared)?;
    }
    let out = evaluate_program(&program, state, order, modulus)?;
    Ok(Report::ok(outcome_text(&out), serde_json::to_value(&out)?))
}
