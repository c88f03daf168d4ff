use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use tamedom_cli::monoid::{monoid_table, MonoidTable};
use tamedom_cli::userfile::{load_schemas, load_theory};
use tamedom_cli::{hard_cap, run_scenario, verify_report, Budgets, Report, SCENARIOS};
use tamedom_core::builtins;
use tamedom_core::domination::{AmalgamBackend, CheckOptions, OrderBackend};
use tamedom_core::logic::{parse_theory, Backend};
use tamedom_core::schema::{parse_schema_file, validate_schema, SchemaItem, TypeSchema};
use tamedom_core::order::CutType;

#[derive(Parser)]
#[command(name = "tamedom", version, about = "Domination between invariant types, checked on finite cores")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run built-in scenarios (or `all`, or a user scenario .toml file).
    Run(RunArgs),
    /// Theory file tooling.
    Theory {
        #[command(subcommand)]
        cmd: TheoryCmd,
    },
    /// Schema file tooling.
    Schema {
        #[command(subcommand)]
        cmd: SchemaCmd,
    },
    /// Domination classes of tensor words with their order and product.
    Monoid(MonoidArgs),
    /// Re-check every certificate in a report.
    Verify { report: PathBuf },
    /// List the built-in scenarios.
    List,
}

#[derive(Args)]
struct RunArgs {
    #[arg(required = true)]
    scenarios: Vec<String>,
    #[arg(long)]
    base_budget: Option<usize>,
    #[arg(long)]
    param_budget: Option<usize>,
    #[arg(long)]
    probes: Option<usize>,
    #[arg(long)]
    parallel: bool,
    /// Write the report(s) as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TheoryCmd {
    Validate { file: PathBuf },
}

#[derive(Subcommand)]
enum SchemaCmd {
    Validate {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        /// Theory file for `type` headers that do not name a built-in theory.
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct MonoidArgs {
    /// Built-in theory name or theory file.
    theory: String,
    #[arg(required = true)]
    schemas: Vec<String>,
    #[arg(long, default_value_t = 3)]
    max_arity: usize,
    #[arg(long, default_value_t = 1)]
    base_budget: usize,
    /// Schema file to take the named schemas from instead of the built-ins.
    #[arg(long)]
    schema_file: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Run(a) => run(a),
        Cmd::Theory {
            cmd: TheoryCmd::Validate { file },
        } => theory_validate(&file),
        Cmd::Schema {
            cmd: SchemaCmd::Validate {
                file,
                arity,
                theory,
                json,
            },
        } => schema_validate(&file, arity, theory.as_deref(), json),
        Cmd::Monoid(a) => monoid(a),
        Cmd::Verify { report } => verify(&report),
        Cmd::List => {
            for s in SCENARIOS {
                println!("{s}");
            }
            Ok(true)
        }
    }
}

fn run(a: RunArgs) -> Result<bool> {
    let cap = hard_cap()?;
    let budgets = Budgets {
        base: a.base_budget,
        param: a.param_budget,
        probes: a.probes,
    };
    let names: Vec<String> = if a.scenarios.iter().any(|s| s == "all") {
        SCENARIOS.iter().map(|s| s.to_string()).collect()
    } else {
        a.scenarios.clone()
    };
    let reports: Vec<Report> = if a.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = names
                .iter()
                .map(|n| s.spawn(move || run_scenario(n, &budgets, cap)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| bail!("scenario thread panicked")))
                .collect::<Result<Vec<_>>>()
        })?
    } else {
        names
            .iter()
            .map(|n| run_scenario(n, &budgets, cap).with_context(|| format!("scenario `{n}`")))
            .collect::<Result<_>>()?
    };
    for r in &reports {
        print_report(r);
    }
    if let Some(path) = &a.json {
        let text = if reports.len() == 1 {
            serde_json::to_string_pretty(&reports[0])?
        } else {
            serde_json::to_string_pretty(&reports)?
        };
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(reports.iter().all(|r| r.pass))
}

fn print_report(r: &Report) {
    println!("== {} ({} ms)", r.scenario, r.elapsed_ms);
    for c in &r.claims {
        let mark = if c.pass { "PASS" } else { "FAIL" };
        println!("  {mark} {}: {}", c.paper_anchor, c.statement);
        println!("       expected: {}", c.expected);
        println!("       verdict:  {}", c.verdict);
        if let Some(b) = &c.bounded {
            println!("       bounded:  base <= {}, param <= {}", b.base, b.param);
        }
        println!("       certificates: {}", c.certificates.len());
        for n in &c.notes {
            for line in n.lines() {
                println!("       | {line}");
            }
        }
    }
    println!("  => {}", if r.pass { "pass" } else { "FAIL" });
}

fn theory_validate(file: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    match parse_theory(&text) {
        Ok(t) => {
            println!("ok: theory `{}`", t.name);
            print!("{}", t.pretty_print());
            Ok(true)
        }
        Err(e) => {
            println!("invalid: {e}");
            Ok(false)
        }
    }
}

fn schema_validate(file: &Path, arity: usize, theory: Option<&Path>, json: bool) -> Result<bool> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let user = match theory {
        Some(p) => Some(load_theory(&p.to_string_lossy(), Path::new("."))?),
        None => None,
    };
    let items = match parse_schema_file(&text, &|n| match &user {
        Some(t) if n.eq_ignore_ascii_case(&t.name) => Ok(t.clone()),
        _ => builtins::theory(n),
    }) {
        Ok(items) => items,
        Err(e) => {
            println!("invalid: {e}");
            return Ok(false);
        }
    };
    let mut ok = true;
    let mut reports = Vec::new();
    for item in &items {
        match item {
            SchemaItem::Type(t) => {
                let rep = validate_schema(t, arity)?;
                ok &= rep.passed();
                if !json {
                    println!(
                        "{} `{}`: complete by arity {:?}, consistent {}, {} failures, {} derivable rules",
                        if rep.passed() { "ok" } else { "invalid" },
                        t.name,
                        rep.complete_by_arity,
                        rep.consistent,
                        rep.failures.len(),
                        rep.derived.len()
                    );
                    for f in rep.failures.iter().take(5) {
                        println!("    {:?} at arity {}: {}", f.kind, f.arity, f.atom);
                    }
                }
                reports.push(serde_json::to_value(&rep)?);
            }
            SchemaItem::Order(c) => {
                if !json {
                    println!("ok `{}`: order type with {} variables", c.name, c.arity());
                }
            }
        }
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    }
    Ok(ok)
}

fn monoid(a: MonoidArgs) -> Result<bool> {
    let cap = hard_cap()?;
    let theory = load_theory(&a.theory, Path::new("."))?;
    let items = match &a.schema_file {
        Some(p) => {
            let t = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            load_schemas(&t, &theory)?
        }
        None => builtins::schemas(&a.theory)?,
    };
    let pick = |n: &String| {
        items
            .iter()
            .find(|s| s.name() == n)
            .cloned()
            .with_context(|| format!("unknown schema `{n}`"))
    };
    let picked: Vec<SchemaItem> = a.schemas.iter().map(pick).collect::<Result<_>>()?;
    let opts = CheckOptions::default();
    let table: MonoidTable = match theory.backend {
        Backend::Amalgamation => {
            let fs: Vec<TypeSchema> = picked
                .into_iter()
                .map(|s| match s {
                    SchemaItem::Type(t) => Ok(t),
                    SchemaItem::Order(c) => bail!("`{}` is an order type", c.name),
                })
                .collect::<Result<_>>()?;
            let be = AmalgamBackend::new(theory.clone())?.with_point_cap(cap);
            monoid_table(&be, &fs, a.max_arity, a.base_budget, &opts, None)?
        }
        Backend::DenseOrder(_) => {
            let fs: Vec<CutType> = picked
                .into_iter()
                .map(|s| match s {
                    SchemaItem::Order(c) => Ok(c),
                    SchemaItem::Type(t) => bail!("`{}` is a rule schema", t.name),
                })
                .collect::<Result<_>>()?;
            monoid_table(&OrderBackend, &fs, a.max_arity, a.base_budget, &opts, None)?
        }
    };
    print!("{}", table.render());
    if let Some(p) = &a.json {
        std::fs::write(p, serde_json::to_string_pretty(&table)? + "\n")?;
    }
    Ok(table.well_defined)
}

fn verify(path: &Path) -> Result<bool> {
    let cap = hard_cap()?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).context("malformed report")?;
    let reports: Vec<Report> = if value.is_array() {
        serde_json::from_value(value).context("malformed report")?
    } else {
        vec![serde_json::from_value(value).context("malformed report")?]
    };
    let mut ok = true;
    for r in &reports {
        let out = verify_report(r, cap)?;
        match &out.failure {
            None => println!("{}: {} certificates verified", r.scenario, out.checked),
            Some(f) => {
                println!("{}: FAILED after {} certificates: {f}", r.scenario, out.checked);
                ok = false;
            }
        }
    }
    Ok(ok)
}
