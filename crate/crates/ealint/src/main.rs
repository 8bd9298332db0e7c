use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ealint::constraints::all_constraints;
use ealint::decorate::{decorate_assignment, decorate_term};
use ealint::pipeline::{check, infer_with_context, to_json, InferenceResult, Status};
use ealint::pseudo::{parse_eal_type, parse_pseudo_term, EALAssignment};
use ealint::simple::{parse_simple_type, principal_type_with, SimpleType};
use ealint::solver::oracle_enumerate;
use ealint::syntax::{parse_term, variables_in_order, Ident};

#[derive(Parser)]
#[command(name = "ealint", about = "Elementary affine typing for lambda terms", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Emit {
    #[default]
    Pretty,
    Json,
    Constraints,
    Lp,
}

#[derive(Args)]
struct TermInput {
    /// Read the term from a file.
    file: Option<String>,
    /// Give the term inline.
    #[arg(short = 'e', long = "expr")]
    expr: Option<String>,
}

impl TermInput {
    fn text(&self) -> Result<String, String> {
        match (&self.file, &self.expr) {
            (None, Some(e)) => Ok(e.clone()),
            (Some(f), None) => {
                std::fs::read_to_string(f).map_err(|e| format!("cannot read {f}: {e}"))
            }
            _ => Err("give exactly one of <file> or -e <term>".into()),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Infer a banged decoration and type for a lambda term.
    Infer {
        #[command(flatten)]
        input: TermInput,
        #[arg(long, value_enum, default_value_t = Emit::Pretty)]
        emit: Emit,
        /// Extra hypotheses, e.g. "w:a->a,v:b".
        #[arg(long)]
        context: Option<String>,
    },
    /// Verify a door-decorated pseudo-term against a type assignment.
    Check {
        #[arg(short = 'e', long = "expr")]
        expr: String,
        /// Bindings for every variable, e.g. "x:!a,y:a->a".
        #[arg(long)]
        types: String,
    },
    /// Brute-force search for an integer witness of the term's system.
    Oracle {
        #[command(flatten)]
        input: TermInput,
        #[arg(long, default_value_t = 3)]
        bound: u32,
    },
}

fn parse_simple_context(s: &str) -> Result<Vec<(Ident, SimpleType)>, String> {
    let mut out = Vec::new();
    for entry in s.split(',').filter(|e| !e.trim().is_empty()) {
        let (name, ty) = entry
            .split_once(':')
            .ok_or_else(|| format!("bad context entry {entry:?}, expected name:type"))?;
        let ty = parse_simple_type(ty.trim()).map_err(|e| format!("in {entry:?}: {e}"))?;
        out.push((name.trim().to_string(), ty));
    }
    Ok(out)
}

fn parse_eal_context(s: &str) -> Result<EALAssignment, String> {
    let mut out = EALAssignment::new();
    for entry in s.split(',').filter(|e| !e.trim().is_empty()) {
        let (name, ty) = entry
            .split_once(':')
            .ok_or_else(|| format!("bad types entry {entry:?}, expected name:type"))?;
        let ty = parse_eal_type(ty.trim()).map_err(|e| format!("in {entry:?}: {e}"))?;
        out.insert(name.trim().to_string(), ty);
    }
    Ok(out)
}

fn print_pretty(r: &InferenceResult) {
    println!("status: {}", r.status.as_str());
    if let Some((theta, ty)) = &r.principal {
        for (x, t) in theta {
            println!("simple  {x}: {t}");
        }
        println!("simple type: {ty}");
    }
    if let Some(t) = &r.pseudo_term {
        println!("pseudo-term: {t}");
    }
    if let Some(g) = &r.eal_context {
        for (x, t) in g {
            println!("context {x}: {t}");
        }
    }
    if let Some(t) = &r.eal_type {
        println!("type: {t}");
    }
    if let Some(w) = &r.witness {
        let rendered: Vec<String> = w.iter().map(|(p, v)| format!("{p}={v}")).collect();
        println!("witness: {}", rendered.join(" "));
    }
    if let Some(v) = &r.verification {
        for (name, outcome) in v.checks() {
            if let Some(ok) = outcome {
                println!("verify {name}: {}", if ok { "pass" } else { "FAIL" });
            }
        }
    }
}

fn run() -> Result<i32, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Infer { input, emit, context } => {
            let text = input.text()?;
            let term = parse_term(&text).map_err(|e| e.to_string())?;
            let extra = match context {
                Some(s) => parse_simple_context(&s)?,
                None => Vec::new(),
            };
            let result = infer_with_context(&term, &extra).map_err(|e| e.to_string())?;
            match emit {
                Emit::Pretty => print_pretty(&result),
                Emit::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&to_json(&result)).unwrap()
                ),
                Emit::Constraints => match &result.constraints {
                    Some(cs) => print!("{cs}"),
                    None => println!("no constraints generated"),
                },
                Emit::Lp => match &result.constraints {
                    Some(cs) => print!("{}", cs.to_lp_string(None)),
                    None => println!("no constraints generated"),
                },
            }
            Ok(result.status.exit_code())
        }
        Command::Check { expr, types } => {
            let t = parse_pseudo_term(&expr).map_err(|e| e.to_string())?;
            let gamma = parse_eal_context(&types)?;
            let result = check(&t, &gamma).map_err(|e| e.to_string())?;
            print_pretty(&result);
            Ok(result.status.exit_code())
        }
        Command::Oracle { input, bound } => {
            let text = input.text()?;
            let term = parse_term(&text).map_err(|e| e.to_string())?;
            let (theta, _) = principal_type_with(&term, &[]).map_err(|e| e.to_string())?;
            let decorated = decorate_term(&term);
            let sigma = decorate_assignment(&theta, &variables_in_order(&term));
            let cs = all_constraints(&decorated, &sigma);
            match oracle_enumerate(&cs, bound).map_err(|e| e.to_string())? {
                Some(phi) => {
                    let rendered: Vec<String> =
                        phi.iter().map(|(p, v)| format!("{p}={v}")).collect();
                    println!("witness: {}", rendered.join(" "));
                    Ok(0)
                }
                None => {
                    println!("none-in-box (bound {bound})");
                    Ok(Status::NotEalTypable.exit_code())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
