//! Command-line front end: parse and check formulas, evaluate them in full
//! or Henkin semantics, check comprehension, verify proofs, and search for
//! countermodels. Reports go to stdout (optionally as JSON), diagnostics to
//! stderr.
//!
//! Exit codes: 0 a result was produced (including the verdict Unknown and
//! countermodel NotFound), 1 usage error, 2 parse or validation failure or
//! an invalid proof, 3 a budget gave out inside proof checking.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sortlog::model::Budget;
use sortlog::parser::{
    parse_formula, parse_henkin, parse_proof, parse_structure, parse_vocabulary, render_formula,
    render_henkin, HenkinDoc,
};
use sortlog::proof::check_proof;
use sortlog::semantics::full::eval_with_stats;
use sortlog::semantics::henkin::{
    check_comprehension, countermodel_search, eval_henkin_sentence, CountermodelSearch,
    SearchBounds,
};
use sortlog::syntax::{
    display_sort_set, free_individual_vars, free_relation_vars, free_sorts, quantifier_rank,
    well_formed, Vocabulary,
};

#[derive(Parser)]
#[command(name = "sortlog", version, about = "workbench for many-sorted logic with new-sort quantifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct BudgetArgs {
    /// Maximum size of each new domain tried for a new-sort quantifier
    #[arg(long = "bound", default_value_t = 3)]
    bound: usize,
    /// Maximum candidates explored per relation or expansion quantifier
    #[arg(long = "rel-cap", default_value_t = 65536)]
    rel_cap: u64,
    /// Global search-step limit
    #[arg(long = "step-cap", default_value_t = 10_000_000)]
    step_cap: u64,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            domain_bound: self.bound,
            relation_cap: self.rel_cap,
            step_cap: self.step_cap,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print it with its free variables and sorts
    Parse {
        /// Formula file (.slf)
        #[arg(short = 'f', long = "formula")]
        formula: PathBuf,
        /// Vocabulary file (JSON object of name -> sort tuple)
        #[arg(long = "voc")]
        voc: Option<PathBuf>,
        /// Print only the free sorts
        #[arg(long = "free-sorts")]
        free_sorts_only: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check well-formedness, including the New Sort Condition
    Check {
        #[arg(short = 'f', long = "formula")]
        formula: PathBuf,
        #[arg(long = "voc")]
        voc: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate a sentence in a structure under the full semantics
    Eval {
        /// Structure file (.sls)
        #[arg(short = 's', long = "structure")]
        structure: PathBuf,
        #[arg(short = 'f', long = "formula")]
        formula: PathBuf,
        #[arg(long = "voc")]
        voc: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate a sentence in a finite Henkin structure (exact)
    Heval {
        /// Henkin structure file (.slh)
        #[arg(short = 's', long = "structure")]
        structure: PathBuf,
        #[arg(short = 'f', long = "formula")]
        formula: PathBuf,
        #[arg(long = "voc")]
        voc: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check the comprehension axioms on a Henkin structure up to a bound
    HenkinCheck {
        #[arg(short = 's', long = "structure")]
        structure: PathBuf,
        /// Quantifier-rank bound for defining formulas
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// Node-count bound for defining formulas
        #[arg(long, default_value_t = 3)]
        size: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Verify a proof file line by line
    Prove {
        /// Proof file (.slp)
        proof: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Search for a finite Henkin countermodel of a sentence under a theory
    Search {
        #[arg(short = 'f', long = "formula")]
        formula: PathBuf,
        /// Theory sentence files; repeat for several
        #[arg(short = 't', long = "theory")]
        theory: Vec<PathBuf>,
        #[arg(long = "voc")]
        voc: Option<PathBuf>,
        /// Maximum size of each base domain
        #[arg(long = "max-size", default_value_t = 3)]
        max_size: usize,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        size: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))
}

fn load_voc(path: &Option<PathBuf>) -> Result<Vocabulary, String> {
    match path {
        None => Ok(Vocabulary::new()),
        Some(p) => parse_vocabulary(&read(p)?).map_err(|e| format!("{}: {}", p.display(), e)),
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Parse {
            formula,
            voc,
            free_sorts_only,
            format,
        } => {
            let voc = load_voc(&voc)?;
            let text = read(&formula)?;
            let phi = parse_formula(&text, &voc).map_err(|e| e.to_string())?;
            let sorts = free_sorts(&phi);
            if format == Format::Json {
                let report = json!({
                    "command": "parse",
                    "inputs": [formula.display().to_string()],
                    "formula": render_formula(&phi),
                    "free_individual_vars":
                        free_individual_vars(&phi).iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "free_relation_vars":
                        free_relation_vars(&phi).iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "free_sorts": sorts.iter().map(|s| s.0).collect::<Vec<_>>(),
                    "quantifier_rank": quantifier_rank(&phi),
                });
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else if free_sorts_only {
                println!("{}", display_sort_set(&sorts));
            } else {
                println!("{}", render_formula(&phi));
                let ind: Vec<String> =
                    free_individual_vars(&phi).iter().map(ToString::to_string).collect();
                let rel: Vec<String> =
                    free_relation_vars(&phi).iter().map(ToString::to_string).collect();
                println!("free individual variables: {}", if ind.is_empty() { "none".into() } else { ind.join(", ") });
                println!("free relation variables: {}", if rel.is_empty() { "none".into() } else { rel.join(", ") });
                println!("free sorts: {}", display_sort_set(&sorts));
                println!("quantifier rank: {}", quantifier_rank(&phi));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            formula,
            voc,
            format,
        } => {
            let voc = load_voc(&voc)?;
            let text = read(&formula)?;
            // parse_formula already runs the well-formedness pass; a second
            // pass here distinguishes check's report from a parse failure.
            let phi = parse_formula(&text, &voc).map_err(|e| e.to_string())?;
            let result = well_formed(&voc, &phi);
            if format == Format::Json {
                let report = json!({
                    "command": "check",
                    "inputs": [formula.display().to_string()],
                    "ok": result.is_ok(),
                    "violations": result.as_ref().err().map(|vs| vs.iter().map(ToString::to_string).collect::<Vec<_>>()).unwrap_or_default(),
                });
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                println!("well-formed");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval {
            structure,
            formula,
            voc,
            budget,
            format,
        } => {
            let doc = parse_structure(&read(&structure)?).map_err(|e| e.to_string())?;
            let voc = match voc {
                Some(_) => load_voc(&voc)?,
                None => doc.vocabulary.clone(),
            };
            let phi = parse_formula(&read(&formula)?, &voc).map_err(|e| e.to_string())?;
            let b = budget.budget();
            let outcome = eval_with_stats(&voc, &doc.structure, &sortlog::Assignment::new(), &phi, &b)
                .map_err(|e| e.to_string())?;
            if format == Format::Json {
                let report = json!({
                    "command": "eval",
                    "inputs": [structure.display().to_string(), formula.display().to_string()],
                    "verdict": outcome.verdict.to_string(),
                    "steps_used": outcome.steps_used,
                    "budget": {
                        "domain_bound": b.domain_bound,
                        "relation_cap": b.relation_cap,
                        "step_cap": b.step_cap,
                    },
                });
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                println!("{}", outcome.verdict);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Heval {
            structure,
            formula,
            voc,
            format,
        } => {
            let doc = parse_henkin(&read(&structure)?).map_err(|e| e.to_string())?;
            let voc = match voc {
                Some(_) => load_voc(&voc)?,
                None => doc.vocabulary.clone(),
            };
            let phi = parse_formula(&read(&formula)?, &voc).map_err(|e| e.to_string())?;
            let value =
                eval_henkin_sentence(&voc, &doc.henkin, &phi).map_err(|e| e.to_string())?;
            if format == Format::Json {
                let report = json!({
                    "command": "heval",
                    "inputs": [structure.display().to_string(), formula.display().to_string()],
                    "verdict": value,
                });
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                println!("{}", if value { "true" } else { "false" });
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::HenkinCheck {
            structure,
            depth,
            size,
            format,
        } => {
            let doc = parse_henkin(&read(&structure)?).map_err(|e| e.to_string())?;
            let report = check_comprehension(&doc.vocabulary, &doc.henkin, depth, size);
            if format == Format::Json {
                let out = json!({
                    "command": "henkin-check",
                    "inputs": [structure.display().to_string()],
                    "depth_bound": report.depth_bound,
                    "size_bound": report.size_bound,
                    "checked_instances": report.checked_instances,
                    "failures": report.failures.iter().map(|f| json!({
                        "instance": render_formula(&f.instance),
                        "detail": f.detail,
                    })).collect::<Vec<_>>(),
                });
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                println!(
                    "checked {} instances at depth {}, size {}",
                    report.checked_instances, report.depth_bound, report.size_bound
                );
                if report.passed() {
                    println!("comprehension holds at this bound");
                } else {
                    for f in &report.failures {
                        println!("failed: {}  ({})", render_formula(&f.instance), f.detail);
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Prove { proof, format } => {
            let doc = parse_proof(&read(&proof)?).map_err(|e| e.to_string())?;
            let report = check_proof(&doc.proof);
            if format == Format::Json {
                let out = json!({
                    "command": "prove",
                    "inputs": [proof.display().to_string()],
                    "ok": report.all_ok(),
                    "lines": report.lines.iter().map(|l| json!({
                        "index": l.index,
                        "ok": l.ok,
                        "diagnostic": l.diagnostic,
                    })).collect::<Vec<_>>(),
                });
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                for line in &report.lines {
                    if line.ok {
                        println!("line {}: ok", line.index);
                    } else {
                        println!("line {}: FAIL  {}", line.index, line.diagnostic);
                    }
                }
            }
            if report.budget_exceeded {
                Ok(ExitCode::from(3))
            } else if report.all_ok() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
        Command::Search {
            formula,
            theory,
            voc,
            max_size,
            depth,
            size,
            format,
        } => {
            let voc = load_voc(&voc)?;
            let phi = parse_formula(&read(&formula)?, &voc).map_err(|e| e.to_string())?;
            let mut sentences = Vec::new();
            for t in &theory {
                sentences.push(parse_formula(&read(t)?, &voc).map_err(|e| e.to_string())?);
            }
            let bounds = SearchBounds {
                max_domain_size: max_size,
                comprehension_depth: depth,
                comprehension_size: size,
            };
            let outcome =
                countermodel_search(&voc, &sentences, &phi, &bounds).map_err(|e| e.to_string())?;
            match outcome {
                CountermodelSearch::Found(h) => {
                    let doc = HenkinDoc {
                        vocabulary: voc,
                        henkin: h,
                    };
                    if format == Format::Json {
                        let henkin_json: serde_json::Value =
                            serde_json::from_str(&render_henkin(&doc)).unwrap();
                        let out = json!({
                            "command": "search",
                            "inputs": [formula.display().to_string()],
                            "found": true,
                            "countermodel": henkin_json,
                        });
                        println!("{}", serde_json::to_string_pretty(&out).unwrap());
                    } else {
                        print!("{}", render_henkin(&doc));
                    }
                }
                CountermodelSearch::NotFound(nf) => {
                    if format == Format::Json {
                        let out = json!({
                            "command": "search",
                            "inputs": [formula.display().to_string()],
                            "found": false,
                            "max_domain_size": nf.bounds.max_domain_size,
                        });
                        println!("{}", serde_json::to_string_pretty(&out).unwrap());
                    } else {
                        println!("{}", nf);
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {}", message);
            ExitCode::from(2)
        }
    }
}
