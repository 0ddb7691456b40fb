//! Command-line surface for the open-graph rewriting engine. Batch
//! tool: JSON in, JSON or DOT out. Exit codes: 0 success or pass, 1
//! domain error, 2 check failure, 3 bound exhaustion ("unknown").

use clap::{Parser, Subcommand};
use openrewrite_core::cospan::compose_cospans;
use openrewrite_core::discrete::{discretize_grammar, hat_grammar};
use openrewrite_core::dpo::{apply_rule, find_matches, reachable, Reachability, SearchBounds, Trace};
use openrewrite_core::error::Error;
use openrewrite_core::json::{
    detect_kind, from_value, parse_value, to_json_string, CospanDoc, CospanGrammarDoc,
    CospanRuleDoc, GrammarDoc, GraphDoc, PayloadKind, RuleDoc, TraceDoc,
};
use openrewrite_core::oracle::{run_check, CheckConfig};
use serde::Deserialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_DOMAIN: u8 = 1;
const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;

#[derive(Parser)]
#[command(
    name = "openrewrite",
    about = "Double-pushout rewriting for graphs and open graphs",
    version
)]
struct Cli {
    /// Optional config file with default bounds and seed; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a JSON document (graph, rule, grammar, cospan, ...).
    Validate {
        file: PathBuf,
        /// Type graph to check typings against.
        #[arg(long)]
        type_graph: Option<PathBuf>,
    },
    /// List matches of a rule into a graph with applicability.
    Match {
        #[arg(short = 'r', long = "rule")]
        rule: PathBuf,
        #[arg(short = 'g', long = "graph")]
        graph: PathBuf,
        /// Allow non-monic matches.
        #[arg(long)]
        general: bool,
    },
    /// Apply a rule at a match and emit the derivation trace.
    Apply {
        #[arg(short = 'r', long = "rule")]
        rule: PathBuf,
        #[arg(short = 'g', long = "graph")]
        graph: PathBuf,
        /// Match index from `match`, or `all`.
        #[arg(long = "match", default_value = "0")]
        matching: String,
        #[arg(long)]
        general: bool,
        /// Output file (stdout when absent).
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Search for a rewrite sequence between two graphs.
    Reach {
        #[arg(short = 'G', long = "grammar")]
        grammar: PathBuf,
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long)]
        general: bool,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Compose two open graphs along their shared interface.
    Compose { first: PathBuf, second: PathBuf },
    /// Replace every rule interface by its underlying discrete graph.
    Discretize {
        #[arg(short = 'G', long = "grammar")]
        grammar: PathBuf,
    },
    /// Decomposition squares of a discrete grammar.
    Hat {
        #[arg(short = 'G', long = "grammar")]
        grammar: PathBuf,
    },
    /// Run a theorem-checking suite.
    Check {
        /// thm54 | thm62 | additivity | interchange
        name: String,
        #[arg(long, default_value_t = 50)]
        trials: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        depth: Option<usize>,
        /// Corrupt one trial to demonstrate non-vacuity.
        #[arg(long)]
        inject_failure: bool,
    },
    /// Render a graph, cospan, or trace as DOT.
    ExportDot { file: PathBuf },
}

#[derive(Debug, Default, Deserialize)]
struct FileConfig {
    seed: Option<u64>,
    max_depth: Option<usize>,
    max_size: Option<usize>,
    #[allow(dead_code)]
    max_squares: Option<usize>,
    mono_only: Option<bool>,
}

struct Defaults {
    seed: u64,
    max_depth: usize,
    max_size: usize,
    mono_only: bool,
}

fn load_defaults(config: Option<&Path>) -> Result<Defaults, Error> {
    let file: FileConfig = match config {
        Some(path) => {
            let text = read_file(path)?;
            from_value(parse_value(&text)?)?
        }
        None => FileConfig::default(),
    };
    // env seed overrides the config file; flags override both
    let env_seed = std::env::var("OPENREWRITE_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok());
    Ok(Defaults {
        seed: env_seed.or(file.seed).unwrap_or(0),
        max_depth: file.max_depth.unwrap_or(4),
        max_size: file.max_size.unwrap_or(16),
        mono_only: file.mono_only.unwrap_or(true),
    })
}

fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Malformed(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<openrewrite_core::Graph, Error> {
    let doc: GraphDoc = from_value(parse_value(&read_file(path)?)?)?;
    let g = doc.into_graph()?;
    let report = g.validate();
    if !report.is_valid() {
        return Err(Error::Invalid(format!("{}: {report}", path.display())));
    }
    Ok(g)
}

fn load_rule(path: &Path) -> Result<openrewrite_core::dpo::Rule, Error> {
    let doc: RuleDoc = from_value(parse_value(&read_file(path)?)?)?;
    doc.into_rule()
}

fn load_grammar(path: &Path) -> Result<openrewrite_core::dpo::Grammar, Error> {
    let doc: GrammarDoc = from_value(parse_value(&read_file(path)?)?)?;
    doc.into_grammar()
}

fn load_cospan(path: &Path) -> Result<openrewrite_core::cospan::StructuredCospan, Error> {
    let doc: CospanDoc = from_value(parse_value(&read_file(path)?)?)?;
    doc.into_cospan()
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Malformed(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let defaults = load_defaults(cli.config.as_deref())?;
    match cli.command {
        Command::Validate { file, type_graph } => {
            let value = parse_value(&read_file(&file)?)?;
            let kind = detect_kind(&value)?;
            let (kind_name, report) = match kind {
                PayloadKind::Graph => {
                    let g: GraphDoc = from_value(value)?;
                    let g = g.into_graph()?;
                    let report = match &type_graph {
                        Some(tg) => g.validate_against(&load_graph(tg)?),
                        None => g.validate(),
                    };
                    ("graph", report)
                }
                PayloadKind::Rule => {
                    let doc: RuleDoc = from_value(value)?;
                    ("rule", doc.into_rule().map(|r| r.validate())?)
                }
                PayloadKind::Grammar => {
                    let doc: GrammarDoc = from_value(value)?;
                    doc.into_grammar()?;
                    ("grammar", Default::default())
                }
                PayloadKind::Cospan => {
                    let doc: CospanDoc = from_value(value)?;
                    ("cospan", doc.into_cospan()?.validate())
                }
                PayloadKind::CospanRule => {
                    let doc: CospanRuleDoc = from_value(value)?;
                    let rule = doc.into_rule()?;
                    (
                        "cospan-rule",
                        openrewrite_core::double::validate_cospan_rule(&rule.square),
                    )
                }
                PayloadKind::CospanGrammar => {
                    let doc: CospanGrammarDoc = from_value(value)?;
                    doc.into_grammar()?;
                    ("cospan-grammar", Default::default())
                }
                PayloadKind::Trace => ("trace", Default::default()),
            };
            let valid = report.is_valid();
            emit(
                None,
                &to_json_string(&json!({
                    "format_version": "1",
                    "kind": kind_name,
                    "valid": valid,
                    "violations": report.violations,
                })),
            )?;
            Ok(if valid { EXIT_OK } else { EXIT_DOMAIN })
        }
        Command::Match {
            rule,
            graph,
            general,
        } => {
            let rule = load_rule(&rule)?;
            let graph = load_graph(&graph)?;
            let mono_only = !general && defaults.mono_only;
            let found = find_matches(&rule, &graph, mono_only)?;
            let rows: Vec<_> = found
                .iter()
                .map(|c| {
                    json!({
                        "match": {
                            "nodes": c.matching.node_map,
                            "edges": c.matching.edge_map,
                        },
                        "applicable": c.applicable,
                        "gluing": {
                            "identification_ok": c.gluing.identification_ok,
                            "dangling_ok": c.gluing.dangling_ok,
                            "identification_offenders": c.gluing.identification_offenders,
                            "dangling_offenders": c.gluing.dangling_offenders,
                        },
                    })
                })
                .collect();
            emit(
                None,
                &to_json_string(&json!({
                    "format_version": "1",
                    "rule": rule.name,
                    "mono_only": mono_only,
                    "matches": rows,
                })),
            )?;
            Ok(EXIT_OK)
        }
        Command::Apply {
            rule,
            graph,
            matching,
            general,
            out,
        } => {
            let rule = load_rule(&rule)?;
            let graph = load_graph(&graph)?;
            let mono_only = !general && defaults.mono_only;
            let found = find_matches(&rule, &graph, mono_only)?;
            let apply_at = |idx: usize| -> Result<TraceDoc, Error> {
                let cand = found.get(idx).ok_or_else(|| {
                    Error::Invalid(format!(
                        "match index {idx} out of range ({} matches)",
                        found.len()
                    ))
                })?;
                if !cand.applicable {
                    return Err(Error::GluingViolation(cand.gluing.clone()));
                }
                let step = apply_rule(&rule, &graph, &cand.matching)?;
                let trace = Trace {
                    start_canonical: openrewrite_core::canon::canonical_form(&graph),
                    end_canonical: openrewrite_core::canon::canonical_form(&step.result),
                    steps: vec![step],
                };
                Ok(TraceDoc::from_trace(&graph, &trace))
            };
            let text = if matching == "all" {
                let docs = (0..found.len())
                    .filter(|i| found[*i].applicable)
                    .map(apply_at)
                    .collect::<Result<Vec<_>, _>>()?;
                to_json_string(&docs)
            } else {
                let idx: usize = matching
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad match selector {matching:?}")))?;
                to_json_string(&apply_at(idx)?)
            };
            emit(out.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Reach {
            grammar,
            from,
            to,
            max_depth,
            max_size,
            general,
            out,
        } => {
            let grammar = load_grammar(&grammar)?;
            let start = load_graph(&from)?;
            let target = load_graph(&to)?;
            let bounds = SearchBounds {
                max_depth: max_depth.unwrap_or(defaults.max_depth),
                max_size: max_size.unwrap_or(defaults.max_size),
            };
            let mono_only = !general && defaults.mono_only;
            match reachable(&grammar, &start, &target, bounds, mono_only)? {
                Reachability::Found(trace) => {
                    emit(out.as_deref(), &to_json_string(&TraceDoc::from_trace(&start, &trace)))?;
                    Ok(EXIT_OK)
                }
                Reachability::NotReached { definitive } => {
                    emit(
                        out.as_deref(),
                        &to_json_string(&json!({
                            "format_version": "1",
                            "reached": false,
                            "definitive": definitive,
                            "max_depth": bounds.max_depth,
                            "max_size": bounds.max_size,
                        })),
                    )?;
                    Ok(EXIT_UNKNOWN)
                }
            }
        }
        Command::Compose { first, second } => {
            let c1 = load_cospan(&first)?;
            let c2 = load_cospan(&second)?;
            let composite = compose_cospans(&c1, &c2)?;
            emit(None, &to_json_string(&CospanDoc::from_cospan(&composite)))?;
            Ok(EXIT_OK)
        }
        Command::Discretize { grammar } => {
            let grammar = load_grammar(&grammar)?;
            let flat = discretize_grammar(&grammar)?;
            emit(None, &to_json_string(&GrammarDoc::from_grammar(&flat)))?;
            Ok(EXIT_OK)
        }
        Command::Hat { grammar } => {
            let grammar = load_grammar(&grammar)?;
            let hat = hat_grammar(&grammar)?;
            emit(None, &to_json_string(&CospanGrammarDoc::from_grammar(&hat)))?;
            Ok(EXIT_OK)
        }
        Command::Check {
            name,
            trials,
            seed,
            depth,
            inject_failure,
        } => {
            let cfg = CheckConfig {
                trials,
                seed: seed.unwrap_or(defaults.seed),
                depth: depth.unwrap_or(2),
                inject_failure,
            };
            let report = run_check(&name, &cfg)?;
            let passed = report.passed();
            emit(None, &to_json_string(&report))?;
            Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::ExportDot { file } => {
            let value = parse_value(&read_file(&file)?)?;
            let dot = match detect_kind(&value)? {
                PayloadKind::Graph => {
                    let doc: GraphDoc = from_value(value)?;
                    openrewrite_core::dot::graph_to_dot(&doc.into_graph()?)
                }
                PayloadKind::Cospan => {
                    let doc: CospanDoc = from_value(value)?;
                    openrewrite_core::dot::cospan_to_dot(&doc.into_cospan()?)
                }
                PayloadKind::Trace => {
                    let doc: TraceDoc = from_value(value)?;
                    let start = doc.start.into_graph()?;
                    let steps = doc
                        .steps
                        .into_iter()
                        .map(|s| Ok((s.rule, s.result.into_graph()?)))
                        .collect::<Result<Vec<_>, Error>>()?;
                    openrewrite_core::dot::step_sequence_to_dot(&start, &steps)
                }
                other => {
                    return Err(Error::Invalid(format!(
                        "export-dot expects a graph, cospan, or trace (got {other:?})"
                    )))
                }
            };
            emit(None, &dot)?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version print normally; anything else is a usage
            // error
            let code = if e.use_stderr() { EXIT_DOMAIN } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}
