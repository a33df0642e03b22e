//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a well-formed query fails (unknown
//! vertex, reflexive query, bad scenario), 2 on usage or input errors.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::activation::run_script;
use crate::graph::{export_dot, parse_document, serialize_context, ContextGraph, Document, Valuation};
use crate::inference::{all_pairs_derived, derived_implication};
use crate::scale::{BoundarySet, CapacityRule, Likeliness, DEFAULT_BASE_PROBABILITY};
use crate::update::{
    compare_scenarios, propagate, propagate_literal_max, Evidence, PropagationMode, Scenario,
};

/// Environment variable overriding the default base threshold.
pub const BASE_ENV: &str = "LIKELIC_BASE";

#[derive(Debug, Parser)]
#[command(name = "likelic", version, about = "Seven-grade likeliness inference on context graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq, Default)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq, Default)]
enum Mode {
    #[default]
    Fixpoint,
    Wavefront,
}

impl From<Mode> for PropagationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Fixpoint => PropagationMode::Fixpoint,
            Mode::Wavefront => PropagationMode::Wavefront,
        }
    }
}

#[derive(Debug, Args)]
struct Query {
    /// Context file (`-` for stdin)
    #[arg(long)]
    context: String,
    /// Antecedent vertex label
    #[arg(long)]
    from: String,
    /// Consequent vertex label
    #[arg(long)]
    to: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derived likeliness of the implication FROM -> TO, with a witness chain
    Infer {
        #[command(flatten)]
        query: Query,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Print the witness chain for FROM -> TO
    Explain {
        #[command(flatten)]
        query: Query,
    },
    /// Derived likeliness for every ordered pair of vertices
    Allpairs {
        /// Context file (`-` for stdin)
        #[arg(long)]
        context: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Spread evidence LABEL=GRADE through the graph
    Propagate {
        /// Context file (`-` for stdin)
        #[arg(long)]
        context: String,
        /// Evidence as LABEL=GRADE
        #[arg(long)]
        source: String,
        #[arg(long, value_enum, default_value_t)]
        mode: Mode,
        /// Debug only: take max (not min) of source and path grade
        #[arg(long, conflicts_with = "mode")]
        literal_max: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Compare scenario columns against the defaults
    Scenario {
        /// Context file (`-` for stdin); may also hold scenario blocks
        #[arg(long)]
        context: String,
        /// Additional file of scenario blocks
        #[arg(long)]
        scenarios: Option<String>,
        /// Columns to show, `default` for the unconditioned grades
        #[arg(long, value_delimiter = ',', required = true)]
        compare: Vec<String>,
        /// Rows to show (defaults to every vertex with a fact)
        #[arg(long, value_delimiter = ',')]
        rows: Vec<String>,
        #[arg(long, value_enum, default_value_t)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Probability to grade conversion, boundaries and aggregation capacity
    Scale {
        /// Probability to grade
        #[arg(long, group = "what")]
        prob: Option<f64>,
        /// Print the six cut points
        #[arg(long, group = "what")]
        boundaries: bool,
        /// Events of grade GRADE (1, 2 or 3) needed to reach the next grade
        #[arg(long, group = "what")]
        capacity: Option<u8>,
        /// With --capacity: treat events as independent instead of additive
        #[arg(long, requires = "capacity")]
        independent: bool,
        /// Base threshold probability (default 1e-9 or $LIKELIC_BASE)
        #[arg(long)]
        base: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run an activation script and print the learned context
    Learn {
        /// Context file (`-` for stdin)
        #[arg(long)]
        context: String,
        /// Activation script
        #[arg(long)]
        script: String,
    },
    /// Render the context as a Graphviz digraph
    ExportDot {
        /// Context file (`-` for stdin)
        #[arg(long)]
        context: String,
        /// File of `fact` lines used to label vertices
        #[arg(long)]
        valuation: Option<String>,
    },
    /// Grades of the four historical dice probabilities
    DemoDice {
        /// Base threshold probability (default 1e-9 or $LIKELIC_BASE)
        #[arg(long)]
        base: Option<f64>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn status(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
}

impl Io<'_> {
    fn read(&mut self, path: &str) -> Result<String, CliError> {
        if path == "-" {
            if self.stdin_used {
                return Err(CliError::Usage("stdin can only be read once".into()));
            }
            self.stdin_used = true;
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| CliError::Usage(format!("reading stdin: {e}")))?;
            Ok(s)
        } else {
            std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))
        }
    }

    fn document(&mut self, path: &str) -> Result<Document, CliError> {
        let text = self.read(path)?;
        parse_document(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))
    }
}

fn vertex(g: &ContextGraph, label: &str) -> Result<crate::graph::VertexId, CliError> {
    g.require(label).map_err(domain)
}

fn base_probability(flag: Option<f64>, env: Option<String>) -> Result<BoundarySet, CliError> {
    let base = match (flag, env) {
        (Some(b), _) => b,
        (None, Some(s)) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{BASE_ENV}={s} is not a number")))?,
        (None, None) => DEFAULT_BASE_PROBABILITY,
    };
    BoundarySet::new(base).map_err(|e| CliError::Usage(e.to_string()))
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn valuation_json(g: &ContextGraph, v: &Valuation) -> Value {
    let map: BTreeMap<&str, u8> = v.by_label(g).into_iter().map(|(k, l)| (k, l.grade())).collect();
    json!(map)
}

fn aligned(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}

/// The four dice probabilities from the de Méré and Pepys problems.
pub const DICE: [(&str, f64, &str); 4] = [
    ("de Méré A", 0.5177, "at least one 6 in four rolls of one die"),
    ("de Méré B", 0.4914, "at least one double-6 in 24 throws of two dice"),
    ("Pepys A", 0.6187, "at least two 6s when 12 dice are rolled"),
    ("Pepys B", 0.5973, "at least three 6s when 18 dice are rolled"),
];

fn execute(cmd: Command, io: &mut Io, env_base: Option<String>) -> Result<String, CliError> {
    match cmd {
        Command::Infer { query, format } => {
            let g = io.document(&query.context)?.graph;
            let (a, b) = (vertex(&g, &query.from)?, vertex(&g, &query.to)?);
            let d = derived_implication(&g, a, b).map_err(domain)?;
            Ok(match format {
                Format::Json => json_text(&json!({
                    "from": query.from,
                    "to": query.to,
                    "value": d.value.grade(),
                    "stored": d.stored,
                    "witness": d.witness.as_ref().map(|w| w.vertices.iter().map(|&v| g.label(v)).collect::<Vec<_>>()),
                })),
                Format::Text => {
                    let chain = d.witness.as_ref().map_or_else(|| "no path".to_string(), |w| w.render(&g));
                    format!("{}\n{}\n", d.value.describe(), chain)
                }
            })
        }
        Command::Explain { query } => {
            let g = io.document(&query.context)?.graph;
            let (a, b) = (vertex(&g, &query.from)?, vertex(&g, &query.to)?);
            let text = crate::inference::explain(&g, a, b).map_err(domain)?;
            Ok(format!("{text}\n"))
        }
        Command::Allpairs { context, format } => {
            let g = io.document(&context)?.graph;
            let m = all_pairs_derived(&g);
            let order = g.vertices_by_label();
            let labels: Vec<&str> = order.iter().map(|&v| g.label(v)).collect();
            let grid: Vec<Vec<u8>> = order
                .iter()
                .map(|&a| order.iter().map(|&b| m.get(a, b).grade()).collect())
                .collect();
            Ok(match format {
                Format::Json => json_text(&json!({ "labels": labels, "matrix": grid })),
                Format::Text => {
                    let width = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
                    let cell = labels.iter().map(|l| l.chars().count()).max().unwrap_or(1);
                    let mut out = format!("{:width$}", "");
                    for l in &labels {
                        out.push_str(&format!("  {l:>cell$}"));
                    }
                    out.push('\n');
                    for (l, row) in labels.iter().zip(&grid) {
                        out.push_str(&format!("{l:<width$}"));
                        for v in row {
                            out.push_str(&format!("  {v:>cell$}"));
                        }
                        out.push('\n');
                    }
                    out
                }
            })
        }
        Command::Propagate {
            context,
            source,
            mode,
            literal_max,
            format,
        } => {
            let g = io.document(&context)?.graph;
            let (label, grade) = source
                .rsplit_once('=')
                .ok_or_else(|| CliError::Usage(format!("--source expects LABEL=GRADE, got `{source}`")))?;
            let grade: i64 = grade
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--source grade `{grade}` is not an integer")))?;
            let grade = Likeliness::new(grade).map_err(|e| CliError::Usage(e.to_string()))?;
            let v = vertex(&g, label.trim())?;
            let (mode_name, values) = if literal_max {
                ("literal-max", propagate_literal_max(&g, v, grade).map_err(domain)?)
            } else {
                let mode = PropagationMode::from(mode);
                (mode.name(), propagate(&g, &Evidence::source(v, grade), mode).map_err(domain)?)
            };
            Ok(match format {
                Format::Json => json_text(&json!({
                    "mode": mode_name,
                    "source": label.trim(),
                    "value": grade.grade(),
                    "values": valuation_json(&g, &values),
                })),
                Format::Text => {
                    let rows: Vec<_> = values
                        .by_label(&g)
                        .into_iter()
                        .map(|(k, l)| (k.to_string(), l.describe()))
                        .collect();
                    aligned(&rows)
                }
            })
        }
        Command::Scenario {
            context,
            scenarios,
            compare,
            rows,
            mode,
            format,
        } => {
            let mut doc = io.document(&context)?;
            if let Some(path) = scenarios {
                let extra = io.document(&path)?;
                if !extra.graph.is_empty() {
                    return Err(CliError::Usage(format!("{path}: scenario files may only contain scenario blocks")));
                }
                doc.scenarios.extend(extra.scenarios);
            }
            let g = &doc.graph;
            let resolved: Vec<Scenario> = doc
                .scenarios
                .iter()
                .map(|d| Scenario::resolve(d, g))
                .collect::<Result<_, _>>()
                .map_err(domain)?;
            let row_ids = if rows.is_empty() {
                g.facts().by_label(g).keys().map(|l| g.require(l).expect("fact labels exist")).collect()
            } else {
                rows.iter().map(|r| vertex(g, r.trim())).collect::<Result<Vec<_>, _>>()?
            };
            // Only the requested columns are evaluated.
            let wanted: Vec<Scenario> = resolved
                .into_iter()
                .filter(|s| compare.iter().any(|c| c.trim() == s.name))
                .collect();
            let table = compare_scenarios(g, g.facts(), &wanted, &row_ids, mode.into()).map_err(domain)?;
            let names: Vec<&str> = compare.iter().map(|c| c.trim()).collect();
            let table = table.select(&names).map_err(domain)?;
            Ok(match format {
                Format::Json => json_text(&json!({
                    "columns": table.columns,
                    "rows": table.rows.iter().map(|(v, vals)| json!({
                        "label": g.label(*v),
                        "values": vals.iter().map(|c| c.map(|l| l.grade())).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                })),
                Format::Text => table.render(g),
            })
        }
        Command::Scale {
            prob,
            boundaries,
            capacity,
            independent,
            base,
            format,
        } => {
            let bounds = base_probability(base, env_base)?;
            if let Some(p) = prob {
                let l = bounds.grade_of(p).map_err(|e| CliError::Usage(e.to_string()))?;
                return Ok(match format {
                    Format::Json => json_text(&json!({ "probability": p, "grade": l.grade() })),
                    Format::Text => format!("{}\n", l.describe()),
                });
            }
            if boundaries {
                let cuts = bounds.cuts();
                return Ok(match format {
                    Format::Json => json_text(&json!({ "base_odds_db": bounds.base_odds_db(), "cuts": cuts })),
                    Format::Text => {
                        let rows: Vec<_> = cuts
                            .iter()
                            .enumerate()
                            .map(|(k, &c)| {
                                let lower = Likeliness::new(k as i64).expect("k < 6");
                                let upper = Likeliness::new(k as i64 + 1).expect("k < 6");
                                (
                                    format!("c{} {}/{}", k + 1, lower.name(), upper.name()),
                                    format!("{c:.10}  ({:+.2} dB)", crate::scale::log_odds_db(c)),
                                )
                            })
                            .collect();
                        aligned(&rows)
                    }
                });
            }
            if let Some(grade) = capacity {
                let from = Likeliness::new(grade as i64).map_err(|e| CliError::Usage(e.to_string()))?;
                let rule = if independent {
                    CapacityRule::Independent
                } else {
                    CapacityRule::Additive
                };
                let n = bounds.capacity(from, rule).map_err(|e| CliError::Usage(e.to_string()))?;
                return Ok(match format {
                    Format::Json => json_text(&json!({
                        "from": grade,
                        "rule": if independent { "independent" } else { "additive" },
                        "count": n,
                    })),
                    Format::Text => format!("{n}\n"),
                });
            }
            Err(CliError::Usage("scale needs one of --prob, --boundaries or --capacity".into()))
        }
        Command::Learn { context, script } => {
            let g = io.document(&context)?.graph;
            let text = io.read(&script)?;
            let (learned, _) = run_script(&g, &text).map_err(domain)?;
            Ok(serialize_context(&learned))
        }
        Command::ExportDot { context, valuation } => {
            let g = io.document(&context)?.graph;
            let val = match valuation {
                None => None,
                Some(path) => {
                    let facts = io.document(&path)?.graph;
                    let mut v = Valuation::new();
                    for (id, l) in facts.facts().iter() {
                        v.set(vertex(&g, facts.label(id))?, l);
                    }
                    Some(v)
                }
            };
            Ok(export_dot(&g, val.as_ref()))
        }
        Command::DemoDice { base } => {
            let bounds = base_probability(base, env_base)?;
            let mut out = String::new();
            for (name, p, what) in DICE {
                let l = bounds.grade_of(p).expect("constants are probabilities");
                out.push_str(&format!("{name}: p={p:.4} → l={} ({})  {what}\n", l.grade(), l.name()));
            }
            Ok(out)
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if status == 0 { stdout } else { stderr };
            let _ = sink.write_all(rendered.as_bytes());
            return status;
        }
    };
    let mut io = Io { stdin, stdin_used: false };
    match execute(cli.command, &mut io, std::env::var(BASE_ENV).ok()) {
        Ok(out) => match stdout.write_all(out.as_bytes()) {
            Ok(()) => 0,
            Err(_) => 1,
        },
        Err(e) => {
            let _ = writeln!(stderr, "likelic: {e}");
            e.status()
        }
    }
}
