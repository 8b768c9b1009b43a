//! `bayeshg` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use bayeshg::format::{detect_kind, parse_document_as, print_joint};
use bayeshg::oracle::MarkovReport;
use bayeshg::vertex::format_set;
use bayeshg::*;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bayeshg", version, about = "Directed acyclic hypergraphs and chain graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a file parses and describes a valid structure.
    Validate { file: PathBuf },
    /// List chain components.
    Components { file: PathBuf },
    /// Chain graph projection of a hypergraph.
    Shadow { file: PathBuf },
    /// Canonical hypergraph of a chain graph.
    Hypermoralize { file: PathBuf },
    /// Quotient by chain components.
    CanonicalDag { file: PathBuf },
    /// Global separation query.
    Separate {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        a: Vec<String>,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        b: Vec<String>,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        c: Vec<String>,
    },
    /// Pairwise or local Markov statements.
    Statements {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "pairwise")]
        kind: StatementKind,
    },
    /// Factor scopes per chain component.
    Scopes { file: PathBuf },
    /// Assemble the joint distribution.
    Factorize {
        file: PathBuf,
        #[command(flatten)]
        tables: Tables,
    },
    /// Force variables and print the redirected graph or the intervened joint.
    Intervene {
        file: PathBuf,
        /// `variable=state`, repeatable.
        #[arg(long = "do", value_name = "VAR=STATE", required = true)]
        assignments: Vec<String>,
        #[arg(long)]
        graph_only: bool,
        #[command(flatten)]
        tables: Tables,
    },
    /// Markov and factorization equivalence of two structures.
    Equivalent {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        targets: Option<Vec<String>>,
    },
    /// Check every separation statement against the assembled joint.
    CiCheck {
        file: PathBuf,
        #[command(flatten)]
        tables: Tables,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(clap::Args, Debug)]
struct Tables {
    /// JSON document with a `domains` object; defaults to the one in the factor file.
    #[arg(long)]
    domains: Option<PathBuf>,
    #[arg(long)]
    factors: Option<PathBuf>,
    /// Exact rational arithmetic.
    #[arg(long)]
    exact: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum StatementKind {
    Pairwise,
    Local,
}

enum Failure {
    Usage(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = std::result::Result<i32, Failure>;

enum Model {
    Dah(Dah),
    Cg(ChainGraph),
}

impl Model {
    fn vertices(&self) -> &VertexSet {
        match self {
            Model::Dah(h) => h.vertices(),
            Model::Cg(g) => g.vertices(),
        }
    }

    fn as_dah(&self) -> Dah {
        match self {
            Model::Dah(h) => h.clone(),
            Model::Cg(g) => hypermoralize(g),
        }
    }
}

fn kind_of(path: &Path, text: &str) -> DocumentKind {
    match path.extension().and_then(|e| e.to_str()) {
        Some("dah") => DocumentKind::Dah,
        Some("cg") => DocumentKind::ChainGraph,
        Some("json") => DocumentKind::Factors,
        Some("do") => DocumentKind::Intervention,
        _ => detect_kind(text),
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: Error) -> Failure {
    match e {
        Error::Parse { line, column, message } => {
            Failure::Usage(format!("{}:{line}:{column}: {message}", path.display()))
        }
        e => Failure::Input(e),
    }
}

fn load(path: &Path) -> std::result::Result<Document, Failure> {
    let text = read(path)?;
    parse_document_as(&text, kind_of(path, &text)).map_err(|e| located(path, e))
}

fn load_model(path: &Path) -> std::result::Result<Model, Failure> {
    match load(path)? {
        Document::Dah(h) => Ok(Model::Dah(h)),
        Document::ChainGraph(g) => Ok(Model::Cg(g)),
        _ => Err(Failure::Usage(format!("{}: expected a hypergraph or chain graph", path.display()))),
    }
}

fn load_dah(path: &Path) -> std::result::Result<Dah, Failure> {
    match load_model(path)? {
        Model::Dah(h) => Ok(h),
        Model::Cg(_) => Err(Failure::Usage(format!("{}: expected a hypergraph", path.display()))),
    }
}

fn load_cg(path: &Path) -> std::result::Result<ChainGraph, Failure> {
    match load_model(path)? {
        Model::Cg(g) => Ok(g),
        Model::Dah(_) => Err(Failure::Usage(format!("{}: expected a chain graph", path.display()))),
    }
}

fn vertex_list(values: &[String]) -> std::result::Result<VertexSet, Failure> {
    values
        .iter()
        .flat_map(|v| v.split_whitespace())
        .map(|v| VertexId::new(v).map_err(|e| Failure::Usage(e.to_string())))
        .collect()
}

fn load_tables(tables: &Tables) -> std::result::Result<(Domains, FactorDocument), Failure> {
    let factors = tables
        .factors
        .as_ref()
        .ok_or_else(|| Failure::Usage("--factors is required".into()))?;
    let doc = match load(factors)? {
        Document::Factors(doc) => doc,
        _ => return Err(Failure::Usage(format!("{}: expected a JSON factor document", factors.display()))),
    };
    let domains = match &tables.domains {
        Some(path) => match load(path)? {
            Document::Factors(FactorDocument { domains: Some(d), .. }) => d,
            _ => return Err(Failure::Usage(format!("{}: missing `domains` object", path.display()))),
        },
        None => doc
            .domains
            .clone()
            .ok_or_else(|| Failure::Usage("no domains: pass --domains or include them in the factor file".into()))?,
    };
    Ok((domains, doc))
}

fn joint<T: Scalar>(
    model: &Model,
    domains: &Domains,
    doc: &FactorDocument,
    spec: Option<&InterventionSpec>,
) -> Result<String> {
    let fa: FactorAssignment<T> = doc.assignment(domains)?;
    if !doc.complement.is_empty() && matches!(model, Model::Cg(_)) {
        return Err(Error::InvalidFactor {
            scope: doc.complement.iter().map(|r| r.child.clone()).collect(),
            reason: "complement rules apply to hypergraphs only".into(),
        });
    }
    let j = match (model, spec) {
        (Model::Dah(h), None) => assemble_joint_with(h, domains, &fa, &doc.complement)?,
        (Model::Cg(g), None) => cg_assemble_joint(g, domains, &fa)?,
        (Model::Dah(h), Some(s)) => intervened_joint_with(h, domains, &fa, &doc.complement, s)?,
        (Model::Cg(g), Some(s)) => cg_intervened_joint(g, domains, &fa, s)?,
    };
    print_joint(&j, domains)
}

fn spec_from(assignments: &[String]) -> std::result::Result<InterventionSpec, Failure> {
    let mut spec = InterventionSpec::new();
    for a in assignments {
        let (var, state) = a
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("`{a}`: expected VAR=STATE")))?;
        let var = VertexId::new(var.trim()).map_err(|e| Failure::Usage(e.to_string()))?;
        if spec.values.insert(var.clone(), state.trim().to_string()).is_some() {
            return Err(Failure::Usage(format!("`{var}` forced twice")));
        }
    }
    Ok(spec)
}

fn execute(cmd: Command, out: &mut dyn Write) -> Outcome {
    let mut emit = |s: &str| {
        let _ = out.write_all(s.as_bytes());
    };
    match cmd {
        Command::Validate { file } => {
            let summary = match load(&file)? {
                Document::Dah(h) => format!(
                    "valid hypergraph: {} vertices, {} edges, {} components\n",
                    h.vertices().len(),
                    h.edges().len(),
                    h.chain_components().len()
                ),
                Document::ChainGraph(g) => format!(
                    "valid chain graph: {} vertices, {} arcs, {} lines, {} components\n",
                    g.vertices().len(),
                    g.directed().len(),
                    g.undirected().len(),
                    g.chain_components().len()
                ),
                Document::Factors(doc) => {
                    if let Some(d) = &doc.domains {
                        let _: FactorAssignment = doc.assignment(d)?;
                    }
                    format!(
                        "valid factor document: {} domains, {} factors\n",
                        doc.domains.as_ref().map_or(0, |d| d.variables().count()),
                        doc.factors.len()
                    )
                }
                Document::Intervention(s) => format!("valid intervention: {} targets\n", s.values.len()),
                Document::Report(_) => "valid report\n".to_string(),
            };
            emit(&summary);
        }
        Command::Components { file } => {
            let parts = match load_model(&file)? {
                Model::Dah(h) => h.chain_components(),
                Model::Cg(g) => g.chain_components(),
            };
            for c in &parts.components {
                emit(&format!("{}\n", format_set(c)));
            }
        }
        Command::Shadow { file } => emit(&print_chain_graph(&shadow(&load_dah(&file)?)?)),
        Command::Hypermoralize { file } => emit(&print_dah(&hypermoralize(&load_cg(&file)?))),
        Command::CanonicalDag { file } => {
            let dag = match load_model(&file)? {
                Model::Dah(h) => h.canonical_dag(),
                Model::Cg(g) => g.canonical_dag(),
            };
            for c in &dag.components {
                emit(&format!("component: {}\n", format_set(c)));
            }
            for (s, t) in dag.arc_sets() {
                emit(&format!("arc: {} -> {}\n", format_set(&s), format_set(&t)));
            }
        }
        Command::Separate { file, a, b, c } => {
            let (a, b, c) = (vertex_list(&a)?, vertex_list(&b)?, vertex_list(&c)?);
            let answer = match load_model(&file)? {
                Model::Dah(h) => hg_separates(&h, &a, &b, &c)?,
                Model::Cg(g) => cg_global_separates(&g, &a, &b, &c)?,
            };
            emit(&format!("separated: {answer}\n"));
        }
        Command::Statements { file, kind } => {
            let h = load_model(&file)?.as_dah();
            let list = match kind {
                StatementKind::Pairwise => pairwise_statements(&h)?,
                StatementKind::Local => local_statements(&h)?,
            };
            for s in list {
                emit(&format!("{s}\n"));
            }
        }
        Command::Scopes { file } => {
            let scopes = match load_model(&file)? {
                Model::Dah(h) => factor_scopes(&h),
                Model::Cg(g) => cg_factor_scopes(&g),
            };
            for (comp, list) in scopes {
                let items: Vec<String> = list.iter().map(format_set).collect();
                emit(&format!("{}: {}\n", format_set(&comp), items.join(" ")));
            }
        }
        Command::Factorize { file, tables } => {
            let model = load_model(&file)?;
            let (domains, doc) = load_tables(&tables)?;
            let text = if tables.exact {
                joint::<BigRational>(&model, &domains, &doc, None)?
            } else {
                joint::<f64>(&model, &domains, &doc, None)?
            };
            emit(&text);
        }
        Command::Intervene {
            file,
            assignments,
            graph_only,
            tables,
        } => {
            let model = load_model(&file)?;
            let spec = spec_from(&assignments)?;
            if graph_only {
                let targets = spec.targets();
                match &model {
                    Model::Dah(h) => emit(&print_dah(&dah_redirect(h, &targets)?)),
                    Model::Cg(g) => emit(&print_chain_graph(&cg_redirect(g, &targets)?)),
                }
            } else {
                let (domains, doc) = load_tables(&tables)?;
                let text = if tables.exact {
                    joint::<BigRational>(&model, &domains, &doc, Some(&spec))?
                } else {
                    joint::<f64>(&model, &domains, &doc, Some(&spec))?
                };
                emit(&text);
            }
        }
        Command::Equivalent { first, second, targets } => {
            let (m1, m2) = (load_model(&first)?, load_model(&second)?);
            if m1.vertices() != m2.vertices() {
                return Err(Error::VertexSetMismatch.into());
            }
            let t = vertex_list(&targets.clone().unwrap_or_default())?;
            if targets.is_none() {
                emit(&format!("markov-equivalent: {}\n", markov_equivalent(&m1.as_dah(), &m2.as_dah())?));
            }
            let factorization = match (&m1, &m2) {
                (Model::Cg(g1), Model::Cg(g2)) => factorization_equivalent_cg(g1, &t, g2, &t)?,
                _ => factorization_equivalent_dah(&m1.as_dah(), &t, &m2.as_dah(), &t)?,
            };
            emit(&format!("factorization-equivalent: {factorization}\n"));
        }
        Command::CiCheck {
            file,
            tables,
            tolerance,
            json,
        } => {
            let h = load_model(&file)?.as_dah();
            let (domains, doc) = load_tables(&tables)?;
            let report: MarkovReport = if tables.exact {
                let fa: FactorAssignment<BigRational> = doc.assignment(&domains)?;
                verify_global_markov(&h, &assemble_joint_with(&h, &domains, &fa, &doc.complement)?, tolerance)?
            } else {
                let fa: FactorAssignment = doc.assignment(&domains)?;
                verify_global_markov(&h, &assemble_joint_with(&h, &domains, &fa, &doc.complement)?, tolerance)?
            };
            if json {
                let mut s = serde_json::to_string_pretty(&report).expect("reports serialize");
                s.push('\n');
                emit(&s);
            } else {
                emit(&report.to_string());
            }
            return Ok(if report.is_clean() { 0 } else { 1 });
        }
    }
    Ok(0)
}

/// Runs the command line `args` (program name first) and returns the exit code:
/// 0 on success, 1 when the input describes an invalid structure or a check fails,
/// 2 on usage and syntax errors.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                2
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Input(e)) if e.is_syntax() => {
            let _ = writeln!(err, "error: {e}");
            2
        }
        Err(Failure::Input(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
