use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use codo_core::mapping::{
    link_relationships, parse_mapping_rule, CaseTable, IngestConfig, Mapper, Naming,
};
use codo_core::query::{
    competency_suite, run_query, to_json_results, to_text_table, CompetencyParams,
};
use codo_core::reasoner::materialize;
use codo_core::schema::build_codo_vocabulary;
use codo_core::serialization::{
    parse_ntriples, parse_turtle, serialize_asserted, serialize_ntriples, serialize_turtle,
    ParseMode,
};
use codo_core::vocab::rdf;
use codo_core::{PrefixMap, Term};

use crate::server::{serve, Endpoint};
use crate::workspace::Workspace;

#[derive(Debug, Parser)]
#[command(
    name = "codo",
    version,
    about = "Build, reason over and query a COVID-19 case knowledge graph"
)]
pub struct Cli {
    /// Workspace directory holding the persisted graph.
    #[arg(long, global = true, env = "CODO_WS", default_value = "codo-ws")]
    pub workspace: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Add the triples of an N-Triples (.nt) or Turtle (.ttl) file.
    Load { file: PathBuf },
    /// Turn a case sheet into patient individuals using a transformation rule.
    Ingest {
        /// CSV case sheet with a header row.
        cases: PathBuf,
        /// Transformation rule file.
        #[arg(long)]
        rule: PathBuf,
        /// Individual naming: `padded` (p000001) or `hash` (FNV-1a of the case cell).
        #[arg(long, default_value = "padded")]
        naming: Naming,
        /// Keep age 0 and 1900-01-01 dates instead of treating them as missing.
        #[arg(long)]
        no_sentinel_filter: bool,
    },
    /// Materialize all inferences.
    Reason,
    /// Run a SPARQL SELECT query.
    Query {
        /// File containing the query.
        #[arg(required_unless_present = "expr", conflicts_with = "expr")]
        file: Option<PathBuf>,
        /// Query text given inline.
        #[arg(short = 'e', long = "expr")]
        expr: Option<String>,
        /// Print SPARQL JSON results instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Answer the competency questions.
    Suite {
        /// One JSON object per question instead of tables.
        #[arg(long)]
        json: bool,
        /// Place for question I (prefixed name or <IRI>).
        #[arg(long, default_value = "codo:Bangalore-Urban")]
        place: String,
        /// Cut-off date for question I.
        #[arg(long, default_value = "2020-07-01T00:00:00")]
        until: String,
        /// Patient for question III.
        #[arg(long, default_value = "codo:p000001")]
        patient: String,
    },
    /// Triple counts, class instance counts and property usage.
    Stats,
    /// Write the graph as canonical N-Triples.
    Export {
        out: PathBuf,
        /// Include inferred triples (the full closure).
        #[arg(long)]
        inferred: bool,
    },
    /// Write the built-in CODO vocabulary as Turtle (stdout without a path).
    Vocab { out: Option<PathBuf> },
    /// Serve the materialized graph over the SPARQL protocol.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Maximum number of queries evaluated at once.
        #[arg(long, default_value_t = 16)]
        max_concurrent: usize,
        /// Milliseconds a query may wait for a free slot before a 503.
        #[arg(long, default_value_t = 2000)]
        queue_timeout_ms: u64,
    },
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let dir = cli.workspace.as_path();
    match cli.command {
        Command::Load { file } => load(dir, &file, out),
        Command::Ingest {
            cases,
            rule,
            naming,
            no_sentinel_filter,
        } => {
            let config = IngestConfig {
                naming,
                sentinel_filter: !no_sentinel_filter,
                ..IngestConfig::default()
            };
            ingest(dir, &cases, &rule, config, out)
        }
        Command::Reason => reason(dir, out),
        Command::Query { file, expr, json } => {
            let text = match (file, expr) {
                (_, Some(text)) => text,
                (Some(path), None) => fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))?,
                (None, None) => bail!("give a query file or -e <text>"),
            };
            query(dir, &text, json, out)
        }
        Command::Suite {
            json,
            place,
            until,
            patient,
        } => {
            let prefixes = PrefixMap::default();
            let params = CompetencyParams {
                place: prefixes
                    .resolve(&place)
                    .with_context(|| format!("--place {place}"))?,
                until,
                patient: prefixes
                    .resolve(&patient)
                    .with_context(|| format!("--patient {patient}"))?,
            };
            suite(dir, &params, json, out)
        }
        Command::Stats => stats(dir, out),
        Command::Export {
            out: path,
            inferred,
        } => export(dir, &path, inferred, out),
        Command::Vocab { out: path } => {
            let text = serialize_turtle(&build_codo_vocabulary().graph);
            match path {
                Some(path) => {
                    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
                }
                None => out.write_all(text.as_bytes())?,
            }
            Ok(())
        }
        Command::Serve {
            port,
            host,
            max_concurrent,
            queue_timeout_ms,
        } => {
            let ws = Workspace::open(dir)?;
            if !ws.is_materialized() {
                bail!(
                    "workspace {} is not materialized; run `codo reason` first",
                    dir.display()
                );
            }
            if max_concurrent == 0 {
                bail!("--max-concurrent must be at least 1");
            }
            let endpoint = Endpoint::new(
                ws.graph,
                max_concurrent,
                Duration::from_millis(queue_timeout_ms),
            );
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(endpoint, SocketAddr::new(host, port), |addr| {
                let _ = writeln!(out, "listening on http://{addr}");
                let _ = out.flush();
            }))?;
            Ok(())
        }
    }
}

fn load(dir: &Path, file: &Path, out: &mut dyn Write) -> Result<()> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let mut ws = Workspace::open(dir)?;
    ws.invalidate();
    let report = match file.extension().and_then(|e| e.to_str()) {
        Some("nt") => parse_ntriples(&text, &mut ws.graph, ParseMode::Strict),
        Some("ttl") => parse_turtle(&text, &mut ws.graph),
        _ => bail!("{}: expected a .nt or .ttl file", file.display()),
    }
    .with_context(|| format!("parsing {}", file.display()))?;
    ws.save()?;
    writeln!(
        out,
        "loaded {} new triples from {} ({} total)",
        report.triple_count,
        file.display(),
        ws.graph.len()
    )?;
    Ok(())
}

fn ingest(
    dir: &Path,
    cases: &Path,
    rule: &Path,
    config: IngestConfig,
    out: &mut dyn Write,
) -> Result<()> {
    let rule_text =
        fs::read_to_string(rule).with_context(|| format!("reading {}", rule.display()))?;
    let rule =
        parse_mapping_rule(&rule_text).with_context(|| format!("parsing {}", rule.display()))?;
    let file = fs::File::open(cases).with_context(|| format!("opening {}", cases.display()))?;
    let table =
        CaseTable::from_csv(file).with_context(|| format!("reading {}", cases.display()))?;
    let mut ws = Workspace::open(dir)?;
    let axioms = ws.axioms()?.axioms;
    if axioms.classes.is_empty() {
        bail!("the workspace has no vocabulary; load one first (`codo vocab codo.ttl && codo load codo.ttl`)");
    }
    let mapper = Mapper::new(&rule, &ws.graph, &axioms, config.clone())?;
    ws.invalidate();
    let report = mapper.apply(&table, &mut ws.graph)?;
    let links = link_relationships(&table, &mut ws.graph, &config)?;
    ws.save()?;

    let mut log = report.to_json_lines();
    for entry in &links.log {
        log.push_str(&serde_json::to_string(entry)?);
        log.push('\n');
    }
    let log_path = ws.dir().join("ingest-skips.jsonl");
    fs::write(&log_path, log)?;
    writeln!(out, "{report}")?;
    writeln!(out, "{links}")?;
    writeln!(
        out,
        "skip log:            {} ({} entries)",
        log_path.display(),
        report.skip_log.len() + links.log.len()
    )?;
    Ok(())
}

fn reason(dir: &Path, out: &mut dyn Write) -> Result<()> {
    let mut ws = Workspace::open(dir)?;
    let axioms = ws.axioms()?;
    for warning in &axioms.warnings {
        eprintln!("warning: {warning}");
    }
    let report = materialize(&mut ws.graph, &axioms.axioms)?;
    ws.set_materialized();
    ws.save()?;
    writeln!(out, "asserted triples: {}", report.asserted_count)?;
    writeln!(out, "inferred triples: {}", report.inferred_count)?;
    writeln!(out, "iterations:       {}", report.iterations)?;
    let prefixes = PrefixMap::default();
    for (class, members) in &report.defined_class_memberships {
        writeln!(
            out,
            "{}: {}",
            prefixes.compact(class).unwrap_or_else(|| class.clone()),
            members.len()
        )?;
    }
    Ok(())
}

fn query(dir: &Path, text: &str, json: bool, out: &mut dyn Write) -> Result<()> {
    let ws = Workspace::open(dir)?;
    if !ws.is_materialized() {
        eprintln!("warning: workspace is not materialized; inferred facts are missing (run `codo reason`)");
    }
    let table = run_query(text, &ws.graph)?;
    if json {
        writeln!(out, "{}", to_json_results(&table))?;
    } else {
        write!(out, "{}", to_text_table(&table, &PrefixMap::default()))?;
    }
    Ok(())
}

fn suite(dir: &Path, params: &CompetencyParams, json: bool, out: &mut dyn Write) -> Result<()> {
    let ws = Workspace::open(dir)?;
    if !ws.is_materialized() {
        bail!(
            "workspace {} is not materialized; run `codo reason` first",
            dir.display()
        );
    }
    let axioms = ws.axioms()?.axioms;
    let answers = competency_suite(&ws.graph, &axioms, params)?;
    for a in &answers {
        if json {
            // The results object is embedded verbatim so it can be compared
            // byte for byte with the endpoint's response.
            writeln!(
                out,
                "{{\"id\":{},\"question\":{},\"results\":{}}}",
                serde_json::to_string(a.id)?,
                serde_json::to_string(&a.question)?,
                to_json_results(&a.table)
            )?;
        } else {
            writeln!(out, "== {}. {}", a.id, a.question)?;
            writeln!(out, "{}", a.query.trim_end())?;
            writeln!(out, "{}", to_text_table(&a.table, &PrefixMap::default()))?;
        }
    }
    Ok(())
}

fn stats(dir: &Path, out: &mut dyn Write) -> Result<()> {
    let ws = Workspace::open(dir)?;
    let g = &ws.graph;
    let prefixes = PrefixMap::default();
    let name = |t: &Term| match t {
        Term::Iri(i) => prefixes.compact(i).unwrap_or_else(|| format!("<{i}>")),
        other => other.to_string(),
    };
    let mut classes: BTreeMap<String, usize> = BTreeMap::new();
    let mut properties: BTreeMap<String, usize> = BTreeMap::new();
    let rdf_type = Term::iri(rdf::TYPE);
    for t in g.iter() {
        if t.predicate == rdf_type {
            *classes.entry(name(&t.object)).or_default() += 1;
        }
        *properties.entry(name(&t.predicate)).or_default() += 1;
    }
    writeln!(
        out,
        "triples: {} (asserted {}, inferred {})",
        g.len(),
        g.asserted_len(),
        g.inferred_len()
    )?;
    writeln!(
        out,
        "materialized: {}",
        if ws.is_materialized() { "yes" } else { "no" }
    )?;
    let width = classes
        .keys()
        .chain(properties.keys())
        .map(|k| k.chars().count())
        .max()
        .unwrap_or(0);
    writeln!(out, "classes:")?;
    for (class, n) in &classes {
        writeln!(out, "  {class:<width$}  {n}")?;
    }
    writeln!(out, "properties:")?;
    for (property, n) in &properties {
        writeln!(out, "  {property:<width$}  {n}")?;
    }
    Ok(())
}

fn export(dir: &Path, path: &Path, inferred: bool, out: &mut dyn Write) -> Result<()> {
    let ws = Workspace::open(dir)?;
    let text = if inferred {
        serialize_ntriples(&ws.graph)
    } else {
        serialize_asserted(&ws.graph)
    };
    fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    writeln!(
        out,
        "wrote {} triples to {}",
        text.lines().count(),
        path.display()
    )?;
    Ok(())
}
