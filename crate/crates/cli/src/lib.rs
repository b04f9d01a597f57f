//! Command-line surface of qdesign. `run` is the whole program; the binary
//! only forwards the process arguments and exit code.
//!
//! Exit codes: 0 pass or found, 1 fail or exhausted, 2 usage or schema
//! error, 3 budget exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qdesign::admissible::{
    admissible_counts, admissible_graph_table, cycle_admissible, path_admissible, steiner_admissible,
    steiner_family_sizes, Admissibility,
};
use qdesign::catalog::{self, CatalogEntry, CatalogError, Certificate};
use qdesign::json::to_pretty;
use qdesign::search::{run_spec, SearchError, SearchSpec, Status};
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Parser)]
#[command(name = "qdesign", version, about = "Designs, difference families and graceful labelings over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads for search.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Reserved; searches use a fixed order. Echoed in search output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the main output here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Source {
    /// Catalog entry id.
    #[arg(long, conflicts_with = "input")]
    catalog: Option<String>,
    /// Entry file in catalog format.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Re-verify a catalog entry or an entry file and print its certificate.
    Verify {
        #[command(flatten)]
        source: Source,
        /// Verify every catalog entry.
        #[arg(long, conflicts_with_all = ["catalog", "input"])]
        all: bool,
    },
    /// Run a search spec.
    Search {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        budget_nodes: Option<u64>,
        #[arg(long)]
        budget_seconds: Option<f64>,
        /// Print the verified witness as a catalog entry.
        #[arg(long)]
        emit_certificate: bool,
    },
    /// Necessary conditions for a design over F_q.
    Admissible {
        #[arg(long)]
        v: u32,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value_t = 1)]
        lambda: u64,
        /// Steiner 2-(v,k,1)_q congruences.
        #[arg(long)]
        steiner: bool,
        /// Blocks are k-cycles on the points of a subspace.
        #[arg(long)]
        cycle: bool,
        /// Blocks are paths.
        #[arg(long)]
        path: bool,
        /// Graph order, size and degree gcd for the general conditions.
        #[arg(long)]
        order: Option<u64>,
        #[arg(long)]
        size: Option<u64>,
        #[arg(long)]
        degree_gcd: Option<u64>,
        /// List admissible (order, size) pairs of connected graphs.
        #[arg(long)]
        table: bool,
    },
    /// Family and initial-block counts of a (v,k,1)_q difference family.
    Sizes {
        #[arg(long)]
        v: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        q: u64,
    },
    /// Inspect the embedded catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Develop a family entry and check pair coverage of the design.
    Develop {
        #[command(flatten)]
        source: Source,
        /// Materialize translates even above the default limit.
        #[arg(long)]
        force: bool,
    },
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    List,
    Show { id: String },
    /// Write every entry as <id>.json into the --output directory.
    Export,
}

/// Failure carrying its exit code.
struct Exit(i32, anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Exit {
    fn from(e: E) -> Self {
        Exit(EXIT_USAGE, e.into())
    }
}

fn catalog_exit(e: CatalogError) -> Exit {
    match e {
        CatalogError::Inconclusive { .. } => Exit(EXIT_BUDGET, e.into()),
        other => Exit(EXIT_USAGE, other.into()),
    }
}

struct Ctx<'a> {
    format: Format,
    output: Option<PathBuf>,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn emit(&mut self, text: &str) -> Result<(), Exit> {
        match &self.output {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
            None => self.out.write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn emit_json<T: Serialize>(&mut self, v: &T) -> Result<(), Exit> {
        let s = to_pretty(v)?;
        self.emit(&s)
    }

    fn note(&mut self, msg: &str) {
        let _ = writeln!(self.err, "{msg}");
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut ctx = Ctx { format: cli.format, output: cli.output.clone(), out, err };
    match dispatch(&cli, &mut ctx) {
        Ok(code) => code,
        Err(Exit(code, e)) => {
            ctx.note(&format!("error: {e:#}"));
            code
        }
    }
}

fn dispatch(cli: &Cli, ctx: &mut Ctx) -> Result<i32, Exit> {
    match &cli.command {
        Command::Verify { source, all } => verify(source, *all, ctx),
        Command::Search { input, budget_nodes, budget_seconds, emit_certificate } => {
            search(input, *budget_nodes, *budget_seconds, *emit_certificate, cli.jobs, cli.seed, ctx)
        }
        Command::Admissible { v, q, k, lambda, steiner, cycle, path, order, size, degree_gcd, table } => {
            let a = AdmissibleArgs {
                v: *v,
                q: *q,
                k: *k,
                lambda: *lambda,
                steiner: *steiner,
                cycle: *cycle,
                path: *path,
                order: *order,
                size: *size,
                degree_gcd: *degree_gcd,
                table: *table,
            };
            admissible(&a, ctx)
        }
        Command::Sizes { v, k, q } => sizes(*v, *k, *q, ctx),
        Command::Catalog { action } => catalog_cmd(action, ctx),
        Command::Develop { source, force } => develop(source, *force, ctx),
    }
}

fn load_source(source: &Source) -> Result<CatalogEntry, Exit> {
    match (&source.catalog, &source.input) {
        (Some(id), None) => catalog::load_entry(id).map_err(catalog_exit),
        (None, Some(path)) => read_entry_file(path),
        _ => Err(Exit(EXIT_USAGE, anyhow!("give --catalog <id> or --input <file>"))),
    }
}

fn read_entry_file(path: &Path) -> Result<CatalogEntry, Exit> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let probe: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let id = probe.get("id").and_then(Value::as_str).unwrap_or("").to_string();
    catalog::parse_entry(&id, &text).map_err(catalog_exit)
}

fn certificate_tsv(certs: &[Certificate]) -> String {
    let mut s = String::from("entry\tcheck\tverdict\texpected\tconfirmed\n");
    for c in certs {
        for ch in &c.checks {
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                c.entry,
                ch.name,
                verdict_str(ch.verdict),
                verdict_str(ch.expected),
                ch.verdict == ch.expected
            ));
        }
    }
    s
}

fn verdict_str(v: qdesign::verify::Verdict) -> &'static str {
    if v.is_pass() {
        "pass"
    } else {
        "fail"
    }
}

fn verify(source: &Source, all: bool, ctx: &mut Ctx) -> Result<i32, Exit> {
    let certs: Vec<Certificate> = if all {
        let ids = catalog::list_entries().map_err(catalog_exit)?;
        ids.iter().map(|id| catalog::verify_entry(id)).collect::<Result<_, _>>().map_err(catalog_exit)?
    } else {
        vec![catalog::verify_loaded(&load_source(source)?).map_err(catalog_exit)?]
    };
    match (ctx.format, all) {
        (Format::Tsv, _) => ctx.emit(&certificate_tsv(&certs))?,
        (Format::Json, true) => ctx.emit_json(&certs)?,
        (Format::Json, false) => ctx.emit_json(&certs[0])?,
    }
    for c in certs.iter().filter(|c| !c.confirmed) {
        ctx.note(&format!("{}: not confirmed", c.entry));
    }
    Ok(if certs.iter().all(|c| c.confirmed) { EXIT_PASS } else { EXIT_FAIL })
}

fn search(
    input: &Path,
    nodes: Option<u64>,
    seconds: Option<f64>,
    emit_certificate: bool,
    jobs: usize,
    seed: u64,
    ctx: &mut Ctx,
) -> Result<i32, Exit> {
    let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let mut spec: SearchSpec = serde_json::from_str(&text).with_context(|| format!("parsing {}", input.display()))?;
    let mut budget = spec.budget.unwrap_or_default();
    if let Some(n) = nodes {
        budget.nodes = n;
    }
    if let Some(s) = seconds {
        budget.seconds = s;
    }
    spec.budget = Some(budget);
    if seed != 0 {
        spec.seed = seed;
    }
    let result = run_spec(&spec, jobs).map_err(|e| match e {
        SearchError::InfeasibleCount(_) | SearchError::BadSpec(_) => Exit(EXIT_USAGE, e.into()),
    })?;
    let entry = match &result.witness {
        Some(w) => Some(catalog::entry_from_search("search-witness", &spec, w).map_err(catalog_exit)?),
        None => None,
    };
    if let Some(e) = &entry {
        let cert = catalog::verify_loaded(e).map_err(catalog_exit)?;
        if !cert.confirmed {
            return Err(Exit(EXIT_FAIL, anyhow!("search witness failed re-verification")));
        }
    }
    let code = match result.status {
        Status::Found => EXIT_PASS,
        Status::Exhausted => EXIT_FAIL,
        Status::BudgetExceeded => EXIT_BUDGET,
    };
    match (&entry, emit_certificate, ctx.format) {
        (Some(e), true, _) => {
            let text = catalog::serialize_entry(e);
            ctx.emit(&text)?;
        }
        (_, _, Format::Tsv) => {
            let witness = entry.as_ref().map(|e| serde_json::to_string(&e.construction)).transpose()?;
            ctx.emit(&format!(
                "status\tnodes_explored\tseed\twitness\n{}\t{}\t{}\t{}\n",
                json!(result.status).as_str().unwrap_or(""),
                result.nodes_explored,
                spec.seed,
                witness.unwrap_or_default()
            ))?;
        }
        _ => {
            let v = json!({
                "schema": "qdesign-search/1",
                "status": result.status,
                "nodes_explored": result.nodes_explored,
                "seed": spec.seed,
                "witness": entry.as_ref().map(|e| json!(e.construction)),
            });
            ctx.emit_json(&v)?;
        }
    }
    Ok(code)
}

struct AdmissibleArgs {
    v: u32,
    q: u64,
    k: Option<u32>,
    lambda: u64,
    steiner: bool,
    cycle: bool,
    path: bool,
    order: Option<u64>,
    size: Option<u64>,
    degree_gcd: Option<u64>,
    table: bool,
}

fn admissible(a: &AdmissibleArgs, ctx: &mut Ctx) -> Result<i32, Exit> {
    if a.v < 2 || a.q < 2 {
        return Err(Exit(EXIT_USAGE, anyhow!("need v >= 2 and q >= 2")));
    }
    if a.table {
        let rows = admissible_graph_table(a.v, a.q, a.lambda);
        match ctx.format {
            Format::Json => ctx.emit_json(&rows)?,
            Format::Tsv => {
                let mut s = String::from("order\tsizes\tregular\n");
                for r in &rows {
                    let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
                    s.push_str(&format!("{}\t{}\t{}\n", r.order, join(&r.sizes), join(&r.regular)));
                }
                ctx.emit(&s)?;
            }
        }
        return Ok(EXIT_PASS);
    }
    let k = || a.k.ok_or_else(|| Exit(EXIT_USAGE, anyhow!("--k is required")));
    let res: Admissibility = match (a.steiner, a.cycle, a.path) {
        (true, false, false) => steiner_admissible(a.v, k()?, a.q),
        (false, true, false) => cycle_admissible(a.v, k()?, a.q),
        (false, false, true) => path_admissible(a.v, k()?, a.q),
        (false, false, false) => match (a.order, a.size, a.degree_gcd) {
            (Some(o), Some(s), Some(g)) => admissible_counts(a.v, a.q, a.lambda, o, s, g),
            _ => {
                return Err(Exit(
                    EXIT_USAGE,
                    anyhow!("give --steiner, --cycle, --path, --table or all of --order --size --degree-gcd"),
                ))
            }
        },
        _ => return Err(Exit(EXIT_USAGE, anyhow!("--steiner, --cycle and --path exclude each other"))),
    };
    let word = if res.admissible { "admissible" } else { "not admissible" };
    match ctx.format {
        Format::Json => ctx.emit_json(&json!({
            "verdict": word,
            "admissible": res.admissible,
            "conditions": res.conditions,
        }))?,
        Format::Tsv => {
            let mut s = format!("{word}\n");
            for c in &res.conditions {
                s.push_str(&format!("{}\t{}\t{}\n", c.name, c.holds, c.detail));
            }
            ctx.emit(&s)?;
        }
    }
    Ok(if res.admissible { EXIT_PASS } else { EXIT_FAIL })
}

fn sizes(v: u32, k: u32, q: u64, ctx: &mut Ctx) -> Result<i32, Exit> {
    match steiner_family_sizes(v, k, q) {
        Err(e) => {
            ctx.note(&e.to_string());
            Ok(EXIT_FAIL)
        }
        Ok(s) => {
            let f = s.family_size.to_string();
            let i = s.initial_size.map(|x| x.to_string());
            match ctx.format {
                Format::Json => ctx.emit_json(&json!({
                    "v": v, "k": k, "q": q, "family_size": f, "initial_size": i,
                }))?,
                Format::Tsv => ctx.emit(&format!(
                    "v\tk\tq\tfamily_size\tinitial_size\n{v}\t{k}\t{q}\t{f}\t{}\n",
                    i.unwrap_or_else(|| "-".into())
                ))?,
            }
            Ok(EXIT_PASS)
        }
    }
}

fn catalog_cmd(action: &CatalogAction, ctx: &mut Ctx) -> Result<i32, Exit> {
    match action {
        CatalogAction::List => {
            let ids = catalog::list_entries().map_err(catalog_exit)?;
            match ctx.format {
                Format::Json => ctx.emit_json(&ids)?,
                Format::Tsv => ctx.emit(&ids.iter().map(|i| format!("{i}\n")).collect::<String>())?,
            }
        }
        CatalogAction::Show { id } => {
            let raw = catalog::raw_entry(id).map_err(catalog_exit)?;
            catalog::parse_entry(id, &raw).map_err(catalog_exit)?;
            ctx.emit(&raw)?;
        }
        CatalogAction::Export => {
            let dir = ctx.output.clone().ok_or_else(|| Exit(EXIT_USAGE, anyhow!("export needs --output <dir>")))?;
            let written = catalog::export(&dir).map_err(catalog_exit)?;
            let _ = writeln!(ctx.out, "{} entries written to {}", written.len(), dir.display());
        }
    }
    Ok(EXIT_PASS)
}

fn develop(source: &Source, force: bool, ctx: &mut Ctx) -> Result<i32, Exit> {
    let entry = load_source(source)?;
    let r = catalog::design_report(&entry, force).map_err(catalog_exit)?;
    match ctx.format {
        Format::Json => ctx.emit_json(&r)?,
        Format::Tsv => ctx.emit(&format!(
            "entry\tverdict\tblocks\tmaterialized\tpair_violations\n{}\t{}\t{}\t{}\t{}\n",
            r.entry,
            verdict_str(r.verdict),
            r.blocks,
            r.materialized,
            r.pair_violation_count
        ))?,
    }
    Ok(if r.verdict.is_pass() { EXIT_PASS } else { EXIT_FAIL })
}
