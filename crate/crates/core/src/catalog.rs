//! Embedded corpus of explicit constructions with their expected verdicts.
//!
//! Each entry names the checks to run and the verdict each should give.
//! Negative results are stored the same way, with `fail` expectations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::field::FieldDescriptor;
use crate::graph::{difference_list, expand_frobenius_seed, AbstractGraph, GraphSpec, LabeledGraph, LogMap, Rotation};
use crate::search::{search_graceful, search_nested_set, GracefulSpec, SearchOptions, SearchResult, SearchSpec, Status, Target, Witness};
use crate::singer::{SingerContext, SubspaceCheck};
use crate::verify::{
    check_evenly_distributed, check_nested_difference_set, complete_with_cycle_systems, develop,
    difference_set_coverage, expand_initial_blocks, verify_design, verify_family, verify_graceful_labeling,
    verify_near_resolvable, FamilyCandidate, InitialBlocks, RelativeSubgroup, Verdict, Violation,
};

pub const ENTRY_SCHEMA: &str = "qdesign-entry/1";
pub const CERTIFICATE_SCHEMA: &str = "qdesign-certificate/1";
pub const CATALOG_DIR_ENV: &str = "QDESIGN_CATALOG_DIR";

const VIOLATION_LIMIT: usize = 32;

macro_rules! embedded {
    ($($id:literal),* $(,)?) => {
        const EMBEDDED: &[(&str, &str)] = &[$(($id, include_str!(concat!("../catalog/", $id, ".json")))),*];
    };
}

embedded!(
    "q3star-7-q2",
    "steiner-13-3-1-q2",
    "cycle-7-C3-q2",
    "cycle-6-C3-q2-relative",
    "cycle-9-C3-q2-initial",
    "path-5-P3-q3",
    "paley-19-prism3",
    "nested-31-6-in-15",
    "singer-C7-15",
    "singer-C15-31",
    "singer-C31-63",
    "singer-C63-127-seed",
    "prism40-121-q3",
    "petersen-20-2-q3",
    "petersen-20-3-q3",
    "petersen-20-4-q3",
    "petersen-20-5-q3",
    "petersen-20-6-q3",
    "petersen-20-7-q3",
    "petersen-20-8-q3",
    "petersen-20-9-q3",
    "moebius40-121-q3-seed",
    "nonline-cliques-31",
    "improper-7-prism3-N1-q2",
    "cliqueunion-15-not-D-graceful",
    "k7-not-z43-graceful",
);

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry {0}")]
    UnknownId(String),
    #[error("corrupt catalog entry {id}: {reason}")]
    CorruptEntry { id: String, reason: String },
    #[error("check {check} of {id} was inconclusive: {reason}")]
    Inconclusive { id: String, check: String, reason: String },
    #[error("catalog directory {path}: {reason}")]
    Io { path: PathBuf, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogSpec {
    pub r: u32,
    pub classes: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Construction {
    /// Blocks as vertex labels, one list per block.
    Family {
        graph: GraphSpec,
        blocks: Vec<Vec<u32>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        relative: Option<u32>,
    },
    /// Initial blocks whose orbits under x -> multiplier x form the family.
    InitialBlocks {
        graph: GraphSpec,
        blocks: Vec<Vec<u32>>,
        multiplier: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        relative: Option<u32>,
        /// Per block, the two points spanning it together with 0.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generators: Option<Vec<[u32; 2]>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        log: Option<LogSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        improper_degree: Option<u32>,
    },
    /// A labeling given outright or as a seed with a rotation.
    GracefulLabeling {
        graph: GraphSpec,
        set: Vec<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<u32>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<Vec<[u32; 2]>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rotation: Option<Rotation>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        multiplier: Option<u32>,
    },
    NestedSet {
        set: Vec<u32>,
        k: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subset: Option<Vec<u32>>,
        /// λ of the outer set when it is itself a difference set.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        set_lambda: Option<u32>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub schema: String,
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDescriptor>,
    pub modulus: u32,
    pub lambda: u32,
    pub construction: Construction,
    /// Check name to expected verdict.
    pub expected: BTreeMap<String, Verdict>,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub verdict: Verdict,
    pub expected: Verdict,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub schema: String,
    pub entry: String,
    /// Pass when every check passes.
    pub verdict: Verdict,
    /// Pass when every check is expected to pass.
    pub expected: Verdict,
    /// Every check gave its expected verdict.
    pub confirmed: bool,
    pub lambda: u32,
    pub checks: Vec<CheckResult>,
    pub violations: Vec<Violation>,
    pub timing_ms: u64,
}

fn corrupt(id: &str, reason: impl ToString) -> CatalogError {
    CatalogError::CorruptEntry { id: id.to_string(), reason: reason.to_string() }
}

fn override_dir() -> Option<PathBuf> {
    std::env::var_os(CATALOG_DIR_ENV).filter(|s| !s.is_empty()).map(PathBuf::from)
}

fn dir_ids(dir: &Path) -> Result<Vec<String>, CatalogError> {
    let io = |e: std::io::Error| CatalogError::Io { path: dir.to_path_buf(), reason: e.to_string() };
    let mut ids = Vec::new();
    for item in std::fs::read_dir(dir).map_err(io)? {
        let p = item.map_err(io)?.path();
        if p.extension().is_some_and(|e| e == "json") {
            if let Some(stem) = p.file_stem().and_then(|s| s.to_str()) {
                ids.push(stem.to_string());
            }
        }
    }
    ids.sort();
    Ok(ids)
}

/// Ids in catalog order; a directory named by QDESIGN_CATALOG_DIR replaces
/// the embedded records.
pub fn list_entries() -> Result<Vec<String>, CatalogError> {
    match override_dir() {
        Some(dir) => dir_ids(&dir),
        None => Ok(EMBEDDED.iter().map(|(id, _)| id.to_string()).collect()),
    }
}

/// The stored record, byte for byte.
pub fn raw_entry(id: &str) -> Result<String, CatalogError> {
    match override_dir() {
        Some(dir) => {
            let path = dir.join(format!("{id}.json"));
            if !path.is_file() {
                return Err(CatalogError::UnknownId(id.to_string()));
            }
            std::fs::read_to_string(&path).map_err(|e| CatalogError::Io { path, reason: e.to_string() })
        }
        None => EMBEDDED
            .iter()
            .find(|(i, _)| *i == id)
            .map(|(_, s)| s.to_string())
            .ok_or_else(|| CatalogError::UnknownId(id.to_string())),
    }
}

pub fn parse_entry(id: &str, text: &str) -> Result<CatalogEntry, CatalogError> {
    let e: CatalogEntry = serde_json::from_str(text).map_err(|err| corrupt(id, err))?;
    if e.schema != ENTRY_SCHEMA {
        return Err(corrupt(id, format!("schema {} is not {ENTRY_SCHEMA}", e.schema)));
    }
    if e.id != id {
        return Err(corrupt(id, format!("record names itself {}", e.id)));
    }
    if e.expected.is_empty() {
        return Err(corrupt(id, "no checks listed"));
    }
    Ok(e)
}

pub fn load_entry(id: &str) -> Result<CatalogEntry, CatalogError> {
    parse_entry(id, &raw_entry(id)?)
}

pub fn serialize_entry(e: &CatalogEntry) -> String {
    crate::json::to_pretty(e).expect("entries serialize")
}

/// Writes every entry to `dir` as `<id>.json`.
pub fn export(dir: &Path) -> Result<Vec<PathBuf>, CatalogError> {
    let io = |path: &Path, e: std::io::Error| CatalogError::Io { path: path.to_path_buf(), reason: e.to_string() };
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut out = Vec::new();
    for id in list_entries()? {
        let text = raw_entry(&id)?;
        let path = dir.join(format!("{id}.json"));
        std::fs::write(&path, text).map_err(|e| io(&path, e))?;
        out.push(path);
    }
    Ok(out)
}

pub fn verify_entry(id: &str) -> Result<Certificate, CatalogError> {
    verify_loaded(&load_entry(id)?)
}

/// Everything a check may need, built once per entry.
struct Prepared<'a> {
    entry: &'a CatalogEntry,
    ctx: Option<Arc<SingerContext>>,
    graph: Option<Arc<AbstractGraph>>,
}

impl Prepared<'_> {
    fn id(&self) -> &str {
        &self.entry.id
    }

    fn ctx(&self) -> Result<&Arc<SingerContext>, CatalogError> {
        self.ctx.as_ref().ok_or_else(|| corrupt(self.id(), "this check needs a field"))
    }

    fn graph(&self) -> Result<&Arc<AbstractGraph>, CatalogError> {
        self.graph.as_ref().ok_or_else(|| corrupt(self.id(), "this check needs a graph"))
    }

    fn blocks(&self, raw: &[Vec<u32>]) -> Result<Vec<LabeledGraph>, CatalogError> {
        let g = self.graph()?;
        raw.iter()
            .map(|b| LabeledGraph::new(g.clone(), b.clone(), self.entry.modulus).map_err(|e| corrupt(self.id(), e)))
            .collect()
    }

    fn relative(&self, r: Option<u32>) -> Result<Option<RelativeSubgroup>, CatalogError> {
        match r {
            None => Ok(None),
            Some(n) => RelativeSubgroup::new(self.ctx()?, n).map(Some).map_err(|e| corrupt(self.id(), e)),
        }
    }

    fn candidate(&self, raw: &[Vec<u32>], relative: Option<u32>) -> Result<FamilyCandidate, CatalogError> {
        Ok(FamilyCandidate {
            ctx: self.ctx.clone(),
            modulus: self.entry.modulus,
            blocks: self.blocks(raw)?,
            lambda: self.entry.lambda,
            relative: self.relative(relative)?,
            subspace_required: self.ctx.is_some(),
        })
    }

    /// The full family: blocks, or the orbits of initial blocks.
    fn family(&self) -> Result<(FamilyCandidate, Option<u32>), CatalogError> {
        match &self.entry.construction {
            Construction::Family { blocks, relative, .. } => Ok((self.candidate(blocks, *relative)?, *relative)),
            Construction::InitialBlocks { blocks, multiplier, relative, .. } => {
                let ib = InitialBlocks { family: self.candidate(blocks, *relative)?, multiplier: *multiplier };
                Ok((expand_initial_blocks(&ib), *relative))
            }
            _ => Err(corrupt(self.id(), "not a family")),
        }
    }

    fn labeling(&self) -> Result<LabeledGraph, CatalogError> {
        let Construction::GracefulLabeling { labels, seed, rotation, multiplier, .. } = &self.entry.construction else {
            return Err(corrupt(self.id(), "not a labeling"));
        };
        let g = self.graph()?.clone();
        let n = self.entry.modulus;
        match (labels, seed) {
            (Some(l), None) => LabeledGraph::new(g, l.clone(), n).map_err(|e| corrupt(self.id(), e)),
            (None, Some(s)) => {
                let rot = rotation.as_ref().ok_or_else(|| corrupt(self.id(), "a seed needs a rotation"))?;
                let perm = rot.permutation(g.order()).map_err(|e| corrupt(self.id(), e))?;
                let m = multiplier.ok_or_else(|| corrupt(self.id(), "a seed needs a multiplier"))?;
                let seed: Vec<(u32, u32)> = s.iter().map(|&[v, l]| (v, l)).collect();
                expand_frobenius_seed(g, &seed, &perm, m, n).map_err(|e| corrupt(self.id(), e))
            }
            _ => Err(corrupt(self.id(), "give exactly one of labels and seed")),
        }
    }

    fn set(&self) -> Result<&[u32], CatalogError> {
        match &self.entry.construction {
            Construction::GracefulLabeling { set, .. } | Construction::NestedSet { set, .. } => Ok(set),
            _ => Err(corrupt(self.id(), "no set")),
        }
    }
}

fn search_verdict(id: &str, check: &str, r: SearchResult) -> Result<(Verdict, Value), CatalogError> {
    let detail = json!({"status": r.status, "nodes_explored": r.nodes_explored});
    match r.status {
        Status::Found => Ok((Verdict::Pass, detail)),
        Status::Exhausted => Ok((Verdict::Fail, detail)),
        Status::BudgetExceeded => Err(CatalogError::Inconclusive {
            id: id.to_string(),
            check: check.to_string(),
            reason: "search budget exceeded".into(),
        }),
    }
}

fn run_check(p: &Prepared, name: &str, violations: &mut Vec<Violation>) -> Result<(Verdict, Value), CatalogError> {
    let e = p.entry;
    let n = e.modulus;
    let bad = |r: String| corrupt(&e.id, r);
    Ok(match name {
        "family" => {
            let (c, _) = p.family()?;
            let cert = verify_family(&c);
            violations.extend(cert.violations.iter().copied());
            let detail = json!({
                "blocks": c.blocks.len(),
                "differences": cert.coverage.total(),
                "violations": cert.violations.len(),
                "block_issues": cert.block_issues,
            });
            (cert.verdict, detail)
        }
        "orbit_coverage" => {
            let Construction::InitialBlocks { blocks, multiplier, relative, .. } = &e.construction else {
                return Err(bad("orbit_coverage needs initial blocks".into()));
            };
            let ib = InitialBlocks { family: p.candidate(blocks, *relative)?, multiplier: *multiplier };
            let oc = check_evenly_distributed(&ib).map_err(|err| bad(err.to_string()))?;
            violations.extend(oc.violations.iter().copied());
            (oc.verdict, json!({"orbits": oc.hits.len(), "violations": oc.violations.len()}))
        }
        "log_bijective" => {
            let Construction::InitialBlocks { blocks, log: Some(l), .. } = &e.construction else {
                return Err(bad("log_bijective needs initial blocks and a log".into()));
            };
            let map = LogMap::new(n, l.r, l.classes).map_err(|err| bad(err.to_string()))?;
            let mut image = vec![0u32; l.classes as usize];
            for b in p.blocks(blocks)? {
                for (c, x) in map.image(&difference_list(&b)).into_iter().enumerate() {
                    image[c] += x;
                }
            }
            let off = image.iter().filter(|&&x| x != e.lambda).count();
            (Verdict::from_bool(off == 0), json!({"classes": l.classes, "classes_off": off}))
        }
        "generated_planes" => {
            let Construction::InitialBlocks { blocks, generators: Some(gens), .. } = &e.construction else {
                return Err(bad("generated_planes needs generators".into()));
            };
            if gens.len() != blocks.len() {
                return Err(bad("one generator pair per block".into()));
            }
            let ctx = p.ctx()?;
            let mismatched: Vec<usize> = blocks
                .iter()
                .zip(gens)
                .enumerate()
                .filter(|(_, (b, &[x, y]))| {
                    let mut pts = (*b).clone();
                    pts.sort_unstable();
                    ctx.span(&[0, x, y]).points != pts
                })
                .map(|(i, _)| i)
                .collect();
            (Verdict::from_bool(mismatched.is_empty()), json!({"mismatched": mismatched}))
        }
        "design" => {
            let (c, relative) = p.family()?;
            let mut d = develop(&c, false).map_err(|err| bad(err.to_string()))?;
            if let Some(r) = relative {
                complete_with_cycle_systems(&mut d, r).map_err(|err| bad(err.to_string()))?;
            }
            let dv = verify_design(&d);
            let detail = json!({
                "blocks": dv.blocks,
                "materialized": d.base.is_none(),
                "improper_degree": d.improper_degree,
                "pair_violations": dv.pair_violation_count,
                "block_issues": dv.block_issues,
            });
            (dv.verdict, detail)
        }
        "improper_degree" => {
            let Construction::InitialBlocks { improper_degree: Some(d), .. } = &e.construction else {
                return Err(bad("improper_degree needs a declared degree".into()));
            };
            let got = p.graph()?.isolated_count();
            (Verdict::from_bool(got == *d), json!({"isolated": got}))
        }
        "graceful" => {
            let b = p.labeling()?;
            let gv = verify_graceful_labeling(p.set()?, &b, e.lambda);
            violations.extend(gv.violations.iter().copied());
            (gv.verdict, json!({"injective": gv.injective, "outside": gv.outside, "violations": gv.violations.len()}))
        }
        "difference_cover" => {
            let b = p.labeling()?;
            let cov = difference_list(&b);
            let off: Vec<u32> = (1..n).filter(|&x| cov.get(x) != e.lambda).collect();
            (Verdict::from_bool(off.is_empty() && b.is_injective()), json!({"residues_off": off.len()}))
        }
        "labels_in_set" => {
            let b = p.labeling()?;
            let set = p.set()?;
            let outside: Vec<u32> = b.labels.iter().copied().filter(|x| !set.contains(x)).collect();
            (Verdict::from_bool(outside.is_empty()), json!({"outside": outside}))
        }
        "hyperplane" => {
            let ctx = p.ctx()?;
            let set = p.set()?;
            let ok = match ctx.is_subspace(set) {
                SubspaceCheck::Subspace(s) => s.dim + 2 == ctx.v(),
                _ => false,
            };
            (Verdict::from_bool(ok), json!({"size": set.len()}))
        }
        "frobenius_fixed" => {
            let Construction::GracefulLabeling { rotation: Some(rot), multiplier: Some(m), .. } = &e.construction
            else {
                return Err(bad("frobenius_fixed needs a rotation and a multiplier".into()));
            };
            let b = p.labeling()?;
            let perm = rot.permutation(b.graph.order()).map_err(|err| bad(err.to_string()))?;
            let moved = (0..b.labels.len())
                .filter(|&v| b.labels[perm[v] as usize] as u64 != b.labels[v] as u64 * *m as u64 % n as u64)
                .count();
            (Verdict::from_bool(moved == 0), json!({"vertices_moved": moved}))
        }
        "exhaustive_search" => {
            let spec = GracefulSpec {
                set: p.set()?,
                graph: p.graph()?.clone(),
                modulus: n,
                lambda: e.lambda,
                symmetry: None,
            };
            let r = search_graceful(&spec, &SearchOptions::default()).map_err(|err| bad(err.to_string()))?;
            search_verdict(&e.id, name, r)?
        }
        "near_resolvable" => {
            let b = p.labeling()?;
            let class: Vec<Vec<u32>> = b
                .graph
                .components()
                .iter()
                .map(|c| {
                    let mut pts: Vec<u32> = c.iter().map(|&v| b.labels[v as usize]).collect();
                    pts.sort_unstable();
                    pts
                })
                .collect();
            let nr = verify_near_resolvable(p.ctx()?, &[class]).map_err(|err| bad(err.to_string()))?;
            (nr.verdict, json!({"reasons": nr.reasons}))
        }
        "nested" => {
            let Construction::NestedSet { set, subset: Some(sub), .. } = &e.construction else {
                return Err(bad("nested needs a subset".into()));
            };
            let nv = check_nested_difference_set(set, sub, n, e.lambda);
            violations.extend(nv.violations.iter().copied());
            (nv.verdict, json!({"subset": nv.subset, "violations": nv.violations.len()}))
        }
        "outer_difference_set" => {
            let Construction::NestedSet { set, set_lambda: Some(mu), .. } = &e.construction else {
                return Err(bad("outer_difference_set needs set_lambda".into()));
            };
            let cov = difference_set_coverage(set, n);
            let off = (1..n).filter(|&x| cov[x as usize] != *mu).count();
            (Verdict::from_bool(off == 0), json!({"lambda": mu, "residues_off": off}))
        }
        "set_search" => {
            let Construction::NestedSet { set, k, .. } = &e.construction else {
                return Err(bad("set_search needs a nested set".into()));
            };
            let r = search_nested_set(set, n, *k, e.lambda, &SearchOptions::default())
                .map_err(|err| bad(err.to_string()))?;
            search_verdict(&e.id, name, r)?
        }
        other => return Err(bad(format!("unknown check {other}"))),
    })
}

pub fn verify_loaded(e: &CatalogEntry) -> Result<Certificate, CatalogError> {
    let start = Instant::now();
    let ctx = match &e.field {
        None => None,
        Some(d) => {
            let f = d.build().map_err(|err| corrupt(&e.id, err))?;
            let c = SingerContext::new(Arc::new(f));
            if c.v_q() != e.modulus {
                return Err(corrupt(&e.id, format!("modulus {} differs from [v]_q = {}", e.modulus, c.v_q())));
            }
            Some(Arc::new(c))
        }
    };
    let graph = match &e.construction {
        Construction::Family { graph, .. }
        | Construction::InitialBlocks { graph, .. }
        | Construction::GracefulLabeling { graph, .. } => {
            Some(Arc::new(graph.build().map_err(|err| corrupt(&e.id, err))?))
        }
        Construction::NestedSet { .. } => None,
    };
    let p = Prepared { entry: e, ctx, graph };
    let mut checks = Vec::new();
    let mut violations = Vec::new();
    for (name, &expected) in &e.expected {
        let (verdict, detail) = run_check(&p, name, &mut violations)?;
        checks.push(CheckResult { name: name.clone(), verdict, expected, detail });
    }
    violations.truncate(VIOLATION_LIMIT);
    Ok(Certificate {
        schema: CERTIFICATE_SCHEMA.to_string(),
        entry: e.id.clone(),
        verdict: Verdict::from_bool(checks.iter().all(|c| c.verdict.is_pass())),
        expected: Verdict::from_bool(checks.iter().all(|c| c.expected.is_pass())),
        confirmed: checks.iter().all(|c| c.verdict == c.expected),
        lambda: e.lambda,
        checks,
        violations,
        timing_ms: start.elapsed().as_millis() as u64,
    })
}

/// A catalog record holding a search witness, with every applicable check
/// expected to pass.
pub fn entry_from_search(id: &str, spec: &SearchSpec, witness: &Witness) -> Result<CatalogEntry, CatalogError> {
    let ctx = spec.context().map_err(|err| corrupt(id, err))?;
    let modulus = match (&ctx, spec.modulus) {
        (Some(c), _) => c.v_q(),
        (None, Some(m)) => m,
        (None, None) => return Err(corrupt(id, "no modulus")),
    };
    let pass = |names: &[&str]| names.iter().map(|n| (n.to_string(), Verdict::Pass)).collect();
    let (construction, lambda, expected) = match (&spec.target, witness) {
        (Target::GracefulLabeling { set, graph, lambda }, Witness::Labeling(b)) => (
            Construction::GracefulLabeling {
                graph: graph.clone(),
                set: set.clone(),
                labels: Some(b.labels.clone()),
                seed: None,
                rotation: None,
                multiplier: None,
            },
            *lambda,
            pass(&["graceful"]),
        ),
        (Target::SubspaceBlock { graph, lambda }, Witness::Family { blocks, multiplier })
        | (Target::Family { graph, lambda, relative: None }, Witness::Family { blocks, multiplier })
            if *multiplier > 1 =>
        {
            (
                Construction::InitialBlocks {
                    graph: graph.clone(),
                    blocks: blocks.iter().map(|b| b.labels.clone()).collect(),
                    multiplier: *multiplier,
                    relative: None,
                    generators: None,
                    log: None,
                    improper_degree: None,
                },
                *lambda,
                pass(&["family", "orbit_coverage"]),
            )
        }
        (Target::Family { graph, lambda, relative }, Witness::Family { blocks, multiplier }) => {
            let blocks = blocks.iter().map(|b| b.labels.clone()).collect();
            let construction = if *multiplier > 1 {
                Construction::InitialBlocks {
                    graph: graph.clone(),
                    blocks,
                    multiplier: *multiplier,
                    relative: *relative,
                    generators: None,
                    log: None,
                    improper_degree: None,
                }
            } else {
                Construction::Family { graph: graph.clone(), blocks, relative: *relative }
            };
            (construction, *lambda, pass(&["family"]))
        }
        (Target::NestedSet { set, k, lambda }, Witness::Set(s)) => (
            Construction::NestedSet { set: set.clone(), k: *k, subset: Some(s.clone()), set_lambda: None },
            *lambda,
            pass(&["nested"]),
        ),
        _ => return Err(corrupt(id, "witness does not match the target")),
    };
    Ok(CatalogEntry {
        schema: ENTRY_SCHEMA.to_string(),
        id: id.to_string(),
        field: spec.field.clone(),
        modulus,
        lambda,
        construction,
        expected,
        provenance: "search witness".to_string(),
    })
}

/// Outcome of developing a family entry and checking pair coverage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DesignReport {
    pub schema: String,
    pub entry: String,
    pub verdict: Verdict,
    pub blocks: usize,
    pub materialized: bool,
    pub improper_degree: u32,
    pub pair_violation_count: u64,
    pub pair_violations: Vec<crate::verify::PairViolation>,
    pub timing_ms: u64,
}

/// The full family of a family entry (initial blocks already expanded)
/// and the relative spread dimension, if any.
pub fn family_candidate(e: &CatalogEntry) -> Result<(FamilyCandidate, Option<u32>), CatalogError> {
    let ctx = match &e.field {
        None => None,
        Some(d) => Some(Arc::new(SingerContext::new(Arc::new(d.build().map_err(|err| corrupt(&e.id, err))?)))),
    };
    let graph = match &e.construction {
        Construction::Family { graph, .. } | Construction::InitialBlocks { graph, .. } => {
            Some(Arc::new(graph.build().map_err(|err| corrupt(&e.id, err))?))
        }
        _ => return Err(corrupt(&e.id, "only families can be developed")),
    };
    let p = Prepared { entry: e, ctx, graph };
    let (c, relative) = p.family()?;
    Ok((c, relative))
}

/// Develops the family of an entry (completing relative families with
/// cycle systems on the spread classes) and verifies the design. Groups
/// above the materialization limit are certified through the family
/// unless `force` is set.
pub fn design_report(e: &CatalogEntry, force: bool) -> Result<DesignReport, CatalogError> {
    let start = Instant::now();
    let (c, relative) = family_candidate(e)?;
    let mut d = develop(&c, force).map_err(|err| corrupt(&e.id, err))?;
    if let Some(r) = relative {
        complete_with_cycle_systems(&mut d, r).map_err(|err| corrupt(&e.id, err))?;
    }
    let dv = verify_design(&d);
    Ok(DesignReport {
        schema: "qdesign-design/1".to_string(),
        entry: e.id.clone(),
        verdict: dv.verdict,
        blocks: dv.blocks,
        materialized: d.base.is_none(),
        improper_degree: d.improper_degree,
        pair_violation_count: dv.pair_violation_count,
        pair_violations: dv.pair_violations,
        timing_ms: start.elapsed().as_millis() as u64,
    })
}
