//! Certification of difference families, developed designs and graceful
//! labelings.

use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{is_prime, smallest_primitive_root};
use crate::graph::{make_family_graph, AbstractGraph, DifferenceList, Family, LabeledGraph};
use crate::singer::{SingerContext, Subspace, SubspaceCheck};

/// Largest group order for which `develop` materializes translates by default.
pub const MATERIALIZE_LIMIT: u32 = 8191;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("the multiplier group does not act semiregularly: orbit of {residue} has {len} elements, expected {expected}")]
    SemiregularityFails { residue: u32, len: usize, expected: usize },
    #[error("family does not verify")]
    FamilyNotVerified,
    #[error("Hamiltonian cycle systems need odd order, got {0}")]
    EvenOrder(u32),
    #[error("{0} is not a prime congruent to 3 mod 4")]
    BadPrime(u32),
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub residue: u32,
    pub expected: u32,
    pub got: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum BlockIssue {
    NotInjective { block: usize },
    NotSubspace { block: usize, detail: String },
    EdgeInClass { block: usize, a: u32, b: u32 },
    LabelOutsideSet { block: usize, label: u32 },
    MissingField,
}

/// The subgroup H = step * Z_modulus of order [n]_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelativeSubgroup {
    pub n: u32,
    pub step: u32,
}

impl RelativeSubgroup {
    pub fn new(ctx: &SingerContext, n: u32) -> Result<Self, VerifyError> {
        let step = ctx.spread_step(n).map_err(|e| VerifyError::BadInput(e.to_string()))?;
        Ok(RelativeSubgroup { n, step })
    }
    pub fn contains(&self, x: u32) -> bool {
        x % self.step == 0
    }
}

#[derive(Debug, Clone)]
pub struct FamilyCandidate {
    pub ctx: Option<Arc<SingerContext>>,
    pub modulus: u32,
    pub blocks: Vec<LabeledGraph>,
    pub lambda: u32,
    pub relative: Option<RelativeSubgroup>,
    pub subspace_required: bool,
}

impl FamilyCandidate {
    pub fn translate(&self, t: u32) -> FamilyCandidate {
        FamilyCandidate { blocks: self.blocks.iter().map(|b| b.translate(t)).collect(), ..self.clone() }
    }
}

#[derive(Debug, Clone)]
pub struct FamilyCertificate {
    pub verdict: Verdict,
    pub lambda: u32,
    pub coverage: DifferenceList,
    pub violations: Vec<Violation>,
    pub block_issues: Vec<BlockIssue>,
    pub subspace_witnesses: Vec<Option<Subspace>>,
}

fn coverage_of(modulus: u32, blocks: &[LabeledGraph]) -> DifferenceList {
    blocks
        .par_iter()
        .fold(
            || DifferenceList::new(modulus),
            |mut acc, b| {
                acc.add_graph(b);
                acc
            },
        )
        .reduce(
            || DifferenceList::new(modulus),
            |mut a, b| {
                a.merge(&b);
                a
            },
        )
}

/// Expected multiplicity of each residue: λ off H, 0 on H.
fn expected_at(x: u32, lambda: u32, relative: Option<RelativeSubgroup>) -> u32 {
    match relative {
        Some(h) if h.contains(x) => 0,
        _ => lambda,
    }
}

fn subspace_issue(ctx: &SingerContext, block: usize, pts: &[u32]) -> (Option<Subspace>, Option<BlockIssue>) {
    match ctx.is_subspace(pts) {
        SubspaceCheck::Subspace(s) => (Some(s), None),
        other => (None, Some(BlockIssue::NotSubspace { block, detail: format!("{other:?}") })),
    }
}

pub fn verify_family(c: &FamilyCandidate) -> FamilyCertificate {
    let n = c.modulus;
    let coverage = coverage_of(n, &c.blocks);
    let violations: Vec<Violation> = (1..n)
        .filter_map(|x| {
            let expected = expected_at(x, c.lambda, c.relative);
            let got = coverage.get(x);
            (got != expected).then_some(Violation { residue: x, expected, got })
        })
        .collect();
    let mut issues = Vec::new();
    for (i, b) in c.blocks.iter().enumerate() {
        if !b.is_injective() {
            issues.push(BlockIssue::NotInjective { block: i });
        }
        if let Some(h) = c.relative {
            for &(x, y) in b.graph.edges() {
                let (a, bb) = (b.labels[x as usize], b.labels[y as usize]);
                if h.contains((a + n - bb) % n) {
                    issues.push(BlockIssue::EdgeInClass { block: i, a, b: bb });
                }
            }
        }
    }
    let mut witnesses = vec![None; c.blocks.len()];
    if c.subspace_required {
        match &c.ctx {
            None => issues.push(BlockIssue::MissingField),
            Some(ctx) => {
                let checks: Vec<_> =
                    c.blocks.par_iter().enumerate().map(|(i, b)| subspace_issue(ctx, i, &b.labels)).collect();
                for (i, (w, issue)) in checks.into_iter().enumerate() {
                    witnesses[i] = w;
                    issues.extend(issue);
                }
            }
        }
    }
    FamilyCertificate {
        verdict: Verdict::from_bool(violations.is_empty() && issues.is_empty()),
        lambda: c.lambda,
        coverage,
        violations,
        block_issues: issues,
        subspace_witnesses: witnesses,
    }
}

/// Cyclic group generated by `m` in Z_n^*.
pub fn multiplier_group(m: u32, n: u32) -> Vec<u32> {
    let mut g = vec![1 % n];
    let mut x = m as u64 % n as u64;
    while x as u32 != g[0] && g.len() <= n as usize {
        g.push(x as u32);
        x = x * m as u64 % n as u64;
    }
    g
}

/// Initial blocks together with the multiplier generating their orbits
/// (a power of q acting on Z_[v]_q).
#[derive(Debug, Clone)]
pub struct InitialBlocks {
    pub family: FamilyCandidate,
    pub multiplier: u32,
}

pub fn expand_initial_blocks(ib: &InitialBlocks) -> FamilyCandidate {
    let n = ib.family.modulus;
    let group = multiplier_group(ib.multiplier, n);
    let blocks = ib
        .family
        .blocks
        .iter()
        .flat_map(|b| group.iter().map(move |&a| b.scale(a)))
        .collect();
    FamilyCandidate { blocks, ..ib.family.clone() }
}

#[derive(Debug, Clone)]
pub struct OrbitCoverage {
    pub verdict: Verdict,
    /// (least element of the orbit, hits) for every orbit on the target.
    pub hits: Vec<(u32, u32)>,
    pub violations: Vec<Violation>,
}

/// Whether the differences of the initial blocks meet every multiplier
/// orbit on the target domain exactly λ times.
pub fn check_evenly_distributed(ib: &InitialBlocks) -> Result<OrbitCoverage, VerifyError> {
    let c = &ib.family;
    let n = c.modulus;
    let group = multiplier_group(ib.multiplier, n);
    let mut orbit_of = vec![u32::MAX; n as usize];
    let mut reps = Vec::new();
    for x in 1..n {
        if orbit_of[x as usize] != u32::MAX || c.relative.is_some_and(|h| h.contains(x)) {
            continue;
        }
        let orbit: HashSet<u32> = group.iter().map(|&a| ((a as u64 * x as u64) % n as u64) as u32).collect();
        if orbit.len() != group.len() {
            return Err(VerifyError::SemiregularityFails { residue: x, len: orbit.len(), expected: group.len() });
        }
        for y in orbit {
            orbit_of[y as usize] = reps.len() as u32;
        }
        reps.push(x);
    }
    let coverage = coverage_of(n, &c.blocks);
    let mut hits = vec![0u32; reps.len()];
    let mut stray = Vec::new();
    for x in 1..n {
        let m = coverage.get(x);
        if m == 0 {
            continue;
        }
        match orbit_of[x as usize] {
            u32::MAX => stray.push(Violation { residue: x, expected: 0, got: m }),
            o => hits[o as usize] += m,
        }
    }
    let mut violations: Vec<Violation> = reps
        .iter()
        .zip(&hits)
        .filter(|(_, &h)| h != c.lambda)
        .map(|(&r, &h)| Violation { residue: r, expected: c.lambda, got: h })
        .collect();
    violations.extend(stray);
    Ok(OrbitCoverage {
        verdict: Verdict::from_bool(violations.is_empty()),
        hits: reps.into_iter().zip(hits).collect(),
        violations,
    })
}

#[derive(Debug, Clone)]
pub struct DesignInstance {
    pub ctx: Option<Arc<SingerContext>>,
    pub modulus: u32,
    pub blocks: Vec<LabeledGraph>,
    pub lambda: u32,
    pub improper_degree: u32,
    pub subspace_required: bool,
    /// Set when the translates were not materialized; the design is then
    /// certified through its base family.
    pub base: Option<FamilyCandidate>,
}

/// Least t dividing n with B + t = B as an edge-labeled graph.
fn translation_period(b: &LabeledGraph) -> u32 {
    let n = b.modulus;
    let edges = b.edge_labels();
    let points = b.point_set();
    for t in 1..n {
        if n % t != 0 {
            continue;
        }
        let moved = b.translate(t);
        if moved.point_set() == points && moved.edge_labels() == edges {
            return t;
        }
    }
    n
}

/// All distinct translates of every block of a verified family.
pub fn develop(c: &FamilyCandidate, force: bool) -> Result<DesignInstance, VerifyError> {
    if !verify_family(c).verdict.is_pass() {
        return Err(VerifyError::FamilyNotVerified);
    }
    let improper_degree = c.blocks.first().map_or(0, |b| b.graph.isolated_count());
    let mut d = DesignInstance {
        ctx: c.ctx.clone(),
        modulus: c.modulus,
        blocks: Vec::new(),
        lambda: c.lambda,
        improper_degree,
        subspace_required: c.subspace_required,
        base: None,
    };
    if c.modulus > MATERIALIZE_LIMIT && !force {
        d.base = Some(c.clone());
        return Ok(d);
    }
    for b in &c.blocks {
        let period = translation_period(b);
        d.blocks.extend((0..period).map(|t| b.translate(t)));
    }
    Ok(d)
}

/// Walecki decomposition of K_u into (u-1)/2 Hamiltonian cycles. With
/// u = 2m+1 and vertex 2m playing infinity, cycle i visits
/// inf, i, i+1, i-1, i+2, i-2, .., i+m (mod 2m).
pub fn walecki_hcs(u: u32) -> Result<Vec<Vec<u32>>, VerifyError> {
    if u % 2 == 0 {
        return Err(VerifyError::EvenOrder(u));
    }
    let m = (u - 1) / 2;
    let mut cycles = Vec::new();
    for i in 0..m {
        let mut c = vec![2 * m, i];
        for j in 1..=m {
            c.push((i + j) % (2 * m));
            if j < m {
                c.push((i + 2 * m - j) % (2 * m));
            }
        }
        cycles.push(c);
    }
    Ok(cycles)
}

/// Appends a Hamiltonian cycle system on every class of the spread of
/// order [n]_q, turning a developed relative cycle family into a design.
pub fn complete_with_cycle_systems(d: &mut DesignInstance, n: u32) -> Result<(), VerifyError> {
    let ctx = d.ctx.clone().ok_or_else(|| VerifyError::BadInput("completion needs a field".into()))?;
    let spread = ctx.desarguesian_spread(n).map_err(|e| VerifyError::BadInput(e.to_string()))?;
    let u = spread.classes[0].points.len() as u32;
    let cycles = walecki_hcs(u)?;
    if u < 3 {
        return Ok(());
    }
    let graph = Arc::new(make_family_graph(&Family::Cycle { k: u }).expect("u >= 3"));
    for class in &spread.classes {
        for cyc in &cycles {
            let labels = cyc.iter().map(|&i| class.points[i as usize]).collect();
            let b = LabeledGraph::new(graph.clone(), labels, d.modulus)
                .map_err(|e| VerifyError::BadInput(e.to_string()))?;
            d.blocks.push(b);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairViolation {
    pub a: u32,
    pub b: u32,
    pub expected: u32,
    pub got: u32,
}

#[derive(Debug, Clone)]
pub struct DesignVerdict {
    pub verdict: Verdict,
    pub blocks: usize,
    pub total_coverage: u64,
    /// First violating pairs, at most `PAIR_REPORT_LIMIT`.
    pub pair_violations: Vec<PairViolation>,
    pub pair_violation_count: u64,
    pub block_issues: Vec<BlockIssue>,
}

const PAIR_REPORT_LIMIT: usize = 32;

#[inline]
fn pair_index(a: u64, b: u64, n: u64) -> usize {
    (a * (2 * n - a - 1) / 2 + (b - a - 1)) as usize
}

pub fn verify_design(d: &DesignInstance) -> DesignVerdict {
    if let Some(base) = &d.base {
        let cert = verify_family(base);
        return DesignVerdict {
            verdict: cert.verdict,
            blocks: base.blocks.len() * base.modulus as usize,
            total_coverage: 0,
            pair_violations: Vec::new(),
            pair_violation_count: cert.violations.len() as u64,
            block_issues: cert.block_issues,
        };
    }
    let n = d.modulus as u64;
    let mut counts = vec![0u8; (n * n.saturating_sub(1) / 2) as usize];
    let mut total = 0u64;
    for b in &d.blocks {
        for &(x, y) in b.graph.edges() {
            let (a, c) = (b.labels[x as usize] as u64, b.labels[y as usize] as u64);
            if a == c {
                continue;
            }
            let i = pair_index(a.min(c), a.max(c), n);
            counts[i] = counts[i].saturating_add(1);
            total += 1;
        }
    }
    let mut pair_violations = Vec::new();
    let mut pair_violation_count = 0;
    let mut idx = 0usize;
    for a in 0..n {
        for b in a + 1..n {
            let got = counts[idx] as u32;
            if got != d.lambda {
                pair_violation_count += 1;
                if pair_violations.len() < PAIR_REPORT_LIMIT {
                    pair_violations.push(PairViolation { a: a as u32, b: b as u32, expected: d.lambda, got });
                }
            }
            idx += 1;
        }
    }
    let mut issues: Vec<BlockIssue> = d
        .blocks
        .par_iter()
        .enumerate()
        .filter_map(|(i, b)| (!b.is_injective()).then_some(BlockIssue::NotInjective { block: i }))
        .collect();
    if d.subspace_required {
        match &d.ctx {
            None => issues.push(BlockIssue::MissingField),
            Some(ctx) => {
                let bad: Vec<BlockIssue> = d
                    .blocks
                    .par_iter()
                    .enumerate()
                    .filter_map(|(i, b)| {
                        let pts = b.point_set();
                        if ctx.dimension_for_size(pts.len()).is_none() {
                            return Some(BlockIssue::NotSubspace { block: i, detail: "cardinality".into() });
                        }
                        ctx.line_violation(&pts).map(|(a, c, o)| BlockIssue::NotSubspace {
                            block: i,
                            detail: format!("line through {a} and {c} leaves at {o}"),
                        })
                    })
                    .collect();
                issues.extend(bad);
            }
        }
    }
    DesignVerdict {
        verdict: Verdict::from_bool(pair_violation_count == 0 && issues.is_empty()),
        blocks: d.blocks.len(),
        total_coverage: total,
        pair_violations,
        pair_violation_count,
        block_issues: issues,
    }
}

#[derive(Debug, Clone)]
pub struct GracefulVerdict {
    pub verdict: Verdict,
    pub injective: bool,
    pub outside: Vec<u32>,
    pub violations: Vec<Violation>,
}

/// Labels inside D, injective, and every nonzero residue covered λ times.
pub fn verify_graceful_labeling(d: &[u32], b: &LabeledGraph, lambda: u32) -> GracefulVerdict {
    let set: HashSet<u32> = d.iter().copied().collect();
    let outside: Vec<u32> = b.labels.iter().copied().filter(|x| !set.contains(x)).collect();
    let injective = b.is_injective();
    let cov = crate::graph::difference_list(b);
    let violations: Vec<Violation> = (1..b.modulus)
        .filter(|&x| cov.get(x) != lambda)
        .map(|x| Violation { residue: x, expected: lambda, got: cov.get(x) })
        .collect();
    GracefulVerdict {
        verdict: Verdict::from_bool(injective && outside.is_empty() && violations.is_empty()),
        injective,
        outside,
        violations,
    }
}

pub fn quadratic_residues(p: u32) -> Vec<u32> {
    let mut s: Vec<u32> = (1..p).map(|x| ((x as u64 * x as u64) % p as u64) as u32).collect();
    s.sort_unstable();
    s.dedup();
    s
}

/// Circulant C(Z_n; S), n = (p-1)/2, with vertex i labeled s^i where s is
/// the square of the least primitive root of p.
pub fn paley_circulant_labeling(p: u32, connections: &[u32]) -> Result<LabeledGraph, VerifyError> {
    if !is_prime(p as u64) || p % 4 != 3 {
        return Err(VerifyError::BadPrime(p));
    }
    let n = (p - 1) / 2;
    let mut seen = HashSet::new();
    for &c in connections {
        if c == 0 || c > n / 2 || !seen.insert(c) {
            return Err(VerifyError::BadInput(format!("connection {c} outside 1..{}", n / 2)));
        }
    }
    let graph = Arc::new(
        make_family_graph(&Family::Circulant { n, connections: connections.to_vec() })
            .map_err(|e| VerifyError::BadInput(e.to_string()))?,
    );
    let r = smallest_primitive_root(p) as u64;
    let s = r * r % p as u64;
    let mut labels = Vec::with_capacity(n as usize);
    let mut x = 1u64;
    for _ in 0..n {
        labels.push(x as u32);
        x = x * s % p as u64;
    }
    LabeledGraph::new(graph, labels, p).map_err(|e| VerifyError::BadInput(e.to_string()))
}

#[derive(Debug, Clone)]
pub struct NearResolvableVerdict {
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

/// Each class must consist of pairwise disjoint lines whose union is a
/// hyperplane.
pub fn verify_near_resolvable(
    ctx: &SingerContext,
    classes: &[Vec<Vec<u32>>],
) -> Result<NearResolvableVerdict, VerifyError> {
    if ctx.v() < 3 {
        return Err(VerifyError::Degenerate("hyperplanes of a line are points".into()));
    }
    let mut reasons = Vec::new();
    for (ci, class) in classes.iter().enumerate() {
        let mut union = Vec::new();
        for (bi, block) in class.iter().enumerate() {
            match ctx.is_subspace(block) {
                SubspaceCheck::Subspace(s) if s.dim == 1 => {}
                other => reasons.push(format!("class {ci} block {bi} {block:?} is not a line: {other:?}")),
            }
            union.extend(block.iter().copied());
        }
        let before = union.len();
        union.sort_unstable();
        union.dedup();
        if union.len() != before {
            reasons.push(format!("class {ci} blocks are not pairwise disjoint"));
        }
        match ctx.is_subspace(&union) {
            SubspaceCheck::Subspace(s) if s.dim + 2 == ctx.v() => {}
            other => reasons.push(format!("class {ci} union is not a hyperplane: {other:?}")),
        }
    }
    Ok(NearResolvableVerdict { verdict: Verdict::from_bool(reasons.is_empty()), reasons })
}

#[derive(Debug, Clone)]
pub struct NestedVerdict {
    pub verdict: Verdict,
    pub subset: bool,
    pub violations: Vec<Violation>,
}

/// D' inside D and ΔD' covering every nonzero residue of Z_n λ' times.
pub fn check_nested_difference_set(d: &[u32], inner: &[u32], n: u32, lambda: u32) -> NestedVerdict {
    let outer: HashSet<u32> = d.iter().copied().collect();
    let subset = inner.iter().all(|x| outer.contains(x));
    let cov = difference_set_coverage(inner, n);
    let violations: Vec<Violation> = (1..n)
        .filter(|&x| cov[x as usize] != lambda)
        .map(|x| Violation { residue: x, expected: lambda, got: cov[x as usize] })
        .collect();
    NestedVerdict { verdict: Verdict::from_bool(subset && violations.is_empty()), subset, violations }
}

pub fn difference_set_coverage(set: &[u32], n: u32) -> Vec<u32> {
    let mut cov = vec![0u32; n as usize];
    for &a in set {
        for &b in set {
            if a != b {
                cov[((a + n - b) % n) as usize] += 1;
            }
        }
    }
    cov
}

/// (u, t) with u*a + t = b as sets in Z_n, u a unit, if one exists.
pub fn affine_equivalence(a: &[u32], b: &[u32], n: u32) -> Option<(u32, u32)> {
    let mut target = b.to_vec();
    target.sort_unstable();
    for u in 1..n {
        if num_integer::gcd(u, n) != 1 {
            continue;
        }
        for t in 0..n {
            let mut img: Vec<u32> =
                a.iter().map(|&x| ((u as u64 * x as u64 + t as u64) % n as u64) as u32).collect();
            img.sort_unstable();
            if img == target {
                return Some((u, t));
            }
        }
    }
    None
}

/// Complete graph on a point set, as a labeled block.
pub fn complete_block(points: &[u32], modulus: u32) -> LabeledGraph {
    let graph: Arc<AbstractGraph> =
        Arc::new(make_family_graph(&Family::Complete { k: points.len() as u32 }).expect("complete graph"));
    LabeledGraph::new(graph, points.to_vec(), modulus).expect("labels below modulus")
}
