//! Exact backtracking searches with fixed variable and value orders.
//!
//! Top-level branches may run on several threads. Results are folded in
//! branch order, so the reported witness and node count do not depend on
//! the number of workers. Only the wall-clock limit is schedule dependent.

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldDescriptor;
use crate::graph::{AbstractGraph, GraphSpec, LabeledGraph, Rotation};
use crate::singer::{SingerContext, SubspaceCheck};
use crate::verify::{
    check_evenly_distributed, check_nested_difference_set, expand_initial_blocks, multiplier_group,
    verify_family, verify_graceful_labeling, FamilyCandidate, InitialBlocks, RelativeSubgroup,
};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("infeasible count: {0}")]
    InfeasibleCount(String),
    #[error("bad search spec: {0}")]
    BadSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub nodes: u64,
    pub seconds: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { nodes: 100_000_000, seconds: 300.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Found,
    Exhausted,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Labeling(LabeledGraph),
    /// Blocks; with `multiplier` > 1 they are initial blocks whose orbits
    /// under x -> multiplier * x form the family.
    Family { blocks: Vec<LabeledGraph>, multiplier: u32 },
    Set(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub status: Status,
    pub witness: Option<Witness>,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub budget: Budget,
    pub jobs: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: Budget::default(), jobs: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stop {
    Nodes,
    Time,
    Cancelled,
}

/// Node counter shared by one branch.
pub(crate) struct Ticker<'a> {
    nodes: u64,
    cap: u64,
    deadline: Instant,
    cancel: &'a AtomicUsize,
    me: usize,
    stop: Option<Stop>,
}

impl Ticker<'_> {
    /// Counts one node; false means the branch must unwind.
    #[inline]
    fn tick(&mut self) -> bool {
        if self.stop.is_some() {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.cap {
            self.stop = Some(Stop::Nodes);
            return false;
        }
        if self.nodes & 1023 == 0 {
            if Instant::now() > self.deadline {
                self.stop = Some(Stop::Time);
                return false;
            }
            if self.cancel.load(Ordering::Relaxed) < self.me {
                self.stop = Some(Stop::Cancelled);
                return false;
            }
        }
        true
    }
}

struct BranchOutcome<T> {
    found: Option<T>,
    nodes: u64,
    stop: Option<Stop>,
}

/// Runs `branches` branches and folds them in order.
fn drive<T: Send>(
    branches: usize,
    opts: &SearchOptions,
    run: impl Fn(usize, &mut Ticker) -> Option<T> + Sync,
) -> (Status, Option<T>, u64) {
    let budget = opts.budget;
    let deadline = Instant::now() + Duration::from_secs_f64(budget.seconds.max(0.0));
    let cancel = AtomicUsize::new(usize::MAX);
    let one = |i: usize, cap: u64| {
        let mut t = Ticker { nodes: 0, cap, deadline, cancel: &cancel, me: i, stop: None };
        let found = run(i, &mut t);
        if found.is_some() {
            cancel.fetch_min(i, Ordering::Relaxed);
        }
        BranchOutcome { found, nodes: t.nodes.min(cap), stop: t.stop }
    };
    let mut outcomes: Vec<Option<BranchOutcome<T>>> = Vec::new();
    if opts.jobs <= 1 {
        let mut used = 0u64;
        for i in 0..branches {
            let o = one(i, budget.nodes - used.min(budget.nodes));
            used += o.nodes;
            let done = o.found.is_some() || o.stop.is_some();
            outcomes.push(Some(o));
            if done {
                break;
            }
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build().expect("thread pool");
        outcomes = pool.install(|| {
            (0..branches)
                .into_par_iter()
                .map(|i| {
                    if cancel.load(Ordering::Relaxed) < i {
                        None
                    } else {
                        Some(one(i, budget.nodes))
                    }
                })
                .collect()
        });
    }
    let mut used = 0u64;
    for o in outcomes.into_iter() {
        let Some(o) = o else { break };
        used += o.nodes;
        if used > budget.nodes || o.stop == Some(Stop::Nodes) {
            return (Status::BudgetExceeded, None, budget.nodes);
        }
        if let Some(w) = o.found {
            return (Status::Found, Some(w), used);
        }
        match o.stop {
            Some(Stop::Time) => return (Status::BudgetExceeded, None, used),
            Some(Stop::Cancelled) => unreachable!("cancelled only after an earlier branch found"),
            _ => {}
        }
    }
    (Status::Exhausted, None, used)
}

/// Dancing links for exact cover; all items primary.
#[derive(Clone)]
struct Dlx {
    left: Vec<usize>,
    right: Vec<usize>,
    up: Vec<usize>,
    down: Vec<usize>,
    col: Vec<usize>,
    row: Vec<usize>,
    len: Vec<usize>,
}

enum Flow {
    Found,
    Continue,
    Abort,
}

impl Dlx {
    fn new(items: usize, options: &[Vec<usize>]) -> Self {
        let root = items;
        let mut d = Dlx {
            left: Vec::new(),
            right: Vec::new(),
            up: Vec::new(),
            down: Vec::new(),
            col: Vec::new(),
            row: Vec::new(),
            len: vec![0; items + 1],
        };
        for i in 0..=items {
            d.left.push(if i == 0 { root } else { i - 1 });
            d.right.push(if i == root { 0 } else { i + 1 });
            d.up.push(i);
            d.down.push(i);
            d.col.push(i);
            d.row.push(usize::MAX);
        }
        if items == 0 {
            d.left[root] = root;
            d.right[root] = root;
        }
        for (r, opt) in options.iter().enumerate() {
            let first = d.col.len();
            for (j, &c) in opt.iter().enumerate() {
                let node = d.col.len();
                d.col.push(c);
                d.row.push(r);
                d.up.push(d.up[c]);
                d.down.push(c);
                let last = d.up[c];
                d.down[last] = node;
                d.up[c] = node;
                d.len[c] += 1;
                d.left.push(if j == 0 { node } else { node - 1 });
                d.right.push(first);
                if j > 0 {
                    d.right[node - 1] = node;
                }
                d.left[first] = node;
            }
        }
        d
    }

    fn root(&self) -> usize {
        self.len.len() - 1
    }

    fn cover(&mut self, c: usize) {
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = r;
        self.left[r] = l;
        let mut i = self.down[c];
        while i != c {
            let mut j = self.right[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = d;
                self.up[d] = u;
                self.len[self.col[j]] -= 1;
                j = self.right[j];
            }
            i = self.down[i];
        }
    }

    fn uncover(&mut self, c: usize) {
        let mut i = self.up[c];
        while i != c {
            let mut j = self.left[i];
            while j != i {
                self.len[self.col[j]] += 1;
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = j;
                self.up[d] = j;
                j = self.left[j];
            }
            i = self.up[i];
        }
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = c;
        self.left[r] = c;
    }

    /// Uncovered item with fewest options, lowest index on ties.
    fn choose(&self) -> Option<usize> {
        let root = self.root();
        let mut c = self.right[root];
        let mut best = None;
        let mut best_len = usize::MAX;
        while c != root {
            if self.len[c] < best_len {
                best_len = self.len[c];
                best = Some(c);
            }
            c = self.right[c];
        }
        best
    }

    fn rows_of(&self, c: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut i = self.down[c];
        while i != c {
            out.push(i);
            i = self.down[i];
        }
        out
    }

    fn select(&mut self, node: usize) {
        let mut j = self.right[node];
        while j != node {
            self.cover(self.col[j]);
            j = self.right[j];
        }
    }

    fn unselect(&mut self, node: usize) {
        let mut j = self.left[node];
        while j != node {
            self.uncover(self.col[j]);
            j = self.left[j];
        }
    }

    fn solve(&mut self, chosen: &mut Vec<usize>, t: &mut Ticker) -> Flow {
        let Some(c) = self.choose() else { return Flow::Found };
        if self.len[c] == 0 {
            return Flow::Continue;
        }
        self.cover(c);
        let mut r = self.down[c];
        while r != c {
            if !t.tick() {
                self.uncover(c);
                return Flow::Abort;
            }
            chosen.push(self.row[r]);
            self.select(r);
            match self.solve(chosen, t) {
                Flow::Found => return Flow::Found,
                Flow::Abort => return Flow::Abort,
                Flow::Continue => {}
            }
            self.unselect(r);
            chosen.pop();
            r = self.down[r];
        }
        self.uncover(c);
        Flow::Continue
    }
}

/// Exact cover split into branches over the rows of the first chosen item.
fn exact_cover(items: usize, options: &[Vec<usize>], opts: &SearchOptions) -> (Status, Option<Vec<usize>>, u64) {
    let base = Dlx::new(items, options);
    let Some(c) = base.choose() else {
        return (Status::Found, Some(Vec::new()), 0);
    };
    let rows = base.rows_of(c);
    drive(rows.len(), opts, |i, t| {
        if !t.tick() {
            return None;
        }
        let mut d = base.clone();
        d.cover(c);
        let node = rows[i];
        d.select(node);
        let mut chosen = vec![d.row[node]];
        match d.solve(&mut chosen, t) {
            Flow::Found => Some(chosen),
            _ => None,
        }
    })
}

/// Labeling order: highest-degree vertex adjacent to the labeled ones,
/// lowest index on ties; a fresh component starts at its highest degree.
fn fail_first_order(graph: &AbstractGraph, units: &[Vec<u32>]) -> Vec<usize> {
    let adj = graph.neighbors();
    let deg = graph.degrees();
    let mut unit_of = vec![0usize; graph.order() as usize];
    for (u, vs) in units.iter().enumerate() {
        for &v in vs {
            unit_of[v as usize] = u;
        }
    }
    let unit_deg: Vec<u32> = units.iter().map(|vs| deg[vs[0] as usize]).collect();
    let mut labeled = vec![false; units.len()];
    let mut order = Vec::new();
    for _ in 0..units.len() {
        let frontier = (0..units.len()).filter(|&u| {
            !labeled[u] && units[u].iter().any(|&v| adj[v as usize].iter().any(|&w| labeled[unit_of[w as usize]]))
        });
        let pick = |it: &mut dyn Iterator<Item = usize>| {
            it.max_by(|&a, &b| unit_deg[a].cmp(&unit_deg[b]).then(b.cmp(&a)))
        };
        let next = pick(&mut frontier.into_iter())
            .or_else(|| pick(&mut (0..units.len()).filter(|&u| !labeled[u])))
            .expect("an unlabeled unit remains");
        labeled[next] = true;
        order.push(next);
    }
    order
}

/// Pairs (a, b) meaning label(a) < label(b), removing the dihedral
/// symmetry of cycle components and the order of equal-length cycles.
fn cycle_symmetry_constraints(graph: &AbstractGraph) -> Vec<(u32, u32)> {
    let adj = graph.neighbors();
    let comps = graph.components();
    if comps.iter().any(|c| c.len() < 3 || c.iter().any(|&v| adj[v as usize].len() != 2)) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut walks: Vec<Vec<u32>> = Vec::new();
    for comp in &comps {
        let mut walk = vec![comp[0]];
        let mut prev = comp[0];
        let mut cur = adj[comp[0] as usize][0];
        while cur != comp[0] {
            walk.push(cur);
            let next = if adj[cur as usize][0] == prev { adj[cur as usize][1] } else { adj[cur as usize][0] };
            prev = cur;
            cur = next;
        }
        for &v in &walk[1..] {
            out.push((walk[0], v));
        }
        out.push((walk[1], walk[walk.len() - 1]));
        walks.push(walk);
    }
    for i in 0..walks.len() {
        if let Some(j) = (i + 1..walks.len()).find(|&j| walks[j].len() == walks[i].len()) {
            out.push((walks[i][0], walks[j][0]));
        }
    }
    out
}

/// Assigns labels to units of vertices, keeping the load of every cell of
/// the difference map at most its capacity.
struct Labeler<'a> {
    adj: Vec<Vec<u32>>,
    modulus: u32,
    /// Cell of each residue; NONE forbids the difference.
    cell: &'a [u32],
    caps: &'a [u32],
    units: Vec<Vec<u32>>,
    order: Vec<usize>,
    multiplier: u32,
    values: &'a [u32],
    less: Vec<Vec<(u32, bool)>>,
    labels: Vec<u32>,
    used: HashSet<u32>,
    load: Vec<u32>,
    undo: Vec<(Vec<u32>, Vec<u32>)>,
}

impl<'a> Labeler<'a> {
    #[allow(clippy::too_many_arguments)]
    fn new(
        graph: &AbstractGraph,
        modulus: u32,
        cell: &'a [u32],
        caps: &'a [u32],
        units: Vec<Vec<u32>>,
        multiplier: u32,
        values: &'a [u32],
        constraints: &[(u32, u32)],
    ) -> Self {
        let order = fail_first_order(graph, &units);
        let mut less = vec![Vec::new(); graph.order() as usize];
        for &(a, b) in constraints {
            less[a as usize].push((b, true));
            less[b as usize].push((a, false));
        }
        Labeler {
            adj: graph.neighbors(),
            modulus,
            cell,
            caps,
            units,
            order,
            multiplier,
            values,
            less,
            labels: vec![NONE; graph.order() as usize],
            used: HashSet::new(),
            load: vec![0; caps.len()],
            undo: Vec::new(),
        }
    }

    fn rollback(&mut self, placed: Vec<u32>, bumped: Vec<u32>) {
        for c in bumped {
            self.load[c as usize] -= 1;
        }
        for v in placed {
            let l = self.labels[v as usize];
            self.used.remove(&l);
            self.labels[v as usize] = NONE;
        }
    }

    /// Gives the vertices of unit `u` the labels x, m x, m^2 x, ...
    fn assign(&mut self, u: usize, x: u32) -> bool {
        let n = self.modulus;
        let mut placed: Vec<u32> = Vec::new();
        let mut bumped: Vec<u32> = Vec::new();
        let mut lab = x;
        let mut ok = true;
        'outer: for i in 0..self.units[u].len() {
            let v = self.units[u][i];
            let l = lab;
            lab = ((lab as u64 * self.multiplier as u64) % n as u64) as u32;
            if self.used.contains(&l) || self.values.binary_search(&l).is_err() {
                ok = false;
                break;
            }
            for &(w, v_smaller) in &self.less[v as usize] {
                let lw = self.labels[w as usize];
                if lw != NONE && v_smaller != (l < lw) {
                    ok = false;
                    break 'outer;
                }
            }
            self.labels[v as usize] = l;
            self.used.insert(l);
            placed.push(v);
            for j in 0..self.adj[v as usize].len() {
                let lw = self.labels[self.adj[v as usize][j] as usize];
                if lw == NONE || self.adj[v as usize][j] == v {
                    continue;
                }
                for d in [(l + n - lw) % n, (lw + n - l) % n] {
                    let c = self.cell[d as usize];
                    if c == NONE {
                        ok = false;
                        break 'outer;
                    }
                    self.load[c as usize] += 1;
                    bumped.push(c);
                    if self.load[c as usize] > self.caps[c as usize] {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        // a rotation orbit must close up on the label orbit
        if ok && lab != x {
            ok = false;
        }
        if !ok {
            self.rollback(placed, bumped);
            return false;
        }
        self.undo.push((placed, bumped));
        true
    }

    fn unassign(&mut self) {
        let (placed, bumped) = self.undo.pop().expect("undo entry");
        self.rollback(placed, bumped);
    }

    /// Depth-first over the fixed unit order; `sink` sees each complete
    /// labeling and returns true to stop.
    fn dfs(&mut self, pos: usize, t: &mut Ticker, sink: &mut dyn FnMut(&[u32]) -> bool) -> Flow {
        if pos == self.order.len() {
            return if sink(&self.labels) { Flow::Found } else { Flow::Continue };
        }
        let u = self.order[pos];
        let values = self.values;
        for &x in values {
            if !t.tick() {
                return Flow::Abort;
            }
            if !self.assign(u, x) {
                continue;
            }
            match self.dfs(pos + 1, t, sink) {
                Flow::Found => return Flow::Found,
                Flow::Abort => {
                    self.unassign();
                    return Flow::Abort;
                }
                Flow::Continue => self.unassign(),
            }
        }
        Flow::Continue
    }
}

/// Vertex units: orbits of the rotation, or single vertices.
fn rotation_units(order: u32, rotation: Option<&[u32]>) -> Vec<Vec<u32>> {
    let Some(map) = rotation else {
        return (0..order).map(|v| vec![v]).collect();
    };
    let mut seen = vec![false; order as usize];
    let mut units = Vec::new();
    for s in 0..order {
        if seen[s as usize] {
            continue;
        }
        let mut unit = Vec::new();
        let mut x = s;
        while !seen[x as usize] {
            seen[x as usize] = true;
            unit.push(x);
            x = map[x as usize];
        }
        units.push(unit);
    }
    units
}

/// Every nonzero residue is its own cell with capacity λ.
fn residue_cells(n: u32, lambda: u32) -> (Vec<u32>, Vec<u32>) {
    let cell = (0..n).map(|x| if x == 0 { NONE } else { x }).collect();
    let caps = (0..n).map(|x| if x == 0 { 0 } else { lambda }).collect();
    (cell, caps)
}

/// Orbits of the multiplier group on Z_n minus the relative subgroup, each
/// with capacity λ. Short orbits are rejected.
fn orbit_cells(
    n: u32,
    multiplier: u32,
    lambda: u32,
    relative: Option<RelativeSubgroup>,
) -> Result<(Vec<u32>, Vec<u32>), SearchError> {
    let group = multiplier_group(multiplier, n);
    let mut cell = vec![NONE; n as usize];
    let mut caps = Vec::new();
    for x in 1..n {
        if cell[x as usize] != NONE || relative.is_some_and(|h| h.contains(x)) {
            continue;
        }
        let mut orbit: Vec<u32> = group.iter().map(|&a| ((a as u64 * x as u64) % n as u64) as u32).collect();
        orbit.sort_unstable();
        orbit.dedup();
        if orbit.len() != group.len() {
            return Err(SearchError::BadSpec(format!(
                "multiplier {multiplier} has a short orbit through {x} in Z_{n}"
            )));
        }
        for y in orbit {
            cell[y as usize] = caps.len() as u32;
        }
        caps.push(lambda);
    }
    Ok((cell, caps))
}

pub struct GracefulSpec<'a> {
    pub set: &'a [u32],
    pub graph: Arc<AbstractGraph>,
    pub modulus: u32,
    pub lambda: u32,
    /// Vertex permutation and multiplier: label(rot(v)) = m label(v).
    pub symmetry: Option<(Vec<u32>, u32)>,
}

/// D-graceful labelings: injective labels from D whose edge differences
/// cover each nonzero residue exactly λ times.
pub fn search_graceful(spec: &GracefulSpec, opts: &SearchOptions) -> Result<SearchResult, SearchError> {
    let n = spec.modulus;
    let g = &spec.graph;
    let need = spec.lambda as u64 * (n as u64 - 1);
    if 2 * g.size() as u64 != need {
        return Err(SearchError::InfeasibleCount(format!(
            "2|E| = {} but λ(n-1) = {need}",
            2 * g.size()
        )));
    }
    let mut values: Vec<u32> = spec.set.iter().map(|&x| x % n).collect();
    values.sort_unstable();
    values.dedup();
    if (g.order() as usize) > values.len() {
        return Ok(SearchResult { status: Status::Exhausted, witness: None, nodes_explored: 0 });
    }
    let (cell, caps) = residue_cells(n, spec.lambda);
    let (units, multiplier, constraints) = match &spec.symmetry {
        Some((rot, m)) => (rotation_units(g.order(), Some(rot)), *m, Vec::new()),
        None => (rotation_units(g.order(), None), 1, cycle_symmetry_constraints(g)),
    };
    let proto = Labeler::new(g, n, &cell, &caps, units, multiplier, &values, &constraints);
    let first = proto.order[0];
    let (status, found, nodes) = drive(values.len(), opts, |i, t| {
        if !t.tick() {
            return None;
        }
        let mut lab = Labeler::new(g, n, &cell, &caps, proto.units.clone(), multiplier, &values, &constraints);
        if !lab.assign(first, values[i]) {
            return None;
        }
        let mut out = None;
        let flow = lab.dfs(1, t, &mut |labels| {
            out = Some(labels.to_vec());
            true
        });
        matches!(flow, Flow::Found).then(|| out.expect("labels"))
    });
    let witness = found.map(|labels| {
        let b = LabeledGraph::new(g.clone(), labels, n).expect("labels below modulus");
        let check = verify_graceful_labeling(&values, &b, spec.lambda);
        assert!(check.verdict.is_pass(), "search produced an invalid labeling: {check:?}");
        Witness::Labeling(b)
    });
    Ok(SearchResult { status, witness, nodes_explored: nodes })
}

/// k'-subsets of D forming a (n, k', λ') difference set.
pub fn search_nested_set(
    set: &[u32],
    n: u32,
    k: u32,
    lambda: u32,
    opts: &SearchOptions,
) -> Result<SearchResult, SearchError> {
    if k as u64 * (k as u64).saturating_sub(1) != lambda as u64 * (n as u64 - 1) {
        return Err(SearchError::InfeasibleCount(format!(
            "k'(k'-1) = {} but λ'(n-1) = {}",
            k as u64 * (k as u64).saturating_sub(1),
            lambda as u64 * (n as u64 - 1)
        )));
    }
    let mut d: Vec<u32> = set.iter().map(|&x| x % n).collect();
    d.sort_unstable();
    d.dedup();
    let k = k as usize;
    if k > d.len() {
        return Ok(SearchResult { status: Status::Exhausted, witness: None, nodes_explored: 0 });
    }
    // translates of a difference set are difference sets, so with D = Z_n
    // the first element may be fixed
    let branches = if d.len() == n as usize { 1 } else { d.len() + 1 - k };

    fn rec(
        d: &[u32],
        n: u32,
        k: usize,
        lambda: u32,
        start: usize,
        chosen: &mut Vec<u32>,
        cov: &mut [u32],
        t: &mut Ticker,
    ) -> Flow {
        if chosen.len() == k {
            return Flow::Found;
        }
        for i in start..=d.len() - (k - chosen.len()) {
            if !t.tick() {
                return Flow::Abort;
            }
            let x = d[i];
            let mut ok = true;
            let mut touched = Vec::new();
            for &y in chosen.iter() {
                for r in [(x + n - y) % n, (y + n - x) % n] {
                    cov[r as usize] += 1;
                    touched.push(r);
                    if cov[r as usize] > lambda {
                        ok = false;
                    }
                }
            }
            if ok {
                chosen.push(x);
                match rec(d, n, k, lambda, i + 1, chosen, cov, t) {
                    Flow::Found => return Flow::Found,
                    Flow::Abort => return Flow::Abort,
                    Flow::Continue => {}
                }
                chosen.pop();
            }
            for r in touched {
                cov[r as usize] -= 1;
            }
        }
        Flow::Continue
    }

    let (status, found, nodes) = drive(branches, opts, |i, t| {
        if !t.tick() {
            return None;
        }
        let mut chosen = vec![d[i]];
        let mut cov = vec![0u32; n as usize];
        if k == 1 {
            return Some(chosen);
        }
        match rec(&d, n, k, lambda, i + 1, &mut chosen, &mut cov, t) {
            Flow::Found => Some(chosen),
            _ => None,
        }
    });
    let witness = found.map(|s| {
        let check = check_nested_difference_set(&d, &s, n, lambda);
        assert!(check.verdict.is_pass(), "search produced an invalid set: {check:?}");
        Witness::Set(s)
    });
    Ok(SearchResult { status, witness, nodes_explored: nodes })
}

/// Subspaces through point 0 with `size` points, one per class under
/// translations and the multiplier group, in increasing order of their
/// greedy generators.
pub fn canonical_subspaces(ctx: &SingerContext, size: usize, multiplier: u32) -> Vec<Vec<u32>> {
    let n = ctx.v_q();
    let group = multiplier_group(multiplier.max(1), n);
    let Some(dim) = ctx.dimension_for_size(size) else { return Vec::new() };
    let mut out = Vec::new();
    let canon = |pts: &[u32]| -> Vec<u32> {
        let mut best: Option<Vec<u32>> = None;
        for &u in &group {
            for &s in pts {
                let mut img: Vec<u32> =
                    pts.iter().map(|&x| ((u as u64 * ((x + n - s) % n) as u64) % n as u64) as u32).collect();
                img.sort_unstable();
                if best.as_ref().is_none_or(|b| img < *b) {
                    best = Some(img);
                }
            }
        }
        best.unwrap_or_default()
    };
    fn grow(
        ctx: &SingerContext,
        cur: Vec<u32>,
        gens: &mut Vec<u32>,
        dim: u32,
        out: &mut Vec<Vec<u32>>,
        canon: &dyn Fn(&[u32]) -> Vec<u32>,
    ) {
        if gens.len() as u32 == dim + 1 {
            let greedy = match ctx.is_subspace(&cur) {
                SubspaceCheck::Subspace(s) => s.generators,
                _ => return,
            };
            if greedy == *gens && canon(&cur) == cur {
                out.push(cur);
            }
            return;
        }
        let last = *gens.last().expect("0 is a generator");
        for g in last + 1..ctx.v_q() {
            if cur.binary_search(&g).is_ok() {
                continue;
            }
            gens.push(g);
            let next = ctx.span(gens).points;
            if next.iter().filter(|x| cur.binary_search(x).is_err()).min() == Some(&g) {
                grow(ctx, next, gens, dim, out, canon);
            }
            gens.pop();
        }
    }
    if size == 1 {
        return vec![vec![0]];
    }
    grow(ctx, vec![0], &mut vec![0], dim, &mut out, &canon);
    out
}

/// Sum of differences of all pairs of S, as cells hit.
fn subspace_reaches_all_cells(points: &[u32], n: u32, cell: &[u32], cells: usize) -> bool {
    let mut hit = vec![false; cells];
    for &a in points {
        for &b in points {
            if a != b {
                let c = cell[((a + n - b) % n) as usize];
                if c != NONE {
                    hit[c as usize] = true;
                }
            }
        }
    }
    hit.iter().all(|&h| h)
}

fn family_candidate(
    ctx: &Arc<SingerContext>,
    blocks: Vec<LabeledGraph>,
    lambda: u32,
    relative: Option<RelativeSubgroup>,
) -> FamilyCandidate {
    FamilyCandidate { ctx: Some(ctx.clone()), modulus: ctx.v_q(), blocks, lambda, relative, subspace_required: true }
}

/// Re-verifies initial blocks (multiplier > 1) or a full family.
fn assert_family(c: FamilyCandidate, multiplier: u32) {
    let full = if multiplier > 1 {
        let ib = InitialBlocks { family: c, multiplier };
        let orbit = check_evenly_distributed(&ib).expect("semiregular multiplier");
        assert!(orbit.verdict.is_pass(), "search produced uneven initial blocks: {:?}", orbit.violations);
        expand_initial_blocks(&ib)
    } else {
        c
    };
    let cert = verify_family(&full);
    assert!(cert.verdict.is_pass(), "search produced an invalid family: {:?}", cert.violations);
}

/// One Γ-subspace whose differences meet every orbit of x -> m x exactly
/// λ times. Subspaces whose differences miss an orbit are skipped.
pub fn search_subspace_block(
    ctx: &Arc<SingerContext>,
    graph: &Arc<AbstractGraph>,
    lambda: u32,
    multiplier: u32,
    opts: &SearchOptions,
) -> Result<SearchResult, SearchError> {
    let n = ctx.v_q();
    let (cell, caps) = orbit_cells(n, multiplier, lambda, None)?;
    let total: u64 = caps.iter().map(|&c| c as u64).sum();
    if 2 * graph.size() as u64 != total {
        return Err(SearchError::InfeasibleCount(format!("2|E| = {} but the orbits need {total}", 2 * graph.size())));
    }
    let subspaces: Vec<Vec<u32>> = canonical_subspaces(ctx, graph.order() as usize, multiplier)
        .into_iter()
        .filter(|s| subspace_reaches_all_cells(s, n, &cell, caps.len()))
        .collect();
    let constraints = cycle_symmetry_constraints(graph);
    let (status, found, nodes) = drive(subspaces.len(), opts, |i, t| {
        if !t.tick() {
            return None;
        }
        let units = rotation_units(graph.order(), None);
        let mut lab = Labeler::new(graph, n, &cell, &caps, units, 1, &subspaces[i], &constraints);
        let mut out = None;
        let flow = lab.dfs(0, t, &mut |labels| {
            out = Some(labels.to_vec());
            true
        });
        matches!(flow, Flow::Found).then(|| out.expect("labels"))
    });
    let witness = found.map(|labels| {
        let b = LabeledGraph::new(graph.clone(), labels, n).expect("labels below modulus");
        assert_family(family_candidate(ctx, vec![b.clone()], lambda, None), multiplier);
        Witness::Family { blocks: vec![b], multiplier }
    });
    Ok(SearchResult { status, witness, nodes_explored: nodes })
}

/// Cover every cell exactly to capacity with distinct options.
fn capacity_cover(caps: &[u32], options: &[Vec<usize>], opts: &SearchOptions) -> (Status, Option<Vec<usize>>, u64) {
    let mut by_cell: Vec<Vec<usize>> = vec![Vec::new(); caps.len()];
    for (i, o) in options.iter().enumerate() {
        let mut cs = o.clone();
        cs.dedup();
        for c in cs {
            by_cell[c].push(i);
        }
    }
    struct State<'a> {
        options: &'a [Vec<usize>],
        by_cell: &'a [Vec<usize>],
        left: Vec<u32>,
        used: Vec<bool>,
        floor: Vec<usize>,
        chosen: Vec<usize>,
    }
    impl State<'_> {
        fn fits(&self, i: usize) -> bool {
            if self.used[i] {
                return false;
            }
            let o = &self.options[i];
            o.iter().all(|&c| o.iter().filter(|&&d| d == c).count() as u32 <= self.left[c])
        }
        fn pick(&self) -> Option<(usize, Vec<usize>)> {
            let mut best: Option<(usize, Vec<usize>)> = None;
            for c in 0..self.left.len() {
                if self.left[c] == 0 {
                    continue;
                }
                let fit: Vec<usize> =
                    self.by_cell[c].iter().copied().filter(|&i| i >= self.floor[c] && self.fits(i)).collect();
                if best.as_ref().is_none_or(|(_, b)| fit.len() < b.len()) {
                    let empty = fit.is_empty();
                    best = Some((c, fit));
                    if empty {
                        break;
                    }
                }
            }
            best
        }
        fn apply(&mut self, i: usize, sign: bool) {
            self.used[i] = sign;
            for &c in &self.options[i] {
                if sign {
                    self.left[c] -= 1;
                } else {
                    self.left[c] += 1;
                }
            }
        }
        fn solve(&mut self, t: &mut Ticker) -> Flow {
            let Some((c, fit)) = self.pick() else { return Flow::Found };
            let saved = self.floor[c];
            for i in fit {
                if !t.tick() {
                    return Flow::Abort;
                }
                self.apply(i, true);
                self.chosen.push(i);
                self.floor[c] = i + 1;
                match self.solve(t) {
                    Flow::Found => return Flow::Found,
                    Flow::Abort => return Flow::Abort,
                    Flow::Continue => {}
                }
                self.chosen.pop();
                self.apply(i, false);
            }
            self.floor[c] = saved;
            Flow::Continue
        }
    }
    let root = State {
        options,
        by_cell: &by_cell,
        left: caps.to_vec(),
        used: vec![false; options.len()],
        floor: vec![0; caps.len()],
        chosen: Vec::new(),
    };
    let Some((c, fit)) = root.pick() else {
        return (Status::Found, Some(Vec::new()), 0);
    };
    drive(fit.len(), opts, |b, t| {
        if !t.tick() {
            return None;
        }
        let mut s = State {
            options,
            by_cell: &by_cell,
            left: root.left.clone(),
            used: root.used.clone(),
            floor: root.floor.clone(),
            chosen: Vec::new(),
        };
        s.apply(fit[b], true);
        s.chosen.push(fit[b]);
        s.floor[c] = fit[b] + 1;
        match s.solve(t) {
            Flow::Found => Some(s.chosen),
            _ => None,
        }
    })
}

pub struct FamilySpec {
    pub graph: Arc<AbstractGraph>,
    pub lambda: u32,
    /// n with the family relative to the subgroup of order [n]_q.
    pub relative: Option<u32>,
    /// Multiplier whose orbits expand initial blocks; 1 for a full family.
    pub multiplier: u32,
}

/// Γ-subspace (relative) difference families, or initial blocks for a
/// multiplier. Phase one lists every Γ-labeling of every subspace class
/// that respects the cell capacities; phase two is an exact cover of the
/// cells by those labelings.
pub fn search_family(
    ctx: &Arc<SingerContext>,
    spec: &FamilySpec,
    opts: &SearchOptions,
) -> Result<SearchResult, SearchError> {
    let n = ctx.v_q();
    let graph = &spec.graph;
    let multiplier = spec.multiplier.max(1);
    let relative = match spec.relative {
        Some(r) => Some(RelativeSubgroup::new(ctx, r).map_err(|e| SearchError::BadSpec(e.to_string()))?),
        None => None,
    };
    let (cell, caps) = orbit_cells(n, multiplier, spec.lambda, relative)?;
    let total: u64 = caps.iter().map(|&c| c as u64).sum();
    let per_block = 2 * graph.size() as u64;
    if per_block == 0 || total % per_block != 0 {
        return Err(SearchError::InfeasibleCount(format!("{per_block} differences per block do not divide {total}")));
    }
    let subspaces = canonical_subspaces(ctx, graph.order() as usize, multiplier);
    let constraints = cycle_symmetry_constraints(graph);

    // phase one, sequential and counted against the budget
    let deadline = Instant::now() + Duration::from_secs_f64(opts.budget.seconds.max(0.0));
    let never = AtomicUsize::new(usize::MAX);
    let mut t = Ticker { nodes: 0, cap: opts.budget.nodes, deadline, cancel: &never, me: 0, stop: None };
    let mut labelings: Vec<Vec<u32>> = Vec::new();
    let mut options: Vec<Vec<usize>> = Vec::new();
    for s in &subspaces {
        let mut seen: HashSet<Vec<(u32, u32)>> = HashSet::new();
        let units = rotation_units(graph.order(), None);
        let mut lab = Labeler::new(graph, n, &cell, &caps, units, 1, s, &constraints);
        let flow = lab.dfs(0, &mut t, &mut |labels| {
            let mut edges: Vec<(u32, u32)> = graph
                .edges()
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (labels[a as usize], labels[b as usize]);
                    (x.min(y), x.max(y))
                })
                .collect();
            edges.sort_unstable();
            if seen.insert(edges.clone()) {
                let mut cells: Vec<usize> = edges
                    .iter()
                    .flat_map(|&(x, y)| [cell[((x + n - y) % n) as usize] as usize, cell[((y + n - x) % n) as usize] as usize])
                    .collect();
                cells.sort_unstable();
                options.push(cells);
                labelings.push(labels.to_vec());
            }
            false
        });
        if matches!(flow, Flow::Abort) {
            return Ok(SearchResult { status: Status::BudgetExceeded, witness: None, nodes_explored: opts.budget.nodes });
        }
    }
    let phase_one = t.nodes;
    let rest = SearchOptions {
        budget: Budget { nodes: opts.budget.nodes - phase_one, seconds: (deadline - Instant::now()).as_secs_f64() },
        jobs: opts.jobs,
    };
    let simple = caps.iter().all(|&c| c == 1);
    let (status, found, nodes) = if simple {
        exact_cover(caps.len(), &options, &rest)
    } else {
        capacity_cover(&caps, &options, &rest)
    };
    let nodes_explored = if status == Status::BudgetExceeded && nodes == rest.budget.nodes {
        opts.budget.nodes
    } else {
        phase_one + nodes
    };
    let witness = found.map(|mut rows| {
        rows.sort_unstable();
        let blocks: Vec<LabeledGraph> = rows
            .iter()
            .map(|&r| LabeledGraph::new(graph.clone(), labelings[r].clone(), n).expect("labels below modulus"))
            .collect();
        assert_family(family_candidate(ctx, blocks.clone(), spec.lambda, relative), multiplier);
        Witness::Family { blocks, multiplier }
    });
    Ok(SearchResult { status, witness, nodes_explored })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    GracefulLabeling { set: Vec<u32>, graph: GraphSpec, lambda: u32 },
    SubspaceBlock { graph: GraphSpec, lambda: u32 },
    Family {
        graph: GraphSpec,
        lambda: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        relative: Option<u32>,
    },
    NestedSet { set: Vec<u32>, k: u32, lambda: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Symmetry {
    pub multiplier: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Rotation>,
}

/// A search request as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDescriptor>,
    /// Modulus for targets that need no field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u32>,
    pub target: Target,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<Symmetry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<Budget>,
    /// Reserved; the search order is fixed.
    #[serde(default)]
    pub seed: u64,
}

impl SearchSpec {
    pub fn context(&self) -> Result<Option<Arc<SingerContext>>, SearchError> {
        match &self.field {
            None => Ok(None),
            Some(d) => {
                let f = d.build().map_err(|e| SearchError::BadSpec(e.to_string()))?;
                Ok(Some(Arc::new(SingerContext::new(Arc::new(f)))))
            }
        }
    }

    fn modulus_with(&self, ctx: Option<&Arc<SingerContext>>) -> Result<u32, SearchError> {
        match (ctx, self.modulus) {
            (Some(c), Some(m)) if m != c.v_q() => {
                Err(SearchError::BadSpec(format!("modulus {m} differs from the field's {}", c.v_q())))
            }
            (Some(c), _) => Ok(c.v_q()),
            (None, Some(m)) if m >= 2 => Ok(m),
            _ => Err(SearchError::BadSpec("a field or a modulus of at least 2 is required".into())),
        }
    }
}

fn build_graph(g: &GraphSpec) -> Result<Arc<AbstractGraph>, SearchError> {
    g.build().map(Arc::new).map_err(|e| SearchError::BadSpec(e.to_string()))
}

/// Runs a spec with its own budget (or the default) on `jobs` workers.
pub fn run_spec(spec: &SearchSpec, jobs: usize) -> Result<SearchResult, SearchError> {
    let budget = spec.budget.unwrap_or_default();
    if !(budget.seconds.is_finite() && budget.seconds >= 0.0) {
        return Err(SearchError::BadSpec("the time budget must be finite".into()));
    }
    let opts = SearchOptions { budget, jobs: jobs.max(1) };
    let ctx = spec.context()?;
    let n = spec.modulus_with(ctx.as_ref())?;
    let need_ctx = || ctx.clone().ok_or_else(|| SearchError::BadSpec("this target needs a field".into()));
    match &spec.target {
        Target::GracefulLabeling { set, graph, lambda } => {
            let graph = build_graph(graph)?;
            let symmetry = match &spec.symmetry {
                None => None,
                Some(s) => {
                    let rot = match &s.rotation {
                        Some(r) => r.permutation(graph.order()).map_err(|e| SearchError::BadSpec(e.to_string()))?,
                        None => (0..graph.order()).collect(),
                    };
                    let units = rotation_units(graph.order(), Some(&rot));
                    let period = units.iter().fold(1u64, |a, u| num_integer::lcm(a, u.len() as u64));
                    let closes = multiplier_group(s.multiplier, n).len() as u64;
                    if let Some(c) = &ctx {
                        if c.v() as u64 % period != 0 {
                            return Err(SearchError::BadSpec(format!(
                                "rotation order {period} does not divide v = {}",
                                c.v()
                            )));
                        }
                    }
                    if period % closes != 0 && closes % period != 0 {
                        return Err(SearchError::BadSpec("rotation and multiplier orders are incompatible".into()));
                    }
                    Some((rot, s.multiplier % n))
                }
            };
            search_graceful(&GracefulSpec { set, graph, modulus: n, lambda: *lambda, symmetry }, &opts)
        }
        Target::SubspaceBlock { graph, lambda } => {
            let ctx = need_ctx()?;
            let m = spec.symmetry.as_ref().map(|s| s.multiplier).unwrap_or(ctx.q());
            search_subspace_block(&ctx, &build_graph(graph)?, *lambda, m, &opts)
        }
        Target::Family { graph, lambda, relative } => {
            let ctx = need_ctx()?;
            let multiplier = spec.symmetry.as_ref().map(|s| s.multiplier).unwrap_or(1);
            let fs = FamilySpec { graph: build_graph(graph)?, lambda: *lambda, relative: *relative, multiplier };
            search_family(&ctx, &fs, &opts)
        }
        Target::NestedSet { set, k, lambda } => search_nested_set(set, n, *k, *lambda, &opts),
    }
}
