//! Graph families, labeled graphs over Z_n and their difference lists.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{is_prime, pow_mod, prime_factors};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("labels collide at vertex {vertex}")]
    Collision { vertex: u32 },
    #[error("seed leaves vertex {vertex} unlabeled")]
    SeedIncomplete { vertex: u32 },
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("{r} is not a primitive root modulo {p}")]
    NotPrimitiveRoot { p: u32, r: u32 },
}

/// Named graph families. Vertex indexing:
/// cycles and paths run 0..k-1 consecutively; prisms and generalized
/// Petersen graphs list the outer ring 0..n-1 then the inner ring n..2n-1
/// with spokes i ~ n+i; the Moebius ladder M_2n is the circulant
/// C(Z_2n; {1, n}); Q_3* indexes the nonzero cube vertices b by b-1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Complete { k: u32 },
    Cycle { k: u32 },
    Path { k: u32 },
    Prism { n: u32 },
    Petersen { n: u32, t: u32 },
    Moebius { n: u32 },
    Q3Star,
    Circulant { n: u32, connections: Vec<u32> },
    CliqueUnion { sizes: Vec<u32> },
    Union { parts: Vec<Family> },
    NullUnion { base: Box<Family>, d: u32 },
    Null { d: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractGraph {
    order: u32,
    edges: Vec<(u32, u32)>,
    family: Option<Family>,
}

impl AbstractGraph {
    pub fn from_edges(order: u32, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b || a >= order || b >= order {
                return Err(GraphError::BadParams(format!("bad edge ({a},{b}) for order {order}")));
            }
            norm.push((a.min(b), a.max(b)));
        }
        let mut sorted = norm.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != norm.len() {
            return Err(GraphError::BadParams("duplicate edge".into()));
        }
        Ok(AbstractGraph { order, edges: norm, family: None })
    }

    pub fn order(&self) -> u32 {
        self.order
    }
    pub fn size(&self) -> usize {
        self.edges.len()
    }
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }
    pub fn family(&self) -> Option<&Family> {
        self.family.as_ref()
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0; self.order as usize];
        for &(a, b) in &self.edges {
            d[a as usize] += 1;
            d[b as usize] += 1;
        }
        d
    }

    pub fn isolated_count(&self) -> u32 {
        self.degrees().iter().filter(|&&d| d == 0).count() as u32
    }

    pub fn neighbors(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.order as usize];
        for &(a, b) in &self.edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Connected components as vertex lists, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let adj = self.neighbors();
        let mut seen = vec![false; self.order as usize];
        let mut out = Vec::new();
        for s in 0..self.order {
            if seen[s as usize] {
                continue;
            }
            seen[s as usize] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                for &w in &adj[comp[i] as usize] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

fn cycle_edges(offset: u32, k: u32, out: &mut Vec<(u32, u32)>) {
    for i in 0..k {
        out.push((offset + i, offset + (i + 1) % k));
    }
}

fn family_edges(f: &Family) -> Result<(u32, Vec<(u32, u32)>), GraphError> {
    let bad = |m: &str| Err(GraphError::BadParams(m.to_string()));
    let mut e = Vec::new();
    let order = match f {
        Family::Complete { k } => {
            for i in 0..*k {
                for j in i + 1..*k {
                    e.push((i, j));
                }
            }
            *k
        }
        Family::Cycle { k } => {
            if *k < 3 {
                return bad("cycles need k >= 3");
            }
            cycle_edges(0, *k, &mut e);
            *k
        }
        Family::Path { k } => {
            if *k < 1 {
                return bad("paths need k >= 1");
            }
            for i in 0..k - 1 {
                e.push((i, i + 1));
            }
            *k
        }
        Family::Prism { n } => {
            if *n < 3 {
                return bad("prisms need n >= 3");
            }
            cycle_edges(0, *n, &mut e);
            cycle_edges(*n, *n, &mut e);
            for i in 0..*n {
                e.push((i, n + i));
            }
            2 * n
        }
        Family::Petersen { n, t } => {
            if *n < 5 || *t < 2 || *t > n - 2 || 2 * t == *n {
                return bad("Petersen graphs need n >= 5, 2 <= t <= n-2, 2t != n");
            }
            cycle_edges(0, *n, &mut e);
            let mut inner = HashSet::new();
            for i in 0..*n {
                let (a, b) = (n + i, n + (i + t) % n);
                if inner.insert((a.min(b), a.max(b))) {
                    e.push((a, b));
                }
            }
            for i in 0..*n {
                e.push((i, n + i));
            }
            2 * n
        }
        Family::Moebius { n } => {
            if *n < 2 {
                return bad("Moebius ladders need n >= 2");
            }
            return family_edges(&Family::Circulant { n: 2 * n, connections: vec![1, *n] });
        }
        Family::Q3Star => {
            for a in 1u32..8 {
                for bit in [1u32, 2, 4] {
                    let b = a ^ bit;
                    if b > a {
                        e.push((a - 1, b - 1));
                    }
                }
            }
            7
        }
        Family::Circulant { n, connections } => {
            let mut seen = HashSet::new();
            for &s in connections {
                if s == 0 || s >= *n {
                    return bad("circulant connections must lie in 1..n-1");
                }
                for i in 0..*n {
                    let j = (i + s) % n;
                    let key = (i.min(j), i.max(j));
                    if seen.insert(key) {
                        e.push((i, j));
                    }
                }
            }
            *n
        }
        Family::CliqueUnion { sizes } => {
            let mut off = 0;
            for &k in sizes {
                for i in 0..k {
                    for j in i + 1..k {
                        e.push((off + i, off + j));
                    }
                }
                off += k;
            }
            off
        }
        Family::Union { parts } => {
            let mut off = 0;
            for p in parts {
                let (o, pe) = family_edges(p)?;
                e.extend(pe.into_iter().map(|(a, b)| (a + off, b + off)));
                off += o;
            }
            off
        }
        Family::NullUnion { base, d } => {
            let (o, pe) = family_edges(base)?;
            e = pe;
            o + d
        }
        Family::Null { d } => *d,
    };
    Ok((order, e))
}

pub fn make_family_graph(f: &Family) -> Result<AbstractGraph, GraphError> {
    let (order, edges) = family_edges(f)?;
    let mut g = AbstractGraph::from_edges(order, &edges)?;
    g.family = Some(f.clone());
    Ok(g)
}

/// Graph as stored in JSON: a family tag, or an explicit edge list, or both
/// (then they must agree).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[u32; 2]>>,
}

impl GraphSpec {
    pub fn family(f: Family) -> Self {
        GraphSpec { family: Some(f), order: None, edges: None }
    }

    pub fn build(&self) -> Result<AbstractGraph, GraphError> {
        let explicit = match (&self.order, &self.edges) {
            (Some(o), Some(e)) => {
                let pairs: Vec<(u32, u32)> = e.iter().map(|p| (p[0], p[1])).collect();
                Some(AbstractGraph::from_edges(*o, &pairs)?)
            }
            (None, None) => None,
            (Some(o), None) => Some(AbstractGraph::from_edges(*o, &[])?),
            (None, Some(_)) => return Err(GraphError::BadParams("edges given without order".into())),
        };
        match (&self.family, explicit) {
            (Some(f), None) => make_family_graph(f),
            (None, Some(g)) => Ok(g),
            (Some(f), Some(g)) => {
                let fam = make_family_graph(f)?;
                let norm = |g: &AbstractGraph| {
                    let mut e = g.edges.clone();
                    e.sort_unstable();
                    e
                };
                if fam.order != g.order || norm(&fam) != norm(&g) {
                    return Err(GraphError::BadParams("edge list disagrees with family".into()));
                }
                Ok(fam)
            }
            (None, None) => Err(GraphError::BadParams("graph needs a family or an edge list".into())),
        }
    }
}

/// Vertex rotation used with Frobenius seeds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rotation {
    /// Vertices split into consecutive rings of length `ring`; each ring
    /// shifts by `step`.
    RingShift { ring: u32, step: u32 },
    Permutation { map: Vec<u32> },
}

impl Rotation {
    pub fn permutation(&self, order: u32) -> Result<Vec<u32>, GraphError> {
        let map = match self {
            Rotation::RingShift { ring, step } => {
                if *ring == 0 || order % ring != 0 {
                    return Err(GraphError::BadParams(format!("ring {ring} does not divide {order}")));
                }
                (0..order).map(|x| x - x % ring + (x % ring + step) % ring).collect()
            }
            Rotation::Permutation { map } => map.clone(),
        };
        let mut check = map.clone();
        check.sort_unstable();
        if check != (0..order).collect::<Vec<_>>() {
            return Err(GraphError::BadParams("rotation is not a permutation".into()));
        }
        Ok(map)
    }

    /// Order of the permutation.
    pub fn order(&self, order: u32) -> Result<u32, GraphError> {
        let map = self.permutation(order)?;
        let mut lcm = 1u64;
        let mut seen = vec![false; map.len()];
        for s in 0..map.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0u64;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = map[x] as usize;
                len += 1;
            }
            lcm = num_integer::lcm(lcm, len);
        }
        Ok(lcm as u32)
    }
}

/// A graph whose vertex i carries label `labels[i]` in Z_modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Arc<AbstractGraph>,
    pub labels: Vec<u32>,
    pub modulus: u32,
}

impl LabeledGraph {
    pub fn new(graph: Arc<AbstractGraph>, labels: Vec<u32>, modulus: u32) -> Result<Self, GraphError> {
        if labels.len() != graph.order() as usize {
            return Err(GraphError::BadParams(format!(
                "{} labels for a graph of order {}",
                labels.len(),
                graph.order()
            )));
        }
        if let Some(&x) = labels.iter().find(|&&x| x >= modulus) {
            return Err(GraphError::BadParams(format!("label {x} not below {modulus}")));
        }
        Ok(LabeledGraph { graph, labels, modulus })
    }

    pub fn is_injective(&self) -> bool {
        let mut s = self.labels.clone();
        s.sort_unstable();
        s.windows(2).all(|w| w[0] != w[1])
    }

    pub fn translate(&self, t: u32) -> LabeledGraph {
        let n = self.modulus as u64;
        let labels = self.labels.iter().map(|&x| ((x as u64 + t as u64) % n) as u32).collect();
        LabeledGraph { graph: self.graph.clone(), labels, modulus: self.modulus }
    }

    pub fn scale(&self, u: u32) -> LabeledGraph {
        let n = self.modulus as u64;
        let labels = self.labels.iter().map(|&x| ((x as u64 * u as u64) % n) as u32).collect();
        LabeledGraph { graph: self.graph.clone(), labels, modulus: self.modulus }
    }

    /// Edges as sorted label pairs; the drawing-independent content.
    pub fn edge_labels(&self) -> Vec<(u32, u32)> {
        let mut e: Vec<(u32, u32)> = self
            .graph
            .edges()
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (self.labels[a as usize], self.labels[b as usize]);
                (x.min(y), x.max(y))
            })
            .collect();
        e.sort_unstable();
        e
    }

    pub fn point_set(&self) -> Vec<u32> {
        let mut s = self.labels.clone();
        s.sort_unstable();
        s
    }
}

/// Multiplicities of the residues of Z_modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceList {
    pub modulus: u32,
    pub counts: Vec<u32>,
}

impl DifferenceList {
    pub fn new(modulus: u32) -> Self {
        DifferenceList { modulus, counts: vec![0; modulus as usize] }
    }

    pub fn add_graph(&mut self, b: &LabeledGraph) {
        let n = self.modulus;
        for &(u, w) in b.graph.edges() {
            let (x, y) = (b.labels[u as usize], b.labels[w as usize]);
            self.counts[((x + n - y) % n) as usize] += 1;
            self.counts[((y + n - x) % n) as usize] += 1;
        }
    }

    pub fn merge(&mut self, other: &DifferenceList) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn get(&self, x: u32) -> u32 {
        self.counts[(x % self.modulus) as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.modulus as usize;
        (0..n).all(|x| self.counts[x] == self.counts[(n - x) % n])
    }
}

pub fn difference_list(b: &LabeledGraph) -> DifferenceList {
    let mut d = DifferenceList::new(b.modulus);
    d.add_graph(b);
    d
}

/// Entry (i, j) is label(i) - label(j) when i and j are adjacent.
pub fn difference_table(b: &LabeledGraph) -> Vec<Vec<Option<u32>>> {
    let k = b.graph.order() as usize;
    let n = b.modulus;
    let mut t = vec![vec![None; k]; k];
    for &(u, w) in b.graph.edges() {
        let (x, y) = (b.labels[u as usize], b.labels[w as usize]);
        t[u as usize][w as usize] = Some((x + n - y) % n);
        t[w as usize][u as usize] = Some((y + n - x) % n);
    }
    t
}

/// Log: r^i -> i mod `classes` on Z_p^*.
#[derive(Debug, Clone)]
pub struct LogMap {
    p: u32,
    classes: u32,
    log: Vec<u32>,
}

impl LogMap {
    pub fn new(p: u32, r: u32, classes: u32) -> Result<Self, GraphError> {
        if !is_prime(p as u64) {
            return Err(GraphError::NotPrime(p));
        }
        let r = r % p;
        let primitive = p == 2 && r == 1
            || r != 0 && prime_factors(p as u64 - 1).iter().all(|&f| pow_mod(r as u64, (p as u64 - 1) / f, p as u64) != 1);
        if !primitive {
            return Err(GraphError::NotPrimitiveRoot { p, r });
        }
        if classes == 0 || (p - 1) % classes != 0 {
            return Err(GraphError::BadParams(format!("{classes} does not divide {}", p - 1)));
        }
        let mut log = vec![u32::MAX; p as usize];
        let mut x = 1u64;
        for i in 0..p - 1 {
            log[x as usize] = i % classes;
            x = x * r as u64 % p as u64;
        }
        Ok(LogMap { p, classes, log })
    }

    pub fn classes(&self) -> u32 {
        self.classes
    }

    pub fn log(&self, x: u32) -> Option<u32> {
        let l = self.log[(x % self.p) as usize];
        (l != u32::MAX).then_some(l)
    }

    pub fn table(&self, t: &[Vec<Option<u32>>]) -> Vec<Vec<Option<u32>>> {
        t.iter().map(|row| row.iter().map(|c| c.and_then(|x| self.log(x))).collect()).collect()
    }

    /// Class multiplicities of a difference list.
    pub fn image(&self, d: &DifferenceList) -> Vec<u32> {
        let mut out = vec![0; self.classes as usize];
        for (x, &c) in d.counts.iter().enumerate().skip(1) {
            if let Some(l) = self.log(x as u32) {
                out[l as usize] += c;
            }
        }
        out
    }
}

/// Log image with classes = (p-1)/v, the Frobenius orbit count.
pub fn log_image(p: u32, r: u32, v: u32, d: &DifferenceList) -> Result<Vec<u32>, GraphError> {
    if v == 0 || (p - 1) % v != 0 {
        return Err(GraphError::BadParams(format!("{v} does not divide {}", p - 1)));
    }
    Ok(LogMap::new(p, r, (p - 1) / v)?.image(d))
}

/// Completes a labeling from a seed on a transversal of the rotation's
/// vertex orbits, with label(rotation(x)) = multiplier * label(x).
pub fn expand_frobenius_seed(
    graph: Arc<AbstractGraph>,
    seed: &[(u32, u32)],
    rotation: &[u32],
    multiplier: u32,
    modulus: u32,
) -> Result<LabeledGraph, GraphError> {
    let k = graph.order();
    if rotation.len() != k as usize {
        return Err(GraphError::BadParams("rotation length differs from graph order".into()));
    }
    let mut labels: Vec<Option<u32>> = vec![None; k as usize];
    for &(v0, l0) in seed {
        if v0 >= k {
            return Err(GraphError::BadParams(format!("seed vertex {v0} out of range")));
        }
        let (mut x, mut lab) = (v0, l0 % modulus);
        loop {
            match labels[x as usize] {
                Some(old) if old != lab => return Err(GraphError::Collision { vertex: x }),
                _ => labels[x as usize] = Some(lab),
            }
            x = rotation[x as usize];
            lab = ((lab as u64 * multiplier as u64) % modulus as u64) as u32;
            if x == v0 {
                if lab != l0 % modulus {
                    return Err(GraphError::Collision { vertex: v0 });
                }
                break;
            }
        }
    }
    let labels = labels
        .iter()
        .enumerate()
        .map(|(i, l)| l.ok_or(GraphError::SeedIncomplete { vertex: i as u32 }))
        .collect::<Result<Vec<_>, _>>()?;
    let b = LabeledGraph::new(graph, labels, modulus)?;
    if !b.is_injective() {
        let mut seen = HashSet::new();
        let v = b.labels.iter().position(|l| !seen.insert(*l)).unwrap_or(0);
        return Err(GraphError::Collision { vertex: v as u32 });
    }
    Ok(b)
}
