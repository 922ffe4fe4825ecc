//! k-uniform hypergraphs, vertex partitions and index vectors.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::util::for_each_combination;

/// Dense vertex index into a [`KGraph`] or an implicit host.
pub type Vertex = usize;

/// Anything that can answer edge membership queries.
pub trait Host {
    fn k(&self) -> usize;
    fn vertex_count(&self) -> usize;
    /// `vertices` may be in any order.
    fn has_edge(&self, vertices: &[Vertex]) -> bool;
    fn vertex_name(&self, v: Vertex) -> String;
}

/// A k-uniform hypergraph. Vertex names are opaque strings interned to
/// `0..n`; every edge is stored sorted and the edge list is sorted.
#[derive(Clone, Debug)]
pub struct KGraph {
    k: usize,
    names: Vec<String>,
    index: HashMap<String, Vertex>,
    edges: Vec<Vec<Vertex>>,
    lookup: HashSet<Vec<Vertex>>,
}

impl PartialEq for KGraph {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.names == other.names && self.edges == other.edges
    }
}

impl Eq for KGraph {}

impl KGraph {
    /// Builds a graph from named vertices and named edges.
    pub fn new(k: usize, names: Vec<String>, edges: Vec<Vec<String>>) -> Result<Self> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("vertex {name:?} listed twice")));
            }
        }
        let mut idx_edges = Vec::with_capacity(edges.len());
        for e in edges {
            let mut ie = Vec::with_capacity(e.len());
            for v in &e {
                match index.get(v) {
                    Some(&i) => ie.push(i),
                    None => {
                        return Err(Error::InvalidGraph(format!("edge uses unknown vertex {v:?}")))
                    }
                }
            }
            idx_edges.push(ie);
        }
        Self::build(k, names, index, idx_edges)
    }

    /// Vertices are named `1..=n`.
    pub fn from_indices(k: usize, n: usize, edges: Vec<Vec<Vertex>>) -> Result<Self> {
        let names = (1..=n).map(|i| i.to_string()).collect();
        Self::with_names(k, names, edges)
    }

    pub fn with_names(k: usize, names: Vec<String>, edges: Vec<Vec<Vertex>>) -> Result<Self> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("vertex {name:?} listed twice")));
            }
        }
        Self::build(k, names, index, edges)
    }

    fn build(
        k: usize,
        names: Vec<String>,
        index: HashMap<String, Vertex>,
        edges: Vec<Vec<Vertex>>,
    ) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidGraph(format!("uniformity must be at least 2, got {k}")));
        }
        let n = names.len();
        let mut lookup = HashSet::with_capacity(edges.len());
        let mut sorted_edges = Vec::with_capacity(edges.len());
        for mut e in edges {
            if e.len() != k {
                return Err(Error::InvalidGraph(format!(
                    "edge has {} vertices, expected {k}",
                    e.len()
                )));
            }
            e.sort_unstable();
            if e.iter().any(|&v| v >= n) {
                return Err(Error::InvalidGraph("edge vertex out of range".into()));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                let name = &names[e.windows(2).find(|w| w[0] == w[1]).unwrap()[0]];
                return Err(Error::InvalidGraph(format!("edge repeats vertex {name:?}")));
            }
            if !lookup.insert(e.clone()) {
                let shown: Vec<&str> = e.iter().map(|&v| names[v].as_str()).collect();
                return Err(Error::InvalidGraph(format!("duplicate edge {shown:?}")));
            }
            sorted_edges.push(e);
        }
        sorted_edges.sort_unstable();
        Ok(KGraph {
            k,
            names,
            index,
            edges: sorted_edges,
            lookup,
        })
    }

    /// Complete k-partite graph with the given class sizes; classes occupy
    /// consecutive vertex ranges.
    pub fn complete_multipartite(sizes: &[usize]) -> Result<Self> {
        let k = sizes.len();
        let n: usize = sizes.iter().sum();
        let limit = 2_000_000usize;
        let count = sizes.iter().fold(1usize, |acc, &s| acc.saturating_mul(s));
        crate::error::guard("complete multipartite edge count", count, limit)?;
        let mut starts = Vec::with_capacity(k);
        let mut acc = 0;
        for &s in sizes {
            starts.push(acc);
            acc += s;
        }
        let mut edges = Vec::with_capacity(count);
        let mut cur = vec![0usize; k];
        if sizes.iter().all(|&s| s > 0) {
            'outer: loop {
                edges.push((0..k).map(|i| starts[i] + cur[i]).collect());
                let mut i = k;
                loop {
                    if i == 0 {
                        break 'outer;
                    }
                    i -= 1;
                    cur[i] += 1;
                    if cur[i] < sizes[i] {
                        break;
                    }
                    cur[i] = 0;
                }
            }
        }
        Self::from_indices(k, n, edges)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn edges(&self) -> &[Vec<Vertex>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Option<Vertex> {
        self.index.get(name).copied()
    }

    pub fn contains_edge(&self, vertices: &[Vertex]) -> bool {
        let mut e = vertices.to_vec();
        e.sort_unstable();
        self.lookup.contains(&e)
    }

    /// Number of edges through each vertex.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n()];
        for e in &self.edges {
            for &v in e {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Number of edges containing the set `s`.
    pub fn degree(&self, s: &[Vertex]) -> Result<usize> {
        if s.len() > self.k {
            return Err(Error::Domain(format!(
                "degree of a {}-set in a {}-graph",
                s.len(),
                self.k
            )));
        }
        let mut sorted = s.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) || sorted.iter().any(|&v| v >= self.n()) {
            return Err(Error::Domain("degree set is not a set of host vertices".into()));
        }
        Ok(self
            .edges
            .iter()
            .filter(|e| sorted.iter().all(|v| e.binary_search(v).is_ok()))
            .count())
    }

    /// Minimum degree over all (k-1)-sets, with the lexicographically first
    /// set attaining it.
    pub fn min_codegree(&self) -> Result<Codegree> {
        let r = self.k - 1;
        if self.n() < r {
            return Err(Error::Domain(format!(
                "{} vertices cannot hold a {r}-set",
                self.n()
            )));
        }
        let mut counts: HashMap<Vec<Vertex>, usize> = HashMap::new();
        let mut sub = Vec::with_capacity(r);
        for e in &self.edges {
            for skip in 0..self.k {
                sub.clear();
                sub.extend(e.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
                *counts.entry(sub.clone()).or_insert(0) += 1;
            }
        }
        let mut best: Option<Codegree> = None;
        for_each_combination(self.n(), r, |c| {
            let d = counts.get(c).copied().unwrap_or(0);
            if best.as_ref().map_or(true, |b| d < b.value) {
                best = Some(Codegree {
                    value: d,
                    witness: c.to_vec(),
                });
            }
            d > 0
        });
        Ok(best.expect("at least one (k-1)-set exists"))
    }

    /// The 2-section: `u ~ v` when some edge contains both.
    pub fn adjacency(&self) -> Adjacency {
        let n = self.n();
        let mut nbrs: Vec<Vec<Vertex>> = vec![Vec::new(); n];
        for e in &self.edges {
            for (i, &u) in e.iter().enumerate() {
                for &v in &e[i + 1..] {
                    nbrs[u].push(v);
                    nbrs[v].push(u);
                }
            }
        }
        for l in &mut nbrs {
            l.sort_unstable();
            l.dedup();
        }
        let mut component = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if component[s] != usize::MAX {
                continue;
            }
            component[s] = count;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &nbrs[u] {
                    if component[v] == usize::MAX {
                        component[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        Adjacency {
            neighbours: nbrs,
            component,
            component_count: count,
        }
    }

    /// `Adj(H)` as a 2-graph on the same vertex names.
    pub fn adjacency_graph(&self) -> KGraph {
        let adj = self.adjacency();
        let edges = adj
            .neighbours
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| vec![u, v]))
            .collect();
        KGraph::with_names(2, self.names.clone(), edges).expect("pairs of distinct vertices")
    }

    /// Vertices lying in no edge.
    pub fn isolated_vertices(&self) -> Vec<Vertex> {
        let deg = self.vertex_degrees();
        (0..self.n()).filter(|&v| deg[v] == 0).collect()
    }

    /// Relabels vertex `v` of `self` as `map[v]` in a graph on `n` vertices.
    pub fn relabelled(&self, n: usize, map: &[Vertex]) -> Result<KGraph> {
        let edges = self
            .edges
            .iter()
            .map(|e| e.iter().map(|&v| map[v]).collect())
            .collect();
        KGraph::from_indices(self.k, n, edges)
    }
}

impl Host for KGraph {
    fn k(&self) -> usize {
        self.k
    }
    fn vertex_count(&self) -> usize {
        self.n()
    }
    fn has_edge(&self, vertices: &[Vertex]) -> bool {
        self.contains_edge(vertices)
    }
    fn vertex_name(&self, v: Vertex) -> String {
        self.names[v].clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codegree {
    pub value: usize,
    pub witness: Vec<Vertex>,
}

#[derive(Clone, Debug)]
pub struct Adjacency {
    pub neighbours: Vec<Vec<Vertex>>,
    pub component: Vec<usize>,
    pub component_count: usize,
}

impl Adjacency {
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut out = vec![Vec::new(); self.component_count];
        for (v, &c) in self.component.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    pub fn is_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.neighbours[u].binary_search(&v).is_ok()
    }

    /// Shortest path from `u` to `v`, preferring low-index neighbours.
    pub fn shortest_path(&self, u: Vertex, v: Vertex) -> Option<Vec<Vertex>> {
        let n = self.neighbours.len();
        let mut prev = vec![usize::MAX; n];
        prev[u] = u;
        let mut queue = std::collections::VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            if x == v {
                let mut path = vec![v];
                let mut cur = v;
                while cur != u {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &y in &self.neighbours[x] {
                if prev[y] == usize::MAX {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        None
    }
}

/// An ordered partition of `0..n` into `r` (possibly empty) parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    part_of: Vec<usize>,
    r: usize,
}

impl VertexPartition {
    pub fn new(part_of: Vec<usize>, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::Domain("partition needs at least one part".into()));
        }
        if let Some(&p) = part_of.iter().find(|&&p| p >= r) {
            return Err(Error::Domain(format!("part index {p} out of range for {r} parts")));
        }
        Ok(VertexPartition { part_of, r })
    }

    /// Parts given as consecutive blocks of the given sizes.
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let part_of = sizes
            .iter()
            .enumerate()
            .flat_map(|(i, &s)| std::iter::repeat(i).take(s))
            .collect();
        VertexPartition {
            part_of,
            r: sizes.len(),
        }
    }

    pub fn from_parts(n: usize, parts: &[Vec<Vertex>]) -> Result<Self> {
        let mut part_of = vec![usize::MAX; n];
        for (i, p) in parts.iter().enumerate() {
            for &v in p {
                if v >= n || part_of[v] != usize::MAX {
                    return Err(Error::Domain(format!("vertex {v} misplaced in partition")));
                }
                part_of[v] = i;
            }
        }
        if part_of.contains(&usize::MAX) {
            return Err(Error::Domain("partition does not cover every vertex".into()));
        }
        Self::new(part_of, parts.len())
    }

    pub fn part_count(&self) -> usize {
        self.r
    }

    pub fn vertex_count(&self) -> usize {
        self.part_of.len()
    }

    pub fn part_of(&self, v: Vertex) -> usize {
        self.part_of[v]
    }

    pub fn parts(&self) -> Vec<Vec<Vertex>> {
        let mut out = vec![Vec::new(); self.r];
        for (v, &p) in self.part_of.iter().enumerate() {
            out[p].push(v);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.r];
        for &p in &self.part_of {
            out[p] += 1;
        }
        out
    }

    /// Per-part counts of `s`, reduced mod `d` (`d = 0` means no reduction).
    pub fn index_vector(&self, s: &[Vertex], d: u64) -> IndexVector {
        let mut coords = vec![0u64; self.r];
        for &v in s {
            coords[self.part_of[v]] += 1;
        }
        IndexVector::new(coords, d)
    }
}

/// A vector in `Z_d^r` (or `Z^r` when `modulus == 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexVector {
    pub coords: Vec<u64>,
    pub modulus: u64,
}

impl IndexVector {
    pub fn new(mut coords: Vec<u64>, modulus: u64) -> Self {
        if modulus > 0 {
            for c in &mut coords {
                *c %= modulus;
            }
        }
        IndexVector { coords, modulus }
    }

    pub fn zero(r: usize, modulus: u64) -> Self {
        IndexVector {
            coords: vec![0; r],
            modulus,
        }
    }

    pub fn unit(r: usize, j: usize, modulus: u64) -> Self {
        let mut v = Self::zero(r, modulus);
        v.coords[j] = 1 % modulus.max(2);
        v
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn add(&self, other: &IndexVector) -> IndexVector {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        IndexVector::new(coords, self.modulus)
    }

    pub fn scale(&self, c: u64) -> IndexVector {
        IndexVector::new(self.coords.iter().map(|a| a * c).collect(), self.modulus)
    }

    pub fn coord_sum(&self) -> u64 {
        let s: u64 = self.coords.iter().sum();
        if self.modulus > 0 {
            s % self.modulus
        } else {
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_pair() -> KGraph {
        // {1,2,3} and {3,4,1}
        KGraph::from_indices(3, 4, vec![vec![0, 1, 2], vec![2, 3, 0]]).unwrap()
    }

    #[test]
    fn duplicate_edges_rejected() {
        let err = KGraph::from_indices(3, 3, vec![vec![0, 1, 2], vec![2, 1, 0]]);
        assert!(matches!(err, Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn wrong_arity_rejected() {
        assert!(KGraph::from_indices(3, 3, vec![vec![0, 1]]).is_err());
        assert!(KGraph::from_indices(1, 3, vec![]).is_err());
    }

    #[test]
    fn names_round_trip() {
        let g = KGraph::new(
            2,
            vec!["a".into(), "b".into()],
            vec![vec!["b".into(), "a".into()]],
        )
        .unwrap();
        assert_eq!(g.edges(), &[vec![0, 1]]);
        assert_eq!(g.vertex("b"), Some(1));
    }

    #[test]
    fn degrees_and_codegree() {
        let g = triangle_pair();
        assert_eq!(g.degree(&[0, 2]).unwrap(), 2);
        assert_eq!(g.degree(&[]).unwrap(), 2);
        assert_eq!(g.degree(&[1, 3]).unwrap(), 0);
        assert!(g.degree(&[0, 1, 2, 3]).is_err());
        let c = g.min_codegree().unwrap();
        assert_eq!(c.value, 0);
        assert_eq!(c.witness, vec![1, 3]);
    }

    #[test]
    fn codegree_needs_enough_vertices() {
        let g = KGraph::from_indices(4, 2, vec![]).unwrap();
        assert!(g.min_codegree().is_err());
    }

    #[test]
    fn complete_multipartite_counts() {
        let g = KGraph::complete_multipartite(&[1, 2, 3]).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.n(), 6);
        assert_eq!(g.min_codegree().unwrap().value, 0);
    }

    #[test]
    fn components_and_paths() {
        let g = KGraph::from_indices(2, 5, vec![vec![0, 1], vec![1, 2], vec![3, 4]]).unwrap();
        let adj = g.adjacency();
        assert_eq!(adj.component_count, 2);
        assert_eq!(adj.shortest_path(0, 2), Some(vec![0, 1, 2]));
        assert_eq!(adj.shortest_path(0, 3), None);
    }

    #[test]
    fn index_vectors_reduce() {
        let p = VertexPartition::from_sizes(&[2, 3]);
        let iv = p.index_vector(&[0, 1, 2, 3, 4], 2);
        assert_eq!(iv.coords, vec![0, 1]);
        assert_eq!(p.sizes(), vec![2, 3]);
    }
}
