//! Implicit hosts: blow-ups of a small template graph.
//!
//! A blow-up replaces template vertex `j` by a class `Y_j` of `sizes[j]`
//! vertices; a k-set is an edge when its vertices lie in distinct classes
//! whose labels form a template edge. Complete k-partite graphs are the
//! blow-ups of a single edge.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::graph::{Host, KGraph, Vertex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupHost {
    template: KGraph,
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlowupHost {
    pub fn new(template: KGraph, sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() != template.n() {
            return Err(Error::Domain(format!(
                "{} class sizes for a template on {} vertices",
                sizes.len(),
                template.n()
            )));
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for &s in &sizes {
            acc = acc
                .checked_add(s)
                .ok_or_else(|| Error::Domain("host too large".into()))?;
            offsets.push(acc);
        }
        Ok(BlowupHost {
            template,
            sizes,
            offsets,
        })
    }

    /// Complete k-partite graph with the given class sizes.
    pub fn complete(sizes: &[usize]) -> Result<Self> {
        let k = sizes.len();
        let template = KGraph::from_indices(k, k, vec![(0..k).collect()])?;
        Self::new(template, sizes.to_vec())
    }

    pub fn template(&self) -> &KGraph {
        &self.template
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn class_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn class_range(&self, j: usize) -> Range<Vertex> {
        self.offsets[j]..self.offsets[j + 1]
    }

    pub fn class_of(&self, v: Vertex) -> usize {
        self.offsets.partition_point(|&o| o <= v) - 1
    }

    pub fn is_complete(&self) -> bool {
        self.template.edge_count() == 1 && self.template.n() == self.template.k()
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<Vertex> {
        let (label, idx) = name.rsplit_once('.')?;
        let j = self.template.vertex(label)?;
        let i: usize = idx.parse().ok()?;
        (i < self.sizes[j]).then(|| self.offsets[j] + i)
    }

    /// Explicit edge list; refuses when there would be more than `edge_limit` edges.
    pub fn to_kgraph(&self, edge_limit: usize) -> Result<KGraph> {
        let mut total = 0usize;
        for e in self.template.edges() {
            let c = e
                .iter()
                .fold(1usize, |acc, &j| acc.saturating_mul(self.sizes[j]));
            total = total.saturating_add(c);
        }
        crate::error::guard("blow-up edge count", total, edge_limit)?;
        let mut edges = Vec::with_capacity(total);
        for e in self.template.edges() {
            let ranges: Vec<Range<Vertex>> = e.iter().map(|&j| self.class_range(j)).collect();
            if ranges.iter().any(|r| r.is_empty()) {
                continue;
            }
            let mut cur: Vec<Vertex> = ranges.iter().map(|r| r.start).collect();
            'outer: loop {
                edges.push(cur.clone());
                let mut i = cur.len();
                loop {
                    if i == 0 {
                        break 'outer;
                    }
                    i -= 1;
                    cur[i] += 1;
                    if cur[i] < ranges[i].end {
                        break;
                    }
                    cur[i] = ranges[i].start;
                }
            }
        }
        let names = (0..self.vertex_count()).map(|v| self.vertex_name(v)).collect();
        KGraph::with_names(self.template.k(), names, edges)
    }
}

impl Host for BlowupHost {
    fn k(&self) -> usize {
        self.template.k()
    }

    fn vertex_count(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn has_edge(&self, vertices: &[Vertex]) -> bool {
        if vertices.len() != self.k() || vertices.iter().any(|&v| v >= self.vertex_count()) {
            return false;
        }
        let mut classes: Vec<usize> = vertices.iter().map(|&v| self.class_of(v)).collect();
        classes.sort_unstable();
        if classes.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        self.template.contains_edge(&classes)
    }

    fn vertex_name(&self, v: Vertex) -> String {
        let j = self.class_of(v);
        format!("{}.{}", self.template.name(j), v - self.offsets[j])
    }
}

/// Either an explicit graph or an implicit blow-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HostSpec {
    Graph(KGraph),
    Blowup(BlowupHost),
}

impl HostSpec {
    pub fn vertex_by_name(&self, name: &str) -> Option<Vertex> {
        match self {
            HostSpec::Graph(g) => g.vertex(name),
            HostSpec::Blowup(b) => b.vertex_by_name(name),
        }
    }

    /// Explicit form, materialising blow-ups up to `edge_limit` edges.
    pub fn to_kgraph(&self, edge_limit: usize) -> Result<KGraph> {
        match self {
            HostSpec::Graph(g) => Ok(g.clone()),
            HostSpec::Blowup(b) => b.to_kgraph(edge_limit),
        }
    }
}

impl From<KGraph> for HostSpec {
    fn from(g: KGraph) -> Self {
        HostSpec::Graph(g)
    }
}

impl From<BlowupHost> for HostSpec {
    fn from(b: BlowupHost) -> Self {
        HostSpec::Blowup(b)
    }
}

impl Host for HostSpec {
    fn k(&self) -> usize {
        match self {
            HostSpec::Graph(g) => g.k(),
            HostSpec::Blowup(b) => b.k(),
        }
    }
    fn vertex_count(&self) -> usize {
        match self {
            HostSpec::Graph(g) => g.n(),
            HostSpec::Blowup(b) => b.vertex_count(),
        }
    }
    fn has_edge(&self, vertices: &[Vertex]) -> bool {
        match self {
            HostSpec::Graph(g) => g.contains_edge(vertices),
            HostSpec::Blowup(b) => b.has_edge(vertices),
        }
    }
    fn vertex_name(&self, v: Vertex) -> String {
        match self {
            HostSpec::Graph(g) => g.name(v).to_string(),
            HostSpec::Blowup(b) => b.vertex_name(v),
        }
    }
}
