//! Copy enumeration on hosts of at most 64 vertices, with vertex sets as
//! `u64` masks.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{domain, guard, Result};
use crate::graph::{KGraph, Vertex};

use super::SearchConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CopyMode {
    /// Every injective edge-preserving map.
    Labelled,
    /// One map per image vertex set.
    Unlabelled,
}

/// Restrictions on the copies an enumeration may emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CopyConstraints {
    /// Host vertices a copy may use.
    pub allowed: u64,
    /// Pattern vertex `.0` must map to host vertex `.1`.
    pub pin: Option<(Vertex, Vertex)>,
    /// At most `.1` image vertices may lie in mask `.0`.
    pub cap: Option<(u64, usize)>,
}

impl Default for CopyConstraints {
    fn default() -> Self {
        CopyConstraints {
            allowed: u64::MAX,
            pin: None,
            cap: None,
        }
    }
}

pub fn mask_of(vertices: &[Vertex]) -> u64 {
    vertices.iter().fold(0u64, |m, &v| m | (1u64 << v))
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Host adjacency data reused across searches.
pub(crate) struct HostIndex {
    n: usize,
    adj: Vec<u64>,
    degree: Vec<usize>,
    /// `(k-1)`-set (sorted) to the vertices completing it to an edge.
    link: HashMap<Vec<Vertex>, u64>,
}

impl HostIndex {
    pub(crate) fn new(host: &KGraph) -> Self {
        let n = host.n();
        let mut adj = vec![0u64; n];
        let mut link: HashMap<Vec<Vertex>, u64> = HashMap::new();
        let mut sub = Vec::with_capacity(host.k());
        for e in host.edges() {
            let m = mask_of(e);
            for (i, &v) in e.iter().enumerate() {
                adj[v] |= m & !(1u64 << v);
                sub.clear();
                sub.extend(e.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &u)| u));
                *link.entry(sub.clone()).or_insert(0) |= 1u64 << v;
            }
        }
        HostIndex {
            n,
            adj,
            degree: host.vertex_degrees(),
            link,
        }
    }
}

/// Placement order and per-step constraints for one pattern.
struct Plan {
    order: Vec<Vertex>,
    /// Earlier positions adjacent to each position.
    adjacent: Vec<Vec<usize>>,
    /// Pattern edges completed at each position, as the other positions.
    closing: Vec<Vec<Vec<usize>>>,
    /// Earlier position of a twin, whose image must be smaller.
    twin_before: Vec<Option<usize>>,
    degree: Vec<usize>,
}

/// `swap(u, v)` is an automorphism.
fn are_twins(pattern: &KGraph, u: Vertex, v: Vertex) -> bool {
    pattern.edges().iter().all(|e| {
        let mapped: Vec<Vertex> = e
            .iter()
            .map(|&x| if x == u { v } else if x == v { u } else { x })
            .collect();
        pattern.contains_edge(&mapped)
    })
}

impl Plan {
    fn new(pattern: &KGraph, first: Option<Vertex>, break_twins: bool) -> Self {
        let b = pattern.n();
        let deg = pattern.vertex_degrees();
        let adjp = pattern.adjacency();
        let mut placed = vec![false; b];
        let mut order = Vec::with_capacity(b);
        let start = first.unwrap_or_else(|| (0..b).max_by_key(|&v| (deg[v], std::cmp::Reverse(v))).unwrap());
        order.push(start);
        placed[start] = true;
        while order.len() < b {
            let score = |v: Vertex| {
                let closes = pattern
                    .edges()
                    .iter()
                    .filter(|e| e.contains(&v) && e.iter().all(|&x| x == v || placed[x]))
                    .count();
                let links = adjp.neighbours[v].iter().filter(|&&x| placed[x]).count();
                (closes, links, deg[v], std::cmp::Reverse(v))
            };
            let next = (0..b).filter(|&v| !placed[v]).max_by_key(|&v| score(v)).unwrap();
            order.push(next);
            placed[next] = true;
        }
        let mut pos = vec![0; b];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let adjacent = order
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let mut l: Vec<usize> = adjp.neighbours[v].iter().map(|&x| pos[x]).filter(|&p| p < i).collect();
                l.sort_unstable();
                l
            })
            .collect();
        let mut closing = vec![Vec::new(); b];
        for e in pattern.edges() {
            let last = e.iter().map(|&x| pos[x]).max().unwrap();
            let others: Vec<usize> = e.iter().map(|&x| pos[x]).filter(|&p| p != last).collect();
            closing[last].push(others);
        }
        let mut twin_before = vec![None; b];
        if break_twins {
            for i in 0..b {
                for j in (0..i).rev() {
                    if are_twins(pattern, order[i], order[j]) {
                        twin_before[i] = Some(j);
                        break;
                    }
                }
            }
        }
        Plan {
            order,
            adjacent,
            closing,
            twin_before,
            degree: deg,
        }
    }
}

/// Calls `visit(map, image)` for each copy of `pattern` in `host` until it
/// returns `false`. Returns the number of search nodes.
pub(crate) fn visit_copies(
    pattern: &KGraph,
    host: &KGraph,
    index: &HostIndex,
    mode: CopyMode,
    constraints: &CopyConstraints,
    mut visit: impl FnMut(&[Vertex], u64) -> bool,
) -> u64 {
    let b = pattern.n();
    if b == 0 || b > host.n() {
        return 0;
    }
    let break_twins = mode == CopyMode::Unlabelled && constraints.pin.is_none();
    let plan = Plan::new(pattern, constraints.pin.map(|p| p.0), break_twins);
    let allowed = constraints.allowed & full_mask(index.n);
    let deg_ok: Vec<u64> = plan
        .order
        .iter()
        .map(|&v| {
            let need = plan.degree[v];
            (0..index.n)
                .filter(|&h| index.degree[h] >= need)
                .fold(0u64, |m, h| m | (1u64 << h))
        })
        .collect();
    let mut walker = Walker {
        plan: &plan,
        index,
        allowed,
        deg_ok,
        constraints,
        mode,
        images: vec![0; b],
        map: vec![0; b],
        seen: HashSet::new(),
        nodes: 0,
        key: Vec::with_capacity(host.k()),
    };
    walker.rec(0, 0, &mut visit);
    walker.nodes
}

struct Walker<'a> {
    plan: &'a Plan,
    index: &'a HostIndex,
    allowed: u64,
    deg_ok: Vec<u64>,
    constraints: &'a CopyConstraints,
    mode: CopyMode,
    images: Vec<usize>,
    map: Vec<usize>,
    seen: HashSet<u64>,
    nodes: u64,
    key: Vec<Vertex>,
}

impl Walker<'_> {
    fn candidates(&mut self, i: usize, used: u64) -> u64 {
        let plan = self.plan;
        let mut cand = self.allowed & !used & self.deg_ok[i];
        if i == 0 {
            if let Some((_, h)) = self.constraints.pin {
                cand &= 1u64 << h;
            }
        }
        for &p in &plan.adjacent[i] {
            cand &= self.index.adj[self.images[p]];
        }
        for others in &plan.closing[i] {
            if cand == 0 {
                return 0;
            }
            self.key.clear();
            self.key.extend(others.iter().map(|&p| self.images[p]));
            self.key.sort_unstable();
            cand &= self.index.link.get(self.key.as_slice()).copied().unwrap_or(0);
        }
        if let Some(t) = plan.twin_before[i] {
            let lo = self.images[t] + 1;
            cand &= if lo >= 64 { 0 } else { !((1u64 << lo) - 1) };
        }
        if let Some((mask, cap)) = self.constraints.cap {
            if (used & mask).count_ones() as usize >= cap {
                cand &= !mask;
            }
        }
        cand
    }

    fn rec(&mut self, i: usize, used: u64, visit: &mut dyn FnMut(&[Vertex], u64) -> bool) -> bool {
        self.nodes += 1;
        if i == self.plan.order.len() {
            if self.mode == CopyMode::Unlabelled && !self.seen.insert(used) {
                return true;
            }
            for (p, &v) in self.plan.order.iter().enumerate() {
                self.map[v] = self.images[p];
            }
            return visit(&self.map, used);
        }
        let mut cand = self.candidates(i, used);
        while cand != 0 {
            let h = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            self.images[i] = h;
            if !self.rec(i + 1, used | (1u64 << h), visit) {
                return false;
            }
        }
        true
    }
}

/// Enumerated copies with a per-vertex occurrence index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyIndex {
    pub maps: Vec<Vec<Vertex>>,
    pub images: Vec<u64>,
    /// `by_vertex[v]` lists the copies using host vertex `v`.
    pub by_vertex: Vec<Vec<u32>>,
    /// False when the enumeration stopped at the limit.
    pub complete: bool,
    pub nodes: u64,
}

impl CopyIndex {
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

pub(crate) fn check_host(pattern: &KGraph, host: &KGraph, config: &SearchConfig) -> Result<()> {
    if pattern.k() != host.k() {
        return domain(format!(
            "pattern is {}-uniform but host is {}-uniform",
            pattern.k(),
            host.k()
        ));
    }
    guard("host vertex count", host.n(), config.max_vertices.min(64))
}

pub fn find_copies(
    pattern: &KGraph,
    host: &KGraph,
    mode: CopyMode,
    limit: Option<usize>,
) -> Result<CopyIndex> {
    find_copies_with(pattern, host, mode, &CopyConstraints::default(), limit, &SearchConfig::default())
}

pub fn find_copies_with(
    pattern: &KGraph,
    host: &KGraph,
    mode: CopyMode,
    constraints: &CopyConstraints,
    limit: Option<usize>,
    config: &SearchConfig,
) -> Result<CopyIndex> {
    check_host(pattern, host, config)?;
    let index = HostIndex::new(host);
    let mut maps = Vec::new();
    let mut images = Vec::new();
    let mut complete = true;
    let cap = limit.unwrap_or(usize::MAX);
    let mut over = false;
    let nodes = visit_copies(pattern, host, &index, mode, constraints, |m, img| {
        if maps.len() == cap {
            complete = false;
            return false;
        }
        if maps.len() == config.copy_cap {
            over = true;
            return false;
        }
        maps.push(m.to_vec());
        images.push(img);
        true
    });
    if over {
        guard("copy count", config.copy_cap + 1, config.copy_cap)?;
    }
    let mut by_vertex = vec![Vec::new(); host.n()];
    for (i, &img) in images.iter().enumerate() {
        let mut m = img;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            by_vertex[v].push(i as u32);
        }
    }
    Ok(CopyIndex {
        maps,
        images,
        by_vertex,
        complete,
        nodes,
    })
}

type CacheKey = (usize, usize, Vec<Vec<Vertex>>, usize, Vec<Vec<Vertex>>);

const CACHE_ENTRIES: usize = 32;

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<CopyIndex>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<CopyIndex>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Unlabelled copies of `pattern` in `host`, memoised for the process.
pub fn unlabelled_copies(pattern: &KGraph, host: &KGraph, config: &SearchConfig) -> Result<Arc<CopyIndex>> {
    let key: CacheKey = (
        pattern.k(),
        pattern.n(),
        pattern.edges().to_vec(),
        host.n(),
        host.edges().to_vec(),
    );
    if let Some(hit) = cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let idx = Arc::new(find_copies_with(
        pattern,
        host,
        CopyMode::Unlabelled,
        &CopyConstraints::default(),
        None,
        config,
    )?);
    let mut c = cache().lock().unwrap();
    if c.len() >= CACHE_ENTRIES {
        c.clear();
    }
    c.insert(key, idx.clone());
    Ok(idx)
}

/// The first copy using host vertex `u`: pattern vertices are tried in
/// order as the preimage of `u`.
pub fn copy_through_vertex(pattern: &KGraph, host: &KGraph, u: Vertex) -> Result<Option<Vec<Vertex>>> {
    copy_through_vertex_with(pattern, host, u, &SearchConfig::default())
}

pub fn copy_through_vertex_with(
    pattern: &KGraph,
    host: &KGraph,
    u: Vertex,
    config: &SearchConfig,
) -> Result<Option<Vec<Vertex>>> {
    if u >= host.n() {
        return domain(format!("vertex {u} is not in the host"));
    }
    check_host(pattern, host, config)?;
    let index = HostIndex::new(host);
    for x in 0..pattern.n() {
        let constraints = CopyConstraints {
            pin: Some((x, u)),
            ..CopyConstraints::default()
        };
        let mut found = None;
        visit_copies(pattern, host, &index, CopyMode::Labelled, &constraints, |m, _| {
            found = Some(m.to_vec());
            false
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// A copy of `C^3_3` meeting `a` and its complement in odd numbers of vertices.
pub fn find_odd_split_c33(host: &KGraph, a: &[Vertex]) -> Result<Option<Vec<Vertex>>> {
    find_odd_split_c33_with(host, a, &SearchConfig::default())
}

pub fn find_odd_split_c33_with(
    host: &KGraph,
    a: &[Vertex],
    config: &SearchConfig,
) -> Result<Option<Vec<Vertex>>> {
    if host.k() != 3 {
        return domain(format!("odd-split search needs a 3-graph, got k = {}", host.k()));
    }
    if let Some(&v) = a.iter().find(|&&v| v >= host.n()) {
        return domain(format!("vertex {v} is not in the host"));
    }
    let c33 = crate::realisation::loose_cycle(3, 3)?;
    check_host(&c33, host, config)?;
    let amask = mask_of(a);
    let index = HostIndex::new(host);
    let mut found = None;
    visit_copies(&c33, host, &index, CopyMode::Unlabelled, &CopyConstraints::default(), |m, img| {
        if (img & amask).count_ones() % 2 == 1 {
            found = Some(m.to_vec());
            false
        } else {
            true
        }
    });
    Ok(found)
}
