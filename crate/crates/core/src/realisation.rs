//! Rainbow k-colourings of a k-graph and the invariants derived from them.

use std::collections::BTreeSet;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{guard, Error, Result};
use crate::graph::{KGraph, Vertex};
use crate::util::{factorial, gcd_all, smallest_prime_factor};

/// An ordered partition of `V(K)` into `k` classes such that every edge
/// meets every class exactly once.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Realisation {
    pub classes: Vec<Vec<Vertex>>,
}

impl Realisation {
    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    /// `colour[v]` is the class index of `v`.
    pub fn colouring(&self, n: usize) -> Vec<usize> {
        let mut c = vec![usize::MAX; n];
        for (j, class) in self.classes.iter().enumerate() {
            for &v in class {
                c[v] = j;
            }
        }
        c
    }

    /// Same classes, reordered so that class `j` becomes position `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Realisation {
        let mut classes = vec![Vec::new(); self.classes.len()];
        for (j, class) in self.classes.iter().enumerate() {
            classes[perm[j]] = class.clone();
        }
        Realisation { classes }
    }

    pub fn is_valid_for(&self, g: &KGraph) -> bool {
        if self.classes.len() != g.k() {
            return false;
        }
        let c = self.colouring(g.n());
        if c.contains(&usize::MAX) {
            return false;
        }
        g.edges().iter().all(|e| {
            let mut seen = vec![false; g.k()];
            e.iter().all(|&v| !std::mem::replace(&mut seen[c[v]], true))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RealisationMode {
    /// All orderings of the classes.
    Ordered,
    /// One representative per set partition: classes sorted by size, ties
    /// broken by smallest vertex.
    Unordered,
}

/// Default cap on the number of unordered realisations.
pub const REALISATION_LIMIT: usize = 1_000_000;

pub fn enumerate_realisations(g: &KGraph, mode: RealisationMode) -> Result<Vec<Realisation>> {
    enumerate_realisations_with_limit(g, mode, REALISATION_LIMIT)
}

pub fn enumerate_realisations_with_limit(
    g: &KGraph,
    mode: RealisationMode,
    limit: usize,
) -> Result<Vec<Realisation>> {
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    if let Some(&v) = g.isolated_vertices().first() {
        return Err(Error::IsolatedVertex(g.name(v).to_string()));
    }
    let k = g.k();
    let colourings = proper_colourings(g, limit)?;
    if colourings.is_empty() {
        return Err(Error::NotKPartite);
    }
    let mut reps: Vec<Realisation> = colourings
        .into_iter()
        .map(|col| {
            let mut classes = vec![Vec::new(); k];
            for (v, &c) in col.iter().enumerate() {
                classes[c as usize].push(v);
            }
            classes.sort_by_key(|c| (c.len(), c[0]));
            Realisation { classes }
        })
        .collect();
    reps.sort();
    match mode {
        RealisationMode::Unordered => Ok(reps),
        RealisationMode::Ordered => {
            let perms = crate::util::permutations(k);
            guard("ordered realisation count", reps.len() * perms.len(), limit.saturating_mul(24))?;
            Ok(reps
                .iter()
                .flat_map(|r| perms.iter().map(move |p| r.permuted(p)))
                .collect())
        }
    }
}

/// Proper k-colourings of the 2-section in restricted-growth form, so each
/// set partition appears exactly once.
fn proper_colourings(g: &KGraph, limit: usize) -> Result<Vec<Vec<u8>>> {
    let n = g.n();
    let k = g.k();
    let adj = g.adjacency();
    // BFS order keeps constraints close together.
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in &adj.neighbours[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let earlier: Vec<Vec<usize>> = order
        .iter()
        .map(|&v| {
            adj.neighbours[v]
                .iter()
                .map(|&w| pos[w])
                .filter(|&p| p < pos[v])
                .collect()
        })
        .collect();
    let ctx = Ctx {
        k,
        earlier: &earlier,
        limit,
    };

    // Expand a shallow frontier sequentially, then finish branches in parallel.
    let mut frontier: Vec<(Vec<u8>, u8)> = vec![(Vec::new(), 0)];
    while frontier.len() < 64 && frontier.first().map_or(false, |f| f.0.len() < n) {
        let mut next = Vec::new();
        for (prefix, used) in frontier {
            for c in ctx.options(&prefix, used) {
                let mut p = prefix.clone();
                p.push(c);
                next.push((p, used.max(c + 1)));
            }
        }
        frontier = next;
    }
    let counter = std::sync::atomic::AtomicUsize::new(0);
    let parts: Vec<Result<Vec<Vec<u8>>>> = frontier
        .into_par_iter()
        .map(|(prefix, used)| {
            let mut out = Vec::new();
            let mut cur = prefix;
            ctx.extend(&mut cur, used, n, &mut out, &counter)?;
            Ok(out)
        })
        .collect();
    let mut result = Vec::new();
    for p in parts {
        result.extend(p?);
    }
    // back to vertex order
    Ok(result
        .into_iter()
        .map(|col| {
            let mut by_vertex = vec![0u8; n];
            for (i, &v) in order.iter().enumerate() {
                by_vertex[v] = col[i];
            }
            by_vertex
        })
        .collect())
}

struct Ctx<'a> {
    k: usize,
    earlier: &'a [Vec<usize>],
    limit: usize,
}

impl Ctx<'_> {
    fn options(&self, prefix: &[u8], used: u8) -> Vec<u8> {
        let i = prefix.len();
        let top = (used as usize + 1).min(self.k) as u8;
        (0..top)
            .filter(|&c| self.earlier[i].iter().all(|&p| prefix[p] != c))
            .collect()
    }

    fn extend(
        &self,
        cur: &mut Vec<u8>,
        used: u8,
        n: usize,
        out: &mut Vec<Vec<u8>>,
        counter: &std::sync::atomic::AtomicUsize,
    ) -> Result<()> {
        if cur.len() == n {
            if used as usize == self.k {
                let c = counter.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                guard("realisation count", c + 1, self.limit)?;
                out.push(cur.clone());
            }
            return Ok(());
        }
        for c in self.options(cur, used) {
            cur.push(c);
            self.extend(cur, used.max(c + 1), n, out, counter)?;
            cur.pop();
        }
        Ok(())
    }
}

/// Guard for exact vertex cover.
pub const VERTEX_COVER_GUARD: usize = 28;

/// A minimum vertex cover, by branch and bound with a disjoint-edge lower bound.
pub fn min_vertex_cover(g: &KGraph) -> Result<Vec<Vertex>> {
    guard("vertex count for exact vertex cover", g.n(), VERTEX_COVER_GUARD)?;
    let edges: Vec<u64> = g
        .edges()
        .iter()
        .map(|e| e.iter().fold(0u64, |m, &v| m | (1 << v)))
        .collect();
    // greedy upper bound: take every vertex of a maximal matching
    let mut best: u64 = 0;
    for &e in &edges {
        if e & best == 0 {
            best |= e;
        }
    }
    let mut best_count = best.count_ones();
    fn rec(edges: &[u64], chosen: u64, banned: u64, best: &mut u64, best_count: &mut u32) {
        let count = chosen.count_ones();
        let open: Vec<u64> = edges.iter().copied().filter(|&e| e & chosen == 0).collect();
        if open.is_empty() {
            if count < *best_count {
                *best = chosen;
                *best_count = count;
            }
            return;
        }
        let mut used = 0u64;
        let mut lb = 0;
        for &e in &open {
            if e & used == 0 {
                used |= e;
                lb += 1;
            }
        }
        if count + lb >= *best_count {
            return;
        }
        // branch on the open edge with fewest allowed vertices
        let e = *open
            .iter()
            .min_by_key(|&&e| (e & !banned).count_ones())
            .unwrap();
        let mut allowed = e & !banned;
        let mut banned_here = banned;
        while allowed != 0 {
            let v = allowed.trailing_zeros();
            allowed &= allowed - 1;
            rec(edges, chosen | (1 << v), banned_here, best, best_count);
            banned_here |= 1 << v;
        }
    }
    rec(&edges, 0, 0, &mut best, &mut best_count);
    Ok((0..g.n()).filter(|&v| best & (1 << v) != 0).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum KType {
    Zero,
    D(u64),
}

impl std::fmt::Display for KType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KType::Zero => write!(f, "0"),
            KType::D(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralProfile {
    pub k: usize,
    pub b: usize,
    pub sigma_set: Vec<u64>,
    pub diff_set: Vec<u64>,
    /// `None` when every realisation is balanced.
    pub gcd: Option<u64>,
    pub sigma: Ratio<u64>,
    pub tau: Ratio<u64>,
    pub kind: KType,
    /// Number of ordered realisations.
    pub realisation_count: u64,
    pub unordered_count: usize,
    pub min_cover: Vec<Vertex>,
}

impl StructuralProfile {
    pub fn sigma_gcd(&self) -> u64 {
        gcd_all(self.sigma_set.iter().copied())
    }
}

pub fn structural_profile(g: &KGraph) -> Result<StructuralProfile> {
    let reps = enumerate_realisations(g, RealisationMode::Unordered)?;
    profile_from_realisations(g, &reps)
}

pub fn profile_from_realisations(g: &KGraph, reps: &[Realisation]) -> Result<StructuralProfile> {
    let k = g.k();
    let b = g.n();
    let mut sigma_set = BTreeSet::new();
    let mut diff_set = BTreeSet::new();
    for r in reps {
        let sizes = r.sizes();
        for &a in &sizes {
            sigma_set.insert(a as u64);
            for &c in &sizes {
                diff_set.insert(a.abs_diff(c) as u64);
            }
        }
    }
    let gcd = match gcd_all(diff_set.iter().copied()) {
        0 => None,
        d => Some(d),
    };
    let sigma_set: Vec<u64> = sigma_set.into_iter().collect();
    let diff_set: Vec<u64> = diff_set.into_iter().collect();
    let sigma = Ratio::new(sigma_set[0], b as u64);
    let cover = min_vertex_cover(g)?;
    let tau = Ratio::new(cover.len() as u64, b as u64);
    let sigma_gcd = gcd_all(sigma_set.iter().copied());
    let kind = if sigma_gcd > 1 || sigma_set == [1] {
        KType::Zero
    } else {
        KType::D(gcd.expect("unbalanced realisations exist when the class sizes are coprime"))
    };
    Ok(StructuralProfile {
        k,
        b,
        sigma_set,
        diff_set,
        gcd,
        sigma,
        tau,
        kind,
        realisation_count: reps.len() as u64 * factorial(k),
        unordered_count: reps.len(),
        min_cover: cover,
    })
}

/// One row of the bound table: which property holds and the resulting
/// asymptotic threshold for a perfect packing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRow {
    pub property: &'static str,
    pub kind: KType,
    pub bound: String,
}

pub fn bound_row(p: &StructuralProfile) -> BoundRow {
    if p.sigma_set == [1] {
        return BoundRow {
            property: "sigma_set = {1}",
            kind: KType::Zero,
            bound: "n/2".into(),
        };
    }
    if p.sigma_gcd() > 1 {
        return BoundRow {
            property: "gcd(sigma_set) > 1",
            kind: KType::Zero,
            bound: "n/2".into(),
        };
    }
    match p.kind {
        KType::D(1) => BoundRow {
            property: "gcd(K) = 1",
            kind: p.kind,
            bound: format!("sigma n = {} n", p.sigma),
        },
        KType::D(d) => {
            let q = smallest_prime_factor(d).unwrap();
            BoundRow {
                property: "gcd(sigma_set) = 1, gcd(K) = d > 1",
                kind: p.kind,
                bound: format!("max(sigma n, n/p) = max({} n, n/{q})", p.sigma),
            }
        }
        KType::Zero => unreachable!("type zero handled above"),
    }
}

/// Loose cycle: vertices `1..=s(k-1)`, edge `j` runs over the `k`
/// consecutive vertices starting at `j(k-1)+1`, wrapping around.
pub fn loose_cycle(k: usize, s: usize) -> Result<KGraph> {
    if k < 2 || s < 2 {
        return Err(Error::Domain(format!("loose cycle needs k >= 2 and s >= 2, got k={k}, s={s}")));
    }
    let n = s * (k - 1);
    let edges = (0..s)
        .map(|j| (0..k).map(|i| (j * (k - 1) + i) % n).collect())
        .collect();
    KGraph::from_indices(k, n, edges)
}

pub const CYCLE_GUARD: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleReport {
    pub k: usize,
    pub s: usize,
    pub sigma: Ratio<u64>,
    pub tau: Ratio<u64>,
    pub gcd: Option<u64>,
    pub expected_fraction: Ratio<u64>,
    pub expected_gcd: Option<u64>,
    pub unordered_count: usize,
    pub passed: bool,
}

/// Compares computed parameters of a loose cycle with the closed forms.
pub fn verify_cycle_parameters(k: usize, s: usize) -> Result<CycleReport> {
    if k < 3 {
        return Err(Error::Domain(format!("cycle parameters are stated for k >= 3, got {k}")));
    }
    guard("loose cycle vertex count", s * (k - 1), CYCLE_GUARD)?;
    let g = loose_cycle(k, s)?;
    let p = structural_profile(&g)?;
    let expected_fraction = Ratio::new(s.div_ceil(2) as u64, (s * (k - 1)) as u64);
    let expected_gcd = if (k, s) == (3, 3) { None } else { Some(1) };
    let passed = p.sigma == expected_fraction
        && p.tau == expected_fraction
        && p.gcd == expected_gcd
        && ((k, s) != (3, 3) || p.unordered_count == 1);
    Ok(CycleReport {
        k,
        s,
        sigma: p.sigma,
        tau: p.tau,
        gcd: p.gcd,
        expected_fraction,
        expected_gcd,
        unordered_count: p.unordered_count,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Sets A,B,C,D,E of sizes 1,1,2,2,6 with edges A×C×E and B×D×E.
    fn two_fans() -> KGraph {
        let (a, b, c, d) = (0, 1, [2, 3], [4, 5]);
        let e: Vec<usize> = (6..12).collect();
        let mut edges = Vec::new();
        for &x in &c {
            for &y in &e {
                edges.push(vec![a, x, y]);
            }
        }
        for &x in &d {
            for &y in &e {
                edges.push(vec![b, x, y]);
            }
        }
        KGraph::from_indices(3, 12, edges).unwrap()
    }

    #[test]
    fn two_fan_profile() {
        let g = two_fans();
        let reps = enumerate_realisations(&g, RealisationMode::Unordered).unwrap();
        let mut sigs: Vec<Vec<usize>> = reps.iter().map(|r| r.sizes()).collect();
        sigs.sort();
        assert_eq!(sigs, vec![vec![2, 4, 6], vec![3, 3, 6]]);
        let p = profile_from_realisations(&g, &reps).unwrap();
        assert_eq!(p.sigma_set, vec![2, 3, 4, 6]);
        assert_eq!(p.diff_set, vec![0, 2, 3, 4]);
        assert_eq!(p.gcd, Some(1));
        assert_eq!(p.sigma, Ratio::new(1, 6));
        assert_eq!(p.kind, KType::D(1));
        assert_eq!(p.realisation_count, 12);
    }

    #[test]
    fn ordered_count_is_k_factorial_multiple() {
        let g = two_fans();
        let ord = enumerate_realisations(&g, RealisationMode::Ordered).unwrap();
        assert_eq!(ord.len(), 12);
        assert!(ord.iter().all(|r| r.is_valid_for(&g)));
    }

    #[test]
    fn errors_for_degenerate_input() {
        let empty = KGraph::from_indices(3, 3, vec![]).unwrap();
        assert!(matches!(
            enumerate_realisations(&empty, RealisationMode::Ordered),
            Err(Error::NoEdges)
        ));
        let iso = KGraph::from_indices(3, 4, vec![vec![0, 1, 2]]).unwrap();
        assert!(matches!(
            enumerate_realisations(&iso, RealisationMode::Ordered),
            Err(Error::IsolatedVertex(_))
        ));
        // the complete 3-graph on 4 vertices has no rainbow colouring
        let k4 = KGraph::from_indices(
            3,
            4,
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap();
        assert!(matches!(
            enumerate_realisations(&k4, RealisationMode::Unordered),
            Err(Error::NotKPartite)
        ));
    }

    #[test]
    fn loose_cycle_edges() {
        let c32 = loose_cycle(3, 2).unwrap();
        assert_eq!(c32.edges(), &[vec![0, 1, 2], vec![0, 2, 3]]);
        let c42 = loose_cycle(4, 2).unwrap();
        assert_eq!(c42.edges(), &[vec![0, 1, 2, 3], vec![0, 3, 4, 5]]);
    }

    #[test]
    fn c33_is_uniquely_realisable() {
        let g = loose_cycle(3, 3).unwrap();
        let reps = enumerate_realisations(&g, RealisationMode::Unordered).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].classes, vec![vec![0, 3], vec![1, 4], vec![2, 5]]);
        let p = structural_profile(&g).unwrap();
        assert_eq!(p.gcd, None);
        assert_eq!(p.kind, KType::Zero);
    }

    #[test]
    fn cover_of_short_cycle() {
        let g = loose_cycle(3, 2).unwrap();
        assert_eq!(min_vertex_cover(&g).unwrap().len(), 1);
        let p = structural_profile(&g).unwrap();
        assert_eq!(p.tau, Ratio::new(1, 4));
        assert_eq!(p.sigma, Ratio::new(1, 4));
    }

    #[test]
    fn vertex_cover_guard() {
        let g = loose_cycle(3, 15).unwrap();
        assert!(matches!(min_vertex_cover(&g), Err(Error::Guard { .. })));
    }
}
