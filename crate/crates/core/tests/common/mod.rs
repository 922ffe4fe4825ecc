//! Naive oracles and fixtures shared by the integration tests. Everything
//! here is brute force and independent of the library's algorithms.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use hyperpack::realisation::loose_cycle;
use hyperpack::{BlowupHost, KGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(n, r, v + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, r, 0, &mut Vec::new(), &mut out);
    out
}

pub fn complete_graph(k: usize, n: usize) -> KGraph {
    KGraph::from_indices(k, n, subsets(n, k)).unwrap()
}

pub fn random_graph(k: usize, n: usize, density: f64, rng: &mut impl Rng) -> KGraph {
    let edges = subsets(n, k).into_iter().filter(|_| rng.gen_bool(density)).collect();
    KGraph::from_indices(k, n, edges).unwrap()
}

/// Minimum over all (k-1)-sets of the number of edges containing it.
pub fn naive_min_codegree(g: &KGraph) -> usize {
    subsets(g.n(), g.k() - 1)
        .iter()
        .map(|s| g.edges().iter().filter(|e| s.iter().all(|v| e.contains(v))).count())
        .min()
        .unwrap()
}

/// P1 by listing every vertex subset.
pub fn naive_p1(g: &KGraph, p: u64) -> bool {
    let n = g.n();
    (0u64..1 << n).all(|a| {
        let even = g
            .edges()
            .iter()
            .all(|e| e.iter().filter(|&&v| a >> v & 1 == 1).count() % 2 == 0);
        !even || a.count_ones() as u64 % p == 0
    })
}

/// The span of `u_j + (j-1) u_p` (1-based j < p) in `Z_p^p`, by closure.
pub fn naive_vp(p: u64) -> HashSet<Vec<u64>> {
    let pu = p as usize;
    let gens: Vec<Vec<u64>> = (0..pu - 1)
        .map(|j| {
            let mut v = vec![0; pu];
            v[j] = 1;
            v[pu - 1] = j as u64 % p;
            v
        })
        .collect();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut stack = vec![vec![0; pu]];
    while let Some(x) = stack.pop() {
        if !seen.insert(x.clone()) {
            continue;
        }
        for g in &gens {
            let y: Vec<u64> = x.iter().zip(g).map(|(a, b)| (a + b) % p).collect();
            if !seen.contains(&y) {
                stack.push(y);
            }
        }
    }
    seen
}

/// P2 by listing every ordered assignment of vertices to `p` parts.
pub fn naive_p2(g: &KGraph, p: u64) -> bool {
    let vp = naive_vp(p);
    let n = g.n();
    let pu = p as usize;
    let mut assign = vec![0usize; n];
    loop {
        let index = |vs: &mut dyn Iterator<Item = usize>| {
            let mut x = vec![0u64; pu];
            for v in vs {
                x[assign[v]] = (x[assign[v]] + 1) % p;
            }
            x
        };
        let edges_ok = g.edges().iter().all(|e| vp.contains(&index(&mut e.iter().copied())));
        if edges_ok && !vp.contains(&index(&mut (0..n))) {
            return false;
        }
        let mut i = 0;
        loop {
            if i == n {
                return true;
            }
            assign[i] += 1;
            if assign[i] < pu {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

/// Every injective edge-preserving map, by trying all ordered b-tuples.
pub fn naive_labelled_copies(pattern: &KGraph, host: &KGraph) -> Vec<Vec<usize>> {
    let b = pattern.n();
    let n = host.n();
    let mut out = Vec::new();
    fn rec(b: usize, n: usize, cur: &mut Vec<usize>, pattern: &KGraph, host: &KGraph, out: &mut Vec<Vec<usize>>) {
        if cur.len() == b {
            let ok = pattern.edges().iter().all(|e| {
                let mut img: Vec<usize> = e.iter().map(|&u| cur[u]).collect();
                img.sort_unstable();
                host.contains_edge(&img)
            });
            if ok {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                rec(b, n, cur, pattern, host, out);
                cur.pop();
            }
        }
    }
    rec(b, n, &mut Vec::new(), pattern, host, &mut out);
    out
}

pub fn naive_images(pattern: &KGraph, host: &KGraph) -> BTreeSet<Vec<usize>> {
    naive_labelled_copies(pattern, host)
        .into_iter()
        .map(|mut m| {
            m.sort_unstable();
            m
        })
        .collect()
}

/// Plain recursive perfect-packing test: cover the lowest uncovered vertex
/// by some copy image, no pruning beyond disjointness.
pub fn naive_packable(pattern: &KGraph, host: &KGraph) -> bool {
    let n = host.n();
    if n % pattern.n() != 0 {
        return false;
    }
    let images: Vec<Vec<usize>> = naive_images(pattern, host).into_iter().collect();
    fn rec(images: &[Vec<usize>], used: &mut Vec<bool>) -> bool {
        let Some(v) = used.iter().position(|&u| !u) else {
            return true;
        };
        for img in images.iter().filter(|i| i.contains(&v)) {
            if img.iter().all(|&x| !used[x]) {
                img.iter().for_each(|&x| used[x] = true);
                if rec(images, used) {
                    return true;
                }
                img.iter().for_each(|&x| used[x] = false);
            }
        }
        false
    }
    rec(&images, &mut vec![false; n])
}

/// Small patterns: loose cycles, complete k-partite graphs and a few
/// irregular ones.
pub fn pattern_corpus() -> Vec<(String, KGraph)> {
    let mut out = vec![
        ("C3_2".to_string(), loose_cycle(3, 2).unwrap()),
        ("C3_3".to_string(), loose_cycle(3, 3).unwrap()),
        ("C4_2".to_string(), loose_cycle(4, 2).unwrap()),
        ("C3_4".to_string(), loose_cycle(3, 4).unwrap()),
        ("C3_5".to_string(), loose_cycle(3, 5).unwrap()),
    ];
    for sizes in [
        vec![1, 1, 1],
        vec![2, 2, 2],
        vec![1, 1, 2],
        vec![1, 2, 2],
        vec![1, 1, 3],
        vec![1, 3, 3],
        vec![2, 2, 4],
        vec![1, 1, 4],
        vec![2, 4],
        vec![3, 3],
        vec![1, 3],
        vec![1, 1, 1, 1],
        vec![2, 2, 2, 2],
        vec![1, 1, 1, 3],
    ] {
        out.push((format!("K{sizes:?}"), KGraph::complete_multipartite(&sizes).unwrap()));
    }
    out.push((
        "two-edge path".to_string(),
        KGraph::from_indices(3, 5, vec![vec![0, 1, 2], vec![2, 3, 4]]).unwrap(),
    ));
    out.push((
        "fan".to_string(),
        KGraph::from_indices(3, 7, vec![vec![0, 1, 2], vec![0, 3, 4], vec![0, 5, 6]]).unwrap(),
    ));
    out
}

/// Checks copies in a blow-up host from the class structure alone: every
/// copy is injective and sends each pattern edge to `k` distinct classes
/// forming a template edge, and copies are disjoint. Returns the number of
/// covered vertices, or a description of the first fault.
pub fn naive_check_blowup(pattern: &KGraph, host: &BlowupHost, copies: &[Vec<usize>]) -> Result<usize, String> {
    let n: usize = host.sizes().iter().sum();
    let mut seen = HashSet::new();
    for (i, c) in copies.iter().enumerate() {
        if c.len() != pattern.n() {
            return Err(format!("copy {i} has {} vertices", c.len()));
        }
        for &v in c {
            if v >= n || !seen.insert(v) {
                return Err(format!("copy {i} reuses or overruns vertex {v}"));
            }
        }
        for e in pattern.edges() {
            let mut cls: Vec<usize> = e.iter().map(|&u| host.class_of(c[u])).collect();
            cls.sort_unstable();
            cls.dedup();
            if cls.len() != e.len() || !host.template().contains_edge(&cls) {
                return Err(format!("copy {i} maps edge {e:?} onto classes {cls:?}"));
            }
        }
    }
    Ok(seen.len())
}

/// Vertices of `copies` per class of `host`.
pub fn class_counts(host: &BlowupHost, copies: &[Vec<usize>]) -> Vec<usize> {
    let mut c = vec![0; host.class_count()];
    copies.iter().flatten().for_each(|&v| c[host.class_of(v)] += 1);
    c
}

pub fn complete_template(k: usize, t: usize) -> KGraph {
    KGraph::from_indices(k, t, subsets(t, k)).unwrap()
}

/// Random 2-graph on `t` vertices whose components are random trees, with
/// about `comps` components.
pub fn random_forest(t: usize, comps: usize, rng: &mut impl Rng) -> KGraph {
    let mut edges = Vec::new();
    for v in 1..t {
        if v >= comps {
            let u = rng.gen_range(0..v);
            edges.push(vec![u, v]);
        }
    }
    KGraph::from_indices(2, t, edges).unwrap()
}

/// Two fans sharing the leaf set `e1..e6`: edges `{a1, c_i, e_j}` and
/// `{b1, d_i, e_j}`.
pub fn fan_pair() -> KGraph {
    let names: Vec<String> = ["a1", "b1", "c1", "c2", "d1", "d2", "e1", "e2", "e3", "e4", "e5", "e6"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut edges = Vec::new();
    for (hub, pair) in [(0, [2, 3]), (1, [4, 5])] {
        for c in pair {
            for e in 6..12 {
                edges.push(vec![hub, c, e]);
            }
        }
    }
    KGraph::with_names(3, names, edges).unwrap()
}

/// Every unordered partition into `k` classes with each edge rainbow, as
/// sorted class-size vectors.
pub fn naive_realisations(g: &KGraph) -> BTreeSet<Vec<Vec<usize>>> {
    let (k, n) = (g.k(), g.n());
    let mut out = BTreeSet::new();
    let mut col = vec![0usize; n];
    loop {
        let rainbow = g.edges().iter().all(|e| {
            let mut c: Vec<usize> = e.iter().map(|&v| col[v]).collect();
            c.sort_unstable();
            c.dedup();
            c.len() == k
        });
        if rainbow {
            let mut classes: Vec<Vec<usize>> = (0..k).map(|j| (0..n).filter(|&v| col[v] == j).collect()).collect();
            classes.sort();
            out.insert(classes);
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            col[i] += 1;
            if col[i] < k {
                break;
            }
            col[i] = 0;
            i += 1;
        }
    }
}

/// Smallest vertex cover size, over all subsets.
pub fn naive_cover_number(g: &KGraph) -> usize {
    let n = g.n();
    (0u64..1 << n)
        .filter(|a| g.edges().iter().all(|e| e.iter().any(|&v| a >> v & 1 == 1)))
        .map(|a| a.count_ones() as usize)
        .min()
        .unwrap()
}
