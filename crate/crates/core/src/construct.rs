//! Extremal hosts: dense k-graphs with no perfect K-packing, each carrying
//! the reason as a machine-readable obstruction.

use num_rational::Ratio;

use crate::error::{domain, guard, Error, Result};
use crate::graph::{KGraph, Vertex, VertexPartition};
use crate::lattice::{check_p1, check_p2, dagger_index, in_vp};
use crate::realisation::{min_vertex_cover, structural_profile};
use crate::util::{binomial, for_each_combination};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// Every copy meets the second part in a multiple of `p` vertices, but
    /// that part has `second_part` vertices.
    Parity { p: u64, second_part: usize },
    /// Every copy has index vector in `V_p`, the whole vertex set does not.
    Lattice { p: u64, total_index: Vec<u64> },
    /// Every edge meets `A`, so each copy needs `per_copy` vertices of `A`.
    Cover {
        a: usize,
        per_copy: usize,
        max_copies: usize,
        needed_copies: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalHost {
    pub graph: KGraph,
    pub partition: VertexPartition,
    pub claimed_codegree: usize,
    pub obstruction: Obstruction,
}

/// Cap on `C(n, k)` when generating hosts.
pub const HOST_SUBSET_GUARD: usize = 10_000_000;

fn host_from_predicate(
    k: usize,
    part: &VertexPartition,
    keep: impl Fn(&[usize]) -> bool,
) -> Result<KGraph> {
    let n = part.vertex_count();
    guard("k-subsets of the host", binomial(n, k), HOST_SUBSET_GUARD)?;
    let r = part.part_count();
    let mut edges = Vec::new();
    let mut counts = vec![0usize; r];
    for_each_combination(n, k, |c| {
        counts.iter_mut().for_each(|x| *x = 0);
        for &v in c {
            counts[part.part_of(v)] += 1;
        }
        if keep(&counts) {
            edges.push(c.to_vec());
        }
        true
    });
    KGraph::from_indices(k, n, edges)
}

/// Size vector closest to balanced (smallest spread, then earlier parts
/// larger) with every part at least `n/r - 1` and satisfying `ok`.
pub fn balanced_sizes(n: usize, r: usize, ok: impl Fn(&[usize]) -> bool) -> Option<Vec<usize>> {
    let lo = (n / r).saturating_sub(1);
    let hi = n.div_ceil(r) + 1;
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut cur = Vec::with_capacity(r);
    fn rec(
        n: usize,
        r: usize,
        lo: usize,
        hi: usize,
        cur: &mut Vec<usize>,
        ok: &dyn Fn(&[usize]) -> bool,
        best: &mut Option<(usize, Vec<usize>)>,
    ) {
        let used: usize = cur.iter().sum();
        if cur.len() == r {
            if used != n || cur.iter().any(|&s| s * r + r < n) || !ok(cur) {
                return;
            }
            let spread = cur.iter().max().unwrap() - cur.iter().min().unwrap();
            let better = match best {
                None => true,
                Some((bs, bv)) => spread < *bs || (spread == *bs && cur.as_slice() > bv.as_slice()),
            };
            if better {
                *best = Some((spread, cur.clone()));
            }
            return;
        }
        for s in lo..=hi {
            if used + s > n {
                break;
            }
            cur.push(s);
            rec(n, r, lo, hi, cur, ok, best);
            cur.pop();
        }
    }
    rec(n, r, lo, hi, &mut cur, &ok, &mut best);
    best.map(|(_, v)| v)
}

/// All k-sets meeting the second part in an even number of vertices.
pub fn parity_construction(k: usize, sizes: [usize; 2]) -> Result<KGraph> {
    let part = VertexPartition::from_sizes(&sizes);
    host_from_predicate(k, &part, |c| c[1] % 2 == 0)
}

/// Exact minimum codegree of [`parity_construction`].
pub fn parity_codegree(k: usize, sizes: [usize; 2]) -> usize {
    let [a, b] = sizes;
    (0..k)
        .filter(|&t| t <= b && k - 1 - t <= a)
        .map(|t| if t % 2 == 0 { a - (k - 1 - t) } else { b - t })
        .min()
        .unwrap_or(0)
}

pub fn parity_host(pattern: &KGraph, p: u64, n: usize) -> Result<ExtremalHost> {
    let k = pattern.k();
    let p1 = check_p1(pattern, p)?;
    if !p1.holds {
        return domain(format!(
            "pattern fails P1 for p = {p}: vertex set {:?} meets every edge evenly",
            p1.witness.unwrap_or_default()
        ));
    }
    if n < 2 * k {
        return domain(format!("parity host needs n >= 2k = {}", 2 * k));
    }
    let sizes = balanced_sizes(n, 2, |s| s[1] as u64 % p != 0)
        .ok_or_else(|| Error::Domain("no admissible part sizes".into()))?;
    let sizes = [sizes[0], sizes[1]];
    let graph = parity_construction(k, sizes)?;
    let claimed = parity_codegree(k, sizes);
    let host = ExtremalHost {
        partition: VertexPartition::from_sizes(&sizes),
        graph,
        claimed_codegree: claimed,
        obstruction: Obstruction::Parity {
            p,
            second_part: sizes[1],
        },
    };
    assert_codegree(&host, 2 * claimed + 2 * k >= n)?;
    Ok(host)
}

/// All k-sets whose index vector over the given parts lies in `V_p`.
pub fn lattice_construction(k: usize, p: u64, sizes: &[usize]) -> Result<KGraph> {
    if sizes.len() != p as usize {
        return domain("lattice construction needs exactly p parts");
    }
    let part = VertexPartition::from_sizes(sizes);
    host_from_predicate(k, &part, |c| {
        let x: Vec<u64> = c.iter().map(|&v| v as u64).collect();
        in_vp(p, &x)
    })
}

/// Exact minimum codegree of [`lattice_construction`]: a (k-1)-set with
/// index vector `x` extends only into part `dagger(x)`.
pub fn lattice_codegree(k: usize, p: u64, sizes: &[usize]) -> usize {
    let r = sizes.len();
    let mut best = usize::MAX;
    for m in crate::util::multisets(r, k - 1) {
        let mut x = vec![0u64; r];
        for &j in &m {
            x[j] += 1;
        }
        if x.iter().zip(sizes).any(|(&c, &s)| c as usize > s) {
            continue;
        }
        let j = dagger_index(p, &x);
        best = best.min(sizes[j] - x[j] as usize);
    }
    best
}

pub fn lattice_host(pattern: &KGraph, p: u64, n: usize) -> Result<ExtremalHost> {
    let k = pattern.k();
    let p2 = check_p2(pattern, p)?;
    if !p2.holds {
        return domain(format!(
            "pattern fails P2 for p = {p}: part assignment {:?}",
            p2.witness.unwrap_or_default()
        ));
    }
    if n < p as usize * k {
        return domain(format!("lattice host needs n >= pk = {}", p as usize * k));
    }
    let sizes = balanced_sizes(n, p as usize, |s| {
        let x: Vec<u64> = s.iter().map(|&v| v as u64).collect();
        !in_vp(p, &x)
    })
    .ok_or_else(|| Error::Domain("no admissible part sizes".into()))?;
    let graph = lattice_construction(k, p, &sizes)?;
    let claimed = lattice_codegree(k, p, &sizes);
    let host = ExtremalHost {
        partition: VertexPartition::from_sizes(&sizes),
        graph,
        claimed_codegree: claimed,
        obstruction: Obstruction::Lattice {
            p,
            total_index: sizes.iter().map(|&s| s as u64 % p).collect(),
        },
    };
    assert_codegree(&host, p as usize * (claimed + k) >= n)?;
    Ok(host)
}

/// All k-sets meeting a set `A` of `a` vertices (the first `a`).
pub fn cover_construction(k: usize, n: usize, a: usize) -> Result<KGraph> {
    let part = VertexPartition::from_sizes(&[a, n - a]);
    host_from_predicate(k, &part, |c| c[0] >= 1)
}

pub fn cover_codegree(k: usize, n: usize, a: usize) -> usize {
    let mut best = usize::MAX;
    if n - a >= k - 1 {
        best = a;
    }
    if a >= 1 {
        best = best.min(n - (k - 1));
    }
    best
}

pub fn cover_host(pattern: &KGraph, n: usize, deficit: usize) -> Result<ExtremalHost> {
    let k = pattern.k();
    if n < 2 * k {
        return domain(format!("cover host needs n >= 2k = {}", 2 * k));
    }
    if deficit > n {
        return domain("deficit exceeds n");
    }
    let profile = structural_profile(pattern)?;
    let cover = min_vertex_cover(pattern)?.len();
    let a = (profile.tau * (n - deficit) as u64).ceil().to_integer() as usize;
    let a = a.saturating_sub(1);
    let graph = cover_construction(k, n, a)?;
    let claimed = cover_codegree(k, n, a);
    let host = ExtremalHost {
        partition: VertexPartition::from_sizes(&[a, n - a]),
        graph,
        claimed_codegree: claimed,
        obstruction: Obstruction::Cover {
            a,
            per_copy: cover,
            max_copies: a / cover,
            needed_copies: (n - deficit).div_ceil(pattern.n()),
        },
    };
    assert_codegree(&host, claimed == a)?;
    Ok(host)
}

/// The marked-vertex pattern: classes `U_j`, the first vertex of each
/// marked; edges are the rainbow k-sets containing a marked vertex.
pub fn marked_vertex_pattern(class_sizes: &[usize]) -> Result<KGraph> {
    let k = class_sizes.len();
    if let Some(&s) = class_sizes.iter().find(|&&s| s <= k) {
        return domain(format!("every class must exceed k = {k}, got {s}"));
    }
    let full = KGraph::complete_multipartite(class_sizes)?;
    let mut starts = vec![0usize];
    for &s in class_sizes {
        starts.push(starts.last().unwrap() + s);
    }
    let marked: Vec<Vertex> = starts[..k].to_vec();
    let edges = full
        .edges()
        .iter()
        .filter(|e| e.iter().any(|v| marked.contains(v)))
        .cloned()
        .collect();
    KGraph::from_indices(k, full.n(), edges)
}

/// Edges are the k-sets with `1 <= |e ∩ A| <= k-1`, `|A| = ⌈(k+1)n/b⌉ - 1`.
pub fn marked_vertex_host(class_sizes: &[usize], n: usize) -> Result<ExtremalHost> {
    let k = class_sizes.len();
    let pattern = marked_vertex_pattern(class_sizes)?;
    let b = pattern.n();
    let a = ((k + 1) * n).div_ceil(b).saturating_sub(1);
    if a == 0 || a + k > n {
        return domain(format!("n = {n} leaves no room for the marked host"));
    }
    let part = VertexPartition::from_sizes(&[a, n - a]);
    let graph = host_from_predicate(k, &part, |c| c[0] >= 1 && c[0] < k)?;
    let bsize = n - a;
    let mut claimed = usize::MAX;
    for t in 0..k {
        if t > a || k - 1 - t > bsize {
            continue;
        }
        let d = if t == 0 {
            a
        } else if t == k - 1 {
            bsize
        } else {
            n - (k - 1)
        };
        claimed = claimed.min(d);
    }
    let host = ExtremalHost {
        partition: part,
        graph,
        claimed_codegree: claimed,
        obstruction: Obstruction::Cover {
            a,
            per_copy: k + 1,
            max_copies: a / (k + 1),
            needed_copies: n.div_ceil(b),
        },
    };
    assert_codegree(&host, claimed == a)?;
    Ok(host)
}

fn assert_codegree(host: &ExtremalHost, bound_holds: bool) -> Result<()> {
    let actual = host.graph.min_codegree()?.value;
    if actual < host.claimed_codegree || !bound_holds {
        return Err(Error::Defect(format!(
            "host codegree {actual} below the claimed {}",
            host.claimed_codegree
        )));
    }
    Ok(())
}

/// `|A| / (τ b)` as an exact rational, the packing-size ceiling of a cover host.
pub fn cover_packing_ceiling(a: usize, tau: Ratio<u64>, b: usize) -> Ratio<u64> {
    Ratio::from_integer(a as u64) / (tau * b as u64)
}
