//! Complete-multipartite gadgets with explicit perfect K-packings, the
//! two-edge graph Φ and its blow-ups, the graph `A^k_{p,q}` and its split.

use std::collections::HashMap;

use num_rational::Ratio;

use crate::error::{domain, guard, Error, Result};
use crate::graph::{Host, KGraph, Vertex};
use crate::host::BlowupHost;
use crate::lattice::gcd_coefficients;
use crate::packing::{verify_copies, Packing};
use crate::realisation::{
    enumerate_realisations, profile_from_realisations, Realisation, RealisationMode,
    StructuralProfile,
};
use crate::util::factorial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GadgetKind {
    /// `B(m)`: every class has `m` vertices.
    Balanced { m: usize },
    /// `U(m, d)`: classes `m-d, m+d, m, ..., m`.
    Unbalanced { m: usize, d: usize },
    /// `Lo(m, σ)`: one class of `σm`, the rest `(1-σ)m/(k-1)`.
    Lopsided { m: usize, sigma: Ratio<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    pub kind: GadgetKind,
    pub host: BlowupHost,
}

impl Gadget {
    pub fn class_sizes(&self) -> &[usize] {
        self.host.sizes()
    }
}

pub fn balanced_gadget(k: usize, m: usize) -> Result<Gadget> {
    if k < 2 {
        return domain("gadgets need k >= 2");
    }
    Ok(Gadget {
        kind: GadgetKind::Balanced { m },
        host: BlowupHost::complete(&vec![m; k])?,
    })
}

pub fn unbalanced_gadget(k: usize, m: usize, d: usize) -> Result<Gadget> {
    if k < 2 {
        return domain("gadgets need k >= 2");
    }
    if d >= m {
        return domain(format!("U(m, d) needs d < m, got m={m}, d={d}"));
    }
    let mut sizes = vec![m; k];
    sizes[0] = m - d;
    sizes[1] = m + d;
    Ok(Gadget {
        kind: GadgetKind::Unbalanced { m, d },
        host: BlowupHost::complete(&sizes)?,
    })
}

pub fn lopsided_gadget(k: usize, m: usize, sigma: Ratio<u64>) -> Result<Gadget> {
    if k < 2 {
        return domain("gadgets need k >= 2");
    }
    let small = sigma * m as u64;
    let rest = (Ratio::from_integer(1) - sigma) * m as u64 / (k as u64 - 1);
    if !small.is_integer() || !rest.is_integer() || sigma > Ratio::from_integer(1) {
        return domain(format!("Lo({m}, {sigma}) has non-integral class sizes"));
    }
    let mut sizes = vec![rest.to_integer() as usize; k];
    sizes[0] = small.to_integer() as usize;
    Ok(Gadget {
        kind: GadgetKind::Lopsided { m, sigma },
        host: BlowupHost::complete(&sizes)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetRequest {
    /// `B(K) = B(b)`.
    Balanced,
    /// `Lo(K) = Lo((k-1)! b, σ(K))`.
    Lopsided,
    /// `U_s(K) = U(sb, gcd(K))`.
    Unbalanced { s: usize },
}

/// Pattern data reused by the gadget recipes.
#[derive(Clone, Debug)]
pub struct PatternData {
    pub pattern: KGraph,
    pub unordered: Vec<Realisation>,
    pub profile: StructuralProfile,
}

impl PatternData {
    pub fn new(pattern: &KGraph) -> Result<Self> {
        let unordered = enumerate_realisations(pattern, RealisationMode::Unordered)?;
        let profile = profile_from_realisations(pattern, &unordered)?;
        Ok(PatternData {
            pattern: pattern.clone(),
            unordered,
            profile,
        })
    }

    pub fn b(&self) -> usize {
        self.pattern.n()
    }

    pub fn k(&self) -> usize {
        self.pattern.k()
    }

    pub fn ordered(&self) -> Vec<Realisation> {
        let perms = crate::util::permutations(self.k());
        self.unordered
            .iter()
            .flat_map(|r| perms.iter().map(move |p| r.permuted(p)))
            .collect()
    }
}

/// Places pattern classes into gadget classes, drawing fresh vertices.
struct Allocator {
    next: Vec<usize>,
    starts: Vec<usize>,
    sizes: Vec<usize>,
}

impl Allocator {
    fn new(host: &BlowupHost) -> Self {
        let c = host.class_count();
        Allocator {
            next: vec![0; c],
            starts: (0..c).map(|j| host.class_range(j).start).collect(),
            sizes: host.sizes().to_vec(),
        }
    }

    /// `target[j]` is the gadget class receiving realisation class `j`.
    fn place(&mut self, n: usize, r: &Realisation, target: &[usize]) -> Result<Vec<Vertex>> {
        let mut map = vec![usize::MAX; n];
        for (j, class) in r.classes.iter().enumerate() {
            let t = target[j];
            if self.next[t] + class.len() > self.sizes[t] {
                return Err(Error::Defect(format!("gadget class {t} overfilled")));
            }
            for &v in class {
                map[v] = self.starts[t] + self.next[t];
                self.next[t] += 1;
            }
        }
        Ok(map)
    }
}

/// Copies placing `copies` rotated B(b) blocks into the allocator.
fn rotated_blocks(
    data: &PatternData,
    alloc: &mut Allocator,
    blocks: usize,
    out: &mut Vec<Vec<Vertex>>,
) -> Result<()> {
    let k = data.k();
    let r = &data.unordered[0];
    for _ in 0..blocks {
        for j in 0..k {
            let target: Vec<usize> = (0..k).map(|i| (i + j) % k).collect();
            out.push(alloc.place(data.b(), r, &target)?);
        }
    }
    Ok(())
}

/// The proof's threshold `s0 = aN/k` and the nonnegative coefficient for
/// every ordered realisation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnbalancedRecipe {
    pub s0: usize,
    pub a: u64,
    pub ordered: Vec<Realisation>,
    pub coefficients: Vec<u64>,
}

pub fn unbalanced_recipe(data: &PatternData) -> Result<UnbalancedRecipe> {
    let Some(d) = data.profile.gcd else {
        return domain("U_s(K) needs gcd(K) to be defined");
    };
    let ordered = data.ordered();
    let diff = |r: &Realisation| r.classes[0].len() as i64 - r.classes[1].len() as i64;
    // one realisation per distinct positive difference
    let mut reps: Vec<(u64, usize)> = Vec::new();
    for (i, r) in ordered.iter().enumerate() {
        let dv = diff(r);
        if dv > 0 && !reps.iter().any(|&(v, _)| v == dv as u64) {
            reps.push((dv as u64, i));
        }
    }
    reps.sort_unstable();
    let values: Vec<u64> = reps.iter().map(|&(v, _)| v).collect();
    let coeffs = gcd_coefficients(&values)?;
    let index: HashMap<&Realisation, usize> =
        ordered.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut a_chi = vec![0u64; ordered.len()];
    for (&(_, i), &c) in reps.iter().zip(&coeffs) {
        if c >= 0 {
            a_chi[i] += c as u64;
        } else {
            // negative coefficient: use the realisation with classes 1 and 2
            // exchanged, whose difference has the opposite sign
            let mut swapped = ordered[i].clone();
            swapped.classes.swap(0, 1);
            let j = index[&swapped];
            a_chi[j] += c.unsigned_abs();
        }
    }
    let check: i64 = ordered
        .iter()
        .zip(&a_chi)
        .map(|(r, &a)| a as i64 * diff(r))
        .sum();
    if check != d as i64 {
        return Err(Error::Defect(format!("coefficient recipe sums to {check}, not {d}")));
    }
    let a = *a_chi.iter().max().unwrap();
    let n = ordered.len() as u64;
    let k = data.k() as u64;
    if (a * n) % k != 0 {
        return Err(Error::Defect("aN is not divisible by k".into()));
    }
    Ok(UnbalancedRecipe {
        s0: (a * n / k) as usize,
        a,
        ordered,
        coefficients: a_chi,
    })
}

/// A gadget together with a perfect packing of it by the pattern.
#[derive(Clone, Debug)]
pub struct GadgetPacking {
    pub gadget: Gadget,
    pub packing: Packing,
}

pub fn pack_gadget(pattern: &KGraph, request: GadgetRequest) -> Result<GadgetPacking> {
    let data = PatternData::new(pattern)?;
    pack_gadget_with(&data, request)
}

pub fn pack_gadget_with(data: &PatternData, request: GadgetRequest) -> Result<GadgetPacking> {
    let k = data.k();
    let b = data.b();
    let mut copies = Vec::new();
    let gadget = match request {
        GadgetRequest::Balanced => {
            let g = balanced_gadget(k, b)?;
            let mut alloc = Allocator::new(&g.host);
            rotated_blocks(data, &mut alloc, 1, &mut copies)?;
            g
        }
        GadgetRequest::Lopsided => {
            let sigma = data.profile.sigma;
            let g = lopsided_gadget(k, factorial(k - 1) as usize * b, sigma)?;
            let min = data.profile.sigma_set[0] as usize;
            let r = data
                .unordered
                .iter()
                .find(|r| r.classes[0].len() == min)
                .expect("some realisation attains the smallest class");
            let mut alloc = Allocator::new(&g.host);
            for perm in crate::util::permutations(k) {
                if perm[0] == 0 {
                    copies.push(alloc.place(b, r, &perm)?);
                }
            }
            g
        }
        GadgetRequest::Unbalanced { s } => {
            let recipe = unbalanced_recipe(data)?;
            if s < recipe.s0 {
                return domain(format!(
                    "U_s(K) recipe needs s >= s0 = {}, got s = {s}",
                    recipe.s0
                ));
            }
            let d = data.profile.gcd.unwrap() as usize;
            let g = unbalanced_gadget(k, s * b, d)?;
            let mut alloc = Allocator::new(&g.host);
            let straight: Vec<usize> = (0..k).collect();
            let mut swapped = straight.clone();
            swapped.swap(0, 1);
            for (r, &a_chi) in recipe.ordered.iter().zip(&recipe.coefficients) {
                for _ in 0..recipe.a - a_chi {
                    copies.push(alloc.place(b, r, &straight)?);
                }
                for _ in 0..a_chi {
                    copies.push(alloc.place(b, r, &swapped)?);
                }
            }
            rotated_blocks(data, &mut alloc, s - recipe.s0, &mut copies)?;
            g
        }
    };
    finish(data, gadget, copies)
}

fn finish(data: &PatternData, gadget: Gadget, copies: Vec<Vec<Vertex>>) -> Result<GadgetPacking> {
    let verdict = verify_copies(&data.pattern, &gadget.host, &copies);
    if !verdict.valid || !verdict.perfect {
        return Err(Error::Defect(format!(
            "gadget packing failed verification: {:?}",
            verdict.violation
        )));
    }
    Ok(GadgetPacking {
        packing: Packing::new(data.pattern.clone(), gadget.host.clone(), copies),
        gadget,
    })
}

/// Cap on the dynamic-programming table used by the direct search.
pub const UNBALANCED_SEARCH_GUARD: usize = 50_000_000;

/// Perfect packing of `U_s(K)` found by direct search over class-size
/// vectors; works below the recipe threshold. `Ok(None)` if none exists.
pub fn pack_unbalanced_by_search(data: &PatternData, s: usize) -> Result<Option<GadgetPacking>> {
    let Some(d) = data.profile.gcd else {
        return domain("U_s(K) needs gcd(K) to be defined");
    };
    let k = data.k();
    let b = data.b();
    let gadget = unbalanced_gadget(k, s * b, d as usize)?;
    let target: Vec<usize> = gadget.class_sizes().to_vec();
    let table: usize = target.iter().fold(1usize, |acc, &t| acc.saturating_mul(t + 1));
    guard("unbalanced search table", table, UNBALANCED_SEARCH_GUARD)?;
    let ordered = data.ordered();
    let mut vectors: Vec<(Vec<usize>, usize)> = Vec::new();
    for (i, r) in ordered.iter().enumerate() {
        let sz = r.sizes();
        if !vectors.iter().any(|(v, _)| *v == sz) {
            vectors.push((sz, i));
        }
    }
    vectors.sort();
    let mut failed: std::collections::HashSet<(usize, Vec<usize>)> = Default::default();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        vectors: &[(Vec<usize>, usize)],
        start: usize,
        rem: &mut Vec<usize>,
        failed: &mut std::collections::HashSet<(usize, Vec<usize>)>,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if rem.iter().all(|&x| x == 0) {
            return true;
        }
        if failed.contains(&(start, rem.clone())) {
            return false;
        }
        for i in start..vectors.len() {
            let v = &vectors[i].0;
            if v.iter().zip(rem.iter()).all(|(a, b)| a <= b) {
                for (x, a) in rem.iter_mut().zip(v) {
                    *x -= a;
                }
                chosen.push(i);
                if rec(vectors, i, rem, failed, chosen) {
                    return true;
                }
                chosen.pop();
                for (x, a) in rem.iter_mut().zip(v) {
                    *x += a;
                }
            }
        }
        failed.insert((start, rem.clone()));
        false
    }
    let mut rem = target.clone();
    if !rec(&vectors, 0, &mut rem, &mut failed, &mut chosen) {
        return Ok(None);
    }
    let mut alloc = Allocator::new(&gadget.host);
    let straight: Vec<usize> = (0..k).collect();
    let mut copies = Vec::new();
    for &i in &chosen {
        copies.push(alloc.place(b, &ordered[vectors[i].1], &straight)?);
    }
    finish(data, gadget, copies).map(Some)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnbalancedThreshold {
    /// Threshold from the coefficient recipe.
    pub s0: usize,
    /// Smallest `s` admitting a perfect packing, by direct search.
    pub min_s: Option<usize>,
}

pub fn unbalanced_threshold(data: &PatternData) -> Result<UnbalancedThreshold> {
    let recipe = unbalanced_recipe(data)?;
    let d = data.profile.gcd.unwrap() as usize;
    let mut min_s = None;
    for s in 1..=recipe.s0 {
        if s * data.b() <= d {
            continue;
        }
        if pack_unbalanced_by_search(data, s)?.is_some() {
            min_s = Some(s);
            break;
        }
    }
    Ok(UnbalancedThreshold {
        s0: recipe.s0,
        min_s,
    })
}

/// Packing of `U_s(K)`: the coefficient recipe when `s >= s0`, otherwise
/// direct search.
pub fn pack_unbalanced(data: &PatternData, s: usize) -> Result<Option<GadgetPacking>> {
    let recipe = unbalanced_recipe(data)?;
    if s >= recipe.s0 {
        pack_gadget_with(data, GadgetRequest::Unbalanced { s }).map(Some)
    } else {
        pack_unbalanced_by_search(data, s)
    }
}

/// Φ: vertices `1..=k+1`, edges `{1..k}` and `{2..k+1}`.
pub fn phi(k: usize) -> Result<KGraph> {
    KGraph::from_indices(k, k + 1, vec![(0..k).collect(), (1..=k).collect()])
}

/// `Φ(m)`: each vertex of Φ blown up to a class of `m` vertices.
pub fn phi_blowup(k: usize, m: usize) -> Result<BlowupHost> {
    BlowupHost::new(phi(k)?, vec![m; k + 1])
}

/// Embeds `K` into `Φ(m)` via `realisation`: the other classes go to the
/// central classes in order, and class `split` sends its first `a`
/// vertices to the first end class and the rest to the last.
pub fn embed_k_in_phi_blowup(
    pattern: &KGraph,
    realisation: &Realisation,
    split: usize,
    m: usize,
    a: usize,
) -> Result<(BlowupHost, Vec<Vertex>)> {
    let k = pattern.k();
    if !realisation.is_valid_for(pattern) {
        return domain("not a realisation of the pattern");
    }
    if split >= k {
        return domain("split class out of range");
    }
    let class = &realisation.classes[split];
    if a > class.len() {
        return domain(format!("cannot send {a} of {} vertices to an end", class.len()));
    }
    if a > m || class.len() - a > m {
        return domain(format!("end split ({a}, {}) exceeds capacity {m}", class.len() - a));
    }
    let host = phi_blowup(k, m)?;
    let mut map = vec![usize::MAX; pattern.n()];
    let mut central = 1;
    for (j, cl) in realisation.classes.iter().enumerate() {
        if j == split {
            continue;
        }
        if cl.len() > m {
            return domain(format!("class of size {} exceeds capacity {m}", cl.len()));
        }
        let start = host.class_range(central).start;
        for (i, &v) in cl.iter().enumerate() {
            map[v] = start + i;
        }
        central += 1;
    }
    for (i, &v) in class.iter().enumerate() {
        map[v] = if i < a {
            host.class_range(0).start + i
        } else {
            host.class_range(k).start + (i - a)
        };
    }
    let verdict = verify_copies(pattern, &host, std::slice::from_ref(&map));
    if !verdict.valid {
        return Err(Error::Defect(format!("Φ(m) embedding invalid: {:?}", verdict.violation)));
    }
    Ok((host, map))
}

/// `A^k_{p,q}`: sets `A_1..A_{q-p}` of `k-1` vertices and `B` of `p(k-1)`;
/// edges are `{x} ∪ A_j` for `x` in `B`. Vertex order is `A_1, ..., A_{q-p}, B`.
pub fn akpq(k: usize, p: usize, q: usize) -> Result<KGraph> {
    if k < 2 || p == 0 || q <= p {
        return domain(format!("A^k_(p,q) needs k >= 2 and 1 <= p < q, got k={k}, p={p}, q={q}"));
    }
    let sets = q - p;
    let bstart = sets * (k - 1);
    let bsize = p * (k - 1);
    let mut names = Vec::new();
    for a in 0..sets {
        for i in 0..k - 1 {
            names.push(format!("A{}.{}", a + 1, i + 1));
        }
    }
    for i in 0..bsize {
        names.push(format!("B.{}", i + 1));
    }
    let mut edges = Vec::new();
    for a in 0..sets {
        for x in 0..bsize {
            let mut e: Vec<Vertex> = (a * (k - 1)..(a + 1) * (k - 1)).collect();
            e.push(bstart + x);
            edges.push(e);
        }
    }
    KGraph::with_names(k, names, edges)
}

/// One group `X^i_1..X^i_k` of the split, with `f(i, j)` exposed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitGroup {
    pub sets: Vec<Vec<Vertex>>,
    /// `labels[j]` is the vertex of `A^k_{p,q}` whose cluster contains `sets[j]`.
    pub labels: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AkpqSplit {
    pub k: usize,
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub pattern: KGraph,
    pub groups: Vec<SplitGroup>,
}

/// Splits clusters `V_u` (`u` a vertex of `A^k_{p,q}`, `V_u = u*n..(u+1)*n`)
/// into `(q-p)p(k-1)` groups of `k` subclusters.
pub fn akpq_split(p: usize, q: usize, k: usize, n: usize) -> Result<AkpqSplit> {
    if p * k > q {
        return domain(format!("split needs pk <= q, got p={p}, q={q}, k={k}"));
    }
    let pattern = akpq(k, p, q)?;
    let pieces_b = q - p;
    let pieces_a = p * (k - 1);
    if n % (pieces_b * pieces_a) != 0 {
        return domain(format!(
            "cluster size {n} is not divisible by (q-p)p(k-1) = {}",
            pieces_b * pieces_a
        ));
    }
    let piece = |u: Vertex, parts: usize, idx: usize| -> Vec<Vertex> {
        let len = n / parts;
        (u * n + idx * len..u * n + (idx + 1) * len).collect()
    };
    let bstart = pieces_b * (k - 1);
    let mut groups = Vec::new();
    for a in 0..pieces_b {
        for bi in 0..pieces_a {
            let mut sets = Vec::with_capacity(k);
            let mut labels = Vec::with_capacity(k);
            let v = bstart + bi;
            sets.push(piece(v, pieces_b, a));
            labels.push(v);
            for j in 1..k {
                let u = a * (k - 1) + (j - 1);
                sets.push(piece(u, pieces_a, bi));
                labels.push(u);
            }
            groups.push(SplitGroup { sets, labels });
        }
    }
    let split = AkpqSplit {
        k,
        p,
        q,
        n,
        pattern,
        groups,
    };
    if let Some(msg) = split.property_failure() {
        return Err(Error::Defect(format!("split property fails: {msg}")));
    }
    Ok(split)
}

impl AkpqSplit {
    /// Checks the four split properties and the disjoint cover; returns the
    /// first failure.
    pub fn property_failure(&self) -> Option<String> {
        let (p, q, n) = (self.p as u64, self.q as u64, self.n);
        let total_vertices = self.pattern.n() * n;
        let mut seen = vec![false; total_vertices];
        for (i, g) in self.groups.iter().enumerate() {
            let sizes: Vec<usize> = g.sets.iter().map(Vec::len).collect();
            let sum: usize = sizes.iter().sum();
            if Ratio::from_integer(sizes[0] as u64) != Ratio::new(p * sum as u64, q) {
                return Some(format!("group {i}: |X_1| is not p/q of the group"));
            }
            if sizes[0] != n / (self.q - self.p) || sizes[1..].iter().any(|&s| s != sizes[1] || s < sizes[0]) {
                return Some(format!("group {i}: size pattern {sizes:?}"));
            }
            for (set, &u) in g.sets.iter().zip(&g.labels) {
                if set.iter().any(|&v| v / n != u) {
                    return Some(format!("group {i}: set leaves cluster {u}"));
                }
                for &v in set {
                    if std::mem::replace(&mut seen[v], true) {
                        return Some(format!("vertex {v} used twice"));
                    }
                }
            }
            if !self.pattern.has_edge(&g.labels) {
                return Some(format!("group {i}: labels do not form an edge"));
            }
        }
        if seen.iter().any(|&s| !s) {
            return Some("split does not cover every vertex".into());
        }
        None
    }
}
