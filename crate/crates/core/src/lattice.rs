//! The sublattice `V_p` of `Z_p^p`, the divisibility properties built on it,
//! Bezout coefficients and the modular index equation.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{domain, guard, Error, Result};
use crate::graph::{IndexVector, KGraph, Vertex, VertexPartition};
use crate::util::{is_prime, multisets, smallest_prime_factor};

/// Guard on `p` for explicit member lists.
pub const LATTICE_GUARD: u64 = 7;

/// `V_p`: generated by `u_j + (j-1) u_p` for `j = 1..p-1` (1-based). A vector
/// `x` lies in it exactly when `x_p = sum_{j<p} (j-1) x_j (mod p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeVp {
    p: u64,
    members: Vec<Vec<u64>>,
}

impl LatticeVp {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return domain(format!("{p} is not prime"));
        }
        guard("lattice prime", p as usize, LATTICE_GUARD as usize)?;
        let pu = p as usize;
        let mut members = Vec::with_capacity(pu.pow(pu as u32 - 1));
        let mut coeffs = vec![0u64; pu - 1];
        loop {
            let mut x = vec![0u64; pu];
            for (j, &c) in coeffs.iter().enumerate() {
                // generator j (0-based) is u_j + j u_{p-1}
                x[j] = (x[j] + c) % p;
                x[pu - 1] = (x[pu - 1] + c * j as u64) % p;
            }
            members.push(x);
            let mut i = 0;
            while i < coeffs.len() {
                coeffs[i] += 1;
                if coeffs[i] < p {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
            if i == coeffs.len() {
                break;
            }
        }
        members.sort();
        members.dedup();
        Ok(LatticeVp { p, members })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn members(&self) -> &[Vec<u64>] {
        &self.members
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        in_vp(self.p, x)
    }

    pub fn contains_by_listing(&self, x: &[u64]) -> bool {
        let r: Vec<u64> = x.iter().map(|c| c % self.p).collect();
        self.members.binary_search(&r).is_ok()
    }

    pub fn dagger(&self, x: &[u64]) -> usize {
        dagger_index(self.p, x)
    }
}

/// Closed-form membership in `V_p` without listing members.
pub fn in_vp(p: u64, x: &[u64]) -> bool {
    vp_defect(p, x) == 0
}

/// `x_p - sum_{j<p} (j-1) x_j (mod p)`; zero exactly on `V_p`.
fn vp_defect(p: u64, x: &[u64]) -> u64 {
    let pu = p as usize;
    debug_assert_eq!(x.len(), pu);
    let mut s = x[pu - 1] % p;
    for (j, &c) in x[..pu - 1].iter().enumerate() {
        s = (s + (p - (j as u64 * (c % p)) % p)) % p;
    }
    s
}

/// The unique 0-based `j` with `x + u_j` in `V_p`.
pub fn dagger_index(p: u64, x: &[u64]) -> usize {
    let g = vp_defect(p, x);
    if g == p - 1 {
        (p - 1) as usize
    } else {
        // adding u_j (j < p-1, 0-based) lowers the defect by j
        g as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyVerdict {
    pub holds: bool,
    /// For P1 a vertex set; for P2 a part assignment per vertex.
    pub witness: Option<Vec<usize>>,
}

pub const P1_DIMENSION_GUARD: usize = 30;

/// P1: every `A` meeting each edge in an even number of vertices has `p | |A|`.
pub fn check_p1(g: &KGraph, p: u64) -> Result<PropertyVerdict> {
    if p < 2 {
        return domain("P1 needs p >= 2");
    }
    let n = g.n();
    guard("vertex count for P1", n, 64)?;
    let basis = gf2_null_space(n, g.edges());
    if p == 2 {
        // weight parity is linear, so the basis decides
        let bad = basis.iter().find(|b| b.count_ones() % 2 == 1);
        return Ok(PropertyVerdict {
            holds: bad.is_none(),
            witness: bad.map(|&b| mask_to_vec(b)),
        });
    }
    guard("P1 solution space dimension", basis.len(), P1_DIMENSION_GUARD)?;
    let mut cur = 0u64;
    let total = 1u64 << basis.len();
    for i in 1..total {
        // Gray code step flips one basis vector
        cur ^= basis[i.trailing_zeros() as usize];
        if cur.count_ones() as u64 % p != 0 {
            return Ok(PropertyVerdict {
                holds: false,
                witness: Some(mask_to_vec(cur)),
            });
        }
    }
    Ok(PropertyVerdict {
        holds: true,
        witness: None,
    })
}

fn mask_to_vec(m: u64) -> Vec<usize> {
    (0..64).filter(|&i| m & (1 << i) != 0).collect()
}

/// Basis of `{x in GF(2)^n : <x, e> = 0 for every edge}` as bitmasks.
fn gf2_null_space(n: usize, edges: &[Vec<Vertex>]) -> Vec<u64> {
    let mut rows: Vec<u64> = edges
        .iter()
        .map(|e| e.iter().fold(0u64, |m, &v| m | (1 << v)))
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let bit = 1u64 << col;
        let Some(pr) = (rank..rows.len()).find(|&r| rows[r] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pr);
        for r in 0..rows.len() {
            if r != rank && rows[r] & bit != 0 {
                rows[r] ^= rows[rank];
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = 1u64 << f;
            for (r, &pc) in pivots.iter().enumerate() {
                if rows[r] & (1 << f) != 0 {
                    x |= 1 << pc;
                }
            }
            x
        })
        .collect()
}

pub const P2_GUARD: usize = 14;

/// P2: every ordered `p`-partition of `V(K)` putting each edge's index
/// vector in `V_p` also puts `i(V(K))` in `V_p`.
pub fn check_p2(g: &KGraph, p: u64) -> Result<PropertyVerdict> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    guard("vertex count for P2", g.n(), P2_GUARD)?;
    let n = g.n();
    let pu = p as usize;
    // edges keyed by their last vertex in index order
    let mut closing: Vec<Vec<&[Vertex]>> = vec![Vec::new(); n];
    for e in g.edges() {
        closing[*e.last().unwrap()].push(&e[..e.len() - 1]);
    }
    let ctx = P2Ctx {
        p,
        pu,
        n,
        closing: &closing,
    };
    let depth = n.min(3);
    let mut prefixes: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for pre in &prefixes {
            for part in ctx.options(pre) {
                let mut q = pre.clone();
                q.push(part);
                next.push(q);
            }
        }
        prefixes = next;
    }
    let found: Vec<Option<Vec<usize>>> = prefixes
        .into_par_iter()
        .map(|mut pre| ctx.search(&mut pre))
        .collect();
    let witness = found.into_iter().flatten().next();
    Ok(PropertyVerdict {
        holds: witness.is_none(),
        witness,
    })
}

struct P2Ctx<'a> {
    p: u64,
    pu: usize,
    n: usize,
    closing: &'a [Vec<&'a [Vertex]>],
}

impl P2Ctx<'_> {
    fn options(&self, assigned: &[usize]) -> Vec<usize> {
        let v = assigned.len();
        let mut forced: Option<usize> = None;
        for rest in &self.closing[v] {
            let mut x = vec![0u64; self.pu];
            for &u in rest.iter() {
                x[assigned[u]] += 1;
            }
            let j = dagger_index(self.p, &x);
            match forced {
                None => forced = Some(j),
                Some(f) if f != j => return Vec::new(),
                _ => {}
            }
        }
        match forced {
            Some(j) => vec![j],
            None => (0..self.pu).collect(),
        }
    }

    fn search(&self, assigned: &mut Vec<usize>) -> Option<Vec<usize>> {
        if assigned.len() == self.n {
            let mut x = vec![0u64; self.pu];
            for &a in assigned.iter() {
                x[a] += 1;
            }
            return (!in_vp(self.p, &x)).then(|| assigned.clone());
        }
        for part in self.options(assigned) {
            assigned.push(part);
            if let Some(w) = self.search(assigned) {
                return Some(w);
            }
            assigned.pop();
        }
        None
    }
}

/// Bezout coefficients for positive integers by iterated extended Euclid:
/// `sum a_i r_i = gcd(r)`.
pub fn gcd_coefficients(r: &[u64]) -> Result<Vec<i64>> {
    if r.is_empty() || r.contains(&0) {
        return domain("gcd coefficients need a non-empty list of positive integers");
    }
    let mut g = r[0] as i128;
    let mut coeffs: Vec<i128> = vec![1];
    for &x in &r[1..] {
        let (g2, mut a, mut b) = ext_gcd(g, x as i128);
        // shift to the representative with 0 <= a < x/g2
        let step = x as i128 / g2;
        let q = a.div_euclid(step);
        a -= q * step;
        b += q * (g / g2);
        for c in &mut coeffs {
            *c *= a;
        }
        coeffs.push(b);
        g = g2;
    }
    coeffs
        .into_iter()
        .map(|c| i64::try_from(c).map_err(|_| Error::Domain("coefficient overflow".into())))
        .collect()
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// `sum a_e i^d(e) = v` with `sum a_e = 0 (mod d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCombination {
    pub modulus: u64,
    /// (edge index into the host's edge list, coefficient in `1..d`)
    pub terms: Vec<(usize, u64)>,
}

impl EdgeCombination {
    pub fn size(&self) -> usize {
        self.terms.len()
    }

    pub fn check(&self, g: &KGraph, part: &VertexPartition, target: &IndexVector) -> bool {
        let d = self.modulus;
        let mut acc = IndexVector::zero(part.part_count(), d);
        let mut total = 0u64;
        for &(e, a) in &self.terms {
            if a == 0 || a >= d {
                return false;
            }
            acc = acc.add(&part.index_vector(&g.edges()[e], d).scale(a));
            total = (total + a) % d;
        }
        let mut seen: Vec<usize> = self.terms.iter().map(|t| t.0).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == self.terms.len() && total == 0 && acc.coords == target.coords
    }
}

/// Node budget for the depth-bounded search before falling back to the
/// merge construction.
pub const INDEX_SEARCH_BUDGET: usize = 2_000_000;

/// Solves `sum a_e i^d(e) = v`, `sum a_e = 0 (mod d)` with at most
/// `(r+1)^2` edges, where `r` is the number of parts.
pub fn solve_index_equation(
    g: &KGraph,
    part: &VertexPartition,
    d: u64,
    v: &IndexVector,
) -> Result<EdgeCombination> {
    solve_index_equation_with_budget(g, part, d, v, INDEX_SEARCH_BUDGET)
}

pub fn solve_index_equation_with_budget(
    g: &KGraph,
    part: &VertexPartition,
    d: u64,
    v: &IndexVector,
    budget: usize,
) -> Result<EdgeCombination> {
    let r = part.part_count();
    check_index_hypotheses(g, part, d, v)?;
    let target: Vec<u64> = v.coords.iter().map(|c| c % d).collect();
    let combo = match search_index_combination(g, part, d, &target, budget) {
        Some(c) => c,
        None => merge_construction(g, part, d, &target)?,
    };
    if combo.size() > (r + 1) * (r + 1) {
        return Err(Error::Defect(format!(
            "index combination uses {} edges, more than {}",
            combo.size(),
            (r + 1) * (r + 1)
        )));
    }
    if !combo.check(g, part, &IndexVector::new(target, d)) {
        return Err(Error::Defect("index combination failed re-verification".into()));
    }
    Ok(combo)
}

/// Only the merge construction, for cross-checking the search.
pub fn solve_index_equation_by_merging(
    g: &KGraph,
    part: &VertexPartition,
    d: u64,
    v: &IndexVector,
) -> Result<EdgeCombination> {
    check_index_hypotheses(g, part, d, v)?;
    let target: Vec<u64> = v.coords.iter().map(|c| c % d).collect();
    let combo = merge_construction(g, part, d, &target)?;
    if !combo.check(g, part, &IndexVector::new(target, d)) {
        return Err(Error::Defect("merge construction failed re-verification".into()));
    }
    Ok(combo)
}

fn check_index_hypotheses(
    g: &KGraph,
    part: &VertexPartition,
    d: u64,
    v: &IndexVector,
) -> Result<()> {
    let r = part.part_count();
    if g.k() < 3 {
        return domain("the index equation needs k >= 3");
    }
    if part.vertex_count() != g.n() {
        return domain("partition does not match the graph");
    }
    if d < 1 {
        return domain("modulus must be positive");
    }
    if let Some(q) = smallest_prime_factor(d) {
        if q <= r as u64 {
            return domain(format!(
                "modulus {d} has prime factor {q}, not above the part count {r}"
            ));
        }
    }
    if v.len() != r {
        return domain("target vector length differs from the part count");
    }
    if v.coords.iter().sum::<u64>() % d != 0 {
        return domain("target coordinates do not sum to 0 mod d");
    }
    let counts = edge_part_counts(g, part);
    for m in multisets(r, g.k() - 1) {
        let mut need = vec![0usize; r];
        for &j in &m {
            need[j] += 1;
        }
        if !counts.iter().any(|c| c.iter().zip(&need).all(|(a, b)| a >= b)) {
            return domain(format!(
                "covering hypothesis fails: no edge meets parts {:?}",
                m.iter().map(|j| j + 1).collect::<Vec<_>>()
            ));
        }
    }
    Ok(())
}

fn edge_part_counts(g: &KGraph, part: &VertexPartition) -> Vec<Vec<usize>> {
    g.edges()
        .iter()
        .map(|e| {
            let mut c = vec![0usize; part.part_count()];
            for &v in e {
                c[part.part_of(v)] += 1;
            }
            c
        })
        .collect()
}

/// Iterative deepening over the number of distinct edges; edges with equal
/// index vectors are interchangeable, so one representative per class.
fn search_index_combination(
    g: &KGraph,
    part: &VertexPartition,
    d: u64,
    target: &[u64],
    budget: usize,
) -> Option<EdgeCombination> {
    let r = part.part_count();
    if d == 1 || target.iter().all(|&c| c == 0) {
        return Some(EdgeCombination {
            modulus: d,
            terms: Vec::new(),
        });
    }
    let mut reps: Vec<(Vec<u64>, usize)> = Vec::new();
    let mut seen = HashMap::new();
    for (i, e) in g.edges().iter().enumerate() {
        let iv = part.index_vector(e, d).coords;
        if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(iv.clone()) {
            slot.insert(i);
            reps.push((iv, i));
        }
    }
    struct S<'a> {
        reps: &'a [(Vec<u64>, usize)],
        d: u64,
        r: usize,
        target: &'a [u64],
        nodes: usize,
        budget: usize,
        chosen: Vec<(usize, u64)>,
    }
    impl S<'_> {
        /// Returns Some(true) on success, Some(false) on exhausted, None on budget.
        fn go(&mut self, start: usize, left: usize, acc: &mut Vec<u64>, sum: u64) -> Option<bool> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let d = self.d;
            if left == 1 {
                // last coefficient is forced by the sum condition
                let c = (d - sum % d) % d;
                if c == 0 {
                    return Some(false);
                }
                for i in start..self.reps.len() {
                    let w = &self.reps[i].0;
                    if (0..self.r).all(|j| (acc[j] + c * w[j]) % d == self.target[j]) {
                        self.chosen.push((i, c));
                        return Some(true);
                    }
                }
                return Some(false);
            }
            for i in start..self.reps.len() {
                for c in 1..d {
                    let w = self.reps[i].0.clone();
                    for j in 0..self.r {
                        acc[j] = (acc[j] + c * w[j]) % d;
                    }
                    self.chosen.push((i, c));
                    match self.go(i + 1, left - 1, acc, (sum + c) % d) {
                        Some(true) => return Some(true),
                        None => return None,
                        Some(false) => {}
                    }
                    self.chosen.pop();
                    for j in 0..self.r {
                        acc[j] = (acc[j] + (d - c) * w[j]) % d;
                    }
                }
            }
            Some(false)
        }
    }
    let mut s = S {
        reps: &reps,
        d,
        r,
        target,
        nodes: 0,
        budget,
        chosen: Vec::new(),
    };
    let max_depth = reps.len().min((r + 1) * (r + 1));
    for depth in 1..=max_depth {
        let mut acc = vec![0u64; r];
        s.chosen.clear();
        match s.go(0, depth, &mut acc, 0) {
            Some(true) => {
                let mut terms: Vec<(usize, u64)> =
                    s.chosen.iter().map(|&(i, c)| (reps[i].1, c)).collect();
                terms.sort_unstable();
                return Some(EdgeCombination { modulus: d, terms });
            }
            Some(false) => {}
            None => return None,
        }
    }
    None
}

/// Inductive construction: express some `u_i - u_j` through differences of
/// edge index vectors, merge parts `i` and `j`, solve the smaller instance
/// and correct the merged coordinate.
fn merge_construction(
    g: &KGraph,
    part: &VertexPartition,
    d: u64,
    target: &[u64],
) -> Result<EdgeCombination> {
    let labels: Vec<usize> = (0..g.n()).map(|v| part.part_of(v)).collect();
    let raw = merge_rec(g, &labels, part.part_count(), d, target)?;
    let mut acc: HashMap<usize, u64> = HashMap::new();
    for (e, c) in raw {
        let entry = acc.entry(e).or_insert(0);
        *entry = (*entry + crate::util::rem_euclid(c, d)) % d;
    }
    let mut terms: Vec<(usize, u64)> = acc.into_iter().filter(|&(_, c)| c != 0).collect();
    terms.sort_unstable();
    Ok(EdgeCombination { modulus: d, terms })
}

fn merge_rec(
    g: &KGraph,
    labels: &[usize],
    r: usize,
    d: u64,
    target: &[u64],
) -> Result<Vec<(usize, i64)>> {
    if r == 1 || target.iter().all(|&c| c % d == 0) {
        return Ok(Vec::new());
    }
    let counts: Vec<Vec<usize>> = g
        .edges()
        .iter()
        .map(|e| {
            let mut c = vec![0usize; r];
            for &v in e {
                c[labels[v]] += 1;
            }
            c
        })
        .collect();
    let (i, j, m) = unit_difference(&counts, r, d)?;
    // merge j into i
    let relabel = |x: usize| -> usize {
        let x = if x == j { i } else { x };
        if x > j {
            x - 1
        } else {
            x
        }
    };
    let merged: Vec<usize> = labels.iter().map(|&x| relabel(x)).collect();
    let mut t2 = vec![0u64; r - 1];
    for (x, &c) in target.iter().enumerate() {
        let y = relabel(x);
        t2[y] = (t2[y] + c) % d;
    }
    let mut n: Vec<(usize, i64)> = merge_rec(g, &merged, r - 1, d, &t2)?
        .into_iter()
        .map(|(e, c)| (e, crate::util::rem_euclid(c, d) as i64))
        .collect();
    // coordinate i of sum n_e i(e) under the unmerged labels
    let mut y: i64 = 0;
    for &(e, c) in &n {
        y += c * counts[e][i] as i64;
    }
    let y = crate::util::rem_euclid(y, d);
    let lift = (target[i] + d - y) % d;
    if lift != 0 {
        n.extend(m.into_iter().map(|(e, c)| (e, c * lift as i64)));
    }
    Ok(n)
}

/// Finds `(i, j, m)` with `sum m_e i(e) = u_i - u_j (mod d)` and
/// `sum m_e = 0`, using at most `2r` edges.
fn unit_difference(counts: &[Vec<usize>], r: usize, d: u64) -> Result<(usize, usize, Vec<(usize, i64)>)> {
    let inv = |x: u64| -> i64 {
        (1..d).find(|&y| (x % d) * y % d == 1).map(|y| y as i64).unwrap_or(1)
    };
    let find_dominating = |need: &[usize]| -> Option<usize> {
        counts
            .iter()
            .position(|c| c.iter().zip(need).all(|(a, b)| a >= b))
    };
    enum X {
        Direct(Vec<(usize, i64)>),
        // 2u_i - u_j - u_l as e - e'
        Triple { l: usize, e: usize, e2: usize },
    }
    let x_ij = |i: usize, j: usize| -> Result<X> {
        let mut need = vec![0usize; r];
        need[i] = 2;
        let e = find_dominating(&need)
            .ok_or_else(|| Error::Domain("covering hypothesis fails".into()))?;
        let mut m = counts[e].clone();
        m[i] -= 2;
        m[j] += 1;
        // drop one more vertex so that exactly k-1 are prescribed
        let e2 = find_dominating(&m)
            .ok_or_else(|| Error::Domain("covering hypothesis fails".into()))?;
        let l = (0..r).find(|&x| counts[e2][x] > m[x]).expect("one extra vertex");
        Ok(if l == i {
            X::Direct(vec![(e, 1), (e2, -1)])
        } else if l == j {
            let h = inv(2);
            X::Direct(vec![(e, h), (e2, -h)])
        } else {
            X::Triple { l, e, e2 }
        })
    };
    let mut involutive: Vec<(usize, Vec<(usize, usize, usize, usize)>)> = Vec::new();
    for i in 0..r {
        let mut f: Vec<Option<(usize, usize, usize)>> = vec![None; r];
        for j in (0..r).filter(|&j| j != i) {
            match x_ij(i, j)? {
                X::Direct(m) => return Ok((i, j, m)),
                X::Triple { l, e, e2 } => f[j] = Some((l, e, e2)),
            }
        }
        let mut pairs = Vec::new();
        for j in (0..r).filter(|&j| j != i) {
            let (l, e, e2) = f[j].unwrap();
            let (ll, e3, e4) = f[l].unwrap();
            if ll != j {
                // x_ij - x_il = u_{f(f(j))} - u_j
                return Ok((ll, j, vec![(e, 1), (e2, -1), (e3, -1), (e4, 1)]));
            }
            if j < l {
                pairs.push((e, e2, j, l));
            }
        }
        involutive.push((i, pairs));
        if involutive.len() == 2 {
            break;
        }
    }
    // all involutions: y_i = r u_i - sum u, so u_a - u_b = r^{-1} (y_a - y_b)
    let lam = inv(r as u64);
    let (a, pa) = &involutive[0];
    let (b, pb) = &involutive[1];
    let mut m = Vec::new();
    for &(e, e2, _, _) in pa {
        m.push((e, lam));
        m.push((e2, -lam));
    }
    for &(e, e2, _, _) in pb {
        m.push((e, -lam));
        m.push((e2, lam));
    }
    Ok((*a, *b, m))
}
