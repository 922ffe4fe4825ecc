//! Divisibility balancers: delete a few copies so that every class of a
//! multipartite host has size divisible by a target modulus.

use crate::error::{domain, Error, Result};
use crate::gadget::{balanced_gadget, pack_gadget_with, GadgetPacking, GadgetRequest};
use crate::graph::{IndexVector, KGraph, Vertex, VertexPartition};
use crate::host::BlowupHost;
use crate::lattice::solve_index_equation;
use crate::packing::Packing;
use crate::search::{mask_of, visit_copies, CopyConstraints, CopyMode, HostIndex};
use crate::util::{for_each_combination, gcd, smallest_prime_factor};

use super::complete::{smallest_unbalanced_s, CompletePattern};
use super::supply::{place_gadget, place_realisation, transfer_gadget, CopySupplier, FreshVertices};

/// Supplies blocks of vertex-disjoint pattern copies that move a residue
/// `d'` from one class to another.
pub trait ShiftSource {
    fn class_count(&self) -> usize;
    fn class_of(&self, v: Vertex) -> usize;
    /// Unused vertices per class.
    fn class_sizes(&self) -> Vec<usize>;
    /// Fresh copies whose union meets `from` in `d'`, `to` in `-d'` and
    /// every other class in `0` vertices modulo `d`; `None` if there is none.
    fn shift(&mut self, from: usize, to: usize) -> Result<Option<Vec<Vec<Vertex>>>>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gcd1Run {
    pub copies: Vec<Vec<Vertex>>,
    /// Blocks taken from the source.
    pub blocks: usize,
    /// Deletion steps (each fixes at least one class).
    pub steps: usize,
}

fn residues(sizes: &[usize], d: u64) -> Vec<u64> {
    sizes.iter().map(|&x| x as u64 % d).collect()
}

/// Deletes shift blocks along paths of `sa` until `d` divides every class.
/// `sa` is a 2-graph on the class indices.
pub fn balance_gcd1(source: &mut dyn ShiftSource, sa: &KGraph, d: u64, d_prime: u64) -> Result<Gcd1Run> {
    let t = source.class_count();
    if sa.k() != 2 || sa.n() != t {
        return domain(format!("the class graph must be a 2-graph on {t} vertices"));
    }
    if d == 0 || d_prime == 0 || d % d_prime != 0 {
        return domain(format!("d' = {d_prime} must divide d = {d}"));
    }
    let sizes = source.class_sizes();
    if let Some(j) = sizes.iter().position(|&x| x as u64 % d_prime != 0) {
        return domain(format!("d' = {d_prime} does not divide class {j} ({} vertices)", sizes[j]));
    }
    let adj = sa.adjacency();
    for comp in adj.components() {
        let total: u64 = comp.iter().map(|&j| sizes[j] as u64).sum();
        if total % d != 0 {
            return domain(format!(
                "component {comp:?} has {total} vertices, not divisible by d = {d}"
            ));
        }
    }
    let mut run = Gcd1Run {
        copies: Vec::new(),
        blocks: 0,
        steps: 0,
    };
    loop {
        let res = residues(&source.class_sizes(), d);
        let zeros = res.iter().filter(|&&r| r == 0).count();
        let Some(u) = res.iter().position(|&r| r != 0) else {
            return Ok(run);
        };
        if run.steps == t {
            return Err(Error::Defect(format!("no balance after {t} steps")));
        }
        let x = res[u] / d_prime;
        let v = (0..t)
            .find(|&v| v != u && res[v] != 0 && adj.component[v] == adj.component[u])
            .ok_or_else(|| Error::Defect(format!("class {u} is the only unbalanced one in its component")))?;
        let path = adj.shortest_path(u, v).expect("same component");
        for w in path.windows(2) {
            for _ in 0..x {
                let before = source.class_sizes();
                let Some(block) = source.shift(w[0], w[1])? else {
                    return domain(format!("no shift block available for class pair ({}, {})", w[0], w[1]));
                };
                check_block(&*source, &block, &before, w[0], w[1], d, d_prime)?;
                run.copies.extend(block);
                run.blocks += 1;
            }
        }
        run.steps += 1;
        let after = residues(&source.class_sizes(), d);
        if after.iter().filter(|&&r| r == 0).count() <= zeros {
            return Err(Error::Defect("deletion step did not fix a class".into()));
        }
    }
}

fn check_block(
    source: &dyn ShiftSource,
    block: &[Vec<Vertex>],
    before: &[usize],
    from: usize,
    to: usize,
    d: u64,
    d_prime: u64,
) -> Result<()> {
    let mut meet = vec![0u64; before.len()];
    for copy in block {
        for &v in copy {
            meet[source.class_of(v)] += 1;
        }
    }
    let after = source.class_sizes();
    for j in 0..before.len() {
        let want = if j == from {
            d_prime % d
        } else if j == to {
            (d - d_prime % d) % d
        } else {
            0
        };
        if meet[j] % d != want || before[j] as u64 - meet[j] != after[j] as u64 {
            return Err(Error::Defect(format!("shift block ({from}, {to}) meets class {j} in {} vertices", meet[j])));
        }
    }
    Ok(())
}

/// Shift blocks found by exhaustive search in an explicit host; each block
/// is a single pattern copy.
pub struct SearchShift {
    pattern: KGraph,
    host: KGraph,
    part: VertexPartition,
    d: u64,
    d_prime: u64,
    used: u64,
    index: HostIndex,
}

impl SearchShift {
    pub fn new(pattern: &KGraph, host: &KGraph, part: &VertexPartition, d: u64, d_prime: u64) -> Result<Self> {
        crate::error::guard("host vertex count", host.n(), 64)?;
        if part.vertex_count() != host.n() {
            return domain("partition does not match the host");
        }
        Ok(SearchShift {
            pattern: pattern.clone(),
            host: host.clone(),
            part: part.clone(),
            d,
            d_prime,
            used: 0,
            index: HostIndex::new(host),
        })
    }

    pub fn packing(&self, copies: Vec<Vec<Vertex>>) -> Packing {
        Packing::new(self.pattern.clone(), self.host.clone(), copies)
    }
}

impl ShiftSource for SearchShift {
    fn class_count(&self) -> usize {
        self.part.part_count()
    }

    fn class_of(&self, v: Vertex) -> usize {
        self.part.part_of(v)
    }

    fn class_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.part.part_count()];
        for v in 0..self.host.n() {
            if self.used & (1u64 << v) == 0 {
                s[self.part.part_of(v)] += 1;
            }
        }
        s
    }

    fn shift(&mut self, from: usize, to: usize) -> Result<Option<Vec<Vec<Vertex>>>> {
        let (d, dp) = (self.d, self.d_prime);
        let r = self.part.part_count();
        let masks: Vec<u64> = self.part.parts().iter().map(|p| mask_of(p)).collect();
        let want: Vec<u64> = (0..r)
            .map(|j| {
                if j == from {
                    dp % d
                } else if j == to {
                    (d - dp % d) % d
                } else {
                    0
                }
            })
            .collect();
        let constraints = CopyConstraints {
            allowed: !self.used,
            ..Default::default()
        };
        let mut found = None;
        let mode = CopyMode::Unlabelled;
        visit_copies(&self.pattern, &self.host, &self.index, mode, &constraints, |m, img| {
            if masks
                .iter()
                .zip(&want)
                .all(|(&pm, &w)| (img & pm).count_ones() as u64 % d == w)
            {
                found = Some((m.to_vec(), img));
                false
            } else {
                true
            }
        });
        Ok(found.map(|(m, img)| {
            self.used |= img;
            vec![m]
        }))
    }
}

/// Copies of `U_s(K)` inside the classes of one template edge.
pub struct UnbalancedShift<'a> {
    pub fresh: &'a mut FreshVertices,
    pub gadget: &'a GadgetPacking,
}

impl ShiftSource for UnbalancedShift<'_> {
    fn class_count(&self) -> usize {
        self.fresh.host().class_count()
    }

    fn class_of(&self, v: Vertex) -> usize {
        self.fresh.host().class_of(v)
    }

    fn class_sizes(&self) -> Vec<usize> {
        self.fresh.remaining_sizes()
    }

    fn shift(&mut self, from: usize, to: usize) -> Result<Option<Vec<Vec<Vertex>>>> {
        let template = self.fresh.host().template();
        let Some(e) = template
            .edges()
            .iter()
            .find(|e| e.contains(&from) && e.contains(&to))
            .cloned()
        else {
            return Ok(None);
        };
        // the larger class (m + gcd) goes to `from`, the smaller to `to`
        let mut targets = vec![to, from];
        targets.extend(e.iter().copied().filter(|&j| j != from && j != to));
        place_gadget(self.fresh, self.gadget, &targets).map(Some)
    }
}

/// Copies of `B(b gcd(K))` in a blown-up Φ: one vertex of the first class
/// in `from`, the rest of it in `to`, the other classes in a common `T`.
pub struct PhiShift<'a> {
    pub fresh: &'a mut FreshVertices,
    pub block: &'a GadgetPacking,
}

/// The first `(k-1)`-set `T` avoiding `u, v` with `T + u` and `T + v` edges.
pub fn phi_centre(template: &KGraph, u: usize, v: usize) -> Option<Vec<usize>> {
    let others: Vec<usize> = (0..template.n()).filter(|&j| j != u && j != v).collect();
    let mut found = None;
    for_each_combination(others.len(), template.k() - 1, |c| {
        let t: Vec<usize> = c.iter().map(|&i| others[i]).collect();
        let with = |x: usize| {
            let mut e = t.clone();
            e.push(x);
            template.contains_edge(&e)
        };
        if with(u) && with(v) {
            found = Some(t);
            return false;
        }
        true
    });
    found
}

impl ShiftSource for PhiShift<'_> {
    fn class_count(&self) -> usize {
        self.fresh.host().class_count()
    }

    fn class_of(&self, v: Vertex) -> usize {
        self.fresh.host().class_of(v)
    }

    fn class_sizes(&self) -> Vec<usize> {
        self.fresh.remaining_sizes()
    }

    fn shift(&mut self, from: usize, to: usize) -> Result<Option<Vec<Vec<Vertex>>>> {
        let Some(centre) = phi_centre(self.fresh.host().template(), from, to) else {
            return Ok(None);
        };
        let m = self.block.gadget.class_sizes()[0];
        let mut placement = vec![(from, 1), (to, m - 1)];
        placement.extend(centre.iter().map(|&j| (j, m)));
        let mut verts = self.fresh.take_placement(&placement)?;
        let mut first = verts.remove(0);
        first.extend(verts.remove(0));
        verts.insert(0, first);
        Ok(Some(transfer_gadget(self.block, &verts)))
    }
}

/// `B(b m)` with its perfect packing by `m` stacked rotated `B(K)` blocks.
fn stacked_balanced(cp: &CompletePattern, m: usize) -> Result<GadgetPacking> {
    let k = cp.k();
    let unit = pack_gadget_with(&cp.data, GadgetRequest::Balanced)?;
    let gadget = balanced_gadget(k, cp.b() * m)?;
    let mut fresh = FreshVertices::new(gadget.host.clone());
    let identity: Vec<usize> = (0..k).collect();
    let mut copies = Vec::new();
    for _ in 0..m {
        copies.extend(place_gadget(&mut fresh, &unit, &identity)?);
    }
    Ok(GadgetPacking {
        packing: Packing::new(cp.data.pattern.clone(), gadget.host.clone(), copies),
        gadget,
    })
}

#[derive(Clone, Debug)]
pub struct BalanceRun {
    pub packing: Packing,
    pub s: usize,
    /// Pattern copies deleted by each of the five phases.
    pub phase_copies: [usize; 5],
    /// Copies of `B(b(s+1))` the host guarantees per template edge and of
    /// `Φ(b(s+1))` per class-graph edge, minus one.
    pub capacity: usize,
    pub final_sizes: Vec<usize>,
}

/// Five-phase balancing of a blow-up host so that `bk gcd(K)` divides every
/// class. The template of `host` plays the connected k-graph on the class
/// indices; `sa` is the class graph used for the `gcd(K)` residues.
pub fn balance_full(host: &BlowupHost, pattern: &KGraph, sa: &KGraph, s: Option<usize>) -> Result<BalanceRun> {
    let cp = CompletePattern::new(pattern)?;
    let (k, b) = (cp.k(), cp.b());
    let Some(g64) = cp.data.profile.gcd else {
        return domain("gcd(K) is undefined");
    };
    let g = g64 as usize;
    let template = host.template().clone();
    let t = template.n();
    if template.k() != k {
        return domain("template and pattern uniformities differ");
    }
    if sa.k() != 2 || sa.n() != t {
        return domain(format!("the class graph must be a 2-graph on {t} vertices"));
    }
    let b1 = cp.class_sizes[0];
    if gcd(b1 as u64, g64) != 1 {
        return domain(format!("b_1 = {b1} and gcd(K) = {g} are not coprime"));
    }
    let total: usize = host.sizes().iter().sum();
    if total % b != 0 {
        return domain(format!("b = {b} does not divide |Y| = {total}"));
    }
    if template.adjacency().component_count != 1 {
        return domain("the template k-graph is not connected");
    }
    let sa_adj = sa.adjacency();
    let r = sa_adj.component_count;
    if g > 1 {
        let p = smallest_prime_factor(g64).unwrap();
        if r as u64 >= p {
            return domain(format!("class graph has {r} components, not fewer than {p}"));
        }
    }
    let (s, unbalanced) = match s {
        None => smallest_unbalanced_s(&cp.data)?,
        Some(s) => {
            if s % (k * g) != 0 {
                return domain(format!("s = {s} is not divisible by k gcd(K) = {}", k * g));
            }
            match crate::gadget::pack_unbalanced(&cp.data, s)? {
                Some(gp) => (s, gp),
                None => return domain(format!("U_s(K) has no perfect packing for s = {s}")),
            }
        }
    };
    let m = b * (s + 1);
    let sizes = host.sizes();
    let mut capacity = usize::MAX;
    for e in template.edges() {
        capacity = capacity.min(e.iter().map(|&j| sizes[j]).min().unwrap() / m);
    }
    for e in sa.edges() {
        let Some(c) = phi_centre(&template, e[0], e[1]) else {
            return domain(format!("no centre set T for class-graph edge {e:?}"));
        };
        let least = c.iter().chain(e.iter()).map(|&j| sizes[j]).min().unwrap();
        capacity = capacity.min(least / m);
    }
    let capacity = capacity.saturating_sub(1);

    let realisation = cp.realisation().clone();
    let mut fresh = FreshVertices::new(host.clone());
    let mut copies: Vec<Vec<Vertex>> = Vec::new();
    let mut phase_copies = [0usize; 5];
    let first_edge = template.edges()[0].clone();

    // 1: b gcd(K) divides |Y|
    let y: usize = fresh.remaining_sizes().iter().sum();
    let z = (y / b) % g;
    for _ in 0..z {
        copies.push(place_realisation(&mut fresh, b, &realisation, &first_edge)?);
    }
    phase_copies[0] = z;

    // 2: gcd(K) divides every component total of the class graph
    if g > 1 {
        let part = VertexPartition::new(sa_adj.component.clone(), r)?;
        let inv = (1..g64).find(|&x| x * b1 as u64 % g64 == 1).unwrap();
        let cur = fresh.remaining_sizes();
        let mut v = vec![0u64; r];
        for (j, &x) in cur.iter().enumerate() {
            v[part.part_of(j)] += x as u64;
        }
        let v: Vec<u64> = v.iter().map(|&x| x % g64 * inv % g64).collect();
        let combo = solve_index_equation(&template, &part, g64, &IndexVector::new(v, g64))?;
        for &(ei, a) in &combo.terms {
            let e = template.edges()[ei].clone();
            for _ in 0..a {
                copies.push(place_realisation(&mut fresh, b, &realisation, &e)?);
                phase_copies[1] += 1;
            }
        }
        // 3: gcd(K) divides every class
        let block = stacked_balanced(&cp, g)?;
        let mut src = PhiShift {
            fresh: &mut fresh,
            block: &block,
        };
        let run = balance_gcd1(&mut src, sa, g64, 1)?;
        phase_copies[2] = run.copies.len();
        copies.extend(run.copies);
    }

    // 4: bk gcd(K) divides |Y|
    let y: usize = fresh.remaining_sizes().iter().sum();
    let z = (y / (b * g)) % k;
    for _ in 0..z * g {
        copies.push(place_realisation(&mut fresh, b, &realisation, &first_edge)?);
    }
    phase_copies[3] = z * g;

    // 5: bk gcd(K) divides every class
    let adj_r = template.adjacency_graph();
    let mut src = UnbalancedShift {
        fresh: &mut fresh,
        gadget: &unbalanced,
    };
    let run = balance_gcd1(&mut src, &adj_r, (b * k * g) as u64, g64)?;
    phase_copies[4] = run.copies.len();
    copies.extend(run.copies);

    let final_sizes = fresh.remaining_sizes();
    if let Some(j) = final_sizes.iter().position(|&x| x % (b * k * g) != 0) {
        return Err(Error::Defect(format!("class {j} ends with {} vertices", final_sizes[j])));
    }
    if copies.len() * 2 * b > capacity {
        return domain(format!(
            "{} copies deleted, more than N/2b with N = {capacity}; the host is too small",
            copies.len()
        ));
    }
    let packing = Packing::new(pattern.clone(), host.clone(), copies);
    let verdict = packing.verify();
    if !verdict.valid {
        return Err(Error::Defect(format!("balancing packing invalid: {:?}", verdict.violation)));
    }
    debug_assert_eq!(verdict.uncovered, final_sizes.iter().sum::<usize>());
    Ok(BalanceRun {
        packing,
        s,
        phase_copies,
        capacity,
        final_sizes,
    })
}
