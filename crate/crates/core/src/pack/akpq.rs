//! Heuristic almost-perfect `A^k_{p,q}`-packing: greedy maximal packing,
//! then exchanges that trade `t` copies for `t + 1`.

use std::collections::HashMap;

use crate::error::{domain, guard, Result};
use crate::gadget::akpq;
use crate::graph::{KGraph, Vertex};
use crate::packing::Packing;
use crate::search::mask_of;
use crate::util::for_each_combination;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AkpqConfig {
    /// Search nodes per copy-finding call.
    pub node_budget: u64,
    /// Copy subsets tried per exchange round.
    pub exchange_budget: usize,
}

impl Default for AkpqConfig {
    fn default() -> Self {
        AkpqConfig {
            node_budget: 200_000,
            exchange_budget: 2_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AkpqRun {
    pub packing: Packing,
    pub covered: usize,
    pub vertices: usize,
    /// Covered fraction of the host.
    pub coverage: f64,
    pub greedy_copies: usize,
    /// Successful `t -> t+1` exchanges.
    pub exchanges: usize,
}

struct Finder<'a> {
    sets: usize,
    bsize: usize,
    /// `(k-1)`-sets with their neighbourhoods, in lexicographic order.
    links: &'a [(Vec<Vertex>, u64)],
    nodes: u64,
    budget: u64,
}

impl Finder<'_> {
    /// Copies live in `w`; each is the `A` sets followed by `B`, as masks.
    fn one(&mut self, w: u64, start: usize, chosen: &mut Vec<usize>, common: u64, used: u64) -> Option<Vec<Vertex>> {
        if chosen.len() == self.sets {
            let b = lowest(common & !used, self.bsize)?;
            let mut map: Vec<Vertex> = chosen.iter().flat_map(|&i| self.links[i].0.clone()).collect();
            map.extend(b);
            return Some(map);
        }
        for i in start..self.links.len() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let (s, nb) = &self.links[i];
            let sm = mask_of(s);
            if sm & !w != 0 || sm & used != 0 {
                continue;
            }
            let c = common & nb & w;
            let u = used | sm;
            if (c & !u).count_ones() as usize >= self.bsize {
                chosen.push(i);
                let r = self.one(w, i + 1, chosen, c, u);
                chosen.pop();
                if r.is_some() {
                    return r;
                }
            }
        }
        None
    }

    fn find(&mut self, w: u64) -> Option<Vec<Vertex>> {
        self.nodes = 0;
        self.one(w, 0, &mut Vec::new(), u64::MAX, 0)
    }

    /// `m` disjoint copies inside `w`, trying alternatives for the first.
    fn disjoint(&mut self, w: u64, m: usize) -> Option<Vec<Vec<Vertex>>> {
        if m == 0 {
            return Some(Vec::new());
        }
        let mut w_try = w;
        // vary the first copy by forbidding one of its vertices at a time
        for _ in 0..8 {
            let first = self.find(w_try)?;
            let fm = mask_of(&first);
            if let Some(mut rest) = self.disjoint(w & !fm, m - 1) {
                rest.insert(0, first);
                return Some(rest);
            }
            w_try &= !(1u64 << fm.trailing_zeros());
        }
        None
    }
}

fn lowest(mask: u64, count: usize) -> Option<Vec<Vertex>> {
    let mut out = Vec::with_capacity(count);
    let mut m = mask;
    while out.len() < count {
        if m == 0 {
            return None;
        }
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    Some(out)
}

/// Packs `A^k_{p,q}` into `host` (at most 64 vertices). Coverage is reported,
/// not promised.
pub fn pack_akpq_heuristic(host: &KGraph, p: usize, q: usize, config: &AkpqConfig) -> Result<AkpqRun> {
    let k = host.k();
    if p * k > q {
        return domain(format!("needs pk <= q, got p={p}, q={q}, k={k}"));
    }
    let pattern = akpq(k, p, q)?;
    let n = host.n();
    guard("host vertex count", n, 64)?;
    let mut link: HashMap<Vec<Vertex>, u64> = HashMap::new();
    for e in host.edges() {
        for (i, &v) in e.iter().enumerate() {
            let mut s = e.clone();
            s.remove(i);
            *link.entry(s).or_default() |= 1u64 << v;
        }
    }
    let mut links: Vec<(Vec<Vertex>, u64)> = link.into_iter().collect();
    links.sort();
    let mut finder = Finder {
        sets: q - p,
        bsize: p * (k - 1),
        links: &links,
        nodes: 0,
        budget: config.node_budget,
    };
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut copies: Vec<Vec<Vertex>> = Vec::new();
    let mut free = all;
    while let Some(c) = finder.find(free) {
        free &= !mask_of(&c);
        copies.push(c);
    }
    let greedy_copies = copies.len();
    let mut exchanges = 0;
    let max_t = p * (k - 1);
    'round: loop {
        // copies with more than p(k-1) neighbours of some free (k-1)-set
        let good: Vec<usize> = (0..copies.len())
            .filter(|&i| {
                let cm = mask_of(&copies[i]);
                links
                    .iter()
                    .any(|(s, nb)| mask_of(s) & !free == 0 && (nb & cm).count_ones() as usize > max_t)
            })
            .collect();
        let mut tried = 0;
        for t in 1..=max_t.min(good.len()) {
            let mut swap = None;
            for_each_combination(good.len(), t, |c| {
                tried += 1;
                let w = c.iter().fold(free, |w, &i| w | mask_of(&copies[good[i]]));
                if let Some(new) = finder.disjoint(w, t + 1) {
                    swap = Some((c.iter().map(|&i| good[i]).collect::<Vec<_>>(), new));
                    return false;
                }
                tried < config.exchange_budget
            });
            if let Some((old, new)) = swap {
                for &i in old.iter().rev() {
                    let c = copies.remove(i);
                    free |= mask_of(&c);
                }
                for c in new {
                    free &= !mask_of(&c);
                    copies.push(c);
                }
                while let Some(c) = finder.find(free) {
                    free &= !mask_of(&c);
                    copies.push(c);
                }
                exchanges += 1;
                continue 'round;
            }
            if tried >= config.exchange_budget {
                break;
            }
        }
        break;
    }
    let covered = n - free.count_ones() as usize;
    Ok(AkpqRun {
        packing: Packing::new(pattern, host.clone(), copies),
        covered,
        vertices: n,
        coverage: if n == 0 { 1.0 } else { covered as f64 / n as f64 },
        greedy_copies,
        exchanges,
    })
}
