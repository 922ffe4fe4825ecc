//! Perfect-packing decision by exact cover over copy images.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::Result;
use crate::graph::{KGraph, Vertex};
use crate::packing::Packing;

use super::copies::{check_host, full_mask, unlabelled_copies, CopyIndex};
use super::SearchConfig;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchVerdict {
    Packed(Packing),
    /// Exhaustive: no perfect packing exists.
    None,
    /// The node budget ran out first.
    Unknown,
}

impl SearchVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            SearchVerdict::Packed(_) => "packed",
            SearchVerdict::None => "none",
            SearchVerdict::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub verdict: SearchVerdict,
    pub nodes: u64,
    pub copies: usize,
}

enum Outcome {
    Found(Vec<u32>),
    Exhausted,
    OutOfBudget,
    Cancelled,
}

struct Cover<'a> {
    copies: &'a CopyIndex,
    by_image: &'a HashMap<u64, u32>,
    b: usize,
    failed: HashSet<u64>,
    memo_cap: usize,
    nodes: u64,
    budget: u64,
    stack: Vec<u32>,
    branch: usize,
    best: &'a AtomicUsize,
}

impl Cover<'_> {
    /// Uncovered vertex with the fewest fitting copies, and that count.
    fn choose(&self, remaining: u64) -> (Vertex, usize) {
        let mut best = (usize::MAX, usize::MAX);
        let mut m = remaining;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let c = self.copies.by_vertex[v]
                .iter()
                .filter(|&&r| self.copies.images[r as usize] & !remaining == 0)
                .count();
            if c < best.1 {
                best = (v, c);
                if c <= 1 {
                    break;
                }
            }
        }
        best
    }

    fn solve(&mut self, remaining: u64) -> Outcome {
        if remaining == 0 {
            return Outcome::Found(self.stack.clone());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Outcome::OutOfBudget;
        }
        if self.nodes % 4096 == 0 && self.best.load(Ordering::Relaxed) < self.branch {
            return Outcome::Cancelled;
        }
        if remaining.count_ones() as usize == self.b {
            return match self.by_image.get(&remaining) {
                Some(&r) => {
                    self.stack.push(r);
                    let found = self.stack.clone();
                    self.stack.pop();
                    Outcome::Found(found)
                }
                None => Outcome::Exhausted,
            };
        }
        if self.failed.contains(&remaining) {
            return Outcome::Exhausted;
        }
        let (v, count) = self.choose(remaining);
        if count == 0 {
            return Outcome::Exhausted;
        }
        let rows: Vec<u32> = self.copies.by_vertex[v]
            .iter()
            .copied()
            .filter(|&r| self.copies.images[r as usize] & !remaining == 0)
            .collect();
        for r in rows {
            self.stack.push(r);
            let out = self.solve(remaining & !self.copies.images[r as usize]);
            self.stack.pop();
            match out {
                Outcome::Exhausted => {}
                other => return other,
            }
        }
        if self.failed.len() < self.memo_cap {
            self.failed.insert(remaining);
        }
        Outcome::Exhausted
    }
}

/// Exhaustive perfect-packing decision on hosts within the configured
/// guards. A `None` verdict is always a completed search.
pub fn decide_perfect_packing(pattern: &KGraph, host: &KGraph) -> Result<SearchReport> {
    decide_perfect_packing_with(pattern, host, &SearchConfig::default())
}

pub fn decide_perfect_packing_with(
    pattern: &KGraph,
    host: &KGraph,
    config: &SearchConfig,
) -> Result<SearchReport> {
    check_host(pattern, host, config)?;
    let b = pattern.n();
    let n = host.n();
    let report = |verdict, nodes, copies| SearchReport {
        verdict,
        nodes,
        copies,
    };
    if n == 0 {
        return Ok(report(SearchVerdict::Packed(Packing::new(pattern.clone(), host.clone(), vec![])), 0, 0));
    }
    if b == 0 || n % b != 0 {
        return Ok(report(SearchVerdict::None, 0, 0));
    }
    let copies = unlabelled_copies(pattern, host, config)?;
    let by_image: HashMap<u64, u32> = copies
        .images
        .iter()
        .enumerate()
        .map(|(i, &m)| (m, i as u32))
        .collect();
    let all = full_mask(n);
    let best = AtomicUsize::new(usize::MAX);
    let make = |branch: usize| Cover {
        copies: &copies,
        by_image: &by_image,
        b,
        failed: HashSet::new(),
        memo_cap: config.memo_cap,
        nodes: 0,
        budget: config.node_budget,
        stack: Vec::new(),
        branch,
        best: &best,
    };
    let root = make(0);
    let (v, count) = root.choose(all);
    let rows: Vec<u32> = copies.by_vertex[v].clone();
    let finish = |chosen: Vec<u32>, nodes| {
        let maps = chosen.iter().map(|&r| copies.maps[r as usize].clone()).collect();
        report(
            SearchVerdict::Packed(Packing::new(pattern.clone(), host.clone(), maps)),
            nodes,
            copies.len(),
        )
    };
    if count == 0 {
        return Ok(report(SearchVerdict::None, 1, copies.len()));
    }
    let outcomes: Vec<(Outcome, u64)> = rows
        .par_iter()
        .enumerate()
        .map(|(i, &r)| {
            if best.load(Ordering::Relaxed) < i {
                return (Outcome::Cancelled, 0);
            }
            let mut c = make(i);
            c.stack.push(r);
            let out = c.solve(all & !copies.images[r as usize]);
            if matches!(out, Outcome::Found(_)) {
                best.fetch_min(i, Ordering::Relaxed);
            }
            (out, c.nodes)
        })
        .collect();
    let nodes: u64 = 1 + outcomes.iter().map(|o| o.1).sum::<u64>();
    let mut unknown = false;
    for (out, _) in outcomes {
        match out {
            Outcome::Found(chosen) => return Ok(finish(chosen, nodes)),
            Outcome::OutOfBudget => unknown = true,
            Outcome::Exhausted => {}
            Outcome::Cancelled => unreachable!("only branches after a success are cancelled"),
        }
    }
    let verdict = if unknown {
        SearchVerdict::Unknown
    } else {
        SearchVerdict::None
    };
    Ok(report(verdict, nodes, copies.len()))
}
