//! Packings and their verification.

use std::collections::HashMap;

use crate::graph::{Host, KGraph, Vertex};
use crate::host::HostSpec;

/// Vertex-disjoint copies of `pattern` in `host`. `copies[i][u]` is the
/// host vertex playing pattern vertex `u` in copy `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Packing {
    pub pattern: KGraph,
    pub host: HostSpec,
    pub copies: Vec<Vec<Vertex>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    WrongLength { copy: usize, len: usize },
    OutOfRange { copy: usize, vertex: Vertex },
    NotInjective { copy: usize, vertex: Vertex },
    Overlap { first: usize, second: usize, vertex: Vertex },
    MissingEdge { copy: usize, edge: Vec<Vertex> },
    UniformityMismatch { pattern: usize, host: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::WrongLength { copy, len } => write!(f, "copy {copy} maps {len} vertices"),
            Violation::OutOfRange { copy, vertex } => {
                write!(f, "copy {copy} uses host vertex {vertex} out of range")
            }
            Violation::NotInjective { copy, vertex } => {
                write!(f, "copy {copy} uses host vertex {vertex} twice")
            }
            Violation::Overlap {
                first,
                second,
                vertex,
            } => write!(f, "copies {first} and {second} share host vertex {vertex}"),
            Violation::MissingEdge { copy, edge } => {
                write!(f, "copy {copy} maps a pattern edge onto non-edge {edge:?}")
            }
            Violation::UniformityMismatch { pattern, host } => {
                write!(f, "pattern is {pattern}-uniform but host is {host}-uniform")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub valid: bool,
    pub perfect: bool,
    pub covered: usize,
    pub uncovered: usize,
    pub violation: Option<Violation>,
}

impl Packing {
    pub fn new(pattern: KGraph, host: impl Into<HostSpec>, copies: Vec<Vec<Vertex>>) -> Self {
        Packing {
            pattern,
            host: host.into(),
            copies,
        }
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    pub fn verify(&self) -> Verdict {
        verify_copies(&self.pattern, &self.host, &self.copies)
    }
}

pub fn verify_packing(m: &Packing) -> Verdict {
    m.verify()
}

/// Checks copies of `pattern` against any host oracle.
pub fn verify_copies<H: Host + ?Sized>(pattern: &KGraph, host: &H, copies: &[Vec<Vertex>]) -> Verdict {
    let n = host.vertex_count();
    let fail = |violation: Violation, covered: usize| Verdict {
        valid: false,
        perfect: false,
        covered,
        uncovered: n.saturating_sub(covered),
        violation: Some(violation),
    };
    if pattern.k() != host.k() && !copies.is_empty() {
        return fail(
            Violation::UniformityMismatch {
                pattern: pattern.k(),
                host: host.k(),
            },
            0,
        );
    }
    let mut owner: HashMap<Vertex, usize> = HashMap::with_capacity(copies.len() * pattern.n());
    let mut image = Vec::with_capacity(pattern.k());
    for (i, copy) in copies.iter().enumerate() {
        if copy.len() != pattern.n() {
            return fail(
                Violation::WrongLength {
                    copy: i,
                    len: copy.len(),
                },
                owner.len(),
            );
        }
        for &v in copy {
            if v >= n {
                return fail(Violation::OutOfRange { copy: i, vertex: v }, owner.len());
            }
            if let Some(&j) = owner.get(&v) {
                let violation = if j == i {
                    Violation::NotInjective { copy: i, vertex: v }
                } else {
                    Violation::Overlap {
                        first: j,
                        second: i,
                        vertex: v,
                    }
                };
                return fail(violation, owner.len());
            }
            owner.insert(v, i);
        }
        for e in pattern.edges() {
            image.clear();
            image.extend(e.iter().map(|&u| copy[u]));
            if !host.has_edge(&image) {
                let mut edge = image.clone();
                edge.sort_unstable();
                return fail(Violation::MissingEdge { copy: i, edge }, owner.len());
            }
        }
    }
    let covered = owner.len();
    Verdict {
        valid: true,
        perfect: covered == n,
        covered,
        uncovered: n - covered,
        violation: None,
    }
}
