//! Perfect K-packings of complete k-partite hosts.

use num_integer::lcm;
use num_rational::Ratio;

use crate::error::{domain, Error, Result};
use crate::gadget::{pack_gadget_with, pack_unbalanced, unbalanced_recipe, GadgetPacking, GadgetRequest, PatternData};
use crate::graph::{KGraph, Vertex};
use crate::host::BlowupHost;
use crate::packing::Packing;
use crate::util::{factorial, gcd};

use super::supply::{place_gadget, place_realisation, CopySupplier, FreshVertices};

type Q = Ratio<i128>;

fn q(r: Ratio<u64>) -> Q {
    Q::new(*r.numer() as i128, *r.denom() as i128)
}

/// A complete k-partite pattern with its class sizes (in the order of its
/// realisation).
#[derive(Clone, Debug)]
pub struct CompletePattern {
    pub data: PatternData,
    pub class_sizes: Vec<usize>,
}

impl CompletePattern {
    pub fn new(pattern: &KGraph) -> Result<Self> {
        let data = PatternData::new(pattern)?;
        let complete = data.unordered.iter().find(|r| {
            r.classes.iter().map(Vec::len).product::<usize>() == pattern.edge_count()
        });
        let Some(r) = complete else {
            return domain("pattern is not a complete k-partite k-graph");
        };
        let class_sizes = r.sizes();
        Ok(CompletePattern { data, class_sizes })
    }

    pub(crate) fn realisation(&self) -> &crate::realisation::Realisation {
        self.data
            .unordered
            .iter()
            .find(|r| r.sizes() == self.class_sizes)
            .expect("the complete realisation")
    }

    pub fn k(&self) -> usize {
        self.data.k()
    }

    pub fn b(&self) -> usize {
        self.data.b()
    }
}

fn complete_host(k: usize, sizes: &[usize]) -> Result<BlowupHost> {
    if sizes.len() != k {
        return domain(format!("host has {} classes, the pattern has {k}", sizes.len()));
    }
    if sizes.contains(&0) {
        return domain("host classes must be non-empty");
    }
    BlowupHost::complete(sizes)
}

fn verified(pattern: &KGraph, host: BlowupHost, copies: Vec<Vec<Vertex>>) -> Result<Packing> {
    let packing = Packing::new(pattern.clone(), host, copies);
    let v = packing.verify();
    if !v.valid || !v.perfect {
        return Err(Error::Defect(format!(
            "packer output failed verification: valid={}, uncovered={}, {:?}",
            v.valid, v.uncovered, v.violation
        )));
    }
    Ok(packing)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BalancedObstruction {
    UnequalClasses { sizes: Vec<usize> },
    NotDivisible { class_size: usize, b1: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BalancedOutcome {
    Packed(Packing),
    Impossible(BalancedObstruction),
}

/// Pattern with every class of size `b1` into a complete host: perfect iff
/// the host classes are equal and divisible by `b1`.
pub fn pack_balanced(pattern: &KGraph, sizes: &[usize]) -> Result<BalancedOutcome> {
    let cp = CompletePattern::new(pattern)?;
    let b1 = cp.class_sizes[0];
    if cp.class_sizes.iter().any(|&c| c != b1) {
        return domain("pack_balanced needs a pattern with equal class sizes");
    }
    let host = complete_host(cp.k(), sizes)?;
    if sizes.iter().any(|&s| s != sizes[0]) {
        return Ok(BalancedOutcome::Impossible(BalancedObstruction::UnequalClasses {
            sizes: sizes.to_vec(),
        }));
    }
    if sizes[0] % b1 != 0 {
        return Ok(BalancedOutcome::Impossible(BalancedObstruction::NotDivisible {
            class_size: sizes[0],
            b1,
        }));
    }
    let mut fresh = FreshVertices::new(host.clone());
    let targets: Vec<usize> = (0..cp.k()).collect();
    let copies = (0..sizes[0] / b1)
        .map(|_| place_realisation(&mut fresh, cp.b(), cp.realisation(), &targets))
        .collect::<Result<Vec<_>>>()?;
    verified(pattern, host, copies).map(BalancedOutcome::Packed)
}

/// Tolerances for the complete-host packers; `None` picks the defaults.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PackerConfig {
    /// `σ(G) >= σ(K) + α` for the lopsided packer; default `1/(4k)`.
    pub alpha: Option<Ratio<u64>>,
    /// Class-size tolerance; default `1/(10 b s k^4)`.
    pub beta: Option<Ratio<u64>>,
    /// Parameter of the `U_s(K)` gadget; default the smallest multiple of
    /// `k gcd(K)` for which `U_s(K)` has a perfect packing.
    pub s: Option<usize>,
}

/// Smallest multiple of `k gcd(K)` whose `U_s(K)` has a perfect packing.
pub fn smallest_unbalanced_s(data: &PatternData) -> Result<(usize, GadgetPacking)> {
    let Some(g) = data.profile.gcd else {
        return domain("gcd(K) is undefined");
    };
    let step = data.k() * g as usize;
    let s0 = unbalanced_recipe(data)?.s0;
    let last = s0.div_ceil(step).max(1) * step;
    let mut s = step;
    while s < last {
        if s * data.b() > g as usize {
            match pack_unbalanced(data, s) {
                Ok(Some(gp)) => return Ok((s, gp)),
                Ok(None) | Err(Error::Guard { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        s += step;
    }
    let gp = pack_gadget_with(data, GadgetRequest::Unbalanced { s: last })?;
    Ok((last, gp))
}

fn unbalanced_for(data: &PatternData, s: Option<usize>) -> Result<(usize, GadgetPacking)> {
    match s {
        None => smallest_unbalanced_s(data),
        Some(s) => {
            let g = data.profile.gcd.unwrap_or(0) as usize;
            if g == 0 || s % (data.k() * g) != 0 {
                return domain(format!("s = {s} is not a multiple of k gcd(K)"));
            }
            match pack_unbalanced(data, s)? {
                Some(gp) => Ok((s, gp)),
                None => domain(format!("U_s(K) has no perfect packing for s = {s}")),
            }
        }
    }
}

fn default_beta(b: usize, s: usize, k: usize) -> Ratio<u64> {
    Ratio::new(1, 10 * (b * s * k.pow(4)) as u64)
}

#[derive(Clone, Debug)]
pub struct NearlyBalancedRun {
    pub packing: Packing,
    pub s: usize,
    pub beta: Ratio<u64>,
    /// `d_1, ..., d_{k-1}`.
    pub d: Vec<i64>,
    pub unbalanced_copies: usize,
}

/// Shared tail of the complete-host packers: `U_s(K)` deletions along the
/// `d_i` recursion, then `B(K)` blocks. `slack` is the allowed shortfall
/// below `n/k` per class.
fn nearly_balanced_core(
    cp: &CompletePattern,
    unbalanced: &GadgetPacking,
    s: usize,
    fresh: &mut FreshVertices,
    slack: Q,
    out: &mut Vec<Vec<Vertex>>,
) -> Result<Vec<i64>> {
    let (k, b) = (cp.k(), cp.b());
    let g = cp.data.profile.gcd.expect("unequal classes give a defined gcd") as usize;
    let sizes = fresh.remaining_sizes();
    let n: usize = sizes.iter().sum();
    let unit = b * k * g;
    if let Some(j) = sizes.iter().position(|&x| x % unit != 0) {
        return domain(format!("class {j} has {} vertices, not divisible by bk gcd(K) = {unit}", sizes[j]));
    }
    let third = n / k;
    if let Some(j) = sizes
        .iter()
        .position(|&x| Q::from_integer(x as i128) < Q::from_integer(third as i128) - slack)
    {
        return domain(format!(
            "class {j} has {} vertices, below n/k - beta n = {}",
            sizes[j],
            Q::from_integer(third as i128) - slack
        ));
    }
    let mut d = Vec::with_capacity(k - 1);
    let mut prev = 0i64;
    for &x in &sizes[..k - 1] {
        prev += (x as i64 - third as i64) / g as i64;
        d.push(prev);
    }
    let total: usize = d.iter().map(|x| x.unsigned_abs() as usize).sum();
    let min = *sizes.iter().min().unwrap();
    if k * b * s * total > min {
        return domain(format!(
            "{total} copies of U_s(K) need k b s N = {} vertices, more than the smallest class ({min})",
            k * b * s * total
        ));
    }
    for (i, &di) in d.iter().enumerate() {
        let mut targets = vec![0usize; k];
        let (small, large) = if di > 0 { (i + 1, i) } else { (i, i + 1) };
        targets[0] = small;
        targets[1] = large;
        let mut rest = (0..k).filter(|&j| j != i && j != i + 1);
        for t in targets.iter_mut().skip(2) {
            *t = rest.next().unwrap();
        }
        for _ in 0..di.unsigned_abs() {
            out.extend(place_gadget(fresh, unbalanced, &targets)?);
        }
    }
    let left = fresh.remaining_sizes();
    let expect = third - b * s * total;
    if left.iter().any(|&x| x != expect) || expect % b != 0 {
        return Err(Error::Defect(format!(
            "residual classes {left:?} after U_s(K) deletions, expected {expect} each"
        )));
    }
    let balanced = pack_gadget_with(&cp.data, GadgetRequest::Balanced)?;
    let identity: Vec<usize> = (0..k).collect();
    for _ in 0..expect / b {
        out.extend(place_gadget(fresh, &balanced, &identity)?);
    }
    Ok(d)
}

/// Near-balanced complete host: `bk gcd(K)` divides every class and every
/// class has at least `n/k - beta n` vertices.
pub fn pack_nearly_balanced(
    pattern: &KGraph,
    sizes: &[usize],
    config: &PackerConfig,
) -> Result<NearlyBalancedRun> {
    let cp = CompletePattern::new(pattern)?;
    if cp.class_sizes.iter().all(|&c| c == cp.class_sizes[0]) {
        return domain("pattern classes are all equal; use the balanced packer");
    }
    let host = complete_host(cp.k(), sizes)?;
    let (s, unbalanced) = unbalanced_for(&cp.data, config.s)?;
    let beta = config.beta.unwrap_or_else(|| default_beta(cp.b(), s, cp.k()));
    let n: usize = sizes.iter().sum();
    let mut fresh = FreshVertices::new(host.clone());
    let mut copies = Vec::new();
    let slack = q(beta) * n as i128;
    let d = nearly_balanced_core(&cp, &unbalanced, s, &mut fresh, slack, &mut copies)?;
    let unbalanced_copies = d.iter().map(|x| x.unsigned_abs() as usize).sum();
    Ok(NearlyBalancedRun {
        packing: verified(pattern, host, copies)?,
        s,
        beta,
        d,
        unbalanced_copies,
    })
}

#[derive(Clone, Debug)]
pub struct LopsidedRun {
    pub packing: Packing,
    pub s: usize,
    pub alpha: Ratio<u64>,
    pub beta: Ratio<u64>,
    /// `x = (φ - σ)/(1/k - σ)`.
    pub x: Ratio<u64>,
    /// Number of `Lo(K)` copies deleted, `k gcd(K) N`.
    pub lopsided_copies: usize,
    pub d: Vec<i64>,
}

/// Lopsided complete host with smallest first class: deletes `Lo(K)` copies
/// until the rest is nearly balanced, then finishes as above.
pub fn pack_lopsided(pattern: &KGraph, sizes: &[usize], config: &PackerConfig) -> Result<LopsidedRun> {
    let cp = CompletePattern::new(pattern)?;
    let (k, b) = (cp.k(), cp.b());
    if cp.class_sizes.iter().all(|&c| c == cp.class_sizes[0]) {
        return domain("pattern classes are all equal; use the balanced packer");
    }
    let host = complete_host(k, sizes)?;
    if sizes[1..].iter().any(|&x| x < sizes[0]) {
        return domain("the first host class must be a smallest one");
    }
    let (s, unbalanced) = unbalanced_for(&cp.data, config.s)?;
    let g = cp.data.profile.gcd.unwrap() as usize;
    let alpha = config.alpha.unwrap_or_else(|| Ratio::new(1, 4 * k as u64));
    let beta = config.beta.unwrap_or_else(|| default_beta(b, s, k));
    let n: usize = sizes.iter().sum();
    let sigma = q(cp.data.profile.sigma);
    let phi = Q::new(sizes[0] as i128, n as i128);
    if phi < sigma + q(alpha) {
        return domain(format!("sigma(G) = {phi} is below sigma(K) + alpha = {}", sigma + q(alpha)));
    }
    let tol = q(beta) * n as i128;
    let (lo, hi) = (sizes[1..].iter().min().unwrap(), sizes[1..].iter().max().unwrap());
    if Q::from_integer((hi - lo) as i128) > tol {
        return domain(format!("classes 2..k differ by {}, more than beta n = {tol}", hi - lo));
    }
    let unit = b * k * g;
    if let Some(j) = sizes.iter().position(|&x| x % unit != 0) {
        return domain(format!("class {j} has {} vertices, not divisible by bk gcd(K) = {unit}", sizes[j]));
    }
    let x = (phi - sigma) / (Q::new(1, k as i128) - sigma);
    let big_n = ((Q::from_integer(1) - x) * n as i128 / (factorial(k) as i128 * (b * g) as i128))
        .floor()
        .to_integer() as usize;
    // kgN copies take (k-1)! b_1 kgN vertices from V_1 and (k-2)! (b - b_1) kgN
    // from the others; both must be multiples of bkg
    let b1 = cp.class_sizes.iter().copied().min().unwrap();
    let step = |c: usize| b / gcd(b as u64, c as u64) as usize;
    let (s1, s2) = (step(factorial(k - 1) as usize * b1), step(factorial(k - 2) as usize * (b - b1)));
    let big_n = big_n / lcm(s1, s2) * lcm(s1, s2);
    let lo_copies = k * g * big_n;
    let lopsided = pack_gadget_with(&cp.data, GadgetRequest::Lopsided)?;
    let mut fresh = FreshVertices::new(host.clone());
    let mut copies = Vec::new();
    let identity: Vec<usize> = (0..k).collect();
    for _ in 0..lo_copies {
        copies.extend(place_gadget(&mut fresh, &lopsided, &identity)?);
    }
    let d = nearly_balanced_core(&cp, &unbalanced, s, &mut fresh, tol * 2, &mut copies)?;
    Ok(LopsidedRun {
        packing: verified(pattern, host, copies)?,
        s,
        alpha,
        beta,
        x: Ratio::new(*x.numer() as u64, *x.denom() as u64),
        lopsided_copies: lo_copies,
        d,
    })
}
