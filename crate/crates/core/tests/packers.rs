mod common;

use common::*;
use hyperpack::gadget::{akpq, PatternData};
use hyperpack::pack::*;
use hyperpack::search::{decide_perfect_packing, SearchVerdict};
use hyperpack::{BlowupHost, KGraph, Packing, VertexPartition};
use rand::Rng;

fn kmp(sizes: &[usize]) -> KGraph {
    KGraph::complete_multipartite(sizes).unwrap()
}

fn assert_perfect(pattern: &KGraph, host: &BlowupHost, copies: &[Vec<usize>]) {
    let covered = naive_check_blowup(pattern, host, copies).unwrap();
    assert_eq!(covered, host.sizes().iter().sum::<usize>());
}

#[test]
fn balanced_agrees_with_exact_search() {
    let mut checked = 0;
    for (pattern, k) in [(kmp(&[1, 1]), 2), (kmp(&[2, 2]), 2), (kmp(&[1, 1, 1]), 3), (kmp(&[2, 2, 2]), 3)] {
        let mut sizes = vec![1; k];
        loop {
            if sizes.iter().sum::<usize>() <= 12 {
                let out = pack_balanced(&pattern, &sizes).unwrap();
                let host = BlowupHost::complete(&sizes).unwrap().to_kgraph(100_000).unwrap();
                let exact = decide_perfect_packing(&pattern, &host).unwrap().verdict;
                match (&out, &exact) {
                    (BalancedOutcome::Packed(p), SearchVerdict::Packed(_)) => {
                        let HostSpecBlowup(b) = blowup_of(p);
                        assert_perfect(&pattern, &b, &p.copies);
                    }
                    (BalancedOutcome::Impossible(_), SearchVerdict::None) => {}
                    _ => panic!("sizes {sizes:?}: packer {out:?}, search {}", exact.label()),
                }
                checked += 1;
            }
            let Some(i) = sizes.iter().position(|&s| s < 4) else { break };
            sizes[i] += 1;
            sizes[..i].iter_mut().for_each(|s| *s = 1);
        }
    }
    assert!(checked >= 40);
}

struct HostSpecBlowup(BlowupHost);

fn blowup_of(p: &Packing) -> HostSpecBlowup {
    match &p.host {
        hyperpack::HostSpec::Blowup(b) => HostSpecBlowup(b.clone()),
        hyperpack::HostSpec::Graph(_) => panic!("expected a blow-up host"),
    }
}

#[test]
fn balanced_rejects_unequal_or_indivisible() {
    let k = kmp(&[2, 2, 2]);
    assert!(matches!(
        pack_balanced(&k, &[4, 4, 6]).unwrap(),
        BalancedOutcome::Impossible(BalancedObstruction::UnequalClasses { .. })
    ));
    assert!(matches!(
        pack_balanced(&k, &[5, 5, 5]).unwrap(),
        BalancedOutcome::Impossible(BalancedObstruction::NotDivisible { class_size: 5, b1: 2 })
    ));
    assert!(pack_balanced(&kmp(&[1, 2]), &[3, 3]).is_err());
}

#[test]
fn nearly_balanced_instances() {
    let k = kmp(&[1, 1, 2]);
    let m = 120_000;
    let mut done = 0;
    for (a, c) in [(0i64, 0i64), (1, 0), (0, 1), (-1, 0), (1, -1), (2, -1), (-2, 1), (1, 1), (-1, -1), (2, 0), (0, -2), (3, -3)] {
        let sizes = [(m as i64 + 12 * a) as usize, (m as i64 + 12 * c) as usize, (m as i64 - 12 * (a + c)) as usize];
        let run = pack_nearly_balanced(&k, &sizes, &PackerConfig::default()).unwrap();
        let b = blowup_of(&run.packing).0;
        assert_perfect(&k, &b, &run.packing.copies);
        done += 1;
    }
    assert!(done >= 10);
}

#[test]
fn nearly_balanced_rejects_small_host() {
    let k = kmp(&[1, 1, 2]);
    let err = pack_nearly_balanced(&k, &[24, 36, 36], &PackerConfig::default()).unwrap_err();
    assert!(matches!(err, hyperpack::Error::Domain(_)), "{err}");
}

#[test]
fn lopsided_instances() {
    let k = kmp(&[1, 2, 2]);
    let (mut done, mut lopsided) = (0, 0);
    for (a, c) in [(180, 210), (240, 300), (300, 375), (360, 450), (195, 225), (450, 525), (600, 600), (315, 390), (420, 525), (510, 570), (255, 315), (600, 750)] {
        let n = a + 2 * c;
        assert!(60 * a >= 17 * n, "{a} {c} is not lopsided enough");
        let sizes = [a * 20, c * 20, c * 20];
        let run = pack_lopsided(&k, &sizes, &PackerConfig::default()).unwrap();
        let b = blowup_of(&run.packing).0;
        assert_perfect(&k, &b, &run.packing.copies);
        println!("{sizes:?}: x = {}, {} lopsided copies", run.x, run.lopsided_copies);
        lopsided += (run.lopsided_copies > 0) as usize;
        done += 1;
    }
    assert!(done >= 10);
    assert!(lopsided >= 8, "only {lopsided} hosts used the lopsided gadget");
}

/// Residues of every class are zero and each copy is a real copy.
fn check_gcd1(pattern: &KGraph, host: &BlowupHost, before: &[usize], copies: &[Vec<usize>], d: u64) {
    naive_check_blowup(pattern, host, copies).unwrap();
    let used = class_counts(host, copies);
    for (j, (&b, &u)) in before.iter().zip(&used).enumerate() {
        assert_eq!((b - u) as u64 % d, 0, "class {j}");
    }
}

#[test]
fn balance_gcd1_unbalanced_blocks() {
    let mut rg = rng(77);
    for i in 0..30 {
        let pattern = if i % 2 == 0 { kmp(&[1, 1, 2]) } else { kmp(&[1, 2, 2]) };
        let data = PatternData::new(&pattern).unwrap();
        let (_, gadget) = smallest_unbalanced_s(&data).unwrap();
        let d = (pattern.n() * 3) as u64;
        let t = rg.gen_range(3..=5);
        let sa = random_forest(t, rg.gen_range(1..=2), &mut rg);
        let mut sizes: Vec<usize> = (0..t).map(|_| rg.gen_range(40_000..60_000)).collect();
        for comp in sa.adjacency().components() {
            let total: usize = comp.iter().map(|&j| sizes[j]).sum();
            sizes[comp[0]] += (d as usize - total % d as usize) % d as usize;
        }
        let host = BlowupHost::new(complete_template(3, t), sizes.clone()).unwrap();
        let mut fresh = FreshVertices::new(host.clone());
        let mut src = UnbalancedShift {
            fresh: &mut fresh,
            gadget: &gadget,
        };
        let run = balance_gcd1(&mut src, &sa, d, 1).unwrap();
        assert!(run.steps <= t);
        check_gcd1(&pattern, &host, &sizes, &run.copies, d);
    }
}

#[test]
fn balance_gcd1_search_blocks() {
    let mut rg = rng(78);
    let edge = kmp(&[1, 1, 1]);
    for _ in 0..20 {
        let t = rg.gen_range(2..=4);
        let mut sizes: Vec<usize> = (0..t).map(|_| rg.gen_range(5..=9)).collect();
        let total: usize = sizes.iter().sum();
        sizes[0] += (3 - total % 3) % 3;
        let n: usize = sizes.iter().sum();
        let host = complete_graph(3, n);
        let part = VertexPartition::from_sizes(&sizes);
        // a path keeps the class graph connected
        let sa = KGraph::from_indices(2, t, (1..t).map(|v| vec![v - 1, v]).collect()).unwrap();
        let mut src = SearchShift::new(&edge, &host, &part, 3, 1).unwrap();
        let run = balance_gcd1(&mut src, &sa, 3, 1).unwrap();
        let packing = src.packing(run.copies.clone());
        assert!(packing.verify().valid);
        let mut used = vec![0; t];
        let mut seen = std::collections::HashSet::new();
        for c in &run.copies {
            let mut s = c.clone();
            s.sort_unstable();
            assert!(host.contains_edge(&s));
            for &v in c {
                assert!(seen.insert(v));
                used[part.part_of(v)] += 1;
            }
        }
        for j in 0..t {
            assert_eq!((sizes[j] - used[j]) % 3, 0);
        }
    }
}

#[test]
fn balance_gcd1_divisible_input_deletes_nothing() {
    let pattern = kmp(&[1, 1, 2]);
    let (_, gadget) = smallest_unbalanced_s(&PatternData::new(&pattern).unwrap()).unwrap();
    let host = BlowupHost::new(complete_template(3, 4), vec![1200; 4]).unwrap();
    let mut fresh = FreshVertices::new(host);
    let sa = KGraph::from_indices(2, 4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
    let run = balance_gcd1(&mut UnbalancedShift { fresh: &mut fresh, gadget: &gadget }, &sa, 12, 1).unwrap();
    assert!(run.copies.is_empty());
    assert_eq!(run.steps, 0);
}

fn check_full(pattern: &KGraph, host: &BlowupHost, sa: &KGraph, modulus: usize) -> BalanceRun {
    let run = balance_full(host, pattern, sa, None).unwrap();
    naive_check_blowup(pattern, host, &run.packing.copies).unwrap();
    let used = class_counts(host, &run.packing.copies);
    for j in 0..host.class_count() {
        let left = host.sizes()[j] - used[j];
        assert_eq!(left, run.final_sizes[j]);
        assert_eq!(left % modulus, 0, "class {j}");
    }
    assert_eq!(run.phase_copies.iter().sum::<usize>(), run.packing.len());
    assert!(run.packing.len() * 2 * pattern.n() <= run.capacity);
    run
}

#[test]
fn balance_full_gcd_three() {
    let k = kmp(&[1, 4, 7]);
    let host = BlowupHost::new(
        complete_template(3, 4),
        vec![30_000_001, 30_000_005, 30_000_010, 30_000_020],
    )
    .unwrap();
    let sa = KGraph::from_indices(2, 4, vec![vec![0, 1], vec![2, 3]]).unwrap();
    let run = check_full(&k, &host, &sa, 12 * 3 * 3);
    assert!(run.phase_copies[1] > 0 || run.phase_copies[2] > 0);
}

#[test]
fn balance_full_gcd_one() {
    let empty = |t| KGraph::from_indices(2, t, vec![]).unwrap();
    let cases: Vec<(KGraph, BlowupHost)> = vec![
        (kmp(&[1, 1, 2]), BlowupHost::new(complete_template(3, 3), vec![100_001, 100_003, 100_012]).unwrap()),
        (kmp(&[1, 1, 2]), BlowupHost::new(complete_template(3, 4), vec![200_001, 200_002, 200_007, 200_010]).unwrap()),
        (kmp(&[1, 2, 2]), BlowupHost::new(complete_template(3, 3), vec![300_001, 300_002, 300_002]).unwrap()),
        (
            kmp(&[1, 2, 2]),
            BlowupHost::new(
                KGraph::from_indices(3, 5, vec![vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4]]).unwrap(),
                vec![300_001, 300_004, 300_003, 300_007, 300_000],
            )
            .unwrap(),
        ),
        (kmp(&[1, 1, 1, 2]), BlowupHost::new(complete_template(4, 4), vec![400_001, 400_002, 400_003, 400_004]).unwrap()),
    ];
    for (k, host) in cases {
        let t = host.class_count();
        let modulus = k.n() * k.k();
        check_full(&k, &host, &empty(t), modulus);
    }
}

#[test]
fn akpq_examples() {
    let cfg = AkpqConfig::default();
    let a = akpq(3, 1, 3).unwrap();
    let run = pack_akpq_heuristic(&a, 1, 3, &cfg).unwrap();
    assert_eq!(run.packing.len(), 1);
    assert_eq!(run.coverage, 1.0);
    let host = BlowupHost::complete(&[4, 4, 4]).unwrap().to_kgraph(10_000).unwrap();
    let run = pack_akpq_heuristic(&host, 1, 3, &cfg).unwrap();
    assert!(run.packing.verify().valid);
    assert_eq!(run.covered, 12);
    assert!(pack_akpq_heuristic(&host, 2, 3, &cfg).is_err());
}

#[test]
fn akpq_random_coverage_is_valid() {
    let mut rg = rng(5);
    for i in 0..6 {
        let host = random_graph(3, 12 + i, 0.6, &mut rg);
        let run = pack_akpq_heuristic(&host, 1, 3, &AkpqConfig::default()).unwrap();
        let v = run.packing.verify();
        assert!(v.valid);
        assert_eq!(v.covered, run.covered);
        println!("random host n={} coverage {:.3} exchanges {}", host.n(), run.coverage, run.exchanges);
    }
}
