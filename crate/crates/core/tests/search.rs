mod common;

use common::*;
use hyperpack::construct::marked_vertex_host;
use hyperpack::realisation::loose_cycle;
use hyperpack::search::*;
use hyperpack::{BlowupHost, Error, KGraph};
use rand::Rng;

fn kmp(sizes: &[usize]) -> KGraph {
    KGraph::complete_multipartite(sizes).unwrap()
}

#[test]
fn decide_matches_brute_force() {
    let mut rg = rng(31);
    let patterns = [loose_cycle(3, 2).unwrap(), kmp(&[1, 1, 1]), kmp(&[1, 1, 2])];
    let (mut yes, mut no) = (0, 0);
    for i in 0..60 {
        let pattern = &patterns[i % 3];
        let n = pattern.n() * rg.gen_range(2..=3);
        let host = random_graph(3, n, rg.gen_range(0.04..0.3), &mut rg);
        let report = decide_perfect_packing(pattern, &host).unwrap();
        let naive = naive_packable(pattern, &host);
        match report.verdict {
            SearchVerdict::Packed(p) => {
                assert!(naive);
                let v = p.verify();
                assert!(v.valid && v.perfect);
                yes += 1;
            }
            SearchVerdict::None => {
                assert!(!naive);
                no += 1;
            }
            SearchVerdict::Unknown => panic!("budget ran out on {n} vertices"),
        }
    }
    // the sample should exercise both answers
    assert!(yes > 5 && no > 5, "{yes} packable, {no} not");
}

#[test]
fn copy_counts_match_brute_force() {
    let c32 = loose_cycle(3, 2).unwrap();
    let host = BlowupHost::complete(&[2, 2, 2]).unwrap().to_kgraph(1000).unwrap();
    let lab = find_copies(&c32, &host, CopyMode::Labelled, None).unwrap();
    let unl = find_copies(&c32, &host, CopyMode::Unlabelled, None).unwrap();
    assert_eq!(lab.len(), naive_labelled_copies(&c32, &host).len());
    assert_eq!(unl.len(), naive_images(&c32, &host).len());
    let mut rg = rng(32);
    for _ in 0..10 {
        let host = random_graph(3, 8, 0.4, &mut rg);
        for pattern in [&c32, &kmp(&[1, 1, 2])] {
            let unl = find_copies(pattern, &host, CopyMode::Unlabelled, None).unwrap();
            let mut got: Vec<Vec<usize>> = unl
                .maps
                .iter()
                .map(|m| {
                    let mut s = m.clone();
                    s.sort_unstable();
                    s
                })
                .collect();
            got.sort();
            assert_eq!(got, naive_images(pattern, &host).into_iter().collect::<Vec<_>>());
            let lab = find_copies(pattern, &host, CopyMode::Labelled, None).unwrap();
            assert_eq!(lab.len(), naive_labelled_copies(pattern, &host).len());
        }
    }
}

#[test]
fn copy_through_vertex_on_random_hosts() {
    let mut rg = rng(33);
    let c32 = loose_cycle(3, 2).unwrap();
    for _ in 0..20 {
        let host = random_graph(3, 15, rg.gen_range(0.005..0.04), &mut rg);
        let u = rg.gen_range(0..15);
        let exists = naive_images(&c32, &host).iter().any(|s| s.contains(&u));
        match copy_through_vertex(&c32, &host, u).unwrap() {
            Some(m) => {
                assert!(m.contains(&u));
                for e in c32.edges() {
                    let mut img: Vec<usize> = e.iter().map(|&x| m[x]).collect();
                    img.sort_unstable();
                    assert!(host.contains_edge(&img));
                }
            }
            None => assert!(!exists),
        }
    }
}

#[test]
fn odd_split_search() {
    let mut rg = rng(34);
    let c33 = loose_cycle(3, 3).unwrap();
    for i in 0..12 {
        let host = random_graph(3, 9, 0.25, &mut rg);
        let a: Vec<usize> = (0..9).filter(|_| rg.gen_bool(0.5)).collect();
        let odd = |m: &[usize]| m.iter().filter(|v| a.contains(v)).count() % 2 == 1;
        let naive = naive_labelled_copies(&c33, &host).iter().any(|m| odd(m));
        let found = find_odd_split_c33(&host, &a).unwrap();
        if let Some(m) = &found {
            assert!(odd(m));
            assert!(naive_labelled_copies(&c33, &host).contains(m));
        }
        assert_eq!(found.is_some(), naive);
        println!("odd split {i}: |A| = {}, found = {}", a.len(), found.is_some());
    }
}

#[test]
fn marked_vertex_copies_need_k_plus_one_marked() {
    let host = marked_vertex_host(&[4, 4, 4], 13).unwrap();
    let a = host.partition.parts()[0].clone();
    let pattern = hyperpack::construct::marked_vertex_pattern(&[4, 4, 4]).unwrap();
    let capped = CopyConstraints {
        cap: Some((mask_of(&a), 3)),
        ..CopyConstraints::default()
    };
    let found = find_copies_with(&pattern, &host.graph, CopyMode::Unlabelled, &capped, Some(1), &SearchConfig::default())
        .unwrap();
    assert!(found.is_empty());
    let any = find_copies_with(
        &pattern,
        &host.graph,
        CopyMode::Unlabelled,
        &CopyConstraints::default(),
        Some(1),
        &SearchConfig::default(),
    )
    .unwrap();
    assert!(!any.is_empty());
}

#[test]
fn guards_and_budgets() {
    let edge = kmp(&[1, 1, 1]);
    let big = KGraph::from_indices(3, 41, vec![vec![0, 1, 2]]).unwrap();
    assert!(matches!(decide_perfect_packing(&edge, &big), Err(Error::Guard { .. })));
    let cfg = SearchConfig {
        max_vertices: 64,
        ..SearchConfig::default()
    };
    let huge = KGraph::from_indices(3, 65, vec![vec![0, 1, 2]]).unwrap();
    assert!(matches!(decide_perfect_packing_with(&edge, &huge, &cfg), Err(Error::Guard { .. })));
    // a tiny budget on a hard packable instance cannot claim "none"
    let host = complete_graph(3, 18);
    let tight = SearchConfig {
        node_budget: 1,
        ..SearchConfig::default()
    };
    let v = decide_perfect_packing_with(&kmp(&[1, 1, 1]), &host, &tight).unwrap().verdict;
    assert_ne!(v, SearchVerdict::None);
}
