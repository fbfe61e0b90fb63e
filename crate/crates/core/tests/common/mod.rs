#![allow(dead_code)]

use std::collections::BTreeSet;

use gsh::{EdgeStream, Mode};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn stream(pairs: &[(u64, u64)]) -> EdgeStream {
    EdgeStream::from_pairs(Mode::Undirected, pairs).unwrap()
}

fn permutations(k: usize) -> Vec<Vec<u64>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(k - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, (k - 1) as u64);
            out.push(p);
        }
    }
    out
}

fn connected(nodes: usize, edges: &[(u64, u64)]) -> bool {
    let mut reached = vec![false; nodes];
    let mut frontier = vec![0u64];
    reached[0] = true;
    while let Some(v) = frontier.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !reached[y as usize] {
                    reached[y as usize] = true;
                    frontier.push(y);
                }
            }
        }
    }
    reached.iter().all(|&r| r)
}

/// All connected simple graphs on 2..=`max_nodes` nodes with at most
/// `max_edges` edges, one per isomorphism class, nodes labelled `0..n`.
pub fn connected_graphs(max_nodes: usize, max_edges: usize) -> Vec<Vec<(u64, u64)>> {
    let mut out = Vec::new();
    for n in 2..=max_nodes {
        let slots: Vec<(u64, u64)> = (0..n as u64)
            .flat_map(|a| (a + 1..n as u64).map(move |b| (a, b)))
            .collect();
        let perms = permutations(n);
        let mut seen: BTreeSet<Vec<(u64, u64)>> = BTreeSet::new();
        for mask in 1u32..(1 << slots.len()) {
            if mask.count_ones() as usize > max_edges {
                continue;
            }
            let edges: Vec<(u64, u64)> = (0..slots.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| slots[i])
                .collect();
            if !connected(n, &edges) {
                continue;
            }
            let canonical = perms
                .iter()
                .map(|perm| {
                    let mut relabelled: Vec<(u64, u64)> = edges
                        .iter()
                        .map(|&(a, b)| {
                            let (x, y) = (perm[a as usize], perm[b as usize]);
                            (x.min(y), x.max(y))
                        })
                        .collect();
                    relabelled.sort_unstable();
                    relabelled
                })
                .min()
                .unwrap();
            if seen.insert(canonical) {
                out.push(edges);
            }
        }
    }
    out
}

/// Up to `count` distinct arrival orders of `len` edges: every order when
/// there are few, otherwise identity, reverse and seeded shuffles.
pub fn edge_orders(len: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let all: Vec<Vec<usize>> = permutations(len)
        .into_iter()
        .map(|p| p.into_iter().map(|i| i as usize).collect())
        .take(count + 1)
        .collect();
    if all.len() <= count {
        return all;
    }
    let mut orders: Vec<Vec<usize>> = vec![(0..len).collect(), (0..len).rev().collect()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while orders.len() < count {
        let mut o: Vec<usize> = (0..len).collect();
        o.shuffle(&mut rng);
        if !orders.contains(&o) {
            orders.push(o);
        }
    }
    orders
}

/// G(n, m): `m` distinct edges drawn uniformly on `n` nodes.
pub fn erdos_renyi(n: u64, m: usize, seed: u64) -> EdgeStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = BTreeSet::new();
    while set.len() < m {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            set.insert((a.min(b), a.max(b)));
        }
    }
    let pairs: Vec<(u64, u64)> = set.into_iter().collect();
    stream(&pairs)
}

/// Preferential attachment: each new node links to `per_node` existing
/// nodes picked proportionally to degree.
pub fn preferential_attachment(n: u64, per_node: usize, seed: u64) -> EdgeStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ends: Vec<u64> = Vec::new();
    let mut pairs = Vec::new();
    let core = per_node as u64 + 1;
    for a in 0..core {
        for b in a + 1..core {
            pairs.push((a, b));
            ends.extend([a, b]);
        }
    }
    for v in core..n {
        let mut targets = BTreeSet::new();
        while targets.len() < per_node {
            targets.insert(ends[rng.gen_range(0..ends.len())]);
        }
        for t in targets {
            pairs.push((t, v));
            ends.extend([t, v]);
        }
    }
    stream(&pairs)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
