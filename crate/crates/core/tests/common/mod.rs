//! Shared generators and independent brute-force oracles for integration
//! tests. Nothing here calls the search engines under test.

#![allow(dead_code)]

use std::collections::BTreeSet;

use lfree::count::ColouredGraph;
use lfree::equation::LinearEquation;
use lfree::hypergraph::Hypergraph;
use lfree::setcore::IntegerSet;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn eq(text: &str) -> LinearEquation {
    text.parse().unwrap()
}

pub fn set(values: &[i64]) -> IntegerSet {
    IntegerSet::from_i64(values).unwrap()
}

/// `size` distinct integers drawn from `lo..=hi`.
pub fn random_set(r: &mut ChaCha8Rng, size: usize, lo: i64, hi: i64) -> IntegerSet {
    let mut pool: Vec<i64> = (lo..=hi).collect();
    pool.shuffle(r);
    pool.truncate(size);
    set(&pool)
}

/// Random subset of `a` of at most `max` elements.
pub fn random_subset(r: &mut ChaCha8Rng, a: &IntegerSet, max: usize) -> IntegerSet {
    let mut items: Vec<BigInt> = a.iter().cloned().collect();
    items.shuffle(r);
    let size = r.random_range(0..=max.min(items.len()));
    items.truncate(size);
    items.into_iter().collect()
}

/// Simple graph on `1..=n` as a 2-uniform hypergraph, each pair present
/// with probability `p`, optionally rejecting vertices of degree above
/// `max_degree`.
pub fn random_graph(r: &mut ChaCha8Rng, n: usize, p: f64, max_degree: usize) -> Hypergraph {
    let mut deg = vec![0usize; n + 1];
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in u + 1..=n {
            if r.random_bool(p) && deg[u] < max_degree && deg[v] < max_degree {
                deg[u] += 1;
                deg[v] += 1;
                edges.push(vec![u, v]);
            }
        }
    }
    Hypergraph::new(n, edges).unwrap()
}

pub fn random_hypergraph(r: &mut ChaCha8Rng, n: usize, m: usize, d_max: usize) -> Hypergraph {
    let edges = (0..m)
        .map(|_| {
            let d = r.random_range(1..=d_max.min(n));
            let mut vs: Vec<usize> = (1..=n).collect();
            vs.shuffle(r);
            vs.truncate(d);
            vs
        })
        .collect();
    Hypergraph::new(n, edges).unwrap()
}

/// Random graph with `k` classes on at most `max_n` vertices.
pub fn random_coloured_graph(r: &mut ChaCha8Rng, k: usize, max_n: usize, p: f64) -> ColouredGraph {
    let n = r.random_range(k..=max_n);
    let mut classes: Vec<usize> = (1..=k).collect();
    classes.extend((k..n).map(|_| r.random_range(1..=k)));
    classes.shuffle(r);
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in u + 1..=n {
            if r.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    ColouredGraph::new(k, classes, edges).unwrap()
}

/// Vertex subsets of `1..=n` as bitmasks over bit `v - 1`.
pub fn mask_vertices(mask: u32, n: usize) -> Vec<usize> {
    (1..=n).filter(|&v| mask >> (v - 1) & 1 == 1).collect()
}

fn edge_mask(e: &[usize]) -> u32 {
    e.iter().fold(0, |m, &v| m | 1 << (v - 1))
}

/// Every size-`s` hitting set, sorted, by scanning all `2^n` subsets.
pub fn brute_hitting_sets(h: &Hypergraph, s: usize, forbidden: &[usize]) -> Vec<Vec<usize>> {
    let n = h.n();
    let edges: Vec<u32> = h.edges().iter().map(|e| edge_mask(e)).collect();
    let banned = edge_mask(forbidden);
    let mut out: Vec<Vec<usize>> = (0u32..1 << n)
        .filter(|&m| m.count_ones() as usize == s && m & banned == 0 && edges.iter().all(|&e| e & m != 0))
        .map(|m| mask_vertices(m, n))
        .collect();
    out.sort();
    out
}

/// Independent sets of a hypergraph by size, by scanning all subsets.
pub fn brute_independent_counts(h: &Hypergraph) -> Vec<u64> {
    let n = h.n();
    let edges: Vec<u32> = h.edges().iter().map(|e| edge_mask(e)).collect();
    let mut counts = vec![0u64; n + 1];
    for m in 0u32..1 << n {
        if edges.iter().all(|&e| e & m != e) {
            counts[m.count_ones() as usize] += 1;
        }
    }
    counts
}

pub fn brute_independence_number(h: &Hypergraph) -> usize {
    let counts = brute_independent_counts(h);
    counts.iter().rposition(|&c| c > 0).unwrap_or(0)
}

/// Subsets of `a` of each size, by scanning masks with `is_l_free`.
pub fn brute_lfree_counts(eq: &LinearEquation, a: &IntegerSet, contain: &IntegerSet) -> Vec<u64> {
    let n = a.len();
    assert!(n <= 20, "brute force over {n} elements");
    let mut counts = vec![0u64; n + 1];
    for m in 0u64..1 << n {
        let s = a.select(m);
        if contain.is_subset(&s) && eq.is_l_free(&s) {
            counts[m.count_ones() as usize] += 1;
        }
    }
    counts
}

/// L-free transversals (one element per part), by direct enumeration.
pub fn brute_colourful(eq: &LinearEquation, parts: &[IntegerSet]) -> u64 {
    if parts.is_empty() {
        return 1;
    }
    let mut count = 0;
    let mut pick = vec![0usize; parts.len()];
    if parts.iter().any(IntegerSet::is_empty) {
        return 0;
    }
    loop {
        let s: IntegerSet = pick.iter().zip(parts).map(|(&i, p)| p.as_slice()[i].clone()).collect();
        if eq.is_l_free(&s) {
            count += 1;
        }
        let mut j = 0;
        loop {
            if j == parts.len() {
                return count;
            }
            pick[j] += 1;
            if pick[j] < parts[j].len() {
                break;
            }
            pick[j] = 0;
            j += 1;
        }
    }
}

/// All set partitions of `0..n`, each as a list of blocks.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new()];
    for i in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for b in 0..p.len() {
                let mut q: Vec<Vec<usize>> = p.clone();
                q[b].push(i);
                next.push(q);
            }
            let mut q = p.clone();
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// Triviality by definition: some partition of the positions has zero
/// coefficient sum on each block and the tuple constant on each block.
pub fn trivial_by_partitions(eq: &LinearEquation, tuple: &[BigInt]) -> bool {
    set_partitions(tuple.len()).into_iter().any(|p| {
        p.iter().all(|block| {
            let sum: BigInt = block.iter().map(|&i| &eq.coeffs()[i]).sum();
            sum == BigInt::from(0) && block.iter().all(|&i| tuple[i] == tuple[block[0]])
        })
    })
}

/// Sorted supports of the non-trivial solutions in `a`.
pub fn supports(eq: &LinearEquation, a: &IntegerSet) -> BTreeSet<Vec<BigInt>> {
    eq.enumerate_nontrivial_solutions(a)
        .into_iter()
        .map(|t| {
            let s: IntegerSet = t.into_iter().collect();
            s.into_vec()
        })
        .collect()
}
