//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the library except to build trees from head lists.
#![allow(dead_code)]

use depcross::DependencyTree;
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Edges of the labeled tree on 1..=n whose Prüfer code is `code`
/// (quadratic textbook decoding).
pub fn prufer_edges(code: &[usize], n: usize) -> Vec<(usize, usize)> {
    assert_eq!(code.len() + 2, n);
    let mut degree = vec![1usize; n + 1];
    degree[0] = 0;
    for &c in code {
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &c in code {
        let leaf = (1..=n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, c));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (1..=n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Calls `f` on every Prüfer code of length `n - 2` over 1..=n.
pub fn for_each_code(n: usize, mut f: impl FnMut(&[usize])) {
    let len = n - 2;
    let mut code = vec![1; len];
    loop {
        f(&code);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            if code[i] < n {
                code[i] += 1;
                break;
            }
            code[i] = 1;
            i += 1;
        }
    }
}

/// Calls `f` on every permutation of 1..=n (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (1..=n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Head vector of the tree with `edges`, oriented away from `root`.
pub fn heads_from_edges(n: usize, edges: &[(usize, usize)], root: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n + 1];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut heads = vec![usize::MAX; n];
    heads[root - 1] = 0;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if heads[w - 1] == usize::MAX {
                heads[w - 1] = v;
                stack.push(w);
            }
        }
    }
    heads
}

pub fn tree_from_edges(n: usize, edges: &[(usize, usize)]) -> DependencyTree {
    DependencyTree::from_heads(heads_from_edges(n, edges, 1)).unwrap()
}

/// Moves vertex `v` to position `perm[v - 1]`.
pub fn arrange(edges: &[(usize, usize)], perm: &[usize]) -> Vec<(usize, usize)> {
    edges.iter().map(|&(a, b)| (perm[a - 1], perm[b - 1])).collect()
}

fn disjoint(e: (usize, usize), f: (usize, usize)) -> bool {
    e.0 != f.0 && e.0 != f.1 && e.1 != f.0 && e.1 != f.1
}

fn interleave(e: (usize, usize), f: (usize, usize)) -> bool {
    let (a, b) = (e.0.min(e.1), e.0.max(e.1));
    let (c, d) = (f.0.min(f.1), f.0.max(f.1));
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

pub fn brute_q(edges: &[(usize, usize)]) -> u64 {
    let mut q = 0;
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            q += u64::from(disjoint(edges[i], edges[j]));
        }
    }
    q
}

pub fn brute_crossings(edges: &[(usize, usize)]) -> u64 {
    let mut c = 0;
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            c += u64::from(interleave(edges[i], edges[j]));
        }
    }
    c
}

/// Ordered start pairs for edges of lengths `d1`, `d2` on 1..=n:
/// (crossing, vertex-disjoint).
pub fn brute_placements(n: usize, d1: usize, d2: usize) -> (u64, u64) {
    let (mut alpha, mut beta) = (0, 0);
    for s1 in 1..=n.saturating_sub(d1) {
        for s2 in 1..=n.saturating_sub(d2) {
            let e = (s1, s1 + d1);
            let f = (s2, s2 + d2);
            if disjoint(e, f) {
                beta += 1;
                alpha += u64::from(interleave(e, f));
            }
        }
    }
    (alpha, beta)
}

pub fn binomial2(n: usize) -> u64 {
    (n as u64) * (n as u64).saturating_sub(1) / 2
}

pub fn random_code(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..n - 2).map(|_| rng.random_range(1..=n)).collect()
}

pub fn random_edges(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    prufer_edges(&random_code(n, rng), n)
}

pub fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (1..=n).collect();
    p.shuffle(rng);
    p
}

/// Undirected edge list of a library tree.
pub fn edges_of(tree: &DependencyTree) -> Vec<(usize, usize)> {
    tree.edges().iter().map(|e| (e.lo(), e.hi())).collect()
}

/// One CoNLL-X sentence block with plain word tokens.
pub fn conll_block(heads: &[usize]) -> String {
    let mut out = String::new();
    for (i, h) in heads.iter().enumerate() {
        out.push_str(&format!("{}\tw{}\t_\tX\tX\t_\t{}\tdep\t_\t_\n", i + 1, i + 1, h));
    }
    out.push('\n');
    out
}
