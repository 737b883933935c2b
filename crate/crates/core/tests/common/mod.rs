//! Shared fixtures and seeded generators for the property suites.

#![allow(dead_code)]

use macroscope_core::kernel::{validate_kernel, Kernel};
use macroscope_core::{Dist, Lens, ToleranceConfig};
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

/// Cyclic kernel on 3 states: forward p, backward q, stay s.
pub fn biased_three_cycle(p: f64, q: f64, s: f64) -> Kernel {
    let rows = vec![vec![s, p, q], vec![q, s, p], vec![p, q, s]];
    validate_kernel(&rows, &cfg()).unwrap().kernel
}

/// The two noncommuting symmetric state kernels used by the protocol
/// fixtures; rows sum to 0.999999 and are renormalized on load.
pub fn noncommuting_state_kernels() -> (Kernel, Kernel) {
    let loose = cfg().with_row_sum_tol(1e-5);
    let k0 = validate_kernel(
        &[
            vec![0.573333, 0.393333, 0.033333],
            vec![0.393333, 0.573333, 0.033333],
            vec![0.033333, 0.033333, 0.933333],
        ],
        &loose,
    )
    .unwrap()
    .kernel;
    let k1 = validate_kernel(
        &[
            vec![0.933333, 0.033333, 0.033333],
            vec![0.033333, 0.573333, 0.393333],
            vec![0.033333, 0.393333, 0.573333],
        ],
        &loose,
    )
    .unwrap()
    .kernel;
    (k0, k1)
}

/// Four states in two pairs; per-step mass `leak` moves to the other pair.
pub fn two_pair_leak_chain(leak: f64) -> Kernel {
    let stay = (1.0 - leak) / 2.0;
    let go = leak / 2.0;
    let rows = vec![
        vec![stay, stay, go, go],
        vec![stay, stay, go, go],
        vec![go, go, stay, stay],
        vec![go, go, stay, stay],
    ];
    validate_kernel(&rows, &cfg()).unwrap().kernel
}

/// Random walk on a weighted undirected graph (detailed balance holds).
pub fn graph_walk(n: usize, edges: &[(usize, usize)], weights: &[f64]) -> Kernel {
    let mut w = vec![vec![0.0; n]; n];
    for (idx, &(i, j)) in edges.iter().enumerate() {
        w[i][j] = weights[idx];
        w[j][i] = weights[idx];
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let d: f64 = w[i].iter().sum();
            w[i].iter().map(|v| v / d).collect()
        })
        .collect();
    validate_kernel(&rows, &cfg()).unwrap().kernel
}

pub fn random_dist(rng: &mut ChaCha20Rng, n: usize) -> Dist {
    let weights: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-12).ln()).collect();
    Dist::normalized(weights).unwrap()
}

/// Full-support random kernel; support is trivially bidirected.
pub fn random_full_support_kernel(rng: &mut ChaCha20Rng, n: usize) -> Kernel {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let w: Vec<f64> =
                (0..n).map(|_| 0.01 + rng.random::<f64>()).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|v| v / s).collect()
        })
        .collect();
    validate_kernel(&rows, &cfg()).unwrap().kernel
}

/// Connected random undirected graph: spanning tree plus `extra` chords.
pub fn random_connected_edges(
    rng: &mut ChaCha20Rng,
    n: usize,
    extra: usize,
) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for v in 1..n {
        let parent = rng.random_range(0..v);
        edges.push((parent, v));
    }
    let mut tries = 0;
    let mut added = 0;
    while added < extra && tries < 20 * extra.max(1) {
        tries += 1;
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i == j {
            continue;
        }
        let e = (i.min(j), i.max(j));
        if !edges.contains(&e) {
            edges.push(e);
            added += 1;
        }
    }
    edges
}

/// Reversible kernel: random walk on a random weighted connected graph,
/// plus a lazy self-loop share to keep it aperiodic.
pub fn random_reversible_kernel(rng: &mut ChaCha20Rng, n: usize, extra_edges: usize) -> Kernel {
    let edges = random_connected_edges(rng, n, extra_edges);
    let mut w = vec![vec![0.0; n]; n];
    for &(i, j) in &edges {
        let weight = 0.2 + rng.random::<f64>();
        w[i][j] = weight;
        w[j][i] = weight;
    }
    for (i, row) in w.iter_mut().enumerate() {
        // Self-loop weight equal to the degree sum halves the walk.
        let d: f64 = row.iter().sum();
        row[i] = d;
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let d: f64 = w[i].iter().sum();
            w[i].iter().map(|v| v / d).collect()
        })
        .collect();
    validate_kernel(&rows, &cfg()).unwrap().kernel
}

/// Kernel with bidirected support on a random connected graph but
/// independently drawn (generally non-reversible) transition weights.
pub fn random_bidirected_kernel(rng: &mut ChaCha20Rng, n: usize, extra_edges: usize) -> Kernel {
    let edges = random_connected_edges(rng, n, extra_edges);
    let mut w = vec![vec![0.0; n]; n];
    for &(i, j) in &edges {
        w[i][j] = 0.1 + rng.random::<f64>();
        w[j][i] = 0.1 + rng.random::<f64>();
    }
    for (i, row) in w.iter_mut().enumerate() {
        row[i] = 0.2 + rng.random::<f64>();
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let d: f64 = w[i].iter().sum();
            w[i].iter().map(|v| v / d).collect()
        })
        .collect();
    validate_kernel(&rows, &cfg()).unwrap().kernel
}

/// Random surjective lens onto `k` blocks.
pub fn random_lens(rng: &mut ChaCha20Rng, n: usize, k: usize) -> Lens {
    assert!(k <= n);
    let mut assignment: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    // Pin one state per label so every block is nonempty.
    let mut states: Vec<usize> = (0..n).collect();
    for label in 0..k {
        let pick = rng.random_range(0..states.len());
        let state = states.swap_remove(pick);
        assignment[state] = label;
    }
    // Labels must be dense; re-index in order of first appearance.
    let mut relabel = vec![usize::MAX; k];
    let mut next = 0;
    for &label in &assignment {
        if relabel[label] == usize::MAX {
            relabel[label] = next;
            next += 1;
        }
    }
    Lens::new(assignment.into_iter().map(|l| relabel[l]).collect()).unwrap()
}
