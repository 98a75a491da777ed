use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::NlssMatrix;

/// One agglomeration step. Leaves are numbered `0..n` in matrix order and
/// the cluster formed at step `k` gets id `n + k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationClusters {
    pub threshold: f64,
    /// (repetition, cluster id) in matrix order; cluster ids are numbered
    /// by first appearance.
    pub assignments: Vec<(usize, usize)>,
    pub cluster_count: usize,
    pub dendrogram: Vec<Merge>,
}

/// Average-linkage agglomerative clustering, cut so that every merge at a
/// height ≤ `threshold` is applied.
pub fn cluster_variations(m: &NlssMatrix, threshold: f64) -> VariationClusters {
    let dendrogram = average_linkage(m);
    let n = m.len();
    let mut parent: Vec<usize> = (0..2 * n.max(1)).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (k, merge) in dendrogram.iter().enumerate() {
        if merge.height > threshold {
            break;
        }
        let id = n + k;
        let (a, b) = (find(&mut parent, merge.left), find(&mut parent, merge.right));
        parent[a] = id;
        parent[b] = id;
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut assignments = Vec::with_capacity(n);
    for leaf in 0..n {
        let root = find(&mut parent, leaf);
        let cluster = match roots.iter().position(|&r| r == root) {
            Some(c) => c,
            None => {
                roots.push(root);
                roots.len() - 1
            }
        };
        assignments.push((m.labels[leaf], cluster));
    }
    VariationClusters { threshold, assignments, cluster_count: roots.len(), dendrogram }
}

fn average_linkage(m: &NlssMatrix) -> Vec<Merge> {
    let n = m.len();
    let mut d = m.values.clone();
    // (cluster id, size) per slot; None once merged away
    let mut slots: Vec<Option<(usize, usize)>> = (0..n).map(|i| Some((i, 1))).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    let mut last_height = 0.0f64;
    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            if slots[i].is_none() {
                continue;
            }
            for j in i + 1..n {
                if slots[j].is_none() {
                    continue;
                }
                let v = d[i * n + j];
                if best.is_none_or(|(_, _, b)| v < b) {
                    best = Some((i, j, v));
                }
            }
        }
        let Some((i, j, height)) = best else { break };
        let (id_i, size_i) = slots[i].unwrap();
        let (id_j, size_j) = slots[j].unwrap();
        let (wi, wj) = (size_i as f64, size_j as f64);
        for k in 0..n {
            if k == i || k == j || slots[k].is_none() {
                continue;
            }
            let (a, b) = (d[k * n + i], d[k * n + j]);
            let v = a + (b - a) * (wj / (wi + wj));
            d[k * n + i] = v;
            d[i * n + k] = v;
        }
        slots[j] = None;
        slots[i] = Some((n + step, size_i + size_j));
        // average linkage is monotone; guard against rounding in the updates
        last_height = last_height.max(height);
        merges.push(Merge { left: id_i.min(id_j), right: id_i.max(id_j), height: last_height, size: size_i + size_j });
    }
    merges
}
