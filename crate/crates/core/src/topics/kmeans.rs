//! Seeded spherical k-means on unit-normalized vectors.
//!
//! Deterministic: k-means++ initialization draws from a caller-provided
//! seed, assignment ties break on the lower cluster index, and iteration
//! stops when labels are stable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::providers::EmbeddingVector;

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    /// Unit-normalized centroids.
    pub centroids: Vec<Vec<f64>>,
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        let mut out = vec![0.0; v.len()];
        out[0] = 1.0;
        return out;
    }
    v.iter().map(|x| x / norm).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cluster unit vectors into `k` groups by cosine similarity.
pub fn spherical_kmeans(vectors: &[EmbeddingVector], k: usize, seed: u64) -> KMeansResult {
    assert!(k >= 1, "k must be at least 1");
    let n = vectors.len();
    let unit: Vec<Vec<f64>> = vectors.iter().map(|v| normalize(v.as_slice())).collect();
    if n == 0 {
        return KMeansResult { labels: vec![], centroids: vec![] };
    }
    let k = k.min(n);
    if k == 1 {
        let mut sum = vec![0.0; unit[0].len()];
        for v in &unit {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
        }
        return KMeansResult { labels: vec![0; n], centroids: vec![normalize(&sum)] };
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding with cosine distance (1 - dot on unit vectors).
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(unit[rng.gen_range(0..n)].clone());
    while centroids.len() < k {
        let distances: Vec<f64> = unit
            .iter()
            .map(|v| {
                centroids
                    .iter()
                    .map(|c| (1.0 - dot(v, c)).max(0.0))
                    .fold(f64::MAX, f64::min)
            })
            .collect();
        let total: f64 = distances.iter().sum();
        let next = if total <= 0.0 {
            // All points coincide with existing centroids.
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen_range(0.0..total);
            let mut chosen = n - 1;
            for (i, d) in distances.iter().enumerate() {
                if target < *d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        };
        centroids.push(unit[next].clone());
    }

    let mut labels = vec![0usize; n];
    for _ in 0..100 {
        // Assign: highest cosine, ties to the lowest index.
        let mut changed = false;
        for (i, v) in unit.iter().enumerate() {
            let mut best = 0;
            let mut best_sim = f64::NEG_INFINITY;
            for (c_idx, c) in centroids.iter().enumerate() {
                let sim = dot(v, c);
                if sim > best_sim {
                    best_sim = sim;
                    best = c_idx;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        // Update: renormalized mean; empty clusters reseed to the point
        // farthest from its centroid.
        let dim = unit[0].len();
        let mut sums = vec![vec![0.0; dim]; centroids.len()];
        let mut counts = vec![0usize; centroids.len()];
        for (v, &label) in unit.iter().zip(&labels) {
            counts[label] += 1;
            for (s, x) in sums[label].iter_mut().zip(v) {
                *s += x;
            }
        }
        for c_idx in 0..centroids.len() {
            if counts[c_idx] == 0 {
                let farthest = (0..n)
                    .min_by(|&a, &b| {
                        dot(&unit[a], &centroids[labels[a]])
                            .partial_cmp(&dot(&unit[b], &centroids[labels[b]]))
                            .unwrap()
                    })
                    .unwrap();
                centroids[c_idx] = unit[farthest].clone();
            } else {
                centroids[c_idx] = normalize(&sums[c_idx]);
            }
        }
    }
    KMeansResult { labels, centroids }
}

/// For each centroid, the index of the member vector with the highest
/// cosine similarity to it (ties to the lower index). Centroids without
/// members are skipped.
pub fn nearest_members(vectors: &[EmbeddingVector], result: &KMeansResult) -> Vec<usize> {
    let unit: Vec<Vec<f64>> = vectors.iter().map(|v| normalize(v.as_slice())).collect();
    let mut out = Vec::new();
    for (c_idx, centroid) in result.centroids.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in unit.iter().enumerate() {
            if result.labels[i] != c_idx {
                continue;
            }
            let sim = dot(v, centroid);
            if best.map(|(_, s)| sim > s).unwrap_or(true) {
                best = Some((i, sim));
            }
        }
        if let Some((i, _)) = best {
            out.push(i);
        }
    }
    out
}
