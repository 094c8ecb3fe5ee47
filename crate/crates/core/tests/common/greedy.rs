//! Step-by-step re-simulation of the adjacency-constrained Ward loop.

use std::ops::Range;

fn centroid(points: &[Vec<f64>], r: &Range<usize>) -> Vec<f64> {
    let mut c = vec![0.0; points[0].len()];
    for p in &points[r.clone()] {
        for (a, b) in c.iter_mut().zip(p) {
            *a += b;
        }
    }
    c.iter().map(|x| x / r.len() as f64).collect()
}

/// Merges the closest adjacent pair until `target` clusters remain, ties
/// going to the leftmost pair. Centroids are recomputed from the members.
pub fn partition(points: &[Vec<f64>], target: usize) -> Vec<Range<usize>> {
    let mut clusters: Vec<Range<usize>> = (0..points.len()).map(|i| i..i + 1).collect();
    while clusters.len() > target {
        let mut best = (0, f64::INFINITY);
        for k in 0..clusters.len() - 1 {
            let (a, b) = (&clusters[k], &clusters[k + 1]);
            let (ca, cb) = (centroid(points, a), centroid(points, b));
            let sq: f64 = ca.iter().zip(&cb).map(|(x, y)| (x - y) * (x - y)).sum();
            let (na, nb) = (a.len() as f64, b.len() as f64);
            let d = 2.0 * na * nb / (na + nb) * sq;
            if d < best.1 - 1e-12 {
                best = (k, d);
            }
        }
        let k = best.0;
        let right = clusters.remove(k + 1);
        clusters[k].end = right.end;
    }
    clusters
}
