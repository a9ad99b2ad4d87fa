use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop once an iteration improves WCSS by less than this fraction.
    pub tol: f64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            restarts: 5,
            max_iter: 100,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionModel {
    pub k: usize,
    pub centroids: Vec<Vec<f64>>,
    pub seed: u64,
    /// Within-cluster sum of squares of the training points.
    pub wcss: f64,
}

impl PartitionModel {
    pub fn dim(&self) -> usize {
        self.centroids.first().map_or(0, Vec::len)
    }

    /// Nearest centroid by Euclidean distance, lowest index on ties.
    pub fn assign(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.dim() {
            return Err(Error::VectorDimension {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(nearest(&self.centroids, x).0)
    }
}

pub fn kmeans_assign(model: &PartitionModel, x: &[f64]) -> Result<usize> {
    model.assign(x)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(centroids: &[Vec<f64>], x: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centroids.iter().enumerate() {
        let d = sq_dist(c, x);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

pub fn kmeans_fit(
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<PartitionModel> {
    let config = KMeansConfig {
        restarts,
        ..KMeansConfig::default()
    };
    kmeans_fit_traced(points, k, seed, &config).map(|(model, _)| model)
}

/// Like [`kmeans_fit`], also returning the WCSS after every assignment step
/// of every restart.
pub fn kmeans_fit_traced(
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    config: &KMeansConfig,
) -> Result<(PartitionModel, Vec<Vec<f64>>)> {
    if k == 0 {
        return Err(Error::Config("k-means needs k >= 1".to_string()));
    }
    if points.len() < k {
        return Err(Error::TooFewPoints {
            k,
            points: points.len(),
        });
    }
    let dim = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::VectorDimension {
            expected: dim,
            found: p.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<Vec<f64>>, f64)> = None;
    let mut traces = Vec::with_capacity(config.restarts.max(1));
    for _ in 0..config.restarts.max(1) {
        let init = plus_plus_init(points, k, &mut rng);
        let (centroids, trace) = lloyd(points, init, config);
        let wcss = *trace.last().unwrap();
        if best.as_ref().is_none_or(|(_, w)| wcss < *w) {
            best = Some((centroids, wcss));
        }
        traces.push(trace);
    }
    let (centroids, wcss) = best.unwrap();
    Ok((
        PartitionModel {
            k,
            centroids,
            seed,
            wcss,
        },
        traces,
    ))
}

fn plus_plus_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.random_range(0..points.len())].clone()];
    let mut dist: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = dist.iter().rposition(|&d| d > 0.0).unwrap();
            for (i, &d) in dist.iter().enumerate() {
                if d > 0.0 && target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..points.len())
        };
        let c = points[pick].clone();
        for (d, p) in dist.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn assign_all(points: &[Vec<f64>], centroids: &[Vec<f64>], labels: &mut [usize]) -> f64 {
    let mut wcss = 0.0;
    for (label, p) in labels.iter_mut().zip(points) {
        let (i, d) = nearest(centroids, p);
        *label = i;
        wcss += d;
    }
    wcss
}

fn lloyd(
    points: &[Vec<f64>],
    mut centroids: Vec<Vec<f64>>,
    config: &KMeansConfig,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = centroids.len();
    let dim = points[0].len();
    let mut labels = vec![0; points.len()];
    let mut wcss = assign_all(points, &centroids, &mut labels);
    let mut trace = vec![wcss];
    for _ in 0..config.max_iter {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            sums[l].iter_mut().zip(p).for_each(|(s, v)| *s += v);
        }
        for (c, (sum, &n)) in centroids.iter_mut().zip(sums.iter().zip(&counts)) {
            if n > 0 {
                *c = sum.iter().map(|s| s / n as f64).collect();
            }
        }
        // Empty clusters move to the point farthest from its own centroid.
        if counts.contains(&0) {
            let mut residual: Vec<f64> = points
                .iter()
                .zip(&labels)
                .map(|(p, &l)| sq_dist(p, &centroids[l]))
                .collect();
            for c in 0..k {
                if counts[c] == 0 {
                    let far = (0..points.len()).fold(0, |best, i| {
                        if residual[i] > residual[best] {
                            i
                        } else {
                            best
                        }
                    });
                    centroids[c] = points[far].clone();
                    residual[far] = 0.0;
                }
            }
        }
        let previous = labels.clone();
        let next = assign_all(points, &centroids, &mut labels);
        trace.push(next);
        let improvement = wcss - next;
        wcss = next;
        if labels == previous || improvement <= config.tol * wcss.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    (centroids, trace)
}
