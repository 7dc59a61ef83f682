//! Per-variable binning of continuous data.
//!
//! Three strategies: quantile (equal-frequency), uniform (equal-width) and
//! 1-D k-means. Bin intervals are [lo, hi) except the last, which is closed;
//! out-of-range values extrapolate into the edge bins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Quantile,
    Uniform,
    Kmeans,
}

impl Strategy {
    pub fn short_label(&self) -> &'static str {
        match self {
            Strategy::Quantile => "q",
            Strategy::Uniform => "u",
            Strategy::Kmeans => "k",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quantile" | "q" => Ok(Strategy::Quantile),
            "uniform" | "u" => Ok(Strategy::Uniform),
            "kmeans" | "k" => Ok(Strategy::Kmeans),
            other => Err(Error::Config(format!("unknown strategy '{other}'"))),
        }
    }
}

/// Fitted bin-edge model for one variable. Edges are strictly increasing;
/// duplicate candidate edges collapse, so `bin_count` may be smaller than
/// the requested bin count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discretizer {
    pub strategy: Strategy,
    pub requested_bins: usize,
    pub edges: Vec<f64>,
}

impl Discretizer {
    /// Fits bin edges on a nonempty value list.
    pub fn fit(values: &[f64], strategy: Strategy, bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(Error::TooFewBins(bins));
        }
        if values.is_empty() {
            return Err(Error::EmptyValues);
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut edges = match strategy {
            Strategy::Quantile => (1..bins)
                .map(|i| quantile_sorted(&sorted, i as f64 / bins as f64))
                .collect(),
            Strategy::Uniform => {
                let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
                (1..bins)
                    .map(|i| min + i as f64 * (max - min) / bins as f64)
                    .collect()
            }
            Strategy::Kmeans => {
                let centroids = kmeans_1d(&sorted, bins);
                centroids
                    .windows(2)
                    .map(|w| (w[0] + w[1]) / 2.0)
                    .collect::<Vec<_>>()
            }
        };
        dedup_edges(&mut edges);
        Ok(Discretizer {
            strategy,
            requested_bins: bins,
            edges,
        })
    }

    /// Effective bin count after duplicate-edge collapse.
    pub fn bin_count(&self) -> usize {
        self.edges.len() + 1
    }

    /// Bin index of a value: the number of edges at or below it.
    pub fn transform(&self, value: f64) -> usize {
        self.edges.partition_point(|&e| e <= value)
    }
}

/// Type-7 (linear interpolation) quantile of pre-sorted values.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn dedup_edges(edges: &mut Vec<f64>) {
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();
}

/// Exact 1-D k-means: sorted centroids of the partition minimizing the sum
/// of within-cluster squared deviations, found by dynamic programming over
/// contiguous segments of the sorted data. Deterministic and seed-free.
pub fn kmeans_1d(sorted: &[f64], k: usize) -> Vec<f64> {
    let n = sorted.len();
    let k = k.min(n);
    if k == 0 {
        return Vec::new();
    }
    // Prefix sums for O(1) segment cost.
    let mut pre = vec![0.0; n + 1];
    let mut pre2 = vec![0.0; n + 1];
    for (i, &x) in sorted.iter().enumerate() {
        pre[i + 1] = pre[i] + x;
        pre2[i + 1] = pre2[i] + x * x;
    }
    // Within-segment SSE for points [a, b).
    let cost = |a: usize, b: usize| -> f64 {
        let m = (b - a) as f64;
        let s = pre[b] - pre[a];
        (pre2[b] - pre2[a] - s * s / m).max(0.0)
    };
    // best[c][i]: min SSE splitting the first i points into c+1 segments.
    let mut best = vec![vec![f64::INFINITY; n + 1]; k];
    let mut split = vec![vec![0usize; n + 1]; k];
    for i in 1..=n {
        best[0][i] = cost(0, i);
    }
    for c in 1..k {
        for i in (c + 1)..=n {
            for j in c..i {
                let v = best[c - 1][j] + cost(j, i);
                if v < best[c][i] {
                    best[c][i] = v;
                    split[c][i] = j;
                }
            }
        }
    }
    // Recover segment boundaries, then centroids.
    let mut bounds = vec![n];
    let mut i = n;
    for c in (1..k).rev() {
        i = split[c][i];
        bounds.push(i);
    }
    bounds.push(0);
    bounds.reverse();
    bounds
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (pre[w[1]] - pre[w[0]]) / (w[1] - w[0]) as f64)
        .collect()
}
