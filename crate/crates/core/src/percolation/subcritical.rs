//! Exact exploration of the cluster of the rooted stick `l_L(o, 0)`.
//!
//! Sticks are revealed lazily: when a stick `B` is explored, a fresh sample
//! of all sticks crossing `B` is drawn and those meeting an earlier explored
//! stick are dropped (they belong to a region already revealed). The result
//! has the law of the cluster in the whole plane; no window is needed.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::StickIndex;
use crate::geometry::{make_stick, map_stick, sticks_meet, HPoint, Stick};
use crate::process::{axis_hits, offspring_mean, PhiLaw, ProcessError};
use crate::rng::{role, stream, StreamRng};

/// Exploration limits. Clusters exceeding either are reported truncated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplorationCap {
    pub max_sticks: usize,
    pub max_radius: f64,
}

impl Default for ExplorationCap {
    fn default() -> Self {
        ExplorationCap {
            max_sticks: 100_000,
            max_radius: 40.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExploredCluster {
    pub sticks: Vec<Stick>,
    pub truncated: bool,
}

/// Explores the cluster of `l_L(o, 0)` with randomness from `rng`.
pub fn explore_root_cluster(
    rng: &mut StreamRng,
    lambda: f64,
    length: f64,
    cap: ExplorationCap,
) -> Result<ExploredCluster, ProcessError> {
    let root = make_stick(HPoint::ORIGIN, 0.0, length).expect("valid root");
    let mut sticks = vec![root];
    let mut queue = VecDeque::from([0usize]);
    let mut explored = StickIndex::for_length(length);
    let mut truncated = false;
    while let Some(b) = queue.pop_front() {
        let base = sticks[b];
        let hits = axis_hits(
            rng,
            lambda,
            length,
            -length / 2.0,
            length / 2.0,
            PhiLaw::Sine,
            f64::INFINITY,
        )?;
        let frame = base.frame();
        for h in hits {
            let cand = map_stick(&frame, &h.stick);
            let mut seen = false;
            explored.for_each_candidate(&cand, |j| {
                if !seen && sticks_meet(&cand, &sticks[j as usize]) {
                    seen = true;
                }
            });
            if seen {
                continue;
            }
            if cand.max_rho() > cap.max_radius || sticks.len() >= cap.max_sticks {
                truncated = true;
                continue;
            }
            queue.push_back(sticks.len());
            sticks.push(cand);
        }
        explored.insert(b as u32, &base);
        if truncated {
            break;
        }
    }
    Ok(ExploredCluster { sticks, truncated })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubcriticalSummary {
    pub lambda: f64,
    pub length: f64,
    pub offspring_mean: f64,
    pub reps: usize,
    pub mean_size: f64,
    pub stderr: f64,
    pub max_size: usize,
    pub truncated: usize,
    /// Mean total progeny `1/(1−m)` of the dominating Galton–Watson tree.
    pub gw_bound: f64,
    /// Empirical frequencies of sizes `1..=sizes.len()` (last bin collects the tail).
    pub size_histogram: Vec<usize>,
}

/// Cluster size statistics of the rooted stick over `reps` replicates.
/// Replicate `i` draws from the stream keyed by `(seed, i)`.
pub fn subcritical_cluster_stats(
    lambda: f64,
    length: f64,
    reps: usize,
    seed: u64,
    cap: ExplorationCap,
) -> Result<SubcriticalSummary, ProcessError> {
    use rayon::prelude::*;
    let results: Vec<Result<(usize, bool), ProcessError>> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, &[role::CLUSTER, i as u64]);
            let c = explore_root_cluster(&mut rng, lambda, length, cap)?;
            Ok((c.sticks.len(), c.truncated))
        })
        .collect();
    let mut sizes = Vec::with_capacity(reps);
    let mut truncated = 0;
    for r in results {
        let (n, t) = r?;
        sizes.push(n);
        truncated += t as usize;
    }
    let n = sizes.len() as f64;
    let mean = sizes.iter().sum::<usize>() as f64 / n;
    let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let mut hist = vec![0usize; 50];
    for &s in &sizes {
        hist[(s - 1).min(49)] += 1;
    }
    let m = offspring_mean(lambda, length);
    Ok(SubcriticalSummary {
        lambda,
        length,
        offspring_mean: m,
        reps,
        mean_size: mean,
        stderr: (var / n).sqrt(),
        max_size: sizes.iter().copied().max().unwrap_or(0),
        truncated,
        gw_bound: if m < 1.0 { 1.0 / (1.0 - m) } else { f64::INFINITY },
        size_histogram: hist,
    })
}
