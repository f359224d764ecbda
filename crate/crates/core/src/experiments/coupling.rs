//! Monotone coupling of the stick process across intensities.
//!
//! Each stick carries a mark uniform in `[0, λ_max]`; the sticks with mark
//! at most `λ` form the process at intensity `λ`. Marks are generated in
//! layers `[0, a], [a, 2a], [2a, 4a], ...`, each an independent sample of
//! intensity equal to its width, so a replicate can stop as soon as the
//! event of interest occurs without sampling the remaining layers.

use rand::Rng;

use crate::geometry::{sticks_meet, Stick};
use crate::percolation::{StickIndex, UnionFind};
use crate::process::sample_meeting_ball_with;
use crate::rng::{role, stream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    pub length: f64,
    pub radius: f64,
    pub r_in: f64,
    pub lambda_max: f64,
    pub first_layer: f64,
    /// Bound on the expected stick count of one layer.
    pub cap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateTrace {
    /// Smallest intensity at which some cluster joins `B(o, r_in)` to
    /// distance `R`; infinite if none up to the last intensity reached.
    pub lambda_star: f64,
    /// Number of crossing clusters at each grid intensity.
    pub counts: Vec<u32>,
    /// Intensity up to which the replicate is complete.
    pub reached: f64,
    pub error: Option<String>,
}

/// Sticks grow one at a time; clusters are tracked with per-root flags for
/// meeting `B(o, r_in)` and reaching distance `R`.
struct Growth {
    sticks: Vec<Stick>,
    uf: UnionFind,
    inner: Vec<bool>,
    outer: Vec<bool>,
    index: StickIndex,
    crossing: u32,
    scratch: Vec<usize>,
}

impl Growth {
    fn new(length: f64) -> Growth {
        Growth {
            sticks: Vec::new(),
            uf: UnionFind::new(0),
            inner: Vec::new(),
            outer: Vec::new(),
            index: StickIndex::for_length(length),
            crossing: 0,
            scratch: Vec::new(),
        }
    }

    fn both(&self, root: usize) -> u32 {
        (self.inner[root] && self.outer[root]) as u32
    }

    fn add(&mut self, s: Stick, r_in: f64, radius: f64) {
        let i = self.uf.push();
        self.sticks.push(s);
        self.inner.push(s.min_rho() <= r_in);
        self.outer.push(s.max_rho() >= radius);
        self.crossing += self.both(i);
        let mut hits = std::mem::take(&mut self.scratch);
        hits.clear();
        self.index.for_each_candidate(&s, |j| hits.push(j as usize));
        hits.sort_unstable();
        hits.dedup();
        for &j in &hits {
            let (ri, rj) = (self.uf.find(i), self.uf.find(j));
            if ri == rj || !sticks_meet(&s, &self.sticks[j]) {
                continue;
            }
            let before = self.both(ri) + self.both(rj);
            let inner = self.inner[ri] || self.inner[rj];
            let outer = self.outer[ri] || self.outer[rj];
            let root = self.uf.union(ri, rj).expect("distinct roots");
            self.inner[root] = inner;
            self.outer[root] = outer;
            self.crossing = self.crossing - before + self.both(root);
        }
        self.scratch = hits;
        self.index.insert(i as u32, &s);
    }
}

/// Runs replicate `rep` up to `lambda_max`, recording crossing counts at the
/// ascending `grid`. With `stop_at_crossing` it returns at the first
/// crossing and leaves later grid counts at zero.
pub fn run_replicate(
    p: &CouplingParams,
    seed: u64,
    rep: u64,
    grid: &[f64],
    stop_at_crossing: bool,
) -> ReplicateTrace {
    let mut g = Growth::new(p.length);
    let mut counts = vec![0u32; grid.len()];
    let mut next = 0usize;
    let mut lo = 0.0;
    let mut hi = p.first_layer.min(p.lambda_max);
    let mut layer = 0u64;
    loop {
        let mut rng = stream(seed, &[role::LAYER, rep, layer]);
        let sticks =
            match sample_meeting_ball_with(&mut rng, hi - lo, p.length, p.radius, p.cap) {
                Ok(s) => s,
                Err(e) => {
                    while next < grid.len() && grid[next] <= lo {
                        counts[next] = g.crossing;
                        next += 1;
                    }
                    return ReplicateTrace {
                        lambda_star: f64::INFINITY,
                        counts,
                        reached: lo,
                        error: Some(e.to_string()),
                    };
                }
            };
        let mut marked: Vec<(f64, Stick)> = sticks
            .into_iter()
            .map(|s| (lo + (hi - lo) * rng.random::<f64>(), s))
            .collect();
        marked.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (mark, s) in marked {
            while next < grid.len() && grid[next] < mark {
                counts[next] = g.crossing;
                next += 1;
            }
            g.add(s, p.r_in, p.radius);
            if stop_at_crossing && g.crossing > 0 {
                return ReplicateTrace {
                    lambda_star: mark,
                    counts,
                    reached: p.lambda_max,
                    error: None,
                };
            }
        }
        if hi >= p.lambda_max {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(p.lambda_max);
        layer += 1;
    }
    while next < grid.len() && grid[next] <= p.lambda_max {
        counts[next] = g.crossing;
        next += 1;
    }
    ReplicateTrace {
        lambda_star: f64::INFINITY,
        counts,
        reached: p.lambda_max,
        error: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::percolation::{build_clusters, two_arm_count};
    use crate::process::{ProcessConfig, SampleRegion, StickSample};

    fn params(lambda_max: f64) -> CouplingParams {
        CouplingParams {
            length: 3.0,
            radius: 3.0,
            r_in: 0.5,
            lambda_max,
            first_layer: 0.05,
            cap: 1e7,
        }
    }

    /// Rebuilds the sample at intensity `lambda` from the layers and counts
    /// crossing clusters from scratch.
    fn static_count(p: &CouplingParams, seed: u64, rep: u64, lambda: f64) -> usize {
        let mut sticks = Vec::new();
        let (mut lo, mut hi, mut layer) = (0.0, p.first_layer, 0u64);
        loop {
            let mut rng = stream(seed, &[role::LAYER, rep, layer]);
            let s = sample_meeting_ball_with(&mut rng, hi - lo, p.length, p.radius, p.cap).unwrap();
            for st in s {
                let m = lo + (hi - lo) * rng.random::<f64>();
                if m <= lambda {
                    sticks.push(st);
                }
            }
            if hi >= p.lambda_max {
                break;
            }
            lo = hi;
            hi = (2.0 * hi).min(p.lambda_max);
            layer += 1;
        }
        let c = ProcessConfig::new(lambda.max(1e-9), p.length, p.radius, 0).unwrap();
        let sample = StickSample::new(c, SampleRegion::MeetingBall, sticks);
        two_arm_count(&sample, &build_clusters(&sample), p.r_in, p.radius)
    }

    #[test]
    fn incremental_counts_match_static_recount() {
        let p = params(0.6);
        let grid = [0.02, 0.1, 0.25, 0.4, 0.6];
        for rep in 0..6 {
            let t = run_replicate(&p, 11, rep, &grid, false);
            assert!(t.error.is_none());
            for (k, &lam) in grid.iter().enumerate() {
                assert_eq!(t.counts[k] as usize, static_count(&p, 11, rep, lam), "rep {rep} λ {lam}");
            }
        }
    }

    #[test]
    fn early_stop_agrees_with_full_run() {
        let p = params(0.6);
        let grid = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
        for rep in 0..10 {
            let full = run_replicate(&p, 5, rep, &grid, false);
            let stop = run_replicate(&p, 5, rep, &grid, true);
            for (k, &lam) in grid.iter().enumerate() {
                assert_eq!(full.counts[k] > 0, stop.lambda_star <= lam);
            }
        }
    }

    #[test]
    fn cap_failure_is_recorded() {
        let mut p = params(4.0);
        p.cap = 200.0;
        let t = run_replicate(&p, 1, 0, &[0.01, 1.0, 4.0], false);
        assert!(t.error.is_some());
        assert!(t.reached < 4.0);
    }
}
