use super::index::StickIndex;
use super::unionfind::UnionFind;
use crate::geometry::{sticks_meet, Stick};
use crate::process::StickSample;

/// Partition of a sample's sticks into connected components of the union
/// of sticks. Labels are numbered `0..cluster_count` in order of first
/// appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterLabeling {
    pub forest: UnionFind,
    pub labels: Vec<u32>,
    pub cluster_count: usize,
}

impl ClusterLabeling {
    pub fn from_forest(mut forest: UnionFind) -> ClusterLabeling {
        let n = forest.len();
        let mut id_of_root = vec![u32::MAX; n];
        let mut labels = Vec::with_capacity(n);
        let mut next = 0u32;
        for i in 0..n {
            let r = forest.find(i);
            if id_of_root[r] == u32::MAX {
                id_of_root[r] = next;
                next += 1;
            }
            labels.push(id_of_root[r]);
        }
        ClusterLabeling {
            forest,
            labels,
            cluster_count: next as usize,
        }
    }

    pub fn label(&self, i: usize) -> u32 {
        self.labels[i]
    }

    /// Stick indices of every cluster.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cluster_count];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(i);
        }
        out
    }

    /// Size of each cluster.
    pub fn sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.cluster_count];
        for &l in &self.labels {
            out[l as usize] += 1;
        }
        out
    }
}

/// Clusters of a stick list using the spatial index.
pub fn cluster_sticks(sticks: &[Stick]) -> ClusterLabeling {
    let mut uf = UnionFind::new(sticks.len());
    if let Some(first) = sticks.first() {
        let mut idx = StickIndex::for_length(first.length());
        for (i, s) in sticks.iter().enumerate() {
            let mut hits = Vec::new();
            idx.for_each_candidate(s, |j| hits.push(j as usize));
            hits.sort_unstable();
            hits.dedup();
            for j in hits {
                if uf.find(i) != uf.find(j) && sticks_meet(s, &sticks[j]) {
                    uf.union(i, j);
                }
            }
            idx.insert(i as u32, s);
        }
    }
    ClusterLabeling::from_forest(uf)
}

/// Clusters by testing every pair.
pub fn cluster_sticks_brute(sticks: &[Stick]) -> ClusterLabeling {
    let mut uf = UnionFind::new(sticks.len());
    for i in 0..sticks.len() {
        for j in 0..i {
            if sticks_meet(&sticks[i], &sticks[j]) {
                uf.union(i, j);
            }
        }
    }
    ClusterLabeling::from_forest(uf)
}

pub fn build_clusters(sample: &StickSample) -> ClusterLabeling {
    cluster_sticks(&sample.sticks)
}

pub fn build_clusters_brute(sample: &StickSample) -> ClusterLabeling {
    cluster_sticks_brute(&sample.sticks)
}

/// Per cluster: does it hold a stick meeting `B(o, r_in)`, and one reaching
/// distance `R` from `o`.
fn crossing_flags(sticks: &[Stick], labeling: &ClusterLabeling, r_in: f64, r: f64) -> Vec<bool> {
    let mut inner = vec![false; labeling.cluster_count];
    let mut outer = vec![false; labeling.cluster_count];
    for (i, s) in sticks.iter().enumerate() {
        let l = labeling.labels[i] as usize;
        if !inner[l] && s.min_rho() <= r_in {
            inner[l] = true;
        }
        if !outer[l] && s.max_rho() >= r {
            outer[l] = true;
        }
    }
    inner.iter().zip(&outer).map(|(a, b)| *a && *b).collect()
}

/// Whether some cluster connects `B(o, r_in)` to distance `R`.
pub fn crossing_exists(sample: &StickSample, labeling: &ClusterLabeling, r_in: f64, r: f64) -> bool {
    two_arm_count(sample, labeling, r_in, r) > 0
}

/// Number of distinct clusters connecting `B(o, r_in)` to distance `R`.
pub fn two_arm_count(sample: &StickSample, labeling: &ClusterLabeling, r_in: f64, r: f64) -> usize {
    crossing_flags(&sample.sticks, labeling, r_in, r)
        .into_iter()
        .filter(|x| *x)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_stick, HPoint};
    use crate::process::{sample_window, ProcessConfig, SampleRegion};
    use std::f64::consts::PI;

    fn sample_of(sticks: Vec<Stick>) -> StickSample {
        StickSample::new(
            ProcessConfig::new(1.0, sticks[0].length(), 10.0, 0).unwrap(),
            SampleRegion::Window,
            sticks,
        )
    }

    #[test]
    fn empty_sample() {
        let c = ProcessConfig::new(1e-12, 1.0, 1.0, 0).unwrap();
        let s = sample_window(&c).unwrap();
        let l = build_clusters(&s);
        assert_eq!(l.cluster_count, 0);
        assert!(!crossing_exists(&s, &l, 0.5, 1.0));
    }

    #[test]
    fn cross_plus_distant_stick() {
        let s = sample_of(vec![
            make_stick(HPoint::ORIGIN, 0.0, 2.0).unwrap(),
            make_stick(HPoint::ORIGIN, PI / 2.0, 2.0).unwrap(),
            make_stick(HPoint::new(10.0, PI / 2.0), 0.0, 2.0).unwrap(),
        ]);
        let l = build_clusters(&s);
        assert_eq!(l.cluster_count, 2);
        assert_eq!(l.label(0), l.label(1));
        assert_eq!(l.sizes(), vec![2, 1]);
    }

    #[test]
    fn single_long_stick_crosses() {
        let s = sample_of(vec![make_stick(HPoint::ORIGIN, 0.0, 8.0).unwrap()]);
        let l = build_clusters(&s);
        assert!(crossing_exists(&s, &l, 1.0, 4.0));
        assert_eq!(two_arm_count(&s, &l, 1.0, 4.0), 1);
        assert!(!crossing_exists(&s, &l, 1.0, 4.5));
    }

    #[test]
    fn indexed_equals_brute_force() {
        for seed in 0..20 {
            let c = ProcessConfig::new(0.3, 3.0, 3.0, seed).unwrap();
            let s = sample_window(&c).unwrap();
            assert_eq!(build_clusters(&s).labels, build_clusters_brute(&s).labels);
        }
    }
}
