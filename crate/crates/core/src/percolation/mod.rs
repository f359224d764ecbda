//! Connectivity of stick sets.

mod blocking;
mod clusters;
mod embedding;
mod export;
mod index;
mod subcritical;
mod unionfind;

pub use clusters::{
    build_clusters, build_clusters_brute, cluster_sticks, cluster_sticks_brute, crossing_exists,
    two_arm_count, ClusterLabeling,
};
pub use index::StickIndex;
pub use unionfind::UnionFind;
pub use embedding::{
    gw_embed_children, gw_embedding_simulate, gw_extinction_by_depth, gw_extinction_probability,
    search_boxes, CheckSummary, ChildStick, EmbeddingError, EmbeddingNode, EmbeddingStart,
    EmbeddingTree, MIN_EMBEDDING_LENGTH,
};
pub use blocking::{
    blocking_indicator, blocking_sides, hk_angles, hk_disjointness_check, in_blocking_class,
    BlockingSides, HkAngles,
};
pub use export::{write_labeling, write_tree};
pub use subcritical::{
    explore_root_cluster, subcritical_cluster_stats, ExplorationCap, ExploredCluster,
    SubcriticalSummary,
};
