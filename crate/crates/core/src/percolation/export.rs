use std::io::Write;

use super::{ClusterLabeling, EmbeddingTree};

/// Writes the `(stick_index, cluster_id)` table.
pub fn write_labeling<W: Write>(labeling: &ClusterLabeling, mut w: W) -> std::io::Result<()> {
    writeln!(w, "stick_index,cluster_id")?;
    for (i, l) in labeling.labels.iter().enumerate() {
        writeln!(w, "{i},{l}")?;
    }
    Ok(())
}

/// Writes the tree as a parent-pointer list. Each node's triple is given in
/// its parent's chart; the root has parent `-1`.
pub fn write_tree<W: Write>(tree: &EmbeddingTree, mut w: W) -> std::io::Result<()> {
    writeln!(w, "node,parent,side,depth,rho_prime,phi,r")?;
    for (i, n) in tree.nodes.iter().enumerate() {
        let parent = n.parent.map_or(-1, |p| p as i64);
        writeln!(
            w,
            "{i},{parent},{},{},{:.16e},{:.16e},{:.16e}",
            n.side, n.depth, n.triple.rho_prime, n.triple.varphi, n.triple.r
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::percolation::{cluster_sticks, gw_embedding_simulate, EmbeddingStart};
    use crate::geometry::{make_stick, HPoint};

    #[test]
    fn tables() {
        let s = vec![
            make_stick(HPoint::ORIGIN, 0.0, 2.0).unwrap(),
            make_stick(HPoint::new(9.0, 1.0), 0.0, 2.0).unwrap(),
        ];
        let mut buf = Vec::new();
        write_labeling(&cluster_sticks(&s), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "stick_index,cluster_id\n0,0\n1,1\n");
        let t = gw_embedding_simulate(0.5, 20.0, 2, 3, EmbeddingStart::Stick).unwrap();
        let mut buf = Vec::new();
        write_tree(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), t.nodes.len() + 1);
        assert!(text.lines().nth(1).unwrap().starts_with("0,-1,0,0,"));
    }
}
