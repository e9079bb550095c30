//! Lists the minimal measurement sets that keep `G_ji` invariant.

use std::path::Path;

use dynnet::graph::{select_nodes, StructuralGraph};
use dynnet::network::io::read_model;

fn main() -> dynnet::Result<()> {
    let m = read_model(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/selection.json"))?;
    let g = StructuralGraph::from_matrix(m.g());
    let (i, j) = (m.node_index("i").unwrap(), m.node_index("j").unwrap());
    let all: Vec<usize> = (0..m.node_count()).collect();
    for p in select_nodes(&g, i, j, &all, 10)? {
        let l = p.with_labels(m.labels());
        println!("S~ {:?}  L {:?}  V {:?}  Z~ {:?}", l.s_tilde, l.l, l.v, l.z_tilde);
    }
    Ok(())
}
