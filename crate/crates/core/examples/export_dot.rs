//! Graphviz output with nodes coloured by partition class.

use std::path::Path;

use dynnet::abstraction::Partition;
use dynnet::graph::{to_dot, StructuralGraph};
use dynnet::network::io::read_model;

fn main() -> dynnet::Result<()> {
    let m = read_model(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/selection.json"))?;
    let p = Partition::new(6, &[0, 1, 4], &[3], &[2], &[5])?;
    print!("{}", to_dot(&StructuralGraph::from_matrix(m.g()), &m.labels().nodes, Some(&p)));
    Ok(())
}
