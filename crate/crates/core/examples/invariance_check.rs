//! Structural invariance of the module `i → j` on the example graphs,
//! confirmed by computing the abstraction.

use std::path::Path;

use dynnet::abstraction::{abstract_by_transformation, Partition};
use dynnet::graph::{check_generalized_invariance, InvarianceQuery, StructuralGraph};
use dynnet::network::io::read_model;

fn main() -> dynnet::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for file in ["example1_left", "example1_right", "example2_left", "example2_right"] {
        let m = read_model(&dir.join(format!("{file}.json")))?;
        let p = Partition::new(4, &[0, 1], &[3], &[2], &[])?;
        let q = InvarianceQuery::new(0, 1, p.clone())?;
        let structural = check_generalized_invariance(&StructuralGraph::from_matrix(m.g()), &q);
        let a = abstract_by_transformation(&m, &p)?;
        let exact = a.abstracted.g().get(1, 0) == m.g().get(1, 0);
        println!("{file:<15} structural {structural:<5}  exact {exact}");
    }
    Ok(())
}
