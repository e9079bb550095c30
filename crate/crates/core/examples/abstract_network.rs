//! Removes node 4 of the four-node network twice: by immersion and by
//! using node 2 as an indirect observation.

use std::path::Path;

use dynnet::abstraction::{abstract_by_substitution, abstract_by_transformation, Partition};
use dynnet::network::{check_abstraction, io::read_model, FrequencyGrid, SelectionMatrix};

fn main() -> dynnet::Result<()> {
    let m = read_model(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/four_node.json"))?;
    let cases = [
        ("immersion", Partition::new(4, &[0, 1, 2], &[], &[], &[3])?),
        ("indirect inputs", Partition::new(4, &[0, 2], &[1], &[3], &[])?),
    ];
    for (name, p) in cases {
        let a = abstract_by_transformation(&m, &p)?;
        let b = abstract_by_substitution(&m, &p)?;
        assert_eq!(a.abstracted, b.abstracted);
        println!("{name}: kept {:?}", a.abstracted.labels().nodes);
        let g = a.abstracted.g();
        for (i, j) in g.support() {
            println!("  G[{},{}] = {}", a.abstracted.node_label(i), a.abstracted.node_label(j), g.get(i, j));
        }
        let c = SelectionMatrix::new(p.kept(), 4)?;
        println!("  responses preserved: {}", check_abstraction(&m, &a.abstracted, &c, &FrequencyGrid::uniform(32), 1e-9)?);
        println!("  possibly non-proper: {}", a.report.possibly_non_proper);
    }
    Ok(())
}
