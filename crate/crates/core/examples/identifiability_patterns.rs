//! Block patterns of the abstracted excitation matrix for the indirect
//! inputs abstraction of the four-node network.

use std::path::Path;

use dynnet::abstraction::{abstract_by_transformation, Partition};
use dynnet::identifiability::{
    abstracted_pattern, check_prop4, has_leading_diagonal, identifiability_template, r_check_structure,
};
use dynnet::network::io::read_model;

fn main() -> dynnet::Result<()> {
    let m = read_model(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/four_node.json"))?;
    let p = Partition::new(4, &[0, 2], &[1], &[3], &[])?;
    for c in check_prop4(&m, &p)?.clauses {
        println!("{:<18} {}", c.name, c.passed);
    }
    let predicted = r_check_structure(&m, &p)?;
    let template = identifiability_template(&p)?;
    println!("predicted\n{predicted}template\n{template}");
    println!("conforms {}, leading diagonal {}", predicted.conforms_to(&template), has_leading_diagonal(&predicted));
    let a = abstract_by_transformation(&m, &p)?;
    println!("computed\n{}", abstracted_pattern(a.abstracted.r(), &p)?);
    Ok(())
}
