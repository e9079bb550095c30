//! Moves a model onto another module matrix with a transformation and
//! checks that the open-loop responses do not change.

use std::path::Path;

use dynnet::network::{check_equivalence, io::read_model, FrequencyGrid, DEFAULT_TOLERANCE};
use dynnet::random::{random_invalid_transformation, random_model, rng};
use dynnet::transform::{apply_transformation, is_valid_transformation, transformation_between};

fn main() -> dynnet::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let m = read_model(&dir.join("four_node.json"))?;
    let mut r = rng(11);
    let target = random_model(&mut r, 4, 1);

    let p = transformation_between(m.g(), target.g())?;
    println!("valid: {}", is_valid_transformation(&p, &m));
    let moved = apply_transformation(&m, &p)?;
    assert_eq!(moved.g(), target.g());
    let same = check_equivalence(&m, &moved, &FrequencyGrid::uniform(32), DEFAULT_TOLERANCE)?;
    println!("equivalent after transformation: {same}");

    let (bad, k) = random_invalid_transformation(&mut r, &m, 1)?;
    println!("shifted diagonal {}: valid = {}", k + 1, is_valid_transformation(&bad, &m));
    Ok(())
}
