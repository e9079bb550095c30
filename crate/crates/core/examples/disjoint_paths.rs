//! Counts vertex-disjoint paths from `V` to `L` and compares with the
//! generic rank of the map from removed to observing nodes.

use std::path::Path;

use dynnet::abstraction::{indirect_observation_map, Partition};
use dynnet::graph::{vertex_disjoint_paths, StructuralGraph};
use dynnet::network::{io::read_model, FrequencyGrid};

fn main() -> dynnet::Result<()> {
    let m = read_model(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/indirect_paths.json"))?;
    let p = Partition::new(6, &[], &[3, 4, 5], &[0, 1], &[2])?;
    let g = StructuralGraph::from_matrix(m.g());
    let paths = vertex_disjoint_paths(&g, p.v_set(), p.l_set(), p.z_tilde());
    let map = indirect_observation_map(m.g(), &p)?;
    let rank = map.rank_at(FrequencyGrid::random(8, 1).points())?;
    println!("disjoint paths {paths}, generic rank {rank}");
    Ok(())
}
