//! Seeded generators for models, partitions and transformations.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abstraction::{check_indirect_observations_seeded, NodeClass, Partition};
use crate::error::Result;
use crate::graph::StructuralGraph;
use crate::network::{validate_model, NetworkModel};
use crate::ratfun::{Polynomial, RationalFunction, TransferMatrix};
use crate::transform::{transformation_between, Transformation};

pub type ModelRng = ChaCha8Rng;

const MAX_ATTEMPTS: usize = 1000;

pub fn rng(seed: u64) -> ModelRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero rational `k/den` with `1 ≤ |k| ≤ max`.
pub fn nonzero_rational<R: Rng>(rng: &mut R, max: i64, den: i64) -> BigRational {
    let k = rng.gen_range(1..=max) * if rng.gen_bool(0.5) { 1 } else { -1 };
    BigRational::new(k.into(), den.into())
}

fn small_rational<R: Rng>(rng: &mut R, max: i64, den: i64) -> BigRational {
    BigRational::new(rng.gen_range(-max..=max).into(), den.into())
}

/// Strictly proper stable module `(b1 q⁻¹ + b2 q⁻²) / (1 + a q⁻¹)` with
/// `|a| < 1`; `b2` and `a` are dropped when `max_degree < 2`.
pub fn random_module<R: Rng>(rng: &mut R, gain: i64, max_degree: usize) -> RationalFunction {
    let b1 = nonzero_rational(rng, gain, 8 * gain.max(1));
    let mut num = vec![BigRational::from_integer(0.into()), b1];
    let mut den = vec![BigRational::from_integer(1.into())];
    if max_degree >= 2 {
        num.push(small_rational(rng, gain, 8 * gain.max(1)));
        den.push(small_rational(rng, 6, 8));
    }
    RationalFunction::new(Polynomial::new(num), Polynomial::new(den)).expect("monic denominator")
}

/// Hollow module matrix with each off-diagonal edge present with probability `density`.
pub fn random_hollow<R: Rng>(rng: &mut R, n: usize, density: f64, max_degree: usize) -> TransferMatrix {
    let mut g = TransferMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(density) {
                g.set(i, j, random_module(rng, 1, max_degree));
            }
        }
    }
    g
}

/// Model with identity inputs and noise that passes every validation clause.
pub fn random_model<R: Rng>(rng: &mut R, n: usize, max_degree: usize) -> NetworkModel {
    for _ in 0..MAX_ATTEMPTS {
        let g = random_hollow(rng, n, 0.5, max_degree);
        if let Ok(m) = NetworkModel::with_identity_inputs(g) {
            if validate_model(&m).all_passed() {
                return m;
            }
        }
    }
    panic!("no valid model of size {n} after {MAX_ATTEMPTS} attempts");
}

/// Partition with at least one kept node that passes the indirect-observation rank test.
pub fn random_partition<R: Rng>(rng: &mut R, m: &NetworkModel) -> Partition {
    let n = m.node_count();
    for _ in 0..MAX_ATTEMPTS {
        let classes: Vec<NodeClass> = (0..n)
            .map(|_| *[NodeClass::STilde, NodeClass::L, NodeClass::V, NodeClass::ZTilde].choose(rng).unwrap())
            .collect();
        let Ok(p) = Partition::from_classes(&classes) else { continue };
        if check_indirect_observations_seeded(m, &p, rng.gen()).unwrap_or(false) {
            return p;
        }
    }
    panic!("no admissible partition after {MAX_ATTEMPTS} attempts");
}

/// Transformation onto a random well-posed hollow target.
pub fn random_valid_transformation<R: Rng>(rng: &mut R, m: &NetworkModel, max_degree: usize) -> Result<Transformation> {
    let n = m.node_count();
    let target = random_model(rng, n, max_degree);
    transformation_between(m.g(), target.g())
}

/// A valid transformation with one diagonal entry shifted by a nonzero
/// constant, so the transformed module matrix gets a self-loop there.
pub fn random_invalid_transformation<R: Rng>(rng: &mut R, m: &NetworkModel, max_degree: usize) -> Result<(Transformation, usize)> {
    let mut p = random_valid_transformation(rng, m, max_degree)?.into_matrix();
    let k = rng.gen_range(0..m.node_count());
    let shift = RationalFunction::constant(nonzero_rational(rng, 4, 4));
    let entry = p.get(k, k) + &shift;
    p.set(k, k, entry);
    Ok((Transformation::new(p)?, k))
}

/// Model on the given graph with modules `c·q⁻¹`, distinct nonzero `c`.
pub fn random_structured_model<R: Rng>(rng: &mut R, graph: &StructuralGraph) -> NetworkModel {
    let n = graph.node_count();
    let edges = graph.edges();
    let mut numerators: Vec<i64> = (1..=(4 * edges.len() as i64 + 4)).collect();
    numerators.shuffle(rng);
    let den = 8 * (n as i64 + 1) * (edges.len() as i64 + 1);
    let mut g = TransferMatrix::zeros(n, n);
    for (k, &(from, to)) in edges.iter().enumerate() {
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        g.set(to, from, RationalFunction::delay(BigRational::new((sign * numerators[k]).into(), den.into()), 1));
    }
    NetworkModel::with_identity_inputs(g).expect("square identity inputs")
}

/// Directed graph without self-edges, each edge present with probability `density`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> StructuralGraph {
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a != b).filter(|_| rng.gen_bool(density)).collect();
    StructuralGraph::new(n, &edges).expect("no self-edges")
}
