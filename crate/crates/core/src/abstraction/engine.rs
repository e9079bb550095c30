use serde::Serialize;

use super::partition::{Partition, PartitionLabels};
use crate::error::{Error, Result};
use crate::network::{FrequencyGrid, NetworkModel, NoiseRep};
use crate::ratfun::{RationalFunction, TransferMatrix};
use crate::transform::{transformed_modules, Transformation};

/// Random unit-circle points used by the generic rank test.
pub const RANK_CHECK_POINTS: usize = 8;

/// Outcome of abstracting a network onto `S̃ ∪ L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractionResult {
    pub abstracted: NetworkModel,
    /// Product of the four step matrices, in original node order.
    pub p_abs: Transformation,
    /// `I − P_abs(I−G)` over all original nodes.
    pub g4: TransferMatrix,
    pub partition: Partition,
    pub report: AbstractionReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbstractionReport {
    pub partition: PartitionLabels,
    /// Inverting `L` equations can introduce non-proper modules.
    pub possibly_non_proper: bool,
    pub non_proper_entries: Vec<String>,
    pub indirect_observations: bool,
    pub max_degree: usize,
}

fn blk(m: &TransferMatrix, rows: &[usize], cols: &[usize]) -> Result<TransferMatrix> {
    m.select(rows, cols)
}

fn all_but(n: usize, excluded: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !excluded.contains(i)).collect()
}

/// `G_LV + G_LZ̃ (I − G_Z̃Z̃)⁻¹ G_Z̃V`: the map from removed nodes to the
/// indirect observations once `Z̃` is eliminated.
pub fn indirect_observation_map(g: &TransferMatrix, p: &Partition) -> Result<TransferMatrix> {
    let (l, v, z) = (p.l_set(), p.v_set(), p.z_tilde());
    let direct = blk(g, l, v)?;
    if z.is_empty() {
        return Ok(direct);
    }
    let q = blk(g, z, z)?.identity_minus()?.inverse()?;
    direct.add(&blk(g, l, z)?.mul(&q)?.mul(&blk(g, z, v)?)?)
}

/// Generic full column rank of the indirect-observation map, tested at eight
/// seeded random points on the unit circle.
pub fn check_indirect_observations(m: &NetworkModel, p: &Partition) -> Result<bool> {
    check_indirect_observations_seeded(m, p, 0)
}

pub fn check_indirect_observations_seeded(m: &NetworkModel, p: &Partition, seed: u64) -> Result<bool> {
    check_partition_size(m, p)?;
    if p.v_set().is_empty() {
        return Ok(true);
    }
    let map = indirect_observation_map(m.g(), p)?;
    let grid = FrequencyGrid::random(RANK_CHECK_POINTS, seed);
    let rank = grid.retry_on_pole(|g| map.rank_at(g.points()))?;
    Ok(rank == p.v_set().len())
}

fn check_partition_size(m: &NetworkModel, p: &Partition) -> Result<()> {
    if p.node_count() != m.node_count() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} nodes, model has {}",
            p.node_count(),
            m.node_count()
        )));
    }
    Ok(())
}

/// Eliminates `Z̃`: identity except the `Z̃` columns, which carry
/// `G_XZ̃ Q` in rows `X ≠ Z̃` and `Q = (I − G_Z̃Z̃)⁻¹` in the `Z̃` rows.
pub fn build_p1(g: &TransferMatrix, p: &Partition) -> Result<Transformation> {
    let n = g.rows();
    let z = p.z_tilde();
    let mut p1 = TransferMatrix::identity(n);
    if z.is_empty() {
        return Ok(Transformation::identity(n));
    }
    let q = blk(g, z, z)?.identity_minus()?.inverse()?;
    let others = all_but(n, z);
    p1.set_block(&others, z, &blk(g, &others, z)?.mul(&q)?);
    p1.set_block(z, z, &q);
    Transformation::new(p1)
}

/// Trades the `L` equations for `V`: the `L` rows absorb the `V` equations
/// through `X = G¹_LV (I − G¹_VV)⁻¹`, and the `V` rows become `−Y` on the `L`
/// columns with `Y` the left inverse of `G¹_LV`.
pub fn build_p2(g1: &TransferMatrix, p: &Partition) -> Result<Transformation> {
    let n = g1.rows();
    let (l, v) = (p.l_set(), p.v_set());
    if v.is_empty() {
        return Ok(Transformation::identity(n));
    }
    let g_lv = blk(g1, l, v)?;
    let x = g_lv.mul(&blk(g1, v, v)?.identity_minus()?.inverse()?)?;
    let y = g_lv.left_inverse()?;
    let mut p2 = TransferMatrix::identity(n);
    p2.set_block(l, v, &x);
    p2.set_block(v, l, &y.neg());
    p2.set_block(v, v, &TransferMatrix::zeros(v.len(), v.len()));
    Transformation::new(p2)
}

/// Clears the `V` columns of the `S̃` and `Z̃` rows using the new `V` equations.
pub fn build_p3(g2: &TransferMatrix, p: &Partition) -> Result<Transformation> {
    let n = g2.rows();
    let v = p.v_set();
    if v.is_empty() {
        return Ok(Transformation::identity(n));
    }
    let mut p3 = TransferMatrix::identity(n);
    for rows in [p.s_tilde(), p.z_tilde()] {
        if !rows.is_empty() {
            p3.set_block(rows, v, &blk(g2, rows, v)?);
        }
    }
    Transformation::new(p3)
}

/// Diagonal `1 / (1 − G³_jj)` removing the self-loops.
pub fn build_p4(g3: &TransferMatrix) -> Result<Transformation> {
    let diag = (0..g3.rows())
        .map(|j| {
            (&RationalFunction::one() - g3.get(j, j)).inv().map_err(|_| Error::SelfLoopSingular { node: j })
        })
        .collect::<Result<Vec<_>>>()?;
    Transformation::new(TransferMatrix::diagonal(diag))
}

/// The four-step transformation route.
pub fn abstract_by_transformation(m: &NetworkModel, p: &Partition) -> Result<AbstractionResult> {
    let indirect = check_indirect_observations(m, p)?;
    if !indirect {
        return Err(Error::RankDeficient);
    }
    let g = m.g();
    let p1 = build_p1(g, p)?;
    let g1 = transformed_modules(g, p1.matrix())?;
    let p2 = build_p2(&g1, p)?;
    let g2 = transformed_modules(&g1, p2.matrix())?;
    let p3 = build_p3(&g2, p)?;
    let g3 = transformed_modules(&g2, p3.matrix())?;
    let p4 = build_p4(&g3)?;
    let p_abs = p4.after(&p3)?.after(&p2)?.after(&p1)?;
    let g4 = transformed_modules(g, p_abs.matrix())?;
    finish(m, p, p_abs, g4, indirect)
}

/// Block equations `w_X = Σ A_XY w_Y + E_X u` in order `(S̃, L, V, Z̃)`,
/// where `u` collects the original input terms.
struct BlockSystem {
    a: [[TransferMatrix; 4]; 4],
    e: [TransferMatrix; 4],
}

const S: usize = 0;
const L: usize = 1;
const V: usize = 2;
const Z: usize = 3;

impl BlockSystem {
    fn from_model(g: &TransferMatrix, p: &Partition) -> Result<Self> {
        let b = p.blocks();
        let n = g.rows();
        let all: Vec<usize> = (0..n).collect();
        let id = TransferMatrix::identity(n);
        let a = std::array::from_fn(|x| std::array::from_fn(|y| blk(g, b[x], b[y]).expect("indices in range")));
        let e = std::array::from_fn(|x| blk(&id, b[x], &all).expect("indices in range"));
        Ok(Self { a, e })
    }

    fn assemble(&self, p: &Partition, n: usize) -> (TransferMatrix, TransferMatrix) {
        let b = p.blocks();
        let all: Vec<usize> = (0..n).collect();
        let mut g = TransferMatrix::zeros(n, n);
        let mut e = TransferMatrix::zeros(n, n);
        for x in 0..4 {
            for y in 0..4 {
                g.set_block(b[x], b[y], &self.a[x][y]);
            }
            e.set_block(b[x], &all, &self.e[x]);
        }
        (g, e)
    }
}

/// The substitution route: eliminate `Z̃`, swap `L` for `V`, substitute, then
/// normalise self-loops, tracking the input map alongside.
pub fn abstract_by_substitution(m: &NetworkModel, p: &Partition) -> Result<AbstractionResult> {
    let indirect = check_indirect_observations(m, p)?;
    if !indirect {
        return Err(Error::RankDeficient);
    }
    let n = m.node_count();
    let mut sys = BlockSystem::from_model(m.g(), p)?;
    let sizes = p.blocks().map(<[usize]>::len);

    // Solve the Z̃ equations and substitute them everywhere else.
    if sizes[Z] > 0 {
        let q = sys.a[Z][Z].identity_minus()?.inverse()?;
        let zero_zz = TransferMatrix::zeros(sizes[Z], sizes[Z]);
        let solved_a: Vec<TransferMatrix> = (0..3).map(|y| q.mul(&sys.a[Z][y])).collect::<Result<_>>()?;
        let solved_e = q.mul(&sys.e[Z])?;
        for x in [S, L, V] {
            let coupling = sys.a[x][Z].clone();
            for y in [S, L, V] {
                sys.a[x][y] = sys.a[x][y].add(&coupling.mul(&solved_a[y])?)?;
            }
            sys.e[x] = sys.e[x].add(&coupling.mul(&solved_e)?)?;
            sys.a[x][Z] = TransferMatrix::zeros(sizes[x], sizes[Z]);
        }
        for (y, a) in solved_a.into_iter().enumerate() {
            sys.a[Z][y] = a;
        }
        sys.a[Z][Z] = zero_zz;
        sys.e[Z] = solved_e;
    }

    if sizes[V] > 0 {
        let a1 = sys.a.clone();
        let e1 = sys.e.clone();
        let y = a1[L][V].left_inverse()?;
        let i_l = TransferMatrix::identity(sizes[L]);

        // V from the L equations.
        let v_s = y.mul(&a1[L][S])?.neg();
        let v_l = y.mul(&i_l.sub(&a1[L][L])?)?;
        let v_e = y.mul(&e1[L])?.neg();

        // Substitute that V into the S̃ and Z̃ equations.
        for x in [S, Z] {
            let c = &a1[x][V];
            sys.a[x][S] = a1[x][S].add(&c.mul(&v_s)?)?;
            sys.a[x][L] = a1[x][L].add(&c.mul(&v_l)?)?;
            sys.a[x][V] = TransferMatrix::zeros(sizes[x], sizes[V]);
            sys.e[x] = e1[x].add(&c.mul(&v_e)?)?;
        }

        // The L equations absorb the original V equations.
        let solve_v = a1[V][V].identity_minus()?.inverse()?;
        let x_gain = a1[L][V].mul(&solve_v)?;
        sys.a[L][S] = a1[L][S].add(&x_gain.mul(&a1[V][S])?)?;
        sys.a[L][L] = a1[L][L].add(&x_gain.mul(&a1[V][L])?)?;
        sys.a[L][V] = TransferMatrix::zeros(sizes[L], sizes[V]);
        sys.e[L] = e1[L].add(&x_gain.mul(&e1[V])?)?;

        sys.a[V][S] = v_s;
        sys.a[V][L] = v_l;
        sys.a[V][V] = TransferMatrix::zeros(sizes[V], sizes[V]);
        sys.e[V] = v_e;
    }

    // Divide each equation by one minus its self-loop.
    for x in 0..4 {
        for k in 0..sizes[x] {
            let own = sys.a[x][x].get(k, k).clone();
            if own.is_zero() {
                continue;
            }
            let scale = (&RationalFunction::one() - &own)
                .inv()
                .map_err(|_| Error::SelfLoopSingular { node: p.blocks()[x][k] })?;
            for y in 0..4 {
                for c in 0..sizes[y] {
                    let v = if x == y && c == k { RationalFunction::zero() } else { sys.a[x][y].get(k, c) * &scale };
                    sys.a[x][y].set(k, c, v);
                }
            }
            for c in 0..n {
                let v = sys.e[x].get(k, c) * &scale;
                sys.e[x].set(k, c, v);
            }
        }
    }

    let (g4, p_abs) = sys.assemble(p, n);
    finish(m, p, Transformation::new(p_abs)?, g4, indirect)
}

fn finish(
    m: &NetworkModel,
    p: &Partition,
    p_abs: Transformation,
    g4: TransferMatrix,
    indirect: bool,
) -> Result<AbstractionResult> {
    let kept = p.kept();
    let removed = p.removed();
    let n = m.node_count();
    if let Some(&(i, j)) = g4.support().iter().find(|(i, j)| removed.contains(j) || i == j) {
        return Err(Error::InvalidTransformation(format!(
            "transformed entry ({},{}) should vanish",
            i + 1,
            j + 1
        )));
    }
    let all: Vec<usize> = (0..n).collect();
    let rows = p_abs.matrix().select(&kept, &all)?;
    let g = g4.select(&kept, &kept)?;
    let r = rows.mul(m.r())?;
    let unchanged_rows = rows == TransferMatrix::identity(n).select(&kept, &all)?;
    let noise = if unchanged_rows && kept.len() == n {
        m.noise().clone()
    } else {
        NoiseRep::generalized(rows.mul(m.noise().f())?, m.noise().lambda().clone())?
    };
    let labels = crate::network::Labels {
        nodes: kept.iter().map(|&i| m.node_label(i).to_string()).collect(),
        signals: m.labels().signals.clone(),
    };
    let abstracted = NetworkModel::new(g, r, noise, Some(labels))?;
    let report = build_report(&abstracted, p, m, indirect);
    Ok(AbstractionResult { abstracted, p_abs, g4, partition: p.clone(), report })
}

fn build_report(a: &NetworkModel, p: &Partition, m: &NetworkModel, indirect: bool) -> AbstractionReport {
    let mut non_proper = Vec::new();
    for (i, j) in a.g().support() {
        if !a.g().get(i, j).is_proper() {
            non_proper.push(format!("G[{},{}]", a.node_label(i), a.node_label(j)));
        }
    }
    for (i, j) in a.r().support() {
        if !a.r().get(i, j).is_proper() {
            non_proper.push(format!("R[{},{}]", a.node_label(i), a.labels().signals[j]));
        }
    }
    AbstractionReport {
        partition: p.with_labels(m.labels()),
        possibly_non_proper: !p.l_set().is_empty(),
        non_proper_entries: non_proper,
        indirect_observations: indirect,
        max_degree: a.g().max_degree().max(a.r().max_degree()).max(a.noise().f().max_degree()),
    }
}

/// Keeps `keep` and eliminates every other node.
pub fn immersion(m: &NetworkModel, keep: &[usize]) -> Result<AbstractionResult> {
    if keep.is_empty() {
        return Err(Error::InvalidPartition("immersion needs at least one kept node".into()));
    }
    abstract_by_transformation(m, &Partition::immersion(m.node_count(), keep)?)
}
