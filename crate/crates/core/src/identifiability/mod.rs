//! Block-structure checks for identifying modules of an abstracted network.
//!
//! Patterns are tracked per block of the node partition `(S̃, L, V, Z̃)` with
//! entries `0`, `D` (diagonal) and `*` (arbitrary).

mod pattern;

pub use pattern::{has_leading_diagonal, pattern_add, pattern_mul, pattern_of, BlockPattern, StructurePattern};

use serde::Serialize;

use crate::abstraction::Partition;
use crate::error::{Error, Result};
use crate::network::{ClauseResult, NetworkModel};
use crate::ratfun::TransferMatrix;

use BlockPattern::{Diag, Star, Zero};

/// Pass/fail per identifiability condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub clauses: Vec<ClauseResult>,
}

impl ConditionReport {
    pub fn all_passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.name == name)
    }
}

fn clause(name: &str, failures: Vec<String>) -> ClauseResult {
    ClauseResult {
        name: name.into(),
        passed: failures.is_empty(),
        detail: (!failures.is_empty()).then(|| failures.join("; ")),
    }
}

/// Diagonal with every diagonal entry nonzero.
fn check_diagonal(m: &TransferMatrix, rows: &[usize], cols: &[usize], what: &str, out: &mut Vec<String>) {
    if rows.len() != cols.len() {
        out.push(format!("{what} is {}x{}, not square", rows.len(), cols.len()));
        return;
    }
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            let zero = m.get(i, j).is_zero();
            if a == b && zero {
                out.push(format!("{what} has a zero diagonal entry at ({}, {})", i + 1, j + 1));
            } else if a != b && !zero {
                out.push(format!("{what} has an off-diagonal entry at ({}, {})", i + 1, j + 1));
            }
        }
    }
}

fn check_zero(m: &TransferMatrix, rows: &[usize], cols: &[usize], what: &str, out: &mut Vec<String>) {
    for &i in rows {
        for &j in cols {
            if !m.get(i, j).is_zero() {
                out.push(format!("{what} is nonzero at ({}, {})", i + 1, j + 1));
            }
        }
    }
}

/// Excitation columns `cols` reach only the rows `cols` themselves, diagonally.
fn check_excitation(m: &TransferMatrix, cols: &[usize], name: &str, out: &mut Vec<String>) {
    check_diagonal(m, cols, cols, &format!("{name} block"), out);
    let others: Vec<usize> = (0..m.rows()).filter(|i| !cols.contains(i)).collect();
    check_zero(m, &others, cols, &format!("{name} columns outside their nodes"), out);
}

/// The three sufficient conditions for the abstracted external excitation
/// to carry the structure needed for identification:
///
/// * `excitation_s`: `R` restricted to `S̃` is diagonal and `r_S̃` enters only `w_S̃`;
/// * `excitation_v`: the same for `V`;
/// * `module_structure`: `G_LV` diagonal and `G_LZ̃`, `G_VV`, `G_VZ̃` zero.
///
/// The first two need `R` indexed like the nodes (`K = L`); otherwise they fail.
pub fn check_prop4(m: &NetworkModel, p: &Partition) -> Result<ConditionReport> {
    if p.node_count() != m.node_count() {
        return Err(Error::DimensionMismatch("partition and model sizes differ".into()));
    }
    let [s, l, v, z] = p.blocks();
    let (g, r) = (m.g(), m.r());
    let square_r = r.cols() == m.node_count();

    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    if square_r {
        check_excitation(r, s, "R_S~S~", &mut c1);
        check_excitation(r, v, "R_VV", &mut c2);
    } else {
        let msg = format!("R has {} columns, not one per node", r.cols());
        c1.push(msg.clone());
        c2.push(msg);
    }

    let mut c3 = Vec::new();
    check_diagonal(g, l, v, "G_LV", &mut c3);
    check_zero(g, l, z, "G_LZ~", &mut c3);
    check_zero(g, v, v, "G_VV", &mut c3);
    check_zero(g, v, z, "G_VZ~", &mut c3);

    Ok(ConditionReport {
        clauses: vec![clause("excitation_s", c1), clause("excitation_v", c2), clause("module_structure", c3)],
    })
}

fn block_sizes(p: &Partition) -> [usize; 4] {
    p.blocks().map(|b| b.len())
}

/// Pattern of the kept rows `[I 0]·P4·P3·P2·P1` over the node blocks,
/// derived from the block patterns of `G`.
pub fn abstraction_pattern(g: &TransferMatrix, p: &Partition) -> Result<StructurePattern> {
    let blocks = p.blocks();
    let sizes = block_sizes(p);
    let gp = pattern_of(g, &blocks, &blocks);
    let (s_, l_, v_, z_) = (0, 1, 2, 3);

    let q = gp.get(z_, z_).inverse_of_identity_minus();
    // G1_XY = G_XY + G_XZ̃ Q G_Z̃Y for X, Y among S̃, L, V.
    let g1 = |x: usize, y: usize| gp.get(x, y).add(gp.get(x, z_).mul(q).mul(gp.get(z_, y)));
    let gain = g1(l_, v_).mul(g1(v_, v_).inverse_of_identity_minus());
    let y_inv = g1(l_, v_).left_inverse();

    let build = |rows: [[BlockPattern; 4]; 4]| {
        StructurePattern::new(sizes.to_vec(), sizes.to_vec(), rows.iter().flatten().copied().collect())
    };
    let p1 = build([
        [Diag, Zero, Zero, gp.get(s_, z_).mul(q)],
        [Zero, Diag, Zero, gp.get(l_, z_).mul(q)],
        [Zero, Zero, Diag, gp.get(v_, z_).mul(q)],
        [Zero, Zero, Zero, q],
    ])?;
    let p2 = build([
        [Diag, Zero, Zero, Zero],
        [Zero, Diag, gain, Zero],
        [Zero, y_inv, Zero, Zero],
        [Zero, Zero, Zero, Diag],
    ])?;
    let p3 = build([
        [Diag, Zero, g1(s_, v_), Zero],
        [Zero, Diag, Zero, Zero],
        [Zero, Zero, Diag, Zero],
        [Zero, Zero, q.mul(gp.get(z_, v_)), Diag],
    ])?;
    let p4 = StructurePattern::identity(&sizes);
    let full = pattern_mul(&p4, &pattern_mul(&p3, &pattern_mul(&p2, &p1)?)?)?;
    Ok(full.block_row_range(0..2))
}

/// Column blocks of an excitation matrix: the node blocks when it has one
/// column per node, a single block otherwise.
fn excitation_pattern(x: &TransferMatrix, p: &Partition) -> StructurePattern {
    let blocks = p.blocks();
    if x.cols() == p.node_count() {
        pattern_of(x, &blocks, &blocks)
    } else {
        let all: Vec<usize> = (0..x.cols()).collect();
        pattern_of(x, &blocks, &[&all])
    }
}

/// Predicted pattern of the abstracted `R` over rows `(S̃, L)`.
pub fn r_check_structure(m: &NetworkModel, p: &Partition) -> Result<StructurePattern> {
    pattern_mul(&abstraction_pattern(m.g(), p)?, &excitation_pattern(m.r(), p))
}

/// Predicted pattern of the abstracted noise filter over rows `(S̃, L)`.
pub fn v_check_structure(m: &NetworkModel, p: &Partition) -> Result<StructurePattern> {
    pattern_mul(&abstraction_pattern(m.g(), p)?, &excitation_pattern(m.noise().f(), p))
}

/// Target pattern `[D * 0 *; 0 * D *]` over rows `(S̃, L)` and node column blocks.
pub fn identifiability_template(p: &Partition) -> Result<StructurePattern> {
    let sizes = block_sizes(p);
    StructurePattern::from_rows(&sizes[..2], &sizes, &[&[Diag, Star, Zero, Star], &[Zero, Star, Diag, Star]])
}

/// Block pattern of an abstracted matrix whose rows are ordered `S̃` then `L`.
pub fn abstracted_pattern(x: &TransferMatrix, p: &Partition) -> Result<StructurePattern> {
    let (s, l) = (p.s_tilde().len(), p.l_set().len());
    if x.rows() != s + l {
        return Err(Error::DimensionMismatch(format!("{} rows, expected {}", x.rows(), s + l)));
    }
    let rs: Vec<usize> = (0..s).collect();
    let rl: Vec<usize> = (s..s + l).collect();
    let rows: [&[usize]; 2] = [&rs, &rl];
    if x.cols() == p.node_count() {
        Ok(pattern_of(x, &rows, &p.blocks()))
    } else {
        let all: Vec<usize> = (0..x.cols()).collect();
        Ok(pattern_of(x, &rows, &[&all]))
    }
}
