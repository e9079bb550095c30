//! Oracles that avoid the library code paths they check.

#![allow(dead_code)]

use std::collections::BTreeSet;

use dynnet::abstraction::Partition;
use dynnet::graph::{is_feasible_selection, StructuralGraph};
use dynnet::ratfun::{Polynomial, RationalFunction, TransferMatrix};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn eval_poly(p: &Polynomial, x: &BigRational) -> BigRational {
    p.coeffs().iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Exact value at `q⁻¹ = x`, `None` at a pole.
pub fn eval_exact(f: &RationalFunction, x: &BigRational) -> Option<BigRational> {
    let d = eval_poly(f.den(), x);
    (!d.is_zero()).then(|| eval_poly(f.num(), x) / d)
}

/// Rank of a rational matrix by fraction Gaussian elimination.
pub fn exact_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        for r in rank + 1..rows.len() {
            if rows[r][c].is_zero() {
                continue;
            }
            let f = &rows[r][c] / &rows[rank][c];
            for k in c..ncols {
                let delta = &f * &rows[rank][k];
                rows[r][k] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

/// Largest exact rank over several random rational specializations of `q⁻¹`.
pub fn generic_rank_exact<R: Rng>(m: &TransferMatrix, rng: &mut R) -> usize {
    let mut best = 0;
    for _ in 0..6 {
        let x = q(rng.gen_range(-97..=97), rng.gen_range(50..=113));
        let rows: Option<Vec<Vec<BigRational>>> =
            (0..m.rows()).map(|i| (0..m.cols()).map(|j| eval_exact(m.get(i, j), &x)).collect()).collect();
        if let Some(rows) = rows {
            best = best.max(exact_rank(rows));
        }
    }
    best
}

/// Removes nodes one at a time by scalar substitution, normalising any
/// self-loop that appears. Returns the module and input matrices over `keep`.
pub fn kron_immersion(g: &TransferMatrix, r: &TransferMatrix, keep: &[usize]) -> (TransferMatrix, TransferMatrix) {
    let n = g.rows();
    let mut g: Vec<Vec<RationalFunction>> = (0..n).map(|i| g.row(i).to_vec()).collect();
    let mut r: Vec<Vec<RationalFunction>> = (0..n).map(|i| r.row(i).to_vec()).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    for z in (0..n).filter(|z| !keep.contains(z)) {
        alive.retain(|&a| a != z);
        // w_z = Σ G_zj w_j + R_z r, with G_zz already normalised away
        for &i in &alive {
            let gz = g[i][z].clone();
            if gz.is_zero() {
                continue;
            }
            for &j in &alive {
                let add = &gz * &g[z][j];
                g[i][j] = &g[i][j] + &add;
            }
            for k in 0..r[i].len() {
                let add = &gz * &r[z][k];
                r[i][k] = &r[i][k] + &add;
            }
            g[i][z] = RationalFunction::zero();
        }
        for &i in &alive {
            if g[i][i].is_zero() {
                continue;
            }
            let scale = (&RationalFunction::one() - &g[i][i]).inv().expect("self-loop can be removed");
            g[i][i] = RationalFunction::zero();
            for j in 0..n {
                g[i][j] = &g[i][j] * &scale;
            }
            for k in 0..r[i].len() {
                r[i][k] = &r[i][k] * &scale;
            }
        }
    }
    let kc = r.first().map_or(0, Vec::len);
    let gk = TransferMatrix::from_fn(keep.len(), keep.len(), |a, b| g[keep[a]][keep[b]].clone());
    let rk = TransferMatrix::from_fn(keep.len(), kc, |a, b| r[keep[a]][b].clone());
    (gk, rk)
}

/// Every class assignment consistent with `measurable`, reduced to the
/// inclusion-minimal measured sets `S̃ ∪ L` that admit a feasible partition.
pub fn brute_force_minimal_sets(g: &StructuralGraph, i: usize, j: usize, measurable: &[usize]) -> BTreeSet<BTreeSet<usize>> {
    let n = g.node_count();
    let others: Vec<usize> = (0..n).filter(|&k| k != i && k != j).collect();
    let mut feasible: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let total = 4usize.pow(others.len() as u32);
    for code in 0..total {
        let (mut s, mut l, mut v, mut z) = (vec![i, j], vec![], vec![], vec![]);
        let mut c = code;
        let mut ok = true;
        for &k in &others {
            match c % 4 {
                0 => s.push(k),
                1 => l.push(k),
                2 => v.push(k),
                _ => z.push(k),
            }
            if c % 4 < 2 && !measurable.contains(&k) {
                ok = false;
            }
            c /= 4;
        }
        if !ok {
            continue;
        }
        let Ok(p) = Partition::new(n, &s, &l, &v, &z) else { continue };
        if is_feasible_selection(g, i, j, &p) {
            feasible.insert(s.iter().chain(&l).copied().collect());
        }
    }
    feasible.iter().filter(|m| !feasible.iter().any(|o| o != *m && o.is_subset(m))).cloned().collect()
}

pub fn one() -> BigRational {
    BigRational::one()
}
