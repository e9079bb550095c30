use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use super::polynomial::Polynomial;
use super::rational::RationalFunction;
use crate::error::{Error, Result};

/// Entry degree above which products and inverses abort.
pub const DEFAULT_DEGREE_CEILING: usize = 64;

/// Relative singular-value threshold used by numeric rank.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Dense row-major matrix of rational functions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TransferMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<RationalFunction>,
}

impl TransferMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<RationalFunction>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![RationalFunction::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { RationalFunction::one() } else { RationalFunction::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> RationalFunction) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn diagonal(diag: Vec<RationalFunction>) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.into_iter().enumerate() {
            m.entries[i * n + i] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalFunction {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RationalFunction) {
        self.entries[i * self.cols + j] = v;
    }

    /// Writes `block` at the given row and column positions.
    pub fn set_block(&mut self, rows: &[usize], cols: &[usize], block: &TransferMatrix) {
        debug_assert_eq!(block.shape(), (rows.len(), cols.len()));
        for (bi, &i) in rows.iter().enumerate() {
            for (bj, &j) in cols.iter().enumerate() {
                self.set(i, j, block.get(bi, bj).clone());
            }
        }
    }

    pub fn entries(&self) -> &[RationalFunction] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[RationalFunction] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RationalFunction::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j { e.is_one() } else { e.is_zero() }
                })
            })
    }

    /// Square with an identically zero diagonal.
    pub fn is_hollow(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| self.get(i, i).is_zero())
    }

    pub fn max_degree(&self) -> usize {
        self.entries.iter().map(RationalFunction::degree).max().unwrap_or(0)
    }

    fn check_degree(self, ceiling: usize) -> Result<Self> {
        let degree = self.max_degree();
        if degree > ceiling {
            Err(Error::DegreeOverflow { degree, ceiling })
        } else {
            Ok(self)
        }
    }

    fn same_shape(&self, rhs: &Self, op: &str) -> Result<()> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch(format!(
                "{op}: {:?} vs {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.same_shape(rhs, "add")?;
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.same_shape(rhs, "sub")?;
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn neg(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.mul_with_ceiling(rhs, DEFAULT_DEGREE_CEILING)
    }

    pub fn mul_with_ceiling(&self, rhs: &Self, ceiling: usize) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "mul: {:?} times {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * rhs.cols + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        out.check_degree(ceiling)
    }

    /// `I − self`
    pub fn identity_minus(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("I - M needs a square matrix".into()));
        }
        Self::identity(self.rows).sub(self)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn hstack(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack: {} rows vs {} rows",
                self.rows, rhs.rows
            )));
        }
        Ok(Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols { self.get(i, j).clone() } else { rhs.get(i, j - self.cols).clone() }
        }))
    }

    pub fn vstack(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack: {} cols vs {} cols",
                self.cols, rhs.cols
            )));
        }
        Ok(Self::from_fn(self.rows + rhs.rows, self.cols, |i, j| {
            if i < self.rows { self.get(i, j).clone() } else { rhs.get(i - self.rows, j).clone() }
        }))
    }

    /// Submatrix with the given row and column indices, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if let Some(&r) = rows.iter().find(|&&r| r >= self.rows) {
            return Err(Error::DimensionMismatch(format!("row index {r} out of range")));
        }
        if let Some(&c) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::DimensionMismatch(format!("column index {c} out of range")));
        }
        Ok(Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone()))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.select(rows, &cols)
    }

    /// Clears denominators row by row: returns the polynomial matrix `N` and
    /// row multipliers `l` with `N = diag(l)·self`.
    fn polynomial_rows(&self) -> (Vec<Vec<Polynomial>>, Vec<Polynomial>) {
        let mut lcms = Vec::with_capacity(self.rows);
        let mut rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut l = Polynomial::one();
            for e in self.row(i) {
                if e.is_zero() || e.den().is_one() {
                    continue;
                }
                let g = Polynomial::gcd(&l, e.den());
                l = &l * &e.den().exact_div(&g);
            }
            let row = self
                .row(i)
                .iter()
                .map(|e| if e.is_zero() { Polynomial::zero() } else { e.num() * &l.exact_div(e.den()) })
                .collect();
            rows.push(row);
            lcms.push(l);
        }
        (rows, lcms)
    }

    /// Fraction-free (Bareiss) forward elimination on `a`, whose first `n`
    /// columns form the square part. Returns the sign of the row permutation
    /// and the final pivot, or `None` when singular.
    fn bareiss_forward(a: &mut [Vec<Polynomial>], n: usize) -> Option<(bool, Polynomial)> {
        let width = a.first().map_or(0, Vec::len);
        let mut prev = Polynomial::one();
        let mut negated = false;
        for k in 0..n {
            let pivot = (k..n)
                .filter(|&i| !a[i][k].is_zero())
                .min_by_key(|&i| (a[i][k].degree(), a[i][k].coeffs().len()))?;
            if pivot != k {
                a.swap(pivot, k);
                negated = !negated;
            }
            for i in k + 1..n {
                let factor = a[i][k].clone();
                for j in k + 1..width {
                    let lhs = &a[k][k] * &a[i][j];
                    let v = if factor.is_zero() { lhs } else { &lhs - &(&factor * &a[k][j]) };
                    a[i][j] = v.exact_div(&prev);
                }
                a[i][k] = Polynomial::zero();
            }
            prev = a[k][k].clone();
        }
        Some((negated, prev))
    }

    pub fn determinant(&self) -> Result<RationalFunction> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        if self.rows == 0 {
            return Ok(RationalFunction::one());
        }
        let (mut a, lcms) = self.polynomial_rows();
        let Some((negated, det)) = Self::bareiss_forward(&mut a, self.rows) else {
            return Ok(RationalFunction::zero());
        };
        let scale = lcms.iter().fold(Polynomial::one(), |acc, l| &acc * l);
        let det = if negated { -&det } else { det };
        RationalFunction::new(det, scale)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with_ceiling(DEFAULT_DEGREE_CEILING)
    }

    /// Exact inverse by fraction-free Gauss elimination over the polynomial
    /// ring after clearing row denominators.
    pub fn inverse_with_ceiling(&self, ceiling: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Self::zeros(0, 0));
        }
        if n == 1 {
            let inv = self.get(0, 0).inv().map_err(|_| Error::SingularMatrix)?;
            return Self::new(1, 1, vec![inv])?.check_degree(ceiling);
        }
        let (rows, lcms) = self.polynomial_rows();
        let mut a: Vec<Vec<Polynomial>> = rows
            .into_iter()
            .enumerate()
            .map(|(i, mut r)| {
                r.extend((0..n).map(|j| if i == j { Polynomial::one() } else { Polynomial::zero() }));
                r
            })
            .collect();
        let (_, det) = Self::bareiss_forward(&mut a, n).ok_or(Error::SingularMatrix)?;

        // Back substitution for det·N⁻¹, which is a polynomial matrix.
        let mut x = vec![vec![Polynomial::zero(); n]; n];
        for c in 0..n {
            for i in (0..n).rev() {
                let mut s = &det * &a[i][n + c];
                for j in i + 1..n {
                    if !a[i][j].is_zero() && !x[j][c].is_zero() {
                        s = &s - &(&a[i][j] * &x[j][c]);
                    }
                }
                x[i][c] = s.exact_div(&a[i][i]);
            }
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for c in 0..n {
                if !x[i][c].is_zero() {
                    out.set(i, c, RationalFunction::new(&x[i][c] * &lcms[c], det.clone())?);
                }
            }
        }
        out.check_degree(ceiling)
    }

    /// Gram left-inverse `(MᵀM)⁻¹Mᵀ`; plain inverse for square input.
    pub fn left_inverse(&self) -> Result<Self> {
        if self.rows < self.cols {
            return Err(Error::RankDeficient);
        }
        let remap = |e: Error| if e == Error::SingularMatrix { Error::RankDeficient } else { e };
        if self.is_square() {
            return self.inverse().map_err(remap);
        }
        let t = self.transpose();
        let gram = t.mul(self)?;
        gram.inverse().map_err(remap)?.mul(&t)
    }

    /// Entrywise evaluation at `q = z`.
    pub fn eval_at(&self, z: Complex64) -> Result<DMatrix<Complex64>> {
        let mut out = DMatrix::<Complex64>::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                if !e.is_zero() {
                    out[(i, j)] = e.eval(z)?;
                }
            }
        }
        Ok(out)
    }

    /// Exact test of `det ≢ 0`. A nonsingular specialization at a rational
    /// point settles it; the symbolic determinant is the fallback.
    pub fn is_nonsingular(&self) -> Result<bool> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("nonsingularity of a non-square matrix".into()));
        }
        let n = self.rows;
        for (a, b) in [(1, 2), (-2, 3), (3, 7), (-5, 11), (7, 13)] {
            let x = BigRational::new(a.into(), b.into());
            let Some(mut rows) = (0..n)
                .map(|i| (0..n).map(|j| self.get(i, j).eval_exact(&x)).collect::<Option<Vec<_>>>())
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            if exact_rank(&mut rows) == n {
                return Ok(true);
            }
        }
        Ok(!self.determinant()?.is_zero())
    }

    /// Maximum numeric rank over the evaluation points; the generic rank with
    /// probability one for random points.
    pub fn rank_at(&self, points: &[Complex64]) -> Result<usize> {
        let mut best = 0;
        for &z in points {
            best = best.max(numeric_rank(&self.eval_at(z)?));
            if best == self.rows.min(self.cols) {
                break;
            }
        }
        Ok(best)
    }

    /// `Σ |entry|` style summary used in reports: sorted list of nonzero positions.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.get(i, j).is_zero() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Constant matrix from exact rationals.
    pub fn from_constants(rows: usize, cols: usize, values: &[BigRational]) -> Result<Self> {
        Self::new(rows, cols, values.iter().cloned().map(RationalFunction::constant).collect())
    }

    pub fn one_at(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.set(i, j, RationalFunction::one());
        m
    }
}

/// Count of singular values above `1e-8` times the largest.
/// Rank of a constant matrix by fraction-exact elimination.
fn exact_rank(rows: &mut [Vec<BigRational>]) -> usize {
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

pub fn numeric_rank(m: &DMatrix<Complex64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let largest = sv.iter().copied().fold(0.0_f64, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOLERANCE * largest).count()
}

impl fmt::Debug for TransferMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TransferMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for TransferMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: i64) -> RationalFunction {
        RationalFunction::from(v)
    }

    fn d(coef: i64, den: i64, k: usize) -> RationalFunction {
        RationalFunction::delay(BigRational::new(coef.into(), den.into()), k)
    }

    #[test]
    fn identity_is_neutral() {
        let m = TransferMatrix::from_fn(3, 3, |i, j| d(i as i64 + 1, j as i64 + 2, 1));
        assert_eq!(TransferMatrix::identity(3).mul(&m).unwrap(), m);
        assert_eq!(m.mul(&TransferMatrix::identity(3)).unwrap(), m);
    }

    #[test]
    fn inverse_of_identity() {
        assert!(TransferMatrix::identity(4).inverse().unwrap().is_identity());
    }

    #[test]
    fn two_node_loop_inverse_has_sensitivity() {
        // [[1, -a], [-b, 1]]^{-1} has (0,0) entry 1 / (1 - ab)
        let (a, b) = (d(1, 2, 1), d(1, 3, 1));
        let m = TransferMatrix::new(2, 2, vec![c(1), -&a, -&b, c(1)]).unwrap();
        let inv = m.inverse().unwrap();
        let s = (&RationalFunction::one() - &(&a * &b)).inv().unwrap();
        assert_eq!(inv.get(0, 0), &s);
        assert_eq!(inv.get(0, 1), &(&a * &s));
        assert!(m.mul(&inv).unwrap().is_identity());
    }

    #[test]
    fn singular_matrix_detected() {
        let m = TransferMatrix::new(2, 2, vec![c(1), c(-1), c(-1), c(1)]).unwrap();
        assert_eq!(m.inverse(), Err(Error::SingularMatrix));
        assert!(m.determinant().unwrap().is_zero());
        assert!(!m.is_nonsingular().unwrap());
    }

    #[test]
    fn nonsingularity_agrees_with_determinant() {
        let (a, b) = (d(1, 2, 1), d(1, 3, 1));
        let m = TransferMatrix::new(2, 2, vec![c(1), -&a, -&b, c(1)]).unwrap();
        assert!(m.is_nonsingular().unwrap());
        // rank one for every q but with entries that vanish at no test point
        let r = TransferMatrix::new(2, 2, vec![a.clone(), &a * &b, c(2), &b * &c(2)]).unwrap();
        assert!(r.determinant().unwrap().is_zero());
        assert!(!r.is_nonsingular().unwrap());
    }

    #[test]
    fn left_inverse_of_column() {
        let g = d(2, 5, 1);
        let m = TransferMatrix::new(2, 1, vec![g.clone(), RationalFunction::zero()]).unwrap();
        let li = m.left_inverse().unwrap();
        assert_eq!(li.get(0, 0), &g.inv().unwrap());
        assert!(li.get(0, 1).is_zero());
        assert!(li.mul(&m).unwrap().is_identity());
    }

    #[test]
    fn left_inverse_rank_deficient() {
        let m = TransferMatrix::zeros(3, 2);
        assert_eq!(m.left_inverse(), Err(Error::RankDeficient));
        assert_eq!(TransferMatrix::zeros(1, 2).left_inverse(), Err(Error::RankDeficient));
    }

    #[test]
    fn dimension_checks() {
        let a = TransferMatrix::zeros(2, 3);
        assert!(matches!(a.mul(&a), Err(Error::DimensionMismatch(_))));
        assert!(matches!(a.add(&TransferMatrix::zeros(3, 2)), Err(Error::DimensionMismatch(_))));
        assert!(matches!(a.select(&[2], &[0]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn degree_ceiling_aborts() {
        let m = TransferMatrix::new(1, 1, vec![d(1, 1, 40)]).unwrap();
        assert!(matches!(m.mul(&m), Err(Error::DegreeOverflow { degree: 80, ceiling: 64 })));
        assert!(m.mul_with_ceiling(&m, 100).is_ok());
    }

    #[test]
    fn zero_matrix_rank() {
        let pts = [Complex64::new(0.0, 1.0)];
        assert_eq!(TransferMatrix::zeros(3, 3).rank_at(&pts).unwrap(), 0);
        assert_eq!(TransferMatrix::identity(3).rank_at(&pts).unwrap(), 3);
    }

    #[test]
    fn determinant_of_triangular() {
        let m = TransferMatrix::new(2, 2, vec![d(1, 2, 0), d(7, 1, 3), c(0), d(3, 1, 1)]).unwrap();
        assert_eq!(m.determinant().unwrap(), d(3, 2, 1));
    }
}
