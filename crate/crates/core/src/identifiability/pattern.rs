use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratfun::TransferMatrix;

/// Structure of one block. Ordered as a lattice: `Zero ≤ Diag ≤ Star`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BlockPattern {
    Zero,
    /// Square, zero off the diagonal, diagonal generically nonzero.
    Diag,
    Star,
}

impl BlockPattern {
    pub fn symbol(self) -> char {
        match self {
            BlockPattern::Zero => '0',
            BlockPattern::Diag => 'D',
            BlockPattern::Star => '*',
        }
    }

    pub fn mul(self, rhs: Self) -> Self {
        use BlockPattern::*;
        match (self, rhs) {
            (Zero, _) | (_, Zero) => Zero,
            (Diag, Diag) => Diag,
            _ => Star,
        }
    }

    pub fn add(self, rhs: Self) -> Self {
        use BlockPattern::*;
        match (self, rhs) {
            (Zero, x) | (x, Zero) => x,
            (Diag, Diag) => Diag,
            _ => Star,
        }
    }

    /// Pattern of `(I − A)⁻¹` for a square block `A`.
    pub fn inverse_of_identity_minus(self) -> Self {
        match self {
            BlockPattern::Zero | BlockPattern::Diag => BlockPattern::Diag,
            BlockPattern::Star => BlockPattern::Star,
        }
    }

    /// Pattern of a left inverse of a block with full column rank.
    pub fn left_inverse(self) -> Self {
        match self {
            BlockPattern::Diag => BlockPattern::Diag,
            _ => BlockPattern::Star,
        }
    }
}

/// Block grid of `BlockPattern`s with explicit block sizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructurePattern {
    row_sizes: Vec<usize>,
    col_sizes: Vec<usize>,
    blocks: Vec<BlockPattern>,
}

impl StructurePattern {
    /// Empty blocks are stored as `Zero`; `Diag` on a non-square block is rejected.
    pub fn new(row_sizes: Vec<usize>, col_sizes: Vec<usize>, mut blocks: Vec<BlockPattern>) -> Result<Self> {
        if blocks.len() != row_sizes.len() * col_sizes.len() {
            return Err(Error::DimensionMismatch("block count does not match the block grid".into()));
        }
        for (bi, &r) in row_sizes.iter().enumerate() {
            for (bj, &c) in col_sizes.iter().enumerate() {
                let b = &mut blocks[bi * col_sizes.len() + bj];
                if r == 0 || c == 0 {
                    *b = BlockPattern::Zero;
                } else if *b == BlockPattern::Diag && r != c {
                    return Err(Error::DimensionMismatch(format!("diagonal pattern on a {r}x{c} block")));
                }
            }
        }
        Ok(Self { row_sizes, col_sizes, blocks })
    }

    /// Builds from rows of blocks.
    pub fn from_rows(row_sizes: &[usize], col_sizes: &[usize], rows: &[&[BlockPattern]]) -> Result<Self> {
        Self::new(row_sizes.to_vec(), col_sizes.to_vec(), rows.iter().flat_map(|r| r.iter().copied()).collect())
    }

    /// Block-diagonal `Diag` pattern of an identity with the given block sizes.
    pub fn identity(sizes: &[usize]) -> Self {
        let k = sizes.len();
        let blocks = (0..k * k).map(|t| if t / k == t % k { BlockPattern::Diag } else { BlockPattern::Zero }).collect();
        Self::new(sizes.to_vec(), sizes.to_vec(), blocks).expect("square diagonal blocks")
    }

    /// One block per entry: nonzero entries become `Diag` 1x1 blocks.
    pub fn elementwise(m: &TransferMatrix) -> Self {
        let blocks = m
            .entries()
            .iter()
            .map(|e| if e.is_zero() { BlockPattern::Zero } else { BlockPattern::Diag })
            .collect();
        Self { row_sizes: vec![1; m.rows()], col_sizes: vec![1; m.cols()], blocks }
    }

    pub fn row_sizes(&self) -> &[usize] {
        &self.row_sizes
    }

    pub fn col_sizes(&self) -> &[usize] {
        &self.col_sizes
    }

    pub fn block_rows(&self) -> usize {
        self.row_sizes.len()
    }

    pub fn block_cols(&self) -> usize {
        self.col_sizes.len()
    }

    pub fn get(&self, bi: usize, bj: usize) -> BlockPattern {
        self.blocks[bi * self.col_sizes.len() + bj]
    }

    pub fn set(&mut self, bi: usize, bj: usize, b: BlockPattern) -> Result<()> {
        let (r, c) = (self.row_sizes[bi], self.col_sizes[bj]);
        let b = if r == 0 || c == 0 { BlockPattern::Zero } else { b };
        if b == BlockPattern::Diag && r != c {
            return Err(Error::DimensionMismatch(format!("diagonal pattern on a {r}x{c} block")));
        }
        let n = self.col_sizes.len();
        self.blocks[bi * n + bj] = b;
        Ok(())
    }

    /// Element count of the rows and columns.
    pub fn shape(&self) -> (usize, usize) {
        (self.row_sizes.iter().sum(), self.col_sizes.iter().sum())
    }

    /// Sub-grid of whole block rows.
    pub fn block_row_range(&self, rows: std::ops::Range<usize>) -> Self {
        let n = self.col_sizes.len();
        Self {
            row_sizes: self.row_sizes[rows.clone()].to_vec(),
            col_sizes: self.col_sizes.clone(),
            blocks: self.blocks[rows.start * n..rows.end * n].to_vec(),
        }
    }

    /// Entry-level structural nonzeros.
    pub fn expand(&self) -> Vec<Vec<bool>> {
        let (rows, cols) = self.shape();
        let mut out = vec![vec![false; cols]; rows];
        let mut r0 = 0;
        for (bi, &r) in self.row_sizes.iter().enumerate() {
            let mut c0 = 0;
            for (bj, &c) in self.col_sizes.iter().enumerate() {
                match self.get(bi, bj) {
                    BlockPattern::Zero => {}
                    BlockPattern::Diag => (0..r).for_each(|k| out[r0 + k][c0 + k] = true),
                    BlockPattern::Star => {
                        (0..r).for_each(|a| (0..c).for_each(|b| out[r0 + a][c0 + b] = true));
                    }
                }
                c0 += c;
            }
            r0 += r;
        }
        out
    }

    /// Every block lies below the template block in the lattice.
    pub fn conforms_to(&self, template: &Self) -> bool {
        self.row_sizes == template.row_sizes
            && self.col_sizes == template.col_sizes
            && self.blocks.iter().zip(&template.blocks).all(|(a, b)| a <= b)
    }

    /// Multi-line grid using `0`, `D` and `*`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for bi in 0..self.block_rows() {
            let row: Vec<String> = (0..self.block_cols()).map(|bj| self.get(bi, bj).symbol().to_string()).collect();
            s.push('[');
            s.push_str(&row.join(" "));
            s.push_str("]\n");
        }
        s
    }
}

impl fmt::Display for StructurePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Classifies each block of `m` cut out by the given row and column index sets.
pub fn pattern_of(m: &TransferMatrix, row_blocks: &[&[usize]], col_blocks: &[&[usize]]) -> StructurePattern {
    let mut blocks = Vec::with_capacity(row_blocks.len() * col_blocks.len());
    for rows in row_blocks {
        for cols in col_blocks {
            let nonzero = |a: usize, b: usize| !m.get(rows[a], cols[b]).is_zero();
            let any = (0..rows.len()).any(|a| (0..cols.len()).any(|b| nonzero(a, b)));
            let off_diag = (0..rows.len()).any(|a| (0..cols.len()).any(|b| a != b && nonzero(a, b)));
            blocks.push(if !any {
                BlockPattern::Zero
            } else if rows.len() == cols.len() && !off_diag {
                BlockPattern::Diag
            } else {
                BlockPattern::Star
            });
        }
    }
    StructurePattern {
        row_sizes: row_blocks.iter().map(|r| r.len()).collect(),
        col_sizes: col_blocks.iter().map(|c| c.len()).collect(),
        blocks,
    }
}

pub fn pattern_mul(a: &StructurePattern, b: &StructurePattern) -> Result<StructurePattern> {
    if a.col_sizes != b.row_sizes {
        return Err(Error::DimensionMismatch(format!(
            "pattern product with inner blocks {:?} vs {:?}",
            a.col_sizes, b.row_sizes
        )));
    }
    let mut blocks = Vec::with_capacity(a.block_rows() * b.block_cols());
    for i in 0..a.block_rows() {
        for j in 0..b.block_cols() {
            let mut acc = BlockPattern::Zero;
            for (k, &size) in a.col_sizes.iter().enumerate() {
                if size > 0 {
                    acc = acc.add(a.get(i, k).mul(b.get(k, j)));
                }
            }
            blocks.push(acc);
        }
    }
    StructurePattern::new(a.row_sizes.clone(), b.col_sizes.clone(), blocks)
}

pub fn pattern_add(a: &StructurePattern, b: &StructurePattern) -> Result<StructurePattern> {
    if a.row_sizes != b.row_sizes || a.col_sizes != b.col_sizes {
        return Err(Error::DimensionMismatch("pattern sum of different block grids".into()));
    }
    let blocks = a.blocks.iter().zip(&b.blocks).map(|(x, y)| x.add(*y)).collect();
    StructurePattern::new(a.row_sizes.clone(), a.col_sizes.clone(), blocks)
}

/// Whether some column permutation puts a diagonal leading block in front:
/// each row needs its own column in which it is the only structural nonzero.
pub fn has_leading_diagonal(pat: &StructurePattern) -> bool {
    let cells = pat.expand();
    let (rows, cols) = pat.shape();
    if rows > cols {
        return false;
    }
    // Columns private to one row; a row can be matched only to those.
    let mut owner: Vec<Option<usize>> = vec![None; cols];
    for (c, o) in owner.iter_mut().enumerate() {
        let hits: Vec<usize> = (0..rows).filter(|&r| cells[r][c]).collect();
        if hits.len() == 1 {
            *o = Some(hits[0]);
        }
    }
    let mut matched_col = vec![None::<usize>; cols];
    for r in 0..rows {
        let mut seen = vec![false; cols];
        if !augment(r, &cells, &owner, &mut matched_col, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(
    r: usize,
    cells: &[Vec<bool>],
    owner: &[Option<usize>],
    matched_col: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for c in 0..owner.len() {
        if owner[c] != Some(r) || !cells[r][c] || seen[c] {
            continue;
        }
        seen[c] = true;
        let free = match matched_col[c] {
            None => true,
            Some(other) => augment(other, cells, owner, matched_col, seen),
        };
        if free {
            matched_col[c] = Some(r);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::RationalFunction;
    use BlockPattern::*;

    #[test]
    fn algebra_tables() {
        assert_eq!(Diag.mul(Star), Star);
        assert_eq!(Diag.mul(Diag), Diag);
        assert_eq!(Zero.mul(Star), Zero);
        assert_eq!(Zero.add(Diag), Diag);
        assert_eq!(Diag.add(Star), Star);
    }

    #[test]
    fn block_product_from_the_proof() {
        let a = StructurePattern::from_rows(&[2, 2], &[2, 2], &[&[Diag, Zero], &[Zero, Diag]]).unwrap();
        let b = StructurePattern::from_rows(&[2, 2], &[2, 3], &[&[Diag, Star], &[Zero, Star]]).unwrap();
        let p = pattern_mul(&a, &b).unwrap();
        assert_eq!(p.render(), "[D *]\n[0 *]\n");
    }

    #[test]
    fn classification() {
        let id = TransferMatrix::identity(2);
        let all = [0usize, 1];
        assert_eq!(pattern_of(&id, &[&all], &[&all]).get(0, 0), Diag);
        assert_eq!(pattern_of(&TransferMatrix::zeros(2, 2), &[&all], &[&all]).get(0, 0), Zero);
        let dense = TransferMatrix::from_fn(2, 2, |_, _| RationalFunction::one());
        assert_eq!(pattern_of(&dense, &[&all], &[&all]).get(0, 0), Star);
    }

    #[test]
    fn leading_diagonal_cases() {
        assert!(has_leading_diagonal(&StructurePattern::identity(&[3])));
        let t = StructurePattern::from_rows(&[2, 1], &[2, 1, 1, 2], &[&[Diag, Star, Zero, Star], &[Zero, Star, Diag, Star]]).unwrap();
        assert!(has_leading_diagonal(&t));
        let zero_row = StructurePattern::from_rows(&[1, 1], &[1, 1], &[&[Diag, Zero], &[Zero, Zero]]).unwrap();
        assert!(!has_leading_diagonal(&zero_row));
        let shared = StructurePattern::from_rows(&[2], &[2], &[&[Star]]).unwrap();
        assert!(!has_leading_diagonal(&shared));
    }

    #[test]
    fn diag_only_on_square_blocks() {
        assert!(StructurePattern::from_rows(&[1], &[2], &[&[Diag]]).is_err());
        // empty blocks collapse to zero
        let p = StructurePattern::from_rows(&[0], &[2], &[&[Star]]).unwrap();
        assert_eq!(p.get(0, 0), Zero);
    }
}
