//! Equivalence transformations `G' = I − P(I−G)`, `R' = PR`, `F' = PF`.

use crate::error::{Error, Result};
use crate::network::{NetworkModel, NoiseRep};
use crate::ratfun::{RationalFunction, TransferMatrix};

/// Square rational matrix that pre-multiplies the network equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transformation {
    p: TransferMatrix,
}

impl Transformation {
    pub fn new(p: TransferMatrix) -> Result<Self> {
        if !p.is_square() {
            return Err(Error::InvalidTransformation(format!("P is {}x{}", p.rows(), p.cols())));
        }
        Ok(Self { p })
    }

    pub fn identity(n: usize) -> Self {
        Self { p: TransferMatrix::identity(n) }
    }

    pub fn matrix(&self) -> &TransferMatrix {
        &self.p
    }

    pub fn into_matrix(self) -> TransferMatrix {
        self.p
    }

    /// `self ∘ first`, i.e. the matrix product `self · first`.
    pub fn after(&self, first: &Transformation) -> Result<Self> {
        Self::new(self.p.mul(&first.p)?)
    }
}

/// `I − P(I−G)` without any validity check.
pub fn transformed_modules(g: &TransferMatrix, p: &TransferMatrix) -> Result<TransferMatrix> {
    TransferMatrix::identity(g.rows()).sub(&p.mul(&g.identity_minus()?)?)
}

/// Entry `(k, k)` of `P(I−G)`; the transformed matrix is hollow iff all are one.
fn transformed_diagonal_entry(g: &TransferMatrix, p: &TransferMatrix, k: usize) -> RationalFunction {
    let mut acc = p.get(k, k).clone();
    for j in (0..g.rows()).filter(|&j| !g.get(j, k).is_zero()) {
        acc = &acc - &(p.get(k, j) * g.get(j, k));
    }
    acc
}

/// `P` nonsingular and `I − P(I−G)` hollow, both decided exactly.
pub fn is_valid_transformation(p: &Transformation, m: &NetworkModel) -> bool {
    if p.matrix().rows() != m.node_count() {
        return false;
    }
    let hollow = (0..m.node_count()).all(|k| transformed_diagonal_entry(m.g(), p.matrix(), k).is_one());
    hollow && matches!(p.matrix().is_nonsingular(), Ok(true))
}

pub fn apply_transformation(m: &NetworkModel, p: &Transformation) -> Result<NetworkModel> {
    if p.matrix().rows() != m.node_count() {
        return Err(Error::DimensionMismatch(format!(
            "P is {0}x{0} for {1} nodes",
            p.matrix().rows(),
            m.node_count()
        )));
    }
    if !p.matrix().is_nonsingular()? {
        return Err(Error::InvalidTransformation("P is singular".into()));
    }
    let g = transformed_modules(m.g(), p.matrix())?;
    if let Some(i) = (0..g.rows()).find(|&i| !g.get(i, i).is_zero()) {
        return Err(Error::InvalidTransformation(format!(
            "transformed module matrix has a self-loop at {}",
            m.node_label(i)
        )));
    }
    let r = p.matrix().mul(m.r())?;
    let f = p.matrix().mul(m.noise().f())?;
    let noise = if p.matrix().is_identity() {
        m.noise().clone()
    } else {
        NoiseRep::generalized(f, m.noise().lambda().clone())?
    };
    NetworkModel::new(g, r, noise, Some(m.labels().clone()))
}

/// `P = (I−G₂)(I−G₁)⁻¹`, which maps `G₁` onto `G₂`.
pub fn transformation_between(g1: &TransferMatrix, g2: &TransferMatrix) -> Result<Transformation> {
    if g1.shape() != g2.shape() || !g1.is_square() {
        return Err(Error::DimensionMismatch("module matrices must be square and equal-sized".into()));
    }
    let inv = g1.identity_minus()?.inverse()?;
    Transformation::new(g2.identity_minus()?.mul(&inv)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::RationalFunction;
    use num_rational::BigRational;

    fn d(c: i64, den: i64) -> RationalFunction {
        RationalFunction::delay(BigRational::new(c.into(), den.into()), 1)
    }

    fn loop_model() -> NetworkModel {
        let z = RationalFunction::zero();
        let g = TransferMatrix::new(3, 3, vec![z.clone(), d(1, 2), d(1, 3), d(2, 5), z.clone(), z.clone(), z.clone(), d(1, 4), z]).unwrap();
        NetworkModel::with_identity_inputs(g).unwrap()
    }

    #[test]
    fn identity_is_valid_and_neutral() {
        let m = loop_model();
        let p = Transformation::identity(3);
        assert!(is_valid_transformation(&p, &m));
        assert_eq!(apply_transformation(&m, &p).unwrap(), m);
    }

    #[test]
    fn zero_is_invalid() {
        let m = loop_model();
        let p = Transformation::new(TransferMatrix::zeros(3, 3)).unwrap();
        assert!(!is_valid_transformation(&p, &m));
        assert!(matches!(apply_transformation(&m, &p), Err(Error::InvalidTransformation(_))));
    }

    #[test]
    fn open_loop_target() {
        let m = loop_model();
        let p = transformation_between(m.g(), &TransferMatrix::zeros(3, 3)).unwrap();
        assert!(is_valid_transformation(&p, &m));
        let t = apply_transformation(&m, &p).unwrap();
        assert!(t.g().is_zero());
        assert!(!t.noise().is_monic());
    }
}
