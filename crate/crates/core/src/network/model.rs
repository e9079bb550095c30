use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ratfun::TransferMatrix;

/// Symmetric covariance matrix with exact rational entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovarianceMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl CovarianceMatrix {
    pub fn new(n: usize, entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} covariance entries for size {n}",
                entries.len()
            )));
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigRational::one();
        }
        Self { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Symmetric with every leading principal minor positive, decided exactly
    /// through the pivots of unpivoted elimination.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let n = self.n;
        let mut a = self.entries.clone();
        for k in 0..n {
            let pivot = a[k * n + k].clone();
            if !pivot.is_positive() {
                return false;
            }
            for i in k + 1..n {
                let f = &a[i * n + k] / &pivot;
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = &f * &a[k * n + j];
                    a[i * n + j] -= v;
                }
            }
        }
        true
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            Complex64::new(self.get(i, j).to_f64().unwrap_or(f64::NAN), 0.0)
        })
    }
}

/// Noise filter `F` with covariance `Λ` of the white driving noise.
///
/// Original models carry a monic square `H`; transformed or abstracted models
/// carry the generalized product `P·H`, which may be non-square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoiseRep {
    f: TransferMatrix,
    lambda: CovarianceMatrix,
    monic: bool,
}

impl NoiseRep {
    pub fn new(f: TransferMatrix, lambda: CovarianceMatrix, monic: bool) -> Result<Self> {
        if f.cols() != lambda.size() {
            return Err(Error::DimensionMismatch(format!(
                "noise filter has {} columns but the covariance is {}x{}",
                f.cols(),
                lambda.size(),
                lambda.size()
            )));
        }
        if monic && !f.is_square() {
            return Err(Error::DimensionMismatch("a monic noise filter must be square".into()));
        }
        Ok(Self { f, lambda, monic })
    }

    /// White noise `v = e` with unit covariance.
    pub fn identity(n: usize) -> Self {
        Self { f: TransferMatrix::identity(n), lambda: CovarianceMatrix::identity(n), monic: true }
    }

    pub fn generalized(f: TransferMatrix, lambda: CovarianceMatrix) -> Result<Self> {
        Self::new(f, lambda, false)
    }

    pub fn f(&self) -> &TransferMatrix {
        &self.f
    }

    pub fn lambda(&self) -> &CovarianceMatrix {
        &self.lambda
    }

    pub fn is_monic(&self) -> bool {
        self.monic
    }

    pub fn channels(&self) -> usize {
        self.lambda.size()
    }
}

/// Node and external-signal names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labels {
    pub nodes: Vec<String>,
    pub signals: Vec<String>,
}

impl Labels {
    pub fn default_for(l: usize, k: usize) -> Self {
        Self {
            nodes: (1..=l).map(|i| format!("w{i}")).collect(),
            signals: (1..=k).map(|i| format!("r{i}")).collect(),
        }
    }
}

/// Dynamic network `w = G w + R r + F e` over `L` nodes and `K` external
/// signals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkModel {
    g: TransferMatrix,
    r: TransferMatrix,
    noise: NoiseRep,
    labels: Labels,
}

impl NetworkModel {
    /// Checks dimensions only; use `validate_model` for the structural clauses.
    pub fn new(g: TransferMatrix, r: TransferMatrix, noise: NoiseRep, labels: Option<Labels>) -> Result<Self> {
        if !g.is_square() {
            return Err(Error::DimensionMismatch(format!("G is {}x{}", g.rows(), g.cols())));
        }
        let l = g.rows();
        if r.rows() != l {
            return Err(Error::DimensionMismatch(format!("R has {} rows for {l} nodes", r.rows())));
        }
        if noise.f().rows() != l {
            return Err(Error::DimensionMismatch(format!(
                "noise filter has {} rows for {l} nodes",
                noise.f().rows()
            )));
        }
        let labels = labels.unwrap_or_else(|| Labels::default_for(l, r.cols()));
        if labels.nodes.len() != l || labels.signals.len() != r.cols() {
            return Err(Error::DimensionMismatch("label counts do not match L and K".into()));
        }
        let mut sorted = labels.nodes.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != l {
            return Err(Error::InvalidModel("node labels are not distinct".into()));
        }
        Ok(Self { g, r, noise, labels })
    }

    /// Model with `R = I` and white unit-covariance noise.
    pub fn with_identity_inputs(g: TransferMatrix) -> Result<Self> {
        let l = g.rows();
        Self::new(g, TransferMatrix::identity(l), NoiseRep::identity(l), None)
    }

    pub fn node_count(&self) -> usize {
        self.g.rows()
    }

    pub fn input_count(&self) -> usize {
        self.r.cols()
    }

    pub fn g(&self) -> &TransferMatrix {
        &self.g
    }

    pub fn r(&self) -> &TransferMatrix {
        &self.r
    }

    pub fn noise(&self) -> &NoiseRep {
        &self.noise
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn node_label(&self, i: usize) -> &str {
        &self.labels.nodes[i]
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.labels.nodes.iter().position(|n| n == label)
    }
}

/// Rows kept by an abstraction, as indices into the original nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionMatrix {
    kept: Vec<usize>,
    n: usize,
}

impl SelectionMatrix {
    pub fn new(kept: Vec<usize>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for &k in &kept {
            if k >= n {
                return Err(Error::DimensionMismatch(format!("selected node {k} out of range")));
            }
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::DimensionMismatch(format!("node {k} selected twice")));
            }
        }
        Ok(Self { kept, n })
    }

    pub fn all(n: usize) -> Self {
        Self { kept: (0..n).collect(), n }
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn source_size(&self) -> usize {
        self.n
    }

    /// The 0/1 matrix with a single one per row.
    pub fn to_matrix(&self) -> TransferMatrix {
        let mut c = TransferMatrix::zeros(self.kept.len(), self.n);
        for (row, &k) in self.kept.iter().enumerate() {
            c.set(row, k, crate::ratfun::RationalFunction::one());
        }
        c
    }
}
