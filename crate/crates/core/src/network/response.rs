use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{NetworkModel, SelectionMatrix};
use crate::error::{Error, Result};
use crate::ratfun::TransferMatrix;

/// Number of grid rotations attempted after hitting a pole.
pub const POLE_RETRIES: usize = 3;

pub const DEFAULT_GRID_SIZE: usize = 32;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Evaluation points on the unit circle.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<Complex64>,
    seed: u64,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self::uniform(DEFAULT_GRID_SIZE)
    }
}

impl FrequencyGrid {
    /// `n` points at `ω = π(2k+1)/(2n)`, strictly inside `(0, π)`.
    pub fn uniform(n: usize) -> Self {
        let points = (0..n)
            .map(|k| Complex64::from_polar(1.0, PI * (2 * k + 1) as f64 / (2 * n) as f64))
            .collect();
        Self { points, seed: 0 }
    }

    /// `n` points at uniformly random phases.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..n).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))).collect();
        Self { points, seed }
    }

    /// Seed used for the rotations tried after a pole hit.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn rotated(&self, phase: f64) -> Self {
        let r = Complex64::from_polar(1.0, phase);
        Self { points: self.points.iter().map(|p| p * r).collect(), seed: self.seed }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Runs `f` on this grid, and on up to three randomly rotated copies
    /// while it reports `PoleAtPoint`.
    pub fn retry_on_pole<T>(&self, mut f: impl FnMut(&FrequencyGrid) -> Result<T>) -> Result<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut grid = self.clone();
        for attempt in 0..=POLE_RETRIES {
            match f(&grid) {
                Err(Error::PoleAtPoint) if attempt < POLE_RETRIES => {
                    grid = self.rotated(rng.gen_range(0.0..2.0 * PI));
                }
                other => return other,
            }
        }
        unreachable!()
    }
}

/// Exact `T_wr = (I−G)⁻¹R` and `T_we = (I−G)⁻¹F`.
pub fn open_loop_response(m: &NetworkModel) -> Result<(TransferMatrix, TransferMatrix)> {
    let inv = m.g().identity_minus()?.inverse()?;
    Ok((inv.mul(m.r())?, inv.mul(m.noise().f())?))
}

fn solve(a: DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if a.nrows() == 0 {
        return Ok(b.clone());
    }
    // A numerically singular I−G(z) means z is a pole of the response.
    a.lu().solve(b).ok_or(Error::PoleAtPoint).and_then(|x| {
        if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(x)
        } else {
            Err(Error::PoleAtPoint)
        }
    })
}

/// Numeric `(T_wr(z), T_we(z))`.
pub fn response_at(m: &NetworkModel, z: Complex64) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let l = m.node_count();
    let i_minus_g = DMatrix::<Complex64>::identity(l, l) - m.g().eval_at(z)?;
    let r = m.r().eval_at(z)?;
    let f = m.noise().f().eval_at(z)?;
    let rhs = if r.ncols() + f.ncols() == 0 {
        DMatrix::zeros(l, 0)
    } else {
        let mut both = DMatrix::zeros(l, r.ncols() + f.ncols());
        both.columns_mut(0, r.ncols()).copy_from(&r);
        both.columns_mut(r.ncols(), f.ncols()).copy_from(&f);
        both
    };
    let x = solve(i_minus_g, &rhs)?;
    Ok((x.columns(0, r.ncols()).into_owned(), x.columns(r.ncols(), f.ncols()).into_owned()))
}

/// Noise spectrum `T_we(e^{iω}) Λ T_we(e^{−iω})ᵀ`.
pub fn noise_spectrum_at(m: &NetworkModel, omega: f64) -> Result<DMatrix<Complex64>> {
    spectrum_at_point(m, Complex64::from_polar(1.0, omega))
}

fn spectrum_at_point(m: &NetworkModel, z: Complex64) -> Result<DMatrix<Complex64>> {
    let (_, t) = response_at(m, z)?;
    let (_, t_conj) = response_at(m, z.conj())?;
    Ok(&t * m.noise().lambda().to_complex() * t_conj.transpose())
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// `‖a − b‖_max ≤ tol · max(1, ‖a‖_max)`.
fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
    a.shape() == b.shape() && max_abs(&(a - b)) <= tol * max_abs(a).max(1.0)
}

fn rows_of(m: &DMatrix<Complex64>, rows: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

/// Equal open-loop responses and noise spectra at every grid point.
pub fn check_equivalence(m1: &NetworkModel, m2: &NetworkModel, grid: &FrequencyGrid, tol: f64) -> Result<bool> {
    if m1.node_count() != m2.node_count() || m1.input_count() != m2.input_count() {
        return Err(Error::DimensionMismatch("models differ in node or input count".into()));
    }
    if m1.labels() != m2.labels() {
        return Err(Error::DimensionMismatch("models use different labels".into()));
    }
    let all: Vec<usize> = (0..m1.node_count()).collect();
    grid.retry_on_pole(|g| compare_on(m1, m2, &all, g, tol))
}

/// `T_wr⁽²⁾ = C·T_wr⁽¹⁾` and `Φ⁽²⁾ = C·Φ⁽¹⁾·Cᵀ` at every grid point.
pub fn check_abstraction(
    m1: &NetworkModel,
    m2: &NetworkModel,
    c: &SelectionMatrix,
    grid: &FrequencyGrid,
    tol: f64,
) -> Result<bool> {
    if c.source_size() != m1.node_count() || c.kept().len() != m2.node_count() {
        return Err(Error::DimensionMismatch("selection does not match the model sizes".into()));
    }
    if m1.input_count() != m2.input_count() {
        return Err(Error::DimensionMismatch("models differ in input count".into()));
    }
    grid.retry_on_pole(|g| compare_on(m1, m2, c.kept(), g, tol))
}

fn compare_on(m1: &NetworkModel, m2: &NetworkModel, kept: &[usize], grid: &FrequencyGrid, tol: f64) -> Result<bool> {
    for &z in grid.points() {
        let (t1, _) = response_at(m1, z)?;
        let (t2, _) = response_at(m2, z)?;
        if !close(&rows_of(&t1, kept), &t2, tol) {
            return Ok(false);
        }
        let phi1 = spectrum_at_point(m1, z)?;
        let phi1 = rows_of(&rows_of(&phi1, kept).transpose(), kept).transpose();
        let phi2 = spectrum_at_point(m2, z)?;
        if !close(&phi1, &phi2, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact comparison `T_wr⁽²⁾ = C·T_wr⁽¹⁾` as rational matrices.
pub fn exact_response_matches(m1: &NetworkModel, m2: &NetworkModel, c: &SelectionMatrix) -> Result<bool> {
    let (t1, _) = open_loop_response(m1)?;
    let (t2, _) = open_loop_response(m2)?;
    let cols: Vec<usize> = (0..t1.cols()).collect();
    Ok(t1.select(c.kept(), &cols)? == t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::model::NoiseRep;
    use crate::ratfun::RationalFunction;
    use num_rational::BigRational;

    fn d(c: i64, den: i64) -> RationalFunction {
        RationalFunction::delay(BigRational::new(c.into(), den.into()), 1)
    }

    #[test]
    fn default_grid_avoids_real_axis() {
        let g = FrequencyGrid::default();
        assert_eq!(g.len(), 32);
        for p in g.points() {
            assert!((p.norm() - 1.0).abs() < 1e-12);
            assert!(p.im.abs() > 1e-3);
        }
    }

    #[test]
    fn white_noise_spectrum_is_identity() {
        let m = NetworkModel::with_identity_inputs(TransferMatrix::zeros(3, 3)).unwrap();
        let phi = noise_spectrum_at(&m, 0.7).unwrap();
        assert!(close(&phi, &DMatrix::identity(3, 3), 1e-12));
    }

    #[test]
    fn scalar_lag_spectrum() {
        let h = RationalFunction::from_i64s(&[2], &[2, -1]).unwrap();
        let f = TransferMatrix::new(1, 1, vec![h]).unwrap();
        let noise = NoiseRep::new(f, super::super::model::CovarianceMatrix::identity(1), true).unwrap();
        let m = NetworkModel::new(TransferMatrix::zeros(1, 1), TransferMatrix::identity(1), noise, None).unwrap();
        for k in 0..8 {
            let w = 0.3 + k as f64 * 0.35;
            let phi = noise_spectrum_at(&m, w).unwrap()[(0, 0)];
            let expected = 1.0 / (Complex64::new(1.0, 0.0) - 0.5 * Complex64::from_polar(1.0, -w)).norm_sqr();
            assert!((phi.re - expected).abs() < 1e-12 && phi.im.abs() < 1e-12);
        }
    }

    #[test]
    fn perturbation_breaks_equivalence() {
        let g = TransferMatrix::new(2, 2, vec![RationalFunction::zero(), d(1, 3), d(1, 2), RationalFunction::zero()]).unwrap();
        let m1 = NetworkModel::with_identity_inputs(g.clone()).unwrap();
        assert!(check_equivalence(&m1, &m1, &FrequencyGrid::default(), 1e-9).unwrap());
        let mut g2 = g;
        g2.set(0, 1, &d(1, 3) + &d(1, 1000));
        let m2 = NetworkModel::with_identity_inputs(g2).unwrap();
        assert!(!check_equivalence(&m1, &m2, &FrequencyGrid::default(), 1e-9).unwrap());
    }

    #[test]
    fn retry_rotates_off_a_pole() {
        // 1/(1 + q⁻¹) has its pole at q = −1; a one-point grid sitting there must rotate.
        let h = RationalFunction::from_i64s(&[1], &[1, 1]).unwrap();
        let m = TransferMatrix::new(1, 1, vec![h]).unwrap();
        let grid = FrequencyGrid { points: vec![Complex64::new(-1.0, 0.0)], seed: 7 };
        let mut calls = 0;
        let out = grid.retry_on_pole(|g| {
            calls += 1;
            m.eval_at(g.points()[0])
        });
        assert!(out.is_ok());
        assert_eq!(calls, 2);
    }
}
