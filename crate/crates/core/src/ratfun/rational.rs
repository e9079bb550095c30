use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::polynomial::Polynomial;
use crate::error::{Error, Result};

/// Denominator magnitude below which an evaluation point counts as a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Strict stability margin on pole magnitudes.
pub const STABILITY_MARGIN: f64 = 1e-9;

/// Exact ratio of two polynomials in `q⁻¹`.
///
/// Always stored reduced: `gcd(num, den)` is constant, and the lowest-index
/// nonzero coefficient of `den` is one. Two values are equal as functions iff
/// they are structurally equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = Polynomial::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g), den.exact_div(&g))
        };
        Self::normalised(num, den)
    }

    /// Rescales an already coprime pair.
    fn normalised(num: Polynomial, den: Polynomial) -> Self {
        let t = den.trailing().expect("nonzero denominator");
        if t.is_one() {
            Self { num, den }
        } else {
            let s = t.recip();
            Self { num: num.scale(&s), den: den.scale(&s) }
        }
    }

    pub fn zero() -> Self {
        Self { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn one() -> Self {
        Self { num: Polynomial::one(), den: Polynomial::one() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self { num: Polynomial::constant(c), den: Polynomial::one() }
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        Self { num: p, den: Polynomial::one() }
    }

    /// `c · q⁻ᵏ`
    pub fn delay(c: BigRational, k: usize) -> Self {
        Self::from_polynomial(Polynomial::monomial(c, k))
    }

    /// Builds from small integer coefficient lists (ascending in `q⁻¹`).
    pub fn from_i64s(num: &[i64], den: &[i64]) -> Result<Self> {
        Self::new(Polynomial::from_i64s(num), Polynomial::from_i64s(den))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// `max(deg num, deg den)`; zero for constants.
    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalised(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Proper iff the denominator has a nonzero constant coefficient.
    pub fn is_proper(&self) -> bool {
        !self.den.coeff(0).is_zero()
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.is_proper() && self.num.coeff(0).is_zero()
    }

    /// Value as `q → ∞` for proper functions.
    pub fn at_infinity(&self) -> Option<BigRational> {
        self.is_proper().then(|| self.num.coeff(0) / self.den.coeff(0))
    }

    /// Poles in the `q` plane, numerically.
    pub fn poles(&self) -> Vec<Complex64> {
        let Some(v) = self.den.valuation() else {
            return Vec::new();
        };
        // den = x^v·d(x) with d(0) != 0; poles in q are the reciprocals of the
        // roots of d, i.e. the roots of the reversed coefficient sequence.
        let d = self.den.shift_down(v);
        let mut q_coeffs = d.to_f64_coeffs();
        q_coeffs.reverse();
        polynomial_roots(&q_coeffs)
    }

    /// All poles strictly inside the unit circle (margin `1e-9`).
    pub fn is_stable(&self) -> bool {
        self.poles().iter().all(|p| p.norm() < 1.0 - STABILITY_MARGIN)
    }

    /// Exact value at `q⁻¹ = x`; `None` at a pole.
    pub fn eval_exact(&self, x: &BigRational) -> Option<BigRational> {
        let horner = |p: &Polynomial| p.coeffs().iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c);
        let d = horner(&self.den);
        (!d.is_zero()).then(|| horner(&self.num) / d)
    }

    /// Evaluates at `q = z`, substituting `q⁻¹ ↦ z⁻¹`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let x = z.inv();
        let d = self.den.eval_f64(x);
        if d.norm() < POLE_TOLERANCE {
            return Err(Error::PoleAtPoint);
        }
        Ok(self.num.eval_f64(x) / d)
    }
}

/// Roots of `Σ c_k t^k` (ascending coefficients) via companion eigenvalues.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut cs = coeffs.to_vec();
    while cs.last().is_some_and(|c| *c == 0.0) {
        cs.pop();
    }
    let n = cs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = cs[n];
    if n == 1 {
        return vec![Complex64::new(-cs[0] / lead, 0.0)];
    }
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -cs[i] / lead;
    }
    match Schur::try_new(companion, f64::EPSILON, 10_000) {
        Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
        None => durand_kerner(&cs),
    }
}

/// Simultaneous iteration on all roots; used when the QR sweep stalls.
fn durand_kerner(cs: &[f64]) -> Vec<Complex64> {
    let n = cs.len() - 1;
    let lead = cs[n];
    let monic: Vec<Complex64> = cs.iter().map(|c| Complex64::new(c / lead, 0.0)).collect();
    let eval = |x: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c);
    let radius = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::from_polar(0.4 * radius, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-12, 0.0);
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 {
            break;
        }
    }
    roots
}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<BigRational> for RationalFunction {
    fn from(c: BigRational) -> Self {
        Self::constant(c)
    }
}

impl From<i64> for RationalFunction {
    fn from(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunction::from_polynomial(&self.num + &rhs.num);
        }
        if self.den == rhs.den {
            return RationalFunction::canonical(&self.num + &rhs.num, self.den.clone());
        }
        let g = Polynomial::gcd(&self.den, &rhs.den);
        let a = self.den.exact_div(&g);
        let b = rhs.den.exact_div(&g);
        let num = &(&self.num * &b) + &(&rhs.num * &a);
        let den = &self.den * &b;
        RationalFunction::canonical(num, den)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        // Cross-cancel before multiplying so the result is already coprime.
        let g1 = Polynomial::gcd(&self.num, &rhs.den);
        let g2 = Polynomial::gcd(&rhs.num, &self.den);
        let n = &self.num.exact_div(&g1) * &rhs.num.exact_div(&g2);
        let d = &self.den.exact_div(&g2) * &rhs.den.exact_div(&g1);
        RationalFunction::normalised(n, d)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: &RationalFunction) -> RationalFunction {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        RationalFunction::one()
    }
}
