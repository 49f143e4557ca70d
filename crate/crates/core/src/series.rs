//! Truncated univariate formal power series.
//!
//! A [`Series`] holds the coefficients of `z^0, ..., z^N` and every operation
//! works modulo `z^{N+1}`. Binary operations on series of different orders
//! produce a result at the smaller order. Two coefficient backends are
//! provided: exact rationals ([`TruncatedSeries`]) and doubles
//! ([`FloatSeries`]).

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::constraint::PreimageConstraint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series has a zero constant term and no multiplicative inverse")]
    NonInvertibleSeries,
    #[error("inner series of a composition must have a zero constant term")]
    CompositionRequiresZeroConstant,
    #[error("Lagrange inversion needs e_P(0) = 1, i.e. 0 in P")]
    NonInvertibleEpsilon,
    #[error("logarithm needs a constant term equal to 1")]
    LogRequiresUnitConstant,
}

/// Coefficient ring of a series: a field containing the rationals.
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn from_usize(n: usize) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse of a nonzero value.
    fn recip(&self) -> Self;
}

impl Coefficient for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn from_usize(n: usize) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn recip(&self) -> Self {
        BigRational::recip(self)
    }
}

impl Coefficient for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(q: &BigRational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn from_usize(n: usize) -> Self {
        n as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
}

/// A power series truncated after `z^order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<C> {
    coeffs: Vec<C>,
}

pub type TruncatedSeries = Series<BigRational>;
pub type FloatSeries = Series<f64>;

impl<C: Coefficient> Series<C> {
    /// Builds a series of the given order, padding with zeros or dropping
    /// coefficients beyond `order`.
    pub fn new(mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.resize(order + 1, C::zero());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn constant(c: C, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(C::one(), order)
    }

    /// `c * z^k`, which is the zero series when `k > order`.
    pub fn monomial(k: usize, c: C, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// The identity series `z`.
    pub fn variable(order: usize) -> Self {
        Self::monomial(1, C::one(), order)
    }

    /// All-ones series `1 + z + z^2 + ...`.
    pub fn geometric(order: usize) -> Self {
        Self::new(vec![C::one(); order + 1], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn constant_term(&self) -> &C {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coefficient::is_zero)
    }

    /// Drops coefficients above `order`; a larger order is a no-op.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Self {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c).collect(),
        }
    }

    /// Multiplies by `z^k`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Self {
        let order = self.order();
        let mut coeffs = vec![C::zero(); k.min(order + 1)];
        coeffs.extend(self.coeffs.iter().take((order + 1).saturating_sub(k)).cloned());
        Self { coeffs }
    }

    /// Cauchy product truncated to the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let a = &self.coeffs;
        let b = &other.coeffs;
        let coeffs = (0..=order)
            .map(|n| {
                (0..=n)
                    .filter(|&i| !a[i].is_zero() && !b[n - i].is_zero())
                    .fold(C::zero(), |acc, i| acc + a[i].clone() * &b[n - i])
            })
            .collect();
        Self { coeffs }
    }

    /// `self^exponent` by binary exponentiation.
    pub fn pow(&self, mut exponent: u64) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        while exponent > 0 {
            if exponent & 1 == 1 {
                result = result.mul(&base);
            }
            exponent >>= 1;
            if exponent > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// The `g` with `self * g = 1`, from the recurrence
    /// `g_n = -(1/f_0) * sum_{k=1..n} f_k g_{n-k}`.
    pub fn mul_inverse(&self) -> Result<Self, SeriesError> {
        let f = &self.coeffs;
        if f[0].is_zero() {
            return Err(SeriesError::NonInvertibleSeries);
        }
        let inv0 = f[0].recip();
        let mut g: Vec<C> = Vec::with_capacity(f.len());
        g.push(inv0.clone());
        for n in 1..f.len() {
            let sum = (1..=n)
                .filter(|&k| !f[k].is_zero())
                .fold(C::zero(), |acc, k| acc + f[k].clone() * &g[n - k]);
            g.push(-(sum * &inv0));
        }
        Ok(Self { coeffs: g })
    }

    /// `f(g(z))` by Horner's rule, where `f = self`. Needs `g(0) = 0`; the
    /// result has order `min(order(f), order(g))`.
    pub fn compose(&self, g: &Self) -> Result<Self, SeriesError> {
        if !g.constant_term().is_zero() {
            return Err(SeriesError::CompositionRequiresZeroConstant);
        }
        let order = self.order().min(g.order());
        let g = g.truncate(order);
        let mut acc = Self::constant(self.coeffs[order].clone(), order);
        for i in (0..order).rev() {
            acc = acc.mul(&g);
            acc.coeffs[0] = acc.coeffs[0].clone() + &self.coeffs[i];
        }
        Ok(acc)
    }

    /// Formal derivative; the order drops by one (an order-0 series stays at
    /// order 0 and becomes zero).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        let coeffs = (1..self.coeffs.len())
            .map(|n| self.coeffs[n].clone() * &C::from_usize(n))
            .collect();
        Self { coeffs }
    }

    /// Antiderivative with zero constant term; the order rises by one.
    pub fn integral(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(C::zero());
        for (n, a) in self.coeffs.iter().enumerate() {
            coeffs.push(a.clone() * &C::from_usize(n + 1).recip());
        }
        Self { coeffs }
    }

    /// `exp(g)` for `g(0) = 0`, from `h' = g' h`:
    /// `h_n = (1/n) * sum_{k=1..n} k g_k h_{n-k}`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.constant_term().is_zero() {
            return Err(SeriesError::CompositionRequiresZeroConstant);
        }
        let g = &self.coeffs;
        let weighted: Vec<C> = g
            .iter()
            .enumerate()
            .map(|(k, a)| a.clone() * &C::from_usize(k))
            .collect();
        let mut h = Vec::with_capacity(g.len());
        h.push(C::one());
        for n in 1..g.len() {
            let sum = (1..=n)
                .filter(|&k| !weighted[k].is_zero())
                .fold(C::zero(), |acc, k| acc + weighted[k].clone() * &h[n - k]);
            h.push(sum * &C::from_usize(n).recip());
        }
        Ok(Self { coeffs: h })
    }

    /// `ln(f)` for `f(0) = 1`, as the integral of `f'/f`.
    pub fn ln(&self) -> Result<Self, SeriesError> {
        if self.constant_term() != &C::one() {
            return Err(SeriesError::LogRequiresUnitConstant);
        }
        let order = self.order();
        if order == 0 {
            return Ok(Self::zero(0));
        }
        let quotient = self.derivative().mul(&self.mul_inverse()?.truncate(order - 1));
        Ok(quotient.integral())
    }

    /// `e_P(g(z))`, truncated. Uses the exponential recurrence for the
    /// unconstrained set and a sum of powers of `g` otherwise.
    pub fn exp_compose(constraint: &PreimageConstraint, g: &Self) -> Result<Self, SeriesError> {
        if !g.constant_term().is_zero() {
            return Err(SeriesError::CompositionRequiresZeroConstant);
        }
        let order = g.order();
        if constraint.is_all() {
            return g.exp();
        }
        let mut result = Self::zero(order);
        let Some(max) = constraint.max_element() else {
            return Ok(result);
        };
        // Powers of g beyond the order vanish since g has valuation >= 1.
        let mut power = Self::one(order);
        let mut factorial = BigInt::one();
        for n in 0..=max.min(order as u32) {
            if n > 0 {
                power = power.mul(g);
                factorial *= n;
            }
            if constraint.contains(n) {
                let weight = C::from_rational(&BigRational::new(BigInt::one(), factorial.clone()));
                result = &result + &power.scale(&weight);
            }
        }
        Ok(result)
    }

    /// The truncated series `e_P(z)` itself.
    pub fn e_series(constraint: &PreimageConstraint, order: usize) -> Self {
        let coeffs = constraint
            .e_coefficients(order)
            .iter()
            .map(C::from_rational)
            .collect();
        Self { coeffs }
    }

    /// The unique `σ` with `σ(0) = 0` and `σ = z e_P(σ)`, coefficient by
    /// coefficient from `[z^n]σ = (1/n) [z^{n-1}] e_P(z)^n`.
    pub fn lagrange_invert(constraint: &PreimageConstraint, order: usize) -> Result<Self, SeriesError> {
        if !constraint.contains(0) {
            return Err(SeriesError::NonInvertibleEpsilon);
        }
        let mut coeffs = vec![C::zero(); order + 1];
        for n in 1..=order {
            let e = Self::e_series(constraint, n - 1);
            let power = e.pow(n as u64);
            coeffs[n] = power.coeffs[n - 1].clone() * &C::from_usize(n).recip();
        }
        Ok(Self { coeffs })
    }

    /// Solves `σ = s z e_P(σ)` with `σ(0) = 0` by Newton iteration, i.e. the
    /// series of `T(s z)` where `T = z e_P(T)`. Each step doubles the number
    /// of correct coefficients.
    pub fn tree_fixed_point(
        constraint: &PreimageConstraint,
        order: usize,
        scale: &C,
    ) -> Result<Self, SeriesError> {
        if !constraint.contains(0) {
            return Err(SeriesError::NonInvertibleEpsilon);
        }
        let derived = constraint.shift(1);
        let mut sigma = Self::zero(order);
        let mut correct = 1usize;
        loop {
            let target = (2 * correct).min(order);
            let current = sigma.truncate(target);
            let sz = Self::monomial(1, scale.clone(), target);
            let residual = &current - &sz.mul(&Self::exp_compose(constraint, &current)?);
            let jacobian = &Self::one(target) - &sz.mul(&Self::exp_compose(&derived, &current)?);
            let step = residual.mul(&jacobian.mul_inverse()?);
            sigma = Self::new((&current - &step).into_coeffs(), order);
            correct = target;
            if correct >= order {
                break;
            }
        }
        Ok(sigma)
    }

    /// Horner evaluation at a point.
    pub fn evaluate(&self, x: &C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, a| acc * x + a)
    }
}

impl TruncatedSeries {
    /// Debug JSON form: an array of `"num/den"` strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.coeffs
                .iter()
                .map(|q| serde_json::Value::String(format!("{}/{}", q.numer(), q.denom())))
                .collect(),
        )
    }

    pub fn to_float(&self) -> FloatSeries {
        Series {
            coeffs: self.coeffs.iter().map(f64::from_rational).collect(),
        }
    }
}

impl FloatSeries {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.coeffs)
    }
}

impl<C: Coefficient> Add for &Series<C> {
    type Output = Series<C>;
    fn add(self, other: &Series<C>) -> Series<C> {
        let order = self.order().min(other.order());
        Series {
            coeffs: (0..=order)
                .map(|n| self.coeffs[n].clone() + &other.coeffs[n])
                .collect(),
        }
    }
}

impl<C: Coefficient> Sub for &Series<C> {
    type Output = Series<C>;
    fn sub(self, other: &Series<C>) -> Series<C> {
        let order = self.order().min(other.order());
        Series {
            coeffs: (0..=order)
                .map(|n| self.coeffs[n].clone() - other.coeffs[n].clone())
                .collect(),
        }
    }
}

impl<C: Coefficient> Mul for &Series<C> {
    type Output = Series<C>;
    fn mul(self, other: &Series<C>) -> Series<C> {
        Series::mul(self, other)
    }
}

impl<C: Coefficient> Neg for &Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        Series {
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }
}
