//! Singularity constants `τ`, `ρ` and the asymptotic estimates built on them.
//!
//! For an admissible constraint the tree function `T` has its dominant
//! singularity at `ρ = τ / e_P(τ)`, where `τ` is the positive root of
//! `e_P(t) = t e_P'(t)`. Coefficient estimates are returned as natural logs
//! since `ρ^{-n}` leaves the double range quickly.

use std::f64::consts::{LN_2, PI};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::constraint::PreimageConstraint;
use crate::enumeration::FamilyKind;

pub const DEFAULT_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error("constraint {0} is not admissible: it needs 0 and an element of at least 2")]
    ConstraintNotAdmissible(String),
    #[error("no asymptotic estimate for family {0}")]
    UnsupportedFamily(String),
    #[error("estimate exp({0}) does not fit in a double")]
    Overflow(f64),
    #[error("iterate index k must be at least 1")]
    InvalidIterate,
}

/// `e_P(t)` in floating point.
pub fn e_value(constraint: &PreimageConstraint, t: f64) -> f64 {
    if constraint.is_all() {
        return t.exp();
    }
    let Some(max) = constraint.max_element() else {
        return 0.0;
    };
    // Horner over t^n / n!, dividing by n on the way down.
    let mut acc = 0.0;
    for n in (0..=max).rev() {
        let term = if constraint.contains(n) { 1.0 } else { 0.0 };
        acc = if n == 0 { acc * t + term } else { (acc * t + term) / n as f64 };
    }
    acc
}

/// The constants of an admissible constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularData {
    #[serde(serialize_with = "serialize_display")]
    pub constraint: PreimageConstraint,
    pub tau: f64,
    pub rho: f64,
    /// `e_P(τ)`.
    pub e_tau: f64,
    /// `e_{P-1}(τ)`.
    pub e_m1_tau: f64,
    /// `e_{P-2}(τ)`.
    pub e_m2_tau: f64,
    pub aperiodic: bool,
    pub period: u32,
}

fn serialize_display<S: serde::Serializer>(c: &PreimageConstraint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(c)
}

/// `τ_0, ..., τ_K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauSequence {
    pub values: Vec<f64>,
}

/// The natural log of an estimate. `unproven` marks periodic constraints,
/// where the estimate is heuristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEstimate {
    pub ln_value: f64,
    pub unproven: bool,
}

impl LogEstimate {
    pub fn value(&self) -> Result<f64, AsymptoticsError> {
        let v = self.ln_value.exp();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(AsymptoticsError::Overflow(self.ln_value))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub unproven: bool,
}

/// Root of `t e_{P-1}(t) = e_P(t)` by bisection to width `tol` followed by
/// two Newton steps.
pub fn solve_singular(constraint: &PreimageConstraint, tol: f64) -> Result<SingularData, AsymptoticsError> {
    if constraint.is_empty() || !constraint.has_singular_constants() {
        return Err(AsymptoticsError::ConstraintNotAdmissible(constraint.to_string()));
    }
    let m1 = constraint.shift(1);
    let m2 = constraint.shift(2);
    let g = |t: f64| t * e_value(&m1, t) - e_value(constraint, t);

    let k = constraint.smallest_above_one().expect("admissible") as i32;
    let fact: f64 = (1..k).map(f64::from).product();
    let mut hi = (fact / (1.0 - 1.0 / k as f64)).powf(1.0 / k as f64);
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..2 {
        let slope = tau * e_value(&m2, tau);
        if slope > 0.0 {
            tau -= g(tau) / slope;
        }
    }

    let e_tau = e_value(constraint, tau);
    let period = constraint.period();
    if period > 1 {
        log::warn!("constraint {constraint} has period {period}; asymptotic estimates are not proven for it");
    }
    Ok(SingularData {
        constraint: constraint.clone(),
        tau,
        rho: tau / e_tau,
        e_tau,
        e_m1_tau: e_value(&m1, tau),
        e_m2_tau: e_value(&m2, tau),
        aperiodic: period == 1,
        period,
    })
}

/// `τ_0..=τ_K` for `constraint` at the default tolerance.
pub fn tau_sequence(constraint: &PreimageConstraint, k_max: usize) -> Result<TauSequence, AsymptoticsError> {
    Ok(solve_singular(constraint, DEFAULT_TOLERANCE)?.tau_sequence(k_max))
}

/// `log2(1 - τ_k^P/τ_P) - log2(1 - τ_k/τ)` against the unconstrained set.
pub fn coalescence_metric(constraint: &PreimageConstraint, k: usize, tol: f64) -> Result<Estimate, AsymptoticsError> {
    if k == 0 {
        return Err(AsymptoticsError::InvalidIterate);
    }
    let data = solve_singular(constraint, tol)?;
    let base = solve_singular(&PreimageConstraint::all(), tol)?;
    Ok(Estimate {
        value: data.log2_image_fraction(k) - base.log2_image_fraction(k),
        unproven: !data.aperiodic,
    })
}

impl SingularData {
    pub fn tau_sequence(&self, k_max: usize) -> TauSequence {
        let mut values = Vec::with_capacity(k_max + 1);
        let mut t = 0.0;
        values.push(t);
        for _ in 0..k_max {
            t = self.rho * e_value(&self.constraint, t);
            values.push(t);
        }
        TauSequence { values }
    }

    fn tau_k(&self, k: usize) -> f64 {
        *self.tau_sequence(k).values.last().expect("nonempty")
    }

    /// `log2(1 - τ_k/τ)`, the log of the limiting k-th image fraction.
    pub fn log2_image_fraction(&self, k: usize) -> f64 {
        (1.0 - self.tau_k(k) / self.tau).ln() / LN_2
    }

    /// Natural log of the estimate of `[z^n]` of a family's generating function.
    pub fn coefficient_asymptote(&self, family: FamilyKind, n: usize) -> Result<LogEstimate, AsymptoticsError> {
        let nf = n as f64;
        let growth = -nf * self.rho.ln();
        let tree_const = 0.5 * (self.e_tau / (2.0 * PI * self.e_m2_tau)).ln();
        let fn_const = -0.5 * (2.0 * PI * self.tau * self.rho * self.e_m2_tau).ln();
        let image = |k: u32| (self.tau_k(k as usize) / (self.tau * self.tau)).ln() + tree_const + 0.5 * nf.ln();
        let ln_value = growth
            + match family {
                FamilyKind::Tree => tree_const - 1.5 * nf.ln(),
                FamilyKind::Function => fn_const - 0.5 * nf.ln(),
                FamilyKind::PartialFunction => fn_const - 0.5 * nf.ln() + self.tau,
                FamilyKind::XiCyclic => -(2.0 * self.tau * self.rho * self.e_m2_tau).ln(),
                FamilyKind::XiImage(k) => image(k),
                FamilyKind::XiPartialImage(k) => image(k) + self.tau,
                other => return Err(AsymptoticsError::UnsupportedFamily(other.to_string())),
            };
        Ok(LogEstimate {
            ln_value,
            unproven: !self.aperiodic,
        })
    }

    /// `c` in the estimate `c √n` of the average number of cyclic points.
    pub fn cyclic_constant(&self) -> f64 {
        (PI / (2.0 * self.tau * self.rho * self.e_m2_tau)).sqrt()
    }

    pub fn average_cyclic_asymptote(&self, n: usize) -> Estimate {
        Estimate {
            value: self.cyclic_constant() * (n as f64).sqrt(),
            unproven: !self.aperiodic,
        }
    }

    /// `n (1 - τ_k/τ)`, for functions and partial functions alike.
    pub fn kth_image_asymptote(&self, n: usize, k: usize) -> Estimate {
        Estimate {
            value: n as f64 * (1.0 - self.tau_k(k) / self.tau),
            unproven: !self.aperiodic,
        }
    }

    pub fn report(&self, k_max: usize) -> serde_json::Value {
        serde_json::json!({
            "constraint": self.constraint.to_string(),
            "tau": self.tau,
            "rho": self.rho,
            "e_tau": self.e_tau,
            "e_m1_tau": self.e_m1_tau,
            "e_m2_tau": self.e_m2_tau,
            "aperiodic": self.aperiodic,
            "period": self.period,
            "unproven": !self.aperiodic,
            "tau_k": self.tau_sequence(k_max).values,
        })
    }
}

/// Natural log of a positive big integer, accurate for any size.
pub fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().expect("fits").ln() + shift as f64 * LN_2
}

/// Natural log of a positive rational.
pub fn ln_rational(q: &BigRational) -> f64 {
    ln_bigint(q.numer()) - ln_bigint(q.denom())
}
