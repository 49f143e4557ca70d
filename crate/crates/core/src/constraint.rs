//! Preimage constraints.
//!
//! A constraint `P` restricts every point `x` of a mapping `f: S -> S` to
//! have `|f^{-1}(x)| ∈ P`. Two shapes are supported: an explicit finite set of
//! nonnegative integers, and the unconstrained set of all nonnegative
//! integers.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("empty preimage constraint")]
    EmptyConstraint,
    #[error("invalid constraint element `{0}`: expected a nonnegative integer or `all`")]
    InvalidElement(String),
}

/// The set `P` of allowed preimage sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreimageConstraint {
    /// `None` stands for every nonnegative integer; otherwise sorted and unique.
    elements: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Finite,
    AllNonnegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Admissibility {
    /// `0 ∉ P` or `P ⊆ {0,1}`: every constrained mapping is a permutation (or
    /// there are none beyond the empty one).
    ForcesPermutation,
    /// `0 ∈ P` and `P` has an element above 1, but the period exceeds 1.
    Admissible,
    AdmissibleAperiodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdmissibilityClass {
    pub tag: Admissibility,
    pub period: u32,
}

impl PreimageConstraint {
    /// A finite constraint. Elements are sorted and deduplicated; an empty
    /// input yields the empty constraint, which is a legal shift result but
    /// is rejected by [`FromStr`] and [`PreimageConstraint::classify`].
    pub fn finite<I: IntoIterator<Item = u32>>(elements: I) -> Self {
        let mut elements: Vec<u32> = elements.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        Self {
            elements: Some(elements),
        }
    }

    pub fn all() -> Self {
        Self { elements: None }
    }

    pub fn kind(&self) -> ConstraintKind {
        match self.elements {
            Some(_) => ConstraintKind::Finite,
            None => ConstraintKind::AllNonnegative,
        }
    }

    pub fn is_all(&self) -> bool {
        self.elements.is_none()
    }

    /// Explicit elements; empty for the unconstrained set.
    pub fn elements(&self) -> &[u32] {
        self.elements.as_deref().unwrap_or(&[])
    }

    pub fn is_empty(&self) -> bool {
        matches!(&self.elements, Some(e) if e.is_empty())
    }

    pub fn contains(&self, n: u32) -> bool {
        match &self.elements {
            Some(e) => e.binary_search(&n).is_ok(),
            None => true,
        }
    }

    /// Largest element, `None` for the unconstrained or empty set.
    pub fn max_element(&self) -> Option<u32> {
        self.elements.as_ref().and_then(|e| e.last().copied())
    }

    /// `P - i = {n - i | n ∈ P}` with negative results dropped.
    pub fn shift(&self, i: u32) -> Self {
        match &self.elements {
            None => Self::all(),
            Some(e) => Self {
                elements: Some(e.iter().filter(|&&n| n >= i).map(|&n| n - i).collect()),
            },
        }
    }

    /// gcd of the nonzero elements; 1 when there are none or `P` is unconstrained.
    pub fn period(&self) -> u32 {
        match &self.elements {
            None => 1,
            Some(e) => {
                let g = e.iter().filter(|&&n| n > 0).fold(0u32, |acc, &n| acc.gcd(&n));
                g.max(1)
            }
        }
    }

    /// `0 ∈ P` and `P - 2 ≠ ∅`: the hypotheses under which the singular
    /// constants exist.
    pub fn has_singular_constants(&self) -> bool {
        match &self.elements {
            None => true,
            Some(e) => self.contains(0) && e.iter().any(|&n| n >= 2),
        }
    }

    /// Smallest element exceeding 1.
    pub fn smallest_above_one(&self) -> Option<u32> {
        match &self.elements {
            None => Some(2),
            Some(e) => e.iter().copied().find(|&n| n >= 2),
        }
    }

    pub fn classify(&self) -> Result<AdmissibilityClass, ConstraintError> {
        if self.is_empty() {
            return Err(ConstraintError::EmptyConstraint);
        }
        let period = self.period();
        let tag = if !self.has_singular_constants() {
            Admissibility::ForcesPermutation
        } else if period == 1 {
            Admissibility::AdmissibleAperiodic
        } else {
            Admissibility::Admissible
        };
        Ok(AdmissibilityClass { tag, period })
    }

    /// Coefficients `[z^n] e_P(z)` for `n = 0..=order`: `1/n!` when `n ∈ P`.
    pub fn e_coefficients(&self, order: usize) -> Vec<BigRational> {
        let mut factorial = BigInt::one();
        (0..=order)
            .map(|n| {
                if n > 0 {
                    factorial *= n;
                }
                if self.contains(n as u32) {
                    BigRational::new(BigInt::one(), factorial.clone())
                } else {
                    BigRational::zero()
                }
            })
            .collect()
    }

    /// Nonempty subsets of `{0, ..., max}` in ascending lexicographic order.
    pub fn subsets_up_to(max: u32) -> Vec<Self> {
        let width = max + 1;
        let mut out: Vec<Self> = (1u32..(1 << width))
            .map(|mask| Self::finite((0..width).filter(|b| mask & (1 << b) != 0)))
            .collect();
        out.sort();
        out
    }
}

impl PartialOrd for PreimageConstraint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The unconstrained set sorts first, then finite sets lexicographically by
/// element list.
impl Ord for PreimageConstraint {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.elements, &other.elements) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for PreimageConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.elements {
            None => f.write_str("all"),
            Some(e) if e.is_empty() => f.write_str("{}"),
            Some(e) => {
                for (i, n) in e.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{n}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for PreimageConstraint {
    type Err = ConstraintError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Self::all());
        }
        if s.is_empty() {
            return Err(ConstraintError::EmptyConstraint);
        }
        let elements = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<u32>()
                    .map_err(|_| ConstraintError::InvalidElement(tok.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::finite(elements))
    }
}

impl serde::Serialize for PreimageConstraint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
