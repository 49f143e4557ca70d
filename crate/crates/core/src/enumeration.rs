//! Generating functions of constrained trees, functions and partial
//! functions, and the exact counts and averages read off from them.
//!
//! All series are exponential generating functions: `n! [z^n]` of a counting
//! family is the number of its objects on `[n]`, and for a statistic family
//! (the `Xi*` kinds) it is the statistic summed over all constrained
//! functions on `[n]`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::constraint::PreimageConstraint;
use crate::series::{Coefficient, FloatSeries, Series, SeriesError, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("no constrained function exists on a set of size {n}")]
    NoFunctionsOfThisSize { n: usize },
    #[error("n! times the coefficient of z^{n} is not an integer")]
    NonIntegralCount { n: usize },
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("family `{0}` needs a height or iterate parameter")]
    MissingParameter(String),
    #[error("unknown statistic `{0}`")]
    UnknownStatistic(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// Rooted trees, every vertex's child count in `P`.
    Tree,
    /// Rooted trees of height at most `h`.
    BoundedTree(u32),
    Function,
    PartialFunction,
    /// Functions whose graph is connected.
    Connected,
    /// Points outside the `k`-th image, summed over functions.
    XiImage(u32),
    /// Points outside the `k`-th image, summed over partial functions.
    XiPartialImage(u32),
    /// Cyclic points, summed over functions.
    XiCyclic,
    /// Connected components, summed over functions.
    XiComponent,
}

impl FamilyKind {
    /// Counting families have `n! [z^n]` equal to a number of objects.
    pub fn is_counting(&self) -> bool {
        matches!(
            self,
            Self::Tree | Self::BoundedTree(_) | Self::Function | Self::PartialFunction | Self::Connected
        )
    }

    /// The family a statistic is averaged over.
    pub fn denominator(&self) -> Option<FamilyKind> {
        match self {
            Self::XiImage(_) | Self::XiCyclic | Self::XiComponent => Some(Self::Function),
            Self::XiPartialImage(_) => Some(Self::PartialFunction),
            _ => None,
        }
    }

    pub fn base_name(&self) -> &'static str {
        match self {
            Self::Tree => "tree",
            Self::BoundedTree(_) => "bounded-tree",
            Self::Function => "function",
            Self::PartialFunction => "partial-function",
            Self::Connected => "connected",
            Self::XiImage(_) => "xi-image",
            Self::XiPartialImage(_) => "xi-partial-image",
            Self::XiCyclic => "xi-cyclic",
            Self::XiComponent => "xi-component",
        }
    }

    pub fn parameter(&self) -> Option<u32> {
        match *self {
            Self::BoundedTree(p) | Self::XiImage(p) | Self::XiPartialImage(p) => Some(p),
            _ => None,
        }
    }

    /// Parses a base name plus an optional height/iterate parameter, which
    /// is required for the parameterised kinds.
    pub fn from_parts(name: &str, parameter: Option<u32>) -> Result<Self, EnumerationError> {
        let unknown = || EnumerationError::UnknownFamily(name.to_string());
        let kind = match (name, parameter) {
            ("tree", None) => Self::Tree,
            ("bounded-tree", Some(h)) => Self::BoundedTree(h),
            ("function", None) => Self::Function,
            ("partial-function", None) => Self::PartialFunction,
            ("connected", None) => Self::Connected,
            ("xi-image", Some(k)) => Self::XiImage(k),
            ("xi-partial-image", Some(k)) => Self::XiPartialImage(k),
            ("xi-cyclic", None) => Self::XiCyclic,
            ("xi-component", None) => Self::XiComponent,
            ("bounded-tree" | "xi-image" | "xi-partial-image", None) => {
                return Err(EnumerationError::MissingParameter(name.to_string()))
            }
            _ => return Err(unknown()),
        };
        Ok(kind)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parameter() {
            Some(p) => write!(f, "{}:{}", self.base_name(), p),
            None => f.write_str(self.base_name()),
        }
    }
}

/// Accepts the [`Display`](fmt::Display) form, e.g. `xi-image:3`.
impl FromStr for FamilyKind {
    type Err = EnumerationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some((name, param)) => {
                let p = param
                    .parse()
                    .map_err(|_| EnumerationError::UnknownFamily(s.to_string()))?;
                Self::from_parts(name, Some(p))
            }
            None => Self::from_parts(s, None),
        }
    }
}

/// Expected values over all constrained functions on `[n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    /// `n - |f^k([n])|`.
    ImageDeficiency(u32),
    /// `|f^k([n])|`.
    ImageSize(u32),
    CyclicPoints,
    Components,
}

impl Statistic {
    pub fn from_parts(name: &str, k: Option<u32>) -> Result<Self, EnumerationError> {
        match (name, k) {
            ("image-deficiency", Some(k)) => Ok(Self::ImageDeficiency(k)),
            ("image-size", Some(k)) => Ok(Self::ImageSize(k)),
            ("cyclic-points", None) => Ok(Self::CyclicPoints),
            ("components", None) => Ok(Self::Components),
            _ => Err(EnumerationError::UnknownStatistic(name.to_string())),
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ImageDeficiency(k) => write!(f, "image-deficiency:{k}"),
            Self::ImageSize(k) => write!(f, "image-size:{k}"),
            Self::CyclicPoints => f.write_str("cyclic-points"),
            Self::Components => f.write_str("components"),
        }
    }
}

/// The shared building blocks `T`, `e_{P-1}(T)`, `e_{P-2}(T)` and `F` of
/// every family, over either coefficient backend.
///
/// The variable is `var = s z`: with `s = 1` the series are the generating
/// functions themselves, and with `s ≠ 1` every coefficient `n` is
/// multiplied by `s^n`, which keeps large-order float coefficients in range.
#[derive(Debug, Clone)]
pub struct FamilySeries<C> {
    constraint: PreimageConstraint,
    var: Series<C>,
    tree: Series<C>,
    tree_m1: Series<C>,
    tree_m2: Series<C>,
    function: Series<C>,
}

impl<C: Coefficient> FamilySeries<C> {
    fn from_tree(constraint: &PreimageConstraint, var: Series<C>, tree: Series<C>) -> Result<Self, SeriesError> {
        let order = tree.order();
        let tree_m1 = Series::exp_compose(&constraint.shift(1), &tree)?;
        let tree_m2 = Series::exp_compose(&constraint.shift(2), &tree)?;
        let function = (&Series::one(order) - &var.mul(&tree_m1)).mul_inverse()?;
        Ok(Self {
            constraint: constraint.clone(),
            var,
            tree,
            tree_m1,
            tree_m2,
            function,
        })
    }

    pub fn constraint(&self) -> &PreimageConstraint {
        &self.constraint
    }

    pub fn order(&self) -> usize {
        self.tree.order()
    }

    pub fn tree(&self) -> &Series<C> {
        &self.tree
    }

    pub fn function(&self) -> &Series<C> {
        &self.function
    }

    /// `T_{≤h}` with `T_{≤-1} = 0` and `T_{≤h} = z e_P(T_{≤h-1})`.
    pub fn bounded_tree(&self, height: i64) -> Series<C> {
        let mut current = Series::zero(self.order());
        for _ in 0..=height {
            current = self
                .var
                .mul(&Series::exp_compose(&self.constraint, &current).expect("zero constant term"));
        }
        current
    }

    fn exp_tree(&self) -> Series<C> {
        self.tree.exp().expect("tree series has zero constant term")
    }

    fn ln_function(&self) -> Series<C> {
        self.function.ln().expect("function series has constant term 1")
    }

    pub fn series(&self, family: FamilyKind) -> Series<C> {
        let f = &self.function;
        match family {
            FamilyKind::Tree => self.tree.clone(),
            FamilyKind::BoundedTree(h) => self.bounded_tree(h as i64),
            FamilyKind::Function => f.clone(),
            FamilyKind::PartialFunction => f.mul(&self.exp_tree()),
            FamilyKind::Connected => self.ln_function(),
            FamilyKind::XiImage(k) => {
                let bounded = self.bounded_tree(k as i64 - 1);
                self.var
                    .mul(&bounded)
                    .mul(&self.tree_m2)
                    .mul(&f.mul(f).mul(f))
            }
            FamilyKind::XiPartialImage(k) => {
                let bounded = self.bounded_tree(k as i64 - 1);
                let inner = &self.var.mul(&self.tree_m2).mul(f) + &Series::one(self.order());
                bounded.mul(&f.mul(f)).mul(&self.exp_tree()).mul(&inner)
            }
            FamilyKind::XiCyclic => self.var.mul(&self.tree_m1).mul(&f.mul(f)),
            FamilyKind::XiComponent => f.mul(&self.ln_function()),
        }
    }
}

impl FamilySeries<BigRational> {
    /// Exact series; `T` comes from the Lagrange coefficient formula.
    pub fn exact(constraint: &PreimageConstraint, order: usize) -> Result<Self, EnumerationError> {
        let tree = if constraint.contains(0) {
            TruncatedSeries::lagrange_invert(constraint, order)?
        } else {
            TruncatedSeries::zero(order)
        };
        Ok(Self::from_tree(constraint, TruncatedSeries::variable(order), tree)?)
    }
}

impl FamilySeries<f64> {
    /// Float series in the variable `s z`; `T` comes from Newton iteration
    /// on `T = s z e_P(T)`.
    pub fn float(constraint: &PreimageConstraint, order: usize, scale: f64) -> Result<Self, EnumerationError> {
        let tree = if constraint.contains(0) {
            FloatSeries::tree_fixed_point(constraint, order, &scale)?
        } else {
            FloatSeries::zero(order)
        };
        Ok(Self::from_tree(
            constraint,
            FloatSeries::monomial(1, scale, order),
            tree,
        )?)
    }
}

/// The generating function of `family` under `constraint`, modulo `z^{order+1}`.
pub fn family_series(
    constraint: &PreimageConstraint,
    family: FamilyKind,
    order: usize,
) -> Result<TruncatedSeries, EnumerationError> {
    Ok(FamilySeries::exact(constraint, order)?.series(family))
}

/// Float version of [`family_series`] in the rescaled variable `s z`.
pub fn family_series_float(
    constraint: &PreimageConstraint,
    family: FamilyKind,
    order: usize,
    scale: f64,
) -> Result<FloatSeries, EnumerationError> {
    Ok(FamilySeries::float(constraint, order, scale)?.series(family))
}

fn e_power(constraint: &PreimageConstraint, power: usize, order: usize) -> TruncatedSeries {
    TruncatedSeries::e_series(constraint, order).pow(power as u64)
}

/// `[z^n] T^P = (1/n) [z^{n-1}] e_P(z)^n`.
pub fn tree_coefficient(constraint: &PreimageConstraint, n: usize) -> BigRational {
    if n == 0 {
        return Zero::zero();
    }
    e_power(constraint, n, n - 1).coeff(n - 1) / BigRational::from_integer(n.into())
}

/// `[z^n] F^P = [z^n] e_P(z)^n`.
pub fn function_coefficient(constraint: &PreimageConstraint, n: usize) -> BigRational {
    e_power(constraint, n, n).coeff(n).clone()
}

/// `[z^n] P^P = [z^n] e_P(z)^n e^z`.
pub fn partial_function_coefficient(constraint: &PreimageConstraint, n: usize) -> BigRational {
    let exp = TruncatedSeries::e_series(&PreimageConstraint::all(), n);
    e_power(constraint, n, n).mul(&exp).coeff(n).clone()
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `n! * coefficient`, which must be an integer.
pub fn scaled_count(coefficient: &BigRational, n: usize) -> Result<BigInt, EnumerationError> {
    let scaled = coefficient * BigRational::from_integer(factorial(n));
    if !scaled.is_integer() {
        return Err(EnumerationError::NonIntegralCount { n });
    }
    Ok(scaled.to_integer())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountReport {
    pub n: usize,
    pub family: FamilyKind,
    pub constraint: PreimageConstraint,
    /// `[z^n]` of the family's generating function.
    pub coefficient: BigRational,
    /// `n! * coefficient`: the number of objects, or the summed statistic.
    pub count: BigInt,
    /// For statistic families, the coefficient divided by that of the family
    /// averaged over; `None` when that denominator vanishes.
    pub average: Option<BigRational>,
}

impl CountReport {
    pub fn to_json(&self) -> serde_json::Value {
        let mut value = serde_json::json!({
            "constraint": self.constraint.to_string(),
            "family": self.family.to_string(),
            "n": self.n,
            "count": self.count.to_string(),
            "coefficient": rational_string(&self.coefficient),
        });
        if let Some(avg) = &self.average {
            value["average"] = serde_json::Value::String(rational_string(avg));
        }
        value
    }
}

/// `num/den` with the denominator always present.
pub fn rational_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Counts objects of a family on `[n]`. Trees, functions and partial
/// functions use the direct power formulas; every other family reads the
/// coefficient off the full series.
pub fn count(
    constraint: &PreimageConstraint,
    family: FamilyKind,
    n: usize,
) -> Result<CountReport, EnumerationError> {
    let (coefficient, average) = match family {
        FamilyKind::Tree => (tree_coefficient(constraint, n), None),
        FamilyKind::Function => (function_coefficient(constraint, n), None),
        FamilyKind::PartialFunction => (partial_function_coefficient(constraint, n), None),
        _ => {
            let families = FamilySeries::exact(constraint, n)?;
            let coefficient = families.series(family).coeff(n).clone();
            let average = family.denominator().and_then(|d| {
                let denom = families.series(d).coeff(n).clone();
                (!Zero::is_zero(&denom)).then(|| &coefficient / &denom)
            });
            (coefficient, average)
        }
    };
    let count = scaled_count(&coefficient, n)?;
    Ok(CountReport {
        n,
        family,
        constraint: constraint.clone(),
        coefficient,
        count,
        average,
    })
}

/// Exact average of a statistic over all constrained functions on `[n]`.
pub fn expected_statistic(
    constraint: &PreimageConstraint,
    statistic: Statistic,
    n: usize,
) -> Result<BigRational, EnumerationError> {
    let families = FamilySeries::exact(constraint, n)?;
    expected_statistic_from(&families, statistic, n)
}

/// [`expected_statistic`] against precomputed series of order at least `n`.
pub fn expected_statistic_from(
    families: &FamilySeries<BigRational>,
    statistic: Statistic,
    n: usize,
) -> Result<BigRational, EnumerationError> {
    let functions = families.function().coeff(n).clone();
    if Zero::is_zero(&functions) {
        return Err(EnumerationError::NoFunctionsOfThisSize { n });
    }
    let numerator_family = match statistic {
        Statistic::ImageDeficiency(k) | Statistic::ImageSize(k) => FamilyKind::XiImage(k),
        Statistic::CyclicPoints => FamilyKind::XiCyclic,
        Statistic::Components => FamilyKind::XiComponent,
    };
    let ratio = families.series(numerator_family).coeff(n) / &functions;
    Ok(match statistic {
        Statistic::ImageSize(_) => BigRational::from_integer(n.into()) - ratio,
        _ => ratio,
    })
}

/// Float average of a statistic from series in the rescaled variable `s z`;
/// the scale cancels in the ratio, so a scale near the radius of
/// convergence keeps large orders in range.
pub fn expected_statistic_float(
    families: &FamilySeries<f64>,
    statistic: Statistic,
    n: usize,
) -> Result<f64, EnumerationError> {
    let functions = *families.function().coeff(n);
    if functions == 0.0 {
        return Err(EnumerationError::NoFunctionsOfThisSize { n });
    }
    let numerator_family = match statistic {
        Statistic::ImageDeficiency(k) | Statistic::ImageSize(k) => FamilyKind::XiImage(k),
        Statistic::CyclicPoints => FamilyKind::XiCyclic,
        Statistic::Components => FamilyKind::XiComponent,
    };
    let ratio = families.series(numerator_family).coeff(n) / functions;
    Ok(match statistic {
        Statistic::ImageSize(_) => n as f64 - ratio,
        _ => ratio,
    })
}
