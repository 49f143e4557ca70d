//! Cross-checks of the generating-function counts against brute force.

use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::constraint::PreimageConstraint;
use crate::enumeration::{scaled_count, EnumerationError, FamilyKind, FamilySeries};
use crate::oracle::{enumerate, OracleError};

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckRow {
    pub constraint: PreimageConstraint,
    pub n: usize,
    pub quantity: String,
    pub series: BigInt,
    pub oracle: BigInt,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.series == self.oracle
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub rows: Vec<CheckRow>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(CheckRow::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.passed())
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>2}  {:<26} {:>22} {:>22}  result", "constraint", "n", "quantity", "series", "oracle")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<10} {:>2}  {:<26} {:>22} {:>22}  {}",
                r.constraint.to_string(),
                r.n,
                r.quantity,
                r.series,
                r.oracle,
                if r.passed() { "pass" } else { "FAIL" }
            )?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.rows.len(), failed)
    }
}

/// Subsets of `{0, ..., 4}` containing 0.
pub fn default_constraints() -> Vec<PreimageConstraint> {
    PreimageConstraint::subsets_up_to(4)
        .into_iter()
        .filter(|c| c.contains(0))
        .collect()
}

fn check_constraint(
    constraint: &PreimageConstraint,
    n_max: usize,
    k_max: usize,
) -> Result<Vec<CheckRow>, VerifyError> {
    let families = FamilySeries::exact(constraint, n_max)?;
    let mut quantities: Vec<(String, FamilyKind)> = vec![
        ("functions".into(), FamilyKind::Function),
        ("partial-functions".into(), FamilyKind::PartialFunction),
        ("trees".into(), FamilyKind::Tree),
        ("connected".into(), FamilyKind::Connected),
        ("cyclic-points".into(), FamilyKind::XiCyclic),
        ("components".into(), FamilyKind::XiComponent),
    ];
    for k in 0..=k_max as u32 {
        quantities.push((format!("image-deficiency:{k}"), FamilyKind::XiImage(k)));
    }
    for k in 0..=k_max as u32 {
        quantities.push((format!("partial-image-deficiency:{k}"), FamilyKind::XiPartialImage(k)));
    }
    let series: Vec<_> = quantities.iter().map(|(_, f)| families.series(*f)).collect();

    let mut rows = Vec::new();
    for n in 0..=n_max {
        let summary = enumerate(constraint, n, k_max)?;
        let mut oracle: Vec<BigInt> = vec![
            summary.function_count.into(),
            summary.partial_function_count.into(),
            summary.tree_count.into(),
            summary.connected_count.into(),
            summary.total_cyclic_points.into(),
            summary.total_components.into(),
        ];
        oracle.extend(summary.total_image_deficiency.into_iter().map(BigInt::from));
        oracle.extend(summary.total_partial_image_deficiency.into_iter().map(BigInt::from));
        for (((quantity, _), s), o) in quantities.iter().zip(&series).zip(oracle) {
            rows.push(CheckRow {
                constraint: constraint.clone(),
                n,
                quantity: quantity.clone(),
                series: scaled_count(s.coeff(n), n)?,
                oracle: o,
            });
        }
    }
    Ok(rows)
}

/// Compares every series count and total with brute force for each
/// constraint, `n ≤ n_max` and image iterates `k ≤ k_max`.
pub fn verify(
    constraints: &[PreimageConstraint],
    n_max: usize,
    k_max: usize,
) -> Result<VerifyReport, VerifyError> {
    let per_constraint: Result<Vec<_>, _> = constraints
        .par_iter()
        .map(|c| check_constraint(c, n_max, k_max))
        .collect();
    Ok(VerifyReport {
        rows: per_constraint?.into_iter().flatten().collect(),
    })
}
