//! CSV datasets behind the count, `τ_k` and coalescence plots.
//!
//! Output is deterministic: fixed column order (unconstrained set first,
//! then finite sets lexicographically) and floats printed with 12
//! significant digits.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::asymptotics::{ln_bigint, solve_singular, AsymptoticsError, DEFAULT_TOLERANCE};
use crate::constraint::PreimageConstraint;
use crate::enumeration::{
    function_coefficient, partial_function_coefficient, scaled_count, tree_coefficient, EnumerationError,
};

#[derive(Debug, Error)]
pub enum FigureError {
    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    TreeCounts,
    TreeCountsPeriodic,
    FunctionCounts,
    FunctionCountsPeriodic,
    PartialFunctionCounts,
    Overlay034,
    Overlay04,
    TauK,
    Coalescence,
    CyclicVsCoalescence,
}

impl FigureId {
    pub const ALL: [FigureId; 10] = [
        Self::TreeCounts,
        Self::TreeCountsPeriodic,
        Self::FunctionCounts,
        Self::FunctionCountsPeriodic,
        Self::PartialFunctionCounts,
        Self::Overlay034,
        Self::Overlay04,
        Self::TauK,
        Self::Coalescence,
        Self::CyclicVsCoalescence,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::TreeCounts => "tree-counts",
            Self::TreeCountsPeriodic => "tree-counts-periodic",
            Self::FunctionCounts => "function-counts",
            Self::FunctionCountsPeriodic => "function-counts-periodic",
            Self::PartialFunctionCounts => "partial-function-counts",
            Self::Overlay034 => "overlay-034",
            Self::Overlay04 => "overlay-04",
            Self::TauK => "tau-k",
            Self::Coalescence => "coalescence",
            Self::CyclicVsCoalescence => "cyclic-vs-coalescence",
        }
    }

    /// Whether rows run over the iterate `k` rather than the size `n`.
    pub fn indexed_by_k(&self) -> bool {
        matches!(self, Self::TauK | Self::Coalescence | Self::CyclicVsCoalescence)
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = FigureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| FigureError::UnknownFigure(s.to_string()))
    }
}

/// Finite admissible sets `P ⊆ {0, ..., 4}`: 0 and an element of at least 2.
pub fn admissible_subsets() -> Vec<PreimageConstraint> {
    PreimageConstraint::subsets_up_to(4)
        .into_iter()
        .filter(|c| c.has_singular_constants())
        .collect()
}

fn aperiodic_with_all() -> Vec<PreimageConstraint> {
    std::iter::once(PreimageConstraint::all())
        .chain(admissible_subsets().into_iter().filter(|c| c.period() == 1))
        .collect()
}

fn periodic() -> Vec<PreimageConstraint> {
    admissible_subsets().into_iter().filter(|c| c.period() > 1).collect()
}

/// `%.12g`-style formatting.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..12).contains(&exp) {
        trim(format!("{:.*}", (11 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa.to_string()), sign, exp.abs())
    }
}

fn log2_count(count: &BigInt) -> f64 {
    if count.is_zero() {
        f64::NEG_INFINITY
    } else {
        ln_bigint(count) / std::f64::consts::LN_2
    }
}

#[derive(Clone, Copy)]
enum Counted {
    Tree,
    Function,
    Partial,
}

fn log2_counts(constraint: &PreimageConstraint, what: Counted, n_max: usize) -> Result<Vec<f64>, FigureError> {
    (1..=n_max)
        .map(|n| {
            let coefficient = match what {
                Counted::Tree => tree_coefficient(constraint, n),
                Counted::Function => function_coefficient(constraint, n),
                Counted::Partial => partial_function_coefficient(constraint, n),
            };
            Ok(log2_count(&scaled_count(&coefficient, n)?))
        })
        .collect()
}

/// A figure as a header plus columns of equal length, indexed from 1.
struct Table {
    index: &'static str,
    headers: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Table {
    fn to_csv(&self) -> Result<String, FigureError> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut header = vec![self.index.to_string()];
        header.extend(self.headers.iter().cloned());
        writer.write_record(&header)?;
        let rows = self.columns.first().map_or(0, Vec::len);
        for i in 0..rows {
            let mut record = vec![(i + 1).to_string()];
            record.extend(self.columns.iter().map(|c| format_float(c[i])));
            writer.write_record(&record)?;
        }
        let bytes = writer.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("ascii csv"))
    }
}

/// Column label for a constraint: elements separated by spaces, or `all`.
pub fn column_label(constraint: &PreimageConstraint) -> String {
    constraint.to_string().replace(',', " ")
}

fn count_table(sets: &[PreimageConstraint], what: Counted, n_max: usize) -> Result<Table, FigureError> {
    let columns: Result<Vec<_>, _> = sets.par_iter().map(|c| log2_counts(c, what, n_max)).collect();
    Ok(Table {
        index: "n",
        headers: sets.iter().map(column_label).collect(),
        columns: columns?,
    })
}

fn overlay_table(constraint: &PreimageConstraint, n_max: usize) -> Result<Table, FigureError> {
    let kinds = [Counted::Tree, Counted::Function, Counted::Partial];
    let columns: Result<Vec<_>, _> = kinds.par_iter().map(|&k| log2_counts(constraint, k, n_max)).collect();
    Ok(Table {
        index: "n",
        headers: vec!["tree".into(), "function".into(), "partial-function".into()],
        columns: columns?,
    })
}

fn tau_k_table(k_max: usize, relative: bool) -> Result<Table, FigureError> {
    let sets = aperiodic_with_all();
    let base = solve_singular(&PreimageConstraint::all(), DEFAULT_TOLERANCE)?;
    let base_column: Vec<f64> = (1..=k_max).map(|k| base.log2_image_fraction(k)).collect();
    let mut columns = Vec::new();
    for c in &sets {
        let data = solve_singular(c, DEFAULT_TOLERANCE)?;
        let tau = data.tau_sequence(k_max).values;
        let column = (1..=k_max)
            .map(|k| {
                let v = (1.0 - tau[k] / data.tau).log2();
                if relative {
                    v - base_column[k - 1]
                } else {
                    v
                }
            })
            .collect();
        columns.push(column);
    }
    Ok(Table {
        index: "k",
        headers: sets.iter().map(column_label).collect(),
        columns,
    })
}

fn cyclic_vs_coalescence(k_max: usize) -> Result<String, FigureError> {
    let base = solve_singular(&PreimageConstraint::all(), DEFAULT_TOLERANCE)?;
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(["constraint", "cyclic_constant", "coalescence"])?;
    for c in aperiodic_with_all() {
        let data = solve_singular(&c, DEFAULT_TOLERANCE)?;
        let metric = data.log2_image_fraction(k_max) - base.log2_image_fraction(k_max);
        writer.write_record([column_label(&c), format_float(data.cyclic_constant()), format_float(metric)])?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("ascii csv"))
}

/// The CSV text of a figure with rows `1..=limit` (sizes `n` or iterates `k`).
pub fn figure_csv(id: FigureId, limit: usize) -> Result<String, FigureError> {
    let table = match id {
        FigureId::TreeCounts => count_table(&aperiodic_with_all(), Counted::Tree, limit)?,
        FigureId::TreeCountsPeriodic => count_table(&periodic(), Counted::Tree, limit)?,
        FigureId::FunctionCounts => count_table(&aperiodic_with_all(), Counted::Function, limit)?,
        FigureId::FunctionCountsPeriodic => count_table(&periodic(), Counted::Function, limit)?,
        FigureId::PartialFunctionCounts => {
            let sets: Vec<_> = std::iter::once(PreimageConstraint::all())
                .chain(admissible_subsets())
                .collect();
            count_table(&sets, Counted::Partial, limit)?
        }
        FigureId::Overlay034 => overlay_table(&PreimageConstraint::finite([0, 3, 4]), limit)?,
        FigureId::Overlay04 => overlay_table(&PreimageConstraint::finite([0, 4]), limit)?,
        FigureId::TauK => tau_k_table(limit, false)?,
        FigureId::Coalescence => tau_k_table(limit, true)?,
        FigureId::CyclicVsCoalescence => return cyclic_vs_coalescence(limit),
    };
    table.to_csv()
}

/// Writes `<dir>/<id>.csv` and returns its path.
pub fn write_figure(id: FigureId, limit: usize, dir: &Path) -> Result<PathBuf, FigureError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{id}.csv"));
    std::fs::write(&path, figure_csv(id, limit)?)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_matches_printf_g() {
        assert_eq!(format_float(-0.6617305624915396), "-0.661730562492");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(64.0), "64");
        assert_eq!(format_float(1.5e-7), "1.5e-07");
        assert_eq!(format_float(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_float(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(0.0001), "0.0001");
    }

    #[test]
    fn constraint_families() {
        assert_eq!(admissible_subsets().len(), 14);
        assert_eq!(aperiodic_with_all().len(), 11);
        let p: Vec<String> = periodic().iter().map(ToString::to_string).collect();
        assert_eq!(p, ["0,2", "0,2,4", "0,3", "0,4"]);
    }

    #[test]
    fn tau_k_first_row() {
        let csv = figure_csv(FigureId::TauK, 4).unwrap();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("k,all,0 1 2,"));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "1");
        let expected = (1.0 - (-1f64).exp()).log2();
        assert_eq!(first[1], format_float(expected));
    }

    #[test]
    fn periodic_counts_have_neg_inf_cells() {
        let csv = figure_csv(FigureId::FunctionCountsPeriodic, 6).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,0 2,0 2 4,0 3,0 4");
        assert!(lines[1].contains("-inf"));
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn unconstrained_tree_column_is_exact() {
        let csv = figure_csv(FigureId::TreeCounts, 10).unwrap();
        for (n, line) in csv.lines().skip(1).enumerate() {
            let n = n + 1;
            let cell = line.split(',').nth(1).unwrap();
            let expected = (n as f64 - 1.0) * (n as f64).log2();
            assert!((cell.parse::<f64>().unwrap() - expected).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn curve_columns_increase() {
        let csv = figure_csv(FigureId::FunctionCounts, 20).unwrap();
        let rows: Vec<Vec<f64>> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').skip(1).map(|c| c.parse().unwrap()).collect())
            .collect();
        // Small gaps exist (no map on [5] has preimage sizes in {0,3,4});
        // from n = 6 on every column is finite and increasing.
        assert_eq!(rows[4][10], f64::NEG_INFINITY);
        for w in rows.windows(2).skip(5) {
            assert!(w[0].iter().zip(&w[1]).all(|(a, b)| a.is_finite() && a < b), "{:?} {:?}", w[0], w[1]);
        }
    }

    #[test]
    fn every_figure_is_deterministic() {
        for id in FigureId::ALL {
            let a = figure_csv(id, 12).unwrap();
            let b = figure_csv(id, 12).unwrap();
            assert_eq!(a, b, "{id}");
            assert!(a.ends_with('\n') && !a.contains('\r'));
            assert_eq!(id.name().parse::<FigureId>().unwrap(), id);
        }
    }
}
