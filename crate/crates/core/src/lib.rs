//! Exact and asymptotic enumeration of mappings `f: [n] -> [n]` whose
//! preimage sizes are restricted to a set `P`.
//!
//! * [`constraint`]: the set `P`, its shifts and classification.
//! * [`series`]: truncated power series over exact rationals or doubles.
//! * [`enumeration`]: generating-function coefficients, exact counts and
//!   exact averages for trees, functions, partial functions and their
//!   statistics.
//! * [`asymptotics`]: the singular constants `τ_P`, `ρ_P`, the `τ_k`
//!   sequence and the asymptotic estimates built from them.
//! * [`oracle`]: brute-force enumeration for small `n`.
//! * [`verify`] and [`figures`]: the cross-check suite and figure datasets
//!   used by the command-line tool.

pub mod asymptotics;
pub mod constraint;
pub mod enumeration;
pub mod figures;
pub mod oracle;
pub mod series;
pub mod verify;

pub use asymptotics::{SingularData, TauSequence};
pub use constraint::{Admissibility, AdmissibilityClass, PreimageConstraint};
pub use enumeration::{CountReport, FamilyKind, Statistic};
pub use oracle::OracleSummary;
pub use series::{FloatSeries, Series, TruncatedSeries};
