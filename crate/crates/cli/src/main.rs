//! `preimage`: counts, series, averages, asymptotics, verification and figure
//! datasets for mappings with preimage-size constraints.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde_json::json;

use preimage_core::asymptotics::{solve_singular, DEFAULT_TOLERANCE};
use preimage_core::enumeration::{count, expected_statistic, rational_string, FamilySeries};
use preimage_core::figures::{write_figure, FigureId};
use preimage_core::verify::{default_constraints, verify};
use preimage_core::{FamilyKind, PreimageConstraint, Statistic};

#[derive(Parser)]
#[command(name = "preimage", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Exact count of a family on [n], as JSON.
    Count {
        #[arg(long)]
        constraint: PreimageConstraint,
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        /// Iterate for xi-image and xi-partial-image.
        #[arg(long)]
        k: Option<u32>,
        /// Height for bounded-tree.
        #[arg(long)]
        h: Option<u32>,
    },
    /// Generating-function coefficients up to z^order, as JSON.
    Series {
        #[arg(long)]
        constraint: PreimageConstraint,
        #[arg(long)]
        family: String,
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value = "exact")]
        backend: Backend,
        /// Coefficient n is multiplied by scale^n (float backend only).
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        h: Option<u32>,
    },
    /// Exact expected value of a statistic over constrained functions on [n].
    Stat {
        #[arg(long)]
        constraint: PreimageConstraint,
        /// image-deficiency, image-size, cyclic-points or components.
        #[arg(long)]
        stat: String,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        n: usize,
    },
    /// Singularity constants, the tau_k sequence and, with --n, estimates.
    Asym {
        #[arg(long)]
        constraint: PreimageConstraint,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Writes figure CSVs.
    Figures {
        /// One figure id; every figure when omitted.
        #[arg(long)]
        id: Option<String>,
        /// Rows for size-indexed figures.
        #[arg(long, default_value_t = 64)]
        n_max: usize,
        /// Rows for iterate-indexed figures.
        #[arg(long, default_value_t = 64)]
        k_max: usize,
        #[arg(long, default_value = "figures")]
        out: PathBuf,
    },
    /// Checks series counts against brute force; exit code 1 on any mismatch.
    Verify {
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
    },
}

enum Failure {
    Usage(String),
    Verification,
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn family(name: &str, k: Option<u32>, h: Option<u32>) -> Result<FamilyKind, Failure> {
    if name.contains(':') {
        return Ok(name.parse()?);
    }
    Ok(FamilyKind::from_parts(name, k.or(h))?)
}

fn print(out: &mut dyn Write, value: &serde_json::Value) -> Result<(), Failure> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("json"))?;
    Ok(())
}

fn run(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Count { constraint, family: name, n, k, h } => {
            let report = count(&constraint, family(&name, k, h)?, n)?;
            print(out, &report.to_json())?;
        }
        Command::Series { constraint, family: name, order, backend, scale, k, h } => {
            let kind = family(&name, k, h)?;
            let coefficients = match backend {
                Backend::Exact => {
                    if scale != 1.0 {
                        return Err(Failure::Usage("--scale requires --backend float".into()));
                    }
                    FamilySeries::exact(&constraint, order)?.series(kind).to_json()
                }
                Backend::Float => FamilySeries::float(&constraint, order, scale)?.series(kind).to_json(),
            };
            print(out, &json!({
                "constraint": constraint.to_string(),
                "family": kind.to_string(),
                "order": order,
                "coefficients": coefficients,
            }))?;
        }
        Command::Stat { constraint, stat, k, n } => {
            let statistic = Statistic::from_parts(&stat, k)?;
            let value = expected_statistic(&constraint, statistic, n)?;
            print(out, &json!({
                "constraint": constraint.to_string(),
                "statistic": statistic.to_string(),
                "n": n,
                "value": rational_string(&value),
                "decimal": value.to_f64(),
            }))?;
        }
        Command::Asym { constraint, k_max, tol, n } => {
            let data = solve_singular(&constraint, tol)?;
            let mut report = data.report(k_max);
            report["cyclic_constant"] = json!(data.cyclic_constant());
            if let Some(n) = n {
                let mut ln_coefficients = serde_json::Map::new();
                for kind in [FamilyKind::Tree, FamilyKind::Function, FamilyKind::PartialFunction, FamilyKind::XiCyclic] {
                    let estimate = data.coefficient_asymptote(kind, n)?;
                    ln_coefficients.insert(kind.to_string(), json!(estimate.ln_value));
                }
                let images: Vec<f64> = (0..=k_max).map(|k| data.kth_image_asymptote(n, k).value).collect();
                report["n"] = json!(n);
                report["ln_coefficient"] = ln_coefficients.into();
                report["average_cyclic_points"] = json!(data.average_cyclic_asymptote(n).value);
                report["kth_image_size"] = json!(images);
            }
            print(out, &report)?;
        }
        Command::Figures { id, n_max, k_max, out: dir } => {
            let ids = match id {
                Some(id) => vec![id.parse::<FigureId>()?],
                None => FigureId::ALL.to_vec(),
            };
            for id in ids {
                let limit = if id.indexed_by_k() { k_max } else { n_max };
                let path = write_figure(id, limit, &dir)?;
                writeln!(out, "{}", path.display())?;
            }
        }
        Command::Verify { n_max, k_max } => {
            let report = verify(&default_constraints(), n_max, k_max)?;
            writeln!(out, "{report}")?;
            if !report.all_passed() {
                return Err(Failure::Verification);
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 on success, 1 on a verification mismatch and 2 on
/// argument or domain errors.
fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return 2;
        }
    };
    match run(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Usage(message)) => {
            let _ = writeln!(err, "error: {message}");
            2
        }
        Err(Failure::Verification) => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let code = run_cli(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr());
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Output {
        code: u8,
        stdout: String,
        stderr: String,
    }

    fn preimage(args: &[&str]) -> Output {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_cli(std::iter::once("preimage").chain(args.iter().copied()), &mut out, &mut err);
        Output {
            code,
            stdout: String::from_utf8(out).unwrap(),
            stderr: String::from_utf8(err).unwrap(),
        }
    }

    fn json(out: &Output) -> serde_json::Value {
        assert_eq!(out.code, 0, "{}", out.stderr);
        serde_json::from_str(&out.stdout).expect("json on stdout")
    }

    #[test]
    fn count_reports_json() {
        let v = json(&preimage(&["count", "--constraint", "all", "--family", "function", "--n", "5"]));
        assert_eq!(v["count"], "3125");
        assert_eq!(v["family"], "function");

        let v = json(&preimage(&["count", "--constraint", "0,3,4", "--family", "tree", "--n", "12"]));
        assert_eq!(v["constraint"], "0,3,4");
        assert!(v["coefficient"].as_str().unwrap().contains('/'));

        let v = json(&preimage(&["count", "--constraint", "all", "--family", "xi-image", "--k", "1", "--n", "2"]));
        assert_eq!(v["count"], "2");
        assert_eq!(v["average"], "1/2");
    }

    #[test]
    fn series_backends() {
        let v = json(&preimage(&[
            "series", "--constraint", "all", "--family", "xi-cyclic", "--order", "20", "--backend", "exact",
        ]));
        let coeffs = v["coefficients"].as_array().unwrap();
        assert_eq!(coeffs.len(), 21);
        assert_eq!(coeffs[2], "3/1");

        let v = json(&preimage(&[
            "series", "--constraint", "all", "--family", "function", "--order", "3", "--backend", "float",
        ]));
        assert_eq!(v["coefficients"][3], 4.5);
    }

    #[test]
    fn stat_is_exact_and_decimal() {
        let v = json(&preimage(&["stat", "--constraint", "all", "--stat", "image-size", "--k", "3", "--n", "6"]));
        let (num, den) = v["value"].as_str().unwrap().split_once('/').unwrap();
        let ratio: f64 = num.parse::<f64>().unwrap() / den.parse::<f64>().unwrap();
        assert!((v["decimal"].as_f64().unwrap() - ratio).abs() < 1e-12);
    }

    #[test]
    fn asym_report_flags_periodic_sets() {
        let v = json(&preimage(&["asym", "--constraint", "0,1,2", "--k-max", "50"]));
        assert!((v["tau"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(v["tau_k"].as_array().unwrap().len(), 51);
        assert_eq!(v["unproven"], false);

        let out = preimage(&["asym", "--constraint", "0,2"]);
        let v = json(&out);
        assert_eq!(v["unproven"], true);
        assert_eq!(v["period"], 2);
    }

    #[test]
    fn domain_and_argument_errors_exit_2() {
        for args in [
            vec!["asym", "--constraint", "0,1"],
            vec!["count", "--constraint", "all", "--family", "forest", "--n", "3"],
            vec!["count", "--constraint", "all", "--family", "xi-image", "--n", "3"],
            vec!["count", "--constraint", "", "--family", "tree", "--n", "3"],
            vec!["stat", "--constraint", "0,2", "--stat", "cyclic-points", "--n", "3"],
            vec!["figures", "--id", "nope"],
            vec!["frobnicate"],
        ] {
            let out = preimage(&args);
            assert_eq!(out.code, 2, "{args:?}");
            let stderr = &out.stderr;
            assert!(stderr.starts_with("error"), "{args:?}: {stderr}");
        }
    }

    #[test]
    fn verify_small_sizes() {
        let out = preimage(&["verify", "--n-max", "5"]);
        assert_eq!(out.code, 0);
        let text = &out.stdout;
        assert!(text.trim_end().ends_with("0 failed"));
    }

    #[test]
    fn tau_k_figure() {
        let dir = tempfile::tempdir().unwrap();
        let out = preimage(&["figures", "--id", "tau-k", "--k-max", "64", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.code, 0);
        let csv = std::fs::read_to_string(dir.path().join("tau-k.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 65);
        assert!(lines[0].starts_with("k,all,"));
        assert!(lines[1].starts_with("1,-0.66172835762"));
    }
}
