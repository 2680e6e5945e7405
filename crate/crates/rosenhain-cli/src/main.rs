use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex;
use serde::Serialize;
use serde_json::json;

use rosenhain::characteristics::Characteristic;
use rosenhain::io::{complex_to_json, matrix_to_json, parse_input, InputFile, PeriodFile};
use rosenhain::rosenhain::{a_inverse_genus2, a_inverse_genus3, recover_branch_points_genus2, recover_pair_genus3};
use rosenhain::{CurveData, SiegelMatrix, ThetaTable};
use rosenhain::verify::{run_suite, Suite, SuiteResult};
use rosenhain::{CMatrix, Error, HyperellipticCurve, IdentityFit, Tolerances};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "rosenhain", version, about = "Period matrices, theta constants and theta-only reconstruction of A^-1")]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolArgs {
    /// Residual below which an identity counts as verified
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Bound on the omitted tail of each theta series
    #[arg(long, global = true, default_value_t = 1e-12)]
    series_tol: f64,
    /// Convergence target of the period quadrature
    #[arg(long, global = true, default_value_t = 1e-12)]
    quad_tol: f64,
}

impl TolArgs {
    fn tolerances(&self) -> Result<Tolerances, Failure> {
        for (name, v) in [("--tol", self.tol), ("--series-tol", self.series_tol), ("--quad-tol", self.quad_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::usage(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Tolerances {
            series: self.series_tol,
            quadrature: self.quad_tol,
            identity: self.tol,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute A, B and tau for a curve file
    Periods { curve_file: PathBuf },
    /// Theta constants (and gradients of odd characteristics)
    Theta {
        /// Curve file or tau file
        file: PathBuf,
        /// Characteristic such as "[10;01]"; repeatable, default all
        #[arg(long = "characteristic", short = 'c')]
        characteristics: Vec<String>,
    },
    /// Run a verification suite
    Verify {
        /// thomae1 | thomae2 | corollaries | riemann-jacobi | rosenhain2 | rosenhain3 | appendix-a | bolza | all
        suite: String,
        /// Curve file (tau files support riemann-jacobi and appendix-a only)
        file: PathBuf,
        /// e3 of the curve normalized to e1 = 0, e2 = 1 (genus 3)
        #[arg(long)]
        e3: Option<f64>,
        /// Print only the summary lines
        #[arg(long)]
        summary_only: bool,
    },
    /// Theta-only A^-1 from tau
    Reconstruct {
        /// Tau file (or curve file)
        file: PathBuf,
        /// Genus-2 formula for a curve normalized to e_i = 0, e_j = 1
        #[arg(long, num_args = 2, value_names = ["I", "J"], conflicts_with = "genus3")]
        genus2: Option<Vec<usize>>,
        /// Genus-3 column formulae (needs --e3)
        #[arg(long)]
        genus3: bool,
        #[arg(long)]
        e3: Option<f64>,
    },
    /// Branch points from directional theta derivatives along the columns of A^-1
    RecoverBranchPoints {
        /// Tau file with a_matrix, or curve file
        file: PathBuf,
        /// Use the theta-only genus-2 A^-1 for the normalization (i, j) instead of a_matrix
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        genus2: Option<Vec<usize>>,
        /// Use the theta-only genus-3 A^-1 with this e3 instead of a_matrix
        #[arg(long)]
        e3: Option<f64>,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_input_error() { EXIT_USAGE } else { EXIT_NUMERIC },
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("ROSENHAIN_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("ROSENHAIN_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let tol = cli.tol.tolerances()?;
    match cli.command {
        Command::Periods { curve_file } => cmd_periods(&curve_file, &tol),
        Command::Theta { file, characteristics } => cmd_theta(&file, &characteristics, &tol),
        Command::Verify {
            suite,
            file,
            e3,
            summary_only,
        } => cmd_verify(&suite, &file, e3, summary_only, &tol),
        Command::Reconstruct { file, genus2, genus3, e3 } => cmd_reconstruct(&file, genus2, genus3, e3, &tol),
        Command::RecoverBranchPoints { file, genus2, e3 } => cmd_recover(&file, genus2, e3, &tol),
    }
}

fn read_input(path: &Path) -> Result<InputFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    Ok(parse_input(&text)?)
}

fn print_json<S: Serialize>(value: &S) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

/// Tau (validated) and, when available, the curve and its period data.
struct Loaded {
    curve: Option<HyperellipticCurve>,
    data: Option<CurveData>,
    tau: SiegelMatrix,
    a_matrix: Option<CMatrix>,
}

fn load(path: &Path, tol: &Tolerances) -> Result<Loaded, Failure> {
    match read_input(path)? {
        InputFile::Curve(c) => {
            let curve = c.to_curve()?;
            let data = CurveData::compute(&curve, tol)?;
            Ok(Loaded {
                tau: data.periods.tau.clone(),
                a_matrix: Some(data.periods.a_matrix.clone()),
                curve: Some(curve),
                data: Some(data),
            })
        }
        InputFile::Tau(t) => {
            let tau = SiegelMatrix::new(t.tau_matrix()?)?;
            let curve = match &t.branch_points {
                Some(e) => Some(HyperellipticCurve::new(t.genus, e.clone())?),
                None => None,
            };
            Ok(Loaded {
                curve,
                data: None,
                tau,
                a_matrix: t.a_matrix()?,
            })
        }
    }
}

fn cmd_periods(path: &Path, tol: &Tolerances) -> Result<u8, Failure> {
    let curve = match read_input(path)? {
        InputFile::Curve(c) => c.to_curve()?,
        InputFile::Tau(_) => return Err(Failure::usage("periods needs a curve file")),
    };
    let p = rosenhain::periods::compute_periods(&curve, tol.quadrature)?;
    print_json(&PeriodFile::from_periods(&curve, &p));
    Ok(0)
}

fn cmd_theta(path: &Path, chars: &[String], tol: &Tolerances) -> Result<u8, Failure> {
    let loaded = load(path, tol)?;
    let table = match loaded.data {
        Some(d) => d.thetas,
        None => ThetaTable::new(&loaded.tau, tol.series)?,
    };
    let g = table.genus();
    let list: Vec<Characteristic> = if chars.is_empty() {
        Characteristic::all(g)
    } else {
        chars
            .iter()
            .map(|s| {
                let c: Characteristic = s.parse()?;
                if c.genus() != g {
                    return Err(Error::GenusMismatch {
                        expected: g,
                        found: c.genus(),
                    });
                }
                Ok(c)
            })
            .collect::<Result<_, Error>>()?
    };
    let rows: Vec<serde_json::Value> = list
        .iter()
        .map(|c| {
            let value = table.constant(c)?;
            let mut v = json!({
                "characteristic": c.to_string(),
                "parity": if c.is_odd() { "odd" } else { "even" },
                "value": complex_to_json(value),
            });
            if c.is_odd() {
                v["gradient"] = json!(table.gradient(c)?.into_iter().map(complex_to_json).collect::<Vec<_>>());
            }
            Ok(v)
        })
        .collect::<Result<_, Error>>()?;
    print_json(&json!({
        "genus": g,
        "radius": table.radius(),
        "series_tol": tol.series,
        "thetas": rows,
    }));
    Ok(0)
}

fn cmd_verify(suite: &str, path: &Path, e3: Option<f64>, summary_only: bool, tol: &Tolerances) -> Result<u8, Failure> {
    let suite: Suite = suite.parse()?;
    let loaded = load(path, tol)?;
    let results: Vec<SuiteResult> = match &loaded.data {
        Some(data) => {
            if suite == Suite::Rosenhain3 && e3.is_none() {
                return Err(Failure::usage("rosenhain3 requires --e3"));
            }
            run_suite(suite, data, e3, tol)?
        }
        None => {
            let table = ThetaTable::new(&loaded.tau, tol.series)?;
            let t = tol.identity;
            let wanted = match suite {
                Suite::All if table.genus() == 2 => vec![Suite::RiemannJacobi, Suite::AppendixA],
                Suite::All => vec![Suite::RiemannJacobi],
                Suite::RiemannJacobi | Suite::AppendixA => vec![suite],
                other => return Err(Failure::usage(format!("suite {other} needs a curve file"))),
            };
            wanted
                .into_iter()
                .map(|s| {
                    let reports = match s {
                        Suite::AppendixA => rosenhain::verify::appendix_a(&table, t)?,
                        _ => rosenhain::verify::riemann_jacobi(&table, t),
                    };
                    Ok(SuiteResult {
                        suite: s.name().to_string(),
                        reports,
                    })
                })
                .collect::<Result<_, Error>>()?
        }
    };
    if summary_only {
        for r in &results {
            println!("{}", r.summary_line());
        }
    } else {
        print_json(&json!({ "suites": results }));
        for r in &results {
            eprintln!("{}", r.summary_line());
        }
    }
    Ok(if results.iter().all(SuiteResult::all_pass) { 0 } else { EXIT_FAIL })
}

fn fit_json(fit: &IdentityFit<f64>, tol: f64) -> serde_json::Value {
    json!({
        "ratio": complex_to_json(fit.fit.ratio),
        "nearest_root": complex_to_json(fit.fit.nearest),
        "root_order": fit.fit.order,
        "root_power": fit.fit.power,
        "residual": fit.fit.residual,
        "spread": fit.spread,
        "pass": fit.pass(tol),
    })
}

fn labels(v: Vec<usize>) -> Result<(usize, usize), Failure> {
    match v.as_slice() {
        [i, j] => Ok((*i, *j)),
        _ => Err(Failure::usage("--genus2 takes two indices")),
    }
}

fn cmd_reconstruct(
    path: &Path,
    genus2: Option<Vec<usize>>,
    genus3: bool,
    e3: Option<f64>,
    tol: &Tolerances,
) -> Result<u8, Failure> {
    if genus2.is_none() && !genus3 {
        return Err(Failure::usage("choose --genus2 I J or --genus3 --e3 V"));
    }
    if genus3 && e3.is_none() {
        return Err(Failure::usage("--genus3 requires --e3"));
    }
    let loaded = load(path, tol)?;
    let table = match loaded.data {
        Some(d) => d.thetas,
        None => ThetaTable::new(&loaded.tau, tol.series)?,
    };
    let (formula, a_inv) = match genus2 {
        Some(v) => {
            let (i, j) = labels(v)?;
            (format!("genus2 ({i}, {j})"), a_inverse_genus2(&table, i, j)?)
        }
        None => ("genus3".to_string(), a_inverse_genus3(&table, e3.unwrap())?),
    };
    let reference = match &loaded.a_matrix {
        Some(a) => Some(a.inverse().ok_or_else(|| Error::Singular("a_matrix".into()))?),
        None => None,
    };
    let fit = reference.as_ref().map(|r| IdentityFit::matrices(&a_inv, r, 8));
    print_json(&json!({
        "formula": formula,
        "a_inverse": matrix_to_json(&a_inv),
        "reference_fit": fit.as_ref().map(|f| fit_json(f, tol.identity)),
    }));
    Ok(match fit {
        Some(f) if !f.pass(tol.identity) => EXIT_FAIL,
        _ => 0,
    })
}

fn cmd_recover(path: &Path, genus2: Option<Vec<usize>>, e3: Option<f64>, tol: &Tolerances) -> Result<u8, Failure> {
    let loaded = load(path, tol)?;
    let table = match loaded.data {
        Some(d) => d.thetas,
        None => ThetaTable::new(&loaded.tau, tol.series)?,
    };
    let g = table.genus();
    let (a_inv, source) = match (genus2, e3) {
        (Some(v), _) => {
            let (i, j) = labels(v)?;
            (a_inverse_genus2(&table, i, j)?, "theta-only genus-2 A^-1")
        }
        (None, Some(v)) => (a_inverse_genus3(&table, v)?, "theta-only genus-3 A^-1"),
        (None, None) => {
            let a = loaded
                .a_matrix
                .as_ref()
                .ok_or_else(|| Failure::usage("input has no a_matrix; pass --genus2 I J or --e3 V"))?;
            (a.inverse().ok_or_else(|| Error::Singular("a_matrix".into()))?, "a_matrix")
        }
    };
    let known = loaded.curve.as_ref().map(|c| c.branch_points().to_vec());
    let rel = |z: Complex<f64>, y: f64| (z - y).norm() / (1.0 + y.abs());
    let (out, worst) = match g {
        2 => {
            let rec = recover_branch_points_genus2(&table, &a_inv)?;
            let worst = known
                .as_ref()
                .map(|e| rec.iter().zip(e).map(|(z, &y)| rel(*z, y)).fold(0.0, f64::max));
            (
                json!({ "branch_points": rec.iter().map(|z| complex_to_json(*z)).collect::<Vec<_>>() }),
                worst,
            )
        }
        3 => {
            let (prod, sum) = recover_pair_genus3(&table, &a_inv)?;
            let worst = known.as_ref().map(|e| rel(prod, e[0] * e[1]).max(rel(sum, -(e[0] + e[1]))));
            (
                json!({ "e1_e2": complex_to_json(prod), "minus_e1_minus_e2": complex_to_json(sum) }),
                worst,
            )
        }
        _ => return Err(Failure::usage(format!("branch-point recovery is implemented for genus 2 and 3, got {g}"))),
    };
    print_json(&json!({
        "genus": g,
        "source": source,
        "recovered": out,
        "max_relative_error": worst,
    }));
    Ok(match worst {
        Some(w) if !(w < tol.identity) => EXIT_FAIL,
        _ => 0,
    })
}

