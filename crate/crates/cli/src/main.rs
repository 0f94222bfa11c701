//! `tsirelson` command-line interface.
//!
//! Exit codes: 0 success, 1 a check failed, 2 malformed input, 3 solver
//! non-convergence.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tsirelson_core::certificates::{nullifier_basis, verify_certificate, w3_certificate, Level, FLOAT_CERT_TOL};
use tsirelson_core::io::{
    behavior_from_json, behavior_to_json, certificate_from_json, certificate_to_json, clusters_csv,
    expression_from_json, expression_to_json, face_scan_json, layers_csv, layers_svg, octagon_csv, octagon_svg,
    parse_axes, parse_json, projection_csv, slice_figure_layers, to_json_string,
};
use tsirelson_core::optimize::{
    dual_membership, face_scan, hessian_rmax, npa_bound, sos_search_report, HessianSource, Membership, WitnessSource,
};
use tsirelson_core::scenario::{AnyBehavior, AnyExpression, AnyScalar, QubitParams};
use tsirelson_core::slice::{chsh_decompose_check, expose_check, expr_from_slice, octagon_vertices, orbit};
use tsirelson_core::{Error, QSqrt2};

#[derive(Parser)]
#[command(name = "tsirelson", version, about = "Bounds and certificates for two-party Bell expressions")]
struct Cli {
    /// Seed for randomized scans (ChaCha8 stream).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the primary output to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotFormat {
    Csv,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    #[value(name = "paper", alias = "closed-form")]
    ClosedForm,
    Fd,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum over the 16 deterministic strategies.
    LocalBound { expr: PathBuf },
    /// Value of an expression on a behavior.
    Pair { expr: PathBuf, behavior: PathBuf },
    /// Correlators of the two-qubit family.
    QubitStats {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        a0: f64,
        #[arg(long, allow_hyphen_values = true)]
        a1: f64,
        #[arg(long, allow_hyphen_values = true)]
        b0: f64,
        #[arg(long, allow_hyphen_values = true)]
        b1: f64,
    },
    /// Expression at slice coordinates `(r0, r1)`.
    SliceExpr {
        #[arg(long, allow_hyphen_values = true)]
        r0: String,
        #[arg(long, allow_hyphen_values = true)]
        r1: String,
        /// Parse coordinates as exact `p/q+r/t*s2` scalars.
        #[arg(long)]
        exact: bool,
    },
    /// Exact vertices of the octagonal slice.
    Octagon {
        #[arg(long, value_enum, default_value = "csv")]
        format: PlotFormat,
    },
    /// Basis of the polynomials annihilating the reference state.
    Nullifiers {
        #[arg(long)]
        level: Level,
    },
    /// Exact check of the built-in degree-3 certificate.
    VerifyW3,
    /// Check a certificate file.
    VerifyCert {
        cert: PathBuf,
        #[arg(long, default_value_t = FLOAT_CERT_TOL)]
        tol: f64,
    },
    /// Search for a Gram certificate at one level.
    SosSearch {
        expr: PathBuf,
        #[arg(long)]
        level: Level,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Moment-matrix relaxation bound.
    NpaBound {
        expr: PathBuf,
        #[arg(long)]
        level: Level,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Largest slice radius with a negative semidefinite Hessian.
    HessianRmax {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, default_value_t = 256)]
        alpha_grid: usize,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, value_enum, default_value = "paper")]
        source: Source,
    },
    /// Clustered maximizers over the qubit family.
    FaceScan {
        expr: PathBuf,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: ScanFormat,
    },
    /// Exact decomposition of the normalized CHSH expression.
    ChshDecompose,
    /// Exact exposure of the octagon summit.
    ExposeCheck,
    /// The eight images under the symmetry.
    Orbit { expr: PathBuf },
    /// Decide whether the quantum bound is at most 1.
    DualMembership {
        expr: PathBuf,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// Comma-separated levels tried in order.
        #[arg(long, value_delimiter = ',', default_values_t = Level::ALL)]
        levels: Vec<Level>,
    },
    /// Octagon and the two reference circles as plot layers.
    FigSliceData {
        #[arg(long, value_enum, default_value = "csv")]
        format: PlotFormat,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        /// Radius of the Hessian circle.
        #[arg(long, default_value_t = 0.5)]
        hessian_radius: f64,
    },
    /// Three-coordinate projection of sampled behaviors.
    Proj3dData {
        /// Three coordinate names, e.g. `K00,K01,mA0`.
        #[arg(long)]
        axes: String,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
}

enum CliError {
    Input(String),
    Solver(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence(_) | Error::SolverBreakdown(_) => CliError::Solver(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Primary output plus whether every check it reports passed.
struct Report {
    text: String,
    ok: bool,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, ok: true }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(parse_json(&text)?)
}

fn read_expr(path: &Path) -> Result<AnyExpression, CliError> {
    Ok(expression_from_json(&read_json(path)?)?)
}

/// Integers print without a denominator.
fn compact(x: &QSqrt2) -> String {
    let s = x.to_string();
    match s.strip_suffix("/1") {
        Some(int) if x.is_rational() => int.to_string(),
        _ => s,
    }
}

fn scalar_text(x: &AnyScalar) -> String {
    match x {
        AnyScalar::Exact(q) => compact(q),
        AnyScalar::Float(f) => f.to_string(),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let seed = cli.seed;
    let report = match cli.command {
        Command::LocalBound { expr } => {
            let text = match read_expr(&expr)? {
                AnyExpression::Exact(e) => compact(&e.local_bound().0),
                AnyExpression::Float(e) => e.local_bound().0.to_string(),
            };
            Report::ok(text + "\n")
        }
        Command::Pair { expr, behavior } => {
            let e = read_expr(&expr)?;
            let b = behavior_from_json(&read_json(&behavior)?)?;
            Report::ok(scalar_text(&e.pair(&b)) + "\n")
        }
        Command::QubitStats { theta, a0, a1, b0, b1 } => {
            let b = QubitParams::new(theta, [a0, a1], [b0, b1]).behavior();
            Report::ok(to_json_string(&behavior_to_json(&AnyBehavior::Float(b))))
        }
        Command::SliceExpr { r0, r1, exact } => {
            let e = if exact {
                AnyExpression::Exact(expr_from_slice(r0.parse::<QSqrt2>()?, r1.parse()?))
            } else {
                let parse = |s: &str| s.parse::<f64>().map_err(|e| CliError::Input(format!("`{s}`: {e}")));
                AnyExpression::Float(expr_from_slice(parse(&r0)?, parse(&r1)?))
            };
            Report::ok(to_json_string(&expression_to_json(&e)))
        }
        Command::Octagon { format } => {
            let v = octagon_vertices();
            Report::ok(match format {
                PlotFormat::Csv => octagon_csv(&v),
                PlotFormat::Svg => octagon_svg(&v),
            })
        }
        Command::Nullifiers { level } => {
            let basis = nullifier_basis(level);
            let mut text = format!("level {level}: dimension {}\n", basis.dim());
            for (k, p) in basis.polys.iter().enumerate() {
                writeln!(text, "n{k} = {p}").unwrap();
            }
            Report::ok(text)
        }
        Command::VerifyW3 => {
            let rep = verify_certificate(&w3_certificate(), 0.0)?;
            let text = format!(
                "identity {}; {}; rank {}\n",
                if rep.identity_holds { "exact" } else { "FAILED" },
                if rep.psd { "PSD" } else { "not PSD" },
                rep.rank
            );
            Report { text, ok: rep.passed() && rep.rank == 4 }
        }
        Command::VerifyCert { cert, tol } => {
            let c = certificate_from_json(&read_json(&cert)?)?;
            let rep = verify_certificate(&c, tol)?;
            let text = format!(
                "kind {}\nidentity {} (max residual {:e})\npsd {}\nrank {}\nmin eigenvalue {}\n",
                if rep.exact { "exact" } else { "float" },
                yes_no(rep.identity_holds),
                rep.max_residual,
                yes_no(rep.psd),
                rep.rank,
                rep.eigenvalues.first().copied().unwrap_or(f64::NAN),
            );
            Report { text, ok: rep.passed() }
        }
        Command::SosSearch { expr, level, tol } => {
            let rep = sos_search_report(&read_expr(&expr)?, level, tol)?;
            match rep.certificate {
                Some(c) => Report::ok(to_json_string(&certificate_to_json(&c))),
                None => Report {
                    text: format!(
                        "no certificate at {level}: linear system {}, best min eigenvalue {}\n",
                        if rep.linear_feasible { "consistent" } else { "inconsistent" },
                        rep.min_eigenvalue.map_or("n/a".into(), |v| format!("{v:e}")),
                    ),
                    ok: false,
                },
            }
        }
        Command::NpaBound { expr, level, tol } => {
            let v = npa_bound(&read_expr(&expr)?.to_float(), level, tol)?;
            Report::ok(format!("{v}\n"))
        }
        Command::HessianRmax { gamma, alpha_grid, tol, source } => {
            let source = match source {
                Source::ClosedForm => HessianSource::ClosedForm,
                Source::Fd => HessianSource::FiniteDifference,
            };
            Report::ok(format!("{}\n", hessian_rmax(gamma, alpha_grid, tol, source)))
        }
        Command::FaceScan { expr, restarts, tol, format } => {
            let rep = face_scan(&read_expr(&expr)?.to_float(), restarts, tol, seed);
            Report::ok(match format {
                ScanFormat::Csv => clusters_csv(&rep),
                ScanFormat::Json => to_json_string(&face_scan_json(&rep)),
            })
        }
        Command::ChshDecompose => {
            let d = chsh_decompose_check();
            let text = format!(
                "(beta_T + S^4 beta_T)/2 = beta_CHSH/(2*sqrt2): {}\n(beta_T + S^4 beta_T)/2 = beta_CHSH: {}\nS^4 beta_T = beta_(-r,0): {}\nscale factor: {}\n",
                yes_no(d.normalized_identity),
                yes_no(d.unnormalized_identity),
                yes_no(d.s4_negates_coords),
                d.scale_factor.as_ref().map_or("none".into(), compact),
            );
            Report { text, ok: d.passed() }
        }
        Command::ExposeCheck => {
            let e = expose_check()?;
            let text = format!(
                "pair(beta_T, P*) = {}\nunique slice solution: {}\nsolution on boundary: {}\noctagon dimension: {}\n",
                compact(&e.pair_beta_t_p_star),
                e.unique_solution.as_ref().map_or("none".into(), |(a, b)| format!("({a}, {b})")),
                yes_no(e.solution_on_boundary),
                e.octagon_dimension,
            );
            Report { text, ok: e.passed() }
        }
        Command::Orbit { expr } => {
            fn entries<T>(
                items: Vec<(tsirelson_core::scenario::BellExpression<T>, Option<(T, T)>)>,
                wrap: impl Fn(tsirelson_core::scenario::BellExpression<T>) -> AnyExpression,
                coord: impl Fn(&T) -> Value,
            ) -> Vec<Value> {
                items
                    .into_iter()
                    .enumerate()
                    .map(|(k, (e, c))| {
                        let slice = c.map_or(Value::Null, |(a, b)| json!([coord(&a), coord(&b)]));
                        json!({"k": k, "expression": expression_to_json(&wrap(e)), "slice": slice})
                    })
                    .collect()
            }
            let list = match read_expr(&expr)? {
                AnyExpression::Exact(e) => entries(orbit(&e), AnyExpression::Exact, |x| json!(x.to_string())),
                AnyExpression::Float(e) => entries(orbit(&e), AnyExpression::Float, |x| json!(x)),
            };
            Report::ok(to_json_string(&Value::Array(list)))
        }
        Command::DualMembership { expr, tol, levels } => match dual_membership(&read_expr(&expr)?, &levels, tol, seed)? {
            Membership::Inside { level, certificate } => {
                let mut text = format!("inside: certificate at {level}\n");
                text.push_str(&to_json_string(&certificate_to_json(&certificate)));
                Report::ok(text)
            }
            Membership::Outside(w) => {
                let source = match &w.source {
                    WitnessSource::TsirelsonPoint => "Tsirelson point".to_string(),
                    WitnessSource::LocalVertex(v) => format!("local vertex {v}"),
                    WitnessSource::Qubit(p) => format!("qubit parameters {:?}", p.to_array()),
                };
                let mut text = format!("outside: value {} at {source}\n", scalar_text(&w.value));
                text.push_str(&to_json_string(&behavior_to_json(&w.behavior)));
                Report::ok(text)
            }
            Membership::Unknown => Report { text: "unknown\n".into(), ok: false },
        },
        Command::FigSliceData { format, samples, hessian_radius } => {
            let layers = slice_figure_layers(&octagon_vertices(), hessian_radius, samples);
            Report::ok(match format {
                PlotFormat::Csv => layers_csv(&layers),
                PlotFormat::Svg => layers_svg(&layers),
            })
        }
        Command::Proj3dData { axes, samples } => Report::ok(projection_csv(parse_axes(&axes)?, samples, seed)),
    };
    if let Some(path) = &cli.output {
        fs::write(path, &report.text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        return Ok(Report { text: String::new(), ok: report.ok });
    }
    Ok(report)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(r) => {
            print!("{}", r.text);
            ExitCode::from(if r.ok { 0 } else { 1 })
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Solver(msg)) => {
            eprintln!("solver error: {msg}");
            ExitCode::from(3)
        }
    }
}
