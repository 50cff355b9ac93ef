//! `divquad`: batch front end for the divquad library.
//!
//! Exit codes: 0 success, 1 failed identity check (`verify`), 2 invalid
//! input, 3 numerical failure.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use divquad::geometry::{run_identity, Identity, Polytope};
use divquad::quad1d::{self, complex_shift, PolyDerivatives, Rule1D, Side};
use divquad::quadnd::{self, FacetRule, Integrand, IntegralReport};
use divquad::tensorpoly::{DerivativeOracle, ExpSum, MultiPolynomial, SinProduct};
use divquad::{oracle, Error};

use output::{Format, Quad1dDoc, RuleDoc, TableRow, VerifyDoc, VerifyRow};

#[derive(Parser, Debug)]
#[command(name = "divquad", version, about = "Quadrature on intervals and flat-faced polytopes")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Measure of a polytope.
    Volume {
        polytope: PathBuf,
        /// Reference point for the boundary formula (comma separated).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        z0: Option<Vec<f64>>,
    },
    /// Centroid of a polytope.
    Centroid { polytope: PathBuf },
    /// Integral of a polynomial or a built-in smooth function.
    Integrate(IntegrateArgs),
    /// One-dimensional rules and the fifth-root shift table.
    Quad1d(Quad1dArgs),
    /// Randomized residual checks of the chart and normal identities.
    Verify {
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Restrict to one or more identity suites.
        #[arg(long, value_enum)]
        identity: Vec<IdentityArg>,
        /// Pass threshold for the maximum residual.
        #[arg(long, env = "DIVQUAD_TOL", default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(clap::Args, Debug)]
struct IntegrateArgs {
    polytope: PathBuf,
    /// Polynomial in text form, e.g. "3 x0^2 x1 - 1".
    #[arg(long, conflicts_with = "func", required_unless_present = "func")]
    poly: Option<String>,
    /// Built-in smooth integrand.
    #[arg(long, value_enum)]
    func: Option<Func>,
    /// Defaults to `recursive` for polynomials and `series` for functions.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Truncation order of the series.
    #[arg(long, default_value_t = 4)]
    order: usize,
    /// Expansion point (comma separated); defaults to the centroid for the
    /// series and the vertex mean otherwise.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    z0: Option<Vec<f64>>,
    /// Facet quadrature for smooth series terms.
    #[arg(long, value_enum, default_value_t = FacetRuleArg::Gauss)]
    facet_rule: FacetRuleArg,
    /// Gauss points per direction for `--facet-rule gauss`.
    #[arg(long, default_value_t = 10)]
    gauss_order: usize,
    /// Compare against the tessellation oracle.
    #[arg(long)]
    oracle: bool,
}

#[derive(clap::Args, Debug)]
struct Quad1dArgs {
    /// Print the table of Re(γ^k), k = 1..4, for the fifth-root shifts.
    #[arg(long, value_enum)]
    table: Option<TableArg>,
    #[arg(long, value_enum, required_unless_present = "table")]
    rule: Option<RuleArg>,
    /// Expansion order for midpoint and Taylor rules.
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Root-of-unity branch for shifted rules.
    #[arg(long, default_value_t = 1)]
    branch: usize,
    /// Number of roots for `complex-shift`.
    #[arg(long, default_value_t = 5)]
    roots: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    b: f64,
    /// Univariate polynomial to integrate over [a, b].
    #[arg(long)]
    poly: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Func {
    ExpSum,
    SinProd,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    Recursive,
    Series,
    Trapezoid,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FacetRuleArg {
    Gauss,
    Trapezoid,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TableArg {
    Gamma5,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RuleArg {
    #[value(alias = "trapezoid")]
    Trap,
    #[value(alias = "corrected-trapezoid")]
    CorrectedTrap,
    Midpoint,
    TaylorLeft,
    TaylorRight,
    FourTerm,
    ComplexShift,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum IdentityArg {
    Volume,
    Cofactor,
    Normal,
    EdgeExample,
}

impl From<IdentityArg> for Identity {
    fn from(a: IdentityArg) -> Self {
        match a {
            IdentityArg::Volume => Identity::Volume,
            IdentityArg::Cofactor => Identity::Cofactor,
            IdentityArg::Normal => Identity::Normal,
            IdentityArg::EdgeExample => Identity::EdgeExample,
        }
    }
}

enum Failure {
    Input(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Volume { polytope, z0 } => cmd_volume(&polytope, z0.as_deref(), cli.format),
        Command::Centroid { polytope } => cmd_centroid(&polytope, cli.format),
        Command::Integrate(args) => cmd_integrate(&args, cli.format),
        Command::Quad1d(args) => cmd_quad1d(&args, cli.format),
        Command::Verify {
            cases,
            seed,
            identity,
            tol,
        } => cmd_verify(cases, seed, &identity, tol, cli.format),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}

fn load_polytope(path: &Path) -> Result<Polytope, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("polytope: cannot read {}: {e}", path.display())))?;
    Polytope::from_json(&text).map_err(|e| Failure::Input(format!("polytope {}: {e}", path.display())))
}

fn cmd_volume(path: &Path, z0: Option<&[f64]>, format: Format) -> CmdResult {
    let poly = load_polytope(path)?;
    let v = quadnd::volume(&poly, z0)?;
    format.print_scalar("volume", v);
    Ok(ExitCode::SUCCESS)
}

fn cmd_centroid(path: &Path, format: Format) -> CmdResult {
    let poly = load_polytope(path)?;
    let c = quadnd::centroid(&poly)?;
    format.print_vector("centroid", &c);
    Ok(ExitCode::SUCCESS)
}

fn builtin(func: Func, dim: usize) -> Box<dyn DerivativeOracle> {
    match func {
        Func::ExpSum => Box::new(ExpSum { dim }),
        Func::SinProd => Box::new(SinProduct { dim }),
    }
}

fn cmd_integrate(args: &IntegrateArgs, format: Format) -> CmdResult {
    let poly = load_polytope(&args.polytope)?;
    let dim = poly.ambient_dim();
    let z0 = args.z0.as_deref();
    let facet_rule = match args.facet_rule {
        FacetRuleArg::Gauss => FacetRule::Gauss {
            order: args.gauss_order,
        },
        FacetRuleArg::Trapezoid => FacetRule::Trapezoid,
    };
    let report = match (&args.poly, args.func) {
        (Some(text), _) => {
            let f = MultiPolynomial::parse(text, dim).map_err(|e| Failure::Input(format!("--poly: {e}")))?;
            let report = match args.method.unwrap_or(MethodArg::Recursive) {
                MethodArg::Recursive => quadnd::integrate_poly_report(&f, &poly, z0)?,
                MethodArg::Series => quadnd::integrate_series(Integrand::Poly(&f), &poly, z0, args.order, facet_rule)?,
                MethodArg::Trapezoid => quadnd::trapezoid_nd(&|x| f.eval(x), &poly)?,
            };
            if args.oracle {
                report.with_oracle(oracle::integrate_poly(&f, &poly)?)
            } else {
                report
            }
        }
        (None, Some(func)) => {
            let g = builtin(func, dim);
            let report = match args.method.unwrap_or(MethodArg::Series) {
                MethodArg::Recursive => {
                    return Err(Failure::Input(
                        "--method recursive needs a polynomial (--poly)".into(),
                    ))
                }
                MethodArg::Series => {
                    quadnd::integrate_series(Integrand::Smooth(g.as_ref()), &poly, z0, args.order, facet_rule)?
                }
                MethodArg::Trapezoid => trapezoid_smooth(g.as_ref(), &poly)?,
            };
            if args.oracle {
                let value = |x: &[f64]| g.value(x).unwrap_or(f64::NAN);
                report.with_oracle(oracle::cubature(&value, &poly, quadnd::REMAINDER_CUBATURE_ORDER)?)
            } else {
                report
            }
        }
        (None, None) => return Err(Failure::Input("one of --poly or --func is required".into())),
    };
    format.print_report(&report);
    Ok(ExitCode::SUCCESS)
}

fn trapezoid_smooth(g: &dyn DerivativeOracle, poly: &Polytope) -> Result<IntegralReport, Error> {
    let report = quadnd::trapezoid_nd(&|x| g.value(x).unwrap_or(f64::NAN), poly)?;
    if report.value.is_nan() {
        return Err(Error::Numerical("integrand evaluation failed".into()));
    }
    Ok(report)
}

fn rule_for(args: &Quad1dArgs, name: RuleArg) -> Result<Rule1D, Error> {
    Ok(match name {
        RuleArg::Trap => quad1d::rule_trapezoid(),
        RuleArg::CorrectedTrap => quad1d::rule_corrected_trapezoid(),
        RuleArg::Midpoint => quad1d::rule_midpoint_sym(args.order),
        RuleArg::TaylorLeft => quad1d::rule_taylor_endpoint(args.order, Side::Left),
        RuleArg::TaylorRight => quad1d::rule_taylor_endpoint(args.order, Side::Right),
        RuleArg::FourTerm => quad1d::rule_four_term(args.branch)?,
        RuleArg::ComplexShift => quad1d::rule_complex_shift(args.roots, args.branch)?,
    })
}

fn cmd_quad1d(args: &Quad1dArgs, format: Format) -> CmdResult {
    let table = match args.table {
        Some(TableArg::Gamma5) => {
            let b1 = complex_shift(5, 1)?.gamma_power_real_parts(4);
            let b2 = complex_shift(5, 2)?.gamma_power_real_parts(4);
            Some(
                (0..4)
                    .map(|i| TableRow {
                        k: i + 1,
                        branch_1: b1[i],
                        branch_2: b2[i],
                    })
                    .collect(),
            )
        }
        None => None,
    };
    let rule = match args.rule {
        Some(name) => {
            let rule = rule_for(args, name)?;
            let value = match &args.poly {
                Some(text) => {
                    let f = MultiPolynomial::parse(text, 1).map_err(|e| Failure::Input(format!("--poly: {e}")))?;
                    Some(rule.apply(args.a, args.b, &PolyDerivatives::new(&f)?)?)
                }
                None => None,
            };
            Some(RuleDoc {
                rule: rule.label().to_string(),
                order: rule.order(),
                coeff_a: rule.coeff_a().to_vec(),
                coeff_b: rule.coeff_b().to_vec(),
                a: value.map(|_| args.a),
                b: value.map(|_| args.b),
                value,
            })
        }
        None => None,
    };
    format.print_quad1d(&Quad1dDoc { table, rule });
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(cases: usize, seed: u64, only: &[IdentityArg], tol: f64, format: Format) -> CmdResult {
    let selected: Vec<Identity> = if only.is_empty() {
        Identity::ALL.to_vec()
    } else {
        let mut ids: Vec<Identity> = only.iter().map(|&a| a.into()).collect();
        ids.sort();
        ids.dedup();
        ids
    };
    let mut rows = Vec::with_capacity(selected.len());
    for id in selected {
        let r = run_identity(id, cases, seed)?;
        rows.push(VerifyRow {
            identity: id.name(),
            cases: r.cases,
            checks: r.checks,
            max_residual: r.max_residual,
            pass: r.max_residual < tol,
        });
    }
    let all_pass = rows.iter().all(|r| r.pass);
    format.print_verify(&VerifyDoc {
        seed,
        tolerance: tol,
        pass: all_pass,
        identities: rows,
    });
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
