//! Command line front end for the jet engine: compute delta-iterates,
//! run named verification suites with JSON reporting, and inspect
//! truncated series (height, Weierstrass preparation, iterates).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;

use pjet::arith::PrimeContext;
use pjet::fp::FpPolynomial;
use pjet::poly;
use pjet::series::{self, TruncatedSeries};
use pjet::verify::{self, Status, VerificationReport};

/// Version of the JSON report schema.
const REPORT_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "pjet", version, about = "p-jet computation and verification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply the p-derivation n times to a jet polynomial and print the
    /// exact and mod-p results.
    Delta {
        /// Polynomial in the jet grammar, e.g. "x0^3" or "2*x0*x1 - 1"
        expr: String,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 3)]
        p: u64,
    },
    /// Run a verification suite; prints one line per check.
    Verify {
        /// One of: modpp, coo, str, mor, eisenstein, aftert, smow, union,
        /// lemmas, all
        suite: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        nu: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        /// Torsor parameter for the str suite
        #[arg(long)]
        a: Option<String>,
        /// Series literal for the mor suite, e.g. "3*x + x^9"
        #[arg(long)]
        series: Option<String>,
        /// Stabilization budget for tilde computations
        #[arg(long)]
        budget: Option<u32>,
        /// Write the JSON report array to this path
        #[arg(long)]
        json: Option<PathBuf>,
        /// Trim the heaviest cases from the `all` grid
        #[arg(long)]
        quick: bool,
    },
    /// Inspect a truncated series.
    Series {
        /// One of: height, prep, iterate
        op: String,
        /// Series literal, e.g. "3*x + x^9 mod 3^6 trunc 100"
        literal: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 1)]
        nu: u32,
        #[arg(long, default_value_t = 8)]
        precision: u32,
        #[arg(long, default_value_t = 200)]
        trunc: usize,
    },
}

#[derive(Serialize)]
struct JsonReport<'a> {
    version: u32,
    #[serde(flatten)]
    report: &'a VerificationReport,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.cmd {
        Cmd::Delta { expr, n, p } => {
            let ctx = PrimeContext::new(p)?;
            let f = poly::text::parse(&expr, ctx)?;
            let d = f.delta_iter(n)?;
            println!("exact: {}", d);
            println!("mod {}: {}", p, FpPolynomial::from_delta_poly(&d)?);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify {
            suite,
            p,
            nu,
            n,
            a,
            series,
            budget,
            json,
            quick,
        } => {
            let p = p.unwrap_or(3);
            let nu = nu.unwrap_or(1);
            let reports = match suite.as_str() {
                "modpp" => verify::suite_modpp(p, nu, n.unwrap_or(nu + 2)),
                "coo" => verify::suite_coo(p, nu, n.unwrap_or(nu + 2)),
                "str" => {
                    let a: BigInt = a.as_deref().unwrap_or("1").parse()?;
                    verify::suite_str(p, nu, n.unwrap_or(2), &a)
                }
                "mor" => {
                    let lit = series
                        .ok_or("the mor suite needs --series, e.g. --series \"3*x + x^9\"")?;
                    let n = n.unwrap_or(nu);
                    let budget = budget.unwrap_or(nu + 1);
                    let f = series::parse_series(&lit, Some(p), n + budget + 4, 200)?;
                    verify::suite_mor(&f, nu, n, budget)
                }
                "eisenstein" => verify::suite_eisenstein(p),
                "aftert" => verify::suite_aftert(p, nu, n.unwrap_or(nu + 2)),
                "smow" => verify::suite_smow(p, n.unwrap_or(2)),
                "union" => verify::suite_union(p, nu, n.unwrap_or(1)),
                "lemmas" => verify::suite_lemmas(p, verify::seed_from_env()),
                "all" => verify::acceptance_grid(quick),
                other => return Err(format!("unknown suite `{}`", other).into()),
            };
            for r in &reports {
                let tag = match r.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::CannotCertify => "CANNOT-CERTIFY",
                    Status::BudgetExceeded => "BUDGET-EXCEEDED",
                };
                println!("{:<16} {:<24} {} ({} ms)", tag, r.check, r.witness, r.ms);
            }
            if let Some(path) = json {
                let wrapped: Vec<JsonReport> = reports
                    .iter()
                    .map(|report| JsonReport {
                        version: REPORT_VERSION,
                        report,
                    })
                    .collect();
                std::fs::write(&path, serde_json::to_string_pretty(&wrapped)?)?;
            }
            let code = if reports.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else if reports.iter().any(|r| r.status == Status::Fail) {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            };
            Ok(code)
        }
        Cmd::Series {
            op,
            literal,
            p,
            nu,
            precision,
            trunc,
        } => {
            let f = series::parse_series(&literal, p, precision, trunc)?;
            match op.as_str() {
                "height" => {
                    let h = series::height_and_e(&f)?;
                    println!("h = {}, e = {}", h.h, h.e);
                }
                "prep" => {
                    let w = series::weierstrass_prep(&f)?;
                    println!(
                        "P = {} (precision {} digits)",
                        poly_text(&w.distinguished, f.ctx()),
                        w.precision
                    );
                    println!("U = {}", series_text(&w.unit, 8));
                }
                "iterate" => {
                    let it = f.iterate(nu)?;
                    println!("F^({}) = {}", nu, series_text(&it, 12));
                }
                other => return Err(format!("unknown series op `{}`", other).into()),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn poly_text(coeffs: &[BigInt], _ctx: &PrimeContext) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
        .map(|(i, c)| match i {
            0 => c.to_string(),
            1 => format!("{}*x", c),
            _ => format!("{}*x^{}", c, i),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn series_text(f: &TruncatedSeries, max_terms: usize) -> String {
    let mut terms = Vec::new();
    for (i, c) in f.coeffs().iter().enumerate() {
        if num_traits::Zero::is_zero(c) {
            continue;
        }
        terms.push(match i {
            0 => c.to_string(),
            1 => format!("{}*x", c),
            _ => format!("{}*x^{}", c, i),
        });
        if terms.len() == max_terms {
            terms.push("...".into());
            break;
        }
    }
    if terms.is_empty() {
        format!("0 (mod {}^{}, trunc {})", f.ctx().p(), f.precision(), f.trunc())
    } else {
        format!(
            "{} (mod {}^{}, trunc {})",
            terms.join(" + "),
            f.ctx().p(),
            f.precision(),
            f.trunc()
        )
    }
}
