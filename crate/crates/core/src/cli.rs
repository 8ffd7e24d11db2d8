//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification mismatch or other failure, 2 bad
//! input, 3 search budget exhausted.

use std::io::Write;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::diagram::{enumerate_admissible, MarkedDiagram};
use crate::error::Error;
use crate::exactalg::Fp;
use crate::fiber::{budget_from_env, fiber_report};
use crate::realize::build_nilpotent;
use crate::slicing::{enumerate_slicings, fiber_dimension, is_connected_fiber, orbit_diagram, stratum_profile};

pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "superfiber", version, about = "Odd nilpotent orbits and Springer fibers of osp(2n+1,2n)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// List admissible diagrams of size (d0, d1).
    Diagrams {
        #[arg(long)]
        d0: usize,
        #[arg(long)]
        d1: usize,
        #[arg(long)]
        json: bool,
    },
    /// Admissible slicings of a diagram.
    Slicings {
        diagram: String,
        #[arg(long)]
        json: bool,
    },
    /// Per-slicing dimensions and component estimates.
    Strata {
        diagram: String,
        #[arg(long)]
        json: bool,
    },
    /// Diagram of the codimension 1, 2 or 3 orbit and its strata.
    Orbit {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        codim: u8,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate the fiber over F_q and cross-check it.
    Verify {
        diagram: String,
        #[arg(long)]
        field: u64,
        /// Search node budget (defaults to SUPERFIBER_BUDGET or 10^7).
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// ASCII rendering, longest row at the bottom.
    Render { diagram: String },
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::NotAdmissible(_)
        | Error::NoParity(_)
        | Error::WrongSize { .. }
        | Error::InvalidField(_)
        | Error::OutOfRange(_) => EXIT_USAGE,
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_MISMATCH,
    }
}

fn parse(s: &str) -> crate::Result<MarkedDiagram> {
    s.parse()
}

fn json_line(out: &mut impl Write, v: &impl Serialize) -> crate::Result<()> {
    writeln!(out, "{}", serde_json::to_string(v)?).map_err(io)
}

fn io(e: std::io::Error) -> Error {
    Error::Precondition(format!("write failed: {e}"))
}

#[derive(Serialize)]
struct StrataJson {
    diagram: String,
    fiber_dimension: usize,
    connected: bool,
    strata: Vec<crate::slicing::StratumProfile>,
}

fn strata_report(d: &MarkedDiagram) -> crate::Result<StrataJson> {
    let slicings = enumerate_slicings(d)?;
    Ok(StrataJson {
        diagram: d.to_string(),
        fiber_dimension: fiber_dimension(d)?,
        connected: is_connected_fiber(d)?,
        strata: slicings.iter().map(stratum_profile).collect(),
    })
}

fn print_strata(out: &mut impl Write, s: &StrataJson) -> crate::Result<()> {
    writeln!(out, "diagram {}", s.diagram).map_err(io)?;
    for (i, p) in s.strata.iter().enumerate() {
        let chain: Vec<String> = p.slicing.chain.iter().map(|d| d.to_string()).collect();
        let dims: Vec<String> = p.step_dims.iter().map(|d| d.map_or("-".into(), |x| x.to_string())).collect();
        let dim = p.dimension.map_or("empty".into(), |x| x.to_string());
        writeln!(
            out,
            "  [{i}] {}  dims {}  dimension {dim}  components_est {}",
            chain.join(" > "),
            dims.join(","),
            p.component_factor
        )
        .map_err(io)?;
    }
    writeln!(out, "{} slicings", s.strata.len()).map_err(io)?;
    writeln!(out, "fiber dimension {}", s.fiber_dimension).map_err(io)?;
    writeln!(out, "connected {}", s.connected).map_err(io)
}

fn dispatch(cmd: Cmd, out: &mut impl Write) -> crate::Result<i32> {
    match cmd {
        Cmd::Diagrams { d0, d1, json } => {
            let ds = enumerate_admissible(d0, d1);
            if json {
                json_line(out, &ds)?;
            } else {
                for d in &ds {
                    writeln!(out, "{d}").map_err(io)?;
                }
            }
        }
        Cmd::Slicings { diagram, json } => {
            let d = parse(&diagram)?;
            let s = enumerate_slicings(&d)?;
            if json {
                json_line(out, &s)?;
            } else {
                for sl in &s {
                    let chain: Vec<String> = sl.chain.iter().map(|d| d.to_string()).collect();
                    writeln!(out, "{}", chain.join(" > ")).map_err(io)?;
                }
            }
        }
        Cmd::Strata { diagram, json } => {
            let s = strata_report(&parse(&diagram)?)?;
            if json {
                json_line(out, &s)?;
            } else {
                print_strata(out, &s)?;
            }
        }
        Cmd::Orbit { codim, n, json } => {
            let s = strata_report(&orbit_diagram(codim, n)?)?;
            if json {
                json_line(out, &s)?;
            } else {
                print_strata(out, &s)?;
            }
        }
        Cmd::Verify { diagram, field, budget, json } => {
            let d = parse(&diagram)?;
            let budget = budget.unwrap_or_else(budget_from_env);
            let r = build_nilpotent(&d, Fp::new(field)?)?;
            let companion = build_nilpotent(&d, Fp::new(next_prime(field))?)?;
            let rep = fiber_report(&r, Some(&companion), budget)?;
            if json {
                json_line(out, &rep)?;
            } else {
                writeln!(out, "diagram {} over F_{}: {} flags", rep.diagram, rep.q, rep.total).map_err(io)?;
                for s in &rep.strata {
                    let dim = s.dim.map_or("empty".into(), |x| x.to_string());
                    let est = s.dim_est.map_or("?".into(), |x| x.to_string());
                    writeln!(
                        out,
                        "  stratum {}: {} points, dimension {dim} (estimate {est}), components {}",
                        s.slicing, s.count, s.components_est
                    )
                    .map_err(io)?;
                }
                writeln!(out, "{} strata", rep.strata.len()).map_err(io)?;
                writeln!(out, "graph components {}", rep.graph_components).map_err(io)?;
                writeln!(out, "enumerators agree {}", rep.enumerators_agree).map_err(io)?;
                writeln!(out, "partition ok {}", rep.partition_ok).map_err(io)?;
                for w in &rep.warnings {
                    writeln!(out, "warning: {w}").map_err(io)?;
                }
            }
            if !rep.enumerators_agree || !rep.partition_ok {
                return Ok(EXIT_MISMATCH);
            }
        }
        Cmd::Render { diagram } => {
            write!(out, "{}", parse(&diagram)?.render()).map_err(io)?;
        }
    }
    Ok(0)
}

fn next_prime(p: u64) -> u64 {
    (p + 1..).find(|&c| (2..c).take_while(|d| d * d <= c).all(|d| c % d != 0)).expect("primes are unbounded")
}
