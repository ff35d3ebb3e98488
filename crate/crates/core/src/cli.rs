//! The `polyrig` command line.
//!
//! Reports go to stdout as JSON, diagnostics to stderr. Exit status is 0
//! when every check passes, 1 on a failed check or a solver that ran out of
//! iterations, and 2 on unreadable or invalid input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::expansion::{congruence_certificate, expansion_compare, metric_violations, wachspress_map, GraphEmbedding};
use crate::fixtures::{self, FlexFile};
use crate::geometry::DEFAULT_TOL;
use crate::io::{self, matrix_rows, ProblemFile};
use crate::linalg::Point;
use crate::reconstruct::{reconstruct, SolverOptions};
use crate::rigidity::{
    build_tensegrity, central_involution, check_flex, cone_condition, first_order_flex, local_probe, stress_matrix,
};
use crate::wachspress::{izmestiev, verify_izmestiev_with_tol, wachspress, VERIFY_TOL};

pub const TOL_VAR: &str = "POLYRIG_TOL";

#[derive(Debug, Parser)]
#[command(name = "polyrig", version, about = "Wachspress coordinates, Izmestiev matrices and polytope rigidity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wachspress coordinates, Izmestiev matrix and its properties.
    Analyze {
        file: PathBuf,
        /// Interior point as comma separated coordinates (default: origin).
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Compares the expansion of a polytope with an embedding of its graph.
    Compare {
        polytope: PathBuf,
        embedding: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Also search for a congruence witness.
        #[arg(long)]
        certificate: bool,
    },
    /// Recovers a polytope from its edge lengths and Wachspress weights.
    Reconstruct {
        problem: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, default_value_t = SolverOptions::default().max_iters)]
        max_iters: usize,
    },
    /// Tensegrity flexes, the self-stress and an optional local probe.
    Rigidity {
        file: PathBuf,
        /// Edges become struts and central members cables.
        #[arg(long)]
        swapped: bool,
        /// Velocity field to certify, as written by `fixtures`.
        #[arg(long)]
        flex: Option<PathBuf>,
        /// Number of probe trials.
        #[arg(long)]
        probe: Option<usize>,
        #[arg(long, default_value_t = 1e-2)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluates the Wachspress map from a polytope to an embedding.
    Map {
        polytope: PathBuf,
        embedding: PathBuf,
        /// May be repeated.
        #[arg(long, required = true, allow_hyphen_values = true)]
        point: Vec<String>,
    },
    /// Writes a named fixture set and re-validates its manifest.
    Fixtures {
        name: String,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
}

/// Tolerances in effect for one invocation.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub geometric: f64,
    pub verify: f64,
}

impl Tolerances {
    /// Defaults, or both set to `POLYRIG_TOL` when that is present.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOL_VAR) {
            Ok(s) => {
                let t: f64 =
                    s.trim().parse().map_err(|_| Error::Invalid(format!("{TOL_VAR}={s:?} is not a number")))?;
                if !(t.is_finite() && t > 0.0) {
                    return Err(Error::Invalid(format!("{TOL_VAR} must be positive, got {t}")));
                }
                Ok(Tolerances { geometric: t, verify: t })
            }
            Err(_) => Ok(Tolerances { geometric: DEFAULT_TOL, verify: VERIFY_TOL }),
        }
    }
}

pub fn parse_point(s: &str, dim: usize) -> Result<Point> {
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("bad coordinate {c:?} in {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if coords.len() != dim {
        return Err(Error::DimensionMismatch(format!("point {s:?} has {} coordinates, expected {dim}", coords.len())));
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::Invalid(format!("point {s:?} is not finite")));
    }
    Ok(Point::from_vec(coords))
}

fn point_or_origin(s: &Option<String>, dim: usize) -> Result<Point> {
    match s {
        Some(s) => parse_point(s, dim),
        None => Ok(Point::zeros(dim)),
    }
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::NotConverged(_) | Error::InconsistentDiagonal { .. } | Error::NotPsd { .. } => 1,
        _ => 2,
    }
}

/// A finished report and whether all of its checks passed.
struct Outcome {
    report: serde_json::Value,
    passed: bool,
}

fn outcome<T: Serialize>(report: &T, passed: bool) -> Result<Outcome> {
    Ok(Outcome { report: serde_json::to_value(report)?, passed })
}

fn analyze(file: &Path, point: &Option<String>, tol: Tolerances) -> Result<Outcome> {
    let p = io::read_polytope(file, tol.geometric)?;
    let x = point_or_origin(point, p.dim())?;
    let w = wachspress(&p, &x)?;
    let shifted = p.translated(&x);
    let data = izmestiev(&shifted)?;
    let props = verify_izmestiev_with_tol(&shifted, &data, tol.verify);
    let report = json!({
        "point": x.as_slice(),
        "alpha": w.normalized,
        "alpha_unnormalized": w.unnormalized,
        "izmestiev": matrix_rows(&data.unnormalized),
        "normalized": matrix_rows(&data.normalized),
        "eigenvalues": data.eigenvalues,
        "perron": data.perron,
        "row_sums": data.row_sums(),
        "properties": props,
    });
    outcome(&report, props.all_passed())
}

fn compare(p: &Path, q: &Path, point: &Option<String>, certificate: bool, tol: Tolerances) -> Result<Outcome> {
    let p = io::read_polytope(p, tol.geometric)?;
    let q = io::read_embedding(q, tol.geometric)?;
    let x = point_or_origin(point, p.dim())?;
    let r = expansion_compare(&p, &x, &q)?;
    let cones = cone_condition(&q);
    let mut report = json!({
        "comparison": r,
        "violation": r.violation(),
        "cone_condition": cones,
        "cone_failures": cones.failing(),
        "metric_violations": metric_violations(&p, &q),
    });
    if certificate {
        report["certificate"] = match congruence_certificate(&p, &q) {
            Ok(c) => serde_json::to_value(c)?,
            Err(Error::PreconditionViolated(v)) => json!({ "outcome": "not_applicable", "reasons": v }),
            Err(e) => return Err(e),
        };
    }
    outcome(&report, !r.violation())
}

fn run_reconstruct(problem: &Path, reference: &Option<PathBuf>, max_iters: usize, tol: Tolerances) -> Result<Outcome> {
    let f: ProblemFile = io::read_json(problem)?;
    let graph = f.graph()?;
    let lengths = f.sorted_lengths(&graph)?;
    let reference = reference.as_deref().map(|r| io::read_polytope(r, tol.geometric)).transpose()?;
    if let Some(r) = &reference {
        if r.graph() != &graph {
            return Err(Error::GraphMismatch("reference polytope has a different edge graph".into()));
        }
    }
    let opts = SolverOptions { max_iters, ..SolverOptions::default() };
    match reconstruct(&graph, &lengths, &f.alpha, reference.as_ref(), opts) {
        Ok(r) => {
            let ok = r.reference.as_ref().is_none_or(|c| c.equivalent);
            outcome(&r, ok)
        }
        Err(Error::NotConverged(s)) => {
            eprintln!("polyrig: solver did not converge in {} iterations", s.iterations);
            outcome(&*s, false)
        }
        Err(e) => Err(e),
    }
}

fn vectors(rows: &[Vec<f64>], dim: usize) -> Result<Vec<Point>> {
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch(format!("velocities must have {dim} coordinates")));
    }
    Ok(rows.iter().map(|r| Point::from_column_slice(r)).collect())
}

fn rigidity(
    file: &Path,
    swapped: bool,
    flex: &Option<PathBuf>,
    probe: Option<usize>,
    radius: f64,
    seed: u64,
    tol: Tolerances,
) -> Result<Outcome> {
    let p = io::read_polytope(file, tol.geometric)?;
    let (swapped, given) = match flex {
        Some(path) => {
            let f: FlexFile = io::read_json(path)?;
            (f.swapped, Some(vectors(&f.velocities, p.dim())?))
        }
        None => (swapped, None),
    };
    let t = build_tensegrity(&p, swapped)?;
    let found = first_order_flex(&t);
    let found_check = check_flex(&t, &found.flex);
    let stress = stress_matrix(&p)?;
    let mut passed = found_check.signs_ok && stress.equilibrium_residual <= tol.verify.max(VERIFY_TOL);
    let mut report = json!({
        "tensegrity": t,
        "flex": found,
        "flex_check": found_check,
        "stress": stress,
        "centrally_symmetric": central_involution(&p).is_some(),
    });
    if let Some(v) = given {
        if v.len() != t.nodes.len() {
            return Err(Error::DimensionMismatch(format!("{} velocities for {} nodes", v.len(), t.nodes.len())));
        }
        let c = check_flex(&t, &v);
        passed &= c.signs_ok && c.nontrivial;
        report["given_flex"] = serde_json::to_value(c)?;
    }
    if let Some(trials) = probe {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Invalid(format!("radius must be positive, got {radius}")));
        }
        let pr = local_probe(&p, trials, radius, seed)?;
        passed &= pr.violations == 0;
        report["probe"] = serde_json::to_value(pr)?;
    }
    outcome(&report, passed)
}

fn map(p: &Path, q: &Path, points: &[String], tol: Tolerances) -> Result<Outcome> {
    let p = io::read_polytope(p, tol.geometric)?;
    let q: GraphEmbedding = io::read_embedding(q, tol.geometric)?;
    let rows = points
        .iter()
        .map(|s| {
            let x = parse_point(s, p.dim())?;
            let y = wachspress_map(&p, &q, &x)?;
            Ok(json!({ "point": x.as_slice(), "image": y.as_slice() }))
        })
        .collect::<Result<Vec<_>>>()?;
    outcome(&json!({ "map": rows }), true)
}

fn write_fixtures(name: &str, out: &Path, tol: Tolerances) -> Result<Outcome> {
    let set = fixtures::generate(name)?;
    let files = set.write(out)?;
    let failures = fixtures::revalidate(out, tol.geometric)?;
    let report = json!({
        "manifest": set.manifest(),
        "written": files,
        "failures": failures,
    });
    outcome(&report, failures.is_empty())
}

fn dispatch(cmd: &Command, tol: Tolerances) -> Result<Outcome> {
    match cmd {
        Command::Analyze { file, point } => analyze(file, point, tol),
        Command::Compare { polytope, embedding, point, certificate } => {
            compare(polytope, embedding, point, *certificate, tol)
        }
        Command::Reconstruct { problem, reference, max_iters } => run_reconstruct(problem, reference, *max_iters, tol),
        Command::Rigidity { file, swapped, flex, probe, radius, seed } => {
            rigidity(file, *swapped, flex, *probe, *radius, *seed, tol)
        }
        Command::Map { polytope, embedding, point } => map(polytope, embedding, point, tol),
        Command::Fixtures { name, out } => write_fixtures(name, out, tol),
    }
}

/// Runs one parsed command and returns the process exit status.
pub fn run(cli: &Cli) -> u8 {
    let result = Tolerances::from_env().and_then(|tol| dispatch(&cli.command, tol));
    match result {
        Ok(o) => {
            match serde_json::to_string_pretty(&o.report) {
                Ok(s) => println!("{s}"),
                Err(e) => {
                    eprintln!("polyrig: {e}");
                    return 2;
                }
            }
            if o.passed {
                0
            } else {
                eprintln!("polyrig: check failed");
                1
            }
        }
        Err(e) => {
            eprintln!("polyrig: {e}");
            exit_for(&e)
        }
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(&cli))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("1, -2.5", 2).unwrap(), Point::from_vec(vec![1.0, -2.5]));
        assert!(matches!(parse_point("1,2", 3), Err(Error::DimensionMismatch(_))));
        assert!(matches!(parse_point("1,x", 2), Err(Error::Invalid(_))));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
