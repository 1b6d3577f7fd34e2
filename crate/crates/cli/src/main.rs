//! `hecke`: curve tables, Hecke graph export and verification suites.

mod config;
mod error;
mod export;
mod expr;
mod verify;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hecke_core::chars::{decompose, CharTables};
use hecke_core::heckegraph::{Execution, HeckePipeline};
use hecke_core::symfunc::{hl_to_p, p_to_hl, Partition};
use serde::Serialize;

use config::{CommonArgs, Format, Gamma2Choice, RunConfig};
use error::CliError;
use export::GraphJson;
use verify::Suite;

#[derive(Parser)]
#[command(name = "hecke", version, about = "Graphs of Hecke operators on elliptic curves over finite fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Point counts, closed points and group structure per degree.
    CurveInfo(CommonArgs),
    /// Compute the slice of `G_{x,r}` in a slope window.
    Graph {
        #[command(flatten)]
        common: CommonArgs,
        /// Write `PREFIX.json` and/or `PREFIX.dot` instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run verification suites; prints a JSON summary.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Suites to run (repeatable); all when omitted.
        #[arg(long = "suite", value_enum)]
        suites: Vec<Suite>,
    },
    /// Expand a power sum in the Hall-Littlewood basis, or back.
    SymfuncExpand {
        /// Partition, e.g. `2,1`.
        partition: String,
        #[arg(long, value_enum, default_value = "p-to-hl")]
        direction: Direction,
        /// The Hall-Littlewood parameter is `t = v^T`.
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        t_exp: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    PToHl,
    HlToP,
}

#[derive(Serialize)]
struct DegreeInfo {
    degree: u32,
    points: u64,
    closed_points: usize,
    /// Invariant factors of `X(F_{q^d}) ≅ Pic^0(X_d)`.
    structure: Vec<u32>,
}

#[derive(Serialize)]
struct ClosedInfo {
    label: String,
    degree: u32,
    rep: u32,
    coords: String,
}

#[derive(Serialize)]
struct CurveInfo {
    q: u32,
    coeffs: [u32; 5],
    degrees: Vec<DegreeInfo>,
    closed_points: Vec<ClosedInfo>,
}

fn curve_info(a: &CommonArgs) -> Result<String, CliError> {
    let cfg = RunConfig::resolve(a)?;
    let c = cfg.curve()?;
    let mut degrees = Vec::new();
    let mut closed = Vec::new();
    for d in 1..=c.max_degree() {
        let s = decompose(&c, d).map_err(|e| CliError::engine("group structure", e))?;
        let pts = c.closed_points_of_degree(d);
        degrees.push(DegreeInfo {
            degree: d,
            points: c.count(d),
            closed_points: pts.len(),
            structure: s.invariant_factors(),
        });
        closed.extend(pts.into_iter().map(|x| ClosedInfo {
            label: x.to_string(),
            degree: d,
            rep: c.closed_rep(x),
            coords: c.describe(x),
        }));
    }
    let info = CurveInfo {
        q: c.q(),
        coeffs: c.spec.coeffs,
        degrees,
        closed_points: closed,
    };
    if cfg.format == Some(Format::Json) {
        return Ok(serde_json::to_string_pretty(&info).expect("serializes") + "\n");
    }
    let [a1, a2, a3, a4, a6] = info.coeffs;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "y^2 + {a1} xy + {a3} y = x^3 + {a2} x^2 + {a4} x + {a6} over F_{}",
        info.q
    );
    for d in &info.degrees {
        let grp = if d.structure.is_empty() {
            "0".to_string()
        } else {
            d.structure.iter().map(|k| format!("Z/{k}")).collect::<Vec<_>>().join(" x ")
        };
        let _ = writeln!(
            out,
            "N_{} = {:<6} closed points of degree {}: {:<5} Pic0(X_{}) = {grp}",
            d.degree, d.points, d.degree, d.closed_points, d.degree
        );
    }
    for p in &info.closed_points {
        let _ = writeln!(out, "{:<8} rep {:<5} {}", p.label, p.rep, p.coords);
    }
    Ok(out)
}

fn cache_key(cfg: &RunConfig) -> String {
    let g = match &cfg.gamma2 {
        Gamma2Choice::Unset => "unset".to_string(),
        Gamma2Choice::Probe => "probe".to_string(),
        Gamma2Choice::Value(_, c) => c.to_string(),
    };
    format!(
        "{:?} {:?} r={} n={} w={:?} g={g} b={}",
        cfg.spec, cfg.point, cfg.r, cfg.rank, cfg.window, cfg.step_budget
    )
}

fn compute_graph(cfg: &RunConfig) -> Result<GraphJson, CliError> {
    let c = cfg.curve()?;
    let x = cfg.point.resolve(&c)?;
    let cache = cfg.cache_dir.as_ref().map(|d| export::cache_path(d, &cache_key(cfg)));
    if let Some(g) = cache.as_deref().and_then(export::read_cache) {
        return Ok(g);
    }
    let t = CharTables::new(&c, cfg.table_degree(&c, x)).map_err(|e| CliError::engine("character tables", e))?;
    let p = HeckePipeline::new(&c, &t, cfg.engine_options(&c)?);
    let exec = if cfg.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let (lo, hi) = cfg.window;
    let slice = p.full_graph(x, cfg.r, cfg.rank, cfg.window, exec).map_err(|e| {
        CliError::engine(
            format!("graph of K_{x}^{}, rank {}, slopes {lo}:{hi}", cfg.r, cfg.rank),
            e,
        )
    })?;
    let g = GraphJson::from_slice(&c, &slice);
    if let Some(path) = &cache {
        export::write_cache(path, &g)?;
    }
    Ok(g)
}

fn graph(a: &CommonArgs, output: Option<&PathBuf>) -> Result<String, CliError> {
    let cfg = RunConfig::resolve(a)?;
    let g = compute_graph(&cfg)?;
    let (json, dot) = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => (Some(g.to_json()), None),
        Format::Dot => (None, Some(g.to_dot())),
        Format::Both => (Some(g.to_json()), Some(g.to_dot())),
    };
    match output {
        Some(prefix) => {
            if let Some(j) = json {
                std::fs::write(prefix.with_extension("json"), j)?;
            }
            if let Some(d) = dot {
                std::fs::write(prefix.with_extension("dot"), d)?;
            }
            Ok(String::new())
        }
        None => Ok(json.unwrap_or_default() + &dot.unwrap_or_default()),
    }
}

fn symfunc_expand(partition: &str, dir: Direction, t_exp: i64) -> Result<String, CliError> {
    let parts: Vec<u32> = partition
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("partition `{partition}` is not a list like 2,1")))?;
    if parts.contains(&0) {
        return Err(CliError::Config("partition parts must be positive".into()));
    }
    let mu = Partition::new(parts);
    let (f, name) = match dir {
        Direction::PToHl => (p_to_hl(&mu, t_exp), "P"),
        Direction::HlToP => (hl_to_p(&mu, t_exp), "p"),
    };
    let f = f.map_err(|e| CliError::engine("expansion", e))?;
    let mut out = String::new();
    for (l, c) in &f.terms {
        let _ = writeln!(out, "{name}{l}\t{c}");
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.cmd {
        Cmd::CurveInfo(a) => curve_info(&a),
        Cmd::Graph { common, output } => graph(&common, output.as_ref()),
        Cmd::Verify { common, mut suites } => {
            let cfg = RunConfig::resolve(&common)?;
            if suites.is_empty() {
                suites = Suite::value_variants().to_vec();
            }
            suites.sort();
            suites.dedup();
            let rep = verify::run(&cfg, &suites)?;
            let text = serde_json::to_string_pretty(&rep).expect("serializes") + "\n";
            if rep.pass {
                Ok(text)
            } else {
                print!("{text}");
                let failed: Vec<String> = rep
                    .suites
                    .iter()
                    .filter(|s| !s.pass)
                    .map(|s| s.suite.to_possible_value().expect("named").get_name().to_string())
                    .collect();
                Err(CliError::Verification(failed.join(", ")))
            }
        }
        Cmd::SymfuncExpand {
            partition,
            direction,
            t_exp,
        } => symfunc_expand(&partition, direction, t_exp),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hecke: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
