//! Run configuration: a JSON document merged with command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use hecke_core::curve::{ClosedPoint, CurvePoint, CurveSpec, EllipticCurve, Pt};
use hecke_core::ehall::{EngineOptions, Gamma2Mode, TowerAlgebra};
use hecke_core::scalars::RationalFunctionV as Rfv;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::expr::parse_laurent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Dot,
    Both,
}

/// `"inf"` or affine coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasePoint {
    Named(String),
    Coords([u32; 2]),
}

impl BasePoint {
    fn parse(s: &str) -> Result<Self, CliError> {
        if s == "inf" {
            return Ok(BasePoint::Named(s.into()));
        }
        let v: Vec<u32> = s
            .split(',')
            .map(|t| t.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Config(format!("base point `{s}` is neither `inf` nor `x,y`")))?;
        match v[..] {
            [x, y] => Ok(BasePoint::Coords([x, y])),
            _ => Err(CliError::Config(format!("base point `{s}` needs two coordinates"))),
        }
    }

    fn to_core(&self) -> Result<Option<(u32, u32)>, CliError> {
        match self {
            BasePoint::Named(s) if s == "inf" => Ok(None),
            BasePoint::Named(s) => Err(CliError::Config(format!("unknown base point `{s}`"))),
            BasePoint::Coords([x, y]) => Ok(Some((*x, *y))),
        }
    }

    pub fn from_core(p: Option<(u32, u32)>) -> Self {
        match p {
            None => BasePoint::Named("inf".into()),
            Some((x, y)) => BasePoint::Coords([x, y]),
        }
    }
}

/// A closed point: `"P<degree>.<index>"`, `{"degree", "rep"}` or rational
/// coordinates `[x, y]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Label(String),
    Rep { degree: u32, rep: u32 },
    Coords([u32; 2]),
}

impl PointSpec {
    fn parse(s: &str) -> Result<Self, CliError> {
        if s.starts_with('P') {
            return Ok(PointSpec::Label(s.into()));
        }
        match BasePoint::parse(s)? {
            BasePoint::Coords(c) => Ok(PointSpec::Coords(c)),
            BasePoint::Named(_) => Err(CliError::Config(format!("point `{s}` must be a label or coordinates"))),
        }
    }

    pub fn resolve(&self, c: &EllipticCurve) -> Result<ClosedPoint, CliError> {
        let bad = |why: String| CliError::Config(format!("point {self:?}: {why}"));
        match self {
            PointSpec::Label(s) => {
                let (d, i) = s
                    .strip_prefix('P')
                    .and_then(|t| t.split_once('.'))
                    .and_then(|(d, i)| Some((d.parse::<u32>().ok()?, i.parse::<u32>().ok()?)))
                    .ok_or_else(|| bad("expected P<degree>.<index>".into()))?;
                if d == 0 || d > c.max_degree() {
                    return Err(bad(format!("degree outside 1..={}", c.max_degree())));
                }
                let n = c.closed_points_of_degree(d).len() as u32;
                if i >= n {
                    return Err(bad(format!("the curve has {n} closed points of degree {d}")));
                }
                Ok(ClosedPoint { degree: d, index: i })
            }
            PointSpec::Rep { degree, rep } => {
                if *degree == 0 || *degree > c.max_degree() || *rep as u64 >= c.count(*degree) {
                    return Err(bad("no such point".into()));
                }
                let x = c.closed_of(*degree, *rep);
                if x.degree != *degree {
                    return Err(bad(format!("the point has degree {}", x.degree)));
                }
                Ok(x)
            }
            PointSpec::Coords([x, y]) => {
                let i = c
                    .point_index(CurvePoint {
                        n: 1,
                        pt: Pt::Aff(*x, *y),
                    })
                    .map_err(|e| bad(e.to_string()))?;
                Ok(c.rational_closed(i))
            }
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub preset: Option<String>,
    pub q: Option<u32>,
    pub coeffs: Option<[u32; 5]>,
    pub base_point: Option<BasePoint>,
    pub max_degree: Option<u32>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    pub step_budget: Option<usize>,
    pub gamma2_constant: Option<String>,
    pub cache_dir: Option<PathBuf>,
}

/// The on-disk configuration document. Every field may be overridden by a flag.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub curve: CurveConfig,
    pub point: Option<PointSpec>,
    pub r: Option<u32>,
    pub rank: Option<i64>,
    pub window: Option<[i64; 2]>,
    pub format: Option<Format>,
    #[serde(default)]
    pub engine: EngineConfig,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named curve: f2-one-point, f3-one-point, f4-one-point, f2-five-points.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub q: Option<u32>,
    /// Weierstrass coefficients `a1,a2,a3,a4,a6` as field element codes.
    #[arg(long, value_delimiter = ',')]
    pub coeffs: Option<Vec<u32>>,
    /// The origin `x0`: `inf` or `x,y`.
    #[arg(long)]
    pub base_point: Option<String>,
    #[arg(long)]
    pub max_degree: Option<u32>,
    #[arg(long)]
    pub rank: Option<i64>,
    #[arg(long = "r")]
    pub r: Option<u32>,
    /// Closed point `x`: `P<degree>.<index>` or rational coordinates `x,y`.
    #[arg(long)]
    pub point: Option<String>,
    /// Slope window `MIN:MAX`.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Constant of the gamma=2 relation: a Laurent polynomial in `v`, or `probe`.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma2_constant: Option<String>,
    #[arg(long)]
    pub step_budget: Option<usize>,
    /// Compute neighborhoods on one thread.
    #[arg(long)]
    pub sequential: bool,
}

/// The `γ = 2` constant as configured, kept verbatim for cache keys.
#[derive(Clone, Debug, PartialEq)]
pub enum Gamma2Choice {
    Unset,
    Probe,
    Value(String, Rfv),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spec: CurveSpec,
    pub point: PointSpec,
    pub r: u32,
    pub rank: i64,
    pub window: (i64, i64),
    /// `None` lets each subcommand pick its default.
    pub format: Option<Format>,
    pub step_budget: usize,
    pub gamma2: Gamma2Choice,
    pub cache_dir: Option<PathBuf>,
    pub sequential: bool,
}

fn parse_window(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Config(format!("window `{s}` is not MIN:MAX"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn resolve_curve(mut cc: CurveConfig, a: &CommonArgs) -> Result<CurveSpec, CliError> {
    if a.preset.is_some() || a.q.is_some() || a.coeffs.is_some() {
        // a curve given on the command line replaces the file's curve
        let md = cc.max_degree;
        cc = CurveConfig {
            max_degree: md,
            ..Default::default()
        };
    }
    cc.preset = a.preset.clone().or(cc.preset);
    cc.q = a.q.or(cc.q);
    if let Some(v) = &a.coeffs {
        let arr: [u32; 5] = v
            .as_slice()
            .try_into()
            .map_err(|_| CliError::Config(format!("expected 5 coefficients, got {}", v.len())))?;
        cc.coeffs = Some(arr);
    }
    if let Some(b) = &a.base_point {
        cc.base_point = Some(BasePoint::parse(b)?);
    }
    cc.max_degree = a.max_degree.or(cc.max_degree);
    let mut spec = match (&cc.preset, cc.q, cc.coeffs) {
        (Some(name), None, None) => {
            CurveSpec::preset(name).ok_or_else(|| CliError::Config(format!("unknown preset `{name}`")))?
        }
        (None, Some(q), Some(coeffs)) => {
            // several rational points may exist, so the origin must be named
            let bp = cc
                .base_point
                .clone()
                .ok_or_else(|| CliError::Config("curve needs an explicit base_point (`inf` or [x, y])".into()))?;
            CurveSpec {
                q,
                coeffs,
                base_point: bp.to_core()?,
                max_degree: 4,
            }
        }
        (None, None, None) => return Err(CliError::Config("no curve configured".into())),
        _ => {
            return Err(CliError::Config(
                "give either a preset or both q and coeffs for the curve".into(),
            ))
        }
    };
    if cc.preset.is_some() {
        if let Some(bp) = &cc.base_point {
            spec.base_point = bp.to_core()?;
        }
    }
    if let Some(d) = cc.max_degree {
        spec.max_degree = d;
    }
    Ok(spec)
}

impl RunConfig {
    pub fn resolve(a: &CommonArgs) -> Result<Self, CliError> {
        let file = match &a.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let spec = resolve_curve(file.curve.clone(), a)?;
        let point = match &a.point {
            Some(s) => PointSpec::parse(s)?,
            None => file.point.clone().unwrap_or(PointSpec::Label("P1.0".into())),
        };
        let window = match &a.window {
            Some(s) => parse_window(s)?,
            None => file.window.map(|[lo, hi]| (lo, hi)).unwrap_or((0, 1)),
        };
        let gamma2 = match a.gamma2_constant.clone().or(file.engine.gamma2_constant.clone()) {
            None => Gamma2Choice::Unset,
            Some(s) if s.trim() == "probe" => Gamma2Choice::Probe,
            Some(s) => {
                let c = parse_laurent(&s).map_err(|e| CliError::Config(format!("gamma2 constant: {e}")))?;
                Gamma2Choice::Value(s, c)
            }
        };
        let cache_dir = std::env::var_os("HECKE_CACHE_DIR")
            .map(PathBuf::from)
            .or(file.engine.cache_dir.clone());
        let cfg = RunConfig {
            spec,
            point,
            r: a.r.or(file.r).unwrap_or(1),
            rank: a.rank.or(file.rank).unwrap_or(2),
            window,
            format: a.format.or(file.format),
            step_budget: a
                .step_budget
                .or(file.engine.step_budget)
                .unwrap_or(EngineOptions::default().step_budget),
            gamma2,
            cache_dir,
            sequential: a.sequential,
        };
        if cfg.rank < 1 {
            return Err(CliError::Config(format!("rank {} must be positive", cfg.rank)));
        }
        if cfg.r == 0 || cfg.r as i64 > cfg.rank {
            return Err(CliError::Config(format!("r = {} outside 1..={}", cfg.r, cfg.rank)));
        }
        Ok(cfg)
    }

    pub fn curve(&self) -> Result<EllipticCurve, CliError> {
        EllipticCurve::new(self.spec.clone()).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn engine_options(&self, curve: &EllipticCurve) -> Result<EngineOptions, CliError> {
        let gamma2 = match &self.gamma2 {
            Gamma2Choice::Unset => Gamma2Mode::Fail,
            Gamma2Choice::Value(_, c) => Gamma2Mode::Constant(c.clone()),
            Gamma2Choice::Probe => {
                let (c, _) = TowerAlgebra::probe_gamma2_constant(1, curve.q() as u64, curve.count(1))
                    .map_err(|e| CliError::engine("probing the gamma=2 constant", e))?;
                Gamma2Mode::Constant(c)
            }
        };
        Ok(EngineOptions {
            step_budget: self.step_budget,
            gamma2,
            split_seed: None,
        })
    }

    /// Character degree needed for rank `n` and `K_x^{⊕r}`.
    pub fn table_degree(&self, curve: &EllipticCurve, x: ClosedPoint) -> u32 {
        (self.rank as u32).max(self.r * x.degree).min(curve.max_degree())
    }
}
