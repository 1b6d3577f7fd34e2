//! JSON and DOT export of graph slices, and the on-disk result cache.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hecke_core::curve::EllipticCurve;
use hecke_core::heckegraph::HeckeGraphSlice;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::BasePoint;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveJson {
    pub q: u32,
    pub coeffs: [u32; 5],
    pub base_point: BasePoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointJson {
    pub degree: u32,
    pub rep: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub x: PointJson,
    pub r: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: String,
    pub label: String,
    pub hn: Vec<(i64, i64, String, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub src: String,
    pub dst: String,
    pub mult: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub curve: CurveJson,
    pub operator: OperatorJson,
    pub rank: i64,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
}

impl GraphJson {
    pub fn from_slice(curve: &EllipticCurve, g: &HeckeGraphSlice) -> Self {
        GraphJson {
            curve: CurveJson {
                q: curve.spec.q,
                coeffs: curve.spec.coeffs,
                base_point: BasePoint::from_core(curve.spec.base_point),
            },
            operator: OperatorJson {
                x: PointJson {
                    degree: g.x.degree,
                    rep: curve.closed_rep(g.x),
                },
                r: g.r,
            },
            rank: g.rank,
            vertices: g
                .vertices
                .iter()
                .map(|v| VertexJson {
                    id: v.sheaf.id(),
                    label: v.label.clone(),
                    hn: v.sheaf.hn_rows(),
                })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeJson {
                    src: e.source.id(),
                    dst: e.target.id(),
                    mult: e.multiplicity,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("graph serializes");
        s.push('\n');
        s
    }

    pub fn to_dot(&self) -> String {
        let mut vs: Vec<&VertexJson> = self.vertices.iter().collect();
        let degree = |v: &VertexJson| v.hn.iter().map(|row| row.1).sum::<i64>();
        vs.sort_by(|a, b| (degree(a), &a.label, &a.id).cmp(&(degree(b), &b.label, &b.id)));
        let x = &self.operator.x;
        let mut out = String::new();
        let _ = writeln!(out, "digraph hecke {{");
        let _ = writeln!(
            out,
            "  // x = (degree {}, rep {}), r = {}, rank {}",
            x.degree, x.rep, self.operator.r, self.rank
        );
        for v in vs {
            let _ = writeln!(out, "  {:?} [label={:?}];", v.id, v.label);
        }
        for e in &self.edges {
            let _ = writeln!(out, "  {:?} -> {:?} [label=\"{}\"];", e.src, e.dst, e.mult);
        }
        out.push_str("}\n");
        out
    }
}

/// Cache file for a canonical description of a run.
pub fn cache_path(dir: &Path, key: &str) -> PathBuf {
    let digest = Sha256::digest(format!("hecke {} {key}", env!("CARGO_PKG_VERSION")).as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    dir.join(format!("graph-{hex}.json"))
}

pub fn read_cache(path: &Path) -> Option<GraphJson> {
    let text = std::fs::read_to_string(path).ok()?;
    // an unreadable entry is recomputed and overwritten
    serde_json::from_str(&text).ok()
}

pub fn write_cache(path: &Path, g: &GraphJson) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, g.to_json())?;
    std::fs::rename(tmp, path)
}
