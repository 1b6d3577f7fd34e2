//! Graphs of unramified Hecke operators `G_{x,r}`.
//!
//! For bundles `E, E'` with `deg E = deg E' + r|x|` the multiplicity
//! `m_{x,r}(E, E')` is the coefficient of `E` in `v^{-nr|x|} π^vec(K_x^{⊕r} E')`.
//! The product is computed by expanding both factors in the character basis,
//! normal ordering in the twisted spherical algebras, collapsing back to the
//! point basis and reassembling same-slope, same-point products through
//! Hall-Littlewood functions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::chars::CharTables;
use crate::curve::{ClosedPoint, EllipticCurve};
use crate::ehall::{Dressing, EngineOptions, Generator, HallEngine, HallExpression};
use crate::error::{HeckeError, Result};
use crate::scalars::{qint, CycloScalar, RationalFunctionV as Rfv};
use crate::sheaves::{
    bundles_in_window, bundles_of_type, enumerate_bun2_vertices, euler_form, hn_types, path_of,
    polygon_contains, CoherentSheaf, IndecompSheaf, KVector,
};
use crate::symfunc::{hl_to_p, p_to_hl, Partition};

/// One weighted edge `(source, target, m)` of `G_{x,r}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeckeEdge {
    pub source: CoherentSheaf,
    pub target: CoherentSheaf,
    pub multiplicity: u64,
}

impl fmt::Display for HeckeEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} [{}]", self.source, self.target, self.multiplicity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub sheaf: CoherentSheaf,
    pub label: String,
    /// Reached as a target only; its own neighborhood was not computed.
    pub boundary: bool,
}

/// The part of `G_{x,r}` whose sources lie in a slope window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeGraphSlice {
    pub x: ClosedPoint,
    pub r: u32,
    pub rank: i64,
    pub window: (i64, i64),
    /// Ordered by `(degree, id)`.
    pub vertices: Vec<Vertex>,
    /// Ordered by source, then target.
    pub edges: Vec<HeckeEdge>,
}

/// How `full_graph` distributes neighborhood computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

/// `#Gr(n-r, n)(F_{q_x})`, the Gaussian binomial at `q_x`.
pub fn grassmannian_count(n: u32, r: u32, qx: u64) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let q = BigInt::from(qx);
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for i in 0..r {
        num *= q.pow(n - i) - 1u32;
        den *= q.pow(i + 1) - 1u32;
    }
    num / den
}

/// Checks `Σ m = #Gr(n-r, n)(κ(x))` over a complete neighborhood.
pub fn verify_sum_rule(edges: &[HeckeEdge], x: ClosedPoint, q: u64, r: u32, n: u32) -> Result<bool> {
    let qx = q.pow(x.degree);
    let expected = grassmannian_count(n, r, qx);
    let total: BigInt = edges.iter().map(|e| BigInt::from(e.multiplicity)).sum();
    if total == expected {
        return Ok(true);
    }
    let source = edges
        .first()
        .map(|e| e.source.id())
        .unwrap_or_else(|| "<no edges>".to_string());
    let dump: Vec<String> = edges.iter().map(|e| e.to_string()).collect();
    Err(HeckeError::SumRuleViolation {
        source_id: format!("{source} (edges: {})", dump.join("; ")),
        total: total.to_string(),
        expected: expected.to_string(),
    })
}

/// Point-basis expansion of `K_y^{(λ)}` transported to the ray of `z0`:
/// `u^{2n(λ)} Σ_ν χ_{λν} Π (ν_i / [ν_i |y|]) T_{ν_i |y| z0, y}` with `u = v^{|y|}`.
fn torsion_block(y: ClosedPoint, lambda: &Partition, z0: KVector) -> Result<HallExpression> {
    let dy = y.degree as i64;
    let a = hl_to_p(lambda, 2 * dy)?;
    let pre = Rfv::v_pow(2 * dy * lambda.n_lambda() as i64);
    let mut out = HallExpression::zero();
    for (nu, c) in &a.terms {
        let mut coeff = &pre * c;
        let mut word = Vec::with_capacity(nu.len());
        for &k in nu.parts() {
            let m = k as i64 * dy;
            coeff = &coeff * &(&Rfv::from_int(k as i64) / &qint(m as u32));
            let g = Generator::point(z0.scale(m), y)?.expect("|y| divides m");
            word.push(g);
        }
        word.sort_by(|a, b| a.canonical_cmp(b));
        out.add_term(word, CycloScalar::from_rfv(coeff));
    }
    Ok(out)
}

/// Point-basis expansion of a semistable sheaf.
fn semistable_point_form(f: &CoherentSheaf) -> Result<HallExpression> {
    let mut by_point: BTreeMap<ClosedPoint, Vec<u32>> = BTreeMap::new();
    let mut z0 = None;
    for p in f.parts() {
        by_point.entry(p.point).or_default().push(p.weight);
        z0 = Some(p.class.primitive());
    }
    let Some(z0) = z0 else {
        return Ok(HallExpression::one());
    };
    // blocks at distinct points form direct sums with coefficient one
    let mut acc = HallExpression::one();
    for (y, ws) in by_point {
        acc = acc.mul(&torsion_block(y, &Partition::new(ws), z0)?);
    }
    Ok(sort_words(&acc))
}

fn sort_words(e: &HallExpression) -> HallExpression {
    let mut out = HallExpression::zero();
    for (w, c) in e.terms() {
        let mut w = w.clone();
        w.sort_by(|a, b| a.canonical_cmp(b));
        out.add_term(w, c.clone());
    }
    out
}

/// `K_x^{⊕r}` in the point basis (Newton's identity for `e_r`).
pub fn skyscraper_point_form(x: ClosedPoint, r: u32) -> Result<HallExpression> {
    torsion_block(x, &Partition::ones(r), KVector::raw(0, 1))
}

/// A vector bundle in the point basis: `E = v^{Σ_{i<j} <F_i, F_j>} F_1 ⋯ F_k`.
pub fn bundle_point_form(e: &CoherentSheaf) -> Result<HallExpression> {
    let hn = e.hn_decompose();
    let mut acc = HallExpression::one();
    let mut exp = 0i64;
    for (i, (ci, fi)) in hn.iter().enumerate() {
        for (cj, _) in &hn[i + 1..] {
            exp += euler_form(*ci, *cj);
        }
        acc = acc.mul(&semistable_point_form(fi)?);
    }
    Ok(acc.scale_rfv(&Rfv::v_pow(exp)))
}

/// Rewrites every point-dressed letter `T_{v,y}` in the character basis.
pub fn point_to_char(curve: &EllipticCurve, tables: &CharTables, e: &HallExpression) -> Result<HallExpression> {
    let mut rows: HashMap<Generator, Vec<(Generator, CycloScalar)>> = HashMap::new();
    let mut out = HallExpression::zero();
    for (w, c) in e.terms() {
        let mut acc: Vec<(Vec<Generator>, CycloScalar)> = vec![(Vec::new(), c.clone())];
        for g in w {
            if !rows.contains_key(g) {
                let row = match g.dressing {
                    Dressing::Point(y) => tables
                        .point_to_char_row(curve, g.v.gamma() as u32, y)?
                        .into_iter()
                        .map(|(o, c)| Ok((Generator::char(g.v, o)?, c)))
                        .collect::<Result<Vec<_>>>()?,
                    Dressing::Char(_) => vec![(*g, CycloScalar::from_rfv(Rfv::one()))],
                };
                rows.insert(*g, row);
            }
            let row = &rows[g];
            let mut next = Vec::with_capacity(acc.len() * row.len());
            for (a, x) in &acc {
                for (h, y) in row {
                    let mut a = a.clone();
                    a.push(*h);
                    next.push((a, x.mul(y)));
                }
            }
            acc = next;
        }
        for (w, c) in acc {
            out.add_term(w, c);
        }
    }
    Ok(out)
}

/// `T_v^O = Σ_{|x| divides γ(v)} Õ(x) T_{v,x}`, summed literally; words are
/// returned in canonical order so that equal point words merge.
pub fn char_to_point(curve: &EllipticCurve, tables: &CharTables, e: &HallExpression) -> Result<HallExpression> {
    let mut rows: HashMap<Generator, Vec<(Generator, CycloScalar)>> = HashMap::new();
    let mut out = HallExpression::zero();
    for (w, c) in e.terms() {
        let mut acc: Vec<(Vec<Generator>, CycloScalar)> = vec![(Vec::new(), c.clone())];
        for g in w {
            if !rows.contains_key(g) {
                let row = match g.dressing {
                    Dressing::Char(o) => {
                        let gam = g.v.gamma() as u32;
                        let mut row = Vec::new();
                        for e in (1..=gam).filter(|e| gam.is_multiple_of(*e)) {
                            for x in curve.closed_points_of_degree(e) {
                                let val = tables.orbit_value(o, x)?;
                                if !val.is_zero() {
                                    let h = Generator::point(g.v, x)?.expect("|x| divides γ");
                                    row.push((h, val));
                                }
                            }
                        }
                        row
                    }
                    Dressing::Point(_) => vec![(*g, CycloScalar::from_rfv(Rfv::one()))],
                };
                rows.insert(*g, row);
            }
            let row = &rows[g];
            let mut next = Vec::with_capacity(acc.len() * row.len());
            for (a, x) in &acc {
                for (h, y) in row {
                    let mut a = a.clone();
                    a.push(*h);
                    next.push((a, x.mul(y)));
                }
            }
            acc = next;
        }
        for (mut w, c) in acc {
            w.sort_by(|a, b| a.canonical_cmp(b));
            out.add_term(w, c);
        }
    }
    Ok(out)
}

/// A convex point-basis word as a combination of sheaves.
///
/// Letters of one slope at one point `y` with `γ(v_i) = ν_i |y|` give
/// `Π ([ν_i |y|] / ν_i) Σ_λ χ^{-1}_{νλ} u^{-2n(λ)} K_y^{(λ)}`; distinct points
/// and distinct slopes are direct sums, the latter weighted by
/// `v^{-Σ_{i<j} <F_i, F_j>}`.
pub fn point_word_to_sheaves(word: &[Generator]) -> Result<Vec<(CoherentSheaf, Rfv)>> {
    // split into slope groups
    let mut groups: Vec<Vec<Generator>> = Vec::new();
    for g in word {
        match groups.last_mut() {
            Some(grp) if grp[0].v.same_slope(&g.v) => grp.push(*g),
            _ => groups.push(vec![*g]),
        }
    }
    let classes: Vec<KVector> = groups
        .iter()
        .map(|grp| grp.iter().fold(KVector::raw(0, 0), |a, g| a.add(&g.v)))
        .collect();
    let mut exp = 0i64;
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            exp -= euler_form(classes[i], classes[j]);
        }
    }
    let mut acc: Vec<(Vec<IndecompSheaf>, Rfv)> = vec![(Vec::new(), Rfv::v_pow(exp))];
    for grp in &groups {
        let z0 = grp[0].v.primitive();
        let mut at: BTreeMap<ClosedPoint, Vec<u32>> = BTreeMap::new();
        for g in grp {
            let Dressing::Point(y) = g.dressing else {
                return Err(HeckeError::Invariant(format!("{g} is not point dressed")));
            };
            at.entry(y).or_default().push((g.v.gamma() / y.degree as i64) as u32);
        }
        for (y, nus) in at {
            let dy = y.degree as i64;
            let nu = Partition::new(nus);
            let mut pre = Rfv::one();
            for &k in nu.parts() {
                pre = &pre * &(&qint(k * y.degree) / &Rfv::from_int(k as i64));
            }
            let expansion = p_to_hl(&nu, 2 * dy)?;
            let mut next = Vec::new();
            for (parts, c) in &acc {
                for (lambda, x) in &expansion.terms {
                    let coeff = &(c * &pre) * &(x * &Rfv::v_pow(-2 * dy * lambda.n_lambda() as i64));
                    let mut p = parts.clone();
                    for &l in lambda.parts() {
                        p.push(IndecompSheaf::new(z0.scale(l as i64 * dy), y, l)?);
                    }
                    next.push((p, coeff));
                }
            }
            acc = next;
        }
    }
    Ok(acc
        .into_iter()
        .map(|(p, c)| (CoherentSheaf::new(p), c))
        .collect())
}

/// `E ⊗ O(D)` for a divisor `D = k x0 + (p - x0)` with `p` a rational point
/// (index into level 1): each indecomposable of class `(n, d)` moves to
/// `(n, d + kn)` and its point is translated by `(n / γ) p`.
pub fn twist(curve: &EllipticCurve, e: &CoherentSheaf, k: i64, p: u32) -> Result<CoherentSheaf> {
    let parts = e
        .parts()
        .iter()
        .map(|s| {
            let c = s.class;
            let shift = curve.mul_idx(1, p, c.n / c.gamma());
            let y = curve.closed_translate(s.point, shift);
            IndecompSheaf::new(KVector::raw(c.n, c.d + k * c.n), y, s.weight)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherentSheaf::new(parts))
}

/// `E(-x) = E ⊗ O(-|x| x0) ⊗ O(|x| x0 - x)`.
pub fn twist_down(curve: &EllipticCurve, e: &CoherentSheaf, x: ClosedPoint) -> Result<CoherentSheaf> {
    let p = curve.neg_idx(1, curve.closed_norm(x));
    twist(curve, e, -(x.degree as i64), p)
}

/// Converts a coefficient of `v^{-nr|x|} π^vec(K E')` into a multiplicity.
fn extract(q: u64, target: &CoherentSheaf, c: &Rfv) -> Result<Option<u64>> {
    let (a, b) = c.curve_parts(q)?;
    let bad = || HeckeError::NonIntegerMultiplicity {
        target: target.id(),
        value: c.to_string(),
    };
    if !b.is_zero() || !a.is_integer() || a.is_negative() {
        return Err(bad());
    }
    if a.is_zero() {
        return Ok(None);
    }
    a.to_integer().to_u64().map(Some).ok_or_else(bad)
}

type Products = BTreeMap<CoherentSheaf, u64>;

/// The end-to-end pipeline for one curve.
pub struct HeckePipeline<'a> {
    engine: HallEngine<'a>,
    products: Mutex<HashMap<(CoherentSheaf, ClosedPoint, u32), Arc<Products>>>,
}

impl<'a> HeckePipeline<'a> {
    pub fn new(curve: &'a EllipticCurve, tables: &'a CharTables, opts: EngineOptions) -> Self {
        HeckePipeline {
            engine: HallEngine::new(curve, tables, opts),
            products: Mutex::new(HashMap::new()),
        }
    }

    pub fn engine(&self) -> &HallEngine<'a> {
        &self.engine
    }

    pub fn curve(&self) -> &EllipticCurve {
        self.engine.curve()
    }

    fn q(&self) -> u64 {
        self.curve().q() as u64
    }

    fn check_inputs(&self, e: &CoherentSheaf, x: ClosedPoint, r: u32) -> Result<()> {
        if !e.is_vector_bundle() || e.rank() == 0 {
            return Err(HeckeError::Invariant(format!("{e} is not a vector bundle")));
        }
        if r == 0 || r as i64 > e.rank() {
            return Err(HeckeError::Invariant(format!(
                "r = {r} outside 1..={}",
                e.rank()
            )));
        }
        let need = (e.rank() as u32).max(r * x.degree);
        let have = self.engine.tables().max_degree().min(self.curve().max_degree());
        if need > have {
            return Err(HeckeError::DegreeBoundExceeded {
                requested: need,
                bound: have,
            });
        }
        Ok(())
    }

    /// `K_x^{⊕r}` in the character basis.
    pub fn expand_skyscraper(&self, x: ClosedPoint, r: u32) -> Result<HallExpression> {
        point_to_char(self.curve(), self.engine.tables(), &skyscraper_point_form(x, r)?)
    }

    /// A vector bundle in the character basis.
    pub fn expand_bundle(&self, e: &CoherentSheaf) -> Result<HallExpression> {
        point_to_char(self.curve(), self.engine.tables(), &bundle_point_form(e)?)
    }

    /// Collapses a normal-ordered character-basis expression to sheaves.
    pub fn to_sheaves(&self, e: &HallExpression) -> Result<BTreeMap<CoherentSheaf, Rfv>> {
        let q = self.q();
        let pts = char_to_point(self.curve(), self.engine.tables(), e)?;
        let mut out: BTreeMap<CoherentSheaf, Rfv> = BTreeMap::new();
        for (w, c) in pts.terms() {
            let c = c.reduce_at_curve(q)?.to_rfv()?;
            if c.is_zero() {
                continue;
            }
            for (s, x) in point_word_to_sheaves(w)? {
                *out.entry(s).or_default() += &(&c * &x);
            }
        }
        let mut red = BTreeMap::new();
        for (s, c) in out {
            let c = c.reduce_at_curve(q)?;
            if !c.is_zero() {
                red.insert(s, c);
            }
        }
        Ok(red)
    }

    /// `π^vec(K_x^{⊕r} E')` as sheaf coefficients (before rescaling).
    pub fn product(&self, e_prime: &CoherentSheaf, x: ClosedPoint, r: u32) -> Result<BTreeMap<CoherentSheaf, Rfv>> {
        let k = self.expand_skyscraper(x, r)?;
        let e = self.expand_bundle(e_prime)?;
        let nf = self.engine.normal_order(&k.mul(&e), true)?;
        self.to_sheaves(&nf)
    }

    /// The same product through the commutator `π^vec[K_x^{⊕r}, E']`.
    pub fn product_via_commutator(
        &self,
        e_prime: &CoherentSheaf,
        x: ClosedPoint,
        r: u32,
        vec_only: bool,
    ) -> Result<BTreeMap<CoherentSheaf, Rfv>> {
        let k = self.expand_skyscraper(x, r)?;
        let e = self.expand_bundle(e_prime)?;
        let nf = self.engine.commutator(&k, &e, vec_only)?;
        self.to_sheaves(&nf)
    }

    /// All `m_{x,r}(E, E')` for fixed `E'`, memoized.
    fn multiplicities_into(&self, e_prime: &CoherentSheaf, x: ClosedPoint, r: u32) -> Result<Arc<Products>> {
        let key = (e_prime.clone(), x, r);
        if let Some(p) = self.products.lock().expect("product cache").get(&key) {
            return Ok(p.clone());
        }
        let n = e_prime.rank();
        let shift = r as i64 * x.degree as i64;
        let scale = Rfv::v_pow(-n * shift);
        let target_class = e_prime.class().add(&KVector::raw(0, shift));
        let e_path = path_of(e_prime);
        let mut out = Products::new();
        for (s, c) in self.product(e_prime, x, r)? {
            let Some(m) = extract(self.q(), &s, &(&c * &scale))? else {
                continue;
            };
            if s.class() != target_class || !s.is_vector_bundle() {
                return Err(HeckeError::Invariant(format!(
                    "class of {s} differs from {target_class}"
                )));
            }
            if !polygon_contains(&path_of(&s), shift, &e_path) {
                return Err(HeckeError::PolygonViolation(format!(
                    "{e_prime} is not inside the polygon of {s}"
                )));
            }
            out.insert(s, m);
        }
        let out = Arc::new(out);
        self.products
            .lock()
            .expect("product cache")
            .insert(key, out.clone());
        Ok(out)
    }

    /// Edges `(E, E', m)` ending at `E'`: one product `K_x^{⊕r} E'`.
    pub fn incoming(&self, e_prime: &CoherentSheaf, x: ClosedPoint, r: u32) -> Result<Vec<HeckeEdge>> {
        self.check_inputs(e_prime, x, r)?;
        Ok(self
            .multiplicities_into(e_prime, x, r)?
            .iter()
            .map(|(s, &m)| HeckeEdge {
                source: s.clone(),
                target: e_prime.clone(),
                multiplicity: m,
            })
            .collect())
    }

    /// Candidate targets: every `E'` whose path lies in `P(x, r, E)`.
    pub fn candidates(&self, e: &CoherentSheaf, x: ClosedPoint, r: u32) -> Result<Vec<CoherentSheaf>> {
        let n = e.rank();
        let shift = r as i64 * x.degree as i64;
        let path = path_of(e);
        let lo = path.iter().map(|c| c.d.div_euclid(c.n)).min().unwrap_or(0) - shift;
        let hi = path
            .iter()
            .map(|c| -((-c.d).div_euclid(c.n)))
            .max()
            .unwrap_or(0);
        let mut out = Vec::new();
        for t in hn_types(n, e.degree() - shift, (lo, hi), &|_| true) {
            if polygon_contains(&path, shift, &t) {
                out.extend(bundles_of_type(self.curve(), &t)?);
            }
        }
        Ok(out)
    }

    /// `V_{x,r}(E)`: all edges leaving `E`, checked against the sum rule.
    pub fn neighborhood(&self, e: &CoherentSheaf, x: ClosedPoint, r: u32) -> Result<Vec<HeckeEdge>> {
        self.check_inputs(e, x, r)?;
        let n = e.rank();
        let edges = if r as i64 == n {
            vec![HeckeEdge {
                source: e.clone(),
                target: twist_down(self.curve(), e, x)?,
                multiplicity: 1,
            }]
        } else {
            let mut edges = Vec::new();
            for c in self.candidates(e, x, r)? {
                if let Some(&m) = self.multiplicities_into(&c, x, r)?.get(e) {
                    edges.push(HeckeEdge {
                        source: e.clone(),
                        target: c,
                        multiplicity: m,
                    });
                }
            }
            edges
        };
        verify_sum_rule(&edges, x, self.q(), r, n as u32)?;
        let mut edges = edges;
        edges.sort_by_key(|a| (a.target.degree(), a.target.id()));
        Ok(edges)
    }

    /// The slice of `G_{x,r}` on rank-`n` bundles with HN slopes in `[lo, hi]`.
    pub fn full_graph(&self, x: ClosedPoint, r: u32, n: i64, window: (i64, i64), exec: Execution) -> Result<HeckeGraphSlice>
    where
        Self: Sync,
    {
        let (lo, hi) = window;
        let vertices: Vec<CoherentSheaf> = if n == 2 {
            enumerate_bun2_vertices(self.curve(), lo, hi)?
                .into_iter()
                .map(|(e, _)| e)
                .collect()
        } else {
            bundles_in_window(self.curve(), n, lo, hi)?
        };
        let hoods = self.map_vertices(&vertices, x, r, exec)?;
        let inside: BTreeSet<&CoherentSheaf> = vertices.iter().collect();
        let mut all: BTreeMap<(i64, String), Vertex> = BTreeMap::new();
        for v in &vertices {
            all.insert(
                (v.degree(), v.id()),
                Vertex {
                    sheaf: v.clone(),
                    label: v.display_name(self.curve()),
                    boundary: false,
                },
            );
        }
        let mut edges = Vec::new();
        for hood in hoods {
            for e in hood {
                if !inside.contains(&e.target) {
                    all.entry((e.target.degree(), e.target.id())).or_insert(Vertex {
                        sheaf: e.target.clone(),
                        label: e.target.display_name(self.curve()),
                        boundary: true,
                    });
                }
                edges.push(e);
            }
        }
        edges.sort_by(|a, b| {
            (a.source.degree(), a.source.id(), a.target.degree(), a.target.id()).cmp(&(
                b.source.degree(),
                b.source.id(),
                b.target.degree(),
                b.target.id(),
            ))
        });
        Ok(HeckeGraphSlice {
            x,
            r,
            rank: n,
            window,
            vertices: all.into_values().collect(),
            edges,
        })
    }

    #[cfg(feature = "parallel")]
    fn map_vertices(
        &self,
        vertices: &[CoherentSheaf],
        x: ClosedPoint,
        r: u32,
        exec: Execution,
    ) -> Result<Vec<Vec<HeckeEdge>>> {
        use rayon::prelude::*;
        match exec {
            Execution::Parallel => vertices
                .par_iter()
                .map(|v| self.neighborhood(v, x, r))
                .collect(),
            Execution::Sequential => vertices.iter().map(|v| self.neighborhood(v, x, r)).collect(),
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn map_vertices(
        &self,
        vertices: &[CoherentSheaf],
        x: ClosedPoint,
        r: u32,
        _exec: Execution,
    ) -> Result<Vec<Vec<HeckeEdge>>> {
        vertices.iter().map(|v| self.neighborhood(v, x, r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveSpec;

    fn setup(spec: CurveSpec, d: u32) -> (EllipticCurve, CharTables) {
        let c = EllipticCurve::new(spec).unwrap();
        let t = CharTables::new(&c, d).unwrap();
        (c, t)
    }

    fn line(c: &EllipticCurve, d: i64, p: u32) -> IndecompSheaf {
        IndecompSheaf::new(KVector::raw(1, d), c.rational_closed(p), 1).unwrap()
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(grassmannian_count(2, 1, 2), BigInt::from(3));
        assert_eq!(grassmannian_count(3, 1, 2), BigInt::from(7));
        assert_eq!(grassmannian_count(3, 2, 2), BigInt::from(7));
        assert_eq!(grassmannian_count(3, 3, 5), BigInt::from(1));
        assert_eq!(grassmannian_count(4, 2, 2), BigInt::from(35));
    }

    #[test]
    fn skyscraper_rank_two_point_form() {
        let (c, _) = setup(CurveSpec::f2_one_point(), 2);
        let x = c.rational_closed(0);
        let e = skyscraper_point_form(x, 2).unwrap();
        let t1 = Generator::point(KVector::raw(0, 1), x).unwrap().unwrap();
        let t2 = Generator::point(KVector::raw(0, 2), x).unwrap().unwrap();
        // (v^2/2)(T_1^2 - (2/[2]) T_2)
        let half = Rfv::from_ratio(1, 2);
        assert_eq!(
            e.terms()[&vec![t1, t1]].to_rfv().unwrap(),
            &Rfv::v_pow(2) * &half
        );
        assert_eq!(
            e.terms()[&vec![t2]].to_rfv().unwrap(),
            -(&Rfv::v_pow(2) / &qint(2))
        );
    }

    #[test]
    fn rank_two_torsion_letter_to_sheaves() {
        // T_{(2,2d),y} = [2]/2 (E_{(y,2)} + (1 - v^{-2}) E_{(y,1)}^{⊕2}) for |y| = 1
        let (c, _) = setup(CurveSpec::f2_one_point(), 2);
        let y = c.rational_closed(0);
        let g = Generator::point(KVector::raw(2, 4), y).unwrap().unwrap();
        let got: BTreeMap<_, _> = point_word_to_sheaves(&[g]).unwrap().into_iter().collect();
        let e2 = CoherentSheaf::new(vec![IndecompSheaf::new(KVector::raw(2, 4), y, 2).unwrap()]);
        let e11 = CoherentSheaf::new(vec![line(&c, 2, 0), line(&c, 2, 0)]);
        let h = &qint(2) / &Rfv::from_int(2);
        assert_eq!(got[&e2], h);
        assert_eq!(got[&e11], &h * &(&Rfv::one() - &Rfv::v_pow(-2)));
    }

    #[test]
    fn rank_three_torsion_letter_to_sheaves() {
        // v^{-2} T_{(3,d+1),y}, |y| = 1
        let (c, _) = setup(CurveSpec::f2_one_point(), 3);
        let y = c.rational_closed(0);
        let g = Generator::point(KVector::raw(3, 3), y).unwrap().unwrap();
        let got: BTreeMap<_, _> = point_word_to_sheaves(&[g]).unwrap().into_iter().collect();
        let s = |v: Vec<(i64, i64, u32)>| {
            CoherentSheaf::new(
                v.into_iter()
                    .map(|(n, d, w)| IndecompSheaf::new(KVector::raw(n, d), y, w).unwrap())
                    .collect(),
            )
        };
        let third = |l: Rfv| &(&l * &Rfv::v_pow(2)) / &Rfv::from_int(3);
        assert_eq!(got[&s(vec![(3, 3, 3)])], third(Rfv::laurent(-4, &[1, 0, 1, 0, 1])));
        assert_eq!(
            got[&s(vec![(1, 1, 1), (2, 2, 2)])],
            third(Rfv::laurent(-6, &[-1, 0, 0, 0, 0, 0, 1]))
        );
        assert_eq!(
            got[&s(vec![(1, 1, 1), (1, 1, 1), (1, 1, 1)])],
            third(Rfv::laurent(-10, &[1, 0, 0, 0, -1, 0, -1, 0, 0, 0, 1]))
        );
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn point_and_char_forms_roundtrip() {
        let (c, t) = setup(CurveSpec::f2_five_points(), 2);
        let e = CoherentSheaf::new(vec![line(&c, 0, 1), line(&c, 1, 3)]);
        let pf = bundle_point_form(&e).unwrap();
        let back = char_to_point(&c, &t, &point_to_char(&c, &t, &pf).unwrap()).unwrap();
        let mut diff = back.clone();
        diff.add(&pf.scale(&CycloScalar::from_rfv(-Rfv::one())));
        let q = 2;
        for x in diff.terms().values() {
            assert!(x.reduce_at_curve(q).unwrap().is_zero());
        }
    }

    #[test]
    fn bundle_roundtrips_through_sheaves() {
        let (c, t) = setup(CurveSpec::f2_one_point(), 2);
        let p = HeckePipeline::new(&c, &t, EngineOptions::default());
        let y2 = c.closed_points_of_degree(2)[0];
        for e in [
            CoherentSheaf::new(vec![line(&c, 0, 0), line(&c, 3, 0)]),
            CoherentSheaf::new(vec![line(&c, 1, 0), line(&c, 1, 0)]),
            CoherentSheaf::new(vec![IndecompSheaf::new(KVector::raw(2, 2), y2, 1).unwrap()]),
        ] {
            let got = p.to_sheaves(&p.expand_bundle(&e).unwrap()).unwrap();
            assert_eq!(got.len(), 1, "{e}: {got:?}");
            assert!(got[&e].is_one());
        }
    }

    #[test]
    fn line_bundle_twist() {
        let (c, t) = setup(CurveSpec::f2_five_points(), 1);
        let p = HeckePipeline::new(&c, &t, EngineOptions::default());
        for xi in 0..5 {
            let x = c.rational_closed(xi);
            for yi in 0..5 {
                let l = CoherentSheaf::new(vec![line(&c, 0, yi)]);
                let edges = p.incoming(&l, x, 1).unwrap();
                assert_eq!(edges.len(), 1);
                assert_eq!(edges[0].multiplicity, 1);
                assert_eq!(twist_down(&c, &edges[0].source, x).unwrap(), l);
            }
        }
    }

    #[test]
    fn large_gap_rank_two() {
        let (c, t) = setup(CurveSpec::f2_one_point(), 2);
        let p = HeckePipeline::new(&c, &t, EngineOptions::default());
        let x = c.rational_closed(0);
        let e = CoherentSheaf::new(vec![line(&c, 0, 0), line(&c, 3, 0)]);
        let hood = p.neighborhood(&e, x, 1).unwrap();
        let ms: Vec<(i64, u64)> = hood
            .iter()
            .map(|h| (h.target.parts()[0].class.d, h.multiplicity))
            .collect();
        assert_eq!(ms, vec![(-1, 1), (0, 2)]);
    }

    #[test]
    fn double_line_bundle() {
        let (c, t) = setup(CurveSpec::f2_one_point(), 2);
        let p = HeckePipeline::new(&c, &t, EngineOptions::default());
        let x = c.rational_closed(0);
        let e = CoherentSheaf::new(vec![line(&c, 1, 0), line(&c, 1, 0)]);
        let hood = p.neighborhood(&e, x, 1).unwrap();
        assert_eq!(hood.len(), 1);
        assert_eq!(hood[0].multiplicity, 3);
        assert_eq!(hood[0].target, CoherentSheaf::new(vec![line(&c, 0, 0), line(&c, 1, 0)]));
    }

    fn derive() -> EngineOptions {
        EngineOptions {
            gamma2: crate::ehall::Gamma2Mode::Derive,
            ..Default::default()
        }
    }

    #[test]
    fn full_rank_product_is_a_twist() {
        // second route for the r = n shortcut in `neighborhood`
        for spec in [CurveSpec::f2_one_point(), CurveSpec::f3_one_point(), CurveSpec::f2_five_points()] {
            let (c, t) = setup(spec, 2);
            let p = HeckePipeline::new(&c, &t, derive());
            let x = c.rational_closed(0);
            for e in [
                CoherentSheaf::new(vec![line(&c, 0, 0), line(&c, 0, 0)]),
                CoherentSheaf::new(vec![line(&c, 0, 0), line(&c, 1, 0)]),
                CoherentSheaf::new(vec![IndecompSheaf::new(KVector::raw(2, 1), c.rational_closed(0), 1).unwrap()]),
            ] {
                let edges = p.incoming(&e, x, 2).unwrap();
                assert_eq!(edges.len(), 1, "{e}");
                assert_eq!(edges[0].multiplicity, 1);
                assert_eq!(twist_down(&c, &edges[0].source, x).unwrap(), e);
            }
        }
    }

    #[test]
    fn rank_three_full_product_is_a_twist() {
        let (c, t) = setup(CurveSpec::f2_one_point(), 3);
        let p = HeckePipeline::new(&c, &t, derive());
        let x = c.rational_closed(0);
        let e = CoherentSheaf::new(vec![line(&c, 0, 0), line(&c, 0, 0), line(&c, 0, 0)]);
        let edges = p.incoming(&e, x, 3).unwrap();
        assert_eq!(edges.len(), 1);
        assert_eq!(edges[0].multiplicity, 1);
        assert_eq!(twist_down(&c, &edges[0].source, x).unwrap(), e);
    }

    #[test]
    fn product_agrees_with_commutator() {
        let (c, t) = setup(CurveSpec::f2_one_point(), 2);
        let p = HeckePipeline::new(&c, &t, derive());
        let x = c.rational_closed(0);
        let y2 = c.closed_points_of_degree(2)[0];
        for (e, r) in [
            (CoherentSheaf::new(vec![line(&c, 0, 0), line(&c, 2, 0)]), 1),
            (CoherentSheaf::new(vec![IndecompSheaf::new(KVector::raw(2, 1), x, 1).unwrap()]), 1),
            (CoherentSheaf::new(vec![IndecompSheaf::new(KVector::raw(2, 0), y2, 1).unwrap()]), 1),
            (CoherentSheaf::new(vec![line(&c, 0, 0), line(&c, 0, 0)]), 2),
        ] {
            let a = p.product(&e, x, r).unwrap();
            let b = p.product_via_commutator(&e, x, r, true).unwrap();
            assert_eq!(a, b, "{e}, r = {r}");
        }
    }

    #[test]
    fn unprojected_commutator_drops_the_torsion_tail() {
        // [K, E] = KE - EK; EK has a torsion quotient, so its vector part is zero
        let (c, t) = setup(CurveSpec::f2_one_point(), 2);
        let p = HeckePipeline::new(&c, &t, derive());
        let x = c.rational_closed(0);
        let e = CoherentSheaf::new(vec![line(&c, 0, 0), line(&c, 1, 0)]);
        let full = p.product_via_commutator(&e, x, 1, false).unwrap();
        let vec_part: BTreeMap<_, _> = full.into_iter().filter(|(s, _)| s.is_vector_bundle()).collect();
        assert_eq!(vec_part, p.product(&e, x, 1).unwrap());
    }

    #[test]
    fn rank_three_two_step_sum_rule() {
        let (c, t) = setup(CurveSpec::f2_one_point(), 3);
        let p = HeckePipeline::new(&c, &t, derive());
        let x = c.rational_closed(0);
        let y3 = c.closed_points_of_degree(3)[0];
        for e in [
            CoherentSheaf::new(vec![line(&c, 0, 0), line(&c, 1, 0), line(&c, 1, 0)]),
            CoherentSheaf::new(vec![IndecompSheaf::new(KVector::raw(3, 3), y3, 1).unwrap()]),
        ] {
            let hood = p.neighborhood(&e, x, 2).unwrap();
            let total: u64 = hood.iter().map(|h| h.multiplicity).sum();
            assert_eq!(total, 7, "{e}");
        }
    }
}
