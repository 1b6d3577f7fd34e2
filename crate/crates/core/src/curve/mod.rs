//! Elliptic curves over `F_q`: point enumeration over the extension tower,
//! Frobenius, closed points, and the group law with a chosen rational
//! origin `x0`.
//!
//! Points of `X(F_{q^n})` are identified with `Pic^0(X_n)` through
//! `p -> O(p - x0)`, so every group-theoretic operation here is an operation
//! on degree-zero line bundles.

mod field;

use std::collections::HashMap;
use std::fmt;

pub use field::{FieldTower, GfTable};

use crate::error::{HeckeError, Result};

/// Affine coordinates or the point at infinity, over a field fixed by context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pt {
    Inf,
    Aff(u32, u32),
}

/// A point together with the degree of the field it is written over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurvePoint {
    pub n: u32,
    pub pt: Pt,
}

/// Closed point of `X`: a Frobenius orbit, identified by `(degree, index)`
/// into the curve's sorted table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClosedPoint {
    pub degree: u32,
    pub index: u32,
}

impl fmt::Display for ClosedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}.{}", self.degree, self.index)
    }
}

/// Curve specification as accepted from configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    pub q: u32,
    /// `[a1, a2, a3, a4, a6]`, field elements of `F_q` in digit encoding.
    pub coeffs: [u32; 5],
    /// Affine base point, or `None` for the point at infinity.
    pub base_point: Option<(u32, u32)>,
    pub max_degree: u32,
}

impl CurveSpec {
    /// `y^2 + y = x^3 + x + 1` over `F_2`, one rational point.
    pub fn f2_one_point() -> Self {
        CurveSpec {
            q: 2,
            coeffs: [0, 0, 1, 1, 1],
            base_point: None,
            max_degree: 4,
        }
    }

    /// `y^2 = x^3 + 2x + 2` over `F_3`, one rational point.
    pub fn f3_one_point() -> Self {
        CurveSpec {
            q: 3,
            coeffs: [0, 0, 0, 2, 2],
            base_point: None,
            max_degree: 4,
        }
    }

    /// `y^2 + y = x^3 + a` over `F_4 = F_2(a)`, one rational point.
    pub fn f4_one_point() -> Self {
        CurveSpec {
            q: 4,
            coeffs: [0, 0, 1, 0, 2],
            base_point: None,
            max_degree: 4,
        }
    }

    /// `y^2 + y = x^3 + x` over `F_2`, five rational points.
    pub fn f2_five_points() -> Self {
        CurveSpec {
            q: 2,
            coeffs: [0, 0, 1, 1, 0],
            base_point: None,
            max_degree: 4,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "f2-one-point" => Some(Self::f2_one_point()),
            "f3-one-point" => Some(Self::f3_one_point()),
            "f4-one-point" => Some(Self::f4_one_point()),
            "f2-five-points" => Some(Self::f2_five_points()),
            _ => None,
        }
    }
}

/// Per-degree point data: sorted points, lookup, and group tables.
#[derive(Clone, Debug)]
struct Level {
    points: Vec<Pt>,
    index: HashMap<Pt, u32>,
    /// `add[i * N + j]` is the index of `p_i ⊕ p_j` (origin `x0`).
    add: Vec<u32>,
    neg: Vec<u32>,
    frob: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct EllipticCurve {
    pub spec: CurveSpec,
    pub tower: FieldTower,
    levels: Vec<Level>,
    /// `closed[d - 1]`: representatives (indices into level `d`) of closed points of degree `d`.
    closed: Vec<Vec<u32>>,
    /// `orbit_of[d - 1][i]`: closed point containing point `i` of level `d`, if its degree is `d`.
    orbit_of: Vec<Vec<Option<ClosedPoint>>>,
}

impl EllipticCurve {
    pub fn new(spec: CurveSpec) -> Result<Self> {
        let tower = FieldTower::new(spec.q, spec.max_degree)?;
        let f1 = tower.field(1)?;
        if spec.coeffs.iter().any(|&c| c >= f1.size) {
            return Err(HeckeError::InvalidCurve("coefficient outside F_q".into()));
        }
        let mut curve = EllipticCurve {
            spec: spec.clone(),
            tower,
            levels: Vec::new(),
            closed: Vec::new(),
            orbit_of: Vec::new(),
        };
        if curve.discriminant() == 0 {
            return Err(HeckeError::InvalidCurve("singular Weierstrass equation".into()));
        }
        let base = match spec.base_point {
            None => Pt::Inf,
            Some((x, y)) => Pt::Aff(x, y),
        };
        if !curve.on_curve(1, base) {
            return Err(HeckeError::InvalidCurve(format!(
                "base point {base:?} does not lie on the curve"
            )));
        }
        for n in 1..=spec.max_degree {
            let level = curve.build_level(n, base)?;
            curve.levels.push(level);
        }
        curve.build_closed_points();
        curve.check_hasse_weil()?;
        Ok(curve)
    }

    pub fn q(&self) -> u32 {
        self.spec.q
    }

    pub fn max_degree(&self) -> u32 {
        self.spec.max_degree
    }

    fn coeff(&self, i: usize, n: u32) -> u32 {
        self.tower.embed(self.spec.coeffs[i], 1, n).expect("1 divides n")
    }

    fn discriminant(&self) -> u32 {
        let f = self.tower.field(1).expect("degree 1");
        let [a1, a2, a3, a4, a6] = self.spec.coeffs;
        let c = |k: i64| f.from_int(k);
        let m = |a: u32, b: u32| f.mul(a, b);
        let ad = |a: u32, b: u32| f.add(a, b);
        let b2 = ad(m(a1, a1), m(c(4), a2));
        let b4 = ad(m(c(2), a4), m(a1, a3));
        let b6 = ad(m(a3, a3), m(c(4), a6));
        let b8 = f.sub(
            ad(ad(m(m(a1, a1), a6), m(c(4), m(a2, a6))), m(a2, m(a3, a3))),
            ad(m(a1, m(a3, a4)), m(a4, a4)),
        );
        let t1 = f.neg(m(m(b2, b2), b8));
        let t2 = m(c(8), m(b4, m(b4, b4)));
        let t3 = m(c(27), m(b6, b6));
        let t4 = m(c(9), m(b2, m(b4, b6)));
        ad(f.sub(f.sub(t1, t2), t3), t4)
    }

    fn on_curve(&self, n: u32, p: Pt) -> bool {
        let Pt::Aff(x, y) = p else { return true };
        let f = self.tower.field(n).expect("degree within bound");
        if x >= f.size || y >= f.size {
            return false;
        }
        let (a1, a2, a3, a4, a6) = (
            self.coeff(0, n),
            self.coeff(1, n),
            self.coeff(2, n),
            self.coeff(3, n),
            self.coeff(4, n),
        );
        let lhs = f.add(f.mul(y, y), f.mul(y, f.add(f.mul(a1, x), a3)));
        let x2 = f.mul(x, x);
        let rhs = f.add(
            f.add(f.mul(x2, x), f.mul(a2, x2)),
            f.add(f.mul(a4, x), a6),
        );
        lhs == rhs
    }

    /// Chord-tangent addition with the point at infinity as identity.
    fn add_inf(&self, n: u32, p: Pt, q: Pt) -> Pt {
        let f = self.tower.field(n).expect("degree within bound");
        let (a1, a2, a3, a4, a6) = (
            self.coeff(0, n),
            self.coeff(1, n),
            self.coeff(2, n),
            self.coeff(3, n),
            self.coeff(4, n),
        );
        let (x1, y1, x2, y2) = match (p, q) {
            (Pt::Inf, _) => return q,
            (_, Pt::Inf) => return p,
            (Pt::Aff(x1, y1), Pt::Aff(x2, y2)) => (x1, y1, x2, y2),
        };
        let (lambda, nu) = if x1 == x2 {
            let denom = f.add(f.add(f.mul(f.from_int(2), y1), f.mul(a1, x1)), a3);
            if y1 != y2 || denom == 0 {
                return Pt::Inf;
            }
            let x1sq = f.mul(x1, x1);
            let num_l = f.sub(
                f.add(
                    f.add(f.mul(f.from_int(3), x1sq), f.mul(f.mul(f.from_int(2), a2), x1)),
                    a4,
                ),
                f.mul(a1, y1),
            );
            let num_n = f.sub(
                f.add(
                    f.add(f.neg(f.mul(x1sq, x1)), f.mul(a4, x1)),
                    f.mul(f.from_int(2), a6),
                ),
                f.mul(a3, y1),
            );
            (f.div(num_l, denom), f.div(num_n, denom))
        } else {
            let dx = f.sub(x2, x1);
            (
                f.div(f.sub(y2, y1), dx),
                f.div(f.sub(f.mul(y1, x2), f.mul(y2, x1)), dx),
            )
        };
        let x3 = f.sub(
            f.sub(f.sub(f.add(f.mul(lambda, lambda), f.mul(a1, lambda)), a2), x1),
            x2,
        );
        let y3 = f.sub(f.sub(f.neg(f.mul(f.add(lambda, a1), x3)), nu), a3);
        Pt::Aff(x3, y3)
    }

    fn neg_inf(&self, n: u32, p: Pt) -> Pt {
        let f = self.tower.field(n).expect("degree within bound");
        match p {
            Pt::Inf => Pt::Inf,
            Pt::Aff(x, y) => {
                let a1 = self.coeff(0, n);
                let a3 = self.coeff(2, n);
                Pt::Aff(x, f.sub(f.neg(y), f.add(f.mul(a1, x), a3)))
            }
        }
    }

    fn build_level(&self, n: u32, base: Pt) -> Result<Level> {
        let f = self.tower.field(n)?;
        let mut points = vec![Pt::Inf];
        for x in 0..f.size {
            for y in 0..f.size {
                if self.on_curve(n, Pt::Aff(x, y)) {
                    points.push(Pt::Aff(x, y));
                }
            }
        }
        points.sort();
        let index: HashMap<Pt, u32> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (*p, i as u32))
            .collect();
        let base_n = match base {
            Pt::Inf => Pt::Inf,
            Pt::Aff(x, y) => Pt::Aff(self.tower.embed(x, 1, n)?, self.tower.embed(y, 1, n)?),
        };
        let neg_base = self.neg_inf(n, base_n);
        let two_base = self.add_inf(n, base_n, base_n);
        let count = points.len();
        let mut add = vec![0u32; count * count];
        for i in 0..count {
            for j in i..count {
                let s = self.add_inf(n, self.add_inf(n, points[i], points[j]), neg_base);
                let k = index[&s];
                add[i * count + j] = k;
                add[j * count + i] = k;
            }
        }
        let neg = points
            .iter()
            .map(|&p| index[&self.add_inf(n, two_base, self.neg_inf(n, p))])
            .collect();
        let frob = points
            .iter()
            .map(|&p| match p {
                Pt::Inf => index[&Pt::Inf],
                Pt::Aff(x, y) => {
                    index[&Pt::Aff(self.tower.frobenius(x, n), self.tower.frobenius(y, n))]
                }
            })
            .collect();
        Ok(Level {
            points,
            index,
            add,
            neg,
            frob,
        })
    }

    fn build_closed_points(&mut self) {
        for d in 1..=self.max_degree() {
            let lvl = &self.levels[d as usize - 1];
            let mut reps = Vec::new();
            let mut seen = vec![false; lvl.points.len()];
            for i in 0..lvl.points.len() {
                if seen[i] {
                    continue;
                }
                let mut orbit = vec![i as u32];
                let mut j = lvl.frob[i];
                while j != i as u32 {
                    orbit.push(j);
                    j = lvl.frob[j as usize];
                }
                for &o in &orbit {
                    seen[o as usize] = true;
                }
                if orbit.len() == d as usize {
                    reps.push(*orbit.iter().min().expect("nonempty"));
                }
            }
            reps.sort();
            let mut orbit_of = vec![None; lvl.points.len()];
            for (idx, &r) in reps.iter().enumerate() {
                let cp = ClosedPoint {
                    degree: d,
                    index: idx as u32,
                };
                let mut j = r;
                loop {
                    orbit_of[j as usize] = Some(cp);
                    j = lvl.frob[j as usize];
                    if j == r {
                        break;
                    }
                }
            }
            self.closed.push(reps);
            self.orbit_of.push(orbit_of);
        }
    }

    fn check_hasse_weil(&self) -> Result<()> {
        let q = self.q() as i64;
        let a = q + 1 - self.count(1) as i64;
        let (mut s0, mut s1) = (2i64, a);
        for n in 1..=self.max_degree() {
            let expect = q.pow(n) + 1 - s1;
            if expect != self.count(n) as i64 {
                return Err(HeckeError::Invariant(format!(
                    "N_{n} = {} disagrees with the Hasse-Weil recursion ({expect})",
                    self.count(n)
                )));
            }
            let s2 = a * s1 - q * s0;
            s0 = s1;
            s1 = s2;
        }
        Ok(())
    }

    fn level(&self, n: u32) -> Result<&Level> {
        if n == 0 || n > self.max_degree() {
            return Err(HeckeError::DegreeBoundExceeded {
                requested: n,
                bound: self.max_degree(),
            });
        }
        Ok(&self.levels[n as usize - 1])
    }

    /// `N_n = #X(F_{q^n})`.
    pub fn count(&self, n: u32) -> u64 {
        self.levels[n as usize - 1].points.len() as u64
    }

    /// `N_n` for any `n`, extended past the table by the Hasse-Weil recursion.
    pub fn count_any(&self, n: u32) -> u64 {
        if n <= self.max_degree() {
            return self.count(n);
        }
        let q = self.q() as i64;
        let a = q + 1 - self.count(1) as i64;
        let (mut s0, mut s1) = (2i64, a);
        for _ in 1..n {
            let s2 = a * s1 - q * s0;
            s0 = s1;
            s1 = s2;
        }
        (q.pow(n) + 1 - s1) as u64
    }

    pub fn enumerate_points(&self, n: u32) -> Result<Vec<CurvePoint>> {
        Ok(self
            .level(n)?
            .points
            .iter()
            .map(|&pt| CurvePoint { n, pt })
            .collect())
    }

    /// Index of a point in the sorted table of `X(F_{q^n})`.
    pub fn point_index(&self, p: CurvePoint) -> Result<u32> {
        self.level(p.n)?
            .index
            .get(&p.pt)
            .copied()
            .ok_or_else(|| HeckeError::InvalidCurve(format!("{p:?} is not on the curve")))
    }

    pub fn point_at(&self, n: u32, i: u32) -> CurvePoint {
        CurvePoint {
            n,
            pt: self.levels[n as usize - 1].points[i as usize],
        }
    }

    /// Index of `x0` in level `n`.
    pub fn origin_index(&self, n: u32) -> u32 {
        let base = match self.spec.base_point {
            None => Pt::Inf,
            Some((x, y)) => Pt::Aff(
                self.tower.embed(x, 1, n).expect("1 | n"),
                self.tower.embed(y, 1, n).expect("1 | n"),
            ),
        };
        self.levels[n as usize - 1].index[&base]
    }

    pub fn base_point(&self) -> CurvePoint {
        self.point_at(1, self.origin_index(1))
    }

    // Index-level group operations; these are the hot path.

    pub fn add_idx(&self, n: u32, i: u32, j: u32) -> u32 {
        let l = &self.levels[n as usize - 1];
        l.add[i as usize * l.points.len() + j as usize]
    }

    pub fn neg_idx(&self, n: u32, i: u32) -> u32 {
        self.levels[n as usize - 1].neg[i as usize]
    }

    pub fn frob_idx(&self, n: u32, i: u32) -> u32 {
        self.levels[n as usize - 1].frob[i as usize]
    }

    pub fn mul_idx(&self, n: u32, i: u32, k: i64) -> u32 {
        let base = if k < 0 { self.neg_idx(n, i) } else { i };
        let mut acc = self.origin_index(n);
        for _ in 0..k.unsigned_abs() {
            acc = self.add_idx(n, acc, base);
        }
        acc
    }

    /// Index in level `n` of point `i` of level `m` (`m | n`).
    pub fn embed_idx(&self, i: u32, m: u32, n: u32) -> Result<u32> {
        let p = self.point_at(m, i);
        let pt = match p.pt {
            Pt::Inf => Pt::Inf,
            Pt::Aff(x, y) => Pt::Aff(self.tower.embed(x, m, n)?, self.tower.embed(y, m, n)?),
        };
        Ok(self.level(n)?.index[&pt])
    }

    /// Index in level `m` of point `i` of level `n`, if it is defined over `F_{q^m}`.
    pub fn restrict_idx(&self, i: u32, n: u32, m: u32) -> Result<Option<u32>> {
        let p = self.point_at(n, i);
        let pt = match p.pt {
            Pt::Inf => Pt::Inf,
            Pt::Aff(x, y) => {
                match (self.tower.restrict(x, n, m)?, self.tower.restrict(y, n, m)?) {
                    (Some(a), Some(b)) => Pt::Aff(a, b),
                    _ => return Ok(None),
                }
            }
        };
        Ok(self.level(m)?.index.get(&pt).copied())
    }

    pub fn group_add(&self, a: CurvePoint, b: CurvePoint) -> Result<CurvePoint> {
        if a.n != b.n {
            return Err(HeckeError::InvalidCurve("points over different fields".into()));
        }
        let (i, j) = (self.point_index(a)?, self.point_index(b)?);
        Ok(self.point_at(a.n, self.add_idx(a.n, i, j)))
    }

    pub fn inverse(&self, a: CurvePoint) -> Result<CurvePoint> {
        let i = self.point_index(a)?;
        Ok(self.point_at(a.n, self.neg_idx(a.n, i)))
    }

    pub fn frobenius(&self, a: CurvePoint) -> Result<CurvePoint> {
        let i = self.point_index(a)?;
        Ok(self.point_at(a.n, self.frob_idx(a.n, i)))
    }

    /// `Norm_m^n`, as an index into level `m`.
    pub fn norm_idx(&self, i: u32, n: u32, m: u32) -> Result<u32> {
        if !n.is_multiple_of(m) {
            return Err(HeckeError::NonDividingDegree { m, n });
        }
        let mut acc = self.origin_index(n);
        let mut cur = i;
        for _ in 0..n / m {
            acc = self.add_idx(n, acc, cur);
            for _ in 0..m {
                cur = self.frob_idx(n, cur);
            }
        }
        self.restrict_idx(acc, n, m)?
            .ok_or_else(|| HeckeError::Invariant("norm not fixed by Frobenius".into()))
    }

    pub fn point_norm(&self, p: CurvePoint, m: u32) -> Result<CurvePoint> {
        let i = self.point_index(p)?;
        Ok(self.point_at(m, self.norm_idx(i, p.n, m)?))
    }

    /// Closed points of each degree `1..=max_degree`, in canonical order.
    pub fn closed_points(&self, max_degree: u32) -> Result<Vec<ClosedPoint>> {
        if max_degree > self.max_degree() {
            return Err(HeckeError::DegreeBoundExceeded {
                requested: max_degree,
                bound: self.max_degree(),
            });
        }
        Ok((1..=max_degree)
            .flat_map(|d| {
                (0..self.closed[d as usize - 1].len() as u32).map(move |index| ClosedPoint {
                    degree: d,
                    index,
                })
            })
            .collect())
    }

    pub fn closed_points_of_degree(&self, d: u32) -> Vec<ClosedPoint> {
        (0..self.closed[d as usize - 1].len() as u32)
            .map(|index| ClosedPoint { degree: d, index })
            .collect()
    }

    /// Canonical representative, as an index into level `|x|`.
    pub fn closed_rep(&self, x: ClosedPoint) -> u32 {
        self.closed[x.degree as usize - 1][x.index as usize]
    }

    /// The `|x|` points of `x`, as indices into level `n` (`|x|` must divide `n`).
    pub fn closed_point_orbit(&self, x: ClosedPoint, n: u32) -> Result<Vec<u32>> {
        let d = x.degree;
        if !n.is_multiple_of(d) {
            return Err(HeckeError::NonDividingDegree { m: d, n });
        }
        let r = self.closed_rep(x);
        let mut out = Vec::with_capacity(d as usize);
        let mut j = r;
        for _ in 0..d {
            out.push(self.embed_idx(j, d, n)?);
            j = self.frob_idx(d, j);
        }
        Ok(out)
    }

    /// The closed point containing point `i` of level `n`.
    pub fn closed_of(&self, n: u32, i: u32) -> ClosedPoint {
        // find the smallest level on which the point is defined
        for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
            if let Ok(Some(j)) = self.restrict_idx(i, n, d) {
                if let Some(cp) = self.orbit_of[d as usize - 1][j as usize] {
                    return cp;
                }
            }
        }
        unreachable!("every point lies in a closed point of degree dividing n")
    }

    /// The closed point `-x` (pointwise group inverse).
    pub fn closed_neg(&self, x: ClosedPoint) -> ClosedPoint {
        let r = self.closed_rep(x);
        self.closed_of(x.degree, self.neg_idx(x.degree, r))
    }

    /// Translate a closed point by a rational point (index into level 1).
    pub fn closed_translate(&self, x: ClosedPoint, by: u32) -> ClosedPoint {
        let d = x.degree;
        let t = self.embed_idx(by, 1, d).expect("1 | d");
        self.closed_of(d, self.add_idx(d, self.closed_rep(x), t))
    }

    /// `Norm_1^{|x|}` of any point above `x`, as an index into level 1.
    pub fn closed_norm(&self, x: ClosedPoint) -> u32 {
        self.norm_idx(self.closed_rep(x), x.degree, 1)
            .expect("1 divides every degree")
    }

    /// Closed point of degree 1 through a rational point (level-1 index).
    pub fn rational_closed(&self, i: u32) -> ClosedPoint {
        self.closed_of(1, i)
    }

    /// Human-readable coordinates of a closed point's representative.
    pub fn describe(&self, x: ClosedPoint) -> String {
        match self.point_at(x.degree, self.closed_rep(x)).pt {
            Pt::Inf => "inf".to_string(),
            Pt::Aff(a, b) => format!("({a},{b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(spec: CurveSpec) -> EllipticCurve {
        EllipticCurve::new(spec).unwrap()
    }

    #[test]
    fn one_point_counts() {
        let c = curve(CurveSpec::f2_one_point());
        assert_eq!((c.count(1), c.count(2), c.count(3)), (1, 5, 13));
        let c3 = curve(CurveSpec::f3_one_point());
        assert_eq!((c3.count(1), c3.count(2)), (1, 7));
        let c4 = curve(CurveSpec::f4_one_point());
        assert_eq!((c4.count(1), c4.count(2), c4.count(3)), (1, 9, 49));
        let s = curve(CurveSpec::f2_five_points());
        assert_eq!((s.count(1), s.count(2), s.count(3)), (5, 5, 5));
    }

    #[test]
    fn closed_point_counts() {
        let c = curve(CurveSpec::f2_one_point());
        let cps = c.closed_points(3).unwrap();
        let by = |d| cps.iter().filter(|x| x.degree == d).count();
        assert_eq!((by(1), by(2), by(3)), (1, 2, 4));
        for n in 1..=4u32 {
            let total: u64 = (1..=n)
                .filter(|d| n % d == 0)
                .map(|d| d as u64 * c.closed_points_of_degree(d).len() as u64)
                .sum();
            assert_eq!(total, c.count(n));
        }
    }

    #[test]
    fn group_law_is_abelian() {
        let c = curve(CurveSpec::f2_five_points());
        for n in 1..=3 {
            let o = c.origin_index(n);
            let k = c.count(n) as u32;
            for a in 0..k {
                assert_eq!(c.add_idx(n, o, a), a);
                assert_eq!(c.add_idx(n, a, c.neg_idx(n, a)), o);
                for b in 0..k {
                    assert_eq!(c.add_idx(n, a, b), c.add_idx(n, b, a));
                    let fa = c.frob_idx(n, a);
                    let fb = c.frob_idx(n, b);
                    assert_eq!(c.frob_idx(n, c.add_idx(n, a, b)), c.add_idx(n, fa, fb));
                    for d in 0..k {
                        let l = c.add_idx(n, c.add_idx(n, a, b), d);
                        let r = c.add_idx(n, a, c.add_idx(n, b, d));
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }

    #[test]
    fn norms() {
        let c = curve(CurveSpec::f2_five_points());
        // a rational point normed from degree 3 is its triple
        for i in 0..5 {
            let e = c.embed_idx(i, 1, 3).unwrap();
            assert_eq!(c.norm_idx(e, 3, 1).unwrap(), c.mul_idx(1, i, 3));
        }
        assert!(c.norm_idx(0, 3, 2).is_err());
    }

    #[test]
    fn base_point_must_lie_on_curve() {
        let mut s = CurveSpec::f2_one_point();
        s.base_point = Some((0, 0));
        assert!(EllipticCurve::new(s).is_err());
    }
}
