//! Coherent sheaves on the curve through their canonical labels
//! `E^{(n,d)}_{(x,ℓ)}`: classes, HN splitting, Euler form, `SL_2(Z)`
//! relabeling, convex paths and polygons.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;

use crate::curve::{ClosedPoint, EllipticCurve};
use crate::error::{HeckeError, Result};

/// A class `(n, d)` in the numerical Grothendieck group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KVector {
    pub n: i64,
    pub d: i64,
}

impl KVector {
    /// A class in the cone `n > 0` or `n = 0, d > 0`.
    pub fn new(n: i64, d: i64) -> Result<Self> {
        let v = KVector { n, d };
        if v.in_cone() {
            Ok(v)
        } else {
            Err(HeckeError::ConeViolation(n, d))
        }
    }

    pub const fn raw(n: i64, d: i64) -> Self {
        KVector { n, d }
    }

    pub fn in_cone(&self) -> bool {
        self.n > 0 || (self.n == 0 && self.d > 0)
    }

    pub fn gamma(&self) -> i64 {
        self.n.gcd(&self.d)
    }

    pub fn primitive(&self) -> KVector {
        let g = self.gamma();
        KVector::raw(self.n / g, self.d / g)
    }

    pub fn add(&self, o: &KVector) -> KVector {
        KVector::raw(self.n + o.n, self.d + o.d)
    }

    pub fn sub(&self, o: &KVector) -> KVector {
        KVector::raw(self.n - o.n, self.d - o.d)
    }

    pub fn scale(&self, k: i64) -> KVector {
        KVector::raw(self.n * k, self.d * k)
    }

    /// Compares slopes `d/n`, with rank-zero classes at `+∞`.
    pub fn cmp_slope(&self, o: &KVector) -> Ordering {
        match (self.n == 0, o.n == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (self.d * o.n).cmp(&(o.d * self.n)),
        }
    }

    pub fn same_slope(&self, o: &KVector) -> bool {
        self.cmp_slope(o) == Ordering::Equal
    }
}

impl fmt::Display for KVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.d)
    }
}

/// `⟨(n1,d1),(n2,d2)⟩ = n1 d2 - n2 d1`.
pub fn euler_form(a: KVector, b: KVector) -> i64 {
    a.n * b.d - b.n * a.d
}

pub fn det(a: KVector, b: KVector) -> i64 {
    a.n * b.d - a.d * b.n
}

/// Interior lattice points of the triangle `(0, v, v + w)` by Pick's formula.
pub fn pick_interior_count(v: KVector, w: KVector) -> Result<i64> {
    let a = det(v, w).abs();
    if a == 0 {
        return Err(HeckeError::CollinearInput(v.n, v.d, w.n, w.d));
    }
    let b = v.gamma() + w.gamma() + v.add(&w).gamma();
    Ok((a - b + 2) / 2)
}

/// A 2x2 integer matrix acting on column vectors `(n, d)`.
pub type Sl2 = [[i64; 2]; 2];

pub fn sl2_apply(f: &Sl2, v: KVector) -> KVector {
    KVector::raw(f[0][0] * v.n + f[0][1] * v.d, f[1][0] * v.n + f[1][1] * v.d)
}

pub fn sl2_mul(a: &Sl2, b: &Sl2) -> Sl2 {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn sl2_inverse(a: &Sl2) -> Sl2 {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

/// A determinant-one matrix sending `(n, d)` to `(0, gcd(n, d))`.
pub fn sl2_to_vertical(n: i64, d: i64) -> Result<Sl2> {
    if n == 0 && d == 0 {
        return Err(HeckeError::ConeViolation(0, 0));
    }
    let e = n.extended_gcd(&d);
    let (mut g, mut a, mut b) = (e.gcd, e.x, e.y);
    if g < 0 {
        g = -g;
        a = -a;
        b = -b;
    }
    if n == 0 {
        // d > 0 in the cone; identity when d = g
        return Ok(if d > 0 { [[1, 0], [0, 1]] } else { [[-1, 0], [0, -1]] });
    }
    // rows (d/g, -n/g) and (a, b) with a n + b d = g
    Ok([[d / g, -n / g], [a, b]])
}

/// A closed point label of an indecomposable: support and weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndecompSheaf {
    pub class: KVector,
    pub point: ClosedPoint,
    pub weight: u32,
}

impl IndecompSheaf {
    pub fn new(class: KVector, point: ClosedPoint, weight: u32) -> Result<Self> {
        if !class.in_cone() {
            return Err(HeckeError::ConeViolation(class.n, class.d));
        }
        if point.degree as i64 * weight as i64 != class.gamma() {
            return Err(HeckeError::Invariant(format!(
                "|x| * weight = {} * {} differs from gcd{}",
                point.degree, weight, class
            )));
        }
        Ok(IndecompSheaf {
            class,
            point,
            weight,
        })
    }

    /// `K_x^{(ℓ)}`.
    pub fn torsion(point: ClosedPoint, weight: u32) -> Self {
        IndecompSheaf {
            class: KVector::raw(0, point.degree as i64 * weight as i64),
            point,
            weight,
        }
    }

    pub fn id(&self) -> String {
        format!(
            "E({},{})[P{}.{}^{}]",
            self.class.n, self.class.d, self.point.degree, self.point.index, self.weight
        )
    }

    fn canonical_cmp(&self, o: &Self) -> Ordering {
        self.class
            .cmp_slope(&o.class)
            .then(self.class.n.cmp(&o.class.n))
            .then(self.point.cmp(&o.point))
            .then(self.weight.cmp(&o.weight))
    }
}

/// `SL_2` relabeling of an indecomposable: `(x, ℓ)` are kept.
pub fn atiyah_relabel(e: &IndecompSheaf, f: &Sl2) -> Result<IndecompSheaf> {
    let c = sl2_apply(f, e.class);
    IndecompSheaf::new(c, e.point, e.weight)
}

/// A finite direct sum of labeled indecomposables, kept in canonical order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoherentSheaf {
    parts: Vec<IndecompSheaf>,
}

impl CoherentSheaf {
    pub fn new(mut parts: Vec<IndecompSheaf>) -> Self {
        parts.sort_by(|a, b| a.canonical_cmp(b));
        CoherentSheaf { parts }
    }

    pub fn zero() -> Self {
        CoherentSheaf { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[IndecompSheaf] {
        &self.parts
    }

    pub fn direct_sum(&self, o: &Self) -> Self {
        let mut v = self.parts.clone();
        v.extend_from_slice(&o.parts);
        Self::new(v)
    }

    pub fn class(&self) -> KVector {
        self.parts
            .iter()
            .fold(KVector::raw(0, 0), |acc, p| acc.add(&p.class))
    }

    pub fn rank(&self) -> i64 {
        self.class().n
    }

    pub fn degree(&self) -> i64 {
        self.class().d
    }

    pub fn is_vector_bundle(&self) -> bool {
        self.parts.iter().all(|p| p.class.n > 0)
    }

    /// Semistable pieces by strictly increasing slope (torsion last).
    pub fn hn_decompose(&self) -> Vec<(KVector, CoherentSheaf)> {
        let mut out: Vec<(KVector, CoherentSheaf)> = Vec::new();
        for p in &self.parts {
            match out.last_mut() {
                Some((c, s)) if c.same_slope(&p.class) => {
                    *c = c.add(&p.class);
                    s.parts.push(*p);
                }
                _ => out.push((p.class, CoherentSheaf { parts: vec![*p] })),
            }
        }
        out
    }

    /// Canonical string id.
    pub fn id(&self) -> String {
        if self.parts.is_empty() {
            return "0".to_string();
        }
        self.parts
            .iter()
            .map(|p| p.id())
            .collect::<Vec<_>>()
            .join("+")
    }

    /// Rows `[n, d, point, weight]` as used by the JSON export.
    pub fn hn_rows(&self) -> Vec<(i64, i64, String, u32)> {
        self.parts
            .iter()
            .map(|p| (p.class.n, p.class.d, p.point.to_string(), p.weight))
            .collect()
    }

    /// Tensor with `O(k x0)`: `(n, d) -> (n, d + k n)`, labels kept.
    pub fn twist_origin(&self, k: i64) -> Self {
        Self::new(
            self.parts
                .iter()
                .map(|p| IndecompSheaf {
                    class: KVector::raw(p.class.n, p.class.d + k * p.class.n),
                    ..*p
                })
                .collect(),
        )
    }

    /// Human-readable name; rank-2 bundles get the classification names.
    pub fn display_name(&self, curve: &EllipticCurve) -> String {
        let line = |p: &IndecompSheaf| format!("L[{},{}]", p.class.d, p.point);
        let _ = curve;
        if self.rank() == 2 && self.is_vector_bundle() {
            if self.parts.len() == 2 {
                return format!("{}⊕{}", line(&self.parts[0]), line(&self.parts[1]));
            }
            let p = self.parts[0];
            if p.class.d.rem_euclid(2) == 1 {
                return format!("E_{}(O({}))", p.point, (p.class.d - 1).div_euclid(2));
            }
            if p.weight == 2 {
                return format!("E(L[{},{}])", p.class.d / 2, p.point);
            }
            return format!("O({})⊗π_*L′[{}]", p.class.d / 2, p.point);
        }
        self.parts
            .iter()
            .map(|p| {
                if p.class.n == 1 {
                    line(p)
                } else if p.class.n == 0 {
                    format!("K[{}^{}]", p.point, p.weight)
                } else {
                    p.id()
                }
            })
            .collect::<Vec<_>>()
            .join("⊕")
    }
}

impl fmt::Display for CoherentSheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

impl fmt::Debug for CoherentSheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Slope-ordered HN classes of a sheaf.
pub type ConvexPath = Vec<KVector>;

pub fn path_of(e: &CoherentSheaf) -> ConvexPath {
    e.hn_decompose().into_iter().map(|(c, _)| c).collect()
}

/// Height of a path at integer rank `k`, as a fraction `(num, den)`.
fn path_height(path: &[KVector], k: i64) -> (i64, i64) {
    let (mut n0, mut d0) = (0i64, 0i64);
    for v in path {
        if v.n == 0 {
            continue;
        }
        if k <= n0 + v.n {
            // d0 + (k - n0) * v.d / v.n
            return (d0 * v.n + (k - n0) * v.d, v.n);
        }
        n0 += v.n;
        d0 += v.d;
    }
    (d0, 1)
}

/// Whether `path` lies in the region below `p(E)` and above `p(E)` shifted
/// down by `shift` (the polygon `P(x, r, E)` with `shift = r|x|`).
pub fn polygon_contains(e_path: &[KVector], shift: i64, path: &[KVector]) -> bool {
    let n: i64 = e_path.iter().map(|v| v.n).sum();
    if path.iter().map(|v| v.n).sum::<i64>() != n {
        return false;
    }
    (0..=n).all(|k| {
        let (a, ad) = path_height(e_path, k);
        let (b, bd) = path_height(path, k);
        // a/ad - shift <= b/bd <= a/ad
        b * ad <= a * bd && (a - shift * ad) * bd <= b * ad
    })
}

/// Every semistable sheaf of class `c`: multisets of blocks `(y, ℓ)` with
/// `Σ |y| ℓ = γ(c)`.
pub fn semistable_sheaves(curve: &EllipticCurve, c: KVector) -> Result<Vec<CoherentSheaf>> {
    let g = c.gamma();
    let z0 = c.primitive();
    if g as u32 > curve.max_degree() {
        return Err(HeckeError::DegreeBoundExceeded {
            requested: g as u32,
            bound: curve.max_degree(),
        });
    }
    let mut blocks: Vec<(ClosedPoint, u32)> = Vec::new();
    for x in curve.closed_points(g as u32)? {
        for l in 1..=(g as u32 / x.degree) {
            blocks.push((x, l));
        }
    }
    let mut out = Vec::new();
    fn rec(
        blocks: &[(ClosedPoint, u32)],
        start: usize,
        left: i64,
        cur: &mut Vec<(ClosedPoint, u32)>,
        out: &mut Vec<Vec<(ClosedPoint, u32)>>,
    ) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..blocks.len() {
            let s = blocks[i].0.degree as i64 * blocks[i].1 as i64;
            if s <= left {
                cur.push(blocks[i]);
                rec(blocks, i, left - s, cur, out);
                cur.pop();
            }
        }
    }
    let mut raw = Vec::new();
    rec(&blocks, 0, g, &mut Vec::new(), &mut raw);
    for combo in raw {
        let parts = combo
            .into_iter()
            .map(|(y, l)| IndecompSheaf::new(z0.scale(y.degree as i64 * l as i64), y, l))
            .collect::<Result<Vec<_>>>()?;
        out.push(CoherentSheaf::new(parts));
    }
    Ok(out)
}

/// All HN types `[(n_i, d_i)]` of rank `n`, degree `d`, increasing slopes,
/// accepted by `keep` at each prefix.
pub fn hn_types(
    n: i64,
    d: i64,
    d_range: (i64, i64),
    keep: &dyn Fn(&[KVector]) -> bool,
) -> Vec<Vec<KVector>> {
    let mut out = Vec::new();
    fn rec(
        n_left: i64,
        d_left: i64,
        d_range: (i64, i64),
        cur: &mut Vec<KVector>,
        keep: &dyn Fn(&[KVector]) -> bool,
        out: &mut Vec<Vec<KVector>>,
    ) {
        if n_left == 0 {
            if d_left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for ni in 1..=n_left {
            for di in (d_range.0 * ni)..=(d_range.1 * ni) {
                let v = KVector::raw(ni, di);
                if let Some(last) = cur.last() {
                    if last.cmp_slope(&v) != Ordering::Less {
                        continue;
                    }
                }
                cur.push(v);
                if keep(cur) {
                    rec(n_left - ni, d_left - di, d_range, cur, keep, out);
                }
                cur.pop();
            }
        }
    }
    rec(n, d, d_range, &mut Vec::new(), keep, &mut out);
    out
}

/// All vector bundles with a given HN type.
pub fn bundles_of_type(curve: &EllipticCurve, hn: &[KVector]) -> Result<Vec<CoherentSheaf>> {
    let mut acc = vec![CoherentSheaf::zero()];
    for c in hn {
        let ss = semistable_sheaves(curve, *c)?;
        let mut next = Vec::with_capacity(acc.len() * ss.len());
        for a in &acc {
            for s in &ss {
                next.push(a.direct_sum(s));
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Rank-`n` vector bundles all of whose HN slopes lie in `[lo, hi]`.
pub fn bundles_in_window(curve: &EllipticCurve, n: i64, lo: i64, hi: i64) -> Result<Vec<CoherentSheaf>> {
    let mut out = Vec::new();
    if lo > hi {
        return Ok(out);
    }
    for d in (lo * n)..=(hi * n) {
        for t in hn_types(n, d, (lo, hi), &|_| true) {
            out.extend(bundles_of_type(curve, &t)?);
        }
    }
    out.sort_by_key(|a| (a.degree(), a.id()));
    Ok(out)
}

/// Rank-2 vertices in the window, with their classification names.
pub fn enumerate_bun2_vertices(
    curve: &EllipticCurve,
    lo: i64,
    hi: i64,
) -> Result<Vec<(CoherentSheaf, String)>> {
    Ok(bundles_in_window(curve, 2, lo, hi)?
        .into_iter()
        .map(|e| {
            let name = e.display_name(curve);
            (e, name)
        })
        .collect())
}

/// Kind of a rank-2 bundle in the classification `dec ⨿ tr ⨿ gi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rank2Kind {
    Decomposable,
    Trace,
    GiOdd,
    GiEven,
}

pub fn rank2_kind(e: &CoherentSheaf) -> Option<Rank2Kind> {
    if e.rank() != 2 || !e.is_vector_bundle() {
        return None;
    }
    if e.parts().len() == 2 {
        return Some(Rank2Kind::Decomposable);
    }
    let p = e.parts()[0];
    Some(if p.class.d % 2 != 0 {
        Rank2Kind::GiOdd
    } else if p.weight == 2 {
        Rank2Kind::GiEven
    } else {
        Rank2Kind::Trace
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveSpec;

    fn kv(n: i64, d: i64) -> KVector {
        KVector::raw(n, d)
    }

    #[test]
    fn euler_form_examples() {
        assert_eq!(euler_form(kv(1, 0), kv(1, 1)), 1);
        assert_eq!(euler_form(kv(0, 3), kv(2, 5)), -6);
    }

    #[test]
    fn vertical_matrices() {
        assert_eq!(sl2_to_vertical(1, 0).unwrap(), [[0, -1], [1, 0]]);
        assert_eq!(sl2_to_vertical(0, 3).unwrap(), [[1, 0], [0, 1]]);
        for (n, d) in [(2, 1), (3, 5), (4, 6), (1, -3), (5, 0)] {
            let f = sl2_to_vertical(n, d).unwrap();
            assert_eq!(f[0][0] * f[1][1] - f[0][1] * f[1][0], 1);
            assert_eq!(sl2_apply(&f, kv(n, d)), kv(0, n.gcd(&d)));
        }
    }

    #[test]
    fn pick_examples() {
        assert_eq!(pick_interior_count(kv(0, 1), kv(1, 0)).unwrap(), 0);
        assert_eq!(pick_interior_count(kv(0, 1), kv(2, 3)).unwrap(), 0);
        assert_eq!(pick_interior_count(kv(0, 2), kv(2, 0)).unwrap(), 0);
        assert_eq!(pick_interior_count(kv(0, 2), kv(3, 1)).unwrap(), 1);
        assert!(pick_interior_count(kv(1, 1), kv(2, 2)).is_err());
    }

    #[test]
    fn hn_of_mixed_sum() {
        let c = EllipticCurve::new(CurveSpec::f2_one_point()).unwrap();
        let x = c.closed_points_of_degree(1)[0];
        let a = IndecompSheaf::new(kv(2, 1), x, 1).unwrap();
        let b = IndecompSheaf::new(kv(1, 1), x, 1).unwrap();
        let t = IndecompSheaf::torsion(x, 1);
        let s = CoherentSheaf::new(vec![t, b, a]);
        let hn = s.hn_decompose();
        assert_eq!(hn.len(), 3);
        assert_eq!(hn[0].0, kv(2, 1));
        assert_eq!(hn[1].0, kv(1, 1));
        assert_eq!(hn[2].0, kv(0, 1));
        assert!(!s.is_vector_bundle());
    }

    #[test]
    fn bun2_counts_on_one_point_curve() {
        let c = EllipticCurve::new(CurveSpec::f2_one_point()).unwrap();
        let v = enumerate_bun2_vertices(&c, 0, 0).unwrap();
        // slope 0: L⊕L, E(L), and two trace bundles
        assert_eq!(v.len(), 4);
        let kinds: Vec<_> = v.iter().map(|(e, _)| rank2_kind(e).unwrap()).collect();
        assert_eq!(kinds.iter().filter(|k| **k == Rank2Kind::Trace).count(), 2);
        let v = enumerate_bun2_vertices(&c, 0, 1).unwrap();
        // adds O⊕O(1), E_x(O), and the slope-1 copies
        assert_eq!(v.len(), 4 + 1 + 1 + 4);
    }

    #[test]
    fn rank2_names_at_negative_degree() {
        let c = EllipticCurve::new(CurveSpec::f2_one_point()).unwrap();
        let x = c.closed_points_of_degree(1)[0];
        let odd = CoherentSheaf::new(vec![IndecompSheaf::new(kv(2, -1), x, 1).unwrap()]);
        assert_eq!(odd.display_name(&c), "E_P1.0(O(-1))");
        assert_eq!(rank2_kind(&odd), Some(Rank2Kind::GiOdd));
    }

    #[test]
    fn polygon_basic() {
        let e = vec![kv(1, 0), kv(1, 5)];
        assert!(polygon_contains(&e, 1, &[kv(1, -1), kv(1, 5)]));
        assert!(polygon_contains(&e, 1, &[kv(1, 0), kv(1, 4)]));
        assert!(!polygon_contains(&e, 1, &[kv(2, 4)]));
        assert!(!polygon_contains(&e, 1, &[kv(1, 1), kv(1, 3)]));
    }
}
