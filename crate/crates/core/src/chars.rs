//! Characters of `Pic^0(X_n)`, their Frobenius orbits, norms between
//! degrees, primitivity, and the Fourier transforms between point-indexed and
//! character-indexed generators.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::curve::{ClosedPoint, EllipticCurve};
use crate::error::{HeckeError, Result};
use crate::scalars::{CycloScalar, RationalFunctionV};

/// Invariant-factor form `Z/d1 x Z/d2` (`d1 | d2`) of `X(F_{q^n})`.
#[derive(Clone, Debug)]
pub struct AbelianStructure {
    pub n: u32,
    pub d1: u32,
    pub d2: u32,
    /// Generators as point indices in level `n`.
    pub g1: u32,
    pub g2: u32,
    /// Discrete logarithm `(a, b)` of every point, `p = a g1 + b g2`.
    dlog: Vec<(u32, u32)>,
}

impl AbelianStructure {
    pub fn order(&self) -> u32 {
        self.d1 * self.d2
    }

    /// Group exponent, the conductor of character values.
    pub fn exponent(&self) -> u32 {
        self.d2
    }

    pub fn dlog(&self, i: u32) -> (u32, u32) {
        self.dlog[i as usize]
    }

    pub fn invariant_factors(&self) -> Vec<u32> {
        if self.d1 == 1 {
            if self.d2 == 1 {
                vec![]
            } else {
                vec![self.d2]
            }
        } else {
            vec![self.d1, self.d2]
        }
    }
}

/// Invariant-factor decomposition of `X(F_{q^n})` by exhaustive search.
pub fn decompose(curve: &EllipticCurve, n: u32) -> Result<AbelianStructure> {
    let size = curve.count(n) as u32;
    let o = curve.origin_index(n);
    let order_of = |i: u32| -> u32 {
        let mut k = 1;
        let mut acc = i;
        while acc != o {
            acc = curve.add_idx(n, acc, i);
            k += 1;
        }
        k
    };
    let orders: Vec<u32> = (0..size).map(order_of).collect();
    let d2 = *orders.iter().max().expect("nonempty group");
    let g2 = orders.iter().position(|&k| k == d2).expect("max exists") as u32;
    let d1 = size / d2;
    let span = |g1: u32| -> Option<Vec<(u32, u32)>> {
        let mut dlog = vec![(u32::MAX, u32::MAX); size as usize];
        let mut a_pt = o;
        for a in 0..d1 {
            let mut p = a_pt;
            for b in 0..d2 {
                if dlog[p as usize].0 != u32::MAX {
                    return None;
                }
                dlog[p as usize] = (a, b);
                p = curve.add_idx(n, p, g2);
            }
            a_pt = curve.add_idx(n, a_pt, g1);
        }
        Some(dlog)
    };
    let g1 = if d1 == 1 {
        o
    } else {
        (0..size)
            .find(|&i| orders[i as usize] == d1 && span(i).is_some())
            .ok_or_else(|| HeckeError::Invariant(format!("no complement generator in degree {n}")))?
    };
    let dlog = span(g1).ok_or_else(|| HeckeError::Invariant("generators do not span".into()))?;
    Ok(AbelianStructure {
        n,
        d1,
        d2,
        g1,
        g2,
        dlog,
    })
}

/// A character `(a, b) -> zeta_{d1}^{a e1} zeta_{d2}^{b e2}` of `Pic^0(X_n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    pub n: u32,
    pub e1: u32,
    pub e2: u32,
}

/// A Frobenius orbit of characters, identified by `(degree, index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharOrbit {
    pub degree: u32,
    pub index: u32,
}

impl std::fmt::Display for CharOrbit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "R{}.{}", self.degree, self.index)
    }
}

#[derive(Clone, Debug)]
struct DegreeData {
    structure: AbelianStructure,
    /// orbits as sorted lists of character indices; sorted by first element
    orbits: Vec<Vec<u32>>,
    orbit_of: Vec<u32>,
    primitive: Vec<bool>,
    /// `values[orbit][closed point]` for closed points of degree dividing `n`
    values: Vec<BTreeMap<ClosedPoint, CycloScalar>>,
}

/// Character tables for every degree up to a bound.
#[derive(Clone, Debug)]
pub struct CharTables {
    max_degree: u32,
    degrees: Vec<DegreeData>,
}

impl CharTables {
    pub fn new(curve: &EllipticCurve, max_degree: u32) -> Result<Self> {
        if max_degree > curve.max_degree() {
            return Err(HeckeError::DegreeBoundExceeded {
                requested: max_degree,
                bound: curve.max_degree(),
            });
        }
        let mut tables = CharTables {
            max_degree,
            degrees: Vec::new(),
        };
        for n in 1..=max_degree {
            let structure = decompose(curve, n)?;
            let count = structure.order();
            // Frobenius on characters: chi -> chi o Fr
            let fg1 = curve.frob_idx(n, structure.g1);
            let fg2 = curve.frob_idx(n, structure.g2);
            let frob_char = |c: u32| -> u32 {
                let chi = Self::char_from_index(&structure, c);
                let k1 = Self::exponent_at(&structure, chi, fg1);
                let k2 = Self::exponent_at(&structure, chi, fg2);
                Self::index_from_values(&structure, k1, k2).expect("Frobenius preserves characters")
            };
            let mut orbit_of = vec![u32::MAX; count as usize];
            let mut orbits: Vec<Vec<u32>> = Vec::new();
            for c in 0..count {
                if orbit_of[c as usize] != u32::MAX {
                    continue;
                }
                let mut orb = vec![c];
                let mut j = frob_char(c);
                while j != c {
                    orb.push(j);
                    j = frob_char(j);
                }
                orb.sort();
                let id = orbits.len() as u32;
                for &m in &orb {
                    orbit_of[m as usize] = id;
                }
                orbits.push(orb);
            }
            let primitive = orbits.iter().map(|o| o.len() as u32 == n).collect();
            let mut values = Vec::with_capacity(orbits.len());
            for orb in &orbits {
                let chi = Self::char_from_index(&structure, orb[0]);
                let mut row = BTreeMap::new();
                for d in (1..=n).filter(|d| n % d == 0) {
                    for x in curve.closed_points_of_degree(d) {
                        let mut acc = CycloScalar::zero();
                        let w = RationalFunctionV::from_rational(BigRational::new(
                            BigInt::from(1),
                            BigInt::from(d),
                        ));
                        for p in curve.closed_point_orbit(x, n)? {
                            let k = Self::exponent_at(&structure, chi, p);
                            acc.add_assign(&CycloScalar::root(k as i64, structure.exponent(), w.clone()));
                        }
                        row.insert(x, acc);
                    }
                }
                values.push(row);
            }
            tables.degrees.push(DegreeData {
                structure,
                orbits,
                orbit_of,
                primitive,
                values,
            });
        }
        Ok(tables)
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    fn data(&self, n: u32) -> Result<&DegreeData> {
        if n == 0 || n > self.max_degree {
            return Err(HeckeError::DegreeBoundExceeded {
                requested: n,
                bound: self.max_degree,
            });
        }
        Ok(&self.degrees[n as usize - 1])
    }

    pub fn structure(&self, n: u32) -> Result<&AbelianStructure> {
        Ok(&self.data(n)?.structure)
    }

    fn char_from_index(s: &AbelianStructure, c: u32) -> Character {
        Character {
            n: s.n,
            e1: c / s.d2,
            e2: c % s.d2,
        }
    }

    fn index_of(s: &AbelianStructure, chi: Character) -> u32 {
        chi.e1 * s.d2 + chi.e2
    }

    /// Exponent `k` with `chi(p) = zeta_M^k`, `M` the group exponent.
    fn exponent_at(s: &AbelianStructure, chi: Character, p: u32) -> u32 {
        let (a, b) = s.dlog(p);
        let m = s.exponent() as u64;
        let k = a as u64 * chi.e1 as u64 * (m / s.d1 as u64) + b as u64 * chi.e2 as u64;
        (k % m) as u32
    }

    /// The character taking values `zeta_M^k1, zeta_M^k2` on the generators.
    fn index_from_values(s: &AbelianStructure, k1: u32, k2: u32) -> Option<u32> {
        let step = s.exponent() / s.d1;
        if !k1.is_multiple_of(step) {
            return None;
        }
        Some(Self::index_of(
            s,
            Character {
                n: s.n,
                e1: k1 / step,
                e2: k2,
            },
        ))
    }

    pub fn characters(&self, n: u32) -> Result<Vec<Character>> {
        let s = self.structure(n)?;
        Ok((0..s.order()).map(|c| Self::char_from_index(s, c)).collect())
    }

    pub fn char_value(&self, chi: Character, p: u32) -> Result<CycloScalar> {
        let s = self.structure(chi.n)?;
        Ok(CycloScalar::root(
            Self::exponent_at(s, chi, p) as i64,
            s.exponent(),
            RationalFunctionV::one(),
        ))
    }

    /// `chi o Norm_m^n` for `chi` of degree `m`.
    pub fn norm_char(&self, curve: &EllipticCurve, chi: Character, n: u32) -> Result<Character> {
        let m = chi.n;
        if !n.is_multiple_of(m) {
            return Err(HeckeError::NonDividingDegree { m, n });
        }
        let sm = self.structure(m)?;
        let sn = self.structure(n)?;
        let at = |g: u32| -> Result<u32> {
            let p = curve.norm_idx(g, n, m)?;
            let k = Self::exponent_at(sm, chi, p) as u64;
            let num = k * sn.exponent() as u64;
            if !num.is_multiple_of(sm.exponent() as u64) {
                return Err(HeckeError::Invariant("norm character value outside conductor".into()));
            }
            Ok((num / sm.exponent() as u64) as u32 % sn.exponent())
        };
        let (k1, k2) = (at(sn.g1)?, at(sn.g2)?);
        let c = Self::index_from_values(sn, k1, k2)
            .ok_or_else(|| HeckeError::Invariant("norm is not a character".into()))?;
        Ok(Self::char_from_index(sn, c))
    }

    pub fn orbits(&self, n: u32) -> Result<Vec<CharOrbit>> {
        Ok((0..self.data(n)?.orbits.len() as u32)
            .map(|index| CharOrbit { degree: n, index })
            .collect())
    }

    pub fn orbit_members(&self, o: CharOrbit) -> Result<Vec<Character>> {
        let d = self.data(o.degree)?;
        Ok(d.orbits[o.index as usize]
            .iter()
            .map(|&c| Self::char_from_index(&d.structure, c))
            .collect())
    }

    pub fn orbit_size(&self, o: CharOrbit) -> u32 {
        self.degrees[o.degree as usize - 1].orbits[o.index as usize].len() as u32
    }

    pub fn orbit_of(&self, chi: Character) -> Result<CharOrbit> {
        let d = self.data(chi.n)?;
        Ok(CharOrbit {
            degree: chi.n,
            index: d.orbit_of[Self::index_of(&d.structure, chi) as usize],
        })
    }

    pub fn is_trivial(&self, o: CharOrbit) -> bool {
        o.index == 0
    }

    pub fn is_primitive(&self, o: CharOrbit) -> bool {
        self.degrees[o.degree as usize - 1].primitive[o.index as usize]
    }

    pub fn primitive_orbits(&self, n: u32) -> Result<Vec<CharOrbit>> {
        Ok(self
            .orbits(n)?
            .into_iter()
            .filter(|o| self.is_primitive(*o))
            .collect())
    }

    pub fn norm_orbit(&self, curve: &EllipticCurve, o: CharOrbit, n: u32) -> Result<CharOrbit> {
        let rep = self.orbit_members(o)?[0];
        self.orbit_of(self.norm_char(curve, rep, n)?)
    }

    /// Whether `o` is the norm of some orbit from a proper divisor degree.
    pub fn is_proper_norm(&self, curve: &EllipticCurve, o: CharOrbit) -> Result<bool> {
        let n = o.degree;
        for m in (1..n).filter(|m| n.is_multiple_of(*m)) {
            for p in self.orbits(m)? {
                if self.norm_orbit(curve, p, n)? == o {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// The primitive orbit `P` of degree `m` with `o = Norm_m^{deg o}(P)`.
    pub fn tower_of(&self, curve: &EllipticCurve, o: CharOrbit) -> Result<(CharOrbit, u32)> {
        let n = o.degree;
        for m in (1..=n).filter(|m| n.is_multiple_of(*m)) {
            for p in self.primitive_orbits(m)? {
                if self.norm_orbit(curve, p, n)? == o {
                    return Ok((p, m));
                }
            }
        }
        Err(HeckeError::NotAGeneratorOfAnyTower(o.to_string()))
    }

    /// `rho~(x)`; requires `|x|` to divide the orbit degree.
    pub fn orbit_value(&self, o: CharOrbit, x: ClosedPoint) -> Result<CycloScalar> {
        let d = self.data(o.degree)?;
        d.values[o.index as usize]
            .get(&x)
            .cloned()
            .ok_or(HeckeError::NonDividingDegree {
                m: x.degree,
                n: o.degree,
            })
    }

    /// `sum_O b_O T^O  ->  sum_x a_x T_x` with `a_x = sum_O b_O O~(x)`.
    pub fn to_point_basis(
        &self,
        curve: &EllipticCurve,
        d: u32,
        coeffs: &BTreeMap<CharOrbit, CycloScalar>,
    ) -> Result<BTreeMap<ClosedPoint, CycloScalar>> {
        let mut out = BTreeMap::new();
        for e in (1..=d).filter(|e| d.is_multiple_of(*e)) {
            for x in curve.closed_points_of_degree(e) {
                let mut acc = CycloScalar::zero();
                for (o, b) in coeffs {
                    acc.add_assign(&b.mul(&self.orbit_value(*o, x)?));
                }
                out.insert(x, acc);
            }
        }
        Ok(out)
    }

    /// Inverse transform, from `T_{v,y} = |y| N_d^{-1} sum_rho rho~(-y) T^rho~`
    /// (the sum running over all characters, i.e. orbits weighted by size).
    pub fn to_char_basis(
        &self,
        curve: &EllipticCurve,
        d: u32,
        coeffs: &BTreeMap<ClosedPoint, CycloScalar>,
    ) -> Result<BTreeMap<CharOrbit, CycloScalar>> {
        let nd = self.structure(d)?.order() as i64;
        let mut out = BTreeMap::new();
        for o in self.orbits(d)? {
            let mut acc = CycloScalar::zero();
            for (y, a) in coeffs {
                let w = RationalFunctionV::from_ratio(y.degree as i64 * self.orbit_size(o) as i64, nd);
                let val = self.orbit_value(o, curve.closed_neg(*y))?;
                acc.add_assign(&a.mul(&val).scale(&w));
            }
            out.insert(o, acc);
        }
        Ok(out)
    }

    /// Coefficients `(O, c)` with `T_{v,y} = sum_O c T^O`, `d = gamma(v)`.
    pub fn point_to_char_row(
        &self,
        curve: &EllipticCurve,
        d: u32,
        y: ClosedPoint,
    ) -> Result<Vec<(CharOrbit, CycloScalar)>> {
        let mut m = BTreeMap::new();
        m.insert(y, CycloScalar::from_rfv(RationalFunctionV::one()));
        Ok(self
            .to_char_basis(curve, d, &m)?
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .collect())
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

    #[test]
    fn structures_of_one_point_curve() {
        let (c, t) = setup(CurveSpec::f2_one_point(), 3);
        assert_eq!(t.structure(1).unwrap().invariant_factors(), Vec::<u32>::new());
        assert_eq!(t.structure(2).unwrap().invariant_factors(), vec![5]);
        assert_eq!(t.structure(3).unwrap().invariant_factors(), vec![13]);
        let _ = c;
    }

    #[test]
    fn primitive_orbits_agree_with_norm_criterion() {
        for spec in [CurveSpec::f2_one_point(), CurveSpec::f2_five_points(), CurveSpec::f3_one_point()] {
            let (c, t) = setup(spec, 3);
            for n in 1..=3 {
                for o in t.orbits(n).unwrap() {
                    assert_eq!(t.is_primitive(o), !t.is_proper_norm(&c, o).unwrap(), "{o}");
                    let (p, m) = t.tower_of(&c, o).unwrap();
                    assert!(t.is_primitive(p));
                    assert_eq!(t.norm_orbit(&c, p, n).unwrap(), o);
                    assert_eq!(p.degree, m);
                }
            }
        }
        let (_, t) = setup(CurveSpec::f2_one_point(), 2);
        assert_eq!(t.primitive_orbits(2).unwrap().len(), 2);
        assert_eq!(t.primitive_orbits(1).unwrap().len(), 1);
    }

    #[test]
    fn orthogonality() {
        let (c, t) = setup(CurveSpec::f2_five_points(), 3);
        for n in 1..=3 {
            let s = t.structure(n).unwrap();
            for p in 0..s.order() {
                let mut acc = CycloScalar::zero();
                for chi in t.characters(n).unwrap() {
                    acc.add_assign(&t.char_value(chi, p).unwrap());
                }
                let expect = if p == c.origin_index(n) { s.order() as i64 } else { 0 };
                assert_eq!(acc.to_rfv().unwrap(), RationalFunctionV::from_int(expect));
            }
        }
    }

    #[test]
    fn point_char_roundtrip() {
        let (c, t) = setup(CurveSpec::f2_one_point(), 3);
        for d in 1..=3 {
            let mut m = BTreeMap::new();
            for (i, x) in c.closed_points(d).unwrap().into_iter().filter(|x| d % x.degree == 0).enumerate() {
                m.insert(x, CycloScalar::from_rfv(RationalFunctionV::from_int(3 * i as i64 - 2)));
            }
            let back = t.to_point_basis(&c, d, &t.to_char_basis(&c, d, &m).unwrap()).unwrap();
            for (x, v) in &m {
                assert_eq!(&back[x], v);
            }
        }
    }
}
