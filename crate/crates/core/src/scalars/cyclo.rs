//! Scalars in `Q(v)(zeta_M)`, used while character values are still in play.
//!
//! Values are kept as elements of the group ring `Q(v)[Z/M]` and only reduced
//! modulo the cyclotomic polynomial when compared or converted back.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;

use super::ratfunc::RationalFunctionV;
use crate::error::ScalarError;

type Rfv = RationalFunctionV;

#[derive(Clone, Default)]
pub struct CycloScalar {
    conductor: u32,
    /// exponent of `zeta_conductor` -> coefficient; zero entries are removed.
    terms: BTreeMap<u32, Rfv>,
}

impl CycloScalar {
    pub fn zero() -> Self {
        CycloScalar {
            conductor: 1,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_rfv(c: Rfv) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(0, c);
        }
        CycloScalar {
            conductor: 1,
            terms,
        }
    }

    /// `c * zeta_m^k`.
    pub fn root(k: i64, m: u32, c: Rfv) -> Self {
        assert!(m >= 1);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k.rem_euclid(m as i64) as u32, c);
        }
        CycloScalar { conductor: m, terms }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Re-expresses over `zeta_l` where `m | l`.
    pub fn lift(&self, l: u32) -> Self {
        assert!(l.is_multiple_of(self.conductor), "conductor must divide target");
        let f = l / self.conductor;
        CycloScalar {
            conductor: l,
            terms: self.terms.iter().map(|(k, c)| (k * f, c.clone())).collect(),
        }
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let l = a.conductor.lcm(&b.conductor);
        (a.lift(l), b.lift(l))
    }

    fn push(terms: &mut BTreeMap<u32, Rfv>, k: u32, c: Rfv) {
        if c.is_zero() {
            return;
        }
        match terms.get_mut(&k) {
            Some(e) => {
                *e += &c;
                if e.is_zero() {
                    terms.remove(&k);
                }
            }
            None => {
                terms.insert(k, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.terms.is_empty() {
            return self.clone();
        }
        if self.terms.is_empty() {
            return other.clone();
        }
        let (mut a, b) = Self::common(self, other);
        for (k, c) in b.terms {
            Self::push(&mut a.terms, k, c);
        }
        a
    }

    pub fn add_assign(&mut self, other: &Self) {
        *self = self.add(other);
    }

    pub fn neg(&self) -> Self {
        CycloScalar {
            conductor: self.conductor,
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.terms.is_empty() || other.terms.is_empty() {
            return Self::zero();
        }
        let (a, b) = Self::common(self, other);
        let m = a.conductor;
        let mut terms = BTreeMap::new();
        for (i, x) in &a.terms {
            for (j, y) in &b.terms {
                Self::push(&mut terms, (i + j) % m, x * y);
            }
        }
        CycloScalar { conductor: m, terms }
    }

    pub fn scale(&self, c: &Rfv) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        CycloScalar {
            conductor: self.conductor,
            terms: self.terms.iter().map(|(k, x)| (*k, x * c)).collect(),
        }
    }

    /// Applies `f` to every coefficient.
    pub fn try_map(
        &self,
        f: impl Fn(&Rfv) -> Result<Rfv, ScalarError>,
    ) -> Result<Self, ScalarError> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            let x = f(c)?;
            if !x.is_zero() {
                terms.insert(*k, x);
            }
        }
        Ok(CycloScalar {
            conductor: self.conductor,
            terms,
        })
    }

    /// Reduces every coefficient modulo `q v^2 - 1`, then to the power basis.
    pub fn reduce_at_curve(&self, q: u64) -> Result<Self, ScalarError> {
        let (m, coords) = self.canonical();
        let mut terms = BTreeMap::new();
        for (k, c) in coords.iter().enumerate() {
            let x = c.reduce_at_curve(q)?;
            if !x.is_zero() {
                terms.insert(k as u32, x);
            }
        }
        Ok(CycloScalar { conductor: m, terms })
    }

    /// Coordinates in the power basis `1, zeta, ..., zeta^(phi(M)-1)`.
    pub fn canonical(&self) -> (u32, Vec<Rfv>) {
        let m = self.conductor;
        let phi = cyclotomic_poly(m);
        let deg = phi.len() - 1;
        let mut dense = vec![Rfv::zero(); (m as usize).max(deg)];
        for (k, c) in &self.terms {
            dense[*k as usize] += c;
        }
        // phi is monic with integer coefficients: fold high powers down.
        for top in (deg..dense.len()).rev() {
            let c = std::mem::take(&mut dense[top]);
            if c.is_zero() {
                continue;
            }
            for (i, p) in phi.iter().enumerate().take(deg) {
                if *p != 0 {
                    let idx = top - deg + i;
                    dense[idx] -= &(&c * &Rfv::from_int(*p));
                }
            }
        }
        dense.truncate(deg);
        (m, dense)
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().1.iter().all(|c| c.is_zero())
    }

    /// The value as an element of `Q(v)`, if it has no irrational part.
    pub fn to_rfv(&self) -> Result<Rfv, ScalarError> {
        let (_, c) = self.canonical();
        if c.iter().skip(1).all(|x| x.is_zero()) {
            Ok(c.into_iter().next().unwrap_or_default())
        } else {
            Err(ScalarError::NotRational(self.to_string()))
        }
    }
}

impl PartialEq for CycloScalar {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::common(self, other);
        a.add(&b.neg()).is_zero()
    }
}

impl fmt::Display for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                if *k == 0 {
                    format!("({c})")
                } else {
                    format!("({c})*z{}^{k}", self.conductor)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Integer coefficients of the `m`-th cyclotomic polynomial, low degree first.
pub fn cyclotomic_poly(m: u32) -> Vec<i64> {
    assert!(m >= 1);
    // x^m - 1 divided by Phi_d for every proper divisor d.
    let mut p = vec![0i64; m as usize + 1];
    p[0] = -1;
    p[m as usize] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            p = exact_div(&p, &cyclotomic_poly(d));
        }
    }
    p
}

fn exact_div(a: &[i64], d: &[i64]) -> Vec<i64> {
    let mut rem = a.to_vec();
    let dd = d.len() - 1;
    debug_assert_eq!(d[dd], 1);
    let mut q = vec![0i64; rem.len() - dd];
    for k in (0..q.len()).rev() {
        let c = rem[k + dd];
        if c == 0 {
            continue;
        }
        for (j, dj) in d.iter().enumerate() {
            rem[k + j] -= c * dj;
        }
        q[k] = c;
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(9), vec![1, 0, 0, 1, 0, 0, 1]);
    }

    #[test]
    fn root_sum_vanishes() {
        for m in [2u32, 3, 5, 9, 12] {
            let mut s = CycloScalar::zero();
            for k in 0..m as i64 {
                s.add_assign(&CycloScalar::root(k, m, Rfv::one()));
            }
            assert!(s.is_zero(), "m = {m}");
        }
    }

    #[test]
    fn conjugate_product_is_one() {
        let z = CycloScalar::root(2, 5, Rfv::one());
        let zb = CycloScalar::root(3, 5, Rfv::one());
        assert_eq!(z.mul(&zb).to_rfv().unwrap(), Rfv::one());
        // zeta_3 + zeta_3^2 = -1, seen through conductor 6
        let s = CycloScalar::root(2, 6, Rfv::one()).add(&CycloScalar::root(2, 3, Rfv::one()));
        assert_eq!(s.to_rfv().unwrap(), Rfv::from_int(-1));
        assert!(CycloScalar::root(1, 4, Rfv::one()).to_rfv().is_err());
    }
}
