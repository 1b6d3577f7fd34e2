//! Finite fields `F_{q^n}` with Conway-compatible defining polynomials.
//!
//! An element of `F_{p^e}` is encoded as the integer whose base-`p` digits
//! are its coefficients in the power basis of the defining polynomial.

use crate::error::{HeckeError, Result};

/// One finite field `F_{p^e}` with log/exp tables over a primitive root.
#[derive(Clone, Debug)]
pub struct GfTable {
    pub p: u32,
    pub e: u32,
    pub size: u32,
    /// Monic defining polynomial, low degree first (length `e + 1`).
    pub modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl GfTable {
    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut d = vec![0; self.e as usize];
        for x in d.iter_mut() {
            *x = a % self.p;
            a /= self.p;
        }
        d
    }

    fn undigits(p: u32, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &x| acc * p + x)
    }

    /// Tries to build the table for `modulus`; `None` if `x` is not a
    /// primitive root (which also rules out reducible moduli).
    fn try_build(p: u32, modulus: Vec<u32>) -> Option<Self> {
        let e = modulus.len() as u32 - 1;
        let size = p.pow(e);
        let order = size - 1;
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; size as usize];
        let mut cur = vec![0u32; e as usize];
        cur[0] = 1;
        for i in 0..order {
            let code = Self::undigits(p, &cur);
            if log[code as usize] != u32::MAX {
                return None;
            }
            log[code as usize] = i;
            exp.push(code);
            // multiply by x modulo the defining polynomial
            let top = cur[e as usize - 1];
            for j in (1..e as usize).rev() {
                cur[j] = cur[j - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for (j, c) in cur.iter_mut().enumerate() {
                    *c = (*c + (p - modulus[j] % p) * top) % p;
                }
            }
        }
        if Self::undigits(p, &cur) != 1 {
            return None;
        }
        log[0] = 0;
        Some(GfTable {
            p,
            e,
            size,
            modulus,
            exp,
            log,
        })
    }

    pub fn order(&self) -> u32 {
        self.size - 1
    }

    pub fn one(&self) -> u32 {
        1
    }

    /// The primitive root `x` (a generator of the multiplicative group).
    pub fn generator(&self) -> u32 {
        self.exp[1 % self.exp.len()]
    }

    pub fn from_int(&self, c: i64) -> u32 {
        c.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let d: Vec<u32> = self
            .digits(a)
            .into_iter()
            .map(|x| (self.p - x) % self.p)
            .collect();
        Self::undigits(self.p, &d)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % self.order() as u64;
        self.exp[s as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in F_{}", self.size);
        let l = self.log[a as usize];
        self.exp[((self.order() - l) % self.order()) as usize]
    }

    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u32, k: u64) -> u32 {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let s = (self.log[a as usize] as u64 * (k % self.order() as u64)) % self.order() as u64;
        self.exp[s as usize]
    }

    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    pub fn exp(&self, k: u64) -> u32 {
        self.exp[(k % self.order() as u64) as usize]
    }

    /// Evaluates a polynomial with coefficients in `F_p` at `a`.
    fn eval_prime_poly(&self, poly: &[u32], a: u32) -> u32 {
        poly.iter()
            .rev()
            .fold(0, |acc, &c| self.add(self.mul(acc, a), self.from_int(c as i64)))
    }
}

/// The tower `F_q = F_{p^k} ⊂ F_{q^2} ⊂ ... ⊂ F_{q^D}`.
#[derive(Clone, Debug)]
pub struct FieldTower {
    pub p: u32,
    pub k: u32,
    pub q: u32,
    pub max_degree: u32,
    /// `fields[n - 1]` is `F_{q^n}`.
    fields: Vec<GfTable>,
}

fn factor_prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

impl FieldTower {
    pub fn new(q: u32, max_degree: u32) -> Result<Self> {
        let (p, k) = factor_prime_power(q)
            .ok_or_else(|| HeckeError::InvalidCurve(format!("{q} is not a prime power")))?;
        if max_degree == 0 {
            return Err(HeckeError::InvalidCurve("max degree must be positive".into()));
        }
        if (q as u64).pow(max_degree) > 1 << 20 {
            return Err(HeckeError::DegreeBoundExceeded {
                requested: max_degree,
                bound: (20.0 / (q as f64).log2()).floor() as u32,
            });
        }
        let mut fields: Vec<GfTable> = Vec::new();
        for n in 1..=max_degree {
            let e = k * n;
            let sub: Vec<&GfTable> = (1..n)
                .filter(|m| n % m == 0)
                .map(|m| &fields[m as usize - 1])
                .collect();
            let t = Self::search_modulus(p, e, &sub)?;
            fields.push(t);
        }
        Ok(FieldTower {
            p,
            k,
            q,
            max_degree,
            fields,
        })
    }

    /// Lexicographically smallest primitive polynomial of degree `e` whose
    /// distinguished root is compatible with each subfield's root.
    fn search_modulus(p: u32, e: u32, subfields: &[&GfTable]) -> Result<GfTable> {
        let total = p.pow(e);
        for code in 0..total {
            // digits of `code` are the lower coefficients, highest first
            let mut m = vec![0u32; e as usize + 1];
            let mut c = code;
            for slot in m.iter_mut().take(e as usize) {
                *slot = c % p;
                c /= p;
            }
            m[e as usize] = 1;
            if m[0] == 0 {
                continue;
            }
            let Some(t) = GfTable::try_build(p, m) else {
                continue;
            };
            let ok = subfields.iter().all(|s| {
                let pw = (t.order() / s.order()) as u64;
                let r = t.pow(t.generator(), pw);
                t.eval_prime_poly(&s.modulus, r) == 0
            });
            if ok {
                return Ok(t);
            }
        }
        Err(HeckeError::InvalidCurve(format!(
            "no compatible primitive polynomial of degree {e} over F_{p}"
        )))
    }

    pub fn field(&self, n: u32) -> Result<&GfTable> {
        if n == 0 || n > self.max_degree {
            return Err(HeckeError::DegreeBoundExceeded {
                requested: n,
                bound: self.max_degree,
            });
        }
        Ok(&self.fields[n as usize - 1])
    }

    /// Embeds `a ∈ F_{q^m}` into `F_{q^n}`.
    pub fn embed(&self, a: u32, m: u32, n: u32) -> Result<u32> {
        if !n.is_multiple_of(m) {
            return Err(HeckeError::NonDividingDegree { m, n });
        }
        if a == 0 || m == n {
            return Ok(a);
        }
        let fm = self.field(m)?;
        let fnn = self.field(n)?;
        let l = fm.log(a).expect("nonzero") as u64;
        Ok(fnn.exp(l * (fnn.order() / fm.order()) as u64))
    }

    /// Inverse of [`embed`](Self::embed); `None` if `a` is not in the subfield.
    pub fn restrict(&self, a: u32, n: u32, m: u32) -> Result<Option<u32>> {
        if !n.is_multiple_of(m) {
            return Err(HeckeError::NonDividingDegree { m, n });
        }
        if a == 0 || m == n {
            return Ok(Some(a));
        }
        let fm = self.field(m)?;
        let fnn = self.field(n)?;
        let ratio = fnn.order() / fm.order();
        let l = fnn.log(a).expect("nonzero");
        Ok((l % ratio == 0).then(|| fm.exp((l / ratio) as u64)))
    }

    /// `a -> a^q` on `F_{q^n}`.
    pub fn frobenius(&self, a: u32, n: u32) -> u32 {
        self.fields[n as usize - 1].pow(a, self.q as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_uses_x2_x_1() {
        let t = FieldTower::new(4, 2).unwrap();
        assert_eq!(t.field(1).unwrap().modulus, vec![1, 1, 1]);
        let f = t.field(1).unwrap();
        // alpha = 2 satisfies alpha^2 = alpha + 1
        assert_eq!(f.mul(2, 2), 3);
    }

    #[test]
    fn embeddings_are_ring_maps() {
        for (q, d) in [(2u32, 4u32), (3, 4), (4, 3)] {
            let t = FieldTower::new(q, d).unwrap();
            for n in 1..=d {
                for m in (1..=n).filter(|m| n % m == 0) {
                    let fm = t.field(m).unwrap();
                    let fnn = t.field(n).unwrap();
                    for a in 0..fm.size {
                        for b in 0..fm.size {
                            let ea = t.embed(a, m, n).unwrap();
                            let eb = t.embed(b, m, n).unwrap();
                            assert_eq!(t.embed(fm.add(a, b), m, n).unwrap(), fnn.add(ea, eb));
                            assert_eq!(t.embed(fm.mul(a, b), m, n).unwrap(), fnn.mul(ea, eb));
                        }
                        assert_eq!(t.restrict(t.embed(a, m, n).unwrap(), n, m).unwrap(), Some(a));
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_base_field() {
        let t = FieldTower::new(3, 3).unwrap();
        for a in 0..3 {
            let e = t.embed(a, 1, 3).unwrap();
            assert_eq!(t.frobenius(e, 3), e);
        }
        let f3 = t.field(3).unwrap();
        let moved = (0..f3.size).filter(|&a| t.frobenius(a, 3) != a).count();
        assert_eq!(moved, 27 - 3);
    }

    #[test]
    fn rejects_non_prime_power() {
        assert!(FieldTower::new(6, 2).is_err());
    }
}
