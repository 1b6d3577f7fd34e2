//! Dense univariate polynomials over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients are stored low degree first with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly(pub Vec<BigRational>);

impl QPoly {
    pub fn zero() -> Self {
        QPoly(Vec::new())
    }

    pub fn one() -> Self {
        QPoly(vec![BigRational::one()])
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = QPoly(vec![c]);
        p.trim();
        p
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        let mut p = QPoly(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        );
        p.trim();
        p
    }

    /// The monomial `c * x^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        QPoly(v)
    }

    pub fn trim(&mut self) {
        while matches!(self.0.last(), Some(c) if c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigRational> {
        self.0.last()
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.0.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Number of leading zero coefficients at the constant end (the v-adic valuation).
    pub fn low_order(&self) -> usize {
        self.0.iter().take_while(|c| c.is_zero()).count()
    }

    pub fn shift_down(&self, k: usize) -> Self {
        QPoly(self.0[k.min(self.0.len())..].to_vec())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        let mut p = QPoly(out);
        p.trim();
        p
    }

    pub fn neg(&self) -> Self {
        QPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let mut p = QPoly(out);
        p.trim();
        p
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        QPoly(self.0.iter().map(|a| a * c).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.0[dd].recip();
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            let mut r = QPoly(rem);
            r.trim();
            return (Self::zero(), r);
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.0.iter().enumerate() {
                rem[k + j] -= &c * dj;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        let mut q = QPoly(quot);
        q.trim();
        let mut r = QPoly(rem);
        r.trim();
        (q, r)
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => Self::zero(),
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
        }
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }

    /// Substitute `x -> -x`.
    pub fn reflect(&self) -> Self {
        QPoly(
            self.0
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Least common multiple of coefficient denominators and gcd of numerators.
    pub fn integer_content(&self) -> (BigInt, BigInt) {
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in &self.0 {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        (num, den)
    }

    /// Coefficients as integers after multiplying by `scale`; the caller
    /// guarantees integrality.
    pub fn to_integers(&self, scale: &BigRational) -> Vec<BigInt> {
        self.0
            .iter()
            .map(|c| {
                let s = c * scale;
                debug_assert!(s.is_integer());
                s.to_integer()
            })
            .collect()
    }

    pub fn is_even_fn(&self) -> bool {
        self.0.iter().skip(1).step_by(2).all(|c| c.is_zero())
    }

    pub fn has_positive_lead(&self) -> bool {
        self.lead().map(|c| c.is_positive()).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_of_shared_factor() {
        // (x-1)(x+2) and (x-1)(x+3)
        let a = QPoly::from_ints(&[-2, 1, 1]);
        let b = QPoly::from_ints(&[-3, 2, 1]);
        assert_eq!(QPoly::gcd(&a, &b), QPoly::from_ints(&[-1, 1]));
    }

    #[test]
    fn div_rem_roundtrip() {
        let a = QPoly::from_ints(&[5, 0, 3, 1]);
        let d = QPoly::from_ints(&[1, 2]);
        let (q, r) = a.div_rem(&d);
        assert_eq!(q.mul(&d).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 1);
    }
}
