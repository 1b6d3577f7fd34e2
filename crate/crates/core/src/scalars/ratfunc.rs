//! Exact rational functions in the formal variable `v` (with `v^2 = 1/q`).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::qpoly::QPoly;
use crate::error::ScalarError;

/// A rational function `v^shift * num(v) / den(v)`.
///
/// Canonical form: `den` is monic, neither `num` nor `den` vanishes at
/// `v = 0`, and `gcd(num, den) = 1`. Zero is `num = 0, den = 1, shift = 0`.
/// Since the representation is canonical, derived equality and hashing are
/// value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunctionV {
    shift: i64,
    num: QPoly,
    den: QPoly,
}

impl Default for RationalFunctionV {
    fn default() -> Self {
        Self::zero()
    }
}

impl RationalFunctionV {
    pub fn zero() -> Self {
        RationalFunctionV {
            shift: 0,
            num: QPoly::zero(),
            den: QPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::from_parts(0, QPoly::constant(c), QPoly::one())
    }

    /// `c * v^k`.
    pub fn monomial(c: BigRational, k: i64) -> Self {
        Self::from_parts(k, QPoly::constant(c), QPoly::one())
    }

    /// `v^k`.
    pub fn v_pow(k: i64) -> Self {
        Self::monomial(BigRational::one(), k)
    }

    /// Laurent polynomial `sum c_i v^(low + i)`.
    pub fn laurent(low: i64, coeffs: &[i64]) -> Self {
        Self::from_parts(low, QPoly::from_ints(coeffs), QPoly::one())
    }

    /// Builds `v^shift * num / den` and brings it to canonical form.
    pub fn from_parts(shift: i64, num: QPoly, den: QPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let (mut shift, mut num, mut den) = (shift, num, den);
        let ln = num.low_order();
        if ln > 0 {
            num = num.shift_down(ln);
            shift += ln as i64;
        }
        let ld = den.low_order();
        if ld > 0 {
            den = den.shift_down(ld);
            shift -= ld as i64;
        }
        if !den.is_one() && den.degree() != Some(0) {
            let g = QPoly::gcd(&num, &den);
            if !g.is_one() {
                num = num.div_rem(&g).0;
                den = den.div_rem(&g).0;
            }
        }
        let lead = den.lead().expect("nonzero").clone();
        if !lead.is_one() {
            let inv = lead.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RationalFunctionV { shift, num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.num.is_one() && self.den.is_one()
    }

    /// True when the value is a Laurent polynomial (denominator is a power of `v`).
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    /// Returns the constant value if this is a rational number.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.shift == 0 && self.den.is_one() && self.num.degree() == Some(0) {
            Some(self.num.0[0].clone())
        } else {
            None
        }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::from_parts(-self.shift, self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().pow(-e);
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale_rational(&self, c: &BigRational) -> Self {
        if c.is_zero() || self.is_zero() {
            return Self::zero();
        }
        RationalFunctionV {
            shift: self.shift,
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Numerator as an integer polynomial in `v` (low degree first), paired
    /// with [`denominator`](Self::denominator) so that the two are coprime in
    /// `Z[v]` and the denominator has positive leading coefficient.
    pub fn numerator(&self) -> Vec<BigInt> {
        self.integer_parts().0
    }

    pub fn denominator(&self) -> Vec<BigInt> {
        self.integer_parts().1
    }

    fn integer_parts(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        if self.is_zero() {
            return (vec![], vec![BigInt::one()]);
        }
        let (mut num, mut den) = (self.num.clone(), self.den.clone());
        if self.shift >= 0 {
            num = num.mul(&QPoly::monomial(BigRational::one(), self.shift as usize));
        } else {
            den = den.mul(&QPoly::monomial(BigRational::one(), (-self.shift) as usize));
        }
        let (nc, nd) = num.integer_content();
        let (dc, dd) = den.integer_content();
        // scale both by lcm of denominators, then divide by joint content.
        let l = num_integer::Integer::lcm(&nd, &dd);
        let lr = BigRational::from_integer(l);
        let ni = num.to_integers(&lr);
        let di = den.to_integers(&lr);
        let _ = (nc, dc);
        let mut g = BigInt::zero();
        for c in ni.iter().chain(di.iter()) {
            g = num_integer::Integer::gcd(&g, c);
        }
        let sign = if di.last().map(|c| c.is_negative()).unwrap_or(false) {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let g = g * sign;
        (
            ni.iter().map(|c| c / &g).collect(),
            di.iter().map(|c| c / &g).collect(),
        )
    }

    /// Value under `v -> -v`.
    pub fn reflect(&self) -> Self {
        let s = if self.shift.rem_euclid(2) == 1 {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        Self::from_parts(self.shift, self.num.reflect().scale(&s), self.den.reflect())
    }

    /// True when only even powers of `v` occur.
    pub fn is_even(&self) -> bool {
        self.is_zero()
            || (self.shift.rem_euclid(2) == 0 && self.num.is_even_fn() && self.den.is_even_fn())
    }

    /// Substitute `v^2 = 1/q`.
    pub fn eval_at_curve(&self, q: u64) -> Result<BigRational, ScalarError> {
        if self.is_zero() {
            return Ok(BigRational::zero());
        }
        if !self.is_even() {
            return Err(ScalarError::OddPowerPresent(self.to_string()));
        }
        let w = BigRational::new(BigInt::one(), BigInt::from(q));
        let half = |p: &QPoly| QPoly(p.0.iter().step_by(2).cloned().collect());
        let n = half(&self.num).eval(&w);
        let d = half(&self.den).eval(&w);
        let sh = self.shift / 2;
        let wq = if sh >= 0 {
            num_traits::pow(w.clone(), sh as usize)
        } else {
            num_traits::pow(w.recip(), (-sh) as usize)
        };
        if d.is_zero() {
            return Err(ScalarError::PoleAtCurve(self.to_string()));
        }
        Ok(n / d * wq)
    }

    /// The value at `v = q^{-1/2}` as `(a, b)` with value `a + b v`.
    ///
    /// When `q` is a perfect square `v` is rational and `b` is always zero.
    pub fn curve_parts(&self, q: u64) -> Result<(BigRational, BigRational), ScalarError> {
        if self.is_zero() {
            return Ok((BigRational::zero(), BigRational::zero()));
        }
        let qr = BigRational::from_integer(BigInt::from(q));
        let qpow = |j: i64| {
            if j >= 0 {
                num_traits::pow(qr.clone(), j as usize)
            } else {
                num_traits::pow(qr.recip(), (-j) as usize)
            }
        };
        let parts = |p: &QPoly, shift: i64| {
            let (mut a, mut b) = (BigRational::zero(), BigRational::zero());
            for (k, c) in p.0.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let e = k as i64 + shift;
                // v^e = q^{-floor(e/2)} v^{e mod 2}
                let f = c * qpow(-e.div_euclid(2));
                if e.rem_euclid(2) == 0 {
                    a += f;
                } else {
                    b += f;
                }
            }
            (a, b)
        };
        let (a, b) = parts(&self.num, self.shift);
        let (c, d) = parts(&self.den, 0);
        // (a + b v) / (c + d v) = (a + b v)(c - d v) / (c^2 - d^2 / q)
        let norm = &c * &c - &d * &d / &qr;
        if norm.is_zero() {
            return Err(ScalarError::PoleAtCurve(self.to_string()));
        }
        let re = (&a * &c - &b * &d / &qr) / &norm;
        let im = (&b * &c - &a * &d) / &norm;
        let root = num_integer::Roots::sqrt(&q);
        if root * root == q {
            let s = BigRational::from_integer(BigInt::from(root));
            return Ok((re + im / s, BigRational::zero()));
        }
        Ok((re, im))
    }

    /// Canonical representative `a + b v` modulo `q v^2 - 1`.
    pub fn reduce_at_curve(&self, q: u64) -> Result<Self, ScalarError> {
        let (a, b) = self.curve_parts(q)?;
        Ok(&Self::from_rational(a) + &Self::monomial(b, 1))
    }

    /// Laurent coefficients `(low_exponent, coeffs)` when this is a Laurent polynomial.
    pub fn laurent_coeffs(&self) -> Option<(i64, Vec<BigRational>)> {
        if self.is_laurent() {
            Some((self.shift, self.num.0.clone()))
        } else {
            None
        }
    }

    fn fmt_laurent(f: &mut fmt::Formatter<'_>, shift: i64, p: &QPoly) -> fmt::Result {
        let mut first = true;
        for (i, c) in p.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let e = shift + i as i64;
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let coeff_str = if a.is_integer() {
                a.numer().to_string()
            } else {
                format!("{}/{}", a.numer(), a.denom())
            };
            match (e, a.is_one()) {
                (0, _) => write!(f, "{coeff_str}")?,
                (1, true) => write!(f, "v")?,
                (1, false) => write!(f, "{coeff_str}*v")?,
                (_, true) => write!(f, "v^{e}")?,
                (_, false) => write!(f, "{coeff_str}*v^{e}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Display for RationalFunctionV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            Self::fmt_laurent(f, self.shift, &self.num)
        } else {
            write!(f, "(")?;
            Self::fmt_laurent(f, self.shift, &self.num)?;
            write!(f, ")/(")?;
            Self::fmt_laurent(f, 0, &self.den)?;
            write!(f, ")")
        }
    }
}

impl fmt::Debug for RationalFunctionV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> Add<&'a RationalFunctionV> for &'a RationalFunctionV {
    type Output = RationalFunctionV;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: &RationalFunctionV) -> RationalFunctionV {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.shift.min(rhs.shift);
        let lift = |p: &QPoly, s: i64| -> QPoly {
            if s == e {
                p.clone()
            } else {
                p.mul(&QPoly::monomial(BigRational::one(), (s - e) as usize))
            }
        };
        if self.den == rhs.den {
            let num = lift(&self.num, self.shift).add(&lift(&rhs.num, rhs.shift));
            return RationalFunctionV::from_parts(e, num, self.den.clone());
        }
        let num = lift(&self.num, self.shift)
            .mul(&rhs.den)
            .add(&lift(&rhs.num, rhs.shift).mul(&self.den));
        RationalFunctionV::from_parts(e, num, self.den.mul(&rhs.den))
    }
}

impl<'a> Mul<&'a RationalFunctionV> for &'a RationalFunctionV {
    type Output = RationalFunctionV;
    fn mul(self, rhs: &RationalFunctionV) -> RationalFunctionV {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunctionV::zero();
        }
        let shift = self.shift + rhs.shift;
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunctionV {
                shift,
                num: self.num.mul(&rhs.num),
                den: QPoly::one(),
            };
        }
        // cross-cancel before multiplying
        let g1 = QPoly::gcd(&self.num, &rhs.den);
        let g2 = QPoly::gcd(&rhs.num, &self.den);
        let n1 = self.num.div_rem(&g1).0;
        let d2 = rhs.den.div_rem(&g1).0;
        let n2 = rhs.num.div_rem(&g2).0;
        let d1 = self.den.div_rem(&g2).0;
        RationalFunctionV::from_parts(shift, n1.mul(&n2), d1.mul(&d2))
    }
}

impl Neg for &RationalFunctionV {
    type Output = RationalFunctionV;
    fn neg(self) -> RationalFunctionV {
        RationalFunctionV {
            shift: self.shift,
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Neg for RationalFunctionV {
    type Output = RationalFunctionV;
    fn neg(self) -> RationalFunctionV {
        -&self
    }
}

impl<'a> Sub<&'a RationalFunctionV> for &'a RationalFunctionV {
    type Output = RationalFunctionV;
    fn sub(self, rhs: &RationalFunctionV) -> RationalFunctionV {
        self + &(-rhs)
    }
}

impl<'a> Div<&'a RationalFunctionV> for &'a RationalFunctionV {
    type Output = RationalFunctionV;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &RationalFunctionV) -> RationalFunctionV {
        self * &rhs.inv()
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<RationalFunctionV> for RationalFunctionV {
            type Output = RationalFunctionV;
            fn $m(self, rhs: RationalFunctionV) -> RationalFunctionV {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a RationalFunctionV> for RationalFunctionV {
            type Output = RationalFunctionV;
            fn $m(self, rhs: &RationalFunctionV) -> RationalFunctionV {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<RationalFunctionV> for &'a RationalFunctionV {
            type Output = RationalFunctionV;
            fn $m(self, rhs: RationalFunctionV) -> RationalFunctionV {
                self.$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&RationalFunctionV> for RationalFunctionV {
    fn add_assign(&mut self, rhs: &RationalFunctionV) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&RationalFunctionV> for RationalFunctionV {
    fn sub_assign(&mut self, rhs: &RationalFunctionV) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&RationalFunctionV> for RationalFunctionV {
    fn mul_assign(&mut self, rhs: &RationalFunctionV) {
        *self = &*self * rhs;
    }
}

impl From<i64> for RationalFunctionV {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

/// The symmetric quantum integer `[s] = (v^s - v^-s) / (v - v^-1)`.
pub fn qint(s: u32) -> RationalFunctionV {
    if s == 0 {
        return RationalFunctionV::zero();
    }
    // v^{-(s-1)} + v^{-(s-3)} + ... + v^{s-1}
    let mut coeffs = vec![0i64; 2 * (s as usize) - 1];
    for i in (0..coeffs.len()).step_by(2) {
        coeffs[i] = 1;
    }
    RationalFunctionV::laurent(-(s as i64 - 1), &coeffs)
}

/// `c_i = v^i [i] N_i / i`.
pub fn c_coeff(i: u32, n_i: u64) -> RationalFunctionV {
    assert!(i >= 1);
    let k = BigRational::new(BigInt::from(n_i), BigInt::from(i));
    (&RationalFunctionV::v_pow(i as i64) * &qint(i)).scale_rational(&k)
}

/// `v^{-1} - v`, the recurring normalisation of the elliptic Hall relations.
pub fn vinv_minus_v() -> RationalFunctionV {
    RationalFunctionV::laurent(-1, &[1, 0, -1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(low: i64, c: &[i64]) -> RationalFunctionV {
        RationalFunctionV::laurent(low, c)
    }

    #[test]
    fn qint_small_values() {
        assert_eq!(qint(1), RationalFunctionV::one());
        assert_eq!(qint(2), rf(-1, &[1, 0, 1]));
        assert_eq!(qint(3), rf(-2, &[1, 0, 1, 0, 1]));
    }

    #[test]
    fn qint_identity_up_to_twelve() {
        let vm = rf(-1, &[-1, 0, 1]); // v - v^-1
        for s in 1..=12u32 {
            let lhs = &qint(s) * &vm;
            let rhs = &RationalFunctionV::v_pow(s as i64) - &RationalFunctionV::v_pow(-(s as i64));
            assert_eq!(lhs, rhs, "s = {s}");
        }
    }

    #[test]
    fn c_coeff_examples() {
        assert_eq!(c_coeff(1, 1), RationalFunctionV::v_pow(1));
        let expect = (&RationalFunctionV::v_pow(2) * &qint(2)).scale_rational(&BigRational::new(
            BigInt::from(5),
            BigInt::from(2),
        ));
        assert_eq!(c_coeff(2, 5), expect);
        assert_eq!(c_coeff(1, 4), rf(1, &[4]));
    }

    #[test]
    fn eval_examples() {
        let a = rf(-2, &[1, 0, 1]);
        assert_eq!(a.eval_at_curve(2).unwrap(), BigRational::from_integer(3.into()));
        assert_eq!(
            RationalFunctionV::one().eval_at_curve(7).unwrap(),
            BigRational::one()
        );
        let b = rf(-4, &[1, 0, -2, 0, 1]);
        assert_eq!(b.eval_at_curve(2).unwrap(), BigRational::one());
        assert!(matches!(
            rf(1, &[1]).eval_at_curve(2),
            Err(ScalarError::OddPowerPresent(_))
        ));
    }

    #[test]
    fn rational_reduction() {
        // (v^2 - 1)/(v - 1) = v + 1
        let a = RationalFunctionV::from_parts(0, QPoly::from_ints(&[-1, 0, 1]), QPoly::from_ints(&[-1, 1]));
        assert_eq!(a, rf(0, &[1, 1]));
        assert!(a.is_laurent());
        let inv = qint(2).inv();
        assert_eq!(&inv * &qint(2), RationalFunctionV::one());
        assert_eq!(inv.numerator(), vec![BigInt::from(0), BigInt::from(1)]);
        assert_eq!(
            inv.denominator(),
            vec![BigInt::from(1), BigInt::from(0), BigInt::from(1)]
        );
    }

    #[test]
    fn display_forms() {
        assert_eq!(rf(-2, &[1, 0, 1]).to_string(), "1 + v^-2");
        assert_eq!(RationalFunctionV::from_ratio(-3, 2).to_string(), "-3/2");
    }
}
