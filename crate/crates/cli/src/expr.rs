//! Parser for Laurent polynomials in `v` with rational coefficients, such as
//! `-3/2 v^-1 + 1/4*v^3 - 2`.

use hecke_core::scalars::RationalFunctionV as Rfv;
use num_bigint::BigInt;
use num_rational::BigRational;

fn rational(s: &str) -> Result<BigRational, String> {
    let bad = || format!("`{s}` is not a rational number");
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b == BigInt::from(0) {
                return Err(format!("zero denominator in `{s}`"));
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

fn term(t: &str) -> Result<Rfv, String> {
    let t = t.trim();
    let Some(pos) = t.find('v') else {
        return Ok(Rfv::from_rational(rational(t)?));
    };
    let coeff = t[..pos].trim().trim_end_matches('*').trim();
    let c = if coeff.is_empty() {
        BigRational::from_integer(1.into())
    } else {
        rational(coeff)?
    };
    let rest = t[pos + 1..].trim();
    let k = match rest.strip_prefix('^') {
        Some(e) => e
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .parse::<i64>()
            .map_err(|_| format!("bad exponent in `{t}`"))?,
        None if rest.is_empty() => 1,
        None => return Err(format!("unexpected `{rest}` in `{t}`")),
    };
    Ok(Rfv::monomial(c, k))
}

pub fn parse_laurent(s: &str) -> Result<Rfv, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty expression".into());
    }
    let mut out = Rfv::zero();
    let mut cur = String::new();
    let mut sign = 1;
    let mut prev: Option<char> = None;
    let flush = |cur: &str, sign: i64, out: &mut Rfv| -> Result<(), String> {
        if cur.is_empty() {
            return Err(format!("dangling sign in `{s}`"));
        }
        let t = term(cur)?;
        *out = if sign > 0 { &*out + &t } else { &*out - &t };
        Ok(())
    };
    for ch in s.chars() {
        // a sign right after `^` or `(` belongs to an exponent
        let exponent_sign = matches!(prev, Some('^') | Some('('));
        if (ch == '+' || ch == '-') && !exponent_sign && !cur.is_empty() {
            flush(&cur, sign, &mut out)?;
            cur.clear();
            sign = if ch == '-' { -1 } else { 1 };
        } else if (ch == '+' || ch == '-') && cur.is_empty() {
            sign *= if ch == '-' { -1 } else { 1 };
        } else {
            cur.push(ch);
        }
        prev = Some(ch);
    }
    flush(&cur, sign, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_terms() {
        assert_eq!(parse_laurent("2").unwrap(), Rfv::from_int(2));
        assert_eq!(parse_laurent("v^-2 + 1").unwrap(), Rfv::laurent(-2, &[1, 0, 1]));
        assert_eq!(parse_laurent("-v").unwrap(), Rfv::laurent(1, &[-1]));
        assert_eq!(
            parse_laurent("3/2*v^(-1) - 1/2 v").unwrap(),
            &Rfv::monomial(BigRational::new(3.into(), 2.into()), -1)
                - &Rfv::monomial(BigRational::new(1.into(), 2.into()), 1)
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_laurent("").is_err());
        assert!(parse_laurent("1/0").is_err());
        assert!(parse_laurent("v^x").is_err());
        assert!(parse_laurent("2 +").is_err());
        assert!(parse_laurent("w").is_err());
    }
}
