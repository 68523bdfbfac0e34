//! Exact scalar types: rationals, half-integers, polynomials in the central
//! charge symbol c, and rational functions in c for symbolic linear algebra.
//! No floating point anywhere; weights and mode indices are exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

/// Exact rational scalar. Always reduced, denominator positive.
pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn big_to_rat(b: &BigInt) -> Rat {
    Rat::from_integer(b.clone())
}

/// Render a rational as "p" or "p/q".
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse "p" or "p/q".
pub fn rat_from_str(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    match s.split_once('/') {
        None => BigInt::from_str(s)
            .map(Rat::from_integer)
            .map_err(|e| format!("bad integer {s:?}: {e}")),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|e| format!("bad numerator: {e}"))?;
            let q = BigInt::from_str(q.trim()).map_err(|e| format!("bad denominator: {e}"))?;
            if q.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(Rat::new(p, q))
        }
    }
}

/// Exact element of (1/2)Z, stored as twice its value. Used for conformal
/// weights and classical mode indices (G modes live in Z + 1/2).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Half(i64);

impl Half {
    pub const ZERO: Half = Half(0);

    pub fn from_int(n: i64) -> Half {
        Half(2 * n)
    }

    /// From twice the value: halves(3) = 3/2.
    pub fn halves(t: i64) -> Half {
        Half(t)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Integer value; panics when not an integer.
    pub fn as_int(self) -> i64 {
        assert!(self.is_integer(), "not an integer: {self}");
        self.0 / 2
    }

    pub fn to_rat(self) -> Rat {
        rat(self.0, 2)
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn abs(self) -> Half {
        Half(self.0.abs())
    }

    /// Largest integer <= self.
    pub fn floor(self) -> i64 {
        self.0.div_euclid(2)
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, rhs: Half) -> Half {
        Half(self.0 - rhs.0)
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl Mul<i64> for Half {
    type Output = Half;
    fn mul(self, rhs: i64) -> Half {
        Half(self.0 * rhs)
    }
}

impl AddAssign for Half {
    fn add_assign(&mut self, rhs: Half) {
        self.0 += rhs.0;
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Half {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let r = rat_from_str(s)?;
        let two = BigInt::from(2);
        let t = r.numer() * &two / r.denom();
        if &Rat::new(t.clone(), two) != &r {
            return Err(format!("{s:?} is not a half-integer"));
        }
        let small: i64 = t.try_into().map_err(|_| "half-integer out of range".to_string())?;
        Ok(Half(small))
    }
}

/// Polynomial in the central charge symbol c with rational coefficients.
/// Invariant: no explicitly stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CPoly {
    terms: BTreeMap<u32, Rat>,
}

impl CPoly {
    pub fn zero() -> CPoly {
        CPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> CPoly {
        CPoly::constant(Rat::one())
    }

    pub fn constant(r: Rat) -> CPoly {
        let mut t = BTreeMap::new();
        if !r.is_zero() {
            t.insert(0, r);
        }
        CPoly { terms: t }
    }

    pub fn from_int(n: i64) -> CPoly {
        CPoly::constant(rat_int(n))
    }

    /// The symbol c itself.
    pub fn c() -> CPoly {
        CPoly::monomial(1, Rat::one())
    }

    pub fn monomial(pow: u32, coeff: Rat) -> CPoly {
        let mut t = BTreeMap::new();
        if !coeff.is_zero() {
            t.insert(pow, coeff);
        }
        CPoly { terms: t }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading_coeff(&self) -> Option<&Rat> {
        self.terms.values().next_back()
    }

    pub fn coeff(&self, pow: u32) -> Rat {
        self.terms.get(&pow).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Rat)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    /// As a constant rational, when degree zero.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.degree() {
            None => Some(Rat::zero()),
            Some(0) => Some(self.coeff(0)),
            _ => None,
        }
    }

    fn insert(&mut self, pow: u32, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(pow) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, r: &Rat) -> CPoly {
        if r.is_zero() {
            return CPoly::zero();
        }
        CPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v.clone() * r.clone())).collect(),
        }
    }

    pub fn eval_c(&self, c: &Rat) -> Rat {
        let mut acc = Rat::zero();
        // Horner over the sparse support.
        for (pow, coeff) in self.terms.iter().rev() {
            acc = acc + coeff * &num_traits::pow::pow(c.clone(), *pow as usize);
        }
        acc
    }

    /// Polynomial division: (quotient, remainder) with deg(rem) < deg(rhs).
    pub fn div_rem(&self, rhs: &CPoly) -> (CPoly, CPoly) {
        assert!(!rhs.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quo = CPoly::zero();
        let dr = rhs.degree().unwrap();
        let lr = rhs.leading_coeff().unwrap().clone();
        while let Some(d) = rem.degree() {
            if d < dr {
                break;
            }
            let factor = rem.leading_coeff().unwrap().clone() / lr.clone();
            let shift = d - dr;
            let t = CPoly::monomial(shift, factor);
            rem = &rem - &(&t * rhs);
            quo = &quo + &t;
        }
        (quo, rem)
    }

    /// Monic gcd over Q[c].
    pub fn gcd(&self, rhs: &CPoly) -> CPoly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Scale so the leading coefficient is 1 (zero stays zero).
    pub fn monic(&self) -> CPoly {
        match self.leading_coeff() {
            None => CPoly::zero(),
            Some(l) => self.scale(&l.recip()),
        }
    }
}

impl Add for &CPoly {
    type Output = CPoly;
    fn add(self, rhs: &CPoly) -> CPoly {
        let mut out = self.clone();
        for (k, v) in rhs.terms.iter() {
            out.insert(*k, v.clone());
        }
        out
    }
}

impl Sub for &CPoly {
    type Output = CPoly;
    fn sub(self, rhs: &CPoly) -> CPoly {
        let mut out = self.clone();
        for (k, v) in rhs.terms.iter() {
            out.insert(*k, -v.clone());
        }
        out
    }
}

impl Mul for &CPoly {
    type Output = CPoly;
    fn mul(self, rhs: &CPoly) -> CPoly {
        let mut out = CPoly::zero();
        for (ka, va) in self.terms.iter() {
            for (kb, vb) in rhs.terms.iter() {
                out.insert(ka + kb, va.clone() * vb.clone());
            }
        }
        out
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        CPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (pow, coeff) in self.terms.iter() {
            let neg = coeff.is_negative();
            let mag = coeff.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag_one = mag.is_one();
            match (*pow, mag_one) {
                (0, _) => write!(f, "{}", rat_to_string(&mag))?,
                (_, true) => {}
                (_, false) => write!(f, "{}*", rat_to_string(&mag))?,
            }
            match *pow {
                0 => {}
                1 => write!(f, "c")?,
                p => write!(f, "c^{p}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for CPoly {
    type Err = String;

    /// Grammar: [-] term { (+|-) term }, term := rational [* cpart] | cpart,
    /// cpart := c [^ natural]. Examples: "7/10", "2/3*c", "1 - 1/2*c^2".
    fn from_str(s: &str) -> Result<CPoly, String> {
        let mut out = CPoly::zero();
        let s = s.trim();
        if s.is_empty() {
            return Err("empty scalar".into());
        }
        let mut rest = s;
        let mut sign = 1i64;
        if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r.trim_start();
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r.trim_start();
        }
        loop {
            // term boundary: scan until top-level + or - (not inside a number's leading sign)
            let end = rest
                .char_indices()
                .find(|&(i, ch)| (ch == '+' || ch == '-') && i > 0)
                .map(|(i, _)| i)
                .unwrap_or(rest.len());
            let term = rest[..end].trim();
            let (pow, coeff) = parse_term(term)?;
            out.insert(pow, coeff * rat_int(sign));
            rest = rest[end..].trim_start();
            if rest.is_empty() {
                break;
            }
            sign = match rest.chars().next() {
                Some('+') => 1,
                Some('-') => -1,
                _ => return Err(format!("expected + or - near {rest:?}")),
            };
            rest = rest[1..].trim_start();
        }
        return Ok(out);

        fn parse_term(term: &str) -> Result<(u32, Rat), String> {
            if term.is_empty() {
                return Err("empty term".into());
            }
            // Split off an optional "*c^k" / "c^k" tail.
            if let Some(cpos) = term.find('c') {
                let (head, ctail) = term.split_at(cpos);
                let head = head.trim().trim_end_matches('*').trim();
                let coeff = if head.is_empty() { Rat::one() } else { rat_from_str(head)? };
                let pow_str = ctail[1..].trim();
                let pow = if pow_str.is_empty() {
                    1u32
                } else {
                    let p = pow_str
                        .strip_prefix('^')
                        .ok_or_else(|| format!("expected ^ in {ctail:?}"))?
                        .trim();
                    p.parse::<u32>().map_err(|e| format!("bad exponent {p:?}: {e}"))?
                };
                Ok((pow, coeff))
            } else {
                Ok((0, rat_from_str(term)?))
            }
        }
    }
}

/// Rational function in c: num/den with den monic and gcd(num, den) = 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFn {
    num: CPoly,
    den: CPoly,
}

impl RatFn {
    pub fn new(num: CPoly, den: CPoly) -> RatFn {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFn { num, den: CPoly::one() };
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        // normalize monic denominator
        let l = den.leading_coeff().unwrap().clone();
        RatFn {
            num: num.scale(&l.recip()),
            den: den.scale(&l.recip()),
        }
    }

    pub fn from_poly(p: CPoly) -> RatFn {
        RatFn { num: p, den: CPoly::one() }
    }

    pub fn zero() -> RatFn {
        RatFn::from_poly(CPoly::zero())
    }

    pub fn one() -> RatFn {
        RatFn::from_poly(CPoly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn num(&self) -> &CPoly {
        &self.num
    }

    pub fn den(&self) -> &CPoly {
        &self.den
    }

    pub fn recip(&self) -> RatFn {
        assert!(!self.is_zero(), "inverse of zero");
        RatFn::new(self.den.clone(), self.num.clone())
    }

    pub fn add(&self, rhs: &RatFn) -> RatFn {
        RatFn::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }

    pub fn sub(&self, rhs: &RatFn) -> RatFn {
        RatFn::new(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }

    pub fn mul(&self, rhs: &RatFn) -> RatFn {
        RatFn::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == CPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl serde::Serialize for Half {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Half {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for CPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for CPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn half_display_and_parse() {
        assert_eq!(Half::halves(3).to_string(), "3/2");
        assert_eq!(Half::from_int(-2).to_string(), "-2");
        assert_eq!("7/2".parse::<Half>().unwrap(), Half::halves(7));
        assert_eq!("-5/2".parse::<Half>().unwrap(), Half::halves(-5));
        assert_eq!("2".parse::<Half>().unwrap(), Half::from_int(2));
        assert!("1/3".parse::<Half>().is_err());
    }

    #[test]
    fn cpoly_parse_pinned_forms() {
        let p: CPoly = "7/10".parse().unwrap();
        assert_eq!(p, CPoly::constant(rat(7, 10)));
        let p: CPoly = "2/3*c".parse().unwrap();
        assert_eq!(p, CPoly::monomial(1, rat(2, 3)));
        let p: CPoly = "1 - 1/2*c^2".parse().unwrap();
        assert_eq!(p, &CPoly::one() - &CPoly::monomial(2, rat(1, 2)));
        let p: CPoly = "c".parse().unwrap();
        assert_eq!(p, CPoly::c());
        let p: CPoly = "-c^3 + 4".parse().unwrap();
        assert_eq!(p, &CPoly::from_int(4) - &CPoly::monomial(3, rat_int(1)));
    }

    #[test]
    fn cpoly_eval() {
        let p: CPoly = "1 - 1/2*c^2".parse().unwrap();
        assert_eq!(p.eval_c(&rat_int(2)), rat_int(-1));
        assert_eq!(p.eval_c(&rat(7, 10)), rat_int(1) - rat(49, 200));
    }

    #[test]
    fn ratfn_normalizes() {
        // (c^2 - 1)/(c - 1) = c + 1
        let num: CPoly = "c^2 - 1".parse().unwrap();
        let den: CPoly = "c - 1".parse().unwrap();
        let f = RatFn::new(num, den);
        assert_eq!(f, RatFn::from_poly("c + 1".parse().unwrap()));
        // 2c/2 = c with monic denominator
        let g = RatFn::new("2*c".parse().unwrap(), "2".parse().unwrap());
        assert_eq!(g, RatFn::from_poly(CPoly::c()));
    }

    #[test]
    fn ratfn_field_ops() {
        let c = RatFn::from_poly(CPoly::c());
        let half = RatFn::from_poly(CPoly::constant(rat(1, 2)));
        let x = c.add(&half); // c + 1/2
        let y = x.mul(&x.recip());
        assert_eq!(y, RatFn::one());
        assert!(x.sub(&x).is_zero());
    }

    fn arb_cpoly() -> impl Strategy<Value = CPoly> {
        proptest::collection::vec((-6i64..6, 1i64..5, 0u32..4), 0..4).prop_map(|v| {
            let mut p = CPoly::zero();
            for (n, d, pow) in v {
                p = &p + &CPoly::monomial(pow, rat(n, d));
            }
            p
        })
    }

    proptest! {
        #[test]
        fn cpoly_display_parse_roundtrip(p in arb_cpoly()) {
            let s = p.to_string();
            let q: CPoly = s.parse().unwrap();
            prop_assert_eq!(p, q);
        }

        #[test]
        fn cpoly_div_rem_identity(a in arb_cpoly(), b in arb_cpoly()) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b);
            prop_assert_eq!(&(&(&q * &b) + &r), &a);
            if let Some(dr) = r.degree() {
                prop_assert!(dr < b.degree().unwrap());
            }
        }

        #[test]
        fn ratfn_ring_axioms(a in arb_cpoly(), b in arb_cpoly(), c in arb_cpoly()) {
            let a = RatFn::from_poly(a);
            let b = RatFn::from_poly(b);
            let c = RatFn::from_poly(c);
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }
    }
}
