//! Exact Gaussian rationals.
//!
//! Every weight in the crate is a `ComplexRat`: a pair of arbitrary precision
//! rationals. There is no floating point anywhere.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `re + im·i` with both parts exact.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ComplexRat {
    re: BigRational,
    im: BigRational,
}

impl ComplexRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        ComplexRat { re, im }
    }

    pub fn zero() -> Self {
        ComplexRat::default()
    }

    pub fn one() -> Self {
        ComplexRat::from(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        ComplexRat::new(BigRational::zero(), BigRational::one())
    }

    pub fn real(re: BigRational) -> Self {
        ComplexRat::new(re, BigRational::zero())
    }

    /// `p/q` as a real number. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        ComplexRat::real(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// Integer Gaussian `a + b·i`.
    pub fn gaussian(a: i64, b: i64) -> Self {
        ComplexRat::new(
            BigRational::from_integer(a.into()),
            BigRational::from_integer(b.into()),
        )
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        ComplexRat::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|²`, always a nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(ComplexRat::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn checked_div(&self, rhs: &ComplexRat) -> Option<Self> {
        rhs.inv().map(|r| self * &r)
    }

    /// Integer power; negative exponents need a nonzero base.
    pub fn pow(&self, exp: i64) -> Option<Self> {
        let mut base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = ComplexRat::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Some(acc)
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// The `[re, im]` string pair used in JSON.
    pub fn to_pair(&self) -> [String; 2] {
        [rat_to_string(&self.re), rat_to_string(&self.im)]
    }
}

pub(crate) fn rat_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"` or `"p/q"` with optional sign. Decimals are rejected.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let ok = |x: &str| {
        let digits = x.strip_prefix(['-', '+']).unwrap_or(x);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !ok(n) || !ok(d) {
        return Err(bad());
    }
    let n: BigInt = n.trim_start_matches('+').parse().map_err(|_| bad())?;
    let d: BigInt = d.trim_start_matches('+').parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

impl FromStr for ComplexRat {
    type Err = Error;

    /// Accepts `3`, `-1/2`, `i`, `-2/3i`, `1/2+3i`, `1-i`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(ComplexRat::real(parse_rational(&t)?));
        };
        // split point: last sign that is not the leading one
        let split = body
            .char_indices()
            .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
            .map(|(k, _)| k)
            .next_back();
        let (re_part, im_part) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im_part {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            p => parse_rational(p)?,
        };
        Ok(ComplexRat::new(parse_rational(re_part)?, im))
    }
}

impl fmt::Display for ComplexRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", rat_to_string(&self.re));
        }
        let im_abs = self.im.abs();
        let im_str = if im_abs.is_one() {
            String::new()
        } else {
            rat_to_string(&im_abs)
        };
        let sign = if self.im.is_negative() { "-" } else { "+" };
        if self.re.is_zero() {
            let lead = if self.im.is_negative() { "-" } else { "" };
            write!(f, "{lead}{im_str}i")
        } else {
            write!(f, "{}{sign}{im_str}i", rat_to_string(&self.re))
        }
    }
}

impl fmt::Debug for ComplexRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for ComplexRat {
    fn from(v: i64) -> Self {
        ComplexRat::real(BigRational::from_integer(v.into()))
    }
}

impl From<i32> for ComplexRat {
    fn from(v: i32) -> Self {
        ComplexRat::from(v as i64)
    }
}

impl From<BigRational> for ComplexRat {
    fn from(v: BigRational) -> Self {
        ComplexRat::real(v)
    }
}

impl From<BigInt> for ComplexRat {
    fn from(v: BigInt) -> Self {
        ComplexRat::real(BigRational::from_integer(v))
    }
}

impl<'a> Add<&'a ComplexRat> for &'a ComplexRat {
    type Output = ComplexRat;
    fn add(self, rhs: &ComplexRat) -> ComplexRat {
        ComplexRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a ComplexRat> for &'a ComplexRat {
    type Output = ComplexRat;
    fn sub(self, rhs: &ComplexRat) -> ComplexRat {
        ComplexRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a ComplexRat> for &'a ComplexRat {
    type Output = ComplexRat;
    fn mul(self, rhs: &ComplexRat) -> ComplexRat {
        if self.im.is_zero() && rhs.im.is_zero() {
            return ComplexRat::real(&self.re * &rhs.re);
        }
        ComplexRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

/// Panics on division by zero, like the rational types underneath.
/// Use [`ComplexRat::checked_div`] where zero is possible.
impl<'a> Div<&'a ComplexRat> for &'a ComplexRat {
    type Output = ComplexRat;
    fn div(self, rhs: &ComplexRat) -> ComplexRat {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for &ComplexRat {
    type Output = ComplexRat;
    fn neg(self) -> ComplexRat {
        ComplexRat::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for ComplexRat {
    type Output = ComplexRat;
    fn neg(self) -> ComplexRat {
        ComplexRat::new(-self.re, -self.im)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<ComplexRat> for ComplexRat {
            type Output = ComplexRat;
            fn $m(self, rhs: ComplexRat) -> ComplexRat {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a ComplexRat> for ComplexRat {
            type Output = ComplexRat;
            fn $m(self, rhs: &ComplexRat) -> ComplexRat {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<ComplexRat> for &'a ComplexRat {
            type Output = ComplexRat;
            fn $m(self, rhs: ComplexRat) -> ComplexRat {
                self.$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&ComplexRat> for ComplexRat {
    fn add_assign(&mut self, rhs: &ComplexRat) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&ComplexRat> for ComplexRat {
    fn sub_assign(&mut self, rhs: &ComplexRat) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&ComplexRat> for ComplexRat {
    fn mul_assign(&mut self, rhs: &ComplexRat) {
        *self = &*self * rhs;
    }
}

impl std::iter::Sum for ComplexRat {
    fn sum<I: Iterator<Item = ComplexRat>>(iter: I) -> Self {
        iter.fold(ComplexRat::zero(), |mut a, b| {
            a += &b;
            a
        })
    }
}

impl std::iter::Product for ComplexRat {
    fn product<I: Iterator<Item = ComplexRat>>(iter: I) -> Self {
        iter.fold(ComplexRat::one(), |a, b| a * b)
    }
}

impl Serialize for ComplexRat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let [re, im] = self.to_pair();
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&re)?;
        t.serialize_element(&im)?;
        t.end()
    }
}

struct ScalarVisitor;

fn part_from_value<E: de::Error>(v: &serde_json::Value) -> std::result::Result<BigRational, E> {
    match v {
        serde_json::Value::String(s) => parse_rational(s).map_err(E::custom),
        serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => {
            parse_rational(&n.to_string()).map_err(E::custom)
        }
        other => Err(E::custom(format!(
            "expected an exact rational string or integer, found {other}"
        ))),
    }
}

impl<'de> Visitor<'de> for ScalarVisitor {
    type Value = ComplexRat;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("[\"re\",\"im\"], a scalar string, or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ComplexRat, E> {
        v.parse().map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ComplexRat, E> {
        Ok(ComplexRat::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ComplexRat, E> {
        Ok(ComplexRat::from(BigInt::from(v)))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ComplexRat, E> {
        Err(E::custom(format!(
            "floating point weight {v} rejected; write it as \"p/q\""
        )))
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<ComplexRat, A::Error> {
        let re: serde_json::Value = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(0, &self))?;
        let im: serde_json::Value = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(1, &self))?;
        if seq.next_element::<serde_json::Value>()?.is_some() {
            return Err(de::Error::invalid_length(3, &self));
        }
        Ok(ComplexRat::new(part_from_value(&re)?, part_from_value(&im)?))
    }
}

impl<'de> Deserialize<'de> for ComplexRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(ScalarVisitor)
    }
}
