//! Exact rational scalars and points.

use std::fmt;
use std::ops::{Add, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"-0.25"`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let t = s.trim();
    let bad = || Error::input(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::input(format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip_abs = ip.trim_start_matches(['-', '+']);
        let whole: BigInt = if ip_abs.is_empty() { BigInt::zero() } else { ip_abs.parse().map_err(|_| bad())? };
        let frac: BigInt = fp.parse().map_err(|_| bad())?;
        let scale = num::pow(BigInt::from(10), fp.len());
        let v = Q::new(whole * &scale + frac, scale);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

pub fn format_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite double.
pub fn from_f64(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::input(format!("non-finite value {x}")))
}

/// `floor(sqrt(x) * 2^bits) / 2^bits` for `x >= 0`.
pub fn sqrt_floor(x: &Q, bits: u32) -> Q {
    assert!(!x.is_negative(), "sqrt of a negative rational");
    if x.is_zero() {
        return Q::zero();
    }
    let scale = BigInt::one() << (2 * bits as usize);
    let n = (x.numer() * scale) / x.denom();
    Q::new(n.sqrt(), BigInt::one() << bits as usize)
}

/// Square root with at least `sig_bits` significant bits.
pub fn sqrt_approx(x: &Q, sig_bits: u32) -> Q {
    if x.is_zero() {
        return Q::zero();
    }
    let mag = x.numer().bits() as i64 - x.denom().bits() as i64;
    let extra = (sig_bits as i64 - mag / 2 + 2).max(2) as u32;
    sqrt_floor(x, extra)
}

/// Rounds to the nearest multiple of `2^-bits`, returned as the scaled integer.
pub fn to_fixed(x: &Q, bits: u32) -> BigInt {
    let scaled = x * Q::from_integer(BigInt::one() << bits as usize);
    scaled.round().to_integer()
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint(pub Vec<Q>);

impl RationalPoint {
    pub fn new(coords: Vec<Q>) -> Self {
        RationalPoint(coords)
    }

    pub fn from_ints(v: &[i64]) -> Self {
        RationalPoint(v.iter().map(|&x| q(x)).collect())
    }

    pub fn zero(n: usize) -> Self {
        RationalPoint(vec![Q::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Q] {
        &self.0
    }

    pub fn scale(&self, s: &Q) -> RationalPoint {
        RationalPoint(self.0.iter().map(|x| x * s).collect())
    }

    pub fn dot(&self, other: &[Q]) -> Q {
        dot(&self.0, other)
    }

    pub fn norm2(&self) -> Q {
        dot(&self.0, &self.0)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    pub fn from_f64(v: &[f64]) -> Result<Self> {
        Ok(RationalPoint(v.iter().map(|&x| from_f64(x)).collect::<Result<_>>()?))
    }

    pub fn centroid(points: &[&RationalPoint]) -> RationalPoint {
        assert!(!points.is_empty());
        let n = points[0].dim();
        let mut acc = vec![Q::zero(); n];
        for p in points {
            for (a, x) in acc.iter_mut().zip(&p.0) {
                *a += x;
            }
        }
        let k = q(points.len() as i64);
        RationalPoint(acc.into_iter().map(|a| a / &k).collect())
    }
}

impl fmt::Debug for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Sub for &RationalPoint {
    type Output = Vec<Q>;
    fn sub(self, rhs: &RationalPoint) -> Vec<Q> {
        self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect()
    }
}

impl Add<&[Q]> for &RationalPoint {
    type Output = RationalPoint;
    fn add(self, rhs: &[Q]) -> RationalPoint {
        RationalPoint(self.0.iter().zip(rhs).map(|(a, b)| a + b).collect())
    }
}

impl Serialize for RationalPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.iter().map(format_rational).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        let mut out = Vec::with_capacity(raw.len());
        for v in raw {
            let x = match &v {
                serde_json::Value::String(s) => parse_rational(s),
                serde_json::Value::Number(n) => parse_rational(&n.to_string()),
                other => Err(Error::input(format!("bad coordinate {other}"))),
            };
            out.push(x.map_err(serde::de::Error::custom)?);
        }
        Ok(RationalPoint(out))
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    let mut s = Q::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}
