//! Coefficient rings: exact complex rationals and `f64` complex numbers.
//!
//! Every polynomial, function and matrix in the crate is generic over
//! [`Coeff`], so the same code path runs exactly (for identities) and in
//! floating point (for large-`k` asymptotics).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// Round-to-nearest conversion of a big rational.
pub fn q_to_f64(x: &Q) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to a scaled division when numerator/denominator overflow f64.
    let n = x.numer();
    let d = x.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    let (nn, dd) = if shift > 0 {
        (n.clone(), d.clone() << (shift as usize))
    } else {
        (n.clone() << ((-shift) as usize), d.clone())
    };
    let r = BigRational::new(nn, dd).to_f64().unwrap_or(f64::NAN);
    r * 2f64.powi(shift as i32)
}

/// Ring operations shared by exact and floating coefficients.
pub trait Coeff:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn i() -> Self;
    fn from_q(x: &Q) -> Self;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_c64(&self) -> Complex64;
    /// Division by a non-zero rational.
    fn div_q(&self, x: &Q) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_q(&qi(n))
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_q(&q(n, d))
    }
    fn scale_q(&self, x: &Q) -> Self {
        self.clone() * Self::from_q(x)
    }
}

/// Exact complex rational `re + i·im`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Cq {
    pub re: Q,
    pub im: Q,
}

impl Cq {
    pub fn new(re: Q, im: Q) -> Self {
        Cq { re, im }
    }
    pub fn real(re: Q) -> Self {
        Cq { re, im: Q::zero() }
    }
    pub fn imag(im: Q) -> Self {
        Cq { re: Q::zero(), im }
    }
    pub fn int(n: i64) -> Self {
        Cq::real(qi(n))
    }
    pub fn ratio(n: i64, d: i64) -> Self {
        Cq::real(q(n, d))
    }
    pub fn gaussian(re: i64, im: i64) -> Self {
        Cq::new(qi(re), qi(im))
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn norm_sqr(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }
    pub fn inv(&self) -> Option<Cq> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Cq::new(&self.re / &n, -(&self.im / &n)))
    }
    pub fn div(&self, other: &Cq) -> Option<Cq> {
        other.inv().map(|o| self.clone() * o)
    }
}

impl fmt::Debug for Cq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "({}-{}i)", self.re, -&self.im)
                } else {
                    write!(f, "({}+{}i)", self.re, self.im)
                }
            }
        }
    }
}

impl Add for Cq {
    type Output = Cq;
    fn add(self, o: Cq) -> Cq {
        Cq::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Cq {
    type Output = Cq;
    fn sub(self, o: Cq) -> Cq {
        Cq::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Cq {
    type Output = Cq;
    fn mul(self, o: Cq) -> Cq {
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        Cq::new(re, im)
    }
}

impl<'a> Mul<&'a Cq> for &'a Cq {
    type Output = Cq;
    fn mul(self, o: &Cq) -> Cq {
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        Cq::new(re, im)
    }
}

impl Neg for Cq {
    type Output = Cq;
    fn neg(self) -> Cq {
        Cq::new(-self.re, -self.im)
    }
}

impl Serialize for Cq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.re.to_string(), self.im.to_string()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (re, im): (String, String) = Deserialize::deserialize(d)?;
        let re: Q = re.parse().map_err(serde::de::Error::custom)?;
        let im: Q = im.parse().map_err(serde::de::Error::custom)?;
        Ok(Cq::new(re, im))
    }
}

impl Coeff for Cq {
    fn zero() -> Self {
        Cq::default()
    }
    fn one() -> Self {
        Cq::real(Q::one())
    }
    fn i() -> Self {
        Cq::new(Q::zero(), Q::one())
    }
    fn from_q(x: &Q) -> Self {
        Cq::real(x.clone())
    }
    fn conj(&self) -> Self {
        Cq::new(self.re.clone(), -&self.im)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(q_to_f64(&self.re), q_to_f64(&self.im))
    }
    fn div_q(&self, x: &Q) -> Self {
        Cq::new(&self.re / x, &self.im / x)
    }
    fn scale_q(&self, x: &Q) -> Self {
        Cq::new(&self.re * x, &self.im * x)
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_q(x: &Q) -> Self {
        Complex64::new(q_to_f64(x), 0.0)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn div_q(&self, x: &Q) -> Self {
        self / q_to_f64(x)
    }
}

/// Exact factorial as a big integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}
