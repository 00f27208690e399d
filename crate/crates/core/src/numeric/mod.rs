//! Exact arithmetic on the rationals, real quadratic fields and a single
//! projective point at infinity.

mod float;
mod matrix;
mod parse;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use float::{
    bigfloat_to_f64, default_precision, to_bigfloat, to_f64, within, HighPrecision, PRECISION_ENV,
};
pub use matrix::{IntMatrix, UnimodularMap};

/// An exact real number: a rational, an element of a real quadratic field,
/// or the projective point at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactReal {
    Rational(BigRational),
    Surd(Surd),
    Infinity,
}

/// `(p + q*sqrt(d)) / r` with `d > 1` squarefree, `q != 0`, `r > 0` and
/// `gcd(p, q, r) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    r: BigInt,
}

impl Surd {
    pub fn p(&self) -> &BigInt {
        &self.p
    }
    pub fn q(&self) -> &BigInt {
        &self.q
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }
    pub fn r(&self) -> &BigInt {
        &self.r
    }
}

/// Uniform view `(p + q*sqrt(d)) / r`; rationals use `q = 0, d = 1`.
#[derive(Clone, Debug)]
struct Quad {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    r: BigInt,
}

fn common_field(a: &Quad, b: &Quad) -> Result<BigInt> {
    if a.q.is_zero() {
        Ok(b.d.clone())
    } else if b.q.is_zero() || a.d == b.d {
        Ok(a.d.clone())
    } else {
        Err(Error::MixedFields(a.d.to_string(), b.d.to_string()))
    }
}

/// Splits `n > 0` into `(s, core)` with `n = s^2 * core` and `core` squarefree.
fn square_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut core = BigInt::one();
    let mut k = BigInt::from(2u32);
    while &k * &k <= rest {
        let mut mult = 0u32;
        while (&rest % &k).is_zero() {
            rest /= &k;
            mult += 1;
        }
        for _ in 0..mult / 2 {
            square *= &k;
        }
        if mult % 2 == 1 {
            core *= &k;
        }
        k += 1u32;
    }
    core *= rest;
    (square, core)
}

/// Sign of `p + q*sqrt(n)` for an integer `n >= 0`.
pub(crate) fn sign_of(p: &BigInt, q: &BigInt, n: &BigInt) -> Ordering {
    let sp = p.sign_cmp();
    if q.is_zero() || n.is_zero() {
        return sp;
    }
    let sq = q.sign_cmp();
    if p.is_zero() || sp == sq {
        return sq;
    }
    match (p * p).cmp(&(q * q * n)) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Sign of `a + b*sqrt(m) + c*sqrt(n)` for integers `m, n >= 0`.
fn sign_of_two(a: &BigInt, b: &BigInt, m: &BigInt, c: &BigInt, n: &BigInt) -> Ordering {
    if m == n {
        return sign_of(a, &(b + c), m);
    }
    // sign of u = b*sqrt(m) + c*sqrt(n)
    let su = match (b.sign_cmp(), c.sign_cmp()) {
        (x, Ordering::Equal) => x,
        (Ordering::Equal, y) => y,
        (x, y) if x == y => x,
        (x, y) => match (b * b * m).cmp(&(c * c * n)) {
            Ordering::Greater => x,
            Ordering::Less => y,
            Ordering::Equal => Ordering::Equal,
        },
    };
    let sa = a.sign_cmp();
    if su == Ordering::Equal || su == sa {
        return if sa == Ordering::Equal { su } else { sa };
    }
    if sa == Ordering::Equal {
        return su;
    }
    // opposite signs: compare u^2 with a^2
    let rest = b * b * m + c * c * n - a * a;
    let cross = BigInt::from(2) * b * c;
    match sign_of(&rest, &cross, &(m * n)) {
        Ordering::Greater => su,
        Ordering::Less => sa,
        Ordering::Equal => Ordering::Equal,
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

impl ExactReal {
    pub fn zero() -> Self {
        ExactReal::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactReal::Rational(BigRational::one())
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        ExactReal::Rational(BigRational::from_integer(n.into()))
    }

    /// `num / den`, reduced.
    pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::InvalidNumber("zero denominator".into()));
        }
        Ok(ExactReal::Rational(BigRational::new(num.into(), den)))
    }

    /// `(p + q*sqrt(d)) / r` brought to canonical form. Square factors of `d`
    /// are pulled out, so `surd(2, 2, 4, 2)` is the rational `3`.
    pub fn surd(
        p: impl Into<BigInt>,
        q: impl Into<BigInt>,
        d: impl Into<BigInt>,
        r: impl Into<BigInt>,
    ) -> Result<Self> {
        let (p, q, d, r) = (p.into(), q.into(), d.into(), r.into());
        if r.is_zero() {
            return Err(Error::InvalidNumber("zero denominator".into()));
        }
        if d.is_negative() {
            return Err(Error::InvalidNumber(format!("sqrt({d}) is not real")));
        }
        if d.is_zero() || q.is_zero() {
            return Ok(ExactReal::Rational(BigRational::new(p, r)));
        }
        let (s, core) = square_split(&d);
        Ok(Self::from_quad(p, q * s, core, r))
    }

    /// `sqrt(n)` for a rational `n >= 0`.
    pub fn sqrt_of(n: &BigRational) -> Result<Self> {
        if n.is_negative() {
            return Err(Error::InvalidNumber(format!("sqrt({n}) is not real")));
        }
        // sqrt(a/b) = sqrt(a*b)/b
        Self::surd(0, 1, n.numer() * n.denom(), n.denom().clone())
    }

    /// Canonical form assuming `d` is 1 or squarefree.
    fn from_quad(p: BigInt, q: BigInt, d: BigInt, r: BigInt) -> Self {
        if q.is_zero() || d.is_one() {
            return ExactReal::Rational(BigRational::new(p + q, r));
        }
        let (mut p, mut q, mut r) = (p, q, r);
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        if !g.is_one() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        ExactReal::Surd(Surd { p, q, d, r })
    }

    fn quad(&self) -> Result<Quad> {
        match self {
            ExactReal::Rational(v) => Ok(Quad {
                p: v.numer().clone(),
                q: BigInt::zero(),
                d: BigInt::one(),
                r: v.denom().clone(),
            }),
            ExactReal::Surd(s) => Ok(Quad {
                p: s.p.clone(),
                q: s.q.clone(),
                d: s.d.clone(),
                r: s.r.clone(),
            }),
            ExactReal::Infinity => Err(Error::InfiniteOperand),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExactReal::Infinity)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExactReal::Rational(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExactReal::Rational(v) if v.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactReal::Rational(v) => Some(v),
            _ => None,
        }
    }

    /// The squarefree radicand of the field, `None` for rationals and infinity.
    pub fn field(&self) -> Option<&BigInt> {
        match self {
            ExactReal::Surd(s) => Some(&s.d),
            _ => None,
        }
    }

    /// -1, 0 or 1; infinity counts as positive.
    pub fn signum(&self) -> i32 {
        match self.cmp(&ExactReal::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let (a, b) = (self.quad()?, other.quad()?);
        let d = common_field(&a, &b)?;
        Ok(Self::from_quad(
            &a.p * &b.r + &b.p * &a.r,
            &a.q * &b.r + &b.q * &a.r,
            d,
            &a.r * &b.r,
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.try_neg()?)
    }

    pub fn try_neg(&self) -> Result<Self> {
        let a = self.quad()?;
        Ok(Self::from_quad(-a.p, -a.q, a.d, a.r))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = (self.quad()?, other.quad()?);
        let d = common_field(&a, &b)?;
        Ok(Self::from_quad(
            &a.p * &b.p + &a.q * &b.q * &d,
            &a.p * &b.q + &a.q * &b.p,
            d,
            &a.r * &b.r,
        ))
    }

    pub fn try_recip(&self) -> Result<Self> {
        let a = self.quad()?;
        if a.p.is_zero() && a.q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // r / (p + q sqrt d) = r (p - q sqrt d) / (p^2 - q^2 d)
        let norm = &a.p * &a.p - &a.q * &a.q * &a.d;
        Ok(Self::from_quad(&a.r * &a.p, -(&a.r * &a.q), a.d, norm))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.try_recip()?)
    }

    /// Galois conjugate; rationals are their own conjugate.
    pub fn conjugate(&self) -> Self {
        match self {
            ExactReal::Surd(s) => Self::from_quad(s.p.clone(), -&s.q, s.d.clone(), s.r.clone()),
            other => other.clone(),
        }
    }

    /// Greatest integer `<= self`.
    pub fn floor(&self) -> Result<BigInt> {
        match self {
            ExactReal::Rational(v) => Ok(v.floor().to_integer()),
            ExactReal::Infinity => Err(Error::InfiniteOperand),
            ExactReal::Surd(s) => {
                let root = (&s.q * &s.q * &s.d).sqrt();
                let low = if s.q.is_positive() {
                    &s.p + &root
                } else {
                    &s.p - &root - 1
                };
                let mut f = low.div_floor(&s.r);
                // the value lies within 1/r of low/r, so one correction suffices
                let next = &f + 1;
                if sign_of(&(&s.p - &next * &s.r), &s.q, &s.d) != Ordering::Less {
                    f = next;
                }
                Ok(f)
            }
        }
    }

    /// Discriminant of the primitive integer minimal polynomial of a surd.
    pub fn discriminant(&self) -> Result<BigInt> {
        let ExactReal::Surd(s) = self else {
            return Err(Error::InvalidNumber(format!("{self} is not a quadratic irrational")));
        };
        // r^2 x^2 - 2 p r x + (p^2 - q^2 d) = 0
        let a = &s.r * &s.r;
        let b = BigInt::from(-2) * &s.p * &s.r;
        let c = &s.p * &s.p - &s.q * &s.q * &s.d;
        let g = a.gcd(&b).gcd(&c);
        let (b, a, c) = (b / &g, a / &g, c / &g);
        Ok(&b * &b - BigInt::from(4) * a * c)
    }

    /// `x * 2^k` for finite `x`.
    pub(crate) fn scale_pow2(&self, k: u64) -> Result<Self> {
        let a = self.quad()?;
        let f = BigInt::one() << k;
        Ok(Self::from_quad(a.p * &f, a.q * f, a.d, a.r))
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(self)
    }
}

impl Ord for ExactReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExactReal::Infinity, ExactReal::Infinity) => Ordering::Equal,
            (ExactReal::Infinity, _) => Ordering::Greater,
            (_, ExactReal::Infinity) => Ordering::Less,
            (ExactReal::Rational(a), ExactReal::Rational(b)) => a.cmp(b),
            _ => {
                let a = self.quad().expect("finite");
                let b = other.quad().expect("finite");
                // sign of a - b, scaled by a.r * b.r > 0
                let konst = &a.p * &b.r - &b.p * &a.r;
                let first = &a.q * &b.r;
                let second = -(&b.q * &a.r);
                sign_of_two(&konst, &first, &a.d, &second, &b.d)
            }
        }
    }
}

impl PartialOrd for ExactReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for ExactReal {
    fn from(n: i64) -> Self {
        ExactReal::integer(n)
    }
}

impl From<BigInt> for ExactReal {
    fn from(n: BigInt) -> Self {
        ExactReal::integer(n)
    }
}

impl From<BigRational> for ExactReal {
    fn from(v: BigRational) -> Self {
        ExactReal::Rational(v)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&ExactReal> for &ExactReal {
            type Output = ExactReal;
            /// Panics on mixed fields, infinity or division by zero; use the
            /// `try_` methods where those can occur.
            fn $method(self, rhs: &ExactReal) -> ExactReal {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{}: {self} {} {rhs}", e, stringify!($method)),
                }
            }
        }
        impl $trait<ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: ExactReal) -> ExactReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: &ExactReal) -> ExactReal {
                (&self).$method(rhs)
            }
        }
        impl $trait<ExactReal> for &ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: ExactReal) -> ExactReal {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl Neg for &ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        match self {
            ExactReal::Infinity => ExactReal::Infinity,
            v => v.try_neg().expect("finite"),
        }
    }
}

impl Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        -&self
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactReal::Infinity => write!(f, "inf"),
            ExactReal::Rational(v) if v.denom().is_one() => write!(f, "{}", v.numer()),
            ExactReal::Rational(v) => write!(f, "{}/{}", v.numer(), v.denom()),
            ExactReal::Surd(s) => {
                let root = if s.q.is_one() {
                    format!("sqrt({})", s.d)
                } else if (-&s.q).is_one() {
                    format!("-sqrt({})", s.d)
                } else {
                    format!("{}*sqrt({})", s.q, s.d)
                };
                let body = if s.p.is_zero() {
                    root
                } else if s.q.is_positive() {
                    format!("{}+{}", s.p, root)
                } else {
                    format!("{}{}", s.p, root)
                };
                match (s.r.is_one(), s.p.is_zero()) {
                    (true, _) => write!(f, "{body}"),
                    (false, true) => write!(f, "{body}/{}", s.r),
                    (false, false) => write!(f, "({body})/{}", s.r),
                }
            }
        }
    }
}

impl FromStr for ExactReal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse::parse(s)
    }
}

impl serde::Serialize for ExactReal {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for ExactReal {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Converts a small integer result to `i64`, for digit counts and JSON.
pub(crate) fn small(n: &BigInt) -> Result<i64> {
    n.to_i64().ok_or_else(|| Error::Overflow(n.to_string()))
}
