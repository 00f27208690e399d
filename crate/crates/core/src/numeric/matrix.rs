use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::ExactReal;
use crate::error::{Error, Result};

/// A raw integer 2x2 matrix `[[a, b], [c, d]]`, possibly singular.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl IntMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMatrix {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn transpose(&self) -> Self {
        IntMatrix {
            a: self.a.clone(),
            b: self.c.clone(),
            c: self.b.clone(),
            d: self.d.clone(),
        }
    }
}

/// A nonsingular integer matrix acting as a Möbius map, stored up to scalar
/// multiples: entries are coprime and the first nonzero entry is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnimodularMap(IntMatrix);

impl UnimodularMap {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::try_from(IntMatrix::new(a, b, c, d))
    }

    pub fn identity() -> Self {
        UnimodularMap(IntMatrix::new(1, 0, 0, 1))
    }

    /// `z -> z + 1`.
    pub fn translation() -> Self {
        UnimodularMap(IntMatrix::new(1, 1, 0, 1))
    }

    /// `z -> -1/z`.
    pub fn inversion() -> Self {
        UnimodularMap(IntMatrix::new(0, 1, -1, 0).canonical())
    }

    /// `z -> z + k`.
    pub fn shift(k: &BigInt) -> Self {
        UnimodularMap(IntMatrix {
            a: BigInt::one(),
            b: k.clone(),
            c: BigInt::zero(),
            d: BigInt::one(),
        })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn det(&self) -> BigInt {
        self.0.det()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let (m, n) = (&self.0, &other.0);
        UnimodularMap(
            IntMatrix {
                a: &m.a * &n.a + &m.b * &n.c,
                b: &m.a * &n.b + &m.b * &n.d,
                c: &m.c * &n.a + &m.d * &n.c,
                d: &m.c * &n.b + &m.d * &n.d,
            }
            .canonical(),
        )
    }

    /// The inverse map (the adjugate matrix).
    pub fn inverse(&self) -> Self {
        let m = &self.0;
        UnimodularMap(
            IntMatrix {
                a: m.d.clone(),
                b: -&m.b,
                c: -&m.c,
                d: m.a.clone(),
            }
            .canonical(),
        )
    }

    pub fn transpose(&self) -> Self {
        UnimodularMap(self.0.transpose().canonical())
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| acc.compose(self))
    }

    /// `(a x + b) / (c x + d)` with `∞ -> a/c` and a vanishing denominator
    /// sent to `∞`.
    pub fn apply(&self, x: &ExactReal) -> ExactReal {
        let m = &self.0;
        let int = |n: &BigInt| ExactReal::integer(n.clone());
        if x.is_infinite() {
            return if m.c.is_zero() {
                ExactReal::Infinity
            } else {
                ExactReal::ratio(m.a.clone(), m.c.clone()).expect("c != 0")
            };
        }
        let num = int(&m.a).try_mul(x).and_then(|v| v.try_add(&int(&m.b)));
        let den = int(&m.c).try_mul(x).and_then(|v| v.try_add(&int(&m.d)));
        let (num, den) = (num.expect("finite"), den.expect("finite"));
        if den.is_zero() {
            ExactReal::Infinity
        } else {
            num.try_div(&den).expect("nonzero denominator")
        }
    }

    /// The pole `-d/c`, or `∞` when `c = 0`.
    pub fn pole(&self) -> ExactReal {
        self.inverse().apply(&ExactReal::Infinity)
    }

    /// `|det| / (c y + d)^2`, the absolute derivative at a finite `y`.
    pub fn abs_derivative(&self, y: &ExactReal) -> Result<ExactReal> {
        let m = &self.0;
        let den = ExactReal::integer(m.c.clone())
            .try_mul(y)?
            .try_add(&ExactReal::integer(m.d.clone()))?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        ExactReal::integer(m.det().abs()).try_div(&den.try_mul(&den)?)
    }
}

impl IntMatrix {
    fn canonical(self) -> Self {
        let g = self.a.gcd(&self.b).gcd(&self.c).gcd(&self.d);
        let first = [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .find(|e| !e.is_zero())
            .cloned()
            .unwrap_or_else(BigInt::one);
        let g = if first.is_negative() { -g } else { g };
        IntMatrix {
            a: self.a / &g,
            b: self.b / &g,
            c: self.c / &g,
            d: self.d / &g,
        }
    }
}

impl TryFrom<IntMatrix> for UnimodularMap {
    type Error = Error;
    fn try_from(m: IntMatrix) -> Result<Self> {
        if m.det().is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(UnimodularMap(m.canonical()))
    }
}

impl fmt::Display for UnimodularMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "[[{}, {}], [{}, {}]]", m.a, m.b, m.c, m.d)
    }
}

impl Serialize for UnimodularMap {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let m = &self.0;
        let rows = [
            [m.a.to_string(), m.b.to_string()],
            [m.c.to_string(), m.d.to_string()],
        ];
        rows.serialize(ser)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    #[test]
    fn apply_examples() {
        let t = UnimodularMap::translation();
        assert_eq!(t.apply(&r("sqrt(2)")), r("1+sqrt(2)"));
        let s = UnimodularMap::new(2, -3, 1, -1).unwrap();
        assert_eq!(s.apply(&ExactReal::Infinity), r("2"));
        let m = t.inverse().pow(2).compose(&s).compose(&t);
        assert_eq!(m.apply(&r("1")), r("-1"));
        assert_eq!(m, UnimodularMap::inversion());
        assert_eq!(s.apply(&r("1")), ExactReal::Infinity);
    }

    #[test]
    fn projective_equality() {
        let a = UnimodularMap::new(-2, 1, -1, 0).unwrap();
        let b = UnimodularMap::new(2, -1, 1, 0).unwrap();
        assert_eq!(a, b);
        assert!(UnimodularMap::new(1, 2, 2, 4).is_err());
    }
}
