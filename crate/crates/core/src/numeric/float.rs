use std::cell::RefCell;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::ExactReal;

pub const PRECISION_ENV: &str = "MODFLOW_PRECISION_BITS";

const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision in bits, from the environment or 128.
pub fn default_precision() -> usize {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&p: &usize| p >= 53)
        .unwrap_or(128)
}

/// `(floor(|x| * 2^k), k, exact)` with at least `bits` significant bits.
fn scaled_integer(x: &ExactReal, bits: u64) -> (BigInt, u64, bool) {
    let a = if x.signum() < 0 { -x } else { x.clone() };
    let mut k = bits;
    loop {
        let scaled = a.scale_pow2(k).expect("finite");
        let n = scaled.floor().expect("finite");
        let have = n.bits();
        if have >= bits {
            let exact = scaled == ExactReal::integer(n.clone());
            return (n, k, exact);
        }
        k += bits - have + 1;
    }
}

/// Correctly rounded (ties to even) binary64 value.
pub fn to_f64(x: &ExactReal) -> f64 {
    if x.is_infinite() {
        return f64::INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let (n, k, exact) = scaled_integer(x, 66);
    let shift = n.bits() - 53;
    let mut mant = (&n >> shift).to_u64().expect("53 bits");
    let rem = &n - (BigInt::from(mant) << shift);
    let half = BigInt::from(1u8) << (shift - 1);
    let up = match rem.cmp(&half) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Equal => !exact || mant % 2 == 1,
        std::cmp::Ordering::Less => false,
    };
    if up {
        mant += 1;
    }
    let e = shift as i64 - k as i64;
    let mut v = mant as f64;
    // split the scaling so intermediate powers stay finite
    let mut e = e;
    while e != 0 {
        let step = e.clamp(-1000, 1000);
        v *= 2f64.powi(step as i32);
        e -= step;
    }
    if x.signum() < 0 {
        -v
    } else {
        v
    }
}

/// Rounded to `precision` bits; infinity maps to positive infinity.
pub fn to_bigfloat(x: &ExactReal, precision: usize) -> BigFloat {
    if x.is_infinite() {
        return BigFloat::from_f64(f64::INFINITY, precision);
    }
    if x.is_zero() {
        return BigFloat::from_word(0, precision);
    }
    let (n, k, _) = scaled_integer(x, precision as u64 + 64);
    let width = (n.bits() as usize).div_ceil(64) * 64;
    let mut cc = Consts::new().expect("constants cache");
    let mut v = BigFloat::parse(&n.to_str_radix(16), Radix::Hex, width, RM, &mut cc);
    v.set_precision(precision, RM).expect("precision");
    let e = v.exponent().expect("finite");
    v.set_exponent(e - k as i32);
    if x.signum() < 0 {
        v.neg()
    } else {
        v
    }
}

/// Floating point arithmetic at a fixed precision.
pub struct HighPrecision {
    pub bits: usize,
    consts: RefCell<Consts>,
}

impl HighPrecision {
    pub fn new(bits: usize) -> Self {
        HighPrecision {
            bits,
            consts: RefCell::new(Consts::new().expect("constants cache")),
        }
    }

    pub fn exact(&self, x: &ExactReal) -> BigFloat {
        to_bigfloat(x, self.bits)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.bits, RM)
    }

    pub fn ln(&self, a: &BigFloat) -> BigFloat {
        a.ln(self.bits, RM, &mut self.consts.borrow_mut())
    }

    pub fn acosh(&self, a: &BigFloat) -> BigFloat {
        a.acosh(self.bits, RM, &mut self.consts.borrow_mut())
    }

    pub fn abs(&self, a: &BigFloat) -> BigFloat {
        if a.is_negative() {
            a.neg()
        } else {
            a.clone()
        }
    }

    /// `2^e` exactly.
    pub fn pow2(&self, e: i32) -> BigFloat {
        let mut v = BigFloat::from_word(1, self.bits);
        v.set_exponent(e + 1);
        v
    }
}

/// Nearest binary64 value of a multiprecision float.
pub fn bigfloat_to_f64(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    v.to_string().parse().unwrap_or(f64::NAN)
}

/// `|a - b| <= tol`, all nonnegative comparisons done in multiprecision.
pub fn within(a: &BigFloat, b: &BigFloat, tol: &BigFloat) -> bool {
    let diff = a.sub(b, a.precision().unwrap_or(128).max(128) + 64, RM);
    let diff = if diff.is_negative() { diff.neg() } else { diff };
    matches!(diff.cmp(tol), Some(c) if c <= 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    #[test]
    fn double_examples() {
        assert_eq!(to_f64(&r("sqrt(2)")), std::f64::consts::SQRT_2);
        assert_eq!(to_f64(&r("4/3")), 1.3333333333333333);
        // nearest double; naive 1.0 - 1.4142135623730951 gives ...515
        assert_eq!(to_f64(&r("1-sqrt(2)")), -0.41421356237309503);
        assert_eq!(to_f64(&r("1/3")), 1.0 / 3.0);
        assert_eq!(to_f64(&r("-7/2")), -3.5);
        assert_eq!(to_f64(&r("sqrt(2)/1000000000000000000000000")), 1.414213562373095e-24);
    }

    #[test]
    fn multiprecision_sqrt() {
        let hp = HighPrecision::new(128);
        let a = hp.exact(&r("sqrt(2)"));
        let b = hp.sqrt(&hp.exact(&r("2")));
        assert!(within(&a, &b, &hp.pow2(-126)));
        let c = hp.exact(&r("(1-sqrt(5))/2"));
        assert!(c.is_negative());
    }
}
