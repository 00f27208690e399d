//! The natural extension of the Lehner map on `[1, 2) x [-1, ∞)` and its
//! sign-tracking layer.

use crate::cf_core::{DigitSequence, Sign};
use crate::error::{Error, Result};
use crate::farey_cf::{farey_expand, FareyDigit};
use crate::lehner::{lehner_expand, lehner_step, LehnerDigit};
use crate::numeric::ExactReal;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OmegaPoint {
    pub x: ExactReal,
    pub y: ExactReal,
    pub eps: Sign,
}

impl OmegaPoint {
    pub fn new(x: ExactReal, y: ExactReal) -> Self {
        OmegaPoint { x, y, eps: Sign::Plus }
    }

    pub fn with_sign(x: ExactReal, y: ExactReal, eps: Sign) -> Self {
        OmegaPoint { x, y, eps }
    }
}

fn check_y(y: &ExactReal) -> Result<()> {
    if y < &ExactReal::from(-1) || y.is_infinite() {
        return Err(Error::OutOfDomain(format!("y = {y}")));
    }
    Ok(())
}

/// `(-1/(x-2), -1/(y+2))` on `[1, 3/2)` and `(1/(x-1), 1/(y+1))` on
/// `[3/2, 2)`, multiplying `eps` by `-e0`.
pub fn natext_step(p: &OmegaPoint) -> Result<OmegaPoint> {
    check_y(&p.y)?;
    let (d, x) = lehner_step(&p.x)?;
    let den = p.y.try_add(&ExactReal::from(d.quotient()))?;
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(OmegaPoint {
        x,
        y: d.sign().apply(&den.try_recip()?),
        eps: p.eps * -d.sign(),
    })
}

/// Inverse of [`natext_step`]; the sign of `y` tells which branch was used.
pub fn natext_inverse(p: &OmegaPoint) -> Result<OmegaPoint> {
    let one = ExactReal::one();
    let two = ExactReal::from(2);
    if p.x < one || p.x > two || p.y.is_infinite() {
        return Err(Error::NotInImage);
    }
    let (d, x, y) = match p.y.signum() {
        0 => return Err(Error::NotInImage),
        s if s < 0 => {
            if p.y < ExactReal::from(-1) {
                return Err(Error::NotInImage);
            }
            let x = two.try_sub(&p.x.try_recip()?)?;
            let y = p.y.try_recip()?.try_neg()?.try_sub(&two)?;
            (LehnerDigit::D21, x, y)
        }
        _ => {
            if p.x == one {
                return Err(Error::NotInImage);
            }
            let x = one.try_add(&p.x.try_recip()?)?;
            let y = p.y.try_recip()?.try_sub(&one)?;
            (LehnerDigit::D11, x, y)
        }
    };
    match lehner_step(&x) {
        Ok((back, _)) if back == d => {}
        _ => return Err(Error::NotInImage),
    }
    Ok(OmegaPoint {
        x,
        y,
        eps: p.eps * -d.sign(),
    })
}

fn lehner_word(x: &ExactReal, max_digits: usize) -> Result<DigitSequence<LehnerDigit>> {
    if x == &ExactReal::from(2) {
        return Ok(DigitSequence::finite(vec![LehnerDigit::D11]));
    }
    lehner_expand(x, max_digits)
}

/// One step of the extension shifts the Lehner word of `x` left and pushes
/// the digit `e0/a0` onto the Farey word of `y`; checks `depth` digits.
pub fn shift_property_check(x: &ExactReal, y: &ExactReal, depth: usize) -> Result<bool> {
    let budget = 10_000;
    let (lx, fy) = (lehner_expand(x, budget)?, farey_expand(y, budget)?);
    let next = natext_step(&OmegaPoint::new(x.clone(), y.clone()))?;
    let (lx1, fy1) = (lehner_word(&next.x, budget)?, farey_expand(&next.y, budget)?);
    let (applied, _) = lehner_step(x)?;
    let pushed = match applied {
        LehnerDigit::D21 => FareyDigit::Dm12,
        LehnerDigit::D11 => FareyDigit::Dp11,
    };
    let mut expected_y = vec![pushed];
    expected_y.extend(fy.prefix(depth.saturating_sub(1)));
    Ok(lx1.prefix(depth) == lx.shifted(1).prefix(depth) && fy1.prefix(depth) == expected_y)
}

fn density(x: &ExactReal, y: &ExactReal) -> Result<ExactReal> {
    let s = x.try_add(y)?;
    if s.is_zero() {
        return Err(Error::DegenerateDenominator);
    }
    s.try_mul(&s)?.try_recip()
}

/// Checks `h(L(x,y)) |Jac| = h(x,y)` exactly for `h = 1/(x+y)^2`.
pub fn jacobian_invariance_check(p: &OmegaPoint) -> Result<bool> {
    let before = density(&p.x, &p.y)?;
    let (d, _) = lehner_step(&p.x)?;
    let next = natext_step(p)?;
    let a = ExactReal::from(d.quotient());
    let (u, v) = (p.x.try_sub(&a)?, p.y.try_add(&a)?);
    let jac = u.try_mul(&u)?.try_mul(&v.try_mul(&v)?)?.try_recip()?;
    Ok(density(&next.x, &next.y)?.try_mul(&jac)? == before)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    fn pt(x: &str, y: &str) -> OmegaPoint {
        OmegaPoint::new(r(x), r(y))
    }

    #[test]
    fn step_examples() {
        let q = natext_step(&pt("sqrt(2)", "sqrt(2)")).unwrap();
        assert_eq!(q, OmegaPoint::with_sign(r("1+sqrt(2)/2"), r("-(2-sqrt(2))/2"), Sign::Plus));
        let q = natext_step(&pt("8/5", "0")).unwrap();
        assert_eq!(q, OmegaPoint::with_sign(r("5/3"), r("1"), Sign::Minus));
        assert_eq!(natext_step(&pt("3/2", "-1")), Err(Error::DivisionByZero));
    }

    #[test]
    fn inverse_examples() {
        let p = pt("sqrt(2)", "sqrt(2)");
        assert_eq!(natext_inverse(&natext_step(&p).unwrap()).unwrap(), p);
        let back = natext_inverse(&OmegaPoint::with_sign(r("5/3"), r("1"), Sign::Minus)).unwrap();
        assert_eq!(back, pt("8/5", "0"));
        assert_eq!(natext_inverse(&pt("1+sqrt(2)/2", "-(2-sqrt(2))/2")).unwrap(), p);
        assert_eq!(natext_inverse(&pt("3/2", "0")), Err(Error::NotInImage));
    }

    #[test]
    fn shift_examples() {
        assert!(shift_property_check(&r("sqrt(2)"), &r("sqrt(2)"), 6).unwrap());
        assert!(shift_property_check(&r("(1+sqrt(5))/2"), &r("0"), 6).unwrap());
        assert!(shift_property_check(&r("4/3"), &r("-2/3"), 2).unwrap());
        assert!(shift_property_check(&r("3/2"), &r("1/3"), 4).unwrap());
    }

    #[test]
    fn jacobian_examples() {
        for (x, y) in [("3/2", "0"), ("5/4", "1"), ("sqrt(2)", "sqrt(2)")] {
            assert!(jacobian_invariance_check(&pt(x, y)).unwrap(), "{x} {y}");
        }
        assert_eq!(density(&r("3/2"), &r("0")).unwrap(), r("4/9"));
        assert_eq!(jacobian_invariance_check(&pt("1", "-1")), Err(Error::DegenerateDenominator));
    }
}
