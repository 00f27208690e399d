//! The Farey map on `[-1, ∞)` and expansions with digits `(-1/2)`, `(+1/1)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::cf_core::{Alphabet, DigitSequence, RcfDigit, Sign};
use crate::dual_mobius::{farey_system, transfer_sides};
use crate::error::{Error, Result};
use crate::lehner::SignedTail;
use crate::numeric::{ExactReal, UnimodularMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FareyDigit {
    /// `f/b = -1/2`
    Dm12,
    /// `f/b = +1/1`
    Dp11,
}

impl FareyDigit {
    pub fn numerator(self) -> Sign {
        match self {
            FareyDigit::Dm12 => Sign::Minus,
            FareyDigit::Dp11 => Sign::Plus,
        }
    }

    pub fn denominator(self) -> i64 {
        match self {
            FareyDigit::Dm12 => 2,
            FareyDigit::Dp11 => 1,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            FareyDigit::Dm12 => "2-",
            FareyDigit::Dp11 => "1+",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "2-" => Some(FareyDigit::Dm12),
            "1+" => Some(FareyDigit::Dp11),
            _ => None,
        }
    }
}

impl Alphabet for FareyDigit {
    const NAME: &'static str = "farey";

    fn branch(&self) -> UnimodularMap {
        // x = f / (b + t)
        UnimodularMap::new(0, self.numerator().value(), 1, self.denominator()).expect("det -f")
    }

    fn tail_range() -> (ExactReal, ExactReal) {
        (ExactReal::from(-1), ExactReal::Infinity)
    }

    fn terminal() -> ExactReal {
        ExactReal::zero()
    }

    fn to_json(&self) -> Value {
        Value::from(self.token())
    }

    fn from_json(v: &Value) -> Option<Self> {
        v.as_str().and_then(Self::from_token)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FareyStep {
    Digit(FareyDigit, ExactReal),
    Terminated,
}

pub fn farey_step(x: &ExactReal) -> Result<FareyStep> {
    if x < &ExactReal::from(-1) || x.is_infinite() {
        return Err(Error::OutOfDomain(x.to_string()));
    }
    if x.is_zero() {
        return Ok(FareyStep::Terminated);
    }
    let inv = x.try_recip()?;
    if x.signum() < 0 {
        Ok(FareyStep::Digit(FareyDigit::Dm12, (-inv).try_sub(&ExactReal::from(2))?))
    } else {
        Ok(FareyStep::Digit(FareyDigit::Dp11, inv.try_sub(&ExactReal::one())?))
    }
}

pub fn farey_expand(x: &ExactReal, max_digits: usize) -> Result<DigitSequence<FareyDigit>> {
    let mut digits = Vec::new();
    let mut seen = HashMap::new();
    let mut state = x.clone();
    loop {
        if let Some(&start) = seen.get(&state) {
            let period = digits.split_off(start);
            return Ok(DigitSequence::new(digits, period));
        }
        if digits.len() >= max_digits {
            return Err(Error::BudgetExceeded(max_digits));
        }
        seen.insert(state.clone(), digits.len());
        match farey_step(&state)? {
            FareyStep::Terminated => return Ok(DigitSequence::finite(digits)),
            FareyStep::Digit(d, next) => {
                digits.push(d);
                state = next;
            }
        }
    }
}

/// `(+1/1)(-1/2)^{n-1}`.
fn farey_block(n: u64) -> impl Iterator<Item = FareyDigit> {
    std::iter::once(FareyDigit::Dp11).chain(std::iter::repeat_n(FareyDigit::Dm12, n as usize - 1))
}

/// RCF digits with the first `k` moved out of the period if needed.
fn unroll(rcf: &DigitSequence<RcfDigit>, k: usize) -> (Vec<u64>, Vec<u64>) {
    let mut pre: Vec<u64> = rcf.preperiod().iter().map(|d| d.get()).collect();
    let mut per: Vec<u64> = rcf.period().iter().map(|d| d.get()).collect();
    while pre.len() < k && !per.is_empty() {
        pre.push(per[0]);
        per.rotate_left(1);
    }
    (pre, per)
}

/// The Farey expansion of `sign * (head + 1/[n1; n2, ...])` read off the RCF
/// digits block by block.
pub fn farey_from_rcf(sign: Sign, head: &BigInt, rcf: &DigitSequence<RcfDigit>) -> Result<DigitSequence<FareyDigit>> {
    use FareyDigit::{Dm12, Dp11};
    let blocks = |ds: &[u64]| ds.iter().flat_map(|&n| farey_block(n)).collect::<Vec<_>>();
    let empty = rcf.is_finite() && rcf.preperiod().is_empty();
    let (mut pre, per) = match sign {
        Sign::Plus => {
            if head.is_negative() {
                return Err(Error::OutOfDomain(format!("{head} with sign +")));
            }
            let n0 = head
                .to_usize()
                .ok_or_else(|| Error::Overflow(format!("head {head}")))?;
            let (p, q) = unroll(rcf, 0);
            let mut pre = vec![Dp11];
            pre.extend(std::iter::repeat_n(Dm12, n0));
            pre.extend(blocks(&p));
            (pre, blocks(&q))
        }
        Sign::Minus => {
            if !head.is_zero() || empty {
                return Err(Error::OutOfDomain(format!("-({head} + ...) is not in (-1, 0)")));
            }
            let (p, q) = unroll(rcf, 2);
            match (p.first(), p.get(1)) {
                (Some(&1), None) => return Err(Error::OutOfDomain("-1".into())),
                (Some(&1), Some(&n2)) => {
                    let mut pre: Vec<_> = std::iter::repeat_n(Dm12, n2 as usize + 1).collect();
                    pre.extend(blocks(&p[2..]));
                    (pre, blocks(&q))
                }
                (Some(&n1), _) => {
                    let mut pre = vec![Dm12, Dp11];
                    pre.extend(std::iter::repeat_n(Dm12, n1 as usize - 2));
                    pre.extend(blocks(&p[1..]));
                    (pre, blocks(&q))
                }
                (None, _) => unreachable!("nonempty digits"),
            }
        }
    };
    if per.is_empty() {
        // the closed form ends with the digit that would map 0 to itself
        pre.pop();
        return Ok(DigitSequence::finite(pre));
    }
    Ok(DigitSequence::new(pre, per))
}

/// The sign `(-f1)...(-fm)` and the value `F^m(x)`, for `m >= 1`.
pub fn farey_tail(x: &ExactReal, m: usize) -> Result<SignedTail> {
    if m == 0 {
        return Err(Error::PositionOutOfRange(0));
    }
    let mut sign = Sign::Plus;
    let mut state = x.clone();
    for _ in 0..m {
        match farey_step(&state)? {
            FareyStep::Terminated => return Err(Error::TailPastTermination(m)),
            FareyStep::Digit(d, next) => {
                sign = sign * -d.numerator();
                state = next;
            }
        }
    }
    Ok(SignedTail {
        sign,
        value: state,
        index: m,
    })
}

/// Transfer identity for the density `1/((t+1)(t+2))` at `x > -1`.
pub fn transfer_check(x: &ExactReal) -> Result<bool> {
    if x <= &ExactReal::from(-1) || x.is_infinite() {
        return Err(Error::OutOfDomain(x.to_string()));
    }
    let density = |t: &ExactReal| {
        t.try_add(&ExactReal::one())?
            .try_mul(&t.try_add(&ExactReal::from(2))?)?
            .try_recip()
    };
    let (lhs, rhs) = transfer_sides(&farey_system(), density, x)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf_core::rcf_expand;
    use FareyDigit::{Dm12, Dp11};

    fn r(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    fn via_rcf(x: &str) -> DigitSequence<FareyDigit> {
        let x = r(x);
        let (sign, a) = if x.signum() < 0 { (Sign::Minus, -&x) } else { (Sign::Plus, x) };
        let e = rcf_expand(&a, 200).unwrap();
        farey_from_rcf(sign, &e.head, &e.digits).unwrap()
    }

    #[test]
    fn step_examples() {
        assert_eq!(farey_step(&r("-1/2")).unwrap(), FareyStep::Digit(Dm12, r("0")));
        assert_eq!(farey_step(&r("sqrt(2)")).unwrap(), FareyStep::Digit(Dp11, r("(sqrt(2)-2)/2")));
        assert_eq!(farey_step(&r("1")).unwrap(), FareyStep::Digit(Dp11, r("0")));
        assert_eq!(farey_step(&r("0")).unwrap(), FareyStep::Terminated);
        assert!(farey_step(&r("-2")).is_err());
    }

    #[test]
    fn expand_examples() {
        let e = farey_expand(&r("-2/3"), 50).unwrap();
        assert_eq!(e, DigitSequence::finite(vec![Dm12, Dm12]));
        assert_eq!(e.value().unwrap(), r("-2/3"));
        let e = farey_expand(&r("3/2"), 50).unwrap();
        assert_eq!(e, DigitSequence::finite(vec![Dp11, Dm12, Dp11]));
        assert_eq!(e.value().unwrap(), r("3/2"));
        assert_eq!(farey_expand(&r("sqrt(2)"), 50).unwrap().period(), &[Dp11, Dm12]);
        let e = farey_expand(&r("-1"), 50).unwrap();
        assert_eq!(e.period(), &[Dm12]);
        assert_eq!(e.value().unwrap(), r("-1"));
    }

    #[test]
    fn from_rcf_examples() {
        assert_eq!(via_rcf("sqrt(2)"), DigitSequence::new(vec![], vec![Dp11, Dm12]));
        let e = via_rcf("-sqrt(2)/2");
        assert_eq!(e.prefix(5), vec![Dm12, Dm12, Dm12, Dp11, Dm12]);
        assert_eq!(e, farey_expand(&r("-sqrt(2)/2"), 50).unwrap());
        let e = via_rcf("-1/3");
        assert_eq!(e, DigitSequence::finite(vec![Dm12, Dp11]));
        assert_eq!(e.value().unwrap(), r("-1/3"));
        assert_eq!(via_rcf("0"), DigitSequence::finite(vec![]));
        for x in ["1", "1/3", "3/2", "-2/3", "7/5", "22/7", "-5/7", "(1+sqrt(5))/2"] {
            assert_eq!(via_rcf(x), farey_expand(&r(x), 100).unwrap(), "{x}");
        }
        let e = rcf_expand(&r("1"), 10).unwrap();
        assert!(farey_from_rcf(Sign::Minus, &BigInt::zero(), &DigitSequence::finite(vec![RcfDigit::new(1).unwrap()])).is_err());
        assert!(farey_from_rcf(Sign::Minus, &e.head, &e.digits).is_err());
    }

    #[test]
    fn tail_examples() {
        let t = farey_tail(&r("sqrt(2)"), 1).unwrap();
        assert_eq!((t.sign, t.value), (Sign::Minus, r("(sqrt(2)-2)/2")));
        // (-f1)(-f2) = (-1)(+1)
        let t = farey_tail(&r("sqrt(2)"), 2).unwrap();
        assert_eq!((t.sign, t.value), (Sign::Minus, r("sqrt(2)")));
        let t = farey_tail(&r("-1/2"), 1).unwrap();
        assert_eq!(t.value, r("0"));
        assert_eq!(farey_tail(&r("-1/2"), 2), Err(Error::TailPastTermination(2)));
    }

    #[test]
    fn transfer_examples() {
        for x in ["0", "1", "-1/2", "sqrt(2)"] {
            assert!(transfer_check(&r(x)).unwrap(), "{x}");
        }
        assert!(transfer_check(&r("-1")).is_err());
    }
}
