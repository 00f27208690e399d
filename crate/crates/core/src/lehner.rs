//! The Lehner map on `[1, 2)` and expansions with digits `(2,-1)`, `(1,+1)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use serde_json::Value;

use crate::cf_core::{Alphabet, DigitSequence, RcfDigit, Sign};
use crate::dual_mobius::{lehner_system, transfer_sides};
use crate::error::{Error, Result};
use crate::farey_cf::FareyDigit;
use crate::numeric::{ExactReal, UnimodularMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LehnerDigit {
    /// `(a, e) = (2, -1)`
    D21,
    /// `(a, e) = (1, +1)`
    D11,
}

impl LehnerDigit {
    pub fn quotient(self) -> i64 {
        match self {
            LehnerDigit::D21 => 2,
            LehnerDigit::D11 => 1,
        }
    }

    pub fn sign(self) -> Sign {
        match self {
            LehnerDigit::D21 => Sign::Minus,
            LehnerDigit::D11 => Sign::Plus,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            LehnerDigit::D21 => "2-",
            LehnerDigit::D11 => "1+",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "2-" => Some(LehnerDigit::D21),
            "1+" => Some(LehnerDigit::D11),
            _ => None,
        }
    }
}

impl Alphabet for LehnerDigit {
    const NAME: &'static str = "lehner";

    fn branch(&self) -> UnimodularMap {
        UnimodularMap::new(self.quotient(), self.sign().value(), 1, 0).expect("det -e")
    }

    fn tail_range() -> (ExactReal, ExactReal) {
        (ExactReal::one(), ExactReal::from(2))
    }

    fn terminal() -> ExactReal {
        ExactReal::one()
    }

    fn to_json(&self) -> Value {
        Value::from(self.token())
    }

    fn from_json(v: &Value) -> Option<Self> {
        v.as_str().and_then(Self::from_token)
    }
}

/// A tail value together with the accumulated sign in front of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedTail {
    pub sign: Sign,
    pub value: ExactReal,
    pub index: usize,
}

fn in_domain(x: &ExactReal) -> bool {
    x >= &ExactReal::one() && x < &ExactReal::from(2)
}

pub fn lehner_step(x: &ExactReal) -> Result<(LehnerDigit, ExactReal)> {
    if !in_domain(x) {
        return Err(Error::OutOfDomain(x.to_string()));
    }
    let two = ExactReal::from(2);
    if x < &ExactReal::ratio(3, 2)? {
        Ok((LehnerDigit::D21, two.try_sub(x)?.try_recip()?))
    } else {
        Ok((LehnerDigit::D11, x.try_sub(&ExactReal::one())?.try_recip()?))
    }
}

/// Replaces a final `(1,+1)` leading to 2 by `(2,-1)(1,+1)`, so that the
/// word evaluates to `x` with tail 1.
pub(crate) fn close_at_two(digits: &mut Vec<LehnerDigit>) {
    digits.pop();
    digits.extend([LehnerDigit::D21, LehnerDigit::D11]);
}

pub fn lehner_expand(x: &ExactReal, max_digits: usize) -> Result<DigitSequence<LehnerDigit>> {
    if !in_domain(x) {
        return Err(Error::OutOfDomain(x.to_string()));
    }
    let two = ExactReal::from(2);
    let mut digits = Vec::new();
    let mut seen = HashMap::new();
    let mut state = x.clone();
    loop {
        if state == two {
            close_at_two(&mut digits);
            return Ok(DigitSequence::finite(digits));
        }
        if let Some(&start) = seen.get(&state) {
            let period = digits.split_off(start);
            return Ok(DigitSequence::new(digits, period));
        }
        if digits.len() >= max_digits {
            return Err(Error::BudgetExceeded(max_digits));
        }
        seen.insert(state.clone(), digits.len());
        let (d, next) = lehner_step(&state)?;
        digits.push(d);
        state = next;
    }
}

fn lehner_block(n: RcfDigit) -> impl Iterator<Item = LehnerDigit> {
    std::iter::repeat_n(LehnerDigit::D21, n.get() as usize - 1)
        .chain(std::iter::once(LehnerDigit::D11))
}

/// `[1; n1, n2, ...]` to `(2,-1)^{n1-1} (1,+1) (2,-1)^{n2-1} (1,+1) ...`.
pub fn lehner_from_rcf(head: &BigInt, rcf: &DigitSequence<RcfDigit>) -> Result<DigitSequence<LehnerDigit>> {
    if head != &BigInt::from(1) {
        return Err(Error::UnsupportedHead(head.to_string()));
    }
    if rcf.is_finite() && rcf.preperiod().is_empty() {
        return Ok(DigitSequence::new(Vec::new(), vec![LehnerDigit::D21]));
    }
    let expand = |ds: &[RcfDigit]| ds.iter().flat_map(|&n| lehner_block(n)).collect::<Vec<_>>();
    Ok(DigitSequence::new(expand(rcf.preperiod()), expand(rcf.period())))
}

/// The sign `(-e0)...(-em)` and the value `L^{m+1}(x)`.
pub fn lehner_tail(x: &ExactReal, m: usize) -> Result<SignedTail> {
    if !in_domain(x) {
        return Err(Error::OutOfDomain(x.to_string()));
    }
    let mut sign = Sign::Plus;
    let mut state = x.clone();
    for _ in 0..=m {
        if !in_domain(&state) {
            return Err(Error::TailPastTermination(m));
        }
        let (d, next) = lehner_step(&state)?;
        sign = sign * -d.sign();
        state = next;
    }
    if !in_domain(&state) {
        return Err(Error::TailPastTermination(m));
    }
    Ok(SignedTail {
        sign,
        value: state,
        index: m,
    })
}

/// Whether `x` lies in `(1, 2)` with conjugate below 1, the condition for a
/// purely periodic expansion.
pub fn pure_periodicity_criterion(x: &ExactReal) -> Result<bool> {
    if x.is_rational() || x.is_infinite() {
        return Err(Error::NotQuadratic(x.to_string()));
    }
    Ok(x > &ExactReal::one() && x < &ExactReal::from(2) && x.conjugate() < ExactReal::one())
}

/// Reverses a Lehner period and reads each `(a, e)` as the Farey digit `e/a`.
pub fn dual_of_period(period: &[LehnerDigit]) -> Vec<FareyDigit> {
    period
        .iter()
        .rev()
        .map(|d| match d {
            LehnerDigit::D21 => FareyDigit::Dm12,
            LehnerDigit::D11 => FareyDigit::Dp11,
        })
        .collect()
}

/// Orbit states `L^k(x)` with the maps `P_k` satisfying `x = P_k(s_k L^k(x))`
/// in PSL(2,Z), `s_k` being the accumulated sign.
fn signed_orbit(x: &ExactReal, steps: usize) -> Result<Vec<(ExactReal, Sign, UnimodularMap)>> {
    let flip = UnimodularMap::new(-1, 0, 0, 1)?;
    let mut out = Vec::with_capacity(steps + 1);
    let (mut state, mut sign, mut m) = (x.clone(), Sign::Plus, UnimodularMap::identity());
    for _ in 0..=steps {
        let p = match sign {
            Sign::Plus => m.clone(),
            Sign::Minus => m.compose(&flip),
        };
        out.push((state.clone(), sign, p));
        let (d, next) = lehner_step(&state)?;
        m = m.compose(&d.branch());
        sign = sign * -d.sign();
        state = next;
    }
    Ok(out)
}

/// Decides PSL(2,Z)-equivalence of two quadratic surds in `(1, 2)` by
/// matching signed tails; returns a map sending `x` to `y` when equivalent.
pub fn psl2z_equivalent(x: &ExactReal, y: &ExactReal, max_digits: usize) -> Result<Option<UnimodularMap>> {
    for v in [x, y] {
        if v.is_rational() || v.is_infinite() {
            return Err(Error::NotQuadratic(v.to_string()));
        }
        if !(v > &ExactReal::one() && v < &ExactReal::from(2)) {
            return Err(Error::OutOfDomain(v.to_string()));
        }
    }
    if x.discriminant()? != y.discriminant()? {
        return Ok(None);
    }
    let (ex, ey) = (lehner_expand(x, max_digits)?, lehner_expand(y, max_digits)?);
    let span = |e: &DigitSequence<LehnerDigit>| e.preperiod().len() + 2 * e.period().len();
    let (ox, oy) = (signed_orbit(x, span(&ex))?, signed_orbit(y, span(&ey))?);
    for (sx, gx, px) in &ox[ex.preperiod().len()..] {
        for (sy, gy, py) in &oy[ey.preperiod().len()..] {
            if sx == sy && gx == gy {
                let witness = py.compose(&px.inverse());
                debug_assert_eq!(&witness.apply(x), y);
                return Ok(Some(witness));
            }
        }
    }
    Ok(None)
}

/// Transfer identity for the density `1/(t-1)` at `x` in `(1, 2)`.
pub fn transfer_check(x: &ExactReal) -> Result<bool> {
    if !(x > &ExactReal::one() && x < &ExactReal::from(2)) {
        return Err(Error::OutOfDomain(x.to_string()));
    }
    let density = |t: &ExactReal| t.try_sub(&ExactReal::one())?.try_recip();
    let (lhs, rhs) = transfer_sides(&lehner_system(), density, x)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf_core::rcf_expand;
    use LehnerDigit::{D11, D21};

    fn r(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    #[test]
    fn step_examples() {
        assert_eq!(lehner_step(&r("1")).unwrap(), (D21, r("1")));
        assert_eq!(lehner_step(&r("sqrt(2)")).unwrap(), (D21, r("1+sqrt(2)/2")));
        assert_eq!(lehner_step(&r("3/2")).unwrap(), (D11, r("2")));
        assert!(lehner_step(&r("2")).is_err());
    }

    #[test]
    fn expand_examples() {
        assert_eq!(lehner_expand(&r("(1+sqrt(5))/2"), 50).unwrap().period(), &[D11]);
        assert_eq!(lehner_expand(&r("sqrt(2)"), 50).unwrap().period(), &[D21, D11]);
        let e = lehner_expand(&r("4/3"), 50).unwrap();
        assert_eq!(e, DigitSequence::finite(vec![D21, D21, D11]));
        assert_eq!(e.value().unwrap(), r("4/3"));
        assert_eq!(lehner_expand(&r("1"), 50).unwrap().period(), &[D21]);
    }

    #[test]
    fn from_rcf_examples() {
        let one = BigInt::from(1);
        let e = rcf_expand(&r("sqrt(2)"), 50).unwrap();
        assert_eq!(lehner_from_rcf(&one, &e.digits).unwrap().period(), &[D21, D11]);
        let e = rcf_expand(&r("4/3"), 50).unwrap();
        assert_eq!(lehner_from_rcf(&one, &e.digits).unwrap().preperiod(), &[D21, D21, D11]);
        let w = DigitSequence::new(
            vec![RcfDigit::new(1).unwrap(), RcfDigit::new(5).unwrap()],
            vec![RcfDigit::new(7).unwrap()],
        );
        assert_eq!(
            lehner_from_rcf(&one, &w).unwrap().prefix(6),
            vec![D11, D21, D21, D21, D21, D11]
        );
        assert_eq!(
            lehner_from_rcf(&BigInt::from(2), &w),
            Err(Error::UnsupportedHead("2".into()))
        );
    }

    #[test]
    fn tail_examples() {
        let t = lehner_tail(&r("sqrt(2)"), 0).unwrap();
        assert_eq!((t.sign, t.value), (Sign::Plus, r("1+sqrt(2)/2")));
        let t = lehner_tail(&r("sqrt(2)"), 1).unwrap();
        assert_eq!((t.sign, t.value), (Sign::Minus, r("sqrt(2)")));
        let t = lehner_tail(&r("(1+sqrt(5))/2"), 2).unwrap();
        assert_eq!((t.sign, t.value), (Sign::Minus, r("(1+sqrt(5))/2")));
        assert_eq!(lehner_tail(&r("3/2"), 1), Err(Error::TailPastTermination(1)));
    }

    #[test]
    fn periodicity_examples() {
        for x in ["sqrt(2)", "(1+sqrt(5))/2", "(3+sqrt(2))/3", "(5+sqrt(2))/4"] {
            assert!(pure_periodicity_criterion(&r(x)).unwrap(), "{x}");
            assert!(lehner_expand(&r(x), 200).unwrap().preperiod().is_empty(), "{x}");
        }
        assert!(pure_periodicity_criterion(&r("3/2")).is_err());
    }

    #[test]
    fn dual_period_examples() {
        assert_eq!(dual_of_period(&[D21, D11]), vec![FareyDigit::Dp11, FareyDigit::Dm12]);
        assert_eq!(dual_of_period(&[D21]), vec![FareyDigit::Dm12]);
        for (period, x) in [(vec![D21, D11], "sqrt(2)"), (vec![D11], "(1+sqrt(5))/2"), (vec![D21], "1")] {
            let v = DigitSequence::new(vec![], dual_of_period(&period)).value().unwrap();
            assert_eq!(-v, r(x).conjugate(), "{x}");
        }
    }

    #[test]
    fn equivalence_examples() {
        let (a, b) = (r("sqrt(2)"), r("1+sqrt(2)/2"));
        let w = psl2z_equivalent(&a, &b, 100).unwrap().unwrap();
        assert_eq!(w.apply(&a), b);
        assert_eq!(w.det(), BigInt::from(1));
        assert_eq!(psl2z_equivalent(&a, &r("(1+sqrt(5))/2"), 100).unwrap(), None);
        assert_eq!(psl2z_equivalent(&a, &a, 100).unwrap(), Some(UnimodularMap::identity()));
    }

    #[test]
    fn transfer_examples() {
        for x in ["3/2", "5/4", "9/5", "sqrt(2)"] {
            assert!(transfer_check(&r(x)).unwrap(), "{x}");
        }
        let density = |t: &ExactReal| t.try_sub(&ExactReal::one())?.try_recip();
        assert_eq!(transfer_sides(&lehner_system(), density, &r("3/2")).unwrap().0, r("2"));
    }
}
