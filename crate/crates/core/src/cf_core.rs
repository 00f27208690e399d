//! Signed continued-fraction words, eventually periodic digit sequences and
//! the regular continued fraction.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::numeric::{ExactReal, IntMatrix, UnimodularMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(v: i64) -> Self {
        if v < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn apply(self, x: &ExactReal) -> ExactReal {
        match self {
            Sign::Plus => x.clone(),
            Sign::Minus => -x,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// One partial quotient and the sign joining it to the next term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub quotient: BigInt,
    pub sign: Sign,
}

impl Term {
    pub fn new(quotient: i64, sign: Sign) -> Self {
        Term {
            quotient: quotient.into(),
            sign,
        }
    }
}

/// `a0 + e0/(a1 + e1/(a2 + ...))` as a finite list of terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GeneralCFWord(pub Vec<Term>);

impl GeneralCFWord {
    pub fn terms(&self) -> &[Term] {
        &self.0
    }

    /// Bottom-up exact evaluation. Without a tail the last sign is unused.
    pub fn evaluate(&self, tail: Option<&ExactReal>) -> Result<ExactReal> {
        let mut terms = self.0.iter().rev();
        let mut acc = match (terms.next(), tail) {
            (None, Some(t)) => return Ok(t.clone()),
            (None, None) => return Err(Error::InvalidNumber("empty word without tail".into())),
            (Some(last), None) => ExactReal::integer(last.quotient.clone()),
            (Some(last), Some(t)) => {
                ExactReal::integer(last.quotient.clone()).try_add(&Self::step(last.sign, t)?)?
            }
        };
        for term in terms {
            acc = ExactReal::integer(term.quotient.clone()).try_add(&Self::step(term.sign, &acc)?)?;
        }
        Ok(acc)
    }

    fn step(sign: Sign, below: &ExactReal) -> Result<ExactReal> {
        if below.is_infinite() {
            return Ok(ExactReal::zero());
        }
        if below.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(sign.apply(&below.try_recip()?))
    }

    fn check_pair(&self, i: usize) -> Result<()> {
        if i + 1 >= self.0.len() {
            return Err(Error::PositionOutOfRange(i));
        }
        Ok(())
    }

    /// `A + e/(B + r) = (A + e) + (-e)/(1 + 1/((B - 1) + r))` at terms `i, i+1`.
    pub fn insertion_rewrite(&self, i: usize) -> Result<Self> {
        self.check_pair(i)?;
        let (a, b) = (&self.0[i], &self.0[i + 1]);
        let eps = BigInt::from(a.sign.value());
        let mut out = self.0[..i].to_vec();
        out.push(Term {
            quotient: &a.quotient + &eps,
            sign: -a.sign,
        });
        out.push(Term {
            quotient: BigInt::one(),
            sign: Sign::Plus,
        });
        out.push(Term {
            quotient: &b.quotient - 1,
            sign: b.sign,
        });
        out.extend_from_slice(&self.0[i + 2..]);
        Ok(GeneralCFWord(out))
    }

    /// `A + e/(B + r) = (A - e) + e/(1 - 1/((B + 1) + r))` at terms `i, i+1`.
    pub fn alt_insertion_rewrite(&self, i: usize) -> Result<Self> {
        self.check_pair(i)?;
        let (a, b) = (&self.0[i], &self.0[i + 1]);
        let eps = BigInt::from(a.sign.value());
        let mut out = self.0[..i].to_vec();
        out.push(Term {
            quotient: &a.quotient - &eps,
            sign: a.sign,
        });
        out.push(Term {
            quotient: BigInt::one(),
            sign: Sign::Minus,
        });
        out.push(Term {
            quotient: &b.quotient + 1,
            sign: b.sign,
        });
        out.extend_from_slice(&self.0[i + 2..]);
        Ok(GeneralCFWord(out))
    }
}

/// A digit alphabet whose digits act as inverse branches `value = branch(tail)`.
pub trait Alphabet: Clone + Debug + PartialEq + Eq + Hash {
    const NAME: &'static str;
    fn branch(&self) -> UnimodularMap;
    /// Closed interval containing every tail value.
    fn tail_range() -> (ExactReal, ExactReal);
    /// Tail standing after the last digit of a finite word.
    fn terminal() -> ExactReal;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Option<Self>;
}

/// An eventually periodic word: `preperiod` followed by `period` repeated
/// forever, or a finite word when `period` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitSequence<A> {
    preperiod: Vec<A>,
    period: Vec<A>,
}

impl<A: Clone + PartialEq> DigitSequence<A> {
    /// Normalises to a primitive period and the shortest preperiod.
    pub fn new(preperiod: Vec<A>, period: Vec<A>) -> Self {
        let mut period = primitive_root(period);
        let mut preperiod = preperiod;
        while !period.is_empty() && preperiod.last().is_some() && preperiod.last() == period.last() {
            preperiod.pop();
            period.rotate_right(1);
        }
        DigitSequence { preperiod, period }
    }

    pub fn finite(digits: Vec<A>) -> Self {
        DigitSequence {
            preperiod: digits,
            period: Vec::new(),
        }
    }

    pub fn preperiod(&self) -> &[A] {
        &self.preperiod
    }

    pub fn period(&self) -> &[A] {
        &self.period
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &A> + '_ {
        self.preperiod.iter().chain(
            std::iter::repeat_n(self.period.iter(), if self.period.is_empty() { 0 } else { usize::MAX })
                .flatten(),
        )
    }

    /// The first `n` digits, fewer if the word is finite and shorter.
    pub fn prefix(&self, n: usize) -> Vec<A> {
        self.iter().take(n).cloned().collect()
    }

    /// The sequence with its first `k` digits removed.
    pub fn shifted(&self, k: usize) -> Self {
        if k <= self.preperiod.len() {
            return Self::new(self.preperiod[k..].to_vec(), self.period.clone());
        }
        if self.period.is_empty() {
            return Self::finite(Vec::new());
        }
        let mut period = self.period.clone();
        period.rotate_left((k - self.preperiod.len()) % self.period.len());
        Self::new(Vec::new(), period)
    }

    pub fn map<B: Clone + PartialEq>(&self, f: impl Fn(&A) -> B) -> DigitSequence<B> {
        DigitSequence::new(
            self.preperiod.iter().map(&f).collect(),
            self.period.iter().map(&f).collect(),
        )
    }
}

fn primitive_root<A: PartialEq>(mut w: Vec<A>) -> Vec<A> {
    let n = w.len();
    for p in 1..n {
        if n.is_multiple_of(p) && (p..n).all(|i| w[i] == w[i - p]) {
            w.truncate(p);
            return w;
        }
    }
    w
}

impl<A: Alphabet> DigitSequence<A> {
    /// The value of the sequence: the admissible fixed point of the period
    /// map, or the terminal tail for finite words, pulled back through the
    /// preperiod.
    pub fn value(&self) -> Result<ExactReal> {
        let tail = if self.period.is_empty() {
            A::terminal()
        } else {
            let m = word_map(&self.period);
            let (lo, hi) = A::tail_range();
            attracting_fixed_point(&m, &lo, &hi)?
        };
        Ok(word_map(&self.preperiod).apply(&tail))
    }

    pub fn to_json(&self, head: Option<i64>) -> DigitSequenceJson {
        DigitSequenceJson {
            head,
            preperiod: self.preperiod.iter().map(A::to_json).collect(),
            period: self.period.iter().map(A::to_json).collect(),
            alphabet: A::NAME.to_string(),
        }
    }

    pub fn from_json(j: &DigitSequenceJson) -> Result<Self> {
        if j.alphabet != A::NAME {
            return Err(Error::InvalidNumber(format!("alphabet {} is not {}", j.alphabet, A::NAME)));
        }
        let decode = |vs: &[Value]| -> Result<Vec<A>> {
            vs.iter()
                .map(|v| A::from_json(v).ok_or_else(|| Error::InvalidNumber(format!("bad digit {v}"))))
                .collect()
        };
        Ok(Self::new(decode(&j.preperiod)?, decode(&j.period)?))
    }
}

/// `branch(w0) ∘ branch(w1) ∘ ...`.
pub fn word_map<A: Alphabet>(word: &[A]) -> UnimodularMap {
    word.iter()
        .fold(UnimodularMap::identity(), |acc, d| acc.compose(&d.branch()))
}

/// The fixed point of `m` in `[lo, hi]`, preferring the attracting one.
pub fn attracting_fixed_point(
    m: &UnimodularMap,
    lo: &ExactReal,
    hi: &ExactReal,
) -> Result<ExactReal> {
    let IntMatrix { a, b, c, d } = m.matrix().clone();
    let mut roots = Vec::new();
    if c.is_zero() {
        roots.push(ExactReal::Infinity);
        if a != d {
            roots.push(ExactReal::ratio(b.clone(), &d - &a)?);
        }
    } else {
        // c t^2 + (d - a) t - b = 0, divided by its content so the
        // discriminant stays that of the minimal polynomial
        let g = c.gcd(&(&d - &a)).gcd(&b);
        let (qa, qb, qc) = (&c / &g, (&d - &a) / &g, &b / &g);
        let disc = &qb * &qb + BigInt::from(4) * &qa * &qc;
        if disc >= BigInt::zero() {
            for s in [1, -1] {
                roots.push(ExactReal::surd(-&qb, s, disc.clone(), BigInt::from(2) * &qa)?);
            }
        }
    }
    let inside: Vec<ExactReal> = roots
        .into_iter()
        .filter(|t| lo <= t && t <= hi)
        .collect();
    let attracting = |t: &ExactReal| -> bool {
        if t.is_infinite() {
            return false;
        }
        let den = ExactReal::integer(c.clone()) * t + ExactReal::integer(d.clone());
        let det = ExactReal::integer(BigInt::from(m.det().magnitude().clone()));
        &den * &den > det
    };
    inside
        .iter()
        .find(|t| attracting(t))
        .or_else(|| inside.iter().find(|t| !t.is_infinite()))
        .or_else(|| inside.first())
        .cloned()
        .ok_or_else(|| Error::NoRootInRange(format!("[{lo}, {hi}]")))
}

/// Wire form of a digit sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DigitSequenceJson {
    pub head: Option<i64>,
    pub preperiod: Vec<Value>,
    pub period: Vec<Value>,
    pub alphabet: String,
}

/// A regular continued fraction partial quotient `n >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RcfDigit(u64);

impl RcfDigit {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidNumber("partial quotient 0".into()));
        }
        Ok(RcfDigit(n))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl Alphabet for RcfDigit {
    const NAME: &'static str = "rcf";

    fn branch(&self) -> UnimodularMap {
        UnimodularMap::new(self.0 as i64, 1, 1, 0).expect("det -1")
    }

    fn tail_range() -> (ExactReal, ExactReal) {
        (ExactReal::one(), ExactReal::Infinity)
    }

    fn terminal() -> ExactReal {
        ExactReal::Infinity
    }

    fn to_json(&self) -> Value {
        Value::from(self.0)
    }

    fn from_json(v: &Value) -> Option<Self> {
        v.as_u64().filter(|&n| n > 0).map(RcfDigit)
    }
}

/// `x = head + 1/[n1; n2, ...]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RcfExpansion {
    pub head: BigInt,
    pub digits: DigitSequence<RcfDigit>,
}

impl RcfExpansion {
    pub fn value(&self) -> Result<ExactReal> {
        let head = ExactReal::integer(self.head.clone());
        if self.digits.is_finite() && self.digits.preperiod().is_empty() {
            return Ok(head);
        }
        head.try_add(&self.digits.value()?.try_recip()?)
    }

    /// Digits after the head as a plain list, with the period unrolled `reps` times.
    pub fn unrolled(&self, reps: usize) -> Vec<u64> {
        let mut out: Vec<u64> = self.digits.preperiod().iter().map(|d| d.0).collect();
        for _ in 0..reps {
            out.extend(self.digits.period().iter().map(|d| d.0));
        }
        out
    }
}

/// Regular continued fraction with exact cycle detection.
pub fn rcf_expand(x: &ExactReal, max_digits: usize) -> Result<RcfExpansion> {
    let head = x.floor()?;
    let mut t = x.try_sub(&ExactReal::integer(head.clone()))?;
    let mut digits = Vec::new();
    if t.is_zero() {
        return Ok(RcfExpansion {
            head,
            digits: DigitSequence::finite(digits),
        });
    }
    t = t.try_recip()?;
    let mut seen: HashMap<ExactReal, usize> = HashMap::new();
    loop {
        if let Some(&start) = seen.get(&t) {
            let period = digits.split_off(start);
            return Ok(RcfExpansion {
                head,
                digits: DigitSequence::new(digits, period),
            });
        }
        if digits.len() >= max_digits {
            return Err(Error::BudgetExceeded(max_digits));
        }
        seen.insert(t.clone(), digits.len());
        let n = t.floor()?;
        let digit = n
            .to_u64()
            .ok_or_else(|| Error::Overflow(format!("partial quotient {n}")))?;
        digits.push(RcfDigit(digit));
        let frac = t.try_sub(&ExactReal::integer(n))?;
        if frac.is_zero() {
            return Ok(RcfExpansion {
                head,
                digits: DigitSequence::finite(digits),
            });
        }
        t = frac.try_recip()?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    fn rcf(xs: &[u64]) -> Vec<RcfDigit> {
        xs.iter().map(|&n| RcfDigit(n)).collect()
    }

    #[test]
    fn evaluate_examples() {
        let w = GeneralCFWord(vec![Term::new(2, Sign::Minus), Term::new(1, Sign::Plus)]);
        assert_eq!(w.evaluate(Some(&r("1"))).unwrap(), r("3/2"));
        let w = GeneralCFWord(vec![Term::new(1, Sign::Plus), Term::new(1, Sign::Plus)]);
        assert_eq!(w.evaluate(Some(&r("1"))).unwrap(), r("3/2"));
        let w = GeneralCFWord(vec![Term::new(2, Sign::Minus)]);
        assert_eq!(w.evaluate(None).unwrap(), r("2"));
        let w = GeneralCFWord(vec![Term::new(1, Sign::Plus), Term::new(0, Sign::Plus)]);
        assert_eq!(w.evaluate(None), Err(Error::DivisionByZero));
    }

    #[test]
    fn rewrite_examples() {
        let w = GeneralCFWord(vec![Term::new(1, Sign::Plus), Term::new(3, Sign::Plus)]);
        let ins = w.insertion_rewrite(0).unwrap();
        assert_eq!(
            ins.0,
            vec![Term::new(2, Sign::Minus), Term::new(1, Sign::Plus), Term::new(2, Sign::Plus)]
        );
        let alt = w.alt_insertion_rewrite(0).unwrap();
        assert_eq!(
            alt.0,
            vec![Term::new(0, Sign::Plus), Term::new(1, Sign::Minus), Term::new(4, Sign::Plus)]
        );
        for v in [&w, &ins, &alt] {
            assert_eq!(v.evaluate(None).unwrap(), r("4/3"));
        }
        assert_eq!(w.insertion_rewrite(1), Err(Error::PositionOutOfRange(1)));
    }

    #[test]
    fn rcf_examples() {
        let e = rcf_expand(&r("sqrt(2)"), 100).unwrap();
        assert_eq!(e.head, BigInt::from(1));
        assert_eq!(e.digits, DigitSequence::new(vec![], rcf(&[2])));
        let e = rcf_expand(&r("(1+sqrt(5))/2"), 100).unwrap();
        assert_eq!(e.digits.period(), rcf(&[1]).as_slice());
        let e = rcf_expand(&r("4/3"), 100).unwrap();
        assert_eq!(e.digits, DigitSequence::finite(rcf(&[3])));
        assert_eq!(e.value().unwrap(), r("4/3"));
        let e = rcf_expand(&r("-7/3"), 100).unwrap();
        assert_eq!((e.head.clone(), e.digits.prefix(5)), (BigInt::from(-3), rcf(&[1, 2])));
    }

    #[test]
    fn normalisation() {
        let s = DigitSequence::new(rcf(&[1, 2, 3, 2, 3]), rcf(&[2, 3, 2, 3]));
        assert_eq!(s.preperiod(), rcf(&[1]).as_slice());
        assert_eq!(s.period(), rcf(&[2, 3]).as_slice());
        let s = DigitSequence::new(rcf(&[5, 3]), rcf(&[2, 3]));
        assert_eq!(s.preperiod(), rcf(&[5]).as_slice());
        assert_eq!(s.period(), rcf(&[3, 2]).as_slice());
    }

    #[test]
    fn periodic_values() {
        let s = DigitSequence::new(vec![], rcf(&[2]));
        assert_eq!(s.value().unwrap(), r("1+sqrt(2)"));
        let s = DigitSequence::new(rcf(&[3]), rcf(&[1]));
        // 3 + 1/phi
        assert_eq!(s.value().unwrap(), r("(5+sqrt(5))/2"));
    }

    #[test]
    fn shifted_sequence() {
        let s = DigitSequence::new(rcf(&[5]), rcf(&[1, 2]));
        assert_eq!(s.shifted(2), DigitSequence::new(vec![], rcf(&[2, 1])));
        assert_eq!(s.shifted(1).prefix(4), rcf(&[1, 2, 1, 2]));
    }
}
