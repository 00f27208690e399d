//! Piecewise Möbius interval maps: verification, transposed duals, the F*
//! expansion on (1/2, 1] and the dual natural extension.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;
use serde::Serialize;
use serde_json::Value;

use crate::cf_core::{Alphabet, DigitSequence};
use crate::error::{Error, Result};
use crate::lehner::LehnerDigit;
use crate::numeric::{ExactReal, IntMatrix, UnimodularMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: ExactReal,
    pub hi: ExactReal,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: ExactReal, hi: ExactReal, lo_closed: bool, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    /// Parses `[a,b)`, `(a,b]` and friends.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidNumber(format!("bad interval {s}"));
        let lo_closed = match s.chars().next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(bad()),
        };
        let hi_closed = match s.chars().last() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(bad()),
        };
        let inner = &s[1..s.len() - 1];
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        Ok(Interval::new(a.parse()?, b.parse()?, lo_closed, hi_closed))
    }

    pub fn contains(&self, x: &ExactReal) -> bool {
        let above = if self.lo_closed { x >= &self.lo } else { x > &self.lo };
        let below = if self.hi_closed { x <= &self.hi } else { x < &self.hi };
        above && below && !x.is_infinite()
    }

    pub fn contains_interior(&self, x: &ExactReal) -> bool {
        x > &self.lo && x < &self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusCell {
    pub interval: Interval,
    pub matrix: IntMatrix,
}

/// A carrier interval split into cells, each mapped onto the carrier by a
/// Möbius transformation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusSystem {
    pub carrier: Interval,
    pub cells: Vec<MobiusCell>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Defect {
    Singular { cell: usize },
    EmptyCell { cell: usize },
    Gap { at: String },
    Overlap { at: String },
    Uncovered { at: String },
    PoleInside { cell: usize, pole: String },
    Orientation { cell: usize },
    NotOnto { cell: usize, image: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub defects: Vec<Defect>,
}

impl MobiusSystem {
    pub fn new(carrier: Interval, cells: Vec<(Interval, IntMatrix)>) -> Self {
        MobiusSystem {
            carrier,
            cells: cells
                .into_iter()
                .map(|(interval, matrix)| MobiusCell { interval, matrix })
                .collect(),
        }
    }

    /// Index of the cell containing `x`, honouring endpoint flags.
    pub fn cell_of(&self, x: &ExactReal) -> Option<usize> {
        self.cells.iter().position(|c| c.interval.contains(x))
    }

    pub fn map(&self, cell: usize) -> Result<UnimodularMap> {
        UnimodularMap::try_from(self.cells[cell].matrix.clone())
    }
}

/// Checks the partition, nonsingularity and that each branch maps its cell
/// monotonically onto the carrier.
pub fn verify_system(s: &MobiusSystem) -> VerifyReport {
    let mut defects = Vec::new();
    let mut order: Vec<usize> = (0..s.cells.len()).collect();
    order.sort_by(|&i, &j| s.cells[i].interval.lo.cmp(&s.cells[j].interval.lo));

    for (i, cell) in s.cells.iter().enumerate() {
        if cell.interval.lo >= cell.interval.hi {
            defects.push(Defect::EmptyCell { cell: i });
        }
    }
    match (order.first(), order.last()) {
        (Some(&first), Some(&last)) => {
            if s.cells[first].interval.lo != s.carrier.lo {
                defects.push(Defect::Uncovered {
                    at: s.carrier.lo.to_string(),
                });
            }
            if s.cells[last].interval.hi != s.carrier.hi {
                defects.push(Defect::Uncovered {
                    at: s.carrier.hi.to_string(),
                });
            }
        }
        _ => defects.push(Defect::Uncovered {
            at: s.carrier.to_string(),
        }),
    }
    for pair in order.windows(2) {
        let (a, b) = (&s.cells[pair[0]].interval, &s.cells[pair[1]].interval);
        match a.hi.cmp(&b.lo) {
            std::cmp::Ordering::Less => defects.push(Defect::Gap {
                at: format!("{} .. {}", a.hi, b.lo),
            }),
            std::cmp::Ordering::Greater => defects.push(Defect::Overlap {
                at: format!("{} .. {}", b.lo, a.hi),
            }),
            std::cmp::Ordering::Equal => {}
        }
    }

    for (i, cell) in s.cells.iter().enumerate() {
        let Ok(m) = UnimodularMap::try_from(cell.matrix.clone()) else {
            defects.push(Defect::Singular { cell: i });
            continue;
        };
        let pole = m.pole();
        if cell.interval.contains_interior(&pole) {
            defects.push(Defect::PoleInside {
                cell: i,
                pole: pole.to_string(),
            });
            continue;
        }
        let (at_lo, at_hi) = (m.apply(&cell.interval.lo), m.apply(&cell.interval.hi));
        let (lo, hi) = (&s.carrier.lo, &s.carrier.hi);
        let increasing = m.det() > num_bigint::BigInt::zero();
        let forward = &at_lo == lo && &at_hi == hi;
        let backward = &at_lo == hi && &at_hi == lo;
        if (increasing && forward) || (!increasing && backward) {
            continue;
        }
        if forward || backward {
            defects.push(Defect::Orientation { cell: i });
        } else {
            defects.push(Defect::NotOnto {
                cell: i,
                image: format!("{at_lo} .. {at_hi}"),
            });
        }
    }
    VerifyReport {
        ok: defects.is_empty(),
        defects,
    }
}

/// The system with transposed matrices on the supplied dual partition.
pub fn natural_dual(
    s: &MobiusSystem,
    dual_carrier: Interval,
    dual_cells: Vec<Interval>,
) -> Result<MobiusSystem> {
    if dual_cells.len() != s.cells.len() {
        return Err(Error::DualVerificationFailed(format!(
            "{} dual cells for {} cells",
            dual_cells.len(),
            s.cells.len()
        )));
    }
    let dual = MobiusSystem {
        carrier: dual_carrier,
        cells: s
            .cells
            .iter()
            .zip(dual_cells)
            .map(|(c, interval)| MobiusCell {
                interval,
                matrix: c.matrix.transpose(),
            })
            .collect(),
    };
    let report = verify_system(&dual);
    if !report.ok {
        return Err(Error::DualVerificationFailed(format!("{:?}", report.defects)));
    }
    Ok(dual)
}

/// For two-cell systems, finds the split point of the dual carrier for which
/// the transposed branches form a valid system.
pub fn find_dual_partition(s: &MobiusSystem, dual_carrier: &Interval) -> Result<MobiusSystem> {
    if s.cells.len() != 2 {
        return Err(Error::DualVerificationFailed(
            "partition search needs exactly two cells".into(),
        ));
    }
    let mut candidates = Vec::new();
    for cell in &s.cells {
        let n = UnimodularMap::try_from(cell.matrix.transpose())?.inverse();
        for e in [&dual_carrier.lo, &dual_carrier.hi] {
            let c = n.apply(e);
            if dual_carrier.contains_interior(&c) && !candidates.contains(&c) {
                candidates.push(c);
            }
        }
    }
    for c in candidates {
        let left = Interval::new(dual_carrier.lo.clone(), c.clone(), dual_carrier.lo_closed, true);
        let right = Interval::new(c.clone(), dual_carrier.hi.clone(), false, dual_carrier.hi_closed);
        for cells in [vec![left.clone(), right.clone()], vec![right, left]] {
            if let Ok(d) = natural_dual(s, dual_carrier.clone(), cells) {
                return Ok(d);
            }
        }
    }
    Err(Error::DualVerificationFailed("no split point works".into()))
}

/// Both sides of the transfer-operator identity
/// `sum f(y)/|T'(y)| over T(y) = x` and `f(x)`.
pub fn transfer_sides(
    s: &MobiusSystem,
    density: impl Fn(&ExactReal) -> Result<ExactReal>,
    x: &ExactReal,
) -> Result<(ExactReal, ExactReal)> {
    let mut lhs = ExactReal::zero();
    for (k, cell) in s.cells.iter().enumerate() {
        let m = s.map(k)?;
        let y = m.inverse().apply(x);
        if !cell.interval.contains(&y) {
            continue;
        }
        lhs = lhs.try_add(&density(&y)?.try_div(&m.abs_derivative(&y)?)?)?;
    }
    Ok((lhs, density(x)?))
}

fn r(s: &str) -> ExactReal {
    s.parse().expect("literal")
}

fn iv(s: &str) -> Interval {
    Interval::parse(s).expect("literal")
}

/// Farey map on `[-1, ∞)`.
pub fn farey_system() -> MobiusSystem {
    MobiusSystem::new(
        Interval::new(r("-1"), ExactReal::Infinity, true, false),
        vec![
            (iv("[-1,0)"), IntMatrix::new(-2, -1, 1, 0)),
            (Interval::new(r("0"), ExactReal::Infinity, false, false), IntMatrix::new(-1, 1, 1, 0)),
        ],
    )
}

/// Lehner map on `[1, 2)`, the `(2,-1)` branch first.
pub fn lehner_system() -> MobiusSystem {
    MobiusSystem::new(
        iv("[1,2)"),
        vec![
            (iv("[1,3/2)"), IntMatrix::new(0, 1, -1, 2)),
            (iv("[3/2,2)"), IntMatrix::new(0, 1, 1, -1)),
        ],
    )
}

/// F* on `(1/2, 1]`, cells ordered so that cell `k` is the transposed dual
/// of cell `k` of [`farey_system`].
pub fn fstar_system() -> MobiusSystem {
    MobiusSystem::new(
        iv("(1/2,1]"),
        vec![
            (iv("(2/3,1]"), IntMatrix::new(2, -1, 1, 0)),
            (iv("(1/2,2/3]"), IntMatrix::new(-1, 1, 1, 0)),
        ],
    )
}

/// The F* digit alphabet: the Lehner digits read through `x -> 1/x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FStarDigit(pub LehnerDigit);

impl Alphabet for FStarDigit {
    const NAME: &'static str = "fstar";

    fn branch(&self) -> UnimodularMap {
        // x = 1 / (a + e x')
        let (a, e) = (self.0.quotient(), self.0.sign().value());
        UnimodularMap::new(0, 1, e, a).expect("unimodular")
    }

    fn tail_range() -> (ExactReal, ExactReal) {
        (r("1/2"), r("1"))
    }

    fn terminal() -> ExactReal {
        ExactReal::one()
    }

    fn to_json(&self) -> Value {
        self.0.to_json()
    }

    fn from_json(v: &Value) -> Option<Self> {
        LehnerDigit::from_json(v).map(FStarDigit)
    }
}

fn fstar_carrier() -> Interval {
    iv("(1/2,1]")
}

pub fn fstar_step(x: &ExactReal) -> Result<(LehnerDigit, ExactReal)> {
    if !fstar_carrier().contains(x) {
        return Err(Error::OutOfDomain(x.to_string()));
    }
    let inv = x.try_recip()?;
    if x <= &r("2/3") {
        Ok((LehnerDigit::D11, inv - ExactReal::one()))
    } else {
        Ok((LehnerDigit::D21, ExactReal::from(2) - inv))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FStarExpansion {
    pub digits: DigitSequence<FStarDigit>,
    /// The orbit reached the excluded carrier edge 1/2.
    pub hit_boundary: bool,
}

/// F* expansion; an orbit reaching 1/2 is closed off in the same terminal
/// form the Lehner expansion uses at 2.
pub fn fstar_expand(x: &ExactReal, max_digits: usize) -> Result<FStarExpansion> {
    let half = r("1/2");
    let mut digits = Vec::new();
    let mut seen = HashMap::new();
    let mut state = x.clone();
    if !fstar_carrier().contains(&state) {
        return Err(Error::OutOfDomain(x.to_string()));
    }
    loop {
        if state == half {
            digits.pop();
            digits.extend([LehnerDigit::D21, LehnerDigit::D11]);
            return Ok(FStarExpansion {
                digits: DigitSequence::finite(digits.into_iter().map(FStarDigit).collect()),
                hit_boundary: true,
            });
        }
        if let Some(&start) = seen.get(&state) {
            let period: Vec<FStarDigit> = digits.split_off(start).into_iter().map(FStarDigit).collect();
            let pre = digits.into_iter().map(FStarDigit).collect();
            return Ok(FStarExpansion {
                digits: DigitSequence::new(pre, period),
                hit_boundary: false,
            });
        }
        if digits.len() >= max_digits {
            return Err(Error::BudgetExceeded(max_digits));
        }
        seen.insert(state.clone(), digits.len());
        let (d, next) = fstar_step(&state)?;
        digits.push(d);
        state = next;
    }
}

/// Transfer identity for the density `1/(t(1-t))` at `x` in `(1/2, 1)`.
pub fn transfer_check_fstar(x: &ExactReal) -> Result<bool> {
    if !(x > &r("1/2") && x < &r("1")) {
        return Err(Error::OutOfDomain(x.to_string()));
    }
    let density = |t: &ExactReal| t.try_mul(&ExactReal::one().try_sub(t)?)?.try_recip();
    let (lhs, rhs) = transfer_sides(&fstar_system(), density, x)?;
    Ok(lhs == rhs)
}

/// `(M_k x, N_k^{-1} y)` where `k` is the cell of `x` in `s`.
pub fn dual_natext_step(
    s: &MobiusSystem,
    dual: &MobiusSystem,
    p: (&ExactReal, &ExactReal),
) -> Result<(ExactReal, ExactReal)> {
    let k = s.cell_of(p.0).ok_or_else(|| Error::OutOfDomain(p.0.to_string()))?;
    let dual_cell = dual
        .cells
        .get(k)
        .ok_or_else(|| Error::DualVerificationFailed("cell count mismatch".into()))?;
    let n = UnimodularMap::try_from(dual_cell.matrix.clone())?;
    Ok((s.map(k)?.apply(p.0), n.inverse().apply(p.1)))
}

/// `(e0 (1/x - a0), e0/(a0 + y))` on `(1/2, 1] x [-1, ∞)`.
pub fn fbar_step(x: &ExactReal, y: &ExactReal) -> Result<(ExactReal, ExactReal)> {
    let (d, next) = fstar_step(x)?;
    let (a, e) = (ExactReal::from(d.quotient()), d.sign());
    let den = a.try_add(y)?;
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok((next, e.apply(&den.try_recip()?)))
}

/// Checks `h(F̄(x,y)) |Jac F̄| = h(x,y)` exactly for `h = 1/(1+xy)^2`.
pub fn invariance_check_1pxy(x: &ExactReal, y: &ExactReal) -> Result<bool> {
    let h = |u: &ExactReal, v: &ExactReal| -> Result<ExactReal> {
        let s = ExactReal::one().try_add(&u.try_mul(v)?)?;
        if s.is_zero() {
            return Err(Error::DegenerateDenominator);
        }
        s.try_mul(&s)?.try_recip()
    };
    let before = h(x, y)?;
    let (d, _) = fstar_step(x)?;
    let (x1, y1) = fbar_step(x, y)?;
    let a_plus_y = ExactReal::from(d.quotient()).try_add(y)?;
    let jac = x
        .try_mul(x)?
        .try_mul(&a_plus_y.try_mul(&a_plus_y)?)?
        .try_recip()?;
    Ok(h(&x1, &y1)?.try_mul(&jac)? == before)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_systems_verify() {
        for s in [farey_system(), lehner_system(), fstar_system()] {
            let rep = verify_system(&s);
            assert!(rep.ok, "{rep:?}");
        }
    }

    #[test]
    fn overlap_detected() {
        let mut s = lehner_system();
        s.cells[1].interval = iv("[4/3,2)");
        let rep = verify_system(&s);
        assert!(!rep.ok);
        assert!(rep.defects.iter().any(|d| matches!(d, Defect::Overlap { .. })));
    }

    #[test]
    fn farey_dual_is_fstar() {
        let dual = natural_dual(&farey_system(), iv("(1/2,1]"), vec![iv("(2/3,1]"), iv("(1/2,2/3]")])
            .unwrap();
        assert_eq!(dual.cells.len(), 2);
        for (a, b) in dual.cells.iter().zip(fstar_system().cells.iter()) {
            assert_eq!(a.interval, b.interval);
            assert_eq!(
                UnimodularMap::try_from(a.matrix.clone()).unwrap(),
                UnimodularMap::try_from(b.matrix.clone()).unwrap()
            );
        }
        let found = find_dual_partition(&farey_system(), &iv("(1/2,1]")).unwrap();
        assert_eq!(found.cells[0].interval, iv("(2/3,1]"));
        // the labels as printed in the source text pair the wrong halves
        assert!(matches!(
            natural_dual(&farey_system(), iv("(1/2,1]"), vec![iv("(1/2,2/3]"), iv("(2/3,1]")]),
            Err(Error::DualVerificationFailed(_))
        ));
        assert!(natural_dual(&farey_system(), iv("(1/2,1]"), vec![iv("(1/2,1]")]).is_err());
    }

    #[test]
    fn fstar_examples() {
        assert_eq!(fstar_step(&r("2/3")).unwrap(), (LehnerDigit::D11, r("1/2")));
        assert_eq!(fstar_step(&r("1")).unwrap(), (LehnerDigit::D21, r("1")));
        assert_eq!(fstar_step(&r("sqrt(2)/2")).unwrap(), (LehnerDigit::D21, r("2-sqrt(2)")));
        let e = fstar_expand(&r("3/4"), 100).unwrap();
        assert!(e.hit_boundary);
        assert_eq!(e.digits.value().unwrap(), r("3/4"));
    }

    #[test]
    fn fstar_transfer_examples() {
        for x in ["3/4", "5/8", "7/9"] {
            assert!(transfer_check_fstar(&r(x)).unwrap(), "{x}");
        }
        assert!(transfer_check_fstar(&r("1")).is_err());
    }

    #[test]
    fn dual_extension_examples() {
        let f = farey_system();
        let fs = fstar_system();
        assert_eq!(dual_natext_step(&f, &fs, (&r("1"), &r("1"))).unwrap(), (r("0"), r("1/2")));
        assert_eq!(
            dual_natext_step(&fs, &f, (&r("sqrt(2)/2"), &r("0"))).unwrap(),
            (r("2-sqrt(2)"), r("-1/2"))
        );
        assert_eq!(fbar_step(&r("3/5"), &r("0")).unwrap(), (r("2/3"), r("1")));
        for (x, y) in [("3/5", "0"), ("3/4", "1"), ("sqrt(2)/2", "sqrt(2)")] {
            assert!(invariance_check_1pxy(&r(x), &r(y)).unwrap());
        }
    }
}
