//! Geodesics on the modular surface: lifts, cutting sequences, the return
//! map on endpoint pairs and its conjugacy to the Lehner natural extension.

mod cell;
mod walker;

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::cf_core::{rcf_expand, DigitSequence, DigitSequenceJson, RcfDigit, Sign};
use crate::error::{Error, Result};
use crate::farey_cf::FareyDigit;
use crate::lehner::{dual_of_period, lehner_from_rcf, lehner_step, LehnerDigit};
use crate::natext::{natext_step, OmegaPoint};
use crate::numeric::{ExactReal, IntMatrix, UnimodularMap};

pub use cell::{
    distance, eval_eq7_formula, re_rho_eta, return_time, rho_point, xi_eta, CellCrossing, LogFormulaReport,
    ReRhoEta, UhpPoint,
};
pub use walker::{
    cutting_sequence_geometric, default_edge, letters_to_string, runs_of, walk, Edge, FareyWalker, Letter,
    LetterWord, Vertex,
};

const RCF_BUDGET: usize = 100_000;

/// An oriented geodesic of the upper half-plane given by its endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Geodesic {
    pub backward: ExactReal,
    pub forward: ExactReal,
}

impl Geodesic {
    pub fn new(backward: ExactReal, forward: ExactReal) -> Result<Self> {
        if backward == forward {
            return Err(Error::DegenerateEndpoints(backward.to_string()));
        }
        Ok(Geodesic { backward, forward })
    }

    pub fn reversed(&self) -> Self {
        Geodesic {
            backward: self.forward.clone(),
            forward: self.backward.clone(),
        }
    }

    pub fn apply(&self, m: &UnimodularMap) -> Self {
        Geodesic {
            backward: m.apply(&self.backward),
            forward: m.apply(&self.forward),
        }
    }

    /// Membership of `(forward, backward)` in the set of admissible pairs.
    pub fn in_a(&self) -> bool {
        in_s(&self.forward, &self.backward)
    }

    /// Forward endpoint in `(1, ∞)` and backward endpoint in `[-1, 0)`.
    pub fn in_series_window(&self) -> bool {
        let (u, w) = (&self.backward, &self.forward);
        !w.is_infinite() && w > &ExactReal::one() && u >= &ExactReal::from(-1) && u.signum() < 0
    }
}

/// `(x, y)` in `(1,2) x (-∞,1)` or `(-2,-1) x (-1,∞)`.
pub fn in_s(x: &ExactReal, y: &ExactReal) -> bool {
    if x.is_infinite() || y.is_infinite() {
        return false;
    }
    let (one, two) = (ExactReal::one(), ExactReal::from(2));
    let (m_one, m_two) = (-&one, -&two);
    (x > &one && x < &two && y < &one) || (x > &m_two && x < &m_one && y > &m_one)
}

/// A point of the admissible set, `x` being the forward endpoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SPoint {
    pub x: ExactReal,
    pub y: ExactReal,
}

impl SPoint {
    pub fn new(x: ExactReal, y: ExactReal) -> Result<Self> {
        if !in_s(&x, &y) {
            return Err(Error::OutOfDomain(format!("({x}, {y})")));
        }
        Ok(SPoint { x, y })
    }

    pub fn geodesic(&self) -> Geodesic {
        Geodesic {
            backward: self.y.clone(),
            forward: self.x.clone(),
        }
    }
}

/// `e a0` for the forward endpoint `x`: its sign times the first Lehner
/// quotient of `|x|`.
pub(crate) fn pole_of(forward: &ExactReal) -> Result<(Sign, LehnerDigit, ExactReal)> {
    let e = Sign::of(forward.signum() as i64);
    let abs = e.apply(forward);
    let (d, _) = lehner_step(&abs)?;
    Ok((e, d, e.apply(&ExactReal::from(d.quotient()))))
}

/// `1 / (e a0 - z)` for a real `z`.
pub fn rho_real(z: &ExactReal, forward: &ExactReal) -> Result<ExactReal> {
    let (_, _, k) = pole_of(forward)?;
    if z.is_infinite() {
        return Ok(ExactReal::zero());
    }
    let den = k.try_sub(z)?;
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    den.try_recip()
}

pub fn rho_bar(p: &SPoint) -> Result<SPoint> {
    let x = rho_real(&p.x, &p.x)?;
    let y = rho_real(&p.y, &p.x)?;
    SPoint::new(x, y)
}

/// `(x, -y, +1)` on the positive half and `(-x, y, -1)` on the negative one.
pub fn j_map(p: &SPoint) -> OmegaPoint {
    if p.x.signum() > 0 {
        OmegaPoint::with_sign(p.x.clone(), -&p.y, Sign::Plus)
    } else {
        OmegaPoint::with_sign(-&p.x, p.y.clone(), Sign::Minus)
    }
}

pub fn j_inverse(q: &OmegaPoint) -> Result<SPoint> {
    match q.eps {
        Sign::Plus => SPoint::new(q.x.clone(), -&q.y),
        Sign::Minus => SPoint::new(-&q.x, q.y.clone()),
    }
}

/// `J(rho_bar(p)) == L~(J(p))`.
pub fn commute_check(p: &SPoint) -> Result<bool> {
    Ok(j_map(&rho_bar(p)?) == natext_step(&j_map(p))?)
}

/// Whether two cusps are Farey neighbours, i.e. the geodesic joining them is
/// an edge of the tessellation.
pub fn farey_neighbours(a: &ExactReal, b: &ExactReal) -> bool {
    match (Vertex::from_exact(a), Vertex::from_exact(b)) {
        (Some(a), Some(b)) => a.is_neighbour(&b),
        _ => false,
    }
}

fn shift(k: &BigInt) -> UnimodularMap {
    UnimodularMap::shift(k)
}

fn is_integer(x: &ExactReal) -> bool {
    x.floor().map(|f| &ExactReal::integer(f) == x).unwrap_or(false)
}

/// Moves `g` into the Series window by a map in PSL(2,Z).
pub fn series_window(g: &Geodesic) -> Result<(Geodesic, UnimodularMap)> {
    if g.in_series_window() {
        return Ok((g.clone(), UnimodularMap::identity()));
    }
    let edge = default_edge(g)?;
    let mut h = edge.normalising_map();
    let mut cur = g.apply(&h);
    let s = UnimodularMap::inversion();
    if cur.forward.signum() < 0 {
        h = s.compose(&h);
        cur = g.apply(&h);
    }
    // cur crosses (0, ∞) upward: forward > 0 > backward
    for _ in 0..4 {
        let (u, w) = (&cur.backward, &cur.forward);
        let step = if w > &ExactReal::one() {
            if u >= &ExactReal::from(-1) {
                return Ok((cur, h));
            }
            // k = ceil(-u) - 1 puts u into [-1, 0)
            let neg_u = -u;
            let f = neg_u.floor()?;
            let k = if is_integer(&neg_u) { f - 1 } else { f };
            shift(&k)
        } else if w == &ExactReal::one() {
            return Err(Error::OutOfWindow);
        } else {
            // w in (0, 1): invert, pull the backward endpoint into (0, 1], then
            // pass the block of L's and invert again
            let t = s.compose(&h);
            let v = g.apply(&t);
            let f = v.backward.floor()?;
            let k = if is_integer(&v.backward) { f - 1 } else { f };
            let t = shift(&-k).compose(&t);
            let v = g.apply(&t);
            let neg_w = -&v.forward;
            if is_integer(&neg_w) {
                return Err(Error::OutOfWindow);
            }
            let m0 = neg_w.floor()?;
            let t = s.compose(&shift(&m0)).compose(&t);
            h = t;
            cur = g.apply(&h);
            continue;
        };
        h = step.compose(&h);
        cur = g.apply(&h);
    }
    if cur.in_series_window() {
        Ok((cur, h))
    } else {
        Err(Error::OutOfWindow)
    }
}

/// A lift into the admissible set together with the map producing it.
pub fn lift_to_a(g: &Geodesic) -> Result<(Geodesic, UnimodularMap)> {
    if g.backward == g.forward {
        return Err(Error::DegenerateEndpoints(g.forward.to_string()));
    }
    if farey_neighbours(&g.backward, &g.forward) {
        return Err(Error::ExcludedGeodesic);
    }
    if g.in_a() {
        return Ok((g.clone(), UnimodularMap::identity()));
    }
    // cusps with |ps - qr| = 2 are too far apart to fit (1,2) x (-∞,1)
    if let (Some(a), Some(b)) = (Vertex::from_exact(&g.backward), Vertex::from_exact(&g.forward)) {
        if a.cross(&b).abs() == BigInt::from(2) {
            return Err(Error::NoLift);
        }
    }
    if let Ok((win, h)) = series_window(g) {
        let n0 = win.forward.floor()?;
        if !is_integer(&win.forward) {
            let t = shift(&(BigInt::one() - n0));
            let lifted = win.apply(&t);
            if lifted.in_a() {
                return Ok((lifted, t.compose(&h)));
            }
        }
    }
    lift_by_search(g)
}

/// Breadth-first search over words in `T`, `T^-1`, `S`, used when an
/// endpoint is a cusp that blocks the window reduction.
fn lift_by_search(g: &Geodesic) -> Result<(Geodesic, UnimodularMap)> {
    let gens = [
        UnimodularMap::translation(),
        UnimodularMap::translation().inverse(),
        UnimodularMap::inversion(),
    ];
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([(UnimodularMap::identity(), 0usize)]);
    while let Some((h, depth)) = queue.pop_front() {
        let img = g.apply(&h);
        if img.in_a() {
            return Ok((img, h));
        }
        if depth == 14 {
            continue;
        }
        for s in &gens {
            let next = s.compose(&h);
            if seen.insert(next.clone()) {
                queue.push_back((next, depth + 1));
            }
        }
    }
    Err(Error::NoLift)
}

/// Runs `... L^{n-1} R^{n0} L^{n1} ...` of a geodesic in the Series window.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CuttingSequence {
    pub n0: u64,
    /// `n1, n2, ...`
    pub forward: DigitSequence<RcfDigit>,
    /// `n-1, n-2, ...`
    pub backward: DigitSequence<RcfDigit>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuttingSequenceJson {
    pub runs_backward: DigitSequenceJson,
    pub n0: u64,
    pub runs_forward: DigitSequenceJson,
}

impl CuttingSequence {
    pub fn to_json(&self) -> CuttingSequenceJson {
        CuttingSequenceJson {
            runs_backward: self.backward.to_json(None),
            n0: self.n0,
            runs_forward: self.forward.to_json(None),
        }
    }

    /// Letters after the edge `(0, ∞)`: `R^{n0} L^{n1} R^{n2} ...`, the
    /// last run of a finite sequence being one short.
    pub fn forward_letters(&self, max: usize) -> Vec<Letter> {
        run_letters(std::iter::once(self.n0).chain(self.forward.iter().map(|d| d.get())), self.forward.is_finite(), max)
    }

    /// Letters of the reversed geodesic after the same edge: `R^{n-1} L^{n-2} ...`.
    pub fn backward_letters(&self, max: usize) -> Vec<Letter> {
        run_letters(self.backward.iter().map(|d| d.get()), self.backward.is_finite(), max)
    }
}

fn run_letters(runs: impl Iterator<Item = u64>, finite: bool, max: usize) -> Vec<Letter> {
    let runs: Vec<u64> = runs.take(max + 1).collect();
    let mut out = Vec::new();
    let mut letter = Letter::R;
    for (i, &n) in runs.iter().enumerate() {
        let n = if finite && i + 1 == runs.len() { n - 1 } else { n };
        out.extend(std::iter::repeat_n(letter, n as usize));
        if out.len() >= max {
            break;
        }
        letter = letter.flip();
    }
    out.truncate(max);
    out
}

fn prepend(head: u64, rest: &DigitSequence<RcfDigit>) -> Result<DigitSequence<RcfDigit>> {
    let mut pre = vec![RcfDigit::new(head)?];
    pre.extend_from_slice(rest.preperiod());
    Ok(DigitSequence::new(pre, rest.period().to_vec()))
}

fn to_u64(n: &BigInt) -> Result<u64> {
    n.to_u64().ok_or_else(|| Error::Overflow(format!("run {n}")))
}

pub fn cutting_sequence_from_rcf(g: &Geodesic) -> Result<CuttingSequence> {
    if !g.in_series_window() {
        return Err(Error::OutOfWindow);
    }
    let fwd = rcf_expand(&g.forward, RCF_BUDGET)?;
    let back = rcf_expand(&g.backward.try_recip()?.try_neg()?, RCF_BUDGET)?;
    Ok(CuttingSequence {
        n0: to_u64(&fwd.head)?,
        forward: fwd.digits,
        backward: prepend(to_u64(&back.head)?, &back.digits)?,
    })
}

/// The Lehner word of the forward endpoint and the Farey word of minus the
/// backward endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunWords {
    pub forward: DigitSequence<LehnerDigit>,
    pub backward: DigitSequence<FareyDigit>,
}

impl RunWords {
    /// The coded geodesic `(-<<backward>>, [[forward]])`.
    pub fn geodesic(&self) -> Result<Geodesic> {
        let x = self.forward.value()?;
        let y = self.backward.value()?;
        Geodesic::new(-&y, x)
    }
}

fn farey_blocks(runs: impl Iterator<Item = u64>) -> Vec<FareyDigit> {
    runs.flat_map(|n| {
        std::iter::once(FareyDigit::Dp11).chain(std::iter::repeat_n(FareyDigit::Dm12, n as usize - 1))
    })
    .collect()
}

pub fn theorem1_decode(cs: &CuttingSequence) -> Result<RunWords> {
    if cs.n0 == 0 {
        return Err(Error::InvalidRuns("n0 = 0".into()));
    }
    let forward = lehner_from_rcf(&BigInt::one(), &cs.forward)?;
    let (pre, per): (Vec<u64>, Vec<u64>) = (
        cs.backward.preperiod().iter().map(|d| d.get()).collect(),
        cs.backward.period().iter().map(|d| d.get()).collect(),
    );
    let mut pre = pre;
    let mut per = per;
    if pre.is_empty() {
        match per.first().copied() {
            Some(n) => {
                pre.push(n);
                per.rotate_left(1);
            }
            None => return Err(Error::InvalidRuns("no backward runs".into())),
        }
    }
    let n_minus_1 = pre[0];
    let mut head = vec![FareyDigit::Dp11];
    if cs.n0 == 1 && n_minus_1 == 1 {
        head.extend(farey_blocks(pre.iter().copied()));
    } else {
        head.extend(std::iter::repeat_n(FareyDigit::Dm12, n_minus_1 as usize));
        head.extend(farey_blocks(pre[1..].iter().copied()));
    }
    let backward = DigitSequence::new(head, farey_blocks(per.into_iter()));
    Ok(RunWords { forward, backward })
}

/// `(2,-1)` when a letter repeats the previous one, `(1,+1)` when it changes.
pub fn letter_coding_rule(prev: Letter, cur: Letter) -> LehnerDigit {
    if prev == cur {
        LehnerDigit::D21
    } else {
        LehnerDigit::D11
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedGeodesic {
    pub closed: bool,
    pub rho_period: usize,
    pub endpoints: (ExactReal, ExactReal),
}

/// Endpoints `([[period]], -<<dual period>>)` of the closed geodesic coded by a
/// purely periodic Lehner word.
pub fn periodic_endpoints(period: &[LehnerDigit]) -> Result<SPoint> {
    if period.is_empty() {
        return Err(Error::InvalidPeriod("empty".into()));
    }
    let seq = DigitSequence::new(Vec::new(), period.to_vec());
    if seq.period().len() != period.len() {
        return Err(Error::InvalidPeriod("not primitive".into()));
    }
    let x = seq.value()?;
    let v = DigitSequence::new(Vec::new(), dual_of_period(period)).value()?;
    SPoint::new(x, -&v).map_err(|_| Error::InvalidPeriod("endpoints leave the admissible set".into()))
}

pub fn period_sign(period: &[LehnerDigit]) -> Sign {
    period.iter().fold(Sign::Plus, |s, d| s * -d.sign())
}

/// The geodesic of a primitive period is closed; `rho_bar` returns to the
/// endpoint pair after `r` steps when the period sign is `+1`, else `2r`.
pub fn closed_geodesic_test(period: &[LehnerDigit]) -> Result<ClosedGeodesic> {
    let p = periodic_endpoints(period)?;
    let r = period.len();
    let expected = if period_sign(period) == Sign::Plus { r } else { 2 * r };
    let mut q = p.clone();
    let mut found = None;
    for k in 1..=2 * r {
        q = rho_bar(&q)?;
        if q == p {
            found = Some(k);
            break;
        }
    }
    match found {
        Some(k) if k == expected => Ok(ClosedGeodesic {
            closed: true,
            rho_period: k,
            endpoints: (p.x, p.y),
        }),
        other => Err(Error::InvalidPeriod(format!("returned after {other:?} steps, expected {expected}"))),
    }
}

/// `rho_bar^r` multiplies the endpoint pair by the period sign and
/// `rho_bar^{2r}` fixes it.
pub fn rho_period_check(period: &[LehnerDigit]) -> Result<bool> {
    let p = periodic_endpoints(period)?;
    let sign = period_sign(period);
    let mut q = p.clone();
    for _ in 0..period.len() {
        q = rho_bar(&q)?;
    }
    let scaled = q == SPoint {
        x: sign.apply(&p.x),
        y: sign.apply(&p.y),
    };
    for _ in 0..period.len() {
        q = rho_bar(&q)?;
    }
    Ok(scaled && q == p)
}

/// Compares the walker's letters from `(0, ∞)` with the runs read off the
/// RCF expansions, `max_letters` in each direction, after moving `g` into
/// the Series window.
pub fn walker_matches_rcf(g: &Geodesic, max_letters: usize) -> Result<bool> {
    let (win, _) = series_window(g)?;
    let cs = cutting_sequence_from_rcf(&win)?;
    let edge = Edge::new(Vertex::int(0), Vertex::infinity())?;
    let fwd = walk(&win, edge.clone(), max_letters)?;
    let back = walk(&win.reversed(), edge, max_letters)?;
    Ok(fwd.letters == cs.forward_letters(max_letters) && back.letters == cs.backward_letters(max_letters))
}

/// The bi-infinite run sequence repeating `pattern`, anchored at `n0 = pattern[0]`.
pub fn periodic_runs(pattern: &[u64]) -> Result<CuttingSequence> {
    let digits = |it: &mut dyn Iterator<Item = &u64>| it.map(|&n| RcfDigit::new(n)).collect::<Result<Vec<_>>>();
    let (&n0, rest) = pattern.split_first().ok_or_else(|| Error::InvalidRuns("empty pattern".into()))?;
    let forward = digits(&mut rest.iter().chain(std::iter::once(&n0)))?;
    let backward = digits(&mut pattern.iter().rev())?;
    Ok(CuttingSequence {
        n0,
        forward: DigitSequence::new(vec![], forward),
        backward: DigitSequence::new(vec![], backward),
    })
}

fn runs_follow(runs: &[usize], pattern: &[u64]) -> bool {
    let k = pattern.len();
    (0..k).any(|j| runs.iter().enumerate().all(|(i, &n)| n as u64 == pattern[(i + j) % k]))
}

/// Decodes the periodic run pattern, then walks the decoded geodesic both
/// ways and checks the runs it meets repeat the pattern in the right order.
pub fn decode_roundtrip(pattern: &[u64], max_letters: usize) -> Result<bool> {
    let words = theorem1_decode(&periodic_runs(pattern)?)?;
    let g = words.geodesic()?;
    let interior = |w: LetterWord| -> Vec<usize> {
        let runs: Vec<usize> = runs_of(&w.letters).into_iter().map(|(_, n)| n).collect();
        // the first and last runs may be cut off
        runs.get(1..runs.len().saturating_sub(1)).unwrap_or_default().to_vec()
    };
    let fwd = interior(cutting_sequence_geometric(&g, max_letters)?);
    let back = interior(cutting_sequence_geometric(&g.reversed(), max_letters)?);
    let reversed: Vec<u64> = pattern.iter().rev().copied().collect();
    Ok(g.in_a() && fwd.len() >= pattern.len() && runs_follow(&fwd, pattern) && runs_follow(&back, &reversed))
}

/// Every word over `1..=max_run` of length `1..=max_len`.
pub fn run_patterns(max_run: u64, max_len: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<u64>| {
                (1..=max_run).map(move |n| {
                    let mut v = w.clone();
                    v.push(n);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// A map in PSL(2,Z) sending 0 to the given cusp.
pub fn orbit_of_zero(x: &ExactReal) -> Result<UnimodularMap> {
    if x.is_infinite() {
        return UnimodularMap::new(1, 1, -1, 0);
    }
    let r = x.as_rational().ok_or_else(|| Error::InvalidNumber(format!("{x} is not a cusp")))?;
    let (p, q) = (r.numer().clone(), r.denom().clone());
    // a q - p c = 1 with 0 <= c < q
    let e = p.extended_gcd(&q);
    let c = (-&e.x * &e.gcd).mod_floor(&q);
    let a = (BigInt::one() + &p * &c) / &q;
    let m = IntMatrix { a, b: p, c, d: q };
    debug_assert!(m.det().is_one());
    UnimodularMap::try_from(m)
}
