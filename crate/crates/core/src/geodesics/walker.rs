//! Walking the Farey tessellation along a geodesic, one ideal triangle at a time.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Geodesic;
use crate::error::{Error, Result};
use crate::numeric::{ExactReal, UnimodularMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    L,
    R,
}

impl Letter {
    pub fn flip(self) -> Self {
        match self {
            Letter::L => Letter::R,
            Letter::R => Letter::L,
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'L' => Some(Letter::L),
            'R' => Some(Letter::R),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Letter::L => "L",
            Letter::R => "R",
        })
    }
}

pub fn letters_to_string(ls: &[Letter]) -> String {
    ls.iter().map(Letter::to_string).collect()
}

/// Run lengths of a letter word, with the letter of the first run.
pub fn runs_of(ls: &[Letter]) -> Vec<(Letter, usize)> {
    let mut out: Vec<(Letter, usize)> = Vec::new();
    for &l in ls {
        match out.last_mut() {
            Some((prev, n)) if *prev == l => *n += 1,
            _ => out.push((l, 1)),
        }
    }
    out
}

/// A cusp `p/q` in lowest terms with `q >= 0`; `∞` is `1/0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub p: BigInt,
    pub q: BigInt,
}

impl Vertex {
    pub fn new(p: BigInt, q: BigInt) -> Result<Self> {
        let g = p.gcd(&q);
        if g.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (mut p, mut q) = (p / &g, q / &g);
        if q.is_negative() || (q.is_zero() && p.is_negative()) {
            p = -p;
            q = -q;
        }
        Ok(Vertex { p, q })
    }

    pub fn int(n: i64) -> Self {
        Vertex {
            p: n.into(),
            q: BigInt::one(),
        }
    }

    pub fn infinity() -> Self {
        Vertex {
            p: BigInt::one(),
            q: BigInt::zero(),
        }
    }

    pub fn from_exact(x: &ExactReal) -> Option<Self> {
        if x.is_infinite() {
            return Some(Self::infinity());
        }
        let r = x.as_rational()?;
        Some(Vertex {
            p: r.numer().clone(),
            q: r.denom().clone(),
        })
    }

    pub fn value(&self) -> ExactReal {
        if self.q.is_zero() {
            ExactReal::Infinity
        } else {
            ExactReal::ratio(self.p.clone(), self.q.clone()).expect("q > 0")
        }
    }

    pub(crate) fn cross(&self, other: &Vertex) -> BigInt {
        &self.p * &other.q - &self.q * &other.p
    }

    pub fn is_neighbour(&self, other: &Vertex) -> bool {
        self.cross(other).abs().is_one()
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// An edge of the tessellation: two neighbouring cusps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge(pub Vertex, pub Vertex);

impl Edge {
    pub fn new(a: Vertex, b: Vertex) -> Result<Self> {
        if !a.is_neighbour(&b) {
            return Err(Error::DegenerateEndpoints(format!("{a} and {b} are not Farey neighbours")));
        }
        Ok(Edge(a, b))
    }

    /// The map in PSL(2,Z) sending this edge to `(0, ∞)`.
    pub fn normalising_map(&self) -> UnimodularMap {
        let (a, b) = if self.0.cross(&self.1).is_positive() {
            (&self.0, &self.1)
        } else {
            (&self.1, &self.0)
        };
        // [[a.p, b.p], [a.q, b.q]] sends ∞ to a and 0 to b
        let m = crate::numeric::IntMatrix {
            a: a.p.clone(),
            b: b.p.clone(),
            c: a.q.clone(),
            d: b.q.clone(),
        };
        UnimodularMap::try_from(m).expect("neighbours").inverse()
    }

    /// `+1` or `-1` for the two sides of the edge, `0` at its endpoints.
    pub fn side(&self, x: &ExactReal) -> i32 {
        side(&self.0, &self.1, x)
    }

    pub fn crossed_by(&self, g: &Geodesic) -> bool {
        let (s, t) = (self.side(&g.backward), self.side(&g.forward));
        s != 0 && t != 0 && s != t
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// Sign of `(a.q x - a.p) / (b.q x - b.p)`: which arc cut out by `a`, `b` holds `x`.
fn side(a: &Vertex, b: &Vertex, x: &ExactReal) -> i32 {
    let lin = |v: &Vertex| -> i32 {
        if x.is_infinite() {
            return if v.q.is_zero() { 0 } else { 1 };
        }
        let t = ExactReal::integer(v.q.clone())
            .try_mul(x)
            .and_then(|t| t.try_sub(&ExactReal::integer(v.p.clone())))
            .expect("finite");
        t.signum()
    };
    lin(a) * lin(b)
}

/// `R` when the shared vertex lies outside the span of the endpoints of a
/// left-to-right geodesic, mirrored for right-to-left ones.
fn letter_for(g: &Geodesic, v: &Vertex) -> Letter {
    let (u, w) = (&g.backward, &g.forward);
    let value = v.value();
    let (lo, hi) = if u < w { (u, w) } else { (w, u) };
    let outside = value.is_infinite() || &value < lo || &value > hi;
    if outside ^ (u > w) {
        Letter::R
    } else {
        Letter::L
    }
}

/// Iterates the letters met by a geodesic after it crosses a starting edge.
#[derive(Clone, Debug)]
pub struct FareyWalker {
    geodesic: Geodesic,
    edge: Edge,
    at_cusp: bool,
}

impl FareyWalker {
    pub fn new(geodesic: Geodesic, edge: Edge) -> Result<Self> {
        if !edge.crossed_by(&geodesic) {
            return Err(Error::NoIntersection);
        }
        Ok(FareyWalker {
            geodesic,
            edge,
            at_cusp: false,
        })
    }

    pub fn edge(&self) -> &Edge {
        &self.edge
    }

    /// True once the geodesic has run into its forward cusp.
    pub fn at_cusp(&self) -> bool {
        self.at_cusp
    }
}

impl Iterator for FareyWalker {
    type Item = Letter;

    fn next(&mut self) -> Option<Letter> {
        if self.at_cusp {
            return None;
        }
        let w = &self.geodesic.forward;
        let Edge(a, b) = &self.edge;
        let ahead = self.edge.side(w);
        let v = [
            Vertex::new(&a.p + &b.p, &a.q + &b.q),
            Vertex::new(&a.p - &b.p, &a.q - &b.q),
        ]
        .into_iter()
        .flatten()
        .find(|v| self.edge.side(&v.value()) == ahead)
        .expect("one apex on each side");
        if &v.value() == w {
            self.at_cusp = true;
            return None;
        }
        let (shared, next) = if side(a, &v, w) != side(a, &v, &b.value()) {
            (a.clone(), Edge(a.clone(), v))
        } else {
            (b.clone(), Edge(v, b.clone()))
        };
        self.edge = next;
        Some(letter_for(&self.geodesic, &shared))
    }
}

fn vertex_between(lo: &Vertex, hi: &Vertex) -> Vertex {
    Vertex::new(&lo.p + &hi.p, &lo.q + &hi.q).expect("mediant")
}

/// A tessellation edge crossed by `g`, found by Stern-Brocot descent toward
/// the forward endpoint.
pub fn default_edge(g: &Geodesic) -> Result<Edge> {
    if let (Some(a), Some(b)) = (Vertex::from_exact(&g.backward), Vertex::from_exact(&g.forward)) {
        if a.is_neighbour(&b) {
            return Err(Error::ExcludedGeodesic);
        }
    }
    let (u, w) = (&g.backward, &g.forward);
    // a vertical edge between the endpoints
    if !u.is_infinite() && !w.is_infinite() {
        let k = if u < w {
            let f = w.floor()?;
            if &ExactReal::integer(f.clone()) == w { f - 1 } else { f }
        } else {
            w.floor()? + 1
        };
        let kv = ExactReal::integer(k.clone());
        if (u < &kv && &kv < w) || (w < &kv && &kv < u) {
            return Edge::new(Vertex { p: k, q: BigInt::one() }, Vertex::infinity());
        }
    }
    let finite = if w.is_infinite() { u } else { w };
    let n = finite.floor()?;
    let n = if &ExactReal::integer(n.clone()) == finite && !w.is_infinite() && u < w {
        n - 1
    } else {
        n
    };
    let mut lo = Vertex { p: n.clone(), q: BigInt::one() };
    let mut hi = Vertex { p: n + 1, q: BigInt::one() };
    for _ in 0..10_000 {
        let e = Edge(lo.clone(), hi.clone());
        if e.crossed_by(g) {
            return Ok(e);
        }
        let m = vertex_between(&lo, &hi);
        let mv = m.value();
        let target = if w.is_infinite() || e.side(w) == 0 { u } else { w };
        if target < &mv {
            hi = m;
        } else {
            lo = m;
        }
    }
    Err(Error::NoIntersection)
}

/// Letters along `g` from a starting edge, at most `max_letters`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterWord {
    pub letters: Vec<Letter>,
    pub ended_at_cusp: bool,
}

pub fn walk(g: &Geodesic, edge: Edge, max_letters: usize) -> Result<LetterWord> {
    let mut walker = FareyWalker::new(g.clone(), edge)?;
    let letters: Vec<Letter> = walker.by_ref().take(max_letters).collect();
    Ok(LetterWord {
        letters,
        ended_at_cusp: walker.at_cusp(),
    })
}

pub fn cutting_sequence_geometric(g: &Geodesic, max_letters: usize) -> Result<LetterWord> {
    walk(g, default_edge(g)?, max_letters)
}
