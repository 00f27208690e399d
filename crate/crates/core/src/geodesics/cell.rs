//! Points where a geodesic enters and leaves the cell, and the hyperbolic
//! distance between them.

use astro_float::BigFloat;
use serde::Serialize;

use super::{pole_of, rho_real, Geodesic};
use crate::error::{Error, Result};
use crate::numeric::{bigfloat_to_f64, within, ExactReal, HighPrecision};

/// A point of the upper half-plane. Exact points store the real part and the
/// square of the imaginary part.
#[derive(Clone, Debug)]
pub enum UhpPoint {
    Exact { re: ExactReal, im_sq: ExactReal },
    Approx { re: BigFloat, im: BigFloat },
}

impl UhpPoint {
    pub fn approx(&self, hp: &HighPrecision) -> (BigFloat, BigFloat) {
        match self {
            UhpPoint::Exact { re, im_sq } => (hp.exact(re), hp.sqrt(&hp.exact(im_sq))),
            UhpPoint::Approx { re, im } => (re.clone(), im.clone()),
        }
    }

    /// The imaginary part when it is itself a rational or a surd.
    pub fn exact_im(&self) -> Option<ExactReal> {
        match self {
            UhpPoint::Exact { im_sq, .. } => im_sq.as_rational().and_then(|q| ExactReal::sqrt_of(q).ok()),
            UhpPoint::Approx { .. } => None,
        }
    }

    pub fn to_f64(&self, hp: &HighPrecision) -> (f64, f64) {
        let (re, im) = self.approx(hp);
        (bigfloat_to_f64(&re), bigfloat_to_f64(&im))
    }
}

#[derive(Clone, Debug)]
pub struct CellCrossing {
    /// Entry point, on the arc `sign * [1, 2]`.
    pub xi: UhpPoint,
    /// Exit point, on the arc `sign * [a0 + e0, 3/2]`.
    pub eta: UhpPoint,
}

/// Circle through `a`, `b` as `(centre, radius^2)`.
fn circle(a: &ExactReal, b: &ExactReal) -> Result<(ExactReal, ExactReal)> {
    let two = ExactReal::from(2);
    let c = a.try_add(b)?.try_div(&two)?;
    let h = a.try_sub(b)?.try_div(&two)?;
    Ok((c, h.try_mul(&h)?))
}

/// Upper intersection of two circles centred on the real axis, as `(x, y^2)`.
fn meet_exact(c1: &(ExactReal, ExactReal), c2: &(ExactReal, ExactReal)) -> Result<(ExactReal, ExactReal)> {
    let dc = c2.0.try_sub(&c1.0)?;
    if dc.is_zero() {
        return Err(Error::NoIntersection);
    }
    let num = c1.1.try_sub(&c2.1)?.try_add(&c2.0.try_mul(&c2.0)?)?.try_sub(&c1.0.try_mul(&c1.0)?)?;
    let x = num.try_div(&dc.try_add(&dc)?)?;
    let dx = x.try_sub(&c1.0)?;
    let y_sq = c1.1.try_sub(&dx.try_mul(&dx)?)?;
    if y_sq.signum() <= 0 {
        return Err(Error::NoIntersection);
    }
    Ok((x, y_sq))
}

fn meet_float(
    hp: &HighPrecision,
    c1: (&BigFloat, &BigFloat),
    c2: (&BigFloat, &BigFloat),
) -> Result<(BigFloat, BigFloat)> {
    let dc = hp.sub(c2.0, c1.0);
    let num = hp.add(&hp.sub(c1.1, c2.1), &hp.sub(&hp.mul(c2.0, c2.0), &hp.mul(c1.0, c1.0)));
    let x = hp.div(&num, &hp.add(&dc, &dc));
    let dx = hp.sub(&x, c1.0);
    let y_sq = hp.sub(c1.1, &hp.mul(&dx, &dx));
    if y_sq.is_negative() || y_sq.is_zero() {
        return Err(Error::NoIntersection);
    }
    Ok((x, hp.sqrt(&y_sq)))
}

/// The two arcs of the cell boundary met by a geodesic in the admissible set,
/// as exact circles.
fn cell_arcs(g: &Geodesic) -> Result<[(ExactReal, ExactReal); 2]> {
    if !g.in_a() {
        return Err(Error::NoIntersection);
    }
    let (e, d, _) = pole_of(&g.forward)?;
    let quarter = ExactReal::ratio(1, 4)?;
    let xi_arc = (e.apply(&ExactReal::ratio(3, 2)?), quarter.clone());
    // arc from a0 + e0 to 3/2
    let far = ExactReal::from(d.quotient() + d.sign().value());
    let mid = far.try_add(&ExactReal::ratio(3, 2)?)?.try_div(&ExactReal::from(2))?;
    let eta_arc = (e.apply(&mid), ExactReal::ratio(1, 16)?);
    Ok([xi_arc, eta_arc])
}

pub fn xi_eta(g: &Geodesic, hp: &HighPrecision) -> Result<CellCrossing> {
    if g.forward.is_infinite() || g.backward.is_infinite() {
        return Err(Error::NoIntersection);
    }
    let [xi_arc, eta_arc] = cell_arcs(g)?;
    match circle(&g.backward, &g.forward) {
        Ok(geo) => {
            let (x1, s1) = meet_exact(&geo, &xi_arc)?;
            let (x2, s2) = meet_exact(&geo, &eta_arc)?;
            Ok(CellCrossing {
                xi: UhpPoint::Exact { re: x1, im_sq: s1 },
                eta: UhpPoint::Exact { re: x2, im_sq: s2 },
            })
        }
        Err(Error::MixedFields(..)) => {
            let (b, f) = (hp.exact(&g.backward), hp.exact(&g.forward));
            let two = hp.exact(&ExactReal::from(2));
            let c = hp.div(&hp.add(&b, &f), &two);
            let h = hp.div(&hp.sub(&f, &b), &two);
            let r2 = hp.mul(&h, &h);
            let arc = |a: &(ExactReal, ExactReal)| (hp.exact(&a.0), hp.exact(&a.1));
            let (xa, xr) = arc(&xi_arc);
            let (ea, er) = arc(&eta_arc);
            let (x1, y1) = meet_float(hp, (&c, &r2), (&xa, &xr))?;
            let (x2, y2) = meet_float(hp, (&c, &r2), (&ea, &er))?;
            Ok(CellCrossing {
                xi: UhpPoint::Approx { re: x1, im: y1 },
                eta: UhpPoint::Approx { re: x2, im: y2 },
            })
        }
        Err(e) => Err(e),
    }
}

/// `1 / (e a0 - z)` on the upper half-plane, `e a0` read off `forward`.
pub fn rho_point(z: &UhpPoint, forward: &ExactReal, hp: &HighPrecision) -> Result<UhpPoint> {
    let (_, _, k) = pole_of(forward)?;
    match z {
        UhpPoint::Exact { re, im_sq } => {
            let u = k.try_sub(re)?;
            let den = u.try_mul(&u)?.try_add(im_sq)?;
            Ok(UhpPoint::Exact {
                re: u.try_div(&den)?,
                im_sq: im_sq.try_div(&den.try_mul(&den)?)?,
            })
        }
        UhpPoint::Approx { re, im } => {
            let u = hp.sub(&hp.exact(&k), re);
            let den = hp.add(&hp.mul(&u, &u), &hp.mul(im, im));
            Ok(UhpPoint::Approx {
                re: hp.div(&u, &den),
                im: hp.div(im, &den),
            })
        }
    }
}

/// `arcosh(1 + |z1 - z2|^2 / (2 Im z1 Im z2))`.
pub fn distance(z1: &UhpPoint, z2: &UhpPoint, hp: &HighPrecision) -> BigFloat {
    let one = hp.exact(&ExactReal::one());
    let two = hp.exact(&ExactReal::from(2));
    if let (UhpPoint::Exact { re: x1, im_sq: s1 }, UhpPoint::Exact { re: x2, im_sq: s2 }) = (z1, z2) {
        // (dx^2 + y1^2 + y2^2) / (2 y1 y2), the numerator exactly
        let exact = x1
            .try_sub(x2)
            .and_then(|dx| dx.try_mul(&dx))
            .and_then(|v| v.try_add(s1))
            .and_then(|v| v.try_add(s2))
            .and_then(|num| Ok((num, s1.try_mul(s2)?)));
        if let Ok((num, prod)) = exact {
            let arg = hp.div(&hp.exact(&num), &hp.mul(&two, &hp.sqrt(&hp.exact(&prod))));
            return hp.acosh(&arg);
        }
    }
    let (x1, y1) = z1.approx(hp);
    let (x2, y2) = z2.approx(hp);
    let dx = hp.sub(&x1, &x2);
    let dy = hp.sub(&y1, &y2);
    let sq = hp.add(&hp.mul(&dx, &dx), &hp.mul(&dy, &dy));
    hp.acosh(&hp.add(&one, &hp.div(&sq, &hp.mul(&two, &hp.mul(&y1, &y2)))))
}

/// Hyperbolic length of the geodesic segment inside the cell.
pub fn return_time(g: &Geodesic, hp: &HighPrecision) -> Result<BigFloat> {
    let c = xi_eta(g, hp)?;
    Ok(distance(&c.xi, &c.eta, hp))
}

/// The closed form for `Re rho(eta)` next to the value computed from the
/// intersection point.
#[derive(Clone, Debug)]
pub struct ReRhoEta {
    pub closed_form: BigFloat,
    pub from_intersection: BigFloat,
    /// Both sides were computed exactly and are equal.
    pub exact_match: bool,
    pub within_tolerance: bool,
}

pub fn re_rho_eta(g: &Geodesic, hp: &HighPrecision) -> Result<ReRhoEta> {
    let c = xi_eta(g, hp)?;
    let r_eta = rho_point(&c.eta, &g.forward, hp)?;
    let u = rho_real(&g.forward, &g.forward)?;
    let v = rho_real(&g.backward, &g.forward)?;
    let s = ExactReal::from(3 * i64::from(u.signum()));
    let closed_exact = ExactReal::from(2)
        .try_sub(&u.try_mul(&v).unwrap_or(ExactReal::zero()))
        .and_then(|num| Ok((num, s.try_sub(&u)?.try_sub(&v)?)))
        .and_then(|(num, den)| {
            u.try_mul(&v)?;
            num.try_div(&den)
        });
    let tol = hp.pow2(-80);
    let from_intersection = match &r_eta {
        UhpPoint::Exact { re, .. } => hp.exact(re),
        UhpPoint::Approx { re, .. } => re.clone(),
    };
    let (closed_form, exact_match) = match (&closed_exact, &r_eta) {
        (Ok(cf), UhpPoint::Exact { re, .. }) => (hp.exact(cf), cf == re),
        (Ok(cf), _) => (hp.exact(cf), false),
        (Err(_), _) => {
            let (uf, vf) = (hp.exact(&u), hp.exact(&v));
            let num = hp.sub(&hp.exact(&ExactReal::from(2)), &hp.mul(&uf, &vf));
            let den = hp.sub(&hp.sub(&hp.exact(&s), &uf), &vf);
            (hp.div(&num, &den), false)
        }
    };
    let within_tolerance = exact_match || within(&closed_form, &from_intersection, &tol);
    Ok(ReRhoEta {
        closed_form,
        from_intersection,
        exact_match,
        within_tolerance,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LogFormulaReport {
    pub formula: f64,
    pub return_time: f64,
    pub difference: f64,
}

/// Sign of the first Lehner digit of `|z|`, defined for `|z|` in `[1, 2)`.
fn first_sign(z: &ExactReal) -> Result<i64> {
    let abs = if z.signum() < 0 { -z } else { z.clone() };
    pole_of(&abs)
        .map(|(_, d, _)| d.sign().value())
        .map_err(|_| Error::FormulaUndefined(format!("|{z}| is outside [1, 2)")))
}

/// Evaluates the logarithmic closed form for the return time as printed,
/// for comparison only.
pub fn eval_eq7_formula(g: &Geodesic, hp: &HighPrecision) -> Result<LogFormulaReport> {
    let rt = return_time(g, hp)?;
    let eps = i64::from(g.forward.signum());
    let (e_fwd, e_back) = (first_sign(&g.forward)?, first_sign(&g.backward)?);
    let rf = hp.exact(&rho_real(&g.forward, &g.forward)?);
    let rb = hp.exact(&rho_real(&g.backward, &g.forward)?);
    let int = |n: i64| hp.exact(&ExactReal::from(n));
    let one = int(1);
    let num = hp.mul(
        &hp.mul(&hp.add(&rf, &int(eps * e_fwd)), &hp.add(&rf, &int(2 * eps * e_fwd))),
        &hp.sub(&one, &rb),
    );
    let den = hp.mul(
        &hp.mul(&hp.add(&rb, &int(eps * e_back)), &hp.add(&rb, &int(2 * eps * e_back))),
        &hp.sub(&one, &rf),
    );
    let ratio = hp.div(&num, &den);
    if ratio.is_negative() || ratio.is_zero() {
        return Err(Error::FormulaUndefined("logarithm of a nonpositive ratio".into()));
    }
    let value = hp.div(&hp.ln(&ratio), &int(2));
    let (formula, return_time) = (bigfloat_to_f64(&value), bigfloat_to_f64(&rt));
    Ok(LogFormulaReport {
        formula,
        return_time,
        difference: formula - return_time,
    })
}
