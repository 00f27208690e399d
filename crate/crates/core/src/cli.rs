//! Command-line front end: expansions, conversions, geodesic coding and
//! seeded verification sweeps, each producing a [`CommandResult`].

use std::fmt;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cf_core::{rcf_expand, DigitSequence, RcfDigit, RcfExpansion, Sign};
use crate::dual_mobius::{fstar_expand, invariance_check_1pxy, transfer_check_fstar};
use crate::error::{Error, Result};
use crate::farey_cf::{self, farey_expand, farey_from_rcf};
use crate::geodesics::{
    commute_check, cutting_sequence_from_rcf, cutting_sequence_geometric, closed_geodesic_test,
    eval_eq7_formula, letters_to_string, lift_to_a, re_rho_eta, return_time, rho_period_check,
    run_patterns, series_window, theorem1_decode, decode_roundtrip, xi_eta, Geodesic, SPoint, UhpPoint,
};
use crate::lehner::{self, lehner_expand, lehner_from_rcf, LehnerDigit};
use crate::natext::{jacobian_invariance_check, OmegaPoint};
use crate::numeric::{bigfloat_to_f64, default_precision, small, ExactReal, HighPrecision};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<String>,
}

impl CommandResult {
    pub fn ok(payload: Value, diagnostics: Vec<String>) -> Self {
        CommandResult {
            status: Status::Ok,
            payload,
            diagnostics,
        }
    }

    pub fn failed(payload: Value, mut diagnostics: Vec<String>) -> Self {
        if diagnostics.is_empty() {
            diagnostics.push("command failed".into());
        }
        CommandResult {
            status: Status::Error,
            payload,
            diagnostics,
        }
    }

    pub fn from_error(e: &Error) -> Self {
        Self::failed(json!({ "error": error_kind(e) }), vec![e.to_string()])
    }

    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("values are plain JSON")
    }

    pub fn from_json_str(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

impl fmt::Display for CommandResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.is_ok() { "ok" } else { "error" };
        writeln!(f, "status: {status}")?;
        if !self.payload.is_null() {
            writeln!(f, "{}", serde_json::to_string_pretty(&self.payload).map_err(|_| fmt::Error)?)?;
        }
        for d in &self.diagnostics {
            writeln!(f, "note: {d}")?;
        }
        Ok(())
    }
}

/// The variant name of an error, e.g. `ExcludedGeodesic`.
pub fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

fn wrap(r: Result<CommandResult>) -> CommandResult {
    r.unwrap_or_else(|e| CommandResult::from_error(&e))
}

#[derive(Parser, Debug)]
#[command(name = "modflow", version, about = "Lehner and Farey continued fractions and modular geodesics")]
pub struct Cli {
    /// Print the full result as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Expand a number in one of the digit systems.
    Expand {
        #[arg(long, value_enum)]
        system: System,
        #[arg(long, allow_hyphen_values = true)]
        value: String,
        #[arg(long, default_value_t = 1000)]
        max_digits: usize,
    },
    /// Convert an RCF expansion into Lehner or Farey digits.
    Convert(ConvertArgs),
    /// Lift, code and measure a geodesic.
    Geodesic {
        #[arg(long, allow_hyphen_values = true)]
        backward: String,
        #[arg(long, allow_hyphen_values = true)]
        forward: String,
        #[arg(long, default_value_t = 40)]
        letters: usize,
    },
    /// Run a seeded verification sweep.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ConvertArgs {
    #[arg(long, value_enum, default_value_t = Source::Rcf)]
    pub from: Source,
    #[arg(long, value_enum)]
    pub to: Target,
    /// RCF digits as `head;n1,n2,...`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "value", required_unless_present = "value")]
    pub rcf: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub value: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub max_digits: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum System {
    Rcf,
    Lehner,
    Farey,
    Fstar,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Rcf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Lehner,
    Farey,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Transfer,
    Natext,
    Commute,
    Theorem1,
    Closed,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Transfer, Suite::Natext, Suite::Commute, Suite::Theorem1, Suite::Closed];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Transfer => "transfer",
            Suite::Natext => "natext",
            Suite::Commute => "commute",
            Suite::Theorem1 => "theorem1",
            Suite::Closed => "closed",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

pub fn run(cmd: &Command) -> CommandResult {
    match cmd {
        Command::Expand {
            system,
            value,
            max_digits,
        } => cmd_expand(*system, value, *max_digits),
        Command::Convert(a) => match (&a.rcf, &a.value) {
            (Some(rcf), _) => cmd_convert(a.to, ConvertInput::Rcf(rcf), a.max_digits),
            (None, Some(v)) => cmd_convert(a.to, ConvertInput::Value(v), a.max_digits),
            (None, None) => CommandResult::failed(Value::Null, vec!["one of --rcf or --value is required".into()]),
        },
        Command::Geodesic {
            backward,
            forward,
            letters,
        } => cmd_geodesic(backward, forward, *letters),
        Command::Verify { suite, samples, seed } => match Suite::parse(suite) {
            Ok(s) => cmd_verify(s, *samples, *seed),
            Err(e) => CommandResult::from_error(&e),
        },
    }
}

fn parse_value(text: &str) -> Result<ExactReal> {
    text.parse()
}

fn rcf_json(e: &RcfExpansion) -> Result<Value> {
    Ok(serde_json::to_value(e.digits.to_json(Some(small(&e.head)?))).expect("plain JSON"))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("plain JSON")
}

pub fn cmd_expand(system: System, value: &str, max_digits: usize) -> CommandResult {
    wrap((|| {
        let x = parse_value(value)?;
        let mut extra = serde_json::Map::new();
        let (expansion, back) = match system {
            System::Rcf => {
                let e = rcf_expand(&x, max_digits)?;
                (rcf_json(&e)?, e.value()?)
            }
            System::Lehner => {
                let e = lehner_expand(&x, max_digits)?;
                (to_value(&e.to_json(None)), e.value()?)
            }
            System::Farey => {
                let e = farey_expand(&x, max_digits)?;
                (to_value(&e.to_json(None)), e.value()?)
            }
            System::Fstar => {
                let e = fstar_expand(&x, max_digits)?;
                extra.insert("hit_boundary".into(), Value::from(e.hit_boundary));
                (to_value(&e.digits.to_json(None)), e.digits.value()?)
            }
        };
        let round_trip = back == x;
        let mut payload = json!({
            "input": x.to_string(),
            "expansion": expansion,
            "reconstructed": back.to_string(),
            "round_trip": round_trip,
        });
        payload.as_object_mut().expect("object").extend(extra);
        Ok(if round_trip {
            CommandResult::ok(payload, vec![])
        } else {
            CommandResult::failed(payload, vec![format!("expansion evaluates to {back}, not {x}")])
        })
    })())
}

/// Parses `head;n1,n2,...`. A trailing `...` repeats the listed digits;
/// a parenthesised tail such as `0;1,(2,3)` marks the period explicitly.
pub fn parse_rcf(text: &str) -> Result<RcfExpansion> {
    let bad = |msg: &str| Error::InvalidNumber(format!("{text:?}: {msg}"));
    let (head, rest) = text.split_once(';').unwrap_or((text, ""));
    let head: BigInt = head.trim().parse().map_err(|_| bad("head is not an integer"))?;
    let rest = rest.trim();
    let (body, repeat_all) = match rest.strip_suffix("...") {
        Some(b) => (b.trim().trim_end_matches(',').trim(), true),
        None => (rest, false),
    };
    let (pre_text, per_text) = match body.find('(') {
        Some(i) if !repeat_all => {
            let per = body[i + 1..].strip_suffix(')').ok_or_else(|| bad("unclosed period"))?;
            (body[..i].trim().trim_end_matches(','), per)
        }
        Some(_) => return Err(bad("use either (...) or a trailing ...")),
        None if repeat_all => ("", body),
        None => (body, ""),
    };
    let digits = |s: &str| -> Result<Vec<RcfDigit>> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                let n: u64 = t.parse().map_err(|_| bad("digits must be positive integers"))?;
                RcfDigit::new(n)
            })
            .collect()
    };
    let (pre, per) = (digits(pre_text)?, digits(per_text)?);
    if (repeat_all || body.contains('(')) && per.is_empty() {
        return Err(bad("empty period"));
    }
    Ok(RcfExpansion {
        head,
        digits: DigitSequence::new(pre, per),
    })
}

pub enum ConvertInput<'a> {
    Rcf(&'a str),
    Value(&'a str),
}

pub fn cmd_convert(to: Target, input: ConvertInput<'_>, max_digits: usize) -> CommandResult {
    wrap((|| {
        let (rcf, sign, value) = match input {
            ConvertInput::Rcf(text) => {
                let e = parse_rcf(text)?;
                let v = e.value()?;
                (e, Sign::Plus, v)
            }
            ConvertInput::Value(text) => {
                let x = parse_value(text)?;
                let (sign, abs) = if x.signum() < 0 { (Sign::Minus, -&x) } else { (Sign::Plus, x.clone()) };
                (rcf_expand(&abs, max_digits)?, sign, x)
            }
        };
        let (converted, direct) = match to {
            Target::Lehner => {
                if sign == Sign::Minus {
                    return Err(Error::OutOfDomain(value.to_string()));
                }
                let w = lehner_from_rcf(&rcf.head, &rcf.digits)?;
                let direct = lehner_expand(&value, max_digits).map(|d| (d == w, to_value(&d.to_json(None))));
                (to_value(&w.to_json(None)), direct)
            }
            Target::Farey => {
                let w = farey_from_rcf(sign, &rcf.head, &rcf.digits)?;
                let direct = farey_expand(&value, max_digits).map(|d| (d == w, to_value(&d.to_json(None))));
                (to_value(&w.to_json(None)), direct)
            }
        };
        let mut diagnostics = Vec::new();
        let (agrees, direct) = match direct {
            Ok((a, d)) => (Value::from(a), d),
            Err(e) => {
                diagnostics.push(format!("direct expansion unavailable: {e}"));
                (Value::Null, Value::Null)
            }
        };
        let payload = json!({
            "value": value.to_string(),
            "rcf": rcf_json(&rcf)?,
            "converted": converted,
            "direct": direct,
            "agrees": agrees,
        });
        Ok(if agrees == Value::Bool(false) {
            diagnostics.push("converted word differs from the direct expansion".into());
            CommandResult::failed(payload, diagnostics)
        } else {
            CommandResult::ok(payload, diagnostics)
        })
    })())
}

fn point_json(z: &UhpPoint, hp: &HighPrecision) -> Value {
    let (re, im) = z.to_f64(hp);
    match z {
        UhpPoint::Exact { re: x, im_sq } => json!({
            "re": x.to_string(),
            "im_sq": im_sq.to_string(),
            "im": z.exact_im().map(|v| v.to_string()),
            "approx": [re, im],
        }),
        UhpPoint::Approx { .. } => json!({ "approx": [re, im] }),
    }
}

pub fn cmd_geodesic(backward: &str, forward: &str, letters: usize) -> CommandResult {
    wrap((|| {
        let g = Geodesic::new(parse_value(backward)?, parse_value(forward)?)?;
        let (lift, h) = lift_to_a(&g)?;
        let (win, wmap) = series_window(&g)?;
        let cs = cutting_sequence_from_rcf(&win)?;
        let walked = cutting_sequence_geometric(&g, letters)?;
        let words = theorem1_decode(&cs)?;
        let hp = HighPrecision::new(default_precision());
        let mut diagnostics = Vec::new();
        let mut note = |what: &str, e: Error| {
            diagnostics.push(format!("{what}: {e}"));
            Value::Null
        };
        let decoded = match words.geodesic() {
            Ok(d) => to_value(&d),
            Err(e) => note("decoded geodesic", e),
        };
        let cell = match xi_eta(&lift, &hp) {
            Ok(c) => json!({ "xi": point_json(&c.xi, &hp), "eta": point_json(&c.eta, &hp) }),
            Err(e) => note("cell crossing", e),
        };
        let rt = match return_time(&lift, &hp) {
            Ok(t) => Value::from(bigfloat_to_f64(&t)),
            Err(e) => note("return time", e),
        };
        let rre = match re_rho_eta(&lift, &hp) {
            Ok(r) => json!({
                "closed_form": bigfloat_to_f64(&r.closed_form),
                "from_intersection": bigfloat_to_f64(&r.from_intersection),
                "exact_match": r.exact_match,
                "within_tolerance": r.within_tolerance,
            }),
            Err(e) => note("re rho(eta)", e),
        };
        let log_formula = match eval_eq7_formula(&lift, &hp) {
            Ok(r) => to_value(&r),
            Err(e) => note("logarithmic return-time formula (report only)", e),
        };
        let payload = json!({
            "geodesic": to_value(&g),
            "lift": { "geodesic": to_value(&lift), "map": to_value(&h) },
            "series_window": { "geodesic": to_value(&win), "map": to_value(&wmap) },
            "runs": to_value(&cs.to_json()),
            "letters": {
                "forward": letters_to_string(&cs.forward_letters(letters)),
                "backward": letters_to_string(&cs.backward_letters(letters)),
                "walker": letters_to_string(&walked.letters),
                "ended_at_cusp": walked.ended_at_cusp,
            },
            "decoded_words": {
                "forward": to_value(&words.forward.to_json(None)),
                "backward": to_value(&words.backward.to_json(None)),
                "geodesic": decoded,
            },
            "cell": cell,
            "return_time": rt,
            "re_rho_eta": rre,
            "log_formula_report": log_formula,
        });
        Ok(CommandResult::ok(payload, diagnostics))
    })())
}

/// A uniformly chosen rational in the open interval `(lo, hi)` with
/// denominator at most `max_den`.
pub fn rational_in(rng: &mut impl Rng, lo: (i64, i64), hi: (i64, i64), max_den: i64) -> ExactReal {
    loop {
        let q = rng.gen_range(1..=max_den);
        // lo.0/lo.1 < p/q < hi.0/hi.1
        let p_min = (lo.0 * q).div_euclid(lo.1) + 1;
        let p_max = -((-hi.0 * q).div_euclid(hi.1)) - 1;
        if p_min <= p_max {
            let p = rng.gen_range(p_min..=p_max);
            return ExactReal::ratio(p, q).expect("q > 0");
        }
    }
}

/// A quadratic surd `(p + s sqrt d)/r` with small coefficients.
pub fn random_surd(rng: &mut impl Rng) -> ExactReal {
    const FIELDS: [i64; 8] = [2, 3, 5, 6, 7, 10, 11, 13];
    let d = *FIELDS.choose(rng).expect("nonempty");
    let p = rng.gen_range(-9..=9);
    let s = *[-3i64, -2, -1, 1, 2, 3].choose(rng).expect("nonempty");
    let r = rng.gen_range(1..=7);
    ExactReal::surd(p, s, d, r).expect("r > 0, d not a square")
}

/// Tally of one property over its samples. Points where a map leaves its
/// domain are counted separately from failures.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct Tally {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub first_counterexample: Option<String>,
    pub first_skip: Option<String>,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally {
            name: name.to_string(),
            ..Default::default()
        }
    }

    fn record(&mut self, input: impl fmt::Display, outcome: Result<bool>) {
        match outcome {
            Ok(true) => self.passed += 1,
            Err(Error::OutOfDomain(why)) => {
                self.skipped += 1;
                self.first_skip.get_or_insert_with(|| format!("{input}: leaves the domain at {why}"));
            }
            Ok(false) => {
                self.failed += 1;
                self.first_counterexample.get_or_insert_with(|| input.to_string());
            }
            Err(e) => {
                self.failed += 1;
                self.first_counterexample.get_or_insert_with(|| format!("{input}: {e}"));
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0 && self.passed > 0
    }
}

fn pair(x: &ExactReal, y: &ExactReal) -> String {
    format!("({x}, {y})")
}

fn suite_transfer(rng: &mut ChaCha8Rng, n: usize) -> Vec<Tally> {
    let mut t = [Tally::new("lehner 1/(x-1)"), Tally::new("farey 1/((x+1)(x+2))"), Tally::new("fstar 1/(x(1-x))")];
    for _ in 0..n {
        let x = rational_in(rng, (1, 1), (2, 1), 1000);
        t[0].record(&x, lehner::transfer_check(&x));
        let x = rational_in(rng, (-1, 1), (20, 1), 1000);
        t[1].record(&x, farey_cf::transfer_check(&x));
        let x = rational_in(rng, (1, 2), (1, 1), 1000);
        t[2].record(&x, transfer_check_fstar(&x));
    }
    t.into()
}

fn suite_natext(rng: &mut ChaCha8Rng, n: usize) -> Vec<Tally> {
    let mut t = [Tally::new("lehner extension 1/(x+y)^2"), Tally::new("fbar 1/(1+xy)^2")];
    for _ in 0..n {
        let (x, y) = (rational_in(rng, (1, 1), (2, 1), 1000), rational_in(rng, (-1, 1), (20, 1), 1000));
        t[0].record(pair(&x, &y), jacobian_invariance_check(&OmegaPoint::new(x.clone(), y.clone())));
        let (x, y) = (rational_in(rng, (1, 2), (1, 1), 1000), rational_in(rng, (-1, 1), (20, 1), 1000));
        t[1].record(pair(&x, &y), invariance_check_1pxy(&x, &y));
    }
    t.into()
}

/// Surd points of the admissible set checked alongside the random ones.
pub const COMMUTE_WITNESSES: [(&str, &str); 4] = [
    ("sqrt(2)", "-sqrt(2)"),
    ("-sqrt(2)", "sqrt(2)"),
    ("1+sqrt(2)/2", "1-sqrt(2)/2"),
    ("(1+sqrt(5))/2", "(1-sqrt(5))/2"),
];

fn suite_commute(rng: &mut ChaCha8Rng, n: usize) -> Vec<Tally> {
    let mut t = Tally::new("J rho_bar = L~ J");
    // points whose image leaves the admissible set are replaced, so that
    // `n` points are actually checked
    let mut i = 0;
    while t.passed + t.failed < n && i < 2 * n + 100 {
        i += 1;
        let (x, y) = if i % 2 == 0 {
            (rational_in(rng, (1, 1), (2, 1), 1000), rational_in(rng, (-20, 1), (1, 1), 1000))
        } else {
            (rational_in(rng, (-2, 1), (-1, 1), 1000), rational_in(rng, (-1, 1), (20, 1), 1000))
        };
        t.record(pair(&x, &y), SPoint::new(x.clone(), y.clone()).and_then(|p| commute_check(&p)));
    }
    let mut w = Tally::new("surd witnesses");
    for (x, y) in COMMUTE_WITNESSES {
        let (x, y) = (parse_value(x).expect("literal"), parse_value(y).expect("literal"));
        w.record(pair(&x, &y), SPoint::new(x.clone(), y.clone()).and_then(|p| commute_check(&p)));
    }
    vec![t, w]
}

/// At most `n` items, in a seeded order; all of them when `n` is large enough.
fn pick<T>(rng: &mut ChaCha8Rng, mut items: Vec<T>, n: usize) -> Vec<T> {
    if n < items.len() {
        items.shuffle(rng);
        items.truncate(n);
    }
    items
}

fn suite_decode(rng: &mut ChaCha8Rng, n: usize) -> Vec<Tally> {
    let mut t = Tally::new("decode then walk, runs <= 4, period <= 3");
    for p in pick(rng, run_patterns(4, 3), n) {
        t.record(format!("{p:?}"), decode_roundtrip(&p, 200));
    }
    vec![t]
}

/// Primitive words over the Lehner digits of length `1..=max_len`.
pub fn primitive_periods(max_len: usize) -> Vec<Vec<LehnerDigit>> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for bits in 0..(1u32 << len) {
            let w: Vec<LehnerDigit> = (0..len)
                .map(|i| if bits >> i & 1 == 0 { LehnerDigit::D21 } else { LehnerDigit::D11 })
                .collect();
            if DigitSequence::new(vec![], w.clone()).period().len() == len {
                out.push(w);
            }
        }
    }
    out
}

fn tokens(w: &[LehnerDigit]) -> String {
    w.iter().map(|d| d.token()).collect::<Vec<_>>().join(" ")
}

fn as_domain(e: Error) -> Error {
    match e {
        Error::InvalidPeriod(why) if why.contains("admissible") => Error::OutOfDomain(why),
        e => e,
    }
}

fn suite_closed(rng: &mut ChaCha8Rng, n: usize) -> Vec<Tally> {
    let (mut scale, mut closed) = (Tally::new("rho_bar^r scales, rho_bar^2r fixes"), Tally::new("closed geodesic"));
    for w in pick(rng, primitive_periods(4), n) {
        scale.record(tokens(&w), rho_period_check(&w).map_err(as_domain));
        closed.record(tokens(&w), closed_geodesic_test(&w).map(|c| c.closed).map_err(as_domain));
    }
    vec![scale, closed]
}

pub fn cmd_verify(suite: Suite, samples: usize, seed: u64) -> CommandResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tallies = match suite {
        Suite::Transfer => suite_transfer(&mut rng, samples),
        Suite::Natext => suite_natext(&mut rng, samples),
        Suite::Commute => suite_commute(&mut rng, samples),
        Suite::Theorem1 => suite_decode(&mut rng, samples),
        Suite::Closed => suite_closed(&mut rng, samples),
    };
    let ok = tallies.iter().all(Tally::ok);
    let diagnostics: Vec<String> = tallies
        .iter()
        .flat_map(|t| {
            let fail = t
                .first_counterexample
                .as_ref()
                .map(|c| format!("{}: {} failures, first at {c}", t.name, t.failed));
            let skip = t.first_skip.as_ref().map(|c| format!("{}: {} skipped, first {c}", t.name, t.skipped));
            let empty = (t.passed == 0).then(|| format!("{}: no samples passed", t.name));
            [fail, skip, empty].into_iter().flatten()
        })
        .collect();
    let payload = json!({
        "suite": suite.name(),
        "samples": samples,
        "seed": seed,
        "checks": to_value(&tallies),
        "passed": ok,
    });
    if ok {
        CommandResult::ok(payload, diagnostics)
    } else {
        CommandResult::failed(payload, diagnostics)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn period(r: &CommandResult) -> Vec<String> {
        r.payload["expansion"]["period"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.to_string().trim_matches('"').to_string())
            .collect()
    }

    #[test]
    fn expand_examples() {
        let r = cmd_expand(System::Lehner, "sqrt(2)", 100);
        assert!(r.is_ok());
        assert_eq!(period(&r), ["2-", "1+"]);
        let r = cmd_expand(System::Farey, "-2/3", 100);
        assert_eq!(r.payload["expansion"]["preperiod"], json!(["2-", "2-"]));
        assert!(r.payload["expansion"]["period"].as_array().unwrap().is_empty());
        let r = cmd_expand(System::Rcf, "(1+sqrt(5))/2", 100);
        assert_eq!(r.payload["expansion"]["head"], json!(1));
        assert_eq!(r.payload["expansion"]["period"], json!([1]));
        let r = cmd_expand(System::Lehner, "1 +", 100);
        assert!(!r.is_ok());
        assert!(r.diagnostics[0].contains("byte"), "{:?}", r.diagnostics);
    }

    #[test]
    fn rcf_text() {
        let e = parse_rcf("1;2,2,...").unwrap();
        assert_eq!(e.value().unwrap(), "sqrt(2)".parse().unwrap());
        assert_eq!(parse_rcf("0;3").unwrap().value().unwrap(), "1/3".parse().unwrap());
        assert_eq!(parse_rcf("1;(1)").unwrap().value().unwrap(), "(1+sqrt(5))/2".parse().unwrap());
        assert_eq!(parse_rcf("2").unwrap().value().unwrap(), ExactReal::from(2));
        assert!(parse_rcf("1;0,2").is_err());
        assert!(parse_rcf("1;,...").is_err());
    }

    #[test]
    fn convert_examples() {
        let r = cmd_convert(Target::Lehner, ConvertInput::Rcf("1;2,2,..."), 100);
        assert!(r.is_ok(), "{r}");
        assert_eq!(r.payload["converted"]["period"], json!(["2-", "1+"]));
        let r = cmd_convert(Target::Farey, ConvertInput::Value("sqrt(2)"), 100);
        assert_eq!(r.payload["converted"]["period"], json!(["1+", "2-"]));
        assert_eq!(r.payload["agrees"], json!(true));
        let r = cmd_convert(Target::Farey, ConvertInput::Value("-1/3"), 100);
        assert_eq!(r.payload["converted"]["preperiod"], json!(["2-", "1+"]));
        let r = cmd_convert(Target::Lehner, ConvertInput::Rcf("2;3"), 100);
        assert_eq!(r.payload["error"], json!("UnsupportedHead"));
    }

    #[test]
    fn geodesic_examples() {
        let r = cmd_geodesic("1-sqrt(2)", "sqrt(2)", 20);
        assert!(r.is_ok(), "{r}");
        assert_eq!(r.payload["runs"]["runs_forward"]["period"], json!([2]));
        assert_eq!(r.payload["runs"]["runs_backward"]["period"], json!([2]));
        assert!(r.payload["return_time"].is_number());
        let r = cmd_geodesic("0", "inf", 20);
        assert_eq!(r.payload["error"], json!("ExcludedGeodesic"));
        let r = cmd_geodesic("-1/2", "3/2", 20);
        assert!(r.is_ok(), "{r}");
        assert_eq!(r.payload["letters"]["ended_at_cusp"], json!(true));
    }

    #[test]
    fn verify_small() {
        for s in Suite::ALL {
            let r = cmd_verify(s, 20, 7);
            assert!(r.is_ok(), "{}: {r}", s.name());
        }
        assert_eq!(run(&Command::Verify { suite: "nope".into(), samples: 1, seed: 0 }).payload["error"], json!("UnknownSuite"));
    }

    #[test]
    fn deterministic_and_round_trips() {
        let a = cmd_verify(Suite::Natext, 30, 3).to_json_string();
        let b = cmd_verify(Suite::Natext, 30, 3).to_json_string();
        assert_eq!(a, b);
        let g = cmd_geodesic("-sqrt(2)", "sqrt(2)", 10).to_json_string();
        assert_eq!(CommandResult::from_json_str(&g).unwrap().to_json_string(), g);
    }

    #[test]
    fn samplers_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let x = rational_in(&mut rng, (1, 2), (1, 1), 50);
            assert!(x > "1/2".parse().unwrap() && x < ExactReal::one());
            let x = rational_in(&mut rng, (-20, 1), (1, 1), 50);
            assert!(x > ExactReal::from(-20) && x < ExactReal::one());
        }
        assert_eq!(primitive_periods(4).len(), 2 + 2 + 6 + 12);
    }
}
