//! Re-checks certificates from their JSON alone.
//!
//! Nothing here calls into `hamel-core`: rationals, value expressions,
//! interval enclosures and linear solves are reimplemented so that a bug in
//! the producer cannot vouch for itself.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::envelope::{canonical_json, CERTIFICATE_FORMAT, RUN_REPORT_FORMAT};

type Q = BigRational;
type Vector = BTreeMap<String, Q>;

/// Highest precision tried when confirming an interval bound.
const MAX_VERIFY_BITS: u32 = 8192;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub certificate: usize,
    pub clause: String,
    pub reason: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "certificate {}: {}: {}", self.certificate, self.clause, self.reason)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    /// `(claim, witness count)` for each certificate checked.
    pub checked: Vec<(String, usize)>,
    pub failures: Vec<Failure>,
}

impl Outcome {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && !self.checked.is_empty()
    }
}

/// Verifies a certificate file or a run report given as JSON text.
pub fn verify_text(text: &str) -> Outcome {
    let mut outcome = Outcome::default();
    let fail = |clause: &str, reason: String| Failure {
        certificate: 0,
        clause: clause.to_owned(),
        reason,
    };
    let root: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            outcome.failures.push(fail("file", format!("not valid JSON: {e}")));
            return outcome;
        }
    };
    let envelopes: Vec<&Value> = match root.get("format").and_then(Value::as_str) {
        Some(RUN_REPORT_FORMAT) => match root.get("certificates").and_then(Value::as_array) {
            Some(list) => list.iter().collect(),
            None => {
                outcome.failures.push(fail("file", "run report without certificates".into()));
                return outcome;
            }
        },
        Some(CERTIFICATE_FORMAT) => vec![&root],
        other => {
            outcome.failures.push(fail("file", format!("unknown format {other:?}")));
            return outcome;
        }
    };
    for (i, env) in envelopes.into_iter().enumerate() {
        let mut failures = Vec::new();
        let (claim, count) = verify_envelope(env, &mut failures);
        outcome.failures.extend(failures.into_iter().map(|(clause, reason)| Failure {
            certificate: i,
            clause,
            reason,
        }));
        outcome.checked.push((claim, count));
    }
    outcome
}

type Failures = Vec<(String, String)>;

fn verify_envelope(env: &Value, failures: &mut Failures) -> (String, usize) {
    let Some(payload) = env.get("payload") else {
        failures.push(("envelope".into(), "missing payload".into()));
        return ("?".into(), 0);
    };
    let digest = hex::encode(Sha256::digest(canonical_json(payload).as_bytes()));
    if env.get("payload_sha256").and_then(Value::as_str) != Some(digest.as_str()) {
        failures.push(("payload_sha256".into(), "digest does not match the payload".into()));
    }
    let claim = payload.get("claim").and_then(Value::as_str).unwrap_or("?").to_owned();
    match Certificate::parse(payload) {
        Ok(cert) => {
            let count = cert.witnesses.len();
            cert.check(failures);
            (claim, count)
        }
        Err(e) => {
            failures.push(("payload".into(), e));
            (claim, 0)
        }
    }
}

// ---------------------------------------------------------------------------
// Rationals and vectors

fn parse_q(s: &str) -> Result<Q, String> {
    let bad = || format!("bad rational {s:?}");
    let int = |t: &str| -> Result<BigInt, String> {
        let digits = t.strip_prefix('-').unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        t.parse().map_err(|_| bad())
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = int(d)?;
            if !d.is_positive() {
                return Err(bad());
            }
            Ok(Q::new(int(n)?, d))
        }
        None => Ok(Q::from_integer(int(s)?)),
    }
}

fn q_of(v: &Value, what: &str) -> Result<Q, String> {
    v.as_str().ok_or_else(|| format!("{what} is not a string")).and_then(parse_q)
}

fn vector_of(v: &Value, what: &str) -> Result<Vector, String> {
    let obj = v.as_object().ok_or_else(|| format!("{what} is not an object"))?;
    let mut out = Vector::new();
    for (k, c) in obj {
        let c = q_of(c, what)?;
        if !c.is_zero() {
            out.insert(k.clone(), c);
        }
    }
    Ok(out)
}

fn coordinates_of(v: &Value) -> Result<BTreeMap<usize, Q>, String> {
    let obj = v.as_object().ok_or("coordinates are not an object")?;
    obj.iter()
        .map(|(k, c)| Ok((k.parse::<usize>().map_err(|_| format!("bad index {k:?}"))?, q_of(c, "coordinate")?)))
        .collect()
}

fn axpy(acc: &mut Vector, k: &Q, v: &Vector) {
    for (s, c) in v {
        let slot = acc.entry(s.clone()).or_insert_with(Q::zero);
        *slot += k * c;
        if slot.is_zero() {
            acc.remove(s);
        }
    }
}

fn scaled(v: &Vector, k: &Q) -> Vector {
    let mut out = Vector::new();
    axpy(&mut out, k, v);
    out
}

fn pow2(e: u32) -> Q {
    Q::from_integer(BigInt::one() << e)
}

// ---------------------------------------------------------------------------
// Sparse elimination, pivoting on the smallest symbol name

struct Row {
    entries: Vector,
    combo: BTreeMap<usize, Q>,
}

#[derive(Default)]
struct Echelon {
    rows: Vec<Row>,
    pivot_of: HashMap<String, usize>,
    len: usize,
}

impl Echelon {
    /// `v = residual + sum used[r] * rows[r].entries`, with no pivot left in
    /// the residual.
    fn reduce(&self, v: &Vector) -> (Vector, BTreeMap<usize, Q>) {
        let mut residual = v.clone();
        let mut used = BTreeMap::new();
        let mut heap: BinaryHeap<Reverse<usize>> =
            residual.keys().filter_map(|k| self.pivot_of.get(k)).map(|&r| Reverse(r)).collect();
        while let Some(Reverse(r)) = heap.pop() {
            let row = &self.rows[r];
            let pivot = row.entries.keys().next().expect("rows are nonzero");
            let Some(c) = residual.get(pivot).cloned() else { continue };
            axpy(&mut residual, &-&c, &row.entries);
            *used.entry(r).or_insert_with(Q::zero) += c;
            heap.extend(row.entries.keys().skip(1).filter_map(|k| self.pivot_of.get(k)).map(|&r| Reverse(r)));
        }
        (residual, used)
    }

    /// Adds the next frame vector; false when it is dependent.
    fn push(&mut self, v: &Vector) -> bool {
        let index = self.len;
        self.len += 1;
        let (residual, used) = self.reduce(v);
        let Some((pivot, lead)) = residual.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let mut combo = BTreeMap::from([(index, Q::one())]);
        for (r, c) in used {
            for (i, rc) in &self.rows[r].combo {
                *combo.entry(*i).or_insert_with(Q::zero) -= &c * rc;
            }
        }
        let inv = lead.recip();
        let row = Row {
            entries: scaled(&residual, &inv),
            combo: combo.into_iter().map(|(i, c)| (i, c * &inv)).filter(|(_, c)| !c.is_zero()).collect(),
        };
        self.pivot_of.insert(pivot, self.rows.len());
        self.rows.push(row);
        true
    }

    fn solve(&self, v: &Vector) -> Option<BTreeMap<usize, Q>> {
        let (residual, used) = self.reduce(v);
        if !residual.is_empty() {
            return None;
        }
        let mut coords: BTreeMap<usize, Q> = BTreeMap::new();
        for (r, c) in used {
            for (i, rc) in &self.rows[r].combo {
                *coords.entry(*i).or_insert_with(Q::zero) += &c * rc;
            }
        }
        coords.retain(|_, c| !c.is_zero());
        Some(coords)
    }
}

// ---------------------------------------------------------------------------
// Value expressions and interval enclosures

#[derive(Clone, Debug)]
enum Expr {
    Num(Q),
    Sqrt(Q),
    Pi,
    E,
    Neg(Box<Expr>),
    Bin(u8, Box<Expr>, Box<Expr>),
}

struct ExprParser<'a> {
    s: &'a [u8],
    i: usize,
}

impl ExprParser<'_> {
    fn parse(src: &str) -> Result<Expr, String> {
        let mut p = ExprParser { s: src.as_bytes(), i: 0 };
        let e = p.sum()?;
        p.ws();
        if p.i != p.s.len() {
            return Err(format!("trailing input in {src:?}"));
        }
        Ok(e)
    }

    fn ws(&mut self) {
        while self.s.get(self.i).is_some_and(u8::is_ascii_whitespace) {
            self.i += 1;
        }
    }

    fn next_is(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.i) == Some(&c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, String> {
        let mut e = self.product()?;
        loop {
            if self.next_is(b'+') {
                e = Expr::Bin(b'+', Box::new(e), Box::new(self.product()?));
            } else if self.next_is(b'-') {
                e = Expr::Bin(b'-', Box::new(e), Box::new(self.product()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, String> {
        let mut e = self.unary()?;
        loop {
            if self.next_is(b'*') {
                e = Expr::Bin(b'*', Box::new(e), Box::new(self.unary()?));
            } else if self.next_is(b'/') {
                e = Expr::Bin(b'/', Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, String> {
        if self.next_is(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn number(&mut self) -> Result<Q, String> {
        self.ws();
        let start = self.i;
        let digits = |p: &mut Self| {
            let s = p.i;
            while p.s.get(p.i).is_some_and(u8::is_ascii_digit) {
                p.i += 1;
            }
            p.i > s
        };
        if !digits(self) {
            return Err("expected a number".into());
        }
        if self.s.get(self.i) == Some(&b'/') && self.s.get(self.i + 1).is_some_and(u8::is_ascii_digit) {
            self.i += 1;
            digits(self);
        }
        parse_q(std::str::from_utf8(&self.s[start..self.i]).expect("ascii"))
    }

    fn atom(&mut self) -> Result<Expr, String> {
        self.ws();
        if self.next_is(b'(') {
            let e = self.sum()?;
            if !self.next_is(b')') {
                return Err("expected `)`".into());
            }
            return Ok(e);
        }
        if self.s.get(self.i).is_some_and(u8::is_ascii_digit) {
            return Ok(Expr::Num(self.number()?));
        }
        let start = self.i;
        while self.s.get(self.i).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_') {
            self.i += 1;
        }
        match &self.s[start..self.i] {
            b"pi" => Ok(Expr::Pi),
            b"e" => Ok(Expr::E),
            b"sqrt" => {
                if !self.next_is(b'(') {
                    return Err("expected `(` after sqrt".into());
                }
                let r = self.number()?;
                if !self.next_is(b')') || !r.is_positive() {
                    return Err("sqrt takes one positive rational".into());
                }
                Ok(Expr::Sqrt(r))
            }
            other => Err(format!("unknown token {:?}", String::from_utf8_lossy(other))),
        }
    }
}

type Interval = (Q, Q);

/// Rounds `x` outward onto the grid `2^-s`.
fn grid_floor(x: &Q, s: u32) -> BigInt {
    (x * pow2(s)).floor().to_integer()
}

fn grid_ceil(x: &Q, s: u32) -> BigInt {
    (x * pow2(s)).ceil().to_integer()
}

fn from_grid(lo: BigInt, hi: BigInt, s: u32) -> Interval {
    let d = BigInt::one() << s;
    (Q::new(lo, d.clone()), Q::new(hi, d))
}

/// Newton from above: every iterate stays at or above the root, and
/// `r / x` stays at or below it.
fn sqrt_interval(r: &Q, k: u32) -> Interval {
    let s = k + 8;
    let target = Q::new(BigInt::one(), BigInt::one() << k);
    let mut x = if r > &Q::one() { r.clone() } else { Q::one() };
    for _ in 0..10_000 {
        let next = (&x + r / &x) / Q::from_integer(2.into());
        x = Q::new(grid_ceil(&next, s), BigInt::one() << s);
        if &x - r / &x <= target {
            break;
        }
    }
    let lo = r / &x;
    (lo, x)
}

/// Bailey-Borwein-Plouffe series; every term is positive and the tail after
/// `n` terms is below `5 / 16^n`.
fn pi_interval(k: u32) -> Interval {
    let s = k + 8;
    let n = k / 4 + 4;
    let (mut lo, mut hi) = (BigInt::zero(), BigInt::zero());
    for i in 0..n {
        let b = Q::from_integer((8 * i).into());
        let one = Q::one();
        let term = (Q::from_integer(4.into()) / (&b + &one)
            - Q::from_integer(2.into()) / (&b + Q::from_integer(4.into()))
            - &one / (&b + Q::from_integer(5.into()))
            - &one / (&b + Q::from_integer(6.into())))
            / Q::from_integer(BigInt::from(16).pow(i));
        lo += grid_floor(&term, s);
        hi += grid_ceil(&term, s);
    }
    let tail = Q::new(BigInt::from(5), BigInt::from(16).pow(n));
    hi += grid_ceil(&tail, s);
    from_grid(lo, hi, s)
}

/// `sum 1/i!` with the tail after `n` terms below `2 / n!`.
fn e_interval(k: u32) -> Interval {
    let s = k + 8;
    let (mut lo, mut hi) = (BigInt::zero(), BigInt::zero());
    let mut fact = BigInt::one();
    let mut n: u32 = 0;
    let bound = BigInt::one() << (k + 8);
    while n < 3 || BigInt::from(2) * &bound >= fact {
        let term = Q::new(BigInt::one(), fact.clone());
        lo += grid_floor(&term, s);
        hi += grid_ceil(&term, s);
        n += 1;
        fact *= n;
    }
    hi += grid_ceil(&Q::new(BigInt::from(2), fact), s);
    from_grid(lo, hi, s)
}

fn eval(e: &Expr, k: u32) -> Option<Interval> {
    Some(match e {
        Expr::Num(q) => (q.clone(), q.clone()),
        Expr::Sqrt(r) => sqrt_interval(r, k),
        Expr::Pi => pi_interval(k),
        Expr::E => e_interval(k),
        Expr::Neg(a) => {
            let (lo, hi) = eval(a, k)?;
            (-hi, -lo)
        }
        Expr::Bin(op, a, b) => {
            let (al, ah) = eval(a, k)?;
            let (bl, bh) = eval(b, k)?;
            match op {
                b'+' => (al + bl, ah + bh),
                b'-' => (al - bh, ah - bl),
                b'*' | b'/' => {
                    let (bl, bh) = if *op == b'/' {
                        if !bl.is_positive() && !bh.is_negative() {
                            return None;
                        }
                        (bh.recip(), bl.recip())
                    } else {
                        (bl, bh)
                    };
                    let ps = [&al * &bl, &al * &bh, &ah * &bl, &ah * &bh];
                    let lo = ps.iter().min().expect("four products").clone();
                    let hi = ps.iter().max().expect("four products").clone();
                    (lo, hi)
                }
                _ => unreachable!("parser only builds four operators"),
            }
        }
    })
}

struct Values {
    exprs: BTreeMap<String, Expr>,
}

impl Values {
    /// Enclosure of `|v|` at working precision `k`.
    fn abs_interval(&self, v: &Vector, k: u32) -> Result<Option<Interval>, String> {
        let (mut lo, mut hi) = (Q::zero(), Q::zero());
        for (s, c) in v {
            let e = self.exprs.get(s).ok_or_else(|| format!("no value for symbol {s}"))?;
            let Some((a, b)) = eval(e, k) else { return Ok(None) };
            let (x, y) = (c * a, c * b);
            if x <= y {
                lo += x;
                hi += y;
            } else {
                lo += y;
                hi += x;
            }
        }
        Ok(Some(if !lo.is_negative() {
            (lo, hi)
        } else if !hi.is_positive() {
            (-hi, -lo)
        } else {
            let m = if -&lo > hi { -lo } else { hi };
            (Q::zero(), m)
        }))
    }

    /// Refines until `|v| <= bound` (upper) or `|v| >= bound` (lower) is
    /// confirmed or refuted.
    fn confirm(&self, v: &Vector, bound: &Q, upper: bool) -> Result<(), String> {
        let mut k = 32;
        while k <= MAX_VERIFY_BITS {
            if let Some((lo, hi)) = self.abs_interval(v, k)? {
                if upper {
                    if &hi <= bound {
                        return Ok(());
                    }
                    if &lo > bound {
                        return Err(format!("|v| >= {lo} exceeds the recorded upper bound {bound}"));
                    }
                } else {
                    if &lo >= bound {
                        return Ok(());
                    }
                    if &hi < bound {
                        return Err(format!("|v| <= {hi} is below the recorded lower bound {bound}"));
                    }
                }
            }
            k *= 2;
        }
        Err(format!("could not confirm the recorded bound {bound} within {MAX_VERIFY_BITS} bits"))
    }
}

// ---------------------------------------------------------------------------
// Certificate semantics

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    fn parse(v: &Value) -> Result<Self, String> {
        Ok(match v.as_str() {
            Some("<") => Rel::Lt,
            Some("<=") => Rel::Le,
            Some("=") => Rel::Eq,
            Some(">=") => Rel::Ge,
            Some(">") => Rel::Gt,
            other => return Err(format!("bad relation {other:?}")),
        })
    }

    fn holds(self, a: &Q, b: &Q) -> bool {
        match self {
            Rel::Lt => a < b,
            Rel::Le => a <= b,
            Rel::Eq => a == b,
            Rel::Ge => a >= b,
            Rel::Gt => a > b,
        }
    }
}

enum Check {
    Exact {
        lhs: Q,
        rel: Rel,
        rhs: Q,
    },
    NormBound {
        frame: String,
        coords: BTreeMap<usize, Q>,
        j_value: Q,
        image_norm_sq: Q,
        bound_sq: Q,
        norm_sq: Q,
        rel: Rel,
        kernel_zero: bool,
    },
    JValue {
        frame: String,
        coords: BTreeMap<usize, Q>,
        value: Q,
        image_norm_sq: Q,
    },
    AbsLess {
        left: Vector,
        right: Vector,
        left_hi: Q,
        right_lo: Q,
        bits: u64,
    },
}

struct Witness {
    clause: String,
    check: Check,
}

struct Certificate {
    claim: String,
    verdict: String,
    parameters: BTreeMap<String, String>,
    values: Values,
    frames: BTreeMap<String, Vec<Vector>>,
    witnesses: Vec<Witness>,
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, String> {
    v.get(key).ok_or_else(|| format!("missing field `{key}`"))
}

fn string(v: &Value, key: &str) -> Result<String, String> {
    field(v, key)?.as_str().map(str::to_owned).ok_or_else(|| format!("`{key}` is not a string"))
}

impl Check {
    fn parse(v: &Value) -> Result<Self, String> {
        let obj = v.as_object().filter(|o| o.len() == 1).ok_or("check must have exactly one kind")?;
        let (kind, body) = obj.iter().next().expect("one entry");
        let q = |key: &str| q_of(field(body, key)?, key);
        Ok(match kind.as_str() {
            "exact" => Check::Exact {
                lhs: q("lhs")?,
                rel: Rel::parse(field(body, "relation")?)?,
                rhs: q("rhs")?,
            },
            "norm_bound" => Check::NormBound {
                frame: string(body, "frame")?,
                coords: coordinates_of(field(body, "coordinates")?)?,
                j_value: q("j_value")?,
                image_norm_sq: q("image_norm_sq")?,
                bound_sq: q("bound_sq")?,
                norm_sq: q("norm_sq")?,
                rel: Rel::parse(field(body, "relation")?)?,
                kernel_zero: field(body, "kernel_component_zero")?
                    .as_bool()
                    .ok_or("kernel_component_zero is not a bool")?,
            },
            "j_value" => Check::JValue {
                frame: string(body, "frame")?,
                coords: coordinates_of(field(body, "coordinates")?)?,
                value: q("value")?,
                image_norm_sq: q("image_norm_sq")?,
            },
            "abs_less" => Check::AbsLess {
                left: vector_of(field(body, "left")?, "left")?,
                right: vector_of(field(body, "right")?, "right")?,
                left_hi: q("left_abs_hi")?,
                right_lo: q("right_abs_lo")?,
                bits: field(body, "precision_bits")?.as_u64().ok_or("precision_bits is not an integer")?,
            },
            other => return Err(format!("unknown check kind {other:?}")),
        })
    }
}

impl Certificate {
    fn parse(v: &Value) -> Result<Self, String> {
        let parameters = field(v, "parameters")?
            .as_object()
            .ok_or("parameters is not an object")?
            .iter()
            .map(|(k, s)| Ok((k.clone(), s.as_str().ok_or("parameter is not a string")?.to_owned())))
            .collect::<Result<_, String>>()?;
        let exprs = field(v, "symbols")?
            .as_object()
            .ok_or("symbols is not an object")?
            .iter()
            .map(|(k, s)| Ok((k.clone(), ExprParser::parse(s.as_str().ok_or("symbol value is not a string")?)?)))
            .collect::<Result<_, String>>()?;
        let frames = field(v, "frames")?
            .as_object()
            .ok_or("frames is not an object")?
            .iter()
            .map(|(k, list)| {
                let vs = list
                    .as_array()
                    .ok_or("frame is not a list")?
                    .iter()
                    .map(|x| vector_of(x, "frame vector"))
                    .collect::<Result<_, _>>()?;
                Ok((k.clone(), vs))
            })
            .collect::<Result<_, String>>()?;
        let witnesses = field(v, "witnesses")?
            .as_array()
            .ok_or("witnesses is not a list")?
            .iter()
            .map(|w| {
                Ok(Witness {
                    clause: string(w, "clause")?,
                    check: Check::parse(field(w, "check")?)?,
                })
            })
            .collect::<Result<_, String>>()?;
        Ok(Self {
            claim: string(v, "claim")?,
            verdict: string(v, "verdict")?,
            parameters,
            values: Values { exprs },
            frames,
            witnesses,
        })
    }

    fn param(&self, key: &str) -> Result<&str, String> {
        self.parameters
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| format!("missing parameter `{key}`"))
    }

    fn check(&self, failures: &mut Failures) {
        let mut fail = |clause: &str, reason: String| failures.push((clause.to_owned(), reason));
        if self.verdict != "pass" {
            fail("verdict", format!("recorded verdict is {:?}", self.verdict));
        }
        let ctx = match Context::new(self) {
            Ok(ctx) => ctx,
            Err(e) => {
                fail("frames", e);
                return;
            }
        };
        for w in &self.witnesses {
            if let Err(e) = ctx.check(&w.check) {
                fail(&w.clause, e);
            }
        }
        if let Err(e) = self.check_claim(&ctx) {
            fail(&format!("claim {}", self.claim), e);
        }
    }

    fn check_claim(&self, ctx: &Context<'_>) -> Result<(), String> {
        match self.claim.as_str() {
            "InnerInnerBounded" => self.claim_inner_inner(),
            "AbsAbsDiscontinuous" => self.claim_decay(ctx, false),
            "AbsInnerDiscontinuous" => self.claim_decay(ctx, true),
            "InnerAbsUnbounded" => self.claim_inner_abs(),
            "RationalRestrictionContinuous" => self.claim_rational(ctx),
            other => Err(format!("unknown claim {other:?}")),
        }
    }

    fn claim_inner_inner(&self) -> Result<(), String> {
        let samples: usize = self.param("samples")?.parse().map_err(|_| "bad sample count")?;
        if self.witnesses.len() != samples + 1 {
            return Err(format!("{} witnesses for {samples} samples", self.witnesses.len()));
        }
        for w in &self.witnesses {
            let Check::NormBound { frame, rel, kernel_zero, bound_sq, .. } = &w.check else {
                return Err(format!("{}: expected a norm bound", w.clause));
            };
            if frame != "kernel_frame" || !bound_sq.is_one() {
                return Err(format!("{}: must compare kernel-frame norms with bound 1", w.clause));
            }
            match (rel, kernel_zero) {
                (Rel::Lt, false) | (Rel::Eq, true) => {}
                _ => return Err(format!("{}: equality must hold exactly when the kernel part is zero", w.clause)),
            }
        }
        Ok(())
    }

    fn claim_decay(&self, ctx: &Context<'_>, inner_codomain: bool) -> Result<(), String> {
        let n: usize = self.param("N")?.parse().map_err(|_| "bad N")?;
        let chain = ctx.frame("j_basis")?;
        if chain.len() < n {
            return Err("j_basis frame shorter than N".into());
        }
        let mut decays = 0;
        let mut values = 0;
        for w in &self.witnesses {
            match &w.check {
                Check::AbsLess { left, right, .. } => {
                    decays += 1;
                    let m = decays + 1;
                    let expected_right = scaled(&chain[0], &pow2(m as u32 - 1).recip());
                    if *left != chain[m - 1] || *right != expected_right {
                        return Err(format!("{}: expected |j_{m}| < |j_1| / 2^{}", w.clause, m - 1));
                    }
                }
                Check::JValue { coords, value, image_norm_sq, .. } => {
                    values += 1;
                    if *coords != BTreeMap::from([(values - 1, Q::one())]) || !value.is_one() {
                        return Err(format!("{}: expected J(z_{values}) = 1", w.clause));
                    }
                    if inner_codomain && !image_norm_sq.is_one() {
                        return Err(format!("{}: expected unit image norm", w.clause));
                    }
                }
                Check::Exact { .. } => {}
                Check::NormBound { .. } => return Err(format!("{}: unexpected norm bound", w.clause)),
            }
        }
        if decays != n.saturating_sub(1) || values != n {
            return Err(format!("expected {} decay and {n} value witnesses", n.saturating_sub(1)));
        }
        Ok(())
    }

    fn claim_inner_abs(&self) -> Result<(), String> {
        let a = parse_q(self.param("a")?)?;
        let n: usize = self.param("n")?.parse().map_err(|_| "bad n")?;
        if a.is_negative() {
            return Err("a must be non-negative".into());
        }
        let a_sq = &a * &a;
        let expected_n = a_sq.floor().to_integer() + 1;
        if BigInt::from(n) != expected_n {
            return Err(format!("n = {n} but floor(a^2) + 1 = {expected_n}"));
        }
        let nq = Q::from_integer(n.into());
        let mut saw_norm = false;
        let mut saw_exact = false;
        for w in &self.witnesses {
            match &w.check {
                Check::NormBound { frame, coords, bound_sq, rel, .. } => {
                    let ones = coords.len() == n && coords.iter().enumerate().all(|(i, (k, c))| *k == i && c.is_one());
                    if frame != "j_basis" || !ones || *bound_sq != a_sq || *rel != Rel::Gt {
                        return Err(format!("{}: expected x = j_1 + ... + j_{n} beating a^2", w.clause));
                    }
                    saw_norm = true;
                }
                Check::Exact { lhs, rel, rhs } => {
                    if *lhs != &nq * &nq || *rhs != &a_sq * &nq || *rel != Rel::Gt {
                        return Err(format!("{}: expected n^2 > a^2 n", w.clause));
                    }
                    saw_exact = true;
                }
                _ => return Err(format!("{}: unexpected witness", w.clause)),
            }
        }
        if saw_norm && saw_exact {
            Ok(())
        } else {
            Err("missing norm or exact witness".into())
        }
    }

    fn claim_rational(&self, ctx: &Context<'_>) -> Result<(), String> {
        let q = parse_q(self.param("q")?)?;
        let v = ctx.j1_value()?;
        let a = &q / &v;
        let b = v.abs();
        if parse_q(self.param("a")?)? != a || parse_q(self.param("b")?)? != b {
            return Err(format!("expected a = {a}, b = {b}"));
        }
        let mut seen = 0;
        for w in &self.witnesses {
            match &w.check {
                Check::NormBound { frame, coords, norm_sq, image_norm_sq, rel, .. } => {
                    let expected: BTreeMap<usize, Q> =
                        if a.is_zero() { BTreeMap::new() } else { BTreeMap::from([(0, a.clone())]) };
                    if frame != "kernel_frame" || *coords != expected || *rel != Rel::Eq {
                        return Err(format!("{}: expected q = a j_1", w.clause));
                    }
                    if *norm_sq != &a * &a || *image_norm_sq != &a * &a {
                        return Err(format!("{}: expected both squared norms to be a^2", w.clause));
                    }
                    seen += 1;
                }
                Check::Exact { lhs, rel, rhs } => {
                    if *lhs != q.abs() || *rhs != &b * a.abs() || *rel != Rel::Eq {
                        return Err(format!("{}: expected |q| = b |J(q)|", w.clause));
                    }
                    seen += 1;
                }
                _ => return Err(format!("{}: unexpected witness", w.clause)),
            }
        }
        if seen == 2 {
            Ok(())
        } else {
            Err("expected one norm and one exact witness".into())
        }
    }
}

/// Frames of one certificate with their elimination caches.
struct Context<'a> {
    cert: &'a Certificate,
    solvers: BTreeMap<&'a str, Echelon>,
}

impl<'a> Context<'a> {
    fn new(cert: &'a Certificate) -> Result<Self, String> {
        let mut solvers = BTreeMap::new();
        for (label, vectors) in &cert.frames {
            let mut e = Echelon::default();
            for v in vectors {
                if !e.push(v) {
                    return Err(format!("frame {label} is not independent"));
                }
            }
            solvers.insert(label.as_str(), e);
        }
        let ctx = Self { cert, solvers };
        if let Ok(chain) = ctx.frame("j_basis") {
            if chain.is_empty() {
                return Err("j_basis frame is empty".into());
            }
            ctx.j1_value()?;
            if let Ok(kernel) = ctx.frame("kernel_frame") {
                if kernel.first() != chain.first() {
                    return Err("kernel_frame must start with j_1".into());
                }
            }
        }
        if let Ok(range) = ctx.frame("range_frame") {
            match range.first() {
                Some(r0) if r0.len() == 1 && r0.contains_key("one") => {}
                _ => return Err("range_frame must start with a multiple of `one`".into()),
            }
        }
        Ok(ctx)
    }

    fn frame(&self, label: &str) -> Result<&'a [Vector], String> {
        self.cert
            .frames
            .get(label)
            .map(Vec::as_slice)
            .ok_or_else(|| format!("missing frame {label}"))
    }

    fn j1_value(&self) -> Result<Q, String> {
        let j1 = &self.frame("j_basis")?[0];
        match j1.get("one") {
            Some(v) if j1.len() == 1 => Ok(v.clone()),
            _ => Err("j_1 must be a nonzero rational multiple of `one`".into()),
        }
    }

    fn vector_from(&self, frame: &str, coords: &BTreeMap<usize, Q>) -> Result<Vector, String> {
        let vectors = self.frame(frame)?;
        let mut x = Vector::new();
        for (i, c) in coords {
            let v = vectors.get(*i).ok_or_else(|| format!("index {i} outside frame {frame}"))?;
            axpy(&mut x, c, v);
        }
        Ok(x)
    }

    /// J(x) and the squared range-frame norm of J(x).
    fn j_and_image(&self, x: &Vector) -> Result<(Q, Q), String> {
        let coords = self.solvers["j_basis"]
            .solve(x)
            .ok_or("vector is outside the span of j_basis")?;
        let j: Q = coords.values().sum();
        let r0 = self.frame("range_frame").map(|r| r[0]["one"].clone()).unwrap_or_else(|_| Q::one());
        let in_frame = &j / r0;
        Ok((j, &in_frame * &in_frame))
    }

    fn check(&self, check: &Check) -> Result<(), String> {
        match check {
            Check::Exact { lhs, rel, rhs } => {
                if !rel.holds(lhs, rhs) {
                    return Err(format!("{lhs} {rel:?} {rhs} is false"));
                }
            }
            Check::NormBound {
                frame,
                coords,
                j_value,
                image_norm_sq,
                bound_sq,
                norm_sq,
                rel,
                kernel_zero,
            } => {
                let x = self.vector_from(frame, coords)?;
                let own_norm: Q = coords.values().map(|c| c * c).sum();
                let (own_j, own_image) = self.j_and_image(&x)?;
                let mut rest = x.clone();
                axpy(&mut rest, &-&own_j, &self.frame("j_basis")?[0]);
                if own_norm != *norm_sq || own_j != *j_value || own_image != *image_norm_sq {
                    return Err(format!(
                        "recomputed norm {own_norm}, J {own_j}, image norm {own_image} differ from the record"
                    ));
                }
                if rest.is_empty() != *kernel_zero {
                    return Err("kernel_component_zero is wrong".into());
                }
                if !rel.holds(image_norm_sq, &(bound_sq * norm_sq)) {
                    return Err(format!("{image_norm_sq} {rel:?} {bound_sq} * {norm_sq} is false"));
                }
            }
            Check::JValue {
                frame,
                coords,
                value,
                image_norm_sq,
            } => {
                let x = self.vector_from(frame, coords)?;
                let (own_j, own_image) = self.j_and_image(&x)?;
                if own_j != *value || own_image != *image_norm_sq {
                    return Err(format!("recomputed J {own_j} and image norm {own_image} differ from the record"));
                }
            }
            Check::AbsLess {
                left,
                right,
                left_hi,
                right_lo,
                bits,
            } => {
                if *bits == 0 || *bits > u64::from(MAX_VERIFY_BITS) {
                    return Err(format!("precision {bits} out of range"));
                }
                if left_hi >= right_lo {
                    return Err(format!("{left_hi} is not below {right_lo}"));
                }
                self.cert.values.confirm(left, left_hi, true)?;
                self.cert.values.confirm(right, right_lo, false)?;
            }
        }
        Ok(())
    }
}
