//! Key–value map descriptions.
//!
//! ```text
//! # comment
//! p = 5
//! n = 2                 # optional, default 1
//! k = 1                 # optional, default 1
//! unram_min_poly = [2, 0, 1]   # optional, low degree first
//! t = 1/5               # any other key is a parameter
//! num = [0, 1/2*pi, t*x + 3]
//! den = [1]
//! ```
//!
//! A coefficient is a sum of products of rationals, `x` (the unramified
//! generator), `pi` (the uniformizer), `p`, parameters and integer powers
//! of these, or a raw coefficient vector `{c0, c1, ...}` with the
//! coefficient of `x^i pi^j` at index `j*k + i`.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use berklocus::exactfield::Q;
use berklocus::{FieldElement, PrimeContext, RationalMapK};
use num_traits::{One, Zero};
use berklocus::Field;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, field `{field}`: {message}")]
pub struct ParseError {
    /// 1-based; 0 when the problem is not tied to a line.
    pub line: usize,
    pub field: String,
    pub message: String,
}

fn err(line: usize, field: impl Into<String>, message: impl Into<String>) -> ParseError {
    ParseError { line, field: field.into(), message: message.into() }
}

/// `key = value` lines with `#` comments. Values may span lines while
/// brackets are open.
pub fn key_values(text: &str) -> Result<Vec<(usize, String, String)>, ParseError> {
    let mut out: Vec<(usize, String, String)> = Vec::new();
    let mut open: Option<(usize, String, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((l, k, mut v)) = open.take() {
            v.push(' ');
            v.push_str(line);
            if depth(&v) > 0 {
                open = Some((l, k, v));
            } else {
                out.push((l, k, v));
            }
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(err(i + 1, line, "expected `key = value`"));
        };
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(err(i + 1, k, "invalid key"));
        }
        if out.iter().any(|(_, o, _)| *o == k) {
            return Err(err(i + 1, k, "duplicate key"));
        }
        if depth(&v) > 0 {
            open = Some((i + 1, k, v));
        } else {
            out.push((i + 1, k, v));
        }
    }
    if let Some((l, k, _)) = open {
        return Err(err(l, k, "unclosed bracket"));
    }
    Ok(out)
}

fn depth(s: &str) -> i64 {
    s.chars()
        .map(|c| match c {
            '[' | '{' | '(' => 1,
            ']' | '}' | ')' => -1,
            _ => 0,
        })
        .sum()
}

/// Items of `[a, b, ...]`, split at top-level commas.
fn list_items(v: &str) -> Option<Vec<String>> {
    let inner = v.trim().strip_prefix('[')?.strip_suffix(']')?;
    Some(split_top(inner, ','))
}

fn split_top(s: &str, sep: char) -> Vec<String> {
    if s.trim().is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let (mut d, mut cur) = (0, String::new());
    for c in s.chars() {
        match c {
            '[' | '{' | '(' => d += 1,
            ']' | '}' | ')' => d -= 1,
            _ => {}
        }
        if c == sep && d == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(c);
        }
    }
    out.push(cur.trim().to_string());
    out
}

/// Exact rational `a` or `a/b`; rejects a zero denominator.
pub fn parse_rational(s: &str) -> Result<Q, String> {
    let s = s.trim();
    if let Some((_, d)) = s.split_once('/') {
        if d.trim().parse::<num_bigint::BigInt>().is_ok_and(|d| d.is_zero()) {
            return Err(format!("zero denominator in `{s}`"));
        }
    }
    Q::from_str(s).map_err(|_| format!("`{s}` is not a rational number"))
}

fn parse_int<T: FromStr>(line: usize, field: &str, v: &str) -> Result<T, ParseError> {
    v.trim().parse().map_err(|_| err(line, field, format!("`{}` is not a non-negative integer", v.trim())))
}

/// Evaluation environment for coefficient expressions.
pub struct Scope<'a> {
    pub ctx: &'a Arc<PrimeContext>,
    pub params: &'a BTreeMap<String, Q>,
}

impl Scope<'_> {
    /// Parses one coefficient expression.
    pub fn element(&self, s: &str) -> Result<FieldElement, String> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            let c = split_top(inner, ',').iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>, _>>()?;
            if c.len() != self.ctx.dim() {
                return Err(format!("coefficient vector needs {} entries, found {}", self.ctx.dim(), c.len()));
            }
            return Ok(FieldElement::from_coeffs(self.ctx, c));
        }
        if s.is_empty() {
            return Err("empty coefficient".into());
        }
        let mut total = FieldElement::zero().with_ctx(self.ctx);
        for (neg, term) in split_terms(s)? {
            let t = self.term(&term)?;
            total = if neg { total - t } else { total + t };
        }
        Ok(total)
    }

    fn term(&self, s: &str) -> Result<FieldElement, String> {
        let mut acc = FieldElement::one().with_ctx(self.ctx);
        for f in s.split('*') {
            acc = acc * self.factor(f.trim())?;
        }
        Ok(acc)
    }

    fn factor(&self, s: &str) -> Result<FieldElement, String> {
        if let Some(rest) = s.strip_prefix('-') {
            return Ok(-self.factor(rest.trim())?);
        }
        let (base, exp) = match s.split_once('^') {
            Some((b, e)) => {
                let e: i64 = e.trim().parse().map_err(|_| format!("bad exponent in `{s}`"))?;
                (b.trim(), e)
            }
            None => (s, 1),
        };
        let ctx = self.ctx;
        let value = match base {
            "pi" => return Ok(FieldElement::pi_pow(ctx, exp)),
            "p" => return Ok(FieldElement::pi_pow(ctx, exp * ctx.n as i64)),
            "x" => FieldElement::gen(ctx),
            b if b.starts_with(|c: char| c.is_ascii_digit()) => {
                FieldElement::rational(parse_rational(b)?).with_ctx(ctx)
            }
            b => match self.params.get(b) {
                Some(v) => FieldElement::rational(v.clone()).with_ctx(ctx),
                None => return Err(format!("unknown name `{b}`")),
            },
        };
        if exp >= 0 {
            Ok(value.pow(exp as u64))
        } else if value.is_zero() {
            Err(format!("`{s}` divides by zero"))
        } else {
            Ok(FieldElement::one().with_ctx(ctx).div(&value).pow((-exp) as u64))
        }
    }
}

/// Splits a sum into signed terms; `-` after `*`, `/` or `^` belongs to a
/// factor.
fn split_terms(s: &str) -> Result<Vec<(bool, String)>, String> {
    let mut out = Vec::new();
    let (mut neg, mut cur) = (false, String::new());
    let mut prev: Option<char> = None;
    for c in s.chars() {
        let glued = matches!(prev, None | Some('*' | '/' | '^' | '+' | '-'));
        if (c == '+' || c == '-') && !glued {
            out.push((neg, cur.trim().to_string()));
            cur.clear();
            neg = c == '-';
        } else if c == '-' && matches!(prev, Some('+' | '-')) && cur.trim().is_empty() {
            neg = !neg;
        } else {
            cur.push(c);
        }
        if !c.is_whitespace() {
            prev = Some(c);
        }
    }
    out.push((neg, cur.trim().to_string()));
    if out.iter().any(|(_, t)| t.is_empty()) {
        return Err(format!("malformed sum `{s}`"));
    }
    Ok(out)
}

/// A parsed map description.
#[derive(Clone, Debug)]
pub struct MapInput {
    pub ctx: Arc<PrimeContext>,
    pub params: BTreeMap<String, Q>,
    pub map: RationalMapK,
}

const RESERVED: [&str; 6] = ["p", "n", "k", "unram_min_poly", "num", "den"];

/// Parses a description; `overrides` are `key=value` parameter settings that
/// take precedence over the file.
pub fn parse_map(text: &str, overrides: &[(String, String)]) -> Result<MapInput, ParseError> {
    let kv = key_values(text)?;
    let get = |k: &str| kv.iter().find(|(_, key, _)| key == k).map(|(l, _, v)| (*l, v.as_str()));
    let (pl, pv) = get("p").ok_or_else(|| err(0, "p", "missing"))?;
    let p: u64 = parse_int(pl, "p", pv)?;
    let n: usize = match get("n") {
        Some((l, v)) => parse_int(l, "n", v)?,
        None => 1,
    };
    let k: usize = match get("k") {
        Some((l, v)) => parse_int(l, "k", v)?,
        None => 1,
    };
    let unram = match get("unram_min_poly") {
        Some((l, v)) => {
            let items = list_items(v).ok_or_else(|| err(l, "unram_min_poly", "expected `[c0, c1, ...]`"))?;
            let mut c = Vec::new();
            for (i, it) in items.iter().enumerate() {
                c.push(
                    it.parse::<i64>()
                        .map_err(|_| err(l, format!("unram_min_poly[{i}]"), format!("`{it}` is not an integer")))?,
                );
            }
            Some(c)
        }
        None => None,
    };
    let line_of = |k: &str| get(k).map_or(0, |(l, _)| l);
    let ctx = PrimeContext::new(p, n, k, unram).map_err(|e| err(line_of("p"), "p", e.to_string()))?;

    let mut params = BTreeMap::new();
    for (l, key, v) in &kv {
        if !RESERVED.contains(&key.as_str()) {
            params.insert(key.clone(), parse_rational(v).map_err(|m| err(*l, key.as_str(), m))?);
        }
    }
    for (key, v) in overrides {
        if RESERVED.contains(&key.as_str()) {
            return Err(err(0, format!("--param {key}"), "only parameters can be overridden"));
        }
        params.insert(key.clone(), parse_rational(v).map_err(|m| err(0, format!("--param {key}"), m))?);
    }

    let scope = Scope { ctx: &ctx, params: &params };
    let poly = |key: &str| -> Result<Vec<FieldElement>, ParseError> {
        let (l, v) = get(key).ok_or_else(|| err(0, key, "missing"))?;
        let items = list_items(v).ok_or_else(|| err(l, key, "expected `[c0, c1, ...]`"))?;
        if items.is_empty() {
            return Err(err(l, key, "empty coefficient list"));
        }
        items
            .iter()
            .enumerate()
            .map(|(i, it)| scope.element(it).map_err(|m| err(l, format!("{key}[{i}]"), m)))
            .collect()
    };
    let num = poly("num")?;
    let den = poly("den")?;
    let map = RationalMapK::normalize(&ctx, berklocus::Poly::new(num), berklocus::Poly::new(den))
        .map_err(|e| err(line_of("num"), "num/den", e.to_string()))?;
    Ok(MapInput { ctx, params, map })
}

/// Renders a map in the input format; parameters are already substituted.
pub fn echo(f: &RationalMapK) -> String {
    let ctx = f.ctx();
    let list = |p: &berklocus::KPoly| {
        let c: Vec<String> = (0..=p.deg0()).map(|i| p.coeff(i).to_string()).collect();
        format!("[{}]", c.join(", "))
    };
    let mut out = format!("p = {}\nn = {}\nk = {}\n", ctx.p, ctx.n, ctx.k);
    if ctx.k > 1 {
        let c: Vec<String> = ctx.unram_min_poly.coeffs().iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("unram_min_poly = [{}]\n", c.join(", ")));
    }
    out.push_str(&format!("num = {}\nden = {}\n", list(f.num()), list(f.den())));
    out
}

/// Point centre given on the command line.
pub fn parse_center(ctx: &Arc<PrimeContext>, params: &BTreeMap<String, Q>, s: &str) -> Result<FieldElement, ParseError> {
    Scope { ctx, params }.element(s).map_err(|m| err(0, "--center", m))
}
