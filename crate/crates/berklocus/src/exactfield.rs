//! The working field `E(p, n, k)`: rationals with a root `π` of `πⁿ = p` and an
//! unramified generator `x` of degree `k` adjoined, with exact valuations and
//! Newton polygons.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{resultant, Field, Poly};
use crate::residue::{FqContext, FqElement};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(a: &BigInt, p: u64) -> i64 {
    debug_assert!(!a.is_zero());
    let pb = BigInt::from(p);
    let mut a = a.clone();
    let mut v = 0;
    loop {
        let (qq, r) = a.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        a = qq;
        v += 1;
    }
}

/// p-adic valuation of a rational, `None` for zero.
pub fn vp_rat(a: &Q, p: u64) -> Option<i64> {
    if a.is_zero() {
        None
    } else {
        Some(vp_int(a.numer(), p) - vp_int(a.denom(), p))
    }
}

/// Valuation with `+∞`; `Fin < Inf`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Fin(Q),
    Inf,
}

impl Val {
    pub fn fin(&self) -> Option<&Q> {
        match self {
            Val::Fin(v) => Some(v),
            Val::Inf => None,
        }
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Val::Inf)
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(v) => write!(f, "{v}"),
            Val::Inf => write!(f, "inf"),
        }
    }
}

#[derive(Debug, PartialEq)]
pub struct PrimeContext {
    pub p: u64,
    pub n: usize,
    pub k: usize,
    /// Monic, integer coefficients, irreducible mod p.
    pub unram_min_poly: Poly<Q>,
    pub residue: Arc<FqContext>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl PrimeContext {
    /// `unram_min_poly` defaults to `x` when `k = 1`; for `k > 1` a default
    /// irreducible polynomial is searched for.
    pub fn new(p: u64, n: usize, k: usize, unram_min_poly: Option<Vec<i64>>) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::InvalidContext(format!("{p} is not prime")));
        }
        if n == 0 || k == 0 {
            return Err(Error::InvalidContext("n and k must be at least 1".into()));
        }
        let coeffs: Vec<i64> = match unram_min_poly {
            Some(c) => c,
            None if k == 1 => vec![0, 1],
            None => FqContext::default_modulus(p, k),
        };
        if coeffs.len() != k + 1 || coeffs[k] != 1 {
            return Err(Error::InvalidContext(format!(
                "unramified polynomial must be monic of degree {k}"
            )));
        }
        let residue = FqContext::new(p, &coeffs)?;
        Ok(Arc::new(PrimeContext {
            p,
            n,
            k,
            unram_min_poly: Poly::new(coeffs.iter().map(|&c| q(c)).collect()),
            residue,
        }))
    }

    pub fn split(p: u64) -> Arc<Self> {
        Self::new(p, 1, 1, None).expect("valid prime")
    }

    /// Same field with ramification index `n'` (a multiple of `n`).
    pub fn with_ramification(&self, n2: usize) -> Result<Arc<Self>> {
        if !n2.is_multiple_of(self.n) {
            return Err(Error::InvalidContext(format!("{n2} is not a multiple of {}", self.n)));
        }
        let coeffs: Vec<i64> = self
            .unram_min_poly
            .coeffs()
            .iter()
            .map(|c| c.to_integer().to_i64().unwrap())
            .collect();
        PrimeContext::new(self.p, n2, self.k, Some(coeffs))
    }

    pub fn dim(&self) -> usize {
        self.n * self.k
    }

    pub fn p_big(&self) -> BigInt {
        BigInt::from(self.p)
    }
}

/// `Σ c_{ij} xⁱ πʲ`, stored π-major: `c[j·k + i]`.
///
/// Without a context the element is a bare rational (`c.len() == 1`); this
/// lets `zero()`/`one()` exist without a field at hand.
#[derive(Clone, Debug)]
pub struct FieldElement {
    ctx: Option<Arc<PrimeContext>>,
    c: Vec<Q>,
}

impl FieldElement {
    pub fn rational(r: Q) -> Self {
        FieldElement { ctx: None, c: vec![r] }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(q(n))
    }

    pub fn from_coeffs(ctx: &Arc<PrimeContext>, c: Vec<Q>) -> Self {
        assert_eq!(c.len(), ctx.dim());
        FieldElement { ctx: Some(ctx.clone()), c }
    }

    /// `coeffs[j][i]` is the coefficient of `xⁱ πʲ`.
    pub fn from_grid(ctx: &Arc<PrimeContext>, grid: &[Vec<Q>]) -> Result<Self> {
        let mut c = vec![Q::zero(); ctx.dim()];
        for (j, row) in grid.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                if i >= ctx.k || j >= ctx.n {
                    return Err(Error::InvalidContext("coefficient index out of range".into()));
                }
                c[j * ctx.k + i] = v.clone();
            }
        }
        Ok(FieldElement { ctx: Some(ctx.clone()), c })
    }

    pub fn pi(ctx: &Arc<PrimeContext>) -> Self {
        if ctx.n == 1 {
            return Self::int(ctx.p as i64).with_ctx(ctx);
        }
        let mut c = vec![Q::zero(); ctx.dim()];
        c[ctx.k] = Q::one();
        FieldElement { ctx: Some(ctx.clone()), c }
    }

    /// The unramified generator `x`.
    pub fn gen(ctx: &Arc<PrimeContext>) -> Self {
        if ctx.k == 1 {
            let r = -ctx.unram_min_poly.coeff(0);
            return Self::rational(r).with_ctx(ctx);
        }
        let mut c = vec![Q::zero(); ctx.dim()];
        c[1] = Q::one();
        FieldElement { ctx: Some(ctx.clone()), c }
    }

    /// `π^e` for any integer `e`.
    pub fn pi_pow(ctx: &Arc<PrimeContext>, e: i64) -> Self {
        let n = ctx.n as i64;
        let (qq, r) = e.div_mod_floor(&n);
        let pp = Q::from_integer(ctx.p_big());
        let scale = if qq >= 0 {
            pp.pow(qq as i32)
        } else {
            pp.recip().pow((-qq) as i32)
        };
        let mut c = vec![Q::zero(); ctx.dim()];
        c[r as usize * ctx.k] = scale;
        FieldElement { ctx: Some(ctx.clone()), c }
    }

    pub fn ctx(&self) -> Option<&Arc<PrimeContext>> {
        self.ctx.as_ref()
    }

    pub fn with_ctx(&self, ctx: &Arc<PrimeContext>) -> Self {
        FieldElement { ctx: Some(ctx.clone()), c: self.full(ctx) }
    }

    /// Coefficient vector expanded to the given context.
    pub fn full(&self, ctx: &Arc<PrimeContext>) -> Vec<Q> {
        match &self.ctx {
            Some(_) => self.c.clone(),
            None => {
                let mut c = vec![Q::zero(); ctx.dim()];
                c[0] = self.c[0].clone();
                c
            }
        }
    }

    /// `(i, j)` coefficient.
    pub fn coeff(&self, i: usize, j: usize) -> Q {
        match &self.ctx {
            Some(ctx) => self.c[j * ctx.k + i].clone(),
            None if i == 0 && j == 0 => self.c[0].clone(),
            None => Q::zero(),
        }
    }

    /// Rational value if the element lies in the rationals.
    pub fn as_rational(&self) -> Option<Q> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    /// Re-embeds into a field with a larger ramification index and either
    /// the same unramified part or, from `k = 1`, any unramified degree.
    pub fn embed(&self, ctx2: &Arc<PrimeContext>) -> Self {
        let Some(ctx) = &self.ctx else {
            return self.clone();
        };
        assert_eq!(ctx2.n % ctx.n, 0);
        assert!(ctx.k == 1 || **ctx == **ctx2 || (ctx.k == ctx2.k && ctx.unram_min_poly == ctx2.unram_min_poly));
        let r = ctx2.n / ctx.n;
        let mut c = vec![Q::zero(); ctx2.dim()];
        for j in 0..ctx.n {
            for i in 0..ctx.k {
                c[j * r * ctx2.k + i] = self.c[j * ctx.k + i].clone();
            }
        }
        FieldElement { ctx: Some(ctx2.clone()), c }
    }

    fn pair_ctx(&self, o: &Self) -> Option<Arc<PrimeContext>> {
        match (&self.ctx, &o.ctx) {
            (Some(a), Some(b)) => {
                debug_assert!(Arc::ptr_eq(a, b) || **a == **b, "mixed field contexts");
                Some(a.clone())
            }
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        }
    }

    /// The unramified component `a_j` (coefficients of `xⁱ` in `πʲ`).
    fn unram_part(&self, j: usize) -> Vec<Q> {
        match &self.ctx {
            Some(ctx) => self.c[j * ctx.k..(j + 1) * ctx.k].to_vec(),
            None => {
                if j == 0 {
                    vec![self.c[0].clone()]
                } else {
                    vec![Q::zero()]
                }
            }
        }
    }

    /// Exact valuation, normalised so that `val(p) = 1`.
    pub fn val(&self) -> Val {
        let Some(ctx) = &self.ctx else {
            assert!(self.c[0].is_zero(), "valuation of a bare rational needs val_in");
            return Val::Inf;
        };
        let mut best: Option<Q> = None;
        for j in 0..ctx.n {
            let a = self.unram_part(j);
            let Some(v) = unram_val(ctx, &a) else { continue };
            let v = v + qf(j as i64, ctx.n as i64);
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
        best.map_or(Val::Inf, Val::Fin)
    }

    /// Valuation against an explicit prime, usable for context-free constants.
    pub fn val_in(&self, ctx: &Arc<PrimeContext>) -> Val {
        match &self.ctx {
            Some(_) => self.val(),
            None => match vp_rat(&self.c[0], ctx.p) {
                Some(v) => Val::Fin(q(v)),
                None => Val::Inf,
            },
        }
    }

    /// Image in the residue field `F_{p^k}`.
    pub fn residue(&self, ctx: &Arc<PrimeContext>) -> Result<FqElement> {
        if self.is_zero() {
            return Ok(FqElement::zero_in(&ctx.residue));
        }
        match self.val_in(ctx) {
            Val::Fin(v) if v.is_negative() => return Err(Error::NegativeValuation),
            _ => {}
        }
        let a0 = match &self.ctx {
            Some(_) => self.unram_part(0),
            None => {
                let mut v = vec![Q::zero(); ctx.k];
                v[0] = self.c[0].clone();
                v
            }
        };
        let p = ctx.p;
        let digits: Vec<u64> = a0.iter().map(|c| rational_mod_p(c, p)).collect();
        Ok(FqElement::from_u64(&ctx.residue, &digits))
    }

    /// Lifts a residue-field element with balanced integer coefficients.
    pub fn lift(ctx: &Arc<PrimeContext>, r: &FqElement) -> Self {
        let p = ctx.p as i64;
        let mut c = vec![Q::zero(); ctx.dim()];
        for (i, d) in r.digits(&ctx.residue).iter().enumerate() {
            let mut v = *d as i64;
            if v > p / 2 {
                v -= p;
            }
            c[i] = q(v);
        }
        FieldElement { ctx: Some(ctx.clone()), c }
    }

    /// Drops everything of valuation `≥ m`; the result differs from `self` by
    /// an element of valuation at least `m`.
    pub fn truncate(&self, m: &Q) -> Self {
        let ctx = match &self.ctx {
            Some(c) => c.clone(),
            None => return self.clone(),
        };
        let mut c = self.c.clone();
        for j in 0..ctx.n {
            let need = m - qf(j as i64, ctx.n as i64);
            let need = need.ceil().to_integer().to_i64().unwrap();
            for i in 0..ctx.k {
                let idx = j * ctx.k + i;
                c[idx] = truncate_rational(&c[idx], ctx.p, need);
            }
        }
        FieldElement { ctx: Some(ctx), c }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = FieldElement::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    /// Number of nonzero stored coefficients, a rough size measure.
    pub fn height(&self) -> u64 {
        self.c
            .iter()
            .map(|x| x.numer().bits() + x.denom().bits())
            .sum()
    }
}

/// `c mod p` for a p-integral rational.
pub fn rational_mod_p(c: &Q, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let num = c.numer().mod_floor(&pb);
    let den = c.denom().mod_floor(&pb);
    assert!(!den.is_zero(), "rational not p-integral");
    let inv = den.modpow(&BigInt::from(p - 2), &pb);
    ((num * inv).mod_floor(&pb)).to_u64().unwrap()
}

/// `c'` in `Z[1/p]` with `v_p(c - c') ≥ need`, using balanced digits so that
/// small integers survive unchanged.
pub fn truncate_rational(c: &Q, p: u64, need: i64) -> Q {
    let Some(v) = vp_rat(c, p) else {
        return Q::zero();
    };
    if v >= need {
        return Q::zero();
    }
    let pb = BigInt::from(p);
    let prec = (need - v) as u32;
    let modulus = pb.pow(prec);
    let unit = if v >= 0 {
        c / Q::from_integer(pb.pow(v as u32))
    } else {
        c * Q::from_integer(pb.pow((-v) as u32))
    };
    let num = unit.numer().mod_floor(&modulus);
    let den = unit.denom().mod_floor(&modulus);
    let inv = modinv(&den, &modulus);
    let mut r = (num * inv).mod_floor(&modulus);
    if &r * 2 > modulus {
        r -= &modulus;
    }
    let r = Q::from_integer(r);
    if v >= 0 {
        r * Q::from_integer(pb.pow(v as u32))
    } else {
        r / Q::from_integer(pb.pow((-v) as u32))
    }
}

fn modinv(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(m)
}

/// `v_p(Norm(a)) / k` for an element of the unramified part, via resultant.
fn unram_val(ctx: &PrimeContext, a: &[Q]) -> Option<Q> {
    let ap = Poly::new(a.to_vec());
    let norm = match ap.degree() {
        None => return None,
        Some(0) => crate::poly::pow_scalar(&ap.coeff(0), ctx.k),
        Some(_) => resultant(&ctx.unram_min_poly, &ap),
    };
    let v = vp_rat(&norm, ctx.p)?;
    Some(qf(v, ctx.k as i64))
}

fn unram_mul(ctx: &PrimeContext, a: &[Q], b: &[Q]) -> Vec<Q> {
    let k = ctx.k;
    if k == 1 {
        return vec![&a[0] * &b[0]];
    }
    let mut prod = vec![Q::zero(); 2 * k - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    let m = ctx.unram_min_poly.coeffs();
    for top in (k..prod.len()).rev() {
        let t = prod[top].clone();
        if t.is_zero() {
            continue;
        }
        for i in 0..k {
            prod[top - k + i] -= &t * &m[i];
        }
        prod[top] = Q::zero();
    }
    prod.truncate(k);
    prod
}

fn mul_full(ctx: &PrimeContext, a: &[Q], b: &[Q]) -> Vec<Q> {
    let (n, k) = (ctx.n, ctx.k);
    let pp = Q::from_integer(ctx.p_big());
    let mut out = vec![Q::zero(); n * k];
    for j in 0..n {
        let aj = &a[j * k..(j + 1) * k];
        if aj.iter().all(|x| x.is_zero()) {
            continue;
        }
        for l in 0..n {
            let bl = &b[l * k..(l + 1) * k];
            if bl.iter().all(|x| x.is_zero()) {
                continue;
            }
            let prod = unram_mul(ctx, aj, bl);
            let (e, wrap) = if j + l >= n { (j + l - n, true) } else { (j + l, false) };
            for i in 0..k {
                let v = if wrap { &prod[i] * &pp } else { prod[i].clone() };
                out[e * k + i] += v;
            }
        }
    }
    out
}

/// Solves `M y = e₀` for the multiplication matrix of `a`.
fn inverse_full(ctx: &PrimeContext, a: &[Q]) -> Option<Vec<Q>> {
    let dim = ctx.dim();
    if dim == 1 {
        return if a[0].is_zero() { None } else { Some(vec![a[0].recip()]) };
    }
    // column c of M is a · basis_c
    let mut m = vec![vec![Q::zero(); dim + 1]; dim];
    for col in 0..dim {
        let mut e = vec![Q::zero(); dim];
        e[col] = Q::one();
        let prod = mul_full(ctx, a, &e);
        for row in 0..dim {
            m[row][col] = prod[row].clone();
        }
    }
    m[0][dim] = Q::one();
    for col in 0..dim {
        let piv = (col..dim).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..dim {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (x, y) in m[r][col..=dim].iter_mut().zip(&pivot_row[col..=dim]) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[dim].clone()).collect())
}

impl PartialEq for FieldElement {
    fn eq(&self, o: &Self) -> bool {
        match self.pair_ctx(o) {
            None => self.c == o.c,
            Some(ctx) => self.full(&ctx) == o.full(&ctx),
        }
    }
}

impl Eq for FieldElement {}

impl Zero for FieldElement {
    fn zero() -> Self {
        FieldElement::rational(Q::zero())
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
}

impl One for FieldElement {
    fn one() -> Self {
        FieldElement::rational(Q::one())
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, o: Self) -> Self {
        match self.pair_ctx(&o) {
            None => FieldElement::rational(&self.c[0] + &o.c[0]),
            Some(ctx) => {
                let a = self.full(&ctx);
                let b = o.full(&ctx);
                FieldElement {
                    c: a.into_iter().zip(b).map(|(x, y)| x + y).collect(),
                    ctx: Some(ctx),
                }
            }
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> Self {
        FieldElement { ctx: self.ctx, c: self.c.into_iter().map(|x| -x).collect() }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, o: Self) -> Self {
        if self.ctx.is_none() {
            let s = &self.c[0];
            return FieldElement { ctx: o.ctx, c: o.c.into_iter().map(|x| x * s).collect() };
        }
        if o.ctx.is_none() {
            let s = &o.c[0];
            return FieldElement { ctx: self.ctx, c: self.c.into_iter().map(|x| x * s).collect() };
        }
        let ctx = self.pair_ctx(&o).unwrap();
        let c = mul_full(&ctx, &self.c, &o.c);
        FieldElement { ctx: Some(ctx), c }
    }
}

impl Field for FieldElement {
    fn try_inv(&self) -> Option<Self> {
        match &self.ctx {
            None => {
                if self.c[0].is_zero() {
                    None
                } else {
                    Some(FieldElement::rational(self.c[0].recip()))
                }
            }
            Some(ctx) => inverse_full(ctx, &self.c).map(|c| FieldElement { ctx: Some(ctx.clone()), c }),
        }
    }

    fn mul_int(&self, n: i64) -> Self {
        let s = q(n);
        FieldElement { ctx: self.ctx.clone(), c: self.c.iter().map(|x| x * &s).collect() }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let ctx = self.ctx.as_ref().unwrap();
        let mut terms = Vec::new();
        for j in 0..ctx.n {
            for i in 0..ctx.k {
                let c = &self.c[j * ctx.k + i];
                if c.is_zero() {
                    continue;
                }
                let mut mono = Vec::new();
                match i {
                    0 => {}
                    1 => mono.push("x".to_string()),
                    _ => mono.push(format!("x^{i}")),
                }
                match j {
                    0 => {}
                    1 => mono.push("pi".to_string()),
                    _ => mono.push(format!("pi^{j}")),
                }
                let m = mono.join("*");
                terms.push(if m.is_empty() {
                    c.to_string()
                } else if c.is_one() {
                    m
                } else {
                    format!("{c}*{m}")
                });
            }
        }
        write!(f, "{}", terms.join(" + "))
    }
}

/// Polynomials over the working field.
pub type KPoly = Poly<FieldElement>;

/// Valuations of the coefficients of a polynomial.
pub fn coeff_vals(ctx: &Arc<PrimeContext>, p: &KPoly) -> Vec<Val> {
    p.coeffs().iter().map(|c| c.val_in(ctx)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub slope: Q,
    pub length: usize,
}

impl Segment {
    /// Valuation of the roots this segment accounts for.
    pub fn root_val(&self) -> Q {
        -self.slope.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Multiplicity of the root 0.
    pub zero_order: usize,
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    /// Root valuations with multiplicity, smallest slope first.
    pub fn root_vals(&self) -> Vec<(Q, usize)> {
        self.segments.iter().map(|s| (s.root_val(), s.length)).collect()
    }
}

/// Lower convex hull of `(i, val c_i)` over the finite points.
pub fn newton_polygon(ctx: &Arc<PrimeContext>, poly: &KPoly) -> Result<NewtonPolygon> {
    let zero_order = poly.order_at_zero().ok_or(Error::ZeroPolynomial)?;
    let pts: Vec<(i64, Q)> = coeff_vals(ctx, poly)
        .into_iter()
        .enumerate()
        .filter_map(|(i, v)| v.fin().map(|v| (i as i64, v.clone())))
        .collect();
    Ok(NewtonPolygon { zero_order, segments: lower_hull_segments(&pts) })
}

/// Segments of the lower convex hull of points sorted by abscissa.
pub fn lower_hull_segments(pts: &[(i64, Q)]) -> Vec<Segment> {
    let mut hull: Vec<(i64, Q)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (x1, y1) = &hull[hull.len() - 2];
            let (x2, y2) = &hull[hull.len() - 1];
            // drop middle point if it is on or above the chord
            let lhs = (y2 - y1) * q(p.0 - x1);
            let rhs = (&p.1 - y1) * q(x2 - x1);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p.clone());
    }
    hull.windows(2)
        .map(|w| Segment {
            slope: (&w[1].1 - &w[0].1) / q(w[1].0 - w[0].0),
            length: (w[1].0 - w[0].0) as usize,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiskMode {
    Open,
    Closed,
}

/// Number of roots `x` (with multiplicity) with `val(x - center) > s` (open)
/// or `≥ s` (closed).
pub fn count_roots_in_disk(
    ctx: &Arc<PrimeContext>,
    poly: &KPoly,
    center: &FieldElement,
    s: &Q,
    mode: DiskMode,
) -> Result<usize> {
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let shifted = poly.compose_affine(&FieldElement::one(), center);
    let np = newton_polygon(ctx, &shifted)?;
    let mut count = np.zero_order;
    for seg in &np.segments {
        let v = seg.root_val();
        let inside = match mode {
            DiskMode::Open => v > *s,
            DiskMode::Closed => v >= *s,
        };
        if inside {
            count += seg.length;
        }
    }
    Ok(count)
}

/// Compares two valuations where `None` stands for `+∞`.
pub fn cmp_val(a: &Val, b: &Val) -> Ordering {
    a.cmp(b)
}
