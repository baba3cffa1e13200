//! Residue fields `F_{p^k}`, polynomial factorisation over them, and fixed
//! points of rational maps over the residue field (tangent maps).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{Field, Poly};

/// Default seed for equal-degree splitting.
pub const DEFAULT_SEED: u64 = 0x5eed_f1e1d;

/// `F_p[x]/(modulus)`.
#[derive(Debug, PartialEq, Eq)]
pub struct FqContext {
    pub p: u64,
    pub k: usize,
    /// Monic, length `k + 1`, entries in `[0, p)`.
    pub modulus: Vec<u64>,
}

impl FqContext {
    pub fn new(p: u64, coeffs: &[i64]) -> Result<Arc<Self>> {
        let k = coeffs.len() - 1;
        let modulus: Vec<u64> = coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
        if modulus[k] != 1 {
            return Err(Error::InvalidContext("modulus must be monic".into()));
        }
        let ctx = Arc::new(FqContext { p, k, modulus });
        if k > 1 && !is_irreducible_mod_p(p, &ctx.modulus) {
            return Err(Error::InvalidContext(format!(
                "unramified polynomial is reducible mod {p}"
            )));
        }
        Ok(ctx)
    }

    pub fn prime(p: u64) -> Arc<Self> {
        Arc::new(FqContext { p, k: 1, modulus: vec![0, 1] })
    }

    /// First monic irreducible of degree `k` in lexicographic search order.
    pub fn default_modulus(p: u64, k: usize) -> Vec<i64> {
        let total = (p as u128).pow(k as u32);
        for idx in 0..total {
            let mut c = Vec::with_capacity(k + 1);
            let mut t = idx;
            for _ in 0..k {
                c.push((t % p as u128) as u64);
                t /= p as u128;
            }
            c.push(1);
            if c[0] != 0 && is_irreducible_mod_p(p, &c) {
                return c.into_iter().map(|v| v as i64).collect();
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn order(&self) -> BigInt {
        BigInt::from(self.p).pow(self.k as u32)
    }

    pub fn elements(self: &Arc<Self>) -> Vec<FqElement> {
        let total = (self.p as u128).pow(self.k as u32);
        (0..total)
            .map(|mut idx| {
                let mut d = Vec::with_capacity(self.k);
                for _ in 0..self.k {
                    d.push((idx % self.p as u128) as u64);
                    idx /= self.p as u128;
                }
                FqElement::from_u64(self, &d)
            })
            .collect()
    }
}

fn is_irreducible_mod_p(p: u64, c: &[u64]) -> bool {
    let base = FqContext::prime(p);
    let poly = Poly::new(c.iter().map(|&v| FqElement::from_u64(&base, &[v])).collect());
    let f = factor(&poly).expect("nonzero");
    f.len() == 1 && f[0].1 == 1 && f[0].0.degree() == poly.degree()
}

/// Element of `F_{p^k}`; small integers may live without a context.
#[derive(Clone, Debug)]
pub struct FqElement {
    ctx: Option<Arc<FqContext>>,
    c: Vec<u64>,
    /// Value of a context-free constant.
    free: i64,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

impl FqElement {
    pub fn from_u64(ctx: &Arc<FqContext>, d: &[u64]) -> Self {
        let mut c = vec![0; ctx.k];
        for (i, v) in d.iter().enumerate().take(ctx.k) {
            c[i] = v % ctx.p;
        }
        FqElement { ctx: Some(ctx.clone()), c, free: 0 }
    }

    pub fn from_int(ctx: &Arc<FqContext>, n: i64) -> Self {
        Self::from_u64(ctx, &[n.rem_euclid(ctx.p as i64) as u64])
    }

    pub fn zero_in(ctx: &Arc<FqContext>) -> Self {
        Self::from_int(ctx, 0)
    }

    /// The class of `x`.
    pub fn gen(ctx: &Arc<FqContext>) -> Self {
        if ctx.k == 1 {
            let r = (ctx.p - ctx.modulus[0]) % ctx.p;
            return Self::from_u64(ctx, &[r]);
        }
        let mut d = vec![0; ctx.k];
        d[1] = 1;
        Self::from_u64(ctx, &d)
    }

    pub fn ctx(&self) -> Option<&Arc<FqContext>> {
        self.ctx.as_ref()
    }

    pub fn with_ctx(&self, ctx: &Arc<FqContext>) -> Self {
        match &self.ctx {
            Some(_) => self.clone(),
            None => Self::from_int(ctx, self.free),
        }
    }

    pub fn digits(&self, ctx: &Arc<FqContext>) -> Vec<u64> {
        self.with_ctx(ctx).c
    }

    fn pair(&self, o: &Self) -> Option<Arc<FqContext>> {
        self.ctx.clone().or_else(|| o.ctx.clone())
    }

    pub fn pow_big(&self, e: &BigInt) -> Self {
        let mut acc = FqElement::one();
        for i in (0..e.bits()).rev() {
            acc = acc.clone() * acc;
            if e.bit(i) {
                acc = acc * self.clone();
            }
        }
        acc
    }

    pub fn pow(&self, e: u64) -> Self {
        self.pow_big(&BigInt::from(e))
    }

    /// Lies in the prime field.
    pub fn is_prime_field(&self) -> bool {
        self.c.iter().skip(1).all(|&v| v == 0)
    }
}

impl PartialEq for FqElement {
    fn eq(&self, o: &Self) -> bool {
        match self.pair(o) {
            None => self.free == o.free,
            Some(ctx) => self.with_ctx(&ctx).c == o.with_ctx(&ctx).c,
        }
    }
}

impl Eq for FqElement {}

impl Zero for FqElement {
    fn zero() -> Self {
        FqElement { ctx: None, c: Vec::new(), free: 0 }
    }
    fn is_zero(&self) -> bool {
        match &self.ctx {
            None => self.free == 0,
            Some(_) => self.c.iter().all(|&v| v == 0),
        }
    }
}

impl One for FqElement {
    fn one() -> Self {
        FqElement { ctx: None, c: Vec::new(), free: 1 }
    }
}

impl Add for FqElement {
    type Output = FqElement;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, o: Self) -> Self {
        match self.pair(&o) {
            None => FqElement { ctx: None, c: Vec::new(), free: self.free + o.free },
            Some(ctx) => {
                let a = self.with_ctx(&ctx);
                let b = o.with_ctx(&ctx);
                let c = a.c.iter().zip(&b.c).map(|(x, y)| (x + y) % ctx.p).collect();
                FqElement { ctx: Some(ctx), c, free: 0 }
            }
        }
    }
}

impl Neg for FqElement {
    type Output = FqElement;
    fn neg(self) -> Self {
        match &self.ctx {
            None => FqElement { ctx: None, c: Vec::new(), free: -self.free },
            Some(ctx) => {
                let p = ctx.p;
                let c = self.c.iter().map(|&x| (p - x) % p).collect();
                FqElement { ctx: self.ctx.clone(), c, free: 0 }
            }
        }
    }
}

impl Sub for FqElement {
    type Output = FqElement;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for FqElement {
    type Output = FqElement;
    fn mul(self, o: Self) -> Self {
        let Some(ctx) = self.pair(&o) else {
            return FqElement { ctx: None, c: Vec::new(), free: self.free * o.free };
        };
        let a = self.with_ctx(&ctx);
        let b = o.with_ctx(&ctx);
        let (p, k) = (ctx.p, ctx.k);
        let mut prod = vec![0u64; 2 * k - 1];
        for i in 0..k {
            if a.c[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + mulmod(a.c[i], b.c[j], p)) % p;
            }
        }
        for top in (k..prod.len()).rev() {
            let t = prod[top];
            if t == 0 {
                continue;
            }
            for i in 0..k {
                let sub = mulmod(t, ctx.modulus[i], p);
                prod[top - k + i] = (prod[top - k + i] + p - sub) % p;
            }
            prod[top] = 0;
        }
        prod.truncate(k);
        FqElement { ctx: Some(ctx), c: prod, free: 0 }
    }
}

impl Field for FqElement {
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        match &self.ctx {
            None => match self.free {
                1 => Some(FqElement::one()),
                -1 => Some(-FqElement::one()),
                _ => panic!("inverse of a context-free residue constant"),
            },
            Some(ctx) => Some(self.pow_big(&(ctx.order() - 2))),
        }
    }

    fn mul_int(&self, n: i64) -> Self {
        match &self.ctx {
            None => FqElement { ctx: None, c: Vec::new(), free: self.free * n },
            Some(ctx) => self.clone() * FqElement::from_int(ctx, n),
        }
    }
}

impl fmt::Display for FqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(ctx) = &self.ctx else {
            return write!(f, "{}", self.free);
        };
        if ctx.k == 1 || self.is_prime_field() {
            return write!(f, "{}", self.c[0]);
        }
        let p = Poly::new(
            self.c
                .iter()
                .map(|&v| FqElement::from_u64(&FqContext::prime(ctx.p), &[v]))
                .collect(),
        );
        write!(f, "{}", crate::poly::render(&p, "x", |a| a.to_string()))
    }
}

pub type FqPoly = Poly<FqElement>;

/// Element of `F_q[y]/(modulus)` for an irreducible `modulus` over `F_q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtElement {
    pub modulus: FqPoly,
    pub value: FqPoly,
}

impl ExtElement {
    pub fn new(modulus: &FqPoly, value: FqPoly) -> Self {
        ExtElement { modulus: modulus.clone(), value: value.rem(modulus) }
    }

    /// The root `y` of the modulus.
    pub fn root(modulus: &FqPoly) -> Self {
        Self::new(modulus, FqPoly::x())
    }

    pub fn base(modulus: &FqPoly, a: FqElement) -> Self {
        Self::new(modulus, FqPoly::constant(a))
    }

    pub fn degree(&self) -> usize {
        self.modulus.deg0()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.degree() == Some(0) && self.value.coeff(0).is_one_like()
    }

    /// Value in the base field, if it lies there.
    pub fn as_base(&self) -> Option<FqElement> {
        match self.value.degree() {
            None => Some(FqElement::zero()),
            Some(0) => Some(self.value.coeff(0)),
            _ => None,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.modulus, &self.value + &o.value)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.modulus, &self.value - &o.value)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.modulus, self.value.mul_mod(&o.value, &self.modulus))
    }

    pub fn inv(&self) -> Option<Self> {
        self.value.inv_mod(&self.modulus).map(|v| Self::new(&self.modulus, v))
    }

    pub fn pow_big(&self, e: &BigInt) -> Self {
        Self::new(&self.modulus, self.value.pow_mod(e, &self.modulus))
    }

    /// Sum of the Galois conjugates over `F_q`.
    pub fn trace(&self, fq: &Arc<FqContext>) -> FqElement {
        let mut acc = self.clone();
        let mut cur = self.clone();
        for _ in 1..self.degree() {
            cur = cur.pow_big(&fq.order());
            acc = acc.add(&cur);
        }
        acc.as_base().expect("trace lies in the base field")
    }

    pub fn eval_poly(&self, p: &FqPoly) -> Self {
        let mut acc = Self::new(&self.modulus, FqPoly::zero());
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&Self::base(&self.modulus, c.clone()));
        }
        acc
    }
}

impl FqElement {
    fn is_one_like(&self) -> bool {
        self.clone() == FqElement::one()
    }
}

impl fmt::Display for ExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_base() {
            Some(b) => write!(f, "{b}"),
            None => write!(f, "{}", crate::poly::render(&self.value, "y", |a| a.to_string())),
        }
    }
}

fn fq_ctx_of(p: &FqPoly) -> Arc<FqContext> {
    p.coeffs()
        .iter()
        .find_map(|c| c.ctx().cloned())
        .expect("polynomial carries a residue field context")
}

/// `p`-th root of a polynomial whose derivative vanishes.
fn pth_root(f: &FqPoly, ctx: &Arc<FqContext>) -> FqPoly {
    let p = ctx.p as usize;
    // a^(1/p) = a^(p^(k-1))
    let e = BigInt::from(ctx.p).pow(ctx.k as u32 - 1);
    let n = f.deg0() / p;
    Poly::new(
        (0..=n)
            .map(|i| f.coeff(i * p).with_ctx(ctx).pow_big(&e))
            .collect(),
    )
}

/// Squarefree decomposition: pairs `(g, e)` with `f = lead · Π gᵉ`.
pub fn squarefree(f: &FqPoly) -> Vec<(FqPoly, usize)> {
    let ctx = fq_ctx_of(f);
    let mut out = Vec::new();
    sqf_rec(&f.monic(), 1, &ctx, &mut out);
    out
}

fn sqf_rec(f: &FqPoly, mult: usize, ctx: &Arc<FqContext>, out: &mut Vec<(FqPoly, usize)>) {
    if f.deg0() == 0 {
        return;
    }
    let df = f.derivative();
    if df.is_zero() {
        sqf_rec(&pth_root(f, ctx), mult * ctx.p as usize, ctx, out);
        return;
    }
    let mut c = f.gcd(&df);
    let mut w = f.div_exact(&c);
    let mut i = 1;
    while w.deg0() > 0 {
        let y = w.gcd(&c);
        let z = w.div_exact(&y);
        if z.deg0() > 0 {
            out.push((z, i * mult));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w);
    }
    if c.deg0() > 0 {
        sqf_rec(&pth_root(&c, ctx), mult * ctx.p as usize, ctx, out);
    }
}

/// Distinct-degree factorisation of a monic squarefree polynomial.
fn ddf(f: &FqPoly, ctx: &Arc<FqContext>) -> Vec<(FqPoly, usize)> {
    let q = ctx.order();
    let mut out = Vec::new();
    let mut f = f.clone();
    let x = FqPoly::x();
    let mut h = x.rem(&f);
    let mut d = 1;
    while f.deg0() >= 2 * d {
        h = h.pow_mod(&q, &f);
        let g = f.gcd(&(&h - &x));
        if g.deg0() > 0 {
            out.push((g.clone(), d));
            f = f.div_exact(&g);
            h = h.rem(&f);
        }
        d += 1;
    }
    if f.deg0() > 0 {
        let deg = f.deg0();
        out.push((f, deg));
    }
    out
}

/// Cantor–Zassenhaus splitting of a product of irreducibles of degree `d`.
fn edf(f: &FqPoly, d: usize, ctx: &Arc<FqContext>, rng: &mut ChaCha8Rng) -> Vec<FqPoly> {
    let n = f.deg0();
    if n == d {
        return vec![f.clone()];
    }
    let q = ctx.order();
    loop {
        let a = random_poly(n, ctx, rng);
        if a.deg0() == 0 {
            continue;
        }
        let b = if ctx.p == 2 {
            // trace map a + a^2 + ... + a^(2^(kd-1))
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..(ctx.k * d) {
                t = t.mul_mod(&t, f);
                acc = &acc + &t;
            }
            acc
        } else {
            let e = (q.pow(d as u32) - 1u32) / 2u32;
            &a.pow_mod(&e, f) - &FqPoly::one()
        };
        let g = f.gcd(&b);
        if g.deg0() > 0 && g.deg0() < n {
            let mut out = edf(&g, d, ctx, rng);
            out.extend(edf(&f.div_exact(&g), d, ctx, rng));
            return out;
        }
    }
}

fn random_poly(n: usize, ctx: &Arc<FqContext>, rng: &mut ChaCha8Rng) -> FqPoly {
    Poly::new(
        (0..n)
            .map(|_| {
                let d: Vec<u64> = (0..ctx.k).map(|_| rng.gen_range(0..ctx.p)).collect();
                FqElement::from_u64(ctx, &d)
            })
            .collect(),
    )
}

/// Irreducible factorisation with multiplicities; factors are monic and
/// sorted by degree then coefficients.
pub fn factor(f: &FqPoly) -> Result<Vec<(FqPoly, usize)>> {
    factor_with_seed(f, DEFAULT_SEED)
}

pub fn factor_with_seed(f: &FqPoly, seed: u64) -> Result<Vec<(FqPoly, usize)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.deg0() == 0 {
        return Ok(Vec::new());
    }
    let ctx = fq_ctx_of(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (g, e) in squarefree(f) {
        for (h, d) in ddf(&g, &ctx) {
            for irr in edf(&h, d, &ctx, &mut rng) {
                out.push((irr.monic(), e));
            }
        }
    }
    out.sort_by_key(|(g, e)| (g.deg0(), poly_key(g, &ctx), *e));
    Ok(out)
}

fn poly_key(g: &FqPoly, ctx: &Arc<FqContext>) -> Vec<u64> {
    g.coeffs().iter().flat_map(|c| c.digits(ctx)).collect()
}

/// Roots in `F_q` with multiplicity.
pub fn roots(f: &FqPoly) -> Result<Vec<(FqElement, usize)>> {
    Ok(factor(f)?
        .into_iter()
        .filter(|(g, _)| g.deg0() == 1)
        .map(|(g, e)| (-g.coeff(0), e))
        .collect())
}

/// Rational map over the residue field with coprime numerator and denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct FqRationalMap {
    pub num: FqPoly,
    pub den: FqPoly,
}

impl FqRationalMap {
    /// Cancels the gcd and makes the leading coefficient of the denominator
    /// (or of the numerator when the denominator vanishes) equal to 1.
    pub fn new(num: FqPoly, den: FqPoly) -> Result<Self> {
        if num.is_zero() && den.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num.div_exact(&g), den.div_exact(&g));
        let lead = if d.is_zero() { n.lead() } else { d.lead() };
        let inv = lead.try_inv().unwrap();
        n = n.scale(&inv);
        d = d.scale(&inv);
        Ok(FqRationalMap { num: n, den: d })
    }

    pub fn degree(&self) -> usize {
        if self.den.is_zero() {
            return 0;
        }
        self.num.deg0().max(self.den.deg0())
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn is_identity(&self) -> bool {
        self.den.degree() == Some(0) && self.num == Poly::x().scale(&self.den.coeff(0))
    }

    /// `1/m(1/w)`.
    pub fn flip(&self) -> Self {
        let dg = self.degree();
        FqRationalMap::new(self.den.reverse(dg), self.num.reverse(dg)).unwrap()
    }

    /// Fixed-point polynomial `N(w) - w·D(w)`.
    pub fn fixed_poly(&self) -> FqPoly {
        &self.num - &(&Poly::x() * &self.den)
    }

    /// Derivative as a pair `(N'D - ND', D²)`.
    pub fn derivative(&self) -> (FqPoly, FqPoly) {
        let top = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        (top, &self.den * &self.den)
    }

    pub fn eval(&self, y: &FqElement) -> Option<FqElement> {
        let d = self.den.eval(y);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(y).div(&d))
        }
    }

    pub fn render(&self, var: &str) -> String {
        let n = crate::poly::render(&self.num, var, |a| a.to_string());
        if self.den.degree() == Some(0) && self.den.coeff(0).is_one_like() {
            return n;
        }
        let d = crate::poly::render(&self.den, var, |a| a.to_string());
        let wrap = |s: String| if s.contains(' ') { format!("({s})") } else { s };
        format!("{}/{}", wrap(n), wrap(d))
    }
}

/// Where a fixed direction sits: a Galois orbit of finite points given by an
/// irreducible factor, or `∞`.
#[derive(Clone, Debug, PartialEq)]
pub enum DirectionPoint {
    Finite(FqPoly),
    Infinity,
}

impl DirectionPoint {
    /// The root when the factor is linear.
    pub fn rational(&self) -> Option<FqElement> {
        match self {
            DirectionPoint::Finite(g) if g.deg0() == 1 => Some(-g.coeff(0).div(&g.coeff(1))),
            _ => None,
        }
    }

    /// Number of conjugate points in the orbit.
    pub fn orbit_size(&self) -> usize {
        match self {
            DirectionPoint::Finite(g) => g.deg0(),
            DirectionPoint::Infinity => 1,
        }
    }
}

impl fmt::Display for DirectionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectionPoint::Infinity => write!(f, "inf"),
            DirectionPoint::Finite(g) => match self.rational() {
                Some(r) => write!(f, "{r}"),
                None => write!(f, "root of {}", crate::poly::render(g, "w", |a| a.to_string())),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TangentFixedDirection {
    pub location: DirectionPoint,
    pub multiplicity: usize,
    /// Derivative at the chosen root, in `F_q[y]/(factor)`.
    pub multiplier: ExtElement,
    pub critically_fixed: bool,
}

impl TangentFixedDirection {
    pub fn orbit_size(&self) -> usize {
        self.location.orbit_size()
    }
}

/// All fixed points of a non-identity map over the algebraic closure,
/// one entry per Galois orbit.
pub fn fixed_points(m: &FqRationalMap) -> Result<Vec<TangentFixedDirection>> {
    if m.is_identity() {
        return Err(Error::IdentityMap);
    }
    let mut out = Vec::new();
    let p = m.fixed_poly();
    let (dn, dd) = m.derivative();
    if !p.is_zero() && p.deg0() > 0 {
        for (g, e) in factor(&p)? {
            let y = ExtElement::root(&g);
            let lam = y.eval_poly(&dn).mul(&y.eval_poly(&dd).inv().expect("fixed point is not a pole"));
            out.push(TangentFixedDirection {
                critically_fixed: lam.is_zero(),
                location: DirectionPoint::Finite(g),
                multiplicity: e,
                multiplier: lam,
            });
        }
    }
    let flipped = m.flip();
    let fp = flipped.fixed_poly();
    let e_inf = fp.order_at_zero().unwrap_or(0);
    if e_inf > 0 {
        let ctx = poly_ctx(m);
        let g = FqPoly::x().map(|c| c.with_ctx(&ctx));
        let (fn_, fd) = flipped.derivative();
        let lam = fn_.eval(&FqElement::zero()).div(&fd.eval(&FqElement::zero()));
        out.push(TangentFixedDirection {
            critically_fixed: lam.is_zero(),
            location: DirectionPoint::Infinity,
            multiplicity: e_inf,
            multiplier: ExtElement::base(&g, lam),
        });
    }
    Ok(out)
}

fn poly_ctx(m: &FqRationalMap) -> Arc<FqContext> {
    m.num
        .coeffs()
        .iter()
        .chain(m.den.coeffs())
        .find_map(|c| c.ctx().cloned())
        .expect("map carries a residue field context")
}

/// Derivative at a fixed point.
pub fn multiplier(m: &FqRationalMap, at: &DirectionPoint) -> Result<ExtElement> {
    let fixed = fixed_points(m)?;
    fixed
        .into_iter()
        .find(|d| d.location == *at)
        .map(|d| d.multiplier)
        .ok_or(Error::NotFixed)
}

/// Checks `Σ 1/(1 - λ) = 1` over all fixed points.
pub fn holomorphic_index_check(m: &FqRationalMap) -> Result<bool> {
    let fixed = fixed_points(m)?;
    let ctx = poly_ctx(m);
    let mut total = FqElement::zero_in(&ctx);
    for d in &fixed {
        let one = ExtElement::base(&d.multiplier.modulus, FqElement::one());
        let denom = one.sub(&d.multiplier);
        let term = denom.inv().ok_or(Error::MultiplierOne)?;
        total = total + term.trace(&ctx);
    }
    Ok(total == FqElement::one())
}

/// Local degree of `m` at a rational point (or `∞`), from the order of
/// vanishing of `m(w) - m(y)`.
pub fn local_degree_at(m: &FqRationalMap, y: Option<&FqElement>) -> usize {
    match y {
        None => local_degree_at(&m.flip(), Some(&FqElement::zero())),
        Some(y) => match m.eval(y) {
            Some(v) => {
                let diff = &m.num - &m.den.scale(&v);
                let shifted = diff.compose_affine(&FqElement::one(), y);
                shifted.order_at_zero().unwrap_or(usize::MAX)
            }
            None => {
                // pole: local degree is the order of the pole
                let shifted = m.den.compose_affine(&FqElement::one(), y);
                shifted.order_at_zero().unwrap_or(usize::MAX)
            }
        },
    }
}
