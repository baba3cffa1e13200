//! Independent ground truth: closed forms for degree one maps, worked
//! fixtures with hand-derived expectations, a second reduction test coded
//! separately from `berkmap`, and random map generators.

use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::berkmap::{RationalMapK, TypeIIPoint};
use crate::error::{Error, Result};
use crate::exactfield::{q, qf, FieldElement, KPoly, PrimeContext, Val, Q};
use crate::fixlocus::{FixLocus, PointClass};
use crate::poly::{Field, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MoebiusCase {
    Identity,
    /// Conjugate to `z + 1`.
    Additive,
    /// `λz` with `|λ| ≠ 1`.
    ScalingNonunit,
    /// `λz` with `|λ| = |λ − 1| = 1`.
    ScalingUnitNontrivialResidue,
    /// `λz` with `0 < |λ − 1| < 1`.
    ScalingUnitTrivialResidue,
}

/// `f = h ∘ g ∘ h⁻¹` with `h(z) = scale·z + shift` and `g` the normal form
/// (`z`, `z + 1` or `λz`).
#[derive(Clone, Debug, PartialEq)]
pub struct MoebiusFixDescription {
    pub case: MoebiusCase,
    pub lambda: FieldElement,
    pub scale: FieldElement,
    pub shift: FieldElement,
    ctx: Arc<PrimeContext>,
}

/// Normal form of an affine map `λz + μ`.
pub fn classify_moebius(f: &RationalMapK) -> Result<MoebiusFixDescription> {
    if f.degree() != 1 {
        return Err(Error::NotDegreeOne);
    }
    if f.den().deg0() != 0 {
        return Err(Error::PreconditionViolated("only affine maps are classified".into()));
    }
    let ctx = f.ctx().clone();
    let d0 = f.den().coeff(0);
    let lambda = f.num().coeff(1).div(&d0);
    let mu = f.num().coeff(0).div(&d0);
    let one = FieldElement::one().with_ctx(&ctx);
    let zero = FieldElement::zero().with_ctx(&ctx);
    let desc = |case, scale, shift| MoebiusFixDescription { case, lambda: lambda.clone(), scale, shift, ctx: ctx.clone() };
    if lambda == one {
        return Ok(if mu.is_zero() {
            desc(MoebiusCase::Identity, one, zero)
        } else {
            desc(MoebiusCase::Additive, mu, zero)
        });
    }
    let shift = mu.div(&(one.clone() - lambda.clone()));
    let case = if lambda.val_in(&ctx) != Val::Fin(Q::zero()) {
        MoebiusCase::ScalingNonunit
    } else if (lambda.clone() - one.clone()).val_in(&ctx) == Val::Fin(Q::zero()) {
        MoebiusCase::ScalingUnitNontrivialResidue
    } else {
        MoebiusCase::ScalingUnitTrivialResidue
    };
    Ok(desc(case, one, shift))
}

impl MoebiusFixDescription {
    /// `ζ_{a,s}` in normal-form coordinates.
    fn normal(&self, x: &TypeIIPoint) -> (Val, Q) {
        let a = (x.center.clone() - self.shift.clone()).div(&self.scale);
        let vs = self.scale.val_in(&self.ctx).fin().cloned().unwrap();
        (a.val_in(&self.ctx), &x.s - vs)
    }

    fn lambda_minus_one_val(&self) -> Val {
        (self.lambda.clone() - FieldElement::one()).val_in(&self.ctx)
    }
}

/// Membership of a type II point in the fixed locus, from the closed forms.
pub fn moebius_membership(desc: &MoebiusFixDescription, x: &TypeIIPoint) -> bool {
    let (va, s) = desc.normal(x);
    match desc.case {
        MoebiusCase::Identity => true,
        // z + 1 moves every disk of radius < 1 off itself and fixes the rest
        MoebiusCase::Additive => !s.is_positive(),
        MoebiusCase::ScalingNonunit => false,
        MoebiusCase::ScalingUnitNontrivialResidue => match va {
            Val::Inf => true,
            Val::Fin(v) => v >= s,
        },
        MoebiusCase::ScalingUnitTrivialResidue => match va {
            Val::Inf => true,
            Val::Fin(v) => s <= v + desc.lambda_minus_one_val().fin().cloned().unwrap(),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TubeRadius {
    Unbounded,
    /// Radius in the `s` coordinate.
    Finite(Q),
}

/// Radius of the smallest strong tube around the axis containing the locus.
pub fn tube_radius(desc: &MoebiusFixDescription) -> Result<TubeRadius> {
    match desc.case {
        MoebiusCase::Additive => Ok(TubeRadius::Unbounded),
        MoebiusCase::ScalingUnitTrivialResidue => {
            Ok(TubeRadius::Finite(desc.lambda_minus_one_val().fin().cloned().unwrap()))
        }
        _ => Err(Error::WrongCase),
    }
}

/// Whether `x` is fixed, by conjugating explicitly and dividing by the last
/// coefficient of least valuation (numerator first, then denominator).
pub fn brute_is_fixed(f: &RationalMapK, x: &TypeIIPoint) -> Result<bool> {
    let ctx = f.ctx();
    let ns = &x.s * Q::from_integer((ctx.n as i64).into());
    if !ns.is_integer() {
        let b = x.s.denom().to_usize().unwrap();
        return Err(Error::NeedsExtension { n: num_integer::lcm(ctx.n, b), k: ctx.k });
    }
    let u = FieldElement::pi_pow(ctx, ns.to_integer().to_i64().unwrap());
    let a = x.center.with_ctx(ctx);
    // z ↦ u z + a, written out coefficient by coefficient
    let subst = |p: &KPoly| -> KPoly {
        let lin = Poly::new(vec![a.clone(), u.clone()]);
        let mut acc = KPoly::zero();
        let mut pw = KPoly::one();
        for c in p.coeffs() {
            acc = &acc + &pw.scale(c);
            pw = &pw * &lin;
        }
        acc
    };
    let nn = subst(f.num());
    let dd = subst(f.den());
    let top = &nn - &dd.scale(&a);
    let bot = dd.scale(&u);
    let mut pick: Option<(Q, FieldElement)> = None;
    for c in top.coeffs().iter().chain(bot.coeffs().iter()) {
        if let Val::Fin(v) = c.val_in(ctx) {
            if pick.as_ref().is_none_or(|(w, _)| v <= *w) {
                pick = Some((v, c.clone()));
            }
        }
    }
    let (_, c) = pick.expect("nonzero map");
    let red = |p: &KPoly| -> Vec<crate::residue::FqElement> {
        p.coeffs().iter().map(|x| x.div(&c).residue(ctx).expect("integral after scaling")).collect()
    };
    let (rn, rd) = (red(&top), red(&bot));
    for i in 0..rn.len() {
        for j in 0..rd.len() {
            let ni = &rn[i];
            let dj = &rd[j];
            let nj = rn.get(j).cloned().unwrap_or_else(|| crate::residue::FqElement::zero_in(&ctx.residue));
            let di = rd.get(i).cloned().unwrap_or_else(|| crate::residue::FqElement::zero_in(&ctx.residue));
            if ni.clone() * dj.clone() != nj * di {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Expected outcome of exploring a fixture. `None` fields are not asserted.
#[derive(Clone, Debug)]
pub struct Expected {
    /// The map is the identity and exploration must refuse it.
    pub identity: bool,
    /// `(kind name, count)`, sorted by name.
    pub components: Option<Vec<(&'static str, usize)>>,
    pub weight_total: usize,
    /// Classical points with multiplicity, per class.
    pub classical: Option<Vec<(PointClass, usize)>>,
    /// `(s, local degree)` of the repelling type II points, sorted.
    pub repelling: Option<Vec<(Q, usize)>>,
    /// Exploration must stop with `NeedsExtension` beyond the default budget.
    pub needs_extension: bool,
}

impl Expected {
    fn new(weight_total: usize) -> Self {
        Expected { identity: false, components: None, weight_total, classical: None, repelling: None, needs_extension: false }
    }

    fn components(mut self, c: &[(&'static str, usize)]) -> Self {
        let mut v = c.to_vec();
        v.sort();
        self.components = Some(v);
        self
    }

    fn classical(mut self, c: &[(PointClass, usize)]) -> Self {
        self.classical = Some(c.to_vec());
        self
    }

    fn repelling(mut self, r: &[(Q, usize)]) -> Self {
        let mut v = r.to_vec();
        v.sort();
        self.repelling = Some(v);
        self
    }
}

impl Expected {
    /// Differences between this expectation and an explored locus.
    pub fn mismatches(&self, locus: &FixLocus) -> Vec<String> {
        let mut out = Vec::new();
        if self.identity || self.needs_extension {
            out.push("exploration was expected to stop".to_string());
        }
        if let Some(want) = &self.components {
            let mut got: Vec<(&str, usize)> = Vec::new();
            for c in &locus.components {
                match got.iter_mut().find(|(k, _)| *k == c.kind_name()) {
                    Some(e) => e.1 += 1,
                    None => got.push((c.kind_name(), 1)),
                }
            }
            got.sort();
            if &got != want {
                out.push(format!("components {got:?}, expected {want:?}"));
            }
        }
        if let Some(want) = &self.classical {
            let got: Vec<(PointClass, usize)> = [PointClass::Attracting, PointClass::Indifferent, PointClass::Repelling]
                .into_iter()
                .map(|k| (k, locus.classical.iter().filter(|c| c.class == k).map(|c| c.multiplicity).sum()))
                .filter(|(_, n)| *n > 0)
                .collect();
            let mut w = want.clone();
            w.retain(|(_, n)| *n > 0);
            let key = |v: &mut Vec<(PointClass, usize)>| v.sort_by_key(|(k, _)| k.name());
            let mut g = got;
            key(&mut g);
            key(&mut w);
            if g != w {
                out.push(format!("classical {g:?}, expected {w:?}"));
            }
        }
        if let Some(want) = &self.repelling {
            let mut got: Vec<(Q, usize)> = locus
                .components
                .iter()
                .flat_map(|c| c.repelling.iter().map(|r| (r.point.s.clone(), r.degree)))
                .collect();
            got.sort();
            if &got != want {
                out.push(format!("repelling points {got:?}, expected {want:?}"));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub p: u64,
    pub num: Vec<Q>,
    pub den: Vec<Q>,
    pub expected: Expected,
    /// How the expectation was obtained.
    pub basis: &'static str,
}

impl Fixture {
    pub fn context(&self) -> Arc<PrimeContext> {
        PrimeContext::split(self.p)
    }

    pub fn map(&self) -> Result<RationalMapK> {
        RationalMapK::from_rationals(&self.context(), &self.num, &self.den)
    }

    /// The key-value text the command line reads.
    pub fn input_text(&self) -> String {
        let list = |v: &[Q]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ");
        format!("p = {}\nnum = [{}]\nden = [{}]\n", self.p, list(&self.num), list(&self.den))
    }
}

fn ints(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

fn monomial(c: Q, d: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); d + 1];
    v[d] = c;
    v
}

/// The quadratic family `(z² + a(b+T)z) / ((b⁻¹+T)z + a)`.
pub fn quadratic_family(a: Q, b: Q, t: Q) -> (Vec<Q>, Vec<Q>) {
    let num = vec![Q::zero(), &a * (&b + &t), Q::one()];
    let den = vec![a, b.recip() + t];
    (num, den)
}

/// `(t z^{d−p+2} + 2z²) / (−t^{2p−1} z^d + 2t z^{d−p+1} + 4z − 2)`.
pub fn segment_family(p: u64, d: usize, t: i64) -> (Vec<Q>, Vec<Q>) {
    let p = p as usize;
    let mut num = vec![Q::zero(); d - p + 3];
    num[2] = q(2);
    num[d - p + 2] = &num[d - p + 2] + q(t);
    let mut den = vec![Q::zero(); d + 1];
    den[0] = q(-2);
    den[1] = q(4);
    den[d - p + 1] = &den[d - p + 1] + q(2 * t);
    den[d] = &den[d] - Q::from_integer(num_bigint::BigInt::from(t).pow((2 * p - 1) as u32));
    (num, den)
}

/// The fixture suite.
pub fn fixtures() -> Vec<Fixture> {
    use PointClass::*;
    let mut out = Vec::new();
    let mut push = |name: String, p: u64, num: Vec<Q>, den: Vec<Q>, expected: Expected, basis: &'static str| {
        out.push(Fixture { name, p, num, den, expected, basis })
    };

    // degree one, one per normal form
    let mut id = Expected::new(0);
    id.identity = true;
    push("identity".into(), 5, ints(&[0, 1]), ints(&[1]), id, "closed form");
    let ind2 = || Expected::new(0).components(&[("indifferent", 1)]).classical(&[(Indifferent, 2)]).repelling(&[]);
    push("z+1".into(), 3, ints(&[1, 1]), ints(&[1]), ind2(), "closed form");
    push("z+5".into(), 5, ints(&[5, 1]), ints(&[1]), ind2(), "closed form");
    push(
        "5z".into(),
        5,
        ints(&[0, 5]),
        ints(&[1]),
        Expected::new(0).components(&[("classical", 2)]).classical(&[(Attracting, 1), (Repelling, 1)]).repelling(&[]),
        "closed form",
    );
    push("2z+1".into(), 5, ints(&[1, 2]), ints(&[1]), ind2(), "closed form");
    push("6z".into(), 5, ints(&[0, 6]), ints(&[1]), ind2(), "closed form");

    // z^d with good reduction: roots of unity of order d − 1 are indifferent
    for (p, d) in [(5u64, 2usize), (5, 3), (7, 4)] {
        push(
            format!("z^{d} p={p}"),
            p,
            monomial(q(1), d),
            ints(&[1]),
            Expected::new(d - 1)
                .components(&[("classical", 2), ("peaked", 1)])
                .classical(&[(Attracting, 2), (Indifferent, d - 1)])
                .repelling(&[(q(0), d)]),
            "hand count: 0 and ∞ superattracting, multiplier d at roots of unity",
        );
    }

    // z^p: every fixed direction at the Gauss point is critical
    for p in [3u64, 5] {
        let d = p as usize;
        push(
            format!("z^{p}"),
            p,
            monomial(q(1), d),
            ints(&[1]),
            Expected::new(d - 1)
                .components(&[("classical", d + 1), ("hyperbolic", 1)])
                .classical(&[(Attracting, d + 1)])
                .repelling(&[(q(0), d)]),
            "hand count: multiplier p·x^{p−1}",
        );
        // t z^{p+1} + z^p with t = p: one large repelling root of valuation −1
        let mut num = monomial(q(1), d);
        num.push(q(p as i64));
        push(
            format!("{p}z^{} + z^{p}", d + 1),
            p,
            num,
            ints(&[1]),
            Expected::new(d)
                .components(&[("classical", d + 2), ("hyperbolic", 1)])
                .classical(&[(Attracting, d + 1), (Repelling, 1)])
                .repelling(&[(q(0), d)]),
            "hand count: Gauss weight p − 1 plus the non-fixed branch point ζ(0, −1) of weight 1",
        );
        // t z^{2p} + z^p: the large roots cluster around a p-th root and
        // need wild ramification
        let mut num = monomial(q(1), d);
        num.resize(2 * d + 1, Q::zero());
        num[2 * d] = q(p as i64);
        let mut e = Expected::new(2 * d - 1);
        e.needs_extension = true;
        push(
            format!("{p}z^{} + z^{p}", 2 * d),
            p,
            num,
            ints(&[1]),
            e,
            "Newton polygon slope 1/p with a residue root of multiplicity p",
        );
    }

    // hyperbolic segments
    for (p, d, t) in [(3u64, 4usize, 3i64), (5, 6, 5)] {
        let (num, den) = segment_family(p, d, t);
        let e = Expected::new(d - 1).repelling(&[(q(-2), p as usize - 1), (q(0), 2)]);
        push(
            format!("segment p={p} d={d}"),
            p,
            num,
            den,
            e,
            "reductions w²/(2w−1) and w/(2−w^{p−1}) at the two ends",
        );
    }

    // the quadratic family
    let (num, den) = quadratic_family(q(1), q(2), q(5));
    push(
        "quadratic repelling-alpha p=5".into(),
        5,
        num,
        den,
        Expected::new(1)
            .components(&[("classical", 1), ("indifferent", 1)])
            .classical(&[(Indifferent, 2), (Repelling, 1)])
            .repelling(&[]),
        "alpha = 4/3 with multiplier 7/25",
    );
    let (num, den) = quadratic_family(q(2), q(3), q(7));
    push(
        "quadratic repelling-alpha p=7".into(),
        7,
        num,
        den,
        Expected::new(1)
            .components(&[("classical", 1), ("indifferent", 1)])
            .classical(&[(Indifferent, 2), (Repelling, 1)])
            .repelling(&[]),
        "b + 1/b − 2 = 4/3 is a unit while 2T has valuation 1",
    );
    let (num, den) = quadratic_family(q(1), q(6), q(5));
    push(
        "quadratic indifferent-alpha p=5 (relaxed)".into(),
        5,
        num,
        den,
        Expected::new(1).components(&[("peaked", 1)]).classical(&[(Indifferent, 3)]),
        "alpha = 12/5 with multiplier 17/67 ≡ 1",
    );
    let (num, den) = quadratic_family(q(1), q(-4), q(5));
    push(
        "quadratic double-zero p=5 (relaxed)".into(),
        5,
        num,
        den,
        Expected::new(1).components(&[("peaked", 1)]).classical(&[(Indifferent, 3)]),
        "b = 1 − T makes 0 a double fixed point",
    );
    out
}

/// A random small rational of varied `p`-adic size.
fn random_scalar(rng: &mut impl Rng, p: u64) -> Q {
    let p = p as i64;
    let k: i64 = rng.gen_range(1..=p * p);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let e: i32 = *[-1, 0, 0, 0, 1, 2].choose(rng).unwrap();
    let pe = Q::from_integer(p.into()).pow(e);
    Q::from_integer((sign * k).into()) * pe
}

fn distinct_scalars(rng: &mut impl Rng, p: u64, n: usize, avoid: &[Q]) -> Vec<Q> {
    let mut out: Vec<Q> = Vec::new();
    while out.len() < n {
        let x = random_scalar(rng, p);
        if !out.contains(&x) && !avoid.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn from_roots(c: &Q, roots: &[Q]) -> Vec<Q> {
    let mut acc: Poly<Q> = Poly::constant(c.clone());
    for r in roots {
        acc = &acc * &Poly::new(vec![-r.clone(), Q::one()]);
    }
    acc.coeffs().to_vec()
}

/// `(zD + cP)/D` with `D`, `P` products of distinct rational linear factors,
/// so all fixed points (the roots of `P`, and possibly `∞`) are rational.
pub fn random_split_map(rng: &mut impl Rng, p: u64, d: usize) -> RationalMapK {
    let ctx = PrimeContext::split(p);
    loop {
        let poles = distinct_scalars(rng, p, d - 1, &[]);
        let m = rng.gen_range(1..=d);
        let fixed = distinct_scalars(rng, p, m, &poles);
        let pi = p as i64;
        let c = [q(1), q(2), q(3), q(pi), q(pi * pi), qf(1, pi)].choose(rng).unwrap().clone();
        let den = from_roots(&Q::one(), &poles);
        let pp = from_roots(&c, &fixed);
        let mut num = vec![Q::zero(); d + 1];
        for (i, x) in den.iter().enumerate() {
            num[i + 1] = &num[i + 1] + x;
        }
        for (i, x) in pp.iter().enumerate() {
            num[i] = &num[i] + x;
        }
        if let Ok(f) = RationalMapK::from_rationals(&ctx, &num, &den) {
            if f.degree() == d {
                return f;
            }
        }
    }
}

/// A random non-identity affine map `λz + μ`.
pub fn random_affine(rng: &mut impl Rng, p: u64) -> RationalMapK {
    let ctx = PrimeContext::split(p);
    let pi = p as i64;
    loop {
        let lambda = match rng.gen_range(0..6) {
            0 => q(1),
            1 => q(1 + pi * rng.gen_range(1..pi)),
            2 => q(1) + Q::from_integer(pi.into()).pow(rng.gen_range(2..4)),
            3 => q(rng.gen_range(2..pi)),
            4 => q(pi * rng.gen_range(1..pi)),
            _ => qf(rng.gen_range(1..pi), pi),
        };
        let mu = match rng.gen_range(0..4) {
            0 => Q::zero(),
            _ => random_scalar(rng, p),
        };
        if lambda == Q::one() && mu.is_zero() {
            continue;
        }
        return RationalMapK::from_rationals(&ctx, &[mu, lambda], &[Q::one()]).unwrap();
    }
}

/// A random map of degree at most `dmax` with small coefficients.
pub fn random_map(rng: &mut impl Rng, p: u64, dmax: usize) -> RationalMapK {
    let ctx = PrimeContext::split(p);
    loop {
        let dn = rng.gen_range(0..=dmax);
        let dd = rng.gen_range(0..=dmax);
        let coeffs = |rng: &mut _, n: usize| -> Vec<Q> {
            (0..=n).map(|_| if rng_bool(rng) { Q::zero() } else { random_scalar(rng, p) }).collect()
        };
        let num = coeffs(rng, dn);
        let den = coeffs(rng, dd);
        if let Ok(f) = RationalMapK::from_rationals(&ctx, &num, &den) {
            if f.degree() >= 1 {
                return f;
            }
        }
    }
}

fn rng_bool(rng: &mut impl Rng) -> bool {
    rng.gen_bool(0.25)
}

/// A random type II point with center a small rational and `s` on the
/// integer grid `[-3, 3]`.
pub fn random_point(rng: &mut impl Rng, p: u64) -> TypeIIPoint {
    let a = if rng.gen_bool(0.2) { Q::zero() } else { random_scalar(rng, p) };
    TypeIIPoint::new(FieldElement::rational(a), q(rng.gen_range(-3..=3)))
}

/// Probe grid: centers from a fixed set, `s` in steps of `1/(2n)`.
pub fn probe_grid(ctx: &Arc<PrimeContext>, centers: &[Q], s_lo: i64, s_hi: i64) -> Vec<TypeIIPoint> {
    let step = 2 * ctx.n as i64;
    let mut out = Vec::new();
    for c in centers {
        for k in (s_lo * step)..=(s_hi * step) {
            out.push(TypeIIPoint::new(FieldElement::rational(c.clone()).with_ctx(ctx), qf(k, step)));
        }
    }
    out
}
