//! Rational maps over the working field and their behaviour at type II
//! points: reduction, fixedness, local degree, indifference class, surplus
//! multiplicities, direction counts, and tropical analysis along rays.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactfield::{
    count_roots_in_disk, newton_polygon, DiskMode, FieldElement, KPoly, PrimeContext, Val, Q,
};
use crate::poly::{Field, Poly};
use crate::residue::{
    factor, fixed_points, DirectionPoint, ExtElement, FqElement, FqPoly, FqRationalMap,
    TangentFixedDirection,
};

/// `N/D` with coprime integral coefficients, at least one of valuation 0.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMapK {
    ctx: Arc<PrimeContext>,
    num: KPoly,
    den: KPoly,
    d: usize,
}

fn min_val(ctx: &Arc<PrimeContext>, polys: &[&KPoly]) -> Option<Q> {
    polys
        .iter()
        .flat_map(|p| p.coeffs().iter())
        .filter_map(|c| c.val_in(ctx).fin().cloned())
        .min()
}

/// `m ↦ π^{-n·m}`, the scalar making minimal valuation `m` into 0.
fn unscale(ctx: &Arc<PrimeContext>, m: &Q) -> FieldElement {
    let e = m * Q::from_integer((ctx.n as i64).into());
    assert!(e.is_integer(), "valuation outside the value group");
    FieldElement::pi_pow(ctx, -e.to_integer().to_i64().unwrap())
}

fn with_ctx(ctx: &Arc<PrimeContext>, p: &KPoly) -> KPoly {
    p.map(|c| c.with_ctx(ctx))
}

impl RationalMapK {
    /// Coprime form scaled so the minimal coefficient valuation is 0.
    pub fn normalize(ctx: &Arc<PrimeContext>, num: KPoly, den: KPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Err(Error::ConstantMap);
        }
        let g = num.gcd(&den);
        let (num, den) = (num.div_exact(&g), den.div_exact(&g));
        let d = num.deg0().max(den.deg0());
        if d == 0 {
            return Err(Error::ConstantMap);
        }
        let m = min_val(ctx, &[&num, &den]).expect("nonzero");
        let sc = unscale(ctx, &m);
        Ok(RationalMapK {
            ctx: ctx.clone(),
            num: with_ctx(ctx, &num.scale(&sc)),
            den: with_ctx(ctx, &den.scale(&sc)),
            d,
        })
    }

    /// Map with rational coefficients, lowest degree first.
    pub fn from_rationals(ctx: &Arc<PrimeContext>, num: &[Q], den: &[Q]) -> Result<Self> {
        let mk = |c: &[Q]| Poly::new(c.iter().map(|x| FieldElement::rational(x.clone())).collect());
        Self::normalize(ctx, mk(num), mk(den))
    }

    pub fn from_ints(ctx: &Arc<PrimeContext>, num: &[i64], den: &[i64]) -> Result<Self> {
        let cv = |c: &[i64]| c.iter().map(|&v| Q::from_integer(v.into())).collect::<Vec<_>>();
        Self::from_rationals(ctx, &cv(num), &cv(den))
    }

    pub fn ctx(&self) -> &Arc<PrimeContext> {
        &self.ctx
    }

    pub fn num(&self) -> &KPoly {
        &self.num
    }

    pub fn den(&self) -> &KPoly {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn is_identity(&self) -> bool {
        self.d == 1 && self.num == &KPoly::x() * &self.den
    }

    /// `N(z) - z·D(z)`.
    pub fn fixed_poly(&self) -> KPoly {
        &self.num - &(&KPoly::x() * &self.den)
    }

    /// `∞` is fixed iff `deg N > deg D`; its multiplicity is `d + 1 - deg P`.
    pub fn infinity_multiplicity(&self) -> usize {
        if self.num.deg0() > self.den.deg0() {
            self.d + 1 - self.fixed_poly().deg0()
        } else {
            0
        }
    }

    /// `u⁻¹(f(uz + a) - a)`.
    pub fn conjugate_affine(&self, u: &FieldElement, a: &FieldElement) -> Result<Self> {
        if u.is_zero() {
            return Err(Error::PreconditionViolated("u must be nonzero".into()));
        }
        let n = self.num.compose_affine(u, a);
        let dd = self.den.compose_affine(u, a);
        let top = &n - &dd.scale(a);
        Self::normalize(&self.ctx, top, dd.scale(u))
    }

    /// `1/f(1/z)`.
    pub fn flip(&self) -> Self {
        Self::normalize(&self.ctx, self.den.reverse(self.d), self.num.reverse(self.d))
            .expect("flip of a nonconstant map")
    }

    /// Translated pair `(N(z+a) - a·D(z+a), D(z+a))`, not normalised.
    pub fn translated(&self, a: &FieldElement) -> (KPoly, KPoly) {
        let one = FieldElement::one();
        let n = self.num.compose_affine(&one, a);
        let dd = self.den.compose_affine(&one, a);
        (&n - &dd.scale(a), dd)
    }

    /// Coefficient-wise reduction of the normalised pair.
    pub fn reduce_pair(&self) -> (FqPoly, FqPoly) {
        let red = |p: &KPoly| {
            Poly::new(
                p.coeffs()
                    .iter()
                    .map(|c| c.residue(&self.ctx).expect("integral coefficients"))
                    .collect(),
            )
        };
        (red(&self.num), red(&self.den))
    }

    /// Same map over a larger field.
    pub fn lift_to(&self, ctx2: &Arc<PrimeContext>) -> Self {
        RationalMapK {
            ctx: ctx2.clone(),
            num: self.num.map(|c| c.embed(ctx2)),
            den: self.den.map(|c| c.embed(ctx2)),
            d: self.d,
        }
    }

    /// `f(z)`, or `None` at a pole.
    pub fn eval(&self, z: &FieldElement) -> Option<FieldElement> {
        let dz = self.den.eval(z);
        if dz.is_zero() {
            None
        } else {
            Some(self.num.eval(z).div(&dz))
        }
    }

    /// `(N'D - ND', D²)`.
    pub fn derivative_pair(&self) -> (KPoly, KPoly) {
        let top = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        (top, &self.den * &self.den)
    }

    pub fn render(&self) -> String {
        let show = |c: &FieldElement| c.to_string();
        let n = crate::poly::render(&self.num, "z", show);
        let d = crate::poly::render(&self.den, "z", show);
        format!("({n})/({d})")
    }
}

impl fmt::Display for RationalMapK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// The disk point `ζ_{a, p^{-s}}`. Points on the way to `∞` are those with
/// small `s`.
#[derive(Clone, Debug)]
pub struct TypeIIPoint {
    pub center: FieldElement,
    pub s: Q,
}

impl TypeIIPoint {
    pub fn new(center: FieldElement, s: Q) -> Self {
        TypeIIPoint { center, s }
    }

    pub fn gauss() -> Self {
        TypeIIPoint { center: FieldElement::zero(), s: Q::zero() }
    }

    /// Same disk: equal radius and `val(a - a') ≥ s`.
    pub fn same_point(&self, o: &Self, ctx: &Arc<PrimeContext>) -> bool {
        self.s == o.s && contains(ctx, &self.center, &o.center, &self.s, DiskMode::Closed)
    }

    pub fn in_value_group(&self, ctx: &Arc<PrimeContext>) -> bool {
        (&self.s * Q::from_integer((ctx.n as i64).into())).is_integer()
    }

    /// Minimal ramification index making `s` a valuation.
    pub fn needed_ramification(&self, ctx: &Arc<PrimeContext>) -> usize {
        let b = self.s.denom().to_usize().unwrap();
        ctx.n.lcm(&b)
    }

    /// Direction at this point containing the classical point `z` (`None` is ∞).
    pub fn direction_of(&self, ctx: &Arc<PrimeContext>, z: Option<&FieldElement>) -> DirectionPoint {
        let Some(z) = z else {
            return DirectionPoint::Infinity;
        };
        let diff = z.clone() - self.center.clone();
        match diff.val_in(ctx) {
            Val::Inf => finite_dir(ctx, FqElement::zero_in(&ctx.residue)),
            Val::Fin(v) if v > self.s => finite_dir(ctx, FqElement::zero_in(&ctx.residue)),
            Val::Fin(v) if v < self.s => DirectionPoint::Infinity,
            Val::Fin(v) => {
                let r = (diff * unscale(ctx, &v)).residue(ctx).unwrap();
                finite_dir(ctx, r)
            }
        }
    }
}

impl fmt::Display for TypeIIPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zeta({}, {})", self.center, self.s)
    }
}

/// Direction of the residue point `r`.
pub fn finite_dir(ctx: &Arc<PrimeContext>, r: FqElement) -> DirectionPoint {
    let one = FqElement::from_int(&ctx.residue, 1);
    DirectionPoint::Finite(Poly::new(vec![-r.with_ctx(&ctx.residue), one]))
}

fn contains(ctx: &Arc<PrimeContext>, a: &FieldElement, b: &FieldElement, s: &Q, mode: DiskMode) -> bool {
    match (b.clone() - a.clone()).val_in(ctx) {
        Val::Inf => true,
        Val::Fin(v) => match mode {
            DiskMode::Open => v > *s,
            DiskMode::Closed => v >= *s,
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndifferenceClass {
    NotFixed,
    IdIndifferent,
    Multiplicative,
    Additive,
    Repelling,
}

impl IndifferenceClass {
    pub fn name(&self) -> &'static str {
        match self {
            IndifferenceClass::NotFixed => "not-fixed",
            IndifferenceClass::IdIndifferent => "id-indifferent",
            IndifferenceClass::Multiplicative => "multiplicatively-indifferent",
            IndifferenceClass::Additive => "additively-indifferent",
            IndifferenceClass::Repelling => "repelling",
        }
    }

    pub fn is_indifferent(&self) -> bool {
        matches!(
            self,
            IndifferenceClass::IdIndifferent
                | IndifferenceClass::Multiplicative
                | IndifferenceClass::Additive
        )
    }
}

impl fmt::Display for IndifferenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Reduction data at a type II point.
#[derive(Clone, Debug)]
pub struct LocalData {
    pub point: TypeIIPoint,
    pub is_fixed: bool,
    /// Reduced numerator and denominator before cancellation.
    pub reduced_pair: (FqPoly, FqPoly),
    /// Present iff the reduction is nonconstant.
    pub reduced_map: Option<FqRationalMap>,
    /// Degree of the reduction when fixed, 0 otherwise.
    pub local_degree: usize,
    pub class: IndifferenceClass,
    /// Empty when the tangent map is the identity or the point is not fixed.
    pub directions: Vec<TangentFixedDirection>,
    pub surplus: Vec<(DirectionPoint, usize)>,
    pub n_cf: usize,
    /// Filled in once the classical fixed points are known.
    pub n_shear: Option<usize>,
}

impl LocalData {
    /// Post-processing shared by every path that produces a reduced pair.
    pub fn from_pair(point: TypeIIPoint, d: usize, rn: FqPoly, rd: FqPoly) -> Result<Self> {
        let map = FqRationalMap::new(rn.clone(), rd.clone())?;
        let surplus = surplus_from_pair(d, &rn, &rd)?;
        if map.is_constant() {
            return Ok(LocalData {
                point,
                is_fixed: false,
                reduced_pair: (rn, rd),
                reduced_map: None,
                local_degree: 0,
                class: IndifferenceClass::NotFixed,
                directions: Vec::new(),
                surplus,
                n_cf: 0,
                n_shear: None,
            });
        }
        let deg = map.degree();
        let (class, directions) = if map.is_identity() {
            (IndifferenceClass::IdIndifferent, Vec::new())
        } else {
            let dirs = fixed_points(&map)?;
            let class = if deg > 1 {
                IndifferenceClass::Repelling
            } else if dirs.len() == 1 && dirs[0].multiplicity == 2 {
                IndifferenceClass::Additive
            } else {
                IndifferenceClass::Multiplicative
            };
            (class, dirs)
        };
        let n_cf = directions.iter().filter(|d| d.critically_fixed).map(|d| d.orbit_size()).sum();
        Ok(LocalData {
            point,
            is_fixed: true,
            reduced_pair: (rn, rd),
            reduced_map: Some(map),
            local_degree: deg,
            class,
            directions,
            surplus,
            n_cf,
            n_shear: None,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.class == IndifferenceClass::IdIndifferent
    }

    /// Surplus multiplicity in direction `v` (per conjugate).
    pub fn surplus_at(&self, v: &DirectionPoint) -> usize {
        self.surplus.iter().find(|(w, _)| w == v).map_or(0, |(_, e)| *e)
    }

    pub fn total_surplus(&self) -> usize {
        self.surplus.iter().map(|(v, e)| e * v.orbit_size()).sum()
    }

    /// Fixed-point multiplicity of `v` under the tangent map (0 if not fixed).
    pub fn tangent_multiplicity(&self, v: &DirectionPoint) -> usize {
        self.directions.iter().find(|d| d.location == *v).map_or(0, |d| d.multiplicity)
    }

    /// Whether the tangent map fixes `v`.
    pub fn fixes_direction(&self, v: &DirectionPoint) -> bool {
        self.is_fixed && (self.is_identity() || self.tangent_multiplicity(v) > 0)
    }

    /// Multiplier of the tangent map at `v`, when `v` is fixed.
    pub fn multiplier_at(&self, v: &DirectionPoint) -> Option<ExtElement> {
        if !self.is_fixed {
            return None;
        }
        if self.is_identity() {
            let g = match v {
                DirectionPoint::Finite(g) => g.clone(),
                DirectionPoint::Infinity => Poly::x(),
            };
            return Some(ExtElement::base(&g, FqElement::one()));
        }
        self.directions.iter().find(|d| d.location == *v).map(|d| d.multiplier.clone())
    }
}

fn surplus_from_pair(d: usize, rn: &FqPoly, rd: &FqPoly) -> Result<Vec<(DirectionPoint, usize)>> {
    let mut out = Vec::new();
    let h = rn.gcd(rd);
    if h.deg0() > 0 {
        for (g, e) in factor(&h)? {
            out.push((DirectionPoint::Finite(g), e));
        }
    }
    // the ∞ direction through the flip z ↦ 1/z
    let hf = rd.reverse(d).gcd(&rn.reverse(d));
    let e_inf = hf.order_at_zero().unwrap_or(0);
    if e_inf > 0 {
        out.push((DirectionPoint::Infinity, e_inf));
    }
    Ok(out)
}

fn need_ext(ctx: &Arc<PrimeContext>, x: &TypeIIPoint) -> Result<()> {
    if x.in_value_group(ctx) {
        Ok(())
    } else {
        Err(Error::NeedsExtension { n: x.needed_ramification(ctx), k: ctx.k })
    }
}

fn uniformizer_power(ctx: &Arc<PrimeContext>, s: &Q) -> FieldElement {
    let e = s * Q::from_integer((ctx.n as i64).into());
    FieldElement::pi_pow(ctx, e.to_integer().to_i64().unwrap())
}

/// Reduction at `x` by explicit conjugation with `z ↦ π^{ns} z + a`.
pub fn reduce_at(f: &RationalMapK, x: &TypeIIPoint) -> Result<LocalData> {
    let ctx = f.ctx();
    need_ext(ctx, x)?;
    let u = uniformizer_power(ctx, &x.s);
    let g = f.conjugate_affine(&u, &x.center)?;
    let (rn, rd) = g.reduce_pair();
    LocalData::from_pair(x.clone(), f.degree(), rn, rd)
}

/// Surplus multiplicity of `f` at `x` in direction `v`.
pub fn surplus(f: &RationalMapK, x: &TypeIIPoint, v: &DirectionPoint) -> Result<usize> {
    Ok(reduce_at(f, x)?.surplus_at(v))
}

/// Number of classical fixed points in the direction `v` at `x`, with
/// multiplicity.
pub fn classical_count_in_direction(
    f: &RationalMapK,
    x: &TypeIIPoint,
    v: &DirectionPoint,
) -> Result<usize> {
    if f.is_identity() {
        return Err(Error::IdentityMap);
    }
    let ctx = f.ctx();
    let p = f.fixed_poly();
    match v {
        DirectionPoint::Infinity => {
            let inside = count_roots_in_disk(ctx, &p, &x.center, &x.s, DiskMode::Closed)?;
            Ok(f.infinity_multiplicity() + p.deg0() - inside)
        }
        DirectionPoint::Finite(_) => match v.rational() {
            Some(r) if r.is_zero() => {
                count_roots_in_disk(ctx, &p, &x.center, &x.s, DiskMode::Open)
            }
            Some(r) => {
                need_ext(ctx, x)?;
                let u = uniformizer_power(ctx, &x.s);
                let b = x.center.clone() + u * FieldElement::lift(ctx, &r);
                count_roots_in_disk(ctx, &p, &b, &x.s, DiskMode::Open)
            }
            None => {
                need_ext(ctx, x)?;
                let DirectionPoint::Finite(g) = v else { unreachable!() };
                let pr = reduced_polynomial(ctx, &p, x);
                Ok(factor(&pr)?.into_iter().find(|(h, _)| h == g).map_or(0, |(_, e)| e))
            }
        },
    }
}

/// Reduction of `P(a + π^{ns} w)` scaled to minimal valuation 0.
pub fn reduced_polynomial(ctx: &Arc<PrimeContext>, p: &KPoly, x: &TypeIIPoint) -> FqPoly {
    let u = uniformizer_power(ctx, &x.s);
    let q = p.compose_affine(&u, &x.center);
    let m = min_val(ctx, &[&q]).expect("nonzero");
    let q = q.scale(&unscale(ctx, &m));
    Poly::new(q.coeffs().iter().map(|c| c.residue(ctx).unwrap()).collect())
}

/// Checks `F_f(v) = s_f(v) + F̃_f(v)`: the left side from Newton polygons (or
/// the reduced fixed-point polynomial for non-rational directions), the
/// right side from the reduction of the map.
pub fn identification_check(f: &RationalMapK, x: &TypeIIPoint, v: &DirectionPoint) -> Result<bool> {
    let ld = reduce_at(f, x)?;
    if !ld.is_fixed {
        return Err(Error::NotFixed);
    }
    if ld.is_identity() {
        return Err(Error::IdentityTangentMap);
    }
    let lhs = classical_count_in_direction(f, x, v)?;
    Ok(lhs == ld.surplus_at(v) + ld.tangent_multiplicity(v))
}

/// A coefficient line `s ↦ intercept + slope·s` of the conjugated map.
#[derive(Clone, Debug)]
pub struct Line {
    pub numerator: bool,
    pub index: usize,
    pub intercept: Q,
    pub slope: i64,
    /// Residue of the coefficient divided by `π^{n·val}`.
    pub unit: FqElement,
}

impl Line {
    pub fn at(&self, s: &Q) -> Q {
        &self.intercept + s * Q::from_integer(self.slope.into())
    }
}

/// Coefficient lines of `f` translated to a center. Lines whose intercept
/// could not be determined are kept as lower bounds.
#[derive(Clone, Debug)]
pub struct RayLines {
    pub center: FieldElement,
    pub d: usize,
    pub known: Vec<Line>,
    /// `(lower bound on the intercept, slope)`.
    pub unknown: Vec<(Q, i64)>,
}

impl RayLines {
    pub fn exact(f: &RationalMapK, center: &FieldElement) -> Self {
        Self::build(f, center, None, false)
    }

    /// Lines for the true center `x` from an approximation `a` with
    /// `val(x - a) ≥ prec`; with `fixed_leaf` the constant numerator line is
    /// known to vanish.
    pub fn approximate(f: &RationalMapK, a: &FieldElement, prec: &Q, fixed_leaf: bool) -> Self {
        Self::build(f, a, Some(prec), fixed_leaf)
    }

    fn build(f: &RationalMapK, a: &FieldElement, prec: Option<&Q>, fixed_leaf: bool) -> Self {
        let ctx = f.ctx();
        let (na, da) = f.translated(a);
        let bound = prec.map(|m| {
            let va = a.val_in(ctx).fin().cloned().unwrap_or_else(Q::zero);
            let kappa = if va.is_negative() {
                va * Q::from_integer((f.degree() as i64).into())
            } else {
                Q::zero()
            };
            m + kappa
        });
        let mut known = Vec::new();
        let mut unknown = Vec::new();
        for (numerator, poly) in [(true, &na), (false, &da)] {
            for (i, c) in poly.coeffs().iter().enumerate() {
                if numerator && i == 0 && fixed_leaf {
                    continue;
                }
                let slope = i as i64 + if numerator { 0 } else { 1 };
                let v = c.val_in(ctx);
                if let Some(b) = &bound {
                    let unsure = match &v {
                        Val::Inf => true,
                        Val::Fin(x) => x >= b,
                    };
                    if unsure {
                        unknown.push((b.clone(), slope));
                        continue;
                    }
                }
                let Val::Fin(v) = v else { continue };
                let unit = (c.clone() * unscale(ctx, &v)).residue(ctx).unwrap();
                known.push(Line { numerator, index: i, intercept: v, slope, unit });
            }
        }
        RayLines { center: a.clone(), d: f.degree(), known, unknown }
    }

    fn envelope(&self, s: &Q) -> Q {
        self.known.iter().map(|l| l.at(s)).min().expect("some coefficient is nonzero")
    }

    /// Reduced pair at `s` from the lines of minimal value.
    pub fn support_pair(&self, ctx: &Arc<PrimeContext>, s: &Q) -> (FqPoly, FqPoly) {
        let m = self.envelope(s);
        let mut num = vec![FqElement::zero_in(&ctx.residue); self.d + 1];
        let mut den = vec![FqElement::zero_in(&ctx.residue); self.d + 1];
        for l in &self.known {
            if l.at(s) == m {
                let slot = if l.numerator { &mut num } else { &mut den };
                slot[l.index] = l.unit.clone();
            }
        }
        (Poly::new(num), Poly::new(den))
    }

    /// Point data at `ζ_{center, s}` for any rational `s`.
    pub fn local_data(&self, ctx: &Arc<PrimeContext>, s: &Q) -> Result<LocalData> {
        let (rn, rd) = self.support_pair(ctx, s);
        LocalData::from_pair(TypeIIPoint::new(self.center.clone(), s.clone()), self.d, rn, rd)
    }

    /// Values of `s` where two known lines cross, inside `(lo, hi)`.
    pub fn crossings(&self, lo: Option<&Q>, hi: Option<&Q>) -> Vec<Q> {
        let mut out = BTreeSet::new();
        for (i, a) in self.known.iter().enumerate() {
            for b in &self.known[i + 1..] {
                if a.slope == b.slope {
                    continue;
                }
                let s = (&b.intercept - &a.intercept) / Q::from_integer((a.slope - b.slope).into());
                if lo.is_none_or(|l| s > *l) && hi.is_none_or(|h| s < *h) {
                    out.insert(s);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Whether the undetermined lines stay strictly above the envelope on
    /// `[from, ∞)`, so they cannot affect any reduction there.
    pub fn unknown_lines_harmless(&self, from: &Q) -> bool {
        if self.unknown.is_empty() {
            return true;
        }
        let mut probes = vec![from.clone()];
        probes.extend(self.crossings(Some(from), None));
        let final_line = self
            .known
            .iter()
            .min_by(|a, b| a.slope.cmp(&b.slope).then(a.intercept.cmp(&b.intercept)))
            .unwrap();
        self.unknown.iter().all(|(b, m)| {
            let line = |s: &Q| b + s * Q::from_integer((*m).into());
            probes.iter().all(|s| line(s) > self.envelope(s))
                && (*m > final_line.slope || (*m == final_line.slope && *b > final_line.intercept))
        })
    }
}

/// A maximal open interval along a ray on which the reduction data is
/// constant.
#[derive(Clone, Debug)]
pub struct RaySegment {
    pub center: FieldElement,
    /// `None` is `-∞` (towards `∞`).
    pub lo: Option<Q>,
    /// `None` is `+∞` (towards the center).
    pub hi: Option<Q>,
    /// Data at an interior sample point.
    pub sample: LocalData,
}

impl RaySegment {
    pub fn is_fixed(&self) -> bool {
        self.sample.is_fixed
    }

    pub fn class(&self) -> IndifferenceClass {
        self.sample.class
    }

    /// Multiplier of the direction pointing at the center.
    pub fn ray_multiplier(&self, ctx: &Arc<PrimeContext>) -> Option<ExtElement> {
        self.sample.multiplier_at(&finite_dir(ctx, FqElement::zero_in(&ctx.residue)))
    }

    /// A few interior sample values of `s`.
    pub fn interior_samples(&self, count: usize) -> Vec<Q> {
        let one = Q::one();
        let (lo, hi) = match (&self.lo, &self.hi) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            (Some(a), None) => (a.clone(), a + Q::from_integer(4.into())),
            (None, Some(b)) => (b - Q::from_integer(4.into()), b.clone()),
            (None, None) => (-&one * Q::from_integer(2.into()), Q::from_integer(2.into())),
        };
        let step = (&hi - &lo) / Q::from_integer(((count + 1) as i64).into());
        (1..=count).map(|i| &lo + &step * Q::from_integer((i as i64).into())).collect()
    }
}

#[derive(Clone, Debug)]
pub struct RayBreakpoint {
    pub s: Q,
    pub data: LocalData,
}

/// Segments along a ray, with the distinguished points between them.
#[derive(Clone, Debug)]
pub struct RayAnalysis {
    pub segments: Vec<RaySegment>,
    /// `breakpoints[i]` separates `segments[i]` and `segments[i + 1]`.
    pub breakpoints: Vec<RayBreakpoint>,
}

type Key = (bool, usize, IndifferenceClass, Option<FqPoly>);

fn key(ctx: &Arc<PrimeContext>, ld: &LocalData) -> Key {
    let zero = finite_dir(ctx, FqElement::zero_in(&ctx.residue));
    let m = ld.multiplier_at(&zero).map(|e| e.value);
    (ld.is_fixed, ld.local_degree, ld.class, m)
}

fn midpoint(lo: Option<&Q>, hi: Option<&Q>) -> Q {
    let one = Q::one();
    match (lo, hi) {
        (Some(a), Some(b)) => (a + b) / Q::from_integer(2.into()),
        (Some(a), None) => a + one,
        (None, Some(b)) => b - one,
        (None, None) => Q::zero(),
    }
}

/// Tropical decomposition of the ray `{ζ_{a,s} : lo < s < hi}`.
pub fn ray_analysis_lines(
    ctx: &Arc<PrimeContext>,
    lines: &RayLines,
    lo: Option<&Q>,
    hi: Option<&Q>,
) -> Result<RayAnalysis> {
    if let (Some(a), Some(b)) = (lo, hi) {
        if a >= b {
            return Err(Error::PreconditionViolated("empty s-range".into()));
        }
    }
    let cuts = lines.crossings(lo, hi);
    let mut bounds: Vec<Option<Q>> = vec![lo.cloned()];
    bounds.extend(cuts.iter().cloned().map(Some));
    bounds.push(hi.cloned());
    let mut segs: Vec<RaySegment> = Vec::new();
    let mut bps: Vec<RayBreakpoint> = Vec::new();
    for w in bounds.windows(2) {
        let s = midpoint(w[0].as_ref(), w[1].as_ref());
        let sample = lines.local_data(ctx, &s)?;
        let seg = RaySegment { center: lines.center.clone(), lo: w[0].clone(), hi: w[1].clone(), sample };
        if let Some(prev) = segs.last_mut() {
            let bs = w[0].clone().unwrap();
            let bdata = lines.local_data(ctx, &bs)?;
            let kp = key(ctx, &prev.sample);
            if kp == key(ctx, &seg.sample) && kp == key(ctx, &bdata) {
                prev.hi = seg.hi;
                continue;
            }
            bps.push(RayBreakpoint { s: bs, data: bdata });
        }
        segs.push(seg);
    }
    Ok(RayAnalysis { segments: segs, breakpoints: bps })
}

/// Ray analysis from an exact center over `(lo, hi)`.
pub fn ray_analysis(
    f: &RationalMapK,
    center: &FieldElement,
    lo: Option<&Q>,
    hi: Option<&Q>,
) -> Result<RayAnalysis> {
    let lines = RayLines::exact(f, center);
    ray_analysis_lines(f.ctx(), &lines, lo, hi)
}

/// `λ₁·λ₂ = 1` for the directions facing each other across a fixed
/// indifferent arc `[ζ_{a,s₁}, ζ_{a,s₂}]`.
pub fn multiplier_reciprocity_check(
    f: &RationalMapK,
    center: &FieldElement,
    s1: &Q,
    s2: &Q,
) -> Result<bool> {
    let ctx = f.ctx();
    let (s1, s2) = if s1 < s2 { (s1, s2) } else { (s2, s1) };
    let lines = RayLines::exact(f, center);
    let ra = ray_analysis_lines(ctx, &lines, Some(s1), Some(s2))?;
    let arc_ok = ra.segments.iter().all(|s| s.is_fixed() && s.class().is_indifferent())
        && ra.breakpoints.iter().all(|b| b.data.is_fixed && b.data.class.is_indifferent());
    if !arc_ok {
        return Err(Error::ArcNotFixed);
    }
    let x1 = lines.local_data(ctx, s1)?;
    let x2 = lines.local_data(ctx, s2)?;
    let zero = finite_dir(ctx, FqElement::zero_in(&ctx.residue));
    let (Some(l1), Some(l2)) = (x1.multiplier_at(&zero), x2.multiplier_at(&DirectionPoint::Infinity))
    else {
        return Ok(false);
    };
    let (Some(a), Some(b)) = (l1.as_base(), l2.as_base()) else {
        return Ok(false);
    };
    Ok((a * b) == FqElement::one())
}

/// Valuation of each coefficient of `P(center + z)`: handy for reports.
pub fn shifted_newton_vals(f: &RationalMapK, center: &FieldElement) -> Result<Vec<(Q, usize)>> {
    let p = f.fixed_poly().compose_affine(&FieldElement::one(), center);
    Ok(newton_polygon(f.ctx(), &p)?.root_vals())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exactfield::{q, qf};

    fn c(p: u64) -> Arc<PrimeContext> {
        PrimeContext::split(p)
    }

    fn fe(n: i64) -> FieldElement {
        FieldElement::int(n)
    }

    fn zero_dir(ctx: &Arc<PrimeContext>) -> DirectionPoint {
        finite_dir(ctx, FqElement::zero_in(&ctx.residue))
    }

    fn dir(ctx: &Arc<PrimeContext>, r: i64) -> DirectionPoint {
        finite_dir(ctx, FqElement::from_int(&ctx.residue, r))
    }

    pub(crate) fn segment_map(ctx: &Arc<PrimeContext>) -> RationalMapK {
        RationalMapK::from_ints(ctx, &[0, 0, 2, 3], &[-2, 4, 6, 0, -243]).unwrap()
    }

    #[test]
    fn normalization_examples() {
        let k = c(5);
        let f = RationalMapK::from_ints(&k, &[0, 5], &[5]).unwrap();
        assert_eq!(f.num(), &KPoly::x().map(|x| x.with_ctx(&k)));
        assert_eq!(f.den(), &KPoly::one().map(|x| x.with_ctx(&k)));
        let f = RationalMapK::from_ints(&k, &[0, 5, 1], &[5]).unwrap();
        assert_eq!(f.den().coeff(0), fe(5));
        let f = RationalMapK::from_ints(&k, &[0, 0, 1], &[0, 1]).unwrap();
        assert!(f.is_identity());
        assert_eq!(RationalMapK::from_ints(&k, &[3], &[1]), Err(Error::ConstantMap));
        assert_eq!(RationalMapK::from_ints(&k, &[0, 1], &[0]), Err(Error::ZeroDenominator));
    }

    #[test]
    fn conjugation_examples() {
        let k = c(5);
        let f = RationalMapK::from_ints(&k, &[1, 1], &[1]).unwrap();
        assert_eq!(f.conjugate_affine(&fe(1), &fe(0)).unwrap(), f);
        let g = f.conjugate_affine(&FieldElement::rational(qf(1, 5)), &fe(0)).unwrap();
        let (rn, rd) = g.reduce_pair();
        assert!(FqRationalMap::new(rn, rd).unwrap().is_identity());
        let lam = RationalMapK::from_ints(&k, &[0, 7], &[1]).unwrap();
        assert_eq!(lam.conjugate_affine(&fe(25), &fe(0)).unwrap(), lam);
    }

    #[test]
    fn reductions_at_points() {
        let k = c(5);
        let f = RationalMapK::from_ints(&k, &[1, 1], &[1]).unwrap();
        let ld = reduce_at(&f, &TypeIIPoint::gauss()).unwrap();
        assert!(ld.is_fixed);
        assert_eq!(ld.class, IndifferenceClass::Additive);
        let lam = RationalMapK::from_ints(&k, &[0, 2], &[1]).unwrap();
        for s in [-3, 0, 2] {
            let ld = reduce_at(&lam, &TypeIIPoint::new(fe(0), q(s))).unwrap();
            assert_eq!(ld.class, IndifferenceClass::Multiplicative);
        }
        let k3 = c(3);
        let seg = segment_map(&k3);
        let ld = reduce_at(&seg, &TypeIIPoint::gauss()).unwrap();
        assert_eq!(ld.class, IndifferenceClass::Repelling);
        assert_eq!(ld.local_degree, 2);
        let fq = |c: &[i64]| Poly::new(c.iter().map(|&v| FqElement::from_int(&k3.residue, v)).collect());
        assert_eq!(ld.reduced_map, Some(FqRationalMap::new(fq(&[0, 0, 1]), fq(&[-1, 2])).unwrap()));
        assert_eq!(ld.total_surplus(), 2);
        assert_eq!(
            reduce_at(&f, &TypeIIPoint::new(fe(0), qf(1, 3))).unwrap_err(),
            Error::NeedsExtension { n: 3, k: 1 }
        );
    }

    #[test]
    fn surplus_examples() {
        let k = c(5);
        let f = RationalMapK::from_ints(&k, &[1, 1], &[1]).unwrap();
        let g = TypeIIPoint::gauss();
        assert_eq!(reduce_at(&f, &g).unwrap().total_surplus(), 0);
        let sq = RationalMapK::from_ints(&k, &[0, 0, 1], &[1]).unwrap();
        assert_eq!(reduce_at(&sq, &g).unwrap().total_surplus(), 0);
        let k3 = c(3);
        let seg = segment_map(&k3);
        let ld = reduce_at(&seg, &g).unwrap();
        // reduces to 2w²/(w + 1): nothing cancels, the lost degree sits at ∞
        assert_eq!(ld.surplus_at(&DirectionPoint::Infinity), 2);
        assert_eq!(ld.surplus_at(&zero_dir(&k3)), 0);
        assert_eq!(surplus(&seg, &g, &dir(&k3, 1)).unwrap(), 0);
    }

    #[test]
    fn classical_counts() {
        let k = c(5);
        let g = TypeIIPoint::gauss();
        let f = RationalMapK::from_ints(&k, &[1, 1], &[1]).unwrap();
        assert_eq!(classical_count_in_direction(&f, &g, &DirectionPoint::Infinity).unwrap(), 2);
        let lam = RationalMapK::from_ints(&k, &[0, 6], &[1]).unwrap();
        assert_eq!(classical_count_in_direction(&lam, &g, &zero_dir(&k)).unwrap(), 1);
        let sq = RationalMapK::from_ints(&k, &[0, 0, 1], &[1]).unwrap();
        assert_eq!(classical_count_in_direction(&sq, &g, &dir(&k, 1)).unwrap(), 1);
        assert_eq!(classical_count_in_direction(&sq, &g, &dir(&k, 2)).unwrap(), 0);
    }

    #[test]
    fn identification_examples() {
        let k = c(5);
        let g = TypeIIPoint::gauss();
        let f = RationalMapK::from_ints(&k, &[1, 1], &[1]).unwrap();
        assert!(identification_check(&f, &g, &DirectionPoint::Infinity).unwrap());
        let sq = RationalMapK::from_ints(&k, &[0, 0, 1], &[1]).unwrap();
        assert!(identification_check(&sq, &g, &dir(&k, 1)).unwrap());
        let k3 = c(3);
        let seg = segment_map(&k3);
        for v in [zero_dir(&k3), dir(&k3, 1), dir(&k3, 2), DirectionPoint::Infinity] {
            assert!(identification_check(&seg, &g, &v).unwrap(), "{v}");
        }
        let id = RationalMapK::from_ints(&k, &[0, 6], &[1]).unwrap();
        assert_eq!(
            identification_check(&id, &g, &zero_dir(&k)),
            Err(Error::IdentityTangentMap)
        );
    }

    #[test]
    fn ray_scaling_map() {
        // λ = 6, val(λ - 1) = 1, ray from 1
        let k = c(5);
        let lam = RationalMapK::from_ints(&k, &[0, 6], &[1]).unwrap();
        let ra = ray_analysis(&lam, &fe(1), Some(&q(0)), Some(&q(2))).unwrap();
        assert_eq!(ra.segments.len(), 2);
        assert_eq!(ra.segments[0].class(), IndifferenceClass::IdIndifferent);
        assert_eq!(ra.breakpoints[0].s, q(1));
        assert_eq!(ra.breakpoints[0].data.class, IndifferenceClass::Additive);
        assert!(!ra.segments[1].is_fixed());
    }

    #[test]
    fn ray_translation_map() {
        let k = c(5);
        let f = RationalMapK::from_ints(&k, &[1, 1], &[1]).unwrap();
        let ra = ray_analysis(&f, &fe(0), Some(&q(-1)), Some(&q(1))).unwrap();
        assert_eq!(ra.segments.len(), 2);
        assert_eq!(ra.segments[0].class(), IndifferenceClass::IdIndifferent);
        assert_eq!(ra.breakpoints[0].s, q(0));
        assert_eq!(ra.breakpoints[0].data.class, IndifferenceClass::Additive);
        assert!(!ra.segments[1].is_fixed());
    }

    #[test]
    fn ray_segment_map() {
        let k3 = c(3);
        let seg = segment_map(&k3);
        let ra = ray_analysis(&seg, &fe(0), Some(&q(-3)), Some(&q(1))).unwrap();
        let fixed: Vec<_> = ra.segments.iter().filter(|s| s.is_fixed()).collect();
        assert_eq!(fixed.len(), 1);
        assert_eq!(fixed[0].lo, Some(q(-2)));
        assert_eq!(fixed[0].hi, Some(q(0)));
        assert_eq!(fixed[0].class(), IndifferenceClass::Multiplicative);
        let half = FqElement::from_int(&k3.residue, 2);
        assert_eq!(fixed[0].ray_multiplier(&k3).unwrap().as_base(), Some(half));
        assert!(multiplier_reciprocity_check(&seg, &fe(0), &q(-2), &q(0)).unwrap());
    }

    #[test]
    fn reciprocity_for_scaling() {
        let k = c(5);
        let lam = RationalMapK::from_ints(&k, &[0, 2], &[1]).unwrap();
        assert!(multiplier_reciprocity_check(&lam, &fe(0), &q(-1), &q(1)).unwrap());
        let sq = RationalMapK::from_ints(&k, &[0, 0, 1], &[1]).unwrap();
        assert_eq!(
            multiplier_reciprocity_check(&sq, &fe(0), &q(-1), &q(1)),
            Err(Error::ArcNotFixed)
        );
    }

    #[test]
    fn support_reduction_matches_conjugation() {
        let k3 = c(3);
        let seg = segment_map(&k3);
        let lines = RayLines::exact(&seg, &fe(0));
        for s in -4..3 {
            let x = TypeIIPoint::new(fe(0), q(s));
            let a = reduce_at(&seg, &x).unwrap();
            let b = lines.local_data(&k3, &q(s)).unwrap();
            assert_eq!(a.is_fixed, b.is_fixed);
            assert_eq!(a.reduced_map, b.reduced_map);
        }
    }

    #[test]
    fn direction_of_points() {
        let k = c(5);
        let x = TypeIIPoint::gauss();
        assert_eq!(x.direction_of(&k, Some(&fe(7))), dir(&k, 2));
        assert_eq!(x.direction_of(&k, Some(&fe(5))), zero_dir(&k));
        assert_eq!(x.direction_of(&k, Some(&FieldElement::rational(qf(1, 5)))), DirectionPoint::Infinity);
        assert_eq!(x.direction_of(&k, None), DirectionPoint::Infinity);
        assert!(TypeIIPoint::new(fe(1), q(1)).same_point(&TypeIIPoint::new(fe(6), q(1)), &k));
        assert!(!TypeIIPoint::new(fe(1), q(1)).same_point(&TypeIIPoint::new(fe(2), q(1)), &k));
    }
}
