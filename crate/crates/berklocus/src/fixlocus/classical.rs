//! Classical (type I) fixed points with multiplicities and multipliers.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::berkmap::RationalMapK;
use crate::error::{Error, Result};
use crate::exactfield::{FieldElement, KPoly, PrimeContext, Val, Q};
use crate::poly::Field;
use crate::residue::FqElement;
use crate::roots::{find_roots, squarefree_decomposition, Root};

#[derive(Clone, Debug, PartialEq)]
pub enum Location {
    Infinity,
    Finite(Root),
}

impl Location {
    pub fn finite(&self) -> Option<&Root> {
        match self {
            Location::Finite(r) => Some(r),
            Location::Infinity => None,
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Infinity => f.write_str("inf"),
            Location::Finite(r) => match &r.prec {
                None => write!(f, "{}", r.approx),
                Some(m) => write!(f, "{} + O(p^{})", r.approx, m),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointClass {
    Attracting,
    Indifferent,
    Repelling,
}

impl PointClass {
    pub fn name(&self) -> &'static str {
        match self {
            PointClass::Attracting => "attracting",
            PointClass::Indifferent => "indifferent",
            PointClass::Repelling => "repelling",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalFixedPoint {
    pub location: Location,
    pub multiplicity: usize,
    /// `Val::Inf` for a superattracting point.
    pub multiplier_val: Val,
    /// Residue of the multiplier, when it is integral.
    pub multiplier_residue: Option<FqElement>,
    pub class: PointClass,
}

impl ClassicalFixedPoint {
    fn with_multiplier(ctx: &Arc<PrimeContext>, location: Location, multiplicity: usize, lam: &FieldElement) -> Self {
        let v = lam.val_in(ctx);
        Self::from_parts(ctx, location, multiplicity, v, || lam.residue(ctx).ok())
    }

    fn from_parts(
        ctx: &Arc<PrimeContext>,
        location: Location,
        multiplicity: usize,
        v: Val,
        res: impl FnOnce() -> Option<FqElement>,
    ) -> Self {
        let (class, residue) = match &v {
            Val::Inf => (PointClass::Attracting, Some(FqElement::zero_in(&ctx.residue))),
            Val::Fin(x) if x.is_positive() => (PointClass::Attracting, Some(FqElement::zero_in(&ctx.residue))),
            Val::Fin(x) if x.is_zero() => (PointClass::Indifferent, res()),
            Val::Fin(_) => (PointClass::Repelling, None),
        };
        ClassicalFixedPoint { location, multiplicity, multiplier_val: v, multiplier_residue: residue, class }
    }

    fn parabolic(ctx: &Arc<PrimeContext>, location: Location, multiplicity: usize) -> Self {
        let one = FqElement::from_int(&ctx.residue, 1);
        Self::from_parts(ctx, location, multiplicity, Val::Fin(Q::zero()), || Some(one))
    }
}

/// Multiplier at the approximate root, or `None` if the precision cannot
/// certify its valuation.
fn certified_multiplier(f: &RationalMapK, t: &KPoly, s: &KPoly, r: &Root) -> Option<FieldElement> {
    let ctx = f.ctx();
    let ta = t.eval(&r.approx);
    let sa = s.eval(&r.approx);
    let Some(m) = &r.prec else {
        return Some(ta.div(&sa));
    };
    let va = r.approx.val_in(ctx).fin().cloned().unwrap_or_else(Q::zero);
    let kappa = if va.is_negative() { va * Q::from_integer((2 * f.degree() as i64).into()) } else { Q::zero() };
    let bound = m + kappa;
    let ok = |v: Val| matches!(v, Val::Fin(x) if x < bound);
    if ok(ta.val_in(ctx)) && ok(sa.val_in(ctx)) {
        Some(ta.div(&sa))
    } else {
        None
    }
}

/// Classical fixed points with roots approximated to precision `target`.
/// `Ok(None)` means the precision was too low to certify some multiplier.
pub fn classical_fixed_points_at(f: &RationalMapK, target: &Q) -> Result<Option<Vec<ClassicalFixedPoint>>> {
    if f.is_identity() {
        return Err(Error::IdentityMap);
    }
    let ctx = f.ctx();
    let (t, s) = f.derivative_pair();
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition(&f.fixed_poly()) {
        if e >= 2 {
            for r in find_roots(ctx, &g, target)? {
                out.push(ClassicalFixedPoint::parabolic(ctx, Location::Finite(r), e));
            }
            continue;
        }
        // superattracting points are split off so their multiplier is exactly 0
        let crit = g.gcd(&t);
        let rest = g.div_exact(&crit);
        if crit.deg0() > 0 {
            for r in find_roots(ctx, &crit, target)? {
                out.push(ClassicalFixedPoint::from_parts(ctx, Location::Finite(r), 1, Val::Inf, || None));
            }
        }
        if rest.deg0() > 0 {
            for r in find_roots(ctx, &rest, target)? {
                let Some(lam) = certified_multiplier(f, &t, &s, &r) else {
                    return Ok(None);
                };
                out.push(ClassicalFixedPoint::with_multiplier(ctx, Location::Finite(r), 1, &lam));
            }
        }
    }
    let e_inf = f.infinity_multiplicity();
    if e_inf >= 2 {
        out.push(ClassicalFixedPoint::parabolic(ctx, Location::Infinity, e_inf));
    } else if e_inf == 1 {
        let g = f.flip();
        let lam = g.num().coeff(1).div(&g.den().coeff(0));
        out.push(ClassicalFixedPoint::with_multiplier(ctx, Location::Infinity, 1, &lam));
    }
    Ok(Some(out))
}

/// Classical fixed points, doubling the working precision until every
/// multiplier is certified.
pub fn classical_fixed_points(f: &RationalMapK, precision: &Q) -> Result<Vec<ClassicalFixedPoint>> {
    let mut m = precision.clone();
    for _ in 0..8 {
        if let Some(v) = classical_fixed_points_at(f, &m)? {
            return Ok(v);
        }
        m = &m * Q::from_integer(2.into());
    }
    Err(Error::ExplorationIncomplete("multiplier precision not reached".into()))
}

pub fn total_multiplicity(pts: &[ClassicalFixedPoint]) -> usize {
    pts.iter().map(|c| c.multiplicity).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::q;

    fn count(pts: &[ClassicalFixedPoint], c: PointClass) -> usize {
        pts.iter().filter(|x| x.class == c).count()
    }

    #[test]
    fn squaring_map() {
        let ctx = PrimeContext::split(5);
        let f = RationalMapK::from_ints(&ctx, &[0, 0, 1], &[1]).unwrap();
        let pts = classical_fixed_points(&f, &q(10)).unwrap();
        assert_eq!(total_multiplicity(&pts), 3);
        assert_eq!(count(&pts, PointClass::Attracting), 2);
        let one = pts.iter().find(|x| x.class == PointClass::Indifferent).unwrap();
        assert_eq!(one.location, Location::Finite(Root::exact(FieldElement::int(1).with_ctx(&ctx))));
        assert_eq!(one.multiplier_residue, Some(FqElement::from_int(&ctx.residue, 2)));
    }

    #[test]
    fn translation_and_scaling() {
        let ctx = PrimeContext::split(3);
        let f = RationalMapK::from_ints(&ctx, &[1, 1], &[1]).unwrap();
        let pts = classical_fixed_points(&f, &q(8)).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!((pts[0].location.clone(), pts[0].multiplicity), (Location::Infinity, 2));
        let g = RationalMapK::from_ints(&ctx, &[0, 9], &[1]).unwrap();
        let pts = classical_fixed_points(&g, &q(8)).unwrap();
        assert_eq!(pts[0].multiplier_val, Val::Fin(q(2)));
        assert_eq!(pts[1].multiplier_val, Val::Fin(q(-2)));
        assert_eq!(pts[1].class, PointClass::Repelling);
    }

    #[test]
    fn approximate_multipliers() {
        // z^5 over Q_5: 4th roots of unity are repelling (λ = 5)
        let ctx = PrimeContext::split(5);
        let f = RationalMapK::from_ints(&ctx, &[0, 0, 0, 0, 0, 1], &[1]).unwrap();
        let pts = classical_fixed_points(&f, &q(6)).unwrap();
        let rep: Vec<_> = pts.iter().filter(|x| x.class == PointClass::Repelling).collect();
        assert_eq!(rep.len(), 0);
        let att = pts.iter().filter(|x| x.multiplier_val == Val::Fin(q(1))).count();
        assert_eq!(att, 4);
        assert!(pts.iter().any(|x| x.multiplier_val == Val::Fin(q(1)) && x.location.finite().unwrap().prec.is_some()));
    }

    #[test]
    fn identity_rejected() {
        let ctx = PrimeContext::split(3);
        let f = RationalMapK::from_ints(&ctx, &[0, 2], &[2]).unwrap();
        assert_eq!(classical_fixed_points(&f, &q(4)), Err(Error::IdentityMap));
    }
}
