//! Roots of polynomials over the working field: exact where possible,
//! otherwise approximations with a certified error valuation.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactfield::{newton_polygon, vp_rat, FieldElement, KPoly, PrimeContext, Val, Q};
use crate::poly::{Field, Poly};
use crate::residue::{factor, FqElement, FqPoly};

/// A root `x` known through `approx`; `prec = None` means `x = approx`,
/// otherwise `val(x - approx) ≥ prec`.
#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub approx: FieldElement,
    pub prec: Option<Q>,
}

impl Root {
    pub fn exact(x: FieldElement) -> Self {
        Root { approx: x, prec: None }
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }
}

/// Squarefree decomposition in characteristic 0: monic `(g, e)` with
/// `p = c·Π gᵉ`.
pub fn squarefree_decomposition(p: &KPoly) -> Vec<(KPoly, usize)> {
    let mut out = Vec::new();
    if p.deg0() == 0 {
        return out;
    }
    let p = p.monic();
    let dp = p.derivative();
    let a = p.gcd(&dp);
    let mut b = p.div_exact(&a);
    let mut c = dp.div_exact(&a);
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while b.deg0() > 0 {
        let g = b.gcd(&d);
        b = b.div_exact(&g);
        c = d.div_exact(&g);
        d = &c - &b.derivative();
        if g.deg0() > 0 {
            out.push((g.monic(), i));
        }
        i += 1;
    }
    out
}

/// Product of the distinct monic irreducible factors.
pub fn radical(p: &KPoly) -> KPoly {
    if p.deg0() == 0 {
        return KPoly::one();
    }
    p.div_exact(&p.gcd(&p.derivative())).monic()
}

fn scale_to_unit(ctx: &Arc<PrimeContext>, q: &KPoly) -> KPoly {
    let m = q
        .coeffs()
        .iter()
        .filter_map(|c| c.val_in(ctx).fin().cloned())
        .min()
        .expect("nonzero");
    let e = (m * Q::from_integer((ctx.n as i64).into())).to_integer().to_i64().unwrap();
    q.scale(&FieldElement::pi_pow(ctx, -e))
}

fn reduce(ctx: &Arc<PrimeContext>, q: &KPoly) -> FqPoly {
    Poly::new(q.coeffs().iter().map(|c| c.residue(ctx).unwrap()).collect())
}

const MAX_DEPTH: usize = 200;

/// All roots of a squarefree polynomial, approximated to `target`.
pub fn find_roots(ctx: &Arc<PrimeContext>, q: &KPoly, target: &Q) -> Result<Vec<Root>> {
    let mut out = roots_rec(ctx, q, target, 0)?;
    for r in out.iter_mut() {
        if r.prec.is_some() {
            if let Some(x) = reconstruct_exact(ctx, q, &r.approx, r.prec.as_ref().unwrap()) {
                *r = Root::exact(x);
            }
        }
    }
    Ok(out)
}

fn roots_rec(ctx: &Arc<PrimeContext>, q: &KPoly, target: &Q, depth: usize) -> Result<Vec<Root>> {
    let mut out = Vec::new();
    let z0 = q.order_at_zero().ok_or(Error::ZeroPolynomial)?;
    if z0 > 1 {
        return Err(Error::PreconditionViolated("polynomial is not squarefree".into()));
    }
    let q = if z0 == 1 {
        out.push(Root::exact(FieldElement::zero().with_ctx(ctx)));
        q.div_exact(&KPoly::x())
    } else {
        q.clone()
    };
    for seg in newton_polygon(ctx, &q)?.segments {
        out.extend(roots_of_val(ctx, &q, &seg.root_val(), target, depth)?);
    }
    Ok(out)
}

/// Roots of exact valuation `v`, approximated to `target`.
fn roots_of_val(
    ctx: &Arc<PrimeContext>,
    q: &KPoly,
    v: &Q,
    target: &Q,
    depth: usize,
) -> Result<Vec<Root>> {
    let nv = v * Q::from_integer((ctx.n as i64).into());
    if !nv.is_integer() {
        let b = v.denom().to_usize().unwrap();
        return Err(Error::NeedsExtension { n: ctx.n.lcm(&b), k: ctx.k });
    }
    let u = FieldElement::pi_pow(ctx, nv.to_integer().to_i64().unwrap());
    let qs = scale_to_unit(ctx, &q.compose_affine(&u, &FieldElement::zero()));
    let red = reduce(ctx, &qs);
    let ord = red.order_at_zero().unwrap_or(0);
    let red = red.div_exact(&FqPoly::x().shift_up(0).pow(ord).map(|c| c.with_ctx(&ctx.residue)));
    let mut out = Vec::new();
    for (g, e) in factor(&red)? {
        if g.deg0() > 1 {
            return Err(Error::NeedsExtension { n: ctx.n, k: ctx.k * g.deg0() });
        }
        let rho = -g.coeff(0);
        for w in roots_near(ctx, &qs, &rho, e, &(target - v), depth)? {
            out.push(Root {
                approx: u.clone() * w.approx,
                prec: w.prec.map(|p| p + v),
            });
        }
    }
    Ok(out)
}

/// Roots of a unit-normalised `q` whose residue is `rho`, a residue root of
/// multiplicity `mu`.
fn roots_near(
    ctx: &Arc<PrimeContext>,
    q: &KPoly,
    rho: &FqElement,
    mu: usize,
    target: &Q,
    depth: usize,
) -> Result<Vec<Root>> {
    if depth > MAX_DEPTH {
        return Err(Error::ExplorationIncomplete("root cluster nesting too deep".into()));
    }
    let w0 = FieldElement::lift(ctx, rho);
    if mu == 1 {
        return Ok(vec![newton(ctx, q, w0, target)]);
    }
    let r = q.compose_affine(&FieldElement::one(), &w0);
    let mut out = Vec::new();
    let r = if r.coeff(0).is_zero() {
        out.push(Root::exact(w0.clone()));
        r.div_exact(&KPoly::x())
    } else {
        r
    };
    for seg in newton_polygon(ctx, &r)?.segments {
        let v = seg.root_val();
        if v.is_positive() {
            for t in roots_of_val(ctx, &r, &v, target, depth + 1)? {
                out.push(Root { approx: w0.clone() + t.approx, prec: t.prec });
            }
        }
    }
    debug_assert_eq!(out.len(), mu);
    Ok(out)
}

/// Newton iteration from a simple residue root; the error valuation equals
/// `val q(w)` because `q'(w)` is a unit.
fn newton(ctx: &Arc<PrimeContext>, q: &KPoly, mut w: FieldElement, target: &Q) -> Root {
    let dq = q.derivative();
    loop {
        let qw = q.eval(&w);
        let v = match qw.val_in(ctx) {
            Val::Inf => return Root::exact(w),
            Val::Fin(v) => v,
        };
        if v >= *target {
            return Root { approx: w, prec: Some(v) };
        }
        let step = qw.div(&dq.eval(&w));
        let two_v = &v * Q::from_integer(2.into());
        let cut = if two_v < target + Q::one() { two_v } else { target + Q::one() };
        w = (w - step).truncate(&cut);
    }
}

/// Tries to recognise a rational root from its `p`-adic approximation.
fn reconstruct_exact(ctx: &Arc<PrimeContext>, q: &KPoly, a: &FieldElement, prec: &Q) -> Option<FieldElement> {
    let r = a.as_rational()?;
    let p = ctx.p;
    let shift = match vp_rat(&r, p) {
        Some(v) if v < 0 => -v,
        _ => 0,
    };
    let m = prec.floor().to_integer().to_i64()? + shift;
    if m <= 0 || m > 4000 {
        return None;
    }
    let modulus = BigInt::from(p).pow(m as u32);
    let scaled = &r * Q::from_integer(BigInt::from(p).pow(shift as u32));
    if !scaled.is_integer() {
        return None;
    }
    let a_int = scaled.to_integer().mod_floor(&modulus);
    let (num, den) = rational_reconstruction(&a_int, &modulus)?;
    let cand = Q::new(num, den * BigInt::from(p).pow(shift as u32));
    let x = FieldElement::rational(cand).with_ctx(ctx);
    if q.eval(&x).is_zero() {
        Some(x)
    } else {
        None
    }
}

/// `(r, s)` with `r ≡ s·a (mod m)` and `|r|, |s| ≤ √(m/2)`.
pub fn rational_reconstruction(a: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound: BigInt = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let qt = &r0 / &r1;
        let r2 = &r0 - &qt * &r1;
        let s2 = &s0 - &qt * &s1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.is_zero() || s1.abs() > bound {
        return None;
    }
    if s1.is_negative() {
        Some((-r1, -s1))
    } else {
        Some((r1, s1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{q, qf};

    fn kp(ctx: &Arc<PrimeContext>, c: &[i64]) -> KPoly {
        Poly::new(c.iter().map(|&v| FieldElement::int(v).with_ctx(ctx)).collect())
    }

    #[test]
    fn rational_roots_are_exact() {
        let c = PrimeContext::split(5);
        // (3z - 4)(z + 7)
        let p = kp(&c, &[-28, 17, 3]);
        let roots = find_roots(&c, &p, &q(20)).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.is_exact()));
        assert!(roots.iter().any(|r| r.approx == FieldElement::rational(qf(4, 3))));
        assert!(roots.iter().any(|r| r.approx == FieldElement::int(-7)));
    }

    #[test]
    fn roots_of_unity_approximated() {
        let c = PrimeContext::split(5);
        let p = kp(&c, &[-1, 0, 0, 0, 1]);
        let roots = find_roots(&c, &p, &q(12)).unwrap();
        assert_eq!(roots.len(), 4);
        for r in &roots {
            let err = p.eval(&r.approx).val_in(&c);
            assert!(err >= Val::Fin(q(12)));
        }
    }

    #[test]
    fn clustered_roots() {
        // (z - 1)(z - 1 - 125)(z - 26): residues all 1, separated deeper
        let c = PrimeContext::split(5);
        let lin = |a: i64| kp(&c, &[-a, 1]);
        let p = &(&lin(1) * &lin(126)) * &lin(26);
        let roots = find_roots(&c, &p, &q(10)).unwrap();
        let mut vals: Vec<i64> = roots.iter().map(|r: &Root| r.approx.as_rational().unwrap().to_integer().to_i64().unwrap()).collect();
        vals.sort();
        assert_eq!(vals, vec![1, 26, 126]);
    }

    #[test]
    fn ramified_roots_need_extension() {
        let c = PrimeContext::split(5);
        let p = kp(&c, &[-5, 0, 1]);
        assert_eq!(find_roots(&c, &p, &q(4)), Err(Error::NeedsExtension { n: 2, k: 1 }));
        let c2 = c.with_ramification(2).unwrap();
        let roots = find_roots(&c2, &p.map(|x| x.embed(&c2)), &q(4)).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.approx.val() == Val::Fin(qf(1, 2))));
        let c3 = PrimeContext::split(3);
        let p = kp(&c3, &[1, 0, 1]);
        assert_eq!(find_roots(&c3, &p, &q(4)), Err(Error::NeedsExtension { n: 1, k: 2 }));
    }

    #[test]
    fn squarefree_parts() {
        let c = PrimeContext::split(7);
        let lin = |a: i64| kp(&c, &[-a, 1]);
        let p = &(&lin(1) * &lin(1)) * &(&lin(2) * &(&lin(3) * &(&lin(3) * &lin(3))));
        let parts = squarefree_decomposition(&p);
        let shape: Vec<(usize, usize)> = parts.iter().map(|(g, e)| (g.deg0(), *e)).collect();
        assert_eq!(shape, vec![(1, 1), (1, 2), (1, 3)]);
        assert_eq!(radical(&p).deg0(), 3);
    }

    #[test]
    fn reconstruction() {
        let m = BigInt::from(5).pow(20);
        // 4/3 mod 5^20
        let inv3 = BigInt::from(3).modpow(&(BigInt::from(4) * BigInt::from(5).pow(19) - 1), &m);
        let a = (BigInt::from(4) * inv3).mod_floor(&m);
        assert_eq!(rational_reconstruction(&a, &m), Some((BigInt::from(4), BigInt::from(3))));
    }
}
