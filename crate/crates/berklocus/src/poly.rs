//! Dense univariate polynomials over an exact field.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact field scalar.
///
/// `zero()`/`one()` come from num-traits, so scalars that carry a runtime
/// context must allow a context-free constant form.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn try_inv(&self) -> Option<Self>;

    /// `n · self`.
    fn mul_int(&self, n: i64) -> Self;

    fn div(&self, other: &Self) -> Self {
        self.clone() * other.try_inv().expect("division by zero")
    }
}

impl Field for BigRational {
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn mul_int(&self, n: i64) -> Self {
        self * BigRational::from_integer(BigInt::from(n))
    }
}

/// Coefficients are stored low degree first with no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T: Field> {
    c: Vec<T>,
}

impl<T: Field> Poly<T> {
    pub fn new(mut c: Vec<T>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn constant(a: T) -> Self {
        Poly::new(vec![a])
    }

    pub fn one() -> Self {
        Poly::constant(T::one())
    }

    /// The monomial `z`.
    pub fn x() -> Self {
        Poly::new(vec![T::zero(), T::one()])
    }

    /// `a·z^i`.
    pub fn monomial(a: T, i: usize) -> Self {
        let mut c = vec![T::zero(); i + 1];
        c[i] = a;
        Poly::new(c)
    }

    /// `z - a`.
    pub fn linear_root(a: &T) -> Self {
        Poly::new(vec![-a.clone(), T::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> T {
        self.c.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn lead(&self) -> T {
        self.c.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.c.iter().map(f).collect())
    }

    pub fn scale(&self, a: &T) -> Self {
        Poly::new(self.c.iter().map(|x| x.clone() * a.clone()).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().try_inv().expect("nonzero lead");
        self.scale(&inv)
    }

    pub fn eval(&self, z: &T) -> T {
        let mut acc = T::zero();
        for a in self.c.iter().rev() {
            acc = acc * z.clone() + a.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a.mul_int(i as i64))
                .collect(),
        )
    }

    /// Multiplies by `z^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![T::zero(); k];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    /// Order of vanishing at 0 (`None` for the zero polynomial).
    pub fn order_at_zero(&self) -> Option<usize> {
        self.c.iter().position(|a| !a.is_zero())
    }

    /// `z^d · p(1/z)`; requires `d ≥ deg p`.
    pub fn reverse(&self, d: usize) -> Self {
        let mut c = vec![T::zero(); d + 1];
        for (i, a) in self.c.iter().enumerate() {
            c[d - i] = a.clone();
        }
        Poly::new(c)
    }

    pub fn pow(&self, mut e: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `p(u·z + a)`.
    pub fn compose_affine(&self, u: &T, a: &T) -> Self {
        let lin = Poly::new(vec![a.clone(), u.clone()]);
        let mut acc = Poly::zero();
        for c in self.c.iter().rev() {
            acc = &(&acc * &lin) + &Poly::constant(c.clone());
        }
        acc
    }

    /// `p(q(z))`.
    pub fn compose(&self, q: &Poly<T>) -> Self {
        let mut acc = Poly::zero();
        for c in self.c.iter().rev() {
            acc = &(&acc * q) + &Poly::constant(c.clone());
        }
        acc
    }

    pub fn divrem(&self, d: &Poly<T>) -> (Self, Self) {
        let dd = d.degree().expect("polynomial division by zero");
        let inv = d.lead().try_inv().expect("nonzero lead");
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![T::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = r[i + dd].clone() * inv.clone();
            if coef.is_zero() {
                continue;
            }
            for (j, b) in d.c.iter().enumerate() {
                r[i + j] = r[i + j].clone() - coef.clone() * b.clone();
            }
            q[i] = coef;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly<T>) -> Self {
        self.divrem(d).1
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn div_exact(&self, d: &Poly<T>) -> Self {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, other: &Poly<T>) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s·self + t·other = g`, `g` monic.
    pub fn xgcd(&self, other: &Poly<T>) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = r1;
            r1 = r;
            let s = &s0 - &(&q * &s1);
            s0 = s1;
            s1 = s;
            let t = &t0 - &(&q * &t1);
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lead().try_inv().unwrap();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Inverse of `self` modulo `m`, if it exists.
    pub fn inv_mod(&self, m: &Poly<T>) -> Option<Self> {
        let (g, s, _) = self.rem(m).xgcd(m);
        if g.degree() == Some(0) {
            Some(s.rem(m))
        } else {
            None
        }
    }

    pub fn mul_mod(&self, other: &Poly<T>, m: &Poly<T>) -> Self {
        (self * other).rem(m)
    }

    pub fn pow_mod(&self, e: &BigInt, m: &Poly<T>) -> Self {
        let mut acc = Poly::one().rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul_mod(&acc, m);
            if e.bit(i) {
                acc = acc.mul_mod(&base, m);
            }
        }
        acc
    }
}

/// Resultant by the Euclidean algorithm over a field.
pub fn resultant<T: Field>(a: &Poly<T>, b: &Poly<T>) -> T {
    let (Some(mut da), Some(mut db)) = (a.degree(), b.degree()) else {
        return T::zero();
    };
    let mut a = a.clone();
    let mut b = b.clone();
    let mut acc = T::one();
    loop {
        if db == 0 {
            return acc * pow_scalar(&b.lead(), da);
        }
        let r = a.rem(&b);
        let Some(dr) = r.degree() else {
            return T::zero();
        };
        if da % 2 == 1 && db % 2 == 1 {
            acc = -acc;
        }
        acc = acc * pow_scalar(&b.lead(), da - dr);
        a = b;
        da = db;
        b = r;
        db = dr;
    }
}

pub fn pow_scalar<T: Field>(a: &T, e: usize) -> T {
    let mut acc = T::one();
    for _ in 0..e {
        acc = acc * a.clone();
    }
    acc
}

impl<T: Field> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, o: &Poly<T>) -> Poly<T> {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<T: Field> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, o: &Poly<T>) -> Poly<T> {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl<T: Field> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, o: &Poly<T>) -> Poly<T> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![T::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(c)
    }
}

impl<T: Field> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.c.iter().map(|a| -a.clone()).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Field> $tr for Poly<T> {
            type Output = Poly<T>;
            fn $m(self, o: Poly<T>) -> Poly<T> {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Renders with a variable name and a coefficient printer; coefficients that
/// print with a sign or spaces get parenthesised.
pub fn render<T: Field>(p: &Poly<T>, var: &str, show: impl Fn(&T) -> String) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (i, a) in p.coeffs().iter().enumerate().rev() {
        if a.is_zero() {
            continue;
        }
        let s = show(a);
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        let term = if i == 0 {
            s
        } else if s == "1" {
            mono
        } else if s == "-1" {
            format!("-{mono}")
        } else if s.contains(['+', ' ']) || (s[1..].contains('-')) {
            format!("({s}){mono}")
        } else {
            format!("{s}{mono}")
        };
        parts.push(term);
    }
    let mut out = parts[0].clone();
    for t in &parts[1..] {
        if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn qp(c: &[i64]) -> Poly<BigRational> {
        Poly::new(c.iter().map(|&n| q(n)).collect())
    }

    #[test]
    fn divrem_round_trip() {
        let a = qp(&[1, -3, 0, 2, 5]);
        let b = qp(&[2, 1, 1]);
        let (qq, r) = a.divrem(&b);
        assert_eq!(&(&qq * &b) + &r, a);
        assert!(r.deg0() < 2);
    }

    #[test]
    fn gcd_of_products() {
        let a = &qp(&[-1, 1]) * &qp(&[2, 1]);
        let b = &qp(&[-1, 1]) * &qp(&[3, 1]);
        assert_eq!(a.gcd(&b), qp(&[-1, 1]));
    }

    #[test]
    fn resultant_matches_root_product() {
        // Res(z^2 - 2, z - 3) = (3^2 - 2) up to sign convention: prod over roots of a of b(root)
        let a = qp(&[-2, 0, 1]);
        let b = qp(&[-3, 1]);
        assert_eq!(resultant(&a, &b), q(7));
        // Res(z^2+1, z^2-1) = prod_{i,-i} (r^2 - 1) = (-2)(-2) = 4
        assert_eq!(resultant(&qp(&[1, 0, 1]), &qp(&[-1, 0, 1])), q(4));
    }

    #[test]
    fn compose_affine_matches_eval() {
        let p = qp(&[3, 0, -1, 2]);
        let c = p.compose_affine(&q(2), &q(-1));
        for z in -3..4 {
            assert_eq!(c.eval(&q(z)), p.eval(&(q(2) * q(z) - q(1))));
        }
    }

    #[test]
    fn reverse_and_render() {
        let p = qp(&[1, 0, -2]);
        assert_eq!(p.reverse(3), qp(&[0, -2, 0, 1]));
        assert_eq!(render(&p, "z", |a| a.to_string()), "-2z^2 + 1");
    }
}
