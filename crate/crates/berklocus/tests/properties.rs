//! Property tests across module boundaries.

use berklocus::berkmap::{reduce_at, RayLines, TypeIIPoint};
use berklocus::exactfield::{newton_polygon, q, qf, vp_rat, FieldElement, PrimeContext, Val, Q};
use berklocus::oracle::{brute_is_fixed, random_map, random_point};
use berklocus::residue::{factor, FqContext, FqElement, FqPoly};
use berklocus::{KPoly, Poly};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_rational() -> impl Strategy<Value = Q> {
    (-60i64..60, 1i64..30).prop_map(|(n, d)| qf(n, d))
}

/// Element of `Q_3(π)`, `π² = 3`, from coefficients of `1, π`.
fn ramified_element() -> impl Strategy<Value = FieldElement> {
    let ctx = PrimeContext::new(3, 2, 1, None).unwrap();
    (small_rational(), small_rational()).prop_map(move |(a, b)| FieldElement::from_coeffs(&ctx, vec![a, b]))
}

fn fin(v: Val) -> Option<Q> {
    v.fin().cloned()
}

fn fq_poly() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..7, 2..9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuation_is_multiplicative_and_ultrametric(x in ramified_element(), y in ramified_element()) {
        let ctx = PrimeContext::new(3, 2, 1, None).unwrap();
        let (vx, vy) = (x.val_in(&ctx), y.val_in(&ctx));
        let vxy = (x.clone() * y.clone()).val_in(&ctx);
        match (fin(vx.clone()), fin(vy.clone())) {
            (Some(a), Some(b)) => prop_assert_eq!(fin(vxy), Some(a + b)),
            _ => prop_assert!(vxy.is_inf()),
        }
        let vs = (x + y).val_in(&ctx);
        if let (Some(s), Some(a), Some(b)) = (fin(vs), fin(vx), fin(vy)) {
            prop_assert!(s >= a.clone().min(b.clone()));
            if a != b {
                prop_assert_eq!(s, a.min(b));
            }
        }
    }

    #[test]
    fn factorisation_round_trip(c in fq_poly()) {
        let fq = FqContext::prime(7);
        let f: FqPoly = Poly::new(c.iter().map(|&x| FqElement::from_int(&fq, x)).collect());
        prop_assume!(f.deg0() >= 1);
        let parts = factor(&f).unwrap();
        let mut prod = FqPoly::constant(f.lead());
        for (g, e) in &parts {
            prop_assert!(g.lead().is_one());
            prod = prod * g.pow(*e);
        }
        prop_assert_eq!(prod, f);
    }

    #[test]
    fn newton_polygon_sees_root_valuations(roots in prop::collection::vec(small_rational(), 1..6)) {
        prop_assume!(roots.iter().all(|r| !r.is_zero()));
        let ctx = PrimeContext::split(5);
        let mut f = KPoly::one();
        for r in &roots {
            f = f * KPoly::linear_root(&FieldElement::rational(r.clone()));
        }
        let mut want: Vec<Q> = roots.iter().map(|r| q(vp_rat(r, 5).unwrap())).collect();
        want.sort();
        let mut got: Vec<Q> = newton_polygon(&ctx, &f)
            .unwrap()
            .root_vals()
            .into_iter()
            .flat_map(|(v, m)| std::iter::repeat_n(v, m))
            .collect();
        got.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn surplus_and_local_degree_add_to_degree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = [3u64, 5, 7][(seed % 3) as usize];
        let f = random_map(&mut rng, p, 5);
        let x = random_point(&mut rng, p);
        let ld = reduce_at(&f, &x).unwrap();
        let deg = ld.reduced_map.as_ref().map_or(0, |m| m.degree());
        prop_assert_eq!(ld.total_surplus() + deg, f.degree());
        if ld.is_fixed {
            prop_assert_eq!(ld.local_degree, deg);
        }
    }

    #[test]
    fn ray_lines_agree_with_conjugation(seed in any::<u64>(), k in -12i64..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = [3u64, 5, 7][(seed % 3) as usize];
        let f = random_map(&mut rng, p, 4);
        let x = random_point(&mut rng, p);
        let s = qf(k, 2);
        let ctx = f.ctx().clone();
        let y = TypeIIPoint::new(x.center.clone(), s.clone());
        let direct = reduce_at(&f, &y);
        // half-integral radii need the ramified field for conjugation
        prop_assume!(direct.is_ok());
        let direct = direct.unwrap();
        let lines = RayLines::exact(&f, &x.center).local_data(&ctx, &s).unwrap();
        prop_assert_eq!(lines.is_fixed, direct.is_fixed);
        prop_assert_eq!(lines.local_degree, direct.local_degree);
        prop_assert_eq!(lines.total_surplus(), direct.total_surplus());
    }

    #[test]
    fn fixedness_agrees_between_implementations(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = [3u64, 5, 7][(seed % 3) as usize];
        let f = random_map(&mut rng, p, 5);
        let x = random_point(&mut rng, p);
        prop_assert_eq!(brute_is_fixed(&f, &x).unwrap(), reduce_at(&f, &x).unwrap().is_fixed);
    }
}
