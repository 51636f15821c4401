use num_rational::BigRational;
use padic_orbits::dynsys::ResiduePeriod;
use padic_orbits::{residue_period, PolyMap, Polynomial, RationalPoint};
use proptest::prelude::*;

fn affine_map() -> impl Strategy<Value = PolyMap> {
    (prop::collection::vec(-4i64..5, 4), prop::collection::vec(-6i64..7, 2)).prop_map(|(m, c)| {
        let comps = [
            format!("{}*x + {}*y + {}", m[0], m[1], c[0]),
            format!("{}*x + {}*y + {}", m[2], m[3], c[1]),
        ];
        PolyMap::parse(&["x", "y"], &comps).unwrap()
    })
}

fn quadratic_map() -> impl Strategy<Value = PolyMap> {
    prop::collection::vec(-3i64..4, 5).prop_map(|c| {
        let comps = [format!("{}*x^2 + {}*y + {}", c[0], c[1], c[2]), format!("{}*x*y + {}", c[3], c[4])];
        PolyMap::parse(&["x", "y"], &comps).unwrap()
    })
}

fn point() -> impl Strategy<Value = RationalPoint> {
    (-9i64..10, 1i64..4, -9i64..10, 1i64..4).prop_map(|(a, b, c, d)| {
        RationalPoint(vec![BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into())])
    })
}

fn divisors(n: u64) -> Vec<u64> {
    (1..n).filter(|d| n % d == 0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iteration_composes(map in quadratic_map(), x in point(), a in 0u64..4, b in 0u64..4) {
        let direct = map.iterate(&x, a + b);
        let staged = map.iterate(&x, a).and_then(|y| map.iterate(&y, b));
        prop_assert_eq!(direct, staged);
    }

    #[test]
    fn reduction_commutes_with_iteration(map in affine_map(), x in point(), pidx in 0usize..3) {
        let p = [5u64, 7, 11][pidx];
        prop_assume!(x.is_p_integral(p));
        let red = map.reduce(p, 8).unwrap();
        let orbit = map.orbit(&x, 100).unwrap();
        let mut cur = x.reduce(p, 8).unwrap();
        for pt in &orbit {
            prop_assert_eq!(&pt.reduce(p, 8).unwrap(), &cur);
            cur = red.apply(&cur).unwrap();
        }
    }

    #[test]
    fn residue_periods_are_minimal(map in quadratic_map(), x in point(), pidx in 0usize..3) {
        let p = [5u64, 7, 11][pidx];
        prop_assume!(x.is_p_integral(p));
        let ResiduePeriod { preperiod, period } = residue_period(&map, &x, p).unwrap();
        prop_assert!(period <= p * p);
        let red = map.reduce(p, 1).unwrap();
        let x0 = x.reduce(p, 1).unwrap();
        let start = red.iterate(&x0, preperiod).unwrap();
        prop_assert_eq!(red.iterate(&start, period).unwrap(), start.clone());
        for d in divisors(period) {
            prop_assert_ne!(red.iterate(&start, d).unwrap(), start.clone());
        }
        if preperiod > 0 {
            let before = red.iterate(&x0, preperiod - 1).unwrap();
            prop_assert_ne!(red.iterate(&before, period).unwrap(), before);
        }
    }

    #[test]
    fn printing_round_trips(c in prop::collection::vec(-50i64..50, 6), d in 1i64..9) {
        let vars = vec!["x".to_string(), "y".to_string()];
        let text = format!("{}/{d}*x^3 - {}*x*y + ({}*y - {})^2 + {}/{d} - {}*x", c[0], c[1], c[2], c[3], c[4], c[5]);
        let p = Polynomial::parse(&text, &vars).unwrap();
        prop_assert_eq!(Polynomial::parse(&p.to_string(), &vars).unwrap(), p);
    }
}

fn factorial(n: u64) -> i64 {
    (1..=n as i64).product()
}

#[test]
fn counterexample_closed_form() {
    let map = PolyMap::parse(&["x", "y", "z"], &["y*z", "x*z", "z+1"]).unwrap();
    let c = RationalPoint::from_i64s(&[0, 1, 1]);
    let orbit = map.orbit(&c, 17).unwrap();
    for n in 0..=8u64 {
        assert_eq!(orbit[2 * n as usize], RationalPoint::from_i64s(&[0, factorial(2 * n), 2 * n as i64 + 1]));
        assert_eq!(orbit[2 * n as usize + 1], RationalPoint::from_i64s(&[factorial(2 * n + 1), 0, 2 * n as i64 + 2]));
    }
}

#[test]
fn pisano_period_matches_direct_iteration() {
    // Oracle: the first n > 0 with (F(n), F(n+1)) ≡ (0, 1) mod p.
    for p in [5u64, 7, 11, 13] {
        let (mut a, mut b, mut n) = (0u64, 1u64, 0u64);
        loop {
            (a, b) = (b, (a + b) % p);
            n += 1;
            if (a, b) == (0, 1) {
                break;
            }
        }
        let map = PolyMap::parse(&["x", "y"], &["x + y", "x"]).unwrap();
        let r = residue_period(&map, &RationalPoint::from_i64s(&[1, 0]), p).unwrap();
        assert_eq!(r, ResiduePeriod { preperiod: 0, period: n });
    }
}
