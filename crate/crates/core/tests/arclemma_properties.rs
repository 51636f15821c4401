mod common;

use common::congruent;
use num_bigint::BigUint;
use padic_orbits::arclemma::{approximant_check, interpolate_orbit, mahler_fit, Verdict};
use padic_orbits::padic::{factorial_valuation, prime_power};
use padic_orbits::{residue_period, PadicInt, PolyMap, RationalPoint};
use proptest::prelude::*;

/// `x (log a)^m / m!`, the `z^m` coefficient of `x exp(z log a)`.
fn exp_log_coefficient(a: &PadicInt, x: &PadicInt, m: u64) -> PadicInt {
    let p = a.prime();
    let log = a.padic_log().unwrap();
    let mut fact = BigUint::from(1u32);
    for k in 1..=m {
        fact *= k;
    }
    let v = factorial_valuation(m, p);
    let unit = a.sibling(&fact / prime_power(p, v));
    let num = &(&log.pow(m) * x) * &unit.invert().unwrap();
    num.div_p_power(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn finite_differences_reproduce_nodes(c in prop::collection::vec(-3i64..4, 4), m in 4usize..12) {
        let comps = [format!("{}*x + y + {}", c[0], c[1]), format!("x + {}*y^2 + {}", c[2], c[3])];
        let map = PolyMap::parse(&["x", "y"], &comps).unwrap();
        let x = RationalPoint::from_i64s(&[1, 2]);
        let per = residue_period(&map, &x, 7).unwrap();
        let start = map.iterate(&x, per.preperiod).unwrap();
        let e = mahler_fit(&map, &start, 7, per.period, m, 30).unwrap();
        let red = map.reduce(7, 30).unwrap();
        let s = start.reduce(7, 30).unwrap();
        for n in 0..=m as u64 {
            prop_assert_eq!(e.evaluate(n), red.iterate(&s, n * per.period).unwrap());
        }
    }

    #[test]
    fn linear_maps_match_the_exponential(pidx in 0usize..2, k in 1i64..40, x0 in -50i64..50) {
        let p = [5u64, 7][pidx];
        let a = 1 + p as i64 * k;
        let map = PolyMap::parse(&["x"], &[format!("{a}*x")]).unwrap();
        let x = RationalPoint::from_i64s(&[x0]);
        let fit = interpolate_orbit(&map, &x, p, 1, 24, 8, 64).unwrap();
        prop_assert_eq!(fit.certificate().verdict, Verdict::CertifiedCandidate);
        let series = &fit.series.as_ref().unwrap()[0];
        let n = series.precision();
        prop_assert!(n >= 10);
        let pa = PadicInt::from_i64(a, p, 64).unwrap();
        let px = PadicInt::from_i64(x0, p, 64).unwrap();
        for m in 0..30u64 {
            let expect = exp_log_coefficient(&pa, &px, m).truncate(n);
            let got = series.coefficients().get(m as usize).cloned().unwrap_or_else(|| PadicInt::zero(p, n).unwrap());
            prop_assert!(congruent(&got, &expect), "coefficient {} differs", m);
        }
    }
}

#[test]
fn doubling_the_step_never_slows_decay() {
    let fixtures: [(&[&str], &[&str], &[i64], u64, u64); 3] = [
        (&["x", "y"], &["x + y", "x"], &[1, 0], 5, 20),
        (&["x"], &["6*x"], &[1], 5, 1),
        (&["x"], &["2*x"], &[3], 5, 4),
    ];
    for (vars, comps, x, p, d) in fixtures {
        let map = PolyMap::parse(vars, comps).unwrap();
        let x = RationalPoint::from_i64s(x);
        let one = mahler_fit(&map, &x, p, d, 24, 64).unwrap();
        let two = mahler_fit(&map, &x, p, 2 * d, 24, 64).unwrap();
        assert!(two.certificate.slope.unwrap() >= one.certificate.slope.unwrap(), "{comps:?}");
        for (a, b) in one.decay.iter().zip(&two.decay) {
            assert!(b.valuation >= a.valuation, "{comps:?} at k = {}", a.k);
        }
    }
}

#[test]
fn perturbed_mahler_coefficients_are_caught() {
    let map = PolyMap::parse(&["x"], &["6*x"]).unwrap();
    let x = RationalPoint::from_i64s(&[1]);
    let fit = interpolate_orbit(&map, &x, 5, 1, 24, 8, 64).unwrap();
    let threshold = fit.certificate().holdout_report.iter().map(|r| r.threshold).min().unwrap();
    let holdout: Vec<u64> = (25..=32).collect();
    for k in 0..=24usize {
        // The perturbation δ C(z, k) shows up at n with valuation v(δ) + v(C(n, k)).
        let min_binom = holdout
            .iter()
            .map(|&n| {
                let c = (0..k as u64).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1));
                PadicInt::new(5, 64, c).unwrap().valuation().finite().unwrap()
            })
            .min()
            .unwrap();
        if min_binom >= threshold {
            continue;
        }
        for j in 0..threshold - min_binom {
            let mut e = fit.expansion.clone();
            let delta = PadicInt::new(5, 64, prime_power(5, j)).unwrap();
            e.coefficients[0][k] = &e.coefficients[0][k] + &delta;
            // Either the conversion notices a non-integral series or the holdout does.
            let series = match e.to_power_series() {
                Ok(s) => s,
                Err(padic_orbits::Error::NonIntegralSeries(_)) => continue,
                Err(err) => panic!("k = {k}, j = {j}: {err}"),
            };
            let mut cert = fit.certificate().clone();
            approximant_check(&series, &map, &x, 1, &holdout, &mut cert).unwrap();
            assert_eq!(cert.verdict, Verdict::Inconclusive, "k = {k}, j = {j}");
        }
    }
}
