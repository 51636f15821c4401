use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use padic_orbits::padic::{prime_power, rational_valuation};
use padic_orbits::{PadicInt, Valuation};
use proptest::prelude::*;

const PRIMES: [u64; 4] = [5, 7, 11, 13];

fn modulus(p: u64, n: u32) -> BigInt {
    BigInt::from(prime_power(p, n))
}

fn residue_oracle(v: &BigInt, p: u64, n: u32) -> BigInt {
    v.mod_floor(&modulus(p, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_operations_match_integer_arithmetic(
        pi in 0usize..4, n in 1u32..30, a in any::<i64>(), b in any::<i64>(), c in any::<i64>()
    ) {
        let p = PRIMES[pi];
        let (x, y, z) = (PadicInt::from_i64(a, p, n).unwrap(), PadicInt::from_i64(b, p, n).unwrap(), PadicInt::from_i64(c, p, n).unwrap());
        let (ba, bb, bc) = (BigInt::from(a), BigInt::from(b), BigInt::from(c));
        prop_assert_eq!(BigInt::from((&x + &y).residue().clone()), residue_oracle(&(&ba + &bb), p, n));
        prop_assert_eq!(BigInt::from((&x - &y).residue().clone()), residue_oracle(&(&ba - &bb), p, n));
        prop_assert_eq!(BigInt::from((&x * &y).residue().clone()), residue_oracle(&(&ba * &bb), p, n));
        prop_assert_eq!(BigInt::from((&(&x * &y) * &z).residue().clone()), residue_oracle(&(&ba * &bb * &bc), p, n));
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x + &(-&x), PadicInt::zero(p, n).unwrap());
    }

    #[test]
    fn valuation_is_additive(pi in 0usize..4, a in 1i64..1_000_000, b in 1i64..1_000_000) {
        let p = PRIMES[pi];
        let n = 40;
        let x = PadicInt::from_i64(a, p, n).unwrap();
        let y = PadicInt::from_i64(b, p, n).unwrap();
        let (va, vb) = (x.valuation().finite().unwrap(), y.valuation().finite().unwrap());
        prop_assert_eq!((&x * &y).valuation(), Valuation::Finite(va + vb));
        prop_assert!((&x + &y).valuation() >= Valuation::Finite(va.min(vb)));
    }

    #[test]
    fn units_invert(pi in 0usize..4, n in 1u32..40, a in any::<i64>()) {
        let p = PRIMES[pi];
        let x = PadicInt::from_i64(a, p, n).unwrap();
        if x.is_unit() {
            let inv = x.invert().unwrap();
            prop_assert_eq!(&x * &inv, PadicInt::one(p, n).unwrap());
        } else {
            prop_assert!(x.invert().is_err());
        }
    }

    #[test]
    fn log_and_exp_are_inverse(pi in 0usize..4, n in 2u32..30, k in 1i64..1_000_000) {
        let p = PRIMES[pi];
        let u = PadicInt::from_i64(1 + p as i64 * k, p, n).unwrap();
        let back = u.padic_log().unwrap().padic_exp().unwrap();
        prop_assert_eq!(back.truncate(n), u.clone());
        let x = PadicInt::from_i64(p as i64 * k, p, n).unwrap();
        let again = x.padic_exp().unwrap().padic_log().unwrap();
        prop_assert_eq!(again.truncate(n), x);
    }

    #[test]
    fn log_turns_products_into_sums(pi in 0usize..4, a in 1i64..100_000, b in 1i64..100_000) {
        let p = PRIMES[pi];
        let n = 20;
        let u = PadicInt::from_i64(1 + p as i64 * a, p, n).unwrap();
        let w = PadicInt::from_i64(1 + p as i64 * b, p, n).unwrap();
        let lhs = (&u * &w).padic_log().unwrap();
        let rhs = &u.padic_log().unwrap() + &w.padic_log().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rational_embedding_is_a_ring_map(
        pi in 0usize..4,
        a in -10_000i64..10_000, b in 1i64..10_000, c in -10_000i64..10_000, d in 1i64..10_000,
    ) {
        let p = PRIMES[pi];
        let n = 25;
        let q1 = BigRational::new(a.into(), b.into());
        let q2 = BigRational::new(c.into(), d.into());
        let e = |q: &BigRational| PadicInt::from_big_rational(q, p, n);
        match (e(&q1), e(&q2)) {
            (Ok(x), Ok(y)) => {
                prop_assert_eq!(e(&(&q1 + &q2)).unwrap(), &x + &y);
                prop_assert_eq!(e(&(&q1 * &q2)).unwrap(), &x * &y);
                match rational_valuation(&q1, p) {
                    Some(v) if (v as u32) < n => prop_assert_eq!(x.valuation(), Valuation::Finite(v as u32)),
                    _ => prop_assert_eq!(x.valuation(), Valuation::Infinite),
                }
            }
            _ => prop_assert!(rational_valuation(&q1, p).map_or(false, |v| v < 0) || rational_valuation(&q2, p).map_or(false, |v| v < 0)),
        }
    }
}
