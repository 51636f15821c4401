#![allow(dead_code)]

use num_bigint::BigInt;
use padic_orbits::{PadicInt, PadicSeries};

pub fn pi(v: i64, p: u64, n: u32) -> PadicInt {
    PadicInt::from_i64(v, p, n).unwrap()
}

/// Integer coefficients of `(z - a_1)...(z - a_d)(1 + p R(z))`.
pub fn constructed_coefficients(p: u64, roots: &[i64], r: &[i64]) -> Vec<i128> {
    let mut unit: Vec<i128> = vec![1];
    for (i, &c) in r.iter().enumerate() {
        if unit.len() <= i + 1 {
            unit.resize(i + 2, 0);
        }
        unit[i + 1] += p as i128 * c as i128;
    }
    let mut acc = unit;
    for &a in roots {
        let mut next = vec![0i128; acc.len() + 1];
        for (i, &c) in acc.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= a as i128 * c;
        }
        acc = next;
    }
    acc
}

pub fn constructed_series(p: u64, n: u32, roots: &[i64], r: &[i64]) -> PadicSeries {
    let coeffs = constructed_coefficients(p, roots, r)
        .into_iter()
        .map(|c| PadicInt::from_bigint(&BigInt::from(c), p, n).unwrap())
        .collect();
    PadicSeries::polynomial(coeffs).unwrap()
}

/// `a ≡ b` modulo the coarser of the two precisions.
pub fn congruent(a: &PadicInt, b: &PadicInt) -> bool {
    let n = a.precision().min(b.precision());
    a.truncate(n) == b.truncate(n)
}
