//! Logarithmic Weil heights over `Q`, bounded-height counts, and the growth
//! of `h(f(Φ^n(x)))` against `log n`.

use std::collections::HashSet;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::dynsys::{Observable, PolyMap, RationalPoint};
use crate::error::{Error, Result};

/// Largest `N` accepted by [`count_height_le`].
pub const DEFAULT_COUNT_CAP: u64 = 10_000;

/// Natural logarithm of `|n|` for `n ≠ 0`, accurate for any size.
pub fn log_abs(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().expect("64 bits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn ser_bigint<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

/// `h([a:b]) = log max(|a|, |b|)` for the primitive integer representative.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightValue {
    #[serde(serialize_with = "ser_bigint")]
    pub numerator: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub denominator: BigInt,
    pub value: f64,
}

impl HeightValue {
    /// `max(|a|, |b|)`, the exact quantity whose log is the height.
    pub fn exponential(&self) -> BigInt {
        self.numerator.abs().max(self.denominator.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.exponential() == BigInt::from(1)
    }
}

pub fn weil_height(q: &BigRational) -> HeightValue {
    height_of_pair(q.numer().clone(), q.denom().clone())
}

/// Height of the point `[a : b]` of `P^1(Q)`; `[1 : 0]` has height 0.
pub fn weil_height_projective(a: &BigRational, b: &BigRational) -> Result<HeightValue> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::InvalidInput("[0:0] is not a point of P^1".into()));
    }
    let l = a.denom().lcm(b.denom());
    let x = (a * BigRational::from_integer(l.clone())).to_integer();
    let y = (b * BigRational::from_integer(l)).to_integer();
    Ok(height_of_pair(x, y))
}

fn height_of_pair(a: BigInt, b: BigInt) -> HeightValue {
    let g = a.gcd(&b);
    let (mut a, mut b) = (a / &g, b / &g);
    if b.sign() == Sign::Minus || (b.is_zero() && a.sign() == Sign::Minus) {
        a = -a;
        b = -b;
    }
    let m = a.abs().max(b.abs());
    HeightValue { value: log_abs(&m), numerator: a, denominator: b }
}

/// `#{a/b ∈ Q : gcd(a, b) = 1, b ≥ 1, max(|a|, b) ≤ N}` with the default cap.
pub fn count_height_le(n: u64) -> Result<u64> {
    count_height_le_with_cap(n, DEFAULT_COUNT_CAP)
}

/// The count is `4 Σ_{k ≤ N} φ(k) - 1`: coprime pairs in `[1, N]^2`, both
/// signs, plus zero.
pub fn count_height_le_with_cap(n: u64, cap: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::ResourceLimit(format!("N = {n} exceeds the counting cap {cap}")));
    }
    let n = n as usize;
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for i in 2..=n {
        if phi[i] == i as u64 {
            for j in (i..=n).step_by(i) {
                phi[j] -= phi[j] / i as u64;
            }
        }
    }
    let total: u64 = phi[1..].iter().sum();
    Ok(4 * total - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GapClassification {
    FiniteImageSuspected,
    PositiveLimsupWitnessed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRecord {
    pub n: u64,
    pub defined: bool,
    pub height: Option<HeightValue>,
    /// `h / log n`, for defined records with `n ≥ 2`.
    pub ratio: Option<f64>,
    /// Prefix maximum of `ratio`.
    pub running_max_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub n_max: u64,
    pub records: Vec<GapRecord>,
    pub running_max_ratio: Option<f64>,
    /// Minimum ratio over the second half of the range.
    pub running_min_ratio_tail: Option<f64>,
    pub distinct_values: usize,
    pub classification: GapClassification,
}

/// Heights of `f(Φ^n(x))` for `0 ≤ n ≤ n_max`.
///
/// The image is suspected finite when no value in the second half of the
/// range is new.
pub fn gap_ratio_series(map: &PolyMap, x: &RationalPoint, f: &Observable, n_max: u64) -> Result<GapReport> {
    let orbit = map.orbit(x, n_max)?;
    let half = n_max / 2;
    let mut seen: HashSet<(BigInt, BigInt)> = HashSet::new();
    let mut new_late = false;
    let mut records = Vec::with_capacity(orbit.len());
    let mut running: Option<f64> = None;
    let mut tail_min: Option<f64> = None;
    for (n, pt) in orbit.iter().enumerate() {
        let n = n as u64;
        let height = match f.evaluate(pt)? {
            Some((a, b)) => Some(weil_height_projective(&a, &b)?),
            None => None,
        };
        let ratio = match &height {
            Some(h) if n >= 2 => Some(h.value / (n as f64).ln()),
            _ => None,
        };
        if let Some(h) = &height {
            let key = (h.numerator.clone(), h.denominator.clone());
            if seen.insert(key) && n > half {
                new_late = true;
            }
        }
        if let Some(r) = ratio {
            running = Some(running.map_or(r, |m: f64| m.max(r)));
            if n > half {
                tail_min = Some(tail_min.map_or(r, |m: f64| m.min(r)));
            }
        }
        records.push(GapRecord { n, defined: height.is_some(), height, ratio, running_max_ratio: running });
    }
    let classification = if new_late {
        GapClassification::PositiveLimsupWitnessed
    } else {
        GapClassification::FiniteImageSuspected
    };
    Ok(GapReport {
        n_max,
        records,
        running_max_ratio: running,
        running_min_ratio_tail: tail_min,
        distinct_values: seen.len(),
        classification,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailSummary {
    pub tail_start: u64,
    pub max_tail_ratio: f64,
    pub min_tail_ratio: f64,
    /// `(prefix end, max ratio on [2, end])` for `end = 4, 8, 16, ...`.
    pub prefix_maxima: Vec<(u64, f64)>,
    /// The prefix maxima strictly increase.
    pub diverging: bool,
}

/// Extremes of the ratio over the last `tail_fraction` of the range.
pub fn limsup_liminf_summary(report: &GapReport, tail_fraction: f64) -> Result<TailSummary> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidInput(format!("tail fraction {tail_fraction} outside (0, 1]")));
    }
    let tail_start = ((1.0 - tail_fraction) * report.n_max as f64).floor() as u64;
    let tail: Vec<f64> = report
        .records
        .iter()
        .filter(|r| r.n >= tail_start)
        .filter_map(|r| r.ratio)
        .collect();
    if tail.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "{} defined ratios in the tail, need at least 10",
            tail.len()
        )));
    }
    let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let mut prefix_maxima = Vec::new();
    let mut end = 4u64;
    while end <= report.n_max {
        let m = report
            .records
            .iter()
            .take_while(|r| r.n <= end)
            .filter_map(|r| r.ratio)
            .fold(f64::NEG_INFINITY, f64::max);
        if m.is_finite() {
            prefix_maxima.push((end, m));
        }
        end *= 2;
    }
    let diverging = prefix_maxima.len() >= 2 && prefix_maxima.windows(2).all(|w| w[1].1 > w[0].1);
    Ok(TailSummary { tail_start, max_tail_ratio: max, min_tail_ratio: min, prefix_maxima, diverging })
}
