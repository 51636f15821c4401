//! Analytic interpolation of orbits.
//!
//! When `x̄` is fixed by `Φ̄^D`, the sequence `n ↦ Φ^{nD}(x)` is interpolated
//! by its Mahler expansion `Σ c_k C(n, k)` with
//! `c_k = Σ_j (-1)^{k-j} C(k, j) Φ^{jD}(x)`. Fast decay of `v_p(c_k)` (slope
//! above `1/(p-1)`) is what makes the interpolation a strictly convergent
//! power series; the decay is measured, fitted, and checked on held-out
//! nodes, never assumed.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::dynsys::{PolyMap, RationalPoint, ReducedMap};
use crate::error::{Error, Result};
use crate::padic::{check_prime, factorial_valuation, prime_power, PadicInt, Valuation};
use crate::series::{poly_mul, PadicSeries};

pub const DEFAULT_MAHLER_COEFFICIENTS: usize = 24;
pub const DEFAULT_HOLDOUT: usize = 8;

pub(crate) fn ratio_string(r: &Ratio<i64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn ser_ratio_opt<S: Serializer>(r: &Option<Ratio<i64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&ratio_string(r)),
        None => s.serialize_none(),
    }
}

fn ser_ratio<S: Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(r))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    CertifiedCandidate,
    Inconclusive,
}

/// Whether the map passed the Jacobian étaleness test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Certification {
    EtaleCertified,
    Heuristic,
}

impl Certification {
    pub fn from_map(map: &PolyMap) -> Self {
        if map.jacobian_unit_check() {
            Certification::EtaleCertified
        } else {
            Certification::Heuristic
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DecayPoint {
    pub k: usize,
    /// Minimum over coordinates of `v_p(c_k)`.
    pub valuation: Valuation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HoldoutRecord {
    pub n: u64,
    pub valuation: Valuation,
    pub threshold: u32,
    /// `valuation - threshold`, with an infinite valuation counted as the
    /// precision of the comparison.
    pub margin: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalyticityCertificate {
    /// Least-squares slope of `v_p(c_k)` against `k` over the tail half;
    /// `None` when every tail coefficient vanishes at the working precision.
    #[serde(serialize_with = "ser_ratio_opt")]
    pub slope: Option<Ratio<i64>>,
    /// `min (v_p(c_k) - slope * k)` over the fitted points.
    #[serde(serialize_with = "ser_ratio_opt")]
    pub intercept: Option<Ratio<i64>>,
    #[serde(serialize_with = "ser_ratio")]
    pub slope_threshold: Ratio<i64>,
    pub verdict: Verdict,
    pub certification: Certification,
    pub holdout_report: Vec<HoldoutRecord>,
}

impl AnalyticityCertificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::CertifiedCandidate
    }
}

/// Mahler coefficients of `n ↦ Φ^{nD}(x)` modulo `p^N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MahlerExpansion {
    pub prime: u64,
    pub precision: u32,
    pub period: u64,
    /// `coefficients[i][k]` is `c_k` for coordinate `i`.
    pub coefficients: Vec<Vec<PadicInt>>,
    pub decay: Vec<DecayPoint>,
    pub certificate: AnalyticityCertificate,
}

/// Forward differences of the node values: `c_k = Δ^k f(0)`.
fn mahler_coefficients(nodes: &[PadicInt]) -> Vec<PadicInt> {
    let mut row = nodes.to_vec();
    let mut out = Vec::with_capacity(nodes.len());
    while !row.is_empty() {
        out.push(row[0].clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    out
}

fn fit_decay(decay: &[DecayPoint], p: u64) -> (Option<Ratio<i64>>, Option<Ratio<i64>>, Verdict) {
    let m = decay.len() - 1;
    let tail: Vec<(i64, i64)> = decay[m.div_ceil(2)..]
        .iter()
        .filter_map(|d| d.valuation.finite().map(|v| (d.k as i64, v as i64)))
        .collect();
    let threshold = Ratio::new(1, p as i64 - 1);
    match tail.len() {
        0 => (None, None, Verdict::CertifiedCandidate),
        1 => (None, None, Verdict::Inconclusive),
        n => {
            let n = n as i64;
            let (sk, sv) = tail.iter().fold((0, 0), |(a, b), &(k, v)| (a + k, b + v));
            let skk: i64 = tail.iter().map(|&(k, _)| k * k).sum();
            let skv: i64 = tail.iter().map(|&(k, v)| k * v).sum();
            let slope = Ratio::new(n * skv - sk * sv, n * skk - sk * sk);
            let intercept = tail
                .iter()
                .map(|&(k, v)| Ratio::from_integer(v) - slope * k)
                .min()
                .expect("nonempty tail");
            let verdict = if slope > threshold { Verdict::CertifiedCandidate } else { Verdict::Inconclusive };
            (Some(slope), Some(intercept), verdict)
        }
    }
}

impl MahlerExpansion {
    fn from_nodes(nodes: &[Vec<PadicInt>], prime: u64, precision: u32, period: u64, certification: Certification) -> Self {
        let dim = nodes[0].len();
        let coefficients: Vec<Vec<PadicInt>> = (0..dim)
            .map(|i| {
                let column: Vec<PadicInt> = nodes.iter().map(|pt| pt[i].clone()).collect();
                mahler_coefficients(&column)
            })
            .collect();
        let decay: Vec<DecayPoint> = (0..nodes.len())
            .map(|k| DecayPoint {
                k,
                valuation: coefficients.iter().map(|c| c[k].valuation()).min().expect("dimension >= 1"),
            })
            .collect();
        let (slope, intercept, verdict) = fit_decay(&decay, prime);
        MahlerExpansion {
            prime,
            precision,
            period,
            coefficients,
            decay,
            certificate: AnalyticityCertificate {
                slope,
                intercept,
                slope_threshold: Ratio::new(1, prime as i64 - 1),
                verdict,
                certification,
                holdout_report: Vec::new(),
            },
        }
    }

    /// Largest Mahler index `M`.
    pub fn order(&self) -> usize {
        self.decay.len() - 1
    }

    /// `Σ_k C(n, k) c_k`, which reproduces `Φ^{nD}(x)` at every fit node.
    pub fn evaluate(&self, n: u64) -> Vec<PadicInt> {
        let zero = self.coefficients[0][0].sibling(BigUint::zero());
        self.coefficients
            .iter()
            .map(|coeffs| {
                let mut acc = zero.clone();
                for (k, c) in coeffs.iter().enumerate().take_while(|(k, _)| *k as u64 <= n) {
                    acc = &acc + &(&zero.sibling(binomial(n, k as u64)) * c);
                }
                acc
            })
            .collect()
    }

    /// Lower bound for the valuation of every power-series coefficient
    /// contributed by the unmeasured terms `k > M`, extrapolating the fitted
    /// decay line and using `v_p(k!) <= k/(p-1)`.
    fn tail_floor_estimate(&self) -> Option<i64> {
        let slope = self.certificate.slope?;
        let intercept = self.certificate.intercept?;
        let k = (self.order() + 1) as i64;
        let bound = (slope - Ratio::new(1, self.prime as i64 - 1)) * k + intercept;
        Some(bound.ceil().to_integer())
    }

    /// Converts `Σ c_k C(z, k)` into coefficients of `z^m`.
    ///
    /// The division by `k!` costs `L = v_p(M!)` digits. The reported
    /// precision is also capped by the extrapolated contribution of the
    /// unmeasured Mahler terms.
    pub fn to_power_series(&self) -> Result<Vec<PadicSeries>> {
        if !self.certificate.is_certified() {
            return Err(Error::UncertifiedExpansion);
        }
        let p = self.prime;
        let n = self.precision;
        let m = self.order();
        let l = factorial_valuation(m as u64, p);
        if l >= n {
            return Err(Error::PrecisionExhausted(format!("v_p({m}!) = {l} consumes all {n} digits")));
        }
        let mut precision = n - l;
        if let Some(floor) = self.tail_floor_estimate() {
            if floor < 1 {
                return Err(Error::PrecisionExhausted(format!(
                    "extrapolated Mahler tail leaves no certified digits (floor {floor})"
                )));
            }
            precision = precision.min(floor as u32);
        }

        let zero = PadicInt::zero(p, n)?;
        let one = zero.sibling(BigUint::one());
        // falling[k] = z (z - 1) ... (z - k + 1); scale[k] = p^(L - v(k!)) / unit(k!).
        let mut falling = vec![vec![one.clone()]];
        let mut scale = vec![zero.sibling(prime_power(p, l))];
        let mut fact = BigUint::one();
        for k in 1..=m {
            let shift = zero.sibling_from_bigint(&-num_bigint::BigInt::from(k as u64 - 1));
            let next = poly_mul(&falling[k - 1], &[shift, one.clone()]);
            falling.push(next);
            fact *= k as u64;
            let v = factorial_valuation(k as u64, p);
            let unit = zero.sibling(&fact / prime_power(p, v));
            scale.push(&unit.invert()? * &zero.sibling(prime_power(p, l - v)));
        }

        self.coefficients
            .iter()
            .map(|coeffs| {
                let mut acc = vec![zero.clone(); m + 1];
                for (k, c) in coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let t = c * &scale[k];
                    for (j, f) in falling[k].iter().enumerate() {
                        acc[j] = &acc[j] + &(&t * f);
                    }
                }
                let coeffs = acc
                    .iter()
                    .enumerate()
                    .map(|(j, a)| {
                        if a.valuation() < Valuation::Finite(l) {
                            return Err(Error::NonIntegralSeries(j));
                        }
                        Ok(a.div_p_power(l)?.truncate(precision))
                    })
                    .collect::<Result<Vec<_>>>()?;
                PadicSeries::new(coeffs, precision)
            })
            .collect()
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn check_fixed(reduced_mod_p: &ReducedMap, start: &[PadicInt], period: u64) -> Result<()> {
    let x0: Vec<PadicInt> = start.iter().map(|c| c.truncate(1)).collect();
    if reduced_mod_p.iterate(&x0, period)? != x0 {
        return Err(Error::NotPeriodicResidue(period));
    }
    Ok(())
}

/// Nodes `Φ^{jD}(start)` for `j = 0..=count - 1` modulo `p^N`.
fn nodes(reduced: &ReducedMap, start: &[PadicInt], period: u64, count: usize) -> Result<Vec<Vec<PadicInt>>> {
    let mut out = Vec::with_capacity(count);
    out.push(start.to_vec());
    for _ in 1..count {
        let next = reduced.iterate(out.last().expect("nonempty"), period)?;
        out.push(next);
    }
    Ok(out)
}

/// Mahler coefficients `c_0..c_M` of `n ↦ Φ^{nD}(x)` modulo `p^precision`.
///
/// The nodes are computed by iterating the reduced map, which agrees with
/// exact iteration followed by reduction and never grows.
pub fn mahler_fit(map: &PolyMap, x: &RationalPoint, p: u64, period: u64, m: usize, precision: u32) -> Result<MahlerExpansion> {
    let (reduced, start) = prepare(map, x, p, period, m, precision)?;
    let nodes = nodes(&reduced, &start, period, m + 1)?;
    Ok(MahlerExpansion::from_nodes(&nodes, p, precision, period, Certification::from_map(map)))
}

fn prepare(map: &PolyMap, x: &RationalPoint, p: u64, period: u64, m: usize, precision: u32) -> Result<(ReducedMap, Vec<PadicInt>)> {
    check_prime(p)?;
    if m < 4 {
        return Err(Error::InvalidInput(format!("need at least 4 Mahler coefficients, got {m}")));
    }
    if period == 0 {
        return Err(Error::InvalidInput("period must be positive".into()));
    }
    if !x.is_p_integral(p) {
        return Err(Error::NotPIntegral("starting point".into()));
    }
    let reduced = map.reduce(p, precision)?;
    let start = x.reduce(p, precision)?;
    check_fixed(&map.reduce(p, 1)?, &start, period)?;
    Ok((reduced, start))
}

/// Compares `φ(n)` with `Φ^{nD}(x)` at each held-out `n`; a valuation below
/// `min(n, precision)` downgrades the certificate.
pub fn approximant_check(
    series: &[PadicSeries],
    map: &PolyMap,
    x: &RationalPoint,
    period: u64,
    sample_ns: &[u64],
    certificate: &mut AnalyticityCertificate,
) -> Result<()> {
    let p = series.first().ok_or_else(|| Error::InvalidInput("no series".into()))?.prime();
    let precision = series.iter().map(PadicSeries::precision).max().expect("nonempty");
    let reduced = map.reduce(p, precision)?;
    let start = x.reduce(p, precision)?;
    let mut ns = sample_ns.to_vec();
    ns.sort_unstable();
    let mut actual = Vec::with_capacity(ns.len());
    let mut cur = start;
    let mut at = 0u64;
    for &n in &ns {
        cur = reduced.iterate(&cur, (n - at) * period)?;
        at = n;
        actual.push(cur.clone());
    }
    let records = holdout_records(series, &ns, &actual)?;
    apply_holdout(certificate, records);
    Ok(())
}

fn holdout_records(series: &[PadicSeries], ns: &[u64], actual: &[Vec<PadicInt>]) -> Result<Vec<HoldoutRecord>> {
    let p = series[0].prime();
    let mut out = Vec::with_capacity(ns.len());
    for (&n, point) in ns.iter().zip(actual) {
        let mut worst: Option<(Valuation, u32)> = None;
        for (s, a) in series.iter().zip(point) {
            let z = PadicInt::from_u64(n, p, s.precision())?;
            let diff = s.evaluate(&z)?.checked_sub(a)?;
            let entry = (diff.valuation(), diff.precision());
            let capped = |(v, prec): (Valuation, u32)| v.capped(prec);
            if worst.is_none_or(|w| capped(entry) < capped(w)) {
                worst = Some(entry);
            }
        }
        let (valuation, prec) = worst.expect("dimension >= 1");
        let reported = series.iter().map(PadicSeries::tail_floor).min().expect("nonempty");
        let threshold = (n.min(u32::MAX as u64) as u32).min(reported);
        out.push(HoldoutRecord {
            n,
            valuation,
            threshold,
            margin: valuation.capped(prec) as i64 - threshold as i64,
        });
    }
    Ok(out)
}

fn apply_holdout(certificate: &mut AnalyticityCertificate, records: Vec<HoldoutRecord>) {
    if records.iter().any(|r| r.margin < 0) {
        certificate.verdict = Verdict::Inconclusive;
    }
    certificate.holdout_report = records;
}

/// A fitted, converted and validated interpolation of one residue class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitInterpolation {
    pub expansion: MahlerExpansion,
    /// Present when the slope test passed and conversion succeeded.
    pub series: Option<Vec<PadicSeries>>,
    /// Why conversion failed, if it did.
    pub conversion_error: Option<String>,
}

impl OrbitInterpolation {
    pub fn certificate(&self) -> &AnalyticityCertificate {
        &self.expansion.certificate
    }

    /// The series, if the interpolation survived every check.
    pub fn certified_series(&self) -> Option<&[PadicSeries]> {
        if self.certificate().is_certified() {
            self.series.as_deref()
        } else {
            None
        }
    }
}

/// Fit on nodes `0..=M`, convert, and check nodes `M+1..=M+holdout`.
pub fn interpolate_orbit(
    map: &PolyMap,
    x: &RationalPoint,
    p: u64,
    period: u64,
    m: usize,
    holdout: usize,
    precision: u32,
) -> Result<OrbitInterpolation> {
    let (reduced, start) = prepare(map, x, p, period, m, precision)?;
    let all = nodes(&reduced, &start, period, m + 1 + holdout)?;
    interpolate_nodes(&all, m, period, Certification::from_map(map))
}

/// [`interpolate_orbit`] from precomputed nodes `Φ^{jD}(x) mod p^N`,
/// `j = 0..=M + holdout`.
pub(crate) fn interpolate_nodes(
    nodes: &[Vec<PadicInt>],
    m: usize,
    period: u64,
    certification: Certification,
) -> Result<OrbitInterpolation> {
    let first = &nodes[0][0];
    let mut expansion = MahlerExpansion::from_nodes(&nodes[..=m], first.prime(), first.precision(), period, certification);
    if !expansion.certificate.is_certified() {
        return Ok(OrbitInterpolation { expansion, series: None, conversion_error: None });
    }
    let series = match expansion.to_power_series() {
        Ok(s) => s,
        Err(e) => {
            expansion.certificate.verdict = Verdict::Inconclusive;
            return Ok(OrbitInterpolation { expansion, series: None, conversion_error: Some(e.to_string()) });
        }
    };
    let ns: Vec<u64> = (m as u64 + 1..nodes.len() as u64).collect();
    let records = holdout_records(&series, &ns, &nodes[m + 1..])?;
    apply_holdout(&mut expansion.certificate, records);
    Ok(OrbitInterpolation { expansion, series: Some(series), conversion_error: None })
}
