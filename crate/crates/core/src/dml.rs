//! Orbit intersections `{n : Φ^n(x) ∈ V}` and return-set statistics.
//!
//! The solver splits the orbit into the preperiod `n < ℓ` and the residue
//! classes `n = ℓ + r + D m`. On each class the orbit is a vector of
//! power series in `m`; the target equations composed with them are
//! analysed with Strassman bounds and root isolation, and every candidate
//! index is confirmed by exact iteration over `Q`.

use std::cell::RefCell;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::arclemma::{interpolate_nodes, ratio_string, Certification, OrbitInterpolation, Verdict};
use crate::dynsys::{good_reduction_check, residue_period, Observable, PolyMap, RationalPoint, ResiduePeriod};
use crate::error::{Error, Result};
use crate::padic::{check_prime, is_p_integral, rational_valuation, PadicInt};
use crate::poly::{Polynomial, SeriesEval};
use crate::series::PadicSeries;

pub const DEFAULT_HORIZON: u64 = 10_000;
pub const DEFAULT_PRECISION: u32 = 64;

/// What the orbit should hit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetSpec {
    /// `f_i(Φ^n(x)) = y_i` for every component.
    Value { observable: Vec<Polynomial>, value: Vec<BigRational> },
    /// `[N : D](Φ^n(x)) = [a : b]` in `P^1`; points where `N = D = 0` never match.
    Projective { observable: Observable, value: (BigRational, BigRational) },
    /// Common zeros of the equations.
    Subvariety { equations: Vec<Polynomial> },
}

/// `P(z)` for a polynomial `P` and a vector of series.
pub fn compose_observable(series: &[PadicSeries], g: &Polynomial) -> Result<PadicSeries> {
    let first = series.first().ok_or_else(|| Error::InvalidInput("no series to compose with".into()))?;
    let p = first.prime();
    if !g.is_p_integral(p) {
        return Err(Error::NotPIntegral(format!("observable {g}")));
    }
    let precision = series.iter().map(PadicSeries::precision).min().expect("nonempty");
    g.evaluate_with(&SeriesEval { prime: p, precision }, series)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum FiberBound {
    Bound(usize),
    #[serde(serialize_with = "ser_all_constant")]
    AllConstant,
}

fn ser_all_constant<S: Serializer>(s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str("ALL_CONSTANT")
}

/// Bound on `#{z ∈ Z_p : P_k(z) = t}` valid for every `k` and every `t`,
/// taken over the non-constant members.
///
/// A single series `P` is bounded by `max(1 + D(P), D(P - P(0)))`. The
/// second term matters when the constant coefficient dominates: `D(P) = 0`
/// does not stop `P - t` from having many zeros.
pub fn uniform_fiber_bound(series: &[PadicSeries]) -> Result<FiberBound> {
    if series.is_empty() {
        return Err(Error::InvalidInput("at least one series is required".into()));
    }
    let mut best: Option<usize> = None;
    for s in series.iter().filter(|s| !s.is_constant()) {
        let d = match s.strassman_degree() {
            Ok(d) => d,
            Err(Error::IndistinguishableFromZero) => continue,
            Err(e) => return Err(e),
        };
        let n = (1 + d).max(s.uniform_shift_degree()?);
        best = Some(best.map_or(n, |b| b.max(n)));
    }
    Ok(best.map_or(FiberBound::AllConstant, FiberBound::Bound))
}

impl FiberBound {
    fn count(self) -> usize {
        match self {
            FiberBound::Bound(n) => n,
            FiberBound::AllConstant => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Progression {
    pub modulus: u64,
    pub offset: u64,
    pub status: &'static str,
}

impl Progression {
    pub fn contains(&self, n: u64) -> bool {
        n >= self.offset && (n - self.offset).is_multiple_of(self.modulus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassOutcome {
    /// Some composed equation has Strassman degree 0.
    NoRoots,
    /// Roots were isolated and their natural representatives verified.
    Roots,
    /// Every composed equation vanishes at precision and exact iteration
    /// agrees up to the horizon.
    IdenticallyZero,
    /// The class was checked index by index up to the horizon.
    Scanned,
    /// The class starts beyond the horizon.
    BeyondHorizon,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueReport {
    pub residue: u64,
    pub base_index: u64,
    pub step: u64,
    pub verdict: Verdict,
    pub series_precision: Option<u32>,
    pub strassman_degrees: Vec<Option<usize>>,
    pub fiber_bound: Option<usize>,
    pub outcome: ClassOutcome,
    pub candidates: usize,
    pub hits: usize,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DmlParameters {
    pub prime: u64,
    pub precision: u32,
    pub horizon: u64,
    pub mahler_coefficients: usize,
    pub holdout: usize,
    pub preperiod: u64,
    pub period: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DmlSolution {
    /// Indices in the original numbering, each verified over `Q`.
    pub exact_hits: Vec<u64>,
    pub progressions: Vec<Progression>,
    pub uniform_bound: Option<u64>,
    pub certification: Certification,
    pub empty_reason: Option<&'static str>,
    pub residue_reports: Vec<ResidueReport>,
    pub parameters: DmlParameters,
    pub warnings: Vec<String>,
}

impl DmlSolution {
    /// Every index up to `horizon` the solution claims: hits plus
    /// progression members.
    pub fn indices_up_to(&self, horizon: u64) -> Vec<u64> {
        let mut out: Vec<u64> = self.exact_hits.iter().copied().filter(|&n| n <= horizon).collect();
        for prog in &self.progressions {
            out.extend((prog.offset..=horizon).step_by(prog.modulus as usize));
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DmlConfig {
    pub prime: u64,
    pub precision: u32,
    pub horizon: u64,
    pub mahler_coefficients: usize,
    pub holdout: usize,
    pub bit_budget: u64,
}

impl DmlConfig {
    pub fn new(prime: u64) -> Self {
        DmlConfig {
            prime,
            precision: DEFAULT_PRECISION,
            horizon: DEFAULT_HORIZON,
            mahler_coefficients: crate::arclemma::DEFAULT_MAHLER_COEFFICIENTS,
            holdout: crate::arclemma::DEFAULT_HOLDOUT,
            bit_budget: crate::dynsys::DEFAULT_BIT_BUDGET,
        }
    }
}

/// Multiplies by the least common denominator; the zero set is unchanged.
fn clear_denominators(g: &Polynomial) -> Polynomial {
    let lcm = g.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    g.scale(&BigRational::from_integer(lcm))
}

fn integral_pair(a: &BigRational, b: &BigRational) -> (BigInt, BigInt) {
    let l = a.denom().lcm(b.denom());
    let x = (a * BigRational::from_integer(l.clone())).to_integer();
    let y = (b * BigRational::from_integer(l)).to_integer();
    let g = x.gcd(&y);
    if g.is_zero() {
        (x, y)
    } else {
        (x / &g, y / g)
    }
}

enum Prepared {
    Value { observable: Vec<Polynomial>, value: Option<Vec<BigRational>> },
    Equations { equations: Vec<Polynomial>, guard: Option<Observable> },
}

/// Fits every residue class once and answers many targets against the same
/// exact orbit.
pub struct DmlSolver {
    map: PolyMap,
    x: RationalPoint,
    config: DmlConfig,
    period: ResiduePeriod,
    etale: bool,
    classes: Vec<OrbitInterpolation>,
    orbit: RefCell<Vec<RationalPoint>>,
}

impl DmlSolver {
    pub fn new(map: &PolyMap, x: &RationalPoint, config: DmlConfig) -> Result<Self> {
        let p = config.prime;
        check_prime(p)?;
        if config.precision == 0 {
            return Err(Error::InvalidPrecision);
        }
        if x.dimension() != map.dimension() {
            return Err(Error::DimensionMismatch(format!(
                "point of dimension {} for a map on A^{}",
                x.dimension(),
                map.dimension()
            )));
        }
        if !good_reduction_check(map, x, p) {
            return Err(Error::NotPIntegral("map or starting point".into()));
        }
        let period = residue_period(map, x, p)?;
        let etale = map.jacobian_unit_check();
        let certification = if etale { Certification::EtaleCertified } else { Certification::Heuristic };

        let (m, h) = (config.mahler_coefficients, config.holdout);
        let d = period.period as usize;
        let l = period.preperiod as usize;
        let reduced = map.reduce(p, config.precision)?;
        let mut residues = vec![x.reduce(p, config.precision)?];
        for _ in 0..l + d * (m + h + 1) {
            let next = reduced.apply(residues.last().expect("nonempty"))?;
            residues.push(next);
        }
        let classes = (0..d)
            .map(|r| {
                let nodes: Vec<_> = (0..=m + h).map(|j| residues[l + r + j * d].clone()).collect();
                interpolate_nodes(&nodes, m, period.period, certification)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DmlSolver {
            map: map.clone(),
            x: x.clone(),
            config,
            period,
            etale,
            classes,
            orbit: RefCell::new(vec![x.clone()]),
        })
    }

    pub fn period(&self) -> ResiduePeriod {
        self.period
    }

    pub fn map(&self) -> &PolyMap {
        &self.map
    }

    pub fn start(&self) -> &RationalPoint {
        &self.x
    }

    pub fn classes(&self) -> &[OrbitInterpolation] {
        &self.classes
    }

    pub fn config(&self) -> &DmlConfig {
        &self.config
    }

    /// `Φ^n(x)` over `Q`, cached.
    pub fn point(&self, n: u64) -> Result<RationalPoint> {
        let mut orbit = self.orbit.borrow_mut();
        while orbit.len() as u64 <= n {
            let next = self.map.apply(orbit.last().expect("nonempty"))?;
            let bits = next.max_bits();
            if bits > self.config.bit_budget {
                return Err(Error::ResourceLimit(format!(
                    "coordinate of iterate {} needs {bits} bits (budget {})",
                    orbit.len(),
                    self.config.bit_budget
                )));
            }
            orbit.push(next);
        }
        Ok(orbit[n as usize].clone())
    }

    fn parameters(&self) -> DmlParameters {
        DmlParameters {
            prime: self.config.prime,
            precision: self.config.precision,
            horizon: self.config.horizon,
            mahler_coefficients: self.config.mahler_coefficients,
            holdout: self.config.holdout,
            preperiod: self.period.preperiod,
            period: self.period.period,
        }
    }

    fn prepare(&self, target: &TargetSpec) -> Result<Prepared> {
        let vars = self.map.variables();
        let same_vars = |g: &Polynomial| {
            if g.variables() != vars {
                Err(Error::DimensionMismatch(format!("target polynomial {g} uses other variables")))
            } else {
                Ok(())
            }
        };
        match target {
            TargetSpec::Value { observable, value } => {
                if observable.is_empty() || observable.len() != value.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "{} observable components for a value of dimension {}",
                        observable.len(),
                        value.len()
                    )));
                }
                for f in observable {
                    same_vars(f)?;
                    if !f.is_p_integral(self.config.prime) {
                        return Err(Error::NotPIntegral(format!("observable {f}")));
                    }
                }
                let integral = value.iter().all(|y| is_p_integral(y, self.config.prime));
                Ok(Prepared::Value { observable: observable.clone(), value: integral.then(|| value.clone()) })
            }
            TargetSpec::Projective { observable, value } => {
                same_vars(&observable.numerator)?;
                same_vars(&observable.denominator)?;
                let (a, b) = integral_pair(&value.0, &value.1);
                if a.is_zero() && b.is_zero() {
                    return Err(Error::InvalidInput("[0:0] is not a point of P^1".into()));
                }
                let eq = observable
                    .numerator
                    .scale(&BigRational::from_integer(b))
                    .sub(&observable.denominator.scale(&BigRational::from_integer(a)));
                Ok(Prepared::Equations { equations: vec![clear_denominators(&eq)], guard: Some(observable.clone()) })
            }
            TargetSpec::Subvariety { equations } => {
                if equations.is_empty() {
                    return Err(Error::InvalidInput("a subvariety needs at least one equation".into()));
                }
                for g in equations {
                    same_vars(g)?;
                }
                Ok(Prepared::Equations { equations: equations.iter().map(clear_denominators).collect(), guard: None })
            }
        }
    }

    fn holds(&self, prepared: &Prepared, n: u64) -> Result<bool> {
        let pt = self.point(n)?;
        match prepared {
            Prepared::Value { observable, value: Some(value) } => {
                for (f, y) in observable.iter().zip(value) {
                    if f.evaluate(pt.coords())? != *y {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Prepared::Value { value: None, .. } => Ok(false),
            Prepared::Equations { equations, guard } => {
                for g in equations {
                    if !g.evaluate(pt.coords())?.is_zero() {
                        return Ok(false);
                    }
                }
                match guard {
                    Some(obs) => Ok(obs.evaluate(&pt)?.is_some()),
                    None => Ok(true),
                }
            }
        }
    }

    pub fn solve_targets(&self, targets: &[TargetSpec]) -> Result<Vec<DmlSolution>> {
        targets.iter().map(|t| self.solve(t)).collect()
    }

    pub fn solve(&self, target: &TargetSpec) -> Result<DmlSolution> {
        let prepared = self.prepare(target)?;
        let horizon = self.config.horizon;
        let (l, d) = (self.period.preperiod, self.period.period);
        let mut warnings = Vec::new();
        if !self.etale {
            warnings.push("heuristic: étale not certified (Jacobian determinant is not a nonzero constant)".to_string());
        }
        let empty_reason = matches!(prepared, Prepared::Value { value: None, .. }).then_some("NON_INTEGRAL");

        let mut hits = Vec::new();
        if empty_reason.is_none() {
            for n in 0..l.min(horizon + 1) {
                if self.holds(&prepared, n)? {
                    hits.push(n);
                }
            }
        }

        let mut progressions = Vec::new();
        let mut reports = Vec::with_capacity(self.classes.len());
        let mut all_certified = true;
        let mut bound_total: Option<u64> = Some(l);
        for (r, interp) in self.classes.iter().enumerate() {
            let base = l + r as u64;
            let mut report = ResidueReport {
                residue: r as u64,
                base_index: base,
                step: d,
                verdict: interp.certificate().verdict,
                series_precision: interp.series.as_ref().map(|s| s[0].precision()),
                strassman_degrees: Vec::new(),
                fiber_bound: None,
                outcome: ClassOutcome::BeyondHorizon,
                candidates: 0,
                hits: 0,
                note: interp.conversion_error.clone(),
            };
            let Some(series) = interp.certified_series() else {
                all_certified = false;
                bound_total = None;
                if empty_reason.is_none() && base <= horizon {
                    let found = self.scan(&prepared, base, d)?;
                    report.candidates = found.1;
                    report.hits = found.0.len();
                    hits.extend(found.0);
                    report.outcome = ClassOutcome::Scanned;
                }
                warnings.push(format!("residue class {r}: interpolation not certified, scanned to horizon"));
                reports.push(report);
                continue;
            };

            let (equations, bound) = match self.class_equations(&prepared, series) {
                Ok(v) => v,
                Err(e @ Error::TailAmbiguous { .. }) => {
                    all_certified = false;
                    bound_total = None;
                    let found = self.scan(&prepared, base, d)?;
                    report.candidates = found.1;
                    report.hits = found.0.len();
                    hits.extend(found.0);
                    report.outcome = ClassOutcome::Scanned;
                    report.note = Some(e.to_string());
                    warnings.push(format!("residue class {r}: {e}; scanned to horizon"));
                    reports.push(report);
                    continue;
                }
                Err(e) => return Err(e),
            };
            report.fiber_bound = bound.map(FiberBound::count);
            bound_total = match (bound_total, bound) {
                (Some(t), Some(b)) => Some(t + b.count() as u64),
                _ => None,
            };
            if empty_reason.is_some() || base > horizon {
                if empty_reason.is_some() {
                    report.outcome = ClassOutcome::NoRoots;
                }
                reports.push(report);
                continue;
            }

            let degrees: Vec<Option<usize>> = equations
                .iter()
                .map(|s| match s.strassman_degree() {
                    Ok(dg) => Ok(Some(dg)),
                    Err(Error::IndistinguishableFromZero) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<_>>()?;
            report.strassman_degrees = degrees.clone();

            if degrees.contains(&Some(0)) {
                report.outcome = ClassOutcome::NoRoots;
                reports.push(report);
                continue;
            }
            let pick = degrees
                .iter()
                .enumerate()
                .filter_map(|(i, dg)| dg.map(|dg| (dg, i)))
                .min();
            let Some((_, pick)) = pick else {
                // Every equation vanishes at precision: candidate progression.
                let found = self.scan(&prepared, base, d)?;
                let expected = (horizon - base) / d + 1;
                report.candidates = found.1;
                if found.0.len() as u64 == expected {
                    report.outcome = ClassOutcome::IdenticallyZero;
                    progressions.push(Progression { modulus: d, offset: base, status: "verified-to-horizon" });
                } else {
                    all_certified = false;
                    report.outcome = ClassOutcome::Scanned;
                    report.hits = found.0.len();
                    report.note = Some("composed equations vanish at precision but not along the class".into());
                    warnings.push(format!("residue class {r}: precision too low to separate the target; scanned"));
                    hits.extend(found.0);
                }
                reports.push(report);
                continue;
            };

            let roots = equations[pick].zeros().map_err(|e| match e {
                Error::PrecisionExhausted(msg) => Error::PrecisionExhausted(format!("residue class {r}: {msg}")),
                other => other,
            })?;
            let m_max = (horizon - base) / d;
            let mut candidates = Vec::new();
            for root in &roots.roots {
                let modulus = root.value.modulus();
                let start = root.value.residue();
                let mut m = start.clone();
                while m <= num_bigint::BigUint::from(m_max) {
                    candidates.push(u64::try_from(&m).expect("bounded by m_max"));
                    m += modulus;
                }
            }
            candidates.sort_unstable();
            candidates.dedup();
            report.candidates = candidates.len();
            for m in candidates {
                let n = base + m * d;
                if self.holds(&prepared, n)? {
                    hits.push(n);
                    report.hits += 1;
                }
            }
            report.outcome = ClassOutcome::Roots;
            reports.push(report);
        }

        hits.sort_unstable();
        let certification = if self.etale && all_certified {
            Certification::EtaleCertified
        } else {
            Certification::Heuristic
        };
        let uniform_bound = match certification {
            Certification::EtaleCertified => bound_total,
            Certification::Heuristic => None,
        };
        Ok(DmlSolution {
            exact_hits: hits,
            progressions,
            uniform_bound,
            certification,
            empty_reason,
            residue_reports: reports,
            parameters: self.parameters(),
            warnings,
        })
    }

    /// Composed equation series for one class, and the class's contribution
    /// to the uniform bound.
    fn class_equations(&self, prepared: &Prepared, series: &[PadicSeries]) -> Result<(Vec<PadicSeries>, Option<FiberBound>)> {
        match prepared {
            Prepared::Value { observable, value } => {
                let obs = observable
                    .iter()
                    .map(|f| compose_observable(series, f))
                    .collect::<Result<Vec<_>>>()?;
                // Target-independent: the tightest non-constant component.
                let mut bound = FiberBound::AllConstant;
                for s in &obs {
                    if let FiberBound::Bound(b) = uniform_fiber_bound(std::slice::from_ref(s))? {
                        bound = match bound {
                            FiberBound::Bound(prev) => FiberBound::Bound(prev.min(b)),
                            FiberBound::AllConstant => FiberBound::Bound(b),
                        };
                    }
                }
                let eqs = match value {
                    Some(value) => obs
                        .iter()
                        .zip(value)
                        .map(|(s, y)| {
                            let y = PadicInt::from_big_rational(y, s.prime(), s.precision())?;
                            s.sub_constant(&y)
                        })
                        .collect::<Result<Vec<_>>>()?,
                    None => Vec::new(),
                };
                Ok((eqs, Some(bound)))
            }
            Prepared::Equations { equations, .. } => {
                let eqs = equations
                    .iter()
                    .map(|g| compose_observable(series, g))
                    .collect::<Result<Vec<_>>>()?;
                let mut bound: Option<usize> = None;
                let mut all_zero = true;
                for s in &eqs {
                    match s.strassman_degree() {
                        Ok(dg) => {
                            all_zero = false;
                            bound = Some(bound.map_or(dg, |b| b.min(dg)));
                        }
                        Err(Error::IndistinguishableFromZero) => {}
                        Err(e) => return Err(e),
                    }
                }
                let bound = if all_zero { FiberBound::AllConstant } else { FiberBound::Bound(bound.expect("some degree")) };
                Ok((eqs, Some(bound)))
            }
        }
    }

    /// Checks `base, base + step, ...` up to the horizon; returns the hits
    /// and the number of indices examined.
    fn scan(&self, prepared: &Prepared, base: u64, step: u64) -> Result<(Vec<u64>, usize)> {
        let mut out = Vec::new();
        let mut count = 0;
        let mut n = base;
        while n <= self.config.horizon {
            count += 1;
            if self.holds(prepared, n)? {
                out.push(n);
            }
            n += step;
        }
        Ok((out, count))
    }
}

/// One-shot solve.
pub fn solve_dml(
    map: &PolyMap,
    x: &RationalPoint,
    target: &TargetSpec,
    p: u64,
    horizon: u64,
    precision: u32,
) -> Result<DmlSolution> {
    let config = DmlConfig { horizon, precision, ..DmlConfig::new(p) };
    DmlSolver::new(map, x, config)?.solve(target)
}

fn ser_ratio_u64<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let r = Ratio::new(*r.numer() as i64, *r.denom() as i64);
    s.serialize_str(&ratio_string(&r))
}

/// Indices `n ≤ horizon` whose orbit point lands in one chart of `P^1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReturnSet {
    /// 1 for `V_1 = {[a:b] : b ≠ 0}`, 2 for `V_2 = {[a:b] : a ≠ 0}`.
    pub chart: u8,
    pub horizon: u64,
    pub members: Vec<u64>,
    pub window: u64,
    #[serde(serialize_with = "ser_ratio_u64")]
    pub complement_density: Ratio<u64>,
}

impl ReturnSet {
    pub fn new(chart: u8, mut members: Vec<u64>, horizon: u64) -> Self {
        members.sort_unstable();
        members.dedup();
        members.retain(|&n| n <= horizon);
        let window = (horizon / 10).max(1);
        let mut s = ReturnSet { chart, horizon, members, window, complement_density: Ratio::from_integer(0) };
        s.complement_density = banach_density_gap(&s, window);
        s
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    /// `#{n ∈ S : n ≤ bound}`.
    pub fn count_up_to(&self, bound: u64) -> u64 {
        self.members.partition_point(|&n| n <= bound) as u64
    }

    /// The same set cut down to a smaller horizon.
    pub fn restrict(&self, horizon: u64) -> Self {
        Self::new(self.chart, self.members.clone(), horizon.min(self.horizon))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReturnSetReport {
    pub prime: u64,
    pub horizon: u64,
    pub charts: Vec<ReturnSet>,
    /// Indices where numerator and denominator both vanish.
    pub indeterminate: Vec<u64>,
}

/// Chart of `[a:b]` after scaling to a primitive `Z_p` vector: `V_1` when
/// `b` is a unit, else `V_2`.
pub fn chart_of(a: &BigRational, b: &BigRational, p: u64) -> Option<u8> {
    match (rational_valuation(a, p), rational_valuation(b, p)) {
        (None, None) => None,
        (_, None) => Some(2),
        (None, Some(_)) => Some(1),
        (Some(va), Some(vb)) => Some(if vb <= va { 1 } else { 2 }),
    }
}

pub fn return_set(map: &PolyMap, x: &RationalPoint, f: &Observable, p: u64, horizon: u64) -> Result<ReturnSetReport> {
    check_prime(p)?;
    let orbit = map.orbit(x, horizon)?;
    let (mut v1, mut v2, mut bad) = (Vec::new(), Vec::new(), Vec::new());
    for (n, pt) in orbit.iter().enumerate() {
        let n = n as u64;
        match f.evaluate(pt)? {
            None => bad.push(n),
            Some((a, b)) => match chart_of(&a, &b, p) {
                Some(1) => v1.push(n),
                Some(_) => v2.push(n),
                None => bad.push(n),
            },
        }
    }
    Ok(ReturnSetReport {
        prime: p,
        horizon,
        charts: vec![ReturnSet::new(1, v1, horizon), ReturnSet::new(2, v2, horizon)],
        indeterminate: bad,
    })
}

/// Largest share of `[0, horizon] \ S` in any window of the given length.
pub fn banach_density_gap(s: &ReturnSet, window: u64) -> Ratio<u64> {
    let len = s.horizon + 1;
    let w = window.clamp(1, len);
    let mut outside = vec![1u8; len as usize];
    for &n in &s.members {
        outside[n as usize] = 0;
    }
    let mut cur: u64 = outside[..w as usize].iter().map(|&b| b as u64).sum();
    let mut best = cur;
    for i in w as usize..len as usize {
        cur = cur + outside[i] as u64 - outside[i - w as usize] as u64;
        best = best.max(cur);
    }
    Ratio::new(best, w)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RateWitness {
    pub chart: u8,
    pub kappa: u64,
    /// Every `M` in `1..=horizon/κ` with `#{n ∈ S : n ≤ κM} ≥ M`.
    pub witnesses: Vec<u64>,
}

/// Chooses the chart with the most `M` satisfying the return-rate
/// inequality; ties go to the lower chart id.
pub fn return_rate_witness(charts: &[ReturnSet], kappa: u64) -> Result<RateWitness> {
    if kappa == 0 {
        return Err(Error::InvalidInput("κ must be positive".into()));
    }
    let mut best: Option<RateWitness> = None;
    for s in charts {
        let witnesses: Vec<u64> = (1..=s.horizon / kappa).filter(|&m| s.count_up_to(kappa * m) >= m).collect();
        if best.as_ref().is_none_or(|b| witnesses.len() > b.witnesses.len()) {
            best = Some(RateWitness { chart: s.chart, kappa, witnesses });
        }
    }
    match best {
        Some(b) if !b.witnesses.is_empty() => Ok(b),
        _ => Err(Error::HorizonTooSmall),
    }
}

/// The value a fiber is taken over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiberValue {
    Padic(PadicInt),
    Rational(BigRational),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberReport {
    pub count: u64,
    pub members: Vec<u64>,
    pub strassman_bound: Option<usize>,
    pub within_bound: bool,
    /// `count / log(M)`: the per-instance constant in `count ≤ c log M`.
    pub log_constant: Option<f64>,
    pub reason: Option<&'static str>,
}

/// `#{n ≤ M : n ∈ S, H(n) = t}` together with the Strassman bound.
pub fn fiber_report(h: &PadicSeries, t: &FiberValue, s: &ReturnSet, m: u64) -> Result<FiberReport> {
    let t = match t {
        FiberValue::Padic(t) => t.clone(),
        FiberValue::Rational(q) => {
            if !is_p_integral(q, h.prime()) {
                return Ok(FiberReport {
                    count: 0,
                    members: Vec::new(),
                    strassman_bound: Some(0),
                    within_bound: true,
                    log_constant: (m >= 2).then_some(0.0),
                    reason: Some("NON_INTEGRAL"),
                });
            }
            PadicInt::from_big_rational(q, h.prime(), h.precision())?
        }
    };
    let diff = h.sub_constant(&t)?;
    let roots = diff.zeros()?;
    let mut members = Vec::new();
    for root in &roots.roots {
        let modulus = root.value.modulus();
        let mut n = root.value.residue().clone();
        while n <= num_bigint::BigUint::from(m) {
            let k = u64::try_from(&n).expect("bounded by m");
            if s.contains(k) {
                members.push(k);
            }
            n += modulus;
        }
    }
    members.sort_unstable();
    members.dedup();
    let bound = h.strassman_zero_bound(&t).ok();
    let count = members.len() as u64;
    Ok(FiberReport {
        count,
        members,
        strassman_bound: bound,
        within_bound: bound.is_none_or(|b| count <= b as u64),
        log_constant: (m >= 2).then(|| count as f64 / (m as f64).ln()),
        reason: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn value_target(map: &PolyMap, f: &str, y: i64) -> TargetSpec {
        TargetSpec::Value {
            observable: vec![Polynomial::parse(f, map.variables()).unwrap()],
            value: vec![q(y)],
        }
    }

    fn brute(map: &PolyMap, x: &RationalPoint, f: &str, y: i64, horizon: u64) -> Vec<u64> {
        let g = Polynomial::parse(f, map.variables()).unwrap();
        map.orbit(x, horizon)
            .unwrap()
            .iter()
            .enumerate()
            .filter(|(_, pt)| g.evaluate(pt.coords()).unwrap() == q(y))
            .map(|(n, _)| n as u64)
            .collect()
    }

    #[test]
    fn fiber_bounds() {
        let s = PadicSeries::from_i64s(&[0, 5], 5, 10).unwrap();
        assert_eq!(uniform_fiber_bound(&[s.clone()]).unwrap(), FiberBound::Bound(2));
        let t = PadicSeries::from_i64s(&[0, -1, 1], 5, 10).unwrap();
        assert_eq!(uniform_fiber_bound(&[s, t]).unwrap(), FiberBound::Bound(3));
        let c = PadicSeries::from_i64s(&[3], 5, 10).unwrap();
        let d = PadicSeries::from_i64s(&[7], 5, 10).unwrap();
        assert_eq!(uniform_fiber_bound(&[c, d]).unwrap(), FiberBound::AllConstant);
        // Dominant constant term: D(P) = 0 but P - 1 has three zeros.
        let cubic = PadicSeries::from_i64s(&[1, 10, -15, 5], 5, 10).unwrap();
        assert_eq!(uniform_fiber_bound(&[cubic]).unwrap(), FiberBound::Bound(3));
    }

    #[test]
    fn composition() {
        let vars = vec!["x1".to_string(), "x2".to_string()];
        let s = PadicSeries::from_i64s(&[0, 5], 5, 10).unwrap();
        let one = PadicSeries::from_i64s(&[1], 5, 10).unwrap();
        let x1 = Polynomial::parse("x1", &vars).unwrap();
        assert_eq!(compose_observable(&[s.clone(), one.clone()], &x1).unwrap(), s);
        let sq = Polynomial::parse("x1^2", &vars).unwrap();
        let expect = PadicSeries::from_i64s(&[0, 0, 25], 5, 10).unwrap();
        assert_eq!(compose_observable(&[s, one], &sq).unwrap(), expect);
    }

    #[test]
    fn fibonacci_zero_set() {
        let map = PolyMap::parse(&["x1", "x2"], &["x1 + x2", "x1"]).unwrap();
        let x = RationalPoint::from_i64s(&[0, 1]);
        let sol = solve_dml(&map, &x, &value_target(&map, "x1", 0), 5, 2000, 64).unwrap();
        assert_eq!(sol.exact_hits, vec![0]);
        assert!(sol.progressions.is_empty());
        assert_eq!(sol.certification, Certification::EtaleCertified);
        assert!(sol.uniform_bound.unwrap() >= 1);
    }

    #[test]
    fn translation_hits() {
        let map = PolyMap::parse(&["x"], &["x + 1"]).unwrap();
        let x = RationalPoint::from_i64s(&[0]);
        let sol = solve_dml(&map, &x, &value_target(&map, "x", 7), 5, 1000, 32).unwrap();
        assert_eq!(sol.exact_hits, vec![7]);
        let sol = solve_dml(&map, &x, &value_target(&map, "x", -3), 5, 1000, 32).unwrap();
        assert!(sol.exact_hits.is_empty());
        let sol = solve_dml(&map, &x, &value_target(&map, "x^2 - 9*x", 10), 5, 1000, 32).unwrap();
        assert_eq!(sol.exact_hits, brute(&map, &x, "x^2 - 9*x", 10, 1000));
        assert_eq!(sol.exact_hits, vec![10]);
    }

    #[test]
    fn fixed_point_progression() {
        let map = PolyMap::parse(&["x"], &["x"]).unwrap();
        let x = RationalPoint::from_i64s(&[4]);
        let sol = solve_dml(&map, &x, &value_target(&map, "x", 4), 5, 500, 32).unwrap();
        assert!(sol.exact_hits.is_empty());
        assert_eq!(sol.progressions, vec![Progression { modulus: 1, offset: 0, status: "verified-to-horizon" }]);
        assert_eq!(sol.indices_up_to(500).len(), 501);
    }

    #[test]
    fn non_integral_value_is_empty() {
        let map = PolyMap::parse(&["x"], &["x + 1"]).unwrap();
        let x = RationalPoint::from_i64s(&[0]);
        let target = TargetSpec::Value {
            observable: vec![Polynomial::parse("x", map.variables()).unwrap()],
            value: vec![BigRational::new(1.into(), 5.into())],
        };
        let sol = solve_dml(&map, &x, &target, 5, 100, 32).unwrap();
        assert!(sol.exact_hits.is_empty());
        assert_eq!(sol.empty_reason, Some("NON_INTEGRAL"));
    }

    #[test]
    fn preperiodic_start() {
        // x -> 5x + 1 collapses every residue onto 1 after one step.
        let map = PolyMap::parse(&["x"], &["5*x + 1"]).unwrap();
        let x = RationalPoint::from_i64s(&[3]);
        for y in [3, 16, 81, 406, 2] {
            let sol = solve_dml(&map, &x, &value_target(&map, "x", y), 5, 200, 64).unwrap();
            assert_eq!(sol.exact_hits, brute(&map, &x, "x", y, 200), "target {y}");
        }
    }

    #[test]
    fn subvariety_and_projective_targets() {
        let map = PolyMap::parse(&["x", "y"], &["x + 1", "y + 2"]).unwrap();
        let x = RationalPoint::from_i64s(&[0, 0]);
        let vars = map.variables();
        let target = TargetSpec::Subvariety {
            equations: vec![Polynomial::parse("y - 2*x", vars).unwrap(), Polynomial::parse("x - 12", vars).unwrap()],
        };
        let sol = solve_dml(&map, &x, &target, 5, 300, 32).unwrap();
        assert_eq!(sol.exact_hits, vec![12]);
        let obs = Observable::projective(
            Polynomial::parse("x", vars).unwrap(),
            Polynomial::parse("y", vars).unwrap(),
        )
        .unwrap();
        // x/y = n/(2n) = 1/2 for every n >= 1; n = 0 is indeterminate.
        let target = TargetSpec::Projective { observable: obs, value: (q(1), q(2)) };
        let sol = solve_dml(&map, &x, &target, 5, 300, 32).unwrap();
        assert_eq!(sol.indices_up_to(300), (1..=300).collect::<Vec<_>>());
    }

    #[test]
    fn chart_membership() {
        let map = PolyMap::parse(&["x"], &["x + 1"]).unwrap();
        let x = RationalPoint::from_i64s(&[1]);
        let vars = map.variables();
        let inv = Observable::projective(
            Polynomial::parse("1", vars).unwrap(),
            Polynomial::parse("x", vars).unwrap(),
        )
        .unwrap();
        let rep = return_set(&map, &x, &inv, 5, 100).unwrap();
        let v2: Vec<u64> = (0..=100).filter(|n| (n + 1) % 5 == 0).collect();
        assert_eq!(rep.charts[1].members, v2);
        assert_eq!(rep.charts[0].members.len() + v2.len(), 101);

        let id = Observable::affine(Polynomial::parse("x", vars).unwrap());
        let rep = return_set(&map, &RationalPoint::from_i64s(&[0]), &id, 5, 0).unwrap();
        assert_eq!(rep.charts[0].members, vec![0]);
    }

    #[test]
    fn density_gap_examples() {
        let all = ReturnSet::new(1, (0..=10_000).collect(), 10_000);
        assert_eq!(banach_density_gap(&all, 100), Ratio::from_integer(0));
        let odd = ReturnSet::new(1, (0..=10_000).filter(|n| n % 2 == 1).collect(), 10_000);
        assert_eq!(banach_density_gap(&odd, 100), Ratio::new(1, 2));
        let squares: Vec<u64> = (0..=100).map(|k| k * k).collect();
        let non_squares = ReturnSet::new(1, (0..=10_000).filter(|n| squares.binary_search(n).is_err()).collect(), 10_000);
        assert_eq!(banach_density_gap(&non_squares, 100), Ratio::new(1, 10));
    }

    #[test]
    fn rate_witnesses() {
        let evens = ReturnSet::new(1, (0..=100).filter(|n| n % 2 == 0).collect(), 100);
        let odds = ReturnSet::new(2, (0..=100).filter(|n| n % 2 == 1).collect(), 100);
        let w = return_rate_witness(&[evens, odds], 2).unwrap();
        assert_eq!(w.witnesses, (1..=50).collect::<Vec<_>>());
        let all = ReturnSet::new(1, (0..=40).collect(), 40);
        assert_eq!(return_rate_witness(&[all], 1).unwrap().witnesses, (1..=40).collect::<Vec<_>>());
        let none = ReturnSet::new(1, vec![], 40);
        assert_eq!(return_rate_witness(&[none], 1), Err(Error::HorizonTooSmall));
    }

    #[test]
    fn fiber_reports() {
        let h = PadicSeries::from_i64s(&[0, 5], 5, 20).unwrap();
        let s = ReturnSet::new(1, (0..=100).collect(), 100);
        let r = fiber_report(&h, &FiberValue::Rational(q(10)), &s, 100).unwrap();
        assert_eq!((r.count, r.members.clone()), (1, vec![2]));
        let r = fiber_report(&h, &FiberValue::Rational(BigRational::new(1.into(), 5.into())), &s, 100).unwrap();
        assert_eq!((r.count, r.reason), (0, Some("NON_INTEGRAL")));
        let h = PadicSeries::from_i64s(&[0, -1, 1], 5, 20).unwrap();
        let r = fiber_report(&h, &FiberValue::Rational(q(0)), &s, 100).unwrap();
        assert_eq!((r.count, r.strassman_bound, r.within_bound), (2, Some(2), true));
    }
}
