//! Polynomial self-maps of affine space: exact iteration over `Q`,
//! reduction mod `p^N`, residue periods and the Jacobian étaleness test.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::{check_prime, is_p_integral, PadicInt};
use crate::poly::{format_rational, parse_rational, Polynomial, ResidueEval};

/// Default cap on numerator/denominator size during exact iteration.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

/// A point of `A^m(Q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalPoint(pub Vec<BigRational>);

impl Serialize for RationalPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(format_rational))
    }
}

impl RationalPoint {
    pub fn from_i64s(coords: &[i64]) -> Self {
        RationalPoint(coords.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn parse(coords: &[impl AsRef<str>]) -> Result<Self> {
        coords.iter().map(|c| parse_rational(c.as_ref())).collect::<Result<_>>().map(RationalPoint)
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_p_integral(&self, p: u64) -> bool {
        self.0.iter().all(|c| is_p_integral(c, p))
    }

    /// Reduction into `(Z/p^N)^m`.
    pub fn reduce(&self, p: u64, precision: u32) -> Result<Vec<PadicInt>> {
        self.0.iter().map(|c| PadicInt::from_big_rational(c, p, precision)).collect()
    }

    /// Largest bit length among numerators and denominators.
    pub fn max_bits(&self) -> u64 {
        self.0.iter().map(|c| c.numer().bits().max(c.denom().bits())).max().unwrap_or(0)
    }
}

/// A polynomial endomorphism of `A^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolyMap {
    variables: Vec<String>,
    components: Vec<Polynomial>,
}

impl PolyMap {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let variables = components
            .first()
            .ok_or_else(|| Error::DimensionMismatch("a map needs at least one component".into()))?
            .variables()
            .to_vec();
        if components.len() != variables.len() || components.iter().any(|c| c.variables() != variables) {
            return Err(Error::DimensionMismatch(format!(
                "{} components over {} variables",
                components.len(),
                variables.len()
            )));
        }
        Ok(PolyMap { variables, components })
    }

    pub fn parse(variables: &[impl AsRef<str>], components: &[impl AsRef<str>]) -> Result<Self> {
        let vars: Vec<String> = variables.iter().map(|v| v.as_ref().to_string()).collect();
        let comps = components
            .iter()
            .map(|c| Polynomial::parse(c.as_ref(), &vars))
            .collect::<Result<Vec<_>>>()?;
        if comps.is_empty() {
            return Err(Error::DimensionMismatch("a map needs at least one component".into()));
        }
        Self::new(comps)
    }

    pub fn dimension(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    fn check_point(&self, x: &RationalPoint) -> Result<()> {
        if x.dimension() != self.dimension() {
            return Err(Error::DimensionMismatch(format!(
                "point of dimension {} for a map on A^{}",
                x.dimension(),
                self.dimension()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, x: &RationalPoint) -> Result<RationalPoint> {
        self.check_point(x)?;
        self.components.iter().map(|c| c.evaluate(&x.0)).collect::<Result<_>>().map(RationalPoint)
    }

    /// `Φ^n(x)` with the default bit budget.
    pub fn iterate(&self, x: &RationalPoint, n: u64) -> Result<RationalPoint> {
        self.iterate_with_budget(x, n, DEFAULT_BIT_BUDGET)
    }

    pub fn iterate_with_budget(&self, x: &RationalPoint, n: u64, bit_budget: u64) -> Result<RationalPoint> {
        self.check_point(x)?;
        let mut cur = x.clone();
        for step in 0..n {
            cur = self.apply(&cur)?;
            check_budget(&cur, step + 1, bit_budget)?;
        }
        Ok(cur)
    }

    /// `Φ^0(x), ..., Φ^{n_max}(x)`.
    pub fn orbit(&self, x: &RationalPoint, n_max: u64) -> Result<Vec<RationalPoint>> {
        self.orbit_with_budget(x, n_max, DEFAULT_BIT_BUDGET)
    }

    pub fn orbit_with_budget(&self, x: &RationalPoint, n_max: u64, bit_budget: u64) -> Result<Vec<RationalPoint>> {
        self.check_point(x)?;
        let mut out = Vec::with_capacity(n_max as usize + 1);
        out.push(x.clone());
        for step in 0..n_max {
            let next = self.apply(out.last().expect("nonempty"))?;
            check_budget(&next, step + 1, bit_budget)?;
            out.push(next);
        }
        Ok(out)
    }

    /// All coefficients are `p`-integral.
    pub fn is_p_integral(&self, p: u64) -> bool {
        self.components.iter().all(|c| c.is_p_integral(p))
    }

    /// The map on `(Z/p^N)^m`.
    pub fn reduce(&self, p: u64, precision: u32) -> Result<ReducedMap> {
        check_prime(p)?;
        if !self.is_p_integral(p) {
            return Err(Error::NotPIntegral("map coefficients".into()));
        }
        Ok(ReducedMap { map: self.clone(), prime: p, precision })
    }

    pub fn jacobian_determinant(&self) -> Polynomial {
        let m = self.dimension();
        let matrix: Vec<Vec<Polynomial>> =
            self.components.iter().map(|c| (0..m).map(|j| c.derivative(j)).collect()).collect();
        let cols: Vec<usize> = (0..m).collect();
        determinant(&matrix, 0, &cols, &self.variables)
    }

    /// Sufficient étaleness test on `A^m`: the Jacobian determinant is a
    /// nonzero constant.
    pub fn jacobian_unit_check(&self) -> bool {
        matches!(self.jacobian_determinant().as_constant(), Some(c) if !c.is_zero())
    }
}

fn check_budget(x: &RationalPoint, step: u64, budget: u64) -> Result<()> {
    let bits = x.max_bits();
    if bits > budget {
        return Err(Error::ResourceLimit(format!(
            "coordinate of iterate {step} needs {bits} bits (budget {budget})"
        )));
    }
    Ok(())
}

// Laplace expansion along rows; dimensions here are tiny.
fn determinant(matrix: &[Vec<Polynomial>], row: usize, cols: &[usize], vars: &[String]) -> Polynomial {
    if cols.is_empty() {
        return Polynomial::constant(vars, BigRational::one());
    }
    let mut acc = Polynomial::zero(vars);
    for (k, &c) in cols.iter().enumerate() {
        let entry = &matrix[row][c];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = entry.mul(&determinant(matrix, row + 1, &rest, vars));
        acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// A `P^1`-valued function `[numerator : denominator]` on `A^m`; an affine
/// observable has denominator one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Observable {
    pub numerator: Polynomial,
    pub denominator: Polynomial,
}

impl Observable {
    pub fn affine(f: Polynomial) -> Self {
        let one = Polynomial::constant(f.variables(), BigRational::one());
        Observable { numerator: f, denominator: one }
    }

    pub fn projective(numerator: Polynomial, denominator: Polynomial) -> Result<Self> {
        if numerator.variables() != denominator.variables() {
            return Err(Error::DimensionMismatch("numerator and denominator use different variables".into()));
        }
        Ok(Observable { numerator, denominator })
    }

    pub fn is_affine(&self) -> bool {
        self.denominator.as_constant().is_some_and(|c| c.is_one())
    }

    /// The homogeneous pair `(a, b)`; `None` where both vanish.
    pub fn evaluate(&self, x: &RationalPoint) -> Result<Option<(BigRational, BigRational)>> {
        let a = self.numerator.evaluate(&x.0)?;
        let b = self.denominator.evaluate(&x.0)?;
        Ok((!(a.is_zero() && b.is_zero())).then_some((a, b)))
    }
}

/// True iff the map and the point are both `p`-integral.
pub fn good_reduction_check(map: &PolyMap, x: &RationalPoint, p: u64) -> bool {
    map.is_p_integral(p) && x.is_p_integral(p)
}

/// A `p`-integral map acting on `(Z/p^N)^m`.
#[derive(Clone, Debug)]
pub struct ReducedMap {
    map: PolyMap,
    prime: u64,
    precision: u32,
}

impl ReducedMap {
    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn apply(&self, x: &[PadicInt]) -> Result<Vec<PadicInt>> {
        let ev = ResidueEval { prime: self.prime, precision: self.precision };
        self.map.components.iter().map(|c| c.evaluate_with(&ev, x)).collect()
    }

    pub fn iterate(&self, x: &[PadicInt], n: u64) -> Result<Vec<PadicInt>> {
        let mut cur = x.to_vec();
        for _ in 0..n {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }
}

/// Preperiod and period of a residue point under the reduced map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ResiduePeriod {
    pub preperiod: u64,
    pub period: u64,
}

/// Minimal `(ℓ, D)` with `Φ̄^{ℓ+D}(x̄) = Φ̄^ℓ(x̄)` in `F_p^m`, by Brent's
/// cycle detection.
pub fn residue_period(map: &PolyMap, x: &RationalPoint, p: u64) -> Result<ResiduePeriod> {
    map.check_point(x)?;
    if !good_reduction_check(map, x, p) {
        return Err(Error::NotPIntegral("map or starting point".into()));
    }
    let f = map.reduce(p, 1)?;
    let x0 = x.reduce(p, 1)?;

    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = x0.clone();
    let mut hare = f.apply(&x0)?;
    while tortoise != hare {
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = f.apply(&hare)?;
        lam += 1;
    }

    let mut tortoise = x0.clone();
    let mut hare = f.iterate(&x0, lam)?;
    let mut mu = 0u64;
    while tortoise != hare {
        tortoise = f.apply(&tortoise)?;
        hare = f.apply(&hare)?;
        mu += 1;
    }
    Ok(ResiduePeriod { preperiod: mu, period: lam })
}
