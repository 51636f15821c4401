//! Truncated strictly convergent power series over `Z_p`.
//!
//! A [`PadicSeries`] lists coefficients `a_0..a_K` modulo `p^N` and carries a
//! tail floor `T <= N`: every omitted coefficient `a_m` with `m > K` is known
//! to satisfy `v_p(a_m) >= T`. Operations that could be influenced by the
//! omitted tail say so through [`Error::TailAmbiguous`] or by lowering the
//! reported precision, never by guessing.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{prime_power, PadicInt, Valuation};

/// Default number of subdivision levels before root isolation gives up.
pub const DEFAULT_DEPTH_CAP: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PadicSeries {
    prime: u64,
    precision: u32,
    coefficients: Vec<PadicInt>,
    tail_floor: u32,
}

/// `P = poly_part * unit_part` with `poly_part = p^g * (monic of degree D(P))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeierstrassFactorization {
    pub poly_part: Vec<PadicInt>,
    pub unit_part: PadicSeries,
    pub gauss_valuation: u32,
    /// Every coefficient of `P - poly_part * unit_part` has at least this valuation.
    pub output_precision: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Root {
    /// Approximation of the root; its precision is the radius of the disk
    /// the root is known to lie in.
    pub value: PadicInt,
    /// `true` when Hensel's criterion certified a simple root in the disk.
    pub certified_simple: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootList {
    pub roots: Vec<Root>,
    pub strassman_bound: usize,
}

impl PadicSeries {
    /// Builds a series; coefficients are truncated to their common minimum
    /// precision and the tail floor is clamped to it.
    pub fn new(coefficients: Vec<PadicInt>, tail_floor: u32) -> Result<Self> {
        let first = coefficients
            .first()
            .ok_or_else(|| Error::InvalidInput("a series needs at least one coefficient".into()))?;
        let prime = first.prime();
        if let Some(c) = coefficients.iter().find(|c| c.prime() != prime) {
            return Err(Error::PrimeMismatch(prime, c.prime()));
        }
        let precision = coefficients.iter().map(PadicInt::precision).min().unwrap_or(1);
        let tail_floor = tail_floor.clamp(1, precision);
        let coefficients = coefficients.into_iter().map(|c| c.truncate(precision)).collect();
        let mut s = PadicSeries { prime, precision, coefficients, tail_floor };
        s.trim();
        Ok(s)
    }

    /// A polynomial: the tail is identically zero.
    pub fn polynomial(coefficients: Vec<PadicInt>) -> Result<Self> {
        let n = coefficients.iter().map(PadicInt::precision).min().unwrap_or(1);
        Self::new(coefficients, n)
    }

    pub fn from_i64s(coefficients: &[i64], prime: u64, precision: u32) -> Result<Self> {
        let coeffs = coefficients
            .iter()
            .map(|&c| PadicInt::from_i64(c, prime, precision))
            .collect::<Result<Vec<_>>>()?;
        Self::polynomial(coeffs)
    }

    pub fn constant(c: PadicInt) -> Self {
        let n = c.precision();
        PadicSeries { prime: c.prime(), precision: n, coefficients: vec![c], tail_floor: n }
    }

    // Trailing coefficients with valuation >= tail floor are absorbed by the tail.
    fn trim(&mut self) {
        while self.coefficients.len() > 1 {
            let last = self.coefficients.last().expect("nonempty");
            if last.valuation() >= Valuation::Finite(self.tail_floor) {
                self.coefficients.pop();
            } else {
                break;
            }
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn tail_floor(&self) -> u32 {
        self.tail_floor
    }

    pub fn coefficients(&self) -> &[PadicInt] {
        &self.coefficients
    }

    /// Index of the last listed coefficient.
    pub fn truncation_degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn constant_term(&self) -> &PadicInt {
        &self.coefficients[0]
    }

    fn zero_coeff(&self) -> PadicInt {
        self.coefficients[0].sibling(BigUint::zero())
    }

    /// Every non-constant coefficient, including the tail, vanishes at the
    /// carried precision.
    pub fn is_constant(&self) -> bool {
        self.tail_floor >= self.precision && self.coefficients[1..].iter().all(PadicInt::is_zero)
    }

    /// Valuation form of the Gauss norm: `min_m v_p(a_m)`.
    pub fn gauss_valuation(&self) -> Result<u32> {
        let min = self
            .coefficients
            .iter()
            .map(|c| c.valuation().capped(self.precision))
            .min()
            .expect("nonempty");
        if min < self.tail_floor {
            Ok(min)
        } else if self.tail_floor >= self.precision {
            Err(Error::IndistinguishableFromZero)
        } else {
            Err(Error::TailAmbiguous { tail_floor: self.tail_floor, valuation: min })
        }
    }

    /// Strassman degree `D(P)`: the largest index whose coefficient attains
    /// the Gauss norm. `P` has at most `D(P)` zeros in `Z_p`.
    pub fn strassman_degree(&self) -> Result<usize> {
        let g = self.gauss_valuation()?;
        Ok(self
            .coefficients
            .iter()
            .rposition(|c| c.valuation() == Valuation::Finite(g))
            .expect("gauss valuation is attained"))
    }

    /// A bound on the number of zeros of `P - shift` in `Z_p`.
    ///
    /// Returns `D(P - shift)` when it is computable. Otherwise falls back to
    /// `D(P - P(0))`, which bounds the zeros of `P - t` for every `t`.
    pub fn strassman_zero_bound(&self, shift: &PadicInt) -> Result<usize> {
        match self.sub_constant(shift)?.strassman_degree() {
            Ok(d) => Ok(d),
            Err(Error::IndistinguishableFromZero | Error::TailAmbiguous { .. }) => self.uniform_shift_degree(),
            Err(e) => Err(e),
        }
    }

    /// `D(P - P(0))`: a bound on the zeros of `P - t` valid for all `t`.
    pub fn uniform_shift_degree(&self) -> Result<usize> {
        let c = self.constant_term().clone();
        self.sub_constant(&c)?.strassman_degree()
    }

    pub fn sub_constant(&self, c: &PadicInt) -> Result<Self> {
        let mut coeffs = self.coefficients.clone();
        coeffs[0] = coeffs[0].checked_sub(c)?;
        Self::new(coeffs, self.tail_floor)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a.checked_add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a.checked_sub(b))
    }

    fn combine(&self, other: &Self, op: impl Fn(&PadicInt, &PadicInt) -> Result<PadicInt>) -> Result<Self> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        let (la, lb) = (self.coefficients.len(), other.coefficients.len());
        let mut precision = self.precision.min(other.precision);
        // Listed positions that are tail on one side are only known to that tail floor.
        if la < lb {
            precision = precision.min(self.tail_floor);
        } else if lb < la {
            precision = precision.min(other.tail_floor);
        }
        let za = self.zero_coeff();
        let zb = other.zero_coeff();
        let coeffs = (0..la.max(lb))
            .map(|m| {
                let a = self.coefficients.get(m).unwrap_or(&za);
                let b = other.coefficients.get(m).unwrap_or(&zb);
                op(a, b).map(|c| c.truncate(precision))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs, self.tail_floor.min(other.tail_floor))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        // Unknown tail terms of either factor reach every listed product coefficient.
        let tail = self.tail_floor.min(other.tail_floor);
        let precision = self.precision.min(other.precision).min(tail);
        let a: Vec<PadicInt> = self.coefficients.iter().map(|c| c.truncate(precision)).collect();
        let b: Vec<PadicInt> = other.coefficients.iter().map(|c| c.truncate(precision)).collect();
        Self::new(poly_mul(&a, &b), tail)
    }

    pub fn scale(&self, c: &PadicInt) -> Result<Self> {
        let coeffs = self
            .coefficients
            .iter()
            .map(|a| a.checked_mul(c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs, self.tail_floor)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::constant(self.coefficients[0].sibling(BigUint::one()));
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Formal derivative (same tail floor: `v(m a_m) >= v(a_m)`).
    pub fn derivative(&self) -> Self {
        let coeffs: Vec<PadicInt> = if self.coefficients.len() == 1 {
            vec![self.zero_coeff()]
        } else {
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(m, a)| a * &a.sibling(BigUint::from(m)))
                .collect()
        };
        Self::new(coeffs, self.tail_floor).expect("derivative of a valid series")
    }

    /// `P(z)`; the omitted tail limits the result to precision `T`.
    pub fn evaluate(&self, z: &PadicInt) -> Result<PadicInt> {
        if z.prime() != self.prime {
            return Err(Error::PrimeMismatch(self.prime, z.prime()));
        }
        let precision = self.tail_floor.min(z.precision());
        let z = z.truncate(precision);
        let mut acc = self.coefficients.last().expect("nonempty").truncate(precision);
        for c in self.coefficients.iter().rev().skip(1) {
            acc = &(&acc * &z) + c;
        }
        Ok(acc.truncate(precision))
    }

    /// `Q(z) = P(a + b z)`.
    pub fn compose_linear(&self, a: &PadicInt, b: &PadicInt) -> Result<Self> {
        if a.prime() != self.prime || b.prime() != self.prime {
            return Err(Error::PrimeMismatch(self.prime, a.prime().max(b.prime())));
        }
        // Omitted a_j contribute a_j C(j, m) a^(j-m) b^m to every coefficient m.
        let precision = self.tail_floor.min(a.precision()).min(b.precision());
        let a = a.truncate(precision);
        let b = b.truncate(precision);
        let lin = vec![a, b];
        let mut acc = vec![self.coefficients.last().expect("nonempty").truncate(precision)];
        for c in self.coefficients.iter().rev().skip(1) {
            acc = poly_mul(&acc, &lin);
            acc[0] = &acc[0] + &c.truncate(precision);
        }
        Self::new(acc, precision)
    }

    /// Divides every coefficient by `p^k`; requires `gauss_valuation >= k`.
    pub fn div_p_power(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if k >= self.tail_floor {
            return Err(Error::PrecisionExhausted(format!(
                "cannot divide by {}^{k} a series with tail floor {}",
                self.prime, self.tail_floor
            )));
        }
        let precision = self.tail_floor;
        let coeffs = self
            .coefficients
            .iter()
            .map(|c| c.truncate(precision).div_p_power(k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs, self.tail_floor - k)
    }

    /// Weierstrass preparation `P = Q u` with `Q = p^g * monic` of degree
    /// `D(P)` and `u` a unit of Gauss valuation 0.
    ///
    /// The monic factor and the unit are lifted one `p`-adic digit at a time
    /// from `P/p^g = (P̄/ℓ) * ℓ (mod p)`, where `ℓ` is the coefficient of
    /// `z^D`, by dividing the residual `E = P/p^g - Q u` by `Q`.
    pub fn weierstrass_prep(&self) -> Result<WeierstrassFactorization> {
        let g = self.gauss_valuation()?;
        let d = self.strassman_degree()?;
        let normalized = self.div_p_power(g)?;
        let w = normalized.tail_floor;
        let p_hat: Vec<PadicInt> = normalized.coefficients.iter().map(|c| c.truncate(w)).collect();
        let one = p_hat[0].sibling(BigUint::one());
        let lead = p_hat[d].clone();
        let lead_inv = lead.invert()?;

        let mut monic: Vec<PadicInt> = p_hat[..d].iter().map(|c| c * &lead_inv).collect();
        monic.push(one.clone());
        let mut unit = vec![lead];
        let mut last_val = 0u32;
        loop {
            let residual = poly_sub(&p_hat, &poly_mul(&monic, &unit));
            let val = residual.iter().map(|c| c.valuation().capped(w)).min().unwrap_or(w);
            if val >= w {
                break;
            }
            if val <= last_val && last_val > 0 {
                return Err(Error::PrecisionExhausted(format!(
                    "Weierstrass lifting stalled at valuation {val}"
                )));
            }
            last_val = val;
            let (quot, rem) = poly_divrem_monic(&residual, &monic);
            for (m, r) in rem.iter().enumerate() {
                monic[m] = &monic[m] + &(r * &lead_inv);
            }
            if unit.len() < quot.len() {
                unit.resize(quot.len(), one.sibling(BigUint::zero()));
            }
            for (m, q) in quot.iter().enumerate() {
                unit[m] = &unit[m] + q;
            }
        }
        let poly_part = monic.iter().map(|c| c.mul_p_power(g)).collect();
        Ok(WeierstrassFactorization {
            poly_part,
            unit_part: Self::new(unit, w)?,
            gauss_valuation: g,
            output_precision: w,
        })
    }

    /// All zeros in `Z_p`, isolated by residue subdivision with the default
    /// depth cap.
    pub fn zeros(&self) -> Result<RootList> {
        self.zeros_with_depth(DEFAULT_DEPTH_CAP)
    }

    /// Residue subdivision: on the disk `c + p^s Z_p` the series
    /// `Q(z) = P(c + p^s z)` has no zeros when `D(Q) = 0`, exactly one when
    /// `D(Q) = 1` (refined by Newton's method), and is split into `p`
    /// sub-disks otherwise. A disk on which `Q` vanishes at the carried
    /// precision is reported as an uncertified root.
    pub fn zeros_with_depth(&self, depth_cap: u32) -> Result<RootList> {
        let bound = self.strassman_degree()?;
        let p = self.prime;
        let zero = self.zero_coeff();
        let mut roots = Vec::new();
        let mut stack: Vec<(BigUint, u32)> = vec![(BigUint::zero(), 0)];
        while let Some((center, level)) = stack.pop() {
            let disk = if level == 0 {
                self.clone()
            } else {
                if level >= self.tail_floor {
                    roots.push(Root { value: uncertified(&zero, &center, level), certified_simple: false });
                    continue;
                }
                let b = zero.sibling(prime_power(p, level));
                self.compose_linear(&zero.sibling(center.clone()), &b)?
            };
            let g = match disk.gauss_valuation() {
                Ok(g) => g,
                Err(Error::IndistinguishableFromZero | Error::TailAmbiguous { .. }) if level > 0 => {
                    roots.push(Root { value: uncertified(&zero, &center, level), certified_simple: false });
                    continue;
                }
                Err(e) => return Err(e),
            };
            match disk.strassman_degree()? {
                0 => {}
                1 => {
                    let local = newton_simple_root(&disk.div_p_power(g)?)?;
                    let scale = prime_power(p, level);
                    let value = &center + local.residue() * &scale;
                    let precision = level + local.precision();
                    let root = PadicInt::new(p, precision, value)?;
                    roots.push(Root { value: root, certified_simple: true });
                }
                _ => {
                    if level >= depth_cap {
                        return Err(Error::PrecisionExhausted(format!(
                            "unresolved residue class {center} mod {p}^{level}"
                        )));
                    }
                    let step = prime_power(p, level);
                    for r in (0..p).rev() {
                        stack.push((&center + &step * r, level + 1));
                    }
                }
            }
        }
        if roots.len() > bound {
            return Err(Error::PrecisionExhausted(format!(
                "{} candidate disks exceed the Strassman bound {bound}",
                roots.len()
            )));
        }
        roots.sort_by(|a, b| a.value.residue().cmp(b.value.residue()));
        Ok(RootList { roots, strassman_bound: bound })
    }
}

fn uncertified(zero: &PadicInt, center: &BigUint, level: u32) -> PadicInt {
    PadicInt::new(zero.prime(), level.max(1), center.clone()).expect("valid prime")
}

// Newton iteration for a normalized series with D = 1: the linear
// coefficient is a unit and dominates, so Hensel's lemma applies at the
// starting point -a0/a1 mod p.
fn newton_simple_root(q: &PadicSeries) -> Result<PadicInt> {
    let n = q.tail_floor;
    let c = q.coefficients();
    let deriv = q.derivative();
    let mut z = -&(&c[0] * &c[1].invert()?);
    z = z.truncate(n);
    for _ in 0..(2 * n + 8) {
        let value = q.evaluate(&z)?;
        if value.is_zero() {
            return Ok(z);
        }
        let slope = deriv.evaluate(&z)?;
        debug_assert!(value.valuation() > Valuation::Finite(2 * slope.valuation().capped(n)));
        z = &z - &(&value * &slope.invert()?);
    }
    Err(Error::PrecisionExhausted("Newton iteration did not converge".into()))
}

pub(crate) fn poly_mul(a: &[PadicInt], b: &[PadicInt]) -> Vec<PadicInt> {
    let zero = a[0].sibling(BigUint::zero()).truncate(b[0].precision());
    let mut out = vec![zero; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

fn poly_sub(a: &[PadicInt], b: &[PadicInt]) -> Vec<PadicInt> {
    let zero = a[0].sibling(BigUint::zero());
    (0..a.len().max(b.len()))
        .map(|m| a.get(m).unwrap_or(&zero) - b.get(m).unwrap_or(&zero))
        .collect()
}

/// Long division by a monic polynomial: `a = divisor * quot + rem`,
/// `deg rem < deg divisor`.
fn poly_divrem_monic(a: &[PadicInt], divisor: &[PadicInt]) -> (Vec<PadicInt>, Vec<PadicInt>) {
    let d = divisor.len() - 1;
    let zero = a[0].sibling(BigUint::zero());
    let mut rem = a.to_vec();
    if rem.len() <= d {
        rem.resize(d.max(1), zero.clone());
        return (vec![zero], rem);
    }
    let mut quot = vec![zero.clone(); rem.len() - d];
    for k in (0..quot.len()).rev() {
        let lead = rem[k + d].clone();
        if lead.is_zero() {
            continue;
        }
        for (i, c) in divisor.iter().enumerate() {
            rem[k + i] = &rem[k + i] - &(&lead * c);
        }
        quot[k] = lead;
    }
    rem.truncate(d.max(1));
    if d == 0 {
        rem[0] = zero;
    }
    (quot, rem)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[i64]) -> PadicSeries {
        PadicSeries::from_i64s(c, 5, 8).unwrap()
    }

    fn pi(v: i64) -> PadicInt {
        PadicInt::from_i64(v, 5, 8).unwrap()
    }

    #[test]
    fn gauss_valuation_examples() {
        assert_eq!(s(&[1, 5]).gauss_valuation(), Ok(0));
        assert_eq!(s(&[0, 5, 25]).gauss_valuation(), Ok(1));
        let zero = PadicSeries::from_i64s(&[0, 0, 0], 5, 4).unwrap();
        assert_eq!(zero.gauss_valuation(), Err(Error::IndistinguishableFromZero));
    }

    #[test]
    fn tail_ambiguity_is_reported() {
        let coeffs = vec![pi(25), pi(125)];
        let series = PadicSeries::new(coeffs, 2).unwrap();
        assert!(matches!(series.gauss_valuation(), Err(Error::TailAmbiguous { tail_floor: 2, .. })));
        assert!(matches!(series.strassman_degree(), Err(Error::TailAmbiguous { .. })));
    }

    #[test]
    fn strassman_degree_examples() {
        assert_eq!(s(&[0, -1, 1]).strassman_degree(), Ok(2));
        assert_eq!(s(&[1, 5, 25]).strassman_degree(), Ok(0));
        assert_eq!(s(&[0, 5, 25]).strassman_degree(), Ok(1));
    }

    #[test]
    fn strassman_zero_bound_examples() {
        assert_eq!(s(&[0, -1, 1]).strassman_zero_bound(&pi(0)), Ok(2));
        assert_eq!(s(&[3, 5, 25]).strassman_zero_bound(&pi(3)), Ok(1));
        let constant = s(&[3]);
        assert_eq!(constant.strassman_zero_bound(&pi(3)), Err(Error::IndistinguishableFromZero));
    }

    #[test]
    fn evaluate_and_compose() {
        assert_eq!(s(&[0, -1, 1]).evaluate(&pi(3)).unwrap(), pi(6));
        assert_eq!(s(&[7, 1, 1]).evaluate(&pi(0)).unwrap(), pi(7));
        let q = s(&[0, 0, 1]).compose_linear(&pi(0), &pi(5)).unwrap();
        assert_eq!(q, s(&[0, 0, 25]));
    }

    #[test]
    fn zeros_examples() {
        let r = s(&[0, -1, 1]).zeros().unwrap();
        let vals: Vec<_> = r.roots.iter().map(|x| x.value.residue().clone()).collect();
        assert_eq!(vals, vec![BigUint::from(0u32), BigUint::from(1u32)]);
        assert!(r.roots.iter().all(|x| x.certified_simple));
        assert!(s(&[1, 5]).zeros().unwrap().roots.is_empty());
        assert!(s(&[-2, 0, 1]).zeros().unwrap().roots.is_empty());
    }

    #[test]
    fn zeros_match_brute_force_scan() {
        // z^2 - z over Z_5: scan residues mod 5^3 for P(z) = 0 mod 5^3.
        let p = s(&[0, -1, 1]);
        let modulus = 125i64;
        let brute: Vec<i64> = (0..modulus).filter(|z| (z * z - z).rem_euclid(modulus) == 0).collect();
        let found: Vec<i64> = p
            .zeros()
            .unwrap()
            .roots
            .iter()
            .map(|r| (r.value.signed_residue() % modulus).to_string().parse::<i64>().unwrap().rem_euclid(modulus))
            .collect();
        assert_eq!(brute, found);
    }

    #[test]
    fn non_residue_has_no_roots() {
        // Legendre symbol (2/5) = -1 since squares mod 5 are {0, 1, 4}.
        assert!(![0i64, 1, 4].contains(&2));
        assert!(s(&[-2, 0, 1]).zeros().unwrap().roots.is_empty());
    }

    #[test]
    fn double_root_is_uncertified() {
        // (z - 1)^2 cannot be resolved beyond the carried precision.
        let r = s(&[1, -2, 1]).zeros().unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!(!r.roots[0].certified_simple);
        assert_eq!((r.roots[0].value.residue() % BigUint::from(625u32)), BigUint::from(1u32));
    }

    #[test]
    fn weierstrass_examples() {
        // (z - 2)(1 + 5z) = -2 - 9z + 5z^2
        let p = s(&[-2, -9, 5]);
        let w = p.weierstrass_prep().unwrap();
        assert_eq!(w.gauss_valuation, 0);
        assert_eq!(w.poly_part.len(), 2);
        let n = w.output_precision;
        assert_eq!(w.poly_part[0].truncate(n), pi(-2).truncate(n));
        assert_eq!(w.poly_part[1].truncate(n), pi(1).truncate(n));
        let u = w.unit_part.coefficients();
        assert_eq!(u[0], pi(1).truncate(n));
        assert_eq!(u[1], pi(5).truncate(n));

        let unit_lead = s(&[1, 2, 3]).weierstrass_prep().unwrap();
        assert_eq!(unit_lead.unit_part.coefficients().len(), 1);
        assert_eq!(unit_lead.unit_part.coefficients()[0], pi(3));
        let three_inv = pi(3).invert().unwrap();
        assert_eq!(unit_lead.poly_part[0], &pi(1) * &three_inv);

        let scaled = s(&[-5, 5]).weierstrass_prep().unwrap();
        assert_eq!(scaled.gauss_valuation, 1);
        assert_eq!(scaled.poly_part[1].valuation(), Valuation::Finite(1));
        assert_eq!(scaled.poly_part[0].truncate(7), pi(-5).truncate(7));
    }

    #[test]
    fn divrem_monic_roundtrip() {
        let a: Vec<PadicInt> = [3, 1, 4, 1, 5].iter().map(|&v| pi(v)).collect();
        let d: Vec<PadicInt> = [2, 7, 1].iter().map(|&v| pi(v)).collect();
        let (q, r) = poly_divrem_monic(&a, &d);
        let back = poly_sub(&a, &poly_mul(&d, &q));
        for (m, c) in back.iter().enumerate() {
            let expect = r.get(m).cloned().unwrap_or_else(|| pi(0));
            assert_eq!(c, &expect);
        }
    }
}
