//! Elements of `Z_p` at finite absolute precision.
//!
//! A [`PadicInt`] is a residue class modulo `p^N`: the value is known up to an
//! additive error of valuation at least `N`. Arithmetic between two elements
//! keeps the smaller of the two precisions. Zero at precision `N` has
//! [`Valuation::Infinite`]; callers that need a provably nonzero element must
//! check `valuation() < N`.
//!
//! Only primes `p >= 5` are accepted, which keeps the logarithm and the
//! exponential convergent on the whole of `pZ_p` with uniform estimates.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Rejects anything that is not a prime `>= 5`.
pub fn check_prime(p: u64) -> Result<()> {
    if p < 5 || !is_prime(p) {
        return Err(Error::InvalidPrime(p));
    }
    Ok(())
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `p^n` as a big integer.
pub fn prime_power(p: u64, n: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), n as usize)
}

/// `v_p(n!) = (n - s_p(n)) / (p - 1)` where `s_p` is the base-`p` digit sum.
pub fn factorial_valuation(n: u64, p: u64) -> u32 {
    let mut digits = 0;
    let mut m = n;
    while m > 0 {
        digits += m % p;
        m /= p;
    }
    ((n - digits) / (p - 1)) as u32
}

/// `v_p(n)` for a positive machine integer.
pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n > 0);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Exact `p`-adic valuation of a nonzero rational, `None` for zero.
pub fn rational_valuation(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    Some(bigint_valuation(q.numer(), p) as i64 - bigint_valuation(q.denom(), p) as i64)
}

/// `v_p` of a nonzero big integer.
pub fn bigint_valuation(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Whether a rational lies in `Z_(p)`.
pub fn is_p_integral(q: &BigRational, p: u64) -> bool {
    !(q.denom() % BigInt::from(p)).is_zero()
}

/// `p`-adic valuation; `Infinite` means "zero at the carried precision".
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// Finite value, or `cap` when infinite.
    pub fn capped(self, cap: u32) -> u32 {
        match self {
            Valuation::Finite(v) => v.min(cap),
            Valuation::Infinite => cap,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_u32(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

/// An element of `Z_p` known modulo `p^precision`.
#[derive(Clone)]
pub struct PadicInt {
    prime: u64,
    precision: u32,
    residue: BigUint,
    modulus: Arc<BigUint>,
}

impl PartialEq for PadicInt {
    fn eq(&self, other: &Self) -> bool {
        self.prime == other.prime && self.precision == other.precision && self.residue == other.residue
    }
}

impl Eq for PadicInt {}

impl std::hash::Hash for PadicInt {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.prime.hash(state);
        self.precision.hash(state);
        self.residue.hash(state);
    }
}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.prime, self.precision)
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.residue, self.prime, self.precision)
    }
}

impl Serialize for PadicInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PadicInt", 3)?;
        st.serialize_field("prime", &self.prime)?;
        st.serialize_field("precision", &self.precision)?;
        st.serialize_field("residue", &self.residue.to_string())?;
        st.end()
    }
}

impl PadicInt {
    /// Builds `residue mod p^precision`, reducing the residue.
    pub fn new(prime: u64, precision: u32, residue: BigUint) -> Result<Self> {
        check_prime(prime)?;
        if precision == 0 {
            return Err(Error::InvalidPrecision);
        }
        let modulus = Arc::new(prime_power(prime, precision));
        Ok(Self::with_modulus(prime, precision, residue, modulus))
    }

    fn with_modulus(prime: u64, precision: u32, residue: BigUint, modulus: Arc<BigUint>) -> Self {
        let residue = if residue >= *modulus { residue % &*modulus } else { residue };
        PadicInt { prime, precision, residue, modulus }
    }

    /// Same prime and precision as `self`, new residue.
    pub fn sibling(&self, residue: BigUint) -> Self {
        Self::with_modulus(self.prime, self.precision, residue, self.modulus.clone())
    }

    pub fn zero(prime: u64, precision: u32) -> Result<Self> {
        Self::new(prime, precision, BigUint::zero())
    }

    pub fn one(prime: u64, precision: u32) -> Result<Self> {
        Self::new(prime, precision, BigUint::one())
    }

    pub fn from_u64(value: u64, prime: u64, precision: u32) -> Result<Self> {
        Self::new(prime, precision, BigUint::from(value))
    }

    pub fn from_i64(value: i64, prime: u64, precision: u32) -> Result<Self> {
        Self::from_bigint(&BigInt::from(value), prime, precision)
    }

    pub fn from_bigint(value: &BigInt, prime: u64, precision: u32) -> Result<Self> {
        let zero = Self::zero(prime, precision)?;
        Ok(zero.sibling_from_bigint(value))
    }

    /// Residue of a signed integer with the prime and precision of `self`.
    pub fn sibling_from_bigint(&self, value: &BigInt) -> Self {
        let m = BigInt::from_biguint(Sign::Plus, (*self.modulus).clone());
        let r = value.mod_floor(&m);
        self.sibling(r.to_biguint().expect("mod_floor is nonnegative"))
    }

    /// Embeds the `p`-integral rational `numerator / denominator`.
    pub fn from_rational(numerator: &BigInt, denominator: &BigInt, prime: u64, precision: u32) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let q = BigRational::new(numerator.clone(), denominator.clone());
        Self::from_big_rational(&q, prime, precision)
    }

    pub fn from_big_rational(q: &BigRational, prime: u64, precision: u32) -> Result<Self> {
        let zero = Self::zero(prime, precision)?;
        zero.sibling_from_rational(q)
    }

    /// Rational embedded with the prime and precision of `self`.
    pub fn sibling_from_rational(&self, q: &BigRational) -> Result<Self> {
        let p = BigInt::from(self.prime);
        if (q.denom() % &p).is_zero() {
            return Err(Error::NotPIntegral(q.to_string()));
        }
        let num = self.sibling_from_bigint(q.numer());
        let den = self.sibling_from_bigint(q.denom());
        Ok(&num * &den.invert()?)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    /// Representative in `(-p^N/2, p^N/2]`.
    pub fn signed_residue(&self) -> BigInt {
        let r = BigInt::from_biguint(Sign::Plus, self.residue.clone());
        let m = BigInt::from_biguint(Sign::Plus, (*self.modulus).clone());
        if &r * 2 > m {
            r - m
        } else {
            r
        }
    }

    /// Forgets digits beyond `precision` (no-op when already coarser).
    pub fn truncate(&self, precision: u32) -> Self {
        if precision >= self.precision {
            return self.clone();
        }
        let precision = precision.max(1);
        let modulus = Arc::new(prime_power(self.prime, precision));
        Self::with_modulus(self.prime, precision, self.residue.clone(), modulus)
    }

    fn check_prime_match(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        Ok(())
    }

    fn common_modulus(&self, other: &Self) -> (u32, Arc<BigUint>) {
        match self.precision.cmp(&other.precision) {
            Ordering::Less | Ordering::Equal => (self.precision, self.modulus.clone()),
            Ordering::Greater => (other.precision, other.modulus.clone()),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_prime_match(other)?;
        let (n, m) = self.common_modulus(other);
        Ok(Self::with_modulus(self.prime, n, &self.residue + &other.residue, m))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_prime_match(other)?;
        let (n, m) = self.common_modulus(other);
        let a = &self.residue % &*m;
        let b = &other.residue % &*m;
        let r = if a >= b { a - b } else { &*m - (b - a) };
        Ok(Self::with_modulus(self.prime, n, r, m))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_prime_match(other)?;
        let (n, m) = self.common_modulus(other);
        Ok(Self::with_modulus(self.prime, n, &self.residue * &other.residue, m))
    }

    pub fn pow(&self, k: u64) -> Self {
        let r = self.residue.modpow(&BigUint::from(k), &self.modulus);
        self.sibling(r)
    }

    /// Largest `k <= N` with `p^k | residue`, or `Infinite` for residue 0.
    pub fn valuation(&self) -> Valuation {
        if self.residue.is_zero() {
            return Valuation::Infinite;
        }
        let p = BigUint::from(self.prime);
        let mut m = self.residue.clone();
        let mut v = 0;
        loop {
            let (q, r) = m.div_rem(&p);
            if !r.is_zero() {
                return Valuation::Finite(v);
            }
            m = q;
            v += 1;
        }
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Finite(0)
    }

    /// Multiplicative inverse modulo `p^N`.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit);
        }
        let a = BigInt::from_biguint(Sign::Plus, self.residue.clone());
        let m = BigInt::from_biguint(Sign::Plus, (*self.modulus).clone());
        let eg = a.extended_gcd(&m);
        debug_assert!(eg.gcd.is_one());
        Ok(self.sibling_from_bigint(&eg.x))
    }

    /// Exact division by `p^k`; requires `valuation >= k`. The quotient is
    /// known to precision `N - k`.
    pub fn div_p_power(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if self.valuation() < Valuation::Finite(k) {
            return Err(Error::InvalidInput(format!("{self:?} is not divisible by {}^{k}", self.prime)));
        }
        if k >= self.precision {
            return Err(Error::PrecisionExhausted(format!(
                "division by {}^{k} leaves no digits of a value known mod {}^{}",
                self.prime, self.prime, self.precision
            )));
        }
        let n = self.precision - k;
        let q = &self.residue / prime_power(self.prime, k);
        Ok(Self::with_modulus(self.prime, n, q, Arc::new(prime_power(self.prime, n))))
    }

    /// `p^k * self`, known to precision `N + k`.
    pub fn mul_p_power(&self, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        let n = self.precision + k;
        let r = &self.residue * prime_power(self.prime, k);
        Self::with_modulus(self.prime, n, r, Arc::new(prime_power(self.prime, n)))
    }

    /// The `p`-adic logarithm of a principal unit `u = 1 + x`, `v(x) >= 1`.
    ///
    /// The series `sum (-1)^(k+1) x^k / k` is summed until every remaining
    /// term has valuation `k v(x) - v_p(k) >= N`. The map is an isometry on
    /// `1 + pZ_p`, so the result is reported at the input precision.
    pub fn padic_log(&self) -> Result<Self> {
        let one = self.sibling(BigUint::one());
        let x = self - &one;
        let v = match x.valuation() {
            Valuation::Infinite => return Ok(self.sibling(BigUint::zero())),
            Valuation::Finite(0) => {
                return Err(Error::OutOfConvergenceDomain("log requires u = 1 mod p".into()));
            }
            Valuation::Finite(v) => v as u64,
        };
        let p = self.prime;
        let n = self.precision as u64;
        let term_val = |k: u64| k * v - (k.ilog(p) as u64);
        let mut last = 1u64;
        while term_val(last) < n {
            last += 1;
        }
        let extra = last.ilog(p);
        let wide = prime_power(p, self.precision + extra);
        let mut power = BigUint::one();
        let mut sum = BigInt::zero();
        let target = BigInt::from_biguint(Sign::Plus, (*self.modulus).clone());
        for k in 1..last {
            power = (&power * &x.residue) % &wide;
            let vk = valuation_u64(k, p);
            let unit = k / p.pow(vk);
            let scaled = &power / prime_power(p, vk);
            let inv = self.sibling(BigUint::from(unit)).invert()?;
            let term = BigInt::from_biguint(Sign::Plus, (scaled % &*self.modulus) * &inv.residue);
            if k % 2 == 1 {
                sum += term;
            } else {
                sum -= term;
            }
            sum = sum.mod_floor(&target);
        }
        Ok(self.sibling_from_bigint(&sum))
    }

    /// The `p`-adic exponential of `v` with `v_p(v) >= 1`.
    ///
    /// Terms `v^k / k!` are summed until the lower bound
    /// `k v(v) - (k - 1)/(p - 1)` on their valuation reaches `N`; the
    /// worst division loss `v_p(k!)` is absorbed by working modulo
    /// `p^(N + v_p(K!))`. The exponential is an isometry on `pZ_p`, so
    /// the input precision is reported.
    pub fn padic_exp(&self) -> Result<Self> {
        let v = match self.valuation() {
            Valuation::Infinite => return Ok(self.sibling(BigUint::one())),
            Valuation::Finite(0) => {
                return Err(Error::OutOfConvergenceDomain("exp requires v = 0 mod p".into()));
            }
            Valuation::Finite(v) => v as u64,
        };
        let p = self.prime;
        let n = self.precision as u64;
        // k v - (k-1)/(p-1) >= n  <=>  k (v (p-1) - 1) + 1 >= n (p-1)
        let slope = v * (p - 1) - 1;
        let last = (n * (p - 1) - 1).div_ceil(slope) + 1;
        let extra = factorial_valuation(last, p);
        let wide = prime_power(p, self.precision + extra);
        let mut power = BigUint::one();
        let mut fact_unit = self.sibling(BigUint::one());
        let mut sum = self.sibling(BigUint::one());
        for k in 1..=last {
            power = (&power * &self.residue) % &wide;
            let vk = valuation_u64(k, p);
            fact_unit = &fact_unit * &self.sibling(BigUint::from(k / p.pow(vk)));
            let fv = factorial_valuation(k, p);
            let scaled = self.sibling(&power / prime_power(p, fv));
            sum = &sum + &(&scaled * &fact_unit.invert()?);
        }
        Ok(sum)
    }

    /// Nonnegative integer representative, if it fits a `u64`.
    pub fn to_u64(&self) -> Option<u64> {
        self.residue.to_u64()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&PadicInt> for &PadicInt {
            type Output = PadicInt;

            /// Panics when the primes differ; use the `checked_*` form for
            /// operands of unknown origin.
            fn $method(self, rhs: &PadicInt) -> PadicInt {
                self.$checked(rhs).expect("prime mismatch in p-adic arithmetic")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &PadicInt {
    type Output = PadicInt;

    fn neg(self) -> PadicInt {
        if self.residue.is_zero() {
            return self.clone();
        }
        self.sibling(&*self.modulus - &self.residue)
    }
}
