//! Exact coefficient arithmetic.
//!
//! Two coefficient fields are supported: the rationals (arbitrary precision,
//! always kept in lowest terms) and prime fields `F_p` for an odd prime `p`
//! below 2^31. Both sit behind the [`Field`] trait so the polynomial and
//! Gröbner layers are written once. Characteristic 2 is rejected at
//! construction time because the chart equations divide by 2.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Default modulus for prime-field runs.
pub const DEFAULT_MODULUS: u64 = 32003;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("{0} is not an odd prime below 2^31")]
    InvalidModulus(u64),
    #[error("denominator {0} is not invertible modulo {1}")]
    NotInvertible(String, u64),
}

/// Arbitrary-precision rational number in lowest terms with positive
/// denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, ArithError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn add(&self, other: &Self) -> Self {
        Rational(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Rational(&self.0 - &other.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Rational(&self.0 * &other.0)
    }

    pub fn neg(&self) -> Self {
        Rational(-&self.0)
    }

    pub fn div(&self, other: &Self) -> Result<Self, ArithError> {
        if other.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &other.0))
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut i = 3u64;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 2;
    }
    true
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Residue modulo an odd prime, carrying its modulus so that mixing
/// elements of different fields is caught.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeFieldElement {
    residue: u64,
    modulus: u64,
}

impl PrimeFieldElement {
    pub fn new(value: i64, modulus: u64) -> Result<Self, ArithError> {
        let field = PrimeField::new(modulus)?;
        Ok(PrimeFieldElement { residue: field.from_i64(value) as u64, modulus })
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn check(&self, other: &Self) -> Result<(), ArithError> {
        if self.modulus != other.modulus {
            return Err(ArithError::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, ArithError> {
        self.check(other)?;
        Ok(PrimeFieldElement { residue: (self.residue + other.residue) % self.modulus, modulus: self.modulus })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ArithError> {
        self.check(other)?;
        Ok(PrimeFieldElement {
            residue: (self.residue + self.modulus - other.residue) % self.modulus,
            modulus: self.modulus,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ArithError> {
        self.check(other)?;
        Ok(PrimeFieldElement { residue: (self.residue * other.residue) % self.modulus, modulus: self.modulus })
    }

    pub fn neg(&self) -> Self {
        PrimeFieldElement { residue: (self.modulus - self.residue) % self.modulus, modulus: self.modulus }
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.residue == 0 {
            return Err(ArithError::DivisionByZero);
        }
        let residue = mod_inverse(self.residue, self.modulus).ok_or(ArithError::DivisionByZero)?;
        Ok(PrimeFieldElement { residue, modulus: self.modulus })
    }

    pub fn div(&self, other: &Self) -> Result<Self, ArithError> {
        self.check(other)?;
        self.mul(&other.inv()?)
    }
}

impl fmt::Display for PrimeFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

/// Which coefficient field a computation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientField {
    Rationals,
    PrimeField(u64),
}

impl CoefficientField {
    /// `0` selects the rationals, anything else must be an odd prime.
    pub fn from_modulus(modulus: u64) -> Result<Self, ArithError> {
        if modulus == 0 {
            return Ok(CoefficientField::Rationals);
        }
        PrimeField::new(modulus)?;
        Ok(CoefficientField::PrimeField(modulus))
    }

    pub fn modulus(&self) -> u64 {
        match self {
            CoefficientField::Rationals => 0,
            CoefficientField::PrimeField(p) => *p,
        }
    }
}

impl fmt::Display for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientField::Rationals => write!(f, "QQ"),
            CoefficientField::PrimeField(p) => write!(f, "GF({p})"),
        }
    }
}

/// A coefficient field of characteristic different from 2.
///
/// Elements are plain values; the field object carries whatever context
/// (the modulus) the operations need.
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + Hash + Send + Sync;

    fn tag(&self) -> CoefficientField;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn from_rational(&self, r: &Rational) -> Result<Self::Elem, ArithError>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, ArithError>;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, ArithError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Best rational representative, used for printing.
    fn to_rational(&self, a: &Self::Elem) -> Rational;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rational;

    fn tag(&self) -> CoefficientField {
        CoefficientField::Rationals
    }

    fn zero(&self) -> Rational {
        Rational::zero()
    }

    fn one(&self) -> Rational {
        Rational::one()
    }

    fn from_i64(&self, n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn from_rational(&self, r: &Rational) -> Result<Rational, ArithError> {
        Ok(r.clone())
    }

    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a.add(b)
    }

    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a.sub(b)
    }

    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a.mul(b)
    }

    fn neg(&self, a: &Rational) -> Rational {
        a.neg()
    }

    fn inv(&self, a: &Rational) -> Result<Rational, ArithError> {
        a.inv()
    }

    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }

    fn is_one(&self, a: &Rational) -> bool {
        a.is_one()
    }

    fn to_rational(&self, a: &Rational) -> Rational {
        a.clone()
    }
}

/// The prime field `F_p`, elements stored as residues in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(modulus: u64) -> Result<Self, ArithError> {
        if modulus < 3 || modulus >= (1 << 31) || !is_prime(modulus) {
            return Err(ArithError::InvalidModulus(modulus));
        }
        Ok(PrimeField { p: modulus as u32 })
    }

    pub fn modulus(&self) -> u64 {
        self.p as u64
    }

    pub fn element(&self, residue: u32) -> PrimeFieldElement {
        PrimeFieldElement { residue: (residue % self.p) as u64, modulus: self.p as u64 }
    }

    fn reduce_big(&self, n: &BigInt) -> u32 {
        let p = BigInt::from(self.p);
        n.mod_floor(&p).to_u32().expect("residue fits")
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn tag(&self) -> CoefficientField {
        CoefficientField::PrimeField(self.p as u64)
    }

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1
    }

    fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    fn from_rational(&self, r: &Rational) -> Result<u32, ArithError> {
        let num = self.reduce_big(r.numer());
        let den = self.reduce_big(r.denom());
        if den == 0 {
            return Err(ArithError::NotInvertible(r.denom().to_string(), self.p as u64));
        }
        Ok(self.mul(&num, &self.inv(&den)?))
    }

    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + *b as u64;
        let p = self.p as u64;
        (if s >= p { s - p } else { s }) as u32
    }

    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (*a as u64 + self.p as u64 - *b as u64) as u32
        }
    }

    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }

    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn inv(&self, a: &u32) -> Result<u32, ArithError> {
        if *a == 0 {
            return Err(ArithError::DivisionByZero);
        }
        mod_inverse(*a as u64, self.p as u64).map(|x| x as u32).ok_or(ArithError::DivisionByZero)
    }

    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }

    /// Rational reconstruction: the fraction `n/d` with `|n|, d <= sqrt(p/2)`
    /// congruent to the residue, falling back to the symmetric residue.
    fn to_rational(&self, a: &u32) -> Rational {
        let p = self.p as i64;
        let bound = ((p / 2) as f64).sqrt() as i64;
        let (mut r0, mut r1) = (p, *a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 > bound {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        if t1 != 0 && t1.abs() <= bound {
            let (num, den) = if t1 < 0 { (-r1, -t1) } else { (r1, t1) };
            return Rational::new(num, den).expect("nonzero denominator");
        }
        let v = *a as i64;
        Rational::from_integer(if v > p / 2 { v - p } else { v })
    }
}
