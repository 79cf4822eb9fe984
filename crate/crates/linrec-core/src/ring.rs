//! Ring contexts: prime fields, `Z/m`, arbitrary-precision integers, and a
//! counting wrapper that tallies ring operations.
//!
//! All arithmetic is phrased against an explicit context value implementing
//! [`Ring`]; elements themselves are plain data (a `u64` residue, a `BigInt`).
//! Passing the context explicitly keeps elements cheap, makes it impossible to
//! mix residues from different moduli through this API, and lets the counting
//! wrapper observe every operation without changing element representation.

use crate::{Error, Result};
use alloc::vec::Vec;
use core::cell::Cell;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// A commutative ring with explicit context.
///
/// `inv` is partial: rings report [`Error::NotInvertible`] for elements
/// without an inverse (everything except `+-1` over the integers, residues
/// sharing a factor with the modulus over `Z/m`).
pub trait Ring {
    type Elem: Clone + PartialEq + core::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn from_i64(&self, v: i64) -> Self::Elem;

    /// Repeated squaring; counts as the multiplications it performs.
    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

/// Marker for rings in which every nonzero element is invertible.
///
/// Only fields support the Hessenberg reduction in [`crate::apps`]; requiring
/// the marker keeps that failure mode at compile time instead of deep inside
/// an elimination loop.
pub trait Field: Ring {}

/// Prime fields that expose power-of-two roots of unity for the DFT layer.
pub trait NttRing: Ring<Elem = u64> {
    fn modulus(&self) -> u64;
    /// Largest `k` such that the multiplicative group has an element of order `2^k`.
    fn two_adicity(&self) -> u32;
    /// A fixed element of order exactly `2^two_adicity()`.
    fn two_adic_root(&self) -> u64;
}

// ---------------------------------------------------------------------------
// u64 modular helpers (shared by Z/m, prime fields, and DFT plan construction)
// ---------------------------------------------------------------------------

#[inline]
pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    acc
}

/// Modular inverse by extended Euclid; works for any modulus, not just primes.
pub(crate) fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        let tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        let tmp = old_s - q * s;
        old_s = s;
        s = tmp;
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for 64-bit inputs.
///
/// The witness set 2..37 is known to be exact for n < 3.3 * 10^24, which
/// covers the whole u64 range.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// ---------------------------------------------------------------------------
// Z/m for arbitrary m
// ---------------------------------------------------------------------------

/// The ring `Z/m` for an arbitrary modulus `2 <= m < 2^63`.
///
/// Elements are canonical residues in `[0, m)`. `m` does not have to be
/// prime; inversion uses the extended Euclidean algorithm and fails exactly
/// on residues sharing a factor with `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModRing {
    m: u64,
}

impl ModRing {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 || m >= 1 << 63 {
            return Err(Error::InvalidModulus(m));
        }
        Ok(ModRing { m })
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// Canonical residue of an arbitrary-precision integer.
    pub fn reduce_bigint(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.m);
        let mut r = v % &m;
        if r.is_negative() {
            r += &m;
        }
        let (_, digits) = r.to_u64_digits();
        digits.first().copied().unwrap_or(0)
    }
}

impl Ring for ModRing {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.m
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.m - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod_u64(*a, *b, self.m)
    }
    fn inv(&self, a: &u64) -> Result<u64> {
        inv_mod_u64(*a, self.m).ok_or(Error::NotInvertible)
    }
    fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.m as i128) as u64
    }
}

// ---------------------------------------------------------------------------
// Prime field with two-adic root data
// ---------------------------------------------------------------------------

/// A prime field `F_p` for `p < 2^63`, carrying the two-adic root data the
/// DFT layer needs.
///
/// Construction verifies primality (Miller-Rabin with the deterministic
/// 64-bit witness set) and finds an element of order `2^s` where
/// `s = v_2(p - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    ring: ModRing,
    two_adicity: u32,
    root: u64,
}

/// The default modulus: `998244353 = 119 * 2^23 + 1`, two-adicity 23.
pub const DEFAULT_PRIME: u64 = 998_244_353;

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        let ring = ModRing::new(p)?;
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Ok(PrimeField { ring, two_adicity: 0, root: 1 });
        }
        let s = (p - 1).trailing_zeros();
        let odd = (p - 1) >> s;
        // Any quadratic nonresidue raised to the odd cofactor has order 2^s.
        let mut g = 2u64;
        let root = loop {
            if pow_mod_u64(g, (p - 1) / 2, p) == p - 1 {
                break pow_mod_u64(g, odd, p);
            }
            g += 1;
        };
        Ok(PrimeField { ring, two_adicity: s, root })
    }

    pub fn reduce_bigint(&self, v: &BigInt) -> u64 {
        self.ring.reduce_bigint(v)
    }
}

impl Ring for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        self.ring.add(a, b)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        self.ring.sub(a, b)
    }
    fn neg(&self, a: &u64) -> u64 {
        self.ring.neg(a)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.ring.mul(a, b)
    }
    fn inv(&self, a: &u64) -> Result<u64> {
        self.ring.inv(a)
    }
    fn from_i64(&self, v: i64) -> u64 {
        self.ring.from_i64(v)
    }
}

impl Field for PrimeField {}

impl NttRing for PrimeField {
    fn modulus(&self) -> u64 {
        self.ring.m
    }
    fn two_adicity(&self) -> u32 {
        self.two_adicity
    }
    fn two_adic_root(&self) -> u64 {
        self.root
    }
}

// ---------------------------------------------------------------------------
// Arbitrary-precision integers
// ---------------------------------------------------------------------------

/// The ring of integers with `BigInt` elements. Only `+-1` are invertible.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BigIntRing;

impl Ring for BigIntRing {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn inv(&self, a: &BigInt) -> Result<BigInt> {
        if a.is_one() || (-a).is_one() {
            Ok(a.clone())
        } else {
            Err(Error::NotInvertible)
        }
    }
    fn from_i64(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }
}

// ---------------------------------------------------------------------------
// Operation counting
// ---------------------------------------------------------------------------

/// A snapshot of operation totals. Counters are monotone; subtract snapshots
/// to get the cost of a region.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub mul_count: u64,
    pub add_count: u64,
    pub inv_count: u64,
}

impl core::ops::Sub for OpCounter {
    type Output = OpCounter;
    fn sub(self, rhs: OpCounter) -> OpCounter {
        OpCounter {
            mul_count: self.mul_count - rhs.mul_count,
            add_count: self.add_count - rhs.add_count,
            inv_count: self.inv_count - rhs.inv_count,
        }
    }
}

/// Transparent counting wrapper around any ring.
///
/// Multiplications, additions (including subtraction and negation), and
/// inversions are tallied separately; results are bit-identical to the inner
/// ring because every operation delegates. Counters use `Cell`, so a counting
/// context belongs to one thread; the plain contexts it wraps stay shareable.
#[derive(Debug, Default)]
pub struct CountingRing<R> {
    inner: R,
    muls: Cell<u64>,
    adds: Cell<u64>,
    invs: Cell<u64>,
}

impl<R> CountingRing<R> {
    pub fn new(inner: R) -> Self {
        CountingRing { inner, muls: Cell::new(0), adds: Cell::new(0), invs: Cell::new(0) }
    }

    pub fn inner(&self) -> &R {
        &self.inner
    }

    pub fn snapshot(&self) -> OpCounter {
        OpCounter {
            mul_count: self.muls.get(),
            add_count: self.adds.get(),
            inv_count: self.invs.get(),
        }
    }

    pub fn reset(&self) {
        self.muls.set(0);
        self.adds.set(0);
        self.invs.set(0);
    }
}

impl<R: Ring> Ring for CountingRing<R> {
    type Elem = R::Elem;

    fn zero(&self) -> R::Elem {
        self.inner.zero()
    }
    fn one(&self) -> R::Elem {
        self.inner.one()
    }
    fn is_zero(&self, a: &R::Elem) -> bool {
        self.inner.is_zero(a)
    }
    fn add(&self, a: &R::Elem, b: &R::Elem) -> R::Elem {
        self.adds.set(self.adds.get() + 1);
        self.inner.add(a, b)
    }
    fn sub(&self, a: &R::Elem, b: &R::Elem) -> R::Elem {
        self.adds.set(self.adds.get() + 1);
        self.inner.sub(a, b)
    }
    fn neg(&self, a: &R::Elem) -> R::Elem {
        self.adds.set(self.adds.get() + 1);
        self.inner.neg(a)
    }
    fn mul(&self, a: &R::Elem, b: &R::Elem) -> R::Elem {
        self.muls.set(self.muls.get() + 1);
        self.inner.mul(a, b)
    }
    fn inv(&self, a: &R::Elem) -> Result<R::Elem> {
        self.invs.set(self.invs.get() + 1);
        self.inner.inv(a)
    }
    fn from_i64(&self, v: i64) -> R::Elem {
        self.inner.from_i64(v)
    }
}

impl<R: Field> Field for CountingRing<R> {}

impl<R: NttRing> NttRing for CountingRing<R> {
    fn modulus(&self) -> u64 {
        self.inner.modulus()
    }
    fn two_adicity(&self) -> u32 {
        self.inner.two_adicity()
    }
    fn two_adic_root(&self) -> u64 {
        self.inner.two_adic_root()
    }
}

/// Convenience: reduce a `Vec` of signed constants into any ring.
pub fn elems_from_i64<R: Ring>(ring: &R, vs: &[i64]) -> Vec<R::Elem> {
    vs.iter().map(|&v| ring.from_i64(v)).collect()
}
