//! Number-theoretic transforms over prime fields with power-of-two roots.
//!
//! Values follow the evaluation convention `vals[y] = A(w^-y)` for `w` a
//! root of unity of the grid order. On top of forward/inverse transforms the
//! plan supports moving between grid sizes without leaving value space:
//! [`DftPlan::dft_double`] refines an order-`n` value vector to order `2n`,
//! and the two halving routines drop to the order-`n/2` values of the even
//! and odd coefficient parts. Together these let iteration run entirely on
//! values.
//!
//! Twiddle tables are precomputed with raw modular arithmetic when the plan
//! is built. Per-call work goes through the ring handle, so a counting ring
//! sees exactly the online multiplications: `n/2 * log n` for a transform of
//! size `n` (every butterfly is counted, including trivial twiddles), plus
//! `n` scaling steps for the inverse.

use crate::poly::MulEngine;
use crate::ring::{inv_mod_u64, pow_mod_u64, NttRing};
use crate::{Error, Result};
use alloc::vec::Vec;

/// Smallest `k` with `2^k >= len` (0 for `len <= 1`).
pub fn min_k_for_len(len: usize) -> u32 {
    if len <= 1 {
        0
    } else {
        usize::BITS - (len - 1).leading_zeros()
    }
}

/// Precomputed twiddle tables for transforms up to size `2^max_k`.
#[derive(Debug, Clone)]
pub struct DftPlan {
    modulus: u64,
    max_k: u32,
    /// `tw_neg[i] = w^-i` for `w` of order `2^max_k`, `i < 2^(max_k-1)`.
    tw_neg: Vec<u64>,
    tw_pos: Vec<u64>,
    /// `inv_len[k] = (2^k)^-1 mod p`.
    inv_len: Vec<u64>,
    inv2: u64,
    /// `up_tw[k][i] = w_{2^(k+1)}^-i * inv(2^k)`, the combined twiddle for
    /// refining an order-`2^k` value vector.
    up_tw: Vec<Vec<u64>>,
    /// `halve_odd_tw[k][y] = w_{2^k}^(+y) * inv(2)`.
    halve_odd_tw: Vec<Vec<u64>>,
}

impl DftPlan {
    pub fn new<R: NttRing>(ring: &R, max_k: u32) -> Result<Self> {
        let p = ring.modulus();
        if max_k > ring.two_adicity() {
            return Err(Error::NoRootOfOrder { k: max_k, modulus: p });
        }
        let inv2 = inv_mod_u64(2 % p, p).ok_or(Error::NoRootOfOrder { k: 1, modulus: p })?;
        // root of order exactly 2^max_k
        let w = pow_mod_u64(ring.two_adic_root(), 1 << (ring.two_adicity() - max_k), p);
        let w_inv = inv_mod_u64(w, p).ok_or(Error::NotInvertible)?;
        let half = 1usize << max_k.saturating_sub(1);
        let mut tw_neg = Vec::with_capacity(half);
        let mut tw_pos = Vec::with_capacity(half);
        let (mut an, mut ap) = (1u64, 1u64);
        for _ in 0..half {
            tw_neg.push(an);
            tw_pos.push(ap);
            an = ((an as u128 * w_inv as u128) % p as u128) as u64;
            ap = ((ap as u128 * w as u128) % p as u128) as u64;
        }
        let inv_len: Vec<u64> = (0..=max_k)
            .map(|k| inv_mod_u64(pow_mod_u64(2, k as u64, p), p).unwrap())
            .collect();
        let mut up_tw = Vec::with_capacity(max_k as usize);
        for k in 0..max_k {
            let n = 1usize << k;
            // w2 has order 2^(k+1)
            let w2 = pow_mod_u64(w, 1u64 << (max_k - k - 1), p);
            let w2_inv = inv_mod_u64(w2, p).unwrap();
            let mut row = Vec::with_capacity(n);
            let mut acc = inv_len[k as usize];
            for _ in 0..n {
                row.push(acc);
                acc = ((acc as u128 * w2_inv as u128) % p as u128) as u64;
            }
            up_tw.push(row);
        }
        let mut halve_odd_tw = Vec::with_capacity(max_k as usize + 1);
        halve_odd_tw.push(Vec::new());
        for k in 1..=max_k {
            let h = 1usize << (k - 1);
            let wk = pow_mod_u64(w, 1u64 << (max_k - k), p);
            let mut row = Vec::with_capacity(h);
            let mut acc = inv2;
            for _ in 0..h {
                row.push(acc);
                acc = ((acc as u128 * wk as u128) % p as u128) as u64;
            }
            halve_odd_tw.push(row);
        }
        Ok(DftPlan { modulus: p, max_k, tw_neg, tw_pos, inv_len, inv2, up_tw, halve_odd_tw })
    }

    pub fn max_k(&self) -> u32 {
        self.max_k
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn check<R: NttRing>(&self, ring: &R, k: u32) -> Result<()> {
        if ring.modulus() != self.modulus {
            return Err(Error::ContextMismatch {
                plan_modulus: self.modulus,
                ring_modulus: ring.modulus(),
            });
        }
        if k > self.max_k {
            return Err(Error::TransformTooLarge { need_k: k, plan_k: self.max_k });
        }
        Ok(())
    }

    /// In-place decimation-in-time transform of size `2^k`. With the negative
    /// table this evaluates `v[y] = A(w^-y)`; the positive table gives the
    /// unscaled inverse.
    fn transform<R: NttRing>(&self, ring: &R, v: &mut [u64], k: u32, positive: bool) {
        let n = v.len();
        debug_assert_eq!(n, 1usize << k);
        bit_reverse_permute(v);
        let tws = if positive { &self.tw_pos } else { &self.tw_neg };
        for lk in 1..=k {
            let len = 1usize << lk;
            let half = len >> 1;
            let stride = 1usize << (self.max_k - lk);
            for start in (0..n).step_by(len) {
                for j in 0..half {
                    let w = tws[j * stride];
                    let t = ring.mul(&v[start + j + half], &w);
                    let u = v[start + j];
                    v[start + j] = ring.add(&u, &t);
                    v[start + j + half] = ring.sub(&u, &t);
                }
            }
        }
    }

    /// Values `A(w^-y)` of a polynomial with `deg A < 2^k` on the order-`2^k`
    /// grid. Costs `2^(k-1) * k` multiplications.
    pub fn dft_forward<R: NttRing>(&self, ring: &R, a: &[u64], k: u32) -> Result<Vec<u64>> {
        self.check(ring, k)?;
        let n = 1usize << k;
        if a.len() > n {
            return Err(Error::DegreeBound("polynomial does not fit the transform size"));
        }
        let mut v = a.to_vec();
        v.resize(n, 0);
        self.transform(ring, &mut v, k, false);
        Ok(v)
    }

    /// Coefficients from values; costs `2^(k-1) * k + 2^k` multiplications.
    pub fn dft_inverse<R: NttRing>(&self, ring: &R, vals: &[u64], k: u32) -> Result<Vec<u64>> {
        self.check(ring, k)?;
        assert_eq!(vals.len(), 1usize << k, "dft_inverse: wrong value count");
        let mut v = vals.to_vec();
        self.transform(ring, &mut v, k, true);
        let s = self.inv_len[k as usize];
        for x in v.iter_mut() {
            *x = ring.mul(x, &s);
        }
        Ok(v)
    }

    /// Refine order-`2^k` values of `A` (with `deg A < 2^k`) to the
    /// order-`2^(k+1)` grid. Even positions of the result are the input
    /// values; odd positions are freshly computed. Costs
    /// `2^k * k + 2^k` multiplications: one unscaled inverse, a combined
    /// scale-and-twist pass, and one forward transform.
    pub fn dft_double<R: NttRing>(&self, ring: &R, vals: &[u64], k: u32) -> Result<Vec<u64>> {
        self.check(ring, k + 1)?;
        let n = 1usize << k;
        assert_eq!(vals.len(), n, "dft_double: wrong value count");
        let mut c = vals.to_vec();
        self.transform(ring, &mut c, k, true);
        let tw = &self.up_tw[k as usize];
        for i in 0..n {
            c[i] = ring.mul(&c[i], &tw[i]);
        }
        self.transform(ring, &mut c, k, false);
        let mut out = Vec::with_capacity(2 * n);
        for y in 0..n {
            out.push(vals[y]);
            out.push(c[y]);
        }
        Ok(out)
    }

    /// Order-`2^(k-1)` values of the even part `E`, where
    /// `A(x) = E(x^2) + x * O(x^2)`. Costs `2^(k-1)` multiplications.
    pub fn dft_halve_even<R: NttRing>(&self, ring: &R, vals: &[u64], k: u32) -> Result<Vec<u64>> {
        self.check(ring, k)?;
        if k == 0 {
            return Err(Error::HalveTooShort);
        }
        let n = 1usize << k;
        assert_eq!(vals.len(), n, "dft_halve_even: wrong value count");
        let h = n >> 1;
        Ok((0..h)
            .map(|y| ring.mul(&ring.add(&vals[y], &vals[y + h]), &self.inv2))
            .collect())
    }

    /// Order-`2^(k-1)` values of the odd part `O`. Costs `2^(k-1)`
    /// multiplications through the combined twiddle table.
    pub fn dft_halve_odd<R: NttRing>(&self, ring: &R, vals: &[u64], k: u32) -> Result<Vec<u64>> {
        self.check(ring, k)?;
        if k == 0 {
            return Err(Error::HalveTooShort);
        }
        let n = 1usize << k;
        assert_eq!(vals.len(), n, "dft_halve_odd: wrong value count");
        let h = n >> 1;
        let tw = &self.halve_odd_tw[k as usize];
        Ok((0..h)
            .map(|y| ring.mul(&ring.sub(&vals[y], &vals[y + h]), &tw[y]))
            .collect())
    }

    /// Full product via three transforms; costs
    /// `3 * 2^(k-1) * k + 2^(k+1)` multiplications for the padded size `2^k`.
    pub fn fft_poly_mul<R: NttRing>(&self, ring: &R, a: &[u64], b: &[u64]) -> Result<Vec<u64>> {
        if a.is_empty() || b.is_empty() {
            return Ok(Vec::new());
        }
        let out_len = a.len() + b.len() - 1;
        let k = min_k_for_len(out_len);
        let va = self.dft_forward(ring, a, k)?;
        let vb = self.dft_forward(ring, b, k)?;
        let prod: Vec<u64> = va.iter().zip(vb.iter()).map(|(x, y)| ring.mul(x, y)).collect();
        let mut out = self.dft_inverse(ring, &prod, k)?;
        out.truncate(out_len);
        Ok(out)
    }
}

/// Values of `A(-x)` on the same grid: negating the argument rotates the
/// grid by half an order, so this is a pure index shuffle.
pub fn dft_alternate(vals: &[u64]) -> Vec<u64> {
    let n = vals.len();
    debug_assert!(n.is_power_of_two());
    let h = n >> 1;
    (0..n).map(|y| vals[y ^ h]).collect()
}

fn bit_reverse_permute(v: &mut [u64]) {
    let n = v.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            v.swap(i, j);
        }
    }
}

/// Multiplication engine backed by a transform plan.
///
/// Panics if the plan was built for a different modulus or is too small for
/// a requested product; size the plan from the largest product up front.
#[derive(Debug, Clone, Copy)]
pub struct NttMul<'p> {
    plan: &'p DftPlan,
}

impl<'p> NttMul<'p> {
    pub fn new(plan: &'p DftPlan) -> Self {
        NttMul { plan }
    }
}

impl<'p, R: NttRing> MulEngine<R> for NttMul<'p> {
    fn mul(&self, ring: &R, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.plan.fft_poly_mul(ring, a, b).expect("NttMul: plan does not cover this product")
    }
}
