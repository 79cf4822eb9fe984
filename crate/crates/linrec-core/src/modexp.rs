//! `x^n mod gamma` and what it buys for sequences.
//!
//! The remainder of `x^n` by a monic `gamma` encodes the order-`d` shift:
//! `u[n+j] = sum_i rho[i] u[i+j]` for any sequence obeying the recurrence
//! with characteristic polynomial `gamma`. Two routes compute `rho`:
//!
//! * [`modexp_binary`]: square-and-multiply with Newton-quotient reduction,
//!   the classical baseline. Costs one `(d, d)` squaring plus two reduction
//!   products per exponent bit.
//! * [`modexp_new`]: reads the remainder off a window of the reciprocal of
//!   the reversed modulus, computed by the most-significant-bit-first window
//!   descent. Costs one `(d+1, d+1)` squaring and one `(d+1, d)` transposed
//!   product per exponent bit, about a third less than the baseline.
//!
//! On top of `rho`, [`fiduccia_term`] produces a single sequence term and
//! [`new_fiduccia_slice`] a run of `d` consecutive terms for one extra
//! transposed product.

use crate::kernel::{slice_coeff_msb, LinRec, SequenceSlice};
use crate::poly::{poly_degree, poly_reversal, series_inverse, MulEngine};
use crate::ring::Ring;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// A modulus polynomial prepared for exponentiation: made monic, with any
/// power of `x` dividing it split off so the remaining core has an
/// invertible constant term.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusPoly<E> {
    /// Monic, trimmed; length `degree + 1`.
    gamma: Vec<E>,
    /// Multiplicity of the root at zero.
    x_mult: usize,
    /// `gamma / x^x_mult`; monic with `core[0] != 0`.
    core: Vec<E>,
}

impl<E: Clone + PartialEq + core::fmt::Debug> ModulusPoly<E> {
    /// Normalizes by the leading coefficient (which must be invertible) and
    /// requires degree at least 1.
    pub fn new<R: Ring<Elem = E>>(ring: &R, gamma: &[E]) -> Result<Self> {
        let deg = match poly_degree(ring, gamma) {
            Some(deg) if deg >= 1 => deg,
            _ => return Err(Error::DegreeBound("modulus must have degree at least 1")),
        };
        let mut g = gamma[..=deg].to_vec();
        if g[deg] != ring.one() {
            let lc_inv = ring.inv(&g[deg])?;
            for c in g[..deg].iter_mut() {
                *c = ring.mul(c, &lc_inv);
            }
            g[deg] = ring.one();
        }
        let x_mult = g.iter().position(|c| !ring.is_zero(c)).expect("monic polynomial");
        let core = g[x_mult..].to_vec();
        Ok(ModulusPoly { gamma: g, x_mult, core })
    }

    pub fn degree(&self) -> usize {
        self.gamma.len() - 1
    }

    pub fn gamma(&self) -> &[E] {
        &self.gamma
    }
}

/// `x^n mod gamma` as exactly `degree` coefficients, via the window descent.
///
/// For `n >= d`: with `q` the reversed core, the remainder's reversal is
/// `(w * q) mod x^dc` where `w` is the length-`dc` window of `1/q` ending at
/// index `n - x_mult`; a root at zero splits off as a plain shift.
pub fn modexp_new<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    modulus: &ModulusPoly<R::Elem>,
    n: u64,
) -> Result<Vec<R::Elem>> {
    let d = modulus.degree();
    if n < d as u64 {
        let mut out = vec![ring.zero(); d];
        out[n as usize] = ring.one();
        return Ok(out);
    }
    let dc = modulus.core.len() - 1;
    if dc == 0 {
        // gamma = x^d divides x^n
        return Ok(vec![ring.zero(); d]);
    }
    let np = n - modulus.x_mult as u64;
    let q = poly_reversal(ring, &modulus.core, dc)?;
    let w = slice_coeff_msb(ring, engine, &q, np)?;
    let mut vp = engine.mul(ring, &w, &q);
    vp.truncate(dc);
    let rem_core = poly_reversal(ring, &vp, dc - 1)?;
    let mut out = vec![ring.zero(); d];
    for (i, c) in rem_core.iter().enumerate() {
        out[modulus.x_mult + i] = c.clone();
    }
    Ok(out)
}

/// `x^n mod gamma` by square-and-multiply, most significant exponent bit
/// first, reducing each square with precomputed Newton quotients. Returns
/// exactly `degree` coefficients.
pub fn modexp_binary<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    modulus: &ModulusPoly<R::Elem>,
    n: u64,
) -> Result<Vec<R::Elem>> {
    let d = modulus.degree();
    if n < d as u64 {
        let mut out = vec![ring.zero(); d];
        out[n as usize] = ring.one();
        return Ok(out);
    }
    let gamma = modulus.gamma();
    // reciprocal of the reversed modulus, enough for quotients of squares
    let invrev = if d == 1 {
        Vec::new()
    } else {
        let revg = poly_reversal(ring, gamma, d)?;
        series_inverse(ring, engine, &revg, d - 1)?
    };
    let mut r = vec![ring.zero(); d];
    if d == 1 {
        r[0] = ring.neg(&gamma[0]);
    } else {
        r[1] = ring.one();
    }
    let bits = 64 - n.leading_zeros();
    for i in (0..bits - 1).rev() {
        let s = engine.mul(ring, &r, &r);
        r = reduce_by_newton(ring, engine, gamma, &invrev, &s)?;
        if (n >> i) & 1 == 1 {
            r = shift_reduce(ring, gamma, &r);
        }
    }
    Ok(r)
}

/// Remainder of `s` (degree < `2d-1`) by monic `gamma` using the
/// precomputed reciprocal: one `(d-1, d-1)` product for the quotient and one
/// `(d-1, d+1)` product folded back, both truncated.
fn reduce_by_newton<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    gamma: &[R::Elem],
    invrev: &[R::Elem],
    s: &[R::Elem],
) -> Result<Vec<R::Elem>> {
    let d = gamma.len() - 1;
    if d == 1 {
        return Ok(s[..1].to_vec());
    }
    let s_pad = crate::poly::poly_padded(ring, s, 2 * d - 1)?;
    let rev_s: Vec<R::Elem> = s_pad.iter().rev().cloned().collect();
    let mut qrev = engine.mul(ring, &rev_s[..d - 1], invrev);
    qrev.truncate(d - 1);
    qrev.resize(d - 1, ring.zero());
    let quo: Vec<R::Elem> = qrev.into_iter().rev().collect();
    let mut t = engine.mul(ring, &quo, gamma);
    t.truncate(d);
    t.resize(d, ring.zero());
    Ok((0..d).map(|i| ring.sub(&s_pad[i], &t[i])).collect())
}

/// `(x * r) mod gamma` for `r` of length `d`: shift and fold the overflow
/// back with `d` scalar multiplications.
fn shift_reduce<R: Ring>(ring: &R, gamma: &[R::Elem], r: &[R::Elem]) -> Vec<R::Elem> {
    let d = gamma.len() - 1;
    let c = r[d - 1].clone();
    let mut out = vec![ring.zero(); d];
    for i in 1..d {
        out[i] = r[i - 1].clone();
    }
    for i in 0..d {
        let t = ring.mul(&c, &gamma[i]);
        out[i] = ring.sub(&out[i], &t);
    }
    out
}

/// Single term `u[n]` through the remainder weights: `rho = x^n mod gamma`,
/// then one dot product with the starting values. The classical route; pass
/// the remainder computation as a closure-free flag via `use_new`.
pub fn fiduccia_term<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    rec: &LinRec<R::Elem>,
    n: u64,
    use_new: bool,
) -> Result<R::Elem> {
    let d = rec.order();
    if n < d as u64 {
        return Ok(rec.init()[n as usize].clone());
    }
    let gamma = rec.characteristic(ring);
    let modulus = ModulusPoly::new(ring, &gamma)?;
    let rho = if use_new {
        modexp_new(ring, engine, &modulus, n)?
    } else {
        modexp_binary(ring, engine, &modulus, n)?
    };
    let init = rec.init();
    let mut acc = ring.mul(&rho[0], &init[0]);
    for i in 1..d {
        acc = ring.add(&acc, &ring.mul(&rho[i], &init[i]));
    }
    Ok(acc)
}

/// First `n` terms, produced block by block: each block of `d` terms costs
/// one `(d+1, d)` product against the denominator and one `(d, d)` product
/// against the precomputed reciprocal.
pub fn initial_segment<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    rec: &LinRec<R::Elem>,
    n: usize,
) -> Result<Vec<R::Elem>> {
    let d = rec.order();
    if n <= d {
        return Ok(rec.init()[..n].to_vec());
    }
    let f = rec.to_rational(ring, engine)?;
    let recip = series_inverse(ring, engine, f.den(), d)?;
    let mut out = Vec::with_capacity(n + d);
    out.extend_from_slice(rec.init());
    let mut block = rec.init().to_vec();
    while out.len() < n {
        // the series times den vanishes above degree d, which pins each
        // next block to the spillover of den * current block
        let qb = engine.mul(ring, f.den(), &block);
        let spill: Vec<R::Elem> = qb[d..].iter().map(|c| ring.neg(c)).collect();
        let mut nb = engine.mul(ring, &spill, &recip);
        nb.truncate(d);
        nb.resize(d, ring.zero());
        out.extend_from_slice(&nb);
        block = nb;
    }
    out.truncate(n);
    Ok(out)
}

/// First `n` terms by unrolling the recurrence, `O(n * d)` operations.
pub fn initial_segment_naive<R: Ring>(
    ring: &R,
    rec: &LinRec<R::Elem>,
    n: usize,
) -> Vec<R::Elem> {
    let d = rec.order();
    let mut u: Vec<R::Elem> = rec.init()[..d.min(n)].to_vec();
    for k in d..n {
        let mut acc = ring.mul(&rec.coeffs()[0], &u[k - d]);
        for i in 1..d {
            acc = ring.add(&acc, &ring.mul(&rec.coeffs()[i], &u[k - d + i]));
        }
        u.push(acc);
    }
    u
}

/// The `d` terms `u[n], ..., u[n+d-1]`: one remainder `x^n mod gamma`, the
/// first `2d - 1` terms, and a single transposed product combining them.
pub fn new_fiduccia_slice<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    rec: &LinRec<R::Elem>,
    n: u64,
) -> Result<SequenceSlice<R::Elem>> {
    let d = rec.order();
    let gamma = rec.characteristic(ring);
    let modulus = ModulusPoly::new(ring, &gamma)?;
    let rho = modexp_new(ring, engine, &modulus, n)?;
    let head = initial_segment(ring, engine, rec, 2 * d - 1)?;
    // u[n+j] = sum_i rho[i] u[i+j]: a correlation, phrased as the middle
    // window of head * (x^d * rho(1/x))
    let mut mult = vec![ring.zero(); d + 1];
    for i in 1..=d {
        mult[i] = rho[d - i].clone();
    }
    let mut s = head;
    s.resize(2 * d, ring.zero());
    let values = engine.transposed_mul(ring, &mult, &s, d);
    Ok(SequenceSlice { start_index: n as i64, values })
}

/// The `d` terms ending at index `n`: `u[n-d+1], ..., u[n]`, with zeros
/// standing in for negative indices.
pub fn new_fiduccia_slice_ending_at<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    rec: &LinRec<R::Elem>,
    n: u64,
) -> Result<SequenceSlice<R::Elem>> {
    let d = rec.order();
    if n + 1 >= d as u64 {
        return new_fiduccia_slice(ring, engine, rec, n + 1 - d as u64);
    }
    let avail = (n + 1) as usize;
    let head = initial_segment(ring, engine, rec, avail)?;
    let mut values = vec![ring.zero(); d - avail];
    values.extend(head);
    Ok(SequenceSlice { start_index: n as i64 + 1 - d as i64, values })
}
