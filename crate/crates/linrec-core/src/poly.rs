//! Dense polynomial arithmetic over an explicit ring context.
//!
//! Polynomials are coefficient slices in ascending degree order. The empty
//! slice is zero and trailing zeros are allowed; [`poly_degree`] gives the
//! mathematical degree. Products go through [`MulEngine`] so the same
//! algorithm code runs on top of Karatsuba ([`PlainMul`]) or the DFT engine,
//! and so a counting ring observes exactly the operations the chosen engine
//! performs.

use crate::ring::Ring;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Polynomial multiplication strategy.
pub trait MulEngine<R: Ring> {
    /// Full product; output length `a.len() + b.len() - 1` (empty if either
    /// input is empty).
    fn mul(&self, ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem>;

    /// Transposed product: coefficients `m-1 ..= m+n-2` of `a * s`, where
    /// `m = a.len()`. Requires `s.len() == m + n - 1`.
    ///
    /// This is the middle window of the full product, computed (by engines
    /// that override the default) with the operation count of a single
    /// `(m, n)`-shaped product rather than the larger `(m, m+n-1)` one.
    fn transposed_mul(&self, ring: &R, a: &[R::Elem], s: &[R::Elem], n: usize) -> Vec<R::Elem> {
        if n == 0 {
            return Vec::new();
        }
        let m = a.len();
        assert!(s.len() == m + n - 1, "transposed_mul: s has length {}, need {}", s.len(), m + n - 1);
        if m == 0 {
            return vec![ring.zero(); n];
        }
        let full = self.mul(ring, a, s);
        full[m - 1..m - 1 + n].to_vec()
    }
}

/// Schoolbook/Karatsuba engine.
///
/// Shapes with `min(len) <= karatsuba_threshold` multiply schoolbook;
/// larger shapes split at `ceil(max_len / 2)`, three-way when both operands
/// reach past the split point and two-way (on the longer operand) otherwise.
/// The resulting multiplication count is a function of the two lengths alone,
/// exposed as [`PlainMul::mul_count`], which makes counted runs reproducible
/// and lets tests pin exact budgets.
#[derive(Debug, Clone, Copy)]
pub struct PlainMul {
    pub karatsuba_threshold: usize,
}

impl Default for PlainMul {
    fn default() -> Self {
        PlainMul { karatsuba_threshold: 32 }
    }
}

impl PlainMul {
    pub fn new(karatsuba_threshold: usize) -> Self {
        PlainMul { karatsuba_threshold }
    }

    /// Exact number of base multiplications `mul` performs for the given
    /// operand lengths. `transposed_mul` at output length `n` matches
    /// `mul_count(a_len, n)`.
    pub fn mul_count(&self, a_len: usize, b_len: usize) -> u64 {
        count_recursive(self.karatsuba_threshold.max(1), a_len, b_len)
    }
}

fn count_recursive(t: usize, la: usize, lb: usize) -> u64 {
    if la == 0 || lb == 0 {
        return 0;
    }
    let (mx, mn) = (la.max(lb), la.min(lb));
    if mn <= t {
        return la as u64 * lb as u64;
    }
    let h = mx.div_ceil(2);
    if mn <= h {
        count_recursive(t, h, mn) + count_recursive(t, mx - h, mn)
    } else {
        2 * count_recursive(t, h, h) + count_recursive(t, la - h, lb - h)
    }
}

impl<R: Ring> MulEngine<R> for PlainMul {
    fn mul(&self, ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
        kara_mul(ring, a, b, self.karatsuba_threshold.max(1))
    }

    fn transposed_mul(&self, ring: &R, a: &[R::Elem], s: &[R::Elem], n: usize) -> Vec<R::Elem> {
        if n == 0 {
            return Vec::new();
        }
        let m = a.len();
        assert!(s.len() == m + n - 1, "transposed_mul: s has length {}, need {}", s.len(), m + n - 1);
        if m == 0 {
            return vec![ring.zero(); n];
        }
        let rev: Vec<R::Elem> = a.iter().rev().cloned().collect();
        kara_corr(ring, &rev, s, n, self.karatsuba_threshold.max(1))
    }
}

fn schoolbook_mul<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let (la, lb) = (a.len(), b.len());
    let mut out = vec![ring.zero(); la + lb - 1];
    for i in 0..la {
        for j in 0..lb {
            let p = ring.mul(&a[i], &b[j]);
            // first writer of each output slot stores, later ones accumulate
            if i == 0 || j == lb - 1 {
                out[i + j] = p;
            } else {
                out[i + j] = ring.add(&out[i + j], &p);
            }
        }
    }
    out
}

fn kara_mul<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem], t: usize) -> Vec<R::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let (la, lb) = (a.len(), b.len());
    let (mx, mn) = (la.max(lb), la.min(lb));
    if mn <= t {
        return schoolbook_mul(ring, a, b);
    }
    let h = mx.div_ceil(2);
    if mn <= h {
        // only the longer operand reaches past the split point
        let (long, short) = if la >= lb { (a, b) } else { (b, a) };
        let r0 = kara_mul(ring, &long[..h], short, t);
        let r1 = kara_mul(ring, &long[h..], short, t);
        let mut out = vec![ring.zero(); la + lb - 1];
        out[..r0.len()].clone_from_slice(&r0);
        for (i, v) in r1.iter().enumerate() {
            let k = h + i;
            if k < r0.len() {
                out[k] = ring.add(&out[k], v);
            } else {
                out[k] = v.clone();
            }
        }
        return out;
    }
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let c0 = kara_mul(ring, a0, b0, t);
    let c2 = kara_mul(ring, a1, b1, t);
    let sa = padded_add(ring, a0, a1);
    let sb = padded_add(ring, b0, b1);
    let mut c1 = kara_mul(ring, &sa, &sb, t);
    for (i, v) in c0.iter().enumerate() {
        c1[i] = ring.sub(&c1[i], v);
    }
    for (i, v) in c2.iter().enumerate() {
        c1[i] = ring.sub(&c1[i], v);
    }
    let mut out = vec![ring.zero(); la + lb - 1];
    out[..c0.len()].clone_from_slice(&c0);
    out[2 * h..2 * h + c2.len()].clone_from_slice(&c2);
    for (i, v) in c1.iter().enumerate() {
        out[h + i] = ring.add(&out[h + i], v);
    }
    out
}

/// `lo + hi` where `hi` may be shorter; result has `lo`'s length.
fn padded_add<R: Ring>(ring: &R, lo: &[R::Elem], hi: &[R::Elem]) -> Vec<R::Elem> {
    debug_assert!(lo.len() >= hi.len());
    let mut out = lo.to_vec();
    for (o, v) in out.iter_mut().zip(hi.iter()) {
        *o = ring.add(o, v);
    }
    out
}

fn schoolbook_corr<R: Ring>(ring: &R, q: &[R::Elem], s: &[R::Elem], n: usize) -> Vec<R::Elem> {
    let m = q.len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = ring.mul(&q[0], &s[j]);
        for i in 1..m {
            acc = ring.add(&acc, &ring.mul(&q[i], &s[i + j]));
        }
        out.push(acc);
    }
    out
}

/// Correlation `out[j] = sum_i q[i] * s[i+j]`, with the recursion tree of
/// `kara_mul` at shape `(q.len(), n)` mirrored branch for branch, so the two
/// sides perform the same number of base multiplications.
fn kara_corr<R: Ring>(ring: &R, q: &[R::Elem], s: &[R::Elem], n: usize, t: usize) -> Vec<R::Elem> {
    if n == 0 {
        return Vec::new();
    }
    if q.is_empty() {
        return vec![ring.zero(); n];
    }
    let m = q.len();
    debug_assert!(s.len() == m + n - 1);
    let (mx, mn) = (m.max(n), m.min(n));
    if mn <= t {
        return schoolbook_corr(ring, q, s, n);
    }
    let h = mx.div_ceil(2);
    if mn <= h {
        if m >= n {
            // mirror of splitting the longer multiplicand: partial sums
            let r0 = kara_corr(ring, &q[..h], &s[..h + n - 1], n, t);
            let r1 = kara_corr(ring, &q[h..], &s[h..], n, t);
            return r0
                .iter()
                .zip(r1.iter())
                .map(|(x, y)| ring.add(x, y))
                .collect();
        }
        // mirror of splitting the longer product: output halves
        let mut lo = kara_corr(ring, q, &s[..m + h - 1], h, t);
        let hi = kara_corr(ring, q, &s[h..], n - h, t);
        lo.extend(hi);
        return lo;
    }
    let (q0, q1) = q.split_at(h);
    let p = m - h;
    let r = n - h;
    let g0: Vec<R::Elem> = (0..2 * h - 1).map(|i| ring.sub(&s[i], &s[h + i])).collect();
    let c0 = kara_corr(ring, q0, &g0, h, t);
    let sq = padded_add(ring, q0, q1);
    let c1 = kara_corr(ring, &sq, &s[h..3 * h - 1], h, t);
    let g2: Vec<R::Elem> =
        (0..p + r - 1).map(|i| ring.sub(&s[2 * h + i], &s[h + i])).collect();
    let c2 = kara_corr(ring, q1, &g2, r, t);
    let mut out = Vec::with_capacity(n);
    for j in 0..h {
        out.push(ring.add(&c0[j], &c1[j]));
    }
    for j in 0..r {
        out.push(ring.add(&c1[j], &c2[j]));
    }
    out
}

// ---------------------------------------------------------------------------
// Elementwise helpers
// ---------------------------------------------------------------------------

/// Index of the highest nonzero coefficient, `None` for the zero polynomial.
pub fn poly_degree<R: Ring>(ring: &R, a: &[R::Elem]) -> Option<usize> {
    a.iter().rposition(|c| !ring.is_zero(c))
}

/// Equality as polynomials (ignoring trailing zeros).
pub fn polys_equal<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> bool {
    let n = a.len().max(b.len());
    let z = ring.zero();
    (0..n).all(|i| a.get(i).unwrap_or(&z) == b.get(i).unwrap_or(&z))
}

pub fn poly_add<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => ring.add(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect()
}

pub fn poly_sub<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => ring.sub(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => ring.neg(y),
            (None, None) => unreachable!(),
        })
        .collect()
}

pub fn poly_neg<R: Ring>(ring: &R, a: &[R::Elem]) -> Vec<R::Elem> {
    a.iter().map(|c| ring.neg(c)).collect()
}

/// `a(-x)`: negate the odd-degree coefficients.
pub fn poly_alternate<R: Ring>(ring: &R, a: &[R::Elem]) -> Vec<R::Elem> {
    a.iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 0 { c.clone() } else { ring.neg(c) })
        .collect()
}

/// Coefficients of even degree: `a(x) = even(x^2) + x * odd(x^2)`.
pub fn even_part<E: Clone>(a: &[E]) -> Vec<E> {
    a.iter().step_by(2).cloned().collect()
}

/// Coefficients of odd degree.
pub fn odd_part<E: Clone>(a: &[E]) -> Vec<E> {
    a.iter().skip(1).step_by(2).cloned().collect()
}

/// Copy of `a` zero-padded (or verified) to length `n`; errors if `a` has a
/// nonzero coefficient at index `n` or beyond.
pub fn poly_padded<R: Ring>(ring: &R, a: &[R::Elem], n: usize) -> Result<Vec<R::Elem>> {
    if a.len() > n && a[n..].iter().any(|c| !ring.is_zero(c)) {
        return Err(Error::DegreeBound("polynomial longer than its stated bound"));
    }
    let mut out = a[..a.len().min(n)].to_vec();
    out.resize(n, ring.zero());
    Ok(out)
}

/// Reversal with respect to degree `deg`: `out[i] = a[deg - i]`, i.e. the
/// coefficient list of `x^deg * a(1/x)`. Errors if `a` has a nonzero
/// coefficient above `deg`.
pub fn poly_reversal<R: Ring>(ring: &R, a: &[R::Elem], deg: usize) -> Result<Vec<R::Elem>> {
    let padded = poly_padded(ring, a, deg + 1)?;
    Ok(padded.into_iter().rev().collect())
}

/// Horner evaluation.
pub fn poly_eval<R: Ring>(ring: &R, a: &[R::Elem], x: &R::Elem) -> R::Elem {
    let mut acc = ring.zero();
    for c in a.iter().rev() {
        acc = ring.add(&ring.mul(&acc, x), c);
    }
    acc
}

// ---------------------------------------------------------------------------
// Products with windows, division, series
// ---------------------------------------------------------------------------

/// Coefficients `d ..= 2d-1` of `q * s` for `deg q <= d` and `deg s <= 2d-1`,
/// at the cost of one `(d+1, d)`-shaped transposed product.
pub fn poly_middle_product<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    q: &[R::Elem],
    s: &[R::Elem],
    d: usize,
) -> Result<Vec<R::Elem>> {
    if d == 0 {
        return Ok(Vec::new());
    }
    let q_pad = poly_padded(ring, q, d + 1)?;
    let s_pad = poly_padded(ring, s, 2 * d)?;
    Ok(engine.transposed_mul(ring, &q_pad, &s_pad, d))
}

/// Euclidean division: `num = quo * den + rem` with `deg rem < deg den`.
/// The divisor's leading coefficient must be invertible. Schoolbook; this is
/// the reference the faster reductions are tested against.
pub fn poly_divrem<R: Ring>(
    ring: &R,
    num: &[R::Elem],
    den: &[R::Elem],
) -> Result<(Vec<R::Elem>, Vec<R::Elem>)> {
    let dd = poly_degree(ring, den).ok_or(Error::DivisionByZero)?;
    let lc_inv = ring.inv(&den[dd])?;
    let mut rem = num.to_vec();
    let nd = match poly_degree(ring, &rem) {
        Some(nd) if nd >= dd => nd,
        _ => {
            rem.resize(dd.max(rem.len()), ring.zero());
            rem.truncate(dd.max(1));
            return Ok((Vec::new(), rem));
        }
    };
    let mut quo = vec![ring.zero(); nd - dd + 1];
    for k in (dd..=nd).rev() {
        let c = ring.mul(&rem[k], &lc_inv);
        quo[k - dd] = c.clone();
        for i in 0..dd {
            let t = ring.mul(&c, &den[i]);
            rem[k - dd + i] = ring.sub(&rem[k - dd + i], &t);
        }
        rem[k] = ring.zero();
    }
    rem.truncate(dd.max(1));
    Ok((quo, rem))
}

/// Newton iteration for `1/q mod x^n`; requires `q[0]` invertible.
///
/// Precision doubles each round; the round at precision `p` costs one
/// `(min(q.len(), 2p), p)` product and one `(p, p)` product, both through the
/// supplied engine.
pub fn series_inverse<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    q: &[R::Elem],
    n: usize,
) -> Result<Vec<R::Elem>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if q.is_empty() {
        return Err(Error::DivisionByZero);
    }
    let mut t = vec![ring.inv(&q[0])?];
    let mut prec = 1usize;
    while prec < n {
        let next = (2 * prec).min(n);
        let q_low = &q[..q.len().min(next)];
        let mut qt = engine.mul(ring, q_low, &t);
        qt.truncate(next);
        // q*t = 1 mod x^prec by induction, so only the high part corrects
        let e_hi = &qt[prec.min(qt.len())..];
        let mut delta = engine.mul(ring, &t, e_hi);
        delta.truncate(next - prec);
        for v in &delta {
            t.push(ring.neg(v));
        }
        t.resize(next, ring.zero());
        prec = next;
    }
    Ok(t)
}

/// First `n` power-series coefficients of `num / den` by the quadratic
/// recurrence; requires `den[0]` invertible. Reference for the block and
/// kernel routes.
pub fn series_expand<R: Ring>(
    ring: &R,
    num: &[R::Elem],
    den: &[R::Elem],
    n: usize,
) -> Result<Vec<R::Elem>> {
    if den.is_empty() {
        return Err(Error::DivisionByZero);
    }
    let inv0 = ring.inv(&den[0])?;
    let mut u: Vec<R::Elem> = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = if k < num.len() { num[k].clone() } else { ring.zero() };
        for i in 1..=k.min(den.len() - 1) {
            acc = ring.sub(&acc, &ring.mul(&den[i], &u[k - i]));
        }
        u.push(ring.mul(&acc, &inv0));
    }
    Ok(u)
}
