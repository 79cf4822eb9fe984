//! Single coefficients and slices of rational power series.
//!
//! A sequence satisfying a linear recurrence of order `d` has generating
//! series `P(x)/Q(x)` with `deg P < d`, `deg Q <= d` and `Q(0)` invertible.
//! The key step behind every fast route here: with `A(x^2) = Q(x)Q(-x)`,
//!
//! ```text
//! [x^n] P(x)/Q(x) = [x^(n/2)]     even(P * alt(Q)) / A   (n even)
//!                 = [x^((n-1)/2)] odd(P * alt(Q))  / A   (n odd)
//! ```
//!
//! so one coefficient at index `n` needs `ceil(log2(n+1))` halving steps of
//! two size-`d` products each. The same contraction read in the other
//! direction recovers a window of `d` consecutive coefficients of `1/Q` from
//! a window at the halved index, one transposed product per level.
//!
//! Storage sizes are pinned: numerators stay at `d` coefficients and
//! denominators at `d + 1` through every step, so operation counts depend
//! only on `(d, n)` and never on coefficient values.

use crate::poly::{
    even_part, odd_part, poly_alternate, poly_degree, poly_middle_product, poly_padded,
    MulEngine,
};
use crate::ntt::{min_k_for_len, DftPlan};
use crate::ring::{NttRing, Ring};
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Largest admissible index; computations address `2n` internally.
const MAX_INDEX: u64 = 1 << 63;

fn check_index(n: u64) -> Result<()> {
    if n >= MAX_INDEX {
        return Err(Error::IndexOutOfRange(n));
    }
    Ok(())
}

/// A rational series `num/den` in fixed-size storage: `num` holds exactly
/// `d` coefficients and `den` exactly `d + 1`, where `d >= 1` is the order.
/// `den[0]` must be invertible.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSeries<E> {
    num: Vec<E>,
    den: Vec<E>,
}

impl<E: Clone + PartialEq + core::fmt::Debug> RationalSeries<E> {
    /// `den` fixes the order as `den.len() - 1`; `num` may be shorter and is
    /// padded. Rejects `deg num >= d` and non-invertible `den[0]`.
    pub fn new<R: Ring<Elem = E>>(ring: &R, num: &[E], den: &[E]) -> Result<Self> {
        if den.len() < 2 {
            return Err(Error::EmptyInput("denominator needs degree at least 1"));
        }
        ring.inv(&den[0])?;
        let d = den.len() - 1;
        let num = poly_padded(ring, num, d)?;
        Ok(RationalSeries { num, den: den.to_vec() })
    }

    pub fn order(&self) -> usize {
        self.den.len() - 1
    }

    pub fn num(&self) -> &[E] {
        &self.num
    }

    pub fn den(&self) -> &[E] {
        &self.den
    }
}

/// A linear recurrence `u[n+d] = coeffs[d-1] u[n+d-1] + ... + coeffs[0] u[n]`
/// with the `d` starting values `init`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinRec<E> {
    coeffs: Vec<E>,
    init: Vec<E>,
}

impl<E: Clone + PartialEq + core::fmt::Debug> LinRec<E> {
    pub fn new(coeffs: &[E], init: &[E]) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyInput("recurrence needs order at least 1"));
        }
        if init.len() != coeffs.len() {
            return Err(Error::DegreeBound("initial values must match the recurrence order"));
        }
        Ok(LinRec { coeffs: coeffs.to_vec(), init: init.to_vec() })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn init(&self) -> &[E] {
        &self.init
    }

    /// Monic characteristic polynomial `x^d - coeffs[d-1] x^(d-1) - ...`.
    pub fn characteristic<R: Ring<Elem = E>>(&self, ring: &R) -> Vec<E> {
        let mut g: Vec<E> = self.coeffs.iter().map(|c| ring.neg(c)).collect();
        g.push(ring.one());
        g
    }

    /// Generating series: `den` is the reversed characteristic polynomial
    /// (so `den[0] = 1`), `num = (init * den) mod x^d`.
    pub fn to_rational<R: Ring<Elem = E>, M: MulEngine<R>>(
        &self,
        ring: &R,
        engine: &M,
    ) -> Result<RationalSeries<E>> {
        let d = self.order();
        let gamma = self.characteristic(ring);
        let den: Vec<E> = gamma.into_iter().rev().collect();
        let mut num = engine.mul(ring, &self.init, &den);
        num.truncate(d);
        RationalSeries::new(ring, &num, &den)
    }
}

/// A run of consecutive terms; `values[j]` is the term at index
/// `start_index + j`. Negative indices only appear as leading zero padding.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSlice<E> {
    pub start_index: i64,
    pub values: Vec<E>,
}

/// Which coefficient half survives a contraction step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: u64) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// One contraction step: maps `(p, q)` for index `n` to the pair for index
/// `n/2` (even) or `(n-1)/2` (odd). `p` must hold `d` coefficients and `q`
/// exactly `d + 1`; the output keeps those sizes. Costs one `(d, d+1)` and
/// one `(d+1, d+1)` product.
pub fn graeffe_step<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    p: &[R::Elem],
    q: &[R::Elem],
    parity: Parity,
) -> (Vec<R::Elem>, Vec<R::Elem>) {
    debug_assert!(!q.is_empty() && p.len() + 1 == q.len());
    let q_alt = poly_alternate(ring, q);
    let u = engine.mul(ring, p, &q_alt);
    let p_next = match parity {
        Parity::Even => even_part(&u),
        Parity::Odd => odd_part(&u),
    };
    let a = engine.mul(ring, q, &q_alt);
    let q_next = even_part(&a);
    debug_assert!(p_next.len() == p.len() && q_next.len() == q.len());
    (p_next, q_next)
}

/// `[x^n] f`, halving the index until it reaches zero. Also reports the
/// number of contraction steps taken, which is `ceil(log2(n+1))`.
pub fn one_coeff_lsb_traced<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    f: &RationalSeries<R::Elem>,
    n: u64,
) -> Result<(R::Elem, u32)> {
    check_index(n)?;
    let mut p = f.num().to_vec();
    let mut q = f.den().to_vec();
    let mut m = n;
    let mut steps = 0u32;
    while m >= 1 {
        let (np, nq) = graeffe_step(ring, engine, &p, &q, Parity::of(m));
        p = np;
        q = nq;
        m /= 2;
        steps += 1;
    }
    let inv0 = ring.inv(&q[0])?;
    Ok((ring.mul(&p[0], &inv0), steps))
}

/// `[x^n] f` by index halving (least significant bit first).
pub fn one_coeff_lsb<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    f: &RationalSeries<R::Elem>,
    n: u64,
) -> Result<R::Elem> {
    one_coeff_lsb_traced(ring, engine, f, n).map(|(c, _)| c)
}

/// `u_n` of the recurrence, by contraction on its generating series.
///
/// Indices below the order come straight from the initial values. The
/// constructed denominator always has constant term 1, so over the integers
/// the final division is by 1 and the routine never leaves the ring; a zero
/// trailing recurrence coefficient only drops the denominator degree, which
/// the series tracks explicitly.
pub fn one_term<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    rec: &LinRec<R::Elem>,
    n: u64,
) -> Result<R::Elem> {
    check_index(n)?;
    if (n as usize) < rec.order() {
        return Ok(rec.init()[n as usize].clone());
    }
    let f = rec.to_rational(ring, engine)?;
    one_coeff_lsb(ring, engine, &f, n)
}

/// The window `[x^(n-d+1) ..= x^n] (1/den)` as `d` values (indices below
/// zero read as zero). `den` must have `d + 1` coefficients, `d >= 1`, and
/// an invertible constant term.
///
/// Descends most significant bit first: `ceil(log2(n+1))` denominator
/// squarings going down, and one `(d+1, d)` transposed product per level
/// coming back up, expanding the window at the halved index through
/// `1/q = alt(q) / a(x^2)`.
pub fn slice_coeff_msb<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    den: &[R::Elem],
    n: u64,
) -> Result<Vec<R::Elem>> {
    slice_coeff_msb_with(ring, engine, den, n, true)
}

/// `slice_coeff_msb` with the middle product switchable off: the plain
/// variant computes the full `(d+1) x (2d)` product on each ascent and
/// discards all but the middle window, which costs roughly half again as
/// much. Kept selectable so the gap stays measurable.
pub fn slice_coeff_msb_with<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    den: &[R::Elem],
    n: u64,
    middle_product: bool,
) -> Result<Vec<R::Elem>> {
    check_index(n)?;
    if den.len() < 2 {
        return Err(Error::EmptyInput("denominator needs degree at least 1"));
    }
    let d = den.len() - 1;
    let mut levels: Vec<Vec<R::Elem>> = Vec::new();
    let mut q = den.to_vec();
    let mut m = n;
    while m >= 1 {
        levels.push(q.clone());
        let q_alt = poly_alternate(ring, &q);
        let a = engine.mul(ring, &q, &q_alt);
        q = even_part(&a);
        m /= 2;
    }
    // window ending at index 0: everything below the constant term is zero
    let inv0 = ring.inv(&q[0])?;
    let mut w = vec![ring.zero(); d];
    w[d - 1] = inv0;
    for (i, qi) in levels.iter().enumerate().rev() {
        // spread the halved-index window onto the doubled grid ...
        let mut s = vec![ring.zero(); 2 * d];
        let offset = match Parity::of(n >> i) {
            Parity::Even => 1,
            Parity::Odd => 0,
        };
        for (j, val) in w.iter().enumerate() {
            s[2 * j + offset] = val.clone();
        }
        // ... and convolve with alt(q) to land on the full-index window
        let q_alt = poly_alternate(ring, qi);
        w = if middle_product {
            poly_middle_product(ring, engine, &q_alt, &s, d)?
        } else {
            let full = engine.mul(ring, &q_alt, &s);
            full[d..2 * d].to_vec()
        };
    }
    Ok(w)
}

/// `[x^n] f` via the most-significant-bit-first window descent.
pub fn one_coeff_msb<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    f: &RationalSeries<R::Elem>,
    n: u64,
) -> Result<R::Elem> {
    let d = f.order();
    let w = slice_coeff_msb(ring, engine, f.den(), n)?;
    // [x^n] num/den = sum_j num[j] * (1/den)[n-j], and (1/den)[n-j] sits at
    // window position d-1-j
    let num = f.num();
    let mut acc = ring.mul(&num[0], &w[d - 1]);
    for j in 1..d {
        acc = ring.add(&acc, &ring.mul(&num[j], &w[d - 1 - j]));
    }
    Ok(acc)
}

/// `[x^n] num_j / den` for several numerators sharing one denominator: a
/// single window descent, then one length-`d` inner product per numerator.
/// Each numerator must have degree below `deg(den)`.
pub fn many_coeff_msb<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    nums: &[Vec<R::Elem>],
    den: &[R::Elem],
    n: u64,
) -> Result<Vec<R::Elem>> {
    if den.len() < 2 {
        return Err(Error::EmptyInput("denominator needs degree at least 1"));
    }
    let d = den.len() - 1;
    for num in nums {
        if num.iter().skip(d).any(|c| !ring.is_zero(c)) {
            return Err(Error::DegreeBound("numerator degree must stay below the denominator's"));
        }
    }
    let w = slice_coeff_msb(ring, engine, den, n)?;
    let mut out = Vec::with_capacity(nums.len());
    for num in nums {
        // [x^n] num/den = sum_j num[j] * (1/den)[n-j], with (1/den)[n-j]
        // sitting at window position d-1-j
        let mut acc = ring.zero();
        for (j, c) in num.iter().take(d).enumerate() {
            acc = ring.add(&acc, &ring.mul(c, &w[d - 1 - j]));
        }
        out.push(acc);
    }
    Ok(out)
}

/// The `d` coefficients `[x^n ..= x^(n+d-1)] f`. Two window descents on the
/// denominator (the convolution with `num` reaches back `d - 1` extra
/// indices), then one transposed product with the numerator.
pub fn series_slice_msb<R: Ring, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    f: &RationalSeries<R::Elem>,
    n: u64,
) -> Result<SequenceSlice<R::Elem>> {
    check_index(n)?;
    let d = f.order();
    let top = n + d as u64 - 1;
    check_index(top)?;
    let w_hi = slice_coeff_msb(ring, engine, f.den(), top)?;
    let w_lo = if top >= d as u64 {
        slice_coeff_msb(ring, engine, f.den(), top - d as u64)?
    } else {
        vec![ring.zero(); d]
    };
    // s covers (1/den) on indices [top-2d+1 ..= top]
    let mut s = w_lo;
    s.extend(w_hi);
    let num = poly_padded(ring, f.num(), d + 1)?;
    let values = engine.transposed_mul(ring, &num, &s, d);
    Ok(SequenceSlice { start_index: n as i64, values })
}

/// `[x^n] f` computed entirely in value space on a fixed transform grid.
///
/// Needs `2^k > 2d` so products never wrap; each step does the contraction
/// on values (`2^k` products for the numerator pair, half that for the
/// denominator), drops to the half grid, and refines back. The ring modulus
/// must match the plan.
pub fn one_coeff_fft<R: NttRing>(
    ring: &R,
    plan: &DftPlan,
    f: &RationalSeries<u64>,
    n: u64,
) -> Result<u64> {
    check_index(n)?;
    let d = f.order();
    let k = min_k_for_len(2 * d + 1);
    if k > plan.max_k() {
        return Err(Error::TransformTooLarge { need_k: k, plan_k: plan.max_k() });
    }
    let grid = 1usize << k;
    let half = grid >> 1;
    let mut p_hat = plan.dft_forward(ring, f.num(), k)?;
    let mut q_hat = plan.dft_forward(ring, f.den(), k)?;
    let mut m = n;
    while m >= 1 {
        // u = p * alt(q) on the grid; alt is the half-rotation shuffle
        let u_hat: Vec<u64> = (0..grid).map(|y| ring.mul(&p_hat[y], &q_hat[y ^ half])).collect();
        let u_half = match Parity::of(m) {
            Parity::Even => plan.dft_halve_even(ring, &u_hat, k)?,
            Parity::Odd => plan.dft_halve_odd(ring, &u_hat, k)?,
        };
        p_hat = plan.dft_double(ring, &u_half, k - 1)?;
        // q * alt(q) takes the same value at y and y^half, so the halved
        // grid values come straight from the products on the lower half
        let v_half: Vec<u64> = (0..half).map(|y| ring.mul(&q_hat[y], &q_hat[y ^ half])).collect();
        q_hat = plan.dft_double(ring, &v_half, k - 1)?;
        m /= 2;
    }
    // constant terms are grid means; the 1/2^k factors cancel in the ratio
    let mut sp = ring.zero();
    let mut sq = ring.zero();
    for y in 0..grid {
        sp = ring.add(&sp, &p_hat[y]);
        sq = ring.add(&sq, &q_hat[y]);
    }
    let inv_sq = ring.inv(&sq)?;
    Ok(ring.mul(&sp, &inv_sq))
}

/// First `n` series coefficients by the quadratic recurrence, for checking
/// the fast routes.
pub fn expand_naive<R: Ring>(
    ring: &R,
    f: &RationalSeries<R::Elem>,
    n: usize,
) -> Result<Vec<R::Elem>> {
    crate::poly::series_expand(ring, f.num(), f.den(), n)
}

/// Degree of the numerator as a polynomial, `None` if zero. Mostly useful in
/// diagnostics; the algorithms only need the stored size.
pub fn num_degree<R: Ring>(ring: &R, f: &RationalSeries<R::Elem>) -> Option<usize> {
    poly_degree(ring, f.num())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modexp::initial_segment_naive;
    use crate::poly::{series_expand, PlainMul};
    use crate::ring::{
        elems_from_i64, BigIntRing, CountingRing, ModRing, PrimeField, DEFAULT_PRIME,
    };
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn fp() -> PrimeField {
        PrimeField::new(DEFAULT_PRIME).unwrap()
    }

    fn fib_series<R: Ring>(ring: &R) -> RationalSeries<R::Elem> {
        // x / (1 - x - x^2), so coefficient n is the n-th Fibonacci number
        RationalSeries::new(ring, &elems_from_i64(ring, &[0, 1]), &elems_from_i64(ring, &[1, -1, -1]))
            .unwrap()
    }

    const FIB: [i64; 21] =
        [0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987, 1597, 2584, 4181, 6765];

    #[test]
    fn lsb_fibonacci_small_indices() {
        let f = fp();
        let e = PlainMul::default();
        let fib = fib_series(&f);
        for (n, want) in FIB.iter().enumerate() {
            let got = one_coeff_lsb(&f, &e, &fib, n as u64).unwrap();
            assert_eq!(got, f.from_i64(*want), "F_{n}");
        }
    }

    #[test]
    fn lsb_iteration_count() {
        let f = fp();
        let e = PlainMul::default();
        let fib = fib_series(&f);
        for (n, want_steps) in [(0u64, 0u32), (1, 1), (2, 2), (3, 2), (4, 3), (5, 3), (7, 3), (8, 4)]
        {
            let (_, steps) = one_coeff_lsb_traced(&f, &e, &fib, n).unwrap();
            assert_eq!(steps, want_steps, "steps at n={n}");
            // equals the bit length of n, i.e. ceil(log2(n+1))
            let bit_len = if n == 0 { 0 } else { 64 - n.leading_zeros() };
            assert_eq!(steps, bit_len, "formula check n={n}");
        }
    }

    #[test]
    fn msb_window_fibonacci_trace() {
        // 1/(1 - x - x^2) at indices [4, 5] is (5, 8)
        let f = fp();
        let e = PlainMul::default();
        let den = elems_from_i64(&f, &[1, -1, -1]);
        let w = slice_coeff_msb(&f, &e, &den, 5).unwrap();
        assert_eq!(w, vec![f.from_i64(5), f.from_i64(8)]);
        // window reaching below zero
        let w0 = slice_coeff_msb(&f, &e, &den, 0).unwrap();
        assert_eq!(w0, vec![0, 1]);
    }

    #[test]
    fn msb_matches_lsb_on_fibonacci() {
        let f = fp();
        let e = PlainMul::default();
        let fib = fib_series(&f);
        for n in 0..40u64 {
            let a = one_coeff_lsb(&f, &e, &fib, n).unwrap();
            let b = one_coeff_msb(&f, &e, &fib, n).unwrap();
            assert_eq!(a, b, "n={n}");
        }
    }

    #[test]
    fn slice_of_series_matches_expansion() {
        let f = fp();
        let e = PlainMul::default();
        let num = elems_from_i64(&f, &[3, 0, -2, 7]);
        let den = elems_from_i64(&f, &[2, -1, 0, 5, -3]);
        let fr = RationalSeries::new(&f, &num, &den).unwrap();
        let all = expand_naive(&f, &fr, 200).unwrap();
        for n in [0u64, 1, 3, 17, 100, 196] {
            let s = series_slice_msb(&f, &e, &fr, n).unwrap();
            assert_eq!(s.start_index, n as i64);
            assert_eq!(s.values[..], all[n as usize..n as usize + 4]);
        }
    }

    #[test]
    fn one_term_looks_up_then_contracts() {
        let f = fp();
        let e = PlainMul::default();
        let fib = LinRec::new(&elems_from_i64(&f, &[1, 1]), &elems_from_i64(&f, &[0, 1])).unwrap();
        assert_eq!(one_term(&f, &e, &fib, 0).unwrap(), 0);
        assert_eq!(one_term(&f, &e, &fib, 1).unwrap(), 1);
        assert_eq!(one_term(&f, &e, &fib, 43).unwrap(), 433494437);
        // geometric sequence: order 1, u_{k+1} = 2 u_k, u_0 = 1
        let geo = LinRec::new(&elems_from_i64(&f, &[2]), &elems_from_i64(&f, &[1])).unwrap();
        assert_eq!(one_term(&f, &e, &geo, 10).unwrap(), 1024);
        // a dropped trailing coefficient lowers the true denominator degree
        let padded = LinRec::new(&elems_from_i64(&f, &[0, 1, 1]), &elems_from_i64(&f, &[7, 0, 1]))
            .unwrap();
        let naive = initial_segment_naive(&f, &padded, 30);
        assert_eq!(one_term(&f, &e, &padded, 29).unwrap(), naive[29]);
    }

    #[test]
    fn shared_denominator_coefficients() {
        let ring = CountingRing::new(fp());
        let e = PlainMul::default();
        let nums = vec![elems_from_i64(&ring, &[0, 1]), elems_from_i64(&ring, &[1])];
        let den = elems_from_i64(&ring, &[1, -1, -1]);
        let got = many_coeff_msb(&ring, &e, &nums, &den, 10).unwrap();
        assert_eq!(got, vec![55, 89]);
        // a single numerator reduces to the one-coefficient route
        let fr = RationalSeries::new(&ring, &nums[0], &den).unwrap();
        let single = many_coeff_msb(&ring, &e, &nums[..1], &den, 10).unwrap();
        assert_eq!(single[0], one_coeff_msb(&ring, &e, &fr, 10).unwrap());
        // every extra numerator costs at most 2d more multiplications
        let d = 6usize;
        let den6 = elems_from_i64(&ring, &[1, 2, -3, 4, 0, 1, 5]);
        let many: Vec<Vec<u64>> =
            (0..8).map(|j| elems_from_i64(&ring, &[j + 1, 2 * j, 3, j, 1, j + 2])).collect();
        ring.reset();
        let _ = many_coeff_msb(&ring, &e, &many[..1], &den6, 997).unwrap();
        let one_cost = ring.snapshot().mul_count;
        ring.reset();
        let all = many_coeff_msb(&ring, &e, &many, &den6, 997).unwrap();
        let eight_cost = ring.snapshot().mul_count;
        assert_eq!(all.len(), 8);
        assert!(
            eight_cost - one_cost <= 7 * (2 * d as u64),
            "extra numerators cost {} > {}",
            eight_cost - one_cost,
            7 * 2 * d
        );
        let too_big = vec![elems_from_i64(&ring, &[1, 0, 0, 0, 0, 0, 1])];
        assert!(matches!(
            many_coeff_msb(&ring, &e, &too_big, &den6, 5),
            Err(Error::DegreeBound(_))
        ));
    }

    #[test]
    fn plain_ascent_matches_middle_product() {
        let ring = CountingRing::new(fp());
        let e = PlainMul::default();
        let den = elems_from_i64(&ring, &[1, -4, 2, 0, 3, -1, 1, 2, 9]);
        for n in [0u64, 1, 5, 100, 12345] {
            ring.reset();
            let fast = slice_coeff_msb_with(&ring, &e, &den, n, true).unwrap();
            let fast_cost = ring.snapshot().mul_count;
            ring.reset();
            let plain = slice_coeff_msb_with(&ring, &e, &den, n, false).unwrap();
            let plain_cost = ring.snapshot().mul_count;
            assert_eq!(fast, plain, "n={n}");
            if n >= 1 {
                assert!(fast_cost < plain_cost, "n={n}: {fast_cost} !< {plain_cost}");
            }
        }
    }

    #[test]
    fn graeffe_soundness_and_constant_term_squares() {
        let f = fp();
        let e = PlainMul::default();
        let mut state = 0x5EEDu64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for case in 0..200 {
            let d = 1 + (next() % 8) as usize;
            let num: Vec<u64> = (0..d).map(|_| next() % DEFAULT_PRIME).collect();
            let mut den: Vec<u64> = (0..=d).map(|_| next() % DEFAULT_PRIME).collect();
            if den[0] == 0 {
                den[0] = 1;
            }
            let fr = RationalSeries::new(&f, &num, &den).unwrap();
            let n = 1 + next() % 500;
            let (p2, q2) = graeffe_step(&f, &e, fr.num(), fr.den(), Parity::of(n));
            assert_eq!(q2[0], f.mul(&den[0], &den[0]), "case {case}: constant term");
            let contracted = RationalSeries::new(&f, &p2, &q2).unwrap();
            let before = series_expand(&f, fr.num(), fr.den(), n as usize + 1).unwrap();
            let after =
                series_expand(&f, contracted.num(), contracted.den(), n as usize / 2 + 1).unwrap();
            assert_eq!(before[n as usize], after[n as usize / 2], "case {case}: n={n}");
        }
    }

    #[test]
    fn fft_route_agrees() {
        let ring = CountingRing::new(fp());
        let plan = DftPlan::new(&ring, 8).unwrap();
        let e = PlainMul::default();
        let num = elems_from_i64(&ring, &[5, -1, 2, 0, 4, 1, 1]);
        let den = elems_from_i64(&ring, &[1, -3, 0, 0, 2, -1, 0, 9]);
        let fr = RationalSeries::new(&ring, &num, &den).unwrap();
        for n in [0u64, 1, 2, 5, 9, 31, 32, 1000, 65535] {
            let a = one_coeff_lsb(&ring, &e, &fr, n).unwrap();
            let b = one_coeff_fft(&ring, &plan, &fr, n).unwrap();
            assert_eq!(a, b, "n={n}");
        }
    }

    #[test]
    fn lsb_count_is_two_products_per_step() {
        let ring = CountingRing::new(fp());
        let e = PlainMul::default();
        for d in [8usize, 33, 64] {
            let num: Vec<u64> = (0..d as i64).map(|i| ring.from_i64(i + 2)).collect();
            let mut den: Vec<u64> = (0..=d as i64).map(|i| ring.from_i64(7 * i - 3)).collect();
            den[0] = 1;
            let fr = RationalSeries::new(&ring, &num, &den).unwrap();
            for n in [5u64, 100, 1 << 20] {
                let steps = (64 - n.leading_zeros()) as u64;
                ring.reset();
                let _ = one_coeff_lsb(&ring, &e, &fr, n).unwrap();
                let per_step = e.mul_count(d, d + 1) + e.mul_count(d + 1, d + 1);
                assert_eq!(ring.snapshot().mul_count, steps * per_step + 1, "d={d} n={n}");
                assert_eq!(ring.snapshot().inv_count, 1);
            }
        }
    }

    #[test]
    fn msb_count_is_square_plus_transposed_per_level() {
        let ring = CountingRing::new(fp());
        let e = PlainMul::default();
        let d = 64usize;
        let mut den: Vec<u64> = (0..=d as i64).map(|i| ring.from_i64(11 * i + 1)).collect();
        den[0] = 1;
        let n = (1u64 << 30) - 5;
        let steps = 30u64;
        ring.reset();
        let _ = slice_coeff_msb(&ring, &e, &den, n).unwrap();
        let per_level = e.mul_count(d + 1, d + 1) + e.mul_count(d + 1, d);
        assert_eq!(ring.snapshot().mul_count, steps * per_level);
        assert_eq!(ring.snapshot().inv_count, 1);
    }

    #[test]
    fn works_over_composite_modulus() {
        let zm = ModRing::new(9_999_999_967).unwrap(); // odd, composite
        let e = PlainMul::default();
        let fib = fib_series(&zm);
        let series = expand_naive(&zm, &fib, 120).unwrap();
        for n in [7u64, 64, 119] {
            assert_eq!(one_coeff_lsb(&zm, &e, &fib, n).unwrap(), series[n as usize]);
            assert_eq!(one_coeff_msb(&zm, &e, &fib, n).unwrap(), series[n as usize]);
        }
    }

    #[test]
    fn works_over_integers() {
        let z = BigIntRing;
        let e = PlainMul::default();
        let fib = fib_series(&z);
        let got = one_coeff_lsb(&z, &e, &fib, 90).unwrap();
        assert_eq!(got, "2880067194370816120".parse::<BigInt>().unwrap());
        let got = one_coeff_msb(&z, &e, &fib, 90).unwrap();
        assert_eq!(got, "2880067194370816120".parse::<BigInt>().unwrap());
    }

    #[test]
    fn recurrence_conversion_round_trip() {
        let f = fp();
        let e = PlainMul::default();
        // u[n+3] = 2u[n+2] - 4u[n] with u = 1, 0, 5
        let rec =
            LinRec::new(&elems_from_i64(&f, &[-4, 0, 2]), &elems_from_i64(&f, &[1, 0, 5])).unwrap();
        let fr = rec.to_rational(&f, &e).unwrap();
        let series = expand_naive(&f, &fr, 40).unwrap();
        // the series must obey the recurrence and start with init
        assert_eq!(series[..3], elems_from_i64(&f, &[1, 0, 5])[..]);
        for k in 0..37 {
            let want = f.sub(
                &f.mul(&f.from_i64(2), &series[k + 2]),
                &f.mul(&f.from_i64(4), &series[k]),
            );
            assert_eq!(series[k + 3], want, "k={k}");
        }
        let gamma = rec.characteristic(&f);
        assert_eq!(gamma, elems_from_i64(&f, &[4, 0, -2, 1]));
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = fp();
        assert!(RationalSeries::new(&f, &[1u64], &[5]).is_err());
        assert!(RationalSeries::new(&f, &[1u64, 2, 3], &[1, 1]).is_err());
        let zm = ModRing::new(15).unwrap();
        assert!(matches!(
            RationalSeries::new(&zm, &[1u64], &[5, 1]),
            Err(Error::NotInvertible)
        ));
        assert!(LinRec::new(&[1u64, 1], &[0u64]).is_err());
        let e = PlainMul::default();
        let fib = fib_series(&f);
        assert!(matches!(
            one_coeff_lsb(&f, &e, &fib, u64::MAX),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    proptest! {
        #[test]
        fn lsb_matches_expansion(
            d in 1usize..9,
            n in 0u64..600,
            seed in 0u64..10_000,
        ) {
            let f = fp();
            let e = PlainMul::default();
            let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state % DEFAULT_PRIME
            };
            let num: Vec<u64> = (0..d).map(|_| next()).collect();
            let mut den: Vec<u64> = (0..=d).map(|_| next()).collect();
            den[0] = 1 + next() % (DEFAULT_PRIME - 1);
            let fr = RationalSeries::new(&f, &num, &den).unwrap();
            let series = series_expand(&f, &num, &den, n as usize + 1).unwrap();
            let got = one_coeff_lsb(&f, &e, &fr, n).unwrap();
            prop_assert_eq!(got, series[n as usize]);
        }

        #[test]
        fn msb_slice_matches_expansion(
            d in 1usize..9,
            n in 0u64..600,
            seed in 0u64..10_000,
        ) {
            let f = fp();
            let e = PlainMul::default();
            let mut state = seed.wrapping_mul(0x2545F4914F6CDD1D) | 1;
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state % DEFAULT_PRIME
            };
            let mut den: Vec<u64> = (0..=d).map(|_| next()).collect();
            den[0] = 1 + next() % (DEFAULT_PRIME - 1);
            let one = [1u64];
            let inv_series = series_expand(&f, &one, &den, n as usize + 1).unwrap();
            let w = slice_coeff_msb(&f, &e, &den, n).unwrap();
            for (j, val) in w.iter().enumerate() {
                let idx = n as i64 - d as i64 + 1 + j as i64;
                let want = if idx < 0 { 0 } else { inv_series[idx as usize] };
                prop_assert_eq!(*val, want, "window position {} (index {})", j, idx);
            }
        }
    }
}
