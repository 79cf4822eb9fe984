//! Showcase applications: Fibonacci numbers in very few multiplications and
//! matrix powers through the characteristic polynomial.
//!
//! The Fibonacci routines instantiate the index-halving contraction for the
//! denominator `1 - x - x^2` symbolically: the squared denominators stay in
//! the two-parameter family `1 - cx + x^2`, so a whole contraction step
//! collapses to scalar updates. The result is `F_n` in at most
//! `2 ceil(log2 n) - 1` ring multiplications, and exactly `2 log2(n) - 3`
//! when `n` is a power of two.

use crate::modexp::{modexp_new, ModulusPoly};
use crate::poly::MulEngine;
use crate::ring::{Field, Ring};
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// `F_n` (`F_0 = 0, F_1 = 1`) by symbolic index halving.
///
/// Tracks the numerator pair `(a, b)` for `p = a x + b` against the
/// denominator family `1 - c x + x^2`; each halving costs one numerator and
/// one denominator multiplication, at most `2 ceil(log2 n) - 1` in total.
pub fn fib_new<R: Ring>(ring: &R, n: u64) -> R::Elem {
    if n == 0 {
        return ring.zero();
    }
    if n == 1 {
        return ring.one();
    }
    let two = ring.from_i64(2);
    let mut c = ring.from_i64(3);
    let (mut a, mut b);
    if n % 2 == 0 {
        a = ring.zero();
        b = ring.one();
    } else {
        a = ring.one();
        b = ring.from_i64(-1);
    }
    let mut m = n / 2;
    while m > 1 {
        if m % 2 == 0 {
            b = ring.add(&a, &ring.mul(&b, &c));
        } else {
            a = ring.add(&b, &ring.mul(&a, &c));
        }
        c = ring.sub(&ring.mul(&c, &c), &two);
        m /= 2;
    }
    ring.add(&b, &ring.mul(&a, &c))
}

/// `F_n` for `n` a power of two, `n >= 4`, in exactly `2 log2(n) - 3`
/// multiplications: the numerator collapses to a running product against the
/// same denominator family.
pub fn fib_pow2<R: Ring>(ring: &R, n: u64) -> Result<R::Elem> {
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let two = ring.from_i64(2);
    let mut b = ring.one();
    let mut c = ring.from_i64(3);
    let mut m = n / 2;
    while m > 2 {
        b = ring.mul(&b, &c);
        c = ring.sub(&ring.mul(&c, &c), &two);
        m /= 2;
    }
    Ok(ring.mul(&b, &c))
}

/// One intermediate state of the halving loop: registers `(a, b, c)` with
/// `remaining` halvings of the index left. The invariant, checked in tests,
/// is that `F_n` equals the coefficient of `x^remaining` in
/// `(a + b x) / (1 - c x + x^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FibState<E> {
    pub a: E,
    pub b: E,
    pub c: E,
    pub remaining: u64,
}

/// `fib_new` with every intermediate register state recorded, for auditing
/// the loop invariant. Only meaningful for `n >= 2`; smaller indices short
/// circuit with no states.
pub fn fib_new_traced<R: Ring>(ring: &R, n: u64) -> (R::Elem, Vec<FibState<R::Elem>>) {
    if n == 0 {
        return (ring.zero(), Vec::new());
    }
    if n == 1 {
        return (ring.one(), Vec::new());
    }
    let two = ring.from_i64(2);
    let mut c = ring.from_i64(3);
    let (mut a, mut b);
    if n % 2 == 0 {
        a = ring.zero();
        b = ring.one();
    } else {
        a = ring.one();
        b = ring.from_i64(-1);
    }
    let mut m = n / 2;
    let mut states =
        vec![FibState { a: a.clone(), b: b.clone(), c: c.clone(), remaining: m }];
    while m > 1 {
        if m % 2 == 0 {
            b = ring.add(&a, &ring.mul(&b, &c));
        } else {
            a = ring.add(&b, &ring.mul(&a, &c));
        }
        c = ring.sub(&ring.mul(&c, &c), &two);
        m /= 2;
        states.push(FibState { a: a.clone(), b: b.clone(), c: c.clone(), remaining: m });
    }
    (ring.add(&b, &ring.mul(&a, &c)), states)
}

/// `(F_n, F_(n+1))` by the doubling identities; an independent reference
/// for the halving routes.
pub fn fib_doubling<R: Ring>(ring: &R, n: u64) -> (R::Elem, R::Elem) {
    if n == 0 {
        return (ring.zero(), ring.one());
    }
    let (f, g) = fib_doubling(ring, n / 2);
    // F(2k) = F(k) * (2 F(k+1) - F(k)),  F(2k+1) = F(k)^2 + F(k+1)^2
    let two_g = ring.add(&g, &g);
    let f2k = ring.mul(&f, &ring.sub(&two_g, &f));
    let f2k1 = ring.add(&ring.mul(&f, &f), &ring.mul(&g, &g));
    if n % 2 == 0 {
        (f2k, f2k1)
    } else {
        (f2k1.clone(), ring.add(&f2k, &f2k1))
    }
}

/// Dense square matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<E> {
    dim: usize,
    data: Vec<E>,
}

impl<E: Clone + PartialEq + core::fmt::Debug> SquareMatrix<E> {
    pub fn new(dim: usize, data: Vec<E>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyInput("matrix must have dimension at least 1"));
        }
        if data.len() != dim * dim {
            return Err(Error::DegreeBound("matrix data must hold dim * dim entries"));
        }
        Ok(SquareMatrix { dim, data })
    }

    pub fn identity<R: Ring<Elem = E>>(ring: &R, dim: usize) -> Result<Self> {
        let mut m = SquareMatrix::new(dim, vec![ring.zero(); dim * dim])?;
        for i in 0..dim {
            *m.at_mut(i, i) = ring.one();
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, row: usize, col: usize) -> &E {
        &self.data[row * self.dim + col]
    }

    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut E {
        &mut self.data[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[E]> {
        self.data.chunks(self.dim)
    }
}

pub fn mat_mul<R: Ring>(
    ring: &R,
    a: &SquareMatrix<R::Elem>,
    b: &SquareMatrix<R::Elem>,
) -> SquareMatrix<R::Elem> {
    assert_eq!(a.dim, b.dim, "matrix dimensions must agree");
    let n = a.dim;
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = ring.mul(a.at(i, 0), b.at(0, j));
            for k in 1..n {
                acc = ring.add(&acc, &ring.mul(a.at(i, k), b.at(k, j)));
            }
            data.push(acc);
        }
    }
    SquareMatrix { dim: n, data }
}

fn mat_add_scaled<R: Ring>(
    ring: &R,
    acc: &mut SquareMatrix<R::Elem>,
    m: &SquareMatrix<R::Elem>,
    scale: &R::Elem,
) {
    for (a, v) in acc.data.iter_mut().zip(m.data.iter()) {
        *a = ring.add(a, &ring.mul(scale, v));
    }
}

/// `m^n` by square-and-multiply: about `2 log2 n` matrix products. The
/// baseline the characteristic-polynomial route is checked against.
pub fn matrix_pow_binary<R: Ring>(
    ring: &R,
    m: &SquareMatrix<R::Elem>,
    n: u64,
) -> Result<SquareMatrix<R::Elem>> {
    let mut acc = SquareMatrix::identity(ring, m.dim())?;
    if n == 0 {
        return Ok(acc);
    }
    let bits = 64 - n.leading_zeros();
    let mut base = m.clone();
    for i in 0..bits {
        if (n >> i) & 1 == 1 {
            acc = mat_mul(ring, &acc, &base);
        }
        if i + 1 < bits {
            base = mat_mul(ring, &base, &base);
        }
    }
    Ok(acc)
}

/// Characteristic polynomial `det(xI - m)`, monic of degree `dim`.
///
/// Similarity transforms bring the matrix to upper Hessenberg form, then the
/// determinant recurrence along principal minors builds the polynomial.
/// Needs a field for the pivot divisions.
pub fn char_poly<R: Field>(ring: &R, m: &SquareMatrix<R::Elem>) -> Vec<R::Elem> {
    let n = m.dim();
    let mut h = m.clone();
    for j in 0..n.saturating_sub(2) {
        // pivot below the diagonal; swapping rows and columns together keeps
        // the spectrum
        let pivot = (j + 1..n).find(|&i| !ring.is_zero(h.at(i, j)));
        let Some(pivot) = pivot else { continue };
        if pivot != j + 1 {
            for c in 0..n {
                let tmp = h.at(pivot, c).clone();
                *h.at_mut(pivot, c) = h.at(j + 1, c).clone();
                *h.at_mut(j + 1, c) = tmp;
            }
            for r in 0..n {
                let tmp = h.at(r, pivot).clone();
                *h.at_mut(r, pivot) = h.at(r, j + 1).clone();
                *h.at_mut(r, j + 1) = tmp;
            }
        }
        let inv_p = ring.inv(h.at(j + 1, j)).expect("nonzero pivot in a field");
        for i in j + 2..n {
            let factor = ring.mul(h.at(i, j), &inv_p);
            if ring.is_zero(&factor) {
                continue;
            }
            for c in 0..n {
                let t = ring.mul(&factor, h.at(j + 1, c));
                *h.at_mut(i, c) = ring.sub(h.at(i, c), &t);
            }
            for r in 0..n {
                let t = ring.mul(&factor, h.at(r, i));
                *h.at_mut(r, j + 1) = ring.add(h.at(r, j + 1), &t);
            }
        }
    }
    // minors d_j of xI - H expanded along the last column
    let mut minors: Vec<Vec<R::Elem>> = Vec::with_capacity(n + 1);
    minors.push(vec![ring.one()]);
    for j in 1..=n {
        // (x - h[j-1][j-1]) * d_{j-1}
        let prev = &minors[j - 1];
        let mut p = vec![ring.zero(); j + 1];
        for (i, c) in prev.iter().enumerate() {
            p[i + 1] = ring.add(&p[i + 1], c);
            let t = ring.mul(h.at(j - 1, j - 1), c);
            p[i] = ring.sub(&p[i], &t);
        }
        // accumulated subdiagonal products walk down the last column
        let mut chain = ring.one();
        for r in (0..j.saturating_sub(1)).rev() {
            chain = ring.mul(&chain, h.at(r + 1, r));
            let weight = ring.mul(h.at(r, j - 1), &chain);
            for (i, c) in minors[r].iter().enumerate() {
                let t = ring.mul(&weight, c);
                p[i] = ring.sub(&p[i], &t);
            }
        }
        minors.push(p);
    }
    minors.pop().expect("at least the empty minor")
}

/// `m^n` through `x^n mod char_poly(m)`: one remainder computation, then a
/// Paterson-Stockmeyer evaluation using about `2 sqrt(dim)` matrix products
/// instead of `2 log2 n`.
pub fn matrix_pow<R: Field, M: MulEngine<R>>(
    ring: &R,
    engine: &M,
    m: &SquareMatrix<R::Elem>,
    n: u64,
) -> Result<SquareMatrix<R::Elem>> {
    let dim = m.dim();
    let gamma = char_poly(ring, m);
    let modulus = ModulusPoly::new(ring, &gamma)?;
    let rho = modexp_new(ring, engine, &modulus, n)?;
    // baby steps: powers m^0 .. m^b
    let b = int_sqrt_ceil(dim);
    let mut pows: Vec<SquareMatrix<R::Elem>> = Vec::with_capacity(b + 1);
    pows.push(SquareMatrix::identity(ring, dim)?);
    for i in 1..=b {
        let next = mat_mul(ring, &pows[i - 1], m);
        pows.push(next);
    }
    // giant steps: Horner in m^b over matrix-weighted chunks of rho
    let groups = dim.div_ceil(b);
    let mut acc = SquareMatrix::new(dim, vec![ring.zero(); dim * dim])?;
    for g in (0..groups).rev() {
        if g + 1 < groups {
            acc = mat_mul(ring, &acc, &pows[b]);
        }
        for r in 0..b {
            let idx = g * b + r;
            if idx < dim {
                mat_add_scaled(ring, &mut acc, &pows[r], &rho[idx]);
            }
        }
    }
    Ok(acc)
}

fn int_sqrt_ceil(n: usize) -> usize {
    let mut b = 1usize;
    while b * b < n {
        b += 1;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{poly_eval, series_expand, PlainMul};
    use crate::ring::{
        elems_from_i64, BigIntRing, CountingRing, PrimeField, DEFAULT_PRIME,
    };
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn fp() -> PrimeField {
        PrimeField::new(DEFAULT_PRIME).unwrap()
    }

    const FIB: [i64; 21] =
        [0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987, 1597, 2584, 4181, 6765];

    #[test]
    fn fib_new_small_and_reference_value() {
        let f = fp();
        for (n, want) in FIB.iter().enumerate() {
            assert_eq!(fib_new(&f, n as u64), f.from_i64(*want), "F_{n}");
        }
        assert_eq!(fib_new(&f, 43), 433494437 % DEFAULT_PRIME);
        let z = BigIntRing;
        assert_eq!(fib_new(&z, 43), BigInt::from(433494437u64));
        assert_eq!(
            fib_new(&z, 200),
            "280571172992510140037611932413038677189525".parse::<BigInt>().unwrap()
        );
    }

    #[test]
    fn fib_new_multiplication_budget() {
        let ring = CountingRing::new(fp());
        for n in [2u64, 3, 43, 1000, (1 << 40) - 1, u64::MAX] {
            ring.reset();
            let _ = fib_new(&ring, n);
            let log = 64 - n.leading_zeros() as u64; // ceil(log2 n) for n not a power of two, log2 + 1 otherwise
            let bound = 2 * log - 1;
            assert!(
                ring.snapshot().mul_count <= bound,
                "n={n}: {} muls > {bound}",
                ring.snapshot().mul_count
            );
        }
        ring.reset();
        let _ = fib_new(&ring, 43);
        assert_eq!(ring.snapshot().mul_count, 9);
    }

    #[test]
    fn fib_pow2_exact_count_and_values() {
        let ring = CountingRing::new(fp());
        let z = BigIntRing;
        for k in [2u32, 3, 4, 6, 10, 20] {
            let n = 1u64 << k;
            ring.reset();
            let got = fib_pow2(&ring, n).unwrap();
            assert_eq!(ring.snapshot().mul_count, 2 * k as u64 - 3, "count at n=2^{k}");
            let (want, _) = fib_doubling(&ring, n);
            assert_eq!(got, want, "value at n=2^{k}");
            if k <= 6 {
                let (big, _) = fib_doubling(&z, n);
                assert_eq!(fib_pow2(&z, n).unwrap(), big);
            }
        }
        assert!(matches!(fib_pow2(&ring, 2), Err(Error::NotPowerOfTwo(2))));
        assert!(matches!(fib_pow2(&ring, 24), Err(Error::NotPowerOfTwo(24))));
    }

    #[test]
    fn fib_trace_hits_reference_registers() {
        let z = BigIntRing;
        let (val, states) = fib_new_traced(&z, 43);
        assert_eq!(val, BigInt::from(433494437u64));
        let want: [(i64, i64, i64, u64); 5] = [
            (1, -1, 3, 21),
            (2, -1, 7, 10),
            (2, -5, 47, 5),
            (89, -5, 2207, 2),
            (89, -10946, 4870847, 1),
        ];
        assert_eq!(states.len(), want.len());
        for (s, (a, b, c, m)) in states.iter().zip(want) {
            assert_eq!(s.a, BigInt::from(a));
            assert_eq!(s.b, BigInt::from(b));
            assert_eq!(s.c, BigInt::from(c));
            assert_eq!(s.remaining, m);
        }
    }

    #[test]
    fn fib_loop_invariant_reproduces_coefficient() {
        let z = BigIntRing;
        let mut n = 7u64;
        for _ in 0..24 {
            n = (n.wrapping_mul(2862933555777941757).wrapping_add(12345)) % 4096;
            let (val, states) = fib_new_traced(&z, n.max(2));
            assert_eq!(val, fib_new(&z, n.max(2)));
            for s in &states {
                // F_n = [x^remaining] (a + b x) / (1 - c x + x^2)
                let num = vec![s.a.clone(), s.b.clone()];
                let den = vec![z.one(), z.neg(&s.c), z.one()];
                let coeffs = series_expand(&z, &num, &den, s.remaining as usize + 1).unwrap();
                assert_eq!(coeffs[s.remaining as usize], val, "n={n} at m={}", s.remaining);
            }
        }
    }

    #[test]
    fn fib_routes_cross_check() {
        let f = fp();
        let mut n = 1u64;
        for step in 0..48 {
            n = n.wrapping_mul(2862933555777941757).wrapping_add(3037000493) % (1 << 50);
            let a = fib_new(&f, n);
            let (b, _) = fib_doubling(&f, n);
            assert_eq!(a, b, "step {step} n={n}");
        }
    }

    #[test]
    fn char_poly_companion_and_known_matrices() {
        let f = fp();
        // companion matrix of x^3 - 2x^2 + 5x - 7
        let m = SquareMatrix::new(
            3,
            elems_from_i64(&f, &[0, 0, 7, 1, 0, -5, 0, 1, 2]),
        )
        .unwrap();
        let cp = char_poly(&f, &m);
        assert_eq!(cp, elems_from_i64(&f, &[-7, 5, -2, 1]));
        // diagonal matrix: product of (x - d_i)
        let dm = SquareMatrix::new(2, elems_from_i64(&f, &[3, 0, 0, 4])).unwrap();
        assert_eq!(char_poly(&f, &dm), elems_from_i64(&f, &[12, -7, 1]));
        // 1x1
        let one = SquareMatrix::new(1, elems_from_i64(&f, &[9])).unwrap();
        assert_eq!(char_poly(&f, &one), elems_from_i64(&f, &[-9, 1]));
    }

    #[test]
    fn char_poly_matches_determinant_at_points() {
        let f = fp();
        let dims = [1usize, 2, 3, 5, 8];
        let mut state = 0xDEADBEEFu64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state % DEFAULT_PRIME
        };
        for dim in dims {
            let data: Vec<u64> = (0..dim * dim).map(|_| next()).collect();
            let m = SquareMatrix::new(dim, data).unwrap();
            let cp = char_poly(&f, &m);
            assert_eq!(cp.len(), dim + 1);
            assert_eq!(cp[dim], 1, "monic at dim={dim}");
            for _ in 0..4 {
                let x0 = next();
                let direct = det_shifted(&f, &m, x0);
                let via_poly = poly_eval(&f, &cp, &x0);
                assert_eq!(via_poly, direct, "dim={dim} x0={x0}");
            }
        }
    }

    /// `det(x0 I - m)` by Gaussian elimination, the independent check for
    /// the Hessenberg route.
    fn det_shifted(ring: &PrimeField, m: &SquareMatrix<u64>, x0: u64) -> u64 {
        let n = m.dim();
        let mut a = vec![vec![0u64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let diag = if i == j { x0 } else { 0 };
                a[i][j] = ring.sub(&diag, m.at(i, j));
            }
        }
        let mut det = ring.one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| a[r][col] != 0) else {
                return ring.zero();
            };
            if p != col {
                a.swap(p, col);
                det = ring.neg(&det);
            }
            det = ring.mul(&det, &a[col][col]);
            let inv = ring.inv(&a[col][col]).unwrap();
            for r in col + 1..n {
                let factor = ring.mul(&a[r][col], &inv);
                for c in col..n {
                    let t = ring.mul(&factor, &a[col][c]);
                    a[r][c] = ring.sub(&a[r][c], &t);
                }
            }
        }
        det
    }

    #[test]
    fn cayley_hamilton_annihilates() {
        let f = fp();
        let mut state = 0xC0FFEEu64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state % DEFAULT_PRIME
        };
        for dim in [1usize, 2, 4, 6] {
            let data: Vec<u64> = (0..dim * dim).map(|_| next()).collect();
            let m = SquareMatrix::new(dim, data).unwrap();
            let cp = char_poly(&f, &m);
            // evaluate cp at the matrix with plain Horner in mat_mul
            let mut acc = SquareMatrix::new(dim, vec![0u64; dim * dim]).unwrap();
            for c in cp.iter().rev() {
                acc = mat_mul(&f, &acc, &m);
                for i in 0..dim {
                    *acc.at_mut(i, i) = f.add(acc.at(i, i), c);
                }
            }
            let zero = SquareMatrix::new(dim, vec![0u64; dim * dim]).unwrap();
            assert_eq!(acc, zero, "dim={dim}");
        }
    }

    #[test]
    fn fibonacci_matrix_power() {
        let f = fp();
        let e = PlainMul::default();
        let m = SquareMatrix::new(2, elems_from_i64(&f, &[1, 1, 1, 0])).unwrap();
        let p = matrix_pow(&f, &e, &m, 10).unwrap();
        // [[F11, F10], [F10, F9]]
        assert_eq!(*p.at(0, 0), 89);
        assert_eq!(*p.at(0, 1), 55);
        assert_eq!(*p.at(1, 0), 55);
        assert_eq!(*p.at(1, 1), 34);
    }

    #[test]
    fn matrix_power_composes_additively() {
        let f = fp();
        let e = PlainMul::default();
        let mut state = 0xAB12u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..12 {
            let dim = 1 + (next() % 5) as usize;
            let data: Vec<u64> = (0..dim * dim).map(|_| next() % DEFAULT_PRIME).collect();
            let m = SquareMatrix::new(dim, data).unwrap();
            let a = next() % (1 << 20);
            let b = next() % (1 << 20);
            let pa = matrix_pow(&f, &e, &m, a).unwrap();
            let pb = matrix_pow(&f, &e, &m, b).unwrap();
            let pab = matrix_pow(&f, &e, &m, a + b).unwrap();
            assert_eq!(mat_mul(&f, &pa, &pb), pab, "dim={dim} a={a} b={b}");
        }
    }

    #[test]
    fn nilpotent_and_identity_edge_cases() {
        let f = fp();
        let e = PlainMul::default();
        let nil = SquareMatrix::new(2, elems_from_i64(&f, &[0, 1, 0, 0])).unwrap();
        let p = matrix_pow(&f, &e, &nil, 7).unwrap();
        assert_eq!(p, SquareMatrix::new(2, vec![0, 0, 0, 0]).unwrap());
        let id = SquareMatrix::identity(&f, 3).unwrap();
        let p = matrix_pow(&f, &e, &id, 1 << 40).unwrap();
        assert_eq!(p, id);
        let p0 = matrix_pow(&f, &e, &nil, 0).unwrap();
        assert_eq!(p0, SquareMatrix::identity(&f, 2).unwrap());
    }

    proptest! {
        #[test]
        fn matrix_pow_matches_binary(
            dim in 1usize..6,
            n in 0u64..4000,
            seed in 0u64..1 << 20,
        ) {
            let f = fp();
            let e = PlainMul::default();
            let mut state = seed | 1;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(99991);
                state >> 11
            };
            let data: Vec<u64> = (0..dim * dim).map(|_| next() % DEFAULT_PRIME).collect();
            let m = SquareMatrix::new(dim, data).unwrap();
            let a = matrix_pow(&f, &e, &m, n).unwrap();
            let b = matrix_pow_binary(&f, &m, n).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
