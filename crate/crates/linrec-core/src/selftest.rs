//! Randomized cross-checking suites, callable from `no_std` contexts.
//!
//! Every suite pits independent implementations of the same quantity against
//! each other over seeded random instances and reports mismatches instead of
//! panicking, so a host binary can print a readable report.

use crate::apps::{fib_doubling, fib_new, fib_pow2, matrix_pow, matrix_pow_binary, SquareMatrix};
use crate::kernel::{
    one_coeff_fft, one_coeff_lsb, one_coeff_msb, one_term, series_slice_msb, LinRec,
    RationalSeries,
};
use crate::modexp::{
    fiduccia_term, initial_segment, initial_segment_naive, modexp_binary, modexp_new,
    new_fiduccia_slice, ModulusPoly,
};
use crate::ntt::{dft_alternate, min_k_for_len, DftPlan};
use crate::poly::{poly_divrem, series_expand, MulEngine, PlainMul};
use crate::ring::{ModRing, PrimeField, Ring, DEFAULT_PRIME};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// SplitMix64: tiny, full-period, and stable across platforms, which keeps
/// seeded runs reproducible byte for byte.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound` (`bound > 0`).
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        // rejection sampling keeps the draw exactly uniform
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }
}

/// Outcome of one suite: how many cases ran and how many disagreed.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: u32,
    pub failures: u32,
    /// First few mismatch descriptions, newline separated.
    pub detail: String,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.failures <= 5 {
                if !self.detail.is_empty() {
                    self.detail.push('\n');
                }
                self.detail.push_str(&describe());
            }
        }
    }
}

fn random_series(rng: &mut SplitMix64, modulus: u64, max_d: usize) -> (Vec<u64>, Vec<u64>) {
    let d = 1 + rng.below(max_d as u64) as usize;
    let num: Vec<u64> = (0..d).map(|_| rng.below(modulus)).collect();
    let mut den: Vec<u64> = (0..=d).map(|_| rng.below(modulus)).collect();
    den[0] = 1; // unit constant term keeps the series well defined in Z/m
    if den[d] == 0 {
        den[d] = 1;
    }
    (num, den)
}

/// All single-term routes against direct series expansion.
pub fn term_routes_suite(seed: u64, instances: u32, max_d: usize, max_n: u64) -> SuiteResult {
    let mut rng = SplitMix64::new(seed);
    let mut out = SuiteResult { name: "term-routes", cases: 0, failures: 0, detail: String::new() };
    let engine = PlainMul::default();
    for case in 0..instances {
        // alternate between the FFT-friendly prime and an arbitrary odd modulus
        let prime_case = case % 2 == 0;
        let modulus = if prime_case {
            DEFAULT_PRIME
        } else {
            3 + 2 * rng.below((1 << 31) - 2)
        };
        let Ok(ring) = ModRing::new(modulus) else { continue };
        let (num, den) = random_series(&mut rng, modulus, max_d);
        let Ok(series) = RationalSeries::new(&ring, &num, &den) else { continue };
        let d = series.order();
        let n = rng.below(max_n + 1);
        let head = series_expand(&ring, series.num(), series.den(), n as usize + d + 1).unwrap();
        let want = head[n as usize];
        let lsb = one_coeff_lsb(&ring, &engine, &series, n).unwrap();
        out.record(lsb == want, || format!("case {case}: lsb {lsb} != {want} (m={modulus}, n={n})"));
        let msb = one_coeff_msb(&ring, &engine, &series, n).unwrap();
        out.record(msb == want, || format!("case {case}: msb {msb} != {want} (m={modulus}, n={n})"));
        // the same series as an explicit recurrence with its first d terms
        let coeffs: Vec<u64> = (0..d).map(|j| ring.neg(&series.den()[d - j])).collect();
        let rec = LinRec::new(&coeffs, &head[..d]).unwrap();
        let term = one_term(&ring, &engine, &rec, n).unwrap();
        out.record(term == want, || format!("case {case}: one_term {term} != {want} (m={modulus}, n={n})"));
        let fid = fiduccia_term(&ring, &engine, &rec, n, true).unwrap();
        out.record(fid == want, || format!("case {case}: fiduccia {fid} != {want} (m={modulus}, n={n})"));
        if prime_case {
            let field = PrimeField::new(DEFAULT_PRIME).unwrap();
            let k = min_k_for_len(2 * d + 1);
            let plan = DftPlan::new(&field, k).unwrap();
            let fseries = RationalSeries::new(&field, &num, &den).unwrap();
            let fft = one_coeff_fft(&field, &plan, &fseries, n).unwrap();
            out.record(fft == want, || format!("case {case}: fft {fft} != {want} (n={n})"));
        }
    }
    out
}

/// `x^n mod gamma` by contraction, by binary powering, and for small `n` by
/// long division.
pub fn modexp_suite(seed: u64, instances: u32, max_d: usize, max_n: u64) -> SuiteResult {
    let mut rng = SplitMix64::new(seed);
    let mut out = SuiteResult { name: "modexp", cases: 0, failures: 0, detail: String::new() };
    let field = PrimeField::new(DEFAULT_PRIME).unwrap();
    let engine = PlainMul::default();
    for case in 0..instances {
        let d = 1 + rng.below(max_d as u64) as usize;
        let mut gamma: Vec<u64> = (0..d).map(|_| rng.below(DEFAULT_PRIME)).collect();
        if case % 3 == 0 && d > 1 {
            // force a power of x dividing gamma to exercise the split
            let mult = 1 + rng.below(d as u64 - 1) as usize;
            for g in gamma.iter_mut().take(mult) {
                *g = 0;
            }
        }
        gamma.push(1);
        let modulus = ModulusPoly::new(&field, &gamma).unwrap();
        let n = rng.below(max_n + 1);
        let a = modexp_new(&field, &engine, &modulus, n).unwrap();
        let b = modexp_binary(&field, &engine, &modulus, n).unwrap();
        out.record(a == b, || format!("case {case}: contraction != binary (d={d}, n={n})"));
        if n <= 4096 {
            let mut xn = vec![0u64; n as usize + 1];
            xn[n as usize] = 1;
            let (_, mut rem) = poly_divrem(&field, &xn, &gamma).unwrap();
            rem.resize(d, 0);
            out.record(a == rem, || format!("case {case}: contraction != division (d={d}, n={n})"));
        }
    }
    out
}

/// Windows of terms against naive expansion.
pub fn slice_suite(seed: u64, instances: u32, max_d: usize, max_n: u64) -> SuiteResult {
    let mut rng = SplitMix64::new(seed);
    let mut out = SuiteResult { name: "slices", cases: 0, failures: 0, detail: String::new() };
    let field = PrimeField::new(DEFAULT_PRIME).unwrap();
    let engine = PlainMul::default();
    for case in 0..instances {
        let d = 1 + rng.below(max_d as u64) as usize;
        let coeffs: Vec<u64> = (0..d).map(|_| rng.below(DEFAULT_PRIME)).collect();
        let init: Vec<u64> = (0..d).map(|_| rng.below(DEFAULT_PRIME)).collect();
        let rec = LinRec::new(&coeffs, &init).unwrap();
        let n = rng.below(max_n + 1);
        let slice = new_fiduccia_slice(&field, &engine, &rec, n).unwrap();
        let want = {
            let full = initial_segment_naive(&field, &rec, n as usize + d);
            full[n as usize..].to_vec()
        };
        out.record(
            slice.values == want && slice.start_index == n as i64,
            || format!("case {case}: slice at {n} disagrees (d={d})"),
        );
        let series = rec.to_rational(&field, &engine).unwrap();
        let msb = series_slice_msb(&field, &engine, &series, n).unwrap();
        out.record(msb.values == want, || format!("case {case}: msb window at {n} disagrees (d={d})"));
        let len = rng.below(6 * d as u64 + 2) as usize;
        let blocks = initial_segment(&field, &engine, &rec, len).unwrap();
        let naive = initial_segment_naive(&field, &rec, len);
        out.record(blocks == naive, || format!("case {case}: segment len {len} disagrees (d={d})"));
    }
    out
}

/// Transform plumbing: roundtrips, doubling, halving, alternation, products.
pub fn dft_suite(seed: u64, instances: u32, max_k: u32) -> SuiteResult {
    let mut rng = SplitMix64::new(seed);
    let mut out = SuiteResult { name: "dft", cases: 0, failures: 0, detail: String::new() };
    let field = PrimeField::new(DEFAULT_PRIME).unwrap();
    let engine = PlainMul::default();
    let plan = DftPlan::new(&field, max_k).unwrap();
    for case in 0..instances {
        let k = 1 + rng.below(max_k as u64) as u32;
        let n = 1usize << k;
        let poly: Vec<u64> = (0..n).map(|_| rng.below(DEFAULT_PRIME)).collect();
        let hat = plan.dft_forward(&field, &poly, k).unwrap();
        let back = plan.dft_inverse(&field, &hat, k).unwrap();
        out.record(back == poly, || format!("case {case}: roundtrip failed at k={k}"));
        if k < plan.max_k() {
            let doubled = plan.dft_double(&field, &hat, k).unwrap();
            let direct = plan.dft_forward(&field, &poly, k + 1).unwrap();
            out.record(doubled == direct, || format!("case {case}: doubling failed at k={k}"));
        }
        let evens = plan.dft_halve_even(&field, &hat, k).unwrap();
        let odds = plan.dft_halve_odd(&field, &hat, k).unwrap();
        let epart: Vec<u64> = poly.iter().step_by(2).copied().collect();
        let opart: Vec<u64> = poly.iter().skip(1).step_by(2).copied().collect();
        let ewant = plan.dft_forward(&field, &epart, k - 1).unwrap();
        let owant = plan.dft_forward(&field, &opart, k - 1).unwrap();
        out.record(evens == ewant, || format!("case {case}: even halving failed at k={k}"));
        out.record(odds == owant, || format!("case {case}: odd halving failed at k={k}"));
        let alt_poly: Vec<u64> =
            poly.iter().enumerate().map(|(i, c)| if i % 2 == 1 { field.neg(c) } else { *c }).collect();
        let alt_hat = dft_alternate(&hat);
        let want_alt = plan.dft_forward(&field, &alt_poly, k).unwrap();
        out.record(alt_hat == want_alt, || format!("case {case}: alternation failed at k={k}"));
        // product through the transform against direct multiplication
        let half = 1usize << (k - 1);
        let a: Vec<u64> = (0..half).map(|_| rng.below(DEFAULT_PRIME)).collect();
        let b: Vec<u64> = (0..half).map(|_| rng.below(DEFAULT_PRIME)).collect();
        let fast = plan.fft_poly_mul(&field, &a, &b).unwrap();
        let slow = engine.mul(&field, &a, &b);
        out.record(fast == slow, || format!("case {case}: product failed at k={k}"));
    }
    out
}

/// Matrix powers through the characteristic polynomial against binary
/// powering.
pub fn matrix_suite(seed: u64, instances: u32, max_dim: usize, max_n: u64) -> SuiteResult {
    let mut rng = SplitMix64::new(seed);
    let mut out = SuiteResult { name: "matrix-pow", cases: 0, failures: 0, detail: String::new() };
    let field = PrimeField::new(DEFAULT_PRIME).unwrap();
    let engine = PlainMul::default();
    for case in 0..instances {
        let dim = 1 + rng.below(max_dim as u64) as usize;
        let data: Vec<u64> = (0..dim * dim).map(|_| rng.below(DEFAULT_PRIME)).collect();
        let m = SquareMatrix::new(dim, data).unwrap();
        let n = rng.below(max_n + 1);
        let a = matrix_pow(&field, &engine, &m, n).unwrap();
        let b = matrix_pow_binary(&field, &m, n).unwrap();
        out.record(a == b, || format!("case {case}: dim={dim} n={n} disagrees"));
    }
    out
}

/// Fibonacci routes against doubling identities.
pub fn fib_suite(seed: u64, instances: u32) -> SuiteResult {
    let mut rng = SplitMix64::new(seed);
    let mut out = SuiteResult { name: "fibonacci", cases: 0, failures: 0, detail: String::new() };
    let field = PrimeField::new(DEFAULT_PRIME).unwrap();
    for case in 0..instances {
        let n = rng.below(1 << 50);
        let a = fib_new(&field, n);
        let (b, _) = fib_doubling(&field, n);
        out.record(a == b, || format!("case {case}: halving != doubling at n={n}"));
        let k = 2 + rng.below(40) as u32;
        let p2 = 1u64 << k;
        let c = fib_pow2(&field, p2).unwrap();
        let (d, _) = fib_doubling(&field, p2);
        out.record(c == d, || format!("case {case}: power-of-two route != doubling at n=2^{k}"));
    }
    out
}

/// Run every suite with sizes scaled by `quick`.
pub fn run_all(seed: u64, quick: bool) -> Vec<SuiteResult> {
    let scale = if quick { 1 } else { 4 };
    vec![
        term_routes_suite(seed, 60 * scale, 10, 4000),
        modexp_suite(seed ^ 0x1, 40 * scale, 24, 1 << 40),
        slice_suite(seed ^ 0x2, 40 * scale, 12, 3000),
        dft_suite(seed ^ 0x3, 30 * scale, 9),
        matrix_suite(seed ^ 0x4, 15 * scale, 8, 1 << 30),
        fib_suite(seed ^ 0x5, 40 * scale),
    ]
}
