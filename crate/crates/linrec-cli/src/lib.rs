//! Command line front end over `linrec-core`: parse a problem description,
//! dispatch to the requested algorithm, print decimal values one per line.
//!
//! Exit codes: 0 on success, 1 when a self-test suite reports mismatches,
//! 2 on malformed usage, 3 when a ring or algorithm precondition fails
//! (composite modulus where a field is needed, non-invertible leading
//! coefficient, index overflow, and so on).

pub mod bench;

use std::fmt::Display;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Deserialize;

use linrec_core::apps::{fib_doubling, fib_new, fib_pow2, matrix_pow, matrix_pow_binary, SquareMatrix};
use linrec_core::kernel::{
    many_coeff_msb, one_coeff_fft, one_coeff_lsb, one_coeff_msb, one_term, slice_coeff_msb,
    LinRec, RationalSeries,
};
use linrec_core::modexp::{
    fiduccia_term, modexp_binary, modexp_new, new_fiduccia_slice, new_fiduccia_slice_ending_at,
    ModulusPoly,
};
use linrec_core::ntt::{min_k_for_len, DftPlan};
use linrec_core::poly::PlainMul;
use linrec_core::ring::DEFAULT_PRIME;
use linrec_core::selftest::run_all;
use linrec_core::{BigIntRing, ModRing, PrimeField, Ring};

#[derive(Parser, Debug)]
#[command(
    name = "linrec",
    version,
    about = "Terms of linear recurrences, coefficients of rational series, \
             and x^N mod Gamma, in O(M(d) log N) ring operations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// N-th term of a linear recurrence given coefficients and initial values
    Term(TermArgs),
    /// Coefficient of x^N in P(x)/Q(x), for one or several numerators
    Coeff(CoeffArgs),
    /// A run of d consecutive terms in one computation
    Slice(SliceArgs),
    /// x^N modulo a polynomial
    Modexp(ModexpArgs),
    /// Fibonacci numbers with very few multiplications
    Fib(FibArgs),
    /// Matrix power through the characteristic polynomial
    Matpow(MatpowArgs),
    /// Operation-count measurements over a (d, N, algorithm) grid, as CSV
    Bench(bench::BenchArgs),
    /// Seeded randomized cross-checks of every algorithm against its oracle
    Selftest(SelftestArgs),
}

/// Coefficient lists are comma-separated decimal integers, lowest degree
/// first; negatives are reduced into the ring.
#[derive(Args, Debug, Default)]
pub struct TermArgs {
    /// Recurrence coefficients c0,...,c(d-1): u[k] = c(d-1) u[k-1] + ... + c0 u[k-d]
    #[arg(long, allow_hyphen_values = true)]
    pub rec: Option<String>,
    /// Initial values u0,...,u(d-1)
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    /// Term index
    #[arg(short = 'N')]
    pub n: Option<u64>,
    /// Work modulo this integer (default 998244353)
    #[arg(long = "mod", conflicts_with = "bigint")]
    pub modulus: Option<u64>,
    /// Work over arbitrary-precision integers
    #[arg(long)]
    pub bigint: bool,
    #[arg(long, value_enum, default_value_t = TermAlgo::Auto)]
    pub algo: TermAlgo,
    /// JSON file carrying any of the flags above (explicit flags win)
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Default)]
pub enum TermAlgo {
    /// Index-halving contraction (same as lsb)
    #[default]
    Auto,
    /// Least-significant-bit-first contraction on the generating series
    Lsb,
    /// Most-significant-bit-first window descent
    Msb,
    /// Contraction in the transform domain (needs an NTT-capable prime)
    Fft,
    /// x^N mod Gamma by binary powering, then one inner product
    Fiduccia,
}

#[derive(Args, Debug, Default)]
pub struct CoeffArgs {
    /// Numerator P, repeatable: every numerator shares the denominator
    #[arg(long = "num", allow_hyphen_values = true)]
    pub nums: Vec<String>,
    /// Denominator Q with Q(0) invertible
    #[arg(long, allow_hyphen_values = true)]
    pub den: Option<String>,
    /// Coefficient index
    #[arg(short = 'N')]
    pub n: Option<u64>,
    /// Expected numerator count (checked against the --num occurrences)
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "mod", conflicts_with = "bigint")]
    pub modulus: Option<u64>,
    #[arg(long)]
    pub bigint: bool,
    #[arg(long, value_enum, default_value_t = CoeffAlgo::Auto)]
    pub algo: CoeffAlgo,
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Default)]
pub enum CoeffAlgo {
    #[default]
    Auto,
    Lsb,
    Msb,
    Fft,
}

#[derive(Args, Debug, Default)]
pub struct SliceArgs {
    /// Recurrence coefficients (with --init): slice of the sequence
    #[arg(long, requires = "init", allow_hyphen_values = true)]
    pub rec: Option<String>,
    /// Initial values for --rec
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    /// Denominator Q alone: window of 1/Q ending at N
    #[arg(long, conflicts_with = "rec", allow_hyphen_values = true)]
    pub den: Option<String>,
    /// Slice anchor index
    #[arg(short = 'N')]
    pub n: Option<u64>,
    /// Return u[N-d+1..=N] instead of u[N..=N+d-1] (recurrence input only)
    #[arg(long)]
    pub ending_at: bool,
    #[arg(long = "mod", conflicts_with = "bigint")]
    pub modulus: Option<u64>,
    #[arg(long)]
    pub bigint: bool,
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct ModexpArgs {
    /// Modulus polynomial Gamma, lowest degree first, invertible leading coefficient
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Exponent
    #[arg(short = 'N')]
    pub n: Option<u64>,
    #[arg(long = "mod", conflicts_with = "bigint")]
    pub modulus: Option<u64>,
    #[arg(long)]
    pub bigint: bool,
    #[arg(long, value_enum, default_value_t = ModexpAlgo::Auto)]
    pub algo: ModexpAlgo,
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Default)]
pub enum ModexpAlgo {
    /// Window descent on the reversed modulus (same as new)
    #[default]
    Auto,
    /// Transposed contraction: two size-d products per bit of N
    New,
    /// Classical square-and-reduce with a precomputed Newton inverse
    Binary,
}

#[derive(Args, Debug, Default)]
pub struct FibArgs {
    /// Index (F_0 = 0, F_1 = 1)
    #[arg(short = 'N')]
    pub n: Option<u64>,
    /// Work modulo this integer instead of exact integers
    #[arg(long = "mod", conflicts_with = "bigint")]
    pub modulus: Option<u64>,
    /// Exact integers (the default for fib)
    #[arg(long)]
    pub bigint: bool,
    #[arg(long, value_enum, default_value_t = FibAlgo::Auto)]
    pub algo: FibAlgo,
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Default)]
pub enum FibAlgo {
    /// Scalar index halving, at most 2 ceil(log2 N) - 1 products (same as new)
    #[default]
    Auto,
    New,
    /// Power-of-two indices only: exactly 2 log2(N) - 3 products
    Pow2,
    /// Classical doubling identities
    Doubling,
}

#[derive(Args, Debug, Default)]
pub struct MatpowArgs {
    /// Square matrix, rows separated by ';', entries by ',' (e.g. "1,1;1,0")
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: Option<String>,
    /// Exponent
    #[arg(short = 'N')]
    pub n: Option<u64>,
    /// Prime modulus (the characteristic-polynomial route needs a field)
    #[arg(long = "mod")]
    pub modulus: Option<u64>,
    #[arg(long, value_enum, default_value_t = MatpowAlgo::Auto)]
    pub algo: MatpowAlgo,
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Default)]
pub enum MatpowAlgo {
    /// x^N mod char_poly, then Paterson-Stockmeyer (same as charpoly)
    #[default]
    Auto,
    Charpoly,
    /// Repeated squaring in the matrix ring
    Binary,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0xA5EED)]
    pub seed: u64,
    /// Run reduced instance counts
    #[arg(long)]
    pub quick: bool,
}

/// What a finished command hands back to `main`.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub status: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, status: 0 }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed input: exits 2, matching the parser's own convention.
    Usage(String),
    /// Violated ring or algorithm precondition: exits 3.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => m,
        }
    }
}

impl From<linrec_core::Error> for CliError {
    fn from(e: linrec_core::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn execute(cli: Cli) -> Result<Output, CliError> {
    match cli.cmd {
        Cmd::Term(a) => term_cmd(a),
        Cmd::Coeff(a) => coeff_cmd(a),
        Cmd::Slice(a) => slice_cmd(a),
        Cmd::Modexp(a) => modexp_cmd(a),
        Cmd::Fib(a) => fib_cmd(a),
        Cmd::Matpow(a) => matpow_cmd(a),
        Cmd::Bench(a) => bench::bench_cmd(a),
        Cmd::Selftest(a) => selftest_cmd(a),
    }
}

// ---- input parsing ----------------------------------------------------

/// One `--num` in a JSON problem file: a single list or several.
#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
enum NumSpec {
    One(String),
    Many(Vec<String>),
}

/// JSON mirror of the data-subcommand flags; explicit flags win on merge.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileSpec {
    rec: Option<String>,
    init: Option<String>,
    num: Option<NumSpec>,
    den: Option<String>,
    gamma: Option<String>,
    matrix: Option<String>,
    n: Option<u64>,
    #[serde(rename = "mod")]
    modulus: Option<u64>,
    bigint: Option<bool>,
    algo: Option<String>,
    k: Option<usize>,
    ending_at: Option<bool>,
}

fn load_file(path: &PathBuf) -> Result<FileSpec, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_algo<A: ValueEnum>(name: &str) -> Result<A, CliError> {
    A::from_str(name, true).map_err(|_| usage(format!("unknown algorithm '{name}'")))
}

/// Comma-separated decimal integers, arbitrary size, negatives allowed.
fn parse_int_list(what: &str, s: &str) -> Result<Vec<BigInt>, CliError> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let t = part.trim();
        let v: BigInt = t
            .parse()
            .map_err(|_| usage(format!("{what}: '{t}' is not a decimal integer")))?;
        out.push(v);
    }
    Ok(out)
}

fn reduce_list(list: &[BigInt], reduce: impl Fn(&BigInt) -> u64) -> Vec<u64> {
    list.iter().map(&reduce).collect()
}

/// Ring requested on the command line.
enum RingSel {
    Big,
    Mod(u64),
}

fn ring_sel(modulus: Option<u64>, bigint: bool, default_big: bool) -> RingSel {
    if bigint {
        RingSel::Big
    } else if let Some(m) = modulus {
        RingSel::Mod(m)
    } else if default_big {
        RingSel::Big
    } else {
        RingSel::Mod(DEFAULT_PRIME)
    }
}

fn lines_of<T: Display>(values: impl IntoIterator<Item = T>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n")
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("{flag} is required")))
}

/// An NTT plan sized for degree-d work over a prime that must support it.
fn field_and_plan(m: u64, d: usize) -> Result<(PrimeField, DftPlan), CliError> {
    let field = PrimeField::new(m)?;
    let plan = DftPlan::new(&field, min_k_for_len(2 * d + 1))?;
    Ok((field, plan))
}

// ---- term -------------------------------------------------------------

fn term_cmd(mut a: TermArgs) -> Result<Output, CliError> {
    if let Some(path) = &a.file {
        let f = load_file(path)?;
        a.rec = a.rec.or(f.rec);
        a.init = a.init.or(f.init);
        a.n = a.n.or(f.n);
        a.modulus = a.modulus.or(f.modulus);
        a.bigint = a.bigint || f.bigint.unwrap_or(false);
        if a.algo == TermAlgo::Auto {
            if let Some(name) = &f.algo {
                a.algo = parse_algo(name)?;
            }
        }
    }
    let rec = parse_int_list("--rec", &need(a.rec, "--rec")?)?;
    let init = parse_int_list("--init", &need(a.init, "--init")?)?;
    if rec.len() != init.len() {
        return Err(usage("--rec and --init must have the same length"));
    }
    let n = need(a.n, "-N")?;
    match ring_sel(a.modulus, a.bigint, false) {
        RingSel::Big => {
            if a.algo == TermAlgo::Fft {
                return Err(CliError::Domain(
                    "the fft route needs an NTT-capable prime modulus, not --bigint".into(),
                ));
            }
            let ring = BigIntRing;
            let v = term_in_ring(&ring, rec, init, n, a.algo)?;
            Ok(Output::ok(v.to_string()))
        }
        RingSel::Mod(m) => {
            if a.algo == TermAlgo::Fft {
                let (field, plan) = field_and_plan(m, rec.len())?;
                let coeffs = reduce_list(&rec, |v| field.reduce_bigint(v));
                let init = reduce_list(&init, |v| field.reduce_bigint(v));
                let rec = LinRec::new(&coeffs, &init)?;
                let f = rec.to_rational(&field, &PlainMul::default())?;
                let v = one_coeff_fft(&field, &plan, &f, n)?;
                return Ok(Output::ok(v.to_string()));
            }
            let ring = ModRing::new(m)?;
            let coeffs = reduce_list(&rec, |v| ring.reduce_bigint(v));
            let init = reduce_list(&init, |v| ring.reduce_bigint(v));
            let v = term_in_ring(&ring, coeffs, init, n, a.algo)?;
            Ok(Output::ok(v.to_string()))
        }
    }
}

fn term_in_ring<R: Ring>(
    ring: &R,
    coeffs: Vec<R::Elem>,
    init: Vec<R::Elem>,
    n: u64,
    algo: TermAlgo,
) -> Result<R::Elem, CliError> {
    let engine = PlainMul::default();
    let rec = LinRec::new(&coeffs, &init)?;
    let v = match algo {
        TermAlgo::Auto | TermAlgo::Lsb => one_term(ring, &engine, &rec, n)?,
        TermAlgo::Msb => {
            if (n as usize) < rec.order() {
                rec.init()[n as usize].clone()
            } else {
                let f = rec.to_rational(ring, &engine)?;
                one_coeff_msb(ring, &engine, &f, n)?
            }
        }
        TermAlgo::Fiduccia => fiduccia_term(ring, &engine, &rec, n, false)?,
        TermAlgo::Fft => unreachable!("fft is dispatched before the generic path"),
    };
    Ok(v)
}

// ---- coeff ------------------------------------------------------------

fn coeff_cmd(mut a: CoeffArgs) -> Result<Output, CliError> {
    if let Some(path) = &a.file {
        let f = load_file(path)?;
        if a.nums.is_empty() {
            a.nums = match f.num {
                Some(NumSpec::One(s)) => vec![s],
                Some(NumSpec::Many(v)) => v,
                None => Vec::new(),
            };
        }
        a.den = a.den.or(f.den);
        a.n = a.n.or(f.n);
        a.k = a.k.or(f.k);
        a.modulus = a.modulus.or(f.modulus);
        a.bigint = a.bigint || f.bigint.unwrap_or(false);
        if a.algo == CoeffAlgo::Auto {
            if let Some(name) = &f.algo {
                a.algo = parse_algo(name)?;
            }
        }
    }
    if a.nums.is_empty() {
        return Err(usage("--num is required (repeat it for several numerators)"));
    }
    if let Some(k) = a.k {
        if k != a.nums.len() {
            return Err(usage(format!(
                "--k {k} does not match the {} --num occurrence(s)",
                a.nums.len()
            )));
        }
    }
    let nums: Vec<Vec<BigInt>> = a
        .nums
        .iter()
        .map(|s| parse_int_list("--num", s))
        .collect::<Result<_, _>>()?;
    let den = parse_int_list("--den", &need(a.den, "--den")?)?;
    if den.len() < 2 {
        return Err(usage("--den needs degree at least 1 (two or more coefficients)"));
    }
    let n = need(a.n, "-N")?;
    match ring_sel(a.modulus, a.bigint, false) {
        RingSel::Big => {
            if a.algo == CoeffAlgo::Fft {
                return Err(CliError::Domain(
                    "the fft route needs an NTT-capable prime modulus, not --bigint".into(),
                ));
            }
            let ring = BigIntRing;
            let values = coeff_in_ring(&ring, nums, den, n, a.algo)?;
            Ok(Output::ok(lines_of(values)))
        }
        RingSel::Mod(m) => {
            if a.algo == CoeffAlgo::Fft {
                let (field, plan) = field_and_plan(m, den.len() - 1)?;
                let den = reduce_list(&den, |v| field.reduce_bigint(v));
                let mut out = Vec::new();
                for num in &nums {
                    let num = reduce_list(num, |v| field.reduce_bigint(v));
                    let f = RationalSeries::new(&field, &num, &den)?;
                    out.push(one_coeff_fft(&field, &plan, &f, n)?);
                }
                return Ok(Output::ok(lines_of(out)));
            }
            let ring = ModRing::new(m)?;
            let nums: Vec<Vec<u64>> =
                nums.iter().map(|v| reduce_list(v, |x| ring.reduce_bigint(x))).collect();
            let den = reduce_list(&den, |v| ring.reduce_bigint(v));
            let values = coeff_in_ring(&ring, nums, den, n, a.algo)?;
            Ok(Output::ok(lines_of(values)))
        }
    }
}

fn coeff_in_ring<R: Ring>(
    ring: &R,
    nums: Vec<Vec<R::Elem>>,
    den: Vec<R::Elem>,
    n: u64,
    algo: CoeffAlgo,
) -> Result<Vec<R::Elem>, CliError> {
    let engine = PlainMul::default();
    let values = match algo {
        CoeffAlgo::Auto | CoeffAlgo::Msb => many_coeff_msb(ring, &engine, &nums, &den, n)?,
        CoeffAlgo::Lsb => {
            let mut out = Vec::with_capacity(nums.len());
            for num in &nums {
                let f = RationalSeries::new(ring, num, &den)?;
                out.push(one_coeff_lsb(ring, &engine, &f, n)?);
            }
            out
        }
        CoeffAlgo::Fft => unreachable!("fft is dispatched before the generic path"),
    };
    Ok(values)
}

// ---- slice ------------------------------------------------------------

fn slice_cmd(mut a: SliceArgs) -> Result<Output, CliError> {
    if let Some(path) = &a.file {
        let f = load_file(path)?;
        a.rec = a.rec.or(f.rec);
        a.init = a.init.or(f.init);
        a.den = a.den.or(f.den);
        a.n = a.n.or(f.n);
        a.modulus = a.modulus.or(f.modulus);
        a.bigint = a.bigint || f.bigint.unwrap_or(false);
        a.ending_at = a.ending_at || f.ending_at.unwrap_or(false);
    }
    let n = need(a.n, "-N")?;
    match (&a.rec, &a.den) {
        (Some(_), Some(_)) => Err(usage("give either --rec/--init or --den, not both")),
        (None, None) => Err(usage("give --rec with --init, or --den")),
        (Some(rec_s), None) => {
            let rec = parse_int_list("--rec", rec_s)?;
            let init = parse_int_list("--init", &need(a.init.clone(), "--init")?)?;
            if rec.len() != init.len() {
                return Err(usage("--rec and --init must have the same length"));
            }
            match ring_sel(a.modulus, a.bigint, false) {
                RingSel::Big => {
                    let ring = BigIntRing;
                    let rec = LinRec::new(&rec, &init)?;
                    Ok(Output::ok(lines_of(slice_of_rec(&ring, &rec, n, a.ending_at)?)))
                }
                RingSel::Mod(m) => {
                    let ring = ModRing::new(m)?;
                    let coeffs = reduce_list(&rec, |v| ring.reduce_bigint(v));
                    let init = reduce_list(&init, |v| ring.reduce_bigint(v));
                    let rec = LinRec::new(&coeffs, &init)?;
                    Ok(Output::ok(lines_of(slice_of_rec(&ring, &rec, n, a.ending_at)?)))
                }
            }
        }
        (None, Some(den_s)) => {
            let den = parse_int_list("--den", den_s)?;
            if den.len() < 2 {
                return Err(usage("--den needs degree at least 1 (two or more coefficients)"));
            }
            match ring_sel(a.modulus, a.bigint, false) {
                RingSel::Big => {
                    let ring = BigIntRing;
                    let engine = PlainMul::default();
                    let w = slice_coeff_msb(&ring, &engine, &den, n)?;
                    Ok(Output::ok(lines_of(w)))
                }
                RingSel::Mod(m) => {
                    let ring = ModRing::new(m)?;
                    let engine = PlainMul::default();
                    let den = reduce_list(&den, |v| ring.reduce_bigint(v));
                    let w = slice_coeff_msb(&ring, &engine, &den, n)?;
                    Ok(Output::ok(lines_of(w)))
                }
            }
        }
    }
}

fn slice_of_rec<R: Ring>(
    ring: &R,
    rec: &LinRec<R::Elem>,
    n: u64,
    ending_at: bool,
) -> Result<Vec<R::Elem>, CliError> {
    let engine = PlainMul::default();
    let s = if ending_at {
        new_fiduccia_slice_ending_at(ring, &engine, rec, n)?
    } else {
        new_fiduccia_slice(ring, &engine, rec, n)?
    };
    Ok(s.values)
}

// ---- modexp -----------------------------------------------------------

fn modexp_cmd(mut a: ModexpArgs) -> Result<Output, CliError> {
    if let Some(path) = &a.file {
        let f = load_file(path)?;
        a.gamma = a.gamma.or(f.gamma);
        a.n = a.n.or(f.n);
        a.modulus = a.modulus.or(f.modulus);
        a.bigint = a.bigint || f.bigint.unwrap_or(false);
        if a.algo == ModexpAlgo::Auto {
            if let Some(name) = &f.algo {
                a.algo = parse_algo(name)?;
            }
        }
    }
    let gamma = parse_int_list("--gamma", &need(a.gamma, "--gamma")?)?;
    let n = need(a.n, "-N")?;
    match ring_sel(a.modulus, a.bigint, false) {
        RingSel::Big => {
            let ring = BigIntRing;
            Ok(Output::ok(lines_of(modexp_in_ring(&ring, gamma, n, a.algo)?)))
        }
        RingSel::Mod(m) => {
            let ring = ModRing::new(m)?;
            let gamma = reduce_list(&gamma, |v| ring.reduce_bigint(v));
            Ok(Output::ok(lines_of(modexp_in_ring(&ring, gamma, n, a.algo)?)))
        }
    }
}

fn modexp_in_ring<R: Ring>(
    ring: &R,
    gamma: Vec<R::Elem>,
    n: u64,
    algo: ModexpAlgo,
) -> Result<Vec<R::Elem>, CliError> {
    let engine = PlainMul::default();
    let modulus = ModulusPoly::new(ring, &gamma)?;
    let rem = match algo {
        ModexpAlgo::Auto | ModexpAlgo::New => modexp_new(ring, &engine, &modulus, n)?,
        ModexpAlgo::Binary => modexp_binary(ring, &engine, &modulus, n)?,
    };
    Ok(rem)
}

// ---- fib --------------------------------------------------------------

fn fib_cmd(mut a: FibArgs) -> Result<Output, CliError> {
    if let Some(path) = &a.file {
        let f = load_file(path)?;
        a.n = a.n.or(f.n);
        a.modulus = a.modulus.or(f.modulus);
        a.bigint = a.bigint || f.bigint.unwrap_or(false);
        if a.algo == FibAlgo::Auto {
            if let Some(name) = &f.algo {
                a.algo = parse_algo(name)?;
            }
        }
    }
    let n = need(a.n, "-N")?;
    match ring_sel(a.modulus, a.bigint, true) {
        RingSel::Big => Ok(Output::ok(fib_in_ring(&BigIntRing, n, a.algo)?)),
        RingSel::Mod(m) => Ok(Output::ok(fib_in_ring(&ModRing::new(m)?, n, a.algo)?)),
    }
}

fn fib_in_ring<R: Ring>(ring: &R, n: u64, algo: FibAlgo) -> Result<String, CliError>
where
    R::Elem: Display,
{
    let v = match algo {
        FibAlgo::Auto | FibAlgo::New => fib_new(ring, n),
        FibAlgo::Pow2 => fib_pow2(ring, n)?,
        FibAlgo::Doubling => fib_doubling(ring, n).0,
    };
    Ok(v.to_string())
}

// ---- matpow -----------------------------------------------------------

fn matpow_cmd(mut a: MatpowArgs) -> Result<Output, CliError> {
    if let Some(path) = &a.file {
        let f = load_file(path)?;
        a.matrix = a.matrix.or(f.matrix);
        a.n = a.n.or(f.n);
        a.modulus = a.modulus.or(f.modulus);
        if a.algo == MatpowAlgo::Auto {
            if let Some(name) = &f.algo {
                a.algo = parse_algo(name)?;
            }
        }
    }
    let text = need(a.matrix, "--matrix")?;
    let n = need(a.n, "-N")?;
    let m = a.modulus.unwrap_or(DEFAULT_PRIME);
    // the characteristic-polynomial route divides by pivots, so this
    // subcommand always works over a prime field
    let field = PrimeField::new(m)?;
    let rows: Vec<Vec<BigInt>> = text
        .split(';')
        .map(|row| parse_int_list("--matrix", row))
        .collect::<Result<_, _>>()?;
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(usage("--matrix must be square: as many entries per row as rows"));
    }
    let data: Vec<u64> = rows.iter().flatten().map(|v| field.reduce_bigint(v)).collect();
    let mat = SquareMatrix::new(dim, data)?;
    let p = match a.algo {
        MatpowAlgo::Auto | MatpowAlgo::Charpoly => {
            matrix_pow(&field, &PlainMul::default(), &mat, n)?
        }
        MatpowAlgo::Binary => matrix_pow_binary(&field, &mat, n)?,
    };
    let text = p
        .rows()
        .map(|row| row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Output::ok(text))
}

// ---- selftest ---------------------------------------------------------

fn selftest_cmd(a: SelftestArgs) -> Result<Output, CliError> {
    let results = run_all(a.seed, a.quick);
    let mut lines = Vec::new();
    let mut failed = false;
    for r in &results {
        if r.passed() {
            lines.push(format!("{}: PASS ({} checks)", r.name, r.cases));
        } else {
            failed = true;
            lines.push(format!("{}: FAIL ({}/{} checks)", r.name, r.failures, r.cases));
            for d in r.detail.lines() {
                lines.push(format!("  {d}"));
            }
        }
    }
    lines.push(if failed { "self-test: FAIL".into() } else { "self-test: PASS".into() });
    Ok(Output { text: lines.join("\n"), status: if failed { 1 } else { 0 } })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_list_parsing() {
        let v = parse_int_list("--rec", "1, -1,  0,42").unwrap();
        assert_eq!(v, vec![1.into(), (-1).into(), 0.into(), 42.into()]);
        assert!(parse_int_list("--rec", "1,,2").is_err());
        assert!(parse_int_list("--rec", "x").is_err());
        let huge = parse_int_list("--num", "123456789012345678901234567890").unwrap();
        assert_eq!(huge[0].to_string(), "123456789012345678901234567890");
    }

    #[test]
    fn reduction_handles_negatives() {
        let ring = ModRing::new(97).unwrap();
        let v = parse_int_list("--rec", "-1,96,-97,193").unwrap();
        let r = reduce_list(&v, |x| ring.reduce_bigint(x));
        assert_eq!(r, vec![96, 96, 0, 96]);
    }

    #[test]
    fn term_command_end_to_end() {
        let args = TermArgs {
            rec: Some("1,1".into()),
            init: Some("0,1".into()),
            n: Some(43),
            ..TermArgs::default()
        };
        let out = term_cmd(args).unwrap();
        assert_eq!(out.text, "433494437");
        for algo in [TermAlgo::Lsb, TermAlgo::Msb, TermAlgo::Fft, TermAlgo::Fiduccia] {
            let args = TermArgs {
                rec: Some("1,1".into()),
                init: Some("0,1".into()),
                n: Some(43),
                algo,
                ..TermArgs::default()
            };
            assert_eq!(term_cmd(args).unwrap().text, "433494437", "{algo:?}");
        }
    }

    #[test]
    fn coeff_command_many_numerators() {
        let args = CoeffArgs {
            nums: vec!["0,1".into(), "1".into()],
            den: Some("1,-1,-1".into()),
            n: Some(10),
            k: Some(2),
            ..CoeffArgs::default()
        };
        let out = coeff_cmd(args).unwrap();
        assert_eq!(out.text, "55\n89");
        let bad = CoeffArgs {
            nums: vec!["0,1".into()],
            den: Some("1,-1,-1".into()),
            n: Some(10),
            k: Some(3),
            ..CoeffArgs::default()
        };
        assert_eq!(coeff_cmd(bad).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn modexp_rejects_bad_leading_coefficient() {
        let args = ModexpArgs {
            gamma: Some("1,1,5".into()),
            n: Some(10),
            modulus: Some(15),
            ..ModexpArgs::default()
        };
        let err = modexp_cmd(args).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn fib_defaults_to_exact_integers() {
        let args = FibArgs { n: Some(200), ..FibArgs::default() };
        let out = fib_cmd(args).unwrap();
        assert_eq!(out.text, "280571172992510140037611932413038677189525");
    }
}
