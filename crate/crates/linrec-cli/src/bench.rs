//! Operation-count measurements over a (d, N, algorithm) grid.
//!
//! Every algorithm runs over a counting wrapper of the default prime field
//! on inputs drawn from a seeded generator, so the CSV depends only on the
//! seed, the Karatsuba threshold, and the grid. Wall times are recorded only
//! under `--timing`; the column is 0 otherwise, which keeps repeated runs
//! byte-identical.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};

use linrec_core::kernel::{
    one_coeff_fft, one_coeff_lsb, one_coeff_msb, slice_coeff_msb_with, LinRec, RationalSeries,
};
use linrec_core::modexp::{fiduccia_term, new_fiduccia_slice};
use linrec_core::ntt::{min_k_for_len, DftPlan, NttMul};
use linrec_core::poly::{MulEngine, PlainMul};
use linrec_core::ring::DEFAULT_PRIME;
use linrec_core::selftest::SplitMix64;
use linrec_core::{CountingRing, PrimeField, Ring};

use crate::{usage, CliError, Output};

const CSV_HEADER: &str = "algo,d,N,mul_count,add_count,wall_time_ns,m_of_d";

#[derive(Args, Debug, Default)]
pub struct BenchArgs {
    /// Recurrence orders, comma separated
    #[arg(long = "d", value_delimiter = ',')]
    pub ds: Vec<usize>,
    /// Indices, comma separated
    #[arg(short = 'N', value_delimiter = ',')]
    pub ns: Vec<u64>,
    /// Algorithms, comma separated (empty grid prints the header only)
    #[arg(long, value_delimiter = ',', value_enum)]
    pub algos: Vec<BenchAlgo>,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Seed for the instance generator
    #[arg(long, default_value_t = 0xA5EED)]
    pub seed: u64,
    /// Plain-multiplication size below which Karatsuba stops recursing
    #[arg(long, default_value_t = 32)]
    pub karatsuba_threshold: usize,
    /// Fill wall_time_ns with real measurements (breaks byte-identity)
    #[arg(long)]
    pub timing: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BenchAlgo {
    /// Contraction, least significant exponent bit first
    Lsb,
    /// Window descent with middle products on the ascent
    Msb,
    /// Window descent with full products, for the middle-product comparison
    MsbPlain,
    /// Contraction with an NTT multiplication engine
    LsbNtt,
    /// Contraction carried out on transform values
    Fft,
    /// x^N mod Gamma by repeated squaring, then an inner product
    Fiduccia,
    /// x^N mod Gamma by transposed contraction, then an inner product
    FiducciaNew,
    /// d consecutive terms in one descent
    Slice,
}

impl BenchAlgo {
    fn name(self) -> &'static str {
        match self {
            BenchAlgo::Lsb => "lsb",
            BenchAlgo::Msb => "msb",
            BenchAlgo::MsbPlain => "msb-plain",
            BenchAlgo::LsbNtt => "lsb-ntt",
            BenchAlgo::Fft => "fft",
            BenchAlgo::Fiduccia => "fiduccia",
            BenchAlgo::FiducciaNew => "fiduccia-new",
            BenchAlgo::Slice => "slice",
        }
    }
}

struct Row {
    algo: &'static str,
    d: usize,
    n: u64,
    mul: u64,
    add: u64,
    wall_ns: u64,
    m_of_d: u64,
}

type BenchRing = CountingRing<PrimeField>;

/// One random problem of order d. Every algorithm measured at this d sees
/// the same coefficients, so drawing happens once, before any counting.
struct Instance {
    rec: LinRec<u64>,
    series: RationalSeries<u64>,
    ma: Vec<u64>,
    mb: Vec<u64>,
}

impl Instance {
    fn draw(ring: &BenchRing, seed: u64, d: usize) -> Self {
        let p = DEFAULT_PRIME;
        let mut rng = SplitMix64::new(seed ^ (d as u64).wrapping_mul(0x9E3779B97F4A7C15));
        let mut coeffs: Vec<u64> = (0..d).map(|_| rng.below(p)).collect();
        // a zero trailing coefficient would drop the denominator degree
        coeffs[0] = 1 + rng.below(p - 1);
        let init: Vec<u64> = (0..d).map(|_| rng.below(p)).collect();
        let ma: Vec<u64> = (0..=d).map(|_| rng.below(p)).collect();
        let mb: Vec<u64> = (0..=d).map(|_| rng.below(p)).collect();
        let rec = LinRec::new(&coeffs, &init).expect("drawn orders match");
        let series = rec.to_rational(ring, &PlainMul::default()).expect("monic reversal");
        Instance { rec, series, ma, mb }
    }
}

pub fn bench_cmd(args: BenchArgs) -> Result<Output, CliError> {
    if args.ds.iter().any(|&d| d == 0) {
        return Err(usage("--d entries must be at least 1"));
    }
    let ring = CountingRing::new(PrimeField::new(DEFAULT_PRIME).expect("default prime is prime"));
    let mut rows = Vec::new();
    for &d in &args.ds {
        let inst = Instance::draw(&ring, args.seed, d);
        for &algo in &args.algos {
            for &n in &args.ns {
                rows.push(run_one(&ring, &inst, d, algo, n, &args)?);
            }
        }
    }
    rows.sort_by(|a, b| (a.algo, a.d, a.n).cmp(&(b.algo, b.d, b.n)));
    let mut csv = String::from(CSV_HEADER);
    for r in &rows {
        csv.push('\n');
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}",
            r.algo, r.d, r.n, r.mul, r.add, r.wall_ns, r.m_of_d
        ));
    }
    match &args.csv {
        Some(path) => {
            fs::write(path, format!("{csv}\n"))
                .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(Output::ok(String::new()))
        }
        None => Ok(Output::ok(csv)),
    }
}

fn run_one(
    ring: &BenchRing,
    inst: &Instance,
    d: usize,
    algo: BenchAlgo,
    n: u64,
    args: &BenchArgs,
) -> Result<Row, CliError> {
    let engine = PlainMul::new(args.karatsuba_threshold);
    // transform grid sized for one (d+1) x (d+1) product
    let need_plan = matches!(algo, BenchAlgo::LsbNtt | BenchAlgo::Fft);
    let plan = if need_plan {
        Some(DftPlan::new(ring, min_k_for_len(2 * d + 1))?)
    } else {
        None
    };

    ring.reset();
    let t0 = Instant::now();
    match algo {
        BenchAlgo::Lsb => {
            one_coeff_lsb(ring, &engine, &inst.series, n)?;
        }
        BenchAlgo::Msb => {
            one_coeff_msb(ring, &engine, &inst.series, n)?;
        }
        BenchAlgo::MsbPlain => {
            let w = slice_coeff_msb_with(ring, &engine, inst.series.den(), n, false)?;
            let num = inst.series.num();
            let mut acc = ring.zero();
            for (j, c) in num.iter().enumerate() {
                acc = ring.add(&acc, &ring.mul(c, &w[d - 1 - j]));
            }
        }
        BenchAlgo::LsbNtt => {
            let ntt = NttMul::new(plan.as_ref().expect("plan built above"));
            one_coeff_lsb(ring, &ntt, &inst.series, n)?;
        }
        BenchAlgo::Fft => {
            one_coeff_fft(ring, plan.as_ref().expect("plan built above"), &inst.series, n)?;
        }
        BenchAlgo::Fiduccia => {
            fiduccia_term(ring, &engine, &inst.rec, n, false)?;
        }
        BenchAlgo::FiducciaNew => {
            fiduccia_term(ring, &engine, &inst.rec, n, true)?;
        }
        BenchAlgo::Slice => {
            new_fiduccia_slice(ring, &engine, &inst.rec, n)?;
        }
    }
    let wall_ns = if args.timing { t0.elapsed().as_nanos() as u64 } else { 0 };
    let counts = ring.snapshot();

    // m(d): one (d+1) x (d+1) product under this algorithm's engine
    ring.reset();
    match algo {
        BenchAlgo::LsbNtt | BenchAlgo::Fft => {
            let plan = plan.as_ref().expect("plan built above");
            plan.fft_poly_mul(ring, &inst.ma, &inst.mb)?;
        }
        _ => {
            engine.mul(ring, &inst.ma, &inst.mb);
        }
    }
    let m_of_d = ring.snapshot().mul_count;

    Ok(Row {
        algo: algo.name(),
        d,
        n,
        mul: counts.mul_count,
        add: counts.add_count,
        wall_ns,
        m_of_d,
    })
}
