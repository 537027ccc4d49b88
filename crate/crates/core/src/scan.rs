//! Parallel scan over the good primes up to a bound.

use rayon::prelude::*;
use thiserror::Error;

use crate::curve::CurveFamily;
use crate::hasse_witt::{trace, HwError};
use crate::modp::{PrimeField, SqrtStrategy};
use crate::sieve::{sieve_segment, SIEVE_CEILING};
use crate::stats::{MomentAccumulator, ScanReport, SplitFilter, DEFAULT_BINS};

pub const DEFAULT_CHUNK: u64 = 1 << 20;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("trace failed at p = {p}: {source}")]
    Trace { p: u64, source: HwError },
    #[error("limit {0} is above the sieve ceiling 2^40 + 2^32")]
    LimitTooLarge(u64),
    #[error("chunk width must be positive")]
    ZeroChunk,
    #[error("cannot build thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub bins: usize,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    /// Width of the prime intervals handed to workers.
    pub chunk: u64,
    pub sqrt: SqrtStrategy,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { bins: DEFAULT_BINS, threads: 0, chunk: DEFAULT_CHUNK, sqrt: SqrtStrategy::TonelliShanks }
    }
}

/// Accumulates the good primes in `[lo, hi)` that pass `filter`.
pub fn scan_range(
    curve: &CurveFamily,
    lo: u64,
    hi: u64,
    filter: &SplitFilter,
    bins: usize,
    sqrt: SqrtStrategy,
) -> Result<MomentAccumulator, ScanError> {
    let mut acc = MomentAccumulator::new(bins);
    for p in sieve_segment(lo, hi) {
        if !curve.is_good_prime(p) {
            continue;
        }
        let field = PrimeField::new(p).expect("sieved odd prime");
        if !filter.passes(&field) {
            continue;
        }
        let t = trace(curve, &field, sqrt).map_err(|source| ScanError::Trace { p, source })?;
        acc.push_trace(t.t, p);
    }
    Ok(acc)
}

/// Scans all good primes `p <= limit` passing `filter`.
///
/// Chunks are merged in ascending order, so for a fixed chunk width the
/// result does not depend on the thread count.
pub fn scan(
    curve: &CurveFamily,
    limit: u64,
    filter: &SplitFilter,
    opts: &ScanOptions,
) -> Result<ScanReport, ScanError> {
    if limit >= SIEVE_CEILING {
        return Err(ScanError::LimitTooLarge(limit));
    }
    if opts.chunk == 0 {
        return Err(ScanError::ZeroChunk);
    }
    let end = limit + 1;
    let starts: Vec<u64> = (0..end.div_ceil(opts.chunk)).map(|k| k * opts.chunk).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.threads).build()?;
    let parts: Vec<Result<MomentAccumulator, ScanError>> = pool.install(|| {
        starts
            .par_iter()
            .map(|&lo| scan_range(curve, lo, (lo + opts.chunk).min(end), filter, opts.bins, opts.sqrt))
            .collect()
    });
    let mut stats = MomentAccumulator::new(opts.bins);
    for part in parts {
        stats.merge(&part?);
    }
    Ok(ScanReport { curve: *curve, limit, filter: filter.description().to_string(), stats })
}
