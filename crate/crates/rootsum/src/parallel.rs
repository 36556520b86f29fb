//! Oracle sweeps split across worker threads.
//!
//! The index range is cut into fixed-size chunks, every chunk is summed
//! independently, and the partial sums are merged in ascending order. The
//! partial sums are exact integers, so the result does not depend on the
//! thread count.

use rayon::prelude::*;
use rootsum_core::exact::Natural;
use rootsum_core::hp::HpReal;
use rootsum_core::oracle::{root_range_sum, RootRangeSum};
use rootsum_core::{Error, Result};

const CHUNK: u64 = 1 << 14;

fn chunk_bounds(ns: &[u64]) -> Vec<(u64, u64)> {
    let mut bounds = Vec::new();
    let mut start = 1u64;
    for &n in ns {
        let end = n + 1;
        while start < end {
            let stop = (start + CHUNK).min(end);
            bounds.push((start, stop));
            start = stop;
        }
    }
    bounds
}

/// Cumulative sums at each checkpoint, computed in parallel.
pub fn cumulative_sums_at(ns: &[u64], m: u32, prec: u32, budget: u64) -> Result<Vec<RootRangeSum>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("root degree m must be >= 2, got {m}")));
    }
    if ns.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be nondecreasing".into()));
    }
    if let Some(&last) = ns.last() {
        if last > budget {
            return Err(Error::BudgetExceeded {
                work: Natural::from(last),
                budget: Natural::from(budget),
            });
        }
    }
    let bounds = chunk_bounds(ns);
    let parts: Vec<RootRangeSum> = bounds
        .par_iter()
        .map(|&(lo, hi)| root_range_sum(lo, hi, m, prec))
        .collect();

    let mut out = Vec::with_capacity(ns.len());
    let mut acc = RootRangeSum::empty(m, prec);
    let mut parts = bounds.iter().zip(parts.iter()).peekable();
    for &n in ns {
        while let Some((&(_, hi), part)) = parts.peek() {
            if hi > n + 1 {
                break;
            }
            acc.merge(part);
            parts.next();
        }
        out.push(acc.clone());
    }
    Ok(out)
}

/// Fractional-part sums at each checkpoint.
pub fn frac_sums_at(ns: &[u64], m: u32, prec: u32, budget: u64) -> Result<Vec<HpReal>> {
    Ok(cumulative_sums_at(ns, m, prec, budget)?
        .iter()
        .map(RootRangeSum::frac_sum)
        .collect())
}

/// `Σ_{k≤n} {k^(1/m)}`.
pub fn frac_sum(n: u64, m: u32, prec: u32, budget: u64) -> Result<HpReal> {
    Ok(frac_sums_at(&[n], m, prec, budget)?.remove(0))
}
