//! Brute-force reference sums.
//!
//! Floor sums iterate over runs of constant `⌊k^(1/m)⌋`. Fractional and power
//! sums visit every `k`; each root is a fixed-point integer root, so the
//! accumulation is exact integer addition and the only error is the one-ulp
//! truncation per non-perfect power.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{inconsistent, invalid, Error, Result};
use crate::exact::{nth_root, nth_root_u64, Natural, Rat};
use crate::hp::{root_mantissa, HpReal};

/// Default cap on oracle loop iterations.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Exact partial sums over a range of `k`, at a fixed precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootRangeSum {
    pub m: u32,
    pub prec: u32,
    /// `Σ ⌊k^(1/m)·2^prec⌋`.
    pub fixed: BigUint,
    /// `Σ ⌊k^(1/m)⌋`.
    pub floor: BigUint,
    /// Terms that are not perfect powers, i.e. carry one ulp of error.
    pub inexact: u64,
}

impl RootRangeSum {
    pub fn empty(m: u32, prec: u32) -> Self {
        RootRangeSum {
            m,
            prec,
            fixed: BigUint::zero(),
            floor: BigUint::zero(),
            inexact: 0,
        }
    }

    /// Appends the sums of the following range. Combining in ascending order
    /// is deterministic; the sums themselves are exact.
    pub fn merge(&mut self, next: &RootRangeSum) {
        assert_eq!((self.m, self.prec), (next.m, next.prec));
        self.fixed += &next.fixed;
        self.floor += &next.floor;
        self.inexact += next.inexact;
    }

    /// `Σ k^(1/m)` over the range.
    pub fn power_sum(&self) -> HpReal {
        HpReal::from_fixed(
            BigInt::from(self.fixed.clone()),
            self.prec,
            BigUint::from(self.inexact),
        )
    }

    /// `Σ {k^(1/m)}` over the range.
    pub fn frac_sum(&self) -> HpReal {
        let whole = &self.floor << self.prec;
        HpReal::from_fixed(
            BigInt::from(self.fixed.clone()) - BigInt::from(whole),
            self.prec,
            BigUint::from(self.inexact),
        )
    }
}

/// Sums for `k` in `[lo, hi)`.
pub fn root_range_sum(lo: u64, hi: u64, m: u32, prec: u32) -> RootRangeSum {
    assert!(m >= 2, "root degree must be at least 2");
    let mut acc = RootRangeSum::empty(m, prec);
    if lo >= hi {
        return acc;
    }
    let lo = lo.max(1);
    let mut r = nth_root_u64(lo, m);
    let mut next_power = next_power_after(r, m);
    let mut block_len: u64 = 0;
    for k in lo..hi {
        if u128::from(k) == next_power {
            acc.floor += BigUint::from(r) * block_len;
            block_len = 0;
            r += 1;
            next_power = next_power_after(r, m);
        }
        block_len += 1;
        if u128::from(k) == pow_u128(r, m) {
            acc.fixed += BigUint::from(r) << prec;
        } else {
            acc.fixed += root_mantissa(&BigUint::from(k), m, prec);
            acc.inexact += 1;
        }
    }
    acc.floor += BigUint::from(r) * block_len;
    acc
}

fn pow_u128(r: u64, m: u32) -> u128 {
    u128::from(r).checked_pow(m).unwrap_or(u128::MAX)
}

fn next_power_after(r: u64, m: u32) -> u128 {
    pow_u128(r + 1, m)
}

fn to_budgeted_u64(n: &Natural, budget: u64) -> Result<u64> {
    match n.to_u64() {
        Some(v) if v <= budget => Ok(v),
        _ => Err(Error::BudgetExceeded {
            work: n.clone(),
            budget: Natural::from(budget),
        }),
    }
}

fn check_m(m: u32) -> Result<()> {
    if m < 2 {
        return Err(invalid(format!("root degree m must be >= 2, got {m}")));
    }
    Ok(())
}

/// `Σ_{k=1..n} ⌊k^(1/m)⌋` summed run by run: block `r` covers
/// `[r^m, (r+1)^m)`. The budget caps the number of runs, `⌊n^(1/m)⌋`.
pub fn brute_floor_sum(n: &Natural, m: u32, budget: u64) -> Result<Natural> {
    check_m(m)?;
    let top = nth_root(n, m);
    let runs = top.to_u64().filter(|&r| r <= budget).ok_or_else(|| Error::BudgetExceeded {
        work: top.clone(),
        budget: Natural::from(budget),
    })?;
    if n.is_zero() {
        return Ok(Natural::zero());
    }
    if let Some(n64) = n.to_u64() {
        // every block boundary (r+1)^m <= n < 2^64, and the total stays below 2^128
        let mut total: u128 = 0;
        let mut start: u128 = 1;
        for r in 1..runs {
            let end = pow_u128(r + 1, m);
            total += u128::from(r) * (end - start);
            start = end;
        }
        total += u128::from(runs) * (u128::from(n64) + 1 - start);
        return Ok(Natural::from(total));
    }
    let mut total = Natural::zero();
    let mut start = Natural::one();
    for r in 1..runs {
        let end = Natural::from(r + 1).pow(m);
        total += Natural::from(r) * (&end - &start);
        start = end;
    }
    total += Natural::from(runs) * (n + 1u32 - start);
    Ok(total)
}

/// `Σ_{k=1..n} {k^(1/m)}` with error at most one ulp per term.
pub fn brute_frac_sum(n: &Natural, m: u32, prec: u32, budget: u64) -> Result<HpReal> {
    check_m(m)?;
    let n = to_budgeted_u64(n, budget)?;
    Ok(root_range_sum(1, n + 1, m, prec).frac_sum())
}

/// `Σ_{k=1..n} k^(1/m)`.
pub fn power_sum(n: &Natural, m: u32, prec: u32) -> Result<HpReal> {
    check_m(m)?;
    let n = to_budgeted_u64(n, DEFAULT_BUDGET)?;
    Ok(root_range_sum(1, n + 1, m, prec).power_sum())
}

/// Cumulative sums at each checkpoint of a nondecreasing list, in one sweep.
pub fn cumulative_sums_at(ns: &[u64], m: u32, prec: u32, budget: u64) -> Result<Vec<RootRangeSum>> {
    check_m(m)?;
    if ns.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("checkpoints must be nondecreasing"));
    }
    if let Some(&last) = ns.last() {
        if last > budget {
            return Err(Error::BudgetExceeded {
                work: Natural::from(last),
                budget: Natural::from(budget),
            });
        }
    }
    let mut out = Vec::with_capacity(ns.len());
    let mut acc = RootRangeSum::empty(m, prec);
    let mut done = 0u64;
    for &n in ns {
        acc.merge(&root_range_sum(done + 1, n + 1, m, prec));
        done = n;
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

/// The three summatory functions side by side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSums {
    pub n: Natural,
    pub m: u32,
    pub floor_sum: Natural,
    pub frac_sum: HpReal,
    pub power_sum: HpReal,
}

/// Computes floor, fractional and power sums and checks
/// `power = frac + floor` within the accumulated error. The floor sum comes
/// from the run-length path, the other two from the per-term sweep.
pub fn oracle_sums(n: &Natural, m: u32, prec: u32, budget: u64) -> Result<OracleSums> {
    check_m(m)?;
    let n64 = to_budgeted_u64(n, budget)?;
    let sweep = root_range_sum(1, n64 + 1, m, prec);
    let floor_sum = brute_floor_sum(n, m, budget)?;
    let frac_sum = sweep.frac_sum();
    let power_sum = sweep.power_sum();
    let recombined = &frac_sum + &HpReal::from_integer(floor_sum.clone(), prec);
    let gap = (&recombined - &power_sum).abs();
    let allowed = frac_sum.err_ulps() + power_sum.err_ulps();
    if gap.mantissa().magnitude() > &allowed {
        return Err(inconsistent(format!(
            "power sum differs from frac + floor by {gap:e} at n = {n}, m = {m}",
            gap = gap.to_f64()
        )));
    }
    Ok(OracleSums {
        n: n.clone(),
        m,
        floor_sum,
        frac_sum,
        power_sum,
    })
}

/// Counts for the square-root counting identity on `k ≤ n²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub side: u64,
    pub x: Rat,
    /// `Σ_{j=1..n-1} (1 + ⌊x(2j+x)⌋)` exactly as written.
    pub printed_formula: Natural,
    /// `|{k ≤ n² : {√k} ∈ (0, x)}|` by enumeration.
    pub direct_open: Natural,
    /// `|{k < n² : {√k} ∈ [0, x)}|` by enumeration.
    pub direct_half_open: Natural,
    /// `Σ_{j=1..n-1} ⌈x(2j+x)⌉`, which counts the half-open variant.
    pub ceil_formula: Natural,
}

impl CountReport {
    pub fn printed_formula_agrees(&self) -> bool {
        self.printed_formula == self.direct_open
    }
}

/// Evaluates the counting identity for `{√k} < x` on `k ≤ n²` both ways.
///
/// The printed form `Σ 1 + ⌊x(2j+x)⌋` is reported next to the direct counts
/// without being trusted. The ceiling form must match the half-open count,
/// otherwise this is a consistency failure.
pub fn count_frac_below(side: u64, x: &Rat) -> Result<CountReport> {
    if side < 2 {
        return Err(invalid("the square side must be at least 2"));
    }
    let zero = Rat::zero();
    let one = Rat::one();
    if *x <= zero || *x > one {
        return Err(invalid(format!("x must lie in (0, 1], got {x}")));
    }
    let mut printed = Natural::zero();
    let mut ceil_sum = Natural::zero();
    for j in 1..side {
        let width = x * (Rat::from_integer(BigInt::from(2 * j)) + x);
        let fl = width.floor().to_integer();
        let ce = width.ceil().to_integer();
        printed += (fl + 1u32).to_biguint().unwrap_or_default();
        ceil_sum += ce.to_biguint().unwrap_or_default();
    }

    // {√k} < x  <=>  k < (r + x)^2  <=>  k·d² < (r·d + a)², with x = a/d
    let a = x.numer().clone();
    let d = x.denom().clone();
    let d2 = &d * &d;
    let below = |k: u64, r: u64| {
        let lhs = BigInt::from(k) * &d2;
        let t = BigInt::from(r) * &d + &a;
        lhs < &t * &t
    };
    let mut open = 0u64;
    let mut half_open = 0u64;
    let limit = side * side;
    for k in 1..=limit {
        let r = nth_root_u64(k, 2);
        let perfect = r * r == k;
        let b = below(k, r);
        if b && !perfect {
            open += 1;
        }
        if b && k < limit {
            half_open += 1;
        }
    }
    let report = CountReport {
        side,
        x: x.clone(),
        printed_formula: printed,
        direct_open: Natural::from(open),
        direct_half_open: Natural::from(half_open),
        ceil_formula: ceil_sum,
    };
    if report.ceil_formula != report.direct_half_open {
        return Err(inconsistent(format!(
            "ceiling count {} disagrees with direct count {} for n = {side}, x = {x}",
            report.ceil_formula, report.direct_half_open
        )));
    }
    Ok(report)
}
