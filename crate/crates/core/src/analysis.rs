//! Empirical checks of the asymptotic claims: residual decay, the shape of
//! `y_n = x_n - n/2 + √n/3`, bin statistics of `{k^(1/m)}`, and the limit of
//! `x_{n²} - n²/2 + n/3`.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::error::{inconsistent, invalid, Error, Result};
use crate::exact::{floor_root_sum, floor_sqrt_sum, nth_root_u128, Natural, Rat};
use crate::hp::{eval_expansion, hp_root, zeta_neg_inv, HpReal};
use crate::oracle::{self, root_range_sum};
use crate::series::{self, build_power_sum_expansion, build_sqrt_expansion_closed_form};

/// One line of a residual study.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRow {
    pub n: Natural,
    /// Brute-force `Σ_{k≤n} {k^(1/m)}`.
    pub reference: HpReal,
    /// Expansion of `Σ k^(1/m)` minus the closed-form floor sum.
    pub predicted: HpReal,
    /// `reference - predicted`.
    pub residual: HpReal,
    /// Log-log slope of `|residual|` against the previous usable row.
    pub local_slope: Option<f64>,
    /// The residual does not exceed its own error bound.
    pub precision_limited: bool,
}

/// `log2` of the first omitted correction term at `n`.
pub fn first_omitted_log2(m: u32, p: u32, n: f64) -> f64 {
    series::term_log2_magnitude(&series::em_correction_coeff(m, p + 1), n)
}

/// Magnitude of the first omitted correction term at `n`.
pub fn first_omitted_magnitude(m: u32, p: u32, n: f64) -> f64 {
    libm::exp2(first_omitted_log2(m, p, n))
}

/// Fractional bits needed so that the oracle's error (at most `n` ulps)
/// stays below half of the expected residual at `n`.
pub fn required_precision(m: u32, p: u32, n: f64) -> u32 {
    let need = -first_omitted_log2(m, p, n) + libm::log2(n) + 1.0;
    libm::ceil(need.max(1.0)) as u32
}

/// `K_n - A_n`: the power-sum expansion with `p` corrections and the cached
/// `ζ(-1/m)`, minus the closed-form floor sum.
pub fn frac_sum_expansion(m: u32, p: u32, n: &Natural, prec: u32) -> Result<HpReal> {
    let zeta = zeta_neg_inv(m, prec)?;
    let k = eval_expansion(&build_power_sum_expansion(m, p), &zeta, n, prec)?;
    let a = floor_root_sum(n, m)?.total;
    Ok(&k - &HpReal::from_integer(a, prec))
}

/// The square-root case assembled only from the square-root specific pieces:
/// the hand-derived coefficients and the `(1/6)M(6n+5-3M-2M²)` floor sum.
pub fn sqrt_frac_sum_expansion(p: u32, n: &Natural, prec: u32) -> Result<HpReal> {
    let zeta = zeta_neg_inv(2, prec)?;
    let k = eval_expansion(&build_sqrt_expansion_closed_form(p), &zeta, n, prec)?;
    let b = floor_sqrt_sum(n).total;
    Ok(&k - &HpReal::from_integer(b, prec))
}

fn log_abs(v: &HpReal) -> f64 {
    libm::log(v.to_f64().abs())
}

/// Builds residual rows from precomputed oracle values.
pub fn residual_rows(m: u32, p: u32, references: &[(Natural, HpReal)], prec: u32) -> Result<Vec<ResidualRow>> {
    if m < 2 || p < 1 {
        return Err(invalid("residual studies need m >= 2 and p >= 1"));
    }
    if references.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(invalid("n values must be strictly increasing"));
    }
    if let Some((n_max, _)) = references.last() {
        let need = required_precision(m, p, n_max.to_f64().unwrap_or(f64::MAX));
        if need > prec {
            return Err(Error::PrecisionInsufficient {
                have_bits: prec,
                required_bits: need,
            });
        }
    }
    let mut rows: Vec<ResidualRow> = Vec::with_capacity(references.len());
    let mut last_usable: Option<(f64, f64)> = None;
    for (n, reference) in references {
        let reference = reference.with_precision(prec);
        let predicted = frac_sum_expansion(m, p, n, prec)?;
        let residual = &reference - &predicted;
        let bound = BigInt::from(residual.err_ulps().clone());
        let precision_limited = residual.mantissa().magnitude() <= bound.magnitude();
        let mut local_slope = None;
        if !precision_limited {
            let point = (libm::log(n.to_f64().unwrap_or(f64::MAX)), log_abs(&residual));
            if let Some(prev) = last_usable {
                local_slope = Some((point.1 - prev.1) / (point.0 - prev.0));
            }
            last_usable = Some(point);
        }
        rows.push(ResidualRow {
            n: n.clone(),
            reference,
            predicted,
            residual,
            local_slope,
            precision_limited,
        });
    }
    Ok(rows)
}

/// Residual study for `ns`, with the oracle run sequentially in one sweep.
pub fn residual_table(m: u32, p: u32, ns: &[Natural], prec: u32, budget: u64) -> Result<Vec<ResidualRow>> {
    let small: Vec<u64> = ns
        .iter()
        .map(|n| {
            n.to_u64().ok_or_else(|| Error::BudgetExceeded {
                work: n.clone(),
                budget: Natural::from(budget),
            })
        })
        .collect::<Result<_>>()?;
    if small.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("n values must be strictly increasing"));
    }
    let need = small
        .last()
        .map(|&n| required_precision(m, p, n as f64))
        .unwrap_or(0);
    if need > prec {
        return Err(Error::PrecisionInsufficient {
            have_bits: prec,
            required_bits: need,
        });
    }
    let sums = oracle::frac_sums_at(&small, m, prec, budget)?;
    let refs: Vec<(Natural, HpReal)> = ns.iter().cloned().zip(sums).collect();
    residual_rows(m, p, &refs, prec)
}

/// Least-squares slope of `log|residual|` against `log n` over usable rows
/// with `lo <= n <= hi`. `None` with fewer than two points.
pub fn fit_slope(rows: &[ResidualRow], lo: &Natural, hi: &Natural) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| !r.precision_limited && &r.n >= lo && &r.n <= hi)
        .map(|r| (libm::log(r.n.to_f64().unwrap_or(f64::MAX)), log_abs(&r.residual)))
        .collect();
    least_squares_slope(&pts)
}

/// [`fit_slope`] over the last decade of `n` present in the rows.
pub fn fit_slope_top_decade(rows: &[ResidualRow]) -> Option<f64> {
    let hi = rows.iter().filter(|r| !r.precision_limited).map(|r| &r.n).max()?;
    let lo = hi / 10u32;
    fit_slope(rows, &lo, hi)
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// `y_n` at one index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YSeqPoint {
    pub n: u64,
    pub y: HpReal,
}

/// How often the incremental `y` is compared against a direct evaluation.
pub const Y_CHECK_INTERVAL: u64 = 10_000;

/// Walks `y_n` forward with `y_{n+1} = y_n + {√(n+1)} - 1/2 + (√(n+1) - √n)/3`,
/// re-deriving `y_n` from the running fractional sum every
/// [`Y_CHECK_INTERVAL`] steps.
#[derive(Debug, Clone)]
pub struct YWalker {
    n: u64,
    hi: u64,
    prec: u32,
    /// `x_n`, the running fractional sum
    frac_sum: HpReal,
    root: HpReal,
    y: HpReal,
    started: bool,
}

fn half(prec: u32) -> HpReal {
    HpReal::from_rat(&Rat::new(BigInt::from(1), BigInt::from(2)), prec)
}

fn third() -> Rat {
    Rat::new(BigInt::from(1), BigInt::from(3))
}

fn direct_y(n: u64, frac_sum: &HpReal, root: &HpReal, prec: u32) -> HpReal {
    let n_half = HpReal::from_rat(&Rat::new(BigInt::from(n), BigInt::from(2)), prec);
    &(frac_sum - &n_half) + &root.mul_rat(&third())
}

impl YWalker {
    /// Walker over `[lo, hi]`.
    pub fn new(lo: u64, hi: u64, prec: u32) -> Result<Self> {
        if lo < 1 || hi < lo {
            return Err(invalid(format!("invalid y range [{lo}, {hi}]")));
        }
        let frac_sum = root_range_sum(1, lo + 1, 2, prec).frac_sum();
        let root = hp_root(&Natural::from(lo), 2, prec);
        let y = direct_y(lo, &frac_sum, &root, prec);
        Ok(YWalker {
            n: lo,
            hi,
            prec,
            frac_sum,
            root,
            y,
            started: false,
        })
    }

    /// Current `x_n`.
    pub fn frac_sum(&self) -> &HpReal {
        &self.frac_sum
    }

    fn step(&mut self) -> Result<()> {
        let next = self.n + 1;
        let next_root = hp_root(&Natural::from(next), 2, self.prec);
        let floor = HpReal::from_integer(next_root.floor(), self.prec);
        let frac = &next_root - &floor;
        let drift = (&next_root - &self.root).mul_rat(&third());
        self.y = &(&(&self.y + &frac) - &half(self.prec)) + &drift;
        self.frac_sum = &self.frac_sum + &frac;
        self.root = next_root;
        self.n = next;
        if next.is_multiple_of(Y_CHECK_INTERVAL) {
            let direct = direct_y(next, &self.frac_sum, &self.root, self.prec);
            let gap = (&direct - &self.y).abs();
            let allowed = direct.err_ulps() + self.y.err_ulps();
            if gap.mantissa().magnitude() > &allowed {
                return Err(inconsistent(format!(
                    "incremental y drifted by {:e} at n = {next}",
                    gap.to_f64()
                )));
            }
        }
        Ok(())
    }
}

impl Iterator for YWalker {
    type Item = Result<YSeqPoint>;

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
        } else {
            if self.n >= self.hi {
                return None;
            }
            if let Err(e) = self.step() {
                self.n = self.hi;
                return Some(Err(e));
            }
        }
        Some(Ok(YSeqPoint {
            n: self.n,
            y: self.y.clone(),
        }))
    }
}

/// `y_n` for every `n` in `[lo, hi]`.
pub fn y_sequence(lo: u64, hi: u64, prec: u32) -> Result<Vec<YSeqPoint>> {
    YWalker::new(lo, hi, prec)?.collect()
}

/// Smallest `y` inside one block `[j², (j+1)²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMinimum {
    pub j: u64,
    pub n: u64,
    pub y: f64,
}

/// Findings of a scan of `y_n` over a range.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremaReport {
    pub lo: u64,
    pub hi: u64,
    /// Strict interior local minima.
    pub local_minima: Vec<u64>,
    /// Strict interior local maxima.
    pub local_maxima: Vec<u64>,
    /// Indices with `y_n > 0`.
    pub positive_at: Vec<u64>,
    pub running_max: f64,
    pub running_max_at: u64,
    /// Minimum of each block lying entirely inside the range.
    pub block_minima: Vec<BlockMinimum>,
    /// `max |x_n - n/2| / √n` over the range.
    pub sqrt_deviation_constant: f64,
}

impl ExtremaReport {
    /// `j² + 3j + 1` strictly inside the range.
    pub fn predicted_minima(&self) -> Vec<u64> {
        (1u64..)
            .map(|j| j * j + 3 * j + 1)
            .skip_while(|&n| n <= self.lo)
            .take_while(|&n| n < self.hi)
            .collect()
    }

    /// `j² + 2j` inside the range.
    pub fn predicted_positive(&self) -> Vec<u64> {
        (1u64..)
            .map(|j| j * j + 2 * j)
            .skip_while(|&n| n < self.lo)
            .take_while(|&n| n <= self.hi)
            .collect()
    }

    pub fn minima_match_prediction(&self) -> bool {
        self.local_minima == self.predicted_minima()
    }

    pub fn positives_match_prediction(&self) -> bool {
        self.positive_at == self.predicted_positive()
    }

    /// Block minima for `j` in `[from, to]` decrease strictly.
    pub fn block_minima_decreasing(&self, from: u64, to: u64) -> bool {
        let ys: Vec<f64> = self
            .block_minima
            .iter()
            .filter(|b| b.j >= from && b.j <= to)
            .map(|b| b.y)
            .collect();
        !ys.is_empty() && ys.windows(2).all(|w| w[1] < w[0])
    }

    /// Every block minimum sits at `j² + j - 1`.
    pub fn block_minima_at_prediction(&self) -> bool {
        self.block_minima
            .iter()
            .filter(|b| b.j >= 2)
            .all(|b| b.n == b.j * b.j + b.j - 1)
    }
}

/// Scans `y_n` over `[lo, hi]`. The range must contain at least 20 whole
/// blocks `[j², (j+1)²)`.
pub fn extrema_scan(lo: u64, hi: u64, prec: u32) -> Result<ExtremaReport> {
    let first_block = {
        let r = crate::exact::nth_root_u64(lo.max(1), 2);
        if r * r == lo { r } else { r + 1 }
    };
    let end_block = crate::exact::nth_root_u64(hi.saturating_add(1), 2); // blocks j with (j+1)² - 1 <= hi
    let whole_blocks = end_block.saturating_sub(first_block);
    if whole_blocks < 20 {
        return Err(invalid(format!(
            "range [{lo}, {hi}] holds {whole_blocks} complete blocks; at least 20 are needed"
        )));
    }

    let mut report = ExtremaReport {
        lo,
        hi,
        local_minima: Vec::new(),
        local_maxima: Vec::new(),
        positive_at: Vec::new(),
        running_max: f64::NEG_INFINITY,
        running_max_at: lo,
        block_minima: Vec::new(),
        sqrt_deviation_constant: 0.0,
    };
    let mut window: [Option<HpReal>; 2] = [None, None];
    let mut max_y: Option<HpReal> = None;
    let mut block: Option<(u64, u64, HpReal)> = None; // (j, argmin, min)
    let mut walker = YWalker::new(lo, hi, prec)?;
    while let Some(point) = walker.next() {
        let YSeqPoint { n, y } = point?;
        if let [Some(a), Some(b)] = &window {
            let before = a.cmp_value(b);
            let after = b.cmp_value(&y);
            use core::cmp::Ordering::*;
            if before == Greater && after == Less {
                report.local_minima.push(n - 1);
            }
            if before == Less && after == Greater {
                report.local_maxima.push(n - 1);
            }
        }
        if y.mantissa() > &BigInt::zero() {
            report.positive_at.push(n);
        }
        if max_y.as_ref().is_none_or(|m| y.cmp_value(m).is_gt()) {
            max_y = Some(y.clone());
            report.running_max_at = n;
        }
        let dev = (walker.frac_sum().to_f64() - n as f64 / 2.0).abs() / libm::sqrt(n as f64);
        if dev > report.sqrt_deviation_constant {
            report.sqrt_deviation_constant = dev;
        }

        let j = crate::exact::nth_root_u64(n, 2);
        match &mut block {
            Some((bj, arg, min)) if *bj == j => {
                if y.cmp_value(min).is_lt() {
                    *arg = n;
                    *min = y.clone();
                }
            }
            _ => {
                if let Some((bj, arg, min)) = block.take() {
                    if bj >= first_block {
                        report.block_minima.push(BlockMinimum { j: bj, n: arg, y: min.to_f64() });
                    }
                }
                block = Some((j, n, y.clone()));
            }
        }
        window = [window[1].take(), Some(y)];
    }
    if let Some((bj, arg, min)) = block {
        if (bj + 1) * (bj + 1) - 1 <= hi && bj >= first_block {
            report.block_minima.push(BlockMinimum { j: bj, n: arg, y: min.to_f64() });
        }
    }
    report.running_max = max_y.map(|v| v.to_f64()).unwrap_or(f64::NAN);
    Ok(report)
}

/// Bin counts of `{k^(1/m)}` over `k ≤ n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquidistReport {
    pub m: u32,
    pub n: u64,
    pub counts: Vec<u64>,
    /// `max_b |count_b / n - 1/bins|`, exactly.
    pub max_deviation_exact: Rat,
    pub max_deviation: f64,
}

/// Histogram of `{k^(1/m)}`, `k = 1..=n`, on `bins` equal bins. The bin of
/// `k` is `⌊bins·k^(1/m)⌋ - bins·⌊k^(1/m)⌋ = ⌊(k·bins^m)^(1/m)⌋ - bins·⌊k^(1/m)⌋`,
/// so no rounding is involved.
pub fn equidist_stats(m: u32, n: u64, bins: u32) -> Result<EquidistReport> {
    if m < 2 {
        return Err(invalid(format!("root degree m must be >= 2, got {m}")));
    }
    if bins < 1 || n < 1 {
        return Err(invalid("need at least one bin and one sample"));
    }
    let scale = u128::from(bins).checked_pow(m);
    let mut counts = alloc::vec![0u64; bins as usize];
    for k in 1..=n {
        let r = u128::from(crate::exact::nth_root_u64(k, m));
        let scaled_root = match scale.and_then(|s| s.checked_mul(u128::from(k))) {
            Some(v) => nth_root_u128(v, m),
            None => {
                let big = BigUint::from(k) * BigUint::from(bins).pow(m);
                crate::exact::nth_root(&big, m).to_u128().unwrap_or(u128::MAX)
            }
        };
        let bin = (scaled_root - r * u128::from(bins)) as usize;
        counts[bin] += 1;
    }
    let mut max_dev = Rat::zero();
    for &c in &counts {
        let dev = Rat::new(BigInt::from(c), BigInt::from(n)) - Rat::new(BigInt::from(1), BigInt::from(bins));
        let dev = if dev < Rat::zero() { -dev } else { dev };
        if dev > max_dev {
            max_dev = dev;
        }
    }
    Ok(EquidistReport {
        m,
        n,
        counts,
        max_deviation: series::ratio_f64(&max_dev),
        max_deviation_exact: max_dev,
    })
}

/// Mean of `{k^(1/m)}` over `k ≤ n`.
pub fn frac_mean(m: u32, n: u64, prec: u32, budget: u64) -> Result<f64> {
    let s = oracle::brute_frac_sum(&Natural::from(n), m, prec, budget)?;
    Ok(s.to_f64() / n as f64)
}

/// `x_{n²} - n²/2 + n/3` at one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct XsqRow {
    pub n: u64,
    pub value: HpReal,
    /// `value - ζ(-1/2)`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct XsqReport {
    pub zeta: HpReal,
    pub rows: Vec<XsqRow>,
}

impl XsqReport {
    pub fn row(&self, n: u64) -> Option<&XsqRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    /// `|gap|` shrinks strictly along the given `n` values.
    pub fn gap_decreasing(&self, ns: &[u64]) -> bool {
        let gaps: Option<Vec<f64>> = ns.iter().map(|&n| self.row(n).map(|r| r.gap.abs())).collect();
        gaps.is_some_and(|g| g.windows(2).all(|w| w[1] < w[0]))
    }
}

/// Tabulates `x_{n²} - n²/2 + n/3` for `n = 1..=n_max` next to `ζ(-1/2)`.
pub fn xsq_constant_check(n_max: u64, prec: u32, budget: u64) -> Result<XsqReport> {
    if n_max < 10 {
        return Err(invalid("n_max must be at least 10"));
    }
    let squares: Vec<u64> = (1..=n_max).map(|n| n * n).collect();
    let sums = oracle::frac_sums_at(&squares, 2, prec, budget)?;
    let zeta = zeta_neg_inv(2, prec)?;
    let rows = (1..=n_max)
        .zip(sums)
        .map(|(n, x)| {
            let n_big = BigInt::from(n);
            // -n²/2 + n/3 = (2n - 3n²)/6
            let shift = Rat::new(&n_big * 2 - &n_big * &n_big * 3, BigInt::from(6));
            let value = &x + &HpReal::from_rat(&shift, prec);
            let gap = (&value - &zeta).to_f64();
            XsqRow { n, value, gap }
        })
        .collect();
    Ok(XsqReport { zeta, rows })
}
