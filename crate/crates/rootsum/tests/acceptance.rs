//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line each, and exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use rootsum::parallel;
use rootsum_core::analysis::{
    equidist_stats, extrema_scan, fit_slope, fit_slope_top_decade, frac_sum_expansion, residual_rows,
    sqrt_frac_sum_expansion, xsq_constant_check,
};
use rootsum_core::exact::{floor_root_sum, floor_sqrt_sum, Natural, Rat};
use rootsum_core::hp::{estimate_zeta_neg_inv, eval_expansion, term_upper_bound_ulps, zeta_neg_inv, HpReal};
use rootsum_core::oracle::{self, brute_floor_sum};
use rootsum_core::series::{
    build_power_sum_expansion, build_sqrt_expansion_closed_form, em_coeff_sqrt_paperform, em_correction_coeff,
};

const PREC: u32 = 128;
const BUDGET: u64 = 100_000_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Fractional sums shared between criteria, per root degree.
fn sweep(m: u32) -> &'static BTreeMap<u64, HpReal> {
    static SWEEPS: [OnceLock<BTreeMap<u64, HpReal>>; 6] = [const { OnceLock::new() }; 6];
    SWEEPS[m as usize].get_or_init(|| {
        let mut ns: Vec<u64> = vec![1_000, 10_000, 100_000, 1_000_000];
        ns.extend(slope_points());
        ns.sort_unstable();
        ns.dedup();
        let sums = parallel::frac_sums_at(&ns, m, PREC, BUDGET).expect("sweep within budget");
        ns.into_iter().zip(sums).collect()
    })
}

/// Nine log-spaced points covering `[10^4, 10^6]`.
fn slope_points() -> Vec<u64> {
    (0..=8)
        .map(|i| (1e4 * 10f64.powf(f64::from(i) / 4.0)).round() as u64)
        .collect()
}

/// `|v| <= bound_ulps + own error`, all in ulps.
fn within_ulps(v: &HpReal, bound_ulps: &num_bigint::BigUint) -> bool {
    v.mantissa().magnitude() <= &(bound_ulps + v.err_ulps())
}

fn ulps_to_f64(u: &num_bigint::BigUint) -> f64 {
    HpReal::from_fixed(BigInt::from(u.clone()), PREC, Default::default()).to_f64()
}

fn criterion_1() -> Outcome {
    let mut checked = 0u64;
    for m in 2..=5u32 {
        let bad = (1..=100_000u64).into_par_iter().find_any(|&n| {
            let n = Natural::from(n);
            floor_root_sum(&n, m).map(|r| r.total).ok() != brute_floor_sum(&n, m, BUDGET).ok()
        });
        if let Some(n) = bad {
            return Err(format!("m = {m}: mismatch at n = {n}"));
        }
        checked += 100_000;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let randoms: Vec<u64> = (0..1000).map(|_| rng.gen_range(1..=1_000_000_000_000u64)).collect();
    for m in 2..=5u32 {
        let bad = randoms.par_iter().find_any(|&&n| {
            let n = Natural::from(n);
            floor_root_sum(&n, m).map(|r| r.total).ok() != brute_floor_sum(&n, m, BUDGET).ok()
        });
        if let Some(n) = bad {
            return Err(format!("m = {m}: mismatch at random n = {n}"));
        }
        checked += 1000;
    }
    Ok(format!("{checked} (n, m) pairs equal, n <= 1e5 exhaustive plus 1000 seeded n <= 1e12"))
}

fn criterion_2() -> Outcome {
    let b: Vec<Natural> = (1..=7u32).map(|n| floor_sqrt_sum(&Natural::from(n)).total).collect();
    let general: Vec<Natural> = (1..=7u32)
        .map(|n| floor_root_sum(&Natural::from(n), 2).unwrap().total)
        .collect();
    let expected: Vec<Natural> = [1u32, 2, 3, 5, 7, 9, 11].into_iter().map(Natural::from).collect();
    if b == expected && general == expected {
        Ok("b_1..b_7 = 1, 2, 3, 5, 7, 9, 11".into())
    } else {
        Err(format!("got {b:?} / {general:?}"))
    }
}

fn criterion_3() -> Outcome {
    for k in 1..=10 {
        let a = em_coeff_sqrt_paperform(k);
        let b = em_correction_coeff(2, k).coeff;
        if a != b {
            return Err(format!("k = {k}: {a} != {b}"));
        }
    }
    Ok("square-root coefficient form equals generic form for k = 1..10".into())
}

fn criterion_4() -> Outcome {
    let e1 = estimate_zeta_neg_inv(2, &Natural::from(10_000u32), 3, PREC).map_err(|e| e.to_string())?;
    let e2 = estimate_zeta_neg_inv(2, &Natural::from(20_000u32), 4, PREC).map_err(|e| e.to_string())?;
    let gap = (&e1.value - &e2.value).to_f64().abs();
    if gap >= 1e-12 {
        return Err(format!("estimates differ by {gap:e}"));
    }
    let n = Natural::from(100_000u32);
    let e = build_power_sum_expansion(2, 3);
    let rebuilt = eval_expansion(&e, &e1.value, &n, PREC).map_err(|e| e.to_string())?;
    let sum = oracle::power_sum(&n, 2, PREC).map_err(|e| e.to_string())?;
    let diff = &sum - &rebuilt;
    // the constant carries its own truncation bound; the expansion at 1e5
    // adds its first omitted term
    let bound = term_upper_bound_ulps(&e.first_omitted(), &n, PREC) + e1.error_estimate.mantissa().magnitude();
    if !within_ulps(&diff, &bound) {
        return Err(format!(
            "round trip off by {:e}, bound {:e}",
            diff.to_f64(),
            ulps_to_f64(&bound)
        ));
    }
    Ok(format!(
        "estimates agree to {gap:.1e}; round trip at 1e5 off by {:.1e} (bound {:.1e})",
        diff.to_f64().abs(),
        ulps_to_f64(&bound)
    ))
}

fn criterion_5() -> Outcome {
    let e = build_power_sum_expansion(2, 2);
    let mut worst: f64 = 0.0;
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let nn = Natural::from(n);
        let x = &sweep(2)[&n];
        let predicted = frac_sum_expansion(2, 2, &nn, PREC).map_err(|e| e.to_string())?;
        let residual = x - &predicted;
        let bound = term_upper_bound_ulps(&e.first_omitted(), &nn, PREC) * 2u32;
        if !within_ulps(&residual, &bound) {
            return Err(format!(
                "n = {n}: residual {:e} exceeds {:e}",
                residual.to_f64(),
                ulps_to_f64(&bound)
            ));
        }
        worst = worst.max(residual.to_f64().abs() / ulps_to_f64(&bound));
    }
    Ok(format!("|residual| / (2 x first omitted) at most {worst:.4} over n = 1e3..1e6"))
}

fn criterion_6() -> Outcome {
    let refs: Vec<(Natural, HpReal)> = slope_points()
        .into_iter()
        .map(|n| (Natural::from(n), sweep(2)[&n].clone()))
        .collect();
    let rows = residual_rows(2, 1, &refs, PREC).map_err(|e| e.to_string())?;
    let slope = fit_slope(&rows, &Natural::from(10_000u32), &Natural::from(1_000_000u32))
        .ok_or("no usable rows for the fit")?;
    let top = fit_slope_top_decade(&rows).ok_or("no usable rows in the top decade")?;
    if (-2.65..=-2.35).contains(&slope) {
        Ok(format!("slope {slope:.6} over [1e4, 1e6] (top decade {top:.6}); -1.5 excluded"))
    } else {
        Err(format!("slope {slope:.6} outside [-2.65, -2.35]"))
    }
}

fn criterion_7() -> Outcome {
    let n = Natural::from(1_000_000u32);
    let mut notes = Vec::new();
    for m in 3..=5u32 {
        let x = &sweep(m)[&1_000_000];
        let predicted = frac_sum_expansion(m, 1, &n, PREC).map_err(|e| e.to_string())?;
        let residual = x - &predicted;
        let bound = term_upper_bound_ulps(&build_power_sum_expansion(m, 1).first_omitted(), &n, PREC);
        if !within_ulps(&residual, &bound) {
            return Err(format!(
                "m = {m}: residual {:e} exceeds {:e}",
                residual.to_f64(),
                ulps_to_f64(&bound)
            ));
        }
        notes.push(format!("m={m} {:.1e}<={:.1e}", residual.to_f64().abs(), ulps_to_f64(&bound)));
    }
    for p in 1..=4 {
        if build_power_sum_expansion(2, p) != build_sqrt_expansion_closed_form(p) {
            return Err(format!("m = 2 expansions differ at p = {p}"));
        }
        for n in [1_000u64, 1_000_000, 123_456_789] {
            let nn = Natural::from(n);
            let general = frac_sum_expansion(2, p, &nn, PREC).map_err(|e| e.to_string())?;
            let special = sqrt_frac_sum_expansion(p, &nn, PREC).map_err(|e| e.to_string())?;
            if general != special {
                return Err(format!("m = 2 paths differ at p = {p}, n = {n}"));
            }
        }
    }
    Ok(format!("{}; m = 2 general path bit-identical", notes.join(", ")))
}

fn criterion_8() -> Outcome {
    let rep = extrema_scan(1, 100_000, PREC).map_err(|e| e.to_string())?;
    if !rep.positives_match_prediction() {
        return Err("positive set differs from j^2 + 2j".into());
    }
    if !rep.minima_match_prediction() {
        return Err("local minima differ from j^2 + 3j + 1".into());
    }
    let limit = &zeta_neg_inv(2, PREC).map_err(|e| e.to_string())?
        + &HpReal::from_rat(&Rat::new(BigInt::one(), BigInt::from(2)), PREC);
    let gap = (rep.running_max - limit.to_f64()).abs();
    if gap > 1e-2 {
        return Err(format!("running max {} is {gap:e} from the limit", rep.running_max));
    }
    let first = rep.block_minima.first().map(|b| b.j).unwrap_or(0);
    let last = rep.block_minima.last().map(|b| b.j).unwrap_or(0);
    if !rep.block_minima_decreasing(first, last) {
        return Err("block minima are not strictly decreasing".into());
    }
    Ok(format!(
        "{} positives, {} minima as predicted; running max {:.6} ({gap:.1e} from limit); {} block minima decreasing",
        rep.positive_at.len(),
        rep.local_minima.len(),
        rep.running_max,
        rep.block_minima.len()
    ))
}

fn criterion_9() -> Outcome {
    let mut notes = Vec::new();
    for m in [2u32, 3] {
        let rep = equidist_stats(m, 1_000_000, 10).map_err(|e| e.to_string())?;
        let mean = sweep(m)[&1_000_000].to_f64() / 1e6;
        if rep.max_deviation >= 1e-2 || (mean - 0.5).abs() > 1e-2 {
            return Err(format!("m = {m}: deviation {:e}, mean {mean}", rep.max_deviation));
        }
        notes.push(format!("m={m} deviation {:.1e} mean {mean:.5}", rep.max_deviation));
    }
    Ok(notes.join(", "))
}

fn criterion_10() -> Outcome {
    let rep = xsq_constant_check(1000, PREC, BUDGET).map_err(|e| e.to_string())?;
    let row = rep.row(1000).ok_or("missing n = 1000")?;
    if row.gap.abs() < 1e-2 {
        Ok(format!("x_(n^2) - n^2/2 + n/3 - zeta(-1/2) = {:.3e} at n = 1000", row.gap))
    } else {
        Err(format!("gap {:e} at n = 1000", row.gap))
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed-form floor sums equal the oracle", criterion_1),
        ("b_n sequence for n = 1..7", criterion_2),
        ("square-root coefficients cross-validated", criterion_3),
        ("zeta(-1/2) stability and round trip", criterion_4),
        ("m = 2, p = 2 residual within twice the first omitted term", criterion_5),
        ("residual slope for m = 2, p = 1", criterion_6),
        ("general m residuals and m = 2 specialisation", criterion_7),
        ("structure of y_n up to 1e5", criterion_8),
        ("equidistribution and mean at 1e6", criterion_9),
        ("x_(n^2) constant at n = 1000", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2}: {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
