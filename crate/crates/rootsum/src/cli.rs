//! Command-line surface.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use rootsum_core::analysis::{self, ResidualRow};
use rootsum_core::exact::{self, Natural, Rat};
use rootsum_core::hp::{self, HpReal};
use rootsum_core::oracle;
use rootsum_core::series::{self, Expansion};

use crate::config::{Config, MIN_PRECISION, PRECISION_ENV};
use crate::formats::{self, render, Cell, Output, OutputFormat, Record, Table};
use crate::numparse::{parse_natural, parse_rat, parse_u64};
use crate::parallel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONSISTENCY: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("consistency failure: {0}")]
    Consistency(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Consistency(_) => EXIT_CONSISTENCY,
        }
    }
}

impl From<rootsum_core::Error> for CliError {
    fn from(e: rootsum_core::Error) -> Self {
        match e {
            rootsum_core::Error::Consistency(_) => CliError::Consistency(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "rootsum", version, about = "Exact and asymptotic sums of floor and fractional parts of k^(1/m)")]
pub struct Cli {
    /// Fractional bits of high-precision values (at least 64).
    #[arg(long, global = true, env = PRECISION_ENV, value_parser = clap::value_parser!(u32).range(i64::from(MIN_PRECISION)..))]
    pub precision: Option<u32>,

    /// Maximum number of oracle iterations.
    #[arg(long, global = true, value_parser = parse_u64)]
    pub budget: Option<u64>,

    #[arg(long, global = true, value_enum, default_value = "plain")]
    pub format: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn config(&self) -> CliResult<Config> {
        let d = Config::default();
        Config::new(
            self.precision.unwrap_or(d.precision_bits),
            self.budget.unwrap_or(d.oracle_budget),
            self.format,
        )
        .map_err(CliError::Usage)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FracMode {
    Oracle,
    Expansion,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Σ_{k≤n} ⌊k^(1/m)⌋ from the closed form.
    FloorSum(FloorSumArgs),
    /// Σ_{k≤n} {k^(1/m)} by brute force and/or the asymptotic expansion.
    FracSum(FracSumArgs),
    /// ζ(-1/m), cached or estimated from a given n and p.
    Zeta(ZetaArgs),
    /// Residuals of the expansion against the oracle, with decay slopes.
    Residuals(ResidualsArgs),
    /// Bin counts of {k^(1/m)}.
    Equidist(EquidistArgs),
    /// Local extrema and sign pattern of y_n = x_n - n/2 + √n/3.
    Extrema(RangeArgs),
    /// x_{n²} - n²/2 + n/3 against ζ(-1/2).
    XsqCheck(XsqArgs),
    /// ⌊k^(1/m)⌋, k^(1/m) and {k^(1/m)}.
    Root(RootArgs),
    /// Bernoulli number B_k (B_1 = -1/2).
    Bernoulli(BernoulliArgs),
    /// Σ_{j=1..n} j^m via Faulhaber's formula.
    Faulhaber(NmArgs),
    /// Expansion of Σ k^(1/m) as JSON, or its value at n.
    Expansion(ExpansionArgs),
    /// Euler–Maclaurin correction coefficient c_k and its exponent.
    Coeff(CoeffArgs),
    /// Generalized binomial coefficient C(alpha, j).
    Binom(BinomArgs),
    /// Counting identity for {√k} < x on k ≤ side².
    CountBelow(CountArgs),
    /// y_n over a range.
    YSeq(RangeArgs),
    /// Floor, fractional and power sums by brute force.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct FloorSumArgs {
    #[arg(long, value_parser = parse_natural)]
    pub n: Natural,
    #[arg(long)]
    pub m: u32,
    /// Also evaluate the degree-specific closed form (m = 2..5).
    #[arg(long)]
    pub special: bool,
    /// Compare against the run-length oracle.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct FracSumArgs {
    #[arg(long, value_parser = parse_natural)]
    pub n: Natural,
    #[arg(long)]
    pub m: u32,
    /// Number of correction terms in the expansion.
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: FracMode,
    /// Use the square-root specific coefficients and floor sum (m = 2).
    #[arg(long)]
    pub sqrt_closed_form: bool,
}

#[derive(Debug, Args)]
pub struct ZetaArgs {
    #[arg(long)]
    pub m: u32,
    /// Estimate from the power sum up to n instead of the cached value.
    #[arg(long, value_parser = parse_natural)]
    pub n: Option<Natural>,
    #[arg(long, default_value_t = 3)]
    pub p: u32,
}

#[derive(Debug, Args)]
pub struct ResidualsArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub p: u32,
    /// Comma-separated, strictly increasing.
    #[arg(long, value_parser = parse_natural, value_delimiter = ',', required = true)]
    pub ns: Vec<Natural>,
}

#[derive(Debug, Args)]
pub struct EquidistArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long, value_parser = parse_u64)]
    pub n: u64,
    #[arg(long, default_value_t = 10)]
    pub bins: u32,
    /// Also report the mean of the fractional parts.
    #[arg(long)]
    pub mean: bool,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[arg(long, value_parser = parse_u64)]
    pub lo: u64,
    #[arg(long, value_parser = parse_u64)]
    pub hi: u64,
}

#[derive(Debug, Args)]
pub struct XsqArgs {
    #[arg(long, value_parser = parse_u64)]
    pub nmax: u64,
    /// Print every n rather than powers of ten and n_max.
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Args)]
pub struct RootArgs {
    #[arg(long, value_parser = parse_natural)]
    pub k: Natural,
    #[arg(long)]
    pub m: u32,
}

#[derive(Debug, Args)]
pub struct BernoulliArgs {
    #[arg(long)]
    pub k: usize,
    /// Print B_0..=B_k.
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Args)]
pub struct NmArgs {
    #[arg(long, value_parser = parse_natural)]
    pub n: Natural,
    #[arg(long)]
    pub m: u32,
}

#[derive(Debug, Args)]
pub struct ExpansionArgs {
    #[arg(long, required_unless_present = "load")]
    pub m: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    /// Square-root specific coefficients (m = 2).
    #[arg(long)]
    pub sqrt_closed_form: bool,
    /// Read the expansion from a JSON file instead of building it.
    #[arg(long, conflicts_with_all = ["m", "sqrt_closed_form"])]
    pub load: Option<std::path::PathBuf>,
    /// Evaluate Σ k^(1/m) at this n with the cached ζ(-1/m).
    #[arg(long, value_parser = parse_natural)]
    pub eval: Option<Natural>,
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub k: u32,
}

#[derive(Debug, Args)]
pub struct BinomArgs {
    /// Rational upper index, e.g. 1/2.
    #[arg(long, value_parser = parse_rat, allow_hyphen_values = true)]
    pub alpha: Rat,
    #[arg(long)]
    pub j: u32,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long, value_parser = parse_u64)]
    pub side: u64,
    /// Threshold in (0, 1], e.g. 1/2.
    #[arg(long, value_parser = parse_rat)]
    pub x: Rat,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_parser = parse_natural)]
    pub n: Natural,
    #[arg(long)]
    pub m: u32,
    /// Only the run-length floor sum, which handles much larger n.
    #[arg(long)]
    pub floor_only: bool,
}

fn check_m(m: u32) -> CliResult<()> {
    if m < 2 {
        return Err(usage(format!("root degree m must be >= 2, got {m}")));
    }
    Ok(())
}

fn check_n(n: &Natural) -> CliResult<()> {
    if n.is_zero() {
        return Err(usage("n must be at least 1"));
    }
    Ok(())
}

fn small_n(n: &Natural, budget: u64) -> CliResult<u64> {
    n.to_u64()
        .filter(|&v| v <= budget)
        .ok_or_else(|| usage(format!("n = {n} exceeds the oracle budget of {budget}")))
}

fn rat_cell(r: &Rat) -> Cell {
    Cell::text(r.to_string())
}

fn real(v: HpReal) -> Cell {
    Cell::Real(v)
}

/// Runs one parsed command.
pub fn execute(cli: &Cli) -> CliResult<Output> {
    let cfg = cli.config()?;
    let prec = cfg.precision_bits;
    let budget = cfg.oracle_budget;
    match &cli.command {
        Command::FloorSum(a) => floor_sum(a, budget),
        Command::FracSum(a) => frac_sum(a, prec, budget),
        Command::Zeta(a) => zeta(a, prec, budget),
        Command::Residuals(a) => residuals(a, prec, budget),
        Command::Equidist(a) => equidist(a, prec, budget),
        Command::Extrema(a) => extrema(a, prec, budget),
        Command::XsqCheck(a) => xsq_check(a, prec, budget),
        Command::Root(a) => root(a, prec),
        Command::Bernoulli(a) => Ok(bernoulli(a)),
        Command::Faulhaber(a) => {
            let v = exact::faulhaber_sum(&a.n, a.m)?;
            Ok(Output::Record(Record::new().with("sum", Cell::int(v))))
        }
        Command::Expansion(a) => expansion(a, prec),
        Command::Coeff(a) => coeff(a),
        Command::Binom(a) => Ok(binom(a)),
        Command::CountBelow(a) => count_below(a),
        Command::YSeq(a) => y_seq(a, prec, budget),
        Command::Oracle(a) => oracle_cmd(a, prec, budget),
    }
}

fn floor_sum(a: &FloorSumArgs, budget: u64) -> CliResult<Output> {
    check_m(a.m)?;
    check_n(&a.n)?;
    let total = exact::floor_root_sum(&a.n, a.m)?.total;
    let mut rec = Record::new().with("total", Cell::int(&total));
    if a.special {
        let special = match a.m {
            2 => exact::floor_sqrt_sum(&a.n).total,
            3..=5 => exact::floor_root_sum_special(&a.n, a.m)?,
            m => return Err(usage(format!("no degree-specific closed form for m = {m}"))),
        };
        if special != total {
            return Err(CliError::Consistency(format!(
                "general closed form gives {total}, degree-specific form gives {special}"
            )));
        }
        rec.push("special", Cell::int(&special));
    }
    if a.check {
        let brute = oracle::brute_floor_sum(&a.n, a.m, budget)?;
        let matched = brute == total;
        rec.push("oracle", Cell::int(&brute));
        rec.push("check", Cell::text(if matched { "match" } else { "mismatch" }));
        if !matched {
            return Err(CliError::Consistency(format!(
                "closed form {total} differs from oracle {brute} at n = {}, m = {}",
                a.n, a.m
            )));
        }
    }
    Ok(Output::Record(rec))
}

fn expansion_value(m: u32, p: u32, n: &Natural, prec: u32, sqrt_closed_form: bool) -> CliResult<HpReal> {
    if sqrt_closed_form {
        if m != 2 {
            return Err(usage("--sqrt-closed-form requires m = 2"));
        }
        Ok(analysis::sqrt_frac_sum_expansion(p, n, prec)?)
    } else {
        Ok(analysis::frac_sum_expansion(m, p, n, prec)?)
    }
}

fn frac_sum(a: &FracSumArgs, prec: u32, budget: u64) -> CliResult<Output> {
    check_m(a.m)?;
    check_n(&a.n)?;
    if a.mode != FracMode::Oracle && a.p < 1 {
        return Err(usage("the expansion needs p >= 1"));
    }
    let oracle_value = match a.mode {
        FracMode::Expansion => None,
        _ => Some(parallel::frac_sum(small_n(&a.n, budget)?, a.m, prec, budget)?),
    };
    let expansion = match a.mode {
        FracMode::Oracle => None,
        _ => Some(expansion_value(a.m, a.p, &a.n, prec, a.sqrt_closed_form)?),
    };
    let mut rec = Record::new();
    match (oracle_value, expansion) {
        (Some(o), None) => rec.push("oracle", real(o)),
        (None, Some(e)) => rec.push("expansion", real(e)),
        (Some(o), Some(e)) => {
            let residual = &o - &e;
            let nf = a.n.to_f64().unwrap_or(f64::MAX);
            let bound = analysis::first_omitted_magnitude(a.m, a.p, nf);
            let within = residual.to_f64().abs() <= bound + residual.error_bound_f64();
            rec.push("oracle", real(o));
            rec.push("expansion", real(e));
            rec.push("residual", real(residual));
            rec.push("first_omitted", Cell::Float(bound));
            rec.push("within_bound", Cell::Bool(within));
            rec.push(
                "precision_limited",
                Cell::Bool(analysis::required_precision(a.m, a.p, nf) > prec),
            );
        }
        (None, None) => unreachable!("every mode computes something"),
    }
    Ok(Output::Record(rec))
}

fn zeta(a: &ZetaArgs, prec: u32, budget: u64) -> CliResult<Output> {
    check_m(a.m)?;
    match &a.n {
        None => {
            let v = hp::zeta_neg_inv(a.m, prec)?;
            let err = v.error_bound_f64();
            Ok(Output::Record(
                Record::new().with("value", real(v)).with("error_bound", Cell::Float(err)),
            ))
        }
        Some(n) => {
            small_n(n, budget)?;
            let est = hp::estimate_zeta_neg_inv(a.m, n, a.p, prec)?;
            Ok(Output::Record(
                Record::new()
                    .with("value", real(est.value))
                    .with("error_estimate", Cell::Float(est.error_estimate.to_f64()))
                    .with("n", Cell::int(est.n_used))
                    .with("p", Cell::int(est.p_used)),
            ))
        }
    }
}

fn residual_output(rows: &[ResidualRow], m: u32, p: u32) -> Output {
    let mut t = formats::residual_table(rows);
    let slope = analysis::fit_slope_top_decade(rows);
    t.summary.push("slope", slope.map(Cell::Float).unwrap_or(Cell::Empty));
    // the first omitted term decays like n^(1/m - 2p - 1)
    let expected = 1.0 / f64::from(m) - 2.0 * f64::from(p) - 1.0;
    t.summary.push("expected_slope", Cell::Float(expected));
    Output::Table(t)
}

fn residuals(a: &ResidualsArgs, prec: u32, budget: u64) -> CliResult<Output> {
    check_m(a.m)?;
    if a.p < 1 {
        return Err(usage("residual studies need p >= 1"));
    }
    if a.ns.is_empty() {
        return Err(usage("--ns needs at least one value"));
    }
    let ns: Vec<u64> = a.ns.iter().map(|n| small_n(n, budget)).collect::<CliResult<_>>()?;
    if ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] == 0 {
        return Err(usage("--ns must be positive and strictly increasing"));
    }
    let need = analysis::required_precision(a.m, a.p, *ns.last().unwrap_or(&1) as f64);
    if need > prec {
        return Err(rootsum_core::Error::PrecisionInsufficient {
            have_bits: prec,
            required_bits: need,
        }
        .into());
    }
    let sums = parallel::frac_sums_at(&ns, a.m, prec, budget)?;
    let refs: Vec<(Natural, HpReal)> = a.ns.iter().cloned().zip(sums).collect();
    let rows = analysis::residual_rows(a.m, a.p, &refs, prec)?;
    Ok(residual_output(&rows, a.m, a.p))
}

fn equidist(a: &EquidistArgs, prec: u32, budget: u64) -> CliResult<Output> {
    check_m(a.m)?;
    if a.n > budget {
        return Err(usage(format!("n = {} exceeds the oracle budget of {budget}", a.n)));
    }
    let rep = analysis::equidist_stats(a.m, a.n, a.bins)?;
    let mut t = Table::new(&["bin", "lo", "hi", "count"]);
    for (b, c) in rep.counts.iter().enumerate() {
        let lo = Rat::new(BigInt::from(b), BigInt::from(a.bins));
        let hi = Rat::new(BigInt::from(b + 1), BigInt::from(a.bins));
        t.rows.push(vec![Cell::int(b), rat_cell(&lo), rat_cell(&hi), Cell::int(c)]);
    }
    t.summary.push("max_deviation", Cell::Float(rep.max_deviation));
    t.summary.push("max_deviation_exact", rat_cell(&rep.max_deviation_exact));
    if a.mean {
        let s = parallel::frac_sum(a.n, a.m, prec, budget)?;
        t.summary.push("mean", Cell::Float(s.to_f64() / a.n as f64));
    }
    Ok(Output::Table(t))
}

fn extrema(a: &RangeArgs, prec: u32, budget: u64) -> CliResult<Output> {
    if a.hi > budget {
        return Err(usage(format!("hi = {} exceeds the oracle budget of {budget}", a.hi)));
    }
    let rep = analysis::extrema_scan(a.lo, a.hi, prec)?;
    let limit = &hp::zeta_neg_inv(2, prec)? + &HpReal::from_rat(&Rat::new(BigInt::one(), BigInt::from(2)), prec);
    let first_block = rep.block_minima.first().map(|b| b.j).unwrap_or(0);
    let last_block = rep.block_minima.last().map(|b| b.j).unwrap_or(0);
    let rec = Record::new()
        .with("lo", Cell::int(rep.lo))
        .with("hi", Cell::int(rep.hi))
        .with("local_minima", Cell::int(rep.local_minima.len()))
        .with("minima_match_prediction", Cell::Bool(rep.minima_match_prediction()))
        .with("local_maxima", Cell::int(rep.local_maxima.len()))
        .with("positive_count", Cell::int(rep.positive_at.len()))
        .with("positives_match_prediction", Cell::Bool(rep.positives_match_prediction()))
        .with("running_max", Cell::Float(rep.running_max))
        .with("running_max_at", Cell::int(rep.running_max_at))
        .with("limsup_prediction", real(limit))
        .with("blocks", Cell::int(rep.block_minima.len()))
        .with(
            "block_minima_decreasing",
            Cell::Bool(rep.block_minima_decreasing(first_block, last_block)),
        )
        .with("block_minima_at_prediction", Cell::Bool(rep.block_minima_at_prediction()))
        .with(
            "last_block_minimum",
            rep.block_minima.last().map(|b| Cell::Float(b.y)).unwrap_or(Cell::Empty),
        )
        .with("sqrt_deviation_constant", Cell::Float(rep.sqrt_deviation_constant));
    Ok(Output::Record(rec))
}

fn xsq_check(a: &XsqArgs, prec: u32, budget: u64) -> CliResult<Output> {
    let rep = analysis::xsq_constant_check(a.nmax, prec, budget)?;
    let mut t = Table::new(&["n", "value", "gap"]);
    for r in &rep.rows {
        let decade = std::iter::successors(Some(1u64), |d| d.checked_mul(10)).any(|d| d == r.n);
        if a.all || decade || r.n == a.nmax {
            t.rows.push(vec![Cell::int(r.n), real(r.value.clone()), Cell::Float(r.gap)]);
        }
    }
    t.summary.push("zeta", real(rep.zeta));
    Ok(Output::Table(t))
}

fn root(a: &RootArgs, prec: u32) -> CliResult<Output> {
    let floor = exact::integer_nth_root(&a.k, a.m)?;
    let mut rec = Record::new().with("floor", Cell::int(floor));
    if a.m >= 2 {
        rec.push("value", real(hp::hp_root(&a.k, a.m, prec)));
        rec.push("frac", real(hp::frac_part(&a.k, a.m, prec)));
    }
    Ok(Output::Record(rec))
}

fn bernoulli(a: &BernoulliArgs) -> Output {
    if a.table {
        let table = exact::BernoulliTable::generate(a.k);
        let mut t = Table::new(&["k", "value"]);
        for (k, b) in table.as_slice().iter().enumerate() {
            t.rows.push(vec![Cell::int(k), rat_cell(b)]);
        }
        Output::Table(t)
    } else {
        Output::Record(Record::new().with("value", rat_cell(&exact::bernoulli(a.k))))
    }
}

fn load_expansion(path: &std::path::Path) -> CliResult<Expansion> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    formats::expansion_from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn expansion(a: &ExpansionArgs, prec: u32) -> CliResult<Output> {
    let e = match (&a.load, a.m) {
        (Some(path), _) => load_expansion(path)?,
        (None, Some(m)) => {
            check_m(m)?;
            if a.p < 1 {
                return Err(usage("expansions carry at least one correction term"));
            }
            if a.sqrt_closed_form {
                if m != 2 {
                    return Err(usage("--sqrt-closed-form requires m = 2"));
                }
                series::build_sqrt_expansion_closed_form(a.p)
            } else {
                series::build_power_sum_expansion(m, a.p)
            }
        }
        (None, None) => return Err(usage("either --m or --load is required")),
    };
    match &a.eval {
        None => {
            let doc = serde_json::to_value(formats::ExpansionJson::from(&e))
                .map_err(|err| CliError::Consistency(err.to_string()))?;
            Ok(Output::Document(doc))
        }
        Some(n) => {
            check_n(n)?;
            let zeta = hp::zeta_neg_inv(e.m, prec)?;
            let v = hp::eval_expansion(&e, &zeta, n, prec)?;
            let omitted = e.first_omitted();
            let bound = libm::exp2(series::term_log2_magnitude(&omitted, n.to_f64().unwrap_or(f64::MAX)));
            Ok(Output::Record(
                Record::new().with("value", real(v)).with("first_omitted", Cell::Float(bound)),
            ))
        }
    }
}

fn coeff(a: &CoeffArgs) -> CliResult<Output> {
    check_m(a.m)?;
    if a.k < 1 {
        return Err(usage("k must be at least 1"));
    }
    let t = series::em_correction_coeff(a.m, a.k);
    let mut rec = Record::new()
        .with("coeff", rat_cell(&t.coeff))
        .with("exponent", rat_cell(&t.exponent));
    if a.m == 2 {
        let sqrt_form = series::em_coeff_sqrt_paperform(a.k);
        rec.push("sqrt_form_agrees", Cell::Bool(sqrt_form == t.coeff));
        rec.push("sqrt_form", rat_cell(&sqrt_form));
    }
    Ok(Output::Record(rec))
}

fn binom(a: &BinomArgs) -> Output {
    let mut rec = Record::new().with("value", rat_cell(&series::binom_rational(&a.alpha, a.j)));
    if a.alpha == Rat::new(BigInt::one(), BigInt::from(2)) {
        rec.push("half_closed_form", rat_cell(&series::binom_half_closed_form(a.j)));
        rec.push("sqrt_derivative_at_one", rat_cell(&series::sqrt_derivative_at_one(a.j)));
    }
    Output::Record(rec)
}

fn count_below(a: &CountArgs) -> CliResult<Output> {
    let rep = oracle::count_frac_below(a.side, &a.x)?;
    Ok(Output::Record(
        Record::new()
            .with("side", Cell::int(rep.side))
            .with("x", rat_cell(&rep.x))
            .with("printed_formula", Cell::int(&rep.printed_formula))
            .with("direct_open", Cell::int(&rep.direct_open))
            .with("direct_half_open", Cell::int(&rep.direct_half_open))
            .with("ceil_formula", Cell::int(&rep.ceil_formula))
            .with("printed_formula_agrees", Cell::Bool(rep.printed_formula_agrees())),
    ))
}

fn y_seq(a: &RangeArgs, prec: u32, budget: u64) -> CliResult<Output> {
    if a.hi > budget {
        return Err(usage(format!("hi = {} exceeds the oracle budget of {budget}", a.hi)));
    }
    let mut t = Table::new(&["n", "y"]);
    for point in analysis::YWalker::new(a.lo, a.hi, prec)? {
        let point = point?;
        t.rows.push(vec![Cell::int(point.n), real(point.y)]);
    }
    Ok(Output::Table(t))
}

fn oracle_cmd(a: &OracleArgs, prec: u32, budget: u64) -> CliResult<Output> {
    check_m(a.m)?;
    if a.floor_only {
        let v = oracle::brute_floor_sum(&a.n, a.m, budget)?;
        return Ok(Output::Record(Record::new().with("floor_sum", Cell::int(v))));
    }
    let s = oracle::oracle_sums(&a.n, a.m, prec, budget)?;
    Ok(Output::Record(
        Record::new()
            .with("floor_sum", Cell::int(s.floor_sum))
            .with("frac_sum", real(s.frac_sum))
            .with("power_sum", real(s.power_sum)),
    ))
}

/// Parses `args`, runs the command, and writes to the given streams.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli) {
        Ok(output) => {
            let _ = out.write_all(render(&output, cli.format).as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "rootsum: {e}");
            e.exit_code()
        }
    }
}
