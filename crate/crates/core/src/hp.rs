//! Fixed-point high-precision reals.
//!
//! An [`HpReal`] at precision `P` is an integer mantissa scaled by `2^-P`
//! together with an absolute error bound counted in units of `2^-P` (ulps).
//! Roots are computed as exact integer roots of a scaled argument, so every
//! primitive has a small, provable bound and sums of them stay exact.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use spin::RwLock;

use crate::error::{invalid, Error, Result};
use crate::exact::{nth_root, Natural, Rat};
use crate::oracle;
use crate::series::{self, build_power_sum_expansion, Expansion, ExpansionTerm};

/// Default number of fractional bits.
pub const DEFAULT_PRECISION: u32 = 128;

/// Extra bits carried while estimating cached constants.
const GUARD_BITS: u32 = 32;

/// `mantissa · 2^-prec`, within `err` ulps of the true value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HpReal {
    mant: BigInt,
    prec: u32,
    err: BigUint,
}

impl HpReal {
    pub fn zero(prec: u32) -> Self {
        Self::from_fixed(BigInt::zero(), prec, BigUint::zero())
    }

    pub fn from_fixed(mant: BigInt, prec: u32, err: BigUint) -> Self {
        HpReal { mant, prec, err }
    }

    pub fn from_integer(v: impl Into<BigInt>, prec: u32) -> Self {
        let v: BigInt = v.into();
        Self::from_fixed(v << prec, prec, BigUint::zero())
    }

    /// Rounds `r` down to the grid; error 1 ulp unless `r` lands on it.
    pub fn from_rat(r: &Rat, prec: u32) -> Self {
        let scaled = r.numer() << prec;
        let (q, rem) = scaled.div_mod_floor(r.denom());
        let err = if rem.is_zero() { 0u32 } else { 1 };
        Self::from_fixed(q, prec, BigUint::from(err))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Error bound in ulps of `2^-precision`.
    pub fn err_ulps(&self) -> &BigUint {
        &self.err
    }

    pub fn is_exact(&self) -> bool {
        self.err.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self::from_fixed(self.mant.abs(), self.prec, self.err.clone())
    }

    /// Same value with `extra` more ulps of uncertainty.
    pub fn with_extra_error(mut self, extra: &BigUint) -> Self {
        self.err += extra;
        self
    }

    /// Error bound as a real number, rounded up.
    pub fn error_bound(&self) -> HpReal {
        Self::from_fixed(BigInt::from(self.err.clone()), self.prec, BigUint::zero())
    }

    pub fn error_bound_f64(&self) -> f64 {
        big_to_f64_scaled(&BigInt::from(self.err.clone()), self.prec)
    }

    pub fn to_f64(&self) -> f64 {
        big_to_f64_scaled(&self.mant, self.prec)
    }

    /// `⌊value⌋` of the stored mantissa.
    pub fn floor(&self) -> BigInt {
        self.mant.div_floor(&(BigInt::one() << self.prec))
    }

    /// Re-expresses the value at another precision. Lowering rounds down and
    /// adds one ulp; raising is exact.
    pub fn with_precision(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let d = prec - self.prec;
                Self::from_fixed(&self.mant << d, prec, &self.err << d)
            }
            Ordering::Less => {
                let d = self.prec - prec;
                let unit = BigInt::one() << d;
                let (q, rem) = self.mant.div_mod_floor(&unit);
                let err_unit = BigUint::one() << d;
                let mut err = self.err.div_ceil(&err_unit);
                if !rem.is_zero() {
                    err += 1u32;
                }
                Self::from_fixed(q, prec, err)
            }
        }
    }

    /// `self · r`, rounded down. The error grows to `⌈|r|·err⌉ + 1`.
    pub fn mul_rat(&self, r: &Rat) -> Self {
        let num = self.mant.clone() * r.numer();
        let (q, rem) = num.div_mod_floor(r.denom());
        let scaled_err = (BigInt::from(self.err.clone()) * r.numer().abs()).div_ceil(r.denom());
        let mut err = scaled_err.magnitude().clone();
        if !rem.is_zero() {
            err += 1u32;
        }
        Self::from_fixed(q, self.prec, err)
    }

    /// Value comparison of the stored mantissas. Both sides must share a
    /// precision.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        assert_eq!(self.prec, other.prec, "precision mismatch");
        self.mant.cmp(&other.mant)
    }

    /// Number of decimals justified by the error bound.
    pub fn significant_decimals(&self) -> usize {
        let noise_bits = if self.err.is_zero() { 0 } else { self.err.bits() as u32 + 1 };
        let bits = self.prec.saturating_sub(noise_bits);
        (f64::from(bits) * core::f64::consts::LOG10_2) as usize
    }

    /// Decimal rendering with `digits` fractional digits, rounded to nearest.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let ten_pow = BigUint::from(10u32).pow(digits as u32);
        let scaled = self.mant.magnitude() * ten_pow;
        let half = BigUint::one() << self.prec >> 1u32;
        let rounded: BigUint = (scaled + half) >> self.prec;
        let s = rounded.to_str_radix(10);
        let sign = if self.mant.is_negative() && !rounded.is_zero() { "-" } else { "" };
        if digits == 0 {
            return format!("{sign}{s}");
        }
        let padded = if s.len() <= digits {
            let mut p = String::new();
            for _ in 0..(digits + 1 - s.len()) {
                p.push('0');
            }
            p.push_str(&s);
            p
        } else {
            s
        };
        let (int_part, frac_part) = padded.split_at(padded.len() - digits);
        format!("{sign}{int_part}.{frac_part}")
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or_else(|| self.significant_decimals());
        f.write_str(&self.to_decimal_string(digits))
    }
}

fn big_to_f64_scaled(v: &BigInt, prec: u32) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let bits = v.bits();
    let (top, shift) = if bits > 900 {
        let s = bits - 64;
        (v >> s, s as i64)
    } else {
        (v.clone(), 0)
    };
    let f = top.to_f64().unwrap_or(f64::NAN);
    let e = shift - i64::from(prec);
    let mut out = f;
    // scale in steps so intermediate powers stay finite
    let mut e = e;
    while e > 0 {
        let step = e.min(1000);
        out *= libm::exp2(step as f64);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        out *= libm::exp2(-(step as f64));
        e += step;
    }
    out
}

fn check_prec(a: &HpReal, b: &HpReal) {
    assert_eq!(a.prec, b.prec, "precision mismatch: {} vs {}", a.prec, b.prec);
}

impl Add<&HpReal> for &HpReal {
    type Output = HpReal;
    fn add(self, rhs: &HpReal) -> HpReal {
        check_prec(self, rhs);
        HpReal::from_fixed(&self.mant + &rhs.mant, self.prec, &self.err + &rhs.err)
    }
}

impl Sub<&HpReal> for &HpReal {
    type Output = HpReal;
    fn sub(self, rhs: &HpReal) -> HpReal {
        check_prec(self, rhs);
        HpReal::from_fixed(&self.mant - &rhs.mant, self.prec, &self.err + &rhs.err)
    }
}

impl Add for HpReal {
    type Output = HpReal;
    fn add(self, rhs: HpReal) -> HpReal {
        &self + &rhs
    }
}

impl Sub for HpReal {
    type Output = HpReal;
    fn sub(self, rhs: HpReal) -> HpReal {
        &self - &rhs
    }
}

impl Neg for HpReal {
    type Output = HpReal;
    fn neg(self) -> HpReal {
        HpReal::from_fixed(-self.mant, self.prec, self.err)
    }
}

/// `⌊k^(1/m) · 2^prec⌋`, the fixed-point mantissa of the root.
pub(crate) fn root_mantissa(k: &Natural, m: u32, prec: u32) -> Natural {
    nth_root(&(k << (u64::from(m) * u64::from(prec))), m)
}

/// `k^(1/m)` to within one ulp, exact when `k` is a perfect `m`-th power.
pub fn hp_root(k: &Natural, m: u32, prec: u32) -> HpReal {
    let r = nth_root(k, m);
    if r.pow(m) == *k {
        return HpReal::from_integer(r, prec);
    }
    HpReal::from_fixed(BigInt::from(root_mantissa(k, m, prec)), prec, BigUint::one())
}

/// `{k^(1/m)}`, in `[0, 1)`; exactly zero for perfect powers.
pub fn frac_part(k: &Natural, m: u32, prec: u32) -> HpReal {
    let r = nth_root(k, m);
    let root = hp_root(k, m, prec);
    &root - &HpReal::from_integer(r, prec)
}

/// `n^e` for rational `e` and `n >= 1`, within one ulp.
pub fn pow_rat(n: &Natural, e: &Rat, prec: u32) -> HpReal {
    assert!(!n.is_zero(), "pow_rat needs n >= 1");
    let num = e.numer();
    let den = e
        .denom()
        .to_u32()
        .expect("exponent denominator fits in u32");
    let a = num
        .magnitude()
        .to_u32()
        .expect("exponent numerator fits in u32");
    let shift = u64::from(den) * u64::from(prec);
    let (radicand, divides) = if num.is_negative() {
        let (q, r) = (BigUint::one() << shift).div_rem(&n.pow(a));
        (q, r.is_zero())
    } else {
        (n.pow(a) << shift, true)
    };
    let root = nth_root(&radicand, den);
    let exact = divides && root.pow(den) == radicand;
    let err = if exact { 0u32 } else { 1 };
    HpReal::from_fixed(BigInt::from(root), prec, BigUint::from(err))
}

/// `coeff · n^exponent`, error at most `⌈|coeff|⌉ + 1` ulps.
pub fn eval_term(term: &ExpansionTerm, n: &Natural, prec: u32) -> HpReal {
    pow_rat(n, &term.exponent, prec).mul_rat(&term.coeff)
}

/// Upper bound for `|coeff · n^exponent|` in ulps.
pub fn term_upper_bound_ulps(term: &ExpansionTerm, n: &Natural, prec: u32) -> BigUint {
    let v = eval_term(term, n, prec);
    v.mant.magnitude() + &v.err + 1u32
}

/// Sum of all non-constant terms of `e` at `n`.
pub fn eval_terms(e: &Expansion, n: &Natural, prec: u32) -> HpReal {
    e.terms()
        .fold(HpReal::zero(prec), |acc, t| acc + eval_term(t, n, prec))
}

/// `Σ coeff·n^exponent + ζ(-1/m)`, with the supplied constant.
pub fn eval_expansion(e: &Expansion, zeta_value: &HpReal, n: &Natural, prec: u32) -> Result<HpReal> {
    if n.is_zero() {
        return Err(invalid("expansions are evaluated at n >= 1"));
    }
    Ok(eval_terms(e, n, prec) + zeta_value.with_precision(prec))
}

/// Estimate of `ζ(-1/m)` from a finite power sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaEstimate {
    pub m: u32,
    pub value: HpReal,
    pub n_used: Natural,
    pub p_used: u32,
    /// Truncation bound (twice the first omitted term) plus arithmetic error.
    pub error_estimate: HpReal,
}

fn check_decreasing(m: u32, n: &Natural, p: u32) -> Result<()> {
    let nf = n.to_f64().unwrap_or(f64::MAX);
    let mut prev = f64::INFINITY;
    for k in 1..=p + 1 {
        let mag = series::term_log2_magnitude(&series::em_correction_coeff(m, k), nf);
        if mag >= prev {
            return Err(Error::TermsNotDecreasing {
                n: n.clone(),
                p,
                failed_at: k,
            });
        }
        prev = mag;
    }
    Ok(())
}

/// `ζ(-1/m) ≈ Σ_{k≤n} k^(1/m) - [m/(m+1) n^(1+1/m) + n^(1/m)/2 + Σ_{k=1..p} c_k n^(1/m-2k+1)]`.
///
/// The error of the estimate is that of the first omitted correction term.
/// Refuses when the correction terms up to order `p + 1` are not strictly
/// shrinking at this `n`.
pub fn estimate_zeta_neg_inv(m: u32, n: &Natural, p: u32, prec: u32) -> Result<ZetaEstimate> {
    if m < 2 {
        return Err(invalid(format!("root degree m must be >= 2, got {m}")));
    }
    if n.is_zero() {
        return Err(invalid("zeta estimation needs n >= 1"));
    }
    check_decreasing(m, n, p)?;
    let e = build_power_sum_expansion(m, p);
    let sum = oracle::power_sum(n, m, prec)?;
    let value = &sum - &eval_terms(&e, n, prec);
    let tail = term_upper_bound_ulps(&e.first_omitted(), n, prec) * 2u32 + value.err_ulps();
    Ok(ZetaEstimate {
        m,
        error_estimate: HpReal::from_fixed(BigInt::from(tail), prec, BigUint::zero()),
        value,
        n_used: n.clone(),
        p_used: p,
    })
}

static ZETA_CACHE: RwLock<BTreeMap<(u32, u32), HpReal>> = RwLock::new(BTreeMap::new());

/// `ζ(-1/m)` at precision `prec`, with its total error folded into the
/// error bound. Computed once per `(m, prec)` and cached.
pub fn zeta_neg_inv(m: u32, prec: u32) -> Result<HpReal> {
    if let Some(v) = ZETA_CACHE.read().get(&(m, prec)) {
        return Ok(v.clone());
    }
    let value = compute_zeta(m, prec)?;
    ZETA_CACHE.write().entry((m, prec)).or_insert(value.clone());
    Ok(value)
}

fn compute_zeta(m: u32, prec: u32) -> Result<HpReal> {
    if m < 2 {
        return Err(invalid(format!("root degree m must be >= 2, got {m}")));
    }
    let work = prec + GUARD_BITS;
    let target = -(f64::from(work) + 2.0);
    let mut n: u64 = 512;
    loop {
        let nf = n as f64;
        let mut prev = f64::INFINITY;
        let mut chosen = None;
        for p in 1..400u32 {
            let mag = series::term_log2_magnitude(&series::em_correction_coeff(m, p + 1), nf);
            if mag >= prev {
                break;
            }
            prev = mag;
            if mag < target {
                chosen = Some(p);
                break;
            }
        }
        if let Some(p) = chosen {
            let est = estimate_zeta_neg_inv(m, &Natural::from(n), p, work)?;
            let lowered = est.value.with_precision(prec);
            let extra = est.error_estimate.mant.magnitude().div_ceil(&(BigUint::one() << GUARD_BITS)) + 1u32;
            return Ok(lowered.with_extra_error(&extra));
        }
        n *= 2;
    }
}
