//! Exact coefficient lists for the Euler-Maclaurin expansion of
//! `Σ_{k=1..n} k^(1/m)`.
//!
//! An [`Expansion`] only records rationals. Turning it into numbers happens in
//! [`crate::hp`].

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exact::{bernoulli, factorial, Rat};

/// One `coeff · n^exponent` term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionTerm {
    pub coeff: Rat,
    pub exponent: Rat,
}

/// Asymptotic expansion of `Σ_{k=1..n} k^(1/m)` truncated after `p`
/// Bernoulli correction terms:
///
/// `m/(m+1)·n^(1+1/m) + n^(1/m)/2 + ζ(-1/m) + Σ_{k=1..p} c_k·n^(1/m-(2k-1))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub m: u32,
    pub p: u32,
    pub leading_terms: Vec<ExpansionTerm>,
    /// Argument `s = -1/m` of the additive constant `ζ(s)`.
    pub zeta_arg: Rat,
    pub correction_terms: Vec<ExpansionTerm>,
}

impl Expansion {
    /// All non-constant terms in order of decreasing exponent.
    pub fn terms(&self) -> impl Iterator<Item = &ExpansionTerm> {
        self.leading_terms.iter().chain(self.correction_terms.iter())
    }

    /// The correction term of order `p + 1`, which bounds the truncation error.
    pub fn first_omitted(&self) -> ExpansionTerm {
        em_correction_coeff(self.m, self.p + 1)
    }
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

fn rat_int(v: BigInt) -> Rat {
    Rat::from_integer(v)
}

/// Generalized binomial coefficient `C(alpha, j) = Π_{k=1..j} (alpha-k+1)/k`.
pub fn binom_rational(alpha: &Rat, j: u32) -> Rat {
    let mut acc = Rat::one();
    for k in 1..=j {
        let k = rat_int(BigInt::from(k));
        acc = acc * (alpha - &k + Rat::one()) / k;
    }
    acc
}

/// Coefficient of `(1+x)^(1/2)` at `x^j` in the closed form
/// `(-1)^(j+1)(2j+1)! / (4^j (j!)^2 (4j^2 - 1))`.
pub fn binom_half_closed_form(j: u32) -> Rat {
    let sign = if j.is_multiple_of(2) { -1 } else { 1 };
    let num = BigInt::from(factorial(2 * j + 1)) * sign;
    let fj = BigInt::from(factorial(j));
    let jj = BigInt::from(j);
    let den = BigInt::from(4).pow(j) * &fj * &fj * (&jj * &jj * 4 - 1);
    Rat::new(num, den)
}

/// `d^j/dx^j √x` at `x = 1`, written as
/// `(-1)^(j+1)(2j+1)! / (4^j j! (4j^2 - 1))`.
pub fn sqrt_derivative_at_one(j: u32) -> Rat {
    binom_half_closed_form(j) * rat_int(BigInt::from(factorial(j)))
}

/// Euler-Maclaurin correction term of order `k` for `f(x) = x^(1/m)`:
/// `C(1/m, 2k-1)·(2k-1)!·B_{2k}/(2k)!` times `n^(1/m-(2k-1))`.
///
/// # Panics
/// If `m < 1` or `k < 1`.
pub fn em_correction_coeff(m: u32, k: u32) -> ExpansionTerm {
    assert!(m >= 1, "m must be positive");
    assert!(k >= 1, "correction order starts at 1");
    let alpha = rat(1, i64::from(m));
    let order = 2 * k - 1;
    let derivative = binom_rational(&alpha, order) * rat_int(BigInt::from(factorial(order)));
    let coeff = derivative * bernoulli(2 * k as usize)
        / rat_int(BigInt::from(factorial(2 * k)));
    ExpansionTerm {
        coeff,
        exponent: alpha - rat_int(BigInt::from(order)),
    }
}

/// The square-root coefficient as printed in closed form:
/// `B_{2k}(4k-1)! / (4^(2k-1)(2k-1)!(2k)!(4k-1)(4k-3))`.
pub fn em_coeff_sqrt_paperform(k: u32) -> Rat {
    assert!(k >= 1, "correction order starts at 1");
    let num = BigInt::from(factorial(4 * k - 1));
    let den = BigInt::from(4).pow(2 * k - 1)
        * BigInt::from(factorial(2 * k - 1))
        * BigInt::from(factorial(2 * k))
        * BigInt::from(4 * k - 1)
        * BigInt::from(4 * k - 3);
    bernoulli(2 * k as usize) * Rat::new(num, den)
}

/// Expansion of `Σ_{k=1..n} k^(1/m)` with `p` correction terms.
///
/// # Panics
/// If `m < 2`.
pub fn build_power_sum_expansion(m: u32, p: u32) -> Expansion {
    assert!(m >= 2, "root degree must be at least 2");
    let alpha = rat(1, i64::from(m));
    let leading_terms = alloc::vec![
        ExpansionTerm {
            coeff: rat(i64::from(m), i64::from(m) + 1),
            exponent: &alpha + Rat::one(),
        },
        ExpansionTerm {
            coeff: rat(1, 2),
            exponent: alpha.clone(),
        },
    ];
    let correction_terms = (1..=p).map(|k| em_correction_coeff(m, k)).collect();
    Expansion {
        m,
        p,
        leading_terms,
        zeta_arg: -alpha,
        correction_terms,
    }
}

/// The square-root expansion assembled from the hand-derived coefficients of
/// [`em_coeff_sqrt_paperform`] with exponents `-(2k - 3/2)`. Must coincide
/// with `build_power_sum_expansion(2, p)`.
pub fn build_sqrt_expansion_closed_form(p: u32) -> Expansion {
    let leading_terms = alloc::vec![
        ExpansionTerm {
            coeff: rat(2, 3),
            exponent: rat(3, 2),
        },
        ExpansionTerm {
            coeff: rat(1, 2),
            exponent: rat(1, 2),
        },
    ];
    let correction_terms = (1..=p)
        .map(|k| ExpansionTerm {
            coeff: em_coeff_sqrt_paperform(k),
            exponent: -(rat(2 * i64::from(k), 1) - rat(3, 2)),
        })
        .collect();
    Expansion {
        m: 2,
        p,
        leading_terms,
        zeta_arg: rat(-1, 2),
        correction_terms,
    }
}

/// `log2 |coeff · n^exponent|`, for magnitude comparisons only.
pub fn term_log2_magnitude(term: &ExpansionTerm, n: f64) -> f64 {
    if term.coeff.is_zero() {
        return f64::NEG_INFINITY;
    }
    let c = log2_big(term.coeff.numer().abs()) - log2_big(term.coeff.denom().clone());
    let e = ratio_f64(&term.exponent);
    c + e * libm::log2(n)
}

pub(crate) fn log2_big(v: BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return libm::log2(num_traits::ToPrimitive::to_f64(&v).unwrap_or(f64::NAN));
    }
    let shift = bits - 64;
    let top: BigInt = v >> shift;
    libm::log2(num_traits::ToPrimitive::to_f64(&top).unwrap_or(f64::NAN)) + shift as f64
}

pub(crate) fn ratio_f64(r: &Rat) -> f64 {
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    if r.is_zero() {
        return 0.0;
    }
    let l = log2_big(r.numer().abs()) - log2_big(r.denom().clone());
    sign * libm::exp2(l)
}
