//! Exact integer and rational arithmetic.
//!
//! Everything in this module is computed without floating point. The only
//! use of `f64` is to seed the Newton iteration in [`integer_nth_root`], and
//! the result is corrected to the exact bracket afterwards.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use spin::RwLock;

use crate::error::{inconsistent, invalid, Result};

/// Arbitrary-size nonnegative integer.
pub type Natural = BigUint;

/// Exact rational, always kept in lowest terms with a positive denominator.
pub type Rat = BigRational;

/// Result of a closed-form floor-sum evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloorSumResult {
    pub n: Natural,
    pub m: u32,
    /// `⌊n^(1/m)⌋`.
    pub root: Natural,
    /// `Σ_{k=1..n} ⌊k^(1/m)⌋`.
    pub total: Natural,
}

/// `⌊n^(1/m)⌋` for any magnitude.
pub fn integer_nth_root(n: &Natural, m: u32) -> Result<Natural> {
    if m == 0 {
        return Err(invalid("root degree m must be at least 1"));
    }
    Ok(nth_root(n, m))
}

pub(crate) fn nth_root(n: &Natural, m: u32) -> Natural {
    debug_assert!(m >= 1);
    if m == 1 || n.bits() <= 1 {
        return n.clone();
    }
    if n.bits() <= u64::from(m) {
        // 1 <= n < 2^m
        return Natural::one();
    }
    if n.bits() <= FAST_ROOT_BITS {
        return Natural::from(nth_root_small(n.to_u128().unwrap_or(0), m));
    }

    let mut x = newton_seed(n, m);
    let m_big = Natural::from(m);
    let m_minus_one = Natural::from(m - 1);
    loop {
        let y = (&x * &m_minus_one + n / x.pow(m - 1)) / &m_big;
        if y >= x {
            break;
        }
        x = y;
    }
    while x.pow(m) > *n {
        x -= 1u32;
    }
    loop {
        let next = &x + 1u32;
        if next.pow(m) > *n {
            break;
        }
        x = next;
    }
    x
}

/// An upper bound for `n^(1/m)` taken from the leading bits of `n`.
fn newton_seed(n: &Natural, m: u32) -> Natural {
    let bits = n.bits();
    let m64 = u64::from(m);
    if m64 > 60 {
        return Natural::one() << bits.div_ceil(m64);
    }
    let shift = if bits > 64 { ((bits - 64) / m64) * m64 } else { 0 };
    // top < 2^(64 + m)
    let top = (n >> shift).to_f64().unwrap_or(f64::MAX);
    let est = libm::pow(top + 1.0, 1.0 / f64::from(m)) * (1.0 + 1e-9) + 2.0;
    let est = Natural::from(libm::ceil(est) as u128);
    est << (shift / m64)
}

// Below this size an f64 estimate of the root is off by at most a unit or two.
const FAST_ROOT_BITS: u64 = 104;

/// `⌊n^(1/m)⌋` on machine integers, used by the hot loops of the oracle.
pub fn nth_root_u128(n: u128, m: u32) -> u128 {
    assert!(m >= 1, "root degree m must be at least 1");
    if u64::from(128 - n.leading_zeros()) > FAST_ROOT_BITS {
        return nth_root(&Natural::from(n), m)
            .to_u128()
            .expect("root of a u128 fits in a u128");
    }
    nth_root_small(n, m)
}

fn nth_root_small(n: u128, m: u32) -> u128 {
    if m == 1 || n < 2 {
        return n;
    }
    if m >= 128 {
        return 1;
    }
    let mut x = libm::pow(n as f64, 1.0 / f64::from(m)) as u128;
    // f64 carries ~53 bits; fix up the last few units.
    while x > 0 && pow_exceeds(x, m, n) {
        x -= 1;
    }
    while !pow_exceeds(x + 1, m, n) {
        x += 1;
    }
    x
}

/// `⌊n^(1/m)⌋` for `u64` input.
pub fn nth_root_u64(n: u64, m: u32) -> u64 {
    nth_root_u128(u128::from(n), m) as u64
}

/// `base^m > limit`, without overflow.
fn pow_exceeds(base: u128, m: u32, limit: u128) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..m {
        match acc.checked_mul(base) {
            Some(v) if v <= limit => acc = v,
            _ => return true,
        }
    }
    false
}

static FACTORIALS: RwLock<Vec<BigUint>> = RwLock::new(Vec::new());

/// `k!`, memoized.
pub fn factorial(k: u32) -> Natural {
    let k = k as usize;
    {
        let table = FACTORIALS.read();
        if let Some(v) = table.get(k) {
            return v.clone();
        }
    }
    let mut table = FACTORIALS.write();
    if table.is_empty() {
        table.push(Natural::one());
    }
    while table.len() <= k {
        let i = table.len();
        let next = &table[i - 1] * Natural::from(i);
        table.push(next);
    }
    table[k].clone()
}

/// `C(n, k)` for machine-sized arguments.
pub fn binomial(n: u32, k: u32) -> Natural {
    if k > n {
        return Natural::zero();
    }
    let k = k.min(n - k);
    let mut acc = Natural::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Bernoulli numbers `B_0..B_N` with the convention `B_1 = -1/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliTable {
    values: Vec<Rat>,
}

impl BernoulliTable {
    /// Table holding `B_0..=B_max`.
    pub fn generate(max: usize) -> Self {
        let mut table = BernoulliTable {
            values: vec![Rat::one()],
        };
        table.extend_to(max);
        table
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: usize) -> Option<&Rat> {
        self.values.get(k)
    }

    pub fn as_slice(&self) -> &[Rat] {
        &self.values
    }

    /// Grows the table so that it holds `B_0..=B_max`, using
    /// `Σ_{j=0..n} C(n+1, j) B_j = 0`.
    pub fn extend_to(&mut self, max: usize) {
        while self.values.len() <= max {
            let n = self.values.len();
            if n >= 3 && n % 2 == 1 {
                self.values.push(Rat::zero());
                continue;
            }
            let mut acc = Rat::zero();
            let mut c = BigInt::one(); // C(n+1, j)
            for (j, b) in self.values.iter().enumerate() {
                if !b.is_zero() {
                    acc += b * Rat::from_integer(c.clone());
                }
                c = c * BigInt::from(n + 1 - j) / BigInt::from(j + 1);
            }
            // c is now C(n+1, n) = n + 1
            let b_n = -acc / Rat::from_integer(c);
            self.values.push(b_n);
        }
    }
}

static BERNOULLI: RwLock<Option<BernoulliTable>> = RwLock::new(None);

/// `B_k`, with `B_1 = -1/2`. Backed by a shared table that grows on demand.
pub fn bernoulli(k: usize) -> Rat {
    {
        let guard = BERNOULLI.read();
        if let Some(v) = guard.as_ref().and_then(|t| t.get(k)) {
            return v.clone();
        }
    }
    let mut guard = BERNOULLI.write();
    let table = guard.get_or_insert_with(|| BernoulliTable::generate(0));
    table.extend_to(k);
    table.values[k].clone()
}

/// `Σ_{k=1..n} k^m` through Faulhaber's formula
/// `(1/(m+1)) Σ_{k=0..m} (-1)^k C(m+1,k) B_k n^(m+1-k)`.
///
/// Fails with a consistency error if the rational sum does not reduce to a
/// nonnegative integer.
pub fn faulhaber_sum(n: &Natural, m: u32) -> Result<Natural> {
    let n_int = BigInt::from(n.clone());
    let mut acc = Rat::zero();
    for k in 0..=m {
        let b = bernoulli(k as usize);
        if b.is_zero() {
            continue;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let c = BigInt::from(binomial(m + 1, k)) * sign;
        let power = n_int.pow(m + 1 - k);
        acc += b * Rat::from_integer(c * power);
    }
    acc /= Rat::from_integer(BigInt::from(m + 1));
    rat_to_natural(&acc).ok_or_else(|| {
        inconsistent(format!(
            "Faulhaber sum for n = {n}, m = {m} evaluated to non-integer {acc}"
        ))
    })
}

fn rat_to_natural(r: &Rat) -> Option<Natural> {
    if !r.is_integer() || r.is_negative() {
        return None;
    }
    r.to_integer().to_biguint()
}

fn exact_div(num: BigInt, den: u32, what: &str) -> Result<Natural> {
    let (q, r) = num.div_rem(&BigInt::from(den));
    if !r.is_zero() {
        return Err(inconsistent(format!(
            "{what}: division by {den} left remainder {r}"
        )));
    }
    match q.sign() {
        Sign::Minus => Err(inconsistent(format!("{what}: negative total {q}"))),
        _ => Ok(q.magnitude().clone()),
    }
}

/// `Σ_{k=1..n} ⌊√k⌋ = (1/6)·M·(6n + 5 - 3M - 2M²)` with `M = ⌊√n⌋`.
pub fn floor_sqrt_sum(n: &Natural) -> FloorSumResult {
    let root = nth_root(n, 2);
    let total = if n.is_zero() {
        Natural::zero()
    } else {
        let m = BigInt::from(root.clone());
        let n_int = BigInt::from(n.clone());
        let bracket = &n_int * 6 + 5 - &m * 3 - &m * &m * 2;
        // an inexact division here means the formula has been mistyped
        exact_div(m * bracket, 6, "square-root floor sum").expect("closed form is exact")
    };
    FloorSumResult {
        n: n.clone(),
        m: 2,
        root,
        total,
    }
}

/// `Σ_{k=1..n} ⌊k^(1/m)⌋` for any `m >= 2`:
/// `M(n - M^m + 1) + M^(m+1) - Σ_{j=1..M} j^m` with `M = ⌊n^(1/m)⌋`,
/// the power sum taken through [`faulhaber_sum`].
pub fn floor_root_sum(n: &Natural, m: u32) -> Result<FloorSumResult> {
    if m < 2 {
        return Err(invalid(format!("root degree m must be >= 2, got {m}")));
    }
    let root = nth_root(n, m);
    if n.is_zero() {
        return Ok(FloorSumResult {
            n: n.clone(),
            m,
            root,
            total: Natural::zero(),
        });
    }
    let tail_block = &root * (n - root.pow(m) + 1u32);
    let telescoped = root.pow(m + 1);
    let power_sum = faulhaber_sum(&root, m)?;
    let total = tail_block + telescoped;
    if total < power_sum {
        return Err(inconsistent(format!(
            "floor-root sum for n = {n}, m = {m} went negative"
        )));
    }
    Ok(FloorSumResult {
        n: n.clone(),
        m,
        root,
        total: total - power_sum,
    })
}

/// The three hand-expanded closed forms for cube, fourth and fifth roots.
/// Serves as an independent cross-check of [`floor_root_sum`].
pub fn floor_root_sum_special(n: &Natural, m: u32) -> Result<Natural> {
    if !(3..=5).contains(&m) {
        return Err(invalid(format!(
            "special closed forms exist only for m in {{3, 4, 5}}, got {m}"
        )));
    }
    if n.is_zero() {
        return Ok(Natural::zero());
    }
    let r = BigInt::from(nth_root(n, m));
    let n = BigInt::from(n.clone());
    let r2 = &r * &r;
    let r3 = &r2 * &r;
    let r4 = &r3 * &r;
    let (bracket, den) = match m {
        3 => (&n * 4 + 4 - &r - &r2 * 2 - &r3, 4),
        4 => (&n * 30 + 31 - &r4 * 6 - &r3 * 15 - &r2 * 10, 30),
        _ => {
            let r5 = &r4 * &r;
            (&n * 12 + 12 - r5 * 2 - &r4 * 6 - &r3 * 5 + &r, 12)
        }
    };
    exact_div(r * bracket, den, "special floor-root closed form")
}
