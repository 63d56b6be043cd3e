//! Permanents of root-of-unity exponent matrices and the transition
//! amplitudes built on them.
//!
//! [`permanent_ryser`] is the production path: Ryser's inclusion-exclusion
//! formula walked in Gray-code order, so each step adds or removes a single
//! column from the per-row partial sums. Because every entry is a monomial
//! `w^e`, a row sum is just a histogram of exponents, and the product over
//! rows is a cyclic convolution of non-negative integer vectors.
//! [`permanent_naive`] sums over all `n!` permutations and exists as an
//! independent oracle for small matrices.

use std::ops::{AddAssign, SubAssign};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use statrs::function::factorial::ln_factorial;

use crate::bs_core::ExponentMatrix;
use crate::cyclo::CycloPoly;
use crate::error::{Error, Result};
use crate::lambda::{build_lambda, Transition};

/// Largest side accepted by [`permanent_naive`].
pub const NAIVE_MAX_SIDE: usize = 9;

/// Default resource guard for [`permanent_ryser`].
pub const DEFAULT_MAX_SIDE: usize = 20;

/// Gray-code steps handled by one worker task.
const CHUNK_BITS: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PermanentConfig {
    /// Matrices with a larger side are refused.
    pub max_side: usize,
    /// Split the subset walk across the rayon pool.
    pub parallel: bool,
}

impl Default for PermanentConfig {
    fn default() -> Self {
        Self {
            max_side: DEFAULT_MAX_SIDE,
            parallel: true,
        }
    }
}

impl PermanentConfig {
    pub fn with_max_side(max_side: usize) -> Self {
        Self {
            max_side,
            ..Self::default()
        }
    }
}

/// Sum over all permutations. Every diagonal is a monomial, so the result
/// has integer coefficients.
pub fn permanent_naive(m: &ExponentMatrix) -> Result<CycloPoly> {
    let n = check_square(m)?;
    if n > NAIVE_MAX_SIDE {
        return Err(Error::ResourceGuard {
            what: "naive permanent",
            side: n,
            limit: NAIVE_MAX_SIDE,
            advice: "the factorial-time oracle is for cross-checks only; use the Ryser path",
        });
    }
    let order = m.order();
    let mut counts = vec![0u64; order];
    fn walk(m: &ExponentMatrix, row: usize, used: u32, exp: usize, counts: &mut [u64]) {
        if row == m.rows() {
            counts[exp] += 1;
            return;
        }
        let order = m.order();
        for col in 0..m.cols() {
            if used & (1 << col) == 0 {
                let e = (exp + m.get(row, col) as usize) % order;
                walk(m, row + 1, used | (1 << col), e, counts);
            }
        }
    }
    walk(m, 0, 0, 0, &mut counts);
    CycloPoly::from_integers(order, counts)
}

pub fn permanent_ryser(m: &ExponentMatrix) -> Result<CycloPoly> {
    permanent_ryser_with(m, &PermanentConfig::default())
}

pub fn permanent_ryser_with(m: &ExponentMatrix, cfg: &PermanentConfig) -> Result<CycloPoly> {
    let n = check_square(m)?;
    if n > cfg.max_side {
        return Err(Error::ResourceGuard {
            what: "Ryser permanent",
            side: n,
            limit: cfg.max_side,
            advice: "raise max_side in the configuration if the 2^n run time is acceptable",
        });
    }
    if n == 0 {
        return CycloPoly::one(m.order());
    }
    let total: Vec<BigInt> = if fits_i128(n) {
        ryser::<i128>(m, cfg.parallel)
            .into_iter()
            .map(BigInt::from)
            .collect()
    } else {
        ryser::<BigInt>(m, cfg.parallel)
    };
    CycloPoly::from_integers(m.order(), total)
}

fn check_square(m: &ExponentMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if m.rows() > 63 {
        return Err(Error::ResourceGuard {
            what: "permanent",
            side: m.rows(),
            limit: 63,
            advice: "subset indices are 64-bit",
        });
    }
    Ok(m.rows())
}

/// Every per-subset product has non-negative coefficients summing to
/// `|S|^n`, so `sum_k C(n,k) k^n` bounds every partial and final sum.
fn fits_i128(n: usize) -> bool {
    let mut bound = BigUint::zero();
    let mut binom = BigUint::from(1u32);
    for k in 0..=n {
        bound += &binom * BigUint::from(k).pow(n as u32);
        binom = binom * BigUint::from(n - k) / BigUint::from(k + 1);
    }
    bound <= BigUint::from(i128::MAX as u128)
}

trait Coeff: Clone + Zero + AddAssign + SubAssign + Send {
    fn mul_small(&self, k: i64) -> Self;
    fn from_small(k: i64) -> Self;
}

impl Coeff for i128 {
    #[inline]
    fn mul_small(&self, k: i64) -> Self {
        self * k as i128
    }
    #[inline]
    fn from_small(k: i64) -> Self {
        k as i128
    }
}

impl Coeff for BigInt {
    fn mul_small(&self, k: i64) -> Self {
        self * k
    }
    fn from_small(k: i64) -> Self {
        BigInt::from(k)
    }
}

/// Signed Ryser sum `(-1)^n sum_S (-1)^{|S|} prod_i rowsum_i(S)` as an
/// exponent-indexed coefficient vector.
fn ryser<T: Coeff>(m: &ExponentMatrix, parallel: bool) -> Vec<T> {
    let n = m.rows();
    let steps: u64 = 1 << n;
    let chunk = 1u64 << CHUNK_BITS.min(n as u32);
    let chunks = steps / chunk;
    let run = |c: u64| walk_segment::<T>(m, c * chunk, (c + 1) * chunk);
    let mut total = if parallel && chunks > 1 {
        (0..chunks)
            .into_par_iter()
            .map(run)
            .reduce(|| vec![T::zero(); m.order()], add_vec)
    } else {
        (0..chunks).map(run).fold(vec![T::zero(); m.order()], add_vec)
    };
    if n % 2 == 1 {
        for c in &mut total {
            let v = std::mem::replace(c, T::zero());
            *c -= v;
        }
    }
    total
}

fn add_vec<T: Coeff>(mut a: Vec<T>, b: Vec<T>) -> Vec<T> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

#[inline]
fn gray(k: u64) -> u64 {
    k ^ (k >> 1)
}

/// Gray-code steps `start..end`; step `k` visits subset `gray(k)`. Step 0
/// (the empty set) contributes nothing.
fn walk_segment<T: Coeff>(m: &ExponentMatrix, start: u64, end: u64) -> Vec<T> {
    let n = m.rows();
    let order = m.order();
    // counts[i * order + e]: columns of the current subset with w^e in row i.
    let mut counts = vec![0i64; n * order];
    let first = gray(start);
    for j in (0..n).filter(|j| first >> j & 1 == 1) {
        for i in 0..n {
            counts[i * order + m.get(i, j) as usize] += 1;
        }
    }
    let mut out = vec![T::zero(); order];
    let mut acc = vec![T::zero(); order];
    let mut tmp = vec![T::zero(); order];
    for k in start..end {
        if k != start {
            let j = k.trailing_zeros() as usize;
            let delta = if gray(k) >> j & 1 == 1 { 1 } else { -1 };
            for i in 0..n {
                counts[i * order + m.get(i, j) as usize] += delta;
            }
        }
        if k == 0 {
            continue;
        }
        row_product(&counts, n, order, &mut acc, &mut tmp);
        let odd = gray(k).count_ones() % 2 == 1;
        for (o, a) in out.iter_mut().zip(acc.iter_mut()) {
            let a = std::mem::replace(a, T::zero());
            if odd {
                *o -= a;
            } else {
                *o += a;
            }
        }
    }
    out
}

/// Cyclic convolution of all row histograms into `acc`.
fn row_product<T: Coeff>(counts: &[i64], n: usize, order: usize, acc: &mut [T], tmp: &mut [T]) {
    for (a, &c) in acc.iter_mut().zip(&counts[..order]) {
        *a = T::from_small(c);
    }
    for i in 1..n {
        let row = &counts[i * order..(i + 1) * order];
        for t in tmp.iter_mut() {
            *t = T::zero();
        }
        for (x, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (y, &r) in row.iter().enumerate() {
                if r != 0 {
                    let idx = if x + y >= order { x + y - order } else { x + y };
                    tmp[idx] += a.mul_small(r);
                }
            }
        }
        acc.swap_with_slice(tmp);
    }
}

/// `Perm(Lambda)` without the factorial and `1/sqrt(N)` prefactors. It
/// vanishes exactly when the physical amplitude does.
pub fn amplitude_unnormalized(t: &Transition) -> Result<CycloPoly> {
    amplitude_unnormalized_with(t, &PermanentConfig::default())
}

pub fn amplitude_unnormalized_with(t: &Transition, cfg: &PermanentConfig) -> Result<CycloPoly> {
    permanent_ryser_with(&build_lambda(t)?, cfg)
}

/// `Perm(Lambda) N^{-n/2} / sqrt(prod n_i! prod m_j!)` as a complex number.
/// Exact zeros evaluate to exactly zero.
pub fn amplitude_normalized(t: &Transition) -> Result<Complex64> {
    amplitude_normalized_with(t, &PermanentConfig::default())
}

pub fn amplitude_normalized_with(t: &Transition, cfg: &PermanentConfig) -> Result<Complex64> {
    let perm = amplitude_unnormalized_with(t, cfg)?;
    Ok(perm.reduce().eval_numeric() * normalization(t))
}

/// The real prefactor turning `Perm(Lambda)` into the amplitude.
pub fn normalization(t: &Transition) -> f64 {
    let n = t.photons() as f64;
    let ln_fact: f64 = t
        .input()
        .iter()
        .chain(t.output())
        .map(|&k| ln_factorial(k as u64))
        .sum();
    (-0.5 * n * (t.order() as f64).ln() - 0.5 * ln_fact).exp()
}

/// `Perm(S_N)` for the unnormalised beam splitter, as an exact integer when
/// it is rational.
pub fn sn_permanent_value(order: usize) -> Result<(CycloPoly, Option<i128>)> {
    let ones = vec![1; order];
    let t = Transition::new(order, ones.clone(), ones)?;
    let perm = amplitude_unnormalized(&t)?;
    let value = perm
        .as_rational_integer()
        .filter(|r| r.is_integer())
        .and_then(|r| r.to_integer().to_i128());
    Ok((perm, value))
}
