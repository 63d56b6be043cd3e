//! Exact arithmetic in `Q[w]/(w^N - 1)` with zero-testing modulo the N-th
//! cyclotomic polynomial.
//!
//! Elements are stored as length-`N` coefficient vectors over the powers
//! `w^0 .. w^{N-1}`, so products only ever wrap exponents. Two elements that
//! differ as vectors may still be equal as complex numbers; [`CycloPoly::reduce`]
//! returns the canonical representative and [`CycloPoly::is_zero`] tests the
//! value exactly.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An element of `Q[w]/(w^N - 1)`, read as a polynomial in the primitive
/// N-th root of unity `w = exp(2 pi i / N)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycloPoly {
    order: usize,
    coeffs: Vec<BigRational>,
}

impl CycloPoly {
    pub fn new(order: usize, coeffs: Vec<BigRational>) -> Result<Self> {
        check_order(order)?;
        if coeffs.len() != order {
            return Err(Error::DimensionMismatch {
                expected: order,
                got: coeffs.len(),
            });
        }
        Ok(Self { order, coeffs })
    }

    pub fn zero(order: usize) -> Result<Self> {
        check_order(order)?;
        Ok(Self {
            order,
            coeffs: vec![BigRational::zero(); order],
        })
    }

    pub fn one(order: usize) -> Result<Self> {
        Self::from_power(order, 0)
    }

    /// The monomial `w^p`; negative `p` wraps with Euclidean modulus.
    pub fn from_power(order: usize, p: i64) -> Result<Self> {
        let mut out = Self::zero(order)?;
        out.coeffs[wrap(p, order)] = BigRational::one();
        Ok(out)
    }

    /// Builds an element from integer coefficients; shorter inputs are
    /// zero-padded, longer ones wrap modulo `order`.
    pub fn from_integers<I, T>(order: usize, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let mut out = Self::zero(order)?;
        for (p, c) in coeffs.into_iter().enumerate() {
            out.coeffs[p % order] += BigRational::from_integer(c.into());
        }
        Ok(out)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, p: usize) -> &BigRational {
        &self.coeffs[p % self.order]
    }

    /// True when every stored coefficient is zero. This is a property of
    /// the representation; use [`CycloPoly::is_zero`] for the value.
    pub fn is_trivially_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            order: self.order,
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            order: self.order,
            coeffs,
        })
    }

    /// Cyclic convolution of the coefficient vectors.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let n = self.order;
        let mut coeffs = vec![BigRational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[(i + j) % n] += a * b;
            }
        }
        Ok(Self { order: n, coeffs })
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Multiplies by the monomial `w^p`, which only rotates coefficients.
    pub fn shift(&self, p: i64) -> Self {
        let n = self.order;
        let s = wrap(p, n);
        let mut coeffs = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(i + s) % n] = c.clone();
        }
        Self { order: n, coeffs }
    }

    /// Canonical representative modulo the N-th cyclotomic polynomial:
    /// degree below the totient, zero-padded back to length N.
    pub fn reduce(&self) -> Self {
        let phi = cyclotomic_polynomial(self.order).expect("order validated on construction");
        let deg = phi.degree();
        let mut work = self.coeffs.clone();
        for k in (deg..self.order).rev() {
            if work[k].is_zero() {
                continue;
            }
            let lead = std::mem::take(&mut work[k]);
            // Phi is monic; subtract lead * w^{k-deg} * Phi.
            for (i, c) in phi.coeffs[..deg].iter().enumerate() {
                if !c.is_zero() {
                    work[k - deg + i] -= &lead * BigRational::from_integer(c.clone());
                }
            }
        }
        Self {
            order: self.order,
            coeffs: work,
        }
    }

    /// Exact test of whether the element evaluates to zero at `w`.
    pub fn is_zero(&self) -> bool {
        self.reduce().is_trivially_zero()
    }

    /// Exact value equality (as complex numbers), as opposed to `==`, which
    /// compares representations.
    pub fn value_eq(&self, other: &Self) -> Result<bool> {
        Ok(self.checked_sub(other)?.is_zero())
    }

    pub fn eval_numeric(&self) -> Complex64 {
        let n = self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(p, c)| {
                let theta = 2.0 * PI * p as f64 / n;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), theta)
            })
            .sum()
    }

    /// The exact value when it is a rational number, i.e. when the reduced
    /// form is a constant.
    pub fn as_rational_integer(&self) -> Option<BigRational> {
        let r = self.reduce();
        if r.coeffs[1..].iter().all(Zero::is_zero) {
            Some(r.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Canonical text form, e.g. `1 - 2*w + 1/2*w^3`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let power = match p {
                0 => None,
                1 => Some("w".to_string()),
                _ => Some(format!("w^{p}")),
            };
            match power {
                None => out.push_str(&mag.to_string()),
                Some(w) if mag.is_one() => out.push_str(&w),
                Some(w) => {
                    out.push_str(&mag.to_string());
                    out.push('*');
                    out.push_str(&w);
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            })
        }
    }
}

impl fmt::Display for CycloPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

// Operator forms panic on mismatched orders; the `checked_*` methods report it.
impl Add for &CycloPoly {
    type Output = CycloPoly;
    fn add(self, rhs: Self) -> CycloPoly {
        self.checked_add(rhs).expect("cyclotomic order mismatch")
    }
}

impl Sub for &CycloPoly {
    type Output = CycloPoly;
    fn sub(self, rhs: Self) -> CycloPoly {
        self.checked_sub(rhs).expect("cyclotomic order mismatch")
    }
}

impl Mul for &CycloPoly {
    type Output = CycloPoly;
    fn mul(self, rhs: Self) -> CycloPoly {
        self.checked_mul(rhs).expect("cyclotomic order mismatch")
    }
}

impl Neg for &CycloPoly {
    type Output = CycloPoly;
    fn neg(self) -> CycloPoly {
        CycloPoly {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CycloPolyRepr {
    order: usize,
    coeffs: Vec<String>,
}

impl Serialize for CycloPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CycloPolyRepr {
            order: self.order,
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CycloPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = CycloPolyRepr::deserialize(deserializer)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| D::Error::custom("coefficients must be rationals of the form p or p/q"))?;
        CycloPoly::new(repr.order, coeffs).map_err(D::Error::custom)
    }
}

/// Parses `p` or `p/q` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p.trim().parse().ok()?, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// The N-th cyclotomic polynomial with integer coefficients, lowest degree
/// first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicPolynomial {
    order: usize,
    coeffs: Vec<BigInt>,
}

impl CyclotomicPolynomial {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Equals Euler's totient of the order.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Computes `Phi_N` from `x^N - 1 = prod_{d | N} Phi_d(x)` by exact division.
/// Results are memoised process-wide.
pub fn cyclotomic_polynomial(order: usize) -> Result<Arc<CyclotomicPolynomial>> {
    check_order(order)?;
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CyclotomicPolynomial>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&order) {
        return Ok(hit.clone());
    }
    let mut num = vec![BigInt::zero(); order + 1];
    num[0] = -BigInt::one();
    num[order] = BigInt::one();
    for d in (1..order).filter(|d| order.is_multiple_of(*d)) {
        let phi_d = cyclotomic_polynomial(d)?;
        num = exact_div_monic(&num, &phi_d.coeffs);
    }
    let phi = Arc::new(CyclotomicPolynomial { order, coeffs: num });
    cache.lock().unwrap().insert(order, phi.clone());
    Ok(phi)
}

/// Quotient of `num / den` for monic `den` when the division is exact.
fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "division was not exact");
    quot
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        Err(Error::InvalidOrder(order))
    } else {
        Ok(())
    }
}

pub(crate) fn wrap(p: i64, order: usize) -> usize {
    p.mod_floor(&(order as i64)) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(order: usize, c: &[i64]) -> CycloPoly {
        CycloPoly::from_integers(order, c.iter().copied()).unwrap()
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn from_power_wraps() {
        assert_eq!(CycloPoly::from_power(4, 5).unwrap(), ints(4, &[0, 1]));
        assert_eq!(CycloPoly::from_power(3, 0).unwrap(), ints(3, &[1]));
        assert_eq!(CycloPoly::from_power(4, -1).unwrap(), ints(4, &[0, 0, 0, 1]));
        assert_eq!(CycloPoly::from_power(0, 1), Err(Error::InvalidOrder(0)));
    }

    #[test]
    fn basic_ring_ops() {
        let a = CycloPoly::from_power(4, 2).unwrap();
        let b = CycloPoly::from_power(4, 3).unwrap();
        assert_eq!(&a * &b, CycloPoly::from_power(4, 1).unwrap());

        let s = &CycloPoly::one(2).unwrap() + &CycloPoly::from_power(2, 1).unwrap();
        assert_eq!(s, ints(2, &[1, 1]));
        assert!(s.is_zero());

        let half = ints(3, &[1, 1]).scale(&rat(1, 2));
        assert_eq!(half.coeffs(), &[rat(1, 2), rat(1, 2), rat(0, 1)]);
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let a = CycloPoly::one(3).unwrap();
        let b = CycloPoly::one(4).unwrap();
        assert!(matches!(a.checked_add(&b), Err(Error::OrderMismatch { .. })));
        assert!(matches!(a.checked_mul(&b), Err(Error::OrderMismatch { .. })));
    }

    #[test]
    fn cyclotomic_polynomials() {
        let c = |n| cyclotomic_polynomial(n).unwrap().coeffs().to_vec();
        let b = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(c(1), b(&[-1, 1]));
        assert_eq!(c(4), b(&[1, 0, 1]));
        assert_eq!(c(9), b(&[1, 0, 0, 1, 0, 0, 1]));
        assert_eq!(c(12), b(&[1, 0, -1, 0, 1]));
        // Phi_105 is the first with a coefficient outside {-1, 0, 1}.
        assert!(c(105).iter().any(|x| *x == BigInt::from(-2)));
    }

    #[test]
    fn reduce_examples() {
        assert!(ints(3, &[1, 1, 1]).reduce().is_trivially_zero());
        assert!(ints(4, &[1, 0, 1]).reduce().is_trivially_zero());
        assert_eq!(ints(4, &[2, 1]).reduce(), ints(4, &[2, 1]));
    }

    #[test]
    fn zero_tests_from_alternating_sums() {
        assert!(ints(12, &[1, 0, -1, 0, 1]).is_zero());
        assert!(ints(14, &[1, -1, 1, -1, 1, -1, 1]).is_zero());
        assert!(!ints(5, &[4, 5, 5, 5, 5]).is_zero());
    }

    #[test]
    fn numeric_evaluation() {
        assert!(ints(2, &[1, 1]).eval_numeric().norm() < 1e-15);
        let v = ints(3, &[0, 3, 3]).eval_numeric();
        assert!((v - Complex64::new(-3.0, 0.0)).norm() < 1e-12);
        let seven = ints(9, &[7]).eval_numeric();
        assert_eq!(seven, Complex64::new(7.0, 0.0));
    }

    #[test]
    fn rational_integer_extraction() {
        assert_eq!(
            ints(3, &[0, 3, 3]).as_rational_integer(),
            Some(rat(-3, 1))
        );
        // 1 + w for N = 3 is -w^2, not rational.
        assert_eq!(ints(3, &[1, 1]).as_rational_integer(), None);
        assert_eq!(ints(5, &[]).as_rational_integer(), Some(rat(0, 1)));
    }

    #[test]
    fn text_and_json_forms() {
        let a = CycloPoly::new(4, vec![rat(1, 1), rat(-2, 1), rat(0, 1), rat(1, 2)]).unwrap();
        assert_eq!(a.to_text(), "1 - 2*w + 1/2*w^3");
        assert_eq!(ints(3, &[0, -1]).to_text(), "-w");
        assert_eq!(ints(3, &[]).to_text(), "0");
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"order":4,"coeffs":["1","-2","0","1/2"]}"#);
        let back: CycloPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<CycloPoly>(r#"{"order":2,"coeffs":["1"]}"#).is_err());
    }
}
