//! The symmetric SU(N) beam splitter as a grid of root-of-unity exponents,
//! plus the full and alternating root-of-unity sums.

use serde::{Deserialize, Serialize};

use crate::cyclo::{wrap, CycloPoly};
use crate::error::{Error, Result};

/// A matrix whose `(i, j)` entry is `w^{entries[i][j]}` for `w` a primitive
/// `order`-th root of unity. Entries are kept in `0..order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentMatrix {
    order: usize,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl ExponentMatrix {
    /// Builds a matrix from a row-major exponent grid, wrapping every entry
    /// modulo `order`.
    pub fn from_rows(order: usize, rows: &[Vec<i64>]) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidOrder(order));
        }
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            entries.extend(row.iter().map(|&e| wrap(e, order) as u32));
        }
        Ok(Self {
            order,
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub(crate) fn from_fn(
        order: usize,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> i64,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(wrap(f(i, j), order) as u32);
            }
        }
        Self {
            order,
            rows,
            cols,
            entries,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Sum of row `i` as a ring element.
    pub fn row_sum(&self, i: usize) -> CycloPoly {
        self.sum_of(self.row(i).iter().copied())
    }

    pub fn col_sum(&self, j: usize) -> CycloPoly {
        self.sum_of((0..self.rows).map(|i| self.get(i, j)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.order, self.cols, self.rows, |i, j| {
            self.get(j, i) as i64
        })
    }

    /// Multiplies row `i` by `w^{shift}`.
    pub fn shift_row(&mut self, i: usize, shift: i64) {
        let order = self.order;
        let cols = self.cols;
        for e in &mut self.entries[i * cols..(i + 1) * cols] {
            *e = wrap(*e as i64 + shift, order) as u32;
        }
    }

    /// Cyclically moves rows down by `k`; the bottom `k` rows land on top.
    pub fn rotate_rows_down(&mut self, k: usize) {
        if self.rows == 0 {
            return;
        }
        let k = (k % self.rows) * self.cols;
        self.entries.rotate_right(k);
    }

    fn sum_of(&self, exps: impl Iterator<Item = u32>) -> CycloPoly {
        let mut counts = vec![0i64; self.order];
        for e in exps {
            counts[e as usize] += 1;
        }
        CycloPoly::from_integers(self.order, counts).expect("order is positive")
    }
}

#[derive(Serialize, Deserialize)]
struct ExponentMatrixRepr {
    #[serde(rename = "N")]
    order: usize,
    entries: Vec<Vec<u32>>,
}

impl Serialize for ExponentMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExponentMatrixRepr {
            order: self.order,
            entries: self.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExponentMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ExponentMatrixRepr::deserialize(d)?;
        let rows: Vec<Vec<i64>> = repr
            .entries
            .iter()
            .map(|r| r.iter().map(|&e| e as i64).collect())
            .collect();
        Self::from_rows(repr.order, &rows).map_err(serde::de::Error::custom)
    }
}

/// The unnormalised symmetric beam splitter: entry `(i, j)` is
/// `w^{(i-1)(j-1) mod N}` in 1-based indexing. The `1/sqrt(N)` prefactor is
/// applied at amplitude level.
pub fn build_sn(order: usize) -> Result<ExponentMatrix> {
    if order == 0 {
        return Err(Error::InvalidOrder(order));
    }
    Ok(ExponentMatrix::from_fn(order, order, order, |i, j| {
        ((i * j) % order) as i64
    }))
}

/// `1 + w + ... + w^{N-1}`.
pub fn fsr(order: usize) -> Result<CycloPoly> {
    CycloPoly::from_integers(order, std::iter::repeat_n(1i64, order))
}

/// `sum_{i=1}^{N/2^q} (-1)^{i-1} (w^{2^{q-1}})^{i-1}`, defined when `2^q | N`.
pub fn afsr(order: usize, q: u32) -> Result<CycloPoly> {
    if order == 0 {
        return Err(Error::InvalidOrder(order));
    }
    let block = 1usize
        .checked_shl(q)
        .filter(|b| q >= 1 && order.is_multiple_of(*b))
        .ok_or(Error::AfsrNotDivisible { order, q })?;
    let step = (block / 2) as i64;
    let mut out = CycloPoly::zero(order)?;
    for i in 0..(order / block) as i64 {
        let term = CycloPoly::from_power(order, step * i)?;
        out = if i % 2 == 0 { &out + &term } else { &out - &term };
    }
    Ok(out)
}
