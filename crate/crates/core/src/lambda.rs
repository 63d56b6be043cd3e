//! Transitions between Fock occupations and the `n x n` matrix whose
//! permanent gives the transition amplitude.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bs_core::{build_sn, ExponentMatrix};
use crate::error::{Error, Result};

/// `|n_1..n_N> -> |m_1..m_N>` through the N-port symmetric beam splitter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transition {
    #[serde(rename = "N")]
    order: usize,
    #[serde(rename = "in")]
    input: Vec<u32>,
    #[serde(rename = "out")]
    output: Vec<u32>,
}

impl Transition {
    pub fn new(order: usize, input: Vec<u32>, output: Vec<u32>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidOrder(order));
        }
        for v in [&input, &output] {
            if v.len() != order {
                return Err(Error::DimensionMismatch {
                    expected: order,
                    got: v.len(),
                });
            }
        }
        let (a, b) = (total(&input), total(&output));
        if a != b {
            return Err(Error::PhotonMismatch {
                input: a,
                output: b,
            });
        }
        Ok(Self {
            order,
            input,
            output,
        })
    }

    /// The transition onto the coincident output `|n/N>^{N}`.
    pub fn coincident(order: usize, input: Vec<u32>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidOrder(order));
        }
        let n = total(&input);
        if n % order as u64 != 0 {
            return Err(Error::InvalidArgument(format!(
                "{n} photons cannot be split evenly over {order} ports"
            )));
        }
        let m = (n / order as u64) as u32;
        Self::new(order, input, vec![m; order])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn input(&self) -> &[u32] {
        &self.input
    }

    pub fn output(&self) -> &[u32] {
        &self.output
    }

    pub fn photons(&self) -> u64 {
        total(&self.input)
    }

    /// `Some(m)` when every output port holds the same `m` photons.
    pub fn coincident_occupation(&self) -> Option<u32> {
        let first = self.output[0];
        self.output.iter().all(|&m| m == first).then_some(first)
    }

    /// Same transition with input and output exchanged.
    pub fn reversed(&self) -> Self {
        Self {
            order: self.order,
            input: self.output.clone(),
            output: self.input.clone(),
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={} |{}> -> |{}>",
            self.order,
            join(&self.input),
            join(&self.output)
        )
    }
}

fn join(v: &[u32]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn total(v: &[u32]) -> u64 {
    v.iter().map(|&x| x as u64).sum()
}

/// Mode labels (0-based) of the replicated blocks, e.g. `[0, 2, 1]` gives
/// `[1, 2, 2]`.
pub fn block_modes(occupation: &[u32]) -> Vec<usize> {
    occupation
        .iter()
        .enumerate()
        .flat_map(|(mode, &k)| std::iter::repeat_n(mode, k as usize))
        .collect()
}

/// Two-step row/column replication of `S_N`. Rows of the result belong to
/// output modes (row block `i` repeated `m_i` times) and columns to input
/// modes (column block `j` repeated `n_j` times); zero-occupancy modes are
/// skipped.
pub fn build_lambda(t: &Transition) -> Result<ExponentMatrix> {
    let n = t.photons() as usize;
    if n == 0 {
        return Err(Error::EmptyTransition);
    }
    let s = build_sn(t.order())?;

    // Step 1: an n x N matrix of repeated rows.
    let mut rows: Vec<&[u32]> = Vec::with_capacity(n);
    for (i, &k) in t.output().iter().enumerate() {
        for _ in 0..k {
            rows.push(s.row(i));
        }
    }

    // Step 2: repeat columns to reach n x n.
    let mut grid = vec![Vec::with_capacity(n); n];
    for (j, &k) in t.input().iter().enumerate() {
        for _ in 0..k {
            for (r, src) in rows.iter().enumerate() {
                grid[r].push(src[j] as i64);
            }
        }
    }
    ExponentMatrix::from_rows(t.order(), &grid)
}

/// `D_L Lambda D_R` with `D_L = D_R = diag(w^0, .., w^{N-1})` acting on the
/// mode blocks: an entry in output block `i` and input block `j` (0-based)
/// gains exponent `i + j`.
pub fn build_lambda_prime(t: &Transition) -> Result<ExponentMatrix> {
    let lambda = build_lambda(t)?;
    let row_modes = block_modes(t.output());
    let col_modes = block_modes(t.input());
    let n = lambda.rows();
    Ok(ExponentMatrix::from_fn(t.order(), n, n, |r, c| {
        lambda.get(r, c) as i64 + (row_modes[r] + col_modes[c]) as i64
    }))
}
