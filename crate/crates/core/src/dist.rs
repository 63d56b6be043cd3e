//! Output distributions of finite superpositions of Fock inputs, and the
//! coincidence (central nodal line) check `P(m, .., m) = 0`.

use std::io::Write;

use num_bigint::BigUint;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclo::CycloPoly;
use crate::error::{Error, Result};
use crate::kmatrix::{k_count_bound, permanent_by_ksum};
use crate::lambda::Transition;
use crate::permanent::{amplitude_unnormalized_with, normalization, PermanentConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    /// `[re, im]`.
    pub c: [f64; 2],
    pub n: Vec<u32>,
}

impl Term {
    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.c[0], self.c[1])
    }
}

/// `sum_k c_k |n_k>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionInput {
    #[serde(rename = "N")]
    pub order: usize,
    pub terms: Vec<Term>,
    /// Rescale the coefficients to unit norm when loading.
    #[serde(default)]
    pub normalize: bool,
}

impl SuperpositionInput {
    pub fn new(order: usize, terms: Vec<(Complex64, Vec<u32>)>) -> Result<Self> {
        let s = Self {
            order,
            terms: terms
                .into_iter()
                .map(|(c, n)| Term { c: [c.re, c.im], n })
                .collect(),
            normalize: false,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn fock(input: Vec<u32>) -> Result<Self> {
        Self::new(input.len(), vec![(Complex64::new(1.0, 0.0), input)])
    }

    /// Equal-weight superposition.
    pub fn uniform(order: usize, inputs: Vec<Vec<u32>>) -> Result<Self> {
        let c = Complex64::new(1.0 / (inputs.len() as f64).sqrt(), 0.0);
        Self::new(order, inputs.into_iter().map(|n| (c, n)).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut s: Self = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("state file: {e}")))?;
        s.validate()?;
        if s.normalize {
            let norm = s.norm_sqr().sqrt();
            for t in &mut s.terms {
                t.c = [t.c[0] / norm, t.c[1] / norm];
            }
        }
        Ok(s)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|t| t.amplitude().norm_sqr()).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::InvalidOrder(0));
        }
        if self.terms.is_empty() {
            return Err(Error::InvalidArgument("empty superposition".into()));
        }
        for t in &self.terms {
            if t.n.len() != self.order {
                return Err(Error::DimensionMismatch {
                    expected: self.order,
                    got: t.n.len(),
                });
            }
        }
        Ok(())
    }

    fn totals(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.iter().map(|t| t.n.iter().sum()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Exact `Perm(Lambda)` by whichever of Ryser and the K-matrix sum is
/// cheaper for these margins.
pub fn exact_permanent(t: &Transition, cfg: &PermanentConfig) -> Result<CycloPoly> {
    let ryser_cost = BigUint::from(1u32) << t.photons();
    if k_count_bound(t) < ryser_cost {
        permanent_by_ksum(t)
    } else {
        amplitude_unnormalized_with(t, cfg)
    }
}

/// Normalised amplitude `<m| S |n>`; exact zeros come back as exactly 0.
pub fn transition_amplitude(t: &Transition, cfg: &PermanentConfig) -> Result<Complex64> {
    let perm = exact_permanent(t, cfg)?.reduce();
    if perm.is_trivially_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(perm.eval_numeric() * normalization(t))
}

fn superposed_amplitude(
    input: &SuperpositionInput,
    output: &[u32],
    cfg: &PermanentConfig,
) -> Result<Complex64> {
    let total: u32 = output.iter().sum();
    let mut acc = Complex64::new(0.0, 0.0);
    for term in &input.terms {
        if term.n.iter().sum::<u32>() != total {
            continue;
        }
        let t = Transition::new(input.order, term.n.clone(), output.to_vec())?;
        acc += term.amplitude() * transition_amplitude(&t, cfg)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub m: Vec<u32>,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distribution {
    pub outputs: Vec<Outcome>,
}

impl Distribution {
    pub fn probability(&self, m: &[u32]) -> Option<f64> {
        self.outputs.iter().find(|o| o.m == m).map(|o| o.p)
    }

    pub fn total(&self) -> f64 {
        self.outputs.iter().map(|o| o.p).sum()
    }

    /// `m,p` rows; with `plot` set, one column per mode (`m1..mN,p`).
    pub fn write_csv<W: Write>(&self, out: W, plot: bool) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        let mut w = csv::Writer::from_writer(out);
        let order = self.outputs.first().map_or(0, |o| o.m.len());
        if plot {
            let mut header: Vec<String> = (1..=order).map(|i| format!("m{i}")).collect();
            header.push("p".into());
            w.write_record(&header).map_err(io)?;
        } else {
            w.write_record(["m", "p"]).map_err(io)?;
        }
        for o in &self.outputs {
            let cells: Vec<String> = o.m.iter().map(ToString::to_string).collect();
            if plot {
                let mut row = cells;
                row.push(o.p.to_string());
                w.write_record(&row).map_err(io)?;
            } else {
                w.write_record([cells.join(" "), o.p.to_string()])
                    .map_err(io)?;
            }
        }
        w.flush()
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
    }
}

/// Every output occupation (ordered, not just sorted) reachable from some
/// term, with its probability. Terms of different photon number never
/// interfere.
pub fn output_distribution(input: &SuperpositionInput, total_cap: u32) -> Result<Distribution> {
    output_distribution_with(input, total_cap, &PermanentConfig::default())
}

pub fn output_distribution_with(
    input: &SuperpositionInput,
    total_cap: u32,
    cfg: &PermanentConfig,
) -> Result<Distribution> {
    input.validate()?;
    let totals = input.totals();
    if let Some(&big) = totals.last().filter(|&&t| t > total_cap) {
        return Err(Error::ResourceGuard {
            what: "superposition photon number",
            side: big as usize,
            limit: total_cap as usize,
            advice: "raise the photon cap",
        });
    }
    let outputs: Vec<Vec<u32>> = totals
        .iter()
        .flat_map(|&n| weak_compositions(n, input.order))
        .collect();
    let outputs = outputs
        .into_par_iter()
        .map(|m| {
            let p = superposed_amplitude(input, &m, cfg)?.norm_sqr();
            Ok(Outcome { m, p })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Distribution { outputs })
}

/// All length-`parts` vectors summing to `n`, lexicographic.
pub fn weak_compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
    fn go(left: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in 0..=left {
            prefix.push(v);
            go(left - v, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        go(n, parts, &mut Vec::new(), &mut out);
    }
    out
}

pub const CNL_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CnlReport {
    pub passed: bool,
    /// `P(m, .., m)` for `m = 0..=max_m`.
    pub diagonal: Vec<Outcome>,
    pub violations: Vec<Outcome>,
}

/// `P(m, .., m) < 1e-12` for every `m` up to `max_m`. Only the diagonal is
/// computed.
pub fn cnl_check(input: &SuperpositionInput, max_m: u32) -> Result<CnlReport> {
    cnl_check_with(input, max_m, &PermanentConfig::default())
}

pub fn cnl_check_with(
    input: &SuperpositionInput,
    max_m: u32,
    cfg: &PermanentConfig,
) -> Result<CnlReport> {
    input.validate()?;
    let diagonal = (0..=max_m)
        .into_par_iter()
        .map(|m| {
            let out = vec![m; input.order];
            let p = if m == 0 && input.totals()[0] > 0 {
                0.0
            } else {
                superposed_amplitude(input, &out, cfg)?.norm_sqr()
            };
            Ok(Outcome { m: out, p })
        })
        .collect::<Result<Vec<_>>>()?;
    let violations: Vec<Outcome> = diagonal
        .iter()
        .filter(|o| o.p >= CNL_THRESHOLD)
        .cloned()
        .collect();
    Ok(CnlReport {
        passed: violations.is_empty(),
        diagonal,
        violations,
    })
}

/// `sum_k c_k |N k, 1, .., 1, 2>` with equal weights for `k = 0..=k_max`.
pub fn cnl_state(order: usize, k_max: u32) -> Result<SuperpositionInput> {
    let inputs = crate::symmetry::cnl_family(order, k_max)?
        .into_iter()
        .map(|c| c.transition.input().to_vec())
        .collect();
    SuperpositionInput::uniform(order, inputs)
}

/// Sum of `P(m | n)` over all outputs of a single Fock input.
pub fn unitarity_sum(input: &[u32]) -> Result<f64> {
    let n: u32 = input.iter().sum();
    Ok(output_distribution(&SuperpositionInput::fock(input.to_vec())?, n)?.total())
}

/// Every input of `n` photons over `order` modes with its unitarity sum.
pub fn unitarity_sums(order: usize, n: u32) -> Result<Vec<(Vec<u32>, f64)>> {
    weak_compositions(n, order)
        .into_iter()
        .map(|v| unitarity_sum(&v).map(|s| (v, s)))
        .collect()
}
