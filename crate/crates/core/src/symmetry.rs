//! Occupation-only zero tests for transitions onto the coincident output
//! `|m>^{N}`, and the exhaustive scans used to check them.
//!
//! With `D = diag(1, w, .., w^{N-1})` acting on mode blocks,
//! `Perm(D Lambda D) = w^{p_sym} Perm(Lambda)`. For a coincident output the
//! same matrix can be brought back to `Lambda` by row phases and a block
//! rotation, which gives `Perm(D Lambda D) = (-1)^{(N-1)m} Perm(Lambda)`.
//! When the two phases differ the permanent must vanish.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::bs_core::ExponentMatrix;
use crate::cyclo::CycloPoly;
use crate::error::{Error, Result};
use crate::lambda::{block_modes, build_lambda, build_lambda_prime, Transition};
use crate::permanent::{permanent_ryser_with, PermanentConfig};

/// `Mod[sum_i i (n_i + m_i) - 2n, N]`, 1-based `i`.
pub fn p_sym(t: &Transition) -> usize {
    let weighted: u64 = t
        .input()
        .iter()
        .zip(t.output())
        .enumerate()
        .map(|(i, (&a, &b))| (i as u64 + 1) * (a as u64 + b as u64))
        .sum();
    let n = t.order() as u64;
    ((weighted % n + n - (2 * t.photons()) % n) % n) as usize
}

/// `Mod[sum_i i n_i, N]`, 1-based `i`. Only meaningful for coincident
/// outputs, where it decides the verdict on its own.
pub fn p_tilde(t: &Transition) -> Result<usize> {
    coincident_m(t)?;
    Ok(weighted_input(t.input()))
}

fn weighted_input(input: &[u32]) -> usize {
    let n = input.len() as u64;
    (input
        .iter()
        .enumerate()
        .map(|(i, &k)| (i as u64 + 1) * k as u64 % n)
        .sum::<u64>()
        % n) as usize
}

fn coincident_m(t: &Transition) -> Result<u32> {
    t.coincident_occupation()
        .ok_or_else(|| Error::NotCoincident(t.output().to_vec()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    ProvenZero,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::ProvenZero => "proven_zero",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub p_sym: usize,
    pub p_tilde: usize,
    /// Photons per output port.
    pub m: u32,
    /// `(-1)^{(N-1) m}`.
    pub sign: i8,
    pub status: Status,
}

/// Decides from occupations alone whether the coincident amplitude is
/// forced to vanish. `Inconclusive` makes no claim either way.
pub fn verdict(t: &Transition) -> Result<Verdict> {
    let m = coincident_m(t)?;
    let order = t.order();
    let ps = p_sym(t);
    let pt = weighted_input(t.input());
    let sign: i8 = if (order as u64 - 1) * m as u64 % 2 == 0 { 1 } else { -1 };
    // w^{p_sym} against the sign, as ring elements.
    let phases_differ = if sign == 1 {
        ps != 0
    } else {
        order % 2 == 1 || ps != order / 2
    };
    assert_eq!(
        phases_differ,
        pt != 0,
        "phase and reduced forms disagree for {t}"
    );
    Ok(Verdict {
        p_sym: ps,
        p_tilde: pt,
        m,
        sign,
        status: if phases_differ {
            Status::ProvenZero
        } else {
            Status::Inconclusive
        },
    })
}

/// `|m>^{N} -> |m>^{N}` is forced to zero exactly when `N` is even and `m`
/// odd.
pub fn diagonal_gehom_zero(order: usize, m: u32) -> bool {
    order % 2 == 0 && m % 2 == 1
}

/// `N = 2 N'` with `N'` odd, coincident output, and every input odd.
pub fn all_odd_zero_applies(t: &Transition) -> bool {
    let n = t.order();
    t.coincident_occupation().is_some()
        && n % 2 == 0
        && (n / 2) % 2 == 1
        && t.input().iter().all(|&k| k % 2 == 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Procedure {
    pub lambda: ExponentMatrix,
    pub lambda_prime: ExponentMatrix,
    pub lambda_double: ExponentMatrix,
    pub lambda_triple: ExponentMatrix,
    /// `lambda_triple == lambda` entrywise.
    pub matches: bool,
}

/// Output block `i` (1-based) of `Lambda'` times `w^{N+1-i}`, then rows
/// rotated down by `m`.
pub fn procedure_lambda_triple(t: &Transition) -> Result<Procedure> {
    let m = coincident_m(t)?;
    let order = t.order() as i64;
    let lambda = build_lambda(t)?;
    let lambda_prime = build_lambda_prime(t)?;
    let mut lambda_double = lambda_prime.clone();
    for (r, &mode) in block_modes(t.output()).iter().enumerate() {
        lambda_double.shift_row(r, order - mode as i64);
    }
    let mut lambda_triple = lambda_double.clone();
    lambda_triple.rotate_rows_down(m as usize);
    let matches = lambda_triple == lambda;
    Ok(Procedure {
        lambda,
        lambda_prime,
        lambda_double,
        lambda_triple,
        matches,
    })
}

/// Non-decreasing occupations of `n` photons over `order` modes, in
/// lexicographic order.
pub fn sorted_occupations(order: usize, n: u32) -> Vec<Vec<u32>> {
    fn go(slots: usize, left: u32, min: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            if left >= min {
                prefix.push(left);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        // The remaining slots each need at least `v`.
        let mut v = min;
        while v as u64 * slots as u64 <= left as u64 {
            prefix.push(v);
            go(slots - 1, left - v, v, prefix, out);
            prefix.pop();
            v += 1;
        }
    }
    let mut out = Vec::new();
    if order > 0 {
        go(order, n, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Representative of `p` using only `w^{N/2} = -1` for even `N` and
/// `w^N = 1` otherwise: the normal form of a symbolic engine that writes
/// `w` as a fractional power of `-1` but never applies the full cyclotomic
/// relation. Differences invisible to exact zero tests can survive here.
pub fn half_turn_form(p: &CycloPoly) -> CycloPoly {
    let order = p.order();
    if order % 2 == 1 {
        return p.clone();
    }
    let half = order / 2;
    let mut coeffs = p.coeffs().to_vec();
    for k in half..order {
        let c = std::mem::take(&mut coeffs[k]);
        coeffs[k - half] -= c;
    }
    CycloPoly::new(order, coeffs).expect("order is positive")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub input: Vec<u32>,
    pub amplitude_zero: bool,
    pub verdict: Verdict,
    /// `Perm(Lambda') - Perm(Lambda)` is non-zero in [`half_turn_form`].
    pub delta_perm_nonzero: bool,
    /// `Perm(Lambda') == w^{p_sym} Perm(Lambda)` exactly.
    pub scaling_identity: bool,
    /// `Perm(Lambda') == sign * Perm(Lambda)` as values.
    pub sign_identity: bool,
    pub lambda_triple_matches: bool,
    #[serde(skip)]
    pub permanent: CycloPoly,
}

impl ScanRow {
    pub fn compute(t: &Transition, cfg: &PermanentConfig) -> Result<Self> {
        let v = verdict(t)?;
        let perm = permanent_ryser_with(&build_lambda(t)?, cfg)?;
        let perm_prime = permanent_ryser_with(&build_lambda_prime(t)?, cfg)?;
        let delta = &perm_prime - &perm;
        let signed = if v.sign == 1 { perm.clone() } else { -&perm };
        Ok(Self {
            input: t.input().to_vec(),
            amplitude_zero: perm.is_zero(),
            verdict: v,
            delta_perm_nonzero: !half_turn_form(&delta).is_trivially_zero(),
            scaling_identity: perm_prime == perm.shift(v.p_sym as i64),
            sign_identity: perm_prime.value_eq(&signed)?,
            lambda_triple_matches: procedure_lambda_triple(t)?.matches,
            permanent: perm,
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct ScanOptions {
    pub permanent: PermanentConfig,
    /// Scan only the first `max_inputs` sorted inputs.
    pub max_inputs: Option<usize>,
    /// Inputs not started before the deadline are left out.
    pub time_budget: Option<Duration>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanSummary {
    #[serde(rename = "N")]
    pub order: usize,
    pub n: u32,
    pub m: u32,
    /// Number of sorted inputs, scanned or not.
    pub inputs: usize,
    pub scanned: usize,
    pub partial: bool,
    pub zero: usize,
    pub nonzero: usize,
    pub p_sym_zero: BTreeSet<usize>,
    pub p_sym_nonzero: BTreeSet<usize>,
    pub delta_perm_nonzero: usize,
    pub sign: i8,
    pub proven_zero: usize,
    /// Inputs proven zero whose amplitude is not zero. Must stay empty.
    pub unsound: Vec<Vec<u32>>,
    /// Zero amplitudes the verdict leaves open.
    pub inconclusive_zero: Vec<Vec<u32>>,
    /// Inputs where one of the permanent identities or the row procedure
    /// failed. Must stay empty.
    pub identity_failures: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scan {
    pub rows: Vec<ScanRow>,
    pub summary: ScanSummary,
}

impl Scan {
    pub fn zero_inputs(&self) -> Vec<Vec<u32>> {
        self.rows
            .iter()
            .filter(|r| r.amplitude_zero)
            .map(|r| r.input.clone())
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "input",
            "amplitude_zero",
            "p_sym",
            "p_tilde",
            "sign",
            "status",
            "delta_perm_nonzero",
        ])
        .map_err(io)?;
        for r in &self.rows {
            let input: Vec<String> = r.input.iter().map(ToString::to_string).collect();
            w.write_record([
                input.join(" "),
                r.amplitude_zero.to_string(),
                r.verdict.p_sym.to_string(),
                r.verdict.p_tilde.to_string(),
                r.verdict.sign.to_string(),
                r.verdict.status.as_str().to_string(),
                r.delta_perm_nonzero.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
    }
}

/// Every sorted input of `n` photons onto `|n/N>^{N}`, with exact
/// amplitudes, verdicts and identity checks. Rows come back in
/// lexicographic order whatever the thread schedule.
pub fn scan_gehom(order: usize, n: u32, opts: &ScanOptions) -> Result<Scan> {
    if order == 0 {
        return Err(Error::InvalidOrder(order));
    }
    if n == 0 || n as usize % order != 0 {
        return Err(Error::InvalidArgument(format!(
            "n = {n} must be a positive multiple of N = {order}"
        )));
    }
    if n as usize > opts.permanent.max_side {
        return Err(Error::ResourceGuard {
            what: "scan",
            side: n as usize,
            limit: opts.permanent.max_side,
            advice: "raise max_side in the configuration if the 2^n run time is acceptable",
        });
    }
    let m = n / order as u32;
    let all = sorted_occupations(order, n);
    let take = opts.max_inputs.unwrap_or(all.len()).min(all.len());
    let start = Instant::now();
    let rows: Vec<Option<ScanRow>> = all[..take]
        .par_iter()
        .map(|input| -> Result<Option<ScanRow>> {
            if opts.time_budget.is_some_and(|b| start.elapsed() > b) {
                return Ok(None);
            }
            let t = Transition::new(order, input.clone(), vec![m; order])?;
            ScanRow::compute(&t, &opts.permanent).map(Some)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<ScanRow> = rows.into_iter().flatten().collect();
    let summary = summarize(order, n, all.len(), &rows);
    Ok(Scan { rows, summary })
}

fn summarize(order: usize, n: u32, inputs: usize, rows: &[ScanRow]) -> ScanSummary {
    let m = n / order as u32;
    let mut s = ScanSummary {
        order,
        n,
        m,
        inputs,
        scanned: rows.len(),
        partial: rows.len() < inputs,
        zero: 0,
        nonzero: 0,
        p_sym_zero: BTreeSet::new(),
        p_sym_nonzero: BTreeSet::new(),
        delta_perm_nonzero: 0,
        sign: if (order as u64 - 1) * m as u64 % 2 == 0 { 1 } else { -1 },
        proven_zero: 0,
        unsound: Vec::new(),
        inconclusive_zero: Vec::new(),
        identity_failures: Vec::new(),
    };
    for r in rows {
        if r.amplitude_zero {
            s.zero += 1;
            s.p_sym_zero.insert(r.verdict.p_sym);
        } else {
            s.nonzero += 1;
            s.p_sym_nonzero.insert(r.verdict.p_sym);
        }
        s.delta_perm_nonzero += r.delta_perm_nonzero as usize;
        match (r.verdict.status, r.amplitude_zero) {
            (Status::ProvenZero, true) => s.proven_zero += 1,
            (Status::ProvenZero, false) => {
                s.proven_zero += 1;
                s.unsound.push(r.input.clone());
            }
            (Status::Inconclusive, true) => s.inconclusive_zero.push(r.input.clone()),
            (Status::Inconclusive, false) => {}
        }
        if !(r.scaling_identity && r.sign_identity && r.lambda_triple_matches) {
            s.identity_failures.push(r.input.clone());
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CnlMember {
    pub k: u32,
    pub transition: Transition,
    pub verdict: Verdict,
}

/// `|Nk, 1, .., 1, 2> -> |k+1>^{N}` for `k = 0..=k_max`. The reduced phase
/// is `Mod[(N+1)(N-2)/2, N]` for every `k`, which is never zero for `N > 2`.
pub fn cnl_family(order: usize, k_max: u32) -> Result<Vec<CnlMember>> {
    if order < 3 {
        return Err(Error::InvalidArgument(format!(
            "the family needs N >= 3, got {order}"
        )));
    }
    (0..=k_max)
        .map(|k| {
            let mut input = vec![1; order];
            input[0] = order as u32 * k;
            input[order - 1] = 2;
            let transition = Transition::coincident(order, input)?;
            let verdict = verdict(&transition)?;
            Ok(CnlMember {
                k,
                transition,
                verdict,
            })
        })
        .collect()
}

/// `Mod[(N+1)(N-2)/2, N]`.
pub fn cnl_phase(order: usize) -> usize {
    ((order + 1) * (order - 2) / 2) % order
}
