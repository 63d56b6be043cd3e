//! K matrices: non-negative integer tables with row sums `n_i` (inputs) and
//! column sums `m_j` (outputs). Summing `w^{sum ij k_ij} / prod k_ij!` over
//! them gives the transition amplitude up to a known factor, and grouping the
//! terms by coefficient exposes how the amplitude cancels.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use statrs::function::gamma::ln_gamma;

use crate::cyclo::{wrap, CycloPoly};
use crate::error::{Error, Result};
use crate::lambda::Transition;

pub const DEFAULT_MAX_VISITS: u64 = 10_000_000;
pub const DEFAULT_MAX_NODES: u64 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KMatrix {
    order: usize,
    entries: Vec<u32>,
}

impl KMatrix {
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::InvalidOrder(0));
        }
        let mut entries = Vec::with_capacity(order * order);
        for r in rows {
            if r.len() != order {
                return Err(Error::NotSquare {
                    rows: order,
                    cols: r.len(),
                });
            }
            entries.extend_from_slice(r);
        }
        Ok(Self { order, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.order + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.order).map(<[u32]>::to_vec).collect()
    }

    pub fn row_sums(&self) -> Vec<u32> {
        self.entries.chunks(self.order).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u32> {
        (0..self.order)
            .map(|j| (0..self.order).map(|i| self.get(i, j)).sum())
            .collect()
    }
}

/// `C(n + parts - 1, n)`: ways to write `n` as an ordered sum of `parts`
/// non-negative integers.
pub fn count_weak_compositions(n: u64, parts: usize) -> BigUint {
    if parts == 0 {
        return if n == 0 { BigUint::one() } else { BigUint::zero() };
    }
    binomial(n + parts as u64 - 1, n)
}

fn binomial(top: u64, k: u64) -> BigUint {
    let k = k.min(top - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(top - i) / BigUint::from(i + 1);
    }
    acc
}

/// `Mod[sum_{ij} i j k_ij, N]` with 1-based `i`, `j`.
pub fn k_exponent(k: &KMatrix) -> usize {
    let n = k.order;
    let mut e = 0usize;
    for i in 0..n {
        for j in 0..n {
            e = (e + (i + 1) * (j + 1) % n * k.get(i, j) as usize) % n;
        }
    }
    e
}

/// `prod_{ij} k_ij!`, the denominator of the K coefficient.
pub fn k_denominator(k: &KMatrix) -> BigUint {
    let mut acc = BigUint::one();
    for &e in &k.entries {
        for f in 2..=e {
            acc *= f;
        }
    }
    acc
}

/// `1 / prod_{ij} k_ij!`.
pub fn k_coefficient(k: &KMatrix) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(k_denominator(k)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumBudget {
    /// Valid K matrices the visitor may see.
    pub max_visits: u64,
    /// Partial assignments the search may expand.
    pub max_nodes: u64,
}

impl Default for EnumBudget {
    fn default() -> Self {
        Self {
            max_visits: DEFAULT_MAX_VISITS,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

pub fn enumerate_k(t: &Transition, visitor: impl FnMut(&KMatrix)) -> Result<u64> {
    enumerate_k_with(t, &EnumBudget::default(), visitor)
}

/// Calls `visitor` once per valid K matrix and returns how many there were.
///
/// Rows are filled one cell at a time. A cell never takes more than the
/// remaining column capacity, and never so little that the rest of its row
/// could not be placed; with equal totals every such prefix completes, so
/// the search has no dead ends.
pub fn enumerate_k_with(
    t: &Transition,
    budget: &EnumBudget,
    mut visitor: impl FnMut(&KMatrix),
) -> Result<u64> {
    let order = t.order();
    let mut search = Search {
        order,
        rows: t.input(),
        cap: t.output().to_vec(),
        k: KMatrix {
            order,
            entries: vec![0; order * order],
        },
        visits: 0,
        nodes: 0,
        budget: *budget,
    };
    search.cell(0, 0, t.input()[0], &mut visitor)?;
    Ok(search.visits)
}

struct Search<'a> {
    order: usize,
    rows: &'a [u32],
    cap: Vec<u32>,
    k: KMatrix,
    visits: u64,
    nodes: u64,
    budget: EnumBudget,
}

impl Search<'_> {
    fn cell(
        &mut self,
        i: usize,
        j: usize,
        left: u32,
        visitor: &mut impl FnMut(&KMatrix),
    ) -> Result<()> {
        let n = self.order;
        if i == n {
            self.visits += 1;
            if self.visits > self.budget.max_visits {
                return Err(Error::BudgetExceeded(format!(
                    "more than {} valid K matrices",
                    self.budget.max_visits
                )));
            }
            debug_assert_eq!(self.k.row_sums(), self.rows);
            visitor(&self.k);
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            return Err(Error::BudgetExceeded(format!(
                "more than {} search nodes",
                self.budget.max_nodes
            )));
        }
        if j == n - 1 {
            if left > self.cap[j] {
                return Ok(());
            }
            self.place(i, j, left);
            let next = self.rows.get(i + 1).copied().unwrap_or(0);
            let r = self.cell(i + 1, 0, next, visitor);
            self.place(i, j, 0);
            return r;
        }
        let rest: u32 = self.cap[j + 1..].iter().sum();
        let lo = left.saturating_sub(rest);
        let hi = left.min(self.cap[j]);
        for v in lo..=hi {
            self.place(i, j, v);
            self.cell(i, j + 1, left - v, visitor)?;
        }
        self.place(i, j, 0);
        Ok(())
    }

    fn place(&mut self, i: usize, j: usize, v: u32) {
        let slot = &mut self.k.entries[i * self.order + j];
        self.cap[j] = self.cap[j] + *slot - v;
        *slot = v;
    }
}

pub fn count_k(t: &Transition) -> Result<u64> {
    enumerate_k(t, |_| {})
}

/// `sum_K w^{k_exponent(K)} / prod k_ij!` over all valid K.
pub fn amplitude_by_ksum(t: &Transition) -> Result<CycloPoly> {
    Ok(group_analysis(t)?.total())
}

/// `(rho, p)` with `Perm(Lambda) = rho * w^p * amplitude_by_ksum`.
///
/// The multinomial expansion of each input contributes `n_i!`, projecting
/// onto the output contributes `m_j!`, and the ksum exponent uses 1-based
/// labels where the matrix uses 0-based ones.
pub fn ksum_to_permanent(t: &Transition) -> (BigRational, usize) {
    let mut rho = BigInt::one();
    for &k in t.input().iter().chain(t.output()) {
        for f in 2..=k {
            rho *= f;
        }
    }
    let weighted = |v: &[u32]| -> i64 {
        v.iter()
            .enumerate()
            .map(|(i, &k)| (i as i64 + 1) * k as i64)
            .sum()
    };
    let p = t.photons() as i64 - weighted(t.input()) - weighted(t.output());
    (BigRational::from_integer(rho), wrap(p, t.order()))
}

/// `Perm(Lambda)` computed from the K-matrix sum. Cheaper than Ryser when
/// the margins admit few tables, e.g. three modes and many photons.
pub fn permanent_by_ksum(t: &Transition) -> Result<CycloPoly> {
    permanent_by_ksum_with(t, &EnumBudget::default())
}

pub fn permanent_by_ksum_with(t: &Transition, budget: &EnumBudget) -> Result<CycloPoly> {
    let (rho, p) = ksum_to_permanent(t);
    Ok(group_analysis_with(t, budget)?
        .total()
        .scale(&rho)
        .shift(p as i64))
}

/// Upper bound on the number of K matrices: product of the per-row
/// composition counts.
pub fn k_count_bound(t: &Transition) -> BigUint {
    t.input()
        .iter()
        .map(|&r| count_weak_compositions(r as u64, t.order()))
        .product()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientGroup {
    pub coeff: BigRational,
    /// `counts[p]`: K matrices with this coefficient and exponent `p`.
    pub counts: Vec<u64>,
}

impl CoefficientGroup {
    pub fn size(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn sum(&self) -> CycloPoly {
        let order = self.counts.len();
        CycloPoly::from_integers(order, self.counts.iter().copied())
            .expect("order is positive")
            .scale(&self.coeff)
    }

    pub fn is_zero(&self) -> bool {
        self.sum().is_zero()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupReport {
    pub transition: Transition,
    pub valid_count: u64,
    /// Ordered by decreasing coefficient.
    pub groups: Vec<CoefficientGroup>,
}

impl GroupReport {
    pub fn total(&self) -> CycloPoly {
        let mut acc = CycloPoly::zero(self.transition.order()).expect("order is positive");
        for g in &self.groups {
            acc = &acc + &g.sum();
        }
        acc
    }

    pub fn group(&self, coeff: &BigRational) -> Option<&CoefficientGroup> {
        self.groups.iter().find(|g| &g.coeff == coeff)
    }

    /// `coefficient,p,count` rows, one per non-empty histogram bin.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record(["coefficient", "p", "count"]).map_err(io)?;
        for g in &self.groups {
            for (p, &c) in g.counts.iter().enumerate() {
                if c > 0 {
                    w.write_record([g.coeff.to_string(), p.to_string(), c.to_string()])
                        .map_err(io)?;
                }
            }
        }
        w.flush()
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        Ok(())
    }
}

impl Serialize for CoefficientGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CoefficientGroup", 4)?;
        st.serialize_field("coeff", &self.coeff.to_string())?;
        st.serialize_field("counts", &self.counts)?;
        st.serialize_field("sum", &self.sum())?;
        st.serialize_field("is_zero", &self.is_zero())?;
        st.end()
    }
}

impl Serialize for GroupReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GroupReport", 3)?;
        st.serialize_field("transition", &self.transition)?;
        st.serialize_field("valid_count", &self.valid_count)?;
        st.serialize_field("groups", &self.groups)?;
        st.end()
    }
}

pub fn group_analysis(t: &Transition) -> Result<GroupReport> {
    group_analysis_with(t, &EnumBudget::default())
}

pub fn group_analysis_with(t: &Transition, budget: &EnumBudget) -> Result<GroupReport> {
    let order = t.order();
    let mut by_denominator: BTreeMap<BigUint, Vec<u64>> = BTreeMap::new();
    let valid_count = enumerate_k_with(t, budget, |k| {
        by_denominator
            .entry(k_denominator(k))
            .or_insert_with(|| vec![0; order])[k_exponent(k)] += 1;
    })?;
    let groups = by_denominator
        .into_iter()
        .map(|(d, counts)| CoefficientGroup {
            coeff: BigRational::new(BigInt::one(), BigInt::from(d)),
            counts,
        })
        .collect();
    Ok(GroupReport {
        transition: t.clone(),
        valid_count,
        groups,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct JknEstimate {
    pub omega_nm: u64,
    pub omega_mn: u64,
    pub omega_sym: u64,
}

/// Gamma-function estimate of the number of K matrices, evaluated with the
/// input sums as rows and then as columns; `omega_sym` rounds the mean of
/// the two unrounded values.
pub fn jkn_estimate(t: &Transition) -> Result<JknEstimate> {
    let a = jkn_raw(t.input(), t.output())?;
    let b = jkn_raw(t.output(), t.input())?;
    Ok(JknEstimate {
        omega_nm: a.round() as u64,
        omega_mn: b.round() as u64,
        omega_sym: ((a + b) / 2.0).round() as u64,
    })
}

/// `C(n + N a - 1, n)^{-1} prod_i C(r_i + a - 1, r_i) prod_j C(c_j + N - 1, c_j)`
/// with `a = (n^2 - n + (n^2 - c^2)/N) / (c^2 - n)` and `c^2 = sum_j c_j^2`.
fn jkn_raw(rows: &[u32], cols: &[u32]) -> Result<f64> {
    let big_n = rows.len() as f64;
    let n: u64 = rows.iter().map(|&r| r as u64).sum();
    let c2: u64 = cols.iter().map(|&c| (c as u64).pow(2)).sum();
    if c2 == n {
        return Err(Error::DegenerateJkn(c2));
    }
    let nf = n as f64;
    let alpha = (nf * nf - nf + (nf * nf - c2 as f64) / big_n) / (c2 as f64 - nf);
    let mut sum = Neumaier::default();
    sum.add(-ln_binomial(nf + big_n * alpha - 1.0, nf));
    for &r in rows {
        sum.add(ln_binomial(r as f64 + alpha - 1.0, r as f64));
    }
    for &c in cols {
        sum.add(ln_binomial(c as f64 + big_n - 1.0, c as f64));
    }
    Ok(sum.value().exp())
}

fn ln_binomial(x: f64, k: f64) -> f64 {
    ln_gamma(x + 1.0) - ln_gamma(k + 1.0) - ln_gamma(x - k + 1.0)
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permanent::amplitude_unnormalized;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn t(order: usize, input: &[u32], output: &[u32]) -> Transition {
        Transition::new(order, input.to_vec(), output.to_vec()).unwrap()
    }

    fn ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
        if parts == 1 {
            return vec![vec![n]];
        }
        let mut out = Vec::new();
        for first in 0..=n {
            for mut rest in compositions(n - first, parts - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }

    /// Product of per-row compositions, filtered on column sums.
    fn brute_force(t: &Transition) -> HashSet<Vec<Vec<u32>>> {
        let n = t.order();
        let mut tables: Vec<Vec<Vec<u32>>> = vec![vec![]];
        for &r in t.input() {
            let rows = compositions(r, n);
            tables = tables
                .into_iter()
                .flat_map(|tb| {
                    rows.iter().map(move |row| {
                        let mut tb = tb.clone();
                        tb.push(row.clone());
                        tb
                    })
                })
                .collect();
        }
        tables
            .into_iter()
            .filter(|tb| (0..n).all(|j| tb.iter().map(|r| r[j]).sum::<u32>() == t.output()[j]))
            .collect()
    }

    #[test]
    fn weak_compositions() {
        assert_eq!(count_weak_compositions(3, 4), BigUint::from(20u32));
        assert_eq!(count_weak_compositions(10, 12), BigUint::from(352716u32));
        assert_eq!(count_weak_compositions(0, 5), BigUint::one());
    }

    #[test]
    fn three_valid_for_012() {
        let tr = t(3, &[0, 1, 2], &[1, 1, 1]);
        let mut seen = Vec::new();
        assert_eq!(enumerate_k(&tr, |k| seen.push(k.to_rows())).unwrap(), 3);
        seen.sort();
        assert_eq!(
            seen,
            vec![
                vec![vec![0, 0, 0], vec![0, 0, 1], vec![1, 1, 0]],
                vec![vec![0, 0, 0], vec![0, 1, 0], vec![1, 0, 1]],
                vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 1]],
            ]
        );
        let sum = amplitude_by_ksum(&tr).unwrap();
        assert_eq!(sum, CycloPoly::from_integers(3, [1, 1, 1]).unwrap());
        assert!(sum.is_zero());
    }

    #[test]
    fn exponent_and_coefficient() {
        let id = KMatrix::from_rows(&[
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
        ])
        .unwrap();
        assert_eq!(k_exponent(&id), 2);
        assert_eq!(k_coefficient(&id), BigRational::one());
        let anti = KMatrix::from_rows(&[
            vec![0, 0, 0, 1],
            vec![0, 0, 1, 0],
            vec![0, 1, 0, 0],
            vec![1, 0, 0, 0],
        ])
        .unwrap();
        assert_eq!(k_exponent(&anti), 0);
        let zero = KMatrix::from_rows(&[vec![0; 3], vec![0; 3], vec![0; 3]]).unwrap();
        assert_eq!(k_exponent(&zero), 0);
        let threes = KMatrix::from_rows(&[
            vec![3, 0, 0, 0],
            vec![0, 3, 0, 0],
            vec![0, 0, 3, 0],
            vec![0, 0, 0, 3],
        ])
        .unwrap();
        assert_eq!(k_coefficient(&threes), ratio(1, 1296));
        let mixed = KMatrix::from_rows(&[vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(k_coefficient(&mixed), ratio(1, 4));
    }

    #[test]
    fn ones_transition_groups() {
        let tr = t(4, &[1; 4], &[1; 4]);
        assert_eq!(count_k(&tr).unwrap(), 24);
        let report = group_analysis(&tr).unwrap();
        assert_eq!(report.groups.len(), 1);
        assert_eq!(report.groups[0].counts, vec![4, 8, 4, 8]);
        assert!(report.total().is_zero());
        assert!(amplitude_by_ksum(&t(2, &[1, 1], &[1, 1])).unwrap().is_zero());
    }

    #[test]
    fn permutation_counts() {
        for n in 1..=6usize {
            let f: u64 = (1..=n as u64).product();
            assert_eq!(count_k(&t(n, &vec![1; n], &vec![1; n])).unwrap(), f);
        }
    }

    #[test]
    fn fixed_counts() {
        assert_eq!(count_k(&t(4, &[3; 4], &[3; 4])).unwrap(), 2008);
        assert_eq!(count_k(&t(4, &[0, 0, 14, 14], &[7; 4])).unwrap(), 344);
    }

    #[test]
    fn group_1296_histogram() {
        let report = group_analysis(&t(4, &[3; 4], &[3; 4])).unwrap();
        assert_eq!(report.group(&ratio(1, 1296)).unwrap().counts, vec![4, 8, 4, 8]);
    }

    #[test]
    fn budget_is_enforced() {
        let tr = t(4, &[3; 4], &[3; 4]);
        let small = EnumBudget {
            max_visits: 100,
            ..EnumBudget::default()
        };
        assert!(matches!(
            enumerate_k_with(&tr, &small, |_| {}),
            Err(Error::BudgetExceeded(_))
        ));
        let tiny = EnumBudget {
            max_nodes: 10,
            ..EnumBudget::default()
        };
        assert!(matches!(
            enumerate_k_with(&tr, &tiny, |_| {}),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn report_json_and_csv() {
        let report = group_analysis(&t(3, &[0, 1, 2], &[1, 1, 1])).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["valid_count"], 3);
        assert_eq!(json["groups"][0]["coeff"], "1");
        assert_eq!(json["groups"][0]["counts"], serde_json::json!([1, 1, 1]));
        assert_eq!(json["groups"][0]["is_zero"], true);
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "coefficient,p,count\n1,0,1\n1,1,1\n1,2,1\n"
        );
    }

    #[test]
    fn jkn_values() {
        let e = jkn_estimate(&t(4, &[0, 0, 14, 14], &[7; 4])).unwrap();
        assert_eq!((e.omega_nm, e.omega_mn, e.omega_sym), (213, 345, 279));
        assert_eq!(jkn_estimate(&t(4, &[7; 4], &[7; 4])).unwrap().omega_sym, 376668);
        assert!(matches!(
            jkn_estimate(&t(2, &[1, 1], &[1, 1])),
            Err(Error::DegenerateJkn(2))
        ));
    }

    #[test]
    fn ksum_factor_on_small_cases() {
        let cases = [
            t(2, &[1, 1], &[2, 0]),
            t(2, &[2, 0], &[1, 1]),
            t(3, &[1, 1, 1], &[1, 1, 1]),
            t(3, &[2, 1, 0], &[0, 1, 2]),
            t(4, &[1, 1, 2, 0], &[0, 3, 0, 1]),
            t(4, &[4, 0, 0, 0], &[1, 1, 1, 1]),
        ];
        for tr in &cases {
            let (rho, p) = ksum_to_permanent(tr);
            let ksum = amplitude_by_ksum(tr).unwrap();
            assert_eq!(ksum.scale(&rho).shift(p as i64), amplitude_unnormalized(tr).unwrap());
            assert_eq!(permanent_by_ksum(tr).unwrap(), amplitude_unnormalized(tr).unwrap());
            assert!(k_count_bound(tr) >= BigUint::from(count_k(tr).unwrap()));
        }
    }

    fn transition_strategy(max_order: usize, max_photons: u32) -> impl Strategy<Value = Transition> {
        (1usize..=max_order)
            .prop_flat_map(move |n| {
                (
                    Just(n),
                    proptest::collection::vec(0u32..=max_photons, n),
                    proptest::collection::vec(0u32..=max_photons, n),
                )
            })
            .prop_filter_map("equal non-zero totals", move |(n, a, b)| {
                let (sa, sb): (u32, u32) = (a.iter().sum(), b.iter().sum());
                (sa == sb && sa >= 1 && sa <= max_photons).then(|| t(n, &a, &b))
            })
    }

    proptest! {
        #[test]
        fn backtracking_matches_brute_force(tr in transition_strategy(3, 5)) {
            let mut seen = HashSet::new();
            let count = enumerate_k(&tr, |k| {
                assert_eq!(k.col_sums(), tr.output());
                seen.insert(k.to_rows());
            }).unwrap();
            prop_assert_eq!(count as usize, seen.len());
            prop_assert_eq!(seen, brute_force(&tr));
        }

        #[test]
        fn report_totals(tr in transition_strategy(4, 6)) {
            let report = group_analysis(&tr).unwrap();
            let total: u64 = report.groups.iter().map(CoefficientGroup::size).sum();
            prop_assert_eq!(total, report.valid_count);
            prop_assert_eq!(report.valid_count, count_k(&tr).unwrap());
        }
    }
}
