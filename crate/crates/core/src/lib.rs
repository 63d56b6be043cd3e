//! Exact multiphoton interference at the symmetric SU(N) beam splitter.
//!
//! Amplitudes are permanents of matrices of `N`-th roots of unity, so they
//! live in `Q[w]/(w^N - 1)` and can be tested for zero exactly by reducing
//! modulo the `N`-th cyclotomic polynomial.

pub mod bs_core;
pub mod cyclo;
pub mod dist;
pub mod error;
pub mod kmatrix;
pub mod lambda;
pub mod permanent;
pub mod symmetry;

pub use bs_core::{afsr, build_sn, fsr, ExponentMatrix};
pub use cyclo::{cyclotomic_polynomial, CycloPoly, CyclotomicPolynomial};
pub use dist::{cnl_check, output_distribution, Distribution, SuperpositionInput};
pub use error::{Error, Result};
pub use kmatrix::{
    amplitude_by_ksum, enumerate_k, group_analysis, jkn_estimate, GroupReport, KMatrix,
};
pub use lambda::{build_lambda, build_lambda_prime, Transition};
pub use permanent::{
    amplitude_normalized, amplitude_unnormalized, permanent_naive, permanent_ryser,
    PermanentConfig,
};
pub use symmetry::{
    cnl_family, p_sym, p_tilde, procedure_lambda_triple, scan_gehom, verdict, Scan, ScanOptions,
    ScanRow, ScanSummary, Status, Verdict,
};
