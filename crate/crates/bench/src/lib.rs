//! Shared inputs for the benches.

use ghom_core::Transition;

/// `input -> |n/N>^{N}`.
pub fn coincident(order: usize, input: &[u32]) -> Transition {
    Transition::coincident(order, input.to_vec()).expect("valid transition")
}

/// Mid-sized transitions where the K-matrix sum and Ryser both finish quickly.
pub fn ksum_cases() -> Vec<(&'static str, Transition)> {
    vec![
        ("N3_n9_036", coincident(3, &[0, 3, 6])),
        ("N4_n8_1223", coincident(4, &[1, 2, 2, 3])),
        ("N4_n12_0039", coincident(4, &[0, 0, 3, 9])),
        ("N5_n10_uniform", coincident(5, &[2, 2, 2, 2, 2])),
    ]
}
