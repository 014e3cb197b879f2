//! Staircase approximations of the half graphon `1{x + y >= 1}`.
//!
//! Every staircase has matching ratio exactly 1/2, yet the optimal
//! matchings concentrate on ever thinner anti-diagonal strips with values
//! k/2: the values blow up and consecutive witnesses stay 1/2 apart in L1.
//! Ratios converge, witnesses do not — the matching polyton of a limit
//! graphon is not the limit of the matching polytons.

use polyton::matchings::{
    is_matching, matching_ratio, matching_size, staircase_graphon, staircase_matching,
};
use polyton::step::l1_distance;

fn main() {
    println!("k blocks | nu(W_k) | max matching value | L1 gap to previous witness");
    let mut previous = None;
    for k in [1usize, 2, 4, 8, 16] {
        let w = staircase_graphon(k);
        let m = staircase_matching(k);
        assert!(is_matching(&m, &w));
        assert_eq!(matching_size(&m), matching_ratio(&w).unwrap().nu);
        let peak = m.value(0, k - 1);
        let gap = previous
            .as_ref()
            .map(|p| l1_distance(p, &m).to_string())
            .unwrap_or_else(|| "-".into());
        println!("{k:8} | {:7} | {peak:18} | {gap}", matching_ratio(&w).unwrap().nu);
        previous = Some(m);
    }
    println!();
    println!("The ratio is constant while the witnesses diverge: no subsequence");
    println!("of optimal matchings converges, even though the graphons do.");
}
