//! Cover polytopes are only one-sidedly continuous under cut convergence.
//!
//! Sparse-ish random graphs `G(n, 1/log n)` converge to the zero graphon in
//! cut distance (for a nonnegative kernel the cut norm is its total
//! integral, i.e. the edge density, which tends to 0). The zero graphon has
//! no support constraints, so its cover polytope is the whole box — the
//! zero cover included. The samples, however, keep near-perfect matchings:
//! their cover ratios stay near 1/2, so no sequence of sample covers can
//! approach the zero cover. This demo prints that divergence; it is an
//! illustration, not an assertion.

use polyton::rat::{rat, Rat};
use polyton::sampling::{fractional_optimum, sample_wrandom};
use polyton::StepGraphon;

fn main() {
    println!("n vertices | p = 1/floor(log2 n) | sample density | tau_f(G)/n");
    for n in [32usize, 128, 512] {
        let log2 = (usize::BITS - n.leading_zeros() - 1) as i64;
        let p = rat(1, log2);
        let w = StepGraphon::constant(vec![Rat::one()], p.clone()).unwrap();
        let g = sample_wrandom(&w, n, 2024).unwrap();
        let edges: usize = (0..n)
            .map(|i| (i + 1..n).filter(|&j| g.adjacency[i][j] == 1).count())
            .sum();
        let density = Rat::int(2 * edges as i64) / Rat::int((n * n) as i64);
        let opt = fractional_optimum(&g.adjacency);
        let tau_ratio = &opt.nu / Rat::int(n as i64);
        println!(
            "{n:10} | {:19} | {:14} | {} ({})",
            p.to_string(),
            density.decimal_string(4),
            tau_ratio,
            tau_ratio.decimal_string(4),
        );
    }
    println!();
    println!("Edge density (the cut-norm distance to the zero graphon) falls while");
    println!("the cover ratio stays near 1/2: the sample covers cannot converge to");
    println!("the zero cover, which the limit graphon's polytope contains.");
}
