//! Monte Carlo checks of the probability bounds behind the loop budget.
//!
//! Run with: cargo run --release --example lemma_probabilities

use qmono::detect::{default_loop_budget, restarts_for_confidence, SUCCESS_FLOOR};
use qmono::transform::{
    exact_independence_probability, independence_lower_bound, independence_probability,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trials = 100_000u64;

    println!("probability that k uniform vectors of Z_2^k are independent:");
    println!("  {:>3} {:>12} {:>12}", "k", "estimate", "exact");
    for k in 1..=10u32 {
        let est = independence_probability(k, trials, &mut rng);
        let exact = exact_independence_probability(k);
        println!("  {k:>3} {est:>12.5} {exact:>12.5}");
        assert!(est > 0.28);
    }
    println!(
        "\nlimit of the product over 40 terms: {:.6} (> 0.28)",
        independence_lower_bound()
    );

    println!("\nper-run loop budget ceil((1/0.28)^k) and restarts for 1e-4 confidence:");
    println!(
        "  single-run success floor: {SUCCESS_FLOOR} (slightly under (1/8)(1 - 1/e) = {:.6})",
        (1.0 / 8.0) * (1.0 - (-1.0f64).exp())
    );
    for k in 1..=8u32 {
        println!("  k = {k}: budget {}", default_loop_budget(k));
    }
    println!(
        "  restarts for failure <= 1e-4: {}",
        restarts_for_confidence(1e-4).unwrap()
    );
}
