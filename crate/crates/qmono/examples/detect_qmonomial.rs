//! The full pipeline: randomized detection checked against the exact oracle.
//!
//! Run with: cargo run --example detect_qmonomial

use qmono::detect::{decision_with_confidence, default_loop_budget, Decision, DetectConfig};
use qmono::oracle::{expand, q_monomial_witness};

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/fig3.circ");

fn main() {
    let text = std::fs::read_to_string(FIXTURE).unwrap();
    let circuit = qmono::parse(&text).unwrap();
    let expansion = expand(&circuit).unwrap();
    println!("F = {}", expansion.to_string().trim().replace('\n', " + "));

    for (q, k) in [(5u32, 5u32), (3, 2), (2, 2)] {
        let oracle_witness = q_monomial_witness(&expansion, q, k);
        let cfg = DetectConfig::new(q, k, 2024);
        let report = decision_with_confidence(&circuit, &cfg, 1e-4).unwrap();
        println!(
            "\nq={q}, k={k}  (loop budget {} per run)",
            default_loop_budget(k)
        );
        println!(
            "  oracle:   {}",
            match oracle_witness {
                Some(m) => format!("yes, witness {m}"),
                None => "no".into(),
            }
        );
        println!(
            "  detector: {}{}",
            match report.decision {
                Decision::Yes => "yes",
                Decision::No => "no",
            },
            match (report.restart_index, report.first_hit_iteration) {
                (Some(r), Some(i)) => format!(", first hit at restart {r}, iteration {i}"),
                _ => String::new(),
            }
        );
        println!(
            "  field GF(2^{}), {} iterations, {:.4}s",
            report.field_degree, report.iterations_executed, report.wall_time
        );
        assert_eq!(report.decision == Decision::Yes, oracle_witness.is_some());
    }

    println!("\ndetector and oracle agree on all three queries");
}
