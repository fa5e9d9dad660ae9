//! Parsing the circuit text format and querying the exact expansion oracle.
//!
//! Run with: cargo run --example parse_and_expand

use qmono::oracle::{expand, has_q_monomial, min_q_monomial_degree, q_monomial_witness};

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/fig3.circ");

fn main() {
    let text = std::fs::read_to_string(FIXTURE).unwrap();
    let circuit = qmono::parse(&text).unwrap();

    println!("parsed `{}`:", FIXTURE);
    println!("  variables: {:?}", circuit.variables());
    println!("  gates:     {}", circuit.size());
    let report = circuit.check_tree_like();
    println!("  tree-like: {}", report.is_tree_like);

    let p = expand(&circuit).unwrap();
    println!("\nsum-product expansion ({} terms):", p.term_count());
    print!("{p}");

    println!("\nq-monomial queries:");
    for (q, k) in [(5u32, 5u32), (3, 2), (2, 2)] {
        let yes = has_q_monomial(&p, q, k);
        let witness = q_monomial_witness(&p, q, k)
            .map(|m| m.to_string())
            .unwrap_or_else(|| "-".into());
        println!(
            "  q={q}, k={k}: {}  witness: {witness}",
            if yes { "yes" } else { "no " }
        );
    }
    for q in [2u32, 3, 5] {
        match min_q_monomial_degree(&p, q) {
            Some(d) => println!("  minimum {q}-monomial degree: {d}"),
            None => println!("  no {q}-monomials at all"),
        }
    }

    // the canonical serialization round-trips
    let reparsed = qmono::parse(&circuit.serialize()).unwrap();
    assert_eq!(reparsed, circuit);
    println!("\nserialize/parse round-trip: ok");
}
