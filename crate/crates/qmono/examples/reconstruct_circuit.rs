//! The three-step reconstruction that tags every monomial with a unique
//! multilinear product of z-variables.
//!
//! Run with: cargo run --example reconstruct_circuit

use qmono::oracle::expand;
use qmono::reconstruct::{
    add_z_variables, duplicate_terminals, eliminate_plus_chains, ZProvenance,
};
use std::collections::HashSet;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/fig3.circ");

fn main() {
    let text = std::fs::read_to_string(FIXTURE).unwrap();
    let circuit = qmono::parse(&text).unwrap();
    println!(
        "F = {}",
        expand(&circuit)
            .unwrap()
            .to_string()
            .trim()
            .replace('\n', " + ")
    );

    // step 1: no ADD gate feeds another ADD gate
    let flat = eliminate_plus_chains(&circuit).unwrap();
    println!(
        "\nafter plus-chain elimination: {} gates (was {})",
        flat.size(),
        circuit.size()
    );

    // step 2: every terminal reference becomes its own occurrence node
    let dup = duplicate_terminals(&flat);
    for group in &dup.x_occurrences {
        println!(
            "  {} occurs {} times: {:?}",
            group.original,
            group.occurrences.len(),
            group.occurrences
        );
    }

    // step 3: one fresh z per MUL gate and per terminal-to-ADD edge
    let rc = add_z_variables(&dup);
    println!("\nz-variables ({} total):", rc.z_count());
    for z in &rc.z_vars {
        match &z.provenance {
            ZProvenance::MulGate { gate } => {
                println!("  {:<4} multiplies the output of MUL gate `{gate}`", z.name)
            }
            ZProvenance::TerminalToAdd { terminal, add_gate } => println!(
                "  {:<4} tags terminal `{terminal}` on its edge into ADD gate `{add_gate}`",
                z.name
            ),
        }
    }

    println!("\nreconstructed circuit:\n{}", rc.circuit.serialize());

    let zs: HashSet<String> = rc.z_vars.iter().map(|z| z.name.clone()).collect();
    println!("F' expands into tagged copies, every scalar coefficient 1:");
    for (m, coef) in expand(&rc.circuit).unwrap().terms() {
        let (z_part, x_part) = m.split(&zs);
        println!("  {coef} * [{x_part}] tagged {z_part}");
    }
}
