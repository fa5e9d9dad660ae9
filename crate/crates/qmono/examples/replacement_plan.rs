//! Random y-replacement plans, their coefficient matrices, and why the
//! surviving coefficient is a permanent.
//!
//! Run with: cargo run --example replacement_plan

use qmono::oracle::{expand, y_multilinear_witness};
use qmono::reconstruct::reconstruct;
use qmono::transform::{apply_plan, det_mod2, perm_mod2, permanent, sample_plan, ReplacementPlan};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    // x^3 is a 4-monomial of degree 3; its three occurrences each become a
    // random sum of the shared y_x_1, y_x_2, y_x_3
    let circuit = qmono::parse("var x\ngate m1 MUL x x\ngate m2 MUL m1 x\nout m2\n").unwrap();
    let rc = reconstruct(&circuit).unwrap();
    let q = 4;

    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let plan = sample_plan(&rc, q, &mut rng).unwrap();
    println!("sampled plan (q = {q}):");
    for group in plan.groups() {
        for (j, row) in group.rows.iter().enumerate() {
            let bits: String = row.iter().map(|&b| if b { '1' } else { '0' }).collect();
            println!("  occurrence {} of {}: bits {bits}", j + 1, group.original);
        }
    }

    let m = plan.coefficient_matrix("x").unwrap();
    println!(
        "\ncoefficient matrix: perm = {}, perm mod 2 = {}, det mod 2 = {}",
        permanent(&m),
        perm_mod2(&m) as u8,
        det_mod2(&m) as u8
    );

    let t = apply_plan(&rc, &plan);
    match &t.circuit {
        Some(g) => {
            let expansion = expand(g).unwrap();
            let witness = y_multilinear_witness(&expansion, 3, &plan.y_name_set());
            println!(
                "replaced circuit has {} expanded terms; y-multilinear witness: {}",
                expansion.term_count(),
                match witness {
                    Some((m, c)) => format!("{c} * {m}"),
                    None => "none".into(),
                }
            );
        }
        None => println!("replaced circuit is identically zero"),
    }

    // a nonsingular matrix forces survival, the all-ones matrix forces an
    // even coefficient that dies mod 2
    println!("\nhand-picked plans:");
    for (label, rows) in [
        (
            "identity (survives)",
            vec![
                vec![true, false, false],
                vec![false, true, false],
                vec![false, false, true],
            ],
        ),
        ("all-ones (coefficient 6, dies)", vec![vec![true; 3]; 3]),
    ] {
        let plan = ReplacementPlan::with_rows(&rc, q, vec![rows]).unwrap();
        let t = apply_plan(&rc, &plan);
        let g = expand(t.circuit.as_ref().unwrap()).unwrap();
        let witness = y_multilinear_witness(&g, 3, &plan.y_name_set());
        println!(
            "  {label:<32} witness: {}",
            if witness.is_some() { "yes" } else { "no" }
        );
    }
}
