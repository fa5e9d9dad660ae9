//! Field selection and arithmetic in GF(2^d).
//!
//! Run with: cargo run --example field_arithmetic

use qmono::gf2d::{field_for_degree, FieldParams, GF2dElement};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    // the detector picks d so that 2^d >= 2(2k-1)
    println!("target degree k -> field GF(2^d):");
    for k in [1u32, 2, 3, 5, 8, 16] {
        let f = field_for_degree(k).unwrap();
        println!(
            "  k = {k:>2}: d = {}, |F| = {:>5}, modulus = {:#07b}...",
            f.degree(),
            f.order(),
            f.modulus() >> (f.degree().saturating_sub(6))
        );
    }

    // arithmetic in GF(2^3) modulo x^3 + x + 1
    let f = FieldParams::new(3).unwrap();
    let x = GF2dElement(0b010);
    let x2 = GF2dElement(0b100);
    println!("\nGF(2^3) mod x^3+x+1:");
    println!("  x + x^2     = {:#05b}", f.add(x, x2).0);
    println!(
        "  x * x^2     = {:#05b}  (x^3 reduces to x + 1)",
        f.mul(x, x2).0
    );
    println!("  x + x       = {:#05b}  (characteristic 2)", f.add(x, x).0);

    // every nonzero element permutes the field by multiplication
    let a = GF2dElement(0b101);
    let mut image: Vec<u16> = (0..8).map(|b| f.mul(a, GF2dElement(b)).0).collect();
    image.sort_unstable();
    println!("  {{a*b : b in F}} = {image:?} (a bijection)");

    // uniform sampling is seed-stable
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let samples: Vec<u16> = (0..8).map(|_| f.random_element(&mut rng).0).collect();
    println!("  seed-1 samples = {samples:?}");
}
