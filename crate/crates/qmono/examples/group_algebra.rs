//! The annihilation identities of F[Z_2^k] that give the detector its
//! one-sided error.
//!
//! Run with: cargo run --example group_algebra

use qmono::gf2d::field_for_degree;
use qmono::group_algebra::{GroupAlgebraElement, GroupVector};

fn show(label: &str, e: &GroupAlgebraElement) {
    let coeffs: Vec<u16> = e.coeffs().iter().map(|c| c.0).collect();
    println!(
        "  {label:<24} = {coeffs:?}{}",
        if e.is_zero() { "  (zero)" } else { "" }
    );
}

fn main() {
    let k = 3;
    let f = field_for_degree(k).unwrap();

    // (v + v0)^2 = v^2 + 2v + v0 = 2*v0 + 2*v = 0 in characteristic 2
    let v = GroupVector::new(k, 0b101);
    let w = GroupAlgebraElement::from_vector_plus_v0(f, v);
    println!("squaring kills every v + v0:");
    show("w = v + v0", &w);
    show("w * w", &w.mul(&w));

    // independent vectors: the product spreads over the whole span with
    // coefficient 1 everywhere
    println!("\nindependent vectors survive as their span:");
    let basis = [0b001u32, 0b010, 0b100];
    let mut prod = GroupAlgebraElement::identity(f, k);
    for &bits in &basis {
        prod = prod.mul(&GroupAlgebraElement::from_vector_plus_v0(
            f,
            GroupVector::new(k, bits),
        ));
    }
    show("(v1+v0)(v2+v0)(v3+v0)", &prod);

    // a dependent multiset annihilates: v3 = v1 XOR v2
    println!("\ndependent vectors annihilate:");
    let dependent = [0b011u32, 0b101, 0b110];
    let mut prod = GroupAlgebraElement::identity(f, k);
    for &bits in &dependent {
        prod = prod.mul(&GroupAlgebraElement::from_vector_plus_v0(
            f,
            GroupVector::new(k, bits),
        ));
    }
    show("product over {3,5,6}", &prod);

    // the two product implementations agree; the split recursion is the
    // one the detector uses
    let u = GroupAlgebraElement::from_vector_plus_v0(f, GroupVector::new(k, 0b110));
    let t = GroupAlgebraElement::from_vector_plus_v0(f, GroupVector::new(k, 0b011));
    assert_eq!(u.mul(&t), u.mul_naive(&t));
    println!("\nsplit product == naive convolution: checked");
}
