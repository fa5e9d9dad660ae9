//! Arithmetic in the binary field GF(2^d).
//!
//! The detector works over a field of characteristic 2 whose size depends on
//! the target degree `k`: it needs `|F| = 2^d >= 2(2k-1)` so that a nonzero
//! polynomial of degree `2k-1` vanishes at a random point with probability at
//! most 1/2. Elements are bitmasks of polynomial coefficients over GF(2),
//! reduced modulo a fixed irreducible polynomial per degree; products use
//! shift-and-XOR reduction, so no log/antilog tables are needed and `d` can
//! vary freely from run to run.

use rand::Rng;
use thiserror::Error;

/// One irreducible polynomial of each degree 1..=16 over GF(2), lowest
/// weight then lowest value. Index 0 holds degree 1.
const MODULUS_TABLE: [u32; 16] = [
    0x00002, // x
    0x00007, // x^2 + x + 1
    0x0000B, // x^3 + x + 1
    0x00013, // x^4 + x + 1
    0x00025, // x^5 + x^2 + 1
    0x00043, // x^6 + x + 1
    0x00083, // x^7 + x + 1
    0x0011B, // x^8 + x^4 + x^3 + x + 1
    0x00203, // x^9 + x + 1
    0x00409, // x^10 + x^3 + 1
    0x00805, // x^11 + x^2 + 1
    0x01009, // x^12 + x^3 + 1
    0x0201B, // x^13 + x^4 + x^3 + x + 1
    0x04021, // x^14 + x^5 + 1
    0x08003, // x^15 + x + 1
    0x1002B, // x^16 + x^5 + x^3 + x + 1
];

pub const MAX_FIELD_DEGREE: u32 = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("target degree k must be at least 1")]
    ZeroDegree,
    #[error("field degree {0} exceeds the supported maximum {MAX_FIELD_DEGREE}")]
    DegreeTooLarge(u32),
}

/// A concrete field GF(2^d): the extension degree together with the
/// irreducible modulus that defines reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldParams {
    d: u32,
    modulus: u32,
}

/// An element of GF(2^d), stored as the bitmask of its polynomial
/// coefficients. Always `< 2^d` for the ambient [`FieldParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct GF2dElement(pub u16);

impl GF2dElement {
    pub const ZERO: GF2dElement = GF2dElement(0);
    pub const ONE: GF2dElement = GF2dElement(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Picks the field for a degree-`k` run: `d = ceil(log2(2k-1)) + 1`, which
/// guarantees `2^d >= 2(2k-1)`.
pub fn field_for_degree(k: u32) -> Result<FieldParams, FieldError> {
    if k == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let target = 2 * k - 1;
    // ceil(log2(target)) for target >= 1
    let ceil_log2 = if target == 1 {
        0
    } else {
        32 - (target - 1).leading_zeros()
    };
    FieldParams::new(ceil_log2 + 1)
}

impl FieldParams {
    /// Field of the given extension degree, with the built-in modulus.
    pub fn new(d: u32) -> Result<FieldParams, FieldError> {
        if d == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if d > MAX_FIELD_DEGREE {
            return Err(FieldError::DegreeTooLarge(d));
        }
        let modulus = MODULUS_TABLE[(d - 1) as usize];
        debug_assert!(is_irreducible(modulus), "modulus table entry is reducible");
        Ok(FieldParams { d, modulus })
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Number of elements, `2^d`.
    pub fn order(&self) -> u32 {
        1 << self.d
    }

    /// Checked constructor for elements of this field.
    pub fn element(&self, bits: u16) -> GF2dElement {
        assert!(
            (bits as u32) < self.order(),
            "bits {:#x} out of range for GF(2^{})",
            bits,
            self.d
        );
        GF2dElement(bits)
    }

    /// Field addition: XOR of coefficient masks. `add(a, a)` is zero.
    pub fn add(&self, a: GF2dElement, b: GF2dElement) -> GF2dElement {
        GF2dElement(a.0 ^ b.0)
    }

    /// Field multiplication: carryless product reduced modulo the modulus.
    pub fn mul(&self, a: GF2dElement, b: GF2dElement) -> GF2dElement {
        let mut a = a.0 as u32;
        let b = b.0 as u32;
        let mut acc = 0u32;
        for i in 0..self.d {
            if (b >> i) & 1 == 1 {
                acc ^= a;
            }
            a <<= 1;
            if (a >> self.d) & 1 == 1 {
                a ^= self.modulus;
            }
        }
        GF2dElement(acc as u16)
    }

    /// Uniform sample over all `2^d` elements.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GF2dElement {
        GF2dElement(rng.random_range(0..self.order()) as u16)
    }
}

/// Trial-division irreducibility test over GF(2); adequate for degrees <= 16.
fn is_irreducible(m: u32) -> bool {
    let d = 31 - m.leading_zeros();
    if d == 0 {
        return false;
    }
    for f in 2u32..(1 << (d / 2 + 1)) {
        let df = 31 - f.leading_zeros();
        if df >= 1 && df <= d / 2 && poly_rem(m, f) == 0 {
            return false;
        }
    }
    true
}

fn poly_rem(mut a: u32, m: u32) -> u32 {
    let dm = 31 - m.leading_zeros();
    while a != 0 {
        let da = 31 - a.leading_zeros();
        if da < dm {
            break;
        }
        a ^= m << (da - dm);
    }
    a
}
