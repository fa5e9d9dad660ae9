//! The group algebra F[Z_2^k]: formal F-linear combinations of the `2^k`
//! bit-vectors of Z_2^k, where the group product of two vectors is bitwise
//! XOR.
//!
//! Coefficients live in GF(2^d) (see [`crate::gf2d`]), so the algebra has
//! characteristic 2 and the elements `v + v0` square to zero:
//! `(v + v0)^2 = v*v + 2*v + v0*v0 = 2*v0 + 2*v = 0`. A product of such
//! elements over a set of vectors vanishes exactly when the vectors are
//! linearly dependent over Z_2, and otherwise equals the sum of the span --
//! the two identities the detector's one-sided error rests on.
//!
//! Products come in two implementations: a naive `O(4^k)` double loop kept as
//! the reference, and a split-on-the-top-bit scheme with three half-size
//! recursive products (`O(3^k)`), the default. Since the top-bit generator
//! squares to the group identity, `(u0 + X u1)(v0 + X v1)` folds back into
//! `(u0 v0 + u1 v1) + X (u0 v1 + u1 v0)` with no carries.

use crate::gf2d::{FieldParams, GF2dElement};
use rand::Rng;

/// Coefficient vectors are dense (`2^k` entries); this cap keeps a single
/// element under a few MiB.
pub const MAX_GROUP_RANK: u32 = 20;

/// A vector in Z_2^k, identified by its bitmask. The all-zero vector is the
/// group identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupVector {
    k: u32,
    bits: u32,
}

impl GroupVector {
    pub fn new(k: u32, bits: u32) -> GroupVector {
        assert!(
            (1..=MAX_GROUP_RANK).contains(&k),
            "group rank {k} out of range"
        );
        assert!(
            bits < (1u32 << k),
            "vector bits {bits:#x} out of range for k={k}"
        );
        GroupVector { k, bits }
    }

    pub fn zero(k: u32) -> GroupVector {
        GroupVector::new(k, 0)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Group product: componentwise addition mod 2, i.e. XOR.
    pub fn mul(&self, other: &GroupVector) -> GroupVector {
        assert_eq!(self.k, other.k, "group rank mismatch");
        GroupVector::new(self.k, self.bits ^ other.bits)
    }
}

/// Uniform sample from Z_2^k minus the zero vector.
pub fn random_nonzero_vector<R: Rng + ?Sized>(k: u32, rng: &mut R) -> GroupVector {
    assert!(
        (1..=MAX_GROUP_RANK).contains(&k),
        "group rank {k} out of range"
    );
    let bits = rng.random_range(1..(1u64 << k)) as u32;
    GroupVector::new(k, bits)
}

/// An element of F[Z_2^k]: `2^k` field coefficients, entry `i` holding the
/// coefficient of the group vector with bits `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    params: FieldParams,
    k: u32,
    coeffs: Vec<GF2dElement>,
}

impl GroupAlgebraElement {
    fn with_coeffs(params: FieldParams, k: u32, coeffs: Vec<GF2dElement>) -> GroupAlgebraElement {
        assert!(
            (1..=MAX_GROUP_RANK).contains(&k),
            "group rank {k} out of range"
        );
        assert_eq!(coeffs.len(), 1usize << k);
        GroupAlgebraElement { params, k, coeffs }
    }

    /// Element with explicit coefficients; `coeffs[i]` belongs to the group
    /// vector with bits `i`, so the length must be `2^k`.
    pub fn from_coeffs(
        params: FieldParams,
        k: u32,
        coeffs: Vec<GF2dElement>,
    ) -> GroupAlgebraElement {
        Self::with_coeffs(params, k, coeffs)
    }

    /// The zero element: all coefficients zero.
    pub fn zero(params: FieldParams, k: u32) -> GroupAlgebraElement {
        Self::with_coeffs(params, k, vec![GF2dElement::ZERO; 1usize << k])
    }

    /// The identity element: coefficient one on the zero vector.
    pub fn identity(params: FieldParams, k: u32) -> GroupAlgebraElement {
        let mut e = Self::zero(params, k);
        e.coeffs[0] = GF2dElement::ONE;
        e
    }

    /// The element `v + v0` used to substitute for the shared y-variables.
    /// Rejects `v = v0`, for which the expression would collapse to
    /// `2 v0 = 0`.
    pub fn from_vector_plus_v0(params: FieldParams, v: GroupVector) -> GroupAlgebraElement {
        assert!(
            !v.is_zero(),
            "v + v0 is only defined for nonzero v; 2*v0 vanishes in characteristic 2"
        );
        let mut e = Self::zero(params, v.k());
        e.coeffs[0] = GF2dElement::ONE;
        e.coeffs[v.bits() as usize] = GF2dElement::ONE;
        e
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn coeffs(&self) -> &[GF2dElement] {
        &self.coeffs
    }

    pub fn coeff(&self, vector_bits: u32) -> GF2dElement {
        self.coeffs[vector_bits as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn check_compatible(&self, other: &GroupAlgebraElement) {
        assert_eq!(
            self.k, other.k,
            "group rank mismatch: {} vs {}",
            self.k, other.k
        );
        assert_eq!(self.params, other.params, "field mismatch");
    }

    /// Componentwise field addition.
    pub fn add(&self, other: &GroupAlgebraElement) -> GroupAlgebraElement {
        self.check_compatible(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| self.params.add(a, b))
            .collect();
        Self::with_coeffs(self.params, self.k, coeffs)
    }

    pub fn add_assign(&mut self, other: &GroupAlgebraElement) {
        self.check_compatible(other);
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = self.params.add(*a, b);
        }
    }

    /// Every coefficient multiplied by the scalar `c`.
    pub fn scale(&self, c: GF2dElement) -> GroupAlgebraElement {
        let coeffs = self.coeffs.iter().map(|&a| self.params.mul(c, a)).collect();
        Self::with_coeffs(self.params, self.k, coeffs)
    }

    /// XOR-convolution product, split-on-the-top-bit recursion. Default.
    pub fn mul(&self, other: &GroupAlgebraElement) -> GroupAlgebraElement {
        self.check_compatible(other);
        let n = self.coeffs.len();
        let mut out = vec![GF2dElement::ZERO; n];
        let mut scratch = vec![GF2dElement::ZERO; 3 * n];
        mul_rec(
            &self.params,
            &self.coeffs,
            &other.coeffs,
            &mut out,
            &mut scratch,
        );
        Self::with_coeffs(self.params, self.k, out)
    }

    /// XOR-convolution by the definition: `out[i^j] += a[i] * b[j]` over all
    /// index pairs. `O(4^k)`; kept as the reference the fast product is
    /// checked against.
    pub fn mul_naive(&self, other: &GroupAlgebraElement) -> GroupAlgebraElement {
        self.check_compatible(other);
        let n = self.coeffs.len();
        let mut out = vec![GF2dElement::ZERO; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let w = i ^ j;
                out[w] = self.params.add(out[w], self.params.mul(a, b));
            }
        }
        Self::with_coeffs(self.params, self.k, out)
    }
}

/// `out = a * b` for power-of-two length slices. `scratch` needs `3 * n`
/// entries. Splitting on the top bit X with X^2 = identity:
/// low = a0*b0 + a1*b1, high = (a0+a1)*(b0+b1) - low, and in characteristic 2
/// the subtraction is an addition.
fn mul_rec(
    f: &FieldParams,
    a: &[GF2dElement],
    b: &[GF2dElement],
    out: &mut [GF2dElement],
    scratch: &mut [GF2dElement],
) {
    let n = a.len();
    if n <= 4 {
        for o in out.iter_mut() {
            *o = GF2dElement::ZERO;
        }
        for (i, &ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                let w = i ^ j;
                out[w] = f.add(out[w], f.mul(ai, bj));
            }
        }
        return;
    }
    let h = n / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let (out_low, out_high) = out.split_at_mut(h);
    let (ta, rest) = scratch.split_at_mut(h);
    let (tb, rest) = rest.split_at_mut(h);
    let (p, rest) = rest.split_at_mut(h);

    for i in 0..h {
        ta[i] = f.add(a0[i], a1[i]);
        tb[i] = f.add(b0[i], b1[i]);
    }
    mul_rec(f, ta, tb, p, rest); // (a0+a1)(b0+b1)
    mul_rec(f, a0, b0, out_low, rest); // a0*b0
    mul_rec(f, a1, b1, out_high, rest); // a1*b1
    for i in 0..h {
        let low = f.add(out_low[i], out_high[i]);
        out_high[i] = f.add(p[i], low);
        out_low[i] = low;
    }
}
