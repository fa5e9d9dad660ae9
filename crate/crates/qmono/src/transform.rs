//! The randomized variable replacement that turns q-monomial testing into
//! multilinear monomial testing, plus the degree-padding preprocessing.
//!
//! Each terminal occurrence `j` of a variable `x_i` in the reconstructed
//! circuit is replaced by a random Z_2-linear sum of `q-1` y-variables that
//! are *shared* across the occurrences of `x_i`:
//!
//! ```text
//! r(x_i) = c_ij1 * y_i1 + c_ij2 * y_i2 + ... + c_ij(q-1) * y_i(q-1)
//! ```
//!
//! For a power `x^s` with `s <= q-1`, the coefficient of `y_1 y_2 ... y_s`
//! in the replaced product is the permanent of the s-by-s matrix of chosen
//! bits, which over a characteristic-2 field equals its determinant. Random
//! rows are nonsingular with probability at least `prod_{i>=1}(1 - 2^-i) ~
//! 0.288788 > 0.28`, so a degree-k q-monomial survives (as a y-multilinear
//! monomial) with probability at least `0.28^k`. When there is no q-monomial
//! at all, a power `x^d` with `d >= q` spreads over only `q-1` distinct
//! y-variables and by pigeonhole contributes nothing multilinear -- that is
//! the one-sided-error direction.
//!
//! All-zero rows are kept, not resampled: they waste the iteration, which
//! the probability bound already absorbs.

use crate::circuit::{Circuit, CircuitBuilder, GateOp, NodeRef};
use crate::reconstruct::ReconstructedCircuit;
use rand::Rng;
use serde::Serialize;
use std::collections::HashSet;
use thiserror::Error;

/// Cost guard for the permanent (Ryser runs in `2^dim * dim`).
pub const MAX_PERMANENT_DIM: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("q must be at least 2, got {0}")]
    QTooSmall(u32),
    #[error("padding requires 1 <= ell < k, got ell={ell}, k={k}")]
    BadPadding { ell: u32, k: u32 },
}

/// A shared replacement variable `y_(i,ell)` for the original variable `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct YVar {
    pub name: String,
    pub original: String,
    /// 1-based index within the variable's q-1 shared replacements.
    pub ell: u32,
}

/// Replacement rows for the occurrences of one original variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanGroup {
    pub original: String,
    /// `rows[j][ell]`: the bit for occurrence `j` and y-variable `ell+1`.
    pub rows: Vec<Vec<bool>>,
}

/// The random bits of one replacement round: one row of `q-1` bits per
/// terminal occurrence, plus the shared y-variable names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplacementPlan {
    q: u32,
    groups: Vec<PlanGroup>,
    y_vars: Vec<YVar>,
}

impl ReplacementPlan {
    /// Builds a plan from explicit rows, aligned with `rc.x_occurrences`.
    pub fn with_rows(
        rc: &ReconstructedCircuit,
        q: u32,
        rows: Vec<Vec<Vec<bool>>>,
    ) -> Result<ReplacementPlan, TransformError> {
        if q < 2 {
            return Err(TransformError::QTooSmall(q));
        }
        assert_eq!(
            rows.len(),
            rc.x_occurrences.len(),
            "one row group per original variable"
        );
        let mut taken: HashSet<String> = rc.circuit.variables().iter().cloned().collect();
        for g in rc.circuit.gates() {
            taken.insert(g.name.clone());
        }
        let mut y_vars = Vec::new();
        let mut groups = Vec::new();
        for (group, group_rows) in rc.x_occurrences.iter().zip(rows) {
            assert_eq!(
                group_rows.len(),
                group.occurrences.len(),
                "one row per occurrence of `{}`",
                group.original
            );
            for row in &group_rows {
                assert_eq!(row.len(), (q - 1) as usize, "row width is q-1");
            }
            for ell in 1..=q - 1 {
                let mut name = format!("y_{}_{}", group.original, ell);
                while taken.contains(&name) {
                    name.push('_');
                }
                taken.insert(name.clone());
                y_vars.push(YVar {
                    name,
                    original: group.original.clone(),
                    ell,
                });
            }
            groups.push(PlanGroup {
                original: group.original.clone(),
                rows: group_rows,
            });
        }
        Ok(ReplacementPlan { q, groups, y_vars })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn groups(&self) -> &[PlanGroup] {
        &self.groups
    }

    /// All `n * (q-1)` shared y-variables, grouped by original variable.
    pub fn y_vars(&self) -> &[YVar] {
        &self.y_vars
    }

    pub fn y_name_set(&self) -> HashSet<String> {
        self.y_vars.iter().map(|y| y.name.clone()).collect()
    }

    /// The square coefficient matrix of the variable's occurrences: row `j`
    /// holds the first `s` bits of occurrence `j`, where `s` is the number of
    /// occurrences. Defined only when `1 <= s <= q-1`.
    pub fn coefficient_matrix(&self, original: &str) -> Option<CoefficientMatrix> {
        let group = self.groups.iter().find(|g| g.original == original)?;
        let s = group.rows.len();
        if s == 0 || s > (self.q - 1) as usize {
            return None;
        }
        Some(CoefficientMatrix::new(
            group.rows.iter().map(|row| row[..s].to_vec()).collect(),
        ))
    }
}

/// Samples independent uniform bits for every (occurrence, ell) pair.
/// Deterministic under a fixed rng stream: rows are drawn in occurrence
/// order within `rc.x_occurrences` order, bits in ell order.
pub fn sample_plan<R: Rng + ?Sized>(
    rc: &ReconstructedCircuit,
    q: u32,
    rng: &mut R,
) -> Result<ReplacementPlan, TransformError> {
    if q < 2 {
        return Err(TransformError::QTooSmall(q));
    }
    let rows = rc
        .x_occurrences
        .iter()
        .map(|g| {
            g.occurrences
                .iter()
                .map(|_| (0..q - 1).map(|_| rng.random::<bool>()).collect())
                .collect()
        })
        .collect();
    ReplacementPlan::with_rows(rc, q, rows)
}

/// The circuit computing `G`, after y-replacement. `circuit` is `None` when
/// every path died on an all-zero row and `G` is identically zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformedCircuit {
    pub circuit: Option<Circuit>,
    pub y_vars: Vec<YVar>,
    pub z_vars: Vec<String>,
}

/// Rewrites each occurrence terminal of `rc` into the ADD of its selected
/// y-terminals. Occurrences with all-zero rows become structural zeros,
/// which are propagated upward (a zero MUL input kills the gate, zero ADD
/// inputs drop out) rather than represented as constants.
pub fn apply_plan(rc: &ReconstructedCircuit, plan: &ReplacementPlan) -> TransformedCircuit {
    assert_eq!(
        plan.groups.len(),
        rc.x_occurrences.len(),
        "plan/occurrence mismatch"
    );
    let c = &rc.circuit;
    let mut builder = CircuitBuilder::new();
    for y in &plan.y_vars {
        builder.add_var(&y.name);
    }
    let z_names: Vec<String> = rc.z_vars.iter().map(|z| z.name.clone()).collect();
    for z in &z_names {
        builder.add_var(z);
    }

    // replacement value per circuit variable: None = structural zero
    let mut var_value: Vec<Option<NodeRef>> = vec![None; c.variables().len()];
    for z in &z_names {
        let ix = c.var_index(z).expect("z-variable present in C'");
        var_value[ix] = Some(builder.lookup(z).unwrap());
    }
    let mut y_iter_base = 0usize;
    for (group, plan_group) in rc.x_occurrences.iter().zip(&plan.groups) {
        assert_eq!(
            group.original, plan_group.original,
            "plan/occurrence mismatch"
        );
        assert_eq!(
            group.occurrences.len(),
            plan_group.rows.len(),
            "plan/occurrence mismatch for `{}`",
            group.original
        );
        let group_y = &plan.y_vars[y_iter_base..y_iter_base + (plan.q - 1) as usize];
        y_iter_base += (plan.q - 1) as usize;
        for (occ, row) in group.occurrences.iter().zip(&plan_group.rows) {
            let selected: Vec<NodeRef> = row
                .iter()
                .enumerate()
                .filter(|(_, &bit)| bit)
                .map(|(ell, _)| builder.lookup(&group_y[ell].name).unwrap())
                .collect();
            let ix = c.var_index(occ).expect("occurrence variable present in C'");
            var_value[ix] = match selected.len() {
                0 => None,
                1 => Some(selected[0]),
                _ => {
                    let name = builder.fresh_name(&format!("{occ}_r"));
                    Some(builder.add_gate(&name, GateOp::Add, selected))
                }
            };
        }
    }

    let mut gate_value: Vec<Option<NodeRef>> = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let resolved: Vec<Option<NodeRef>> = g
            .inputs
            .iter()
            .map(|r| match r {
                NodeRef::Var(v) => var_value[*v],
                NodeRef::Gate(j) => gate_value[*j],
            })
            .collect();
        let value = match g.op {
            GateOp::Mul => {
                if resolved.iter().any(|r| r.is_none()) {
                    None
                } else {
                    let inputs = resolved.into_iter().map(Option::unwrap).collect();
                    let name = builder.fresh_name(&g.name);
                    Some(builder.add_gate(&name, GateOp::Mul, inputs))
                }
            }
            GateOp::Add => {
                let survivors: Vec<NodeRef> = resolved.into_iter().flatten().collect();
                match survivors.len() {
                    0 => None,
                    1 => Some(survivors[0]),
                    _ => {
                        let name = builder.fresh_name(&g.name);
                        Some(builder.add_gate(&name, GateOp::Add, survivors))
                    }
                }
            }
        };
        gate_value.push(value);
    }
    let output = match c.output() {
        NodeRef::Var(v) => var_value[v],
        NodeRef::Gate(j) => gate_value[j],
    };
    TransformedCircuit {
        circuit: output.map(|o| builder.finish(o)),
        y_vars: plan.y_vars.clone(),
        z_vars: z_names,
    }
}

/// Multiplies the circuit output by `k - ell` fresh pad variables, raising
/// the degree of every monomial by `k - ell`. `ell` is the known minimum
/// q-monomial degree; callers skip padding when `ell = k`.
pub fn pad_degree(c: &Circuit, k: u32, ell: u32) -> Result<Circuit, TransformError> {
    if ell == 0 || ell >= k {
        return Err(TransformError::BadPadding { ell, k });
    }
    let mut builder = CircuitBuilder::new();
    for v in c.variables() {
        builder.add_var(v);
    }
    let mut gate_refs = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let inputs = g
            .inputs
            .iter()
            .map(|r| match r {
                NodeRef::Var(v) => builder.lookup(&c.variables()[*v]).unwrap(),
                NodeRef::Gate(j) => gate_refs[*j],
            })
            .collect();
        gate_refs.push(builder.add_gate(&g.name, g.op, inputs));
    }
    let mut out = match c.output() {
        NodeRef::Var(v) => builder.lookup(&c.variables()[v]).unwrap(),
        NodeRef::Gate(j) => gate_refs[j],
    };
    for i in 1..=(k - ell) {
        let pad_name = builder.fresh_name(&format!("pad{i}"));
        let pad = builder.add_var(&pad_name);
        let gate_name = builder.fresh_name(&format!("padm{i}"));
        out = builder.add_gate(&gate_name, GateOp::Mul, vec![out, pad]);
    }
    Ok(builder.finish(out))
}

/// A square 0/1 matrix of replacement bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientMatrix {
    rows: Vec<Vec<bool>>,
}

impl CoefficientMatrix {
    pub fn new(rows: Vec<Vec<bool>>) -> CoefficientMatrix {
        let n = rows.len();
        assert!(n > 0, "empty matrix");
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        CoefficientMatrix { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }
}

/// Exact permanent by Ryser's inclusion-exclusion formula,
/// `perm(A) = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} a_ij`.
pub fn permanent(m: &CoefficientMatrix) -> i64 {
    let n = m.dim();
    assert!(
        n <= MAX_PERMANENT_DIM,
        "dimension {n} exceeds the permanent cost guard"
    );
    let mut total: i64 = 0;
    for mask in 1u32..(1 << n) {
        let mut prod: i64 = 1;
        for i in 0..n {
            let mut row_sum: i64 = 0;
            for j in 0..n {
                if (mask >> j) & 1 == 1 && m.entry(i, j) {
                    row_sum += 1;
                }
            }
            prod *= row_sum;
            if prod == 0 {
                break;
            }
        }
        if (mask.count_ones() as usize + n).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

/// Low bit of the permanent.
pub fn perm_mod2(m: &CoefficientMatrix) -> bool {
    permanent(m) & 1 == 1
}

/// Determinant over GF(2) by Gaussian elimination. Equals [`perm_mod2`] on
/// every 0/1 matrix, since signs vanish mod 2.
pub fn det_mod2(m: &CoefficientMatrix) -> bool {
    let n = m.dim();
    assert!(n <= 64, "determinant rows are stored as u64 bitmasks");
    let mut rows: Vec<u64> = m
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .fold(0u64, |acc, (j, &b)| acc | ((b as u64) << j))
        })
        .collect();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| (rows[r] >> col) & 1 == 1) {
            Some(p) => p,
            None => return false,
        };
        rows.swap(col, pivot);
        for r in 0..n {
            if r != col && (rows[r] >> col) & 1 == 1 {
                rows[r] ^= rows[col];
            }
        }
    }
    true
}

/// Rank over Z_2 of bitmask rows.
pub fn z2_rank(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &row in rows {
        let mut v = row;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Monte Carlo estimate of the probability that `k` uniform vectors of
/// `Z_2^k` are linearly independent.
pub fn independence_probability<R: Rng + ?Sized>(k: u32, trials: u64, rng: &mut R) -> f64 {
    assert!((1..=20).contains(&k), "k out of range");
    let mut hits = 0u64;
    for _ in 0..trials {
        let rows: Vec<u64> = (0..k).map(|_| rng.random_range(0..(1u64 << k))).collect();
        if z2_rank(&rows) == k as usize {
            hits += 1;
        }
    }
    hits as f64 / trials as f64
}

/// Exact value of that probability: `prod_{i=1..k} (1 - 2^-i)`.
pub fn exact_independence_probability(k: u32) -> f64 {
    (1..=k).map(|i| 1.0 - 0.5f64.powi(i as i32)).product()
}

/// The 40-term lower bound `prod_{i=1..40} (1 - 2^-i) = 0.288788...`, valid
/// for every k: each additional factor is closer to 1 than double-precision
/// resolution.
pub fn independence_lower_bound() -> f64 {
    exact_independence_probability(40)
}
