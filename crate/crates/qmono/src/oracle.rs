//! Exact brute-force reference: sum-product expansion with arbitrary-precision
//! integer coefficients, q-monomial queries, and coefficient extraction.
//!
//! Everything here is deliberately exponential. The expansion is the ground
//! truth that the randomized detector and the reconstruction invariants are
//! checked against on small instances; a term cap turns oversized instances
//! into an error rather than a silent truncation. Multiplicities along
//! reconvergent terminals can exceed machine range, hence `BigInt`
//! coefficients.

use crate::circuit::{Circuit, EvalDomain, GateOp, NodeRef};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use thiserror::Error;

pub const DEFAULT_TERM_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExpandError {
    #[error("expansion exceeds the {cap}-term cap; instance too large for the oracle")]
    TermCapExceeded { cap: usize },
}

/// A monomial as a sorted map from variable name to positive exponent.
/// Zero exponents are never stored; the empty map is the constant monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    exponents: BTreeMap<String, u32>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn variable(name: &str) -> Monomial {
        let mut exponents = BTreeMap::new();
        exponents.insert(name.to_string(), 1);
        Monomial { exponents }
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, u32)>) -> Monomial {
        let mut exponents = BTreeMap::new();
        for (name, exp) in pairs {
            if exp > 0 {
                *exponents.entry(name.to_string()).or_insert(0) += exp;
            }
        }
        Monomial { exponents }
    }

    pub fn exponents(&self) -> &BTreeMap<String, u32> {
        &self.exponents
    }

    pub fn exponent_of(&self, var: &str) -> u32 {
        self.exponents.get(var).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.exponents.values().sum()
    }

    /// Every exponent in `1..=q-1`. A 2-monomial is a multilinear monomial.
    pub fn is_q_monomial(&self, q: u32) -> bool {
        assert!(q >= 2, "q must be at least 2");
        self.exponents.values().all(|&e| e < q)
    }

    pub fn is_multilinear(&self) -> bool {
        self.is_q_monomial(2)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exponents = self.exponents.clone();
        for (v, e) in &other.exponents {
            *exponents.entry(v.clone()).or_insert(0) += e;
        }
        Monomial { exponents }
    }

    /// Splits into (part over `vars`, part over the rest).
    pub fn split(&self, vars: &HashSet<String>) -> (Monomial, Monomial) {
        let mut inside = BTreeMap::new();
        let mut outside = BTreeMap::new();
        for (v, &e) in &self.exponents {
            if vars.contains(v) {
                inside.insert(v.clone(), e);
            } else {
                outside.insert(v.clone(), e);
            }
        }
        (
            Monomial { exponents: inside },
            Monomial { exponents: outside },
        )
    }

    /// Removes the given variables entirely.
    pub fn erase(&self, vars: &HashSet<String>) -> Monomial {
        Monomial {
            exponents: self
                .exponents
                .iter()
                .filter(|(v, _)| !vars.contains(*v))
                .map(|(v, &e)| (v.clone(), e))
                .collect(),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, e) in &self.exponents {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial in fully expanded form: monomials mapped to exact integer
/// coefficients. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpandedPolynomial {
    terms: BTreeMap<Monomial, BigInt>,
}

impl ExpandedPolynomial {
    pub fn zero() -> ExpandedPolynomial {
        ExpandedPolynomial::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> ExpandedPolynomial {
        let mut p = ExpandedPolynomial::zero();
        for (m, c) in terms {
            p.accumulate(m, c);
        }
        p
    }

    pub fn variable(name: &str) -> ExpandedPolynomial {
        ExpandedPolynomial::from_terms([(Monomial::variable(name), BigInt::one())])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn accumulate(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &ExpandedPolynomial) -> ExpandedPolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &ExpandedPolynomial) -> ExpandedPolynomial {
        self.mul_capped(other, usize::MAX)
            .expect("uncapped multiplication cannot fail")
    }

    fn add_capped(
        &self,
        other: &ExpandedPolynomial,
        cap: usize,
    ) -> Result<ExpandedPolynomial, ExpandError> {
        let out = self.add(other);
        if out.term_count() > cap {
            return Err(ExpandError::TermCapExceeded { cap });
        }
        Ok(out)
    }

    fn mul_capped(
        &self,
        other: &ExpandedPolynomial,
        cap: usize,
    ) -> Result<ExpandedPolynomial, ExpandError> {
        let mut out = ExpandedPolynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.accumulate(m1.mul(m2), c1 * c2);
                if out.term_count() > cap {
                    return Err(ExpandError::TermCapExceeded { cap });
                }
            }
        }
        Ok(out)
    }

    /// Exact coefficient of `m`, zero when absent.
    pub fn coefficient_of(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Erases the given variables from every term and re-collects. Terms that
    /// become equal are summed.
    pub fn erase_variables(&self, vars: &HashSet<String>) -> ExpandedPolynomial {
        let mut out = ExpandedPolynomial::zero();
        for (m, c) in &self.terms {
            out.accumulate(m.erase(vars), c.clone());
        }
        out
    }

    /// Evaluates the polynomial at an integer point. Missing variables are an
    /// error in circuit evaluation, so callers supply every variable here too.
    pub fn eval_at(&self, point: &HashMap<String, BigInt>) -> BigInt {
        let mut total = BigInt::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in m.exponents() {
                let x = point
                    .get(v)
                    .unwrap_or_else(|| panic!("point misses variable `{v}`"));
                term *= x.pow(e);
            }
            total += term;
        }
        total
    }
}

impl fmt::Display for ExpandedPolynomial {
    /// One term per line, `coef*var^exp*...`, in canonical monomial order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for (m, c) in &self.terms {
            if m.exponents().is_empty() {
                writeln!(f, "{c}")?;
            } else {
                writeln!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Value domain over expanded polynomials, for cross-checking [`expand`]
/// against generic circuit evaluation. Uncapped.
pub struct PolynomialDomain;

impl EvalDomain for PolynomialDomain {
    type Value = ExpandedPolynomial;
    fn add(&self, a: &ExpandedPolynomial, b: &ExpandedPolynomial) -> ExpandedPolynomial {
        a.add(b)
    }
    fn mul(&self, a: &ExpandedPolynomial, b: &ExpandedPolynomial) -> ExpandedPolynomial {
        a.mul(b)
    }
}

/// Exact sum-product expansion with the default term cap.
pub fn expand(c: &Circuit) -> Result<ExpandedPolynomial, ExpandError> {
    expand_with_cap(c, DEFAULT_TERM_CAP)
}

/// Exact sum-product expansion; fails if any intermediate polynomial exceeds
/// `cap` terms.
pub fn expand_with_cap(c: &Circuit, cap: usize) -> Result<ExpandedPolynomial, ExpandError> {
    let var_polys: Vec<ExpandedPolynomial> = c
        .variables()
        .iter()
        .map(|v| ExpandedPolynomial::variable(v))
        .collect();
    let mut gate_polys: Vec<ExpandedPolynomial> = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let value_of = |r: NodeRef| -> &ExpandedPolynomial {
            match r {
                NodeRef::Var(v) => &var_polys[v],
                NodeRef::Gate(ix) => &gate_polys[ix],
            }
        };
        let mut acc = value_of(g.inputs[0]).clone();
        for r in &g.inputs[1..] {
            acc = match g.op {
                GateOp::Add => acc.add_capped(value_of(*r), cap)?,
                GateOp::Mul => acc.mul_capped(value_of(*r), cap)?,
            };
        }
        gate_polys.push(acc);
    }
    Ok(match c.output() {
        NodeRef::Var(v) => var_polys[v].clone(),
        NodeRef::Gate(ix) => gate_polys[ix].clone(),
    })
}

/// Does the expansion contain a q-monomial of degree exactly `k`?
pub fn has_q_monomial(p: &ExpandedPolynomial, q: u32, k: u32) -> bool {
    p.terms()
        .any(|(m, _)| m.degree() == k && m.is_q_monomial(q))
}

/// A q-monomial term of degree exactly `k`, if any.
pub fn q_monomial_witness(p: &ExpandedPolynomial, q: u32, k: u32) -> Option<&Monomial> {
    p.terms()
        .map(|(m, _)| m)
        .find(|m| m.degree() == k && m.is_q_monomial(q))
}

/// Minimum degree over all q-monomial terms; `None` when there are none.
pub fn min_q_monomial_degree(p: &ExpandedPolynomial, q: u32) -> Option<u32> {
    p.terms()
        .filter(|(m, _)| m.is_q_monomial(q))
        .map(|(m, _)| m.degree())
        .min()
}

/// Searches an expansion over y- and z-variables for a term that survives in
/// characteristic 2: odd coefficient, y-part multilinear of degree exactly
/// `k`, z-part multilinear. Variables not in `y_vars` count as z-variables.
pub fn y_multilinear_witness<'p>(
    g: &'p ExpandedPolynomial,
    k: u32,
    y_vars: &HashSet<String>,
) -> Option<(&'p Monomial, &'p BigInt)> {
    let two = BigInt::from(2);
    g.terms().find(|(m, c)| {
        if (*c % &two).is_zero() {
            return false;
        }
        let (y_part, z_part) = m.split(y_vars);
        y_part.is_multilinear() && y_part.degree() == k && z_part.is_multilinear()
    })
}
