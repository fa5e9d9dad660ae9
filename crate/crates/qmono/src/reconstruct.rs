//! Circuit reconstruction: rewrite a tree-like circuit so that every monomial
//! of the computed polynomial picks up a unique multilinear tag of fresh
//! z-variables.
//!
//! Three passes over the circuit `C`:
//!
//! 1. [`eliminate_plus_chains`]: no ADD gate may feed another ADD gate; nested
//!    sums are flattened in place, which never grows the circuit.
//! 2. [`duplicate_terminals`]: every terminal reference becomes its own
//!    occurrence node, so the underlying graph, terminals included, is a
//!    tree and every occurrence of a variable in the expansion corresponds to
//!    exactly one terminal.
//! 3. [`add_z_variables`]: each MUL gate's output, and each terminal feeding
//!    an ADD gate, is multiplied by a fresh z-variable.
//!
//! Tagging only the MUL gates is not enough: a sum of two terminal copies of
//! the same variable still contributes an even integer coefficient, which a
//! characteristic-2 field erases. The extra z's on terminal-to-ADD edges
//! split those copies into distinct, odd-coefficient products. In the result
//! `C'`, a degree-`j` monomial of the original expansion appears with a
//! multilinear z-tag of degree at most `2j - 1` (at most `j-1` MUL gates plus
//! `j` terminals on its subtree), every tag has scalar coefficient exactly 1,
//! and distinct subtrees get distinct tags.

use crate::circuit::{Circuit, CircuitBuilder, GateOp, NodeRef};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReconstructError {
    #[error("circuit is not tree-like; offending gates: {0:?}")]
    NotTreeLike(Vec<String>),
}

/// Where a z-variable came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZProvenance {
    /// Multiplies the output of this MUL gate.
    MulGate { gate: String },
    /// Multiplies this terminal occurrence on its edge into an ADD gate.
    TerminalToAdd { terminal: String, add_gate: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZVar {
    pub name: String,
    pub provenance: ZProvenance,
}

/// One original variable together with the occurrence terminals that
/// represent it after duplication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OccurrenceGroup {
    pub original: String,
    pub occurrences: Vec<String>,
}

/// Output of [`duplicate_terminals`]: the rewritten circuit plus the mapping
/// from original variables to their occurrence terminals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicatedCircuit {
    pub circuit: Circuit,
    pub x_occurrences: Vec<OccurrenceGroup>,
}

/// The fully reconstructed circuit `C'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructedCircuit {
    pub circuit: Circuit,
    /// Fresh z-variables in pre-order traversal order, with provenance.
    pub z_vars: Vec<ZVar>,
    pub x_occurrences: Vec<OccurrenceGroup>,
}

impl ReconstructedCircuit {
    /// Number of z-variables, bounded by #MUL gates + #terminal occurrences.
    pub fn z_count(&self) -> usize {
        self.z_vars.len()
    }

    /// Total number of terminal occurrences across all original variables.
    pub fn occurrence_count(&self) -> usize {
        self.x_occurrences.iter().map(|g| g.occurrences.len()).sum()
    }

    /// Provenance tables as a JSON document.
    pub fn provenance_json(&self) -> serde_json::Value {
        serde_json::json!({
            "z_vars": self.z_vars,
            "x_occurrences": self.x_occurrences,
        })
    }
}

/// Full pipeline: plus-chain elimination, terminal duplication, z-variables.
///
/// Not idempotent: the z-multipliers are ordinary MUL gates, so running the
/// pipeline on its own output tags them again. Reconstruct the original
/// circuit once and reuse the result.
pub fn reconstruct(c: &Circuit) -> Result<ReconstructedCircuit, ReconstructError> {
    let flattened = eliminate_plus_chains(c)?;
    let duplicated = duplicate_terminals(&flattened);
    Ok(add_z_variables(&duplicated))
}

/// Splices every ADD gate that feeds another ADD gate into its consumer.
/// Surviving gates keep their names and relative order; the computed
/// polynomial is unchanged and the circuit never grows.
pub fn eliminate_plus_chains(c: &Circuit) -> Result<Circuit, ReconstructError> {
    let report = c.check_tree_like();
    if !report.is_tree_like {
        return Err(ReconstructError::NotTreeLike(report.offending_gates));
    }

    let gates = c.gates();
    // unique consumer of each gate, if any (tree-likeness guarantees <= 1)
    let mut consumer: Vec<Option<usize>> = vec![None; gates.len()];
    for (gi, g) in gates.iter().enumerate() {
        for r in &g.inputs {
            if let NodeRef::Gate(j) = r {
                consumer[*j] = Some(gi);
            }
        }
    }
    // an ADD gate melts into its consumer when that consumer is an ADD gate;
    // the output gate always survives, whatever else reads it
    let output_gate = match c.output() {
        NodeRef::Gate(g) => Some(g),
        NodeRef::Var(_) => None,
    };
    let absorbed: Vec<bool> = gates
        .iter()
        .enumerate()
        .map(|(gi, g)| {
            g.op == GateOp::Add
                && Some(gi) != output_gate
                && consumer[gi].is_some_and(|p| gates[p].op == GateOp::Add)
        })
        .collect();

    // flattened input lists, children before parents by index order
    let mut flat: Vec<Vec<NodeRef>> = Vec::with_capacity(gates.len());
    for g in gates {
        let mut inputs = Vec::with_capacity(g.inputs.len());
        for r in &g.inputs {
            match r {
                NodeRef::Gate(j) if absorbed[*j] => inputs.extend_from_slice(&flat[*j]),
                other => inputs.push(*other),
            }
        }
        flat.push(inputs);
    }

    let mut new_index = vec![usize::MAX; gates.len()];
    let mut survivors = Vec::new();
    for (gi, _) in gates.iter().enumerate() {
        if !absorbed[gi] {
            new_index[gi] = survivors.len();
            survivors.push(gi);
        }
    }
    let remap = |r: NodeRef| -> NodeRef {
        match r {
            NodeRef::Gate(j) => NodeRef::Gate(new_index[j]),
            v => v,
        }
    };
    let new_gates = survivors
        .iter()
        .map(|&gi| crate::circuit::Gate {
            name: gates[gi].name.clone(),
            op: gates[gi].op,
            inputs: flat[gi].iter().map(|&r| remap(r)).collect(),
        })
        .collect();
    Ok(Circuit::new(
        c.variables().to_vec(),
        new_gates,
        remap(c.output()),
    ))
}

/// Gives every terminal reference its own occurrence node. Variables with a
/// single reference keep their name; a variable feeding `l > 1` inputs is
/// split into `l` fresh terminals labeled with the original.
pub fn duplicate_terminals(c: &Circuit) -> DuplicatedCircuit {
    let mut ref_count = vec![0usize; c.variables().len()];
    let mut count_ref = |r: NodeRef| {
        if let NodeRef::Var(v) = r {
            ref_count[v] += 1;
        }
    };
    for g in c.gates() {
        for r in &g.inputs {
            count_ref(*r);
        }
    }
    count_ref(c.output());

    let mut builder = CircuitBuilder::new();
    let mut groups: Vec<OccurrenceGroup> = c
        .variables()
        .iter()
        .map(|v| OccurrenceGroup {
            original: v.clone(),
            occurrences: Vec::new(),
        })
        .collect();

    let occurrence = |builder: &mut CircuitBuilder, groups: &mut Vec<OccurrenceGroup>, v: usize| {
        let original = &c.variables()[v];
        let name = if ref_count[v] <= 1 {
            builder.fresh_name(original)
        } else {
            let j = groups[v].occurrences.len() + 1;
            builder.fresh_name(&format!("{original}_{j}"))
        };
        groups[v].occurrences.push(name.clone());
        builder.add_var(&name)
    };

    let mut gate_refs: Vec<NodeRef> = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let inputs = g
            .inputs
            .iter()
            .map(|r| match r {
                NodeRef::Var(v) => occurrence(&mut builder, &mut groups, *v),
                NodeRef::Gate(j) => gate_refs[*j],
            })
            .collect();
        gate_refs.push(builder.add_gate(&g.name, g.op, inputs));
    }
    let output = match c.output() {
        NodeRef::Var(v) => occurrence(&mut builder, &mut groups, v),
        NodeRef::Gate(j) => gate_refs[j],
    };
    DuplicatedCircuit {
        circuit: builder.finish(output),
        x_occurrences: groups,
    }
}

/// Attaches a fresh z-multiplier to every MUL gate output and to every
/// terminal that feeds an ADD gate. z-variables are numbered in pre-order
/// (node before children, children in input order) from the output.
pub fn add_z_variables(dc: &DuplicatedCircuit) -> ReconstructedCircuit {
    let c = &dc.circuit;
    let mut builder = CircuitBuilder::new();
    for v in c.variables() {
        builder.add_var(v);
    }

    struct Walk<'a> {
        c: &'a Circuit,
        builder: CircuitBuilder,
        z_vars: Vec<ZVar>,
    }

    impl Walk<'_> {
        fn next_z(&mut self, provenance: ZProvenance) -> NodeRef {
            let name = self
                .builder
                .fresh_name(&format!("z{}", self.z_vars.len() + 1));
            let r = self.builder.add_var(&name);
            self.z_vars.push(ZVar { name, provenance });
            r
        }

        /// Pre-order: allocate this node's z (if due), then walk children,
        /// then emit the rebuilt gates. `parent_is_add` drives the
        /// terminal-to-ADD rule.
        fn walk(&mut self, r: NodeRef, parent_is_add: bool) -> NodeRef {
            match r {
                NodeRef::Var(v) => {
                    let name = &self.c.variables()[v];
                    let var_ref = self.builder.lookup(name).expect("occurrence var declared");
                    if parent_is_add {
                        let z = self.next_z(ZProvenance::TerminalToAdd {
                            terminal: name.clone(),
                            add_gate: String::new(), // patched by caller
                        });
                        let gate_name = self.builder.fresh_name(&format!("{name}_z"));
                        self.builder
                            .add_gate(&gate_name, GateOp::Mul, vec![var_ref, z])
                    } else {
                        var_ref
                    }
                }
                NodeRef::Gate(g) => {
                    let gate = &self.c.gates()[g];
                    match gate.op {
                        GateOp::Mul => {
                            let z = self.next_z(ZProvenance::MulGate {
                                gate: gate.name.clone(),
                            });
                            let inputs = gate
                                .inputs
                                .iter()
                                .map(|&i| self.walk(i, false))
                                .collect::<Vec<_>>();
                            let inner = self.builder.add_gate(&gate.name, GateOp::Mul, inputs);
                            let wrap = self.builder.fresh_name(&format!("{}_z", gate.name));
                            self.builder.add_gate(&wrap, GateOp::Mul, vec![inner, z])
                        }
                        GateOp::Add => {
                            let add_name = gate.name.clone();
                            let inputs = gate
                                .inputs
                                .iter()
                                .map(|&i| {
                                    let before = self.z_vars.len();
                                    let r = self.walk(i, true);
                                    // patch the add-gate name into terminal provenance
                                    if let NodeRef::Var(_) = i {
                                        if let ZProvenance::TerminalToAdd { add_gate, .. } =
                                            &mut self.z_vars[before].provenance
                                        {
                                            *add_gate = add_name.clone();
                                        }
                                    }
                                    r
                                })
                                .collect::<Vec<_>>();
                            self.builder.add_gate(&gate.name, GateOp::Add, inputs)
                        }
                    }
                }
            }
        }
    }

    let mut walk = Walk {
        c,
        builder,
        z_vars: Vec::new(),
    };
    let output = walk.walk(c.output(), false);

    ReconstructedCircuit {
        circuit: walk.builder.finish(output),
        z_vars: walk.z_vars,
        x_occurrences: dc.x_occurrences.clone(),
    }
}
