//! Shared helpers for the integration suites: fixture loading and a seeded
//! generator of random tree-like circuits.

#![allow(dead_code)]

use qmono::circuit::{Circuit, CircuitBuilder, GateOp, NodeRef};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> Circuit {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    qmono::parse(&text).expect("fixture parses")
}

/// Random tree-like circuit over `n_vars` variables with at most `max_gates`
/// gates and no dead gates: every generated gate feeds exactly one consumer,
/// leftovers are folded into a final ADD.
pub fn random_tree_circuit(rng: &mut ChaCha8Rng, n_vars: usize, max_gates: usize) -> Circuit {
    assert!(n_vars >= 1);
    let mut b = CircuitBuilder::new();
    let vars: Vec<NodeRef> = (1..=n_vars).map(|i| b.add_var(&format!("x{i}"))).collect();

    let inner_gates = if max_gates == 0 {
        0
    } else {
        rng.random_range(0..max_gates)
    };
    let mut pool: Vec<NodeRef> = Vec::new();
    let mut gate_no = 0usize;
    for _ in 0..inner_gates {
        let op = if rng.random::<bool>() {
            GateOp::Add
        } else {
            GateOp::Mul
        };
        let fan_in = match op {
            GateOp::Mul => 2,
            GateOp::Add => rng.random_range(2..=3usize),
        };
        let mut inputs = Vec::with_capacity(fan_in);
        for _ in 0..fan_in {
            // half the picks consume a pending gate so trees get some depth
            if !pool.is_empty() && rng.random::<bool>() {
                let ix = rng.random_range(0..pool.len());
                inputs.push(pool.swap_remove(ix));
            } else {
                inputs.push(vars[rng.random_range(0..n_vars)]);
            }
        }
        gate_no += 1;
        pool.push(b.add_gate(&format!("g{gate_no}"), op, inputs));
    }

    let output = match pool.len() {
        0 => vars[rng.random_range(0..n_vars)],
        1 => pool[0],
        _ => {
            gate_no += 1;
            b.add_gate(&format!("g{gate_no}"), GateOp::Add, pool)
        }
    };
    let c = b.finish(output);
    debug_assert!(c.check_tree_like().is_tree_like);
    c
}

/// A different declaration order for the same circuit: a random topological
/// order of the gates with references remapped.
pub fn shuffle_gate_order(rng: &mut ChaCha8Rng, c: &Circuit) -> Circuit {
    let n = c.gates().len();
    // dependency counts: gate -> number of gate inputs not yet emitted
    let mut pending: Vec<usize> = c
        .gates()
        .iter()
        .map(|g| {
            g.inputs
                .iter()
                .filter(|r| matches!(r, NodeRef::Gate(_)))
                .count()
        })
        .collect();
    let mut consumers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (gi, g) in c.gates().iter().enumerate() {
        for r in &g.inputs {
            if let NodeRef::Gate(j) = r {
                consumers[*j].push(gi);
            }
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&g| pending[g] == 0).collect();
    let mut order = Vec::with_capacity(n);
    let mut new_index = vec![usize::MAX; n];
    while !ready.is_empty() {
        let pick = rng.random_range(0..ready.len());
        let g = ready.swap_remove(pick);
        new_index[g] = order.len();
        order.push(g);
        for &cons in &consumers[g] {
            pending[cons] -= 1;
            if pending[cons] == 0 {
                ready.push(cons);
            }
        }
    }
    assert_eq!(order.len(), n, "gate graph is acyclic");

    let remap = |r: NodeRef| match r {
        NodeRef::Gate(j) => NodeRef::Gate(new_index[j]),
        v => v,
    };
    let gates = order
        .iter()
        .map(|&gi| {
            let g = &c.gates()[gi];
            qmono::circuit::Gate {
                name: g.name.clone(),
                op: g.op,
                inputs: g.inputs.iter().map(|&r| remap(r)).collect(),
            }
        })
        .collect();
    Circuit::new(c.variables().to_vec(), gates, remap(c.output()))
}
