//! Arithmetic-circuit data model and its text format.
//!
//! A circuit is a DAG of `ADD` gates (fan-in >= 2, unbounded) and `MUL` gates
//! (fan-in exactly 2) over named terminal variables, with a single designated
//! output. There are no constant leaves: integer coefficients in the computed
//! polynomial arise only from gate multiplicity. Gates may only reference
//! previously declared names, so a parsed circuit is acyclic by construction.
//!
//! The line-oriented text format (`.circ` files, `#` starts a comment):
//!
//! ```text
//! var x1 x2
//! gate m1 MUL x1 x1
//! gate s1 ADD m1 x2
//! out s1
//! ```
//!
//! Evaluation is bottom-up over a pluggable value domain, each gate computed
//! exactly once; terminals may feed any number of gates, so memoization
//! matters even for tree-like circuits.

use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateOp {
    Add,
    Mul,
}

impl GateOp {
    fn keyword(self) -> &'static str {
        match self {
            GateOp::Add => "ADD",
            GateOp::Mul => "MUL",
        }
    }
}

/// Reference to a terminal variable or an earlier gate, by table index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeRef {
    Var(usize),
    Gate(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub name: String,
    pub op: GateOp,
    pub inputs: Vec<NodeRef>,
}

#[derive(Debug, Clone)]
pub struct Circuit {
    name: Option<String>,
    variables: Vec<String>,
    gates: Vec<Gate>,
    output: NodeRef,
}

/// Structural equality: the optional name label is not part of a circuit's
/// identity.
impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables
            && self.gates == other.gates
            && self.output == other.output
    }
}
impl Eq for Circuit {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeReport {
    pub is_tree_like: bool,
    /// Names of gates with fan-out greater than one.
    pub offending_gates: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("line {line}, column {col}: reference to undeclared name `{name}`")]
    Undeclared {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("line {line}, column {col}: name `{name}` is already declared")]
    Duplicate {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("line {line}, column {col}: MUL gate `{name}` takes exactly 2 inputs, found {found}")]
    MulFanIn {
        line: usize,
        col: usize,
        name: String,
        found: usize,
    },
    #[error("line {line}, column {col}: ADD gate `{name}` takes at least 2 inputs, found {found}")]
    AddFanIn {
        line: usize,
        col: usize,
        name: String,
        found: usize,
    },
    #[error("line {line}: circuit already has an output")]
    MultipleOutputs { line: usize },
    #[error("missing `out` line")]
    MissingOutput,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),
}

pub fn is_valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the text format. References must name earlier declarations, MUL
/// gates take exactly two inputs, ADD gates at least two, and exactly one
/// `out` line is required.
pub fn parse(text: &str) -> Result<Circuit, ParseError> {
    let mut variables: Vec<String> = Vec::new();
    let mut gates: Vec<Gate> = Vec::new();
    let mut names: HashMap<String, NodeRef> = HashMap::new();
    let mut output: Option<NodeRef> = None;

    for (line_ix, raw) in text.lines().enumerate() {
        let line_no = line_ix + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        // token positions for error columns
        let tokens: Vec<(usize, &str)> = split_tokens(line);
        if tokens.is_empty() {
            continue;
        }
        let col_of = |ix: usize| {
            tokens
                .get(ix)
                .map(|&(c, _)| c + 1)
                .unwrap_or(line.len() + 1)
        };
        let (_, keyword) = tokens[0];
        match keyword {
            "var" => {
                if tokens.len() < 2 {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        col: col_of(1),
                        msg: "`var` needs at least one name".into(),
                    });
                }
                for (tix, &(col, name)) in tokens.iter().enumerate().skip(1) {
                    check_name(name, line_no, col + 1)?;
                    if names.contains_key(name) {
                        return Err(ParseError::Duplicate {
                            line: line_no,
                            col: col_of(tix),
                            name: name.into(),
                        });
                    }
                    names.insert(name.into(), NodeRef::Var(variables.len()));
                    variables.push(name.into());
                }
            }
            "gate" => {
                if tokens.len() < 3 {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        col: col_of(tokens.len()),
                        msg: "`gate` needs a name, an operation and inputs".into(),
                    });
                }
                let (name_col, name) = tokens[1];
                check_name(name, line_no, name_col + 1)?;
                if names.contains_key(name) {
                    return Err(ParseError::Duplicate {
                        line: line_no,
                        col: name_col + 1,
                        name: name.into(),
                    });
                }
                let (op_col, op_tok) = tokens[2];
                let op = match op_tok {
                    "ADD" => GateOp::Add,
                    "MUL" => GateOp::Mul,
                    other => {
                        return Err(ParseError::Syntax {
                            line: line_no,
                            col: op_col + 1,
                            msg: format!("unknown gate operation `{other}` (expected ADD or MUL)"),
                        })
                    }
                };
                let mut inputs = Vec::with_capacity(tokens.len() - 3);
                for &(col, ref_name) in &tokens[3..] {
                    match names.get(ref_name) {
                        Some(&r) => inputs.push(r),
                        None => {
                            return Err(ParseError::Undeclared {
                                line: line_no,
                                col: col + 1,
                                name: ref_name.into(),
                            })
                        }
                    }
                }
                match op {
                    GateOp::Mul if inputs.len() != 2 => {
                        return Err(ParseError::MulFanIn {
                            line: line_no,
                            col: col_of(3),
                            name: name.into(),
                            found: inputs.len(),
                        })
                    }
                    GateOp::Add if inputs.len() < 2 => {
                        return Err(ParseError::AddFanIn {
                            line: line_no,
                            col: col_of(3),
                            name: name.into(),
                            found: inputs.len(),
                        })
                    }
                    _ => {}
                }
                names.insert(name.into(), NodeRef::Gate(gates.len()));
                gates.push(Gate {
                    name: name.into(),
                    op,
                    inputs,
                });
            }
            "out" => {
                if output.is_some() {
                    return Err(ParseError::MultipleOutputs { line: line_no });
                }
                if tokens.len() != 2 {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        col: col_of(1),
                        msg: "`out` takes exactly one reference".into(),
                    });
                }
                let (col, ref_name) = tokens[1];
                match names.get(ref_name) {
                    Some(&r) => output = Some(r),
                    None => {
                        return Err(ParseError::Undeclared {
                            line: line_no,
                            col: col + 1,
                            name: ref_name.into(),
                        })
                    }
                }
            }
            other => {
                return Err(ParseError::Syntax {
                    line: line_no,
                    col: col_of(0),
                    msg: format!("unknown directive `{other}` (expected var, gate or out)"),
                })
            }
        }
    }

    match output {
        Some(output) => Ok(Circuit {
            name: None,
            variables,
            gates,
            output,
        }),
        None => Err(ParseError::MissingOutput),
    }
}

fn split_tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out
}

fn check_name(name: &str, line: usize, col: usize) -> Result<(), ParseError> {
    if is_valid_name(name) {
        Ok(())
    } else {
        Err(ParseError::Syntax {
            line,
            col,
            msg: format!("invalid name `{name}`"),
        })
    }
}

/// Incremental construction of circuits, for the rewriting passes. Names are
/// checked for validity and uniqueness as they are added; [`fresh_name`]
/// deterministically disambiguates a candidate against everything declared
/// so far.
///
/// [`fresh_name`]: CircuitBuilder::fresh_name
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    variables: Vec<String>,
    gates: Vec<Gate>,
    names: HashMap<String, NodeRef>,
}

impl CircuitBuilder {
    pub fn new() -> CircuitBuilder {
        CircuitBuilder::default()
    }

    /// The candidate itself if unused, otherwise the candidate with
    /// underscores appended until it no longer collides.
    pub fn fresh_name(&self, candidate: &str) -> String {
        let mut name = candidate.to_string();
        while self.names.contains_key(&name) {
            name.push('_');
        }
        name
    }

    pub fn add_var(&mut self, name: &str) -> NodeRef {
        assert!(is_valid_name(name), "invalid variable name `{name}`");
        assert!(
            !self.names.contains_key(name),
            "name `{name}` already declared"
        );
        let r = NodeRef::Var(self.variables.len());
        self.names.insert(name.to_string(), r);
        self.variables.push(name.to_string());
        r
    }

    pub fn add_gate(&mut self, name: &str, op: GateOp, inputs: Vec<NodeRef>) -> NodeRef {
        assert!(is_valid_name(name), "invalid gate name `{name}`");
        assert!(
            !self.names.contains_key(name),
            "name `{name}` already declared"
        );
        match op {
            GateOp::Mul => assert_eq!(inputs.len(), 2, "MUL gate `{name}` fan-in"),
            GateOp::Add => assert!(inputs.len() >= 2, "ADD gate `{name}` fan-in"),
        }
        let r = NodeRef::Gate(self.gates.len());
        self.names.insert(name.to_string(), r);
        self.gates.push(Gate {
            name: name.to_string(),
            op,
            inputs,
        });
        r
    }

    pub fn lookup(&self, name: &str) -> Option<NodeRef> {
        self.names.get(name).copied()
    }

    pub fn finish(self, output: NodeRef) -> Circuit {
        Circuit::new(self.variables, self.gates, output)
    }
}

/// Value domain for bottom-up evaluation. ADD gates fold with `add`, MUL
/// gates with `mul`; both must be total.
pub trait EvalDomain {
    type Value: Clone;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
}

impl Circuit {
    pub fn new(variables: Vec<String>, gates: Vec<Gate>, output: NodeRef) -> Circuit {
        let c = Circuit {
            name: None,
            variables,
            gates,
            output,
        };
        c.check_well_formed();
        c
    }

    fn check_well_formed(&self) {
        for (i, g) in self.gates.iter().enumerate() {
            match g.op {
                GateOp::Mul => assert_eq!(g.inputs.len(), 2, "MUL gate `{}` fan-in", g.name),
                GateOp::Add => assert!(g.inputs.len() >= 2, "ADD gate `{}` fan-in", g.name),
            }
            for r in &g.inputs {
                self.check_ref(*r, i);
            }
        }
        self.check_ref(self.output, self.gates.len());
    }

    fn check_ref(&self, r: NodeRef, before_gate: usize) {
        match r {
            NodeRef::Var(v) => assert!(v < self.variables.len(), "dangling variable reference"),
            NodeRef::Gate(g) => assert!(g < before_gate, "gate reference must point backwards"),
        }
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = Some(name.into());
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> NodeRef {
        self.output
    }

    /// Number of gates; terminal nodes are not counted.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn ref_name(&self, r: NodeRef) -> &str {
        match r {
            NodeRef::Var(v) => &self.variables[v],
            NodeRef::Gate(g) => &self.gates[g].name,
        }
    }

    /// Canonical text: variables first (declaration order), gates in
    /// declaration order, `out` last. Equal circuits serialize byte-equal.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        if !self.variables.is_empty() {
            s.push_str("var");
            for v in &self.variables {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        for g in &self.gates {
            let _ = write!(s, "gate {} {}", g.name, g.op.keyword());
            for r in &g.inputs {
                let _ = write!(s, " {}", self.ref_name(*r));
            }
            s.push('\n');
        }
        let _ = writeln!(s, "out {}", self.ref_name(self.output));
        s
    }

    /// Fan-out check: a circuit is tree-like when no gate output feeds more
    /// than one gate input. Terminals are exempt.
    pub fn check_tree_like(&self) -> TreeReport {
        let mut fan_out = vec![0usize; self.gates.len()];
        for g in &self.gates {
            for r in &g.inputs {
                if let NodeRef::Gate(ix) = r {
                    fan_out[*ix] += 1;
                }
            }
        }
        let offending_gates: Vec<String> = fan_out
            .iter()
            .enumerate()
            .filter(|&(_, &n)| n > 1)
            .map(|(ix, _)| self.gates[ix].name.clone())
            .collect();
        TreeReport {
            is_tree_like: offending_gates.is_empty(),
            offending_gates,
        }
    }

    /// Bottom-up evaluation with values supplied per variable name.
    pub fn evaluate<D: EvalDomain>(
        &self,
        domain: &D,
        assignment: &HashMap<String, D::Value>,
    ) -> Result<D::Value, EvalError> {
        let mut values = Vec::with_capacity(self.variables.len());
        for v in &self.variables {
            match assignment.get(v) {
                Some(x) => values.push(x.clone()),
                None => return Err(EvalError::MissingAssignment(v.clone())),
            }
        }
        Ok(self.evaluate_indexed(domain, &values))
    }

    /// Bottom-up evaluation with `values[i]` assigned to variable `i`. Each
    /// gate is computed exactly once, in declaration order.
    pub fn evaluate_indexed<D: EvalDomain>(&self, domain: &D, values: &[D::Value]) -> D::Value {
        assert_eq!(values.len(), self.variables.len(), "assignment length");
        let mut gate_values: Vec<D::Value> = Vec::with_capacity(self.gates.len());
        let value_of = |gate_values: &[D::Value], r: NodeRef| -> D::Value {
            match r {
                NodeRef::Var(v) => values[v].clone(),
                NodeRef::Gate(g) => gate_values[g].clone(),
            }
        };
        for g in &self.gates {
            let mut acc = value_of(&gate_values, g.inputs[0]);
            for r in &g.inputs[1..] {
                let x = value_of(&gate_values, *r);
                acc = match g.op {
                    GateOp::Add => domain.add(&acc, &x),
                    GateOp::Mul => domain.mul(&acc, &x),
                };
            }
            gate_values.push(acc);
        }
        value_of(&gate_values, self.output)
    }
}
