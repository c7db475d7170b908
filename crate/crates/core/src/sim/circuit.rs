use std::fmt;

use super::gate::{Angle, GateKind, GateOp};
use super::state::Statevector;
use super::MAX_QUBITS;
use crate::{Error, Result};

/// Ordered gate list over a fixed register with `n_params` parameter slots.
///
/// Every slot in `0..n_params` is referenced by at least one gate.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
    n_params: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize, ops: Vec<GateOp>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidCircuit(format!(
                "register of {n_qubits} qubits (supported: 1..={MAX_QUBITS})"
            )));
        }
        for (i, op) in ops.iter().enumerate() {
            validate_op(n_qubits, op).map_err(|msg| Error::InvalidCircuit(format!("gate {i} ({op}): {msg}")))?;
        }
        let n_params = ops.iter().filter_map(GateOp::param_slot).map(|s| s + 1).max().unwrap_or(0);
        let mut used = vec![false; n_params];
        for slot in ops.iter().filter_map(GateOp::param_slot) {
            used[slot] = true;
        }
        if let Some(slot) = used.iter().position(|u| !u) {
            return Err(Error::InvalidCircuit(format!("parameter slot {slot} is never used")));
        }
        Ok(Self { n_qubits, ops, n_params })
    }

    pub fn empty(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, Vec::new())
    }

    pub fn builder(n_qubits: usize) -> CircuitBuilder {
        CircuitBuilder { n_qubits, ops: Vec::new(), next_slot: 0 }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.ops.iter().filter(|op| op.kind.is_entangling()).count()
    }

    /// Concatenates `count` copies, shifting parameter slots so each copy has
    /// its own parameters.
    pub fn repeated(&self, count: usize) -> Circuit {
        let mut ops = Vec::with_capacity(self.ops.len() * count);
        for rep in 0..count {
            let offset = rep * self.n_params;
            ops.extend(self.ops.iter().map(|op| {
                let mut op = op.clone();
                if let Some(Angle::Param(slot)) = op.angle {
                    op.angle = Some(Angle::Param(slot + offset));
                }
                op
            }));
        }
        Circuit { n_qubits: self.n_qubits, ops, n_params: self.n_params * count }
    }

    /// Applies the circuit to `state`.
    pub fn apply(&self, params: &[f64], state: &Statevector) -> Result<Statevector> {
        if params.len() != self.n_params {
            return Err(Error::ParamCount { expected: self.n_params, got: params.len() });
        }
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: state.n_qubits() });
        }
        let mut out = state.clone();
        for op in &self.ops {
            out.apply_gate(op, params);
        }
        Ok(out)
    }

    /// Output state on `|0…0⟩`.
    pub fn run(&self, params: &[f64]) -> Result<Statevector> {
        self.apply(params, &Statevector::zero(self.n_qubits))
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "circuit({} qubits, {} params)", self.n_qubits, self.n_params)?;
        for op in &self.ops {
            write!(f, "; {op}")?;
        }
        Ok(())
    }
}

fn validate_op(n_qubits: usize, op: &GateOp) -> std::result::Result<(), String> {
    if op.targets.len() != op.kind.arity() {
        return Err(format!("expects {} target(s), got {}", op.kind.arity(), op.targets.len()));
    }
    if let Some(&q) = op.targets.iter().find(|&&q| q >= n_qubits) {
        return Err(format!("target {q} out of range"));
    }
    if op.targets.len() == 2 && op.targets[0] == op.targets[1] {
        return Err("control and target coincide".into());
    }
    match (op.kind.is_parametric(), op.angle) {
        (true, None) => Err("rotation without an angle".into()),
        (false, Some(_)) => Err("fixed gate given an angle".into()),
        (_, Some(Angle::Fixed(theta))) if !theta.is_finite() => Err("non-finite angle".into()),
        _ => Ok(()),
    }
}

/// Applies `circuit` at `params` to `state`.
pub fn apply_circuit(circuit: &Circuit, params: &[f64], state: &Statevector) -> Result<Statevector> {
    circuit.apply(params, state)
}

/// Incremental circuit construction; parametric gates added with
/// [`param`](Self::param) get the next free slot.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    n_qubits: usize,
    ops: Vec<GateOp>,
    next_slot: usize,
}

impl CircuitBuilder {
    /// Parametric gate on a fresh slot.
    pub fn param(mut self, kind: GateKind, targets: &[usize]) -> Self {
        let slot = self.next_slot;
        self.next_slot += 1;
        self.ops.push(GateOp::new(kind, targets, Some(Angle::Param(slot))));
        self
    }

    /// Parametric gate bound to an existing slot.
    pub fn shared(mut self, kind: GateKind, targets: &[usize], slot: usize) -> Self {
        self.next_slot = self.next_slot.max(slot + 1);
        self.ops.push(GateOp::new(kind, targets, Some(Angle::Param(slot))));
        self
    }

    /// Parametric gate with a fixed angle.
    pub fn fixed(mut self, kind: GateKind, targets: &[usize], theta: f64) -> Self {
        self.ops.push(GateOp::new(kind, targets, Some(Angle::Fixed(theta))));
        self
    }

    /// Non-parametric gate (H, X, CNOT, CZ).
    pub fn gate(mut self, kind: GateKind, targets: &[usize]) -> Self {
        self.ops.push(GateOp::new(kind, targets, None));
        self
    }

    pub fn push(mut self, op: GateOp) -> Self {
        if let Some(slot) = op.param_slot() {
            self.next_slot = self.next_slot.max(slot + 1);
        }
        self.ops.push(op);
        self
    }

    pub fn build(self) -> Result<Circuit> {
        Circuit::new(self.n_qubits, self.ops)
    }
}
