//! Gate-line grammar of the registry file.

use std::f64::consts::PI;

use crate::sim::{Angle, GateKind, GateOp};

/// Parses one gate line into ops. Rotations without a fixed angle carry
/// `Angle::Param(0)` as a placeholder; the registry assigns real slots.
pub fn parse_gate_line(line: &str, n_qubits: usize) -> Result<Vec<GateOp>, String> {
    let mut tokens = line.split_whitespace();
    let kind: GateKind = tokens.next().ok_or("empty gate line")?.parse()?;
    let rest: Vec<&str> = tokens.collect();
    let arity = kind.arity();

    if rest.first() == Some(&"*") {
        if arity != 1 {
            return Err(format!("`*` needs a single-qubit gate, got {kind}"));
        }
        let angle = angle_for(kind, &rest[1..])?;
        return Ok((0..n_qubits).map(|q| GateOp::new(kind, &[q], angle)).collect());
    }

    if rest.len() < arity {
        return Err(format!("{kind} needs {arity} target(s)"));
    }
    let targets = rest[..arity]
        .iter()
        .map(|t| t.parse::<usize>().map_err(|_| format!("bad qubit index `{t}`")))
        .collect::<Result<Vec<_>, _>>()?;
    let angle = angle_for(kind, &rest[arity..])?;
    Ok(vec![GateOp::new(kind, &targets, angle)])
}

fn angle_for(kind: GateKind, rest: &[&str]) -> Result<Option<Angle>, String> {
    match (kind.is_parametric(), rest) {
        (true, []) => Ok(Some(Angle::Param(0))),
        (true, [a]) => Ok(Some(Angle::Fixed(parse_angle(a)?))),
        (false, []) => Ok(None),
        (false, _) => Err(format!("{kind} takes no angle")),
        (true, _) => Err("too many tokens".into()),
    }
}

/// Parses `0.5`, `pi`, `-pi/4`, `3pi/4`, `2*pi`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let err = || format!("bad angle `{text}`");
    let (sign, body) = match text.strip_prefix('-') {
        Some(b) => (-1.0, b),
        None => (1.0, text),
    };
    if let Ok(v) = body.parse::<f64>() {
        return Ok(sign * v);
    }
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| err())?),
        None => (body, 1.0),
    };
    let coeff = num.strip_suffix("pi").ok_or_else(err)?.trim_end_matches('*');
    let coeff = if coeff.is_empty() { 1.0 } else { coeff.parse::<f64>().map_err(|_| err())? };
    Ok(sign * coeff * PI / den)
}
