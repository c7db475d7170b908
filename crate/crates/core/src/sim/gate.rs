use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Supported gate kinds. Controlled kinds take `[control, target]`.
#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    RX,
    RY,
    RZ,
    H,
    X,
    CNOT,
    CZ,
    CRX,
    CRY,
    CRZ,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::H,
        GateKind::X,
        GateKind::CNOT,
        GateKind::CZ,
        GateKind::CRX,
        GateKind::CRY,
        GateKind::CRZ,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::H | GateKind::X => 1,
            _ => 2,
        }
    }

    pub fn is_parametric(self) -> bool {
        matches!(
            self,
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CRX | GateKind::CRY | GateKind::CRZ
        )
    }

    pub fn is_entangling(self) -> bool {
        self.arity() == 2
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::CNOT => "CNOT",
            GateKind::CZ => "CZ",
            GateKind::CRX => "CRX",
            GateKind::CRY => "CRY",
            GateKind::CRZ => "CRZ",
        }
    }

    /// The 2x2 matrix acting on the target qubit (for controlled kinds, the
    /// block applied when the control is set).
    ///
    /// Rotations follow `R(θ) = exp(-iθσ/2)`.
    pub fn target_matrix(self, theta: f64) -> Matrix2 {
        let (s, c) = (theta / 2.0).sin_cos();
        match self {
            GateKind::RX | GateKind::CRX => [
                [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
            ],
            GateKind::RY | GateKind::CRY => [
                [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
            ],
            GateKind::RZ | GateKind::CRZ => [
                [Complex64::new(c, -s), ZERO],
                [ZERO, Complex64::new(c, s)],
            ],
            GateKind::H => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            GateKind::X | GateKind::CNOT => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::CZ => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown gate `{s}`"))
    }
}

/// Rotation angle of a parametric gate: a slot in the parameter vector or a
/// fixed value in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Param(usize),
    Fixed(f64),
}

impl Angle {
    pub fn resolve(self, params: &[f64]) -> f64 {
        match self {
            Angle::Param(slot) => params[slot],
            Angle::Fixed(theta) => theta,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub angle: Option<Angle>,
}

impl GateOp {
    pub fn new(kind: GateKind, targets: &[usize], angle: Option<Angle>) -> Self {
        Self { kind, targets: targets.to_vec(), angle }
    }

    pub fn param_slot(&self) -> Option<usize> {
        match self.angle {
            Some(Angle::Param(slot)) => Some(slot),
            _ => None,
        }
    }

    /// Matrix on the target qubit with the angle resolved against `params`.
    pub fn target_matrix(&self, params: &[f64]) -> Matrix2 {
        let theta = self.angle.map_or(0.0, |a| a.resolve(params));
        self.kind.target_matrix(theta)
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        match self.angle {
            Some(Angle::Param(slot)) => write!(f, " θ{slot}"),
            Some(Angle::Fixed(theta)) => write!(f, " {theta}"),
            None => Ok(()),
        }
    }
}
