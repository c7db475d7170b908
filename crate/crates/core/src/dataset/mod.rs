//! Labelled entangled / separable state families for two and three qubits.
//!
//! Labels follow the convention `+1` separable, `-1` entangled. Every state is
//! a pure function of its family and `gen_params`, so datasets are stored as
//! generation records and amplitudes are rebuilt on load.

mod io;
mod split;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::metrics::meyer_wallach_q;
use crate::sim::{Circuit, DensityMatrix, GateKind, Statevector};
use crate::{Error, Result};

pub use io::{read_records, write_records, DatasetRecord, SetKind};
pub use split::{make_split, DatasetSplit, Regime, SplitPlan, CONCURRENCE_MARGIN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    TwoQubitConcurrence,
    GhzClass,
    #[serde(rename = "bipartite_a_bc")]
    BipartiteABc,
    #[serde(rename = "bipartite_b_ac")]
    BipartiteBAc,
    #[serde(rename = "bipartite_c_ab")]
    BipartiteCAb,
    SeparableProduct,
}

impl Family {
    pub fn n_qubits(self, gen_params: &[f64]) -> usize {
        match self {
            Family::TwoQubitConcurrence => 2,
            Family::SeparableProduct => gen_params.len() / 2,
            _ => 3,
        }
    }
}

/// Class label. Serialised as the integers `1` and `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Separable,
    Entangled,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Separable => 1.0,
            Label::Entangled => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Separable => 1,
            Label::Entangled => -1,
        }
    }

    /// Sign of a raw decision score; exactly 0 counts as separable.
    pub fn from_score(score: f64) -> Self {
        if score >= 0.0 {
            Label::Separable
        } else {
            Label::Entangled
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.as_i8())
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match i8::deserialize(d)? {
            1 => Ok(Label::Separable),
            -1 => Ok(Label::Entangled),
            other => Err(serde::de::Error::custom(format!("label must be 1 or -1, got {other}"))),
        }
    }
}

/// Which qubit stays unentangled in a three-qubit bipartite state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BipartiteSplit {
    #[serde(rename = "A|BC")]
    ABc,
    #[serde(rename = "B|AC")]
    BAc,
    #[serde(rename = "C|AB")]
    CAb,
}

impl BipartiteSplit {
    pub const ALL: [BipartiteSplit; 3] = [BipartiteSplit::ABc, BipartiteSplit::BAc, BipartiteSplit::CAb];

    /// `(lone, pair control, pair target)`; A, B, C are qubits 0, 1, 2.
    pub fn layout(self) -> (usize, usize, usize) {
        match self {
            BipartiteSplit::ABc => (0, 1, 2),
            BipartiteSplit::BAc => (1, 0, 2),
            BipartiteSplit::CAb => (2, 0, 1),
        }
    }

    pub fn family(self) -> Family {
        match self {
            BipartiteSplit::ABc => Family::BipartiteABc,
            BipartiteSplit::BAc => Family::BipartiteBAc,
            BipartiteSplit::CAb => Family::BipartiteCAb,
        }
    }
}

impl std::str::FromStr for BipartiteSplit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace(['|', '_'], "").as_str() {
            "ABC" => Ok(BipartiteSplit::ABc),
            "BAC" => Ok(BipartiteSplit::BAc),
            "CAB" => Ok(BipartiteSplit::CAb),
            _ => Err(Error::Parse(format!("unknown bipartite split `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledState {
    pub family: Family,
    pub gen_params: Vec<f64>,
    pub state: Statevector,
    pub label: Label,
    /// Concurrence for two-qubit states, Meyer-Wallach Q for three-qubit ones.
    pub witness_value: f64,
}

/// RX(θ0) on qubit 0 followed by CRY(θ1) from qubit 0 onto qubit 1.
pub fn fig6_circuit() -> Circuit {
    Circuit::builder(2)
        .param(GateKind::RX, &[0])
        .param(GateKind::CRY, &[0, 1])
        .build()
        .expect("static circuit")
}

/// The same circuit followed by free RZ phases on both qubits.
pub fn fig6_phased_circuit() -> Circuit {
    Circuit::builder(2)
        .param(GateKind::RX, &[0])
        .param(GateKind::CRY, &[0, 1])
        .param(GateKind::RZ, &[0])
        .param(GateKind::RZ, &[1])
        .build()
        .expect("static circuit")
}

/// `|sin θ0 · sin(θ1/2)|`, with exact zeros on the separable loci.
pub fn closed_form_concurrence(theta0: f64, theta1: f64) -> f64 {
    if theta0 == 0.0 || theta0 == PI || theta1 == 0.0 {
        return 0.0;
    }
    (theta0.sin() * (theta1 / 2.0).sin()).abs()
}

fn concurrence_label(c: f64) -> Label {
    if c == 0.0 {
        Label::Separable
    } else {
        Label::Entangled
    }
}

/// Output of the two-qubit concurrence circuit.
pub fn gen_two_qubit(theta0: f64, theta1: f64) -> LabeledState {
    let state = fig6_circuit().run(&[theta0, theta1]).expect("two parameters");
    let c = closed_form_concurrence(theta0, theta1);
    LabeledState {
        family: Family::TwoQubitConcurrence,
        gen_params: vec![theta0, theta1],
        state,
        label: concurrence_label(c),
        witness_value: c,
    }
}

/// [`gen_two_qubit`] with local RZ phases appended; concurrence is unchanged.
pub fn gen_two_qubit_phased(theta0: f64, theta1: f64, phi0: f64, phi1: f64) -> LabeledState {
    let params = vec![theta0, theta1, phi0, phi1];
    let state = fig6_phased_circuit().run(&params).expect("four parameters");
    let c = closed_form_concurrence(theta0, theta1);
    LabeledState {
        family: Family::TwoQubitConcurrence,
        gen_params: params,
        state,
        label: concurrence_label(c),
        witness_value: c,
    }
}

/// `⊗_j RZ(β_j) RY(α_j) |0⟩`.
pub fn gen_separable(n_qubits: usize, angles: &[(f64, f64)]) -> Result<LabeledState> {
    if angles.len() != n_qubits {
        return Err(Error::ParamCount { expected: n_qubits, got: angles.len() });
    }
    if n_qubits == 0 {
        return Err(Error::InvalidState("separable state needs at least one qubit".into()));
    }
    let mut builder = Circuit::builder(n_qubits);
    for q in 0..n_qubits {
        builder = builder.param(GateKind::RY, &[q]).param(GateKind::RZ, &[q]);
    }
    let params: Vec<f64> = angles.iter().flat_map(|&(a, b)| [a, b]).collect();
    let state = builder.build()?.run(&params)?;
    Ok(LabeledState {
        family: Family::SeparableProduct,
        gen_params: params,
        state,
        label: Label::Separable,
        witness_value: 0.0,
    })
}

/// Normaliser `P = 1 + 2 cosϑ sinϑ cosθA cosθB cosθC cosφ`.
pub fn ghz_normalizer(vartheta: f64, phi: f64, theta: [f64; 3]) -> f64 {
    let cos_prod: f64 = theta.iter().map(|t| t.cos()).product();
    1.0 + 2.0 * vartheta.cos() * vartheta.sin() * cos_prod * phi.cos()
}

/// `cosϑ|000⟩ + sinϑ e^{iφ}|Φ_A Φ_B Φ_C⟩` before normalisation.
pub fn ghz_unnormalized(vartheta: f64, phi: f64, theta: [f64; 3]) -> Vec<Complex64> {
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    let weight = Complex64::from_polar(vartheta.sin(), phi);
    for (idx, amp) in amps.iter_mut().enumerate() {
        let mut prod = 1.0;
        for (q, t) in theta.iter().enumerate() {
            prod *= if (idx >> q) & 1 == 1 { t.sin() } else { t.cos() };
        }
        *amp = weight * prod;
    }
    amps[0] += vartheta.cos();
    amps
}

pub fn gen_ghz_class(vartheta: f64, phi: f64, theta_a: f64, theta_b: f64, theta_c: f64) -> Result<LabeledState> {
    let in_range = |x: f64, hi: f64| x > 0.0 && x <= hi;
    if !in_range(vartheta, FRAC_PI_4) {
        return Err(Error::Domain(format!("vartheta = {vartheta} outside (0, pi/4]")));
    }
    if !(0.0..TAU).contains(&phi) {
        return Err(Error::Domain(format!("phi = {phi} outside [0, 2pi)")));
    }
    for (name, t) in [("theta_A", theta_a), ("theta_B", theta_b), ("theta_C", theta_c)] {
        if !in_range(t, FRAC_PI_2) {
            return Err(Error::Domain(format!("{name} = {t} outside (0, pi/2]")));
        }
    }
    let theta = [theta_a, theta_b, theta_c];
    let p = ghz_normalizer(vartheta, phi, theta);
    let scale = 1.0 / p.sqrt();
    let amps = ghz_unnormalized(vartheta, phi, theta).into_iter().map(|a| a * scale).collect();
    let state = Statevector::from_amplitudes(amps)?;
    let q = meyer_wallach_q(&state)?;
    Ok(LabeledState {
        family: Family::GhzClass,
        gen_params: vec![vartheta, phi, theta_a, theta_b, theta_c],
        state,
        label: Label::Entangled,
        witness_value: q,
    })
}

/// Entangled pair (two-qubit concurrence circuit) times a single-qubit state
/// `RZ(β) RY(α)|0⟩` on the lone qubit.
pub fn gen_bipartite(split: BipartiteSplit, pair: (f64, f64), lone: (f64, f64)) -> Result<LabeledState> {
    let c = closed_form_concurrence(pair.0, pair.1);
    if c == 0.0 {
        return Err(Error::Domain(format!(
            "pair angles ({}, {}) give a separable pair",
            pair.0, pair.1
        )));
    }
    let (l, p0, p1) = split.layout();
    let circuit = Circuit::builder(3)
        .param(GateKind::RX, &[p0])
        .param(GateKind::CRY, &[p0, p1])
        .param(GateKind::RY, &[l])
        .param(GateKind::RZ, &[l])
        .build()?;
    let params = vec![pair.0, pair.1, lone.0, lone.1];
    let state = circuit.run(&params)?;
    let q = meyer_wallach_q(&state)?;
    Ok(LabeledState {
        family: split.family(),
        gen_params: params,
        state,
        label: Label::Entangled,
        witness_value: q,
    })
}

/// Rebuilds a state from its family and generation parameters.
pub fn regenerate(family: Family, gen_params: &[f64]) -> Result<LabeledState> {
    let p = gen_params;
    let expect = |n: usize| {
        if p.len() == n {
            Ok(())
        } else {
            Err(Error::ParamCount { expected: n, got: p.len() })
        }
    };
    match family {
        Family::TwoQubitConcurrence => match p.len() {
            2 => Ok(gen_two_qubit(p[0], p[1])),
            4 => Ok(gen_two_qubit_phased(p[0], p[1], p[2], p[3])),
            got => Err(Error::ParamCount { expected: 2, got }),
        },
        Family::GhzClass => {
            expect(5)?;
            gen_ghz_class(p[0], p[1], p[2], p[3], p[4])
        }
        Family::BipartiteABc | Family::BipartiteBAc | Family::BipartiteCAb => {
            expect(4)?;
            let split = match family {
                Family::BipartiteABc => BipartiteSplit::ABc,
                Family::BipartiteBAc => BipartiteSplit::BAc,
                _ => BipartiteSplit::CAb,
            };
            gen_bipartite(split, (p[0], p[1]), (p[2], p[3]))
        }
        Family::SeparableProduct => {
            if p.is_empty() || p.len() % 2 != 0 {
                return Err(Error::ParamCount { expected: 2 * (p.len() / 2 + 1), got: p.len() });
            }
            let angles: Vec<_> = p.chunks(2).map(|c| (c[0], c[1])).collect();
            gen_separable(angles.len(), &angles)
        }
    }
}

/// Convex mixture `Σ p_k ρ_k` of product states, each given by per-qubit
/// `(α, β)` angles as in [`gen_separable`].
pub fn separable_mixture(weights: &[f64], components: &[Vec<(f64, f64)>]) -> Result<DensityMatrix> {
    let states = components
        .iter()
        .map(|angles| gen_separable(angles.len(), angles).map(|s| s.state))
        .collect::<Result<Vec<_>>>()?;
    DensityMatrix::mixture(weights, &states)
}
