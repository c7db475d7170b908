use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{
    closed_form_concurrence, gen_bipartite, gen_ghz_class, gen_separable, gen_two_qubit, gen_two_qubit_phased,
    BipartiteSplit, LabeledState,
};
use crate::rng::{derive_seed, rng, Rng};
use crate::{Error, Result};

/// Entangled states of the partial regime keep `margin < c < 1 - margin`.
pub const CONCURRENCE_MARGIN: f64 = 0.05;

/// Sampling regime for a train/test split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Regime {
    /// Two qubits, entangled states with `0 < c < 1`.
    TwoQubitPartial,
    /// Two qubits, maximally entangled states dressed with local RZ phases.
    TwoQubitMaximal,
    /// Three qubits, GHZ-class against fully separable products.
    ThreeQubitGhz,
    /// Three qubits, one bipartite split against fully separable products.
    ThreeQubitBipartite(BipartiteSplit),
}

impl Regime {
    pub const ALL: [Regime; 6] = [
        Regime::TwoQubitPartial,
        Regime::TwoQubitMaximal,
        Regime::ThreeQubitGhz,
        Regime::ThreeQubitBipartite(BipartiteSplit::ABc),
        Regime::ThreeQubitBipartite(BipartiteSplit::BAc),
        Regime::ThreeQubitBipartite(BipartiteSplit::CAb),
    ];

    pub fn n_qubits(self) -> usize {
        match self {
            Regime::TwoQubitPartial | Regime::TwoQubitMaximal => 2,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::TwoQubitPartial => "two_qubit_partial",
            Regime::TwoQubitMaximal => "two_qubit_maximal",
            Regime::ThreeQubitGhz => "three_qubit_ghz",
            Regime::ThreeQubitBipartite(BipartiteSplit::ABc) => "three_qubit_bipartite_a_bc",
            Regime::ThreeQubitBipartite(BipartiteSplit::BAc) => "three_qubit_bipartite_b_ac",
            Regime::ThreeQubitBipartite(BipartiteSplit::CAb) => "three_qubit_bipartite_c_ab",
        }
    }

    /// Human-readable row label, as used in accuracy tables.
    pub fn row_label(self) -> &'static str {
        match self {
            Regime::TwoQubitPartial => "2-qubit (0<c<1)",
            Regime::TwoQubitMaximal => "2-qubit (c=1)",
            Regime::ThreeQubitGhz => "3-qubit full-entangled",
            Regime::ThreeQubitBipartite(BipartiteSplit::ABc) => "3-qubit A|BC",
            Regime::ThreeQubitBipartite(BipartiteSplit::BAc) => "3-qubit B|AC",
            Regime::ThreeQubitBipartite(BipartiteSplit::CAb) => "3-qubit C|AB",
        }
    }

    pub fn sample_entangled(self, rng: &mut Rng) -> LabeledState {
        match self {
            Regime::TwoQubitPartial => {
                let (t0, t1) = partial_pair(rng);
                gen_two_qubit(t0, t1)
            }
            Regime::TwoQubitMaximal => gen_two_qubit_phased(FRAC_PI_2, PI, angle(rng), angle(rng)),
            Regime::ThreeQubitGhz => {
                let vartheta = half_open_upper(rng, FRAC_PI_4);
                let phi = angle(rng);
                let [a, b, c] = [0; 3].map(|_| half_open_upper(rng, FRAC_PI_2));
                gen_ghz_class(vartheta, phi, a, b, c).expect("sampled inside the domain")
            }
            Regime::ThreeQubitBipartite(split) => {
                let pair = partial_pair(rng);
                let lone = (angle(rng), angle(rng));
                gen_bipartite(split, pair, lone).expect("pair is entangled")
            }
        }
    }

    pub fn sample_separable(self, rng: &mut Rng) -> LabeledState {
        match self {
            Regime::TwoQubitPartial => {
                let (t0, t1) = separable_pair(rng);
                gen_two_qubit(t0, t1)
            }
            Regime::TwoQubitMaximal => {
                let (t0, t1) = separable_pair(rng);
                gen_two_qubit_phased(t0, t1, angle(rng), angle(rng))
            }
            Regime::ThreeQubitGhz | Regime::ThreeQubitBipartite(_) => {
                let angles: Vec<_> = (0..3).map(|_| (angle(rng), angle(rng))).collect();
                gen_separable(3, &angles).expect("three angle pairs")
            }
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown regime `{s}`")))
    }
}

impl TryFrom<String> for Regime {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Regime> for String {
    fn from(r: Regime) -> String {
        r.name().to_string()
    }
}

fn angle(rng: &mut Rng) -> f64 {
    rng.random::<f64>() * TAU
}

/// Uniform on `(0, hi]`.
fn half_open_upper(rng: &mut Rng, hi: f64) -> f64 {
    hi * (1.0 - rng.random::<f64>())
}

fn partial_pair(rng: &mut Rng) -> (f64, f64) {
    loop {
        let (t0, t1) = (angle(rng), angle(rng));
        let c = closed_form_concurrence(t0, t1);
        if c > CONCURRENCE_MARGIN && c < 1.0 - CONCURRENCE_MARGIN {
            return (t0, t1);
        }
    }
}

/// A point on one of the exact `c = 0` loci of the concurrence circuit.
fn separable_pair(rng: &mut Rng) -> (f64, f64) {
    if rng.random::<bool>() {
        (angle(rng), 0.0)
    } else {
        (PI, angle(rng))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub regime: Regime,
    pub m_train: usize,
    pub m_test: usize,
    /// Qubits of the coefficient circuit; caps `m_train` at `2^mu_qubits`.
    pub mu_qubits: usize,
}

impl SplitPlan {
    /// Plan whose coefficient circuit has as many qubits as the data.
    pub fn new(regime: Regime, m_train: usize, m_test: usize) -> Self {
        Self { regime, m_train, m_test, mu_qubits: regime.n_qubits() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<LabeledState>,
    pub test: Vec<LabeledState>,
    pub seed: u64,
}

/// Separable count first; odd sizes give the extra state to the separable class.
fn class_sizes(m: usize) -> (usize, usize) {
    (m - m / 2, m / 2)
}

/// Deterministic, class-balanced, disjoint train/test split.
pub fn make_split(plan: &SplitPlan, seed: u64) -> Result<DatasetSplit> {
    if plan.m_train < 2 {
        return Err(Error::InvalidSplit(format!(
            "m_train = {} cannot hold both classes",
            plan.m_train
        )));
    }
    let capacity = 1usize.checked_shl(plan.mu_qubits as u32).unwrap_or(usize::MAX);
    if plan.m_train > capacity {
        return Err(Error::Capacity { m: plan.m_train, capacity });
    }
    let (sep_train, ent_train) = class_sizes(plan.m_train);
    let (sep_test, ent_test) = class_sizes(plan.m_test);

    let mut sep_rng = rng(derive_seed(seed, 1));
    let mut ent_rng = rng(derive_seed(seed, 2));
    let mut seen: Vec<Vec<f64>> = Vec::new();
    let mut draw = |n: usize, sampler: &mut dyn FnMut() -> LabeledState| {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let s = sampler();
            if !seen.contains(&s.gen_params) {
                seen.push(s.gen_params.clone());
                out.push(s);
            }
        }
        out
    };
    let regime = plan.regime;
    let mut train = draw(sep_train, &mut || regime.sample_separable(&mut sep_rng));
    train.extend(draw(ent_train, &mut || regime.sample_entangled(&mut ent_rng)));
    let mut test = draw(sep_test, &mut || regime.sample_separable(&mut sep_rng));
    test.extend(draw(ent_test, &mut || regime.sample_entangled(&mut ent_rng)));

    let mut shuffle_rng = rng(derive_seed(seed, 3));
    train.shuffle(&mut shuffle_rng);
    test.shuffle(&mut shuffle_rng);
    Ok(DatasetSplit { train, test, seed })
}
