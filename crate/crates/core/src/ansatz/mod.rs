//! Parameterised ansatz templates and their registry.
//!
//! A template is a circuit block that is repeated `n_blocks` times; each copy
//! gets fresh parameter slots. The builtin registry ships as
//! `data/templates.toml` and can be replaced by any file in the same format.

mod parse;

use std::path::Path;

use serde::Deserialize;

use crate::sim::{Angle, Circuit};
use crate::{Error, Result};

pub use parse::{parse_angle, parse_gate_line};

/// Environment variable naming an alternative registry file.
pub const REGISTRY_ENV: &str = "QSVM_TEMPLATES";

const BUILTIN: &str = include_str!("../../data/templates.toml");

/// Number of benchmark circuits (C1..C19) in the builtin registry.
pub const BENCHMARK_COUNT: usize = 19;

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzTemplate {
    pub id: String,
    pub n_qubits: usize,
    pub description: String,
    /// Part of the C1..C19 benchmark family (as opposed to auxiliary
    /// coefficient circuits).
    pub benchmark: bool,
    pub block: Circuit,
    pub n_blocks: usize,
}

impl AnsatzTemplate {
    pub fn params_per_block(&self) -> usize {
        self.block.n_params()
    }

    pub fn with_blocks(&self, n_blocks: usize) -> Self {
        Self { n_blocks, ..self.clone() }
    }

    /// Expands the block `n_blocks` times with sequential parameter slots.
    pub fn build(&self) -> Result<Circuit> {
        if self.n_blocks == 0 {
            return Err(Error::InvalidCircuit(format!("template {} has zero blocks", self.id)));
        }
        Ok(self.block.repeated(self.n_blocks))
    }

    pub fn has_entangler(&self) -> bool {
        self.block.two_qubit_gate_count() > 0
    }
}

#[derive(Debug, Deserialize)]
struct RegistryFile {
    version: u32,
    template: Vec<TemplateEntry>,
}

#[derive(Debug, Deserialize)]
struct TemplateEntry {
    id: String,
    qubits: usize,
    #[serde(default)]
    description: String,
    #[serde(default = "default_true")]
    benchmark: bool,
    gates: Vec<String>,
}

fn default_true() -> bool {
    true
}

/// Immutable, ordered collection of templates with unique ids.
#[derive(Debug, Clone)]
pub struct Registry {
    templates: Vec<AnsatzTemplate>,
}

impl Registry {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("builtin registry is valid")
    }

    /// Registry from `$QSVM_TEMPLATES` when set, the builtin one otherwise.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(REGISTRY_ENV) {
            Some(path) => Self::from_path(Path::new(&path)),
            None => Ok(Self::builtin()),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: RegistryFile = toml::from_str(text).map_err(|e| Error::Registry(e.to_string()))?;
        if file.version != 1 {
            return Err(Error::Registry(format!("unsupported registry version {}", file.version)));
        }
        let mut templates: Vec<AnsatzTemplate> = Vec::with_capacity(file.template.len());
        for entry in file.template {
            if templates.iter().any(|t| t.id == entry.id) {
                return Err(Error::Registry(format!("duplicate template id `{}`", entry.id)));
            }
            let mut builder = Circuit::builder(entry.qubits);
            for line in &entry.gates {
                for op in parse_gate_line(line, entry.qubits)
                    .map_err(|e| Error::Registry(format!("{}: `{line}`: {e}", entry.id)))?
                {
                    builder = match op.angle {
                        Some(Angle::Param(_)) => builder.param(op.kind, &op.targets),
                        _ => builder.push(op),
                    };
                }
            }
            let block = builder
                .build()
                .map_err(|e| Error::Registry(format!("{}: {e}", entry.id)))?;
            templates.push(AnsatzTemplate {
                id: entry.id,
                n_qubits: entry.qubits,
                description: entry.description,
                benchmark: entry.benchmark,
                block,
                n_blocks: 1,
            });
        }
        Ok(Self { templates })
    }

    /// All templates in file order.
    pub fn templates(&self) -> &[AnsatzTemplate] {
        &self.templates
    }

    pub fn benchmarks(&self) -> impl Iterator<Item = &AnsatzTemplate> {
        self.templates.iter().filter(|t| t.benchmark)
    }

    pub fn get(&self, id: &str) -> Result<&AnsatzTemplate> {
        self.templates
            .iter()
            .find(|t| t.id == id)
            .ok_or_else(|| Error::UnknownTemplate(id.to_string()))
    }

    /// Builds template `id` with `n_blocks` repetitions.
    pub fn build(&self, id: &str, n_blocks: usize) -> Result<Circuit> {
        self.get(id)?.with_blocks(n_blocks).build()
    }

    /// Templates acting on exactly `n_qubits` qubits.
    pub fn with_qubits(&self, n_qubits: usize) -> impl Iterator<Item = &AnsatzTemplate> {
        self.templates.iter().filter(move |t| t.n_qubits == n_qubits)
    }
}

/// Concrete circuit for `template`.
pub fn build(template: &AnsatzTemplate) -> Result<Circuit> {
    template.build()
}

/// Templates of the builtin registry: C1..C19 first, then auxiliary circuits.
pub fn list_templates() -> Vec<AnsatzTemplate> {
    Registry::builtin().templates
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::GateKind;

    #[test]
    fn builtin_has_nineteen_benchmarks_in_order() {
        let reg = Registry::builtin();
        let ids: Vec<_> = reg.benchmarks().map(|t| t.id.clone()).collect();
        let expected: Vec<_> = (1..=19).map(|k| format!("C{k}")).collect();
        assert_eq!(ids, expected);
        assert_eq!(ids.len(), BENCHMARK_COUNT);
        assert_eq!(&reg.templates()[0].id, "C1");
    }

    #[test]
    fn every_template_builds() {
        for t in list_templates() {
            let c = build(&t).unwrap();
            assert_eq!(c.n_params(), t.params_per_block());
            assert_eq!(c.n_qubits(), t.n_qubits);
        }
    }

    #[test]
    fn c1_has_no_entangler() {
        let reg = Registry::builtin();
        let c1 = reg.build("C1", 1).unwrap();
        assert_eq!(c1.two_qubit_gate_count(), 0);
        assert!(!reg.get("C1").unwrap().has_entangler());
    }

    #[test]
    fn fig1_is_four_rotations_and_one_cnot() {
        let c = Registry::builtin().build("fig1", 1).unwrap();
        assert_eq!(c.n_qubits(), 2);
        assert_eq!(c.ops().iter().filter(|op| op.kind.is_parametric()).count(), 4);
        assert_eq!(c.ops().iter().filter(|op| op.kind == GateKind::CNOT).count(), 1);
        assert_eq!(c.ops().len(), 5);
    }

    #[test]
    fn blocks_scale_parameters() {
        let reg = Registry::builtin();
        for t in reg.templates() {
            let one = t.with_blocks(1).build().unwrap().n_params();
            let two = t.with_blocks(2).build().unwrap().n_params();
            assert_eq!(two, 2 * one, "{}", t.id);
        }
        assert!(reg.get("C3").unwrap().with_blocks(0).build().is_err());
    }

    #[test]
    fn unknown_and_duplicate_ids() {
        assert!(matches!(Registry::builtin().get("C20"), Err(Error::UnknownTemplate(_))));
        let dup = r#"
            version = 1
            [[template]]
            id = "A"
            qubits = 1
            gates = ["RX 0"]
            [[template]]
            id = "A"
            qubits = 1
            gates = ["RY 0"]
        "#;
        assert!(matches!(Registry::parse(dup), Err(Error::Registry(_))));
    }

    #[test]
    fn bad_gate_lines_are_reported() {
        let bad = r#"
            version = 1
            [[template]]
            id = "A"
            qubits = 2
            gates = ["CNOT 0 2"]
        "#;
        let err = Registry::parse(bad).unwrap_err().to_string();
        assert!(err.contains("A"), "{err}");
    }

    #[test]
    fn loads_from_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("reg.toml");
        std::fs::write(&path, "version = 1\n[[template]]\nid = \"solo\"\nqubits = 1\ngates = [\"RY 0\", \"RZ 0 pi/2\"]\n").unwrap();
        let reg = Registry::from_path(&path).unwrap();
        let c = reg.build("solo", 3).unwrap();
        assert_eq!(c.n_params(), 3);
    }
}
