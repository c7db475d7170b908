use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{regenerate, DatasetSplit, Family, Label, LabeledState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetKind {
    Train,
    Test,
}

/// One line of a dataset file. Amplitudes are not stored; they are rebuilt
/// from `family` and `gen_params`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub family: Family,
    pub gen_params: Vec<f64>,
    pub label: Label,
    pub witness_value: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<SetKind>,
}

impl DatasetRecord {
    pub fn from_state(state: &LabeledState, seed: u64, set: Option<SetKind>) -> Self {
        Self {
            family: state.family,
            gen_params: state.gen_params.clone(),
            label: state.label,
            witness_value: state.witness_value,
            seed,
            set,
        }
    }

    /// Rebuilds the state, checking the stored label against the regenerated one.
    pub fn to_state(&self) -> Result<LabeledState> {
        let state = regenerate(self.family, &self.gen_params)?;
        if state.label != self.label {
            return Err(Error::Parse(format!(
                "record labelled {} but its parameters give {}",
                self.label, state.label
            )));
        }
        Ok(state)
    }
}

impl DatasetSplit {
    pub fn records(&self) -> Vec<DatasetRecord> {
        let tag = |set| move |s: &LabeledState| DatasetRecord::from_state(s, self.seed, Some(set));
        self.train
            .iter()
            .map(tag(SetKind::Train))
            .chain(self.test.iter().map(tag(SetKind::Test)))
            .collect()
    }

    /// Reassembles a split from records carrying a `set` tag.
    pub fn from_records(records: &[DatasetRecord]) -> Result<Self> {
        let mut train = Vec::new();
        let mut test = Vec::new();
        let mut seed = None;
        for r in records {
            match r.set {
                Some(SetKind::Train) => train.push(r.to_state()?),
                Some(SetKind::Test) => test.push(r.to_state()?),
                None => return Err(Error::Parse("record without a train/test tag".into())),
            }
            seed.get_or_insert(r.seed);
        }
        if train.is_empty() {
            return Err(Error::EmptyTraining);
        }
        Ok(Self { train, test, seed: seed.unwrap_or(0) })
    }
}

/// Writes one JSON object per line.
pub fn write_records<W: Write>(mut out: W, records: &[DatasetRecord]) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Reads records written by [`write_records`]; blank lines are skipped.
pub fn read_records<R: BufRead>(input: R) -> Result<Vec<DatasetRecord>> {
    let mut records = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line).map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        records.push(r);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{make_split, Regime, SplitPlan};

    #[test]
    fn split_round_trip_is_exact() {
        for regime in Regime::ALL {
            let split = make_split(&SplitPlan::new(regime, 4, 6), 5).unwrap();
            let mut buf = Vec::new();
            write_records(&mut buf, &split.records()).unwrap();
            let back = read_records(buf.as_slice()).unwrap();
            assert_eq!(back, split.records());
            let rebuilt = DatasetSplit::from_records(&back).unwrap();
            assert_eq!(rebuilt, split);
        }
    }

    #[test]
    fn line_format() {
        let r = DatasetRecord::from_state(&super::super::gen_two_qubit(0.5, 0.0), 3, Some(SetKind::Test));
        let mut buf = Vec::new();
        write_records(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "{\"family\":\"two_qubit_concurrence\",\"gen_params\":[0.5,0.0],\"label\":1,\"witness_value\":0.0,\"seed\":3,\"set\":\"test\"}\n"
        );
    }

    #[test]
    fn mislabelled_record_is_rejected() {
        let mut r = DatasetRecord::from_state(&super::super::gen_two_qubit(1.0, 1.0), 0, Some(SetKind::Train));
        r.label = Label::Separable;
        assert!(r.to_state().is_err());
        assert!(read_records("{not json}\n".as_bytes()).is_err());
    }
}
