use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;

/// One measured residual with the tolerance and projection it was judged under.
#[derive(Clone, Debug, Serialize)]
pub struct LedgerEntry {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub interior_reserve: Option<usize>,
    pub projection: String,
    pub hard: bool,
    pub pass: bool,
}

#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub command: String,
    pub config: BTreeMap<String, Value>,
    pub verdicts: BTreeMap<String, Value>,
    pub ledger: Vec<LedgerEntry>,
    pub outputs: BTreeMap<String, Value>,
    pub timings: BTreeMap<String, f64>,
}

pub fn interior(reserve: usize) -> String {
    format!("interior(reserve={reserve})")
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), ..Default::default() }
    }

    pub fn config(&mut self, key: &str, v: impl Serialize) {
        self.config.insert(key.into(), serde_json::to_value(v).expect("serializable config"));
    }

    pub fn verdict(&mut self, key: &str, v: impl Serialize) {
        self.verdicts.insert(key.into(), serde_json::to_value(v).expect("serializable verdict"));
    }

    pub fn output(&mut self, key: &str, v: impl Serialize) {
        self.outputs.insert(key.into(), serde_json::to_value(v).expect("serializable output"));
    }

    /// Records `value <= tolerance`.
    pub fn entry(&mut self, name: &str, value: f64, tolerance: f64, reserve: Option<usize>, projection: &str, hard: bool) -> bool {
        let pass = value <= tolerance;
        self.ledger.push(LedgerEntry {
            name: name.into(),
            value,
            tolerance,
            interior_reserve: reserve,
            projection: projection.into(),
            hard,
            pass,
        });
        pass
    }

    pub fn hard_pass(&self) -> bool {
        self.ledger.iter().all(|e| !e.hard || e.pass)
    }
}
