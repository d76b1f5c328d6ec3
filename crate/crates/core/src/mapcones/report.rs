use serde::Serialize;
use sha2::{Digest, Sha256};

/// Outcome of one clause: proved, soundly refuted, or neither.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    Holds,
    Fails,
    Unrefuted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableEntry {
    pub clause: String,
    pub truth: Truth,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub index: usize,
    pub label: String,
    pub entries: Vec<TableEntry>,
}

impl TableRow {
    pub fn new(index: usize, label: impl Into<String>) -> Self {
        Self { index, label: label.into(), entries: Vec::new() }
    }

    pub fn push(&mut self, clause: &str, truth: Truth, value: f64) {
        self.entries.push(TableEntry { clause: clause.to_string(), truth, value });
    }

    pub fn truth(&self, clause: &str) -> Option<Truth> {
        self.entries.iter().find(|e| e.clause == clause).map(|e| e.truth)
    }
}

/// Aggregate of a clause over a whole run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClauseSummary {
    pub clause: String,
    pub truth: Truth,
    pub refuted: usize,
    pub undetermined: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub theorem: String,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub agreement: bool,
    pub counterexamples: Vec<serde_json::Value>,
    pub clauses: Vec<ClauseSummary>,
    /// Rows where some clause stayed undetermined.
    pub inconclusive: usize,
    pub table_digest: String,
    #[serde(skip)]
    pub table: Vec<TableRow>,
}

impl VerificationReport {
    pub fn new(
        theorem: &str,
        n: usize,
        samples: usize,
        seed: u64,
        clauses: Vec<ClauseSummary>,
        table: Vec<TableRow>,
        counterexamples: Vec<serde_json::Value>,
    ) -> Self {
        let inconclusive = table.iter().filter(|r| r.entries.iter().any(|e| e.truth == Truth::Unrefuted)).count();
        let table_digest = digest(&table);
        Self {
            theorem: theorem.to_string(),
            n,
            samples,
            seed,
            agreement: counterexamples.is_empty(),
            counterexamples,
            clauses,
            inconclusive,
            table_digest,
            table,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseSummary> {
        self.clauses.iter().find(|c| c.clause == name)
    }
}

pub fn digest(table: &[TableRow]) -> String {
    let bytes = serde_json::to_vec(table).expect("table serialization cannot fail");
    hex::encode(Sha256::digest(&bytes))
}

/// Universal aggregate of per-sample instances: any `Fails` refutes, and
/// `Holds` only survives if the clause is not universally quantified.
pub fn summarize(rows: &[TableRow], clause: &str, universal: bool) -> ClauseSummary {
    let mut refuted = 0;
    let mut undetermined = 0;
    let mut holds = 0;
    for r in rows {
        match r.truth(clause) {
            Some(Truth::Fails) => refuted += 1,
            Some(Truth::Unrefuted) => undetermined += 1,
            Some(Truth::Holds) => holds += 1,
            None => {}
        }
    }
    let truth = if refuted > 0 {
        Truth::Fails
    } else if !universal && holds > 0 && undetermined == 0 {
        Truth::Holds
    } else {
        Truth::Unrefuted
    };
    ClauseSummary { clause: clause.to_string(), truth, refuted, undetermined }
}

/// Names of clauses that are proved while another is refuted.
pub fn contradictions(clauses: &[ClauseSummary]) -> Option<(String, String)> {
    let held = clauses.iter().find(|c| c.truth == Truth::Holds)?;
    let failed = clauses.iter().find(|c| c.truth == Truth::Fails)?;
    Some((held.clause.clone(), failed.clause.clone()))
}
