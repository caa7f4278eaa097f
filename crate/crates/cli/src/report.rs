use std::io::Write;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// Diagnostic only; never affects the exit status.
    Info,
}

/// One check. `wall_ms` is filled only when timings are requested, so that
/// default reports are byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub id: String,
    pub suite: String,
    pub law: String,
    pub instance: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub records: Vec<Record>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn with_law<'a>(&'a self, law: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| r.law == law)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn write_jsonl(&self, mut w: impl Write) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("utf8 json")
    }

    /// `pass fail info` counts.
    pub fn summary(&self) -> (usize, usize, usize) {
        let c = |v| self.records.iter().filter(|r| r.verdict == v).count();
        (c(Verdict::Pass), c(Verdict::Fail), c(Verdict::Info))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_shape() {
        let r = SuiteReport {
            records: vec![Record {
                id: "types-00000".into(),
                suite: "types".into(),
                law: "x".into(),
                instance: "Z2".into(),
                verdict: Verdict::Pass,
                witness: None,
                wall_ms: None,
            }],
        };
        assert_eq!(
            r.to_jsonl(),
            "{\"id\":\"types-00000\",\"suite\":\"types\",\"law\":\"x\",\"instance\":\"Z2\",\"verdict\":\"PASS\"}\n"
        );
        assert_eq!(r.exit_code(), 0);
    }
}
