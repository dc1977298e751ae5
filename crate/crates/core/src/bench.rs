//! On-disk benchmark store.
//!
//! ```text
//! <dir>/<id>/question.md
//! <dir>/<id>/expected.dgl
//! <dir>/<id>/meta.json            {"min_writes": 2, "tags": ["optimization"]}
//! <dir>/fewshot/<id>/...          same files plus model.dgl
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checker::CheckSpec;
use crate::ir::Formula;
use crate::parser::{feedback, parse_formula};

pub const FEWSHOT_DIR: &str = "fewshot";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Benchmark,
    FewshotExample,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub min_writes: usize,
    #[serde(default)]
    pub tags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Benchmark {
    pub id: String,
    pub question: String,
    /// Source text of the expected solution.
    pub expected: String,
    pub min_writes: usize,
    pub tags: Vec<String>,
    pub role: Role,
    /// Worked answer; present exactly for few-shot examples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_model: Option<String>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {detail}", path.display())]
    Meta { path: PathBuf, detail: String },
    #[error("benchmark `{id}`: {detail}")]
    Invalid { id: String, detail: String },
    #[error("duplicate id `{0}`")]
    Duplicate(String),
    #[error("benchmark `{bench}` overlaps few-shot example `{example}`")]
    Overlap { bench: String, example: String },
}

fn read(path: &Path) -> Result<String, BenchError> {
    fs::read_to_string(path).map_err(|source| BenchError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), BenchError> {
    fs::write(path, text).map_err(|source| BenchError::Io { path: path.to_path_buf(), source })
}

impl Benchmark {
    pub fn expected_formula(&self) -> Result<Formula, BenchError> {
        let f = parse_formula(&self.expected)
            .map_err(|e| BenchError::Invalid { id: self.id.clone(), detail: format!("expected solution: {}", feedback(&e)) })?;
        if !f.is_modality_free() {
            return Err(BenchError::Invalid { id: self.id.clone(), detail: "expected solution contains a modality".into() });
        }
        Ok(f)
    }

    pub fn check_spec(&self, timeout: Duration) -> Result<CheckSpec, BenchError> {
        Ok(CheckSpec::new(self.expected_formula()?, self.min_writes).with_timeout(timeout))
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let invalid = |detail: &str| BenchError::Invalid { id: self.id.clone(), detail: detail.into() };
        if self.question.trim().is_empty() {
            return Err(invalid("empty question"));
        }
        if self.min_writes == 0 {
            return Err(invalid("min_writes must be at least 1"));
        }
        self.expected_formula()?;
        match (&self.role, &self.reference_model) {
            (Role::FewshotExample, None) => return Err(invalid("few-shot example without model.dgl")),
            (Role::FewshotExample, Some(m)) => {
                parse_formula(m).map_err(|e| invalid(&format!("model.dgl: {}", feedback(&e))))?;
            }
            (Role::Benchmark, Some(_)) => return Err(invalid("benchmarks carry no reference model")),
            (Role::Benchmark, None) => {}
        }
        Ok(())
    }

    pub fn load(dir: &Path, role: Role) -> Result<Benchmark, BenchError> {
        let id = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let meta_path = dir.join("meta.json");
        let meta: Meta = serde_json::from_str(&read(&meta_path)?)
            .map_err(|e| BenchError::Meta { path: meta_path.clone(), detail: e.to_string() })?;
        let reference_model = match role {
            Role::FewshotExample => Some(read(&dir.join("model.dgl"))?.trim().to_string()),
            Role::Benchmark => None,
        };
        let b = Benchmark {
            id,
            question: read(&dir.join("question.md"))?.trim().to_string(),
            expected: read(&dir.join("expected.dgl"))?.trim().to_string(),
            min_writes: meta.min_writes,
            tags: meta.tags,
            role,
            reference_model,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn save(&self, parent: &Path) -> Result<(), BenchError> {
        let dir = parent.join(&self.id);
        fs::create_dir_all(&dir).map_err(|source| BenchError::Io { path: dir.clone(), source })?;
        write(&dir.join("question.md"), &format!("{}\n", self.question))?;
        write(&dir.join("expected.dgl"), &format!("{}\n", self.expected))?;
        let meta = Meta { min_writes: self.min_writes, tags: self.tags.clone() };
        write(&dir.join("meta.json"), &(serde_json::to_string_pretty(&meta).expect("plain struct") + "\n"))?;
        if let Some(m) = &self.reference_model {
            write(&dir.join("model.dgl"), &format!("{m}\n"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BenchStore {
    pub benchmarks: Vec<Benchmark>,
    pub fewshot: Vec<Benchmark>,
}

fn subdirs(dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    let entries = fs::read_dir(dir).map_err(|source| BenchError::Io { path: dir.to_path_buf(), source })?;
    let mut out = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| BenchError::Io { path: dir.to_path_buf(), source })?;
        let path = entry.path();
        let hidden = entry.file_name().to_string_lossy().starts_with('.');
        if path.is_dir() && !hidden {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn normalize(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

impl BenchStore {
    pub fn load(dir: &Path) -> Result<BenchStore, BenchError> {
        let mut store = BenchStore::default();
        for path in subdirs(dir)? {
            if path.file_name().is_some_and(|n| n == FEWSHOT_DIR) {
                for ex in subdirs(&path)? {
                    store.fewshot.push(Benchmark::load(&ex, Role::FewshotExample)?);
                }
            } else {
                store.benchmarks.push(Benchmark::load(&path, Role::Benchmark)?);
            }
        }
        store.validate()?;
        Ok(store)
    }

    pub fn save(&self, dir: &Path) -> Result<(), BenchError> {
        for b in &self.benchmarks {
            b.save(dir)?;
        }
        let fewshot = dir.join(FEWSHOT_DIR);
        for ex in &self.fewshot {
            ex.save(&fewshot)?;
        }
        Ok(())
    }

    /// Unique ids, and no benchmark question inside the few-shot material.
    pub fn validate(&self) -> Result<(), BenchError> {
        let mut ids = BTreeSet::new();
        for b in self.benchmarks.iter().chain(&self.fewshot) {
            if !ids.insert(b.id.as_str()) {
                return Err(BenchError::Duplicate(b.id.clone()));
            }
        }
        for b in &self.benchmarks {
            let q = normalize(&b.question);
            for ex in &self.fewshot {
                let material = normalize(&format!("{}\n{}", ex.question, ex.reference_model.as_deref().unwrap_or("")));
                if material.contains(&q) || q.contains(&normalize(&ex.question)) {
                    return Err(BenchError::Overlap { bench: b.id.clone(), example: ex.id.clone() });
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Benchmark> {
        self.benchmarks.iter().find(|b| b.id == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bench(id: &str, question: &str) -> Benchmark {
        Benchmark {
            id: id.into(),
            question: question.into(),
            expected: "d = v*T".into(),
            min_writes: 1,
            tags: vec!["kinematics".into()],
            role: Role::Benchmark,
            reference_model: None,
        }
    }

    fn example(id: &str, question: &str) -> Benchmark {
        Benchmark { role: Role::FewshotExample, reference_model: Some("<x:=1;> x=1".into()), ..bench(id, question) }
    }

    #[test]
    fn round_trip() {
        let store = BenchStore {
            benchmarks: vec![bench("a", "A car drives."), bench("b", "A ball rolls.")],
            fewshot: vec![example("e", "A stone falls.")],
        };
        let dir = tempfile::tempdir().unwrap();
        store.save(dir.path()).unwrap();
        let loaded = BenchStore::load(dir.path()).unwrap();
        assert_eq!(loaded, store);
        let again = tempfile::tempdir().unwrap();
        loaded.save(again.path()).unwrap();
        assert_eq!(BenchStore::load(again.path()).unwrap(), store);
    }

    #[test]
    fn rejects_overlap_and_duplicates() {
        let store = BenchStore { benchmarks: vec![bench("a", "A car  drives.")], fewshot: vec![example("e", "a car drives.")] };
        assert!(matches!(store.validate(), Err(BenchError::Overlap { .. })));
        let store = BenchStore { benchmarks: vec![bench("a", "x"), bench("a", "y")], fewshot: vec![] };
        assert!(matches!(store.validate(), Err(BenchError::Duplicate(_))));
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(bench("a", "  ").validate().is_err());
        assert!(Benchmark { min_writes: 0, ..bench("a", "q") }.validate().is_err());
        assert!(Benchmark { expected: "<x:=1;> x=1".into(), ..bench("a", "q") }.validate().is_err());
        assert!(Benchmark { expected: "x = = 1".into(), ..bench("a", "q") }.validate().is_err());
        assert!(Benchmark { reference_model: None, ..example("e", "q") }.validate().is_err());
    }
}
