//! Summaries of run results: a CSV table and two static SVG charts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::checker::Outcome;
use crate::pipeline::RunRecord;

/// `(model, mode)`
pub type RowKey = (String, String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub outcome: Outcome,
    pub label: String,
    pub tag: Option<String>,
}

impl Cell {
    fn key(&self) -> (u8, &str, &str, Option<&str>) {
        (self.outcome.rank(), self.outcome.as_str(), self.label.as_str(), self.tag.as_deref())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    /// Best result per benchmark for every `(model, mode)`.
    pub grid: BTreeMap<RowKey, BTreeMap<String, Cell>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryRow {
    pub model: String,
    pub mode: String,
    pub total: usize,
    pub success: usize,
    pub tool_failure: usize,
    pub timeout: usize,
    pub failed: usize,
}

impl SummaryRow {
    pub fn success_rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.success as f64 / self.total as f64
        }
    }
}

pub const CSV_HEADER: &str = "model,mode,benchmarks,success,tool_failure,timeout,failed,success_fraction,success_rate";

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: {detail}")]
    Parse { path: String, line: usize, detail: String },
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn color(o: Outcome) -> &'static str {
    match o {
        Outcome::Success => "#2e7d32",
        Outcome::ToolFailure => "#f9a825",
        Outcome::Timeout => "#ef6c00",
        Outcome::Failed => "#c62828",
    }
}

impl Report {
    /// Duplicate `(model, mode, benchmark)` entries keep their best result,
    /// so the order of records does not matter.
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a RunRecord>) -> Report {
        let mut report = Report::default();
        for r in records {
            let cell = Cell { outcome: r.best, label: r.best_label.clone(), tag: r.failure_tag.clone() };
            let row = report.grid.entry((r.model.clone(), r.mode.as_str().to_string())).or_default();
            match row.get(&r.benchmark) {
                Some(old) if old.key() >= cell.key() => {}
                _ => {
                    row.insert(r.benchmark.clone(), cell);
                }
            }
        }
        report
    }

    pub fn read_jsonl(path: &Path) -> Result<Vec<RunRecord>, ReportError> {
        let name = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| ReportError::Io { path: name.clone(), source })?;
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let r = serde_json::from_str(line)
                .map_err(|e| ReportError::Parse { path: name.clone(), line: i + 1, detail: e.to_string() })?;
            out.push(r);
        }
        Ok(out)
    }

    pub fn benchmarks(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.grid.values().flat_map(|row| row.keys()).collect();
        set.into_iter().cloned().collect()
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        self.grid
            .iter()
            .map(|((model, mode), row)| {
                let count = |o: Outcome| row.values().filter(|c| c.outcome == o).count();
                SummaryRow {
                    model: model.clone(),
                    mode: mode.clone(),
                    total: row.len(),
                    success: count(Outcome::Success),
                    tool_failure: count(Outcome::ToolFailure),
                    timeout: count(Outcome::Timeout),
                    failed: count(Outcome::Failed),
                }
            })
            .collect()
    }

    pub fn csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for r in self.summary() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}/{},{:.4}",
                csv_field(&r.model),
                csv_field(&r.mode),
                r.total,
                r.success,
                r.tool_failure,
                r.timeout,
                r.failed,
                r.success,
                r.total,
                r.success_rate()
            );
        }
        out
    }

    /// Grid with one row per `(model, mode)` and one column per benchmark.
    pub fn heatmap_svg(&self) -> String {
        let benches = self.benchmarks();
        let (cell, label_w, head_h) = (28usize, 220usize, 120usize);
        let width = label_w + cell * benches.len().max(1) + 20;
        let height = head_h + cell * self.grid.len().max(1) + 60;
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"11\">\n"
        );
        let _ = writeln!(s, "<text x=\"10\" y=\"18\" font-size=\"14\">Problem outcome by model</text>");
        for (j, b) in benches.iter().enumerate() {
            let x = label_w + j * cell + cell / 2;
            let _ = writeln!(s, "<text transform=\"translate({x},{}) rotate(-60)\">{}</text>", head_h - 6, xml(b));
        }
        for (i, ((model, mode), row)) in self.grid.iter().enumerate() {
            let y = head_h + i * cell;
            let _ = writeln!(s, "<text x=\"10\" y=\"{}\">{} ({})</text>", y + cell / 2 + 4, xml(model), xml(mode));
            for (j, b) in benches.iter().enumerate() {
                let x = label_w + j * cell;
                let (fill, title) = match row.get(b) {
                    Some(c) => {
                        let tag = c.tag.as_deref().map(|t| format!(" [{t}]")).unwrap_or_default();
                        (color(c.outcome), format!("{b}: {}{tag}", c.label))
                    }
                    None => ("#e0e0e0", format!("{b}: not run")),
                };
                let _ = writeln!(
                    s,
                    "<rect x=\"{x}\" y=\"{y}\" width=\"{}\" height=\"{}\" fill=\"{fill}\" stroke=\"#ffffff\"><title>{}</title></rect>",
                    cell,
                    cell,
                    xml(&title)
                );
            }
        }
        let legend_y = head_h + cell * self.grid.len().max(1) + 20;
        for (k, o) in [Outcome::Success, Outcome::ToolFailure, Outcome::Timeout, Outcome::Failed].into_iter().enumerate() {
            let x = 10 + k * 110;
            let _ = writeln!(s, "<rect x=\"{x}\" y=\"{legend_y}\" width=\"12\" height=\"12\" fill=\"{}\"/>", color(o));
            let _ = writeln!(s, "<text x=\"{}\" y=\"{}\">{}</text>", x + 16, legend_y + 10, o.as_str());
        }
        s.push_str("</svg>\n");
        s
    }

    /// Horizontal bars of the success rate per `(model, mode)`.
    pub fn bars_svg(&self) -> String {
        let rows = self.summary();
        let (bar_h, label_w, bar_w) = (22usize, 220usize, 300usize);
        let height = 40 + bar_h * rows.len().max(1) + 10;
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"11\">\n",
            label_w + bar_w + 80
        );
        let _ = writeln!(s, "<text x=\"10\" y=\"18\" font-size=\"14\">Success rate</text>");
        for (i, r) in rows.iter().enumerate() {
            let y = 34 + i * bar_h;
            let w = (r.success_rate() * bar_w as f64).round() as usize;
            let _ = writeln!(s, "<text x=\"10\" y=\"{}\">{} ({})</text>", y + 14, xml(&r.model), xml(&r.mode));
            let _ = writeln!(s, "<rect x=\"{label_w}\" y=\"{y}\" width=\"{bar_w}\" height=\"{}\" fill=\"#eeeeee\"/>", bar_h - 4);
            let _ = writeln!(s, "<rect x=\"{label_w}\" y=\"{y}\" width=\"{w}\" height=\"{}\" fill=\"#2e7d32\"/>", bar_h - 4);
            let _ = writeln!(
                s,
                "<text x=\"{}\" y=\"{}\">{}/{} ({:.0}%)</text>",
                label_w + bar_w + 6,
                y + 14,
                r.success,
                r.total,
                r.success_rate() * 100.0
            );
        }
        s.push_str("</svg>\n");
        s
    }

    /// Writes `summary.csv`, `heatmap.svg` and `bars.svg` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), ReportError> {
        let io = |p: &Path| {
            let path = p.display().to_string();
            move |source| ReportError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        for (name, body) in [("summary.csv", self.csv()), ("heatmap.svg", self.heatmap_svg()), ("bars.svg", self.bars_svg())] {
            let p = dir.join(name);
            fs::write(&p, body).map_err(io(&p))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::PromptMode;

    fn rec(model: &str, bench: &str, best: Outcome) -> RunRecord {
        RunRecord {
            benchmark: bench.into(),
            model: model.into(),
            mode: PromptMode::MultiShot,
            verdicts: vec![best],
            best,
            best_label: best.as_str().into(),
            failure_tag: None,
            millis: None,
            attempts: vec![],
        }
    }

    #[test]
    fn empty_report_has_header() {
        let r = Report::from_records(&[]);
        assert_eq!(r.csv(), format!("{CSV_HEADER}\n"));
        assert!(r.heatmap_svg().starts_with("<svg"));
    }

    #[test]
    fn duplicates_keep_best() {
        let a = rec("m", "p1", Outcome::Failed);
        let b = rec("m", "p1", Outcome::Success);
        assert_eq!(Report::from_records([&a, &b]), Report::from_records([&b, &a]));
        let row = &Report::from_records([&a, &b]).grid[&("m".to_string(), "multi-shot".to_string())];
        assert_eq!(row["p1"].outcome, Outcome::Success);
    }

    #[test]
    fn csv_counts() {
        let rs = [rec("m", "p1", Outcome::Success), rec("m", "p2", Outcome::Timeout), rec("m", "p3", Outcome::Failed)];
        let csv = Report::from_records(&rs).csv();
        assert_eq!(csv.lines().nth(1).unwrap(), "m,multi-shot,3,1,0,1,1,1/3,0.3333");
    }

    #[test]
    fn escapes() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(xml("<a&b>"), "&lt;a&amp;b&gt;");
    }
}
