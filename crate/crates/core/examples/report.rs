//! Summaries and charts from run records: a CSV table, a problem-by-model
//! heatmap and a bar chart of success rates.

use dglform::checker::Outcome;
use dglform::pipeline::{PromptMode, RunRecord};
use dglform::report::Report;

fn record(model: &str, mode: PromptMode, bench: &str, best: Outcome) -> RunRecord {
    RunRecord {
        benchmark: bench.into(),
        model: model.into(),
        mode,
        verdicts: vec![best],
        best,
        best_label: best.as_str().into(),
        failure_tag: None,
        millis: None,
        attempts: vec![],
    }
}

fn main() {
    use Outcome::*;
    let mut records = Vec::new();
    let grid = [
        ("model-a", PromptMode::MultiShot, [Success, Success, ToolFailure, Failed]),
        ("model-a", PromptMode::ZeroShot, [Success, Failed, Timeout, Failed]),
        ("model-b", PromptMode::MultiShot, [Success, Failed, Failed, Failed]),
    ];
    for (model, mode, outcomes) in grid {
        for (i, o) in outcomes.into_iter().enumerate() {
            records.push(record(model, mode, &format!("problem-{i}"), o));
        }
    }
    let report = Report::from_records(&records);
    print!("{}", report.csv());

    let out = std::env::args().nth(1).unwrap_or_else(|| "report".into());
    report.write(std::path::Path::new(&out)).unwrap();
    println!("wrote {out}/summary.csv, {out}/heatmap.svg, {out}/bars.svg");
}
