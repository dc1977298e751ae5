//! Run the shipped benchmarks against a recorded transcript instead of a live
//! model, two samples each, and print one JSON record per benchmark.
//!
//! Needs z3 on PATH (or `DGL_SOLVER`).

use std::path::PathBuf;

use dglform::bench::BenchStore;
use dglform::checker::Checker;
use dglform::pipeline::{run_benchmark, PipelineConfig, ReplayTransport};
use dglform::solver::SolverConfig;

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let store = BenchStore::load(&root.join("benchmarks")).unwrap();
    let transport = ReplayTransport::from_file(&root.join("fixtures/replay/suite.jsonl")).unwrap();
    let checker = Checker::new(SolverConfig::from_env());
    let config = PipelineConfig { samples: 2, timing: false, ..PipelineConfig::default() };

    for bench in &store.benchmarks {
        let record = run_benchmark(bench, &store.fewshot, &transport, &checker, &config);
        for (i, a) in record.attempts.iter().enumerate() {
            let last = a.proposals.last().map(|p| p.text.as_str()).unwrap_or("");
            eprintln!("{} #{i}: {} after {} proposal(s)\n  {}", bench.id, a.verdict.label(), a.proposals.len(), last.replace('\n', "\n  "));
        }
        let verdicts: Vec<_> = record.verdicts.iter().map(|v| v.as_str()).collect();
        println!("{:<20} {:<32} {:?}", record.benchmark, record.best_label, verdicts);
    }
}
