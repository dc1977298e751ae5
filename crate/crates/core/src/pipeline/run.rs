//! Attempts, best-of-N sampling and benchmark runs.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::prompts::{build_propose_prompt, build_revise_prompt, default_repair_examples, extract_formula, FailedProposal, RepairExample};
use super::transport::{LlmTransport, Message, Params};
use crate::bench::Benchmark;
use crate::checker::{failure_tag, CheckVerdict, Checker, Outcome};
use crate::parser::{feedback, parse_formula, Diagnostic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptMode {
    MultiShot,
    ZeroShot,
}

impl PromptMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PromptMode::MultiShot => "multi-shot",
            PromptMode::ZeroShot => "zero-shot",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub samples: usize,
    pub max_repairs: usize,
    pub mode: PromptMode,
    pub params: Params,
    pub check_timeout: Duration,
    /// Concurrent attempts per benchmark. With an in-order replay transcript
    /// only a single worker gives a reproducible assignment of responses.
    pub workers: usize,
    /// Record wall-clock durations (off for reproducible output).
    pub timing: bool,
    /// Feed non-equivalence verdicts back into the revise loop.
    pub semantic_repair: bool,
    pub repair_examples: Vec<RepairExample>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            samples: 5,
            max_repairs: 3,
            mode: PromptMode::MultiShot,
            params: Params::default(),
            check_timeout: Duration::from_secs(180),
            workers: 1,
            timing: true,
            semantic_repair: false,
            repair_examples: default_repair_examples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proposal {
    pub text: String,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exchange {
    pub request: Vec<Message>,
    pub response: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttemptVerdict {
    Checked { verdict: CheckVerdict },
    SyntaxExhausted,
    TransportError { detail: String },
}

impl AttemptVerdict {
    /// Syntax exhaustion and transport errors count as failures.
    pub fn outcome(&self) -> Outcome {
        match self {
            AttemptVerdict::Checked { verdict } => verdict.outcome(),
            AttemptVerdict::SyntaxExhausted | AttemptVerdict::TransportError { .. } => Outcome::Failed,
        }
    }

    pub fn label(&self) -> String {
        match self {
            AttemptVerdict::Checked { verdict } => verdict.label(),
            AttemptVerdict::SyntaxExhausted => "failed:syntax_exhausted".into(),
            AttemptVerdict::TransportError { .. } => "failed:transport".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub proposals: Vec<Proposal>,
    pub verdict: AttemptVerdict,
    pub transcript: Vec<Exchange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

fn millis(d: Duration) -> u64 {
    d.as_millis().try_into().unwrap_or(u64::MAX)
}

/// Propose, then revise on parse errors up to `max_repairs` times, then check.
pub fn run_attempt(
    bench: &Benchmark,
    examples: &[Benchmark],
    transport: &dyn LlmTransport,
    checker: &Checker,
    config: &PipelineConfig,
) -> Attempt {
    let start = Instant::now();
    let examples = match config.mode {
        PromptMode::MultiShot => examples,
        PromptMode::ZeroShot => &[],
    };
    let mut proposals = Vec::new();
    let mut transcript = Vec::new();
    let mut history: Vec<FailedProposal> = Vec::new();
    let finish = |proposals, verdict, transcript| Attempt {
        proposals,
        verdict,
        transcript,
        millis: config.timing.then(|| millis(start.elapsed())),
    };

    let spec = match bench.check_spec(config.check_timeout) {
        Ok(s) => s,
        Err(e) => {
            return finish(proposals, AttemptVerdict::TransportError { detail: format!("benchmark unusable: {e}") }, transcript)
        }
    };

    loop {
        let request = if history.is_empty() {
            build_propose_prompt(&bench.question, examples)
        } else {
            build_revise_prompt(&bench.question, &history, &config.repair_examples)
        };
        let response = transport.send(&request, &config.params);
        transcript.push(Exchange { request, response: response.as_ref().ok().cloned() });
        let completion = match response {
            Ok(c) => c,
            Err(e) => return finish(proposals, AttemptVerdict::TransportError { detail: e.to_string() }, transcript),
        };
        let text = extract_formula(&completion);
        match parse_formula(&text) {
            Err(diagnostics) => {
                history.push(FailedProposal { text: text.clone(), feedback: feedback(&diagnostics) });
                proposals.push(Proposal { text, diagnostics });
                if proposals.len() > config.max_repairs {
                    return finish(proposals, AttemptVerdict::SyntaxExhausted, transcript);
                }
            }
            Ok(model) => {
                proposals.push(Proposal { text: text.clone(), diagnostics: Vec::new() });
                let verdict = checker.check(&model, &spec).verdict;
                let retry = config.semantic_repair
                    && matches!(verdict, CheckVerdict::Failed { .. })
                    && proposals.len() <= config.max_repairs;
                if !retry {
                    return finish(proposals, AttemptVerdict::Checked { verdict }, transcript);
                }
                let CheckVerdict::Failed { detail, .. } = &verdict else { unreachable!() };
                history.push(FailedProposal { text, feedback: format!("{}: {detail}", verdict.label()) });
            }
        }
    }
}

/// Index of the best outcome; ties go to the earliest.
pub fn best_index(outcomes: &[Outcome]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if best.is_none_or(|b| o.rank() > outcomes[b].rank()) {
            best = Some(i);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub benchmark: String,
    pub model: String,
    pub mode: PromptMode,
    /// Outcome of every sample, in order.
    pub verdicts: Vec<Outcome>,
    pub best: Outcome,
    pub best_label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
    #[serde(default)]
    pub attempts: Vec<Attempt>,
}

/// `config.samples` independent attempts, reduced to the best.
pub fn run_benchmark(
    bench: &Benchmark,
    examples: &[Benchmark],
    transport: &dyn LlmTransport,
    checker: &Checker,
    config: &PipelineConfig,
) -> RunRecord {
    let start = Instant::now();
    let n = config.samples;
    let slots: Mutex<Vec<Option<Attempt>>> = Mutex::new(vec![None; n]);
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        if i >= n {
            break;
        }
        let a = run_attempt(bench, examples, transport, checker, config);
        slots.lock().expect("attempt slots")[i] = Some(a);
    };
    let workers = config.workers.clamp(1, n.max(1));
    if workers == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(work);
            }
        });
    }
    let attempts: Vec<Attempt> = slots.into_inner().expect("attempt slots").into_iter().flatten().collect();
    let verdicts: Vec<Outcome> = attempts.iter().map(|a| a.verdict.outcome()).collect();
    let best = best_index(&verdicts);
    let (best_outcome, best_label, tag) = match best {
        Some(i) => {
            let v = &attempts[i].verdict;
            let tag = match v {
                AttemptVerdict::Checked { verdict } => failure_tag(verdict, &bench.tags).map(|t| t.as_str().to_string()),
                _ => None,
            };
            (verdicts[i], v.label(), tag)
        }
        None => (Outcome::Failed, "failed:no_samples".into(), None),
    };
    RunRecord {
        benchmark: bench.id.clone(),
        model: config.params.model.clone(),
        mode: config.mode,
        verdicts,
        best: best_outcome,
        best_label,
        failure_tag: tag,
        millis: config.timing.then(|| millis(start.elapsed())),
        attempts,
    }
}
