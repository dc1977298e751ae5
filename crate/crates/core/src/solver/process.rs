//! Running an external SMT solver as a subprocess under a wall-clock limit.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::model::parse_model;
use super::smtlib::validity_script;
use crate::ir::{Formula, FreeVars, Ident};

pub const DEFAULT_SOLVER: &str = "z3 -in";
pub const SOLVER_ENV: &str = "DGL_SOLVER";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    /// Script piped through stdin; the solver is driven interactively.
    #[default]
    Stdin,
    /// Script written to a temporary file whose path is appended to the command.
    File,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub command: Vec<String>,
    #[serde(default)]
    pub input: InputMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::from_command_line(DEFAULT_SOLVER)
    }
}

impl SolverConfig {
    pub fn from_command_line(line: &str) -> Self {
        SolverConfig { command: line.split_whitespace().map(str::to_string).collect(), input: InputMode::Stdin }
    }

    /// `DGL_SOLVER` when set, the default otherwise.
    pub fn from_env() -> Self {
        match std::env::var(SOLVER_ENV) {
            Ok(line) if !line.trim().is_empty() => SolverConfig::from_command_line(&line),
            _ => SolverConfig::default(),
        }
    }

    pub fn with_input(mut self, input: InputMode) -> Self {
        self.input = input;
        self
    }

    /// True when the solver starts and answers a trivial query.
    pub fn is_available(&self) -> bool {
        let run = run_script(self, "(set-logic ALL)\n(assert true)\n(check-sat)\n", Duration::from_secs(10));
        matches!(run.answer, Some(Answer::Sat))
    }
}

pub const DEFAULT_TIMEOUT_MS: u64 = 180_000;

#[derive(Debug, Clone)]
pub struct SolverQuery {
    pub goal: Formula,
    pub timeout_ms: u64,
    /// Declared as reals; always includes the goal's free variables.
    pub declared_vars: BTreeSet<Ident>,
}

impl SolverQuery {
    pub fn new(goal: Formula) -> Self {
        let declared_vars = goal.free_vars();
        SolverQuery { goal, timeout_ms: DEFAULT_TIMEOUT_MS, declared_vars }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout_ms = timeout.as_millis().try_into().unwrap_or(u64::MAX);
        self
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms)
    }

    pub fn script(&self) -> String {
        validity_script(&self.goal, &self.declared_vars)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SolverVerdict {
    Valid,
    Invalid { counterexample: Option<BTreeMap<String, String>> },
    Unknown,
    TimedOut,
    ProcessError { detail: String },
}

impl SolverVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, SolverVerdict::Valid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Sat,
    Unsat,
    Unknown,
}

/// Everything observed about one solver invocation.
#[derive(Debug, Clone)]
pub struct SolverRun {
    pub pid: Option<u32>,
    pub elapsed: Duration,
    pub answer: Option<Answer>,
    pub timed_out: bool,
    /// Output following the answer line (the model when the answer is sat).
    pub model_text: String,
    pub errors: Vec<String>,
    pub spawn_error: Option<String>,
}

pub fn check_validity(config: &SolverConfig, query: &SolverQuery) -> SolverVerdict {
    let run = run_script(config, &query.script(), query.timeout());
    verdict_of(&run)
}

pub fn verdict_of(run: &SolverRun) -> SolverVerdict {
    if let Some(err) = &run.spawn_error {
        return SolverVerdict::ProcessError { detail: err.clone() };
    }
    if run.timed_out {
        return SolverVerdict::TimedOut;
    }
    match run.answer {
        Some(Answer::Unsat) => SolverVerdict::Valid,
        Some(Answer::Sat) => {
            let model = parse_model(&run.model_text);
            SolverVerdict::Invalid { counterexample: (!model.is_empty()).then_some(model) }
        }
        Some(Answer::Unknown) => SolverVerdict::Unknown,
        None => {
            let detail = if run.errors.is_empty() { "solver produced no answer".to_string() } else { run.errors.join("; ") };
            SolverVerdict::ProcessError { detail }
        }
    }
}

fn parse_answer(line: &str) -> Option<Answer> {
    match line.trim() {
        "sat" => Some(Answer::Sat),
        "unsat" => Some(Answer::Unsat),
        "unknown" => Some(Answer::Unknown),
        _ => None,
    }
}

fn spawn_reader<R: Read + Send + 'static>(stream: R) -> Receiver<String> {
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for line in BufReader::new(stream).lines() {
            let Ok(line) = line else { break };
            if tx.send(line).is_err() {
                break;
            }
        }
    });
    rx
}

fn remaining(deadline: Instant) -> Duration {
    deadline.saturating_duration_since(Instant::now())
}

fn kill_and_reap(child: &mut Child) {
    let _ = child.kill();
    let _ = child.wait();
}

/// Waits for exit until the deadline, then kills. The child is always reaped.
fn finish(child: &mut Child, deadline: Instant) {
    loop {
        match child.try_wait() {
            Ok(Some(_)) => return,
            Ok(None) if Instant::now() < deadline => thread::sleep(Duration::from_millis(5)),
            _ => return kill_and_reap(child),
        }
    }
}

fn send(stdin: &mut Option<ChildStdin>, text: &str) {
    if let Some(pipe) = stdin.as_mut() {
        if pipe.write_all(text.as_bytes()).and_then(|_| pipe.flush()).is_err() {
            *stdin = None;
        }
    }
}

/// Runs `script`, which must end in `(check-sat)`. On `sat` the model is
/// requested as well. The process is killed and reaped if `timeout` elapses.
pub fn run_script(config: &SolverConfig, script: &str, timeout: Duration) -> SolverRun {
    let start = Instant::now();
    let deadline = start + timeout;
    let mut run = SolverRun {
        pid: None,
        elapsed: Duration::ZERO,
        answer: None,
        timed_out: false,
        model_text: String::new(),
        errors: Vec::new(),
        spawn_error: None,
    };
    let Some((program, args)) = config.command.split_first() else {
        run.spawn_error = Some("empty solver command".into());
        return run;
    };

    let mut cmd = Command::new(program);
    cmd.args(args).stdout(Stdio::piped()).stderr(Stdio::piped());
    let _file_guard = match config.input {
        InputMode::Stdin => {
            cmd.stdin(Stdio::piped());
            None
        }
        InputMode::File => {
            let file = tempfile::Builder::new().suffix(".smt2").tempfile().and_then(|mut f| {
                f.write_all(script.as_bytes())?;
                f.write_all(b"(get-model)\n")?;
                f.flush()?;
                Ok(f)
            });
            match file {
                Ok(f) => {
                    cmd.arg(f.path()).stdin(Stdio::null());
                    Some(f)
                }
                Err(e) => {
                    run.spawn_error = Some(format!("cannot write solver input: {e}"));
                    return run;
                }
            }
        }
    };

    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) => {
            run.spawn_error = Some(format!("cannot start solver `{}`: {e}", config.command.join(" ")));
            return run;
        }
    };
    run.pid = Some(child.id());
    let lines = spawn_reader(child.stdout.take().expect("piped stdout"));
    let stderr = spawn_reader(child.stderr.take().expect("piped stderr"));
    let mut stdin = child.stdin.take();
    send(&mut stdin, script);

    // Read up to the answer line.
    loop {
        match lines.recv_timeout(remaining(deadline)) {
            Ok(line) => {
                if let Some(a) = parse_answer(&line) {
                    run.answer = Some(a);
                    break;
                }
                if line.trim_start().starts_with("(error") {
                    run.errors.push(line.trim().to_string());
                }
            }
            Err(RecvTimeoutError::Timeout) => {
                run.timed_out = true;
                drop(stdin);
                kill_and_reap(&mut child);
                run.elapsed = start.elapsed();
                return run;
            }
            Err(RecvTimeoutError::Disconnected) => break,
        }
    }

    if run.answer == Some(Answer::Sat) {
        send(&mut stdin, "(get-model)\n(exit)\n");
    } else {
        send(&mut stdin, "(exit)\n");
    }
    drop(stdin);

    if run.answer == Some(Answer::Sat) {
        let mut model = Vec::new();
        while let Ok(line) = lines.recv_timeout(remaining(deadline)) {
            model.push(line);
        }
        run.model_text = model.join("\n");
    }
    finish(&mut child, deadline);
    if run.answer.is_none() {
        while let Ok(line) = stderr.recv_timeout(Duration::from_millis(50)) {
            if !line.trim().is_empty() {
                run.errors.push(line.trim().to_string());
            }
        }
    }
    run.elapsed = start.elapsed();
    run
}
