//! The `dglform` command line.
//!
//! Exit codes: 0 success, 1 the input was rejected (parse error, failed
//! check, tool failure), 2 usage or configuration error, 3 internal error.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::BenchStore;
use crate::checker::{CheckSpec, Checker};
use crate::config::Config;
use crate::ir::Formula;
use crate::parser::{parse_formula, parse_formula_bytes, parse_game, print_formula, Diagnostic};
use crate::pipeline::{run_benchmark, HttpTransport, LlmTransport, PipelineConfig, PromptMode, ReplayTransport};
use crate::report::Report;
use crate::symexec::{eliminate_modalities, wp_box, wp_diamond};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dglform", version, about = "Check differential game logic models of kinematics problems")]
pub struct Cli {
    /// Settings file (defaults to ./dgl.toml when present).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Solver command line, e.g. "z3 -in".
    #[arg(long, global = true)]
    pub solver: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    MultiShot,
    ZeroShot,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TransportArg {
    Live,
    Replay,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a formula file and print it back, or report diagnostics.
    Parse {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the weakest precondition of a formula, or of --game against --post.
    Wp {
        file: Option<PathBuf>,
        #[arg(long, requires = "post", conflicts_with = "file")]
        game: Option<String>,
        #[arg(long, requires = "game")]
        post: Option<String>,
        /// With --game: use the box modality instead of the diamond.
        #[arg(long = "box", requires = "game")]
        demon: bool,
        #[arg(long)]
        json: bool,
    },
    /// Check a model against an expected solution.
    Check {
        model: PathBuf,
        /// Expected solution, as a formula or a path to a file holding one.
        #[arg(long)]
        expected: String,
        #[arg(long, default_value_t = 1)]
        min_writes: usize,
        /// Seconds, shared by all solver calls.
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(long)]
        json: bool,
        /// Stage trace as JSON lines on stderr.
        #[arg(long)]
        verbose: bool,
    },
    /// Run the autoformalization pipeline over a benchmark directory.
    Run {
        bench_dir: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        max_repairs: Option<usize>,
        #[arg(long, value_enum, default_value = "multi-shot")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "live")]
        transport: TransportArg,
        /// Transcript for the replay transport.
        #[arg(long, required_if_eq("transport", "replay"))]
        replay: Option<PathBuf>,
        /// Model id sent to the endpoint and recorded in results.
        #[arg(long)]
        model: Option<String>,
        /// Results file; records are appended.
        #[arg(long, default_value = "results.jsonl")]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        /// Seconds per check.
        #[arg(long)]
        timeout: Option<f64>,
        /// Only these benchmark ids.
        #[arg(long)]
        only: Vec<String>,
    },
    /// Summarize results files into summary.csv, heatmap.svg and bars.svg.
    Report {
        #[arg(required = true)]
        results: Vec<PathBuf>,
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let config = match Config::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let ctx = Ctx { config, solver: cli.solver };
    match cli.command {
        Command::Parse { file, json } => cmd_parse(&file, json, out, err),
        Command::Wp { file, game, post, demon, json } => cmd_wp(file.as_deref(), game.zip(post), demon, json, out, err),
        Command::Check { model, expected, min_writes, timeout, json, verbose } => {
            let opts = CheckOpts { expected, min_writes, timeout, json, verbose };
            cmd_check(&ctx, &model, &opts, out, err)
        }
        Command::Run { bench_dir, samples, max_repairs, mode, transport, replay, model, out: results, workers, timeout, only } => {
            let opts = RunOpts { samples, max_repairs, mode, transport, replay, model, results, workers, timeout, only };
            cmd_run(&ctx, &bench_dir, &opts, out, err)
        }
        Command::Report { results, out: dir } => cmd_report(&results, &dir, out, err),
    }
}

pub struct Ctx {
    pub config: Config,
    pub solver: Option<String>,
}

impl Ctx {
    fn checker(&self) -> Checker {
        Checker::new(self.config.solver(self.solver.as_deref()))
    }

    fn timeout(&self, flag: Option<f64>) -> Result<Duration, String> {
        match flag {
            Some(s) if s.is_finite() && s > 0.0 => Ok(Duration::from_secs_f64(s)),
            Some(s) => Err(format!("invalid timeout {s}")),
            None => Ok(Duration::from_millis(self.config.solver.timeout_ms.unwrap_or(crate::solver::DEFAULT_TIMEOUT_MS))),
        }
    }
}

fn read_bytes(path: &Path, err: &mut dyn Write) -> Option<Vec<u8>> {
    match std::fs::read(path) {
        Ok(b) => Some(b),
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            None
        }
    }
}

fn report_diagnostics(path: &str, diags: &[Diagnostic], err: &mut dyn Write) {
    for d in diags {
        let _ = writeln!(err, "{path}:{}:{}: {}", d.line, d.column, d.message);
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

pub fn cmd_parse(file: &Path, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(bytes) = read_bytes(file, err) else { return EXIT_USAGE };
    match parse_formula_bytes(&bytes) {
        Ok(f) => {
            let printed = print_formula(&f);
            let _ = if json {
                writeln!(out, "{}", to_json(&serde_json::json!({ "ok": true, "formula": printed })))
            } else {
                writeln!(out, "{printed}")
            };
            EXIT_OK
        }
        Err(diags) => {
            if json {
                let _ = writeln!(out, "{}", to_json(&serde_json::json!({ "ok": false, "diagnostics": diags })));
            } else {
                report_diagnostics(&file.display().to_string(), &diags, err);
            }
            EXIT_REJECTED
        }
    }
}

pub fn cmd_wp(
    file: Option<&Path>,
    game_post: Option<(String, String)>,
    demon: bool,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let result = match (file, game_post) {
        (_, Some((game, post))) => {
            let g = match parse_game(&game) {
                Ok(g) => g,
                Err(d) => {
                    report_diagnostics("--game", &d, err);
                    return EXIT_REJECTED;
                }
            };
            let p = match parse_formula(&post) {
                Ok(p) => p,
                Err(d) => {
                    report_diagnostics("--post", &d, err);
                    return EXIT_REJECTED;
                }
            };
            if demon {
                wp_box(&g, &p)
            } else {
                wp_diamond(&g, &p)
            }
        }
        (Some(path), None) => {
            let Some(bytes) = read_bytes(path, err) else { return EXIT_USAGE };
            match parse_formula_bytes(&bytes) {
                Ok(f) => eliminate_modalities(&f),
                Err(d) => {
                    report_diagnostics(&path.display().to_string(), &d, err);
                    return EXIT_REJECTED;
                }
            }
        }
        (None, None) => {
            let _ = writeln!(err, "error: give a formula file or --game with --post");
            return EXIT_USAGE;
        }
    };
    match result {
        Ok(wp) => {
            let printed = print_formula(&wp);
            let _ = if json {
                writeln!(out, "{}", to_json(&serde_json::json!({ "ok": true, "wp": printed })))
            } else {
                writeln!(out, "{printed}")
            };
            EXIT_OK
        }
        Err(reason) => {
            if json {
                let _ = writeln!(out, "{}", to_json(&serde_json::json!({ "ok": false, "tool_failure": reason })));
            }
            let _ = writeln!(err, "tool_failure:{}: {}", reason.kind, reason.detail);
            EXIT_REJECTED
        }
    }
}

pub struct CheckOpts {
    pub expected: String,
    pub min_writes: usize,
    pub timeout: Option<f64>,
    pub json: bool,
    pub verbose: bool,
}

fn expected_formula(text: &str, err: &mut dyn Write) -> Option<Formula> {
    let path = Path::new(text);
    let source = if path.is_file() {
        match std::fs::read_to_string(path) {
            Ok(s) => s,
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", path.display());
                return None;
            }
        }
    } else {
        text.to_string()
    };
    match parse_formula(&source) {
        Ok(f) if f.is_modality_free() => Some(f),
        Ok(_) => {
            let _ = writeln!(err, "error: the expected solution must not contain modalities");
            None
        }
        Err(d) => {
            report_diagnostics("--expected", &d, err);
            None
        }
    }
}

pub fn cmd_check(ctx: &Ctx, model: &Path, opts: &CheckOpts, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let timeout = match ctx.timeout(opts.timeout) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let Some(expected) = expected_formula(&opts.expected, err) else { return EXIT_USAGE };
    let Some(bytes) = read_bytes(model, err) else { return EXIT_USAGE };
    let formula = match parse_formula_bytes(&bytes) {
        Ok(f) => f,
        Err(d) => {
            report_diagnostics(&model.display().to_string(), &d, err);
            if opts.json {
                let _ = writeln!(out, "{}", to_json(&serde_json::json!({ "verdict": "syntax_error", "diagnostics": d })));
            } else {
                let _ = writeln!(out, "failed:syntax");
            }
            return EXIT_REJECTED;
        }
    };
    let spec = CheckSpec::new(expected, opts.min_writes).with_timeout(timeout);
    let report = ctx.checker().check(&formula, &spec);
    if opts.verbose {
        let _ = write!(err, "{}", report.trace_jsonl());
    }
    for w in &report.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    if opts.json {
        let _ = writeln!(out, "{}", to_json(&report));
    } else {
        let _ = writeln!(out, "{}", report.verdict.label());
        if let crate::checker::CheckVerdict::Failed { detail, counterexample, .. } = &report.verdict {
            let _ = writeln!(err, "{detail}");
            if let Some(cex) = counterexample {
                let pairs: Vec<_> = cex.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                let _ = writeln!(err, "counterexample: {}", pairs.join(", "));
            }
        }
        if let Some(d) = &report.directional {
            let _ = writeln!(err, "directional: {}", to_json(d));
        }
    }
    match &report.verdict {
        crate::checker::CheckVerdict::Success => EXIT_OK,
        crate::checker::CheckVerdict::ToolFailure { reason } if reason.detail.starts_with("solver error") => {
            let _ = writeln!(err, "error: {}", reason.detail);
            EXIT_INTERNAL
        }
        _ => EXIT_REJECTED,
    }
}

pub struct RunOpts {
    pub samples: Option<usize>,
    pub max_repairs: Option<usize>,
    pub mode: ModeArg,
    pub transport: TransportArg,
    pub replay: Option<PathBuf>,
    pub model: Option<String>,
    pub results: PathBuf,
    pub workers: Option<usize>,
    pub timeout: Option<f64>,
    pub only: Vec<String>,
}

pub fn cmd_run(ctx: &Ctx, bench_dir: &Path, opts: &RunOpts, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let usage = |err: &mut dyn Write, msg: String| {
        let _ = writeln!(err, "error: {msg}");
        EXIT_USAGE
    };
    let mut config = PipelineConfig::default();
    config.samples = opts.samples.or(ctx.config.run.samples).unwrap_or(config.samples);
    config.max_repairs = opts.max_repairs.or(ctx.config.run.max_repairs).unwrap_or(config.max_repairs);
    config.workers = opts.workers.or(ctx.config.run.workers).unwrap_or(config.workers);
    config.mode = match opts.mode {
        ModeArg::MultiShot => PromptMode::MultiShot,
        ModeArg::ZeroShot => PromptMode::ZeroShot,
    };
    if let Some(m) = opts.model.clone().or(ctx.config.llm.model.clone()) {
        config.params.model = m;
    }
    if let Some(t) = ctx.config.llm.temperature {
        config.params.temperature = t;
    }
    config.params.max_tokens = ctx.config.llm.max_tokens;
    config.check_timeout = match ctx.timeout(opts.timeout) {
        Ok(t) => t,
        Err(e) => return usage(err, e),
    };
    if config.samples == 0 {
        return usage(err, "--samples must be at least 1".into());
    }

    let transport: Box<dyn LlmTransport> = match opts.transport {
        TransportArg::Live => match HttpTransport::from_env() {
            Ok(t) => Box::new(t),
            Err(e) => return usage(err, e.to_string()),
        },
        TransportArg::Replay => {
            let Some(path) = &opts.replay else { return usage(err, "--replay is required".into()) };
            config.timing = false;
            match ReplayTransport::from_file(path) {
                Ok(t) => Box::new(t),
                Err(e) => return usage(err, e.to_string()),
            }
        }
    };
    let store = match BenchStore::load(bench_dir) {
        Ok(s) => s,
        Err(e) => return usage(err, e.to_string()),
    };
    let selected: Vec<_> = store
        .benchmarks
        .iter()
        .filter(|b| opts.only.is_empty() || opts.only.contains(&b.id))
        .collect();
    if let Some(missing) = opts.only.iter().find(|id| store.get(id).is_none()) {
        return usage(err, format!("no benchmark `{missing}` in {}", bench_dir.display()));
    }
    let mut file = match OpenOptions::new().create(true).append(true).open(&opts.results) {
        Ok(f) => f,
        Err(e) => return usage(err, format!("{}: {e}", opts.results.display())),
    };
    let checker = ctx.checker();
    for bench in selected {
        let record = run_benchmark(bench, &store.fewshot, transport.as_ref(), &checker, &config);
        if let Err(e) = writeln!(file, "{}", to_json(&record)) {
            let _ = writeln!(err, "error: {}: {e}", opts.results.display());
            return EXIT_INTERNAL;
        }
        let verdicts: Vec<_> = record.verdicts.iter().map(|v| v.as_str()).collect();
        let _ = writeln!(out, "{}\t{}\t[{}]", record.benchmark, record.best_label, verdicts.join(" "));
    }
    EXIT_OK
}

pub fn cmd_report(results: &[PathBuf], dir: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut records = Vec::new();
    for path in results {
        match Report::read_jsonl(path) {
            Ok(r) => records.extend(r),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
        }
    }
    let report = Report::from_records(&records);
    if let Err(e) = report.write(dir) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INTERNAL;
    }
    let _ = write!(out, "{}", report.csv());
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("dglform").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&[]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
        assert_eq!(call(&["parse", "/no/such/file.dgl"]).0, EXIT_USAGE);
        assert_eq!(call(&["run", "x", "--transport", "replay"]).0, EXIT_USAGE);
    }

    #[test]
    fn parse_command() {
        let dir = tempfile::tempdir().unwrap();
        let good = dir.path().join("good.dgl");
        std::fs::write(&good, "x>0 -> <x:=x+1;> x>1").unwrap();
        let (code, out, _) = call(&["parse", good.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.trim(), "x > 0 -> <x := x + 1;> x > 1");
        let bad = dir.path().join("bad.dgl");
        std::fs::write(&bad, "<x:=1;> x\u{2265}1").unwrap();
        let (code, _, err) = call(&["parse", bad.to_str().unwrap()]);
        assert_eq!(code, EXIT_REJECTED);
        assert!(err.contains("unsupported Unicode character (possibly \u{2265})"));
        let (code, out, _) = call(&["parse", "--json", bad.to_str().unwrap()]);
        assert_eq!(code, EXIT_REJECTED);
        assert!(out.contains("\"unicode_char\""));
    }

    #[test]
    fn wp_command() {
        let (code, out, _) = call(&["wp", "--game", "?t=2*th; ?x=2*dh", "--post", "dvavg=x"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.trim(), "t = 2*th & x = 2*dh & dvavg = x");
        let (code, _, err) = call(&["wp", "--game", "{x:=x+1;}*", "--post", "x>0"]);
        assert_eq!(code, EXIT_REJECTED);
        assert!(err.starts_with("tool_failure:loop_unsupported"));
        let (code, out, _) = call(&["wp", "--box", "--game", "{x:=1; ++ x:=2;}", "--post", "x>0"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.trim(), "1 > 0 & 2 > 0");
    }

    #[test]
    fn live_without_key_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        std::env::remove_var(crate::pipeline::API_KEY_ENV);
        let (code, _, err) = call(&["run", dir.path().to_str().unwrap(), "--out", "/dev/null"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("DGL_LLM_API_KEY"));
    }
}
