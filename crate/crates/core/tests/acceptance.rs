//! One line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use dglform::checker::Outcome;
use dglform::cli;
use dglform::ir::{subst_term, Formula, Game, Term};
use dglform::parser::{parse_formula, parse_formula_bytes, print_formula, DiagnosticCode};
use dglform::pipeline::{best_index, run_attempt, AttemptVerdict, PipelineConfig, PromptMode, ReplayTransport, RunRecord};
use dglform::poly::Poly;
use dglform::solver::{check_validity, SolverQuery, SolverVerdict};
use dglform::symexec::{solve_ode, wp_diamond};
use rand::RngExt;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(std::iter::once("dglform").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn check_fixture(model: &str, extra: &[&str]) -> (i32, String, String) {
    let m = fixture(model);
    let e = fixture("mean_velocity.expected");
    let mut args = vec!["check", p(&m), "--expected", p(&e), "--min-writes", "2"];
    args.extend_from_slice(extra);
    call(&args)
}

fn golden_wp() -> Verdict {
    let solver = solver().ok_or("no SMT solver available")?;
    let start = Instant::now();
    let (code, out, err) = call(&["wp", "--game", "?t=2*th; ?x=2*dh", "--post", "dvavg=x"]);
    ensure!(code == 0, "wp exited {code}: {err}");
    let wp = parse_formula(out.trim()).map_err(|d| format!("{d:?}"))?;
    let expected = parse_formula("x=dvavg & t=2*th & x=2*dh").unwrap();
    let goal = Formula::equiv(wp, expected);
    let verdict = check_validity(&solver, &SolverQuery::new(goal).with_timeout(Duration::from_secs(5)));
    let elapsed = start.elapsed();
    ensure!(verdict == SolverVerdict::Valid, "equivalence query returned {verdict:?}");
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!("`{}` in {elapsed:.2?}", out.trim()))
}

fn exploit_detection() -> Verdict {
    solver().ok_or("no SMT solver available")?;
    let start = Instant::now();
    let (code, out, _) = check_fixture("model1.dgl", &[]);
    ensure!(code == 1 && out.trim() == "failed:not_equivalent", "got `{}` (exit {code})", out.trim());
    let (_, json, _) = check_fixture("model1.dgl", &["--json"]);
    let v: serde_json::Value = serde_json::from_str(&json).map_err(|e| e.to_string())?;
    let standalone = &v["directional"]["wp_valid_standalone"]["verdict"];
    ensure!(standalone == "valid", "wp_valid_standalone = {standalone}");
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(180), "took {elapsed:?}");
    Ok(format!("failed:not_equivalent, wp valid standalone, {elapsed:.2?}"))
}

fn repaired_model() -> Verdict {
    solver().ok_or("no SMT solver available")?;
    let start = Instant::now();
    let (code, out, err) = check_fixture("model2.dgl", &[]);
    ensure!(code == 0 && out.trim() == "success", "got `{}` (exit {code}): {err}", out.trim());
    Ok(format!("success in {:.2?}", start.elapsed()))
}

fn stasis() -> Verdict {
    let text = fixture_text("stasis.dgl");
    ensure!(text.contains("<?true;> vavg = 2*v0*(v1+v2)/(2*v0+v1+v2)"), "unexpected fixture");
    let (code, out, _) = check_fixture("stasis.dgl", &[]);
    ensure!(code == 1 && out.trim() == "failed:stasis", "got `{}`", out.trim());
    Ok("failed:stasis".into())
}

fn tool_failures() -> Verdict {
    solver().ok_or("no SMT solver available")?;
    let sqrt = fixture("sqrt_ode.dgl");
    let (_, out, _) = call(&["check", p(&sqrt), "--expected", "T >= 0"]);
    ensure!(out.trim() == "tool_failure:non_polynomial_rhs", "sqrt ODE gave `{}`", out.trim());
    let lp = fixture("loop.dgl");
    let (_, out, _) = call(&["check", p(&lp), "--expected", "n >= 0"]);
    ensure!(out.trim() == "tool_failure:loop_unsupported", "loop gave `{}`", out.trim());
    let (_, out, _) = check_fixture("model2.dgl", &["--timeout", "0.001"]);
    ensure!(out.trim() == "timeout", "1 ms budget gave `{}`", out.trim());
    Ok("non_polynomial_rhs, loop_unsupported, timeout".into())
}

fn ode_oracle() -> Verdict {
    let mut r = rng(60);
    let start = Instant::now();
    let n = 250;
    for case in 0..n {
        let system = random_acyclic_system(&mut r);
        let sol = solve_ode(&system).map_err(|e| format!("case {case}: {e}"))?;
        let tau = sol.duration.clone();
        let at_tau = sol.at(&Term::var(&tau));
        let at_zero = sol.at(&Term::int(0));
        for eq in &system {
            let x_tau = sol.get(&eq.var).ok_or(format!("case {case}: {} unsolved", eq.var))?;
            let lhs = Poly::from_term(&derive(x_tau, &tau)).ok();
            let rhs = Poly::from_term(&subst_term(&eq.rhs, &at_tau)).ok();
            ensure!(lhs.is_some() && lhs == rhs, "case {case}: derivative of {} differs", eq.var);
            let initial = Poly::from_term(&at_zero[&eq.var]).ok();
            ensure!(initial == Some(Poly::var(&eq.var)), "case {case}: {} at 0", eq.var);
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{n} systems in {elapsed:.2?}"))
}

fn brute_force_wp() -> Verdict {
    let mut r = rng(70);
    let states = grid_states(SMALL_VARS);
    let start = Instant::now();
    let n = 150;
    for case in 0..n {
        let g: Game = small_game(&mut r, 5);
        let post = small_formula(&mut r, 2);
        let wp = wp_diamond(&g, &post).map_err(|e| format!("case {case}: {e}"))?;
        for s in &states {
            let angel = angel_wins(&g, s, true, &|end| eval_formula(&post, end).unwrap());
            ensure!(eval_formula(&wp, s) == Some(angel), "case {case} disagrees at {s:?}");
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{n} games x {} states in {elapsed:.2?}", states.len()))
}

fn pipeline_protocol() -> Verdict {
    let solver = solver().ok_or("no SMT solver available")?;
    let bench_dir = repo_root().join("benchmarks");
    let store = dglform::bench::BenchStore::load(&bench_dir).map_err(|e| e.to_string())?;
    let bench = store.get("mean-velocity").ok_or("mean-velocity missing")?;
    let checker = dglform::checker::Checker::new(solver);
    let config = PipelineConfig { timing: false, mode: PromptMode::MultiShot, ..PipelineConfig::default() };
    let replay = |name: &str| ReplayTransport::from_file(&fixture(&format!("replay/{name}.jsonl"))).unwrap();

    let a = run_attempt(bench, &store.fewshot, &replay("unicode_then_fixed"), &checker, &config);
    ensure!(a.proposals.len() == 2, "(a) {} proposals", a.proposals.len());
    ensure!(a.verdict.outcome() == Outcome::Success, "(a) verdict {}", a.verdict.label());

    let b = run_attempt(bench, &store.fewshot, &replay("syntax_exhausted"), &checker, &config);
    ensure!(b.verdict == AttemptVerdict::SyntaxExhausted, "(b) verdict {}", b.verdict.label());
    ensure!(b.verdict.outcome() == Outcome::Failed, "(b) outcome");

    use Outcome::*;
    let v = [Failed, Timeout, Failed, Failed, Failed];
    ensure!(best_index(&v).map(|i| v[i]) == Some(Timeout), "(c) {v:?}");
    let mut r = rng(80);
    let all = [Failed, Timeout, ToolFailure, Success];
    for _ in 0..500 {
        let mut v: Vec<Outcome> = (0..5).map(|_| all[r.random_range(0..4)]).collect();
        v[r.random_range(0..5)] = Success;
        ensure!(best_index(&v).map(|i| v[i]) == Some(Success), "(c) {v:?}");
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let suite = fixture("replay/suite.jsonl");
    let mut files = Vec::new();
    for i in 0..3 {
        let out = dir.path().join(format!("results{i}.jsonl"));
        let (code, _, err) = call(&[
            "run", p(&bench_dir), "--transport", "replay", "--replay", p(&suite), "--samples", "2", "--out", p(&out),
        ]);
        ensure!(code == 0, "run {i} exited {code}: {err}");
        files.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure!(files[0] == files[1] && files[1] == files[2], "results.jsonl differs between runs");
    let records: Vec<RunRecord> = String::from_utf8_lossy(&files[0])
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    for rec in &records {
        if rec.verdicts.contains(&Success) {
            ensure!(rec.best == Success, "{}: {:?} -> {:?}", rec.benchmark, rec.verdicts, rec.best);
        }
    }
    Ok(format!("(a) 2 proposals, (b) syntax exhausted, (c) aggregation, {} records identical x3", records.len()))
}

fn parser_robustness() -> Verdict {
    let mut r = rng(90);
    for i in 0..1000 {
        let f = random_formula(&mut r, 1 + i % 8);
        let printed = print_formula(&f);
        let back = parse_formula(&printed).map_err(|d| format!("case {i}: {printed}: {d:?}"))?;
        ensure!(back == f, "case {i}: {printed} reparses differently");
    }
    let seeds = [fixture_text("model1.dgl"), fixture_text("model2.dgl"), fixture_text("sqrt_ode.dgl")];
    let alphabet: Vec<char> = "<>[]{}()=;:&|!?*^@'+-/.,0123456789xyzv_ \n\t#\\\u{2227}\u{27e8}\u{b7}".chars().collect();
    let deadline = Instant::now() + Duration::from_secs(30);
    let mut inputs = 0u64;
    let crashed = catch_unwind(AssertUnwindSafe(|| {
        while Instant::now() < deadline {
            let mut text: Vec<char> = seeds[r.random_range(0..seeds.len())].chars().collect();
            for _ in 0..r.random_range(1..10) {
                let pos = r.random_range(0..=text.len());
                if pos < text.len() && r.random_bool(0.5) {
                    text.remove(pos);
                } else {
                    text.insert(pos, alphabet[r.random_range(0..alphabet.len())]);
                }
            }
            let _ = parse_formula(&text.into_iter().collect::<String>());
            let bytes: Vec<u8> = (0..r.random_range(0..80)).map(|_| r.random()).collect();
            let _ = parse_formula_bytes(&bytes);
            inputs += 2;
        }
    }))
    .is_err();
    ensure!(!crashed, "parser panicked during fuzzing");
    let d = parse_formula("\u{27e8}x:=0\u{27e9} x=0").err().ok_or("Unicode input parsed")?;
    ensure!(d[0].code == DiagnosticCode::UnicodeChar, "first diagnostic {:?}", d[0].code);
    let want = "The input formula contains an unsupported Unicode character (possibly \u{27e8}). Use only ASCII characters.";
    ensure!(d[0].message == want, "message was `{}`", d[0].message);
    Ok(format!("1000 round trips, {inputs} fuzz inputs in 30 s, verbatim Unicode feedback"))
}

fn report_generation() -> Verdict {
    use Outcome::*;
    // model, mode, per-problem best outcomes
    let rows: [(&str, PromptMode, [Outcome; 4]); 3] = [
        ("alpha", PromptMode::MultiShot, [Success, Success, Failed, Timeout]),
        ("alpha", PromptMode::ZeroShot, [Success, Failed, Failed, ToolFailure]),
        ("beta", PromptMode::MultiShot, [Success, Success, Success, Failed]),
    ];
    let problems = ["p1", "p2", "p3", "p4"];
    let mut lines = String::new();
    for (model, mode, outcomes) in &rows {
        for (problem, best) in problems.iter().zip(outcomes) {
            let rec = RunRecord {
                benchmark: problem.to_string(),
                model: model.to_string(),
                mode: *mode,
                verdicts: vec![Failed, *best],
                best: *best,
                best_label: best.as_str().to_string(),
                failure_tag: None,
                millis: None,
                attempts: vec![],
            };
            lines += &(serde_json::to_string(&rec).unwrap() + "\n");
        }
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let results = dir.path().join("results.jsonl");
    std::fs::write(&results, lines).map_err(|e| e.to_string())?;
    let out_dir = dir.path().join("report");
    let (code, _, err) = call(&["report", p(&results), "--out", p(&out_dir)]);
    ensure!(code == 0, "report exited {code}: {err}");
    let csv = std::fs::read_to_string(out_dir.join("summary.csv")).map_err(|e| e.to_string())?;
    let want = [
        "model,mode,benchmarks,success,tool_failure,timeout,failed,success_fraction,success_rate",
        "alpha,multi-shot,4,2,0,1,1,2/4,0.5000",
        "alpha,zero-shot,4,1,1,0,2,1/4,0.2500",
        "beta,multi-shot,4,3,0,0,1,3/4,0.7500",
    ];
    let got: Vec<&str> = csv.lines().collect();
    ensure!(got == want, "summary.csv:\n{csv}");
    let svg = std::fs::read_to_string(out_dir.join("heatmap.svg")).map_err(|e| e.to_string())?;
    let cells = svg.matches("<rect").count() - 4;
    ensure!(cells == rows.len() * problems.len(), "{cells} heatmap cells");
    for problem in problems {
        ensure!(svg.contains(&format!(">{problem}</text>")), "column {problem} missing");
    }
    ensure!(svg.contains("alpha (zero-shot)"), "row label missing");
    Ok(format!("{}x{} heatmap, rates 2/4 1/4 3/4", rows.len(), problems.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("golden weakest precondition", golden_wp),
        ("exploit detection", exploit_detection),
        ("repaired model succeeds", repaired_model),
        ("stasis", stasis),
        ("tool failure taxonomy", tool_failures),
        ("ODE oracle", ode_oracle),
        ("brute-force WP", brute_force_wp),
        ("pipeline protocol", pipeline_protocol),
        ("parser robustness", parser_robustness),
        ("report generation", report_generation),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|s| s == &n.to_string()) {
            continue;
        }
        let result = catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match result {
            Ok(detail) => println!("criterion {n}: PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
