//! Command-line front end. `loceq solve` turns one construction script
//! into an implicit equation (or a sampled trace) and prints it as text,
//! JSON, SVG, or CSV; `loceq corpus` replays a directory of scripts
//! against their recorded expectations and reports a pass/fail table.
//!
//! Exit codes: 0 success, 1 diagnostics or unsolvable input, 2 resource
//! budget exhausted.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use loceq_core::dsl;
use loceq_core::envelope::{self, EnvelopeError, EnvelopeMethod};
use loceq_core::geom::{ConstructionProgram, GoalKind};
use loceq_core::groebner::{Budget, GroebnerError};
use loceq_core::locus::{self, plane_registry, LocusError, LocusResult};
use loceq_core::rational::{rat, Rational};
use loceq_core::render::{self, Viewport};
use loceq_core::text::parse_poly;
use serde::Serialize;

const EXIT_DIAGNOSTIC: u8 = 1;
const EXIT_RESOURCE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "loceq",
    version,
    about = "Implicit equations of loci and envelopes from ruler-and-compass constructions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one construction script and print the result.
    Solve(SolveArgs),
    /// Replay every script in a directory against its .expected file.
    Corpus(CorpusArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Construction script (.lcs).
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Plot window as xmin,ymin,xmax,ymax (integers, decimals, or a/b).
    #[arg(long, allow_hyphen_values = true)]
    bbox: Option<String>,
    /// Marching-squares resolution for SVG and CSV output.
    #[arg(long, default_value_t = 512)]
    grid: u32,
    /// Wall-clock ceiling for the elimination, in seconds
    /// (LOCEQ_TIME_BUDGET supplies a default).
    #[arg(long)]
    time_budget: Option<f64>,
    /// Reduction-step ceiling for the elimination.
    #[arg(long)]
    step_budget: Option<u64>,
    /// Sample count for numeric traces (Locus goals).
    #[arg(long, default_value_t = 64)]
    samples: usize,
}

#[derive(Args)]
struct CorpusArgs {
    /// Directory of .lcs scripts with .expected siblings.
    dir: PathBuf,
    /// Also run entries marked `stretch: true` (LOCEQ_STRETCH=1 works too).
    #[arg(long)]
    stretch: bool,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
    Svg,
    Csv,
}

fn main() -> ExitCode {
    // Exit 2 is reserved for exhausted budgets; usage mistakes are
    // ordinary diagnostics.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_DIAGNOSTIC);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let code = match cli.command {
        Command::Solve(args) => solve(&args),
        Command::Corpus(args) => corpus(&args),
    };
    ExitCode::from(code)
}

// ---------------------------------------------------------------- solve

#[derive(Serialize)]
struct Timings {
    parse_ms: u128,
    solve_ms: u128,
    total_ms: u128,
}

#[derive(Serialize)]
struct EquationReport {
    schema: u32,
    equation: String,
    degree: u32,
    factors: Vec<String>,
    superset_warning: bool,
    timings: Timings,
}

#[derive(Serialize)]
struct TraceReport {
    schema: u32,
    points: Vec<(f64, f64)>,
    notes: Vec<String>,
    timings: Timings,
}

fn locus_exit(e: &LocusError) -> u8 {
    match e {
        LocusError::Groebner(GroebnerError::ResourceLimit { .. }) => EXIT_RESOURCE,
        _ => EXIT_DIAGNOSTIC,
    }
}

fn envelope_exit(e: &EnvelopeError) -> u8 {
    match e {
        EnvelopeError::TooManyParameters { .. } => EXIT_RESOURCE,
        EnvelopeError::Locus(inner) => locus_exit(inner),
        _ => EXIT_DIAGNOSTIC,
    }
}

fn budget_from(args: &SolveArgs) -> Budget {
    let mut budget = Budget::default();
    if let Some(steps) = args.step_budget {
        budget.max_steps = steps;
    }
    let seconds = args.time_budget.or_else(|| {
        std::env::var("LOCEQ_TIME_BUDGET")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(s) = seconds {
        budget.time_limit = Some(Duration::from_secs_f64(s));
    }
    budget
}

fn parse_rat(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(rat(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if (int.is_empty() && frac.is_empty()) || frac.len() > 9 {
        return None;
    }
    let whole: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let scale = 10i64.pow(frac.len() as u32);
    let part: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let v = rat(whole * scale + part, scale);
    Some(if neg { -v } else { v })
}

fn viewport_from(args: &SolveArgs) -> Result<Viewport, String> {
    let Some(spec) = &args.bbox else {
        return Viewport::square(5, args.grid).map_err(|e| e.to_string());
    };
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("--bbox wants xmin,ymin,xmax,ymax, got `{spec}`"));
    }
    let mut vals = Vec::with_capacity(4);
    for p in &parts {
        vals.push(parse_rat(p).ok_or_else(|| format!("--bbox: `{p}` is not a number"))?);
    }
    let (xmin, ymin, xmax, ymax) = (
        vals[0].clone(),
        vals[1].clone(),
        vals[2].clone(),
        vals[3].clone(),
    );
    Viewport::new(xmin, xmax, ymin, ymax, args.grid).map_err(|e| e.to_string())
}

fn solve(args: &SolveArgs) -> u8 {
    let total = Instant::now();
    let source = match std::fs::read_to_string(&args.file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.file.display());
            return EXIT_DIAGNOSTIC;
        }
    };
    let parse_start = Instant::now();
    let parsed = dsl::parse(&source);
    let parse_ms = parse_start.elapsed().as_millis();
    for d in &parsed.diagnostics {
        eprintln!("{}:{d}", args.file.display());
    }
    let Some(program) = parsed.program else {
        return EXIT_DIAGNOSTIC;
    };
    let Some(goal) = program.goal.clone() else {
        eprintln!("error: script has no goal statement; nothing to solve");
        return EXIT_DIAGNOSTIC;
    };
    let budget = budget_from(args);

    if goal.kind == GoalKind::Locus {
        return emit_trace(args, &program, parse_ms, total);
    }

    let solve_start = Instant::now();
    let outcome: Result<LocusResult, (u8, String)> = match goal.kind {
        GoalKind::LocusEquation => locus::locus_equation_with_budget(&program, &budget)
            .map_err(|e| (locus_exit(&e), format!("locus: {e}"))),
        GoalKind::Envelope => envelope::family_spec(&program)
            .and_then(|spec| envelope::envelope_equation_with(&spec, EnvelopeMethod::Auto, &budget))
            .map_err(|e| (envelope_exit(&e), format!("envelope: {e}"))),
        GoalKind::Locus => unreachable!("handled above"),
    };
    let solve_ms = solve_start.elapsed().as_millis();

    let result = match outcome {
        Ok(r) => r,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return code;
        }
    };
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    if result.superset_warning && args.format == Format::Text {
        eprintln!("note: the curve contains the locus; spurious components may remain");
    }

    match args.format {
        Format::Text => println!("{}", result.curve.equation_string()),
        Format::Json => {
            let mut factors: Vec<String> = result
                .known_factors
                .iter()
                .map(|f| f.poly().to_string())
                .collect();
            if !result.known_factors.is_empty() && result.cofactor.degree() > 0 {
                factors.push(result.cofactor.poly().to_string());
            }
            let report = EquationReport {
                schema: 1,
                equation: result.curve.equation_string(),
                degree: result.degree,
                factors,
                superset_warning: result.superset_warning,
                timings: Timings {
                    parse_ms,
                    solve_ms,
                    total_ms: total.elapsed().as_millis(),
                },
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        }
        Format::Svg | Format::Csv => {
            let vp = match viewport_from(args) {
                Ok(vp) => vp,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return EXIT_DIAGNOSTIC;
                }
            };
            let paths = render::rasterize(&result.curve, &vp);
            if args.format == Format::Svg {
                print!("{}", render::emit_svg(&paths, &vp, &result.curve.equation_string()));
            } else {
                print!("{}", render::emit_csv(&paths));
            }
        }
    }
    0
}

fn emit_trace(args: &SolveArgs, program: &ConstructionProgram, parse_ms: u128, total: Instant) -> u8 {
    let solve_start = Instant::now();
    let trace = match locus::numeric_trace(program, args.samples) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: locus: {e}");
            return locus_exit(&e);
        }
    };
    let solve_ms = solve_start.elapsed().as_millis();
    match args.format {
        Format::Text => {
            for n in &trace.notes {
                println!("# {n}");
            }
            for (x, y) in &trace.points {
                println!("{x} {y}");
            }
        }
        Format::Json => {
            let report = TraceReport {
                schema: 1,
                points: trace.points,
                notes: trace.notes,
                timings: Timings {
                    parse_ms,
                    solve_ms,
                    total_ms: total.elapsed().as_millis(),
                },
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        }
        Format::Svg => {
            let vp = match viewport_from(args) {
                Ok(vp) => vp,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return EXIT_DIAGNOSTIC;
                }
            };
            let label = format!("{} sampled positions", trace.points.len());
            print!("{}", render::emit_svg_points(&trace.points, &vp, &label));
        }
        Format::Csv => {
            let mut out = String::from("x,y,path_id\n");
            for (x, y) in &trace.points {
                let _ = writeln!(out, "{x},{y},0");
            }
            print!("{out}");
        }
    }
    0
}

// --------------------------------------------------------------- corpus

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Exact,
    Divides,
    DividedBy,
    Degree,
    Reference,
    Trace,
}

struct Expected {
    mode: Mode,
    equation: Option<String>,
    degree: Option<u32>,
    stretch: bool,
    timeout: Option<f64>,
}

fn parse_expected(text: &str) -> Result<Expected, String> {
    let mut mode = None;
    let mut equation = None;
    let mut degree = None;
    let mut stretch = false;
    let mut timeout = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(format!("line {}: expected `key: value`", i + 1));
        };
        let value = value.trim();
        match key.trim() {
            "mode" => {
                mode = Some(match value {
                    "exact" => Mode::Exact,
                    "divides" => Mode::Divides,
                    "divided-by" => Mode::DividedBy,
                    "degree" => Mode::Degree,
                    "reference" => Mode::Reference,
                    "trace" => Mode::Trace,
                    other => return Err(format!("unknown mode `{other}`")),
                })
            }
            "equation" => equation = Some(value.to_string()),
            "degree" => {
                degree = Some(value.parse().map_err(|_| format!("bad degree `{value}`"))?)
            }
            "stretch" => stretch = value == "true",
            "timeout" => {
                timeout = Some(value.parse().map_err(|_| format!("bad timeout `{value}`"))?)
            }
            other => return Err(format!("unknown key `{other}`")),
        }
    }
    let mode = mode.ok_or("missing `mode:` line")?;
    if mode == Mode::Degree {
        if degree.is_none() {
            return Err("mode degree needs a `degree:` line".into());
        }
    } else if equation.is_none() {
        return Err("missing `equation:` line".into());
    }
    Ok(Expected { mode, equation, degree, stretch, timeout })
}

#[derive(PartialEq)]
enum Status {
    Pass,
    Fail,
    Skip,
}

struct Row {
    name: String,
    status: Status,
    ms: u128,
    note: String,
    gating: bool,
}

impl Row {
    fn fail(name: &str, note: String) -> Row {
        Row { name: name.into(), status: Status::Fail, ms: 0, note, gating: true }
    }
}

/// Absolute residual bound for sampled traces against the expected curve.
const TRACE_TOLERANCE: f64 = 1e-9;
const TRACE_SAMPLES: usize = 20;

fn run_entry(path: &std::path::Path, stretch_enabled: bool) -> Row {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let expected_path = path.with_extension("expected");
    let expected_text = match std::fs::read_to_string(&expected_path) {
        Ok(t) => t,
        Err(_) => return Row::fail(&name, "missing .expected file".into()),
    };
    let expected = match parse_expected(&expected_text) {
        Ok(e) => e,
        Err(msg) => return Row::fail(&name, format!("bad .expected file: {msg}")),
    };
    if expected.stretch && !stretch_enabled {
        return Row {
            name,
            status: Status::Skip,
            ms: 0,
            note: "stretch entry; pass --stretch to run".into(),
            gating: false,
        };
    }
    let gating = !expected.stretch;

    let source = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => return Row::fail(&name, format!("cannot read script: {e}")),
    };
    let parsed = dsl::parse(&source);
    let Some(program) = parsed.program else {
        let first = parsed
            .diagnostics
            .iter()
            .map(|d| d.to_string())
            .next()
            .unwrap_or_default();
        return Row::fail(&name, format!("parse error: {first}"));
    };
    let Some(goal) = program.goal.clone() else {
        return Row::fail(&name, "script has no goal statement".into());
    };

    let mut budget = Budget::default();
    let seconds = expected.timeout.or_else(|| {
        std::env::var("LOCEQ_TIME_BUDGET")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(s) = seconds {
        budget.time_limit = Some(Duration::from_secs_f64(s));
    }

    let started = Instant::now();
    let (status, note) = check_entry(&program, goal.kind, &expected, &budget);
    Row { name, status, ms: started.elapsed().as_millis(), note, gating }
}

fn check_entry(
    program: &ConstructionProgram,
    kind: GoalKind,
    expected: &Expected,
    budget: &Budget,
) -> (Status, String) {
    let expected_poly = expected.equation.as_ref().map(|s| {
        parse_poly(s, plane_registry())
            .and_then(|p| p.canonicalize())
            .map_err(|e| format!("bad expected equation: {e}"))
    });
    let expected_poly = match expected_poly {
        Some(Ok(p)) => Some(p),
        Some(Err(msg)) => return (Status::Fail, msg),
        None => None,
    };

    if expected.mode == Mode::Trace {
        if kind != GoalKind::Locus {
            return (Status::Fail, "trace mode wants a Locus goal".into());
        }
        let expected_poly = expected_poly.expect("trace mode carries an equation");
        let trace = match locus::numeric_trace(program, TRACE_SAMPLES) {
            Ok(t) => t,
            Err(e) => return (Status::Fail, format!("locus: {e}")),
        };
        if trace.points.is_empty() {
            return (Status::Fail, "trace produced no points".into());
        }
        let worst = trace
            .points
            .iter()
            .map(|&(x, y)| loceq_core::poly::relative_residual(&expected_poly, &[x, y]))
            .fold(0.0f64, f64::max);
        return if worst < TRACE_TOLERANCE {
            (
                Status::Pass,
                format!("{} samples on the curve (worst {worst:.1e})", trace.points.len()),
            )
        } else {
            (Status::Fail, format!("worst sample residual {worst:.1e}"))
        };
    }

    let result = match kind {
        GoalKind::Locus => {
            return (Status::Fail, "equation modes want an equation goal".into())
        }
        GoalKind::LocusEquation => {
            locus::locus_equation_with_budget(program, budget).map_err(|e| format!("locus: {e}"))
        }
        GoalKind::Envelope => envelope::family_spec(program)
            .and_then(|spec| envelope::envelope_equation_with(&spec, EnvelopeMethod::Auto, budget))
            .map_err(|e| format!("envelope: {e}")),
    };
    let result = match result {
        Ok(r) => r,
        Err(msg) => return (Status::Fail, msg),
    };
    let computed = result.curve.poly();

    if let (Some(want), got) = (expected.degree, result.degree) {
        if expected.mode != Mode::Reference && got != want {
            return (Status::Fail, format!("degree {got}, expected {want}"));
        }
    }

    match expected.mode {
        Mode::Exact => {
            let want = expected_poly.expect("exact mode carries an equation");
            if computed == &want {
                (Status::Pass, "matches expected equation".into())
            } else {
                (Status::Fail, format!("got {} = 0", computed))
            }
        }
        Mode::Divides => {
            let want = expected_poly.expect("divides mode carries an equation");
            if want.divides(computed) {
                (Status::Pass, format!("expected curve divides result (degree {})", result.degree))
            } else {
                (Status::Fail, format!("expected curve does not divide {} = 0", computed))
            }
        }
        Mode::DividedBy => {
            let want = expected_poly.expect("divided-by mode carries an equation");
            if computed.divides(&want) {
                (Status::Pass, format!("result divides expected curve (degree {})", result.degree))
            } else {
                (Status::Fail, format!("{} = 0 does not divide the expected curve", computed))
            }
        }
        Mode::Degree => (
            Status::Pass,
            format!("degree {}", result.degree),
        ),
        Mode::Reference => {
            let want = expected_poly.expect("reference mode carries an equation");
            if computed == &want {
                (Status::Pass, "matches reference equation".into())
            } else {
                (Status::Pass, format!("informational; got {} = 0", computed))
            }
        }
        Mode::Trace => unreachable!("handled above"),
    }
}

fn corpus(args: &CorpusArgs) -> u8 {
    let stretch_enabled =
        args.stretch || std::env::var("LOCEQ_STRETCH").map(|v| v == "1").unwrap_or(false);
    let mut scripts: Vec<PathBuf> = match std::fs::read_dir(&args.dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().map(|x| x == "lcs").unwrap_or(false))
            .collect(),
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.dir.display());
            return EXIT_DIAGNOSTIC;
        }
    };
    scripts.sort();

    #[cfg(feature = "parallel")]
    let rows: Vec<Row> = {
        use rayon::prelude::*;
        scripts.par_iter().map(|p| run_entry(p, stretch_enabled)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Row> = scripts.iter().map(|p| run_entry(p, stretch_enabled)).collect();

    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    println!("{:<width$}  {:<6} {:>8}  note", "name", "status", "time");
    let (mut passed, mut failed, mut skipped) = (0, 0, 0);
    let mut gate = false;
    for row in &rows {
        let status = match row.status {
            Status::Pass => {
                passed += 1;
                "PASS"
            }
            Status::Fail => {
                failed += 1;
                if row.gating {
                    gate = true;
                }
                "FAIL"
            }
            Status::Skip => {
                skipped += 1;
                "skip"
            }
        };
        println!(
            "{:<width$}  {:<6} {:>7}ms  {}",
            row.name, status, row.ms, row.note
        );
    }
    println!("{passed} passed, {failed} failed, {skipped} skipped");
    if gate {
        EXIT_DIAGNOSTIC
    } else {
        0
    }
}
