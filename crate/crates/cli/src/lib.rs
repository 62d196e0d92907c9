//! The `reflect` command: load a base grammar, run the recognizer on one
//! input and report.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{ArgGroup, Parser, ValueEnum};
use reflective_core::engine::RuleFirings;
use reflective_core::forest::{build_sppf, count_parses, extract_unambiguous, ForestError};
use reflective_core::meta::lex::{line_col, skip_ws};
use reflective_core::meta::SourceError;
use reflective_core::{parse_grammar_source, Grammar, RecognitionResult, RecognizeError, Recognizer};
use serde::Serialize;

pub const EXIT_ACCEPT: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_ABORT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Recognize,
    Parse,
    Sppf,
    Bench,
}

#[derive(Debug, Parser)]
#[command(name = "reflect", version, about = "Recognize and parse with reflective grammars")]
#[command(group(ArgGroup::new("source").required(true).args(["input", "text"])))]
pub struct Args {
    /// Base grammar file (one `gram <Start> ... end_gram` block)
    #[arg(long, short)]
    pub grammar: PathBuf,
    /// Input file, or `-` for stdin
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Inline input text
    #[arg(long, short)]
    pub text: Option<String>,
    #[arg(long, short, value_enum, default_value_t = Mode::Recognize)]
    pub mode: Mode,
    /// Abort when a set holds items from more than N grammars
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_m: Option<u64>,
    #[arg(long)]
    pub json: bool,
    /// Include counters and timing
    #[arg(long)]
    pub stats: bool,
    /// Treat rejected in-input extensions as fatal (exit 2)
    #[arg(long)]
    pub strict_extensions: bool,
    /// Parse counts at or above this value are reported as a lower bound
    #[arg(long, default_value_t = 1000)]
    pub cap: u64,
    /// Bench mode: repetition counts of the input text
    #[arg(long, value_delimiter = ',', default_values_t = [64usize, 128, 256, 512])]
    pub sizes: Vec<usize>,
    /// Bench mode: runs per size; the fastest is reported
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
}

#[derive(Debug, Serialize)]
struct Report {
    accepted: bool,
    furthest: usize,
    furthest_line: usize,
    furthest_column: usize,
    items_total: u64,
    rule_firings: RuleFirings,
    grammars_created: u64,
    max_m_seen: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    diagnostics: Vec<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ns: Option<u128>,
}

#[derive(Debug, Serialize)]
struct Diagnostic {
    start: usize,
    end: usize,
    line: usize,
    column: usize,
    message: String,
}

#[derive(Debug, Serialize)]
struct BenchRow {
    n: usize,
    items: u64,
    seconds: f64,
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Runs the command with `argv` (program name first) and returns the exit
/// status.
pub fn run<I, T>(argv: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_ACCEPT };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let mut io = Io { out, err };
    match execute(&args, stdin, &mut io) {
        Ok(code) => code,
        Err((code, msg)) => {
            if msg != BROKEN_PIPE {
                let _ = writeln!(io.err, "reflect: {msg}");
            }
            code
        }
    }
}

type Failure = (i32, String);

fn load_grammar(args: &Args) -> Result<Grammar, Failure> {
    let text = std::fs::read_to_string(&args.grammar)
        .map_err(|e| (EXIT_NO_INPUT, format!("{}: {e}", args.grammar.display())))?;
    parse_grammar_source(&text).map_err(|e| match e {
        SourceError::Syntax { .. } | SourceError::Invalid(_) => {
            (EXIT_DATA, format!("{}:{e}", args.grammar.display()))
        }
    })
}

fn load_input(args: &Args, stdin: &mut dyn Read) -> Result<String, Failure> {
    if let Some(t) = &args.text {
        return Ok(t.clone());
    }
    let path = args.input.as_ref().expect("clap enforces one source");
    if path.as_os_str() == "-" {
        let mut s = String::new();
        stdin
            .read_to_string(&mut s)
            .map_err(|e| (EXIT_NO_INPUT, format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| (EXIT_NO_INPUT, format!("{}: {e}", path.display())))
}

fn recognizer<'g>(args: &Args, g: &'g Grammar, annotate: bool) -> Recognizer<'g> {
    let r = Recognizer::new(g).annotate(annotate);
    match args.max_m {
        Some(m) => r.max_m(m as usize),
        None => r,
    }
}

fn write_json(io: &mut Io<'_>, value: &impl Serialize) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(value).map_err(|e| (EXIT_DATA, e.to_string()))?;
    writeln!(io.out, "{s}").map_err(out_err)
}

const BROKEN_PIPE: &str = "broken pipe";

fn out_err(e: std::io::Error) -> Failure {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        return (EXIT_DATA, BROKEN_PIPE.into());
    }
    (EXIT_DATA, e.to_string())
}

fn execute(args: &Args, stdin: &mut dyn Read, io: &mut Io<'_>) -> Result<i32, Failure> {
    let grammar = load_grammar(args)?;
    let input = load_input(args, stdin)?;
    if args.mode == Mode::Bench {
        return bench(args, &grammar, &input, io);
    }

    let chars: Vec<char> = input.chars().collect();
    let annotate = args.mode != Mode::Recognize;
    let t = Instant::now();
    let result = recognizer(args, &grammar, annotate).run(&input);
    let elapsed = t.elapsed();
    let r = match result {
        Ok(r) => r,
        Err(RecognizeError::MLimitExceeded {
            position,
            count,
            limit,
        }) => {
            let (line, column) = line_col(&chars, position);
            if args.json {
                write_json(
                    io,
                    &serde_json::json!({
                        "error": "m_limit_exceeded",
                        "position": position,
                        "line": line,
                        "column": column,
                        "count": count,
                        "limit": limit,
                    }),
                )?;
            }
            return Err((
                EXIT_ABORT,
                format!("{line}:{column}: {count} candidate grammars exceed --max-m {limit}"),
            ));
        }
        Err(e @ RecognizeError::InvalidGrammar(_)) => return Err((EXIT_DATA, e.to_string())),
    };

    let diagnostics: Vec<Diagnostic> = r
        .diagnostics()
        .iter()
        .map(|d| {
            let start = skip_ws(&chars, d.location.0);
            let (line, column) = line_col(&chars, start);
            Diagnostic {
                start,
                end: d.location.1,
                line,
                column,
                message: d.message.clone(),
            }
        })
        .collect();
    for d in &diagnostics {
        writeln!(io.err, "warning: {}:{}: {}", d.line, d.column, d.message).map_err(out_err)?;
    }
    if args.strict_extensions && !diagnostics.is_empty() {
        return Err((EXIT_ABORT, "rejected extension with --strict-extensions".into()));
    }

    let report = report(args, &r, &chars, elapsed, diagnostics);
    let status = if r.accepted { EXIT_ACCEPT } else { EXIT_REJECT };
    match args.mode {
        Mode::Recognize => {
            if args.json {
                write_json(io, &report)?;
            } else {
                text_verdict(io, &report)?;
                if args.stats {
                    text_stats(io, &report)?;
                }
            }
            Ok(status)
        }
        Mode::Parse => parse_mode(args, &r, &chars, report, io),
        Mode::Sppf => {
            if !r.accepted {
                if args.json {
                    write_json(io, &serde_json::json!({ "report": report }))?;
                } else {
                    text_verdict(io, &report)?;
                }
                return Ok(EXIT_REJECT);
            }
            let forest = build_sppf(&r).map_err(|e| (EXIT_DATA, e.to_string()))?;
            let count = count_parses(&forest, args.cap);
            write_json(
                io,
                &serde_json::json!({
                    "report": report,
                    "parse_count": count.to_string(),
                    "sppf": forest,
                }),
            )?;
            Ok(EXIT_ACCEPT)
        }
        Mode::Bench => unreachable!(),
    }
}

fn report(
    args: &Args,
    r: &RecognitionResult,
    chars: &[char],
    elapsed: Duration,
    diagnostics: Vec<Diagnostic>,
) -> Report {
    let (line, column) = line_col(chars, r.furthest);
    let s = r.stats();
    Report {
        accepted: r.accepted,
        furthest: r.furthest,
        furthest_line: line,
        furthest_column: column,
        items_total: s.items_total,
        rule_firings: s.rule_firings,
        grammars_created: s.grammars_created,
        max_m_seen: s.max_m_seen,
        diagnostics,
        elapsed_ns: args.stats.then_some(elapsed.as_nanos()),
    }
}

fn text_verdict(io: &mut Io<'_>, rep: &Report) -> Result<(), Failure> {
    if rep.accepted {
        writeln!(io.out, "accepted")
    } else {
        writeln!(
            io.out,
            "rejected: no parse continues past {}:{} (offset {})",
            rep.furthest_line, rep.furthest_column, rep.furthest
        )
    }
    .map_err(out_err)
}

fn text_stats(io: &mut Io<'_>, rep: &Report) -> Result<(), Failure> {
    let f = &rep.rule_firings;
    let lines = [
        format!("items_total       {}", rep.items_total),
        format!("grammars_created  {}", rep.grammars_created),
        format!("max_m_seen        {}", rep.max_m_seen),
        format!(
            "rule_firings      start {} shift {} call {} return {} parse_grammar {} refl_call {} refl_return {}",
            f.start, f.shift, f.call, f.return_, f.parse_grammar, f.refl_call, f.refl_return
        ),
        format!("elapsed_ns        {}", rep.elapsed_ns.unwrap_or_default()),
    ];
    for l in lines {
        writeln!(io.out, "{l}").map_err(out_err)?;
    }
    Ok(())
}

fn parse_mode(
    args: &Args,
    r: &RecognitionResult,
    chars: &[char],
    report: Report,
    io: &mut Io<'_>,
) -> Result<i32, Failure> {
    match extract_unambiguous(r) {
        Ok(tree) => {
            if args.json {
                write_json(io, &serde_json::json!({ "report": report, "tree": tree }))?;
            } else {
                write!(io.out, "{tree}").map_err(out_err)?;
            }
            Ok(EXIT_ACCEPT)
        }
        Err(ForestError::Ambiguous(a)) => {
            let (line, column) = line_col(chars, a.span.0);
            if args.json {
                write_json(
                    io,
                    &serde_json::json!({ "report": report, "ambiguity": a, "line": line, "column": column }),
                )?;
            }
            Err((EXIT_REJECT, format!("{line}:{column}: {a}")))
        }
        Err(ForestError::NotAccepted) => {
            if args.json {
                write_json(io, &serde_json::json!({ "report": report }))?;
            } else {
                text_verdict(io, &report)?;
            }
            Ok(EXIT_REJECT)
        }
        Err(e @ ForestError::NotAnnotated) => Err((EXIT_DATA, e.to_string())),
    }
}

/// Least-squares slope of log(seconds) against log(n).
pub fn fitted_exponent(rows: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(n, t)| *n > 0 && *t > 0.0)
        .map(|(n, t)| ((*n as f64).ln(), t.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    (den > 0.0).then(|| num / den)
}

fn bench(args: &Args, g: &Grammar, unit: &str, io: &mut Io<'_>) -> Result<i32, Failure> {
    let unit = unit.trim_end_matches(['\n', '\r']);
    let mut rows = Vec::new();
    for &n in &args.sizes {
        let input = unit.repeat(n);
        let mut best = f64::INFINITY;
        let mut items = 0;
        for _ in 0..args.trials {
            let t = Instant::now();
            let r = match recognizer(args, g, false).run(&input) {
                Ok(r) => r,
                Err(e @ RecognizeError::MLimitExceeded { .. }) => {
                    return Err((EXIT_ABORT, format!("n={n}: {e}")))
                }
                Err(e) => return Err((EXIT_DATA, e.to_string())),
            };
            best = best.min(t.elapsed().as_secs_f64());
            items = r.stats().items_total;
        }
        rows.push(BenchRow {
            n,
            items,
            seconds: best,
        });
    }
    let p = fitted_exponent(&rows.iter().map(|r| (r.n, r.seconds)).collect::<Vec<_>>());
    if args.json {
        write_json(io, &serde_json::json!({ "rows": rows, "fitted_exponent": p }))?;
    } else {
        writeln!(io.out, "n\titems\tseconds").map_err(out_err)?;
        for r in &rows {
            writeln!(io.out, "{}\t{}\t{:.6}", r.n, r.items, r.seconds).map_err(out_err)?;
        }
        if let Some(p) = p {
            writeln!(io.out, "# fitted exponent {p:.2}").map_err(out_err)?;
        }
    }
    Ok(EXIT_ACCEPT)
}
