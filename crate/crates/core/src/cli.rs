//! The `fs` command line.
//!
//! Exit status is 0 on success, 1 when the computation itself fails
//! (divergence, an `unknown` verdict, a failed check) and 2 for usage and
//! parse errors. With `--json`, results and errors are printed as JSON.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::arith::{
    canonical_check, decode_entry, decode_function, decode_set, encode_entry, encode_function, encode_set, pa_eval,
    pa_translate, parse_pa, Env,
};
use crate::logic::{eval_bounded, parse_formula, EvalConfig, SoMode, ThreeValued};
use crate::prog2formula::{io_formula, program_formula_with};
use crate::st::{parse_program, run_with, DeletionMode, RunConfig, RunError};
use crate::structures::{isomorphic, parse_fstruct, print_fstruct, AFunction, Atom, Structure};
use crate::tm::{compile_tm, expected_output, input_structure, output_structure, parse_tm, simulate_tm, symbols, TmError};
use crate::verify;

const FUEL_FALLBACK: u64 = 100_000;

#[derive(Parser, Debug)]
#[command(name = "fs", version, about = "Compute over finite partial structures")]
pub struct Cli {
    /// Print results and diagnostics as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an ST program on a structure.
    Run {
        program: PathBuf,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Revision budget (default: $FS_FUEL_DEFAULT, else 100000).
        #[arg(long)]
        fuel: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the execution trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Deletion::Closure)]
        deletion: Deletion,
    },
    /// Evaluate a closed formula in a structure.
    Eval {
        formula: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// Maximum entries of a searched function.
        #[arg(long, default_value_t = 2)]
        so_bound: usize,
        #[arg(long, value_enum, default_value_t = Mode::Bounded)]
        mode: Mode,
    },
    /// Compile a Turing machine to an ST program.
    CompileTm {
        machine: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a Turing machine on a word.
    TmRun {
        machine: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long)]
        fuel: Option<u64>,
        /// Also run the compiled program and compare.
        #[arg(long)]
        via_st: bool,
    },
    /// Translate an ST program to its existential formula.
    Translate {
        program: PathBuf,
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        outputs: Vec<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Deletion::Closure)]
        deletion: Deletion,
    },
    /// Translate a PA formula to FS.
    PaTranslate {
        formula: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a PA formula in the standard model and, when it is
    /// quantifier-free, in its canonical FS interpretation.
    PaCheck {
        formula: String,
        /// Assignment such as `x1=2,x2=3`.
        #[arg(long, default_value = "")]
        env: String,
        /// Range of unbounded quantifiers.
        #[arg(long, default_value_t = 10)]
        qbound: u64,
    },
    /// Print the code of a set, entry or function.
    Encode {
        /// Comma-separated naturals.
        #[arg(long, group = "what")]
        set: Option<String>,
        /// An entry such as `0,1->2` (atom indices).
        #[arg(long, group = "what")]
        entry: Option<String>,
        /// A structure file; the function is `--name`, or its only component.
        #[arg(long, group = "what")]
        function: Option<PathBuf>,
        #[arg(long, requires = "function")]
        name: Option<String>,
    },
    /// Decode a set, entry or function code.
    Decode {
        code: String,
        #[arg(long, value_enum, default_value_t = CodeKind::Set)]
        kind: CodeKind,
        /// Arity, for function codes.
        #[arg(long, default_value_t = 1)]
        arity: usize,
    },
    /// Run the built-in verification suites.
    Verify {
        /// Suite numbers to run (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Deletion {
    Closure,
    OutputsOnly,
}

impl From<Deletion> for DeletionMode {
    fn from(d: Deletion) -> Self {
        match d {
            Deletion::Closure => DeletionMode::Closure,
            Deletion::OutputsOnly => DeletionMode::OutputsOnly,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    /// First-order only; second-order quantifiers are an error.
    Fo,
    /// Search functions up to the bound; may answer `unknown`.
    Bounded,
    /// Quantify over exactly the functions within the bound.
    Universe,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CodeKind {
    Set,
    Entry,
    Function,
}

/// Why a command failed, and with which exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain { kind: &'static str, message: String },
}

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn fail(kind: &'static str, e: impl Display) -> Failure {
    Failure::Domain { kind, message: e.to_string() }
}

/// A command's result: text for people, JSON for `--json`.
struct Output {
    text: String,
    json: Value,
    /// Exit with status 1 after printing (an `unknown` verdict, a failed
    /// suite).
    failed: bool,
}

impl Output {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Output { text: text.into(), json, failed: false }
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    match dispatch(cli.command) {
        Ok(out) => {
            if json {
                println!("{}", out.json);
            } else if !out.text.is_empty() {
                println!("{}", out.text.trim_end());
            }
            ExitCode::from(u8::from(out.failed))
        }
        Err(f) => {
            let (code, kind, message) = match f {
                Failure::Usage(m) => (2, "usage", m),
                Failure::Domain { kind, message } => (1, kind, message),
            };
            if json {
                println!("{}", json!({"error": {"kind": kind, "message": message}}));
            } else {
                eprintln!("fs: {message}");
            }
            ExitCode::from(code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_or_print(path: &Option<PathBuf>, text: &str) -> Result<String, Failure> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(text.to_string()),
    }
}

fn structure_file(path: &Path) -> Result<Structure, Failure> {
    parse_fstruct(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn default_fuel(fuel: Option<u64>) -> Result<u64, Failure> {
    if let Some(f) = fuel {
        return Ok(f);
    }
    match std::env::var("FS_FUEL_DEFAULT") {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("FS_FUEL_DEFAULT: `{v}` is not a natural number"))),
        Err(_) => Ok(FUEL_FALLBACK),
    }
}

fn parse_naturals(text: &str) -> Result<Vec<u64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| usage(format!("`{s}` is not a natural number"))))
        .collect()
}

fn parse_env(text: &str) -> Result<Env, Failure> {
    let mut env = Env::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| usage(format!("`{item}` is not of the form x=n")))?;
        let v = v.trim().parse().map_err(|_| usage(format!("`{v}` is not a natural number")))?;
        env.insert(k.trim().to_string(), v);
    }
    Ok(env)
}

fn verdict(v: ThreeValued) -> Output {
    let mut out = Output::ok(v.to_string(), json!({"result": v.to_string()}));
    out.failed = v.as_bool().is_none();
    out
}

fn dispatch(cmd: Command) -> Result<Output, Failure> {
    match cmd {
        Command::Run { program, input, fuel, out, trace, deletion } => {
            let p = parse_program(&read(&program)?).map_err(|e| usage(format!("{}: {e}", program.display())))?;
            let s = match input {
                Some(i) => structure_file(&i)?,
                None => Structure::default(),
            };
            let cfg = RunConfig { deletion: deletion.into(), trace: trace.is_some(), ..RunConfig::new(default_fuel(fuel)?) };
            let (result, tr) = run_with(&s, &p, &cfg).map_err(|e| match e {
                RunError::Diverged { .. } => fail("diverged", e),
                RunError::Stuck { .. } => fail("stuck", e),
                e => fail("run", e),
            })?;
            if let Some(t) = trace {
                let text = serde_json::to_string_pretty(&tr.to_json()).expect("json values serialize");
                fs::write(&t, text).map_err(|e| usage(format!("{}: {e}", t.display())))?;
            }
            let text = print_fstruct(&result);
            let json = json!({"output": text, "revisions": tr.steps.len()});
            Ok(Output::ok(write_or_print(&out, &text)?, json))
        }
        Command::Eval { formula, input, so_bound, mode } => {
            let f = parse_formula(&read(&formula)?).map_err(|e| usage(format!("{}: {e}", formula.display())))?;
            let s = structure_file(&input)?;
            let cfg = match mode {
                Mode::Fo => EvalConfig::fo(),
                Mode::Bounded => EvalConfig::bounded(so_bound),
                Mode::Universe => EvalConfig::universe(so_bound).with_mode(SoMode::BoundedUniverse),
            };
            Ok(verdict(eval_bounded(&s, &f, &cfg).map_err(|e| fail("eval", e))?))
        }
        Command::CompileTm { machine, out } => {
            let m = parse_tm(&read(&machine)?).map_err(|e| usage(format!("{}: {e}", machine.display())))?;
            let text = format!("{}\n", compile_tm(&m));
            let json = json!({"program": text});
            Ok(Output::ok(write_or_print(&out, &text)?, json))
        }
        Command::TmRun { machine, input, fuel, via_st } => {
            let m = parse_tm(&read(&machine)?).map_err(|e| usage(format!("{}: {e}", machine.display())))?;
            let w = symbols(&input);
            let fuel = default_fuel(fuel)?;
            let out = simulate_tm(&m, &w, fuel).map_err(|e| match e {
                TmError::Diverged(_) => fail("diverged", e),
                TmError::BadInput(_) => usage(e),
                e => fail("tm", e),
            })?;
            let word = out.concat();
            let mut json = json!({"output": word});
            if via_st {
                let s = input_structure(&m, &w).map_err(usage)?;
                let (res, _) = run_with(&s, &compile_tm(&m), &RunConfig { trace: false, ..RunConfig::new(fuel) })
                    .map_err(|e| fail("diverged", e))?;
                let agree = isomorphic(&output_structure(&m, &res), &expected_output(&m, &out).map_err(usage)?)
                    .map_err(usage)?
                    .is_some();
                json["compiled_agrees"] = json!(agree);
                if !agree {
                    return Err(fail("mismatch", "the compiled program disagrees with the machine"));
                }
            }
            Ok(Output::ok(word, json))
        }
        Command::Translate { program, inputs, outputs, out, deletion } => {
            let p = parse_program(&read(&program)?).map_err(|e| usage(format!("{}: {e}", program.display())))?;
            let f = if inputs.is_empty() && outputs.is_empty() {
                program_formula_with(&p, deletion.into()).map_err(usage)?.formula()
            } else {
                let ins: Vec<&str> = inputs.iter().map(String::as_str).collect();
                let outs: Vec<&str> = outputs.iter().map(String::as_str).collect();
                io_formula(&p, &ins, &outs).map_err(usage)?.formula
            };
            let text = format!("{f}\n");
            let json = json!({"formula": f.to_string()});
            Ok(Output::ok(write_or_print(&out, &text)?, json))
        }
        Command::PaTranslate { formula, out } => {
            let phi = parse_pa(&formula).map_err(usage)?;
            let f = pa_translate(&phi);
            let text = format!("{f}\n");
            let json = json!({"formula": f.to_string()});
            Ok(Output::ok(write_or_print(&out, &text)?, json))
        }
        Command::PaCheck { formula, env, qbound } => {
            let phi = parse_pa(&formula).map_err(usage)?;
            let env = parse_env(&env)?;
            let standard = pa_eval(&phi, &env, qbound).map_err(usage)?;
            if phi.is_quantifier_free() {
                let fs = canonical_check(&phi, &env).map_err(|e| fail("check", e))?;
                let json = json!({"standard": standard, "canonical": fs.to_string()});
                let mut out = Output::ok(format!("standard {standard}\ncanonical {fs}"), json);
                out.failed = fs != ThreeValued::from_bool(standard);
                Ok(out)
            } else {
                let next = pa_eval(&phi, &env, qbound + 1).map_err(usage)?;
                let json = json!({"standard": standard, "stable": standard == next, "qbound": qbound});
                let mut out = Output::ok(format!("standard {standard}"), json);
                if standard != next {
                    out.text.push_str(&format!(" (changes to {next} at bound {})", qbound + 1));
                    out.failed = true;
                }
                Ok(out)
            }
        }
        Command::Encode { set, entry, function, name } => {
            let n = if let Some(s) = set {
                encode_set(&parse_naturals(&s)?)
            } else if let Some(e) = entry {
                let (args, value) = e.split_once("->").ok_or_else(|| usage("an entry looks like `0,1->2`"))?;
                let atoms = |t: &str| -> Result<Vec<Atom>, Failure> {
                    parse_naturals(t)?
                        .into_iter()
                        .map(|n| u32::try_from(n).map(Atom).map_err(|_| usage(format!("atom {n} is too large"))))
                        .collect()
                };
                let value = atoms(value)?;
                let [value] = value[..] else { return Err(usage("an entry has exactly one value")) };
                encode_entry(&atoms(args)?, value)
            } else if let Some(path) = function {
                let s = structure_file(&path)?;
                let f = pick_function(&s, name.as_deref())?;
                encode_function(&f).map_err(|e| fail("encode", e))?
            } else {
                return Err(usage("give one of --set, --entry, --function"));
            };
            Ok(Output::ok(n.to_string(), json!({"code": n.to_string()})))
        }
        Command::Decode { code, kind, arity } => {
            let n: BigUint = code.trim().parse().map_err(|_| usage(format!("`{code}` is not a natural number")))?;
            let bad = |e| fail("decode", e);
            match kind {
                CodeKind::Set => {
                    let s = decode_set(&n).map_err(bad)?;
                    let text = s.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
                    Ok(Output::ok(format!("{{{text}}}"), json!({"set": s})))
                }
                CodeKind::Entry => {
                    let (args, v) = decode_entry(&n).map_err(bad)?;
                    let text = format!("{} -> {v}", args.iter().map(Atom::to_string).collect::<Vec<_>>().join(" "));
                    Ok(Output::ok(text.trim_start(), json!({"args": args.iter().map(|a| a.0).collect::<Vec<_>>(), "value": v.0})))
                }
                CodeKind::Function => {
                    let f = decode_function(&n, arity).map_err(bad)?;
                    let mut s = Structure::default();
                    s.set_function("f", f.clone()).map_err(usage)?;
                    let entries: Vec<Value> = f.entries().map(|(a, v)| json!([a.iter().map(|x| x.0).collect::<Vec<_>>(), v.0])).collect();
                    Ok(Output::ok(print_fstruct(&s), json!({"arity": arity, "entries": entries})))
                }
            }
        }
        Command::Verify { only } => {
            let reports = verify::run_suites(&only);
            let mut text = String::new();
            for r in &reports {
                let mark = if r.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!("{mark} {:>2}. {:<34} {:>7} ms  {}\n", r.id, r.name, r.millis, r.detail));
            }
            let failed = reports.iter().any(|r| !r.passed);
            let json = serde_json::to_value(&reports).expect("reports serialize");
            Ok(Output { text, json, failed })
        }
    }
}

fn pick_function(s: &Structure, name: Option<&str>) -> Result<AFunction, Failure> {
    let comps: BTreeMap<&str, &AFunction> = s.components().collect();
    match name {
        Some(n) => comps.get(n).map(|f| (*f).clone()).ok_or_else(|| usage(format!("no component `{n}`"))),
        None if comps.len() == 1 => Ok(comps.values().next().map(|f| (*f).clone()).expect("one component")),
        None => Err(usage("the structure has several components; pick one with --name")),
    }
}
