// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! `pfc`: command-line driver for the Pauli Fusion compiler.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use pfc_core::compile::{compile_to_pf, full_pipeline, PipelineConfig, PipelineOutcome};
use pfc_core::flow::{find_pf_flow, validate_pf_flow, PFFlow};
use pfc_core::graphlike::{build_signature, to_graph_like};
use pfc_core::pf::{pf_load, time_ordering, BranchString, PFDiagram};
use pfc_core::semantics::{
    check_determinism, kraus, library, run_procedure, VerifyConfig, DEFAULT_BRANCH_CAP,
    DEFAULT_TOLERANCE, DEFAULT_WIDTH_CAP,
};
use pfc_core::ZXDiagram;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_NO_FLOW: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "pfc", version, about = "Compile ZX diagrams into runnable Pauli Fusion procedures")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Print a single JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Largest tensor frontier (in wires) the dense evaluator may reach.
    #[arg(long, global = true, env = "PFC_WIDTH_CAP", default_value_t = DEFAULT_WIDTH_CAP)]
    width_cap: usize,
    /// Largest branch count enumerated exhaustively; beyond it branches are sampled.
    #[arg(long, global = true, env = "PFC_BRANCH_CAP", default_value_t = DEFAULT_BRANCH_CAP)]
    branch_cap: usize,
    /// Relative tolerance of proportionality checks.
    #[arg(long, global = true, env = "PFC_TOL", default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Worker threads for branch evaluation (0 = all cores).
    #[arg(long, global = true, env = "PFC_THREADS", default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Rewrite a diagram into graph-like form.
    Normalize(IoArgs),
    /// Print the signature of the normalized diagram.
    Signature(IoArgs),
    /// Find a PF-flow (exit 2 if there is none).
    Flow(IoArgs),
    /// Compile to a PF diagram.
    Compile(CompileArgs),
    /// Check runnability, and determinism against a source diagram.
    Verify(VerifyArgs),
    /// Execute a PF diagram on an input state with sampled outcomes.
    Run(RunArgs),
    /// Dump the Kraus operators of every elementary operation.
    Kraus(KrausArgs),
    /// Normalize, find a flow, compile and verify.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct IoArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    input: PathBuf,
    /// Use this flow instead of searching for one.
    #[arg(long)]
    flow: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Where to write the compilation trace.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    input: PathBuf,
    /// Source diagram for the determinism check.
    #[arg(long)]
    source: Option<PathBuf>,
    /// Seed for sampled branches.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also require every branch phase to be exactly +1 or -1.
    #[arg(long)]
    strict_signs: bool,
}

#[derive(Args)]
struct RunArgs {
    input: PathBuf,
    /// JSON array of [re, im] amplitudes; defaults to |0...0>.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// External bit value, `name=0` or `name=1`.
    #[arg(long = "bit")]
    bits: Vec<String>,
}

#[derive(Args)]
struct KrausArgs {
    /// Rotation angle in radians.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    angle: f64,
}

#[derive(Args)]
struct PipelineArgs {
    input: PathBuf,
    /// Directory for the stage artifacts.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_verify: bool,
}

struct Outcome {
    code: u8,
    report: Value,
    text: String,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_zx(path: &Path) -> anyhow::Result<ZXDiagram> {
    let d = ZXDiagram::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    d.ensure_valid().with_context(|| format!("validating {}", path.display()))?;
    Ok(d)
}

fn load_pf(path: &Path) -> anyhow::Result<PFDiagram> {
    pf_load(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn emit(output: &Option<PathBuf>, text: &str) -> anyhow::Result<Option<String>> {
    match output {
        Some(p) => {
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
            Ok(None)
        }
        None => Ok(Some(text.to_string())),
    }
}

fn parse_value(text: &str) -> Value {
    serde_json::from_str(text).expect("library output is valid json")
}

fn verify_config(g: &Global, seed: u64) -> VerifyConfig {
    VerifyConfig {
        tol: g.tol,
        branch_cap: g.branch_cap,
        width_cap: g.width_cap,
        seed,
        ..VerifyConfig::default()
    }
}

fn artifact(command: &str, output: &Option<PathBuf>, text: String, value: Value) -> anyhow::Result<Outcome> {
    let printed = emit(output, &text)?;
    Ok(Outcome {
        code: EXIT_OK,
        report: json!({ "command": command, "result": value }),
        text: printed.unwrap_or_else(|| format!("wrote {}\n", output.as_ref().expect("path").display())),
    })
}

fn cmd_normalize(a: &IoArgs) -> anyhow::Result<Outcome> {
    let g = to_graph_like(&load_zx(&a.input)?)?;
    let text = g.inner().to_json();
    artifact("normalize", &a.output, text.clone(), parse_value(&text))
}

fn cmd_signature(a: &IoArgs) -> anyhow::Result<Outcome> {
    let sig = build_signature(&to_graph_like(&load_zx(&a.input)?)?);
    let text = sig.to_json();
    artifact("signature", &a.output, text.clone(), parse_value(&text))
}

fn cmd_flow(a: &IoArgs) -> anyhow::Result<Outcome> {
    let sig = build_signature(&to_graph_like(&load_zx(&a.input)?)?);
    match find_pf_flow(&sig) {
        Some(flow) => {
            let text = flow.to_json(&sig);
            artifact("flow", &a.output, text.clone(), parse_value(&text))
        }
        None => Ok(Outcome {
            code: EXIT_NO_FLOW,
            report: json!({ "command": "flow", "outcome": "no_flow", "signature": parse_value(&sig.to_json()) }),
            text: "no PF-flow exists for this diagram\n".into(),
        }),
    }
}

fn cmd_compile(a: &CompileArgs) -> anyhow::Result<Outcome> {
    let g = to_graph_like(&load_zx(&a.input)?)?;
    let sig = build_signature(&g);
    let flow: PFFlow = match &a.flow {
        Some(p) => {
            let flow = PFFlow::from_json(&sig, &read(p)?).with_context(|| format!("parsing {}", p.display()))?;
            let report = validate_pf_flow(&sig, &flow);
            if !report.is_ok() {
                return Err(anyhow!("flow {} is not valid:\n{report}", p.display()));
            }
            flow
        }
        None => match find_pf_flow(&sig) {
            Some(f) => f,
            None => {
                return Ok(Outcome {
                    code: EXIT_NO_FLOW,
                    report: json!({ "command": "compile", "outcome": "no_flow" }),
                    text: "no PF-flow exists for this diagram\n".into(),
                })
            }
        },
    };
    let (pf, trace) = compile_to_pf(&g, &flow)?;
    if let Some(t) = &a.trace {
        fs::write(t, trace.to_json()).with_context(|| format!("writing {}", t.display()))?;
    }
    let text = pf.to_json();
    let mut out = artifact("compile", &a.output, text.clone(), parse_value(&text))?;
    out.report["trace"] = parse_value(&trace.to_json());
    Ok(out)
}

fn cmd_verify(a: &VerifyArgs, g: &Global) -> anyhow::Result<Outcome> {
    let pf = load_pf(&a.input)?;
    let ordering = time_ordering(&pf);
    let mut report = json!({
        "command": "verify",
        "runnable": ordering.is_some(),
        "time_ordering": ordering.as_ref().map(|t| &t.t),
        "cycle": pf.dependency_cycle(),
    });
    let mut text = match (&ordering, pf.dependency_cycle()) {
        (Some(t), _) => format!("runnable: {} time steps\n", t.layers().len()),
        (None, Some(c)) => format!("not runnable: dependency cycle {}\n", c.join(" -> ")),
        (None, None) => "not runnable\n".to_string(),
    };
    let mut ok = ordering.is_some();
    if let Some(src) = &a.source {
        let source = load_zx(src)?;
        let v = check_determinism(&pf, &source, &verify_config(g, a.seed))?;
        let pass = v.passed && (!a.strict_signs || v.signs_only);
        text.push_str(&format!(
            "determinism: {} ({} branches{}, max deviation {:.2e}, signs only: {})\n",
            if pass { "pass" } else { "FAIL" },
            v.branches.len(),
            if v.exhaustive { "" } else { ", sampled" },
            v.max_deviation,
            v.signs_only
        ));
        if !v.failing.is_empty() {
            text.push_str(&format!("failing branches: {}\n", v.failing.join(", ")));
        }
        ok &= pass;
        report["verification"] = serde_json::to_value(&v)?;
    }
    report["passed"] = json!(ok);
    Ok(Outcome {
        code: if ok { EXIT_OK } else { EXIT_VERIFY },
        report,
        text,
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateFile {
    Pairs(Vec<[f64; 2]>),
    Wrapped { amplitudes: Vec<[f64; 2]> },
}

fn parse_bits(raw: &[String]) -> anyhow::Result<BranchString> {
    raw.iter()
        .map(|s| {
            let (k, v) = s.split_once('=').ok_or_else(|| anyhow!("bit `{s}` is not of the form name=0|1"))?;
            let v = match v {
                "0" => false,
                "1" => true,
                _ => return Err(anyhow!("bit `{s}` must be 0 or 1")),
            };
            Ok((k.to_string(), v))
        })
        .collect()
}

fn cmd_run(a: &RunArgs) -> anyhow::Result<Outcome> {
    let pf = load_pf(&a.input)?;
    let state: Vec<Complex64> = match &a.state {
        Some(p) => {
            let parsed: StateFile = serde_json::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
            let pairs = match parsed {
                StateFile::Pairs(v) | StateFile::Wrapped { amplitudes: v } => v,
            };
            pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()
        }
        None => {
            let mut v = vec![Complex64::new(0.0, 0.0); 1 << pf.inputs.len()];
            v[0] = Complex64::new(1.0, 0.0);
            v
        }
    };
    let r = run_procedure(&pf, &state, &parse_bits(&a.bits)?, a.seed)?;
    let mut text = String::new();
    for line in &r.log {
        text.push_str(line);
        text.push('\n');
    }
    for (k, amp) in r.state.iter().enumerate() {
        text.push_str(&format!("{k:0width$b}: {:+.6} {:+.6}i\n", amp.re, amp.im, width = pf.outputs.len().max(1)));
    }
    Ok(Outcome {
        code: EXIT_OK,
        report: json!({ "command": "run", "result": serde_json::to_value(&r)? }),
        text,
    })
}

fn cmd_kraus(a: &KrausArgs) -> anyhow::Result<Outcome> {
    let mut entries = Vec::new();
    for (op, s) in library(a.angle) {
        entries.push(json!({ "op": op, "outcome": s, "matrix": serde_json::to_value(kraus(op, s)?)? }));
    }
    let value = Value::Array(entries);
    let text = serde_json::to_string_pretty(&value)? + "\n";
    Ok(Outcome {
        code: EXIT_OK,
        report: json!({ "command": "kraus", "result": value }),
        text,
    })
}

fn cmd_pipeline(a: &PipelineArgs, g: &Global) -> anyhow::Result<Outcome> {
    let source = load_zx(&a.input)?;
    let config = PipelineConfig {
        verify: verify_config(g, a.seed),
        skip_verification: a.no_verify,
    };
    let result = full_pipeline(&source, &config)?;
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let stem = a
            .input
            .file_name()
            .and_then(|s| s.to_str())
            .map(|s| s.trim_end_matches(".json").trim_end_matches(".zx").to_string())
            .unwrap_or_else(|| "diagram".into());
        let write = |ext: &str, text: String| fs::write(dir.join(format!("{stem}.{ext}")), text);
        write("graphlike.zx.json", result.graph.inner().to_json())?;
        write("sig.json", result.signature.to_json())?;
        if let Some(f) = &result.flow {
            write("flow.json", f.to_json(&result.signature))?;
        }
        if let (Some(pf), Some(t)) = (&result.pf, &result.trace) {
            write("pf.json", pf.to_json())?;
            write("trace.json", t.to_json())?;
        }
    }
    let outcome = result.outcome();
    let code = match outcome {
        PipelineOutcome::Compiled => EXIT_OK,
        PipelineOutcome::NoFlow => EXIT_NO_FLOW,
        PipelineOutcome::VerificationFailed => EXIT_VERIFY,
    };
    let mut text = format!(
        "graph-like: {} spiders; signature: {} vertices\n",
        result.graph.inner().nodes.len(),
        result.signature.len()
    );
    match (&result.flow, &result.pf) {
        (None, _) | (_, None) => text.push_str("no PF-flow exists\n"),
        (Some(_), Some(pf)) => {
            text.push_str(&format!(
                "compiled: {} nodes, {} heralded bits, runnable: {}\n",
                pf.nodes.len(),
                pf.internal_bits().len(),
                result.time_ordering.is_some()
            ));
            if let Some(v) = &result.verification {
                text.push_str(&format!(
                    "determinism: {} over {} branches (signs only: {})\n",
                    if v.passed { "pass" } else { "FAIL" },
                    v.branches.len(),
                    v.signs_only
                ));
            }
            if let Some(why) = &result.verification_skipped {
                text.push_str(&format!("determinism check skipped: {why}\n"));
            }
        }
    }
    let mut report = result.to_json_value();
    report["command"] = json!("pipeline");
    Ok(Outcome { code, report, text })
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    if cli.global.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Normalize(a) => cmd_normalize(a),
        Command::Signature(a) => cmd_signature(a),
        Command::Flow(a) => cmd_flow(a),
        Command::Compile(a) => cmd_compile(a),
        Command::Verify(a) => cmd_verify(a, &cli.global),
        Command::Run(a) => cmd_run(a),
        Command::Kraus(a) => cmd_kraus(a),
        Command::Pipeline(a) => cmd_pipeline(a, &cli.global),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if cli.global.json {
                let mut report = out.report;
                report["exit_code"] = json!(out.code);
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            if cli.global.json {
                println!("{}", json!({ "error": format!("{e:#}"), "exit_code": EXIT_USAGE }));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(EXIT_USAGE)
        }
    }
}
