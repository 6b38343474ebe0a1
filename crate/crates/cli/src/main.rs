//! `monodromic`: validate, transform and test monodromic modules stored as
//! JSON documents.

use std::collections::BTreeSet;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use monodromic::blocks::{
    block_oracle, chako_construct, nilp_block, s_block, stabilization_check, ChakoVariant,
};
use monodromic::dmod::{cycles, dual, expand};
use monodromic::format::{
    cycles_to_json, parse_many, psi_to_json, to_value, window_to_json, Document,
};
use monodromic::fourier::{fourier, fourier_core};
use monodromic::generate::generate_random;
use monodromic::gluing::{roundtrip_gluing, roundtrip_module, validate_gluing};
use monodromic::suite::{core_of, gluing_of, run_suite, run_suite_on, SuiteName};
use monodromic::{GeneratorConfig, PsiDatum};

/// Exit status for checks that ran and found a failure.
const EXIT_FAIL: u8 = 2;
/// Exit status for unusable input or options.
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "monodromic", version, about = "Exact computations with monodromic D-modules and mixed Hodge modules")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Input file; standard input when absent or `-`.
    file: Option<PathBuf>,
}

#[derive(Args)]
struct GenOptions {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    cases: usize,
    /// Bound on the total dimension of each generated module.
    #[arg(long, default_value_t = 5)]
    max_dim: usize,
    /// Comma-separated denominators for the labels `-j/d`.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
    denominators: Vec<u64>,
    /// Tate twists of generated blocks lie in `[-s, s]`.
    #[arg(long, default_value_t = 1)]
    weight_span: u32,
}

impl GenOptions {
    fn config(&self) -> GeneratorConfig {
        GeneratorConfig {
            seed: self.seed,
            max_dim: self.max_dim,
            eigen_denominators: self.denominators.iter().copied().collect::<BTreeSet<_>>(),
            max_weight_span: self.weight_span,
            case_count: self.cases,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check every document against its axioms.
    Validate(Input),
    /// Print the components `M^β` for `β ∈ [-1-K, K]` with `t` and `∂_t`.
    Expand {
        #[arg(long)]
        window: u32,
        #[command(flatten)]
        input: Input,
    },
    /// Nearby and vanishing cycles with `can` and `var`.
    Cycles(Input),
    /// The dual module (core data only).
    Dual(Input),
    /// The Fourier–Laplace transform.
    Fourier(Input),
    /// Print the blocks `V_r` and `S_m`, or run the kernel/cokernel
    /// construction on the nearby cycles of the input.
    Blocks {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: u64,
        /// Input to rebuild; without it only the blocks are printed.
        file: Option<PathBuf>,
    },
    /// Check that gluing and ungluing return the input.
    Roundtrip(Input),
    /// Run a property suite over generated cases or over `--input`.
    Suite {
        /// roundtrip, specialize, vfilt, arashi, blocks, fourier, dual or all.
        #[arg(long)]
        name: String,
        #[command(flatten)]
        gen: GenOptions,
        /// Run on the documents in this file instead of generated ones.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Print generated gluing data as a JSON array of documents.
    Gen(GenOptions),
}

/// Failures split by exit status.
enum Failure {
    Config(anyhow::Error),
    Check,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

type Outcome = Result<(), Failure>;

fn read_text(file: Option<&PathBuf>) -> anyhow::Result<String> {
    match file {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading standard input")?;
            Ok(s)
        }
    }
}

fn read_docs(file: Option<&PathBuf>) -> anyhow::Result<Vec<Document>> {
    let text = read_text(file)?;
    parse_many(&text).map_err(|e| anyhow!(e))
}

/// Writes to standard output; a closed pipe (as with `| head`) is not an
/// error worth reporting.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(io::stdout().lock(), $($arg)*);
    }};
}

fn print_json(v: &Value) {
    say!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

/// Prints one value or an array, mirroring how many documents came in.
fn print_many(values: Vec<Value>) {
    if values.len() == 1 {
        print_json(&values[0]);
    } else {
        print_json(&Value::Array(values));
    }
}

fn problems_of(doc: &Document) -> Vec<String> {
    match doc {
        Document::Core(c) => c.validate(),
        Document::Gluing(g) => validate_gluing(g),
        Document::Mmhm(m) => m.validate(),
    }
}

fn cmd_validate(json: bool, input: &Input) -> Outcome {
    let docs = read_docs(input.file.as_ref())?;
    let mut ok = true;
    let mut reports = Vec::new();
    for (i, doc) in docs.iter().enumerate() {
        let problems = problems_of(doc);
        ok &= problems.is_empty();
        if json {
            reports.push(json!({ "index": i, "kind": doc.kind(), "valid": problems.is_empty(), "violations": problems }));
        } else if problems.is_empty() {
            say!("document {i} ({}): valid", doc.kind());
        } else {
            say!("document {i} ({}): invalid", doc.kind());
            for p in &problems {
                say!("  - {p}");
            }
        }
    }
    if json {
        print_json(&json!({ "valid": ok, "documents": reports }));
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_expand(json: bool, window: u32, input: &Input) -> Outcome {
    let docs = read_docs(input.file.as_ref())?;
    let mut out = Vec::new();
    for doc in &docs {
        let core = core_of(doc).map_err(|e| anyhow!(e))?;
        let w = expand(&core, window).map_err(|e| anyhow!(e))?;
        if json {
            out.push(window_to_json(&w));
        } else {
            say!("window [{}, {}]", w.lo(), w.hi());
            for (b, d) in w.graded() {
                say!("  M^{b}: dim {d}");
            }
        }
    }
    if json {
        print_many(out);
    }
    Ok(())
}

fn cmd_cycles(input: &Input) -> Outcome {
    let docs = read_docs(input.file.as_ref())?;
    let mut out = Vec::new();
    for doc in &docs {
        let v = match doc {
            Document::Core(c) => cycles_to_json(&cycles(c).map_err(|e| anyhow!(e))?),
            _ => to_value(&Document::Gluing(gluing_of(doc).map_err(|e| anyhow!(e))?)),
        };
        out.push(v);
    }
    print_many(out);
    Ok(())
}

fn cmd_dual(input: &Input) -> Outcome {
    let docs = read_docs(input.file.as_ref())?;
    let mut out = Vec::new();
    for doc in &docs {
        let core = core_of(doc).map_err(|e| anyhow!(e))?;
        out.push(to_value(&Document::Core(dual(&core).map_err(|e| anyhow!(e))?)));
    }
    print_many(out);
    Ok(())
}

fn cmd_fourier(input: &Input) -> Outcome {
    let docs = read_docs(input.file.as_ref())?;
    let mut out = Vec::new();
    for doc in &docs {
        let result = match doc {
            Document::Core(c) => Document::Core(fourier_core(c).map_err(|e| anyhow!(e))?),
            _ => {
                let m = monodromic::suite::module_of(doc).map_err(|e| anyhow!(e))?;
                Document::Mmhm(fourier(&m).map_err(|e| anyhow!(e))?)
            }
        };
        out.push(to_value(&result));
    }
    print_many(out);
    Ok(())
}

fn block_json(r: usize, m: u64) -> Value {
    let v = nilp_block(r);
    let mut psi = PsiDatum::default();
    psi.components.insert(monodromic::int(0), v);
    json!({
        "V": { "r": r, "components": psi_to_json(&psi) },
        "S": { "m": m, "components": psi_to_json(&s_block(m)) },
    })
}

fn cmd_blocks(json: bool, r: usize, m: u64, file: Option<&PathBuf>) -> Outcome {
    if r == 0 || m == 0 {
        return Err(anyhow!("--r and --m must be positive").into());
    }
    let Some(file) = file else {
        print_json(&block_json(r, m));
        return Ok(());
    };
    let docs = read_docs(Some(file))?;
    let mut ok = true;
    let mut out = Vec::new();
    for doc in &docs {
        let psi = gluing_of(doc).map_err(|e| anyhow!(e))?.psi;
        let variants = ChakoVariant::ALL
            .iter()
            .map(|v| {
                chako_construct(&psi, r, m, *v)
                    .map(|p| (format!("{v:?}"), psi_to_json(&p)))
                    .map_err(|e| anyhow!(e))
            })
            .collect::<anyhow::Result<serde_json::Map<String, Value>>>()?;
        let report = stabilization_check(&psi, r.max(psi.nilpotency_index() + 1));
        let problems = block_oracle(&psi, m).map_err(|e| anyhow!(e))?;
        ok &= problems.is_empty();
        if json {
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|(r, k, c, iso)| json!({ "r": r, "kernel_dim": k, "cokernel_dim": c, "comparison_iso": iso }))
                .collect();
            out.push(json!({
                "nilpotency_index": report.nilpotency_index,
                "stable_from": report.stable_from,
                "rows": rows,
                "variants": variants,
                "problems": problems,
            }));
        } else {
            say!(
                "nilpotency index {}, stable from r = {}",
                report.nilpotency_index,
                report.stable_from.map_or("never".to_string(), |s| s.to_string())
            );
            for (r, k, c, iso) in &report.rows {
                say!("  r = {r}: kernel dim {k}, cokernel dim {c}, comparison iso {iso}");
            }
            if problems.is_empty() {
                say!("  oracle: pass");
            } else {
                for p in &problems {
                    say!("  oracle: {p}");
                }
            }
        }
    }
    if json {
        print_many(out);
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_roundtrip(json: bool, input: &Input) -> Outcome {
    let docs = read_docs(input.file.as_ref())?;
    let mut ok = true;
    let mut out = Vec::new();
    for (i, doc) in docs.iter().enumerate() {
        let result = match doc {
            Document::Gluing(g) => roundtrip_gluing(g).map(|_| ()),
            Document::Mmhm(m) => roundtrip_module(m).map(|_| ()),
            Document::Core(_) => Err("a core document carries no Hodge data".to_string()),
        };
        ok &= result.is_ok();
        if json {
            out.push(json!({ "index": i, "pass": result.is_ok(), "message": result.err() }));
        } else {
            match result {
                Ok(()) => say!("document {i}: round trip ok"),
                Err(e) => say!("document {i}: round trip failed: {e}"),
            }
        }
    }
    if json {
        print_json(&json!({ "pass": ok, "documents": out }));
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_suite(json: bool, name: &str, gen: &GenOptions, input: Option<&PathBuf>) -> Outcome {
    let name: SuiteName = name.parse().map_err(|e| anyhow!("{e}"))?;
    let report = match input {
        Some(p) => run_suite_on(name, &read_docs(Some(p))?),
        None => run_suite(name, &gen.config()).map_err(|e| anyhow!(e))?,
    };
    if json {
        say!("{}", report.to_json());
    } else {
        say!(
            "suite {}: {}/{} pass in {:.0} ms",
            report.suite,
            report.passed,
            report.results.len(),
            report.wall_time_ms
        );
        for f in report.failures() {
            say!(
                "  FAIL {} #{}: {}",
                f.suite,
                f.index,
                f.message.as_deref().unwrap_or("")
            );
        }
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_gen(gen: &GenOptions) -> Outcome {
    let data = generate_random(&gen.config()).map_err(|e| anyhow!(e))?;
    let docs: Vec<Value> = data
        .into_iter()
        .map(|g| to_value(&Document::Gluing(g)))
        .collect();
    print_json(&Value::Array(docs));
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    let json = cli.json;
    match &cli.command {
        Command::Validate(input) => cmd_validate(json, input),
        Command::Expand { window, input } => cmd_expand(json, *window, input),
        Command::Cycles(input) => cmd_cycles(input),
        Command::Dual(input) => cmd_dual(input),
        Command::Fourier(input) => cmd_fourier(input),
        Command::Blocks { r, m, file } => cmd_blocks(json, *r, *m, file.as_ref()),
        Command::Roundtrip(input) => cmd_roundtrip(json, input),
        Command::Suite { name, gen, input } => cmd_suite(json, name, gen, input.as_ref()),
        Command::Gen(gen) => cmd_gen(gen),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
