use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use hv_core::algebra::{bracket, jacobiator, Generator, LieElement};
use hv_core::classifier::{i_torsion, solve_scalar, support_shape, ClassifierError, ClassifyReport};
use hv_core::modules::{build_window, is_reducible, IntermediateParams, ModuleSpec, ModuleSpecJson, ModuleWindow};
use hv_core::rational::{format_rational, parse_rational, Rational};
use hv_core::verma::{weight_dims, HighestWeight, SingularReport, VermaModule};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "hv", version, about = "Twisted Heisenberg-Virasoro algebra toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bracket of two elements, e.g. "x[2]" "x[-2] + 1/2*I[-2]".
    Bracket { a: String, b: String },
    /// Antisymmetry and Jacobi identity on all basis triples with |index| <= N.
    CheckAxioms {
        #[arg(long, default_value_t = 4)]
        window: i64,
    },
    /// Action matrices of a module on the window [-N, N].
    ModuleTable {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 4)]
        window: i64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Solution families for I(i) acting on V(alpha, beta).
    Classify {
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        alpha: Rational,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        beta: Rational,
        #[arg(long, default_value_t = 6)]
        window: i64,
    },
    /// Whether V(alpha, beta; F) is reducible.
    Reducible {
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        alpha: Rational,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        beta: Rational,
        #[arg(long = "F", value_parser = rational, allow_hyphen_values = true)]
        f: Rational,
    },
    /// Weight-space dimensions of a Verma module for depths 0..=max.
    VermaDims {
        #[arg(long)]
        max: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Singular vectors at a given depth of a Verma module.
    VermaSingular {
        /// lambda,lambda_I,c_D,c_DI,c_I
        #[arg(long, value_parser = highest_weight, allow_hyphen_values = true)]
        hw: HighestWeight,
        #[arg(long)]
        depth: u32,
    },
    /// Per-index dimension of the common kernel of I(i), j <= i <= window.
    Torsion {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        j: u32,
        #[arg(long, default_value_t = 6)]
        window: i64,
    },
    /// Classify every point of a JSON grid [{"alpha": .., "beta": ..}, ..].
    Sweep {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 6)]
        window: i64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn highest_weight(s: &str) -> Result<HighestWeight, String> {
    s.parse()
        .map_err(|e: hv_core::rational::ParseRationalError| e.to_string())
}

enum Failure {
    /// Bad input: exit code 2.
    Input(anyhow::Error),
    /// A checked property does not hold: exit code 1.
    Property(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<(), Failure>;

fn emit(v: &Value) {
    println!("{v}");
}

fn element(s: &str) -> anyhow::Result<LieElement> {
    s.parse().map_err(|e| anyhow!("cannot parse element {s:?}: {e}"))
}

fn terms_json(e: &LieElement) -> Value {
    Value::Array(
        e.iter()
            .map(|(g, c)| json!([g.to_string(), format_rational(c)]))
            .collect(),
    )
}

fn load_spec(path: &Path) -> anyhow::Result<ModuleSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let j: ModuleSpecJson = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    ModuleSpec::try_from(j).map_err(|e| anyhow!("{e}"))
}

fn window(spec: &ModuleSpec, n: i64) -> anyhow::Result<ModuleWindow> {
    build_window(spec, n).map_err(|e| anyhow!("{e}"))
}

fn classify_error(e: ClassifierError) -> Failure {
    match e {
        ClassifierError::IrrationalBranch(_) | ClassifierError::Unresolved(_) | ClassifierError::Unclassified(_) => {
            Failure::Property(e.to_string())
        }
        _ => Failure::Input(anyhow!("{e}")),
    }
}

fn cmd_check_axioms(n: i64) -> Outcome {
    if n < 0 {
        return Err(anyhow!("window must be nonnegative").into());
    }
    let basis = Generator::basis(n);
    let mut failures = Vec::new();
    let mut triples = 0u64;
    for &a in &basis {
        for &b in &basis {
            let anti = bracket(&a.into(), &b.into()) + bracket(&b.into(), &a.into());
            if !anti.is_zero() {
                failures.push(format!("antisymmetry {a} {b}"));
            }
            for &c in &basis {
                triples += 1;
                if !jacobiator(&a.into(), &b.into(), &c.into()).is_zero() {
                    failures.push(format!("jacobi {a} {b} {c}"));
                }
            }
        }
    }
    emit(&json!({ "window": n, "triples": triples, "holds": failures.is_empty(), "failures": failures }));
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Property(format!("{} identities fail", failures.len())))
    }
}

fn cmd_module_table(spec: &Path, n: i64, format: Format) -> Outcome {
    let spec = load_spec(spec)?;
    let w = window(&spec, n)?;
    let mut keys: Vec<(Generator, i64)> = w
        .actions()
        .map(|(k, _)| *k)
        .filter(|(g, k)| (k + g.degree()).abs() <= n)
        .collect();
    keys.sort();
    match format {
        Format::Csv => {
            let mut out = io::stdout().lock();
            let _ = writeln!(out, "generator,index,target,row,col,value");
            for (g, k) in keys {
                let b = w.action(g, k).expect("listed action");
                for r in 0..b.rows() {
                    for c in 0..b.cols() {
                        let _ = writeln!(
                            out,
                            "{g},{k},{},{r},{c},{}",
                            k + g.degree(),
                            format_rational(b.get(r, c))
                        );
                    }
                }
            }
        }
        Format::Json => {
            let actions: Vec<Value> = keys
                .into_iter()
                .map(|(g, k)| {
                    let b = w.action(g, k).expect("listed action");
                    let rows: Vec<Vec<String>> = b
                        .to_rows()
                        .iter()
                        .map(|r| r.iter().map(format_rational).collect())
                        .collect();
                    json!({ "generator": g.to_string(), "index": k, "target": k + g.degree(), "block": rows })
                })
                .collect();
            let dims: Vec<Value> = w.dims().iter().map(|(k, d)| json!([k, d])).collect();
            emit(&json!({
                "spec": ModuleSpecJson::from(&spec),
                "window": n,
                "dims": dims,
                "actions": actions,
            }));
        }
    }
    Ok(())
}

fn cmd_classify(alpha: &Rational, beta: &Rational, n: i64) -> Outcome {
    let fams = solve_scalar(alpha, beta, n).map_err(classify_error)?;
    let report = ClassifyReport::new(alpha, beta, n, &fams);
    emit(&serde_json::to_value(report).expect("serializable report"));
    Ok(())
}

fn cmd_verma_dims(max: u32, format: Format) -> Outcome {
    let dims = weight_dims(max as i64);
    match format {
        Format::Json => emit(&json!({ "dims": dims })),
        Format::Csv => {
            println!("depth,dim");
            for (d, n) in dims.iter().enumerate() {
                println!("{d},{n}");
            }
        }
    }
    Ok(())
}

fn cmd_verma_singular(hw: &HighestWeight, depth: u32) -> Outcome {
    if depth == 0 {
        return Err(anyhow!("depth must be at least 1").into());
    }
    let m = VermaModule::new(hw.clone());
    let vecs = m.singular_space(depth as i64);
    emit(&serde_json::to_value(SingularReport::new(hw, depth as i64, &vecs)).expect("serializable report"));
    if vecs.iter().all(|v| m.verify_singular(v)) {
        Ok(())
    } else {
        Err(Failure::Property(
            "a reported vector is not annihilated by x_3, I(2) or I(3)".into(),
        ))
    }
}

fn cmd_torsion(spec: &Path, j: u32, n: i64) -> Outcome {
    let spec = load_spec(spec)?;
    let w = window(&spec, n)?;
    let t = i_torsion(&w, j as i64);
    let rows: Vec<Value> = t.iter().map(|(k, d)| json!({ "index": k, "dim": d })).collect();
    emit(&json!({
        "j": j,
        "window": n,
        "torsion": rows,
        "shape": format!("{:?}", support_shape(w.dims())),
    }));
    Ok(())
}

#[derive(Deserialize)]
struct GridPoint {
    alpha: String,
    beta: String,
}

fn threads() -> usize {
    std::env::var("HV_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn cmd_sweep(grid: &Path, n: i64) -> Outcome {
    let text = fs::read_to_string(grid).with_context(|| format!("reading {}", grid.display()))?;
    let points: Vec<GridPoint> = serde_json::from_str(&text).with_context(|| format!("parsing {}", grid.display()))?;
    let parsed: Vec<(Rational, Rational)> = points
        .iter()
        .map(|p| {
            Ok((
                rational(&p.alpha).map_err(|e| anyhow!(e))?,
                rational(&p.beta).map_err(|e| anyhow!(e))?,
            ))
        })
        .collect::<anyhow::Result<_>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads())
        .build()
        .context("starting worker threads")?;
    let lines: Vec<(Value, bool)> = pool.install(|| {
        parsed
            .par_iter()
            .enumerate()
            .map(|(k, (a, b))| match solve_scalar(a, b, n) {
                Ok(fams) => {
                    let mut v = serde_json::to_value(ClassifyReport::new(a, b, n, &fams)).expect("serializable report");
                    v["index"] = json!(k);
                    (v, true)
                }
                Err(e) => (
                    json!({ "index": k, "alpha": format_rational(a), "beta": format_rational(b), "error": e.to_string() }),
                    false,
                ),
            })
            .collect()
    });
    let mut ok = true;
    for (v, good) in &lines {
        emit(v);
        ok &= good;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Property("some grid points could not be classified".into()))
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Bracket { a, b } => {
            let e = bracket(&element(&a)?, &element(&b)?);
            emit(&json!({ "result": terms_json(&e) }));
            Ok(())
        }
        Command::CheckAxioms { window } => cmd_check_axioms(window),
        Command::ModuleTable { spec, window, format } => cmd_module_table(&spec, window, format),
        Command::Classify { alpha, beta, window } => cmd_classify(&alpha, &beta, window),
        Command::Reducible { alpha, beta, f } => {
            emit(&json!({ "reducible": is_reducible(&IntermediateParams::new(alpha, beta, f)) }));
            Ok(())
        }
        Command::VermaDims { max, format } => cmd_verma_dims(max, format),
        Command::VermaSingular { hw, depth } => cmd_verma_singular(&hw, depth),
        Command::Torsion { spec, j, window } => cmd_torsion(&spec, j, window),
        Command::Sweep { grid, window } => cmd_sweep(&grid, window),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property(msg)) => {
            eprintln!("hv: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("hv: {e:#}");
            ExitCode::from(2)
        }
    }
}
