use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use quantum_dtn::dtn::{dtn_matrix, DtnError};
use quantum_dtn::io::{deserialize_graph, deserialize_matrix, export_dot, format_sig, serialize_graph, serialize_matrix};
use quantum_dtn::oracle::{
    parse_grid, reports_to_json, reports_to_table, sweep, verify_grid, Check, OracleError, Verdict,
};
use quantum_dtn::synthesis::{residual, synthesize, SynthesisError};
use quantum_dtn::MetricGraph;

const EXIT_VERIFY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "qdtn", version, about = "Dirichlet-to-Neumann matrices of metric graphs")]
struct Cli {
    /// Residual tolerance for synthesize (default 1e-8·(1+‖A‖∞))
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the DtN matrix R(λ) of a graph
    Assemble {
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// Build a graph whose DtN matrix at λ is the given matrix
    Synthesize {
        matrix: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check the eigenvalue counting identities on a λ grid
    Verify {
        graph: PathBuf,
        /// start:stop:count
        #[arg(long, allow_hyphen_values = true)]
        lambda_grid: String,
        /// Robin levels a,b with 0 <= a < b
        #[arg(long)]
        robin: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// CSV of λ, eigenvalues of R(λ), N_N, N_D and a monotonicity flag
    Sweep {
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda_grid: String,
    },
    /// Graphviz rendering of a graph
    ExportDot { graph: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

struct Failure {
    code: u8,
    message: String,
    /// Printed to stdout despite the nonzero exit (verify reports).
    stdout: Option<String>,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into(), stdout: None }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Failure { code: EXIT_NUMERIC, message: message.into(), stdout: None }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Some(out) = f.stdout {
                print!("{out}");
            }
            eprintln!("qdtn: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<MetricGraph, Failure> {
    deserialize_graph(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn finite(name: &str, x: f64) -> Result<f64, Failure> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Failure::input(format!("{name} must be finite")))
    }
}

fn dtn_failure(e: DtnError) -> Failure {
    match e {
        DtnError::SpectrumHit(_) => Failure::numeric(e.to_string()),
        _ => Failure::input(e.to_string()),
    }
}

fn synthesis_failure(e: SynthesisError) -> Failure {
    match e {
        SynthesisError::NonPositiveLambda(_) | SynthesisError::OrderTooSmall(_) => Failure::input(e.to_string()),
        SynthesisError::Dtn(d) => dtn_failure(d),
        _ => Failure::numeric(e.to_string()),
    }
}

fn oracle_failure(e: OracleError) -> Failure {
    match e {
        OracleError::PivotBreakdown { .. } | OracleError::Linalg(_) => Failure::numeric(e.to_string()),
        OracleError::Dtn(d) => dtn_failure(d),
        _ => Failure::input(e.to_string()),
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Failure::input("--tol must be positive"));
        }
    }
    match &cli.command {
        Command::Assemble { graph, lambda } => {
            let g = load_graph(graph)?;
            let r = dtn_matrix(&g, finite("--lambda", *lambda)?).map_err(dtn_failure)?;
            serialize_matrix(&r).map_err(|e| Failure::numeric(e.to_string()))
        }
        Command::Synthesize { matrix, lambda, out } => {
            let a = deserialize_matrix(&read(matrix)?)
                .map_err(|e| Failure::input(format!("{}: {e}", matrix.display())))?;
            let lambda = finite("--lambda", *lambda)?;
            let g = synthesize(&a, lambda).map_err(synthesis_failure)?;
            let res = residual(&g, &a, lambda).map_err(synthesis_failure)?;
            let tol = cli.tol.unwrap_or(1e-8 * (1.0 + a.norm_inf()));
            if !(res <= tol) {
                return Err(Failure {
                    code: EXIT_VERIFY,
                    message: format!("residual {} exceeds tolerance {}", format_sig(res, 17), format_sig(tol, 17)),
                    stdout: None,
                });
            }
            let text = serialize_graph(&g).map_err(|e| Failure::numeric(e.to_string()))?;
            fs::write(out, text).map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
            Ok(format!("residual {}\n", format_sig(res, 17)))
        }
        Command::Verify { graph, lambda_grid, robin, format } => {
            let g = load_graph(graph)?;
            let grid = parse_grid(lambda_grid).map_err(oracle_failure)?;
            let mut checks = vec![Check::NeumannDirichlet];
            if let Some(spec) = robin {
                let (a, b) = parse_pair(spec)?;
                if !(a >= 0.0 && a < b) {
                    return Err(Failure::input(format!("--robin needs 0 <= a < b (got {spec})")));
                }
                checks.push(Check::Robin { a, b });
            }
            checks.push(Check::Interlacing);
            let mut all = Vec::new();
            let mut text = String::new();
            for check in checks {
                let reports = verify_grid(&g, check, &grid).map_err(oracle_failure)?;
                let title = match check {
                    Check::NeumannDirichlet => "N_N - N_D = n_-".to_string(),
                    Check::Robin { a, b } => format!("N_a - N_b = n_ab  (a = {}, b = {})", format_sig(a, 6), format_sig(b, 6)),
                    Check::Interlacing => format!("0 <= N_N - N_D <= {}", g.boundary_size()),
                };
                if !text.is_empty() {
                    text.push('\n');
                }
                text.push_str(&format!("# {title}\n"));
                text.push_str(&reports_to_table(&reports));
                all.extend(reports);
            }
            let out = match format {
                Format::Text => text,
                Format::Json => reports_to_json(&all),
            };
            let failed = all.iter().filter(|r| r.verdict == Verdict::Fail).count();
            if failed > 0 {
                Err(Failure {
                    code: EXIT_VERIFY,
                    message: format!("{failed} of {} checks failed", all.len()),
                    stdout: Some(out),
                })
            } else {
                Ok(out)
            }
        }
        Command::Sweep { graph, lambda_grid } => {
            let g = load_graph(graph)?;
            let grid = parse_grid(lambda_grid).map_err(oracle_failure)?;
            let rows = sweep(&g, &grid).map_err(oracle_failure)?;
            let k = g.boundary_size();
            let mut s = String::from("lambda");
            for j in 1..=k {
                s.push_str(&format!(",sigma_{j}"));
            }
            s.push_str(",N_N,N_D,monotone\n");
            for row in &rows {
                if row.perturbations > 0 {
                    eprintln!(
                        "qdtn: lambda {} moved to {}",
                        format_sig(row.lambda_requested, 17),
                        format_sig(row.lambda, 17)
                    );
                }
                if row.monotone == Some(false) {
                    eprintln!("qdtn: eigenvalues of R did not decrease at lambda {}", format_sig(row.lambda, 17));
                }
                let mut fields = vec![format_sig(row.lambda, 17)];
                if row.sigma.is_empty() {
                    fields.extend(std::iter::repeat(String::new()).take(k));
                } else {
                    fields.extend(row.sigma.iter().map(|&x| format_sig(x, 17)));
                }
                let count = |c: Option<usize>| c.map_or(String::new(), |n| n.to_string());
                fields.push(count(row.n_neumann));
                fields.push(count(row.n_dirichlet));
                fields.push(match row.monotone {
                    Some(true) => "yes".into(),
                    Some(false) => "no".into(),
                    None => String::new(),
                });
                s.push_str(&fields.join(","));
                s.push('\n');
            }
            Ok(s)
        }
        Command::ExportDot { graph } => Ok(export_dot(&load_graph(graph)?)),
    }
}

fn parse_pair(spec: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::input(format!("--robin expects a,b (got {spec:?})"));
    let (a, b) = spec.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok((finite("robin a", a)?, finite("robin b", b)?))
}
