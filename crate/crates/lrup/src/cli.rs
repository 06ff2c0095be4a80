//! Subcommands of the `lrup` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lrup_core::centrality::{CentralityUpdater, EdgeOp};
use lrup_core::oracle::{dense_update_reference, DENSE_REFERENCE_LIMIT};
use lrup_core::update::{general_update, hermitian_update};
use lrup_core::{DenseMatrix, FunctionSpec, Graph, Scalar, SolveOptions, SparseMatrix, UpdateFactor, C64};
use serde_json::json;

use crate::boundspec::BoundSpec;
use crate::demos::{run_demo, Demo};
use crate::error::{Error, Result};
use crate::experiments::factor_error;
use crate::mm::{load_matrix_market, MmMatrix};
use crate::report::{fmt_f64, fmt_opt, write_dense_csv, write_table, MatrixMeta, RunReport, StepRecord};
use crate::vecspec::{CSpec, VectorSpec};

/// Exit code for a run that hit `--max-m` before the tolerance.
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lrup", version, about = "Krylov approximation of f(A + D) - f(A) for low-rank D")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximate f(A + b c^*) - f(A) and write the factors U, X, V.
    Update(UpdateArgs),
    /// Subgraph centralities of a graph under edge insertions and deletions.
    Centrality(CentralityArgs),
    /// Evaluate a convergence bound over a range of m.
    Bounds(BoundsArgs),
    /// Run one of the synthetic experiments and write its data.
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SolverArgs {
    /// Target value of the error estimate.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Gap d between the compared iterates.
    #[arg(long, default_value_t = 2)]
    pub lookahead: usize,
    /// Cap on Krylov steps.
    #[arg(long = "max-m", default_value_t = 200)]
    pub max_m: usize,
}

impl SolverArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            lookahead: self.lookahead,
            max_m: self.max_m,
            ..SolveOptions::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct UpdateArgs {
    /// Matrix Market file holding A.
    #[arg(long)]
    pub matrix: PathBuf,
    /// exp, invsqrt, inverse, invpow:<g>, log1p-over-z, poly:<c0>,<c1>,..., resolvent:<s>
    #[arg(long)]
    pub function: FunctionSpec,
    /// e:<i>, ones, random[:<seed>] or a Matrix Market n x 1 file.
    #[arg(long, default_value = "e:0")]
    pub b: VectorSpec,
    /// As for b, or b / -b for a Hermitian modification.
    #[arg(long, default_value = "b", allow_hyphen_values = true)]
    pub c: CSpec,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Seed for random vectors; drawn fresh when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also compare against the dense reference (n <= 2000).
    #[arg(long)]
    pub check: bool,
    #[arg(long = "output-dir")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CentralityArgs {
    /// Matrix Market adjacency matrix of a simple undirected graph.
    #[arg(long)]
    pub graph: PathBuf,
    /// CSV of add/remove,i,j rows with zero-based nodes.
    #[arg(long)]
    pub edits: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long = "output-dir")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// JSON bound description.
    #[arg(long)]
    pub spec: PathBuf,
    /// Writes bounds.csv here instead of printing to stdout.
    #[arg(long = "output-dir")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// reorth-comparison, estimator-invsqrt, exp-interval, exp-wedge, markov-invsqrt, convdiff or decay
    pub name: Demo,
    /// Problem size (side^2 for estimator-invsqrt).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "output-dir")]
    pub output_dir: PathBuf,
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Update(a) => cmd_update(&a),
        Command::Centrality(a) => cmd_centrality(&a),
        Command::Bounds(a) => cmd_bounds(&a),
        Command::Demo(a) => cmd_demo(&a),
    }
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file).map_err(|e| Error::io(path, e))
}

fn convert<T: Scalar>(v: &[C64]) -> Vec<T> {
    v.iter().map(|&z| T::from_complex(z)).collect()
}

/// `c = None` means `c = sign * b` with a Hermitian `A`.
fn solve<T: Scalar>(
    a: &SparseMatrix<T>,
    b: &[T],
    c: Option<&[T]>,
    sign: f64,
    f: &FunctionSpec,
    opts: &SolveOptions,
) -> Result<UpdateFactor<T>> {
    Ok(match c {
        None => hermitian_update(a, b, sign, f, opts)?,
        Some(c) => general_update(a, a.adjoint(), b, c, f, opts)?,
    })
}

struct Solved<T> {
    factor: UpdateFactor<T>,
    algorithm: &'static str,
    seconds: f64,
    true_error: Option<f64>,
}

fn solve_and_check<T: Scalar>(
    a: &SparseMatrix<T>,
    b: Vec<C64>,
    c: Option<Vec<C64>>,
    sign: f64,
    args: &UpdateArgs,
) -> Result<Solved<T>> {
    let b: Vec<T> = convert(&b);
    let c_full: Vec<T> = match &c {
        Some(c) => convert(c),
        None => b.iter().map(|x| x.scale(sign)).collect(),
    };
    let hermitian = c.is_none() && a.symmetry_flag();
    let opts = args.solver.options();
    let start = Instant::now();
    let factor = if hermitian {
        solve(a, &b, None, sign, &args.function, &opts)?
    } else {
        solve(a, &b, Some(&c_full), sign, &args.function, &opts)?
    };
    let seconds = start.elapsed().as_secs_f64();
    let true_error = if args.check {
        if a.n() > DENSE_REFERENCE_LIMIT {
            return Err(lrup_core::Error::SizeGuard {
                n: a.n(),
                limit: DENSE_REFERENCE_LIMIT,
            }
            .into());
        }
        let n = a.n();
        let exact = dense_update_reference(
            &a.to_dense(),
            &DenseMatrix::from_columns(n, std::slice::from_ref(&b)),
            &DenseMatrix::from_columns(n, &[c_full]),
            &args.function,
        )?;
        Some(factor_error(&factor.u, &factor.x, factor.v(), &exact))
    } else {
        None
    };
    Ok(Solved {
        factor,
        algorithm: if hermitian { "hermitian" } else { "general" },
        seconds,
        true_error,
    })
}

fn write_factor<T: Scalar>(dir: &Path, f: &UpdateFactor<T>) -> Result<()> {
    write_dense_csv(dir.join("U.csv"), &f.u)?;
    write_dense_csv(dir.join("X.csv"), &f.x)?;
    write_dense_csv(dir.join("V.csv"), f.v())
}

fn finish_update<T: Scalar>(s: Solved<T>, meta: MatrixMeta, seed: u64, args: &UpdateArgs) -> Result<i32> {
    prepare_dir(&args.output_dir)?;
    write_factor(&args.output_dir, &s.factor)?;
    let report = RunReport {
        function: args.function.to_string(),
        algorithm: s.algorithm.to_string(),
        matrix: meta,
        tol: args.solver.tol,
        lookahead: args.solver.lookahead,
        max_m: args.solver.max_m,
        seed,
        steps: s
            .factor
            .estimate_history
            .iter()
            .map(|&(m, estimate)| StepRecord {
                m,
                estimate,
                true_error: None,
            })
            .collect(),
        m: s.factor.m,
        converged: s.factor.converged,
        wall_time_s: s.seconds,
        true_error: s.true_error,
    };
    report.save(args.output_dir.join("report.json"))?;
    let last = report.steps.last().map(|r| r.estimate);
    println!(
        "{} after m = {} ({}), estimate {}, true error {}",
        if report.converged { "converged" } else { "not converged" },
        report.m,
        report.algorithm,
        fmt_opt(last),
        fmt_opt(report.true_error),
    );
    Ok(if report.converged { 0 } else { EXIT_NOT_CONVERGED })
}

pub fn cmd_update(args: &UpdateArgs) -> Result<i32> {
    args.solver.options().validate()?;
    let matrix = load_matrix_market(&args.matrix)?;
    let n = matrix.n();
    let seed = args.seed.unwrap_or_else(rand::random);
    let b = args.b.materialize(n, seed)?;
    let (c, sign) = match &args.c {
        CSpec::SameAsB(s) => (None, *s),
        CSpec::Vector(v) => (Some(v.materialize(n, seed.wrapping_add(1))?), 1.0),
    };
    let meta = MatrixMeta {
        source: args.matrix.display().to_string(),
        n,
        nnz: matrix.nnz(),
        symmetric: matrix.symmetry_flag(),
        complex: matrix.is_complex(),
    };
    let complex_input = b.iter().chain(c.iter().flatten()).any(|z| z.im != 0.0);
    match matrix {
        MmMatrix::Real(a) if !complex_input => {
            let s = solve_and_check(&a, b, c, sign, args)?;
            finish_update(s, meta, seed, args)
        }
        MmMatrix::Real(a) => {
            // a real symmetric matrix is Hermitian over C as well
            let ac = a.to_complex().with_symmetry_flag(a.symmetry_flag())?;
            let s = solve_and_check(&ac, b, c, sign, args)?;
            finish_update(s, meta, seed, args)
        }
        MmMatrix::Complex(a) => {
            let s = solve_and_check(&a, b, c, sign, args)?;
            finish_update(s, meta, seed, args)
        }
    }
}

/// Reads `add,i,j` / `remove,i,j` rows; blank lines and `#` comments are
/// skipped, as is a leading header row.
pub fn read_edits(path: &Path) -> Result<Vec<EdgeOp>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)?;
    let mut out = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(k + 1, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 3 {
            return Err(Error::parse(line, "edit rows must be kind,i,j"));
        }
        let idx = |q: usize| rec[q].parse::<usize>().map_err(|_| Error::parse(line, format!("bad node '{}'", &rec[q])));
        let op = match rec[0].to_ascii_lowercase().as_str() {
            "add" => EdgeOp::Add(idx(1)?, idx(2)?),
            "remove" => EdgeOp::Remove(idx(1)?, idx(2)?),
            _ if k == 0 => continue,
            other => return Err(Error::parse(line, format!("unknown edit kind '{other}'"))),
        };
        out.push(op);
    }
    Ok(out)
}

pub fn cmd_centrality(args: &CentralityArgs) -> Result<i32> {
    let opts = args.solver.options();
    opts.validate()?;
    let adjacency = load_matrix_market(&args.graph)?.into_real()?;
    let graph = Graph::from_adjacency(adjacency)?;
    let edits = match &args.edits {
        Some(p) => read_edits(p)?,
        None => Vec::new(),
    };
    let n = graph.n();
    let edges = graph.num_edges();

    let t0 = Instant::now();
    let mut updater = CentralityUpdater::new(graph, opts)?;
    let baseline_s = t0.elapsed().as_secs_f64();
    let diag0 = updater.exp_diagonal().to_vec();
    let cent0 = updater.centralities();

    let t1 = Instant::now();
    let mut edit_rows = Vec::with_capacity(edits.len());
    let mut all_converged = true;
    for (k, op) in edits.iter().enumerate() {
        let rep = updater.apply(*op)?;
        all_converged &= rep.converged;
        let (i, j) = op.endpoints();
        let kind = if matches!(op, EdgeOp::Add(..)) { "add" } else { "remove" };
        let steps = |q: usize| rep.steps.get(q).map_or_else(|| "NA".to_string(), |s| s.to_string());
        edit_rows.push(vec![
            k.to_string(),
            kind.to_string(),
            i.to_string(),
            j.to_string(),
            steps(0),
            steps(1),
            rep.converged.to_string(),
            fmt_f64(rep.trace),
        ]);
    }
    let edits_s = t1.elapsed().as_secs_f64();

    prepare_dir(&args.output_dir)?;
    let diag1 = updater.exp_diagonal();
    let cent1 = updater.centralities();
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| vec![i.to_string(), fmt_f64(diag0[i]), fmt_f64(diag1[i]), fmt_f64(cent0[i]), fmt_f64(cent1[i])])
        .collect();
    write_table(
        args.output_dir.join("centrality.csv"),
        &["node", "exp_diag_before", "exp_diag_after", "centrality_before", "centrality_after"],
        &rows,
    )?;
    write_table(
        args.output_dir.join("edits.csv"),
        &["edit", "kind", "i", "j", "steps_first", "steps_second", "converged", "trace_after"],
        &edit_rows,
    )?;
    write_json(
        &args.output_dir.join("report.json"),
        &json!({
            "graph": args.graph.display().to_string(), "n": n, "edges_before": edges,
            "edges_after": updater.graph().num_edges(), "edits": edits.len(),
            "tol": args.solver.tol, "lookahead": args.solver.lookahead, "max_m": args.solver.max_m,
            "baseline_time_s": baseline_s, "edit_time_s": edits_s, "converged": all_converged,
        }),
    )?;
    println!("{} edits on n = {n}, baseline {baseline_s:.3} s, updates {edits_s:.3} s", edits.len());
    Ok(if all_converged { 0 } else { EXIT_NOT_CONVERGED })
}

pub fn cmd_bounds(args: &BoundsArgs) -> Result<i32> {
    let text = fs::read_to_string(&args.spec).map_err(|e| Error::io(&args.spec, e))?;
    let spec = BoundSpec::from_json(&text)?;
    let rows: Vec<Vec<String>> = spec
        .evaluate()?
        .into_iter()
        .map(|r| vec![r.m.to_string(), fmt_opt(r.bound), fmt_opt(r.rate)])
        .collect();
    let header = ["m", "bound", "rate"];
    match &args.output_dir {
        Some(dir) => {
            prepare_dir(dir)?;
            write_table(dir.join("bounds.csv"), &header, &rows)?;
        }
        None => {
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            w.write_record(header)?;
            for r in &rows {
                w.write_record(r)?;
            }
            w.flush().map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    Ok(0)
}

pub fn cmd_demo(args: &DemoArgs) -> Result<i32> {
    let seed = args.seed.unwrap_or_else(rand::random);
    let out = run_demo(args.name, args.n, seed)?;
    prepare_dir(&args.output_dir)?;
    let name = args.name.name();
    let header: Vec<&str> = out.header.iter().map(String::as_str).collect();
    write_table(args.output_dir.join(format!("{name}.csv")), &header, &out.rows)?;
    write_json(&args.output_dir.join(format!("{name}.json")), &out.meta)?;
    println!("{name}: {} rows written to {}", out.rows.len(), args.output_dir.display());
    Ok(0)
}
