//! `sparsegb` command-line front end.
//!
//! Without `--output-dir` the main artifact goes to stdout and the stats
//! table to stderr; with it, artifacts are written as files and the table
//! is printed on stdout.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sparsegb::fglm::{find_roots, lex_gb};
use sparsegb::field::{Field, FieldSpec, PrimeField, RationalField, BENCH_PRIME};
use sparsegb::io::{sparse_poly_doc, split_blocks, Document, SparseProblem};
use sparsegb::m2::{m2_sgb, m2_sgb_inspect, M2Options};
use sparsegb::multihom::{
    change_coords, check_no_infinity, macaulay_bound, m3h, CoordinateChange, MultiOrder, MultihomSystem, Solver,
    CHANGE_RETRIES,
};
use sparsegb::orders::{BaseOrder, SparseOrder};
use sparsegb::poly::SparsePoly;
use sparsegb::semigroup::{Monomial, Point, SemigroupContext};
use sparsegb::validation::{dense_macaulay_size, random_sparse_instance, run_all};
use sparsegb::Error;

#[derive(Parser)]
#[command(name = "sparsegb", version, about = "Sparse Groebner bases and multihomogeneous solving")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Sparse Groebner basis of a sparse-model document.
    Sgb,
    /// Multihomogeneous Macaulay matrix of a multihomogeneous document.
    M3h,
    /// Multiplication matrices, lex basis and F_p roots.
    Solve,
    /// Sparse versus dense matrix sizes per degree, as CSV.
    Bench,
    /// Cross-validation of the engine against the oracles.
    OracleCheck,
}

#[derive(Clone, Copy, ValueEnum)]
enum DegreeOrder {
    /// Total degree, then lexicographic on the degree vector.
    Totlex,
}

#[derive(Args)]
struct Opts {
    /// Input document (JSON, schema v1).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Base order on exponents: grevlex or lex.
    #[arg(long, global = true, default_value = "grevlex")]
    order: BaseOrder,
    #[arg(long, global = true, value_enum, default_value = "totlex")]
    degree_order: DegreeOrder,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Witness degrees, one per polynomial (e.g. 3,4); auto mode if absent.
    #[arg(long, global = true, value_delimiter = ',')]
    witness: Option<Vec<u32>>,
    /// Multidegree for m3h (e.g. 2,1); defaults to the Macaulay bound D_N.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    degree: Option<Vec<i64>>,
    /// Override the document's field with F_p.
    #[arg(long, global = true)]
    field_p: Option<u64>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
}

/// Files to write plus a human-readable table. The first file is the one
/// printed to stdout when no output directory is given.
struct Artifacts {
    files: Vec<(String, String)>,
    table: String,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command, &cli.opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<Error>().map_or(1, Error::code);
            ExitCode::from(code as u8)
        }
    }
}

fn run(command: Command, opts: &Opts) -> anyhow::Result<()> {
    let artifacts = match command {
        Command::OracleCheck => oracle_check(opts)?,
        Command::Bench if opts.input.is_none() => bench_builtin(opts)?,
        _ => {
            let doc = load(opts)?;
            let spec = match opts.field_p {
                Some(p) => FieldSpec::Prime { p },
                None => doc.field.clone(),
            };
            match spec {
                FieldSpec::Prime { p } => dispatch(command, &PrimeField::new(p)?, &doc, opts)?,
                FieldSpec::Rational => dispatch(command, &RationalField, &doc, opts)?,
            }
        }
    };
    emit(&artifacts, opts.output_dir.as_deref())
}

fn load(opts: &Opts) -> anyhow::Result<Document> {
    let path = opts.input.as_ref().context("--input is required for this command")?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Document::parse(&text)?)
}

fn dispatch<F: Field + Clone>(command: Command, field: &F, doc: &Document, opts: &Opts) -> anyhow::Result<Artifacts> {
    Ok(match command {
        Command::Sgb => {
            let problem = doc.sparse()?.problem(field)?;
            sgb(field, &problem, opts)?
        }
        Command::M3h => m3h_cmd(field, &doc.multihom()?.system(field)?, opts)?,
        Command::Solve => solve(field, doc.multihom()?.system(field)?, opts)?,
        Command::Bench => {
            let problem = doc.sparse()?.problem(field)?;
            let witness = opts.witness.clone().unwrap_or_else(|| vec![4; problem.polys.len()]);
            bench_csv(field, &[("input".to_string(), problem, witness)], &opts.order)?
        }
        Command::OracleCheck => unreachable!("handled before loading input"),
    })
}

fn emit(artifacts: &Artifacts, dir: Option<&Path>) -> anyhow::Result<()> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, body) in &artifacts.files {
                let path = dir.join(name);
                fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
            }
            print!("{}", artifacts.table);
        }
        None => {
            if let Some((_, body)) = artifacts.files.first() {
                print!("{body}");
            }
            eprint!("{}", artifacts.table);
        }
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn metadata<F: Field>(field: &F, command: &str, opts: &Opts) -> Value {
    json!({
        "command": command,
        "field": serde_json::to_value(field.spec()).expect("field spec serializes"),
        "order": opts.order.name(),
        "degree_order": "totlex",
        "seed": opts.seed,
    })
}

/// Right-aligned text table.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  "));
    };
    line(header.to_vec(), &mut out);
    for r in rows {
        line(r.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

const STATS_HEADER: [&str; 10] =
    ["generator", "degree", "criterion_rows", "f5_rows", "rows", "cols", "nnz", "rank", "zero_rows", "new_elements"];

fn sgb<F: Field>(field: &F, problem: &SparseProblem<F::Elem>, opts: &Opts) -> anyhow::Result<Artifacts> {
    let order = SparseOrder::new(problem.ctx.clone(), opts.order.clone());
    let options = M2Options { witness: opts.witness.clone(), auto_cap: None };
    let basis = m2_sgb(field, &order, &problem.polys, &options)?;
    let stats: Vec<Vec<String>> = basis
        .stats
        .iter()
        .map(|s| {
            [s.generator, s.degree as usize, s.criterion_rows, s.f5_rows, s.rows, s.cols, s.nnz, s.rank, s.zero_rows, s.new_elements]
                .iter()
                .map(ToString::to_string)
                .collect()
        })
        .collect();
    let mut out = metadata(field, "sgb", opts);
    out["witness"] = json!(basis.witness);
    out["heuristic"] = json!(basis.heuristic);
    out["basis"] = serde_json::to_value(basis.elements.iter().map(|g| sparse_poly_doc(field, g)).collect::<Vec<_>>())?;
    out["leading_monomials"] = json!(basis.leading_monomials().iter().map(|m| m.point.0.clone()).collect::<Vec<_>>());
    out["stats"] = serde_json::to_value(&basis.stats)?;
    let mut summary = table(&STATS_HEADER, &stats);
    let _ = writeln!(
        summary,
        "basis size {}, witness {:?}{}",
        basis.elements.len(),
        basis.witness,
        if basis.heuristic { " (auto mode heuristic, not a certificate)" } else { "" }
    );
    Ok(Artifacts {
        files: vec![("sgb.json".into(), pretty(&out)), ("sgb_stats.csv".into(), csv(&STATS_HEADER, &stats))],
        table: summary,
    })
}

fn m3h_cmd<F: Field>(field: &F, system: &MultihomSystem<F::Elem>, opts: &Opts) -> anyhow::Result<Artifacts> {
    let degree = match &opts.degree {
        Some(d) => d.clone(),
        None => macaulay_bound(&system.degrees, &system.blocks),
    };
    if degree.len() != system.blocks.len() {
        anyhow::bail!("--degree has {} entries for {} blocks", degree.len(), system.blocks.len());
    }
    let k = system.polys.len();
    let matrix = m3h(field, system, k, &degree, &MultiOrder(opts.order.clone()));
    let echelon = matrix.rref(field);
    let row = vec![
        k.to_string(),
        format!("{degree:?}").replace(' ', ""),
        matrix.nrows().to_string(),
        matrix.ncols().to_string(),
        matrix.nnz().to_string(),
        echelon.rank().to_string(),
        echelon.zero_rows.to_string(),
    ];
    let header = ["k", "degree", "rows", "cols", "nnz", "rank", "zero_rows"];
    let mut out = metadata(field, "m3h", opts);
    out["k"] = json!(k);
    out["degree"] = json!(degree);
    out["matrix"] = matrix.to_json(field);
    out["stats"] = json!({
        "rows": matrix.nrows(),
        "cols": matrix.ncols(),
        "nnz": matrix.nnz(),
        "rank": echelon.rank(),
        "zero_rows": echelon.zero_rows,
    });
    let rows = vec![row];
    Ok(Artifacts {
        files: vec![("m3h.json".into(), pretty(&out)), ("m3h_stats.csv".into(), csv(&header, &rows))],
        table: table(&header, &rows),
    })
}

fn triplets<F: Field>(field: &F, m: &[Vec<F::Elem>]) -> Value {
    let entries: Vec<Value> = m
        .iter()
        .enumerate()
        .flat_map(|(i, r)| {
            r.iter().enumerate().filter(|(_, c)| !field.is_zero(c)).map(move |(j, c)| json!([i, j, field.format(c)]))
        })
        .collect();
    json!({ "rows": m.len(), "cols": m.first().map_or(0, Vec::len), "entries": entries })
}

/// Coordinates without solutions at infinity: the input itself if it
/// qualifies, otherwise the first good seeded change of coordinates.
fn generic_coordinates<F: Field>(
    field: &F,
    system: MultihomSystem<F::Elem>,
    order: &MultiOrder,
    seed: u64,
) -> anyhow::Result<(MultihomSystem<F::Elem>, Option<CoordinateChange<F::Elem>>)> {
    if check_no_infinity(field, &system, order)? {
        return Ok((system, None));
    }
    for attempt in 0..CHANGE_RETRIES as u64 {
        let (changed, change) = change_coords(field, &system, seed.wrapping_add(attempt))?;
        if check_no_infinity(field, &changed, order)? {
            log::info!("using coordinate change with seed {}", change.seed);
            return Ok((changed, Some(change)));
        }
    }
    Err(Error::SolutionsAtInfinity.into())
}

fn solve<F: Field + Clone>(field: &F, system: MultihomSystem<F::Elem>, opts: &Opts) -> anyhow::Result<Artifacts> {
    let order = MultiOrder(opts.order.clone());
    let blocks = system.blocks.clone();
    let bezout = system.bezout_number();
    let (system, change) = generic_coordinates(field, system, &order, opts.seed)?;
    let solver = Solver::new(field.clone(), system, order)?;
    let mats = solver.variable_matrices()?;
    let gb = lex_gb(field, &mats, &solver.unit_vector())?;
    let (roots, roots_note) = match find_roots(field, &gb) {
        Ok(found) => {
            let mapped: Vec<Vec<F::Elem>> = match &change {
                None => found,
                Some(c) => found.iter().filter_map(|r| c.map_back(field, &blocks, r)).collect(),
            };
            (Some(mapped), Value::Null)
        }
        Err(e @ (Error::FieldTooLarge(_) | Error::RootsNeedPrimeField | Error::NotTriangular(_))) => {
            (None, json!(e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };
    let term = |m: &sparsegb::multihom::Exps, c: &F::Elem| json!({ "exponents": m.0, "coeff": field.format(c) });
    let mut out = metadata(field, "solve", opts);
    out["bezout_number"] = json!(bezout.to_string());
    out["basis"] = json!({
        "degree": solver.basis.degree,
        "size": solver.dimension(),
        "leading": solver.basis.leading,
        "monomials": solver.basis.monomials.iter().map(|m| split_blocks(&blocks, m)).collect::<Vec<_>>(),
        "affine": solver.affine_basis(),
    });
    out["coordinate_change"] = match &change {
        None => Value::Null,
        Some(c) => json!({
            "seed": c.seed,
            "matrices": c.matrices.iter().map(|m| m.iter().map(|r| r.iter().map(|x| field.format(x)).collect::<Vec<_>>()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
    };
    out["multiplication_matrices"] =
        json!(mats.iter().map(|m| json!({ "form": m.form, "matrix": triplets(field, &m.rows) })).collect::<Vec<_>>());
    out["lex_gb"] = json!({
        "variables": gb.nvars,
        "shape": gb.shape,
        "staircase": gb.staircase,
        "polynomials": gb.polys.iter().map(|p| { let mut t: Vec<Value> = p.terms().map(|(m, c)| term(m, c)).collect(); t.reverse(); t }).collect::<Vec<_>>(),
    });
    out["roots"] = match &roots {
        Some(r) => json!(r.iter().map(|p| p.iter().map(|x| field.format(x)).collect::<Vec<_>>()).collect::<Vec<_>>()),
        None => Value::Null,
    };
    out["roots_note"] = roots_note;
    let header = ["bezout", "basis", "matrices", "lex_gb", "shape", "roots", "coords"];
    let row = vec![
        bezout.to_string(),
        solver.dimension().to_string(),
        mats.len().to_string(),
        gb.polys.len().to_string(),
        gb.shape.to_string(),
        roots.as_ref().map_or("n/a".into(), |r| r.len().to_string()),
        change.as_ref().map_or("input".into(), |c| format!("seed {}", c.seed)),
    ];
    Ok(Artifacts { files: vec![("solve.json".into(), pretty(&out))], table: table(&header, &[row]) })
}

const BENCH_HEADER: [&str; 11] =
    ["instance", "generator", "degree", "rows", "cols", "rank", "zero_rows", "wall_ms", "dense_rows", "dense_cols", "smaller"];

fn bench_csv<F: Field>(
    field: &F,
    instances: &[(String, SparseProblem<F::Elem>, Vec<u32>)],
    base: &BaseOrder,
) -> anyhow::Result<Artifacts> {
    let mut rows = Vec::new();
    for (name, problem, witness) in instances {
        let order = SparseOrder::new(problem.ctx.clone(), base.clone());
        let options = M2Options { witness: Some(witness.clone()), auto_cap: None };
        let mut clock = Instant::now();
        let mut err = None;
        m2_sgb_inspect(field, &order, &problem.polys, &options, |step| {
            let ms = clock.elapsed().as_secs_f64() * 1e3;
            let (nr, nc) = (step.matrix.nrows(), step.matrix.ncols());
            let dense = dense_macaulay_size(&problem.ctx, &problem.polys[..=step.generator], step.degree);
            if dense.is_none() {
                err = Some(name.clone());
            }
            let (dr, dc) = dense.unwrap_or((0, 0));
            rows.push(vec![
                name.clone(),
                step.generator.to_string(),
                step.degree.to_string(),
                nr.to_string(),
                nc.to_string(),
                step.echelon.rank().to_string(),
                step.echelon.zero_rows.to_string(),
                format!("{ms:.3}"),
                dr.to_string(),
                dc.to_string(),
                (nc < dc && nr <= dr).to_string(),
            ]);
            clock = Instant::now();
        })?;
        if let Some(name) = err {
            anyhow::bail!("instance {name}: dense comparison needs polytopes in the nonnegative orthant");
        }
    }
    Ok(Artifacts { files: vec![("bench.csv".into(), csv(&BENCH_HEADER, &rows))], table: table(&BENCH_HEADER, &rows) })
}

/// The unit square pair plus seeded random instances over `F_p`.
fn bench_builtin(opts: &Opts) -> anyhow::Result<Artifacts> {
    let field = PrimeField::new(opts.field_p.unwrap_or(BENCH_PRIME))?;
    let square: Vec<Point> = [[0, 0], [1, 0], [0, 1], [1, 1]].iter().map(|p| Point(p.to_vec())).collect();
    let ctx = std::sync::Arc::new(SemigroupContext::new(vec![square.clone()])?);
    let polys = (0..2u64)
        .map(|i| {
            SparsePoly::from_terms(
                &field,
                square.iter().enumerate().map(|(j, p)| {
                    (Monomial { point: p.clone() }, field.random_elem(opts.seed.wrapping_mul(31).wrapping_add(4 * i + j as u64)))
                }),
            )
        })
        .collect();
    let mut instances = vec![("unit_square".to_string(), SparseProblem { ctx, polys }, vec![4, 4])];
    for i in 0..3 {
        let inst = random_sparse_instance(&field, opts.seed.wrapping_add(i));
        instances.push((format!("random_{}", inst.seed), SparseProblem { ctx: inst.ctx, polys: inst.polys }, inst.witness));
    }
    if let Some(w) = &opts.witness {
        for (_, p, witness) in &mut instances {
            *witness = w.iter().copied().cycle().take(p.polys.len()).collect();
        }
    }
    bench_csv(&field, &instances, &opts.order)
}

fn oracle_check(opts: &Opts) -> anyhow::Result<Artifacts> {
    let outcomes = run_all(opts.seed)?;
    let mut text = String::new();
    for o in &outcomes {
        let _ = writeln!(text, "{}", o.line());
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    let artifacts = Artifacts { files: vec![("oracle_check.txt".into(), text.clone())], table: text };
    if failed.is_empty() {
        Ok(artifacts)
    } else {
        emit(&artifacts, opts.output_dir.as_deref())?;
        Err(Error::CriteriaFailed(failed).into())
    }
}
