//! stabctx: build stabilizer contextuality witness graphs, compute their
//! independence numbers exactly, verify the construction end to end, and
//! classify states against the magic polytopes.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 resource limit (solver timeout).

mod config;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use stabctx::graph::{sigma_operator, Backend, ExclusivityGraph};
use stabctx::mis::{self, SolveOptions};
use stabctx::mub::{FacetVector, PhaseSpace};
use stabctx::weyl::CMatrix;
use stabctx::{classify, verify};
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Duration;

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "stabctx",
    version,
    about = "Stabilizer contextuality witnesses: graphs, independence numbers, state classification"
)]
struct Cli {
    /// key=value config file; flags override it, it overrides defaults
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build exclusivity graphs and export DIMACS or JSON
    Graph(GraphArgs),
    /// Exact independence numbers with sandwich certificates
    Alpha(AlphaArgs),
    /// Run the verification suite and report per-criterion verdicts
    Verify(VerifyArgs),
    /// Classify a state against the simulable and stabilizer polytopes
    Classify(ClassifyArgs),
    /// Scan a 2D slice of state space and emit CSV
    Slice(SliceArgs),
    /// Dump operators or witness projectors as JSON
    DumpOps(DumpOpsArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Prime dimension
    #[arg(long)]
    p: Option<u32>,
    /// Facet index or "all"
    #[arg(long)]
    facet: Option<String>,
    /// symbolic | numeric | both
    #[arg(long)]
    backend: Option<String>,
    /// dimacs | json
    #[arg(long)]
    format: Option<String>,
    /// Output directory (files are named graph_p<p>_facet<i>.<ext>)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AlphaArgs {
    /// Prime dimension (ignored when --graph is given)
    #[arg(long)]
    p: Option<u32>,
    /// Facet index or "all"
    #[arg(long)]
    facet: Option<String>,
    /// symbolic | numeric | both
    #[arg(long)]
    backend: Option<String>,
    /// Solve an external graph file (.dimacs/.col or .json) instead
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Partition sidecar JSON for an external DIMACS graph
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Abort the search after this many seconds per facet
    #[arg(long)]
    timeout_secs: Option<u64>,
    /// Worker threads for solving facets in parallel
    #[arg(long)]
    threads: Option<usize>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated primes to verify, subset of 2,3
    #[arg(long)]
    p: Option<String>,
    /// Random state pairs per bijection check
    #[arg(long)]
    trials: Option<usize>,
    /// RNG seed for the randomized criteria
    #[arg(long)]
    seed: Option<u64>,
    /// Write the full JSON report here as well
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Prime dimension
    #[arg(long)]
    p: Option<u32>,
    /// Named state (strange | tstate | mixed) or a path to a JSON matrix
    #[arg(long)]
    state: Option<String>,
    /// Boundary tolerance for the class decision
    #[arg(long)]
    tolerance: Option<f64>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SliceArgs {
    /// Prime dimension
    #[arg(long)]
    p: Option<u32>,
    /// Grid resolution per axis
    #[arg(long)]
    grid: Option<usize>,
    /// Scan range [-range, range] on both axes
    #[arg(long)]
    range: Option<f64>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DumpOpsArgs {
    /// Prime dimension
    #[arg(long)]
    p: Option<u32>,
    /// mub | facets | witness
    #[arg(long)]
    kind: Option<String>,
    /// Facet index for --kind witness
    #[arg(long)]
    facet: Option<String>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

fn usage<M: Display>(m: M) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: m.to_string(),
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    let cfg = match config::FileConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return std::process::ExitCode::from(EXIT_USAGE);
        }
    };
    let outcome = match cli.command {
        Command::Graph(args) => run_graph(args, &cfg),
        Command::Alpha(args) => run_alpha(args, &cfg),
        Command::Verify(args) => run_verify(args, &cfg),
        Command::Classify(args) => run_classify(args, &cfg),
        Command::Slice(args) => run_slice(args, &cfg),
        Command::DumpOps(args) => run_dump_ops(args, &cfg),
    };
    match outcome {
        Ok(code) => std::process::ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            std::process::ExitCode::from(f.code)
        }
    }
}

fn cfg_get<T: std::str::FromStr>(cfg: &config::FileConfig, key: &str) -> Result<Option<T>, Failure>
where
    T::Err: Display,
{
    cfg.get(key).map_err(|e| usage(format!("{e:#}")))
}

fn phase_space(p: u32) -> Result<PhaseSpace, Failure> {
    if !stabctx::ffield::is_prime(p) {
        return Err(usage(format!("p must be prime, got {p}")));
    }
    PhaseSpace::new(p).map_err(|e| usage(e))
}

#[derive(Clone, Copy)]
enum FacetSel {
    All,
    Index(usize),
}

fn parse_facet(s: Option<String>, cfg: &config::FileConfig) -> Result<FacetSel, Failure> {
    let from_cfg: Option<String> = cfg_get(cfg, "facet")?;
    let chosen = config::resolve(s, from_cfg, "all".to_string());
    if chosen == "all" {
        Ok(FacetSel::All)
    } else {
        chosen
            .parse::<usize>()
            .map(FacetSel::Index)
            .map_err(|_| usage(format!("facet must be an index or 'all', got '{chosen}'")))
    }
}

fn facet_indices(sel: FacetSel, family_size: usize) -> Result<Vec<usize>, Failure> {
    match sel {
        FacetSel::All => Ok((0..family_size).collect()),
        FacetSel::Index(i) if i < family_size => Ok(vec![i]),
        FacetSel::Index(i) => Err(usage(format!(
            "facet index {i} out of range (family has {family_size} members)"
        ))),
    }
}

fn parse_backend(
    flag: Option<String>,
    cfg: &config::FileConfig,
    p: u32,
) -> Result<Backend, Failure> {
    let from_cfg: Option<String> = cfg_get(cfg, "backend")?;
    let default = if p == 2 { "numeric" } else { "symbolic" };
    let chosen = config::resolve(flag, from_cfg, default.to_string());
    chosen.parse::<Backend>().map_err(|e| usage(e))
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, content)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(|e| usage(format!("{e:#}"))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn build_graph_or_diff(
    ps: &PhaseSpace,
    r: &FacetVector,
    backend: Backend,
) -> Result<ExclusivityGraph, Failure> {
    ExclusivityGraph::build(ps, r, backend).map_err(|e| match e {
        stabctx::Error::BackendMismatch { count, first } => usage(format!(
            "orthogonality backends disagree on {count} pairs; first disagreements: {first:?}"
        )),
        other => usage(other),
    })
}

fn run_graph(args: GraphArgs, cfg: &config::FileConfig) -> CmdResult {
    let p = config::resolve(args.p, cfg_get(cfg, "p")?, 3);
    let ps = phase_space(p)?;
    let backend = parse_backend(args.backend, cfg, p)?;
    let format = config::resolve(args.format, cfg_get(cfg, "format")?, "dimacs".to_string());
    if format != "dimacs" && format != "json" {
        return Err(usage(format!("format must be dimacs or json, got '{format}'")));
    }
    let sel = parse_facet(args.facet, cfg)?;
    let indices = facet_indices(sel, ps.facets().len())?;
    let outdir = config::resolve(args.output, cfg_get(cfg, "output")?, PathBuf::from("."));
    std::fs::create_dir_all(&outdir).map_err(|e| usage(e))?;
    for idx in indices {
        let r = ps.facets()[idx].clone();
        let g = build_graph_or_diff(&ps, &r, backend)?;
        let stem = outdir.join(format!("graph_p{p}_facet{idx}"));
        if format == "dimacs" {
            let path = stem.with_extension("dimacs");
            write_output(Some(&path), &g.to_dimacs())?;
            let sidecar = outdir.join(format!("graph_p{p}_facet{idx}.partition.json"));
            write_output(Some(&sidecar), &g.partition_json().map_err(|e| usage(e))?)?;
            println!("wrote {} (+ partition sidecar)", path.display());
        } else {
            let path = stem.with_extension("json");
            write_output(Some(&path), &g.to_json().map_err(|e| usage(e))?)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct FacetSolveReport {
    index: usize,
    facet: Vec<u32>,
    vertices: usize,
    edges: usize,
    classes: usize,
    alpha: usize,
    exact: bool,
    nodes: u64,
    independent_set: Vec<usize>,
    certificate: mis::SandwichCertificate,
}

#[derive(Serialize)]
struct AlphaReport {
    p: u32,
    backend: String,
    facets: Vec<FacetSolveReport>,
}

#[derive(Serialize)]
struct ExternalSolveReport {
    vertices: usize,
    edges: usize,
    classes: usize,
    alpha: usize,
    exact: bool,
    nodes: u64,
    independent_set: Vec<usize>,
    clique_cover_upper: usize,
}

fn run_alpha(args: AlphaArgs, cfg: &config::FileConfig) -> CmdResult {
    let timeout = config::resolve(args.timeout_secs, cfg_get(cfg, "timeout-secs")?, 0);
    let opts = SolveOptions {
        timeout: (timeout > 0).then(|| Duration::from_secs(timeout)),
    };
    if let Some(path) = &args.graph {
        return solve_external(path, args.partition.as_deref(), &opts, args.output.as_deref());
    }
    let p = config::resolve(args.p, cfg_get(cfg, "p")?, 3);
    let ps = phase_space(p)?;
    let backend = parse_backend(args.backend, cfg, p)?;
    let sel = parse_facet(args.facet, cfg)?;
    let indices = facet_indices(sel, ps.facets().len())?;
    let threads = config::resolve(args.threads, cfg_get(cfg, "threads")?, 1);
    if threads > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    let solve_one = |idx: &usize| -> Result<FacetSolveReport, Failure> {
        let idx = *idx;
        let r = ps.facets()[idx].clone();
        let g = build_graph_or_diff(&ps, &r, backend)?;
        let out = mis::max_independent_set(&g, &opts);
        let cert = mis::sandwich_certificate(&ps, &g, out.set.size()).map_err(|e| usage(e))?;
        Ok(FacetSolveReport {
            index: idx,
            facet: r.components().to_vec(),
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            classes: g.partition.len(),
            alpha: out.set.size(),
            exact: out.exact,
            nodes: out.nodes,
            independent_set: out.set.vertices,
            certificate: cert,
        })
    };
    let facets: Vec<FacetSolveReport> = if threads > 1 {
        use rayon::prelude::*;
        indices
            .par_iter()
            .map(solve_one)
            .collect::<Result<Vec<_>, _>>()?
    } else {
        indices
            .iter()
            .map(solve_one)
            .collect::<Result<Vec<_>, _>>()?
    };
    let all_exact = facets.iter().all(|f| f.exact);
    let report = AlphaReport {
        p,
        backend: format!("{backend:?}").to_lowercase(),
        facets,
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| usage(e))?;
    write_output(args.output.as_deref(), &format!("{json}\n"))?;
    if !all_exact {
        eprintln!("solver timed out; reported sizes are lower bounds");
        return Ok(EXIT_RESOURCE);
    }
    Ok(0)
}

fn solve_external(
    path: &Path,
    partition: Option<&Path>,
    opts: &SolveOptions,
    output: Option<&Path>,
) -> CmdResult {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(|e| usage(format!("{e:#}")))?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    let g = if is_json {
        ExclusivityGraph::from_json(&text).map_err(|e| usage(e))?
    } else {
        let classes = match partition {
            Some(pp) => {
                let ptext = std::fs::read_to_string(pp)
                    .with_context(|| format!("reading {}", pp.display()))
                    .map_err(|e| usage(format!("{e:#}")))?;
                Some(ExclusivityGraph::parse_partition_json(&ptext).map_err(|e| usage(e))?)
            }
            None => None,
        };
        ExclusivityGraph::from_dimacs(&text, classes).map_err(|e| usage(e))?
    };
    let out = mis::max_independent_set(&g, opts);
    let report = ExternalSolveReport {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        classes: g.partition.len(),
        alpha: out.set.size(),
        exact: out.exact,
        nodes: out.nodes,
        independent_set: out.set.vertices,
        clique_cover_upper: g.partition.len(),
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| usage(e))?;
    write_output(output, &format!("{json}\n"))?;
    if !out.exact {
        eprintln!("solver timed out; reported size is a lower bound");
        return Ok(EXIT_RESOURCE);
    }
    Ok(0)
}

fn run_verify(args: VerifyArgs, cfg: &config::FileConfig) -> CmdResult {
    let primes_raw = config::resolve(args.p, cfg_get(cfg, "p")?, "2,3".to_string());
    let mut primes = Vec::new();
    for part in primes_raw.split(',') {
        let p: u32 = part
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad prime '{part}'")))?;
        if p != 2 && p != 3 {
            return Err(usage(format!(
                "the verification suite covers p in {{2, 3}}, got {p}"
            )));
        }
        primes.push(p);
    }
    let trials = config::resolve(args.trials, cfg_get(cfg, "trials")?, 1000);
    let seed = config::resolve(args.seed, cfg_get(cfg, "seed")?, 0x5eed);
    let reports = verify::run(&primes, trials, seed).map_err(|e| usage(e))?;
    for r in &reports {
        println!("{}", r.line());
    }
    if let Some(path) = &args.output {
        let json = serde_json::to_string_pretty(&reports).map_err(|e| usage(e))?;
        write_output(Some(path), &format!("{json}\n"))?;
    }
    if let Some(first_fail) = reports.iter().find(|r| !r.passed) {
        eprintln!(
            "verification failed at criterion {} ({})",
            first_fail.id, first_fail.name
        );
        return Ok(EXIT_VERIFY);
    }
    Ok(0)
}

fn parse_state(ps: &PhaseSpace, spec: &str) -> Result<(String, CMatrix), Failure> {
    match spec {
        "strange" => Ok((
            "strange".to_string(),
            ps.strange_state().map_err(|e| usage(e))?,
        )),
        "tstate" => Ok(("tstate".to_string(), ps.t_state().map_err(|e| usage(e))?)),
        "mixed" => Ok(("mixed".to_string(), ps.maximally_mixed())),
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading state file {path}"))
                .map_err(|e| usage(format!("{e:#}")))?;
            let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text)
                .map_err(|e| usage(format!("state file must be a row-major [[re, im], ...] matrix: {e}")))?;
            let n = ps.dim();
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(usage(format!("state matrix must be {n} x {n}")));
            }
            let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
            Ok((path.to_string(), m))
        }
    }
}

#[derive(Serialize)]
struct ClassifyReport {
    p: u32,
    state: String,
    class: String,
    tolerance: f64,
    min_facet: usize,
    min_value: f64,
    stab_min_value: f64,
    min_eigenvalue: f64,
    positive: bool,
    /// True when the minimum facet value sits within the tolerance band of
    /// zero, i.e. the headline class is a boundary call.
    near_boundary: bool,
    facet_values: Vec<f64>,
}

fn run_classify(args: ClassifyArgs, cfg: &config::FileConfig) -> CmdResult {
    let p = config::resolve(args.p, cfg_get(cfg, "p")?, 3);
    let ps = phase_space(p)?;
    let state_spec = config::resolve(args.state, cfg_get(cfg, "state")?, "mixed".to_string());
    let (name, rho) = parse_state(&ps, &state_spec)?;
    let tolerance = config::resolve(
        args.tolerance,
        cfg_get(cfg, "tolerance")?,
        stabctx::mub::MEMBERSHIP_TOL,
    );
    let c = classify::classify_state(&ps, &rho).map_err(|e| usage(e))?;
    let class = classify::StateClass::from_minima(
        c.min_eigenvalue,
        c.min_value,
        c.stab_min_value,
        tolerance,
    );
    let report = ClassifyReport {
        p,
        state: name,
        class: class.to_string(),
        tolerance,
        min_facet: c.min_facet,
        min_value: c.min_value,
        stab_min_value: c.stab_min_value,
        min_eigenvalue: c.min_eigenvalue,
        positive: c.positive,
        near_boundary: c.min_value.abs() <= tolerance,
        facet_values: c.facet_values,
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| usage(e))?;
    write_output(args.output.as_deref(), &format!("{json}\n"))?;
    Ok(0)
}

fn run_slice(args: SliceArgs, cfg: &config::FileConfig) -> CmdResult {
    let p = config::resolve(args.p, cfg_get(cfg, "p")?, 3);
    let ps = phase_space(p)?;
    let grid = config::resolve(args.grid, cfg_get(cfg, "grid")?, 201);
    let range = config::resolve(args.range, cfg_get(cfg, "range")?, 1.2);
    let mut spec = classify::default_slice(&ps, grid).map_err(|e| usage(e))?;
    spec.range = (-range, range);
    let points = classify::slice_scan(&ps, &spec).map_err(|e| usage(e))?;
    write_output(args.output.as_deref(), &classify::slice_csv(&points))?;
    Ok(0)
}

fn matrix_json(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

#[derive(Serialize)]
struct MubOpRecord {
    j: usize,
    q: u32,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct FacetOpRecord {
    index: usize,
    facet: Vec<u32>,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct OpsDump<T: Serialize> {
    p: u32,
    kind: String,
    items: Vec<T>,
}

fn run_dump_ops(args: DumpOpsArgs, cfg: &config::FileConfig) -> CmdResult {
    let p = config::resolve(args.p, cfg_get(cfg, "p")?, 3);
    let ps = phase_space(p)?;
    let kind = config::resolve(args.kind, cfg_get(cfg, "kind")?, "facets".to_string());
    match kind.as_str() {
        "mub" => {
            let mut items = Vec::new();
            for j in 1..=(p + 1) as usize {
                for q in 0..p {
                    let proj = ps.mubs().projector(&stabctx::mub::MubIndex {
                        j,
                        q: stabctx::ffield::Fp::new(q as i64, p).map_err(|e| usage(e))?,
                    });
                    items.push(MubOpRecord {
                        j,
                        q,
                        matrix: matrix_json(&proj),
                    });
                }
            }
            let dump = OpsDump {
                p,
                kind,
                items,
            };
            let json = serde_json::to_string_pretty(&dump).map_err(|e| usage(e))?;
            write_output(args.output.as_deref(), &format!("{json}\n"))
                .map(|_| 0)
        }
        "facets" => {
            let items: Vec<FacetOpRecord> = ps
                .facets()
                .iter()
                .enumerate()
                .map(|(index, r)| FacetOpRecord {
                    index,
                    facet: r.components().to_vec(),
                    matrix: matrix_json(ps.facet_op(index)),
                })
                .collect();
            let dump = OpsDump { p, kind, items };
            let json = serde_json::to_string_pretty(&dump).map_err(|e| usage(e))?;
            write_output(args.output.as_deref(), &format!("{json}\n"))
                .map(|_| 0)
        }
        "witness" => {
            let sel = parse_facet(args.facet, cfg)?;
            let idx = match sel {
                FacetSel::All => 0,
                FacetSel::Index(i) => i,
            };
            let indices = facet_indices(FacetSel::Index(idx), ps.facets().len())?;
            let r = ps.facets()[indices[0]].clone();
            // checking the operator identity here keeps the dump honest
            sigma_operator(&ps, &r).map_err(|e| usage(e))?;
            let g = build_graph_or_diff(&ps, &r, parse_backend(None, cfg, p)?)?;
            let jsonl = g.projector_jsonl().map_err(|e| usage(e))?;
            write_output(args.output.as_deref(), &jsonl).map(|_| 0)
        }
        other => Err(usage(format!(
            "kind must be mub, facets, or witness; got '{other}'"
        ))),
    }
}
