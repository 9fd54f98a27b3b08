//! Command-line front end: solve instances, generate benchmark inputs,
//! run the exhaustive oracles, and export staged-transition animations.
//!
//! Exit codes: 0 success, 2 constraint violation (e.g. a variant that
//! needs a group family got none), 3 instance over a solver's size cap,
//! 1 anything else.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use group_translations::disjoint::solve_disjoint;
use group_translations::error::{Error, Result};
use group_translations::free::{
    build_arc_instance, solve_beta_manhattan_mlft, solve_euclidean_mlft_approx, solve_mlft_1d,
    solve_manhattan_mlft_2d,
};
use group_translations::given::{solve_mlgt_convex, solve_mlgt_hierarchy_1d};
use group_translations::hardness::{encode_vertex_cover, Graph};
use group_translations::hierarchy::{solve_mcht, solve_mlht_1d, solve_mlht_2d_exact_tiny};
use group_translations::io::{
    export_animation, load_instance, load_solution, save_instance, save_solution, InstanceFile,
    SolutionFile,
};
use group_translations::model::Vector;
use group_translations::oracle::{oracle_laminar_mcht, oracle_mcft, oracle_mlft};
use group_translations::{DisplacementSet, NormKind, Transformation};

#[derive(Parser)]
#[command(
    name = "gtrans",
    about = "Group-translation transformation solvers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and write a solution file.
    Solve(SolveArgs),
    /// Generate an instance file (arc pair, vertex-cover gadget, random).
    Generate(GenerateArgs),
    /// Run an exhaustive oracle (small instances only).
    Oracle(OracleArgs),
    /// Export a staged SVG animation for a solved instance.
    Animate(AnimateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Mcdt,
    Mldt,
    Mlgt,
    Mcht,
    Mlht,
    Mlft,
    Approx,
}

impl VariantArg {
    fn name(self) -> &'static str {
        match self {
            VariantArg::Mcdt => "mcdt",
            VariantArg::Mldt => "mldt",
            VariantArg::Mlgt => "mlgt",
            VariantArg::Mcht => "mcht",
            VariantArg::Mlht => "mlht",
            VariantArg::Mlft => "mlft",
            VariantArg::Approx => "approx",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Euclidean,
    Manhattan,
}

impl From<NormArg> for NormKind {
    fn from(n: NormArg) -> NormKind {
        match n {
            NormArg::Euclidean => NormKind::Euclidean,
            NormArg::Manhattan => NormKind::Manhattan,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    variant: VariantArg,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Norm for length objectives and the cost report.
    #[arg(long, value_enum, default_value = "euclidean")]
    norm: NormArg,
    /// Rotation angle for the rotated-Manhattan free solver (approx only).
    #[arg(long)]
    beta: Option<f64>,
    /// Numerical tolerance for iterative solvers.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenerateKind {
    Arcs,
    VcGadget,
    Random,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: GenerateKind,
    #[arg(long)]
    output: PathBuf,
    /// Points sampled on each arc (arcs).
    #[arg(long, default_value_t = 16)]
    samples: usize,
    /// Edge-list file: first line is the vertex count, then one
    /// `u v` pair per line, 1-based (vc-gadget).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Number of displacement vectors (random).
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Dimension (random).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Mlft,
    Mcft,
    McftMonotone,
    MchtLaminar,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum)]
    kind: OracleKind,
    #[arg(long)]
    input: PathBuf,
    /// Solution file destination (mlft only).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 15)]
    max_groups: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args)]
struct AnimateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: PathBuf,
    #[arg(long)]
    svg: PathBuf,
    /// Optional JSON stage-list destination.
    #[arg(long)]
    stages: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Generate(args) => run_generate(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Animate(args) => run_animate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gtrans: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run_solve(args: SolveArgs) -> Result<()> {
    let instance = load_instance(&args.input)?;
    let delta = instance.displacement_set()?;
    let norm: NormKind = args.norm.into();
    let d = delta.dimension();

    let t: Transformation = match args.variant {
        VariantArg::Mcdt | VariantArg::Mldt => solve_disjoint(&delta),
        VariantArg::Mlgt => {
            let family = instance.group_family()?.ok_or_else(|| {
                Error::Constraint("variant mlgt requires a family in the instance file".into())
            })?;
            // The 1D tree-median solver applies when the family is a
            // hierarchy over all points; otherwise fall back to the
            // generic convex solver.
            if d == 1 {
                match solve_mlgt_hierarchy_1d(&delta, &family) {
                    Ok(t) => t,
                    Err(_) => solve_mlgt_convex(&delta, &family, norm, args.tol)?,
                }
            } else {
                solve_mlgt_convex(&delta, &family, norm, args.tol)?
            }
        }
        VariantArg::Mcht => solve_mcht(&delta),
        VariantArg::Mlht => match d {
            1 => solve_mlht_1d(&delta)?,
            2 => solve_mlht_2d_exact_tiny(&delta, args.tol)?,
            _ => {
                return Err(Error::Constraint(format!(
                    "mlht solvers cover d = 1 and tiny d = 2 instances, got d = {d}"
                )))
            }
        },
        VariantArg::Mlft => match (d, norm) {
            (1, _) => solve_mlft_1d(&delta)?,
            (2, NormKind::Manhattan) => solve_manhattan_mlft_2d(&delta)?,
            (2, NormKind::Euclidean) => {
                return Err(Error::Constraint(
                    "Euclidean mlft in 2D is NP-hard; use --variant approx or --norm manhattan"
                        .into(),
                ))
            }
            _ => {
                return Err(Error::Constraint(format!(
                    "mlft solvers cover d = 1 and d = 2, got d = {d}"
                )))
            }
        },
        VariantArg::Approx => match args.beta {
            Some(beta) => solve_beta_manhattan_mlft(&delta, beta)?,
            None => solve_euclidean_mlft_approx(&delta)?,
        },
    };

    let solution = SolutionFile::from_transformation(
        args.variant.name(),
        &delta,
        &t,
        norm,
        args.beta,
        Some(args.tol),
    )?;
    save_solution(&args.output, &solution)?;
    println!(
        "{}: {} groups, length {}",
        args.variant.name(),
        solution.cost.cardinality,
        solution.cost.length
    );
    Ok(())
}

fn parse_graph_file(path: &PathBuf) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let vertices: usize = lines
        .next()
        .ok_or_else(|| Error::Malformed("empty graph file".into()))?
        .parse()
        .map_err(|_| Error::Malformed("first line must be the vertex count".into()))?;
    let mut edges = Vec::new();
    for line in lines {
        let mut it = line.split_whitespace();
        let (u, v) = match (it.next(), it.next(), it.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => {
                return Err(Error::Malformed(format!(
                    "expected `u v` edge line, got {line:?}"
                )))
            }
        };
        let parse = |s: &str| -> Result<usize> {
            let k: usize = s
                .parse()
                .map_err(|_| Error::Malformed(format!("bad vertex id {s:?}")))?;
            if k == 0 || k > vertices {
                return Err(Error::Malformed(format!(
                    "vertex id {k} out of range 1..={vertices}"
                )));
            }
            Ok(k - 1)
        };
        edges.push((parse(u)?, parse(v)?));
    }
    Graph::new(vertices, edges)
}

fn run_generate(args: GenerateArgs) -> Result<()> {
    let mut file = match args.kind {
        GenerateKind::Arcs => {
            let delta = build_arc_instance(args.samples)?;
            let mut f = InstanceFile::from_deltas(&delta);
            f.metadata = Some(serde_json::json!({
                "kind": "arcs",
                "samples_per_arc": args.samples,
            }));
            f
        }
        GenerateKind::VcGadget => {
            let path = args.graph.as_ref().ok_or_else(|| {
                Error::Constraint("vc-gadget requires --graph EDGE_LIST_FILE".into())
            })?;
            let graph = parse_graph_file(path)?;
            let delta = encode_vertex_cover(&graph);
            let mut f = InstanceFile::from_deltas(&delta);
            f.metadata = Some(serde_json::json!({
                "kind": "vc-gadget",
                "vertices": graph.vertex_count,
                "edges": graph.edges.len(),
            }));
            f
        }
        GenerateKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let deltas: Vec<Vector> = (0..args.count)
                .map(|_| {
                    Vector::from_i64(
                        &(0..args.dim)
                            .map(|_| rng.gen_range(-9i64..=9))
                            .collect::<Vec<_>>(),
                    )
                })
                .collect();
            let delta = DisplacementSet::new(deltas)?;
            let mut f = InstanceFile::from_deltas(&delta);
            f.metadata = Some(serde_json::json!({
                "kind": "random",
                "seed": args.seed,
                "count": args.count,
                "dim": args.dim,
            }));
            f
        }
    };
    file.schema = group_translations::io::SCHEMA_VERSION;
    save_instance(&args.output, &file)?;
    Ok(())
}

fn run_oracle(args: OracleArgs) -> Result<()> {
    let instance = load_instance(&args.input)?;
    let delta = instance.displacement_set()?;
    match args.kind {
        OracleKind::Mlft => {
            let t = oracle_mlft(&delta, args.max_groups, args.tol)?;
            let solution = SolutionFile::from_transformation(
                "mlft",
                &delta,
                &t,
                NormKind::Euclidean,
                None,
                Some(args.tol),
            )?;
            match &args.output {
                Some(path) => save_solution(path, &solution)?,
                None => println!("{}", serde_json::to_string_pretty(&solution)?),
            }
        }
        OracleKind::Mcft | OracleKind::McftMonotone | OracleKind::MchtLaminar => {
            let (name, cardinality) = match args.kind {
                OracleKind::Mcft => ("mcft", oracle_mcft(&delta, false)?),
                OracleKind::McftMonotone => ("mcft-monotone", oracle_mcft(&delta, true)?),
                _ => ("mcht-laminar", oracle_laminar_mcht(&delta)?),
            };
            let report = serde_json::json!({
                "schema": group_translations::io::SCHEMA_VERSION,
                "oracle": name,
                "cardinality": cardinality,
            });
            match &args.output {
                Some(path) => {
                    fs::write(path, format!("{}\n", serde_json::to_string_pretty(&report)?))?
                }
                None => println!("{}", serde_json::to_string_pretty(&report)?),
            }
        }
    }
    Ok(())
}

fn run_animate(args: AnimateArgs) -> Result<()> {
    let instance = load_instance(&args.instance)?;
    let solution = load_solution(&args.solution)?;
    let (svg, stage_json) = export_animation(&instance, &solution)?;
    fs::write(&args.svg, svg)?;
    if let Some(path) = &args.stages {
        fs::write(path, stage_json)?;
    }
    Ok(())
}

