use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qldpc_bounds::analysis::profile::{profile_with, ProfileConfig};
use qldpc_bounds::analysis::{separability_profile, SeparatorStrategy};
use qldpc_bounds::code::{make_family, parse_code, Family};
use qldpc_bounds::error::{Error, Result};
use qldpc_bounds::generators::{
    geometric_cut_subgraph, make_grid, make_hyperbolic_patch, make_random_regular, parse_coords, EmbeddedGraph,
};
use qldpc_bounds::graph::parse_graph;
use qldpc_bounds::report::{analyze, exit_code, AnalysisConfig, OutputFormat};

#[derive(Parser)]
#[command(name = "qldpc-bounds", version, about = "Structural bounds for quantum LDPC codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a stabilizer code file and print a bounds report.
    Analyze {
        code: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 20)]
        exact_tw_max: usize,
        #[arg(long, default_value_t = 16)]
        exact_sep_max: usize,
        #[arg(long, default_value_t = 4)]
        distance_cap: usize,
        #[arg(long, default_value = "bfs_layering")]
        strategy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Separator exponent c for the closed-form transversal level.
        #[arg(long)]
        sep_exponent: Option<f64>,
        /// Distance exponent for the closed-form transversal level.
        #[arg(long)]
        dist_exponent: Option<f64>,
        /// Evaluate the hyperbolic-space bounds for this dimension.
        #[arg(long)]
        hyperbolic_dim: Option<usize>,
        /// Evaluate the surface bounds for this genus.
        #[arg(long)]
        genus: Option<usize>,
    },
    /// Write a code family or a graph family to a file.
    Generate {
        /// repetition, five-qubit, steane, surface, toric, grid, hyperbolic or random-regular
        kind: String,
        /// Code size parameter (repetition length, surface/toric L).
        #[arg(long, default_value_t = 3)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 8)]
        side: usize,
        #[arg(long, default_value_t = 7)]
        p: usize,
        #[arg(long, default_value_t = 3)]
        q: usize,
        #[arg(long, default_value_t = 3)]
        rings: usize,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Coordinates sidecar for embedded graphs (default: OUT with `.coords` appended).
        #[arg(long)]
        coords_out: Option<PathBuf>,
    },
    /// Estimate the separability profile of a graph file.
    Profile {
        graph: PathBuf,
        /// `coords v1` file, required by the geometric_cut strategy.
        #[arg(long)]
        coords: Option<PathBuf>,
        /// Comma-separated subgraph sizes (default: powers of two up to n).
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 4)]
        samples: usize,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value = "bfs_layering")]
        strategy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        exact_sep_max: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("QLDPC_BOUNDS_THREADS") {
        let threads: usize =
            v.parse().map_err(|_| Error::Input(format!("QLDPC_BOUNDS_THREADS must be a number, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Input(format!("cannot size thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Analyze {
            code,
            alpha,
            exact_tw_max,
            exact_sep_max,
            distance_cap,
            strategy,
            seed,
            format,
            out,
            sep_exponent,
            dist_exponent,
            hyperbolic_dim,
            genus,
        } => {
            let output_format = match format {
                Format::Json => OutputFormat::Json,
                Format::Text => OutputFormat::Text,
                Format::Csv => return Err(Error::Input("analyze reports are json or text".into())),
            };
            let cfg = AnalysisConfig {
                alpha,
                exact_tw_max,
                exact_sep_max,
                brute_distance_cap: distance_cap,
                strategy: strategy.parse()?,
                seed,
                output_format,
                sep_exponent,
                dist_exponent,
                hyperbolic_dim,
                genus,
            };
            if cfg.strategy == SeparatorStrategy::GeometricCut {
                return Err(Error::Input("codes carry no coordinates; use bfs_layering or spectral_bisection".into()));
            }
            let parsed = parse_code(&read(&code)?)?;
            let report = analyze(&parsed, &cfg)?;
            let text = match output_format {
                OutputFormat::Json => report.to_json(),
                OutputFormat::Text => report.to_text(),
            };
            emit(out.as_deref(), &text)
        }
        Command::Generate { kind, size, dim, side, p, q, rings, degree, n, seed, format, out, coords_out } => {
            let embedded: EmbeddedGraph = match kind.as_str() {
                "grid" => make_grid(dim, side)?,
                "hyperbolic" => make_hyperbolic_patch(p, q, rings)?,
                "random-regular" | "random_regular" => {
                    let graph = make_random_regular(degree, n, seed)?;
                    let text = match format {
                        Format::Json => graph.to_json(),
                        _ => graph.to_text(),
                    };
                    return emit(out.as_deref(), &text);
                }
                other => {
                    let family: Family = other.parse()?;
                    let code = make_family(family, size)?;
                    let text = match format {
                        Format::Json => code.to_json(),
                        _ => code.to_text(),
                    };
                    return emit(out.as_deref(), &text);
                }
            };
            if let Err(v) = embedded.check_locality() {
                return Err(Error::Inconsistency(format!("generated graph is not local: {v}")));
            }
            let text = match format {
                Format::Json => embedded.graph.to_json(),
                _ => embedded.graph.to_text(),
            };
            emit(out.as_deref(), &text)?;
            let coords_path = coords_out.or_else(|| {
                out.as_ref().map(|o| {
                    let mut s = o.clone().into_os_string();
                    s.push(".coords");
                    PathBuf::from(s)
                })
            });
            match coords_path {
                Some(path) => Ok(std::fs::write(path, embedded.coords_text())?),
                None => emit(None, &embedded.coords_text()),
            }
        }
        Command::Profile { graph, coords, sizes, samples, alpha, strategy, seed, exact_sep_max, format, out } => {
            let g = parse_graph(&read(&graph)?)?;
            let strategy: SeparatorStrategy = strategy.parse()?;
            let sizes = if sizes.is_empty() {
                let mut s: Vec<usize> = std::iter::successors(Some(4usize), |r| r.checked_mul(2)).take_while(|&r| r < g.n()).collect();
                s.push(g.n());
                s
            } else {
                sizes
            };
            if let Some(&bad) = sizes.iter().find(|&&r| r == 0 || r > g.n()) {
                return Err(Error::Input(format!("profile size {bad} outside [1, {}]", g.n())));
            }
            let profile = if strategy == SeparatorStrategy::GeometricCut {
                let path = coords.ok_or_else(|| Error::Input("geometric_cut needs --coords".into()))?;
                let (coordinates, rho, w) = parse_coords(&read(&path)?)?;
                let eg = EmbeddedGraph { graph: g.clone(), coordinates, rho, w };
                if eg.coordinates.len() != g.n() {
                    return Err(Error::Input("coordinate count does not match the graph".into()));
                }
                profile_geometric(&g, &eg, &sizes, samples, seed, alpha)?
            } else {
                let cfg = ProfileConfig { alpha, strategy, samples_per_r: samples, seed, exact_max: exact_sep_max };
                separability_profile(&g, &sizes, &cfg)?
            };
            let text = match format {
                Format::Csv => profile.to_csv(),
                Format::Json => profile.to_json() + "\n",
                Format::Text => format!(
                    "{}: fitted c = {:.4} in [{:.4}, {:.4}] (empirical lower estimate)\n",
                    profile.label, profile.fitted_c, profile.c_low, profile.c_high
                ),
            };
            emit(out.as_deref(), &text)
        }
    }
}

fn profile_geometric(
    g: &qldpc_bounds::graph::Graph,
    eg: &EmbeddedGraph,
    sizes: &[usize],
    samples: usize,
    seed: u64,
    alpha: f64,
) -> Result<qldpc_bounds::analysis::SeparabilityProfile> {
    profile_with(g, sizes, samples, seed, "geometric_cut", |sub, ids, _| {
        Ok(geometric_cut_subgraph(sub, ids, eg, alpha)?.size())
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
