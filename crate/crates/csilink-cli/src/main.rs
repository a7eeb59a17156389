//! Command-line surface for the diagram complexes, weight systems, and
//! configuration space integrals.
//!
//! Exit codes: 0 success, 1 numeric failure, 2 input error, 3 resource cap.

use clap::{Args, Parser, Subcommand, ValueEnum};
use csilink::cochain::{cohomology, CohomologyReport};
use csilink::diagram::{enumerate_basis, parse_diagram, Diagram, EnumLimits, Flavor, Parity};
use csilink::differential::delta;
use csilink::error::Error;
use csilink::geometry::{GeomChecks, LinkGeometry};
use csilink::integrator::{integrate, invariant, AnomalyTable, FormChoice, MCEstimate};
use csilink::vassiliev::{finite_type_defect, SingularLink};
use csilink::weights::weight_space;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "csilink",
    about = "Diagram complexes and configuration space integrals for string links and braids",
    version
)]
struct Cli {
    /// Worker threads for sampling (does not affect results).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Parity {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Link,
    Braid,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::Link => Flavor::Link,
            FlavorArg::Braid => Flavor::Braid,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Uniform,
    Bump,
}

#[derive(Args)]
struct GradedArgs {
    /// Number of segments.
    #[arg(long)]
    m: usize,
    /// Parity of the ambient dimension.
    #[arg(long)]
    parity: ParityArg,
    /// Link or braid complex.
    #[arg(long)]
    flavor: FlavorArg,
    /// Order of the diagrams.
    #[arg(long)]
    order: i64,
    /// Degree of the diagrams.
    #[arg(long)]
    degree: i64,
    /// Cap on the total vertex count per diagram.
    #[arg(long, default_value_t = 12)]
    max_vertices: usize,
}

#[derive(Args)]
struct StochasticArgs {
    /// Sample count; scientific notation like 1e6 is accepted.
    #[arg(long)]
    samples: String,
    /// Random seed (mandatory for reproducibility).
    #[arg(long)]
    seed: u64,
    /// Sphere form: the rotationally invariant one or a polar bump.
    #[arg(long, value_enum, default_value_t = FormArg::Uniform)]
    form: FormArg,
    /// Polar cap half-angle for the bump form and braid validation.
    #[arg(long, default_value_t = 0.2)]
    theta_cap: f64,
    /// Anomaly coefficient overrides: `<diagram-file>=<value>`.
    #[arg(long = "mu", value_name = "DIAGRAM=VALUE")]
    mu: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the canonical basis diagrams of one bidegree.
    Enumerate(GradedArgs),
    /// Apply the coboundary to a diagram and print the resulting sum.
    Delta { diagram: PathBuf },
    /// Exact cohomology dimensions of one bidegree (or a table sweep).
    Cohomology {
        #[command(flatten)]
        graded: GradedArgs,
        /// Sweep all degrees from 0 to the given degree.
        #[arg(long)]
        table: bool,
    },
    /// Weight-system space at one order: dimension and a basis.
    Weights {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        flavor: FlavorArg,
    },
    /// Monte Carlo configuration space integral of a diagram on a link.
    Integrate {
        diagram: PathBuf,
        link: PathBuf,
        #[command(flatten)]
        stochastic: StochasticArgs,
    },
    /// Assemble a finite-type invariant from a weight system and estimate it.
    Invariant {
        link: PathBuf,
        #[arg(long)]
        order: i64,
        #[arg(long)]
        flavor: FlavorArg,
        /// Index into the weight-space basis.
        #[arg(long, default_value_t = 0)]
        basis_index: usize,
        #[command(flatten)]
        stochastic: StochasticArgs,
    },
    /// Alternating-sum defect of an invariant over a singular link.
    FiniteTypeCheck {
        singular_link: PathBuf,
        #[arg(long)]
        order: i64,
        #[arg(long)]
        flavor: FlavorArg,
        #[arg(long, default_value_t = 0)]
        basis_index: usize,
        #[command(flatten)]
        stochastic: StochasticArgs,
    },
    /// Validate a diagram, link, or singular-link file.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FileFormat::Diagram)]
        format: FileFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Diagram,
    Link,
    SingularLink,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::ResourceCap(_) => 3,
        Error::NonFiniteSample { .. } => 1,
        _ => 2,
    }
}

fn parse_samples(s: &str) -> Result<u64, Error> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let f: f64 = s
        .parse()
        .map_err(|_| Error::Unsupported(format!("bad sample count `{s}`")))?;
    if !f.is_finite() || !(1.0..=1e15).contains(&f) {
        return Err(Error::Unsupported(format!("bad sample count `{s}`")));
    }
    Ok(f as u64)
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("{}: {e}", path.display()),
    })
}

fn stochastic_setup(s: &StochasticArgs) -> Result<(u64, FormChoice, AnomalyTable), Error> {
    let samples = parse_samples(&s.samples)?;
    if s.theta_cap <= 0.0 {
        return Err(Error::Unsupported("theta-cap must be positive".into()));
    }
    let form = match s.form {
        FormArg::Uniform => FormChoice::Uniform,
        FormArg::Bump => FormChoice::PolarBump { cap: s.theta_cap },
    };
    let mut table = AnomalyTable::new();
    for entry in &s.mu {
        let (path, value) = entry.rsplit_once('=').ok_or_else(|| {
            Error::Unsupported(format!("expected <diagram-file>=<value>, got `{entry}`"))
        })?;
        let diagram = parse_diagram(&read(&PathBuf::from(path))?)?;
        let mu: f64 = value
            .parse()
            .map_err(|_| Error::Unsupported(format!("bad mu value `{value}`")))?;
        table.set(diagram, mu);
    }
    Ok((samples, form, table))
}

fn pick_weight_system(
    m: usize,
    k: i64,
    flavor: Flavor,
    basis_index: usize,
) -> Result<csilink::weights::WeightSystem, Error> {
    let basis = weight_space(m, k, flavor)?;
    if basis.is_empty() {
        return Err(Error::Unsupported(format!(
            "the weight space at order {k} is zero-dimensional"
        )));
    }
    basis
        .into_iter()
        .nth(basis_index)
        .ok_or_else(|| Error::Unsupported(format!("basis index {basis_index} out of range")))
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Enumerate(g) => {
            let basis = enumerate_basis(
                g.m,
                g.parity.into(),
                g.flavor.into(),
                g.order,
                g.degree,
                EnumLimits {
                    max_vertices: g.max_vertices,
                },
            )?;
            println!("# {} diagrams", basis.len());
            for d in &basis {
                println!("{}", d.to_text());
            }
        }
        Command::Delta { diagram } => {
            let d = parse_diagram(&read(&diagram)?)?;
            let sum = delta(&d);
            print!("{}", sum.to_text());
        }
        Command::Cohomology { graded: g, table } => {
            let limits = EnumLimits {
                max_vertices: g.max_vertices,
            };
            println!("{}", CohomologyReport::tsv_header());
            let degrees: Vec<i64> = if table {
                (0..=g.degree).collect()
            } else {
                vec![g.degree]
            };
            for degree in degrees {
                let report = cohomology(
                    g.m,
                    g.parity.into(),
                    g.flavor.into(),
                    g.order,
                    degree,
                    limits,
                )?;
                println!("{}", report.tsv());
            }
        }
        Command::Weights { m, k, flavor } => {
            let basis = weight_space(m, k, flavor.into())?;
            println!("dimension\t{}", basis.len());
            for (i, w) in basis.iter().enumerate() {
                println!("# weight system {i}");
                for (d, c) in &w.values {
                    println!("coeff {c}");
                    print!("{}", d.to_text());
                }
            }
        }
        Command::Integrate {
            diagram,
            link,
            stochastic,
        } => {
            let d = parse_diagram(&read(&diagram)?)?;
            let lk = LinkGeometry::parse(&read(&link)?)?;
            let (samples, form, _) = stochastic_setup(&stochastic)?;
            let est = integrate(&d, &lk, form, samples, stochastic.seed)?;
            println!("{}", est.tsv());
        }
        Command::Invariant {
            link,
            order,
            flavor,
            basis_index,
            stochastic,
        } => {
            let lk = LinkGeometry::parse(&read(&link)?)?;
            let (samples, form, table) = stochastic_setup(&stochastic)?;
            let w = pick_weight_system(lk.m(), order, flavor.into(), basis_index)?;
            let est = invariant(&w, &lk, form, samples, stochastic.seed, &table)?;
            println!("{}", est.tsv());
        }
        Command::FiniteTypeCheck {
            singular_link,
            order,
            flavor,
            basis_index,
            stochastic,
        } => {
            let sl = SingularLink::parse(&read(&singular_link)?)?;
            let (samples, form, table) = stochastic_setup(&stochastic)?;
            let flavor: Flavor = flavor.into();
            let w = pick_weight_system(sl.base().m(), order, flavor, basis_index)?;
            let seed = stochastic.seed;
            let eval = move |l: &LinkGeometry, s: u64| -> Result<MCEstimate, Error> {
                invariant(&w, l, form, samples, s, &table)
            };
            let est = finite_type_defect(&eval, &sl, seed)?;
            println!("{}", est.tsv());
        }
        Command::Validate { file, format } => {
            let text = read(&file)?;
            match format {
                FileFormat::Diagram => {
                    let d: Diagram = parse_diagram(&text)?;
                    let violations = d.violations();
                    if !violations.is_empty() {
                        let msgs: Vec<String> =
                            violations.iter().map(|v| v.to_string()).collect();
                        return Err(Error::InvalidDiagram(msgs.join("; ")));
                    }
                    println!(
                        "ok\tdiagram\torder={}\tdegree={}",
                        d.grading().order,
                        d.grading().degree
                    );
                }
                FileFormat::Link => {
                    let l = LinkGeometry::parse(&text)?;
                    l.check_embedding(GeomChecks::default(), &[])?;
                    println!("ok\tlink\tm={}\tflavor={}", l.m(), l.flavor());
                }
                FileFormat::SingularLink => {
                    let sl = SingularLink::parse(&text)?;
                    println!(
                        "ok\tsingular-link\tm={}\tsingularities={}",
                        sl.base().m(),
                        sl.order()
                    );
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
