//! `flatfoliate` command-line front end.

mod schema;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use flatfoliate::exactgeom::{configuration_index, format_rational, RayVector};
use flatfoliate::localformula::{sullivan_bound, vertex_weight, factorial};
use flatfoliate::toruslab::{
    build_region_with_budget, decay_experiment_with, default_v0, folner_box, folner_ratio, run_torus,
    BranchOrder, DecayRecord, HolonomyPair, LabOptions, DEFAULT_RETRY_BUDGET,
};
use flatfoliate::triangulations::{
    assemble_triangulation, incompatible_cube_fixture, kuhn_standard, kuhn_triangulation, staircase_triangulation,
    triangulate_product_cell, two_square_fixture, Assembly, ProductCell,
};
use flatfoliate::toruslab::overlay::torus_overlay;
use flatfoliate::verify::{self, Scope};
use num_rational::BigRational;
use num_traits::Zero;
use schema::*;

const RETRY_ENV: &str = "FLATFOLIATE_RETRY_BUDGET";
const DECAY_HEADER: &str = "L,N,N_boundary,X,k_min,k_max,bound,formula_value";
const FOLNER_HEADER: &str = "L,box_size,ratio_e1,ratio_e2,N,N_boundary";

#[derive(Parser)]
#[command(name = "flatfoliate", version, about = "Exact Euler numbers of flat sphere bundles from local crossing data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Index (+1, 0, -1) of an ordered tuple of n+1 rays in R^n.
    Index {
        #[arg(long)]
        input: PathBuf,
    },
    /// Exact formula value and bound for a crossing list.
    Formula {
        #[arg(long)]
        input: PathBuf,
    },
    /// Emit a triangulation as JSON.
    Triangulate {
        #[command(subcommand)]
        kind: TriangulateKind,
        #[arg(long, global = true)]
        output: Option<PathBuf>,
    },
    /// Torus decay experiment as CSV.
    TorusDecay(DecayArgs),
    /// Folner ratios of lattice boxes as CSV.
    Folner {
        #[arg(long = "L", default_value = "2,4,8,16")]
        l: String,
        #[arg(long, default_value_t = 0)]
        schedule: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the invariant suites; exits 3 if any check fails.
    Verify {
        #[arg(default_value = "all")]
        scope: String,
        /// Order branches by lattice lift instead of orientation (deliberately wrong).
        #[arg(long)]
        mutant: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TriangulateKind {
    /// Staircase triangulation of Δ^K × Δ^M.
    Staircase { k: usize, m: usize },
    /// Kuhn triangulation of the N-cube.
    Kuhn {
        n: usize,
        /// Low marked vertex as a bit string; its antipode is the high mark.
        #[arg(long)]
        marks: Option<String>,
    },
    /// Triangulate the single cell of a cells file.
    Product {
        #[arg(long)]
        input: PathBuf,
    },
    /// Re-audit a complex file.
    Audit {
        #[arg(long)]
        input: PathBuf,
    },
    /// Triangulate every cell and glue.
    Assemble {
        #[arg(long, conflicts_with = "fixture", required_unless_present = "fixture")]
        input: Option<PathBuf>,
        #[arg(long, value_parser = ["two-squares", "incompatible-cubes", "torus"])]
        fixture: Option<String>,
        /// Box size for the torus fixture.
        #[arg(long = "L", default_value_t = 2)]
        l: i64,
        /// Grid resolution for the torus fixture.
        #[arg(long, default_value_t = 3)]
        grid: usize,
        /// Also write the cells that were assembled.
        #[arg(long)]
        cells_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DecayArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long = "L")]
    l: Option<String>,
    #[arg(long)]
    schedule: Option<usize>,
    /// Diagonal holonomy whose sheets never wind.
    #[arg(long)]
    vacuous: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the crossings of the smallest L as a crossing list.
    #[arg(long)]
    crossings_out: Option<PathBuf>,
    /// Order branches by lattice lift instead of orientation (deliberately wrong).
    #[arg(long)]
    mutant: bool,
}

/// Verify found at least one failing invariant.
#[derive(Debug, thiserror::Error)]
#[error("{0} invariant check(s) failed")]
struct VerifyFailed(usize);

fn exit_code(err: &anyhow::Error) -> u8 {
    use flatfoliate::Error as E;
    if err.downcast_ref::<VerifyFailed>().is_some() {
        return 3;
    }
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::DegenerateConfiguration(_)
                | E::AntipodalPair(..)
                | E::NonGenericProbe
                | E::AmbiguousNu(_)
                | E::FaceMismatch(_)
                | E::GenericityExhausted { .. } => 2,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let budget = retry_budget()?;
    match cli.command {
        Command::Index { input } => cmd_index(&input),
        Command::Formula { input } => cmd_formula(&input),
        Command::Triangulate { kind, output } => cmd_triangulate(kind, output.as_deref(), budget),
        Command::TorusDecay(args) => cmd_torus_decay(args, budget),
        Command::Folner { l, schedule, output } => cmd_folner(&l, schedule, budget, output.as_deref()),
        Command::Verify { scope, mutant, output } => cmd_verify(&scope, mutant, budget, output.as_deref()),
    }
}

fn retry_budget() -> Result<usize> {
    match std::env::var(RETRY_ENV) {
        Ok(v) => {
            let b: usize = v.trim().parse().with_context(|| format!("{RETRY_ENV}={v:?} is not a count"))?;
            ensure!(b > 0, "{RETRY_ENV} must be positive");
            Ok(b)
        }
        Err(_) => Ok(DEFAULT_RETRY_BUDGET),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn emit_json<T: serde::Serialize>(output: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(output, &text)
}

fn cmd_index(input: &Path) -> Result<()> {
    let file: ConfigurationFile = read_json(input)?;
    let tuple = file.tuple()?;
    let idx = configuration_index(&tuple)?;
    println!("{}", match idx {
        1 => "+1",
        -1 => "-1",
        _ => "0",
    });
    Ok(())
}

fn cmd_formula(input: &Path) -> Result<()> {
    let file: CrossingListFile = read_json(input)?;
    let configs = file.configurations()?;
    let mut total = BigRational::zero();
    for (id, cc) in &configs {
        ensure!(cc.is_type_one(), "crossing {id} is not type I");
        total += vertex_weight(cc).with_context(|| format!("crossing {id}"))?;
    }
    let value = total * BigRational::from_integer(factorial(file.n));
    let ks = configs.iter().map(|(_, c)| c.k() as i64);
    let bound = sullivan_bound(configs.len() as i64, ks.clone().min().unwrap_or(1), ks.max().unwrap_or(1), file.n)?;
    println!("{}", format_rational(&value));
    println!("bound {}", format_rational(&bound));
    if !value.is_integer() {
        eprintln!("warning: formula value {} is not an integer; the crossing list cannot come from a closed bundle", format_rational(&value));
    }
    Ok(())
}

fn assembly_file(assembly: &Assembly) -> ComplexFile {
    let mut f = ComplexFile::from_complex(&assembly.complex);
    f.audit.faces_compatible = Some(true);
    f.audit.no_new_vertices = Some(assembly.no_new_vertices);
    f
}

fn cmd_triangulate(kind: TriangulateKind, output: Option<&Path>, budget: usize) -> Result<()> {
    let file = match kind {
        TriangulateKind::Staircase { k, m } => {
            ensure!(k + m > 0, "staircase needs K + M > 0");
            ComplexFile::from_complex(&staircase_triangulation(k, m))
        }
        TriangulateKind::Kuhn { n, marks } => {
            ensure!(n > 0, "kuhn needs N > 0");
            let c = match marks {
                None => kuhn_standard(n),
                Some(s) => {
                    let low = parse_marks(&s, n)?;
                    let high: Vec<bool> = low.iter().map(|b| !b).collect();
                    kuhn_triangulation(n, &low, &high)?
                }
            };
            ComplexFile::from_complex(&c)
        }
        TriangulateKind::Product { input } => {
            let cells = read_json::<CellsFile>(&input)?.cells()?;
            let [cell] = cells.as_slice() else { bail!("product expects exactly one cell, found {}", cells.len()) };
            ComplexFile::from_complex(&triangulate_product_cell(cell)?)
        }
        TriangulateKind::Audit { input } => ComplexFile::from_complex(&read_json::<ComplexFile>(&input)?.complex()?),
        TriangulateKind::Assemble { input, fixture, l, grid, cells_out } => {
            let mut closed = None;
            let cells: Vec<ProductCell> = match (input, fixture.as_deref()) {
                (Some(p), _) => read_json::<CellsFile>(&p)?.cells()?,
                (None, Some("two-squares")) => two_square_fixture(),
                (None, Some("incompatible-cubes")) => incompatible_cube_fixture(),
                (None, Some("torus")) => {
                    let region = build_region_with_budget(l, 0, budget)?;
                    let overlay = torus_overlay(&region, grid)?;
                    closed = Some(overlay.euler_characteristic() == 0);
                    overlay.cells
                }
                _ => bail!("assemble needs --input or --fixture"),
            };
            if let Some(p) = cells_out {
                emit_json(Some(&p), &CellsFile::from_cells(&cells))?;
            }
            let assembly = assemble_triangulation(&cells)?;
            let mut f = assembly_file(&assembly);
            if let Some(chi_zero) = closed {
                f.audit.closed_surface = Some(chi_zero && assembly.complex.every_facet_shared_twice());
            }
            f
        }
    };
    emit_json(output, &file)
}

fn decay_csv(records: &[DecayRecord]) -> String {
    let mut out = String::from(DECAY_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.l,
            r.n_inner,
            r.n_boundary,
            r.crossings,
            r.k_min,
            r.k_max,
            format_rational(&r.bound),
            format_rational(&r.formula_value)
        ));
    }
    out
}

fn cmd_torus_decay(args: DecayArgs, budget: usize) -> Result<()> {
    let config = match &args.input {
        Some(p) => {
            let c: ExperimentConfig = read_json(p)?;
            c.validate()?;
            c
        }
        None => ExperimentConfig::default(),
    };
    let (pair, mut v0) = if args.vacuous {
        (HolonomyPair::diagonal(), RayVector::from_ints(&[1, 1])?)
    } else {
        let pair = match &config.holonomy {
            Some(h) => h.pair()?,
            None => HolonomyPair::rotations(),
        };
        (pair, default_v0())
    };
    if let Some(v) = &config.v0 {
        v0 = parse_ray(v)?;
    }
    let ls = match (&args.l, &config.l) {
        (Some(s), _) => parse_l_list(s)?,
        (None, Some(ls)) => ls.clone(),
        (None, None) => vec![2, 4, 8],
    };
    ensure!(ls.iter().all(|&l| l >= 1), "box sizes must be positive");
    let opts = LabOptions {
        schedule_index: args.schedule.or(config.schedule).unwrap_or(0),
        retry_budget: budget,
        branch_order: if args.mutant { BranchOrder::Lattice } else { BranchOrder::Oriented },
        ..LabOptions::default()
    };
    let records = decay_experiment_with(&pair, &v0, &ls, &opts)?;
    if let Some(p) = &args.crossings_out {
        let &l = ls.first().context("--crossings-out needs at least one box size")?;
        let run = run_torus(&pair, &v0, l, &opts)?;
        emit_json(Some(p), &CrossingListFile::from_torus(&run.crossings))?;
    }
    let output = args.output.clone().or(config.output.as_ref().map(PathBuf::from));
    emit(output.as_deref(), &decay_csv(&records))
}

fn cmd_folner(l: &str, schedule: usize, budget: usize, output: Option<&Path>) -> Result<()> {
    let ls = parse_l_list(l)?;
    ensure!(ls.iter().all(|&l| l >= 1), "box sizes must be positive");
    let mut out = String::from(FOLNER_HEADER);
    out.push('\n');
    for l in ls {
        let phi = folner_box(l);
        let r1 = folner_ratio(&phi, &[1, 0])?;
        let r2 = folner_ratio(&phi, &[0, 1])?;
        let region = build_region_with_budget(l, schedule, budget)?;
        out.push_str(&format!(
            "{l},{},{},{},{},{}\n",
            phi.len(),
            format_rational(&r1),
            format_rational(&r2),
            region.n_inner(),
            region.n_boundary()
        ));
    }
    emit(output, &out)
}

fn cmd_verify(scope: &str, mutant: bool, budget: usize, output: Option<&Path>) -> Result<()> {
    let scope: Scope = scope.parse()?;
    let opts = LabOptions {
        retry_budget: budget,
        branch_order: if mutant { BranchOrder::Lattice } else { BranchOrder::Oriented },
        ..LabOptions::default()
    };
    let checks = verify::run(scope, &opts);
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let report = VerifyReport {
        schema: VERIFY.into(),
        scope: scope.name().into(),
        passed: failed == 0,
        checks: checks
            .into_iter()
            .map(|c| CheckEntry {
                scope: c.scope.into(),
                name: c.name.into(),
                passed: c.passed(),
                cases: c.cases,
                failures: c.failures,
                examples: c.examples,
            })
            .collect(),
    };
    emit_json(output, &report)?;
    if failed > 0 {
        return Err(VerifyFailed(failed).into());
    }
    Ok(())
}
