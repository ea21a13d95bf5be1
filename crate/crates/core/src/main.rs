use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use brickbox::boxcore::{
    classify_quiver, find_triangulation, recognize_bt, validate_box, DimensionVector, FreeBox, TriangulationMode,
};
use brickbox::brickfamily::{brick_family, crosscheck, CrosscheckError, FamilyError, FamilyStatus};
use brickbox::coadjoint::{build_coadjoint_box, AlgebraError, AlgebraTable};
use brickbox::dsl::{parse_box, print_box};
use brickbox::json::{FamilyRecord, RepresentationRecord};
use brickbox::reduction::{
    eliminate_pair, reduce_minimal_edge, regularize, regularize_all, ReductionChain, ReductionError,
};
use brickbox::rep::{enumerate_bricks, RepError};
use brickbox::scalar::{Field, FieldSpec, PrimeField, Rationals};

#[derive(Parser)]
#[command(name = "brickbox", version, about = "Reductions and brick families of free normal boxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check endpoints, degrees and d^2 = 0.
    Validate { file: PathBuf },
    /// Recognize the BT structure.
    Bt { file: PathBuf },
    /// Print a height function.
    Triangulate {
        file: PathBuf,
        /// Triangulate dotted arrows too.
        #[arg(long)]
        full: bool,
    },
    /// Classify the quiver of non-distinguished solid arrows.
    Classify {
        file: PathBuf,
        /// Leave an arrow out of the quiver (repeatable).
        #[arg(long)]
        omit: Vec<String>,
    },
    /// Reduce a minimal edge.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        edge: String,
        /// Regularize greedily afterwards.
        #[arg(long)]
        regularize_after: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Remove a superfluous arrow.
    Regularize {
        file: PathBuf,
        #[arg(long)]
        arrow: String,
        /// The dotted arrow to solve for; chosen automatically if omitted.
        #[arg(long)]
        dotted: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Remove a solid arrow with nonzero differential and its partner.
    EliminatePair {
        file: PathBuf,
        #[arg(long)]
        arrow: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Construct the brick family of a dimension vector.
    Family {
        file: PathBuf,
        #[command(flatten)]
        dim: DimArg,
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate brick classes over a prime field.
    Oracle {
        file: PathBuf,
        #[command(flatten)]
        dim: DimArg,
        #[arg(long)]
        field: u64,
        #[arg(long, default_value_t = 1 << 20)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the family with the enumeration.
    Crosscheck {
        file: PathBuf,
        #[command(flatten)]
        dim: DimArg,
        #[arg(long)]
        field: u64,
        #[arg(long, default_value_t = 1 << 20)]
        budget: u64,
    },
    /// Build the coadjoint box of an algebra table.
    FromAlgebra {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Args)]
struct DimArg {
    /// Dimensions in vertex order, e.g. "1,1", or "v=2,w=1".
    #[arg(long)]
    dim: String,
}

#[derive(Args)]
#[group(multiple = false)]
struct FieldArg {
    /// Work over F_p.
    #[arg(long)]
    field: Option<u64>,
    /// Work over the rationals.
    #[arg(long)]
    rational: bool,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Unsupported(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<RepError> for CliError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::NotBT(_) | FamilyError::UnknownVertex(_) => CliError::Unsupported(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<CrosscheckError> for CliError {
    fn from(e: CrosscheckError) -> Self {
        match e {
            CrosscheckError::Family(e) => e.into(),
            CrosscheckError::Rep(e) => e.into(),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read_box(path: &Path) -> Result<FreeBox> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    parse_box(&text).map_err(|e| CliError::Invalid(format!("{}:{e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("serializable") + "\n"
}

/// Every mutation re-validates before anything is written.
fn emit(b: &FreeBox, out: &Path, log: Option<&Path>, chain: &ReductionChain) -> Result<()> {
    let report = validate_box(b);
    if !report.is_valid() {
        return Err(CliError::Invalid(format!("result fails validation:\n{report}")));
    }
    write(out, &print_box(b))?;
    if let Some(log) = log {
        write(log, &to_json(chain))?;
    }
    println!("{} steps, wrote {}", chain.len(), out.display());
    Ok(())
}

fn parse_dims(b: &FreeBox, text: &str) -> Result<DimensionVector> {
    let bad = |m: String| CliError::Unsupported(format!("--dim {text:?}: {m}"));
    let parts: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let vertices = b.vertices();
    let mut d = DimensionVector::new();
    if parts.iter().all(|p| p.contains('=')) && !parts.is_empty() {
        for p in parts {
            let (v, n) = p.split_once('=').expect("checked");
            let n: usize = n.trim().parse().map_err(|_| bad(format!("bad number in {p}")))?;
            if !b.has_vertex(v.trim()) {
                return Err(bad(format!("unknown vertex {v}")));
            }
            d.insert(v.trim().to_string(), n);
        }
    } else {
        if parts.len() != vertices.len() {
            return Err(bad(format!("expected {} entries for vertices {}", vertices.len(), vertices.join(","))));
        }
        for (v, p) in vertices.iter().zip(parts) {
            let n: usize = p.parse().map_err(|_| bad(format!("bad number {p}")))?;
            d.insert(v.clone(), n);
        }
    }
    for v in vertices {
        d.entry(v).or_insert(0);
    }
    Ok(d)
}

fn prime(p: u64) -> Result<PrimeField> {
    PrimeField::new(p).map_err(|e| CliError::Unsupported(e.to_string()))
}

fn family<F: Field>(field: &F, spec: FieldSpec, b: &FreeBox, d: DimensionVector, out: Option<&Path>) -> Result<()> {
    let r = brick_family(field, b, &d)?;
    match &r.status {
        FamilyStatus::Empty(reason) => println!("Empty: {reason:?}"),
        FamilyStatus::Family(_) => println!("Family over {spec}, {} reduction steps", r.chain.len()),
    }
    let record = FamilyRecord::new(field, spec, d, &r);
    if let Some(fam) = &record.family {
        for (a, rows) in fam {
            let rows: Vec<String> = rows.iter().map(|r| format!("[{}]", r.join(", "))).collect();
            println!("  {a} = [{}]", rows.join(", "));
        }
    }
    if let Some(out) = out {
        write(out, &to_json(&record))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { file } => {
            let b = read_box(&file)?;
            let report = validate_box(&b);
            if !report.is_valid() {
                return Err(CliError::Invalid(report.to_string()));
            }
            println!("valid");
        }
        Command::Bt { file } => {
            let b = read_box(&file)?;
            let s = recognize_bt(&b).map_err(|f| CliError::Invalid(format!("not a BT-box: {f}")))?;
            for (v, a) in &s.distinguished {
                println!("distinguished {a} at {v}");
            }
            for (x, xt) in &s.pairing {
                println!("partner {x} ~ {xt}");
            }
        }
        Command::Triangulate { file, full } => {
            let b = read_box(&file)?;
            let mode = if full { TriangulationMode::Full } else { TriangulationMode::SolidOnly };
            let t = find_triangulation(&b, mode)
                .map_err(|w| CliError::Invalid(format!("no triangulation, cycle {}", w.cycle.join(" -> "))))?;
            for (a, h) in &t.heights {
                println!("{a} {h}");
            }
        }
        Command::Classify { file, omit } => {
            let b = read_box(&file)?;
            let s = recognize_bt(&b).map_err(|f| CliError::Unsupported(format!("not a BT-box: {f}")))?;
            let edges: Vec<(String, String)> = b
                .solid_arrows()
                .filter(|a| !s.is_distinguished(&a.id) && !omit.contains(&a.id))
                .map(|a| (a.source.clone(), a.target.clone()))
                .collect();
            for (x, y) in &edges {
                println!("{x} -> {y}");
            }
            println!("{}", classify_quiver(&b.vertices(), &edges));
        }
        Command::Reduce { file, edge, regularize_after, out, log } => {
            let b = read_box(&file)?;
            let (mut cur, step) = reduce_minimal_edge(&b, &edge)?;
            let mut chain = ReductionChain::new();
            chain.push(step);
            if regularize_after {
                let (next, more) = regularize_all(&cur)?;
                chain.extend(more);
                cur = next;
            }
            emit(&cur, &out, log.as_deref(), &chain)?;
        }
        Command::Regularize { file, arrow, dotted, out, log } => {
            let b = read_box(&file)?;
            let (cur, step) = regularize(&b, &arrow, dotted.as_deref())?;
            let mut chain = ReductionChain::new();
            chain.push(step);
            emit(&cur, &out, log.as_deref(), &chain)?;
        }
        Command::EliminatePair { file, arrow, out, log } => {
            let b = read_box(&file)?;
            let (cur, chain) = eliminate_pair(&b, &arrow)?;
            emit(&cur, &out, log.as_deref(), &chain)?;
        }
        Command::Family { file, dim, field, out } => {
            let b = read_box(&file)?;
            let d = parse_dims(&b, &dim.dim)?;
            match (field.field, field.rational) {
                (Some(p), _) => family(&prime(p)?, FieldSpec::Prime(p), &b, d, out.as_deref())?,
                (None, _) => family(&Rationals, FieldSpec::Rational, &b, d, out.as_deref())?,
            }
        }
        Command::Oracle { file, dim, field, budget, out } => {
            let b = read_box(&file)?;
            let d = parse_dims(&b, &dim.dim)?;
            let f = prime(field)?;
            let classes = enumerate_bricks(&f, &b, &d, budget)?;
            println!("{} brick classes over F_{field}", classes.len());
            let records: Vec<RepresentationRecord> = classes
                .iter()
                .map(|m| RepresentationRecord::from_rep(&f, FieldSpec::Prime(field), m))
                .collect();
            for r in &records {
                println!("  {}", serde_json::to_string(&r.matrices).expect("serializable"));
            }
            if let Some(out) = out {
                write(&out, &to_json(&records))?;
            }
        }
        Command::Crosscheck { file, dim, field, budget } => {
            let b = read_box(&file)?;
            let d = parse_dims(&b, &dim.dim)?;
            let c = crosscheck(&prime(field)?, &b, &d, budget)?;
            println!("family {} = oracle {}", c.family_classes, c.oracle_classes);
            if !c.agrees() {
                return Err(CliError::Invalid(format!("mismatch: {c:?}")));
            }
            println!("agree");
        }
        Command::FromAlgebra { file, out, name } => {
            let text = fs::read_to_string(&file).map_err(|e| CliError::Invalid(format!("{}: {e}", file.display())))?;
            let table: AlgebraTable =
                serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", file.display())))?;
            let name = name.unwrap_or_else(|| {
                file.file_stem().map_or("algebra".to_string(), |s| s.to_string_lossy().replace(['-', '.'], "_"))
            });
            let b = build_coadjoint_box(&name, &table).map_err(|e: AlgebraError| CliError::Invalid(e.to_string()))?;
            emit(&b, &out, None, &ReductionChain::new())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
