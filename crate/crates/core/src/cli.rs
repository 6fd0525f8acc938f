//! `stopset` command-line front end.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 invalid parameters,
//! 3 size bound exceeded. JSON output carries `"schema": 1`; field elements
//! are strings, counts are numbers (or decimal strings beyond `u64`).

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agcode::{
    big_json, generator_matrix, h_star, h_star_matrix, mds_distribution, residue_generator, rr_basis, CodeError,
    CodeMatrix, Distribution, EllipticCodeSpec, SupportProfile, DEFAULT_MAX_ROWS,
};
use crate::curve::{CurveError, CurvePoint, EllipticCurve};
use crate::decoder::{peel, random_codeword, residual_is_stopping, DecodeError, ErasureInstance};
use crate::ffield::{Field, FieldError, FieldSpec};
use crate::groupcount::{count_formula, dp_count, AbelianGroup, CountError, GroupElement};
use crate::stoptheory::{StoppingReport, TheoryError, DEFAULT_MAX_ENUM_N};
use crate::subsets::IndexSet;
use crate::verify::{all_curves, groups_of_order, h_star_rows, verify_group, verify_instance, verify_rs, Limits, Mismatch};

pub const SCHEMA: u32 = 1;

/// Environment override for the `q^m` streaming bound.
pub const MAX_ROWS_ENV: &str = "STOPSET_MAX_ROWS";

/// Sets of `S(m)` listed in reports at most.
const MAX_LISTED: usize = 10_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Size(String),
    #[error("{0} verification mismatch(es)")]
    Mismatch(usize),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Size(_) => 3,
        }
    }
}

macro_rules! usage_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Usage(e.to_string())
            }
        }
    )*};
}

usage_from!(FieldError, CurveError, CountError, DecodeError, serde_json::Error);

impl From<CodeError> for CliError {
    fn from(e: CodeError) -> Self {
        match e {
            CodeError::TooLarge { .. } => CliError::Size(e.to_string()),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<TheoryError> for CliError {
    fn from(e: TheoryError) -> Self {
        match e {
            TheoryError::Code(c) => c.into(),
            TheoryError::TooLarge { .. } => CliError::Size(e.to_string()),
            e => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "stopset", version, about = "Stopping sets of residue AG codes from elliptic curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the rational points of a curve.
    Points(CurveArgs),
    /// Invariant factors and coordinates of E(F_q).
    Structure(CurveArgs),
    /// Count k-subsets of G \ {0} with a given sum.
    Groupcount(GroupcountArgs),
    /// Emit generator / parity-check matrices of the code.
    Gen(GenArgs),
    /// Stopping-set report for C_Omega(D, mO).
    Report(ReportArgs),
    /// Sweep curves, groups and RS codes, comparing formulas with oracles.
    Verify(VerifyArgs),
    /// Stopping-set distribution of an MDS code.
    Mds(MdsArgs),
    /// Peel an erasure pattern with H*.
    Decode(DecodeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    /// Field as `p`, `p,k` or `p,k,c0.c1...ck`.
    #[arg(long)]
    pub field: Option<String>,
    /// Prime field shorthand.
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CodeArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long)]
    pub m: Option<usize>,
    /// `all-minus-O`, `multiples:x,y`, or a point list `x,y;x,y;...`.
    #[arg(long = "D", default_value = "all-minus-O")]
    pub d: String,
    /// JSON code description (overrides the curve flags).
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GroupcountArgs {
    /// Group as `d1xd2x...`.
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub k: u64,
    /// Target element coordinates `c1,c2,...` (default: identity).
    #[arg(long)]
    pub target: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Which {
    /// Generator of C_L(D, mO), the dual code.
    Functional,
    /// Generator of C_Omega(D, mO).
    Residue,
    /// All nonzero codewords of C_L(D, mO).
    HStar,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, value_enum, default_value = "functional")]
    pub which: Which,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_MAX_ENUM_N)]
    pub max_n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 7)]
    pub max_q: u64,
    #[arg(long, default_value_t = 3)]
    pub max_m: usize,
    #[arg(long, default_value_t = 16)]
    pub max_group_order: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MdsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Also build RS [n, k] over F_p and check the distribution with the oracle.
    #[arg(long)]
    pub check_p: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CodewordChoice {
    Zero,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Erased positions, 1-based, comma separated.
    #[arg(long, default_value = "")]
    pub erased: String,
    #[arg(long, value_enum, default_value = "zero")]
    pub codeword: CodewordChoice,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// On-disk code description accepted by `--spec`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    pub schema: u32,
    pub field: String,
    pub a: String,
    pub b: String,
    pub m: usize,
    /// Either a descriptor string or a list of `[x, y]` pairs.
    #[serde(rename = "D")]
    pub d: serde_json::Value,
}

pub fn max_rows() -> Result<u64, CliError> {
    match std::env::var(MAX_ROWS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{MAX_ROWS_ENV}={v} is not an integer"))),
        Err(_) => Ok(DEFAULT_MAX_ROWS),
    }
}

impl CurveArgs {
    pub fn field(&self) -> Result<Field, CliError> {
        let spec: FieldSpec = match (&self.field, self.p) {
            (Some(f), None) => f.parse()?,
            (None, Some(p)) => FieldSpec::prime(p)?,
            _ => return Err(CliError::Usage("give exactly one of --field or --p".into())),
        };
        Ok(Field::new(spec))
    }

    pub fn curve(&self) -> Result<EllipticCurve, CliError> {
        let field = self.field()?;
        let parse = |s: &Option<String>, name: &str| -> Result<_, CliError> {
            let s = s.as_ref().ok_or_else(|| CliError::Usage(format!("--{name} is required")))?;
            Ok(field.parse_element(s)?)
        };
        Ok(EllipticCurve::new(parse(&self.a, "a")?, parse(&self.b, "b")?)?)
    }
}

fn parse_points(curve: &EllipticCurve, list: &str) -> Result<Vec<CurvePoint>, CliError> {
    list.split(';').filter(|s| !s.trim().is_empty()).map(|s| Ok(curve.parse_point(s)?)).collect()
}

fn build_spec(curve: EllipticCurve, d: &str, m: usize) -> Result<EllipticCodeSpec, CliError> {
    let d = d.trim();
    let spec = if d.eq_ignore_ascii_case("all-minus-O") {
        EllipticCodeSpec::all_minus_o(curve, m)?
    } else if let Some(base) = d.strip_prefix("multiples:") {
        let base = curve.parse_point(base)?;
        EllipticCodeSpec::multiples_of(curve, &base, m)?
    } else {
        let points = parse_points(&curve, d)?;
        EllipticCodeSpec::new(curve, points, m)?
    };
    Ok(spec)
}

impl CodeArgs {
    pub fn spec(&self) -> Result<EllipticCodeSpec, CliError> {
        if let Some(path) = &self.spec {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let file: SpecFile = serde_json::from_str(&text)?;
            return spec_from_file(&file);
        }
        let m = self.m.ok_or_else(|| CliError::Usage("--m is required".into()))?;
        build_spec(self.curve.curve()?, &self.d, m)
    }
}

pub fn spec_from_file(file: &SpecFile) -> Result<EllipticCodeSpec, CliError> {
    if file.schema != SCHEMA {
        return Err(CliError::Usage(format!("unsupported schema {}", file.schema)));
    }
    let field = Field::new(file.field.parse()?);
    let curve = EllipticCurve::new(field.parse_element(&file.a)?, field.parse_element(&file.b)?)?;
    match &file.d {
        serde_json::Value::String(s) => build_spec(curve, s, file.m),
        serde_json::Value::Array(items) => {
            let mut points = Vec::with_capacity(items.len());
            for item in items {
                let pair: [String; 2] = serde_json::from_value(item.clone())?;
                points.push(curve.parse_point(&format!("{},{}", pair[0], pair[1]))?);
            }
            Ok(EllipticCodeSpec::new(curve, points, file.m)?)
        }
        other => Err(CliError::Usage(format!("D must be a string or a point list, got {other}"))),
    }
}

pub fn spec_to_file(spec: &EllipticCodeSpec) -> SpecFile {
    let c = spec.curve();
    SpecFile {
        schema: SCHEMA,
        field: spec.field().spec().to_string(),
        a: c.a().to_string(),
        b: c.b().to_string(),
        m: spec.m(),
        d: serde_json::to_value(point_list(spec.points())).expect("strings serialise"),
    }
}

fn point_list(points: &[CurvePoint]) -> Vec<[String; 2]> {
    points.iter().filter_map(CurvePoint::to_strings).collect()
}

#[derive(Serialize)]
struct CurveJson {
    field: String,
    a: String,
    b: String,
}

impl CurveJson {
    fn of(c: &EllipticCurve) -> Self {
        Self { field: c.field().spec().to_string(), a: c.a().to_string(), b: c.b().to_string() }
    }
}

#[derive(Serialize)]
struct PointsJson {
    schema: u32,
    curve: CurveJson,
    /// Includes the point at infinity, which is not listed.
    order: usize,
    points: Vec<[String; 2]>,
}

#[derive(Serialize)]
struct StructureJson {
    schema: u32,
    curve: CurveJson,
    m1: u64,
    m2: u64,
    generators: [String; 2],
    coordinates: Vec<(String, [u64; 2])>,
}

#[derive(Serialize)]
struct GroupcountJson {
    schema: u32,
    group: String,
    k: u64,
    target: Vec<u64>,
    formula: serde_json::Value,
    dp: serde_json::Value,
    agree: bool,
}

#[derive(Serialize)]
struct MatrixJson {
    schema: u32,
    curve: CurveJson,
    m: usize,
    n: usize,
    basis: Vec<String>,
    which: &'static str,
    rows: usize,
    matrix: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct GroupJson {
    m1: u64,
    m2: u64,
    order: u64,
}

#[derive(Serialize)]
pub struct ReportJson {
    schema: u32,
    curve: CurveJson,
    group: GroupJson,
    n: usize,
    m: usize,
    #[serde(rename = "D")]
    d: Vec<[String; 2]>,
    #[serde(rename = "S_m")]
    s_m: Option<Vec<IndexSet>>,
    #[serde(rename = "S_m_count")]
    s_m_count: serde_json::Value,
    #[serde(rename = "S_m1_count")]
    s_m1_count: serde_json::Value,
    distribution: Distribution,
    stopping_distance: usize,
    /// `null` when `H*` or the subset sweep is too large to check.
    oracle_agreement: Option<bool>,
}

#[derive(Serialize)]
struct MdsJson {
    schema: u32,
    n: usize,
    k: usize,
    distribution: Distribution,
    oracle_agreement: Option<bool>,
}

#[derive(Serialize)]
struct DecodeJson {
    schema: u32,
    erased: IndexSet,
    codeword: Vec<String>,
    recovered: Vec<Option<String>>,
    residual: IndexSet,
    residual_is_stopping: bool,
    passes: usize,
}

#[derive(Serialize)]
struct VerifyJson {
    schema: u32,
    instances: usize,
    mismatches: Vec<Mismatch>,
}

fn emit(value: &impl Serialize, out: Option<&PathBuf>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    emit_text(&text, out)
}

fn emit_text(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Stopping-set report, with the oracle cross-check when `H*` is small enough.
pub fn build_report(spec: &EllipticCodeSpec, max_n: usize, max_rows: u64) -> Result<ReportJson, CliError> {
    let report = StoppingReport::compute(spec, max_n, MAX_LISTED)?;
    let structure = spec.curve().group_structure()?;
    let oracle_agreement = match h_star(&generator_matrix(spec), max_rows) {
        Ok(rows) if spec.n() <= 20 => {
            let profile = SupportProfile::from_rows(spec.n(), rows);
            Some(profile.distribution()? == report.distribution)
        }
        _ => None,
    };
    Ok(ReportJson {
        schema: SCHEMA,
        curve: CurveJson::of(spec.curve()),
        group: GroupJson { m1: structure.m1, m2: structure.m2, order: structure.order() },
        n: spec.n(),
        m: spec.m(),
        d: point_list(spec.points()),
        s_m: report.s_m,
        s_m_count: big_json(&report.s_m_count),
        s_m1_count: big_json(&report.s_m1_count),
        distribution: report.distribution,
        stopping_distance: report.stopping_distance,
        oracle_agreement,
    })
}

fn parse_indices(s: &str) -> Result<IndexSet, CliError> {
    let mut set = IndexSet::EMPTY;
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let i: usize = part.parse().map_err(|_| CliError::Usage(format!("bad index {part:?}")))?;
        if !(1..=crate::subsets::MAX_N).contains(&i) {
            return Err(CliError::Usage(format!("index {i} out of range")));
        }
        set = set.insert(i);
    }
    Ok(set)
}

fn matrix_json(spec: &EllipticCodeSpec, which: Which, max_rows: u64) -> Result<MatrixJson, CliError> {
    let (name, matrix): (&str, CodeMatrix) = match which {
        Which::Functional => ("functional", generator_matrix(spec)),
        Which::Residue => ("residue", residue_generator(spec)),
        Which::HStar => ("h-star", h_star_matrix(&generator_matrix(spec), max_rows)?),
    };
    Ok(MatrixJson {
        schema: SCHEMA,
        curve: CurveJson::of(spec.curve()),
        m: spec.m(),
        n: spec.n(),
        basis: rr_basis(spec.m())?.iter().map(ToString::to_string).collect(),
        which: name,
        rows: matrix.n_rows(),
        matrix: matrix.to_strings(),
    })
}

pub fn run_verify(args: &VerifyArgs, max_rows: u64) -> Result<(usize, Vec<Mismatch>), CliError> {
    let limits = Limits { max_rows, seed: args.seed, ..Limits::default() };
    let mut instances = 0;
    let mut mismatches = Vec::new();
    for p in (5..=args.max_q).filter(|&p| crate::ffield::is_prime(p)) {
        for curve in all_curves(p) {
            let n = curve.rational_points().len() - 1;
            for m in 2..=args.max_m {
                if m >= n || (p as u128).pow(m as u32) > max_rows as u128 {
                    continue;
                }
                let spec = EllipticCodeSpec::all_minus_o(curve.clone(), m)?;
                let rows = h_star_rows(&spec, max_rows)?;
                mismatches.extend(verify_instance(&spec, &rows, &limits)?);
                instances += 1;
            }
        }
        let field = Field::prime(p)?;
        for n in 2..=p as usize {
            for k in 1..n {
                if (p as u128).pow((n - k) as u32) <= max_rows as u128 {
                    mismatches.extend(verify_rs(&field, n, k, max_rows)?);
                    instances += 1;
                }
            }
        }
    }
    for order in 2..=args.max_group_order {
        for group in groups_of_order(order) {
            mismatches.extend(verify_group(&group));
            instances += 1;
        }
    }
    Ok((instances, mismatches))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let max_rows = max_rows()?;
    match cli.command {
        Command::Points(args) => {
            let curve = args.curve()?;
            let points = curve.rational_points();
            let json = PointsJson { schema: SCHEMA, curve: CurveJson::of(&curve), order: points.len(), points: point_list(&points) };
            emit(&json, args.out.as_ref())
        }
        Command::Structure(args) => {
            let curve = args.curve()?;
            let s = curve.group_structure()?;
            let coordinates = curve
                .rational_points()
                .iter()
                .map(|p| {
                    let (c1, c2) = s.coords(p).expect("every rational point has coordinates");
                    (p.to_string(), [c1, c2])
                })
                .collect();
            let json = StructureJson {
                schema: SCHEMA,
                curve: CurveJson::of(&curve),
                m1: s.m1,
                m2: s.m2,
                generators: [s.generators.0.to_string(), s.generators.1.to_string()],
                coordinates,
            };
            emit(&json, args.out.as_ref())
        }
        Command::Groupcount(args) => {
            let group: AbelianGroup = args.group.parse()?;
            let target = match &args.target {
                None => group.identity(),
                Some(t) => GroupElement::new(
                    t.split(',')
                        .map(|c| c.trim().parse::<u64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| CliError::Usage(format!("bad target {t:?}")))?,
                ),
            };
            let formula = count_formula(&group, args.k, &target)?;
            let dp = dp_count(&group, &group.nonzero_elements(), args.k as usize, &target)?;
            let json = GroupcountJson {
                schema: SCHEMA,
                group: group.to_string(),
                k: args.k,
                target: target.coords().to_vec(),
                agree: formula == dp,
                formula: big_json(&formula),
                dp: big_json(&dp),
            };
            emit(&json, None)?;
            if json.agree {
                Ok(())
            } else {
                Err(CliError::Mismatch(1))
            }
        }
        Command::Gen(args) => {
            let spec = args.code.spec()?;
            emit(&matrix_json(&spec, args.which, max_rows)?, args.code.curve.out.as_ref())
        }
        Command::Report(args) => {
            let spec = args.code.spec()?;
            let report = build_report(&spec, args.max_n, max_rows)?;
            match args.format {
                Format::Json => emit(&report, args.code.curve.out.as_ref()),
                Format::Csv => emit_text(&report.distribution.to_csv(), args.code.curve.out.as_ref()),
            }
        }
        Command::Mds(args) => {
            let distribution = mds_distribution(args.n, args.k)?;
            let oracle_agreement = match args.check_p {
                Some(p) => Some(verify_rs(&Field::prime(p)?, args.n, args.k, max_rows)?.is_empty()),
                None => None,
            };
            match args.format {
                Format::Csv => emit_text(&distribution.to_csv(), args.out.as_ref())?,
                Format::Json => emit(
                    &MdsJson { schema: SCHEMA, n: args.n, k: args.k, distribution, oracle_agreement },
                    args.out.as_ref(),
                )?,
            }
            if oracle_agreement == Some(false) {
                return Err(CliError::Mismatch(1));
            }
            Ok(())
        }
        Command::Decode(args) => {
            let spec = args.code.spec()?;
            let erased = parse_indices(&args.erased)?;
            let dual = generator_matrix(&spec);
            let word = match args.codeword {
                CodewordChoice::Zero => vec![spec.field().zero(); spec.n()],
                CodewordChoice::Random => random_codeword(&residue_generator(&spec), &mut ChaCha8Rng::seed_from_u64(args.seed)),
            };
            let instance = ErasureInstance::new(word, erased, &dual)?;
            let rows: Vec<_> = h_star(&dual, max_rows)?.collect();
            let outcome = peel(&rows, &instance, None)?;
            let json = DecodeJson {
                schema: SCHEMA,
                erased,
                codeword: instance.codeword().iter().map(ToString::to_string).collect(),
                recovered: outcome.recovered.iter().map(|v| v.as_ref().map(ToString::to_string)).collect(),
                residual: outcome.residual,
                residual_is_stopping: residual_is_stopping(&rows, outcome.residual),
                passes: outcome.passes,
            };
            emit(&json, args.code.curve.out.as_ref())
        }
        Command::Verify(args) => {
            let (instances, mismatches) = run_verify(&args, max_rows)?;
            let count = mismatches.len();
            if count > 0 {
                // Smallest counterexample first.
                let first = mismatches
                    .iter()
                    .min_by_key(|m| m.subset.map(|s| s.len()).unwrap_or(usize::MAX))
                    .expect("nonempty");
                eprintln!("counterexample: {}", serde_json::to_string(first)?);
            }
            emit(&VerifyJson { schema: SCHEMA, instances, mismatches }, args.out.as_ref())?;
            if count > 0 {
                Err(CliError::Mismatch(count))
            } else {
                Ok(())
            }
        }
    }
}

/// Parses arguments, runs, and maps the outcome to an exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
