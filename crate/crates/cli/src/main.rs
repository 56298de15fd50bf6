//! `reconlab`: run the matrix reconstruction checks from the command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, is
//! inconclusive or the hypomorphism gate rejects the input, 2 on input or
//! usage errors (with a JSON error object on stdout).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use reconlab_core::graph6::{graph6_decode_lines, Graph6Record};
use reconlab_core::hypomorphism::{find_hypomorphism, gen_pair, Hypomorphism, EXACT_TOL};
use reconlab_core::io::{
    cone_from_json, matrix_from_json, matrix_hash, matrix_to_json, pair_from_json, pair_hash,
    pair_to_json, sha256_hex, to_csv, PairFile,
};
use reconlab_core::matrix::{deck, determinant, Permutation, SymmetricMatrix};
use reconlab_core::presentation::lambda0_search;
use reconlab_core::solid_angle::angle_fraction;
use reconlab_core::suite::{verify_geometry_suite_with, SuiteTolerances};
use reconlab_core::verify::{
    default_grid, linspace, verify_eq1_with, verify_main1_t_agreement, verify_main_theorem_with,
    verify_tutte_with, Gate, MainTolerances, DET_TOL, T_TOL,
};
use reconlab_core::Error;
use serde::Serialize;
use serde_json::{json, Value};

const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Parser, Debug)]
#[command(name = "reconlab", version, about = "Checks for hypomorphic symmetric matrices and solid angles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solid angle fraction of a simplicial cone.
    Angle(AngleArgs),
    /// Deck (vertex-deleted submatrices) and majors of a matrix.
    Deck(DeckArgs),
    /// Build A = adj(G), B = τAτᵗ and search for a hypomorphism.
    GenPair(GenPairArgs),
    /// Determinant identity and λ-constancy on a (λ, t) grid.
    VerifyTutte(TutteArgs),
    /// Lowest-eigenspace agreement along the constructed t interval.
    VerifyMain(MainArgs),
    /// Seeded invariant suite over random presentations and cones.
    VerifyGeometry(GeometryArgs),
    /// Convert a graph6 file into one matrix JSON per graph.
    Ingest(IngestArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Omit the timestamp so repeated runs are byte-identical.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct AngleArgs {
    #[arg(long)]
    cone: PathBuf,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "source")]
struct Source {
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Uses the first graph in the file.
    #[arg(long)]
    graph6: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DeckArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct GenPairArgs {
    #[command(flatten)]
    source: Source,
    /// `rotation`, `reflection`, or comma-separated images such as `2,0,1`.
    #[arg(long, default_value = "rotation")]
    tau: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Gating {
    /// Run the check even if the hypomorphism does not verify.
    #[arg(long)]
    force: bool,
    /// Tolerance for re-verifying the hypomorphism.
    #[arg(long, default_value_t = EXACT_TOL, allow_hyphen_values = true)]
    tol_hyp: f64,
}

#[derive(Args, Debug)]
struct TutteArgs {
    #[arg(long)]
    pair: PathBuf,
    /// `lo:hi:count` or a comma-separated list.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid_lambda: Option<Grid>,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid_t: Option<Grid>,
    #[arg(long, default_value_t = DET_TOL, allow_hyphen_values = true)]
    tol_det: f64,
    #[command(flatten)]
    gating: Gating,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct MainArgs {
    #[arg(long)]
    pair: PathBuf,
    /// Number of t values sampled inside the interval.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = MainTolerances::default().eig_rel, allow_hyphen_values = true)]
    tol_eig: f64,
    #[arg(long, default_value_t = MainTolerances::default().gap_rel, allow_hyphen_values = true)]
    tol_gap: f64,
    #[arg(long, default_value_t = MainTolerances::default().align, allow_hyphen_values = true)]
    tol_align: f64,
    #[arg(long, default_value_t = T_TOL, allow_hyphen_values = true)]
    tol_t: f64,
    #[command(flatten)]
    gating: Gating,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct GeometryArgs {
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    #[arg(long, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    seed: u64,
    #[arg(long, default_value_t = SuiteTolerances::default().resid, allow_hyphen_values = true)]
    tol_resid: f64,
    #[arg(long, default_value_t = SuiteTolerances::default().eig, allow_hyphen_values = true)]
    tol_eig: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct IngestArgs {
    #[arg(long)]
    graph6: PathBuf,
    /// Directory for the matrix files; matrices are inlined in the report when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    deterministic: bool,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("invalid grid value `{x}`"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [lo, hi, count] => {
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| format!("invalid grid count `{count}`"))?;
            if count == 0 {
                return Err("grid count must be at least 1".into());
            }
            linspace(num(lo)?, num(hi)?, count)
        }
        [list] => list.split(',').map(num).collect::<Result<_, _>>()?,
        _ => return Err(format!("grid `{s}` is neither lo:hi:count nor a list")),
    };
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    Ok(Grid(grid))
}

/// A failure that maps to exit code 2.
#[derive(Debug)]
struct InputError {
    kind: &'static str,
    message: String,
    path: Option<PathBuf>,
    line: Option<usize>,
}

impl InputError {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
            path: None,
            line: None,
        }
    }

    fn at(mut self, path: &Path) -> Self {
        self.path = Some(path.to_path_buf());
        self
    }

    fn to_json(&self) -> Value {
        let mut v = json!({ "error": self.kind, "message": self.message });
        if let Some(p) = &self.path {
            v["path"] = json!(p.display().to_string());
        }
        if let Some(l) = self.line {
            v["line"] = json!(l);
        }
        v
    }
}

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        Self::new(e.kind(), e.to_string())
    }
}

enum Failure {
    /// Gate rejection; exit 1 with the error object as the report.
    Rejected(InputError),
    Input(InputError),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotHypomorphic { .. } => Failure::Rejected(e.into()),
            other => Failure::Input(other.into()),
        }
    }
}

type Outcome = Result<bool, Failure>;

#[derive(Serialize)]
struct InputRef {
    path: String,
    sha256: String,
}

impl InputRef {
    fn new(path: &Path, sha256: String) -> Self {
        Self {
            path: path.display().to_string(),
            sha256,
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<u64>,
    inputs: Vec<InputRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    tolerances: Value,
    pass: bool,
    report: T,
}

struct Emit<'a> {
    command: &'a str,
    inputs: Vec<InputRef>,
    seed: Option<u64>,
    samples: Option<u64>,
    tolerances: Value,
}

impl Emit<'_> {
    fn write<T: Serialize, R: Serialize>(
        self,
        output: &Output,
        pass: bool,
        report: &T,
        csv_rows: &[R],
    ) -> Outcome {
        let text = match output.format {
            Format::Csv => to_csv(csv_rows)?,
            Format::Json => {
                let env = Envelope {
                    tool: "reconlab",
                    version: env!("CARGO_PKG_VERSION"),
                    command: self.command,
                    generated_at: timestamp(output.deterministic),
                    inputs: self.inputs,
                    seed: self.seed,
                    samples: self.samples,
                    tolerances: self.tolerances,
                    pass,
                    report,
                };
                let mut s = serde_json::to_string_pretty(&env).map_err(Error::from)?;
                s.push('\n');
                s
            }
        };
        deliver(output.out.as_deref(), &text)?;
        Ok(pass)
    }
}

fn timestamp(deterministic: bool) -> Option<u64> {
    if deterministic {
        return None;
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .ok()
        .map(|d| d.as_secs())
}

fn deliver(out: Option<&Path>, text: &str) -> Result<(), InputError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| InputError::new("IoError", format!("cannot write: {e}")).at(path)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path)
        .map_err(|e| InputError::new("IoError", format!("cannot read: {e}")).at(path))
}

fn with_path<T>(path: &Path, r: reconlab_core::Result<T>) -> Result<T, InputError> {
    r.map_err(|e| InputError::from(e).at(path))
}

fn load_source(src: &Source) -> Result<(SymmetricMatrix, InputRef), InputError> {
    if let Some(path) = &src.matrix {
        let m = with_path(path, matrix_from_json(&read(path)?))?;
        let hash = with_path(path, matrix_hash(&m))?;
        return Ok((m, InputRef::new(path, hash)));
    }
    let path = src.graph6.as_ref().expect("clap enforces one source");
    let text = read(path)?;
    let graphs = graph6_decode_lines(&text).map_err(|(line, e)| line_error(path, line, e))?;
    let (_, g) = graphs
        .into_iter()
        .next()
        .ok_or_else(|| InputError::new("InvalidInput", "no graph in file").at(path))?;
    let m = with_path(path, g.adjacency_matrix())?;
    Ok((m, InputRef::new(path, sha256_hex(text.as_bytes()))))
}

fn line_error(path: &Path, line: usize, e: Error) -> InputError {
    let mut err = InputError::new(e.kind(), format!("line {line}: {e}")).at(path);
    err.line = Some(line);
    err
}

/// Pair from file; without a stored `sigma` the search supplies one.
fn load_pair(path: &Path, force: bool) -> Result<(PairFile, Hypomorphism, InputRef), Failure> {
    let pair = with_path(path, pair_from_json(&read(path)?))?;
    let hash = with_path(path, pair_hash(&pair))?;
    let sigma = match &pair.sigma {
        Some(s) => s.clone(),
        None => match with_path(path, find_hypomorphism(&pair.a, &pair.b))? {
            Some(s) => s,
            None if force => with_path(path, Hypomorphism::identity(pair.a.n()))?,
            None => {
                return Err(Failure::Rejected(
                    InputError::new("NotHypomorphic", "no hypomorphism exists between A and B")
                        .at(path),
                ))
            }
        },
    };
    Ok((pair, sigma, InputRef::new(path, hash)))
}

fn gate(g: &Gating) -> Gate {
    Gate {
        tol: g.tol_hyp,
        force: g.force,
    }
}

fn run_angle(args: &AngleArgs) -> Outcome {
    let text = read(&args.cone)?;
    let cone = with_path(&args.cone, cone_from_json(&text))?;
    let est = angle_fraction(&cone, args.samples, args.seed)?;
    Emit {
        command: "angle",
        inputs: vec![InputRef::new(&args.cone, sha256_hex(text.as_bytes()))],
        seed: Some(args.seed),
        samples: Some(args.samples),
        tolerances: json!({}),
    }
    .write(&args.output, true, &est, std::slice::from_ref(&est))
}

#[derive(Serialize)]
struct DeckCard {
    index: usize,
    major: f64,
    entries: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct DeckRow {
    index: usize,
    major: f64,
}

#[derive(Serialize)]
struct DeckReport {
    n: usize,
    cards: Vec<DeckCard>,
    majors_sorted: Vec<f64>,
}

fn run_deck(args: &DeckArgs) -> Outcome {
    let (a, input) = load_source(&args.source)?;
    let cards: Vec<DeckCard> = deck(&a)?
        .into_iter()
        .enumerate()
        .map(|(index, m)| DeckCard {
            index,
            major: determinant(m.as_matrix()),
            entries: m.rows(),
        })
        .collect();
    let mut majors_sorted: Vec<f64> = cards.iter().map(|c| c.major).collect();
    majors_sorted.sort_by(f64::total_cmp);
    let rows: Vec<DeckRow> = cards
        .iter()
        .map(|c| DeckRow {
            index: c.index,
            major: c.major,
        })
        .collect();
    let report = DeckReport {
        n: a.n(),
        cards,
        majors_sorted,
    };
    Emit {
        command: "deck",
        inputs: vec![input],
        seed: None,
        samples: None,
        tolerances: json!({}),
    }
    .write(&args.output, true, &report, &rows)
}

fn parse_tau(spec: &str, n: usize) -> Result<Permutation, InputError> {
    match spec {
        "rotation" => Ok(Permutation::rotation(n, 1)),
        "reflection" => Ok(Permutation::reflection(n)),
        list => {
            let image = list
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| InputError::new("UsageError", format!("--tau `{list}`: {e}")))?;
            Ok(Permutation::new(image)?)
        }
    }
}

fn run_gen_pair(args: &GenPairArgs) -> Outcome {
    let (a, input) = load_source(&args.source)?;
    let path = PathBuf::from(&input.path);
    let g = with_path(&path, Graph6Record::from_adjacency(&a))?;
    let tau = parse_tau(&args.tau, a.n())?;
    let generated = gen_pair(&g, &tau)?;
    let pair = PairFile {
        a: generated.a,
        b: generated.b,
        sigma: generated.sigma,
    };
    let mut text = pair_to_json(&pair)?;
    text.push('\n');
    deliver(args.out.as_deref(), &text)?;
    Ok(pair.sigma.is_some())
}

#[derive(Serialize)]
struct TutteOut<T, E> {
    tutte: T,
    eq1: E,
}

fn run_tutte(args: &TutteArgs) -> Outcome {
    let (pair, sigma, input) = load_pair(&args.pair, args.gating.force)?;
    let lambdas = args.grid_lambda.clone().map_or_else(default_grid, |g| g.0);
    let ts = args.grid_t.clone().map_or_else(default_grid, |g| g.0);
    let g = gate(&args.gating);
    let tutte = verify_tutte_with(&pair.a, &pair.b, &sigma, &lambdas, &ts, &g, args.tol_det)?;
    let eq1 = verify_eq1_with(&pair.a, &pair.b, &sigma, &lambdas, &ts, &g, args.tol_det)?;
    let pass = tutte.pass && eq1.pass;
    Emit {
        command: "verify-tutte",
        inputs: vec![input],
        seed: None,
        samples: None,
        tolerances: json!({ "det": args.tol_det, "hypomorphism": args.gating.tol_hyp }),
    }
    .write(&args.output, pass, &TutteOut { tutte: &tutte, eq1: &eq1 }, &tutte.grid)
}

#[derive(Serialize)]
struct MainOut<M, T> {
    main_theorem: M,
    t_agreement: Vec<T>,
}

fn run_main(args: &MainArgs) -> Outcome {
    let (pair, sigma, input) = load_pair(&args.pair, args.gating.force)?;
    let g = gate(&args.gating);
    let tol = MainTolerances {
        eig_rel: args.tol_eig,
        gap_rel: args.tol_gap,
        align: args.tol_align,
    };
    let samples = usize::try_from(args.samples).unwrap_or(usize::MAX);
    let main = verify_main_theorem_with(&pair.a, &pair.b, &sigma, samples, &g, &tol)?;
    let l0 = lambda0_search(&pair.a).max(lambda0_search(&pair.b));
    let mut agreement = Vec::new();
    for lambda in [l0, l0 + 1.0, 4.0 * l0] {
        agreement.push(verify_main1_t_agreement(&pair.a, &pair.b, &sigma, lambda, &g)?);
    }
    let t_ok = agreement
        .iter()
        .all(|r| r.abs_diff <= args.tol_t * r.t_a.abs().max(1.0));
    let pass = main.pass && t_ok;
    Emit {
        command: "verify-main",
        inputs: vec![input],
        seed: None,
        samples: Some(args.samples),
        tolerances: json!({
            "eig_rel": args.tol_eig,
            "gap_rel": args.tol_gap,
            "align": args.tol_align,
            "t": args.tol_t,
            "hypomorphism": args.gating.tol_hyp,
        }),
    }
    .write(
        &args.output,
        pass,
        &MainOut {
            main_theorem: &main,
            t_agreement: agreement,
        },
        &main.samples,
    )
}

fn run_geometry(args: &GeometryArgs) -> Outcome {
    let tol = SuiteTolerances {
        resid: args.tol_resid,
        eig: args.tol_eig,
    };
    let count = usize::try_from(args.count).unwrap_or(usize::MAX);
    let report = verify_geometry_suite_with(args.seed, count, &tol);
    Emit {
        command: "verify-geometry",
        inputs: Vec::new(),
        seed: Some(args.seed),
        samples: Some(args.count),
        tolerances: json!({ "resid": args.tol_resid, "eig": args.tol_eig }),
    }
    .write(&args.output, report.pass, &report, &report.invariants)
}

#[derive(Serialize)]
struct IngestRow {
    line: usize,
    n: usize,
    edges: usize,
    sha256: String,
    path: Option<String>,
}

#[derive(Serialize)]
struct IngestReport {
    graphs: Vec<IngestRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    matrices: Vec<Value>,
}

fn run_ingest(args: &IngestArgs) -> Outcome {
    let text = read(&args.graph6)?;
    let graphs =
        graph6_decode_lines(&text).map_err(|(line, e)| line_error(&args.graph6, line, e))?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)
            .map_err(|e| InputError::new("IoError", format!("cannot create: {e}")).at(dir))?;
    }
    let mut report = IngestReport {
        graphs: Vec::new(),
        matrices: Vec::new(),
    };
    for (line, g) in graphs {
        let m = g.adjacency_matrix().map_err(|e| line_error(&args.graph6, line, e))?;
        let body = matrix_to_json(&m)?;
        let path = match &args.out {
            Some(dir) => {
                let file = dir.join(format!("line{line:05}.json"));
                deliver(Some(&file), &format!("{body}\n"))?;
                Some(file.display().to_string())
            }
            None => {
                report
                    .matrices
                    .push(serde_json::from_str(&body).map_err(Error::from)?);
                None
            }
        };
        report.graphs.push(IngestRow {
            line,
            n: g.order(),
            edges: g.edge_count(),
            sha256: sha256_hex(body.as_bytes()),
            path,
        });
    }
    let output = Output {
        out: None,
        format: args.format,
        deterministic: args.deterministic,
    };
    Emit {
        command: "ingest",
        inputs: vec![InputRef::new(&args.graph6, sha256_hex(text.as_bytes()))],
        seed: None,
        samples: None,
        tolerances: json!({}),
    }
    .write(&output, true, &report, &report.graphs)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let err = InputError::new("UsageError", e.to_string().trim_end());
            println!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    let outcome = match &cli.command {
        Command::Angle(a) => run_angle(a),
        Command::Deck(a) => run_deck(a),
        Command::GenPair(a) => run_gen_pair(a),
        Command::VerifyTutte(a) => run_tutte(a),
        Command::VerifyMain(a) => run_main(a),
        Command::VerifyGeometry(a) => run_geometry(a),
        Command::Ingest(a) => run_ingest(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Rejected(e)) => {
            println!("{}", e.to_json());
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            println!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
