//! The `qcell` command line, as a library so that tests can drive it in-process.

mod element;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qcell_core::invariants::{self, CheckResult, MODULES};
use qcell_core::qcluster::{CompatiblePair, QuantumSeed, TorusElement};
use qcell_core::{CellElement, Engine, Error, NCElement, Side, WeylElt};

pub use element::parse_element;

/// Version tag carried by every JSON document; the schemas live in `schemas/`.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable overriding the default height cap.
pub const HEIGHT_CAP_VAR: &str = "QCELL_HEIGHT_CAP";

/// Cap used by `twist` and `period` when neither the flag nor the variable is set.
const TWIST_HEIGHT_CAP: usize = 24;

#[derive(Parser, Debug)]
#[command(name = "qcell", version, about = "Exact computations in quantum unipotent cells")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Dual canonical basis of U^-(w0) up to a height, with string data.
    Basis {
        #[command(flatten)]
        common: Common,
        /// Reduced word of the longest element labelling the basis (1-based letters).
        #[arg(long, value_delimiter = ',')]
        word: Option<Vec<usize>>,
    },
    /// The unipotent quantum minor D_{w lambda, w' lambda}.
    Minor {
        #[command(flatten)]
        common: Common,
        /// Dominant weight in fundamental-weight coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        lambda: Vec<i64>,
        /// Word for w (1-based; empty for the identity).
        #[arg(long, value_delimiter = ',', default_value = "")]
        left: Vec<String>,
        /// Word for w'.
        #[arg(long, value_delimiter = ',', default_value = "")]
        right: Vec<String>,
    },
    /// The Lusztig pairing of two elements of U^-.
    Pair {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// The twist automorphism of the cell algebra.
    Twist {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        cell: CellArgs,
    },
    /// Iterates the twist and compares with the expected closed form.
    Period {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        cell: CellArgs,
        /// Number of iterations.
        #[arg(long, default_value_t = 6)]
        n: u32,
    },
    /// Mutates a quantum seed along a path.
    Mutate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        seed: SeedArgs,
        /// Exchangeable indices, 1-based.
        #[arg(long, value_delimiter = ',')]
        path: Option<Vec<usize>>,
    },
    /// The initial quantum seed of a reduced word.
    Seed {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Runs the property checks of the library.
    Verify {
        /// Run every module.
        #[arg(long, conflicts_with = "module")]
        all: bool,
        /// Run one module.
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(MODULES.iter().copied().chain(["cli"])))]
        module: Option<String>,
        /// Seed of the samplers.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Cartan type: A1, A2, A3, B2 or G2.
    #[arg(long = "type")]
    ty: String,
    /// Height cap for weight spaces; `basis` tabulates every weight up to it.
    #[arg(long)]
    height: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct CellArgs {
    /// Element of U^- whose class is the numerator.
    #[arg(long, allow_hyphen_values = true)]
    element: String,
    /// Weight of the inverted minor, in fundamental-weight coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<i64>>,
    /// Reduced word of the cell's Weyl group element; the longest element by default.
    #[arg(long, value_delimiter = ',')]
    word: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
struct SeedArgs {
    /// Reduced word of w (1-based letters).
    #[arg(long, value_delimiter = ',', conflicts_with = "file")]
    word: Option<Vec<usize>>,
    /// Seed file: JSON with `lambda`, `exchange`, optional `labels` and `path`.
    #[arg(long, conflicts_with = "word")]
    file: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Compute(Error),
    Falsified(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

type Run<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(cli.verb) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(Failure::Usage(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n\nFor more information, try '--help'.\n"),
        },
        Err(Failure::Compute(e)) => {
            let v = json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } });
            Outcome { code: 1, stdout: String::new(), stderr: format!("{v}\n") }
        }
        Err(Failure::Falsified(stdout)) => Outcome { code: 1, stdout, stderr: String::new() },
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DivisionByZero => "division_by_zero",
        Error::PoleAtOne => "pole_at_one",
        Error::Parse(_) => "parse",
        Error::InvalidRootDatum(_) => "invalid_root_datum",
        Error::HeightCap { .. } => "height_cap",
        Error::NotReduced(_) => "not_reduced",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::Unsupported(_) => "unsupported",
        Error::Internal(_) => "internal",
    }
}

fn dispatch(verb: Verb) -> Run<String> {
    match verb {
        Verb::Basis { common, word } => basis(&common, word),
        Verb::Minor { common, lambda, left, right } => minor(&common, &lambda, &left, &right),
        Verb::Pair { common, x, y } => pair(&common, &x, &y),
        Verb::Twist { common, cell } => twist(&common, &cell),
        Verb::Period { common, cell, n } => period(&common, &cell, n),
        Verb::Mutate { common, seed, path } => mutate(&common, &seed, path),
        Verb::Seed { common, seed } => seed_verb(&common, &seed),
        Verb::Verify { all, module, seed, format } => verify(all, module, seed, format),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing.

fn height_cap(common: &Common, fallback: usize) -> Run<usize> {
    if let Some(h) = common.height {
        return Ok(h);
    }
    match std::env::var(HEIGHT_CAP_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| usage(format!("{HEIGHT_CAP_VAR} must be a nonnegative integer, got {s:?}"))),
        Err(_) => Ok(fallback),
    }
}

fn engine(common: &Common, fallback: usize) -> Run<Engine> {
    let e = Engine::from_type(&common.ty).map_err(|e| usage(format!("--type: {e}")))?;
    Ok(e.with_height_cap(height_cap(common, fallback)?))
}

fn zero_based(word: &[usize], rank: usize, flag: &str) -> Run<Vec<usize>> {
    word.iter()
        .map(|&i| if (1..=rank).contains(&i) { Ok(i - 1) } else { Err(usage(format!("{flag}: letter {i} out of range 1..={rank}"))) })
        .collect()
}

fn one_based(word: &[usize]) -> Vec<usize> {
    word.iter().map(|i| i + 1).collect()
}

/// A pattern from an optional word; the longest element by default.
fn pattern(e: &Engine, word: &Option<Vec<usize>>, flag: &str) -> Run<WeylElt> {
    let rd = e.root_datum();
    match word {
        None => Ok(rd.longest_element()),
        Some(w) => rd.weyl_from_reduced_word(&zero_based(w, e.rank(), flag)?).map_err(|e| usage(format!("{flag}: {e}"))),
    }
}

fn element(e: &Engine, s: &str, flag: &str) -> Run<NCElement> {
    parse_element(s, e.rank()).map_err(|m| usage(format!("{flag}: {m}")))
}

fn document(kind: &str, mut body: Value) -> String {
    body["schema"] = json!(format!("qcell.{kind}/v{SCHEMA_VERSION}"));
    format!("{}\n", serde_json::to_string_pretty(&body).expect("serializable"))
}

fn list(xs: &[impl std::fmt::Display]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn cell_text(x: &CellElement) -> String {
    let mut out = format!("pattern: {}\ndenominator: {}\n", list(&one_based(x.pattern.word())), list(&x.denominator));
    if x.numerator.terms.is_empty() {
        out.push_str("  0\n");
    }
    for (b, c) in &x.numerator.terms {
        out.push_str(&format!("  [{}] {}\n", list(&b.exponents), c));
    }
    out
}

// ---------------------------------------------------------------------------
// Verbs.

fn basis(common: &Common, word: Option<Vec<usize>>) -> Run<String> {
    let e = engine(common, 4)?;
    let rd = e.root_datum();
    let word = match word {
        Some(w) => {
            let w = zero_based(&w, e.rank(), "--word")?;
            let elt = rd.weyl_from_reduced_word(&w).map_err(|err| usage(format!("--word: {err}")))?;
            if elt != rd.longest_element() {
                return Err(usage("--word must be a reduced word of the longest element"));
            }
            w
        }
        None => e.reference_word(),
    };
    let height = e.height_cap() as i64;
    let mut rows = Vec::new();
    let mut text = String::new();
    for h in 0..=height {
        for beta in contents_of_height(e.rank(), h) {
            for b in e.labels_of_weight(&word, &beta)? {
                let g = e.label_element(&b)?;
                let eps: Vec<u32> = (0..e.rank()).map(|i| e.crystal_epsilon(i, &b, Side::Left)).collect::<Result<_, _>>()?;
                let eps_star: Vec<u32> = (0..e.rank()).map(|i| e.crystal_epsilon(i, &b, Side::Right)).collect::<Result<_, _>>()?;
                let weight: Vec<i64> = beta.iter().map(|x| -x).collect();
                text.push_str(&format!(
                    "c=[{}] weight=[{}] eps=[{}] eps*=[{}]\n  {}\n",
                    list(&b.exponents),
                    list(&weight),
                    list(&eps),
                    list(&eps_star),
                    g
                ));
                rows.push(json!({
                    "label": b.exponents,
                    "weight": weight,
                    "epsilon": eps,
                    "epsilon_star": eps_star,
                    "expansion": g.to_json(e.rank()),
                }));
            }
        }
    }
    Ok(match common.format {
        Format::Json => document(
            "basis",
            json!({ "type": common.ty, "word": one_based(&word), "height": height, "rows": rows }),
        ),
        Format::Text => format!("type {} word {} height {height}\n{text}", common.ty, list(&one_based(&word))),
    })
}

/// Root contents of a given height, lexicographically.
fn contents_of_height(rank: usize, h: i64) -> Vec<Vec<i64>> {
    if rank == 0 {
        return if h == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=h).rev() {
        for rest in contents_of_height(rank - 1, h - first) {
            out.push([vec![first], rest].concat());
        }
    }
    out
}

fn word_flag(raw: &[String], rank: usize, flag: &str) -> Run<Vec<usize>> {
    let letters: Vec<usize> = raw
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse().map_err(|_| usage(format!("{flag}: {s:?} is not a letter"))))
        .collect::<Run<_>>()?;
    zero_based(&letters, rank, flag)
}

fn minor(common: &Common, lambda: &[i64], left: &[String], right: &[String]) -> Run<String> {
    let e = engine(common, qcell_core::engine::DEFAULT_HEIGHT_CAP)?;
    let rd = e.root_datum();
    if lambda.len() != e.rank() || lambda.iter().any(|&x| x < 0) {
        return Err(usage(format!("--lambda must be a dominant weight with {} coordinates", e.rank())));
    }
    let w = rd.weyl_from_reduced_word(&word_flag(left, e.rank(), "--left")?).map_err(|err| usage(format!("--left: {err}")))?;
    let w2 = rd.weyl_from_reduced_word(&word_flag(right, e.rank(), "--right")?).map_err(|err| usage(format!("--right: {err}")))?;
    let d = e.quantum_minor(&w, &w2, lambda)?;
    Ok(match common.format {
        Format::Json => document(
            "minor",
            json!({
                "type": common.ty,
                "lambda": lambda,
                "left": one_based(w.word()),
                "right": one_based(w2.word()),
                "element": d.to_json(e.rank()),
            }),
        ),
        Format::Text => format!("{d}\n"),
    })
}

fn pair(common: &Common, x: &str, y: &str) -> Run<String> {
    let e = engine(common, qcell_core::engine::DEFAULT_HEIGHT_CAP)?;
    let a = element(&e, x, "--x")?;
    let b = element(&e, y, "--y")?;
    let p = e.pair(&a, &b)?;
    Ok(match common.format {
        Format::Json => document("pair", json!({ "type": common.ty, "x": a.to_json(e.rank()), "y": b.to_json(e.rank()), "value": p.to_string() })),
        Format::Text => format!("{p}\n"),
    })
}

fn cell_element(e: &Engine, cell: &CellArgs) -> Run<CellElement> {
    let w = pattern(e, &cell.word, "--word")?;
    let y = element(e, &cell.element, "--element")?;
    let x = e.cell_from(&y, &w)?;
    match &cell.lambda {
        None => Ok(x),
        Some(l) if l.len() == e.rank() => {
            let inv: Vec<i64> = l.iter().map(|v| -v).collect();
            Ok(e.cell_mul(&e.frozen(&w, &inv)?, &x)?)
        }
        Some(_) => Err(usage(format!("--lambda needs {} coordinates", e.rank()))),
    }
}

fn twist(common: &Common, cell: &CellArgs) -> Run<String> {
    let e = engine(common, TWIST_HEIGHT_CAP)?;
    let x = cell_element(&e, cell)?;
    let y = e.twist_auto(&x)?;
    Ok(match common.format {
        Format::Json => {
            let mut v = e.cell_to_json(&y);
            v["type"] = json!(common.ty);
            v["source"] = e.cell_to_json(&x);
            document("twist", v)
        }
        Format::Text => cell_text(&y),
    })
}

fn period(common: &Common, cell: &CellArgs, n: u32) -> Run<String> {
    let e = engine(common, TWIST_HEIGHT_CAP)?;
    let x = cell_element(&e, cell)?;
    let report = e.periodicity_check(&x, n)?;
    Ok(match common.format {
        Format::Json => document(
            "period",
            json!({
                "type": common.ty,
                "iterations": report.iterations,
                "identity": report.holds,
                "source": e.cell_to_json(&x),
                "image": e.cell_to_json(&report.image),
                "expected": e.cell_to_json(&report.expected),
            }),
        ),
        Format::Text => format!(
            "identity: {}\niterations: {n}\nimage:\n{}expected:\n{}",
            report.holds,
            indent(&cell_text(&report.image)),
            indent(&cell_text(&report.expected))
        ),
    })
}

fn indent(s: &str) -> String {
    s.lines().map(|l| format!("  {l}\n")).collect()
}

/// Seed from flags: either the initial seed of `--word` or a seed file.
fn load_seed(e: &Engine, args: &SeedArgs) -> Run<(QuantumSeed, Option<Vec<usize>>)> {
    match (&args.word, &args.file) {
        (Some(word), None) => {
            let word = zero_based(word, e.rank(), "--word")?;
            let w = e.root_datum().weyl_from_reduced_word(&word).map_err(|err| usage(format!("--word: {err}")))?;
            Ok((e.initial_seed(&w, &word)?, None))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|err| usage(format!("--file {path}: {err}")))?;
            let v: Value = serde_json::from_str(&text).map_err(|err| usage(format!("--file {path}: {err}")))?;
            let pair: CompatiblePair = serde_json::from_value(json!({ "lambda": v["lambda"], "exchange": v["exchange"] }))
                .map_err(|err| usage(format!("--file {path}: {err}")))?;
            let mut seed = QuantumSeed::from_pair(pair)?;
            if let Some(labels) = v.get("labels").and_then(Value::as_array) {
                let labels: Vec<String> = labels.iter().filter_map(Value::as_str).map(String::from).collect();
                if labels.len() != seed.labels.len() {
                    return Err(usage(format!("--file {path}: expected {} labels", seed.labels.len())));
                }
                seed.labels = labels;
            }
            let path = v.get("path").map(|p| serde_json::from_value::<Vec<usize>>(p.clone())).transpose().map_err(|err| usage(format!("--file {path}: path: {err}")))?;
            Ok((seed, path))
        }
        _ => Err(usage("one of --word or --file is required")),
    }
}

fn torus_json(t: &TorusElement) -> Value {
    Value::Array(t.terms.iter().map(|(a, c)| json!({ "exponent": a, "coeff": c.to_string() })).collect())
}

fn torus_text(t: &TorusElement) -> String {
    t.terms
        .iter()
        .map(|(a, c)| if c.is_one() { format!("X^[{}]", list(a)) } else { format!("({c})X^[{}]", list(a)) })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn seed_output(e: &Engine, common: &Common, seed: &QuantumSeed, kind: &str, path: &[usize]) -> Run<String> {
    let d = seed.pair.check()?;
    Ok(match common.format {
        Format::Json => {
            let mut v = json!({
                "type": common.ty,
                "labels": seed.labels,
                "lambda": seed.pair.lambda,
                "exchange": seed.pair.exchange,
                "d": d,
                "convention": seed.convention,
                "expressions": seed.expressions.iter().map(torus_json).collect::<Vec<_>>(),
            });
            if kind == "mutate" {
                v["path"] = json!(path);
            }
            if let Some(vars) = &seed.realizations {
                v["realizations"] = Value::Array(vars.iter().map(|x| e.cell_to_json(x)).collect());
            }
            document(kind, v)
        }
        Format::Text => {
            let mut out = String::new();
            if kind == "mutate" {
                out.push_str(&format!("path: {}\n", list(path)));
            }
            out.push_str(&format!("d: {}\nconvention: {}\nlambda:\n", list(&d), seed.convention));
            for row in &seed.pair.lambda {
                out.push_str(&format!("  {}\n", row.iter().map(|x| format!("{x:>3}")).collect::<String>()));
            }
            out.push_str("exchange:\n");
            for row in &seed.pair.exchange {
                out.push_str(&format!("  {}\n", row.iter().map(|x| format!("{x:>3}")).collect::<String>()));
            }
            out.push_str("variables:\n");
            for (k, (label, expr)) in seed.labels.iter().zip(&seed.expressions).enumerate() {
                out.push_str(&format!("  {} {label} = {}\n", k + 1, torus_text(expr)));
            }
            out
        }
    })
}

fn mutate(common: &Common, args: &SeedArgs, path: Option<Vec<usize>>) -> Run<String> {
    let e = engine(common, qcell_core::engine::DEFAULT_HEIGHT_CAP)?;
    let (seed, file_path) = load_seed(&e, args)?;
    let path = path.or(file_path).ok_or_else(|| usage("--path is required unless the seed file has one"))?;
    let m = seed.pair.exchangeable();
    let steps: Vec<usize> = path
        .iter()
        .map(|&k| if (1..=m).contains(&k) { Ok(k - 1) } else { Err(usage(format!("--path: index {k} out of range 1..={m}"))) })
        .collect::<Run<_>>()?;
    let out = e.mutate_path(&seed, &steps)?;
    seed_output(&e, common, &out, "mutate", &path)
}

fn seed_verb(common: &Common, args: &SeedArgs) -> Run<String> {
    let e = engine(common, qcell_core::engine::DEFAULT_HEIGHT_CAP)?;
    let (seed, _) = load_seed(&e, args)?;
    seed_output(&e, common, &seed, "seed", &[])
}

// ---------------------------------------------------------------------------
// verify

/// Commands whose output must be byte-identical across runs.
const DETERMINISM_PROBES: [&[&str]; 4] = [
    &["qcell", "basis", "--type", "A2", "--word", "1,2,1", "--height", "3", "--format", "json"],
    &["qcell", "twist", "--type", "A2", "--element", "f1*f2", "--lambda", "1,0", "--format", "json"],
    &["qcell", "mutate", "--type", "A2", "--word", "1,2,1", "--path", "1", "--format", "json"],
    &["qcell", "pair", "--type", "B2", "--x", "f1*f2*f2", "--y", "f2*f1*f2"],
];

fn cli_checks() -> Vec<CheckResult> {
    let outcome = (|| {
        for probe in DETERMINISM_PROBES {
            let a = run(probe.iter().copied());
            let b = run(probe.iter().copied());
            if a.code != 0 {
                return Err(format!("{} exited with {}: {}", probe[1..].join(" "), a.code, a.stderr.trim()));
            }
            if a != b {
                return Err(format!("{} printed different output on a second run", probe[1..].join(" ")));
            }
        }
        Ok(format!("{} commands", DETERMINISM_PROBES.len()))
    })();
    vec![CheckResult { module: "cli", property: "identical invocations give identical output", outcome }]
}

fn verify(all: bool, module: Option<String>, seed: u64, format: Format) -> Run<String> {
    let results = match (all, module.as_deref()) {
        (true, _) => {
            let mut r = invariants::run_all(seed);
            r.extend(cli_checks());
            r
        }
        (false, Some("cli")) => cli_checks(),
        (false, Some(m)) => {
            let m = MODULES.iter().find(|x| **x == m).expect("validated by clap");
            invariants::run_module(m, seed).expect("known module")
        }
        (false, None) => return Err(usage("one of --all or --module is required")),
    };
    let failed = results.iter().filter(|r| !r.passed()).count();
    let out = match format {
        Format::Json => document(
            "verify",
            json!({
                "seed": seed,
                "passed": results.len() - failed,
                "failed": failed,
                "results": results.iter().map(|r| json!({
                    "module": r.module,
                    "property": r.property,
                    "holds": r.passed(),
                    "detail": match &r.outcome { Ok(s) | Err(s) => s },
                })).collect::<Vec<_>>(),
            }),
        ),
        Format::Text => {
            let mut out = String::new();
            for r in &results {
                match &r.outcome {
                    Ok(s) => out.push_str(&format!("ok    {}: {} ({s})\n", r.module, r.property)),
                    Err(s) => out.push_str(&format!("FAIL  {}: {}\n      witness: {s}\n", r.module, r.property)),
                }
            }
            out.push_str(&format!("{} passed, {failed} failed\n", results.len() - failed));
            out
        }
    };
    if failed > 0 {
        Err(Failure::Falsified(out))
    } else {
        Ok(out)
    }
}
