//! unicoh: command line front end for the exact unipotent/cocycle
//! calculator. Subcommands print either human-readable text or a JSON
//! report with a stable schema; identical invocations (including the
//! seed) produce byte-identical output.
//!
//! Exit codes: 0 success or verified, 1 mathematical negative (an
//! obstruction or a failed sweep), 2 usage or precondition error, 3 a
//! resource cap was exceeded.

mod report;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use report::{
    cochain_table, cocycle_entries, element_labels, pair_brace, strict_pairs, vec_brace,
    ChainLevel, Envelope, LiftResult, MasseyResult, SetsResult, SteinbergResult, SuiteOut,
    VerifyResult,
};
use unicoh_core::cohomology::{
    lift_cocycle, make_cyclic, massey_sum, Character, Cocycle1, FiniteGroup, LiftOutcome,
};
use unicoh_core::galois::{
    find_unipotent_cocycle, stabilize_class, superdiagonal_targets, UnipotentSearch, Variant,
};
use unicoh_core::indexsets::{ConvexSet, Letter, LevelSet, WordSpec};
use unicoh_core::unipotent::{PartialMatrix, Support};
use unicoh_core::verify::{self, SuiteReport};
use unicoh_core::{Error, Modulus};

#[derive(Parser)]
#[command(
    name = "unicoh",
    version,
    about = "Exact calculator for convex index sets, partial unipotent groups, \
             and twisted cocycle lifting over Z/m"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for the randomized sweeps; echoed in every report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Print large tables (witnesses, cup tables, full cocycles) in text mode.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the level set, its index sets, and the filtration chain for a
    /// word or an explicit level set.
    Sets(SetsArgs),
    /// Run a named verification suite and report pass/fail.
    Verify(VerifyArgs),
    /// Inflate a cup-product class until it becomes a coboundary.
    Steinberg(SteinbergArgs),
    /// Search for a unipotent cocycle with prescribed superdiagonal.
    Lift(LiftArgs),
    /// Check the corner identity and the lifting verdict for a cocycle read
    /// from a file.
    Massey(MasseyArgs),
}

#[derive(Args)]
struct SetsArgs {
    /// Word whose level set to use, e.g. yxy (one letter per character).
    #[arg(long)]
    word: Option<String>,
    /// Distinguished letter of the word.
    #[arg(long)]
    letter: Option<String>,
    /// Explicit level set, comma separated, e.g. 1,3.
    #[arg(long = "Z", value_delimiter = ',')]
    z: Option<Vec<u8>>,
    /// Single filtration level to print alongside the chain (with --Z).
    #[arg(long)]
    t: Option<u32>,
    /// Size parameter; index pairs live in 1 <= i <= j <= n+1 (with --Z).
    #[arg(long)]
    n: Option<u8>,
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: filtration, retraction, xi, gradedlie, phi, cocycle, massey.
    suite: String,
    /// Size parameter for the sweep.
    #[arg(long)]
    n: Option<u8>,
    /// Modulus for the sweep; suites with a modulus grid use [m] instead.
    #[arg(long)]
    m: Option<u64>,
    /// Trial count for the randomized part of a suite.
    #[arg(long)]
    trials: Option<u32>,
    /// Coefficient group for the cocycle and massey suites, as cyclic:K.
    #[arg(long)]
    group: Option<String>,
}

#[derive(Args)]
struct SteinbergArgs {
    /// Prime field size.
    #[arg(long)]
    q: u64,
    /// Coefficient modulus.
    #[arg(long)]
    m: u64,
    /// Base point in the prime field, outside {0, 1} and with companion
    /// outside {0, 1}.
    #[arg(long)]
    z: u64,
    /// Base level to start from; must be a multiple of the minimal one.
    #[arg(long)]
    level: Option<u32>,
}

#[derive(Args)]
struct LiftArgs {
    /// Word over the letters x and y.
    #[arg(long)]
    word: String,
    /// Prime field size.
    #[arg(long)]
    q: u64,
    /// Coefficient modulus; gcd(m, n!) = 1 is required.
    #[arg(long)]
    m: u64,
    /// Base point in the prime field.
    #[arg(long)]
    z: u64,
    /// Which companion class rides the other letter.
    #[arg(long, value_enum, default_value_t = VariantArg::Standard)]
    variant: VariantArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Companion 1 - z.
    Standard,
    /// Companion -z.
    Minus,
}

#[derive(Args)]
struct MasseyArgs {
    /// Coefficient group: cyclic:K, a path to a table file, or inline table
    /// JSON {"labels": [...], "table": [[...], ...]}.
    #[arg(long)]
    group: String,
    /// Coefficient modulus.
    #[arg(long)]
    m: u64,
    /// Size parameter; the input cocycle lives on the corner-deleted full
    /// support for this n.
    #[arg(long)]
    n: u8,
    /// JSON file holding the cocycle: {"entries": [[g, i, j, value], ...]}
    /// with optional "corner" and "chi" arrays indexed by group element.
    #[arg(long)]
    input: PathBuf,
    /// Character value on the generator of a cyclic group; the file's
    /// "chi" array wins when both are present.
    #[arg(long)]
    chi: Option<u64>,
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::GroupCap { .. }
            | Error::SearchCap { .. }
            | Error::FieldCap { .. }
            | Error::LevelCap
            | Error::DlogCap { .. }
            | Error::WordTooLong(_) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Write without panicking when the reader has closed the pipe; the verdict
/// still travels through the exit code.
fn print_out(s: &str) {
    use std::io::Write as _;
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            use std::io::Write as _;
            let _ = writeln!(std::io::stderr().lock(), "error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Sets(a) => cmd_sets(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Steinberg(a) => cmd_steinberg(cli, a),
        Command::Lift(a) => cmd_lift(cli, a),
        Command::Massey(a) => cmd_massey(cli, a),
    }
}

fn emit<R: Serialize>(
    cli: &Cli,
    command: &'static str,
    params: serde_json::Value,
    result: &R,
    text: &str,
) {
    match cli.format {
        Format::Json => {
            let env = Envelope { schema: 1, command, seed: cli.seed, params, result };
            let body = serde_json::to_string_pretty(&env).expect("report serializes");
            print_out(&body);
            print_out("\n");
        }
        Format::Text => print_out(text),
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn factorial(n: u8) -> u64 {
    (1..=n as u64).product()
}

// ---------------------------------------------------------------- sets

fn chain_levels(n: u8, chain: &[ConvexSet]) -> Vec<ChainLevel> {
    let full_count = n as usize * (n as usize + 1) / 2;
    let mut prev_len = 0;
    let mut out = Vec::with_capacity(chain.len());
    for (k, set) in chain.iter().enumerate() {
        let pairs = strict_pairs(set);
        out.push(ChainLevel {
            t: k as u32 + 1,
            full: pairs.len() == full_count,
            strict_over_previous: pairs.len() > prev_len,
            pairs,
        });
        prev_len = out.last().expect("just pushed").pairs.len();
    }
    out
}

fn cmd_sets(cli: &Cli, a: &SetsArgs) -> Result<u8, Failure> {
    let result = match (&a.word, &a.z) {
        (Some(_), Some(_)) => {
            return Err(usage("--word and --Z are mutually exclusive"));
        }
        (None, None) => {
            return Err(usage("pass either --word with --letter, or --Z with --n"));
        }
        (Some(word), None) => {
            if a.n.is_some() || a.t.is_some() {
                return Err(usage("--n and --t belong to the --Z form; the word fixes n"));
            }
            let letter =
                a.letter.as_deref().ok_or_else(|| usage("--letter is required with --word"))?;
            let w = WordSpec::parse(word)?;
            let x = Letter::new(letter)?;
            let sets = w.word_sets(&x)?;
            let t_word = w.t_word()?;
            let chain = ConvexSet::filtration_chain(&sets.z)?;
            SetsResult {
                n: w.len(),
                word: Some(word.clone()),
                letter: Some(letter.to_string()),
                z: sets.z.elems(),
                runs: strict_pairs(&sets.runs),
                one_exception: strict_pairs(&sets.one_exception),
                t_word: Some(strict_pairs(&t_word)),
                requested: None,
                chain: chain_levels(w.len(), &chain),
            }
        }
        (None, Some(elems)) => {
            if a.letter.is_some() {
                return Err(usage("--letter belongs to the --word form"));
            }
            let n = a.n.ok_or_else(|| usage("--n is required with --Z"))?;
            let z = LevelSet::new(n, elems)?;
            let requested = match a.t {
                None => None,
                Some(t) => {
                    let set = ConvexSet::t_set(&z, t)?;
                    let prev_len =
                        if t == 1 { 0 } else { ConvexSet::t_set(&z, t - 1)?.strict_len() };
                    let pairs = strict_pairs(&set);
                    Some(ChainLevel {
                        t,
                        full: pairs.len() == n as usize * (n as usize + 1) / 2,
                        strict_over_previous: pairs.len() > prev_len,
                        pairs,
                    })
                }
            };
            let chain = ConvexSet::filtration_chain(&z)?;
            SetsResult {
                n,
                word: None,
                letter: None,
                z: z.elems(),
                runs: strict_pairs(&ConvexSet::t_set(&z, 1)?),
                one_exception: strict_pairs(&ConvexSet::t_set(&z, 2)?),
                t_word: None,
                requested,
                chain: chain_levels(n, &chain),
            }
        }
    };

    let params = match (&a.word, &a.z) {
        (Some(word), _) => json!({ "word": word, "letter": a.letter }),
        (_, Some(elems)) => json!({ "Z": elems, "n": a.n, "t": a.t }),
        _ => unreachable!("validated above"),
    };

    let mut text = String::new();
    let nn = result.n;
    let _ = writeln!(text, "n = {nn}");
    if let (Some(w), Some(x)) = (&result.word, &result.letter) {
        let _ = writeln!(text, "word = {w}, letter = {x}");
    }
    let zs: Vec<String> = result.z.iter().map(|k| k.to_string()).collect();
    let _ = writeln!(text, "Z = {{{}}}", zs.join(", "));
    let _ = writeln!(text, "T(Z,1) = {}", pair_brace(&result.runs));
    let _ = writeln!(text, "T(Z,2) = {}", pair_brace(&result.one_exception));
    if let Some(req) = &result.requested {
        if req.t > 2 {
            let _ = writeln!(text, "T(Z,{}) = {}", req.t, pair_brace(&req.pairs));
        }
    }
    if let Some(tw) = &result.t_word {
        let _ = writeln!(text, "T_w = {}", pair_brace(tw));
    }
    let _ = writeln!(text, "chain:");
    for lvl in &result.chain {
        let mut marks = Vec::new();
        marks.push(if lvl.strict_over_previous { "strict" } else { "no growth" });
        if lvl.full {
            marks.push("full");
        }
        let _ =
            writeln!(text, "  t = {}: {} [{}]", lvl.t, pair_brace(&lvl.pairs), marks.join(", "));
    }

    emit(cli, "sets", params, &result, &text);
    Ok(0)
}

// -------------------------------------------------------------- verify

fn parse_cyclic_order(s: &str) -> Result<u32, Failure> {
    let k = s.strip_prefix("cyclic:").ok_or_else(|| {
        usage("verify takes --group cyclic:K; table groups feed the massey command")
    })?;
    k.parse().map_err(|_| usage(format!("bad cyclic order \"{k}\"")))
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<u8, Failure> {
    let seed = cli.seed;
    let (params, reports): (serde_json::Value, Vec<SuiteReport>) = match a.suite.as_str() {
        "filtration" => {
            let n = a.n.unwrap_or(4);
            let m = a.m.unwrap_or(5);
            let trials = a.trials.unwrap_or(2000);
            let exhaustive = vec![(n.min(2), m)];
            let random: Vec<(u8, u64)> = if n > 2 { vec![(n, m)] } else { Vec::new() };
            (
                json!({ "suite": "filtration", "n": n, "m": m, "trials": trials }),
                vec![
                    verify::chain_strictness(n),
                    verify::commutator_filtration(&exhaustive, &random, trials, seed),
                ],
            )
        }
        "retraction" => {
            let n = a.n.unwrap_or(2);
            let m = a.m.unwrap_or(3);
            (json!({ "suite": "retraction", "n": n, "m": m }), vec![verify::retraction_split(n, m)])
        }
        "xi" => {
            let n = a.n.unwrap_or(3);
            let m = a.m.unwrap_or(5);
            let g = gcd(m, factorial(n));
            if g != 1 {
                return Err(usage(format!(
                    "precondition failed: gcd({n}!, {m}) = {g}, but the superdiagonal \
                     exponential needs gcd(n!, m) = 1"
                )));
            }
            (json!({ "suite": "xi", "n": n, "m": m }), vec![verify::xi_laws(&[(n, m)])])
        }
        "gradedlie" => {
            let n = a.n.unwrap_or(3);
            let ms = a.m.map(|m| vec![m]).unwrap_or_else(|| vec![2, 3, 5]);
            let samples = a.trials.unwrap_or(10);
            (
                json!({ "suite": "gradedlie", "n": n, "ms": ms, "samples": samples }),
                vec![verify::gradedlie_axioms(n, &ms, samples, seed)],
            )
        }
        "phi" => {
            let ms = a.m.map(|m| vec![m]).unwrap_or_else(|| vec![5, 7]);
            for &m in &ms {
                let g = gcd(m, 24);
                if g != 1 {
                    return Err(usage(format!(
                        "precondition failed: the suite sweeps words up to length 4 and \
                         needs gcd(4!, m) = 1, but gcd(24, {m}) = {g}"
                    )));
                }
            }
            let random_words = a.trials.unwrap_or(300);
            (
                json!({
                    "suite": "phi", "ms": ms,
                    "random_words": random_words, "trials_per_word": 5
                }),
                vec![
                    verify::phi_commutator_image(&ms, random_words, seed),
                    verify::equivariance(&ms, 5, seed),
                ],
            )
        }
        "cocycle" => {
            let orders = match &a.group {
                Some(s) => vec![parse_cyclic_order(s)?],
                None => vec![2, 3, 4],
            };
            let ms = a.m.map(|m| vec![m]).unwrap_or_else(|| vec![2, 3]);
            let ns = a.n.map(|n| vec![n]).unwrap_or_else(|| vec![2, 3]);
            (
                json!({ "suite": "cocycle", "orders": orders, "ms": ms, "ns": ns }),
                vec![verify::obstruction_triple(&orders, &ms, &ns), verify::lift_pair()],
            )
        }
        "massey" => {
            let ns = a.n.map(|n| vec![n]).unwrap_or_else(|| vec![2, 3]);
            let orders = match &a.group {
                Some(s) => vec![parse_cyclic_order(s)?],
                None => vec![2, 3, 4],
            };
            let ms = a.m.map(|m| vec![m]).unwrap_or_else(|| vec![3, 5]);
            let trials = a.trials.unwrap_or(200);
            (
                json!({
                    "suite": "massey", "ns": ns, "orders": orders,
                    "ms": ms, "trials": trials
                }),
                vec![verify::massey_identity(&ns, &orders, &ms, trials, seed)],
            )
        }
        other => {
            return Err(usage(format!(
                "unknown suite \"{other}\"; expected one of filtration, retraction, xi, \
                 gradedlie, phi, cocycle, massey"
            )));
        }
    };

    let passed = reports.iter().all(|r| r.passed());
    let result = VerifyResult {
        suite: a.suite.clone(),
        passed,
        reports: reports.iter().map(SuiteOut::from).collect(),
    };

    let mut text = String::new();
    let _ = writeln!(text, "seed = {seed}");
    for r in &result.reports {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(
            text,
            "{}: {verdict} ({} checks over {} configs)",
            r.name, r.checks, r.configs
        );
        for note in &r.notes {
            let _ = writeln!(text, "  {note}");
        }
    }
    let _ = writeln!(text, "suite {}: {}", a.suite, if passed { "PASS" } else { "FAIL" });

    emit(cli, "verify", params, &result, &text);
    Ok(if passed { 0 } else { 1 })
}

// ----------------------------------------------------------- steinberg

fn cmd_steinberg(cli: &Cli, a: &SteinbergArgs) -> Result<u8, Failure> {
    let st = stabilize_class(a.q, a.m, a.z, a.level)?;
    let group = st.cocycle.group().clone();
    let result = SteinbergResult {
        q: a.q,
        m: a.m,
        z: a.z,
        base_level: st.base_level,
        factor: st.factor,
        level: st.level,
        verdict: "coboundary",
        cup_zero: st.cocycle.is_zero(),
        elements: element_labels(&group),
        witness: st.witness.clone(),
        cup: (cli.verbose > 0).then(|| cochain_table(&st.cocycle)),
    };

    let mut text = String::new();
    let _ = writeln!(text, "steinberg: q = {}, m = {}, z = {}", a.q, a.m, a.z);
    let _ = writeln!(
        text,
        "base level {}, inflation factor {}, level {}",
        st.base_level, st.factor, st.level
    );
    let _ = writeln!(text, "verdict: coboundary at level {}", st.level);
    let _ = writeln!(text, "cup cocycle zero: {}", result.cup_zero);
    if result.witness.len() <= 16 || cli.verbose > 0 {
        let _ = writeln!(text, "witness (one row per group element):");
        for (g, row) in result.witness.iter().enumerate() {
            let _ = writeln!(text, "  {}: {}", result.elements[g], vec_brace(row));
        }
    } else {
        let _ = writeln!(text, "witness: {} rows (-v prints them)", result.witness.len());
    }

    let params = json!({ "q": a.q, "m": a.m, "z": a.z, "level": a.level });
    emit(cli, "steinberg", params, &result, &text);
    Ok(0)
}

// ---------------------------------------------------------------- lift

fn cmd_lift(cli: &Cli, a: &LiftArgs) -> Result<u8, Failure> {
    let w = WordSpec::parse(&a.word)?;
    let variant = match a.variant {
        VariantArg::Standard => Variant::Standard,
        VariantArg::Minus => Variant::Minus,
    };
    let variant_name = match a.variant {
        VariantArg::Standard => "standard",
        VariantArg::Minus => "minus",
    };
    let outcome = find_unipotent_cocycle(&w, a.q, a.m, a.z, variant)?;
    let (found, level, cocycle) = match outcome {
        UnipotentSearch::Found { cocycle, level } => (true, level, Some(cocycle)),
        UnipotentSearch::NotFoundWithinCap { last_level } => (false, last_level, None),
    };
    let targets = superdiagonal_targets(&w, a.q, a.m, a.z, variant, Some(level))?;
    let group = targets.chi.group().clone();

    let result = LiftResult {
        word: a.word.clone(),
        q: a.q,
        m: a.m,
        z: a.z,
        variant: variant_name,
        verdict: if found { "lift-found" } else { "obstruction" },
        k: level,
        elements: element_labels(&group),
        chi: targets.chi.values().to_vec(),
        targets: targets.targets.iter().map(|t| t.values().to_vec()).collect(),
        cocycle: cocycle.as_ref().map(|c| report::LiftCocycle {
            support: strict_pairs(c.support().set()),
            entries: cocycle_entries(c),
        }),
    };

    let mut text = String::new();
    let _ = writeln!(
        text,
        "lift: word = {}, q = {}, m = {}, z = {}, variant = {}",
        a.word, a.q, a.m, a.z, variant_name
    );
    if found {
        let _ = writeln!(text, "verdict: lift-found at level {level}");
    } else {
        let _ = writeln!(text, "verdict: obstruction; every level up to {level} obstructed");
    }
    let _ = writeln!(text, "chi = {}", vec_brace(&result.chi));
    let _ = writeln!(text, "superdiagonal targets (one row per position, indexed by element):");
    for (k, row) in result.targets.iter().enumerate() {
        let _ = writeln!(
            text,
            "  position {} ({}): {}",
            k + 1,
            w.letter(k as u8 + 1).as_str(),
            vec_brace(row)
        );
    }
    if let Some(c) = &result.cocycle {
        let _ = writeln!(text, "support: {}", pair_brace(&c.support));
        if c.entries.len() <= 16 || cli.verbose > 0 {
            let _ = writeln!(text, "cocycle entries:");
            for e in &c.entries {
                let cells: Vec<String> = e
                    .entries
                    .iter()
                    .map(|en| format!("({},{})={}", en.i, en.j, en.value))
                    .collect();
                let body = if cells.is_empty() { "identity".to_string() } else { cells.join(" ") };
                let _ = writeln!(text, "  {}: {}", e.element, body);
            }
        } else {
            let _ = writeln!(text, "cocycle: {} elements (-v prints them)", c.entries.len());
        }
    }

    let params = json!({
        "word": a.word, "q": a.q, "m": a.m, "z": a.z, "variant": variant_name
    });
    emit(cli, "lift", params, &result, &text);
    Ok(if found { 0 } else { 1 })
}

// -------------------------------------------------------------- massey

#[derive(Deserialize)]
struct GroupTableFile {
    labels: Vec<String>,
    table: Vec<Vec<u16>>,
}

fn parse_group(s: &str) -> Result<Arc<FiniteGroup>, Failure> {
    if let Some(k) = s.strip_prefix("cyclic:") {
        let order: u32 = k.parse().map_err(|_| usage(format!("bad cyclic order \"{k}\"")))?;
        return Ok(make_cyclic(order)?);
    }
    let text = if s.trim_start().starts_with('{') {
        s.to_string()
    } else {
        std::fs::read_to_string(s)
            .map_err(|e| usage(format!("cannot read group table {s}: {e}")))?
    };
    let file: GroupTableFile =
        serde_json::from_str(&text).map_err(|e| usage(format!("bad group table: {e}")))?;
    let flat: Vec<u16> = file.table.into_iter().flatten().collect();
    Ok(FiniteGroup::from_table(file.labels, flat)?)
}

#[derive(Deserialize)]
struct MasseyInput {
    #[serde(default)]
    #[allow(dead_code)]
    schema: Option<u32>,
    entries: Vec<(u16, u8, u8, u64)>,
    #[serde(default)]
    corner: Option<Vec<u64>>,
    #[serde(default)]
    chi: Option<Vec<u64>>,
}

fn cmd_massey(cli: &Cli, a: &MasseyArgs) -> Result<u8, Failure> {
    let group = parse_group(&a.group)?;
    let o = group.order();
    let m = Modulus::new(a.m)?;
    let n = a.n;

    let raw = std::fs::read_to_string(&a.input)
        .map_err(|e| usage(format!("cannot read {}: {e}", a.input.display())))?;
    let input: MasseyInput =
        serde_json::from_str(&raw).map_err(|e| usage(format!("bad input file: {e}")))?;

    let full = ConvexSet::full(n)?;
    let ubar_pairs: Vec<(u8, u8)> =
        full.strict_pairs().iter().copied().filter(|&p| p != (1, n + 1)).collect();
    let ubar = Support::new(ConvexSet::from_strict(n, &ubar_pairs)?);

    let mut per_element: Vec<Vec<((u8, u8), u64)>> = vec![Vec::new(); o];
    for &(g, i, j, v) in &input.entries {
        let slot = per_element
            .get_mut(g as usize)
            .ok_or_else(|| usage(format!("element index {g} out of range for order {o}")))?;
        slot.push(((i, j), v));
    }
    let values: Vec<PartialMatrix> = per_element
        .iter()
        .map(|entries| PartialMatrix::from_entries(&ubar, m, entries))
        .collect::<Result<_, _>>()?;

    let chi = match (&input.chi, a.chi) {
        (Some(vals), _) => Character::new(&group, m, vals.clone())?,
        (None, Some(c)) => Character::from_generator_value(&group, m, c)?,
        (None, None) => Character::trivial(&group, m),
    };
    let rho = Cocycle1::new(chi.clone(), values)
        .map_err(|e| usage(format!("input cocycle rejected: {e}")))?;

    let corner = input.corner.clone().unwrap_or_else(|| vec![0; o]);
    if corner.len() != o {
        return Err(usage(format!("corner has {} entries, group order is {o}", corner.len())));
    }

    let rep = massey_sum(&rho, &corner)?;
    let lift = lift_cocycle(&rho, &Support::full(n)?)?;
    let (class_zero, lift_entries, verdict) = match &lift {
        LiftOutcome::Lifted(c) => (true, Some(cocycle_entries(c)), "lift exists, class zero"),
        LiftOutcome::Obstructed(_) => (false, None, "no lift, class nonzero"),
    };

    let result = MasseyResult {
        group: a.group.clone(),
        m: a.m,
        n,
        elements: element_labels(&group),
        chi: chi.values().to_vec(),
        corner: corner.clone(),
        identity_holds: rep.identity_holds,
        class_zero,
        verdict,
        cup_sum: cochain_table(&rep.cup_sum),
        corner_coboundary: cochain_table(&rep.corner_coboundary),
        obstruction: cochain_table(&rep.obstruction),
        lift: lift_entries,
    };

    let mut text = String::new();
    let _ = writeln!(text, "massey: group = {}, m = {}, n = {}", a.group, a.m, n);
    let _ = writeln!(text, "chi = {}", vec_brace(&result.chi));
    let _ = writeln!(text, "corner = {}", vec_brace(&result.corner));
    let _ = writeln!(
        text,
        "corner identity (obstruction = cup sum + d corner): {}",
        if rep.identity_holds { "holds" } else { "violated" }
    );
    let _ = writeln!(text, "verdict: {verdict}");
    if o <= 8 || cli.verbose > 0 {
        for (label, table) in [
            ("cup sum", &result.cup_sum),
            ("corner coboundary", &result.corner_coboundary),
            ("obstruction", &result.obstruction),
        ] {
            let _ = writeln!(text, "{label} (rows g, columns h):");
            for (g, row) in table.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|c| vec_brace(c)).collect();
                let _ = writeln!(text, "  {}: {}", result.elements[g], cells.join(" "));
            }
        }
    }
    if let Some(entries) = &result.lift {
        let _ = writeln!(text, "lift entries:");
        for e in entries {
            let cells: Vec<String> =
                e.entries.iter().map(|en| format!("({},{})={}", en.i, en.j, en.value)).collect();
            let body = if cells.is_empty() { "identity".to_string() } else { cells.join(" ") };
            let _ = writeln!(text, "  {}: {}", e.element, body);
        }
    }

    let params = json!({
        "group": a.group, "m": a.m, "n": n,
        "input": a.input.display().to_string(), "chi": a.chi
    });
    emit(cli, "massey", params, &result, &text);
    Ok(if class_zero { 0 } else { 1 })
}
