//! Command-line surface: load and serialize automata and functions, run
//! kernels, classification, proof demos and sweeps, and emit reports.
//!
//! Exit codes: 0 success or positive verdict, 1 negative verdict
//! (not classified, counterexample, mismatch, search exhausted, not closed),
//! 2 usage or input error, 3 resource limit exceeded. Identical invocations
//! (including the seed) produce byte-identical reports.

use crate::characters::{
    classify, compile_character, enumerate_characters, Classification, ClassifyError,
    ClassifyParams, UnitGroup,
};
use crate::dfao::{digits_to_decimal, Dfao, DfaoError, KernelReport, Reading};
use crate::multfun::{
    check_completely_multiplicative, kernel_empirical, validate_candidate, CMFunction, Sequence,
};
use crate::numtheory::{crt, pow_mod, Congruence};
use crate::proofs::{
    build_uv, construct_ra, find_kernel_collision, hb_search, parity_pipeline, parse_builtin,
    zero_propagation_demo, Certificate, ProofError,
};
use crate::values::UnitValue;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

const USAGE: &str = "\
usage: autoseq <command> [args]

commands:
  eval <dfao|cmspec> <n>                        value of the sequence at n
  kernel <dfao>                                 exact q-kernel
  infer <cmspec> --q Q --depth D --prefix L     empirical kernel + candidate
  minimize <dfao>                               minimal automaton (canonical)
  reverse <dfao>                                convert an msd automaton to lsd
  equiv <dfao> <dfao>                           sequence equivalence
  k0 <dfao>                                     vanishing-witness constant
  compile-char --Q Q --index I --q B            character automaton
  classify <cmspec|dfao> --q Q [--N n] [--Qmax m] [--P p]
  demo key1 <dfao|char:Q:i> [--r r] [--bound N]
  demo key [--q B] [--A a] [--primes p1,p2]
  demo hb [--q B] [--A a] [--primes ..] [--k0 k] [--t t1,t2,t3] [--count c] [--limit L]
  demo key2 [same flags as hb]
  demo zero-prop <cmspec> [--q B] [--A a] [--rA r]
  verify-cert <file>                            re-check a saved certificate
  sweep --q 2 --max-states 3 [--N n] [--Qmax m] [--P p]

global flags: --format text|tabular, --seed N
environment: AUTOSEQ_THREADS caps worker count (0 or unset = automatic)
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Tabular,
}

/// Parsed invocation: subcommand, positionals, flags, output options.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    pub positional: Vec<String>,
    flags: BTreeMap<String, String>,
    pub format: Format,
    pub seed: u64,
}

impl RunConfig {
    fn parse(args: &[String], allowed: &[&str]) -> Result<RunConfig, String> {
        let command = args[0].clone();
        let mut positional = Vec::new();
        let mut flags = BTreeMap::new();
        let mut format = Format::Text;
        let mut seed = 0u64;
        let mut it = args[1..].iter();
        while let Some(arg) = it.next() {
            if let Some(name) = arg.strip_prefix("--") {
                let value = it
                    .next()
                    .ok_or_else(|| format!("flag --{name} needs a value"))?;
                match name {
                    "format" => {
                        format = match value.as_str() {
                            "text" => Format::Text,
                            "tabular" => Format::Tabular,
                            other => return Err(format!("unknown format `{other}`")),
                        };
                    }
                    "seed" => {
                        seed = value.parse().map_err(|_| format!("bad seed `{value}`"))?;
                    }
                    _ if allowed.contains(&name) => {
                        flags.insert(name.to_string(), value.clone());
                    }
                    _ => return Err(format!("unknown flag --{name}")),
                }
            } else {
                positional.push(arg.clone());
            }
        }
        Ok(RunConfig {
            command,
            positional,
            flags,
            format,
            seed,
        })
    }

    fn flag<T: std::str::FromStr>(&self, name: &str, default: T) -> Result<T, String> {
        match self.flags.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| format!("bad value for --{name}: `{v}`")),
        }
    }

    fn flag_required<T: std::str::FromStr>(&self, name: &str) -> Result<T, String> {
        let v = self
            .flags
            .get(name)
            .ok_or_else(|| format!("missing required flag --{name}"))?;
        v.parse()
            .map_err(|_| format!("bad value for --{name}: `{v}`"))
    }

    fn flag_list(&self, name: &str, default: &[u64]) -> Result<Vec<u64>, String> {
        match self.flags.get(name) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|w| {
                    w.trim()
                        .parse()
                        .map_err(|_| format!("bad list for --{name}: `{v}`"))
                })
                .collect(),
        }
    }
}

/// Worker count from AUTOSEQ_THREADS; 0 or unset picks the machine default.
pub fn thread_count() -> usize {
    match std::env::var("AUTOSEQ_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(0) | None => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
        Some(n) => n,
    }
}

/// A sequence source named on the command line.
pub enum SeqInput {
    Dfao(Dfao),
    Cm(CMFunction),
}

impl Sequence for SeqInput {
    fn value(&self, n: u64) -> UnitValue {
        match self {
            SeqInput::Dfao(a) => a.evaluate(n),
            SeqInput::Cm(f) => f.evaluate(n),
        }
    }
}

enum LoadError {
    Io(String),
    Dfao(DfaoError),
    Cm(String),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Io(m) => write!(f, "{m}"),
            LoadError::Dfao(e) => write!(f, "{e}"),
            LoadError::Cm(m) => write!(f, "{m}"),
        }
    }
}

/// Load a builtin name (`liouville`, `char:Q:i`, `legendre:p`), a cm table
/// file, or an automaton file, deciding by name and then content.
fn load_sequence(spec: &str) -> Result<SeqInput, LoadError> {
    if let Some(f) = parse_builtin(spec) {
        return Ok(SeqInput::Cm(f));
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| LoadError::Io(format!("cannot read `{spec}`: {e}")))?;
    load_sequence_text(&text)
}

fn load_sequence_text(text: &str) -> Result<SeqInput, LoadError> {
    let first = text
        .lines()
        .map(|l| match l.find('#') {
            Some(p) => l[..p].trim(),
            None => l.trim(),
        })
        .find(|l| !l.is_empty())
        .unwrap_or("");
    if first == "cm" || first.starts_with("cm ") {
        CMFunction::parse(text)
            .map(SeqInput::Cm)
            .map_err(|e| LoadError::Cm(e.to_string()))
    } else {
        Dfao::parse(text)
            .map(|(a, _)| SeqInput::Dfao(a))
            .map_err(LoadError::Dfao)
    }
}

fn load_dfao(path: &str) -> Result<(Dfao, Reading), LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LoadError::Io(format!("cannot read `{path}`: {e}")))?;
    Dfao::parse(&text).map_err(LoadError::Dfao)
}

/// Dispatch a full command line (already stripped of the program name);
/// reports go to `out`, one-line diagnostics to `err`.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run_inner(args, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            let _ = write!(err, "{USAGE}");
            EXIT_USAGE
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Resource(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_RESOURCE
        }
        Err(Failure::Io(e)) => {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                return EXIT_OK;
            }
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

enum Failure {
    Usage(String),
    Input(String),
    Resource(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Io(e)
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Failure {
        match e {
            LoadError::Dfao(DfaoError::StateLimitExceeded { limit }) => {
                Failure::Resource(format!("reversal exceeded the state limit {limit}"))
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

fn run_inner(args: &[String], out: &mut dyn Write) -> Result<i32, Failure> {
    if args.is_empty() {
        return Err(Failure::Usage("missing command".into()));
    }
    let parse = |allowed: &[&str]| RunConfig::parse(args, allowed).map_err(Failure::Usage);
    match args[0].as_str() {
        "eval" => cmd_eval(&parse(&[])?, out),
        "kernel" => cmd_kernel(&parse(&[])?, out),
        "infer" => cmd_infer(&parse(&["q", "depth", "prefix"])?, out),
        "minimize" => cmd_minimize(&parse(&[])?, out),
        "reverse" => cmd_reverse(&parse(&[])?, out),
        "equiv" => cmd_equiv(&parse(&[])?, out),
        "k0" => cmd_k0(&parse(&[])?, out),
        "compile-char" => cmd_compile_char(&parse(&["Q", "index", "q"])?, out),
        "classify" => cmd_classify(&parse(&["q", "N", "Qmax", "P"])?, out),
        "demo" => cmd_demo(
            &parse(&[
                "q", "A", "primes", "k0", "t", "count", "limit", "r", "rA", "bound",
            ])?,
            out,
        ),
        "verify-cert" => cmd_verify_cert(&parse(&[])?, out),
        "sweep" => cmd_sweep(&parse(&["q", "max-states", "N", "Qmax", "P"])?, out),
        other => Err(Failure::Usage(format!("unknown command `{other}`"))),
    }
}

fn positional<'c>(cfg: &'c RunConfig, idx: usize, what: &str) -> Result<&'c str, Failure> {
    cfg.positional
        .get(idx)
        .map(String::as_str)
        .ok_or_else(|| Failure::Usage(format!("missing {what}")))
}

fn cmd_eval(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let input = positional(cfg, 0, "input (dfao file, cm file or builtin)")?;
    let n: u64 = positional(cfg, 1, "index n")?
        .parse()
        .map_err(|_| Failure::Usage("index n must be a nonnegative integer".into()))?;
    let seq = load_sequence(input)?;
    let v = seq.value(n);
    match cfg.format {
        Format::Text => writeln!(out, "{v}")?,
        Format::Tabular => {
            writeln!(out, "n\tvalue")?;
            writeln!(out, "{n}\t{v}")?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_kernel(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let (a, _) = load_dfao(positional(cfg, 0, "automaton file")?)?;
    let report = a.kernel_exact();
    let KernelReport::Exact {
        q,
        size,
        ref classes,
        depth,
    } = report
    else {
        unreachable!()
    };
    match cfg.format {
        Format::Text => {
            writeln!(out, "kernel report")?;
            writeln!(out, "mode exact")?;
            writeln!(out, "q {q}")?;
            writeln!(out, "size {size}")?;
            writeln!(out, "depth {depth}")?;
            for (idx, c) in classes.iter().enumerate() {
                writeln!(
                    out,
                    "class {idx} i={} r={} state={}",
                    c.depth,
                    c.residue_decimal(q),
                    c.state
                )?;
            }
        }
        Format::Tabular => {
            writeln!(out, "class\ti\tr\tstate")?;
            for (idx, c) in classes.iter().enumerate() {
                writeln!(
                    out,
                    "{idx}\t{}\t{}\t{}",
                    c.depth,
                    c.residue_decimal(q),
                    c.state
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_infer(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let input = positional(cfg, 0, "cm spec")?;
    let q: u32 = cfg.flag("q", 2).map_err(Failure::Usage)?;
    let depth: u32 = cfg.flag("depth", 7).map_err(Failure::Usage)?;
    let prefix: u64 = cfg.flag("prefix", 4096).map_err(Failure::Usage)?;
    if q < 2 || depth < 1 {
        return Err(Failure::Usage("need q >= 2 and depth >= 1".into()));
    }
    let needed = (q as u64).checked_pow(depth);
    if needed.is_none() || prefix < needed.unwrap() {
        return Err(Failure::Usage(format!(
            "prefix must be at least q^depth = {}",
            needed
                .map(|v| v.to_string())
                .unwrap_or_else(|| "overflow".into())
        )));
    }
    let seq = load_sequence(input)?;
    let report = kernel_empirical(&seq, q, depth, prefix);
    let KernelReport::Empirical {
        size_lower_bound,
        closed,
        ref per_depth_counts,
        ref classes,
        ref candidate,
        ..
    } = report
    else {
        unreachable!()
    };
    match cfg.format {
        Format::Text => {
            writeln!(out, "kernel report")?;
            writeln!(out, "mode empirical")?;
            writeln!(out, "input {input}")?;
            writeln!(out, "q {q}")?;
            writeln!(out, "depth {depth}")?;
            writeln!(out, "prefix {prefix}")?;
            writeln!(out, "size-lower-bound {size_lower_bound}")?;
            writeln!(out, "closed {closed}")?;
            let counts: Vec<String> = per_depth_counts.iter().map(usize::to_string).collect();
            writeln!(out, "classes-by-depth {}", counts.join(" "))?;
            for (idx, c) in classes.iter().enumerate() {
                writeln!(out, "class {idx} i={} r={}", c.depth, c.residue_decimal(q))?;
            }
            if let Some(cand) = candidate {
                match validate_candidate(&seq, cand, prefix) {
                    None => writeln!(out, "candidate validated n<={prefix}")?,
                    Some(n) => writeln!(out, "candidate mismatch at n={n}")?,
                }
                writeln!(out, "dfao-begin")?;
                write!(out, "{}", cand.serialize())?;
                writeln!(out, "dfao-end")?;
            }
        }
        Format::Tabular => {
            writeln!(out, "depth\tclasses")?;
            for (d, c) in per_depth_counts.iter().enumerate() {
                writeln!(out, "{d}\t{c}")?;
            }
        }
    }
    Ok(if closed { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_minimize(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let (a, _) = load_dfao(positional(cfg, 0, "automaton file")?)?;
    write!(out, "{}", a.minimize().serialize())?;
    Ok(EXIT_OK)
}

fn cmd_reverse(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let (a, reading) = load_dfao(positional(cfg, 0, "automaton file")?)?;
    if reading != Reading::Msd {
        return Err(Failure::Input(
            "reverse expects an automaton declared `reading msd`".into(),
        ));
    }
    // Conversion already happened on load.
    write!(out, "{}", a.serialize())?;
    Ok(EXIT_OK)
}

fn cmd_equiv(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let (a, _) = load_dfao(positional(cfg, 0, "first automaton")?)?;
    let (b, _) = load_dfao(positional(cfg, 1, "second automaton")?)?;
    if a.q() != b.q() {
        return Err(Failure::Input(format!(
            "bases differ: {} vs {}",
            a.q(),
            b.q()
        )));
    }
    match a.difference_witness(&b) {
        None => {
            match cfg.format {
                Format::Text => writeln!(out, "equivalent")?,
                Format::Tabular => {
                    writeln!(out, "equivalent\twitness")?;
                    writeln!(out, "true\t-")?;
                }
            }
            Ok(EXIT_OK)
        }
        Some(digits) => {
            let n = digits_to_decimal(&digits, a.q());
            match cfg.format {
                Format::Text => writeln!(out, "different at n = {n}")?,
                Format::Tabular => {
                    writeln!(out, "equivalent\twitness")?;
                    writeln!(out, "false\t{n}")?;
                }
            }
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn cmd_k0(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let (a, _) = load_dfao(positional(cfg, 0, "automaton file")?)?;
    let (k0, details) = a.compute_k0();
    match cfg.format {
        Format::Text => {
            writeln!(out, "k0 report")?;
            writeln!(out, "q {}", a.q())?;
            writeln!(out, "k0 {k0}")?;
            for (idx, (c, w)) in details.iter().enumerate() {
                let witness = match w {
                    Some(n) => n.to_string(),
                    None => "vanishes".into(),
                };
                writeln!(
                    out,
                    "class {idx} i={} r={} witness={witness}",
                    c.depth,
                    c.residue_decimal(a.q())
                )?;
            }
        }
        Format::Tabular => {
            writeln!(out, "class\ti\tr\twitness")?;
            for (idx, (c, w)) in details.iter().enumerate() {
                let witness = match w {
                    Some(n) => n.to_string(),
                    None => "-".into(),
                };
                writeln!(
                    out,
                    "{idx}\t{}\t{}\t{witness}",
                    c.depth,
                    c.residue_decimal(a.q())
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_compile_char(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let q_mod: u64 = cfg.flag_required("Q").map_err(Failure::Usage)?;
    let index: u64 = cfg.flag_required("index").map_err(Failure::Usage)?;
    let q: u32 = cfg.flag("q", 2).map_err(Failure::Usage)?;
    if q < 2 || q_mod < 1 {
        return Err(Failure::Usage("need q >= 2 and Q >= 1".into()));
    }
    let group = UnitGroup::new(q_mod);
    let chars = enumerate_characters(&group);
    let chi = chars
        .into_iter()
        .find(|c| c.index() == index)
        .ok_or_else(|| {
            Failure::Input(format!(
                "index {index} out of range: {} characters mod {q_mod}",
                crate::numtheory::euler_phi(q_mod)
            ))
        })?;
    write!(out, "{}", compile_character(&chi, q).serialize())?;
    Ok(EXIT_OK)
}

fn cmd_classify(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let input = positional(cfg, 0, "input (cm spec or dfao)")?;
    let params = ClassifyParams {
        q: cfg.flag("q", 2).map_err(Failure::Usage)?,
        n_bound: cfg.flag("N", 10_000).map_err(Failure::Usage)?,
        q_max: cfg.flag("Qmax", 100).map_err(Failure::Usage)?,
        p_bound: cfg.flag("P", 1000).map_err(Failure::Usage)?,
    };
    if params.n_bound < 4 || params.q_max < 1 || params.p_bound < 4 {
        return Err(Failure::Usage("bounds must be positive (N, P >= 4)".into()));
    }
    let seq = load_sequence(input)?;
    let mut body = String::new();
    let code = match classify(&seq, &params) {
        Err(ClassifyError::NotCompletelyMultiplicative { m, n }) => {
            let _ = writeln!(body, "verdict NotCompletelyMultiplicative");
            let _ = writeln!(body, "counterexample m={m} n={n}");
            EXIT_NEGATIVE
        }
        Err(ClassifyError::UnitValueNotOne(v)) => {
            let _ = writeln!(body, "verdict NotCompletelyMultiplicative");
            let _ = writeln!(body, "unit-value {v}");
            EXIT_NEGATIVE
        }
        Ok(Classification::CharacterMatch {
            character,
            conductor,
            modulus,
        }) => {
            let _ = writeln!(body, "verdict CharacterMatch");
            let _ = writeln!(body, "character {character}");
            let _ = writeln!(body, "conductor {conductor}");
            let _ = writeln!(body, "modulus {modulus}");
            let _ = writeln!(
                body,
                "claim f(n) = chi(n) for all 1 <= n <= {} with gcd(n, {modulus}) = 1",
                params.n_bound
            );
            EXIT_OK
        }
        Ok(Classification::EventuallyZero { bound }) => {
            let _ = writeln!(body, "verdict EventuallyZero");
            let _ = writeln!(body, "bound {bound}");
            let _ = writeln!(
                body,
                "claim f(p) = 0 for all primes p in ({bound}, {}]",
                params.p_bound
            );
            EXIT_OK
        }
        Ok(Classification::NotClassified {
            support,
            rejections,
        }) => {
            let _ = writeln!(body, "verdict NotClassified");
            let support_str: Vec<String> = support.iter().map(u64::to_string).collect();
            let _ = writeln!(body, "support [{}]", support_str.join(","));
            for r in &rejections {
                let _ = writeln!(body, "rejected Q={} {}", r.modulus, r.reason);
            }
            if rejections.is_empty() {
                let _ = writeln!(body, "note no admissible modulus up to Qmax");
            }
            EXIT_NEGATIVE
        }
    };
    match cfg.format {
        Format::Text => {
            writeln!(out, "classify report")?;
            writeln!(out, "input {input}")?;
            writeln!(
                out,
                "params q={} N={} Qmax={} P={} seed={}",
                params.q, params.n_bound, params.q_max, params.p_bound, cfg.seed
            )?;
            write!(out, "{body}")?;
        }
        Format::Tabular => {
            let verdict = body.lines().next().unwrap_or("").replace("verdict ", "");
            writeln!(out, "verdict\tdetail\tq\tN\tQmax\tP")?;
            let detail = body.lines().nth(1).unwrap_or("-").replace('\t', " ");
            writeln!(
                out,
                "{verdict}\t{detail}\t{}\t{}\t{}\t{}",
                params.q, params.n_bound, params.q_max, params.p_bound
            )?;
        }
    }
    Ok(code)
}

fn proof_error_code(e: &ProofError) -> i32 {
    match e {
        ProofError::SearchExhausted { .. } => EXIT_NEGATIVE,
        ProofError::ParityMismatch { .. } => EXIT_NEGATIVE,
        _ => EXIT_USAGE,
    }
}

fn cmd_demo(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let which = positional(cfg, 0, "demo name (key1|key|hb|key2|zero-prop)")?;
    let base: u64 = cfg.flag("q", 2).map_err(Failure::Usage)?;
    let big_a: u32 = cfg.flag("A", 2).map_err(Failure::Usage)?;
    let primes = cfg.flag_list("primes", &[3, 5]).map_err(Failure::Usage)?;
    let k0: u32 = cfg.flag("k0", 2).map_err(Failure::Usage)?;
    let ts = cfg.flag_list("t", &[2, 3, 7]).map_err(Failure::Usage)?;
    let count: usize = cfg.flag("count", 3).map_err(Failure::Usage)?;
    let limit: u64 = cfg.flag("limit", 100_000).map_err(Failure::Usage)?;
    match which {
        "key1" => {
            let input = positional(cfg, 1, "automaton or char builtin")?;
            let r_fixed: u64 = cfg.flag("r", 1).map_err(Failure::Usage)?;
            let bound: u64 = cfg.flag("bound", 4096).map_err(Failure::Usage)?;
            // The collision walk needs an automaton; char builtins are
            // compiled in the requested base.
            let a = if let Some(rest) = input.strip_prefix("char:") {
                let (q_mod, idx) = rest
                    .split_once(':')
                    .ok_or_else(|| Failure::Input(format!("bad character name `{input}`")))?;
                let q_mod: u64 = q_mod
                    .parse()
                    .map_err(|_| Failure::Input(format!("bad character name `{input}`")))?;
                let idx: u64 = idx
                    .parse()
                    .map_err(|_| Failure::Input(format!("bad character name `{input}`")))?;
                let group = UnitGroup::new(q_mod);
                let chi = enumerate_characters(&group)
                    .into_iter()
                    .find(|c| c.index() == idx)
                    .ok_or_else(|| Failure::Input(format!("no character with index {idx}")))?;
                compile_character(&chi, base as u32)
            } else {
                match load_sequence(input)? {
                    SeqInput::Dfao(a) => a,
                    SeqInput::Cm(_) => {
                        return Err(Failure::Input(
                            "key1 needs an automaton (or a char builtin)".into(),
                        ))
                    }
                }
            };
            let cert = find_kernel_collision(&a, r_fixed, bound);
            writeln!(
                out,
                "# kernel collision: f(q^{} n + {}) = f(q^{} n + {}) for all n",
                cert.i1, r_fixed, cert.i2, r_fixed
            )?;
            write!(out, "{}", Certificate::Collision(cert).serialize())?;
            Ok(EXIT_OK)
        }
        "key" => {
            let ra =
                construct_ra(base, big_a, &primes).map_err(|e| Failure::Input(e.to_string()))?;
            writeln!(
                out,
                "# residue construction: r = {} mod {}",
                ra.r.residue, ra.r.modulus
            )?;
            write!(out, "{}", Certificate::Ra(ra).serialize())?;
            Ok(EXIT_OK)
        }
        "hb" => {
            let (_, _, certs, code) =
                run_hb_chain(base, big_a, &primes, k0, &ts, count, limit, out)?;
            for c in certs {
                write!(out, "{}", c.serialize())?;
            }
            Ok(code)
        }
        "key2" => {
            let (hb, common, mut certs, code) =
                run_hb_chain(base, big_a, &primes, k0, &ts, count, limit, out)?;
            if code != EXIT_OK {
                for c in certs {
                    write!(out, "{}", c.serialize())?;
                }
                return Ok(code);
            }
            let hb = hb.expect("chain succeeded");
            let Some(t) = common else {
                for c in certs {
                    write!(out, "{}", c.serialize())?;
                }
                writeln!(
                    out,
                    "# no single candidate root generates modulo every found prime"
                )?;
                return Ok(EXIT_NEGATIVE);
            };
            let qs: Vec<u64> = hb.primes.iter().map(|h| h.prime).collect();
            // Diagnostic: the literal -s q^(2A) residue over the found
            // primes mixes parities in base 2 for k0 >= 2, so the pipeline
            // runs on an explicitly valid residue: the CRT combination of
            // odd powers t^(2j+1) mod q_j.
            let max_q = *qs.iter().max().unwrap();
            let a2 = (1u32..)
                .find(|&a| (base as u128).pow(2 * a) >= max_q as u128)
                .unwrap();
            if let Ok(literal) = construct_ra(base, a2, &qs) {
                let row: Vec<String> = qs
                    .iter()
                    .map(|&q| crate::numtheory::jacobi(literal.r.residue as i64, q).to_string())
                    .collect();
                writeln!(
                    out,
                    "# literal residue {} mod {} has jacobi row [{}] over the found primes",
                    literal.r.residue,
                    literal.r.modulus,
                    row.join(", ")
                )?;
            }
            let congruences: Vec<Congruence> = qs
                .iter()
                .enumerate()
                .map(|(j, &q)| Congruence {
                    residue: pow_mod(t, 2 * j as u64 + 1, q),
                    modulus: q,
                })
                .collect();
            let r_a = crt(&congruences)
                .map_err(|e| Failure::Input(e.to_string()))?
                .residue;
            writeln!(
                out,
                "# parity pipeline with valid rA = {r_a} (odd powers of t = {t})"
            )?;
            match parity_pipeline(t, r_a, &qs) {
                Ok(result) => {
                    certs.push(Certificate::Parity(result));
                    for c in certs {
                        write!(out, "{}", c.serialize())?;
                    }
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    for c in certs {
                        write!(out, "{}", c.serialize())?;
                    }
                    writeln!(out, "# parity pipeline failed: {e}")?;
                    Ok(proof_error_code(&e))
                }
            }
        }
        "zero-prop" => {
            let input = positional(cfg, 1, "cm spec")?;
            let r_a: u64 = cfg.flag("rA", 83).map_err(Failure::Usage)?;
            let f = match load_sequence(input)? {
                SeqInput::Cm(f) => f,
                SeqInput::Dfao(_) => {
                    return Err(Failure::Input("zero-prop needs a cm function".into()))
                }
            };
            match zero_propagation_demo(&f, base, big_a, r_a) {
                Ok(z) => {
                    writeln!(
                        out,
                        "# f({}) = f({})^{} * f({}) with {} = {} mod {}^(2*{})",
                        z.m, z.prime, z.phi, z.r_a, z.m, z.r_a, base, big_a
                    )?;
                    write!(out, "{}", Certificate::ZeroProp(z).serialize())?;
                    Ok(EXIT_OK)
                }
                Err(e @ ProofError::NoUnitPrime { .. }) => {
                    writeln!(out, "# {e}")?;
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(Failure::Input(e.to_string())),
            }
        }
        other => Err(Failure::Usage(format!("unknown demo `{other}`"))),
    }
}

/// Shared first stages of the hb / key2 demos: residue construction, the
/// progression parameters, and the prime search.
#[allow(clippy::too_many_arguments)]
fn run_hb_chain(
    base: u64,
    big_a: u32,
    primes: &[u64],
    k0: u32,
    ts: &[u64],
    count: usize,
    limit: u64,
    out: &mut dyn Write,
) -> Result<
    (
        Option<crate::proofs::HbCertificate>,
        Option<u64>,
        Vec<Certificate>,
        i32,
    ),
    Failure,
> {
    if ts.len() != 3 {
        return Err(Failure::Usage("--t needs exactly three primes".into()));
    }
    let ra = construct_ra(base, big_a, primes).map_err(|e| Failure::Input(e.to_string()))?;
    let uv = build_uv(&ra.r, k0, primes).map_err(|e| Failure::Input(e.to_string()))?;
    writeln!(out, "# progression: primes q = {} mod {}", uv.u, uv.v)?;
    let mut certs = vec![
        Certificate::Ra(ra.clone()),
        Certificate::Uv {
            selection: uv.clone(),
            r: ra.r,
        },
    ];
    match hb_search([ts[0], ts[1], ts[2]], uv.u, uv.v, k0, count, limit) {
        Ok(hb) => {
            let found: Vec<String> = hb.primes.iter().map(|h| h.prime.to_string()).collect();
            writeln!(out, "# found primes: {}", found.join(", "))?;
            let common = hb.common_root();
            if let Some(t) = common {
                writeln!(out, "# common primitive root: {t}")?;
            }
            certs.push(Certificate::Hb(hb.clone()));
            Ok((Some(hb), common, certs, EXIT_OK))
        }
        Err(ProofError::SearchExhausted { needed, found }) => {
            writeln!(
                out,
                "# search exhausted: found {found} of {needed} primes below {limit}"
            )?;
            Ok((None, None, certs, EXIT_NEGATIVE))
        }
        Err(e) => Err(Failure::Input(e.to_string())),
    }
}

fn cmd_verify_cert(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let path = positional(cfg, 0, "certificate file")?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read `{path}`: {e}")))?;
    // A file may carry several certificate blocks; split on headers.
    let mut blocks: Vec<String> = Vec::new();
    for line in text.lines() {
        if line.starts_with("autoseq-cert ") {
            blocks.push(String::new());
        }
        if let Some(last) = blocks.last_mut() {
            last.push_str(line);
            last.push('\n');
        }
    }
    if blocks.is_empty() {
        return Err(Failure::Input("no certificate blocks in file".into()));
    }
    let mut all_ok = true;
    for block in &blocks {
        let cert = Certificate::parse(block).map_err(|e| Failure::Input(e.to_string()))?;
        let failures = cert.verify();
        if failures.is_empty() {
            writeln!(out, "cert {} ok", cert.kind())?;
        } else {
            all_ok = false;
            writeln!(out, "cert {} FAILED", cert.kind())?;
            for f in failures {
                writeln!(out, "  condition: {f}")?;
            }
        }
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_NEGATIVE })
}

/// One sweep survivor: a distinct minimal automaton passing the
/// multiplicativity check, with its classification verdict.
pub struct SweepEntry {
    pub automaton: Dfao,
    pub verdict: &'static str,
    pub detail: String,
    pub not_classified: bool,
}

pub struct SweepOutcome {
    pub raw_count: u64,
    pub valid_count: u64,
    pub distinct_count: usize,
    pub survivors: Vec<SweepEntry>,
}

/// Enumerate every base-q automaton with up to `max_states` states and
/// outputs in {Z, 1, -1} (start state 0), dedup by minimization, keep the
/// ones passing the multiplicativity check, and classify each survivor.
pub fn run_sweep(q: u32, max_states: usize, params: &ClassifyParams) -> SweepOutcome {
    let palette = [UnitValue::Zero, UnitValue::ONE, UnitValue::MINUS_ONE];
    let threads = thread_count().max(1);
    let mut raw_count = 0u64;
    let mut valid_count = 0u64;
    let mut canon: BTreeMap<String, Dfao> = BTreeMap::new();
    for s in 1..=max_states {
        let trans_space = (s as u64).pow((s * q as usize) as u32);
        let out_space = 3u64.pow(s as u32);
        let total = trans_space * out_space;
        raw_count += total;
        let chunk = total.div_ceil(threads as u64).max(1);
        let results: Vec<(u64, Vec<(String, Dfao)>)> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..threads as u64 {
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(total);
                handles.push(scope.spawn(move || {
                    let mut local_valid = 0u64;
                    let mut local: Vec<(String, Dfao)> = Vec::new();
                    for idx in lo..hi {
                        let mut t = idx / out_space;
                        let mut o = idx % out_space;
                        let mut delta = vec![vec![0usize; q as usize]; s];
                        for row in delta.iter_mut() {
                            for slot in row.iter_mut() {
                                *slot = (t % s as u64) as usize;
                                t /= s as u64;
                            }
                        }
                        let mut out = Vec::with_capacity(s);
                        for _ in 0..s {
                            out.push(palette[(o % 3) as usize]);
                            o /= 3;
                        }
                        if let Ok(a) = Dfao::new(q, 0, delta, out) {
                            local_valid += 1;
                            let m = a.minimize();
                            local.push((m.serialize(), m));
                        }
                    }
                    (local_valid, local)
                }));
            }
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for (v, list) in results {
            valid_count += v;
            for (key, m) in list {
                canon.entry(key).or_insert(m);
            }
        }
    }
    let mut survivors = Vec::new();
    for a in canon.values() {
        if !check_completely_multiplicative(a, params.n_bound).is_pass() {
            continue;
        }
        let entry = match classify(a, params) {
            Err(e) => SweepEntry {
                automaton: a.clone(),
                verdict: "Error",
                detail: e.to_string(),
                not_classified: true,
            },
            Ok(Classification::CharacterMatch {
                character,
                conductor,
                modulus,
            }) => SweepEntry {
                automaton: a.clone(),
                verdict: "CharacterMatch",
                detail: format!("{character} conductor={conductor} modulus={modulus}"),
                not_classified: false,
            },
            Ok(Classification::EventuallyZero { bound }) => SweepEntry {
                automaton: a.clone(),
                verdict: "EventuallyZero",
                detail: format!("bound={bound}"),
                not_classified: false,
            },
            Ok(Classification::NotClassified { .. }) => SweepEntry {
                automaton: a.clone(),
                verdict: "NotClassified",
                detail: String::new(),
                not_classified: true,
            },
        };
        survivors.push(entry);
    }
    SweepOutcome {
        raw_count,
        valid_count,
        distinct_count: canon.len(),
        survivors,
    }
}

fn cmd_sweep(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let q: u32 = cfg.flag("q", 2).map_err(Failure::Usage)?;
    let max_states: usize = cfg.flag("max-states", 3).map_err(Failure::Usage)?;
    if q < 2 || max_states == 0 || max_states > 4 {
        return Err(Failure::Usage(
            "need q >= 2 and 1 <= max-states <= 4".into(),
        ));
    }
    let params = ClassifyParams {
        q,
        n_bound: cfg.flag("N", 10_000).map_err(Failure::Usage)?,
        q_max: cfg.flag("Qmax", 100).map_err(Failure::Usage)?,
        p_bound: cfg.flag("P", 1000).map_err(Failure::Usage)?,
    };
    let outcome = run_sweep(q, max_states, &params);
    let bad = outcome
        .survivors
        .iter()
        .filter(|e| e.not_classified)
        .count();
    match cfg.format {
        Format::Text => {
            writeln!(out, "sweep report")?;
            writeln!(
                out,
                "params q={q} max-states={max_states} N={} Qmax={} P={} seed={}",
                params.n_bound, params.q_max, params.p_bound, cfg.seed
            )?;
            writeln!(out, "enumerated {}", outcome.raw_count)?;
            writeln!(out, "well-defined {}", outcome.valid_count)?;
            writeln!(out, "distinct-minimal {}", outcome.distinct_count)?;
            writeln!(out, "multiplicative {}", outcome.survivors.len())?;
            writeln!(out, "not-classified {bad}")?;
            for (idx, e) in outcome.survivors.iter().enumerate() {
                writeln!(
                    out,
                    "survivor {idx} states={} verdict={} {}",
                    e.automaton.state_count(),
                    e.verdict,
                    e.detail
                )?;
            }
        }
        Format::Tabular => {
            writeln!(out, "survivor\tstates\tverdict\tdetail")?;
            for (idx, e) in outcome.survivors.iter().enumerate() {
                writeln!(
                    out,
                    "{idx}\t{}\t{}\t{}",
                    e.automaton.state_count(),
                    e.verdict,
                    e.detail
                )?;
            }
        }
    }
    Ok(if bad == 0 { EXIT_OK } else { EXIT_NEGATIVE })
}
