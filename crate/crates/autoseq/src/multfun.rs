//! Completely multiplicative functions: specification by prime values,
//! evaluation through factorization, multiplicativity checking of arbitrary
//! sequences, built-ins, and black-box empirical kernel inference.

use crate::characters::DirichletCharacter;
use crate::dfao::{Dfao, KernelClass, KernelReport};
use crate::numtheory::{factorize, is_prime, jacobi};
use crate::values::UnitValue;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// Anything that yields an exact sequence value at every index.
pub trait Sequence {
    fn value(&self, n: u64) -> UnitValue;
}

impl Sequence for Dfao {
    fn value(&self, n: u64) -> UnitValue {
        self.evaluate(n)
    }
}

impl Sequence for Vec<UnitValue> {
    fn value(&self, n: u64) -> UnitValue {
        self[n as usize]
    }
}

impl Sequence for CMFunction {
    fn value(&self, n: u64) -> UnitValue {
        self.evaluate(n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CmError {
    Parse { line: usize, msg: String },
}

impl fmt::Display for CmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmError::Parse { line, msg } => write!(f, "cm parse error at line {line}: {msg}"),
        }
    }
}

impl std::error::Error for CmError {}

#[derive(Debug, Clone)]
enum Rule {
    /// Explicit values on primes up to the table bound, a mandatory default
    /// beyond it.
    Table {
        bound: u64,
        values: BTreeMap<u64, UnitValue>,
        default: UnitValue,
    },
    /// -1 on every prime.
    Liouville,
    /// Values of a Dirichlet character.
    Character(DirichletCharacter),
    /// Legendre symbol (n / p).
    Legendre(u64),
}

/// A completely multiplicative function, total on all of N by construction:
/// f(0) = 0 and f(1) = 1 by convention, f(n) = prod f(p)^e over the
/// factorization of n.
#[derive(Debug, Clone)]
pub struct CMFunction {
    rule: Rule,
}

impl CMFunction {
    pub fn from_table(
        bound: u64,
        values: BTreeMap<u64, UnitValue>,
        default: UnitValue,
    ) -> CMFunction {
        for &p in values.keys() {
            assert!(is_prime(p), "table key {p} is not prime");
            assert!(p <= bound, "table key {p} exceeds the bound {bound}");
        }
        CMFunction {
            rule: Rule::Table {
                bound,
                values,
                default,
            },
        }
    }

    pub fn liouville() -> CMFunction {
        CMFunction {
            rule: Rule::Liouville,
        }
    }

    pub fn character(chi: DirichletCharacter) -> CMFunction {
        CMFunction {
            rule: Rule::Character(chi),
        }
    }

    pub fn legendre(p: u64) -> CMFunction {
        assert!(
            is_prime(p) && p % 2 == 1,
            "legendre modulus must be an odd prime"
        );
        CMFunction {
            rule: Rule::Legendre(p),
        }
    }

    /// Value at a prime.
    pub fn prime_value(&self, p: u64) -> UnitValue {
        debug_assert!(is_prime(p));
        match &self.rule {
            Rule::Table {
                values, default, ..
            } => values.get(&p).copied().unwrap_or(*default),
            Rule::Liouville => UnitValue::MINUS_ONE,
            Rule::Character(chi) => chi.eval(p),
            Rule::Legendre(l) => match jacobi(p as i64, *l) {
                0 => UnitValue::Zero,
                1 => UnitValue::ONE,
                _ => UnitValue::MINUS_ONE,
            },
        }
    }

    /// f(n) = prod f(p)^e; f(0) = 0 and f(1) = 1 by convention.
    pub fn evaluate(&self, n: u64) -> UnitValue {
        match n {
            0 => return UnitValue::Zero,
            1 => return UnitValue::ONE,
            _ => {}
        }
        // Built-ins shortcut to closed forms equal to the prime-power product.
        match &self.rule {
            Rule::Character(chi) => return chi.eval(n),
            Rule::Legendre(l) => {
                return match jacobi(n as i64, *l) {
                    0 => UnitValue::Zero,
                    1 => UnitValue::ONE,
                    _ => UnitValue::MINUS_ONE,
                }
            }
            _ => {}
        }
        let mut acc = UnitValue::ONE;
        for &(p, e) in factorize(n).factors() {
            acc = acc.mul(self.prime_value(p).pow(e as u64));
            if acc.is_zero() {
                return UnitValue::Zero;
            }
        }
        acc
    }

    /// Builtin name usable on the command line, when this is a builtin.
    pub fn builtin_name(&self) -> Option<String> {
        match &self.rule {
            Rule::Liouville => Some("liouville".into()),
            Rule::Character(chi) => Some(format!("char:{}:{}", chi.modulus(), chi.index())),
            Rule::Legendre(p) => Some(format!("legendre:{p}")),
            Rule::Table { .. } => None,
        }
    }

    /// Canonical table text, when this is a table-specified function.
    pub fn to_table_text(&self) -> Option<String> {
        let Rule::Table {
            bound,
            values,
            default,
        } = &self.rule
        else {
            return None;
        };
        let mut s = String::from("cm\n");
        s.push_str(&format!("table-bound {bound}\n"));
        s.push_str(&format!("default {default}\n"));
        for (p, v) in values {
            s.push_str(&format!("p {p} {v}\n"));
        }
        Some(s)
    }

    /// Parse the cm table format.
    pub fn parse(text: &str) -> Result<CMFunction, CmError> {
        let mut saw_cm = false;
        let mut bound: Option<u64> = None;
        let mut default: Option<UnitValue> = None;
        let mut values: BTreeMap<u64, UnitValue> = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let mut words = line.split_whitespace();
            let Some(key) = words.next() else { continue };
            let err = |msg: String| CmError::Parse { line: line_no, msg };
            if !saw_cm {
                if key == "cm" && words.next().is_none() {
                    saw_cm = true;
                    continue;
                }
                return Err(err("file must start with a `cm` line".into()));
            }
            match key {
                "table-bound" => {
                    let v = words.next().ok_or_else(|| err("missing bound".into()))?;
                    bound = Some(v.parse().map_err(|_| err(format!("bad bound `{v}`")))?);
                }
                "default" => {
                    let v = words
                        .next()
                        .ok_or_else(|| err("missing default value".into()))?;
                    default =
                        Some(UnitValue::parse(v).map_err(|e| err(format!("bad default: {e}")))?);
                }
                "p" => {
                    let p: u64 = words
                        .next()
                        .ok_or_else(|| err("missing prime".into()))?
                        .parse()
                        .map_err(|_| err("bad prime".into()))?;
                    let tok = words.next().ok_or_else(|| err("missing value".into()))?;
                    let v = UnitValue::parse(tok).map_err(|e| err(format!("bad value: {e}")))?;
                    if !is_prime(p) {
                        return Err(err(format!("{p} is not prime")));
                    }
                    if values.insert(p, v).is_some() {
                        return Err(err(format!("duplicate entry for prime {p}")));
                    }
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
            if let Some(extra) = words.next() {
                return Err(CmError::Parse {
                    line: line_no,
                    msg: format!("trailing token `{extra}`"),
                });
            }
        }
        if !saw_cm {
            return Err(CmError::Parse {
                line: 0,
                msg: "missing `cm` line".into(),
            });
        }
        let bound = bound.ok_or(CmError::Parse {
            line: 0,
            msg: "missing `table-bound`".into(),
        })?;
        let default = default.ok_or(CmError::Parse {
            line: 0,
            msg: "missing `default` rule".into(),
        })?;
        if let Some(&p) = values.keys().find(|&&p| p > bound) {
            return Err(CmError::Parse {
                line: 0,
                msg: format!("prime {p} exceeds table-bound {bound}"),
            });
        }
        Ok(CMFunction::from_table(bound, values, default))
    }
}

/// Outcome of a complete-multiplicativity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CmCheck {
    Pass,
    /// s(1) is not 1.
    UnitFailure(UnitValue),
    /// First pair (lexicographic, 2 <= m <= n) with s(mn) != s(m)s(n).
    CounterExample {
        m: u64,
        n: u64,
    },
}

impl CmCheck {
    pub fn is_pass(&self) -> bool {
        matches!(self, CmCheck::Pass)
    }
}

/// Verify s(mn) = s(m)s(n) for all 2 <= m <= n with mn <= bound, plus
/// s(1) = 1. Values are read once into a table, so `s` is evaluated bound+1
/// times.
pub fn check_completely_multiplicative(s: &dyn Sequence, bound: u64) -> CmCheck {
    assert!(bound >= 4, "bound below 4 checks nothing");
    let vals: Vec<UnitValue> = (0..=bound).map(|n| s.value(n)).collect();
    if vals[1] != UnitValue::ONE {
        return CmCheck::UnitFailure(vals[1]);
    }
    let mut m = 2u64;
    while m * m <= bound {
        for n in m..=bound / m {
            if vals[(m * n) as usize] != vals[m as usize].mul(vals[n as usize]) {
                return CmCheck::CounterExample { m, n };
            }
        }
        m += 1;
    }
    CmCheck::Pass
}

/// Black-box empirical q-kernel: breadth-first closure over kernel
/// coordinates (i, r) up to `depth`, merging two coordinates exactly when
/// their value prefixes of length `prefix_len` agree. Children of the
/// deepest level are checked for membership, so `closed` means the class
/// set is transition-stable; a candidate automaton on the classes is
/// emitted in that case.
pub fn kernel_empirical(f: &dyn Sequence, q: u32, depth: u32, prefix_len: u64) -> KernelReport {
    assert!(depth >= 1, "depth must be at least 1");
    let deepest = (q as u64)
        .checked_pow(depth)
        .expect("q^depth exceeds 64 bits");
    assert!(
        prefix_len >= deepest,
        "prefix length {prefix_len} cannot distinguish depth-{depth} classes (need >= {deepest})"
    );
    let qu = q as u64;
    let prefix_of = |i: u32, r: u64| -> Vec<UnitValue> {
        let qi = qu.checked_pow(i).expect("q^i exceeds 64 bits");
        (0..prefix_len)
            .map(|n| {
                let arg = qi
                    .checked_mul(n)
                    .and_then(|x| x.checked_add(r))
                    .expect("kernel argument exceeds 64 bits");
                f.value(arg)
            })
            .collect()
    };

    let mut class_ids: HashMap<Vec<UnitValue>, usize> = HashMap::new();
    let mut reps: Vec<KernelClass> = Vec::new();
    let mut residues: Vec<u64> = Vec::new();
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut outputs: Vec<UnitValue> = Vec::new();

    let root_prefix = prefix_of(0, 0);
    outputs.push(root_prefix[0]);
    class_ids.insert(root_prefix, 0);
    reps.push(KernelClass {
        depth: 0,
        digits: Vec::new(),
        state: 0,
    });
    residues.push(0);
    delta.push(vec![usize::MAX; q as usize]);
    let mut per_depth_counts = vec![1usize];
    let mut frontier = vec![0usize];

    for level in 0..depth {
        let mut next = Vec::new();
        for &cid in &frontier {
            let parent_digits = reps[cid].digits.clone();
            let parent_r = residues[cid];
            let qi = qu.pow(level);
            for d in 0..q {
                let child_r = parent_r + d as u64 * qi;
                let prefix = prefix_of(level + 1, child_r);
                let next_id = match class_ids.get(&prefix) {
                    Some(&id) => id,
                    None => {
                        let id = reps.len();
                        outputs.push(prefix[0]);
                        class_ids.insert(prefix, id);
                        let mut digits = parent_digits.clone();
                        digits.push(d as u8);
                        reps.push(KernelClass {
                            depth: level + 1,
                            digits,
                            state: id,
                        });
                        residues.push(child_r);
                        delta.push(vec![usize::MAX; q as usize]);
                        next.push(id);
                        id
                    }
                };
                delta[cid][d as usize] = next_id;
            }
        }
        per_depth_counts.push(reps.len());
        frontier = next;
    }

    // Closure check: children of depth-D classes must already be classes.
    let mut closed = true;
    for &cid in &frontier {
        let qi = qu.pow(depth);
        for d in 0..q {
            let child_r = residues[cid] + d as u64 * qi;
            let prefix = prefix_of(depth + 1, child_r);
            match class_ids.get(&prefix) {
                Some(&id) => delta[cid][d as usize] = id,
                None => closed = false,
            }
        }
    }

    let candidate = if closed {
        Some(
            Dfao::new(q, 0, delta, outputs)
                .expect("class automaton is total and padding-invariant by construction"),
        )
    } else {
        None
    };
    KernelReport::Empirical {
        q,
        size_lower_bound: reps.len(),
        closed,
        depth,
        prefix_len,
        classes: reps,
        per_depth_counts,
        candidate,
    }
}

/// Compare a black-box sequence against an automaton on 1 <= n <= bound;
/// returns the first mismatch.
pub fn validate_candidate(f: &dyn Sequence, a: &Dfao, bound: u64) -> Option<u64> {
    (1..=bound).find(|&n| f.value(n) != a.evaluate(n))
}
