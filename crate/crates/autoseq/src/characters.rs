//! Dirichlet characters mod Q: the generator basis of the unit group,
//! enumeration, conductor computation, compilation to base-q automata, and
//! classification of completely multiplicative sequences as
//! character-matching or eventually zero on primes.

use crate::dfao::Dfao;
use crate::multfun::{check_completely_multiplicative, CmCheck, Sequence};
use crate::numtheory::{crt, euler_phi, factorize, gcd, lcm, sieve_primes, Congruence};
use crate::values::UnitValue;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

#[derive(Debug, Clone)]
pub struct Generator {
    /// Residue mod the full modulus Q (lifted from the component by CRT).
    pub residue: u64,
    pub order: u64,
}

#[derive(Debug)]
struct Component {
    /// The prime power p^e exactly dividing Q.
    modulus: u64,
    /// Positions of this component's generators in the flattened basis.
    first_gen: usize,
    gen_count: usize,
    /// Coprime residue mod p^e -> exponents on this component's generators.
    dlog: HashMap<u64, Vec<u64>>,
}

/// Multiplicative group mod Q, decomposed by CRT into cyclic components:
/// one generator for each odd prime power, the pair (-1, 5) for 2^e with
/// e >= 3, and the degenerate 2-power cases. Generators are the smallest
/// choices, so the basis is reproducible.
#[derive(Debug)]
pub struct UnitGroup {
    modulus: u64,
    components: Vec<Component>,
    generators: Vec<Generator>,
}

impl UnitGroup {
    pub fn new(q: u64) -> Arc<UnitGroup> {
        assert!(q >= 1, "modulus must be positive");
        let mut components = Vec::new();
        let mut generators: Vec<Generator> = Vec::new();
        for &(p, e) in factorize(q).factors() {
            let pe = p.pow(e);
            let locals: Vec<(u64, u64)> = if p == 2 {
                match e {
                    1 => Vec::new(),
                    2 => vec![(3, 2)],
                    _ => vec![(pe - 1, 2), (5, 1u64 << (e - 2))],
                }
            } else {
                let phi = euler_phi(pe);
                let g = (2..pe)
                    .find(|&g| {
                        gcd(g, pe) == 1 && crate::numtheory::multiplicative_order(g, pe) == Ok(phi)
                    })
                    .expect("odd prime power group is cyclic");
                vec![(g, phi)]
            };
            // Verify orders and fill the component dlog table by enumeration.
            for &(g, d) in &locals {
                debug_assert_eq!(crate::numtheory::multiplicative_order(g, pe), Ok(d));
            }
            let mut dlog: HashMap<u64, Vec<u64>> = HashMap::new();
            dlog.insert(1 % pe, vec![0; locals.len()]);
            // Enumerate products of generator powers.
            let mut exps = vec![0u64; locals.len()];
            loop {
                let mut x = 1 % pe;
                for (j, &(g, _)) in locals.iter().enumerate() {
                    x = crate::numtheory::mul_mod(x, crate::numtheory::pow_mod(g, exps[j], pe), pe);
                }
                dlog.entry(x).or_insert_with(|| exps.clone());
                // Mixed-radix increment.
                let mut j = locals.len();
                loop {
                    if j == 0 {
                        break;
                    }
                    j -= 1;
                    exps[j] += 1;
                    if exps[j] < locals[j].1 {
                        break;
                    }
                    exps[j] = 0;
                    if j == 0 {
                        j = usize::MAX;
                        break;
                    }
                }
                if j == usize::MAX || locals.is_empty() {
                    break;
                }
            }
            debug_assert_eq!(dlog.len() as u64, euler_phi(pe));
            let first_gen = generators.len();
            for &(g, d) in &locals {
                // Lift the component generator to a residue mod Q that is 1
                // on every other component.
                let residue = if q == pe {
                    g
                } else {
                    crt(&[Congruence::new(g as i64, pe), Congruence::new(1, q / pe)])
                        .expect("coprime moduli")
                        .residue
                };
                generators.push(Generator { residue, order: d });
            }
            components.push(Component {
                modulus: pe,
                first_gen,
                gen_count: locals.len(),
                dlog,
            });
        }
        Arc::new(UnitGroup {
            modulus: q,
            components,
            generators,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn phi(&self) -> u64 {
        euler_phi(self.modulus)
    }

    /// lcm of the generator orders (1 for the trivial group).
    pub fn exponent(&self) -> u64 {
        self.generators.iter().fold(1, |acc, g| lcm(acc, g.order))
    }

    /// Exponent vector of n on the generator basis; None when n is not
    /// coprime to the modulus.
    pub fn dlog(&self, n: u64) -> Option<Vec<u64>> {
        let n = n % self.modulus;
        if gcd(n.max(1), self.modulus) != 1 || (n == 0 && self.modulus > 1) {
            return None;
        }
        let mut exps = vec![0u64; self.generators.len()];
        for c in &self.components {
            let local = self.dlog_component(c, n % c.modulus)?;
            exps[c.first_gen..c.first_gen + c.gen_count].copy_from_slice(&local);
        }
        Some(exps)
    }

    fn dlog_component(&self, c: &Component, r: u64) -> Option<Vec<u64>> {
        c.dlog.get(&r).cloned()
    }
}

/// A Dirichlet character mod Q as an exponent vector on the group basis:
/// chi(g_j) = e^(2 pi i e_j / d_j), extended by zero off the coprime
/// residues.
#[derive(Debug)]
pub struct DirichletCharacter {
    group: Arc<UnitGroup>,
    exponents: Vec<u64>,
    conductor: OnceLock<u64>,
}

impl Clone for DirichletCharacter {
    fn clone(&self) -> Self {
        let cache = OnceLock::new();
        if let Some(&c) = self.conductor.get() {
            let _ = cache.set(c);
        }
        DirichletCharacter {
            group: Arc::clone(&self.group),
            exponents: self.exponents.clone(),
            conductor: cache,
        }
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exps: Vec<String> = self.exponents.iter().map(u64::to_string).collect();
        write!(f, "char Q={} e=[{}]", self.modulus(), exps.join(","))
    }
}

impl DirichletCharacter {
    pub fn from_exponents(group: Arc<UnitGroup>, exponents: Vec<u64>) -> DirichletCharacter {
        assert_eq!(
            exponents.len(),
            group.generators().len(),
            "one exponent per generator"
        );
        let exponents = exponents
            .iter()
            .zip(group.generators())
            .map(|(&e, g)| e % g.order)
            .collect();
        DirichletCharacter {
            group,
            exponents,
            conductor: OnceLock::new(),
        }
    }

    pub fn principal(group: Arc<UnitGroup>) -> DirichletCharacter {
        let n = group.generators().len();
        Self::from_exponents(group, vec![0; n])
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus()
    }

    pub fn group(&self) -> &Arc<UnitGroup> {
        &self.group
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Position in the lexicographic enumeration order.
    pub fn index(&self) -> u64 {
        let mut idx = 0u64;
        for (e, g) in self.exponents.iter().zip(self.group.generators()) {
            idx = idx * g.order + e;
        }
        idx
    }

    /// Order of the character in the dual group.
    pub fn order(&self) -> u64 {
        self.exponents
            .iter()
            .zip(self.group.generators())
            .fold(1, |acc, (&e, g)| lcm(acc, g.order / gcd(e, g.order)))
    }

    pub fn eval(&self, n: u64) -> UnitValue {
        let Some(logs) = self.group.dlog(n) else {
            return UnitValue::Zero;
        };
        let d = self.group.exponent();
        let mut num: u128 = 0;
        for ((&e, &l), g) in self
            .exponents
            .iter()
            .zip(logs.iter())
            .zip(self.group.generators())
        {
            num += e as u128 * l as u128 * (d / g.order) as u128;
        }
        UnitValue::root((num % d as u128) as i64, d)
    }

    /// Least d dividing Q such that the character is 1 on every n = 1 mod d
    /// coprime to Q; checked over divisors in increasing order.
    pub fn conductor(&self) -> u64 {
        *self.conductor.get_or_init(|| {
            let q = self.modulus();
            for d in factorize(q).divisors() {
                let fixed = (1..=q)
                    .step_by(d.max(1) as usize)
                    .filter(|&n| gcd(n, q) == 1)
                    .all(|n| self.eval(n) == UnitValue::ONE);
                if fixed {
                    return d;
                }
            }
            q
        })
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus()
    }

    /// The primitive character of modulus conductor(chi) inducing chi.
    pub fn primitive_inducing(&self) -> DirichletCharacter {
        let d = self.conductor();
        let group_d = UnitGroup::new(d);
        let q = self.modulus();
        let exps: Vec<u64> = group_d
            .generators()
            .iter()
            .map(|g| {
                // Lift g to a residue coprime to the full modulus.
                let mut lifted = g.residue;
                while gcd(lifted, q) != 1 {
                    lifted += d;
                }
                exponent_from_value(self.eval(lifted), g.order)
            })
            .collect();
        let psi = DirichletCharacter::from_exponents(group_d, exps);
        debug_assert!(psi.is_primitive());
        psi
    }

    /// Induce this character to a multiple of its modulus.
    pub fn induce(&self, group_m: Arc<UnitGroup>) -> DirichletCharacter {
        assert_eq!(
            group_m.modulus() % self.modulus(),
            0,
            "induction target must be a multiple of the modulus"
        );
        let exps: Vec<u64> = group_m
            .generators()
            .iter()
            .map(|g| exponent_from_value(self.eval(g.residue), g.order))
            .collect();
        DirichletCharacter::from_exponents(group_m, exps)
    }
}

/// Solve chi(g) = e^(2 pi i e/d) for e given the value and the generator
/// order d. The value of a character at a generator always has order
/// dividing d.
fn exponent_from_value(value: UnitValue, d: u64) -> u64 {
    match value {
        UnitValue::Zero => panic!("character value at a unit cannot be zero"),
        UnitValue::Root { num, ord } => {
            assert!(d % ord == 0, "value order {ord} does not divide {d}");
            num * (d / ord) % d
        }
    }
}

/// All phi(Q) characters, principal first, lexicographic exponent order.
pub fn enumerate_characters(group: &Arc<UnitGroup>) -> Vec<DirichletCharacter> {
    let orders: Vec<u64> = group.generators().iter().map(|g| g.order).collect();
    let total: u64 = orders.iter().product();
    let mut out = Vec::with_capacity(total as usize);
    let mut exps = vec![0u64; orders.len()];
    loop {
        out.push(DirichletCharacter::from_exponents(
            Arc::clone(group),
            exps.clone(),
        ));
        // Mixed-radix increment, last coordinate fastest.
        let mut j = orders.len();
        while j > 0 {
            j -= 1;
            exps[j] += 1;
            if exps[j] < orders[j] {
                break;
            }
            exps[j] = 0;
            if j == 0 {
                return out;
            }
        }
        if orders.is_empty() {
            return out;
        }
    }
}

/// Compile a character to a base-q automaton: states are pairs
/// (accumulated value mod Q, current digit weight q^j mod Q), so the
/// construction works whether or not q is coprime to Q. The result is
/// minimized.
pub fn compile_character(chi: &DirichletCharacter, q: u32) -> Dfao {
    assert!(q >= 2, "base must be at least 2");
    let modulus = chi.modulus();
    let qm = q as u64 % modulus;
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let start = (0u64, 1 % modulus);
    index.insert(start, 0);
    let mut states = vec![start];
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let (a, w) = states[head];
        head += 1;
        let mut row = Vec::with_capacity(q as usize);
        for d in 0..q as u64 {
            let next = ((a + d * w) % modulus, w * qm % modulus);
            let id = match index.get(&next) {
                Some(&i) => i,
                None => {
                    let fresh = states.len();
                    index.insert(next, fresh);
                    states.push(next);
                    fresh
                }
            };
            row.push(id);
        }
        delta.push(row);
    }
    let out: Vec<UnitValue> = states.iter().map(|&(a, _)| chi.eval(a)).collect();
    Dfao::new(q, 0, delta, out)
        .expect("character automaton is total and padding-invariant")
        .minimize()
}

/// Bounds for the classification search.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyParams {
    /// Base of the claimed automatic structure (reported, not searched).
    pub q: u32,
    /// Verification bound N for multiplicativity and the value match.
    pub n_bound: u64,
    /// Largest modulus tried in the character search.
    pub q_max: u64,
    /// Prime bound P for the zero-set scan.
    pub p_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectionReason {
    /// n1 = n2 mod Q with gcd(n_i, Q) = 1 but different values.
    ValueConflict { n1: u64, n2: u64 },
    /// A zero value on a residue coprime to Q.
    ZeroOnCoprime { n: u64 },
    /// Some coprime residue has no representative n <= N.
    IncompleteCoverage { residue: u64 },
    /// The residue value table is not a homomorphism.
    NotHomomorphism { r1: u64, r2: u64 },
}

impl fmt::Display for RejectionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectionReason::ValueConflict { n1, n2 } => {
                write!(f, "f({n1}) != f({n2}) although {n1} = {n2} mod Q")
            }
            RejectionReason::ZeroOnCoprime { n } => {
                write!(f, "f({n}) = 0 on a residue coprime to Q")
            }
            RejectionReason::IncompleteCoverage { residue } => {
                write!(f, "no n <= N covers residue {residue}")
            }
            RejectionReason::NotHomomorphism { r1, r2 } => {
                write!(f, "value table breaks at {r1} * {r2}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub modulus: u64,
    pub reason: RejectionReason,
}

/// Verdict of the classification. All claims are relative to the bounds in
/// `ClassifyParams`; in particular `EventuallyZero` states vanishing on the
/// primes in (bound, P] only.
#[derive(Debug, Clone)]
pub enum Classification {
    CharacterMatch {
        /// Primitive character inducing the match.
        character: DirichletCharacter,
        conductor: u64,
        /// Modulus on whose coprime residues the match was verified.
        modulus: u64,
    },
    EventuallyZero {
        /// Least B with f(p) = 0 for every prime p in (B, P].
        bound: u64,
    },
    NotClassified {
        /// Zero primes <= Qmax that admissible moduli must be built from.
        support: Vec<u64>,
        rejections: Vec<Rejection>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    NotCompletelyMultiplicative { m: u64, n: u64 },
    UnitValueNotOne(UnitValue),
}

impl fmt::Display for ClassifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifyError::NotCompletelyMultiplicative { m, n } => {
                write!(
                    f,
                    "not completely multiplicative: f({m}*{n}) != f({m})f({n})"
                )
            }
            ClassifyError::UnitValueNotOne(v) => write!(f, "f(1) = {v} instead of 1"),
        }
    }
}

impl std::error::Error for ClassifyError {}

/// Ascending moduli <= q_max whose prime divisors are exactly `support`.
fn candidate_moduli(support: &[u64], q_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    fn rec(support: &[u64], q_max: u64, acc: u64, out: &mut Vec<u64>) {
        match support.split_first() {
            None => out.push(acc),
            Some((&p, rest)) => {
                let mut x = acc.checked_mul(p).filter(|&x| x <= q_max);
                while let Some(v) = x {
                    rec(rest, q_max, v, out);
                    x = v.checked_mul(p).filter(|&x| x <= q_max);
                }
            }
        }
    }
    rec(support, q_max, 1, &mut out);
    out.sort_unstable();
    out
}

/// Decide whether the sequence matches a Dirichlet character on coprime
/// residues or has eventually-zero prime values, at desk scale.
///
/// The eventually-zero branch is tested first (it is cheap and the branches
/// overlap only trivially); the character search then iterates moduli with
/// prime support equal to the zero primes, ascending, and returns the
/// primitive inducing character of the first match.
pub fn classify(
    f: &dyn Sequence,
    params: &ClassifyParams,
) -> Result<Classification, ClassifyError> {
    match check_completely_multiplicative(f, params.n_bound) {
        CmCheck::Pass => {}
        CmCheck::UnitFailure(v) => return Err(ClassifyError::UnitValueNotOne(v)),
        CmCheck::CounterExample { m, n } => {
            return Err(ClassifyError::NotCompletelyMultiplicative { m, n })
        }
    }
    let primes = sieve_primes(params.p_bound);
    let zero_primes: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| f.value(p).is_zero())
        .collect();

    // Eventually-zero branch: least B with f(p) = 0 on all primes in (B, P].
    let largest_nonzero = primes
        .iter()
        .copied()
        .filter(|&p| !f.value(p).is_zero())
        .max();
    let bound = largest_nonzero.unwrap_or(1).max(1);
    if bound <= params.p_bound / 2 {
        return Ok(Classification::EventuallyZero { bound });
    }

    // Character branch.
    let support: Vec<u64> = zero_primes
        .iter()
        .copied()
        .filter(|&p| p <= params.q_max)
        .collect();
    let mut rejections = Vec::new();
    'candidates: for q_mod in candidate_moduli(&support, params.q_max) {
        let reject = |reason| Rejection {
            modulus: q_mod,
            reason,
        };
        // Does f depend only on n mod Q on coprime n <= N?
        let mut first_n: Vec<Option<(u64, UnitValue)>> = vec![None; q_mod as usize];
        for n in 1..=params.n_bound {
            if gcd(n, q_mod) != 1 {
                continue;
            }
            let r = (n % q_mod) as usize;
            match first_n[r] {
                None => first_n[r] = Some((n, f.value(n))),
                Some((n1, v1)) => {
                    if f.value(n) != v1 {
                        rejections.push(reject(RejectionReason::ValueConflict { n1, n2: n }));
                        continue 'candidates;
                    }
                }
            }
        }
        let mut table: HashMap<u64, UnitValue> = HashMap::new();
        for r in 0..q_mod {
            if gcd(r.max(1), q_mod) == 1 && !(r == 0 && q_mod > 1) {
                match first_n[r as usize] {
                    Some((_, v)) => {
                        if v.is_zero() {
                            let n = first_n[r as usize].unwrap().0;
                            rejections.push(reject(RejectionReason::ZeroOnCoprime { n }));
                            continue 'candidates;
                        }
                        table.insert(r, v);
                    }
                    None => {
                        rejections.push(reject(RejectionReason::IncompleteCoverage { residue: r }));
                        continue 'candidates;
                    }
                }
            }
        }
        // Homomorphism on the full multiplication table of (Z/QZ)*.
        let residues: Vec<u64> = table.keys().copied().collect();
        for &r1 in &residues {
            for &r2 in &residues {
                if r2 < r1 {
                    continue;
                }
                if table[&(r1 * r2 % q_mod)] != table[&r1].mul(table[&r2]) {
                    rejections.push(reject(RejectionReason::NotHomomorphism { r1, r2 }));
                    continue 'candidates;
                }
            }
        }
        // Read off the character from the generator values.
        let group = UnitGroup::new(q_mod);
        let exps: Vec<u64> = group
            .generators()
            .iter()
            .map(|g| exponent_from_value(table[&(g.residue % q_mod)], g.order))
            .collect();
        let matched = DirichletCharacter::from_exponents(Arc::clone(&group), exps);
        for (&r, &v) in &table {
            assert_eq!(
                matched.eval(r),
                v,
                "residue table is a homomorphism but no character matches"
            );
        }
        let conductor = matched.conductor();
        let primitive = matched.primitive_inducing();
        // Full re-verification of the claim on n <= N.
        for n in 1..=params.n_bound {
            if gcd(n, q_mod) == 1 {
                assert_eq!(
                    f.value(n),
                    primitive.eval(n % q_mod),
                    "re-verification failed at n = {n}"
                );
            }
        }
        return Ok(Classification::CharacterMatch {
            character: primitive,
            conductor,
            modulus: q_mod,
        });
    }
    Ok(Classification::NotClassified {
        support,
        rejections,
    })
}
