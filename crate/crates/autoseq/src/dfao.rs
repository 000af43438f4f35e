//! Deterministic finite automata with output over base-q digits.
//!
//! The canonical reading order is least-significant-digit-first, so the
//! residual state reached by the digits of `r` (padded to length `i`)
//! realizes the kernel subsequence `n -> f(q^i n + r)`. Most-significant
//! readings are accepted at the file boundary and converted on load.

use crate::values::UnitValue;
use std::collections::HashMap;
use std::fmt;

/// Default guard for the exponential blowup of reading-order reversal.
pub const DEFAULT_REVERSE_STATE_LIMIT: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DfaoError {
    /// Structural problem: bad sizes, out-of-range targets, empty automaton.
    Invalid(String),
    /// Text format violation at a 1-based line number.
    Parse { line: usize, msg: String },
    /// The generated sequence is not well defined: some digit string and its
    /// zero-padded extension yield different outputs.
    PaddingVariance { state: usize },
    /// Reading-order reversal exceeded the configured state budget.
    StateLimitExceeded { limit: usize },
}

impl fmt::Display for DfaoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DfaoError::Invalid(msg) => write!(f, "invalid automaton: {msg}"),
            DfaoError::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            DfaoError::PaddingVariance { state } => write!(
                f,
                "padding variance at state {state}: appending a zero digit changes the output"
            ),
            DfaoError::StateLimitExceeded { limit } => {
                write!(f, "reversal exceeded the state limit {limit}")
            }
        }
    }
}

impl std::error::Error for DfaoError {}

/// Digit reading order declared by an automaton file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reading {
    Lsd,
    Msd,
}

/// Base-q digits of `n`, least significant first; `0` is the empty string.
pub fn lsd_digits(mut n: u64, q: u32) -> Vec<u8> {
    let mut digits = Vec::new();
    while n > 0 {
        digits.push((n % q as u64) as u8);
        n /= q as u64;
    }
    digits
}

/// Decimal rendering of the integer with the given LSD-first digits. Kernel
/// representatives can exceed 128 bits, so this works digit by digit.
pub fn digits_to_decimal(digits: &[u8], q: u32) -> String {
    let mut dec: Vec<u8> = vec![0]; // little-endian decimal digits
    for &d in digits.iter().rev() {
        let mut carry = d as u32;
        for slot in dec.iter_mut() {
            let v = *slot as u32 * q + carry;
            *slot = (v % 10) as u8;
            carry = v / 10;
        }
        while carry > 0 {
            dec.push((carry % 10) as u8);
            carry /= 10;
        }
    }
    dec.iter().rev().map(|d| (b'0' + d) as char).collect()
}

/// One q-kernel class: the coordinate (depth, digits) stands for the pair
/// (i, r) with `r = sum digits[j] * q^j`, and `state` is the residual state
/// (exact mode) or the class index (empirical mode).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelClass {
    pub depth: u32,
    pub digits: Vec<u8>,
    pub state: usize,
}

impl KernelClass {
    pub fn residue_decimal(&self, q: u32) -> String {
        digits_to_decimal(&self.digits, q)
    }
}

/// The q-kernel of a sequence, exact (residual states of the minimized
/// automaton) or empirical (distinct value prefixes of a black box).
#[derive(Debug, Clone)]
pub enum KernelReport {
    Exact {
        q: u32,
        size: usize,
        classes: Vec<KernelClass>,
        depth: u32,
    },
    Empirical {
        q: u32,
        size_lower_bound: usize,
        closed: bool,
        depth: u32,
        prefix_len: u64,
        classes: Vec<KernelClass>,
        /// Cumulative class count after each fully processed depth 0..=depth.
        per_depth_counts: Vec<usize>,
        /// Present when the closure succeeded: states are the classes.
        candidate: Option<Dfao>,
    },
}

impl KernelReport {
    pub fn size_lower_bound(&self) -> usize {
        match self {
            KernelReport::Exact { size, .. } => *size,
            KernelReport::Empirical {
                size_lower_bound, ..
            } => *size_lower_bound,
        }
    }

    pub fn classes(&self) -> &[KernelClass] {
        match self {
            KernelReport::Exact { classes, .. } => classes,
            KernelReport::Empirical { classes, .. } => classes,
        }
    }
}

/// Deterministic finite automaton with output, reading base-q digits
/// least-significant first. All states are reachable from the start and the
/// zero-padding invariance of the generated sequence is validated at
/// construction, so `evaluate` is well defined on integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfao {
    q: u32,
    start: usize,
    delta: Vec<Vec<usize>>,
    out: Vec<UnitValue>,
}

impl Dfao {
    /// Validating constructor: checks shapes, prunes unreachable states and
    /// rejects padding variance.
    pub fn new(
        q: u32,
        start: usize,
        delta: Vec<Vec<usize>>,
        out: Vec<UnitValue>,
    ) -> Result<Dfao, DfaoError> {
        let dfao = Self::assemble(q, start, delta, out)?;
        dfao.check_padding()?;
        Ok(dfao)
    }

    /// Structural checks and reachability pruning without the padding check.
    /// Used internally where the result is a string machine (reversal
    /// intermediates) or is validated separately.
    fn assemble(
        q: u32,
        start: usize,
        delta: Vec<Vec<usize>>,
        out: Vec<UnitValue>,
    ) -> Result<Dfao, DfaoError> {
        if q < 2 {
            return Err(DfaoError::Invalid(format!("base {q} is below 2")));
        }
        let n = out.len();
        if n == 0 {
            return Err(DfaoError::Invalid("automaton has no states".into()));
        }
        if delta.len() != n {
            return Err(DfaoError::Invalid(format!(
                "{} transition rows for {} states",
                delta.len(),
                n
            )));
        }
        if start >= n {
            return Err(DfaoError::Invalid(format!(
                "start state {start} out of range"
            )));
        }
        for (s, row) in delta.iter().enumerate() {
            if row.len() != q as usize {
                return Err(DfaoError::Invalid(format!(
                    "state {s} has {} transitions, expected {q}",
                    row.len()
                )));
            }
            for (d, &t) in row.iter().enumerate() {
                if t >= n {
                    return Err(DfaoError::Invalid(format!(
                        "transition {s} --{d}--> {t} leaves the state set"
                    )));
                }
            }
        }
        // Prune unreachable states, keeping the relative numbering.
        let mut reachable = vec![false; n];
        let mut stack = vec![start];
        reachable[start] = true;
        while let Some(s) = stack.pop() {
            for &t in &delta[s] {
                if !reachable[t] {
                    reachable[t] = true;
                    stack.push(t);
                }
            }
        }
        if reachable.iter().all(|&r| r) {
            return Ok(Dfao {
                q,
                start,
                delta,
                out,
            });
        }
        let mut remap = vec![usize::MAX; n];
        let mut kept = 0;
        for s in 0..n {
            if reachable[s] {
                remap[s] = kept;
                kept += 1;
            }
        }
        let new_delta: Vec<Vec<usize>> = (0..n)
            .filter(|&s| reachable[s])
            .map(|s| delta[s].iter().map(|&t| remap[t]).collect())
            .collect();
        let new_out: Vec<UnitValue> = (0..n).filter(|&s| reachable[s]).map(|s| out[s]).collect();
        Ok(Dfao {
            q,
            start: remap[start],
            delta: new_delta,
            out: new_out,
        })
    }

    /// Padding invariance on the zero-closure of every (reachable) state:
    /// outputs must stay constant along zero transitions, which is exactly
    /// well-definedness of the generated sequence.
    pub fn check_padding(&self) -> Result<(), DfaoError> {
        for s in 0..self.out.len() {
            let mut seen = vec![false; self.out.len()];
            let mut cur = s;
            while !seen[cur] {
                seen[cur] = true;
                cur = self.delta[cur][0];
                if self.out[cur] != self.out[s] {
                    return Err(DfaoError::PaddingVariance { state: s });
                }
            }
        }
        Ok(())
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn state_count(&self) -> usize {
        self.out.len()
    }

    pub fn output(&self, state: usize) -> UnitValue {
        self.out[state]
    }

    pub fn step(&self, state: usize, digit: u8) -> usize {
        self.delta[state][digit as usize]
    }

    pub fn run_from(&self, mut state: usize, digits: &[u8]) -> usize {
        for &d in digits {
            state = self.delta[state][d as usize];
        }
        state
    }

    /// Value of the sequence at `n`: feed base-q digits least significant
    /// first; `n = 0` is the empty string.
    pub fn evaluate(&self, n: u64) -> UnitValue {
        let mut s = self.start;
        let mut n = n;
        let q = self.q as u64;
        while n > 0 {
            s = self.delta[s][(n % q) as usize];
            n /= q;
        }
        self.out[s]
    }

    pub fn evaluate_digits(&self, digits: &[u8]) -> UnitValue {
        self.out[self.run_from(self.start, digits)]
    }

    /// Moore partition refinement seeded by output values, followed by a
    /// breadth-first renumbering from the start state so that equal minimal
    /// automata serialize identically.
    pub fn minimize(&self) -> Dfao {
        let n = self.out.len();
        let q = self.q as usize;
        // Initial partition by output, classes in first-occurrence order.
        let mut class_of: Vec<usize> = Vec::with_capacity(n);
        let mut first_seen: HashMap<UnitValue, usize> = HashMap::new();
        for s in 0..n {
            let next = first_seen.len();
            class_of.push(*first_seen.entry(self.out[s]).or_insert(next));
        }
        let mut class_count = first_seen.len();
        loop {
            let mut sig_ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next_class = vec![0usize; n];
            for s in 0..n {
                let sig = (
                    class_of[s],
                    self.delta[s]
                        .iter()
                        .map(|&t| class_of[t])
                        .collect::<Vec<_>>(),
                );
                let fresh = sig_ids.len();
                next_class[s] = *sig_ids.entry(sig).or_insert(fresh);
            }
            let new_count = sig_ids.len();
            class_of = next_class;
            if new_count == class_count {
                break;
            }
            class_count = new_count;
        }
        // Quotient automaton on classes.
        let mut rep = vec![usize::MAX; class_count];
        for s in 0..n {
            if rep[class_of[s]] == usize::MAX {
                rep[class_of[s]] = s;
            }
        }
        let q_delta: Vec<Vec<usize>> = (0..class_count)
            .map(|c| (0..q).map(|d| class_of[self.delta[rep[c]][d]]).collect())
            .collect();
        let q_out: Vec<UnitValue> = (0..class_count).map(|c| self.out[rep[c]]).collect();
        let q_start = class_of[self.start];
        // Canonical BFS numbering (digits ascending).
        let mut order = vec![usize::MAX; class_count];
        let mut queue = vec![q_start];
        order[q_start] = 0;
        let mut head = 0;
        while head < queue.len() {
            let c = queue[head];
            head += 1;
            for d in 0..q {
                let t = q_delta[c][d];
                if order[t] == usize::MAX {
                    order[t] = queue.len();
                    queue.push(t);
                }
            }
        }
        debug_assert!(order.iter().all(|&o| o != usize::MAX));
        let mut delta = vec![Vec::new(); class_count];
        let mut out = vec![UnitValue::Zero; class_count];
        for c in 0..class_count {
            delta[order[c]] = q_delta[c].iter().map(|&t| order[t]).collect();
            out[order[c]] = q_out[c];
        }
        Dfao {
            q: self.q,
            start: 0,
            delta,
            out,
        }
    }

    /// Minimal-length digit string on which the two generated sequences
    /// differ, by product-automaton search; `None` means equivalent.
    pub fn difference_witness(&self, other: &Dfao) -> Option<Vec<u8>> {
        assert_eq!(self.q, other.q, "equivalence requires the same base");
        self.pair_difference(self.start, other, other.start)
    }

    fn pair_difference(&self, s0: usize, other: &Dfao, t0: usize) -> Option<Vec<u8>> {
        let q = self.q as usize;
        let mut parents: HashMap<(usize, usize), ((usize, usize), u8)> = HashMap::new();
        let mut queue = vec![(s0, t0)];
        let mut head = 0;
        let reconstruct =
            |mut pair: (usize, usize), parents: &HashMap<(usize, usize), ((usize, usize), u8)>| {
                let mut digits = Vec::new();
                while let Some(&(prev, d)) = parents.get(&pair) {
                    digits.push(d);
                    pair = prev;
                }
                digits.reverse();
                digits
            };
        if self.out[s0] != other.out[t0] {
            return Some(Vec::new());
        }
        while head < queue.len() {
            let (s, t) = queue[head];
            head += 1;
            for d in 0..q {
                let pair = (self.delta[s][d], other.delta[t][d]);
                if let std::collections::hash_map::Entry::Vacant(slot) = parents.entry(pair) {
                    if pair == (s0, t0) {
                        continue;
                    }
                    slot.insert(((s, t), d as u8));
                    if self.out[pair.0] != other.out[pair.1] {
                        return Some(reconstruct(pair, &parents));
                    }
                    queue.push(pair);
                }
            }
        }
        None
    }

    /// True when the generated sequences are identical, decided by
    /// product-automaton reachability rather than sampling.
    pub fn equivalent(&self, other: &Dfao) -> bool {
        self.difference_witness(other).is_none()
    }

    /// Minimal-length digit string on which the residual sequences of two
    /// states of this automaton differ; `None` means identical residuals.
    pub fn states_difference_witness(&self, a: usize, b: usize) -> Option<Vec<u8>> {
        self.pair_difference(a, self, b)
    }

    /// True when the residual sequences of two states of this automaton are
    /// identical.
    pub fn states_equivalent(&self, a: usize, b: usize) -> bool {
        self.states_difference_witness(a, b).is_none()
    }

    /// True when the residual sequence from `from` is identically zero,
    /// i.e. every reachable state outputs zero.
    pub fn zero_test(&self, from: usize) -> bool {
        let mut seen = vec![false; self.out.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(s) = stack.pop() {
            if !self.out[s].is_zero() {
                return false;
            }
            for &t in &self.delta[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        true
    }

    /// True when the residual from `from` vanishes at every n >= 1 (the
    /// value at n = 0 is allowed to be nonzero). Witness searches for k0 use
    /// this rather than `zero_test`: integers n >= 1 are exactly the digit
    /// strings that contain a nonzero digit.
    pub fn vanishes_for_positive(&self, from: usize) -> bool {
        let n = self.out.len();
        // Zero chain from `from`.
        let mut on_chain = vec![false; n];
        let mut cur = from;
        while !on_chain[cur] {
            on_chain[cur] = true;
            cur = self.delta[cur][0];
        }
        // Everything after a first nonzero digit.
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        for s in 0..n {
            if on_chain[s] {
                for d in 1..self.q as usize {
                    let t = self.delta[s][d];
                    if !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        while let Some(s) = stack.pop() {
            if !self.out[s].is_zero() {
                return false;
            }
            for &t in &self.delta[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        true
    }

    /// Kernel closure of a minimized automaton: first coordinate reaching
    /// each state, in breadth-first order from (i=0, r=0).
    fn kernel_closure(&self) -> Vec<KernelClass> {
        let q = self.q as usize;
        let mut first: Vec<Option<KernelClass>> = vec![None; self.out.len()];
        first[self.start] = Some(KernelClass {
            depth: 0,
            digits: Vec::new(),
            state: self.start,
        });
        let mut queue = vec![self.start];
        let mut head = 0;
        while head < queue.len() {
            let s = queue[head];
            head += 1;
            let base = first[s].clone().unwrap();
            for d in 0..q {
                let t = self.delta[s][d];
                if first[t].is_none() {
                    let mut digits = base.digits.clone();
                    digits.push(d as u8);
                    first[t] = Some(KernelClass {
                        depth: base.depth + 1,
                        digits,
                        state: t,
                    });
                    queue.push(t);
                }
            }
        }
        queue
            .into_iter()
            .map(|s| first[s].clone().unwrap())
            .collect()
    }

    /// Exact q-kernel: breadth-first closure over kernel coordinates where
    /// two coordinates merge exactly when their residual states in the
    /// minimized automaton coincide. The size equals the minimized state
    /// count.
    pub fn kernel_exact(&self) -> KernelReport {
        let min = self.minimize();
        let classes = min.kernel_closure();
        let depth = classes.iter().map(|c| c.depth).max().unwrap_or(0);
        KernelReport::Exact {
            q: self.q,
            size: min.state_count(),
            classes,
            depth,
        }
    }

    /// Smallest n >= 1 whose residual value from `from` is nonzero, or None
    /// when the residual vanishes on all n >= 1. Digits are selected most
    /// significant first against feasibility sets, so the returned witness
    /// is the true minimum.
    pub fn least_positive_nonzero(&self, from: usize) -> Option<u64> {
        if self.vanishes_for_positive(from) {
            return None;
        }
        let n = self.out.len();
        let q = self.q as usize;
        // A positive witness in minimal form (final digit nonzero) exists
        // with length at most 2n + 2: a zero run, one nonzero digit, then a
        // simple path, with trailing zeros stripped by padding invariance.
        let max_len = 2 * n + 2;
        let mut s_sets: Vec<Vec<bool>> = Vec::with_capacity(max_len + 1);
        let mut init = vec![false; n];
        init[from] = true;
        s_sets.push(init);
        for j in 1..=max_len {
            let mut cur = vec![false; n];
            for s in 0..n {
                if s_sets[j - 1][s] {
                    for d in 0..q {
                        cur[self.delta[s][d]] = true;
                    }
                }
            }
            s_sets.push(cur);
        }
        for len in 1..=max_len {
            // f[u]: reading the already-chosen suffix digits from u ends in a
            // nonzero-output state.
            let mut f: Vec<bool> = self.out.iter().map(|v| !v.is_zero()).collect();
            let mut digits_rev: Vec<u8> = Vec::with_capacity(len);
            let mut feasible = true;
            for j in (0..len).rev() {
                let lo = if j == len - 1 { 1 } else { 0 };
                let choice = (lo..q).find(|&d| (0..n).any(|u| s_sets[j][u] && f[self.delta[u][d]]));
                match choice {
                    Some(d) => {
                        digits_rev.push(d as u8);
                        f = (0..n).map(|u| f[self.delta[u][d]]).collect();
                    }
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible {
                let digits: Vec<u8> = digits_rev.into_iter().rev().collect();
                debug_assert!(!self.out[self.run_from(from, &digits)].is_zero());
                let mut value: u128 = 0;
                for &d in digits.iter().rev() {
                    value = value * q as u128 + d as u128;
                }
                assert!(value <= u64::MAX as u128, "witness exceeds 64 bits");
                return Some(value as u64);
            }
        }
        unreachable!("witness search exhausted although the residual is not positively vanishing");
    }

    /// The constant k0: least k such that every kernel residual that is not
    /// identically zero on n >= 1 has a nonzero value at some n in [1, k].
    /// Returns k0 together with the per-class least witnesses (None for
    /// vanishing classes).
    pub fn compute_k0(&self) -> (u64, Vec<(KernelClass, Option<u64>)>) {
        let min = self.minimize();
        let classes = min.kernel_closure();
        let details: Vec<(KernelClass, Option<u64>)> = classes
            .into_iter()
            .map(|c| {
                let witness = min.least_positive_nonzero(c.state);
                (c, witness)
            })
            .collect();
        let k0 = details
            .iter()
            .filter_map(|(_, w)| *w)
            .max()
            .unwrap_or(1)
            .max(1);
        (k0, details)
    }

    /// Reinterpret this automaton as reading digits in the opposite order
    /// and return a sequence-equivalent machine in the canonical LSD-first
    /// order, via transition-function composition (the deterministic
    /// construction behind reversal) followed by minimization.
    ///
    /// The result always computes `w -> self(reverse(w))` on digit strings.
    /// It is a well-defined sequence automaton exactly when `self` was
    /// padding-invariant in its declared (reversed) reading; the file loader
    /// checks that separately.
    pub fn reverse_reading(&self, state_limit: usize) -> Result<Dfao, DfaoError> {
        let n = self.out.len();
        let q = self.q as usize;
        let identity: Vec<usize> = (0..n).collect();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(identity.clone(), 0);
        let mut maps = vec![identity];
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut head = 0;
        while head < maps.len() {
            let h = maps[head].clone();
            head += 1;
            let mut row = Vec::with_capacity(q);
            for d in 0..q {
                let composed: Vec<usize> = (0..n).map(|t| h[self.delta[t][d]]).collect();
                let id = match index.get(&composed) {
                    Some(&i) => i,
                    None => {
                        let fresh = maps.len();
                        if fresh >= state_limit {
                            return Err(DfaoError::StateLimitExceeded { limit: state_limit });
                        }
                        index.insert(composed.clone(), fresh);
                        maps.push(composed);
                        fresh
                    }
                };
                row.push(id);
            }
            delta.push(row);
        }
        let out: Vec<UnitValue> = maps.iter().map(|h| self.out[h[self.start]]).collect();
        let raw = Dfao::assemble(self.q, 0, delta, out)?;
        Ok(raw.minimize())
    }

    /// Canonical line-oriented text form.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("q {}\n", self.q));
        s.push_str(&format!("states {}\n", self.out.len()));
        s.push_str(&format!("start {}\n", self.start));
        s.push_str("reading lsd\n");
        for (st, row) in self.delta.iter().enumerate() {
            for (d, t) in row.iter().enumerate() {
                s.push_str(&format!("t {st} {d} {t}\n"));
            }
        }
        for (st, v) in self.out.iter().enumerate() {
            s.push_str(&format!("o {st} {v}\n"));
        }
        s
    }

    /// Load the text form. MSD-declared automata are converted to the
    /// canonical LSD-first reading; the declared order is returned alongside.
    pub fn parse(text: &str) -> Result<(Dfao, Reading), DfaoError> {
        let mut q: Option<u32> = None;
        let mut states: Option<usize> = None;
        let mut start: Option<usize> = None;
        let mut reading: Option<Reading> = None;
        let mut t_lines: Vec<(usize, usize, u8, usize)> = Vec::new();
        let mut o_lines: Vec<(usize, usize, UnitValue)> = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let mut words = line.split_whitespace();
            let Some(key) = words.next() else { continue };
            let err = |msg: String| DfaoError::Parse { line: line_no, msg };
            let mut take = |what: &str| {
                words
                    .next()
                    .map(str::to_string)
                    .ok_or_else(|| DfaoError::Parse {
                        line: line_no,
                        msg: format!("missing {what}"),
                    })
            };
            match key {
                "q" => {
                    let v = take("base")?;
                    q = Some(v.parse().map_err(|_| err(format!("bad base `{v}`")))?);
                }
                "states" => {
                    let v = take("state count")?;
                    states = Some(
                        v.parse()
                            .map_err(|_| err(format!("bad state count `{v}`")))?,
                    );
                }
                "start" => {
                    let v = take("start state")?;
                    start = Some(v.parse().map_err(|_| err(format!("bad start `{v}`")))?);
                }
                "reading" => {
                    reading = Some(match take("reading order")?.as_str() {
                        "lsd" => Reading::Lsd,
                        "msd" => Reading::Msd,
                        other => return Err(err(format!("unknown reading `{other}`"))),
                    });
                }
                "t" => {
                    let s: usize = take("state")?
                        .parse()
                        .map_err(|_| err("bad transition state".into()))?;
                    let d: u8 = take("digit")?
                        .parse()
                        .map_err(|_| err("bad transition digit".into()))?;
                    let to: usize = take("target")?
                        .parse()
                        .map_err(|_| err("bad transition target".into()))?;
                    t_lines.push((line_no, s, d, to));
                }
                "o" => {
                    let s: usize = take("state")?
                        .parse()
                        .map_err(|_| err("bad output state".into()))?;
                    let tok = take("value token")?;
                    let v =
                        UnitValue::parse(&tok).map_err(|e| err(format!("bad value token: {e}")))?;
                    o_lines.push((line_no, s, v));
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
            if let Some(extra) = words.next() {
                return Err(DfaoError::Parse {
                    line: line_no,
                    msg: format!("trailing token `{extra}`"),
                });
            }
        }
        let header = |name: &str| DfaoError::Parse {
            line: 0,
            msg: format!("missing `{name}` header"),
        };
        let q = q.ok_or_else(|| header("q"))?;
        let states = states.ok_or_else(|| header("states"))?;
        let start = start.ok_or_else(|| header("start"))?;
        let reading = reading.ok_or_else(|| header("reading"))?;
        if q < 2 {
            return Err(DfaoError::Parse {
                line: 0,
                msg: format!("base {q} is below 2"),
            });
        }
        if states == 0 {
            return Err(DfaoError::Parse {
                line: 0,
                msg: "state count is zero".into(),
            });
        }
        let mut delta: Vec<Vec<Option<usize>>> = vec![vec![None; q as usize]; states];
        for (line, s, d, to) in t_lines {
            let err = |msg: String| DfaoError::Parse { line, msg };
            if s >= states || to >= states {
                return Err(err(format!("transition {s} --{d}--> {to} out of range")));
            }
            if d as u32 >= q {
                return Err(err(format!("digit {d} out of range for base {q}")));
            }
            if delta[s][d as usize].is_some() {
                return Err(err(format!("duplicate transition for state {s} digit {d}")));
            }
            delta[s][d as usize] = Some(to);
        }
        let mut out: Vec<Option<UnitValue>> = vec![None; states];
        for (line, s, v) in o_lines {
            let err = |msg: String| DfaoError::Parse { line, msg };
            if s >= states {
                return Err(err(format!("output state {s} out of range")));
            }
            if out[s].is_some() {
                return Err(err(format!("duplicate output for state {s}")));
            }
            out[s] = Some(v);
        }
        let mut full_delta = Vec::with_capacity(states);
        for (s, row) in delta.into_iter().enumerate() {
            let mut full_row = Vec::with_capacity(q as usize);
            for (d, slot) in row.into_iter().enumerate() {
                full_row.push(slot.ok_or_else(|| DfaoError::Parse {
                    line: 0,
                    msg: format!("missing transition for state {s} digit {d}"),
                })?);
            }
            full_delta.push(full_row);
        }
        let mut full_out = Vec::with_capacity(states);
        for (s, slot) in out.into_iter().enumerate() {
            full_out.push(slot.ok_or_else(|| DfaoError::Parse {
                line: 0,
                msg: format!("missing output for state {s}"),
            })?);
        }
        match reading {
            Reading::Lsd => {
                let dfao = Dfao::new(q, start, full_delta, full_out)?;
                Ok((dfao, Reading::Lsd))
            }
            Reading::Msd => {
                let raw = Dfao::assemble(q, start, full_delta, full_out)?;
                let converted = raw.reverse_reading(DEFAULT_REVERSE_STATE_LIMIT)?;
                converted.check_padding()?;
                Ok((converted, Reading::Msd))
            }
        }
    }
}
