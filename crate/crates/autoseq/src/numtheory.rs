//! Integer machinery: gcd/CRT (including non-coprime moduli), sieves,
//! factorization, Jacobi symbols, multiplicative orders, primitive roots and
//! discrete logarithms.
//!
//! Overflow contract: operands are at most 64 bits and every intermediate is
//! computed in 128 bits. Operations that could leave 64 bits (CRT moduli
//! products, power towers) use checked arithmetic and panic with a message
//! rather than wrap.

use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumError {
    /// Two congruences disagree modulo a common divisor of their moduli.
    Incompatible { a: Congruence, b: Congruence },
    /// Argument is not coprime to the modulus.
    NotCoprime { a: u64, n: u64 },
    /// Discrete log target lies outside the subgroup generated by the base.
    NotInSubgroup {
        base: u64,
        target: u64,
        modulus: u64,
    },
}

impl fmt::Display for NumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumError::Incompatible { a, b } => {
                write!(f, "incompatible congruences {a} and {b}")
            }
            NumError::NotCoprime { a, n } => write!(f, "{a} is not coprime to {n}"),
            NumError::NotInSubgroup {
                base,
                target,
                modulus,
            } => write!(f, "{target} is not a power of {base} mod {modulus}"),
        }
    }
}

impl std::error::Error for NumError {}

/// A residue class: `residue` mod `modulus`, with `0 <= residue < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Congruence {
    pub residue: u64,
    pub modulus: u64,
}

impl Congruence {
    pub fn new(residue: i64, modulus: u64) -> Congruence {
        assert!(modulus >= 1, "modulus must be positive");
        Congruence {
            residue: (residue as i128).rem_euclid(modulus as i128) as u64,
            modulus,
        }
    }

    pub fn holds_for(&self, n: u64) -> bool {
        n % self.modulus == self.residue
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b)).checked_mul(b).expect("lcm exceeds 64 bits")
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g = gcd(a, b).
pub fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse of `a` mod `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = egcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

/// Merge two congruences with possibly non-coprime moduli.
fn crt_merge(a: Congruence, b: Congruence) -> Result<Congruence, NumError> {
    let (g, x, _) = egcd(a.modulus as i128, b.modulus as i128);
    let diff = b.residue as i128 - a.residue as i128;
    if diff % g != 0 {
        return Err(NumError::Incompatible { a, b });
    }
    let m2g = b.modulus as i128 / g;
    let combined = (a.modulus / g as u64)
        .checked_mul(b.modulus)
        .expect("crt modulus exceeds 64 bits");
    // a.residue + a.modulus * k with k = (diff/g) * x mod (m2/g).
    let k = ((diff / g) % m2g * (x % m2g)).rem_euclid(m2g);
    let residue = (a.residue as i128 + a.modulus as i128 * k).rem_euclid(combined as i128);
    Ok(Congruence {
        residue: residue as u64,
        modulus: combined,
    })
}

/// Simultaneous solution of a nonempty congruence list modulo the lcm of the
/// moduli; non-coprime moduli are handled by pairwise merging.
pub fn crt(congruences: &[Congruence]) -> Result<Congruence, NumError> {
    assert!(!congruences.is_empty(), "crt needs at least one congruence");
    let mut acc = congruences[0];
    for &c in &congruences[1..] {
        acc = crt_merge(acc, c)?;
    }
    Ok(acc)
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: i64, n: u64) -> i32 {
    assert!(n >= 1 && n % 2 == 1, "jacobi symbol needs odd positive n");
    let mut num = (a as i128).rem_euclid(n as i128) as u64;
    let mut den = n;
    let mut sign = 1i32;
    while num != 0 {
        while num % 2 == 0 {
            num /= 2;
            if den % 8 == 3 || den % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut num, &mut den);
        if num % 4 == 3 && den % 4 == 3 {
            sign = -sign;
        }
        num %= den;
    }
    if den == 1 {
        sign
    } else {
        0
    }
}

/// Deterministic Miller-Rabin, valid for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes up to and including `limit`, ascending.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

/// All primes p <= limit with p congruent to u mod v.
pub fn primes_in_progression(u: u64, v: u64, limit: u64) -> Vec<u64> {
    assert!(u < v, "progression residue must satisfy 0 <= u < v");
    sieve_primes(limit)
        .into_iter()
        .filter(|p| p % v == u)
        .collect()
}

/// Prime factorization with primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn distinct_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Recompose the factored integer.
    pub fn value(&self) -> u64 {
        self.factors.iter().fold(1u64, |acc, &(p, e)| {
            acc.checked_mul(p.checked_pow(e).expect("factor power overflow"))
                .expect("factorization value overflow")
        })
    }

    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
    }

    /// All divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let prev = divs.clone();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                divs.extend(prev.iter().map(|d| d * pk));
            }
        }
        divs.sort_unstable();
        divs
    }
}

fn pollard_rho(n: u64) -> u64 {
    // Brent's cycle variant with a deterministic sequence of offsets.
    for c in 1..64u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!("pollard rho failed to split {n}");
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Complete factorization; trial division below 2^16, rho splitting above.
/// Deterministic for all 64-bit inputs. `factorize(1)` is the empty list.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize needs a positive integer");
    let mut rest = n;
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p < (1 << 16) && p * p <= rest {
        while rest % p == 0 {
            primes.push(p);
            rest /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        if rest < (1u64 << 32) {
            // Fully trial-divided below the threshold, so rest is prime.
            primes.push(rest);
        } else {
            factor_into(rest, &mut primes);
        }
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => factors.push((q, 1)),
        }
    }
    Factorization { factors }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).phi()
}

/// Least e >= 1 with a^e = 1 mod n, computed by stripping prime factors of
/// phi(n) rather than by iteration.
pub fn multiplicative_order(a: u64, n: u64) -> Result<u64, NumError> {
    assert!(n >= 2, "order needs modulus >= 2");
    let a = a % n;
    if gcd(a, n) != 1 {
        return Err(NumError::NotCoprime { a, n });
    }
    let phi = euler_phi(n);
    let mut e = phi;
    for l in factorize(phi).distinct_primes() {
        while e % l == 0 && pow_mod(a, e / l, n) == 1 {
            e /= l;
        }
    }
    Ok(e)
}

/// True when t generates the full multiplicative group mod the prime p,
/// tested via t^((p-1)/l) != 1 for each prime l dividing p-1.
pub fn is_primitive_root(t: u64, p: u64) -> bool {
    debug_assert!(is_prime(p), "is_primitive_root needs a prime modulus");
    let t = t % p;
    assert!(t != 0, "base must be coprime to the prime modulus");
    factorize(p - 1)
        .distinct_primes()
        .all(|l| pow_mod(t, (p - 1) / l, p) != 1)
}

/// Least nonnegative gamma with t^gamma = target mod p, by baby-step
/// giant-step over the subgroup generated by t.
pub fn discrete_log(t: u64, target: u64, p: u64) -> Result<u64, NumError> {
    debug_assert!(is_prime(p), "discrete_log needs a prime modulus");
    let t = t % p;
    let target = target % p;
    if target == 0 {
        return Err(NumError::NotInSubgroup {
            base: t,
            target,
            modulus: p,
        });
    }
    let order = multiplicative_order(t, p)?;
    let m = (order as f64).sqrt() as u64 + 1;
    let mut baby: HashMap<u64, u64> = HashMap::with_capacity(m as usize);
    let mut power = 1u64;
    for j in 0..m {
        baby.entry(power).or_insert(j);
        power = mul_mod(power, t, p);
    }
    // t^(-m) = t^(order - m mod order)
    let giant = pow_mod(t, order - m % order, p);
    let mut cur = target;
    for i in 0..=order / m {
        if let Some(&j) = baby.get(&cur) {
            let gamma = i * m + j;
            if gamma < order || (gamma == 0 && target == 1) {
                return Ok(gamma);
            }
        }
        cur = mul_mod(cur, giant, p);
    }
    Err(NumError::NotInSubgroup {
        base: t,
        target,
        modulus: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Oracle: solve a congruence system by scanning [0, lcm).
    fn crt_scan(congruences: &[Congruence]) -> Option<Congruence> {
        let m = congruences.iter().fold(1u64, |acc, c| lcm(acc, c.modulus));
        (0..m)
            .find(|&n| congruences.iter().all(|c| c.holds_for(n)))
            .map(|residue| Congruence {
                residue,
                modulus: m,
            })
    }

    #[test]
    fn crt_examples() {
        let sys = [
            Congruence::new(2, 3),
            Congruence::new(3, 5),
            Congruence::new(3, 16),
        ];
        let expected = Congruence {
            residue: 83,
            modulus: 240,
        };
        assert_eq!(crt_scan(&sys).unwrap(), expected);
        assert_eq!(crt(&sys).unwrap(), expected);

        let sys = [Congruence::new(1, 4), Congruence::new(3, 6)];
        let expected = Congruence {
            residue: 9,
            modulus: 12,
        };
        assert_eq!(crt_scan(&sys).unwrap(), expected);
        assert_eq!(crt(&sys).unwrap(), expected);

        let conflict = [Congruence::new(0, 2), Congruence::new(1, 2)];
        assert!(crt_scan(&conflict).is_none());
        assert!(matches!(crt(&conflict), Err(NumError::Incompatible { .. })));
    }

    #[test]
    fn crt_matches_scan_on_random_systems() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..400 {
            let len = rng.gen_range(1..=3);
            let congruences: Vec<Congruence> = (0..len)
                .map(|_| {
                    let m = rng.gen_range(1..=30u64);
                    Congruence::new(rng.gen_range(0..m) as i64, m)
                })
                .collect();
            match (crt(&congruences), crt_scan(&congruences)) {
                (Ok(got), Some(want)) => assert_eq!(got, want),
                (Err(NumError::Incompatible { .. }), None) => {}
                (got, want) => panic!("crt mismatch: {got:?} vs {want:?} for {congruences:?}"),
            }
        }
    }

    #[test]
    fn jacobi_examples() {
        // Squares mod 5 are {1, 4}, so (2/5) = -1.
        let squares: Vec<u64> = (1..5u64).map(|x| x * x % 5).collect();
        assert!(!squares.contains(&2));
        assert_eq!(jacobi(2, 5), -1);
        assert_eq!(jacobi(1, 9), 1);
        assert_eq!(jacobi(15, 15), 0);
    }

    #[test]
    fn jacobi_agrees_with_euler_criterion() {
        for p in sieve_primes(500).into_iter().filter(|&p| p % 2 == 1) {
            for a in 0..p {
                let euler = pow_mod(a, (p - 1) / 2, p);
                let want = if euler == 0 {
                    0
                } else if euler == 1 {
                    1
                } else {
                    assert_eq!(euler, p - 1);
                    -1
                };
                assert_eq!(jacobi(a as i64, p), want, "a={a}, p={p}");
            }
        }
    }

    #[test]
    fn jacobi_is_completely_multiplicative_on_top() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..2000 {
            let n = rng.gen_range(0..500u64) * 2 + 1;
            let a = rng.gen_range(-300..300i64);
            let b = rng.gen_range(-300..300i64);
            assert_eq!(jacobi(a * b, n), jacobi(a, n) * jacobi(b, n));
        }
    }

    #[test]
    fn multiplicative_order_examples() {
        // Powers of 2 mod 5: 2, 4, 3, 1.
        let mut x = 1u64;
        let mut seen = Vec::new();
        loop {
            x = x * 2 % 5;
            seen.push(x);
            if x == 1 {
                break;
            }
        }
        assert_eq!(seen, vec![2, 4, 3, 1]);
        assert_eq!(multiplicative_order(2, 5).unwrap(), 4);
        assert_eq!(multiplicative_order(1, 7).unwrap(), 1);
        assert_eq!(multiplicative_order(10, 3).unwrap(), 1);
        assert!(matches!(
            multiplicative_order(6, 9),
            Err(NumError::NotCoprime { .. })
        ));
    }

    #[test]
    fn multiplicative_order_matches_iteration() {
        for n in 2..200u64 {
            for a in 1..n {
                if gcd(a, n) != 1 {
                    continue;
                }
                let mut x = a % n;
                let mut e = 1u64;
                while x != 1 {
                    x = mul_mod(x, a, n);
                    e += 1;
                }
                assert_eq!(multiplicative_order(a, n).unwrap(), e, "a={a} n={n}");
            }
        }
    }

    #[test]
    fn primitive_root_examples() {
        assert!(is_primitive_root(2, 5));
        assert!(!is_primitive_root(4, 5)); // 4^2 = 16 = 1 mod 5
        assert!(is_primitive_root(1, 2));
        for p in sieve_primes(200) {
            for t in 1..p {
                let want = multiplicative_order(t, p.max(2)).map(|o| o == p - 1);
                if p == 2 {
                    assert!(is_primitive_root(t, p));
                } else {
                    assert_eq!(is_primitive_root(t, p), want.unwrap(), "t={t} p={p}");
                }
            }
        }
    }

    #[test]
    fn discrete_log_examples() {
        assert_eq!(pow_mod(2, 3, 5), 3);
        assert_eq!(discrete_log(2, 3, 5).unwrap(), 3);
        assert_eq!(discrete_log(2, 1, 5).unwrap(), 0);
        assert_eq!(pow_mod(3, 2, 7), 2);
        assert_eq!(discrete_log(3, 2, 7).unwrap(), 2);
        // 2 has order 3 mod 7; 3 is not in its subgroup {1, 2, 4}.
        assert!(matches!(
            discrete_log(2, 3, 7),
            Err(NumError::NotInSubgroup { .. })
        ));
        assert!(matches!(
            discrete_log(3, 0, 7),
            Err(NumError::NotInSubgroup { .. })
        ));
    }

    #[test]
    fn discrete_log_brute_force_small_primes() {
        for p in sieve_primes(200).into_iter().filter(|&p| p > 2) {
            let t = (2..p).find(|&t| is_primitive_root(t, p)).unwrap();
            for target in 1..p {
                let gamma = discrete_log(t, target, p).unwrap();
                assert_eq!(pow_mod(t, gamma, p), target);
                assert!(gamma < p - 1 || (gamma == 0));
                // Least exponent: brute force.
                let mut x = 1u64;
                let mut least = 0;
                while x != target {
                    x = mul_mod(x, t, p);
                    least += 1;
                }
                assert_eq!(gamma, least, "p={p} t={t} target={target}");
            }
        }
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(1).factors(), &[]);
        assert_eq!(factorize(240).factors(), &[(2, 4), (3, 1), (5, 1)]);
        // Trial-division oracle for 9991.
        let mut n = 9991u64;
        let mut oracle = Vec::new();
        let mut d = 2;
        while d * d <= n {
            while n % d == 0 {
                oracle.push(d);
                n /= d;
            }
            d += 1;
        }
        if n > 1 {
            oracle.push(n);
        }
        assert_eq!(oracle, vec![97, 103]);
        assert_eq!(factorize(9991).factors(), &[(97, 1), (103, 1)]);
    }

    #[test]
    fn factorize_recomposes_and_lists_primes() {
        for n in 1..20_000u64 {
            let f = factorize(n);
            assert_eq!(f.value(), n);
            for &(p, _) in f.factors() {
                assert!(is_prime(p), "{p} listed for {n}");
            }
            for w in f.factors().windows(2) {
                assert!(w[0].0 < w[1].0);
            }
        }
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..200 {
            let n: u64 = rng.gen_range(1..u64::MAX);
            let f = factorize(n);
            assert_eq!(f.value(), n);
            assert!(f.factors().iter().all(|&(p, _)| is_prime(p)));
        }
    }

    #[test]
    fn progression_examples() {
        assert_eq!(primes_in_progression(3, 4, 30), vec![3, 7, 11, 19, 23]);
        assert_eq!(primes_in_progression(0, 2, 30), vec![2]);
        assert_eq!(primes_in_progression(1, 1_000_000, 100), Vec::<u64>::new());
    }

    #[test]
    fn is_prime_matches_sieve() {
        let primes = sieve_primes(10_000);
        let mut idx = 0;
        for n in 0..=10_000u64 {
            let in_sieve = idx < primes.len() && primes[idx] == n;
            if in_sieve {
                idx += 1;
            }
            assert_eq!(is_prime(n), in_sieve, "n={n}");
        }
    }

    #[test]
    fn divisors_and_phi() {
        assert_eq!(factorize(12).divisors(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(factorize(1).divisors(), vec![1]);
        for n in 1..500u64 {
            let direct = (1..=n).filter(|k| gcd(*k, n) == 1).count() as u64;
            assert_eq!(euler_phi(n), direct, "phi({n})");
        }
    }
}
