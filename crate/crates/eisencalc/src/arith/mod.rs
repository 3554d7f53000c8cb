//! Exact integer, rational and cyclotomic arithmetic, plus the
//! multiplicative number theory shared by all modules: factorization,
//! divisor sums, Möbius and Euler functions, Bernoulli numbers, and the
//! rational value of ζ(k)/π^k at even k.

use num::{BigInt, BigRational, One, Signed, Zero};

pub mod cyclotomic;

pub use cyclotomic::Cyclotomic;

use crate::error::{invalid, Result};

/// Shorthand for a `BigInt` from a machine integer.
pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Shorthand for a `BigRational` from a machine integer.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for the `BigRational` n/d.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// base^e for a rational base and a (possibly negative) integer exponent.
pub fn rat_pow(base: &BigRational, e: i64) -> BigRational {
    if e == 0 {
        return BigRational::one();
    }
    let mut acc = BigRational::one();
    let mut b = if e > 0 { base.clone() } else { base.recip() };
    let mut n = e.unsigned_abs();
    while n > 0 {
        if n & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        n >>= 1;
    }
    acc
}

/// p^e as a rational, e possibly negative.
pub fn prime_power_rat(p: u64, e: i64) -> BigRational {
    rat_pow(&rat(p as i64), e)
}

/// Prime factorization of a nonzero integer, taken of its absolute value.
///
/// Primes are listed in strictly increasing order with positive exponents;
/// the product of the prime powers reconstructs |n|.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    /// Reconstructs |n|.
    pub fn value(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

/// Factorize a nonzero integer by trial division.
pub fn factorize(n: i64) -> Result<Factorization> {
    if n == 0 {
        return Err(invalid("factorize: argument must be nonzero"));
    }
    Ok(factorize_u64(n.unsigned_abs()))
}

pub(crate) fn factorize_u64(mut m: u64) -> Factorization {
    let mut factors = Vec::new();
    let mut p: u64 = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Factorization { factors }
}

/// All positive divisors of n, in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1);
    let f = factorize_u64(n);
    let mut divs = vec![1u64];
    for &(p, e) in f.factors() {
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

/// σ_t(n) = Σ_{d | n} d^t over the positive divisors of n.
pub fn divisor_sigma(t: u32, n: u64) -> BigRational {
    assert!(n >= 1, "divisor_sigma: n must be positive");
    let mut sum = BigInt::zero();
    for d in divisors(n) {
        sum += BigInt::from(d).pow(t);
    }
    BigRational::from_integer(sum)
}

/// The Möbius function.
pub fn moebius(n: u64) -> i32 {
    assert!(n >= 1, "moebius: n must be positive");
    let f = factorize_u64(n);
    if !f.is_squarefree() {
        return 0;
    }
    if f.factors().len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Euler's totient function.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "euler_phi: n must be positive");
    let mut result = n;
    for p in factorize_u64(n).primes() {
        result = result / p * (p - 1);
    }
    result
}

/// The part of n coprime to m (the product of prime powers of n at primes
/// not dividing m).
pub fn prime_to_part(n: u64, m: u64) -> u64 {
    assert!(n >= 1);
    let mut n = n;
    for p in factorize_u64(m).primes() {
        while n % p == 0 {
            n /= p;
        }
    }
    n
}

/// Binomial coefficient C(n, k).
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// The k-th Bernoulli number with the convention B_1 = -1/2, computed from
/// the defining recurrence Σ_{j=0}^{n} C(n+1, j) B_j = 0.
pub fn bernoulli(k: u32) -> BigRational {
    bernoulli_seq(k).pop().unwrap()
}

/// B_0, ..., B_k.
pub fn bernoulli_seq(k: u32) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(k as usize + 1);
    b.push(BigRational::one());
    for n in 1..=k as u64 {
        // B_n = -1/(n+1) * Σ_{j<n} C(n+1, j) B_j
        let mut sum = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            sum += BigRational::from_integer(binomial(n + 1, j as u64)) * bj;
        }
        let bn = -sum / BigRational::from_integer(big(n as i64 + 1));
        b.push(bn);
    }
    b
}

/// ζ(k)/π^k for even k ≥ 2, as an exact rational.
///
/// Uses the classical evaluation ζ(2m) = (-1)^{m+1} B_{2m} (2π)^{2m} / (2·(2m)!),
/// so that ζ(k)/π^k = (-1)^{k/2+1} B_k 2^{k-1} / k!.
pub fn zeta_even_ratio(k: u32) -> Result<BigRational> {
    if k == 0 || k % 2 != 0 {
        return Err(invalid("zeta_even_ratio: k must be an even positive integer"));
    }
    let m = k / 2;
    let sign = if m % 2 == 0 { -1 } else { 1 };
    let mut fact = BigInt::one();
    for i in 1..=k as u64 {
        fact *= big(i as i64);
    }
    let num = bernoulli(k) * rat(sign) * rat_pow(&rat(2), k as i64 - 1);
    Ok(num / BigRational::from_integer(fact))
}

/// The exact rational value of (2πi)^k / (ζ(k) (k-1)!) for even k ≥ 2.
///
/// Both the (2π)^k and the π^k inside ζ(k) cancel, leaving -2k/B_k; the
/// function evaluates the left-hand side via [`zeta_even_ratio`] so the
/// Bernoulli route and the direct quotient can be compared in tests.
pub fn eisenstein_constant(k: u32) -> Result<BigRational> {
    if k == 0 || k % 2 != 0 {
        return Err(invalid("eisenstein_constant: k must be an even positive integer"));
    }
    let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
    let mut fact = BigInt::one();
    for i in 1..k as u64 {
        fact *= big(i as i64);
    }
    // (2πi)^k = (-1)^{k/2} 2^k π^k, and ζ(k) = zeta_even_ratio(k)·π^k.
    let num = rat(sign) * rat_pow(&rat(2), k as i64);
    Ok(num / (zeta_even_ratio(k)? * BigRational::from_integer(fact)))
}

/// p-adic valuation of a nonzero big integer.
pub fn valuation_int(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero(), "valuation of zero is infinite");
    let p = big(p as i64);
    let mut m = n.abs();
    let mut v = 0i64;
    loop {
        let (q, r) = num::Integer::div_rem(&m, &p);
        if r.is_zero() {
            v += 1;
            m = q;
        } else {
            return v;
        }
    }
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(x: &BigRational, p: u64) -> i64 {
    assert!(!x.is_zero(), "valuation of zero is infinite");
    valuation_int(x.numer(), p) - valuation_int(x.denom(), p)
}

/// |x|_p = p^{-v_p(x)} for nonzero rational x.
pub fn abs_p(x: &BigRational, p: u64) -> BigRational {
    prime_power_rat(p, -valuation(x, p))
}

/// The prime-to-p unit u = x·p^{-v_p(x)} reduced modulo p^a, together with
/// the valuation v_p(x). Requires x ≠ 0 and a ≥ 0 with p^a < 2^63.
pub fn unit_mod_pa(x: &BigRational, p: u64, a: u32) -> (i64, u64) {
    let v = valuation(x, p);
    let modulus = p.pow(a).max(1);
    let unit = &rat_pow(&rat(p as i64), -v) * x;
    // unit = A/B with p ∤ A, B; reduce A·B^{-1} mod p^a.
    let m = big(modulus as i64);
    let a_mod = num::Integer::mod_floor(unit.numer(), &m);
    let b_mod = num::Integer::mod_floor(unit.denom(), &m);
    let a_u = to_u64(&a_mod);
    let b_u = to_u64(&b_mod);
    let b_inv = mod_inverse(b_u, modulus).expect("denominator is a unit mod p^a");
    (v, (a_u as u128 * b_inv as u128 % modulus as u128) as u64)
}

fn to_u64(n: &BigInt) -> u64 {
    use num::ToPrimitive;
    n.to_u64().expect("value fits in u64")
}

/// Inverse of x modulo m, if gcd(x, m) = 1.
pub fn mod_inverse(x: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (x as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r.abs() != 1 {
        return None;
    }
    let inv = old_s * old_r.signum();
    Some(inv.rem_euclid(m as i128) as u64)
}

pub use num::integer::{gcd, lcm};
