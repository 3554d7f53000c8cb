//! Dirichlet characters, their local components at each prime, Gauss sums,
//! local ε-factors, and twisted divisor sums.
//!
//! Characters mod u are stored as exponent tables over the unit group
//! (ℤ/u)^×: the value at a residue a is ζ_d^{e(a)} where d is the exact
//! order of the character. All identities (multiplicativity, the local
//! factorization χ = ∏χ_p, the Gauss sum as a product of ε-factors) are
//! checked in exact cyclotomic arithmetic.
//!
//! Conventions, fixed once and used everywhere:
//! - the additive character of ℚ_p is trivial on ℤ_p but not on p^{-1}ℤ_p,
//!   with ψ_p(x) = exp(2πi {x}_p) for the p-adic fractional part {x}_p;
//! - the archimedean additive character is ψ_∞(x) = exp(-2πi x);
//! - Haar measure gives ℤ_p volume 1, so each unit residue coset in the
//!   ε-factor integral carries weight 1.

use std::collections::HashMap;

use num::complex::Complex64;
use num::{BigRational, Zero};

use crate::arith::{
    self, euler_phi, factorize_u64, gcd, lcm, mod_inverse, rat, valuation, Cyclotomic,
};
use crate::error::{invalid, Result};

/// One cyclic component of (ℤ/u)^×: a generator residue and its order.
#[derive(Debug, Clone)]
struct CyclicComponent {
    generator: u64,
    order: u64,
}

/// The unit group (ℤ/u)^× as a product of cyclic components, with discrete
/// logarithm tables.
#[derive(Debug, Clone)]
struct UnitGroup {
    modulus: u64,
    components: Vec<CyclicComponent>,
    /// residue coprime to u -> exponent tuple w.r.t. the components
    logs: HashMap<u64, Vec<u64>>,
}

impl UnitGroup {
    fn new(u: u64) -> Self {
        assert!(u >= 1);
        let mut components = Vec::new();
        // Per prime power p^e, the cyclic decomposition with generators
        // lifted to residues mod u that are ≡ 1 at the other prime powers.
        for &(p, e) in factorize_u64(u).factors() {
            let pe = p.pow(e);
            let rest = u / pe;
            let lift = |g: u64| crt_pair(g, pe, 1 % rest.max(1), rest);
            if p == 2 {
                match e {
                    1 => {}
                    2 => components.push(CyclicComponent { generator: lift(3), order: 2 }),
                    _ => {
                        components.push(CyclicComponent { generator: lift(pe - 1), order: 2 });
                        components.push(CyclicComponent { generator: lift(5), order: pe / 4 });
                    }
                }
            } else {
                components.push(CyclicComponent {
                    generator: lift(primitive_root_mod_odd_prime_power(p, e)),
                    order: euler_phi(pe),
                });
            }
        }
        let mut group = UnitGroup { modulus: u, components, logs: HashMap::new() };
        group.build_logs();
        group
    }

    fn build_logs(&mut self) {
        let u = self.modulus;
        // Enumerate all exponent tuples; their products cover the group once.
        let r = self.components.len();
        let mut tuple = vec![0u64; r];
        loop {
            let mut a: u128 = 1;
            for (i, t) in tuple.iter().enumerate() {
                a = a * pow_mod(self.components[i].generator, *t, u) as u128
                    % u.max(2) as u128;
            }
            let a = if u == 1 { 0 } else { a as u64 };
            self.logs.insert(a, tuple.clone());
            // increment the mixed-radix tuple
            let mut i = 0;
            loop {
                if i == r {
                    return;
                }
                tuple[i] += 1;
                if tuple[i] < self.components[i].order {
                    break;
                }
                tuple[i] = 0;
                i += 1;
            }
        }
    }

    fn order(&self) -> u64 {
        self.components.iter().map(|c| c.order).product()
    }

    fn exponent(&self) -> u64 {
        self.components.iter().fold(1, |acc, c| lcm(acc, c.order))
    }
}

fn crt_pair(a: u64, m: u64, b: u64, n: u64) -> u64 {
    // x ≡ a mod m, x ≡ b mod n for coprime m, n.
    if n == 1 {
        return a % m.max(1);
    }
    if m == 1 {
        return b % n;
    }
    let m_inv = mod_inverse(m % n, n).expect("moduli are coprime");
    let diff = (b % n + n - a % n) % n;
    let t = (diff as u128 * m_inv as u128 % n as u128) as u64;
    a % m + m * t
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc: u128 = 1;
    let mm = m as u128;
    base %= m;
    let mut b = base as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % mm;
        }
        b = b * b % mm;
        e >>= 1;
    }
    acc as u64
}

fn primitive_root_mod_odd_prime_power(p: u64, e: u32) -> u64 {
    let g = primitive_root_mod_p(p);
    if e == 1 {
        return g;
    }
    // g generates mod p^e unless g^{p-1} ≡ 1 mod p², in which case g + p does.
    if pow_mod(g, p - 1, p * p) == 1 {
        g + p
    } else {
        g
    }
}

fn primitive_root_mod_p(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let phi = p - 1;
    let prime_divs: Vec<u64> = factorize_u64(phi).primes().collect();
    'outer: for g in 2..p {
        for &q in &prime_divs {
            if pow_mod(g, phi / q, p) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("every prime has a primitive root")
}

/// A Dirichlet character mod u, stored as an exponent table: the value at a
/// residue a coprime to u is ζ_d^{e(a)} with d the exact order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    order: u64,
    /// index a in 0..u; None when gcd(a, u) > 1
    exps: Vec<Option<u64>>,
    parity: i8,
    index: usize,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The exact multiplicative order of the character.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// ξ(-1) as ±1.
    pub fn parity(&self) -> i8 {
        self.parity
    }

    /// Position in the canonical enumeration of `characters_mod`.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Exponent e with ξ(a) = ζ_order^e, or None when gcd(a, u) > 1.
    pub fn exponent(&self, a: i64) -> Option<u64> {
        if self.modulus == 1 {
            return Some(0);
        }
        let r = a.rem_euclid(self.modulus as i64) as usize;
        self.exps[r]
    }

    /// ξ(a) as an exact cyclotomic value (zero when gcd(a, u) > 1).
    pub fn value(&self, a: i64) -> Cyclotomic {
        match self.exponent(a) {
            Some(e) => Cyclotomic::root_of_unity(self.order, e as i64),
            None => Cyclotomic::zero(),
        }
    }

    /// ξ(a)^k for an integer k (0 when gcd(a, u) > 1).
    pub fn value_pow(&self, a: i64, k: i64) -> Cyclotomic {
        match self.exponent(a) {
            Some(e) => Cyclotomic::root_of_unity(self.order, e as i64 * k),
            None => Cyclotomic::zero(),
        }
    }

    /// Smallest modulus through which the character factors, and whether the
    /// character is primitive (conductor = modulus).
    pub fn conductor(&self) -> (u64, bool) {
        let u = self.modulus;
        for f in arith::divisors(u) {
            // ξ factors through mod f iff it is trivial on {a ≡ 1 mod f}.
            let mut trivial = true;
            let mut a = 1u64;
            loop {
                a += f;
                if a > u {
                    break;
                }
                let r = a % u;
                if gcd(r, u) == 1 && self.exps[r as usize] != Some(0) {
                    trivial = false;
                    break;
                }
            }
            if trivial {
                return (f, f == u);
            }
        }
        (u, true)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor().1
    }
}

/// All φ(u) Dirichlet characters mod u, in a fixed deterministic order with
/// the trivial character first.
pub fn characters_mod(u: u64) -> Result<Vec<DirichletCharacter>> {
    if u < 1 {
        return Err(invalid("characters_mod: modulus must be at least 1"));
    }
    let group = UnitGroup::new(u);
    let big_d = group.exponent().max(1);
    let orders: Vec<u64> = group.components.iter().map(|c| c.order).collect();
    let count = group.order();
    let mut chars = Vec::with_capacity(count as usize);
    let mut tuple = vec![0u64; orders.len()];
    for index in 0..count as usize {
        // Value exponent at a residue with logs (l_j): Σ t_j l_j D/n_j mod D.
        let mut exps_d: Vec<Option<u64>> = vec![None; u as usize];
        if u == 1 {
            exps_d[0] = Some(0);
        } else {
            for (&a, logs) in &group.logs {
                let mut e: u128 = 0;
                for (j, &l) in logs.iter().enumerate() {
                    e += tuple[j] as u128 * l as u128 % big_d as u128
                        * (big_d / orders[j]) as u128;
                }
                exps_d[a as usize] = Some((e % big_d as u128) as u64);
            }
        }
        // Reduce to the exact order of this character.
        let mut g0 = big_d;
        for e in exps_d.iter().flatten() {
            g0 = gcd(g0, *e);
            if g0 == 1 {
                break;
            }
        }
        let g0 = g0.max(1);
        let order = (big_d / g0).max(1);
        let exps: Vec<Option<u64>> = exps_d.iter().map(|oe| oe.map(|e| e / g0)).collect();
        let parity = if u <= 2 {
            1
        } else {
            match exps[(u - 1) as usize].expect("-1 is a unit") {
                0 => 1,
                _ => -1,
            }
        };
        chars.push(DirichletCharacter { modulus: u, order, exps, parity, index });
        // next exponent tuple
        for (j, t) in tuple.iter_mut().enumerate() {
            *t += 1;
            if *t < orders[j] {
                break;
            }
            *t = 0;
            let _ = j;
        }
    }
    Ok(chars)
}

/// The Gauss sum Σ_{a=1}^{u} ξ(a) e^{2πi a/u} as an exact element of
/// ℚ(ζ_{lcm(d,u)}).
pub fn gauss_sum(xi: &DirichletCharacter) -> Cyclotomic {
    let u = xi.modulus();
    let d = xi.order();
    let l = lcm(d, u);
    let mut raw = vec![BigRational::zero(); l as usize];
    for a in 1..=u {
        if let Some(e) = xi.exponent(a as i64) {
            let exp = (e as u128 * (l / d) as u128 + a as u128 * (l / u) as u128) % l as u128;
            raw[exp as usize] += rat(1);
        }
    }
    Cyclotomic::from_raw(l, raw)
}

/// The local component χ_p of the idele-class character attached to a
/// primitive Dirichlet character, or a trivial/unramified stand-in.
///
/// Values are exact: on a nonzero rational x = w·p^v with w a unit, the
/// component returns χ_p(p)^v times the unit-table value at w mod p^{a(χ_p)}.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCharacterComponent {
    p: u64,
    cond_exp: u32,
    /// order of the roots of unity in the tables below
    order: u64,
    /// χ_p on units mod p^{cond_exp} (exponents of ζ_order); empty when unramified
    unit_exps: Vec<Option<u64>>,
    /// χ_p(p)
    satake: Cyclotomic,
}

impl LocalCharacterComponent {
    /// The trivial (identically 1) component at p.
    pub fn trivial(p: u64) -> Self {
        LocalCharacterComponent {
            p,
            cond_exp: 0,
            order: 1,
            unit_exps: Vec::new(),
            satake: Cyclotomic::one(),
        }
    }

    /// An unramified component with the given value at p.
    pub fn unramified(p: u64, satake: Cyclotomic) -> Self {
        assert!(!satake.is_zero());
        LocalCharacterComponent { p, cond_exp: 0, order: 1, unit_exps: Vec::new(), satake }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// The conductor exponent a(χ_p).
    pub fn cond_exp(&self) -> u32 {
        self.cond_exp
    }

    pub fn is_ramified(&self) -> bool {
        self.cond_exp > 0
    }

    pub fn is_trivial(&self) -> bool {
        !self.is_ramified() && self.satake.is_one()
    }

    /// χ_p(p).
    pub fn satake(&self) -> &Cyclotomic {
        &self.satake
    }

    /// χ_p on a unit of ℤ_p given by a rational with v_p = 0.
    pub fn unit_value(&self, x: &BigRational) -> Cyclotomic {
        if !self.is_ramified() {
            return Cyclotomic::one();
        }
        let (v, residue) = arith::unit_mod_pa(x, self.p, self.cond_exp);
        assert_eq!(v, 0, "unit_value needs a p-adic unit");
        match self.unit_exps[residue as usize] {
            Some(e) => Cyclotomic::root_of_unity(self.order, e as i64),
            None => unreachable!("residue is a unit mod p^a"),
        }
    }

    /// χ_p(x) for a nonzero rational x.
    pub fn eval(&self, x: &BigRational) -> Cyclotomic {
        assert!(!x.is_zero());
        let v = valuation(x, self.p);
        let unit = x * arith::prime_power_rat(self.p, -v);
        self.satake
            .pow(v)
            .expect("root of unity is invertible")
            .mul(&self.unit_value(&unit))
    }

    /// χ_p(x)^k for a nonzero rational x and integer k.
    pub fn eval_pow(&self, x: &BigRational, k: i64) -> Cyclotomic {
        self.eval(x).pow(k).expect("character values are units")
    }

    /// The component of the inverse character.
    pub fn inverse(&self) -> Self {
        let unit_exps = self
            .unit_exps
            .iter()
            .map(|oe| oe.map(|e| (self.order - e % self.order) % self.order))
            .collect();
        LocalCharacterComponent {
            p: self.p,
            cond_exp: self.cond_exp,
            order: self.order,
            unit_exps,
            satake: self.satake.inv().expect("root of unity"),
        }
    }

    /// Whether χ_p² is unramified (trivial on units).
    pub fn square_is_unramified(&self) -> bool {
        self.unit_exps
            .iter()
            .flatten()
            .all(|&e| (2 * e) % self.order == 0)
    }

    /// β = χ_p(p)² when χ_p² is unramified, else 0.
    pub fn beta(&self) -> Cyclotomic {
        if self.square_is_unramified() {
            self.satake.mul(&self.satake)
        } else {
            Cyclotomic::zero()
        }
    }

    /// The local ε-factor at s = 0: the integral of χ_p^{-1}·ψ_p over
    /// p^{-a}ℤ_p^×, evaluated as the exact finite sum
    /// χ_p(p)^a Σ_{v ∈ (ℤ/p^a)^×} χ_p(v)^{-1} ζ_{p^a}^v
    /// (each unit-residue coset of ℤ_p has volume 1). Unramified components
    /// give 1.
    pub fn epsilon_factor(&self) -> Cyclotomic {
        let a = self.cond_exp;
        if a == 0 {
            return Cyclotomic::one();
        }
        let pa = self.p.pow(a);
        let l = lcm(self.order, pa);
        let mut raw = vec![BigRational::zero(); l as usize];
        for v in 1..pa {
            if v % self.p == 0 {
                continue;
            }
            let e = self.unit_exps[v as usize].expect("unit residue");
            let inv_e = (self.order - e % self.order) % self.order;
            let exp = (inv_e as u128 * (l / self.order) as u128 + v as u128 * (l / pa) as u128)
                % l as u128;
            raw[exp as usize] += rat(1);
        }
        let sum = Cyclotomic::from_raw(l, raw);
        self.satake.pow(a as i64).expect("root of unity").mul(&sum)
    }
}

/// The local decomposition χ = ∏_v χ_v of the idele-class character attached
/// to a primitive Dirichlet character ξ: ramified components at the primes
/// dividing the conductor, Satake value ξ(p) elsewhere, and a sign twist at
/// the archimedean place when ξ is odd.
#[derive(Debug, Clone)]
pub struct LocalDecomposition {
    xi: DirichletCharacter,
    ramified: Vec<(u64, LocalCharacterComponent)>,
    sign_twist: bool,
}

impl LocalDecomposition {
    pub fn character(&self) -> &DirichletCharacter {
        &self.xi
    }

    /// Components at the ramified primes (those dividing the conductor).
    pub fn ramified(&self) -> &[(u64, LocalCharacterComponent)] {
        &self.ramified
    }

    /// Whether χ_∞ is the sign character.
    pub fn sign_twist(&self) -> bool {
        self.sign_twist
    }

    /// The component at an arbitrary prime.
    pub fn component(&self, p: u64) -> LocalCharacterComponent {
        for (q, c) in &self.ramified {
            if *q == p {
                return c.clone();
            }
        }
        LocalCharacterComponent::unramified(p, self.xi.value(p as i64))
    }
}

/// Decompose a primitive Dirichlet character into its local components.
///
/// The ramified unit tables invert the CRT factors of ξ, so that
/// ∏_{p|u} χ_p(a) = ξ(a)^{-1} for integers a coprime to u, and the value
/// χ_p(p) is pinned by global triviality: all unramified components and the
/// archimedean one take the value 1 on the positive integer p, forcing
/// χ_p(p) = ∏_{ℓ|u, ℓ≠p} ξ_ℓ(p).
pub fn local_components(xi: &DirichletCharacter) -> Result<LocalDecomposition> {
    if !xi.is_primitive() {
        return Err(invalid(
            "local_components: character must be primitive (conductor = modulus)",
        ));
    }
    let u = xi.modulus();
    let d = xi.order();
    let factors = factorize_u64(u);
    let mut ramified = Vec::new();
    for &(p, e) in factors.factors() {
        let pe = p.pow(e);
        let rest = u / pe;
        // CRT factor ξ_p(v) = ξ(x) with x ≡ v mod p^e, x ≡ 1 mod u/p^e.
        let xi_p_exp = |v: u64| -> Option<u64> {
            let x = crt_pair(v % pe, pe, 1 % rest.max(1), rest);
            xi.exponent(x as i64)
        };
        let mut unit_exps: Vec<Option<u64>> = vec![None; pe as usize];
        for v in 0..pe {
            if v % p != 0 {
                // χ_p(v) = ξ_p(v)^{-1}
                let e0 = xi_p_exp(v).expect("unit residue");
                unit_exps[v as usize] = Some((d - e0 % d) % d);
            }
        }
        // χ_p(p) = ∏_{ℓ|u, ℓ≠p} ξ_ℓ(p)
        let mut satake_exp: u128 = 0;
        for &(l, f) in factors.factors() {
            if l == p {
                continue;
            }
            let le = l.pow(f);
            let lrest = u / le;
            let x = crt_pair(p % le, le, 1 % lrest.max(1), lrest);
            satake_exp += xi.exponent(x as i64).expect("p is a unit at the other primes") as u128;
        }
        let satake = Cyclotomic::root_of_unity(d, (satake_exp % d as u128) as i64);
        ramified.push((p, LocalCharacterComponent { p, cond_exp: e, order: d, unit_exps, satake }));
    }
    Ok(LocalDecomposition { xi: xi.clone(), ramified, sign_twist: xi.parity() == -1 })
}

/// The twisted divisor sum σ^ξ_t(n) = ξ(n) Σ_{m|n} ξ(m)^{-2} m^t.
///
/// When gcd(n, u) > 1 the leading factor ξ(n) vanishes and the sum is 0.
pub fn sigma_xi(t: u32, n: u64, xi: &DirichletCharacter) -> Cyclotomic {
    assert!(n >= 1);
    if xi.exponent(n as i64).is_none() {
        return Cyclotomic::zero();
    }
    let mut sum = Cyclotomic::zero();
    for m in arith::divisors(n) {
        if let Some(e) = xi.exponent(m as i64) {
            let term = Cyclotomic::root_of_unity(xi.order(), -2 * (e as i64))
                .scale(&BigRational::from_integer(num::BigInt::from(m).pow(t)));
            sum = sum.add(&term);
        }
    }
    xi.value(n as i64).mul(&sum)
}

/// Numerical value of L(k, ξ²) = Σ_{n≥1} ξ(n)² n^{-k} for an integer k ≥ 2,
/// where ξ² means the (possibly imprimitive) function n ↦ ξ(n)².
///
/// Computed as u^{-k} Σ_{a mod u} ξ(a)² ζ_H(k, a/u) with the Hurwitz zeta
/// evaluated by Euler–Maclaurin; the absolute error is far below 1e-12.
/// k = 1 (conditional convergence) is rejected.
pub fn l_value_numeric(k: u32, xi: &DirichletCharacter) -> Result<Complex64> {
    if k < 2 {
        return Err(invalid("l_value_numeric: k must be at least 2"));
    }
    let u = xi.modulus();
    let mut sum = Complex64::new(0.0, 0.0);
    for a in 1..=u {
        if let Some(e) = xi.exponent(a as i64) {
            let val2 = Cyclotomic::root_of_unity(xi.order(), 2 * e as i64).embed();
            sum += val2 * hurwitz_zeta_int(k, a as f64 / u as f64);
        }
    }
    Ok(sum / (u as f64).powi(k as i32))
}

/// Hurwitz zeta ζ(s, x) for integer s ≥ 2 and x ∈ (0, 1], by Euler–Maclaurin.
pub fn hurwitz_zeta_int(s: u32, x: f64) -> f64 {
    assert!(s >= 2);
    assert!(x > 0.0 && x <= 1.0);
    let s = s as f64;
    const J: usize = 18;
    let mut sum = 0.0;
    for j in 0..J {
        sum += (x + j as f64).powf(-s);
    }
    let t = x + J as f64;
    sum += t.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * t.powf(-s);
    // correction terms B_{2r}/(2r)! · (s)_{2r-1} · t^{-s-2r+1}
    let b2r_over_fact = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
    ];
    let mut poch = s; // (s)_1
    for (r, c) in b2r_over_fact.iter().enumerate() {
        let m = 2 * r + 1;
        sum += c * poch * t.powf(-s - m as f64);
        poch *= (s + m as f64) * (s + m as f64 + 1.0);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Signed;
    use std::f64::consts::PI;

    pub(crate) fn quadratic_mod3() -> DirichletCharacter {
        characters_mod(3)
            .unwrap()
            .into_iter()
            .find(|c| !c.is_trivial())
            .unwrap()
    }

    fn nontrivial_mod4() -> DirichletCharacter {
        characters_mod(4)
            .unwrap()
            .into_iter()
            .find(|c| !c.is_trivial())
            .unwrap()
    }

    #[test]
    fn counts_and_multiplicativity() {
        assert_eq!(characters_mod(3).unwrap().len(), 2);
        assert_eq!(characters_mod(4).unwrap().len(), 2);
        assert_eq!(characters_mod(8).unwrap().len(), 4);
        for u in 1..=24u64 {
            let chars = characters_mod(u).unwrap();
            assert_eq!(chars.len() as u64, euler_phi(u), "count at u = {u}");
            for i in 0..chars.len() {
                for j in i + 1..chars.len() {
                    assert_ne!(chars[i].exps, chars[j].exps, "u = {u}");
                }
            }
            for xi in &chars {
                assert!(xi.value(1).is_one());
                for a in 1..u.max(2) {
                    for b in 1..u.max(2) {
                        if gcd(a, u) == 1 && gcd(b, u) == 1 {
                            assert_eq!(
                                xi.value((a * b) as i64),
                                xi.value(a as i64).mul(&xi.value(b as i64))
                            );
                        }
                    }
                }
                let expect = if xi.parity() == 1 {
                    Cyclotomic::one()
                } else {
                    Cyclotomic::from_integer(-1)
                };
                assert_eq!(xi.value(-1), expect);
            }
        }
    }

    #[test]
    fn conductor_detection() {
        let xi3 = quadratic_mod3();
        assert_eq!(xi3.conductor(), (3, true));
        let trivial1 = &characters_mod(1).unwrap()[0];
        assert_eq!(trivial1.conductor(), (1, true));
        let chars9 = characters_mod(9).unwrap();
        let conductors: Vec<u64> = chars9.iter().map(|c| c.conductor().0).collect();
        assert!(conductors.contains(&1));
        assert!(conductors.contains(&3));
        assert!(conductors.contains(&9));
        let from3 = chars9.iter().find(|c| c.conductor().0 == 3).unwrap();
        assert!(!from3.is_primitive());
        assert_eq!(from3.order(), 2);
    }

    #[test]
    fn gauss_sum_examples() {
        let xi3 = quadratic_mod3();
        let z3 = Cyclotomic::root_of_unity(3, 1);
        let expect = z3.sub(&z3.mul(&z3));
        assert_eq!(gauss_sum(&xi3), expect);
        let g = gauss_sum(&xi3).embed();
        assert!((g - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-13);

        let xi4 = nontrivial_mod4();
        let expect4 = Cyclotomic::root_of_unity(4, 1).scale(&rat(2));
        assert_eq!(gauss_sum(&xi4), expect4);
    }

    #[test]
    fn gauss_sum_magnitude_for_primitive_characters() {
        for u in 2..=24u64 {
            for xi in characters_mod(u).unwrap() {
                if !xi.is_primitive() {
                    continue;
                }
                let g = gauss_sum(&xi);
                let norm = g.mul(&g.conj());
                assert_eq!(
                    norm.as_rational(),
                    Some(rat(u as i64)),
                    "|G(ξ)|² ≠ u at u = {u}, index {}",
                    xi.index()
                );
            }
        }
    }

    #[test]
    fn local_component_structure() {
        let xi = quadratic_mod3();
        let dec = local_components(&xi).unwrap();
        assert!(dec.sign_twist(), "the quadratic character mod 3 is odd");
        // Satake parameter at an unramified prime is ξ(p).
        let c2 = dec.component(2);
        assert!(!c2.is_ramified());
        assert_eq!(c2.satake(), &Cyclotomic::from_integer(-1));
        // χ_3(3) = 1 by global triviality (all other factors are 1).
        let c3 = dec.component(3);
        assert!(c3.is_ramified());
        assert_eq!(c3.cond_exp(), 1);
        assert!(c3.satake().is_one());
        // ∏_{p|a} χ_p(a) = ξ(|a|): a = 5.
        let prod = dec.component(5).eval(&rat(5));
        assert_eq!(prod, xi.value(5));
        assert_eq!(xi.value(5), Cyclotomic::from_integer(-1));
    }

    #[test]
    fn local_product_inverts_character() {
        for u in 2..=24u64 {
            for xi in characters_mod(u).unwrap() {
                if !xi.is_primitive() {
                    continue;
                }
                let dec = local_components(&xi).unwrap();
                let mut tested = 0;
                for a in 1..=(5 * u as i64) {
                    if tested >= 40 {
                        break;
                    }
                    if gcd(a.unsigned_abs(), u) == 1 {
                        // ∏_{p|u} χ_p(a) = ξ(a)^{-1}
                        let mut prod = Cyclotomic::one();
                        for (_, c) in dec.ramified() {
                            prod = prod.mul(&c.eval(&rat(a)));
                        }
                        assert_eq!(prod, xi.value_pow(a, -1), "u = {u}, a = {a}");
                        tested += 1;
                    }
                }
            }
        }
    }

    #[test]
    fn finite_product_recovers_character_value() {
        // ∏_{p | a} χ_p(a) = ξ(|a|) for integers a coprime to u; enlarging
        // the product over the primes dividing u as well gives 1 for a > 0
        // (global triviality restricted to positive integers).
        for u in [3u64, 4, 5, 8, 12] {
            for xi in characters_mod(u).unwrap() {
                if !xi.is_primitive() {
                    continue;
                }
                let dec = local_components(&xi).unwrap();
                for a in [2i64, 5, 7, 10, 55, -7, -2] {
                    if gcd(a.unsigned_abs(), u) != 1 {
                        continue;
                    }
                    let mut prod = Cyclotomic::one();
                    for p in factorize_u64(a.unsigned_abs()).primes() {
                        prod = prod.mul(&dec.component(p).eval(&rat(a)));
                    }
                    assert_eq!(prod, xi.value(a.abs()), "u = {u}, a = {a}");
                    if a > 0 {
                        let mut full = prod;
                        for p in factorize_u64(u).primes() {
                            full = full.mul(&dec.component(p).eval(&rat(a)));
                        }
                        assert!(full.is_one(), "u = {u}, a = {a}");
                    }
                }
            }
        }
    }

    #[test]
    fn global_triviality_on_rationals() {
        // ∏_{p<∞} χ_p(r) · χ_∞(r) = 1 for nonzero rationals r.
        for u in [3u64, 4, 5, 7, 8] {
            for xi in characters_mod(u).unwrap() {
                if !xi.is_primitive() {
                    continue;
                }
                let dec = local_components(&xi).unwrap();
                for (num, den) in [(2i64, 1i64), (-3, 1), (5, 7), (-10, 9), (22, 5)] {
                    if gcd(num.unsigned_abs(), u) != 1 || gcd(den.unsigned_abs(), u) != 1 {
                        continue;
                    }
                    let r = BigRational::new(num.into(), den.into());
                    let mut support: Vec<u64> = factorize_u64(num.unsigned_abs())
                        .primes()
                        .chain(factorize_u64(den.unsigned_abs()).primes())
                        .collect();
                    for p in factorize_u64(u).primes() {
                        if !support.contains(&p) {
                            support.push(p);
                        }
                    }
                    support.dedup();
                    let mut prod = Cyclotomic::one();
                    let mut seen = Vec::new();
                    for p in support {
                        if !seen.contains(&p) {
                            prod = prod.mul(&dec.component(p).eval(&r));
                            seen.push(p);
                        }
                    }
                    if dec.sign_twist() && r.is_negative() {
                        prod = prod.neg();
                    }
                    assert!(prod.is_one(), "u = {u}, r = {num}/{den}");
                }
            }
        }
    }

    #[test]
    fn epsilon_factor_examples() {
        let xi = quadratic_mod3();
        let dec = local_components(&xi).unwrap();
        let eps = dec.component(3).epsilon_factor();
        let z3 = Cyclotomic::root_of_unity(3, 1);
        assert_eq!(eps, z3.sub(&z3.mul(&z3)));
        assert!(LocalCharacterComponent::trivial(7).epsilon_factor().is_one());
    }

    #[test]
    fn epsilon_product_equals_gauss_sum() {
        for u in 2..=24u64 {
            for xi in characters_mod(u).unwrap() {
                if !xi.is_primitive() {
                    continue;
                }
                let dec = local_components(&xi).unwrap();
                let mut prod = Cyclotomic::one();
                for (_, c) in dec.ramified() {
                    prod = prod.mul(&c.epsilon_factor());
                }
                assert_eq!(prod, gauss_sum(&xi), "u = {u}, index {}", xi.index());
            }
        }
    }

    #[test]
    fn sigma_xi_examples() {
        let xi3 = quadratic_mod3();
        assert_eq!(sigma_xi(1, 2, &xi3), Cyclotomic::from_integer(-3));
        assert!(sigma_xi(1, 1, &xi3).is_one());
        let xi4 = nontrivial_mod4();
        assert_eq!(sigma_xi(1, 3, &xi4), Cyclotomic::from_integer(-4));
        assert!(sigma_xi(5, 1, &xi4).is_one());
        // vanishing when gcd(n, u) > 1
        assert!(sigma_xi(1, 6, &xi3).is_zero());
    }

    #[test]
    fn sigma_xi_multiplicative() {
        let xi4 = nontrivial_mod4();
        for (m, n) in [(3u64, 5u64), (5, 7), (3, 49), (9, 5), (7, 11)] {
            assert_eq!(gcd(m, n), 1);
            assert_eq!(
                sigma_xi(1, m * n, &xi4),
                sigma_xi(1, m, &xi4).mul(&sigma_xi(1, n, &xi4))
            );
        }
    }

    #[test]
    fn l_values() {
        // quadratic ξ mod 3: L(2, ξ²) = ζ(2)(1 - 3^{-2}) = 4π²/27.
        let xi3 = quadratic_mod3();
        let l = l_value_numeric(2, &xi3).unwrap();
        assert!((l.re - 4.0 * PI * PI / 27.0).abs() < 1e-10, "got {l}");
        assert!(l.im.abs() < 1e-12);
        // ξ mod 4: L(2, ξ²) = ζ(2)(1 - 2^{-2}) = π²/8.
        let xi4 = nontrivial_mod4();
        let l4 = l_value_numeric(2, &xi4).unwrap();
        assert!((l4.re - PI * PI / 8.0).abs() < 1e-10);
        assert!(l4.re > 0.0);
        assert!(l_value_numeric(1, &xi3).is_err());
    }

    #[test]
    fn hurwitz_zeta_sanity() {
        // ζ(2, 1) = π²/6 and ζ(2, 1/2) = π²/2 - π²/... = (4-1)·... use known: ζ(2,1/2) = π²/2.
        assert!((hurwitz_zeta_int(2, 1.0) - PI * PI / 6.0).abs() < 1e-13);
        assert!((hurwitz_zeta_int(2, 0.5) - PI * PI / 2.0).abs() < 1e-12);
        assert!((hurwitz_zeta_int(4, 1.0) - PI.powi(4) / 90.0).abs() < 1e-13);
    }
}
