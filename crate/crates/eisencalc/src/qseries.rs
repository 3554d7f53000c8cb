//! Exact truncated q-expansions of the classical Eisenstein series, the
//! Hecke/level operators acting on them, and exact verification of the
//! Möbius-inversion identities relating the two weight-2 level families.
//!
//! The seven series built here:
//! - `Ek`: weight k ≥ 4 level 1, coefficients 1, (-2k/B_k)·σ_{k-1}(n);
//! - `E2`: the weight-2 series 1 - 3/(πy) - 24 Σ σ(n) qⁿ, with the 1/y term
//!   carried as metadata (`nonholo`), never mixed into the q-coefficients;
//! - `TildeE2N`: E2(z) - N·E2(Nz), holomorphic of level N;
//! - `E2N`: the level-N companion 1 - 24 μ(N)/φ(N) Σ σ(n′) qⁿ with n′ the
//!   prime-to-N part of n (squarefree N > 1);
//! - `EkXi`, `E2NXi`, `TildeE2NXi`: the character variants, stored in
//!   normalized form: the transcendental constant C(k,ξ) is divided out and
//!   reported separately, leaving exact cyclotomic coefficients.

use num::{BigRational, One, Zero};

use crate::arith::{
    self, divisor_sigma, divisors, euler_phi, factorize_u64, gcd, moebius, prime_to_part, rat,
    Cyclotomic,
};
use crate::dirichlet::{sigma_xi, DirichletCharacter};
use crate::error::{invalid, Result};

/// Coefficient domain tag for a q-expansion.
#[derive(Debug, Clone, PartialEq)]
pub enum Coeffs {
    Rat(Vec<BigRational>),
    Cyc(Vec<Cyclotomic>),
}

impl Coeffs {
    fn len(&self) -> usize {
        match self {
            Coeffs::Rat(v) => v.len(),
            Coeffs::Cyc(v) => v.len(),
        }
    }
}

/// A single coefficient, in whichever domain the expansion carries.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Rat(BigRational),
    Cyc(Cyclotomic),
}

impl Coefficient {
    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Rat(q) => q.is_zero(),
            Coefficient::Cyc(c) => c.is_zero(),
        }
    }

    pub fn embed(&self) -> num::complex::Complex64 {
        match self {
            Coefficient::Rat(q) => {
                num::complex::Complex64::new(crate::arith::cyclotomic::rational_to_f64(q), 0.0)
            }
            Coefficient::Cyc(c) => c.embed(),
        }
    }

    /// Exact equality across domains (a rational equals a cyclotomic that
    /// reduces to the same rational).
    pub fn eq_exact(&self, other: &Coefficient) -> bool {
        match (self, other) {
            (Coefficient::Rat(a), Coefficient::Rat(b)) => a == b,
            (Coefficient::Cyc(a), Coefficient::Cyc(b)) => a == b,
            (Coefficient::Rat(a), Coefficient::Cyc(b))
            | (Coefficient::Cyc(b), Coefficient::Rat(a)) => {
                b.as_rational().map(|q| &q == a).unwrap_or(false)
            }
        }
    }
}

/// A truncated formal power series Σ_{n=0}^{M} c_n qⁿ with weight and level
/// tags and an optional non-holomorphic c/(πy) term.
#[derive(Debug, Clone, PartialEq)]
pub struct QExpansion {
    weight: i32,
    level: u64,
    /// coefficient c of the c/(πy) term (0 when absent)
    nonholo: BigRational,
    coeffs: Coeffs,
}

impl QExpansion {
    pub fn weight(&self) -> i32 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Truncation order M: coefficients c_0..c_M are stored.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The coefficient of the 1/(πy) term.
    pub fn nonholo(&self) -> &BigRational {
        &self.nonholo
    }

    pub fn coeffs(&self) -> &Coeffs {
        &self.coeffs
    }

    pub fn coefficient(&self, n: usize) -> Coefficient {
        match &self.coeffs {
            Coeffs::Rat(v) => Coefficient::Rat(v[n].clone()),
            Coeffs::Cyc(v) => Coefficient::Cyc(v[n].clone()),
        }
    }

    pub fn rational_coeffs(&self) -> Option<&[BigRational]> {
        match &self.coeffs {
            Coeffs::Rat(v) => Some(v),
            Coeffs::Cyc(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.coeffs, Coeffs::Rat(_))
    }

    /// A copy with the 1/(πy) term removed (used by the quasi-modularity
    /// witness: the bare weight-2 q-series must fail the transformation law
    /// that the completed series satisfies).
    pub fn without_nonholo(&self) -> QExpansion {
        QExpansion { nonholo: BigRational::zero(), ..self.clone() }
    }

    fn check_compatible(&self, other: &QExpansion) -> Result<()> {
        if self.weight != other.weight {
            return Err(invalid("expansions must have equal weight"));
        }
        if self.coeffs.len() != other.coeffs.len() {
            return Err(invalid("expansions must have equal truncation order"));
        }
        match (&self.coeffs, &other.coeffs) {
            (Coeffs::Rat(_), Coeffs::Rat(_)) | (Coeffs::Cyc(_), Coeffs::Cyc(_)) => Ok(()),
            _ => Err(invalid("expansions must have the same coefficient domain")),
        }
    }

    pub fn add(&self, other: &QExpansion) -> Result<QExpansion> {
        self.check_compatible(other)?;
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Rat(a), Coeffs::Rat(b)) => {
                Coeffs::Rat(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Coeffs::Cyc(a), Coeffs::Cyc(b)) => {
                Coeffs::Cyc(a.iter().zip(b).map(|(x, y)| x.add(y)).collect())
            }
            _ => unreachable!(),
        };
        Ok(QExpansion {
            weight: self.weight,
            level: arith::lcm(self.level, other.level),
            nonholo: &self.nonholo + &other.nonholo,
            coeffs,
        })
    }

    pub fn sub(&self, other: &QExpansion) -> Result<QExpansion> {
        self.add(&other.scale_rat(&rat(-1)))
    }

    pub fn scale_rat(&self, q: &BigRational) -> QExpansion {
        let coeffs = match &self.coeffs {
            Coeffs::Rat(v) => Coeffs::Rat(v.iter().map(|c| c * q).collect()),
            Coeffs::Cyc(v) => Coeffs::Cyc(v.iter().map(|c| c.scale(q)).collect()),
        };
        QExpansion {
            weight: self.weight,
            level: self.level,
            nonholo: &self.nonholo * q,
            coeffs,
        }
    }

    /// Scale a cyclotomic-coefficient expansion by an exact cyclotomic scalar.
    pub fn scale_cyc(&self, z: &Cyclotomic) -> Result<QExpansion> {
        let Coeffs::Cyc(v) = &self.coeffs else {
            return Err(invalid("cyclotomic scaling requires cyclotomic coefficients"));
        };
        if !self.nonholo.is_zero() {
            return Err(invalid("cyclotomic scaling of a series with a 1/y term"));
        }
        Ok(QExpansion {
            weight: self.weight,
            level: self.level,
            nonholo: BigRational::zero(),
            coeffs: Coeffs::Cyc(v.iter().map(|c| c.mul(z)).collect()),
        })
    }

    /// The map F(z) ↦ N·F(Nz): coefficients c_n ↦ N·c_{n/N} (zero unless
    /// N | n). The weight is unchanged, the level is multiplied by N, and a
    /// c/(πy) term is carried along unchanged, since N·c/(π N y) = c/(πy).
    pub fn level_raise(&self, n: u64) -> Result<QExpansion> {
        if n < 1 {
            return Err(invalid("level_raise: scale factor must be positive"));
        }
        let m = self.truncation();
        let scale = rat(n as i64);
        let coeffs = match &self.coeffs {
            Coeffs::Rat(v) => {
                let mut out = vec![BigRational::zero(); m + 1];
                for (i, c) in v.iter().enumerate() {
                    if (i as u64).checked_mul(n).map(|j| j <= m as u64) == Some(true) {
                        out[i * n as usize] = c * &scale;
                    }
                }
                Coeffs::Rat(out)
            }
            Coeffs::Cyc(v) => {
                let mut out = vec![Cyclotomic::zero(); m + 1];
                for (i, c) in v.iter().enumerate() {
                    if (i as u64).checked_mul(n).map(|j| j <= m as u64) == Some(true) {
                        out[i * n as usize] = c.scale(&scale);
                    }
                }
                Coeffs::Cyc(out)
            }
        };
        Ok(QExpansion {
            weight: self.weight,
            level: self.level * n,
            nonholo: self.nonholo.clone(),
            coeffs,
        })
    }

    /// The normalized degenerate Hecke operator at p:
    /// F ↦ (F - χ_p(p)·p·F(pz)) / (1 - p).
    ///
    /// With trivial character, composing over the primes dividing a
    /// squarefree N carries the weight-2 level-1 series to its level-N
    /// companion; constants are fixed points, and the 1/(πy) term cancels.
    pub fn hecke_gamma_p(&self, p: u64, chi_p_value: &Cyclotomic) -> Result<QExpansion> {
        let f = factorize_u64(p);
        if f.factors().len() != 1 || f.factors()[0].1 != 1 {
            return Err(invalid("hecke_gamma_p: p must be prime"));
        }
        let raised = self.level_raise(p)?;
        let denom_inv = rat(1 - p as i64).recip();
        if let Some(r) = chi_p_value.as_rational() {
            let out = self.sub(&raised.scale_rat(&r))?;
            return Ok(out.scale_rat(&denom_inv));
        }
        let scaled = raised.scale_cyc(chi_p_value)?;
        let out = self.sub(&scaled)?;
        Ok(out.scale_rat(&denom_inv))
    }

    /// Exact equality of the truncated data (weight, coefficients, 1/y term).
    pub fn eq_exact(&self, other: &QExpansion) -> bool {
        if self.weight != other.weight
            || self.nonholo != other.nonholo
            || self.coeffs.len() != other.coeffs.len()
        {
            return false;
        }
        (0..self.coeffs.len()).all(|n| self.coefficient(n).eq_exact(&other.coefficient(n)))
    }

    /// Largest |difference| under the complex embedding; 0.0 when equal.
    pub fn max_deviation(&self, other: &QExpansion) -> f64 {
        let mut worst: f64 = 0.0;
        for n in 0..=self.truncation().min(other.truncation()) {
            let d = (self.coefficient(n).embed() - other.coefficient(n).embed()).norm();
            worst = worst.max(d);
        }
        let dn = &self.nonholo - &other.nonholo;
        worst.max(crate::arith::cyclotomic::rational_to_f64(&dn).abs())
    }

    pub(crate) fn from_parts(
        weight: i32,
        level: u64,
        nonholo: BigRational,
        coeffs: Coeffs,
    ) -> Self {
        QExpansion { weight, level, nonholo, coeffs }
    }
}

/// The kinds of Eisenstein series the library constructs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EisensteinKind {
    /// weight k ≥ 4, level 1
    Ek,
    /// weight 2, level 1, with the -3/(πy) term
    E2,
    /// E2(z) - N·E2(Nz)
    TildeE2N,
    /// the level-N weight-2 series with coefficients σ(n′)
    E2N,
    /// weight k with character, normalized
    EkXi,
    /// weight 2, level u²N with character, normalized
    E2NXi,
    /// N·E_{2,ξ}(Nz), normalized
    TildeE2NXi,
}

impl EisensteinKind {
    pub fn needs_character(self) -> bool {
        matches!(
            self,
            EisensteinKind::EkXi | EisensteinKind::E2NXi | EisensteinKind::TildeE2NXi
        )
    }
}

/// Parameters for [`eisenstein`].
#[derive(Debug, Clone)]
pub struct EisensteinParams {
    pub k: i32,
    pub n_level: u64,
    pub xi: Option<DirichletCharacter>,
}

fn require_even_weight(k: i32) -> Result<()> {
    if k < 2 || k % 2 != 0 {
        return Err(invalid("weight k must be an even integer at least 2"));
    }
    Ok(())
}

fn require_squarefree(n: u64) -> Result<()> {
    if n < 1 || !factorize_u64(n).is_squarefree() {
        return Err(invalid("level N must be squarefree"));
    }
    Ok(())
}

pub(crate) fn require_character_hypotheses(n: u64, xi: &DirichletCharacter) -> Result<()> {
    let u = xi.modulus();
    if u <= 1 {
        return Err(invalid("character must have modulus u > 1"));
    }
    if !xi.is_primitive() {
        return Err(invalid("character must be primitive"));
    }
    if gcd(n, u) != 1 {
        return Err(invalid("level N must be coprime to the conductor u"));
    }
    for p in factorize_u64(n).primes() {
        if !xi.value_pow(p as i64, 2).is_one() {
            return Err(invalid("character must satisfy ξ(p)² = 1 at every prime p | N"));
        }
    }
    Ok(())
}

/// Weight-k level-1 series: 1 + (-2k/B_k) Σ σ_{k-1}(n) qⁿ, exact through qᴹ.
/// For k = 2 this is the completed series with its -3/(πy) term.
pub fn e_k(k: i32, m: usize) -> Result<QExpansion> {
    require_even_weight(k)?;
    if k == 2 {
        return e2(m);
    }
    let c = arith::eisenstein_constant(k as u32)?;
    let mut coeffs = Vec::with_capacity(m + 1);
    coeffs.push(BigRational::one());
    for n in 1..=m {
        coeffs.push(&c * divisor_sigma(k as u32 - 1, n as u64));
    }
    Ok(QExpansion::from_parts(k, 1, BigRational::zero(), Coeffs::Rat(coeffs)))
}

/// The weight-2 series 1 - 3/(πy) - 24 Σ σ(n) qⁿ; the 1/y term is recorded
/// in the `nonholo` field as the rational -3.
pub fn e2(m: usize) -> Result<QExpansion> {
    let mut coeffs = Vec::with_capacity(m + 1);
    coeffs.push(BigRational::one());
    for n in 1..=m {
        coeffs.push(rat(-24) * divisor_sigma(1, n as u64));
    }
    Ok(QExpansion::from_parts(2, 1, rat(-3), Coeffs::Rat(coeffs)))
}

/// E2(z) - N·E2(Nz) = (1-N) - 24 Σ a_n qⁿ with a_n = σ(n) - N·σ(n/N) when
/// N | n and σ(n) otherwise. The two 1/y terms cancel.
pub fn tilde_e2n(n: u64, m: usize) -> Result<QExpansion> {
    require_squarefree(n)?;
    let mut coeffs = Vec::with_capacity(m + 1);
    coeffs.push(rat(1 - n as i64));
    for j in 1..=m as u64 {
        let mut a = divisor_sigma(1, j);
        if j % n == 0 {
            a -= rat(n as i64) * divisor_sigma(1, j / n);
        }
        coeffs.push(rat(-24) * a);
    }
    Ok(QExpansion::from_parts(2, n, BigRational::zero(), Coeffs::Rat(coeffs)))
}

/// The level-N weight-2 series 1 - 24 μ(N)/φ(N) Σ σ(n′) qⁿ, n′ the
/// prime-to-N part of n. Requires squarefree N > 1; it is holomorphic
/// (no 1/y term).
pub fn e2n(n: u64, m: usize) -> Result<QExpansion> {
    if n <= 1 {
        return Err(invalid("level N must exceed 1 for the σ(n′) series"));
    }
    require_squarefree(n)?;
    let factor = rat(-24 * moebius(n) as i64) / rat(euler_phi(n) as i64);
    let mut coeffs = Vec::with_capacity(m + 1);
    coeffs.push(BigRational::one());
    for j in 1..=m as u64 {
        coeffs.push(&factor * divisor_sigma(1, prime_to_part(j, n)));
    }
    Ok(QExpansion::from_parts(2, n, BigRational::zero(), Coeffs::Rat(coeffs)))
}

/// The normalized weight-k character series: coefficients σ^ξ_{k-1}(n) in
/// exact cyclotomic arithmetic, zero constant term, level u². The complex
/// constant C(k,ξ) multiplying the true series is reported separately by
/// [`crate::adelic::character_constant`].
pub fn ek_xi(k: i32, xi: &DirichletCharacter, m: usize) -> Result<QExpansion> {
    require_even_weight(k)?;
    require_character_hypotheses(1, xi)?;
    let u = xi.modulus();
    let mut coeffs = Vec::with_capacity(m + 1);
    coeffs.push(Cyclotomic::zero());
    for n in 1..=m as u64 {
        coeffs.push(sigma_xi(k as u32 - 1, n, xi));
    }
    Ok(QExpansion::from_parts(k, u * u, BigRational::zero(), Coeffs::Cyc(coeffs)))
}

/// The normalized weight-2 level-u²N character series:
/// μ(N)/φ(N) Σ ξ(n/n′) σ^ξ(n′) qⁿ with n′ the prime-to-N part of n.
pub fn e2n_xi(n: u64, xi: &DirichletCharacter, m: usize) -> Result<QExpansion> {
    require_squarefree(n)?;
    require_character_hypotheses(n, xi)?;
    let u = xi.modulus();
    let factor = rat(moebius(n) as i64) / rat(euler_phi(n) as i64);
    let mut coeffs = Vec::with_capacity(m + 1);
    coeffs.push(Cyclotomic::zero());
    for j in 1..=m as u64 {
        let jp = prime_to_part(j, n);
        let c = xi
            .value((j / jp) as i64)
            .mul(&sigma_xi(1, jp, xi))
            .scale(&factor);
        coeffs.push(c);
    }
    Ok(QExpansion::from_parts(2, u * u * n, BigRational::zero(), Coeffs::Cyc(coeffs)))
}

/// N·E_{2,ξ}(Nz) in normalized form: coefficient N·σ^ξ(j) at n = jN.
pub fn tilde_e2n_xi(n: u64, xi: &DirichletCharacter, m: usize) -> Result<QExpansion> {
    require_squarefree(n)?;
    require_character_hypotheses(n, xi)?;
    ek_xi(2, xi, m)?.level_raise(n)
}

/// Construct any of the seven Eisenstein series kinds.
pub fn eisenstein(kind: EisensteinKind, params: &EisensteinParams, m: usize) -> Result<QExpansion> {
    if kind.needs_character() && params.xi.is_none() {
        return Err(invalid("this kind requires a Dirichlet character"));
    }
    match kind {
        EisensteinKind::Ek => e_k(params.k, m),
        EisensteinKind::E2 => e2(m),
        EisensteinKind::TildeE2N => tilde_e2n(params.n_level, m),
        EisensteinKind::E2N => e2n(params.n_level, m),
        EisensteinKind::EkXi => ek_xi(params.k, params.xi.as_ref().unwrap(), m),
        EisensteinKind::E2NXi => e2n_xi(params.n_level, params.xi.as_ref().unwrap(), m),
        EisensteinKind::TildeE2NXi => {
            tilde_e2n_xi(params.n_level, params.xi.as_ref().unwrap(), m)
        }
    }
}

/// Outcome of the Möbius-inversion verification for one level.
#[derive(Debug, Clone)]
pub struct MoebiusReport {
    pub n_level: u64,
    pub character_modulus: Option<u64>,
    pub truncation: usize,
    /// exact coefficient-wise equality of both identities
    pub exact: bool,
    /// largest embedded deviation over both identities (0.0 when exact)
    pub max_deviation: f64,
}

/// Verify the exact Möbius relations between the two weight-2 level
/// families through qᴹ, in both directions.
///
/// Without character (squarefree N > 1):
///   E_{2,N} = -1/φ(N) Σ_{M|N, M≠1} μ(N/M) Ẽ_{2,M},
///   Ẽ_{2,N} = -Σ_{M|N, M≠1} φ(M) E_{2,M}.
/// With a character (normalized series; the common constant cancels):
///   E_{2,N,ξ} = μ(N)/φ(N) Σ_{M|N} ξ(M) μ(M) Ẽ_{2,M,ξ},
///   Ẽ_{2,N,ξ} = ξ(N) Σ_{M|N} φ(M) E_{2,M,ξ}.
/// The first scalar is μ(N): expanding the product of the normalized Hecke
/// elements (α_p - χ_p(p)β_p)/(1-p) over p | N gives exactly
/// μ(N)/φ(N) Σ ξ(M)μ(M) times the pure translation elements, and the exact
/// coefficient check confirms it.
pub fn verify_moebius(n: u64, xi: Option<&DirichletCharacter>, m: usize) -> Result<MoebiusReport> {
    if n <= 1 && xi.is_none() {
        return Err(invalid("level N must exceed 1"));
    }
    require_squarefree(n)?;
    let (lhs1, rhs1, lhs2, rhs2);
    match xi {
        None => {
            lhs1 = e2n(n, m)?;
            let mut acc: Option<QExpansion> = None;
            for d in divisors(n) {
                if d == 1 {
                    continue;
                }
                let term = tilde_e2n(d, m)?.scale_rat(&rat(moebius(n / d) as i64));
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term)?,
                });
            }
            rhs1 = acc
                .expect("N > 1 has a divisor > 1")
                .scale_rat(&(rat(-1) / rat(euler_phi(n) as i64)));
            lhs2 = tilde_e2n(n, m)?;
            let mut acc2: Option<QExpansion> = None;
            for d in divisors(n) {
                if d == 1 {
                    continue;
                }
                let term = e2n(d, m)?.scale_rat(&rat(-(euler_phi(d) as i64)));
                acc2 = Some(match acc2 {
                    None => term,
                    Some(a) => a.add(&term)?,
                });
            }
            rhs2 = acc2.expect("N > 1 has a divisor > 1");
        }
        Some(xi) => {
            require_character_hypotheses(n, xi)?;
            let xi_n = xi.value(n as i64);
            lhs1 = e2n_xi(n, xi, m)?;
            let mut acc: Option<QExpansion> = None;
            for d in divisors(n) {
                let scalar = xi.value(d as i64).scale(&rat(moebius(d) as i64));
                let term = tilde_e2n_xi(d, xi, m)?.scale_cyc(&scalar)?;
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term)?,
                });
            }
            rhs1 = acc
                .unwrap()
                .scale_rat(&(rat(moebius(n) as i64) / rat(euler_phi(n) as i64)));
            lhs2 = tilde_e2n_xi(n, xi, m)?;
            let mut acc2: Option<QExpansion> = None;
            for d in divisors(n) {
                let term = e2n_xi(d, xi, m)?.scale_rat(&rat(euler_phi(d) as i64));
                acc2 = Some(match acc2 {
                    None => term,
                    Some(a) => a.add(&term)?,
                });
            }
            rhs2 = acc2.unwrap().scale_cyc(&xi_n)?;
        }
    }
    let exact = lhs1.eq_exact(&rhs1) && lhs2.eq_exact(&rhs2);
    let max_deviation = lhs1.max_deviation(&rhs1).max(lhs2.max_deviation(&rhs2));
    Ok(MoebiusReport {
        n_level: n,
        character_modulus: xi.map(|x| x.modulus()),
        truncation: m,
        exact,
        max_deviation,
    })
}

/// Squarefree integers in (1, bound].
pub fn squarefree_levels(bound: u64) -> Vec<u64> {
    (2..=bound)
        .filter(|&n| factorize_u64(n).is_squarefree())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::characters_mod;

    fn rats(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    fn nontrivial(u: u64) -> DirichletCharacter {
        characters_mod(u)
            .unwrap()
            .into_iter()
            .find(|c| !c.is_trivial())
            .unwrap()
    }

    #[test]
    fn level_one_anchors() {
        let e4 = e_k(4, 4).unwrap();
        assert_eq!(e4.rational_coeffs().unwrap()[..3], rats(&[1, 240, 2160])[..]);
        assert!(e4.nonholo().is_zero());
        let f = e2(4).unwrap();
        assert_eq!(
            f.rational_coeffs().unwrap()[..],
            rats(&[1, -24, -72, -96, -168])[..]
        );
        assert_eq!(f.nonholo(), &rat(-3));
        assert!(e_k(2, 4).unwrap().eq_exact(&f));
    }

    #[test]
    fn level_series_anchors() {
        let t2 = tilde_e2n(2, 2).unwrap();
        assert_eq!(t2.rational_coeffs().unwrap()[..], rats(&[-1, -24, -24])[..]);
        assert!(t2.nonholo().is_zero());
        let e22 = e2n(2, 2).unwrap();
        assert_eq!(e22.rational_coeffs().unwrap()[..], rats(&[1, 24, 24])[..]);
        assert!(e22.nonholo().is_zero());
    }

    #[test]
    fn parameter_validation() {
        assert!(e_k(3, 5).is_err());
        assert!(tilde_e2n(4, 5).is_err(), "4 is not squarefree");
        assert!(e2n(1, 5).is_err(), "N must exceed 1");
        let xi5 = nontrivial(5); // order 4: ξ(2)² = -1 ≠ 1
        assert!(e2n_xi(2, &xi5, 5).is_err());
        let xi4 = nontrivial(4);
        assert!(e2n_xi(2, &xi4, 5).is_err(), "N shares a factor with u");
        assert!(e2n_xi(3, &xi4, 5).is_ok());
    }

    #[test]
    fn character_series_coefficients() {
        let xi4 = nontrivial(4);
        let e = ek_xi(2, &xi4, 5).unwrap();
        let want = [0i64, 1, 0, -4, 0, 6];
        for (n, w) in want.iter().enumerate() {
            assert!(
                e.coefficient(n).eq_exact(&Coefficient::Cyc(Cyclotomic::from_integer(*w))),
                "n = {n}"
            );
        }
        assert_eq!(e.level(), 16);
        // coefficients vanish at indices sharing a factor with u
        let xi3 = nontrivial(3);
        let e3 = ek_xi(4, &xi3, 12).unwrap();
        for n in (3..=12).step_by(3) {
            assert!(e3.coefficient(n).is_zero(), "n = {n}");
        }
    }

    #[test]
    fn level_raise_and_tilde_identity() {
        let m = 40;
        let e2s = e2(m).unwrap();
        let raised = e2s.level_raise(2).unwrap();
        // the 1/y coefficient is unchanged by F ↦ N·F(Nz)
        assert_eq!(raised.nonholo(), &rat(-3));
        let diff = e2s.sub(&raised).unwrap();
        assert!(diff.eq_exact(&tilde_e2n(2, m).unwrap()));
        assert!(diff.nonholo().is_zero());
        assert!(e2s.level_raise(1).unwrap().eq_exact(&e2s));
    }

    #[test]
    fn hecke_composition_reaches_level_series() {
        let m = 60;
        let one = Cyclotomic::one();
        for n in [2u64, 3, 6] {
            let mut f = e2(m).unwrap();
            for p in factorize_u64(n).primes() {
                f = f.hecke_gamma_p(p, &one).unwrap();
            }
            assert!(f.eq_exact(&e2n(n, m).unwrap()), "N = {n}");
            assert!(f.nonholo().is_zero(), "1/y terms cancel for N = {n}");
        }
        // single prime: coefficient of q¹ after p = 2 is 24
        let f2 = e2(3).unwrap().hecke_gamma_p(2, &one).unwrap();
        assert_eq!(f2.rational_coeffs().unwrap()[1], rat(24));
        // constants are fixed points
        let c = QExpansion::from_parts(0, 1, BigRational::zero(), Coeffs::Rat(rats(&[7, 0, 0])));
        let cg = c.hecke_gamma_p(3, &one).unwrap();
        assert_eq!(cg.rational_coeffs().unwrap()[0], rat(7));
        assert!(cg.rational_coeffs().unwrap()[1].is_zero());
    }

    #[test]
    fn hecke_with_character_reaches_character_level_series() {
        let m = 40;
        let xi4 = nontrivial(4);
        for n in [3u64, 7, 21] {
            let mut f = ek_xi(2, &xi4, m).unwrap();
            for p in factorize_u64(n).primes() {
                f = f.hecke_gamma_p(p, &xi4.value(p as i64)).unwrap();
            }
            let target = e2n_xi(n, &xi4, m).unwrap();
            for j in 0..=m {
                assert!(f.coefficient(j).eq_exact(&target.coefficient(j)), "N = {n}, q^{j}");
            }
        }
    }

    #[test]
    fn moebius_inversion_small_levels() {
        for n in [2u64, 3, 6, 10, 30] {
            let rep = verify_moebius(n, None, 80).unwrap();
            assert!(rep.exact, "N = {n}");
            assert_eq!(rep.max_deviation, 0.0);
        }
    }

    #[test]
    fn moebius_inversion_with_character() {
        let xi4 = nontrivial(4);
        for n in [1u64, 3, 5, 15] {
            let rep = verify_moebius(n, Some(&xi4), 40).unwrap();
            assert!(rep.exact, "N = {n}, u = 4");
        }
        let xi3 = nontrivial(3);
        for n in [2u64, 10] {
            let rep = verify_moebius(n, Some(&xi3), 40).unwrap();
            assert!(rep.exact, "N = {n}, u = 3");
        }
    }

    #[test]
    fn sigma_xi_multiplicativity_in_coefficients() {
        let xi3 = nontrivial(3);
        let e = ek_xi(2, &xi3, 80).unwrap();
        let Coeffs::Cyc(cs) = e.coeffs() else { panic!() };
        for (a, b) in [(2usize, 5usize), (4, 7), (5, 8), (7, 10)] {
            assert_eq!(gcd(a as u64, b as u64), 1);
            assert_eq!(cs[a * b], cs[a].mul(&cs[b]), "({a},{b})");
        }
    }
}
