//! Exact arithmetic in cyclotomic fields ℚ(ζ_d).
//!
//! An element is stored as a polynomial in ζ_d of degree < φ(d), reduced
//! modulo the d-th cyclotomic polynomial Φ_d. The reduction is canonical,
//! so two elements of the same order are equal as field elements exactly
//! when their coefficient vectors agree; elements of different orders are
//! compared after lifting both into ℚ(ζ_lcm).
//!
//! Φ_d is computed by iterated exact division of x^d - 1 by the Φ_e for the
//! proper divisors e of d, and memoized process-wide.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use super::{divisors, euler_phi, lcm};
use crate::error::{singular, Result};

fn phi_cache() -> &'static Mutex<HashMap<u64, Vec<BigInt>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<BigInt>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Dense coefficient vector (low degree first) of Φ_d, a monic integer
/// polynomial of degree φ(d).
pub fn cyclotomic_polynomial(d: u64) -> Vec<BigInt> {
    assert!(d >= 1);
    if let Some(p) = phi_cache().lock().unwrap().get(&d) {
        return p.clone();
    }
    // x^d - 1
    let mut num = vec![BigInt::zero(); d as usize + 1];
    num[0] = -BigInt::one();
    num[d as usize] = BigInt::one();
    for e in divisors(d) {
        if e == d {
            continue;
        }
        let phi_e = cyclotomic_polynomial(e);
        num = int_poly_div_exact(&num, &phi_e);
    }
    debug_assert_eq!(num.len() as u64 - 1, euler_phi(d));
    phi_cache().lock().unwrap().insert(d, num.clone());
    num
}

/// Exact division of integer polynomials with monic divisor.
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    assert!(dn >= dd);
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for i in (dd..=dn).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut rem[i], BigInt::zero());
        for (j, dj) in den.iter().enumerate().take(dd) {
            if !dj.is_zero() {
                rem[i - dd + j] -= &c * dj;
            }
        }
        quot[i - dd] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "division not exact");
    quot
}

/// An exact element of ℚ(ζ_d).
#[derive(Debug, Clone)]
pub struct Cyclotomic {
    order: u64,
    /// Length φ(order); coefficient of ζ^i at index i.
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic { order: 1, coeffs: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        Cyclotomic { order: 1, coeffs: vec![BigRational::one()] }
    }

    pub fn from_rational(q: BigRational) -> Self {
        Cyclotomic { order: 1, coeffs: vec![q] }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(super::rat(n))
    }

    /// ζ_d^e (any integer exponent e, reduced mod d).
    pub fn root_of_unity(d: u64, e: i64) -> Self {
        assert!(d >= 1);
        let e = e.rem_euclid(d as i64) as usize;
        let mut raw = vec![BigRational::zero(); d as usize];
        raw[e] = BigRational::one();
        Self::reduce(d, raw)
    }

    /// Canonical element from coefficients of ζ^0..ζ^{d-1} (length ≤ d).
    /// Exposed within the crate so that long sums of monomials (Gauss sums,
    /// shell integrals) can accumulate in exponent space and reduce once.
    pub(crate) fn from_raw(order: u64, raw: Vec<BigRational>) -> Self {
        assert!(raw.len() <= order as usize);
        Self::reduce(order, raw)
    }

    fn reduce(order: u64, mut raw: Vec<BigRational>) -> Self {
        let phi = euler_phi(order) as usize;
        let modulus = cyclotomic_polynomial(order);
        let deg = modulus.len() - 1;
        debug_assert_eq!(deg, phi);
        // Polynomial remainder modulo the monic Φ_d, skipping zero divisor
        // coefficients (Φ_{p^k} in particular is very sparse).
        if raw.len() < phi {
            raw.resize(phi, BigRational::zero());
        }
        for i in (phi..raw.len()).rev() {
            if raw[i].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut raw[i], BigRational::zero());
            for (j, mj) in modulus.iter().enumerate().take(deg) {
                if !mj.is_zero() {
                    let sub = &c * BigRational::from_integer(mj.clone());
                    raw[i - deg + j] -= sub;
                }
            }
        }
        raw.truncate(phi);
        Cyclotomic { order, coeffs: raw }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The element as a rational number, if it lies in ℚ.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().map(|q| q.is_one()).unwrap_or(false)
    }

    /// Lift into ℚ(ζ_m) for an order m divisible by the current order,
    /// substituting ζ_d ↦ ζ_m^{m/d}.
    pub fn lift(&self, m: u64) -> Self {
        assert!(m % self.order == 0, "lift target must be a multiple of the order");
        if m == self.order {
            return self.clone();
        }
        let step = (m / self.order) as usize;
        let mut raw = vec![BigRational::zero(); m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                raw[(i * step) % m as usize] = c.clone();
            }
        }
        Self::reduce(m, raw)
    }

    fn common_order(&self, other: &Self) -> u64 {
        lcm(self.order, other.order)
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.common_order(other);
        let a = self.lift(m);
        let b = other.lift(m);
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| x + y)
            .collect();
        Cyclotomic { order: m, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.common_order(other);
        let a = self.lift(m);
        let b = other.lift(m);
        // Convolution with exponents folded modulo m, then canonical reduction.
        let mut raw = vec![BigRational::zero(); m as usize];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                raw[(i + j) % m as usize] += x * y;
            }
        }
        Self::reduce(m, raw)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Galois conjugate ζ ↦ ζ^j for j coprime to the order.
    pub fn galois(&self, j: u64) -> Self {
        let d = self.order;
        assert_eq!(super::gcd(j, d), 1, "galois exponent must be coprime to the order");
        let mut raw = vec![BigRational::zero(); d as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                raw[(i as u64 * j % d) as usize] += c;
            }
        }
        Self::reduce(d, raw)
    }

    /// Complex conjugation (= the Galois map ζ ↦ ζ^{-1}).
    pub fn conj(&self) -> Self {
        if self.order == 1 {
            return self.clone();
        }
        self.galois(self.order - 1)
    }

    /// Multiplicative inverse via the product of all nontrivial Galois
    /// conjugates divided by the field norm.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(singular("cyclotomic inverse of zero"));
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(q.recip()));
        }
        let d = self.order;
        let mut prod = Cyclotomic::one();
        for j in 2..=d {
            if super::gcd(j, d) == 1 {
                prod = prod.mul(&self.galois(j));
            }
        }
        let norm = self.mul(&prod);
        let n = norm
            .as_rational()
            .expect("product of all conjugates is rational");
        assert!(!n.is_zero());
        Ok(prod.scale(&n.recip()))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::one());
        }
        let base = if e > 0 { self.clone() } else { self.inv()? };
        let mut acc = Self::one();
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            n >>= 1;
        }
        Ok(acc)
    }

    /// Numerical embedding ζ_d ↦ exp(2πi/d).
    pub fn embed(&self) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = 2.0 * std::f64::consts::PI * i as f64 / self.order as f64;
            sum += rational_to_f64(c) * Complex64::new(angle.cos(), angle.sin());
        }
        sum
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of floats when the parts overflow.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY * sign_f(q.numer()));
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

fn sign_f(n: &BigInt) -> f64 {
    if n.is_negative() {
        -1.0
    } else {
        1.0
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let m = self.common_order(other);
        self.lift(m).coeffs == other.lift(m).coeffs
    }
}

impl Eq for Cyclotomic {}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let unit_coeff = mag.is_one();
            if i == 0 {
                write!(f, "{mag}")?;
            } else {
                if !unit_coeff {
                    write!(f, "{mag}*")?;
                }
                if i == 1 {
                    write!(f, "z{}", self.order)?;
                } else {
                    write!(f, "z{}^{}", self.order, i)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    #[test]
    fn cyclotomic_polynomials() {
        let as_i64 = |v: Vec<BigInt>| -> Vec<i64> { v.iter().map(|c| c.to_i64().unwrap()).collect() };
        assert_eq!(as_i64(cyclotomic_polynomial(1)), vec![-1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(2)), vec![1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(3)), vec![1, 1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(4)), vec![1, 0, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(6)), vec![1, -1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(12)), vec![1, 0, -1, 0, 1]);
        // Φ_105 is the first with a coefficient of magnitude 2.
        let c105 = cyclotomic_polynomial(105);
        assert!(c105.iter().any(|c| c.abs() == BigInt::from(2)));
    }

    #[test]
    fn fourth_and_sixth_roots() {
        let i = Cyclotomic::root_of_unity(4, 1);
        assert_eq!(i.mul(&i), Cyclotomic::from_integer(-1));
        // ζ_6² = ζ_6 - 1 from the minimal polynomial x² - x + 1.
        let z6 = Cyclotomic::root_of_unity(6, 1);
        assert_eq!(z6.mul(&z6), z6.sub(&Cyclotomic::one()));
    }

    #[test]
    fn embedding_examples() {
        let z3 = Cyclotomic::root_of_unity(3, 1);
        let g = z3.sub(&z3.mul(&z3)); // ζ_3 - ζ_3²
        let e = g.embed();
        assert!((e.re - 0.0).abs() < 1e-14);
        assert!((e.im - 3.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn embedding_is_ring_homomorphism() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let d1 = rng.gen_range(1u64..16);
            let d2 = rng.gen_range(1u64..16);
            let mut rand_elt = |d: u64| {
                let phi = euler_phi(d) as usize;
                let coeffs: Vec<BigRational> = (0..phi)
                    .map(|_| ratio(rng.gen_range(-4i64..5), rng.gen_range(1i64..4)))
                    .collect();
                Cyclotomic { order: d, coeffs }
            };
            let x = rand_elt(d1);
            let y = rand_elt(d2);
            let sum = x.add(&y).embed();
            let prod = x.mul(&y).embed();
            assert!((sum - (x.embed() + y.embed())).norm() < 1e-12);
            assert!((prod - (x.embed() * y.embed())).norm() < 1e-12);
        }
    }

    #[test]
    fn equality_matches_embedding() {
        // The same number expressed at different orders compares equal.
        let one_a = Cyclotomic::root_of_unity(3, 3);
        let one_b = Cyclotomic::root_of_unity(4, 4);
        assert_eq!(one_a, one_b);
        // ζ_6 = -ζ_3² lifted across orders.
        let z6 = Cyclotomic::root_of_unity(6, 1);
        let alt = Cyclotomic::root_of_unity(3, 2).neg();
        assert_eq!(z6, alt);
        assert!((z6.embed() - alt.embed()).norm() < 1e-14);
    }

    #[test]
    fn inverse_and_conjugate() {
        let z5 = Cyclotomic::root_of_unity(5, 2);
        let x = z5.scale(&ratio(3, 7)).add(&Cyclotomic::from_integer(2));
        let xi = x.inv().unwrap();
        assert!(x.mul(&xi).is_one());
        // conj agrees with the complex conjugate under the embedding
        let c = x.conj().embed();
        assert!((c - x.embed().conj()).norm() < 1e-13);
        // |ζ|² = 1 for any root of unity
        assert!(z5.mul(&z5.conj()).is_one());
    }

    #[test]
    fn powers() {
        let z8 = Cyclotomic::root_of_unity(8, 1);
        assert_eq!(z8.pow(8).unwrap(), Cyclotomic::one());
        assert_eq!(z8.pow(-1).unwrap(), Cyclotomic::root_of_unity(8, 7));
        assert_eq!(z8.pow(4).unwrap(), Cyclotomic::from_integer(-1));
    }
}
