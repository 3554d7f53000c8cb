//! Local principal-series computations at a finite prime: exact Iwasawa
//! decomposition of rational 2×2 matrices, evaluation of the spherical,
//! Steinberg and new vectors, closed-form Whittaker and intertwining values,
//! and independent shell-integral oracles for both.
//!
//! p-adic numbers never appear as truncated expansions here: every input is
//! an exact rational queried through its valuation, so closed forms and
//! oracle sums agree with *exact* equality whenever the parameter s is a
//! half-integer. Values then live in ℚ(ζ)·√p^{0,1}; for other s everything
//! runs in complex doubles.

use num::complex::Complex64;
use num::{BigRational, One, ToPrimitive, Zero};

use crate::arith::cyclotomic::rational_to_f64;
use crate::arith::{self, prime_power_rat, rat, valuation, Cyclotomic};
use crate::dirichlet::LocalCharacterComponent;
use crate::error::{invalid, singular, Error, Result};

/// The complex parameter s of the induced representation, exact when 2s is
/// an integer (the only case where p^{2s} is rational) and a complex double
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SParam {
    /// s = t/2 for the stored integer t.
    Half(i64),
    Cx(Complex64),
}

impl SParam {
    /// s = t/2.
    pub fn half(t: i64) -> Self {
        SParam::Half(t)
    }

    /// Exact when 2s is an integer, complex otherwise.
    pub fn from_rational(s: &BigRational) -> Self {
        let two_s = s * rat(2);
        if two_s.is_integer() {
            SParam::Half(two_s.to_integer().to_i64().expect("2s fits in i64"))
        } else {
            SParam::Cx(Complex64::new(rational_to_f64(s), 0.0))
        }
    }

    pub fn complex(re: f64, im: f64) -> Self {
        SParam::Cx(Complex64::new(re, im))
    }

    pub fn neg(self) -> Self {
        match self {
            SParam::Half(t) => SParam::Half(-t),
            SParam::Cx(z) => SParam::Cx(-z),
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, SParam::Half(_))
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            SParam::Half(t) => Complex64::new(t as f64 / 2.0, 0.0),
            SParam::Cx(z) => z,
        }
    }
}

impl std::fmt::Display for SParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SParam::Half(t) => {
                if t % 2 == 0 {
                    write!(f, "{}", t / 2)
                } else {
                    write!(f, "{t}/2")
                }
            }
            SParam::Cx(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

/// An exact scalar of the form c·(√p)^h with c cyclotomic and h ∈ {0, 1}.
///
/// Sums of such scalars with different parity h never arise here: for fixed
/// inputs every term of a local value carries the same parity, which the
/// arithmetic asserts.
#[derive(Debug, Clone)]
pub struct ExactScalar {
    p: u64,
    half: u8,
    coeff: Cyclotomic,
}

impl ExactScalar {
    pub fn from_cyclotomic(p: u64, c: Cyclotomic) -> Self {
        ExactScalar { p, half: 0, coeff: c }
    }

    pub fn from_rational(p: u64, q: BigRational) -> Self {
        Self::from_cyclotomic(p, Cyclotomic::from_rational(q))
    }

    pub fn zero(p: u64) -> Self {
        Self::from_cyclotomic(p, Cyclotomic::zero())
    }

    /// p^{e/2} for any integer e.
    pub fn p_half_power(p: u64, e: i64) -> Self {
        let k = e.div_euclid(2);
        let r = e.rem_euclid(2) as u8;
        ExactScalar {
            p,
            half: r,
            coeff: Cyclotomic::from_rational(prime_power_rat(p, k)),
        }
    }

    fn with_parity(p: u64, half: u8, coeff: Cyclotomic) -> Self {
        ExactScalar { p, half, coeff }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.coeff.is_zero() {
            self.half = 0;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn coeff(&self) -> &Cyclotomic {
        &self.coeff
    }

    pub fn half_parity(&self) -> u8 {
        self.half
    }

    pub fn mul(&self, other: &ExactScalar) -> ExactScalar {
        let mut coeff = self.coeff.mul(&other.coeff);
        let mut half = self.half + other.half;
        let p = if self.half > 0 { self.p } else { other.p };
        if self.half > 0 && other.half > 0 {
            assert_eq!(self.p, other.p, "mixed √p bases");
        }
        if half == 2 {
            coeff = coeff.scale(&rat(p as i64));
            half = 0;
        }
        ExactScalar { p, half, coeff }.normalized()
    }

    pub fn add(&self, other: &ExactScalar) -> ExactScalar {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(self.half, other.half, "incompatible √p parities in a sum");
        if self.half == 1 {
            assert_eq!(self.p, other.p, "mixed √p bases in a sum");
        }
        ExactScalar {
            p: self.p,
            half: self.half,
            coeff: self.coeff.add(&other.coeff),
        }
        .normalized()
    }

    pub fn neg(&self) -> ExactScalar {
        ExactScalar { p: self.p, half: self.half, coeff: self.coeff.neg() }
    }

    pub fn scale(&self, q: &BigRational) -> ExactScalar {
        ExactScalar { p: self.p, half: self.half, coeff: self.coeff.scale(q) }.normalized()
    }

    pub fn inv(&self) -> Result<ExactScalar> {
        if self.is_zero() {
            return Err(singular("inverse of zero"));
        }
        let inv_c = self.coeff.inv()?;
        if self.half == 0 {
            return Ok(ExactScalar { p: self.p, half: 0, coeff: inv_c });
        }
        // (c·√p)^{-1} = (c^{-1}/p)·√p
        Ok(ExactScalar {
            p: self.p,
            half: 1,
            coeff: inv_c.scale(&prime_power_rat(self.p, -1)),
        })
    }

    pub fn embed(&self) -> Complex64 {
        let mut v = self.coeff.embed();
        if self.half == 1 {
            v *= (self.p as f64).sqrt();
        }
        v
    }

    /// The cyclotomic value, when no √p factor is present.
    pub fn to_cyclotomic(&self) -> Result<Cyclotomic> {
        if self.half != 0 {
            return Err(invalid("value carries a residual √p factor"));
        }
        Ok(self.coeff.clone())
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.is_zero() && other.is_zero() {
            return true;
        }
        self.half == other.half
            && (self.half == 0 || self.p == other.p)
            && self.coeff == other.coeff
    }
}

/// A local value: exact (half-integer s) or a complex double.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalValue {
    Exact(ExactScalar),
    Approx(Complex64),
}

impl LocalValue {
    pub fn embed(&self) -> Complex64 {
        match self {
            LocalValue::Exact(e) => e.embed(),
            LocalValue::Approx(z) => *z,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            LocalValue::Exact(e) => e.is_zero(),
            LocalValue::Approx(z) => z.norm() == 0.0,
        }
    }

    pub fn add(&self, other: &LocalValue) -> LocalValue {
        match (self, other) {
            (LocalValue::Exact(a), LocalValue::Exact(b)) => LocalValue::Exact(a.add(b)),
            (LocalValue::Approx(a), LocalValue::Approx(b)) => LocalValue::Approx(a + b),
            _ => panic!("mixed exact/approx local values"),
        }
    }

    pub fn mul(&self, other: &LocalValue) -> LocalValue {
        match (self, other) {
            (LocalValue::Exact(a), LocalValue::Exact(b)) => LocalValue::Exact(a.mul(b)),
            (LocalValue::Approx(a), LocalValue::Approx(b)) => LocalValue::Approx(a * b),
            _ => panic!("mixed exact/approx local values"),
        }
    }

    pub fn neg(&self) -> LocalValue {
        match self {
            LocalValue::Exact(a) => LocalValue::Exact(a.neg()),
            LocalValue::Approx(z) => LocalValue::Approx(-z),
        }
    }

    pub fn sub(&self, other: &LocalValue) -> LocalValue {
        self.add(&other.neg())
    }

    pub fn inv(&self) -> Result<LocalValue> {
        match self {
            LocalValue::Exact(a) => Ok(LocalValue::Exact(a.inv()?)),
            LocalValue::Approx(z) => {
                if z.norm() == 0.0 {
                    return Err(singular("inverse of zero"));
                }
                Ok(LocalValue::Approx(1.0 / z))
            }
        }
    }

    pub fn scale_rat(&self, q: &BigRational) -> LocalValue {
        match self {
            LocalValue::Exact(a) => LocalValue::Exact(a.scale(q)),
            LocalValue::Approx(z) => LocalValue::Approx(z * rational_to_f64(q)),
        }
    }

    pub fn as_exact(&self) -> Result<&ExactScalar> {
        match self {
            LocalValue::Exact(e) => Ok(e),
            LocalValue::Approx(_) => Err(invalid("value is not exact")),
        }
    }

    /// Exact equality in the exact case, |difference| ≤ tol otherwise.
    pub fn agrees_with(&self, other: &LocalValue, tol: f64) -> bool {
        match (self, other) {
            (LocalValue::Exact(a), LocalValue::Exact(b)) => a == b,
            _ => (self.embed() - other.embed()).norm() <= tol,
        }
    }
}

/// Evaluation context fixing the prime and the s-variant.
#[derive(Clone, Copy)]
struct Ctx {
    p: u64,
    s: SParam,
}

impl Ctx {
    /// p^{(e0 + e1·2s)/2}.
    fn p_pow(&self, e0: i64, e1: i64) -> LocalValue {
        match self.s {
            SParam::Half(t) => {
                LocalValue::Exact(ExactScalar::p_half_power(self.p, e0 + e1 * t))
            }
            SParam::Cx(s) => {
                let exponent = (Complex64::new(e0 as f64, 0.0) + 2.0 * e1 as f64 * s) / 2.0;
                LocalValue::Approx((exponent * (self.p as f64).ln()).exp())
            }
        }
    }

    fn cyc(&self, c: &Cyclotomic) -> LocalValue {
        match self.s {
            SParam::Half(_) => LocalValue::Exact(ExactScalar::from_cyclotomic(self.p, c.clone())),
            SParam::Cx(_) => LocalValue::Approx(c.embed()),
        }
    }

    fn rational(&self, q: &BigRational) -> LocalValue {
        match self.s {
            SParam::Half(_) => LocalValue::Exact(ExactScalar::from_rational(self.p, q.clone())),
            SParam::Cx(_) => LocalValue::Approx(Complex64::new(rational_to_f64(q), 0.0)),
        }
    }

    fn zero(&self) -> LocalValue {
        match self.s {
            SParam::Half(_) => LocalValue::Exact(ExactScalar::zero(self.p)),
            SParam::Cx(_) => LocalValue::Approx(Complex64::new(0.0, 0.0)),
        }
    }

    fn one(&self) -> LocalValue {
        self.rational(&BigRational::one())
    }
}

/// A 2×2 matrix over ℚ; the operations that need invertibility check the
/// determinant themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct GL2Rational {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl GL2Rational {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        GL2Rational { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        GL2Rational::new(rat(a), rat(b), rat(c), rat(d))
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1)
    }

    /// The Weyl element [[0, -1], [1, 0]].
    pub fn weyl() -> Self {
        Self::from_i64(0, -1, 1, 0)
    }

    /// n(b) = [[1, b], [0, 1]].
    pub fn upper_unipotent(b: BigRational) -> Self {
        GL2Rational::new(rat(1), b, rat(0), rat(1))
    }

    /// n̄(c) = [[1, 0], [c, 1]].
    pub fn lower_unipotent(c: BigRational) -> Self {
        GL2Rational::new(rat(1), rat(0), c, rat(1))
    }

    pub fn diag(a: BigRational, d: BigRational) -> Self {
        GL2Rational::new(a, rat(0), rat(0), d)
    }

    pub fn det(&self) -> BigRational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, other: &GL2Rational) -> GL2Rational {
        GL2Rational {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
    }

    pub fn inverse(&self) -> Result<GL2Rational> {
        let det = self.det();
        if det.is_zero() {
            return Err(invalid("matrix is singular"));
        }
        let inv = det.recip();
        Ok(GL2Rational {
            a: &self.d * &inv,
            b: -(&self.b * &inv),
            c: -(&self.c * &inv),
            d: &self.a * &inv,
        })
    }
}

/// The Iwasawa data g = [[a, x], [0, d]]·κ with κ integral of unit
/// determinant at p.
#[derive(Debug, Clone)]
pub struct IwasawaParts {
    pub a: BigRational,
    pub x: BigRational,
    pub d: BigRational,
    pub kappa: GL2Rational,
}

/// Decompose g = upper·κ with κ ∈ GL(2, ℤ_p), by comparing the valuations
/// of the bottom-row entries and clearing with integral column operations.
pub fn iwasawa_padic(g: &GL2Rational, p: u64) -> Result<IwasawaParts> {
    let det = g.det();
    if det.is_zero() {
        return Err(invalid("Iwasawa decomposition needs a nonsingular matrix"));
    }
    // already in GL(2, ℤ_p): nothing to do
    let integral = [&g.a, &g.b, &g.c, &g.d]
        .iter()
        .all(|e| e.is_zero() || valuation(e, p) >= 0);
    if integral && valuation(&det, p) == 0 {
        return Ok(IwasawaParts { a: rat(1), x: rat(0), d: rat(1), kappa: g.clone() });
    }
    // right-multiply by elements of K to clear the bottom-left entry
    let (upper, kappa_inv) = if g.c.is_zero() {
        (g.clone(), GL2Rational::identity())
    } else if g.d.is_zero() {
        let swap = GL2Rational::from_i64(0, 1, 1, 0);
        (g.mul(&swap), swap)
    } else {
        let vc = valuation(&g.c, p);
        let vd = valuation(&g.d, p);
        if vc >= vd {
            let t = &g.c / &g.d;
            let r = GL2Rational::new(rat(1), rat(0), -t, rat(1));
            (g.mul(&r), r)
        } else {
            let t = &g.d / &g.c;
            let swap = GL2Rational::from_i64(0, 1, 1, 0);
            let r = GL2Rational::new(rat(1), rat(0), -t, rat(1));
            (g.mul(&swap).mul(&r), swap.mul(&r))
        }
    };
    debug_assert!(upper.c.is_zero());
    let kappa = kappa_inv.inverse()?;
    debug_assert_eq!(valuation(&kappa.det(), p), 0);
    Ok(IwasawaParts { a: upper.a, x: upper.b, d: upper.d, kappa })
}

/// The three distinguished vectors of the local induced representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorKind {
    Spherical,
    Steinberg,
    Newvector,
}

impl std::fmt::Display for VectorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            VectorKind::Spherical => "spherical",
            VectorKind::Steinberg => "steinberg",
            VectorKind::Newvector => "newvector",
        };
        write!(f, "{name}")
    }
}

/// A distinguished vector of the principal series at a finite prime,
/// together with its parameter s and character component. As a flat
/// section, its restriction to GL(2, ℤ_p) is independent of s.
#[derive(Debug, Clone)]
pub struct LocalVector {
    p: u64,
    kind: VectorKind,
    s: SParam,
    chi: LocalCharacterComponent,
}

impl LocalVector {
    pub fn with_character(
        p: u64,
        kind: VectorKind,
        s: SParam,
        chi: LocalCharacterComponent,
    ) -> Result<Self> {
        if chi.prime() != p {
            return Err(invalid("character component belongs to a different prime"));
        }
        match kind {
            VectorKind::Spherical | VectorKind::Steinberg => {
                if chi.is_ramified() {
                    return Err(invalid(
                        "spherical and Steinberg vectors require an unramified character",
                    ));
                }
            }
            VectorKind::Newvector => {
                if !chi.is_ramified() {
                    return Err(invalid("the new vector requires a ramified character"));
                }
            }
        }
        Ok(LocalVector { p, kind, s, chi })
    }

    pub fn spherical(p: u64, s: SParam) -> Self {
        LocalVector { p, kind: VectorKind::Spherical, s, chi: LocalCharacterComponent::trivial(p) }
    }

    pub fn steinberg(p: u64, s: SParam) -> Self {
        LocalVector { p, kind: VectorKind::Steinberg, s, chi: LocalCharacterComponent::trivial(p) }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn kind(&self) -> VectorKind {
        self.kind
    }

    pub fn s(&self) -> SParam {
        self.s
    }

    pub fn character(&self) -> &LocalCharacterComponent {
        &self.chi
    }

    /// The same vector at a different parameter (flat section).
    pub fn at(&self, s: SParam) -> Self {
        LocalVector { s, ..self.clone() }
    }

    /// The companion vector at -s with the inverse character (the target of
    /// the intertwining operator).
    pub fn dual_at_minus_s(&self) -> Self {
        LocalVector { p: self.p, kind: self.kind, s: self.s.neg(), chi: self.chi.inverse() }
    }

    /// The exponent n with the vector invariant under the depth-p^n
    /// congruence subgroup: 0, 1, 2a(χ) for the three kinds.
    pub fn invariance_exponent(&self) -> u32 {
        match self.kind {
            VectorKind::Spherical => 0,
            VectorKind::Steinberg => 1,
            VectorKind::Newvector => 2 * self.chi.cond_exp(),
        }
    }

    fn ctx(&self) -> Ctx {
        Ctx { p: self.p, s: self.s }
    }
}

/// Evaluate a distinguished vector at a nonsingular rational matrix:
/// Iwasawa-reduce, apply the Borel equivariance factor χ(a/d)|a/d|^{s+1/2},
/// then the K-value rule of the vector.
pub fn evaluate_vector(f: &LocalVector, g: &GL2Rational) -> Result<LocalValue> {
    let ctx = f.ctx();
    let p = f.p;
    let iw = iwasawa_padic(g, p)?;
    let ratio = &iw.a / &iw.d;
    let v = valuation(&ratio, p);
    // |a/d|^{s + 1/2} = p^{-v(2s+1)/2}
    let b_factor = ctx.p_pow(-v, -v).mul(&ctx.cyc(&f.chi.eval(&ratio)));

    let k = &iw.kappa;
    let kval = match f.kind {
        VectorKind::Spherical => ctx.one(),
        VectorKind::Steinberg => {
            // 1 on the congruence subgroup side, -1/q on the Weyl side
            let in_gamma0 = if k.c.is_zero() {
                true
            } else if k.d.is_zero() {
                false
            } else {
                valuation(&k.c, p) - valuation(&k.d, p) >= 1
            };
            if in_gamma0 {
                ctx.one()
            } else {
                ctx.rational(&-prime_power_rat(p, -1))
            }
        }
        VectorKind::Newvector => {
            let a = f.chi.cond_exp() as i64;
            let vcd = if k.c.is_zero() || k.d.is_zero() {
                None
            } else {
                Some(valuation(&k.c, p) - valuation(&k.d, p))
            };
            match vcd {
                Some(vcd) if vcd == a => {
                    // κ = [[detκ/d, B], [0, d]]·n̄(u·p^a): the value is the
                    // Borel factor at detκ/d² times χ(u)^{-1} χ(p)^{-a}.
                    let borel = &k.det() / (&k.d * &k.d);
                    let u_part = (&k.c / &k.d) * prime_power_rat(p, -a);
                    let chi_val = f
                        .chi
                        .eval(&borel)
                        .mul(&f.chi.unit_value(&u_part).inv()?)
                        .mul(&f.chi.satake().pow(-a)?);
                    ctx.cyc(&chi_val)
                }
                _ => ctx.zero(),
            }
        }
    };
    Ok(b_factor.mul(&kval))
}

/// ψ_p(x) = exp(2πi {x}_p) as an exact root of unity.
pub fn psi_p(x: &BigRational, p: u64) -> Cyclotomic {
    let (order, exp) = psi_p_exponent(x, p);
    Cyclotomic::root_of_unity(order, exp as i64)
}

/// ψ_p(x) = ζ_order^exp without constructing the cyclotomic element.
pub fn psi_p_exponent(x: &BigRational, p: u64) -> (u64, u64) {
    if x.is_zero() {
        return (1, 0);
    }
    let v = valuation(x, p);
    if v >= 0 {
        return (1, 0);
    }
    let k = (-v) as u32;
    let (_, c) = arith::unit_mod_pa(x, p, k);
    (p.pow(k), c)
}

/// The closed-form Whittaker value (W_s^α f)(diag(y, 1)).
///
/// Spherical and Steinberg vectors vanish for v(αy) < 0; the new vector is
/// supported exactly on v(αy) = 0, where its value is
/// q^{-a(2s+1)} |y|^{1/2-s} χ(-α) ε(0, χ, ψ).
pub fn whittaker_closed(
    f: &LocalVector,
    alpha: &BigRational,
    y: &BigRational,
) -> Result<LocalValue> {
    if alpha.is_zero() || y.is_zero() {
        return Err(invalid("whittaker_closed: α and y must be nonzero"));
    }
    let ctx = f.ctx();
    let p = f.p;
    let va = valuation(alpha, p);
    let vy = valuation(y, p);
    match f.kind {
        VectorKind::Newvector => {
            if va + vy != 0 {
                return Ok(ctx.zero());
            }
            let a = f.chi.cond_exp() as i64;
            // q^{-a(2s+1)} = p^{(-2a - 2a·2s)/2}
            let power = ctx.p_pow(-2 * a, -2 * a);
            let ypow = ctx.p_pow(-vy, vy); // |y|^{1/2-s}
            let chi_val = f.chi.eval(&-alpha.clone()).mul(&f.chi.epsilon_factor());
            Ok(power.mul(&ypow).mul(&ctx.cyc(&chi_val)))
        }
        VectorKind::Spherical | VectorKind::Steinberg => {
            if va + vy < 0 {
                return Ok(ctx.zero());
            }
            let beta = f.chi.beta();
            let beta_inv = beta
                .inv()
                .map_err(|_| Error::Singular("character square is ramified".into()))?;
            // denominator 1 - β^{-1} q^{2s}
            let denom = ctx.one().sub(&ctx.cyc(&beta_inv).mul(&ctx.p_pow(0, 2)));
            if denom.is_zero() || (!f.s.is_exact() && denom.embed().norm() < 1e-12) {
                return Err(singular("q^{2s} equals χ²(p): the closed form degenerates"));
            }
            let denom_inv = denom.inv()?;
            let chi2_alpha = ctx.cyc(&f.chi.eval_pow(alpha, 2));
            let alpha_pow = ctx.p_pow(0, -2 * va); // |α|^{2s}
            let chi_y = ctx.cyc(&f.chi.eval(y));
            let chi_y_inv = ctx.cyc(&f.chi.eval_pow(y, -1));
            let y_plus = ctx.p_pow(-vy, -vy); // |y|^{1/2+s}
            let y_minus = ctx.p_pow(-vy, vy); // |y|^{1/2-s}
            let lead = chi2_alpha.mul(&alpha_pow).mul(&chi_y).mul(&y_plus);
            let one_minus_beta_q = ctx.one().sub(&ctx.cyc(&beta).mul(&ctx.p_pow(-2, -2)));
            match f.kind {
                VectorKind::Spherical => {
                    // (lead - β^{-1}q^{2s} χ(y)^{-1}|y|^{1/2-s})(1-βq^{-2s-1})/denom
                    let second = ctx
                        .cyc(&beta_inv)
                        .mul(&ctx.p_pow(0, 2))
                        .mul(&chi_y_inv)
                        .mul(&y_minus);
                    Ok(lead.sub(&second).mul(&one_minus_beta_q).mul(&denom_inv))
                }
                VectorKind::Steinberg => {
                    // ((1-βq^{-2s-1})·lead - (1-β^{-1}q^{2s-1})·χ(y)^{-1}|y|^{1/2-s})/denom
                    let first = one_minus_beta_q.mul(&lead);
                    let one_minus_binv_q =
                        ctx.one().sub(&ctx.cyc(&beta_inv).mul(&ctx.p_pow(-2, 2)));
                    let second = one_minus_binv_q.mul(&chi_y_inv).mul(&y_minus);
                    Ok(first.sub(&second).mul(&denom_inv))
                }
                VectorKind::Newvector => unreachable!(),
            }
        }
    }
}

/// Accumulates exact monomial-weighted terms c·ζ_L^e in exponent space,
/// reducing once at the end; the complex variant sums doubles directly.
enum Accumulator {
    Exact {
        p: u64,
        order: u64,
        parity: Option<u8>,
        raw: Vec<BigRational>,
    },
    Approx(Complex64),
}

impl Accumulator {
    fn new(exact: bool, p: u64, order: u64) -> Self {
        if exact {
            Accumulator::Exact {
                p,
                order,
                parity: None,
                raw: vec![BigRational::zero(); order as usize],
            }
        } else {
            Accumulator::Approx(Complex64::new(0.0, 0.0))
        }
    }

    /// Add value·ζ_{phase_order}^{phase_exp}·weight.
    fn push(&mut self, value: &LocalValue, phase: (u64, u64), weight: &BigRational) {
        let (phase_order, phase_exp) = phase;
        match self {
            Accumulator::Exact { order, parity, raw, .. } => {
                let LocalValue::Exact(scalar) = value else {
                    panic!("exact accumulator fed an approximate value")
                };
                if scalar.is_zero() {
                    return;
                }
                match parity {
                    None => *parity = Some(scalar.half_parity()),
                    Some(h) => assert_eq!(*h, scalar.half_parity(), "mixed √p parities"),
                }
                let coeff = scalar.coeff();
                let cd = coeff.order();
                assert!(
                    *order % cd == 0 && *order % phase_order == 0,
                    "accumulator order too small"
                );
                let shift = phase_exp % phase_order * (*order / phase_order);
                for (i, ci) in coeff.coeffs().iter().enumerate() {
                    if ci.is_zero() {
                        continue;
                    }
                    let e = (i as u64 * (*order / cd) + shift) % *order;
                    raw[e as usize] += ci * weight;
                }
            }
            Accumulator::Approx(acc) => {
                let angle =
                    2.0 * std::f64::consts::PI * phase_exp as f64 / phase_order as f64;
                *acc += value.embed()
                    * Complex64::new(angle.cos(), angle.sin())
                    * rational_to_f64(weight);
            }
        }
    }

    fn finish(self) -> LocalValue {
        match self {
            Accumulator::Exact { p, order, parity, raw } => {
                let coeff = Cyclotomic::from_raw(order, raw);
                LocalValue::Exact(ExactScalar::with_parity(p, parity.unwrap_or(0), coeff))
            }
            Accumulator::Approx(z) => LocalValue::Approx(z),
        }
    }
}

struct ShellPlan {
    m_max: i64,
    extra: i64,
}

/// One pass of the shell-sampled Whittaker integral
/// ∫_{v(b) ≥ -m_max} f(w n(b) diag(y,1)) ψ(-αb) db.
///
/// Per shell v(b) = -m the integrand depends on the unit part of b only
/// through the character conductor (the compact part of the decomposition)
/// and through ψ, so sampling units modulo p^{max(1, a(χ), m - v(α)) + extra}
/// integrates exactly; the same constancy argument fixes the refinement of
/// the ball v(b) ≥ 0.
fn whittaker_sum(
    f: &LocalVector,
    alpha: &BigRational,
    y: &BigRational,
    plan: &ShellPlan,
) -> Result<LocalValue> {
    let p = f.p;
    let va = valuation(alpha, p);
    let vy = valuation(y, p);
    let a_cond = f.chi.cond_exp() as i64;
    // largest additive-character order that can appear
    let max_psi = (plan.m_max - va).max(-va).max(1) as u32;
    let mut order = arith::lcm(f.chi.satake().order(), p.pow(max_psi));
    if f.chi.is_ramified() {
        order = arith::lcm(order, f.chi.epsilon_factor().order());
    }
    let mut acc = Accumulator::new(f.s.is_exact(), p, order);

    // ball v(b) ≥ 0
    let j0 = (0i64.max(vy).max(-va) + plan.extra).max(0) as u32;
    let weight0 = prime_power_rat(p, -(j0 as i64));
    for i in 0..p.pow(j0) {
        let b = rat(i as i64);
        let point = GL2Rational::new(rat(0), rat(-1), y.clone(), b.clone());
        let val = evaluate_vector(f, &point)?;
        let phase = psi_p_exponent(&(-alpha.clone() * &b), p);
        acc.push(&val, phase, &weight0);
    }

    // shells v(b) = -m
    for m in 1..=plan.m_max {
        let j = 1i64.max(a_cond).max(m - va) + plan.extra;
        let weight = prime_power_rat(p, m - j);
        let pm = prime_power_rat(p, -m);
        for v in 1..p.pow(j as u32) {
            if v % p == 0 {
                continue;
            }
            let b = rat(v as i64) * &pm;
            let point = GL2Rational::new(rat(0), rat(-1), y.clone(), b.clone());
            let val = evaluate_vector(f, &point)?;
            let phase = psi_p_exponent(&(-alpha.clone() * &b), p);
            acc.push(&val, phase, &weight);
        }
    }
    Ok(acc.finish())
}

/// A shell bound beyond which the Whittaker sum has provably stabilized for
/// the given data; the oracle still double-checks.
pub fn default_whittaker_shells(f: &LocalVector, alpha: &BigRational, y: &BigRational) -> i64 {
    let p = f.p;
    valuation(alpha, p).max(0) + valuation(y, p).max(0) + f.chi.cond_exp() as i64 + 2
}

/// The stabilized-integral Whittaker oracle: shell-samples the unipotent
/// integral with exact coset weights, then validates by re-running with two
/// more shells and one more refinement level; any disagreement is reported
/// as non-stabilization instead of returning a value.
pub fn whittaker_oracle(
    f: &LocalVector,
    alpha: &BigRational,
    y: &BigRational,
    m_max: i64,
    refinement: i64,
) -> Result<LocalValue> {
    if alpha.is_zero() || y.is_zero() {
        return Err(invalid("whittaker_oracle: α and y must be nonzero"));
    }
    if m_max < 0 || refinement < 0 {
        return Err(invalid("whittaker_oracle: bounds must be nonnegative"));
    }
    let base = whittaker_sum(f, alpha, y, &ShellPlan { m_max, extra: refinement })?;
    let tol = 1e-12 * (1.0 + base.embed().norm());
    // probe the two truncation knobs separately: more shells, finer cosets
    let deeper = whittaker_sum(f, alpha, y, &ShellPlan { m_max: m_max + 2, extra: refinement })?;
    if !base.agrees_with(&deeper, tol) {
        return Err(Error::NotConverged(format!(
            "whittaker shell sum not stabilized at m_max = {m_max}: {} vs {}",
            base.embed(),
            deeper.embed()
        )));
    }
    let finer = whittaker_sum(f, alpha, y, &ShellPlan { m_max, extra: refinement + 1 })?;
    if !base.agrees_with(&finer, tol) {
        return Err(Error::NotConverged(format!(
            "whittaker shell sum changed under coset refinement {refinement}: {} vs {}",
            base.embed(),
            finer.embed()
        )));
    }
    Ok(base)
}

/// The closed-form intertwining constant λ with A_s f = λ·(dual vector at
/// -s): (1-βq^{-2s-1})/(1-βq^{-2s}) on the spherical vector and
/// -q^{-1}(1-βq^{-2s+1})/(1-βq^{-2s}) on the Steinberg vector, where
/// β = χ²(p).
pub fn intertwining_closed(f: &LocalVector) -> Result<(LocalValue, LocalVector)> {
    let ctx = f.ctx();
    let beta = f.chi.beta();
    if beta.is_zero() {
        return Err(invalid(
            "no closed-form intertwining constant for a ramified character square",
        ));
    }
    let denom = ctx.one().sub(&ctx.cyc(&beta).mul(&ctx.p_pow(0, -2)));
    if denom.is_zero() || (!f.s.is_exact() && denom.embed().norm() < 1e-12) {
        return Err(singular("q^{2s} equals χ²(p): the intertwining constant has a pole"));
    }
    let denom_inv = denom.inv()?;
    let lambda = match f.kind {
        VectorKind::Spherical => {
            let num = ctx.one().sub(&ctx.cyc(&beta).mul(&ctx.p_pow(-2, -2)));
            num.mul(&denom_inv)
        }
        VectorKind::Steinberg => {
            let num = ctx.one().sub(&ctx.cyc(&beta).mul(&ctx.p_pow(2, -2)));
            num.mul(&denom_inv).scale_rat(&-prime_power_rat(f.p, -1))
        }
        VectorKind::Newvector => {
            return Err(invalid(
                "no closed-form intertwining constant is provided for the new vector",
            ))
        }
    };
    Ok((lambda, f.dual_at_minus_s()))
}

/// Smallest T such that v_p(t) ≥ T makes g^{-1}·(I + t·E)·g integral with
/// bottom-left entry divisible by p^{n_f}, for E one of the two nilpotent
/// generators.
fn conjugation_threshold(g: &GL2Rational, e_upper: bool, n_f: u32, p: u64) -> Result<i64> {
    let ginv = g.inverse()?;
    let e = if e_upper {
        GL2Rational::from_i64(0, 1, 0, 0)
    } else {
        GL2Rational::from_i64(0, 0, 1, 0)
    };
    let x = ginv.mul(&e).mul(g);
    let need = |entry: &BigRational, depth: i64| -> i64 {
        if entry.is_zero() {
            0
        } else {
            depth - valuation(entry, p)
        }
    };
    let mut t = 0i64;
    t = t.max(need(&x.a, 0));
    t = t.max(need(&x.b, 0));
    t = t.max(need(&x.d, 0));
    t = t.max(need(&x.c, n_f as i64));
    Ok(t)
}

struct TruncationPlan {
    n_shells: i64,
    extra: i64,
}

/// One pass of the truncated intertwining integral over v(b) > -N plus the
/// geometric correction term (1-q^{-1}) β^N q^{-2Ns}/(1-βq^{-2s}) f(g).
fn intertwining_sum(
    f: &LocalVector,
    g: &GL2Rational,
    plan: &TruncationPlan,
) -> Result<LocalValue> {
    let p = f.p;
    let ctx = f.ctx();
    let n_f = f.invariance_exponent();
    let t12 = conjugation_threshold(g, true, n_f, p)?;
    let mut order = f.chi.satake().order();
    if f.chi.is_ramified() {
        order = arith::lcm(order, f.chi.epsilon_factor().order());
    }
    let mut acc = Accumulator::new(f.s.is_exact(), p, order);

    // ball v(b) ≥ 0
    let j0 = (t12 + plan.extra).max(0) as u32;
    let weight0 = prime_power_rat(p, -(j0 as i64));
    for i in 0..p.pow(j0) {
        let point = GL2Rational::weyl()
            .mul(&GL2Rational::upper_unipotent(rat(i as i64)))
            .mul(g);
        let val = evaluate_vector(f, &point)?;
        acc.push(&val, (1, 0), &weight0);
    }
    // shells v(b) = -m for m = 1..N-1
    for m in 1..plan.n_shells {
        let j = m + t12 + plan.extra;
        let weight = prime_power_rat(p, m - j);
        let pm = prime_power_rat(p, -m);
        for v in 1..p.pow(j as u32) {
            if v % p == 0 {
                continue;
            }
            let b = rat(v as i64) * &pm;
            let point = GL2Rational::weyl().mul(&GL2Rational::upper_unipotent(b)).mul(g);
            let val = evaluate_vector(f, &point)?;
            acc.push(&val, (1, 0), &weight);
        }
    }
    let integral = acc.finish();

    // correction (1-q^{-1})·β^N q^{-2Ns}/(1-βq^{-2s})·f(g)
    let beta = f.chi.beta();
    if beta.is_zero() {
        return Err(invalid(
            "the stabilized intertwining integral needs an unramified character square",
        ));
    }
    let denom = ctx.one().sub(&ctx.cyc(&beta).mul(&ctx.p_pow(0, -2)));
    if denom.is_zero() || (!f.s.is_exact() && denom.embed().norm() < 1e-12) {
        return Err(singular("q^{2s} equals χ²(p): the stabilized integral has a pole"));
    }
    let n = plan.n_shells;
    let correction = ctx
        .rational(&(BigRational::one() - prime_power_rat(p, -1)))
        .mul(&ctx.cyc(&beta.pow(n)?))
        .mul(&ctx.p_pow(0, -2 * n))
        .mul(&denom.inv()?)
        .mul(&evaluate_vector(f, g)?);
    Ok(integral.add(&correction))
}

/// A shell bound beyond which the truncated intertwining integral has
/// provably stabilized at the given point; the oracle still double-checks.
pub fn default_intertwining_shells(f: &LocalVector, g: &GL2Rational) -> Result<i64> {
    let t21 = conjugation_threshold(g, false, f.invariance_exponent(), f.p)?;
    Ok(t21 + f.chi.cond_exp() as i64 + 2)
}

/// The stabilized intertwining oracle: the truncated unipotent integral
/// plus its geometric correction term, independent of the shell bound once
/// the bound is large enough. Validated by re-running with one more shell.
pub fn intertwining_oracle(f: &LocalVector, g: &GL2Rational, n_shells: i64) -> Result<LocalValue> {
    if n_shells < 1 {
        return Err(invalid("intertwining_oracle: the shell bound must be positive"));
    }
    let base = intertwining_sum(f, g, &TruncationPlan { n_shells, extra: 1 })?;
    let check = intertwining_sum(f, g, &TruncationPlan { n_shells: n_shells + 1, extra: 1 })?;
    if !base.agrees_with(&check, 1e-12 * (1.0 + base.embed().norm())) {
        return Err(Error::NotConverged(format!(
            "intertwining integral not stabilized at N = {n_shells}: {} vs {}",
            base.embed(),
            check.embed()
        )));
    }
    Ok(base)
}
