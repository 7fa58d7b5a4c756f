//! Exact integer arithmetic at an odd prime: valuations, the unit filtration
//! `U_m = 1 + p^m Z`, the p-derivation on constants, the carry polynomial
//! `C_p`, and precision-tracked p-adic constants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// The odd prime every computation is relative to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeContext {
    p: u64,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p % 2 == 0 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        Ok(PrimeContext { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn big(&self) -> BigInt {
        BigInt::from(self.p)
    }

    /// p^e as a big integer.
    pub fn pow(&self, e: u32) -> BigInt {
        self.big().pow(e)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A p-adic valuation, +infinity for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn at_least(&self, bound: u64) -> bool {
        match self {
            Valuation::Finite(v) => *v >= bound,
            Valuation::Infinite => true,
        }
    }

    pub fn finite(&self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite => None,
        }
    }
}

impl std::fmt::Display for Valuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{}", v),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// Writes `a = p^v * unit` with `p` not dividing `unit`; `(Infinite, 0)` for zero.
pub fn valuation(a: &BigInt, ctx: &PrimeContext) -> (Valuation, BigInt) {
    if a.is_zero() {
        return (Valuation::Infinite, BigInt::zero());
    }
    let p = ctx.big();
    let mut v = 0u64;
    let mut u = a.clone();
    loop {
        let (q, r) = u.div_rem(&p);
        if r.is_zero() {
            v += 1;
            u = q;
        } else {
            break;
        }
    }
    (Valuation::Finite(v), u)
}

/// The largest `m` with `a` in `1 + p^m Z`, i.e. the valuation of `a - 1`.
///
/// Rejects `a` not congruent to 1 mod p.
pub fn u_level(a: &BigInt, ctx: &PrimeContext) -> Result<Valuation> {
    let (v, _) = valuation(&(a - BigInt::one()), ctx);
    if !v.at_least(1) {
        return Err(Error::Precondition(format!(
            "u_level: {} is not congruent to 1 mod {}",
            a, ctx.p()
        )));
    }
    Ok(v)
}

/// The p-derivation on integer constants: `(a - a^p) / p`, exact.
pub fn delta_const(a: &BigInt, ctx: &PrimeContext) -> BigInt {
    let ap = a.pow(ctx.p() as u32);
    let num = a - ap;
    let (q, r) = num.div_rem(&ctx.big());
    debug_assert!(r.is_zero(), "Fermat divisibility failed");
    q
}

/// Rings where the carry polynomial `C_p` can be evaluated: exact integers,
/// jet polynomials, truncated series. Division by p is exact and checked.
pub trait CarryRing: Clone {
    fn czero(&self) -> Self;
    fn cadd(&self, other: &Self) -> Self;
    fn cneg(&self) -> Self;
    fn cmul(&self, other: &Self) -> Self;
    fn cpow(&self, e: u64, ctx: &PrimeContext) -> Result<Self>;
    fn cdiv_p_exact(&self, ctx: &PrimeContext) -> Result<Self>;
}

impl CarryRing for BigInt {
    fn czero(&self) -> Self {
        BigInt::zero()
    }
    fn cadd(&self, other: &Self) -> Self {
        self + other
    }
    fn cneg(&self) -> Self {
        -self
    }
    fn cmul(&self, other: &Self) -> Self {
        self * other
    }
    fn cpow(&self, e: u64, _ctx: &PrimeContext) -> Result<Self> {
        Ok(self.pow(e as u32))
    }
    fn cdiv_p_exact(&self, ctx: &PrimeContext) -> Result<Self> {
        let (q, r) = self.div_rem(&ctx.big());
        if !r.is_zero() {
            return Err(Error::InternalIdentity(format!(
                "inexact division by {} of {}",
                ctx.p(),
                self
            )));
        }
        Ok(q)
    }
}

/// The multi-term carry polynomial
/// `C_p(X_1,...,X_m) = (sum X_i^p - (sum X_i)^p) / p`.
///
/// Evaluated by full expansion over the ring; the division by p is an
/// integral identity and failure aborts with `InternalIdentity`.
pub fn cp_multi<T: CarryRing>(values: &[T], ctx: &PrimeContext) -> Result<T> {
    if values.len() < 2 {
        return Err(Error::Precondition(
            "cp_multi needs at least 2 arguments".into(),
        ));
    }
    let mut power_sum = values[0].czero();
    let mut sum = values[0].czero();
    for v in values {
        power_sum = power_sum.cadd(&v.cpow(ctx.p(), ctx)?);
        sum = sum.cadd(v);
    }
    let sum_power = sum.cpow(ctx.p(), ctx)?;
    power_sum.cadd(&sum_power.cneg()).cdiv_p_exact(ctx)
}

/// An integer known modulo `p^N`.
///
/// Two values compare equal exactly when they agree up to the smaller of the
/// two precisions; every operation reports the surviving precision, and the
/// p-derivation costs one digit.
#[derive(Debug, Clone)]
pub struct PadicApprox {
    p: u64,
    precision: u32,
    residue: BigInt, // canonical: 0 <= residue < p^precision
}

impl PadicApprox {
    pub fn new(residue: BigInt, precision: u32, ctx: &PrimeContext) -> Result<Self> {
        if precision == 0 {
            return Err(Error::InsufficientPrecision(
                "PadicApprox requires precision >= 1".into(),
            ));
        }
        let m = ctx.pow(precision);
        Ok(PadicApprox {
            p: ctx.p(),
            precision,
            residue: residue.mod_floor(&m),
        })
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn ctx(&self) -> PrimeContext {
        PrimeContext { p: self.p }
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    /// Truncate to a lower precision.
    pub fn truncate(&self, precision: u32) -> Result<Self> {
        if precision > self.precision {
            return Err(Error::InsufficientPrecision(format!(
                "cannot raise precision {} to {}",
                self.precision, precision
            )));
        }
        PadicApprox::new(self.residue.clone(), precision, &self.ctx())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.precision.min(other.precision);
        PadicApprox::new(&self.residue + &other.residue, n, &self.ctx()).unwrap()
    }

    pub fn neg(&self) -> Self {
        PadicApprox::new(-&self.residue, self.precision, &self.ctx()).unwrap()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.precision.min(other.precision);
        PadicApprox::new(&self.residue * &other.residue, n, &self.ctx()).unwrap()
    }

    pub fn pow(&self, e: u64) -> Self {
        let m = self.ctx().pow(self.precision);
        let r = self.residue.modpow(&BigInt::from(e), &m);
        PadicApprox::new(r, self.precision, &self.ctx()).unwrap()
    }

    /// Valuation, certified only while it is below the precision.
    pub fn valuation(&self) -> Result<Valuation> {
        let (v, _) = valuation(&self.residue, &self.ctx());
        match v {
            Valuation::Finite(v) if v < self.precision as u64 => Ok(Valuation::Finite(v)),
            _ => Err(Error::CannotCertify(format!(
                "valuation >= precision {}",
                self.precision
            ))),
        }
    }

    /// Exact division by p; requires the residue to be divisible and drops
    /// one digit of precision.
    pub fn div_p(&self) -> Result<Self> {
        if self.precision < 2 {
            return Err(Error::InsufficientPrecision(
                "division by p at precision 1 would leave precision 0".into(),
            ));
        }
        let (q, r) = self.residue.div_rem(&self.ctx().big());
        if !r.is_zero() {
            return Err(Error::InternalIdentity(format!(
                "residue {} not divisible by {}",
                self.residue, self.p
            )));
        }
        PadicApprox::new(q, self.precision - 1, &self.ctx())
    }

    /// The p-derivation `(a - a^p)/p`; the result has precision one less.
    pub fn delta(&self) -> Result<Self> {
        if self.precision < 2 {
            return Err(Error::InsufficientPrecision(
                "delta on a p-adic constant of precision 1".into(),
            ));
        }
        let ap = self.pow(self.p);
        self.add(&ap.neg()).div_p()
    }
}

impl PartialEq for PadicApprox {
    fn eq(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        let n = self.precision.min(other.precision);
        let m = BigInt::from(self.p).pow(n);
        self.residue.mod_floor(&m) == other.residue.mod_floor(&m)
    }
}

/// Finds `b = 1 mod p` with `b^e = a mod p^N`, for `e = p^nu` and
/// `a` in `U_{nu+1}`. Digit-by-digit lifting; `a` is exact so the root can be
/// produced at any requested precision.
pub fn hensel_root(a: &BigInt, e: u64, n_digits: u32, ctx: &PrimeContext) -> Result<PadicApprox> {
    let p = ctx.p();
    // e must be a power of p
    let mut nu = 0u32;
    let mut rem = e;
    while rem > 1 {
        if rem % p != 0 {
            return Err(Error::Precondition(format!(
                "hensel_root: exponent {} is not a power of {}",
                e, p
            )));
        }
        rem /= p;
        nu += 1;
    }
    let lvl = u_level(a, ctx)?;
    if !lvl.at_least(nu as u64 + 1) {
        return Err(Error::Precondition(format!(
            "hensel_root: a has unit level {} <= nu = {}",
            lvl, nu
        )));
    }
    // b is pinned mod p^m by the congruence b^e = a mod p^{m+nu}
    let mut b = BigInt::one();
    for m in 1..n_digits {
        let modulus = ctx.pow(m + 1 + nu);
        let mut found = false;
        for t in 0..p {
            let cand = &b + ctx.pow(m) * BigInt::from(t);
            let pw = cand.modpow(&BigInt::from(e), &modulus);
            if pw == a.mod_floor(&modulus) {
                b = cand;
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::InternalIdentity(format!(
                "hensel lift failed at digit {}",
                m
            )));
        }
    }
    PadicApprox::new(b, n_digits, ctx)
}
