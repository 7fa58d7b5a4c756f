//! Truncated power series over Z/p^N: composition and iteration, height and
//! multiplicity detection, Weierstrass preparation, the p-power coefficient
//! filtration on series, its canonical decomposition, and the predicted
//! mod-p reductions of delta-iterates built from it.
//!
//! Every operation records the surviving precision N and truncation degree
//! D; nothing silently degrades below what it can certify.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::PrimeContext;
use crate::error::{Error, Result};
use crate::fp::FpPolynomial;
use crate::poly::{Coeff, DeltaPolynomial, JetVariable, Monomial};

/// A series known mod (p^N, x^{D+1}); coefficient i canonical in 0..p^N.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    ctx: PrimeContext,
    precision: u32,
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<BigInt>, precision: u32, trunc: usize, ctx: PrimeContext) -> Result<Self> {
        if precision < 1 {
            return Err(Error::Precondition("series precision must be >= 1".into()));
        }
        let modulus = ctx.pow(precision);
        let mut c: Vec<BigInt> = coeffs.into_iter().map(|a| a.mod_floor(&modulus)).collect();
        c.resize(trunc + 1, BigInt::zero());
        c.truncate(trunc + 1);
        Ok(TruncatedSeries {
            ctx,
            precision,
            coeffs: c,
        })
    }

    pub fn zero(precision: u32, trunc: usize, ctx: PrimeContext) -> Self {
        TruncatedSeries::new(Vec::new(), precision, trunc, ctx).unwrap()
    }

    /// The identity series x.
    pub fn x(precision: u32, trunc: usize, ctx: PrimeContext) -> Self {
        let mut s = TruncatedSeries::zero(precision, trunc, ctx);
        if trunc >= 1 {
            s.coeffs[1] = BigInt::one();
        }
        s
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn constant_term_is_zero(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    fn modulus(&self) -> BigInt {
        self.ctx.pow(self.precision)
    }

    fn align(&self, other: &Self) -> (u32, usize) {
        assert_eq!(self.ctx, other.ctx, "prime context mismatch");
        (
            self.precision.min(other.precision),
            self.trunc().min(other.trunc()),
        )
    }

    pub fn truncate_to(&self, precision: u32, trunc: usize) -> Result<Self> {
        if precision > self.precision || trunc > self.trunc() {
            return Err(Error::Precondition(
                "cannot raise precision or truncation by fiat".into(),
            ));
        }
        TruncatedSeries::new(
            self.coeffs[..=trunc].to_vec(),
            precision,
            trunc,
            self.ctx,
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let (n, d) = self.align(other);
        let m = self.ctx.pow(n);
        let coeffs = (0..=d)
            .map(|i| (self.coeff(i) + other.coeff(i)).mod_floor(&m))
            .collect();
        TruncatedSeries::new(coeffs, n, d, self.ctx).unwrap()
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus();
        let coeffs = self.coeffs.iter().map(|c| (-c).mod_floor(&m)).collect();
        TruncatedSeries::new(coeffs, self.precision, self.trunc(), self.ctx).unwrap()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (n, d) = self.align(other);
        let m = self.ctx.pow(n);
        let mut coeffs = vec![BigInt::zero(); d + 1];
        for i in 0..=d.min(self.trunc()) {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(d - i).min(other.trunc()) {
                coeffs[i + j] += &self.coeffs[i] * &other.coeffs[j];
            }
        }
        for c in &mut coeffs {
            *c = c.mod_floor(&m);
        }
        TruncatedSeries::new(coeffs, n, d, self.ctx).unwrap()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let m = self.modulus();
        let coeffs = self.coeffs.iter().map(|a| (a * c).mod_floor(&m)).collect();
        TruncatedSeries::new(coeffs, self.precision, self.trunc(), self.ctx).unwrap()
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut result = {
            let mut s = TruncatedSeries::zero(self.precision, self.trunc(), self.ctx);
            s.coeffs[0] = BigInt::one();
            s
        };
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    /// Substitutes `other` (no constant term) into `self`, by Horner.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if !other.constant_term_is_zero() {
            return Err(Error::Precondition(
                "compose needs a series without constant term".into(),
            ));
        }
        let (n, d) = self.align(other);
        let m = self.ctx.pow(n);
        let mut acc = TruncatedSeries::zero(n, d, self.ctx);
        for i in (0..=d.min(self.trunc())).rev() {
            acc = acc.mul(other);
            acc.coeffs[0] = (&acc.coeffs[0] + &self.coeffs[i]).mod_floor(&m);
        }
        Ok(acc)
    }

    /// nu-fold self-composition.
    pub fn iterate(&self, nu: u32) -> Result<Self> {
        if nu == 0 {
            return Ok(TruncatedSeries::x(self.precision, self.trunc(), self.ctx));
        }
        let mut acc = self.clone();
        for _ in 1..nu {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        let m = self.modulus();
        let d = self.trunc();
        let mut coeffs = vec![BigInt::zero(); d.max(1)];
        for i in 1..=d {
            coeffs[i - 1] = (&self.coeffs[i] * BigInt::from(i)).mod_floor(&m);
        }
        TruncatedSeries::new(coeffs, self.precision, d.saturating_sub(1).max(0), self.ctx).unwrap()
    }

    /// Exact division by p of every coefficient; costs one digit.
    pub fn div_p(&self) -> Result<Self> {
        if self.precision < 2 {
            return Err(Error::InsufficientPrecision(
                "series division by p needs precision >= 2".into(),
            ));
        }
        let p = self.ctx.big();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let (q, r) = c.div_rem(&p);
            if !r.is_zero() {
                return Err(Error::Precondition(format!(
                    "coefficient of x^{} not divisible by p",
                    i
                )));
            }
            coeffs.push(q);
        }
        TruncatedSeries::new(coeffs, self.precision - 1, self.trunc(), self.ctx)
    }

    /// Coefficients of x^d, x^{d+1}, ... shifted down to degree 0.
    pub fn shift_down(&self, d: usize) -> Self {
        let coeffs: Vec<BigInt> = self.coeffs.iter().skip(d).cloned().collect();
        TruncatedSeries::new(coeffs, self.precision, self.trunc(), self.ctx).unwrap()
    }

    /// The part of degree < d, unshifted.
    pub fn low_part(&self, d: usize) -> Self {
        let coeffs: Vec<BigInt> = self.coeffs.iter().take(d).cloned().collect();
        TruncatedSeries::new(coeffs, self.precision, self.trunc(), self.ctx).unwrap()
    }

    /// Multiplicative inverse; the constant term must be a p-adic unit.
    pub fn inverse(&self) -> Result<Self> {
        let m = self.modulus();
        let a0 = &self.coeffs[0];
        if (a0 % self.ctx.big()).is_zero() {
            return Err(Error::Precondition(
                "series inverse needs a unit constant term".into(),
            ));
        }
        // a0^{-1} = a0^{phi(p^N)-1} mod p^N
        let phi = self.ctx.pow(self.precision - 1) * (self.ctx.big() - 1);
        let b0 = a0.modpow(&(phi - 1), &m);
        let d = self.trunc();
        let mut inv = vec![BigInt::zero(); d + 1];
        inv[0] = b0.clone();
        for n in 1..=d {
            let mut s = BigInt::zero();
            for k in 1..=n {
                s += &self.coeffs[k] * &inv[n - k];
            }
            inv[n] = (-(&b0) * s).mod_floor(&m);
        }
        TruncatedSeries::new(inv, self.precision, d, self.ctx)
    }

    /// The reduction mod p as exponent/coefficient pairs.
    pub fn mod_p_terms(&self) -> Vec<(usize, u64)> {
        let p = self.ctx.big();
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| {
                let r = c.mod_floor(&p);
                if r.is_zero() {
                    None
                } else {
                    Some((i, u64::try_from(r).unwrap()))
                }
            })
            .collect()
    }

    /// Truncation as a jet polynomial in x with p-adic coefficients.
    pub fn to_delta_polynomial(&self) -> Result<DeltaPolynomial> {
        let x = JetVariable::new(0, 0);
        let mut f = DeltaPolynomial::zero(self.ctx).with_precision(self.precision)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            f = f.add(&DeltaPolynomial::monomial(
                Monomial::var_pow(x, i as u64),
                Coeff::Padic(crate::arith::PadicApprox::new(c.clone(), self.precision, &self.ctx)?),
                self.ctx,
            ));
        }
        Ok(f)
    }

    /// Truncation as a jet polynomial with exact integer coefficients (the
    /// canonical lifts in 0..p^N).
    pub fn to_delta_polynomial_exact(&self) -> DeltaPolynomial {
        let x = JetVariable::new(0, 0);
        let mut f = DeltaPolynomial::zero(self.ctx);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            f = f.add(&DeltaPolynomial::monomial(
                Monomial::var_pow(x, i as u64),
                Coeff::Int(c.clone()),
                self.ctx,
            ));
        }
        f
    }
}

impl std::fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 if c.is_one() => write!(f, "x")?,
                1 => write!(f, "{}*x", c)?,
                _ if c.is_one() => write!(f, "x^{}", i)?,
                _ => write!(f, "{}*x^{}", c, i)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " mod {}^{} trunc {}", self.ctx.p(), self.precision, self.trunc())
    }
}

/// Parses a series literal such as `3*x + x^9 mod 3^6 trunc 100`. The `mod`
/// clause is required unless defaults are supplied; `trunc` falls back to
/// `default_trunc`.
pub fn parse_series(
    input: &str,
    default_p: Option<u64>,
    default_precision: u32,
    default_trunc: usize,
) -> Result<TruncatedSeries> {
    let (poly_part, rest) = match input.split_once(" mod ") {
        Some((a, b)) => (a, Some(b)),
        None => (input, None),
    };
    let (p, precision, trunc) = match rest {
        Some(r) => {
            let (modpart, truncpart) = match r.split_once(" trunc ") {
                Some((a, b)) => (a.trim(), Some(b.trim())),
                None => (r.trim(), None),
            };
            let (ps, ns) = modpart.split_once('^').ok_or_else(|| {
                Error::Parse("expected p^N after 'mod'".into())
            })?;
            let p: u64 = ps.trim().parse().map_err(|_| Error::Parse("bad prime".into()))?;
            let n: u32 = ns.trim().parse().map_err(|_| Error::Parse("bad precision".into()))?;
            let t: usize = match truncpart {
                Some(t) => t.parse().map_err(|_| Error::Parse("bad truncation".into()))?,
                None => default_trunc,
            };
            (p, n, t)
        }
        None => match default_p {
            Some(p) => (p, default_precision, default_trunc),
            None => return Err(Error::Parse("series literal needs a 'mod p^N' clause".into())),
        },
    };
    let ctx = PrimeContext::new(p)?;
    let mut coeffs = vec![BigInt::zero(); trunc + 1];
    // reuse the jet-polynomial grammar with x := x0
    let poly_src = poly_part.replace('x', "x0");
    let f = crate::poly::text::parse(&poly_src, ctx)?;
    for (m, c) in f.terms() {
        let e = m.exponent(JetVariable::new(0, 0));
        if m.total_degree() != e {
            return Err(Error::Parse("series literal must use the single variable x".into()));
        }
        let c = match c {
            Coeff::Int(a) => a.clone(),
            Coeff::Padic(a) => a.residue().clone(),
        };
        if (e as usize) <= trunc {
            coeffs[e as usize] = c;
        }
    }
    TruncatedSeries::new(coeffs, precision, trunc, ctx)
}

/// Height h and multiplicity e of a series: the reduction mod p lies in
/// k[[x^{p^h}]] maximally and has x-adic valuation e * p^h.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightReport {
    pub h: u32,
    pub e: u64,
}

pub fn height_and_e(f: &TruncatedSeries) -> Result<HeightReport> {
    let nz = f.mod_p_terms();
    let indices: Vec<usize> = nz.iter().map(|&(i, _)| i).filter(|&i| i > 0).collect();
    if nz.iter().any(|&(i, _)| i == 0) {
        return Err(Error::Precondition(
            "height is defined for series without constant term".into(),
        ));
    }
    if indices.is_empty() {
        return Err(Error::CannotCertify(format!(
            "series is 0 mod p up to degree {}; height not visible at this truncation",
            f.trunc()
        )));
    }
    let p = f.ctx.p();
    let mut h = 0u32;
    loop {
        let ph = p.pow(h + 1);
        if indices.iter().all(|&i| (i as u64) % ph == 0) {
            h += 1;
        } else {
            break;
        }
    }
    let val = *indices.iter().min().unwrap() as u64;
    Ok(HeightReport {
        h,
        e: val / p.pow(h),
    })
}

/// Weierstrass factorization `input = unit * distinguished` modulo
/// (p^N, x^{D+1}).
#[derive(Debug, Clone)]
pub struct SeriesFactorization {
    pub unit: TruncatedSeries,
    /// Monic of degree d with all lower coefficients divisible by p, as
    /// canonical integer lifts.
    pub distinguished: Vec<BigInt>,
    pub precision: u32,
}

/// Weierstrass preparation by the fixed-point division `x^d = q F + r`: with
/// `F = B + x^d V` (B the part below degree d, divisible by p; V a unit),
/// the map `q -> V^{-1} shift_down(x^d - q B, d)` is a p-adic contraction
/// because B is divisible by p, so N iterations converge mod p^N. Then
/// `P = x^d - r` and `U = q^{-1}`.
pub fn weierstrass_prep(f: &TruncatedSeries) -> Result<SeriesFactorization> {
    let hr = height_and_e(f)?;
    let d = (hr.e * f.ctx.p().pow(hr.h)) as usize;
    if f.trunc() < d + f.ctx.p() as usize {
        return Err(Error::Precondition(format!(
            "truncation {} too small for degree-{} preparation (guard {})",
            f.trunc(),
            d,
            f.ctx.p()
        )));
    }
    let b = f.low_part(d);
    let v = f.shift_down(d);
    let v_inv = v.inverse()?;
    let mut xd = TruncatedSeries::zero(f.precision, f.trunc(), f.ctx);
    xd.coeffs[d] = BigInt::one();
    let mut q = v_inv.clone();
    for _ in 0..f.precision {
        q = v_inv.mul(&xd.sub(&q.mul(&b)).shift_down(d));
    }
    let r = xd.sub(&q.mul(&b)).low_part(d);
    let p_series = xd.sub(&r);
    let unit = q.inverse()?;
    // invariants
    let modulus = f.ctx.pow(f.precision);
    let back = unit.mul(&p_series);
    for i in 0..=f.trunc() {
        if back.coeff(i).mod_floor(&modulus) != f.coeff(i) {
            return Err(Error::InternalIdentity(format!(
                "preparation does not multiply back at x^{}",
                i
            )));
        }
    }
    let mut distinguished: Vec<BigInt> = (0..=d).map(|i| p_series.coeff(i)).collect();
    distinguished[d] = BigInt::one();
    for (i, c) in distinguished.iter().enumerate().take(d) {
        if !(c % f.ctx.big()).is_zero() {
            return Err(Error::InternalIdentity(format!(
                "distinguished coefficient at x^{} not divisible by p",
                i
            )));
        }
    }
    Ok(SeriesFactorization {
        unit,
        distinguished,
        precision: f.precision,
    })
}

/// Membership in the coefficient filtration: `v_p(a_n) >= nu - v_p(n)` for
/// every stored coefficient.
pub fn in_series_filtration(g: &TruncatedSeries, nu: u32) -> Result<bool> {
    if g.precision < nu {
        return Err(Error::InsufficientPrecision(format!(
            "filtration level {} cannot be certified at precision {}",
            nu, g.precision
        )));
    }
    let p = g.ctx.p();
    for (i, c) in g.coeffs.iter().enumerate() {
        let need = if i == 0 {
            nu as u64
        } else {
            let mut v = 0u64;
            let mut m = i as u64;
            while m % p == 0 {
                v += 1;
                m /= p;
            }
            (nu as u64).saturating_sub(v)
        };
        if need == 0 || c.is_zero() {
            continue;
        }
        let (val, _) = crate::arith::valuation(c, &g.ctx);
        if !val.at_least(need) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Canonical decomposition `G = sum_j p^{nu-j} G_j(x^{p^j})`: each term
/// `a_n x^n` is assigned to `j = min(v_p(n), nu)`; the filtration inequality
/// makes the division by `p^{nu-j}` exact.
pub fn decompose_a0nu(g: &TruncatedSeries, nu: u32) -> Result<Vec<TruncatedSeries>> {
    if !g.constant_term_is_zero() {
        return Err(Error::Precondition("decomposition needs G(0) = 0".into()));
    }
    if !in_series_filtration(g, nu)? {
        return Err(Error::Precondition(
            "series is not in the filtration at this level".into(),
        ));
    }
    let p = g.ctx.p();
    let mut parts: Vec<Vec<BigInt>> = (0..=nu)
        .map(|j| vec![BigInt::zero(); g.trunc() / (p.pow(j) as usize) + 1])
        .collect();
    for (i, c) in g.coeffs.iter().enumerate() {
        if c.is_zero() || i == 0 {
            continue;
        }
        let mut v = 0u32;
        let mut m = i as u64;
        while m % p == 0 && v < nu {
            v += 1;
            m /= p;
        }
        let j = v;
        let scale = g.ctx.pow(nu - j);
        let (q, r) = c.div_rem(&scale);
        if !r.is_zero() {
            return Err(Error::InternalIdentity(format!(
                "filtration accepted coefficient of x^{} but division by p^{} fails",
                i,
                nu - j
            )));
        }
        parts[j as usize][i / (p.pow(j) as usize)] = q;
    }
    let out_precision = g.precision.saturating_sub(nu).max(1);
    parts
        .into_iter()
        .map(|coeffs| {
            let t = coeffs.len() - 1;
            TruncatedSeries::new(coeffs, out_precision, t, g.ctx)
        })
        .collect()
}

/// The predicted mod-p value of `delta^n G` for a decomposed series, per the
/// two-case reduction formula.
#[derive(Debug, Clone)]
pub struct ReductionPrediction {
    /// Main term; jet variables x and (for the second case) x^(n-nu).
    pub main: FpPolynomial,
    /// Degree in x up to which the main term is trustworthy.
    pub degree_cap: u64,
    /// Error class: `x^{2 p^nu} k[[x]]` for n <= nu, else the brace-bracket
    /// intersection at levels (n-nu-1, nu).
    pub error_is_x_power: bool,
}

pub fn predicted_reduction(
    decomposition: &[TruncatedSeries],
    g: &TruncatedSeries,
    n: u32,
    nu: u32,
) -> Result<ReductionPrediction> {
    if decomposition.len() != nu as usize + 1 {
        return Err(Error::Precondition("decomposition has wrong length".into()));
    }
    let ctx = *g.ctx();
    let p = ctx.p();
    if n <= nu {
        // (G_{nu-n}(x^{p^{nu-n}}))^{p^n}: over F_p this is sum c_m x^{m p^nu}
        let gj = &decomposition[(nu - n) as usize];
        let mut main = FpPolynomial::zero(p);
        let cap = gj.trunc() as u64 * p.pow(nu);
        for (m, c) in gj.mod_p_terms() {
            main = main.add(&FpPolynomial::monomial(
                Monomial::var_pow(JetVariable::new(0, 0), m as u64 * p.pow(nu)),
                c,
                p,
            ));
        }
        Ok(ReductionPrediction {
            main,
            degree_cap: cap,
            error_is_x_power: true,
        })
    } else {
        // (p^{-nu} dG/dx mod p)^{p^n} (x^{(n-nu)})^{p^nu}
        let dg = g.derivative();
        let h = {
            let mut s = dg;
            for _ in 0..nu {
                s = s.div_p()?;
            }
            s
        };
        let cap = h.trunc() as u64 * p.pow(n);
        let mut series_part = FpPolynomial::zero(p);
        for (m, c) in h.mod_p_terms() {
            series_part = series_part.add(&FpPolynomial::monomial(
                Monomial::var_pow(JetVariable::new(0, 0), m as u64 * p.pow(n)),
                c,
                p,
            ));
        }
        // constant term of h contributes exponent 0
        let main = series_part.mul(&FpPolynomial::monomial(
            Monomial::var_pow(JetVariable::new(0, (n - nu) as u16), p.pow(nu)),
            1,
            p,
        ));
        Ok(ReductionPrediction {
            main,
            degree_cap: cap,
            error_is_x_power: false,
        })
    }
}
