//! Sparse multivariate polynomials in jet variables `x, x', x'', ...` (per
//! base-variable tuple) over exact integers, with the Frobenius lift `phi`
//! and the p-derivation `delta` as exact operators.
//!
//! `delta` is computed through its defining quotient `(phi(f) - f^p)/p`; the
//! exactness of that division doubles as a self-check of the whole arithmetic
//! layer. Coefficients may also be p-adic approximations: each application of
//! `delta` then costs exactly one digit of precision, and the polynomial
//! carries a precision floor that bounds what is known about absent
//! coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, CarryRing, PadicApprox, PrimeContext, Valuation};
use crate::error::{Error, Result};

pub mod text;

/// Default cap on intermediate term counts; delta-iteration blows up
/// exponentially and must degrade into a reported failure.
pub const DEFAULT_TERM_BUDGET: usize = 2_000_000;

/// A jet variable `x_base^(order)`; `(base 0, order 2)` is `x''`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVariable {
    pub order: u16,
    pub base: u16,
}

impl JetVariable {
    pub fn new(base: u16, order: u16) -> Self {
        JetVariable { order, base }
    }

    /// The variable one jet order up: `delta` of this variable.
    pub fn next(&self) -> Self {
        JetVariable {
            order: self.order + 1,
            base: self.base,
        }
    }
}

impl fmt::Display for JetVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.base == 0 {
            write!(f, "x{}", self.order)
        } else {
            write!(f, "x{}_{}", self.order, self.base)
        }
    }
}

/// An exponent vector, canonicalized: sorted by variable, no zero exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    exps: Vec<(JetVariable, u64)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { exps: Vec::new() }
    }

    pub fn var(v: JetVariable) -> Self {
        Monomial { exps: vec![(v, 1)] }
    }

    pub fn var_pow(v: JetVariable, e: u64) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial { exps: vec![(v, e)] }
        }
    }

    pub fn from_exps(mut exps: Vec<(JetVariable, u64)>) -> Self {
        exps.retain(|&(_, e)| e > 0);
        exps.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(JetVariable, u64)> = Vec::with_capacity(exps.len());
        for (v, e) in exps {
            match merged.last_mut() {
                Some((w, k)) if *w == v => *k += e,
                _ => merged.push((v, e)),
            }
        }
        Monomial { exps: merged }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exps(&self) -> &[(JetVariable, u64)] {
        &self.exps
    }

    pub fn exponent(&self, v: JetVariable) -> u64 {
        self.exps
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u64 {
        self.exps.iter().map(|&(_, e)| e).sum()
    }

    /// Highest jet order appearing; 0 for a constant monomial.
    pub fn max_order(&self) -> u16 {
        self.exps.iter().map(|&(v, _)| v.order).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            let (va, ea) = self.exps[i];
            let (vb, eb) = other.exps[j];
            match va.cmp(&vb) {
                Ordering::Less => {
                    out.push((va, ea));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((vb, eb));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((va, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.exps[i..]);
        out.extend_from_slice(&other.exps[j..]);
        Monomial { exps: out }
    }

    pub fn pow(&self, e: u64) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial {
            exps: self.exps.iter().map(|&(v, k)| (v, k * e)).collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().all(|&(v, e)| other.exponent(v) >= e)
    }

    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        let exps = self
            .exps
            .iter()
            .map(|&(v, e)| (v, e - other.exponent(v)))
            .collect();
        Some(Monomial::from_exps(exps))
    }
}

/// Degree-lexicographic comparison with variables ranked by (order, base),
/// highest jet order largest. Compatible with multiplication; used for
/// leading terms in exact division and for display.
pub fn deglex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    match a.total_degree().cmp(&b.total_degree()) {
        Ordering::Equal => {}
        ord => return ord,
    }
    // walk the union of variables from the largest down
    let mut i = a.exps.len();
    let mut j = b.exps.len();
    while i > 0 || j > 0 {
        if i == 0 {
            return Ordering::Less;
        }
        if j == 0 {
            return Ordering::Greater;
        }
        let (va, ea) = a.exps[i - 1];
        let (vb, eb) = b.exps[j - 1];
        match va.cmp(&vb) {
            Ordering::Greater => return Ordering::Greater,
            Ordering::Less => return Ordering::Less,
            Ordering::Equal => match ea.cmp(&eb) {
                Ordering::Equal => {
                    i -= 1;
                    j -= 1;
                }
                ord => return ord,
            },
        }
    }
    Ordering::Equal
}

/// A coefficient: an exact integer, or an integer known mod p^N.
#[derive(Debug, Clone, PartialEq)]
pub enum Coeff {
    Int(BigInt),
    Padic(PadicApprox),
}

impl Coeff {
    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Int(a) => a.is_zero(),
            Coeff::Padic(a) => a.is_zero(),
        }
    }

    pub fn precision(&self) -> Option<u32> {
        match self {
            Coeff::Int(_) => None,
            Coeff::Padic(a) => Some(a.precision()),
        }
    }

    fn to_padic(&self, precision: u32, ctx: &PrimeContext) -> Result<PadicApprox> {
        match self {
            Coeff::Int(a) => PadicApprox::new(a.clone(), precision, ctx),
            Coeff::Padic(a) => a.truncate(precision.min(a.precision())),
        }
    }

    pub fn add(&self, other: &Coeff, ctx: &PrimeContext) -> Coeff {
        match (self, other) {
            (Coeff::Int(a), Coeff::Int(b)) => Coeff::Int(a + b),
            (a, b) => {
                let n = a
                    .precision()
                    .unwrap_or(u32::MAX)
                    .min(b.precision().unwrap_or(u32::MAX));
                Coeff::Padic(
                    a.to_padic(n, ctx)
                        .and_then(|x| Ok(x.add(&b.to_padic(n, ctx)?)))
                        .expect("precision >= 1"),
                )
            }
        }
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Int(a) => Coeff::Int(-a),
            Coeff::Padic(a) => Coeff::Padic(a.neg()),
        }
    }

    pub fn mul(&self, other: &Coeff, ctx: &PrimeContext) -> Coeff {
        match (self, other) {
            (Coeff::Int(a), Coeff::Int(b)) => Coeff::Int(a * b),
            (a, b) => {
                let n = a
                    .precision()
                    .unwrap_or(u32::MAX)
                    .min(b.precision().unwrap_or(u32::MAX));
                Coeff::Padic(
                    a.to_padic(n, ctx)
                        .and_then(|x| Ok(x.mul(&b.to_padic(n, ctx)?)))
                        .expect("precision >= 1"),
                )
            }
        }
    }

    pub fn div_p(&self, ctx: &PrimeContext) -> Result<Coeff> {
        match self {
            Coeff::Int(a) => Ok(Coeff::Int(a.cdiv_p_exact(ctx)?)),
            Coeff::Padic(a) => Ok(Coeff::Padic(a.div_p()?)),
        }
    }

    /// Valuation of the coefficient, certified against the precision for
    /// p-adic approximations.
    pub fn valuation(&self, ctx: &PrimeContext) -> Result<Valuation> {
        match self {
            Coeff::Int(a) => Ok(arith::valuation(a, ctx).0),
            Coeff::Padic(a) => a.valuation(),
        }
    }

    /// Image in F_p, as a residue in 0..p.
    pub fn mod_p(&self, ctx: &PrimeContext) -> Result<u64> {
        use num_integer::Integer;
        let r = match self {
            Coeff::Int(a) => a.mod_floor(&ctx.big()),
            Coeff::Padic(a) => {
                if a.precision() < 1 {
                    return Err(Error::InsufficientPrecision(
                        "mod-p image needs precision >= 1".into(),
                    ));
                }
                a.residue().mod_floor(&ctx.big())
            }
        };
        Ok(u64::try_from(r).expect("residue fits"))
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Int(a) => write!(f, "{}", a),
            Coeff::Padic(a) => write!(f, "{}", a.residue()),
        }
    }
}

/// A sparse polynomial in jet variables over `Coeff`.
///
/// `precision_floor` is the number of p-adic digits to which the whole
/// polynomial is known: absent monomials are only guaranteed to vanish mod
/// p^floor. `None` means exact. Ring operations take the min of the floors;
/// `delta` lowers it by one.
#[derive(Debug, Clone)]
pub struct DeltaPolynomial {
    ctx: PrimeContext,
    terms: BTreeMap<Monomial, Coeff>,
    precision_floor: Option<u32>,
}

fn min_floor(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(a.min(b)),
    }
}

impl PartialEq for DeltaPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.terms == other.terms
    }
}

impl DeltaPolynomial {
    pub fn zero(ctx: PrimeContext) -> Self {
        DeltaPolynomial {
            ctx,
            terms: BTreeMap::new(),
            precision_floor: None,
        }
    }

    pub fn constant(c: Coeff, ctx: PrimeContext) -> Self {
        let mut p = DeltaPolynomial::zero(ctx);
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn from_int(c: i64, ctx: PrimeContext) -> Self {
        DeltaPolynomial::constant(Coeff::Int(BigInt::from(c)), ctx)
    }

    pub fn var(v: JetVariable, ctx: PrimeContext) -> Self {
        let mut p = DeltaPolynomial::zero(ctx);
        p.add_term(Monomial::var(v), Coeff::Int(BigInt::one()));
        p
    }

    pub fn monomial(m: Monomial, c: Coeff, ctx: PrimeContext) -> Self {
        let mut p = DeltaPolynomial::zero(ctx);
        p.add_term(m, c);
        p
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn precision_floor(&self) -> Option<u32> {
        self.precision_floor
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or(Coeff::Int(BigInt::zero()))
    }

    pub fn constant_term(&self) -> Coeff {
        self.coefficient(&Monomial::one())
    }

    /// Highest jet order appearing in any term.
    pub fn max_order(&self) -> u16 {
        self.terms.keys().map(|m| m.max_order()).max().unwrap_or(0)
    }

    pub fn variables(&self) -> Vec<JetVariable> {
        let mut vs: Vec<JetVariable> = self
            .terms
            .keys()
            .flat_map(|m| m.exps().iter().map(|&(v, _)| v))
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            if let Coeff::Padic(a) = &c {
                self.precision_floor = min_floor(self.precision_floor, Some(a.precision()));
            }
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&c, &self.ctx);
                if sum.is_zero() {
                    if let Some(q) = sum.precision() {
                        self.precision_floor = min_floor(self.precision_floor, Some(q));
                    }
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.ctx, other.ctx, "prime context mismatch");
        let mut out = self.clone();
        out.precision_floor = min_floor(self.precision_floor, other.precision_floor);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ctx, other.ctx, "prime context mismatch");
        let mut out = DeltaPolynomial::zero(self.ctx);
        out.precision_floor = min_floor(self.precision_floor, other.precision_floor);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.mul(c2, &self.ctx));
            }
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut out = DeltaPolynomial::zero(self.ctx);
        out.precision_floor = self.precision_floor;
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k.mul(c, &self.ctx));
        }
        out
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&Coeff::Int(BigInt::from(c)))
    }

    /// `f^e` by repeated squaring over exact big integers, with a term budget.
    pub fn pow(&self, e: u64, budget: usize) -> Result<Self> {
        let mut result = DeltaPolynomial::constant(Coeff::Int(BigInt::one()), self.ctx);
        result.precision_floor = self.precision_floor;
        if e == 0 {
            return Ok(result);
        }
        let mut base = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                result = result.mul(&base);
                check_budget(result.num_terms(), budget)?;
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
            check_budget(base.num_terms(), budget)?;
        }
        Ok(result)
    }

    /// The Frobenius lift: the ring homomorphism with
    /// `x^(i) -> (x^(i))^p + p * x^(i+1)` and constants fixed.
    pub fn phi(&self) -> Result<Self> {
        self.phi_budgeted(DEFAULT_TERM_BUDGET)
    }

    pub fn phi_budgeted(&self, budget: usize) -> Result<Self> {
        let p = self.ctx.p();
        let mut cache: BTreeMap<(JetVariable, u64), DeltaPolynomial> = BTreeMap::new();
        let mut out = DeltaPolynomial::zero(self.ctx);
        out.precision_floor = self.precision_floor;
        for (m, c) in &self.terms {
            let mut term = DeltaPolynomial::constant(c.clone(), self.ctx);
            for &(v, e) in m.exps() {
                let expansion = cache
                    .entry((v, e))
                    .or_insert_with(|| var_phi_power(v, e, p, self.ctx));
                term = term.mul(expansion);
                check_budget(term.num_terms(), budget)?;
            }
            out = out.add(&term);
            check_budget(out.num_terms(), budget)?;
        }
        Ok(out)
    }

    /// The p-derivation `(phi(f) - f^p)/p`; the division is exact and
    /// asserted. Agrees with `delta_const` on constants and with
    /// `x^(i) -> x^(i+1)` on variables.
    pub fn delta(&self) -> Result<Self> {
        self.delta_budgeted(DEFAULT_TERM_BUDGET)
    }

    pub fn delta_budgeted(&self, budget: usize) -> Result<Self> {
        let fp = self.pow(self.ctx.p(), budget)?;
        let num = self.phi_budgeted(budget)?.sub(&fp);
        num.div_p_exact()
    }

    /// n-fold `delta`; `delta_iter(f, 0) = f`.
    pub fn delta_iter(&self, n: u32) -> Result<Self> {
        self.delta_iter_budgeted(n, DEFAULT_TERM_BUDGET)
    }

    pub fn delta_iter_budgeted(&self, n: u32, budget: usize) -> Result<Self> {
        let mut f = self.clone();
        for _ in 0..n {
            f = f.delta_budgeted(budget)?;
        }
        Ok(f)
    }

    /// Divides every coefficient by p, exactly.
    pub fn div_p_exact(&self) -> Result<Self> {
        let mut out = DeltaPolynomial::zero(self.ctx);
        out.precision_floor = match self.precision_floor {
            None => None,
            Some(n) if n >= 2 => Some(n - 1),
            Some(_) => {
                return Err(Error::InsufficientPrecision(
                    "division by p would leave precision floor 0".into(),
                ))
            }
        };
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.div_p(&self.ctx)?);
        }
        Ok(out)
    }

    /// True if p^k divides every coefficient (certified for p-adic ones).
    pub fn divisible_by_p_power(&self, k: u64) -> Result<bool> {
        if let Some(n) = self.precision_floor {
            if (n as u64) < k {
                return Err(Error::CannotCertify(format!(
                    "divisibility by p^{} at precision floor {}",
                    k, n
                )));
            }
        }
        for c in self.terms.values() {
            match c {
                Coeff::Int(a) => {
                    if !arith::valuation(a, &self.ctx).0.at_least(k) {
                        return Ok(false);
                    }
                }
                Coeff::Padic(a) => {
                    if (a.precision() as u64) < k {
                        return Err(Error::CannotCertify(format!(
                            "divisibility by p^{} at coefficient precision {}",
                            k,
                            a.precision()
                        )));
                    }
                    match a.valuation() {
                        Ok(v) => {
                            if !v.at_least(k) {
                                return Ok(false);
                            }
                        }
                        // residue is 0 mod p^precision >= p^k
                        Err(_) => {}
                    }
                }
            }
        }
        Ok(true)
    }

    /// Converts all coefficients to p-adic approximations with the given
    /// number of digits; subsequent deltas then cost one digit each.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        let mut out = DeltaPolynomial::zero(self.ctx);
        out.precision_floor = min_floor(self.precision_floor, Some(precision));
        for (m, c) in &self.terms {
            let q = c
                .precision()
                .map(|q| q.min(precision))
                .unwrap_or(precision);
            out.add_term(m.clone(), Coeff::Padic(c.to_padic(q, &self.ctx)?));
        }
        Ok(out)
    }

    /// Ring-homomorphic substitution; the assignment must cover every
    /// variable of `f`.
    pub fn substitute(&self, assignment: &BTreeMap<JetVariable, DeltaPolynomial>) -> Result<Self> {
        self.substitute_budgeted(assignment, DEFAULT_TERM_BUDGET)
    }

    pub fn substitute_budgeted(
        &self,
        assignment: &BTreeMap<JetVariable, DeltaPolynomial>,
        budget: usize,
    ) -> Result<Self> {
        let mut out = DeltaPolynomial::zero(self.ctx);
        out.precision_floor = self.precision_floor;
        for (m, c) in &self.terms {
            let mut term = DeltaPolynomial::constant(c.clone(), self.ctx);
            for &(v, e) in m.exps() {
                let target = assignment.get(&v).ok_or_else(|| {
                    Error::Precondition(format!("substitute: no assignment for {}", v))
                })?;
                term = term.mul(&target.pow(e, budget)?);
                check_budget(term.num_terms(), budget)?;
            }
            out = out.add(&term);
            check_budget(out.num_terms(), budget)?;
        }
        Ok(out)
    }

    /// Exact multivariate division: returns `self / divisor` when the
    /// division leaves no remainder, `None` otherwise.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let (lead_m, lead_c) = divisor
            .terms
            .iter()
            .max_by(|a, b| deglex_cmp(a.0, b.0))
            .unwrap();
        let lead_int = match lead_c {
            Coeff::Int(a) => a.clone(),
            Coeff::Padic(_) => return None, // exact division needs exact coefficients
        };
        let mut rem = self.clone();
        let mut quot = DeltaPolynomial::zero(self.ctx);
        while !rem.is_zero() {
            let (rm, rc) = rem
                .terms
                .iter()
                .max_by(|a, b| deglex_cmp(a.0, b.0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .unwrap();
            let q_mono = rm.div(lead_m)?;
            let rc_int = match &rc {
                Coeff::Int(a) => a.clone(),
                Coeff::Padic(_) => return None,
            };
            use num_integer::Integer;
            let (q, r) = rc_int.div_rem(&lead_int);
            if !r.is_zero() {
                return None;
            }
            let t = DeltaPolynomial::monomial(q_mono, Coeff::Int(q), self.ctx);
            rem = rem.sub(&t.mul(divisor));
            quot = quot.add(&t);
        }
        Some(quot)
    }
}

fn check_budget(terms: usize, budget: usize) -> Result<()> {
    if terms > budget {
        Err(Error::TermBudget { terms, budget })
    } else {
        Ok(())
    }
}

/// Expansion of `phi(v)^e = (v^p + p w)^e` where `w` is the next jet order.
fn var_phi_power(v: JetVariable, e: u64, p: u64, ctx: PrimeContext) -> DeltaPolynomial {
    let w = v.next();
    let mut out = DeltaPolynomial::zero(ctx);
    // binomial coefficients C(e, k) computed incrementally
    let mut binom = BigInt::one();
    let mut p_pow = BigInt::one();
    let p_big = BigInt::from(p);
    for k in 0..=e {
        let coeff = &binom * &p_pow;
        let m = Monomial::var_pow(v, p * (e - k)).mul(&Monomial::var_pow(w, k));
        out.add_term(m, Coeff::Int(coeff));
        if k < e {
            use num_integer::Integer;
            binom = (binom * BigInt::from(e - k)).div_floor(&BigInt::from(k + 1));
            p_pow *= &p_big;
        }
    }
    out
}

impl CarryRing for DeltaPolynomial {
    fn czero(&self) -> Self {
        DeltaPolynomial::zero(self.ctx)
    }
    fn cadd(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn cneg(&self) -> Self {
        self.neg()
    }
    fn cmul(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn cpow(&self, e: u64, _ctx: &PrimeContext) -> Result<Self> {
        self.pow(e, DEFAULT_TERM_BUDGET)
    }
    fn cdiv_p_exact(&self, _ctx: &PrimeContext) -> Result<Self> {
        self.div_p_exact()
    }
}

impl fmt::Display for DeltaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Monomial, &Coeff)> = self.terms.iter().collect();
        terms.sort_by(|a, b| deglex_cmp(b.0, a.0));
        let mut first = true;
        for (m, c) in terms {
            let (neg, mag) = match c {
                Coeff::Int(a) => (a.is_negative(), Coeff::Int(a.abs())),
                Coeff::Padic(a) => (false, Coeff::Padic(a.clone())),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_is_one = match &mag {
                Coeff::Int(a) => a.is_one(),
                Coeff::Padic(_) => false,
            };
            if m.is_one() {
                write!(f, "{}", mag)?;
            } else {
                if !coeff_is_one {
                    write!(f, "{}*", mag)?;
                }
                let mut sep = false;
                for &(v, e) in m.exps() {
                    if sep {
                        write!(f, "*")?;
                    }
                    sep = true;
                    if e == 1 {
                        write!(f, "{}", v)?;
                    } else {
                        write!(f, "{}^{}", v, e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Outcome of checking the expansion of `delta(f^{p^nu})`: the difference
/// against the leading term `p^nu f^{p(p^nu - 1)} delta f` must be divisible
/// by `p^{nu+1}` and by `(delta f)^2`; the final quotient is the witness for
/// the remainder polynomial.
#[derive(Debug, Clone)]
pub struct IdentityCheckReport {
    pub holds: bool,
    pub witness: Option<DeltaPolynomial>,
    pub detail: String,
}

pub fn check_deltafp_identity(f: &DeltaPolynomial, nu: u32) -> Result<IdentityCheckReport> {
    check_deltafp_identity_budgeted(f, nu, DEFAULT_TERM_BUDGET)
}

pub fn check_deltafp_identity_budgeted(
    f: &DeltaPolynomial,
    nu: u32,
    budget: usize,
) -> Result<IdentityCheckReport> {
    let ctx = *f.ctx();
    let p = ctx.p();
    let pnu = p.pow(nu);
    let df = f.delta_budgeted(budget)?;
    let lhs = f.pow(pnu, budget)?.delta_budgeted(budget)?;
    let lead = f
        .pow(p * (pnu - 1), budget)?
        .mul(&df)
        .scale(&Coeff::Int(ctx.pow(nu)));
    let r = lhs.sub(&lead);
    if r.is_zero() {
        return Ok(IdentityCheckReport {
            holds: true,
            witness: Some(DeltaPolynomial::zero(ctx)),
            detail: "difference vanishes".into(),
        });
    }
    if !r.divisible_by_p_power(nu as u64 + 1)? {
        return Ok(IdentityCheckReport {
            holds: false,
            witness: None,
            detail: format!("difference not divisible by p^{}", nu + 1),
        });
    }
    let mut q = r;
    for _ in 0..=nu {
        q = q.div_p_exact()?;
    }
    let df2 = df.mul(&df);
    match q.div_exact(&df2) {
        Some(w) => Ok(IdentityCheckReport {
            holds: true,
            witness: Some(w),
            detail: "divisibilities hold".into(),
        }),
        None => Ok(IdentityCheckReport {
            holds: false,
            witness: None,
            detail: "quotient not divisible by (delta f)^2".into(),
        }),
    }
}

#[cfg(test)]
mod tests;
