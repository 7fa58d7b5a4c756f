//! Groebner-basis engine over the prime field F_p: reduced canonical bases
//! (Buchberger), normal forms, ideal equality, unit-ideal detection,
//! elimination of high jet orders, and standard-monomial enumeration.
//!
//! The monomial orders rank jet variables by (order, base) with the highest
//! jet order largest. Reduced bases are canonical, so ideal equality is a
//! basis comparison; elimination uses a block order in which any monomial
//! containing an eliminated variable exceeds every monomial without one, so
//! the contraction is read off the basis directly.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::arith::PrimeContext;
use crate::error::{Error, Result};
use crate::poly::{DeltaPolynomial, JetVariable, Monomial};

/// Hard cap on S-pairs processed in one basis computation.
pub const DEFAULT_PAIR_BUDGET: usize = 100_000;
/// Guard on the number of variables; jet computations in scope never need
/// more, and the bound keeps elimination runs tractable.
pub const MAX_VARIABLES: usize = 8;

/// A monomial order on jet variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic.
    GrevLex,
    /// Eliminates `eliminate`: monomials are compared grevlex on the
    /// eliminated block first, then grevlex on the rest.
    Block { eliminate: BTreeSet<JetVariable> },
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::GrevLex => grevlex_cmp(a, b, |_| true),
            MonomialOrder::Block { eliminate } => {
                match grevlex_cmp(a, b, |v| eliminate.contains(&v)) {
                    Ordering::Equal => grevlex_cmp(a, b, |v| !eliminate.contains(&v)),
                    ord => ord,
                }
            }
        }
    }
}

/// Grevlex on the sub-monomial of variables selected by `keep`: total degree
/// first, ties broken by the smallest variable where the exponents differ,
/// larger exponent there meaning smaller monomial.
fn grevlex_cmp(a: &Monomial, b: &Monomial, keep: impl Fn(JetVariable) -> bool) -> Ordering {
    let da: u64 = a.exps().iter().filter(|&&(v, _)| keep(v)).map(|&(_, e)| e).sum();
    let db: u64 = b.exps().iter().filter(|&&(v, _)| keep(v)).map(|&(_, e)| e).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        ord => return ord,
    }
    // walk the union of selected variables from smallest up
    let mut ia = a.exps().iter().filter(|&&(v, _)| keep(v)).peekable();
    let mut ib = b.exps().iter().filter(|&&(v, _)| keep(v)).peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (None, None) => return Ordering::Equal,
            (Some(&&(va, ea)), Some(&&(vb, eb))) => match va.cmp(&vb) {
                // a has the smaller variable: its exponent there is larger
                // than b's zero, so a is grevlex-smaller
                Ordering::Less => return Ordering::Less,
                Ordering::Greater => return Ordering::Greater,
                Ordering::Equal => match ea.cmp(&eb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        ia.next();
                        ib.next();
                    }
                },
            },
            (Some(_), None) => return Ordering::Less,
            (None, Some(_)) => return Ordering::Greater,
        }
    }
}

/// A polynomial over F_p, coefficients canonical in 1..p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPolynomial {
    p: u64,
    terms: BTreeMap<Monomial, u64>,
}

impl FpPolynomial {
    pub fn zero(p: u64) -> Self {
        FpPolynomial {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: u64, p: u64) -> Self {
        let mut f = FpPolynomial::zero(p);
        f.add_term(Monomial::one(), c);
        f
    }

    pub fn monomial(m: Monomial, c: u64, p: u64) -> Self {
        let mut f = FpPolynomial::zero(p);
        f.add_term(m, c);
        f
    }

    pub fn var(v: JetVariable, p: u64) -> Self {
        FpPolynomial::monomial(Monomial::var(v), 1, p)
    }

    /// Mod-p reduction of a jet polynomial; errors when a p-adic coefficient
    /// has no certified digit left.
    pub fn from_delta_poly(f: &DeltaPolynomial) -> Result<Self> {
        if let Some(0) = f.precision_floor() {
            return Err(Error::InsufficientPrecision(
                "mod-p reduction at precision floor 0".into(),
            ));
        }
        let ctx = *f.ctx();
        let mut out = FpPolynomial::zero(ctx.p());
        for (m, c) in f.terms() {
            out.add_term(m.clone(), c.mod_p(&ctx)?);
        }
        Ok(out)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &u64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn variables(&self) -> BTreeSet<JetVariable> {
        self.terms
            .keys()
            .flat_map(|m| m.exps().iter().map(|&(v, _)| v))
            .collect()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: u64) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m);
        use std::collections::btree_map::Entry;
        match entry {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = (e.get() + c) % self.p;
                if s == 0 {
                    e.remove();
                } else {
                    e.insert(s);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = FpPolynomial::zero(self.p);
        for (m, &c) in &self.terms {
            out.add_term(m.clone(), self.p - c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let mut out = FpPolynomial::zero(self.p);
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                out.add_term(m1.mul(m2), mulmod(c1, c2, self.p));
            }
        }
        out
    }

    pub fn scale(&self, c: u64) -> Self {
        let mut out = FpPolynomial::zero(self.p);
        for (m, &k) in &self.terms {
            out.add_term(m.clone(), mulmod(k, c, self.p));
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: u64) -> Self {
        let mut out = FpPolynomial::zero(self.p);
        for (m1, &c1) in &self.terms {
            out.add_term(m1.mul(m), mulmod(c1, c, self.p));
        }
        out
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut result = FpPolynomial::constant(1, self.p);
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

    pub fn leading(&self, order: &MonomialOrder) -> Option<(&Monomial, u64)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp(a.0, b.0))
            .map(|(m, &c)| (m, c))
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn invmod(a: u64, p: u64) -> u64 {
    // Fermat: a^{p-2} mod p
    let mut r = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, base, p);
        }
        base = mulmod(base, base, p);
        e >>= 1;
    }
    r
}

impl fmt::Display for FpPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Monomial, &u64)> = self.terms.iter().collect();
        terms.sort_by(|a, b| crate::poly::deglex_cmp(b.0, a.0));
        let mut first = true;
        for (m, &c) in terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{}", c)?;
                continue;
            }
            if c != 1 {
                write!(f, "{}*", c)?;
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
        Ok(())
    }
}

/// A reduced, monic Groebner basis; canonical for its order, so equality of
/// bases decides equality of ideals.
#[derive(Debug, Clone, PartialEq)]
pub struct GroebnerBasis {
    pub generators: Vec<FpPolynomial>,
    pub order: MonomialOrder,
    p: u64,
}

impl GroebnerBasis {
    pub fn is_unit(&self) -> bool {
        self.generators.len() == 1
            && self.generators[0].num_terms() == 1
            && self.generators[0].terms.keys().next().unwrap().is_one()
    }
}

/// Buchberger's algorithm with the coprimality criterion, followed by
/// minimalization and full reduction.
pub fn groebner(gens: &[FpPolynomial], order: MonomialOrder, pair_budget: usize) -> Result<GroebnerBasis> {
    let p = gens.iter().map(|g| g.p).next().unwrap_or(3);
    let vars: BTreeSet<JetVariable> = gens.iter().flat_map(|g| g.variables()).collect();
    if vars.len() > MAX_VARIABLES {
        return Err(Error::TooManyVariables(vars.len()));
    }
    // interreduce the input first: generators like delta-iterates shrink
    // dramatically against low-degree relations, which keeps S-polynomial
    // sizes manageable
    let mut seed: Vec<FpPolynomial> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    seed.sort_by(|a, b| {
        let (ma, _) = a.leading(&order).unwrap();
        let (mb, _) = b.leading(&order).unwrap();
        order.cmp(ma, mb)
    });
    let mut basis: Vec<FpPolynomial> = Vec::new();
    for g in seed {
        let r = normal_form_raw(&g, &basis, &order);
        if !r.is_zero() {
            basis.push(r);
        }
    }
    let pair_degree = |basis: &[FpPolynomial], i: usize, j: usize| {
        let (lmi, _) = basis[i].leading(&order).unwrap();
        let (lmj, _) = basis[j].leading(&order).unwrap();
        lcm_monomial(lmi, lmj).total_degree()
    };
    let mut pairs: Vec<(usize, usize, u64)> = Vec::new();
    for i in 0..basis.len() {
        for j in 0..i {
            pairs.push((j, i, pair_degree(&basis, j, i)));
        }
    }
    let mut processed = 0usize;
    while !pairs.is_empty() {
        // normal selection strategy: smallest lcm degree first
        let idx = pairs
            .iter()
            .enumerate()
            .min_by_key(|(_, &(_, _, d))| d)
            .map(|(idx, _)| idx)
            .unwrap();
        let (i, j, _) = pairs.swap_remove(idx);
        processed += 1;
        if processed > pair_budget {
            return Err(Error::PairBudget {
                pairs: processed,
                budget: pair_budget,
            });
        }
        let (lmi, lci) = basis[i].leading(&order).unwrap();
        let (lmj, lcj) = basis[j].leading(&order).unwrap();
        // coprime leading monomials reduce to zero
        let lcm = lcm_monomial(lmi, lmj);
        if lcm.total_degree() == lmi.total_degree() + lmj.total_degree() {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j], lmi, lci, lmj, lcj, &lcm, p);
        let r = normal_form_raw(&s, &basis, &order);
        if !r.is_zero() {
            let k = basis.len();
            basis.push(r);
            for t in 0..k {
                pairs.push((t, k, pair_degree(&basis, t, k)));
            }
        }
    }
    Ok(reduce_basis(basis, order, p))
}

fn lcm_monomial(a: &Monomial, b: &Monomial) -> Monomial {
    let mut vars: Vec<JetVariable> = a.exps().iter().chain(b.exps()).map(|&(v, _)| v).collect();
    vars.sort();
    vars.dedup();
    Monomial::from_exps(
        vars.into_iter()
            .map(|v| (v, a.exponent(v).max(b.exponent(v))))
            .collect(),
    )
}

#[allow(clippy::too_many_arguments)]
fn s_polynomial(
    f: &FpPolynomial,
    g: &FpPolynomial,
    lmf: &Monomial,
    lcf: u64,
    lmg: &Monomial,
    lcg: u64,
    lcm: &Monomial,
    p: u64,
) -> FpPolynomial {
    let mf = lcm.div(lmf).unwrap();
    let mg = lcm.div(lmg).unwrap();
    f.mul_monomial(&mf, invmod(lcf, p))
        .sub(&g.mul_monomial(&mg, invmod(lcg, p)))
}

fn normal_form_raw(f: &FpPolynomial, basis: &[FpPolynomial], order: &MonomialOrder) -> FpPolynomial {
    let p = f.p;
    let mut rem = FpPolynomial::zero(p);
    let mut work = f.clone();
    'outer: while let Some((lm, lc)) = work.leading(order) {
        let lm = lm.clone();
        for g in basis {
            if g.is_zero() {
                continue;
            }
            let (gm, gc) = g.leading(order).unwrap();
            if let Some(q) = lm.div(gm) {
                let c = mulmod(lc, invmod(gc, p), p);
                work = work.sub(&g.mul_monomial(&q, c));
                continue 'outer;
            }
        }
        // leading term irreducible: move it to the remainder
        rem.add_term(lm.clone(), lc);
        work.terms.remove(&lm);
    }
    rem
}

fn reduce_basis(mut basis: Vec<FpPolynomial>, order: MonomialOrder, p: u64) -> GroebnerBasis {
    // minimalize: drop elements whose leading monomial is divisible by
    // another's
    basis.retain(|g| !g.is_zero());
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        let (lmi, _) = basis[i].leading(&order).unwrap();
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            let (lmj, _) = basis[j].leading(&order).unwrap();
            if lmj.divides(lmi) && (lmi != lmj || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let minimal: Vec<FpPolynomial> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(g, k)| k.then_some(g))
        .collect();
    // fully reduce each element against the others and make monic
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<FpPolynomial> = minimal
            .iter()
            .enumerate()
            .filter_map(|(j, g)| (j != i).then(|| g.clone()))
            .collect();
        let r = normal_form_raw(&minimal[i], &others, &order);
        if r.is_zero() {
            continue;
        }
        let (_, lc) = r.leading(&order).unwrap();
        reduced.push(r.scale(invmod(lc, p)));
    }
    reduced.sort_by(|a, b| {
        let (ma, _) = a.leading(&order).unwrap();
        let (mb, _) = b.leading(&order).unwrap();
        order.cmp(ma, mb)
    });
    GroebnerBasis {
        generators: reduced,
        order,
        p,
    }
}

/// Unique remainder of `f` against the reduced basis; zero iff `f` lies in
/// the ideal.
pub fn normal_form(f: &FpPolynomial, basis: &GroebnerBasis) -> FpPolynomial {
    normal_form_raw(f, &basis.generators, &basis.order)
}

/// Decides equality of the ideals generated by the two families.
pub fn ideal_equal(a: &[FpPolynomial], b: &[FpPolynomial]) -> Result<bool> {
    let ga = groebner(a, MonomialOrder::GrevLex, DEFAULT_PAIR_BUDGET)?;
    let gb = groebner(b, MonomialOrder::GrevLex, DEFAULT_PAIR_BUDGET)?;
    Ok(ga.generators == gb.generators)
}

pub fn is_unit_ideal(gens: &[FpPolynomial]) -> Result<bool> {
    Ok(groebner(gens, MonomialOrder::GrevLex, DEFAULT_PAIR_BUDGET)?.is_unit())
}

/// Contraction of the ideal to `k[keep]`, by a block elimination order.
///
/// In the block order every monomial containing an eliminated variable
/// exceeds every monomial without one, so a basis element whose leading
/// monomial avoids the eliminated block avoids it everywhere; those elements
/// generate the contraction.
pub fn eliminate(gens: &[FpPolynomial], keep: &BTreeSet<JetVariable>) -> Result<Vec<FpPolynomial>> {
    let all: BTreeSet<JetVariable> = gens.iter().flat_map(|g| g.variables()).collect();
    let eliminate: BTreeSet<JetVariable> = all.difference(keep).copied().collect();
    if eliminate.is_empty() {
        let g = groebner(gens, MonomialOrder::GrevLex, DEFAULT_PAIR_BUDGET)?;
        return Ok(g.generators);
    }
    let order = MonomialOrder::Block { eliminate: eliminate.clone() };
    let g = groebner(gens, order, DEFAULT_PAIR_BUDGET)?;
    Ok(g.generators
        .into_iter()
        .filter(|f| f.variables().is_disjoint(&eliminate))
        .collect())
}

/// Standard monomials of the basis inside the polynomial ring on `vars`.
#[derive(Debug, Clone)]
pub struct StandardMonomials {
    pub finite: bool,
    /// Count when finite (capped at `bound`; `truncated` set if hit).
    pub monomials: Vec<Monomial>,
    pub truncated: bool,
    /// Variables with no pure power among the leading terms.
    pub free_variables: Vec<JetVariable>,
}

/// Enumerates monomials outside the leading-term ideal. The quotient is
/// finite-dimensional iff every ring variable occurs as a pure power among
/// the leading monomials.
pub fn standard_monomials(
    basis: &GroebnerBasis,
    vars: &BTreeSet<JetVariable>,
    bound: usize,
) -> StandardMonomials {
    let leads: Vec<Monomial> = basis
        .generators
        .iter()
        .map(|g| g.leading(&basis.order).unwrap().0.clone())
        .collect();
    if basis.is_unit() {
        return StandardMonomials {
            finite: true,
            monomials: Vec::new(),
            truncated: false,
            free_variables: Vec::new(),
        };
    }
    // per-variable caps: the exponent of a pure-power leading term
    let mut caps: BTreeMap<JetVariable, u64> = BTreeMap::new();
    let mut free: Vec<JetVariable> = Vec::new();
    for &v in vars {
        let cap = leads
            .iter()
            .filter(|m| m.exps().len() == 1 && m.exps()[0].0 == v)
            .map(|m| m.exps()[0].1)
            .min();
        match cap {
            Some(c) => {
                caps.insert(v, c);
            }
            None => free.push(v),
        }
    }
    if !free.is_empty() {
        return StandardMonomials {
            finite: false,
            monomials: Vec::new(),
            truncated: false,
            free_variables: free,
        };
    }
    // enumerate the box and filter by divisibility
    let var_list: Vec<(JetVariable, u64)> = caps.into_iter().collect();
    let mut out = Vec::new();
    let mut truncated = false;
    let mut stack: Vec<(usize, Vec<(JetVariable, u64)>)> = vec![(0, Vec::new())];
    while let Some((i, acc)) = stack.pop() {
        if i == var_list.len() {
            let m = Monomial::from_exps(acc);
            if !leads.iter().any(|l| l.divides(&m)) {
                if out.len() >= bound {
                    truncated = true;
                    break;
                }
                out.push(m);
            }
            continue;
        }
        let (v, cap) = var_list[i];
        for e in (0..cap).rev() {
            let mut next = acc.clone();
            if e > 0 {
                next.push((v, e));
            }
            stack.push((i + 1, next));
        }
    }
    out.sort_by(|a, b| basis.order.cmp(a, b));
    StandardMonomials {
        finite: true,
        monomials: out,
        truncated,
        free_variables: Vec::new(),
    }
}

/// Parses the polynomial text grammar directly into F_p coefficients.
pub fn parse_fp(input: &str, ctx: PrimeContext) -> Result<FpPolynomial> {
    FpPolynomial::from_delta_poly(&crate::poly::text::parse(input, ctx)?)
}

#[cfg(test)]
mod tests;
