//! Named verification suites over the jet engine, each producing
//! serializable reports: leading-form and vanishing checks for
//! delta-iterates, filtration expansions, the structure of reduced jet
//! rings of roots of unity and their torsors, Eisenstein vanishing, formal
//! kernels, pushforward leading forms, product mechanisms, component
//! unions, and randomized identity suites.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::arith::{self, PrimeContext, Valuation};
use crate::error::{Error, Result};
use crate::filtration;
use crate::fp::{self, FpPolynomial, MonomialOrder};
use crate::jet::{self, SchemePresentation};
use crate::poly::{self, Coeff, DeltaPolynomial, JetVariable, Monomial};
use crate::series::{self, TruncatedSeries};

/// Default seed for the randomized suites; override with `PJET_SEED`.
pub const DEFAULT_SEED: u64 = 0x706a6574;

pub fn seed_from_env() -> u64 {
    std::env::var("PJET_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct CaseParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
}

impl CaseParams {
    fn pn(p: u64, n: u32) -> Self {
        CaseParams {
            p: Some(p),
            n: Some(n),
            ..Default::default()
        }
    }

    fn pnun(p: u64, nu: u32, n: u32) -> Self {
        CaseParams {
            p: Some(p),
            nu: Some(nu),
            n: Some(n),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    CannotCertify,
    BudgetExceeded,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub params: CaseParams,
    pub status: Status,
    pub witness: String,
    pub ms: u128,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn run_case(
    check: &str,
    params: CaseParams,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> VerificationReport {
    let start = Instant::now();
    let (status, witness) = match body() {
        Ok((true, w)) => (Status::Pass, w),
        Ok((false, w)) => (Status::Fail, w),
        Err(Error::TermBudget { terms, budget }) => (
            Status::BudgetExceeded,
            format!("term budget exceeded: {} > {}", terms, budget),
        ),
        Err(Error::PairBudget { pairs, budget }) => (
            Status::BudgetExceeded,
            format!("pair budget exceeded: {} > {}", pairs, budget),
        ),
        Err(e) => (Status::CannotCertify, e.to_string()),
    };
    VerificationReport {
        check: check.to_string(),
        params,
        status,
        witness,
        ms: start.elapsed().as_millis(),
    }
}

fn x_var() -> JetVariable {
    JetVariable::new(0, 0)
}

fn from_check(r: jet::CheckReport) -> (bool, String) {
    (r.holds, r.detail)
}

fn ideal_text(gens: &[FpPolynomial]) -> String {
    let strs: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
    format!("({})", strs.join(", "))
}

/// Vanishing and leading forms of `delta^i(x^{p^nu})` mod p for 1 <= i <= n.
pub fn suite_modpp(p: u64, nu: u32, n: u32) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    for i in 1..=n {
        out.push(run_case(
            &format!("modpp.delta{}", i),
            CaseParams::pnun(p, nu, i),
            || {
                let ctx = PrimeContext::new(p)?;
                let d = DeltaPolynomial::var(x_var(), ctx)
                    .pow(ctx.p().pow(nu), poly::DEFAULT_TERM_BUDGET)?
                    .with_precision(i + 1)?
                    .delta_iter(i)?;
                let img = FpPolynomial::from_delta_poly(&d)?;
                if i <= nu {
                    return Ok((img.is_zero(), format!("delta^{}(x^{}^{})", i, p, nu)));
                }
                let main = FpPolynomial::monomial(
                    Monomial::var_pow(x_var(), ctx.p().pow(i) * (ctx.p().pow(nu) - 1)).mul(
                        &Monomial::var_pow(
                            JetVariable::new(0, (i - nu) as u16),
                            ctx.p().pow(nu),
                        ),
                    ),
                    1,
                    p,
                );
                let rest = img.sub(&main);
                if i == nu + 1 {
                    return Ok((rest.is_zero(), format!("remainder {}", rest)));
                }
                let ok = rest.terms().all(|(m, _)| (m.max_order() as u32) < i - nu);
                Ok((ok, format!("remainder {}", rest)))
            },
        ));
    }
    out
}

/// Two-case expansion of `delta^i(x^{p^nu})` against its main term and
/// remainder filtration class, for 1 <= i <= n.
pub fn suite_coo(p: u64, nu: u32, n: u32) -> Vec<VerificationReport> {
    (1..=n)
        .map(|i| {
            run_case(
                &format!("coo.delta{}", i),
                CaseParams::pnun(p, nu, i),
                || {
                    let r = filtration::check_coo_expansion(p, nu, i, poly::DEFAULT_TERM_BUDGET)?;
                    Ok((r.holds, format!("case {}: {}", r.case, r.detail)))
                },
            )
        })
        .collect()
}

fn expected_reduced_mu(p: u64, nu: u32, n: u32, ctx: PrimeContext) -> Vec<FpPolynomial> {
    let mut gens = vec![FpPolynomial::var(x_var(), p)
        .pow(ctx.p().pow(nu))
        .sub(&FpPolynomial::constant(1, p))];
    if n > nu {
        for i in 1..=(n - nu) {
            gens.push(FpPolynomial::var(JetVariable::new(0, i as u16), p).pow(ctx.p().pow(nu)));
        }
    }
    gens
}

/// Structure of the reduced and stabilized jet rings of `mu_{p^nu}` and its
/// torsors `x^{p^nu} = a`.
pub fn suite_str(p: u64, nu: u32, n: u32, a: &BigInt) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    if a.is_one() {
        out.push(run_case("str.reduced-ideal", CaseParams::pnun(p, nu, n), || {
            let ctx = PrimeContext::new(p)?;
            let gens = jet::reduce_jet(&jet::build_mu(nu, ctx), n, poly::DEFAULT_TERM_BUDGET)?;
            let expected = expected_reduced_mu(p, nu, n, ctx);
            Ok((
                fp::ideal_equal(&gens, &expected)?,
                format!("computed {}", ideal_text(&gens)),
            ))
        }));
        out.push(run_case("str.tilde-ideal", CaseParams::pnun(p, nu, n), || {
            let ctx = PrimeContext::new(p)?;
            let t = jet::tilde_ring(&jet::build_mu(nu, ctx), n, nu + 1)?;
            let expected = jet::pure_power_ideal(nu, n, true, ctx);
            let equal = fp::ideal_equal(&t.basis.generators, &expected)?;
            let vars = t.basis.generators.iter().fold(
                std::collections::BTreeSet::new(),
                |mut acc, g| {
                    acc.extend(g.variables());
                    acc
                },
            );
            let sm = fp::standard_monomials(&t.basis, &vars, 1_000_000);
            let count_ok = sm.finite
                && !sm.truncated
                && sm.monomials.len() as u64 == p.pow(nu * (n + 1));
            Ok((
                equal && t.stabilized && count_ok,
                format!(
                    "ideal {}, stabilized {}, standard monomials {}",
                    ideal_text(&t.basis.generators),
                    t.stabilized,
                    sm.monomials.len()
                ),
            ))
        }));
        out.push(run_case("str.nilpotent-witness", CaseParams::pnun(p, nu, 1), || {
            // x' survives in the level-1 reduced ring, yet its p^nu-th power
            // lies in the stabilized ideal
            let ctx = PrimeContext::new(p)?;
            let gens = jet::reduce_jet(&jet::build_mu(nu, ctx), 1, poly::DEFAULT_TERM_BUDGET)?;
            let basis = fp::groebner(&gens, MonomialOrder::GrevLex, fp::DEFAULT_PAIR_BUDGET)?;
            let xp = FpPolynomial::var(JetVariable::new(0, 1), p);
            let survives = !fp::normal_form(&xp, &basis).is_zero();
            let t = jet::tilde_ring(&jet::build_mu(nu, ctx), 1, nu + 1)?;
            let dead = fp::normal_form(&xp.pow(PrimeContext::new(p)?.p().pow(nu)), &t.basis)
                .is_zero();
            Ok((
                survives && dead,
                format!("x' nonzero in reduced ring: {}, nilpotent in image: {}", survives, dead),
            ))
        }));
        return out;
    }
    let params = CaseParams {
        p: Some(p),
        nu: Some(nu),
        n: Some(n),
        a: Some(a.to_string()),
        ..Default::default()
    };
    out.push(run_case("str.torsor", params, || {
        let ctx = PrimeContext::new(p)?;
        let u = match arith::u_level(a, &ctx)? {
            Valuation::Finite(u) => u as u32,
            Valuation::Infinite => u32::MAX,
        };
        if u <= nu {
            // vanishing branch: the reduced jet ring is the zero ring from
            // level u on
            let t = jet::build_mu_torsor(nu, Coeff::Int(a.clone()), ctx)?;
            for m in [u, u.max(n)] {
                let gens = jet::reduce_jet(&t, m, poly::DEFAULT_TERM_BUDGET)?;
                if !fp::is_unit_ideal(&gens)? {
                    return Ok((false, format!("level {} not the zero ring", m)));
                }
            }
            return Ok((true, format!("zero ring from level {} on", u)));
        }
        // isomorphism branch for exact p^nu-th powers: the substituted image
        // of the torsor's jet relations equals the mu jet ideal
        let e = ctx.p().pow(nu);
        let b = a.nth_root(e as u32);
        if num_traits::pow::pow(b.clone(), e as usize) != *a {
            return Err(Error::CannotCertify(
                "torsor parameter is not an exact p^nu-th power".into(),
            ));
        }
        let t = jet::build_mu_torsor(nu, Coeff::Int(a.clone()), ctx)?;
        let mu_gens = jet::reduce_jet(&jet::build_mu(nu, ctx), n, poly::DEFAULT_TERM_BUDGET)?;
        let jets = jet::jet_presentation_budgeted(
            &SchemePresentation {
                name: String::new(),
                relation: t.relation.with_precision(n + 1)?,
                torsor_form: None,
            },
            n,
            poly::DEFAULT_TERM_BUDGET,
        )?;
        let mut sub = BTreeMap::new();
        let mut img = DeltaPolynomial::var(x_var(), ctx)
            .scale(&Coeff::Int(b.clone()))
            .with_precision(n + 1)?;
        for i in 0..=n {
            sub.insert(JetVariable::new(0, i as u16), img.clone());
            if i < n {
                img = img.delta()?;
            }
        }
        let substituted: Result<Vec<FpPolynomial>> = jets
            .relations
            .iter()
            .map(|r| FpPolynomial::from_delta_poly(&r.substitute(&sub)?))
            .collect();
        let substituted = substituted?;
        Ok((
            fp::ideal_equal(&mu_gens, &substituted)?,
            format!("substitution x -> {}x identifies the jet ideals", b),
        ))
    }));
    out
}

/// Structure of the reduced and stabilized jet rings of a formal kernel
/// `X_nu` cut out by the distinguished polynomial of the nu-th iterate.
pub fn suite_mor(f: &TruncatedSeries, nu: u32, n: u32, tilde_budget: u32) -> Vec<VerificationReport> {
    let p = f.ctx().p();
    let mut out = Vec::new();
    out.push(run_case("mor.reduced-ideal", CaseParams::pnun(p, nu, n), || {
        let ctx = *f.ctx();
        let s = jet::build_formal_kernel(f, nu)?;
        let gens = jet::reduce_jet(&s, n, poly::DEFAULT_TERM_BUDGET)?;
        if n >= nu {
            let expected = jet::pure_power_ideal(nu, n - nu, false, ctx);
            return Ok((
                fp::ideal_equal(&gens, &expected)?,
                format!("computed {}", ideal_text(&gens)),
            ));
        }
        // 1 <= n <= nu-1: a single pure power x^m with m >= p^nu
        let basis = fp::groebner(&gens, MonomialOrder::GrevLex, fp::DEFAULT_PAIR_BUDGET)?;
        let ok = match basis.generators.as_slice() {
            [g] => {
                let ts: Vec<_> = g.terms().collect();
                ts.len() == 1
                    && *ts[0].1 == 1
                    && ts[0].0.exps().len() == 1
                    && ts[0].0.exps()[0].0 == x_var()
                    && ts[0].0.exps()[0].1 >= ctx.p().pow(nu)
            }
            _ => false,
        };
        Ok((ok, format!("computed {}", ideal_text(&basis.generators))))
    }));
    if n >= 1 {
        out.push(run_case("mor.tilde-ideal", CaseParams::pnun(p, nu, n), || {
            let ctx = *f.ctx();
            let s = jet::build_formal_kernel(f, nu)?;
            let t = jet::tilde_ring(&s, n, tilde_budget)?;
            let expected = jet::pure_power_ideal(nu, n, false, ctx);
            Ok((
                fp::ideal_equal(&t.basis.generators, &expected)? && t.stabilized,
                format!(
                    "ideal {}, stabilized {}",
                    ideal_text(&t.basis.generators),
                    t.stabilized
                ),
            ))
        }));
    }
    out
}

/// Eisenstein schemes have zero level-1 reduced jet rings.
pub fn suite_eisenstein(p: u64) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    for (label, build) in [
        ("eisenstein.phi-p", 1u32),
        ("eisenstein.phi-p2", 2),
        ("eisenstein.x2-p", 0),
    ] {
        out.push(run_case(label, CaseParams::pn(p, 1), move || {
            let ctx = PrimeContext::new(p)?;
            let s = if build == 0 {
                jet::build_eisenstein(&[-ctx.big(), num_traits::Zero::zero()], ctx)?
            } else {
                jet::build_shifted_cyclotomic(build, ctx)?
            };
            let gens = jet::reduce_jet(&s, 1, poly::DEFAULT_TERM_BUDGET)?;
            Ok((
                fp::is_unit_ideal(&gens)?,
                format!("{} level-1 ideal {}", s.name, ideal_text(&gens)),
            ))
        }));
    }
    out
}

pub fn suite_aftert(p: u64, nu: u32, n: u32) -> Vec<VerificationReport> {
    vec![run_case("aftert", CaseParams::pnun(p, nu, n), || {
        Ok(from_check(jet::verify_aftert(nu, n, PrimeContext::new(p)?)?))
    })]
}

pub fn suite_smow(p: u64, n: u32) -> Vec<VerificationReport> {
    vec![run_case("smow", CaseParams::pn(p, n), || {
        Ok(from_check(jet::verify_smow(n, PrimeContext::new(p)?)?))
    })]
}

pub fn suite_union(p: u64, nu: u32, n: u32) -> Vec<VerificationReport> {
    vec![
        run_case("union.order0", CaseParams::pnun(p, nu, 0), || {
            Ok(from_check(jet::verify_union_remark(nu, 0, PrimeContext::new(p)?)?))
        }),
        run_case("union", CaseParams::pnun(p, nu, n), || {
            Ok(from_check(jet::verify_union_remark(nu, n, PrimeContext::new(p)?)?))
        }),
    ]
}

fn random_poly(rng: &mut StdRng, ctx: PrimeContext, max_order: u16) -> DeltaPolynomial {
    let mut f = DeltaPolynomial::zero(ctx);
    for _ in 0..3 {
        let mut m = Monomial::one();
        for order in 0..=max_order {
            let e = rng.gen_range(0..=2u64);
            if e > 0 {
                m = m.mul(&Monomial::var_pow(JetVariable::new(0, order), e));
            }
        }
        let c = rng.gen_range(-9i64..=9);
        if c != 0 {
            f = f.add(&DeltaPolynomial::monomial(m, Coeff::Int(BigInt::from(c)), ctx));
        }
    }
    f
}

/// Randomized identity suites: delta-ring axioms, commutation with the
/// Frobenius lift, leading-form expansions, exponent mechanisms, shape of
/// the carry remainders, series filtration stability.
pub fn suite_lemmas(p: u64, seed: u64) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    let params = CaseParams {
        p: Some(p),
        ..Default::default()
    };
    out.push(run_case("lemmas.delta-ring-axioms", params.clone(), || {
        let ctx = PrimeContext::new(p)?;
        let mut rng = StdRng::seed_from_u64(seed);
        for trial in 0..5 {
            let f = random_poly(&mut rng, ctx, 1);
            let g = random_poly(&mut rng, ctx, 1);
            // sum rule with the carry polynomial
            let lhs = f.add(&g).delta()?;
            let carry = crate::arith::cp_multi(&[f.clone(), g.clone()], &ctx)?;
            let rhs = f.delta()?.add(&g.delta()?).add(&carry);
            if !lhs.sub(&rhs).is_zero() {
                return Ok((false, format!("sum rule fails at trial {}", trial)));
            }
            // twisted Leibniz rule
            let lhs = f.mul(&g).delta()?;
            let rhs = f
                .phi()?
                .mul(&g.delta()?)
                .add(&g.pow(p, poly::DEFAULT_TERM_BUDGET)?.mul(&f.delta()?));
            if !lhs.sub(&rhs).is_zero() {
                return Ok((false, format!("Leibniz rule fails at trial {}", trial)));
            }
            // phi delta = delta phi
            if !f.phi()?.delta()?.sub(&f.delta()?.phi()?).is_zero() {
                return Ok((false, format!("phi/delta commutation fails at trial {}", trial)));
            }
        }
        Ok((true, "5 random trials".into()))
    }));
    out.push(run_case("lemmas.deltafp-expansion", params.clone(), || {
        let ctx = PrimeContext::new(p)?;
        let mut rng = StdRng::seed_from_u64(seed ^ 1);
        for nu in 1..=2u32 {
            for _ in 0..2 {
                let f = random_poly(&mut rng, ctx, 1);
                if f.is_zero() {
                    continue;
                }
                let r = poly::check_deltafp_identity(&f, nu)?;
                if !r.holds {
                    return Ok((false, r.detail));
                }
            }
        }
        Ok((true, "expansion of delta(f^{p^nu}) on random f, nu <= 2".into()))
    }));
    out.push(run_case("lemmas.xp-exponents", params.clone(), || {
        let ctx = PrimeContext::new(p)?;
        let mut d = DeltaPolynomial::var(x_var(), ctx)
            .pow(p, poly::DEFAULT_TERM_BUDGET)?
            .with_precision(4)?;
        for i in 0..=3u32 {
            for (m, _) in d.terms() {
                if m.exponent(x_var()) % p != 0 {
                    return Ok((false, format!("bare x power in delta^{}(x^p)", i)));
                }
            }
            if i < 3 {
                d = d.delta()?;
            }
        }
        Ok((true, "x appears only through x^p in delta-iterates of x^p".into()))
    }));
    out.push(run_case("lemmas.remainder-shape", params.clone(), || {
        // delta^n(x^{p^nu}) has no constant or linear monomials
        let ctx = PrimeContext::new(p)?;
        for nu in 1..=2u32 {
            let mut d = DeltaPolynomial::var(x_var(), ctx)
                .pow(ctx.p().pow(nu), poly::DEFAULT_TERM_BUDGET)?
                .with_precision(4)?;
            for _ in 0..3 {
                d = d.delta()?;
                for (m, _) in d.terms() {
                    let deg: u64 = m.exps().iter().map(|&(_, e)| e).sum();
                    if deg <= 1 {
                        return Ok((false, format!("low-degree monomial of degree {} appears", deg)));
                    }
                }
            }
        }
        Ok((true, "no constant or linear terms in delta-iterates".into()))
    }));
    out.push(run_case("lemmas.series-filtration", params.clone(), || {
        let lit = format!("{}*x + x^{}", p, p * p);
        let f = series::parse_series(&lit, Some(p), 6, 200)?;
        for nu in 1..=2u32 {
            let it = f.iterate(nu)?;
            if !series::in_series_filtration(&it, nu)? {
                return Ok((false, format!("iterate {} escapes its filtration level", nu)));
            }
        }
        Ok((true, "iterates stay in the series filtration".into()))
    }));
    out.push(run_case("lemmas.main-term-instance", params.clone(), || {
        // delta^2(p G(x^p)) for G = x + x^2: main term
        // phi((dG/dx)(x^p)^p delta(x^p)) plus a remainder in the bracket
        // ideal with scaled-brace membership
        let ctx = PrimeContext::new(p)?;
        let xp = DeltaPolynomial::var(x_var(), ctx).pow(p, poly::DEFAULT_TERM_BUDGET)?;
        let g_of_xp = xp.add(&xp.mul(&xp));
        let lhs = g_of_xp.scale(&Coeff::Int(ctx.big())).delta_iter(2)?;
        let dg = DeltaPolynomial::from_int(1, ctx)
            .add(&xp.scale_int(2))
            .pow(p, poly::DEFAULT_TERM_BUDGET)?;
        let main = dg.mul(&xp.delta()?).phi()?;
        let r = lhs.sub(&main);
        let bracket = filtration::in_bracket_ideal(&r, 1, true)?;
        Ok((
            bracket.holds,
            format!(
                "remainder bracket membership: {}",
                bracket.offending_term.unwrap_or_else(|| "ok".into())
            ),
        ))
    }));
    out
}

/// The baked acceptance grid behind `verify all`: every suite at its
/// smallest meaningful parameters.
pub fn acceptance_grid(quick: bool) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    out.extend(suite_modpp(3, 1, 3));
    out.extend(suite_modpp(3, 2, 3));
    out.extend(suite_modpp(5, 1, 2));
    if !quick {
        out.extend(suite_modpp(5, 2, 3));
    }
    out.extend(suite_coo(3, 1, 3));
    out.extend(suite_coo(3, 2, 2));
    out.extend(suite_str(3, 1, 2, &BigInt::one()));
    out.extend(suite_str(3, 1, 1, &BigInt::from(4)));
    out.extend(suite_str(3, 2, 2, &BigInt::from(4)));
    out.extend(suite_str(3, 1, 2, &BigInt::from(64)));
    out.extend(suite_eisenstein(3));
    out.extend(suite_eisenstein(5));
    if let Ok(f) = series::parse_series("3*x + x^9", Some(3), 6, 120) {
        out.extend(suite_mor(&f, 1, 1, 2));
        out.extend(suite_mor(&f, 1, 2, 2));
    }
    if let Ok(f) = series::parse_series("x^3 + 3*x^2 + 3*x", Some(3), 6, 120) {
        out.extend(suite_mor(&f, 1, 1, 2));
        out.extend(suite_mor(&f, 2, 1, 3));
        if !quick {
            out.extend(suite_mor(&f, 1, 2, 2));
            out.extend(suite_mor(&f, 2, 2, 3));
        }
    }
    out.extend(suite_aftert(3, 1, 3));
    out.extend(suite_smow(3, 2));
    out.extend(suite_union(3, 1, 1));
    out.extend(suite_union(3, 2, 1));
    out.extend(suite_lemmas(3, seed_from_env()));
    out
}

#[cfg(test)]
mod tests;
