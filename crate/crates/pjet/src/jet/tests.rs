use super::*;
use crate::fp::parse_fp;

fn ctx3() -> PrimeContext {
    PrimeContext::new(3).unwrap()
}

fn fp3(s: &str) -> FpPolynomial {
    parse_fp(s, ctx3()).unwrap()
}

fn ideal_is(gens: &[FpPolynomial], expected: &[&str]) -> bool {
    let exp: Vec<FpPolynomial> = expected.iter().map(|s| fp3(s)).collect();
    fp::ideal_equal(gens, &exp).unwrap()
}

#[test]
fn mu_relation_and_jet_presentation() {
    let mu = build_mu(1, ctx3());
    assert_eq!(mu.relation.to_string(), "x0^3 - 1");
    let j = jet_presentation(&mu, 1).unwrap();
    assert_eq!(j.relations.len(), 2);
    assert_eq!(
        j.relations[1].to_string(),
        "3*x0^6*x1 + 9*x0^3*x1^2 + 9*x1^3"
    );
}

#[test]
fn torsor_jet_relations_use_delta_of_constant() {
    // delta(4) = (4 - 64)/3 = -20
    let t = build_mu_torsor(1, Coeff::Int(BigInt::from(4)), ctx3()).unwrap();
    let j = jet_presentation(&t, 1).unwrap();
    assert_eq!(j.relations[0].to_string(), "x0^3 - 4");
    assert_eq!(
        j.relations[1].to_string(),
        "3*x0^6*x1 + 9*x0^3*x1^2 + 9*x1^3 + 20"
    );
    assert!(build_mu_torsor(1, Coeff::Int(BigInt::from(5)), ctx3()).is_err());
}

#[test]
fn reduced_jet_ideals_of_mu() {
    let mu = build_mu(1, ctx3());
    // delta(x^3) = 0 mod 3, so level 1 adds nothing
    let g1 = reduce_jet(&mu, 1, crate::poly::DEFAULT_TERM_BUDGET).unwrap();
    assert!(ideal_is(&g1, &["x0^3 + 2"]));
    // level 2 brings in (x')^3 through delta^2(x^3) = x^18 (x')^3 mod 3
    let g2 = reduce_jet(&mu, 2, crate::poly::DEFAULT_TERM_BUDGET).unwrap();
    assert!(ideal_is(&g2, &["x0^3 + 2", "x1^3"]));
}

#[test]
fn torsor_with_low_level_is_zero_ring() {
    // a = 4 has u_level 1, so the level-1 reduction is already the unit
    // ideal: delta(x^3) - delta(4) = -(-20) = 20 = 2 mod 3 joins the ideal
    let t = build_mu_torsor(1, Coeff::Int(BigInt::from(4)), ctx3()).unwrap();
    let g = reduce_jet(&t, 1, crate::poly::DEFAULT_TERM_BUDGET).unwrap();
    assert!(fp::is_unit_ideal(&g).unwrap());
}

#[test]
fn ordinary_component_builder() {
    let s = build_ordinary_component(2, 1, 1, &BigInt::from(4), ctx3()).unwrap();
    assert_eq!(s.relation.to_string(), "x0^9 - 64");
    assert!(build_ordinary_component(1, 1, 3, &BigInt::from(4), ctx3()).is_err());
    assert!(build_ordinary_component(1, 1, 1, &BigInt::from(5), ctx3()).is_err());
}

#[test]
fn cyclotomic_and_eisenstein_builders() {
    let phi1 = build_cyclotomic_component(1, ctx3()).unwrap();
    assert_eq!(phi1.relation.to_string(), "x0^2 + x0 + 1");
    let shifted = build_shifted_cyclotomic(1, ctx3()).unwrap();
    assert_eq!(shifted.relation.to_string(), "x0^2 + 3*x0 + 3");
    // x^2 - 3 is Eisenstein; x^2 - 9 is not; x^2 - 1 is not
    assert!(build_eisenstein(&[BigInt::from(-3), BigInt::from(0)], ctx3()).is_ok());
    assert!(build_eisenstein(&[BigInt::from(-9), BigInt::from(0)], ctx3()).is_err());
    assert!(build_eisenstein(&[BigInt::from(-1), BigInt::from(0)], ctx3()).is_err());
}

#[test]
fn eisenstein_level_one_is_zero_ring() {
    for s in [
        build_shifted_cyclotomic(1, ctx3()).unwrap(),
        build_shifted_cyclotomic(2, ctx3()).unwrap(),
        build_eisenstein(&[BigInt::from(-3), BigInt::from(0)], ctx3()).unwrap(),
    ] {
        let g = reduce_jet(&s, 1, crate::poly::DEFAULT_TERM_BUDGET).unwrap();
        assert!(fp::is_unit_ideal(&g).unwrap(), "{} not zero ring", s.name);
    }
}

#[test]
fn formal_kernel_exact_and_composed() {
    let ctx = ctx3();
    let f = series::parse_series("3*x + x^9", Some(3), 4, 100).unwrap();
    let x1 = build_formal_kernel(&f, 1).unwrap();
    assert_eq!(x1.relation.to_string(), "x0^9 + 3*x0");

    let g = series::parse_series("x^3 + 3*x^2 + 3*x", Some(3), 5, 100).unwrap();
    let x2 = build_formal_kernel(&g, 2).unwrap();
    // (1+x)^9 - 1, by exact composition
    let mut expected = DeltaPolynomial::var(x_var(), ctx)
        .add(&DeltaPolynomial::from_int(1, ctx))
        .pow(9, crate::poly::DEFAULT_TERM_BUDGET)
        .unwrap()
        .sub(&DeltaPolynomial::from_int(1, ctx));
    assert!(x2.relation.sub(&expected).is_zero());
    // degenerate degree check
    expected = expected.sub(&x2.relation);
    assert!(expected.is_zero());
}

#[test]
fn formal_kernel_prepared_path() {
    let _ = ctx3();
    let f = series::parse_series("3*x + x^9 + x^10", Some(3), 6, 120).unwrap();
    let x1 = build_formal_kernel(&f, 1).unwrap();
    assert!(x1.relation.precision_floor().is_some());
    let g = reduce_jet(&x1, 1, crate::poly::DEFAULT_TERM_BUDGET).unwrap();
    // reduction of the distinguished polynomial is x^9; level 1 adds (x')-free
    // data only through delta of the relation
    let basis = fp::groebner(&g, MonomialOrder::GrevLex, fp::DEFAULT_PAIR_BUDGET).unwrap();
    assert!(fp::normal_form(&fp3("x0^9"), &basis).is_zero());
}

#[test]
fn tilde_of_mu_stabilizes() {
    let mu = build_mu(1, ctx3());
    let t = tilde_ring(&mu, 1, 2).unwrap();
    assert!(t.stabilized);
    assert_eq!(t.budget_used, 2);
    let expected = pure_power_ideal(1, 1, true, ctx3());
    assert!(fp::ideal_equal(&t.basis.generators, &expected).unwrap());
}

#[test]
fn tilde_of_vanishing_torsor_is_unit() {
    let t = build_mu_torsor(1, Coeff::Int(BigInt::from(4)), ctx3()).unwrap();
    let r = tilde_ring(&t, 1, 2).unwrap();
    assert!(r.basis.is_unit());
}

#[test]
fn tilde_of_height_two_kernel() {
    let ctx = ctx3();
    let f = series::parse_series("3*x + x^9", Some(3), 6, 100).unwrap();
    let x1 = build_formal_kernel(&f, 1).unwrap();
    let r = tilde_ring(&x1, 1, 2).unwrap();
    assert!(r.stabilized);
    let expected = pure_power_ideal(1, 1, false, ctx);
    assert!(fp::ideal_equal(&r.basis.generators, &expected).unwrap());
}

#[test]
fn pushforward_images() {
    let push = isogeny_pushforward(1, 1, ctx3()).unwrap();
    assert_eq!(push[&JetVariable::new(0, 0)].to_string(), "x0^3");
    assert_eq!(
        push[&JetVariable::new(0, 1)].to_string(),
        "3*x0^6*x1 + 9*x0^3*x1^2 + 9*x1^3"
    );
}

#[test]
fn aftert_leading_forms() {
    let r = verify_aftert(1, 3, ctx3()).unwrap();
    assert!(r.holds, "{}", r.detail);
    let r2 = verify_aftert(2, 4, ctx3()).unwrap();
    assert!(r2.holds, "{}", r2.detail);
}

#[test]
fn smow_mechanisms() {
    for n in 1..=2 {
        let r = verify_smow(n, ctx3()).unwrap();
        assert!(r.holds, "n={}: {}", n, r.detail);
    }
}

#[test]
fn union_remark_strict_inclusion() {
    for nu in 1..=2 {
        let r = verify_union_remark(nu, 1, ctx3()).unwrap();
        assert!(r.holds, "nu={}: {}", nu, r.detail);
        let r0 = verify_union_remark(nu, 0, ctx3()).unwrap();
        assert!(r0.holds, "nu={} order 0: {}", nu, r0.detail);
    }
}

#[test]
fn torsor_isomorphism_exact_power() {
    // a = 64 = 4^3: the substitution x^(i) -> delta^i(4x) carries the jet
    // ideal of mu onto the jet ideal of the torsor
    let ctx = ctx3();
    let t = build_mu_torsor(1, Coeff::Int(BigInt::from(64)), ctx).unwrap();
    for n in 1..=2u32 {
        let mu_gens = reduce_jet(&build_mu(1, ctx), n, crate::poly::DEFAULT_TERM_BUDGET).unwrap();
        let torsor_jets = jet_presentation_budgeted(
            &SchemePresentation {
                name: String::new(),
                relation: t.relation.with_precision(n + 1).unwrap(),
                torsor_form: None,
            },
            n,
            crate::poly::DEFAULT_TERM_BUDGET,
        )
        .unwrap();
        let mut sub = BTreeMap::new();
        let four_x = DeltaPolynomial::var(x_var(), ctx).scale_int(4);
        let mut img = four_x.with_precision(n + 1).unwrap();
        for i in 0..=n {
            sub.insert(JetVariable::new(0, i as u16), img.clone());
            if i < n {
                img = img.delta().unwrap();
            }
        }
        let substituted: Vec<FpPolynomial> = torsor_jets
            .relations
            .iter()
            .map(|r| FpPolynomial::from_delta_poly(&r.substitute(&sub).unwrap()).unwrap())
            .collect();
        assert!(fp::ideal_equal(&mu_gens, &substituted).unwrap(), "n={}", n);
    }
}

#[test]
fn torsor_isomorphism_hensel_path() {
    // a = 28 = 1 + 27 is in U_2 but is not an exact cube in Z; use the
    // p-adic cube root instead and compare level-1 ideals
    let ctx = ctx3();
    let prec = 4u32;
    let b = arith::hensel_root(&BigInt::from(28), 3, prec, &ctx).unwrap();
    let a = Coeff::Padic(b.pow(3));
    let t = build_mu_torsor(1, a, ctx).unwrap();
    let mu_gens = reduce_jet(&build_mu(1, ctx), 1, crate::poly::DEFAULT_TERM_BUDGET).unwrap();
    let bx = DeltaPolynomial::var(x_var(), ctx)
        .scale(&Coeff::Padic(b.truncate(2).unwrap()));
    let mut sub = BTreeMap::new();
    sub.insert(JetVariable::new(0, 0), bx.clone());
    sub.insert(JetVariable::new(0, 1), bx.delta().unwrap());
    let j = jet_presentation_budgeted(
        &SchemePresentation {
            name: String::new(),
            relation: t.relation.with_precision(2).unwrap(),
            torsor_form: None,
        },
        1,
        crate::poly::DEFAULT_TERM_BUDGET,
    )
    .unwrap();
    let substituted: Vec<FpPolynomial> = j
        .relations
        .iter()
        .map(|r| FpPolynomial::from_delta_poly(&r.substitute(&sub).unwrap()).unwrap())
        .collect();
    assert!(fp::ideal_equal(&mu_gens, &substituted).unwrap());
}

#[test]
fn jet_presentation_rejects_insufficient_precision() {
    let f = series::parse_series("3*x + x^9 + x^10", Some(3), 2, 120).unwrap();
    let x1 = build_formal_kernel(&f, 1).unwrap();
    assert!(matches!(
        jet_presentation(&x1, 3),
        Err(Error::InsufficientPrecision(_))
    ));
}
