use std::collections::BTreeMap;


use super::text::{parse, print};
use super::*;
use crate::arith::PrimeContext;

fn ctx3() -> PrimeContext {
    PrimeContext::new(3).unwrap()
}

fn x() -> JetVariable {
    JetVariable::new(0, 0)
}

fn xp(order: u16) -> JetVariable {
    JetVariable::new(0, order)
}

#[test]
fn phi_defining_substitution() {
    let ctx = ctx3();
    let f = DeltaPolynomial::var(x(), ctx);
    assert_eq!(f.phi().unwrap(), parse("x0^3 + 3*x1", ctx).unwrap());
    // constants fixed
    let c = DeltaPolynomial::from_int(-7, ctx);
    assert_eq!(c.phi().unwrap(), c);
    // x * x' maps to (x^3 + 3x')(x'^3 + 3x'')
    let f = parse("x0*x1", ctx).unwrap();
    let expect = parse("x0^3 + 3*x1", ctx)
        .unwrap()
        .mul(&parse("x1^3 + 3*x2", ctx).unwrap());
    assert_eq!(f.phi().unwrap(), expect);
}

#[test]
fn delta_basics() {
    let ctx = ctx3();
    let f = DeltaPolynomial::var(x(), ctx);
    assert_eq!(f.delta().unwrap(), DeltaPolynomial::var(xp(1), ctx));
    // expand ((x^3+3x')^3 - x^9)/3
    let d = parse("x0^3", ctx).unwrap().delta().unwrap();
    assert_eq!(d, parse("3*x0^6*x1 + 9*x0^3*x1^2 + 9*x1^3", ctx).unwrap());
    // delta agrees with delta_const on constants
    let c = DeltaPolynomial::from_int(6, ctx);
    assert_eq!(c.delta().unwrap(), DeltaPolynomial::from_int(-70, ctx));
}

#[test]
fn delta_of_p_power_vanishes_mod_p() {
    // reduction of delta^n(x^{p^nu}) is 0 for 1 <= n <= nu
    for (p, nu) in [(3u64, 1u32), (3, 2), (5, 1)] {
        let ctx = PrimeContext::new(p).unwrap();
        let f = DeltaPolynomial::var(x(), ctx)
            .pow(p.pow(nu), DEFAULT_TERM_BUDGET)
            .unwrap();
        for n in 1..=nu {
            let d = f.delta_iter(n).unwrap();
            assert!(d.divisible_by_p_power(1).unwrap(), "p={} nu={} n={}", p, nu, n);
        }
    }
}

#[test]
fn delta_iter_on_a_variable() {
    let ctx = ctx3();
    let f = DeltaPolynomial::var(x(), ctx);
    assert_eq!(f.delta_iter(0).unwrap(), f);
    assert_eq!(f.delta_iter(5).unwrap(), DeltaPolynomial::var(xp(5), ctx));
}

#[test]
fn delta_iter_x_cubed_reductions() {
    let ctx = ctx3();
    let f = parse("x0^3", ctx).unwrap();
    // delta^2(x^3) = x^18 x'^3 mod 3
    let d2 = f.delta_iter(2).unwrap();
    let diff = d2.sub(&parse("x0^18*x1^3", ctx).unwrap());
    assert!(diff.divisible_by_p_power(1).unwrap());
    // delta^3(x^3) = x^54 x''^3 + x^27 x'^18 + x'^27 mod 3; every monomial
    // x^a0 (x')^a1 (x'')^a2 here satisfies a0 + 3 a1 + 9 a2 = 81, the weight
    // grading that delta multiplies by p
    let d3 = f.delta_iter(3).unwrap();
    let diff = d3.sub(&parse("x0^54*x2^3 + x0^27*x1^18 + x1^27", ctx).unwrap());
    assert!(diff.divisible_by_p_power(1).unwrap());
}

#[test]
fn padic_coefficient_pipeline_matches_exact() {
    // computing delta^n with coefficients tracked mod p^{n+1} gives the same
    // mod-p image as the exact computation
    let ctx = ctx3();
    let f = parse("x0^9", ctx).unwrap();
    for n in 1..=3u32 {
        let exact = f.delta_iter(n).unwrap();
        let approx = f.with_precision(n + 1).unwrap().delta_iter(n).unwrap();
        assert_eq!(approx.precision_floor(), Some(1));
        let diff = exact.sub(&approx);
        assert!(diff.divisible_by_p_power(1).unwrap(), "n={}", n);
    }
}

#[test]
fn substitution() {
    let ctx = ctx3();
    let f = parse("x0^2 + 2*x1", ctx).unwrap();
    // identity
    let mut id = BTreeMap::new();
    id.insert(x(), DeltaPolynomial::var(x(), ctx));
    id.insert(xp(1), DeltaPolynomial::var(xp(1), ctx));
    assert_eq!(f.substitute(&id).unwrap(), f);
    // kill the second tuple variable
    let f = parse("x0*x0_1", ctx).unwrap();
    let mut a = BTreeMap::new();
    a.insert(x(), DeltaPolynomial::var(x(), ctx));
    a.insert(JetVariable::new(1, 0), DeltaPolynomial::from_int(1, ctx));
    assert_eq!(f.substitute(&a).unwrap(), DeltaPolynomial::var(x(), ctx));
    // missing assignment is an error
    assert!(f.substitute(&id).is_err());
}

#[test]
fn delta_and_phi_commute() {
    let ctx = ctx3();
    for src in ["x0^2 + x1", "x0*x1 - 2", "x0^3 + x0_1", "5*x0^2*x1"] {
        let f = parse(src, ctx).unwrap();
        let a = f.delta().unwrap().phi().unwrap();
        let b = f.phi().unwrap().delta().unwrap();
        assert_eq!(a, b, "src={}", src);
    }
}

#[test]
fn delta_sum_and_product_rules() {
    let ctx = ctx3();
    let pairs = [
        ("x0", "x1"),
        ("x0^2 + 1", "x0*x1"),
        ("2*x0 - x1^2", "x0_1 + 3"),
    ];
    for (sa, sb) in pairs {
        let a = parse(sa, ctx).unwrap();
        let b = parse(sb, ctx).unwrap();
        let lhs = a.add(&b).delta().unwrap();
        let rhs = a
            .delta()
            .unwrap()
            .add(&b.delta().unwrap())
            .add(&crate::arith::cp_multi(&[a.clone(), b.clone()], &ctx).unwrap());
        assert_eq!(lhs, rhs, "sum rule {} {}", sa, sb);
        let lhs = a.mul(&b).delta().unwrap();
        let da = a.delta().unwrap();
        let db = b.delta().unwrap();
        let p = ctx.p();
        let rhs = a
            .pow(p, DEFAULT_TERM_BUDGET)
            .unwrap()
            .mul(&db)
            .add(&b.pow(p, DEFAULT_TERM_BUDGET).unwrap().mul(&da))
            .add(&da.mul(&db).scale_int(p as i64));
        assert_eq!(lhs, rhs, "product rule {} {}", sa, sb);
    }
}

#[test]
fn multi_term_carry_rule() {
    // delta(x_1+...+x_m) = sum delta x_i + C_p(x_1,...,x_m) on triples
    let ctx = ctx3();
    let triple = [
        parse("x0", ctx).unwrap(),
        parse("x0_1^2", ctx).unwrap(),
        parse("2*x1 - 1", ctx).unwrap(),
    ];
    let sum = triple[0].add(&triple[1]).add(&triple[2]);
    let lhs = sum.delta().unwrap();
    let mut rhs = crate::arith::cp_multi(&triple, &ctx).unwrap();
    for t in &triple {
        rhs = rhs.add(&t.delta().unwrap());
    }
    assert_eq!(lhs, rhs);
}

#[test]
fn delta_of_sums_carry_shape() {
    // delta^n(y_1+...+y_N) - sum y_i^(n) has no constant or linear part and
    // only involves jet orders <= n-1
    let ctx = ctx3();
    let n_vars = 3u16;
    let sum = (0..n_vars)
        .map(|b| DeltaPolynomial::var(JetVariable::new(b, 0), ctx))
        .fold(DeltaPolynomial::zero(ctx), |acc, v| acc.add(&v));
    for n in 1..=3u32 {
        let mut rest = sum.delta_iter(n).unwrap();
        for b in 0..n_vars {
            rest = rest.sub(&DeltaPolynomial::var(
                JetVariable::new(b, n as u16),
                ctx,
            ));
        }
        for (m, _) in rest.terms() {
            assert!(m.total_degree() >= 2, "n={} term {:?}", n, m);
            assert!(m.max_order() <= (n - 1) as u16, "n={} term {:?}", n, m);
        }
    }
}

#[test]
fn exponents_of_base_stay_multiples_of_p() {
    // delta^n(x^p) uses x only through x^p; same for a product of two tuples
    let ctx = ctx3();
    let f = parse("x0^3", ctx).unwrap();
    for n in 0..=4u32 {
        let d = f.delta_iter(n).unwrap();
        for (m, _) in d.terms() {
            assert!(m.exponent(x()) % 3 == 0, "n={} term {:?}", n, m);
        }
    }
    let f = parse("x0^3*x0_1^3", ctx).unwrap();
    for n in 0..=2u32 {
        let d = f.delta_iter(n).unwrap();
        for (m, _) in d.terms() {
            assert!(m.exponent(x()) % 3 == 0, "n={} term {:?}", n, m);
            assert!(m.exponent(JetVariable::new(1, 0)) % 3 == 0, "n={}", n);
        }
    }
}

#[test]
fn deltafp_identity_checks() {
    let ctx = ctx3();
    // f = x, nu = 1: witness x^3 + x'
    let f = DeltaPolynomial::var(x(), ctx);
    let report = check_deltafp_identity(&f, 1).unwrap();
    assert!(report.holds);
    assert_eq!(report.witness.unwrap(), parse("x0^3 + x1", ctx).unwrap());
    // f = 1: everything vanishes
    let report = check_deltafp_identity(&DeltaPolynomial::from_int(1, ctx), 1).unwrap();
    assert!(report.holds);
    assert!(report.witness.unwrap().is_zero());
    // f = x + 1
    let f = parse("x0 + 1", ctx).unwrap();
    let report = check_deltafp_identity(&f, 1).unwrap();
    assert!(report.holds);
}

#[test]
fn term_budget_is_a_reported_failure() {
    let ctx = ctx3();
    let f = parse("x0 + x1 + x0_1 + x1_1 + 1", ctx).unwrap();
    match f.delta_iter_budgeted(4, 50) {
        Err(crate::error::Error::TermBudget { .. }) => {}
        other => panic!("expected budget failure, got {:?}", other.map(|p| p.num_terms())),
    }
}

#[test]
fn text_round_trip() {
    let ctx = ctx3();
    for src in [
        "x0",
        "1",
        "0",
        "-x0 + 2",
        "3*x0^6*x1 + 9*x0^3*x1^2 + 9*x1^3",
        "x0_1^2*x1 - 7",
    ] {
        let f = parse(src, ctx).unwrap();
        let printed = print(&f);
        let again = parse(&printed, ctx).unwrap();
        assert_eq!(f, again, "src={} printed={}", src, printed);
    }
}

#[test]
fn display_examples() {
    let ctx = ctx3();
    let d = parse("x0^3", ctx).unwrap().delta().unwrap();
    assert_eq!(print(&d), "3*x0^6*x1 + 9*x0^3*x1^2 + 9*x1^3");
    assert_eq!(print(&DeltaPolynomial::zero(ctx)), "0");
}

#[test]
fn exact_division() {
    let ctx = ctx3();
    let a = parse("x0^2 - x1^2", ctx).unwrap();
    let b = parse("x0 + x1", ctx).unwrap();
    assert_eq!(a.div_exact(&b).unwrap(), parse("x0 - x1", ctx).unwrap());
    assert!(parse("x0^2 + 1", ctx).unwrap().div_exact(&b).is_none());
}

#[test]
fn parse_rejects_garbage() {
    let ctx = ctx3();
    for bad in ["", "x", "x0^", "y0", "3**x0", "x0 +"] {
        assert!(parse(bad, ctx).is_err(), "should reject {:?}", bad);
    }
}

#[test]
fn zero_coefficient_terms_are_dropped() {
    let ctx = ctx3();
    let f = parse("x0 + 1", ctx).unwrap().sub(&parse("x0", ctx).unwrap());
    assert_eq!(f.num_terms(), 1);
    assert_eq!(f, DeltaPolynomial::from_int(1, ctx));
    let z = parse("x0", ctx).unwrap().sub(&parse("x0", ctx).unwrap());
    assert!(z.is_zero());
    // parse-level cancellation
    let g = parse("x0 - x0", ctx).unwrap();
    assert!(g.is_zero());
}
