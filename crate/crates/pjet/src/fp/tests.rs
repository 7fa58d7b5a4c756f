use std::collections::BTreeSet;

use super::*;
use crate::arith::PrimeContext;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn ctx3() -> PrimeContext {
    PrimeContext::new(3).unwrap()
}

fn fp(src: &str) -> FpPolynomial {
    parse_fp(src, ctx3()).unwrap()
}

fn gb(gens: &[FpPolynomial]) -> GroebnerBasis {
    groebner(gens, MonomialOrder::GrevLex, DEFAULT_PAIR_BUDGET).unwrap()
}

#[test]
fn grevlex_order_basics() {
    let o = MonomialOrder::GrevLex;
    let x = Monomial::var(JetVariable::new(0, 0));
    let x1 = Monomial::var(JetVariable::new(0, 1));
    // higher jet order is the larger variable
    assert_eq!(o.cmp(&x1, &x), std::cmp::Ordering::Greater);
    // degree dominates
    assert_eq!(o.cmp(&x.pow(3), &x1), std::cmp::Ordering::Greater);
    // grevlex tie-break: x*z < y^2 in a 3-variable ring x < y < z
    let y = Monomial::var(JetVariable::new(0, 1));
    let z = Monomial::var(JetVariable::new(0, 2));
    assert_eq!(o.cmp(&x.mul(&z), &y.pow(2)), std::cmp::Ordering::Less);
}

#[test]
fn groebner_single_and_unit() {
    let b = gb(&[fp("x0")]);
    assert_eq!(b.generators, vec![fp("x0")]);
    assert!(!b.is_unit());
    // x ≡ -1 forces 1 into the ideal
    let b = gb(&[fp("x0^2"), fp("x0 + 1")]);
    assert_eq!(b.generators, vec![fp("1")]);
    assert!(b.is_unit());
    assert!(is_unit_ideal(&[fp("x0^2"), fp("x0 + 1")]).unwrap());
}

#[test]
fn groebner_jet_instance() {
    // x is invertible modulo x^3 - 1, so x^18 (x')^3 generates (x')^3
    let b = gb(&[fp("x0^3 - 1"), fp("x0^18*x1^3")]);
    assert_eq!(b.generators, vec![fp("x0^3 + 2"), fp("x1^3")]);
}

#[test]
fn normal_forms() {
    let b = gb(&[fp("x0^3 - 1"), fp("x0^18*x1^3")]);
    assert!(normal_form(&FpPolynomial::zero(3), &b).is_zero());
    assert!(normal_form(&fp("x1^3"), &b).is_zero());
    // x' itself is not in the ideal
    assert_eq!(normal_form(&fp("x1"), &b), fp("x1"));
}

#[test]
fn ideal_equality() {
    assert!(ideal_equal(&[fp("x0^2 + x1")], &[fp("2*x0^2 + 2*x1")]).unwrap());
    assert!(!ideal_equal(&[fp("x0")], &[fp("x0^2")]).unwrap());
    assert!(ideal_equal(
        &[fp("x0^3 - 1"), fp("x0^18*x1^3")],
        &[fp("x0^3 - 1"), fp("x1^3")]
    )
    .unwrap());
}

#[test]
fn basis_deterministic_under_permutation() {
    let gens = [fp("x0^2 + x1"), fp("x0*x1 + 1"), fp("x1^2 - x0")];
    let a = gb(&gens);
    let b = gb(&[gens[2].clone(), gens[0].clone(), gens[1].clone()]);
    let c = gb(&[gens[1].clone(), gens[2].clone(), gens[0].clone()]);
    assert_eq!(a.generators, b.generators);
    assert_eq!(a.generators, c.generators);
}

#[test]
fn elimination() {
    let keep: BTreeSet<JetVariable> = [JetVariable::new(0, 0)].into();
    let e = eliminate(&[fp("x1"), fp("x0 - 1")], &keep).unwrap();
    assert_eq!(e, vec![fp("x0 + 2")]);
    let e = eliminate(&[fp("1")], &keep).unwrap();
    assert_eq!(e, vec![fp("1")]);
    // kept generators stay inside the ideal and inside k[keep]
    let gens = [fp("x0^3 - 1"), fp("x1 - x0^2"), fp("x2^2 + x1")];
    let e = eliminate(&gens, &keep).unwrap();
    let full = gb(&gens);
    for g in &e {
        assert!(g.variables().iter().all(|v| keep.contains(v)));
        assert!(normal_form(g, &full).is_zero());
    }
}

#[test]
fn standard_monomial_enumeration() {
    let vars1: BTreeSet<JetVariable> = [JetVariable::new(0, 0)].into();
    let b = gb(&[fp("x0")]);
    let s = standard_monomials(&b, &vars1, 1000);
    assert!(s.finite);
    assert_eq!(s.monomials, vec![Monomial::one()]);

    // ((x-1)^3, (x')^3, (x'')^3): quotient dimension 27
    let vars3: BTreeSet<JetVariable> = (0..3).map(|i| JetVariable::new(0, i)).collect();
    let shifted = fp("x0^3 - 1"); // (x-1)^3 = x^3 - 1 over F_3
    let b = gb(&[shifted, fp("x1^3"), fp("x2^3")]);
    let s = standard_monomials(&b, &vars3, 1000);
    assert!(s.finite && !s.truncated);
    assert_eq!(s.monomials.len(), 27);

    // (x^3 - 1, (x')^3) in k[x, x', x'']: x'' is free
    let b = gb(&[fp("x0^3 - 1"), fp("x1^3")]);
    let s = standard_monomials(&b, &vars3, 1000);
    assert!(!s.finite);
    assert_eq!(s.free_variables, vec![JetVariable::new(0, 2)]);
}

// brute-force membership: span of g*m (total degree <= cap) via Gaussian
// elimination over F_3
fn brute_force_member(f: &FpPolynomial, gens: &[FpPolynomial], cap: u64) -> bool {
    let vars: BTreeSet<JetVariable> = gens
        .iter()
        .flat_map(|g| g.variables())
        .chain(f.variables())
        .collect();
    let vars: Vec<JetVariable> = vars.into_iter().collect();
    let monos = enumerate_monomials(&vars, cap);
    let index: std::collections::BTreeMap<Monomial, usize> = monos
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let to_vec = |g: &FpPolynomial| -> Option<Vec<u64>> {
        let mut v = vec![0u64; monos.len()];
        for (m, &c) in g.terms() {
            v[*index.get(m)?] = c;
        }
        Some(v)
    };
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for g in gens {
        for m in &monos {
            if g.total_degree() + m.total_degree() <= cap {
                if let Some(v) = to_vec(&g.mul_monomial(m, 1)) {
                    rows.push(v);
                }
            }
        }
    }
    let mut target = match to_vec(f) {
        Some(v) => v,
        None => return false,
    };
    // eliminate
    let mut pivots: Vec<(usize, Vec<u64>)> = Vec::new();
    for mut row in rows {
        for (col, pv) in &pivots {
            if row[*col] != 0 {
                let c = row[*col];
                for (x, y) in row.iter_mut().zip(pv) {
                    *x = (*x + (3 - c) * y) % 3;
                }
            }
        }
        if let Some(col) = row.iter().position(|&c| c != 0) {
            let inv = invmod(row[col], 3);
            for x in row.iter_mut() {
                *x = mulmod(*x, inv, 3);
            }
            pivots.push((col, row));
        }
    }
    for (col, pv) in &pivots {
        if target[*col] != 0 {
            let c = target[*col];
            for (x, y) in target.iter_mut().zip(pv) {
                *x = (*x + (3 - c) * y) % 3;
            }
        }
    }
    target.iter().all(|&c| c == 0)
}

fn enumerate_monomials(vars: &[JetVariable], cap: u64) -> Vec<Monomial> {
    let mut out = vec![Vec::new()];
    for &v in vars {
        let mut next = Vec::new();
        for acc in out {
            let used: u64 = acc.iter().map(|&(_, e): &(JetVariable, u64)| e).sum();
            for e in 0..=(cap - used) {
                let mut a = acc.clone();
                if e > 0 {
                    a.push((v, e));
                }
                next.push(a);
            }
        }
        out = next;
    }
    out.into_iter().map(Monomial::from_exps).collect()
}

fn random_poly(rng: &mut StdRng, nvars: u16, maxdeg: u64) -> FpPolynomial {
    let mut f = FpPolynomial::zero(3);
    for _ in 0..rng.gen_range(1..=4) {
        let mut exps = Vec::new();
        let mut left = maxdeg;
        for i in 0..nvars {
            let e = rng.gen_range(0..=left.min(2));
            left -= e;
            if e > 0 {
                exps.push((JetVariable::new(0, i), e));
            }
        }
        f.add_term(Monomial::from_exps(exps), rng.gen_range(1..3));
    }
    f
}

#[test]
fn membership_matches_brute_force() {
    let mut rng = StdRng::seed_from_u64(seed());
    for _ in 0..25 {
        let nvars = rng.gen_range(2..=3);
        let gens: Vec<FpPolynomial> = (0..rng.gen_range(1..=3))
            .map(|_| random_poly(&mut rng, nvars, 4))
            .filter(|g| !g.is_zero())
            .collect();
        if gens.is_empty() {
            continue;
        }
        let b = gb(&gens);
        for _ in 0..4 {
            let f = random_poly(&mut rng, nvars, 4);
            let member = normal_form(&f, &b).is_zero();
            let brute = brute_force_member(&f, &gens, 10);
            // the truncated-span oracle can only miss memberships that need
            // degree > 10 cofactors; on this grid it must agree
            assert_eq!(member, brute, "gens={:?} f={}", gens.iter().map(|g| g.to_string()).collect::<Vec<_>>(), f);
        }
    }
}

#[test]
fn reduction_from_delta_poly_respects_precision() {
    let ctx = ctx3();
    let f = crate::poly::text::parse("x0^3", ctx).unwrap();
    let d = f.with_precision(2).unwrap().delta().unwrap();
    // one digit left: reduction works
    let r = FpPolynomial::from_delta_poly(&d).unwrap();
    assert_eq!(r, FpPolynomial::zero(3));
    // a second delta would need more digits
    assert!(d.delta().is_err());
}

fn seed() -> u64 {
    std::env::var("PJET_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x706a6574)
}
