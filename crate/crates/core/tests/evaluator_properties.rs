use dirichlet_parity::{
    rhs_total, validate_spec, verify_parity, zeta_direct, EvalOptions, ParityCase, Rational,
    Verdict,
};
use num_traits::Zero;

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn opts(m: u64) -> EvalOptions {
    EvalOptions {
        m,
        m_outer: m,
        ..EvalOptions::default()
    }
}

#[test]
fn negated_twist_gives_the_conjugate() {
    let a = vec![vec![1, 1], vec![1, 2]];
    let y = [q(1, 3), q(2, 5)];
    let spec = validate_spec(&a, &[2, 1], &[1, 1], &y).unwrap();
    let neg = spec.negated_twist();
    for m in [50, 173] {
        let plus = zeta_direct(&spec, m).unwrap();
        let minus = zeta_direct(&neg, m).unwrap();
        assert_eq!(plus.value, minus.value.conj());
    }
}

#[test]
fn untwisted_partial_sums_increase_while_the_tail_shrinks() {
    let spec = validate_spec(&[vec![1, 1]], &[1, 2], &[1], &[Rational::zero(), Rational::zero()])
        .unwrap();
    let sums: Vec<_> = [100, 200, 400, 800].iter().map(|&m| zeta_direct(&spec, m).unwrap()).collect();
    for w in sums.windows(2) {
        assert!(w[1].value.re > w[0].value.re);
        assert!(w[1].tail_estimate < w[0].tail_estimate);
        assert_eq!(w[1].value.im, 0.0);
    }
}

#[test]
fn truncated_residual_decreases_with_the_bound() {
    let spec = validate_spec(&[vec![1, 1]], &[1, 1], &[1], &[Rational::zero(), Rational::zero()])
        .unwrap();
    let residuals: Vec<f64> = [500, 1000, 2000]
        .iter()
        .map(|&m| verify_parity(&spec, &opts(m)).unwrap().truncated_residual)
        .collect();
    assert!(residuals[1] < residuals[0] && residuals[2] < residuals[1], "{residuals:?}");
}

#[test]
fn same_parity_right_side_vanishes() {
    // weight 4 + r 2 is even: the left side is zeta(y) - zeta(-y), zero for y = 0
    let spec = validate_spec(&[vec![1, 1]], &[1, 2], &[1], &[Rational::zero(), Rational::zero()])
        .unwrap();
    let report = verify_parity(&spec, &opts(800)).unwrap();
    assert_eq!(report.parity, ParityCase::Same);
    assert_eq!(report.lhs.norm(), 0.0);
    assert!(report.corollary.is_none());
    assert!(report.rhs.total.norm() < 1e-9, "{}", report.rhs.total);
    assert_eq!(report.verdict, Verdict::Pass);
}

#[test]
fn twisted_identity_holds_with_complex_values() {
    let spec = validate_spec(&[vec![1, 1]], &[2, 1], &[1], &[q(1, 3), q(1, 4)]).unwrap();
    let report = verify_parity(&spec, &opts(1000)).unwrap();
    assert_eq!(report.parity, ParityCase::Same);
    assert_eq!(report.lhs.re, 0.0);
    assert!(report.lhs.im.abs() > 1e-3);
    assert!(report.residual < 1e-8, "residual {}", report.residual);
    assert_eq!(report.verdict, Verdict::Pass);
}

#[test]
fn rhs_is_deterministic() {
    let spec = validate_spec(&[vec![1, 1]], &[1, 1], &[2], &[q(1, 2), Rational::zero()]).unwrap();
    let a = rhs_total(&spec, &opts(400)).unwrap();
    let b = rhs_total(&spec, &opts(400)).unwrap();
    assert_eq!(a.total, b.total);
    assert_eq!(a.terms.len(), 3);
}
