//! Brute-force symmetric lattice sums against the generating-function coefficients,
//! including configurations where some geometric denominator vanishes.

use dirichlet_parity::genfun::{GeneratingFunction, RhoChoice, SingularPolicy};
use dirichlet_parity::mpseries::Shape;
use dirichlet_parity::phase::unit_phase;
use dirichlet_parity::{build_lambda, subset_context, validate_spec, Rational, SubsetTerm};
use dirichlet_parity::EvalOptions;
use num_complex::Complex64;
use num_traits::Zero;

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

/// `Z_M` for one-dimensional functionals `f(m) = c_f m + dot_f` with exponents `e_f`.
fn z_m(funcs: &[(i64, i64, u32)], y: &Rational, m: i64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for v in -m..=m {
        let values: Vec<i64> = funcs.iter().map(|&(c, d, _)| c * v + d).collect();
        if values.contains(&0) {
            continue;
        }
        let w: f64 = values
            .iter()
            .zip(funcs)
            .map(|(&x, &(_, _, e))| (x as f64).powi(-(e as i32)))
            .product();
        acc += unit_phase(&(y * Rational::from_integer(v.into()))) * w;
    }
    acc
}

fn assert_converges(limit: Complex64, z: impl Fn(i64) -> Complex64, tol: f64) {
    let gaps: Vec<f64> = [100, 400, 1600].iter().map(|&m| (z(m) - limit).norm()).collect();
    assert!(gaps[2] < gaps[0], "gaps {gaps:?} do not decrease (limit {limit})");
    assert!(gaps[2] < tol, "final gap {} (limit {limit})", gaps[2]);
}

#[test]
fn mordell_tornheim_subset_with_outer_tuple() {
    let spec = validate_spec(&[vec![1, 1]], &[2, 1], &[2], &[Rational::zero(), Rational::zero()])
        .unwrap();
    let t = SubsetTerm::new(&spec, &subset_context(&spec, &[0]).unwrap(), &EvalOptions::default())
        .unwrap();
    for m2 in [1u64, 2, 7] {
        // |Lambda| = 2
        let limit = t.coefficient(&[m2]).unwrap();
        let funcs = [(1, 0, 2), (1, -(m2 as i64), 2)];
        assert_converges(limit, |m| z_m(&funcs, &Rational::zero(), m), 1e-6);
    }
}

#[test]
fn duplicated_functional_is_resolved() {
    // rows (1,0), (0,1), (1,1); J = {1}: f_1 and f_{r+1} coincide, so d = 0 occurs
    let a = vec![vec![1, 0], vec![0, 1], vec![1, 1]];
    for y in [q(0, 1), q(1, 3)] {
        let spec = validate_spec(&a, &[1, 1], &[1, 1, 1], &[y.clone(), Rational::zero()]).unwrap();
        let ctx = subset_context(&spec, &[0]).unwrap();
        let opts = EvalOptions::default();
        let t = SubsetTerm::new(&spec, &ctx, &opts).unwrap();
        for m2 in [1u64, 3] {
            // Lambda = {f_1, f_{r+1}, f_{r+3}}, exponents (1, 1, 1); (-1)^3
            let limit = -t.coefficient(&[m2]).unwrap();
            let funcs = [(1, 0, 1), (1, 0, 1), (1, -(m2 as i64), 1)];
            assert_converges(limit, |m| z_m(&funcs, &y, m), 1e-6);
        }
        let fatal = EvalOptions {
            singular: SingularPolicy::Fatal,
            ..opts
        };
        let t = SubsetTerm::new(&spec, &ctx, &fatal).unwrap();
        assert!(t.coefficient(&[1]).is_err());
    }
}

#[test]
fn twisted_single_functional() {
    // Lambda = {f_1}, y = 1/4: sum'_{m != 0} e(m/4) m^-2
    let spec = validate_spec(&[vec![1]], &[2], &[1], &[q(1, 4)]).unwrap();
    let ctx = subset_context(&spec, &[0]).unwrap();
    let lambda = build_lambda(&spec, &ctx, &[]).unwrap()[..1].to_vec();
    let gf = GeneratingFunction::for_lambda(&lambda, &[q(1, 4)], &RhoChoice::Ladder, Shape::from_caps(vec![2]))
        .unwrap();
    let limit = -gf.coefficient(&[Rational::zero()], &[2], SingularPolicy::Fatal).unwrap();
    assert_converges(limit, |m| z_m(&[(1, 0, 2)], &q(1, 4), m), 1e-3);
}

#[test]
fn rho_changes_fractional_parts_but_not_coefficients() {
    let spec = validate_spec(&[vec![1, 1]], &[1, 2], &[1], &[Rational::zero(), Rational::zero()])
        .unwrap();
    let ctx = subset_context(&spec, &[0, 1]).unwrap();
    let lambda = build_lambda(&spec, &ctx, &[]).unwrap();
    let shape = Shape::new(vec![1, 2, 1], 4);
    let dots = vec![Rational::zero(); 3];
    let mut coefficients = Vec::new();
    let mut fractional = Vec::new();
    for choice in [RhoChoice::Ladder, RhoChoice::Negated, RhoChoice::Reversed, RhoChoice::Skip(2)] {
        let gf = GeneratingFunction::for_lambda(&lambda, &[Rational::zero(), Rational::zero()], &choice, shape.clone())
            .unwrap();
        fractional.push((0..gf.bases().count()).map(|b| gf.fractional_parts(b)).collect::<Vec<_>>());
        coefficients.push(gf.coefficient(&dots, &[1, 2, 1], SingularPolicy::Resolve).unwrap());
    }
    assert_ne!(fractional[0], fractional[1]);
    assert_ne!(fractional[0], fractional[2]);
    for c in &coefficients[1..] {
        assert!((c - coefficients[0]).norm() <= 1e-10 * coefficients[0].norm(), "{coefficients:?}");
    }
}
