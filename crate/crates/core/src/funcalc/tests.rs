use num_complex::Complex64;

use super::*;
use crate::matcore::Hermitian;
use crate::repfun::{parse_spec, Interval};
use crate::sampler::{SampleConfig, Sampler};

fn rel(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    (a - b).norm_fro() / (1.0 + b.norm_fro())
}

#[test]
fn hermitian_resolvent_example() {
    let f = parse_spec("ktone 1 atoms [(1,0.5)]").unwrap();
    let g = FunctionSpec::polynomial(&[1.0]).unwrap();
    let a = Hermitian::from_real_rows(&[&[0.0, 0.5], &[0.5, 0.0]]).unwrap();
    // x/(1 - x/2) + 1 = 1/(1 - x/2) * 2 - 1 ... compare through the resolvent directly
    let fa = calc_hermitian(&f, &a).unwrap();
    let ga = calc_hermitian(&g, &a).unwrap();
    // 1/(1 - x/2) = 1 + (1/2) * x/(1 - x/2)
    let res = ga.add(&fa.scale(0.5));
    let expect = Hermitian::from_real_rows(&[&[16.0 / 15.0, 4.0 / 15.0], &[4.0 / 15.0, 16.0 / 15.0]]).unwrap();
    assert!((res.matrix() - expect.matrix()).max_abs() < 1e-14);
}

#[test]
fn hermitian_domain_error_names_eigenvalue() {
    let a = Hermitian::<f64>::from_real_diag(&[-0.5, 1.0]);
    match calc_hermitian(&FunctionSpec::log(), &a) {
        Err(Error::Domain(msg)) => assert!(msg.contains("-5e-1"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn identity_and_square() {
    let x = Matrix::<f64>::from_rows(vec![
        vec![Complex64::new(0.2, 0.5), Complex64::new(0.1, -0.3)],
        vec![Complex64::new(-0.4, 0.2), Complex64::new(-0.1, 0.8)],
    ])
    .unwrap();
    let id = FunctionSpec::id();
    for path in [CalcPath::Eigen, CalcPath::Contour] {
        let r = analytic_calc(&id, &x, path).unwrap();
        assert!(rel(&r.value, &x) < 1e-12, "{path:?}");
    }
    let sq = FunctionSpec::new(Interval::real_line(), crate::repfun::Form::Builtin(crate::repfun::Builtin::Pow { p: 2.0 }));
    assert!(sq.is_err(), "pow needs (0,inf)");
    let sq = FunctionSpec::polynomial(&[0.0, 0.0, 1.0]).unwrap();
    let r = analytic_calc(&sq, &x, CalcPath::Contour).unwrap();
    assert!(rel(&r.value, &x.matmul(&x)) < 1e-11);
}

#[test]
fn scalar_case() {
    let f = parse_spec("ktone 1 atoms [(1,0.6)]").unwrap();
    let z = Complex64::new(0.3, 0.7);
    let x = Matrix::from_diag(&[z]);
    let expect = z / (1.0 - 0.6 * z);
    for path in [CalcPath::Eigen, CalcPath::Contour] {
        let r = analytic_calc(&f, &x, path).unwrap();
        assert!((r.value[(0, 0)] - expect).norm() < 1e-12);
    }
}

#[test]
fn upper_half_contour_for_i_identity() {
    let x = Matrix::<f64>::scalar(3, Complex64::new(0.0, 1.0));
    let c = build_contour(&x, &FunctionSpec::log(), Case::UpperHalf).unwrap();
    for (z, _) in c.nodes::<f64>(128) {
        assert!(z.im > 0.0 || z.re > 0.0, "node {z} on the cut");
        assert!((z - Complex64::i()).norm() > 0.0);
    }
    assert!(c.clearance > 0.0);
}

#[test]
fn strip_fails_where_upper_half_succeeds() {
    let x = Matrix::<f64>::from_rows(vec![
        vec![Complex64::new(-1.0, 1.0), Complex64::new(0.0, 0.0)],
        vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0)],
    ])
    .unwrap();
    let f = FunctionSpec::log();
    assert!(build_contour(&x, &f, Case::UpperHalf).is_ok());
    assert!(matches!(build_contour(&x, &f, Case::Strip), Err(Error::Precondition { .. })));
    let r = analytic_calc(&f, &x, CalcPath::Contour).unwrap();
    let expect = [Complex64::new(-1.0, 1.0).ln(), Complex64::new(1.0, 1.0).ln()];
    assert!((r.value[(0, 0)] - expect[0]).norm() < 1e-10);
    assert!((r.value[(1, 1)] - expect[1]).norm() < 1e-10);
}

#[test]
fn strip_contour_for_hermitian_input() {
    let a = Hermitian::<f64>::from_real_diag(&[-0.9, 0.2, 0.95]);
    let f = parse_spec("ktone 2 atoms [(1,0.99)]").unwrap();
    // the only pole is at 1/0.99, so the contour may cross the axis left of -1
    let hol = f.holomorphy_interval();
    assert_eq!(hol.a, f64::NEG_INFINITY);
    assert!((hol.b - 1.0 / 0.99).abs() < 1e-15);
    let c = build_contour(a.matrix(), &f, Case::Strip).unwrap();
    for (z, _) in c.nodes::<f64>(512) {
        if z.im.abs() < 1e-12 {
            assert!(hol.contains(z.re));
        }
    }
    let r = analytic_calc(&f, a.matrix(), CalcPath::Contour).unwrap();
    let h = calc_hermitian(&f, &a).unwrap();
    assert!(rel(&r.value, h.matrix()) < 1e-9);
}

#[test]
fn neither_hypothesis() {
    let x = Matrix::<f64>::from_diag(&[Complex64::new(-1.0, 1.0), Complex64::new(2.0, -1.0)]);
    assert!(matches!(analytic_calc(&FunctionSpec::log(), &x, CalcPath::Auto), Err(Error::Precondition { .. })));
}

#[test]
fn conjugation_law_and_agreement() {
    let specs = [
        FunctionSpec::log(),
        FunctionSpec::pow(0.5),
        parse_spec("monotone alpha 0.1 beta 0.5 atoms [(0.3,0.02),(1,5)]").unwrap(),
    ];
    for seed in 0..20 {
        let cfg = SampleConfig::new(4, seed);
        let mut s = Sampler::new(&cfg).unwrap();
        let a = s.hermitian();
        let b = s.pd();
        let x = a.complexify(&b);
        for f in &specs {
            let e = analytic_calc(f, &x, CalcPath::Eigen).unwrap();
            let c = analytic_calc(f, &x, CalcPath::Contour).unwrap();
            assert!(rel(&e.value, &c.value) < 1e-8, "seed {seed} {f}: {}", rel(&e.value, &c.value));
            let xs = x.adjoint();
            let cs = analytic_calc(f, &xs, CalcPath::Contour).unwrap();
            assert!(rel(&cs.value, &c.value.adjoint()) < 1e-9);
        }
    }
}

#[test]
fn node_doubling_converges_geometrically() {
    let cfg = SampleConfig::new(3, 5);
    let mut s = Sampler::new(&cfg).unwrap();
    let a = s.hermitian_in(&Interval::symmetric_unit()).unwrap();
    let b = s.hermitian().scale(0.3);
    let x = a.complexify(&b);
    let f = parse_spec("ktone 3 atoms [(1,0.8),(0.5,-0.9)]").unwrap();
    let c = build_contour(&x, &f, Case::Strip).unwrap();
    let exact = analytic_calc(&f, &x, CalcPath::Eigen).unwrap().value;
    let mut errs = Vec::new();
    for k in 4..11 {
        let nodes = c.nodes::<f64>(1 << k);
        let mut acc = Matrix::<f64>::zeros(3);
        for (z, w) in nodes {
            let r = (&Matrix::scalar(3, z) - &x).inverse().unwrap();
            acc.axpy(w * f.eval_complex(z), &r);
        }
        errs.push(rel(&acc, &exact));
    }
    for w in errs.windows(2) {
        if w[0] < 1e-3 && w[0] > 1e-12 {
            assert!(w[1] <= 0.1 * w[0], "{errs:?}");
        }
    }
}

#[test]
fn contour_json_shape() {
    let x = Matrix::<f64>::scalar(2, Complex64::new(0.0, 1.0));
    let (_, c) = contour_path(&FunctionSpec::log(), &x, Case::UpperHalf).unwrap();
    let v: serde_json::Value = serde_json::to_value(&c).unwrap();
    for key in ["kind", "center", "radius", "nodes"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["nodes"].as_u64().unwrap() as usize, c.node_count);
}

#[test]
fn f32_contour() {
    let a = Hermitian::<f32>::from_real_diag(&[0.5, 2.0]);
    let r = analytic_calc(&FunctionSpec::log(), a.matrix(), CalcPath::Contour).unwrap();
    assert!((r.value[(0, 0)].re - 0.5f32.ln()).abs() < 1e-4);
}
