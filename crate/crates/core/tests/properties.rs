use num_complex::Complex64;
use opertone::frechet::{derivative, Engine};
use opertone::funcalc::{analytic_calc, calc_hermitian, CalcPath};
use opertone::matcore::{hermitian_eigenvalues, Hermitian, Matrix, MatrixJson};
use opertone::repfun::{parse_spec, random_certified, CertifiedClass, FunctionSpec, Interval};
use opertone::sampler::{SampleConfig, Sampler};
use opertone::verify::{check_pick, sector_membership};
use proptest::prelude::*;

fn sampler(n: usize, seed: u64) -> Sampler {
    Sampler::new(&SampleConfig::new(n, seed)).unwrap()
}

fn rel(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    (a - b).norm_fro() / (1.0 + b.norm_fro())
}

/// Horner on matrices, independent of any spectral machinery.
fn matrix_poly(coeffs: &[f64], a: &Matrix<f64>) -> Matrix<f64> {
    let n = a.dim();
    let mut acc = Matrix::zeros(n);
    for &c in coeffs.iter().rev() {
        acc = acc.matmul(a).add_diag(Complex64::new(c, 0.0));
    }
    acc
}

fn classes() -> impl Strategy<Value = CertifiedClass> {
    prop_oneof![
        (1usize..=4).prop_map(CertifiedClass::Ktone),
        Just(CertifiedClass::Monotone),
        Just(CertifiedClass::Decreasing),
        Just(CertifiedClass::Convex),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polynomial_calculus_matches_horner(
        seed in any::<u64>(),
        n in 1usize..=5,
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..6),
    ) {
        let a = sampler(n, seed).hermitian();
        let f = FunctionSpec::polynomial(&coeffs).unwrap();
        let expect = matrix_poly(&coeffs, a.matrix());
        let spectral = calc_hermitian(&f, &a).unwrap();
        prop_assert!(rel(spectral.matrix(), &expect) < 1e-12);
        let contour = analytic_calc(&f, a.matrix(), CalcPath::Contour).unwrap();
        prop_assert!(rel(&contour.value, &expect) < 1e-9);
    }

    #[test]
    fn inverse_derivatives_match_resolvent_products(seed in any::<u64>(), n in 1usize..=4) {
        let mut s = sampler(n, seed);
        let a = s.pd();
        let b = s.hermitian();
        let ai = a.matrix().inverse().unwrap();
        let bm = b.matrix();
        let first = -&ai.matmul(bm).matmul(&ai);
        let second = ai.matmul(bm).matmul(&ai).matmul(bm).matmul(&ai).scale_re(2.0);
        let f = FunctionSpec::inv();
        for engine in [Engine::ClosedForm, Engine::DividedDiff, Engine::Contour] {
            let d1 = derivative(&f, &a, &b, 1, engine).unwrap();
            let d2 = derivative(&f, &a, &b, 2, engine).unwrap();
            prop_assert!(rel(d1.value.matrix(), &first) < 1e-8, "{engine:?} first order");
            prop_assert!(rel(d2.value.matrix(), &second) < 1e-8, "{engine:?} second order");
        }
    }

    #[test]
    fn cubic_derivative_is_the_word_sum(seed in any::<u64>(), n in 1usize..=5) {
        let mut s = sampler(n, seed);
        let a = s.hermitian();
        let b = s.hermitian();
        let (am, bm) = (a.matrix(), b.matrix());
        let a2 = am.matmul(am);
        let expect = &(&a2.matmul(bm) + &am.matmul(bm).matmul(am)) + &bm.matmul(&a2);
        let f = FunctionSpec::polynomial(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        for engine in [Engine::ClosedForm, Engine::DividedDiff, Engine::Contour, Engine::FiniteDiff] {
            let d = derivative(&f, &a, &b, 1, engine).unwrap();
            prop_assert!(rel(d.value.matrix(), &expect) < 1e-8, "{engine:?}");
        }
    }

    #[test]
    fn derivative_is_homogeneous_in_direction(
        class in classes(),
        seed in 0u64..10_000,
        m in 0usize..=3,
        t in 0.25f64..3.0,
    ) {
        let f = random_certified(class, seed, 3).unwrap();
        let mut s = sampler(3, seed);
        let a = s.hermitian_in(&f.domain).unwrap();
        let b = s.hermitian();
        let d = derivative(&f, &a, &b, m, Engine::DividedDiff).unwrap();
        let dt = derivative(&f, &a, &b.scale(t), m, Engine::DividedDiff).unwrap();
        let expect = d.value.scale(t.powi(m as i32));
        prop_assert!(rel(dt.value.matrix(), expect.matrix()) < 1e-10);
    }

    #[test]
    fn unitary_conjugation_commutes_with_calculus(class in classes(), seed in 0u64..10_000) {
        let f = random_certified(class, seed, 3).unwrap();
        let mut s = sampler(3, seed ^ 0x5a5a);
        let a = s.hermitian_in(&f.domain).unwrap();
        let u = s.haar_unitary(3);
        let conj = |m: &Matrix<f64>| u.matmul(m).matmul(&u.adjoint());
        let rotated = Hermitian::symmetrize(&conj(a.matrix()));
        let lhs = calc_hermitian(&f, &rotated).unwrap();
        let rhs = conj(calc_hermitian(&f, &a).unwrap().matrix());
        prop_assert!(rel(lhs.matrix(), &rhs) < 1e-11);
    }

    #[test]
    fn spec_display_round_trips(class in classes(), seed in 0u64..10_000, x in -0.9f64..0.9) {
        let f = random_certified(class, seed, 4).unwrap();
        let g = parse_spec(&f.to_string()).unwrap();
        prop_assert_eq!(f.domain, g.domain);
        let x = if f.domain.a == 0.0 { x.abs() + 0.05 } else { x };
        prop_assert_eq!(f.eval_real(x).unwrap(), g.eval_real(x).unwrap());
    }

    #[test]
    fn matrix_json_round_trips(seed in any::<u64>(), n in 1usize..=6) {
        let m = sampler(n, seed).ginibre(n);
        let text = serde_json::to_string(&MatrixJson::from_matrix(&m)).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_matrix::<f64>().unwrap(), m);
    }

    #[test]
    fn sampled_spectra_stay_inside(seed in any::<u64>(), n in 1usize..=6) {
        let mut s = sampler(n, seed);
        for iv in [Interval::symmetric_unit(), Interval::positive()] {
            let h = s.hermitian_in(&iv).unwrap();
            prop_assert!(hermitian_eigenvalues(&h).unwrap().iter().all(|&v| iv.contains(v)));
        }
        let p = s.psd();
        prop_assert!(hermitian_eigenvalues(&p).unwrap().iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn pick_margin_is_nonnegative(seed in 0u64..10_000, n in 1usize..=4) {
        let f = random_certified(CertifiedClass::Monotone, seed, 3).unwrap();
        let mut s = sampler(n, seed);
        let x = s.hermitian().complexify(&s.pd());
        let t = check_pick(&f, &x).unwrap();
        prop_assert!(t.margin.value >= -1e-8 * (1.0 + t.margin.scale));
    }

    #[test]
    fn scalar_sector_membership_is_the_argument_test(theta in -3.1f64..3.1, r in 0.1f64..10.0, p in 0.05f64..1.0) {
        let z = Complex64::from_polar(r, theta);
        let x = Matrix::from_diag(&[z]);
        let (inside, _) = sector_membership(&x, p).unwrap();
        let bound = p * std::f64::consts::PI;
        // stay away from the boundary rays
        prop_assume!((theta - bound).abs() > 1e-9 && theta.abs() > 1e-9);
        prop_assert_eq!(inside, theta > 0.0 && theta < bound);
    }
}

#[test]
fn single_precision_tracks_double() {
    let f = random_certified(CertifiedClass::Ktone(2), 7, 3).unwrap();
    let a = sampler(3, 11).hermitian_in(&f.domain).unwrap();
    let lo = calc_hermitian(&f, &a.cast::<f32>()).unwrap().cast::<f64>();
    let hi = calc_hermitian(&f, &a).unwrap();
    assert!(rel(lo.matrix(), hi.matrix()) < 1e-4);
}
