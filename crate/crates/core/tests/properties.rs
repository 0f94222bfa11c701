//! Randomized property suites for the exact layer, the scenario maps and the
//! numerical oracles.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use tsirelson_core::certificates::Level;
use tsirelson_core::exact::PsdVerdict;
use tsirelson_core::linalg::eigvals_sym;
use tsirelson_core::optimize::{hessian_fd, hessian_closed_form, npa_bound, qubit_max};
use tsirelson_core::scenario::{grad_qubit, Behavior, BellExpression, GradientMode, QubitParams};
use tsirelson_core::slice::expr_from_slice;
use tsirelson_core::{ExactMatrix, Letter, Monomial, NCPolynomial, QSqrt2};

fn qs() -> impl Strategy<Value = QSqrt2> {
    (-40i64..40, 1i64..12, -40i64..40, 1i64..12).prop_map(|(a, b, c, d)| QSqrt2::from_parts(a, b, c, d))
}

fn small_qs() -> impl Strategy<Value = QSqrt2> {
    (-3i64..4, -2i64..3).prop_map(|(a, c)| QSqrt2::from_parts(a, 1, c, 1))
}

fn monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::vec(0usize..4, 0..5).prop_map(|ls| Monomial::from_letters(ls.into_iter().map(|i| Letter::ALL[i])))
}

fn poly() -> impl Strategy<Value = NCPolynomial> {
    prop::collection::vec((small_qs(), monomial()), 0..4).prop_map(|terms| {
        let mut p = NCPolynomial::zero();
        for (c, m) in terms {
            p.add_term(m, &c);
        }
        p
    })
}

fn angles() -> impl Strategy<Value = QubitParams> {
    (0.0..std::f64::consts::PI, prop::array::uniform4(-4.0..4.0f64))
        .prop_map(|(t, a)| QubitParams::new(t, [a[0], a[1]], [a[2], a[3]]))
}

fn exact_expr() -> impl Strategy<Value = BellExpression<QSqrt2>> {
    prop::array::uniform8(qs()).prop_map(|x| BellExpression::from_vec8(&x))
}

fn exact_behavior() -> impl Strategy<Value = Behavior<QSqrt2>> {
    prop::array::uniform8(qs()).prop_map(|x| Behavior::from_vec8(&x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn field_laws(a in qs(), b in qs(), c in qs()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), QSqrt2::one());
        }
        prop_assert_eq!(a.to_string().parse::<QSqrt2>().unwrap(), a.clone());
    }

    #[test]
    fn float_conversion_tracks_a_high_precision_oracle(a in qs()) {
        // √2 to 60 digits via an integer square root.
        let digits = BigInt::from(10).pow(60);
        let sqrt2 = BigRational::new((BigInt::from(2) * &digits * &digits).sqrt(), digits);
        let approx = a.rational_part() + a.surd_part() * sqrt2;
        let oracle = approx.numer().to_string().parse::<f64>().unwrap()
            / approx.denom().to_string().parse::<f64>().unwrap();
        let got = a.to_f64();
        prop_assert!((got - oracle).abs() <= 4.0 * f64::EPSILON * oracle.abs().max(f64::MIN_POSITIVE), "{} vs {}", got, oracle);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn polynomial_laws(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!((&p * &q).adjoint(), &q.adjoint() * &p.adjoint());
        prop_assert_eq!(p.adjoint().adjoint(), p.clone());
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(p.to_string().parse::<NCPolynomial>().unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn psd_verdict_agrees_with_eigenvalues(b in prop::collection::vec(-3i64..4, 16), shift in -4i64..3, zero_col in 0usize..5) {
        // M = BᵀB + shift·I, with a zeroed column of B to hit singular cases.
        let n = 4;
        let mut bm = vec![vec![QSqrt2::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                if j != zero_col {
                    bm[i][j] = QSqrt2::from_int(b[i * n + j]);
                }
            }
        }
        let bm = ExactMatrix::from_rows(bm).unwrap();
        let mut m = bm.transpose().mul(&bm).unwrap().to_rows();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = &row[i] + &QSqrt2::from_int(shift);
        }
        let m = ExactMatrix::from_rows(m).unwrap();
        let lo = eigvals_sym(&m.to_f64()).unwrap()[0];
        match m.psd_check().unwrap() {
            PsdVerdict::Psd { .. } => prop_assert!(lo > -1e-9, "{lo}"),
            PsdVerdict::NotPsd { witness, value } => {
                prop_assert!(lo < 1e-9, "{lo}");
                prop_assert!(value.is_negative());
                prop_assert_eq!(m.quadratic_form(&witness).unwrap(), value);
            }
        }
    }

    #[test]
    fn kernel_plus_rank_is_cols(v in prop::collection::vec(small_qs(), 12), cols in 1usize..5) {
        let rows = 12 / cols.max(1);
        let data: Vec<Vec<QSqrt2>> = (0..rows).map(|i| v[i * cols..(i + 1) * cols].to_vec()).collect();
        let m = ExactMatrix::from_rows(data).unwrap();
        let kernel = m.kernel();
        prop_assert_eq!(kernel.len() + m.rank(), cols);
        for k in &kernel {
            prop_assert!(m.mul_vec(k).unwrap().iter().all(QSqrt2::is_zero));
        }
    }

    #[test]
    fn pairing_is_invariant_under_the_symmetry(e in exact_expr(), p in exact_behavior(), k in 0i64..8) {
        prop_assert_eq!(e.symmetry_pow(k).pair(&p.symmetry_pow(k)), e.pair(&p));
        prop_assert_eq!(e.symmetry_pow(8), e);
    }

    #[test]
    fn qubit_behaviors_are_bounded(params in angles()) {
        let b = params.behavior();
        prop_assert!(b.is_bounded());
        prop_assert!(b.to_vec8().iter().all(|v| v.abs() <= 1.0 + 1e-15));
    }

    #[test]
    fn gradient_matches_central_differences(params in angles(), x in prop::array::uniform8(-1.0..1.0f64)) {
        let e = BellExpression::from_vec8(&x);
        let a = grad_qubit(&e, &params, GradientMode::Analytic);
        let f = grad_qubit(&e, &params, GradientMode::FiniteDifference);
        for (u, v) in a.iter().zip(&f) {
            prop_assert!((u - v).abs() <= 1e-6, "{:?} vs {:?}", a, f);
        }
    }

    #[test]
    fn closed_form_hessian_matches_fd(r in 0.0..0.8f64, gamma in 0.0..std::f64::consts::TAU, alpha in 0.0..std::f64::consts::TAU) {
        let d = (&hessian_closed_form(r, gamma, alpha) - &hessian_fd(r * gamma.sin(), r * gamma.cos(), alpha)).max_abs();
        prop_assert!(d <= 1e-5, "{d}");
        prop_assert_eq!(hessian_closed_form(r, gamma, alpha).max_asymmetry(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn relaxation_bounds_realizable_values(r in 0.0..0.35f64, gamma in 0.0..std::f64::consts::TAU) {
        let e = expr_from_slice(r * gamma.cos(), r * gamma.sin());
        let q = qubit_max(&e, 50, 1e-9).value;
        let upper = npa_bound(&e, Level::L1AB_ABB_AAB, 1e-8).unwrap();
        prop_assert!(q <= upper + 1e-5, "qubit {} > npa {}", q, upper);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn relaxation_levels_are_monotone(x in prop::array::uniform8(-1.0..1.0f64)) {
        let e = BellExpression::from_vec8(&x);
        let v: Vec<f64> = Level::ALL.iter().map(|&l| npa_bound(&e, l, 1e-8).unwrap()).collect();
        for w in v.windows(2) {
            prop_assert!(w[0] >= w[1] - 1e-6, "{:?}", v);
        }
    }

    #[test]
    fn relaxation_respects_the_symmetry(x in prop::array::uniform8(-1.0..1.0f64), level in 0usize..4) {
        let e = BellExpression::from_vec8(&x);
        let l = Level::ALL[level];
        let a = npa_bound(&e, l, 1e-8).unwrap();
        let b = npa_bound(&e.symmetry(), l, 1e-8).unwrap();
        prop_assert!((a - b).abs() <= 1e-5, "{} vs {}", a, b);
    }
}
