mod common;

use proptest::prelude::*;
use trotter_dixmier::harness::{parse_matrix, write_matrix, ExperimentConfig, OperatorSpec};
use trotter_dixmier::kato::KatoFunction;
use trotter_dixmier::linalg::{Hermitian, Matrix, SingularValues};
use trotter_dixmier::norms::{ky_fan_dominated_by, NormKind};
use trotter_dixmier::sampling;
use trotter_dixmier::spectrum::SingularSpectrum;
use trotter_dixmier::trotter::{Scheme, SplittingProblem};

fn kinds() -> Vec<NormKind> {
    [
        "operator",
        "schatten:1",
        "schatten:2",
        "schatten:3.5",
        "dixmier",
        "weak:2",
        "macaev:1",
        "macaev:2",
        "pi:harmonic",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect()
}

fn spectrum() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..10.0, 1..24)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_sandwiched(values in spectrum()) {
        let s = SingularSpectrum::from_unsorted(&values);
        for kind in kinds() {
            let v = kind.evaluate(&s).unwrap();
            prop_assert!(v >= s.largest() * (1.0 - 1e-12), "{kind}");
            prop_assert!(v <= s.sum() * (1.0 + 1e-12) + 1e-300, "{kind}");
        }
    }

    #[test]
    fn norms_are_homogeneous_and_subadditive(x in spectrum(), y in spectrum(), alpha in 0.0f64..5.0) {
        let len = x.len().max(y.len());
        let pad = |v: &Vec<f64>| { let mut v = v.clone(); v.resize(len, 0.0); v };
        let (x, y) = (pad(&x), pad(&y));
        let sx = SingularSpectrum::from_unsorted(&x);
        let sy = SingularSpectrum::from_unsorted(&y);
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let ssum = SingularSpectrum::from_unsorted(&sum);
        for kind in kinds() {
            let nx = kind.evaluate(&sx).unwrap();
            let scaled = kind.evaluate(&sx.scaled(alpha)).unwrap();
            prop_assert!((scaled - alpha * nx).abs() <= 1e-10 * (1.0 + alpha * nx));
            // Triangle inequality for the entrywise sum.
            let lhs = kind.evaluate(&ssum).unwrap();
            let rhs = nx + kind.evaluate(&sy).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-10) + 1e-12, "{kind}");
        }
    }

    #[test]
    fn ky_fan_dominance_implies_norm_order(values in spectrum(), shrink in prop::collection::vec(0.0f64..=1.0, 24)) {
        let xi = SingularSpectrum::from_unsorted(&values);
        let eta_values: Vec<f64> = values.iter().zip(&shrink).map(|(v, u)| v * u).collect();
        let eta = SingularSpectrum::from_unsorted(&eta_values);
        prop_assert!(ky_fan_dominated_by(&eta, &xi));
        for kind in kinds() {
            prop_assert!(kind.evaluate(&eta).unwrap() <= kind.evaluate(&xi).unwrap() * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn norm_kind_display_round_trips(p in 1.0f64..20.0, q in 1.0001f64..20.0, a in 0.01f64..=1.0) {
        for kind in [NormKind::Schatten(p), NormKind::Weak(q), NormKind::Macaev(p), format!("pi:power:{a}").parse().unwrap()] {
            let text = kind.to_string();
            prop_assert_eq!(text.parse::<NormKind>().unwrap(), kind);
        }
    }

    #[test]
    fn matrix_files_round_trip(seed in any::<u64>(), dim in 1usize..6) {
        let m = sampling::random_gaussian(&mut sampling::rng(seed), dim);
        prop_assert_eq!(parse_matrix(&write_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn configs_round_trip(t in 0.01f64..10.0, seed in 0u64..1_000_000, n in 2usize..40, h in 1e-3f64..1.0) {
        let c = ExperimentConfig {
            t,
            operator_a: OperatorSpec::RandomPsd { n, seed },
            operator_b: OperatorSpec::Laplacian1d { n, h, normalize: seed % 2 == 0 },
            ..ExperimentConfig::default()
        };
        let back = ExperimentConfig::from_toml_str(&c.to_toml_string().unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn every_scheme_is_a_contraction(seed in any::<u64>(), n in 1u64..40, t in 0.0f64..4.0, a in 0.5f64..4.0) {
        let (x, y) = common::seeded_pair(seed, 4);
        let g = KatoFunction::resolvent_power(a).unwrap();
        let p = SplittingProblem::new(&x, &y, KatoFunction::exp(), g).unwrap();
        for scheme in Scheme::ALL {
            let m = p.approximant(scheme, t, n).unwrap();
            prop_assert!(m.singular_values().unwrap().largest() <= 1.0 + 1e-12);
            if scheme.is_symmetric() {
                let h = Hermitian::new(m).unwrap();
                prop_assert!(h.eig().unwrap().eigenvalues[0] >= -1e-12);
            }
        }
    }

    #[test]
    fn fg_and_gf_are_adjoint(seed in any::<u64>(), n in 1u64..20) {
        let (x, y) = common::seeded_pair(seed, 5);
        let p = SplittingProblem::new(&x, &y, KatoFunction::exp(), KatoFunction::exp()).unwrap();
        let fg = p.approximant(Scheme::Fg, 1.0, n).unwrap();
        let gf: Matrix = p.approximant(Scheme::Gf, 1.0, n).unwrap();
        prop_assert!(fg.max_abs_diff(&gf.adjoint()) <= 1e-10);
    }

    #[test]
    fn exact_semigroup_property(seed in any::<u64>(), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let (x, y) = common::seeded_pair(seed, 5);
        let p = SplittingProblem::new(&x, &y, KatoFunction::exp(), KatoFunction::exp()).unwrap();
        let lhs = p.exact(s).unwrap().as_matrix() * p.exact(t).unwrap().as_matrix();
        prop_assert!(lhs.max_abs_diff(p.exact(s + t).unwrap().as_matrix()) <= 1e-10);
    }
}
