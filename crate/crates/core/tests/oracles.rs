mod common;

use common::{direct_product, exp_neg, expm, gram_singular_values, seeded_pair};
use trotter_dixmier::kato::KatoFunction;
use trotter_dixmier::linalg::{Matrix, SingularValues};
use trotter_dixmier::sampling;
use trotter_dixmier::trotter::{approximant, exact_semigroup, Scheme, SplittingProblem};

#[test]
fn pade_oracle_matches_closed_forms() {
    let d = Matrix::from_real_diag(&[0.0, -1.0, -7.5]);
    let e = expm(&d);
    assert!(
        e.max_abs_diff(&Matrix::from_real_diag(&[
            1.0,
            (-1f64).exp(),
            (-7.5f64).exp()
        ])) < 1e-14
    );
    // Nilpotent Jordan block: exp = I + N.
    let n = Matrix::from_real_rows(&[vec![0.0, 3.0], vec![0.0, 0.0]]);
    assert!(
        expm(&n).max_abs_diff(&Matrix::from_real_rows(&[vec![1.0, 3.0], vec![0.0, 1.0]])) < 1e-14
    );
}

#[test]
fn singular_values_match_gram_eigenvalues() {
    for seed in 0..20 {
        let m = sampling::random_gaussian(&mut sampling::rng(seed), 7);
        let fast = m.singular_values().unwrap();
        let oracle = gram_singular_values(&m);
        for (a, b) in fast.values().iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-9, "seed {seed}: {a} vs {b}");
        }
    }
}

#[test]
fn exact_semigroup_matches_scaling_squaring() {
    for seed in 0..20 {
        let (a, b) = seeded_pair(100 + seed, 6);
        let t = 0.5 + seed as f64 / 10.0;
        let fast = exact_semigroup(&a, &b, t).unwrap();
        let oracle = exp_neg(&a.add(&b), t);
        let dev = fast.as_matrix().max_abs_diff(&oracle);
        assert!(dev <= 1e-9, "seed {seed}: {dev:e}");
    }
}

#[test]
fn approximants_match_direct_factor_products() {
    for seed in 0..20 {
        let (a, b) = seeded_pair(200 + seed, 4);
        let n = 1 + seed % 5;
        for scheme in Scheme::ALL {
            let fast = approximant(
                scheme,
                &KatoFunction::exp(),
                &KatoFunction::exp(),
                &a,
                &b,
                1.0,
                n,
            )
            .unwrap();
            let oracle = direct_product(scheme, &a, &b, 1.0, n);
            let dev = fast.max_abs_diff(&oracle);
            assert!(dev <= 1e-9, "seed {seed} {scheme}: {dev:e}");
        }
    }
}

#[test]
fn f_sym_three_steps_spelled_out() {
    let (a, b) = seeded_pair(7, 4);
    let t = 1.0;
    let factors = [
        exp_neg(&b, t / 6.0),
        exp_neg(&a, t / 3.0),
        exp_neg(&b, t / 3.0),
        exp_neg(&a, t / 3.0),
        exp_neg(&b, t / 3.0),
        exp_neg(&a, t / 3.0),
        exp_neg(&b, t / 6.0),
    ];
    let oracle = Matrix::product(&factors).unwrap();
    let p = SplittingProblem::new(&a, &b, KatoFunction::exp(), KatoFunction::exp()).unwrap();
    assert!(
        p.approximant(Scheme::FSym, t, 3)
            .unwrap()
            .max_abs_diff(&oracle)
            < 1e-12
    );
}
