//! A condensed property suite runnable from the command line.

use super::config::ExperimentConfig;
use super::experiment::Check;
use super::matrix_io::{parse_matrix, write_matrix};
use super::operators::{build_operator, OperatorSpec};
use crate::dixmier::{
    estimate_dixmier_trace, make_model_spectrum, ModelSpectrum, DEFAULT_SLOPE_TOL,
    DEFAULT_WINDOW_FRACTION,
};
use crate::error::Result;
use crate::kato::{validate_kato, KatoFunction, KatoGrid};
use crate::linalg::{Hermitian, SingularValues};
use crate::norms::{check_symmetric_norm_axioms, AxiomSamples, NormKind};
use crate::sampling;
use crate::spectrum::SingularSpectrum;
use crate::trotter::{Scheme, SplittingProblem};

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

fn axiom_checks(out: &mut Vec<Check>) -> Result<()> {
    let samples = AxiomSamples::seeded(20_240_601, 200, 8)?;
    for text in [
        "schatten:1",
        "schatten:2",
        "operator",
        "dixmier",
        "weak:2",
        "macaev:1",
        "macaev:2",
        "pi:harmonic",
    ] {
        let kind: NormKind = text.parse()?;
        let report = check_symmetric_norm_axioms(&kind, &samples, 1e-9)?;
        let failures: usize = report.outcomes.iter().map(|o| o.failures).sum();
        out.push(check(
            &format!("axioms {text}"),
            report.passed(),
            format!("{failures} failures over {} samples", samples.len()),
        ));
    }
    Ok(())
}

fn kato_checks(out: &mut Vec<Check>) -> Result<()> {
    let grid = KatoGrid::default();
    for (h, expected) in [
        (KatoFunction::exp(), 0.5),
        (KatoFunction::resolvent_power(1.0)?, 1.0),
    ] {
        let report = validate_kato(&h, &grid, 2.0)?;
        let close = (report.beta_seminorm - expected).abs() <= 0.005;
        out.push(check(
            &format!("kato {}", h.label()),
            report.passed() && close,
            format!("[h]_2 = {:.5}, expected {expected}", report.beta_seminorm),
        ));
    }
    Ok(())
}

fn dixmier_checks(out: &mut Vec<Check>) -> Result<()> {
    for c in [1.0, 2.5] {
        let s = make_model_spectrum(ModelSpectrum::Harmonic { c }, 100_000)?;
        let est = estimate_dixmier_trace(&s, DEFAULT_WINDOW_FRACTION, DEFAULT_SLOPE_TOL)?;
        out.push(check(
            &format!("dixmier harmonic c={c}"),
            (est.value - c).abs() <= 0.05 * c && est.converged,
            format!("estimate {:.5}, slope {:.2e}", est.value, est.slope),
        ));
    }
    Ok(())
}

fn oracle_checks(out: &mut Vec<Check>) -> Result<()> {
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let m = sampling::random_gaussian(&mut sampling::rng(seed), 6);
        let via_svd = m.singular_values()?;
        let gram = Hermitian::new(&m.adjoint() * &m)?;
        let via_gram = SingularSpectrum::from_unsorted(
            &gram
                .eig()?
                .clamped_nonnegative()?
                .iter()
                .map(|v| v.sqrt())
                .collect::<Vec<_>>(),
        );
        for (a, b) in via_svd.values().iter().zip(via_gram.values()) {
            worst = worst.max((a - b).abs());
        }
    }
    out.push(check(
        "singular values vs gram eigenvalues",
        worst <= 1e-9,
        format!("max deviation {worst:.2e}"),
    ));
    Ok(())
}

fn trotter_checks(out: &mut Vec<Check>) -> Result<()> {
    let mut rng = sampling::rng(77);
    let a = sampling::random_psd(&mut rng, 6);
    let b = sampling::random_psd(&mut rng, 6);
    let scale = |h: Hermitian| -> Result<Hermitian> {
        let top = h.eig()?.eigenvalues[5];
        Ok(h.scale_real(1.0 / top))
    };
    let p = SplittingProblem::new(
        &scale(a)?,
        &scale(b)?,
        KatoFunction::exp(),
        KatoFunction::exp(),
    )?;
    let semigroup = (p.exact(0.4)?.as_matrix() * p.exact(0.7)?.as_matrix())
        .max_abs_diff(p.exact(1.1)?.as_matrix());
    out.push(check(
        "semigroup property",
        semigroup <= 1e-10,
        format!("deviation {semigroup:.2e}"),
    ));
    let mut top: f64 = 0.0;
    for scheme in Scheme::ALL {
        for n in [1, 5, 32] {
            top = top.max(p.approximant(scheme, 1.0, n)?.singular_values()?.largest());
        }
    }
    out.push(check(
        "contractivity",
        top <= 1.0 + 1e-12,
        format!("largest norm {top:.15}"),
    ));
    let fg = p.approximant(Scheme::Fg, 1.0, 7)?;
    let gf = p.approximant(Scheme::Gf, 1.0, 7)?;
    let adjoint = fg.max_abs_diff(&gf.adjoint());
    out.push(check(
        "FG adjoint of GF",
        adjoint <= 1e-10,
        format!("deviation {adjoint:.2e}"),
    ));
    Ok(())
}

fn harness_checks(out: &mut Vec<Check>) -> Result<()> {
    let lap = build_operator(&OperatorSpec::Laplacian1d {
        n: 4,
        h: 1.0,
        normalize: false,
    })?;
    let eig = lap.eig()?;
    let worst = (1..=4)
        .map(|k| {
            let expected = 4.0 * (k as f64 * std::f64::consts::PI / 10.0).sin().powi(2);
            (eig.eigenvalues[k - 1] - expected).abs()
        })
        .fold(0.0, f64::max);
    out.push(check(
        "laplacian spectrum",
        worst <= 1e-12,
        format!("max deviation {worst:.2e}"),
    ));
    let m = sampling::random_gaussian(&mut sampling::rng(5), 4);
    out.push(check(
        "matrix file round trip",
        parse_matrix(&write_matrix(&m))? == m,
        String::new(),
    ));
    let config = ExperimentConfig::default();
    let back = ExperimentConfig::from_toml_str(&config.to_toml_string()?)?;
    out.push(check("config round trip", back == config, String::new()));
    Ok(())
}

/// Runs every group; an error inside a group is reported as a failed check.
pub fn run_selftest() -> Vec<Check> {
    type Group = fn(&mut Vec<Check>) -> Result<()>;
    let groups: [(&str, Group); 6] = [
        ("axioms", axiom_checks),
        ("kato", kato_checks),
        ("dixmier", dixmier_checks),
        ("oracles", oracle_checks),
        ("trotter", trotter_checks),
        ("harness", harness_checks),
    ];
    let mut out = Vec::new();
    for (name, group) in groups {
        if let Err(e) = group(&mut out) {
            out.push(check(name, false, format!("error: {e}")));
        }
    }
    out
}
