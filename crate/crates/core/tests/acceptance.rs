//! Acceptance criteria, one `PASS`/`FAIL` line each. Exits nonzero if any criterion fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use qsd::casebook::{self, BellFamilyParams};
use qsd::cli::figure1_csv;
use qsd::discriminate::{self, UqsdRegime};
use qsd::locc;
use qsd::majorize::{self, diagonal_density};
use qsd::measure::{bayes_posterior, outcome_probabilities, posterior_state, Measurement, OutcomeStatistics};
use qsd::numkernel::{c, hermitian_eig, kron, partial_trace, trace_norm, ComplexMatrix, Subsystem};
use qsd::random::{random_density, random_orthonormal_pair, random_probability_vector, random_state_vector, random_traceless, random_unitary, rng};
use qsd::states::{density_from_ensemble, shannon_entropy, validate_density, Ensemble, PureState, State};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

/// `n` points from `lo` to `hi` with both endpoints exact.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect()
}

fn family_grid() -> Vec<(f64, f64, BellFamilyParams)> {
    let v = linspace(FRAC_1_SQRT_2, 1.0, 20);
    let mut out = Vec::new();
    for &a in &v {
        for &cc in &v {
            out.push((a, cc, BellFamilyParams::from_ac(a, cc).expect("grid point")));
        }
    }
    out
}

fn qubit_state(v: Vec<Complex64>) -> PureState {
    PureState::new(v).expect("unit vector")
}

fn helstrom_oracles() -> Outcome {
    let tol = 1e-6;
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let psi1 = qubit_state(random_state_vector(&mut r, 2));
        let psi2 = qubit_state(random_state_vector(&mut r, 2));
        let p1 = r.gen_range(0.05..0.95);
        let p2 = 1.0 - p1;
        let closed = 0.5 * (1.0 - (1.0 - 4.0 * p1 * p2 * psi1.overlap(&psi2).norm_sqr()).max(0.0).sqrt());
        let lam = &psi2.projector().scale_real(p2) - &psi1.projector().scale_real(p1);
        let operator = 0.5 * (1.0 - trace_norm(&lam).expect("hermitian"));
        let e = Ensemble::pure(vec![(p1, psi1), (p2, psi2)]).expect("ensemble");
        let brute = discriminate::brute_force_min_error(&e, 24).expect("brute force");
        worst = worst.max((closed - operator).abs()).max((closed - brute).abs());
    }
    outcome(worst <= tol, format!("max deviation {worst:.3e} over 100 ensembles, tol {tol:e}"))
}

fn uqsd_regimes() -> Outcome {
    let tol = 1e-9;
    let s = 0.5;
    let psi1 = qubit_state(vec![c(1.0, 0.0), c(0.0, 0.0)]);
    let psi2 = qubit_state(vec![c(s, 0.0), c((1.0 - s * s).sqrt(), 0.0)]);
    let (lo, hi) = (s * s / (1.0 + s * s), 1.0 / (1.0 + s * s));
    let mut worst = 0.0f64;
    let mut regime_errors = 0;
    for k in 0..=90 {
        let p1 = 0.05 + 0.01 * k as f64;
        let p2 = 1.0 - p1;
        let inside = p1 >= lo - 1e-12 && p1 <= hi + 1e-12;
        let mut candidates = vec![p1 + p2 * s * s, p2 + p1 * s * s];
        if inside {
            candidates.push(2.0 * (p1 * p2).sqrt() * s);
        }
        let best = candidates.into_iter().fold(f64::INFINITY, f64::min);
        let res = discriminate::uqsd_two_state(p1, &psi1, p2, &psi2).expect("uqsd");
        worst = worst.max((res.result.failure_probability - best).abs());
        if (res.regime == UqsdRegime::Povm) != inside {
            regime_errors += 1;
        }
    }
    outcome(
        worst <= tol && regime_errors == 0,
        format!("max failure deviation {worst:.3e} (tol {tol:e}), POVM interval [{lo}, {hi}], {regime_errors} regime mismatches"),
    )
}

fn equidiagonalization() -> Outcome {
    let (diag_tol, unit_tol) = (1e-9, 1e-10);
    let mut r = rng(3);
    let (mut worst_diag, mut worst_unit) = (0.0f64, 0.0f64);
    for &dim in &[2, 4, 8] {
        for _ in 0..200 {
            let m = random_traceless(&mut r, dim);
            let res = locc::equidiag_power2(&m).expect("equidiag");
            let u = &res.unitary;
            let t = &(u * &m) * &u.adjoint();
            worst_diag = t.diagonal().iter().map(|z| z.norm()).fold(worst_diag, f64::max);
            worst_unit = worst_unit.max((&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(dim)));
        }
    }
    outcome(
        worst_diag <= diag_tol && worst_unit <= unit_tol,
        format!("max |diag| {worst_diag:.3e} (tol {diag_tol:e}), max unitarity deviation {worst_unit:.3e} (tol {unit_tol:e}), 600 matrices"),
    )
}

fn walgate_end_to_end() -> Outcome {
    let tol = 1e-9;
    let mut r = rng(4);
    let (mut worst_err, mut worst_diag) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let (u, v) = random_orthonormal_pair(&mut r, 4);
        let psi1 = PureState::bipartite(u, 2, 2).expect("state");
        let psi2 = PureState::bipartite(v, 2, 2).expect("state");
        let w = locc::walgate_protocol(&psi1, &psi2).expect("protocol");
        for input in 0..2 {
            worst_err = worst_err.max(1.0 - w.simulate(input).expect("simulation"));
        }
        let c1 = w.padded.psi1.coefficient_matrix().expect("bipartite");
        let c2 = w.padded.psi2.coefficient_matrix().expect("bipartite");
        let cross = &c1 * &c2.adjoint();
        let basis = &w.alice_basis;
        let rotated = &(&basis.adjoint() * &cross) * basis;
        worst_diag = rotated.diagonal().iter().map(|z| z.norm()).fold(worst_diag, f64::max);
    }
    outcome(
        worst_err <= tol && worst_diag <= tol,
        format!("max identification error {worst_err:.3e}, max diagonal residual {worst_diag:.3e}, tol {tol:e}, 50 pairs"),
    )
}

fn nielsen_grid() -> Outcome {
    let (comp_tol, post_tol) = (1e-10, 1e-9);
    let grid = linspace(0.5, 1.0, 20);
    let (mut worst_comp, mut worst_post, mut count) = (0.0f64, 0.0f64, 0);
    for &p1 in &grid {
        for &q1 in grid.iter().filter(|&&q| q >= p1) {
            let prot = locc::nielsen_protocol_2qubit(p1, q1).expect("feasible pair");
            worst_comp = worst_comp.max(prot.measurement.completeness_residual());
            for op in prot.measurement.operators() {
                let lifted = kron(op, &ComplexMatrix::identity(2));
                let post = PureState::normalized(lifted.apply(prot.initial.amplitudes()).expect("apply")).expect("nonzero outcome");
                let reduced = partial_trace(&post.projector(), 2, 2, Subsystem::B).expect("trace");
                let mut ev = hermitian_eig(&reduced).expect("eig").eigenvalues;
                ev.sort_by(|x, y| y.total_cmp(x));
                worst_post = worst_post.max((ev[0] - q1).abs()).max((ev[1] - (1.0 - q1)).abs());
            }
            count += 1;
        }
    }
    outcome(
        worst_comp <= comp_tol && worst_post <= post_tol,
        format!("{count} feasible pairs, max completeness residual {worst_comp:.3e} (tol {comp_tol:e}), max Schmidt deviation {worst_post:.3e} (tol {post_tol:e})"),
    )
}

fn transform_measurements() -> Outcome {
    let tol = 1e-9;
    let mut r = rng(6);
    let (mut worst_res, mut worst_comp) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let n_targets = r.gen_range(2..=3);
        let probs = random_probability_vector(&mut r, n_targets);
        let targets: Vec<(f64, qsd::states::DensityOperator)> =
            probs.iter().map(|&p| (p, validate_density(&random_density(&mut r, 3)).expect("density"))).collect();
        let mut y = [0.0; 3];
        for (p, t) in &targets {
            let mut ev = t.spectrum();
            ev.sort_by(|a, b| b.total_cmp(a));
            for (acc, v) in y.iter_mut().zip(ev) {
                *acc += p * v.max(0.0);
            }
        }
        // x = D y for a random convex mix of permutations, so x is majorized by y.
        let weights = random_probability_vector(&mut r, 3);
        let mut x = vec![0.0; 3];
        for w in weights {
            let mut perm = [0usize, 1, 2];
            perm.shuffle(&mut r);
            for (i, &j) in perm.iter().enumerate() {
                x[i] += w * y[j];
            }
        }
        let u = random_unitary(&mut r, 3);
        let rho_m = &(&u * diagonal_density(&x).expect("spectrum").matrix()) * &u.adjoint();
        let rho = validate_density(&rho_m.hermitian_part()).expect("density");
        let tm = majorize::construct_transform_measurement(&rho, &targets).expect("transform");
        for (b, m) in tm.branches.iter().zip(tm.measurement.operators()) {
            let out = &(m * rho.matrix()) * &m.adjoint();
            worst_res = worst_res.max(out.max_abs_diff(&targets[b.target].1.matrix().scale_real(b.probability)));
        }
        let sum = tm.measurement.operators().iter().fold(ComplexMatrix::zeros(3, 3), |acc, m| &acc + &(&m.adjoint() * m));
        worst_comp = worst_comp.max(sum.max_abs_diff(&ComplexMatrix::identity(3)));
    }
    outcome(
        worst_res <= tol && worst_comp <= tol,
        format!("max branch residual {worst_res:.3e}, max completeness residual {worst_comp:.3e}, tol {tol:e}, 50 instances"),
    )
}

fn ghosh_closed_form() -> Outcome {
    let tol = 1e-8;
    let mut worst = 0.0f64;
    for (a, cc, p) in family_grid() {
        let r = casebook::ghosh4_negativity(&p).expect("ghosh4");
        worst = worst.max((r.numeric - (a * a + cc * cc).log2()).abs());
    }
    outcome(worst <= tol, format!("max deviation from log2(a^2+c^2) {worst:.3e} on 20x20 grid, tol {tol:e}"))
}

fn ghosh_region() -> Outcome {
    let tol = 1e-9;
    let mut mismatches = Vec::new();
    let grid = family_grid();
    for (a, cc, p) in &grid {
        let (b, d) = (p.b, p.d);
        let x = 4.0 * a * a * b * b - cc * cc * d * d;
        let region = x > 0.75;
        let r = casebook::ghosh3_negativity(p, false).expect("ghosh3");
        let numeric_region = r.numeric >= 1.0 - tol;
        if region != numeric_region {
            mismatches.push((*a, *cc, x, r.numeric));
        }
    }
    let sample = mismatches
        .first()
        .map(|(a, cc, x, n)| format!("; first mismatch a={a:.6} c={cc:.6} X={x:.6} E_N={n:.6}"))
        .unwrap_or_default();
    outcome(
        mismatches.is_empty(),
        format!("{} of {} grid points disagree between X > 3/4 and E_N >= 1{sample}", mismatches.len(), grid.len()),
    )
}

fn maj4_analytic() -> Outcome {
    let tol = 1e-10;
    let (mut worst, mut wrong_verdicts) = (0.0f64, 0);
    for (a, cc, p) in family_grid() {
        let r = casebook::maj4_indistinguishability(&p).expect("maj4");
        let (b, d) = (p.b, p.d);
        let mut analytic: Vec<f64> = [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)]
            .iter()
            .map(|(sb, sc, sd)| (a + sb * b + sc * cc + sd * d).powi(2) / 8.0)
            .collect();
        analytic.sort_by(|x, y| y.total_cmp(x));
        let mut numeric = r.numeric_eigenvalues.clone();
        numeric.sort_by(|x, y| y.total_cmp(x));
        worst = analytic.iter().zip(&numeric).map(|(x, y)| (x - y).abs()).fold(worst, f64::max);
        let corner = a == 1.0 && cc == 1.0;
        if r.majorized != corner {
            wrong_verdicts += 1;
        }
    }
    outcome(
        worst <= tol && wrong_verdicts == 0,
        format!("max eigenvalue deviation {worst:.3e} (tol {tol:e}), {wrong_verdicts} verdicts differ from the corner set"),
    )
}

fn preservation_bounds() -> Vec<(String, Outcome)> {
    let grid = family_grid();
    let (mut worst_alpha, mut worst_det, mut worst_conc, mut conc_fail, mut skipped) = (0.0f64, 0.0f64, 0.0f64, 0, 0);
    for (_, _, p) in &grid {
        let BellFamilyParams { a, b, c: cc, d } = *p;
        let (ab, cd) = (a * b, cc * d);
        if ab + cd <= 1e-12 {
            skipped += 1;
            continue;
        }
        let r = casebook::preserve2_bound(p).expect("preserve2");
        worst_alpha = worst_alpha.max((r.alpha2_bound - (a * a * cd + cc * cc * ab) / (ab + cd)).abs());
        worst_det = worst_det.max(r.det_reduced.abs());
        let geometric = (2.0 * ab * 2.0 * cd).sqrt();
        let dev = (r.concurrence_phi - geometric).abs();
        worst_conc = worst_conc.max(dev);
        if dev > 1e-10 {
            conc_fail += 1;
        }
    }
    let preserve2_alpha = outcome(worst_alpha <= 1e-10, format!("max alpha^2 deviation {worst_alpha:.3e}, {skipped} product points skipped"));
    let preserve2_det = outcome(worst_det <= 1e-12, format!("max det rho_A {worst_det:.3e}, tol 1e-12"));
    let preserve2_conc = outcome(
        conc_fail == 0,
        format!("{conc_fail} of {} points off by more than 1e-10, max deviation {worst_conc:.3e}", grid.len() - skipped),
    );

    let mut worst_prod = 0.0f64;
    for (a, cc, p) in &grid {
        let r = casebook::preserve4_product_bound(p).expect("preserve4 product");
        let search = casebook::product_assisted_grid_min(p, 100);
        worst_prod = worst_prod.max((r.alpha2_bound - (a * a).min(cc * cc)).abs()).max((r.alpha2_bound - search).abs());
    }
    let product = outcome(worst_prod <= 1e-10, format!("max deviation from min(a^2,c^2) and 100x100 search {worst_prod:.3e}, tol 1e-10"));

    let bell = casebook::preserve4_bell_bound(&BellFamilyParams::bell()).expect("bell");
    let prod = casebook::preserve4_bell_bound(&BellFamilyParams::product()).expect("product");
    let dev = |v: &[f64], w: [f64; 4]| v.iter().zip(w).map(|(x, y)| (x - y).abs()).fold(0.0f64, f64::max);
    let bell_dev = dev(&bell.rhs, [0.25; 4]).max((bell.cost - 2.0).abs()).max((shannon_entropy(&bell.rhs) - 2.0).abs());
    let prod_dev = dev(&prod.rhs, [1.0, 0.0, 0.0, 0.0]).max(prod.cost.abs());
    let bell_limits = outcome(bell_dev <= 1e-12 && prod_dev <= 1e-12, format!("Bell limit deviation {bell_dev:.3e}, product limit deviation {prod_dev:.3e}"));

    vec![
        ("9a preserve2 alpha^2 bound".into(), preserve2_alpha),
        ("9b preserve2 probabilities force det rho_A to zero".into(), preserve2_det),
        ("9c preserve2 concurrence equals geometric mean".into(), preserve2_conc),
        ("9d preserve4 product bound matches grid search".into(), product),
        ("9e preserve4 Bell vector limits".into(), bell_limits),
    ]
}

fn figure1_regeneration() -> Outcome {
    let tol = 1e-9;
    let rows = casebook::figure1_scan(50).expect("scan");
    let text = figure1_csv(&rows).expect("csv");
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header_ok = reader.headers().map(|h| h.iter().collect::<Vec<_>>() == ["a2", "c2", "avg_entanglement", "cost"]).unwrap_or(false);
    let parsed: Vec<[f64; 4]> = reader
        .records()
        .map(|rec| {
            let rec = rec.expect("record");
            [0, 1, 2, 3].map(|i| rec[i].parse::<f64>().expect("number"))
        })
        .collect();
    let near = |avg: f64, cost: f64| parsed.iter().any(|r| (r[2] - avg).abs() <= tol && (r[3] - cost).abs() <= tol);
    let endpoints = near(0.0, 0.0) && near(1.0, 2.0);
    let below = parsed.iter().filter(|r| r[3] < r[2] - tol).count();
    let mut diagonal: Vec<[f64; 4]> = parsed.iter().filter(|r| r[0] == r[1]).copied().collect();
    diagonal.sort_by(|x, y| x[2].total_cmp(&y[2]));
    let non_monotone = diagonal.windows(2).filter(|w| w[1][3] < w[0][3] - tol).count();
    outcome(
        header_ok && parsed.len() == 2500 && endpoints && below == 0 && non_monotone == 0,
        format!(
            "{} rows, endpoints present: {endpoints}, rows with cost < average: {below}, diagonal monotonicity breaks: {non_monotone} over {} points",
            parsed.len(),
            diagonal.len()
        ),
    )
}

fn random_kraus(r: &mut impl Rng, dim: usize, outcomes: usize) -> Measurement {
    let u = random_unitary(r, dim * outcomes);
    let ops = (0..outcomes).map(|m| u.submatrix(m * dim, 0, dim, dim)).collect();
    Measurement::unlabeled(ops).expect("complete")
}

fn density_validation() -> Outcome {
    let mut r = rng(11);
    let (mut caught, mut total) = (0, 0);
    for _ in 0..100 {
        let rho = random_density(&mut r, 3);
        let mut non_hermitian = rho.clone();
        non_hermitian[(0, 1)] += c(0.05, 0.02);
        let u = random_unitary(&mut r, 3);
        let negative = &(&u * &ComplexMatrix::from_diag(&[1.1, 0.0, -0.1])) * &u.adjoint();
        let wrong_trace = rho.scale_real(1.05);
        for bad in [non_hermitian, negative.hermitian_part(), wrong_trace] {
            total += 1;
            if validate_density(&bad).is_err() {
                caught += 1;
            }
        }
    }
    outcome(caught == total, format!("{caught} of {total} injected violations rejected"))
}

fn probability_consistency() -> Outcome {
    let tol = 1e-10;
    let mut r = rng(12);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let dim = r.gen_range(2..=4);
        let outcomes = r.gen_range(2..=4);
        let m = random_kraus(&mut r, dim, outcomes);
        let n = r.gen_range(2..=4);
        let probs = random_probability_vector(&mut r, n);
        let items: Vec<(f64, State)> =
            probs.iter().map(|&p| (p, State::from(validate_density(&random_density(&mut r, dim)).expect("density")))).collect();
        let e = Ensemble::new(items).expect("ensemble");
        let mix = density_from_ensemble(&e).expect("mixture");
        let likelihoods: Vec<Vec<f64>> = e.items().iter().map(|(_, s)| outcome_probabilities(&m, &s.density()).expect("probabilities")).collect();
        let marginal = outcome_probabilities(&m, &mix).expect("probabilities");
        worst = worst.max((marginal.iter().sum::<f64>() - 1.0).abs());
        for (k, label) in m.labels().iter().enumerate() {
            let total: f64 = e.items().iter().zip(&likelihoods).map(|((p, _), l)| p * l[k]).sum();
            worst = worst.max((total - marginal[k]).abs());
            let post = bayes_posterior(&e, &m, label).expect("posterior");
            for ((p, _), ((q, _), l)) in e.items().iter().zip(post.items().iter().zip(&likelihoods)) {
                worst = worst.max((q - p * l[k] / total).abs());
            }
            // Mixing the posterior states with posterior weights gives the posterior of the mixture.
            let mixed_post = posterior_state(&m, &mix, label).expect("posterior");
            let recombined = e.items().iter().zip(post.items()).fold(ComplexMatrix::zeros(dim, dim), |acc, ((_, s), (q, _))| {
                let ps = posterior_state(&m, &s.density(), label).expect("posterior");
                &acc + &ps.matrix().scale_real(*q)
            });
            worst = worst.max(recombined.max_abs_diff(mixed_post.matrix()));
        }
    }
    outcome(worst <= tol, format!("max deviation {worst:.3e} over 100 measurement/ensemble pairs, tol {tol:e}"))
}

fn schur_concavity() -> Outcome {
    let mut r = rng(13);
    let (mut violations, mut not_recognized) = (0, 0);
    for _ in 0..500 {
        let n = r.gen_range(2..=6);
        let y = random_probability_vector(&mut r, n);
        let mut x = y.clone();
        for _ in 0..3 {
            let i = r.gen_range(0..n);
            let j = (i + r.gen_range(1..n)) % n;
            let t: f64 = r.gen();
            let (xi, xj) = (x[i], x[j]);
            x[i] = t * xi + (1.0 - t) * xj;
            x[j] = (1.0 - t) * xi + t * xj;
        }
        if !majorize::majorizes(&x, &y).left_is_majorized() {
            not_recognized += 1;
        }
        if shannon_entropy(&x) < shannon_entropy(&y) - 1e-12 {
            violations += 1;
        }
    }
    outcome(violations == 0 && not_recognized == 0, format!("{violations} entropy violations, {not_recognized} pairs not recognized as majorized, 500 pairs"))
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(String, Outcome)> = vec![
        ("1 Helstrom closed form, operator value and search agree".into(), helstrom_oracles()),
        ("2 UQSD regime selection and failure probability".into(), uqsd_regimes()),
        ("3 equi-diagonalization of traceless matrices".into(), equidiagonalization()),
        ("4 LOCC discrimination of orthogonal two-qubit pairs".into(), walgate_end_to_end()),
        ("5 two-qubit conversion protocol".into(), nielsen_grid()),
        ("6 majorization transform measurement".into(), transform_measurements()),
        ("7a four-state log-negativity closed form".into(), ghosh_closed_form()),
        ("7b three-state region X > 3/4 matches E_N >= 1".into(), ghosh_region()),
        ("8 indistinguishability spectrum and corner verdicts".into(), maj4_analytic()),
    ];
    results.extend(preservation_bounds());
    results.push(("10 cost versus average entanglement CSV".into(), figure1_regeneration()));
    results.push(("11a density validation catches violations".into(), density_validation()));
    results.push(("11b total probability and Bayes consistency".into(), probability_consistency()));
    results.push(("11c Schur concavity of entropy".into(), schur_concavity()));

    let mut failed = 0;
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!("{} passed, {failed} failed in {:.1}s", results.len() - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
