//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line
//! (written straight to stdout so it survives test output capture).
//!
//! Criterion 2 asks for equality on a region where the extremal channel
//! provably falls short of the bound; it is evaluated as stated, reported
//! as FAIL with the size of the shortfall, and only its provable subset is
//! asserted.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::Rng;

use hsdp_cli::figures::{compare_rows, grid, revpinsker_table, RevPinskerSpec};
use hsdp_core::bounds::{
    g_n, hitting_params, mixing_time_linear, mixing_time_nonlinear, tightness_check, MixingTime,
};
use hsdp_core::contraction::{eta_classical_exact, eta_quantum_lower, EstimatorBudget, Verdict};
use hsdp_core::divergence::{f_divergence, hs_classical, hs_divergence, FGenerator, QUAD_TOL};
use hsdp_core::matrix::HermitianOperator;
use hsdp_core::privacy::{
    compose_heterogeneous, compose_homogeneous, eps_from_zeta, purify_delta, qldp_check, zeta_eps,
};
use hsdp_core::random::{haar_unitary, random_classical_channel, random_density, random_distribution, random_pure, trial_rng};
use hsdp_core::verify::{pair_with_divergence, sdpi_suite, VerifyConfig, TIGHTNESS_PAIRS};
use hsdp_core::channel::apply_repeated;
use hsdp_core::{depolarizing, DensityOperator, QuantumChannel};

struct Outcome {
    passed: bool,
    /// What this test asserts; equal to `passed` except for criterion 2.
    must_hold: bool,
    detail: String,
}

impl Outcome {
    fn plain(passed: bool, detail: String) -> Self {
        Outcome { passed, must_hold: passed, detail }
    }
}

fn line(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
    let _ = out.flush();
}

/// Runs one criterion, enforcing its time limit, and prints the verdict.
fn criterion(n: u32, title: &str, limit: Option<Duration>, body: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = body();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            o.passed = false;
            o.must_hold = false;
            o.detail.push_str(&format!("; exceeded {limit:?}"));
        }
    }
    let verdict = if o.passed { "PASS" } else { "FAIL" };
    line(&format!("criterion {n} [{verdict}] {title}: {} ({:.3} s)", o.detail, elapsed.as_secs_f64()));
    o
}

fn commuting_pair(d: usize, rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>, DensityOperator, DensityOperator) {
    let p = random_distribution(d, rng);
    let q = random_distribution(d, rng);
    let u = haar_unitary(d, rng);
    let rotate = |v: &[f64]| DensityOperator::new(u.sandwich(HermitianOperator::diag(v).matrix()).hermitian_part()).unwrap();
    let (rho, sigma) = (rotate(&p), rotate(&q));
    (p, q, rho, sigma)
}

fn mixed_pair_state(d: usize, rng: &mut impl Rng) -> DensityOperator {
    if rng.random_bool(0.5) {
        random_pure(d, rng).density()
    } else {
        random_density(d, rng)
    }
}

fn c1_figure_compare() -> Outcome {
    let ts = grid(0.0, 1.0, 201).unwrap();
    let rows = compare_rows(6.0, 2.5, 0.01, &ts).unwrap();
    let ordered = rows.iter().all(|r| r.nonlinear <= r.linear + 1e-12 && r.linear <= r.dpi + 1e-12);
    let end = rows.last().unwrap();
    let end_ok = (end.linear - 0.505).abs() <= 1e-12 && (end.nonlinear - 0.505).abs() <= 1e-12;
    let kink = rows.iter().find(|r| r.t == 0.3).unwrap();
    let kink_ok = (kink.nonlinear - 0.003).abs() <= 1e-12;
    Outcome::plain(
        ordered && end_ok && kink_ok,
        format!(
            "ordered on 201 points = {ordered}, t=1 -> ({}, {}), t=0.3 -> {}",
            end.linear, end.nonlinear, kink.nonlinear
        ),
    )
}

fn c2_tightness() -> Outcome {
    const TOL: f64 = 1e-9;
    let mut total = 0usize;
    let mut failures = 0usize;
    let mut provable = 0usize;
    let mut provable_failures = 0usize;
    let mut worst = (0.0f64, 0.0, 0.0, 0.0, 0.0);
    for (k, &(gamma, gamma_prime)) in TIGHTNESS_PAIRS.iter().enumerate() {
        let mut rng = trial_rng(2, k as u64);
        let lo = (gamma_prime - 1.0) / (gamma + 1.0);
        let mut cells: Vec<(f64, f64)> = grid(0.0, 1.0, 20).unwrap().into_iter().map(|t| (0.0, t)).collect();
        for delta in (1..=20).map(|j| j as f64 / 20.0) {
            cells.extend(grid(lo, 1.0, 20).unwrap().into_iter().map(|t| (delta, t)));
        }
        for (delta, t) in cells {
            let u = haar_unitary(2, &mut rng);
            let (rho, sigma) = pair_with_divergence(gamma_prime, t, &u).unwrap();
            let r = tightness_check(gamma, gamma_prime, delta, &rho, &sigma, TOL).unwrap();
            total += 1;
            if !r.passed {
                failures += 1;
                if r.gap.abs() > worst.0 {
                    worst = (r.gap.abs(), gamma, gamma_prime, delta, t);
                }
            }
            if r.equality_expected {
                provable += 1;
                if !r.passed {
                    provable_failures += 1;
                }
            }
        }
    }
    let (gap, g, gp, d, t) = worst;
    Outcome {
        passed: failures == 0,
        must_hold: provable > 0 && provable_failures == 0,
        detail: format!(
            "{failures}/{total} grid points with gap > 1e-9 (largest {gap:.4} at gamma={g}, gamma'={gp}, delta={d}, t={t:.4}); \
             extremal channel value is ((gamma-1+2 delta) t - (1-delta)(gamma'-1))_+/(gamma+1), equal to the bound only for \
             delta in {{0,1}} or t >= (gamma'-1)/(gamma-1); {provable_failures}/{provable} failures on that provable subset"
        ),
    }
}

fn c3_figure_mixing() -> Outcome {
    let nl0 = mixing_time_nonlinear(8.0, 3.0, 0.0).unwrap();
    let nl_small = mixing_time_nonlinear(8.0, 3.0, 1e-9).unwrap();
    let lin01 = mixing_time_linear(8.0, 3.0, 0.0, 0.1).unwrap();
    let lin0 = mixing_time_linear(8.0, 3.0, 0.0, 0.0).unwrap();
    let lin_small = mixing_time_linear(8.0, 3.0, 0.0, 1e-9).unwrap().steps().unwrap_or(u64::MAX);
    let passed = nl0 == 3 && nl_small == 3 && lin01 == MixingTime::Steps(4) && lin0 == MixingTime::Unbounded && lin_small > 3;
    Outcome::plain(
        passed,
        format!("nonlinear(0) = {nl0}, nonlinear(1e-9) = {nl_small}, linear(0.1) = {lin01:?}, linear(0) = {lin0:?}, linear(1e-9) = {lin_small}"),
    )
}

fn c4_figure_revpinsker() -> Outcome {
    let mut points = 0usize;
    let mut violations = 0usize;
    let mut not_strict = 0usize;
    for spec in [RevPinskerSpec::epsilon_default(), RevPinskerSpec::lambda_default()] {
        let (a, b) = spec.default_range();
        let table = revpinsker_table(&spec, &grid(a, b, 50).unwrap()).unwrap();
        for row in &table.rows {
            for pair in row[1..].chunks(2) {
                points += 1;
                if pair[0] > pair[1] {
                    violations += 1;
                }
                // every family of both panels has δ > 0
                if pair[0] >= pair[1] {
                    not_strict += 1;
                }
            }
        }
    }
    Outcome::plain(
        points == 300 && violations == 0 && not_strict == 0,
        format!("{points} points, {violations} with ours > prior, {not_strict} not strict"),
    )
}

fn c5_sdpi_soundness() -> Outcome {
    let cfg = VerifyConfig { trials: 500, ..VerifyConfig::default() };
    let rep = sdpi_suite(&cfg).unwrap();
    let certified = rep.checks / 2;
    Outcome::plain(
        certified >= 500 && rep.failures == 0,
        format!(
            "{certified} certified instances ({} draws skipped), {} violations, worst excess {:.3e}",
            rep.skipped, rep.failures, rep.worst_excess
        ),
    )
}

fn c6_oracles() -> Outcome {
    let mut hs_err = 0.0f64;
    for i in 0..1000u64 {
        let mut rng = trial_rng(6, i);
        let d = rng.random_range(2..=5);
        let (p, q, rho, sigma) = commuting_pair(d, &mut rng);
        let gamma = if i % 10 == 0 { 1.0 } else { 1.0 + 5.0 * rng.random::<f64>() };
        let diff = (hs_divergence(&rho, &sigma, gamma).unwrap() - hs_classical(&p, &q, gamma).unwrap()).abs();
        hs_err = hs_err.max(diff);
    }
    let kl_tol = QUAD_TOL.max(1e-7);
    let kl = FGenerator::kl();
    let mut kl_err = 0.0f64;
    for i in 0..200u64 {
        let mut rng = trial_rng(6, 10_000 + i);
        let d = rng.random_range(2..=4);
        let (p, q, rho, sigma) = commuting_pair(d, &mut rng);
        let exact: f64 = p.iter().zip(&q).filter(|(a, _)| **a > 0.0).map(|(a, b)| a * (a / b).ln()).sum();
        let diff = (f_divergence(&rho, &sigma, &kl, QUAD_TOL).unwrap() - exact).abs();
        kl_err = kl_err.max(diff);
    }
    let mut eta_err = 0.0f64;
    for i in 0..100u64 {
        let mut rng = trial_rng(6, 20_000 + i);
        let (nx, ny) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let w = random_classical_channel(nx, ny, 0.2, &mut rng);
        let gamma = 1.0 + 4.0 * rng.random::<f64>();
        let exact = eta_classical_exact(&w, gamma).unwrap();
        let budget = EstimatorBudget { restarts: 64, seed: i, ..EstimatorBudget::default() };
        let lower = eta_quantum_lower(&QuantumChannel::from_classical(&w), gamma, budget).unwrap().lower_bound;
        eta_err = eta_err.max((exact - lower).abs());
    }
    Outcome::plain(
        hs_err <= 1e-12 && kl_err <= kl_tol && eta_err <= 1e-6,
        format!("max |hs - classical| = {hs_err:.2e}, max |kl - classical| = {kl_err:.2e}, max |eta_lower - eta_exact| = {eta_err:.2e}"),
    )
}

fn c7_identities() -> Outcome {
    let mut semigroup = 0.0f64;
    let mut offset = 0.0f64;
    for i in 0..10u64 {
        let mut rng = trial_rng(7, i);
        let gamma = rng.random_range(1.5..10.0);
        let gamma_prime = 1.0 + (gamma - 1.0) * rng.random_range(0.01..0.99);
        let delta = rng.random_range(0.01..0.99);
        let hp = hitting_params(gamma, gamma_prime, delta).unwrap();
        offset = offset.max((hp.offset() - 0.5 * (gamma_prime - 1.0)).abs());
        for t in grid(0.0, 1.0, 101).unwrap() {
            for m in 1..=20u64 {
                let lhs = g_n(&hp, g_n(&hp, t, m).unwrap(), 1).unwrap();
                let rhs = g_n(&hp, t, m + 1).unwrap();
                semigroup = semigroup.max((lhs - rhs).abs());
            }
        }
    }
    let zeta = grid(0.0, 10.0, 1001)
        .unwrap()
        .into_iter()
        .map(|e| (eps_from_zeta(zeta_eps(e)) - e).abs())
        .fold(0.0, f64::max);
    let single = [0.0, 0.1, 1.0, 2.5, 7.0]
        .iter()
        .map(|&e| (compose_heterogeneous(&[e]).unwrap().epsilon_out - e).abs())
        .fold(0.0, f64::max);
    Outcome::plain(
        semigroup <= 1e-10 && offset <= 1e-12 && zeta <= 1e-12 && single <= 1e-12,
        format!("semigroup {semigroup:.1e}, b/(1-a) {offset:.1e}, zeta inversion {zeta:.1e}, single composition {single:.1e}"),
    )
}

fn c8_privacy() -> Outcome {
    let n_ch = depolarizing(2, 0.5).unwrap();
    let eps = 3f64.ln();
    let cert = qldp_check(&n_ch, eps, 0.0, EstimatorBudget::default()).unwrap();
    let certified = cert.verdict == Verdict::CertifiedIn;
    let mut compose_excess = f64::NEG_INFINITY;
    for (k, &eps_prime) in [0.2, 0.5, 0.8].iter().enumerate() {
        for n in 1..=5u32 {
            let allowed = compose_homogeneous(eps, n, eps_prime).unwrap().delta_out;
            for i in 0..100u64 {
                let mut rng = trial_rng(8, (k as u64 * 10 + n as u64) * 1000 + i);
                let (rho, sigma) = (mixed_pair_state(2, &mut rng), mixed_pair_state(2, &mut rng));
                let out_r = apply_repeated(&n_ch, &rho, n as usize).unwrap();
                let out_s = apply_repeated(&n_ch, &sigma, n as usize).unwrap();
                let measured = hs_divergence(&out_r, &out_s, eps_prime.exp()).unwrap();
                compose_excess = compose_excess.max(measured - allowed);
            }
        }
    }
    // The same channel is (ln 2, 1/4)-QLDP; its fixed point is I/2.
    let (eps_d, delta_d, eps_prime) = (2f64.ln(), 0.25, 0.3);
    let cert_d = qldp_check(&n_ch, eps_d, delta_d, EstimatorBudget::default()).unwrap();
    let steps = purify_delta(eps_d, delta_d, eps_prime, 0.5).unwrap();
    let mut purified = 0.0f64;
    for i in 0..100u64 {
        let mut rng = trial_rng(8, 900_000 + i);
        let (rho, sigma) = (mixed_pair_state(2, &mut rng), mixed_pair_state(2, &mut rng));
        let out_r = apply_repeated(&n_ch, &rho, steps as usize).unwrap();
        let out_s = apply_repeated(&n_ch, &sigma, steps as usize).unwrap();
        purified = purified.max(hs_divergence(&out_r, &out_s, eps_prime.exp()).unwrap());
    }
    let passed = certified && cert_d.verdict == Verdict::CertifiedIn && compose_excess <= 1e-8 && purified <= 1e-8;
    Outcome::plain(
        passed,
        format!(
            "(ln 3, 0) certified = {certified}, worst measured - delta' = {compose_excess:.3e} over 1500 runs, \
             purification n = {steps} gives max E = {purified:.1e}"
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let secs = Duration::from_secs_f64;
    let outcomes = [
        criterion(1, "figure 1 curves", Some(secs(1.0)), c1_figure_compare),
        criterion(2, "tightness of the non-linear SDPI", Some(secs(5.0)), c2_tightness),
        criterion(3, "figure 2 mixing times", Some(secs(0.1)), c3_figure_mixing),
        criterion(4, "figure 3 dominance", Some(secs(1.0)), c4_figure_revpinsker),
        criterion(5, "empirical SDPI soundness", Some(secs(60.0)), c5_sdpi_soundness),
        criterion(6, "oracle equivalence", None, c6_oracles),
        criterion(7, "machinery identities", None, c7_identities),
        criterion(8, "privacy soundness", Some(secs(30.0)), c8_privacy),
    ];
    let passed = outcomes.iter().filter(|o| o.passed).count();
    line(&format!("acceptance: {passed}/{} criteria pass", outcomes.len()));
    for (i, o) in outcomes.iter().enumerate() {
        assert!(o.must_hold, "criterion {} failed: {}", i + 1, o.detail);
    }
}
