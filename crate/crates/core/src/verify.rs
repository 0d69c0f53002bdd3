//! Seeded randomized property suites.
//!
//! Each suite draws its instances from [`trial_rng`] streams, checks one
//! inequality or identity per instance and keeps the first counterexample
//! it meets, serialized as JSON so that it can be replayed.

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{f_gamma_hetero, f_gamma_homog, g_n, hitting_params, linear_sdpi, nonlinear_sdpi, tightness_check, SdpiParams};
use crate::channel::{apply_repeated, compose, depolarizing, QuantumChannel};
use crate::contraction::{containment_check, eta_upper_gamma_doeblin, EstimatorBudget, Verdict};
use crate::divergence::{hs_divergence, trace_distance};
use crate::error::Result;
use crate::matrix::{ComplexMatrix, HermitianOperator};
use crate::privacy::{compose_homogeneous, purify_delta, qldp_check};
use crate::random::{haar_unitary, random_channel, random_density_rank, trial_rng};
use crate::state::DensityOperator;

/// Slack allowed on every inequality between a measured divergence and a bound.
pub const BOUND_SLACK: f64 = 1e-8;
/// Tolerance of the tightness identity.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Tolerance of the semigroup identity.
pub const SEMIGROUP_TOL: f64 = 1e-10;

/// Deliberate defects used to check that the harness notices failures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    #[default]
    None,
    /// Halve the non-linear SDPI bound before comparing.
    HalveSdpiBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Instances per suite.
    pub trials: usize,
    /// Estimator budget for the containment checks inside the suites.
    pub budget: EstimatorBudget,
    pub fault: Fault,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 0, trials: 500, budget: EstimatorBudget { restarts: 4, iters: 40, seed: 0 }, fault: Fault::None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    /// Number of inequalities or identities evaluated.
    pub checks: usize,
    pub failures: usize,
    /// Instances drawn but discarded (e.g. not certified in the channel class).
    pub skipped: usize,
    /// Largest violation seen, `measured − allowed`.
    pub worst_excess: f64,
    pub counterexample: Option<Value>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport { name: name.into(), checks: 0, failures: 0, skipped: 0, worst_excess: f64::NEG_INFINITY, counterexample: None }
    }

    /// Records `value ≤ allowed`; `detail` is only built for the first failure.
    fn check(&mut self, value: f64, allowed: f64, detail: impl FnOnce() -> Value) {
        self.checks += 1;
        let excess = value - allowed;
        if excess > self.worst_excess {
            self.worst_excess = excess;
        }
        if !(excess <= 0.0) {
            self.failures += 1;
            if self.counterexample.is_none() {
                let mut d = detail();
                d["measured"] = json!(value);
                d["allowed"] = json!(allowed);
                self.counterexample = Some(d);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }

    pub fn total_checks(&self) -> usize {
        self.suites.iter().map(|s| s.checks).sum()
    }
}

/// Runs every suite in a fixed order.
pub fn run_all(cfg: &VerifyConfig) -> Result<VerifyReport> {
    Ok(VerifyReport {
        seed: cfg.seed,
        trials: cfg.trials,
        suites: vec![
            dpi_suite(cfg)?,
            sdpi_suite(cfg)?,
            tightness_suite(cfg)?,
            semigroup_suite(cfg)?,
            privacy_suite(cfg)?,
        ],
    })
}

// Distinct stream families per suite so suites do not share instances.
const DPI_SALT: u64 = 0x0100_0000;
const SDPI_SALT: u64 = 0x0200_0000;
const TIGHT_SALT: u64 = 0x0300_0000;
const SEMI_SALT: u64 = 0x0400_0000;
const PRIV_SALT: u64 = 0x0500_0000;

fn pair_state(rng: &mut impl Rng, d: usize) -> DensityOperator {
    // mix full-rank and low-rank inputs so boundary cases are exercised
    let rank = if rng.random_bool(0.3) { 1 } else { rng.random_range(1..=d) };
    random_density_rank(d, rank, rng)
}

/// Plain data processing: `E_γ(N(ρ)‖N(σ)) ≤ E_γ(ρ‖σ)` and the same for
/// trace distance.
pub fn dpi_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("dpi");
    for i in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, DPI_SALT + i as u64);
        let (d_in, d_out): (usize, usize) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let env = rng.random_range(1..=3).max(d_in.div_ceil(d_out));
        let n = random_channel(d_in, d_out, env, &mut rng);
        let (rho, sigma) = (pair_state(&mut rng, d_in), pair_state(&mut rng, d_in));
        let gamma = 1.0 + 4.0 * rng.random::<f64>();
        let (nr, ns) = (n.apply(&rho)?, n.apply(&sigma)?);
        let input = hs_divergence(&rho, &sigma, gamma)?;
        let output = hs_divergence(&nr, &ns, gamma)?;
        rep.check(output, input + BOUND_SLACK, || json!({"gamma": gamma, "channel": n, "rho": rho, "sigma": sigma}));
        let (ti, to) = (trace_distance(&rho, &sigma)?, trace_distance(&nr, &ns)?);
        rep.check(to, ti + BOUND_SLACK, || json!({"gamma": 1.0, "channel": n, "rho": rho, "sigma": sigma}));
    }
    Ok(rep)
}

/// One random instance of the SDPI soundness suite.
#[derive(Clone, Debug)]
pub struct SdpiInstance {
    pub channel: QuantumChannel,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub delta: f64,
    pub rho: DensityOperator,
    pub sigma: DensityOperator,
}

/// Draws a channel `N = D_p ∘ R` (random `R`, depolarizing `D_p`) together
/// with `γ`, the `δ` given by the γ-dependent Doeblin bound plus a little
/// slack, `γ'` and an input pair.
pub fn sdpi_instance(seed: u64, index: u64) -> Result<SdpiInstance> {
    let mut rng = trial_rng(seed, SDPI_SALT + index);
    let (d_in, d_out): (usize, usize) = (rng.random_range(2..=4), rng.random_range(2..=4));
    let env = rng.random_range(1..=2).max(d_in.div_ceil(d_out));
    let r = random_channel(d_in, d_out, env, &mut rng);
    let p = rng.random_range(0.2..1.0);
    let channel = compose(&depolarizing(d_out, p)?, &r)?;
    let gamma = 1.0 + 5.0 * rng.random::<f64>();
    let slack = if rng.random_bool(0.5) { 0.0 } else { 0.05 * rng.random::<f64>() };
    let delta = (eta_upper_gamma_doeblin(&channel, gamma)? + slack).min(1.0);
    let gamma_prime = 1.0 + (gamma + 1.0) * rng.random::<f64>();
    let (rho, sigma) = if rng.random_bool(0.3) {
        // orthogonal pure pair, where the input divergence is 1
        let u = haar_unitary(d_in, &mut rng);
        let state = |k: usize| {
            let v = u.column(k);
            DensityOperator::new(ComplexMatrix::outer(&v, &v).hermitian_part())
        };
        (state(0)?, state(1)?)
    } else {
        (pair_state(&mut rng, d_in), pair_state(&mut rng, d_in))
    };
    Ok(SdpiInstance { channel, gamma, gamma_prime, delta, rho, sigma })
}

/// For channels certified in `B^{γ,δ}`:
/// `E_{γ'}(N(ρ)‖N(σ)) ≤ nonlinear_sdpi(t) ≤ linear_sdpi · t`.
pub fn sdpi_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("sdpi_soundness");
    let mut index = 0u64;
    let mut certified = 0usize;
    // Draw until `trials` certified instances, with a hard cap on attempts.
    while certified < cfg.trials && index < 4 * cfg.trials as u64 + 16 {
        let inst = sdpi_instance(cfg.seed, index)?;
        index += 1;
        let budget = EstimatorBudget { seed: cfg.budget.seed ^ index, ..cfg.budget };
        let cert = containment_check(&inst.channel, inst.gamma, inst.delta, budget)?;
        if cert.verdict != Verdict::CertifiedIn {
            rep.skipped += 1;
            continue;
        }
        certified += 1;
        let SdpiInstance { channel, gamma, gamma_prime, delta, rho, sigma } = &inst;
        let t = hs_divergence(rho, sigma, *gamma_prime)?.min(1.0);
        let output = hs_divergence(&channel.apply(rho)?, &channel.apply(sigma)?, *gamma_prime)?;
        let mut bound = nonlinear_sdpi(SdpiParams { gamma: *gamma, gamma_prime: *gamma_prime, delta: *delta, t })?;
        if cfg.fault == Fault::HalveSdpiBound {
            bound *= 0.5;
        }
        let linear = linear_sdpi(*gamma, *gamma_prime, *delta)? * t;
        let detail = || {
            json!({
                "index": index - 1, "gamma": gamma, "gamma_prime": gamma_prime, "delta": delta, "t": t,
                "certificate": cert, "channel": channel, "rho": rho, "sigma": sigma,
            })
        };
        rep.check(output, bound + BOUND_SLACK, detail);
        rep.check(bound, linear + BOUND_SLACK, detail);
    }
    Ok(rep)
}

/// `(γ, γ')` pairs of the tightness grid.
pub const TIGHTNESS_PAIRS: [(f64, f64); 3] = [(4.0, 2.0), (6.0, 2.5), (10.0, 1.5)];

/// Qubit or qutrit pair with `E_{γ'}(ρ‖σ) = t`, rotated by `u`:
/// `ρ = |0⟩⟨0|`, `σ = diag(s, 1 − s, 0…)` with `s = (1 − t)/γ'`.
pub fn pair_with_divergence(gamma_prime: f64, t: f64, u: &ComplexMatrix) -> Result<(DensityOperator, DensityOperator)> {
    let d = u.rows();
    let s = (1.0 - t) / gamma_prime;
    let mut p = vec![0.0; d];
    p[0] = 1.0;
    let mut q = vec![0.0; d];
    q[0] = s;
    q[1] = 1.0 - s;
    let rotate = |v: &[f64]| {
        let m = HermitianOperator::diag(v);
        DensityOperator::new(u.sandwich(m.matrix()).hermitian_part())
    };
    Ok((rotate(&p)?, rotate(&q)?))
}

/// The extremal channel meets the non-linear SDPI with equality wherever
/// equality is provable: `δ ∈ {0, 1}`, or `t ≥ (γ' − 1)/(γ − 1)`.
pub fn tightness_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("tightness");
    for i in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, TIGHT_SALT + i as u64);
        let (gamma, gamma_prime) = TIGHTNESS_PAIRS[i % TIGHTNESS_PAIRS.len()];
        let delta = [0.0, 0.25, 0.5, 0.75, 1.0][(i / TIGHTNESS_PAIRS.len()) % 5];
        let t_star = (gamma_prime - 1.0) / (gamma - 1.0);
        let lo = if delta > 0.0 && delta < 1.0 { t_star } else { 0.0 };
        let t = lo + (1.0 - lo) * rng.random::<f64>();
        let u = haar_unitary(rng.random_range(2..=3), &mut rng);
        let (rho, sigma) = pair_with_divergence(gamma_prime, t, &u)?;
        let r = tightness_check(gamma, gamma_prime, delta, &rho, &sigma, IDENTITY_TOL)?;
        rep.check(r.gap.abs(), IDENTITY_TOL, || json!({"report": r, "rho": rho, "sigma": sigma}));
    }
    Ok(rep)
}

/// `G_1(G_m(t)) = G_{m+1}(t)` for `m ≤ 20` on a 101-point grid, and the
/// homogeneous `F_γ` bound equal to the heterogeneous one with equal entries.
pub fn semigroup_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("composition_semigroup");
    for i in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, SEMI_SALT + i as u64);
        let gamma = rng.random_range(1.5..10.0);
        let gamma_prime = rng.random_range(1.0..gamma);
        let gamma_prime = if gamma_prime <= 1.0 { 1.0 + 1e-3 } else { gamma_prime };
        let delta = rng.random_range(0.001..0.999);
        let hp = hitting_params(gamma, gamma_prime, delta)?;
        rep.check((hp.offset() - 0.5 * (gamma_prime - 1.0)).abs(), 1e-12, || json!({"params": hp}));
        for k in 0..=100 {
            let t = k as f64 / 100.0;
            for m in 1..=20u64 {
                let lhs = g_n(&hp, g_n(&hp, t, m)?.clamp(0.0, 1.0), 1)?;
                let rhs = g_n(&hp, t, m + 1)?;
                rep.check((lhs - rhs).abs(), SEMIGROUP_TOL, || json!({"params": hp, "t": t, "m": m}));
            }
        }
        let n = rng.random_range(1..=6u32);
        let t = rng.random::<f64>();
        let homog = f_gamma_homog(gamma, n, gamma_prime, t)?;
        let hetero = f_gamma_hetero(&vec![gamma; n as usize], gamma_prime, t)?;
        rep.check((homog - hetero).abs(), 0.0, || json!({"gamma": gamma, "gamma_prime": gamma_prime, "n": n, "t": t}));
    }
    Ok(rep)
}

/// Depolarizing channel at the boundary of `(ε, δ)`-QLDP, slightly inside.
fn boundary_depolarizing(d: usize, eps: f64, delta: f64, inflate: f64) -> Result<QuantumChannel> {
    let p = (d as f64 * (1.0 - delta) / (eps.exp() - 1.0 + d as f64) * (1.0 + inflate)).min(1.0);
    depolarizing(d, p)
}

/// Empirical privacy accounting on depolarizing channels:
/// `n`-fold `(ε, 0)` channels stay within the homogeneous composition `δ'`,
/// and purification by [`purify_delta`] reaches `E_{e^{ε'}} = 0`.
pub fn privacy_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("privacy_soundness");
    for i in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, PRIV_SALT + i as u64);
        let d = rng.random_range(2..=3);
        let eps = rng.random_range(0.3..2.5);
        let purify = i % 2 == 1;
        let delta = if purify { rng.random_range(0.05..0.5) } else { 0.0 };
        let n_ch = boundary_depolarizing(d, eps, delta, 0.1 * rng.random::<f64>())?;
        let cert = qldp_check(&n_ch, eps, delta, EstimatorBudget { seed: i as u64, ..cfg.budget })?;
        if cert.verdict != Verdict::CertifiedIn {
            rep.skipped += 1;
            continue;
        }
        let eps_prime = eps * rng.random_range(0.05..0.95);
        let (steps, allowed) = if purify {
            // fixed point I/d
            (purify_delta(eps, delta, eps_prime, 1.0 / d as f64)?, 0.0)
        } else {
            let n = rng.random_range(1..=5u32);
            (n as u64, compose_homogeneous(eps, n, eps_prime)?.delta_out)
        };
        let (rho, sigma) = (pair_state(&mut rng, d), pair_state(&mut rng, d));
        let out_r = apply_repeated(&n_ch, &rho, steps as usize)?;
        let out_s = apply_repeated(&n_ch, &sigma, steps as usize)?;
        let measured = hs_divergence(&out_r, &out_s, eps_prime.exp())?;
        rep.check(measured, allowed + BOUND_SLACK, || {
            json!({"eps": eps, "delta": delta, "eps_prime": eps_prime, "steps": steps, "purify": purify,
                   "channel": n_ch, "rho": rho, "sigma": sigma})
        });
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(trials: usize) -> VerifyConfig {
        VerifyConfig { trials, ..VerifyConfig::default() }
    }

    #[test]
    fn suites_pass_on_small_runs() {
        let report = run_all(&quick(12)).unwrap();
        for s in &report.suites {
            assert!(s.passed(), "{}: {:?}", s.name, s.counterexample);
            assert!(s.checks > 0, "{} ran no checks", s.name);
        }
    }

    #[test]
    fn zero_trials_run_no_checks() {
        let report = run_all(&quick(0)).unwrap();
        assert_eq!(report.total_checks(), 0);
        assert!(report.passed());
    }

    #[test]
    fn injected_fault_is_caught() {
        let cfg = VerifyConfig { fault: Fault::HalveSdpiBound, ..quick(30) };
        let rep = sdpi_suite(&cfg).unwrap();
        assert!(!rep.passed());
        let ce = rep.counterexample.unwrap();
        assert!(ce.get("channel").is_some() && ce.get("rho").is_some());
    }

    #[test]
    fn pair_with_divergence_hits_target() {
        let mut rng = trial_rng(3, 0);
        let u = haar_unitary(3, &mut rng);
        let (rho, sigma) = pair_with_divergence(2.5, 0.37, &u).unwrap();
        assert!((hs_divergence(&rho, &sigma, 2.5).unwrap() - 0.37).abs() < 1e-12);
    }
}
