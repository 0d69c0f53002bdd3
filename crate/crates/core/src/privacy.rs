//! Quantum local differential privacy: `(ε, δ)`-QLDP checks, sequential
//! composition, δ-purification and relative-entropy bounds.
//!
//! A channel is `(ε, δ)`-QLDP exactly when it lies in `B^{e^ε, δ}`, so the
//! verification delegates to [`containment_check`].

use serde::Serialize;

use crate::bounds::ceil_nonneg;
use crate::channel::QuantumChannel;
use crate::contraction::{containment_check, ContainmentCertificate, EstimatorBudget};
use crate::divergence::FGenerator;
use crate::error::{bad_range, Error, Result};

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(bad_range(msg()))
    }
}

fn unit(x: f64, name: &str) -> Result<()> {
    require((0.0..=1.0).contains(&x), || format!("{name} = {x} is outside [0, 1]"))
}

fn nonneg_eps(eps: f64, name: &str) -> Result<()> {
    require(eps >= 0.0 && eps.is_finite(), || format!("{name} = {eps} must be finite and >= 0"))
}

/// An `(ε, δ)` privacy level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrivacyParams {
    pub epsilon: f64,
    pub delta: f64,
    /// `e^ε`
    pub gamma: f64,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        nonneg_eps(epsilon, "epsilon")?;
        unit(delta, "delta")?;
        Ok(PrivacyParams { epsilon, delta, gamma: epsilon.exp() })
    }
}

/// Which composition formula produced a [`CompositionResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositionRule {
    HomogeneousMin,
    HeterogeneousZeta,
    EpsDeltaPower,
    Purification,
}

impl std::fmt::Display for CompositionRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CompositionRule::HomogeneousMin => "homogeneous_min",
            CompositionRule::HeterogeneousZeta => "heterogeneous_zeta",
            CompositionRule::EpsDeltaPower => "eps_delta_power",
            CompositionRule::Purification => "purification",
        })
    }
}

/// Privacy level of a sequential composition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CompositionResult {
    pub epsilon_out: f64,
    pub delta_out: f64,
    pub rule: CompositionRule,
    /// For the heterogeneous rule, `(1 + Πζ)/(1 − Πζ)` before taking the
    /// logarithm (the composed channel lies in `B^{ratio, 0}`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw_ratio: Option<f64>,
}

/// `ζ(ε) = (e^ε − 1)/(e^ε + 1) = tanh(ε/2)`
pub fn zeta_eps(eps: f64) -> f64 {
    (0.5 * eps).tanh()
}

/// Inverse of [`zeta_eps`]: `ln((1 + z)/(1 − z))`.
pub fn eps_from_zeta(z: f64) -> f64 {
    2.0 * z.atanh()
}

/// `(ε, δ)`-QLDP verification, i.e. membership in `B^{e^ε, δ}`.
pub fn qldp_check(n: &QuantumChannel, eps: f64, delta: f64, budget: EstimatorBudget) -> Result<ContainmentCertificate> {
    let p = PrivacyParams::new(eps, delta)?;
    containment_check(n, p.gamma, p.delta, budget)
}

/// `n`-fold composition of an `(ε, 0)` mechanism, reported at level `ε'`:
/// `δ' = min{½(ζ(ε)^n(e^{ε'} + 1) + 1 − e^{ε'})₊, ((e^ε − e^{ε'})/(e^ε + 1))^n}`.
pub fn compose_homogeneous(eps: f64, n: u32, eps_prime: f64) -> Result<CompositionResult> {
    nonneg_eps(eps, "epsilon")?;
    require(eps_prime > 0.0 && eps_prime <= eps, || format!("need 0 < eps' <= eps, got eps' = {eps_prime}, eps = {eps}"))?;
    require(n >= 1, || "n must be >= 1".into())?;
    let (g, gp) = (eps.exp(), eps_prime.exp());
    let curve = (0.5 * (zeta_eps(eps).powi(n as i32) * (gp + 1.0) + 1.0 - gp)).max(0.0);
    let linear = ((g - gp) / (g + 1.0)).powi(n as i32);
    Ok(CompositionResult {
        epsilon_out: eps_prime,
        delta_out: curve.min(linear),
        rule: CompositionRule::HomogeneousMin,
        raw_ratio: None,
    })
}

/// Composition of `(ε_i, 0)` mechanisms: `(ε*, 0)` with
/// `ε* = ln((1 + Πζ(ε_i))/(1 − Πζ(ε_i)))`.
pub fn compose_heterogeneous(eps_list: &[f64]) -> Result<CompositionResult> {
    require(!eps_list.is_empty(), || "epsilon list is empty".into())?;
    for &e in eps_list {
        nonneg_eps(e, "epsilon_i")?;
    }
    let prod: f64 = eps_list.iter().map(|&e| zeta_eps(e)).product();
    require(prod < 1.0, || "product of zeta values reached 1".into())?;
    Ok(CompositionResult {
        epsilon_out: eps_from_zeta(prod),
        delta_out: 0.0,
        rule: CompositionRule::HeterogeneousZeta,
        raw_ratio: Some((1.0 + prod) / (1.0 - prod)),
    })
}

/// `n`-fold composition of an `(ε, δ)` mechanism at level `ε'`:
/// `δ' = (((e^ε − e^{ε'}) + δ(e^{ε'} + 1))/(e^ε + 1))^n`.
pub fn compose_eps_delta(eps: f64, delta: f64, n: u32, eps_prime: f64) -> Result<CompositionResult> {
    nonneg_eps(eps, "epsilon")?;
    nonneg_eps(eps_prime, "epsilon'")?;
    require(eps_prime <= eps, || format!("need eps' <= eps, got eps' = {eps_prime}, eps = {eps}"))?;
    unit(delta, "delta")?;
    require(n >= 1, || "n must be >= 1".into())?;
    let (g, gp) = (eps.exp(), eps_prime.exp());
    let rate = ((g - gp) + delta * (gp + 1.0)) / (g + 1.0);
    Ok(CompositionResult {
        epsilon_out: eps_prime,
        delta_out: rate.powi(n as i32).min(1.0),
        rule: CompositionRule::EpsDeltaPower,
        raw_ratio: None,
    })
}

/// Number of repetitions of an `(ε, δ)` mechanism whose fixed point has
/// smallest eigenvalue `λ_min` that makes the composition `(ε', 0)`:
/// `⌈max{ln((e^{ε'} − 1)λ/2), ln(λ/2)} / ln f⌉` with
/// `f = (e^ε − 1 + 2δ)/(e^ε + 1)`.
pub fn purify_delta(eps: f64, delta: f64, eps_prime: f64, lambda_min: f64) -> Result<u64> {
    require(eps > 0.0 && eps.is_finite(), || format!("epsilon = {eps} must be positive"))?;
    require(delta > 0.0 && delta < 1.0, || format!("delta = {delta} must lie in (0, 1)"))?;
    require(eps_prime > 0.0 && eps_prime < eps, || format!("need 0 < eps' < eps, got eps' = {eps_prime}"))?;
    if !(lambda_min > 0.0) {
        return Err(Error::FixedPointNotFullRank);
    }
    require(lambda_min <= 1.0, || format!("lambda_min = {lambda_min} exceeds 1"))?;
    let g = eps.exp();
    let f = (g - 1.0 + 2.0 * delta) / (g + 1.0);
    let first = ((eps_prime.exp() - 1.0) * lambda_min / 2.0).ln() / f.ln();
    let second = (lambda_min / 2.0).ln() / f.ln();
    Ok(ceil_nonneg(first.max(second)).max(1))
}

/// Same as [`purify_delta`], packaged as a [`CompositionResult`] with the
/// step count returned alongside.
pub fn purify_result(eps: f64, delta: f64, eps_prime: f64, lambda_min: f64) -> Result<(u64, CompositionResult)> {
    let n = purify_delta(eps, delta, eps_prime, lambda_min)?;
    Ok((
        n,
        CompositionResult { epsilon_out: eps_prime, delta_out: 0.0, rule: CompositionRule::Purification, raw_ratio: None },
    ))
}

fn bound_ranges(eps: f64, delta: f64, tau: f64, lambda: f64) -> Result<()> {
    require(eps > 0.0 && eps.is_finite(), || format!("epsilon = {eps} must be positive"))?;
    unit(delta, "delta")?;
    unit(tau, "tau")?;
    require(lambda > 0.0 && lambda <= 1.0, || format!("lambda = {lambda} must lie in (0, 1]"))
}

/// Bound on `D_f(N(ρ)‖N(σ))` for an `(ε, δ)`-QLDP channel `N` with input
/// trace distance `τ` and `λ = inf_σ λ_min(N(σ))`. With `γ = e^ε` and
/// `x = γ + δ/λ` it is
///
/// `(f(γ) + γf(1/γ))/(γ − 1) · (γ − 1 + 2δ)/(γ + 1) · τ
///  − (f(γ) + f(1/γ))/(γ − 1) · δ
///  + λ(f(x) − f(γ) + x f(1/x) − x f(1/γ))`.
pub fn f_div_privacy_bound(gen: &FGenerator, eps: f64, delta: f64, tau: f64, lambda: f64) -> Result<f64> {
    bound_ranges(eps, delta, tau, lambda)?;
    let g = eps.exp();
    let x = g + delta / lambda;
    let (fg, fi) = (gen.f(g), gen.f(1.0 / g));
    let g1 = (fg + g * fi) / (g - 1.0) * (g - 1.0 + 2.0 * delta) / (g + 1.0) * tau;
    let g2 = -(fg + fi) / (g - 1.0) * delta;
    let g3 = lambda * (gen.f(x) - fg + x * gen.f(1.0 / x) - x * fi);
    Ok(g1 + g2 + g3)
}

/// Closed form of [`f_div_privacy_bound`] for relative entropy:
///
/// `ε(e^ε − 1 + 2δ)/(e^ε + 1)·τ − ε(e^ε − e^{−ε})/(e^ε − 1)·δ
///  + λ((x − 1)ln x + (1 − e^ε + (δ/λ)e^{−ε})ε)` with `x = e^ε + δ/λ`.
pub fn re_ldp_bound(eps: f64, delta: f64, tau: f64, lambda: f64) -> Result<f64> {
    bound_ranges(eps, delta, tau, lambda)?;
    let g = eps.exp();
    let x = g + delta / lambda;
    Ok(eps * (g - 1.0 + 2.0 * delta) / (g + 1.0) * tau - eps * (g - 1.0 / g) / (g - 1.0) * delta
        + lambda * ((x - 1.0) * x.ln() + (1.0 - g + delta / lambda / g) * eps))
}

/// Earlier relative-entropy bound for `(ε, δ)`-LDP mechanisms, in its
/// rearranged form, with `m` the minimum mass of a truncated distribution
/// supplied by the caller:
///
/// `(ε(e^ε − 1 + 2δ)/(e^ε + 1) + δ((e^ε + δ − 1)/e^ε + ln(1/(1 − δ))))τ
///  + δ(e^ε/(1 − δ) − (1 − δ)/e^ε + 4(ε + ln(1/(1 − δ)) + 1/m))`.
pub fn dasgupta_bound(eps: f64, delta: f64, tau: f64, m: f64) -> Result<f64> {
    require(eps > 0.0 && eps.is_finite(), || format!("epsilon = {eps} must be positive"))?;
    require((0.0..1.0).contains(&delta), || format!("delta = {delta} must lie in [0, 1)"))?;
    unit(tau, "tau")?;
    require(m > 0.0 && m <= 1.0, || format!("m = {m} must lie in (0, 1]"))?;
    let g = eps.exp();
    let l = (1.0 / (1.0 - delta)).ln();
    Ok((eps * (g - 1.0 + 2.0 * delta) / (g + 1.0) + delta * ((g + delta - 1.0) / g + l)) * tau
        + delta * (g / (1.0 - delta) - (1.0 - delta) / g + 4.0 * (eps + l + 1.0 / m)))
}
