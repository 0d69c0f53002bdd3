//! Scalar bound calculators: strong data-processing inequalities, `F_γ`
//! curves, hitting and mixing times, and reverse-Pinsker bounds.
//!
//! Everything here is a pure function of its scalar arguments except
//! [`tightness_check`], which builds the extremal channel and measures it.

use serde::Serialize;

use crate::channel::achievability_channel;
use crate::divergence::{hs_divergence, FGenerator};
use crate::error::{bad_range, Error, Result};
use crate::state::DensityOperator;

/// Slack used when rounding a bound up to an integer, so that values such
/// as `ln 0.5 / ln 0.5` that land a few ulps above an integer round to it.
pub const CEIL_SLACK: f64 = 1e-9;
/// Interval width below which a chord slope is replaced by a derivative.
const CHORD_EPS: f64 = 1e-9;
/// Finite difference step for those derivatives.
const DIFF_STEP: f64 = 1e-6;

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

fn at_least_one(x: f64, name: &str) -> Result<()> {
    require(x >= 1.0 && x.is_finite(), || format!("{name} = {x} must be finite and >= 1"))
}

/// `⌈x⌉` clamped at 0, tolerant of rounding noise just above an integer.
pub fn ceil_nonneg(x: f64) -> u64 {
    let c = (x - CEIL_SLACK).ceil();
    if c > 0.0 {
        c as u64
    } else {
        0
    }
}

/// Bound on `E_{γ'}` from the symmetrized `E_γ` value `t`:
/// `(γ − γ')/(γ + 1) + (γ' + 1)t/(γ + 1)`.
pub fn hs_gamma_relation(gamma: f64, gamma_prime: f64, t: f64) -> Result<f64> {
    at_least_one(gamma_prime, "gamma'")?;
    require(gamma >= gamma_prime && gamma.is_finite(), || format!("need gamma >= gamma', got {gamma} < {gamma_prime}"))?;
    unit(t, "t")?;
    Ok((gamma - gamma_prime) / (gamma + 1.0) + (gamma_prime + 1.0) * t / (gamma + 1.0))
}

/// True iff `e_val ≤ (γ − γ')λ_min`, which certifies `E_γ(ρ‖σ) = 0` when
/// `e_val = E_{γ'}(ρ‖σ)` and `λ_min = λ_min(σ)`.
pub fn zeroing_criterion(gamma: f64, gamma_prime: f64, lambda_min: f64, e_val: f64) -> Result<bool> {
    at_least_one(gamma_prime, "gamma'")?;
    require(gamma >= gamma_prime && gamma.is_finite(), || format!("need gamma >= gamma', got {gamma} < {gamma_prime}"))?;
    unit(lambda_min, "lambda_min")?;
    unit(e_val, "E_gamma'")?;
    Ok(e_val <= (gamma - gamma_prime) * lambda_min)
}

/// `D_max(ρ‖σ) ≤ ln(γ + E_γ(ρ‖σ)/λ_min(σ))`
pub fn dmax_upper_from_hs(gamma: f64, e_val: f64, lambda_min: f64) -> Result<f64> {
    at_least_one(gamma, "gamma")?;
    require(e_val >= 0.0 && e_val.is_finite(), || format!("E_gamma = {e_val} must be >= 0"))?;
    if !(lambda_min > 0.0) {
        return Err(Error::ZeroLambdaMin);
    }
    Ok((gamma + e_val / lambda_min).ln())
}

/// Linear contraction coefficient of `E_{γ'}` for channels in `B^{γ,δ}`:
/// `max{((γ − γ') + δ(γ' + 1))/(γ + 1), δ}`.
pub fn linear_sdpi(gamma: f64, gamma_prime: f64, delta: f64) -> Result<f64> {
    at_least_one(gamma, "gamma")?;
    at_least_one(gamma_prime, "gamma'")?;
    unit(delta, "delta")?;
    Ok((((gamma - gamma_prime) + delta * (gamma_prime + 1.0)) / (gamma + 1.0)).max(delta))
}

/// Inputs of the non-linear SDPI: channel class `B^{γ,δ}`, divergence order
/// `γ'` and input value `t = E_{γ'}(ρ‖σ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SdpiParams {
    pub gamma: f64,
    pub gamma_prime: f64,
    pub delta: f64,
    pub t: f64,
}

impl SdpiParams {
    pub fn new(gamma: f64, gamma_prime: f64, delta: f64, t: f64) -> Result<Self> {
        at_least_one(gamma, "gamma")?;
        at_least_one(gamma_prime, "gamma'")?;
        unit(delta, "delta")?;
        unit(t, "t")?;
        Ok(SdpiParams { gamma, gamma_prime, delta, t })
    }
}

/// `max{((γ + 2δ − 1)t − (γ' − 1)(1 − δ))/(γ + 1), δt}`
pub fn nonlinear_sdpi(p: SdpiParams) -> Result<f64> {
    let SdpiParams { gamma, gamma_prime, delta, t } = SdpiParams::new(p.gamma, p.gamma_prime, p.delta, p.t)?;
    let affine = ((gamma + 2.0 * delta - 1.0) * t - (gamma_prime - 1.0) * (1.0 - delta)) / (gamma + 1.0);
    Ok(affine.max(delta * t))
}

fn zeta_product(gammas: impl IntoIterator<Item = f64>) -> f64 {
    gammas.into_iter().fold(1.0, |acc, g| acc * (g - 1.0) / (g + 1.0))
}

fn f_gamma_from_product(prod: f64, gamma_prime: f64, t: f64) -> f64 {
    (t * prod - 0.5 * (gamma_prime - 1.0) * (1.0 - prod)).max(0.0)
}

/// Bound on the `F_{γ'}` curve of `N_1 ∘ … ∘ N_n` with `N_i ∈ B^{γ_i,0}`.
pub fn f_gamma_hetero(gammas: &[f64], gamma_prime: f64, t: f64) -> Result<f64> {
    require(!gammas.is_empty(), || "gamma list is empty".into())?;
    at_least_one(gamma_prime, "gamma'")?;
    unit(t, "t")?;
    for &g in gammas {
        require(g >= gamma_prime && g.is_finite(), || format!("every gamma_i must be >= gamma' = {gamma_prime}, got {g}"))?;
    }
    Ok(f_gamma_from_product(zeta_product(gammas.iter().copied()), gamma_prime, t))
}

/// [`f_gamma_hetero`] with `n` copies of `γ`.
pub fn f_gamma_homog(gamma: f64, n: u32, gamma_prime: f64, t: f64) -> Result<f64> {
    require(n >= 1, || "n must be >= 1".into())?;
    at_least_one(gamma_prime, "gamma'")?;
    require(gamma >= gamma_prime && gamma.is_finite(), || format!("need gamma >= gamma', got {gamma} < {gamma_prime}"))?;
    unit(t, "t")?;
    Ok(f_gamma_from_product(zeta_product(std::iter::repeat_n(gamma, n as usize)), gamma_prime, t))
}

/// Constants of the affine recursion `Φ_k(t) = a^k(t + c) − c`,
/// `c = b/(1 − a)`, followed by the non-linear SDPI above the kink
/// `t_star`. `k_star` and `T_star` are evaluated at `t = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HittingTimeParams {
    pub gamma: f64,
    pub gamma_prime: f64,
    pub delta: f64,
    pub a: f64,
    pub b: f64,
    pub t_star: f64,
    pub k_star: u64,
    #[serde(rename = "T_star")]
    pub big_t_star: f64,
}

impl HittingTimeParams {
    /// `b/(1 − a)`, algebraically `(γ' − 1)/2`.
    pub fn offset(&self) -> f64 {
        self.b / (1.0 - self.a)
    }
}

pub fn hitting_params(gamma: f64, gamma_prime: f64, delta: f64) -> Result<HittingTimeParams> {
    require(gamma_prime > 1.0 && gamma > gamma_prime && gamma.is_finite(), || {
        format!("need 1 < gamma' < gamma, got gamma = {gamma}, gamma' = {gamma_prime}")
    })?;
    require(delta > 0.0 && delta < 1.0, || format!("delta = {delta} must lie in (0, 1)"))?;
    let mut hp = HittingTimeParams {
        gamma,
        gamma_prime,
        delta,
        a: (gamma + 2.0 * delta - 1.0) / (gamma + 1.0),
        b: (gamma_prime - 1.0) * (1.0 - delta) / (gamma + 1.0),
        t_star: (gamma_prime - 1.0) / (gamma - 1.0),
        k_star: 0,
        big_t_star: 0.0,
    };
    hp.k_star = k_star(&hp, 1.0)?;
    hp.big_t_star = phi_k(&hp, 1.0, hp.k_star);
    Ok(hp)
}

/// `Φ_k(t) = a^k(t + b/(1−a)) − b/(1−a)`
pub fn phi_k(hp: &HittingTimeParams, t: f64, k: u64) -> f64 {
    let c = hp.offset();
    hp.a.powf(k as f64) * (t + c) - c
}

/// Smallest `k ≥ 0` with `Φ_k(t) ≤ t_star`.
pub fn k_star(hp: &HittingTimeParams, t: f64) -> Result<u64> {
    unit(t, "t")?;
    let c = hp.offset();
    let estimate = ((hp.t_star + c) / (t + c)).ln() / hp.a.ln();
    let mut k = if estimate > 0.0 { estimate.ceil() as u64 } else { 0 };
    while k > 0 && phi_k(hp, t, k - 1) <= hp.t_star {
        k -= 1;
    }
    while phi_k(hp, t, k) > hp.t_star {
        k += 1;
    }
    Ok(k)
}

/// `G_n(t)`: `Φ_n(t)` for `1 ≤ n ≤ k_star(t)`, then `δ^{n−k_star} Φ_{k_star}(t)`.
pub fn g_n(hp: &HittingTimeParams, t: f64, n: u64) -> Result<f64> {
    require(n >= 1, || "n must be >= 1".into())?;
    let k = k_star(hp, t)?;
    if n <= k {
        Ok(phi_k(hp, t, n))
    } else {
        Ok(hp.delta.powf((n - k) as f64) * phi_k(hp, t, k))
    }
}

fn mixing_ranges(gamma: f64, gamma_prime: f64) -> Result<()> {
    require(gamma_prime > 1.0 && gamma >= gamma_prime && gamma.is_finite(), || {
        format!("need gamma >= gamma' > 1, got gamma = {gamma}, gamma' = {gamma_prime}")
    })
}

/// Mixing time from the non-linear SDPI for channels in `B^{γ,0}`:
/// `⌈ln((γ'+1)/(2β+γ'−1)) / ln((γ+1)/(γ−1))⌉₊`. Finite even at `β = 0`.
pub fn mixing_time_nonlinear(gamma: f64, gamma_prime: f64, beta: f64) -> Result<u64> {
    mixing_ranges(gamma, gamma_prime)?;
    unit(beta, "beta")?;
    let num = ((gamma_prime + 1.0) / (2.0 * beta + gamma_prime - 1.0)).ln();
    let den = ((gamma + 1.0) / (gamma - 1.0)).ln();
    Ok(ceil_nonneg(num / den))
}

/// Result of a linear-SDPI mixing time: a step count, or no finite bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MixingTime {
    Steps(u64),
    Unbounded,
}

impl MixingTime {
    pub fn steps(self) -> Option<u64> {
        match self {
            MixingTime::Steps(n) => Some(n),
            MixingTime::Unbounded => None,
        }
    }
}

/// `⌈ln(1/β) / ln((γ+1)/(γ−γ'+(1+γ')δ))⌉`, unbounded at `β = 0`.
pub fn mixing_time_linear(gamma: f64, gamma_prime: f64, delta: f64, beta: f64) -> Result<MixingTime> {
    mixing_ranges(gamma, gamma_prime)?;
    unit(delta, "delta")?;
    unit(beta, "beta")?;
    let den = gamma - gamma_prime + (1.0 + gamma_prime) * delta;
    if den <= 0.0 {
        // coefficient 0: one step zeroes every input divergence
        return Ok(MixingTime::Steps(if beta >= 1.0 { 0 } else { 1 }));
    }
    let rate = (gamma + 1.0) / den;
    if rate <= 1.0 {
        return Err(Error::ContractionNotStrict { rate: 1.0 / rate });
    }
    if beta == 0.0 {
        return Ok(MixingTime::Unbounded);
    }
    Ok(MixingTime::Steps(ceil_nonneg((1.0 / beta).ln() / rate.ln())))
}

/// `k_star + ⌈ln(β/T_star)/ln δ⌉₊` with `k_star`, `T_star` taken at `t = 1`.
pub fn mixing_time_delta(gamma: f64, gamma_prime: f64, delta: f64, beta: f64) -> Result<u64> {
    let hp = hitting_params(gamma, gamma_prime, delta)?;
    require(beta > 0.0 && beta < 1.0, || format!("beta = {beta} must lie in (0, 1)"))?;
    Ok(hp.k_star + ceil_nonneg((beta / hp.big_t_star).ln() / delta.ln()))
}

/// `ζ(x) = (x − 1)/(x + 1)`
pub fn zeta(x: f64) -> f64 {
    (x - 1.0) / (x + 1.0)
}

/// Full-rank fixed-point mixing bound, with the two alternative hypotheses
/// under which it is stated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FullRankMixing {
    pub steps: u64,
    /// `(γ' + 1)λ_min ≤ 1`
    pub strong_hypothesis: bool,
    /// `(γ' − 1)λ_min ≤ 1`
    pub weak_hypothesis: bool,
}

/// `⌈ln((γ'−1)λ_min) / ln ζ(e^a)⌉` where `a` bounds `D_max` over output
/// pairs and `λ_min` is the smallest eigenvalue of the fixed point.
pub fn mixing_time_full_rank(a: f64, gamma_prime: f64, lambda_min: f64) -> Result<FullRankMixing> {
    require(a > 0.0 && a.is_finite(), || format!("a = {a} must be positive and finite"))?;
    require(gamma_prime > 1.0 && gamma_prime.is_finite(), || format!("gamma' = {gamma_prime} must be > 1"))?;
    if !(lambda_min > 0.0) {
        return Err(Error::ZeroLambdaMin);
    }
    let arg = (gamma_prime - 1.0) * lambda_min;
    require(arg < 1.0, || format!("(gamma' - 1) lambda_min = {arg} must lie in (0, 1)"))?;
    let z = zeta(a.exp());
    Ok(FullRankMixing {
        steps: ceil_nonneg(arg.ln() / z.ln()),
        strong_hypothesis: (gamma_prime + 1.0) * lambda_min <= 1.0,
        weak_hypothesis: arg <= 1.0,
    })
}

/// Chord bound from convexity of `γ ↦ E_γ` on `[γ₁, γ₂]`.
pub fn hs_convexity_bound(gamma: f64, gamma1: f64, gamma2: f64, e1: f64, e2: f64) -> Result<f64> {
    at_least_one(gamma1, "gamma1")?;
    require(gamma2 >= gamma1 && gamma2.is_finite(), || format!("need gamma1 <= gamma2, got {gamma1} > {gamma2}"))?;
    unit(e1, "e1")?;
    unit(e2, "e2")?;
    if gamma1 == gamma2 {
        return if gamma == gamma1 { Ok(e1) } else { Err(Error::DegenerateInterval) };
    }
    require(gamma >= gamma1 && gamma <= gamma2, || format!("gamma = {gamma} is outside [{gamma1}, {gamma2}]"))?;
    Ok((gamma - gamma2) / (gamma1 - gamma2) * e1 + (gamma1 - gamma) / (gamma1 - gamma2) * e2)
}

/// `(f(x1) − f(x0))/(x1 − x0)`, or `f'` at the midpoint for a vanishing
/// interval.
fn slope(gen: &FGenerator, x0: f64, x1: f64) -> f64 {
    if (x1 - x0).abs() < CHORD_EPS {
        let m = 0.5 * (x0 + x1);
        let h = DIFF_STEP.min(0.5 * m);
        (gen.f(m + h) - gen.f(m - h)) / (2.0 * h)
    } else {
        (gen.f(x1) - gen.f(x0)) / (x1 - x0)
    }
}

/// Upper bound on `D_f(ρ‖σ)` given `E_{γ₁}(ρ‖σ) ≤ δ₁`, `E_{γ₂}(σ‖ρ) ≤ δ₂`,
/// trace distance `τ`, `a = D_max(ρ‖σ)` and `b = D_max(σ‖ρ)`:
///
/// `f(γ₁)(τ−δ₁)/(γ₁−1) + δ₁(f(e^a)−f(γ₁))/(e^a−γ₁)
///  + f(γ₂⁻¹)(γ₂τ−δ₂)/(γ₂−1) + e^b δ₂(f(e^{−b})−f(γ₂⁻¹))/(e^b−γ₂)`.
///
/// Each quotient is a chord slope of `f`, so the removable singularities at
/// `γᵢ = 1`, `e^a = γ₁` and `e^b = γ₂` become derivatives.
#[allow(clippy::too_many_arguments)]
pub fn reverse_pinsker_general(
    gen: &FGenerator,
    gamma1: f64,
    gamma2: f64,
    delta1: f64,
    delta2: f64,
    tau: f64,
    a: f64,
    b: f64,
) -> Result<f64> {
    at_least_one(gamma1, "gamma1")?;
    at_least_one(gamma2, "gamma2")?;
    unit(delta1, "delta1")?;
    unit(delta2, "delta2")?;
    unit(tau, "tau")?;
    require(a.is_finite() && a >= gamma1.ln() - CHORD_EPS, || format!("a = {a} must be finite and >= ln gamma1"))?;
    require(b.is_finite() && b >= gamma2.ln() - CHORD_EPS, || format!("b = {b} must be finite and >= ln gamma2"))?;
    let inv2 = 1.0 / gamma2;
    let t1 = (tau - delta1) * slope(gen, 1.0, gamma1);
    let t2 = delta1 * slope(gen, gamma1, a.exp().max(gamma1));
    let t3 = -(gamma2 * tau - delta2) * slope(gen, inv2, 1.0) / gamma2;
    let t4 = -delta2 * slope(gen, (-b).exp().min(inv2), inv2) / gamma2;
    Ok(t1 + t2 + t3 + t4)
}

/// Symmetric case `E_γ(ρ‖σ), E_γ(σ‖ρ) ≤ δ` with the trace distance
/// eliminated through `τ ≤ (γ − 1 + 2δ)/(γ + 1)`:
///
/// `((γ+δ)f(γ⁻¹) + (1−δ)f(γ))/(γ+1)
///  + [e^b(f(e^{−b})−f(γ⁻¹))/(e^b−γ) + (f(e^a)−f(γ))/(e^a−γ)]δ`.
pub fn reverse_pinsker_sym(gen: &FGenerator, gamma: f64, delta: f64, a: f64, b: f64) -> Result<f64> {
    at_least_one(gamma, "gamma")?;
    unit(delta, "delta")?;
    require(a.is_finite() && a >= gamma.ln() - CHORD_EPS, || format!("a = {a} must be finite and >= ln gamma"))?;
    require(b.is_finite() && b >= gamma.ln() - CHORD_EPS, || format!("b = {b} must be finite and >= ln gamma"))?;
    let inv = 1.0 / gamma;
    let base = ((gamma + delta) * gen.f(inv) + (1.0 - delta) * gen.f(gamma)) / (gamma + 1.0);
    let upper = slope(gen, gamma, a.exp().max(gamma));
    let lower = -slope(gen, (-b).exp().min(inv), inv) / gamma;
    Ok(base + (lower + upper) * delta)
}

/// Outcome of [`tightness_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TightnessReport {
    pub gamma: f64,
    pub gamma_prime: f64,
    pub delta: f64,
    /// `E_{γ'}(ρ‖σ)`
    pub t: f64,
    /// `E_{γ'}(N(ρ)‖N(σ))` for the extremal channel `N`
    pub channel_value: f64,
    /// `nonlinear_sdpi(γ, γ', δ, t)`
    pub bound: f64,
    /// `bound − channel_value`
    pub gap: f64,
    pub tol: f64,
    /// `|gap| ≤ tol`
    pub passed: bool,
    /// Equality is expected: `δ ∈ {0, 1}` or `t ≥ (γ' − 1)/(γ − 1)`.
    pub equality_expected: bool,
    /// The broader region `δ = 0` or `t ≥ (γ' − 1)/(γ + 1)`.
    pub in_wide_region: bool,
}

/// Builds the extremal channel of `B^{γ,δ}` for the pair `(ρ, σ)` (qubit
/// depolarizing noise with `p = 2(1−δ)/(γ+1)` after the two-outcome
/// measurement onto the positive part of `ρ − γ'σ`) and compares its output
/// divergence with the non-linear SDPI.
///
/// The measured value is `((γ−1+2δ)t − (1−δ)(γ'−1))₊/(γ+1)` for every pair,
/// so it meets the bound exactly when `δ ∈ {0, 1}` or `t ≥ (γ'−1)/(γ−1)`.
/// Below that threshold and for `0 < δ < 1` the bound's `δt` branch is
/// strictly larger and the check reports a gap.
pub fn tightness_check(
    gamma: f64,
    gamma_prime: f64,
    delta: f64,
    rho: &DensityOperator,
    sigma: &DensityOperator,
    tol: f64,
) -> Result<TightnessReport> {
    at_least_one(gamma, "gamma")?;
    at_least_one(gamma_prime, "gamma'")?;
    unit(delta, "delta")?;
    let t = hs_divergence(rho, sigma, gamma_prime)?.min(1.0);
    let p = 2.0 * (1.0 - delta) / (gamma + 1.0);
    let n = achievability_channel(gamma_prime, rho, sigma, p)?;
    let channel_value = hs_divergence(&n.apply(rho)?, &n.apply(sigma)?, gamma_prime)?;
    let bound = nonlinear_sdpi(SdpiParams { gamma, gamma_prime, delta, t })?;
    let gap = bound - channel_value;
    let threshold = if gamma > 1.0 { (gamma_prime - 1.0) / (gamma - 1.0) } else { f64::INFINITY };
    Ok(TightnessReport {
        gamma,
        gamma_prime,
        delta,
        t,
        channel_value,
        bound,
        gap,
        tol,
        passed: gap.abs() <= tol,
        equality_expected: delta == 0.0 || delta == 1.0 || t >= threshold,
        in_wide_region: delta == 0.0 || t >= (gamma_prime - 1.0) / (gamma + 1.0),
    })
}
