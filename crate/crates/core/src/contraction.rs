//! Contraction coefficients `η_γ` and certificates for membership in
//! `B^{γ,δ} = {N : η_γ(N) ≤ δ}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::{choi, QuantumChannel};
use crate::classical::ClassicalChannel;
use crate::divergence::hs_classical_unchecked;
use crate::error::{Error, Result};
use crate::matrix::{eig_hermitian, trace_positive_part, ComplexMatrix, HermitianOperator, C64, EIG_TOL, ZERO};
use crate::random::{gaussian, trial_rng};
use crate::state::PureState;

/// Margin by which an estimate must exceed `δ` before it certifies
/// non-membership.
pub const CERTIFY_MARGIN: f64 = 1e-9;

/// Budget for the randomized search over orthogonal input pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorBudget {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for EstimatorBudget {
    fn default() -> Self {
        EstimatorBudget { restarts: 64, iters: 200, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionEstimate {
    pub gamma: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// `(ψ₁, ψ₂)` with `E_γ(N(ψ₁)‖N(ψ₂)) = lower_bound`.
    #[serde(skip)]
    pub witness: Option<(PureState, PureState)>,
    pub restarts_used: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedIn,
    CertifiedOut,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// `δ ≥ 1 − d_out λ_min(Γ)`
    DoeblinChoi,
    /// `N ∉ B^{γ,0}` and `δ ≥ 1 − γ λ_min(Γ)`
    GammaChoi,
    /// `δ ≥ 1 − (γ + d_out − 1) λ_min(Γ)`; see [`eta_upper_gamma_doeblin`].
    GammaDoeblin,
    /// A zero of `W(y|x)` forces `δ ≥ max_{x'≠x} W(y|x')`.
    ClassicalNecessary,
    /// An input whose output support is too small forces a lower bound on `δ`.
    QuantumRank,
    /// An explicit input pair whose outputs are further than `δ` apart.
    EstimatorWitness,
    None,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::CertifiedIn => "certified_in",
            Verdict::CertifiedOut => "certified_out",
            Verdict::Unknown => "unknown",
        })
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reason::DoeblinChoi => "doeblin_choi",
            Reason::GammaChoi => "gamma_choi",
            Reason::GammaDoeblin => "gamma_doeblin",
            Reason::ClassicalNecessary => "classical_necessary",
            Reason::QuantumRank => "quantum_rank",
            Reason::EstimatorWitness => "estimator_witness",
            Reason::None => "none",
        })
    }
}

/// Outcome of [`containment_check`]. `numeric_evidence` is the quantity the
/// cited rule compared against `δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContainmentCertificate {
    pub verdict: Verdict,
    pub reason: Reason,
    pub numeric_evidence: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::BadParameter(format!("gamma must be finite and >= 1, got {gamma}")));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::BadParameter(format!("delta {delta} outside [0,1]")));
    }
    Ok(())
}

/// `max_{x ≠ x'} E_γ(W(·|x) ‖ W(·|x'))`
pub fn eta_classical_exact(w: &ClassicalChannel, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let n = w.inputs();
    if n < 2 {
        return Err(Error::TooFewInputs);
    }
    let mut best: f64 = 0.0;
    for x in 0..n {
        for x2 in (0..n).filter(|&x2| x2 != x) {
            best = best.max(hs_classical_unchecked(w.row(x), w.row(x2), gamma));
        }
    }
    Ok(best)
}

/// `max_{(x,y): W(y|x)=0} max_{x'≠x} W(y|x')`, or 0 without zero entries.
pub fn classical_delta_lower_bound(w: &ClassicalChannel, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let mut best: f64 = 0.0;
    for x in 0..w.inputs() {
        for y in (0..w.outputs()).filter(|&y| w.get(x, y) == 0.0) {
            for x2 in (0..w.inputs()).filter(|&x2| x2 != x) {
                best = best.max(w.get(x2, y));
            }
        }
    }
    Ok(best)
}

/// `1 − d_out λ_min(Γ^N)` clamped to `[0, 1]`; an upper bound on `η_γ(N)`
/// for every `γ ≥ 1`.
pub fn eta_upper_doeblin(n: &QuantumChannel) -> Result<f64> {
    Ok((1.0 - n.d_out() as f64 * choi(n).min_eigenvalue()?).clamp(0.0, 1.0))
}

/// `1 − (γ + d_out − 1) λ_min(Γ^N)` clamped to `[0, 1]`, an upper bound on
/// `η_γ(N)` that reduces to [`eta_upper_doeblin`] at `γ = 1`.
///
/// Every output satisfies `⟨w|N(ψ)|w⟩ = ⟨ψ̄ w|Γ|ψ̄ w⟩ ≥ λ := λ_min(Γ)`. A
/// positive value of `E_γ(N(ψ₁)‖N(ψ₂))` is attained by a projector `M` of
/// rank `r ∈ [1, d_out − 1]`, and then
/// `Tr[M N(ψ₁)] − γ Tr[M N(ψ₂)] ≤ 1 − (d_out − r)λ − γrλ ≤ 1 − (γ + d_out − 1)λ`.
/// The bound is attained by depolarizing channels.
pub fn eta_upper_gamma_doeblin(n: &QuantumChannel, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok((1.0 - (gamma + n.d_out() as f64 - 1.0) * choi(n).min_eigenvalue()?).clamp(0.0, 1.0))
}

/// `N(|u⟩⟨u|) = Σ (Ku)(Ku)†`
fn pure_output(kraus: &[ComplexMatrix], u: &[C64]) -> ComplexMatrix {
    let d = kraus[0].rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for k in kraus {
        let ku = k.mul_vec(u);
        for r in 0..d {
            for c in 0..d {
                out[(r, c)] += ku[r] * ku[c].conj();
            }
        }
    }
    out
}

fn hs_outputs(a: &ComplexMatrix, b: &ComplexMatrix, gamma: f64) -> Result<f64> {
    trace_positive_part(&HermitianOperator::from_hermitian_unchecked(a - &b.scale_real(gamma)))
}

/// Best ordering of a pair: `(value, swapped)`.
fn pair_score(kraus: &[ComplexMatrix], u: &[C64], v: &[C64], gamma: f64) -> Result<(f64, bool)> {
    let (a, b) = (pure_output(kraus, u), pure_output(kraus, v));
    let forward = hs_outputs(&a, &b, gamma)?;
    let backward = hs_outputs(&b, &a, gamma)?;
    Ok(if backward > forward { (backward, true) } else { (forward, false) })
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Gram-Schmidt on two vectors; `None` if they are (nearly) dependent.
fn orthonormal_pair(u: &[C64], v: &[C64]) -> Option<(Vec<C64>, Vec<C64>)> {
    let nu = norm(u);
    if !(nu > 1e-12) {
        return None;
    }
    let u: Vec<C64> = u.iter().map(|z| z / nu).collect();
    let mut v = v.to_vec();
    for _ in 0..2 {
        let p = dot(&u, &v);
        for (vi, ui) in v.iter_mut().zip(&u) {
            *vi -= p * ui;
        }
    }
    let nv = norm(&v);
    if !(nv > 1e-12) {
        return None;
    }
    Some((u, v.iter().map(|z| z / nv).collect()))
}

fn basis(d: usize, k: usize) -> Vec<C64> {
    let mut e = vec![ZERO; d];
    e[k] = C64::new(1.0, 0.0);
    e
}

const INITIAL_STEP: f64 = 0.25;
const STEP_DECAY: f64 = 0.7;
const SHRINK_ROUNDS: usize = 8;

/// Coordinate search over the real and imaginary parts of `(u, v)`,
/// re-orthonormalizing after each move.
fn refine(kraus: &[ComplexMatrix], gamma: f64, start: (Vec<C64>, Vec<C64>), iters: usize) -> Result<(f64, bool, Vec<C64>, Vec<C64>)> {
    let d = start.0.len();
    let (mut u, mut v) = start;
    let (mut best, mut swapped) = pair_score(kraus, &u, &v, gamma)?;
    let mut step = INITIAL_STEP;
    let mut shrinks = 0;
    for _ in 0..iters {
        let mut improved = false;
        for coord in 0..4 * d {
            let (which, idx, imag) = (coord / (2 * d), (coord / 2) % d, coord % 2 == 1);
            for sign in [1.0, -1.0] {
                let delta = if imag { C64::new(0.0, sign * step) } else { C64::new(sign * step, 0.0) };
                let (mut u2, mut v2) = (u.clone(), v.clone());
                if which == 0 {
                    u2[idx] += delta;
                } else {
                    v2[idx] += delta;
                }
                let Some((u2, v2)) = orthonormal_pair(&u2, &v2) else { continue };
                let (s, sw) = pair_score(kraus, &u2, &v2, gamma)?;
                if s > best {
                    (best, swapped, u, v) = (s, sw, u2, v2);
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            if shrinks == SHRINK_ROUNDS {
                break;
            }
            shrinks += 1;
            step *= STEP_DECAY;
        }
    }
    Ok((best, swapped, u, v))
}

/// Lower bound on `η_γ(N) = max_{ψ₁ ⊥ ψ₂} E_γ(N(ψ₁)‖N(ψ₂))`.
///
/// All ordered pairs of computational basis states are evaluated first.
/// Restart 0 then refines the best of those; later restarts begin from
/// random orthonormal pairs. Restart `i` draws from its own stream derived
/// from `(seed, i)`, so the result does not depend on evaluation order.
pub fn eta_quantum_lower(n: &QuantumChannel, gamma: f64, budget: EstimatorBudget) -> Result<ContractionEstimate> {
    check_gamma(gamma)?;
    let d = n.d_in();
    if d < 2 {
        return Err(Error::BadParameter("estimator needs an input dimension of at least 2".into()));
    }
    let kraus = n.kraus();
    let mut best = (-1.0, false, basis(d, 0), basis(d, 1));
    for i in 0..d {
        for j in i + 1..d {
            let (u, v) = (basis(d, i), basis(d, j));
            let (s, sw) = pair_score(kraus, &u, &v, gamma)?;
            if s > best.0 {
                best = (s, sw, u, v);
            }
        }
    }
    for trial in 0..budget.restarts {
        let start = if trial == 0 {
            (best.2.clone(), best.3.clone())
        } else {
            let mut rng = trial_rng(budget.seed, trial as u64);
            let mut pair = None;
            while pair.is_none() {
                let u: Vec<C64> = (0..d).map(|_| gaussian(&mut rng)).collect();
                let v: Vec<C64> = (0..d).map(|_| gaussian(&mut rng)).collect();
                pair = orthonormal_pair(&u, &v);
            }
            pair.expect("loop exits with a pair")
        };
        let found = refine(kraus, gamma, start, budget.iters)?;
        if found.0 > best.0 {
            best = found;
        }
    }
    let (value, swapped, u, v) = best;
    let (u, v) = (PureState::normalized(u)?, PureState::normalized(v)?);
    let witness = if swapped { (v, u) } else { (u, v) };
    let upper = eta_upper_doeblin(n)?;
    Ok(ContractionEstimate {
        gamma,
        lower_bound: value.clamp(0.0, 1.0),
        upper_bound: upper,
        witness: Some(witness),
        restarts_used: budget.restarts,
    })
}

/// Best value of the necessary condition
/// `δ ≥ 1 − min_{ρ ⊥ φ} Tr[Π_{N(φ)} N(ρ)]` over sampled unit vectors `φ`.
///
/// For each `φ` the inner minimum is exact: it is the smallest eigenvalue of
/// `N†(Π_{N(φ)})` compressed to the orthogonal complement of `φ`. The
/// returned value subtracts `γ·Tr[(I − Π)N(φ)]`, the weight discarded by the
/// support threshold, so it is a genuine lower bound on `η_γ(N)`. The
/// sampled `φ` are the basis states, `extra`, and one random vector per
/// restart.
pub fn quantum_necessary_delta(n: &QuantumChannel, gamma: f64, budget: EstimatorBudget, extra: &[PureState]) -> Result<(f64, Option<PureState>)> {
    check_gamma(gamma)?;
    let d = n.d_in();
    if d < 2 {
        return Ok((0.0, None));
    }
    let mut phis: Vec<Vec<C64>> = (0..d).map(|k| basis(d, k)).collect();
    phis.extend(extra.iter().map(|p| p.vector().to_vec()));
    for trial in 0..budget.restarts {
        let mut rng = trial_rng(budget.seed ^ 0x9e37_79b9_7f4a_7c15, trial as u64);
        phis.push(PureState::normalized((0..d).map(|_| gaussian(&mut rng)).collect())?.vector().to_vec());
    }
    let mut best = (0.0, None);
    for phi in phis {
        let out = pure_output(n.kraus(), &phi);
        let spec = eig_hermitian(&HermitianOperator::from_hermitian_unchecked(out))?;
        let dropped: f64 = spec.eigenvalues.iter().filter(|&&l| l <= EIG_TOL).map(|l| l.max(0.0)).sum();
        let pi = spec.projector(|l| l > EIG_TOL);
        let back = n.apply_adjoint(pi.matrix());
        // Orthonormal basis of φ^⊥ from the projector I − |φ⟩⟨φ|.
        let perp = eig_hermitian(&HermitianOperator::from_hermitian_unchecked(
            &ComplexMatrix::identity(d) - &ComplexMatrix::outer(&phi, &phi),
        ))?;
        let cols: Vec<usize> = (0..d).filter(|&k| perp.eigenvalues[k] > 0.5).collect();
        let q = ComplexMatrix::from_fn(d, cols.len(), |r, c| perp.eigenvectors[(r, cols[c])]);
        let compressed = (&(&q.adjoint() * &back) * &q).hermitian_part();
        let lam = eig_hermitian(&HermitianOperator::from_hermitian_unchecked(compressed))?.eigenvalues[0];
        let value = 1.0 - lam - gamma * dropped;
        if value > best.0 {
            best = (value, Some(PureState::normalized(phi)?));
        }
    }
    Ok(best)
}

/// Searches for an input whose output is rank deficient while the image of
/// `N` spans the whole output space, which rules out `N ∈ B^{γ,0}`.
/// Returns the smallest output eigenvalue found when that happens.
fn rank_deficient_output(n: &QuantumChannel, budget: EstimatorBudget, extra: &[PureState]) -> Result<Option<f64>> {
    let d = n.d_in();
    let full = n.apply_matrix(&ComplexMatrix::identity(d).scale_real(1.0 / d as f64));
    let full_min = eig_hermitian(&HermitianOperator::from_hermitian_unchecked(full))?.eigenvalues[0];
    if full_min <= 1e-8 {
        return Ok(None);
    }
    let mut phis: Vec<Vec<C64>> = (0..d).map(|k| basis(d, k)).collect();
    phis.extend(extra.iter().map(|p| p.vector().to_vec()));
    for trial in 0..budget.restarts.min(16) {
        let mut rng = trial_rng(budget.seed ^ 0x5851_f42d_4c95_7f2d, trial as u64);
        phis.push(PureState::normalized((0..d).map(|_| gaussian(&mut rng)).collect())?.vector().to_vec());
    }
    for phi in phis {
        let out = pure_output(n.kraus(), &phi);
        let lmin = eig_hermitian(&HermitianOperator::from_hermitian_unchecked(out))?.eigenvalues[0];
        if lmin <= EIG_TOL {
            return Ok(Some(lmin));
        }
    }
    Ok(None)
}

/// Decides `N ∈ B^{γ,δ}` where one of the available rules applies.
///
/// Rules are tried in order: the Doeblin/Choi sufficient condition, an
/// explicit estimator witness, the γ-variant of the Choi condition (only
/// once the estimator has shown `N ∉ B^{γ,0}`), the γ-dependent Doeblin
/// bound of [`eta_upper_gamma_doeblin`], and finally the quantum necessary
/// conditions.
pub fn containment_check(n: &QuantumChannel, gamma: f64, delta: f64, budget: EstimatorBudget) -> Result<ContainmentCertificate> {
    check_gamma(gamma)?;
    check_delta(delta)?;
    let lmin = choi(n).min_eigenvalue()?;
    let doeblin = 1.0 - n.d_out() as f64 * lmin;
    if delta + 1e-12 >= doeblin {
        return Ok(ContainmentCertificate { verdict: Verdict::CertifiedIn, reason: Reason::DoeblinChoi, numeric_evidence: doeblin });
    }
    if n.d_in() < 2 {
        // Single-input channels map every pair to the same state.
        return Ok(ContainmentCertificate { verdict: Verdict::CertifiedIn, reason: Reason::None, numeric_evidence: 0.0 });
    }
    let est = eta_quantum_lower(n, gamma, budget)?;
    if est.lower_bound > delta + CERTIFY_MARGIN {
        return Ok(ContainmentCertificate {
            verdict: Verdict::CertifiedOut,
            reason: Reason::EstimatorWitness,
            numeric_evidence: est.lower_bound,
        });
    }
    let gamma_choi = 1.0 - gamma * lmin;
    if est.lower_bound > CERTIFY_MARGIN && delta + 1e-12 >= gamma_choi {
        return Ok(ContainmentCertificate { verdict: Verdict::CertifiedIn, reason: Reason::GammaChoi, numeric_evidence: gamma_choi });
    }
    let gamma_doeblin = 1.0 - (gamma + n.d_out() as f64 - 1.0) * lmin;
    if delta + 1e-12 >= gamma_doeblin {
        return Ok(ContainmentCertificate { verdict: Verdict::CertifiedIn, reason: Reason::GammaDoeblin, numeric_evidence: gamma_doeblin });
    }
    let extra: Vec<PureState> = est.witness.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let (necessary, _) = quantum_necessary_delta(n, gamma, budget, &extra)?;
    if necessary > delta + CERTIFY_MARGIN {
        return Ok(ContainmentCertificate { verdict: Verdict::CertifiedOut, reason: Reason::QuantumRank, numeric_evidence: necessary });
    }
    if delta == 0.0 {
        if let Some(lmin_out) = rank_deficient_output(n, budget, &extra)? {
            return Ok(ContainmentCertificate { verdict: Verdict::CertifiedOut, reason: Reason::QuantumRank, numeric_evidence: lmin_out });
        }
    }
    Ok(ContainmentCertificate { verdict: Verdict::Unknown, reason: Reason::None, numeric_evidence: est.lower_bound })
}

/// Containment for a classical channel: the zero-pattern necessary
/// condition first, then the quantum rules on the embedded channel.
pub fn classical_containment_check(w: &ClassicalChannel, gamma: f64, delta: f64, budget: EstimatorBudget) -> Result<ContainmentCertificate> {
    check_gamma(gamma)?;
    check_delta(delta)?;
    let lb = classical_delta_lower_bound(w, gamma)?;
    if lb > delta + CERTIFY_MARGIN {
        return Ok(ContainmentCertificate { verdict: Verdict::CertifiedOut, reason: Reason::ClassicalNecessary, numeric_evidence: lb });
    }
    containment_check(&QuantumChannel::from_classical(w), gamma, delta, budget)
}
