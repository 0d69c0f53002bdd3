//! Hockey-stick divergences and the quantities derived from them.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::classical::check_distribution;
use crate::error::{Error, Result};
use crate::matrix::{eig_hermitian, trace_positive_part, ComplexMatrix, HermitianOperator, EIG_TOL};
use crate::state::DensityOperator;

/// Default absolute tolerance for [`f_divergence`].
pub const QUAD_TOL: f64 = 1e-8;
/// Largest `γ` tried by [`smooth_d_max`] before declaring the value infinite.
pub const SMOOTH_DMAX_CAP: f64 = 5.184705528587072e21; // e^50

fn same_dim(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!("states have dimensions {} and {}", rho.dim(), sigma.dim())));
    }
    Ok(())
}

/// `E_γ(ρ‖σ) = Tr[(ρ − γσ)_+] − (1 − γ)_+`
pub fn hs_divergence(rho: &DensityOperator, sigma: &DensityOperator, gamma: f64) -> Result<f64> {
    same_dim(rho, sigma)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::BadParameter(format!("gamma must be finite and >= 0, got {gamma}")));
    }
    hs_unchecked(rho.op(), sigma.op(), gamma)
}

pub(crate) fn hs_unchecked(rho: &HermitianOperator, sigma: &HermitianOperator, gamma: f64) -> Result<f64> {
    let plus = trace_positive_part(&rho.sub_scaled(sigma, gamma))?;
    Ok((plus - (1.0 - gamma).max(0.0)).max(0.0))
}

/// `Σ_x max{0, p(x) − γ q(x)}`
pub fn hs_classical(p: &[f64], q: &[f64], gamma: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!("distributions have lengths {} and {}", p.len(), q.len())));
    }
    check_distribution(p)?;
    check_distribution(q)?;
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::BadParameter(format!("gamma must be finite and >= 1, got {gamma}")));
    }
    Ok(hs_classical_unchecked(p, q, gamma))
}

pub(crate) fn hs_classical_unchecked(p: &[f64], q: &[f64], gamma: f64) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - gamma * b).max(0.0)).sum()
}

/// `½‖ρ − σ‖₁`
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dim(rho, sigma)?;
    let spec = eig_hermitian(&rho.op().sub_scaled(sigma.op(), 1.0))?;
    Ok(0.5 * spec.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

/// `max{E_γ(ρ‖σ), E_γ(σ‖ρ)}`
pub fn hs_sym(rho: &DensityOperator, sigma: &DensityOperator, gamma: f64) -> Result<f64> {
    Ok(hs_divergence(rho, sigma, gamma)?.max(hs_divergence(sigma, rho, gamma)?))
}

/// Eigenvalues of `σ^{−1/2} ρ σ^{−1/2}` on the support of `σ`, or `None`
/// when `ρ` has weight outside that support.
fn relative_spectrum(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<Option<Vec<f64>>> {
    let spec = eig_hermitian(sigma)?;
    let d = sigma.dim();
    let support: Vec<usize> = (0..d).filter(|&k| spec.eigenvalues[k] > EIG_TOL).collect();
    let kernel = spec.projector(|l| l <= EIG_TOL);
    if kernel.matrix().trace_product_re(rho.matrix()) > EIG_TOL {
        return Ok(None);
    }
    let w = ComplexMatrix::from_fn(d, support.len(), |r, c| {
        let k = support[c];
        spec.eigenvectors[(r, k)] / spec.eigenvalues[k].sqrt()
    });
    let m = &(&w.adjoint() * rho.matrix()) * &w;
    Ok(Some(eig_hermitian(&HermitianOperator::from_hermitian_unchecked(m.hermitian_part()))?.eigenvalues))
}

/// `ln min{λ : ρ ≤ λσ}`, or `+∞` when the support of `ρ` is not contained in
/// that of `σ`.
pub fn d_max(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dim(rho, sigma)?;
    Ok(match relative_spectrum(rho.op(), sigma.op())? {
        None => f64::INFINITY,
        Some(mu) => mu.last().copied().unwrap_or(1.0).max(1.0).ln(),
    })
}

/// `ln γ*` with `γ* = inf{γ ≥ 1 : E_γ(ρ‖σ) ≤ δ}`, found by bisection.
pub fn smooth_d_max(rho: &DensityOperator, sigma: &DensityOperator, delta: f64) -> Result<f64> {
    same_dim(rho, sigma)?;
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::BadParameter(format!("delta {delta} outside [0,1]")));
    }
    let e = |g: f64| hs_unchecked(rho.op(), sigma.op(), g);
    if e(1.0)? <= delta {
        return Ok(0.0);
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    while e(hi)? > delta {
        lo = hi;
        hi *= 2.0;
        if hi > SMOOTH_DMAX_CAP {
            return Err(Error::Infinite);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if e(mid)? > delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi.ln())
}

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Convex `f` with `f(1) = 0`, described by `f`, its second derivative and
/// any point masses of the second derivative (kinks of `f`).
///
/// Two limits decide whether divergences with mismatched supports are
/// finite: `f(0⁺)` and the asymptotic slope `lim f(x)/x`.
#[derive(Clone)]
pub struct FGenerator {
    name: String,
    f: RealFn,
    f_second: RealFn,
    atoms: Vec<(f64, f64)>,
    f_at_zero: f64,
    slope_at_infinity: f64,
}

impl fmt::Debug for FGenerator {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.debug_struct("FGenerator").field("name", &self.name).field("atoms", &self.atoms).finish_non_exhaustive()
    }
}

impl FGenerator {
    /// `x ln x`
    pub fn kl() -> Self {
        FGenerator {
            name: "kl".into(),
            f: Arc::new(|x: f64| if x == 0.0 { 0.0 } else { x * x.ln() }),
            f_second: Arc::new(|x: f64| 1.0 / x),
            atoms: vec![],
            f_at_zero: 0.0,
            slope_at_infinity: f64::INFINITY,
        }
    }

    /// `½|x − 1|`
    pub fn total_variation() -> Self {
        FGenerator {
            name: "total_variation".into(),
            f: Arc::new(|x: f64| 0.5 * (x - 1.0).abs()),
            f_second: Arc::new(|_| 0.0),
            atoms: vec![(1.0, 1.0)],
            f_at_zero: 0.5,
            slope_at_infinity: 0.5,
        }
    }

    /// `(x − 1)²`
    pub fn chi2() -> Self {
        FGenerator {
            name: "chi2".into(),
            f: Arc::new(|x: f64| (x - 1.0) * (x - 1.0)),
            f_second: Arc::new(|_| 2.0),
            atoms: vec![],
            f_at_zero: 1.0,
            slope_at_infinity: f64::INFINITY,
        }
    }

    /// `(x − γ₀)_+`, whose divergence is `E_{γ₀}`.
    pub fn hockey_stick(gamma0: f64) -> Result<Self> {
        if !(gamma0 >= 1.0 && gamma0.is_finite()) {
            return Err(Error::InvalidGenerator(format!("hockey-stick generator needs gamma0 >= 1, got {gamma0}")));
        }
        Ok(FGenerator {
            name: format!("hockey_stick({gamma0})"),
            f: Arc::new(move |x: f64| (x - gamma0).max(0.0)),
            f_second: Arc::new(|_| 0.0),
            atoms: vec![(gamma0, 1.0)],
            f_at_zero: 0.0,
            slope_at_infinity: 1.0,
        })
    }

    /// A user-supplied smooth generator. The limits at `0` and `∞` are
    /// estimated by evaluating `f`.
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f_second: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let f0 = f(0.0);
        let f_at_zero = if f0.is_finite() {
            f0
        } else {
            let v = f(1e-15);
            if v.is_finite() && v.abs() < 1e6 {
                v
            } else {
                f64::INFINITY
            }
        };
        let (s1, s2) = (f(1e8) / 1e8, f(1e12) / 1e12);
        let slope_at_infinity = if s1.is_finite() && s2.is_finite() && (s2 - s1).abs() <= 1e-3 * s1.abs().max(1.0) {
            s2
        } else {
            f64::INFINITY
        };
        let g = FGenerator { name: name.into(), f: Arc::new(f), f_second: Arc::new(f_second), atoms: vec![], f_at_zero, slope_at_infinity };
        g.validate()?;
        Ok(g)
    }

    /// Adds a point mass `weight·δ(x − at)` to the second derivative.
    pub fn with_atom(mut self, at: f64, weight: f64) -> Result<Self> {
        if !(at > 0.0 && at.is_finite() && weight >= 0.0 && weight.is_finite()) {
            return Err(Error::InvalidGenerator(format!("atom of weight {weight} at {at}")));
        }
        self.atoms.push((at, weight));
        Ok(self)
    }

    /// Looks up a built-in generator: `kl`, `tv` (or `total_variation`),
    /// `chi2`, or `hockey_stick:<γ₀>`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "kl" => Ok(Self::kl()),
            "tv" | "total_variation" => Ok(Self::total_variation()),
            "chi2" => Ok(Self::chi2()),
            _ => match name.strip_prefix("hockey_stick:").or_else(|| name.strip_prefix("hs:")) {
                Some(g) => Self::hockey_stick(g.parse().map_err(|_| Error::InvalidGenerator(format!("bad gamma0 in {name:?}")))?),
                None => Err(Error::InvalidGenerator(format!("unknown generator {name:?}"))),
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let at_one = (self.f)(1.0);
        if !(at_one.abs() <= 1e-12) {
            return Err(Error::InvalidGenerator(format!("{}: f(1) = {at_one}, expected 0", self.name)));
        }
        for k in 0..100 {
            let x = 10f64.powf(-3.0 + 6.0 * k as f64 / 99.0);
            let s = (self.f_second)(x);
            if !(s >= -1e-9) {
                return Err(Error::InvalidGenerator(format!("{}: f''({x}) = {s} (not convex)", self.name)));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn f_second(&self, x: f64) -> f64 {
        (self.f_second)(x)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn f_at_zero(&self) -> f64 {
        self.f_at_zero
    }

    pub fn slope_at_infinity(&self) -> f64 {
        self.slope_at_infinity
    }
}

/// Adaptive Simpson quadrature on `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    // A few uniform splits first, so the initial estimate cannot be fooled
    // by a symmetric integrand.
    const PIECES: usize = 8;
    let h = (b - a) / PIECES as f64;
    let mut total = 0.0;
    let mut evals = 0usize;
    for i in 0..PIECES {
        let (x0, x1) = (a + h * i as f64, if i + 1 == PIECES { b } else { a + h * (i + 1) as f64 });
        let xm = 0.5 * (x0 + x1);
        let (f0, fm, f1) = (f(x0)?, f(xm)?, f(x1)?);
        let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += simpson_step(f, x0, x1, f0, fm, f1, whole, tol / PIECES as f64, 50, &mut evals)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    *evals += 2;
    if !(flm.is_finite() && frm.is_finite()) {
        return Err(Error::QuadratureFailure(format!("integrand is not finite near {m}")));
    }
    if *evals > 4_000_000 {
        return Err(Error::QuadratureFailure("evaluation budget exhausted".into()));
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureFailure(format!("no convergence on [{a}, {b}]")));
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals)?)
}

/// Smallest lower cutoff used for tails mapped onto `u = 1/γ ∈ (0, 1/L]`.
const TAIL_U_MIN: f64 = 1e-12;

/// `D_f(ρ‖σ) = ∫₁^∞ f''(γ)E_γ(ρ‖σ) + γ⁻³f''(γ⁻¹)E_γ(σ‖ρ) dγ`, plus the
/// contributions of the point masses of `f''`.
///
/// The integrand vanishes beyond `max{e^{D_max(ρ‖σ)}, e^{D_max(σ‖ρ)}}`.
/// With mismatched supports one term has an unbounded range; it is
/// integrated over `u = 1/γ` when `f` has the matching finite limit and
/// reported as [`Error::Divergent`] otherwise.
pub fn f_divergence(rho: &DensityOperator, sigma: &DensityOperator, gen: &FGenerator, quad_tol: f64) -> Result<f64> {
    same_dim(rho, sigma)?;
    if !(quad_tol > 0.0) {
        return Err(Error::BadParameter(format!("quadrature tolerance must be positive, got {quad_tol}")));
    }
    let (r, s) = (rho.op(), sigma.op());
    let forward = relative_spectrum(r, s)?; // eigenvalues μ of σ^{-1/2}ρσ^{-1/2}
    let backward = relative_spectrum(s, r)?;
    if forward.is_none() && gen.slope_at_infinity.is_infinite() {
        return Err(Error::Divergent);
    }
    if backward.is_none() && gen.f_at_zero.is_infinite() {
        return Err(Error::Divergent);
    }

    // Kinks of γ ↦ E_γ(ρ‖σ) sit at the μ, those of E_γ(σ‖ρ) at 1/μ.
    let mut kinks: Vec<f64> = Vec::new();
    for mu in [&forward, &backward].into_iter().flatten() {
        for &m in mu.iter().filter(|&&m| m > EIG_TOL) {
            kinks.push(m);
            kinks.push(1.0 / m);
        }
    }
    let e_fwd = |g: f64| hs_unchecked(r, s, g);
    let e_bwd = |g: f64| hs_unchecked(s, r, g);

    let a_cut = forward.as_ref().map(|mu| mu.last().copied().unwrap_or(1.0).max(1.0));
    let b_cut = backward.as_ref().map(|nu| nu.last().copied().unwrap_or(1.0).max(1.0));
    let finite_cut = a_cut.unwrap_or(1.0).max(b_cut.unwrap_or(1.0));
    let infinite_side = a_cut.is_none() || b_cut.is_none();
    let upper = if infinite_side {
        kinks.iter().copied().filter(|k| k.is_finite()).fold(finite_cut.max(2.0), f64::max)
    } else {
        finite_cut
    };

    let mut points = vec![1.0];
    kinks.sort_by(f64::total_cmp);
    for k in kinks {
        if k > 1.0 + 1e-12 && k < upper - 1e-12 && k > points.last().unwrap() + 1e-12 {
            points.push(k);
        }
    }
    points.push(upper);

    let integrand = |g: f64| -> Result<f64> {
        let mut v = 0.0;
        let c1 = gen.f_second(g);
        if c1 != 0.0 {
            v += c1 * e_fwd(g)?;
        }
        let c2 = gen.f_second(1.0 / g) / (g * g * g);
        if c2 != 0.0 {
            v += c2 * e_bwd(g)?;
        }
        Ok(v)
    };

    let pieces = points.len() - 1 + usize::from(infinite_side);
    let tol = quad_tol / pieces.max(1) as f64;
    let mut total = 0.0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            total += adaptive_simpson(&integrand, w[0], w[1], tol)?;
        }
    }
    if infinite_side {
        // γ = 1/u on [upper, ∞): only the unbounded term survives there.
        let tail = |u: f64| -> Result<f64> {
            let g = 1.0 / u;
            let mut v = 0.0;
            if a_cut.is_none() {
                let c = gen.f_second(g) / (u * u);
                if c != 0.0 {
                    v += c * e_fwd(g)?;
                }
            }
            if b_cut.is_none() {
                let c = u * gen.f_second(u);
                if c != 0.0 {
                    v += c * e_bwd(g)?;
                }
            }
            Ok(v)
        };
        total += adaptive_simpson(&tail, TAIL_U_MIN, 1.0 / upper, tol)?;
    }

    for &(x0, w) in &gen.atoms {
        if (x0 - 1.0).abs() <= 1e-15 {
            total += w * hs_unchecked(r, s, 1.0)?;
        } else if x0 > 1.0 {
            total += w * e_fwd(x0)?;
        } else {
            total += w * x0 * e_bwd(1.0 / x0)?;
        }
    }
    Ok(total.max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Bisection,
    Quadrature,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::Bisection => "bisection",
            Method::Quadrature => "quadrature",
        })
    }
}

/// A divergence value together with the way it was obtained. `value` is
/// `+∞` only for quantities that are genuinely infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivergenceValue {
    pub value: f64,
    pub method: Method,
}

/// Which divergence [`evaluate`] should compute.
#[derive(Clone, Debug)]
pub enum Divergence {
    HockeyStick { gamma: f64 },
    TraceDistance,
    DMax,
    SmoothDMax { delta: f64 },
    F { generator: FGenerator, quad_tol: f64 },
}

pub fn evaluate(which: &Divergence, rho: &DensityOperator, sigma: &DensityOperator) -> Result<DivergenceValue> {
    let (value, method) = match which {
        Divergence::HockeyStick { gamma } => (hs_divergence(rho, sigma, *gamma)?, Method::ClosedForm),
        Divergence::TraceDistance => (trace_distance(rho, sigma)?, Method::ClosedForm),
        Divergence::DMax => (d_max(rho, sigma)?, Method::ClosedForm),
        Divergence::SmoothDMax { delta } => match smooth_d_max(rho, sigma, *delta) {
            Err(Error::Infinite) => (f64::INFINITY, Method::Bisection),
            other => (other?, Method::Bisection),
        },
        Divergence::F { generator, quad_tol } => match f_divergence(rho, sigma, generator, *quad_tol) {
            Err(Error::Divergent) => (f64::INFINITY, Method::Quadrature),
            other => (other?, Method::Quadrature),
        },
    };
    Ok(DivergenceValue { value, method })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::achievability_channel;
    use crate::state::PureState;
    use crate::C64;
    use approx::assert_abs_diff_eq;

    fn pair() -> (DensityOperator, DensityOperator) {
        (DensityOperator::diag(&[0.6, 0.4]).unwrap(), DensityOperator::diag(&[0.3, 0.7]).unwrap())
    }

    fn kets() -> (DensityOperator, DensityOperator) {
        (DensityOperator::basis(2, 0), DensityOperator::basis(2, 1))
    }

    #[test]
    fn hockey_stick_examples() {
        let (rho, sigma) = pair();
        assert_eq!(hs_divergence(&rho, &rho, 2.0).unwrap(), 0.0);
        let (z, o) = kets();
        assert_abs_diff_eq!(hs_divergence(&z, &o, 3.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hs_divergence(&rho, &sigma, 1.5).unwrap(), 0.15, epsilon = 1e-15);
        assert!(matches!(hs_divergence(&rho, &DensityOperator::maximally_mixed(3), 1.0), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn e1_is_trace_distance_on_qubits() {
        let psi = PureState::normalized(vec![C64::new(1.0, 0.0), C64::new(0.2, 0.7)]).unwrap().density();
        let rho = psi.mix(&DensityOperator::maximally_mixed(2), 0.8).unwrap();
        let sigma = DensityOperator::diag(&[0.25, 0.75]).unwrap();
        // ½‖ρ−σ‖₁ for a traceless 2×2 difference is √(det) of its magnitude
        let m = rho.matrix() - sigma.matrix();
        let half_norm = (m[(0, 0)].re * m[(0, 0)].re + m[(0, 1)].norm_sqr()).sqrt();
        assert_abs_diff_eq!(hs_divergence(&rho, &sigma, 1.0).unwrap(), half_norm, epsilon = 1e-14);
        assert_abs_diff_eq!(trace_distance(&rho, &sigma).unwrap(), half_norm, epsilon = 1e-14);
    }

    #[test]
    fn classical_examples() {
        assert_eq!(hs_classical(&[0.2, 0.8], &[0.2, 0.8], 1.0).unwrap(), 0.0);
        assert_eq!(hs_classical(&[1.0, 0.0], &[0.0, 1.0], 2.0).unwrap(), 1.0);
        assert_abs_diff_eq!(hs_classical(&[0.6, 0.4], &[0.3, 0.7], 1.5).unwrap(), 0.15, epsilon = 1e-15);
        assert!(hs_classical(&[1.0], &[0.5, 0.5], 1.0).is_err());
        assert!(hs_classical(&[0.5, 0.5], &[0.5, 0.5], 0.5).is_err());
    }

    #[test]
    fn trace_distance_and_symmetrized() {
        let (rho, sigma) = pair();
        assert_eq!(trace_distance(&rho, &rho).unwrap(), 0.0);
        assert_eq!(hs_sym(&rho, &rho, 1.5).unwrap(), 0.0);
        let (z, o) = kets();
        assert_abs_diff_eq!(trace_distance(&z, &o).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hs_sym(&z, &o, 1.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hs_divergence(&sigma, &rho, 1.5).unwrap(), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(hs_sym(&rho, &sigma, 1.5).unwrap(), 0.15, epsilon = 1e-15);
    }

    #[test]
    fn d_max_examples() {
        let (rho, _) = pair();
        assert_abs_diff_eq!(d_max(&rho, &rho).unwrap(), 0.0, epsilon = 1e-14);
        let (z, o) = kets();
        assert_abs_diff_eq!(d_max(&z, &DensityOperator::maximally_mixed(2)).unwrap(), 2f64.ln(), epsilon = 1e-14);
        assert_eq!(d_max(&z, &o).unwrap(), f64::INFINITY);
        assert_abs_diff_eq!(d_max(&z, &z).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn smooth_d_max_examples() {
        let (rho, sigma) = pair();
        assert_eq!(smooth_d_max(&rho, &sigma, 0.3).unwrap(), 0.0);
        assert_eq!(smooth_d_max(&rho, &sigma, 0.5).unwrap(), 0.0);
        let (z, o) = kets();
        assert_eq!(smooth_d_max(&z, &o, 0.5), Err(Error::Infinite));
        assert_abs_diff_eq!(smooth_d_max(&rho, &sigma, 0.06).unwrap(), 1.8f64.ln(), epsilon = 1e-12);
        // δ = 0 recovers D_max
        assert_abs_diff_eq!(smooth_d_max(&rho, &sigma, 0.0).unwrap(), 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn f_divergence_examples() {
        let (rho, sigma) = pair();
        let kl = FGenerator::kl();
        assert_abs_diff_eq!(f_divergence(&rho, &rho, &kl, QUAD_TOL).unwrap(), 0.0, epsilon = 1e-12);
        let want = 0.6 * 2f64.ln() + 0.4 * (4.0f64 / 7.0).ln();
        assert_abs_diff_eq!(want, 0.192042, epsilon = 1e-6);
        assert_abs_diff_eq!(f_divergence(&rho, &sigma, &kl, QUAD_TOL).unwrap(), want, epsilon = 1e-8);
        let tv = FGenerator::total_variation();
        assert_abs_diff_eq!(f_divergence(&rho, &sigma, &tv, QUAD_TOL).unwrap(), 0.3, epsilon = 1e-12);
        let chi = f_divergence(&rho, &sigma, &FGenerator::chi2(), QUAD_TOL).unwrap();
        assert_abs_diff_eq!(chi, 0.36 / 0.3 + 0.16 / 0.7 - 1.0, epsilon = 1e-8);
        let hs = f_divergence(&rho, &sigma, &FGenerator::hockey_stick(1.5).unwrap(), QUAD_TOL).unwrap();
        assert_abs_diff_eq!(hs, 0.15, epsilon = 1e-12);
    }

    #[test]
    fn f_divergence_with_mismatched_supports() {
        let p = DensityOperator::diag(&[0.5, 0.5]).unwrap();
        let q = DensityOperator::diag(&[1.0, 0.0]).unwrap();
        // KL(q‖p) = ln 2 is finite even though p is not dominated by q.
        assert_abs_diff_eq!(f_divergence(&q, &p, &FGenerator::kl(), QUAD_TOL).unwrap(), 2f64.ln(), epsilon = 1e-7);
        assert_eq!(f_divergence(&p, &q, &FGenerator::kl(), QUAD_TOL), Err(Error::Divergent));
        assert_abs_diff_eq!(f_divergence(&p, &q, &FGenerator::total_variation(), QUAD_TOL).unwrap(), 0.5, epsilon = 1e-9);
        let v = evaluate(&Divergence::F { generator: FGenerator::kl(), quad_tol: QUAD_TOL }, &p, &q).unwrap();
        assert_eq!(v.value, f64::INFINITY);
    }

    #[test]
    fn generator_validation() {
        assert!(FGenerator::custom("concave", |x: f64| -(x * x) + 1.0, |_| -2.0).is_err());
        assert!(FGenerator::custom("shifted", |x: f64| x * x, |_| 2.0).is_err());
        let g = FGenerator::custom("squared hellinger", |x: f64| (x.sqrt() - 1.0).powi(2), |x: f64| 0.5 * x.powf(-1.5)).unwrap();
        assert_eq!(g.f_at_zero(), 1.0);
        assert_abs_diff_eq!(g.slope_at_infinity(), 1.0, epsilon = 1e-5);
        assert!(FGenerator::by_name("hockey_stick:2").is_ok());
        assert!(FGenerator::by_name("renyi").is_err());
    }

    #[test]
    fn achievability_output_divergence() {
        let (rho, sigma) = kets();
        let gamma = 4.0;
        let p = 2.0 / (gamma + 1.0);
        let a = achievability_channel(2.0, &rho, &sigma, p).unwrap();
        let e = hs_divergence(&a.apply(&rho).unwrap(), &a.apply(&sigma).unwrap(), 2.0).unwrap();
        assert_abs_diff_eq!(e, 0.4, epsilon = 1e-14);
    }

    #[test]
    fn evaluate_reports_method() {
        let (rho, sigma) = pair();
        let v = evaluate(&Divergence::SmoothDMax { delta: 0.06 }, &rho, &sigma).unwrap();
        assert_eq!(v.method, Method::Bisection);
        let (z, o) = kets();
        assert_eq!(evaluate(&Divergence::SmoothDMax { delta: 0.5 }, &z, &o).unwrap().value, f64::INFINITY);
        assert_eq!(evaluate(&Divergence::DMax, &z, &o).unwrap().method, Method::ClosedForm);
    }
}
