//! Quantum channels in Kraus form, their Choi operators, composition and
//! fixed points.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::classical::ClassicalChannel;
use crate::error::{Error, Result};
use crate::matrix::{eig_hermitian, right_singular_pairs, ComplexMatrix, HermitianOperator, MatrixFile, C64, ONE, ZERO};
use crate::state::DensityOperator;

/// Tolerance on `‖Σ K†K − I‖_max`.
pub const TP_TOL: f64 = 1e-9;
/// Default cap on the number of Kraus operators produced by [`compose`].
pub const KRAUS_CAP: usize = 4096;
/// Singular values of `T − I` below this count as eigenvalue 1 of the
/// transfer matrix `T`.
pub const FIXED_POINT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumChannel {
    d_in: usize,
    d_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::BadParameter("channel needs at least one Kraus operator".into()))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        if let Some(k) = kraus.iter().find(|k| k.rows() != d_out || k.cols() != d_in) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators must all be {d_out}x{d_in}, found {}x{}",
                k.rows(),
                k.cols()
            )));
        }
        let mut sum = ComplexMatrix::zeros(d_in, d_in);
        for k in &kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(d_in));
        if deviation > TP_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(QuantumChannel { d_in, d_out, kraus })
    }

    pub fn identity(d: usize) -> Self {
        QuantumChannel { d_in: d, d_out: d, kraus: vec![ComplexMatrix::identity(d)] }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// `ρ ↦ Tr[ρ] ω`
    pub fn replacer(d_in: usize, omega: &DensityOperator) -> Result<Self> {
        let spec = eig_hermitian(omega.op())?;
        let d_out = omega.dim();
        let mut kraus = Vec::new();
        for (k, &lambda) in spec.eigenvalues.iter().enumerate() {
            if lambda <= 0.0 {
                continue;
            }
            let v = spec.eigenvector(k);
            for i in 0..d_in {
                kraus.push(ComplexMatrix::from_fn(d_out, d_in, |r, c| if c == i { v[r] * lambda.sqrt() } else { ZERO }));
            }
        }
        Self::new(kraus)
    }

    /// Qubit amplitude damping with decay probability `eta`.
    pub fn amplitude_damping(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::BadParameter(format!("damping {eta} outside [0,1]")));
        }
        let k0 = ComplexMatrix::diag(&[1.0, (1.0 - eta).sqrt()]);
        let k1 = ComplexMatrix::from_real_rows(&[vec![0.0, eta.sqrt()], vec![0.0, 0.0]])?;
        Self::new(vec![k0, k1])
    }

    /// Embeds `W(y|x)` with Kraus operators `√W(y|x) |y⟩⟨x|`.
    pub fn from_classical(w: &ClassicalChannel) -> Self {
        let (nx, ny) = (w.inputs(), w.outputs());
        let mut kraus = Vec::new();
        for x in 0..nx {
            for y in 0..ny {
                let p = w.get(x, y);
                if p > 0.0 {
                    let mut k = ComplexMatrix::zeros(ny, nx);
                    k[(y, x)] = C64::new(p.sqrt(), 0.0);
                    kraus.push(k);
                }
            }
        }
        QuantumChannel { d_in: nx, d_out: ny, kraus }
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `Σ K X K†` for an arbitrary square input.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out = &out + &k.sandwich(x);
        }
        out
    }

    /// Heisenberg picture `Σ K† X K`.
    pub fn apply_adjoint(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            out = &out + &(&(&k.adjoint() * x) * k);
        }
        out
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.d_in {
            return Err(Error::DimensionMismatch(format!("state has dimension {}, channel expects {}", rho.dim(), self.d_in)));
        }
        // Revalidation is looser than for user input: the Kraus set is only
        // trace preserving to TP_TOL.
        DensityOperator::with_tolerances(self.apply_matrix(rho.matrix()).hermitian_part(), 1e-9, 1e-9, 1e-8)
    }

    /// Vectorized superoperator `Σ K ⊗ conj(K)` acting on row-major `vec(ρ)`.
    pub fn transfer_matrix(&self) -> ComplexMatrix {
        let n_out = self.d_out * self.d_out;
        let n_in = self.d_in * self.d_in;
        let mut t = ComplexMatrix::zeros(n_out, n_in);
        for k in &self.kraus {
            t = &t + &k.kron(&k.conj());
        }
        t
    }

    pub fn to_file(&self) -> ChannelFile {
        ChannelFile {
            d_in: self.d_in,
            d_out: self.d_out,
            kraus: self.kraus.iter().map(|k| MatrixFile::from_matrix(k, None)).collect(),
        }
    }

    pub fn from_file(file: ChannelFile) -> Result<Self> {
        let kraus = file.kraus.into_iter().map(MatrixFile::into_matrix).collect::<Result<Vec<_>>>()?;
        let ch = Self::new(kraus)?;
        if ch.d_in != file.d_in || ch.d_out != file.d_out {
            return Err(Error::DimensionMismatch(format!(
                "header says {}->{}, Kraus operators are {}->{}",
                file.d_in, file.d_out, ch.d_in, ch.d_out
            )));
        }
        Ok(ch)
    }
}

/// `{"d_in": n, "d_out": m, "kraus": [matrix, ...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub d_in: usize,
    pub d_out: usize,
    pub kraus: Vec<MatrixFile>,
}

impl Serialize for QuantumChannel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuantumChannel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Self::from_file(ChannelFile::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

pub fn apply_channel(n: &QuantumChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    n.apply(rho)
}

/// `outer ∘ inner`, capped at [`KRAUS_CAP`] Kraus operators.
pub fn compose(outer: &QuantumChannel, inner: &QuantumChannel) -> Result<QuantumChannel> {
    compose_with_cap(outer, inner, KRAUS_CAP)
}

pub fn compose_with_cap(outer: &QuantumChannel, inner: &QuantumChannel, cap: usize) -> Result<QuantumChannel> {
    if inner.d_out != outer.d_in {
        return Err(Error::DimensionMismatch(format!(
            "inner channel outputs dimension {}, outer expects {}",
            inner.d_out, outer.d_in
        )));
    }
    let nonzero = |k: &&ComplexMatrix| k.max_abs() > 0.0;
    let outer_k: Vec<&ComplexMatrix> = outer.kraus.iter().filter(nonzero).collect();
    let inner_k: Vec<&ComplexMatrix> = inner.kraus.iter().filter(nonzero).collect();
    let size = outer_k.len() * inner_k.len();
    if size > cap {
        return Err(Error::KrausExplosion { size, cap });
    }
    let mut kraus = Vec::with_capacity(size);
    for a in &outer_k {
        for b in &inner_k {
            kraus.push(*a * *b);
        }
    }
    QuantumChannel::new(kraus)
}

/// `N^(n)`, the n-fold composition.
pub fn iterate(n_ch: &QuantumChannel, n: usize) -> Result<QuantumChannel> {
    iterate_with_cap(n_ch, n, KRAUS_CAP)
}

pub fn iterate_with_cap(n_ch: &QuantumChannel, n: usize, cap: usize) -> Result<QuantumChannel> {
    if n == 0 {
        return Err(Error::BadParameter("iteration count must be at least 1".into()));
    }
    if n_ch.d_in != n_ch.d_out {
        return Err(Error::DimensionMismatch("only channels with d_in = d_out can be iterated".into()));
    }
    let mut acc = n_ch.clone();
    for _ in 1..n {
        acc = compose_with_cap(n_ch, &acc, cap)?;
    }
    Ok(acc)
}

/// Applies `n` a total of `times` times, without building the composed
/// Kraus set.
pub fn apply_repeated(n: &QuantumChannel, rho: &DensityOperator, times: usize) -> Result<DensityOperator> {
    let mut out = rho.clone();
    for _ in 0..times {
        out = n.apply(&out)?;
    }
    Ok(out)
}

/// Choi operator with the input copy as the first tensor factor.
#[derive(Clone, Debug)]
pub struct ChoiOperator {
    op: HermitianOperator,
    d_in: usize,
    d_out: usize,
}

impl ChoiOperator {
    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// `Tr_B Γ`, which equals `I_A` for a trace-preserving map.
    pub fn partial_trace_output(&self) -> ComplexMatrix {
        let (a, b) = (self.d_in, self.d_out);
        let m = self.op.matrix();
        ComplexMatrix::from_fn(a, a, |i, j| (0..b).map(|k| m[(i * b + k, j * b + k)]).sum())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        crate::matrix::min_eigenvalue(&self.op)
    }
}

/// `Γ = Σ_ij |i⟩⟨j| ⊗ N(|i⟩⟨j|)`
pub fn choi(n: &QuantumChannel) -> ChoiOperator {
    let (a, b) = (n.d_in, n.d_out);
    let mut g = ComplexMatrix::zeros(a * b, a * b);
    for k in &n.kraus {
        for i in 0..a {
            for j in 0..a {
                for r in 0..b {
                    for s in 0..b {
                        g[(i * b + r, j * b + s)] += k[(r, i)] * k[(s, j)].conj();
                    }
                }
            }
        }
    }
    ChoiOperator { op: HermitianOperator::from_hermitian_unchecked(g), d_in: a, d_out: b }
}

/// Generalized Pauli (Weyl) operator `X^a Z^b` on `C^d`.
fn weyl(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let mut w = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let phase = 2.0 * PI * (b * j) as f64 / d as f64;
        w[((j + a) % d, j)] = C64::from_polar(1.0, phase);
    }
    w
}

/// `ρ ↦ (1−p)ρ + p I/d`, with `d²` Weyl Kraus operators.
pub fn depolarizing(d: usize, p: f64) -> Result<QuantumChannel> {
    if d < 2 {
        return Err(Error::BadParameter(format!("depolarizing channel needs d >= 2, got {d}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadParameter(format!("flip parameter {p} outside [0,1]")));
    }
    let d2 = (d * d) as f64;
    let mut kraus = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let weight = if a == 0 && b == 0 { 1.0 - p + p / d2 } else { p / d2 };
            kraus.push(weyl(d, a, b).scale_real(weight.sqrt()));
        }
    }
    QuantumChannel::new(kraus)
}

/// Projector onto the strictly positive eigenspace of `ρ − γ'σ`.
pub fn positive_eigenspace_projector(rho: &DensityOperator, sigma: &DensityOperator, gamma_prime: f64) -> Result<HermitianOperator> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", rho.dim(), sigma.dim())));
    }
    Ok(eig_hermitian(&rho.op().sub_scaled(sigma.op(), gamma_prime))?.projector(|l| l > 0.0))
}

/// Two-outcome measure-and-prepare channel
/// `ω ↦ Tr[Mω]|0⟩⟨0| + (1 − Tr[Mω])|1⟩⟨1|` for a projector `M`.
pub fn measure_prepare(projector: &HermitianOperator) -> Result<QuantumChannel> {
    let spec = eig_hermitian(projector)?;
    let d = projector.dim();
    let kraus = (0..d)
        .map(|k| {
            let v = spec.eigenvector(k);
            let row = if spec.eigenvalues[k] > 0.5 { 0 } else { 1 };
            ComplexMatrix::from_fn(2, d, |r, c| if r == row { v[c].conj() } else { ZERO })
        })
        .collect();
    QuantumChannel::new(kraus)
}

/// Qubit depolarizing noise after the measurement onto the positive
/// eigenspace of `ρ − γ'σ`. The projector is fixed at construction.
pub fn achievability_channel(
    gamma_prime: f64,
    rho: &DensityOperator,
    sigma: &DensityOperator,
    p: f64,
) -> Result<QuantumChannel> {
    if gamma_prime < 1.0 {
        return Err(Error::BadParameter(format!("gamma' must be >= 1, got {gamma_prime}")));
    }
    let m = positive_eigenspace_projector(rho, sigma, gamma_prime)?;
    compose(&depolarizing(2, p)?, &measure_prepare(&m)?)
}

/// The unique fixed point of a channel with `d_in = d_out`.
pub fn fixed_point(n: &QuantumChannel) -> Result<DensityOperator> {
    if n.d_in != n.d_out {
        return Err(Error::DimensionMismatch("fixed point needs d_in = d_out".into()));
    }
    let d = n.d_in;
    let mut a = n.transfer_matrix();
    for i in 0..d * d {
        a[(i, i)] -= ONE;
    }
    let (sv, v) = right_singular_pairs(&a)?;
    let multiplicity = sv.iter().take_while(|&&s| s <= FIXED_POINT_TOL).count();
    if multiplicity > 1 {
        return Err(Error::NonUniqueFixedPoint { multiplicity });
    }
    let x = v.column(0);
    let mut m = ComplexMatrix::from_fn(d, d, |r, c| x[r * d + c]);
    let tr = m.trace();
    if tr.norm() < 1e-12 {
        return Err(Error::NoFixedPointFound { residual: sv[0] });
    }
    m = m.scale(tr.inv()).hermitian_part();
    let sigma = DensityOperator::with_tolerances(m, 1e-9, 1e-8, 1e-9).map_err(|_| Error::NoFixedPointFound { residual: sv[0] })?;
    let residual = n.apply_matrix(sigma.matrix()).max_abs_diff(sigma.matrix());
    if residual > 1e-8 {
        return Err(Error::NoFixedPointFound { residual });
    }
    Ok(sigma)
}
