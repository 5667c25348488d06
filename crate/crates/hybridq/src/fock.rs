//! Truncated-Fock-space linear algebra for the oscillator ⊗ qubit system.
//!
//! The oscillator lives on Fock levels 0..=n_max, the qubit on the fixed
//! basis {|0⟩, |1⟩}. Composite indices are Fock-major, qubit-minor:
//! the amplitude of |n⟩ ⊗ |q⟩ sits at position 2n + q. Every routine here is
//! a pure function of its inputs; values are immutable after construction
//! and freely shareable across threads.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CVec = DVector<Complex64>;
pub type CMat = DMatrix<Complex64>;

/// Truncation and tolerance settings shared by every numeric routine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockConfig {
    /// Highest retained Fock level; the oscillator dimension is n_max + 1.
    pub n_max: usize,
    /// Absolute numerical tolerance for hermiticity/trace/positivity checks.
    pub tol: f64,
}

impl Default for FockConfig {
    fn default() -> Self {
        // n_max = 40 keeps the Poisson tail of every guarded amplitude
        // below 1e-12
        Self { n_max: 40, tol: 1e-9 }
    }
}

impl FockConfig {
    pub fn new(n_max: usize, tol: f64) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParam("n_max must be at least 1".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParam("tol must be positive".into()));
        }
        Ok(Self { n_max, tol })
    }

    pub fn osc_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn hybrid_dim(&self) -> usize {
        2 * self.osc_dim()
    }

    /// Truncation-adequacy guard: |α|² ≤ n_max/4. A hard error by design;
    /// silently truncating a too-large amplitude would corrupt every
    /// closed-form comparison downstream.
    pub fn amplitude_guard(&self, alpha: Complex64) -> Result<()> {
        let limit = self.n_max as f64 / 4.0;
        let alpha_sq = alpha.norm_sqr();
        if alpha_sq > limit {
            Err(Error::AmplitudeTooLarge { alpha_sq, limit })
        } else {
            Ok(())
        }
    }
}

/// Computational-basis label of the qubit factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitBasis {
    Zero,
    One,
}

impl QubitBasis {
    pub fn index(self) -> usize {
        match self {
            QubitBasis::Zero => 0,
            QubitBasis::One => 1,
        }
    }
}

/// Which tensor factor an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Oscillator,
    Qubit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Density,
    Observable,
    General,
}

/// Pure state on the oscillator ⊗ qubit space.
#[derive(Debug, Clone)]
pub struct HybridVector {
    pub amps: CVec,
}

impl HybridVector {
    pub fn new(amps: CVec) -> Result<Self> {
        if amps.len() < 4 || amps.len() % 2 != 0 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: amps.len(),
            });
        }
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn osc_dim(&self) -> usize {
        self.amps.len() / 2
    }

    /// Amplitude of |n⟩ ⊗ |q⟩.
    pub fn amp(&self, n: usize, q: QubitBasis) -> Complex64 {
        self.amps[2 * n + q.index()]
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.amps /= Complex64::new(n, 0.0);
        }
        self
    }

    /// |v⟩⟨v| as a density operator. The dyad of a unit vector is hermitian,
    /// PSD and trace-1 by construction, so only the norm is checked.
    pub fn dyad(&self, tol: f64) -> Result<HybridOperator> {
        if (self.norm() - 1.0).abs() > tol {
            return Err(Error::NotDensity(format!(
                "dyad of non-normalized vector (norm = {})",
                self.norm()
            )));
        }
        let mat = outer(&self.amps, &self.amps);
        Ok(HybridOperator {
            mat,
            kind: OperatorKind::Density,
        })
    }
}

/// Dense operator on the hybrid space, tagged with the contract it satisfies.
#[derive(Debug, Clone)]
pub struct HybridOperator {
    pub mat: CMat,
    pub kind: OperatorKind,
}

impl HybridOperator {
    fn check_shape(mat: &CMat) -> Result<()> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        if mat.nrows() < 4 || mat.nrows() % 2 != 0 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: mat.nrows(),
            });
        }
        Ok(())
    }

    /// Validates hermiticity, unit trace, and positivity (within `tol`).
    pub fn density(mat: CMat, tol: f64) -> Result<Self> {
        Self::check_shape(&mat)?;
        if !is_hermitian(&mat, tol) {
            return Err(Error::NotDensity("not hermitian within tolerance".into()));
        }
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > tol.max(1e-12) || tr.im.abs() > tol {
            return Err(Error::NotDensity(format!("trace = {tr} is not 1")));
        }
        let lambda_min = min_eigenvalue(&mat);
        if lambda_min < -tol {
            return Err(Error::NotDensity(format!(
                "minimum eigenvalue {lambda_min:e} below -tol"
            )));
        }
        Ok(Self {
            mat,
            kind: OperatorKind::Density,
        })
    }

    pub fn observable(mat: CMat, tol: f64) -> Result<Self> {
        Self::check_shape(&mat)?;
        if !is_hermitian(&mat, tol) {
            return Err(Error::NotObservable("not hermitian within tolerance".into()));
        }
        Ok(Self {
            mat,
            kind: OperatorKind::Observable,
        })
    }

    pub fn general(mat: CMat) -> Result<Self> {
        Self::check_shape(&mat)?;
        Ok(Self {
            mat,
            kind: OperatorKind::General,
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn osc_dim(&self) -> usize {
        self.dim() / 2
    }

    pub fn trace(&self) -> Complex64 {
        trace(&self.mat)
    }

    pub fn is_density(&self) -> bool {
        self.kind == OperatorKind::Density
    }
}

/// ⟨a|b⟩ with the left argument conjugated.
pub fn inner(a: &CVec, b: &CVec) -> Complex64 {
    a.dotc(b)
}

/// |a⟩⟨b|.
pub fn outer(a: &CVec, b: &CVec) -> CMat {
    let mut m = CMat::zeros(a.len(), b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            m[(i, j)] = a[i] * b[j].conj();
        }
    }
    m
}

pub fn trace(m: &CMat) -> Complex64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// tr(a·b) without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Eigen-decomposition of the hermitized part (m + m†)/2 by cyclic complex
/// Jacobi rotations. Returns (eigenvalues ascending, eigenvectors as
/// columns). Unconditionally stable, also on the heavily rank-deficient
/// dyads this crate produces, where QR-based tridiagonalization can break
/// down.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let mut a = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut v = CMat::identity(n, n);
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let mpq = a[(p, q)];
                let mag = mpq.norm();
                if mag <= 1e-18 * scale {
                    continue;
                }
                let phase = mpq / Complex64::new(mag, 0.0);
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]] zeroes the (p,q) entry
                let se_pos = phase * s;
                let se_neg = phase.conj() * s;
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c - aiq * se_neg;
                    a[(i, q)] = aip * se_pos + aiq * c;
                    a[(p, i)] = a[(i, p)].conj();
                    a[(q, i)] = a[(i, q)].conj();
                }
                let new_pp = app * c * c - 2.0 * mag * s * c + aqq * s * s;
                let new_qq = app * s * s + 2.0 * mag * s * c + aqq * c * c;
                a[(p, p)] = Complex64::new(new_pp, 0.0);
                a[(q, q)] = Complex64::new(new_qq, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c - viq * se_neg;
                    v[(i, q)] = vip * se_pos + viq * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let vals: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vecs = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &v.column(i));
    }
    (vals, vecs)
}

/// Smallest eigenvalue of the hermitized matrix; the PSD check used by all
/// density-operator validation.
pub fn min_eigenvalue(m: &CMat) -> f64 {
    let (vals, _) = hermitian_eigen(m);
    vals[0]
}

/// Basis ket of the qubit factor.
pub fn qubit_ket(q: QubitBasis) -> CVec {
    let mut v = CVec::zeros(2);
    v[q.index()] = Complex64::new(1.0, 0.0);
    v
}

/// Pauli σ_x on the qubit factor.
pub fn sigma_x() -> CMat {
    let mut m = CMat::zeros(2, 2);
    m[(0, 1)] = Complex64::new(1.0, 0.0);
    m[(1, 0)] = Complex64::new(1.0, 0.0);
    m
}

/// Truncated coherent state |α⟩ with amplitudes e^{-|α|²/2} αⁿ/√(n!).
///
/// Guarded by |α|² ≤ n_max/4 so the discarded Poisson tail stays below
/// 1e-12 and the vector is normalized to that accuracy.
pub fn coherent_vector(alpha: Complex64, cfg: &FockConfig) -> Result<CVec> {
    cfg.amplitude_guard(alpha)?;
    let mut v = CVec::zeros(cfg.osc_dim());
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    v[0] = c;
    for n in 1..cfg.osc_dim() {
        c *= alpha / Complex64::new((n as f64).sqrt(), 0.0);
        v[n] = c;
    }
    Ok(v)
}

/// (â, â†) on the truncated oscillator space. â|n⟩ = √n |n−1⟩; the commutator
/// [â, â†] equals the identity except in the (n_max, n_max) corner.
pub fn ladder_ops(cfg: &FockConfig) -> (CMat, CMat) {
    let d = cfg.osc_dim();
    let mut a = CMat::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    (a, adag)
}

/// Momentum-like quadrature ŷ = (â − â†)/i; hermitian, vacuum variance 1.
pub fn quadrature_y(cfg: &FockConfig) -> CMat {
    let (a, adag) = ladder_ops(cfg);
    (a - adag) * Complex64::new(0.0, -1.0)
}

/// Kronecker product of an oscillator vector with a qubit vector, in the
/// fixed Fock-major index order.
pub fn tensor_vectors(osc: &CVec, qubit: &CVec) -> Result<HybridVector> {
    if qubit.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: qubit.len(),
        });
    }
    let mut amps = CVec::zeros(2 * osc.len());
    for n in 0..osc.len() {
        for q in 0..2 {
            amps[2 * n + q] = osc[n] * qubit[q];
        }
    }
    HybridVector::new(amps)
}

/// Kronecker product A ⊗ B with B acting on the qubit factor.
pub fn tensor_operators(osc: &CMat, qubit: &CMat) -> Result<CMat> {
    if qubit.nrows() != 2 || qubit.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: qubit.nrows(),
        });
    }
    if osc.nrows() != osc.ncols() {
        return Err(Error::DimensionMismatch {
            expected: osc.nrows(),
            got: osc.ncols(),
        });
    }
    Ok(osc.kronecker(qubit))
}

/// Partial trace of a density operator; traces *out* the named subsystem and
/// returns the reduced density operator on the other one.
pub fn trace_out(rho: &HybridOperator, part: Subsystem) -> Result<CMat> {
    if !rho.is_density() {
        return Err(Error::NotDensity(
            "partial trace requires a density operator".into(),
        ));
    }
    let d = rho.osc_dim();
    match part {
        Subsystem::Oscillator => {
            let mut out = CMat::zeros(2, 2);
            for q in 0..2 {
                for qp in 0..2 {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for n in 0..d {
                        acc += rho.mat[(2 * n + q, 2 * n + qp)];
                    }
                    out[(q, qp)] = acc;
                }
            }
            Ok(out)
        }
        Subsystem::Qubit => {
            let mut out = CMat::zeros(d, d);
            for n in 0..d {
                for m in 0..d {
                    out[(n, m)] = rho.mat[(2 * n, 2 * m)] + rho.mat[(2 * n + 1, 2 * m + 1)];
                }
            }
            Ok(out)
        }
    }
}

/// tr(ρ·obs). Real up to tolerance whenever both operators are hermitian.
pub fn expectation(rho: &HybridOperator, obs: &HybridOperator) -> Result<Complex64> {
    if rho.dim() != obs.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: obs.dim(),
        });
    }
    Ok(trace_product(&rho.mat, &obs.mat))
}

/// Convex mixture Σ wᵢ ρᵢ of density operators.
pub fn mix(components: &[(f64, &HybridOperator)], tol: f64) -> Result<HybridOperator> {
    if components.is_empty() {
        return Err(Error::InvalidParam("empty mixture".into()));
    }
    let wsum: f64 = components.iter().map(|(w, _)| *w).sum();
    if components.iter().any(|(w, _)| *w < 0.0) || (wsum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParam(
            "mixture weights must be non-negative and sum to 1".into(),
        ));
    }
    let dim = components[0].1.dim();
    let mut mat = CMat::zeros(dim, dim);
    for (w, rho) in components {
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: rho.dim(),
            });
        }
        mat += &rho.mat * Complex64::new(*w, 0.0);
    }
    HybridOperator::density(mat, tol)
}
