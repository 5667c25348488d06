//! The filtered quasiprobability matrix of a hybrid state.
//!
//! Expanding a hybrid state over coherent dyads and the qubit basis gives a
//! 2×2 matrix-valued quasiprobability P_{n,n'}(α); classical states require
//! vanishing off-diagonals and non-negative diagonals. This module provides
//! the closed-form regularized elements for the dephased cat family, a
//! generic characteristic-function route for arbitrary density operators,
//! phase-space grid evaluation, and the classicality flags.
//!
//! Convention (fixed crate-wide, matching [`crate::filter`]):
//! Φ_{n,n'}(β) = tr[ρ (e^{βâ†}e^{−β∗â} ⊗ |n'⟩⟨n|)] and
//! P_Ω(α) = (1/π²) ∫ d²β Φ(β) Ω(β) e^{αβ∗−α∗β}.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filter::{PhaseSpaceFilter, SincSqFilter};
use crate::fock::{hermitian_eigen, CVec, FockConfig, HybridOperator};
use crate::numeric::{converge_doubling, csinc, gauss_legendre_on, sinc, DiffNorm};
use crate::states::CatParams;

/// 2×2 complex matrix indexed by the qubit labels (n, n').
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[Complex64::new(0.0, 0.0); 2]; 2])
    }

    pub fn entry(&self, n: usize, np: usize) -> Complex64 {
        self.0[n][np]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// max(|P01 − conj(P10)|, |Im P00|, |Im P11|).
    pub fn hermiticity_defect(&self) -> f64 {
        let off = (self.0[0][1] - self.0[1][0].conj()).norm();
        off.max(self.0[0][0].im.abs()).max(self.0[1][1].im.abs())
    }
}

impl DiffNorm for Mat2 {
    fn diff_norm(&self, other: &Self) -> f64 {
        let mut d = 0.0f64;
        for n in 0..2 {
            for np in 0..2 {
                d = d.max((self.0[n][np] - other.0[n][np]).norm());
            }
        }
        d
    }
}

/// Rectangular phase-space lattice α = x + iy. Values are stored row-major
/// with y as the outer (row) index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, nx: usize, y_min: f64, y_max: f64, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidParam("grid needs at least one point per axis".into()));
        }
        if (nx > 1 && x_max <= x_min) || (ny > 1 && y_max <= y_min) {
            return Err(Error::InvalidParam("grid range must be increasing".into()));
        }
        Ok(Self { x_min, x_max, nx, y_min, y_max, ny })
    }

    /// The default working window: x, y ∈ [−3, 3] with 121 points per axis.
    pub fn default_square() -> Self {
        Self::new(-3.0, 3.0, 121, -3.0, 3.0, 121).unwrap()
    }

    /// Single-column grid along x = 0, the cross-section used by the figure
    /// reproduction.
    pub fn cross_section_x0(y_min: f64, y_max: f64, ny: usize) -> Result<Self> {
        Self::new(0.0, 0.0, 1, y_min, y_max, ny)
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            vec![lo]
        } else {
            (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.nx)
    }

    pub fn ys(&self) -> Vec<f64> {
        Self::axis(self.y_min, self.y_max, self.ny)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of (ix, iy); rows scan y.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }
}

/// Per-point filtered quasiprobability matrices over a [`GridSpec`].
#[derive(Debug, Clone)]
pub struct PMatrixGrid {
    pub spec: GridSpec,
    pub values: Vec<Mat2>,
}

impl PMatrixGrid {
    pub fn value(&self, ix: usize, iy: usize) -> &Mat2 {
        &self.values[self.spec.index(ix, iy)]
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        self.values
            .iter()
            .map(Mat2::hermiticity_defect)
            .fold(0.0, f64::max)
    }

    /// Trapezoidal Σ_n ∫ d²α P_{n,n}; approaches 1 on adequately wide grids
    /// (the sinc² tails decay only quadratically, so expect percent-level
    /// deficits on desk-scale windows).
    pub fn trace_integral(&self) -> f64 {
        if self.spec.nx < 2 || self.spec.ny < 2 {
            return f64::NAN;
        }
        let xs = self.spec.xs();
        let ys = self.spec.ys();
        let hx = xs[1] - xs[0];
        let hy = ys[1] - ys[0];
        let mut acc = 0.0;
        for iy in 0..self.spec.ny {
            let wy = if iy == 0 || iy == self.spec.ny - 1 { 0.5 } else { 1.0 };
            for ix in 0..self.spec.nx {
                let wx = if ix == 0 || ix == self.spec.nx - 1 { 0.5 } else { 1.0 };
                acc += wx * wy * self.value(ix, iy).trace().re;
            }
        }
        acc * hx * hy
    }
}

/// Kernel value Ω̃(α) of the supplied filter.
pub fn filter_value(alpha: Complex64, filter: &dyn PhaseSpaceFilter) -> f64 {
    filter.value(alpha)
}

/// Closed-form regularized P matrix of the dephased cat under the sinc²
/// filter. The diagonals are shifted copies of the kernel; the off-diagonal
/// carries the complex-argument sinc² factor evaluated at w(y ± iα₀).
pub fn closed_form_pmatrix(params: &CatParams, alpha: Complex64, filter: &SincSqFilter) -> Mat2 {
    let w = filter.width();
    let a0 = params.alpha0;
    let tau = params.tau();
    let x = alpha.re;
    let y = alpha.im;
    let norm = w * w / (std::f64::consts::PI * std::f64::consts::PI);
    let sy = sinc(w * y);
    let p00 = 0.5 * norm * sinc(w * (x - a0)).powi(2) * sy * sy;
    let p11 = 0.5 * norm * sinc(w * (x + a0)).powi(2) * sy * sy;
    let pre = tau * (-2.0 * a0 * a0).exp() * 0.5 * norm * sinc(w * x).powi(2);
    let up = csinc(Complex64::new(w * y, w * a0));
    let dn = csinc(Complex64::new(w * y, -w * a0));
    let p01 = up * up * pre;
    let p10 = dn * dn * pre;
    Mat2([
        [Complex64::new(p00, 0.0), p01],
        [p10, Complex64::new(p11, 0.0)],
    ])
}

/// Closed-form P matrix over a whole grid.
pub fn closed_form_grid(params: &CatParams, spec: &GridSpec, filter: &SincSqFilter) -> PMatrixGrid {
    let xs = spec.xs();
    let ys = spec.ys();
    let mut values = Vec::with_capacity(spec.len());
    for y in &ys {
        for x in &xs {
            values.push(closed_form_pmatrix(params, Complex64::new(*x, *y), filter));
        }
    }
    PMatrixGrid { spec: *spec, values }
}

/// Spectral decomposition of a density operator with the oscillator
/// components split per qubit label; the working representation for all
/// characteristic-function evaluations.
struct SpectralComponents {
    weights: Vec<f64>,
    /// Oscillator component paired with qubit |0⟩, one per retained eigenvector.
    comp0: Vec<CVec>,
    /// Oscillator component paired with qubit |1⟩.
    comp1: Vec<CVec>,
}

fn spectral_components(rho: &HybridOperator) -> SpectralComponents {
    let (vals, vecs) = hermitian_eigen(&rho.mat);
    let cutoff = 1e-14 * vals.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let d = rho.osc_dim();
    let mut weights = Vec::new();
    let mut comp0 = Vec::new();
    let mut comp1 = Vec::new();
    for (i, &p) in vals.iter().enumerate() {
        if p <= cutoff {
            continue;
        }
        let col = vecs.column(i);
        let mut v0 = CVec::zeros(d);
        let mut v1 = CVec::zeros(d);
        for n in 0..d {
            v0[n] = col[2 * n];
            v1[n] = col[2 * n + 1];
        }
        weights.push(p);
        comp0.push(v0);
        comp1.push(v1);
    }
    SpectralComponents { weights, comp0, comp1 }
}

/// e^{c·â} v. Exact in the truncated space (â is nilpotent); the series is
/// cut early once the running term is negligible.
fn apply_exp_annihilation(c: Complex64, v: &CVec) -> CVec {
    let d = v.len();
    let mut sum = v.clone();
    let mut term = v.clone();
    for k in 1..d {
        let mut next = CVec::zeros(d);
        for n in 0..d - 1 {
            next[n] = term[n + 1] * ((n + 1) as f64).sqrt();
        }
        term = next * (c / k as f64);
        let t = term.norm();
        sum += &term;
        if t < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

/// e^{c·â†} v, same scheme as the annihilation series.
fn apply_exp_creation(c: Complex64, v: &CVec) -> CVec {
    let d = v.len();
    let mut sum = v.clone();
    let mut term = v.clone();
    for k in 1..d {
        let mut next = CVec::zeros(d);
        for n in 0..d - 1 {
            next[n + 1] = term[n] * ((n + 1) as f64).sqrt();
        }
        term = next * (c / k as f64);
        let t = term.norm();
        sum += &term;
        if t < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

/// Φ entries at one β given the spectral form:
/// Φ_{q,q'} = Σ_r p_r ⟨e^{β̄â} ψ_r^{(q')} | e^{−β̄â} ψ_r^{(q)}⟩.
fn char_entries(sc: &SpectralComponents, beta: Complex64) -> Mat2 {
    let bc = beta.conj();
    let mut out = Mat2::zero();
    let series = |v: &CVec, sign: f64| -> Option<CVec> {
        // block-diagonal states have exactly-zero components; skip those
        if v.norm_squared() == 0.0 {
            None
        } else {
            Some(apply_exp_annihilation(bc * sign, v))
        }
    };
    for r in 0..sc.weights.len() {
        let p = Complex64::new(sc.weights[r], 0.0);
        let a0 = series(&sc.comp0[r], -1.0);
        let a1 = series(&sc.comp1[r], -1.0);
        let b0 = series(&sc.comp0[r], 1.0);
        let b1 = series(&sc.comp1[r], 1.0);
        // Φ_{q,q'} pairs bra-component q' with ket-component q
        if let (Some(b), Some(a)) = (&b0, &a0) {
            out.0[0][0] += p * b.dotc(a);
        }
        if let (Some(b), Some(a)) = (&b1, &a0) {
            out.0[0][1] += p * b.dotc(a);
        }
        if let (Some(b), Some(a)) = (&b0, &a1) {
            out.0[1][0] += p * b.dotc(a);
        }
        if let (Some(b), Some(a)) = (&b1, &a1) {
            out.0[1][1] += p * b.dotc(a);
        }
    }
    out
}

/// How far the truncated displacement e^{−|β|²/2} e^{βâ†} e^{−β∗â} falls
/// short of unitarity on the retained components.
fn displacement_deficit(sc: &SpectralComponents, beta: Complex64) -> f64 {
    let bc = beta.conj();
    let damp = (-0.5 * beta.norm_sqr()).exp();
    let mut worst = 0.0f64;
    for r in 0..sc.weights.len() {
        if sc.weights[r] < 1e-6 {
            continue;
        }
        for v in [&sc.comp0[r], &sc.comp1[r]] {
            let n = v.norm();
            if n < 1e-9 {
                continue;
            }
            let moved = apply_exp_creation(beta, &apply_exp_annihilation(-bc, v));
            worst = worst.max((moved.norm() * damp / n - 1.0).abs());
        }
    }
    worst
}

/// Normally-ordered characteristic matrix
/// Φ_{n,n'}(β) = tr[ρ (e^{βâ†}e^{−β∗â} ⊗ |n'⟩⟨n|)].
///
/// Errs when the displacement by β is no longer faithful at the configured
/// truncation (unitarity deficit beyond `cfg.tol`).
pub fn characteristic_matrix(
    rho: &HybridOperator,
    beta: Complex64,
    cfg: &FockConfig,
) -> Result<Mat2> {
    if !rho.is_density() {
        return Err(Error::NotDensity(
            "characteristic matrix requires a density operator".into(),
        ));
    }
    let sc = spectral_components(rho);
    let deficit = displacement_deficit(&sc, beta);
    if deficit > cfg.tol {
        return Err(Error::AccuracyLoss(format!(
            "displacement by |beta| = {:.3} loses unitarity ({:.2e}) at n_max = {}",
            beta.norm(),
            deficit,
            cfg.n_max
        )));
    }
    Ok(char_entries(&sc, beta))
}

/// Per-axis quadrature nodes over the filter support [−hw, hw], split at the
/// origin where the triangular hat has a kink.
fn support_nodes(n_axis: usize, hw: f64) -> (Vec<f64>, Vec<f64>) {
    let half = (n_axis / 2).max(1);
    let (mut x, mut w) = gauss_legendre_on(half, -hw, 0.0);
    let (xr, wr) = gauss_legendre_on(half, 0.0, hw);
    x.extend(xr);
    w.extend(wr);
    (x, w)
}

/// Filtered quasiprobability on a grid by tensor Gauss–Legendre quadrature
/// of the characteristic function against the filter transform:
/// P_Ω(α) = (1/π²) ∫ d²β Φ(β) Ω(β) e^{2i(y·Re β − x·Im β)}.
///
/// Nodes start at 64 per axis and double until two successive levels agree
/// below 1e-6 at every grid point and matrix entry. The evaluation order is
/// fixed, so results do not depend on the degree of parallelism.
pub fn numeric_pmatrix(
    rho: &HybridOperator,
    spec: &GridSpec,
    filter: &dyn PhaseSpaceFilter,
    cfg: &FockConfig,
) -> Result<PMatrixGrid> {
    if !rho.is_density() {
        return Err(Error::NotDensity("P matrix requires a density operator".into()));
    }
    let sc = spectral_components(rho);
    let hw = filter.support_halfwidth();
    // Corner of the support box bounds |β| over all quadrature nodes. The
    // 1e-6 threshold matches the quadrature convergence target rather than
    // cfg.tol: percent-of-target accuracy loss is already flagged.
    let deficit = displacement_deficit(&sc, Complex64::new(hw, hw));
    if deficit > 1e-6 {
        return Err(Error::AccuracyLoss(format!(
            "filter support |beta| up to {:.3} loses unitarity ({:.2e}) at n_max = {}; \
             raise n_max or shrink the filter width",
            hw * std::f64::consts::SQRT_2,
            deficit,
            cfg.n_max
        )));
    }
    let xs = spec.xs();
    let ys = spec.ys();

    let eval = |n_axis: usize| -> Vec<Mat2> {
        let (u, wu) = support_nodes(n_axis, hw);
        let (v, wv) = support_nodes(n_axis, hw);
        let nb = u.len();
        // characteristic table Φ(β)·Ω(β)·weights over the node lattice
        let table: Vec<Mat2> = (0..nb * nb)
            .into_par_iter()
            .map(|idx| {
                let j = idx / nb;
                let k = idx % nb;
                let beta = Complex64::new(u[j], v[k]);
                let omega = filter.transform(beta);
                let phi = char_entries(&sc, beta);
                let scale = omega * (wu[j] * wv[k]);
                let mut m = Mat2::zero();
                for a in 0..2 {
                    for b in 0..2 {
                        m.0[a][b] = phi.0[a][b] * scale;
                    }
                }
                m
            })
            .collect();
        // inner sums over v for every x: S[j][a] = Σ_k table(j,k) e^{−2i x v_k}
        let inner: Vec<Vec<Mat2>> = (0..nb)
            .into_par_iter()
            .map(|j| {
                xs.iter()
                    .map(|x| {
                        let mut s = Mat2::zero();
                        for k in 0..nb {
                            let ph = Complex64::new(0.0, -2.0 * x * v[k]).exp();
                            let t = &table[j * nb + k];
                            for a in 0..2 {
                                for b in 0..2 {
                                    s.0[a][b] += t.0[a][b] * ph;
                                }
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        // outer sums over u for every (x, y)
        let inv_pi2 = 1.0 / (std::f64::consts::PI * std::f64::consts::PI);
        let rows: Vec<Vec<Mat2>> = ys
            .par_iter()
            .map(|y| {
                let phases: Vec<Complex64> = u
                    .iter()
                    .map(|uj| Complex64::new(0.0, 2.0 * y * uj).exp())
                    .collect();
                xs.iter()
                    .enumerate()
                    .map(|(a_idx, _)| {
                        let mut p = Mat2::zero();
                        for j in 0..nb {
                            let s = &inner[j][a_idx];
                            for a in 0..2 {
                                for b in 0..2 {
                                    p.0[a][b] += s.0[a][b] * phases[j];
                                }
                            }
                        }
                        for a in 0..2 {
                            for b in 0..2 {
                                p.0[a][b] *= inv_pi2;
                            }
                        }
                        p
                    })
                    .collect()
            })
            .collect();
        rows.into_iter().flatten().collect()
    };

    let (values, _) = converge_doubling(64, 512, 1e-6, eval)?;
    Ok(PMatrixGrid { spec: *spec, values })
}

/// Classicality report for a P-matrix grid: any off-diagonal beyond `tol`
/// or any diagonal dipping below −`tol` flags the corresponding
/// nonclassicality, with the worst offending grid point as a witness.
#[derive(Debug, Clone)]
pub struct ClassicalityFlags {
    /// Worst |P₀₁| offender, present when qubit-type coherence was found.
    pub offdiag_nonzero: Option<(Complex64, Complex64)>,
    /// Most negative P₀₀, present when it drops below −tol.
    pub diag0_negative: Option<(Complex64, f64)>,
    /// Most negative P₁₁.
    pub diag1_negative: Option<(Complex64, f64)>,
}

impl ClassicalityFlags {
    /// No flag raised: consistent with a classical hybrid state on the
    /// inspected grid.
    pub fn classical(&self) -> bool {
        self.offdiag_nonzero.is_none()
            && self.diag0_negative.is_none()
            && self.diag1_negative.is_none()
    }
}

pub fn classicality_flags(grid: &PMatrixGrid, tol: f64) -> ClassicalityFlags {
    let xs = grid.spec.xs();
    let ys = grid.spec.ys();
    let mut worst_off: Option<(Complex64, Complex64)> = None;
    let mut worst_d0: Option<(Complex64, f64)> = None;
    let mut worst_d1: Option<(Complex64, f64)> = None;
    for (iy, y) in ys.iter().enumerate() {
        for (ix, x) in xs.iter().enumerate() {
            let alpha = Complex64::new(*x, *y);
            let m = grid.value(ix, iy);
            let off = m.entry(0, 1);
            if off.norm() > tol && worst_off.map_or(true, |(_, v)| off.norm() > v.norm()) {
                worst_off = Some((alpha, off));
            }
            let d0 = m.entry(0, 0).re;
            if d0 < -tol && worst_d0.map_or(true, |(_, v)| d0 < v) {
                worst_d0 = Some((alpha, d0));
            }
            let d1 = m.entry(1, 1).re;
            if d1 < -tol && worst_d1.map_or(true, |(_, v)| d1 < v) {
                worst_d1 = Some((alpha, d1));
            }
        }
    }
    ClassicalityFlags {
        offdiag_nonzero: worst_off,
        diag0_negative: worst_d0,
        diag1_negative: worst_d1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::PhaseSpaceFilter;
    use crate::fock::{trace_out, QubitBasis, Subsystem};
    use crate::states::{
        classical_product, dephased_cat, example_state, CatParams, ExampleState, Sigma,
    };
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fig_params() -> CatParams {
        CatParams::dephased(1.0, Sigma::Finite(0.5)).unwrap()
    }

    #[test]
    fn closed_form_off_diagonal_at_origin() {
        let f = SincSqFilter::new(1.5).unwrap();
        let m = closed_form_pmatrix(&fig_params(), c(0.0, 0.0), &f);
        // τ e^{-2}/2 · (w²/π²) · (sinh(wα₀)/(wα₀))² evaluated exactly
        assert_abs_diff_eq!(m.entry(0, 1).re, 0.027_432_147_819_307_0, epsilon = 1e-13);
        assert_abs_diff_eq!(m.entry(0, 1).im, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.hermiticity_defect(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_diagonal_peak() {
        let f = SincSqFilter::new(1.5).unwrap();
        let m = closed_form_pmatrix(&fig_params(), c(1.0, 0.0), &f);
        let expect = 1.5 * 1.5 / (2.0 * std::f64::consts::PI.powi(2));
        assert_abs_diff_eq!(m.entry(0, 0).re, expect, epsilon = 1e-14);
    }

    #[test]
    fn fully_dephased_closed_form_has_zero_off_diagonal() {
        let f = SincSqFilter::new(1.5).unwrap();
        let params = CatParams::dephased(1.0, Sigma::Infinite).unwrap();
        for y in [-2.0, 0.0, 0.7] {
            let m = closed_form_pmatrix(&params, c(0.3, y), &f);
            assert_eq!(m.entry(0, 1).norm(), 0.0);
            assert_eq!(m.entry(1, 0).norm(), 0.0);
        }
    }

    #[test]
    fn characteristic_at_zero_is_reduced_qubit_state() {
        let cfg = FockConfig::default();
        let rho = dephased_cat(&fig_params(), &cfg).unwrap();
        let phi = characteristic_matrix(&rho, c(0.0, 0.0), &cfg).unwrap();
        let red = trace_out(&rho, Subsystem::Oscillator).unwrap();
        for q in 0..2 {
            for qp in 0..2 {
                assert!((phi.entry(q, qp) - red[(q, qp)]).norm() < 1e-12);
            }
        }
        assert_abs_diff_eq!(phi.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn vacuum_characteristic_is_flat() {
        let cfg = FockConfig::default();
        let rho = classical_product(c(0.0, 0.0), QubitBasis::Zero, &cfg)
            .unwrap()
            .dyad(cfg.tol)
            .unwrap();
        for beta in [c(0.5, 0.0), c(0.0, 1.5), c(-1.0, 2.0)] {
            let phi = characteristic_matrix(&rho, beta, &cfg).unwrap();
            assert!((phi.entry(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
            assert!(phi.entry(1, 1).norm() < 1e-14);
        }
    }

    #[test]
    fn coherent_characteristic_is_a_pure_phase() {
        let cfg = FockConfig::default();
        let alpha = c(0.8, 0.0);
        let rho = classical_product(alpha, QubitBasis::Zero, &cfg)
            .unwrap()
            .dyad(cfg.tol)
            .unwrap();
        for beta in [c(0.4, 0.3), c(-1.0, 0.9)] {
            let phi = characteristic_matrix(&rho, beta, &cfg).unwrap();
            let expect = (beta * alpha.conj() - beta.conj() * alpha).exp();
            assert!((phi.entry(0, 0) - expect).norm() < 1e-10);
            assert_abs_diff_eq!(phi.entry(0, 0).norm(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn characteristic_guards_against_large_displacement() {
        let cfg = FockConfig::default();
        let rho = classical_product(c(2.0, 0.0), QubitBasis::Zero, &cfg)
            .unwrap()
            .dyad(cfg.tol)
            .unwrap();
        let err = characteristic_matrix(&rho, c(6.0, 0.0), &cfg).unwrap_err();
        assert!(matches!(err, Error::AccuracyLoss(_)));
    }

    #[test]
    fn numeric_matches_closed_form_on_a_small_grid() {
        let cfg = FockConfig::default();
        let f = SincSqFilter::new(1.5).unwrap();
        let params = fig_params();
        let rho = dephased_cat(&params, &cfg).unwrap();
        let spec = GridSpec::new(-2.0, 2.0, 9, -2.0, 2.0, 9).unwrap();
        let num = numeric_pmatrix(&rho, &spec, &f, &cfg).unwrap();
        let cf = closed_form_grid(&params, &spec, &f);
        let dev = num
            .values
            .iter()
            .zip(&cf.values)
            .map(|(a, b)| a.diff_norm(b))
            .fold(0.0, f64::max);
        assert!(dev < 1e-4, "max deviation {dev:e}");
        assert!(num.max_hermiticity_defect() < 1e-10);
    }

    #[test]
    fn classical_product_pmatrix_is_the_translated_kernel() {
        let cfg = FockConfig::default();
        let f = SincSqFilter::new(1.5).unwrap();
        let center = c(0.5, -0.3);
        let rho = classical_product(center, QubitBasis::Zero, &cfg)
            .unwrap()
            .dyad(cfg.tol)
            .unwrap();
        let spec = GridSpec::new(-1.5, 1.5, 7, -1.5, 1.5, 7).unwrap();
        let grid = numeric_pmatrix(&rho, &spec, &f, &cfg).unwrap();
        let xs = spec.xs();
        let ys = spec.ys();
        for (iy, y) in ys.iter().enumerate() {
            for (ix, x) in xs.iter().enumerate() {
                let m = grid.value(ix, iy);
                let expect = f.value(c(*x, *y) - center);
                assert!((m.entry(0, 0).re - expect).abs() < 1e-6);
                assert!(m.entry(0, 0).re > -1e-10);
                assert!(m.entry(1, 1).norm() < 1e-10);
                assert!(m.entry(0, 1).norm() < 1e-10);
            }
        }
        let flags = classicality_flags(&grid, 1e-6);
        assert!(flags.classical());
    }

    #[test]
    fn fully_dephased_cat_is_flagged_classical() {
        let cfg = FockConfig::default();
        let f = SincSqFilter::new(1.5).unwrap();
        let params = CatParams::dephased(1.0, Sigma::Infinite).unwrap();
        let rho = dephased_cat(&params, &cfg).unwrap();
        let spec = GridSpec::new(-2.0, 2.0, 9, -2.0, 2.0, 9).unwrap();
        let grid = numeric_pmatrix(&rho, &spec, &f, &cfg).unwrap();
        assert!(classicality_flags(&grid, 1e-6).classical());
    }

    #[test]
    fn dephased_cat_raises_the_coherence_flag() {
        let cfg = FockConfig::default();
        let f = SincSqFilter::new(1.5).unwrap();
        let rho = dephased_cat(&fig_params(), &cfg).unwrap();
        let spec = GridSpec::cross_section_x0(-2.0, 2.0, 21).unwrap();
        let grid = numeric_pmatrix(&rho, &spec, &f, &cfg).unwrap();
        let flags = classicality_flags(&grid, 1e-6);
        assert!(flags.offdiag_nonzero.is_some());
        assert!(flags.diag0_negative.is_none());
        assert!(flags.diag1_negative.is_none());
    }

    #[test]
    fn even_cat_diagonal_goes_negative() {
        let cfg = FockConfig::default();
        let f = SincSqFilter::new(1.5).unwrap();
        let phi = example_state(ExampleState::EvenCatProduct, c(1.0, 0.0), &cfg).unwrap();
        let rho = phi.dyad(cfg.tol).unwrap();
        let spec = GridSpec::cross_section_x0(-3.0, 3.0, 61).unwrap();
        let grid = numeric_pmatrix(&rho, &spec, &f, &cfg).unwrap();
        let min_diag = grid
            .values
            .iter()
            .map(|m| m.entry(0, 0).re)
            .fold(f64::INFINITY, f64::min);
        assert!(min_diag < -1e-3, "min diagonal {min_diag:e}");
        let flags = classicality_flags(&grid, 1e-6);
        assert!(flags.diag0_negative.is_some());
    }

    #[test]
    fn qubit_plus_product_has_uniform_positive_entries() {
        let cfg = FockConfig::default();
        let f = SincSqFilter::new(1.5).unwrap();
        let psi = example_state(ExampleState::CoherentPlus, c(0.4, 0.2), &cfg).unwrap();
        let rho = psi.dyad(cfg.tol).unwrap();
        let spec = GridSpec::new(-1.0, 1.0, 5, -1.0, 1.0, 5).unwrap();
        let grid = numeric_pmatrix(&rho, &spec, &f, &cfg).unwrap();
        for m in &grid.values {
            // P00 = P11 = P01 = Ω̃(α−αc)/2 ≥ 0 for this product state
            assert!((m.entry(0, 0).re - m.entry(1, 1).re).abs() < 1e-8);
            assert!((m.entry(0, 1) - m.entry(0, 0)).norm() < 1e-8);
            assert!(m.entry(0, 0).re > -1e-10);
        }
        assert!(!classicality_flags(&grid, 1e-6).classical());
    }

    #[test]
    fn closed_form_trace_integral_near_one_on_wide_window() {
        let f = SincSqFilter::new(1.5).unwrap();
        let spec = GridSpec::new(-25.0, 25.0, 501, -25.0, 25.0, 501).unwrap();
        let grid = closed_form_grid(&fig_params(), &spec, &f);
        let tr = grid.trace_integral();
        assert!((tr - 1.0).abs() < 0.03, "trace integral {tr}");
    }

    #[test]
    fn grid_spec_validation_and_layout() {
        assert!(GridSpec::new(0.0, -1.0, 5, 0.0, 1.0, 5).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0, 0.0, 1.0, 5).is_err());
        let spec = GridSpec::new(0.0, 1.0, 3, 0.0, 2.0, 2).unwrap();
        assert_eq!(spec.xs(), vec![0.0, 0.5, 1.0]);
        assert_eq!(spec.ys(), vec![0.0, 2.0]);
        assert_eq!(spec.index(2, 1), 5);
    }
}
