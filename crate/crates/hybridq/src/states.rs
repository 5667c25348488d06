//! Constructors for the state families under study: classical product
//! states, the three elementary pure examples, and pure/dephased
//! oscillator–qubit cat states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    coherent_vector, outer, qubit_ket, tensor_vectors, CMat, CVec, FockConfig, HybridOperator,
    HybridVector, OperatorKind, QubitBasis,
};
use crate::numeric;

/// Gaussian dephasing strength. Complete dephasing is a distinguished
/// variant rather than a floating-point infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma {
    Finite(f64),
    Infinite,
}

impl Sigma {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma.is_infinite() && sigma > 0.0 {
            return Ok(Sigma::Infinite);
        }
        if !(sigma >= 0.0) || sigma.is_nan() {
            return Err(Error::InvalidParam(format!(
                "dephasing sigma must be >= 0 or infinite, got {sigma}"
            )));
        }
        Ok(Sigma::Finite(sigma))
    }

    /// Coherence survival factor τ_σ = e^{−σ²/2} ∈ [0, 1].
    pub fn tau(&self) -> f64 {
        match self {
            Sigma::Finite(s) => (-0.5 * s * s).exp(),
            Sigma::Infinite => 0.0,
        }
    }
}

/// Parameters of the cat family: coherent amplitude α₀ ≥ 0 (real by
/// definition of the family), dephasing σ, and the relative phase φ of the
/// pure superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatParams {
    pub alpha0: f64,
    pub sigma: Sigma,
    pub phi: f64,
}

impl CatParams {
    pub fn new(alpha0: f64, sigma: Sigma, phi: f64) -> Result<Self> {
        if !(alpha0 >= 0.0) {
            return Err(Error::InvalidParam(format!(
                "cat amplitude must be real and non-negative, got {alpha0}"
            )));
        }
        if !(0.0..std::f64::consts::TAU).contains(&phi) {
            return Err(Error::InvalidParam(format!(
                "phase must lie in [0, 2pi), got {phi}"
            )));
        }
        Ok(Self { alpha0, sigma, phi })
    }

    /// Pure cat (φ kept, σ ignored).
    pub fn pure(alpha0: f64, phi: f64) -> Result<Self> {
        Self::new(alpha0, Sigma::Finite(0.0), phi)
    }

    /// Dephased cat at φ = 0.
    pub fn dephased(alpha0: f64, sigma: Sigma) -> Result<Self> {
        Self::new(alpha0, sigma, 0.0)
    }

    pub fn tau(&self) -> f64 {
        self.sigma.tau()
    }
}

/// Classical product state |α⟩ ⊗ |n⟩.
pub fn classical_product(
    alpha: Complex64,
    n: QubitBasis,
    cfg: &FockConfig,
) -> Result<HybridVector> {
    let osc = coherent_vector(alpha, cfg)?;
    tensor_vectors(&osc, &qubit_ket(n))
}

/// Pure entangled cat (|α₀⟩⊗|0⟩ + e^{iφ}|−α₀⟩⊗|1⟩)/√2.
///
/// The two branches are exactly orthogonal in the qubit factor, so the √2
/// normalization is exact up to the coherent truncation tail.
pub fn cat_pure(params: &CatParams, cfg: &FockConfig) -> Result<HybridVector> {
    let a0 = Complex64::new(params.alpha0, 0.0);
    let plus = coherent_vector(a0, cfg)?;
    let minus = coherent_vector(-a0, cfg)?;
    let phase = Complex64::new(0.0, params.phi).exp();
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut amps = CVec::zeros(cfg.hybrid_dim());
    for n in 0..cfg.osc_dim() {
        amps[2 * n] = plus[n] * inv_sqrt2;
        amps[2 * n + 1] = phase * minus[n] * inv_sqrt2;
    }
    HybridVector::new(amps)
}

/// Phase-averaged cat state, assembled directly from its four coherent
/// dyads with cross weight τ_σ/2.
pub fn dephased_cat(params: &CatParams, cfg: &FockConfig) -> Result<HybridOperator> {
    dephased_cat_with_tau(params.alpha0, Complex64::new(params.tau(), 0.0), cfg)
}

/// Cat state dephased by an arbitrary phase distribution with first Fourier
/// coefficient `tau` (|τ| ≤ 1). The Gaussian case gives real τ = e^{−σ²/2}.
pub fn dephased_cat_with_tau(
    alpha0: f64,
    tau: Complex64,
    cfg: &FockConfig,
) -> Result<HybridOperator> {
    if !(alpha0 >= 0.0) {
        return Err(Error::InvalidParam(
            "cat amplitude must be real and non-negative".into(),
        ));
    }
    if tau.norm() > 1.0 + 1e-12 {
        return Err(Error::InvalidParam(format!(
            "|tau| = {} exceeds 1; not a phase average",
            tau.norm()
        )));
    }
    let a0 = Complex64::new(alpha0, 0.0);
    let plus = coherent_vector(a0, cfg)?;
    let minus = coherent_vector(-a0, cfg)?;
    let d = cfg.osc_dim();
    let half = Complex64::new(0.5, 0.0);
    let mut mat = CMat::zeros(2 * d, 2 * d);
    for n in 0..d {
        for m in 0..d {
            // (n,0)(m,0): |α₀⟩⟨α₀| ⊗ |0⟩⟨0|
            mat[(2 * n, 2 * m)] = half * plus[n] * plus[m].conj();
            // (n,1)(m,1): |−α₀⟩⟨−α₀| ⊗ |1⟩⟨1|
            mat[(2 * n + 1, 2 * m + 1)] = half * minus[n] * minus[m].conj();
            // (n,1)(m,0): τ/2 |−α₀⟩⟨α₀| ⊗ |1⟩⟨0|
            mat[(2 * n + 1, 2 * m)] = half * tau * minus[n] * plus[m].conj();
            // (n,0)(m,1): τ*/2 |α₀⟩⟨−α₀| ⊗ |0⟩⟨1|
            mat[(2 * n, 2 * m + 1)] = half * tau.conj() * plus[n] * minus[m].conj();
        }
    }
    HybridOperator::density(mat, cfg.tol)
}

/// Fully dephased classical mixture ½(|α₀⟩⟨α₀|⊗|0⟩⟨0| + |−α₀⟩⟨−α₀|⊗|1⟩⟨1|).
pub fn classical_cat_mixture(alpha0: f64, cfg: &FockConfig) -> Result<HybridOperator> {
    dephased_cat_with_tau(alpha0, Complex64::new(0.0, 0.0), cfg)
}

/// The elementary pure examples of bipartite (non)classicality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleState {
    /// Even coherent superposition in the oscillator, qubit in |0⟩:
    /// nonclassical only in the oscillator.
    EvenCatProduct,
    /// Coherent oscillator, qubit in (|0⟩+|1⟩)/√2: nonclassical only in the
    /// qubit.
    CoherentPlus,
    /// The entangled cat (|α⟩⊗|0⟩ + |−α⟩⊗|1⟩)/√2: globally superposed.
    EntangledCat,
    /// Superposition mixing local and global coherence,
    /// N([|α⟩+|−α⟩]⊗[|0⟩+|1⟩] + [|α⟩+i|−α⟩]⊗[|0⟩+i|1⟩]).
    LocalGlobalMix,
}

/// Builds one of the elementary examples for a (possibly complex) α ≠ 0.
///
/// For `EvenCatProduct` with α = 0 the normalization formula stays valid and
/// the state degenerates to vacuum ⊗ |0⟩; that case is only logged.
pub fn example_state(
    kind: ExampleState,
    alpha: Complex64,
    cfg: &FockConfig,
) -> Result<HybridVector> {
    if alpha.norm() == 0.0 {
        match kind {
            ExampleState::EvenCatProduct => {
                log::warn!("even-cat example at alpha = 0 degenerates to vacuum ⊗ |0⟩")
            }
            _ => {
                return Err(Error::InvalidParam(
                    "example states require alpha != 0".into(),
                ))
            }
        }
    }
    let plus = coherent_vector(alpha, cfg)?;
    let minus = coherent_vector(-alpha, cfg)?;
    let e0 = qubit_ket(QubitBasis::Zero);
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match kind {
        ExampleState::EvenCatProduct => {
            let norm = (2.0 * (1.0 + (-2.0 * alpha.norm_sqr()).exp())).sqrt();
            let osc = (&plus + &minus) / Complex64::new(norm, 0.0);
            tensor_vectors(&osc, &e0)
        }
        ExampleState::CoherentPlus => {
            let mut q = CVec::zeros(2);
            q[0] = inv_sqrt2;
            q[1] = inv_sqrt2;
            tensor_vectors(&plus, &q)
        }
        ExampleState::EntangledCat => {
            let mut amps = CVec::zeros(cfg.hybrid_dim());
            for n in 0..cfg.osc_dim() {
                amps[2 * n] = plus[n] * inv_sqrt2;
                amps[2 * n + 1] = minus[n] * inv_sqrt2;
            }
            HybridVector::new(amps)
        }
        ExampleState::LocalGlobalMix => {
            let i = Complex64::new(0.0, 1.0);
            let osc_a = &plus + &minus;
            let osc_b = &plus + &minus * i;
            let mut amps = CVec::zeros(cfg.hybrid_dim());
            for n in 0..cfg.osc_dim() {
                amps[2 * n] = osc_a[n] + osc_b[n];
                amps[2 * n + 1] = osc_a[n] + i * osc_b[n];
            }
            Ok(HybridVector::new(amps)?.normalized())
        }
    }
}

/// Wrapped-Gaussian weight cap: |k| ≤ ceil(5σ/2π) + 2 keeps the neglected
/// tail below 1e-10.
fn wrap_cap(sigma: f64) -> Result<i64> {
    let k = (5.0 * sigma / std::f64::consts::TAU).ceil() as i64 + 2;
    if k > 1_000 {
        return Err(Error::QuadratureNonConvergent(format!(
            "wrapped-Gaussian k-sum cap {k} exceeds 1000 (sigma = {sigma})"
        )));
    }
    Ok(k)
}

/// Independent check of the dephasing factor: numerically integrates the
/// wrapped Gaussian ∫₀^{2π} dφ Σ_k exp(−(φ−2πk)²/2σ² + iφ)/√(2πσ²) and
/// returns its (real) value, which must equal e^{−σ²/2}.
pub fn dephasing_kernel_check(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParam(
            "kernel check requires 0 < sigma < inf".into(),
        ));
    }
    let cap = wrap_cap(sigma)?;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * sigma * sigma).sqrt();
    let wrapped = |phi: f64| -> Complex64 {
        let mut acc = 0.0;
        for k in -cap..=cap {
            let d = phi - std::f64::consts::TAU * k as f64;
            acc += (-d * d / (2.0 * sigma * sigma)).exp();
        }
        Complex64::new(0.0, phi).exp() * (acc * norm)
    };
    let eval = |n: usize| -> Complex64 {
        let (x, w) = numeric::gauss_legendre_on(n, 0.0, std::f64::consts::TAU);
        x.iter()
            .zip(&w)
            .map(|(xi, wi)| wrapped(*xi) * Complex64::new(*wi, 0.0))
            .sum()
    };
    let (value, _) = numeric::converge_doubling(64, 8192, 1e-11, eval)?;
    if value.im.abs() > 1e-10 {
        return Err(Error::Internal(format!(
            "dephasing kernel produced imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// First Fourier coefficient ∫ f(φ) e^{iφ} dφ / ∫ f(φ) dφ of a user-supplied
/// 2π-periodic non-negative weight: the τ induced by that phase noise.
pub fn tau_from_weight<F: Fn(f64) -> f64>(weight: F) -> Result<Complex64> {
    let eval = |n: usize| -> Vec<Complex64> {
        let (x, w) = numeric::gauss_legendre_on(n, 0.0, std::f64::consts::TAU);
        let mut mass = Complex64::new(0.0, 0.0);
        let mut first = Complex64::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(&w) {
            let f = weight(*xi);
            mass += Complex64::new(f * wi, 0.0);
            first += Complex64::new(0.0, *xi).exp() * (f * wi);
        }
        vec![mass, first]
    };
    let (vals, _) = numeric::converge_doubling(64, 8192, 1e-11, eval)?;
    if vals[0].re <= 0.0 {
        return Err(Error::InvalidParam(
            "phase weight must have positive total mass".into(),
        ));
    }
    Ok(vals[1] / vals[0])
}

/// Dephases the cat with an arbitrary 2π-periodic weight; returns the state
/// together with the effective τ (the weight's first Fourier coefficient).
pub fn dephased_cat_weighted<F: Fn(f64) -> f64>(
    alpha0: f64,
    weight: F,
    cfg: &FockConfig,
) -> Result<(HybridOperator, Complex64)> {
    let tau = tau_from_weight(weight)?;
    let rho = dephased_cat_with_tau(alpha0, tau, cfg)?;
    Ok((rho, tau))
}

/// Convenience dyad |α₀⟩⟨α₀| ⊗ |q⟩⟨q| used by a few tests and the witness
/// sweep.
pub fn coherent_qubit_dyad(
    alpha: Complex64,
    q: QubitBasis,
    cfg: &FockConfig,
) -> Result<HybridOperator> {
    let v = classical_product(alpha, q, cfg)?;
    let mat = outer(&v.amps, &v.amps);
    Ok(HybridOperator {
        mat,
        kind: OperatorKind::Density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{expectation, is_hermitian, min_eigenvalue, tensor_operators, Subsystem};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn degenerate_cat_is_vacuum_times_plus() {
        let cfg = FockConfig::default();
        let cat = cat_pure(&CatParams::pure(0.0, 0.0).unwrap(), &cfg).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(cat.amp(0, QubitBasis::Zero).re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(cat.amp(0, QubitBasis::One).re, s, epsilon = 1e-15);
        for n in 1..cfg.osc_dim() {
            assert_eq!(cat.amp(n, QubitBasis::Zero).norm(), 0.0);
            assert_eq!(cat.amp(n, QubitBasis::One).norm(), 0.0);
        }
    }

    #[test]
    fn pure_cat_is_normalized() {
        let cfg = FockConfig::default();
        let cat = cat_pure(&CatParams::pure(1.0, 0.0).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(cat.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_dephasing_reproduces_pure_dyad() {
        let cfg = FockConfig::default();
        let params = CatParams::dephased(1.0, Sigma::Finite(0.0)).unwrap();
        let rho = dephased_cat(&params, &cfg).unwrap();
        let dyad = cat_pure(&params, &cfg).unwrap().dyad(cfg.tol).unwrap();
        let dev = (&rho.mat - &dyad.mat)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-14);
    }

    #[test]
    fn infinite_dephasing_is_the_classical_mixture() {
        let cfg = FockConfig::default();
        let params = CatParams::dephased(1.0, Sigma::Infinite).unwrap();
        let rho = dephased_cat(&params, &cfg).unwrap();
        let expect = classical_cat_mixture(1.0, &cfg).unwrap();
        assert_eq!(rho.mat, expect.mat);
    }

    #[test]
    fn tau_value_at_half_sigma() {
        let s = Sigma::Finite(0.5);
        assert_abs_diff_eq!(s.tau(), 0.882_496_902_584_595_4, epsilon = 1e-15);
    }

    #[test]
    fn dephased_cat_is_positive_for_all_tau() {
        let cfg = FockConfig::default();
        for tau in [0.0, 0.25, 0.5, 0.882_496_902_584_595_4, 1.0] {
            let rho = dephased_cat_with_tau(1.3, c(tau, 0.0), &cfg).unwrap();
            assert!(min_eigenvalue(&rho.mat) > -cfg.tol);
            assert!(is_hermitian(&rho.mat, 1e-12));
        }
    }

    #[test]
    fn equal_tau_means_identical_operator() {
        let cfg = FockConfig::default();
        let via_sigma =
            dephased_cat(&CatParams::dephased(0.8, Sigma::Finite(0.5)).unwrap(), &cfg).unwrap();
        let via_tau =
            dephased_cat_with_tau(0.8, c(Sigma::Finite(0.5).tau(), 0.0), &cfg).unwrap();
        assert_eq!(via_sigma.mat, via_tau.mat);
    }

    #[test]
    fn kernel_check_agrees_with_closed_form() {
        // quadrature + k-sum oracle against e^{−σ²/2}
        for sigma in [0.1, 0.5, 1.0, 2.0f64.sqrt(), 3.0] {
            let got = dephasing_kernel_check(sigma).unwrap();
            assert_abs_diff_eq!(got, (-0.5 * sigma * sigma).exp(), epsilon = 1e-8);
        }
    }

    #[test]
    fn kernel_check_near_zero_sigma_tends_to_one() {
        let got = dephasing_kernel_check(0.01).unwrap();
        assert_abs_diff_eq!(got, 1.0, epsilon = 1e-4);
        assert_abs_diff_eq!(got, (-0.5f64 * 1e-4).exp(), epsilon = 1e-8);
    }

    #[test]
    fn gaussian_weight_reproduces_gaussian_tau() {
        let sigma = 0.7f64;
        let cap = 5;
        let weight = move |phi: f64| {
            (-cap..=cap)
                .map(|k| {
                    let d = phi - std::f64::consts::TAU * k as f64;
                    (-d * d / (2.0 * sigma * sigma)).exp()
                })
                .sum::<f64>()
        };
        let tau = tau_from_weight(weight).unwrap();
        assert_abs_diff_eq!(tau.re, (-0.5 * sigma * sigma).exp(), epsilon = 1e-8);
        assert_abs_diff_eq!(tau.im, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn weighted_dephasing_builds_valid_state() {
        let cfg = FockConfig::default();
        // asymmetric two-peak weight gives a genuinely complex tau
        let weight = |phi: f64| 1.0 + 0.7 * (phi - 1.0).cos() + 0.2 * (2.0 * phi).sin();
        let (rho, tau) = dephased_cat_weighted(1.0, weight, &cfg).unwrap();
        assert!(tau.norm() <= 1.0);
        assert!(tau.im.abs() > 1e-3);
        assert!(min_eigenvalue(&rho.mat) > -cfg.tol);
    }

    #[test]
    fn plus_product_has_unit_sigma_x_reduction() {
        let cfg = FockConfig::default();
        let psi = example_state(ExampleState::CoherentPlus, c(0.9, 0.4), &cfg).unwrap();
        let rho = psi.dyad(cfg.tol).unwrap();
        let sx = HybridOperator::observable(
            tensor_operators(&CMat::identity(cfg.osc_dim(), cfg.osc_dim()), &crate::fock::sigma_x())
                .unwrap(),
            cfg.tol,
        )
        .unwrap();
        assert_abs_diff_eq!(expectation(&rho, &sx).unwrap().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn even_cat_product_is_normalized() {
        let cfg = FockConfig::default();
        let phi = example_state(ExampleState::EvenCatProduct, c(1.0, 0.0), &cfg).unwrap();
        assert_abs_diff_eq!(phi.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn even_cat_product_degenerates_gracefully_at_zero() {
        let cfg = FockConfig::default();
        let phi = example_state(ExampleState::EvenCatProduct, c(0.0, 0.0), &cfg).unwrap();
        assert_abs_diff_eq!(phi.amp(0, QubitBasis::Zero).re, 1.0, epsilon = 1e-15);
        assert!(example_state(ExampleState::CoherentPlus, c(0.0, 0.0), &cfg).is_err());
    }

    #[test]
    fn entangled_cat_example_equals_pure_cat() {
        let cfg = FockConfig::default();
        let chi = example_state(ExampleState::EntangledCat, c(1.0, 0.0), &cfg).unwrap();
        let cat = cat_pure(&CatParams::pure(1.0, 0.0).unwrap(), &cfg).unwrap();
        let dev = (&chi.amps - &cat.amps)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-15);
    }

    #[test]
    fn local_global_mix_is_normalized_valid_state() {
        let cfg = FockConfig::default();
        let v = example_state(ExampleState::LocalGlobalMix, c(0.8, 0.0), &cfg).unwrap();
        assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-12);
        assert!(v.dyad(cfg.tol).is_ok());
    }

    #[test]
    fn wide_cat_qubit_reduction_is_nearly_maximally_mixed() {
        let cfg = FockConfig::default();
        let cat = cat_pure(&CatParams::pure(3.0, 0.0).unwrap(), &cfg).unwrap();
        let rho = cat.dyad(cfg.tol).unwrap();
        let q = crate::fock::trace_out(&rho, Subsystem::Oscillator).unwrap();
        assert_abs_diff_eq!(q[(0, 0)].re, 0.5, epsilon = 1e-10);
        assert!(q[(0, 1)].norm() < 1e-8);
    }

    #[test]
    fn cat_params_validation() {
        assert!(CatParams::pure(-0.5, 0.0).is_err());
        assert!(CatParams::new(1.0, Sigma::Finite(0.5), 7.0).is_err());
        assert!(Sigma::new(-1.0).is_err());
        assert!(matches!(Sigma::new(f64::INFINITY).unwrap(), Sigma::Infinite));
        assert!(dephased_cat_with_tau(1.0, c(1.2, 0.0), &FockConfig::default()).is_err());
    }
}
