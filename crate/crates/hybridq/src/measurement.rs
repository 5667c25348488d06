//! Joint and conditional statistics of the commuting measurement pair
//! ŷ ⊗ 1 (momentum quadrature) and 1 ⊗ σ̂_x: closed forms for the dephased
//! cat family, generic Fock-space evaluation for arbitrary density
//! operators, and the post-measurement conditional states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    is_hermitian, min_eigenvalue, trace, CMat, CVec, FockConfig, HybridOperator,
};
use crate::numeric::adaptive_simpson;
use crate::states::CatParams;

/// Outcome of the σ̂_x measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn both() -> [Sign; 2] {
        [Sign::Plus, Sign::Minus]
    }

    pub fn label(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Projection ⟨±|n⟩ of the σ̂_x eigenvectors onto the computational basis:
/// ⟨±|0⟩ = 1/√2, ⟨±|1⟩ = ±1/√2.
pub fn qubit_projection(s: Sign, n: usize) -> f64 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match n {
        0 => r,
        _ => s.value() * r,
    }
}

/// σ̂_x eigenvector |±⟩ = (|0⟩ ± |1⟩)/√2.
pub fn sign_ket(s: Sign) -> CVec {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    CVec::from_vec(vec![
        Complex64::new(r, 0.0),
        Complex64::new(s.value() * r, 0.0),
    ])
}

/// Real normalized Hermite functions h_0..h_{n_max} at the quadrature value
/// y, in the scaling where the vacuum has unit variance:
/// h_0(y) = e^{−y²/4}/(2π)^{1/4}, h_{n+1} = (y·h_n − √n·h_{n−1})/√(n+1).
pub fn hermite_functions(y: f64, n_max: usize) -> Vec<f64> {
    let mut h = Vec::with_capacity(n_max + 1);
    h.push((-0.25 * y * y).exp() / (2.0 * std::f64::consts::PI).powf(0.25));
    if n_max >= 1 {
        h.push(y * h[0]);
    }
    for n in 1..n_max {
        let next = (y * h[n] - (n as f64).sqrt() * h[n - 1]) / ((n + 1) as f64).sqrt();
        h.push(next);
    }
    h
}

/// Quadrature eigenvector component ⟨y|n⟩ = (−i)ⁿ h_n(y).
///
/// The n-dependent phase makes the Fock expansion reproduce the coherent
/// overlap of [`coherent_quad_amplitude`]; it is checked in the tests.
pub fn quad_wavefunction(n: usize, y: f64, cfg: &FockConfig) -> Result<Complex64> {
    if n > cfg.n_max {
        return Err(Error::IndexOutOfRange {
            index: n,
            max: cfg.n_max,
        });
    }
    let h = hermite_functions(y, n);
    Ok(Complex64::new(0.0, -1.0).powu(n as u32) * h[n])
}

/// All components ⟨n|y⟩ = conj(⟨y|n⟩) of the (δ-normalized) quadrature
/// eigenvector as a Fock-space column.
pub fn quad_eigenvector(y: f64, cfg: &FockConfig) -> CVec {
    let h = hermite_functions(y, cfg.n_max);
    let mut v = CVec::zeros(cfg.osc_dim());
    let mut phase = Complex64::new(1.0, 0.0);
    let i_pos = Complex64::new(0.0, 1.0);
    for n in 0..=cfg.n_max {
        // conj((−i)ⁿ) = iⁿ
        v[n] = phase * h[n];
        phase *= i_pos;
    }
    v
}

/// Closed-form overlap ⟨y|α⟩ = (2π)^{−1/4} exp(−y²/4 − iαy − (|α|²−α²)/2).
pub fn coherent_quad_amplitude(alpha: Complex64, y: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let expo = Complex64::new(-0.25 * y * y - 0.5 * alpha.norm_sqr(), 0.0) - i * alpha * y
        + alpha * alpha * 0.5;
    expo.exp() * (2.0 * std::f64::consts::PI).powf(-0.25)
}

/// Joint density of the (ŷ, σ̂_x) measurement. Either the closed form of the
/// dephased cat family or a numeric evaluator over a density operator.
#[derive(Debug, Clone)]
pub enum JointDistribution {
    ClosedForm {
        params: CatParams,
    },
    Numeric {
        rho: HybridOperator,
        cfg: FockConfig,
        /// Cached marginals (p₊, p₋) from Simpson integration over [−8, 8].
        marginals: [f64; 2],
    },
}

/// Closed form p_σ(y, ±) = e^{−y²/2}/(2√(2π)) · (1 ± τ cos 2α₀y).
pub fn joint_closed_form(params: &CatParams) -> JointDistribution {
    JointDistribution::ClosedForm { params: *params }
}

/// Generic evaluator p(y, s) = ⟨y, s|ρ|y, s⟩ assembled from the quadrature
/// wavefunctions and qubit projections.
pub fn joint_numeric(rho: &HybridOperator, cfg: &FockConfig) -> Result<JointDistribution> {
    if !rho.is_density() {
        return Err(Error::NotDensity(
            "joint statistics require a density operator".into(),
        ));
    }
    let mut dist = JointDistribution::Numeric {
        rho: rho.clone(),
        cfg: *cfg,
        marginals: [0.5, 0.5],
    };
    let p_plus = integrate_density(&dist, Sign::Plus);
    let p_minus = integrate_density(&dist, Sign::Minus);
    if let JointDistribution::Numeric { marginals, .. } = &mut dist {
        *marginals = [p_plus, p_minus];
    }
    Ok(dist)
}

fn integrate_density(dist: &JointDistribution, s: Sign) -> f64 {
    // wide enough for any guarded amplitude: |⟨ŷ⟩| ≤ 2·√(n_max/4) ≈ 6.3,
    // which leaves the Gaussian tails beyond ±16 at ~1e-22
    adaptive_simpson(&|y: f64| dist.density(y, s), -16.0, 16.0, 1e-12)
}

impl JointDistribution {
    /// Joint probability density p(y, s).
    pub fn density(&self, y: f64, s: Sign) -> f64 {
        match self {
            JointDistribution::ClosedForm { params } => {
                let tau = params.tau();
                let env = (-0.5 * y * y).exp()
                    / (2.0 * (2.0 * std::f64::consts::PI).sqrt());
                env * (1.0 + s.value() * tau * (2.0 * params.alpha0 * y).cos())
            }
            JointDistribution::Numeric { rho, cfg, .. } => {
                if y.abs() > 2.0 * (cfg.n_max as f64).sqrt() {
                    log::warn!(
                        "quadrature value |y| = {} beyond the reliable window at n_max = {}",
                        y.abs(),
                        cfg.n_max
                    );
                }
                let osc = quad_eigenvector(y, cfg);
                let q = sign_ket(s);
                let mut amp = CVec::zeros(cfg.hybrid_dim());
                for n in 0..cfg.osc_dim() {
                    amp[2 * n] = osc[n] * q[0];
                    amp[2 * n + 1] = osc[n] * q[1];
                }
                let rho_amp = &rho.mat * &amp;
                amp.dotc(&rho_amp).re.max(0.0)
            }
        }
    }

    /// Marginal probability p(±) = ∫ dy p(y, ±).
    pub fn marginal_sign(&self, s: Sign) -> f64 {
        match self {
            JointDistribution::ClosedForm { params } => {
                let tau = params.tau();
                let damp = (-2.0 * params.alpha0 * params.alpha0).exp();
                0.5 * (1.0 + s.value() * tau * damp)
            }
            JointDistribution::Numeric { marginals, .. } => match s {
                Sign::Plus => marginals[0],
                Sign::Minus => marginals[1],
            },
        }
    }

    /// Marginal density p(y) = p(y, +) + p(y, −).
    pub fn marginal_y(&self, y: f64) -> f64 {
        self.density(y, Sign::Plus) + self.density(y, Sign::Minus)
    }

    /// Conditional density p(y | s) = p(y, s)/p(s).
    pub fn cond_y_given_sign(&self, y: f64, s: Sign) -> Result<f64> {
        let p = self.marginal_sign(s);
        if p < 1e-12 {
            return Err(Error::ZeroProbability(format!(
                "p({}) = {p:e}",
                s.label()
            )));
        }
        Ok(self.density(y, s) / p)
    }

    /// Conditional probability p(s | y) = p(y, s)/p(y).
    pub fn cond_sign_given_y(&self, s: Sign, y: f64) -> Result<f64> {
        let p = self.marginal_y(y);
        if p < 1e-12 {
            return Err(Error::ZeroProbability(format!("p(y = {y}) = {p:e}")));
        }
        Ok(self.density(y, s) / p)
    }

    /// ∫ dy Σ_s p(y, s) over [−8, 8]; 1 within quadrature tolerance for any
    /// valid distribution.
    pub fn total_mass(&self) -> f64 {
        self.marginal_sign_integral(Sign::Plus) + self.marginal_sign_integral(Sign::Minus)
    }

    fn marginal_sign_integral(&self, s: Sign) -> f64 {
        integrate_density(self, s)
    }
}

/// Post-measurement state of the remaining subsystem, with the probability
/// (density) of the condition as weight.
#[derive(Debug, Clone)]
pub struct ConditionalState {
    pub operator: CMat,
    pub condition: Condition,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Condition {
    SignOutcome(Sign),
    QuadratureValue(f64),
}

impl ConditionalState {
    /// Density-operator invariants of the conditional state.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if !is_hermitian(&self.operator, tol) {
            return Err(Error::NotDensity("conditional state not hermitian".into()));
        }
        let tr = trace(&self.operator);
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::NotDensity(format!(
                "conditional state trace = {tr}"
            )));
        }
        if min_eigenvalue(&self.operator) < -tol {
            return Err(Error::NotDensity(
                "conditional state not positive semidefinite".into(),
            ));
        }
        Ok(())
    }
}

/// Qubit state conditioned on the quadrature outcome y:
/// tr₁[ρ (|y⟩⟨y| ⊗ 1)] normalized by the quadrature density p(y).
pub fn conditional_qubit_state(
    rho: &HybridOperator,
    y: f64,
    cfg: &FockConfig,
) -> Result<ConditionalState> {
    if !rho.is_density() {
        return Err(Error::NotDensity("conditioning requires a density".into()));
    }
    let osc = quad_eigenvector(y, cfg);
    let d = cfg.osc_dim();
    let mut reduced = CMat::zeros(2, 2);
    for q in 0..2 {
        for qp in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..d {
                for m in 0..d {
                    // ⟨m|y⟩⟨y|n⟩ = osc[m]·conj(osc[n])
                    acc += rho.mat[(2 * n + q, 2 * m + qp)] * osc[m] * osc[n].conj();
                }
            }
            reduced[(q, qp)] = acc;
        }
    }
    let weight = (reduced[(0, 0)] + reduced[(1, 1)]).re;
    if weight < 1e-12 {
        return Err(Error::ZeroProbability(format!("p(y = {y}) = {weight:e}")));
    }
    Ok(ConditionalState {
        operator: reduced / Complex64::new(weight, 0.0),
        condition: Condition::QuadratureValue(y),
        weight,
    })
}

/// Oscillator state conditioned on the σ̂_x outcome:
/// tr₂[ρ (1 ⊗ |±⟩⟨±|)] normalized by p(±).
pub fn conditional_oscillator_state(
    rho: &HybridOperator,
    s: Sign,
    cfg: &FockConfig,
) -> Result<ConditionalState> {
    if !rho.is_density() {
        return Err(Error::NotDensity("conditioning requires a density".into()));
    }
    let q = sign_ket(s);
    let d = cfg.osc_dim();
    let mut reduced = CMat::zeros(d, d);
    for n in 0..d {
        for m in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    // ⟨b|±⟩⟨±|a⟩ = q[b]·conj(q[a]) (real components here)
                    acc += rho.mat[(2 * n + a, 2 * m + b)] * q[b] * q[a].conj();
                }
            }
            reduced[(n, m)] = acc;
        }
    }
    let weight = trace(&reduced).re;
    if weight < 1e-12 {
        return Err(Error::ZeroProbability(format!(
            "p({}) = {weight:e}",
            s.label()
        )));
    }
    Ok(ConditionalState {
        operator: reduced / Complex64::new(weight, 0.0),
        condition: Condition::SignOutcome(s),
        weight,
    })
}

/// Closed-form conditional qubit state of the dephased cat,
/// ½(1 + τ e^{2iα₀y}|1⟩⟨0| + τ e^{−2iα₀y}|0⟩⟨1|).
pub fn conditional_qubit_closed_form(params: &CatParams, y: f64) -> CMat {
    let tau = params.tau();
    let ph = Complex64::new(0.0, 2.0 * params.alpha0 * y).exp();
    let mut m = CMat::zeros(2, 2);
    m[(0, 0)] = Complex64::new(0.5, 0.0);
    m[(1, 1)] = Complex64::new(0.5, 0.0);
    m[(1, 0)] = ph * (0.5 * tau);
    m[(0, 1)] = ph.conj() * (0.5 * tau);
    m
}

/// Closed-form conditional oscillator state of the dephased cat,
/// [|α₀⟩⟨α₀| + |−α₀⟩⟨−α₀| ± τ(|−α₀⟩⟨α₀| + |α₀⟩⟨−α₀|)] / 2(1 ± τe^{−2α₀²}).
pub fn conditional_oscillator_closed_form(
    params: &CatParams,
    s: Sign,
    cfg: &FockConfig,
) -> Result<CMat> {
    let a0 = Complex64::new(params.alpha0, 0.0);
    let plus = crate::fock::coherent_vector(a0, cfg)?;
    let minus = crate::fock::coherent_vector(-a0, cfg)?;
    let tau = params.tau();
    let damp = (-2.0 * params.alpha0 * params.alpha0).exp();
    let denom = 2.0 * (1.0 + s.value() * tau * damp);
    let mut m = crate::fock::outer(&plus, &plus) + crate::fock::outer(&minus, &minus);
    let cross = crate::fock::outer(&minus, &plus) + crate::fock::outer(&plus, &minus);
    m += cross * Complex64::new(s.value() * tau, 0.0);
    Ok(m / Complex64::new(denom, 0.0))
}
