//! Entanglement detection via separability eigenvalues.
//!
//! For a bipartite observable L̂ the coupled eigenproblems
//! L̂_{a²}|a¹⟩ = g|a¹⟩ and L̂_{a¹}|a²⟩ = g|a²⟩ over normalized product
//! vectors have stationary values g whose extrema bound ⟨L̂⟩ on every
//! separable state; an expectation outside [min g, max g] certifies
//! entanglement. The see-saw solver alternates exact eigen-optimization
//! over the two factors; the cat-interference witness additionally has a
//! full analytic solution used as the oracle.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{
    coherent_vector, hermitian_eigen, inner, outer, tensor_vectors, trace_product, CMat, CVec,
    FockConfig, HybridOperator, Subsystem,
};
use crate::numeric::substream_seed;

/// Hermitian witness observable, with the cat amplitude kept alongside when
/// the operator is the coherent-interference witness (which unlocks the
/// analytic bounds).
#[derive(Debug, Clone)]
pub struct WitnessSpec {
    pub op: HybridOperator,
    pub alpha0: Option<f64>,
}

/// The interference witness L̂ = |α₀⟩⟨−α₀|⊗|0⟩⟨1| + |−α₀⟩⟨α₀|⊗|1⟩⟨0|.
pub fn cat_witness(alpha0: f64, cfg: &FockConfig) -> Result<WitnessSpec> {
    if !(alpha0 >= 0.0) {
        return Err(Error::InvalidParam(
            "witness amplitude must be non-negative".into(),
        ));
    }
    let a0 = Complex64::new(alpha0, 0.0);
    let plus = coherent_vector(a0, cfg)?;
    let minus = coherent_vector(-a0, cfg)?;
    let d = cfg.osc_dim();
    let mut mat = CMat::zeros(2 * d, 2 * d);
    for n in 0..d {
        for m in 0..d {
            // |α₀⟩⟨−α₀| ⊗ |0⟩⟨1|
            mat[(2 * n, 2 * m + 1)] = plus[n] * minus[m].conj();
            // |−α₀⟩⟨α₀| ⊗ |1⟩⟨0|
            mat[(2 * n + 1, 2 * m)] = minus[n] * plus[m].conj();
        }
    }
    Ok(WitnessSpec {
        op: HybridOperator::observable(mat, cfg.tol)?,
        alpha0: Some(alpha0),
    })
}

/// Contracts a hybrid operator over the named side with a normalized
/// vector: side = Oscillator gives L_{a¹} = tr₁[L(|a¹⟩⟨a¹|⊗1)] on the
/// qubit, side = Qubit gives L_{a²} on the oscillator.
pub fn reduce_witness(l: &CMat, a: &CVec, side: Subsystem) -> Result<CMat> {
    let d = l.nrows() / 2;
    match side {
        Subsystem::Oscillator => {
            if a.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: a.len(),
                });
            }
            let mut out = CMat::zeros(2, 2);
            for q in 0..2 {
                for qp in 0..2 {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for n in 0..d {
                        for m in 0..d {
                            acc += l[(2 * n + q, 2 * m + qp)] * a[m] * a[n].conj();
                        }
                    }
                    out[(q, qp)] = acc;
                }
            }
            Ok(out)
        }
        Subsystem::Qubit => {
            if a.len() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    got: a.len(),
                });
            }
            let mut out = CMat::zeros(d, d);
            for n in 0..d {
                for m in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for p in 0..2 {
                        for r in 0..2 {
                            acc += l[(2 * n + p, 2 * m + r)] * a[r] * a[p].conj();
                        }
                    }
                    out[(n, m)] = acc;
                }
            }
            Ok(out)
        }
    }
}

/// Which end of the spectrum a see-saw branch optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Max,
    Min,
}

/// Extremal eigenpair of a hermitian matrix. Near-degenerate extremal
/// eigenvalues (gap below 1e-10) are tie-broken by maximal overlap with
/// `prev`, which keeps the iteration deterministic on flat directions.
pub fn extremal_eigenvector(m: &CMat, branch: Branch, prev: Option<&CVec>) -> (f64, CVec) {
    let (vals, vecs) = hermitian_eigen(m);
    let n = vals.len();
    let pick_range: Vec<usize> = match branch {
        Branch::Max => {
            let top = vals[n - 1];
            (0..n).filter(|&i| top - vals[i] < 1e-10).collect()
        }
        Branch::Min => {
            let bottom = vals[0];
            (0..n).filter(|&i| vals[i] - bottom < 1e-10).collect()
        }
    };
    let chosen = match prev {
        Some(p) if pick_range.len() > 1 => *pick_range
            .iter()
            .max_by(|&&i, &&j| {
                let oi = inner(p, &vecs.column(i).clone_owned()).norm();
                let oj = inner(p, &vecs.column(j).clone_owned()).norm();
                oi.total_cmp(&oj)
            })
            .unwrap(),
        _ => match branch {
            Branch::Max => n - 1,
            Branch::Min => 0,
        },
    };
    (vals[chosen], vecs.column(chosen).clone_owned())
}

#[derive(Debug, Clone, Copy)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iter: 500,
            tol: 1e-9,
            seed: 7,
        }
    }
}

/// One stationary solution of the separability eigenvalue equations.
#[derive(Debug, Clone)]
pub struct SepEigenvalue {
    pub g: f64,
    pub osc_vec: CVec,
    pub qubit_vec: CVec,
    /// max of the two equation residuals at the fixed point.
    pub residual: f64,
    pub iterations: usize,
}

/// Deduplicated stationary separability eigenvalues with convergence
/// metadata. The solver finds stationary points; the claim that g_min/g_max
/// are global rests on the restart count recorded here.
#[derive(Debug, Clone)]
pub struct SeparabilityResult {
    pub eigenvalues: Vec<SepEigenvalue>,
    pub g_min: f64,
    pub g_max: f64,
    pub restarts_used: usize,
    pub non_converged: usize,
}

use crate::numeric::standard_normal;

fn random_unit_vector<R: Rng>(rng: &mut R, dim: usize, complex: bool) -> CVec {
    loop {
        let mut v = CVec::zeros(dim);
        for i in 0..dim {
            let re = standard_normal(rng);
            let im = if complex { standard_normal(rng) } else { 0.0 };
            v[i] = Complex64::new(re, im);
        }
        let n = v.norm();
        if n > 1e-6 {
            return v / Complex64::new(n, 0.0);
        }
    }
}

/// Oscillator-side restart draw. For the cat witness the analytic solutions
/// live in span{|±α₀⟩}, so the anchors cover that span plus directions out
/// of it; every second restart draws real coefficients, which reaches the
/// interior stationary points (they repel complex perturbations, see the
/// monotonicity of the two branches).
fn initial_osc_vector<R: Rng>(
    rng: &mut R,
    alpha0: Option<f64>,
    cfg_dim: usize,
    cfg: &FockConfig,
    complex: bool,
) -> CVec {
    let mut v = CVec::zeros(cfg_dim);
    if let Some(a0) = alpha0 {
        let anchors: Vec<CVec> = {
            let mut list = Vec::new();
            if let Ok(p) = coherent_vector(Complex64::new(a0, 0.0), cfg) {
                list.push(p);
            }
            if let Ok(m) = coherent_vector(Complex64::new(-a0, 0.0), cfg) {
                list.push(m);
            }
            let mut vac = CVec::zeros(cfg_dim);
            vac[0] = Complex64::new(1.0, 0.0);
            list.push(vac);
            let mut one = CVec::zeros(cfg_dim);
            one[1] = Complex64::new(1.0, 0.0);
            list.push(one);
            list
        };
        for anchor in &anchors {
            let re = standard_normal(rng);
            let im = if complex { standard_normal(rng) } else { 0.0 };
            v += anchor * Complex64::new(re, im);
        }
        let noise = random_unit_vector(rng, cfg_dim, complex);
        v += noise * Complex64::new(0.05, 0.0);
    } else {
        v = random_unit_vector(rng, cfg_dim, complex);
    }
    let n = v.norm();
    if n < 1e-9 {
        return random_unit_vector(rng, cfg_dim, complex);
    }
    v / Complex64::new(n, 0.0)
}

struct RestartOutcome {
    entry: SepEigenvalue,
    converged: bool,
}

fn run_branch(
    l: &CMat,
    branch: Branch,
    mut a1: CVec,
    mut a2: CVec,
    opts: &SeesawOptions,
) -> RestartOutcome {
    let mut g_prev = f64::NAN;
    let mut converged = false;
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let mut g = f64::NAN;
    for it in 1..=opts.max_iter {
        iterations = it;
        let l_a2 = reduce_witness(l, &a2, Subsystem::Qubit).expect("qubit side dims");
        let (_, new_a1) = extremal_eigenvector(&l_a2, branch, Some(&a1));
        a1 = new_a1;
        let l_a1 = reduce_witness(l, &a1, Subsystem::Oscillator).expect("osc side dims");
        let (_, new_a2) = extremal_eigenvector(&l_a1, branch, Some(&a2));
        a2 = new_a2;
        // Rayleigh value and both equation residuals at the current pair;
        // l_a1 depends only on a1 and stays valid here
        let l_a2 = reduce_witness(l, &a2, Subsystem::Qubit).expect("qubit side dims");
        g = inner(&a2, &(&l_a1 * &a2)).re;
        let r1 = (&l_a2 * &a1 - &a1 * Complex64::new(g, 0.0)).norm();
        let r2 = (&l_a1 * &a2 - &a2 * Complex64::new(g, 0.0)).norm();
        residual = r1.max(r2);
        if (g - g_prev).abs() < opts.tol && residual < opts.tol {
            converged = true;
            break;
        }
        g_prev = g;
    }
    RestartOutcome {
        entry: SepEigenvalue {
            g,
            osc_vec: a1,
            qubit_vec: a2,
            residual,
            iterations,
        },
        converged,
    }
}

/// Alternating eigen-optimization over the two tensor factors, run for the
/// maximizing and the minimizing branch from every restart. Converged fixed
/// points are deduplicated (10·tol in g, refined by eigenvector overlap);
/// non-converged runs are excluded from g_min/g_max and counted.
///
/// Deterministic in (L, restarts, seed): every restart derives its own
/// substream, independent of scheduling.
pub fn seesaw_solve(witness: &WitnessSpec, opts: &SeesawOptions) -> Result<SeparabilityResult> {
    if opts.restarts < 1 {
        return Err(Error::InvalidParam("need at least one restart".into()));
    }
    if opts.max_iter < 1 || !(opts.tol > 0.0) {
        return Err(Error::InvalidParam("max_iter >= 1 and tol > 0 required".into()));
    }
    let l = &witness.op.mat;
    let d = l.nrows() / 2;
    let cfg_guess = FockConfig {
        n_max: d - 1,
        tol: opts.tol,
    };
    let outcomes: Vec<RestartOutcome> = (0..opts.restarts)
        .into_par_iter()
        .flat_map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(opts.seed, r as u64));
            let complex = r % 2 == 0;
            let a1 = initial_osc_vector(&mut rng, witness.alpha0, d, &cfg_guess, complex);
            let a2 = random_unit_vector(&mut rng, 2, complex);
            [Branch::Max, Branch::Min]
                .into_iter()
                .map(|branch| run_branch(l, branch, a1.clone(), a2.clone(), opts))
                .collect::<Vec<_>>()
        })
        .collect();

    let non_converged = outcomes.iter().filter(|o| !o.converged).count();
    if non_converged > 0 {
        log::warn!(
            "{non_converged} of {} see-saw runs did not converge and are excluded",
            outcomes.len()
        );
    }
    let mut entries: Vec<SepEigenvalue> = outcomes
        .into_iter()
        .filter(|o| o.converged)
        .map(|o| o.entry)
        .collect();
    if entries.is_empty() {
        return Err(Error::Internal(
            "no see-saw restart converged; raise max_iter or loosen tol".into(),
        ));
    }
    entries.sort_by(|a, b| a.g.total_cmp(&b.g));

    let mut kept: Vec<SepEigenvalue> = Vec::new();
    for e in entries {
        let duplicate = kept.iter_mut().find(|k| {
            (k.g - e.g).abs() <= 10.0 * opts.tol && {
                let ov = inner(&k.osc_vec, &e.osc_vec).norm()
                    * inner(&k.qubit_vec, &e.qubit_vec).norm();
                ov > 0.999
            }
        });
        match duplicate {
            Some(k) => {
                if e.residual < k.residual {
                    *k = e;
                }
            }
            None => kept.push(e),
        }
    }
    let g_min = kept.first().map(|e| e.g).unwrap();
    let g_max = kept.last().map(|e| e.g).unwrap();
    Ok(SeparabilityResult {
        eigenvalues: kept,
        g_min,
        g_max,
        restarts_used: opts.restarts,
        non_converged,
    })
}

/// One analytic stationary solution of the cat witness.
#[derive(Debug, Clone)]
pub struct AnalyticSepSolution {
    pub g: f64,
    pub osc_vec: CVec,
    pub qubit_vec: CVec,
}

/// Analytic separability eigenvalues g = ±(1 ±' e^{−2α₀²})/2 of the cat
/// witness, in descending order, with the associated product eigenvectors
/// (even/odd coherent superpositions paired with σ̂_x eigenvectors).
pub struct AnalyticSepSolutions {
    pub values: [f64; 4],
    pub solutions: Vec<AnalyticSepSolution>,
}

pub fn analytic_sep_eigs(alpha0: f64, cfg: &FockConfig) -> Result<AnalyticSepSolutions> {
    if !(alpha0 >= 0.0) {
        return Err(Error::InvalidParam("alpha0 must be non-negative".into()));
    }
    let k = (-2.0 * alpha0 * alpha0).exp();
    let values = [
        0.5 * (1.0 + k),
        0.5 * (1.0 - k),
        -0.5 * (1.0 - k),
        -0.5 * (1.0 + k),
    ];
    let mut solutions = Vec::new();
    let plus = coherent_vector(Complex64::new(alpha0, 0.0), cfg)?;
    let minus = coherent_vector(Complex64::new(-alpha0, 0.0), cfg)?;
    for branch in [1.0f64, -1.0] {
        for parity in [1.0f64, -1.0] {
            let mut osc = &plus + &minus * Complex64::new(parity, 0.0);
            let n = osc.norm();
            if n < 1e-9 {
                // odd combination degenerates at alpha0 = 0; value remains,
                // eigenvector does not exist there
                continue;
            }
            osc /= Complex64::new(n, 0.0);
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let qubit = CVec::from_vec(vec![
                Complex64::new(r, 0.0),
                Complex64::new(branch * parity * r, 0.0),
            ]);
            solutions.push(AnalyticSepSolution {
                g: branch * 0.5 * (1.0 + parity * k),
                osc_vec: osc,
                qubit_vec: qubit,
            });
        }
    }
    Ok(AnalyticSepSolutions { values, solutions })
}

/// Separable-state bounds on ⟨L̂⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SepBounds {
    pub g_min: f64,
    pub g_max: f64,
}

impl SepBounds {
    pub fn from_seesaw(result: &SeparabilityResult) -> Self {
        Self {
            g_min: result.g_min,
            g_max: result.g_max,
        }
    }

    /// Analytic cat-witness bounds ±g_sep with g_sep = (1+e^{−2α₀²})/2.
    pub fn analytic_cat(alpha0: f64) -> Self {
        let g = 0.5 * (1.0 + (-2.0 * alpha0 * alpha0).exp());
        Self { g_min: -g, g_max: g }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WitnessVerdict {
    pub expectation: f64,
    pub bounds: SepBounds,
    pub entangled: bool,
}

/// Evaluates ⟨L̂⟩ on a density operator against separable bounds; outside
/// means entangled.
pub fn witness_verdict(
    rho: &HybridOperator,
    witness: &WitnessSpec,
    bounds: SepBounds,
    tol: f64,
) -> Result<WitnessVerdict> {
    if !rho.is_density() {
        return Err(Error::NotDensity("verdict requires a density".into()));
    }
    if rho.dim() != witness.op.dim() {
        return Err(Error::DimensionMismatch {
            expected: witness.op.dim(),
            got: rho.dim(),
        });
    }
    let e = trace_product(&rho.mat, &witness.op.mat);
    if e.im.abs() > tol.max(1e-10) {
        return Err(Error::Internal(format!(
            "witness expectation has imaginary part {:e}",
            e.im
        )));
    }
    let entangled = e.re > bounds.g_max + tol || e.re < bounds.g_min - tol;
    Ok(WitnessVerdict {
        expectation: e.re,
        bounds,
        entangled,
    })
}

/// Detection threshold of the cat witness at amplitude α₀: dephasing keeps
/// entanglement detectable while τ_σ > (1+e^{−2α₀²})/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    pub tau_threshold: f64,
    /// Largest detectable σ, absent when no dephasing level is detectable
    /// (τ-threshold ≥ 1, i.e. α₀ = 0).
    pub sigma_threshold: Option<f64>,
}

pub fn detection_threshold(alpha0: f64) -> Result<ThresholdReport> {
    if !(alpha0 >= 0.0) {
        return Err(Error::InvalidParam("alpha0 must be non-negative".into()));
    }
    let tau = 0.5 * (1.0 + (-2.0 * alpha0 * alpha0).exp());
    let sigma = if tau < 1.0 {
        Some((-2.0 * tau.ln()).sqrt())
    } else {
        None
    };
    Ok(ThresholdReport {
        tau_threshold: tau,
        sigma_threshold: sigma,
    })
}

/// Inverse threshold: the smallest cat amplitude whose witness detects a
/// state with coherence τ. None when τ ≤ 1/2 (below the α₀ → ∞ limit of the
/// bound, undetectable at any amplitude).
pub fn amplitude_threshold(tau: f64) -> Result<Option<f64>> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParam(format!(
            "tau must lie in [0, 1], got {tau}"
        )));
    }
    if tau <= 0.5 {
        return Ok(None);
    }
    Ok(Some((-(2.0 * tau - 1.0).ln() / 2.0).sqrt()))
}

/// Expectation of a witness on a state (thin wrapper used by sweeps).
pub fn witness_expectation(rho: &HybridOperator, witness: &WitnessSpec) -> Result<f64> {
    let e = trace_product(&rho.mat, &witness.op.mat);
    if e.im.abs() > 1e-9 {
        return Err(Error::Internal(format!(
            "witness expectation has imaginary part {:e}",
            e.im
        )));
    }
    Ok(e.re)
}

/// |a¹⟩⊗|a²⟩ helper for Rayleigh quotients in tests and diagnostics.
pub fn product_rayleigh(l: &CMat, a1: &CVec, a2: &CVec) -> f64 {
    let v = tensor_vectors(a1, a2).expect("qubit side dims");
    let lv = l * &v.amps;
    v.amps.dotc(&lv).re
}

/// Projector distance used by dedup diagnostics in tests.
pub fn dyad_distance(a: &CVec, b: &CVec) -> f64 {
    let pa = outer(a, a);
    let pb = outer(b, b);
    (&pa - &pb).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{is_hermitian, tensor_operators};
    use crate::states::{dephased_cat, CatParams, Sigma};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lcg(state: &mut u64) -> f64 {
        *state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*state >> 33) as f64) / (1u64 << 31) as f64 - 1.0
    }

    #[test]
    fn cat_witness_is_hermitian() {
        let cfg = FockConfig::default();
        let w = cat_witness(1.0, &cfg).unwrap();
        assert!(is_hermitian(&w.op.mat, 1e-12));
        let w0 = cat_witness(0.0, &cfg).unwrap();
        assert!(is_hermitian(&w0.op.mat, 1e-12));
    }

    #[test]
    fn witness_expectation_on_dephased_cat_is_tau() {
        let cfg = FockConfig::default();
        for alpha0 in [0.0, 1.0] {
            let w = cat_witness(alpha0, &cfg).unwrap();
            for sigma in [Sigma::Finite(0.0), Sigma::Finite(0.5), Sigma::Finite(2.0f64.sqrt())] {
                let rho =
                    dephased_cat(&CatParams::dephased(alpha0, sigma).unwrap(), &cfg).unwrap();
                let e = witness_expectation(&rho, &w).unwrap();
                assert_abs_diff_eq!(e, sigma.tau(), epsilon = 1e-8);
                assert!(e <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn reduction_of_product_operator_factorizes() {
        // brute force on a 3-level oscillator
        let cfg = FockConfig::new(2, 1e-10).unwrap();
        let mut st = 0xabcdef12u64;
        let raw_a = CMat::from_fn(3, 3, |_, _| c(lcg(&mut st), lcg(&mut st)));
        let a = (&raw_a + &raw_a.adjoint()) * c(0.5, 0.0);
        let raw_b = CMat::from_fn(2, 2, |_, _| c(lcg(&mut st), lcg(&mut st)));
        let b = (&raw_b + &raw_b.adjoint()) * c(0.5, 0.0);
        let l = tensor_operators(&a, &b).unwrap();
        let mut v = CVec::from_vec(vec![c(lcg(&mut st), 0.3), c(0.1, lcg(&mut st)), c(0.4, -0.2)]);
        v /= c(v.norm(), 0.0);
        let reduced = reduce_witness(&l, &v, Subsystem::Oscillator).unwrap();
        let scale = {
            let av = &a * &v;
            v.dotc(&av)
        };
        let expect = &b * scale;
        let dev = (&reduced - &expect).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-12);
        assert!(is_hermitian(&reduced, 1e-12));
        let _ = cfg;
    }

    #[test]
    fn reduction_satisfies_the_trace_identity() {
        let cfg = FockConfig::new(2, 1e-10).unwrap();
        let mut st = 0x5151u64;
        let raw = CMat::from_fn(cfg.hybrid_dim(), cfg.hybrid_dim(), |_, _| {
            c(lcg(&mut st), lcg(&mut st))
        });
        let l = (&raw + &raw.adjoint()) * c(0.5, 0.0);
        let mut a1 = CVec::from_vec(vec![c(0.3, 0.1), c(-0.5, 0.4), c(0.2, 0.2)]);
        a1 /= c(a1.norm(), 0.0);
        let mut a2 = CVec::from_vec(vec![c(0.8, -0.1), c(0.3, 0.5)]);
        a2 /= c(a2.norm(), 0.0);
        let red = reduce_witness(&l, &a1, Subsystem::Oscillator).unwrap();
        let lhs = a2.dotc(&(&red * &a2)).re;
        let rhs = product_rayleigh(&l, &a1, &a2);
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
    }

    #[test]
    fn analytic_values_frozen() {
        let cfg = FockConfig::default();
        let sol = analytic_sep_eigs(1.0, &cfg).unwrap();
        assert_abs_diff_eq!(sol.values[0], 0.567_667_641_618_306_3, epsilon = 1e-14);
        assert_abs_diff_eq!(sol.values[1], 0.432_332_358_381_693_7, epsilon = 1e-14);
        assert_abs_diff_eq!(sol.values[2], -0.432_332_358_381_693_7, epsilon = 1e-14);
        assert_abs_diff_eq!(sol.values[3], -0.567_667_641_618_306_3, epsilon = 1e-14);
        let sol0 = analytic_sep_eigs(0.0, &cfg).unwrap();
        assert_eq!(sol0.values, [1.0, 0.0, 0.0, -1.0]);
        assert_eq!(sol0.solutions.len(), 2); // odd branch degenerates
        let sol3 = analytic_sep_eigs(3.0, &cfg).unwrap();
        assert_abs_diff_eq!(sol3.values[0], 0.5, epsilon = 2e-8);
        assert_abs_diff_eq!(sol3.values[1], 0.5, epsilon = 2e-8);
    }

    #[test]
    fn analytic_solutions_satisfy_the_coupled_equations() {
        let cfg = FockConfig::default();
        for alpha0 in [0.5, 1.0, 2.0] {
            let w = cat_witness(alpha0, &cfg).unwrap();
            let sol = analytic_sep_eigs(alpha0, &cfg).unwrap();
            assert_eq!(sol.solutions.len(), 4);
            for s in &sol.solutions {
                let l_a2 = reduce_witness(&w.op.mat, &s.qubit_vec, Subsystem::Qubit).unwrap();
                let l_a1 = reduce_witness(&w.op.mat, &s.osc_vec, Subsystem::Oscillator).unwrap();
                let r1 = (&l_a2 * &s.osc_vec - &s.osc_vec * c(s.g, 0.0)).norm();
                let r2 = (&l_a1 * &s.qubit_vec - &s.qubit_vec * c(s.g, 0.0)).norm();
                assert!(r1 < 1e-10 && r2 < 1e-10, "alpha0 {alpha0}, g {}: {r1:e} {r2:e}", s.g);
            }
        }
    }

    #[test]
    fn seesaw_recovers_all_four_stationary_values() {
        let cfg = FockConfig::default();
        let w = cat_witness(1.0, &cfg).unwrap();
        let opts = SeesawOptions {
            restarts: 16,
            seed: 3,
            ..SeesawOptions::default()
        };
        let result = seesaw_solve(&w, &opts).unwrap();
        let analytic = analytic_sep_eigs(1.0, &cfg).unwrap();
        for target in analytic.values {
            assert!(
                result.eigenvalues.iter().any(|e| (e.g - target).abs() < 1e-6),
                "missing {target}; got {:?}",
                result.eigenvalues.iter().map(|e| e.g).collect::<Vec<_>>()
            );
        }
        for e in &result.eigenvalues {
            assert!(e.residual < opts.tol);
        }
        assert_abs_diff_eq!(result.g_max, analytic.values[0], epsilon = 1e-8);
        assert_abs_diff_eq!(result.g_min, analytic.values[3], epsilon = 1e-8);
        assert_eq!(result.non_converged, 0);
    }

    #[test]
    fn seesaw_decouples_on_product_operators() {
        let cfg = FockConfig::new(3, 1e-10).unwrap();
        let mut st = 0x77aa55u64;
        let raw = CMat::from_fn(4, 4, |_, _| c(lcg(&mut st), lcg(&mut st)));
        let a = (&raw + &raw.adjoint()) * c(0.5, 0.0);
        let l = tensor_operators(&a, &CMat::identity(2, 2)).unwrap();
        let w = WitnessSpec {
            op: HybridOperator::observable(l, cfg.tol).unwrap(),
            alpha0: None,
        };
        let opts = SeesawOptions {
            restarts: 12,
            seed: 11,
            ..SeesawOptions::default()
        };
        let result = seesaw_solve(&w, &opts).unwrap();
        let (eigs, _) = hermitian_eigen(&a);
        for e in &result.eigenvalues {
            assert!(
                eigs.iter().any(|l| (l - e.g).abs() < 1e-6),
                "{} not an eigenvalue of the factor",
                e.g
            );
        }
        assert_abs_diff_eq!(result.g_max, eigs[eigs.len() - 1], epsilon = 1e-8);
        assert_abs_diff_eq!(result.g_min, eigs[0], epsilon = 1e-8);
    }

    #[test]
    fn maximizing_branch_is_monotone() {
        let cfg = FockConfig::default();
        let w = cat_witness(1.0, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut a1 = random_unit_vector(&mut rng, cfg.osc_dim(), true);
        let mut a2 = random_unit_vector(&mut rng, 2, true);
        let mut prev = product_rayleigh(&w.op.mat, &a1, &a2);
        for _ in 0..10 {
            let l_a2 = reduce_witness(&w.op.mat, &a2, Subsystem::Qubit).unwrap();
            let (_, new_a1) = extremal_eigenvector(&l_a2, Branch::Max, Some(&a1));
            a1 = new_a1;
            let l_a1 = reduce_witness(&w.op.mat, &a1, Subsystem::Oscillator).unwrap();
            let (_, new_a2) = extremal_eigenvector(&l_a1, Branch::Max, Some(&a2));
            a2 = new_a2;
            let g = product_rayleigh(&w.op.mat, &a1, &a2);
            assert!(g >= prev - 1e-12, "{g} dropped below {prev}");
            prev = g;
        }
    }

    #[test]
    fn seesaw_is_deterministic_in_the_seed() {
        let cfg = FockConfig::default();
        let w = cat_witness(0.8, &cfg).unwrap();
        let opts = SeesawOptions {
            restarts: 6,
            seed: 21,
            ..SeesawOptions::default()
        };
        let r1 = seesaw_solve(&w, &opts).unwrap();
        let r2 = seesaw_solve(&w, &opts).unwrap();
        let g1: Vec<f64> = r1.eigenvalues.iter().map(|e| e.g).collect();
        let g2: Vec<f64> = r2.eigenvalues.iter().map(|e| e.g).collect();
        assert_eq!(g1, g2);
        assert_eq!(r1.non_converged, r2.non_converged);
    }

    #[test]
    fn unconverged_runs_are_not_reported() {
        let cfg = FockConfig::default();
        let w = cat_witness(1.0, &cfg).unwrap();
        let opts = SeesawOptions {
            restarts: 4,
            max_iter: 1,
            seed: 5,
            ..SeesawOptions::default()
        };
        assert!(matches!(seesaw_solve(&w, &opts), Err(Error::Internal(_))));
    }

    #[test]
    fn verdicts_across_dephasing_levels() {
        let cfg = FockConfig::default();
        // no dephasing: violated for every alpha0 > 0
        for alpha0 in [0.25, 0.5, 1.0, 2.0] {
            let w = cat_witness(alpha0, &cfg).unwrap();
            let rho =
                dephased_cat(&CatParams::dephased(alpha0, Sigma::Finite(0.0)).unwrap(), &cfg)
                    .unwrap();
            let v = witness_verdict(&rho, &w, SepBounds::analytic_cat(alpha0), 1e-9).unwrap();
            assert!(v.entangled, "alpha0 = {alpha0}");
        }
        // moderate dephasing: detected only beyond the threshold amplitude
        let sigma = Sigma::Finite(0.5f64.sqrt());
        for (alpha0, expect) in [(0.5, false), (0.6, true)] {
            let w = cat_witness(alpha0, &cfg).unwrap();
            let rho = dephased_cat(&CatParams::dephased(alpha0, sigma).unwrap(), &cfg).unwrap();
            let v = witness_verdict(&rho, &w, SepBounds::analytic_cat(alpha0), 1e-9).unwrap();
            assert_eq!(v.entangled, expect, "alpha0 = {alpha0}");
        }
        // strong dephasing: tau below 1/2, never detected
        let strong = Sigma::Finite(2.0f64.sqrt());
        for alpha0 in [0.25, 0.5, 1.0, 2.0, 3.0] {
            let w = cat_witness(alpha0, &cfg).unwrap();
            let rho = dephased_cat(&CatParams::dephased(alpha0, strong).unwrap(), &cfg).unwrap();
            let v = witness_verdict(&rho, &w, SepBounds::analytic_cat(alpha0), 1e-9).unwrap();
            assert!(!v.entangled, "alpha0 = {alpha0}");
        }
    }

    #[test]
    fn classical_mixture_is_never_flagged() {
        let cfg = FockConfig::default();
        let rho = crate::states::classical_cat_mixture(1.0, &cfg).unwrap();
        let w = cat_witness(1.0, &cfg).unwrap();
        let v = witness_verdict(&rho, &w, SepBounds::analytic_cat(1.0), 1e-9).unwrap();
        assert!(!v.entangled);
        assert_abs_diff_eq!(v.expectation, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn thresholds_match_the_closed_form() {
        let t0 = detection_threshold(0.0).unwrap();
        assert_eq!(t0.tau_threshold, 1.0);
        assert!(t0.sigma_threshold.is_none());
        let t = detection_threshold(1.0).unwrap();
        assert_abs_diff_eq!(t.tau_threshold, 0.567_667_641_618_306_3, epsilon = 1e-14);
        assert!(t.sigma_threshold.is_some());
        // the moderate-dephasing crossing amplitude
        let a = amplitude_threshold((-0.25f64).exp()).unwrap().unwrap();
        assert_abs_diff_eq!(a, 0.540_421_414_647_311_6, epsilon = 1e-12);
        assert!(amplitude_threshold(0.4).unwrap().is_none());
        assert!(amplitude_threshold(1.2).is_err());
        let wide = detection_threshold(10.0).unwrap();
        assert_abs_diff_eq!(wide.tau_threshold, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(
            wide.sigma_threshold.unwrap(),
            (2.0 * 2.0f64.ln()).sqrt(),
            epsilon = 1e-9
        );
    }
}
