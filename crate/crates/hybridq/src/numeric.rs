//! Shared numerical primitives: Gauss–Legendre rules, adaptive Simpson
//! integration, sinc evaluation with a series fallback, and the substream
//! seed derivation used by every randomized routine.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; accurate to machine
/// precision for the rule sizes used here (n ≤ 4096).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th positive root
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and its derivative by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre nodes/weights mapped to the interval [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (
        x.iter().map(|t| c + h * t).collect(),
        w.iter().map(|v| v * h).collect(),
    )
}

/// ∫_a^b f(x) dx by an n-point Gauss–Legendre rule.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre_on(n, a, b);
    x.iter().zip(&w).map(|(xi, wi)| wi * f(*xi)).sum()
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// sin(t)/t with the removable singularity handled by a short series.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-6 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sin() / t
    }
}

/// sin(z)/z for complex z; series fallback near the removable singularity
/// avoids cancellation (the off-diagonal filtered elements evaluate this at
/// complex argument).
pub fn csinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-6 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Repeatedly doubles the node count of an integration rule until two
/// successive results differ by less than `tol` (absolute). `eval` maps a
/// node count to the integral value; `start` is the initial node count.
pub fn converge_doubling<T, F>(start: usize, cap: usize, tol: f64, eval: F) -> Result<(T, usize)>
where
    T: Clone,
    F: Fn(usize) -> T,
    T: DiffNorm,
{
    let mut n = start;
    let mut prev = eval(n);
    while n * 2 <= cap {
        n *= 2;
        let next = eval(n);
        if next.diff_norm(&prev) < tol {
            return Ok((next, n));
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergent(format!(
        "no convergence below {tol:e} up to {cap} nodes per axis"
    )))
}

/// Maximum-absolute-difference metric used by the doubling driver.
pub trait DiffNorm {
    fn diff_norm(&self, other: &Self) -> f64;
}

impl DiffNorm for f64 {
    fn diff_norm(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

impl DiffNorm for Complex64 {
    fn diff_norm(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl<T: DiffNorm> DiffNorm for Vec<T> {
    fn diff_norm(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len());
        self.iter()
            .zip(other)
            .map(|(a, b)| a.diff_norm(b))
            .fold(0.0, f64::max)
    }
}

/// Standard normal draw by Box–Muller; one value per call keeps substream
/// replay trivial.
pub fn standard_normal<R: rand::Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// SplitMix64 step; the canonical stateless mixer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of substream `index` from a master seed. Substreams are
/// independent of scheduling, so parallel consumers stay deterministic.
pub fn substream_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0xA076_1D64_78BD_642F)))
}
