//! Monte-Carlo simulation of the joint (ŷ, σ̂_x) measurement: reproducible
//! finite-sample batches and plug-in moment estimates with bootstrap
//! standard errors, validating the analytic pipeline under sampling noise.
//!
//! Sampling is chunked into fixed-size blocks whose ChaCha8 substreams are
//! derived from (seed, block index), so batches are bit-identical regardless
//! of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measurement::{JointDistribution, Sign};
use crate::numeric::{standard_normal, substream_seed};

/// Algorithm identifier recorded with every batch.
pub const GENERATOR: &str = "chacha8+splitmix64-substreams";

const BLOCK: usize = 4096;

/// A reproducible batch of (y, ±) measurement records.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub records: Vec<(f64, Sign)>,
    pub seed: u64,
    pub generator: &'static str,
    pub source: String,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Inverse-CDF table for the numeric path.
struct CdfTable {
    ys: Vec<f64>,
    /// cumulative mass per sign, unnormalized
    cum: [Vec<f64>; 2],
    totals: [f64; 2],
}

fn tabulate_cdf(dist: &JointDistribution) -> Result<CdfTable> {
    let n = 8192usize;
    let (lo, hi) = (-16.0f64, 16.0f64);
    let h = (hi - lo) / n as f64;
    let ys: Vec<f64> = (0..=n).map(|i| lo + i as f64 * h).collect();
    let mut cum = [vec![0.0; n + 1], vec![0.0; n + 1]];
    let mut totals = [0.0f64; 2];
    for (si, s) in Sign::both().into_iter().enumerate() {
        let mut prev = dist.density(ys[0], s);
        for i in 1..=n {
            let cur = dist.density(ys[i], s);
            cum[si][i] = cum[si][i - 1] + 0.5 * (prev + cur) * h;
            prev = cur;
        }
        totals[si] = cum[si][n];
    }
    let mass = totals[0] + totals[1];
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::AccuracyLoss(format!(
            "distribution mass {mass} over the table window is not 1; support outside"
        )));
    }
    Ok(CdfTable { ys, cum, totals })
}

fn draw_from_table<R: Rng>(rng: &mut R, t: &CdfTable) -> (f64, Sign) {
    let u: f64 = rng.gen::<f64>() * (t.totals[0] + t.totals[1]);
    let (si, s, target) = if u < t.totals[0] {
        (0usize, Sign::Plus, u)
    } else {
        (1usize, Sign::Minus, u - t.totals[0])
    };
    let cum = &t.cum[si];
    let mut lo = 0usize;
    let mut hi = cum.len() - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if cum[mid] <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let seg = cum[hi] - cum[lo];
    let frac = if seg > 0.0 { (target - cum[lo]) / seg } else { 0.5 };
    (t.ys[lo] + frac * (t.ys[hi] - t.ys[lo]), s)
}

fn draw_closed_form<R: Rng>(
    rng: &mut R,
    alpha0: f64,
    tau: f64,
    p_plus: f64,
) -> Result<(f64, Sign)> {
    let s = if rng.gen::<f64>() < p_plus {
        Sign::Plus
    } else {
        Sign::Minus
    };
    // rejection against the standard Gaussian: accept with (1 ± τcos)/2,
    // which is a valid probability because 1 ± τcos ∈ [0, 2]
    loop {
        let y = standard_normal(rng);
        let accept = 0.5 * (1.0 + s.value() * tau * (2.0 * alpha0 * y).cos());
        if !(-1e-12..=1.0 + 1e-12).contains(&accept) {
            return Err(Error::Internal(format!(
                "rejection envelope violated: acceptance {accept}"
            )));
        }
        if rng.gen::<f64>() < accept {
            return Ok((y, s));
        }
    }
}

/// Draws n records from a joint distribution. The closed-form path uses
/// sign-marginal + Gaussian rejection; the numeric path inverts a tabulated
/// CDF. Fixed (distribution, n, seed) give a bit-identical batch.
pub fn sample_joint(dist: &JointDistribution, n: usize, seed: u64) -> Result<SampleBatch> {
    if n < 1 {
        return Err(Error::InvalidParam("need at least one sample".into()));
    }
    let table = match dist {
        JointDistribution::ClosedForm { .. } => None,
        JointDistribution::Numeric { .. } => Some(tabulate_cdf(dist)?),
    };
    let blocks = n.div_ceil(BLOCK);
    let chunks: Vec<Result<Vec<(f64, Sign)>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, b as u64));
            let count = BLOCK.min(n - b * BLOCK);
            let mut out = Vec::with_capacity(count);
            match (dist, &table) {
                (JointDistribution::ClosedForm { params }, _) => {
                    let tau = params.tau();
                    let p_plus = 0.5 * (1.0 + tau * (-2.0 * params.alpha0 * params.alpha0).exp());
                    for _ in 0..count {
                        out.push(draw_closed_form(&mut rng, params.alpha0, tau, p_plus)?);
                    }
                }
                (JointDistribution::Numeric { .. }, Some(t)) => {
                    for _ in 0..count {
                        out.push(draw_from_table(&mut rng, t));
                    }
                }
                _ => unreachable!(),
            }
            Ok(out)
        })
        .collect();
    let mut records = Vec::with_capacity(n);
    for c in chunks {
        records.extend(c?);
    }

    // sanity: sign frequencies within 5 binomial sigmas of the marginal
    let p_plus = dist.marginal_sign(Sign::Plus);
    let freq = records.iter().filter(|(_, s)| *s == Sign::Plus).count() as f64 / n as f64;
    let sigma = (p_plus * (1.0 - p_plus) / n as f64).sqrt().max(1e-12);
    if (freq - p_plus).abs() > 5.0 * sigma {
        return Err(Error::Internal(format!(
            "sign frequency {freq} deviates from marginal {p_plus} by more than 5 sigma"
        )));
    }
    let source = match dist {
        JointDistribution::ClosedForm { params } => format!(
            "closed-form cat: alpha0 = {}, tau = {}",
            params.alpha0,
            params.tau()
        ),
        JointDistribution::Numeric { cfg, .. } => {
            format!("numeric density operator at n_max = {}", cfg.n_max)
        }
    };
    Ok(SampleBatch {
        records,
        seed,
        generator: GENERATOR,
        source,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct EstimateOptions {
    /// Conditioning point for the σ̂_x variance estimate; bins |y−y₀| ≤ width/2.
    pub y_condition: Option<f64>,
    pub bin_width: f64,
    pub bootstrap_resamples: usize,
    pub seed: u64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            y_condition: None,
            bin_width: 0.1,
            bootstrap_resamples: 200,
            seed: 1,
        }
    }
}

/// Point estimate with a bootstrap standard error.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

/// Plug-in estimates of the moment quantities with bootstrap errors.
#[derive(Debug, Clone)]
pub struct MomentEstimates {
    pub n: usize,
    pub p_plus: Estimate,
    pub mean_y: Estimate,
    pub mean_sx: Estimate,
    pub mu1: Estimate,
    pub mu2: Estimate,
    pub mu12: Estimate,
    pub mu1_plus: Estimate,
    pub mu1_minus: Estimate,
    /// 1 − (mean σ̂_x in the conditioning bin)², when requested.
    pub mu2_at_y: Option<Estimate>,
    pub bin_count: Option<usize>,
    pub bootstrap_resamples: usize,
}

#[derive(Default, Clone, Copy)]
struct Sums {
    n: f64,
    n_plus: f64,
    sum_y: f64,
    sum_y2: f64,
    sum_y_plus: f64,
    sum_y2_plus: f64,
    sum_y_minus: f64,
    sum_y2_minus: f64,
    bin_n: f64,
    bin_sum_s: f64,
}

impl Sums {
    fn push(&mut self, y: f64, s: Sign, bin: Option<(f64, f64)>) {
        self.n += 1.0;
        self.sum_y += y;
        self.sum_y2 += y * y;
        match s {
            Sign::Plus => {
                self.n_plus += 1.0;
                self.sum_y_plus += y;
                self.sum_y2_plus += y * y;
            }
            Sign::Minus => {
                self.sum_y_minus += y;
                self.sum_y2_minus += y * y;
            }
        }
        if let Some((y0, w)) = bin {
            if (y - y0).abs() <= 0.5 * w {
                self.bin_n += 1.0;
                self.bin_sum_s += s.value();
            }
        }
    }

    /// (p_plus, mean_y, mean_s, mu1, mu2, mu12, mu1_plus, mu1_minus, mu2_bin)
    fn derive(&self) -> [f64; 9] {
        let n = self.n;
        let p_plus = self.n_plus / n;
        let mean_y = self.sum_y / n;
        let mean_s = (2.0 * self.n_plus - n) / n;
        let mu1 = self.sum_y2 / n - mean_y * mean_y;
        let mu2 = 1.0 - mean_s * mean_s;
        // E[y·s] from the per-sign sums
        let mean_ys = (self.sum_y_plus - self.sum_y_minus) / n;
        let cov = mean_ys - mean_y * mean_s;
        let mu12 = mu1 * mu2 - cov * cov;
        let var_in = |count: f64, sy: f64, sy2: f64| {
            if count > 0.0 {
                sy2 / count - (sy / count).powi(2)
            } else {
                f64::NAN
            }
        };
        let mu1_plus = var_in(self.n_plus, self.sum_y_plus, self.sum_y2_plus);
        let mu1_minus = var_in(n - self.n_plus, self.sum_y_minus, self.sum_y2_minus);
        let mu2_bin = if self.bin_n > 0.0 {
            1.0 - (self.bin_sum_s / self.bin_n).powi(2)
        } else {
            f64::NAN
        };
        [
            p_plus, mean_y, mean_s, mu1, mu2, mu12, mu1_plus, mu1_minus, mu2_bin,
        ]
    }
}

fn stats_of(records: &[(f64, Sign)], bin: Option<(f64, f64)>) -> Sums {
    let mut sums = Sums::default();
    for (y, s) in records {
        sums.push(*y, *s, bin);
    }
    sums
}

/// Plug-in moment estimates with bootstrap standard errors (resampling the
/// records with replacement; the resample streams are substream-seeded and
/// the result is deterministic in (batch, options)).
pub fn estimate_moments(batch: &SampleBatch, opts: &EstimateOptions) -> Result<MomentEstimates> {
    let n = batch.len();
    if n < 100 {
        return Err(Error::InvalidParam(format!(
            "need at least 100 samples for estimation, got {n}"
        )));
    }
    let bin = opts.y_condition.map(|y0| (y0, opts.bin_width));
    let base = stats_of(&batch.records, bin);
    if bin.is_some() && base.bin_n == 0.0 {
        return Err(Error::EmptyBin {
            y: opts.y_condition.unwrap(),
            width: opts.bin_width,
        });
    }
    let point = base.derive();

    let resamples: Vec<[f64; 9]> = (0..opts.bootstrap_resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(
                opts.seed ^ 0x626f_6f74,
                r as u64,
            ));
            let mut sums = Sums::default();
            for _ in 0..n {
                let idx = rng.gen_range(0..n);
                let (y, s) = batch.records[idx];
                sums.push(y, s, bin);
            }
            sums.derive()
        })
        .collect();

    let se = |k: usize| -> f64 {
        let vals: Vec<f64> = resamples
            .iter()
            .map(|r| r[k])
            .filter(|v| v.is_finite())
            .collect();
        if vals.len() < 2 {
            return f64::NAN;
        }
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        (vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (vals.len() - 1) as f64).sqrt()
    };
    let est = |k: usize| Estimate {
        value: point[k],
        std_err: se(k),
    };
    Ok(MomentEstimates {
        n,
        p_plus: est(0),
        mean_y: est(1),
        mean_sx: est(2),
        mu1: est(3),
        mu2: est(4),
        mu12: est(5),
        mu1_plus: est(6),
        mu1_minus: est(7),
        mu2_at_y: bin.map(|_| est(8)),
        bin_count: bin.map(|_| base.bin_n as usize),
        bootstrap_resamples: opts.bootstrap_resamples,
    })
}
