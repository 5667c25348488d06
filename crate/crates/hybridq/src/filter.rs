//! Regularization filters for the phase-space quasiprobability.
//!
//! A filter is a smooth kernel Ω̃ of width w whose Fourier transform Ω has
//! compact support; convolving the (possibly highly singular) quasiprobability
//! with Ω̃ yields a regular function whose negativities still witness
//! nonclassicality. Alternative kernels plug in behind [`PhaseSpaceFilter`];
//! the sinc² filter is the one shipped.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::sinc;

/// Strategy interface for regularization kernels.
///
/// The transform convention is fixed crate-wide:
/// Ω(β) = ∫ d²α Ω̃(α) e^{βα∗−β∗α}, so that the filtered quasiprobability is
/// P_Ω(α) = (1/π²) ∫ d²β Φ(β) Ω(β) e^{αβ∗−α∗β} with Φ the normally-ordered
/// characteristic function.
pub trait PhaseSpaceFilter: Sync {
    /// Kernel value Ω̃(α) in phase space.
    fn value(&self, alpha: Complex64) -> f64;

    /// Fourier transform Ω(β); must vanish outside the support box.
    fn transform(&self, beta: Complex64) -> Complex64;

    /// Half-width of the square support box of Ω in β.
    fn support_halfwidth(&self) -> f64;

    /// Identifier recorded in output manifests.
    fn name(&self) -> &'static str;
}

/// The product sinc² kernel
/// Ω̃(α) = (w²/π²)·sinc²(w·Re α)·sinc²(w·Im α),
/// whose transform is a product of triangular hats supported on |u|,|v| ≤ w.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SincSqFilter {
    width: f64,
}

impl SincSqFilter {
    /// Requires a finite positive width (the unfiltered w = ∞ limit is out
    /// of scope).
    pub fn new(width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidParam(format!(
                "filter width must satisfy 0 < w < inf, got {width}"
            )));
        }
        Ok(Self { width })
    }

    pub fn width(&self) -> f64 {
        self.width
    }
}

impl PhaseSpaceFilter for SincSqFilter {
    fn value(&self, alpha: Complex64) -> f64 {
        let w = self.width;
        let sx = sinc(w * alpha.re);
        let sy = sinc(w * alpha.im);
        w * w / (std::f64::consts::PI * std::f64::consts::PI) * sx * sx * sy * sy
    }

    fn transform(&self, beta: Complex64) -> Complex64 {
        let w = self.width;
        let hat = |t: f64| (1.0 - t.abs() / w).max(0.0);
        Complex64::new(hat(beta.re) * hat(beta.im), 0.0)
    }

    fn support_halfwidth(&self) -> f64 {
        self.width
    }

    fn name(&self) -> &'static str {
        "sinc2"
    }
}

/// Looks up a filter by its registered name. Only the sinc² kernel ships;
/// external kernels implement [`PhaseSpaceFilter`] directly.
pub fn filter_by_name(name: &str, width: f64) -> Result<Box<dyn PhaseSpaceFilter>> {
    match name {
        "sinc2" => Ok(Box::new(SincSqFilter::new(width)?)),
        other => Err(Error::InvalidParam(format!(
            "unknown filter '{other}' (registered: sinc2)"
        ))),
    }
}
