//! Special functions behind the closed forms: log-gamma, Gauss 2F1, and the
//! Fox H / Meijer G functions via Mellin-Barnes contour quadrature.

mod foxh;
mod gamma;
mod hyp2f1;

pub use foxh::{fox_h, fox_h_on_line, fox_h_with_tol, mellin_barnes_line, meijer_g, FoxHSpec, MeijerGSpec, DEFAULT_FOX_TOL};
pub use gamma::{gamma_real, ln_gamma, ln_gamma_real, ln_gamma_signed, recip_gamma};
pub use hyp2f1::hyp2f1;

/// A computed value together with an estimate of its achieved relative error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub tol: f64,
}

/// Complex-argument log-gamma.
pub fn log_gamma_complex(z: num_complex::Complex64) -> crate::Result<num_complex::Complex64> {
    ln_gamma(z)
}

/// `2F1(a, b; c; z)` for real `z < 1`.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> crate::Result<Evaluated> {
    hyp2f1(a, b, c, z)
}
