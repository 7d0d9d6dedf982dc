//! Gauss hypergeometric function `2F1(a, b; c; z)` for real arguments and `z < 1`.
//!
//! Region map:
//! - `z ∈ [0, 0.5]`: power series.
//! - `z < 0`: Pfaff transformation onto `w = z/(z-1) ∈ (0, 1)`, choosing the
//!   form with positive parameters when one exists; otherwise the power series
//!   for `z >= -0.5` and the first Pfaff form below. That fallback (c below
//!   both a and b) can lose many digits to cancellation; `tol` reports it.
//! - `w ∈ (0.5, 1)`: when `a, b, c > 0` every series term is positive and the
//!   series in `w` is summed directly up to `w = 0.999`. Otherwise, or closer to
//!   one, the linear transformation onto `1 - w` is used, except when `c - a - b`
//!   is within `1e-5` of an integer (series again). If the two transformed
//!   branches cancel badly and the series is positive, the series is used.

use super::gamma::ln_gamma_signed;
use super::Evaluated;
use crate::error::{Error, Result};

const MAX_TERMS: usize = 20_000_000;
const NEAR_INTEGER: f64 = 1e-5;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

fn gamma_ratio(num: &[f64], den: &[f64]) -> f64 {
    let (ln, sign) = ln_gamma_ratio(num, den);
    sign * ln.exp()
}

/// `(ln|Γ(num...)/Γ(den...)|, sign)`; any pole in `den` gives a zero ratio
/// (`ln = -∞`), a pole in `num` is the caller's problem.
fn ln_gamma_ratio(num: &[f64], den: &[f64]) -> (f64, f64) {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for &x in den {
        if is_nonpositive_integer(x) {
            return (f64::NEG_INFINITY, 1.0);
        }
        let (l, s) = ln_gamma_signed(x).expect("not a pole");
        ln -= l;
        sign *= s;
    }
    for &x in num {
        let (l, s) = ln_gamma_signed(x).expect("checked by caller");
        ln += l;
        sign *= s;
    }
    (ln, sign)
}

/// Direct power series; converges for `|z| < 1`.
fn series(a: f64, b: f64, c: f64, z: f64) -> Result<Evaluated> {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut abs_sum = 1.0f64;
    let mut quiet = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        abs_sum += term.abs();
        if term == 0.0 {
            // terminating polynomial
            break;
        }
        if term.abs() <= 1e-17 * sum.abs() {
            quiet += 1;
            if quiet >= 3 && (nf + a).abs() > 1.0 && (nf + b).abs() > 1.0 {
                break;
            }
        } else {
            quiet = 0;
        }
        if n + 1 == MAX_TERMS {
            return Err(Error::Convergence {
                what: format!("2F1 series at z = {z} after {MAX_TERMS} terms"),
                estimate: sum,
                error: term.abs(),
            });
        }
    }
    let tol = if sum == 0.0 {
        f64::EPSILON
    } else {
        (4.0 * f64::EPSILON * abs_sum / sum.abs()).max(f64::EPSILON)
    };
    Ok(Evaluated { value: sum, tol })
}

/// `w ∈ [0, 1)`.
fn unit_interval(a: f64, b: f64, c: f64, w: f64) -> Result<Evaluated> {
    if w <= 0.5 {
        return series(a, b, c, w);
    }
    let positive = a > 0.0 && b > 0.0 && c > 0.0;
    if positive && w <= 0.999 {
        return series(a, b, c, w);
    }
    let s = c - a - b;
    if (s - s.round()).abs() < NEAR_INTEGER {
        return series(a, b, c, w);
    }
    let transformed = linear_transform(a, b, c, w)?;
    if positive && !(transformed.tol <= 1e-10) {
        return series(a, b, c, w);
    }
    Ok(transformed)
}

/// `F(a,b;c;w)` through the two-branch connection formula at `1 - w`.
fn linear_transform(a: f64, b: f64, c: f64, w: f64) -> Result<Evaluated> {
    let s = c - a - b;
    let one_minus = 1.0 - w;
    // F = A1 F(a,b; a+b-c+1; 1-w) + A2 (1-w)^{c-a-b} F(c-a, c-b; c-a-b+1; 1-w)
    let a1 = if is_nonpositive_integer(c - a) || is_nonpositive_integer(c - b) {
        0.0
    } else {
        gamma_ratio(&[c, s], &[c - a, c - b])
    };
    // the second coefficient can overflow while (1-w)^{c-a-b} underflows: combine in logs
    let (ln_a2, sign_a2) = if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        (f64::NEG_INFINITY, 1.0)
    } else {
        ln_gamma_ratio(&[c, -s], &[a, b])
    };
    let a2 = sign_a2 * (ln_a2 + s * one_minus.ln()).exp();
    let (mut t1, mut tol1) = (0.0, 0.0);
    if a1 != 0.0 {
        let f = series(a, b, 1.0 - s, one_minus)?;
        t1 = a1 * f.value;
        tol1 = f.tol;
    }
    let (mut t2, mut tol2) = (0.0, 0.0);
    if a2 != 0.0 {
        let f = series(c - a, c - b, 1.0 + s, one_minus)?;
        t2 = a2 * f.value;
        tol2 = f.tol;
    }
    let value = t1 + t2;
    let spread = t1.abs() * (tol1 + 8.0 * f64::EPSILON) + t2.abs() * (tol2 + 8.0 * f64::EPSILON);
    let tol = if value == 0.0 {
        f64::EPSILON
    } else {
        // cancellation between the two branches amplifies their error
        spread / value.abs()
    };
    Ok(Evaluated { value, tol })
}

/// `2F1(a, b; c; z)` for real `z < 1`.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<Evaluated> {
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("2F1 with c = {c} (non-positive integer)")));
    }
    if !(z < 1.0) {
        return Err(Error::Domain(format!("2F1 argument z = {z} must be < 1")));
    }
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(Error::Domain("2F1 with non-finite parameters".into()));
    }
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(Evaluated { value: 1.0, tol: 0.0 });
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return series(a, b, c, z);
    }
    if z > 0.0 {
        return unit_interval(a, b, c, z);
    }
    // Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1)), or the same with a and b
    // exchanged. A form with positive parameters has no sign changes in its series,
    // whereas the series in z alternates and can cancel badly when |a b / c| is large.
    let positive = |p: f64, q: f64| p > 0.0 && c - q > 0.0 && c > 0.0;
    let (p, q) = if positive(a, b) {
        (a, b)
    } else if positive(b, a) {
        (b, a)
    } else if z >= -0.5 {
        return series(a, b, c, z);
    } else {
        (a, b)
    };
    let w = z / (z - 1.0);
    let inner = unit_interval(p, c - q, c, w)?;
    Ok(Evaluated {
        value: (1.0 - z).powf(-p) * inner.value,
        tol: inner.tol + 4.0 * f64::EPSILON,
    })
}
