//! Modified Bessel functions: I by ascending series, K by the cosh integral.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::tanh_sinh;

/// Modified Bessel I of nonnegative integer order, ascending series.
pub fn bessel_i(order: u32, x: f64, tol: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_i needs x >= 0, got {x}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("bessel_i tolerance must be positive, got {tol}")));
    }
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    let tol = tol.max(1e-16);
    let h = 0.5 * x;
    let mut term = 1.0f64;
    for j in 1..=order {
        term *= h / f64::from(j);
    }
    let mut sum = term;
    let h2 = h * h;
    let mut small = 0u32;
    for k in 0..20000u32 {
        term *= h2 / (f64::from(k + 1) * f64::from(order + k + 1));
        sum += term;
        if term <= tol * sum {
            small += 1;
            if small == 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence(format!("bessel_i series stalled at order {order}, x = {x}")))
}

/// Modified Bessel K for real or purely imaginary order, through
/// K_{sigma + i tau}(x) = integral over t >= 0 of
/// e^{-x cosh t} cosh(sigma t) cos(tau t), real whenever sigma * tau = 0.
pub fn bessel_k(order: Complex64, x: f64, tol: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_k needs x > 0, got {x}")));
    }
    if !(tol > 0.0) || !order.re.is_finite() || !order.im.is_finite() {
        return Err(Error::Domain("bessel_k needs a finite order and positive tolerance".into()));
    }
    let sigma = if order.re.abs() <= 1e-9 { 0.0 } else { order.re.abs() };
    let tau = if order.im.abs() <= 1e-9 { 0.0 } else { order.im.abs() };
    if sigma != 0.0 && tau != 0.0 {
        return Err(Error::UnsupportedOrder(format!(
            "bessel_k supports real or purely imaginary order, got {order}"
        )));
    }
    // Cut the integral where the envelope e^{-x cosh t + sigma t} is below 1e-19.
    let mut t_max = 1.0f64;
    while x * t_max.cosh() - sigma * t_max < 45.0 {
        t_max += 0.5;
        if t_max > 250.0 {
            return Err(Error::NonConvergence(format!("no practical cutoff for K at x = {x}")));
        }
    }
    // Envelope peak: d/dt (-x cosh t + sigma t) = 0 at t = asinh(sigma / x).
    let peak = if sigma > 0.0 {
        let ts = (sigma / x).asinh();
        (sigma * ts - (x * x + sigma * sigma).sqrt()).exp()
    } else {
        (-x).exp()
    };
    let g = |t: f64| (-x * t.cosh()).exp() * (sigma * t).cosh() * (tau * t).cos();
    let abs_floor = tol * peak * t_max;
    let r = tanh_sinh(g, 0.0, t_max, tol.max(1e-14), abs_floor)?;
    Ok(r.value)
}

/// The Mellin-closed MeijerG case G^{2,0}_{0,2}(x | -; b1, b2), restricted to
/// integer b1 - b2: reduces to 2 x^{(b1+b2)/2} K_{b1-b2}(2 sqrt x).
pub fn meijer_g2002(x: f64, b1: f64, b2: f64, tol: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("meijer_g2002 needs x > 0, got {x}")));
    }
    let nu = b1 - b2;
    if (nu - nu.round()).abs() > 1e-9 {
        return Err(Error::UnsupportedOrder(format!(
            "meijer_g2002 restricted to integer b1 - b2, got {b1} - {b2}"
        )));
    }
    let order = Complex64::new(nu.round().abs(), 0.0);
    let k = bessel_k(order, 2.0 * x.sqrt(), tol)?;
    Ok(2.0 * x.powf(0.5 * (b1 + b2)) * k)
}
