//! Float helpers shared across modules. Everything goes through `libm` so the
//! crate stays `no_std` and results do not depend on the platform libm.

pub(crate) use core::f64::consts::PI;
pub(crate) const TAU: f64 = 2.0 * PI;

#[inline]
pub(crate) fn sqr(x: f64) -> f64 {
    x * x
}

/// Least-squares slope of `ys` against `xs`.
pub(crate) fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

pub(crate) fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}
