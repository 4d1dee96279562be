//! Quadrature kernels: fixed Gauss–Legendre rules, an adaptive bisection
//! integrator for smooth real integrands, and an exact integrator for
//! quadratic polynomials against a complex exponential.

use core::ops::{Add, Mul};

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::math::TAU;
use crate::{Error, Result};

/// Positive abscissae and weights on [-1, 1]; the rule is symmetric.
pub const GAUSS_LEGENDRE_4: [(f64, f64); 2] =
    [(0.861_136_311_594_052_6, 0.347_854_845_137_453_86), (0.339_981_043_584_856_26, 0.652_145_154_862_546_1)];

pub const GAUSS_LEGENDRE_8: [(f64, f64); 4] = [
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
];

pub const GAUSS_LEGENDRE_16: [(f64, f64); 8] = [
    (0.989_400_934_991_649_9, 0.027_152_459_411_754_095),
    (0.944_575_023_073_232_6, 0.062_253_523_938_647_89),
    (0.865_631_202_387_831_7, 0.095_158_511_682_492_78),
    (0.755_404_408_355_003, 0.124_628_971_255_533_87),
    (0.617_876_244_402_643_8, 0.149_595_988_816_576_73),
    (0.458_016_777_657_227_4, 0.169_156_519_395_002_54),
    (0.281_603_550_779_258_9, 0.182_603_415_044_923_6),
    (0.095_012_509_837_637_44, 0.189_450_610_455_068_5),
];

/// Applies a symmetric Gauss–Legendre rule on `[a, b]`.
pub fn gauss<T, F>(rule: &[(f64, f64)], a: f64, b: f64, mut f: F) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    F: FnMut(f64) -> T,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = T::default();
    for &(x, w) in rule {
        acc = acc + (f(mid - half * x) + f(mid + half * x)) * w;
    }
    acc * half
}

/// Composite 16-point rule with `panels` equal panels.
pub fn gauss_composite<T, F>(a: f64, b: f64, panels: usize, mut f: F) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    F: FnMut(f64) -> T,
{
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut acc = T::default();
    for p in 0..panels {
        let lo = a + h * p as f64;
        let hi = if p + 1 == panels { b } else { lo + h };
        acc = acc + gauss(&GAUSS_LEGENDRE_16, lo, hi, &mut f);
    }
    acc
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

const MAX_INTERVALS: usize = 20_000;

/// Adaptive bisection on the 16-point rule. Each interval is accepted when the
/// whole-interval estimate agrees with the sum over its halves to within a
/// share of `tol` proportional to its length.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Integral> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("quadrature tolerance must be positive".into()));
    }
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let total = hi - lo;
    let whole: f64 = gauss(&GAUSS_LEGENDRE_16, lo, hi, &mut f);
    let mut stack: Vec<(f64, f64, f64)> = alloc::vec![(lo, hi, whole)];
    let mut value = 0.0;
    let mut error = 0.0;
    let mut processed = 0usize;
    while let Some((l, r, est)) = stack.pop() {
        processed += 1;
        let m = 0.5 * (l + r);
        let left: f64 = gauss(&GAUSS_LEGENDRE_16, l, m, &mut f);
        let right: f64 = gauss(&GAUSS_LEGENDRE_16, m, r, &mut f);
        let diff = (left + right - est).abs();
        let budget = tol * (r - l) / total;
        if diff <= budget || r - l <= total * 1e-13 || processed >= MAX_INTERVALS {
            value += left + right;
            error += diff;
        } else {
            stack.push((l, m, left));
            stack.push((m, r, right));
        }
    }
    if error > tol && processed >= MAX_INTERVALS {
        return Err(Error::Quadrature { requested: tol, achieved: error });
    }
    Ok(Integral { value: sign * value, error })
}

/// Exact `∫_lo^hi p(x − center) e^{−2πi·freq·x} dx` for a polynomial of
/// degree at most two with coefficients `[c0, c1, c2]` in `(x − center)`.
pub fn poly_exp(coeffs: [f64; 3], center: f64, lo: f64, hi: f64, freq: f64) -> Complex64 {
    if hi <= lo {
        return Complex64::new(0.0, 0.0);
    }
    let [c0, c1, c2] = coeffs;
    let omega = -TAU * freq;
    let u0 = lo - center;
    let u1 = hi - center;
    let q = |u: f64| c0 + u * (c1 + u * c2);
    if omega.abs() * (u1 - u0) < 1.0 {
        // Nearly non-oscillatory: the closed form cancels badly here.
        let inner: Complex64 = gauss(&GAUSS_LEGENDRE_16, u0, u1, |u| Complex64::from_polar(q(u), omega * u));
        return inner * Complex64::from_polar(1.0, omega * center);
    }
    let k = Complex64::new(0.0, omega);
    let k2 = k * k;
    let k3 = k2 * k;
    let anti = |u: f64| {
        let qu = q(u);
        let dq = c1 + 2.0 * c2 * u;
        let ddq = 2.0 * c2;
        Complex64::from_polar(1.0, omega * u) * (qu / k - dq / k2 + ddq / k3)
    };
    (anti(u1) - anti(u0)) * Complex64::from_polar(1.0, omega * center)
}
