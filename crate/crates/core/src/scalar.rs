//! Float helpers that work without `std`.

use num_complex::Complex64;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn cabs(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

#[inline]
pub(crate) fn cabs2(z: Complex64) -> f64 {
    z.re * z.re + z.im * z.im
}

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub(crate) fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `⌈a / b⌉` for positive integers.
#[inline]
pub(crate) fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// `Some(r)` when `n = r²`.
pub(crate) fn exact_sqrt(n: usize) -> Option<usize> {
    let r = sqrt(n as f64) as usize;
    (r.saturating_sub(1)..=r + 1).find(|&k| k * k == n)
}
