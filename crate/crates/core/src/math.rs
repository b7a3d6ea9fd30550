//! Float helpers routed through `libm` so the crate stays `no_std`.

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn powi(x: f64, k: i64) -> f64 {
    libm::pow(x, k as f64)
}

/// `⌈log_{base}(x)⌉` for `x ≥ 1`, `base > 1`.
pub(crate) fn ceil_log(base: f64, x: f64) -> u64 {
    if x <= 1.0 {
        return 0;
    }
    ceil(ln(x) / ln(base)) as u64
}

/// `⌈log₂ x⌉` for integers, with `⌈log₂ 0⌉ = ⌈log₂ 1⌉ = 0`.
pub(crate) fn ceil_log2_usize(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}
