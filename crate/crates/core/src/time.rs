//! Time arithmetic. All internal times are integer microseconds relative to
//! the contact-plan epoch.

/// Microseconds.
pub type Micros = u64;

pub const US_PER_MS: Micros = 1_000;

#[inline]
pub const fn ms(v: u64) -> Micros {
    v * US_PER_MS
}

#[inline]
pub fn as_ms(v: Micros) -> f64 {
    v as f64 / US_PER_MS as f64
}

/// Converts fractional milliseconds to microseconds, rounding to nearest.
#[inline]
pub fn from_ms_f64(v: f64) -> Micros {
    libm::round(v * US_PER_MS as f64) as Micros
}

/// Length of the overlap of `[a0, a1)` and `[b0, b1)`.
#[inline]
pub fn overlap(a0: Micros, a1: Micros, b0: Micros, b1: Micros) -> Micros {
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    hi.saturating_sub(lo)
}
