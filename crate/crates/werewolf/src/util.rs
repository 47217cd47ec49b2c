//! Deterministic seed mixing shared by the rule engine and the arena.

/// splitmix64 finalizer.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds any number of parts into one well-mixed seed.
pub(crate) fn mix(parts: &[u64]) -> u64 {
    let mut acc = 0x517C_C1B7_2722_0A95;
    for &part in parts {
        acc = splitmix64(acc ^ part);
    }
    acc
}

/// Uniform index in `0..n` derived from the mixed parts.
pub(crate) fn pick(parts: &[u64], n: usize) -> usize {
    debug_assert!(n > 0);
    (mix(parts) % n as u64) as usize
}

/// Uniform draw in `[0, 1)` derived from the mixed parts.
pub(crate) fn unit(parts: &[u64]) -> f64 {
    (mix(parts) >> 11) as f64 / (1u64 << 53) as f64
}
