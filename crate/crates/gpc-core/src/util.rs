//! Small numeric helpers shared across modules.

/// Compensated (Neumaier) summation.
///
/// Keeps the running error of long mixed-magnitude sums near one ulp of the
/// result instead of growing with the term count.
pub(crate) fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// FNV-1a over a byte stream; used for stable diagram digests.
pub(crate) fn fnv1a64<I: IntoIterator<Item = u8>>(bytes: I) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x1000_0000_01b3);
    }
    hash
}
