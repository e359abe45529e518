//! Deterministic derivation of per-task RNG seeds from a root seed.

/// Derives an independent seed for task `index` from `root`.
///
/// Uses the splitmix64 finalizer so consecutive indices map to uncorrelated
/// seeds. Results depend only on `(root, index)`, never on scheduling, so
/// parallel consumers stay reproducible at any thread count.
pub(crate) fn derive_seed(root: u64, index: u64) -> u64 {
    let mut z = root ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
