//! Fixed-tree pairwise summation.

/// Sums `values` by recursive halving (left half gets `len / 2` items).
///
/// The reduction tree depends only on the length, so the result is
/// reproducible, and `pairwise_sum(v) == pairwise_sum(&v[..h]) + pairwise_sum(&v[h..])`
/// holds bit-for-bit for `h = v.len() / 2`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}
