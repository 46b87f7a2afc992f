//! Euclidean projection onto the probability simplex.

/// Weights below this are clipped to zero after projection.
pub const CLIP: f64 = 1e-12;

/// Projects `v` onto `{x >= 0, sum x = 1}` by the sort-and-threshold rule,
/// then clips tiny weights and renormalizes.
pub fn project(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty());
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    let mut x: Vec<f64> = v.iter().map(|&vi| (vi - theta).max(0.0)).collect();
    x.iter_mut().filter(|w| **w < CLIP).for_each(|w| *w = 0.0);
    let sum: f64 = x.iter().sum();
    if sum > 0.0 {
        x.iter_mut().for_each(|w| *w /= sum);
    } else {
        let n = x.len() as f64;
        x.iter_mut().for_each(|w| *w = 1.0 / n);
    }
    x
}
