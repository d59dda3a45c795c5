//! Exhaustive enumeration of a regular grid on the probability simplex.

use crate::core::SimplexPoint;

/// All points of the k-simplex whose coordinates are multiples of
/// 1/resolution, in lexicographic order. There are
/// C(resolution + k - 1, k - 1) of them.
pub fn simplex_grid(k: usize, resolution: usize) -> Vec<SimplexPoint> {
    assert!(k >= 2, "need at least two classes");
    assert!(resolution >= 1, "resolution must be positive");
    let mut out = Vec::new();
    let mut counts = vec![0usize; k];
    fill(&mut out, &mut counts, 0, resolution, resolution);
    out
}

fn fill(
    out: &mut Vec<SimplexPoint>,
    counts: &mut [usize],
    pos: usize,
    remaining: usize,
    resolution: usize,
) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        let probs = counts
            .iter()
            .map(|&c| c as f64 / resolution as f64)
            .collect();
        out.push(SimplexPoint::new(probs).expect("grid point sums to 1"));
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        fill(out, counts, pos + 1, remaining - c, resolution);
    }
}
