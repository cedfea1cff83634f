/// Four-point Gauss–Legendre rule on `[-1, 1]`.
const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_2),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_2),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
];

/// Nodes and weights of the composite four-point rule on `[0, 1]` with
/// `ceil(1/h)` cells.
pub fn composite(h: f64) -> Vec<(f64, f64)> {
    let cells = (1.0 / h).ceil().max(1.0) as usize;
    let w = 1.0 / cells as f64;
    let mut out = Vec::with_capacity(4 * cells);
    for c in 0..cells {
        let mid = (c as f64 + 0.5) * w;
        for (x, wx) in GL4 {
            out.push((mid + 0.5 * w * x, 0.5 * w * wx));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_degree_seven_exactly() {
        let q = composite(0.7);
        let s: f64 = q.iter().map(|(x, w)| w * x.powi(7)).sum();
        assert!((s - 0.125).abs() < 1e-15);
        assert!((q.iter().map(|p| p.1).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_integrand_converges_at_eighth_order() {
        let err = |h: f64| {
            let s: f64 = composite(h).iter().map(|(x, w)| w * (3.0 * x).exp()).sum();
            (s - ((3.0f64).exp() - 1.0) / 3.0).abs()
        };
        let (a, b) = (err(0.5), err(0.25));
        assert!(a / b > 150.0, "{a} {b}");
    }
}
