//! Same-cell integral of the power kernel.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Gauss-Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).expect("n >= 1"));
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    rule.as_node_weight_pairs()
        .iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .collect()
}

const FACE_NODES: usize = 24;

/// `int_Q int_Q |x - y|^gamma dx dy` for a box `Q` with the given sides,
/// `gamma > -d`.
///
/// With `z = x - y` the integral is `2^d int_{[0,h]} prod_i (h_i - z_i) |z|^gamma dz`.
/// The positive box is split into pyramids over its far faces `z_j = h_j`;
/// on the segment `z = lambda w` the integrand is a polynomial in `lambda`
/// times `lambda^gamma`, integrated in closed form, and the remaining face
/// integral of a smooth function uses Gauss-Legendre.
pub fn self_interaction(sides: &[f64], gamma: f64) -> f64 {
    let d = sides.len();
    assert!(gamma > -(d as f64), "kernel exponent must exceed -d");
    let mut total = 0.0;
    for j in 0..d {
        // Tensor rule on the face: free axes i != j range over [0, h_i].
        let free: Vec<usize> = (0..d).filter(|i| *i != j).collect();
        let rules: Vec<Vec<(f64, f64)>> = free
            .iter()
            .map(|i| gauss_legendre(FACE_NODES, 0.0, sides[*i]))
            .collect();
        let count: usize = rules.iter().map(Vec::len).product();
        let mut w = vec![0.0; d];
        w[j] = sides[j];
        let mut face = 0.0;
        for flat in 0..count {
            let mut rest = flat;
            let mut weight = 1.0;
            for (r, axis) in rules.iter().zip(&free) {
                let (x, wx) = r[rest % r.len()];
                rest /= r.len();
                w[*axis] = x;
                weight *= wx;
            }
            // prod_i (h_i - lambda w_i) as coefficients in lambda.
            let mut poly = vec![1.0];
            for i in 0..d {
                let mut next = vec![0.0; poly.len() + 1];
                for (k, c) in poly.iter().enumerate() {
                    next[k] += c * sides[i];
                    next[k + 1] -= c * w[i];
                }
                poly = next;
            }
            let radial: f64 = poly
                .iter()
                .enumerate()
                .map(|(k, c)| c / (gamma + d as f64 + k as f64))
                .sum();
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            face += weight * norm.powf(gamma) * radial;
        }
        total += sides[j] * face;
    }
    2f64.powi(d as i32) * total
}
