use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{domain, Result};

/// Gauss–Hermite rule for expectations over a standard normal variable:
/// `E[f(t)] ≈ Σ w_i f(t_i)` with `Σ w_i = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Normalised probabilists' Hermite values `He_k(t)/sqrt(k!)` for
/// `k = n - 1` and `k = n`.
fn hermite_pair(n: usize, t: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = (t * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (prev, cur)
}

/// Nodes from the eigen-decomposition of the Jacobi matrix of the
/// probabilists' Hermite polynomials (Golub–Welsch), polished by Newton
/// steps. Weights come from `w = 1/(n h_{n-1}(t)²)` rather than from
/// eigenvector components, so the far-out weights keep full relative
/// accuracy even where they are many orders of magnitude below one.
pub fn gauss_hermite(n: usize) -> Result<GaussHermite> {
    if n == 0 {
        return domain("Gauss-Hermite rule needs at least one node");
    }
    let jacobi = DMatrix::from_fn(n, n, |r, c| {
        if r + 1 == c || c + 1 == r {
            (r.max(c) as f64).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    nodes.sort_by(f64::total_cmp);
    let root_n = (n as f64).sqrt();
    for t in nodes.iter_mut() {
        for _ in 0..3 {
            let (h_prev, h_n) = hermite_pair(n, *t);
            *t -= h_n / (root_n * h_prev);
        }
    }
    // The rule is symmetric; enforce it exactly.
    for i in 0..n / 2 {
        let m = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -m;
        nodes[n - 1 - i] = m;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let raw: Vec<f64> = nodes
        .iter()
        .map(|&t| {
            let (h_prev, _) = hermite_pair(n, t);
            1.0 / (n as f64 * h_prev * h_prev)
        })
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(GaussHermite {
        nodes,
        weights: raw.iter().map(|w| w / total).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normal_moments_are_exact() {
        let rule = gauss_hermite(21).unwrap();
        let moment = |k: i32| -> f64 {
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(t, w)| w * t.powi(k))
                .sum()
        };
        assert_abs_diff_eq!(moment(0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(moment(1), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(moment(2), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(moment(4), 3.0, epsilon = 1e-11);
        assert_abs_diff_eq!(moment(6), 15.0, epsilon = 1e-9);
    }

    #[test]
    fn tail_weights_have_relative_accuracy() {
        // Outermost weight of the 31-point rule, from an independent
        // evaluation of n!/(n² He_{n-1}(t)²) with refined roots.
        let rule = gauss_hermite(31).unwrap();
        let w = rule.weights[0];
        assert!((w / rule.weights[30] - 1.0).abs() < 1e-12);
        assert!(w > 0.0 && w < 1e-20, "w = {w:e}");
        // E[t^60] = 59!! is reproduced to relative precision.
        let m60: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(t, w)| w * t.powi(60))
            .sum();
        let double_factorial: f64 = (1..=59).step_by(2).map(|k| k as f64).product();
        assert!(
            (m60 / double_factorial - 1.0).abs() < 1e-10,
            "{m60:e} vs {double_factorial:e}"
        );
    }

    #[test]
    fn three_point_rule() {
        let rule = gauss_hermite(3).unwrap();
        assert_abs_diff_eq!(rule.nodes[0], -(3f64).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(rule.nodes[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rule.weights[0], 1.0 / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rule.weights[1], 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn characteristic_function() {
        // E[cos(k t)] = exp(-k²/2)
        let rule = gauss_hermite(31).unwrap();
        let k = 1.5f64;
        let approx: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(t, w)| w * (k * t).cos())
            .sum();
        assert_abs_diff_eq!(approx, (-k * k / 2.0).exp(), epsilon = 1e-12);
    }
}
