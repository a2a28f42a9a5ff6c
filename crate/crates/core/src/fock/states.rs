use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, Matrix4, Vector4};

use super::operators::{annihilation_matrix, displacement_matrix};
use super::{FockDensityMatrix, C64};
use crate::error::{domain, ensure_finite, Error, Result};
use crate::gaussian::GaussianTwoModeState;

/// Two-mode squeezed vacuum `sqrt(1-t²) Σ tⁿ |n, n⟩` with `t = tanh r`,
/// cut at `dims` levels per mode and renormalised.
pub fn tmsv_state(r: f64, dims: usize) -> Result<FockDensityMatrix> {
    ensure_finite("r", r)?;
    if r < 0.0 {
        return domain(format!("squeezing r must be >= 0, got {r}"));
    }
    let t = r.tanh();
    let norm = (1.0 - t * t).sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); dims * dims];
    for n in 0..dims {
        amps[n * dims + n] = C64::new(norm * t.powi(n as i32), 0.0);
    }
    FockDensityMatrix::from_pure(vec![dims, dims], &amps)?.normalized()
}

/// `(D(α)|1⟩_A |0⟩_C + D(α)|0⟩_A |1⟩_C)/√2` on the truncated basis,
/// renormalised if the displacement pushes weight above the cutoff.
pub fn single_photon_entangled_input(alpha: C64, dims: usize) -> Result<FockDensityMatrix> {
    if dims < 2 {
        return domain("single-photon input needs at least two levels per mode");
    }
    let d = displacement_matrix(alpha, dims);
    let mut amps = vec![C64::new(0.0, 0.0); dims * dims];
    for n in 0..dims {
        amps[n * dims] += d[(n, 1)] * FRAC_1_SQRT_2;
        amps[n * dims + 1] += d[(n, 0)] * FRAC_1_SQRT_2;
    }
    FockDensityMatrix::from_pure(vec![dims, dims], &amps)?.normalized()
}

/// `Tr[ρ (O_A ⊗ O_C)]` for single-mode operators, without forming the
/// Kronecker product.
fn product_expectation(rho: &FockDensityMatrix, op_a: &DMatrix<C64>, op_c: &DMatrix<C64>) -> C64 {
    let dc = rho.dims()[1];
    let nonzero = |m: &DMatrix<C64>| -> Vec<(usize, usize, C64)> {
        let mut v = Vec::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                if m[(r, c)] != C64::new(0.0, 0.0) {
                    v.push((r, c, m[(r, c)]));
                }
            }
        }
        v
    };
    let (ea, ec) = (nonzero(op_a), nonzero(op_c));
    let data = rho.data();
    let mut total = C64::new(0.0, 0.0);
    // Tr[ρ O] = Σ ρ_{(a',c'),(a,c)} O_{(a,c),(a',c')}
    for &(ra, ca, va) in &ea {
        for &(rc, cc, vc) in &ec {
            total += data[(ca * dc + cc, ra * dc + rc)] * va * vc;
        }
    }
    total
}

/// Means and symmetrised covariances of `(X_A, P_A, X_C, P_C)` for a
/// two-mode truncated state.
pub fn gaussian_moments(rho: &FockDensityMatrix) -> Result<GaussianTwoModeState> {
    let dims = rho.dims();
    if dims.len() != 2 {
        return Err(Error::Structural(format!(
            "moment extraction needs two modes, got {dims:?}"
        )));
    }
    let rho = rho.normalized()?;
    let quadratures = |d: usize| {
        let a = annihilation_matrix(d);
        let x = (&a + a.adjoint()) * C64::new(FRAC_1_SQRT_2, 0.0);
        let p = (&a - a.adjoint()) * C64::new(0.0, -FRAC_1_SQRT_2);
        [x, p]
    };
    let qa = quadratures(dims[0]);
    let qc = quadratures(dims[1]);
    let id_a = DMatrix::<C64>::identity(dims[0], dims[0]);
    let id_c = DMatrix::<C64>::identity(dims[1], dims[1]);
    // Quadrature k as a (mode-A factor, mode-C factor) pair.
    let factor = |k: usize| -> (&DMatrix<C64>, &DMatrix<C64>) {
        if k < 2 {
            (&qa[k], &id_c)
        } else {
            (&id_a, &qc[k - 2])
        }
    };
    let mean = Vector4::from_fn(|i, _| {
        let (oa, oc) = factor(i);
        product_expectation(&rho, oa, oc).re
    });
    let mut cov = Matrix4::zeros();
    for i in 0..4 {
        for j in i..4 {
            let second = if (i < 2) == (j < 2) {
                // Same mode: symmetrise the single-mode product.
                let (ai, ci) = factor(i);
                let (aj, cj) = factor(j);
                let half = C64::new(0.5, 0.0);
                if i < 2 {
                    product_expectation(&rho, &((ai * aj + aj * ai) * half), &id_c)
                } else {
                    product_expectation(&rho, &id_a, &((ci * cj + cj * ci) * half))
                }
            } else {
                // Different modes commute.
                product_expectation(&rho, factor(i).0, factor(j).1)
            };
            let v = second.re - mean[i] * mean[j];
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    GaussianTwoModeState::from_moments(mean, cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tmsv_weights_at_half() {
        let rho = tmsv_state(0.5, 16).unwrap();
        let p = |n: usize| rho.data()[(n * 16 + n, n * 16 + n)].re;
        assert_abs_diff_eq!(p(0), 0.786, epsilon = 5e-4);
        assert_abs_diff_eq!(p(1), 0.168, epsilon = 5e-4);
        assert_abs_diff_eq!(p(2), 0.036, epsilon = 5e-4);
        // the remaining weight is tanh(0.5)^6 = 0.00974
        assert_abs_diff_eq!(
            1.0 - p(0) - p(1) - p(2),
            0.5f64.tanh().powi(6),
            epsilon = 1e-10
        );
    }

    #[test]
    fn tmsv_moments_match_gaussian() {
        let m = gaussian_moments(&tmsv_state(0.3, 16).unwrap()).unwrap();
        let g = crate::gaussian::tmsv_state(0.3).unwrap();
        assert!((m.cov - g.cov).amax() < 1e-10);
        assert!(m.mean.amax() < 1e-14);
    }

    #[test]
    fn single_photon_state() {
        let rho = single_photon_entangled_input(C64::new(0.0, 0.0), 16).unwrap();
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-10);
        let reduced_c = rho.reduced(1);
        assert_abs_diff_eq!(reduced_c[(0, 0)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(reduced_c[(1, 1)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(reduced_c[(0, 1)].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn displaced_single_photon_state_mean() {
        let alpha = C64::new(0.6, 0.0);
        let rho = single_photon_entangled_input(alpha, 20).unwrap();
        let m = gaussian_moments(&rho).unwrap();
        assert_abs_diff_eq!(m.mean[0], std::f64::consts::SQRT_2 * 0.6, epsilon = 1e-8);
        assert!(rho.is_hermitian());
    }
}
