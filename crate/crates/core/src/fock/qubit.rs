use nalgebra::Matrix4;

use super::{FockDensityMatrix, C64};
use crate::error::{Error, Result};

const DEGENERATE_PROJECTION: f64 = 1e-12;
const EIGEN_TOLERANCE: f64 = 1e-9;

/// Two-qubit density matrix in the basis `|00⟩, |01⟩, |10⟩, |11⟩` (mode A
/// first), obtained by keeping the vacuum and one-photon levels of each mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    pub rho: Matrix4<C64>,
    /// Trace of the kept block before renormalisation.
    pub projection_probability: f64,
}

impl TwoQubitState {
    pub fn from_matrix(rho: Matrix4<C64>) -> Result<Self> {
        let tr = rho.trace().re;
        if tr < DEGENERATE_PROJECTION {
            return Err(Error::Numerical(format!(
                "two-qubit matrix has trace {tr:e}"
            )));
        }
        Ok(Self {
            rho: rho / C64::new(tr, 0.0),
            projection_probability: 1.0,
        })
    }

    /// Partial transpose on the second qubit.
    pub fn partial_transpose(&self) -> Matrix4<C64> {
        Matrix4::from_fn(|r, c| {
            let (a, b) = (r / 2, r % 2);
            let (a2, b2) = (c / 2, c % 2);
            self.rho[(a * 2 + b2, a2 * 2 + b)]
        })
    }
}

pub fn qubit_project(rho: &FockDensityMatrix) -> Result<TwoQubitState> {
    let dims = rho.dims();
    if dims.len() != 2 || dims[0] < 2 || dims[1] < 2 {
        return Err(Error::Structural(format!(
            "qubit projection needs two modes with >= 2 levels, got {dims:?}"
        )));
    }
    let dc = dims[1];
    let idx = |k: usize| (k / 2) * dc + (k % 2);
    let block = Matrix4::from_fn(|r, c| rho.data()[(idx(r), idx(c))]);
    let p = block.trace().re;
    if p < DEGENERATE_PROJECTION {
        return Err(Error::Numerical(format!(
            "projection onto the qubit subspace has probability {p:e}"
        )));
    }
    Ok(TwoQubitState {
        rho: block / C64::new(p, 0.0),
        projection_probability: p,
    })
}

/// Wootters concurrence `max(0, λ1 - λ2 - λ3 - λ4)`, with `λi` the square
/// roots of the eigenvalues of `ρ (Y⊗Y) ρ* (Y⊗Y)` in decreasing order.
///
/// The eigenvalues come from a complex Schur decomposition of that product.
/// Eigenvalues that vanish exactly carry rounding noise of order `ε`, so the
/// result is accurate to about `sqrt(ε) ≈ 1e-8`.
pub fn concurrence(state: &TwoQubitState) -> Result<f64> {
    let yy = Matrix4::from_fn(|r, c| match (r, c) {
        (0, 3) | (3, 0) => C64::new(-1.0, 0.0),
        (1, 2) | (2, 1) => C64::new(1.0, 0.0),
        _ => C64::new(0.0, 0.0),
    });
    let flipped = yy * state.rho.map(|z| z.conj()) * yy;
    let product = state.rho * flipped;
    let eigenvalues = product
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))?;
    let scale = product.norm().max(1.0);
    let mut lambdas = Vec::with_capacity(4);
    for ev in eigenvalues.iter() {
        if ev.re < -EIGEN_TOLERANCE * scale || ev.im.abs() > EIGEN_TOLERANCE * scale {
            return Err(Error::Numerical(format!(
                "concurrence eigenvalue {ev} is not a non-negative real"
            )));
        }
        lambdas.push(ev.re.max(0.0).sqrt());
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Negative partial transpose (entangled, for two qubits).
pub fn is_npt(state: &TwoQubitState, tolerance: f64) -> bool {
    let pt = state.partial_transpose();
    let herm = (pt + pt.adjoint()) * C64::new(0.5, 0.0);
    herm.symmetric_eigenvalues().iter().any(|&e| e < -tolerance)
}
