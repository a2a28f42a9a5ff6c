//! Density matrices on a truncated photon-number basis.
//!
//! Multi-mode states are stored with the first mode as the most significant
//! index: for modes `(A, C)` with cutoffs `(d_A, d_C)` the basis state
//! `|n_A, n_C⟩` sits at row `n_A * d_C + n_C`.
//!
//! This engine runs the displaced single-photon protocol and doubles as a
//! brute-force check of the Gaussian moment maps.

mod channels;
mod operators;
mod quadrature;
mod qubit;
mod states;

pub use channels::{
    linear_channel_apply, phase_noise_average, pure_loss_channel, thermal_state, ChannelOutput,
    DilationAngles, ThermalState, ThermalTruncation, DEFAULT_LEAKAGE_BUDGET,
};
pub use operators::{
    annihilation_matrix, beam_splitter_unitary, displacement_matrix, number_matrix, LocalOperator,
};
pub use quadrature::{gauss_hermite, GaussHermite};
pub use qubit::{concurrence, is_npt, qubit_project, TwoQubitState};
pub use states::{gaussian_moments, single_photon_entangled_input, tmsv_state};

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::gaussian::Mode;

pub type C64 = Complex<f64>;

/// Default per-mode cutoff: photon numbers 0..=15.
pub const DEFAULT_DIMS: usize = 16;

const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    dims: Vec<usize>,
    data: DMatrix<C64>,
}

impl FockDensityMatrix {
    pub fn new(dims: Vec<usize>, data: DMatrix<C64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Structural(format!("invalid mode cutoffs {dims:?}")));
        }
        if data.nrows() != total || data.ncols() != total {
            return Err(Error::Structural(format!(
                "density matrix is {}x{}, cutoffs {dims:?} need {total}x{total}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { dims, data })
    }

    /// `|ψ⟩⟨ψ|` for an amplitude vector in the product basis.
    pub fn from_pure(dims: Vec<usize>, amplitudes: &[C64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        Self::new(dims, &v * v.adjoint())
    }

    /// Diagonal state with the given populations.
    pub fn from_populations(dims: Vec<usize>, populations: &[f64]) -> Result<Self> {
        let diag = nalgebra::DVector::from_iterator(
            populations.len(),
            populations.iter().map(|&p| C64::new(p, 0.0)),
        );
        Self::new(dims, DMatrix::from_diagonal(&diag))
    }

    /// Tensor product, `self` taking the more significant index.
    pub fn tensor(&self, other: &FockDensityMatrix) -> FockDensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        FockDensityMatrix {
            dims,
            data: self.data.kronecker(&other.data),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<C64> {
        self.data
    }

    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.data * &self.data).trace().re
    }

    /// Largest entry of `ρ - ρ†`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.data - self.data.adjoint())
            .iter()
            .fold(0.0, |m, z| f64::max(m, z.norm()))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_error() <= HERMITIAN_TOLERANCE
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Rescale to unit trace.
    pub fn normalized(&self) -> Result<FockDensityMatrix> {
        let tr = self.trace();
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::Numerical(format!("cannot normalize trace {tr}")));
        }
        Ok(FockDensityMatrix {
            dims: self.dims.clone(),
            data: &self.data / C64::new(tr, 0.0),
        })
    }

    /// Photon-number populations of one mode.
    pub fn populations(&self, mode_index: usize) -> Vec<f64> {
        let reduced = self.reduced(mode_index);
        (0..reduced.nrows()).map(|n| reduced[(n, n)].re).collect()
    }

    /// Reduced density matrix of one mode (all others traced out).
    pub fn reduced(&self, mode_index: usize) -> DMatrix<C64> {
        let layout = Layout::new(&self.dims, mode_index);
        let mut out = DMatrix::zeros(layout.d, layout.d);
        for o in 0..layout.outer {
            for i in 0..layout.inner {
                for r in 0..layout.d {
                    for c in 0..layout.d {
                        out[(r, c)] += self.data[(layout.index(o, r, i), layout.index(o, c, i))];
                    }
                }
            }
        }
        out
    }

    /// `Tr(ρ O)` for an operator on the full space.
    pub fn expectation(&self, op: &DMatrix<C64>) -> C64 {
        let n = self.data.nrows();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.data[(i, j)] * op[(j, i)];
            }
        }
        acc
    }

    pub(crate) fn mode_index(&self, mode: Mode) -> Result<usize> {
        if self.dims.len() != 2 {
            return Err(Error::Structural(format!(
                "expected a two-mode state, got cutoffs {:?}",
                self.dims
            )));
        }
        Ok(match mode {
            Mode::A => 0,
            Mode::C => 1,
        })
    }

    /// `Σ_k K_k ρ K_k†` for operators `K_k` acting on a single mode.
    pub fn apply_local_kraus(
        &self,
        mode_index: usize,
        kraus: &[LocalOperator],
    ) -> FockDensityMatrix {
        let n = self.data.nrows();
        let mut out = DMatrix::zeros(n, n);
        for op in kraus {
            op.accumulate_conjugation(&self.dims, mode_index, &self.data, &mut out);
        }
        FockDensityMatrix {
            dims: self.dims.clone(),
            data: out,
        }
    }
}

/// Index arithmetic for a single mode inside a product basis.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    pub outer: usize,
    pub d: usize,
    pub inner: usize,
}

impl Layout {
    pub fn new(dims: &[usize], mode_index: usize) -> Self {
        Layout {
            outer: dims[..mode_index].iter().product(),
            d: dims[mode_index],
            inner: dims[mode_index + 1..].iter().product(),
        }
    }

    #[inline]
    pub fn index(&self, outer: usize, n: usize, inner: usize) -> usize {
        (outer * self.d + n) * self.inner + inner
    }
}
