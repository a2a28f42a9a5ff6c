use nalgebra::DMatrix;

use super::{Layout, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Single-mode operator stored as `(row, col, value)` triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl LocalOperator {
    pub fn new(dim: usize, entries: Vec<(usize, usize, C64)>) -> Self {
        debug_assert!(entries.iter().all(|&(r, c, _)| r < dim && c < dim));
        Self { dim, entries }
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let mut entries = Vec::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let v = m[(r, c)];
                if v != ZERO {
                    entries.push((r, c, v));
                }
            }
        }
        Self {
            dim: m.nrows(),
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// `out += (K ⊗ 1) ρ (K ⊗ 1)†` with `K` acting on `mode_index`.
    pub(crate) fn accumulate_conjugation(
        &self,
        dims: &[usize],
        mode_index: usize,
        rho: &DMatrix<C64>,
        out: &mut DMatrix<C64>,
    ) {
        let layout = Layout::new(dims, mode_index);
        assert_eq!(
            layout.d, self.dim,
            "operator dimension does not match mode cutoff"
        );
        let n = rho.nrows();
        let src = rho.as_slice();
        let mut left = vec![ZERO; n * n];
        for col in 0..n {
            let base = col * n;
            for &(r, c, a) in &self.entries {
                for o in 0..layout.outer {
                    for i in 0..layout.inner {
                        left[base + layout.index(o, r, i)] += a * src[base + layout.index(o, c, i)];
                    }
                }
            }
        }
        let dst = out.as_mut_slice();
        for &(r, c, a) in &self.entries {
            let ac = a.conj();
            for o in 0..layout.outer {
                for i in 0..layout.inner {
                    let dst_col = layout.index(o, r, i) * n;
                    let src_col = layout.index(o, c, i) * n;
                    for row in 0..n {
                        dst[dst_col + row] += ac * left[src_col + row];
                    }
                }
            }
        }
    }
}

/// Truncated annihilation operator, `√n` on the `(n-1, n)` entries.
pub fn annihilation_matrix(n_levels: usize) -> DMatrix<C64> {
    let mut a = DMatrix::zeros(n_levels, n_levels);
    for n in 1..n_levels {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn number_matrix(n_levels: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n_levels, n_levels, |r, c| {
        if r == c {
            C64::new(r as f64, 0.0)
        } else {
            ZERO
        }
    })
}

/// Generalised Laguerre polynomial `L_n^{(k)}(x)` by upward recurrence.
fn laguerre(n: usize, k: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + k - x;
    for j in 1..n {
        let j = j as f64;
        let next = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Matrix elements `⟨m|D(α)|n⟩` of `D(α) = exp(α a† - α* a)` for
/// `m, n < n_levels`.
///
/// The elements are those of the untruncated displacement operator, so the
/// result is unitary up to the population pushed above the cutoff.
pub fn displacement_matrix(alpha: C64, n_levels: usize) -> DMatrix<C64> {
    let x = alpha.norm_sqr();
    let envelope = (-x / 2.0).exp();
    DMatrix::from_fn(n_levels, n_levels, |m, n| {
        let (lo, hi) = if m >= n { (n, m) } else { (m, n) };
        // sqrt(lo! / hi!)
        let ratio = ((lo + 1)..=hi).fold(1.0, |acc, j| acc / (j as f64).sqrt());
        let k = hi - lo;
        let base = if m >= n { alpha } else { -alpha.conj() };
        base.powu(k as u32) * (ratio * envelope * laguerre(lo, k as f64, x))
    })
}

/// Block of `exp(θ(e^{iφ} a b† - e^{-iφ} a† b))` with `total` photons,
/// indexed by the photon number in mode `a` (mode `b` holds the rest).
pub(crate) fn beam_splitter_block(theta: f64, phi: f64, total: usize) -> DMatrix<C64> {
    let dim = total + 1;
    let mut gen = DMatrix::zeros(dim, dim);
    let fwd = C64::from_polar(theta, phi);
    let back = C64::from_polar(theta, -phi);
    for n in 0..dim {
        let nb = (total - n) as f64;
        let nf = n as f64;
        if n >= 1 {
            // a b† |n, N-n⟩ = sqrt(n (N-n+1)) |n-1, N-n+1⟩
            gen[(n - 1, n)] += fwd * (nf * (nb + 1.0)).sqrt();
        }
        if n < total {
            // a† b |n, N-n⟩ = sqrt((n+1)(N-n)) |n+1, N-n-1⟩
            gen[(n + 1, n)] -= back * ((nf + 1.0) * nb).sqrt();
        }
    }
    gen.exp()
}

/// Two-mode beam splitter `exp(θ(e^{iφ} a b† - e^{-iφ} a† b))` restricted
/// to cutoffs `(d_a, d_b)`; mode `a` is the more significant index.
///
/// The generator conserves the total photon number, so each fixed-number
/// block is exponentiated exactly and the truncation only drops amplitudes
/// that would land above a cutoff.
pub fn beam_splitter_unitary(theta: f64, phi: f64, dims: (usize, usize)) -> DMatrix<C64> {
    let (da, db) = dims;
    let mut u = DMatrix::zeros(da * db, da * db);
    for total in 0..(da + db - 1) {
        let block = beam_splitter_block(theta, phi, total);
        let lo = total.saturating_sub(db - 1);
        let hi = total.min(da - 1);
        for n_out in lo..=hi {
            for n_in in lo..=hi {
                u[(n_out * db + (total - n_out), n_in * db + (total - n_in))] =
                    block[(n_out, n_in)];
            }
        }
    }
    u
}
