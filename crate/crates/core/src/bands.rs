//! Bloch bands of `-d²/dz̃² + (u/2)(1 - cos 2z̃)` from the central equation.
//!
//! In the plane-wave basis `e^{i(q+2m)z̃}` the matrix is tridiagonal with
//! diagonal `(q+2m)² + u/2` and off-diagonal `-u/4`. Bands are numbered from 1.

use ndarray::Array2;
use ndarray_linalg::{EigValsh, UPLO};

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandStructure {
    pub u: f64,
    /// Quasimomenta in units of `k_l`, uniform on `[-1, 1]` including both edges.
    pub quasimomenta: Vec<f64>,
    /// `energies[[k, a]]` is band `a + 1` at `quasimomenta[k]`.
    pub energies: Array2<f64>,
    pub n_bands: usize,
}

pub const DEFAULT_NQ: usize = 64;

/// Lowest `n_bands` eigenvalues of the central equation at quasimomentum `q`.
pub fn bloch_levels(u: f64, q: f64, n_bands: usize, n_planewaves: usize) -> Result<Vec<f64>> {
    let n = n_planewaves;
    let half = (n / 2) as f64;
    let mut h = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        let k = q + 2.0 * (i as f64 - half);
        h[[i, i]] = k * k + 0.5 * u;
        if i + 1 < n {
            h[[i, i + 1]] = -0.25 * u;
            h[[i + 1, i]] = -0.25 * u;
        }
    }
    let mut w = h.eigvalsh(UPLO::Lower).map_err(|e| Error::Backend(e.to_string()))?.to_vec();
    w.sort_by(f64::total_cmp);
    w.truncate(n_bands);
    Ok(w)
}

pub fn solve_bands(u: f64, n_bands: usize, n_planewaves: usize, n_q: usize) -> Result<BandStructure> {
    if !(u >= 0.0) {
        return Err(Error::InvalidParameter(format!("lattice depth {u} < 0")));
    }
    if n_bands == 0 || n_planewaves < 2 * n_bands + 5 {
        return Err(Error::Basis(format!(
            "{n_planewaves} plane waves for {n_bands} bands, need at least {}",
            2 * n_bands + 5
        )));
    }
    if n_q < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 quasimomenta, got {n_q}")));
    }
    let quasimomenta: Vec<f64> = (0..n_q).map(|k| -1.0 + 2.0 * k as f64 / (n_q - 1) as f64).collect();
    let mut energies = Array2::zeros((n_q, n_bands));
    for (k, &q) in quasimomenta.iter().enumerate() {
        for (a, e) in bloch_levels(u, q, n_bands, n_planewaves)?.into_iter().enumerate() {
            energies[[k, a]] = e;
        }
    }
    Ok(BandStructure { u, quasimomenta, energies, n_bands })
}

/// Solve with a basis large enough that doubling it changes nothing at 1e-8.
pub fn solve_bands_default(u: f64, n_bands: usize) -> Result<BandStructure> {
    solve_bands(u, n_bands, default_planewaves(u, n_bands), DEFAULT_NQ)
}

pub fn default_planewaves(u: f64, n_bands: usize) -> usize {
    (2 * n_bands + 5).max(31 + 2 * u.sqrt().ceil() as usize)
}

/// Largest change of any level when the plane-wave basis is doubled.
pub fn basis_doubling_drift(u: f64, n_bands: usize, n_planewaves: usize, n_q: usize) -> Result<f64> {
    let a = solve_bands(u, n_bands, n_planewaves, n_q)?;
    let b = solve_bands(u, n_bands, 2 * n_planewaves, n_q)?;
    Ok((&a.energies - &b.energies).iter().fold(0.0f64, |m, d| m.max(d.abs())))
}

impl BandStructure {
    fn column(&self, alpha: usize) -> Result<ndarray::ArrayView1<'_, f64>> {
        if alpha == 0 || alpha > self.n_bands {
            return Err(Error::InvalidParameter(format!("band {alpha} outside 1..={}", self.n_bands)));
        }
        Ok(self.energies.column(alpha - 1))
    }

    pub fn band_min(&self, alpha: usize) -> Result<f64> {
        Ok(self.column(alpha)?.iter().cloned().fold(f64::INFINITY, f64::min))
    }

    pub fn band_max(&self, alpha: usize) -> Result<f64> {
        Ok(self.column(alpha)?.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
    }
}

/// Brillouin-zone average of band `alpha` by the trapezoidal rule.
pub fn band_mean(bs: &BandStructure, alpha: usize) -> Result<f64> {
    let e = bs.column(alpha)?;
    let q = &bs.quasimomenta;
    let mut s = 0.0;
    for k in 1..q.len() {
        s += 0.5 * (e[k] + e[k - 1]) * (q[k] - q[k - 1]);
    }
    Ok(s / (q[q.len() - 1] - q[0]))
}

/// Half the gap between bands `n_gap` and `n_gap + 1`.
pub fn gap_halfwidth(bs: &BandStructure, n_gap: usize) -> Result<f64> {
    if n_gap == 0 || n_gap >= bs.n_bands {
        return Err(Error::InvalidParameter(format!(
            "gap {n_gap} needs bands {n_gap} and {} (have {})",
            n_gap + 1,
            bs.n_bands
        )));
    }
    let d = 0.5 * (bs.band_min(n_gap + 1)? - bs.band_max(n_gap)?);
    if d < -1e-10 {
        return Err(Error::BandsOverlap(d));
    }
    Ok(d.max(0.0))
}
