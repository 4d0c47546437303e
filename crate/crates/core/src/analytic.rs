//! Closed-form references: interband tunneling rate and the single-band ladder.

use std::f64::consts::PI;

use crate::bands;
use crate::units::{width_to_lifetime_with, PhysicalParams, HBAR};
use crate::{Error, Result};

/// Parameters of `γ = α e^{-α_c/α}`.
///
/// `α` and `Δ` are kept in `E_r`. The critical value uses the gap in units
/// of `ħ²k_l²/m_a = 2E_r` and the Bragg wavenumber `K = n/2` in units of
/// `2k_l`, so that `α_c = π(Δ/2)²/(2K)`; with `n = 1` this is the
/// Landau-Zener exponent `πΔ²/(2f)` in recoil units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NiuParams {
    /// `m_a²g/(ħ²k_l³) = f/2`.
    pub a_dimensionless: f64,
    pub a_crit: f64,
    /// `n/2`, in units of `2k_l`.
    pub k_bragg: f64,
    /// Gap half-width (E_r).
    pub delta: f64,
}

impl NiuParams {
    pub fn new(f: f64, delta: f64) -> Result<Self> {
        Self::with_order(f, delta, 1)
    }

    pub fn with_order(f: f64, delta: f64, n: u32) -> Result<Self> {
        if !(f > 0.0) || !(delta >= 0.0) || n == 0 {
            return Err(Error::InvalidParameter(format!("tunneling rate needs f > 0, Δ >= 0, n >= 1 (f={f}, Δ={delta}, n={n})")));
        }
        let k_bragg = 0.5 * n as f64;
        let d = 0.5 * delta;
        Ok(Self { a_dimensionless: 0.5 * f, a_crit: PI * d * d / (2.0 * k_bragg), k_bragg, delta })
    }
}

/// `m_a²g/(ħ²k_l³)` straight from lab units.
pub fn alpha_from_physical(p: &PhysicalParams) -> f64 {
    let k = p.k_l();
    p.m_a * p.m_a * p.g / (p.hbar * p.hbar * k * k * k)
}

/// `α e^{-α_c/α}` in `E_r`.
pub fn niu_rate(p: &NiuParams) -> f64 {
    p.a_dimensionless * (-p.a_crit / p.a_dimensionless).exp()
}

/// Rate for band `alpha` at depth `u`, using the gap above that band.
pub fn band_rate(u: f64, f: f64, alpha: usize) -> Result<f64> {
    let bs = bands::solve_bands_default(u, alpha + 1)?;
    let delta = bands::gap_halfwidth(&bs, alpha)?;
    Ok(niu_rate(&NiuParams::new(f, delta)?))
}

/// `(u, τ_LZ)` for the first band, τ in seconds.
pub fn lz_lifetime_curve(u_grid: &[f64], f: f64, e_r: f64) -> Result<Vec<(f64, f64)>> {
    lz_lifetime_curve_with(u_grid, f, e_r, HBAR)
}

pub fn lz_lifetime_curve_with(u_grid: &[f64], f: f64, e_r: f64, hbar: f64) -> Result<Vec<(f64, f64)>> {
    u_grid
        .iter()
        .map(|&u| {
            let gamma = if u == 0.0 { 0.5 * f } else { band_rate(u, f, 1)? };
            Ok((u, width_to_lifetime_with(gamma, e_r, hbar)?))
        })
        .collect()
}

/// `E_n = ε̄_1 - n f π`.
pub fn tight_binding_ladder(eps_mean_1: f64, f: f64, n_range: std::ops::RangeInclusive<i64>) -> Vec<(i64, f64)> {
    n_range.map(|n| (n, eps_mean_1 - n as f64 * f * PI)).collect()
}
