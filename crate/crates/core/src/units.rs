//! Physical constants and the reduction to recoil units.
//!
//! Lengths are measured as `z̃ = k_l z`, energies in `E_r = ħ²k_l²/2m_a`.
//! In these units the kinetic term is `-d²/dz̃²` and the lattice period is π.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Lab-frame parameters. Construct with [`PhysicalParams::new`] to get validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Atomic mass (kg).
    pub m_a: f64,
    /// Gravitational acceleration (m/s²).
    pub g: f64,
    /// Lattice wavelength (m).
    pub lambda_l: f64,
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Gravitational constant (m³ kg⁻¹ s⁻²).
    pub big_g: f64,
    /// Mass density of the surface material (kg/m³).
    pub rho_s: f64,
}

pub const HBAR: f64 = 1.054_571_817e-34;
pub const BIG_G: f64 = 6.67e-11;

impl Default for PhysicalParams {
    /// ⁸⁷Rb in a 532 nm lattice above silicon.
    fn default() -> Self {
        Self {
            m_a: 1.4431e-25,
            g: 9.81,
            lambda_l: 532e-9,
            hbar: HBAR,
            big_g: BIG_G,
            rho_s: 2.33e3,
        }
    }
}

impl PhysicalParams {
    pub fn new(m_a: f64, g: f64, lambda_l: f64, hbar: f64, big_g: f64, rho_s: f64) -> Result<Self> {
        let p = Self { m_a, g, lambda_l, hbar, big_g, rho_s };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("m_a", self.m_a),
            ("g", self.g),
            ("lambda_l", self.lambda_l),
            ("hbar", self.hbar),
            ("G", self.big_g),
            ("rho_s", self.rho_s),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Lattice wavevector `2π/λ_l` (1/m).
    pub fn k_l(&self) -> f64 {
        2.0 * PI / self.lambda_l
    }
}

/// Everything downstream of the CLI sees only these numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    /// Lattice depth `U/E_r`.
    pub u: f64,
    /// Tilt `m_a g/(E_r k_l)`; the ladder step is `f·π`.
    pub f: f64,
    /// Barrier height `V_0/E_r`.
    pub v0: f64,
    /// Yukawa prefactor in units of `E_r`.
    pub a_y: f64,
    /// Yukawa range `k_l λ_Y`.
    pub l_y: f64,
    /// `E_r` in joules, kept for unit conversion.
    pub e_r: f64,
}

impl DimensionlessParams {
    /// Ladder spacing `f·π` in `E_r`.
    pub fn ladder_step(&self) -> f64 {
        self.f * PI
    }
}

/// `ħ²k_l²/(2m_a)` in joules.
pub fn recoil_energy(p: &PhysicalParams) -> f64 {
    let k = p.k_l();
    p.hbar * p.hbar * k * k / (2.0 * p.m_a)
}

/// Dimensionless tilt `m_a g/(E_r k_l)`.
pub fn tilt(p: &PhysicalParams) -> f64 {
    p.m_a * p.g / (recoil_energy(p) * p.k_l())
}

/// Reduce lab-frame inputs. `depth` and `v0` are in joules, `lambda_y` in metres.
pub fn nondimensionalize(
    p: &PhysicalParams,
    depth: f64,
    v0: f64,
    alpha_y: f64,
    lambda_y: f64,
) -> Result<DimensionlessParams> {
    p.validate()?;
    if !(depth >= 0.0) {
        return Err(Error::InvalidParameter(format!("lattice depth must be >= 0, got {depth}")));
    }
    if !(v0 >= 0.0) {
        return Err(Error::InvalidParameter(format!("barrier height must be >= 0, got {v0}")));
    }
    if alpha_y != 0.0 && !(lambda_y > 0.0) {
        return Err(Error::InvalidParameter(format!("Yukawa range must be > 0, got {lambda_y}")));
    }
    let e_r = recoil_energy(p);
    let (a_y, l_y) = if alpha_y == 0.0 {
        (0.0, if lambda_y > 0.0 { p.k_l() * lambda_y } else { 1.0 })
    } else {
        (crate::potential::yukawa_prefactor(p, alpha_y, lambda_y)?, p.k_l() * lambda_y)
    };
    Ok(DimensionlessParams {
        u: depth / e_r,
        f: tilt(p),
        v0: v0 / e_r,
        a_y,
        l_y,
        e_r,
    })
}

/// Recoil-unit parameters for a given depth and barrier already in `E_r`.
pub fn reduced(p: &PhysicalParams, u: f64, v0: f64, alpha_y: f64, lambda_y: f64) -> Result<DimensionlessParams> {
    let e_r = recoil_energy(p);
    nondimensionalize(p, u * e_r, v0 * e_r, alpha_y, lambda_y)
}

/// `τ = ħ/(Γ E_r)` in seconds for a width `gamma` in `E_r`.
pub fn width_to_lifetime(gamma: f64, e_r: f64) -> Result<f64> {
    width_to_lifetime_with(gamma, e_r, HBAR)
}

pub fn width_to_lifetime_with(gamma: f64, e_r: f64, hbar: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::NotAResonance(gamma));
    }
    Ok(hbar / (gamma * e_r))
}
