//! Potential terms, evaluated at complex (scaled) coordinates.

use std::f64::consts::PI;

use crate::units::{recoil_energy, PhysicalParams};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialTerm {
    /// `(u/2)(1 - cos 2z)`.
    Periodic { u: f64 },
    /// `sign·f·z`; `sign = -1` when z points down.
    Linear { sign: f64, f: f64 },
    /// `a_y e^{-2z/l_y}`.
    Yukawa { a_y: f64, l_y: f64 },
    /// Constant `v0` for `Re z <= 0`.
    BarrierStep { v0: f64 },
}

impl PotentialTerm {
    /// Value at the (possibly complex) coordinate `w`. `x` is the real grid
    /// position, used only to decide which side of the surface we are on.
    fn value(&self, x: f64, w: C64) -> C64 {
        match *self {
            PotentialTerm::Periodic { u } => 0.5 * u * (1.0 - (2.0 * w).cos()),
            PotentialTerm::Linear { sign, f } => sign * f * w,
            PotentialTerm::Yukawa { a_y, l_y } => a_y * (-2.0 * w / l_y).exp(),
            PotentialTerm::BarrierStep { v0 } => {
                if x <= 0.0 {
                    C64::new(v0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Atom below the surface, z axis pointing down into the lattice.
    BelowSurface,
    /// Atom above a mirror at z = 0, z axis pointing up.
    AboveSurface,
    /// No surface at all.
    InfiniteLattice,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wall {
    None,
    /// Hard wall at z = 0.
    DirichletAtZero,
    /// Region `z <= 0` holds only the constant `v0`.
    FiniteStep(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialModel {
    pub terms: Vec<PotentialTerm>,
    pub orientation: Orientation,
    pub wall: Wall,
    /// The periodic term is switched off smoothly between these two real
    /// coordinates and is zero beyond the second one.
    pub lattice_taper: Option<(f64, f64)>,
}

impl PotentialModel {
    pub fn new(terms: Vec<PotentialTerm>, orientation: Orientation, wall: Wall) -> Result<Self> {
        let m = Self { terms, orientation, wall, lattice_taper: None };
        m.validate()?;
        Ok(m)
    }

    /// Lattice below a hard mirror, gravity pulling away from it.
    pub fn surface_below(u: f64, f: f64) -> Self {
        Self {
            terms: vec![PotentialTerm::Periodic { u }, PotentialTerm::Linear { sign: -1.0, f }],
            orientation: Orientation::BelowSurface,
            wall: Wall::DirichletAtZero,
            lattice_taper: None,
        }
    }

    /// Lattice above a mirror of finite height `v0`, gravity pulling towards it.
    pub fn above_surface(u: f64, f: f64, v0: f64) -> Self {
        Self {
            terms: vec![
                PotentialTerm::Periodic { u },
                PotentialTerm::Linear { sign: 1.0, f },
                PotentialTerm::BarrierStep { v0 },
            ],
            orientation: Orientation::AboveSurface,
            wall: Wall::FiniteStep(v0),
            lattice_taper: None,
        }
    }

    pub fn infinite(u: f64, f: f64) -> Self {
        Self {
            terms: vec![PotentialTerm::Periodic { u }, PotentialTerm::Linear { sign: -1.0, f }],
            orientation: Orientation::InfiniteLattice,
            wall: Wall::None,
            lattice_taper: None,
        }
    }

    /// Replace the hard wall of a below-surface model by a finite step.
    pub fn with_step(mut self, v0: f64) -> Self {
        self.terms.retain(|t| !matches!(t, PotentialTerm::BarrierStep { .. }));
        self.terms.push(PotentialTerm::BarrierStep { v0 });
        self.wall = Wall::FiniteStep(v0);
        self
    }

    pub fn with_yukawa(mut self, a_y: f64, l_y: f64) -> Self {
        if a_y != 0.0 {
            self.terms.push(PotentialTerm::Yukawa { a_y, l_y });
        }
        self
    }

    pub fn with_taper(mut self, start: f64, end: f64) -> Self {
        self.lattice_taper = Some((start, end));
        self
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.terms {
            match *t {
                PotentialTerm::Periodic { u } if !(u >= 0.0) => {
                    return Err(Error::InvalidParameter(format!("lattice depth {u} < 0")))
                }
                PotentialTerm::Linear { sign, f } => {
                    if !(f > 0.0) {
                        return Err(Error::InvalidParameter(format!("tilt {f} must be > 0")));
                    }
                    let want = match self.orientation {
                        Orientation::AboveSurface => 1.0,
                        _ => -1.0,
                    };
                    if sign != want {
                        return Err(Error::InvalidParameter(format!(
                            "linear term sign {sign} does not match orientation {:?}",
                            self.orientation
                        )));
                    }
                }
                PotentialTerm::Yukawa { l_y, .. } if !(l_y > 0.0) => {
                    return Err(Error::InvalidParameter(format!("Yukawa range {l_y} must be > 0")))
                }
                PotentialTerm::BarrierStep { v0 } if !(v0 >= 0.0) => {
                    return Err(Error::InvalidParameter(format!("barrier height {v0} < 0")))
                }
                _ => {}
            }
        }
        if let Wall::FiniteStep(v0) = self.wall {
            if self.orientation == Orientation::InfiniteLattice {
                return Err(Error::InvalidParameter("finite step needs a surface".into()));
            }
            if !(v0 >= 0.0) {
                return Err(Error::InvalidParameter(format!("barrier height {v0} < 0")));
            }
        }
        if let Some((a, b)) = self.lattice_taper {
            if !(b > a) {
                return Err(Error::InvalidParameter(format!("taper [{a}, {b}] is empty")));
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> f64 {
        self.terms
            .iter()
            .find_map(|t| match *t {
                PotentialTerm::Periodic { u } => Some(u),
                _ => None,
            })
            .unwrap_or(0.0)
    }

    pub fn tilt(&self) -> f64 {
        self.terms
            .iter()
            .find_map(|t| match *t {
                PotentialTerm::Linear { f, .. } => Some(f),
                _ => None,
            })
            .unwrap_or(0.0)
    }

    /// Derivative of the potential with respect to `f`, i.e. the sign of the
    /// linear term times the coordinate.
    pub fn tilt_sign(&self) -> f64 {
        self.terms
            .iter()
            .find_map(|t| match *t {
                PotentialTerm::Linear { sign, .. } => Some(sign),
                _ => None,
            })
            .unwrap_or(0.0)
    }

    /// Sum of the terms at the contour point `w` sitting over the real grid
    /// point `x`. For the uniform rotation `w = x e^{iθ}`.
    pub fn eval_on_contour(&self, x: f64, w: C64) -> Result<C64> {
        match self.wall {
            Wall::DirichletAtZero if x <= 0.0 => return Err(Error::WallDomain(x)),
            Wall::FiniteStep(v0) if x <= 0.0 => return Ok(C64::new(v0, 0.0)),
            _ => {}
        }
        let window = self.lattice_window(x);
        let mut v = C64::new(0.0, 0.0);
        for t in &self.terms {
            match t {
                PotentialTerm::Periodic { .. } => {
                    if window > 0.0 {
                        v += window * t.value(x, w)
                    }
                }
                _ => v += t.value(x, w),
            }
        }
        Ok(v)
    }

    fn lattice_window(&self, x: f64) -> f64 {
        match self.lattice_taper {
            None => 1.0,
            Some((a, b)) => 1.0 - smoothstep((x - a) / (b - a)),
        }
    }
}

/// Total potential at `z e^{iθ}`.
pub fn eval(model: &PotentialModel, z: C64, theta: f64) -> Result<C64> {
    let w = z * C64::from_polar(1.0, theta);
    model.eval_on_contour(z.re, w)
}

/// `2π α_Y G ρ_s m_a λ_Y² / E_r`.
pub fn yukawa_prefactor(p: &PhysicalParams, alpha_y: f64, lambda_y: f64) -> Result<f64> {
    if !(lambda_y > 0.0) {
        return Err(Error::InvalidParameter(format!("Yukawa range {lambda_y} must be > 0")));
    }
    Ok(2.0 * PI * alpha_y * p.big_g * p.rho_s * p.m_a * lambda_y * lambda_y / recoil_energy(p))
}

/// C^∞ step: 0 for `x <= 0`, 1 for `x >= 1`, built from `e^{-1/x}`.
pub fn smoothstep(x: f64) -> f64 {
    fn phi(y: f64) -> f64 {
        if y > 0.0 {
            (-1.0 / y).exp()
        } else {
            0.0
        }
    }
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = phi(x);
        a / (a + phi(1.0 - x))
    }
}
