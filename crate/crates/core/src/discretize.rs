//! Dense matrices for the complex-scaled Hamiltonian.
//!
//! Grid nodes are `z_min + i h`, `i = 0..n`. Both end nodes are hard walls
//! and are removed, so a Hamiltonian on an `n`-node grid has dimension `n - 2`.
//!
//! Two scalings are supported. [`Scaling::Uniform`] rotates every coordinate,
//! `z → z e^{iθ}`. [`Scaling::Exterior`] follows a contour `F(z)` that is real
//! over the physical region and bends into the complex plane through a
//! compactly supported polynomial ramp; the kinetic operator becomes
//! `-(1/F') d/dz (1/F') d/dz`, written in a complex-symmetric form.

use std::f64::consts::PI;
use std::io::{Read, Write};

use ndarray::Array2;

use crate::potential::{Orientation, PotentialModel, Wall};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub z_min: f64,
    pub z_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn new(z_min: f64, z_max: f64, n_points: usize) -> Result<Self> {
        let g = Self { z_min, z_max, n_points };
        if !(z_max > z_min) {
            return Err(Error::InvalidParameter(format!("empty grid [{z_min}, {z_max}]")));
        }
        if n_points < 64 {
            return Err(Error::InvalidParameter(format!("{n_points} grid points, need at least 64")));
        }
        if g.h() > PI / 8.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "spacing {} is coarser than 8 points per lattice period",
                g.h()
            )));
        }
        Ok(g)
    }

    /// Grid with `per_period` intervals per lattice period π.
    pub fn with_density(z_min: f64, z_max: f64, per_period: usize) -> Result<Self> {
        let n = ((z_max - z_min) / PI * per_period as f64).round() as usize + 1;
        Self::new(z_min, z_max, n)
    }

    pub fn h(&self) -> f64 {
        (self.z_max - self.z_min) / (self.n_points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.z_min + i as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// Nodes strictly between the walls.
    pub fn interior(&self) -> Vec<f64> {
        (1..self.n_points - 1).map(|i| self.node(i)).collect()
    }
}

/// Sinc-DVR `-d²/dz²` on every node of `grid`, times `e^{-2iθ}`.
pub fn kinetic_dvr(grid: &GridSpec, theta: f64) -> Array2<C64> {
    let h2 = grid.h() * grid.h();
    let n = grid.n_points;
    let t = Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            PI * PI / (3.0 * h2)
        } else {
            let d = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            2.0 * sign / (h2 * d * d)
        }
    });
    rotate(t, theta)
}

/// Central finite differences of order 2 or 4 for `-d²/dz²`, with hard walls
/// one spacing beyond the end nodes. The wide stencil uses the odd image of
/// the wave function behind each wall.
pub fn kinetic_fd(grid: &GridSpec, theta: f64, order: usize) -> Result<Array2<C64>> {
    let stencil: &[f64] = match order {
        2 => &[2.0, -1.0],
        4 => &[30.0 / 12.0, -16.0 / 12.0, 1.0 / 12.0],
        _ => return Err(Error::InvalidParameter(format!("finite-difference order {order} not in {{2, 4}}"))),
    };
    let h2 = grid.h() * grid.h();
    let n = grid.n_points;
    let mut t = Array2::from_shape_fn((n, n), |(i, j)| {
        let d = i.abs_diff(j);
        stencil.get(d).map_or(0.0, |c| c / h2)
    });
    if let Some(c) = stencil.get(2) {
        t[[0, 0]] -= c / h2;
        t[[n - 1, n - 1]] -= c / h2;
    }
    Ok(rotate(t, theta))
}

/// Sine-DVR (particle in a box) `-d²/dz²` on every node of `grid`, with
/// hard walls one spacing beyond the first and last node.
pub fn kinetic_box(grid: &GridSpec, theta: f64) -> Array2<C64> {
    rotate(box_dvr(grid.n_points, grid.h()), theta)
}

fn box_dvr(n: usize, h: f64) -> Array2<f64> {
    let nn = (n + 1) as f64;
    let l = nn * h;
    let pre = PI * PI / (2.0 * l * l);
    let s2 = |k: f64| {
        let s = (PI * k / (2.0 * nn)).sin();
        1.0 / (s * s)
    };
    Array2::from_shape_fn((n, n), |(a, b)| {
        let (i, j) = ((a + 1) as f64, (b + 1) as f64);
        if a == b {
            pre * ((2.0 * nn * nn + 1.0) / 3.0 - s2(2.0 * i))
        } else {
            let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
            pre * sign * (s2(i - j) - s2(i + j))
        }
    })
}

fn rotate(t: Array2<f64>, theta: f64) -> Array2<C64> {
    let phase = C64::from_polar(1.0, -2.0 * theta);
    t.mapv(|x| phase * x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Sine-DVR with exact walls at the grid ends.
    #[default]
    Dvr,
    /// Sinc-DVR restricted to the interior nodes.
    SincDvr,
    /// Central differences of order 2 or 4.
    FiniteDifference(usize),
}

/// One side of an exterior-scaling contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ramp {
    /// Where the contour leaves the real axis.
    pub start: f64,
    /// Length over which the rotation angle builds up to θ.
    pub width: f64,
}

/// `F(z) = z + (e^{iθ} - 1) w S((z - R)/w)` on the right, mirrored on the left,
/// with `S` the integral of a degree-13 polynomial smoothstep.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Contour {
    pub left: Option<Ramp>,
    pub right: Option<Ramp>,
}

// s(x) = x^7 Σ_k C(6+k,k) C(13,6-k) (-x)^k on [0, 1]
const RAMP: [f64; 7] = [1716.0, -9009.0, 20020.0, -24024.0, 16380.0, -6006.0, 924.0];

/// Smoothstep value, its integral from 0 and two derivatives at `x`.
fn ramp(x: f64) -> [f64; 4] {
    if x <= 0.0 {
        return [0.0; 4];
    }
    if x >= 1.0 {
        return [1.0, 0.5 + (x - 1.0), 0.0, 0.0];
    }
    let (mut s, mut si, mut s1, mut s2) = (0.0, 0.0, 0.0, 0.0);
    for (k, c) in RAMP.iter().enumerate() {
        let p = (7 + k) as i32;
        s += c * x.powi(p);
        si += c * x.powi(p + 1) / (p + 1) as f64;
        s1 += c * p as f64 * x.powi(p - 1);
        s2 += c * (p * (p - 1)) as f64 * x.powi(p - 2);
    }
    [s, si, s1, s2]
}

impl Contour {
    /// `[F, F', F'', F''']` at the real point `z`.
    pub fn eval(&self, z: f64, theta: f64) -> [C64; 4] {
        let c = C64::from_polar(1.0, theta) - 1.0;
        let mut out = [C64::new(z, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        if let Some(r) = self.right {
            let [s, si, s1, s2] = ramp((z - r.start) / r.width);
            out[0] += c * r.width * si;
            out[1] += c * s;
            out[2] += c * s1 / r.width;
            out[3] += c * s2 / (r.width * r.width);
        }
        if let Some(r) = self.left {
            let [s, si, s1, s2] = ramp((r.start - z) / r.width);
            out[0] -= c * r.width * si;
            out[1] += c * s;
            out[2] -= c * s1 / r.width;
            out[3] += c * s2 / (r.width * r.width);
        }
        out
    }

    /// True where the contour coincides with the real axis.
    pub fn is_real_at(&self, z: f64) -> bool {
        self.right.is_none_or(|r| z <= r.start) && self.left.is_none_or(|r| z >= r.start)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scaling {
    Uniform,
    Exterior(Contour),
}

/// Box geometry in units of the lattice period π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSpec {
    /// Lattice periods on the downhill (or upward, above the mirror) side.
    pub lattice_periods: f64,
    /// Lattice periods on the uphill side, used without a surface.
    pub upper_periods: f64,
    /// Length of the smooth switch-off of the lattice.
    pub taper_periods: f64,
    /// Length of the scaled region beyond the taper.
    pub exterior_periods: f64,
    /// Length of the region behind a finite step.
    pub mirror_periods: f64,
    /// Width of the contour ramp.
    pub ramp_periods: f64,
    /// Distance between the step and the start of the left ramp.
    pub ramp_gap_periods: f64,
    pub points_per_period: usize,
}

impl BoxSpec {
    pub fn surface_below() -> Self {
        Self {
            lattice_periods: 100.0,
            upper_periods: 0.0,
            taper_periods: 3.0,
            exterior_periods: 30.0,
            mirror_periods: 6.0,
            ramp_periods: 2.0,
            ramp_gap_periods: 0.5,
            points_per_period: 16,
        }
    }

    pub fn infinite() -> Self {
        Self { lattice_periods: 70.0, upper_periods: 30.0, exterior_periods: 10.0, ..Self::surface_below() }
    }

    pub fn above_surface() -> Self {
        Self { lattice_periods: 70.0, mirror_periods: 20.0, ..Self::surface_below() }
    }

    pub fn for_model(model: &PotentialModel) -> Self {
        match model.orientation {
            Orientation::BelowSurface => Self::surface_below(),
            Orientation::AboveSurface => Self::above_surface(),
            Orientation::InfiniteLattice => Self::infinite(),
        }
    }
}

/// A model prepared for assembly: tapered potential, grid and contour.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub model: PotentialModel,
    pub grid: GridSpec,
    pub scaling: Scaling,
}

impl Layout {
    /// Standard geometry: lattice, smooth switch-off, then a scaled exterior
    /// on the downhill side; above a mirror the scaled region sits behind the step.
    pub fn new(model: &PotentialModel, b: &BoxSpec) -> Result<Self> {
        let mut model = model.clone();
        let ramp = |start| Ramp { start, width: b.ramp_periods * PI };
        let (z_min, z_max, contour) = match model.orientation {
            Orientation::AboveSurface => {
                let z_min = -b.mirror_periods * PI;
                let right = b.lattice_periods * PI;
                if !matches!(model.wall, Wall::FiniteStep(_)) {
                    (0.0, right, Contour::default())
                } else {
                    let left = ramp(-b.ramp_gap_periods * PI);
                    (z_min, right, Contour { left: Some(left), right: None })
                }
            }
            Orientation::BelowSurface | Orientation::InfiniteLattice => {
                let lat_end = b.lattice_periods * PI;
                let taper_end = lat_end + b.taper_periods * PI;
                model = model.with_taper(lat_end, taper_end);
                let z_min = match (model.orientation, model.wall) {
                    (Orientation::InfiniteLattice, _) => -b.upper_periods * PI,
                    (_, Wall::FiniteStep(_)) => -b.mirror_periods * PI,
                    _ => 0.0,
                };
                let z_max = taper_end + b.exterior_periods * PI;
                (z_min, z_max, Contour { left: None, right: Some(ramp(taper_end)) })
            }
        };
        let grid = GridSpec::with_density(z_min, z_max, b.points_per_period)?;
        let scaling = Scaling::Exterior(contour);
        Ok(Self { model, grid, scaling })
    }

    pub fn assemble(&self, theta: f64, scheme: Scheme) -> Result<ScaledHamiltonian> {
        assemble_scaled(&self.model, &self.grid, theta, scheme, self.scaling)
    }
}

#[derive(Debug, Clone)]
pub struct ScaledHamiltonian {
    pub matrix: Array2<C64>,
    pub theta: f64,
    pub grid: GridSpec,
    pub model: PotentialModel,
    pub scheme: Scheme,
    pub scaling: Scaling,
    /// Real coordinates of the unknowns (interior nodes).
    pub nodes: Vec<f64>,
    /// Contour points `F(z)` at the nodes.
    pub contour: Vec<C64>,
    /// Diagonal of `∂H/∂f` at the nodes.
    pub tilt_derivative: Vec<C64>,
}

impl ScaledHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|H_ij - H_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                m = m.max((self.matrix[[i, j]] - self.matrix[[j, i]]).norm());
            }
        }
        m
    }
}

/// Assemble with uniform rotation of every coordinate.
pub fn assemble(model: &PotentialModel, grid: &GridSpec, theta: f64, scheme: Scheme) -> Result<ScaledHamiltonian> {
    assemble_scaled(model, grid, theta, scheme, Scaling::Uniform)
}

pub fn assemble_scaled(
    model: &PotentialModel,
    grid: &GridSpec,
    theta: f64,
    scheme: Scheme,
    scaling: Scaling,
) -> Result<ScaledHamiltonian> {
    model.validate()?;
    check_compatible(model, grid, scaling)?;
    let nodes = grid.interior();
    let n = nodes.len();
    let inner = GridSpec { z_min: nodes[0], z_max: nodes[n - 1], n_points: n };
    let t = match scheme {
        Scheme::Dvr => box_dvr(n, grid.h()),
        Scheme::SincDvr => kinetic_dvr(&inner, 0.0).mapv(|z| z.re),
        Scheme::FiniteDifference(order) => kinetic_fd(&inner, 0.0, order)?.mapv(|z| z.re),
    };
    let (mut matrix, contour) = match scaling {
        Scaling::Uniform => {
            let phase = C64::from_polar(1.0, theta);
            (rotate(t, theta), nodes.iter().map(|&z| z * phase).collect::<Vec<_>>())
        }
        Scaling::Exterior(c) => {
            let d: Vec<[C64; 4]> = nodes.iter().map(|&z| c.eval(z, theta)).collect();
            (exterior_kinetic(&t, &d), d.iter().map(|x| x[0]).collect())
        }
    };
    let sign = model.tilt_sign();
    let mut tilt_derivative = Vec::with_capacity(n);
    for (i, (&x, &w)) in nodes.iter().zip(&contour).enumerate() {
        matrix[[i, i]] += model.eval_on_contour(x, w)?;
        let in_step = matches!(model.wall, Wall::FiniteStep(_)) && x <= 0.0;
        tilt_derivative.push(if in_step { C64::new(0.0, 0.0) } else { sign * w });
    }
    Ok(ScaledHamiltonian {
        matrix,
        theta,
        grid: *grid,
        model: model.clone(),
        scheme,
        scaling,
        nodes,
        contour,
        tilt_derivative,
    })
}

/// `½(G² T + T G²) + ¾G'² + ½ G G''` with `G = 1/F'`.
fn exterior_kinetic(t: &Array2<f64>, d: &[[C64; 4]]) -> Array2<C64> {
    let n = d.len();
    let mut g2 = Vec::with_capacity(n);
    let mut extra = Vec::with_capacity(n);
    for &[_, f1, f2, f3] in d {
        let g = 1.0 / f1;
        let g1 = -f2 / (f1 * f1);
        let g2_ = -f3 / (f1 * f1) + 2.0 * f2 * f2 / (f1 * f1 * f1);
        g2.push(g * g);
        extra.push(0.75 * g1 * g1 + 0.5 * g * g2_);
    }
    let mut k = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (g2[i] + g2[j]) * t[[i, j]]);
    for i in 0..n {
        k[[i, i]] += extra[i];
    }
    k
}

fn check_compatible(model: &PotentialModel, grid: &GridSpec, scaling: Scaling) -> Result<()> {
    match model.wall {
        Wall::DirichletAtZero if grid.z_min.abs() > 1e-12 => {
            return Err(Error::IncompatibleGrid(format!(
                "hard wall at 0 needs z_min = 0, grid starts at {}",
                grid.z_min
            )))
        }
        Wall::FiniteStep(_) if grid.z_min >= 0.0 => {
            return Err(Error::IncompatibleGrid("finite step needs grid points at z < 0".into()))
        }
        _ => {}
    }
    if let Scaling::Exterior(c) = scaling {
        if let Some(r) = c.right {
            if !(r.width > 0.0) || r.start >= grid.z_max {
                return Err(Error::IncompatibleGrid(format!("right ramp at {} lies outside the grid", r.start)));
            }
            let lattice_off = model.depth() == 0.0 || model.lattice_taper.is_some_and(|(_, b)| b <= r.start + 1e-12);
            if !lattice_off {
                return Err(Error::IncompatibleGrid(
                    "scaled region overlaps the lattice; switch it off before the ramp".into(),
                ));
            }
            if matches!(model.wall, Wall::FiniteStep(_)) && r.start <= 0.0 {
                return Err(Error::IncompatibleGrid("right ramp crosses the step".into()));
            }
        }
        if let Some(l) = c.left {
            if !(l.width > 0.0) || l.start <= grid.z_min {
                return Err(Error::IncompatibleGrid(format!("left ramp at {} lies outside the grid", l.start)));
            }
            let behind_step = matches!(model.wall, Wall::FiniteStep(_)) && l.start <= 0.0;
            if !behind_step && model.depth() != 0.0 {
                return Err(Error::IncompatibleGrid("left ramp must sit behind a finite step".into()));
            }
        }
    }
    Ok(())
}

/// Raw dump: `n` as u64, `theta` as f64, then `n²` (re, im) pairs row-major,
/// all little endian.
pub fn write_matrix<W: Write>(mut w: W, h: &ScaledHamiltonian) -> std::io::Result<()> {
    let n = h.dim();
    w.write_all(&(n as u64).to_le_bytes())?;
    w.write_all(&h.theta.to_le_bytes())?;
    for z in h.matrix.iter() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_matrix<R: Read>(mut r: R) -> std::io::Result<(f64, Array2<C64>)> {
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let theta = f64::from_le_bytes(b8);
    let mut m = Array2::zeros((n, n));
    for z in m.iter_mut() {
        r.read_exact(&mut b8)?;
        let re = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        *z = C64::new(re, f64::from_le_bytes(b8));
    }
    Ok((theta, m))
}
