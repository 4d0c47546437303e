//! Sorting eigenvalues into bound states, resonances and rotated continuum,
//! θ-stability filtering, and Wannier-Stark labels.

use std::f64::consts::PI;

use crate::bands::{self, BandStructure};
use crate::discretize::{BoxSpec, Layout, ScaledHamiltonian, Scheme};
use crate::eigensolve::{self, Backend, ComplexSpectrum};
use crate::potential::{Orientation, PotentialModel};
use crate::units::width_to_lifetime;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Bound,
    Resonance,
    Continuum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resonance {
    pub energy: C64,
    /// `-2 Im E`.
    pub gamma: f64,
    pub well_n: Option<i64>,
    pub band: Option<usize>,
    pub lifetime_s: Option<f64>,
    /// `Re (ψ|F|ψ)/(ψ|ψ)`, the centre of the state along the contour.
    pub position: Option<f64>,
    /// `Re E - f ∂E/∂f`: the energy with the tilt removed.
    pub local_energy: Option<f64>,
    /// Index into the spectrum the resonance came from.
    pub index: usize,
}

impl Resonance {
    fn new(energy: C64, index: usize) -> Self {
        Self {
            energy,
            gamma: -2.0 * energy.im,
            well_n: None,
            band: None,
            lifetime_s: None,
            position: None,
            local_energy: None,
            index,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Perpendicular distance from the continuum line.
    pub cont_tol: f64,
    pub bound_tol: f64,
    /// Allowed drift of a resonance between scaling angles.
    pub match_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { cont_tol: f64::NAN, bound_tol: 1e-12, match_tol: 1e-6 }
    }
}

/// `Im E = slope · Re E + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumLine {
    pub slope: f64,
    pub intercept: f64,
}

impl ContinuumLine {
    pub fn distance(&self, z: C64) -> f64 {
        (z.im - self.slope * z.re - self.intercept).abs() / (1.0 + self.slope * self.slope).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceSet {
    /// States on the real axis, with `gamma = 0`. In a tilted lattice these
    /// are ladder states whose width is below the resolution of the solve.
    pub bound: Vec<Resonance>,
    pub resonances: Vec<Resonance>,
    pub continuum: Vec<C64>,
    pub theta_used: Vec<f64>,
    pub tolerances: Tolerances,
    pub line: Option<ContinuumLine>,
    pub warnings: Vec<String>,
}

impl ResonanceSet {
    pub fn len(&self) -> usize {
        self.bound.len() + self.resonances.len() + self.continuum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lowest real part among continuum points below the real axis.
    ///
    /// Near threshold the discretized branch bends away from the fitted line,
    /// so the line itself is only used to decide that a continuum exists.
    pub fn continuum_onset(&self) -> Option<f64> {
        self.line?;
        self.continuum.iter().filter(|z| z.im < 0.0).map(|z| z.re).min_by(f64::total_cmp)
    }

    /// Resonances of one band ordered by well index.
    pub fn ladder(&self, band: usize) -> Vec<&Resonance> {
        let mut v: Vec<&Resonance> = self.resonances.iter().filter(|r| r.band == Some(band)).collect();
        v.sort_by_key(|r| r.well_n.unwrap_or(i64::MAX));
        v
    }

    /// Bound states and resonances of one band ordered by well index.
    pub fn states(&self, band: usize) -> Vec<&Resonance> {
        let mut v: Vec<&Resonance> = self.bound.iter().chain(&self.resonances).filter(|r| r.band == Some(band)).collect();
        v.sort_by_key(|r| r.well_n.unwrap_or(i64::MAX));
        v
    }
}

/// Least-squares line through `pts`.
fn fit_line(pts: &[C64]) -> Option<ContinuumLine> {
    let n = pts.len() as f64;
    if pts.len() < 3 {
        return None;
    }
    let mx = pts.iter().map(|z| z.re).sum::<f64>() / n;
    let my = pts.iter().map(|z| z.im).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|z| (z.re - mx) * (z.re - mx)).sum();
    let sxy: f64 = pts.iter().map(|z| (z.re - mx) * (z.im - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(ContinuumLine { slope, intercept: my - slope * mx })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        return 0.0;
    }
    v[v.len() / 2]
}

/// Points of `pts` whose intercepts `Im z - slope·Re z` form the densest
/// cluster: the `k` nearest to the best centre.
fn densest_branch(pts: &[C64], slope: f64, k: usize) -> Vec<C64> {
    let mut b: Vec<(f64, C64)> = pts.iter().map(|z| (z.im - slope * z.re, *z)).collect();
    if b.is_empty() {
        return Vec::new();
    }
    b.sort_by(|x, y| x.0.total_cmp(&y.0));
    let k = k.clamp(1, b.len());
    let start = (0..=b.len() - k)
        .min_by(|&i, &j| (b[i + k - 1].0 - b[i].0).total_cmp(&(b[j + k - 1].0 - b[j].0)))
        .unwrap_or(0);
    b[start..start + k].iter().map(|p| p.1).collect()
}

/// Split a spectrum into bound states, resonances and continuum.
///
/// The continuum line is looked for on the upper half of the real range.
/// Exterior scaling leaves a second, nearly real branch from the unscaled
/// region there, so the fit starts from the densest cluster of points along
/// the direction `-tan 2θ`, fits a free line through it, and refines once.
/// `cont_tol = None` means three times the median distance of the fitted
/// points, floored at `1e-10·max|E|`. Points above the real axis by less
/// than `1e-9·max|E|` are rounding noise on bound states.
pub fn classify(spec: &ComplexSpectrum, theta: f64, cont_tol: Option<f64>, bound_tol: f64) -> Result<ResonanceSet> {
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter(format!("classification needs θ > 0, got {theta}")));
    }
    let ev = &spec.eigenvalues;
    let scale = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (lo, hi) = ev.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), z| (a.min(z.re), b.max(z.re)));
    let mid = 0.5 * (lo + hi);
    let upper: Vec<C64> = ev.iter().cloned().filter(|z| z.re >= mid && z.im.abs() >= bound_tol).collect();
    let mut warnings = Vec::new();
    let core = densest_branch(&upper, -(2.0 * theta).tan(), upper.len() / 4);
    let mut line = fit_line(&core);
    let mut tol = cont_tol.unwrap_or(f64::NAN);
    if let Some(l) = line {
        let d = median(core.iter().map(|z| l.distance(*z)).collect());
        let kept: Vec<C64> = upper.iter().cloned().filter(|z| l.distance(*z) <= 3.0 * d.max(1e-14 * scale)).collect();
        if let Some(l2) = fit_line(&kept) {
            line = Some(l2);
        }
        let l = line.unwrap();
        if cont_tol.is_none() {
            let scatter = median(kept.iter().map(|z| l.distance(*z)).collect());
            tol = (3.0 * scatter).max(1e-10 * scale);
        }
    } else {
        warnings.push("continuum line fit failed: too few points; non-bound eigenvalues kept as resonances".into());
    }
    // nothing physical lies above the real axis; small positive parts are rounding
    let noise = bound_tol.max(1e-9 * scale);
    let mut set = ResonanceSet {
        bound: Vec::new(),
        resonances: Vec::new(),
        continuum: Vec::new(),
        theta_used: vec![theta],
        tolerances: Tolerances { cont_tol: tol, bound_tol, match_tol: f64::NAN },
        line,
        warnings,
    };
    for (k, &z) in ev.iter().enumerate() {
        if z.im.abs() < bound_tol || (z.im > 0.0 && z.im < noise) {
            let mut b = Resonance::new(C64::new(z.re, 0.0), k);
            b.gamma = 0.0;
            set.bound.push(b);
        } else if z.im > 0.0 || line.is_some_and(|l| l.distance(z) < tol) {
            set.continuum.push(z);
        } else {
            set.resonances.push(Resonance::new(z, k));
        }
    }
    Ok(set)
}

/// Keep the resonances of `sets[reference]` that reappear at every other
/// angle within `match_tol`; the rest are moved to the continuum.
pub fn theta_filter(sets: &[ResonanceSet], match_tol: f64, reference: usize) -> Result<ResonanceSet> {
    if sets.len() < 2 {
        return Err(Error::InvalidParameter("θ filtering needs at least two angles".into()));
    }
    if reference >= sets.len() {
        return Err(Error::InvalidParameter(format!("reference angle {reference} out of range")));
    }
    let base = &sets[reference];
    let mut order: Vec<usize> = (0..base.resonances.len()).collect();
    order.sort_by(|&a, &b| base.resonances[a].energy.re.total_cmp(&base.resonances[b].energy.re));
    let mut keep = vec![true; base.resonances.len()];
    for (s, other) in sets.iter().enumerate() {
        if s == reference {
            continue;
        }
        let cands: Vec<C64> = other
            .resonances
            .iter()
            .map(|r| r.energy)
            .chain(other.bound.iter().map(|b| b.energy))
            .collect();
        let mut used = vec![false; cands.len()];
        for &i in &order {
            if !keep[i] {
                continue;
            }
            let z = base.resonances[i].energy;
            let best = (0..cands.len())
                .filter(|&j| !used[j])
                .min_by(|&a, &b| (cands[a] - z).norm().total_cmp(&(cands[b] - z).norm()));
            match best {
                Some(j) if (cands[j] - z).norm() < match_tol => used[j] = true,
                _ => keep[i] = false,
            }
        }
    }
    let mut out = base.clone();
    out.resonances.clear();
    for (i, r) in base.resonances.iter().enumerate() {
        if keep[i] {
            out.resonances.push(r.clone());
        } else {
            out.continuum.push(r.energy);
        }
    }
    out.theta_used = sets.iter().flat_map(|s| s.theta_used.iter().cloned()).collect();
    out.tolerances.match_tol = match_tol;
    Ok(out)
}

/// Attach positions and tilt-free energies from the eigenvectors of `spec`.
pub fn attach_positions(rs: &mut ResonanceSet, spec: &ComplexSpectrum, h: &ScaledHamiltonian) -> Result<()> {
    let v = spec
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("positions need eigenvectors".into()))?;
    let f = h.model.tilt();
    for r in rs.bound.iter_mut().chain(rs.resonances.iter_mut()) {
        let col = v.column(r.index);
        let de_df = eigensolve::c_expectation(col, &h.tilt_derivative);
        r.position = Some(eigensolve::c_expectation(col, &h.contour).re);
        r.local_energy = Some(r.energy.re - f * de_df.re);
    }
    Ok(())
}

/// Band whose energy range `(min, max)` is closest to each resonance's
/// tilt-free energy. A state mixed across a gap keeps the band it overlaps.
pub fn assign_bands(rs: &mut ResonanceSet, band_ranges: &[(f64, f64)]) {
    let dist = |&(lo, hi): &(f64, f64), e: f64| (lo - e).max(e - hi).max(0.0);
    for r in rs.bound.iter_mut().chain(rs.resonances.iter_mut()) {
        r.band = r.local_energy.map(|e| {
            let (k, _) = band_ranges
                .iter()
                .enumerate()
                .min_by(|a, b| dist(a.1, e).total_cmp(&dist(b.1, e)))
                .expect("at least one band");
            k + 1
        });
    }
}

/// First well counted as bulk next to a surface.
pub const BULK_START: usize = 6;
/// Wells at the far end left out of the ladder-spacing check.
const SPACING_END_MARGIN: usize = 10;

/// Extra wells past the band-3 threshold where the lattice end still shows.
const EDGE_TAIL: usize = 10;

/// Wells at the far end of a surface lattice that do not count as bulk.
///
/// Downhill, the decay of a first-band state runs through the second band and
/// is partly reflected where the lattice ends. The reflection is strong while
/// the end sits below the third band, `(min ε_3 - min ε_1)/(fπ)` wells away,
/// and dies out over a few more wells inside it. Above a mirror the far end is
/// uphill and only the first-band extent `(max ε_1 - min ε_1)/(fπ)` matters.
pub fn edge_margin(bs: &BandStructure, f: f64, orientation: Orientation) -> Result<usize> {
    let (reach, tail) = match orientation {
        Orientation::AboveSurface => (bs.band_max(1)? - bs.band_min(1)?, 0),
        _ => (bs.band_min(3)? - bs.band_min(1)?, EDGE_TAIL),
    };
    Ok((reach / (f * PI)).ceil() as usize + 1 + tail)
}

/// How well indices are anchored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    /// `n = round((ε̄_α - Re E)/(fπ))`.
    BandMean,
    /// Well 1 is next to the surface and has the highest energy of its band.
    WallBelow,
    /// Well 1 is next to the surface and has the lowest energy of its band.
    WallAbove,
}

impl Anchor {
    pub fn for_orientation(o: Orientation) -> Self {
        match o {
            Orientation::BelowSurface => Anchor::WallBelow,
            Orientation::AboveSurface => Anchor::WallAbove,
            Orientation::InfiniteLattice => Anchor::BandMean,
        }
    }
}

/// Wannier-Stark well indices per band. Resonances without a band are treated
/// as first-band.
pub fn label_wells(rs: &ResonanceSet, f: f64, band_means: &[f64], anchor: Anchor) -> ResonanceSet {
    let mut out = rs.clone();
    let n_bound = out.bound.len();
    // bound states and resonances share one ladder per band
    let mut all: Vec<Resonance> = out.bound.drain(..).chain(out.resonances.drain(..)).collect();
    let step = f * PI;
    let max_band = all.iter().map(|r| r.band.unwrap_or(1)).max().unwrap_or(0);
    for band in 1..=max_band {
        let mut idx: Vec<usize> = (0..all.len()).filter(|&i| all[i].band.unwrap_or(1) == band).collect();
        if idx.is_empty() {
            continue;
        }
        match anchor {
            Anchor::BandMean => {
                let Some(&mean) = band_means.get(band - 1) else { continue };
                for &i in &idx {
                    all[i].well_n = Some(((mean - all[i].energy.re) / step).round() as i64);
                }
            }
            Anchor::WallBelow | Anchor::WallAbove => {
                idx.sort_by(|&a, &b| all[a].energy.re.total_cmp(&all[b].energy.re));
                if anchor == Anchor::WallBelow {
                    idx.reverse();
                }
                for (k, &i) in idx.iter().enumerate() {
                    all[i].well_n = Some(k as i64 + 1);
                }
                // bulk wells should be spaced by one ladder step; the last
                // wells feel the end of the lattice
                if band == 1 && idx.len() > BULK_START + SPACING_END_MARGIN + 2 {
                    let bulk = &idx[BULK_START - 1..idx.len() - SPACING_END_MARGIN];
                    let bad = bulk.windows(2).any(|w| {
                        let d = (all[w[0]].energy.re - all[w[1]].energy.re).abs();
                        (d - step).abs() > 0.1 * step
                    });
                    if bad {
                        out.warnings.push(format!("band {band}: uneven ladder spacing, well labels ambiguous"));
                    }
                }
            }
        }
    }
    out.resonances = all.split_off(n_bound);
    out.bound = all;
    out
}

pub fn attach_lifetimes(rs: &mut ResonanceSet, e_r: f64) {
    for r in &mut rs.resonances {
        r.lifetime_s = width_to_lifetime(r.gamma, e_r).ok();
    }
}

/// Settings of a full θ-sweep solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub thetas: Vec<f64>,
    /// Index of the angle whose eigenvectors and classification are reported.
    pub reference: usize,
    pub scheme: Scheme,
    pub backend: Backend,
    pub bound_tol: f64,
    pub cont_tol: Option<f64>,
    pub match_tol: f64,
    pub box_spec: BoxSpec,
    /// Bands used to assign resonances.
    pub n_bands: usize,
}

impl SolveOptions {
    pub fn for_model(model: &PotentialModel) -> Self {
        Self {
            thetas: vec![0.10, 0.15, 0.20],
            reference: 1,
            scheme: Scheme::Dvr,
            backend: Backend::Lapack,
            bound_tol: 1e-12,
            cont_tol: None,
            match_tol: 1e-6,
            box_spec: BoxSpec::for_model(model),
            n_bands: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub set: ResonanceSet,
    pub layout: Layout,
    pub dim: usize,
    /// Frobenius norm of the reference matrix.
    pub matrix_norm: f64,
    /// Raw eigenvalues at the reference angle.
    pub eigenvalues: Vec<C64>,
    pub band_means: Vec<f64>,
    /// See [`edge_margin`].
    pub edge_margin: usize,
}

impl Analysis {
    /// First-band states of wells `BULK_START ..= N - edge_margin`; empty
    /// when the lattice is too short to have a bulk.
    pub fn bulk(&self) -> Vec<&Resonance> {
        let l = self.set.states(1);
        if l.len() < BULK_START + self.edge_margin {
            return Vec::new();
        }
        l[BULK_START - 1..l.len() - self.edge_margin].to_vec()
    }
}

/// Assemble and diagonalize at every angle, classify, filter, label.
pub fn analyze(model: &PotentialModel, opts: &SolveOptions, e_r: Option<f64>) -> Result<Analysis> {
    if opts.thetas.is_empty() || opts.reference >= opts.thetas.len() {
        return Err(Error::InvalidParameter("need a reference angle inside the θ list".into()));
    }
    let layout = Layout::new(model, &opts.box_spec)?;
    let mut sets = Vec::with_capacity(opts.thetas.len());
    let mut reference = None;
    for (i, &theta) in opts.thetas.iter().enumerate() {
        let h = layout.assemble(theta, opts.scheme)?;
        let want = i == opts.reference;
        let spec = eigensolve::eig_with(&h, want, opts.backend)?;
        sets.push(classify(&spec, theta, opts.cont_tol, opts.bound_tol)?);
        if want {
            reference = Some((h, spec));
        }
    }
    let (h, spec) = reference.expect("reference angle solved");
    let mut set = if sets.len() > 1 { theta_filter(&sets, opts.match_tol, opts.reference)? } else { sets.remove(0) };
    attach_positions(&mut set, &spec, &h)?;
    let bs = bands::solve_bands_default(model.depth(), opts.n_bands.max(3))?;
    let band_means = (1..=opts.n_bands).map(|a| bands::band_mean(&bs, a)).collect::<Result<Vec<_>>>()?;
    let band_ranges = (1..=opts.n_bands).map(|a| Ok((bs.band_min(a)?, bs.band_max(a)?))).collect::<Result<Vec<_>>>()?;
    let edge_margin = edge_margin(&bs, model.tilt(), model.orientation)?;
    assign_bands(&mut set, &band_ranges);
    let mut set = label_wells(&set, model.tilt(), &band_means, Anchor::for_orientation(model.orientation));
    if let Some(e_r) = e_r {
        attach_lifetimes(&mut set, e_r);
    }
    Ok(Analysis {
        set,
        dim: h.dim(),
        matrix_norm: spec.matrix_norm,
        eigenvalues: spec.eigenvalues,
        layout,
        band_means,
        edge_margin,
    })
}

#[derive(Debug, Clone)]
pub struct BarrierPoint {
    pub v0: f64,
    pub analysis: Analysis,
    pub onset: Option<f64>,
}

/// Solve the above-surface model for each barrier height.
pub fn barrier_scan(v0s: &[f64], template: &PotentialModel, opts: &SolveOptions, e_r: Option<f64>) -> Result<Vec<BarrierPoint>> {
    if template.orientation != Orientation::AboveSurface {
        return Err(Error::InvalidParameter("barrier scan needs the above-surface orientation".into()));
    }
    v0s.iter()
        .map(|&v0| {
            let model = PotentialModel::above_surface(template.depth(), template.tilt(), v0);
            let mut model = model;
            for t in &template.terms {
                if let crate::PotentialTerm::Yukawa { .. } = t {
                    model.terms.push(*t);
                }
            }
            let analysis = analyze(&model, opts, e_r)?;
            let onset = analysis.set.continuum_onset();
            Ok(BarrierPoint { v0, analysis, onset })
        })
        .collect()
}
