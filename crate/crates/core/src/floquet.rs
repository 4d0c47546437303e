//! Evolution over one Bloch period and the quasienergies it defines.
//!
//! Time is measured in `ħ/E_r`. One ladder step `f·π` then accumulates a
//! phase of exactly 2π over `T_B = 2/f`.

use std::f64::consts::PI;

use ndarray::Array2;
use ndarray_linalg::Inverse;

use crate::eigensolve::{self, Backend, ComplexSpectrum};
use crate::{Error, Result, C64};

#[derive(Debug, Clone)]
pub struct FloquetResult {
    /// Quasienergies `-arg(μ)/T_B`, folded into `[ref - fπ/2, ref + fπ/2)`.
    pub quasienergies: Vec<C64>,
    /// `Γ = -2 ln|μ| / T_B`.
    pub widths: Vec<f64>,
    pub t_b: f64,
    /// Centre of the folding window.
    pub fold_center: f64,
    /// Height of the folding window, `f·π`.
    pub step: f64,
}

pub fn bloch_period(f: f64) -> Result<f64> {
    if !(f > 0.0) {
        return Err(Error::InvalidParameter(format!("tilt {f} has no Bloch period")));
    }
    Ok(2.0 / f)
}

/// `V e^{-iΛT} V⁻¹` from a spectrum that carries eigenvectors.
pub fn floquet_operator(spec: &ComplexSpectrum, t_b: f64) -> Result<Array2<C64>> {
    let v = spec
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("Floquet operator needs eigenvectors".into()))?;
    let vinv = v.inv().map_err(|e| Error::Backend(e.to_string()))?;
    let cond = one_norm(v) * one_norm(&vinv);
    if !cond.is_finite() || cond > 1e12 {
        return Err(Error::IllConditioned(cond));
    }
    let mut scaled = v.clone();
    for (k, mut col) in scaled.columns_mut().into_iter().enumerate() {
        let phase = (C64::new(0.0, -t_b) * spec.eigenvalues[k]).exp();
        col.mapv_inplace(|z| z * phase);
    }
    Ok(scaled.dot(&vinv))
}

fn one_norm(a: &Array2<C64>) -> f64 {
    a.columns().into_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Quasienergies from the eigenvalues `μ` of the one-period evolution.
pub fn from_multipliers(mu: &[C64], t_b: f64, step: f64, fold_center: f64) -> FloquetResult {
    let mut quasienergies = Vec::with_capacity(mu.len());
    let mut widths = Vec::with_capacity(mu.len());
    for &m in mu {
        let re = fold(-m.arg() / t_b, step, fold_center);
        let gamma = -2.0 * m.norm().ln() / t_b;
        quasienergies.push(C64::new(re, -0.5 * gamma));
        widths.push(gamma);
    }
    FloquetResult { quasienergies, widths, t_b, fold_center, step }
}

/// Fold `e` into `[c - step/2, c + step/2)`.
pub fn fold(e: f64, step: f64, c: f64) -> f64 {
    let x = (e - c + 0.5 * step).rem_euclid(step);
    c - 0.5 * step + x
}

/// Build the one-period operator and diagonalize it again.
pub fn floquet_resonances(spec: &ComplexSpectrum, f: f64, backend: Backend) -> Result<FloquetResult> {
    let t_b = bloch_period(f)?;
    let u = floquet_operator(spec, t_b)?;
    let mu = eigensolve::eig_matrix(&u, false, backend)?.eigenvalues;
    Ok(from_multipliers(&mu, t_b, f * PI, 0.0))
}

impl FloquetResult {
    /// Index of the quasienergy closest to the folded image of `e`.
    pub fn nearest(&self, e: C64) -> Option<usize> {
        let t = C64::new(fold(e.re, self.step, self.fold_center), e.im);
        let dist = |q: C64| {
            let d = (q.re - t.re).abs() % self.step;
            d.min(self.step - d).hypot(q.im - t.im)
        };
        (0..self.quasienergies.len()).min_by(|&a, &b| dist(self.quasienergies[a]).total_cmp(&dist(self.quasienergies[b])))
    }

    /// Width of the ladder whose folded position is nearest `target`.
    ///
    /// A ladder in a finite box folds onto a tight cluster of nearly equal
    /// quasienergies; isolated continuum points do not. The densest cluster
    /// within a quarter step of `target` is taken and its median width returned.
    pub fn ladder(&self, target: f64, cluster_tol: f64) -> Option<(f64, f64)> {
        let t = fold(target, self.step, self.fold_center);
        let dist = |a: f64, b: f64| {
            let d = (a - b).abs() % self.step;
            d.min(self.step - d)
        };
        let cand: Vec<usize> = (0..self.quasienergies.len())
            .filter(|&k| dist(self.quasienergies[k].re, t) < 0.25 * self.step && self.widths[k] >= 0.0)
            .collect();
        let mut best: Option<(usize, Vec<usize>)> = None;
        for &k in &cand {
            let near: Vec<usize> = cand
                .iter()
                .cloned()
                .filter(|&j| {
                    dist(self.quasienergies[j].re, self.quasienergies[k].re) < cluster_tol
                        && (self.widths[j] - self.widths[k]).abs() < cluster_tol
                })
                .collect();
            if best.as_ref().is_none_or(|(_, b)| near.len() > b.len()) {
                best = Some((k, near));
            }
        }
        let (_, members) = best?;
        if members.len() < 3 {
            return None;
        }
        let mut w: Vec<f64> = members.iter().map(|&j| self.widths[j]).collect();
        let mut e: Vec<f64> = members.iter().map(|&j| self.quasienergies[j].re).collect();
        w.sort_by(f64::total_cmp);
        e.sort_by(f64::total_cmp);
        Some((e[e.len() / 2], w[w.len() / 2]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_closure() {
        let f = 0.0223025;
        let t = bloch_period(f).unwrap();
        let ph = C64::new(0.0, -f * PI * t).exp();
        assert!((ph - 1.0).norm() < 1e-12);
        assert!((bloch_period(2.0 * f).unwrap() - 0.5 * t).abs() < 1e-12);
        assert!(bloch_period(0.0).is_err());
    }

    #[test]
    fn ladder_collapses_on_folding() {
        let f = 0.0223025;
        let t = bloch_period(f).unwrap();
        let mu: Vec<C64> = (0..5).map(|n| (C64::new(0.0, -t) * C64::new(1.2 - n as f64 * f * PI, -1e-3)).exp()).collect();
        let r = from_multipliers(&mu, t, f * PI, 0.0);
        for q in &r.quasienergies {
            assert!((q.re - r.quasienergies[0].re).abs() < 1e-11);
        }
        for w in &r.widths {
            assert!((w - 2e-3).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_real_hamiltonian_gives_unitary_diagonal() {
        let d = vec![C64::new(0.3, 0.0), C64::new(1.1, 0.0), C64::new(-0.4, 0.0)];
        let spec = ComplexSpectrum {
            eigenvalues: d,
            eigenvectors: Some(Array2::eye(3)),
            matrix_norm: 1.0,
            theta: 0.0,
        };
        let u = floquet_operator(&spec, 7.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    assert!((u[[i, i]].norm() - 1.0).abs() < 1e-14);
                } else {
                    assert_eq!(u[[i, j]].norm(), 0.0);
                }
            }
        }
        let id = floquet_operator(&spec, 0.0).unwrap();
        assert!((&id - &Array2::<C64>::eye(3)).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn nearest_wraps_around_the_window() {
        // quasienergies -0.34 and 0.2 in a window of height 0.7
        let r = from_multipliers(&[C64::from_polar(0.99, 0.34), C64::from_polar(0.99, -0.2)], 1.0, 0.7, 0.0);
        let im = r.quasienergies[0].im;
        assert_eq!(r.nearest(C64::new(0.349, im)), Some(0));
        assert_eq!(r.nearest(C64::new(0.349 + 2.1, im)), Some(0));
        assert_eq!(r.nearest(C64::new(0.25 - 0.7, im)), Some(1));
    }

    #[test]
    fn fold_window() {
        let s = 0.07;
        for e in [-3.0, -0.02, 0.0, 0.034, 1.7] {
            let x = fold(e, s, 0.0);
            assert!((-0.035..0.035).contains(&x));
            let k = ((e - x) / s).round();
            assert!((e - x - k * s).abs() < 1e-12);
        }
    }
}
