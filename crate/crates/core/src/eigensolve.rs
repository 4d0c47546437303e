//! Dense non-Hermitian eigenproblems and the c-product.
//!
//! Two backends: LAPACK `zgeev` and a native path (balancing, Householder
//! Hessenberg reduction, shifted complex QR with deflation, inverse
//! iteration for vectors). The native path is O(n³) with a large constant
//! and meant for small matrices and cross-checks.

use ndarray::{Array1, Array2, ArrayView1, Axis};
use ndarray_linalg::{Eig, EigVals};

use crate::discretize::{GridSpec, ScaledHamiltonian};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Lapack,
    Native,
}

#[derive(Debug, Clone)]
pub struct ComplexSpectrum {
    /// Sorted by real part, ties by imaginary part.
    pub eigenvalues: Vec<C64>,
    /// Column `k` belongs to `eigenvalues[k]`, 2-norm normalized.
    pub eigenvectors: Option<Array2<C64>>,
    /// Frobenius norm of the decomposed matrix.
    pub matrix_norm: f64,
    pub theta: f64,
}

pub fn eig(h: &ScaledHamiltonian, want_vectors: bool) -> Result<ComplexSpectrum> {
    eig_with(h, want_vectors, Backend::Lapack)
}

pub fn eig_with(h: &ScaledHamiltonian, want_vectors: bool, backend: Backend) -> Result<ComplexSpectrum> {
    let mut s = eig_matrix(&h.matrix, want_vectors, backend)?;
    s.theta = h.theta;
    Ok(s)
}

pub fn eig_matrix(a: &Array2<C64>, want_vectors: bool, backend: Backend) -> Result<ComplexSpectrum> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidParameter(format!("matrix is {}x{}", a.nrows(), a.ncols())));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let norm = frobenius(a);
    let (values, vectors) = match backend {
        Backend::Lapack => {
            if want_vectors {
                let (w, v) = a.eig().map_err(|e| Error::Backend(e.to_string()))?;
                (w.to_vec(), Some(v))
            } else {
                (a.eigvals().map_err(|e| Error::Backend(e.to_string()))?.to_vec(), None)
            }
        }
        Backend::Native => {
            let w = native_eigenvalues(a)?;
            let v = if want_vectors { Some(inverse_iteration(a, &w)?) } else { None };
            (w, v)
        }
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].re.total_cmp(&values[j].re).then(values[i].im.total_cmp(&values[j].im)));
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let eigenvectors = vectors.map(|v| {
        let mut out = v.select(Axis(1), &order);
        for mut col in out.columns_mut() {
            let nrm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm > 0.0 {
                col.mapv_inplace(|z| z / nrm);
            }
        }
        out
    });
    Ok(ComplexSpectrum { eigenvalues, eigenvectors, matrix_norm: norm, theta: 0.0 })
}

pub fn frobenius(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest `‖A v - λ v‖ / ‖A‖` over the stored pairs.
pub fn max_residual(a: &Array2<C64>, s: &ComplexSpectrum) -> Option<f64> {
    let v = s.eigenvectors.as_ref()?;
    let av = a.dot(v);
    let mut worst = 0.0f64;
    for (k, &lam) in s.eigenvalues.iter().enumerate() {
        let r: f64 = av.column(k).iter().zip(v.column(k)).map(|(x, y)| (x - lam * y).norm_sqr()).sum();
        worst = worst.max(r.sqrt());
    }
    Some(worst / s.matrix_norm.max(f64::MIN_POSITIVE))
}

/// Diagonal similarity by powers of two so that row and column norms match.
fn balance(a: &mut Array2<C64>) {
    let n = a.nrows();
    let radix = 2.0f64;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[[j, i]].l1_norm();
                    r += a[[i, j]].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut c2, mut r2) = (c, r);
            while c2 < r2 / radix {
                f *= radix;
                c2 *= radix;
                r2 /= radix;
            }
            while c2 >= r2 * radix {
                f /= radix;
                c2 /= radix;
                r2 *= radix;
            }
            if (c2 + r2) < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[[i, j]] /= f;
                    a[[j, i]] *= f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form, in place.
fn hessenberg(a: &mut Array2<C64>) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    let mut v = vec![C64::new(0.0, 0.0); n];
    for k in 0..n - 2 {
        let alpha: f64 = (k + 1..n).map(|i| a[[i, k]].norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[[k + 1, k]];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        // v = x + e^{i arg x0} ‖x‖ e1, reflect to -e^{i arg x0} ‖x‖ e1
        for i in k + 1..n {
            v[i] = a[[i, k]];
        }
        v[k + 1] += phase * alpha;
        let vn: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
        if vn == 0.0 {
            continue;
        }
        // A ← (I - 2vv*/v*v) A
        for j in k..n {
            let mut s = C64::new(0.0, 0.0);
            for i in k + 1..n {
                s += v[i].conj() * a[[i, j]];
            }
            let s = 2.0 * s / vn;
            for i in k + 1..n {
                let t = s * v[i];
                a[[i, j]] -= t;
            }
        }
        // A ← A (I - 2vv*/v*v)
        for i in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for j in k + 1..n {
                s += a[[i, j]] * v[j];
            }
            let s = 2.0 * s / vn;
            for j in k + 1..n {
                let t = s * v[j].conj();
                a[[i, j]] -= t;
            }
        }
        for i in k + 2..n {
            a[[i, k]] = C64::new(0.0, 0.0);
        }
    }
}

/// Givens rotation `[c s; -s̄ c]` (c real) that zeroes `b` in `(a, b)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, (b / nb).conj());
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

/// All eigenvalues by balancing, Hessenberg reduction and shifted QR.
pub fn native_eigenvalues(a: &Array2<C64>) -> Result<Vec<C64>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let eps = f64::EPSILON;
    let mut found = vec![None; n];
    let mut hi = n - 1;
    let mut its = 0usize;
    let mut total = 0usize;
    let budget = 30 * n.max(1);
    loop {
        if hi == 0 {
            found[0] = Some(h[[0, 0]]);
            break;
        }
        let mut l = hi;
        while l > 0 {
            let scale = h[[l - 1, l - 1]].l1_norm() + h[[l, l]].l1_norm();
            let scale = if scale == 0.0 { frobenius(&h) } else { scale };
            if h[[l, l - 1]].l1_norm() <= eps * scale {
                h[[l, l - 1]] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            found[hi] = Some(h[[hi, hi]]);
            hi -= 1;
            its = 0;
            continue;
        }
        if total >= budget {
            let partial: Vec<C64> = found.iter().flatten().cloned().collect();
            return Err(Error::NoConvergence { n, converged: partial.len(), partial });
        }
        its += 1;
        total += 1;
        let shift = if its % 10 == 0 {
            // exceptional shift to break cycles
            h[[hi, hi]] + C64::new(h[[hi, hi - 1]].re.abs(), 0.0) + if hi >= 2 { h[[hi - 1, hi - 2]].norm() } else { 0.0 }
        } else {
            wilkinson(h[[hi - 1, hi - 1]], h[[hi - 1, hi]], h[[hi, hi - 1]], h[[hi, hi]])
        };
        qr_step(&mut h, l, hi, shift);
    }
    Ok(found.into_iter().map(|z| z.expect("every slot deflated")).collect())
}

/// Eigenvalue of the trailing 2x2 block closest to its last diagonal entry.
fn wilkinson(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let m = 0.5 * (a - d);
    let disc = (m * m + b * c).sqrt();
    let r1 = 0.5 * (a + d) + disc;
    let r2 = 0.5 * (a + d) - disc;
    if (r1 - d).norm() < (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// One explicitly shifted QR sweep on the active block `l..=hi`.
fn qr_step(h: &mut Array2<C64>, l: usize, hi: usize, mu: C64) {
    for k in l..=hi {
        h[[k, k]] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - l);
    for k in l..hi {
        let (c, s) = givens(h[[k, k]], h[[k + 1, k]]);
        for j in k..=hi {
            let x = h[[k, j]];
            let y = h[[k + 1, j]];
            h[[k, j]] = c * x + s * y;
            h[[k + 1, j]] = -s.conj() * x + c * y;
        }
        rots.push((c, s));
    }
    for (k, &(c, s)) in (l..hi).zip(&rots) {
        for i in l..=(k + 2).min(hi) {
            let x = h[[i, k]];
            let y = h[[i, k + 1]];
            h[[i, k]] = c * x + s.conj() * y;
            h[[i, k + 1]] = -s * x + c * y;
        }
    }
    for k in l..=hi {
        h[[k, k]] += mu;
    }
}

/// LU with partial pivoting, packed. Zero pivots are nudged to `tiny`.
pub(crate) struct Lu {
    lu: Array2<C64>,
    piv: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub(crate) fn new(mut a: Array2<C64>, tiny: f64) -> Self {
        let n = a.nrows();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[[i, k]].norm().total_cmp(&a[[j, k]].norm())).unwrap();
            if p != k {
                for j in 0..n {
                    a.swap([k, j], [p, j]);
                }
                piv.swap(k, p);
                sign = -sign;
            }
            if a[[k, k]].norm() == 0.0 {
                a[[k, k]] = C64::new(tiny, 0.0);
            }
            let d = a[[k, k]];
            for i in k + 1..n {
                let m = a[[i, k]] / d;
                a[[i, k]] = m;
                if m.norm() != 0.0 {
                    for j in k + 1..n {
                        let t = m * a[[k, j]];
                        a[[i, j]] -= t;
                    }
                }
            }
        }
        Self { lu: a, piv, sign }
    }

    pub(crate) fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = b.len();
        let mut x: Vec<C64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let t = self.lu[[i, k]] * x[k];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.lu[[i, k]] * x[k];
                x[i] -= t;
            }
            x[i] /= self.lu[[i, i]];
        }
        x
    }

    pub(crate) fn determinant(&self) -> C64 {
        (0..self.lu.nrows()).fold(C64::new(self.sign, 0.0), |d, i| d * self.lu[[i, i]])
    }
}

/// Right eigenvectors of `a` for the given eigenvalues, as columns.
pub fn inverse_iteration(a: &Array2<C64>, values: &[C64]) -> Result<Array2<C64>> {
    let n = a.nrows();
    let norm = frobenius(a).max(f64::MIN_POSITIVE);
    let mut out = Array2::zeros((n, values.len()));
    for (k, &lam) in values.iter().enumerate() {
        let shift = lam + 1e-13 * lam.norm().max(norm) * C64::new(1.0, 1.0);
        let mut m = a.clone();
        for i in 0..n {
            m[[i, i]] -= shift;
        }
        let lu = Lu::new(m, f64::EPSILON * norm);
        // deterministic, not orthogonal to anything in particular
        let mut x: Vec<C64> = (0..n).map(|i| C64::new(1.0, 0.5 * ((i * 7 + 3) % 11) as f64 / 11.0)).collect();
        for _ in 0..3 {
            x = lu.solve(&x);
            let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if !(nrm.is_finite() && nrm > 0.0) {
                return Err(Error::Backend(format!("inverse iteration broke down at eigenvalue {lam}")));
            }
            x.iter_mut().for_each(|z| *z /= nrm);
        }
        out.column_mut(k).assign(&Array1::from(x));
    }
    Ok(out)
}

/// Determinant by LU, used as an independent check of the eigenvalue product.
pub fn determinant(a: &Array2<C64>) -> C64 {
    Lu::new(a.clone(), 0.0).determinant()
}

fn grid_weights(len: usize, grid: &GridSpec) -> Result<(f64, bool)> {
    if len == grid.n_points {
        Ok((grid.h(), true))
    } else if len + 2 == grid.n_points {
        // interior nodes only, the wall values are zero
        Ok((grid.h(), false))
    } else {
        Err(Error::GridMismatch(format!("vector of length {len} on a grid of {} nodes", grid.n_points)))
    }
}

/// `∫ f g dz` by the trapezoidal rule, without complex conjugation.
pub fn c_inner(f: ArrayView1<C64>, g: ArrayView1<C64>, grid: &GridSpec) -> Result<C64> {
    if f.len() != g.len() {
        return Err(Error::GridMismatch(format!("lengths {} and {}", f.len(), g.len())));
    }
    let (h, with_ends) = grid_weights(f.len(), grid)?;
    let mut s: C64 = f.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
    if with_ends {
        let n = f.len();
        s -= 0.5 * (f[0] * g[0] + f[n - 1] * g[n - 1]);
    }
    Ok(h * s)
}

/// Scale `v` so that `(v|v) = 1`.
pub fn c_normalize(v: ArrayView1<C64>, grid: &GridSpec) -> Result<Array1<C64>> {
    let c = c_inner(v, v, grid)?;
    let (h, _) = grid_weights(v.len(), grid)?;
    let std: f64 = h * v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if c.norm() < 1e-12 * std || std == 0.0 {
        return Err(Error::SelfOrthogonal(c.norm()));
    }
    let s = c.sqrt();
    Ok(v.mapv(|z| z / s))
}

/// `(v| diag(d) |v) / (v|v)`; with `d = ∂H/∂f` this is `∂E/∂f`.
pub fn c_expectation(v: ArrayView1<C64>, d: &[C64]) -> C64 {
    let mut num = C64::new(0.0, 0.0);
    let mut den = C64::new(0.0, 0.0);
    for (x, &w) in v.iter().zip(d) {
        let x2 = x * x;
        num += x2 * w;
        den += x2;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn swap_matrix() {
        let a = array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        for b in [Backend::Lapack, Backend::Native] {
            let s = eig_matrix(&a, true, b).unwrap();
            assert!((s.eigenvalues[0] + 1.0).norm() < 1e-14);
            assert!((s.eigenvalues[1] - 1.0).norm() < 1e-14);
            assert!(max_residual(&a, &s).unwrap() < 1e-12);
        }
    }

    #[test]
    fn ordering_is_real_then_imaginary() {
        let a = Array2::from_diag(&Array1::from(vec![c(1.0, 2.0), c(-1.0, 0.0), c(1.0, -3.0)]));
        let s = eig_matrix(&a, false, Backend::Native).unwrap();
        assert_eq!(s.eigenvalues, vec![c(-1.0, 0.0), c(1.0, -3.0), c(1.0, 2.0)]);
    }

    #[test]
    fn lu_determinant_small() {
        let a = array![[c(2.0, 1.0), c(1.0, 0.0)], [c(0.0, 1.0), c(3.0, 0.0)]];
        let want = c(2.0, 1.0) * c(3.0, 0.0) - c(1.0, 0.0) * c(0.0, 1.0);
        assert!((determinant(&a) - want).norm() < 1e-14);
    }

    #[test]
    fn c_product_of_rotating_phase_vanishes() {
        let g = GridSpec::new(0.0, 2.0 * std::f64::consts::PI, 257).unwrap();
        let v = Array1::from(g.nodes().iter().map(|&z| C64::from_polar(1.0, z)).collect::<Vec<_>>());
        let ci = c_inner(v.view(), v.view(), &g).unwrap();
        assert!(ci.norm() < 1e-12, "{ci}");
        let std: f64 = g.h() * v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        assert!((std - 2.0 * std::f64::consts::PI).abs() < 0.05);
        assert!(matches!(c_normalize(v.view(), &g), Err(Error::SelfOrthogonal(_))));
    }

    #[test]
    fn c_product_sin_cos() {
        let g = GridSpec::new(0.0, 4.0 * std::f64::consts::PI, 401).unwrap();
        let s = Array1::from(g.nodes().iter().map(|&z| c(z.sin(), 0.0)).collect::<Vec<_>>());
        let co = Array1::from(g.nodes().iter().map(|&z| c(z.cos(), 0.0)).collect::<Vec<_>>());
        assert!(c_inner(s.view(), co.view(), &g).unwrap().norm() < 1e-12);
        let ss = c_inner(s.view(), s.view(), &g).unwrap();
        assert!((ss.re - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn c_normalize_undoes_scaling() {
        let g = GridSpec::new(0.0, 3.0, 101).unwrap();
        let v = Array1::from(g.nodes().iter().map(|&z| c((-(z - 1.5) * (z - 1.5)).exp(), 0.0)).collect::<Vec<_>>());
        let n1 = c_normalize(v.view(), &g).unwrap();
        let n2 = c_normalize(v.mapv(|z| z * c(2.0, 1.0)).view(), &g).unwrap();
        assert!((c_inner(n2.view(), n2.view(), &g).unwrap() - 1.0).norm() < 1e-13);
        // unique up to sign
        let d = n1.iter().zip(n2.iter()).map(|(a, b)| (a - b).norm().min((a + b).norm())).fold(0.0, f64::max);
        assert!(d < 1e-13);
    }

    #[test]
    fn rejects_mismatched_grid() {
        let g = GridSpec::new(0.0, 3.0, 101).unwrap();
        let v = Array1::<C64>::zeros(50);
        assert!(matches!(c_inner(v.view(), v.view(), &g), Err(Error::GridMismatch(_))));
    }
}
