//! Generalized symmetric-definite eigensolver for banded pencils.
//!
//! `K x = lambda M x` is solved by shift-invert subspace iteration with
//! `M`-orthogonal Rayleigh-Ritz projection. The shifted matrix `K - sigma M`
//! is factorized by a banded Cholesky, which succeeds exactly when `sigma`
//! lies below the spectrum; this is used to keep shifts safe.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, ShellError};

/// Symmetric matrix stored by its lower band: entry `(i, j)` with
/// `i - kd <= j <= i` lives at `data[i * (kd + 1) + kd - (i - j)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymBandMatrix {
    n: usize,
    kd: usize,
    data: Vec<f64>,
}

impl SymBandMatrix {
    pub fn zeros(n: usize, kd: usize) -> Self {
        let kd = kd.min(n.saturating_sub(1));
        Self {
            n,
            kd,
            data: vec![0.0; n * (kd + 1)],
        }
    }

    pub fn from_dense(a: &[f64], n: usize) -> Self {
        let mut kd = 0;
        for i in 0..n {
            for j in 0..i {
                if a[i * n + j] != 0.0 || a[j * n + i] != 0.0 {
                    kd = kd.max(i - j);
                }
            }
        }
        let mut m = Self::zeros(n, kd);
        for i in 0..n {
            for j in i.saturating_sub(kd)..=i {
                m.set(i, j, 0.5 * (a[i * n + j] + a[j * n + i]));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.kd
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.kd + 1) + self.kd + j - i
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        if i - j > self.kd {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        assert!(i - j <= self.kd, "entry outside band");
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// Adds `v` to the symmetric pair `(i, j)`, `(j, i)`.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        debug_assert!(i - j <= self.kd, "entry outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// `self + alpha * other`; both must have the same dimension.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let kd = self.kd.max(other.kd);
        let mut out = Self::zeros(self.n, kd);
        for i in 0..self.n {
            for j in i.saturating_sub(kd)..=i {
                out.set(i, j, self.get(i, j) + alpha * other.get(i, j));
            }
        }
        out
    }

    pub fn scale(&mut self, alpha: f64) {
        for v in self.data.iter_mut() {
            *v *= alpha;
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let (n, kd) = (self.n, self.kd);
        for v in y.iter_mut() {
            *v = 0.0;
        }
        for i in 0..n {
            let j0 = i.saturating_sub(kd);
            let row = &self.data[i * (kd + 1) + kd - (i - j0)..i * (kd + 1) + kd];
            let mut acc = self.data[i * (kd + 1) + kd] * x[i];
            for (off, a) in row.iter().enumerate() {
                let j = j0 + off;
                acc += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += acc;
        }
    }

    /// `Y = A X` for `q` column vectors stored row-major (`x[i * q + c]`).
    pub fn matmul_block(&self, x: &[f64], q: usize, y: &mut [f64]) {
        let (n, kd) = (self.n, self.kd);
        for v in y.iter_mut() {
            *v = 0.0;
        }
        for i in 0..n {
            let j0 = i.saturating_sub(kd);
            let d = self.data[i * (kd + 1) + kd];
            for c in 0..q {
                y[i * q + c] += d * x[i * q + c];
            }
            for j in j0..i {
                let a = self.data[i * (kd + 1) + kd - (i - j)];
                if a == 0.0 {
                    continue;
                }
                for c in 0..q {
                    y[i * q + c] += a * x[j * q + c];
                    y[j * q + c] += a * x[i * q + c];
                }
            }
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0; self.n];
        for i in 0..self.n {
            for j in i.saturating_sub(self.kd)..=i {
                let v = self.get(i, j).abs();
                rows[i] += v;
                if j != i {
                    rows[j] += v;
                }
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = self.get(i, j);
            }
        }
        a
    }

    pub fn cholesky(&self) -> Result<BandCholesky> {
        let (n, kd) = (self.n, self.kd);
        let w = kd + 1;
        let mut l = self.data.clone();
        for i in 0..n {
            let j0 = i.saturating_sub(kd);
            for j in j0..=i {
                let k0 = j0.max(j.saturating_sub(kd));
                let mut sum = l[i * w + kd + j - i];
                let ri = i * w + kd - i;
                let rj = j * w + kd - j;
                for k in k0..j {
                    sum -= l[ri + k] * l[rj + k];
                }
                if i == j {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return Err(ShellError::Factorization { pivot: i, value: sum });
                    }
                    l[i * w + kd] = libm::sqrt(sum);
                } else {
                    l[i * w + kd + j - i] = sum / l[j * w + kd];
                }
            }
        }
        Ok(BandCholesky { n, kd, l })
    }
}

/// Lower-triangular banded Cholesky factor.
#[derive(Clone, Debug)]
pub struct BandCholesky {
    n: usize,
    kd: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    /// Solves `L L^T X = B` in place for `q` right-hand sides stored row-major.
    pub fn solve_block(&self, b: &mut [f64], q: usize) {
        let (n, kd) = (self.n, self.kd);
        let w = kd + 1;
        for i in 0..n {
            let j0 = i.saturating_sub(kd);
            for j in j0..i {
                let a = self.l[i * w + kd + j - i];
                if a == 0.0 {
                    continue;
                }
                for c in 0..q {
                    b[i * q + c] -= a * b[j * q + c];
                }
            }
            let d = self.l[i * w + kd];
            for c in 0..q {
                b[i * q + c] /= d;
            }
        }
        for i in (0..n).rev() {
            let d = self.l[i * w + kd];
            for c in 0..q {
                b[i * q + c] /= d;
            }
            let j0 = i.saturating_sub(kd);
            for j in j0..i {
                let a = self.l[i * w + kd + j - i];
                if a == 0.0 {
                    continue;
                }
                for c in 0..q {
                    b[j * q + c] -= a * b[i * q + c];
                }
            }
        }
    }

    pub fn solve(&self, b: &mut [f64]) {
        self.solve_block(b, 1);
    }

    /// `log det` of the factored matrix.
    pub fn log_det(&self) -> f64 {
        let w = self.kd + 1;
        (0..self.n).map(|i| 2.0 * libm::log(self.l[i * w + self.kd])).sum()
    }
}

/// A stiffness/mass pair sharing one dimension.
#[derive(Clone, Debug)]
pub struct SymmetricPencil {
    pub k: SymBandMatrix,
    pub m: SymBandMatrix,
}

impl SymmetricPencil {
    pub fn new(k: SymBandMatrix, m: SymBandMatrix) -> Result<Self> {
        if k.dim() != m.dim() {
            return Err(ShellError::Assembly("stiffness and mass dimensions differ".into()));
        }
        Ok(Self { k, m })
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// Relative residual `||K x - lambda M x|| / ||K x||`.
    pub residual: f64,
    /// Backward error `||K x - lambda M x|| / ((||K|| + |lambda| ||M||) ||x||)`.
    pub backward_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub shift: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Move the shift towards the lowest Ritz value once it has settled.
    pub adaptive_shift: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            shift: 0.0,
            tol: 1e-10,
            max_iter: 200,
            seed: 0x5eed,
            adaptive_shift: false,
        }
    }
}

/// The `m` smallest eigenpairs of the pencil, sorted ascending, `M`-orthonormal.
pub fn solve_smallest(pencil: &SymmetricPencil, m: usize, shift: f64, tol: f64) -> Result<Vec<EigenPair>> {
    solve_with(
        pencil,
        m,
        &SolveOptions {
            shift,
            tol,
            ..SolveOptions::default()
        },
    )
}

pub fn solve_with(pencil: &SymmetricPencil, m: usize, opts: &SolveOptions) -> Result<Vec<EigenPair>> {
    let n = pencil.dim();
    if m == 0 || n == 0 {
        return Ok(Vec::new());
    }
    let m = m.min(n);
    if n <= 64 {
        return dense_smallest(pencil, m);
    }
    let q = (m + 8).min(2 * m + 8).min(n);

    let mut base_shift = opts.shift;
    let mut factor = match pencil.k.axpy(-base_shift, &pencil.m).cholesky() {
        Ok(f) => f,
        Err(_) => {
            base_shift *= 1.0 - 1e-3;
            pencil.k.axpy(-base_shift, &pencil.m).cholesky()?
        }
    };

    let norms = (pencil.k.norm_inf(), pencil.m.norm_inf());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<f64> = (0..n * q)
        .map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        .collect();
    let mut y = vec![0.0; n * q];
    let mut kz = vec![0.0; n * q];
    let mut mz = vec![0.0; n * q];
    let mut prev_theta = f64::INFINITY;
    let mut moves_left = if opts.adaptive_shift { 3 } else { 0 };
    let mut settle_tol = 1e-3;
    let mut last_res = f64::INFINITY;

    for it in 0..opts.max_iter {
        pencil.m.matmul_block(&x, q, &mut y);
        factor.solve_block(&mut y, q);
        core::mem::swap(&mut x, &mut y);
        pencil.k.matmul_block(&x, q, &mut kz);
        pencil.m.matmul_block(&x, q, &mut mz);
        let kr = gram(&x, &kz, n, q);
        let mr = gram(&x, &mz, n, q);
        let (theta, phi) = dense_generalized(&kr, &mr, q)?;
        // x <- x * phi, and the same for K x, M x
        rotate(&mut x, &phi, n, q, &mut y);
        rotate(&mut kz, &phi, n, q, &mut y);
        rotate(&mut mz, &phi, n, q, &mut y);

        let col = |a: &[f64], c: usize| -> Vec<f64> { (0..n).map(|i| a[i * q + c]).collect() };
        let checks: Vec<(f64, f64)> = (0..m)
            .map(|c| residuals(&col(&kz, c), &col(&mz, c), &col(&x, c), theta[c], norms))
            .collect();
        // a backward error at round-off level cannot be improved by iterating
        let done = checks.iter().all(|&(rel, bwd)| rel <= opts.tol || bwd <= BACKWARD_FLOOR);
        last_res = checks.iter().fold(0.0f64, |a, &(rel, _)| a.max(rel));
        if done {
            return Ok((0..m)
                .map(|c| EigenPair {
                    value: theta[c],
                    vector: col(&x, c),
                    residual: checks[c].0,
                    backward_error: checks[c].1,
                })
                .collect());
        }

        let settled = (prev_theta - theta[0]).abs() <= settle_tol * theta[0].abs();
        prev_theta = theta[0];
        if moves_left > 0 && settled && it >= 2 {
            moves_left -= 1;
            settle_tol *= 1e-3;
            let mut frac = 0.98;
            for _ in 0..6 {
                let trial = base_shift + frac * (theta[0] - base_shift);
                if let Ok(f) = pencil.k.axpy(-trial, &pencil.m).cholesky() {
                    factor = f;
                    base_shift = trial;
                    break;
                }
                frac *= 0.5;
            }
        }
    }
    Err(ShellError::NoConvergence {
        iterations: opts.max_iter,
        residual: last_res,
    })
}

fn gram(a: &[f64], b: &[f64], n: usize, q: usize) -> Vec<f64> {
    let mut g = vec![0.0; q * q];
    for i in 0..n {
        let ra = &a[i * q..i * q + q];
        let rb = &b[i * q..i * q + q];
        for r in 0..q {
            let av = ra[r];
            for c in 0..q {
                g[r * q + c] += av * rb[c];
            }
        }
    }
    for r in 0..q {
        for c in 0..r {
            let v = 0.5 * (g[r * q + c] + g[c * q + r]);
            g[r * q + c] = v;
            g[c * q + r] = v;
        }
    }
    g
}

fn rotate(x: &mut [f64], phi: &[f64], n: usize, q: usize, scratch: &mut [f64]) {
    for i in 0..n {
        let row = &x[i * q..i * q + q];
        for c in 0..q {
            let mut acc = 0.0;
            for r in 0..q {
                acc += row[r] * phi[r * q + c];
            }
            scratch[i * q + c] = acc;
        }
    }
    x[..n * q].copy_from_slice(&scratch[..n * q]);
}

/// Dense generalized problem `A phi = theta B phi` with `B` SPD; eigenvectors
/// are returned as columns of a row-major `q x q` matrix, `B`-orthonormal.
pub fn dense_generalized(a: &[f64], b: &[f64], q: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let l = dense_cholesky(b, q)?;
    // C = L^-1 A L^-T
    let mut c = a.to_vec();
    for col in 0..q {
        forward_col(&l, &mut c, q, col);
    }
    let mut ct = transpose(&c, q);
    for col in 0..q {
        forward_col(&l, &mut ct, q, col);
    }
    let (vals, vecs) = jacobi_eigen(&ct, q);
    // phi = L^-T w
    let mut phi = vecs;
    for col in 0..q {
        for i in (0..q).rev() {
            let mut s = phi[i * q + col];
            for k in i + 1..q {
                s -= l[k * q + i] * phi[k * q + col];
            }
            phi[i * q + col] = s / l[i * q + i];
        }
    }
    Ok((vals, phi))
}

fn transpose(a: &[f64], q: usize) -> Vec<f64> {
    let mut t = vec![0.0; q * q];
    for i in 0..q {
        for j in 0..q {
            t[j * q + i] = a[i * q + j];
        }
    }
    t
}

fn forward_col(l: &[f64], c: &mut [f64], q: usize, col: usize) {
    for i in 0..q {
        let mut s = c[i * q + col];
        for k in 0..i {
            s -= l[i * q + k] * c[k * q + col];
        }
        c[i * q + col] = s / l[i * q + i];
    }
}

fn dense_cholesky(b: &[f64], q: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; q * q];
    for i in 0..q {
        for j in 0..=i {
            let mut s = b[i * q + j];
            for k in 0..j {
                s -= l[i * q + k] * l[j * q + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(ShellError::Factorization { pivot: i, value: s });
                }
                l[i * q + i] = libm::sqrt(s);
            } else {
                l[i * q + j] = s / l[j * q + j];
            }
        }
    }
    Ok(l)
}

/// Cyclic Jacobi rotations for a small symmetric matrix. Eigenvalues ascending,
/// eigenvectors as columns.
pub fn jacobi_eigen(a: &[f64], q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = a.to_vec();
    let mut v = vec![0.0; q * q];
    for i in 0..q {
        v[i * q + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..q)
            .flat_map(|i| (0..q).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * q + j] * a[i * q + j])
            .sum();
        let diag: f64 = (0..q).map(|i| a[i * q + i] * a[i * q + i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..q {
            for r in p + 1..q {
                let apr = a[p * q + r];
                if apr == 0.0 {
                    continue;
                }
                let theta = (a[r * q + r] - a[p * q + p]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..q {
                    let akp = a[k * q + p];
                    let akr = a[k * q + r];
                    a[k * q + p] = c * akp - s * akr;
                    a[k * q + r] = s * akp + c * akr;
                }
                for k in 0..q {
                    let apk = a[p * q + k];
                    let ark = a[r * q + k];
                    a[p * q + k] = c * apk - s * ark;
                    a[r * q + k] = s * apk + c * ark;
                }
                for k in 0..q {
                    let vkp = v[k * q + p];
                    let vkr = v[k * q + r];
                    v[k * q + p] = c * vkp - s * vkr;
                    v[k * q + r] = s * vkp + c * vkr;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&i, &j| a[i * q + i].total_cmp(&a[j * q + j]));
    let vals = order.iter().map(|&i| a[i * q + i]).collect();
    let mut vecs = vec![0.0; q * q];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..q {
            vecs[k * q + new] = v[k * q + old];
        }
    }
    (vals, vecs)
}

const BACKWARD_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Relative residual and backward error of a Ritz pair.
fn residuals(kx: &[f64], mx: &[f64], x: &[f64], theta: f64, (kn, mn): (f64, f64)) -> (f64, f64) {
    let rn = libm::sqrt(kx.iter().zip(mx).map(|(k, m)| (k - theta * m) * (k - theta * m)).sum::<f64>());
    let kxn = libm::sqrt(kx.iter().map(|k| k * k).sum::<f64>());
    let xn = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>());
    let scale = (kn + theta.abs() * mn) * xn;
    let rel = if kxn > 0.0 { rn / kxn } else { 0.0 };
    let bwd = if scale > 0.0 { rn / scale } else { 0.0 };
    (rel, bwd)
}

fn dense_smallest(pencil: &SymmetricPencil, m: usize) -> Result<Vec<EigenPair>> {
    let n = pencil.dim();
    let a = pencil.k.to_dense();
    let b = pencil.m.to_dense();
    let (vals, vecs) = dense_generalized(&a, &b, n)?;
    Ok((0..m)
        .map(|c| {
            let vector: Vec<f64> = (0..n).map(|i| vecs[i * n + c]).collect();
            let mut kx = vec![0.0; n];
            let mut mx = vec![0.0; n];
            pencil.k.matvec(&vector, &mut kx);
            pencil.m.matvec(&vector, &mut mx);
            let (residual, backward_error) =
                residuals(&kx, &mx, &vector, vals[c], (pencil.k.norm_inf(), pencil.m.norm_inf()));
            EigenPair {
                value: vals[c],
                residual,
                backward_error,
                vector,
            }
        })
        .collect())
}
