//! Fourier-decomposed 3D elasticity on the meridian domain.
//!
//! The meridian section of thickness `2 eps` is parametrized by the axial
//! coordinate `z` and the normal distance `x3`, mapped to `(r, tau)` by
//! `r = f + x3 / s`, `tau = z - x3 f' / s`. Unknowns per node are the radial,
//! azimuthal (covariant, after the real change of components) and axial
//! displacements. For azimuthal frequency `k` the stiffness is
//! `K0 + k K1 + k^2 K2`, so the three parts are assembled once per mesh.

use alloc::vec;
use alloc::vec::Vec;

use crate::asymptotics::{analyze, to_f64, OneDimOptions};
use crate::eig::{solve_with, SolveOptions, SymBandMatrix, SymmetricPencil};
use crate::error::{Result, ShellError};
use crate::exec::{Executor, Sequential};
use crate::fem1d::{Grading, Mesh1D};
use crate::geometry::ShellProfile;
use crate::quadrature::{gauss_legendre, gll_nodes, LagrangeBasis};

pub const DEFAULT_DEGREE: usize = 6;
pub const DEFAULT_MERIDIAN: usize = 16;
pub const DEFAULT_THICKNESS: usize = 2;

const COMPONENTS: usize = 3;
const C_R: usize = 0;
const C_PHI: usize = 1;
const C_TAU: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshSpec {
    pub n_meridian: usize,
    pub n_thickness: usize,
    pub degree: usize,
    pub grading: Grading,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self {
            n_meridian: DEFAULT_MERIDIAN,
            n_thickness: DEFAULT_THICKNESS,
            degree: DEFAULT_DEGREE,
            grading: Grading::Uniform,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct QuadPoint {
    r: f64,
    /// Quadrature weight times `|det J| * r`.
    weight: f64,
    /// Inverse-transpose Jacobian of `(xi, eta) -> (r, tau)`, row-major.
    jit: [f64; 4],
}

/// Parametric rectangle `I x (-eps, eps)` with cached geometry at quadrature points.
#[derive(Clone, Debug)]
pub struct MeridianMesh {
    pub eps: f64,
    pub spec: MeshSpec,
    pub interval: (f64, f64),
    pub z_nodes: Vec<f64>,
    pub young: f64,
    pub nu: f64,
    /// Smallest `|det J| / s`, the area ratio between the shell layer and the midsurface strip.
    pub min_area_ratio: f64,
    basis: LagrangeBasis,
    quad: (Vec<f64>, Vec<f64>),
    points: Vec<Vec<QuadPoint>>,
}

fn map_jacobian(d: &[f64; 5], x3: f64) -> ([f64; 2], [f64; 4]) {
    let (f, fp, fpp) = (d[0], d[1], d[2]);
    let s = libm::sqrt(1.0 + fp * fp);
    let s3 = s * s * s;
    let r = f + x3 / s;
    // rows: (r, tau); columns: (z, x3)
    let j = [fp - x3 * fp * fpp / s3, 1.0 / s, 1.0 - x3 * fpp / s3, -fp / s];
    ([r, s], j)
}

impl MeridianMesh {
    pub fn build(profile: &ShellProfile, eps: f64, spec: MeshSpec) -> Result<Self> {
        if spec.n_thickness == 0 || spec.degree == 0 {
            return Err(ShellError::Mesh("need at least one thickness element and degree >= 1".into()));
        }
        if !(eps > 0.0) {
            return Err(ShellError::Mesh(alloc::format!("half-thickness {eps} must be positive")));
        }
        let zmesh = Mesh1D::graded(profile.interval, spec.n_meridian, spec.grading)?;
        let p = spec.degree;
        let basis = LagrangeBasis::new(gll_nodes(p));
        let quad = gauss_legendre(p + 2);
        let hx = 2.0 * eps / spec.n_thickness as f64;
        let mut points = Vec::with_capacity(spec.n_meridian * spec.n_thickness);
        let mut min_area_ratio = f64::INFINITY;
        for em in 0..spec.n_meridian {
            let (za, zb) = (zmesh.nodes[em], zmesh.nodes[em + 1]);
            let hz = zb - za;
            for et in 0..spec.n_thickness {
                let xa = -eps + et as f64 * hx;
                let mut pts = Vec::with_capacity(quad.0.len() * quad.0.len());
                for (qi, &xi) in quad.0.iter().enumerate() {
                    let z = za + 0.5 * hz * (xi + 1.0);
                    let d = profile.derivatives(z);
                    for (qj, &eta) in quad.0.iter().enumerate() {
                        let x3 = xa + 0.5 * hx * (eta + 1.0);
                        let ([r, s], j) = map_jacobian(&d, x3);
                        let det = j[0] * j[3] - j[1] * j[2];
                        // the map reverses orientation: det = -s (1 - x3 b_zz)
                        if !(det < 0.0) || !(r > 0.0) {
                            return Err(ShellError::Mesh(alloc::format!(
                                "thickness too large: map degenerates at z = {z}, x3 = {x3}"
                            )));
                        }
                        min_area_ratio = min_area_ratio.min(-det / s);
                        // chain with (xi, eta) -> (z, x3)
                        let jj = [j[0] * 0.5 * hz, j[1] * 0.5 * hx, j[2] * 0.5 * hz, j[3] * 0.5 * hx];
                        let dd = jj[0] * jj[3] - jj[1] * jj[2];
                        // J^{-T} for J = [[r_xi, r_eta], [tau_xi, tau_eta]]
                        let jit = [jj[3] / dd, -jj[2] / dd, -jj[1] / dd, jj[0] / dd];
                        pts.push(QuadPoint {
                            r,
                            weight: quad.1[qi] * quad.1[qj] * dd.abs() * r,
                            jit,
                        });
                    }
                }
                points.push(pts);
            }
        }
        Ok(Self {
            eps,
            spec,
            interval: profile.interval,
            z_nodes: zmesh.nodes,
            young: profile.young,
            nu: profile.nu,
            min_area_ratio,
            basis,
            quad,
            points,
        })
    }

    fn nodes_z(&self) -> usize {
        self.spec.n_meridian * self.spec.degree + 1
    }

    fn nodes_x(&self) -> usize {
        self.spec.n_thickness * self.spec.degree + 1
    }

    /// Free DOF of component `c` at node `(i, j)`; `None` on the clamped ends.
    fn dof(&self, i: usize, j: usize, c: usize) -> Option<usize> {
        if i == 0 || i + 1 == self.nodes_z() {
            None
        } else {
            Some(COMPONENTS * ((i - 1) * self.nodes_x() + j) + c)
        }
    }

    pub fn dofs(&self) -> usize {
        COMPONENTS * (self.nodes_z() - 2) * self.nodes_x()
    }

    pub fn is_azimuthal_dof(dof: usize) -> bool {
        dof % COMPONENTS == C_PHI
    }

    fn element_dofs(&self, em: usize, et: usize) -> Vec<Option<usize>> {
        let p = self.spec.degree;
        let mut out = Vec::with_capacity(COMPONENTS * (p + 1) * (p + 1));
        for ai in 0..=p {
            for aj in 0..=p {
                for c in 0..COMPONENTS {
                    out.push(self.dof(em * p + ai, et * p + aj, c));
                }
            }
        }
        out
    }

    fn half_bandwidth(&self) -> usize {
        let mut kd = 0;
        for em in 0..self.spec.n_meridian {
            for et in 0..self.spec.n_thickness {
                let d: Vec<usize> = self.element_dofs(em, et).into_iter().flatten().collect();
                if let (Some(lo), Some(hi)) = (d.iter().min(), d.iter().max()) {
                    kd = kd.max(hi - lo);
                }
            }
        }
        kd
    }

    /// Radial displacement on the midline `x3 = 0`, `per_element` samples per meridian element.
    pub fn midline_radial(&self, u: &[f64], per_element: usize) -> (Vec<f64>, Vec<f64>) {
        let p = self.spec.degree;
        let hx = 2.0 * self.eps / self.spec.n_thickness as f64;
        let et = ((self.eps / hx) as usize).min(self.spec.n_thickness - 1);
        let eta = 2.0 * (self.eps - et as f64 * hx) / hx - 1.0;
        let n = p + 1;
        let (mut vx, mut dx) = (vec![0.0; n], vec![0.0; n]);
        self.basis.eval(eta, &mut vx, &mut dx);
        let (mut vz, mut dz) = (vec![0.0; n], vec![0.0; n]);
        let (mut zs, mut us) = (Vec::new(), Vec::new());
        let per = per_element.max(2);
        for em in 0..self.spec.n_meridian {
            let (za, zb) = (self.z_nodes[em], self.z_nodes[em + 1]);
            let start = if em == 0 { 0 } else { 1 };
            for t in start..per {
                let xi = -1.0 + 2.0 * t as f64 / (per - 1) as f64;
                self.basis.eval(xi, &mut vz, &mut dz);
                let mut val = 0.0;
                for ai in 0..=p {
                    for aj in 0..=p {
                        if let Some(d) = self.dof(em * p + ai, et * p + aj, C_R) {
                            val += vz[ai] * vx[aj] * u[d];
                        }
                    }
                }
                zs.push(za + 0.5 * (zb - za) * (xi + 1.0));
                us.push(val);
            }
        }
        (zs, us)
    }
}

/// `K(k) = K0 + k K1 + k^2 K2` and the mass on one meridian mesh.
#[derive(Clone, Debug)]
pub struct LameOperator {
    pub k0: SymBandMatrix,
    pub k1: SymBandMatrix,
    pub k2: SymBandMatrix,
    pub mass: SymBandMatrix,
}

/// Stiffness and mass at one azimuthal frequency.
#[derive(Clone, Debug)]
pub struct FourierLameSystem {
    pub k: i64,
    pub eps: f64,
    pub stiffness: SymBandMatrix,
    pub mass: SymBandMatrix,
}

impl LameOperator {
    pub fn assemble(mesh: &MeridianMesh) -> Self {
        let n = mesh.dofs();
        let kd = mesh.half_bandwidth();
        let mut k0 = SymBandMatrix::zeros(n, kd);
        let mut k1 = SymBandMatrix::zeros(n, kd);
        let mut k2 = SymBandMatrix::zeros(n, kd);
        let mut mass = SymBandMatrix::zeros(n, kd);

        let (e, nu) = (mesh.young, mesh.nu);
        let mu = e / (2.0 * (1.0 + nu));
        let lam = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        // normal strains (rr, tautau, phiphi) then shears (r tau, r phi, phi tau)
        let mut d = [[0.0; 6]; 6];
        for a in 0..3 {
            for b in 0..3 {
                d[a][b] = lam + if a == b { 2.0 * mu } else { 0.0 };
            }
            d[3 + a][3 + a] = mu;
        }

        let p = mesh.spec.degree;
        let nb = p + 1;
        let nq = mesh.quad.0.len();
        let mut val = vec![0.0; nq * nb];
        let mut der = vec![0.0; nq * nb];
        for q in 0..nq {
            mesh.basis
                .eval(mesh.quad.0[q], &mut val[q * nb..(q + 1) * nb], &mut der[q * nb..(q + 1) * nb]);
        }

        let nl = COMPONENTS * nb * nb;
        let mut s0 = vec![0.0; 6 * nl];
        let mut s1 = vec![0.0; 6 * nl];
        let mut ds0 = vec![0.0; 6 * nl];
        let mut ds1 = vec![0.0; 6 * nl];
        let mut l0 = vec![0.0; nl * nl];
        let mut l1 = vec![0.0; nl * nl];
        let mut l2 = vec![0.0; nl * nl];
        let mut lm = vec![0.0; nl * nl];
        let mut shape = vec![0.0; nb * nb];

        for em in 0..mesh.spec.n_meridian {
            for et in 0..mesh.spec.n_thickness {
                let pts = &mesh.points[em * mesh.spec.n_thickness + et];
                for v in [&mut l0, &mut l1, &mut l2, &mut lm] {
                    v.iter_mut().for_each(|x| *x = 0.0);
                }
                for qi in 0..nq {
                    for qj in 0..nq {
                        let qp = &pts[qi * nq + qj];
                        let (r, w) = (qp.r, qp.weight);
                        s0.iter_mut().for_each(|x| *x = 0.0);
                        s1.iter_mut().for_each(|x| *x = 0.0);
                        for ai in 0..nb {
                            for aj in 0..nb {
                                let nv = val[qi * nb + ai] * val[qj * nb + aj];
                                let nxi = der[qi * nb + ai] * val[qj * nb + aj];
                                let neta = val[qi * nb + ai] * der[qj * nb + aj];
                                let nr = qp.jit[0] * nxi + qp.jit[1] * neta;
                                let nt = qp.jit[2] * nxi + qp.jit[3] * neta;
                                let node = ai * nb + aj;
                                shape[node] = nv;
                                let (cr, cp, ct) = (
                                    COMPONENTS * node + C_R,
                                    COMPONENTS * node + C_PHI,
                                    COMPONENTS * node + C_TAU,
                                );
                                // e_rr, e_tautau, e_phiphi = (u_r + k u_phi / r) / r
                                s0[cr] = nr;
                                s0[nl + ct] = nt;
                                s0[2 * nl + cr] = nv / r;
                                s1[2 * nl + cp] = nv / (r * r);
                                // g_rtau
                                s0[3 * nl + cr] = nt;
                                s0[3 * nl + ct] = nr;
                                // g_rphi = (k u_r - d_r u_phi) / r + 2 u_phi / r^2
                                s1[4 * nl + cr] = nv / r;
                                s0[4 * nl + cp] = -nr / r + 2.0 * nv / (r * r);
                                // g_phitau = (k u_tau - d_tau u_phi) / r
                                s1[5 * nl + ct] = nv / r;
                                s0[5 * nl + cp] = -nt / r;
                            }
                        }
                        for a in 0..6 {
                            for col in 0..nl {
                                let (mut x0, mut x1) = (0.0, 0.0);
                                for b in 0..6 {
                                    if d[a][b] != 0.0 {
                                        x0 += d[a][b] * s0[b * nl + col];
                                        x1 += d[a][b] * s1[b * nl + col];
                                    }
                                }
                                ds0[a * nl + col] = w * x0;
                                ds1[a * nl + col] = w * x1;
                            }
                        }
                        for a in 0..nl {
                            for b in a..nl {
                                let (mut v0, mut v1, mut v2) = (0.0, 0.0, 0.0);
                                for t in 0..6 {
                                    let (sa0, sa1) = (s0[t * nl + a], s1[t * nl + a]);
                                    v0 += sa0 * ds0[t * nl + b];
                                    v1 += sa0 * ds1[t * nl + b] + sa1 * ds0[t * nl + b];
                                    v2 += sa1 * ds1[t * nl + b];
                                }
                                l0[a * nl + b] += v0;
                                l1[a * nl + b] += v1;
                                l2[a * nl + b] += v2;
                            }
                        }
                        for na in 0..nb * nb {
                            for nbb in na..nb * nb {
                                let m = w * shape[na] * shape[nbb];
                                for c in 0..COMPONENTS {
                                    let f = if c == C_PHI { 1.0 / (r * r) } else { 1.0 };
                                    let (a, b) = (COMPONENTS * na + c, COMPONENTS * nbb + c);
                                    lm[a * nl + b] += f * m;
                                }
                            }
                        }
                    }
                }
                let dofs = mesh.element_dofs(em, et);
                for a in 0..nl {
                    let Some(ga) = dofs[a] else { continue };
                    for b in a..nl {
                        let Some(gb) = dofs[b] else { continue };
                        k0.add(ga, gb, l0[a * nl + b]);
                        k1.add(ga, gb, l1[a * nl + b]);
                        k2.add(ga, gb, l2[a * nl + b]);
                        mass.add(ga, gb, lm[a * nl + b]);
                    }
                }
            }
        }
        Self { k0, k1, k2, mass }
    }

    pub fn stiffness(&self, k: f64) -> SymBandMatrix {
        self.k0.axpy(k, &self.k1).axpy(k * k, &self.k2)
    }

    pub fn system(&self, k: i64, eps: f64) -> FourierLameSystem {
        FourierLameSystem {
            k,
            eps,
            stiffness: self.stiffness(k as f64),
            mass: self.mass.clone(),
        }
    }
}

pub fn build_meridian_mesh(profile: &ShellProfile, eps: f64, spec: MeshSpec) -> Result<MeridianMesh> {
    MeridianMesh::build(profile, eps, spec)
}

pub fn assemble_fourier_lame(mesh: &MeridianMesh, k: i64) -> FourierLameSystem {
    LameOperator::assemble(mesh).system(k, mesh.eps)
}

/// Conjugates a matrix by the sign flip of all azimuthal DOFs.
pub fn flip_azimuthal(a: &SymBandMatrix) -> SymBandMatrix {
    let n = a.dim();
    let kd = a.half_bandwidth();
    let mut out = SymBandMatrix::zeros(n, kd);
    for i in 0..n {
        for j in i.saturating_sub(kd)..=i {
            let flip = MeridianMesh::is_azimuthal_dof(i) != MeridianMesh::is_azimuthal_dof(j);
            let v = a.get(i, j);
            out.set(i, j, if flip { -v } else { v });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRecord {
    pub eps: f64,
    pub k: i64,
    pub lambda1: f64,
    pub dofs: usize,
    /// Backward error of the eigenpair.
    pub residual: f64,
}

pub const RESIDUAL_TOL: f64 = 1e-8;

/// Lowest eigenpair. A positive `shift_hint` (such as the 1D prediction) is used
/// as `0.9 * hint`; if that shift lies above the spectrum the solve restarts from zero.
pub fn first_eigenvalue_2d(system: &FourierLameSystem, shift_hint: Option<f64>) -> Result<(SweepRecord, Vec<f64>)> {
    let pencil = SymmetricPencil::new(system.stiffness.clone(), system.mass.clone())?;
    let opts = |shift: f64| SolveOptions {
        shift,
        tol: RESIDUAL_TOL,
        adaptive_shift: true,
        ..SolveOptions::default()
    };
    let hinted = shift_hint.filter(|h| *h > 0.0).map(|h| 0.9 * h);
    let pairs = match hinted {
        Some(s) => match solve_with(&pencil, 1, &opts(s)) {
            Err(ShellError::Factorization { .. }) => solve_with(&pencil, 1, &opts(0.0))?,
            other => other?,
        },
        None => solve_with(&pencil, 1, &opts(0.0))?,
    };
    let pair = pairs.into_iter().next().expect("one eigenpair");
    Ok((
        SweepRecord {
            eps: system.eps,
            k: system.k,
            lambda1: pair.value,
            dofs: pencil.dim(),
            residual: pair.backward_error,
        },
        pair.vector,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KPolicy {
    /// Stop after this many consecutive increases past the running minimum.
    pub patience: usize,
    /// Stop beyond `cap_factor * gamma * eps^-beta`.
    pub cap_factor: f64,
    /// Cap used when the profile has no power law, and an absolute ceiling otherwise.
    pub k_max: u32,
    /// Frequencies solved per batch; batches go through the executor.
    pub batch: usize,
}

impl Default for KPolicy {
    fn default() -> Self {
        Self {
            patience: 3,
            cap_factor: 2.5,
            k_max: 200,
            batch: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct KSweep {
    pub k_best: i64,
    pub lambda_best: f64,
    pub records: Vec<SweepRecord>,
    /// False when the budget ran out before the minimum was bracketed.
    pub interior: bool,
    pub mode: Vec<f64>,
}

fn sweep_cap(profile: &ShellProfile, eps: f64, policy: &KPolicy) -> (f64, Option<f64>) {
    match analyze(profile, &OneDimOptions::default(), &Sequential) {
        Ok(a) => {
            let best = a.best_at(eps);
            let cap = policy.cap_factor * best.gamma * libm::pow(eps, -to_f64(best.beta));
            (cap.min(policy.k_max as f64), Some(best.m1(eps)))
        }
        Err(_) => (policy.k_max as f64, None),
    }
}

pub fn k_sweep(profile: &ShellProfile, eps: f64, spec: MeshSpec, policy: &KPolicy) -> Result<KSweep> {
    k_sweep_with(profile, eps, spec, policy, &Sequential)
}

pub fn k_sweep_with(
    profile: &ShellProfile,
    eps: f64,
    spec: MeshSpec,
    policy: &KPolicy,
    exec: &impl Executor,
) -> Result<KSweep> {
    let mesh = MeridianMesh::build(profile, eps, spec)?;
    let op = LameOperator::assemble(&mesh);
    let (cap, m1) = sweep_cap(profile, eps, policy);
    let k_last = libm::floor(cap).max(0.0) as i64;

    let mut records = Vec::new();
    let mut best: Option<(usize, Vec<f64>)> = None;
    let mut rising = 0;
    let mut prev = f64::INFINITY;
    let mut stopped = false;
    let mut k = 0i64;
    let batch = policy.batch.max(1);
    while k <= k_last && !stopped {
        let ks: Vec<i64> = (k..=k_last).take(batch).collect();
        let results = exec.map(ks.len(), &|i| first_eigenvalue_2d(&op.system(ks[i], eps), m1));
        for res in results {
            let (rec, vec) = res?;
            let lam = rec.lambda1;
            records.push(rec);
            let is_best = best.as_ref().map_or(true, |(i, _)| lam < records[*i].lambda1);
            if is_best {
                best = Some((records.len() - 1, vec));
                rising = 0;
            } else if lam > prev {
                rising += 1;
            } else {
                rising = 0;
            }
            prev = lam;
            if rising >= policy.patience {
                stopped = true;
                break;
            }
        }
        k += ks.len() as i64;
    }
    let (ib, mode) = best.ok_or_else(|| ShellError::Optimization("empty k sweep".into()))?;
    Ok(KSweep {
        k_best: records[ib].k,
        lambda_best: records[ib].lambda1,
        interior: ib + 1 < records.len(),
        records,
        mode,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeTrace {
    pub z: Vec<f64>,
    /// Radial displacement on the midline, scaled so that its largest magnitude is `+1`.
    pub u_r: Vec<f64>,
    pub argmax_z: f64,
    /// Mean distance from the argmax to where `|u_r|` drops below `e^-1/2`.
    pub half_width: f64,
}

pub fn midline_mode_trace(mesh: &MeridianMesh, eigvec: &[f64]) -> ModeTrace {
    let (z, mut u) = mesh.midline_radial(eigvec, 24);
    let (imax, peak) = u
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, &v)| if v.abs() > acc.1.abs() { (i, v) } else { acc });
    if peak != 0.0 {
        u.iter_mut().for_each(|v| *v /= peak);
    }
    let level = libm::exp(-0.5);
    let crossing = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut last = imax;
        for i in range {
            if u[i].abs() < level {
                let (a, b) = (u[last].abs(), u[i].abs());
                let t = (a - level) / (a - b);
                return Some(z[last] + t * (z[i] - z[last]));
            }
            last = i;
        }
        None
    };
    let left = crossing(&mut (0..imax).rev()).map(|zc| z[imax] - zc);
    let right = crossing(&mut (imax + 1..z.len())).map(|zc| zc - z[imax]);
    let half_width = match (left, right) {
        (Some(a), Some(b)) => 0.5 * (a + b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => mesh.interval.1 - mesh.interval.0,
    };
    ModeTrace {
        argmax_z: z[imax],
        z,
        u_r: u,
        half_width,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{preset, Model};
    use approx::assert_relative_eq;

    fn small_spec() -> MeshSpec {
        MeshSpec {
            n_meridian: 4,
            n_thickness: 1,
            degree: 3,
            grading: Grading::Uniform,
        }
    }

    #[test]
    fn cylinder_map_is_affine() {
        let mesh = build_meridian_mesh(&preset(Model::A), 0.2, MeshSpec::default()).unwrap();
        assert_relative_eq!(mesh.min_area_ratio, 1.0, epsilon = 1e-14);
        let (lo, hi) = (mesh.z_nodes[0], *mesh.z_nodes.last().unwrap());
        assert_eq!((lo, hi), mesh.interval);
    }

    #[test]
    fn arc_mesh_builds_at_default_resolution() {
        let mesh = build_meridian_mesh(&preset(Model::D), 0.2, MeshSpec::default()).unwrap();
        assert_eq!(mesh.dofs(), 3 * (16 * 6 - 1) * (2 * 6 + 1));
    }

    #[test]
    fn area_ratio_tracks_meridian_curvature() {
        let mesh = build_meridian_mesh(&preset(Model::H), 0.01, MeshSpec::default()).unwrap();
        let estimate = 1.0 - 0.01 * 0.715;
        assert!((mesh.min_area_ratio - estimate).abs() / estimate < 0.02);
    }

    #[test]
    fn too_thick_is_a_mesh_error() {
        let err = build_meridian_mesh(&preset(Model::A), 3.0, small_spec()).unwrap_err();
        assert!(matches!(err, ShellError::Mesh(_)));
    }

    #[test]
    fn azimuthal_block_decouples_at_k_zero() {
        let mesh = build_meridian_mesh(&preset(Model::H), 0.1, small_spec()).unwrap();
        let sys = assemble_fourier_lame(&mesh, 0);
        let n = sys.stiffness.dim();
        let kd = sys.stiffness.half_bandwidth();
        for i in 0..n {
            for j in i.saturating_sub(kd)..=i {
                if MeridianMesh::is_azimuthal_dof(i) != MeridianMesh::is_azimuthal_dof(j) {
                    assert_eq!(sys.stiffness.get(i, j), 0.0);
                    assert_eq!(sys.mass.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn opposite_frequencies_are_conjugate() {
        let mesh = build_meridian_mesh(&preset(Model::D), 0.1, small_spec()).unwrap();
        let op = LameOperator::assemble(&mesh);
        for k in [1i64, 3, 7] {
            let plus = flip_azimuthal(&op.system(k, 0.1).stiffness);
            let minus = op.system(-k, 0.1).stiffness;
            let scale = minus.norm_inf();
            let n = plus.dim();
            for i in 0..n {
                for j in i.saturating_sub(plus.half_bandwidth())..=i {
                    assert!((plus.get(i, j) - minus.get(i, j)).abs() <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn mass_is_positive_definite_and_spectrum_positive() {
        let mesh = build_meridian_mesh(&preset(Model::B), 0.1, small_spec()).unwrap();
        let sys = assemble_fourier_lame(&mesh, 2);
        assert!(sys.mass.cholesky().is_ok());
        let (rec, vec) = first_eigenvalue_2d(&sys, None).unwrap();
        assert!(rec.lambda1 > 0.0);
        assert!(rec.residual < RESIDUAL_TOL);
        assert_eq!(vec.len(), rec.dofs);
    }

    #[test]
    fn degree_refinement_is_monotone_and_converged() {
        let mut prev = f64::INFINITY;
        for p in [4, 6, 8] {
            let spec = MeshSpec { degree: p, ..MeshSpec::default() };
            let mesh = build_meridian_mesh(&preset(Model::A), 0.1, spec).unwrap();
            let (rec, _) = first_eigenvalue_2d(&assemble_fourier_lame(&mesh, 4), None).unwrap();
            assert!(rec.lambda1 <= prev * (1.0 + 1e-12));
            prev = rec.lambda1;
        }
        assert!((prev - 0.247818094718).abs() / 0.247818094718 < 1e-9);
        let mesh = build_meridian_mesh(&preset(Model::A), 0.1, MeshSpec::default()).unwrap();
        let (rec, _) = first_eigenvalue_2d(&assemble_fourier_lame(&mesh, 4), None).unwrap();
        assert!((rec.lambda1 - 0.247818094718).abs() / 0.247818094718 < 0.02);
    }

    #[test]
    fn mode_trace_is_normalized() {
        let mesh = build_meridian_mesh(&preset(Model::A), 0.1, small_spec()).unwrap();
        let (_, vec) = first_eigenvalue_2d(&assemble_fourier_lame(&mesh, 3), None).unwrap();
        let trace = midline_mode_trace(&mesh, &vec);
        let peak = trace.u_r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_relative_eq!(peak, 1.0, epsilon = 1e-14);
        assert!(trace.half_width > 0.0 && trace.half_width < 2.0);
        assert_eq!(trace.u_r[0], 0.0);
        assert_eq!(*trace.u_r.last().unwrap(), 0.0);
    }
}
