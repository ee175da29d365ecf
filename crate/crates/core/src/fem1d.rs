//! Conforming 1D finite elements for the reduced operators on the meridian
//! interval, with the natural measure `f(z) s(z) dz`.
//!
//! `H^2_0`: cubic Hermite elements (value and slope per node), clamped ends.
//! `H^1_0`: quadratic Lagrange elements, Dirichlet ends.

use alloc::vec;
use alloc::vec::Vec;

use crate::eig::{solve_with, SolveOptions, SymBandMatrix, SymmetricPencil};
use crate::error::{Result, ShellError};
use crate::geometry::ShellProfile;
use crate::quadrature::gauss_legendre;

pub const DEFAULT_ELEMENTS: usize = 128;
const QUAD_POINTS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Grading {
    Uniform,
    /// Element sizes grow geometrically by `ratio` from both ends toward the middle.
    Boundary(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh1D {
    pub nodes: Vec<f64>,
    pub grading: Grading,
}

impl Mesh1D {
    pub fn uniform(interval: (f64, f64), n: usize) -> Result<Self> {
        Self::graded(interval, n, Grading::Uniform)
    }

    pub fn graded(interval: (f64, f64), n: usize, grading: Grading) -> Result<Self> {
        let (a, b) = interval;
        if n == 0 || !(a < b) {
            return Err(ShellError::Mesh("need at least one element on a nondegenerate interval".into()));
        }
        let sizes: Vec<f64> = match grading {
            Grading::Uniform => vec![1.0; n],
            Grading::Boundary(r) => {
                if !(r >= 1.0) {
                    return Err(ShellError::Mesh("grading ratio must be >= 1".into()));
                }
                (0..n)
                    .map(|i| {
                        let from_end = i.min(n - 1 - i);
                        libm::pow(r, from_end as f64)
                    })
                    .collect()
            }
        };
        let total: f64 = sizes.iter().sum();
        let mut nodes = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        nodes.push(a);
        for s in &sizes[..n - 1] {
            acc += s;
            nodes.push(a + (b - a) * acc / total);
        }
        nodes.push(b);
        Ok(Self { nodes, grading })
    }

    pub fn elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }
}

/// Per-point coefficients of a reduced operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FunctionSpace {
    H20,
    H10,
}

/// Stiffness split as `K = K_lead + K_pot` with a shared mass `M`.
#[derive(Clone, Debug)]
pub struct Assembled1D {
    pub space: FunctionSpace,
    pub mesh: Mesh1D,
    /// `int a4 eta'' eta~''` (H20) or `int g eta' eta~'` (H10), weighted by `f s`.
    pub lead: SymBandMatrix,
    /// `int V eta eta~`, weighted by `f s`.
    pub potential: SymBandMatrix,
    pub mass: SymBandMatrix,
}

impl Assembled1D {
    pub fn stiffness(&self) -> SymBandMatrix {
        self.lead.axpy(1.0, &self.potential)
    }

    /// `alpha * lead + beta * potential`.
    pub fn combine(&self, alpha: f64, beta: f64) -> SymBandMatrix {
        let mut a = self.lead.clone();
        a.scale(alpha);
        a.axpy(beta, &self.potential)
    }

    pub fn dofs(&self) -> usize {
        self.mass.dim()
    }

    /// Value of the finite element function with free coefficients `c` at `z`.
    pub fn evaluate(&self, c: &[f64], z: f64) -> f64 {
        let nodes = &self.mesh.nodes;
        let ne = nodes.len() - 1;
        let e = match nodes.windows(2).position(|w| z >= w[0] && z <= w[1]) {
            Some(e) => e,
            None => return 0.0,
        };
        let (a, b) = (nodes[e], nodes[e + 1]);
        let h = b - a;
        let t = (z - a) / h;
        match self.space {
            FunctionSpace::H20 => {
                let (v, _, _) = hermite(t, h);
                let dofs = hermite_dofs(e, ne);
                (0..4).map(|i| dofs[i].map_or(0.0, |d| c[d] * v[i])).sum()
            }
            FunctionSpace::H10 => {
                let (v, _) = quadratic(t, h);
                let dofs = quadratic_dofs(e, ne);
                (0..3).map(|i| dofs[i].map_or(0.0, |d| c[d] * v[i])).sum()
            }
        }
    }
}

fn hermite(t: f64, h: f64) -> ([f64; 4], [f64; 4], [f64; 4]) {
    let t2 = t * t;
    let t3 = t2 * t;
    let v = [1.0 - 3.0 * t2 + 2.0 * t3, h * (t - 2.0 * t2 + t3), 3.0 * t2 - 2.0 * t3, h * (t3 - t2)];
    let d = [
        (-6.0 * t + 6.0 * t2) / h,
        1.0 - 4.0 * t + 3.0 * t2,
        (6.0 * t - 6.0 * t2) / h,
        3.0 * t2 - 2.0 * t,
    ];
    let dd = [
        (-6.0 + 12.0 * t) / (h * h),
        (-4.0 + 6.0 * t) / h,
        (6.0 - 12.0 * t) / (h * h),
        (6.0 * t - 2.0) / h,
    ];
    (v, d, dd)
}

/// Free DOF index of each local Hermite DOF; clamped ends are `None`.
fn hermite_dofs(e: usize, ne: usize) -> [Option<usize>; 4] {
    let global = [2 * e, 2 * e + 1, 2 * e + 2, 2 * e + 3];
    let last = 2 * ne;
    global.map(|g| if g < 2 || g >= last { None } else { Some(g - 2) })
}

fn quadratic(t: f64, h: f64) -> ([f64; 3], [f64; 3]) {
    let v = [(1.0 - t) * (1.0 - 2.0 * t), 4.0 * t * (1.0 - t), t * (2.0 * t - 1.0)];
    let d = [(4.0 * t - 3.0) / h, (4.0 - 8.0 * t) / h, (4.0 * t - 1.0) / h];
    (v, d)
}

fn quadratic_dofs(e: usize, ne: usize) -> [Option<usize>; 3] {
    let global = [2 * e, 2 * e + 1, 2 * e + 2];
    let last = 2 * ne;
    global.map(|g| if g == 0 || g == last { None } else { Some(g - 1) })
}

/// Assembles `int a4 eta'' eta~'' + shift eta eta~` and the mass, all with weight `f s`,
/// on cubic Hermite elements with clamped ends.
pub fn assemble_h20<A, S>(profile: &ShellProfile, a4: A, shift: S, mesh: &Mesh1D) -> Result<Assembled1D>
where
    A: Fn(f64) -> f64,
    S: Fn(f64) -> f64,
{
    let ne = mesh.elements();
    let n = 2 * ne - 2;
    if n == 0 {
        return Err(ShellError::Mesh("H20 needs at least two elements".into()));
    }
    let (gx, gw) = gauss_legendre(QUAD_POINTS);
    let mut lead = SymBandMatrix::zeros(n, 3);
    let mut pot = SymBandMatrix::zeros(n, 3);
    let mut mass = SymBandMatrix::zeros(n, 3);
    for e in 0..ne {
        let (a, b) = (mesh.nodes[e], mesh.nodes[e + 1]);
        let h = b - a;
        let dofs = hermite_dofs(e, ne);
        let mut kl = [[0.0; 4]; 4];
        let mut kp = [[0.0; 4]; 4];
        let mut ml = [[0.0; 4]; 4];
        for (x, w) in gx.iter().zip(&gw) {
            let t = 0.5 * (x + 1.0);
            let z = a + h * t;
            let d = profile.derivatives(z);
            let weight = w * 0.5 * h * d[0] * libm::sqrt(1.0 + d[1] * d[1]);
            let c4 = a4(z);
            if !(c4 > 0.0) {
                return Err(ShellError::Assembly(alloc::format!(
                    "fourth-order coefficient {c4} is not positive at z = {z}"
                )));
            }
            let sh = shift(z);
            let (v, _, dd) = hermite(t, h);
            for i in 0..4 {
                for j in 0..4 {
                    kl[i][j] += weight * c4 * dd[i] * dd[j];
                    kp[i][j] += weight * sh * v[i] * v[j];
                    ml[i][j] += weight * v[i] * v[j];
                }
            }
        }
        scatter(&dofs, &kl, &mut lead);
        scatter(&dofs, &kp, &mut pot);
        scatter(&dofs, &ml, &mut mass);
    }
    Ok(Assembled1D {
        space: FunctionSpace::H20,
        mesh: mesh.clone(),
        lead,
        potential: pot,
        mass,
    })
}

/// Assembles `int g eta' eta~' + V eta eta~` and the mass, with weight `f s`,
/// on quadratic Lagrange elements with Dirichlet ends.
pub fn assemble_h10<G, V>(profile: &ShellProfile, g_coeff: G, potential: V, mesh: &Mesh1D) -> Result<Assembled1D>
where
    G: Fn(f64) -> f64,
    V: Fn(f64) -> f64,
{
    let ne = mesh.elements();
    let n = 2 * ne - 1;
    let (gx, gw) = gauss_legendre(QUAD_POINTS);
    let mut lead = SymBandMatrix::zeros(n, 2);
    let mut pot = SymBandMatrix::zeros(n, 2);
    let mut mass = SymBandMatrix::zeros(n, 2);
    for e in 0..ne {
        let (a, b) = (mesh.nodes[e], mesh.nodes[e + 1]);
        let h = b - a;
        let dofs = quadratic_dofs(e, ne);
        let mut kl = [[0.0; 3]; 3];
        let mut kp = [[0.0; 3]; 3];
        let mut ml = [[0.0; 3]; 3];
        for (x, w) in gx.iter().zip(&gw) {
            let t = 0.5 * (x + 1.0);
            let z = a + h * t;
            let d = profile.derivatives(z);
            let weight = w * 0.5 * h * d[0] * libm::sqrt(1.0 + d[1] * d[1]);
            let g = g_coeff(z);
            if g < 0.0 {
                return Err(ShellError::Admissibility(alloc::format!(
                    "second-order coefficient {g} is negative at z = {z}"
                )));
            }
            let vz = potential(z);
            let (v, dv) = quadratic(t, h);
            for i in 0..3 {
                for j in 0..3 {
                    kl[i][j] += weight * g * dv[i] * dv[j];
                    kp[i][j] += weight * vz * v[i] * v[j];
                    ml[i][j] += weight * v[i] * v[j];
                }
            }
        }
        scatter(&dofs, &kl, &mut lead);
        scatter(&dofs, &kp, &mut pot);
        scatter(&dofs, &ml, &mut mass);
    }
    Ok(Assembled1D {
        space: FunctionSpace::H10,
        mesh: mesh.clone(),
        lead,
        potential: pot,
        mass,
    })
}

fn scatter<const L: usize>(dofs: &[Option<usize>; L], local: &[[f64; L]; L], global: &mut SymBandMatrix) {
    for i in 0..L {
        let Some(gi) = dofs[i] else { continue };
        for j in 0..=i {
            let Some(gj) = dofs[j] else { continue };
            // symmetrized by construction: only the lower triangle of the local matrix is used
            if gi == gj {
                global.add(gi, gj, local[i][j]);
            } else {
                global.add(gi, gj, 0.5 * (local[i][j] + local[j][i]));
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenSolution1D {
    pub eigenvalue: f64,
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

/// The `m` smallest eigenpairs of `K x = lambda M x`.
pub fn smallest_eigenpairs(stiffness: &SymBandMatrix, mass: &SymBandMatrix, m: usize) -> Result<Vec<EigenSolution1D>> {
    let pencil = SymmetricPencil::new(stiffness.clone(), mass.clone())?;
    let pairs = solve_with(
        &pencil,
        m,
        &SolveOptions {
            adaptive_shift: true,
            ..SolveOptions::default()
        },
    )?;
    Ok(pairs
        .into_iter()
        .map(|p| EigenSolution1D {
            eigenvalue: p.value,
            coefficients: p.vector,
            residual: p.residual,
        })
        .collect())
}

/// Quadratic form `x^T A x`.
pub fn quadratic_form(a: &SymBandMatrix, x: &[f64]) -> f64 {
    let mut y = vec![0.0; x.len()];
    a.matvec(x, &mut y);
    x.iter().zip(&y).map(|(p, q)| p * q).sum()
}

pub fn rayleigh_quotient(k: &SymBandMatrix, m: &SymBandMatrix, x: &[f64]) -> f64 {
    quadratic_form(k, x) / quadratic_form(m, x)
}

/// First root of `cos(k) cosh(k) = 1`, the clamped-beam characteristic equation.
pub fn clamped_beam_root() -> f64 {
    let f = |k: f64| libm::cos(k) * libm::cosh(k) - 1.0;
    let (mut a, mut b) = (4.0, 5.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(a) * f(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}
