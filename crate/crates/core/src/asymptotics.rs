//! Wavenumber and eigenvalue power laws per shell class.
//!
//! For a half-thickness `eps`, the optimal azimuthal wavenumber behaves like
//! `k(eps) = gamma * eps^-beta` and the lowest eigenvalue like
//! `m1(eps) = a0 + a1 * eps^alpha1`, with `beta = 2 / (4 + eta1)` and
//! `alpha1 = eta1 * beta`. Parabolic and toroidal shells obtain `gamma` and
//! `a1` from a 1D eigenvalue minimized over `gamma`; Gaussian and Airy
//! barrels from explicit constants at the minimizer of `H0`.

use alloc::vec::Vec;

use num_rational::Rational64;

use crate::airy::first_airy_zero;
use crate::eig::SymBandMatrix;
use crate::exec::Executor;
use crate::error::{Result, ShellError};
use crate::fem1d::{assemble_h10, assemble_h20, clamped_beam_root, quadratic_form, smallest_eigenpairs, Mesh1D};
use crate::geometry::{classify, frame_at, H0Minimum, ProfileShape, ShellProfile, ShellTag};
use crate::optimize::{golden_section, log_grid};
use crate::symbols::h2_operator;

pub type Exponent = Rational64;

pub fn exponents_from_eta1(eta1: Exponent) -> (Exponent, Exponent) {
    let beta = Exponent::from_integer(2) / (Exponent::from_integer(4) + eta1);
    (beta, eta1 * beta)
}

pub fn eta1_for(tag: ShellTag) -> Option<Exponent> {
    match tag {
        ShellTag::Cylinder | ShellTag::Cone => Some(Exponent::from_integer(4)),
        ShellTag::TorusElliptic => Some(Exponent::from_integer(2)),
        ShellTag::GaussElliptic => Some(Exponent::from_integer(1)),
        ShellTag::AiryElliptic => Some(Exponent::new(2, 3)),
        ShellTag::Hyperbolic | ShellTag::Inadmissible => None,
    }
}

pub fn to_f64(r: Exponent) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticsResult {
    pub class: ShellTag,
    pub z0: Option<f64>,
    pub eta1: Exponent,
    pub beta: Exponent,
    pub alpha1: Exponent,
    pub a0: f64,
    pub a1: f64,
    pub gamma: f64,
    pub b: Option<f64>,
    pub c: Option<f64>,
    /// Exactly one half for parabolic shells; otherwise the coefficient `delta`
    /// of the bending-to-total energy ratio `delta * eps^alpha1`.
    pub ratio_coeff: f64,
    /// Lowest eigenvalue of the second-order reduction (toroidal shells).
    pub lambda2: Option<f64>,
}

impl AsymptoticsResult {
    fn new(class: ShellTag, a0: f64, a1: f64, gamma: f64) -> Self {
        let eta1 = eta1_for(class).expect("class with a power law");
        let (beta, alpha1) = exponents_from_eta1(eta1);
        Self {
            class,
            z0: None,
            eta1,
            beta,
            alpha1,
            a0,
            a1,
            gamma,
            b: None,
            c: None,
            ratio_coeff: 0.5,
            lambda2: None,
        }
    }

    pub fn k_real(&self, eps: f64) -> f64 {
        self.gamma * libm::pow(eps, -to_f64(self.beta))
    }

    pub fn m1(&self, eps: f64) -> f64 {
        self.a0 + self.a1 * libm::pow(eps, to_f64(self.alpha1))
    }

    pub fn ratio(&self, eps: f64) -> f64 {
        if self.class.is_parabolic() {
            self.ratio_coeff
        } else {
            self.ratio_coeff * libm::pow(eps, to_f64(self.alpha1))
        }
    }
}

/// Nearest integer with ties rounded up.
pub fn nearest_wavenumber(k: f64) -> u32 {
    libm::floor(k + 0.5).max(0.0) as u32
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub k_real: f64,
    pub k_int: u32,
    pub m1: f64,
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OneDimOptions {
    pub elements: usize,
    /// Initial scan range for `gamma` in the parabolic reduction.
    pub bracket: (f64, f64),
    /// Initial scan range in the toroidal reduction, where the lower wall only grows like `gamma^-2`.
    pub torus_bracket: (f64, f64),
    pub scan_points: usize,
    pub rel_width: f64,
}

impl Default for OneDimOptions {
    fn default() -> Self {
        Self {
            elements: crate::fem1d::DEFAULT_ELEMENTS,
            bracket: (0.3, 30.0),
            torus_bracket: (0.1, 10.0),
            scan_points: 64,
            rel_width: 1e-6,
        }
    }
}

/// `mu(gamma) = lambda1[gamma^-p L + gamma^4 B]` with a shared mass.
#[derive(Clone, Debug)]
pub struct GammaProblem {
    pub lead: SymBandMatrix,
    pub bend: SymBandMatrix,
    pub mass: SymBandMatrix,
    pub lead_power: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaEval {
    pub gamma: f64,
    pub mu: f64,
    /// `<L eta, eta>` and `<B eta, eta>` for the mass-normalized eigenvector.
    pub lead_energy: f64,
    pub bend_energy: f64,
    pub eigenvector: Vec<f64>,
}

impl GammaEval {
    /// Bending share of the total energy.
    pub fn ratio(&self, lead_power: i32) -> f64 {
        let b = libm::pow(self.gamma, 4.0) * self.bend_energy;
        b / (libm::pow(self.gamma, -(lead_power as f64)) * self.lead_energy + b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaOptimum {
    pub best: GammaEval,
    pub scan: Vec<(f64, f64)>,
    pub bracket: (f64, f64),
}

impl GammaProblem {
    pub fn eval(&self, gamma: f64) -> Result<GammaEval> {
        let k = self.stiffness(gamma);
        let e = smallest_eigenpairs(&k, &self.mass, 1)?;
        let v = &e[0].coefficients;
        let norm = quadratic_form(&self.mass, v);
        Ok(GammaEval {
            gamma,
            mu: e[0].eigenvalue,
            lead_energy: quadratic_form(&self.lead, v) / norm,
            bend_energy: quadratic_form(&self.bend, v) / norm,
            eigenvector: v.clone(),
        })
    }

    pub fn mu(&self, gamma: f64) -> Result<f64> {
        Ok(self.eval(gamma)?.mu)
    }

    pub fn stiffness(&self, gamma: f64) -> SymBandMatrix {
        let mut k = self.lead.clone();
        k.scale(libm::pow(gamma, -(self.lead_power as f64)));
        k.axpy(libm::pow(gamma, 4.0), &self.bend)
    }

    /// Coarse log-grid scan, bracket expansion, golden section on `log gamma`,
    /// then the stationarity fixed point `gamma^(p+4) = p <L> / (4 <B>)`.
    pub fn optimize(&self, opts: &OneDimOptions, grid: &impl Executor) -> Result<GammaOptimum> {
        let (mut lo, mut hi) = opts.bracket;
        let (lo0, hi0) = (lo, hi);
        let mut scan: Vec<(f64, f64)> = Vec::new();
        let imin = loop {
            let xs = log_grid(lo, hi, opts.scan_points);
            let ys = grid.map(xs.len(), &|i| self.mu(xs[i]));
            scan.clear();
            for (x, y) in xs.iter().zip(ys) {
                scan.push((*x, y?));
            }
            let imin = scan
                .iter()
                .enumerate()
                .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
                .map(|(i, _)| i)
                .unwrap_or(0);
            if imin == 0 && lo > lo0 * 1e-3 {
                lo /= 10.0;
            } else if imin == scan.len() - 1 && hi < hi0 * 1e3 {
                hi *= 10.0;
            } else if imin == 0 || imin == scan.len() - 1 {
                return Err(ShellError::Optimization("no interior minimum of mu(gamma) in the bracket".into()));
            } else {
                break imin;
            }
        };
        let a = libm::log(scan[imin - 1].0);
        let b = libm::log(scan[imin + 1].0);
        let mut failure = None;
        let (lg, _) = golden_section(
            |t| match self.mu(libm::exp(t)) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    f64::INFINITY
                }
            },
            a,
            b,
            opts.rel_width,
            400,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let mut best = self.eval(libm::exp(lg))?;
        let p = self.lead_power as f64;
        for _ in 0..60 {
            let next = libm::pow(p * best.lead_energy / (4.0 * best.bend_energy), 1.0 / (p + 4.0));
            if !(next.is_finite() && next > 0.0) {
                break;
            }
            let cand = self.eval(next)?;
            let step = (next - best.gamma).abs() / best.gamma;
            if cand.mu > best.mu * (1.0 + 1e-9) {
                break;
            }
            best = cand;
            if step < 1e-13 {
                break;
            }
        }
        Ok(GammaOptimum {
            best,
            scan,
            bracket: (lo, hi),
        })
    }
}

fn require_class(profile: &ShellProfile, allowed: &[ShellTag]) -> Result<crate::geometry::ShellClass> {
    let class = classify(profile, 1024)?;
    match class.tag {
        ShellTag::Hyperbolic => return Err(ShellError::NotApplicable("hyperbolic")),
        ShellTag::Inadmissible => return Err(ShellError::NotApplicable("inadmissible")),
        _ => {}
    }
    if !allowed.contains(&class.tag) {
        return Err(ShellError::Unsupported(alloc::format!(
            "expected one of {:?}, found {}",
            allowed,
            class.tag
        )));
    }
    Ok(class)
}

/// Closed form for a cylinder of radius `R` and length `L`, using the
/// clamped-beam eigenvalue `mu = kappa^4 / L^4`.
pub fn cylinder_closed_form(profile: &ShellProfile) -> Result<AsymptoticsResult> {
    require_class(profile, &[ShellTag::Cylinder])?;
    let r = profile.value(0.5 * (profile.interval.0 + profile.interval.1));
    let (e, nu) = (profile.young, profile.nu);
    let mu = libm::pow(clamped_beam_root(), 4.0) / libm::pow(profile.length(), 4.0);
    let q = 3.0 * (1.0 - nu * nu);
    let gamma = libm::pow(r * r * r * libm::sqrt(q * mu), 0.25);
    let a1 = 2.0 * e / r * libm::sqrt(mu / q);
    Ok(AsymptoticsResult::new(ShellTag::Cylinder, 0.0, a1, gamma))
}

/// The fourth-order reduction `gamma^-4 H4 + gamma^4 B0` of a cone (or cylinder).
pub fn parabolic_problem(profile: &ShellProfile, elements: usize) -> Result<GammaProblem> {
    let mesh = Mesh1D::uniform(profile.interval, elements)?;
    let (e, nu) = (profile.young, profile.nu);
    let asm = assemble_h20(
        profile,
        |z| {
            let d = profile.derivatives(z);
            let s2 = 1.0 + d[1] * d[1];
            e * d[0] * d[0] / (s2 * s2 * s2)
        },
        |z| crate::geometry::b0_value(profile.value(z), e, nu),
        &mesh,
    )?;
    Ok(GammaProblem {
        lead: asm.lead,
        bend: asm.potential,
        mass: asm.mass,
        lead_power: 4,
    })
}

pub fn optimize_gamma_parabolic(
    profile: &ShellProfile,
    opts: &OneDimOptions,
    grid: &impl Executor,
) -> Result<(AsymptoticsResult, GammaOptimum)> {
    let class = require_class(profile, &[ShellTag::Cone, ShellTag::Cylinder])?;
    let problem = parabolic_problem(profile, opts.elements)?;
    let opt = problem.optimize(opts, grid)?;
    let mut res = AsymptoticsResult::new(class.tag, 0.0, opt.best.mu, opt.best.gamma);
    res.ratio_coeff = opt.best.ratio(4);
    Ok((res, opt))
}

pub fn gauss_constants(profile: &ShellProfile) -> Result<Vec<AsymptoticsResult>> {
    let class = require_class(profile, &[ShellTag::GaussElliptic])?;
    class.branches.iter().map(|m| gauss_constants_at(profile, m)).collect()
}

pub fn gauss_constants_at(profile: &ShellProfile, m: &H0Minimum) -> Result<AsymptoticsResult> {
    let fr = frame_at(profile, m.z0)?;
    if !(fr.g > 0.0) || !(m.d2h0 > 0.0) {
        return Err(ShellError::Assumption(alloc::format!(
            "degenerate Gauss data: g(z0) = {}, H0''(z0) = {}",
            fr.g,
            m.d2h0
        )));
    }
    let b = fr.b0;
    let c = libm::sqrt(fr.g * m.d2h0 / 2.0);
    let gamma = libm::pow(c / (4.0 * b), 0.2);
    let a1 = libm::pow(4.0 * b * c * c * c * c, 0.2) * 1.25;
    let mut res = AsymptoticsResult::new(ShellTag::GaussElliptic, m.h0, a1, gamma);
    res.z0 = Some(m.z0);
    res.b = Some(b);
    res.c = Some(c);
    res.ratio_coeff = b / m.h0 * libm::pow(c / (4.0 * b), 0.8);
    Ok(res)
}

pub fn airy_constants(profile: &ShellProfile) -> Result<Vec<AsymptoticsResult>> {
    let class = require_class(profile, &[ShellTag::AiryElliptic])?;
    class.branches.iter().map(|m| airy_constants_at(profile, m)).collect()
}

pub fn airy_constants_at(profile: &ShellProfile, m: &H0Minimum) -> Result<AsymptoticsResult> {
    if !m.boundary {
        return Err(ShellError::Assumption(alloc::format!(
            "Airy constants need a boundary minimizer, z0 = {} is interior",
            m.z0
        )));
    }
    let inward = if m.z0 == profile.interval.0 { m.dh0 } else { -m.dh0 };
    let fr = frame_at(profile, m.z0)?;
    if !(inward > 0.0) || !(fr.g > 0.0) {
        return Err(ShellError::Assumption(alloc::format!(
            "degenerate Airy data: inward slope {inward}, g(z0) = {}",
            fr.g
        )));
    }
    let b = fr.b0;
    let c = first_airy_zero() * libm::cbrt(fr.g) * libm::pow(inward, 2.0 / 3.0);
    let gamma = libm::pow(c / (6.0 * b), 3.0 / 14.0);
    let a1 = libm::pow(6.0 * b * libm::pow(c, 6.0), 1.0 / 7.0) * 7.0 / 6.0;
    let mut res = AsymptoticsResult::new(ShellTag::AiryElliptic, m.h0, a1, gamma);
    res.z0 = Some(m.z0);
    res.b = Some(b);
    res.c = Some(c);
    // at the optimum the bending part is a1 / 7
    res.ratio_coeff = a1 / (7.0 * m.h0);
    Ok(res)
}

/// The toroidal reduction `gamma^-2 H2 + gamma^4 B0` with `Lambda0` inserted in `H2`.
pub fn toroidal_problem(profile: &ShellProfile, lambda0: f64, elements: usize) -> Result<GammaProblem> {
    let mesh = Mesh1D::uniform(profile.interval, elements)?;
    let (e, nu) = (profile.young, profile.nu);
    let h2 = assemble_h10(
        profile,
        |z| -h2_operator(&profile.profile_values(z), e, nu, lambda0).coeffs[2],
        |z| h2_operator(&profile.profile_values(z), e, nu, lambda0).coeffs[0],
        &mesh,
    )?;
    let bend = assemble_h10(
        profile,
        |_| 0.0,
        |z| crate::geometry::b0_value(profile.value(z), e, nu),
        &mesh,
    )?;
    Ok(GammaProblem {
        lead: h2.stiffness(),
        bend: bend.potential,
        mass: h2.mass,
        lead_power: 2,
    })
}

pub fn toroidal_constants(
    profile: &ShellProfile,
    opts: &OneDimOptions,
    grid: &impl Executor,
) -> Result<(AsymptoticsResult, GammaOptimum)> {
    require_class(profile, &[ShellTag::TorusElliptic])?;
    if let ProfileShape::CircularArc { r_center, .. } = profile.shape {
        if r_center >= 0.0 {
            return Err(ShellError::Admissibility(alloc::format!(
                "toroidal barrel needs a negative arc center radius, got {r_center}"
            )));
        }
    }
    let lambda0 = profile.h0(0.5 * (profile.interval.0 + profile.interval.1));
    let problem = toroidal_problem(profile, lambda0, opts.elements)?;
    // with SPD mass, a failed factorization at zero shift means lambda1[H2] <= 0
    let lambda2 = match smallest_eigenpairs(&problem.lead, &problem.mass, 1) {
        Ok(e) => e[0].eigenvalue,
        Err(ShellError::Factorization { .. }) => {
            return Err(ShellError::Assumption("H2 is not positive definite".into()));
        }
        Err(e) => return Err(e),
    };
    if !(lambda2 > 0.0) {
        return Err(ShellError::Assumption(alloc::format!(
            "lowest eigenvalue of H2 is {lambda2}, not positive"
        )));
    }
    let scan_opts = OneDimOptions {
        bracket: opts.torus_bracket,
        ..*opts
    };
    let opt = problem.optimize(&scan_opts, grid)?;
    let mut res = AsymptoticsResult::new(ShellTag::TorusElliptic, lambda0, opt.best.mu, opt.best.gamma);
    res.lambda2 = Some(lambda2);
    res.ratio_coeff = libm::pow(opt.best.gamma, 4.0) * opt.best.bend_energy / lambda0;
    Ok((res, opt))
}

/// All asymptotic branches of a profile (several only when `H0` has tied minimizers).
#[derive(Clone, Debug, PartialEq)]
pub struct Analysis {
    pub class: crate::geometry::ShellClass,
    pub branches: Vec<AsymptoticsResult>,
}

impl Analysis {
    /// Branch with the smallest `m1(eps)`.
    pub fn best_at(&self, eps: f64) -> &AsymptoticsResult {
        self.branches
            .iter()
            .min_by(|a, b| a.m1(eps).total_cmp(&b.m1(eps)))
            .expect("at least one branch")
    }
}

pub fn analyze(profile: &ShellProfile, opts: &OneDimOptions, grid: &impl Executor) -> Result<Analysis> {
    let class = classify(profile, 1024)?;
    let branches = match class.tag {
        ShellTag::Cylinder => alloc::vec![cylinder_closed_form(profile)?],
        ShellTag::Cone => alloc::vec![optimize_gamma_parabolic(profile, opts, grid)?.0],
        ShellTag::TorusElliptic => alloc::vec![toroidal_constants(profile, opts, grid)?.0],
        ShellTag::GaussElliptic => gauss_constants(profile)?,
        ShellTag::AiryElliptic => airy_constants(profile)?,
        ShellTag::Hyperbolic => return Err(ShellError::NotApplicable("hyperbolic")),
        ShellTag::Inadmissible => return Err(ShellError::NotApplicable("inadmissible")),
    };
    Ok(Analysis { class, branches })
}

pub fn predict(result: &AsymptoticsResult, eps: f64) -> Result<Prediction> {
    if !(eps > 0.0 && eps <= 0.25) {
        return Err(ShellError::Unsupported(alloc::format!("half-thickness {eps} outside (0, 0.25]")));
    }
    let k_real = result.k_real(eps);
    Ok(Prediction {
        k_real,
        k_int: nearest_wavenumber(k_real),
        m1: result.m1(eps),
        ratio: result.ratio(eps),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorusSweepRow {
    pub r_circ: f64,
    pub outcome: core::result::Result<(f64, f64, f64), ShellError>,
}

/// One toroidal run per arc-center radius; failures are recorded per row.
pub fn toroidal_sweep(
    radius: f64,
    z_center: f64,
    interval: (f64, f64),
    r_grid: &[f64],
    opts: &OneDimOptions,
    grid: &impl Executor,
) -> Vec<TorusSweepRow> {
    grid.map(r_grid.len(), &|i| {
        let r_circ = r_grid[i];
        let outcome = if r_circ >= 0.0 {
            Err(ShellError::Admissibility(alloc::format!(
                "arc center radius {r_circ} is not negative"
            )))
        } else {
            ShellProfile::circular_arc(radius, z_center, r_circ, interval)
                .and_then(|p| toroidal_constants(&p, opts, &crate::exec::Sequential))
                .map(|(r, _)| (r.lambda2.unwrap_or(f64::NAN), r.gamma, r.a1))
        };
        TorusSweepRow { r_circ, outcome }
    })
}

/// The 1D elliptic reduction `H0 + k^-2 H2 + eps^2 k^4 B0` at real wavenumber `k`.
#[derive(Clone, Debug)]
pub struct EllipticReduction {
    pub h0: SymBandMatrix,
    pub h2: SymBandMatrix,
    pub b0: SymBandMatrix,
    pub mass: SymBandMatrix,
    pub asm_mesh: Mesh1D,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipticSolve {
    pub k: f64,
    pub lambda: f64,
    /// `eps^2 k^4 <B0 eta, eta> / lambda`.
    pub bending_ratio: f64,
}

impl EllipticReduction {
    pub fn new(profile: &ShellProfile, lambda0: f64, elements: usize) -> Result<Self> {
        let mesh = Mesh1D::uniform(profile.interval, elements)?;
        let (e, nu) = (profile.young, profile.nu);
        let h2 = assemble_h10(
            profile,
            |z| -h2_operator(&profile.profile_values(z), e, nu, lambda0).coeffs[2],
            |z| h2_operator(&profile.profile_values(z), e, nu, lambda0).coeffs[0],
            &mesh,
        )?;
        let pots = assemble_h10(profile, |_| 0.0, |z| profile.h0(z), &mesh)?;
        let bend = assemble_h10(
            profile,
            |_| 0.0,
            |z| crate::geometry::b0_value(profile.value(z), e, nu),
            &mesh,
        )?;
        Ok(Self {
            h0: pots.potential,
            h2: h2.stiffness(),
            b0: bend.potential,
            mass: h2.mass,
            asm_mesh: mesh,
        })
    }

    pub fn solve(&self, eps: f64, k: f64) -> Result<EllipticSolve> {
        let kk = self.h0.axpy(1.0 / (k * k), &self.h2);
        let bend_w = eps * eps * k * k * k * k;
        let kk = kk.axpy(bend_w, &self.b0);
        let e = smallest_eigenpairs(&kk, &self.mass, 1)?;
        let v = &e[0].coefficients;
        let norm = quadratic_form(&self.mass, v);
        let bend = bend_w * quadratic_form(&self.b0, v) / norm;
        Ok(EllipticSolve {
            k,
            lambda: e[0].eigenvalue,
            bending_ratio: bend / e[0].eigenvalue,
        })
    }

    /// Minimizes the lowest eigenvalue over real `k` in `[k_lo, k_hi]`.
    pub fn minimize_over_k(&self, eps: f64, k_lo: f64, k_hi: f64) -> Result<EllipticSolve> {
        let mut failure = None;
        let (lk, _) = golden_section(
            |t| match self.solve(eps, libm::exp(t)) {
                Ok(s) => s.lambda,
                Err(e) => {
                    failure = Some(e);
                    f64::INFINITY
                }
            },
            libm::log(k_lo),
            libm::log(k_hi),
            1e-8,
            400,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        self.solve(eps, libm::exp(lk))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::geometry::{preset, Model};
    use approx::assert_relative_eq;

    #[test]
    fn exponent_table() {
        let r = |n, d| Exponent::new(n, d);
        assert_eq!(exponents_from_eta1(r(4, 1)), (r(1, 4), r(1, 1)));
        assert_eq!(exponents_from_eta1(r(2, 1)), (r(1, 3), r(2, 3)));
        assert_eq!(exponents_from_eta1(r(1, 1)), (r(2, 5), r(2, 5)));
        assert_eq!(exponents_from_eta1(r(2, 3)), (r(3, 7), r(2, 7)));
    }

    #[test]
    fn rounding_ties_up() {
        assert_eq!(nearest_wavenumber(2.5), 3);
        assert_eq!(nearest_wavenumber(2.49), 2);
        assert_eq!(nearest_wavenumber(21.2), 21);
    }

    #[test]
    fn cylinder_constants() {
        let r = cylinder_closed_form(&preset(Model::A)).unwrap();
        assert_relative_eq!(r.gamma, 2.9323, max_relative = 2e-5);
        assert_relative_eq!(r.a1, 3.3852, max_relative = 2e-5);
        assert_eq!(r.a0, 0.0);
        assert_eq!(r.ratio(1e-3), 0.5);
        let p = predict(&r, 1e-4).unwrap();
        assert_relative_eq!(p.k_real, 29.3, epsilon = 0.05);
        assert_relative_eq!(p.m1, 3.3852e-4, max_relative = 1e-4);
    }

    #[test]
    fn cylinder_requires_cylinder() {
        assert!(cylinder_closed_form(&preset(Model::B)).is_err());
    }

    #[test]
    fn gauss_constants_for_model_h() {
        let r = &gauss_constants(&preset(Model::H)).unwrap()[0];
        assert_relative_eq!(r.a0, 0.0625, epsilon = 1e-14);
        assert_relative_eq!(r.b.unwrap(), 1.0 / (3.0 * 0.91), epsilon = 1e-14);
        assert_relative_eq!(r.gamma, 0.75901, max_relative = 1e-5);
        assert_relative_eq!(r.a1, 0.60785, max_relative = 1e-5);
        assert_relative_eq!(predict(r, 0.2).unwrap().k_real, 1.4, epsilon = 0.05);
        assert_relative_eq!(predict(r, 0.00005).unwrap().k_real, 39.9, epsilon = 0.05);
    }

    #[test]
    fn airy_constants_for_model_l() {
        let r = &airy_constants(&preset(Model::L)).unwrap()[0];
        assert_relative_eq!(r.a0, 0.17804, epsilon = 1e-5);
        assert_relative_eq!(r.gamma, 0.85141, max_relative = 1e-5);
        assert_relative_eq!(r.a1, 1.55472, max_relative = 1e-5);
        assert_eq!(r.z0, Some(0.5));
        assert_relative_eq!(predict(r, 0.001).unwrap().k_real, 16.4, epsilon = 0.05);
    }

    #[test]
    fn hyperbolic_is_refused() {
        let p = ShellProfile::polynomial(alloc::vec![1.0, 0.0, 0.3], (-1.0, 1.0)).unwrap();
        let err = analyze(&p, &OneDimOptions::default(), &Sequential).unwrap_err();
        assert_eq!(err, ShellError::NotApplicable("hyperbolic"));
    }

    #[test]
    fn predict_rejects_thick_shells() {
        let r = cylinder_closed_form(&preset(Model::A)).unwrap();
        assert!(predict(&r, 0.3).is_err());
        assert!(predict(&r, 0.0).is_err());
    }

    #[test]
    fn positive_arc_center_rejected_in_sweep() {
        let rows = toroidal_sweep(2.0, 0.0, (-1.0, 1.0), &[0.5], &OneDimOptions::default(), &Sequential);
        assert!(rows[0].outcome.is_err());
    }
}
