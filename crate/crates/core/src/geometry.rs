//! Axisymmetric midsurface geometry.
//!
//! The midsurface is the surface of revolution of the meridian `r = f(z)`,
//! `z` in an interval `(z_minus, z_plus)`. Everything downstream (curvatures,
//! the potential `H0`, the bending coefficient `B0`, the scalar reductions)
//! is evaluated from the exact derivative jet of `f`.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Result, ShellError};
use crate::jet::{Jet, Scalar};
use crate::optimize::golden_section;

/// Highest polynomial degree accepted for user profiles.
pub const MAX_POLY_DEGREE: usize = 8;

const JET_LEN: usize = 16;
const CONSTANCY_SAMPLES: usize = 1024;
const CONSTANCY_TOL: f64 = 1e-10;
const MULTI_MIN_TOL: f64 = 1e-8;
const FPP_ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ProfileShape {
    /// `f(z) = coeffs[0] + coeffs[1] z + ... + coeffs[d] z^d`.
    Polynomial { coeffs: Vec<f64> },
    /// Upper arc `f(z) = r_center + sqrt(radius^2 - (z - z_center)^2)`.
    CircularArc {
        radius: f64,
        z_center: f64,
        r_center: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShellProfile {
    pub shape: ProfileShape,
    pub interval: (f64, f64),
    pub young: f64,
    pub nu: f64,
    pub r_min_guard: f64,
}

impl ShellProfile {
    pub fn new(shape: ProfileShape, interval: (f64, f64), young: f64, nu: f64) -> Result<Self> {
        let p = Self {
            shape,
            interval,
            young,
            nu,
            r_min_guard: 1e-3,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn polynomial(coeffs: Vec<f64>, interval: (f64, f64)) -> Result<Self> {
        Self::new(ProfileShape::Polynomial { coeffs }, interval, 1.0, 0.3)
    }

    /// `f(z) = slope z + intercept`.
    pub fn affine(slope: f64, intercept: f64, interval: (f64, f64)) -> Result<Self> {
        Self::polynomial(alloc::vec![intercept, slope], interval)
    }

    pub fn circular_arc(radius: f64, z_center: f64, r_center: f64, interval: (f64, f64)) -> Result<Self> {
        Self::new(
            ProfileShape::CircularArc {
                radius,
                z_center,
                r_center,
            },
            interval,
            1.0,
            0.3,
        )
    }

    pub fn with_material(mut self, young: f64, nu: f64) -> Result<Self> {
        self.young = young;
        self.nu = nu;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(ShellError::Profile("interval must satisfy z_minus < z_plus".to_string()));
        }
        if !(self.young > 0.0) {
            return Err(ShellError::Profile("Young modulus must be positive".to_string()));
        }
        if !(self.nu > -1.0 && self.nu < 0.5) {
            return Err(ShellError::Profile("Poisson ratio must lie in (-1, 1/2)".to_string()));
        }
        if !(self.r_min_guard > 0.0) {
            return Err(ShellError::Profile("R_min guard must be positive".to_string()));
        }
        match &self.shape {
            ProfileShape::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.len() > MAX_POLY_DEGREE + 1 {
                    return Err(ShellError::Profile(alloc::format!(
                        "polynomial needs between 1 and {} coefficients",
                        MAX_POLY_DEGREE + 1
                    )));
                }
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(ShellError::Profile("non-finite polynomial coefficient".to_string()));
                }
            }
            ProfileShape::CircularArc {
                radius, z_center, ..
            } => {
                if !(*radius > 0.0) {
                    return Err(ShellError::Profile("arc radius must be positive".to_string()));
                }
                if (a - z_center).abs() >= *radius || (b - z_center).abs() >= *radius {
                    return Err(ShellError::Profile("interval leaves the circular arc".to_string()));
                }
            }
        }
        for i in 0..=CONSTANCY_SAMPLES {
            let z = a + (b - a) * i as f64 / CONSTANCY_SAMPLES as f64;
            let f = self.value(z);
            if !(f >= self.r_min_guard) {
                return Err(ShellError::Geometry(alloc::format!(
                    "f({z}) = {f} is below the R_min guard {}",
                    self.r_min_guard
                )));
            }
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.interval.1 - self.interval.0
    }

    pub fn contains(&self, z: f64) -> bool {
        let tol = 1e-12 * (1.0 + self.length());
        z >= self.interval.0 - tol && z <= self.interval.1 + tol
    }

    /// Taylor jet of `f` at `z` with `N` coefficients.
    pub fn jet<const N: usize>(&self, z: f64) -> Jet<N> {
        let x = Jet::<N>::variable(z);
        match &self.shape {
            ProfileShape::Polynomial { coeffs } => {
                let mut acc = Jet::constant(0.0);
                for c in coeffs.iter().rev() {
                    acc = acc * x + Jet::constant(*c);
                }
                acc
            }
            ProfileShape::CircularArc {
                radius,
                z_center,
                r_center,
            } => {
                let t = x - Jet::constant(*z_center);
                let under = Jet::constant(radius * radius) - t * t;
                Jet::constant(*r_center) + under.sqrt_jet()
            }
        }
    }

    pub fn value(&self, z: f64) -> f64 {
        self.jet::<1>(z).c[0]
    }

    /// `(f, f', f'', f''', f'''')` at `z`.
    pub fn derivatives(&self, z: f64) -> [f64; 5] {
        let j = self.jet::<5>(z);
        [
            j.derivative(0),
            j.derivative(1),
            j.derivative(2),
            j.derivative(3),
            j.derivative(4),
        ]
    }

    /// Jets (with `N` valid coefficients) of `f, f', f'', f''', f''''`.
    pub fn derivative_jets<const N: usize>(&self, z: f64) -> ProfileJets<Jet<N>> {
        assert!(N + 4 <= JET_LEN, "jet order too high");
        let mut full = self.jet::<JET_LEN>(z);
        let mut out = [Jet::<N>::constant(0.0); 5];
        for slot in out.iter_mut() {
            let mut c = [0.0; N];
            c.copy_from_slice(&full.c[..N]);
            *slot = Jet::from_coeffs(c);
            full = full.deriv();
        }
        ProfileJets {
            f: out[0],
            fp: out[1],
            fpp: out[2],
            f3: out[3],
            f4: out[4],
        }
    }

    pub fn profile_values(&self, z: f64) -> ProfileJets<f64> {
        let d = self.derivatives(z);
        ProfileJets {
            f: d[0],
            fp: d[1],
            fpp: d[2],
            f3: d[3],
            f4: d[4],
        }
    }

    /// `H0(z) = E f''^2 / s^6` together with its first two derivatives.
    pub fn h0_with_derivatives(&self, z: f64) -> (f64, f64, f64) {
        let j = self.derivative_jets::<3>(z);
        let h = h0_expr(&j, self.young);
        (h.derivative(0), h.derivative(1), h.derivative(2))
    }

    pub fn h0(&self, z: f64) -> f64 {
        h0_expr(&self.profile_values(z), self.young)
    }

    pub fn b0(&self, z: f64) -> f64 {
        let f = self.value(z);
        b0_value(f, self.young, self.nu)
    }

    fn sample_grid(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let (a, b) = self.interval;
        (0..=n).map(move |i| a + (b - a) * i as f64 / n as f64)
    }
}

/// Values (or jets) of the profile and its first four derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileJets<T> {
    pub f: T,
    pub fp: T,
    pub fpp: T,
    pub f3: T,
    pub f4: T,
}

impl<T: Scalar> ProfileJets<T> {
    pub fn s(&self) -> T {
        (T::cst(1.0) + self.fp * self.fp).sqrt()
    }
}

pub(crate) fn h0_expr<T: Scalar>(j: &ProfileJets<T>, young: f64) -> T {
    let s2 = T::cst(1.0) + j.fp * j.fp;
    (j.fpp * j.fpp / (s2 * s2 * s2)).scale(young)
}

pub(crate) fn b0_value(f: f64, young: f64, nu: f64) -> f64 {
    young / (3.0 * (1.0 - nu * nu) * f.powi(4))
}

/// Pointwise geometric and reduction quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeometryFrame {
    pub z: f64,
    pub f: f64,
    pub fp: f64,
    pub fpp: f64,
    pub f3: f64,
    pub f4: f64,
    pub young: f64,
    pub nu: f64,
    pub s: f64,
    pub b_zz: f64,
    pub b_pp: f64,
    pub gauss_curvature: f64,
    pub h0: f64,
    pub g: f64,
    pub b0: f64,
    pub admissible: bool,
}

impl GeometryFrame {
    pub fn jets(&self) -> ProfileJets<f64> {
        ProfileJets {
            f: self.f,
            fp: self.fp,
            fpp: self.fpp,
            f3: self.f3,
            f4: self.f4,
        }
    }

    /// `1 + f'^2 + f f''`, nonnegative on admissible elliptic shells.
    pub fn admissibility_margin(&self) -> f64 {
        1.0 + self.fp * self.fp + self.f * self.fpp
    }
}

pub fn frame_at(profile: &ShellProfile, z: f64) -> Result<GeometryFrame> {
    if !profile.contains(z) {
        return Err(ShellError::Domain {
            z,
            lo: profile.interval.0,
            hi: profile.interval.1,
        });
    }
    let [f, fp, fpp, f3, f4] = profile.derivatives(z);
    if !(f > 0.0) {
        return Err(ShellError::Geometry(alloc::format!("f({z}) = {f} is not positive")));
    }
    Ok(frame_from_values(z, [f, fp, fpp, f3, f4], profile.young, profile.nu))
}

pub fn frame_from_values(z: f64, d: [f64; 5], young: f64, nu: f64) -> GeometryFrame {
    let [f, fp, fpp, f3, f4] = d;
    let s2 = 1.0 + fp * fp;
    let s = libm::sqrt(s2);
    let s3 = s2 * s;
    let b_zz = fpp / s3;
    let b_pp = -1.0 / (f * s);
    let h0 = young * fpp * fpp / (s2 * s2 * s2);
    let g = -2.0 * young * (f * fpp / (s2 * s2 * s2) + f * f * fpp * fpp / (s2 * s2 * s2 * s2));
    GeometryFrame {
        z,
        f,
        fp,
        fpp,
        f3,
        f4,
        young,
        nu,
        s,
        b_zz,
        b_pp,
        gauss_curvature: -fpp / (f * s2 * s2),
        h0,
        g,
        b0: b0_value(f, young, nu),
        admissible: 1.0 + fp * fp + f * fpp >= 0.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ShellTag {
    Cylinder,
    Cone,
    TorusElliptic,
    GaussElliptic,
    AiryElliptic,
    Hyperbolic,
    Inadmissible,
}

impl ShellTag {
    pub fn name(&self) -> &'static str {
        match self {
            ShellTag::Cylinder => "Cylinder",
            ShellTag::Cone => "Cone",
            ShellTag::TorusElliptic => "TorusElliptic",
            ShellTag::GaussElliptic => "GaussElliptic",
            ShellTag::AiryElliptic => "AiryElliptic",
            ShellTag::Hyperbolic => "Hyperbolic",
            ShellTag::Inadmissible => "Inadmissible",
        }
    }

    pub fn is_parabolic(&self) -> bool {
        matches!(self, ShellTag::Cylinder | ShellTag::Cone)
    }
}

impl fmt::Display for ShellTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A local minimizer of `H0` with its derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct H0Minimum {
    pub z0: f64,
    pub h0: f64,
    pub dh0: f64,
    pub d2h0: f64,
    pub boundary: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShellClass {
    pub tag: ShellTag,
    pub z0: Option<f64>,
    pub boundary_minimum: bool,
    /// Every minimizer of `H0` within tolerance of the global minimum.
    pub branches: Vec<H0Minimum>,
    pub note: Option<alloc::string::String>,
}

impl ShellClass {
    fn simple(tag: ShellTag) -> Self {
        Self {
            tag,
            z0: None,
            boundary_minimum: false,
            branches: Vec::new(),
            note: None,
        }
    }
}

pub fn classify(profile: &ShellProfile, n_samples: usize) -> Result<ShellClass> {
    if n_samples < 64 {
        return Err(ShellError::Unsupported("classification needs at least 64 samples".to_string()));
    }
    let zs: Vec<f64> = profile.sample_grid(n_samples).collect();
    let fpp: Vec<f64> = zs.iter().map(|&z| profile.derivatives(z)[2]).collect();
    let scale = zs
        .iter()
        .map(|&z| {
            let d = profile.derivatives(z);
            d[0].abs().max(1.0)
        })
        .fold(0.0f64, f64::max);
    let tol = FPP_ZERO_TOL * scale;

    let mut positive = fpp.iter().any(|&v| v > tol);
    // a sign change of f'' between samples is refined by bisection
    if !positive {
        for w in 0..zs.len() - 1 {
            let (za, zb) = (zs[w], zs[w + 1]);
            let mid = 0.5 * (za + zb);
            let (lo, hi) = (fpp[w], fpp[w + 1]);
            if lo.abs() > tol && hi.abs() > tol && lo.signum() != hi.signum() {
                positive = true;
                break;
            }
            if profile.derivatives(mid)[2] > tol {
                positive = true;
                break;
            }
        }
    }
    if positive {
        let mut c = ShellClass::simple(ShellTag::Hyperbolic);
        c.note = Some("f'' > 0 somewhere: reduction not applicable".to_string());
        return Ok(c);
    }
    let all_zero = fpp.iter().all(|&v| v.abs() <= tol);
    if all_zero {
        let fp_zero = zs.iter().all(|&z| profile.derivatives(z)[1].abs() <= tol);
        return Ok(ShellClass::simple(if fp_zero { ShellTag::Cylinder } else { ShellTag::Cone }));
    }

    if h0_is_constant(profile) {
        let admissible = profile
            .sample_grid(CONSTANCY_SAMPLES)
            .all(|z| frame_at(profile, z).map(|fr| fr.admissibility_margin() >= 0.0).unwrap_or(false));
        let mut c = ShellClass::simple(if admissible {
            ShellTag::TorusElliptic
        } else {
            ShellTag::Inadmissible
        });
        if !admissible {
            c.note = Some("1 + f'^2 + f f'' < 0 on the toroidal arc".to_string());
        }
        return Ok(c);
    }

    let branches = locate_h0_minima(profile);
    let first = branches[0];
    let mut class = ShellClass {
        tag: ShellTag::GaussElliptic,
        z0: Some(first.z0),
        boundary_minimum: first.boundary,
        branches: branches.clone(),
        note: None,
    };
    for br in &branches {
        let fr = frame_at(profile, br.z0)?;
        let margin = fr.admissibility_margin();
        let degenerate = if br.boundary {
            br.dh0.abs() <= 1e-12 * (1.0 + br.h0.abs())
        } else {
            br.d2h0 <= 1e-12 * (1.0 + br.h0.abs())
        };
        if !(margin > 0.0) || degenerate {
            class.tag = ShellTag::Inadmissible;
            class.note = Some(alloc::format!(
                "degenerate or inadmissible minimizer at z0 = {} (1+f'^2+ff'' = {margin:e})",
                br.z0
            ));
            return Ok(class);
        }
    }
    class.tag = if first.boundary {
        ShellTag::AiryElliptic
    } else {
        ShellTag::GaussElliptic
    };
    Ok(class)
}

fn h0_is_constant(profile: &ShellProfile) -> bool {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for z in profile.sample_grid(CONSTANCY_SAMPLES) {
        let h = profile.h0(z);
        lo = lo.min(h);
        hi = hi.max(h);
    }
    hi - lo < CONSTANCY_TOL * hi.abs().max(f64::MIN_POSITIVE)
}

/// All minimizers of `H0` whose value is within `1e-8` of the global minimum,
/// sorted by position.
pub fn locate_h0_minima(profile: &ShellProfile) -> Vec<H0Minimum> {
    let n = CONSTANCY_SAMPLES;
    let (a, b) = profile.interval;
    let h = (b - a) / n as f64;
    let zs: Vec<f64> = profile.sample_grid(n).collect();
    let vals: Vec<f64> = zs.iter().map(|&z| profile.h0(z)).collect();
    let mut cands: Vec<H0Minimum> = Vec::new();

    for i in 0..=n {
        let left = if i == 0 { f64::INFINITY } else { vals[i - 1] };
        let right = if i == n { f64::INFINITY } else { vals[i + 1] };
        if vals[i] > left || vals[i] > right {
            continue;
        }
        let lo = (zs[i] - h).max(a);
        let hi = (zs[i] + h).min(b);
        let z = refine_minimum(profile, lo, hi);
        let (h0, dh0, d2h0) = profile.h0_with_derivatives(z);
        let edge = 1e-9 * (b - a);
        let boundary = (z - a).abs() <= edge || (z - b).abs() <= edge;
        let z = if boundary {
            if (z - a).abs() <= edge {
                a
            } else {
                b
            }
        } else {
            z
        };
        let (h0, dh0, d2h0) = if boundary {
            profile.h0_with_derivatives(z)
        } else {
            (h0, dh0, d2h0)
        };
        if cands.iter().any(|c| (c.z0 - z).abs() < 1e-6) {
            continue;
        }
        cands.push(H0Minimum {
            z0: z,
            h0,
            dh0,
            d2h0,
            boundary,
        });
    }
    let best = cands.iter().map(|c| c.h0).fold(f64::INFINITY, f64::min);
    let tol = MULTI_MIN_TOL * best.abs().max(1.0);
    cands.retain(|c| c.h0 <= best + tol);
    cands.sort_by(|x, y| x.z0.total_cmp(&y.z0));
    cands
}

/// Golden-section search on `[lo, hi]` polished by Newton steps on `H0'`.
fn refine_minimum(profile: &ShellProfile, lo: f64, hi: f64) -> f64 {
    let (z, _) = golden_section(|z| profile.h0(z), lo, hi, 1e-9 * (1.0 + hi.abs()), 200);
    let mut z = z;
    for _ in 0..20 {
        let (_, d1, d2) = profile.h0_with_derivatives(z);
        if !(d2 > 0.0) {
            break;
        }
        let step = d1 / d2;
        let next = (z - step).clamp(lo, hi);
        let done = (next - z).abs() <= 1e-14 * (1.0 + z.abs());
        z = next;
        if done {
            break;
        }
    }
    z
}

/// The single minimizer of `H0`; several equal minima yield an error that lists them.
pub fn locate_h0_minimum(profile: &ShellProfile) -> Result<H0Minimum> {
    let all = locate_h0_minima(profile);
    if all.len() > 1 {
        return Err(ShellError::MultipleMinima(all.iter().map(|m| m.z0).collect()));
    }
    Ok(all[0])
}

/// Range of `E (b^phi_phi)^2` over the interval.
pub fn essential_spectrum_range(profile: &ShellProfile) -> (f64, f64) {
    let e = profile.young;
    let density = |z: f64| {
        let d = profile.derivatives(z);
        let s2 = 1.0 + d[1] * d[1];
        e / (d[0] * d[0] * s2)
    };
    let n = CONSTANCY_SAMPLES;
    let (a, b) = profile.interval;
    let h = (b - a) / n as f64;
    let zs: Vec<f64> = profile.sample_grid(n).collect();
    let vals: Vec<f64> = zs.iter().map(|&z| density(z)).collect();
    let (imin, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let (imax, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let lo_bracket = ((zs[imin] - h).max(a), (zs[imin] + h).min(b));
    let hi_bracket = ((zs[imax] - h).max(a), (zs[imax] + h).min(b));
    let (_, lo) = golden_section(density, lo_bracket.0, lo_bracket.1, 1e-12, 200);
    let (_, hi) = golden_section(|z| -density(z), hi_bracket.0, hi_bracket.1, 1e-12, 200);
    (lo.min(vals[imin]), (-hi).max(vals[imax]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Model {
    A,
    B,
    D,
    H,
    L,
}

impl Model {
    pub const ALL: [Model; 5] = [Model::A, Model::B, Model::D, Model::H, Model::L];

    pub fn name(&self) -> &'static str {
        match self {
            Model::A => "A",
            Model::B => "B",
            Model::D => "D",
            Model::H => "H",
            Model::L => "L",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = ShellError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Model::A),
            "B" | "b" => Ok(Model::B),
            "D" | "d" => Ok(Model::D),
            "H" | "h" => Ok(Model::H),
            "L" | "l" => Ok(Model::L),
            other => Err(ShellError::UnknownModel(other.to_string())),
        }
    }
}

/// The five reference shells: cylinder, cone, toroidal, Gaussian and Airy barrels.
pub fn preset(model: Model) -> ShellProfile {
    let quartic = alloc::vec![1.0, 0.0, -0.125, 0.0, -0.0625];
    let built = match model {
        Model::A => ShellProfile::polynomial(alloc::vec![2.0], (-1.0, 1.0)),
        Model::B => ShellProfile::affine(-0.5, 1.5, (-1.0, 1.0)),
        Model::D => ShellProfile::circular_arc(2.0, 0.0, -1.0, (-1.0, 1.0)),
        Model::H => ShellProfile::polynomial(quartic, (-1.0, 1.0)),
        Model::L => ShellProfile::polynomial(quartic, (0.5, 1.5)),
    };
    built.expect("preset profiles are valid")
}
