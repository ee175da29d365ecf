//! Membrane symbol matrices and the closed-form scalar reduction.
//!
//! The membrane operator at azimuthal frequency `k` is
//! `M[k] = k^2 M0 + k M1 + M2`, acting on `(zeta_z, zeta_phi, zeta_3)`.
//! `M1`, `V1` and `V3` carry a factor `i`; here they are stored through the
//! real coefficient of `i`, so that `i * i = -1` is applied explicitly
//! whenever two such factors meet. Component indices are `0 = z`, `1 = phi`,
//! `2 = 3` (normal).

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{GeometryFrame, ProfileJets, ShellProfile};
use crate::jet::{Jet, Scalar};

/// `sum_j coeffs[j] d^j/dz^j` with coefficients frozen at a point (or given as jets).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiffOp<T> {
    pub coeffs: Vec<T>,
}

pub type DiffOpSymbol = DiffOp<f64>;

impl<T: Scalar> DiffOp<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self {
            coeffs: vec![T::cst(0.0)],
        }
    }

    pub fn multiplication(c: T) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn max_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, j: usize) -> T {
        self.coeffs.get(j).copied().unwrap_or(T::cst(0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self {
            coeffs: (0..n).map(|j| self.coeff(j) + other.coeff(j)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }

    /// Left multiplication by a function.
    pub fn mul_fn(&self, a: T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| a * c).collect(),
        }
    }

    /// Frozen values of the coefficients.
    pub fn values(&self) -> DiffOpSymbol {
        DiffOp {
            coeffs: self.coeffs.iter().map(|c| c.value()).collect(),
        }
    }

    /// `sum_j c_j u^(j)` given `u_derivs[j] = u^(j)(z)`.
    pub fn apply(&self, u_derivs: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c.value() * u_derivs.get(j).copied().unwrap_or(0.0))
            .sum()
    }

    /// True when every coefficient vanishes (up to `tol`).
    pub fn is_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.value().abs() <= tol)
    }
}

impl<const N: usize> DiffOp<Jet<N>> {
    /// Operator product `self o other`, with coefficient derivatives taken from the jets.
    pub fn compose(&self, other: &Self) -> Self {
        let order = self.max_order() + other.max_order();
        let mut out = vec![Jet::<N>::constant(0.0); order + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let mut bl = *b;
                for l in 0..=i {
                    let binom = binomial(i, l);
                    out[i - l + j] = out[i - l + j] + (*a * bl).scale(binom);
                    bl = bl.deriv();
                }
            }
        }
        Self { coeffs: out }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for t in 0..k {
        acc = acc * (n - t) as f64 / (t + 1) as f64;
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembraneSymbols<T> {
    pub m0: [[T; 3]; 3],
    pub m1: [[DiffOp<T>; 3]; 3],
    pub m2: [[DiffOp<T>; 3]; 3],
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReductionCoeffs {
    pub h0: f64,
    pub h2: DiffOpSymbol,
    pub h3: f64,
    pub h4_principal: f64,
    /// Full fourth-order operator, available only when `f'' = 0`.
    pub h4_parabolic: Option<DiffOpSymbol>,
    /// `(z, phi)` components.
    pub v1: [DiffOpSymbol; 2],
    pub v2: [DiffOpSymbol; 2],
    pub v3: [DiffOpSymbol; 2],
}

fn zero3<T: Scalar>() -> [[DiffOp<T>; 3]; 3] {
    core::array::from_fn(|_| core::array::from_fn(|_| DiffOp::zero()))
}

/// Entries of `M0`, `M1`, `M2` from the profile jets.
pub fn membrane_symbols<T: Scalar>(j: &ProfileJets<T>, young: f64, nu: f64) -> MembraneSymbols<T> {
    let c = |x: f64| T::cst(x);
    let cc = young / (1.0 - nu * nu);
    let (f, fp, fpp, f3) = (j.f, j.fp, j.fpp, j.f3);
    let s = j.s();
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s2 * s2;
    let s5 = s4 * s;
    let s6 = s4 * s2;
    let s7 = s6 * s;
    let s8 = s4 * s4;
    let f2 = f * f;
    let f3p = f2 * f;
    let f4p = f2 * f2;

    let mut m0 = [[c(0.0); 3]; 3];
    m0[0][0] = (c(1.0) / (f2 * s2)).scale(cc * (1.0 - nu) / 2.0);
    m0[1][1] = (c(1.0) / f4p).scale(cc);

    let mut m1 = zero3::<T>();
    let d1 = (c(1.0) / (f2 * s2)).scale(-cc * (1.0 + nu) / 2.0);
    m1[0][1] = DiffOp::new(vec![(fp / (f3p * s2)).scale(2.0 * cc), d1]);
    m1[1][0] = DiffOp::new(vec![
        (fp / (f3p * s2)).scale(cc * (nu - 3.0) / 2.0) + (fp * fpp / (f2 * s4)).scale(cc * (1.0 + nu) / 2.0),
        d1,
    ]);
    let phi3 = (-(c(1.0) / (f3p * s)) + (fpp / (f2 * s3)).scale(nu)).scale(cc);
    m1[1][2] = DiffOp::multiplication(phi3);
    m1[2][1] = DiffOp::multiplication(-phi3);

    let mut m2 = zero3::<T>();
    m2[0][0] = DiffOp::new(vec![
        ((fpp * fpp + fp * f3) / s6 - (fp * fp * fpp * fpp / s8).scale(4.0) - (fpp / (f * s4)).scale(nu)
            + (fp * fp * fpp / (f * s6)).scale(1.0 + nu)
            + fp * fp / (f2 * s4))
            .scale(cc),
        ((fp * fpp / s6).scale(3.0) - fp / (f * s4)).scale(cc),
        (c(1.0) / s4).scale(-cc),
    ]);
    m2[0][2] = DiffOp::new(vec![
        (fp / (f2 * s3) + f3 / s5 - (fp * fpp * fpp / s7).scale(3.0) + fp * fpp / (f * s5)).scale(cc),
        (fpp / s5 - (c(1.0) / (f * s3)).scale(nu)).scale(cc),
    ]);
    m2[1][1] = DiffOp::new(vec![
        (fpp / (f3p * s2) - fp * fp * fpp / (f3p * s4)).scale(cc * (1.0 - nu)),
        (fp * fpp / (f2 * s4) + fp / (f3p * s2)).scale(cc * (1.0 - nu) / 2.0),
        (c(1.0) / (f2 * s2)).scale(-cc * (1.0 - nu) / 2.0),
    ]);
    m2[2][0] = DiffOp::new(vec![
        (fp * fpp * fpp / s7 + fp / (f2 * s3) - (fp * fpp / (f * s5)).scale(2.0 * nu)).scale(cc),
        (-(fpp / s5) + (c(1.0) / (f * s3)).scale(nu)).scale(cc),
    ]);
    m2[2][2] = DiffOp::multiplication(
        (fpp * fpp / s6 + c(1.0) / (f2 * s2) - (fpp / (f * s4)).scale(2.0 * nu)).scale(cc),
    );
    MembraneSymbols { m0, m1, m2 }
}

/// `H2 = H2^(2) d^2 + H2^(1) d + H2^(0)` with `Lambda0` entering `H2^(0)`.
pub fn h2_operator<T: Scalar>(j: &ProfileJets<T>, young: f64, nu: f64, lambda0: f64) -> DiffOp<T> {
    let (f, fp, fpp, f3, f4) = (j.f, j.fp, j.fpp, j.f3, j.f4);
    let s = j.s();
    let s2 = s * s;
    let s3 = s2 * s;
    let s6 = s2 * s2 * s2;
    let s8 = s6 * s2;
    let s10 = s8 * s2;
    let s12 = s10 * s2;
    let f2 = f * f;
    let fp2 = fp * fp;
    let fpp2 = fpp * fpp;
    let h22 = (f * fpp / s6 + f2 * fpp2 / s8).scale(2.0 * young);
    let h21 = ((fp * fpp / s6).scale(2.0) + f * f3 / s6 - (f * fp * fpp2 / s8).scale(2.0)
        + (f2 * fpp * f3 / s8).scale(2.0)
        - (f2 * fp * fpp2 * fpp / s10).scale(7.0))
    .scale(2.0 * young);
    let elastic = -(fp2 * fpp2 / s8).scale(10.0) + (fp * f3 / s6).scale(4.0) + (fp2 * fpp / (f * s6)).scale(2.0)
        - (f * fp2 * fpp2 * fpp / s10).scale(nu - 2.0)
        - (f * fp * fpp * f3 / s8).scale(5.0)
        + f * f4 / s6
        + (f2 * fpp * f4 / s8).scale(2.0)
        + (f2 * fp2 * fpp2 * fpp2 / s12).scale(36.0)
        + (f * fpp2 * fpp / s8).scale(nu - 2.0)
        - (f2 * fpp2 * fpp2 / s10).scale(6.0)
        - (f2 * fp * fpp2 * f3 / s10).scale(20.0);
    let w = T::cst(1.0) / s - (fpp * f / s3).scale(nu);
    let h20 = elastic.scale(young) - (w * w).scale(lambda0);
    DiffOp::new(vec![h20, h21, h22])
}

/// Components `(z, phi)` of `V1`, `V2`, `V3` (phi components of `V1`, `V3` as real coefficients of `i`).
pub fn v_operators<T: Scalar>(j: &ProfileJets<T>, young: f64, nu: f64, lambda0: f64) -> [[DiffOp<T>; 2]; 3] {
    let (f, fp, fpp, f3, f4) = (j.f, j.fp, j.fpp, j.f3, j.f4);
    let s = j.s();
    let s2 = s * s;
    let s3 = s2 * s;
    let s5 = s3 * s2;
    let s7 = s5 * s2;
    let s9 = s7 * s2;
    let f2 = f * f;
    let fc = f2 * f;
    let f4p = f2 * f2;
    let fp2 = fp * fp;
    let fpp2 = fpp * fpp;

    let v1 = [DiffOp::zero(), DiffOp::multiplication(f / s - (fpp * f2 / s3).scale(nu))];
    let v2 = [
        DiffOp::new(vec![
            fp / s + (f2 * fp * fpp2 / s5).scale(3.0 * (nu + 2.0))
                - (f2 * f3 / s3).scale(nu + 2.0)
                - (f * fp * fpp / s3).scale(2.0 * nu + 1.0),
            -(f / s) - (f2 * fpp / s3).scale(nu + 2.0),
        ]),
        DiffOp::zero(),
    ];
    let v3_2 = -(fc / s3).scale(nu) - (f4p * fpp / s5).scale(1.0 + 2.0 * nu);
    let v3_1 = -(fc * fp * fpp / s5).scale(4.0 * nu + 6.0) - (f4p * f3 / s5).scale(4.0 * nu + 2.0)
        + (f4p * fp * fpp2 / s7).scale(7.0 * (2.0 * nu + 1.0))
        - f2 * fp / s3;
    let v3_0 = (fc * fp2 * fpp2 / s7).scale(nu * nu + 19.0 * nu + 19.0) - (fc * fp * f3 / s5).scale(6.0 * nu + 6.0)
        - (f2 * fp2 * fpp / s5).scale(5.0 * nu + 3.0)
        - (f4p * fp2 * fpp2 * fpp / s9).scale(36.0 * nu + 18.0)
        + (f4p * fp * fpp * f3 / s7).scale(20.0 * nu + 10.0)
        + (fpp * f2 / s3).scale(nu)
        + fp2 * f / s3
        + (f4p * fpp2 * fpp / s7).scale(6.0 * nu + 3.0)
        - (f4p * f4 / s5).scale(2.0 * nu + 1.0)
        - (fc * fpp2 / s5).scale(nu * nu + nu + 1.0)
        + (fc / s - (f4p * fpp / s3).scale(nu)).scale((1.0 - nu * nu) / young * lambda0);
    let v3 = [DiffOp::zero(), DiffOp::new(vec![v3_0, v3_1, v3_2])];
    [v1, v2, v3]
}

/// Evaluate the symbol matrices and the closed-form reduction at a frame.
pub fn symbols_at(frame: &GeometryFrame, lambda0: f64, lambda1: f64) -> (MembraneSymbols<f64>, ReductionCoeffs) {
    let j = frame.jets();
    let (young, nu) = (frame.young, frame.nu);
    let sym = membrane_symbols(&j, young, nu);
    let (f, fp, fpp) = (j.f, j.fp, j.fpp);
    let s2 = 1.0 + fp * fp;
    let s4 = s2 * s2;
    let s6 = s4 * s2;
    let s8 = s4 * s4;
    let s10 = s8 * s2;
    let h3 = (-1.0 / s2 + 2.0 * nu * f * fpp / s4 - nu * nu * f * f * fpp * fpp / s6) * lambda1;
    let h4_principal = young * (4.0 * f.powi(3) * fpp / s8 + 3.0 * f.powi(4) * fpp * fpp / s10 + f * f / s6);
    let h4_parabolic = if fpp == 0.0 {
        Some(DiffOp::new(vec![
            0.0,
            0.0,
            young * 6.0 * fp * fp / s6,
            young * 6.0 * fp * f / s6,
            young * f * f / s6,
        ]))
    } else {
        None
    };
    let [v1, v2, v3] = v_operators(&j, young, nu, lambda0);
    let coeffs = ReductionCoeffs {
        h0: crate::geometry::h0_expr(&j, young),
        h2: h2_operator(&j, young, nu, lambda0),
        h3,
        h4_principal,
        h4_parabolic,
        v1,
        v2,
        v3,
    };
    (sym, coeffs)
}

/// Absolute residual between the closed-form `H0` and
/// `M2^{33} - M1^{3phi} (M0^{phi phi})^{-1} M1^{phi 3}` at the frame.
pub fn verify_h0_recurrence(frame: &GeometryFrame) -> f64 {
    let (sym, coeffs) = symbols_at(frame, 0.0, 0.0);
    // the two M1 factors each carry an i, whose product is -1
    let rec = sym.m2[2][2].coeff(0) + sym.m1[2][1].coeff(0) * sym.m1[1][2].coeff(0) / sym.m0[1][1];
    (coeffs.h0 - rec).abs()
}

/// Relative residual of `M0^{zz} V2_z = M1^{z phi} (M0^{phi phi})^{-1} M1^{phi 3} - M2^{z3}`
/// applied to the polynomial `sum_i poly[i] z^i` at `z`.
pub fn verify_v2_equation(profile: &ShellProfile, z: f64, poly: &[f64]) -> f64 {
    const N: usize = 6;
    let j = profile.derivative_jets::<N>(z);
    let (young, nu) = (profile.young, profile.nu);
    let sym = membrane_symbols(&j, young, nu);
    let [_, v2, _] = v_operators(&j, young, nu, 0.0);
    let lhs = v2[0].mul_fn(sym.m0[0][0]);
    let inner = DiffOp::multiplication(sym.m1[1][2].coeffs[0] / sym.m0[1][1]);
    let rhs = sym.m1[0][1].compose(&inner).neg().sub(&sym.m2[0][2]);
    let u = poly_derivatives(poly, z, 4);
    let (a, b) = (lhs.apply(&u), rhs.apply(&u));
    let scale = a.abs().max(b.abs()).max(lhs.values().coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())));
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Derivatives `p^(j)(z)` for `j = 0..=order` of `sum_i poly[i] z^i`.
pub fn poly_derivatives(poly: &[f64], z: f64, order: usize) -> Vec<f64> {
    (0..=order)
        .map(|d| {
            poly.iter()
                .enumerate()
                .skip(d)
                .map(|(i, &c)| {
                    let fall: f64 = (0..d).map(|t| (i - t) as f64).product();
                    c * fall * libm::pow(z, (i - d) as f64)
                })
                .sum()
        })
        .collect()
}

/// Leading reconstruction `(0, 0, eta) + k^-1 V1 eta + k^-2 V2 eta + k^-3 V3 eta`
/// on a grid, components `(z, phi, 3)` in real form.
///
/// `eta[i] = (eta, eta', eta'')` at `frames[i].z`.
pub fn reconstruct_surface_mode(
    frames: &[GeometryFrame],
    k: f64,
    eta: &[[f64; 3]],
    lambda0: f64,
) -> crate::error::Result<Vec<[f64; 3]>> {
    if !(k >= 1.0) {
        return Err(crate::error::ShellError::Unsupported(
            "the reconstruction needs a wavenumber k >= 1".into(),
        ));
    }
    if frames.len() != eta.len() {
        return Err(crate::error::ShellError::Unsupported("grid and eta lengths differ".into()));
    }
    Ok(frames
        .iter()
        .zip(eta)
        .map(|(fr, e)| {
            let [v1, v2, v3] = v_operators(&fr.jets(), fr.young, fr.nu, lambda0);
            let mut out = [0.0, 0.0, e[0]];
            for (n, v) in [(1, &v1), (2, &v2), (3, &v3)] {
                let w = libm::pow(k, -(n as f64));
                out[0] += w * v[0].apply(e);
                out[1] += w * v[1].apply(e);
            }
            out
        })
        .collect())
}
