//! Truncated Taylor series ("jets") with exact arithmetic on coefficients.
//!
//! A `Jet<N>` stores `c[j] = u^(j)(z0) / j!` for `j < N`. Products, quotients
//! and square roots are computed by the usual Cauchy recurrences, so every
//! derivative of a composite expression is exact up to rounding.

use core::ops::{Add, Div, Mul, Neg, Sub};

/// Field-like scalar used by formulas that are evaluated either on plain
/// numbers or on jets.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(x: f64) -> Self;
    fn sqrt(self) -> Self;
    fn value(&self) -> f64;

    fn powi(self, n: u32) -> Self {
        let mut acc = Self::cst(1.0);
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    fn scale(self, a: f64) -> Self {
        self * Self::cst(a)
    }
}

impl Scalar for f64 {
    fn cst(x: f64) -> Self {
        x
    }
    fn sqrt(self) -> Self {
        libm::sqrt(self)
    }
    fn value(&self) -> f64 {
        *self
    }
    fn powi(self, n: u32) -> Self {
        let mut acc = 1.0;
        for _ in 0..n {
            acc *= self;
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<const N: usize> {
    pub c: [f64; N],
}

impl<const N: usize> Jet<N> {
    pub fn constant(x: f64) -> Self {
        let mut c = [0.0; N];
        if N > 0 {
            c[0] = x;
        }
        Self { c }
    }

    /// The identity function expanded at `z0`.
    pub fn variable(z0: f64) -> Self {
        let mut c = [0.0; N];
        if N > 0 {
            c[0] = z0;
        }
        if N > 1 {
            c[1] = 1.0;
        }
        Self { c }
    }

    pub fn from_coeffs(c: [f64; N]) -> Self {
        Self { c }
    }

    /// `j`-th derivative at the expansion point.
    pub fn derivative(&self, j: usize) -> f64 {
        if j >= N {
            return 0.0;
        }
        self.c[j] * factorial(j)
    }

    /// Jet of the derivative. The top coefficient is unknown and set to zero,
    /// so the result is exact only up to order `N - 2`.
    pub fn deriv(&self) -> Self {
        let mut c = [0.0; N];
        for j in 0..N.saturating_sub(1) {
            c[j] = (j + 1) as f64 * self.c[j + 1];
        }
        Self { c }
    }

    pub fn recip(&self) -> Self {
        let mut b = [0.0; N];
        let a0 = self.c[0];
        b[0] = 1.0 / a0;
        for n in 1..N {
            let mut acc = 0.0;
            for j in 1..=n {
                acc += self.c[j] * b[n - j];
            }
            b[n] = -acc / a0;
        }
        Self { c: b }
    }

    pub fn sqrt_jet(&self) -> Self {
        let mut b = [0.0; N];
        let b0 = libm::sqrt(self.c[0]);
        b[0] = b0;
        for n in 1..N {
            let mut acc = 0.0;
            for j in 1..n {
                acc += b[j] * b[n - j];
            }
            b[n] = (self.c[n] - acc) / (2.0 * b0);
        }
        Self { c: b }
    }
}

pub(crate) fn factorial(j: usize) -> f64 {
    (1..=j).fold(1.0, |acc, i| acc * i as f64)
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c.iter()) {
            *a += b;
        }
        Self { c }
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c.iter()) {
            *a -= b;
        }
        Self { c }
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut c = self.c;
        for a in c.iter_mut() {
            *a = -*a;
        }
        Self { c }
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [0.0; N];
        for n in 0..N {
            let mut acc = 0.0;
            for j in 0..=n {
                acc += self.c[j] * o.c[n - j];
            }
            c[n] = acc;
        }
        Self { c }
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<const N: usize> Scalar for Jet<N> {
    fn cst(x: f64) -> Self {
        Self::constant(x)
    }
    fn sqrt(self) -> Self {
        self.sqrt_jet()
    }
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn scale(self, a: f64) -> Self {
        let mut c = self.c;
        for v in c.iter_mut() {
            *v *= a;
        }
        Self { c }
    }
}
