//! The Airy function `Ai` and its first zero.

use core::f64::consts::PI;

const AI0: f64 = 0.355_028_053_887_817_2;
const DAI0: f64 = 0.258_819_403_792_806_8;
const SWITCH: f64 = 5.0;

/// `Ai(x)`: Maclaurin series for `|x| <= 5`, asymptotic expansions beyond.
pub fn airy_ai(x: f64) -> f64 {
    if x.abs() <= SWITCH {
        series(x)
    } else if x > 0.0 {
        let zeta = 2.0 / 3.0 * x * libm::sqrt(x);
        let (mut term, mut sum) = (1.0, 1.0);
        for k in 1..20 {
            term *= -u_ratio(k) / zeta;
            sum += term;
            if term.abs() < 1e-17 {
                break;
            }
        }
        libm::exp(-zeta) / (2.0 * libm::sqrt(PI) * libm::pow(x, 0.25)) * sum
    } else {
        let t = -x;
        let zeta = 2.0 / 3.0 * t * libm::sqrt(t);
        let (mut even, mut odd) = (0.0, 0.0);
        let mut u = 1.0;
        for k in 0..24 {
            if k > 0 {
                u *= u_ratio(k);
            }
            let term = u / libm::pow(zeta, k as f64);
            // signs (-1)^m on u_{2m} and u_{2m+1}
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                even += sign * term;
            } else {
                odd += sign * term;
            }
        }
        let phase = zeta + PI / 4.0;
        (libm::sin(phase) * even - libm::cos(phase) * odd) / (libm::sqrt(PI) * libm::pow(t, 0.25))
    }
}

/// `u_k / u_{k-1}` for the coefficients of the Airy asymptotic expansion.
fn u_ratio(k: usize) -> f64 {
    let k = k as f64;
    (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k)
}

fn series(x: f64) -> f64 {
    let x3 = x * x * x;
    let (mut f, mut g) = (1.0, x);
    let (mut tf, mut tg) = (1.0, x);
    for k in 0..200 {
        let k3 = 3.0 * k as f64;
        tf *= x3 / ((k3 + 2.0) * (k3 + 3.0));
        tg *= x3 / ((k3 + 3.0) * (k3 + 4.0));
        f += tf;
        g += tg;
        if tf.abs() < 1e-18 * f.abs().max(1.0) && tg.abs() < 1e-18 * g.abs().max(1.0) {
            break;
        }
    }
    AI0 * f - DAI0 * g
}

/// First zero of `x -> Ai(-x)`, about `2.33811`.
pub fn first_airy_zero() -> f64 {
    let (mut a, mut b) = (2.0, 3.0);
    let fa = airy_ai(-a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = airy_ai(-m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    0.5 * (a + b)
}
