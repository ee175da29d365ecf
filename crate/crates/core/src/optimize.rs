//! One-dimensional minimization helpers.

use alloc::vec::Vec;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimizer of a unimodal `f` on `[lo, hi]`.
/// Stops when the bracket is narrower than `tol` or after `max_iter` steps.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let ends = [(lo, f(lo)), (hi, f(hi))];
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for (x, fx) in ends {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// `n` points spaced evenly in `log x` over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (libm::log(lo), libm::log(hi));
    (0..n)
        .map(|i| libm::exp(la + (lb - la) * i as f64 / (n - 1).max(1) as f64))
        .collect()
}
