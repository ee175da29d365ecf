//! Gauss-Legendre rules, Gauss-Lobatto-Legendre nodes and Lagrange bases on `[-1, 1]`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// `P_n(x)` and `P_n'(x)`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        0.5 * (n * (n + 1)) as f64 * if x > 0.0 { 1.0 } else { if n % 2 == 0 { -1.0 } else { 1.0 } }
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// `n`-point Gauss-Legendre rule, exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        for _ in 0..100 {
            let (p, dp) = legendre(n, t);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, t);
        x[n - 1 - i] = t;
        w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

/// The `p + 1` Gauss-Lobatto-Legendre nodes: endpoints and the roots of `P_p'`.
pub fn gll_nodes(p: usize) -> Vec<f64> {
    assert!(p >= 1);
    let mut x = vec![0.0; p + 1];
    x[0] = -1.0;
    x[p] = 1.0;
    for i in 1..p {
        let mut t = -libm::cos(PI * i as f64 / p as f64);
        for _ in 0..100 {
            // roots of (1 - t^2) P_p'(t): Newton on q = P_{p-1} - P_{p+1}
            let (pm, dpm) = legendre(p - 1, t);
            let (pp, dpp) = legendre(p + 1, t);
            let dt = (pm - pp) / (dpm - dpp);
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = t;
    }
    x
}

/// Lagrange interpolation basis on given nodes: values and first derivatives at `x`.
#[derive(Clone, Debug)]
pub struct LagrangeBasis {
    pub nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl LagrangeBasis {
    pub fn new(nodes: Vec<f64>) -> Self {
        let n = nodes.len();
        let weights = (0..n)
            .map(|j| {
                let prod: f64 = (0..n).filter(|&m| m != j).map(|m| nodes[j] - nodes[m]).product();
                1.0 / prod
            })
            .collect();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Fills `val[j] = l_j(x)` and `der[j] = l_j'(x)`.
    pub fn eval(&self, x: f64, val: &mut [f64], der: &mut [f64]) {
        let n = self.nodes.len();
        for j in 0..n {
            let mut v = self.weights[j];
            let mut d = 0.0;
            for m in 0..n {
                if m == j {
                    continue;
                }
                // product rule over the factors (x - x_m)
                d = d * (x - self.nodes[m]) + v;
                v *= x - self.nodes[m];
            }
            val[j] = v;
            der[j] = d;
        }
    }
}
