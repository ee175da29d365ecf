use num_rational::Rational64;
use proptest::prelude::*;
use shellmodes_core::asymptotics::{
    analyze, exponents_from_eta1, AsymptoticsResult, gauss_constants, optimize_gamma_parabolic, parabolic_problem, predict,
    to_f64, toroidal_constants, toroidal_sweep, EllipticReduction, OneDimOptions,
};
use shellmodes_core::geometry::locate_h0_minimum;
use shellmodes_core::{frame_at, preset, Model, Sequential, ShellTag};
use std::sync::OnceLock;

#[test]
fn curvature_of_the_gauss_well() {
    let p = preset(Model::H);
    let h = 1e-4;
    let fd = (p.h0(h) - 2.0 * p.h0(0.0) + p.h0(-h)) / (h * h);
    assert!((fd - 93.0 / 128.0).abs() < 1e-6);
    let m = locate_h0_minimum(&p).unwrap();
    assert!(m.z0.abs() < 1e-8);
    assert!((m.d2h0 - 93.0 / 128.0).abs() < 1e-6);
    let fr = frame_at(&p, 0.0).unwrap();
    assert!((fr.g - 0.375).abs() < 1e-14);
    assert!((fr.b0 - 1.0 / (3.0 * 0.91)).abs() < 1e-14);
}

#[test]
fn exponents_per_class() {
    let expect = |tag: ShellTag| match tag {
        ShellTag::Cylinder | ShellTag::Cone => (4.0, 0.25, 1.0),
        ShellTag::TorusElliptic => (2.0, 1.0 / 3.0, 2.0 / 3.0),
        ShellTag::GaussElliptic => (1.0, 0.4, 0.4),
        ShellTag::AiryElliptic => (2.0 / 3.0, 3.0 / 7.0, 2.0 / 7.0),
        other => panic!("no power law for {other}"),
    };
    for model in Model::ALL {
        let a = analyze(&preset(model), &OneDimOptions::default(), &Sequential).unwrap();
        let r = &a.branches[0];
        let (eta1, beta, alpha1) = expect(r.class);
        assert_eq!((to_f64(r.eta1), to_f64(r.beta), to_f64(r.alpha1)), (eta1, beta, alpha1));
        assert!(r.a1 > 0.0 && r.gamma > 0.0);
    }
}

#[test]
fn prediction_examples() {
    let opts = OneDimOptions::default();
    let b = analyze(&preset(Model::B), &opts, &Sequential).unwrap();
    let pb = predict(&b.branches[0], 1e-4).unwrap();
    assert!((pb.k_real - 21.2).abs() < 0.05);
    assert_eq!(pb.k_int, 21);
    let h = analyze(&preset(Model::H), &opts, &Sequential).unwrap();
    assert!((predict(&h.branches[0], 0.2).unwrap().k_real - 1.4).abs() < 0.05);
    assert!((predict(&h.branches[0], 5e-5).unwrap().k_real - 39.9).abs() < 0.05);
    let d = analyze(&preset(Model::D), &opts, &Sequential).unwrap();
    assert!((predict(&d.branches[0], 0.01).unwrap().k_real - 4.0).abs() < 0.05);
}

/// `mu(gamma)` blows up at both ends of the scan.
fn assert_scan_walls(scan: &[(f64, f64)], mu_min: f64) {
    let (first, last) = (scan[0].1, scan[scan.len() - 1].1);
    assert!(first > 10.0 * mu_min, "left end {first} vs {mu_min}");
    assert!(last > 10.0 * mu_min, "right end {last} vs {mu_min}");
}

#[test]
fn gamma_scans_have_walls() {
    let opts = OneDimOptions::default();
    let (b, opt) = optimize_gamma_parabolic(&preset(Model::B), &opts, &Sequential).unwrap();
    assert_scan_walls(&opt.scan, b.a1);
    let (d, opt) = toroidal_constants(&preset(Model::D), &opts, &Sequential).unwrap();
    assert_scan_walls(&opt.scan, opt.best.mu);
    assert!(d.lambda2.unwrap() > 0.0);
}

#[test]
fn parabolic_optimum_equilibrates_energies() {
    let problem = parabolic_problem(&preset(Model::A), 128).unwrap();
    let opt = problem.optimize(&OneDimOptions::default(), &Sequential).unwrap();
    let g = opt.best.gamma;
    let lead = opt.best.lead_energy / g.powi(4);
    let bend = opt.best.bend_energy * g.powi(4);
    assert!((lead - bend).abs() / bend < 1e-6);
    assert!((opt.best.ratio(4) - 0.5).abs() < 1e-6);
}

#[test]
fn torus_sweep_is_continuous_and_reproduces_arc_preset() {
    let grid: Vec<f64> = (0..=26).map(|i| -1.65 + 0.05 * i as f64).collect();
    let rows = toroidal_sweep(2.0, 0.0, (-1.0, 1.0), &grid, &OneDimOptions::default(), &Sequential);
    let ok: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].outcome.is_ok()).collect();
    assert!(ok.len() >= 15, "only {} successful rows", ok.len());
    assert_eq!(ok.last().unwrap() - ok[0] + 1, ok.len(), "positive window has holes");
    assert!(rows[0].outcome.is_err() && rows[rows.len() - 1].outcome.is_err());

    let vals: Vec<(f64, [f64; 3])> = ok
        .iter()
        .map(|&i| {
            let (l, g, a) = rows[i].outcome.clone().unwrap();
            (rows[i].r_circ, [l, g, a])
        })
        .collect();
    assert!(vals.iter().all(|(_, v)| v[0] > 0.0));
    let scale: Vec<f64> = (0..3).map(|c| vals.iter().map(|(_, v)| v[c]).fold(0.0, f64::max)).collect();
    for w in vals.windows(2).filter(|w| w[0].1[0] >= 0.15 && w[1].1[0] >= 0.15) {
        for c in 1..3 {
            let jump = (w[1].1[c] - w[0].1[c]).abs() / scale[c];
            assert!(jump < 0.1, "column {c} jumps by {jump} between {} and {}", w[0].0, w[1].0);
        }
    }

    let d = analyze(&preset(Model::D), &OneDimOptions::default(), &Sequential).unwrap();
    let (_, v) = vals.iter().find(|(r, _)| (*r + 1.0).abs() < 1e-12).unwrap();
    assert!((v[1] - d.branches[0].gamma).abs() < 1e-9 && (v[2] - d.branches[0].a1).abs() < 1e-9);
}

/// `(gamma, a1)` from minimizing the 1D elliptic reduction over real `k` at `eps`.
fn numeric_constants(model: Model, eps: f64, elements: usize) -> (AsymptoticsResult, f64, f64) {
    let p = preset(model);
    let a = analyze(&p, &OneDimOptions::default(), &Sequential).unwrap();
    let r = a.branches[0].clone();
    let red = EllipticReduction::new(&p, r.a0, elements).unwrap();
    let k0 = r.k_real(eps);
    let s = red.minimize_over_k(eps, 0.5 * k0, 2.0 * k0).unwrap();
    let beta = to_f64(r.beta);
    let alpha1 = to_f64(r.alpha1);
    (r, s.k * eps.powf(beta), (s.lambda - a.branches[0].a0) / eps.powf(alpha1))
}

#[test]
fn gauss_constants_agree_with_direct_minimization() {
    let (r, gamma, a1) = numeric_constants(Model::H, 1e-4, 256);
    assert!((gamma - r.gamma).abs() / r.gamma < 0.01, "gamma {gamma} vs {}", r.gamma);
    assert!((a1 - r.a1).abs() / r.a1 < 0.01, "a1 {a1} vs {}", r.a1);
}

#[test]
fn airy_direct_minimization_approaches_closed_form() {
    let gaps: Vec<f64> = [1e-4, 1e-5, 1e-6]
        .iter()
        .map(|&eps| {
            let (r, _, a1) = numeric_constants(Model::L, eps, 1024);
            (a1 - r.a1).abs() / r.a1
        })
        .collect();
    for w in gaps.windows(2) {
        assert!(w[1] < 0.75 * w[0], "gaps {gaps:?}");
    }
}

#[test]
#[ignore = "known gap: the Airy correction decays like k^-2/3 and is about 10% at eps = 1e-4"]
fn airy_constants_agree_with_direct_minimization() {
    let (r, gamma, a1) = numeric_constants(Model::L, 1e-4, 256);
    assert!((gamma - r.gamma).abs() / r.gamma < 0.01, "gamma {gamma} vs {}", r.gamma);
    assert!((a1 - r.a1).abs() / r.a1 < 0.01, "a1 {a1} vs {}", r.a1);
}

#[test]
fn gauss_constants_reject_other_classes() {
    assert!(gauss_constants(&preset(Model::L)).is_err());
    assert!(gauss_constants(&preset(Model::B)).is_err());
}

fn all_results() -> &'static [AsymptoticsResult] {
    static CELL: OnceLock<Vec<AsymptoticsResult>> = OnceLock::new();
    CELL.get_or_init(|| {
        Model::ALL
            .iter()
            .map(|&m| analyze(&preset(m), &OneDimOptions::default(), &Sequential).unwrap().branches[0].clone())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn exponent_algebra_is_exact(num in 1i64..40, den in 1i64..40) {
        let eta1 = Rational64::new(num, den);
        let (beta, alpha1) = exponents_from_eta1(eta1);
        prop_assert_eq!(beta * (Rational64::from_integer(4) + eta1), Rational64::from_integer(2));
        prop_assert_eq!(alpha1, eta1 * beta);
    }

    #[test]
    fn prediction_scaling_is_exact(eps in 1e-5f64..0.25, which in 0usize..5) {
        let r = &all_results()[which];
        let p = predict(r, eps).unwrap();
        let law = r.a1 * eps.powf(to_f64(r.alpha1));
        prop_assert!(((p.m1 - r.a0) - law).abs() <= 4.0 * f64::EPSILON * p.m1);
        prop_assert_eq!(p.k_int as f64, (p.k_real + 0.5).floor());
    }
}
