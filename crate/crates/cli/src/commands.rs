//! Subcommand implementations. Each returns the text printed on stdout.

use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shellmodes_core::airy::first_airy_zero;
use shellmodes_core::asymptotics::{
    analyze, parabolic_problem, predict, toroidal_constants, toroidal_problem, toroidal_sweep, OneDimOptions,
};
use shellmodes_core::fem1d::{assemble_h20, clamped_beam_root, smallest_eigenpairs, Grading, Mesh1D};
use shellmodes_core::geometry::{essential_spectrum_range, ShellTag};
use shellmodes_core::lame2d::{
    build_meridian_mesh, flip_azimuthal, k_sweep_with, midline_mode_trace, KPolicy, LameOperator, MeshSpec,
};
use shellmodes_core::optimize::log_grid;
use shellmodes_core::symbols::{h2_operator, symbols_at, verify_h0_recurrence, verify_v2_equation};
use shellmodes_core::{classify, frame_at, preset, Executor, Model, ShellProfile};

use crate::args::{
    parse_mesh, AsymptoticsArgs, Cli, Command, CommonArgs, ShapeArgs, Sweep1dArgs, Sweep2dArgs, TorusArgs, VerifyArgs,
};
use crate::error::{CliError, CliResult};
use crate::exec::RayonExecutor;
use crate::io::{
    eps_tag, gamma_scan_csv, load_shape, metadata_header, mode_csv, parse_model, summary_csv, sweep_csv, torus_csv,
    write_output, AsymptoticsReport, ClassReport, PredictionReport, SweepSummary, TorusRow,
};

pub fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Classify(a) => cmd_classify(&a),
        Command::Asymptotics(a) => cmd_asymptotics(&a),
        Command::Sweep1d(a) => cmd_sweep1d(&a),
        Command::Sweep2d(a) => cmd_sweep2d(&a),
        Command::TorusSweep(a) => cmd_torus_sweep(&a),
        Command::Verify(a) => cmd_verify(&a),
    }
}

fn one_dim_options(common: &CommonArgs) -> CliResult<OneDimOptions> {
    if common.elements < 2 {
        return Err(CliError::Usage("--elements must be at least 2".into()));
    }
    Ok(OneDimOptions {
        elements: common.elements,
        ..OneDimOptions::default()
    })
}

fn check_eps(eps: &[f64]) -> CliResult<()> {
    match eps.iter().find(|e| !(**e > 0.0 && **e <= 0.25)) {
        Some(e) => Err(CliError::Usage(format!("half-thickness {e} outside (0, 0.25]"))),
        None => Ok(()),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable report") + "\n"
}

/// Writes `bytes` under `out` when given and returns the text for stdout.
fn emit(out: Option<&Path>, name: &str, bytes: Vec<u8>) -> CliResult<String> {
    match out {
        Some(dir) => {
            let path = write_output(dir, name, &bytes)?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(String::from_utf8(bytes).expect("utf-8 output")),
    }
}

pub fn cmd_classify(args: &ShapeArgs) -> CliResult<String> {
    let shape = load_shape(args)?;
    let class = classify(&shape.profile, 1024)?;
    let report = ClassReport {
        class: class.tag.name().to_string(),
        z0: class.z0,
        boundary_minimum: class.boundary_minimum,
        admissible: class.tag != ShellTag::Inadmissible,
        essential_spectrum: essential_spectrum_range(&shape.profile),
        minima: class.branches.iter().map(|m| m.z0).collect(),
        note: class.note,
    };
    let text = to_json(&report);
    match &args.out {
        Some(dir) => {
            write_output(dir, &format!("classify_{}.json", shape.label), text.as_bytes())?;
            Ok(text)
        }
        None => Ok(text),
    }
}

pub fn cmd_asymptotics(args: &AsymptoticsArgs) -> CliResult<String> {
    check_eps(&args.eps)?;
    let shape = load_shape(&args.shape)?;
    let exec = RayonExecutor::new(args.common.jobs);
    let analysis = analyze(&shape.profile, &one_dim_options(&args.common)?, &exec)?;
    let mut reports = Vec::new();
    for r in &analysis.branches {
        let mut rep = AsymptoticsReport::new(r);
        for &eps in &args.eps {
            rep.predictions.push(PredictionReport::new(eps, &predict(r, eps)?));
        }
        reports.push(rep);
    }
    let text = if reports.len() == 1 {
        to_json(&reports[0])
    } else {
        to_json(&reports)
    };
    if let Some(dir) = &args.shape.out {
        write_output(dir, &format!("asymptotics_{}.json", shape.label), text.as_bytes())?;
    }
    Ok(text)
}

pub fn cmd_sweep1d(args: &Sweep1dArgs) -> CliResult<String> {
    let shape = load_shape(&args.shape)?;
    let opts = one_dim_options(&args.common)?;
    let profile = &shape.profile;
    let class = classify(profile, 1024)?;
    let (problem, default_range) = match class.tag {
        ShellTag::Cylinder | ShellTag::Cone => (parabolic_problem(profile, opts.elements)?, opts.bracket),
        ShellTag::TorusElliptic => {
            let lambda0 = profile.h0(0.5 * (profile.interval.0 + profile.interval.1));
            (toroidal_problem(profile, lambda0, opts.elements)?, opts.torus_bracket)
        }
        other => {
            return Err(CliError::Usage(format!(
                "the gamma scan applies to parabolic and toroidal shells, not {other}"
            )))
        }
    };
    let (lo, hi) = match &args.range {
        Some(r) => *r,
        None => default_range,
    };
    if !(lo > 0.0 && hi > lo) || args.points < 2 {
        return Err(CliError::Usage("scan needs 0 < lo < hi and at least two points".into()));
    }
    let exec = RayonExecutor::new(args.common.jobs);
    let xs = log_grid(lo, hi, args.points);
    let ys = exec.map(xs.len(), &|i| problem.mu(xs[i]));
    let mut scan = Vec::with_capacity(xs.len());
    for (x, y) in xs.iter().zip(ys) {
        scan.push((*x, y?));
    }
    let header = metadata_header(&[
        ("command", "sweep1d".into()),
        ("model", shape.label.clone()),
        ("elements", opts.elements.to_string()),
    ]);
    emit(
        args.shape.out.as_deref(),
        &format!("sweep1d_{}.csv", shape.label),
        gamma_scan_csv(&header, &scan)?,
    )
}

fn mesh_spec(args: &Sweep2dArgs) -> CliResult<MeshSpec> {
    let (n_meridian, n_thickness) = parse_mesh(&args.mesh).map_err(CliError::Usage)?;
    if args.degree == 0 {
        return Err(CliError::Usage("--degree must be positive".into()));
    }
    let grading = match args.grading {
        None => Grading::Uniform,
        Some(r) if r >= 1.0 => Grading::Boundary(r),
        Some(r) => return Err(CliError::Usage(format!("grading ratio {r} below 1"))),
    };
    Ok(MeshSpec {
        n_meridian,
        n_thickness,
        degree: args.degree,
        grading,
    })
}

pub fn cmd_sweep2d(args: &Sweep2dArgs) -> CliResult<String> {
    check_eps(&args.eps)?;
    if args.eps.is_empty() {
        return Err(CliError::Usage("no half-thickness given".into()));
    }
    let shape = load_shape(&args.shape)?;
    let spec = mesh_spec(args)?;
    let exec = RayonExecutor::new(args.common.jobs);
    let policy = KPolicy {
        batch: exec.threads(),
        ..KPolicy::default()
    };
    let predicted = analyze(&shape.profile, &one_dim_options(&args.common)?, &exec).ok();
    let out = args.shape.out.as_deref();

    let mut rows = Vec::new();
    let mut failures = 0;
    for &eps in &args.eps {
        let best = predicted.as_ref().map(|a| a.best_at(eps));
        let mut row = SweepSummary {
            eps,
            k_tilde: None,
            lambda_tilde: None,
            k_predicted: best.and_then(|b| predict(b, eps).ok()).map(|p| p.k_int),
            m1: best.map(|b| b.m1(eps)),
            interior: None,
            half_width: None,
            argmax_z: None,
            status: "ok".into(),
        };
        let outcome = k_sweep_with(&shape.profile, eps, spec, &policy, &exec).and_then(|s| {
            let mesh = build_meridian_mesh(&shape.profile, eps, spec)?;
            Ok((midline_mode_trace(&mesh, &s.mode), s))
        });
        match outcome {
            Ok((trace, sweep)) => {
                row.k_tilde = Some(sweep.k_best);
                row.lambda_tilde = Some(sweep.lambda_best);
                row.interior = Some(sweep.interior);
                row.half_width = Some(trace.half_width);
                row.argmax_z = Some(trace.argmax_z);
                if !sweep.interior {
                    row.status = "budget exhausted before an interior minimum".into();
                }
                if let Some(dir) = out {
                    let meta = metadata_header(&[
                        ("model", shape.label.clone()),
                        ("eps", eps_tag(eps)),
                        ("mesh", format!("{}x{}", spec.n_meridian, spec.n_thickness)),
                        ("degree", spec.degree.to_string()),
                    ]);
                    let tag = format!("{}_eps{}", shape.label, eps_tag(eps));
                    write_output(dir, &format!("sweep2d_{tag}.csv"), &sweep_csv(&meta, &sweep.records)?)?;
                    write_output(dir, &format!("mode_{tag}.csv"), &mode_csv(&meta, &trace.z, &trace.u_r)?)?;
                }
            }
            Err(e) => {
                failures += 1;
                row.status = e.to_string();
            }
        }
        rows.push(row);
    }
    let summary = summary_csv(&rows)?;
    if let Some(dir) = out {
        write_output(dir, &format!("summary_{}.csv", shape.label), &summary)?;
    }
    let text = String::from_utf8(summary).expect("utf-8 output");
    if failures > 0 {
        eprint!("{text}");
        return Err(CliError::Failed {
            count: failures,
            what: "sweep(s)",
        });
    }
    Ok(text)
}

/// Grid `lo, lo + step, ...` up to `hi`, rounded to suppress drift.
pub fn radius_grid(lo: f64, hi: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(step > 0.0) || !(hi >= lo) {
        return Err(CliError::Usage("empty arc-center grid".into()));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| ((lo + step * i as f64) * 1e9).round() / 1e9).collect())
}

pub fn cmd_torus_sweep(args: &TorusArgs) -> CliResult<String> {
    let grid = radius_grid(args.r_min, args.r_max, args.step)?;
    let interval = args.interval;
    let opts = one_dim_options(&args.common)?;
    let exec = RayonExecutor::new(args.common.jobs);
    let rows: Vec<TorusRow> = toroidal_sweep(args.radius, args.z_center, interval, &grid, &opts, &exec)
        .into_iter()
        .map(|r| (r.r_circ, r.outcome.map_err(|e| e.to_string())))
        .collect();
    let header = metadata_header(&[
        ("command", "torus-sweep".into()),
        ("radius", args.radius.to_string()),
        ("z_center", args.z_center.to_string()),
        ("interval", format!("{},{}", interval.0, interval.1)),
    ]);
    emit(args.out.as_deref(), "torus_sweep.csv", torus_csv(&header, &rows)?)
}

/// One line of the verification report.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tol,
            pass: value <= tol,
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Sum of the magnitudes of the terms of the principal fourth-order coefficient.
fn h4_term_scale(fr: &shellmodes_core::GeometryFrame) -> f64 {
    let s2 = fr.s * fr.s;
    let (s6, s8) = (s2 * s2 * s2, s2 * s2 * s2 * s2);
    let f = fr.f;
    fr.young * (4.0 * (f * f * f * fr.fpp).abs() / s8 + 3.0 * (f * f * fr.fpp).powi(2) / (s8 * s2) + f * f / s6)
}

fn symbol_checks(model: Model, profile: &ShellProfile, samples: usize, rng: &mut ChaCha8Rng) -> CliResult<Vec<Check>> {
    let (lo, hi) = profile.interval;
    let (mut rec, mut r2, mut r4, mut sparse, mut v2) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let z = lo + (hi - lo) * uniform(rng);
        let fr = frame_at(profile, z)?;
        let (sym, coeffs) = symbols_at(&fr, 0.0, 0.0);
        rec = rec.max(verify_h0_recurrence(&fr) / coeffs.h0.abs().max(1.0));
        let s2 = fr.s * fr.s;
        let curv_g = 2.0 * fr.young * fr.f * fr.f / s2 * fr.b_zz * (fr.b_pp - fr.b_zz);
        r2 = r2.max(rel(-h2_operator(&fr.jets(), fr.young, fr.nu, 0.0).coeff(2), curv_g));
        let curv_h4 = fr.young * fr.f.powi(4) / (s2 * s2) * (fr.b_pp - 3.0 * fr.b_zz) * (fr.b_pp - fr.b_zz);
        r4 = r4.max((coeffs.h4_principal - curv_h4).abs() / h4_term_scale(&fr));
        for (i, j) in [(0, 0), (1, 1), (0, 2), (2, 0), (2, 2)] {
            sparse = sparse.max(sym.m1[i][j].coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())));
        }
        for (i, j) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
            sparse = sparse.max(sym.m2[i][j].coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())));
        }
        let poly: Vec<f64> = (0..=6).map(|_| 2.0 * uniform(rng) - 1.0).collect();
        v2 = v2.max(verify_v2_equation(profile, z, &poly));
    }
    let m = model.name();
    Ok(vec![
        Check::below(format!("h0_recurrence[{m}]"), rec, 1e-12),
        Check::below(format!("h2_curvature_form[{m}]"), r2, 1e-12),
        Check::below(format!("h4_curvature_form[{m}]"), r4, 1e-12),
        Check::below(format!("membrane_sparsity[{m}]"), sparse, 0.0),
        Check::below(format!("v2_equation[{m}]"), v2, 1e-10),
    ])
}

fn lame_checks(model: Model, profile: &ShellProfile) -> CliResult<Vec<Check>> {
    let spec = MeshSpec {
        n_meridian: 4,
        n_thickness: 2,
        degree: 3,
        grading: Grading::Uniform,
    };
    let mesh = build_meridian_mesh(profile, 0.05, spec)?;
    let op = LameOperator::assemble(&mesh);
    let mut conj = 0.0f64;
    for k in [1i64, 4] {
        let plus = flip_azimuthal(&op.system(k, 0.05).stiffness);
        let minus = op.system(-k, 0.05).stiffness;
        let scale = minus.norm_inf();
        let n = plus.dim();
        for i in 0..n {
            for j in i.saturating_sub(plus.half_bandwidth())..=i {
                conj = conj.max((plus.get(i, j) - minus.get(i, j)).abs() / scale);
            }
        }
    }
    let mass_ok = op.mass.cholesky().is_ok();
    let m = model.name();
    Ok(vec![
        Check::below(format!("opposite_frequency_conjugation[{m}]"), conj, 1e-12),
        Check {
            name: format!("mass_positive_definite[{m}]"),
            value: if mass_ok { 0.0 } else { 1.0 },
            tol: 0.0,
            pass: mass_ok,
        },
    ])
}

fn oracle_checks() -> CliResult<Vec<Check>> {
    let unit = ShellProfile::polynomial(vec![1.0], (0.0, 1.0))?;
    let mesh = Mesh1D::uniform((0.0, 1.0), 64)?;
    let asm = assemble_h20(&unit, |_| 1.0, |_| 0.0, &mesh)?;
    let lam = smallest_eigenpairs(&asm.stiffness(), &asm.mass, 1)?[0].eigenvalue;
    Ok(vec![
        Check::below("clamped_beam", rel(lam, clamped_beam_root().powi(4)), 1e-5),
        Check::below("first_airy_zero", (first_airy_zero() - 2.33811).abs(), 5e-6),
    ])
}

pub fn verification_report(args: &VerifyArgs) -> CliResult<Vec<Check>> {
    let models = match &args.model {
        Some(m) => vec![parse_model(m)?],
        None => Model::ALL.to_vec(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut checks = oracle_checks()?;
    for model in models {
        let profile = preset(model);
        checks.extend(symbol_checks(model, &profile, args.samples, &mut rng)?);
        checks.extend(lame_checks(model, &profile)?);
        if classify(&profile, 1024)?.tag == ShellTag::TorusElliptic {
            let (r, _) = toroidal_constants(&profile, &OneDimOptions::default(), &shellmodes_core::Sequential)?;
            let l2 = r.lambda2.unwrap_or(f64::NAN);
            checks.push(Check {
                name: format!("lambda2_positive[{}]", model.name()),
                value: l2,
                tol: 0.0,
                pass: l2 > 0.0,
            });
        }
    }
    Ok(checks)
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<String> {
    let checks = verification_report(args)?;
    let mut text = String::new();
    for c in &checks {
        text.push_str(&format!(
            "{} {:<36} value={:.3e} tol={:.1e}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tol
        ));
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        eprint!("{text}");
        return Err(CliError::Failed {
            count: failed,
            what: "check(s)",
        });
    }
    Ok(text)
}
