//! Profile files, report types and CSV writers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use shellmodes_core::asymptotics::{AsymptoticsResult, Exponent, Prediction};
use shellmodes_core::geometry::ProfileShape;
use shellmodes_core::lame2d::SweepRecord;
use shellmodes_core::{preset, Model, ShellProfile};

use crate::args::ShapeArgs;
use crate::error::{CliError, CliResult};

/// On-disk profile description.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    pub shape: ProfileShape,
    pub interval: (f64, f64),
    #[serde(default = "default_young")]
    pub young: f64,
    #[serde(default = "default_nu")]
    pub nu: f64,
}

fn default_young() -> f64 {
    1.0
}

fn default_nu() -> f64 {
    0.3
}

impl ProfileFile {
    pub fn into_profile(self) -> CliResult<ShellProfile> {
        Ok(ShellProfile::new(self.shape, self.interval, self.young, self.nu)?)
    }
}

/// A resolved shell with a label for file names and headers.
pub struct Shape {
    pub label: String,
    pub profile: ShellProfile,
}

pub fn parse_model(s: &str) -> CliResult<Model> {
    s.parse::<Model>().map_err(|e| CliError::Usage(e.to_string()))
}

pub fn load_shape(args: &ShapeArgs) -> CliResult<Shape> {
    match (&args.model, &args.profile) {
        (Some(m), None) => {
            let model = parse_model(m)?;
            Ok(Shape {
                label: model.name().to_string(),
                profile: preset(model),
            })
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
            let file: ProfileFile = serde_json::from_str(&text).map_err(|source| CliError::ProfileFile {
                path: path.display().to_string(),
                source,
            })?;
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "profile".into());
            Ok(Shape {
                label,
                profile: file.into_profile()?,
            })
        }
        _ => Err(CliError::Usage("give exactly one of --model or --profile".into())),
    }
}

/// Rounds to six significant digits.
pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let digits = 5 - x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

fn ratio_string(r: Exponent) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PredictionReport {
    pub eps: f64,
    pub k_real: f64,
    pub k_int: u32,
    pub m1: f64,
    pub ratio: f64,
}

impl PredictionReport {
    pub fn new(eps: f64, p: &Prediction) -> Self {
        Self {
            eps,
            k_real: sig6(p.k_real),
            k_int: p.k_int,
            m1: sig6(p.m1),
            ratio: sig6(p.ratio),
        }
    }
}

/// JSON form of one asymptotic branch.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AsymptoticsReport {
    pub class: String,
    pub z0: Option<f64>,
    pub a0: f64,
    pub a1: f64,
    pub gamma: f64,
    pub eta1: String,
    pub beta: String,
    pub alpha1: String,
    /// One half for parabolic shells, otherwise the coefficient of `eps^alpha1`.
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda2: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub predictions: Vec<PredictionReport>,
}

impl AsymptoticsReport {
    pub fn new(r: &AsymptoticsResult) -> Self {
        Self {
            class: r.class.name().to_string(),
            z0: r.z0.map(sig6),
            a0: sig6(r.a0),
            a1: sig6(r.a1),
            gamma: sig6(r.gamma),
            eta1: ratio_string(r.eta1),
            beta: ratio_string(r.beta),
            alpha1: ratio_string(r.alpha1),
            ratio: sig6(r.ratio_coeff),
            lambda2: r.lambda2.map(sig6),
            predictions: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ClassReport {
    pub class: String,
    pub z0: Option<f64>,
    pub boundary_minimum: bool,
    pub admissible: bool,
    pub essential_spectrum: (f64, f64),
    pub minima: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

/// One line per half-thickness in the 2D summary.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepSummary {
    pub eps: f64,
    pub k_tilde: Option<i64>,
    pub lambda_tilde: Option<f64>,
    pub k_predicted: Option<u32>,
    pub m1: Option<f64>,
    pub interior: Option<bool>,
    pub half_width: Option<f64>,
    pub argmax_z: Option<f64>,
    pub status: String,
}

pub fn summary_csv(rows: &[SweepSummary]) -> CliResult<Vec<u8>> {
    csv_bytes("", |w| {
        for r in rows {
            w.serialize(r)?;
        }
        Ok(())
    })
}

/// `# key=value ...` metadata line followed by a `# generated` timestamp line.
pub fn metadata_header(fields: &[(&str, String)]) -> String {
    let mut line = format!("# shellmodes {}", env!("CARGO_PKG_VERSION"));
    for (k, v) in fields {
        line.push_str(&format!(" {k}={v}"));
    }
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("{line}\n# generated unix={stamp}\n")
}

fn csv_bytes<F>(header: &str, fill: F) -> CliResult<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> Result<(), csv::Error>,
{
    let mut buf = header.as_bytes().to_vec();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        fill(&mut w)?;
        w.flush().map_err(|e| CliError::io("<buffer>", e))?;
    }
    Ok(buf)
}

pub fn sweep_csv(header: &str, records: &[SweepRecord]) -> CliResult<Vec<u8>> {
    csv_bytes(header, |w| {
        w.write_record(["eps", "k", "lambda1", "dofs", "residual"])?;
        for r in records {
            w.write_record([
                r.eps.to_string(),
                r.k.to_string(),
                format!("{:.12e}", r.lambda1),
                r.dofs.to_string(),
                format!("{:.3e}", r.residual),
            ])?;
        }
        Ok(())
    })
}

pub fn mode_csv(header: &str, z: &[f64], u: &[f64]) -> CliResult<Vec<u8>> {
    csv_bytes(header, |w| {
        w.write_record(["z", "u_r"])?;
        for (a, b) in z.iter().zip(u) {
            w.write_record([format!("{a:.10}"), format!("{b:.10e}")])?;
        }
        Ok(())
    })
}

/// `(r_circ, Ok((Lambda2, gamma_min, a1)) | Err(message))`
pub type TorusRow = (f64, Result<(f64, f64, f64), String>);

pub fn torus_csv(header: &str, rows: &[TorusRow]) -> CliResult<Vec<u8>> {
    csv_bytes(header, |w| {
        w.write_record(["r_circ", "Lambda2", "gamma_min", "a1", "status"])?;
        for (r, outcome) in rows {
            match outcome {
                Ok((l, g, a)) => w.write_record([
                    format!("{r:.6}"),
                    format!("{l:.10e}"),
                    format!("{g:.10e}"),
                    format!("{a:.10e}"),
                    "ok".into(),
                ])?,
                Err(msg) => w.write_record([format!("{r:.6}"), String::new(), String::new(), String::new(), msg.clone()])?,
            }
        }
        Ok(())
    })
}

pub fn gamma_scan_csv(header: &str, scan: &[(f64, f64)]) -> CliResult<Vec<u8>> {
    csv_bytes(header, |w| {
        w.write_record(["gamma", "mu"])?;
        for (g, m) in scan {
            w.write_record([format!("{g:.10e}"), format!("{m:.12e}")])?;
        }
        Ok(())
    })
}

/// Writes `bytes` to `dir/name`, creating the directory.
pub fn write_output(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    let path = dir.join(name);
    let mut f = fs::File::create(&path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path.display().to_string(), e))?;
    Ok(path)
}

/// `0.01` -> `0.01`, used in file names.
pub fn eps_tag(eps: f64) -> String {
    format!("{eps}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.857004123), 0.857004);
        assert_eq!(sig6(3.385234567), 3.38523);
        assert_eq!(sig6(0.0), 0.0);
        assert_eq!(sig6(-1234567.0), -1234570.0);
    }

    #[test]
    fn profile_file_round_trip() {
        let text = r#"{"shape": {"kind": "polynomial", "coeffs": [1.0, 0.0, -0.125]}, "interval": [-1, 1]}"#;
        let f: ProfileFile = serde_json::from_str(text).unwrap();
        let p = f.into_profile().unwrap();
        assert_eq!(p.nu, 0.3);
        assert_eq!(p.interval, (-1.0, 1.0));
    }

    #[test]
    fn profile_parse_error_reports_position() {
        let err = serde_json::from_str::<ProfileFile>("{\n  \"shape\": 3\n}").unwrap_err();
        assert_eq!(err.line(), 2);
    }

    #[test]
    fn sweep_csv_has_header_and_columns() {
        let rec = SweepRecord {
            eps: 0.01,
            k: 5,
            lambda1: 0.25,
            dofs: 100,
            residual: 1e-14,
        };
        let bytes = sweep_csv("# meta\n", &[rec]).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# meta");
        assert_eq!(lines[1], "eps,k,lambda1,dofs,residual");
        assert!(lines[2].starts_with("0.01,5,2.5"));
    }
}
