use super::{Check, HarnessError, Manifest};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fs;
use std::path::Path;

/// Writes manifest.json, report.json, checks.txt and, when given, a CSV
/// table into `out`.
pub fn write_outputs<C: Serialize, R: Serialize>(
    out: &Path,
    kind: &str,
    config: &C,
    seed: u64,
    report: &R,
    checks: &[Check],
    csv: Option<(&str, &str)>,
) -> Result<Manifest, HarnessError> {
    fs::create_dir_all(out)?;
    let manifest = Manifest::new(kind, serde_json::to_value(config)?, seed, checks);
    fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    fs::write(out.join("report.json"), serde_json::to_string_pretty(report)?)?;
    let lines: String = checks.iter().map(|c| c.line() + "\n").collect();
    fs::write(out.join("checks.txt"), lines)?;
    if let Some((name, body)) = csv {
        fs::write(out.join(name), body)?;
    }
    Ok(manifest)
}

/// Fixed-column CSV with 17 significant digits.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|x| format!("{x:.16e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Any driver configuration.
pub trait Config: DeserializeOwned + Serialize {}

impl<T: DeserializeOwned + Serialize> Config for T {}

pub fn load_config<T: Config>(path: &Path) -> Result<T, HarnessError> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
