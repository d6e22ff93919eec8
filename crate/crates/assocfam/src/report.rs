//! Machine-readable reports: JSON with fixed float formatting (17 significant
//! digits, so identical runs produce byte-identical files) and a flat CSV
//! projection. Schemas are documented in `docs/schema/`.

use std::io::{self, Write as IoWrite};
use std::path::Path;

use serde::Serialize;

use crate::classify::Verdict;
use crate::compat::ResidualReport;

/// Sweep of family members over the requested parameter values.
#[derive(Debug, Clone, Serialize)]
pub struct FamilySweep {
    pub kind: String,
    pub surface: String,
    pub space: String,
    pub law: String,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure_theta: Option<f64>,
    pub members: Vec<ResidualReport>,
}

impl FamilySweep {
    pub fn new(law: String, tolerance: f64, members: Vec<ResidualReport>) -> Self {
        let (surface, space) = members
            .first()
            .map(|m| (m.surface.clone(), m.space.clone()))
            .unwrap_or_default();
        let first_failure_theta = members.iter().find(|m| !m.pass).and_then(|m| m.theta);
        FamilySweep {
            kind: "family_sweep".to_string(),
            surface,
            space,
            law,
            tolerance,
            pass: members.iter().all(|m| m.pass),
            first_failure_theta,
            members,
        }
    }
}

/// Formats a float with 17 significant digits; bit-exact across runs.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

struct Fixed17;

impl serde_json::ser::Formatter for Fixed17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes any report to deterministic, pretty-stable JSON (single line).
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Fixed17);
    value
        .serialize(&mut ser)
        .expect("report serialization cannot fail");
    let mut s = String::from_utf8(out).expect("valid utf8");
    s.push('\n');
    s
}

const CSV_HEADER: &str = "theta,equation,max_abs,mean_abs,argmax_u,argmax_v,pass\n";

fn push_report_rows(out: &mut String, r: &ResidualReport) {
    let theta = r.theta.map(fmt_f64).unwrap_or_default();
    for eq in &r.equations {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            theta,
            eq.name,
            fmt_f64(eq.max_abs),
            fmt_f64(eq.mean_abs),
            fmt_f64(eq.argmax.0),
            fmt_f64(eq.argmax.1),
            r.pass
        ));
    }
}

/// One row per equation.
pub fn residual_report_csv(r: &ResidualReport) -> String {
    let mut out = String::from(CSV_HEADER);
    push_report_rows(&mut out, r);
    out
}

/// One row per (theta, equation).
pub fn family_sweep_csv(s: &FamilySweep) -> String {
    let mut out = String::from(CSV_HEADER);
    for m in &s.members {
        push_report_rows(&mut out, m);
    }
    out
}

/// Key/value projection of a verdict.
pub fn verdict_csv(v: &Verdict) -> String {
    let mut out = String::from("key,value\n");
    out.push_str(&format!("outcome,{:?}\n", v.outcome));
    out.push_str(&format!("case,{}\n", case_str(v.case)));
    if let Some(o) = &v.obstruction {
        out.push_str(&format!("obstruction,{o}\n"));
    }
    if let Some(m) = v.obstruction_magnitude {
        out.push_str(&format!("obstruction_magnitude,{}\n", fmt_f64(m)));
    }
    out.push_str(&format!("max_abs_h,{}\n", fmt_f64(v.max_abs_h)));
    out.push_str(&format!(
        "max_umbilicity_defect,{}\n",
        fmt_f64(v.max_umbilicity_defect)
    ));
    if let Some(w) = v.max_warp_rate {
        out.push_str(&format!("max_warp_rate,{}\n", fmt_f64(w)));
    }
    for sv in &v.subverdicts {
        out.push_str(&format!("subverdict_{},{:?}\n", case_str(sv.case), sv.outcome));
    }
    out
}

fn case_str(c: crate::classify::CaseTag) -> &'static str {
    match c {
        crate::classify::CaseTag::TEqualsDt => "T_equals_dt",
        crate::classify::CaseTag::TZero => "T_zero",
        crate::classify::CaseTag::Generic => "generic",
        crate::classify::CaseTag::Mixed => "mixed",
    }
}

/// Writes a report atomically: temp file in the target directory, then
/// rename.
pub fn write_atomic(path: &Path, content: &str) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
