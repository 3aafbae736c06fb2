//! Report rendering: JSON for machines, CSV for plotting, text for humans.
//!
//! JSON schema (single suite):
//!
//! ```json
//! {
//!   "suite": "...",
//!   "spec": {"norm": "...", "dim": 3, "surface": "..."?},
//!   "plan": {"seed": 7, "count": 200, "rmin": ..., "rmax": ...},
//!   "checks": [{"name": "...", "residual": ..., "tolerance": ...|null,
//!               "verdict": "pass"|"fail"|"measured-only"}, ...],
//!   "overall": true,
//!   "timestamp": "..."?          // omitted under --no-timestamp
//! }
//! ```
//!
//! An `all` run wraps its suites as `{"suite": "all", "reports": [...],
//! "skipped": [{"suite", "reason"}...], "overall", "timestamp"?}`.
//!
//! Floats are serialized with 17 significant digits everywhere, so identical
//! runs produce byte-identical output. Check notes appear only in the text
//! rendering; the JSON carries exactly the schema above. CSV rows are the
//! per-sample residuals: `sample_index, y0..y{n−1}, name, value`, with the
//! name prefixed `suite:` when several suites share one file.

use crate::verify::{TheoremReport, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format {other:?}; expected json, csv, or text")),
        }
    }
}

/// 17-significant-digit float rendering; valid as a JSON number for all
/// finite inputs (non-finite values become `null` in JSON contexts).
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

pub(crate) fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn timestamp_value() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn report_json_body(report: &TheoremReport) -> String {
    let mut spec =
        format!("\"norm\": \"{}\", \"dim\": {}", json_escape(&report.norm_desc), report.dim);
    if let Some(surface) = &report.surface_desc {
        spec.push_str(&format!(", \"surface\": \"{}\"", json_escape(surface)));
    }
    let plan = format!(
        "{{\"seed\": {}, \"count\": {}, \"rmin\": {}, \"rmax\": {}}}",
        report.plan.seed,
        report.plan.count,
        fmt_float(report.plan.radius_range.0),
        fmt_float(report.plan.radius_range.1)
    );
    let checks: Vec<String> = report
        .checks
        .iter()
        .map(|c| {
            let tol = c.tolerance.map_or("null".to_string(), fmt_float);
            format!(
                "{{\"name\": \"{}\", \"residual\": {}, \"tolerance\": {}, \"verdict\": \"{}\"}}",
                json_escape(&c.name),
                fmt_float(c.residual),
                tol,
                c.verdict.as_str()
            )
        })
        .collect();
    format!(
        "\"suite\": \"{}\", \"spec\": {{{spec}}}, \"plan\": {plan}, \"checks\": [{}], \"overall\": {}",
        json_escape(&report.suite),
        checks.join(", "),
        report.overall
    )
}

/// Renders one suite report.
pub fn render(report: &TheoremReport, format: Format, timestamp: bool) -> String {
    match format {
        Format::Json => {
            let mut body = report_json_body(report);
            if timestamp {
                body.push_str(&format!(", \"timestamp\": \"{}\"", timestamp_value()));
            }
            format!("{{{body}}}\n")
        }
        Format::Csv => render_csv(std::slice::from_ref(report), false),
        Format::Text => render_text(report, timestamp),
    }
}

/// A suite that an `all` run skipped, with the reason (e.g. an n ≥ 3
/// hypothesis at n = 2).
#[derive(Debug, Clone)]
pub struct SkippedSuite {
    pub suite: String,
    pub reason: String,
}

/// Renders a full `all` battery: every executed suite plus the skip ledger.
pub fn render_all(
    reports: &[TheoremReport],
    skipped: &[SkippedSuite],
    format: Format,
    timestamp: bool,
) -> String {
    match format {
        Format::Json => {
            let bodies: Vec<String> =
                reports.iter().map(|r| format!("{{{}}}", report_json_body(r))).collect();
            let skips: Vec<String> = skipped
                .iter()
                .map(|s| {
                    format!(
                        "{{\"suite\": \"{}\", \"reason\": \"{}\"}}",
                        json_escape(&s.suite),
                        json_escape(&s.reason)
                    )
                })
                .collect();
            let overall = reports.iter().all(|r| r.overall);
            let mut body = format!(
                "\"suite\": \"all\", \"reports\": [{}], \"skipped\": [{}], \"overall\": {}",
                bodies.join(", "),
                skips.join(", "),
                overall
            );
            if timestamp {
                body.push_str(&format!(", \"timestamp\": \"{}\"", timestamp_value()));
            }
            format!("{{{body}}}\n")
        }
        Format::Csv => render_csv(reports, true),
        Format::Text => {
            let mut out = String::new();
            if timestamp {
                out.push_str(&format!("# {}\n", timestamp_value()));
            }
            for report in reports {
                out.push_str(&render_text(report, false));
                out.push('\n');
            }
            for skip in skipped {
                out.push_str(&format!("suite {} skipped: {}\n", skip.suite, skip.reason));
            }
            let overall = reports.iter().all(|r| r.overall);
            out.push_str(&format!("\noverall: {}\n", if overall { "pass" } else { "FAIL" }));
            out
        }
    }
}

fn render_csv(reports: &[TheoremReport], prefix_suite: bool) -> String {
    let dim = reports.iter().map(|r| r.dim).max().unwrap_or(0);
    let mut out = String::new();
    out.push_str("sample_index");
    for i in 0..dim {
        out.push_str(&format!(",y{i}"));
    }
    out.push_str(",name,value\n");
    for report in reports {
        for rec in &report.samples {
            out.push_str(&rec.index.to_string());
            for i in 0..dim {
                out.push(',');
                out.push_str(&rec.point.get(i).map_or(String::new(), |v| fmt_float(*v)));
            }
            let name = if prefix_suite {
                format!("{}:{}", report.suite, rec.name)
            } else {
                rec.name.clone()
            };
            out.push_str(&format!(",{name},{}\n", fmt_float(rec.value)));
        }
    }
    out
}

fn render_text(report: &TheoremReport, timestamp: bool) -> String {
    let mut out = String::new();
    if timestamp {
        out.push_str(&format!("# {}\n", timestamp_value()));
    }
    out.push_str(&format!("suite: {}\n", report.suite));
    out.push_str(&format!("spec:  {} (dim {})\n", report.norm_desc, report.dim));
    if let Some(surface) = &report.surface_desc {
        out.push_str(&format!("surface: {surface}\n"));
    }
    out.push_str(&format!(
        "plan:  seed={} count={} radius=[{}, {}]\n",
        report.plan.seed, report.plan.count, report.plan.radius_range.0, report.plan.radius_range.1
    ));
    for c in &report.checks {
        let verdict = match c.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::MeasuredOnly => "meas",
        };
        let tol = c.tolerance.map_or("         —".to_string(), |t| format!("{t:10.3e}"));
        out.push_str(&format!(
            "  [{verdict}] {:<38} residual {:13.6e}  tol {tol}\n",
            c.name, c.residual
        ));
        if let Some(note) = &c.note {
            out.push_str(&format!("         {note}\n"));
        }
    }
    out.push_str(&format!("overall: {}\n", if report.overall { "pass" } else { "FAIL" }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::NormSpec;
    use crate::verify::{CheckRecord, SamplePlan, TheoremReport};
    use nalgebra::DMatrix;

    fn sample_report() -> TheoremReport {
        let spec = NormSpec::euclidean(DMatrix::identity(2, 2)).unwrap();
        TheoremReport::new(
            "demo",
            &spec,
            None,
            &SamplePlan::default(),
            vec![
                CheckRecord::asserted("alpha", 1e-12, 1e-8),
                CheckRecord::measured("beta", 0.25).with_note("a note"),
            ],
            Vec::new(),
        )
    }

    #[test]
    fn json_is_parseable_and_has_the_schema() {
        let text = render(&sample_report(), Format::Json, false);
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["suite"], "demo");
        assert_eq!(doc["overall"], true);
        assert_eq!(doc["checks"][0]["verdict"], "pass");
        assert!(doc["checks"][1]["tolerance"].is_null());
        assert_eq!(doc["plan"]["seed"], 7);
        assert!(doc.get("timestamp").is_none());
        // notes are text-only
        assert!(doc["checks"][1].get("note").is_none());

        let stamped = render(&sample_report(), Format::Json, true);
        let doc: serde_json::Value = serde_json::from_str(&stamped).unwrap();
        assert!(doc.get("timestamp").is_some());
    }

    #[test]
    fn float_format_round_trips_exactly() {
        for &x in &[3.0983866769659335f64, -1.0e-300, 0.1 + 0.2, f64::MIN_POSITIVE] {
            let text = fmt_float(x);
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{text}");
        }
        assert_eq!(fmt_float(f64::NAN), "null");
        assert_eq!(fmt_float(f64::INFINITY), "null");
    }

    #[test]
    fn text_flags_failures() {
        let spec = NormSpec::euclidean(DMatrix::identity(2, 2)).unwrap();
        let report = TheoremReport::new(
            "demo",
            &spec,
            None,
            &SamplePlan::default(),
            vec![CheckRecord::asserted("alpha", 1.0, 1e-8)],
            Vec::new(),
        );
        let text = render(&report, Format::Text, false);
        assert!(text.contains("[FAIL] alpha"));
        assert!(text.contains("overall: FAIL"));
    }
}
