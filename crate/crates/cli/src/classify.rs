use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crnf::locus::{classify_case, trace_chain, CaseTag};
use serde_json::json;

use crate::outcome::{read_curve, read_germ, terms_json, write, CmdResult, Failure, Outcome, OK, PARSE, TYPE_UNDETERMINED};

pub fn classify(path: &Path, chains: &[PathBuf]) -> CmdResult {
    let phi = read_germ(path)?.to_phi()?;
    let curves = chains.iter().map(|p| read_curve(p)).collect::<Result<Vec<_>, _>>()?;
    let report = classify_case(phi.series(), &curves)?;
    let Some(model) = &report.model else {
        let reason = report.evidence.join("; ");
        return Err(Failure::new(TYPE_UNDETERMINED, format!("type undetermined to weight {}: {reason}", phi.trunc())));
    };

    let mut text = format!("k={} nu={} class={} case={}\n", model.k, model.nu, model.class.name(), report.case);
    let coeffs: Vec<String> = (1..model.k as usize).map(|j| format!("a_{j}={}", model.a[j])).collect();
    let _ = writeln!(text, "{}", coeffs.join(" "));
    for g in &report.generators {
        let _ = writeln!(text, "generator {g} = {}", g.series);
    }
    for e in &report.evidence {
        let _ = writeln!(text, "evidence: {e}");
    }
    let mut curve_records = vec![];
    for (path, r) in chains.iter().zip(&report.curves) {
        let (line, record) = match r {
            Ok(c) if c.constant => (format!("constant type {}", c.type_at_origin), json!({ "constant": true, "type": c.type_at_origin })),
            Ok(c) => (format!("type not constant: {}", c.failing.join(", ")), json!({ "constant": false, "type": c.type_at_origin, "failing": c.failing })),
            Err(e) => (format!("rejected: {e}"), json!({ "constant": false, "error": e.to_string() })),
        };
        let _ = writeln!(text, "curve {}: {line}", path.display());
        curve_records.push(record);
    }

    let json = json!({
        "command": "classify",
        "k": model.k,
        "nu": model.nu,
        "class": model.class.name(),
        "case": report.case.name(),
        "a": (1..model.k as usize).map(|j| json!({ "j": j, "re": model.a[j].re.to_string(), "im": model.a[j].im.to_string() })).collect::<Vec<_>>(),
        "generators": report.generators.iter().map(|g| json!({ "name": g.to_string(), "terms": terms_json(&g.series) })).collect::<Vec<_>>(),
        "evidence": report.evidence,
        "curves": curve_records,
        "chart": report.chart.as_ref().map(|c| json!({ "equation": c.equation.to_string(), "solved": (["x", "y", "u"][c.solved]), "order": c.order })),
    });
    Ok(Outcome { code: OK, text, json })
}

/// Reads a coordinate given as `p/q` or as a decimal.
fn coordinate(s: &str) -> Result<f64, Failure> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return Ok(x);
    }
    let r = crate::outcome::rational_arg("point", s)?;
    num_traits::ToPrimitive::to_f64(&r).ok_or_else(|| Failure::new(PARSE, format!("--point: `{s}` out of range")))
}

pub fn trace(path: &Path, point: &str, steps: usize, h: f64, out: Option<&Path>) -> CmdResult {
    let phi = read_germ(path)?.to_phi()?;
    let parts: Vec<&str> = point.split(',').collect();
    if parts.len() != 3 {
        return Err(Failure::new(PARSE, format!("--point: expected `x,y,u`, found `{point}`")));
    }
    let start = [coordinate(parts[0])?, coordinate(parts[1])?, coordinate(parts[2])?];
    if !(h.is_finite() && h > 0.0) {
        return Err(Failure::new(PARSE, format!("--h: expected a positive step, found {h}")));
    }
    let points = trace_chain(phi.series(), start, steps, h)?;
    let polyline = crnf::locus::format_polyline(&points);
    let text = match out {
        Some(p) => {
            write(p, &polyline)?;
            format!("case={} points={} written to {}\n", CaseTag::T2, points.len(), p.display())
        }
        None => polyline,
    };
    let json = json!({
        "command": "trace",
        "case": CaseTag::T2.name(),
        "points": points.iter().map(|p| json!({ "t": p.t, "u": p.u, "x": p.x, "y": p.y, "residual": p.residual })).collect::<Vec<_>>(),
    });
    Ok(Outcome { code: OK, text, json })
}
