//! Stable rendering of analysis results: a fixed-key JSON schema for
//! machine consumption and a plain table for people. Output is byte-stable
//! for identical inputs (everything is ordered).

use crate::capacity::CapacityResult;
use crate::court::{AnalysisReport, Condition, Evidence};
use serde_json::{json, Value as Json};

pub fn capacity_json(cap: &CapacityResult) -> Json {
    json!({
        "C_S": cap.c_s.render(),
        "rho": cap.rho.render(),
        "rho_bar": cap.rho_bar.render(),
        "R_CO": cap.r_co.render(),
        "rates": cap
            .rate_vector
            .iter()
            .map(|(id, v)| json!({"user": id, "rate": v.render()}))
            .collect::<Vec<_>>(),
        "cross_checks": cap
            .cross_checks
            .iter()
            .map(|c| json!({"route": c.route, "value": c.value.to_string(), "ok": c.ok}))
            .collect::<Vec<_>>(),
    })
}

fn evidence_json(e: &Evidence) -> Json {
    json!({
        "kind": e.kind.label(),
        "tag": e.tag,
        "value": e.value.as_ref().map(|v| v.render()),
        "witness": e.witness,
    })
}

fn condition_json(c: &Condition) -> Json {
    json!({"tag": c.tag, "status": c.status.label(), "witness": c.witness})
}

pub fn report_json(r: &AnalysisReport) -> Json {
    json!({
        "C_S": r.capacity.c_s.render(),
        "rho": r.capacity.rho.render(),
        "rho_bar": r.capacity.rho_bar.render(),
        "R_CO": r.capacity.r_co.render(),
        "verdict": r.verdict.label(),
        "bracket": [r.bracket.0.render(), r.bracket.1.render()],
        "flags": r.flags,
        "evidence": r.evidence.iter().map(evidence_json).collect::<Vec<_>>(),
        "conditions": r.conditions.iter().map(condition_json).collect::<Vec<_>>(),
        "cross_checks": r.capacity
            .cross_checks
            .iter()
            .map(|c| json!({"route": c.route, "value": c.value.to_string(), "ok": c.ok}))
            .collect::<Vec<_>>(),
        "scenario": r.scenario,
        "exact": r.exact,
    })
}

pub fn render_human(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let push = |out: &mut String, line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    push(&mut out, format!("scenario   {}", r.scenario));
    push(&mut out, format!("C_S        {}", r.capacity.c_s.render()));
    push(
        &mut out,
        format!(
            "R_CO       {}  (rho {}, rho_bar {})",
            r.capacity.r_co.render(),
            r.capacity.rho.render(),
            r.capacity.rho_bar.render()
        ),
    );
    push(
        &mut out,
        format!(
            "R_S range  [{}, {}]",
            r.bracket.0.render(),
            r.bracket.1.render()
        ),
    );
    push(&mut out, format!("verdict    {}", r.verdict.label()));
    if !r.flags.is_empty() {
        push(&mut out, format!("flags      {}", r.flags.join(", ")));
    }
    if !r.evidence.is_empty() {
        push(&mut out, "evidence".into());
        for e in &r.evidence {
            let value = e.value.as_ref().map(|v| v.render()).unwrap_or_default();
            push(&mut out, format!("  {:<8} {:<24} {}", e.kind.label(), e.tag, value));
        }
    }
    if !r.conditions.is_empty() {
        push(&mut out, "conditions".into());
        for c in &r.conditions {
            push(&mut out, format!("  {:<24} {}", c.tag, c.status.label()));
        }
    }
    out
}
