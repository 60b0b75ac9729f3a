//! Classification report outputs: per-person CSV, ROC plot, text summary.

use std::fmt::Write;

use crate::classify::{LoocvReport, RocCurve};

use super::FeatureTable;

/// `personId,outcome,predicted,score,correct`
pub fn predictions_csv(report: &LoocvReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["personId", "outcome", "predicted", "score", "correct"])
        .expect("in-memory write");
    for p in &report.per_person {
        w.write_record([
            p.person_id.to_string(),
            p.true_label.to_string(),
            p.predicted.to_string(),
            p.score.to_string(),
            p.is_correct().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8")
}

const ORIGIN_X: f64 = 40.0;
const ORIGIN_Y: f64 = 340.0;
const SIDE: f64 = 300.0;

fn px(fpr: f64) -> f64 {
    ORIGIN_X + fpr * SIDE
}

fn py(tpr: f64) -> f64 {
    ORIGIN_Y - tpr * SIDE
}

/// ROC plot with a fixed element structure: `#x-axis`, `#y-axis`,
/// `#unit-square`, `#chance`, `#roc` (staircase polyline through every
/// curve point) and `#auc`.
pub fn roc_svg(roc: &RocCurve, auc: f64, title: &str) -> String {
    let points = roc
        .points
        .iter()
        .map(|p| format!("{},{}", px(p.fpr), py(p.tpr)))
        .collect::<Vec<_>>()
        .join(" ");
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="380" height="380" viewBox="0 0 380 380">"#
    );
    let _ = writeln!(s, r#"  <title>{}</title>"#, escape(title));
    let _ = writeln!(
        s,
        r#"  <rect id="unit-square" x="{}" y="{}" width="{SIDE}" height="{SIDE}" fill="none" stroke="silver"/>"#,
        px(0.0),
        py(1.0)
    );
    let _ = writeln!(
        s,
        r#"  <line id="x-axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        px(0.0),
        py(0.0),
        px(1.0),
        py(0.0)
    );
    let _ = writeln!(
        s,
        r#"  <line id="y-axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        px(0.0),
        py(0.0),
        px(0.0),
        py(1.0)
    );
    let _ = writeln!(
        s,
        r#"  <line id="chance" x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="4 4"/>"#,
        px(0.0),
        py(0.0),
        px(1.0),
        py(1.0)
    );
    let _ = writeln!(
        s,
        r#"  <polyline id="roc" points="{points}" fill="none" stroke="steelblue" stroke-width="2"/>"#
    );
    let _ = writeln!(
        s,
        r#"  <text x="{}" y="{}" text-anchor="middle">false positive rate</text>"#,
        px(0.5),
        ORIGIN_Y + 30.0
    );
    let _ = writeln!(
        s,
        r#"  <text x="12" y="{}" text-anchor="middle" transform="rotate(-90 12 {})">true positive rate</text>"#,
        py(0.5),
        py(0.5)
    );
    let _ = writeln!(
        s,
        r#"  <text id="auc" x="{}" y="{}" text-anchor="end">AUC = {auc:.4}</text>"#,
        px(1.0) - 8.0,
        py(0.0) - 10.0
    );
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn summary(report: &LoocvReport) -> String {
    let mis = report.misclassified();
    let ids = if mis.is_empty() {
        "none".to_owned()
    } else {
        mis.iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!(
        "method: {} (scaling: {})\naccuracy: {}/{} = {:.1}%\nmisclassified: {}\nAUC: {:.4}\n",
        report.trainer.method.name(),
        report.trainer.scaling,
        report.correct,
        report.per_person.len(),
        100.0 * report.accuracy,
        ids,
        report.auc
    )
}

/// Fixed-width table of a feature table, one row per person.
pub fn feature_summary(table: &FeatureTable) -> String {
    let mut s = format!(
        "{:>8} {:>10} {:>8} {:>8} {:>7}\n",
        "personId", "L", "H", "outcome", "strides"
    );
    for r in table.rows() {
        let _ = writeln!(
            s,
            "{:>8} {:>10.1} {:>8.1} {:>8} {:>7}",
            r.person_id,
            r.stride_length,
            r.head_range,
            r.outcome.as_str(),
            r.stride_count
        );
    }
    let falls = table.rows().iter().filter(|r| r.outcome.is_fall()).count();
    let _ = writeln!(
        s,
        "{} persons: {} Fall, {} NoFall",
        table.len(),
        falls,
        table.len() - falls
    );
    s
}
