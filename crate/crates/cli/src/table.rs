//! Text and JSON renderings of evaluation results. JSON numbers carry the
//! same two-decimal rounding as the text tables.

use std::fmt::Write;

use maskprop::compare::Comparison;
use maskprop::eval::{format_increment, format_percent, LabelStats};
use serde_json::{json, Value};

pub fn class_names(given: &[String], n: usize) -> Vec<String> {
    (0..n.max(given.len()))
        .map(|i| given.get(i).cloned().unwrap_or_else(|| format!("class{i}")))
        .collect()
}

fn pct(fraction: f64) -> f64 {
    format_percent(fraction).parse().expect("formatted number")
}

fn rounded(percent: f64) -> f64 {
    format!("{percent:.2}").parse().expect("formatted number")
}

fn per_class_json(names: &[String], stats: &LabelStats) -> Value {
    names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            json!({
                "class": name,
                "accuracy": stats.per_class.get(i).copied().flatten().map(pct),
            })
        })
        .collect()
}

fn cell(acc: Option<f64>) -> String {
    acc.map_or_else(|| "-".to_string(), format_percent)
}

pub fn eval_json(names: &[String], stats: &LabelStats, increment: Option<f64>) -> Value {
    let mut doc = json!({
        "per_class": per_class_json(names, stats),
        "avg_accuracy": pct(stats.avg_accuracy),
        "coverage": pct(stats.coverage),
        "total_correct": stats.total_correct,
        "total_labeled": stats.total_labeled,
    });
    if let Some(inc) = increment {
        doc["total_increment"] = json!(rounded(inc));
    }
    doc
}

pub fn eval_text(names: &[String], stats: &LabelStats, increment: Option<f64>) -> String {
    let width = names.iter().map(String::len).max().unwrap_or(0).max(13);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>8}", "class", "acc (%)");
    for (i, name) in names.iter().enumerate() {
        let acc = stats.per_class.get(i).copied().flatten();
        let _ = writeln!(out, "{name:<width$}  {:>8}", cell(acc));
    }
    let _ = writeln!(
        out,
        "{:<width$}  {:>8}",
        "Avg. Acc.",
        format_percent(stats.avg_accuracy)
    );
    let _ = writeln!(
        out,
        "{:<width$}  {:>8}",
        "Coverage (%)",
        format_percent(stats.coverage)
    );
    let _ = writeln!(
        out,
        "{:<width$}  {:>8}",
        "Total correct", stats.total_correct
    );
    if let Some(inc) = increment {
        let _ = writeln!(
            out,
            "{:<width$}  {:>8}",
            "Total Inc.",
            format_increment(inc)
        );
    }
    out
}

pub fn compare_json(names: &[String], c: &Comparison) -> Value {
    let rows: Vec<Value> = c
        .rows
        .iter()
        .map(|r| {
            json!({
                "method": r.name,
                "per_class": per_class_json(names, &r.stats),
                "avg_accuracy": pct(r.stats.avg_accuracy),
                "coverage": pct(r.stats.coverage),
                "total_correct": r.stats.total_correct,
                "total_labeled": r.stats.total_labeled,
                "total_increment": r.total_increment.map(rounded),
            })
        })
        .collect();
    let scenes: Vec<Value> = c
        .scenes
        .iter()
        .map(|s| {
            json!({
                "scene_id": s.scene_id,
                "accuracy": c.rows.iter().zip(&s.accuracy)
                    .map(|(r, a)| json!({"method": r.name, "accuracy": a.map(pct)}))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "rows": rows, "scenes": scenes })
}

pub fn compare_text(names: &[String], c: &Comparison) -> String {
    let method_w = c
        .rows
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(0)
        .max(6);
    let mut headers: Vec<String> = names.to_vec();
    headers.push("Avg. Acc.".into());
    headers.push("Total Inc.".into());
    let widths: Vec<usize> = headers.iter().map(|h| h.len().max(7)).collect();

    let mut out = String::new();
    let _ = write!(out, "{:<method_w$}", "Method");
    for (h, w) in headers.iter().zip(&widths) {
        let _ = write!(out, "  {h:>w$}");
    }
    out.push('\n');
    for r in &c.rows {
        let mut cells: Vec<String> = (0..names.len())
            .map(|i| cell(r.stats.per_class.get(i).copied().flatten()))
            .collect();
        cells.push(format_percent(r.stats.avg_accuracy));
        cells.push(
            r.total_increment
                .map_or_else(|| "-".into(), format_increment),
        );
        let _ = write!(out, "{:<method_w$}", r.name);
        for (v, w) in cells.iter().zip(&widths) {
            let _ = write!(out, "  {v:>w$}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "scenes: {}", c.scenes.len());
    out
}
