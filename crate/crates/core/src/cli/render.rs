use std::fmt::Write as _;

use serde::Serialize;

use super::{Cell, Report};
use crate::engine::PointStatus;
use crate::jets::Scalar;

/// Digits shown in markdown tables.
pub const MARKDOWN_DIGITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Markdown,
    Csv,
    Json,
}

/// `x` rounded to `digits` significant digits, in plain notation for
/// moderate magnitudes and scientific notation otherwise.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    // round first so that 9.999996 becomes 10 before choosing a layout
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn format_scalar(x: Scalar, digits: usize) -> String {
    match x {
        Scalar::Real(r) => format_significant(r, digits),
        Scalar::Complex(c) => {
            let sign = if c.im.is_sign_negative() { '-' } else { '+' };
            format!(
                "{}{sign}{}i",
                format_significant(c.re, digits),
                format_significant(c.im.abs(), digits)
            )
        }
    }
}

fn status_name(cell: &Cell) -> &'static str {
    match cell {
        Cell::Value {
            status: PointStatus::Ok,
            ..
        } => "ok",
        Cell::Value {
            status: PointStatus::Converged,
            ..
        } => "converged",
        Cell::Value {
            status: PointStatus::Diverged,
            ..
        } => "diverged",
        Cell::Indeterminate => "indeterminate",
        Cell::Blank => "blank",
    }
}

pub fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Markdown => markdown(report),
        OutputFormat::Csv => csv(report),
        OutputFormat::Json => json(report),
    }
}

fn markdown(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Problem `{}`, x0 = {}\n",
        report.problem,
        format_scalar(report.x0, MARKDOWN_DIGITS)
    );
    let header: Vec<String> = report.columns.iter().map(|c| c.method.to_string()).collect();
    let _ = writeln!(out, "| n | {} |", header.join(" | "));
    let _ = writeln!(out, "|---|{}", "---|".repeat(header.len()));
    for n in 0..report.rows() {
        let cells: Vec<String> = report
            .columns
            .iter()
            .map(|c| match c.cells[n] {
                Cell::Value { value, .. } => format_scalar(value, MARKDOWN_DIGITS),
                Cell::Indeterminate => "Indeterminate".to_string(),
                Cell::Blank => String::new(),
            })
            .collect();
        let _ = writeln!(out, "| {n} | {} |", cells.join(" | "));
    }
    out.push('\n');
    for c in &report.columns {
        let _ = writeln!(out, "- {}: {}", c.method, c.stop_reason);
    }
    out
}

fn csv(report: &Report) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["n", "method", "re", "im", "status"])
        .expect("writing to memory");
    for c in &report.columns {
        let method = c.method.to_string();
        for (n, cell) in c.cells.iter().enumerate() {
            let (re, im) = match cell {
                Cell::Value { value, .. } => (value.re().to_string(), value.im().to_string()),
                Cell::Indeterminate => (String::new(), String::new()),
                Cell::Blank => continue,
            };
            writer
                .write_record([n.to_string(), method.clone(), re, im, status_name(cell).to_string()])
                .expect("writing to memory");
        }
    }
    String::from_utf8(writer.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
}

#[derive(Serialize)]
struct JsonRow {
    n: usize,
    re: Option<f64>,
    im: Option<f64>,
    status: &'static str,
}

#[derive(Serialize)]
struct JsonColumn<'a> {
    problem: &'a str,
    method: String,
    rows: Vec<JsonRow>,
    stop_reason: &'a str,
}

fn json(report: &Report) -> String {
    let columns: Vec<JsonColumn> = report
        .columns
        .iter()
        .map(|c| JsonColumn {
            problem: &report.problem,
            method: c.method.to_string(),
            rows: c
                .cells
                .iter()
                .enumerate()
                .filter(|(_, cell)| **cell != Cell::Blank)
                .map(|(n, cell)| {
                    let value = match cell {
                        Cell::Value { value, .. } => Some(*value),
                        _ => None,
                    };
                    JsonRow {
                        n,
                        re: value.map(|v| v.re()),
                        im: value.map(|v| v.im()),
                        status: status_name(cell),
                    }
                })
                .collect(),
            stop_reason: &c.stop_reason,
        })
        .collect();
    serde_json::to_string_pretty(&columns).expect("report serializes")
}
