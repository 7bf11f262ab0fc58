use std::fmt::Write;

use super::{AuditReport, CategoryRow, ExposureReport, LinkageReport};

fn title(category: &str) -> String {
    let mut c = category.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn reduction_cell(row: &CategoryRow) -> String {
    match row.reduction {
        Some(r) => format!("{r:.2}x"),
        None => "—".to_string(),
    }
}

/// Aligned plain-text identifier table: Identifier, Full %, Frag %, Reduction.
pub fn render_identifier_table(report: &AuditReport) -> String {
    let rows: Vec<[String; 4]> = report
        .categories
        .iter()
        .chain(std::iter::once(&report.all))
        .map(|r| {
            [
                title(&r.category),
                format!("{:.4}", r.full_pct),
                format!("{:.4}", r.frag_pct),
                reduction_cell(r),
            ]
        })
        .collect();
    let header = ["Identifier", "Full %", "Frag %", "Reduction"];
    let mut widths = header.map(|h| h.chars().count());
    for r in &rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: [&str; 4]| {
        let mut s = format!("{:<w$}", cells[0], w = widths[0]);
        for (cell, w) in cells[1..].iter().zip(&widths[1..]) {
            // right-align numbers; pad by char count so the em dash lines up
            let pad = w - cell.chars().count();
            s.push_str("  ");
            s.push_str(&" ".repeat(pad));
            s.push_str(cell);
        }
        s.push('\n');
        s
    };
    let mut out = line(header);
    let rule_len = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    out.push_str(&"-".repeat(rule_len));
    out.push('\n');
    let last = rows.len() - 1;
    for (i, r) in rows.iter().enumerate() {
        if i == last {
            out.push_str(&"-".repeat(rule_len));
            out.push('\n');
        }
        out.push_str(&line([&r[0], &r[1], &r[2], &r[3]]));
    }
    out
}

pub fn render_linkage_table(report: &LinkageReport) -> String {
    let mut out = String::new();
    writeln!(out, "examples            {}", report.n_examples).unwrap();
    writeln!(out, "parts               {}", report.n_parts).unwrap();
    writeln!(out, "min k               {}", report.min_k).unwrap();
    writeln!(out, "parts with k = 1    {:.2}%", report.pct_k1).unwrap();
    writeln!(out, "example link rate   {:.2}%", report.example_link_rate).unwrap();
    writeln!(out, "intersection rate   {:.2}%", report.intersection_rate).unwrap();
    writeln!(out, "k histogram").unwrap();
    for (k, n) in &report.k_histogram {
        writeln!(out, "  k = {k:<6} {n}").unwrap();
    }
    out
}

pub fn render_exposure_table(report: &ExposureReport) -> String {
    let mut out = String::new();
    writeln!(out, "parts               {}", report.n_parts).unwrap();
    for (c, v) in &report.categories {
        writeln!(out, "{:<20}{:.4}", title(c), v).unwrap();
    }
    out
}
