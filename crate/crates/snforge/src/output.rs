//! Report rendering.
//!
//! Text form, one item per line:
//!
//! ```text
//! command certify sn-lower
//! claim detector verdict pass evidence -4.1e-2 tol 1e-9
//! result bound 4
//! note ...
//! table trials index witness
//! row 0 -9.8e-1
//! ```
//!
//! Floats use Rust's shortest round-trip exponent form, so identical inputs
//! give identical bytes.

use serde_json::{json, Value};
use snforge_core::certificates::CertificateReport;
use std::fmt::Write as _;

/// Per-trial values, rendered as `row` lines or as CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Integral values below 2^53 print as integers, everything else in
/// shortest round-trip exponent form.
pub fn num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 9.007_199_254_740_992e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:e}")
    }
}

/// Everything a command prints.
#[derive(Clone, Debug, Default)]
pub struct Output {
    pub command: String,
    pub report: CertificateReport,
    pub tables: Vec<Table>,
}

impl Output {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Self::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.report.all_pass()
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command {}", self.command);
        for c in &self.report.claims {
            let verdict = if c.verdict { "pass" } else { "fail" };
            let _ = writeln!(
                s,
                "claim {} verdict {verdict} evidence {} tol {}",
                c.name,
                num(c.evidence),
                num(c.tolerance)
            );
        }
        for q in &self.report.quantities {
            let _ = writeln!(s, "result {} {}", q.key, num(q.value));
        }
        for n in &self.report.notes {
            let _ = writeln!(s, "note {n}");
        }
        for t in &self.tables {
            let _ = writeln!(s, "table {} {}", t.name, t.header.join(" "));
            for r in &t.rows {
                let _ = writeln!(s, "row {}", r.join(" "));
            }
        }
        let _ = writeln!(s, "status {}", if self.passed() { "pass" } else { "fail" });
        s
    }

    pub fn to_json(&self) -> Value {
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| json!({ "name": t.name, "header": t.header, "rows": t.rows }))
            .collect();
        json!({
            "command": self.command,
            "claims": self.report.claims,
            "quantities": self.report.quantities,
            "notes": self.report.notes,
            "tables": tables,
            "status": if self.passed() { "pass" } else { "fail" },
        })
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_lines() {
        let mut o = Output::new("certify sn-lower");
        o.report.claim("detector", true, -0.04, 1e-9, "detector");
        o.report.quantity("bound", 4.0);
        o.report.note("hello world");
        let mut t = Table::new("trials", &["index", "value"]);
        t.push(vec!["0".into(), num(0.5)]);
        o.tables.push(t);
        let text = o.render_text();
        assert_eq!(
            text,
            "command certify sn-lower\n\
             claim detector verdict pass evidence -4e-2 tol 1e-9\n\
             result bound 4\n\
             note hello world\n\
             table trials index value\n\
             row 0 5e-1\n\
             status pass\n"
        );
        let j = o.to_json();
        assert_eq!(j["claims"][0]["name"], "detector");
        assert_eq!(j["status"], "pass");
        assert_eq!(o.tables[0].to_csv(), "index,value\n0,5e-1\n");
    }
}
