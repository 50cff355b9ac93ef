//! JSON and CSV rendering. CSV documents with several tables separate them
//! by a blank line; each table starts with a header row.

use clap::ValueEnum;
use divquad::quadnd::IntegralReport;
use serde::Serialize;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
pub struct TableRow {
    pub k: usize,
    pub branch_1: f64,
    pub branch_2: f64,
}

#[derive(Serialize)]
pub struct RuleDoc {
    pub rule: String,
    pub order: usize,
    pub coeff_a: Vec<f64>,
    pub coeff_b: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

#[derive(Serialize)]
pub struct Quad1dDoc {
    #[serde(rename = "gamma5", skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<TableRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleDoc>,
}

#[derive(Serialize)]
pub struct VerifyRow {
    pub identity: &'static str,
    pub cases: usize,
    pub checks: usize,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct VerifyDoc {
    pub seed: u64,
    pub tolerance: f64,
    pub pass: bool,
    pub identities: Vec<VerifyRow>,
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<impl ToString>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn json<T: Serialize>(doc: &T) {
    emit(&serde_json::to_string_pretty(doc).expect("documents serialize"));
}

fn csv(sections: &[Vec<String>]) {
    let text: Vec<String> = sections.iter().map(|rows| rows.join("\n")).collect();
    emit(&text.join("\n\n"));
}

// a closed pipe (e.g. `| head`) is not an error worth a panic
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

impl Format {
    pub fn print_scalar(self, name: &str, value: f64) {
        match self {
            Format::Json => json(&serde_json::json!({ name: value })),
            Format::Csv => csv(&[vec![name.to_string(), num(value)]]),
        }
    }

    pub fn print_vector(self, name: &str, v: &[f64]) {
        match self {
            Format::Json => json(&serde_json::json!({ name: v })),
            Format::Csv => {
                let header: Vec<String> = (0..v.len()).map(|i| format!("x{i}")).collect();
                let row: Vec<String> = v.iter().map(|&x| num(x)).collect();
                csv(&[vec![header.join(","), row.join(",")]]);
            }
        }
    }

    pub fn print_report(self, r: &IntegralReport) {
        match self {
            Format::Json => json(r),
            Format::Csv => {
                let method = serde_json::to_value(r.method).expect("method serializes");
                let summary = vec![
                    "value,method,truncation_order,oracle_value,abs_error".to_string(),
                    format!(
                        "{},{},{},{},{}",
                        num(r.value),
                        method.as_str().unwrap_or_default(),
                        opt(r.truncation_order),
                        opt(r.oracle_value.map(num)),
                        opt(r.abs_error.map(num)),
                    ),
                ];
                let mut facets = vec!["facet,contribution".to_string()];
                facets.extend(r.facet_contributions.iter().enumerate().map(|(i, &c)| format!("{i},{}", num(c))));
                csv(&[summary, facets]);
            }
        }
    }

    pub fn print_quad1d(self, doc: &Quad1dDoc) {
        match self {
            Format::Json => json(doc),
            Format::Csv => {
                let mut sections = Vec::new();
                if let Some(rows) = &doc.table {
                    let mut s = vec!["k,branch_1,branch_2".to_string()];
                    s.extend(rows.iter().map(|r| format!("{},{},{}", r.k, num(r.branch_1), num(r.branch_2))));
                    sections.push(s);
                }
                if let Some(rule) = &doc.rule {
                    let mut s = vec!["rule,k,coeff_a,coeff_b".to_string()];
                    s.extend(
                        rule.coeff_a
                            .iter()
                            .zip(&rule.coeff_b)
                            .enumerate()
                            .map(|(k, (a, b))| format!("{},{k},{},{}", rule.rule, num(*a), num(*b))),
                    );
                    sections.push(s);
                    if let (Some(a), Some(b), Some(v)) = (rule.a, rule.b, rule.value) {
                        sections.push(vec![
                            "rule,a,b,value".to_string(),
                            format!("{},{},{},{}", rule.rule, num(a), num(b), num(v)),
                        ]);
                    }
                }
                csv(&sections);
            }
        }
    }

    pub fn print_verify(self, doc: &VerifyDoc) {
        match self {
            Format::Json => json(doc),
            Format::Csv => {
                let mut s = vec!["identity,cases,checks,max_residual,pass".to_string()];
                s.extend(doc.identities.iter().map(|r| {
                    format!("{},{},{},{},{}", r.identity, r.cases, r.checks, num(r.max_residual), r.pass)
                }));
                csv(&[s]);
            }
        }
    }
}
