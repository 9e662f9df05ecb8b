//! Report assembly and emission. One report per invocation; json is the
//! lossless form, csv flattens tables row per residue, text summarizes.

use qdiag_core::cantor::{residue_to_word, Residue};
use qdiag_core::diagonal::DiagonalUnitary;
use qdiag_core::extend::{ExtensionCertificate, Obstruction};
use qdiag_core::phase::Phase;
use serde::{Deserialize, Serialize};

use crate::dynamics::DynamicsStats;
use crate::sweep::SweepOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Per-relation summary from the window oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationSummary {
    pub name: String,
    pub safe_count: u64,
    pub mismatches: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifySummary {
    pub window: i64,
    /// None in word mode, where there is no certificate to recompute.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_consistent: Option<bool>,
    pub relations: Vec<RelationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structural_checked: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structural_violations: Option<usize>,
}

/// Field order is fixed; serializing the same report twice is byte-stable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub elapsed_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ExtensionCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<Obstruction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<DiagonalUnitary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image_witness: Option<Phase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepOutcome>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Report {
        Report {
            command: command.into(),
            elapsed_ms: 0,
            verdict: None,
            certificate: None,
            obstruction: None,
            table: None,
            image_witness: None,
            verify: None,
            dynamics: None,
            sweep: None,
        }
    }
}

pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut out = serde_json::to_string_pretty(report).expect("report serializes");
            out.push('\n');
            out
        }
        Format::Csv => emit_csv(report),
        Format::Text => emit_text(report),
    }
}

fn csv_row(out: &mut String, section: &str, key: &str, residue: &str, word: &str, value: &str) {
    out.push_str(&format!("{section},{key},{residue},{word},{value}\n"));
}

fn csv_table(out: &mut String, section: &str, d: &DiagonalUnitary) {
    csv_row(out, section, "level", "", "", &d.level().to_string());
    for (r, phase) in d.entries().iter().enumerate() {
        let word = residue_to_word(&Residue {
            value: r as u64,
            level: d.level(),
        });
        csv_row(
            out,
            section,
            "entry",
            &r.to_string(),
            &word.to_string(),
            &format!("{phase};angle={}", phase.radians()),
        );
    }
}

fn emit_csv(report: &Report) -> String {
    let mut out = String::from("section,key,residue,word,value\n");
    csv_row(&mut out, "report", "command", "", "", &report.command);
    csv_row(
        &mut out,
        "report",
        "elapsed_ms",
        "",
        "",
        &report.elapsed_ms.to_string(),
    );
    if let Some(v) = &report.verdict {
        csv_row(&mut out, "report", "verdict", "", "", v);
    }
    if let Some(cert) = &report.certificate {
        csv_row(&mut out, "certificate", "gauge", "", "", &cert.gauge.to_string());
        csv_table(&mut out, "certificate.inner", &cert.inner);
        csv_table(&mut out, "certificate.check", &cert.check);
    }
    if let Some(ob) = &report.obstruction {
        match ob {
            Obstruction::PointSpectrumMismatch { d0, dm1 } => {
                csv_row(&mut out, "obstruction", "kind", "", "", "point_spectrum_mismatch");
                csv_row(&mut out, "obstruction", "d0", "", "", &d0.to_string());
                csv_row(&mut out, "obstruction", "dm1", "", "", &dm1.to_string());
            }
            Obstruction::CocycleObstruction { cycle, product } => {
                csv_row(&mut out, "obstruction", "kind", "", "", "cocycle_obstruction");
                for r in cycle {
                    csv_row(&mut out, "obstruction", "cycle", &r.to_string(), "", "");
                }
                csv_row(&mut out, "obstruction", "product", "", "", &product.to_string());
            }
        }
    }
    if let Some(t) = &report.table {
        csv_table(&mut out, "table", t);
    }
    if let Some(w) = &report.image_witness {
        csv_row(&mut out, "report", "image_witness", "", "", &w.to_string());
    }
    if let Some(v) = &report.verify {
        csv_row(&mut out, "verify", "window", "", "", &v.window.to_string());
        if let Some(c) = v.certificate_consistent {
            csv_row(&mut out, "verify", "certificate_consistent", "", "", &c.to_string());
        }
        for rel in &v.relations {
            csv_row(
                &mut out,
                "verify.relation",
                &rel.name,
                "",
                "",
                &format!("safe={};mismatches={}", rel.safe_count, rel.mismatches),
            );
        }
        if let (Some(checked), Some(violations)) = (v.structural_checked, v.structural_violations) {
            csv_row(
                &mut out,
                "verify",
                "structural",
                "",
                "",
                &format!("checked={checked};violations={violations}"),
            );
        }
    }
    if let Some(dy) = &report.dynamics {
        csv_row(&mut out, "dynamics", "level", "", "", &dy.level.to_string());
        csv_row(&mut out, "dynamics", "cylinder", "", "", &dy.cylinder);
        csv_row(&mut out, "dynamics", "steps_run", "", "", &dy.steps_run.to_string());
        if let Some(p) = dy.period {
            csv_row(&mut out, "dynamics", "period", "", "", &p.to_string());
        }
        csv_row(
            &mut out,
            "dynamics",
            "average",
            "",
            "",
            &format!("{}/{}", dy.average_num, dy.average_den),
        );
    }
    if let Some(sw) = &report.sweep {
        csv_row(&mut out, "sweep", "mode", "", "", &sw.mode);
        csv_row(&mut out, "sweep", "candidates", "", "", &sw.candidates.to_string());
        csv_row(&mut out, "sweep", "decided", "", "", &sw.decided.to_string());
        for (j, s) in sw.survivors.iter().enumerate() {
            csv_table(&mut out, &format!("survivor[{j}]"), s);
        }
    }
    out
}

fn emit_text(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("command: {}\n", report.command));
    out.push_str(&format!("elapsed_ms: {}\n", report.elapsed_ms));
    if let Some(v) = &report.verdict {
        out.push_str(&format!("verdict: {v}\n"));
    }
    if let Some(cert) = &report.certificate {
        out.push_str(&format!("gauge: {}\n", cert.gauge));
        out.push_str(&format!("inner: {}\n", cert.inner));
        out.push_str(&format!("check: {}\n", cert.check));
    }
    if let Some(ob) = &report.obstruction {
        match ob {
            Obstruction::PointSpectrumMismatch { d0, dm1 } => {
                out.push_str(&format!(
                    "obstruction: point spectrum mismatch, d(0) = {d0}, d(-1) = {dm1}\n"
                ));
            }
            Obstruction::CocycleObstruction { cycle, product } => {
                let cycle = cycle
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(" ");
                out.push_str(&format!("obstruction: witness cycle {cycle}\n"));
                out.push_str(&format!("cycle product: {product}\n"));
            }
        }
    }
    if let Some(t) = &report.table {
        out.push_str(&format!("table: {t}\n"));
    }
    if let Some(w) = &report.image_witness {
        out.push_str(&format!("image witness: {w}\n"));
    }
    if let Some(v) = &report.verify {
        out.push_str(&format!("window: {}\n", v.window));
        if let Some(c) = v.certificate_consistent {
            out.push_str(&format!("certificate consistent: {c}\n"));
        }
        for rel in &v.relations {
            out.push_str(&format!(
                "relation {}: safe {} mismatches {}\n",
                rel.name, rel.safe_count, rel.mismatches
            ));
        }
        if let (Some(checked), Some(violations)) = (v.structural_checked, v.structural_violations) {
            out.push_str(&format!(
                "structural: checked {checked} violations {violations}\n"
            ));
        }
    }
    if let Some(dy) = &report.dynamics {
        out.push_str(&format!("level: {}\n", dy.level));
        out.push_str(&format!("cylinder: {}\n", dy.cylinder));
        match dy.period {
            Some(p) => out.push_str(&format!("period: {p}\n")),
            None => out.push_str(&format!(
                "period: not reached within {} steps\n",
                dy.steps_run
            )),
        }
        out.push_str(&format!(
            "average: {}/{}\n",
            dy.average_num, dy.average_den
        ));
    }
    if let Some(sw) = &report.sweep {
        out.push_str(&format!("mode: {}\n", sw.mode));
        out.push_str(&format!("candidates: {}\n", sw.candidates));
        out.push_str(&format!("decided: {}\n", sw.decided));
        out.push_str(&format!("survivors: {}\n", sw.survivors.len()));
        for s in &sw.survivors {
            out.push_str(&format!("survivor: {s}\n"));
        }
    }
    out
}
