//! Serializable reports and their JSON, CSV and text renderings.

use std::fmt::Write as _;

use dirichlet_parity::model::{one_based_label, SpecFile};
use dirichlet_parity::oracles::SelfTestCase;
use dirichlet_parity::{
    ConvergenceVerdict, PartialSum, SeriesSpec, TermValue, Verdict, VerificationReport,
};
use num_complex::Complex64;
use serde::Serialize;

/// Complex number as decimal strings with 17 significant digits.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexOut {
    pub re: String,
    pub im: String,
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl From<Complex64> for ComplexOut {
    fn from(z: Complex64) -> Self {
        ComplexOut {
            re: num(z.re),
            im: num(z.im),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Parameters {
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "M_outer")]
    pub m_outer: u64,
    pub tol: String,
    pub threads: String,
    pub assert_convergence: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartialSumOut {
    pub value: ComplexOut,
    pub extrapolated: ComplexOut,
    pub extrapolation_error: Option<String>,
    #[serde(rename = "M")]
    pub m: u64,
    pub tail_estimate: String,
    pub slow: bool,
    pub terms_summed: u64,
}

impl From<&PartialSum> for PartialSumOut {
    fn from(p: &PartialSum) -> Self {
        PartialSumOut {
            value: p.value.into(),
            extrapolated: p.extrapolated.into(),
            extrapolation_error: p.extrapolation_error.map(num),
            m: p.m,
            tail_estimate: num(p.tail_estimate),
            slow: p.slow,
            terms_summed: p.terms_summed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TermOut {
    #[serde(rename = "J")]
    pub j: String,
    #[serde(rename = "I")]
    pub i: String,
    pub sign: i32,
    pub rho: Vec<String>,
    pub value_re: String,
    pub value_im: String,
    pub tail: String,
    pub truncated: ComplexOut,
}

impl From<&TermValue> for TermOut {
    fn from(t: &TermValue) -> Self {
        TermOut {
            j: one_based_label(&t.ctx.j),
            i: one_based_label(&t.ctx.i),
            sign: t.sign,
            rho: t.rho.iter().map(|v| v.to_string()).collect(),
            value_re: num(t.sum.extrapolated.re),
            value_im: num(t.sum.extrapolated.im),
            tail: num(t.sum.uncertainty()),
            truncated: t.sum.value.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LhsOut {
    pub zeta_plus_y: PartialSumOut,
    pub zeta_minus_y: PartialSumOut,
    pub sign: i32,
    pub combination: ComplexOut,
}

#[derive(Debug, Clone, Serialize)]
pub struct RhsOut {
    pub total: ComplexOut,
    pub truncated_total: ComplexOut,
    pub uncertainty: String,
    #[serde(rename = "per_J")]
    pub per_j: Vec<TermOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorollaryOut {
    pub re_zeta: String,
    pub half_rhs: String,
    pub residual: String,
    pub verdict: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOut {
    pub spec: SpecFile,
    pub parameters: Parameters,
    pub convergence: ConvergenceVerdict,
    pub lhs: LhsOut,
    pub rhs: RhsOut,
    pub residual: String,
    pub truncated_residual: String,
    pub slack: String,
    pub parity: &'static str,
    pub corollary: Option<CorollaryOut>,
    pub verdict: &'static str,
}

impl VerifyOut {
    pub fn new(report: &VerificationReport, parameters: Parameters) -> Self {
        VerifyOut {
            spec: SpecFile::from_spec(&report.spec),
            parameters,
            convergence: report.convergence.clone(),
            lhs: LhsOut {
                zeta_plus_y: (&report.lhs_plus).into(),
                zeta_minus_y: (&report.lhs_minus).into(),
                sign: report.lhs_sign,
                combination: report.lhs.into(),
            },
            rhs: RhsOut {
                total: report.rhs.total.into(),
                truncated_total: report.rhs.truncated.into(),
                uncertainty: num(report.rhs.uncertainty),
                per_j: report.rhs.terms.iter().map(TermOut::from).collect(),
            },
            residual: num(report.residual),
            truncated_residual: num(report.truncated_residual),
            slack: num(report.slack),
            parity: match report.parity {
                dirichlet_parity::ParityCase::Same => "same",
                dirichlet_parity::ParityCase::Different => "different",
            },
            corollary: report.corollary.map(|c| CorollaryOut {
                re_zeta: num(c.re_zeta),
                half_rhs: num(c.half_rhs),
                residual: num(c.residual),
                verdict: c.verdict.as_str(),
            }),
            verdict: report.verdict.as_str(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateOut {
    pub spec: SpecFile,
    pub r: usize,
    pub ell: usize,
    pub weight: u32,
    pub max_row_sum: u32,
    pub convergence: ConvergenceVerdict,
}

impl ValidateOut {
    pub fn new(spec: &SeriesSpec, convergence: ConvergenceVerdict) -> Self {
        ValidateOut {
            spec: SpecFile::from_spec(spec),
            r: spec.r(),
            ell: spec.ell(),
            weight: spec.weight(),
            max_row_sum: spec.max_row_sum(),
            convergence,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalOut {
    pub spec: SpecFile,
    pub parameters: Parameters,
    pub zeta: PartialSumOut,
}

#[derive(Debug, Clone, Serialize)]
pub struct DSample {
    pub outer: Vec<u64>,
    #[serde(rename = "D")]
    pub d: ComplexOut,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReduceTerm {
    #[serde(flatten)]
    pub term: TermOut,
    pub bases: usize,
    pub d_samples: Vec<DSample>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReduceOut {
    pub spec: SpecFile,
    pub parameters: Parameters,
    pub parity: &'static str,
    #[serde(rename = "per_J")]
    pub per_j: Vec<ReduceTerm>,
    pub half_total: ComplexOut,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfTestOut {
    pub cases: Vec<SelfTestCaseOut>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfTestCaseOut {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl From<&SelfTestCase> for SelfTestCaseOut {
    fn from(c: &SelfTestCase) -> Self {
        SelfTestCaseOut {
            name: c.name.clone(),
            passed: c.passed,
            detail: c.detail.clone(),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_row(out: &mut String, fields: &[&str]) {
    let row: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

fn spec_line(spec: &SpecFile) -> String {
    let y: Vec<String> = spec
        .y
        .iter()
        .flatten()
        .map(|e| match e {
            dirichlet_parity::model::TwistEntry::Text(s) => s.clone(),
            dirichlet_parity::model::TwistEntry::Int(v) => v.to_string(),
        })
        .collect();
    format!("A={:?} h={:?} k={:?} y=[{}]", spec.a, spec.h, spec.k, y.join(", "))
}

fn partial_text(out: &mut String, label: &str, p: &PartialSumOut) {
    let _ = writeln!(
        out,
        "{label}: {} {} (M={}, truncated {} {}, extrapolation error {}, tail {}{})",
        p.extrapolated.re,
        p.extrapolated.im,
        p.m,
        p.value.re,
        p.value.im,
        p.extrapolation_error.as_deref().unwrap_or("n/a"),
        p.tail_estimate,
        if p.slow { ", slow" } else { "" }
    );
}

pub trait Render: Serialize {
    fn csv(&self) -> String;
    fn text(&self) -> String;
}

impl Render for ValidateOut {
    fn csv(&self) -> String {
        let mut out = String::new();
        csv_row(&mut out, &["field", "value"]);
        csv_row(&mut out, &["spec", &spec_line(&self.spec)]);
        csv_row(&mut out, &["r", &self.r.to_string()]);
        csv_row(&mut out, &["ell", &self.ell.to_string()]);
        csv_row(&mut out, &["weight", &self.weight.to_string()]);
        csv_row(&mut out, &["convergence", &self.convergence.status.to_string()]);
        csv_row(&mut out, &["detail", &self.convergence.detail]);
        out
    }

    fn text(&self) -> String {
        format!(
            "valid spec: {}\nr={} ell={} weight={} max row sum={}\nconvergence: {} ({})\n",
            spec_line(&self.spec),
            self.r,
            self.ell,
            self.weight,
            self.max_row_sum,
            self.convergence.status,
            self.convergence.detail
        )
    }
}

impl Render for EvalOut {
    fn csv(&self) -> String {
        let mut out = String::new();
        csv_row(
            &mut out,
            &["M", "value_re", "value_im", "extrapolated_re", "extrapolated_im", "extrapolation_error", "tail_estimate", "slow", "terms_summed"],
        );
        let z = &self.zeta;
        csv_row(
            &mut out,
            &[
                &z.m.to_string(),
                &z.value.re,
                &z.value.im,
                &z.extrapolated.re,
                &z.extrapolated.im,
                z.extrapolation_error.as_deref().unwrap_or(""),
                &z.tail_estimate,
                &z.slow.to_string(),
                &z.terms_summed.to_string(),
            ],
        );
        out
    }

    fn text(&self) -> String {
        let mut out = format!("spec: {}\n", spec_line(&self.spec));
        partial_text(&mut out, "zeta", &self.zeta);
        out
    }
}

impl Render for VerifyOut {
    fn csv(&self) -> String {
        let mut out = String::new();
        csv_row(&mut out, &["quantity", "J", "I", "re", "im", "uncertainty"]);
        let z = &self.lhs.zeta_plus_y;
        csv_row(&mut out, &["zeta(y)", "", "", &z.extrapolated.re, &z.extrapolated.im, z.extrapolation_error.as_deref().unwrap_or(&z.tail_estimate)]);
        let z = &self.lhs.zeta_minus_y;
        csv_row(&mut out, &["zeta(-y)", "", "", &z.extrapolated.re, &z.extrapolated.im, z.extrapolation_error.as_deref().unwrap_or(&z.tail_estimate)]);
        csv_row(&mut out, &["lhs", "", "", &self.lhs.combination.re, &self.lhs.combination.im, ""]);
        for t in &self.rhs.per_j {
            csv_row(&mut out, &["T", &t.j, &t.i, &t.value_re, &t.value_im, &t.tail]);
        }
        csv_row(&mut out, &["rhs", "", "", &self.rhs.total.re, &self.rhs.total.im, &self.rhs.uncertainty]);
        csv_row(&mut out, &["residual", "", "", &self.residual, "", &self.slack]);
        if let Some(c) = &self.corollary {
            csv_row(&mut out, &["corollary_residual", "", "", &c.residual, "", c.verdict]);
        }
        csv_row(&mut out, &["verdict", "", "", self.verdict, "", ""]);
        out
    }

    fn text(&self) -> String {
        let mut out = format!(
            "spec: {}\nM={} M_outer={} tol={}\nconvergence: {} ({})\n",
            spec_line(&self.spec),
            self.parameters.m,
            self.parameters.m_outer,
            self.parameters.tol,
            self.convergence.status,
            self.convergence.detail
        );
        partial_text(&mut out, "zeta(y)", &self.lhs.zeta_plus_y);
        partial_text(&mut out, "zeta(-y)", &self.lhs.zeta_minus_y);
        let _ = writeln!(
            out,
            "lhs = zeta(y) {} zeta(-y) = {} {}",
            if self.lhs.sign > 0 { "+" } else { "-" },
            self.lhs.combination.re,
            self.lhs.combination.im
        );
        for t in &self.rhs.per_j {
            let _ = writeln!(out, "T J={} I={}: {} {} (+/- {})", t.j, t.i, t.value_re, t.value_im, t.tail);
        }
        let _ = writeln!(out, "rhs = {} {} (+/- {})", self.rhs.total.re, self.rhs.total.im, self.rhs.uncertainty);
        let _ = writeln!(out, "residual {} (truncated sums {}), slack {}", self.residual, self.truncated_residual, self.slack);
        if let Some(c) = &self.corollary {
            let _ = writeln!(out, "Re zeta {} vs rhs/2 {}: residual {} [{}]", c.re_zeta, c.half_rhs, c.residual, c.verdict);
        }
        let _ = writeln!(out, "parity: {}\nverdict: {}", self.parity, self.verdict);
        out
    }
}

impl Render for ReduceOut {
    fn csv(&self) -> String {
        let mut out = String::new();
        csv_row(&mut out, &["J", "I", "sign", "T_re", "T_im", "uncertainty", "outer", "D_re", "D_im"]);
        for t in &self.per_j {
            for s in &t.d_samples {
                let outer: Vec<String> = s.outer.iter().map(u64::to_string).collect();
                csv_row(
                    &mut out,
                    &[&t.term.j, &t.term.i, &t.term.sign.to_string(), &t.term.value_re, &t.term.value_im, &t.term.tail, &outer.join(" "), &s.d.re, &s.d.im],
                );
            }
        }
        out
    }

    fn text(&self) -> String {
        let mut out = format!("spec: {}\nparity: {}\n", spec_line(&self.spec), self.parity);
        for t in &self.per_j {
            let _ = writeln!(
                out,
                "J={} I={} sign={:+} bases={} rho=({}): T = {} {} (+/- {})",
                t.term.j,
                t.term.i,
                t.term.sign,
                t.bases,
                t.term.rho.join(", "),
                t.term.value_re,
                t.term.value_im,
                t.term.tail
            );
            for s in &t.d_samples {
                let _ = writeln!(out, "    D at outer {:?}: {} {}", s.outer, s.d.re, s.d.im);
            }
        }
        let _ = writeln!(out, "half of the sum of T: {} {}", self.half_total.re, self.half_total.im);
        out
    }
}

impl Render for SelfTestOut {
    fn csv(&self) -> String {
        let mut out = String::new();
        csv_row(&mut out, &["case", "passed", "detail"]);
        for c in &self.cases {
            csv_row(&mut out, &[&c.name, &c.passed.to_string(), &c.detail]);
        }
        out
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            let _ = writeln!(out, "[{}] {}: {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail);
        }
        let _ = writeln!(out, "{}", if self.passed { "all checks passed" } else { "some checks failed" });
        out
    }
}

pub fn verdict_exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_verdict() {
        assert_eq!(verdict_exit_code(Verdict::Pass), 0);
        assert_eq!(verdict_exit_code(Verdict::Fail), 1);
        assert_eq!(verdict_exit_code(Verdict::Inconclusive), 3);
    }

    #[test]
    fn csv_fields_are_quoted_when_needed() {
        assert_eq!(csv_field("{1}"), "{1}");
        assert_eq!(csv_field("{1,2}"), "\"{1,2}\"");
        assert_eq!(csv_field("a\"b"), "\"a\"\"b\"");
    }
}
