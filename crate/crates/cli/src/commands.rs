use serde::Serialize;
use superquant::bergman::{Classification, ConvergenceVerdict};
use superquant::grassmann::{format_coeff, parse_element};
use superquant::kahler::{build_form, dolbeault_check, verify_axioms, verify_moment_identity, KahlerReport};
use superquant::potential::{ConvexPotential, ConvexityCertificate, Refutation};
use superquant::reps::{gelfand_model_check, occurrences, LabelParity, ModelReport, OccurrenceReport};
use superquant::selftest::{self, SelfTestOptions, SelfTestReport};

use crate::config::{config_error, RunConfig};
use crate::report::{envelope_json, Outcome, Table};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_DISAGREEMENT: i32 = 3;

pub struct Context<'a> {
    pub config: &'a RunConfig,
    pub effective: RunConfig,
    pub hash: String,
    pub seed: u64,
}

impl Context<'_> {
    fn finish<T: Serialize>(&self, command: &str, code: i32, result: T, table: Option<Table>, summary: String) -> anyhow::Result<Outcome> {
        Ok(Outcome {
            code,
            json: envelope_json(command, &self.hash, &self.effective, self.seed, code, result)?,
            table,
            summary,
        })
    }

    fn refuted(&self, command: &str, r: Refutation) -> anyhow::Result<Outcome> {
        let summary = format!(
            "{command}: potential is not certified strictly convex, witness {:?} ({})",
            r.point, r.reason
        );
        self.finish(command, EXIT_CHECK_FAILED, Refuted { refutation: r }, None, summary)
    }
}

#[derive(Serialize)]
struct Refuted {
    refutation: Refutation,
}

#[derive(Serialize)]
struct KahlerResult {
    certificate: Option<ConvexityCertificate>,
    k: usize,
    points: Vec<Vec<f64>>,
    axioms: KahlerReport,
    moment: KahlerReport,
    dolbeault: KahlerReport,
}

fn unit(len: usize, j: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[j] = 1.0;
    v
}

pub fn verify_kahler(ctx: &Context) -> anyhow::Result<Outcome> {
    let dims = ctx.config.dims()?;
    let f = match ctx.config.potential()? {
        Ok(f) => f,
        Err(r) => return ctx.refuted("verify-kahler", r),
    };
    let points = ctx.config.kahler_points(ctx.seed)?;
    let form = build_form(&f, dims.k).map_err(|e| config_error(e.to_string()))?;
    let axioms = verify_axioms(&form, &points);
    let dim = f.dim();
    let mut moment = KahlerReport::new(vec![]);
    for j in 0..dim {
        moment = moment.merge(verify_moment_identity(&form, &unit(dim, j), &vec![0.0; dims.k], &points)?);
    }
    for s in 0..dims.k {
        moment = moment.merge(verify_moment_identity(&form, &vec![0.0; dim], &unit(dims.k, s), &points)?);
    }
    let dolbeault = dolbeault_check(&form, &points);
    let passed = axioms.passed && moment.passed && dolbeault.passed;
    let failing: Vec<&str> = axioms
        .checks
        .iter()
        .chain(&moment.checks)
        .chain(&dolbeault.checks)
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    let summary = if passed {
        format!("verify-kahler: all checks pass on {} points", points.len())
    } else {
        format!("verify-kahler: failing checks {failing:?}")
    };
    let result = KahlerResult {
        certificate: f.certificate().cloned(),
        k: dims.k,
        points,
        axioms,
        moment,
        dolbeault,
    };
    let code = if passed { EXIT_PASS } else { EXIT_CHECK_FAILED };
    ctx.finish("verify-kahler", code, result, None, summary)
}

fn verdict_name(v: &ConvergenceVerdict) -> &'static str {
    match v {
        ConvergenceVerdict::Converges { .. } => "converges",
        ConvergenceVerdict::Diverges { .. } => "diverges",
        ConvergenceVerdict::Inconclusive { .. } => "inconclusive",
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";")
}

fn classification_row(c: &Classification, f: &ConvexPotential) -> Vec<String> {
    let mut row: Vec<String> = c.weight.torus.iter().map(|t| t.to_string()).collect();
    row.extend(c.weight.flat.iter().map(|q| q.to_string()));
    row.push(c.verdict.to_string());
    let centre = c.centre();
    row.push(verdict_name(&centre.integral).into());
    row.push(match &centre.integral {
        ConvergenceVerdict::Converges { value, .. } => format!("{value:e}"),
        _ => String::new(),
    });
    row.push(match &centre.integral {
        ConvergenceVerdict::Converges { error_estimate, .. } => format!("{error_estimate:e}"),
        _ => String::new(),
    });
    row.push(verdict_name(&centre.attainment).into());
    let witness = centre.attainment.witness();
    row.push(witness.map(join).unwrap_or_default());
    row.push(
        witness
            .and_then(|x| f.gradient(x).ok())
            .map(|g| {
                let r = g.iter().zip(&centre.lambda).map(|(gi, li)| (gi + li).powi(2)).sum::<f64>().sqrt();
                format!("{r:e}")
            })
            .unwrap_or_default(),
    );
    row.push(c.has_discrepancy().to_string());
    row
}

fn classify_header(n: usize, m: usize) -> Vec<String> {
    let mut h: Vec<String> = (1..=n).map(|j| format!("t{j}")).collect();
    h.extend((1..=m).map(|j| format!("f{j}")));
    for c in [
        "verdict",
        "integral",
        "integral_value",
        "integral_error",
        "attainment",
        "attainment_point",
        "attainment_residual",
        "disagreement",
    ] {
        h.push(c.into());
    }
    h
}

pub fn classify(ctx: &Context) -> anyhow::Result<Outcome> {
    let dims = ctx.config.dims()?;
    let weights = ctx.config.weight_box()?;
    let params = ctx.config.classify_params()?;
    let f = match ctx.config.potential()? {
        Ok(f) => f,
        Err(r) => return ctx.refuted("classify", r),
    };
    let report: OccurrenceReport = occurrences(&f, &weights, &params).map_err(|e| config_error(e.to_string()))?;
    let rows: Vec<Vec<String>> = report
        .entries
        .iter()
        .filter(|e| e.parity == LabelParity::Plus)
        .filter_map(|e| e.oracle_data.as_ref())
        .map(|c| classification_row(c, &f))
        .collect();
    let occurring = report.occurring().len();
    let total = rows.len();
    let code = if report.discrepancies.is_empty() { EXIT_PASS } else { EXIT_DISAGREEMENT };
    let summary = format!(
        "classify: {occurring} of {total} weights occur, {} inconclusive, {} oracle disagreements",
        report.inconclusive.len(),
        report.discrepancies.len()
    );
    let table = Table {
        header: classify_header(dims.n, dims.m),
        rows,
    };
    ctx.finish("classify", code, report, Some(table), summary)
}

pub fn model_check(ctx: &Context) -> anyhow::Result<Outcome> {
    let weights = ctx.config.weight_box()?;
    let params = ctx.config.classify_params()?;
    let f = match ctx.config.potential()? {
        Ok(f) => f,
        Err(r) => return ctx.refuted("model-check", r),
    };
    let report: ModelReport = gelfand_model_check(&f, &weights, &params).map_err(|e| config_error(e.to_string()))?;
    let code = if !report.discrepancies.is_empty() {
        EXIT_DISAGREEMENT
    } else if report.confirmed {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    };
    let single = report.entries.iter().filter(|e| e.multiplicity == 1).count();
    let summary = format!(
        "model-check: {single} of {} labels occur exactly once, model {}",
        report.entries.len(),
        if report.confirmed { "confirmed" } else { "not confirmed" }
    );
    let mut header = vec!["label".to_string(), "parity".into(), "multiplicity".into(), "unique_attainment".into()];
    header.push("attainment_point".into());
    let rows = report
        .entries
        .iter()
        .map(|e| {
            vec![
                e.label.weight.to_string(),
                e.label.parity.symbol().to_string(),
                e.multiplicity.to_string(),
                e.unique_attainment.to_string(),
                e.attainment_point.as_deref().map(join).unwrap_or_default(),
            ]
        })
        .collect();
    ctx.finish("model-check", code, report, Some(Table { header, rows }), summary)
}

#[derive(Serialize)]
struct BerezinResult {
    element: String,
    k: usize,
    value: String,
}

pub fn berezin_eval(ctx: &Context, element: Option<String>, k: Option<usize>) -> anyhow::Result<Outcome> {
    let element = element
        .or_else(|| ctx.config.berezin.element.clone())
        .ok_or_else(|| config_error("berezin-eval needs an element"))?;
    let k = k
        .or(ctx.config.berezin.k)
        .or(ctx.config.dims.as_ref().map(|d| d.k))
        .ok_or_else(|| config_error("berezin-eval needs k"))?;
    let e = parse_element(&element, k).map_err(|e| config_error(format!("element: {e}")))?;
    let value = format_coeff(&e.berezin_top());
    let summary = value.clone();
    ctx.finish("berezin-eval", EXIT_PASS, BerezinResult { element, k, value }, None, summary)
}

pub fn selftest(ctx: &Context, sign_fault: bool) -> anyhow::Result<Outcome> {
    let report: SelfTestReport = selftest::run(SelfTestOptions {
        sign_fault,
        seed: ctx.seed,
    });
    let summary = report
        .checks
        .iter()
        .map(|c| format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
        .collect::<Vec<_>>()
        .join("\n");
    let code = if report.passed { EXIT_PASS } else { EXIT_CHECK_FAILED };
    ctx.finish("selftest", code, report, None, summary)
}
