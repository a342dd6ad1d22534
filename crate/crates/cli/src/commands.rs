use charpoly::blowup::{chart_and_classify, ChartSpec};
use charpoly::charpoly::{char_polyhedron, Label};
use charpoly::hilbert::{decompose, hf_monomial, parse_monomials};
use charpoly::preparation::prepare;
use charpoly::resolve::{
    fundamental_sequence, maximal_contact_probe, prepare_totally, resolve_driver, DriverOptions,
    ProbeParams, Snapshot,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::job::{parse_polynomial, JobFile};
use crate::plot::{render, PlotKind};

fn with_plot(mut out: Value, label: &Label, plot: Option<PlotKind>) -> Result<Value> {
    if let Some(kind) = plot {
        out["plot"] = Value::String(render(&char_polyhedron(label), kind)?);
    }
    Ok(out)
}

fn state(label: &Label) -> Value {
    json!({
        "label": label.to_json(),
        "snapshot": Snapshot::of(label).to_json(),
    })
}

pub fn polyhedron(job: &JobFile, plot: Option<PlotKind>) -> Result<Value> {
    let label = job.label()?;
    with_plot(state(&label), &label, plot)
}

/// Prepare up to level `m`, by default the largest vertex level of the input.
pub fn prepare_cmd(
    job: &JobFile,
    m: Option<BigRational>,
    totally: bool,
    plot: Option<PlotKind>,
) -> Result<Value> {
    let label = job.label()?;
    if totally {
        let out = prepare_totally(&label)?;
        return with_plot(state(&out), &out, plot);
    }
    let m = m.unwrap_or_else(|| {
        char_polyhedron(&label)
            .vertices()
            .iter()
            .map(|v| v.iter().fold(BigRational::zero(), |a, x| a + x))
            .max()
            .unwrap_or_else(BigRational::zero)
    });
    let (out, report) = prepare(&label, &m)?;
    let mut v = state(&out);
    v["level"] = Value::String(m.to_string());
    v["report"] = report.to_json();
    with_plot(v, &out, plot)
}

pub fn parse_chart(kind: &str, phi: Option<&str>, label: &Label) -> Result<ChartSpec> {
    let need_phi = || {
        phi.ok_or_else(|| CliError::Usage(format!("chart {kind} needs --phi")))
            .and_then(|p| parse_polynomial(p, label.frame()))
    };
    Ok(match kind {
        "point-u1" => ChartSpec::PointU1,
        "point-u2" => ChartSpec::PointU2,
        "curve-u1" => ChartSpec::CurveU1,
        "curve-u2" => ChartSpec::CurveU2,
        "translated" | "point-translated" => ChartSpec::Translated(need_phi()?),
        "nonrational" | "point-nonrational" => ChartSpec::Nonrational(need_phi()?),
        _ => {
            return Err(CliError::Usage(format!(
                "unknown chart {kind}; use point-u1, point-u2, translated, nonrational, curve-u1 or curve-u2"
            )))
        }
    })
}

pub fn blowup(
    job: &JobFile,
    chart: &str,
    phi: Option<&str>,
    plot: Option<PlotKind>,
) -> Result<Value> {
    let label = job.label()?;
    let spec = parse_chart(chart, phi, &label)?;
    let (out, nearness) = chart_and_classify(&label, &spec)?;
    let near = json!({
        "kind": nearness.kind,
        "delta": nearness.delta.to_string(),
    });
    match out {
        Some(out) => {
            let mut v = state(&out);
            v["chart"] = spec.to_json();
            v["nearness"] = near;
            with_plot(v, &out, plot)
        }
        None => Ok(json!({ "chart": spec.to_json(), "nearness": near, "label": null })),
    }
}

pub fn resolve(job: &JobFile, max_units: Option<usize>, isolated: bool) -> Result<Value> {
    let label = job.label()?;
    let mut opts = DriverOptions {
        isolated,
        ..DriverOptions::default()
    };
    if let Some(m) = max_units {
        opts.max_units = m;
    }
    Ok(resolve_driver(&label, &opts)?.to_json())
}

pub fn fundamental(job: &JobFile) -> Result<Value> {
    let fs = fundamental_sequence(&job.label()?)?;
    Ok(json!({
        "m": fs.m,
        "trace": fs.trace.iter().map(|t| t.to_json()).collect::<Vec<_>>(),
    }))
}

fn int(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(k) => json!(k),
        None => Value::String(n.to_string()),
    }
}

pub fn hilbert(ideal: &str, vars: &[String], count: usize) -> Result<Value> {
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    let gens = parse_monomials(ideal, &names)?;
    let h = hf_monomial(&gens, names.len())?;
    let p = h.tail().clone();
    let a = decompose(&p)?;
    Ok(json!({
        "vars": vars,
        "ideal": ideal,
        "H": h.take(count).iter().map(int).collect::<Vec<_>>(),
        "n0": h.n0(),
        "P": p.to_string(),
        "P_coefficients": p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "a": a.to_string(),
    }))
}

pub fn probe(params: &ProbeParams, gamma: Option<&str>) -> Result<Value> {
    let gamma = match gamma {
        Some(g) => {
            params.validate()?;
            Some(parse_polynomial(g, &params.frame()?)?)
        }
        None => None,
    };
    Ok(maximal_contact_probe(params, gamma.as_ref())?.to_json())
}
