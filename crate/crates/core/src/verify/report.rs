//! CSV and JSON emission for study results.
//!
//! CSV files optionally begin with a `# generated-at <unix seconds>` comment
//! line; everything after it is a deterministic function of the inputs. The
//! JSON mirror carries the same fields and never a timestamp.

use crate::verify::study::{CnExperiment, ConvergenceReport};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// One CSV/JSON record of a convergence table.
#[derive(Clone, Debug, Serialize)]
pub struct ReportRow {
    pub case: String,
    pub c0: f64,
    pub lambda: f64,
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub err_u_1h: f64,
    pub err_p_l2: f64,
    pub err_z_l2: f64,
    pub rate_u: Option<f64>,
    pub rate_p: Option<f64>,
    pub rate_z: Option<f64>,
}

pub fn report_rows(reports: &[&ConvergenceReport]) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    for report in reports {
        let rates = report.rates();
        for (level, rate) in report.levels.iter().zip(rates) {
            rows.push(ReportRow {
                case: report.case.clone(),
                c0: report.c0,
                lambda: report.lambda,
                n: level.n,
                h: level.h,
                dt: level.dt,
                err_u_1h: level.errors.u_h1,
                err_p_l2: level.errors.p_l2,
                err_z_l2: level.errors.z_l2,
                rate_u: rate.map(|r| r[0]),
                rate_p: rate.map(|r| r[1]),
                rate_z: rate.map(|r| r[2]),
            });
        }
    }
    rows
}

const REPORT_HEADER: &str = "case,c0,lambda,n,h,dt,err_u_1h,err_p_l2,err_z_l2,rate_u,rate_p,rate_z";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub fn report_csv(rows: &[ReportRow], timestamp: Option<u64>) -> String {
    let mut out = String::new();
    if let Some(ts) = timestamp {
        out.push_str(&format!("# generated-at {ts}\n"));
    }
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{},{},{}\n",
            r.case,
            r.c0,
            r.lambda,
            r.n,
            r.h,
            r.dt,
            r.err_u_1h,
            r.err_p_l2,
            r.err_z_l2,
            opt(r.rate_u),
            opt(r.rate_p),
            opt(r.rate_z),
        ));
    }
    out
}

/// One CSV/JSON record of a stability-constant table.
#[derive(Clone, Debug, Serialize)]
pub struct StabilityRow {
    pub n: usize,
    pub beta_rt: f64,
    pub beta_sigma: f64,
    pub sigma_kernel_dim: usize,
    pub korn_c_k: f64,
    pub korn_lambda_max: f64,
}

pub fn stability_csv(rows: &[StabilityRow], timestamp: Option<u64>) -> String {
    let mut out = String::new();
    if let Some(ts) = timestamp {
        out.push_str(&format!("# generated-at {ts}\n"));
    }
    out.push_str("n,beta_rt,beta_sigma,sigma_kernel_dim,korn_c_k,korn_lambda_max\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.10e},{:.10e},{},{:.10e},{:.10e}\n",
            r.n, r.beta_rt, r.beta_sigma, r.sigma_kernel_dim, r.korn_c_k, r.korn_lambda_max
        ));
    }
    out
}

/// One CSV/JSON record of the compatibility experiment.
#[derive(Clone, Debug, Serialize)]
pub struct CnRow {
    pub scheme: String,
    pub init: String,
    pub step1_pressure_increment: f64,
    pub trajectory_max_norm: f64,
}

pub fn cn_rows(exp: &CnExperiment) -> Vec<CnRow> {
    exp.rows
        .iter()
        .map(|r| CnRow {
            scheme: r.scheme.to_string(),
            init: r.init.to_string(),
            step1_pressure_increment: r.step1_pressure_increment,
            trajectory_max_norm: r.trajectory_max_norm,
        })
        .collect()
}

pub fn cn_csv(rows: &[CnRow], timestamp: Option<u64>) -> String {
    let mut out = String::new();
    if let Some(ts) = timestamp {
        out.push_str(&format!("# generated-at {ts}\n"));
    }
    out.push_str("scheme,init,step1_pressure_increment,trajectory_max_norm\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.10e},{:.10e}\n",
            r.scheme, r.init, r.step1_pressure_increment, r.trajectory_max_norm
        ));
    }
    out
}

/// Per-step trajectory errors for a single run.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryRow {
    pub step: usize,
    pub t: f64,
    pub error_u_1h: f64,
    pub error_p_l2: f64,
    pub error_z_l2: f64,
}

pub fn trajectory_csv(rows: &[TrajectoryRow], timestamp: Option<u64>) -> String {
    let mut out = String::new();
    if let Some(ts) = timestamp {
        out.push_str(&format!("# generated-at {ts}\n"));
    }
    out.push_str("step,t,error_u_1h,error_p_l2,error_z_l2\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.8e},{:.10e},{:.10e},{:.10e}\n",
            r.step, r.t, r.error_u_1h, r.error_p_l2, r.error_z_l2
        ));
    }
    out
}

/// Writes a CSV file and a JSON mirror with the same stem.
pub fn write_csv_and_json<T: Serialize>(
    csv_path: &Path,
    csv_text: &str,
    rows: &[T],
) -> std::io::Result<std::path::PathBuf> {
    let mut f = std::fs::File::create(csv_path)?;
    f.write_all(csv_text.as_bytes())?;
    let json_path = csv_path.with_extension("json");
    let json = serde_json::to_string_pretty(rows).expect("serializable rows");
    std::fs::write(&json_path, json)?;
    Ok(json_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_schema_and_empty_rates() {
        let rows = vec![ReportRow {
            case: "smooth".into(),
            c0: 1.0,
            lambda: 1.0,
            n: 4,
            h: 0.353,
            dt: 0.125,
            err_u_1h: 1.0,
            err_p_l2: 2.0,
            err_z_l2: 3.0,
            rate_u: None,
            rate_p: None,
            rate_z: None,
        }];
        let csv = report_csv(&rows, None);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), REPORT_HEADER);
        let row = lines.next().unwrap();
        assert!(row.ends_with(",,,"), "empty rates expected: {row}");
    }

    #[test]
    fn timestamp_header_is_prepended() {
        let csv = report_csv(&[], Some(123));
        assert!(csv.starts_with("# generated-at 123\n"));
        let without = report_csv(&[], None);
        assert!(without.starts_with("case,"));
    }
}
