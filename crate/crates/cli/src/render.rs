//! JSON, CSV and plain-text renderings of each report. All three carry the
//! same 17-significant-digit numbers.

use std::fmt::Write as _;

use hypercert_core::certify::OptimizeReport;
use hypercert_core::format::sig17;
use hypercert_core::PartitionCertificate;

use crate::commands::{BoundReport, Constants, Report};
use crate::CliError;

/// Header of the per-cell certificate CSV.
pub const CELL_HEADER: [&str; 16] = [
    "index", "dLo", "dHi", "hLo", "hHi", "sigmaLo", "sigmaHi", "psiLo", "psiHi", "wlensLo", "wconeLo", "phiLo",
    "good", "margin1", "margin2", "margin3",
];

fn csv_num(x: f64) -> String {
    if x.is_finite() {
        sig17(x)
    } else {
        String::new()
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn json(report: &Report) -> Result<String, CliError> {
    match report {
        Report::Certificate(c) => Ok(c.to_json()),
        Report::Constants(c) => to_json(c),
        Report::Optimize(o) => to_json(o),
        Report::Bound(b) => to_json(b),
        Report::McCheck(m) => to_json(m),
    }
}

pub fn csv(report: &Report) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match report {
        Report::Certificate(cert) => cells_csv(&mut w, cert)?,
        Report::Constants(c) => {
            w.write_record(["quantity", "value"])?;
            for (name, value) in constants_rows(c) {
                w.write_record([name, value.as_str()])?;
            }
        }
        Report::Optimize(o) => {
            w.write_record(["R", "certifiedC", "valenceBound", "cellCount", "best"])?;
            for p in &o.points {
                let best = o.best.as_ref().is_some_and(|b| b.r_big == p.r_big);
                w.write_record([
                    sig17(p.r_big),
                    sig17(p.certified_c),
                    p.valence_bound.to_string(),
                    p.cell_count.to_string(),
                    best.to_string(),
                ])?;
            }
        }
        Report::Bound(b) => {
            w.write_record(["quantity", "value"])?;
            for (name, value) in bound_rows(b) {
                w.write_record([name, value.as_str()])?;
            }
        }
        Report::McCheck(m) => {
            w.write_record([
                "shape",
                "params",
                "closedForm",
                "mean",
                "standardError",
                "samples",
                "hits",
                "seed",
                "zScore",
                "withinThreeSigma",
            ])?;
            let params: Vec<String> = m.params.iter().map(|x| sig17(*x)).collect();
            w.write_record([
                m.shape.clone(),
                params.join(";"),
                sig17(m.closed_form),
                sig17(m.estimate.mean),
                sig17(m.estimate.standard_error),
                m.estimate.samples.to_string(),
                m.estimate.hits.to_string(),
                m.estimate.seed.to_string(),
                csv_num(m.z_score),
                m.within_three_sigma.to_string(),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn cells_csv(w: &mut csv::Writer<Vec<u8>>, cert: &PartitionCertificate) -> Result<(), CliError> {
    w.write_record(CELL_HEADER)?;
    for (i, c) in cert.cells.iter().enumerate() {
        let mut row = vec![(i + 1).to_string()];
        row.extend(
            [
                c.d_lo, c.d_hi, c.h_lo, c.h_hi, c.sigma_lo, c.sigma_hi, c.psi_lo, c.psi_hi, c.wlens_lo, c.wcone_lo,
                c.phi_lo,
            ]
            .map(csv_num),
        );
        row.push(c.good.to_string());
        row.extend(c.margins.map(csv_num));
        w.write_record(&row)?;
    }
    Ok(())
}

fn constants_rows(c: &Constants) -> Vec<(&'static str, String)> {
    vec![
        ("epsilon", sig17(c.epsilon)),
        ("R", sig17(c.r_big)),
        ("c", sig17(c.c)),
        ("ballHalfEps", sig17(c.ball_half_eps)),
        ("bHalfEps", sig17(c.b_half_eps)),
        ("densityHalfEps", sig17(c.density_half_eps)),
        ("tauHalfEps", sig17(c.tau_half_eps)),
        ("tauErrorEstimate", sig17(c.tau_error_estimate)),
        ("quotient", sig17(c.quotient)),
        ("valenceBound", c.valence_bound.to_string()),
        ("lambda0", sig17(c.lambda0)),
        ("lambda1", sig17(c.lambda1)),
        ("lambda1Noncompact", sig17(c.lambda1_noncompact)),
        ("lambda1CompactP2", sig17(c.lambda1_compact_p2)),
        ("quadratureTolerance", sig17(c.quadrature_tolerance)),
    ]
}

fn bound_rows(b: &BoundReport) -> Vec<(&'static str, String)> {
    vec![
        ("volume", sig17(b.volume)),
        ("cusped", b.cusped.to_string()),
        ("prime", b.prime.to_string()),
        ("epsilon", sig17(b.epsilon)),
        ("R", sig17(b.r_big)),
        ("c", sig17(b.c)),
        ("valenceBound", b.valence_bound.to_string()),
        ("homologyCoefficient", sig17(b.homology_coefficient)),
        ("homologyBound", sig17(b.homology_bound)),
        ("smallRankBound", sig17(b.small_rank_bound)),
        ("rankCoefficient", sig17(b.rank_coefficient)),
        ("rankBound", sig17(b.rank_bound)),
    ]
}

fn rows_text(rows: &[(&'static str, String)]) -> String {
    let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
    rows.iter().map(|(n, v)| format!("{n:<width$}  {v}\n")).collect()
}

pub fn human(report: &Report) -> String {
    match report {
        Report::Certificate(cert) => certificate_text(cert),
        Report::Constants(c) => rows_text(&constants_rows(c)),
        Report::Bound(b) => rows_text(&bound_rows(b)),
        Report::Optimize(o) => optimize_text(o),
        Report::McCheck(m) => {
            let verdict = if m.within_three_sigma { "within" } else { "OUTSIDE" };
            let params: Vec<String> = m.params.iter().map(|x| sig17(*x)).collect();
            format!(
                "shape        {} ({})\nclosed form  {}\nestimate     {} ± {}\nsamples      {} ({} hits, seed {})\nz-score      {}\n{verdict} 3 standard errors\n",
                m.shape,
                params.join(", "),
                sig17(m.closed_form),
                sig17(m.estimate.mean),
                sig17(m.estimate.standard_error),
                m.estimate.samples,
                m.estimate.hits,
                m.estimate.seed,
                sig17(m.z_score),
            )
        }
    }
}

fn certificate_text(cert: &PartitionCertificate) -> String {
    let p = &cert.params;
    let mut s = String::new();
    let _ = writeln!(s, "epsilon      {}", sig17(p.epsilon));
    let _ = writeln!(s, "R            {}", sig17(p.r_big));
    let _ = writeln!(s, "slack        {}", sig17(p.slack));
    let _ = writeln!(s, "cells        {}", cert.cell_count());
    let _ = writeln!(s, "certifiedC   {} (cell {})", sig17(cert.certified_c), cert.argmin_phi());
    for k in 0..3 {
        let (v, i) = cert.min_margin(k);
        let _ = writeln!(s, "margin{}      {} (cell {i})", k + 1, sig17(v));
    }
    s
}

fn optimize_text(o: &OptimizeReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "epsilon   {}", sig17(o.epsilon));
    let _ = writeln!(s, "b(eps/2)  {}", sig17(o.b_half_eps));
    let _ = writeln!(s, "{:<24}  {:<24}  {:>8}  {:>6}", "R", "certifiedC", "valence", "cells");
    for p in &o.points {
        let _ = writeln!(
            s,
            "{:<24}  {:<24}  {:>8}  {:>6}",
            sig17(p.r_big),
            sig17(p.certified_c),
            p.valence_bound,
            p.cell_count
        );
    }
    for p in &o.skipped {
        let _ = writeln!(s, "skipped R = {}: {}", sig17(p.r_big), p.reason);
    }
    if let Some(b) = &o.best {
        let _ = writeln!(s, "best R    {} with valence bound {}", sig17(b.r_big), b.valence_bound);
    }
    s
}
