//! CSV output. Every file starts with one `# ` comment line echoing the
//! configuration that produced it.

use std::io::Write;

use super::{HarnessError, IterStats, MessageHistogram, SimRecord};
use crate::ga::TrajectoryPoint;

/// `# key=value key=value ...`; values must not contain newlines.
pub fn config_echo(pairs: &[(&str, String)]) -> String {
    let body: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# {}", body.join(" "))
}

fn write_table<W: Write>(mut w: W, echo: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), HarnessError> {
    if echo.contains('\n') {
        return Err(HarnessError::InvalidRequest("config echo must be a single line".into()));
    }
    writeln!(w, "{echo}")?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(header)?;
    for row in rows {
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}

fn num(x: f64) -> String {
    format!("{x}")
}

pub fn write_simrecords<W: Write>(w: W, echo: &str, records: &[SimRecord]) -> Result<(), HarnessError> {
    let rows = records
        .iter()
        .map(|r| {
            vec![
                num(r.ebno_db),
                r.frames.to_string(),
                r.bit_errors.to_string(),
                r.frame_errors.to_string(),
                num(r.ber()),
                num(r.fer()),
                num(r.avg_iterations()),
                r.decoder.clone(),
                r.code.clone(),
                r.seed.to_string(),
            ]
        })
        .collect();
    write_table(
        w,
        echo,
        &[
            "ebno_db",
            "frames",
            "bit_errors",
            "frame_errors",
            "ber",
            "fer",
            "avg_iters",
            "decoder",
            "code",
            "seed",
        ],
        rows,
    )
}

pub fn write_iterstats<W: Write>(w: W, echo: &str, stats: &IterStats) -> Result<(), HarnessError> {
    let rows = stats
        .rows
        .iter()
        .map(|r| vec![r.iteration.to_string(), num(r.sign_change_fraction), num(r.erasure_fraction)])
        .collect();
    write_table(w, echo, &["iteration", "sign_change_fraction", "erasure_fraction"], rows)
}

pub fn write_histogram<W: Write>(w: W, echo: &str, hist: &MessageHistogram) -> Result<(), HarnessError> {
    let rows = hist
        .counts
        .iter()
        .enumerate()
        .map(|(k, c)| vec![num(hist.bin_edges[k]), num(hist.bin_edges[k + 1]), c.to_string()])
        .collect();
    write_table(w, echo, &["bin_lo", "bin_hi", "count"], rows)
}

/// Moments of the histogram population; empty fields when undefined.
pub fn write_histogram_sidecar<W: Write>(w: W, echo: &str, hist: &MessageHistogram) -> Result<(), HarnessError> {
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    let row = vec![
        hist.population.to_string(),
        hist.samples.to_string(),
        opt(hist.mean),
        opt(hist.variance),
        opt(hist.symmetry_ratio()),
    ];
    write_table(
        w,
        echo,
        &["population", "samples", "mean", "variance", "variance_over_2mean"],
        vec![row],
    )
}

pub fn write_trajectory<W: Write>(w: W, echo: &str, points: &[TrajectoryPoint]) -> Result<(), HarnessError> {
    let rows = points
        .iter()
        .map(|p| {
            vec![
                p.iteration.to_string(),
                num(p.p),
                num(p.e),
                num(p.pe),
                num(p.r),
                num(p.f),
                num(p.m_beta),
            ]
        })
        .collect();
    write_table(w, echo, &["iteration", "P", "E", "Pe", "R", "F", "m_beta"], rows)
}
