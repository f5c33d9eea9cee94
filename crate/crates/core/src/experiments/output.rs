use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{ConcentrationSummary, DensityFrequency, MaxEdgeSummary, Problem, QSummary, ReplicateRecord, SolverLabel};
use crate::error::{invalid, Error, Result};

#[derive(Serialize)]
struct RecordRow {
    problem: Problem,
    d: usize,
    p: f64,
    q: f64,
    n: usize,
    replicate: usize,
    seed: u64,
    cost: f64,
    normalized: f64,
    max_edge: f64,
    #[serde(rename = "event_A")]
    event_a: bool,
    #[serde(rename = "event_B")]
    event_b: bool,
    solver: SolverLabel,
}

/// One row of the per-`(n, q)` summary CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub problem: Problem,
    pub d: usize,
    pub p: f64,
    pub q: f64,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => invalid(format!("csv: {other:?}")),
    }
}

fn write_rows<T: Serialize>(out: impl Write, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per record and q.
pub fn write_records_csv(out: impl Write, records: &[ReplicateRecord]) -> Result<()> {
    if records.is_empty() {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "problem", "d", "p", "q", "n", "replicate", "seed", "cost", "normalized", "max_edge", "event_A", "event_B",
            "solver",
        ])
        .map_err(csv_err)?;
        w.flush()?;
        return Ok(());
    }
    write_rows(
        out,
        records.iter().flat_map(|r| {
            r.q_costs.iter().map(move |c| RecordRow {
                problem: r.problem,
                d: r.d,
                p: r.p,
                q: c.q,
                n: r.n,
                replicate: r.replicate,
                seed: r.seed,
                cost: c.cost,
                normalized: c.normalized,
                max_edge: r.max_edge,
                event_a: r.event_a,
                event_b: r.event_b,
                solver: r.solver,
            })
        }),
    )
}

pub fn write_summary_csv(out: impl Write, problem: Problem, d: usize, p: f64, summaries: &[QSummary]) -> Result<()> {
    write_rows(
        out,
        summaries.iter().map(|s| SummaryRow {
            problem,
            d,
            p,
            q: s.q,
            n: s.n,
            mean: s.mean,
            std: s.std,
            count: s.count,
        }),
    )
}

pub fn write_maxedge_csv(out: impl Write, per_n: &[MaxEdgeSummary]) -> Result<()> {
    write_rows(out, per_n)
}

pub fn write_concentration_csv(out: impl Write, per_n: &[ConcentrationSummary]) -> Result<()> {
    write_rows(out, per_n)
}

pub fn write_density_csv(out: impl Write, per_n: &[DensityFrequency]) -> Result<()> {
    write_rows(out, per_n)
}

/// Parses a summary CSV; an empty file or a header mismatch is an error.
pub fn read_summary_csv(input: impl Read) -> Result<Vec<SummaryRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let want = ["problem", "d", "p", "q", "n", "mean", "std", "count"];
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(want) {
        return Err(invalid(format!("summary header {:?} does not match {want:?}", header.iter().collect::<Vec<_>>())));
    }
    let rows = rdr
        .deserialize()
        .collect::<std::result::Result<Vec<SummaryRow>, _>>()
        .map_err(csv_err)?;
    if rows.is_empty() {
        return Err(invalid("summary CSV has no rows"));
    }
    Ok(rows)
}
