//! Replay of instance files through the structures, answering inline query
//! markers against the state after all preceding updates.

use std::time::Instant;

use incsp_core::apsp::{IncApsp, Variant};
use incsp_core::offline::OfflineSssp;
use incsp_core::oracle::sssp_xi;
use incsp_core::sssp::SourceSssp;
use incsp_core::{DynGraph, GraphError, Op, Update, UpdateKind, VertexId};
use serde::Serialize;

use crate::text::{format_op, format_value, ParsedInstance};
use crate::CliError;

fn at_line(line: usize, e: impl ToString) -> CliError {
    CliError::parse(line, e.to_string())
}

/// Validates each update against the true graph as it is replayed.
struct Truth {
    g: DynGraph,
}

impl Truth {
    fn new(p: &ParsedInstance) -> Result<Self, CliError> {
        let g = p.instance.base_graph().map_err(|e: GraphError| at_line(1, e))?;
        Ok(Self { g })
    }

    fn apply(&mut self, u: &Update, line: usize) -> Result<(), CliError> {
        self.g.apply_update(u).map(|_| ()).map_err(|e| at_line(line, e))
    }
}

fn answer(out: &mut String, op: &Op, value: Option<f64>) {
    out.push_str(&format_op(op));
    out.push(' ');
    out.push_str(&format_value(value));
    out.push('\n');
}

fn source_structure(p: &ParsedInstance, truth: &Truth, source: VertexId, eps: f64) -> Result<SourceSssp, CliError> {
    if source >= p.instance.n {
        return Err(CliError::Usage(format!("source {source} out of range for n = {}", p.instance.n)));
    }
    let xi = sssp_xi(eps, truth.g.edge_count() + p.instance.n);
    SourceSssp::new(&truth.g, source, xi, p.instance.max_weight()).map_err(|e| CliError::Usage(e.to_string()))
}

fn check_source_update(u: &Update, source: VertexId, line: usize) -> Result<(), CliError> {
    if u.tail == source {
        Ok(())
    } else {
        Err(CliError::parse(line, format!("update leaves {} but the structure only accepts edges leaving the source {source}", u.tail)))
    }
}

/// Incremental SSSP replay; answers `?s v` markers. Every update must leave
/// `source`.
pub fn run_sssp(p: &ParsedInstance, source: VertexId, eps: f64) -> Result<String, CliError> {
    let mut truth = Truth::new(p)?;
    let base = truth.g.clone();
    let mut ds = source_structure(p, &truth, source, eps)?;
    let mut out = String::new();
    for (op, &line) in p.instance.ops.iter().zip(&p.op_lines) {
        match op {
            Op::Update(u) => {
                check_source_update(u, source, line)?;
                truth.apply(u, line)?;
                ds.source_insert(&base, u.head, u.weight).map_err(|e| at_line(line, e))?;
            }
            Op::Source(v) => answer(&mut out, op, ds.estimate(*v)),
            Op::Pair(..) | Op::Offline(..) => {}
        }
    }
    Ok(out)
}

/// Final edge count of the instance: initial edges plus inserts.
pub fn final_edge_count(p: &ParsedInstance) -> usize {
    p.instance.initial.len()
        + p.instance
            .ops
            .iter()
            .filter(|op| matches!(op, Op::Update(u) if u.kind == UpdateKind::Insert))
            .count()
}

fn apsp_structure(p: &ParsedInstance, truth: &Truth, eps: f64, variant: Variant, seed: u64) -> Result<IncApsp, CliError> {
    IncApsp::new(&truth.g, eps, variant, seed, Some(final_edge_count(p))).map_err(|e| CliError::Usage(e.to_string()))
}

/// Incremental APSP replay; answers `? u v` markers.
pub fn run_apsp(p: &ParsedInstance, eps: f64, variant: Variant, seed: u64) -> Result<String, CliError> {
    let mut truth = Truth::new(p)?;
    let mut x = apsp_structure(p, &truth, eps, variant, seed)?;
    let mut out = String::new();
    for (op, &line) in p.instance.ops.iter().zip(&p.op_lines) {
        match op {
            Op::Update(u) => {
                truth.apply(u, line)?;
                x.update(u).map_err(|e| at_line(line, e))?;
            }
            Op::Pair(a, b) => answer(&mut out, op, x.query(*a, *b)),
            Op::Source(..) | Op::Offline(..) => {}
        }
    }
    Ok(out)
}

/// Builds the offline structure over all updates of the instance.
pub fn build_offline(p: &ParsedInstance, source: VertexId, eps: f64) -> Result<OfflineSssp, CliError> {
    let mut truth = Truth::new(p)?;
    let base = truth.g.clone();
    for (op, &line) in p.instance.ops.iter().zip(&p.op_lines) {
        if let Op::Update(u) = op {
            truth.apply(u, line)?;
        }
    }
    if source >= p.instance.n {
        return Err(CliError::Usage(format!("source {source} out of range for n = {}", p.instance.n)));
    }
    OfflineSssp::build(&base, &p.instance.updates(), source, eps).map_err(|e| CliError::Usage(e.to_string()))
}

/// Answers `?off v t` markers, and `?s v` markers at the version reached so
/// far in the file.
pub fn answer_offline(p: &ParsedInstance, off: &OfflineSssp) -> Result<String, CliError> {
    let mut out = String::new();
    let mut version = 0usize;
    for (op, &line) in p.instance.ops.iter().zip(&p.op_lines) {
        match *op {
            Op::Update(_) => version += 1,
            Op::Offline(v, t) => answer(&mut out, op, off.query(v, t).map_err(|e| at_line(line, e))?),
            Op::Source(v) => answer(&mut out, op, off.query(v, version).map_err(|e| at_line(line, e))?),
            Op::Pair(..) => {}
        }
    }
    Ok(out)
}

/// Cumulative work counters after `updates_applied` updates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub updates_applied: u64,
    pub queue_pops: u64,
    pub pushes: u64,
    pub edge_scans: u64,
    pub rank_increases: u64,
    pub shortcut_decreases: u64,
    pub wall_time_ns: u64,
}

fn sssp_row(ds: &SourceSssp, applied: u64, shortcut_decreases: u64, start: Instant) -> BenchRow {
    let st = ds.stats();
    BenchRow {
        updates_applied: applied,
        queue_pops: st.pops,
        pushes: st.pushes,
        edge_scans: st.edge_scans,
        rank_increases: ds.rank_increases().iter().map(|&r| u64::from(r)).sum(),
        shortcut_decreases,
        wall_time_ns: start.elapsed().as_nanos() as u64,
    }
}

/// Replays an SSSP workload, emitting a row every `every` updates and after
/// the last one.
pub fn bench_sssp(p: &ParsedInstance, source: VertexId, eps: f64, every: usize) -> Result<Vec<BenchRow>, CliError> {
    let mut truth = Truth::new(p)?;
    let base = truth.g.clone();
    let mut ds = source_structure(p, &truth, source, eps)?;
    let every = every.max(1) as u64;
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut applied = 0u64;
    for (op, &line) in p.instance.ops.iter().zip(&p.op_lines) {
        if let Op::Update(u) = op {
            check_source_update(u, source, line)?;
            truth.apply(u, line)?;
            ds.source_insert(&base, u.head, u.weight).map_err(|e| at_line(line, e))?;
            applied += 1;
            if applied % every == 0 {
                rows.push(sssp_row(&ds, applied, 0, start));
            }
        }
    }
    if rows.last().is_none_or(|r| r.updates_applied != applied) {
        rows.push(sssp_row(&ds, applied, 0, start));
    }
    Ok(rows)
}

fn apsp_row(x: &IncApsp, applied: u64, start: Instant) -> BenchRow {
    let mut row = BenchRow { updates_applied: applied, ..Default::default() };
    for s in 0..x.vertex_count() {
        for ds in [x.forward(s), x.reverse(s)] {
            let st = ds.stats();
            row.queue_pops += st.pops;
            row.pushes += st.pushes;
            row.edge_scans += st.edge_scans;
            row.rank_increases += ds.rank_increases().iter().map(|&r| u64::from(r)).sum::<u64>();
        }
    }
    row.shortcut_decreases = x.counters().shortcut_decreases;
    row.wall_time_ns = start.elapsed().as_nanos() as u64;
    row
}

/// Replays an APSP workload with counters summed over all structures.
pub fn bench_apsp(p: &ParsedInstance, eps: f64, variant: Variant, seed: u64, every: usize) -> Result<Vec<BenchRow>, CliError> {
    let mut truth = Truth::new(p)?;
    let mut x = apsp_structure(p, &truth, eps, variant, seed)?;
    let every = every.max(1) as u64;
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut applied = 0u64;
    for (op, &line) in p.instance.ops.iter().zip(&p.op_lines) {
        if let Op::Update(u) = op {
            truth.apply(u, line)?;
            x.update(u).map_err(|e| at_line(line, e))?;
            applied += 1;
            if applied % every == 0 {
                rows.push(apsp_row(&x, applied, start));
            }
        }
    }
    if rows.last().is_none_or(|r| r.updates_applied != applied) {
        rows.push(apsp_row(&x, applied, start));
    }
    Ok(rows)
}

pub fn write_csv<W: std::io::Write>(w: W, rows: &[BenchRow]) -> Result<(), csv::Error> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}
