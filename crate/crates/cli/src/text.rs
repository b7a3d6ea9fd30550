//! Instance files and serialized offline structures.
//!
//! Instance format: a header `n m0`, then `m0` lines `u v w`, then one
//! operation per line:
//!
//! ```text
//! + u v w     insert
//! ~ u v w     decrease
//! ? u v       all-pairs query
//! ?s v        single-source query
//! ?off v t    offline query at version t
//! ```
//!
//! Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;
use std::str::FromStr;

use incsp_core::graph::check_weight;
use incsp_core::offline::OfflineParts;
use incsp_core::{Instance, Op, Update, VertexId};

use crate::CliError;

/// An instance plus the source line of every operation.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedInstance {
    pub instance: Instance,
    pub op_lines: Vec<usize>,
}

struct Tokens<'a> {
    line: usize,
    it: std::str::SplitWhitespace<'a>,
}

impl<'a> Tokens<'a> {
    fn next<T: FromStr>(&mut self, what: &str) -> Result<T, CliError> {
        let tok = self.it.next().ok_or_else(|| CliError::parse(self.line, format!("missing {what}")))?;
        tok.parse().map_err(|_| CliError::parse(self.line, format!("bad {what} `{tok}`")))
    }

    fn vertex(&mut self, n: usize) -> Result<VertexId, CliError> {
        let v: VertexId = self.next("vertex")?;
        if v >= n {
            return Err(CliError::parse(self.line, format!("vertex {v} out of range for n = {n}")));
        }
        Ok(v)
    }

    fn weight(&mut self) -> Result<f64, CliError> {
        let w: f64 = self.next("weight")?;
        check_weight(w, None).map_err(|e| CliError::parse(self.line, e.to_string()))?;
        Ok(w)
    }

    fn end(mut self) -> Result<(), CliError> {
        match self.it.next() {
            None => Ok(()),
            Some(tok) => Err(CliError::parse(self.line, format!("unexpected trailing token `{tok}`"))),
        }
    }
}

pub fn parse_instance(src: &str) -> Result<ParsedInstance, CliError> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| CliError::parse(1, "empty instance"))?;
    let mut t = Tokens { line: hl, it: header.split_whitespace() };
    let n: usize = t.next("vertex count")?;
    let m0: usize = t.next("edge count")?;
    t.end()?;
    let mut inst = Instance { n, initial: Vec::with_capacity(m0), ops: Vec::new() };
    let mut op_lines = Vec::new();
    for _ in 0..m0 {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| CliError::parse(hl, format!("expected {m0} initial edges, found {}", inst.initial.len())))?;
        let mut t = Tokens { line: ln, it: l.split_whitespace() };
        let e = (t.vertex(n)?, t.vertex(n)?, t.weight()?);
        t.end()?;
        inst.initial.push(e);
    }
    for (ln, l) in lines {
        let mut t = Tokens { line: ln, it: l.split_whitespace() };
        let kind: String = t.next("operation")?;
        let op = match kind.as_str() {
            "+" => Op::Update(Update::insert(t.vertex(n)?, t.vertex(n)?, t.weight()?)),
            "~" => Op::Update(Update::decrease(t.vertex(n)?, t.vertex(n)?, t.weight()?)),
            "?" => Op::Pair(t.vertex(n)?, t.vertex(n)?),
            "?s" => Op::Source(t.vertex(n)?),
            "?off" => Op::Offline(t.vertex(n)?, t.next("version")?),
            other => return Err(CliError::parse(ln, format!("unknown operation `{other}`"))),
        };
        t.end()?;
        inst.ops.push(op);
        op_lines.push(ln);
    }
    Ok(ParsedInstance { instance: inst, op_lines })
}

pub fn format_op(op: &Op) -> String {
    match *op {
        Op::Update(u) => {
            let sym = match u.kind {
                incsp_core::UpdateKind::Insert => '+',
                incsp_core::UpdateKind::Decrease => '~',
            };
            format!("{sym} {} {} {}", u.tail, u.head, u.weight)
        }
        Op::Pair(u, v) => format!("? {u} {v}"),
        Op::Source(v) => format!("?s {v}"),
        Op::Offline(v, t) => format!("?off {v} {t}"),
    }
}

pub fn format_instance(inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", inst.n, inst.initial.len()).unwrap();
    for &(u, v, w) in &inst.initial {
        writeln!(out, "{u} {v} {w}").unwrap();
    }
    for op in &inst.ops {
        out.push_str(&format_op(op));
        out.push('\n');
    }
    out
}

/// Renders an estimate; unreachable is `inf`.
pub fn format_value(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => "inf".into(),
    }
}

const OFFLINE_MAGIC: &str = "incsp-offline 1";

/// Header `n Δ ξ source nW`, then per vertex
/// `reach count ts est ts est ...` with `reach` = `-` if never reachable.
pub fn format_offline(p: &OfflineParts) -> String {
    let mut out = String::new();
    writeln!(out, "{OFFLINE_MAGIC}").unwrap();
    writeln!(out, "{} {} {} {} {}", p.n, p.delta, p.xi, p.source, p.virtual_weight).unwrap();
    for (reach, entries) in p.reach_time.iter().zip(&p.collections) {
        match reach {
            Some(t) => write!(out, "{t}").unwrap(),
            None => out.push('-'),
        }
        write!(out, " {}", entries.len()).unwrap();
        for (ts, est) in entries {
            write!(out, " {ts} {est}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_offline(src: &str) -> Result<OfflineParts, CliError> {
    let mut lines = src.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l.trim() == OFFLINE_MAGIC => {}
        _ => return Err(CliError::parse(1, format!("expected `{OFFLINE_MAGIC}`"))),
    }
    let (hl, header) = lines.next().ok_or_else(|| CliError::parse(2, "missing header"))?;
    let mut t = Tokens { line: hl, it: header.split_whitespace() };
    let n: usize = t.next("vertex count")?;
    let delta: usize = t.next("update count")?;
    let xi: f64 = t.next("accuracy")?;
    let source: usize = t.next("source")?;
    let virtual_weight: f64 = t.next("virtual weight")?;
    t.end()?;
    let mut reach_time = Vec::with_capacity(n);
    let mut collections = Vec::with_capacity(n);
    for v in 0..n {
        let (ln, l) = lines.next().ok_or_else(|| CliError::parse(hl, format!("missing line for vertex {v}")))?;
        let mut t = Tokens { line: ln, it: l.split_whitespace() };
        let reach: String = t.next("reach time")?;
        reach_time.push(if reach == "-" {
            None
        } else {
            Some(reach.parse().map_err(|_| CliError::parse(ln, format!("bad reach time `{reach}`")))?)
        });
        let count: usize = t.next("entry count")?;
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            entries.push((t.next("version")?, t.next("estimate")?));
        }
        t.end()?;
        collections.push(entries);
    }
    Ok(OfflineParts { n, delta, xi, source, virtual_weight, reach_time, collections })
}
