//! Line-oriented text formats for graphs, multidegrees and bundles.
//!
//! ```text
//! # theta graph
//! vertex 0 0
//! vertex 1 0
//! edge 0 0 1
//! edge 1 0 1
//! edge 2 0 1
//! ```
//!
//! A bundle file is a graph file followed by any of
//!
//! ```text
//! coord <edge> <side> <p/q>
//! deg <vertex>:<int> ...
//! glue <edge> <p/q> <p/q>
//! ```
//!
//! Missing coordinates take the default chart (0, 1, 2, ... per component in
//! edge order), missing degrees are 0 and missing gluing pairs are `(1, 1)`.
//! A multidegree line reads `multidegree <vertex>:<int> ...` with every
//! vertex listed in ascending id order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::One;

use crate::algebra::Rational;
use crate::curve::{GluedLineBundle, RationalCurveModel};
use crate::error::{Error, Result};
use crate::graph::{DualGraph, EdgeId, VertexId};
use crate::multidegree::Multidegree;

struct Line<'a> {
    number: usize,
    keyword: &'a str,
    args: Vec<&'a str>,
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let mut words = content.split_whitespace();
        let keyword = words.next()?;
        Some(Line {
            number: i + 1,
            keyword,
            args: words.collect(),
        })
    })
}

impl Line<'_> {
    fn expect_args(&self, n: usize) -> Result<()> {
        if self.args.len() == n {
            Ok(())
        } else {
            Err(Error::parse(
                self.number,
                format!(
                    "`{}` takes {n} arguments, found {}",
                    self.keyword,
                    self.args.len()
                ),
            ))
        }
    }

    fn arg<T: FromStr>(&self, i: usize, what: &str) -> Result<T> {
        self.args[i]
            .parse()
            .map_err(|_| Error::parse(self.number, format!("invalid {what} `{}`", self.args[i])))
    }

    fn fail(&self, err: Error) -> Error {
        match err {
            Error::Parse { .. } => err,
            other => Error::parse(self.number, other.to_string()),
        }
    }
}

fn parse_rational(line: &Line<'_>, i: usize) -> Result<Rational> {
    line.arg::<Rational>(i, "rational")
}

fn parse_assignment(line: &Line<'_>, token: &str) -> Result<(u32, i64)> {
    let bad = || {
        Error::parse(
            line.number,
            format!("expected <vertex>:<int>, found `{token}`"),
        )
    };
    let (v, d) = token.split_once(':').ok_or_else(bad)?;
    Ok((v.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?))
}

const BUNDLE_KEYWORDS: [&str; 3] = ["coord", "deg", "glue"];

/// Parses the graph lines of `text`. Bundle lines are skipped, so a bundle
/// file also reads as its underlying graph.
pub fn parse_graph(text: &str) -> Result<DualGraph> {
    parse_graph_lines(text).map(|(g, _)| g)
}

fn parse_graph_lines(text: &str) -> Result<(DualGraph, Vec<usize>)> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut vertex_lines = BTreeMap::new();
    let mut edge_lines = BTreeMap::new();
    let mut bundle_lines = Vec::new();
    for line in lines(text) {
        match line.keyword {
            "vertex" => {
                line.expect_args(2)?;
                let id: u32 = line.arg(0, "vertex id")?;
                let weight: i64 = line.arg(1, "weight")?;
                if vertex_lines.insert(id, line.number).is_some() {
                    return Err(line.fail(Error::DuplicateVertex(VertexId(id))));
                }
                if weight < 0 {
                    return Err(line.fail(Error::NegativeWeight {
                        vertex: VertexId(id),
                        weight,
                    }));
                }
                vertices.push((id, weight));
            }
            "edge" => {
                line.expect_args(3)?;
                let id: u32 = line.arg(0, "edge id")?;
                let u: u32 = line.arg(1, "vertex id")?;
                let v: u32 = line.arg(2, "vertex id")?;
                if edge_lines.insert(id, line.number).is_some() {
                    return Err(line.fail(Error::DuplicateEdge(EdgeId(id))));
                }
                edges.push((id, u, v));
            }
            k if BUNDLE_KEYWORDS.contains(&k) => bundle_lines.push(line.number),
            other => {
                return Err(Error::parse(
                    line.number,
                    format!("unknown keyword `{other}`"),
                ));
            }
        }
    }
    let graph = DualGraph::from_labeled(vertices, edges).map_err(|err| match &err {
        Error::DanglingEndpoint { edge, .. } => Error::parse(edge_lines[&edge.0], err.to_string()),
        _ => err,
    })?;
    Ok((graph, bundle_lines))
}

pub fn write_graph(g: &DualGraph) -> String {
    let mut out = String::new();
    for v in 0..g.vertex_count() {
        writeln!(out, "vertex {} {}", g.vertex_id(v), g.weight(v)).unwrap();
    }
    for e in g.edges() {
        writeln!(
            out,
            "edge {} {} {}",
            e.id,
            g.vertex_id(e.ends[0]),
            g.vertex_id(e.ends[1])
        )
        .unwrap();
    }
    out
}

/// Parses the single `multidegree` line in `text` against `g`.
pub fn parse_multidegree(text: &str, g: &DualGraph) -> Result<Multidegree> {
    let mut found = None;
    for line in lines(text) {
        if line.keyword != "multidegree" {
            return Err(Error::parse(
                line.number,
                format!("unknown keyword `{}`", line.keyword),
            ));
        }
        if found.is_some() {
            return Err(Error::parse(line.number, "more than one multidegree line"));
        }
        if line.args.len() != g.vertex_count() {
            return Err(line.fail(Error::DegreeLength {
                expected: g.vertex_count(),
                found: line.args.len(),
            }));
        }
        let mut values = Vec::with_capacity(line.args.len());
        for (v, token) in line.args.iter().enumerate() {
            let (id, d) = parse_assignment(&line, token)?;
            if VertexId(id) != g.vertex_id(v) {
                return Err(Error::parse(
                    line.number,
                    format!(
                        "expected vertex {} in position {}, found {id}",
                        g.vertex_id(v),
                        v + 1
                    ),
                ));
            }
            values.push(d);
        }
        found = Some(Multidegree::new(values));
    }
    found.ok_or_else(|| Error::parse(0, "no multidegree line"))
}

pub fn write_multidegree(g: &DualGraph, d: &Multidegree) -> String {
    let mut out = String::from("multidegree");
    for (v, value) in d.values().iter().enumerate() {
        write!(out, " {}:{}", g.vertex_id(v), value).unwrap();
    }
    out.push('\n');
    out
}

pub fn parse_bundle(text: &str) -> Result<GluedLineBundle> {
    let (graph, _) = parse_graph_lines(text)?;
    let defaults = RationalCurveModel::with_default_coords(graph.clone())
        .map_err(|err| Error::parse(0, err.to_string()))?;
    let mut coords = defaults.coords().to_vec();
    let mut degree = vec![0i64; graph.vertex_count()];
    let mut gluing = vec![[Rational::one(), Rational::one()]; graph.edge_count()];
    let mut seen_coords = BTreeMap::new();
    let mut seen_degrees = BTreeMap::new();
    let mut seen_glue = BTreeMap::new();

    let edge_of = |line: &Line<'_>| -> Result<usize> {
        let id: u32 = line.arg(0, "edge id")?;
        graph
            .edge_index(EdgeId(id))
            .ok_or_else(|| line.fail(Error::UnknownEdge(EdgeId(id))))
    };
    let mut last_line = 0;
    for line in lines(text) {
        last_line = line.number;
        match line.keyword {
            "coord" => {
                line.expect_args(3)?;
                let j = edge_of(&line)?;
                let side: usize = line.arg(1, "side")?;
                if side > 1 {
                    return Err(Error::parse(line.number, "side must be 0 or 1"));
                }
                if seen_coords.insert((j, side), line.number).is_some() {
                    return Err(Error::parse(line.number, "duplicate coord"));
                }
                coords[j][side] = parse_rational(&line, 2)?;
            }
            "deg" => {
                if line.args.is_empty() {
                    return Err(Error::parse(line.number, "`deg` needs <vertex>:<int>"));
                }
                for token in &line.args {
                    let (id, d) = parse_assignment(&line, token)?;
                    let v = graph
                        .vertex_index(VertexId(id))
                        .ok_or_else(|| Error::parse(line.number, format!("unknown vertex {id}")))?;
                    if seen_degrees.insert(v, line.number).is_some() {
                        return Err(Error::parse(
                            line.number,
                            format!("duplicate degree for vertex {id}"),
                        ));
                    }
                    degree[v] = d;
                }
            }
            "glue" => {
                line.expect_args(3)?;
                let j = edge_of(&line)?;
                if seen_glue.insert(j, line.number).is_some() {
                    return Err(Error::parse(line.number, "duplicate glue"));
                }
                gluing[j] = [parse_rational(&line, 1)?, parse_rational(&line, 2)?];
                if gluing[j].iter().any(num_traits::Zero::is_zero) {
                    return Err(line.fail(Error::ZeroGluing {
                        edge: graph.edge(j).id,
                    }));
                }
            }
            _ => {}
        }
    }
    let model = RationalCurveModel::new(graph, coords).map_err(|err| {
        let line = match &err {
            Error::CoordinateCollision { .. } => {
                seen_coords.values().max().copied().unwrap_or(last_line)
            }
            _ => last_line,
        };
        Error::parse(line, err.to_string())
    })?;
    GluedLineBundle::new(Arc::new(model), Multidegree::new(degree), gluing)
}

/// Writes every coordinate, degree and gluing pair explicitly.
pub fn write_bundle(b: &GluedLineBundle) -> String {
    let g = b.graph();
    let mut out = write_graph(g);
    for (e, pair) in g.edges().iter().zip(b.model().coords()) {
        for (side, c) in pair.iter().enumerate() {
            writeln!(out, "coord {} {side} {c}", e.id).unwrap();
        }
    }
    for (v, d) in b.degree().values().iter().enumerate() {
        writeln!(out, "deg {}:{d}", g.vertex_id(v)).unwrap();
    }
    for (e, pair) in g.edges().iter().zip(b.gluing()) {
        writeln!(out, "glue {} {} {}", e.id, pair[0], pair[1]).unwrap();
    }
    out
}
