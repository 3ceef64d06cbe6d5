//! Text formats: graph JSON, matrix JSON and Graphviz DOT.
//!
//! Writers are hand-rolled so that floats come out with a fixed number of
//! significant digits (17 for machine formats, which round-trips every
//! `f64` exactly). Readers go through `serde_json`, which supplies line and
//! column positions for syntax errors.

use std::fmt::Write as _;

use serde::Deserialize;
use thiserror::Error;

use crate::graph::{Edge, MetricGraph, Violation};
use crate::linalg::{LinalgError, SymMatrix};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed input at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid graph: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("invalid matrix: {0}")]
    Matrix(#[from] LinalgError),
    #[error("cannot write non-finite value {0}")]
    NonFinite(f64),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// Formats `x` like C's `%.{digits}g`.
pub fn format_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}", strip_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn machine_float(x: f64) -> Result<String, FormatError> {
    if x.is_finite() {
        Ok(format_sig(x, 17))
    } else {
        Err(FormatError::NonFinite(x))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    version: u32,
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
    boundary: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    id: usize,
    from: usize,
    to: usize,
    length: f64,
}

/// Graph JSON: `{"version":1,"vertices":[{"id":..}],"edges":[..],"boundary":[..]}`.
pub fn serialize_graph(g: &MetricGraph) -> Result<String, FormatError> {
    let mut s = String::new();
    write!(s, "{{\"version\":{FORMAT_VERSION},\"vertices\":[").unwrap();
    for (i, v) in g.vertices().iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        write!(s, "{{\"id\":{v}}}").unwrap();
    }
    s.push_str("],\"edges\":[");
    for (i, e) in g.edges().iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        write!(
            s,
            "{{\"id\":{},\"from\":{},\"to\":{},\"length\":{}}}",
            e.id,
            e.from,
            e.to,
            machine_float(e.length)?
        )
        .unwrap();
    }
    s.push_str("],\"boundary\":[");
    let b: Vec<_> = g.boundary().iter().map(|b| b.to_string()).collect();
    s.push_str(&b.join(","));
    s.push_str("]}\n");
    Ok(s)
}

pub fn deserialize_graph(text: &str) -> Result<MetricGraph, FormatError> {
    let file: GraphFile = serde_json::from_str(text)?;
    if file.version != FORMAT_VERSION {
        return Err(FormatError::Schema(format!(
            "unsupported version {} (expected {FORMAT_VERSION})",
            file.version
        )));
    }
    for (i, e) in file.edges.iter().enumerate() {
        if !(e.length.is_finite() && e.length > 0.0) {
            return Err(FormatError::Schema(format!(
                "edges[{i}] (id {}): length must be positive, got {}",
                e.id, e.length
            )));
        }
    }
    let g = MetricGraph::from_parts(
        file.vertices.iter().map(|v| v.id).collect(),
        file.edges
            .iter()
            .map(|e| Edge {
                id: e.id,
                from: e.from,
                to: e.to,
                length: e.length,
            })
            .collect(),
        file.boundary,
    );
    let violations = g.validate();
    if violations.is_empty() {
        Ok(g)
    } else {
        Err(FormatError::Invalid(violations))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    order: usize,
    entries: Vec<Vec<f64>>,
}

/// Matrix JSON: `{"order":k,"entries":[[..],..]}`.
pub fn serialize_matrix(a: &SymMatrix) -> Result<String, FormatError> {
    let k = a.order();
    let mut s = format!("{{\"order\":{k},\"entries\":[");
    for i in 0..k {
        if i > 0 {
            s.push(',');
        }
        s.push('[');
        for j in 0..k {
            if j > 0 {
                s.push(',');
            }
            s.push_str(&machine_float(a.get(i, j))?);
        }
        s.push(']');
    }
    s.push_str("]}\n");
    Ok(s)
}

/// Parses a matrix file; the matrix must be symmetric (see [`SymMatrix::from_rows`]).
pub fn deserialize_matrix(text: &str) -> Result<SymMatrix, FormatError> {
    let file: MatrixFile = serde_json::from_str(text)?;
    if file.entries.len() != file.order {
        return Err(FormatError::Schema(format!(
            "order is {} but {} rows are given",
            file.order,
            file.entries.len()
        )));
    }
    for (i, row) in file.entries.iter().enumerate() {
        if row.len() != file.order {
            return Err(FormatError::Schema(format!(
                "row {i} has {} entries, expected {}",
                row.len(),
                file.order
            )));
        }
    }
    Ok(SymMatrix::from_rows(&file.entries)?)
}

/// Undirected DOT rendering; boundary vertices are drawn as boxes labelled
/// with their boundary rank, edges are labelled with their length.
pub fn export_dot(g: &MetricGraph) -> String {
    let mut s = String::from("graph G {\n");
    for &v in g.vertices() {
        match g.boundary_rank(v) {
            Some(r) => writeln!(s, "  {v} [shape=box, label=\"{v} (b{})\"];", r + 1).unwrap(),
            None => writeln!(s, "  {v};").unwrap(),
        }
    }
    for e in g.edges() {
        writeln!(
            s,
            "  {} -- {} [label=\"{}\"];",
            e.from,
            e.to,
            format_sig(e.length, 6)
        )
        .unwrap();
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::attach;
    use crate::graph::Block;

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(1.0, 17), "1");
        assert_eq!(format_sig(-2.5, 17), "-2.5");
        assert_eq!(format_sig(std::f64::consts::PI, 17), "3.1415926535897931");
        assert_eq!(format_sig(std::f64::consts::PI, 6), "3.14159");
        assert_eq!(format_sig(1e-5, 6), "1e-5");
        assert_eq!(format_sig(123456.0, 6), "123456");
        assert_eq!(format_sig(1234567.0, 6), "1.23457e6");
        assert_eq!(format_sig(0.0001234, 6), "0.0001234");
        assert_eq!(format_sig(9.9999999, 6), "10");
        assert_eq!(format_sig(0.1, 17), "0.10000000000000001");
    }

    #[test]
    fn sig17_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 6.02e23, -7.25e-9] {
            let s = format_sig(x, 17);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    fn triangle() -> MetricGraph {
        let s = MetricGraph::segment(1.0).unwrap();
        let t = MetricGraph::segment(0.1).unwrap();
        attach(
            3,
            &[
                Block { graph: s.clone(), first: 0, second: 1 },
                Block { graph: t, first: 0, second: 2 },
                Block { graph: s, first: 1, second: 2 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn graph_round_trip() {
        let g = triangle();
        let text = serialize_graph(&g).unwrap();
        assert_eq!(
            text,
            "{\"version\":1,\"vertices\":[{\"id\":0},{\"id\":1},{\"id\":2}],\"edges\":[\
             {\"id\":0,\"from\":0,\"to\":1,\"length\":1},\
             {\"id\":1,\"from\":0,\"to\":2,\"length\":0.10000000000000001},\
             {\"id\":2,\"from\":1,\"to\":2,\"length\":1}],\"boundary\":[0,1,2]}\n"
        );
        let back = deserialize_graph(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(serialize_graph(&back).unwrap(), text);
    }

    #[test]
    fn negative_length_names_edge() {
        let text = r#"{"version":1,"vertices":[{"id":0},{"id":1}],
            "edges":[{"id":4,"from":0,"to":1,"length":-1.5}],"boundary":[0,1]}"#;
        let err = deserialize_graph(text).unwrap_err();
        assert!(matches!(err, FormatError::Schema(_)));
        assert!(err.to_string().contains("id 4"), "{err}");
    }

    #[test]
    fn syntax_errors_are_positioned() {
        let text = "{\"version\":1,\n\"vertices\":[{\"id\":0},\n oops]}";
        match deserialize_graph(text).unwrap_err() {
            FormatError::Syntax { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
        let unknown = r#"{"version":1,"vertices":[],"edges":[],"boundary":[],"extra":1}"#;
        assert!(matches!(deserialize_graph(unknown), Err(FormatError::Syntax { .. })));
    }

    #[test]
    fn invariant_violations_rejected() {
        let text = r#"{"version":1,"vertices":[{"id":0},{"id":1},{"id":2}],
            "edges":[{"id":0,"from":0,"to":1,"length":1}],"boundary":[0]}"#;
        assert!(matches!(deserialize_graph(text), Err(FormatError::Invalid(_))));
        let text = r#"{"version":2,"vertices":[{"id":0},{"id":1}],
            "edges":[{"id":0,"from":0,"to":1,"length":1}],"boundary":[0]}"#;
        assert!(matches!(deserialize_graph(text), Err(FormatError::Schema(_))));
    }

    #[test]
    fn matrix_round_trip_and_errors() {
        let a = SymMatrix::from_rows(&[vec![1.0, -0.1], vec![-0.1, 3.0]]).unwrap();
        let text = serialize_matrix(&a).unwrap();
        assert_eq!(text, "{\"order\":2,\"entries\":[[1,-0.10000000000000001],[-0.10000000000000001,3]]}\n");
        assert_eq!(deserialize_matrix(&text).unwrap(), a);
        assert!(matches!(
            deserialize_matrix(r#"{"order":2,"entries":[[1,2],[3,4]]}"#),
            Err(FormatError::Matrix(_))
        ));
        assert!(matches!(
            deserialize_matrix(r#"{"order":3,"entries":[[1,2],[2,4]]}"#),
            Err(FormatError::Schema(_))
        ));
    }

    #[test]
    fn dot_has_one_line_per_edge() {
        let g = MetricGraph::parallel(&[std::f64::consts::FRAC_PI_2, 1.3]).unwrap();
        let dot = export_dot(&g);
        assert_eq!(dot.matches(" -- ").count(), 2);
        assert!(dot.contains("label=\"1.5708\""));
        assert!(dot.starts_with("graph G {"));
    }
}
