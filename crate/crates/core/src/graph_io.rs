//! JSON text format for [`EmbeddedGraph`]:
//! `{"vertices":[{"id":0,"x":0.0,"y":0.0},...],"edges":[[0,1],...]}` with edges `u<v`, sorted.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point;
use crate::graph::{EmbeddedGraph, GraphError};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed graph JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("vertices[{index}].id: expected {index}, found {found}")]
    VertexId { index: usize, found: u64 },
    #[error("edges[{index}]: {source}")]
    Edge {
        index: usize,
        #[source]
        source: GraphError,
    },
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: u64,
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphRecord {
    vertices: Vec<VertexRecord>,
    edges: Vec<[usize; 2]>,
}

pub fn serialize_graph(g: &EmbeddedGraph) -> String {
    let rec = GraphRecord {
        vertices: g
            .positions()
            .iter()
            .enumerate()
            .map(|(i, p)| VertexRecord { id: i as u64, x: p.x, y: p.y })
            .collect(),
        edges: g.edges().map(|(u, v)| [u, v]).collect(),
    };
    serde_json::to_string(&rec).expect("graph record is always serializable")
}

pub fn parse_graph(text: &str) -> Result<EmbeddedGraph, ParseError> {
    let rec: GraphRecord = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut pos = Vec::with_capacity(rec.vertices.len());
    for (index, v) in rec.vertices.iter().enumerate() {
        if v.id != index as u64 {
            return Err(ParseError::VertexId { index, found: v.id });
        }
        pos.push(Point::new(v.x, v.y));
    }
    let edges: Vec<(usize, usize)> = rec.edges.iter().map(|e| (e[0], e[1])).collect();
    EmbeddedGraph::from_edges(pos, &edges).map_err(|e| match e {
        GraphError::EndpointOutOfRange { index, .. }
        | GraphError::SelfLoop { index, .. }
        | GraphError::DuplicateEdge { index, .. } => ParseError::Edge { index, source: e },
        other => ParseError::Graph(other),
    })
}
