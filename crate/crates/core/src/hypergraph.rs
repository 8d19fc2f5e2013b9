//! Finite hypergraphs and their incidence matrices.
//!
//! A [`Hypergraph`] is a vertex count `m` together with an ordered list of
//! hyperedges. Duplicate hyperedges are kept as distinct entries (they change
//! both `N` and the mean-field dynamics), and singleton hyperedges are allowed.
//! Construction normalizes the edge list so that equal hypergraphs serialize
//! to identical bytes.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    m: usize,
    edges: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHypergraph {
    m: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Validates and normalizes a raw vertex count and edge list.
    ///
    /// Vertices inside each edge are sorted, then the edge list is sorted
    /// lexicographically. Duplicate edges survive normalization.
    pub fn new(m: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroVertices);
        }
        let mut covered = vec![false; m];
        let mut normalized = Vec::with_capacity(edges.len());
        for (idx, mut edge) in edges.into_iter().enumerate() {
            if edge.is_empty() {
                return Err(Error::EmptyEdge { edge: idx });
            }
            edge.sort_unstable();
            for w in edge.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::RepeatedVertex {
                        edge: idx,
                        vertex: w[0],
                    });
                }
            }
            if let Some(&v) = edge.last().filter(|&&v| v >= m) {
                return Err(Error::VertexOutOfRange {
                    edge: idx,
                    vertex: v,
                    m,
                });
            }
            for &v in &edge {
                covered[v] = true;
            }
            normalized.push(edge);
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(Error::IsolatedVertex(v));
        }
        normalized.sort();
        Ok(Hypergraph {
            m,
            edges: normalized,
        })
    }

    /// Number of vertices.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of hyperedges `N`, duplicates counted.
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &[usize] {
        &self.edges[idx]
    }

    pub fn incidence(&self) -> IncidenceMatrix {
        let mut entries = vec![0u8; self.edges.len() * self.m];
        for (row, edge) in self.edges.iter().enumerate() {
            for &v in edge {
                entries[row * self.m + v] = 1;
            }
        }
        IncidenceMatrix {
            rows: self.edges.len(),
            cols: self.m,
            entries,
        }
    }

    /// Indices of the hyperedges containing vertex `i`, in edge-list order.
    pub fn star(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.binary_search(&i).is_ok())
            .map(|(idx, _)| idx)
            .collect()
    }

    /// All stars at once; `stars()[i] == star(i)`.
    pub fn stars(&self) -> Vec<Vec<usize>> {
        let mut stars = vec![Vec::new(); self.m];
        for (idx, edge) in self.edges.iter().enumerate() {
            for &v in edge {
                stars[v].push(idx);
            }
        }
        stars
    }

    /// Looks up a named hypergraph.
    ///
    /// Accepted names: `tetrahedron`, `cube`, `octahedron`, `icosahedron`,
    /// `dodecahedron`, and the parametrized families `single_edge(m)`,
    /// `cycle(m)`, `path(m)`, `complete_graph(m)`. Platonic solids use their
    /// faces as hyperedges.
    pub fn builtin(name: &str) -> Result<Self> {
        let name = name.trim();
        let unknown = || Error::UnknownName(name.to_string());
        if let Some((family, rest)) = name.split_once('(') {
            let arg: usize = rest
                .strip_suffix(')')
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(unknown)?;
            return match family.trim() {
                "single_edge" => Self::single_edge(arg),
                "cycle" => Self::cycle(arg),
                "path" => Self::path(arg),
                "complete_graph" => Self::complete_graph(arg),
                _ => Err(unknown()),
            };
        }
        match name {
            "tetrahedron" => Ok(Self::tetrahedron()),
            "cube" => Ok(Self::cube()),
            "octahedron" => Ok(Self::octahedron()),
            "icosahedron" => Ok(Self::icosahedron()),
            "dodecahedron" => Ok(Self::dodecahedron()),
            _ => Err(unknown()),
        }
    }

    pub fn tetrahedron() -> Self {
        Self::new(
            4,
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .expect("valid")
    }

    /// The cube with one-based vertex labels 1..8 mapped to 0..7 and faces
    /// {1,2,3,4}, {5,6,7,8}, {1,2,6,5}, {2,3,7,6}, {3,4,8,7}, {1,4,8,5}.
    pub fn cube() -> Self {
        let faces: [[usize; 4]; 6] = [
            [1, 2, 3, 4],
            [5, 6, 7, 8],
            [1, 2, 6, 5],
            [2, 3, 7, 6],
            [3, 4, 8, 7],
            [1, 4, 8, 5],
        ];
        let edges = faces
            .iter()
            .map(|f| f.iter().map(|v| v - 1).collect())
            .collect();
        Self::new(8, edges).expect("valid")
    }

    /// Octahedron as the dual of the cube: one vertex per cube face, one
    /// triangular face per cube vertex.
    pub fn octahedron() -> Self {
        Self::cube().dual()
    }

    /// Icosahedron from the golden-ratio coordinates `(0, ±1, ±φ)` and cyclic
    /// permutations; faces are the mutually adjacent triples.
    pub fn icosahedron() -> Self {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let mut pts = Vec::with_capacity(12);
        for &a in &[-1.0, 1.0] {
            for &b in &[-phi, phi] {
                pts.push([0.0, a, b]);
                pts.push([a, b, 0.0]);
                pts.push([b, 0.0, a]);
            }
        }
        let adjacent = |i: usize, j: usize| {
            let d2: f64 = (0..3).map(|k| (pts[i][k] - pts[j][k]).powi(2)).sum();
            (d2 - 4.0).abs() < 1e-9
        };
        let mut edges = Vec::with_capacity(20);
        for i in 0..12 {
            for j in i + 1..12 {
                for k in j + 1..12 {
                    if adjacent(i, j) && adjacent(j, k) && adjacent(i, k) {
                        edges.push(vec![i, j, k]);
                    }
                }
            }
        }
        Self::new(12, edges).expect("valid")
    }

    /// Dodecahedron as the dual of the icosahedron.
    pub fn dodecahedron() -> Self {
        Self::icosahedron().dual()
    }

    /// Classical Pólya urn with `m` colors: a single hyperedge `{0..m}`.
    pub fn single_edge(m: usize) -> Result<Self> {
        Self::new(m, vec![(0..m).collect()])
    }

    pub fn cycle(m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::UnknownName(format!("cycle({m}) needs m >= 3")));
        }
        Self::new(m, (0..m).map(|i| vec![i, (i + 1) % m]).collect())
    }

    pub fn path(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::UnknownName(format!("path({m}) needs m >= 2")));
        }
        Self::new(m, (0..m - 1).map(|i| vec![i, i + 1]).collect())
    }

    pub fn complete_graph(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::UnknownName(format!(
                "complete_graph({m}) needs m >= 2"
            )));
        }
        let mut edges = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                edges.push(vec![i, j]);
            }
        }
        Self::new(m, edges)
    }

    /// Vertices become edges and edges become vertices.
    fn dual(&self) -> Self {
        Self::new(self.n_edges(), self.stars()).expect("dual of a covering hypergraph")
    }

    /// Random covering hypergraph for property tests: `m` in `1..=max_m`,
    /// `N` in `1..=max_edges`, uncovered vertices patched into random edges.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_m: usize, max_edges: usize) -> Self {
        let m = rng.random_range(1..=max_m.max(1));
        let n = rng.random_range(1..=max_edges.max(1));
        let mut edges: Vec<BTreeSet<usize>> = (0..n)
            .map(|_| {
                let size = rng.random_range(1..=m);
                let mut e = BTreeSet::new();
                while e.len() < size {
                    e.insert(rng.random_range(0..m));
                }
                e
            })
            .collect();
        for v in 0..m {
            if !edges.iter().any(|e| e.contains(&v)) {
                let k = rng.random_range(0..n);
                edges[k].insert(v);
            }
        }
        Self::new(m, edges.into_iter().map(|e| e.into_iter().collect()).collect())
            .expect("covering by construction")
    }

    /// Parses `{"m": <int>, "edges": [[<int>, ...], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawHypergraph = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        Self::new(raw.m, raw.edges)
    }

    /// Canonical compact JSON; stable bytes for a given hypergraph.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&RawHypergraph {
            m: self.m,
            edges: self.edges.clone(),
        })
        .expect("serializable")
    }

    /// Resolves `builtin:<name>` or raw JSON text.
    pub fn from_source(source: &str) -> Result<Self> {
        match source.trim().strip_prefix("builtin:") {
            Some(name) => Self::builtin(name),
            None => Self::from_json(source),
        }
    }
}

impl Serialize for Hypergraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawHypergraph {
            m: self.m,
            edges: self.edges.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hypergraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawHypergraph::deserialize(d)?;
        Hypergraph::new(raw.m, raw.edges).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

/// `N × m` 0/1 matrix; entry `(I, i)` is 1 iff vertex `i` lies in edge `I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, edge: usize, vertex: usize) -> u8 {
        self.entries[edge * self.cols + vertex]
    }

    pub fn row(&self, edge: usize) -> &[u8] {
        &self.entries[edge * self.cols..(edge + 1) * self.cols]
    }

    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|&e| e as usize).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.entry(r, c) as usize).sum())
            .collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}
