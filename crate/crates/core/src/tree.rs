//! Finite labeled trees with leaf/frontier marks.
//!
//! Every truncation of the infinite construction is materialized as a
//! [`FiniteTree`]. Vertices are opaque `usize` handles; the label is the
//! stable identity across regenerations. A vertex of degree one is either a
//! genuine leaf or a frontier vertex whose remaining neighbors were cut off
//! by truncation, and the two are never confused.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::TreeError;

pub type Vertex = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Interior,
    Leaf,
    Frontier,
}

impl Kind {
    /// Single-letter tag used by canonical codes. Interior vertices carry no tag.
    pub fn tag(self) -> &'static str {
        match self {
            Kind::Interior => "",
            Kind::Leaf => "L",
            Kind::Frontier => "F",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTree {
    labels: Vec<String>,
    kinds: Vec<Kind>,
    adj: Vec<Vec<Vertex>>,
    index: HashMap<String, Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedFiniteTree {
    pub tree: FiniteTree,
    pub root: Vertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
    Edgelist,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            "edgelist" => Ok(ExportFormat::Edgelist),
            other => Err(format!("unknown format `{other}` (dot, json, edgelist)")),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExportFormat::Dot => "dot",
            ExportFormat::Json => "json",
            ExportFormat::Edgelist => "edgelist",
        })
    }
}

impl FiniteTree {
    /// Builds a tree from explicit labels, kinds and edges, checking every
    /// structural invariant.
    pub fn new(
        labels: Vec<String>,
        kinds: Vec<Kind>,
        edges: &[(Vertex, Vertex)],
    ) -> Result<Self, TreeError> {
        let n = labels.len();
        if n == 0 {
            return Err(TreeError::NotATree("no vertices".into()));
        }
        if kinds.len() != n {
            return Err(TreeError::NotATree("kind count differs from vertex count".into()));
        }
        if edges.len() != n - 1 {
            return Err(TreeError::NotATree(format!(
                "{} vertices need {} edges, got {}",
                n,
                n - 1,
                edges.len()
            )));
        }
        let mut index = HashMap::with_capacity(n);
        for (v, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), v).is_some() {
                return Err(TreeError::DuplicateLabel(l.clone()));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(TreeError::UnknownVertex(a.max(b)));
            }
            if a == b {
                return Err(TreeError::NotATree(format!("self-loop at `{}`", labels[a])));
            }
            if adj[a].contains(&b) {
                return Err(TreeError::NotATree(format!(
                    "parallel edge `{}`-`{}`",
                    labels[a], labels[b]
                )));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let t = FiniteTree {
            labels,
            kinds,
            adj,
            index,
        };
        if t.bfs_distances(0).iter().any(Option::is_none) {
            return Err(TreeError::NotATree("disconnected".into()));
        }
        for v in 0..n {
            let d = t.adj[v].len();
            match t.kinds[v] {
                Kind::Leaf if d > 1 => {
                    return Err(TreeError::NotATree(format!(
                        "`{}` is marked leaf but has degree {d}",
                        t.labels[v]
                    )))
                }
                Kind::Interior if d == 1 => {
                    return Err(TreeError::NotATree(format!(
                        "`{}` is marked interior but has degree 1",
                        t.labels[v]
                    )))
                }
                _ => {}
            }
        }
        Ok(t)
    }

    /// Builds a tree whose kinds are inferred from degree: degree-1 vertices
    /// become genuine leaves, everything else interior.
    pub fn from_edges(labels: Vec<String>, edges: &[(Vertex, Vertex)]) -> Result<Self, TreeError> {
        let mut deg = vec![0usize; labels.len()];
        for &(a, b) in edges {
            if let Some(d) = deg.get_mut(a) {
                *d += 1;
            }
            if let Some(d) = deg.get_mut(b) {
                *d += 1;
            }
        }
        let kinds = deg
            .iter()
            .map(|&d| if d == 1 { Kind::Leaf } else { Kind::Interior })
            .collect();
        FiniteTree::new(labels, kinds, edges)
    }

    /// Convenience constructor from label pairs; see [`FiniteTree::single`]
    /// for the one-vertex tree.
    pub fn from_labeled_edges(edges: &[(&str, &str)]) -> Result<Self, TreeError> {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut pairs = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            let mut ends = [0; 2];
            for (slot, s) in ends.iter_mut().zip([a, b]) {
                *slot = *index.entry(s).or_insert_with(|| {
                    labels.push(s.to_string());
                    labels.len() - 1
                });
            }
            pairs.push((ends[0], ends[1]));
        }
        FiniteTree::from_edges(labels, &pairs)
    }

    pub fn single(label: &str, kind: Kind) -> Self {
        FiniteTree::new(vec![label.to_string()], vec![kind], &[]).expect("single vertex is a tree")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.labels.len()
    }

    pub fn label(&self, v: Vertex) -> &str {
        &self.labels[v]
    }

    pub fn kind(&self, v: Vertex) -> Kind {
        self.kinds[v]
    }

    pub fn vertex(&self, label: &str) -> Option<Vertex> {
        self.index.get(label).copied()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn degree(&self, v: Vertex) -> Result<usize, TreeError> {
        self.adj
            .get(v)
            .map(Vec::len)
            .ok_or(TreeError::UnknownVertex(v))
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Genuine leaves. Frontier vertices are never reported even when they
    /// have degree one.
    pub fn leaves(&self) -> Vec<Vertex> {
        self.vertices()
            .filter(|&v| self.kinds[v] == Kind::Leaf)
            .collect()
    }

    /// Distances from `from` to every vertex, `None` where unreachable.
    pub fn bfs_distances(&self, from: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        dist[from] = Some(0);
        queue.push_back(from);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &u in &self.adj[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Deletes the genuine leaf `x` and its edge.
    ///
    /// The neighbor becomes a genuine leaf when it drops to degree one (or to
    /// degree zero, when `x` was one end of a single edge).
    pub fn remove_leaf(&self, x: Vertex) -> Result<FiniteTree, TreeError> {
        if x >= self.len() {
            return Err(TreeError::UnknownVertex(x));
        }
        if self.kinds[x] != Kind::Leaf || self.adj[x].len() != 1 {
            return Err(TreeError::NotALeaf(self.labels[x].clone()));
        }
        let nb = self.adj[x][0];
        let remap = |v: Vertex| if v > x { v - 1 } else { v };
        let mut labels = Vec::with_capacity(self.len() - 1);
        let mut kinds = Vec::with_capacity(self.len() - 1);
        for v in self.vertices().filter(|&v| v != x) {
            labels.push(self.labels[v].clone());
            let mut k = self.kinds[v];
            if v == nb && k == Kind::Interior && self.adj[v].len() <= 2 {
                k = Kind::Leaf;
            }
            kinds.push(k);
        }
        let edges: Vec<_> = self
            .edges()
            .filter(|&(a, b)| a != x && b != x)
            .map(|(a, b)| (remap(a), remap(b)))
            .collect();
        FiniteTree::new(labels, kinds, &edges)
    }

    /// Glues a fresh copy of `s` onto every vertex of `hosts`, identifying
    /// the copy's root with the host. Copy labels are `<host>/<label>`.
    pub fn attach_sum(&self, hosts: &[Vertex], s: &RootedFiniteTree) -> Result<FiniteTree, TreeError> {
        let mut labels = self.labels.clone();
        let mut kinds = self.kinds.clone();
        let mut edges: Vec<_> = self.edges().collect();
        for &w in hosts {
            if w >= self.len() {
                return Err(TreeError::UnknownVertex(w));
            }
            let mut local = vec![usize::MAX; s.tree.len()];
            local[s.root] = w;
            for v in s.tree.vertices().filter(|&v| v != s.root) {
                labels.push(format!("{}/{}", self.labels[w], s.tree.labels[v]));
                kinds.push(s.tree.kinds[v]);
                local[v] = labels.len() - 1;
            }
            for (a, b) in s.tree.edges() {
                edges.push((local[a], local[b]));
            }
        }
        let mut deg = vec![0usize; labels.len()];
        for &(a, b) in &edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        for &w in hosts {
            if kinds[w] == Kind::Leaf && deg[w] > 1 {
                kinds[w] = Kind::Interior;
            }
        }
        FiniteTree::new(labels, kinds, &edges)
    }

    /// Induced subtree on the vertices within distance `r` of `center`.
    ///
    /// A vertex at distance exactly `r` that lost a neighbor becomes a
    /// frontier vertex, unless it is a genuine leaf.
    pub fn ball(&self, center: Vertex, r: usize) -> Result<FiniteTree, TreeError> {
        if center >= self.len() {
            return Err(TreeError::UnknownVertex(center));
        }
        let dist = self.bfs_distances(center);
        let keep: Vec<Vertex> = self
            .vertices()
            .filter(|&v| dist[v].is_some_and(|d| d <= r))
            .collect();
        let mut new_index = vec![usize::MAX; self.len()];
        for (i, &v) in keep.iter().enumerate() {
            new_index[v] = i;
        }
        let labels = keep.iter().map(|&v| self.labels[v].clone()).collect();
        let kinds = keep
            .iter()
            .map(|&v| {
                let cut = self.adj[v].iter().any(|&u| new_index[u] == usize::MAX);
                match self.kinds[v] {
                    Kind::Leaf => Kind::Leaf,
                    _ if cut => Kind::Frontier,
                    k => k,
                }
            })
            .collect();
        let edges: Vec<_> = self
            .edges()
            .filter(|&(a, b)| new_index[a] != usize::MAX && new_index[b] != usize::MAX)
            .map(|(a, b)| (new_index[a], new_index[b]))
            .collect();
        FiniteTree::new(labels, kinds, &edges)
    }

    fn sorted_vertices(&self) -> Vec<Vertex> {
        let mut vs: Vec<_> = self.vertices().collect();
        vs.sort_by(|&a, &b| self.labels[a].cmp(&self.labels[b]));
        vs
    }

    fn sorted_edges(&self) -> Vec<(&str, &str)> {
        let mut es: Vec<(&str, &str)> = self
            .edges()
            .map(|(a, b)| {
                let (la, lb) = (self.labels[a].as_str(), self.labels[b].as_str());
                if la <= lb {
                    (la, lb)
                } else {
                    (lb, la)
                }
            })
            .collect();
        es.sort_unstable();
        es
    }

    /// Deterministic serialization; vertices and edges are sorted by label.
    pub fn export(&self, format: ExportFormat) -> Vec<u8> {
        match format {
            ExportFormat::Edgelist => self.export_edgelist(),
            ExportFormat::Json => self.export_json(),
            ExportFormat::Dot => self.export_dot(),
        }
    }

    fn export_edgelist(&self) -> Vec<u8> {
        let mut out = String::new();
        if self.len() == 1 {
            out.push_str(&self.labels[0]);
            out.push('\n');
        }
        for (a, b) in self.sorted_edges() {
            out.push_str(a);
            out.push('\t');
            out.push_str(b);
            out.push('\n');
        }
        out.into_bytes()
    }

    fn export_json(&self) -> Vec<u8> {
        let doc = JsonTree {
            vertices: self
                .sorted_vertices()
                .into_iter()
                .map(|v| JsonVertex {
                    label: self.labels[v].clone(),
                    kind: self.kinds[v],
                })
                .collect(),
            edges: self
                .sorted_edges()
                .into_iter()
                .map(|(a, b)| [a.to_string(), b.to_string()])
                .collect(),
        };
        let mut out = serde_json::to_vec(&doc).expect("tree serializes");
        out.push(b'\n');
        out
    }

    fn export_dot(&self) -> Vec<u8> {
        let mut out = String::from("graph T {\n");
        for v in self.sorted_vertices() {
            let attr = match self.kinds[v] {
                Kind::Interior => "",
                Kind::Leaf => " [shape=point]",
                Kind::Frontier => " [shape=none]",
            };
            out.push_str(&format!("  {}{};\n", dot_quote(&self.labels[v]), attr));
        }
        for (a, b) in self.sorted_edges() {
            out.push_str(&format!("  {} -- {};\n", dot_quote(a), dot_quote(b)));
        }
        out.push_str("}\n");
        out.into_bytes()
    }

    pub fn parse_json(bytes: &[u8]) -> Result<FiniteTree, TreeError> {
        let doc: JsonTree =
            serde_json::from_slice(bytes).map_err(|e| TreeError::Parse(e.to_string()))?;
        let mut index = HashMap::new();
        let mut labels = Vec::with_capacity(doc.vertices.len());
        let mut kinds = Vec::with_capacity(doc.vertices.len());
        for (i, v) in doc.vertices.into_iter().enumerate() {
            if index.insert(v.label.clone(), i).is_some() {
                return Err(TreeError::DuplicateLabel(v.label));
            }
            labels.push(v.label);
            kinds.push(v.kind);
        }
        let mut edges = Vec::with_capacity(doc.edges.len());
        for [a, b] in &doc.edges {
            let ia = *index
                .get(a)
                .ok_or_else(|| TreeError::Parse(format!("edge names unknown vertex `{a}`")))?;
            let ib = *index
                .get(b)
                .ok_or_else(|| TreeError::Parse(format!("edge names unknown vertex `{b}`")))?;
            edges.push((ia, ib));
        }
        FiniteTree::new(labels, kinds, &edges)
    }

    /// Parses an edge list. Kinds are not part of the format and are
    /// inferred from degree.
    pub fn parse_edgelist(bytes: &[u8]) -> Result<FiniteTree, TreeError> {
        let text = std::str::from_utf8(bytes).map_err(|e| TreeError::Parse(e.to_string()))?;
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |s: &str, labels: &mut Vec<String>| {
            *index.entry(s.to_string()).or_insert_with(|| {
                labels.push(s.to_string());
                labels.len() - 1
            })
        };
        let mut edges = Vec::new();
        for line in text.lines().filter(|l| !l.is_empty()) {
            match line.split_once('\t') {
                Some((a, b)) => {
                    let ia = intern(a, &mut labels);
                    let ib = intern(b, &mut labels);
                    edges.push((ia, ib));
                }
                None => {
                    intern(line, &mut labels);
                }
            }
        }
        FiniteTree::from_edges(labels, &edges)
    }
}

impl RootedFiniteTree {
    pub fn new(tree: FiniteTree, root: Vertex) -> Result<Self, TreeError> {
        if root >= tree.len() {
            return Err(TreeError::UnknownVertex(root));
        }
        Ok(RootedFiniteTree { tree, root })
    }
}

#[derive(Serialize, Deserialize)]
struct JsonVertex {
    label: String,
    kind: Kind,
}

#[derive(Serialize, Deserialize)]
struct JsonTree {
    vertices: Vec<JsonVertex>,
    edges: Vec<[String; 2]>,
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
