//! Exclusivity graphs: witness projectors as vertices, orthogonality
//! (compatibility) as adjacency, and the basis partition as a clique cover.
//!
//! Vertex order is stable: separable projectors first (lexicographic in
//! j, s, k), then entangled (lexicographic in b, C, x, z), so exports are
//! byte-reproducible. Adjacency rows are bitsets sized to the vertex count.

use crate::error::{Error, Result};
use crate::mub::{FacetVector, PhaseSpace};
use crate::weyl::CMatrix;
use crate::witness::{
    mub_coset_map, orthogonal_symbolic, witness_set, NumericBackend, StabProjector, VertexRecord,
    WitnessSet,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Frobenius residual allowed between the summed witness set and its closed
/// form (p^3 I - A^r) tensor I.
pub const SIGMA_TOL: f64 = 1e-8;

/// Which orthogonality backend builds the adjacency.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Backend {
    /// Coset-algebra predicates; odd p only.
    Symbolic,
    /// Inner products of explicit state vectors; any p.
    Numeric,
    /// Run both and fail loudly on any disagreement.
    Both,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symbolic" => Ok(Backend::Symbolic),
            "numeric" => Ok(Backend::Numeric),
            "both" => Ok(Backend::Both),
            other => Err(Error::Parse(format!("unknown backend '{other}'"))),
        }
    }
}

/// Fixed-size bitset; words are u64, least significant bit first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitSet {
    words: Vec<u64>,
    nbits: usize,
}

impl BitSet {
    pub fn new(nbits: usize) -> Self {
        Self {
            words: vec![0; nbits.div_ceil(64)],
            nbits,
        }
    }

    pub fn len(&self) -> usize {
        self.nbits
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.nbits);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// self &= !other
    pub fn subtract(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    /// popcount of self & other
    pub fn intersection_count(&self, other: &BitSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// First set bit in self & other, if any.
    pub fn first_common(&self, other: &BitSet) -> Option<usize> {
        for (wi, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let w = a & b;
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }
}

/// An exclusivity graph, optionally carrying the witness projectors it was
/// built from (imported graphs carry structure only).
pub struct ExclusivityGraph {
    pub p: u32,
    pub facet: Option<FacetVector>,
    pub projectors: Option<Vec<StabProjector>>,
    adjacency: Vec<BitSet>,
    pub partition: Vec<Vec<usize>>,
    num_edges: usize,
}

impl ExclusivityGraph {
    /// Builds the graph for facet r with the requested backend.
    pub fn build(ps: &PhaseSpace, r: &FacetVector, backend: Backend) -> Result<Self> {
        let ws = witness_set(ps, r)?;
        let n = ws.projectors.len();
        let decide_numeric = |ws: &WitnessSet| -> Vec<BitSet> {
            let nb = NumericBackend::build(ps, ws);
            let mut adj = vec![BitSet::new(n); n];
            for i in 0..n {
                for j in (i + 1)..n {
                    if nb.orthogonal(i, j) {
                        adj[i].insert(j);
                        adj[j].insert(i);
                    }
                }
            }
            adj
        };
        let decide_symbolic = |ws: &WitnessSet| -> Result<Vec<BitSet>> {
            let map = mub_coset_map(ps)?;
            let mut adj = vec![BitSet::new(n); n];
            for i in 0..n {
                for j in (i + 1)..n {
                    if orthogonal_symbolic(&ws.projectors[i], &ws.projectors[j], &map) {
                        adj[i].insert(j);
                        adj[j].insert(i);
                    }
                }
            }
            Ok(adj)
        };
        let adjacency = match backend {
            Backend::Numeric => decide_numeric(&ws),
            Backend::Symbolic => decide_symbolic(&ws)?,
            Backend::Both => {
                let num = decide_numeric(&ws);
                let sym = decide_symbolic(&ws)?;
                let mut disagreements = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        if num[i].contains(j) != sym[i].contains(j) {
                            disagreements.push((i, j));
                        }
                    }
                }
                if !disagreements.is_empty() {
                    let count = disagreements.len();
                    disagreements.truncate(8);
                    return Err(Error::BackendMismatch {
                        count,
                        first: disagreements,
                    });
                }
                num
            }
        };
        let num_edges = adjacency.iter().map(BitSet::count_ones).sum::<usize>() / 2;
        let g = Self {
            p: ps.p(),
            facet: Some(r.clone()),
            projectors: Some(ws.projectors),
            adjacency,
            partition: ws.classes,
            num_edges,
        };
        g.check_partition_cliques()?;
        Ok(g)
    }

    /// Builds a graph from raw parts; used by the importers.
    pub fn from_parts(
        p: u32,
        facet: Option<FacetVector>,
        projectors: Option<Vec<StabProjector>>,
        edges: &[(usize, usize)],
        n: usize,
        partition: Option<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let mut adjacency = vec![BitSet::new(n); n];
        let mut num_edges = 0;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Parse(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::Parse(format!("self-loop on vertex {u}")));
            }
            if !adjacency[u].contains(v) {
                adjacency[u].insert(v);
                adjacency[v].insert(u);
                num_edges += 1;
            }
        }
        let partition =
            partition.unwrap_or_else(|| (0..n).map(|v| vec![v]).collect::<Vec<_>>());
        let mut seen = vec![false; n];
        for class in &partition {
            for &v in class {
                if v >= n || seen[v] {
                    return Err(Error::Parse(format!(
                        "partition must list every vertex exactly once (vertex {v})"
                    )));
                }
                seen[v] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Parse(
                "partition does not cover every vertex".to_string(),
            ));
        }
        let g = Self {
            p,
            facet,
            projectors,
            adjacency,
            partition,
            num_edges,
        };
        g.check_partition_cliques()?;
        Ok(g)
    }

    /// Every partition class must be a clique; the solver's bound relies on it.
    fn check_partition_cliques(&self) -> Result<()> {
        for (ci, class) in self.partition.iter().enumerate() {
            for (a, &u) in class.iter().enumerate() {
                for &v in &class[a + 1..] {
                    if !self.is_adjacent(u, v) {
                        return Err(Error::PartitionNotClique { class: ci, u, v });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.num_edges
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &BitSet {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].count_ones()
    }

    pub fn degree_multiset(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.vertex_count()).map(|v| self.degree(v)).collect();
        d.sort_unstable();
        d
    }

    /// Vertex-induced subgraph; vertices are relabeled by position in `verts`
    /// and the partition is restricted accordingly (empty classes dropped).
    pub fn induced(&self, verts: &[usize]) -> Result<Self> {
        let mut index = std::collections::HashMap::new();
        for (i, &v) in verts.iter().enumerate() {
            if v >= self.vertex_count() || index.insert(v, i).is_some() {
                return Err(Error::Parse(format!("bad vertex list entry {v}")));
            }
        }
        let mut edges = Vec::new();
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.is_adjacent(u, v) {
                    edges.push((i, j));
                }
            }
        }
        let mut partition = Vec::new();
        for class in &self.partition {
            let restricted: Vec<usize> = class
                .iter()
                .filter_map(|v| index.get(v).copied())
                .collect();
            if !restricted.is_empty() {
                partition.push(restricted);
            }
        }
        Self::from_parts(self.p, None, None, &edges, verts.len(), Some(partition))
    }

    /// DIMACS undirected graph format: `p edge N M` then 1-indexed `e u v`
    /// lines in ascending order.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "p edge {} {}\n",
            self.vertex_count(),
            self.num_edges
        ));
        for u in 0..self.vertex_count() {
            for v in self.adjacency[u].iter_ones() {
                if v > u {
                    out.push_str(&format!("e {} {}\n", u + 1, v + 1));
                }
            }
        }
        out
    }

    /// Parses DIMACS; `c` comment lines are skipped.
    pub fn from_dimacs(text: &str, partition: Option<Vec<Vec<usize>>>) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("p") => {
                    let kind = parts.next().unwrap_or("");
                    if kind != "edge" && kind != "col" {
                        return Err(Error::Parse(format!("unsupported problem line '{line}'")));
                    }
                    n = Some(
                        parts
                            .next()
                            .and_then(|s| s.parse::<usize>().ok())
                            .ok_or_else(|| Error::Parse("bad vertex count".to_string()))?,
                    );
                }
                Some("e") => {
                    let u: usize = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::Parse(format!("bad edge line '{line}'")))?;
                    let v: usize = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::Parse(format!("bad edge line '{line}'")))?;
                    if u == 0 || v == 0 {
                        return Err(Error::Parse("DIMACS vertices are 1-indexed".to_string()));
                    }
                    edges.push((u - 1, v - 1));
                }
                _ => return Err(Error::Parse(format!("unrecognized line '{line}'"))),
            }
        }
        let n = n.ok_or_else(|| Error::Parse("missing 'p edge' line".to_string()))?;
        Self::from_parts(0, None, None, &edges, n, partition)
    }

    /// JSON export with vertex records, edge list, and partition.
    pub fn to_json(&self) -> Result<String> {
        let vertices = match &self.projectors {
            Some(projs) => {
                let basis_of = self.basis_of_vertex();
                projs
                    .iter()
                    .enumerate()
                    .map(|(id, pr)| VertexRecord::new(id, basis_of[id], pr))
                    .collect()
            }
            None => Vec::new(),
        };
        let mut edges = Vec::new();
        for u in 0..self.vertex_count() {
            for v in self.adjacency[u].iter_ones() {
                if v > u {
                    edges.push([u, v]);
                }
            }
        }
        let doc = GraphJson {
            p: self.p,
            facet: self.facet.as_ref().map(|f| f.components().to_vec()),
            vertex_count: self.vertex_count(),
            vertices,
            edges,
            partition: self.partition.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphJson = serde_json::from_str(text)?;
        let edges: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
        let facet = match doc.facet {
            Some(c) if doc.p >= 2 => Some(FacetVector::new(c, doc.p)?),
            _ => None,
        };
        Self::from_parts(
            doc.p,
            facet,
            None,
            &edges,
            doc.vertex_count,
            Some(doc.partition),
        )
    }

    /// JSON sidecar for the partition (zero-based vertex ids), for use next
    /// to a DIMACS file.
    pub fn partition_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&PartitionJson {
            classes: self.partition.clone(),
        })?)
    }

    pub fn parse_partition_json(text: &str) -> Result<Vec<Vec<usize>>> {
        let doc: PartitionJson = serde_json::from_str(text)?;
        Ok(doc.classes)
    }

    /// Class index of each vertex.
    pub fn basis_of_vertex(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.vertex_count()];
        for (ci, class) in self.partition.iter().enumerate() {
            for &v in class {
                out[v] = ci;
            }
        }
        out
    }

    /// JSON-lines dump of the witness projectors, one record per line.
    pub fn projector_jsonl(&self) -> Result<String> {
        let projs = self
            .projectors
            .as_ref()
            .ok_or_else(|| Error::Parse("graph carries no projector metadata".to_string()))?;
        let basis_of = self.basis_of_vertex();
        let mut out = String::new();
        for (id, pr) in projs.iter().enumerate() {
            let rec = VertexRecord::new(id, basis_of[id], pr);
            out.push_str(&serde_json::to_string(&rec)?);
            out.push('\n');
        }
        Ok(out)
    }
}

impl PartialEq for ExclusivityGraph {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.adjacency == other.adjacency
            && self.partition == other.partition
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    p: u32,
    facet: Option<Vec<u32>>,
    vertex_count: usize,
    vertices: Vec<VertexRecord>,
    edges: Vec<[usize; 2]>,
    partition: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    classes: Vec<Vec<usize>>,
}

/// The witness operator Sigma^r: the sum of all witness projectors, checked
/// against the closed form (p^3 I - A^r) tensor I to within [`SIGMA_TOL`].
pub fn sigma_operator(ps: &PhaseSpace, r: &FacetVector) -> Result<CMatrix> {
    let (sigma, residual) = sigma_operator_with_residual(ps, r)?;
    if residual > SIGMA_TOL {
        return Err(Error::Construction(format!(
            "witness operator residual {residual:.3e} against the closed form"
        )));
    }
    Ok(sigma)
}

/// Same as [`sigma_operator`] but returns the residual instead of gating it.
pub fn sigma_operator_with_residual(
    ps: &PhaseSpace,
    r: &FacetVector,
) -> Result<(CMatrix, f64)> {
    let ws = witness_set(ps, r)?;
    let nb = NumericBackend::build(ps, &ws);
    let d = ps.dim() * ps.dim();
    let mut sigma = CMatrix::zeros(d, d);
    for v in &nb.vectors {
        sigma += v * v.adjoint();
    }
    let idx = ps
        .facet_index(r)
        .ok_or_else(|| Error::InvalidFacet(format!("{r} not in family")))?;
    let p3 = (ps.p() as f64).powi(3);
    let closed = (CMatrix::identity(ps.dim(), ps.dim()) * Complex64::new(p3, 0.0)
        - ps.facet_op(idx))
    .kronecker(&CMatrix::identity(ps.dim(), ps.dim()));
    let residual = (&sigma - closed).norm();
    Ok((sigma, residual))
}

/// Eigenvalue multiset of the adjacency matrix, ascending; an isomorphism
/// invariant used to compare facet graphs.
pub fn adjacency_spectrum(g: &ExclusivityGraph) -> Vec<f64> {
    let n = g.vertex_count();
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for u in 0..n {
        for v in g.neighbors(u).iter_ones() {
            m[(u, v)] = 1.0;
        }
    }
    let mut eig: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}
