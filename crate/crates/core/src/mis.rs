//! Exact maximum-independent-set search over exclusivity graphs.
//!
//! The solver branches over basis classes: every partition class is a clique,
//! so an independent set takes at most one vertex per class, and the bound
//! "chosen + number of undecided classes that still hold a compatible
//! candidate" is admissible. Classes are picked dynamically by fewest
//! remaining candidates; candidates are tried in ascending vertex id, then
//! the class is skipped. The search is single-threaded and deterministic:
//! the returned set is the first optimum encountered in this fixed order.
//!
//! Two independent cross-checks live here as well: plain exhaustive
//! enumeration over all 2^n subsets (small graphs), and exhaustive
//! enumeration over per-class choices.

use crate::error::{Error, Result};
use crate::graph::{BitSet, ExclusivityGraph};
use crate::mub::{hermitian_eigen_sorted, FacetVector, PhaseSpace};
use crate::witness::NumericBackend;
use serde::Serialize;
use std::time::{Duration, Instant};

/// A set of pairwise non-adjacent vertices, i.e. mutually nonorthogonal
/// projectors. `phase_point` records (u, v) when the set came from the
/// phase-space construction.
#[derive(Clone, Debug)]
pub struct IndependentSet {
    pub vertices: Vec<usize>,
    pub phase_point: Option<(FacetVector, FacetVector)>,
}

impl IndependentSet {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    /// Abort after this long and return the incumbent as a lower bound.
    pub timeout: Option<Duration>,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub set: IndependentSet,
    /// False when the search timed out; the size is then only a lower bound.
    pub exact: bool,
    pub nodes: u64,
}

struct Search<'g> {
    g: &'g ExclusivityGraph,
    class_masks: Vec<BitSet>,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl<'g> Search<'g> {
    fn run(&mut self, alive: BitSet, undecided: Vec<usize>) {
        self.nodes += 1;
        if self.nodes % 1024 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.timed_out = true;
                }
            }
        }
        if self.timed_out {
            return;
        }
        // classes that still offer a candidate, ordered by candidate count
        let mut live: Vec<(usize, usize)> = undecided
            .iter()
            .filter_map(|&ci| {
                let n = self.class_masks[ci].intersection_count(&alive);
                (n > 0).then_some((n, ci))
            })
            .collect();
        if self.current.len() + live.len() <= self.best.len() {
            return; // cannot beat the incumbent
        }
        if live.is_empty() {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            return;
        }
        live.sort_unstable();
        let (_, ci) = live[0];
        let rest: Vec<usize> = live[1..].iter().map(|&(_, c)| c).collect();
        let candidates: Vec<usize> = self.class_masks[ci]
            .iter_ones()
            .filter(|&v| alive.contains(v))
            .collect();
        for v in candidates {
            let mut next = alive.clone();
            next.subtract(self.g.neighbors(v));
            next.remove(v);
            self.current.push(v);
            self.run(next, rest.clone());
            self.current.pop();
            if self.timed_out {
                return;
            }
        }
        // skip this class entirely
        let mut next = alive;
        next.subtract(&self.class_masks[ci]);
        self.run(next, rest);
    }
}

/// Exact maximum independent set by branch and bound over the clique
/// partition. The size is deterministic; so is the returned set (fixed
/// traversal order).
pub fn max_independent_set(g: &ExclusivityGraph, opts: &SolveOptions) -> SolveOutcome {
    let n = g.vertex_count();
    let mut alive = BitSet::new(n);
    for v in 0..n {
        alive.insert(v);
    }
    let class_masks: Vec<BitSet> = g
        .partition
        .iter()
        .map(|class| {
            let mut m = BitSet::new(n);
            for &v in class {
                m.insert(v);
            }
            m
        })
        .collect();
    let mut search = Search {
        g,
        class_masks,
        best: Vec::new(),
        current: Vec::new(),
        nodes: 0,
        deadline: opts.timeout.map(|t| Instant::now() + t),
        timed_out: false,
    };
    let undecided: Vec<usize> = (0..g.partition.len()).collect();
    search.run(alive, undecided);
    let mut vertices = search.best;
    vertices.sort_unstable();
    debug_assert!(is_independent(g, &vertices));
    SolveOutcome {
        set: IndependentSet {
            vertices,
            phase_point: None,
        },
        exact: !search.timed_out,
        nodes: search.nodes,
    }
}

/// Checks pairwise non-adjacency.
pub fn is_independent(g: &ExclusivityGraph, vertices: &[usize]) -> bool {
    for (i, &u) in vertices.iter().enumerate() {
        for &v in &vertices[i + 1..] {
            if g.is_adjacent(u, v) {
                return false;
            }
        }
    }
    true
}

/// Independence number by exhaustive enumeration over all 2^n subsets,
/// computed as a subset DP. Only for n <= 25.
pub fn exhaustive_subsets_mis(g: &ExclusivityGraph) -> Result<usize> {
    let n = g.vertex_count();
    if n > 25 {
        return Err(Error::Parse(format!(
            "exhaustive enumeration limited to 25 vertices, got {n}"
        )));
    }
    let nbr: Vec<u32> = (0..n)
        .map(|v| {
            let mut m = 0u32;
            for u in g.neighbors(v).iter_ones() {
                m |= 1 << u;
            }
            m
        })
        .collect();
    let total = 1usize << n;
    let mut independent = vec![false; total];
    independent[0] = true;
    let mut best = 0usize;
    for mask in 1..total {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        if independent[rest] && (nbr[low] as usize & rest) == 0 {
            independent[mask] = true;
            best = best.max(mask.count_ones() as usize);
        }
    }
    Ok(best)
}

/// Independence number by exhaustive enumeration over per-class choices
/// (each class contributes one vertex or none). Slower than the solver but
/// entirely free of pruning.
pub fn exhaustive_by_classes(g: &ExclusivityGraph) -> usize {
    fn rec(g: &ExclusivityGraph, ci: usize, current: &mut Vec<usize>, best: &mut usize) {
        if ci == g.partition.len() {
            *best = (*best).max(current.len());
            return;
        }
        for &v in &g.partition[ci] {
            if current.iter().all(|&u| !g.is_adjacent(u, v)) {
                current.push(v);
                rec(g, ci + 1, current, best);
                current.pop();
            }
        }
        rec(g, ci + 1, current, best);
    }
    let mut best = 0;
    rec(g, 0, &mut Vec::new(), &mut best);
    best
}

/// Phase-space tolerance: witness values sit at 0 or 1 and are read off
/// against this margin.
const WIGNER_VALUE_TOL: f64 = 1e-6;

/// The constructive independent set at phase-space point (u, v): the
/// witness projectors assigning Wigner value 1, which for u != r number
/// exactly p^3 and are pairwise nonorthogonal. Odd p only.
pub fn phase_space_independent_set(
    ps: &PhaseSpace,
    g: &ExclusivityGraph,
    u: &FacetVector,
    v: &FacetVector,
) -> Result<IndependentSet> {
    if ps.p() == 2 {
        return Err(Error::OddPrimeOnly(
            2,
            "the phase-space construction uses the odd-p Wigner map",
        ));
    }
    let r = g
        .facet
        .as_ref()
        .ok_or_else(|| Error::Parse("graph carries no facet".to_string()))?;
    if u == r {
        return Err(Error::PhasePointAtFacet);
    }
    let ui = ps
        .facet_index(u)
        .ok_or_else(|| Error::InvalidFacet(format!("{u} not in family")))?;
    let vi = ps
        .facet_index(v)
        .ok_or_else(|| Error::InvalidFacet(format!("{v} not in family")))?;
    let projectors = g
        .projectors
        .as_ref()
        .ok_or_else(|| Error::Parse("graph carries no projector metadata".to_string()))?;
    let ws = crate::witness::WitnessSet {
        p: ps.p(),
        facet: r.clone(),
        projectors: projectors.clone(),
        classes: g.partition.clone(),
    };
    let nb = NumericBackend::build(ps, &ws);
    let point_op = ps.facet_op(ui).kronecker(ps.facet_op(vi));
    let mut vertices = Vec::new();
    for (i, psi) in nb.vectors.iter().enumerate() {
        let w = (psi.adjoint() * &point_op * psi)[(0, 0)].re;
        if (w - 1.0).abs() < WIGNER_VALUE_TOL {
            vertices.push(i);
        } else if w.abs() > WIGNER_VALUE_TOL {
            return Err(Error::Construction(format!(
                "witness projector {i} has Wigner value {w}, expected 0 or 1"
            )));
        }
    }
    let p3 = (ps.p() as usize).pow(3);
    if vertices.len() != p3 {
        return Err(Error::Construction(format!(
            "phase-space set has {} members, expected {p3}",
            vertices.len()
        )));
    }
    if !is_independent(g, &vertices) {
        return Err(Error::Construction(
            "phase-space set is not independent".to_string(),
        ));
    }
    Ok(IndependentSet {
        vertices,
        phase_point: Some((u.clone(), v.clone())),
    })
}

/// Two-sided certificate for the Lovasz number and the fractional packing
/// number, from the chain alpha <= quantum value <= theta <= alpha* <=
/// clique cover number.
#[derive(Clone, Debug, Serialize)]
pub struct SandwichCertificate {
    pub p: u32,
    pub facet: Vec<u32>,
    pub alpha: usize,
    /// p^3 - lambda_min(A^r): the witness value achieved by the state
    /// built from the most negative eigenvector (tensor anything).
    pub quantum_value_lower: f64,
    /// Number of basis classes, a clique cover of the graph.
    pub clique_cover_upper: usize,
    pub theta_lower: f64,
    pub theta_upper: f64,
    pub alphastar_lower: f64,
    pub alphastar_upper: f64,
    /// True when the lower and upper ends meet: theta = alpha* =
    /// clique_cover_upper exactly.
    pub resolved: bool,
}

/// Builds the certificate for a witness graph whose alpha is already known.
pub fn sandwich_certificate(
    ps: &PhaseSpace,
    g: &ExclusivityGraph,
    alpha: usize,
) -> Result<SandwichCertificate> {
    let r = g
        .facet
        .as_ref()
        .ok_or_else(|| Error::Parse("graph carries no facet".to_string()))?;
    let idx = ps
        .facet_index(r)
        .ok_or_else(|| Error::InvalidFacet(format!("{r} not in family")))?;
    let (vals, _) = hermitian_eigen_sorted(ps.facet_op(idx));
    let p3 = (ps.p() as f64).powi(3);
    let quantum_value_lower = p3 - vals[0];
    let clique_cover_upper = g.partition.len();
    let resolved = quantum_value_lower >= clique_cover_upper as f64 - 1e-8;
    let cert = SandwichCertificate {
        p: ps.p(),
        facet: r.components().to_vec(),
        alpha,
        quantum_value_lower,
        clique_cover_upper,
        theta_lower: quantum_value_lower,
        theta_upper: clique_cover_upper as f64,
        alphastar_lower: quantum_value_lower,
        alphastar_upper: clique_cover_upper as f64,
        resolved,
    };
    if (alpha as f64) > cert.quantum_value_lower + 1e-8 {
        return Err(Error::Construction(format!(
            "certificate chain violated: alpha {} exceeds quantum value {}",
            alpha, cert.quantum_value_lower
        )));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Backend;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};

    fn ps(p: u32) -> PhaseSpace {
        PhaseSpace::new(p).unwrap()
    }

    #[test]
    fn qubit_alpha_is_8_on_every_facet() {
        let ps2 = ps(2);
        for r in ps2.facets().to_vec() {
            let g = ExclusivityGraph::build(&ps2, &r, Backend::Numeric).unwrap();
            let out = max_independent_set(&g, &SolveOptions::default());
            assert!(out.exact);
            assert_eq!(out.set.size(), 8, "facet {r}");
        }
    }

    #[test]
    fn qutrit_alpha_is_27_on_first_facet() {
        let ps3 = ps(3);
        let g =
            ExclusivityGraph::build(&ps3, &ps3.facets()[0].clone(), Backend::Symbolic).unwrap();
        let out = max_independent_set(&g, &SolveOptions::default());
        assert!(out.exact);
        assert_eq!(out.set.size(), 27);
        assert!(is_independent(&g, &out.set.vertices));
    }

    #[test]
    fn single_class_subgraph_has_alpha_1() {
        let ps2 = ps(2);
        let g = ExclusivityGraph::build(&ps2, &ps2.facets()[0].clone(), Backend::Numeric).unwrap();
        let class = g.partition[3].clone();
        let sub = g.induced(&class).unwrap();
        let out = max_independent_set(&sub, &SolveOptions::default());
        assert_eq!(out.set.size(), 1);
    }

    #[test]
    fn solver_matches_exhaustive_subsets() {
        let ps2 = ps(2);
        let g = ExclusivityGraph::build(&ps2, &ps2.facets()[0].clone(), Backend::Numeric).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let all: Vec<usize> = (0..g.vertex_count()).collect();
        for _ in 0..30 {
            let k = rng.gen_range(5..=20);
            let mut verts = all.clone();
            verts.shuffle(&mut rng);
            verts.truncate(k);
            verts.sort_unstable();
            let sub = g.induced(&verts).unwrap();
            let by_solver = max_independent_set(&sub, &SolveOptions::default());
            let by_enum = exhaustive_subsets_mis(&sub).unwrap();
            assert_eq!(by_solver.set.size(), by_enum);
        }
    }

    #[test]
    fn solver_matches_class_enumeration_on_full_qubit_graph() {
        let ps2 = ps(2);
        let g = ExclusivityGraph::build(&ps2, &ps2.facets()[0].clone(), Backend::Numeric).unwrap();
        assert_eq!(exhaustive_by_classes(&g), 8);
    }

    #[test]
    fn timeout_flags_inexact() {
        let ps3 = ps(3);
        let g =
            ExclusivityGraph::build(&ps3, &ps3.facets()[0].clone(), Backend::Symbolic).unwrap();
        let out = max_independent_set(
            &g,
            &SolveOptions {
                timeout: Some(Duration::ZERO),
            },
        );
        assert!(!out.exact);
        assert!(out.set.size() <= 27);
    }

    #[test]
    fn phase_space_sets_are_independent_27() {
        let ps3 = ps(3);
        let r = ps3.facets()[0].clone();
        let g = ExclusivityGraph::build(&ps3, &r, Backend::Symbolic).unwrap();
        let u = ps3.facets()[4].clone();
        let v = ps3.facets()[7].clone();
        let set = phase_space_independent_set(&ps3, &g, &u, &v).unwrap();
        assert_eq!(set.size(), 27);
        assert!(is_independent(&g, &set.vertices));
    }

    #[test]
    fn phase_space_rejects_u_equal_r() {
        let ps3 = ps(3);
        let r = ps3.facets()[0].clone();
        let g = ExclusivityGraph::build(&ps3, &r, Backend::Symbolic).unwrap();
        let v = ps3.facets()[1].clone();
        assert!(matches!(
            phase_space_independent_set(&ps3, &g, &r, &v),
            Err(Error::PhasePointAtFacet)
        ));
    }

    #[test]
    fn sandwich_qutrit_resolves_to_28() {
        let ps3 = ps(3);
        let r = ps3.facets()[0].clone();
        let g = ExclusivityGraph::build(&ps3, &r, Backend::Symbolic).unwrap();
        let cert = sandwich_certificate(&ps3, &g, 27).unwrap();
        assert!((cert.quantum_value_lower - 28.0).abs() < 1e-8);
        assert_eq!(cert.clique_cover_upper, 28);
        assert!(cert.resolved);
    }

    #[test]
    fn sandwich_qubit_interval() {
        let ps2 = ps(2);
        let r = ps2.facets()[0].clone();
        let g = ExclusivityGraph::build(&ps2, &r, Backend::Numeric).unwrap();
        let cert = sandwich_certificate(&ps2, &g, 8).unwrap();
        let expect = 8.0 + (3.0f64.sqrt() - 1.0) / 2.0;
        assert!((cert.quantum_value_lower - expect).abs() < 1e-8);
        assert_eq!(cert.clique_cover_upper, 9);
        assert!(!cert.resolved);
        assert!(cert.alpha as f64 <= cert.quantum_value_lower);
        assert!(cert.theta_lower > 8.0 && cert.theta_upper <= 9.0);
    }
}
