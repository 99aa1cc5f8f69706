//! Shared fixtures for the criterion benches.

use stabctx::graph::{Backend, ExclusivityGraph};
use stabctx::mub::PhaseSpace;

pub fn phase_space(p: u32) -> PhaseSpace {
    PhaseSpace::new(p).expect("supported prime")
}

pub fn witness_graph(p: u32, facet: usize, backend: Backend) -> ExclusivityGraph {
    let ps = phase_space(p);
    let r = ps.facets()[facet].clone();
    ExclusivityGraph::build(&ps, &r, backend).expect("graph builds")
}
