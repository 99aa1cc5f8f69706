//! State classification against the polytopes, witness evaluation, slice
//! scans, and the witness/facet bijection check.

use crate::error::{Error, Result};
use crate::graph::sigma_operator;
use crate::mub::{hermitian_eigen_sorted, FacetVector, PhaseSpace, MEMBERSHIP_TOL};
use crate::weyl::CMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Region of state space a single-qudit Hermitian operator falls in.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum StateClass {
    /// Inside the stabilizer polytope.
    InPstab,
    /// Inside the simulable polytope but outside the stabilizer polytope:
    /// a bound magic state.
    BoundRegion,
    /// A state outside the simulable polytope; violates a noncontextuality
    /// inequality.
    Contextual,
    /// Not a quantum state (negative eigenvalue); occurs on slice scans.
    NonState,
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StateClass::InPstab => "stab",
            StateClass::BoundRegion => "bound",
            StateClass::Contextual => "contextual",
            StateClass::NonState => "nonstate",
        };
        write!(f, "{s}")
    }
}

/// Full classification record for one state.
#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub class: StateClass,
    /// Tr(rho A^r) over the facet family, family order.
    pub facet_values: Vec<f64>,
    pub min_facet: usize,
    pub min_value: f64,
    /// Minimum of Tr(rho A^q) over all p^(p+1) stabilizer-polytope facets.
    pub stab_min_value: f64,
    pub min_eigenvalue: f64,
    pub positive: bool,
}

impl StateClass {
    /// Rederives the class from the raw minima at a caller-chosen boundary
    /// tolerance.
    pub fn from_minima(min_eig: f64, sim_min: f64, stab_min: f64, tol: f64) -> StateClass {
        if min_eig < -tol {
            StateClass::NonState
        } else if sim_min < -tol {
            StateClass::Contextual
        } else if stab_min < -tol {
            StateClass::BoundRegion
        } else {
            StateClass::InPstab
        }
    }
}

/// Tr[Sigma (rho tensor sigma)] for a witness operator on two qudits.
pub fn witness_value(sigma_op: &CMatrix, rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    let d = rho.nrows();
    if sigma.nrows() != d || sigma_op.nrows() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            got: sigma_op.nrows(),
        });
    }
    Ok((sigma_op * rho.kronecker(sigma)).trace().re)
}

/// Convenience form building Sigma^r for the facet first.
pub fn witness_value_for_facet(
    ps: &PhaseSpace,
    r: &FacetVector,
    rho: &CMatrix,
    sigma: &CMatrix,
) -> Result<f64> {
    let op = sigma_operator(ps, r)?;
    witness_value(&op, rho, sigma)
}

/// Classifies a trace-1 Hermitian operator. Positivity is checked and
/// recorded; a negative eigenvalue below the boundary tolerance gives
/// [`StateClass::NonState`].
pub fn classify_state(ps: &PhaseSpace, rho: &CMatrix) -> Result<Classification> {
    let sim = ps.in_psim(rho)?;
    let stab = ps.in_pstab(rho)?;
    let (eigs, _) = hermitian_eigen_sorted(rho);
    let min_eigenvalue = eigs[0];
    let positive = min_eigenvalue >= -MEMBERSHIP_TOL;
    let class = StateClass::from_minima(
        min_eigenvalue,
        sim.min_value,
        stab.min_value,
        MEMBERSHIP_TOL,
    );
    Ok(Classification {
        class,
        facet_values: sim.values,
        min_facet: sim.min_facet,
        min_value: sim.min_value,
        stab_min_value: stab.min_value,
        min_eigenvalue,
        positive,
    })
}

/// A 2D affine slice rho(s, t) = base + s dir1 + t dir2 through operator
/// space, with the grid to scan.
pub struct SliceSpec {
    pub base: CMatrix,
    pub dir1: CMatrix,
    pub dir2: CMatrix,
    pub range: (f64, f64),
    pub resolution: usize,
}

impl SliceSpec {
    pub fn new(
        base: CMatrix,
        dir1: CMatrix,
        dir2: CMatrix,
        range: (f64, f64),
        resolution: usize,
    ) -> Result<Self> {
        for (name, d) in [("dir1", &dir1), ("dir2", &dir2)] {
            if (d - d.adjoint()).norm() > 1e-9 {
                return Err(Error::InvalidState(format!("{name} is not Hermitian")));
            }
            if d.trace().norm() > 1e-9 {
                return Err(Error::InvalidState(format!("{name} is not traceless")));
            }
        }
        if resolution < 2 {
            return Err(Error::Parse("slice resolution must be at least 2".into()));
        }
        Ok(Self {
            base,
            dir1,
            dir2,
            range,
            resolution,
        })
    }
}

/// The default slice: base I/p, first axis toward the maximally negative
/// reference state (strange state for odd p, T state for p = 2), second
/// axis toward its D_{0,1} displacement, which is the most negative
/// direction of the neighboring phase-space point.
pub fn default_slice(ps: &PhaseSpace, resolution: usize) -> Result<SliceSpec> {
    let reference = if ps.p() == 2 {
        ps.t_state()?
    } else {
        ps.strange_state()?
    };
    let d = crate::weyl::displacement_matrix(&crate::weyl::Displacement::new(
        crate::ffield::Fp::new(0, ps.p())?,
        crate::ffield::Fp::new(1, ps.p())?,
    )?);
    let displaced = &d * &reference * d.adjoint();
    let mixed = ps.maximally_mixed();
    SliceSpec::new(
        mixed.clone(),
        reference - &mixed,
        displaced - mixed,
        (-1.2, 1.2),
        resolution,
    )
}

/// One classified grid point of a slice scan.
#[derive(Clone, Debug, Serialize)]
pub struct SlicePoint {
    pub s: f64,
    pub t: f64,
    pub class: StateClass,
    pub min_facet: f64,
    pub min_eig: f64,
}

/// Classifies every grid point of the slice. Output order is row-major in
/// (s, t) grid indices.
pub fn slice_scan(ps: &PhaseSpace, spec: &SliceSpec) -> Result<Vec<SlicePoint>> {
    let n = spec.resolution;
    let (lo, hi) = spec.range;
    let step = (hi - lo) / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let s = lo + step * i as f64;
        for j in 0..n {
            let t = lo + step * j as f64;
            let rho = &spec.base
                + &spec.dir1 * Complex64::new(s, 0.0)
                + &spec.dir2 * Complex64::new(t, 0.0);
            let sim = ps.in_psim(&rho)?;
            let (eigs, _) = hermitian_eigen_sorted(&rho);
            let min_eig = eigs[0];
            let class = if min_eig < -MEMBERSHIP_TOL {
                StateClass::NonState
            } else if !sim.inside {
                StateClass::Contextual
            } else if ps.in_pstab(&rho)?.inside {
                StateClass::InPstab
            } else {
                StateClass::BoundRegion
            };
            out.push(SlicePoint {
                s,
                t,
                class,
                min_facet: sim.min_value,
                min_eig,
            });
        }
    }
    Ok(out)
}

/// CSV with 12 significant digits per numeric column.
pub fn slice_csv(points: &[SlicePoint]) -> String {
    let mut out = String::from("s,t,class,min_facet,min_eig\n");
    for p in points {
        out.push_str(&format!(
            "{:.11e},{:.11e},{},{:.11e},{:.11e}\n",
            p.s, p.t, p.class, p.min_facet, p.min_eig
        ));
    }
    out
}

/// Report of the witness/facet bijection check.
#[derive(Clone, Debug, Serialize)]
pub struct BijectionReport {
    pub p: u32,
    pub trials: usize,
    pub seed: u64,
    pub facets: usize,
    /// Pairs where sign(witness - p^3) disagreed with sign(-Tr(A rho)),
    /// both sides beyond tolerance.
    pub sign_mismatches: usize,
    /// Largest |witness - (p^3 - Tr(A rho))| observed.
    pub max_residual: f64,
    pub passed: bool,
}

const BIJECTION_TOL: f64 = 1e-8;

/// Draws `trials` random Hilbert-Schmidt state pairs (rho, sigma) and checks
/// Tr[Sigma^r (rho x sigma)] = p^3 - Tr(A^r rho) on every facet.
pub fn verify_bijection(ps: &PhaseSpace, trials: usize, seed: u64) -> Result<BijectionReport> {
    use rand::SeedableRng;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let p3 = (ps.p() as f64).powi(3);
    let sigma_ops: Vec<CMatrix> = ps
        .facets()
        .to_vec()
        .iter()
        .map(|r| sigma_operator(ps, r))
        .collect::<Result<_>>()?;
    let mut sign_mismatches = 0usize;
    let mut max_residual: f64 = 0.0;
    for _ in 0..trials {
        let rho = random_density_matrix(ps.p(), &mut rng);
        let sigma = random_density_matrix(ps.p(), &mut rng);
        for (idx, op) in sigma_ops.iter().enumerate() {
            let w = witness_value(op, &rho, &sigma)?;
            let a = (ps.facet_op(idx) * &rho).trace().re;
            max_residual = max_residual.max((w - (p3 - a)).abs());
            let lhs = w - p3;
            let rhs = -a;
            if lhs.abs() > BIJECTION_TOL && rhs.abs() > BIJECTION_TOL && lhs.signum() != rhs.signum()
            {
                sign_mismatches += 1;
            }
        }
    }
    let passed = sign_mismatches == 0 && max_residual < BIJECTION_TOL;
    Ok(BijectionReport {
        p: ps.p(),
        trials,
        seed,
        facets: sigma_ops.len(),
        sign_mismatches,
        max_residual,
        passed,
    })
}

/// Hilbert-Schmidt random density matrix: G G^dag / Tr for a square Ginibre
/// G with i.i.d. standard complex Gaussian entries.
pub fn random_density_matrix<R: Rng>(p: u32, rng: &mut R) -> CMatrix {
    let n = p as usize;
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    m * Complex64::new(1.0 / tr, 0.0)
}

/// Random pure-state density matrix, for sigma-independence checks.
pub fn random_pure_state<R: Rng>(p: u32, rng: &mut R) -> CMatrix {
    let n = p as usize;
    let mut v = crate::weyl::CVector::from_fn(n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    &v * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn ps(p: u32) -> PhaseSpace {
        PhaseSpace::new(p).unwrap()
    }

    #[test]
    fn witness_value_examples() {
        let ps3 = ps(3);
        let r = ps3.facets()[0].clone();
        let mixed = ps3.maximally_mixed();
        let w = witness_value_for_facet(&ps3, &r, &mixed, &mixed).unwrap();
        assert!((w - (27.0 - 1.0 / 3.0)).abs() < 1e-9);

        let strange = ps3.strange_state().unwrap();
        let w = witness_value_for_facet(&ps3, &r, &strange, &mixed).unwrap();
        assert!((w - 28.0).abs() < 1e-9);

        let ps2 = ps(2);
        let t = ps2.t_state().unwrap();
        let w = witness_value_for_facet(
            &ps2,
            &ps2.facets()[0].clone(),
            &t,
            &ps2.maximally_mixed(),
        )
        .unwrap();
        assert!((w - (8.0 + (3.0f64.sqrt() - 1.0) / 2.0)).abs() < 1e-9);
    }

    #[test]
    fn witness_value_is_sigma_independent() {
        let ps3 = ps(3);
        let r = ps3.facets()[2].clone();
        let op = sigma_operator(&ps3, &r).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let rho = random_density_matrix(3, &mut rng);
        let w0 = witness_value(&op, &rho, &ps3.maximally_mixed()).unwrap();
        for _ in 0..5 {
            let sigma = random_pure_state(3, &mut rng);
            let w = witness_value(&op, &rho, &sigma).unwrap();
            assert!((w - w0).abs() < 1e-9);
        }
    }

    #[test]
    fn boundary_state_hits_p3_exactly() {
        // rho on the facet boundary: witness value is exactly p^3
        let ps3 = ps(3);
        let r = ps3.facets()[0].clone();
        let strange = ps3.strange_state().unwrap();
        let mixed = ps3.maximally_mixed();
        let rho = &mixed + (&strange - &mixed) * Complex64::new(0.25, 0.0);
        let a = (ps3.facet_op(0) * &rho).trace().re;
        assert!(a.abs() < 1e-12);
        let w = witness_value_for_facet(&ps3, &r, &rho, &mixed).unwrap();
        assert!((w - 27.0).abs() < 1e-9);
    }

    #[test]
    fn classify_reference_states() {
        let ps3 = ps(3);
        let strange = ps3.strange_state().unwrap();
        let c = classify_state(&ps3, &strange).unwrap();
        assert_eq!(c.class, StateClass::Contextual);
        assert!((c.min_value + 1.0).abs() < 1e-9);

        let mixed = ps3.maximally_mixed();
        assert_eq!(classify_state(&ps3, &mixed).unwrap().class, StateClass::InPstab);

        // a stabilizer projector is a polytope vertex
        let proj = ps3.mubs().projector(&crate::mub::MubIndex {
            j: 2,
            q: crate::ffield::Fp::new(1, 3).unwrap(),
        });
        assert_eq!(classify_state(&ps3, &proj).unwrap().class, StateClass::InPstab);
    }

    #[test]
    fn classify_flags_non_states() {
        let ps3 = ps(3);
        let strange = ps3.strange_state().unwrap();
        let mixed = ps3.maximally_mixed();
        // far along the negative strange axis the operator leaves Q
        let rho = &mixed - (&strange - &mixed) * Complex64::new(1.0, 0.0);
        let c = classify_state(&ps3, &rho).unwrap();
        assert_eq!(c.class, StateClass::NonState);
        assert!(!c.positive);
    }

    #[test]
    fn default_slice_shows_three_regions() {
        let ps3 = ps(3);
        let spec = default_slice(&ps3, 41).unwrap();
        let points = slice_scan(&ps3, &spec).unwrap();
        assert_eq!(points.len(), 41 * 41);
        let count =
            |c: StateClass| points.iter().filter(|p| p.class == c).count();
        assert!(count(StateClass::InPstab) > 0);
        assert!(count(StateClass::BoundRegion) > 0);
        assert!(count(StateClass::Contextual) > 0);
        assert!(count(StateClass::NonState) > 0);
        // origin is the maximally mixed state
        let origin = points
            .iter()
            .find(|p| p.s.abs() < 1e-12 && p.t.abs() < 1e-12)
            .expect("odd resolution puts a point at the origin");
        assert_eq!(origin.class, StateClass::InPstab);
        // inclusion sanity: everything classified InPstab is inside P_SIM
        for p in &points {
            if p.class == StateClass::InPstab {
                assert!(p.min_facet >= -MEMBERSHIP_TOL);
            }
        }
    }

    #[test]
    fn csv_format() {
        let pts = vec![SlicePoint {
            s: 0.1,
            t: -0.25,
            class: StateClass::InPstab,
            min_facet: 1.0 / 3.0,
            min_eig: 0.333,
        }];
        let csv = slice_csv(&pts);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "s,t,class,min_facet,min_eig");
        let row = lines.next().unwrap();
        assert!(row.contains(",stab,"));
        // 12 significant digits in scientific notation
        assert!(row.starts_with("1.00000000000e-1,"));
    }

    #[test]
    fn bijection_holds_on_random_pairs() {
        for p in [2u32, 3] {
            let ps = ps(p);
            let report = verify_bijection(&ps, 50, 1234).unwrap();
            assert!(report.passed, "{report:?}");
            assert_eq!(report.sign_mismatches, 0);
            assert!(report.max_residual < 1e-8);
        }
    }

    #[test]
    fn deliberately_wrong_facet_breaks_the_identity() {
        // negative control: pair Sigma^r with A^u for u != r and the
        // identity must fail visibly
        let ps3 = ps(3);
        let r = ps3.facets()[0].clone();
        let op = sigma_operator(&ps3, &r).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let rho = random_density_matrix(3, &mut rng);
            let sigma = random_density_matrix(3, &mut rng);
            let w = witness_value(&op, &rho, &sigma).unwrap();
            let wrong_a = (ps3.facet_op(5) * &rho).trace().re;
            worst = worst.max((w - (27.0 - wrong_a)).abs());
        }
        assert!(worst > 1e-3, "wrong facet went unnoticed: {worst}");
    }

    #[test]
    fn determinism_of_random_states() {
        let mut a = ChaCha12Rng::seed_from_u64(42);
        let mut b = ChaCha12Rng::seed_from_u64(42);
        let ra = random_density_matrix(3, &mut a);
        let rb = random_density_matrix(3, &mut b);
        assert!((ra - rb).norm() < 1e-15);
    }
}
