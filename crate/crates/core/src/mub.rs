//! Single-qudit mutually unbiased bases, phase-point / facet operators, the
//! stabilizer and simulable polytopes, and the reference magic states.
//!
//! The j-th MUB is the eigenbasis of the j-th operator in the list
//! {D_{0,1}, D_{1,0}, D_{1,1}, ..., D_{1,p-1}}. For odd p each basis is built
//! as U_F |q> for a symplectic F mapping (0, 1) to the operator's index, so
//! the eigenvalue of the q-th vector is exactly omega^q; for p = 2 the three
//! bases come from I, H, SH. Every eigen-relation is checked at construction.
//!
//! A facet vector r in Z_p^(p+1) selects one level per basis and defines the
//! operator A^r = -I + sum_j proj_j^{r_j}. Nonnegativity of Tr(rho A^q) over
//! all q defines the stabilizer polytope; over the simulable facet family
//! (all r for p = 2, r = x*a + z*b for odd p) it defines the simulable
//! polytope. Facet values Tr(rho A^u) are stored raw, never divided by p, so
//! negativity means exactly a violated facet.

use crate::error::{Error, Result};
use crate::ffield::{Fp, SympMatrix};
use crate::weyl::{
    canonical_phase, displacement_matrix, omega_pow, CMatrix, CVector, Displacement,
};
use num_complex::Complex64;

/// Hermiticity residual allowed for constructed operators.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Residual allowed on eigen-relations of the constructed MUB vectors.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-12;
/// Boundary tolerance for polytope membership: values in [-MEMBERSHIP_TOL, 0)
/// count as inside, so float noise cannot flip a classification.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Index of a single MUB projector: basis j in 1..=p+1, level q in Z_p.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MubIndex {
    pub j: usize,
    pub q: Fp,
}

/// The complete set of p+1 mutually unbiased bases for one prime p.
pub struct Mubs {
    p: u32,
    ops: Vec<Displacement>,
    /// Column q of `unitaries[j-1]` is the eigenvector of ops[j-1] with
    /// eigenvalue omega^q, phase-fixed to a real positive leading amplitude.
    unitaries: Vec<CMatrix>,
}

impl Mubs {
    pub fn new(p: u32) -> Result<Self> {
        let _ = Fp::new(0, p)?; // validates primality
        let mut ops = vec![
            Displacement::new(Fp::reduce(0, p), Fp::reduce(1, p))?,
            Displacement::new(Fp::reduce(1, p), Fp::reduce(0, p))?,
        ];
        for t in 1..p {
            ops.push(Displacement::new(Fp::reduce(1, p), Fp::reduce(t as i64, p))?);
        }

        let mut unitaries = Vec::with_capacity(ops.len());
        if p == 2 {
            let s2 = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
            unitaries.push(CMatrix::identity(2, 2));
            unitaries.push(CMatrix::from_row_slice(2, 2, &[s2, s2, s2, -s2]));
            // S H: columns are the Pauli-Y eigenvectors
            unitaries.push(CMatrix::from_row_slice(
                2,
                2,
                &[s2, s2, Complex64::i() * s2, -Complex64::i() * s2],
            ));
        } else {
            for (idx, op) in ops.iter().enumerate() {
                // any F with F(0, 1) = (x, z) turns the computational basis
                // into the eigenbasis of D_{x,z} with eigenvalue omega^q on
                // column q
                let f = if idx == 0 {
                    SympMatrix::identity(p)
                } else if idx == 1 {
                    SympMatrix::from_ints([0, 1, -1, 0], p)?
                } else {
                    let t = (idx - 1) as i64;
                    SympMatrix::from_ints([1, 1, t - 1, t], p)?
                };
                debug_assert_eq!(f.apply(Fp::zero(p), Fp::one(p)), (op.x, op.z));
                unitaries.push(crate::weyl::symplectic_unitary(&f)?);
            }
        }

        for u in &mut unitaries {
            for mut col in u.column_iter_mut() {
                if let Some(first) = col.iter().find(|z| z.norm() > 1e-9) {
                    let phase = first.conj() / first.norm();
                    for z in col.iter_mut() {
                        *z *= phase;
                    }
                }
            }
        }

        let mubs = Self { p, ops, unitaries };
        mubs.validate()?;
        Ok(mubs)
    }

    fn validate(&self) -> Result<()> {
        for j in 1..=(self.p + 1) as usize {
            let d = displacement_matrix(&self.ops[j - 1]);
            for q in 0..self.p {
                let v = self.vector(j, q);
                let res = (&d * &v - &v * omega_pow(self.p, q as i64)).norm();
                if res > EIGEN_RESIDUAL_TOL {
                    return Err(Error::Construction(format!(
                        "MUB eigen-relation residual {res:.3e} for basis {j}, level {q}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// The displacement operator whose eigenbasis is basis j.
    pub fn op(&self, j: usize) -> &Displacement {
        &self.ops[j - 1]
    }

    /// Eigenvector of basis j with eigenvalue omega^q.
    pub fn vector(&self, j: usize, q: u32) -> CVector {
        self.unitaries[j - 1].column(q as usize).into_owned()
    }

    /// Rank-1 projector onto [`Mubs::vector`].
    pub fn projector(&self, m: &MubIndex) -> CMatrix {
        let v = self.vector(m.j, m.q.value());
        &v * v.adjoint()
    }
}

/// A vector r in Z_p^(p+1) labeling the operator A^r; members of the
/// simulable facet family additionally carry their (x, z) phase-space label
/// for odd p.
#[derive(Clone, Debug)]
pub struct FacetVector {
    components: Vec<u32>,
    p: u32,
    xz: Option<(u32, u32)>,
}

impl PartialEq for FacetVector {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.components == other.components
    }
}
impl Eq for FacetVector {}

impl FacetVector {
    pub fn new(components: Vec<u32>, p: u32) -> Result<Self> {
        if components.len() != (p + 1) as usize {
            return Err(Error::InvalidFacet(format!(
                "need p + 1 = {} components, got {}",
                p + 1,
                components.len()
            )));
        }
        if let Some(c) = components.iter().find(|&&c| c >= p) {
            return Err(Error::InvalidFacet(format!("component {c} >= p = {p}")));
        }
        Ok(Self {
            components,
            p,
            xz: None,
        })
    }

    /// r = x*a + z*b with a = [1, 0, 1, ..., p-1] and b = -[0, 1, 1, ..., 1];
    /// odd p only.
    pub fn from_xz(p: u32, x: u32, z: u32) -> Result<Self> {
        if p == 2 {
            return Err(Error::OddPrimeOnly(
                2,
                "the (x, z) facet labeling applies to odd p; for p = 2 every r is a facet",
            ));
        }
        let pi = p as i64;
        let (x, z) = (x as i64 % pi, z as i64 % pi);
        let mut components = vec![(x).rem_euclid(pi) as u32, (-z).rem_euclid(pi) as u32];
        for t in 1..pi {
            components.push((x * t - z).rem_euclid(pi) as u32);
        }
        let mut f = Self::new(components, p)?;
        f.xz = Some((x as u32, z as u32));
        Ok(f)
    }

    pub fn components(&self) -> &[u32] {
        &self.components
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Phase-space label (x, z), present on odd-p facet-family members.
    pub fn xz_label(&self) -> Option<(u32, u32)> {
        self.xz
    }
}

impl std::fmt::Display for FacetVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// The facet family of the simulable polytope: all 2^3 vectors for p = 2,
/// the p^2 vectors x*a + z*b (lexicographic in (x, z)) for odd p.
pub fn facet_family(p: u32) -> Result<Vec<FacetVector>> {
    if p == 2 {
        let mut out = Vec::new();
        for r0 in 0..2u32 {
            for r1 in 0..2u32 {
                for r2 in 0..2u32 {
                    out.push(FacetVector::new(vec![r0, r1, r2], 2)?);
                }
            }
        }
        Ok(out)
    } else {
        let mut out = Vec::new();
        for x in 0..p {
            for z in 0..p {
                out.push(FacetVector::from_xz(p, x, z)?);
            }
        }
        Ok(out)
    }
}

/// Verdict of a simulable-polytope membership test.
#[derive(Clone, Debug)]
pub struct PsimVerdict {
    pub inside: bool,
    pub min_value: f64,
    /// Index into the facet family of the minimizing facet.
    pub min_facet: usize,
    pub values: Vec<f64>,
}

/// Verdict of a stabilizer-polytope membership test.
#[derive(Clone, Debug)]
pub struct PstabVerdict {
    pub inside: bool,
    pub min_value: f64,
    pub min_levels: Vec<u32>,
}

/// Immutable per-p cache of the MUBs, the facet family, and their operators.
/// Build once, share freely across threads.
pub struct PhaseSpace {
    p: u32,
    mubs: Mubs,
    facets: Vec<FacetVector>,
    facet_ops: Vec<CMatrix>,
}

impl PhaseSpace {
    pub fn new(p: u32) -> Result<Self> {
        let mubs = Mubs::new(p)?;
        let facets = facet_family(p)?;
        let mut facet_ops = Vec::with_capacity(facets.len());
        for r in &facets {
            let a = a_operator(&mubs, r.components())?;
            facet_ops.push(a);
        }
        Ok(Self {
            p,
            mubs,
            facets,
            facet_ops,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.p as usize
    }

    pub fn mubs(&self) -> &Mubs {
        &self.mubs
    }

    pub fn facets(&self) -> &[FacetVector] {
        &self.facets
    }

    pub fn facet_index(&self, r: &FacetVector) -> Option<usize> {
        self.facets.iter().position(|f| f == r)
    }

    pub fn facet_op(&self, idx: usize) -> &CMatrix {
        &self.facet_ops[idx]
    }

    /// A^r for an arbitrary level vector r in Z_p^(p+1).
    pub fn a_operator(&self, r: &FacetVector) -> Result<CMatrix> {
        if r.p() != self.p {
            return Err(Error::ModulusMismatch(self.p, r.p()));
        }
        a_operator(&self.mubs, r.components())
    }

    fn check_state(&self, rho: &CMatrix) -> Result<()> {
        let n = self.dim();
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rho.nrows(),
            });
        }
        let herm = (rho - rho.adjoint()).norm();
        if herm > 1e-9 {
            return Err(Error::InvalidState(format!(
                "not Hermitian (residual {herm:.3e})"
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(Error::InvalidState(format!("trace {} != 1", tr)));
        }
        Ok(())
    }

    /// Per-basis table of Tr(rho proj_j^q), the building block of both
    /// membership tests.
    fn level_traces(&self, rho: &CMatrix) -> Vec<Vec<f64>> {
        (1..=(self.p + 1) as usize)
            .map(|j| {
                (0..self.p)
                    .map(|q| {
                        let v = self.mubs.vector(j, q);
                        (v.adjoint() * rho * &v)[(0, 0)].re
                    })
                    .collect()
            })
            .collect()
    }

    /// Membership in the simulable polytope: Tr(rho A^r) >= -tol over the
    /// facet family. Returns the minimizing facet either way.
    pub fn in_psim(&self, rho: &CMatrix) -> Result<PsimVerdict> {
        self.check_state(rho)?;
        let table = self.level_traces(rho);
        let mut values = Vec::with_capacity(self.facets.len());
        for r in &self.facets {
            let mut v = -1.0;
            for (j, &level) in r.components().iter().enumerate() {
                v += table[j][level as usize];
            }
            values.push(v);
        }
        let (min_facet, min_value) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, v)| (i, *v))
            .unwrap();
        Ok(PsimVerdict {
            inside: min_value >= -MEMBERSHIP_TOL,
            min_value,
            min_facet,
            values,
        })
    }

    /// Membership in the stabilizer polytope: all p^(p+1) inequalities
    /// Tr(rho A^q) >= -tol, enumerated directly.
    pub fn in_pstab(&self, rho: &CMatrix) -> Result<PstabVerdict> {
        self.check_state(rho)?;
        let table = self.level_traces(rho);
        let m = (self.p + 1) as usize;
        let mut levels = vec![0u32; m];
        let mut min_value = f64::INFINITY;
        let mut min_levels = levels.clone();
        loop {
            let mut v = -1.0;
            for (j, &q) in levels.iter().enumerate() {
                v += table[j][q as usize];
            }
            if v < min_value {
                min_value = v;
                min_levels = levels.clone();
            }
            // odometer over Z_p^(p+1)
            let mut carry = 0;
            while carry < m {
                levels[carry] += 1;
                if levels[carry] < self.p {
                    break;
                }
                levels[carry] = 0;
                carry += 1;
            }
            if carry == m {
                break;
            }
        }
        Ok(PstabVerdict {
            inside: min_value >= -MEMBERSHIP_TOL,
            min_value,
            min_levels,
        })
    }

    /// The raw discrete Wigner value Tr(rho A^u) at a facet-family point;
    /// odd p only.
    pub fn wigner(&self, rho: &CMatrix, u: &FacetVector) -> Result<f64> {
        if self.p == 2 {
            return Err(Error::OddPrimeOnly(2, "the Wigner map is used for odd p"));
        }
        self.check_state(rho)?;
        let idx = self
            .facet_index(u)
            .ok_or_else(|| Error::InvalidFacet(format!("{u} is not in the facet family")))?;
        Ok((self.facet_op(idx) * rho).trace().re)
    }

    /// The pure state with Tr(A^0 rho) = -1: the (unique, for p = 3)
    /// eigenvector of A^0 with eigenvalue -1. Errors with the multiplicity
    /// when that eigenspace is degenerate, as happens for p >= 5.
    pub fn strange_state(&self) -> Result<CMatrix> {
        if self.p == 2 {
            return Err(Error::OddPrimeOnly(2, "the strange state needs Tr(A rho) = -1"));
        }
        let (vals, vecs) = hermitian_eigen_sorted(&self.facet_ops[0]);
        let hits: Vec<usize> = vals
            .iter()
            .enumerate()
            .filter(|(_, v)| (*v + 1.0).abs() < 1e-8)
            .map(|(i, _)| i)
            .collect();
        match hits.len() {
            1 => {
                let mut v = vecs[hits[0]].clone();
                canonical_phase(&mut v);
                Ok(&v * v.adjoint())
            }
            0 => Err(Error::Construction(
                "no eigenvalue -1 found on A^0".to_string(),
            )),
            m => Err(Error::DegenerateEigenspace {
                eigenvalue: -1.0,
                multiplicity: m,
            }),
        }
    }

    /// The qubit magic state maximally violating the p = 2 inequality: the
    /// eigenvector of A^(0,0,0) with eigenvalue (1 - sqrt 3)/2, whose Bloch
    /// vector is antiparallel to the facet direction.
    pub fn t_state(&self) -> Result<CMatrix> {
        if self.p != 2 {
            return Err(Error::InvalidState(format!(
                "the T state is the qubit reference state; p = {}",
                self.p
            )));
        }
        let (_, vecs) = hermitian_eigen_sorted(&self.facet_ops[0]);
        let mut v = vecs[0].clone();
        canonical_phase(&mut v);
        Ok(&v * v.adjoint())
    }

    /// I / p.
    pub fn maximally_mixed(&self) -> CMatrix {
        CMatrix::identity(self.dim(), self.dim()) * Complex64::new(1.0 / self.p as f64, 0.0)
    }
}

/// A^r = -I + sum_j proj_j^{r_j}; Hermitian with unit trace.
fn a_operator(mubs: &Mubs, components: &[u32]) -> Result<CMatrix> {
    let p = mubs.p();
    if components.len() != (p + 1) as usize {
        return Err(Error::InvalidFacet(format!(
            "need {} components, got {}",
            p + 1,
            components.len()
        )));
    }
    let n = p as usize;
    let mut a = CMatrix::identity(n, n) * Complex64::new(-1.0, 0.0);
    for (j, &q) in components.iter().enumerate() {
        if q >= p {
            return Err(Error::InvalidFacet(format!("component {q} >= p = {p}")));
        }
        a += mubs.projector(&MubIndex {
            j: j + 1,
            q: Fp::reduce(q as i64, p),
        });
    }
    let herm = (&a - a.adjoint()).norm();
    if herm > HERMITICITY_TOL {
        return Err(Error::Construction(format!(
            "phase-point operator hermiticity residual {herm:.3e}"
        )));
    }
    Ok(a)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen_sorted(m: &CMatrix) -> (Vec<f64>, Vec<CVector>) {
    let eig = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = idx
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(p: u32) -> PhaseSpace {
        PhaseSpace::new(p).unwrap()
    }

    #[test]
    fn qubit_projector_examples() {
        let m = Mubs::new(2).unwrap();
        // basis 1 is the Z eigenbasis: level 0 -> |0><0|
        let p0 = m.projector(&MubIndex {
            j: 1,
            q: Fp::new(0, 2).unwrap(),
        });
        let mut e = CMatrix::zeros(2, 2);
        e[(0, 0)] = Complex64::new(1.0, 0.0);
        assert!((p0 - e).norm() < 1e-12);

        // basis 2 is the X eigenbasis: level 0 -> |+><+|
        let pp = m.projector(&MubIndex {
            j: 2,
            q: Fp::new(0, 2).unwrap(),
        });
        let plus = CMatrix::from_element(2, 2, Complex64::new(0.5, 0.0));
        assert!((pp - plus).norm() < 1e-12);
    }

    #[test]
    fn unbiasedness_exhaustive() {
        for p in [2u32, 3, 5] {
            let m = Mubs::new(p).unwrap();
            for j in 1..=(p + 1) as usize {
                for jp in 1..=(p + 1) as usize {
                    for q in 0..p {
                        for qp in 0..p {
                            let ov = m.vector(j, q).dotc(&m.vector(jp, qp)).norm_sqr();
                            let expect = if j == jp {
                                if q == qp {
                                    1.0
                                } else {
                                    0.0
                                }
                            } else {
                                1.0 / p as f64
                            };
                            assert!(
                                (ov - expect).abs() < 1e-9,
                                "p={p} ({j},{q}) vs ({jp},{qp}): {ov}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn facet_family_sizes() {
        assert_eq!(facet_family(2).unwrap().len(), 8);
        assert_eq!(facet_family(3).unwrap().len(), 9);
        assert_eq!(facet_family(5).unwrap().len(), 25);
    }

    #[test]
    fn a_operator_trace_one() {
        for p in [2u32, 3] {
            let ps = ps(p);
            for i in 0..ps.facets().len() {
                let tr = ps.facet_op(i).trace();
                assert!((tr.re - 1.0).abs() < 1e-10 && tr.im.abs() < 1e-12);
            }
        }
        // a non-facet level vector also has trace 1
        let ps3 = ps(3);
        let r = FacetVector::new(vec![1, 2, 0, 1], 3).unwrap();
        assert!((ps3.a_operator(&r).unwrap().trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn qubit_facet_spectrum() {
        // A^(0,0,0) = (I + X + Y + Z)/2 with eigenvalues (1 +- sqrt 3)/2
        let ps2 = ps(2);
        let (vals, _) = hermitian_eigen_sorted(ps2.facet_op(0));
        let lo = (1.0 - 3.0f64.sqrt()) / 2.0;
        let hi = (1.0 + 3.0f64.sqrt()) / 2.0;
        assert!((vals[0] - lo).abs() < 1e-10);
        assert!((vals[1] - hi).abs() < 1e-10);
    }

    #[test]
    fn qutrit_zero_facet_has_minus_one() {
        let ps3 = ps(3);
        let (vals, _) = hermitian_eigen_sorted(ps3.facet_op(0));
        assert!((vals[0] + 1.0).abs() < 1e-10);
        assert!((vals[1] - 1.0).abs() < 1e-10);
        assert!((vals[2] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn facet_family_sums_to_p_identity_for_odd_p() {
        for p in [3u32, 5] {
            let ps = ps(p);
            let n = ps.dim();
            let mut sum = CMatrix::zeros(n, n);
            for i in 0..ps.facets().len() {
                sum += ps.facet_op(i);
            }
            let expect = CMatrix::identity(n, n) * Complex64::new(p as f64, 0.0);
            assert!((sum - expect).norm() < 1e-9);
        }
    }

    #[test]
    fn facet_operator_overlaps_are_p_delta() {
        // Tr(A^u A^v) over the odd-p family: p on the diagonal, 0 off it.
        // This pins the normalization used by the phase-space counting
        // argument; note that it is p*delta, not delta.
        let ps3 = ps(3);
        for i in 0..9 {
            for j in 0..9 {
                let t = (ps3.facet_op(i) * ps3.facet_op(j)).trace().re;
                let expect = if i == j { 3.0 } else { 0.0 };
                assert!((t - expect).abs() < 1e-9, "({i},{j}): {t}");
            }
        }
    }

    #[test]
    fn membership_of_maximally_mixed() {
        for p in [2u32, 3] {
            let ps = ps(p);
            let rho = ps.maximally_mixed();
            let sim = ps.in_psim(&rho).unwrap();
            assert!(sim.inside);
            assert!((sim.min_value - 1.0 / p as f64).abs() < 1e-10);
            assert!(ps.in_pstab(&rho).unwrap().inside);
        }
    }

    #[test]
    fn stabilizer_projectors_are_polytope_vertices() {
        for p in [2u32, 3] {
            let ps = ps(p);
            for j in 1..=(p + 1) as usize {
                for q in 0..p {
                    let rho = ps.mubs().projector(&MubIndex {
                        j,
                        q: Fp::reduce(q as i64, p),
                    });
                    assert!(ps.in_pstab(&rho).unwrap().inside, "p={p} ({j},{q})");
                    assert!(ps.in_psim(&rho).unwrap().inside);
                }
            }
        }
    }

    #[test]
    fn strange_state_properties() {
        let ps3 = ps(3);
        let s = ps3.strange_state().unwrap();
        // valid density matrix
        assert!((s.trace().re - 1.0).abs() < 1e-10);
        let (vals, _) = hermitian_eigen_sorted(&s);
        assert!(vals[0] > -1e-10);
        // saturates the facet at -1
        let sim = ps3.in_psim(&s).unwrap();
        assert!(!sim.inside);
        assert!((sim.min_value + 1.0).abs() < 1e-9);
        assert_eq!(sim.min_facet, 0);
        assert!((ps3.wigner(&s, &ps3.facets()[0].clone()).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn strange_state_degenerate_for_p5() {
        let ps5 = ps(5);
        match ps5.strange_state() {
            Err(Error::DegenerateEigenspace { multiplicity, .. }) => {
                assert_eq!(multiplicity, 2)
            }
            other => panic!("expected degenerate eigenspace, got {other:?}"),
        }
    }

    #[test]
    fn t_state_properties() {
        let ps2 = ps(2);
        let t = ps2.t_state().unwrap();
        let val = (ps2.facet_op(0) * &t).trace().re;
        assert!((val - (1.0 - 3.0f64.sqrt()) / 2.0).abs() < 1e-10);
        let sim = ps2.in_psim(&t).unwrap();
        assert!(!sim.inside);
    }

    #[test]
    fn bloch_diagonal_state_violates() {
        // Bloch vector (1,1,1)/sqrt(3) has min facet value (1 - sqrt 3)/2
        let ps2 = ps(2);
        let n = 1.0 / 3.0f64.sqrt();
        let rho = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.5 * (1.0 + n), 0.0),
                Complex64::new(0.5 * n, -0.5 * n),
                Complex64::new(0.5 * n, 0.5 * n),
                Complex64::new(0.5 * (1.0 - n), 0.0),
            ],
        );
        let sim = ps2.in_psim(&rho).unwrap();
        assert!(!sim.inside);
        assert!((sim.min_value - (1.0 - 3.0f64.sqrt()) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn wigner_values() {
        let ps3 = ps(3);
        let rho = ps3.maximally_mixed();
        let u = ps3.facets()[4].clone();
        assert!((ps3.wigner(&rho, &u).unwrap() - 1.0 / 3.0).abs() < 1e-10);

        // sum over the family is p * Tr(rho) for any unit-trace input
        let mut odd = CMatrix::zeros(3, 3);
        odd[(0, 0)] = Complex64::new(0.9, 0.0);
        odd[(1, 1)] = Complex64::new(-0.3, 0.0);
        odd[(2, 2)] = Complex64::new(0.4, 0.0);
        odd[(0, 2)] = Complex64::new(0.2, 0.1);
        odd[(2, 0)] = Complex64::new(0.2, -0.1);
        let total: f64 = ps3
            .facets()
            .to_vec()
            .iter()
            .map(|u| ps3.wigner(&odd, u).unwrap())
            .sum();
        assert!((total - 3.0).abs() < 1e-9);
    }

    #[test]
    fn wigner_rejects_p2_and_non_facets() {
        let ps2 = ps(2);
        let rho = ps2.maximally_mixed();
        let u = ps2.facets()[0].clone();
        assert!(matches!(
            ps2.wigner(&rho, &u),
            Err(Error::OddPrimeOnly(2, _))
        ));

        let ps3 = ps(3);
        let not_facet = FacetVector::new(vec![1, 0, 0, 0], 3).unwrap();
        assert!(ps3.facet_index(&not_facet).is_none());
        assert!(ps3
            .wigner(&ps3.maximally_mixed(), &not_facet)
            .is_err());
    }

    #[test]
    fn psim_contains_pstab() {
        // sampled check of the inclusion at p = 3
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let ps3 = ps(3);
        for _ in 0..200 {
            let rho = crate::classify::random_density_matrix(3, &mut rng);
            if ps3.in_pstab(&rho).unwrap().inside {
                assert!(ps3.in_psim(&rho).unwrap().inside);
            }
        }
    }
}
