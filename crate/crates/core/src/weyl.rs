//! Displacement operators, symplectic (Clifford) unitaries, and the entangled
//! two-qudit stabilizer states they generate.
//!
//! For odd p the symplectic unitary U_F comes from the closed form in terms
//! of tau = omega^(1/2 mod p) and satisfies the covariance relation
//! U_F D_{x,z} U_F^dag = D_{F(x,z)} exactly. For p = 2 no such closed form is
//! used; the six representatives (one per element of SL(2, Z_2)) are found by
//! brute-force search over the 24-element single-qubit Clifford group modulo
//! phase, keyed on the same covariance relation up to a global phase.
//!
//! Phase convention fixed here: the displacement phase is omega^(2^-1 x z)
//! for odd p and i^(x z) for p = 2, so that D_{1,1} is exactly the Pauli Y.

use crate::error::{Error, Result};
use crate::ffield::{sl2_elements, Fp, SympMatrix};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Frobenius-norm tolerance for unitarity and state-norm checks.
pub const UNITARITY_TOL: f64 = 1e-9;

/// omega^k = exp(2 pi i k / p), exponent reduced mod p.
pub fn omega_pow(p: u32, k: i64) -> Complex64 {
    let k = k.rem_euclid(p as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * k / p as f64)
}

/// Index (x, z) of a displacement operator D_{x,z}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Displacement {
    pub x: Fp,
    pub z: Fp,
}

impl Displacement {
    pub fn new(x: Fp, z: Fp) -> Result<Self> {
        if x.modulus() != z.modulus() {
            return Err(Error::ModulusMismatch(x.modulus(), z.modulus()));
        }
        Ok(Self { x, z })
    }

    pub fn modulus(&self) -> u32 {
        self.x.modulus()
    }

    /// All p^2 displacements, lexicographic in (x, z).
    pub fn all(p: u32) -> Vec<Displacement> {
        let mut out = Vec::new();
        for x in Fp::all(p) {
            for z in Fp::all(p) {
                out.push(Displacement { x, z });
            }
        }
        out
    }
}

/// The p x p matrix of D_{x,z}.
pub fn displacement_matrix(d: &Displacement) -> CMatrix {
    let p = d.modulus();
    let (x, z) = (d.x.value(), d.z.value());
    let phase = if p == 2 {
        Complex64::i().powu(x * z)
    } else {
        let half = Fp::reduce(2, p).inv().expect("p odd").value();
        omega_pow(p, half as i64 * x as i64 * z as i64)
    };
    let mut m = CMatrix::zeros(p as usize, p as usize);
    for k in 0..p {
        // X^x Z^z |k> = omega^{zk} |k + x>
        m[(((k + x) % p) as usize, k as usize)] = phase * omega_pow(p, z as i64 * k as i64);
    }
    m
}

/// The symplectic unitary U_F for odd p.
///
/// Uses the two-branch closed form (beta != 0 Fourier-type, beta = 0
/// permutation-type) with tau = omega^(2^-1). For p = 2 this parametrization
/// is undefined; use [`clifford_rep_qubit`] instead.
pub fn symplectic_unitary(f: &SympMatrix) -> Result<CMatrix> {
    let p = f.modulus();
    if p == 2 {
        return Err(Error::OddPrimeOnly(
            2,
            "the symplectic closed form needs 2^-1 mod p; use clifford_rep_qubit",
        ));
    }
    let pi = p as i64;
    let half = Fp::reduce(2, p).inv().expect("p odd").value() as i64;
    let (a, b, g, e) = (
        f.alpha.value() as i64,
        f.beta.value() as i64,
        f.gamma.value() as i64,
        f.eps.value() as i64,
    );
    let n = p as usize;
    let mut m = CMatrix::zeros(n, n);
    if b != 0 {
        let binv = f.beta.inv().expect("beta nonzero").value() as i64;
        let scale = 1.0 / (p as f64).sqrt();
        for j in 0..pi {
            for k in 0..pi {
                let quad = (binv * (a * k * k - 2 * j * k + e * j * j)).rem_euclid(pi);
                m[(j as usize, k as usize)] = omega_pow(p, half * quad) * scale;
            }
        }
    } else {
        for k in 0..pi {
            let quad = (a * g * k * k).rem_euclid(pi);
            m[(((a * k).rem_euclid(pi)) as usize, k as usize)] = omega_pow(p, half * quad);
        }
    }
    Ok(m)
}

/// Frobenius norm of U^dag U - I.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    (m.adjoint() * m - CMatrix::identity(n, n)).norm()
}

/// Checks U D_{x,z} U^dag = e^{i phi} D_{F(x,z)} for some phase, all (x, z).
pub fn satisfies_covariance(u: &CMatrix, f: &SympMatrix, tol: f64) -> bool {
    let p = f.modulus();
    for d in Displacement::all(p) {
        let lhs = u * displacement_matrix(&d) * u.adjoint();
        let (fx, fz) = f.apply(d.x, d.z);
        let rhs = displacement_matrix(&Displacement { x: fx, z: fz });
        if !equal_up_to_phase(&lhs, &rhs, tol) {
            return false;
        }
    }
    true
}

/// Whether a = e^{i phi} b for some global phase phi.
pub fn equal_up_to_phase(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    let mut best = (0.0f64, Complex64::new(1.0, 0.0));
    for (x, y) in b.iter().zip(a.iter()) {
        if x.norm() > best.0 {
            best = (x.norm(), *y / *x);
        }
    }
    let phase = best.1;
    (phase.norm() - 1.0).abs() < tol && (a - b.map(|z| z * phase)).norm() < tol
}

fn qubit_reps() -> &'static Vec<(SympMatrix, CMatrix)> {
    static REPS: OnceLock<Vec<(SympMatrix, CMatrix)>> = OnceLock::new();
    REPS.get_or_init(|| {
        // enumerate the single-qubit Clifford group mod phase by closure from H, S
        let s2 = 1.0 / 2.0f64.sqrt();
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(s2, 0.0),
                Complex64::new(s2, 0.0),
                Complex64::new(s2, 0.0),
                Complex64::new(-s2, 0.0),
            ],
        );
        let s = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::i(),
            ],
        );
        let key = |m: &CMatrix| -> Vec<(i64, i64)> {
            let mut c = m.clone();
            canonical_phase_slice(c.as_mut_slice());
            c.iter()
                .map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64))
                .collect()
        };
        let mut seen = std::collections::HashSet::new();
        let mut order: Vec<CMatrix> = vec![CMatrix::identity(2, 2)];
        seen.insert(key(&order[0]));
        let mut head = 0;
        while head < order.len() {
            let u = order[head].clone();
            head += 1;
            for gen in [&h, &s] {
                let v = gen * &u;
                if seen.insert(key(&v)) {
                    order.push(v);
                }
            }
        }
        assert_eq!(order.len(), 24, "single-qubit Clifford group mod phase");

        sl2_elements(2)
            .into_iter()
            .map(|f| {
                let u = order
                    .iter()
                    .find(|u| satisfies_covariance(u, &f, UNITARITY_TOL))
                    .expect("every SL(2, Z_2) element has a Clifford representative")
                    .clone();
                (f, u)
            })
            .collect()
    })
}

/// The six qubit Clifford representatives, one per element of SL(2, Z_2) in
/// lexicographic order, each satisfying the covariance relation up to phase.
pub fn clifford_rep_qubit() -> &'static [(SympMatrix, CMatrix)] {
    qubit_reps()
}

/// U_F for any supported p: the closed form for odd p, the brute-forced
/// representative for p = 2.
pub fn clifford_unitary(f: &SympMatrix) -> CMatrix {
    if f.modulus() == 2 {
        clifford_rep_qubit()
            .iter()
            .find(|(g, _)| g == f)
            .expect("all six elements are cached")
            .1
            .clone()
    } else {
        symplectic_unitary(f).expect("odd p")
    }
}

/// The maximally entangled state sum_j |jj> / sqrt(p).
pub fn bell_state(p: u32) -> CVector {
    let n = (p * p) as usize;
    let amp = Complex64::new(1.0 / (p as f64).sqrt(), 0.0);
    CVector::from_fn(n, |i, _| {
        if i % (p as usize + 1) == 0 {
            amp
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn canonical_phase_slice(v: &mut [Complex64]) {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-9) {
        let phase = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

/// Rotates a global phase so the first nonzero amplitude is real positive.
pub fn canonical_phase(v: &mut CVector) {
    canonical_phase_slice(v.as_mut_slice());
}

/// The two-qudit entangled stabilizer state (D_{x,z} U_F tensor I)|Phi>,
/// with the first tensor factor as the slow index.
pub fn jamiolkowski_state(x: Fp, z: Fp, f: &SympMatrix) -> CVector {
    let p = f.modulus() as usize;
    let m = displacement_matrix(&Displacement { x, z }) * clifford_unitary(f);
    // (M tensor I)|Phi> has amplitude M[a, b] / sqrt(p) at index a*p + b
    let scale = 1.0 / (p as f64).sqrt();
    let mut v = CVector::from_fn(p * p, |i, _| m[(i / p, i % p)] * scale);
    canonical_phase(&mut v);
    v
}
