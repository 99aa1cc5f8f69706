//! Exact arithmetic over Z_p and the symplectic group SL(2, Z_p).
//!
//! The 2x2 unit-determinant matrices over Z_p factor uniquely as a coset
//! representative `F_b` (one per label b in Z_p plus a point at infinity)
//! times an element of the basis-preserving subgroup `BP` of lower-triangular
//! matrices. These coset coordinates are what the witness-set enumeration
//! and the symbolic orthogonality predicates work in.

use crate::error::{Error, Result};
use std::fmt;

/// Primes the crate is exercised against. Larger primes work but are untested.
pub const SUPPORTED_PRIMES: [u32; 4] = [2, 3, 5, 7];

/// Trial division; inputs here are tiny.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of the prime field Z_p. Immutable; the modulus travels with
/// the value so mixed-modulus arithmetic is caught in debug builds.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u32,
    modulus: u32,
}

impl Fp {
    /// Reduces `value` mod `modulus`, rejecting composite moduli.
    pub fn new(value: i64, modulus: u32) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(Error::NotPrime(modulus));
        }
        Ok(Self::reduce(value, modulus))
    }

    /// Like [`Fp::new`] but assumes the modulus was already validated.
    pub(crate) fn reduce(value: i64, modulus: u32) -> Self {
        debug_assert!(is_prime(modulus));
        Self {
            value: value.rem_euclid(modulus as i64) as u32,
            modulus,
        }
    }

    pub fn zero(p: u32) -> Self {
        Self::reduce(0, p)
    }

    pub fn one(p: u32) -> Self {
        Self::reduce(1, p)
    }

    /// All p elements in ascending order.
    pub fn all(p: u32) -> impl Iterator<Item = Fp> {
        (0..p).map(move |v| Fp::reduce(v as i64, p))
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Multiplicative inverse by extended Euclid; errors on zero.
    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::ZeroInverse);
        }
        let (_, x, _) = ext_gcd(self.value as i64, self.modulus as i64);
        Ok(Self::reduce(x, self.modulus))
    }
}

/// Returns (g, x, y) with a*x + b*y = g = gcd(a, b).
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

macro_rules! check_moduli {
    ($a:expr, $b:expr) => {
        debug_assert_eq!($a.modulus, $b.modulus, "mixed-modulus arithmetic");
    };
}

impl std::ops::Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        check_moduli!(self, rhs);
        Fp::reduce(self.value as i64 + rhs.value as i64, self.modulus)
    }
}

impl std::ops::Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        check_moduli!(self, rhs);
        Fp::reduce(self.value as i64 - rhs.value as i64, self.modulus)
    }
}

impl std::ops::Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        check_moduli!(self, rhs);
        Fp::reduce(self.value as i64 * rhs.value as i64, self.modulus)
    }
}

impl std::ops::Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp::reduce(-(self.value as i64), self.modulus)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A 2x2 matrix over Z_p with determinant 1, row-major (alpha beta; gamma eps).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SympMatrix {
    pub alpha: Fp,
    pub beta: Fp,
    pub gamma: Fp,
    pub eps: Fp,
}

impl SympMatrix {
    pub fn new(alpha: Fp, beta: Fp, gamma: Fp, eps: Fp) -> Result<Self> {
        let p = alpha.modulus();
        for e in [beta, gamma, eps] {
            if e.modulus() != p {
                return Err(Error::ModulusMismatch(p, e.modulus()));
            }
        }
        let m = Self {
            alpha,
            beta,
            gamma,
            eps,
        };
        let det = m.det();
        if det.value() != 1 {
            return Err(Error::NotSymplectic {
                det: det.value(),
                modulus: p,
            });
        }
        Ok(m)
    }

    /// Convenience constructor from integer entries.
    pub fn from_ints(entries: [i64; 4], p: u32) -> Result<Self> {
        Self::new(
            Fp::new(entries[0], p)?,
            Fp::new(entries[1], p)?,
            Fp::new(entries[2], p)?,
            Fp::new(entries[3], p)?,
        )
    }

    pub fn identity(p: u32) -> Self {
        Self {
            alpha: Fp::one(p),
            beta: Fp::zero(p),
            gamma: Fp::zero(p),
            eps: Fp::one(p),
        }
    }

    pub fn modulus(&self) -> u32 {
        self.alpha.modulus()
    }

    pub fn det(&self) -> Fp {
        self.alpha * self.eps - self.beta * self.gamma
    }

    pub fn trace(&self) -> Fp {
        self.alpha + self.eps
    }

    pub fn mul(&self, rhs: &SympMatrix) -> SympMatrix {
        SympMatrix {
            alpha: self.alpha * rhs.alpha + self.beta * rhs.gamma,
            beta: self.alpha * rhs.beta + self.beta * rhs.eps,
            gamma: self.gamma * rhs.alpha + self.eps * rhs.gamma,
            eps: self.gamma * rhs.beta + self.eps * rhs.eps,
        }
    }

    /// Inverse of a determinant-1 matrix: (eps -beta; -gamma alpha).
    pub fn inverse(&self) -> SympMatrix {
        SympMatrix {
            alpha: self.eps,
            beta: -self.beta,
            gamma: -self.gamma,
            eps: self.alpha,
        }
    }

    /// Action on a phase-space point: (x, z) -> (alpha x + beta z, gamma x + eps z).
    pub fn apply(&self, x: Fp, z: Fp) -> (Fp, Fp) {
        (
            self.alpha * x + self.beta * z,
            self.gamma * x + self.eps * z,
        )
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.modulus())
    }
}

impl fmt::Display for SympMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} {}; {} {})",
            self.alpha, self.beta, self.gamma, self.eps
        )
    }
}

/// All p(p^2 - 1) elements of SL(2, Z_p), lexicographic in (alpha, beta, gamma, eps).
pub fn sl2_elements(p: u32) -> Vec<SympMatrix> {
    let mut out = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for g in 0..p {
                for e in 0..p {
                    if (a as i64 * e as i64 - b as i64 * g as i64).rem_euclid(p as i64) == 1 {
                        out.push(SympMatrix {
                            alpha: Fp::reduce(a as i64, p),
                            beta: Fp::reduce(b as i64, p),
                            gamma: Fp::reduce(g as i64, p),
                            eps: Fp::reduce(e as i64, p),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Label for a left coset of BP: an element of Z_p or the point at infinity.
/// Infinity is a separate variant so no arithmetic can be done on it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CosetLabel {
    Finite(Fp),
    Infinity { modulus: u32 },
}

impl CosetLabel {
    pub fn modulus(&self) -> u32 {
        match self {
            CosetLabel::Finite(b) => b.modulus(),
            CosetLabel::Infinity { modulus } => *modulus,
        }
    }

    /// The p+1 labels in enumeration order: 0, 1, ..., p-1, infinity.
    pub fn all(p: u32) -> Vec<CosetLabel> {
        let mut out: Vec<CosetLabel> = Fp::all(p).map(CosetLabel::Finite).collect();
        out.push(CosetLabel::Infinity { modulus: p });
        out
    }

    /// Position in [`CosetLabel::all`]: finite labels by value, infinity last.
    pub fn index(&self) -> usize {
        match self {
            CosetLabel::Finite(b) => b.value() as usize,
            CosetLabel::Infinity { modulus } => *modulus as usize,
        }
    }
}

impl fmt::Display for CosetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CosetLabel::Finite(b) => write!(f, "{}", b),
            CosetLabel::Infinity { .. } => write!(f, "inf"),
        }
    }
}

/// An element C_{alpha,gamma} = (alpha 0; gamma alpha^-1) of the
/// basis-preserving subgroup BP. Determinant 1 is automatic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct BpElement {
    alpha: Fp,
    gamma: Fp,
}

impl BpElement {
    pub fn new(alpha: Fp, gamma: Fp) -> Result<Self> {
        if alpha.modulus() != gamma.modulus() {
            return Err(Error::ModulusMismatch(alpha.modulus(), gamma.modulus()));
        }
        if alpha.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(Self { alpha, gamma })
    }

    pub fn identity(p: u32) -> Self {
        Self {
            alpha: Fp::one(p),
            gamma: Fp::zero(p),
        }
    }

    pub fn alpha(&self) -> Fp {
        self.alpha
    }

    pub fn gamma(&self) -> Fp {
        self.gamma
    }

    pub fn matrix(&self) -> SympMatrix {
        SympMatrix {
            alpha: self.alpha,
            beta: Fp::zero(self.alpha.modulus()),
            gamma: self.gamma,
            eps: self.alpha.inv().expect("alpha is nonzero"),
        }
    }

    /// All p(p-1) elements, lexicographic in (alpha, gamma).
    pub fn all(p: u32) -> Vec<BpElement> {
        let mut out = Vec::new();
        for a in 1..p {
            for g in 0..p {
                out.push(BpElement {
                    alpha: Fp::reduce(a as i64, p),
                    gamma: Fp::reduce(g as i64, p),
                });
            }
        }
        out
    }
}

/// The chosen left-coset representative: F_b = (1 b; 0 1) for finite b,
/// F_inf = (2 1; -1 0).
pub fn coset_rep(b: &CosetLabel) -> SympMatrix {
    let p = b.modulus();
    match b {
        CosetLabel::Finite(b) => SympMatrix {
            alpha: Fp::one(p),
            beta: *b,
            gamma: Fp::zero(p),
            eps: Fp::one(p),
        },
        CosetLabel::Infinity { .. } => SympMatrix {
            alpha: Fp::reduce(2, p),
            beta: Fp::one(p),
            gamma: Fp::reduce(-1, p),
            eps: Fp::zero(p),
        },
    }
}

/// Unique factorization F = F_b * C with C in BP.
///
/// The label is finite (b = beta * eps^-1) exactly when eps != 0; eps = 0
/// forces the infinity representative.
pub fn coset_decompose(f: &SympMatrix) -> (CosetLabel, BpElement) {
    let p = f.modulus();
    let label = if f.eps.is_zero() {
        CosetLabel::Infinity { modulus: p }
    } else {
        CosetLabel::Finite(f.beta * f.eps.inv().expect("eps is nonzero"))
    };
    let c = coset_rep(&label).inverse().mul(f);
    debug_assert!(c.beta.is_zero(), "coset factor must lie in BP");
    (
        label,
        BpElement {
            alpha: c.alpha,
            gamma: c.gamma,
        },
    )
}

/// Conjugation C^-1 F C of a symplectic matrix by a BP element.
pub fn symp_conjugate(c: &BpElement, f: &SympMatrix) -> SympMatrix {
    let cm = c.matrix();
    cm.inverse().mul(f).mul(&cm)
}
