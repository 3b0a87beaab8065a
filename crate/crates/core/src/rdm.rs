//! Four-orbital reduced density matrices.
//!
//! A subsystem `{n_i, n_j}` keeps levels `i < j` of the first two columns.
//! Each kept column is in one of three states: `−` (its particle sits in the
//! third level), `0` (level `i`) or `1` (level `j`). Fock modes are numbered
//! `0 = (i, col 1)`, `1 = (j, col 1)`, `2 = (i, col 2)`, `3 = (j, col 2)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::{CMatrix, FockDensity};
use crate::mean_field::HfOrbital;
use crate::model::PqState;
use crate::scalar::{cre, czero, modulus, Cplx, Real};

/// Pair of levels kept in the four-orbital subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    N0N1,
    N0N2,
    N1N2,
}

impl Subsystem {
    pub const ALL: [Subsystem; 3] = [Subsystem::N0N1, Subsystem::N0N2, Subsystem::N1N2];

    /// `(lower kept level, upper kept level, traced level)`.
    pub fn levels(self) -> (usize, usize, usize) {
        match self {
            Subsystem::N0N1 => (0, 1, 2),
            Subsystem::N0N2 => (0, 2, 1),
            Subsystem::N1N2 => (1, 2, 0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Subsystem::N0N1 => "n0n1",
            Subsystem::N0N2 => "n0n2",
            Subsystem::N1N2 => "n1n2",
        }
    }

    /// Level occupied by a column in local state `sigma` (`0 = −`, `1 = 0`, `2 = 1`).
    fn level_of(self, sigma: usize) -> usize {
        let (i, j, t) = self.levels();
        [t, i, j][sigma]
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Subsystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "n0n1" => Ok(Subsystem::N0N1),
            "n0n2" => Ok(Subsystem::N0N2),
            "n1n2" => Ok(Subsystem::N1N2),
            other => Err(Error::InvalidConfig(format!("unknown subsystem '{other}'"))),
        }
    }
}

/// Index of `|σ₁, σ₂⟩` in the nine-state basis; `σ = 0, 1, 2` stands for `−, 0, 1`.
pub fn nine_index(s1: usize, s2: usize) -> usize {
    3 * s1 + s2
}

/// Fock basis index of `|σ₁, σ₂⟩` on the four subsystem modes.
pub fn fock_index(s1: usize, s2: usize) -> usize {
    let column = |s: usize| match s {
        0 => 0,
        1 => 1,
        _ => 2,
    };
    column(s1) | (column(s2) << 2)
}

/// Density matrix on the nine one-particle-per-column states, ordered
/// `(−,−), (−,0), (−,1), (0,−), (0,0), (0,1), (1,−), (1,0), (1,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NineStateDensity<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> NineStateDensity<T> {
    /// Checks shape, Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        if matrix.nrows() != 9 || matrix.ncols() != 9 {
            return Err(Error::DimensionMismatch {
                expected: 9,
                got: matrix.nrows(),
            });
        }
        let rho = Self { matrix };
        let herm = (&rho.matrix - rho.matrix.adjoint())
            .iter()
            .fold(T::zero(), |m, z| m.max(modulus(*z)));
        if herm > T::tol(1e-12) {
            return Err(Error::InvalidDensity(format!("not Hermitian ({herm})")));
        }
        let tr = rho.matrix.trace();
        if modulus(tr - cre(T::one())) > T::tol(1e-12) {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        if let Some(l) = rho.eigenvalues().into_iter().find(|&l| l < -T::tol(1e-10)) {
            return Err(Error::InvalidDensity(format!("eigenvalue {l}")));
        }
        Ok(rho)
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// `⟨σ₁σ₂|ρ|τ₁τ₂⟩`.
    pub fn element(&self, s: (usize, usize), t: (usize, usize)) -> Cplx<T> {
        self.matrix[(nine_index(s.0, s.1), nine_index(t.0, t.1))]
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        nalgebra::SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }

    pub fn purity(&self) -> T {
        self.matrix.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Largest `|ρ_st|` over pairs whose `σ` labels differ only by a single
    /// particle moved between kept levels in one column.
    pub fn odd_coherence(&self) -> T {
        let mut m = T::zero();
        for s in 0..9 {
            for t in 0..9 {
                let (s1, s2, t1, t2) = (s / 3, s % 3, t / 3, t % 3);
                let flips = usize::from(s1 != t1) + usize::from(s2 != t2);
                if flips == 1 {
                    m = m.max(modulus(self.matrix[(s, t)]));
                }
            }
        }
        m
    }
}

/// Reduced density of columns 1 and 2 for a state in the `|pq⟩` basis.
///
/// The remaining `N − 2` columns hold `r = (r0, r1, r2)` particles per level;
/// for fixed `r`, every nine-state configuration `s` fixes the full level
/// counts `n(s, r)`, and
/// `ρ_st = Σ_r x_s(r) x_t(r)* / (N(N−1))` with
/// `x_s(r) = C_{n(s,r)} √(Π_l n_l! / r_l!)`,
/// restricted to pairs with the same set of `−` columns.
pub fn rdm_from_pq<T: Real>(state: &PqState<T>, sub: Subsystem) -> Result<NineStateDensity<T>> {
    let n = state.n();
    if n < 2 {
        return Err(Error::InvalidParams(format!("N = {n}, need >= 2")));
    }
    let rest = n - 2;
    let mut m = CMatrix::<T>::zeros(9, 9);
    let mut x = [czero::<T>(); 9];
    for r1 in 0..=rest {
        for r2 in 0..=rest - r1 {
            let r = [rest - r1 - r2, r1, r2];
            for (s, xs) in x.iter_mut().enumerate() {
                let mut counts = r;
                counts[sub.level_of(s / 3)] += 1;
                counts[sub.level_of(s % 3)] += 1;
                let mut weight = 1usize;
                for l in 0..3 {
                    for k in r[l] + 1..=counts[l] {
                        weight *= k;
                    }
                }
                *xs = state.amp(counts[1], counts[2]) * T::count(weight).sqrt();
            }
            for s in 0..9 {
                if x[s] == czero() {
                    continue;
                }
                for t in 0..9 {
                    if same_empty_columns(s, t) {
                        m[(s, t)] += x[s] * x[t].conj();
                    }
                }
            }
        }
    }
    let scale = T::one() / (T::count(n) * T::count(n - 1));
    m *= cre(scale);
    NineStateDensity::new(m)
}

fn same_empty_columns(s: usize, t: usize) -> bool {
    (s / 3 == 0) == (t / 3 == 0) && s.is_multiple_of(3) == t.is_multiple_of(3)
}

/// Reduced density of the HF determinant: the product `ρ_c ⊗ ρ_c` of two
/// identical column states `ρ_c = U_t² |−⟩⟨−| + |w⟩⟨w|`, `w = U_i |0⟩ + U_j |1⟩`.
pub fn rdm_from_hf<T: Real>(orb: &HfOrbital<T>, sub: Subsystem) -> NineStateDensity<T> {
    let (i, j, t) = sub.levels();
    let u = orb.components();
    let w = [T::zero(), u[i], u[j]];
    let col = |a: usize, b: usize| -> T {
        if a == 0 && b == 0 {
            u[t] * u[t]
        } else {
            w[a] * w[b]
        }
    };
    let m = CMatrix::from_fn(9, 9, |s, r| cre(col(s / 3, r / 3) * col(s % 3, r % 3)));
    NineStateDensity { matrix: m }
}

/// Embeds a nine-state density into the 16-dimensional Fock space of the
/// four subsystem modes.
pub fn embed_to_fock<T: Real>(rho: &NineStateDensity<T>) -> FockDensity<T> {
    let mut m = CMatrix::<T>::zeros(16, 16);
    for s in 0..9 {
        for t in 0..9 {
            m[(fock_index(s / 3, s % 3), fock_index(t / 3, t % 3))] = rho.matrix[(s, t)];
        }
    }
    FockDensity::from_matrix_unchecked(4, m).expect("four modes")
}
