//! Occupation-basis algebra on a handful of fermionic modes.
//!
//! Basis state `s` of an `n`-mode Fock space has mode `i` occupied iff bit `i`
//! of `s` is set, and stands for `c†_{i1} c†_{i2} ... |0⟩` with
//! `i1 < i2 < ...`. Fermionic signs follow from that ordering.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{cone, cre, czero, modulus, Cplx, Real};

/// Largest mode count handled by the dense routines.
pub const MAX_MODES: usize = 6;

pub type CMatrix<T> = DMatrix<Cplx<T>>;

/// Number of occupied modes strictly below `mode` in basis state `s`.
#[inline]
fn occupied_below(s: usize, mode: usize) -> u32 {
    (s & ((1usize << mode) - 1)).count_ones()
}

#[inline]
pub(crate) fn parity_of(s: usize) -> usize {
    (s.count_ones() & 1) as usize
}

/// Ordered, duplicate-free set of mode labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeSubset {
    indices: Vec<usize>,
}

impl ModeSubset {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidPartition("empty mode subset".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition(format!(
                "mode indices {indices:?} must be strictly increasing"
            )));
        }
        if indices[indices.len() - 1] >= MAX_MODES {
            return Err(Error::InvalidPartition(format!("mode index out of range in {indices:?}")));
        }
        Ok(Self { indices })
    }

    /// Builds a subset from labels in any order; duplicates are rejected.
    pub fn from_unsorted(mut indices: Vec<usize>) -> Result<Self> {
        let before = indices.len();
        indices.sort_unstable();
        indices.dedup();
        if indices.len() != before {
            return Err(Error::InvalidPartition("duplicate mode label".into()));
        }
        Self::new(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, mode: usize) -> bool {
        self.indices.binary_search(&mode).is_ok()
    }
}

/// Density operator on `n_modes` fermionic modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity<T: Real> {
    n_modes: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> FockDensity<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(n_modes: usize, matrix: CMatrix<T>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(n_modes, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps a matrix after checking only its shape.
    pub fn from_matrix_unchecked(n_modes: usize, matrix: CMatrix<T>) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::InvalidDensity(format!("{n_modes} modes unsupported")));
        }
        let dim = 1 << n_modes;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        Ok(Self { n_modes, matrix })
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn pure(n_modes: usize, psi: &[Cplx<T>]) -> Result<Self> {
        let dim = 1 << n_modes;
        if psi.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: psi.len(),
            });
        }
        let m = CMatrix::from_fn(dim, dim, |i, j| psi[i] * psi[j].conj());
        Self::new(n_modes, m)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        1 << self.n_modes
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn trace(&self) -> Cplx<T> {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> T {
        let d = self.dim();
        let mut err = T::zero();
        for i in 0..d {
            for j in 0..d {
                err = err.max(modulus(self.matrix[(i, j)] - self.matrix[(j, i)].conj()));
            }
        }
        err
    }

    /// Largest matrix element connecting even and odd total occupation.
    pub fn parity_coherence(&self) -> T {
        let d = self.dim();
        let mut m = T::zero();
        for i in 0..d {
            for j in 0..d {
                if parity_of(i) != parity_of(j) {
                    m = m.max(modulus(self.matrix[(i, j)]));
                }
            }
        }
        m
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn purity(&self) -> T {
        (&self.matrix * &self.matrix).trace().re
    }

    fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > T::tol(1e-12) {
            return Err(Error::InvalidDensity(format!("not Hermitian (error {herm})")));
        }
        let tr = self.trace();
        if (tr.re - T::one()).abs() > T::tol(1e-12) || tr.im.abs() > T::tol(1e-12) {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        let min = self.eigenvalues().into_iter().fold(T::one(), |m, x| m.min(x));
        if min < -T::tol(1e-10) {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &CMatrix<T>) -> Result<Self> {
        if u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.nrows(),
            });
        }
        Ok(Self {
            n_modes: self.n_modes,
            matrix: u * &self.matrix * u.adjoint(),
        })
    }
}

/// Annihilation operator `c_mode` on an `n_modes` Fock space, with
/// Jordan-Wigner string over the lower modes.
pub fn annihilator<T: Real>(n_modes: usize, mode: usize) -> CMatrix<T> {
    let dim = 1 << n_modes;
    let mut c = CMatrix::zeros(dim, dim);
    for s in 0..dim {
        if s & (1 << mode) != 0 {
            let sign = if occupied_below(s, mode).is_multiple_of(2) { T::one() } else { -T::one() };
            c[(s ^ (1 << mode), s)] = cre(sign);
        }
    }
    c
}

/// Signs and target indices of the basis relabeling that moves the modes in
/// `order` to positions `0, 1, ...`. Entry `s` holds `(t, sign)` where `t` is
/// the index in the new labeling and `sign` the permutation parity of the
/// occupied modes.
pub(crate) fn reorder_map(n_modes: usize, order: &[usize]) -> Vec<(usize, bool)> {
    debug_assert_eq!(order.len(), n_modes);
    (0..1usize << n_modes)
        .map(|s| {
            let mut t = 0usize;
            let mut inversions = 0u32;
            for (pos, &m) in order.iter().enumerate() {
                if s & (1 << m) != 0 {
                    t |= 1 << pos;
                    inversions += order[..pos]
                        .iter()
                        .filter(|&&earlier| earlier > m && s & (1 << earlier) != 0)
                        .count() as u32;
                }
            }
            (t, inversions % 2 == 1)
        })
        .collect()
}

/// Rewrites `ρ` in the labeling where `order[k]` becomes mode `k`.
pub(crate) fn reorder_matrix<T: Real>(matrix: &CMatrix<T>, n_modes: usize, order: &[usize]) -> CMatrix<T> {
    let map = reorder_map(n_modes, order);
    let dim = 1 << n_modes;
    let mut out = CMatrix::zeros(dim, dim);
    for (s, &(t, ns)) in map.iter().enumerate() {
        for (s2, &(t2, ns2)) in map.iter().enumerate() {
            let v = matrix[(s, s2)];
            out[(t, t2)] = if ns != ns2 { -v } else { v };
        }
    }
    out
}

/// Complete `order` with the modes not listed in `first`, ascending.
pub(crate) fn order_with_first(n_modes: usize, first: &[usize]) -> Vec<usize> {
    let mut order = first.to_vec();
    order.extend((0..n_modes).filter(|m| !first.contains(m)));
    order
}

/// Fermionic partial trace onto the modes in `keep`. The kept modes are
/// relabeled `0..keep.len()` in ascending order.
pub fn partial_trace<T: Real>(rho: &FockDensity<T>, keep: &ModeSubset) -> Result<FockDensity<T>> {
    let n = rho.n_modes;
    if keep.is_empty() {
        return Err(Error::InvalidPartition("empty keep set".into()));
    }
    if keep.indices().iter().any(|&m| m >= n) {
        return Err(Error::InvalidPartition(format!(
            "keep set {:?} outside {n} modes",
            keep.indices()
        )));
    }
    let k = keep.len();
    if k == n {
        return Ok(rho.clone());
    }
    let order = order_with_first(n, keep.indices());
    let reordered = reorder_matrix(&rho.matrix, n, &order);
    let dk = 1 << k;
    let dr = 1 << (n - k);
    let mut out = CMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = czero();
            for r in 0..dr {
                acc += reordered[(a + (r << k), b + (r << k))];
            }
            out[(a, b)] = acc;
        }
    }
    FockDensity::from_matrix_unchecked(k, out)
}

/// Six real parameters of a one-body generator on two modes,
/// `H = h11 n1 + h22 n2 + (h12 c†1 c2 + h.c.) + (d12 c†1 c†2 + h.c.)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementParams<T> {
    pub h11: T,
    pub h22: T,
    pub h12: Cplx<T>,
    pub d12: Cplx<T>,
}

impl<T: Real> MeasurementParams<T> {
    pub const DOF: usize = 6;

    pub fn zero() -> Self {
        Self::from_array([T::zero(); 6])
    }

    /// Order: `h11, h22, Re h12, Im h12, Re d12, Im d12`.
    pub fn from_array(x: [T; 6]) -> Self {
        Self {
            h11: x[0],
            h22: x[1],
            h12: Cplx::new(x[2], x[3]),
            d12: Cplx::new(x[4], x[5]),
        }
    }

    pub fn from_slice(x: &[T]) -> Self {
        let mut a = [T::zero(); 6];
        a.copy_from_slice(&x[..6]);
        Self::from_array(a)
    }

    pub fn to_array(&self) -> [T; 6] {
        [self.h11, self.h22, self.h12.re, self.h12.im, self.d12.re, self.d12.im]
    }

    pub fn neg(&self) -> Self {
        Self::from_array(self.to_array().map(|x| -x))
    }

    /// One-body matrix `h` (Hermitian).
    pub fn h_matrix(&self) -> CMatrix<T> {
        CMatrix::from_row_slice(2, 2, &[cre(self.h11), self.h12, self.h12.conj(), cre(self.h22)])
    }

    /// Pairing matrix `Δ` (antisymmetric).
    pub fn delta_matrix(&self) -> CMatrix<T> {
        CMatrix::from_row_slice(2, 2, &[czero(), self.d12, -self.d12, czero()])
    }
}

/// The generator as a 4x4 matrix on the two-mode Fock space.
pub fn thouless_generator<T: Real>(mp: &MeasurementParams<T>) -> CMatrix<T> {
    let c1 = annihilator::<T>(2, 0);
    let c2 = annihilator::<T>(2, 1);
    let c1d = c1.adjoint();
    let c2d = c2.adjoint();
    let n1 = &c1d * &c1;
    let n2 = &c2d * &c2;
    let hop = (&c1d * &c2) * mp.h12;
    let pair = (&c1d * &c2d) * mp.d12;
    n1 * cre(mp.h11) + n2 * cre(mp.h22) + &hop + hop.adjoint() + &pair + pair.adjoint()
}

/// `exp(i A)` for a Hermitian matrix `A`, via its eigendecomposition.
pub fn expi_hermitian<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let eig = SymmetricEigen::new(a.clone());
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        a.nrows(),
        eig.eigenvalues.iter().map(|&l| Cplx::new(l.cos(), l.sin())),
    ));
    v * phases * v.adjoint()
}

/// `R = exp(i H)` on the two-mode Fock space (basis `|00⟩, |10⟩, |01⟩, |11⟩`).
pub fn thouless_unitary<T: Real>(mp: &MeasurementParams<T>) -> CMatrix<T> {
    expi_hermitian(&thouless_generator(mp))
}

/// Single-particle Bogoliubov blocks `(U, V)` of `R c†_i R† = Σ_j U_ji c†_j + V_ji c_j`,
/// read off from `exp(i [[h, Δ], [-Δ*, -h*]])`.
pub fn bogoliubov_matrices<T: Real>(mp: &MeasurementParams<T>) -> (CMatrix<T>, CMatrix<T>) {
    let h = mp.h_matrix();
    let d = mp.delta_matrix();
    let mut big = CMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            big[(i, j)] = h[(i, j)];
            big[(i, j + 2)] = d[(i, j)];
            big[(i + 2, j)] = -d[(i, j)].conj();
            big[(i + 2, j + 2)] = -h[(i, j)].conj();
        }
    }
    let w = expi_hermitian(&big);
    let u = w.view((0, 0), (2, 2)).into_owned();
    let v = w.view((2, 0), (2, 2)).into_owned();
    (u, v)
}

/// Diagonal occupation projectors `Π_k = |k⟩⟨k|`, `k = 0 .. 2^n_modes`.
pub fn occupation_projectors<T: Real>(n_modes: usize) -> Vec<CMatrix<T>> {
    let dim = 1 << n_modes;
    (0..dim)
        .map(|k| {
            let mut p = CMatrix::zeros(dim, dim);
            p[(k, k)] = cone();
            p
        })
        .collect()
}

/// `R† Π_k R` for every occupation projector of the two-mode space.
pub fn rotated_projectors<T: Real>(mp: &MeasurementParams<T>) -> Vec<CMatrix<T>> {
    let r = thouless_unitary(mp);
    let rd = r.adjoint();
    occupation_projectors::<T>(2)
        .into_iter()
        .map(|p| &rd * p * &r)
        .collect()
}

/// Eigenvalues of a Hermitian matrix. Sizes 1 and 2 are done in closed form.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    match m.nrows() {
        0 => vec![],
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let half = T::lit(0.5);
            let mean = (a + d) * half;
            let diff = (a - d) * half;
            let r = (diff * diff + m[(0, 1)].norm_sqr()).sqrt();
            vec![mean - r, mean + r]
        }
        _ => SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect(),
    }
}

/// `-Σ λ ln λ` over a spectrum, clipping round-off negatives.
pub fn entropy_from_eigenvalues<T: Real>(values: impl IntoIterator<Item = T>) -> Result<T> {
    let mut s = T::zero();
    for l in values {
        if l < -T::tol(1e-8) {
            return Err(Error::InvalidDensity(format!("eigenvalue {l} below zero")));
        }
        if l > T::zero() {
            s -= l * l.ln();
        }
    }
    Ok(s.max(T::zero()))
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy<T: Real>(rho: &FockDensity<T>) -> Result<T> {
    entropy_from_eigenvalues(parity_block_eigenvalues(&rho.matrix))
}

/// Eigenvalues of a matrix assumed block diagonal in total occupation
/// parity; falls back to the full matrix if coherences between the sectors
/// are present.
pub(crate) fn parity_block_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let dim = m.nrows();
    if dim < 2 || !dim.is_power_of_two() {
        return hermitian_eigenvalues(m);
    }
    let scale = m.iter().fold(T::zero(), |a, z| a.max(modulus(*z)));
    let cross = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .filter(|&(i, j)| parity_of(i) != parity_of(j))
        .fold(T::zero(), |a, (i, j)| a.max(modulus(m[(i, j)])));
    if cross > T::tol(1e-14) * scale.max(T::one()) {
        return hermitian_eigenvalues(m);
    }
    let mut out = Vec::with_capacity(dim);
    for parity in 0..2 {
        let idx: Vec<usize> = (0..dim).filter(|&s| parity_of(s) == parity).collect();
        let block = CMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])]);
        out.extend(hermitian_eigenvalues(&block));
    }
    out
}
