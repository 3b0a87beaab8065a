//! The three-level Lipkin Hamiltonian in the symmetric `|pq⟩` basis and its
//! exact ground state.
//!
//! `|pq⟩` is the normalized, permutation-symmetric state with `p` particles
//! in level 1, `q` in level 2 and `N - p - q` in level 0 (one particle per
//! degeneracy column). The basis is enumerated lexicographically in `(p, q)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::combinatorics::{multinomial, MAX_EXACT_N};
use crate::error::{Error, Result};
use crate::scalar::{cone, cre, czero, modulus, Cplx, Real};

/// Particle number, level spacing and pair-hopping strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    n: usize,
    epsilon: T,
    v: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(n: usize, epsilon: T, v: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("N = {n}, need N >= 2")));
        }
        if n > MAX_EXACT_N {
            return Err(Error::InvalidParams(format!(
                "N = {n} exceeds the supported maximum {MAX_EXACT_N}"
            )));
        }
        if !(epsilon > T::zero()) {
            return Err(Error::InvalidParams(format!("epsilon = {epsilon}, need > 0")));
        }
        if !(v >= T::zero()) {
            return Err(Error::InvalidParams(format!("V = {v}, need >= 0")));
        }
        Ok(Self { n, epsilon, v })
    }

    /// Builds parameters from the dimensionless coupling `chi = V (N - 1) / epsilon`.
    pub fn from_chi(n: usize, epsilon: T, chi: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("N = {n}, need N >= 2")));
        }
        if !(chi >= T::zero()) {
            return Err(Error::InvalidParams(format!("chi = {chi}, need >= 0")));
        }
        Self::new(n, epsilon, chi * epsilon / T::count(n - 1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn v(&self) -> T {
        self.v
    }

    pub fn chi(&self) -> T {
        self.v * T::count(self.n - 1) / self.epsilon
    }

    pub fn dim(&self) -> usize {
        pq_dim(self.n)
    }
}

/// Dimension `(N+1)(N+2)/2` of the `|pq⟩` basis.
pub fn pq_dim(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// Position of `(p, q)` in the lexicographic enumeration. Caller guarantees `p + q <= n`.
#[inline]
pub fn pq_index(n: usize, p: usize, q: usize) -> usize {
    debug_assert!(p + q <= n);
    p * (n + 1) - p * p.saturating_sub(1) / 2 + q
}

/// Iterates `(index, p, q)` over the basis in storage order.
pub fn pq_iter(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..=n)
        .flat_map(move |p| (0..=n - p).map(move |q| (p, q)))
        .enumerate()
        .map(|(i, (p, q))| (i, p, q))
}

/// Normalization `sqrt((N-p-q)! p! q! / N!)` relating `|pq⟩` to the plain sum
/// of Slater determinants with the given level occupations.
pub fn pq_norm_factor<T: Real>(n: usize, p: usize, q: usize) -> Result<T> {
    if p + q > n {
        return Err(Error::OutOfRange(format!("p + q = {} > N = {n}", p + q)));
    }
    if n > MAX_EXACT_N {
        return Err(Error::OutOfRange(format!("N = {n} too large")));
    }
    Ok((T::one() / multinomial::<T>(n, p, q)).sqrt())
}

/// Amplitudes `C_pq` over the `|pq⟩` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PqState<T> {
    n: usize,
    amps: Vec<Cplx<T>>,
}

impl<T: Real> PqState<T> {
    /// Wraps amplitudes, checking length and unit norm.
    pub fn new(n: usize, amps: Vec<Cplx<T>>) -> Result<Self> {
        let state = Self::unnormalized(n, amps)?;
        let norm = state.norm_sqr();
        if (norm - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::InvalidParams(format!("state norm^2 = {norm}, expected 1")));
        }
        Ok(state)
    }

    /// Wraps amplitudes and rescales them to unit norm.
    pub fn normalized(n: usize, amps: Vec<Cplx<T>>) -> Result<Self> {
        let mut state = Self::unnormalized(n, amps)?;
        let norm = state.norm_sqr().sqrt();
        if !(norm > T::zero()) {
            return Err(Error::NullProjection(norm.to_f64_lossy()));
        }
        let inv = T::one() / norm;
        state.amps.iter_mut().for_each(|a| *a = a.scale(inv));
        Ok(state)
    }

    fn unnormalized(n: usize, amps: Vec<Cplx<T>>) -> Result<Self> {
        if amps.len() != pq_dim(n) {
            return Err(Error::DimensionMismatch {
                expected: pq_dim(n),
                got: amps.len(),
            });
        }
        Ok(Self { n, amps })
    }

    /// The non-interacting ground state `|p=0, q=0⟩`.
    pub fn vacuum(n: usize) -> Self {
        let mut amps = vec![czero(); pq_dim(n)];
        amps[0] = cone();
        Self { n, amps }
    }

    pub fn from_real(n: usize, amps: &[T]) -> Result<Self> {
        Self::new(n, amps.iter().map(|&a| cre(a)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[Cplx<T>] {
        &self.amps
    }

    /// `C_pq`, or zero outside `0 <= p + q <= N`.
    pub fn amp(&self, p: usize, q: usize) -> Cplx<T> {
        if p + q > self.n {
            czero()
        } else {
            self.amps[pq_index(self.n, p, q)]
        }
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Largest `|C_pq|` over entries with odd `p` or odd `q`.
    pub fn odd_weight(&self) -> T {
        pq_iter(self.n)
            .filter(|&(_, p, q)| p % 2 == 1 || q % 2 == 1)
            .fold(T::zero(), |m, (i, _, _)| m.max(modulus(self.amps[i])))
    }

    /// Multiplies by a global phase so that the largest-magnitude amplitude
    /// (first one in storage order on ties) is real and positive.
    pub fn fix_phase(mut self) -> Self {
        let mut best = 0;
        let mut best_mod = T::zero();
        for (i, a) in self.amps.iter().enumerate() {
            let m = modulus(*a);
            if m > best_mod + T::tol(1e-14) {
                best = i;
                best_mod = m;
            }
        }
        if best_mod > T::zero() {
            let phase = self.amps[best].conj().unscale(best_mod);
            self.amps.iter_mut().for_each(|a| *a *= phase);
            self.amps[best] = cre(best_mod);
        }
        self
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Cplx<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(czero(), |acc, (a, b)| acc + a.conj() * b)
    }
}

/// Hamiltonian matrix `⟨p'q'|H|pq⟩`, real symmetric of dimension `(N+1)(N+2)/2`.
pub fn hamiltonian_matrix<T: Real>(params: &ModelParams<T>) -> DMatrix<T> {
    let n = params.n;
    let dim = pq_dim(n);
    let eps = params.epsilon;
    let half_v = params.v * T::lit(0.5);
    let mut h = DMatrix::<T>::zeros(dim, dim);
    let f = |x: usize| T::count(x);

    for (i, p, q) in pq_iter(n) {
        let r = n - p - q;
        h[(i, i)] = eps * (f(2 * q + p) - f(n));

        // Three raising moves; the lowering ones follow by symmetry.
        // level 0 -> level 1 pair: (p, q) -> (p + 2, q)
        if r >= 2 {
            let j = pq_index(n, p + 2, q);
            let amp = (f(r) * f(r - 1) * f(p + 1) * f(p + 2)).sqrt();
            h[(j, i)] -= half_v * amp;
            h[(i, j)] -= half_v * amp;
        }
        // level 0 -> level 2 pair: (p, q) -> (p, q + 2)
        if r >= 2 {
            let j = pq_index(n, p, q + 2);
            let amp = (f(r) * f(r - 1) * f(q + 1) * f(q + 2)).sqrt();
            h[(j, i)] -= half_v * amp;
            h[(i, j)] -= half_v * amp;
        }
        // level 1 -> level 2 pair: (p, q) -> (p - 2, q + 2)
        if p >= 2 {
            let j = pq_index(n, p - 2, q + 2);
            let amp = (f(p) * f(p - 1) * f(q + 1) * f(q + 2)).sqrt();
            h[(j, i)] -= half_v * amp;
            h[(i, j)] -= half_v * amp;
        }
    }
    h
}

/// Lowest eigenpair of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct GroundState<T> {
    pub energy: T,
    pub state: PqState<T>,
}

pub(crate) fn symmetric_eigen<T: Real>(m: DMatrix<T>) -> Result<SymmetricEigen<T, nalgebra::Dyn>> {
    let dim = m.nrows();
    SymmetricEigen::try_new(m, T::default_epsilon(), 0).ok_or(Error::EigenFailure(dim))
}

/// Index of the smallest entry and the gap to the second smallest.
pub(crate) fn lowest_with_gap<T: Real>(values: &DVector<T>) -> (usize, T) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
    let gap = if idx.len() > 1 {
        values[idx[1]] - values[idx[0]]
    } else {
        T::max_value().unwrap_or_else(T::one)
    };
    (idx[0], gap)
}

/// Exact ground state by dense diagonalization.
///
/// The eigenvector is taken from the block with even occupation of both
/// levels 1 and 2 whenever that block reaches the global minimum, so that
/// near-degenerate partners from the other parity sectors never mix in. The
/// call fails if the minimum is degenerate within the selected block.
pub fn exact_ground_state<T: Real>(params: &ModelParams<T>) -> Result<GroundState<T>> {
    let n = params.n;
    let h = hamiltonian_matrix(params);
    let scale = h.iter().fold(T::one(), |m, x| m.max(x.abs()));
    let degeneracy_tol = T::tol(1e-10) * scale;

    let eig = symmetric_eigen(h.clone())?;
    let (k, gap) = lowest_with_gap(&eig.eigenvalues);
    let global_min = eig.eigenvalues[k];

    let even: Vec<usize> = pq_iter(n)
        .filter(|&(_, p, q)| p % 2 == 0 && q % 2 == 0)
        .map(|(i, _, _)| i)
        .collect();
    let block = DMatrix::from_fn(even.len(), even.len(), |a, b| h[(even[a], even[b])]);
    let be = symmetric_eigen(block)?;
    let (kb, bgap) = lowest_with_gap(&be.eigenvalues);

    let (energy, amps) = if (be.eigenvalues[kb] - global_min).abs() <= degeneracy_tol {
        if bgap <= degeneracy_tol {
            return Err(Error::AmbiguousGroundState);
        }
        let mut amps = vec![czero(); pq_dim(n)];
        for (a, &i) in even.iter().enumerate() {
            amps[i] = cre(be.eigenvectors[(a, kb)]);
        }
        (be.eigenvalues[kb], amps)
    } else if gap > degeneracy_tol {
        let amps = eig.eigenvectors.column(k).iter().map(|&x| cre(x)).collect();
        (global_min, amps)
    } else {
        return Err(Error::AmbiguousGroundState);
    };
    let state = PqState::normalized(n, amps)?.fix_phase();
    Ok(GroundState { energy, state })
}
