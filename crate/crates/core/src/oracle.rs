//! Brute-force reference implementations for small particle numbers.
//!
//! Everything here works in the full occupation space of the `3N` modes with
//! level-major ordering: mode `σN + p` is level `σ`, column `p`. Basis states
//! are bitmasks of occupied modes in that global order, and fermionic signs
//! come from it. None of the routines share code with the `|pq⟩` machinery
//! beyond the plain model parameters.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::discord::Partition;
use crate::error::{Error, Result};
use crate::fock::{annihilator, CMatrix, FockDensity, MeasurementParams};
use crate::model::ModelParams;
use crate::rdm::{NineStateDensity, Subsystem};
use crate::scalar::Cplx;

/// Largest particle number handled.
pub const ORACLE_MAX_N: usize = 6;

/// Sparse real state over occupation bitmasks.
pub type SparseState = BTreeMap<u32, f64>;

fn jw_sign(mask: u32, mode: usize) -> f64 {
    if (mask & ((1u32 << mode) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn annihilate(state: &SparseState, mode: usize) -> SparseState {
    let mut out = SparseState::new();
    for (&m, &v) in state {
        if m & (1 << mode) != 0 {
            *out.entry(m ^ (1 << mode)).or_insert(0.0) += jw_sign(m, mode) * v;
        }
    }
    out
}

fn create(state: &SparseState, mode: usize) -> SparseState {
    let mut out = SparseState::new();
    for (&m, &v) in state {
        if m & (1 << mode) == 0 {
            *out.entry(m | (1 << mode)).or_insert(0.0) += jw_sign(m, mode) * v;
        }
    }
    out
}

fn add_scaled(acc: &mut SparseState, other: &SparseState, scale: f64) {
    for (&m, &v) in other {
        *acc.entry(m).or_insert(0.0) += scale * v;
    }
}

/// The `3^N` configurations with one particle per column.
#[derive(Debug, Clone)]
pub struct OccupationBasis {
    n: usize,
    masks: Vec<u32>,
    index: BTreeMap<u32, usize>,
}

impl OccupationBasis {
    pub fn new(n: usize) -> Result<Self> {
        if !(1..=ORACLE_MAX_N).contains(&n) {
            return Err(Error::OutOfRange(format!("oracle needs 1 <= N <= {ORACLE_MAX_N}, got {n}")));
        }
        let total = 3usize.pow(n as u32);
        let mut masks = Vec::with_capacity(total);
        for code in 0..total {
            let mut c = code;
            let mut mask = 0u32;
            for col in 0..n {
                let level = c % 3;
                c /= 3;
                mask |= 1 << (level * n + col);
            }
            masks.push(mask);
        }
        let index = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Ok(Self { n, masks, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    /// Global mode label of level `level`, column `col`.
    pub fn mode(&self, level: usize, col: usize) -> usize {
        level * self.n + col
    }

    /// Level index of each column in configuration `i`.
    pub fn levels(&self, i: usize) -> Vec<usize> {
        let m = self.masks[i];
        (0..self.n)
            .map(|col| (0..3).find(|&l| m & (1 << (l * self.n + col)) != 0).expect("one particle per column"))
            .collect()
    }

    fn to_dense(&self, s: &SparseState) -> DVector<f64> {
        let mut v = DVector::zeros(self.len());
        for (&m, &x) in s {
            let i = *self
                .index
                .get(&m)
                .expect("state left the one-particle-per-column sector");
            v[i] += x;
        }
        v
    }

    fn to_sparse(&self, v: &DVector<f64>) -> SparseState {
        self.masks
            .iter()
            .zip(v.iter())
            .filter(|(_, &x)| x != 0.0)
            .map(|(&m, &x)| (m, x))
            .collect()
    }

    /// `K_{στ} = Σ_p c†_{σp} c_{τp}` applied to a sparse state.
    fn apply_k(&self, sigma: usize, tau: usize, s: &SparseState) -> SparseState {
        let mut out = SparseState::new();
        for col in 0..self.n {
            let moved = create(&annihilate(s, self.mode(tau, col)), self.mode(sigma, col));
            add_scaled(&mut out, &moved, 1.0);
        }
        out
    }

    /// Non-interacting ground state `Π_p c†_{0p} |vac⟩`.
    pub fn vacuum(&self) -> DVector<f64> {
        let mut s = SparseState::new();
        s.insert(0, 1.0);
        for col in (0..self.n).rev() {
            s = create(&s, self.mode(0, col));
        }
        self.to_dense(&s)
    }
}

/// Full Hamiltonian `ε(K22 − K00) − V/2 Σ_{σ>τ}(K²_{στ} + K²_{τσ})` on the
/// occupation basis.
pub fn oracle_hamiltonian(basis: &OccupationBasis, params: &ModelParams<f64>) -> Result<DMatrix<f64>> {
    if basis.n() != params.n() {
        return Err(Error::DimensionMismatch {
            expected: params.n(),
            got: basis.n(),
        });
    }
    let dim = basis.len();
    let mut h = DMatrix::zeros(dim, dim);
    let eps = params.epsilon();
    let half_v = 0.5 * params.v();
    for (j, &m) in basis.masks.iter().enumerate() {
        let mut ket = SparseState::new();
        ket.insert(m, 1.0);
        let mut out = SparseState::new();
        add_scaled(&mut out, &basis.apply_k(2, 2, &ket), eps);
        add_scaled(&mut out, &basis.apply_k(0, 0, &ket), -eps);
        for (s, t) in [(1, 0), (2, 0), (2, 1)] {
            let up = basis.apply_k(s, t, &basis.apply_k(s, t, &ket));
            let down = basis.apply_k(t, s, &basis.apply_k(t, s, &ket));
            add_scaled(&mut out, &up, -half_v);
            add_scaled(&mut out, &down, -half_v);
        }
        let col = basis.to_dense(&out);
        h.set_column(j, &col);
    }
    Ok(h)
}

/// Lowest eigenpair of the full Hamiltonian together with the gap to the
/// next level.
pub fn oracle_ground_state(params: &ModelParams<f64>) -> Result<(f64, DVector<f64>, f64)> {
    let basis = OccupationBasis::new(params.n())?;
    let h = oracle_hamiltonian(&basis, params)?;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let e0 = eig.eigenvalues[order[0]];
    let gap = order.get(1).map_or(f64::INFINITY, |&i| eig.eigenvalues[i] - e0);
    Ok((e0, eig.eigenvectors.column(order[0]).into_owned(), gap))
}

/// Normalized `K_{10}^p K_{20}^q |0⟩`, the occupation-space image of `|pq⟩`.
pub fn oracle_pq_state(basis: &OccupationBasis, p: usize, q: usize) -> Result<DVector<f64>> {
    if p + q > basis.n() {
        return Err(Error::OutOfRange(format!("p + q = {} > N = {}", p + q, basis.n())));
    }
    let mut s = basis.to_sparse(&basis.vacuum());
    for _ in 0..q {
        s = basis.apply_k(2, 0, &s);
    }
    for _ in 0..p {
        s = basis.apply_k(1, 0, &s);
    }
    let v = basis.to_dense(&s);
    Ok(&v / v.norm())
}

/// Occupation-space image of a `|pq⟩` amplitude vector (real parts).
pub fn oracle_embed_pq(basis: &OccupationBasis, amps: &[Cplx<f64>]) -> Result<DVector<f64>> {
    let n = basis.n();
    let mut v = DVector::zeros(basis.len());
    let mut k = 0;
    for p in 0..=n {
        for q in 0..=n - p {
            let a = amps.get(k).ok_or(Error::DimensionMismatch {
                expected: (n + 1) * (n + 2) / 2,
                got: amps.len(),
            })?;
            if a.re != 0.0 {
                v += oracle_pq_state(basis, p, q)? * a.re;
            }
            k += 1;
        }
    }
    Ok(v)
}

/// `exp(t (x K_{10} + y K_{20})) |0⟩`, normalized, by its terminating power series.
pub fn oracle_generated_state(basis: &OccupationBasis, x: f64, y: f64) -> DVector<f64> {
    let mut term = basis.to_sparse(&basis.vacuum());
    let mut total = term.clone();
    for k in 1..=basis.n() {
        let mut next = SparseState::new();
        add_scaled(&mut next, &basis.apply_k(1, 0, &term), x / k as f64);
        add_scaled(&mut next, &basis.apply_k(2, 0, &term), y / k as f64);
        add_scaled(&mut total, &next, 1.0);
        term = next;
    }
    let v = basis.to_dense(&total);
    &v / v.norm()
}

/// Slater determinant with every column in the orbital `(u0, u1, u2)`; requires `u0 ≠ 0`.
pub fn oracle_slater(basis: &OccupationBasis, orbital: [f64; 3]) -> Result<DVector<f64>> {
    if orbital[0] == 0.0 {
        return Err(Error::InvalidParams("orbital has no level-0 component".into()));
    }
    Ok(oracle_generated_state(basis, orbital[1] / orbital[0], orbital[2] / orbital[0]))
}

/// Generating determinant at angles `(φ₁, φ₂)`, `0 ≤ φ₁ < π/2`.
pub fn oracle_slater_angles(basis: &OccupationBasis, phi1: f64, phi2: f64) -> DVector<f64> {
    let t = phi1.tan();
    oracle_generated_state(basis, t * phi2.cos(), t * phi2.sin())
}

/// `⟨a|H|b⟩` for occupation-space vectors.
pub fn oracle_matrix_element(h: &DMatrix<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.dot(&(h * b))
}

/// Reduced density on the listed global modes, the `k`-th of which becomes
/// local mode `k`: `ρ_{ab} = ⟨φ_b|φ_a⟩` with `φ_a = P₀ c_{a_1} c_{a_2} ... |ψ⟩`,
/// where `P₀` empties the kept modes.
pub fn oracle_reduce(basis: &OccupationBasis, psi: &DVector<f64>, keep: &[usize]) -> CMatrix<f64> {
    let dim = 1usize << keep.len();
    let kept_mask: u32 = keep.iter().map(|&m| 1u32 << m).sum();
    let start = basis.to_sparse(psi);
    let phis: Vec<SparseState> = (0..dim)
        .map(|a| {
            // |a⟩ = c†_{k1} c†_{k2} ... |0⟩ over local modes in ascending order;
            // its adjoint applies c_{k1} first.
            let mut s = start.clone();
            for (local, &global) in keep.iter().enumerate() {
                if a & (1 << local) != 0 {
                    s = annihilate(&s, global);
                }
            }
            s.retain(|&m, _| m & kept_mask == 0);
            s
        })
        .collect();
    CMatrix::from_fn(dim, dim, |a, b| {
        let v: f64 = phis[b]
            .iter()
            .filter_map(|(m, x)| phis[a].get(m).map(|y| x * y))
            .sum();
        Cplx::new(v, 0.0)
    })
}

/// Four-orbital density of columns `cols` (0-based) for a subsystem, with
/// modes `(i, c₁), (j, c₁), (i, c₂), (j, c₂)`.
pub fn oracle_rdm_columns(
    basis: &OccupationBasis,
    psi: &DVector<f64>,
    sub: Subsystem,
    cols: (usize, usize),
) -> Result<NineStateDensity<f64>> {
    let (i, j, _) = sub.levels();
    let keep = [
        basis.mode(i, cols.0),
        basis.mode(j, cols.0),
        basis.mode(i, cols.1),
        basis.mode(j, cols.1),
    ];
    let full = oracle_reduce(basis, psi, &keep);
    let fock_of = |s: usize| [0usize, 1, 2][s];
    let m = CMatrix::from_fn(9, 9, |s, t| {
        let fs = fock_of(s / 3) | (fock_of(s % 3) << 2);
        let ft = fock_of(t / 3) | (fock_of(t % 3) << 2);
        full[(fs, ft)]
    });
    NineStateDensity::new(m)
}

/// Four-orbital density of the first two columns.
pub fn oracle_rdm(basis: &OccupationBasis, psi: &DVector<f64>, sub: Subsystem) -> Result<NineStateDensity<f64>> {
    oracle_rdm_columns(basis, psi, sub, (0, 1))
}

fn entropy_of(m: &CMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(m.clone());
    eig.eigenvalues.iter().filter(|&&l| l > 1e-300).map(|&l| -l * l.ln()).sum()
}

/// Nonzero entries of an operator.
type Sparse = Vec<(usize, usize, Cplx<f64>)>;

fn sparse_of(m: &CMatrix<f64>) -> Sparse {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if m[(i, j)] != Cplx::new(0.0, 0.0) {
                out.push((i, j, m[(i, j)]));
            }
        }
    }
    out
}

/// `exp(i G)` for a sparse Hermitian `G`: Taylor series of the scaled
/// generator followed by repeated squaring.
fn expi_sparse(gen: &Sparse, dim: usize) -> CMatrix<f64> {
    let mut rows = vec![0.0; dim];
    for &(i, _, v) in gen {
        rows[i] += v.norm();
    }
    let norm = rows.iter().fold(0.0f64, |m, &r| m.max(r));
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let x: Sparse = gen.iter().map(|&(i, j, v)| (i, j, v * Cplx::new(0.0, scale))).collect();
    let mut term = CMatrix::<f64>::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..18 {
        let mut next = CMatrix::<f64>::zeros(dim, dim);
        for &(i, j, v) in &x {
            for c in 0..dim {
                next[(i, c)] += v * term[(j, c)];
            }
        }
        term = next / Cplx::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Full-space measurement setup for one density and partition.
struct FullSpaceMeasurement {
    reduced: CMatrix<f64>,
    /// Local positions of the `B` modes inside `A ∪ B`.
    b_local: Vec<usize>,
    number: [Sparse; 2],
    hop: Sparse,
    pair: Sparse,
}

impl FullSpaceMeasurement {
    fn new(rho: &FockDensity<f64>, part: &Partition) -> Result<Self> {
        let union: Vec<usize> = part.union().indices().to_vec();
        let reduced = oracle_trace_density(rho, &union)?;
        let local = |m: usize| union.iter().position(|&u| u == m).expect("in union");
        let n = union.len();
        let b_local: Vec<usize> = part.b().indices().iter().map(|&m| local(m)).collect();
        let ops: Vec<CMatrix<f64>> = b_local.iter().map(|&m| annihilator::<f64>(n, m)).collect();
        let (number, hop, pair) = if ops.len() == 2 {
            let (c1, c2) = (&ops[0], &ops[1]);
            (
                [sparse_of(&(c1.adjoint() * c1)), sparse_of(&(c2.adjoint() * c2))],
                sparse_of(&(c1.adjoint() * c2)),
                sparse_of(&(c1.adjoint() * c2.adjoint())),
            )
        } else {
            Default::default()
        };
        Ok(Self {
            reduced,
            b_local,
            number,
            hop,
            pair,
        })
    }

    fn generator(&self, mp: &MeasurementParams<f64>) -> Sparse {
        let mut gen: Sparse = Vec::new();
        gen.extend(self.number[0].iter().map(|&(i, j, v)| (i, j, v * mp.h11)));
        gen.extend(self.number[1].iter().map(|&(i, j, v)| (i, j, v * mp.h22)));
        for (ops, z) in [(&self.hop, mp.h12), (&self.pair, mp.d12)] {
            for &(i, j, v) in ops {
                gen.push((i, j, v * z));
                gen.push((j, i, (v * z).conj()));
            }
        }
        gen
    }

    fn conditional_entropy(&self, mp: &MeasurementParams<f64>) -> f64 {
        let dim = self.reduced.nrows();
        // spectrum of Π_k ρ Π_k with Π_k = R† P_k R equals that of P_k (R ρ R†) P_k
        let rotated = if self.b_local.len() == 2 {
            let r = expi_sparse(&self.generator(mp), dim);
            &r * &self.reduced * r.adjoint()
        } else {
            self.reduced.clone()
        };
        let b_mask: usize = self.b_local.iter().map(|&m| 1 << m).sum();
        let mut total = 0.0;
        for k in 0..1usize << self.b_local.len() {
            let pattern: usize = self
                .b_local
                .iter()
                .enumerate()
                .filter(|(bit, _)| k & (1 << bit) != 0)
                .map(|(_, &m)| 1 << m)
                .sum();
            let support: Vec<usize> = (0..dim).filter(|s| s & b_mask == pattern).collect();
            let block = CMatrix::from_fn(support.len(), support.len(), |a, b| rotated[(support[a], support[b])]);
            let pk = block.trace().re;
            if pk < 1e-14 {
                continue;
            }
            total += pk * entropy_of(&(block / Cplx::new(pk, 0.0)));
        }
        total
    }
}

/// Measurement-based conditional entropy computed on the whole Fock space of
/// `ρ`: the rotation `R` is exponentiated from mode operators of the full
/// space, and `p_k S(ρ_{A|k})` is read off the spectrum of `Π_k ρ Π_k`.
/// Modes outside `A ∪ B` are traced out first.
pub fn oracle_conditional_entropy(
    rho: &FockDensity<f64>,
    part: &Partition,
    mp: &MeasurementParams<f64>,
) -> Result<f64> {
    Ok(FullSpaceMeasurement::new(rho, part)?.conditional_entropy(mp))
}

/// Fermionic partial trace of a density matrix via
/// `ρ_K[a, b] = Tr(ρ L_b† P₀ L_a)`, where `L_a` removes the kept particles of
/// `|a⟩` and `P₀` empties the kept modes, all built from full-space operators.
pub fn oracle_trace_density(rho: &FockDensity<f64>, keep: &[usize]) -> Result<CMatrix<f64>> {
    let n = rho.n_modes();
    if keep.iter().any(|&m| m >= n) {
        return Err(Error::InvalidPartition(format!("keep set {keep:?} outside {n} modes")));
    }
    let dim = 1 << n;
    let ops: Vec<CMatrix<f64>> = keep.iter().map(|&m| annihilator::<f64>(n, m)).collect();
    let id = CMatrix::<f64>::identity(dim, dim);
    let mut p0 = id.clone();
    for c in &ops {
        p0 *= &id - c.adjoint() * c;
    }
    let lowering = |a: usize| {
        // c_{k1} acts first
        let mut op = id.clone();
        for (local, c) in ops.iter().enumerate() {
            if a & (1 << local) != 0 {
                op = c * op;
            }
        }
        op
    };
    let kd = 1 << keep.len();
    let lows: Vec<CMatrix<f64>> = (0..kd).map(lowering).collect();
    let left: Vec<CMatrix<f64>> = lows.iter().map(|l| rho.matrix() * l.adjoint() * &p0).collect();
    Ok(CMatrix::from_fn(kd, kd, |a, b| {
        left[b].iter().zip(lows[a].transpose().iter()).map(|(x, y)| x * y).sum()
    }))
}

/// Estimate of `J` from random measurement parameters followed by coordinate
/// descent on the best candidates.
pub fn oracle_discord_search(
    rho: &FockDensity<f64>,
    part: &Partition,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let keep_a: Vec<usize> = part.a().indices().to_vec();
    let s_a = entropy_of(&oracle_trace_density(rho, &keep_a)?);
    let setup = FullSpaceMeasurement::new(rho, part)?;
    if part.b().len() == 1 {
        return Ok(s_a - setup.conditional_entropy(&MeasurementParams::zero()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = std::f64::consts::PI;
    let points: Vec<[f64; 6]> = (0..samples)
        .map(|_| std::array::from_fn(|_| rng.random_range(-pi..=pi)))
        .collect();
    let f = |x: &[f64; 6]| setup.conditional_entropy(&MeasurementParams::from_array(*x));
    let mut scored: Vec<(f64, usize)> = points.par_iter().enumerate().map(|(i, x)| (f(x), i)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let polish = |mut x: [f64; 6], mut fx: f64| {
        let mut step = 0.25;
        let mut budget = 3000;
        while step > 1e-9 && budget > 0 {
            let mut improved = false;
            for i in 0..6 {
                for dir in [1.0, -1.0] {
                    let mut y = x;
                    y[i] += dir * step;
                    let fy = f(&y);
                    budget -= 1;
                    if fy < fx {
                        x = y;
                        fx = fy;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        fx
    };
    let best = scored[..scored.len().min(16)]
        .par_iter()
        .map(|&(fx, i)| polish(points[i], fx))
        .reduce(|| f64::INFINITY, f64::min);
    Ok(s_a - best)
}
