//! One-coordinate generator coordinate method.
//!
//! The generating determinants put every column in the orbital
//! `u(φ₂) = (cos φ₁, sin φ₁ cos φ₂, sin φ₁ sin φ₂)` (components by level) with
//! `φ₁` frozen at its HF value. Plane waves `e^{ipφ₂}/√(2π)` diagonalize the
//! overlap kernel, and the Hill-Wheeler problem is solved in that basis.

use crate::combinatorics::{binomial, binomial_u128, multinomial};
use crate::error::{Error, Result};
use crate::fock::CMatrix;
use crate::mean_field::hf_orbital;
use crate::model::{lowest_with_gap, pq_iter, ModelParams, PqState};
use crate::scalar::{cre, czero, Cplx, Real};

/// Settings of a GCM calculation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GcmConfig<T> {
    params: ModelParams<T>,
    phi1: T,
    pmax: usize,
    norm_cutoff: T,
}

impl<T: Real> GcmConfig<T> {
    /// `φ₁` from the HF orbital (`cos²φ₁ = U00²`), `pmax = N`, relative cutoff `1e-10`.
    pub fn new(params: ModelParams<T>) -> Result<Self> {
        let u00 = hf_orbital(params.chi())?.u00;
        Self::with_phi1(params, u00.min(T::one()).acos())
    }

    /// Uses an explicit `φ₁ ∈ [0, π/2]`.
    pub fn with_phi1(params: ModelParams<T>, phi1: T) -> Result<Self> {
        if !(phi1 >= T::zero() && phi1 <= T::frac_pi_2()) {
            return Err(Error::InvalidConfig(format!("phi1 = {phi1} outside [0, pi/2]")));
        }
        Ok(Self {
            params,
            phi1,
            pmax: params.n(),
            norm_cutoff: T::lit(1e-10),
        })
    }

    pub fn with_norm_cutoff(mut self, cutoff: T) -> Self {
        self.norm_cutoff = cutoff;
        self
    }

    pub fn with_pmax(mut self, pmax: usize) -> Self {
        self.pmax = pmax;
        self
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn phi1(&self) -> T {
        self.phi1
    }

    pub fn pmax(&self) -> usize {
        self.pmax
    }

    pub fn norm_cutoff(&self) -> T {
        self.norm_cutoff
    }

    /// `(sin²φ₁, cos²φ₁)`.
    fn a_c(&self) -> (T, T) {
        let s = self.phi1.sin();
        let c = self.phi1.cos();
        (s * s, c * c)
    }

    /// Generating orbital by level.
    pub fn orbital(&self, phi2: T) -> [T; 3] {
        let s1 = self.phi1.sin();
        [self.phi1.cos(), s1 * phi2.cos(), s1 * phi2.sin()]
    }

    fn momenta(&self) -> impl Iterator<Item = i64> {
        let m = self.pmax as i64;
        -m..=m
    }
}

/// `⟨Φ(φa)|Φ(φb)⟩ = (sin²φ₁ cos(φa − φb) + cos²φ₁)^N`.
pub fn overlap_kernel<T: Real>(cfg: &GcmConfig<T>, phi2a: T, phi2b: T) -> T {
    let (a, c) = cfg.a_c();
    (a * (phi2a - phi2b).cos() + c).powi(cfg.params.n() as i32)
}

/// `⟨Φ(φa)|H|Φ(φb)⟩ = εN f^{N−2} (f g − χ h / 2)`.
pub fn hamiltonian_kernel<T: Real>(cfg: &GcmConfig<T>, phi2a: T, phi2b: T) -> T {
    let (a, c) = cfg.a_c();
    let n = cfg.params.n();
    let f = a * (phi2a - phi2b).cos() + c;
    let g = a * phi2a.sin() * phi2b.sin() - c;
    let (ca, sa) = (phi2a.cos(), phi2a.sin());
    let (cb, sb) = (phi2b.cos(), phi2b.sin());
    let h = T::lit(2.0) * a * c + a * a * (ca * ca * sb * sb + sa * sa * cb * cb);
    let half = T::lit(0.5);
    cfg.params.epsilon() * T::count(n) * f.powi(n as i32 - 2) * (f * g - half * cfg.params.chi() * h)
}

/// `n_p = 2π Σ_k 2^{−k} (sin²φ₁)^k (cos²φ₁)^{N−k} C(N,k) C(k,(p+k)/2)`,
/// `k = |p|, |p|+2, ... ≤ N`, for `p = −pmax ..= pmax`.
pub fn norm_eigenvalues<T: Real>(cfg: &GcmConfig<T>) -> Vec<(i64, T)> {
    let (a, c) = cfg.a_c();
    let n = cfg.params.n();
    cfg.momenta()
        .map(|p| {
            let mut acc = T::zero();
            let mut k = p.unsigned_abs() as usize;
            while k <= n {
                let j = ((p + k as i64) / 2) as usize;
                let comb = binomial::<T>(n, k) * binomial::<T>(k, j) * T::lit(0.5).powi(k as i32);
                acc += comb * a.powi(k as i32) * c.powi((n - k) as i32);
                k += 2;
            }
            (p, T::two_pi() * acc)
        })
        .collect()
}

/// `(1/√(2π)) ∫₀^{2π} e^{ipφ} cos^{k1}φ sin^{k2}φ dφ`, from an exact integer sum.
pub fn i_integral<T: Real>(k1: usize, k2: usize, p: i64) -> Cplx<T> {
    let k = (k1 + k2) as i64;
    if p.abs() > k || (p + k) % 2 != 0 {
        return czero();
    }
    // Picks the e^{-ipφ} component of cos^{k1} sin^{k2}:
    // 2j1 − k1 + 2j2 − k2 = −p.
    let mut sum: i128 = 0;
    for j1 in 0..=k1 {
        let twice_j2 = k - p - 2 * j1 as i64;
        if twice_j2 < 0 || twice_j2 > 2 * k2 as i64 {
            continue;
        }
        let j2 = (twice_j2 / 2) as usize;
        let term = (binomial_u128(k1, j1) * binomial_u128(k2, j2)) as i128;
        if (k2 - j2).is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let magnitude = T::from_i128(sum).expect("finite") * T::lit(0.5).powi(k as i32) * T::two_pi().sqrt();
    // (2i)^{-k2} = 2^{-k2} (−i)^{k2}
    match k2 % 4 {
        0 => cre(magnitude),
        1 => Cplx::new(T::zero(), -magnitude),
        2 => cre(-magnitude),
        _ => Cplx::new(T::zero(), magnitude),
    }
}

/// Table of `I^{(k1,k2)}_p` for `k1 + k2 ≤ kmax` and `|p| ≤ pmax`.
struct ITable<T> {
    kmax: usize,
    pmax: i64,
    data: Vec<Cplx<T>>,
}

impl<T: Real> ITable<T> {
    fn new(kmax: usize, pmax: usize) -> Self {
        let pmax = pmax as i64;
        let width = (2 * pmax + 1) as usize;
        let mut data = vec![czero(); (kmax + 1) * (kmax + 1) * width];
        for k1 in 0..=kmax {
            for k2 in 0..=kmax - k1 {
                for p in -pmax..=pmax {
                    data[Self::slot(kmax, pmax, k1, k2, p)] = i_integral(k1, k2, p);
                }
            }
        }
        Self { kmax, pmax, data }
    }

    fn slot(kmax: usize, pmax: i64, k1: usize, k2: usize, p: i64) -> usize {
        ((k1 * (kmax + 1) + k2) * (2 * pmax + 1) as usize) + (p + pmax) as usize
    }

    fn get(&self, k1: usize, k2: usize, p: i64) -> Cplx<T> {
        self.data[Self::slot(self.kmax, self.pmax, k1, k2, p)]
    }
}

/// `M(n; k1, k2) a^{k1+k2} c^{n−k1−k2}`.
fn trinomial_weight<T: Real>(n: usize, k1: usize, k2: usize, a: T, c: T) -> T {
    multinomial::<T>(n, k1, k2) * a.powi((k1 + k2) as i32) * c.powi((n - k1 - k2) as i32)
}

/// `∫∫ u*_{p′}(φ′) H(φ′, φ) u_p(φ)` for the listed momenta, before division by
/// `√(n_{p′} n_p)`.
pub fn plane_wave_hamiltonian<T: Real>(cfg: &GcmConfig<T>, momenta: &[i64]) -> CMatrix<T> {
    let n = cfg.params.n();
    let (a, c) = cfg.a_c();
    let chi = cfg.params.chi();
    let table = ITable::<T>::new(n, cfg.pmax.max(momenta.iter().map(|p| p.unsigned_abs() as usize).max().unwrap_or(0)));
    let dim = momenta.len();
    let mut out = CMatrix::zeros(dim, dim);
    let r2 = T::lit(2.0) * a * c;
    let half_chi = T::lit(0.5) * chi;
    for k1 in 0..n {
        for k2 in 0..n - k1 {
            let w = trinomial_weight(n - 1, k1, k2, a, c);
            if w == T::zero() {
                continue;
            }
            for (i, &pp) in momenta.iter().enumerate() {
                let b1 = table.get(k1, k2 + 1, pp).conj();
                let b0 = table.get(k1, k2, pp).conj();
                for (j, &p) in momenta.iter().enumerate() {
                    let term = b1 * table.get(k1, k2 + 1, p) * a - b0 * table.get(k1, k2, p) * c;
                    out[(i, j)] += term * w;
                }
            }
        }
    }
    if n >= 2 && chi != T::zero() {
        for k1 in 0..=n - 2 {
            for k2 in 0..=n - 2 - k1 {
                let w = trinomial_weight(n - 2, k1, k2, a, c);
                if w == T::zero() {
                    continue;
                }
                for (i, &pp) in momenta.iter().enumerate() {
                    let b0 = table.get(k1, k2, pp).conj();
                    let bx = table.get(k1 + 2, k2, pp).conj();
                    let by = table.get(k1, k2 + 2, pp).conj();
                    for (j, &p) in momenta.iter().enumerate() {
                        let term = b0 * table.get(k1, k2, p) * r2
                            + (bx * table.get(k1, k2 + 2, p) + by * table.get(k1 + 2, k2, p)) * (a * a);
                        out[(i, j)] -= term * (w * half_chi);
                    }
                }
            }
        }
    }
    out * cre(cfg.params.epsilon() * T::count(n))
}

/// Lowest Hill-Wheeler solution.
#[derive(Debug, Clone, PartialEq)]
pub struct GcmSolution<T: Real> {
    pub energy: T,
    /// Retained plane-wave momenta.
    pub momenta: Vec<i64>,
    /// Norm eigenvalues of the retained momenta.
    pub norms: Vec<T>,
    /// Natural-basis eigenvector.
    pub g: Vec<Cplx<T>>,
    pub state: PqState<T>,
}

impl<T: Real> GcmSolution<T> {
    /// `f(φ₂) = Σ_p g_p / √n_p · e^{ipφ₂} / √(2π)`.
    pub fn weight(&self, phi2: T) -> Cplx<T> {
        let inv = T::one() / T::two_pi().sqrt();
        self.momenta
            .iter()
            .zip(&self.norms)
            .zip(&self.g)
            .fold(czero(), |acc, ((&p, &np), &g)| {
                let arg = T::from_i64(p).expect("small") * phi2;
                acc + g * Cplx::new(arg.cos(), arg.sin()) * (inv / np.sqrt())
            })
    }
}

/// Solves the Hill-Wheeler problem in the natural basis and assembles the
/// `|pq⟩` amplitudes of the GCM state.
///
/// The lowest state whose weight is even under `φ₂ → −φ₂` and `φ₂ → φ₂ + π`
/// is taken unless another sector lies strictly lower.
pub fn hill_wheeler<T: Real>(cfg: &GcmConfig<T>) -> Result<GcmSolution<T>> {
    let n = cfg.params.n();
    let spectrum = norm_eigenvalues(cfg);
    let nmax = spectrum.iter().fold(T::zero(), |m, &(_, v)| m.max(v));
    let kept: Vec<(i64, T)> = spectrum
        .into_iter()
        .filter(|&(_, v)| v > cfg.norm_cutoff * nmax)
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyNaturalBasis);
    }
    let momenta: Vec<i64> = kept.iter().map(|&(p, _)| p).collect();
    let norms: Vec<T> = kept.iter().map(|&(_, v)| v).collect();
    let raw = plane_wave_hamiltonian(cfg, &momenta);
    let dim = momenta.len();
    let h = CMatrix::from_fn(dim, dim, |i, j| raw[(i, j)] / (norms[i] * norms[j]).sqrt());
    let h = (&h + h.adjoint()) * cre(T::lit(0.5));

    let (global_e, global_v) = lowest_hermitian(&h)?;

    // Symmetric even sector: e_0 and (e_p + e_{−p})/√2 for even p > 0.
    let index_of = |p: i64| momenta.iter().position(|&m| m == p);
    let mut basis: Vec<Vec<(usize, T)>> = Vec::new();
    for &p in momenta.iter().filter(|&&p| p >= 0 && p % 2 == 0) {
        if p == 0 {
            basis.push(vec![(index_of(0).expect("listed"), T::one())]);
        } else if let Some(m) = index_of(-p) {
            let r = T::lit(0.5).sqrt();
            basis.push(vec![(index_of(p).expect("listed"), r), (m, r)]);
        }
    }
    let mut chosen = (global_e, global_v);
    if !basis.is_empty() {
        let b = CMatrix::from_fn(dim, basis.len(), |i, col| {
            basis[col]
                .iter()
                .find(|&&(row, _)| row == i)
                .map_or(czero(), |&(_, w)| cre(w))
        });
        let hs = b.adjoint() * &h * &b;
        let (e_sym, v_sym) = lowest_hermitian(&hs)?;
        let scale = global_e.abs().max(T::one());
        if e_sym <= global_e + T::tol(1e-10) * scale {
            let full = &b * nalgebra::DVector::from_vec(v_sym);
            chosen = (e_sym, full.iter().copied().collect());
        }
    }
    let (energy, g) = chosen;

    let (a, c) = cfg.a_c();
    let (s1, c1) = (a.sqrt(), c.sqrt());
    let table = ITable::<T>::new(n, cfg.pmax);
    let amps: Vec<Cplx<T>> = pq_iter(n)
        .map(|(_, p, q)| {
            let pref = multinomial::<T>(n, p, q).sqrt() * s1.powi((p + q) as i32) * c1.powi((n - p - q) as i32);
            let sum = momenta
                .iter()
                .zip(&norms)
                .zip(&g)
                .fold(czero(), |acc, ((&k, &nk), &gk)| acc + gk * table.get(p, q, k) / nk.sqrt());
            sum * pref
        })
        .collect();
    let state = PqState::normalized(n, amps)?.fix_phase();
    Ok(GcmSolution {
        energy,
        momenta,
        norms,
        g,
        state,
    })
}

/// Lowest eigenpair of a Hermitian matrix.
fn lowest_hermitian<T: Real>(h: &CMatrix<T>) -> Result<(T, Vec<Cplx<T>>)> {
    let eig = nalgebra::SymmetricEigen::try_new(h.clone(), T::default_epsilon(), 10_000)
        .ok_or(Error::EigenFailure(h.nrows()))?;
    let (idx, _) = lowest_with_gap(&eig.eigenvalues);
    Ok((eig.eigenvalues[idx], eig.eigenvectors.column(idx).iter().copied().collect()))
}
