//! Mutual information, classical correlation and quantum discord between two
//! sets of fermionic modes, with measurements on `B` restricted to
//! parity-preserving projective ones.
//!
//! For `|B| = 2` the measurement basis is `β†_k = R† c†_k R` with `R` a
//! Thouless rotation of the two `B` modes; for `|B| = 1` only the occupation
//! projectors are admissible.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{
    order_with_first, parity_block_eigenvalues, partial_trace, reorder_matrix, von_neumann_entropy, CMatrix,
    FockDensity, MeasurementParams, ModeSubset,
};
use crate::nelder_mead::{minimize, NelderMeadOptions};
use crate::scalar::{cone, cre, czero, Cplx, Real};

/// Mode labels available to a partition.
pub const PARTITION_MODES: usize = 4;

/// Disjoint sets of modes `A` (kept) and `B` (measured), `|B| ∈ {1, 2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    a: ModeSubset,
    b: ModeSubset,
}

impl Partition {
    pub fn new(a: ModeSubset, b: ModeSubset) -> Result<Self> {
        if let Some(&m) = a.indices().iter().chain(b.indices()).find(|&&m| m >= PARTITION_MODES) {
            return Err(Error::InvalidPartition(format!("mode {m} out of range 0..{PARTITION_MODES}")));
        }
        if let Some(&m) = a.indices().iter().find(|&&m| b.contains(m)) {
            return Err(Error::InvalidPartition(format!("mode {m} on both sides")));
        }
        if b.len() > 2 {
            return Err(Error::InvalidPartition(format!("|B| = {}, need 1 or 2", b.len())));
        }
        Ok(Self { a, b })
    }

    pub fn from_modes(a: &[usize], b: &[usize]) -> Result<Self> {
        Self::new(ModeSubset::from_unsorted(a.to_vec())?, ModeSubset::from_unsorted(b.to_vec())?)
    }

    pub fn a(&self) -> &ModeSubset {
        &self.a
    }

    pub fn b(&self) -> &ModeSubset {
        &self.b
    }

    /// `B:A`; fails when `|A| > 2`.
    pub fn swapped(&self) -> Result<Self> {
        Self::new(self.b.clone(), self.a.clone())
    }

    pub fn union(&self) -> ModeSubset {
        let mut all = self.a.indices().to_vec();
        all.extend_from_slice(self.b.indices());
        ModeSubset::from_unsorted(all).expect("disjoint nonempty sides")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &ModeSubset| s.indices().iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}:{}", join(&self.a), join(&self.b))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses `"a1[,a2..]:b1[,b2]"`, naming the offending token on failure.
    fn from_str(spec: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidPartition(format!("'{spec}': {msg}"));
        let (lhs, rhs) = spec
            .split_once(':')
            .ok_or_else(|| bad("expected A:B".into()))?;
        if rhs.contains(':') {
            return Err(bad("more than one ':'".into()));
        }
        let side = |text: &str, name: &str| -> Result<Vec<usize>> {
            if text.trim().is_empty() {
                return Err(bad(format!("empty side {name}")));
            }
            let mut out = Vec::new();
            for token in text.split(',') {
                let t = token.trim();
                let m: usize = t.parse().map_err(|_| bad(format!("invalid label '{t}'")))?;
                if m >= PARTITION_MODES {
                    return Err(bad(format!("label '{t}' out of range 0..{PARTITION_MODES}")));
                }
                if out.contains(&m) {
                    return Err(bad(format!("duplicate label '{t}'")));
                }
                out.push(m);
            }
            Ok(out)
        };
        let a = side(lhs, "A")?;
        let b = side(rhs, "B")?;
        if let Some(m) = a.iter().find(|m| b.contains(m)) {
            return Err(bad(format!("label '{m}' on both sides")));
        }
        if b.len() > 2 {
            return Err(bad(format!("B has {} modes, at most 2 allowed", b.len())));
        }
        Self::from_modes(&a, &b)
    }
}

/// Multi-start Nelder-Mead settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_evals: usize,
    /// Simplex diameter at which a restart counts as converged.
    pub tol: f64,
    pub seed: u64,
    pub initial_step: f64,
    /// Keeps the pairing parameter `d12` at zero.
    pub freeze_pairing: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 24,
            max_evals: 2000,
            tol: 1e-9,
            seed: 42,
            initial_step: 0.5,
            freeze_pairing: false,
        }
    }
}

/// Correlations of `ρ` across a partition, in nats.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport<T> {
    pub s_a: T,
    pub s_b: T,
    pub s_ab: T,
    pub mutual_info: T,
    pub classical_j: T,
    pub discord: T,
    pub min_conditional_entropy: T,
    pub best_params: MeasurementParams<T>,
    pub restarts_used: usize,
    pub evaluations: usize,
    pub stationarity_residual: T,
    pub converged: bool,
    /// `|δ − S(ρ_A)|` when `ρ` restricted to `A ∪ B` is pure.
    pub pure_state_deviation: Option<T>,
}

/// Outcome of the measurement optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalCorrelation<T> {
    pub j: T,
    pub s_a: T,
    pub min_conditional_entropy: T,
    pub best_params: MeasurementParams<T>,
    pub restarts_used: usize,
    pub evaluations: usize,
    pub stationarity_residual: T,
    pub converged: bool,
}

/// `ρ` on `A ∪ B`, with `A` relabeled first, cut into `dA × dA` blocks indexed
/// by pairs of `B` basis states.
struct Prepared<T: Real> {
    union: FockDensity<T>,
    a_local: ModeSubset,
    b_local: ModeSubset,
    da: usize,
    db: usize,
    blocks: Vec<CMatrix<T>>,
}

impl<T: Real> Prepared<T> {
    fn new(rho: &FockDensity<T>, part: &Partition) -> Result<Self> {
        let union = part.union();
        if let Some(&m) = union.indices().iter().find(|&&m| m >= rho.n_modes()) {
            return Err(Error::InvalidPartition(format!(
                "mode {m} outside a {}-mode density",
                rho.n_modes()
            )));
        }
        let reduced = partial_trace(rho, &union)?;
        let local = |s: &ModeSubset| {
            ModeSubset::new(
                s.indices()
                    .iter()
                    .map(|m| union.indices().iter().position(|u| u == m).expect("in union"))
                    .collect(),
            )
            .expect("nonempty")
        };
        let a_local = local(part.a());
        let b_local = local(part.b());
        let k = union.len();
        let order = order_with_first(k, a_local.indices());
        let moved = reorder_matrix(reduced.matrix(), k, &order);
        let na = a_local.len();
        let da = 1 << na;
        let db = 1 << b_local.len();
        let mut blocks = Vec::with_capacity(db * db);
        for b in 0..db {
            for b2 in 0..db {
                blocks.push(CMatrix::from_fn(da, da, |x, y| moved[(x + (b << na), y + (b2 << na))]));
            }
        }
        Ok(Self {
            union: reduced,
            a_local,
            b_local,
            da,
            db,
            blocks,
        })
    }

    /// `Σ_k p_k S(ρ_{A|k})` for measurement vectors `β_k` on `B`.
    fn conditional_entropy(&self, betas: &[Vec<Cplx<T>>]) -> T {
        let cutoff = T::lit(1e-14);
        let mut total = T::zero();
        for beta in betas {
            let mut m = CMatrix::<T>::zeros(self.da, self.da);
            for b in 0..self.db {
                if beta[b] == czero() {
                    continue;
                }
                for b2 in 0..self.db {
                    if beta[b2] == czero() {
                        continue;
                    }
                    m += &self.blocks[b * self.db + b2] * (beta[b].conj() * beta[b2]);
                }
            }
            let p = (0..self.da).fold(T::zero(), |acc, i| acc + m[(i, i)].re);
            if p < cutoff {
                continue;
            }
            for mu in parity_block_eigenvalues(&m) {
                if mu > T::zero() {
                    total -= mu * (mu / p).ln();
                }
            }
        }
        total
    }

    fn measurement(&self, mp: &MeasurementParams<T>) -> Vec<Vec<Cplx<T>>> {
        if self.db == 2 {
            return vec![vec![cone(), czero()], vec![czero(), cone()]];
        }
        let r = thouless_unitary_closed(mp);
        // β_k = R† |k⟩
        (0..4).map(|k| (0..4).map(|b| r[(k, b)].conj()).collect()).collect()
    }

    fn objective(&self, mp: &MeasurementParams<T>) -> T {
        self.conditional_entropy(&self.measurement(mp))
    }

    fn entropy_a(&self) -> Result<T> {
        von_neumann_entropy(&partial_trace(&self.union, &self.a_local)?)
    }

    fn entropy_b(&self) -> Result<T> {
        von_neumann_entropy(&partial_trace(&self.union, &self.b_local)?)
    }

    fn residual(&self, mp: &MeasurementParams<T>) -> T {
        if self.db == 2 {
            return T::zero();
        }
        let h = T::lit(1e-5);
        let x = mp.to_array();
        let mut norm2 = T::zero();
        for i in 0..MeasurementParams::<T>::DOF {
            let mut up = x;
            let mut dn = x;
            up[i] += h;
            dn[i] -= h;
            let d = (self.objective(&MeasurementParams::from_array(up))
                - self.objective(&MeasurementParams::from_array(dn)))
                / (h + h);
            norm2 += d * d;
        }
        norm2.sqrt()
    }
}

/// `exp(i A)` for a 2x2 Hermitian `[[α, β], [β*, δ]]`.
fn expi_2x2<T: Real>(alpha: T, beta: Cplx<T>, delta: T) -> [[Cplx<T>; 2]; 2] {
    let half = T::lit(0.5);
    let mean = (alpha + delta) * half;
    let d = (alpha - delta) * half;
    let r = (d * d + beta.norm_sqr()).sqrt();
    let sinc = if r < T::lit(1e-4) {
        T::one() - r * r / T::lit(6.0)
    } else {
        r.sin() / r
    };
    let cos = r.cos();
    let i = Cplx::new(T::zero(), T::one());
    let phase = Cplx::new(mean.cos(), mean.sin());
    [
        [phase * (cre(cos) + i * d * sinc), phase * i * beta * sinc],
        [phase * i * beta.conj() * sinc, phase * (cre(cos) - i * d * sinc)],
    ]
}

/// Thouless rotation on two modes assembled from its two parity blocks.
fn thouless_unitary_closed<T: Real>(mp: &MeasurementParams<T>) -> CMatrix<T> {
    let mut r = CMatrix::zeros(4, 4);
    // even block {|00⟩, |11⟩}
    let even = expi_2x2(T::zero(), mp.d12.conj(), mp.h11 + mp.h22);
    // odd block {|10⟩, |01⟩}
    let odd = expi_2x2(mp.h11, mp.h12, mp.h22);
    for (x, &gx) in [0usize, 3].iter().enumerate() {
        for (y, &gy) in [0usize, 3].iter().enumerate() {
            r[(gx, gy)] = even[x][y];
        }
    }
    for (x, &gx) in [1usize, 2].iter().enumerate() {
        for (y, &gy) in [1usize, 2].iter().enumerate() {
            r[(gx, gy)] = odd[x][y];
        }
    }
    r
}

/// `S(ρ_A) + S(ρ_B) − S(ρ_AB)`.
pub fn mutual_information<T: Real>(rho: &FockDensity<T>, part: &Partition) -> Result<T> {
    let prep = Prepared::new(rho, part)?;
    Ok(prep.entropy_a()? + prep.entropy_b()? - von_neumann_entropy(&prep.union)?)
}

/// Measurement-based conditional entropy `Σ_k p_k S(ρ_{A|k})`. For `|B| = 1`
/// the occupation projectors are used and `mp` is ignored.
pub fn conditional_entropy<T: Real>(rho: &FockDensity<T>, part: &Partition, mp: &MeasurementParams<T>) -> Result<T> {
    Ok(Prepared::new(rho, part)?.objective(mp))
}

/// Norm of the finite-difference gradient (step `1e-5`) of the conditional
/// entropy with respect to the six measurement parameters.
pub fn stationarity_residual<T: Real>(rho: &FockDensity<T>, part: &Partition, mp: &MeasurementParams<T>) -> Result<T> {
    Ok(Prepared::new(rho, part)?.residual(mp))
}

/// Starting points of the restarts, uniform in `[−π, π]` per coordinate.
pub fn restart_points(opt: &OptimizerConfig, dim: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opt.seed);
    let pi = std::f64::consts::PI;
    (0..opt.restarts)
        .map(|_| (0..dim).map(|_| rng.random_range(-pi..=pi)).collect())
        .collect()
}

fn params_from<T: Real>(x: &[T], freeze_pairing: bool) -> MeasurementParams<T> {
    if freeze_pairing {
        MeasurementParams::from_array([x[0], x[1], x[2], x[3], T::zero(), T::zero()])
    } else {
        MeasurementParams::from_slice(x)
    }
}

fn classical_prepared<T: Real>(prep: &Prepared<T>, opt: &OptimizerConfig) -> Result<ClassicalCorrelation<T>> {
    let s_a = prep.entropy_a()?;
    if prep.db == 2 {
        let cond = prep.objective(&MeasurementParams::zero());
        return Ok(ClassicalCorrelation {
            j: s_a - cond,
            s_a,
            min_conditional_entropy: cond,
            best_params: MeasurementParams::zero(),
            restarts_used: 0,
            evaluations: 1,
            stationarity_residual: T::zero(),
            converged: true,
        });
    }
    if opt.restarts == 0 {
        return Err(Error::InvalidConfig("restarts must be >= 1".into()));
    }
    let dim = if opt.freeze_pairing { 4 } else { 6 };
    let nm = NelderMeadOptions {
        initial_step: T::lit(opt.initial_step),
        diameter_tol: T::lit(opt.tol).max(T::lit(10.0) * T::default_epsilon()),
        max_evals: opt.max_evals,
    };
    let starts = restart_points(opt, dim);
    let runs: Vec<_> = starts
        .par_iter()
        .map(|x0| {
            let x0: Vec<T> = x0.iter().map(|&v| T::lit(v)).collect();
            minimize(|x: &[T]| prep.objective(&params_from(x, opt.freeze_pairing)), &x0, &nm)
        })
        .collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.value < runs[best].value {
            best = i;
        }
    }
    let evaluations = runs.iter().map(|r| r.evals).sum();
    let run = &runs[best];
    let best_params = params_from(&run.x, opt.freeze_pairing);
    Ok(ClassicalCorrelation {
        j: s_a - run.value,
        s_a,
        min_conditional_entropy: run.value,
        best_params,
        restarts_used: runs.len(),
        evaluations,
        stationarity_residual: prep.residual(&best_params),
        converged: run.converged,
    })
}

/// `J = S(ρ_A) − min_{Π} Σ_k p_k S(ρ_{A|k})`, minimized over Thouless
/// rotations of `B` by multi-start Nelder-Mead. Deterministic for a fixed seed.
pub fn classical_correlation<T: Real>(
    rho: &FockDensity<T>,
    part: &Partition,
    opt: &OptimizerConfig,
) -> Result<ClassicalCorrelation<T>> {
    classical_prepared(&Prepared::new(rho, part)?, opt)
}

/// Mutual information, classical correlation and discord `δ = I − J`.
pub fn quantum_discord<T: Real>(
    rho: &FockDensity<T>,
    part: &Partition,
    opt: &OptimizerConfig,
) -> Result<CorrelationReport<T>> {
    let prep = Prepared::new(rho, part)?;
    let cc = classical_prepared(&prep, opt)?;
    let s_b = prep.entropy_b()?;
    let s_ab = von_neumann_entropy(&prep.union)?;
    let mutual_info = cc.s_a + s_b - s_ab;
    let discord = mutual_info - cc.j;
    let pure = (prep.union.purity() - T::one()).abs() < T::tol(1e-10);
    Ok(CorrelationReport {
        s_a: cc.s_a,
        s_b,
        s_ab,
        mutual_info,
        classical_j: cc.j,
        discord,
        min_conditional_entropy: cc.min_conditional_entropy,
        best_params: cc.best_params,
        restarts_used: cc.restarts_used,
        evaluations: cc.evaluations,
        stationarity_residual: cc.stationarity_residual,
        converged: cc.converged,
        pure_state_deviation: pure.then(|| (discord - cc.s_a).abs()),
    })
}
