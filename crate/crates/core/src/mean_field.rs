//! Analytic Hartree-Fock solution and its parity projection.

use crate::combinatorics::multinomial;
use crate::error::{Error, Result};
use crate::model::{hamiltonian_matrix, pq_dim, pq_iter, ModelParams, PqState};
use crate::scalar::{cre, czero, Cplx, Real};

/// Occupied Hartree-Fock orbital expanded in the level basis:
/// `a†_0 = U00 c†_0 + U01 c†_1 + U02 c†_2` in every degeneracy column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HfOrbital<T> {
    pub u00: T,
    pub u01: T,
    pub u02: T,
}

impl<T: Real> HfOrbital<T> {
    /// Components indexed by level.
    pub fn components(&self) -> [T; 3] {
        [self.u00, self.u01, self.u02]
    }
}

/// Phase of the HF solution for a given coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfPhase {
    /// `chi < 1`: the non-interacting determinant.
    Symmetric,
    /// `1 <= chi < 3`: levels 0 and 1 mix.
    LevelOneBroken,
    /// `chi >= 3`: all three levels mix.
    FullyBroken,
}

/// Branch selection; a coupling exactly on a boundary takes the higher branch.
pub fn hf_phase<T: Real>(chi: T) -> HfPhase {
    if chi < T::one() {
        HfPhase::Symmetric
    } else if chi < T::lit(3.0) {
        HfPhase::LevelOneBroken
    } else {
        HfPhase::FullyBroken
    }
}

/// HF orbital coefficients (all taken nonnegative).
pub fn hf_orbital<T: Real>(chi: T) -> Result<HfOrbital<T>> {
    if !(chi >= T::zero()) {
        return Err(Error::InvalidParams(format!("chi = {chi}, need >= 0")));
    }
    let one = T::one();
    let three = T::lit(3.0);
    let (s00, s01, s02) = match hf_phase(chi) {
        HfPhase::Symmetric => (one, T::zero(), T::zero()),
        HfPhase::LevelOneBroken => {
            let half = T::lit(0.5);
            (half * (one + one / chi), half * (one - one / chi), T::zero())
        }
        HfPhase::FullyBroken => ((chi + three) / (three * chi), one / three, (chi - three) / (three * chi)),
    };
    Ok(HfOrbital {
        u00: s00.max(T::zero()).sqrt(),
        u01: s01.max(T::zero()).sqrt(),
        u02: s02.max(T::zero()).sqrt(),
    })
}

/// Coefficient of the plain determinant sum `|n1 n2⟩` in the HF state,
/// evaluated branch by branch.
pub fn hf_sum_coefficient<T: Real>(n: usize, chi: T, n1: usize, n2: usize) -> T {
    let one = T::one();
    let three = T::lit(3.0);
    let half = T::lit(0.5);
    let pow_half = |base: T, k: usize| {
        if k == 0 {
            one
        } else {
            base.max(T::zero()).powf(half * T::count(k))
        }
    };
    match hf_phase(chi) {
        HfPhase::Symmetric => {
            if n1 == 0 && n2 == 0 {
                one
            } else {
                T::zero()
            }
        }
        HfPhase::LevelOneBroken => {
            if n2 != 0 {
                return T::zero();
            }
            pow_half(half, n) * pow_half(one + one / chi, n - n1) * pow_half(one - one / chi, n1)
        }
        HfPhase::FullyBroken => {
            pow_half(one / three, n1)
                * pow_half((chi + three) / (three * chi), n - n1 - n2)
                * pow_half((chi - three) / (three * chi), n2)
        }
    }
}

/// The HF determinant expanded in the orthonormal `|pq⟩` basis.
pub fn hf_amplitudes<T: Real>(params: &ModelParams<T>) -> PqState<T> {
    let n = params.n();
    let chi = params.chi();
    let amps: Vec<Cplx<T>> = pq_iter(n)
        .map(|(_, p, q)| cre(hf_sum_coefficient(n, chi, p, q) * multinomial::<T>(n, p, q).sqrt()))
        .collect();
    // The closed form is already unit-norm; renormalizing removes rounding only.
    PqState::normalized(n, amps).expect("HF amplitudes are nonzero")
}

/// Projects onto even occupation of levels 1 and 2 and renormalizes.
pub fn phf_project<T: Real>(state: &PqState<T>) -> Result<PqState<T>> {
    let n = state.n();
    let amps: Vec<Cplx<T>> = pq_iter(n)
        .map(|(i, p, q)| {
            if p % 2 == 0 && q % 2 == 0 {
                state.amps()[i]
            } else {
                czero()
            }
        })
        .collect();
    let norm = amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr()).sqrt();
    if norm < T::lit(1e-14) {
        return Err(Error::NullProjection(norm.to_f64_lossy()));
    }
    PqState::normalized(n, amps)
}

/// `⟨ψ|H|ψ⟩` for a normalized state.
pub fn energy_expectation<T: Real>(state: &PqState<T>, params: &ModelParams<T>) -> Result<T> {
    if state.n() != params.n() {
        return Err(Error::DimensionMismatch {
            expected: pq_dim(params.n()),
            got: pq_dim(state.n()),
        });
    }
    let h = hamiltonian_matrix(params);
    let a = state.amps();
    let mut acc: Cplx<T> = czero();
    for j in 0..a.len() {
        let mut row: Cplx<T> = czero();
        for i in 0..a.len() {
            let hij = h[(j, i)];
            if hij != T::zero() {
                row += a[i].scale(hij);
            }
        }
        acc += a[j].conj() * row;
    }
    let scale = h.iter().fold(T::one(), |m, x| m.max(x.abs()));
    if acc.im.abs() > T::tol(1e-12) * scale {
        return Err(Error::InvalidParams(format!(
            "energy has imaginary part {}",
            acc.im
        )));
    }
    Ok(acc.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{exact_ground_state, pq_index};

    #[test]
    fn orbital_branches() {
        let o = hf_orbital(0.5f64).unwrap();
        assert_eq!((o.u00, o.u01, o.u02), (1.0, 0.0, 0.0));
        let o = hf_orbital(2.0f64).unwrap();
        assert!((o.u00 * o.u00 - 0.75).abs() < 1e-15);
        assert!((o.u01 * o.u01 - 0.25).abs() < 1e-15);
        assert_eq!(o.u02, 0.0);
        let o = hf_orbital(3.0f64).unwrap();
        assert!((o.u00 * o.u00 - 2.0 / 3.0).abs() < 1e-15);
        assert!((o.u01 * o.u01 - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(o.u02, 0.0);
        assert!(hf_orbital(-0.1).is_err());
    }

    #[test]
    fn orbital_continuity_at_transitions() {
        // lower branch evaluated at the boundary vs the selected (upper) branch
        let at1 = hf_orbital(1.0f64).unwrap();
        assert!((at1.u00 - 1.0).abs() < 1e-12 && at1.u01.abs() < 1e-12);
        let at3 = hf_orbital(3.0).unwrap();
        let lower3 = (0.5 * (1.0 + 1.0 / 3.0f64), 0.5 * (1.0 - 1.0 / 3.0f64));
        assert!((at3.u00 - lower3.0.sqrt()).abs() < 1e-12);
        assert!((at3.u01 - lower3.1.sqrt()).abs() < 1e-12);
        for chi in [0.3f64, 1.0, 1.7, 3.0, 5.5] {
            let o = hf_orbital(chi).unwrap();
            let s: f64 = o.components().iter().map(|u| u * u).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sum_coefficients_match_orbital_products() {
        for chi in [0.4f64, 1.0, 2.0, 3.0, 4.5] {
            let o = hf_orbital(chi).unwrap();
            let n = 6;
            for (_, p, q) in pq_iter(n) {
                let direct =
                    o.u00.powi((n - p - q) as i32) * o.u01.powi(p as i32) * o.u02.powi(q as i32);
                assert!((hf_sum_coefficient(n, chi, p, q) - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn two_particle_amplitudes() {
        let params = ModelParams::<f64>::from_chi(2, 1.0, 2.0).unwrap();
        let hf = hf_amplitudes(&params);
        let expect = [
            (0, 0, 0.75),
            (1, 0, 3f64.sqrt() / 4.0 * 2f64.sqrt()),
            (2, 0, 0.25),
        ];
        for (p, q, c) in expect {
            assert!((hf.amp(p, q).re - c).abs() < 1e-15, "({p},{q})");
        }
        assert!((hf.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(hf.amp(0, 1).re, 0.0);
    }

    #[test]
    fn weakly_coupled_hf_is_vacuum() {
        let params = ModelParams::<f64>::from_chi(7, 1.0, 0.9).unwrap();
        assert_eq!(hf_amplitudes(&params), PqState::vacuum(7));
    }

    #[test]
    fn projection_keeps_even_entries() {
        let params = ModelParams::<f64>::from_chi(2, 1.0, 2.0).unwrap();
        let phf = phf_project(&hf_amplitudes(&params)).unwrap();
        let norm = (0.75f64 * 0.75 + 0.25 * 0.25).sqrt();
        assert!((phf.amp(0, 0).re - 0.75 / norm).abs() < 1e-15);
        assert!((phf.amp(2, 0).re - 0.25 / norm).abs() < 1e-15);
        assert_eq!(phf.amp(1, 0).re, 0.0);

        let gs = exact_ground_state(&ModelParams::<f64>::from_chi(6, 1.0, 2.2).unwrap()).unwrap();
        let proj = phf_project(&gs.state).unwrap();
        assert!((proj.overlap(&gs.state).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projection_of_odd_state_fails() {
        let n = 3;
        let mut amps = vec![czero::<f64>(); pq_dim(n)];
        amps[pq_index(n, 1, 0)] = cre(1.0);
        let odd = PqState::new(n, amps).unwrap();
        assert!(matches!(phf_project(&odd), Err(Error::NullProjection(_))));
    }

    #[test]
    fn energies_are_variationally_ordered() {
        let params = ModelParams::<f64>::from_chi(8, 1.0, 2.5).unwrap();
        let hf = hf_amplitudes(&params);
        let e_hf = energy_expectation(&hf, &params).unwrap();
        let e_phf = energy_expectation(&phf_project(&hf).unwrap(), &params).unwrap();
        let gs = exact_ground_state(&params).unwrap();
        assert!(gs.energy <= e_phf + 1e-12);
        assert!(e_phf <= e_hf + 1e-12);
        let e_exact = energy_expectation(&gs.state, &params).unwrap();
        assert!((e_exact - gs.energy).abs() < 1e-12);
        let vac = energy_expectation(&PqState::vacuum(8), &params).unwrap();
        assert_eq!(vac, -8.0);
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let params = ModelParams::<f64>::from_chi(5, 1.0, 1.0).unwrap();
        assert!(energy_expectation(&PqState::vacuum(4), &params).is_err());
    }
}
