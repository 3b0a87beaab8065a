use lipkin3::discord::{mutual_information, quantum_discord, OptimizerConfig, Partition};
use lipkin3::fock::{annihilator, expi_hermitian, CMatrix, FockDensity};
use lipkin3::gcm::{hill_wheeler, GcmConfig};
use lipkin3::mean_field::{energy_expectation, hf_amplitudes, phf_project};
use lipkin3::model::{exact_ground_state, ModelParams, PqState};
use lipkin3::rdm::{embed_to_fock, rdm_from_pq, Subsystem};
use lipkin3::Cplx;
use proptest::prelude::*;

fn states(n: usize, chi: f64) -> Vec<PqState<f64>> {
    let p = ModelParams::from_chi(n, 1.0, chi).unwrap();
    let hf = hf_amplitudes(&p);
    let mut out = vec![exact_ground_state(&p).unwrap().state, hf.clone()];
    out.extend(phf_project(&hf).ok());
    out.push(hill_wheeler(&GcmConfig::new(p).unwrap()).unwrap().state);
    out
}

fn subsystem(k: usize) -> Subsystem {
    Subsystem::ALL[k % 3]
}

/// exp(i(theta (c_i^+ c_j + h.c.) + phi n_i)) on four modes.
fn local_rotation(i: usize, j: usize, theta: f64, phi: f64) -> CMatrix<f64> {
    let ci = annihilator::<f64>(4, i);
    let cj = annihilator::<f64>(4, j);
    let hop = ci.adjoint() * &cj;
    let g = (&hop + hop.adjoint()) * Cplx::new(theta, 0.0) + ci.adjoint() * &ci * Cplx::new(phi, 0.0);
    expi_hermitian(&g)
}

fn fast() -> OptimizerConfig {
    OptimizerConfig {
        restarts: 8,
        ..OptimizerConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduced_densities_are_physical(n in 2usize..12, chi in 0.0f64..6.0, k in 0usize..3) {
        for state in states(n, chi) {
            let rho = rdm_from_pq(&state, subsystem(k)).unwrap();
            let fock = embed_to_fock(&rho);
            prop_assert!((fock.trace() - Cplx::new(1.0, 0.0)).norm() < 1e-12);
            prop_assert!(fock.hermiticity_error() < 1e-13);
            prop_assert!(fock.parity_coherence() < 1e-13);
            prop_assert!(fock.eigenvalues().iter().all(|&l| l > -1e-12));
            prop_assert!(fock.purity() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn variational_energies_bound_the_exact_one(n in 2usize..16, chi in 0.0f64..6.0) {
        let p = ModelParams::from_chi(n, 1.0, chi).unwrap();
        let e0 = exact_ground_state(&p).unwrap().energy;
        for state in states(n, chi) {
            prop_assert!(energy_expectation(&state, &p).unwrap() >= e0 - 1e-10);
        }
    }

    #[test]
    fn correlations_are_ordered(n in 2usize..10, chi in 0.0f64..6.0, k in 0usize..3, which in 0usize..3) {
        let parts = ["1,3:0,2", "2,3:0,1", "1:0"];
        let part: Partition = parts[which].parse().unwrap();
        for state in states(n, chi) {
            let rho = embed_to_fock(&rdm_from_pq(&state, subsystem(k)).unwrap());
            let r = quantum_discord(&rho, &part, &fast()).unwrap();
            prop_assert!(r.classical_j >= -1e-10);
            prop_assert!(r.classical_j <= r.mutual_info + 1e-10);
            prop_assert!(r.discord >= -1e-8);
            prop_assert!((r.mutual_info - mutual_information(&rho, &part).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn discord_is_invariant_under_local_rotations(
        n in 2usize..8,
        chi in 0.5f64..5.0,
        k in 0usize..3,
        angles in prop::array::uniform4(-3.0f64..3.0),
    ) {
        let part: Partition = "1,3:0,2".parse().unwrap();
        let state = exact_ground_state(&ModelParams::from_chi(n, 1.0, chi).unwrap()).unwrap().state;
        let rho = embed_to_fock(&rdm_from_pq(&state, subsystem(k)).unwrap());
        let u = local_rotation(1, 3, angles[0], angles[1]) * local_rotation(0, 2, angles[2], angles[3]);
        let moved = rho.conjugate_by(&u).unwrap();
        let opt = OptimizerConfig::default();
        let before = quantum_discord(&rho, &part, &opt).unwrap();
        let after = quantum_discord(&moved, &part, &opt).unwrap();
        prop_assert!((before.mutual_info - after.mutual_info).abs() < 1e-10);
        prop_assert!((before.discord - after.discord).abs() < 1e-6, "{} vs {}", before.discord, after.discord);
    }
}

#[test]
fn product_states_carry_no_correlation() {
    let mut v = vec![Cplx::new(0.0, 0.0); 16];
    let (a, b) = (Cplx::new(0.6f64, 0.0), Cplx::new(0.0, 0.8));
    // (a + b c1^+ c3^+)(a + b c0^+ c2^+)|0>
    v[0] = a * a;
    v[0b1010] = a * b;
    v[0b0101] = a * b;
    v[0b1111] = -b * b;
    let rho = FockDensity::pure(4, &v).unwrap();
    let r = quantum_discord(&rho, &"1,3:0,2".parse().unwrap(), &OptimizerConfig::default()).unwrap();
    assert!(r.mutual_info.abs() < 1e-10 && r.discord.abs() < 1e-8, "{r:?}");
}

#[test]
fn single_precision_matches_double() {
    let part: Partition = "1,3:0,2".parse().unwrap();
    let p64 = ModelParams::<f64>::from_chi(6, 1.0, 2.5).unwrap();
    let p32 = ModelParams::<f32>::from_chi(6, 1.0, 2.5).unwrap();
    let r64 = quantum_discord(
        &embed_to_fock(&rdm_from_pq(&exact_ground_state(&p64).unwrap().state, Subsystem::N0N1).unwrap()),
        &part,
        &OptimizerConfig::default(),
    )
    .unwrap();
    let r32 = quantum_discord(
        &embed_to_fock(&rdm_from_pq(&exact_ground_state(&p32).unwrap().state, Subsystem::N0N1).unwrap()),
        &part,
        &OptimizerConfig::default(),
    )
    .unwrap();
    assert!((r64.discord - f64::from(r32.discord)).abs() < 1e-3);
    assert!((r64.mutual_info - f64::from(r32.mutual_info)).abs() < 1e-4);
}
