#![cfg(feature = "oracle")]

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use lipkin3::discord::{classical_correlation, quantum_discord, stationarity_residual, OptimizerConfig, Partition};
use lipkin3::fock::{partial_trace, von_neumann_entropy, CMatrix, FockDensity};
use lipkin3::gcm::{hamiltonian_kernel, hill_wheeler, norm_eigenvalues, overlap_kernel, GcmConfig};
use lipkin3::mean_field::{energy_expectation, hf_amplitudes, hf_orbital, phf_project};
use lipkin3::model::{exact_ground_state, ModelParams, PqState};
use lipkin3::oracle::{
    oracle_discord_search, oracle_embed_pq, oracle_ground_state, oracle_hamiltonian, oracle_matrix_element,
    oracle_rdm, oracle_slater, oracle_slater_angles, OccupationBasis,
};
use lipkin3::rdm::{embed_to_fock, rdm_from_hf, rdm_from_pq, Subsystem};
use lipkin3::scan::{run_scan, Method, ScanConfig};
use lipkin3::Cplx;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn params(n: usize, chi: f64) -> ModelParams<f64> {
    ModelParams::from_chi(n, 1.0, chi).unwrap()
}

fn part(s: &str) -> Partition {
    s.parse().unwrap()
}

/// Tracks the largest value of a deviation and where it occurred.
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: 0.0,
            at: "-".into(),
        }
    }

    fn update(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.at = at();
        }
    }
}

const GRID_CHI: [f64; 5] = [0.5, 1.5, 2.5, 3.5, 5.0];

fn states_energies() -> Outcome {
    let mut exact = Worst::new();
    let mut hf = Worst::new();
    for n in 2..=5 {
        let basis = OccupationBasis::new(n).unwrap();
        for chi in GRID_CHI {
            let p = params(n, chi);
            let (e_oracle, _, _) = oracle_ground_state(&p).unwrap();
            let e = exact_ground_state(&p).unwrap().energy;
            exact.update((e - e_oracle).abs(), || format!("N={n} chi={chi}"));
            let h = oracle_hamiltonian(&basis, &p).unwrap();
            let det = oracle_slater(&basis, hf_orbital(chi).unwrap().components()).unwrap();
            let e_det = oracle_matrix_element(&h, &det, &det);
            let e_hf = energy_expectation(&hf_amplitudes(&p), &p).unwrap();
            hf.update((e_hf - e_det).abs(), || format!("N={n} chi={chi}"));
        }
    }
    Outcome {
        pass: exact.value < 1e-10 && hf.value < 1e-10,
        detail: format!(
            "max |dE| exact {:.1e} ({}), HF {:.1e} ({}); tol 1e-10",
            exact.value, exact.at, hf.value, hf.at
        ),
    }
}

fn rdm_equivalence() -> Outcome {
    let mut exact = Worst::new();
    let mut hf = Worst::new();
    for n in 2..=5 {
        let basis = OccupationBasis::new(n).unwrap();
        for chi in GRID_CHI {
            let p = params(n, chi);
            let gs = exact_ground_state(&p).unwrap();
            let psi = oracle_embed_pq(&basis, gs.state.amps()).unwrap();
            let orb = hf_orbital(chi).unwrap();
            let det = oracle_slater(&basis, orb.components()).unwrap();
            for sub in Subsystem::ALL {
                let d = (rdm_from_pq(&gs.state, sub).unwrap().matrix() - oracle_rdm(&basis, &psi, sub).unwrap().matrix()).camax();
                exact.update(d, || format!("N={n} chi={chi} {sub}"));
                let d = (rdm_from_hf(&orb, sub).matrix() - oracle_rdm(&basis, &det, sub).unwrap().matrix()).camax();
                hf.update(d, || format!("N={n} chi={chi} {sub}"));
            }
        }
    }
    Outcome {
        pass: exact.value < 1e-10 && hf.value < 1e-10,
        detail: format!(
            "max entry error exact {:.1e} ({}), HF {:.1e} ({}); tol 1e-10",
            exact.value, exact.at, hf.value, hf.at
        ),
    }
}

fn gcm_kernels() -> Outcome {
    let n = 4;
    let m = 12;
    let grid: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
    let basis = OccupationBasis::new(n).unwrap();
    let mut kernel = Worst::new();
    let mut norms = Worst::new();
    for chi in [0.5f64, 2.0, 4.0] {
        let p = params(n, chi);
        let cfg = GcmConfig::new(p).unwrap();
        let h = oracle_hamiltonian(&basis, &p).unwrap();
        let dets: Vec<_> = grid.iter().map(|&x| oracle_slater_angles(&basis, cfg.phi1(), x)).collect();
        let mut overlaps = vec![vec![0.0; m]; m];
        for (i, (a, da)) in grid.iter().zip(&dets).enumerate() {
            for (j, (b, db)) in grid.iter().zip(&dets).enumerate() {
                overlaps[i][j] = da.dot(db);
                let dn = (overlap_kernel(&cfg, *a, *b) - overlaps[i][j]).abs();
                let dh = (hamiltonian_kernel(&cfg, *a, *b) - oracle_matrix_element(&h, da, db)).abs();
                kernel.update(dn.max(dh), || format!("chi={chi} ({a:.3},{b:.3})"));
            }
        }
        let w = 2.0 * PI / m as f64;
        for (p_mom, np) in norm_eigenvalues(&cfg) {
            let mut acc = Cplx::new(0.0, 0.0);
            for (i, a) in grid.iter().enumerate() {
                for (j, b) in grid.iter().enumerate() {
                    let phase = p_mom as f64 * (b - a);
                    acc += Cplx::new(phase.cos(), phase.sin()) * overlaps[i][j] * (w * w / (2.0 * PI));
                }
            }
            norms.update((acc - Cplx::new(np, 0.0)).norm(), || format!("chi={chi} p={p_mom}"));
        }
    }
    Outcome {
        pass: kernel.value < 1e-9 && norms.value < 1e-8,
        detail: format!(
            "max kernel error {:.1e} ({}) tol 1e-9; max n_p error {:.1e} ({}) tol 1e-8",
            kernel.value, kernel.at, norms.value, norms.at
        ),
    }
}

fn sandwich() -> Outcome {
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for n in [4, 8, 20] {
        for k in 0..25 {
            let chi = 6.0 * k as f64 / 24.0;
            let p = params(n, chi);
            let e_ex = exact_ground_state(&p).unwrap().energy;
            let hf = hf_amplitudes(&p);
            let e_hf = energy_expectation(&hf, &p).unwrap();
            let e_phf = energy_expectation(&phf_project(&hf).unwrap(), &p).unwrap();
            let e_gcm = hill_wheeler(&GcmConfig::new(p).unwrap()).unwrap().energy;
            for (lo, hi, what) in [
                (e_ex, e_gcm, "exact<=gcm"),
                (e_gcm, e_hf, "gcm<=hf"),
                (e_ex, e_phf, "exact<=phf"),
                (e_phf, e_hf, "phf<=hf"),
            ] {
                worst = worst.max(lo - hi);
                if lo > hi + 1e-9 {
                    violations.push(format!("N={n} chi={chi} {what}"));
                }
            }
        }
    }
    Outcome {
        pass: violations.is_empty(),
        detail: format!(
            "{} violations of 300 points, max (lower - upper) {worst:.1e}; slack 1e-9 {}",
            violations.len(),
            violations.join(" ")
        ),
    }
}

fn pq_states(p: &ModelParams<f64>) -> Vec<(&'static str, PqState<f64>)> {
    let hf = hf_amplitudes(p);
    vec![
        ("exact", exact_ground_state(p).unwrap().state),
        ("phf", phf_project(&hf).unwrap()),
        ("gcm", hill_wheeler(&GcmConfig::new(*p).unwrap()).unwrap().state),
    ]
}

fn zero_discord() -> Outcome {
    let opt = OptimizerConfig::default();
    let mut hf = Worst::new();
    let mut two = Worst::new();
    for chi in [0.5f64, 2.0, 4.0] {
        let orb = hf_orbital(chi).unwrap();
        for sub in Subsystem::ALL {
            let r = quantum_discord(&embed_to_fock(&rdm_from_hf(&orb, sub)), &part("2,3:0,1"), &opt).unwrap();
            hf.update(r.discord.abs(), || format!("chi={chi} {sub}"));
        }
        let p = params(8, chi);
        for (name, state) in pq_states(&p) {
            for sub in Subsystem::ALL {
                let rho = embed_to_fock(&rdm_from_pq(&state, sub).unwrap());
                let r = quantum_discord(&rho, &part("1:0"), &opt).unwrap();
                two.update(r.discord.abs(), || format!("{name} chi={chi} {sub}"));
            }
        }
    }
    Outcome {
        pass: hf.value < 1e-6 && two.value < 1e-8,
        detail: format!(
            "HF 2,3:0,1 max |d| {:.1e} ({}) tol 1e-6; exact/PHF/GCM 1:0 max |d| {:.1e} ({}) tol 1e-8",
            hf.value, hf.at, two.value, two.at
        ),
    }
}

fn qpt_shape() -> Outcome {
    let opt = OptimizerConfig::default();
    let interaction = part("1,3:0,2");
    let exact_discord = |chi: f64| {
        let gs = exact_ground_state(&params(20, chi)).unwrap();
        let rho = embed_to_fock(&rdm_from_pq(&gs.state, Subsystem::N0N1).unwrap());
        quantum_discord(&rho, &interaction, &opt).unwrap().discord
    };
    let hf_discord = |chi: f64, sub: Subsystem| {
        let rho = embed_to_fock(&rdm_from_hf(&hf_orbital(chi).unwrap(), sub));
        quantum_discord(&rho, &interaction, &opt).unwrap().discord
    };
    let phf_discord = |chi: f64, sub: Subsystem| {
        let state = phf_project(&hf_amplitudes(&params(20, chi))).unwrap();
        let rho = embed_to_fock(&rdm_from_pq(&state, sub).unwrap());
        quantum_discord(&rho, &interaction, &opt).unwrap().discord
    };
    let (d08, d15) = (exact_discord(0.8), exact_discord(1.5));
    let (h08, h15) = (hf_discord(0.8, Subsystem::N0N1), hf_discord(1.5, Subsystem::N0N1));
    let exact_ok = d08 < 0.05 && d15 > 2.0 * d08;
    let hf_ok = h08 == 0.0 && h15 > 0.0;
    let mut below = Worst::new();
    for chi in [0.5, 0.8, 1.5, 2.0, 2.5, 2.9] {
        below.update(hf_discord(chi, Subsystem::N1N2).abs(), || format!("hf chi={chi}"));
        below.update(phf_discord(chi, Subsystem::N1N2).abs(), || format!("phf chi={chi}"));
    }
    let (h4, p4) = (hf_discord(4.0, Subsystem::N1N2), phf_discord(4.0, Subsystem::N1N2));
    let n1n2_ok = below.value < 1e-12 && h4 > 0.0 && p4 > 0.0;
    Outcome {
        pass: exact_ok && hf_ok && n1n2_ok,
        detail: format!(
            "exact n0n1 d(0.8)={d08:.4e} d(1.5)={d15:.4e}; HF n0n1 d(0.8)={h08:e} d(1.5)={h15:.4e}; \
             n1n2 HF/PHF max |d| below 3 {:.1e} ({}), at 4: HF {h4:.4e} PHF {p4:.4e}",
            below.value, below.at
        ),
    }
}

fn random_parity_even(rng: &mut ChaCha8Rng, pure: bool) -> FockDensity<f64> {
    let mut c = || Cplx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let m = if pure {
        let v: Vec<Cplx<f64>> = (0..16usize).map(|s| if s.count_ones() % 2 == 0 { c() } else { Cplx::new(0.0, 0.0) }).collect();
        let v = nalgebra::DVector::from_vec(v);
        &v * v.adjoint()
    } else {
        let rank = 1 + (c().re.abs() * 15.0) as usize;
        let g = CMatrix::from_fn(16, rank, |_, _| c());
        let full = &g * g.adjoint();
        CMatrix::from_fn(16, 16, |a, b| {
            if (a.count_ones() + b.count_ones()) % 2 == 0 {
                full[(a, b)]
            } else {
                Cplx::new(0.0, 0.0)
            }
        })
    };
    let tr = m.trace();
    FockDensity::new(4, m / tr).unwrap()
}

fn engine_properties() -> Outcome {
    let opt = OptimizerConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let full_parts = ["1,3:0,2", "2,3:0,1", "0,2:1,3", "0,1:2,3"];
    let all_parts = ["1,3:0,2", "2,3:0,1", "0,2:1,3", "0,1:2,3", "1:0", "0,2:1", "1,3:0"];
    let mut order = Worst::new();
    let mut pure = Worst::new();
    for i in 0..200 {
        let is_pure = i % 4 == 0;
        let rho = random_parity_even(&mut rng, is_pure);
        let p = part(if is_pure { full_parts[(i / 4) % 4] } else { all_parts[i % 7] });
        let r = quantum_discord(&rho, &p, &opt).unwrap();
        let bad = (r.classical_j - r.mutual_info).max(-r.classical_j).max(-r.discord);
        order.update(bad, || format!("sample {i} {p}"));
        if is_pure {
            let s_a = von_neumann_entropy(&partial_trace(&rho, p.a()).unwrap()).unwrap();
            pure.update((r.discord - s_a).abs(), || format!("sample {i} {p}"));
        }
    }

    let frozen_opt = OptimizerConfig {
        freeze_pairing: true,
        ..opt
    };
    let mut swap = Worst::new();
    let mut frozen = Worst::new();
    let (mut swap_bad, mut frozen_bad, mut cases) = (0, 0, 0);
    for n in [4, 8, 20] {
        for chi in [0.5f64, 2.0, 4.0] {
            let p = params(n, chi);
            let orb = hf_orbital(chi).unwrap();
            for sub in Subsystem::ALL {
                let mut rhos: Vec<(&str, FockDensity<f64>)> = pq_states(&p)
                    .into_iter()
                    .map(|(name, s)| (name, embed_to_fock(&rdm_from_pq(&s, sub).unwrap())))
                    .collect();
                rhos.push(("hf", embed_to_fock(&rdm_from_hf(&orb, sub))));
                for (name, rho) in &rhos {
                    let at = |ps: &str| format!("{name} N={n} chi={chi} {sub} {ps}");
                    let ab = part("1,3:0,2");
                    let d_ab = quantum_discord(rho, &ab, &opt).unwrap();
                    let d_ba = quantum_discord(rho, &ab.swapped().unwrap(), &opt).unwrap();
                    let dev = (d_ab.discord - d_ba.discord).abs();
                    swap.update(dev, || at("1,3:0,2"));
                    swap_bad += usize::from(dev >= 1e-5);
                    cases += 1;
                    for (ps, full) in [("1,3:0,2", d_ab.classical_j), ("2,3:0,1", quantum_discord(rho, &part("2,3:0,1"), &opt).unwrap().classical_j)] {
                        let j0 = classical_correlation(rho, &part(ps), &frozen_opt).unwrap().j;
                        let dev = (full - j0).abs();
                        frozen.update(dev, || at(ps));
                        frozen_bad += usize::from(dev >= 1e-6);
                    }
                }
            }
        }
    }
    let pass = order.value <= 1e-8 && pure.value < 1e-5 && swap.value < 1e-5 && frozen.value < 1e-6;
    Outcome {
        pass,
        detail: format!(
            "random: max order violation {:.1e} ({}) tol 1e-8, max |d - S_A| pure {:.1e} ({}) tol 1e-5; \
             Lipkin RDMs: A<->B max {:.1e} ({}) tol 1e-5, {swap_bad}/{cases} over; \
             pairing frozen max dJ {:.1e} ({}) tol 1e-6, {frozen_bad}/{} over",
            order.value,
            order.at,
            pure.value,
            pure.at,
            swap.value,
            swap.at,
            frozen.value,
            frozen.at,
            2 * cases
        ),
    }
}

fn optimizer_validation() -> Outcome {
    let opt = OptimizerConfig::default();
    let cases = [
        (0.5, Subsystem::N0N1, "1,3:0,2"),
        (1.5, Subsystem::N0N1, "2,3:0,1"),
        (2.5, Subsystem::N0N1, "1,3:0,2"),
        (3.5, Subsystem::N0N2, "1,3:0,2"),
        (5.0, Subsystem::N0N2, "2,3:0,1"),
        (2.0, Subsystem::N1N2, "1,3:0,2"),
        (4.0, Subsystem::N1N2, "2,3:0,1"),
        (3.0, Subsystem::N0N2, "0,2:1,3"),
        (1.2, Subsystem::N0N1, "0,1:2,3"),
        (4.5, Subsystem::N0N1, "1,2:0,3"),
    ];
    let mut diff = Worst::new();
    let mut residual = Worst::new();
    for (k, &(chi, sub, ps)) in cases.iter().enumerate() {
        let gs = exact_ground_state(&params(4, chi)).unwrap();
        let rho = embed_to_fock(&rdm_from_pq(&gs.state, sub).unwrap());
        let p = part(ps);
        let cc = classical_correlation(&rho, &p, &opt).unwrap();
        let brute = oracle_discord_search(&rho, &p, 100_000, 1000 + k as u64).unwrap();
        diff.update((cc.j - brute).abs(), || format!("chi={chi} {sub} {ps}"));
        let res = stationarity_residual(&rho, &p, &cc.best_params).unwrap();
        residual.update(res, || format!("chi={chi} {sub} {ps}"));
    }
    Outcome {
        pass: diff.value < 1e-5 && residual.value < 1e-4,
        detail: format!(
            "max |J - J_search| {:.1e} ({}) tol 1e-5; max stationarity residual {:.1e} ({}) tol 1e-4",
            diff.value, diff.at, residual.value, residual.at
        ),
    }
}

fn determinism() -> Outcome {
    let out = std::env::temp_dir().join(format!("lipkin3-acceptance-{}.csv", std::process::id()));
    let cfg = ScanConfig {
        n_list: vec![4, 8],
        chi_min: 0.0,
        chi_max: 6.0,
        chi_steps: 7,
        methods: Method::ALL.to_vec(),
        out: PathBuf::from(&out),
        ..ScanConfig::default()
    };
    let first = run_scan(&cfg).unwrap();
    let a = std::fs::read(&out).unwrap();
    let second = run_scan(&cfg).unwrap();
    let b = std::fs::read(&out).unwrap();
    let _ = std::fs::remove_file(&out);
    Outcome {
        pass: a == b && first == second,
        detail: format!("{} rows, {} bytes, identical: {}", first.rows, a.len(), a == b),
    }
}

#[test]
fn acceptance() {
    type Check = (&'static str, fn() -> Outcome, Duration);
    let checks: [Check; 9] = [
        ("oracle equivalence, states", states_energies, Duration::from_secs(10)),
        ("oracle equivalence, reduced densities", rdm_equivalence, Duration::from_secs(30)),
        ("GCM kernels", gcm_kernels, Duration::from_secs(60)),
        ("variational sandwich", sandwich, Duration::from_secs(60)),
        ("zero-discord identities", zero_discord, Duration::from_secs(300)),
        ("transition shape", qpt_shape, Duration::from_secs(600)),
        ("discord engine properties", engine_properties, Duration::from_secs(900)),
        ("optimizer validation", optimizer_validation, Duration::from_secs(900)),
        ("scan determinism", determinism, Duration::from_secs(120)),
    ];
    let mut failed = Vec::new();
    for (i, (name, check, budget)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed < *budget;
        println!(
            "criterion {}: {} {name}: {} [{:.1}s of {}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
