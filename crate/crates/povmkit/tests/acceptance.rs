//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its headline numbers (visible under `cargo test -- --nocapture`).
//!
//! Run with `cargo test --test acceptance`.

use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use povmkit::cloning::{
    fidelity_variance, posterior_mean, success_probability, summarize_fidelity, CloningStrategy,
};
use povmkit::constructions::{
    basis_povm, mub_family, mub_povm, random_rank_one_povm, sic_povm,
};
use povmkit::designs::{
    classify_equiangular, frame_potential, is_t_design, moment_operator, search_2design,
    welch_bound, SearchOpts,
};
use povmkit::linops::{herm_eig, hs_inner, sym_projector, Operator};
use povmkit::povm::{
    canonical_reconstruction, design_from_rank_one_povm, povm_superoperator, reconstruct,
    tight_reconstruct, tightness_check, DiscretePOVM,
};
use povmkit::tomo::{
    born_probabilities, delta_tau, dual_null_coefficients, haar_random_pure_state,
    perturbed_dual, random_density_matrix, run_tomography, DualChoice, Estimator, StateEnsemble,
    TomographyConfig,
};

fn pass(criterion: u32, detail: &str) {
    println!("[criterion {criterion:02}] PASS — {detail}");
}

fn pure_state(dim: usize, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Operator::projector(&haar_random_pure_state(dim, &mut rng))
}

#[test]
fn acceptance_01_sic_verification() {
    let start = Instant::now();
    let mut worst_overlap = 0.0f64;
    let mut worst_gap = 0.0f64;
    for d in [2usize, 3] {
        let povm = sic_povm(d).unwrap();
        let design = design_from_rank_one_povm(&povm, 1e-9).unwrap();
        let target = 1.0 / (d + 1) as f64;
        for x in 0..design.len() {
            for y in (x + 1)..design.len() {
                let dev = (design.overlap_sq(x, y) - target).abs();
                assert!(dev <= 1e-9, "d={d}: overlap deviation {dev:.3e}");
                worst_overlap = worst_overlap.max(dev);
            }
        }
        let potential = frame_potential(&design, 2);
        let bound = 2.0 / (d * (d + 1)) as f64;
        assert!((bound - welch_bound(d, 2)).abs() < 1e-15);
        let gap = (potential - bound).abs();
        assert!(gap <= 1e-10, "d={d}: potential gap {gap:.3e}");
        worst_gap = worst_gap.max(gap);

        let report = tightness_check(&povm, 1e-9);
        assert!(
            report.is_rank_one_tight,
            "d={d}: rank-one residual {:.3e}",
            report.rank_one_residual
        );
        assert!(report.rank_one_residual < 1e-9);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(
        1,
        &format!(
            "SIC d=2,3: overlap dev ≤ {worst_overlap:.2e}, potential gap ≤ {worst_gap:.2e}, \
             rank-one tight ({elapsed:.2?})"
        ),
    );
}

#[test]
fn acceptance_02_mub_verification() {
    let start = Instant::now();
    for p in [2usize, 3, 5, 7] {
        let family = mub_family(p).unwrap();
        let vectors = family.vectors();
        // overlap table within 1e-10
        for (a, u) in vectors.iter().enumerate() {
            for (b, v) in vectors.iter().enumerate() {
                let o: Complex64 = u.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
                let o2 = o.norm_sqr();
                let (la, ja) = (a / p, a % p);
                let (lb, jb) = (b / p, b % p);
                let expect = if la == lb {
                    if ja == jb {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    1.0 / p as f64
                };
                assert!(
                    (o2 - expect).abs() <= 1e-10,
                    "p={p}: overlap ({a},{b}) = {o2}, expected {expect}"
                );
            }
        }
        // 2-design equivalence oracle: Welch equality and moment-operator
        // equality must agree (and both hold here).
        let povm = mub_povm(p).unwrap();
        let design = design_from_rank_one_povm(&povm, 1e-9).unwrap();
        let report = is_t_design(&design, 2, 1e-10);
        let m = moment_operator(&design, 2).unwrap();
        let sym = sym_projector(p, 2).unwrap();
        let target = sym.as_operator().scale_re(1.0 / sym.sym_dim() as f64);
        let moment_ok = m.distance(&target) < 1e-10;
        assert_eq!(report.is_design, moment_ok, "p={p}: oracles disagree");
        assert!(report.is_design, "p={p}: gap {:.3e}", report.gap);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    pass(2, &format!("MUB p=2,3,5,7: overlap tables and both 2-design oracles agree ({elapsed:.2?})"));
}

#[test]
fn acceptance_03_superoperator_spectrum() {
    let sic = sic_povm(2).unwrap();
    let eig = herm_eig(&povm_superoperator(&sic)).unwrap();
    let expect = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0];
    for (l, e) in eig.eigenvalues.iter().zip(expect) {
        assert!((l - e).abs() <= 1e-10, "eigenvalue {l} vs {e}");
    }
    let report = tightness_check(&sic, 1e-9);
    let trace_inv = report.trace_inverse.unwrap();
    assert!((trace_inv - 10.0).abs() <= 1e-9, "Tr F⁻¹ = {trace_inv}");

    // 50 random IC-POVMs at d = 2 and 3: strictly above the minimum
    let mut smallest_margin = f64::INFINITY;
    for k in 0..25u64 {
        for (d, n) in [(2usize, 6usize), (3, 11)] {
            let povm = random_rank_one_povm(d, n, 9000 + k).unwrap();
            let report = tightness_check(&povm, 1e-9);
            let floor = (d * (d * (d + 1) - 1)) as f64;
            let margin = report.trace_inverse.unwrap() - floor;
            assert!(margin > 1e-3, "d={d} seed {k}: margin {margin:.3e}");
            smallest_margin = smallest_margin.min(margin);
        }
    }
    pass(
        3,
        &format!(
            "SIC spectrum {{1, 1/3×3}}, Tr F⁻¹ = 10; 50 random IC-POVMs exceed the minimum by ≥ {smallest_margin:.3}"
        ),
    );
}

/// Depolarized SIC: (1−ε)F(x) + ε·I/n stays a tight IC-POVM but is no
/// longer rank-one.
fn depolarized_sic(eps: f64) -> DiscretePOVM {
    let sic = sic_povm(2).unwrap();
    let n = sic.len() as f64;
    let elements = sic
        .elements()
        .iter()
        .map(|f| &f.scale_re(1.0 - eps) + &Operator::identity(2).scale_re(eps / n))
        .collect();
    DiscretePOVM::new(2, elements).unwrap()
}

/// Random rank-one POVM with its first two outcomes merged: neither
/// rank-one nor tight.
fn merged_random(seed: u64) -> DiscretePOVM {
    let r = random_rank_one_povm(2, 6, seed).unwrap();
    let mut elements = r.elements().to_vec();
    let merged = &elements[0] + &elements[1];
    elements.splice(0..2, [merged]);
    DiscretePOVM::new(2, elements).unwrap()
}

#[test]
fn acceptance_04_frame_bound() {
    let pool: Vec<(String, DiscretePOVM, bool)> = vec![
        ("sic2".into(), sic_povm(2).unwrap(), true),
        ("sic3".into(), sic_povm(3).unwrap(), true),
        ("mub2".into(), mub_povm(2).unwrap(), true),
        ("mub3".into(), mub_povm(3).unwrap(), true),
        ("basis2".into(), basis_povm(2).unwrap(), true),
        ("basis3".into(), basis_povm(3).unwrap(), true),
        ("random2".into(), random_rank_one_povm(2, 6, 17).unwrap(), true),
        ("random3".into(), random_rank_one_povm(3, 10, 18).unwrap(), true),
        ("depolarized-sic2".into(), depolarized_sic(0.3), false),
        ("merged-random2".into(), merged_random(19), false),
    ];
    for (name, povm, rank_one) in &pool {
        let report = tightness_check(povm, 1e-9);
        assert!(
            report.frame_bound_lhs >= report.frame_bound_rhs - 1e-10,
            "{name}: lhs {} < rhs {}",
            report.frame_bound_lhs,
            report.frame_bound_rhs
        );
        let equality = (report.frame_bound_lhs - report.frame_bound_rhs).abs() <= 1e-9;
        assert_eq!(
            equality, report.is_tight,
            "{name}: equality {equality} but is_tight {}",
            report.is_tight
        );
        if *rank_one {
            let d = povm.dim() as f64;
            assert!((report.trace_f - d).abs() < 1e-9, "{name}: Tr F = {}", report.trace_f);
            let rank_one_bound = 2.0 * d / (d + 1.0);
            assert!(
                report.frame_bound_lhs >= rank_one_bound - 1e-10,
                "{name}: lhs {} under rank-one bound {rank_one_bound}",
                report.frame_bound_lhs
            );
        }
    }
    let tight: Vec<&str> = pool
        .iter()
        .filter(|(_, p, _)| tightness_check(p, 1e-9).is_tight)
        .map(|(n, _, _)| n.as_str())
        .collect();
    assert_eq!(tight, ["sic2", "sic3", "mub2", "mub3", "depolarized-sic2"]);
    pass(
        4,
        &format!("frame bound holds on {} POVMs; equality exactly on {tight:?}", pool.len()),
    );
}

#[test]
fn acceptance_05_reconstruction_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    let pool: Vec<(String, DiscretePOVM, bool)> = vec![
        ("sic2".into(), sic_povm(2).unwrap(), true),
        ("mub2".into(), mub_povm(2).unwrap(), true),
        ("random2".into(), random_rank_one_povm(2, 6, 23).unwrap(), false),
        ("sic3".into(), sic_povm(3).unwrap(), true),
        ("mub3".into(), mub_povm(3).unwrap(), true),
        ("random3".into(), random_rank_one_povm(3, 11, 29).unwrap(), false),
    ];
    let mut worst = 0.0f64;
    for (name, povm, tight) in &pool {
        let ovd = canonical_reconstruction(povm).unwrap();
        for _ in 0..100 {
            let rho = random_density_matrix(povm.dim(), &mut rng);
            let probs = born_probabilities(povm, &rho).unwrap();
            let probs = ovd.povd().restrict(&probs);
            let estimate = ovd.reconstruct(&probs).unwrap();
            let err = estimate.distance(&rho);
            assert!(err <= 1e-9, "{name}: round-trip error {err:.3e}");
            worst = worst.max(err);
            if *tight {
                let via_tight = tight_reconstruct(povm, &probs).unwrap();
                let dev = via_tight.distance(&estimate);
                assert!(dev <= 1e-9, "{name}: closed-form deviation {dev:.3e}");
            }
        }
        // the free-function form takes the full probability vector
        let rho = random_density_matrix(povm.dim(), &mut rng);
        let full = born_probabilities(povm, &rho).unwrap();
        let estimate = reconstruct(povm, &full).unwrap();
        assert!(estimate.distance(&rho) <= 1e-9);
    }
    pass(
        5,
        &format!("600 exact-probability round trips ≤ {worst:.2e}; canonical and tight paths agree"),
    );
}

#[test]
fn acceptance_06_tomography_error_law() {
    let start = Instant::now();

    let sic = sic_povm(2).unwrap();
    let sigma = pure_state(2, 314);
    let stats = run_tomography(
        &sic,
        &TomographyConfig {
            samples_per_trial: 100,
            trials: 10_000,
            seed: 20_240_101,
            estimator: Estimator::Frequency,
            state_ensemble: StateEnsemble::HaarOrbit(sigma),
            dual: DualChoice::Canonical,
            keep_trial_errors: false,
        },
    )
    .unwrap();
    assert!((stats.predicted - 0.04).abs() < 1e-10);
    let sic_sigmas = (stats.mean_sq_error - 0.04).abs() / stats.std_error;
    assert!(
        sic_sigmas < 4.0,
        "SIC mean {} vs 0.04 at {sic_sigmas:.2} standard errors",
        stats.mean_sq_error
    );

    let mub = mub_povm(3).unwrap();
    let sigma = pure_state(3, 2718);
    let stats = run_tomography(
        &mub,
        &TomographyConfig {
            samples_per_trial: 300,
            trials: 10_000,
            seed: 20_240_202,
            estimator: Estimator::Frequency,
            state_ensemble: StateEnsemble::HaarOrbit(sigma),
            dual: DualChoice::Canonical,
            keep_trial_errors: false,
        },
    )
    .unwrap();
    // (d(d+1) − 1 − tr σ²)/N = (11 − 1)/300 for pure σ
    let predicted = 10.0 / 300.0;
    assert!((stats.predicted - predicted).abs() < 1e-10);
    let mub_sigmas = (stats.mean_sq_error - predicted).abs() / stats.std_error;
    assert!(
        mub_sigmas < 4.0,
        "MUB mean {} vs {predicted} at {mub_sigmas:.2} standard errors",
        stats.mean_sq_error
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    pass(
        6,
        &format!(
            "SIC(2) N=100 within {sic_sigmas:.2}σ of 0.04; MUB(3) N=300 within {mub_sigmas:.2}σ of 1/30 ({elapsed:.2?})"
        ),
    );
}

#[test]
fn acceptance_07_optimality_ordering() {
    let sigma = pure_state(2, 161_803);
    let run = |povm: &DiscretePOVM| {
        run_tomography(
            povm,
            &TomographyConfig {
                samples_per_trial: 100,
                trials: 4000,
                seed: 55_501,
                estimator: Estimator::Frequency,
                state_ensemble: StateEnsemble::HaarOrbit(sigma.clone()),
                dual: DualChoice::Canonical,
                keep_trial_errors: false,
            },
        )
        .unwrap()
    };
    let sic_stats = run(&sic_povm(2).unwrap());
    let mut wins = 0;
    for k in 0..20u64 {
        let povm = random_rank_one_povm(2, 6, 7000 + k).unwrap();
        let stats = run(&povm);
        // Tr(F⁻¹)/d ordering predicts strictly larger error
        assert!(stats.predicted > sic_stats.predicted, "seed {k}");
        if stats.mean_sq_error > sic_stats.mean_sq_error {
            wins += 1;
        }
    }
    assert!(wins >= 19, "random POVMs beat the SIC mean only {wins}/20 times");
    pass(
        7,
        &format!("SIC mean error below random 6-outcome IC-POVMs in {wins}/20 paired runs"),
    );
}

#[test]
fn acceptance_08_dual_frame_optimality() {
    let mub = mub_povm(2).unwrap();
    let recon = canonical_reconstruction(&mub).unwrap();
    let canonical = delta_tau(&mub, recon.operators()).unwrap();
    assert!((canonical - 10.0).abs() <= 1e-9, "Δ_τ(canonical) = {canonical}");

    let kernel = dual_null_coefficients(&mub).unwrap();
    assert_eq!(kernel.len(), 2);
    let directions = [
        Operator::from_fn(2, |i, j| Complex64::new(if i != j { 1.0 } else { 0.0 }, 0.0)),
        Operator::from_fn(2, |i, j| {
            if i == j {
                Complex64::new(0.0, 0.0)
            } else if i < j {
                Complex64::new(0.0, -1.0)
            } else {
                Complex64::new(0.0, 1.0)
            }
        }),
        Operator::from_fn(2, |i, j| {
            Complex64::new(if i == j { if i == 0 { 1.0 } else { -0.5 } } else { 0.3 }, 0.0)
        }),
    ];
    let povd = mub.povd();
    let mut tested = 0;
    for coeffs in &kernel {
        for g in &directions {
            for scale in [0.5, 1.0, 2.0] {
                let scaled: Vec<f64> = coeffs.iter().map(|c| c * scale).collect();
                let dual = perturbed_dual(&recon, &scaled, g).unwrap();
                let dt = delta_tau(&mub, &dual).unwrap();
                let energy: f64 = povd
                    .taus()
                    .iter()
                    .zip(&scaled)
                    .map(|(&tau, &c)| tau * c * c * hs_inner(g, g).unwrap().re)
                    .sum();
                assert!(energy > 1e-6);
                assert!(
                    dt >= canonical + energy - 1e-9,
                    "Δ_τ {dt} vs canonical {canonical} + energy {energy}"
                );
                tested += 1;
            }
        }
    }
    pass(
        8,
        &format!("Δ_τ(canonical) = 10; all {tested} perturbed duals exceed it by their energy"),
    );
}

#[test]
fn acceptance_09_cloning() {
    let start = Instant::now();
    // SIC and MUB strategies: flat success probability at 2/(d+1)
    for (name, povm) in [
        ("sic2", sic_povm(2).unwrap()),
        ("mub2", mub_povm(2).unwrap()),
        ("mub3", mub_povm(3).unwrap()),
    ] {
        let d = povm.dim();
        let strategy = CloningStrategy::from_povd(povm).unwrap();
        let target = 2.0 / (d + 1) as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(31_415);
        let mut spread = 0.0f64;
        for _ in 0..1000 {
            let psi = haar_random_pure_state(d, &mut rng);
            spread = spread.max((success_probability(&strategy, &psi) - target).abs());
        }
        assert!(spread < 1e-9, "{name}: spread {spread:.3e}");
        let variance = fidelity_variance(&strategy).unwrap();
        assert!(variance.abs() <= 1e-10, "{name}: variance {variance:.3e}");
        for k in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(500 + k);
            let psi = haar_random_pure_state(d, &mut rng);
            let mean = posterior_mean(&strategy, &psi).unwrap();
            let expect = (&Operator::identity(d) + &Operator::projector(&psi))
                .scale_re(1.0 / (d + 1) as f64);
            assert!(mean.distance(&expect) <= 1e-10, "{name}: posterior mean deviates");
        }
    }

    // a random rank-one non-tight strategy misbehaves in all three ways
    let povm = random_rank_one_povm(2, 6, 424_242).unwrap();
    assert!(!tightness_check(&povm, 1e-9).is_rank_one_tight);
    let strategy = CloningStrategy::from_povd(povm).unwrap();
    let variance = fidelity_variance(&strategy).unwrap();
    assert!(variance > 1e-4, "variance {variance:.3e}");
    let report = summarize_fidelity(&strategy, 512, 50, 8);
    assert!(
        report.f_wc_estimate < report.f_av - 1e-3,
        "f_wc {} vs f_av {}",
        report.f_wc_estimate,
        report.f_av
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    pass(
        9,
        &format!(
            "tight strategies flat at 2/(d+1); random strategy variance {variance:.1e}, f_wc < f_av ({elapsed:.2?})"
        ),
    );
}

#[test]
fn acceptance_10_design_search() {
    for (d, n) in [(2usize, 4usize), (3, 9)] {
        let start = Instant::now();
        let outcome = search_2design(d, n, 42, &SearchOpts::default()).unwrap();
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 30.0, "d={d}: took {elapsed:?}");
        assert!(outcome.certified, "d={d}: gap {:.3e}", outcome.report.gap);
        assert!(outcome.report.gap < 1e-8);
        for w in outcome.design.weights() {
            assert!((w - 1.0 / n as f64).abs() < 1e-6);
        }
        let target = 1.0 / (d + 1) as f64;
        for x in 0..n {
            for y in (x + 1)..n {
                let dev = (outcome.design.overlap_sq(x, y) - target).abs();
                assert!(dev < 1e-4, "d={d}: overlap deviation {dev:.3e}");
            }
        }
        let c = classify_equiangular(&outcome.design, 1e-3).unwrap();
        assert!((c - target).abs() < 1e-4);
        pass(
            10,
            &format!(
                "search d={d} n={n}: gap {:.1e}, overlaps at 1/(d+1) ± 1e-4 in {elapsed:.2?}",
                outcome.report.gap
            ),
        );
    }
}

#[test]
fn acceptance_11_octahedron_three_design() {
    let mub = mub_povm(2).unwrap();
    let octa = design_from_rank_one_povm(&mub, 1e-9).unwrap();
    let report = is_t_design(&octa, 3, 1e-10);
    assert!((report.potential - 0.25).abs() <= 1e-10, "potential {}", report.potential);
    assert!(report.is_design);

    let sic = sic_povm(2).unwrap();
    let tetra = design_from_rank_one_povm(&sic, 1e-9).unwrap();
    let report = is_t_design(&tetra, 3, 1e-10);
    assert!((report.potential - 5.0 / 18.0).abs() <= 1e-10, "potential {}", report.potential);
    assert!(!report.is_design);
    pass(
        11,
        "octahedron passes t=3 at potential 1/4; tetrahedron fails at 5/18",
    );
}
