//! Cross-solver agreement on seeded problems.

use hdinpaint::maskgen::{grid_mask, random_mask};
use hdinpaint::multigrid::{Downsampling, MultigridConfig};
use hdinpaint::{
    compute_metrics, solve, InpaintingProblem, PipelineConfig, ScalarField, SolverConfig,
    SolverKind,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn problem(w: usize, h: usize, density: f64, seed: u64) -> InpaintingProblem {
    let mask = random_mask(w, h, density, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(!seed);
    let f = ScalarField::from_fn(w, h, |_, _| rng.gen_range(0.0..=255.0));
    InpaintingProblem::new(mask, vec![f], 1.0).unwrap()
}

fn strict() -> PipelineConfig {
    PipelineConfig {
        solver: SolverConfig::default().with_tol(1e-8),
        ..PipelineConfig::default()
    }
}

#[test]
fn pairwise_agreement_on_64x64_suite() {
    for (seed, density) in [(1, 0.01), (2, 0.03), (3, 0.05), (4, 0.10), (5, 0.25)] {
        let p = problem(64, 64, density, seed);
        let solutions: Vec<_> = SolverKind::ALL
            .iter()
            .map(|&k| (k, solve(&p, k, &strict()).unwrap()))
            .collect();
        for (i, (ka, a)) in solutions.iter().enumerate() {
            assert!(a.converged(), "{ka} seed {seed}");
            for (kb, b) in &solutions[i + 1..] {
                let mse = compute_metrics(&a.channels[0], &b.channels[0]).unwrap().mse;
                assert!(mse <= 1e-10, "{ka} vs {kb} seed {seed}: {mse:e}");
            }
        }
    }
}

#[test]
fn oras_and_cg_agree_up_to_128() {
    for (w, h, seed) in [(128, 128, 11), (100, 37, 12), (17, 128, 13)] {
        let p = problem(w, h, 0.04, seed);
        let cg = solve(&p, SolverKind::Cg, &strict()).unwrap();
        let oras = solve(&p, SolverKind::Oras, &strict()).unwrap();
        let mse = compute_metrics(&cg.channels[0], &oras.channels[0])
            .unwrap()
            .mse;
        assert!(mse <= 1e-10, "{w}x{h}: {mse:e}");
    }
}

#[test]
fn regular_lattice_masks_and_naive_downsampling() {
    let mask = grid_mask(150, 90, 0.02).unwrap();
    let f = ScalarField::from_fn(150, 90, |x, y| {
        127.5 + 100.0 * ((x as f64) * 0.05).sin() * ((y as f64) * 0.08).cos()
    });
    let p = InpaintingProblem::new(mask, vec![f], 1.0).unwrap();
    let reference = solve(&p, SolverKind::Cg, &strict()).unwrap();
    let mut cfg = strict();
    cfg.multigrid = MultigridConfig {
        value_downsampling: Downsampling::Naive,
        ..MultigridConfig::default()
    };
    for kind in [SolverKind::MlOras, SolverKind::MgOras, SolverKind::MgCg] {
        let s = solve(&p, kind, &cfg).unwrap();
        let mse = compute_metrics(&s.channels[0], &reference.channels[0])
            .unwrap()
            .mse;
        assert!(mse <= 1e-10, "{kind}: {mse:e}");
    }
}

#[test]
fn reports_are_consistent() {
    let p = problem(200, 120, 0.03, 21);
    for kind in SolverKind::ALL {
        let s = solve(&p, kind, &PipelineConfig::default()).unwrap();
        let r = &s.reports[0];
        assert!(r.converged, "{kind}");
        assert!(
            r.final_rel_residual <= 1e-3,
            "{kind}: {}",
            r.final_rel_residual
        );
        assert!(r.history.len() >= 2, "{kind}");
        assert!(r.finest_smoother_iterations >= 1, "{kind}");
    }
}

#[test]
fn spacing_does_not_change_the_solution() {
    let a = problem(80, 60, 0.05, 31);
    let b = InpaintingProblem::new(a.mask().clone(), a.known().to_vec(), 0.25).unwrap();
    for kind in SolverKind::ALL {
        let x = solve(&a, kind, &strict()).unwrap();
        let y = solve(&b, kind, &strict()).unwrap();
        let mse = compute_metrics(&x.channels[0], &y.channels[0]).unwrap().mse;
        assert!(mse <= 1e-10, "{kind}: {mse:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn multigrid_respects_maximum_principle(seed in any::<u64>(), w in 20usize..90, h in 20usize..90, d in 0.01f64..0.2) {
        let p = problem(w, h, d, seed);
        let f = &p.known()[0];
        let known: Vec<f64> = p.mask().as_slice().iter().zip(f.as_slice()).filter(|(&m, _)| m).map(|(_, &v)| v).collect();
        prop_assume!(!known.is_empty());
        let lo = known.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = known.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let s = solve(&p, SolverKind::MgOras, &strict()).unwrap();
        let (umin, umax) = s.channels[0].min_max().unwrap();
        prop_assert!(umin >= lo - 1e-6 && umax <= hi + 1e-6);
    }
}
