use branchdim::measures::{transfer_improves, BracketOptions};
use branchdim::optimizer::{grid_oracle, maximize_dimension, moran_weights, sweep_l, MaximizeOptions, Objective, SweepOptions};
use branchdim::system::{catalog, Orientation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

#[test]
fn gradient_matches_finite_differences() {
    let g = catalog::gauss();
    let obj = Objective::new(&g, 3, 4, &BracketOptions::default()).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let raw: Vec<f64> = (0..3).map(|_| rng.random_range(0.05..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|x| x / s).collect();
        let grad = obj.gradient(&p);
        for i in 0..3 {
            let h = 1e-6;
            let (mut a, mut b) = (p.clone(), p.clone());
            a[i] += h;
            b[i] -= h;
            let fd = (obj.value(&a) - obj.value(&b)) / (2.0 * h);
            assert!((fd - grad[i]).abs() <= 1e-5 * grad[i].abs().max(1e-3), "{p:?} {i}: {fd} vs {}", grad[i]);
        }
    }
}

#[test]
fn ascent_never_loses_to_the_grid() {
    let g = catalog::gauss();
    for (l, res, depth) in [(2, 1.0 / 400.0, 6), (3, 1.0 / 50.0, 4)] {
        let best = maximize_dimension(&g, l, depth, &MaximizeOptions::default()).unwrap();
        let grid = grid_oracle(&g, l, res, depth, &BracketOptions::default()).unwrap();
        assert!(best.dim.midpoint() >= grid.dim.midpoint() - 1e-3);
        assert!(best.objective >= grid.objective - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn affine_maximizers_are_moran_weights(lengths in prop::collection::vec(0.05f64..0.3, 2..=4)) {
        let sys = catalog::affine(&lengths, Orientation::Preserving).unwrap();
        let r = maximize_dimension(&sys, lengths.len(), 1, &MaximizeOptions::default()).unwrap();
        let total: f64 = r.p_opt.weights().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12 && r.p_opt.weights().iter().all(|&x| x >= 0.0));
        for (a, b) in r.p_opt.weights().iter().zip(moran_weights(&lengths).unwrap()) {
            prop_assert!((a - b).abs() < 1e-4, "{:?}", r.p_opt);
        }
    }
}

#[test]
fn gauss_sweep_properties() {
    let g = catalog::gauss();
    let report = sweep_l(&g, 6, &SweepOptions::default()).unwrap();
    assert!(report.nondecreasing_within_brackets());
    assert!(report.decay_spread(2..=6) < 4.0, "{:?}", report.decay_constants);
    for r in &report.results {
        assert!(r.converged, "{r:?}");
        let total: f64 = r.p_opt.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for n in 2..=r.l {
            assert!(!transfer_improves(&g, &r.p_opt, n, 1e-3, r.depth).unwrap(), "L={} n={n}", r.l);
        }
    }
    assert!(report.results[2].dim.hi >= 0.611 - report.results[2].dim.width());
}
