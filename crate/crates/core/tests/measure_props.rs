use branchdim::measures::{
    dimension_bracket, entropy, entropy_shift_derivative, lyapunov_bracket, mass_transfer, truncate_renormalize, CylinderRule,
    BracketOptions, lyapunov_bracket_with,
};
use branchdim::system::{catalog, BranchedSystem, Orientation};
use branchdim::ProbVector;
use proptest::prelude::*;

fn prob(raw: Vec<f64>) -> ProbVector {
    let s: f64 = raw.iter().sum();
    ProbVector::new(raw.into_iter().map(|x| x / s).collect()).unwrap()
}

fn prob_strategy(max_len: usize) -> impl Strategy<Value = ProbVector> {
    prop::collection::vec(0.01f64..1.0, 2..=max_len).prop_map(prob)
}

fn catalog_systems() -> Vec<BranchedSystem> {
    vec![catalog::gauss(), catalog::luroth(), catalog::example_tangent(4).unwrap()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn brackets_nest_across_depths(sys in 0..3usize, p in prob_strategy(3)) {
        let sys = &catalog_systems()[sys];
        for rule in [CylinderRule::Combined, CylinderRule::Orbit, CylinderRule::Coarse] {
            let opts = BracketOptions::with_rule(rule);
            let at: Vec<_> = (1..=6).map(|k| lyapunov_bracket_with(sys, &p, k, &opts).unwrap()).collect();
            for b in &at {
                prop_assert!(b.lo <= b.hi);
            }
            for w in at.windows(2) {
                prop_assert!(w[0].intersects(&w[1]), "{:?}", w);
            }
            for b in &at[1..] {
                prop_assert!(b.width() <= at[1].width() + 1e-12);
            }
        }
    }

    #[test]
    fn affine_brackets_are_exact(p in prob_strategy(5), depth in 1..=4usize) {
        let b = lyapunov_bracket(&catalog::luroth(), &p, depth).unwrap();
        prop_assert!(b.width() < 1e-12 * b.hi.max(1.0) * 8.0);
    }

    #[test]
    fn dimension_stays_in_unit_interval(sys in 0..3usize, p in prob_strategy(4)) {
        let b = dimension_bracket(&catalog_systems()[sys], &p, 4).unwrap();
        prop_assert!(b.lo >= 0.0 && b.hi <= 1.0 + 1e-9, "{b:?}");
    }

    #[test]
    fn affine_relabeling(lengths in prop::collection::vec(0.05f64..0.3, 3), p in prob_strategy(3)) {
        let perm = [2usize, 0, 1];
        let sys = catalog::affine(&lengths, Orientation::Preserving).unwrap();
        let permuted_lengths: Vec<f64> = perm.iter().map(|&i| lengths[i]).collect();
        let permuted_p = ProbVector::new(perm.iter().map(|&i| p.get(i + 1)).collect()).unwrap();
        let other = catalog::affine(&permuted_lengths, Orientation::Preserving).unwrap();
        for depth in [1, 3] {
            let a = dimension_bracket(&sys, &p, depth).unwrap();
            let b = dimension_bracket(&other, &permuted_p, depth).unwrap();
            prop_assert!((a.lo - b.lo).abs() < 1e-12 && (a.hi - b.hi).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_is_identity_on_short_support(p in prob_strategy(5), extra in 0..3usize) {
        let l = p.len() + extra;
        prop_assert_eq!(truncate_renormalize(&p, l).unwrap(), p);
    }
}

/// `d/d eps (h(p) - h(p_{eps,n}))` against a central difference, 100 draws.
#[test]
fn entropy_shift_derivative_matches_finite_differences() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 100 {
        let len = rng.random_range(2..=6);
        let p = prob((0..len).map(|_| rng.random_range(0.02..1.0)).collect());
        let n = rng.random_range(2..=len);
        let max = p.get(n).min(1.0 - p.get(1));
        let eps = rng.random_range(0.0..0.8) * max;
        let h = 1e-6 * max;
        if eps < h || eps + h >= max {
            continue;
        }
        let f = |e: f64| entropy(&p) - entropy(&mass_transfer(&p, e, n).unwrap());
        let fd = (f(eps + h) - f(eps - h)) / (2.0 * h);
        let exact = entropy_shift_derivative(&p, eps, n).unwrap();
        assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "p={p:?} n={n} eps={eps}: {fd} vs {exact}");
        checked += 1;
    }
}
