//! Checks against values computed independently of the library: closed
//! forms, continued-fraction matrix traces and high-precision sums.

use branchdim::gap::{certificate_search, periodic_point};
use branchdim::measures::{dimension_bracket, entropy, lyapunov_bracket, lyapunov_estimate, truncate_renormalize, BracketOptions};
use branchdim::optimizer::{maximize_dimension, moran_root, moran_weights, sweep_l, MaximizeOptions, SweepOptions};
use branchdim::system::{catalog, Word};
use branchdim::{Error, ProbVector};

fn w(s: &[usize]) -> Word {
    Word::new(s.to_vec()).unwrap()
}

/// `lambda^2` for the larger eigenvalue of `prod [[a, 1], [1, 0]]`, which is
/// `|(T^n)'|` at the Gauss periodic point with that itinerary.
fn gauss_cycle_derivative(word: &[usize]) -> f64 {
    let mut m = [[1.0f64, 0.0], [0.0, 1.0]];
    for &a in word {
        let a = a as f64;
        m = [[m[0][0] * a + m[0][1], m[0][0]], [m[1][0] * a + m[1][1], m[1][0]]];
    }
    let tr = m[0][0] + m[1][1];
    let det = if word.len() % 2 == 0 { 1.0 } else { -1.0 };
    let lam = (tr + (tr * tr - 4.0 * det).sqrt()) / 2.0;
    lam * lam
}

/// Continued fraction `[0; a_1, a_2, ...]` of the purely periodic point.
fn gauss_periodic_point(word: &[usize]) -> f64 {
    let mut x = 0.5;
    for _ in 0..200 {
        for &a in word.iter().rev() {
            x = 1.0 / (a as f64 + x);
        }
    }
    x
}

#[test]
fn gauss_periodic_points_match_continued_fractions() {
    let g = catalog::gauss();
    for word in [&[1][..], &[2], &[1, 2], &[2, 1, 1], &[3, 1, 2], &[3, 2, 1], &[3, 1, 2, 1], &[5, 1, 4, 2, 2]] {
        let o = periodic_point(&g, &w(word)).unwrap();
        assert!((o.point - gauss_periodic_point(word)).abs() < 1e-12, "{word:?}");
        let d = gauss_cycle_derivative(word);
        assert!((o.derivative() - d).abs() < 1e-9 * d, "{word:?}: {} vs {d}", o.derivative());
        assert!(o.residual <= 1e-9);
    }
}

#[test]
fn gauss_length_three_cycles_are_reversal_symmetric() {
    // (3,1,2) reversed is (2,1,3), a rotation of (3,2,1); the symmetric
    // matrix products have equal traces.
    let (a, b) = (gauss_cycle_derivative(&[3, 1, 2]), gauss_cycle_derivative(&[3, 2, 1]));
    assert!((a - 145.99315036357863).abs() < 1e-9 && (a - b).abs() < 1e-9);
    let g = catalog::gauss();
    assert!(certificate_search(&g, 3, 3, 1e-6).unwrap().is_none());
}

#[test]
fn gauss_certificate_at_length_four() {
    let g = catalog::gauss();
    let c = certificate_search(&g, 3, 4, 1e-6).unwrap().unwrap();
    assert!(c.valid);
    let da = gauss_cycle_derivative(c.orbit_a.word.symbols());
    let db = gauss_cycle_derivative(c.orbit_b.word.symbols());
    let gap = (da - db).abs() / da.max(db);
    assert!((c.derivative_gap - gap).abs() < 1e-9);
    // (3,2,1,1) and (3,1,2,1): 397.9975 vs 321.9969
    assert!((gap - (397.99748742132399 - 321.99689437998486) / 397.99748742132399).abs() < 1e-9);
}

#[test]
fn k_t_against_high_precision_sums() {
    // Gauss: sup over x of sum (n + x)^{-2s} is at x = 0, so K(0.75) = zeta(1.5).
    let k = catalog::gauss().k_t(0.75, 1000).unwrap();
    assert!(k.contains(2.612_375_348_685_488), "{k:?}");
    assert!(k.width() < 1e-3);
    // Luroth: sum (n(n+1))^{-0.75} by Euler-Maclaurin summation.
    let k = catalog::luroth().k_t(0.75, 1000).unwrap();
    assert!(k.contains(2.010_938_128_713_738), "{k:?}");
    assert!(matches!(catalog::gauss().k_t(0.4, 1000), Err(Error::Divergence { .. })));
}

#[test]
fn luroth_maximizers_match_moran_roots() {
    let l = catalog::luroth();
    let expected = [(2, 0.600_966_851_6), (3, 0.758_399_484_0), (4, 0.829_181_678_5)];
    for (n, s) in expected {
        let lengths: Vec<f64> = (1..=n).map(|k| 1.0 / (k * (k + 1)) as f64).collect();
        assert!((moran_root(&lengths).unwrap() - s).abs() < 1e-9);
        let r = maximize_dimension(&l, n, 1, &MaximizeOptions::default()).unwrap();
        assert!(r.dim.contains(s) || (r.dim.midpoint() - s).abs() < 1e-9, "{r:?}");
        for (a, b) in r.p_opt.weights().iter().zip(moran_weights(&lengths).unwrap()) {
            assert!((a - b).abs() < 1e-4);
        }
    }
}

#[test]
fn luroth_sweep_matches_moran_roots() {
    let report = sweep_l(&catalog::luroth(), 4, &SweepOptions::default()).unwrap();
    for r in &report.results[1..] {
        let lengths: Vec<f64> = (1..=r.l).map(|k| 1.0 / (k * (k + 1)) as f64).collect();
        assert!((r.dim.midpoint() - moran_root(&lengths).unwrap()).abs() < 1e-3);
    }
}

fn lebesgue_prefix(l: usize) -> ProbVector {
    let raw: Vec<f64> = (1..=l).map(|n| 1.0 / (n * (n + 1)) as f64).collect();
    let s: f64 = raw.iter().sum();
    ProbVector::new(raw.into_iter().map(|x| x / s).collect()).unwrap()
}

/// `h / chi` with `chi = sum q_n log(n (n + 1))` for the affine Luroth slopes.
fn luroth_closed_form(q: &ProbVector) -> f64 {
    let chi: f64 = q.weights().iter().enumerate().map(|(i, &x)| x * (((i + 1) * (i + 2)) as f64).ln()).sum();
    entropy(q) / chi
}

#[test]
fn lebesgue_prefixes_on_luroth() {
    let l = catalog::luroth();
    let pinned = [(10, 0.939_34), (50, 0.989_52), (200, 0.997_50)];
    let mut last = 0.0;
    for (n, v) in pinned {
        let q = lebesgue_prefix(n);
        let closed = luroth_closed_form(&q);
        assert!((closed - v).abs() < 1e-5, "L={n}: {closed}");
        let b = dimension_bracket(&l, &q, 1).unwrap();
        assert!(b.contains(closed) || (b.midpoint() - closed).abs() < 1e-12);
        assert!(closed > last);
        last = closed;
    }
    assert!(luroth_closed_form(&lebesgue_prefix(11)) <= 0.95);
    assert!(luroth_closed_form(&lebesgue_prefix(12)) > 0.95);
}

#[test]
fn truncations_approach_the_full_vector() {
    let g = catalog::gauss();
    let raw: Vec<f64> = (1..=100).map(|n| (n as f64).powi(-3)).collect();
    let s: f64 = raw.iter().sum();
    let p = ProbVector::new(raw.into_iter().map(|x| x / s).collect()).unwrap();
    let opts = BracketOptions::default();
    let dim = |q: &ProbVector| entropy(q) / lyapunov_estimate(&g, q, 3, &opts).unwrap();
    let full = dim(&p);
    let diffs: Vec<f64> = [2, 5, 10, 20, 30, 40, 50].iter().map(|&l| (dim(&truncate_renormalize(&p, l).unwrap()) - full).abs()).collect();
    assert!(diffs.windows(2).all(|d| d[1] < d[0]), "{diffs:?}");
    assert!(*diffs.last().unwrap() < 0.01);
}

#[test]
fn golden_mean_lyapunov() {
    let g = catalog::gauss();
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let b = lyapunov_bracket(&g, &ProbVector::new(vec![1.0, 0.0]).unwrap(), 8).unwrap();
    assert!(b.contains(-2.0 * phi.ln()) && b.width() < 0.2);
}
