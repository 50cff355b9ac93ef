use divquad::generate;
use divquad::oracle::{mc_integrate, simplex_monomial, tessellate};
use divquad::quadnd::volume;
use divquad::tensorpoly::MultiIndex;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn standard_simplex(n: usize) -> Vec<DVector<f64>> {
    let mut s = vec![DVector::zeros(n)];
    s.extend((0..n).map(|i| {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        e
    }));
    s
}

#[test]
fn monomials_match_mc_within_four_sigma() {
    for (n, alpha) in [(2usize, vec![2u32, 1]), (3, vec![1, 0, 2]), (3, vec![0, 0, 0]), (4, vec![1, 1, 0, 1])] {
        let idx = MultiIndex::new(alpha.clone());
        let exact = simplex_monomial(&standard_simplex(n), &idx, &vec![0.0; n]).unwrap();
        let est = mc_integrate(
            &|x: &[f64]| x.iter().zip(&alpha).map(|(v, &e)| v.powi(e as i32)).product(),
            &generate::simplex(n),
            200_000,
            11,
        )
        .unwrap();
        assert!((est.value - exact).abs() <= 4.0 * est.std_error, "n={n} {alpha:?}: {} vs {exact}", est.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn simplex_moments_closed_form(alpha in prop::collection::vec(0u32..5, 1..5)) {
        let n = alpha.len();
        let want = alpha.iter().map(|&a| factorial(a)).product::<f64>()
            / factorial(n as u32 + alpha.iter().sum::<u32>());
        let got = simplex_monomial(&standard_simplex(n), &MultiIndex::new(alpha), &vec![0.0; n]).unwrap();
        prop_assert!((got - want).abs() <= 1e-13 * want);
    }

    #[test]
    fn tessellation_covers_the_volume(seed in any::<u64>(), n in 1usize..5) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let poly = generate::random_convex(&mut r, n);
        let mesh = tessellate(&poly).unwrap();
        let v = volume(&poly, None).unwrap();
        prop_assert!((mesh.total_measure() - v).abs() <= 1e-11 * v.max(1.0));
    }
}
