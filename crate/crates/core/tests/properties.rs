use bt_quant::formal::{star_formal, JetPolynomial};
use bt_quant::geometry::{poisson_bracket, FsFunction};
use bt_quant::harness::{parse, Expr};
use bt_quant::rates::{fit_rate, RateWindow};
use bt_quant::scalar::{q, Cq};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (1u8..=3).prop_map(Expr::Var),
        (-5i64..=5, 1i64..=4).prop_map(|(n, d)| Expr::Num(q(n, d))),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner, 0u32..=3).prop_map(|(a, n)| Expr::Pow(Box::new(a), n)),
        ]
    })
}

/// Real polynomial of degree at most 2 in the ambient coordinates.
fn quadratic() -> impl Strategy<Value = FsFunction> {
    prop::collection::vec(-3i64..=3, 10).prop_map(|c| {
        let x = [FsFunction::x1(), FsFunction::x2(), FsFunction::x3()];
        let mut f = FsFunction::constant(Cq::real(q(c[0], 1)));
        let mut idx = 1;
        for xi in &x {
            f = f + xi * &FsFunction::constant(Cq::real(q(c[idx], 1)));
            idx += 1;
        }
        for i in 0..3 {
            for j in i..3 {
                if idx < c.len() {
                    f = f + &x[i] * &x[j] * FsFunction::constant(Cq::real(q(c[idx], 1)));
                    idx += 1;
                }
            }
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn printing_is_a_fixed_point_of_parsing(e in expr()) {
        let once = e.to_string();
        let reparsed = parse(&once).unwrap();
        prop_assert_eq!(reparsed.to_string(), once);
        prop_assert_eq!(reparsed.lower(), e.lower());
    }

    #[test]
    fn bracket_obeys_jacobi(f in quadratic(), g in quadratic(), h in quadratic()) {
        let pb = poisson_bracket;
        let total = pb(&f, &pb(&g, &h)) + pb(&g, &pb(&h, &f)) + pb(&h, &pb(&f, &g));
        prop_assert!(total.is_zero());
    }

    #[test]
    fn bracket_obeys_leibniz(f in quadratic(), g in quadratic(), h in quadratic()) {
        let lhs = poisson_bracket(&f, &(&g * &h));
        let rhs = poisson_bracket(&f, &g) * h.clone() + &g * &poisson_bracket(&f, &h);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_is_antisymmetric(f in quadratic(), g in quadratic()) {
        prop_assert!((poisson_bracket(&f, &g) + poisson_bracket(&g, &f)).is_zero());
    }

    #[test]
    fn rate_slope_ignores_residual_scale(
        p in -3.0f64..-0.5,
        c in 0.1f64..10.0,
        lambda in 1e-3f64..1e3,
        wobble in prop::collection::vec(-0.05f64..0.05, 9),
    ) {
        let grid = [8u32, 12, 16, 24, 32, 48, 64, 96, 128];
        let table: Vec<(u32, f64)> = grid.iter().zip(&wobble)
            .map(|(&k, w)| (k, c * (k as f64).powf(p) * (1.0 + w)))
            .collect();
        let scaled: Vec<(u32, f64)> = table.iter().map(|(k, r)| (*k, lambda * r)).collect();
        let w = RateWindow::at_most(0.0).from_k(16);
        let a = fit_rate(&table, w).unwrap();
        let b = fit_rate(&scaled, w).unwrap();
        prop_assert!((a.slope - b.slope).abs() < 1e-12, "{} vs {}", a.slope, b.slope);
    }

    #[test]
    fn formal_star_is_associative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = JetPolynomial::random(1, 2, 1, 3, &mut rng);
        let b = JetPolynomial::random(1, 2, 1, 3, &mut rng);
        let c = JetPolynomial::random(1, 2, 1, 3, &mut rng);
        let left = star_formal(&star_formal(&a, &b).unwrap(), &c).unwrap();
        let right = star_formal(&a, &star_formal(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }
}
