use proptest::prelude::*;

use kzmodp::construct::{exponent_data, homogeneous_components, taylor_solution_factored, FactoredSolution, ProblemSpec};
use kzmodp::curves::{curve_integral, CurveSpec};
use kzmodp::ffpoly::{Ambient, Monomial, SparsePoly, Var};
use kzmodp::field::PrimeField;
use kzmodp::fpintegral::{integrate_fpk, integrate_grid};
use kzmodp::sl2rep::{basis, casimir_matrix, diagonal_matrix, Generator, HighestWeights, WeightVector};
use kzmodp::verify::{check_kz, check_kz_factored, check_singular};

const PRIMES: [u64; 4] = [3, 5, 7, 11];

fn poly(amb: Ambient, terms: &[(Vec<u32>, Vec<u32>, u64)]) -> SparsePoly {
    SparsePoly::from_terms(amb, terms.iter().map(|(t, z, c)| (Monomial::new(t, z), *c))).unwrap()
}

type Terms = Vec<(Vec<u32>, Vec<u32>, u64)>;

fn terms_strategy(k: usize, n: usize, max_deg: u32) -> impl Strategy<Value = Terms> {
    prop::collection::vec(
        (
            prop::collection::vec(0..=max_deg, k),
            prop::collection::vec(0..=max_deg, n),
            0u64..1000,
        ),
        0..6,
    )
}

/// A prime and three small polynomials in `t_1, z_1, z_2`.
fn triple() -> impl Strategy<Value = (u64, [Terms; 3])> {
    (
        prop::sample::select(PRIMES.to_vec()),
        terms_strategy(1, 2, 3),
        terms_strategy(1, 2, 3),
        terms_strategy(1, 2, 3),
    )
        .prop_map(|(p, a, b, c)| (p, [a, b, c]))
}

/// Small grid of problems with nonzero solutions available.
fn small_problem() -> impl Strategy<Value = (u64, &'static str, Vec<u32>, u32, Vec<i64>)> {
    (
        prop::sample::select(vec![3u64, 5, 7]),
        prop::sample::select(vec!["2", "4", "6/5"]),
        prop::sample::select(vec![vec![1u32, 1], vec![1, 2], vec![1, 1, 1], vec![1, 2, 1], vec![2, 1, 1]]),
        1u32..=2,
        0i64..4,
    )
        .prop_filter("p must not divide κ", |(p, kappa, ..)| !(*p == 3 && *kappa == "6/5") && !(*p == 5 && *kappa == "6/5"))
        .prop_map(|(p, kappa, m, k, q)| (p, kappa, m, k, vec![q; k as usize]))
}

fn solve(p: u64, kappa: &str, m: &[u32], k: u32, q: &[i64]) -> (ProblemSpec, FactoredSolution) {
    let spec = ProblemSpec::new(p, kappa.parse().unwrap(), m.to_vec(), k, q, &vec![1; k as usize]).unwrap();
    let exps = exponent_data(&spec, None).unwrap();
    let sol = taylor_solution_factored(&spec, &exps).unwrap();
    (spec, sol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms((p, [a, b, c]) in triple()) {
        let amb = Ambient::new(p, 1, 2).unwrap();
        let (a, b, c) = (poly(amb, &a), poly(amb, &b), poly(amb, &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert!((&a + &(-&a)).is_zero());
        prop_assert_eq!(&a * &SparsePoly::one(amb), a.clone());
    }

    #[test]
    fn frobenius((p, [a, b, _]) in triple()) {
        let amb = Ambient::new(p, 1, 2).unwrap();
        let (a, b) = (poly(amb, &a), poly(amb, &b));
        prop_assert_eq!((&a + &b).pow(p), &a.pow(p) + &b.pow(p));
    }

    #[test]
    fn leibniz((p, [a, b, _]) in triple()) {
        let amb = Ambient::new(p, 1, 2).unwrap();
        let (a, b) = (poly(amb, &a), poly(amb, &b));
        for v in [Var::T(0), Var::Z(0), Var::Z(1)] {
            let lhs = (&a * &b).partial_derivative(v).unwrap();
            let rhs = &(&a.partial_derivative(v).unwrap() * &b) + &(&a * &b.partial_derivative(v).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }

    /// `f(t) = Σ_e [coefficient of (t - q)^e in f] (t - q)^e`.
    #[test]
    fn taylor_completeness((p, [a, _, _]) in triple(), q in 0u64..11) {
        let amb = Ambient::new(p, 1, 2).unwrap();
        let f = poly(amb, &a);
        let q = q % p;
        let shifted = f.shift_t(&[q]).unwrap();
        let t_minus_q = SparsePoly::linear(amb, -(q as i64), &[(0, 1)], &[]).unwrap();
        let mut rebuilt = SparsePoly::zero(amb);
        for e in 0..=f.degree_in(Var::T(0)).unwrap() {
            let c = shifted.coeff_t(&[e]).unwrap().lift_t(1).unwrap();
            rebuilt = &rebuilt + &(&c * &t_minus_q.pow(e as u64));
        }
        prop_assert_eq!(rebuilt, f);
    }

    #[test]
    fn poly_json_round_trip((p, [a, _, _]) in triple()) {
        let f = poly(Ambient::new(p, 1, 2).unwrap(), &a);
        let text = serde_json::to_string(&f).unwrap();
        let back: SparsePoly = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn two_path_integration(p in prop::sample::select(PRIMES.to_vec()), k in 1usize..=2, terms in terms_strategy(2, 0, 25)) {
        let terms: Vec<_> = terms.into_iter().map(|(t, z, c)| (t[..k].to_vec(), z, c)).collect();
        let f = poly(Ambient::new(p, k, 0).unwrap(), &terms);
        prop_assert_eq!(integrate_grid(&f).unwrap(), integrate_fpk(&f).unwrap());
    }

    #[test]
    fn basis_size_generating_function(m in prop::collection::vec(1u32..=3, 1..=4)) {
        let total: u32 = m.iter().sum();
        let mut gf = vec![1u64];
        for &ms in &m {
            let mut next = vec![0u64; gf.len() + ms as usize];
            for (i, &c) in gf.iter().enumerate() {
                for d in 0..=ms as usize {
                    next[i + d] += c;
                }
            }
            gf = next;
        }
        for k in 0..=total {
            prop_assert_eq!(basis(&m, k as i64).len() as u64, gf[k as usize]);
        }
        prop_assert!(basis(&m, total as i64 + 1).is_empty());
    }

    #[test]
    fn sl2_relations_on_vectors(
        m in prop::collection::vec(1u32..=2, 2..=3),
        coeffs in prop::collection::vec(0u64..7, 12),
        k_pick in 0u32..6,
    ) {
        let total: u32 = m.iter().sum();
        prop_assume!(total >= 2);
        let k = 1 + k_pick % (total - 1);
        let weights = HighestWeights::new(m.clone(), k).unwrap();
        let amb = Ambient::new(7, 0, m.len()).unwrap();
        let coords = weights.basis().into_iter().zip(coeffs.iter()).map(|(j, &c)| (j, SparsePoly::constant(amb, c)));
        let v = WeightVector::from_coords(weights, amb, coords).unwrap();
        let ef = v.act_f().unwrap().act_e().unwrap();
        let fe = v.act_e().unwrap().act_f().unwrap();
        prop_assert_eq!(ef.checked_sub(&fe).unwrap(), v.act_h());
    }

    #[test]
    fn casimir_commutes_with_diagonal(m in prop::collection::vec(1u32..=2, 2..=4), k_pick in 0i64..8, a in 0usize..4, b in 0usize..4) {
        let n = m.len();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let total: i64 = m.iter().map(|&x| x as i64).sum();
        let k = k_pick % (total + 1);
        let field = PrimeField::new(7).unwrap();
        let omega = |kk: i64| casimir_matrix(field, &m, kk, a, b);
        let e = diagonal_matrix(field, &m, k, Generator::E);
        let f = diagonal_matrix(field, &m, k, Generator::F);
        prop_assert_eq!(omega(k - 1).mul(&e), e.mul(&omega(k)));
        prop_assert_eq!(omega(k + 1).mul(&f), f.mul(&omega(k)));
    }

    #[test]
    fn curve_integral_translation_invariant(
        p in prop::sample::select(vec![5u64, 7, 11, 13]),
        raw in prop::collection::vec(0u64..13, 3),
        shift in 0u64..13,
        d in 2u32..=3,
    ) {
        let field = PrimeField::new(p).unwrap();
        let x: Vec<u64> = raw.iter().map(|&v| v % p).collect();
        prop_assume!(x[0] != x[1] && x[1] != x[2] && x[0] != x[2]);
        let moved: Vec<u64> = x.iter().map(|&v| field.add(v, shift % p)).collect();
        let e = [1, 1, d - 1];
        let c0 = CurveSpec::new(p, d, &x, &e).unwrap();
        let c1 = CurveSpec::new(p, d, &moved, &e).unwrap();
        for j in 0..3 {
            prop_assert_eq!(curve_integral(&c0, j).unwrap(), curve_integral(&c1, j).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solutions_pass_both_checks((p, kappa, m, k, q) in small_problem()) {
        prop_assume!(k <= m.iter().sum::<u32>());
        let (spec, sol) = solve(p, kappa, &m, k, &q);
        prop_assert!(check_kz_factored(&sol, &spec).unwrap().passed);
        prop_assert!(check_singular(&sol.reduced).unwrap().passed);
    }

    /// Solutions form an `F_p[z_1^p, .., z_n^p]`-module.
    #[test]
    fn closed_under_p_th_powers((p, kappa, m, k, q) in small_problem(), e in prop::collection::vec(0u32..=2, 3), c in 1u64..100) {
        prop_assume!(k <= m.iter().sum::<u32>());
        let (spec, sol) = solve(p, kappa, &m, k, &q);
        let amb = spec.z_ambient();
        let exps: Vec<u32> = e[..m.len()].iter().map(|&x| x * p as u32).collect();
        let g = poly(amb, &[(vec![], exps, c), (vec![], vec![0; m.len()], 1)]);
        let scaled = FactoredSolution { prefactor: sol.prefactor.clone(), reduced: sol.reduced.mul_poly(&g).unwrap() };
        prop_assert!(check_kz_factored(&scaled, &spec).unwrap().passed);
        prop_assert!(check_singular(&scaled.reduced).unwrap().passed);
    }

    #[test]
    fn homogeneous_components_are_solutions((p, kappa, m, k, q) in small_problem()) {
        prop_assume!(k <= m.iter().sum::<u32>());
        let (spec, sol) = solve(p, kappa, &m, k, &q);
        let full = sol.expand().unwrap();
        let parts = homogeneous_components(&full);
        let mut sum = WeightVector::zero(full.weights().clone(), full.ambient()).unwrap();
        for c in &parts {
            prop_assert!(check_kz(c, &spec).unwrap().passed);
            sum = sum.checked_add(c).unwrap();
        }
        prop_assert_eq!(sum, full);
    }

    /// Adding a nonzero multiple of one basis monomial to a coordinate breaks KZ or singularity.
    #[test]
    fn perturbed_solutions_fail(
        (p, kappa, m, k, q) in small_problem(),
        pick in 0usize..16,
        z in prop::collection::vec(0u32..=2, 3),
        c in 1u64..100,
    ) {
        prop_assume!(k <= m.iter().sum::<u32>());
        let (spec, sol) = solve(p, kappa, &m, k, &q);
        prop_assume!(c % p != 0);
        let basis = spec.weights().basis();
        let j = basis[pick % basis.len()].clone();
        let mut bumped = sol.clone();
        let amb = spec.z_ambient();
        bumped.reduced.add_to(j, &poly(amb, &[(vec![], z[..m.len()].to_vec(), c)])).unwrap();
        let kz = check_kz_factored(&bumped, &spec).unwrap().passed;
        let sing = check_singular(&bumped.reduced).unwrap().passed;
        prop_assert!(!(kz && sing));
    }
}
