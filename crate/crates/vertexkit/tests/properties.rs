//! Randomized invariants for the exact layers: polynomial ring axioms,
//! window arithmetic soundness, bracket bilinearity, and decomposition
//! directness on generated inputs.

use proptest::prelude::*;
use vertexkit::cdmod::{FgModule, Gen, ModElement};
use vertexkit::cohom::{self, CoefficientModule};
use vertexkit::exact::{
    rat, rat_int, truncated_exp, window_mul, LaurentWindow, ParamPoly, QMatrix, Rational, Symbol,
    VarSet, Window,
};
use vertexkit::gcmat::{fitting_decomposition, ConformalMatrix};
use vertexkit::lca;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn poly() -> impl Strategy<Value = ParamPoly> {
    proptest::collection::vec(((0u32..=2, 0u32..=2), small_rat()), 0..4).prop_map(|terms| {
        terms.into_iter().fold(ParamPoly::zero(), |acc, ((d, l), c)| {
            let m = ParamPoly::monomial(Symbol::Del, d, rat_int(1))
                .mul(&ParamPoly::monomial(Symbol::Lambda, l, c));
            acc.add(&m)
        })
    })
}

fn series() -> impl Strategy<Value = LaurentWindow<ParamPoly>> {
    (
        -3i64..=0,
        3i64..=6,
        proptest::collection::vec((-3i64..=6, small_rat()), 0..5),
    )
        .prop_map(|(low, high, terms)| {
            let mut s = LaurentWindow::zero(VarSet::Z, Window::one_var(low, high));
            for (i, c) in terms {
                if i >= low && i <= high {
                    s.add_term(i, 0, ParamPoly::constant(c));
                }
            }
            s.normalize();
            s
        })
}

proptest! {
    #[test]
    fn polynomial_addition_is_a_commutative_group(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(p.add(&q), q.add(&p));
        prop_assert_eq!(p.add(&q).add(&r), p.add(&q.add(&r)));
        prop_assert!(p.sub(&p).is_zero());
        prop_assert_eq!(p.neg().neg(), p);
    }

    #[test]
    fn polynomial_multiplication_is_commutative_and_distributes(
        p in poly(), q in poly(), r in poly()
    ) {
        prop_assert_eq!(p.mul(&q), q.mul(&p));
        prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
        prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
        prop_assert_eq!(p.pow(2), p.mul(&p));
    }

    #[test]
    fn substitution_and_evaluation_are_ring_maps(
        p in poly(), q in poly(), img in poly(),
        a in small_rat(), b in small_rat()
    ) {
        prop_assert_eq!(
            p.mul(&q).substitute(Symbol::Lambda, &img),
            p.substitute(Symbol::Lambda, &img).mul(&q.substitute(Symbol::Lambda, &img))
        );
        let at = [a, b, rat_int(0), rat_int(0)];
        prop_assert_eq!(p.mul(&q).eval(&at), p.eval(&at) * q.eval(&at));
        prop_assert_eq!(p.add(&q).eval(&at), p.eval(&at) + q.eval(&at));
    }

    #[test]
    fn window_products_distribute_over_sums(f in series(), g in series(), h in series()) {
        if let (Ok(sum), Ok(fh), Ok(gh)) =
            (f.add(&g), window_mul(&f, &h), window_mul(&g, &h))
        {
            let lhs = window_mul(&sum, &h).expect("product window");
            let rhs = fh.add(&gh).expect("sum window");
            prop_assert!(lhs.eq_on_common_window(&rhs).expect("windows overlap"));
        }
    }

    #[test]
    fn window_products_agree_with_coefficient_convolution(f in series(), g in series()) {
        let p = window_mul(&f, &g).expect("series windows start at or below zero");
        for (&(i, _), c) in p.terms() {
            let mut sum = ParamPoly::zero();
            for (&(a, _), ca) in f.terms() {
                for (&(b, _), cb) in g.terms() {
                    if a + b == i {
                        sum = sum.add(&ca.mul(cb));
                    }
                }
            }
            prop_assert_eq!(c.clone(), sum);
        }
    }

    #[test]
    fn truncated_exponentials_turn_sums_into_products(
        c1 in -3i64..=3, c2 in -3i64..=3, order in 2i64..=5
    ) {
        let a = ParamPoly::monomial(Symbol::Del, 1, rat_int(c1));
        let b = ParamPoly::monomial(Symbol::Lambda, 1, rat_int(c2));
        let prod = window_mul(&truncated_exp(&a, order), &truncated_exp(&b, order))
            .expect("exponential windows overlap");
        let joint = truncated_exp(&a.add(&b), order);
        prop_assert!(prod.eq_on_common_window(&joint).expect("windows overlap"));
    }

    #[test]
    fn the_rank_one_bracket_is_bilinear(p in poly(), q in poly(), r in poly()) {
        let del_only = |x: &ParamPoly| x.substitute(Symbol::Lambda, &ParamPoly::zero());
        let vir = lca::make_virasoro();
        let m = vir.module();
        let l = ModElement::generator(m, Gen(0));
        let a = l.mul_poly(m, &del_only(&p));
        let b = l.mul_poly(m, &del_only(&q));
        let c = l.mul_poly(m, &del_only(&r));
        prop_assert_eq!(
            vir.bracket(&a.add(&b), &c),
            vir.bracket(&a, &c).add(&vir.bracket(&b, &c))
        );
        prop_assert_eq!(
            vir.bracket(&c, &a.add(&b)),
            vir.bracket(&c, &a).add(&vir.bracket(&c, &b))
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distinct_scalar_weights_decompose_directly(c1 in -4i64..=4, c2 in -4i64..=4) {
        prop_assume!(c1 != c2);
        let m = FgModule::free(&["u", "v"]);
        let u = ModElement::generator(&m, Gen(0));
        let v = ModElement::generator(&m, Gen(1));
        let f = ConformalMatrix::new(
            &m,
            vec![
                u.mul_poly(&m, &ParamPoly::monomial(Symbol::Lambda, 1, rat_int(c1))),
                v.mul_poly(&m, &ParamPoly::monomial(Symbol::Lambda, 1, rat_int(c2))),
            ],
        )
        .expect("diagonal matrix");
        let fit = fitting_decomposition(&m, &f, None, 5, 10).expect("fitting run");
        prop_assert!(fit.pairwise_direct);
        prop_assert!(fit.spans_slice);
    }

    #[test]
    fn cohomology_routes_agree_on_random_two_dimensional_modules(
        a in -3i64..=3, b in -3i64..=3, c in -3i64..=3, d in -3i64..=3
    ) {
        let mut da = QMatrix::zero(2, 2);
        da.set(0, 0, rat_int(a));
        da.set(0, 1, rat_int(b));
        da.set(1, 0, rat_int(c));
        da.set(1, 1, rat_int(d));
        let module = CoefficientModule::new(2, da).expect("module");
        let rep = cohom::h2(&module, 5).expect("h2 run");
        prop_assert!(rep.routes_agree);
        prop_assert!(rep.coboundaries_contained);
        prop_assert_eq!(rep.cocycle_dim, rep.coboundary_dim + rep.dimension);
    }
}
