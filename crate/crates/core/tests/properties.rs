use monodromic::filtration::monodromy_weight_filtration;
use monodromic::format::{emit, parse};
use monodromic::generate::generate_case;
use monodromic::gluing::{roundtrip_gluing, validate_gluing};
use monodromic::linalg::kernel_image;
use monodromic::{
    functor_g, int, Document, GeneratorConfig, IncreasingFiltration, Matrix, Rational, Subspace,
};
use proptest::prelude::*;

fn small_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
            Matrix::new(r, c, v.into_iter().map(int).collect()).expect("sizes match")
        })
    })
}

fn vectors(n: usize, count: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    prop::collection::vec(prop::collection::vec((-2i64..=2).prop_map(int), n), 0..=count)
}

fn strictly_upper(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-2i64..=2, n * n).prop_map(move |v| {
        Matrix::from_fn(n, n, |i, j| if j > i { int(v[i * n + j]) } else { int(0) })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(m in small_matrix(5, 5)) {
        let (k, im) = kernel_image(&m);
        prop_assert_eq!(k.dim() + im.dim(), m.cols());
        for v in k.basis_vectors() {
            prop_assert!(m.apply(&v).iter().all(|x| *x == int(0)));
        }
    }

    #[test]
    fn sum_and_intersection_dimensions(a in vectors(4, 3), b in vectors(4, 3)) {
        let (sa, sb) = (Subspace::span(4, a), Subspace::span(4, b));
        let sum = sa.sum(&sb).unwrap();
        let meet = sa.intersect(&sb).unwrap();
        prop_assert_eq!(sum.dim() + meet.dim(), sa.dim() + sb.dim());
        prop_assert!(sum.contains(&sa).unwrap() && sa.contains(&meet).unwrap());
    }

    #[test]
    fn inverse_is_two_sided(m in small_matrix(4, 4)) {
        if m.is_square() {
            if let Some(inv) = m.inverse() {
                prop_assert_eq!(&m * &inv, Matrix::identity(m.rows()));
                prop_assert_eq!(&inv * &m, Matrix::identity(m.rows()));
            } else {
                prop_assert!(m.rank() < m.rows());
            }
        }
    }

    #[test]
    fn shifts_compose(shift_a in -4i64..4, shift_b in -4i64..4, at in -3i64..3) {
        let f = IncreasingFiltration::trivial(3, at);
        prop_assert_eq!(f.shift(shift_a).shift(shift_b), f.shift(shift_a + shift_b));
    }

    #[test]
    fn weight_filtration_is_lowered_by_n(n_mat in strictly_upper(4)) {
        let w = monodromy_weight_filtration(&n_mat, 0).unwrap();
        prop_assert!(IncreasingFiltration::is_filtered(&n_mat, &w, &w, -2));
    }

    #[test]
    fn generated_cases_are_valid_and_round_trip(seed in any::<u64>(), index in 0u64..1000) {
        let cfg = GeneratorConfig { seed, ..GeneratorConfig::default() };
        let g = generate_case(&cfg, index);
        prop_assert!(validate_gluing(&g).is_empty());
        prop_assert!(roundtrip_gluing(&g).is_ok());
        let doc = Document::Gluing(g.clone());
        let text = emit(&doc);
        prop_assert_eq!(&parse(&text).unwrap(), &doc);
        prop_assert_eq!(emit(&parse(&text).unwrap()), text);
        let m = Document::Mmhm(functor_g(&g).unwrap());
        prop_assert_eq!(parse(&emit(&m)).unwrap(), m);
    }
}
