use fraclab_core::construct::{self, ConstructionExpr};
use fraclab_core::fraclp::{self, FractionalCertificate};
use fraclab_core::hall;
use fraclab_core::rational::rat;
use fraclab_core::{dimacs, Graph};
use proptest::prelude::*;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut it = bits.into_iter();
            for u in 0..n {
                for v in u + 1..n {
                    if it.next().unwrap() {
                        edges.push((u, v));
                    }
                }
            }
            Graph::new(n, edges).unwrap()
        })
    })
}

#[test]
fn certificate_json_is_bit_exact() {
    let g = construct::lex_product(&Graph::cycle(5).unwrap(), &Graph::cycle(7).unwrap());
    let cert = fraclp::chi_f(&g).unwrap();
    assert_eq!(cert.value, rat(35, 6));
    let text = serde_json::to_string(&cert).unwrap();
    let back: FractionalCertificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cert);
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
    assert_eq!(fraclp::verify_certificate(&g, &back), Ok(()));
}

#[test]
fn tampered_certificate_is_rejected() {
    let g = Graph::petersen();
    let cert = fraclp::chi_f(&g).unwrap();
    let text = serde_json::to_string(&cert).unwrap().replace(r#""num":"5","den":"2""#, r#""num":"3","den":"1""#);
    let bad: FractionalCertificate = serde_json::from_str(&text).unwrap();
    assert!(fraclp::verify_certificate(&g, &bad).is_err());
}

#[test]
fn expressions_build_the_named_graphs() {
    let grotzsch = ConstructionExpr::Mycielski(Box::new(ConstructionExpr::Cycle(5))).build().unwrap();
    assert_eq!((grotzsch.n(), grotzsch.edge_count()), (11, 20));
    let r = hall::gap_report(&grotzsch).unwrap();
    assert_eq!((r.chi_f.clone(), r.chi), (rat(29, 10), 4));
    let petersen = ConstructionExpr::Kneser(5, 2).build().unwrap();
    assert!(petersen.same_adjacency(&Graph::petersen()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dimacs_round_trip(g in arb_graph(12)) {
        let back = dimacs::parse(&dimacs::write(&g)).unwrap();
        prop_assert!(back.same_adjacency(&g));
    }

    #[test]
    fn column_generation_matches_full_enumeration(g in arb_graph(9)) {
        let cert = fraclp::chi_f(&g).unwrap();
        prop_assert_eq!(fraclp::verify_certificate(&g, &cert), Ok(()));
        prop_assert_eq!(fraclp::chi_f_full_enumeration(&g).unwrap().value, cert.value);
    }

    #[test]
    fn join_adds_fractional_chromatic_numbers(a in arb_graph(6), b in arb_graph(6)) {
        let j = fraclp::chi_f(&construct::join(&a, &b)).unwrap().value;
        let sum = fraclp::chi_f(&a).unwrap().value + fraclp::chi_f(&b).unwrap().value;
        prop_assert_eq!(j, sum);
    }
}
