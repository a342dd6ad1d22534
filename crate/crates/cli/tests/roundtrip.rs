use charpoly::algebra::{ExponentPair, FieldSpec, Frame, Polynomial, Scalar};
use charpoly::charpoly::BoundaryComponent;
use charpoly_cli::job::{parse_job, JobFile};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn field(k: usize) -> FieldSpec {
    match k {
        0 => FieldSpec::Rationals,
        1 => FieldSpec::prime(2).unwrap(),
        2 => FieldSpec::prime(5).unwrap(),
        _ => FieldSpec::extension(3, &[1, 0, 1]).unwrap(),
    }
}

fn scalar(f: &FieldSpec, n: i64, d: i64, t: i64) -> Scalar {
    match f {
        FieldSpec::Rationals => {
            Scalar::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
        }
        FieldSpec::Extension { .. } => f.from_coords(&[n, t]),
        _ => f.from_i64(n),
    }
}

type Term = (Vec<u32>, Vec<u32>, i64, i64, i64);

fn term() -> impl Strategy<Value = Term> {
    (
        prop::collection::vec(0u32..4, 2),
        prop::collection::vec(0u32..5, 3),
        -6i64..7,
        1i64..5,
        -2i64..3,
    )
}

fn build(fk: usize, r: usize, e: usize, gens: &[Vec<Term>], with_boundary: bool) -> JobFile {
    let ys = ["y", "z"];
    let us = ["u1", "u2", "v"];
    let frame = Frame::with_names(&ys[..r], &us[..e], field(fk)).unwrap();
    let f = frame.field.clone();
    let generators = gens
        .iter()
        .enumerate()
        .map(|(i, terms)| {
            let p = Polynomial::from_terms(
                &frame,
                terms.iter().map(|(b, a, n, d, t)| {
                    (
                        ExponentPair::new(b[..r].to_vec(), a[..e].to_vec()),
                        scalar(&f, *n, *d, *t),
                    )
                }),
            )
            .unwrap();
            (format!("f{}", i + 1), p)
        })
        .collect();
    let boundary = if with_boundary {
        vec![BoundaryComponent {
            id: "E".into(),
            l: Polynomial::u(&frame, e - 1),
            old: true,
        }]
    } else {
        Vec::new()
    };
    JobFile {
        frame,
        generators,
        boundary,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_then_parse_is_identity(
        fk in 0usize..4,
        r in 1usize..3,
        e in 1usize..4,
        gens in prop::collection::vec(prop::collection::vec(term(), 0..5), 1..3),
        with_boundary in any::<bool>(),
    ) {
        let job = build(fk, r, e, &gens, with_boundary);
        let text = job.to_string();
        let back = parse_job(&text);
        prop_assert!(back.is_ok(), "{}\n{:?}", text, back);
        let back = back.unwrap();
        prop_assert_eq!(&back, &job, "{}", text);
        prop_assert_eq!(back.to_string(), text);
    }
}
