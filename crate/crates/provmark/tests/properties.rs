//! Property-based invariants for the codec, the renaming variants, and the
//! parser/renderer pair.

use proptest::prelude::*;

use provmark::codec::{decode, encode, CodeId};
use provmark::rules::{apply_variants, strip_variants, VariantSet};
use provmark::SubjectProgram;

fn canonical_name() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9]{0,6}[a-z0-9]"
        .prop_filter("not a keyword", |s| {
            !provmark::pysrc::KEYWORDS.contains(&s.as_str())
        })
}

proptest! {
    #[test]
    fn ham74_round_trips_and_corrects(mbits in proptest::collection::vec(0u8..=1, 4)) {
        let cw = encode(&mbits, CodeId::Ham74).unwrap();
        prop_assert_eq!(decode(&cw, CodeId::Ham74).unwrap(), Some(mbits.clone()));
        for i in 0..cw.len() {
            let mut flipped = cw.clone();
            flipped[i] ^= 1;
            prop_assert_eq!(decode(&flipped, CodeId::Ham74).unwrap(), Some(mbits.clone()));
        }
    }

    #[test]
    fn variant_application_strips_back(name in canonical_name(), states in proptest::collection::vec(0u8..=1, 3)) {
        let set = VariantSet::from_states([states[0], states[1], states[2]]);
        let suffixes = ["_val".to_string(), "_obj".to_string(), "_item".to_string(), "_tmp".to_string()];
        let renamed = apply_variants(&name, set, &suffixes);
        let (stripped, recovered) = strip_variants(&renamed, &suffixes);
        prop_assert_eq!(&stripped, &name);
        prop_assert_eq!(recovered, set);
    }

    #[test]
    fn render_parse_is_a_fixed_point(
        fname in canonical_name(),
        var in canonical_name(),
        consts in proptest::collection::vec(0i64..100, 1..20),
    ) {
        prop_assume!(fname != var);
        let mut src = format!("def {fname}({var}):\n    acc = 0\n");
        for c in &consts {
            src.push_str(&format!("    acc = acc + {c}\n"));
        }
        src.push_str(&format!("    return acc + {var}\n"));
        let p1 = SubjectProgram::parse(&src, "<gen>").unwrap();
        let p2 = SubjectProgram::parse(&p1.text, "<gen>").unwrap();
        prop_assert_eq!(&p1.text, &p2.text);
        prop_assert!(provmark::pysrc::isomorphic(&p1.tree, &p2.tree));
    }
}
