//! Counterexample documents carry everything needed to recompute them.

use conductor_core::corpus::Corpus;
use conductor_core::suite::{self, Counterexample, Suite};
use serde_json::Value;

#[test]
fn every_suite_round_trips_and_replays() {
    let corpus = Corpus::shipped();
    for s in Suite::ALL {
        let run = suite::run_suite(s, &corpus, 12, 99);
        assert!(!run.outcomes.is_empty(), "{s}");
        for o in &run.outcomes {
            let text = serde_json::to_string(&o.counterexample()).unwrap();
            let doc: Counterexample = serde_json::from_str(&text).unwrap();
            assert_eq!(&doc.outcome, o);
            assert_eq!(&suite::replay(&doc).unwrap(), o, "{s} item {}", o.index);
        }
    }
}

#[test]
fn dropping_any_case_field_is_rejected() {
    let corpus = Corpus::shipped();
    for s in Suite::ALL {
        let run = suite::run_suite(s, &corpus, 4, 5);
        let o = &run.outcomes[0];
        let full: Value = serde_json::to_value(o.counterexample()).unwrap();
        let keys: Vec<String> = full["case"].as_object().unwrap().keys().cloned().collect();
        for k in keys {
            let mut v = full.clone();
            v["case"].as_object_mut().unwrap().remove(&k);
            assert!(
                serde_json::from_value::<Counterexample>(v).is_err(),
                "{s}: case parses without `{k}`"
            );
        }
        let mut v = full.clone();
        v.as_object_mut().unwrap().remove("version");
        assert!(serde_json::from_value::<Counterexample>(v).is_err(), "{s}: no version");
    }
}
