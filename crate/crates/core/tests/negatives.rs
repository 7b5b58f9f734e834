use oncoextract::tagger::RuleTagger;

mod common;
use common::negatives::{NEAR_MISSES, NEGATIVES};

#[test]
fn confusion_families_yield_no_spans() {
    let tagger = RuleTagger::default();
    for (family, text) in NEGATIVES {
        let out = tagger.tag(text);
        assert!(out.spans.is_empty(), "{family}: {text} -> {:?}", out.spans);
    }
    for text in NEAR_MISSES {
        assert!(tagger.tag(text).spans.is_empty(), "{text}");
    }
    for family in ["age", "los", "median_duration", "deviation", "bare_percent"] {
        assert!(NEGATIVES.iter().filter(|(f, _)| *f == family).count() >= 4);
    }
}

#[test]
fn library_filter_rejects_confusion_families() {
    let lib = oncoextract::library::QueryLibrary::builtin();
    let passed: Vec<_> = NEGATIVES.iter().filter(|(_, t)| oncoextract::pattern::sentence_passes(&lib.endpoints, t)).collect();
    assert!(passed.is_empty(), "{passed:#?}");
}
