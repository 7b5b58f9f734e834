use std::collections::{BTreeSet, HashSet};

use oncoextract::dataset::{generate_sentences, kfold, split_pmid_disjoint, Family, SynthConfig};
use oncoextract::eval::{agreement, score};
use oncoextract::lexical::tokenize;
use oncoextract::library::QueryLibrary;
use oncoextract::pattern::{compile, filter_corpus, QueryEnsemble};
use oncoextract::resolver::resolve_sentence;
use oncoextract::schema::{normalize_spans, AnnotationSet, EntitySpan, Measure, SentenceRecord};
use oncoextract::tagger::{decode, encode, RuleTagger};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

mod common;
use common::gen;

fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn bio_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let text = gen::sentence(&mut r);
        let spans = gen::legal_spans(&mut r, &text, 12);
        let tokens = tokenize(&text);
        let tags = encode(&spans, &tokens).unwrap();
        let (back, notes) = decode(&tags, &tokens, &text);
        prop_assert!(notes.is_empty());
        prop_assert_eq!(back, spans);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rule_tag_output_is_a_legal_span_set(seed in any::<u64>()) {
        let mut r = rng(seed);
        let text = gen::sentence(&mut r);
        let tagger = RuleTagger::default();
        let spans = tagger.tag(&text).spans;
        prop_assert_eq!(normalize_spans("s", &text, spans.clone()).unwrap(), spans);
    }

    #[test]
    fn resolver_conserves_values(seed in any::<u64>()) {
        let mut r = rng(seed);
        let text = gen::sentence(&mut r);
        let spans = gen::legal_spans(&mut r, &text, 10);
        let sentence = SentenceRecord::new("s", "p", text);
        let (obs, diags) = resolve_sentence(&sentence, &spans);
        let cited: HashSet<(usize, usize)> = diags.issues.iter().flat_map(|i| i.spans.iter().copied()).collect();
        let observed: HashSet<(usize, usize)> = obs.iter().map(|o| o.provenance.spans[0]).collect();
        let values: Vec<&EntitySpan> = spans.iter().filter(|s| s.class.is_value()).collect();
        prop_assert_eq!(observed.len(), obs.len());
        let cited_values = values.iter().filter(|v| cited.contains(&v.range())).count();
        prop_assert_eq!(values.len(), obs.len() + cited_values);
        for v in &values {
            prop_assert!(observed.contains(&v.range()) != cited.contains(&v.range()), "{:?}", v);
        }
        // every endpoint span ends up somewhere
        let used: HashSet<(usize, usize)> = obs.iter().flat_map(|o| o.provenance.spans.iter().copied()).collect();
        for s in &spans {
            prop_assert!(used.contains(&s.range()) || cited.contains(&s.range()), "{:?}", s);
        }
        for o in &obs {
            if let (Some(lo), Some(hi)) = (o.ci_low, o.ci_high) {
                prop_assert!(lo.value() <= hi.value());
            }
            prop_assert_eq!(o.unit.is_time(), o.measure == Measure::Duration);
        }
        prop_assert_eq!(resolve_sentence(&sentence, &spans), (obs, diags));
    }

    #[test]
    fn consistent_ci_brackets_value(seed in any::<u64>()) {
        // synthetic gold has every value inside its interval
        let sentences = generate_sentences(&SynthConfig::new(5, seed));
        for s in sentences {
            let (obs, _) = resolve_sentence(&s.record, &s.spans);
            for o in obs {
                if let (Some(lo), Some(hi)) = (o.ci_low, o.ci_high) {
                    prop_assert!(lo.value() <= o.value.value() && o.value.value() <= hi.value(), "{}", s.record.text);
                }
            }
        }
    }

    #[test]
    fn negatives_never_grow_the_filtered_corpus(seed in any::<u64>(), extra in 0usize..6) {
        let pool = [
            r#""median" "age""#,
            r#""length" "of" "stay""#,
            r#"="LOS""#,
            r#""standard" "deviation""#,
            r#"PCT"#,
            r#""versus""#,
        ];
        let sentences: Vec<SentenceRecord> = generate_sentences(&SynthConfig::new(40, seed)).into_iter().map(|s| s.record).collect();
        let lib = QueryLibrary::builtin();
        let base = lib.endpoints.clone();
        let mut more = base.clone();
        for e in more.iter_mut() {
            e.negative.push(compile(pool[extra]).unwrap());
        }
        let before = filter_corpus(&base, sentences.clone()).count();
        let after = filter_corpus(&more, sentences.clone()).count();
        prop_assert!(after <= before);
        let fresh = QueryEnsemble::new("x", vec![compile(r#""survival""#).unwrap()], vec![]).unwrap();
        let mut fresh_neg = fresh.clone();
        fresh_neg.negative.push(compile(pool[extra]).unwrap());
        prop_assert!(filter_corpus(&[fresh_neg], sentences.clone()).count() <= filter_corpus(&[fresh], sentences).count());
    }

    #[test]
    fn score_matches_oracle(seed in any::<u64>()) {
        let (corpus, gold, pred) = gen::scoring_instance(&mut rng(seed), 20, 8);
        prop_assert_eq!(gen::check_against_oracle(&corpus, &gold, &pred), Ok(()));
    }

    #[test]
    fn swapping_gold_and_pred_swaps_precision_and_recall(seed in any::<u64>()) {
        let (corpus, gold, pred) = gen::scoring_instance(&mut rng(seed), 8, 6);
        let a = score(&gold, &pred, &corpus);
        let b = score(&pred, &gold, &corpus);
        for (class, row) in &a.rows {
            let other = b.rows[class];
            prop_assert!((row.precision - other.recall).abs() < 1e-12);
            prop_assert!((row.recall - other.precision).abs() < 1e-12);
        }
    }

    #[test]
    fn agreement_is_symmetric(seed in any::<u64>()) {
        let (corpus, gold, pred) = gen::scoring_instance(&mut rng(seed), 8, 6);
        let ab = agreement(&gold, &pred, &corpus).unwrap();
        let ba = agreement(&pred, &gold, &corpus).unwrap();
        prop_assert_eq!(ab.token_agreement, ba.token_agreement);
        prop_assert!((0.0..=1.0).contains(&ab.token_agreement));
        prop_assert_eq!(ab.disagreeing_sentences.is_empty(), ab.token_agreement == 1.0);
    }

    #[test]
    fn matching_an_unmatched_gold_span_raises_recall(seed in any::<u64>()) {
        let (corpus, gold, pred) = gen::scoring_instance(&mut rng(seed), 6, 6);
        for s in corpus.sentences() {
            let p = pred.get(&s.sentence_id);
            let Some(missing) = gold.get(&s.sentence_id).iter().find(|g| !p.contains(g)) else { continue };
            // the new span must not overlap an existing prediction
            if p.iter().any(|x| x.overlaps(missing)) {
                continue;
            }
            let before = score(&gold, &pred, &corpus).rows[&missing.class].recall;
            let mut more = pred.clone();
            let mut spans = p.to_vec();
            spans.push(missing.clone());
            more.insert(s, spans).unwrap();
            let after = score(&gold, &more, &corpus).rows[&missing.class].recall;
            prop_assert!(after > before);
            break;
        }
    }

    #[test]
    fn pmid_split_is_disjoint(seed in any::<u64>(), n in 0usize..60) {
        let mut r = rng(seed);
        use rand::RngExt;
        let sentences: Vec<SentenceRecord> = (0..n).map(|i| {
            let pmid = format!("p{}", r.random_range(0..8));
            SentenceRecord::new(format!("{pmid}-{i}"), pmid, "x")
        }).collect();
        let test: BTreeSet<String> = (0..8).filter(|_| r.random_bool(0.4)).map(|i| format!("p{i}")).collect();
        let (train, held) = split_pmid_disjoint(sentences.clone(), &test);
        let a: HashSet<_> = train.iter().map(|s| &s.pmid).collect();
        let b: HashSet<_> = held.iter().map(|s| &s.pmid).collect();
        prop_assert!(a.is_disjoint(&b));
        prop_assert_eq!(train.len() + held.len(), n);
    }

    #[test]
    fn kfold_partitions(seed in any::<u64>(), n in 2usize..300, k in 2usize..10) {
        prop_assume!(k <= n);
        let items: Vec<usize> = (0..n).collect();
        let folds = kfold(&items, k, seed).unwrap();
        prop_assert_eq!(folds.len(), k);
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let mut all = folds.concat();
        all.sort();
        prop_assert_eq!(all, items.clone());
        prop_assert_eq!(kfold(&items, k, seed).unwrap(), folds);
    }

    #[test]
    fn synthetic_gold_is_legal_and_resolves_cleanly(seed in any::<u64>()) {
        for s in generate_sentences(&SynthConfig::new(10, seed)) {
            let mut set = AnnotationSet::new("g");
            set.insert(&s.record, s.spans.clone()).unwrap();
            let (_, diags) = resolve_sentence(&s.record, &s.spans);
            match s.family {
                Family::Combined | Family::Ambiguous => prop_assert!(!diags.is_empty()),
                _ => prop_assert!(diags.is_empty(), "{:?} {}: {:?}", s.family, s.record.text, diags),
            }
        }
    }
}
