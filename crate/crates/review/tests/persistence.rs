use oncoextract::dataset::Corpus;
use oncoextract::schema::{EndpointClass, SentenceRecord};
use oncoextract_review::{Action, Correction, CorpusService, ReviewError, ReviewState, SelectionMark, SpanRef};
use proptest::prelude::*;

const TEXTS: [&str; 3] = [
    "The 2-year OS was 61% and the 2-year PFS was 44%.",
    "Median OS was 21.3 months versus 17.0 months.",
    "ORR was 38% (95% CI 29-47).",
];

fn base() -> ReviewState {
    let corpus = Corpus::from_sentences(TEXTS.iter().enumerate().map(|(i, t)| SentenceRecord::new(format!("9-{i}"), "9", *t))).unwrap();
    ReviewState::new(corpus, vec![]).unwrap()
}

#[derive(Debug, Clone)]
enum Op {
    Edit { sentence: usize, action: Action, start: usize, len: usize, class: usize },
    Select { nth: usize, selected: bool },
    Stale,
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        4 => (0usize..3, prop_oneof![Just(Action::Add), Just(Action::Remove), Just(Action::Reclass)], 0usize..45, 1usize..8, 0usize..25)
            .prop_map(|(sentence, action, start, len, class)| Op::Edit { sentence, action, start, len, class }),
        2 => (0usize..6, any::<bool>()).prop_map(|(nth, selected)| Op::Select { nth, selected }),
        1 => Just(Op::Stale),
    ]
}

fn run(service: &CorpusService, op: &Op) -> Result<(), ReviewError> {
    let state = service.state();
    match op {
        Op::Edit { sentence, action, start, len, class } => {
            let sid = format!("9-{sentence}");
            // removes and reclasses target an existing span when there is one
            let existing = state.reconciled().get(&sid).get(start % 4).cloned();
            let span = match (action, existing) {
                (Action::Remove, Some(s)) => SpanRef { start: s.start, end: s.end, label: s.class },
                (Action::Reclass, Some(s)) => SpanRef { start: s.start, end: s.end, label: EndpointClass::ALL[*class] },
                _ => SpanRef { start: *start, end: start + len, label: EndpointClass::ALL[*class] },
            };
            let c = Correction { sentence_id: sid, action: *action, span, author: "p".into(), timestamp: "t".into() };
            service.correct(state.version(), c).map(|_| ())
        }
        Op::Select { nth, selected } => {
            let Some(id) = state.observations().nth(*nth).map(|o| o.id.clone()) else {
                return Err(ReviewError::NotFound("no observation".into()));
            };
            let mark = SelectionMark { observation_id: id, selected: *selected, reviewer: "r".into(), timestamp: "t".into() };
            service.select(Some(state.version()), mark).map(|_| ())
        }
        Op::Stale => {
            let c = Correction {
                sentence_id: "9-0".into(),
                action: Action::Add,
                span: SpanRef { start: 0, end: 3, label: EndpointClass::Os },
                author: "p".into(),
                timestamp: "t".into(),
            };
            service.correct(state.version() + 1, c).map(|_| ())
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_replay_and_recovery_reproduce_state(ops in prop::collection::vec(op(), 1..40), every in 1u64..6) {
        let dir = tempfile::tempdir().unwrap();
        let base = base();
        let service = CorpusService::persistent("c", base.clone(), dir.path(), every).unwrap();
        for op in &ops {
            let before = service.state().version();
            let accepted = run(&service, op).is_ok();
            let after = service.state().version();
            // every accepted mutation adds exactly one version
            prop_assert_eq!(after, before + accepted as u64);
            if matches!(op, Op::Stale) {
                prop_assert!(!accepted);
            }
        }
        let state = service.state();
        prop_assert_eq!(state.log().len() as u64, state.version());
        let replayed = state.replay(state.log()).unwrap();
        prop_assert!(replayed.same_contents(&state));
        for sentence in state.corpus().sentences() {
            let spans = state.reconciled().get(&sentence.sentence_id);
            prop_assert!(spans.windows(2).all(|w| w[0].end <= w[1].start));
        }
        drop(service);
        let again = CorpusService::persistent("c", base, dir.path(), every).unwrap();
        prop_assert!(again.state().same_contents(&state));
    }
}
