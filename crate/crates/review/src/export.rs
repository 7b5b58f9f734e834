use std::collections::BTreeMap;
use std::str::FromStr;

use oncoextract::resolver::{write_observations, EndpointObservation};
use oncoextract::tagger::write_annotations;
use serde::Deserialize;

use crate::state::ReviewState;

pub const RECONCILED_FILE: &str = "reconciled.jsonl";
pub const OBSERVATIONS_FILE: &str = "observations.tsv";
pub const SELECTED_FILE: &str = "selected_observations.tsv";
pub const SELECTIONS_FILE: &str = "selections.jsonl";
pub const LOG_EXPORT_FILE: &str = "log.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportView {
    ReconciledAnnotations,
    SelectedObservations,
    Full,
}

impl FromStr for ExportView {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "reconciled_annotations" => Ok(ExportView::ReconciledAnnotations),
            "selected_observations" => Ok(ExportView::SelectedObservations),
            "full" => Ok(ExportView::Full),
            other => Err(format!("unknown export view `{other}`")),
        }
    }
}

fn utf8(bytes: Vec<u8>) -> String {
    String::from_utf8(bytes).expect("exports are written from strings")
}

fn reconciled_file(state: &ReviewState) -> String {
    let mut out = Vec::new();
    write_annotations(state.reconciled(), state.corpus(), &mut out).expect("in-memory write");
    utf8(out)
}

fn observations_file<'a>(observations: impl Iterator<Item = &'a EndpointObservation>) -> String {
    let owned: Vec<EndpointObservation> = observations.cloned().collect();
    let mut out = Vec::new();
    write_observations(&owned, &mut out).expect("in-memory write");
    utf8(out)
}

fn jsonl<T: serde::Serialize>(items: impl Iterator<Item = T>) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(&item).expect("serializable"));
        out.push('\n');
    }
    out
}

/// File name to contents. Pure in `state`: the same state always gives the
/// same bytes.
pub fn export_state(state: &ReviewState, view: ExportView) -> BTreeMap<&'static str, String> {
    let selected = || observations_file(state.observations().filter(|o| state.selections().contains_key(&o.id)));
    let mut files = BTreeMap::new();
    match view {
        ExportView::ReconciledAnnotations => {
            files.insert(RECONCILED_FILE, reconciled_file(state));
        }
        ExportView::SelectedObservations => {
            files.insert(SELECTED_FILE, selected());
        }
        ExportView::Full => {
            files.insert(RECONCILED_FILE, reconciled_file(state));
            files.insert(OBSERVATIONS_FILE, observations_file(state.observations()));
            files.insert(SELECTED_FILE, selected());
            files.insert(
                SELECTIONS_FILE,
                jsonl(state.selections().iter().map(|(id, s)| {
                    serde_json::json!({"observation_id": id, "selected": s.selected, "reviewer": s.reviewer})
                })),
            );
            files.insert(LOG_EXPORT_FILE, jsonl(state.log().iter()));
        }
    }
    files
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{Action, Correction, SelectionMark, SpanRef};
    use oncoextract::dataset::Corpus;
    use oncoextract::resolver::OBSERVATION_COLUMNS;
    use oncoextract::schema::{AnnotationSet, EndpointClass, EntitySpan, SentenceRecord};

    const TEXT: &str = "The 1-, 2- and 3-year OS rates were 90%, 80% and 70%.";

    fn state() -> ReviewState {
        let s = SentenceRecord::new("1-0", "1", TEXT);
        let corpus = Corpus::from_sentences(vec![s.clone()]).unwrap();
        let mut set = AnnotationSet::new("a");
        let find = |needle: &str, class| {
            let start = TEXT.find(needle).unwrap();
            EntitySpan::new(TEXT, start, start + needle.len(), class).unwrap()
        };
        set.insert(
            &s,
            vec![
                find("1", EndpointClass::TimePoint),
                find("2", EndpointClass::TimePoint),
                find("3-year", EndpointClass::TimePoint),
                find("90%", EndpointClass::OsPercent),
                find("80%", EndpointClass::OsPercent),
                find("70%", EndpointClass::OsPercent),
            ],
        )
        .unwrap();
        ReviewState::new(corpus, vec![set]).unwrap()
    }

    #[test]
    fn empty_state_exports_valid_files() {
        let state = ReviewState::new(Corpus::default(), vec![]).unwrap();
        let files = export_state(&state, ExportView::Full);
        assert_eq!(files[RECONCILED_FILE], "");
        assert_eq!(files[OBSERVATIONS_FILE], format!("{}\n", OBSERVATION_COLUMNS.join("\t")));
        assert_eq!(files[SELECTED_FILE], files[OBSERVATIONS_FILE]);
        assert_eq!(files[LOG_EXPORT_FILE], "");
    }

    #[test]
    fn selected_view_holds_only_the_selection() {
        let state = state();
        let ids: Vec<String> = state.observations().map(|o| o.id.clone()).collect();
        assert_eq!(ids.len(), 3);
        let picked = state
            .mark_selection(
                None,
                SelectionMark {
                    observation_id: ids[1].clone(),
                    selected: true,
                    reviewer: "sme".into(),
                    timestamp: "t".into(),
                },
            )
            .unwrap();
        let tsv = &export_state(&picked, ExportView::SelectedObservations)[SELECTED_FILE];
        let rows: Vec<&str> = tsv.lines().skip(1).collect();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].starts_with("1\t1-0\tOS\tpercent\t80\t"), "{}", rows[0]);
        let full = export_state(&picked, ExportView::Full);
        assert_eq!(full[LOG_EXPORT_FILE].lines().count(), 1);
    }

    #[test]
    fn one_correction_changes_exactly_one_span() {
        let base = state();
        let start = TEXT.find("70%").unwrap();
        let next = base
            .apply_correction(
                0,
                Correction {
                    sentence_id: "1-0".into(),
                    action: Action::Remove,
                    span: SpanRef {
                        start,
                        end: start + 3,
                        label: EndpointClass::OsPercent,
                    },
                    author: "a".into(),
                    timestamp: "t".into(),
                },
            )
            .unwrap();
        let before = &export_state(&base, ExportView::ReconciledAnnotations)[RECONCILED_FILE];
        let after = &export_state(&next, ExportView::ReconciledAnnotations)[RECONCILED_FILE];
        let parse = |s: &str| -> Vec<serde_json::Value> {
            let v: serde_json::Value = serde_json::from_str(s.trim()).unwrap();
            v["spans"].as_array().unwrap().clone()
        };
        let (a, b) = (parse(before), parse(after));
        assert_eq!(a.len(), b.len() + 1);
        let gone: Vec<_> = a.iter().filter(|x| !b.contains(x)).collect();
        assert_eq!(gone, vec![&serde_json::json!([start, start + 3, "OS_percent"])]);
        assert_eq!(export_state(&next, ExportView::Full), export_state(&next, ExportView::Full));
    }
}
