//! The 25-class endpoint label inventory and the span / sentence /
//! annotation data model shared by every other module.
//!
//! Offsets everywhere are counted in Unicode scalar values (`char`s), not
//! bytes, so they can be exchanged with annotation tools unchanged.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Base efficacy endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Base {
    #[serde(rename = "OS")]
    Os,
    #[serde(rename = "PFS")]
    Pfs,
    #[serde(rename = "DFS")]
    Dfs,
    #[serde(rename = "ORR")]
    Orr,
    #[serde(rename = "DoR")]
    Dor,
}

impl Base {
    pub const ALL: [Base; 5] = [Base::Os, Base::Pfs, Base::Dfs, Base::Orr, Base::Dor];

    pub fn as_str(self) -> &'static str {
        match self {
            Base::Os => "OS",
            Base::Pfs => "PFS",
            Base::Dfs => "DFS",
            Base::Orr => "ORR",
            Base::Dor => "DoR",
        }
    }

    /// `None` when the endpoint can be reported either way.
    pub fn fixed_measure(self) -> Option<Measure> {
        match self {
            Base::Orr => Some(Measure::Percent),
            Base::Dor => Some(Measure::Duration),
            _ => None,
        }
    }

    pub fn supports(self, measure: Measure) -> bool {
        self.fixed_measure().is_none_or(|m| m == measure)
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Base {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Base::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::UnknownClass(s.to_string()))
    }
}

/// How an endpoint value is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Duration,
    Percent,
}

impl Measure {
    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Duration => "duration",
            Measure::Percent => "percent",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which number of an endpoint mention a span carries: the value itself or a
/// confidence interval bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Bound {
    Point,
    #[serde(rename = "CIL")]
    Cil,
    #[serde(rename = "CIH")]
    Cih,
}

/// Decomposition of an [`EndpointClass`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Components {
    Endpoint {
        base: Base,
        measure: Measure,
        bound: Bound,
    },
    TimePoint,
}

macro_rules! endpoint_classes {
    ($($variant:ident = $name:literal => $comp:expr),+ $(,)?) => {
        /// One of the 25 label classes.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum EndpointClass {
            $($variant),+
        }

        impl EndpointClass {
            /// All classes in canonical (table) order.
            pub const ALL: [EndpointClass; 25] = [$(EndpointClass::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $(EndpointClass::$variant => $name),+
                }
            }

            pub fn components(self) -> Components {
                use Base::*;
                use Bound::*;
                use Measure::*;
                #[allow(unused_imports)]
                use Components::TimePoint;
                match self {
                    $(EndpointClass::$variant => $comp),+
                }
            }
        }
    };
}

macro_rules! ep {
    ($base:ident, $measure:ident, $bound:ident) => {
        Components::Endpoint {
            base: $base,
            measure: $measure,
            bound: $bound,
        }
    };
}

endpoint_classes! {
    Dfs = "DFS" => ep!(Dfs, Duration, Point),
    DfsCih = "DFS_CIH" => ep!(Dfs, Duration, Cih),
    DfsCil = "DFS_CIL" => ep!(Dfs, Duration, Cil),
    DfsPercent = "DFS_percent" => ep!(Dfs, Percent, Point),
    DfsPercentCih = "DFS_percent_CIH" => ep!(Dfs, Percent, Cih),
    DfsPercentCil = "DFS_percent_CIL" => ep!(Dfs, Percent, Cil),
    Dor = "DoR" => ep!(Dor, Duration, Point),
    DorCih = "DoR_CIH" => ep!(Dor, Duration, Cih),
    DorCil = "DoR_CIL" => ep!(Dor, Duration, Cil),
    Orr = "ORR" => ep!(Orr, Percent, Point),
    OrrCih = "ORR_CIH" => ep!(Orr, Percent, Cih),
    OrrCil = "ORR_CIL" => ep!(Orr, Percent, Cil),
    Os = "OS" => ep!(Os, Duration, Point),
    OsCih = "OS_CIH" => ep!(Os, Duration, Cih),
    OsCil = "OS_CIL" => ep!(Os, Duration, Cil),
    OsPercent = "OS_percent" => ep!(Os, Percent, Point),
    OsPercentCih = "OS_percent_CIH" => ep!(Os, Percent, Cih),
    OsPercentCil = "OS_percent_CIL" => ep!(Os, Percent, Cil),
    Pfs = "PFS" => ep!(Pfs, Duration, Point),
    PfsCih = "PFS_CIH" => ep!(Pfs, Duration, Cih),
    PfsCil = "PFS_CIL" => ep!(Pfs, Duration, Cil),
    PfsPercent = "PFS_percent" => ep!(Pfs, Percent, Point),
    PfsPercentCih = "PFS_percent_CIH" => ep!(Pfs, Percent, Cih),
    PfsPercentCil = "PFS_percent_CIL" => ep!(Pfs, Percent, Cil),
    TimePoint = "time_point" => TimePoint,
}

impl EndpointClass {
    /// Inverse of [`EndpointClass::components`] for endpoint classes. Returns
    /// `None` for combinations absent from the inventory (ORR durations, DoR
    /// percentages).
    pub fn from_components(base: Base, measure: Measure, bound: Bound) -> Option<EndpointClass> {
        EndpointClass::ALL.into_iter().find(|c| {
            c.components()
                == Components::Endpoint {
                    base,
                    measure,
                    bound,
                }
        })
    }

    pub fn is_time_point(self) -> bool {
        self == EndpointClass::TimePoint
    }

    pub fn base(self) -> Option<Base> {
        match self.components() {
            Components::Endpoint { base, .. } => Some(base),
            Components::TimePoint => None,
        }
    }

    pub fn measure(self) -> Option<Measure> {
        match self.components() {
            Components::Endpoint { measure, .. } => Some(measure),
            Components::TimePoint => None,
        }
    }

    pub fn bound(self) -> Option<Bound> {
        match self.components() {
            Components::Endpoint { bound, .. } => Some(bound),
            Components::TimePoint => None,
        }
    }

    /// A point value of an endpoint (not a CI bound, not a time point).
    pub fn is_value(self) -> bool {
        self.bound() == Some(Bound::Point)
    }

    pub fn is_interval_bound(self) -> bool {
        matches!(self.bound(), Some(Bound::Cil | Bound::Cih))
    }
}

/// The inventory in canonical order.
pub fn enumerate_classes() -> Vec<EndpointClass> {
    EndpointClass::ALL.to_vec()
}

/// Exact, case-sensitive lookup of a class name.
pub fn parse_class(name: &str) -> Result<EndpointClass> {
    EndpointClass::ALL
        .into_iter()
        .find(|c| c.name() == name)
        .ok_or_else(|| Error::UnknownClass(name.to_string()))
}

pub fn class_components(class: EndpointClass) -> Components {
    class.components()
}

impl fmt::Display for EndpointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EndpointClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_class(s)
    }
}

impl Serialize for EndpointClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for EndpointClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        parse_class(&name).map_err(serde::de::Error::custom)
    }
}

/// Number of chars in `text`.
pub fn char_len(text: &str) -> usize {
    text.chars().count()
}

/// The substring covering chars `[start, end)`, or `None` when out of range.
pub fn char_slice(text: &str, start: usize, end: usize) -> Option<&str> {
    if start > end {
        return None;
    }
    let mut indices = text.char_indices().map(|(i, _)| i).chain(std::iter::once(text.len()));
    let byte_start = indices.nth(start)?;
    let byte_end = if end == start {
        byte_start
    } else {
        indices.nth(end - start - 1)?
    };
    Some(&text[byte_start..byte_end])
}

/// A labelled character span of one sentence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "label")]
    pub class: EndpointClass,
    pub surface: String,
}

impl EntitySpan {
    /// Builds a span over `text`, checking bounds and copying the surface.
    pub fn new(text: &str, start: usize, end: usize, class: EndpointClass) -> Result<Self> {
        let len = char_len(text);
        if start >= end || end > len {
            return Err(Error::OffsetOutOfBounds {
                sentence_id: String::new(),
                start,
                end,
                len,
            });
        }
        let surface = char_slice(text, start, end).unwrap_or_default().to_string();
        Ok(EntitySpan {
            start,
            end,
            class,
            surface,
        })
    }

    pub fn range(&self) -> (usize, usize) {
        (self.start, self.end)
    }

    pub fn overlaps(&self, other: &EntitySpan) -> bool {
        self.start < other.end && other.start < self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Section {
    Abstract,
    FullText,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub sentence_id: String,
    pub pmid: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<Section>,
}

impl SentenceRecord {
    pub fn new(sentence_id: impl Into<String>, pmid: impl Into<String>, text: impl Into<String>) -> Self {
        SentenceRecord {
            sentence_id: sentence_id.into(),
            pmid: pmid.into(),
            text: text.into(),
            section: None,
        }
    }
}

/// Checks the per-sentence span invariants and returns the spans sorted and
/// deduplicated. Surfaces are recomputed from `text`.
pub fn normalize_spans(sentence_id: &str, text: &str, spans: Vec<EntitySpan>) -> Result<Vec<EntitySpan>> {
    let len = char_len(text);
    let mut out = Vec::with_capacity(spans.len());
    for span in spans {
        if span.start >= span.end || span.end > len {
            return Err(Error::OffsetOutOfBounds {
                sentence_id: sentence_id.to_string(),
                start: span.start,
                end: span.end,
                len,
            });
        }
        let surface = char_slice(text, span.start, span.end).unwrap_or_default().to_string();
        out.push(EntitySpan { surface, ..span });
    }
    out.sort();
    out.dedup();
    for pair in out.windows(2) {
        if pair[0].overlaps(&pair[1]) {
            return Err(Error::OverlappingSpans {
                sentence_id: sentence_id.to_string(),
                first: pair[0].range(),
                second: pair[1].range(),
            });
        }
    }
    Ok(out)
}

/// All spans for a corpus from one source (a labeller, the rule tagger or an
/// external model). Per-sentence spans are kept sorted and non-overlapping.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub source: String,
    entries: BTreeMap<String, Vec<EntitySpan>>,
}

impl AnnotationSet {
    pub fn new(source: impl Into<String>) -> Self {
        AnnotationSet {
            source: source.into(),
            entries: BTreeMap::new(),
        }
    }

    /// Replaces the spans recorded for `sentence`.
    pub fn insert(&mut self, sentence: &SentenceRecord, spans: Vec<EntitySpan>) -> Result<()> {
        let spans = normalize_spans(&sentence.sentence_id, &sentence.text, spans)?;
        self.entries.insert(sentence.sentence_id.clone(), spans);
        Ok(())
    }

    pub fn get(&self, sentence_id: &str) -> &[EntitySpan] {
        self.entries.get(sentence_id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, sentence_id: &str) -> bool {
        self.entries.contains_key(sentence_id)
    }

    pub fn sentence_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[EntitySpan])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn span_count(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks every entry against the sentences of `corpus`.
    pub fn validate_against(&self, corpus: &crate::dataset::Corpus) -> Result<()> {
        for (sid, spans) in &self.entries {
            let sentence = corpus
                .sentence(sid)
                .ok_or_else(|| Error::CorpusMismatch(format!("sentence `{sid}` of source `{}` is not in the corpus", self.source)))?;
            let normalized = normalize_spans(sid, &sentence.text, spans.clone())?;
            if &normalized != spans {
                return Err(Error::CorpusMismatch(format!(
                    "spans of `{sid}` in source `{}` do not match the sentence text",
                    self.source
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_names() {
        let c = parse_class("OS_percent_CIH").unwrap();
        assert_eq!(
            c.components(),
            Components::Endpoint {
                base: Base::Os,
                measure: Measure::Percent,
                bound: Bound::Cih
            }
        );
        assert_eq!(parse_class("time_point").unwrap().components(), Components::TimePoint);
        assert_eq!(parse_class("DoR_percent"), Err(Error::UnknownClass("DoR_percent".into())));
        assert!(parse_class("os").is_err());
        assert!(parse_class("OS_PCT").is_err());
    }

    #[test]
    fn bare_names_decompose() {
        assert_eq!(
            class_components(EndpointClass::Os),
            Components::Endpoint {
                base: Base::Os,
                measure: Measure::Duration,
                bound: Bound::Point
            }
        );
        assert_eq!(
            class_components(parse_class("DFS_percent_CIL").unwrap()),
            Components::Endpoint {
                base: Base::Dfs,
                measure: Measure::Percent,
                bound: Bound::Cil
            }
        );
        assert_eq!(
            class_components(EndpointClass::Orr),
            Components::Endpoint {
                base: Base::Orr,
                measure: Measure::Percent,
                bound: Bound::Point
            }
        );
    }

    #[test]
    fn inventory_order() {
        let all = enumerate_classes();
        assert_eq!(all.len(), 25);
        assert_eq!(all[0], EndpointClass::Dfs);
        assert_eq!(all[24], EndpointClass::TimePoint);
    }

    #[test]
    fn fixed_measures_hold() {
        for c in enumerate_classes() {
            match c.components() {
                Components::Endpoint { base: Base::Orr, measure, .. } => assert_eq!(measure, Measure::Percent),
                Components::Endpoint { base: Base::Dor, measure, .. } => assert_eq!(measure, Measure::Duration),
                _ => {}
            }
        }
        assert_eq!(EndpointClass::from_components(Base::Orr, Measure::Duration, Bound::Point), None);
        assert_eq!(EndpointClass::from_components(Base::Dor, Measure::Percent, Bound::Cil), None);
    }

    #[test]
    fn round_trip_and_mutations() {
        let all = enumerate_classes();
        let names: Vec<&str> = all.iter().map(|c| c.name()).collect();
        for c in &all {
            assert_eq!(parse_class(c.name()).unwrap(), *c);
            let name: Vec<char> = c.name().chars().collect();
            for i in 0..name.len() {
                for replacement in ['a', 'Z', '_', '0', 'x'] {
                    if name[i] == replacement {
                        continue;
                    }
                    let mut mutated = name.clone();
                    mutated[i] = replacement;
                    let mutated: String = mutated.into_iter().collect();
                    if !names.contains(&mutated.as_str()) {
                        assert!(parse_class(&mutated).is_err(), "{mutated}");
                    }
                }
                let mut deleted = name.clone();
                deleted.remove(i);
                let deleted: String = deleted.into_iter().collect();
                if !names.contains(&deleted.as_str()) {
                    assert!(parse_class(&deleted).is_err(), "{deleted}");
                }
            }
        }
    }

    #[test]
    fn components_injective() {
        let endpoints: Vec<_> = enumerate_classes().into_iter().filter(|c| !c.is_time_point()).collect();
        for (i, a) in endpoints.iter().enumerate() {
            for b in &endpoints[i + 1..] {
                assert_ne!(a.components(), b.components());
            }
            let Components::Endpoint { base, measure, bound } = a.components() else {
                unreachable!()
            };
            assert_eq!(EndpointClass::from_components(base, measure, bound), Some(*a));
        }
    }

    #[test]
    fn char_slicing() {
        let text = "OS – 5·year";
        assert_eq!(char_slice(text, 0, 2), Some("OS"));
        assert_eq!(char_slice(text, 3, 4), Some("–"));
        assert_eq!(char_slice(text, 5, 11), Some("5·year"));
        assert_eq!(char_slice(text, 5, 12), None);
        assert_eq!(char_slice(text, 11, 11), Some(""));
    }

    #[test]
    fn annotation_set_rejects_overlap() {
        let s = SentenceRecord::new("s1", "1", "Median OS was 14.1 months");
        let mut set = AnnotationSet::new("a");
        let a = EntitySpan::new(&s.text, 14, 25, EndpointClass::Os).unwrap();
        let b = EntitySpan::new(&s.text, 20, 25, EndpointClass::Os).unwrap();
        assert!(matches!(set.insert(&s, vec![a.clone(), b]), Err(Error::OverlappingSpans { .. })));
        set.insert(&s, vec![a.clone(), a.clone()]).unwrap();
        assert_eq!(set.get("s1"), &[a]);
        assert_eq!(set.get("s1")[0].surface, "14.1 months");
    }
}
