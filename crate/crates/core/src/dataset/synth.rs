//! Synthetic sentences with gold spans known by construction.
//!
//! Each sentence comes from one template family. The endpoint of the
//! sentence is drawn from [`ClassWeights`], which by default follow the
//! training-set class counts, and confidence intervals appear with the
//! per-endpoint rate of those counts. The `ambiguous` family reproduces the
//! two-time-points by two-endpoints construction with the gold read the other
//! way around, so a rule tagger cannot score it perfectly.

use rand::seq::IndexedRandom;
use rand::{RngExt, SeedableRng};
use rand_xoshiro::SplitMix64;

use super::{Corpus, Document};
use crate::error::Result;
use crate::schema::{AnnotationSet, Base, EndpointClass, EntitySpan, Measure, SentenceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Simple,
    Respectively,
    Comparison,
    Combined,
    Negative,
    Ambiguous,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Simple,
        Family::Respectively,
        Family::Comparison,
        Family::Combined,
        Family::Negative,
        Family::Ambiguous,
    ];
}

/// Relative frequency of each point-value class and the probability that a
/// value of that class carries a confidence interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassWeights {
    pub entries: Vec<(Base, Measure, f64, f64)>,
}

impl Default for ClassWeights {
    fn default() -> Self {
        // value count, then mean of the CIL and CIH counts over the value count
        let rows = [
            (Base::Dfs, Measure::Duration, 2907.0, 1229.0),
            (Base::Dfs, Measure::Percent, 6847.0, 1875.0),
            (Base::Dor, Measure::Duration, 1931.0, 707.0),
            (Base::Orr, Measure::Percent, 3320.0, 522.0),
            (Base::Os, Measure::Duration, 5051.0, 1395.0),
            (Base::Os, Measure::Percent, 5805.0, 1971.5),
            (Base::Pfs, Measure::Duration, 5139.0, 1294.0),
            (Base::Pfs, Measure::Percent, 1758.0, 970.0),
        ];
        ClassWeights {
            entries: rows.iter().map(|&(b, m, v, ci)| (b, m, v, ci / v)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n: usize,
    pub seed: u64,
    pub classes: ClassWeights,
    /// Weight of each family, in [`Family::ALL`] order.
    pub families: [f64; 6],
    pub sentences_per_document: usize,
}

impl SynthConfig {
    pub fn new(n: usize, seed: u64) -> SynthConfig {
        SynthConfig {
            n,
            seed,
            classes: ClassWeights::default(),
            families: [0.40, 0.28, 0.15, 0.05, 0.09, 0.03],
            sentences_per_document: 5,
        }
    }
}

/// A sentence under construction.
#[derive(Default)]
struct Builder {
    text: String,
    len: usize,
    spans: Vec<(usize, usize, EndpointClass)>,
}

impl Builder {
    fn push(&mut self, s: &str) -> &mut Self {
        self.text.push_str(s);
        self.len += s.chars().count();
        self
    }

    fn span(&mut self, s: &str, class: EndpointClass) -> &mut Self {
        let start = self.len;
        self.push(s);
        self.spans.push((start, self.len, class));
        self
    }
}

fn class(base: Base, measure: Measure, bound: crate::schema::Bound) -> EndpointClass {
    EndpointClass::from_components(base, measure, bound).expect("supported endpoint")
}

fn point(base: Base, measure: Measure) -> EndpointClass {
    class(base, measure, crate::schema::Bound::Point)
}

struct Gen<'c> {
    rng: SplitMix64,
    config: &'c SynthConfig,
}

const ARMS: [(&str, &str); 4] = [
    ("experimental", "control"),
    ("combination", "monotherapy"),
    ("high-dose", "low-dose"),
    ("surgery", "observation"),
];

impl Gen<'_> {
    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        items.choose(&mut self.rng).expect("non-empty")
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.random::<f64>() < p
    }

    fn family(&mut self) -> Family {
        let weights = self.config.families;
        let i = (0..6).collect::<Vec<usize>>().choose_weighted(&mut self.rng, |&i| weights[i]).copied().unwrap_or(0);
        Family::ALL[i]
    }

    /// An endpoint class, optionally restricted to one measure.
    fn endpoint(&mut self, measure: Option<Measure>, exclude: &[Base]) -> (Base, Measure, f64) {
        let entries: Vec<_> = self
            .config
            .classes
            .entries
            .iter()
            .filter(|e| measure.is_none_or(|m| m == e.1) && !exclude.contains(&e.0))
            .collect();
        let e = entries.choose_weighted(&mut self.rng, |e| e.2).expect("positive class weights");
        (e.0, e.1, e.3)
    }

    fn percent(&mut self) -> f64 {
        if self.chance(0.4) {
            self.rng.random_range(5..96) as f64
        } else {
            self.rng.random_range(50..960) as f64 / 10.0
        }
    }

    fn months(&mut self) -> f64 {
        self.rng.random_range(15..600) as f64 / 10.0
    }

    fn fmt(v: f64) -> String {
        if v.fract() == 0.0 {
            format!("{v:.0}")
        } else {
            format!("{v:.1}")
        }
    }

    fn value(&mut self, measure: Measure) -> f64 {
        match measure {
            Measure::Percent => self.percent(),
            Measure::Duration => self.months(),
        }
    }

    fn mention(&mut self, base: Base, measure: Measure) -> &'static str {
        match (base, measure) {
            (Base::Os, Measure::Duration) => self.pick(&["median overall survival", "median OS", "the median overall survival (OS)"]),
            (Base::Os, Measure::Percent) => self.pick(&["overall survival", "OS"]),
            (Base::Pfs, Measure::Duration) => self.pick(&["median progression-free survival", "median PFS", "the median progression-free survival (PFS)"]),
            (Base::Pfs, Measure::Percent) => self.pick(&["progression-free survival", "PFS"]),
            (Base::Dfs, Measure::Duration) => self.pick(&["median disease-free survival", "median DFS"]),
            (Base::Dfs, Measure::Percent) => self.pick(&["disease-free survival", "DFS"]),
            (Base::Dor, _) => self.pick(&["median duration of response", "median DoR", "the median duration of response (DoR)"]),
            (Base::Orr, _) => self.pick(&["objective response rate", "overall response rate", "ORR"]),
        }
    }

    /// Bare noun form used inside coordinated lists.
    fn list_mention(base: Base) -> &'static str {
        match base {
            Base::Os => "overall survival",
            Base::Pfs => "progression-free survival",
            Base::Dfs => "disease-free survival",
            Base::Dor => "duration of response",
            Base::Orr => "objective response rate",
        }
    }

    fn ci(&mut self, b: &mut Builder, base: Base, measure: Measure, v: f64) {
        let (lo, hi) = match measure {
            Measure::Percent => {
                let lo = (v - self.rng.random_range(10..100) as f64 / 10.0).max(0.5);
                let hi = (v + self.rng.random_range(10..100) as f64 / 10.0).min(99.5);
                (lo, hi)
            }
            Measure::Duration => {
                let lo = (v - self.rng.random_range(5..60) as f64 / 10.0).max(0.1);
                let hi = v + self.rng.random_range(5..60) as f64 / 10.0;
                (lo, hi)
            }
        };
        let (lo, hi) = ((lo * 10.0).round() / 10.0, (hi * 10.0).round() / 10.0);
        let (open, close) = *self.pick(&[("(", ")"), ("[", "]")]);
        let lead = *self.pick(&["95% CI ", "95% CI, ", "95% confidence interval "]);
        let sep = *self.pick(&["-", " to "]);
        b.push(" ").push(open).push(lead);
        b.span(&Self::fmt(lo), class(base, measure, crate::schema::Bound::Cil));
        b.push(sep);
        b.span(&Self::fmt(hi), class(base, measure, crate::schema::Bound::Cih));
        b.push(close);
    }

    fn value_span(&mut self, b: &mut Builder, base: Base, measure: Measure, v: f64, unit: bool) {
        let text = match measure {
            Measure::Percent => format!("{}%", Self::fmt(v)),
            Measure::Duration if unit => format!("{} months", Self::fmt(v)),
            Measure::Duration => Self::fmt(v),
        };
        b.span(&text, point(base, measure));
    }

    fn years(&mut self) -> u32 {
        *self.pick(&[1, 2, 3, 5, 10])
    }

    fn simple(&mut self, b: &mut Builder) {
        let (base, measure, ci_rate) = self.endpoint(None, &[]);
        let v = self.value(measure);
        let lead = *self.pick(&["", "In the intention-to-treat population, ", "At the final analysis, "]);
        b.push(lead);
        let capital = lead.is_empty();
        let with_ci = self.chance(ci_rate);
        match (base, measure) {
            (Base::Orr, _) => {
                let m = self.mention(base, measure);
                b.push(&cap(&format!("the {m}"), capital)).push(" was ");
                self.value_span(b, base, measure, v, true);
            }
            (_, Measure::Percent) => {
                let m = self.mention(base, measure);
                if self.chance(0.5) {
                    let y = self.years();
                    b.push(&cap("the ", capital));
                    b.span(&format!("{y}-year"), EndpointClass::TimePoint);
                    b.push(" ").push(m).push(" rate was ");
                } else {
                    let y = self.years();
                    b.push(&cap(m, capital)).push(" at ");
                    b.span(&format!("{y} years"), EndpointClass::TimePoint);
                    b.push(" was ");
                }
                self.value_span(b, base, measure, v, true);
            }
            (_, Measure::Duration) => {
                let m = self.mention(base, measure);
                b.push(&cap(m, capital)).push(" was ");
                self.value_span(b, base, measure, v, true);
            }
        }
        if with_ci {
            self.ci(b, base, measure, v);
        }
        b.push(".");
    }

    fn respectively(&mut self, b: &mut Builder) {
        match self.rng.random_range(0..3) {
            0 => {
                // time points against values
                let (base, _, _) = self.endpoint(Some(Measure::Percent), &[Base::Orr]);
                let n = self.rng.random_range(2..5);
                let mut years: Vec<u32> = [1, 2, 3, 5, 10].sample(&mut self.rng, n).copied().collect();
                years.sort();
                b.push("The ");
                for (i, y) in years.iter().enumerate() {
                    let last = i + 1 == n;
                    b.span(&if last { format!("{y}-year") } else { format!("{y}-") }, EndpointClass::TimePoint);
                    b.push(if last {
                        ""
                    } else if i + 2 == n {
                        " and "
                    } else {
                        ", "
                    });
                }
                b.push(" ").push(Self::list_mention(base)).push(" rates were ");
                for i in 0..n {
                    let v = self.percent();
                    self.value_span(b, base, Measure::Percent, v, true);
                    b.push(if i + 1 == n {
                        ""
                    } else if i + 2 == n {
                        " and "
                    } else {
                        ", "
                    });
                }
                b.push(", respectively.");
            }
            1 => {
                // endpoint list with durations
                let (b1, _, _) = self.endpoint(Some(Measure::Duration), &[]);
                let (b2, _, _) = self.endpoint(Some(Measure::Duration), &[b1]);
                b.push("The median ").push(Self::list_mention(b1)).push(" and ").push(Self::list_mention(b2)).push(" were ");
                let (v1, v2) = (self.months(), self.months());
                self.value_span(b, b1, Measure::Duration, v1, false);
                b.push(" and ");
                self.value_span(b, b2, Measure::Duration, v2, true);
                b.push(", respectively.");
            }
            _ => {
                // endpoint list with percentages under one time point
                let (b1, _, _) = self.endpoint(Some(Measure::Percent), &[Base::Orr]);
                let (b2, _, _) = self.endpoint(Some(Measure::Percent), &[b1, Base::Orr]);
                let y = self.years();
                b.push("The ");
                b.span(&format!("{y}-year"), EndpointClass::TimePoint);
                b.push(" ").push(Self::list_mention(b1)).push(" and ").push(Self::list_mention(b2)).push(" rates were ");
                let (v1, v2) = (self.percent(), self.percent());
                self.value_span(b, b1, Measure::Percent, v1, true);
                b.push(" and ");
                self.value_span(b, b2, Measure::Percent, v2, true);
                b.push(", respectively.");
            }
        }
    }

    fn comparison(&mut self, b: &mut Builder) {
        let (base, measure, ci_rate) = self.endpoint(None, &[Base::Orr]);
        let (a1, a2) = *self.pick(&ARMS);
        let with_ci = self.chance(ci_rate);
        let (v1, v2) = (self.value(measure), self.value(measure));
        match measure {
            Measure::Duration => {
                b.push(&cap(Self::list_mention(base), true));
                b.push(&format!(" was longer in the {a1} group than in the {a2} group (median "));
                self.value_span(b, base, measure, v1, true);
                if with_ci {
                    self.ci(b, base, measure, v1);
                }
                b.push(" vs ");
                self.value_span(b, base, measure, v2, true);
                if with_ci {
                    self.ci(b, base, measure, v2);
                }
                b.push(").");
            }
            Measure::Percent => {
                let y = self.years();
                let abbr = base.as_str();
                b.push(&format!("Outcomes favoured the {a1} group over the {a2} group ("));
                b.span(&format!("{y}-year"), EndpointClass::TimePoint);
                b.push(&format!(" {abbr}: "));
                self.value_span(b, base, measure, v1, true);
                b.push(" vs. ");
                self.value_span(b, base, measure, v2, true);
                b.push(").");
            }
        }
    }

    /// Two time points by two endpoints against four values. `paired_by_group`
    /// reads each "versus" pair as one endpoint compared between groups.
    fn grid(&mut self, b: &mut Builder, paired_by_group: bool) {
        let (b1, _, _) = self.endpoint(Some(Measure::Percent), &[Base::Orr]);
        let (b2, _, _) = self.endpoint(Some(Measure::Percent), &[b1, Base::Orr]);
        let (a1, a2) = *self.pick(&ARMS);
        let (y1, y2) = *self.pick(&[(1, 3), (2, 5), (3, 5), (5, 10)]);
        b.push(&format!("In the matched {a1} and {a2} groups, the "));
        b.span(&format!("{y1}-year"), EndpointClass::TimePoint);
        b.push(" and ");
        b.span(&format!("{y2}-year"), EndpointClass::TimePoint);
        b.push(&format!(" {} and {} rates were ", b1.as_str(), b2.as_str()));
        let bases = if paired_by_group { [b1, b1, b2, b2] } else { [b1, b2, b1, b2] };
        for (i, base) in bases.iter().enumerate() {
            let v = self.percent();
            self.value_span(b, *base, Measure::Percent, v, true);
            b.push(match i {
                0 | 2 => " versus ",
                1 => " and ",
                _ => ", respectively.",
            });
        }
    }

    fn negative(&mut self, b: &mut Builder) {
        let n = self.rng.random_range(18..90);
        let d = self.rng.random_range(2..30);
        let p = self.percent();
        let sd = self.rng.random_range(5..40) as f64 / 10.0;
        let m = self.months();
        let text = match self.rng.random_range(0..5) {
            0 => format!("The median age of the patients was {n} years (range, {}-{} years).", n / 2, n + 10),
            1 => format!("Median length of hospital stay was {d} days, and the LOS exceeded {} days in {}% of cases.", d + 5, Self::fmt(p)),
            2 => format!("The median duration of treatment was {} months.", Self::fmt(m)),
            3 => format!("The mean tumour size was {} cm (standard deviation {} cm).", Self::fmt(m / 10.0 + 1.0), Self::fmt(sd)),
            _ => format!("Grade 3 or higher adverse events occurred in {}% of patients.", Self::fmt(p)),
        };
        b.push(&text);
    }
}

fn cap(s: &str, capital: bool) -> String {
    if !capital {
        return s.to_string();
    }
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// A labelled synthetic sentence and the family it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSentence {
    pub record: SentenceRecord,
    pub spans: Vec<EntitySpan>,
    pub family: Family,
}

/// The sentences in generation order. Same config, same output.
pub fn generate_sentences(config: &SynthConfig) -> Vec<SyntheticSentence> {
    let mut generator = Gen {
        rng: SplitMix64::seed_from_u64(config.seed),
        config,
    };
    let per_doc = config.sentences_per_document.max(1);
    (0..config.n)
        .map(|i| {
            let family = generator.family();
            let mut b = Builder::default();
            match family {
                Family::Simple => generator.simple(&mut b),
                Family::Respectively => generator.respectively(&mut b),
                Family::Comparison => generator.comparison(&mut b),
                Family::Combined => generator.grid(&mut b, false),
                Family::Ambiguous => generator.grid(&mut b, true),
                Family::Negative => generator.negative(&mut b),
            }
            let pmid = format!("synth{:06}", i / per_doc);
            let record = SentenceRecord::new(format!("{pmid}-{}", i % per_doc), pmid, b.text);
            let spans = b
                .spans
                .iter()
                .map(|&(s, e, c)| EntitySpan::new(&record.text, s, e, c).expect("builder offsets"))
                .collect();
            SyntheticSentence { record, spans, family }
        })
        .collect()
}

/// Corpus and gold annotations.
pub fn generate_synthetic(config: &SynthConfig) -> Result<(Corpus, AnnotationSet)> {
    let sentences = generate_sentences(config);
    let mut gold = AnnotationSet::new("synthetic");
    let mut documents: Vec<Document> = Vec::new();
    for s in sentences {
        gold.insert(&s.record, s.spans)?;
        match documents.last_mut() {
            Some(d) if d.pmid == s.record.pmid => d.sentences.push(s.record),
            _ => documents.push(Document {
                pmid: s.record.pmid.clone(),
                title: None,
                sentences: vec![s.record],
            }),
        }
    }
    Ok((Corpus::new(documents)?, gold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagger::RuleTagger;

    #[test]
    fn empty_and_deterministic() {
        let (corpus, gold) = generate_synthetic(&SynthConfig::new(0, 1)).unwrap();
        assert!(corpus.is_empty() && gold.is_empty());
        let a = generate_sentences(&SynthConfig::new(200, 9));
        assert_eq!(a, generate_sentences(&SynthConfig::new(200, 9)));
        assert_ne!(a, generate_sentences(&SynthConfig::new(200, 10)));
    }

    #[test]
    fn rule_tagger_recovers_unambiguous_families() {
        let tagger = RuleTagger::default();
        for s in generate_sentences(&SynthConfig::new(3000, 3)) {
            if s.family == Family::Ambiguous {
                continue;
            }
            assert_eq!(tagger.tag(&s.record.text).spans, s.spans, "{:?}: {}", s.family, s.record.text);
        }
    }
}
