//! The rule-based tagger.
//!
//! Values (percentages and durations) are grouped into coordinated lists and
//! each list is assigned to the nearest preceding group of endpoint mentions.
//! A list with as many values as endpoints pairs positionally; a list whose
//! length is a multiple of the endpoint count cycles through the endpoints
//! (or, for comparisons, assigns one comparison pair per endpoint). Anything
//! else is reported and left untagged.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::mentions::{Mention, MentionLabel};
use crate::lexical::{Analysis, IntervalGroup, IntervalKind, NumericKind, Token, TokenKind, Unit};
use crate::library::QueryLibrary;
use crate::pattern::MatchInput;
use crate::schema::{char_slice, Base, Bound, EndpointClass, EntitySpan, Measure, SentenceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleIssueKind {
    /// A value list could not be matched to its endpoint list.
    AmbiguousAssignment,
    /// An endpoint was paired with a measure it does not have (ORR duration).
    UnsupportedMeasure,
    /// Two candidate spans overlapped; the later one was dropped.
    Overlap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleDiagnostic {
    pub kind: RuleIssueKind,
    pub start: usize,
    pub end: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleOutput {
    pub spans: Vec<EntitySpan>,
    pub diagnostics: Vec<RuleDiagnostic>,
}

/// A rule tagger over a query library.
#[derive(Debug, Clone, Copy)]
pub struct RuleTagger<'l> {
    library: &'l QueryLibrary,
}

impl Default for RuleTagger<'static> {
    fn default() -> Self {
        RuleTagger::new(QueryLibrary::builtin())
    }
}

/// Tags one sentence with the bundled library.
pub fn rule_tag(sentence: &SentenceRecord) -> Vec<EntitySpan> {
    RuleTagger::default().tag(&sentence.text).spans
}

pub fn rule_tag_with_diagnostics(sentence: &SentenceRecord) -> RuleOutput {
    RuleTagger::default().tag(&sentence.text)
}

#[derive(Debug, Clone)]
struct Item {
    tokens: Range<usize>,
    /// Char span of the emitted value.
    span: (usize, usize),
    unit: Unit,
    bare: bool,
}

#[derive(Debug, Clone)]
struct ValueList {
    items: Vec<Item>,
    clause: usize,
    /// Per gap between items: whether a comparison cue sits there.
    comparison_gaps: Vec<bool>,
    /// Mention index the list is bound to by a `(value) mention` form.
    bound_to: Option<usize>,
}

#[derive(Debug, Clone)]
struct MentionGroup {
    members: Vec<usize>,
    clause: usize,
    end: usize,
}

fn is_list_connector(tokens: &[Token], i: usize) -> bool {
    let t = &tokens[i];
    t.is_text(",")
        || t.eq_ignore_case("and")
        || t.eq_ignore_case("or")
        || is_comparison(t)
        || (t.is_text(".") && i > 0 && tokens[i - 1].eq_ignore_case("vs"))
}

fn is_comparison(t: &Token) -> bool {
    t.eq_ignore_case("vs") || t.eq_ignore_case("versus") || t.eq_ignore_case("than")
}

fn is_group_glue(t: &Token) -> bool {
    const WORDS: [&str; 12] = ["and", "or", "as", "well", "rate", "rates", "median", "mean", "the", "estimated", "both", "respective"];
    t.is_text(",") || t.is_text("/") || WORDS.iter().any(|w| t.eq_ignore_case(w))
}

fn measure_of(unit: Unit) -> Option<Measure> {
    match unit {
        Unit::Percent => Some(Measure::Percent),
        Unit::None => None,
        _ => Some(Measure::Duration),
    }
}

struct Sentence<'a> {
    text: &'a str,
    analysis: Analysis,
    clause: Vec<usize>,
    in_anchor: Vec<bool>,
    mentions: Vec<Mention>,
    dor_context: bool,
    respectively: bool,
}

impl<'a> Sentence<'a> {
    fn tokens(&self) -> &[Token] {
        &self.analysis.tokens
    }

    fn label(&self, m: usize) -> Option<Base> {
        match self.mentions[m].label {
            MentionLabel::Endpoint(b) => Some(b),
            MentionLabel::Other => None,
            MentionLabel::ConditionalDoR => self.dor_context.then_some(Base::Dor),
        }
    }

    fn char_span(&self, r: &Range<usize>) -> (usize, usize) {
        let t = self.tokens();
        (t[r.start].start, t[r.end - 1].end)
    }
}

impl<'l> RuleTagger<'l> {
    pub fn new(library: &'l QueryLibrary) -> Self {
        RuleTagger { library }
    }

    pub fn tag(&self, text: &str) -> RuleOutput {
        let analysis = Analysis::new(text);
        let tokens = &analysis.tokens;
        let n = tokens.len();
        let mut clause = Vec::with_capacity(n);
        let mut c = 0;
        for t in tokens {
            clause.push(c);
            if t.is_text(";") {
                c += 1;
            }
        }
        let mut in_anchor = vec![false; n];
        for g in &analysis.intervals.groups {
            for t in g.anchor_tokens.clone() {
                in_anchor[t] = true;
            }
        }
        let input = MatchInput::with_numerics(tokens, &analysis.numerics);
        let mentions = merge_aliases(tokens, self.library.mentions.find(&input));
        let dor_context = self.library.endpoint(Base::Dor).is_some_and(|e| e.accepts(&input));
        let respectively = tokens.iter().any(|t| t.eq_ignore_case("respectively"));
        drop(input);
        let sentence = Sentence {
            text,
            analysis,
            clause,
            in_anchor,
            mentions,
            dor_context,
            respectively,
        };
        sentence.run()
    }
}

/// Folds `survival (OS)` into one mention.
fn merge_aliases(tokens: &[Token], mentions: Vec<Mention>) -> Vec<Mention> {
    let mut out: Vec<Mention> = Vec::with_capacity(mentions.len());
    for m in mentions {
        if let Some(prev) = out.last_mut() {
            let open = prev.tokens.end;
            let alias = m.tokens.start == open + 1
                && tokens[open].is_text("(")
                && tokens.get(m.tokens.end).is_some_and(|t| t.is_text(")"))
                && prev.label == m.label;
            if alias {
                prev.tokens.end = m.tokens.end + 1;
                continue;
            }
        }
        out.push(m);
    }
    out
}

impl<'a> Sentence<'a> {
    fn run(&self) -> RuleOutput {
        let mut out = RuleOutput::default();
        let time_points = self.time_points();
        let items = self.value_items(&time_points);
        let lists = self.value_lists(items);
        let groups = self.mention_groups();

        let mut tp_per_clause = vec![0usize; self.clause.last().map_or(0, |c| c + 1)];
        for tp in &time_points {
            tp_per_clause[self.clause[tp.start]] += 1;
        }

        let mut spans: Vec<EntitySpan> = Vec::new();
        let mut last_used: Option<(usize, Vec<usize>)> = None;
        for list in &lists {
            let g: Option<Vec<usize>> = match list.bound_to {
                Some(m) => Some(vec![m]),
                None => {
                    let start = list.items[0].tokens.start;
                    let local = groups.iter().rev().find(|g| g.clause == list.clause && g.end <= start);
                    match local {
                        Some(g) => Some(g.members.clone()),
                        None => last_used
                            .as_ref()
                            .filter(|(clause, members)| {
                                *clause < list.clause && {
                                    let rates = self
                                        .tokens()
                                        .iter()
                                        .zip(&self.clause)
                                        .any(|(t, &c)| c == list.clause && (t.eq_ignore_case("rate") || t.eq_ignore_case("rates")));
                                    tp_per_clause[list.clause] > 0 || rates || (list.items.len() == members.len() && members.len() > 1)
                                }
                            })
                            .map(|(_, m)| m.clone()),
                    }
                }
            };
            let Some(g) = g else { continue };
            if list.bound_to.is_none() {
                last_used = Some((list.clause, g.clone()));
            }
            let Some(labels) = self.assign(list, &g, tp_per_clause[list.clause], &mut out.diagnostics) else {
                continue;
            };
            for (item, base) in list.items.iter().zip(labels) {
                let Some(base) = base else { continue };
                let Some(measure) = measure_of(item.unit) else { continue };
                let Some(class) = EndpointClass::from_components(base, measure, Bound::Point) else {
                    out.diagnostics.push(RuleDiagnostic {
                        kind: RuleIssueKind::UnsupportedMeasure,
                        start: item.span.0,
                        end: item.span.1,
                        detail: format!("{base} has no {measure} form"),
                    });
                    continue;
                };
                spans.push(self.span(item.span, class));
                if let Some(ci) = self.interval_after(item) {
                    let tokens = self.tokens();
                    for (bound, (a, b)) in [(Bound::Cil, ci.low_span(tokens)), (Bound::Cih, ci.high_span(tokens))] {
                        if let Some(class) = EndpointClass::from_components(base, measure, bound) {
                            spans.push(self.span((a, b), class));
                        }
                    }
                }
            }
        }
        if !spans.is_empty() {
            for tp in &time_points {
                spans.push(self.span(self.char_span(tp), EndpointClass::TimePoint));
            }
        }
        spans.sort();
        spans.dedup();
        for span in spans {
            match out.spans.last() {
                Some(prev) if prev.overlaps(&span) => out.diagnostics.push(RuleDiagnostic {
                    kind: RuleIssueKind::Overlap,
                    start: span.start,
                    end: span.end,
                    detail: format!("{} overlaps {} at {}..{}", span.class, prev.class, prev.start, prev.end),
                }),
                _ => out.spans.push(span),
            }
        }
        out
    }

    fn span(&self, (start, end): (usize, usize), class: EndpointClass) -> EntitySpan {
        EntitySpan {
            start,
            end,
            class,
            surface: char_slice(self.text, start, end).unwrap_or_default().to_string(),
        }
    }

    /// Token ranges of time points: series elements, `at N years`, and
    /// durations directly qualifying an endpoint mention.
    fn time_points(&self) -> Vec<Range<usize>> {
        let tokens = self.tokens();
        let mut out = Vec::new();
        for m in &self.analysis.numerics {
            if m.tokens.clone().any(|t| self.in_anchor[t]) {
                continue;
            }
            let is_tp = match m.kind {
                NumericKind::TimePointSeriesElement => true,
                NumericKind::Duration => {
                    let prev = m.tokens.start.checked_sub(1).map(|p| &tokens[p]);
                    let at = prev.is_some_and(|p| ["at", "after", "by", "within"].iter().any(|w| p.eq_ignore_case(w)));
                    let before_mention = self
                        .mentions
                        .iter()
                        .enumerate()
                        .any(|(i, x)| x.tokens.start == m.tokens.end && self.label(i).is_some());
                    at || before_mention
                }
                _ => false,
            };
            if is_tp {
                out.push(m.tokens.clone());
            }
        }
        out
    }

    fn value_items(&self, time_points: &[Range<usize>]) -> Vec<Item> {
        let tokens = self.tokens();
        let numerics = &self.analysis.numerics;
        let mut out = Vec::new();
        for (idx, m) in numerics.iter().enumerate() {
            if m.tokens.clone().any(|t| self.in_anchor[t]) || time_points.iter().any(|r| r.start == m.tokens.start) {
                continue;
            }
            // unbracketed `a-b` ranges are not values
            let sep_at = |i: usize| tokens.get(i).is_some_and(|t| t.is(TokenKind::Hyphen) || t.eq_ignore_case("to"));
            let next_pair = numerics.get(idx + 1).is_some_and(|n| n.tokens.start == m.tokens.end + 1 && sep_at(m.tokens.end));
            let prev_pair = idx > 0 && numerics[idx - 1].tokens.end + 1 == m.tokens.start && sep_at(m.tokens.start - 1);
            if next_pair || prev_pair {
                continue;
            }
            match m.kind {
                NumericKind::Percent | NumericKind::Duration => out.push(Item {
                    tokens: m.tokens.clone(),
                    span: (m.start, m.end),
                    unit: m.unit,
                    bare: false,
                }),
                NumericKind::BareNumber => {
                    let before = m.tokens.start.checked_sub(1).map(|p| &tokens[p]);
                    let after = tokens.get(m.tokens.end);
                    let blocked = before.is_some_and(|t| ["=", "<", ">", "≤", "≥", "/"].iter().any(|s| t.is_text(s)) || t.is(TokenKind::Hyphen))
                        || after.is_some_and(|t| t.is_text("/"));
                    if !blocked {
                        out.push(Item {
                            tokens: m.tokens.clone(),
                            span: (m.start, m.end),
                            unit: Unit::None,
                            bare: true,
                        });
                    }
                }
                NumericKind::TimePointSeriesElement => {}
            }
        }
        out
    }

    fn mention_starting(&self, t: usize) -> Option<usize> {
        self.mentions.iter().position(|m| m.tokens.start == t)
    }

    fn value_lists(&self, items: Vec<Item>) -> Vec<ValueList> {
        let tokens = self.tokens();
        let mut lists: Vec<ValueList> = Vec::new();
        let mut current: Option<ValueList> = None;
        for item in items {
            // `(24.1%) stabilizations`: the value belongs to the next mention
            let bracketed = item.tokens.start > 0
                && tokens[item.tokens.start - 1].is_text("(")
                && tokens.get(item.tokens.end).is_some_and(|t| t.is_text(")"));
            if bracketed {
                if let Some(m) = self.mention_starting(item.tokens.end + 1) {
                    lists.extend(current.take());
                    lists.push(ValueList {
                        clause: self.clause[item.tokens.start],
                        items: vec![item],
                        comparison_gaps: Vec::new(),
                        bound_to: Some(m),
                    });
                    continue;
                }
            }
            let clause = self.clause[item.tokens.start];
            if let Some(list) = current.as_mut() {
                let prev = list.items.last().expect("non-empty list");
                let gap = prev.tokens.end..item.tokens.start;
                let glue = gap.clone().all(|t| self.in_anchor[t] || is_list_connector(tokens, t));
                let has_connector = gap.clone().any(|t| !self.in_anchor[t]);
                let measure_ok = match (measure_of(prev.unit), measure_of(item.unit)) {
                    (Some(a), Some(b)) => a == b || prev.bare || item.bare,
                    _ => true,
                };
                if list.clause == clause && glue && has_connector && measure_ok {
                    let cmp = gap.clone().any(|t| !self.in_anchor[t] && is_comparison(&tokens[t]));
                    list.comparison_gaps.push(cmp);
                    list.items.push(item);
                    continue;
                }
            }
            lists.extend(current.take());
            current = Some(ValueList {
                items: vec![item],
                clause,
                comparison_gaps: Vec::new(),
                bound_to: None,
            });
        }
        lists.extend(current);

        // bare numbers take the unit of the next unit-bearing item
        let mut out = Vec::new();
        for mut list in lists {
            let mut unit = None;
            let mut keep = vec![false; list.items.len()];
            for (i, item) in list.items.iter_mut().enumerate().rev() {
                if !item.bare {
                    unit = Some(item.unit);
                    keep[i] = true;
                } else if let Some(u) = unit {
                    item.unit = u;
                    keep[i] = true;
                }
            }
            if !keep.iter().any(|k| *k) {
                continue;
            }
            let last_kept = keep.iter().rposition(|k| *k).unwrap_or(0);
            list.items.truncate(last_kept + 1);
            list.comparison_gaps.truncate(last_kept);
            out.push(list);
        }
        out
    }

    fn mention_groups(&self) -> Vec<MentionGroup> {
        let tokens = self.tokens();
        let mut groups: Vec<MentionGroup> = Vec::new();
        for (i, m) in self.mentions.iter().enumerate() {
            let clause = self.clause[m.tokens.start];
            if let Some(g) = groups.last_mut() {
                if g.clause == clause && (g.end..m.tokens.start).all(|t| is_group_glue(&tokens[t])) {
                    g.members.push(i);
                    g.end = m.tokens.end;
                    continue;
                }
            }
            groups.push(MentionGroup {
                members: vec![i],
                clause,
                end: m.tokens.end,
            });
        }
        groups
    }

    /// The endpoint of each item, or `None` when the list cannot be assigned.
    fn assign(&self, list: &ValueList, group: &[usize], clause_tps: usize, diags: &mut Vec<RuleDiagnostic>) -> Option<Vec<Option<Base>>> {
        let n = list.items.len();
        let k = group.len();
        let conditional = k == 1 && self.mentions[group[0]].label == MentionLabel::ConditionalDoR;
        if conditional && self.dor_context && n > 1 && self.respectively {
            // `objective responses ... and stabilizations ..., with a median
            // duration of 4 months and 5 months, respectively`
            let at = group[0];
            if at >= n {
                let labels = (at - n..at)
                    .map(|m| match self.label(m) {
                        Some(Base::Orr) | Some(Base::Dor) => Some(Base::Dor),
                        _ => None,
                    })
                    .collect();
                return Some(labels);
            }
        }
        let labels: Vec<Option<Base>> = group.iter().map(|&m| self.label(m)).collect();
        if k == 1 {
            return Some(vec![labels[0]; n]);
        }
        if n == k {
            return Some(labels);
        }
        if n % k == 0 {
            if list.comparison_gaps.iter().any(|c| *c) && clause_tps <= 1 {
                // split into comparison chunks at the non-comparison gaps
                let mut chunk_of = vec![0usize; n];
                let mut chunk = 0;
                for i in 1..n {
                    if !list.comparison_gaps[i - 1] {
                        chunk += 1;
                    }
                    chunk_of[i] = chunk;
                }
                if chunk + 1 == k {
                    return Some(chunk_of.iter().map(|&c| labels[c]).collect());
                }
            }
            return Some((0..n).map(|i| labels[i % k]).collect());
        }
        let first = list.items[0].span.0;
        let last = list.items[n - 1].span.1;
        diags.push(RuleDiagnostic {
            kind: RuleIssueKind::AmbiguousAssignment,
            start: first,
            end: last,
            detail: format!("{n} values for {k} endpoints"),
        });
        None
    }

    fn interval_after(&self, item: &Item) -> Option<&IntervalGroup> {
        let tokens = self.tokens();
        let end = item.tokens.end;
        self.analysis.intervals.groups.iter().find(|g| {
            g.kind == IntervalKind::ConfidenceInterval && (g.anchor_tokens.start == end || (g.anchor_tokens.start == end + 1 && tokens[end].is_text(",")))
        })
    }
}
