use std::collections::BTreeMap;

use super::{Construction, EndpointObservation, IssueKind, Provenance, ResolutionDiagnostics, ResolutionIssue, TimePoint};
use crate::lexical::{time_unit, tokenize, Decimal, Token, TokenKind, Unit};
use crate::schema::{Bound, EntitySpan, Measure, SentenceRecord};

/// How a left list pairs with a right list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pairing {
    /// `(left index, right index)` pairs. `group` right items share each left
    /// item: 1 for positional pairing, `right.len()` for a single left item.
    Pairs { pairs: Vec<(usize, usize)>, group: usize },
    LengthMismatch { left: usize, right: usize },
}

impl Pairing {
    /// More than one left item, each covering several right items.
    pub fn is_ambiguous(&self) -> bool {
        match self {
            Pairing::Pairs { pairs, group } => *group > 1 && pairs.len() / group > 1,
            Pairing::LengthMismatch { .. } => false,
        }
    }
}

/// Pairs two lists by position. When the right list is a multiple `k` of the
/// left, each left item takes the next `k` adjacent right items.
pub fn pair_positional<L, R>(left: &[L], right: &[R]) -> Pairing {
    let (l, r) = (left.len(), right.len());
    if l == 0 || r == 0 || r % l != 0 {
        return Pairing::LengthMismatch { left: l, right: r };
    }
    let group = r / l;
    Pairing::Pairs {
        pairs: (0..r).map(|i| (i / group, i)).collect(),
        group,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntervalAttachment {
    /// Value span index to `(CIL index, CIH index)`.
    pub attached: BTreeMap<usize, (usize, usize)>,
    pub issues: Vec<ResolutionIssue>,
}

fn number_in(surface: &str) -> Option<Decimal> {
    tokenize(surface).iter().find(|t| t.is_number()).and_then(|t| Decimal::parse(&t.text))
}

fn time_unit_in(surface: &str) -> Option<Unit> {
    tokenize(surface).iter().find_map(|t| if t.kind == TokenKind::Word { time_unit(&t.text) } else { None })
}

/// Attaches each CIL/CIH pair to the nearest preceding point value of the
/// same endpoint and measure.
pub fn attach_intervals(spans: &[EntitySpan]) -> IntervalAttachment {
    let mut slots: BTreeMap<usize, (Option<usize>, Option<usize>)> = BTreeMap::new();
    let mut out = IntervalAttachment::default();
    for (i, span) in spans.iter().enumerate() {
        let Some(bound) = span.class.bound().filter(|b| *b != Bound::Point) else { continue };
        let owner = spans
            .iter()
            .enumerate()
            .filter(|(_, v)| v.class.is_value() && v.end <= span.start && v.class.base() == span.class.base() && v.class.measure() == span.class.measure())
            .max_by_key(|(_, v)| v.start)
            .map(|(j, _)| j);
        let Some(owner) = owner else {
            out.issues.push(ResolutionIssue {
                kind: IssueKind::UnpairedCi,
                detail: format!("{} with no preceding value", span.class),
                spans: vec![span.range()],
            });
            continue;
        };
        let slot = slots.entry(owner).or_default();
        let target = if bound == Bound::Cil { &mut slot.0 } else { &mut slot.1 };
        if target.is_some() {
            out.issues.push(ResolutionIssue {
                kind: IssueKind::UnpairedCi,
                detail: format!("second {} for the value at {}..{}", span.class, spans[owner].start, spans[owner].end),
                spans: vec![span.range()],
            });
        } else {
            *target = Some(i);
        }
    }
    for (owner, slot) in slots {
        match slot {
            (Some(lo), Some(hi)) => {
                let ordered = match (number_in(&spans[lo].surface), number_in(&spans[hi].surface)) {
                    (Some(a), Some(b)) => a.value() <= b.value(),
                    _ => false,
                };
                if ordered {
                    out.attached.insert(owner, (lo, hi));
                } else {
                    out.issues.push(ResolutionIssue {
                        kind: IssueKind::UnpairedCi,
                        detail: "interval bounds are out of order or unreadable".into(),
                        spans: vec![spans[lo].range(), spans[hi].range()],
                    });
                }
            }
            (Some(one), None) | (None, Some(one)) => out.issues.push(ResolutionIssue {
                kind: IssueKind::UnpairedCi,
                detail: format!("{} without its other bound", spans[one].class),
                spans: vec![spans[one].range()],
            }),
            (None, None) => {}
        }
    }
    out
}

struct Context {
    text_tokens: Vec<Token>,
    /// Char offsets of `;` tokens.
    semicolons: Vec<usize>,
    respectively: bool,
}

impl Context {
    fn clause_of(&self, offset: usize) -> usize {
        self.semicolons.partition_point(|&s| s < offset)
    }

    fn comparison_between(&self, a: usize, b: usize) -> bool {
        self.text_tokens
            .iter()
            .any(|t| t.start >= a && t.end <= b && (t.eq_ignore_case("vs") || t.eq_ignore_case("versus") || t.eq_ignore_case("than")))
    }

    fn time_unit_after(&self, offset: usize, clause: usize) -> Option<Unit> {
        self.text_tokens
            .iter()
            .filter(|t| t.start >= offset && self.clause_of(t.start) == clause)
            .find_map(|t| if t.kind == TokenKind::Word { time_unit(&t.text) } else { None })
    }
}

struct Value {
    span: usize,
    clause: usize,
    number: Decimal,
}

/// Resolves one sentence. Never fails: anything that cannot be resolved is
/// reported in the diagnostics instead.
pub fn resolve_sentence(sentence: &SentenceRecord, spans: &[EntitySpan]) -> (Vec<EndpointObservation>, ResolutionDiagnostics) {
    let mut spans: Vec<EntitySpan> = spans.to_vec();
    spans.sort();
    let tokens = tokenize(&sentence.text);
    let ctx = Context {
        semicolons: tokens.iter().filter(|t| t.is_text(";")).map(|t| t.start).collect(),
        respectively: tokens.iter().any(|t| t.eq_ignore_case("respectively")),
        text_tokens: tokens,
    };
    let mut diags = ResolutionDiagnostics {
        sentence_id: sentence.sentence_id.clone(),
        issues: Vec::new(),
    };

    let mut values = Vec::new();
    for (i, span) in spans.iter().enumerate() {
        if !span.class.is_value() {
            continue;
        }
        match number_in(&span.surface) {
            Some(number) => values.push(Value {
                span: i,
                clause: ctx.clause_of(span.start),
                number,
            }),
            None => diags.issues.push(ResolutionIssue {
                kind: IssueKind::LengthMismatch,
                detail: format!("{} span `{}` holds no number", span.class, span.surface),
                spans: vec![span.range()],
            }),
        }
    }
    let intervals = attach_intervals(&spans);
    diags.issues.extend(intervals.issues.iter().cloned());

    // time points, per clause, inherited by later clauses that have none
    let tps: Vec<usize> = (0..spans.len()).filter(|&i| spans[i].class.is_time_point()).collect();
    let n_clauses = ctx.semicolons.len() + 1;
    let mut tp_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut grouped: Vec<bool> = vec![false; spans.len()];
    let mut consumed: Vec<bool> = vec![false; spans.len()];
    let mut tp_used = vec![false; spans.len()];
    let mut current: Vec<usize> = Vec::new();
    for clause in 0..n_clauses {
        let own: Vec<usize> = tps.iter().copied().filter(|&t| ctx.clause_of(spans[t].start) == clause).collect();
        if !own.is_empty() {
            current = own;
        }
        let percent: Vec<usize> = values
            .iter()
            .filter(|v| v.clause == clause && spans[v.span].class.measure() == Some(Measure::Percent))
            .map(|v| v.span)
            .collect();
        if percent.is_empty() || current.is_empty() {
            continue;
        }
        let pairing = pair_positional(&current, &percent);
        match &pairing {
            Pairing::Pairs { pairs, .. } => {
                for &(t, v) in pairs {
                    tp_of.insert(percent[v], current[t]);
                    tp_used[current[t]] = true;
                    grouped[percent[v]] = current.len() > 1;
                }
                if pairing.is_ambiguous() {
                    diags.issues.push(ResolutionIssue {
                        kind: IssueKind::AmbiguousGrouping,
                        detail: format!("{} values grouped over {} time points", percent.len(), current.len()),
                        spans: current.iter().map(|&t| spans[t].range()).collect(),
                    });
                }
            }
            Pairing::LengthMismatch { left, right } => {
                let mut cited: Vec<(usize, usize)> = percent.iter().map(|&v| spans[v].range()).collect();
                cited.extend(current.iter().map(|&t| spans[t].range()));
                for &v in &percent {
                    consumed[v] = true;
                }
                for &t in &current {
                    tp_used[t] = true;
                }
                diags.issues.push(ResolutionIssue {
                    kind: IssueKind::LengthMismatch,
                    detail: format!("{left} time points for {right} values"),
                    spans: cited,
                });
            }
        }
    }
    for &t in &tps {
        if !tp_used[t] {
            diags.issues.push(ResolutionIssue {
                kind: IssueKind::OrphanTimePoint,
                detail: format!("time point `{}` qualifies no value", spans[t].surface),
                spans: vec![spans[t].range()],
            });
        }
    }

    let mut observations = Vec::new();
    for (k, v) in values.iter().enumerate() {
        if consumed[v.span] {
            continue;
        }
        let span = &spans[v.span];
        let (Some(base), Some(measure)) = (span.class.base(), span.class.measure()) else { continue };
        let unit = match measure {
            Measure::Percent => Unit::Percent,
            Measure::Duration => time_unit_in(&span.surface)
                .or_else(|| {
                    values[k + 1..]
                        .iter()
                        .filter(|w| w.clause == v.clause && spans[w.span].class.measure() == Some(Measure::Duration))
                        .find_map(|w| time_unit_in(&spans[w.span].surface))
                })
                .or_else(|| ctx.time_unit_after(span.end, v.clause))
                .unwrap_or(Unit::Months),
        };
        let mut provenance = vec![span.range()];
        let (ci_low, ci_high) = match intervals.attached.get(&v.span) {
            Some(&(lo, hi)) => {
                provenance.push(spans[lo].range());
                provenance.push(spans[hi].range());
                (number_in(&spans[lo].surface), number_in(&spans[hi].surface))
            }
            None => (None, None),
        };
        let time_point = tp_of.get(&v.span).and_then(|&t| {
            provenance.push(spans[t].range());
            time_point_of(&spans, &tps, t)
        });

        let clause_values: Vec<&Value> = values.iter().filter(|w| w.clause == v.clause).collect();
        let pos = clause_values.iter().position(|w| w.span == v.span).unwrap_or(0);
        let cmp_with = |w: Option<&&Value>| {
            w.is_some_and(|w| {
                let (a, b) = if w.span < v.span { (&spans[w.span], span) } else { (span, &spans[w.span]) };
                ctx.comparison_between(a.end, b.start)
            })
        };
        let comparison = cmp_with(pos.checked_sub(1).and_then(|p| clause_values.get(p))) || cmp_with(clause_values.get(pos + 1));
        let respectively = (ctx.respectively && clause_values.len() > 1) || grouped[v.span];
        let construction = match (comparison, respectively) {
            (true, true) => Construction::Combined,
            (true, false) => Construction::Comparison,
            (false, true) => Construction::Respectively,
            (false, false) => Construction::Simple,
        };
        observations.push(EndpointObservation {
            id: format!("{}#{}", sentence.sentence_id, observations.len()),
            base,
            measure,
            value: v.number,
            unit,
            ci_low,
            ci_high,
            time_point,
            construction,
            provenance: Provenance {
                pmid: sentence.pmid.clone(),
                sentence_id: sentence.sentence_id.clone(),
                spans: provenance,
            },
        });
    }
    // CI bounds of values that produced no observation
    let covered: std::collections::HashSet<(usize, usize)> = observations
        .iter()
        .flat_map(|o| o.provenance.spans.iter().copied())
        .chain(diags.issues.iter().flat_map(|i| i.spans.iter().copied()))
        .collect();
    let stranded: Vec<(usize, usize)> = spans.iter().map(EntitySpan::range).filter(|r| !covered.contains(r)).collect();
    if !stranded.is_empty() {
        diags.issues.push(ResolutionIssue {
            kind: IssueKind::UnpairedCi,
            detail: "interval bounds of an unresolved value".into(),
            spans: stranded,
        });
    }
    (observations, diags)
}

/// The value of time point `t`; a series element like `3-` borrows the unit
/// of the next time point that spells one out.
fn time_point_of(spans: &[EntitySpan], tps: &[usize], t: usize) -> Option<TimePoint> {
    let value = number_in(&spans[t].surface)?;
    let unit = time_unit_in(&spans[t].surface)
        .or_else(|| tps.iter().filter(|&&u| u > t).find_map(|&u| time_unit_in(&spans[u].surface)))
        .unwrap_or(Unit::Years);
    Some(TimePoint { value, unit })
}

/// Observations that take part in a than/versus comparison.
pub fn resolve_comparison(sentence: &SentenceRecord, spans: &[EntitySpan]) -> Vec<EndpointObservation> {
    resolve_sentence(sentence, spans)
        .0
        .into_iter()
        .filter(|o| matches!(o.construction, Construction::Comparison | Construction::Combined))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::EndpointClass;

    fn span(text: &str, needle: &str, nth: usize, class: EndpointClass) -> EntitySpan {
        let byte = text.match_indices(needle).nth(nth).expect("needle").0;
        let start = text[..byte].chars().count();
        EntitySpan::new(text, start, start + needle.chars().count(), class).unwrap()
    }

    #[test]
    fn positional_pairing() {
        assert_eq!(
            pair_positional(&[1, 2, 3], &['a', 'b', 'c']),
            Pairing::Pairs {
                pairs: vec![(0, 0), (1, 1), (2, 2)],
                group: 1
            }
        );
        assert_eq!(pair_positional(&[1, 2], &['a', 'b', 'c']), Pairing::LengthMismatch { left: 2, right: 3 });
        let p = pair_positional(&[1, 2], &['a', 'b', 'c', 'd']);
        assert_eq!(
            p,
            Pairing::Pairs {
                pairs: vec![(0, 0), (0, 1), (1, 2), (1, 3)],
                group: 2
            }
        );
        assert!(p.is_ambiguous());
        assert!(!pair_positional(&[1], &['a', 'b']).is_ambiguous());
    }

    #[test]
    fn intervals_attach_backwards() {
        let text = "median 14.1 months [95% CI 13.2-16.2]";
        let spans = vec![
            span(text, "14.1 months", 0, EndpointClass::Os),
            span(text, "13.2", 0, EndpointClass::OsCil),
            span(text, "16.2", 0, EndpointClass::OsCih),
        ];
        let a = attach_intervals(&spans);
        assert_eq!(a.attached[&0], (1, 2));
        assert!(a.issues.is_empty());

        let orphan = attach_intervals(&spans[1..]);
        assert!(orphan.attached.is_empty());
        assert_eq!(orphan.issues.len(), 2);
        assert!(orphan.issues.iter().all(|i| i.kind == IssueKind::UnpairedCi));
    }

    #[test]
    fn no_comparison_cue_no_comparison() {
        let s = SentenceRecord::new("s", "p", "Median OS was 14.1 months.");
        let spans = vec![span(&s.text, "14.1 months", 0, EndpointClass::Os)];
        assert!(resolve_comparison(&s, &spans).is_empty());
        let (obs, diags) = resolve_sentence(&s, &spans);
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].unit, Unit::Months);
        assert_eq!(obs[0].construction, Construction::Simple);
        assert!(diags.is_empty());
    }

    #[test]
    fn mismatch_consumes_values() {
        let s = SentenceRecord::new("s", "p", "The 3-year and 5-year OS rates were 60%, 50% and 40%.");
        let spans = vec![
            span(&s.text, "3-year", 0, EndpointClass::TimePoint),
            span(&s.text, "5-year", 0, EndpointClass::TimePoint),
            span(&s.text, "60%", 0, EndpointClass::OsPercent),
            span(&s.text, "50%", 0, EndpointClass::OsPercent),
            span(&s.text, "40%", 0, EndpointClass::OsPercent),
        ];
        let (obs, diags) = resolve_sentence(&s, &spans);
        assert!(obs.is_empty());
        assert_eq!(diags.issues.len(), 1);
        assert_eq!(diags.issues[0].kind, IssueKind::LengthMismatch);
        assert_eq!(diags.issues[0].spans.len(), 5);
    }

    #[test]
    fn orphan_time_point() {
        let s = SentenceRecord::new("s", "p", "At 5 years, median OS was 30 months.");
        let spans = vec![span(&s.text, "5 years", 0, EndpointClass::TimePoint), span(&s.text, "30 months", 0, EndpointClass::Os)];
        let (obs, diags) = resolve_sentence(&s, &spans);
        assert_eq!(obs.len(), 1);
        assert_eq!(diags.issues[0].kind, IssueKind::OrphanTimePoint);
    }
}
