use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use serde::Serialize;

use crate::dataset::Corpus;
use crate::error::{Error, Result};
use crate::schema::{AnnotationSet, EndpointClass};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ClassRow {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold entities. Fractional after averaging.
    pub support: f64,
    pub predicted: f64,
    /// Set by [`average_reports`] when only one report had the class.
    pub single_source: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Overall {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MetricsReport {
    /// Classes with gold or predicted entities, in table order.
    pub rows: BTreeMap<EndpointClass, ClassRow>,
    pub overall: Overall,
}

/// Exact-match counts for one class. Merges by addition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub true_positives: usize,
    pub gold: usize,
    pub predicted: usize,
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class tallies over the sentences of `corpus`.
pub fn tally(gold: &AnnotationSet, pred: &AnnotationSet, corpus: &Corpus) -> BTreeMap<EndpointClass, Tally> {
    let mut out: BTreeMap<EndpointClass, Tally> = BTreeMap::new();
    for sentence in corpus.sentences() {
        let g = gold.get(&sentence.sentence_id);
        let p = pred.get(&sentence.sentence_id);
        let keys: HashSet<(usize, usize, EndpointClass)> = g.iter().map(|s| (s.start, s.end, s.class)).collect();
        for s in g {
            out.entry(s.class).or_default().gold += 1;
        }
        for s in p {
            let t = out.entry(s.class).or_default();
            t.predicted += 1;
            if keys.contains(&(s.start, s.end, s.class)) {
                t.true_positives += 1;
            }
        }
    }
    out
}

pub fn report_from_tallies(tallies: &BTreeMap<EndpointClass, Tally>) -> MetricsReport {
    let rows: BTreeMap<EndpointClass, ClassRow> = tallies
        .iter()
        .filter(|(_, t)| t.gold + t.predicted > 0)
        .map(|(&c, t)| {
            let precision = ratio(t.true_positives, t.predicted);
            let recall = ratio(t.true_positives, t.gold);
            (
                c,
                ClassRow {
                    precision,
                    recall,
                    f1: f1(precision, recall),
                    support: t.gold as f64,
                    predicted: t.predicted as f64,
                    single_source: false,
                },
            )
        })
        .collect();
    let overall = weighted_overall(&rows).unwrap_or_default();
    MetricsReport { rows, overall }
}

/// Exact-match scoring: a prediction is correct iff start, end and class
/// all equal a gold span of the same sentence.
pub fn score(gold: &AnnotationSet, pred: &AnnotationSet, corpus: &Corpus) -> MetricsReport {
    report_from_tallies(&tally(gold, pred, corpus))
}

/// Support-weighted mean of each column.
pub fn weighted_overall(rows: &BTreeMap<EndpointClass, ClassRow>) -> Result<Overall> {
    let total: f64 = rows.values().map(|r| r.support).sum();
    if total <= 0.0 {
        return Err(Error::EmptyReport);
    }
    let mean = |f: fn(&ClassRow) -> f64| rows.values().map(|r| r.support * f(r)).sum::<f64>() / total;
    Ok(Overall {
        precision: mean(|r| r.precision),
        recall: mean(|r| r.recall),
        f1: mean(|r| r.f1),
    })
}

/// Cell-wise mean of two reports. A class found in only one report keeps
/// that report's row and is flagged.
pub fn average_reports(a: &MetricsReport, b: &MetricsReport) -> MetricsReport {
    let mut rows = BTreeMap::new();
    for class in a.rows.keys().chain(b.rows.keys()) {
        let row = match (a.rows.get(class), b.rows.get(class)) {
            (Some(x), Some(y)) => ClassRow {
                precision: (x.precision + y.precision) / 2.0,
                recall: (x.recall + y.recall) / 2.0,
                f1: (x.f1 + y.f1) / 2.0,
                support: (x.support + y.support) / 2.0,
                predicted: (x.predicted + y.predicted) / 2.0,
                single_source: x.single_source || y.single_source,
            },
            (Some(x), None) | (None, Some(x)) => ClassRow { single_source: true, ..*x },
            (None, None) => unreachable!(),
        };
        rows.insert(*class, row);
    }
    let overall = Overall {
        precision: (a.overall.precision + b.overall.precision) / 2.0,
        recall: (a.overall.recall + b.overall.recall) / 2.0,
        f1: (a.overall.f1 + b.overall.f1) / 2.0,
    };
    MetricsReport { rows, overall }
}

fn pct(x: f64) -> String {
    format!("{:.1}", x * 100.0)
}

fn count(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x:.1}")
    }
}

/// Tab-separated table: endpoint, F1, precision, recall, support, metrics in
/// percent. Flagged rows get `*` after the class name.
pub fn write_report<W: Write>(report: &MetricsReport, mut out: W) -> Result<()> {
    writeln!(out, "endpoint\tf1\tprecision\trecall\tsupport")?;
    for (class, r) in &report.rows {
        let flag = if r.single_source { "*" } else { "" };
        writeln!(out, "{class}{flag}\t{}\t{}\t{}\t{}", pct(r.f1), pct(r.precision), pct(r.recall), count(r.support))?;
    }
    let support: f64 = report.rows.values().map(|r| r.support).sum();
    let o = report.overall;
    writeln!(out, "overall\t{}\t{}\t{}\t{}", pct(o.f1), pct(o.precision), pct(o.recall), count(support))?;
    Ok(())
}
