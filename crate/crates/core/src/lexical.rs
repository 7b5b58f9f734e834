//! Word-level tokenization with char offsets, and recognition of numeric
//! mentions: durations, percentages, bare numbers, hyphenated time-point
//! series and bracketed interval groups.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    Number,
    PercentSign,
    Punctuation,
    Hyphen,
    OpenBracket,
    CloseBracket,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
    pub kind: TokenKind,
}

impl Token {
    pub fn is(&self, kind: TokenKind) -> bool {
        self.kind == kind
    }

    pub fn is_number(&self) -> bool {
        self.kind == TokenKind::Number
    }

    /// Case-insensitive comparison against a literal.
    pub fn eq_ignore_case(&self, literal: &str) -> bool {
        if self.text.is_ascii() && literal.is_ascii() {
            self.text.eq_ignore_ascii_case(literal)
        } else {
            self.text.to_lowercase() == literal.to_lowercase()
        }
    }

    pub fn is_text(&self, literal: &str) -> bool {
        self.text == literal
    }
}

fn hyphen_char(c: char) -> bool {
    matches!(c, '-' | '\u{2010}' | '\u{2011}' | '\u{2012}' | '\u{2013}' | '\u{2014}' | '\u{2212}')
}

fn classify_symbol(c: char) -> TokenKind {
    match c {
        '%' => TokenKind::PercentSign,
        '(' | '[' | '{' => TokenKind::OpenBracket,
        ')' | ']' | '}' => TokenKind::CloseBracket,
        c if hyphen_char(c) => TokenKind::Hyphen,
        _ => TokenKind::Punctuation,
    }
}

/// Splits `text` into tokens that tile it: the gaps between consecutive
/// tokens are whitespace only.
///
/// Numbers take at most one decimal point. Words are runs of alphanumerics
/// that start with a letter, so `5-year` becomes number, hyphen, word.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            TokenKind::Number
        } else if c.is_alphabetic() {
            while i < chars.len() && chars[i].is_alphanumeric() {
                i += 1;
            }
            TokenKind::Word
        } else {
            i += 1;
            classify_symbol(c)
        };
        tokens.push(Token {
            text: chars[start..i].iter().collect(),
            start,
            end: i,
            kind,
        });
    }
    tokens
}

/// A decimal number together with the number of fractional digits it was
/// written with.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Decimal {
    value: f64,
    scale: u8,
}

impl Decimal {
    pub fn new(value: f64, scale: u8) -> Self {
        Decimal { value, scale }
    }

    /// Parses `digits[.digits]`; no signs, no thousands separators.
    pub fn parse(s: &str) -> Option<Decimal> {
        let (int, frac) = match s.split_once('.') {
            Some((i, f)) => (i, Some(f)),
            None => (s, None),
        };
        if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let scale = match frac {
            Some(f) if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) => return None,
            Some(f) => u8::try_from(f.len()).ok()?,
            None => 0,
        };
        Some(Decimal {
            value: s.parse().ok()?,
            scale,
        })
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn scale(self) -> u8 {
        self.scale
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.*}", self.scale as usize, self.value)
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Percent,
    Months,
    Years,
    Days,
    Weeks,
    None,
}

impl Unit {
    pub fn as_str(self) -> &'static str {
        match self {
            Unit::Percent => "percent",
            Unit::Months => "months",
            Unit::Years => "years",
            Unit::Days => "days",
            Unit::Weeks => "weeks",
            Unit::None => "none",
        }
    }

    pub fn is_time(self) -> bool {
        matches!(self, Unit::Months | Unit::Years | Unit::Days | Unit::Weeks)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Normalizes a time-unit word (`mo`, `months`, `yr`, ...).
pub fn time_unit(word: &str) -> Option<Unit> {
    let lower = word.to_ascii_lowercase();
    Some(match lower.as_str() {
        "month" | "months" | "mo" | "mos" | "mth" | "mths" => Unit::Months,
        "year" | "years" | "yr" | "yrs" => Unit::Years,
        "day" | "days" => Unit::Days,
        "week" | "weeks" | "wk" | "wks" => Unit::Weeks,
        _ => return None,
    })
}

fn time_unit_token(token: &Token) -> Option<Unit> {
    if token.kind == TokenKind::Word {
        time_unit(&token.text)
    } else {
        None
    }
}

const NUMBER_WORDS: &[&str] = &[
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
    "fifteen", "eighteen", "twenty", "thirty", "forty", "fifty", "sixty",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericKind {
    Percent,
    Duration,
    BareNumber,
    TimePointSeriesElement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericMention {
    pub start: usize,
    pub end: usize,
    /// Token index range covered by the mention.
    pub tokens: Range<usize>,
    /// Index of the number token itself.
    pub number_token: usize,
    pub value: Decimal,
    pub unit: Unit,
    pub kind: NumericKind,
}

/// A coordinated series of time points sharing one unit word, such as
/// `3-, 5- and 10-year`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePointSeries {
    pub elements: Vec<NumericMention>,
}

fn adjacent(tokens: &[Token], a: usize, b: usize) -> bool {
    tokens[a].end == tokens[b].start
}

fn is_series_connector(token: &Token) -> bool {
    token.is_text(",") || token.is_text("&") || token.eq_ignore_case("and") || token.eq_ignore_case("or")
}

fn decimal_of(token: &Token) -> Decimal {
    Decimal::parse(&token.text).unwrap_or(Decimal::new(0.0, 0))
}

/// Finds `N-unit` time points and coordinated series that distribute one
/// unit word over several hyphenated numbers. Non-final elements span the
/// number and its hyphen (`3-`); the final element spans up to the unit.
pub fn expand_distributed_series(tokens: &[Token]) -> Vec<TimePointSeries> {
    let n = tokens.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let opens = tokens[i].is_number() && i + 1 < n && tokens[i + 1].is(TokenKind::Hyphen) && adjacent(tokens, i, i + 1);
        if !opens {
            i += 1;
            continue;
        }
        let mut numbers = vec![i];
        let mut j = i + 2;
        let mut unit = None;
        loop {
            if j < n && adjacent(tokens, j - 1, j) {
                if let Some(u) = time_unit_token(&tokens[j]) {
                    unit = Some(u);
                    break;
                }
            }
            let mut k = j;
            while k < n && is_series_connector(&tokens[k]) && k - j < 2 {
                k += 1;
            }
            if k > j && k + 1 < n && tokens[k].is_number() && tokens[k + 1].is(TokenKind::Hyphen) && adjacent(tokens, k, k + 1) {
                numbers.push(k);
                j = k + 2;
            } else {
                break;
            }
        }
        match unit {
            Some(unit) => {
                let last = numbers.len() - 1;
                let elements = numbers
                    .iter()
                    .enumerate()
                    .map(|(e, &t)| {
                        let end_token = if e == last { j } else { t + 1 };
                        NumericMention {
                            start: tokens[t].start,
                            end: tokens[end_token].end,
                            tokens: t..end_token + 1,
                            number_token: t,
                            value: decimal_of(&tokens[t]),
                            unit,
                            kind: NumericKind::TimePointSeriesElement,
                        }
                    })
                    .collect();
                out.push(TimePointSeries { elements });
                i = j + 1;
            }
            None => i += 1,
        }
    }
    out
}

/// A unit directly following the number at `at`, as `(unit, last token)`.
/// Accepts `%`, a time-unit word, or `+` followed by a time-unit word.
fn unit_after(tokens: &[Token], at: usize) -> Option<(Unit, usize)> {
    let next = tokens.get(at)?;
    if next.is(TokenKind::PercentSign) {
        return Some((Unit::Percent, at));
    }
    if let Some(u) = time_unit_token(next) {
        return Some((u, at));
    }
    if next.is_text("+") {
        if let Some(u) = tokens.get(at + 1).and_then(time_unit_token) {
            return Some((u, at + 1));
        }
    }
    None
}

fn is_range_separator(token: &Token) -> bool {
    token.is(TokenKind::Hyphen) || token.eq_ignore_case("to")
}

fn kind_for(unit: Unit) -> NumericKind {
    match unit {
        Unit::Percent => NumericKind::Percent,
        Unit::None => NumericKind::BareNumber,
        _ => NumericKind::Duration,
    }
}

/// Covers every number token with exactly one mention. Units directly after
/// the number are absorbed; the low end of `a-b unit` inherits the unit of
/// the high end.
pub fn recognize_numerics(tokens: &[Token]) -> Vec<NumericMention> {
    let series = expand_distributed_series(tokens);
    let mut series_at: Vec<Option<NumericMention>> = vec![None; tokens.len()];
    for s in series {
        for m in s.elements {
            let t = m.number_token;
            series_at[t] = Some(m);
        }
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if let Some(m) = series_at[i].take() {
            i = m.tokens.end;
            out.push(m);
            continue;
        }
        if !tokens[i].is_number() {
            i += 1;
            continue;
        }
        let value = decimal_of(&tokens[i]);
        let mention = if let Some((unit, last)) = unit_after(tokens, i + 1) {
            NumericMention {
                start: tokens[i].start,
                end: tokens[last].end,
                tokens: i..last + 1,
                number_token: i,
                value,
                unit,
                kind: kind_for(unit),
            }
        } else {
            let inherited = match (tokens.get(i + 1), tokens.get(i + 2)) {
                (Some(sep), Some(high)) if is_range_separator(sep) && high.is_number() => unit_after(tokens, i + 3).map(|(u, _)| u),
                _ => None,
            }
            .unwrap_or(Unit::None);
            NumericMention {
                start: tokens[i].start,
                end: tokens[i].end,
                tokens: i..i + 1,
                number_token: i,
                value,
                unit: inherited,
                kind: kind_for(inherited),
            }
        };
        i = mention.tokens.end;
        out.push(mention);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LexIssueKind {
    MalformedInterval,
    StrayPlus,
    SpelledNumber,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexDiagnostic {
    pub kind: LexIssueKind,
    pub start: usize,
    pub end: usize,
    pub detail: String,
}

/// Flags duration words preceded by a spelled-out number (`twelve months`),
/// which are not recognized as numeric mentions.
pub fn spelled_number_diagnostics(tokens: &[Token]) -> Vec<LexDiagnostic> {
    tokens
        .windows(2)
        .filter(|w| {
            w[0].kind == TokenKind::Word
                && time_unit_token(&w[1]).is_some()
                && NUMBER_WORDS.iter().any(|n| w[0].eq_ignore_case(n))
        })
        .map(|w| LexDiagnostic {
            kind: LexIssueKind::SpelledNumber,
            start: w[0].start,
            end: w[1].end,
            detail: format!("spelled-out number `{} {}` is not recognized", w[0].text, w[1].text),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    ConfidenceInterval,
    Range,
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalGroup {
    pub low: Decimal,
    pub high: Decimal,
    pub kind: IntervalKind,
    /// Char offsets of the whole group (brackets included when bracketed).
    pub anchor_span: (usize, usize),
    pub anchor_tokens: Range<usize>,
    /// Token ranges of the low and high numbers including attached units.
    pub low_tokens: Range<usize>,
    pub high_tokens: Range<usize>,
    pub confidence_level: Option<Decimal>,
    pub bracketed: bool,
    /// Whether the group carried a cue word (`CI`, `range`, `SD`, ...).
    pub cued: bool,
}

impl IntervalGroup {
    pub fn low_span(&self, tokens: &[Token]) -> (usize, usize) {
        (tokens[self.low_tokens.start].start, tokens[self.low_tokens.end - 1].end)
    }

    pub fn high_span(&self, tokens: &[Token]) -> (usize, usize) {
        (tokens[self.high_tokens.start].start, tokens[self.high_tokens.end - 1].end)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntervalParse {
    pub groups: Vec<IntervalGroup>,
    pub diagnostics: Vec<LexDiagnostic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cue {
    Confidence,
    Range,
    Deviation,
}

/// Recognizes a cue word starting at `at`: `(cue, tokens consumed)`.
fn cue_at(tokens: &[Token], at: usize) -> Option<(Cue, usize)> {
    let t = tokens.get(at)?;
    if t.kind == TokenKind::Word {
        let next_is = |w: &str| tokens.get(at + 1).is_some_and(|n| n.eq_ignore_case(w));
        if t.eq_ignore_case("CI") || t.eq_ignore_case("CIs") {
            return Some((Cue::Confidence, 1));
        }
        if t.eq_ignore_case("confidence") && (next_is("interval") || next_is("intervals")) {
            return Some((Cue::Confidence, 2));
        }
        if t.eq_ignore_case("range") || t.eq_ignore_case("IQR") || t.eq_ignore_case("ranging") {
            return Some((Cue::Range, 1));
        }
        if t.eq_ignore_case("interquartile") && next_is("range") {
            return Some((Cue::Range, 2));
        }
        if t.eq_ignore_case("SD") || t.eq_ignore_case("SE") || t.eq_ignore_case("SEM") {
            return Some((Cue::Deviation, 1));
        }
        if t.eq_ignore_case("standard") && (next_is("deviation") || next_is("error")) {
            return Some((Cue::Deviation, 2));
        }
    } else if t.is_text("±") {
        return Some((Cue::Deviation, 1));
    }
    None
}

fn is_filler(token: &Token) -> bool {
    matches!(token.text.as_str(), ":" | "," | "=" | ";" | "%")
        || token.eq_ignore_case("of")
        || token.eq_ignore_case("from")
}

fn is_comparison_cue(token: &Token) -> bool {
    token.eq_ignore_case("vs") || token.eq_ignore_case("versus") || token.eq_ignore_case("than")
}

struct Pair {
    low: Range<usize>,
    high: Range<usize>,
    stray_plus: Option<usize>,
}

/// Parses `NUM[unit] (-|to) NUM[unit]` starting at `at`, skipping nothing.
fn pair_at(tokens: &[Token], at: usize, limit: usize) -> Option<Pair> {
    let tok = |i: usize| if i < limit { tokens.get(i) } else { None };
    if !tok(at)?.is_number() {
        return None;
    }
    let mut low_end = at + 1;
    if let Some((_, last)) = unit_after(&tokens[..limit], at + 1) {
        low_end = last + 1;
    }
    if !is_range_separator(tok(low_end)?) {
        return None;
    }
    let high_start = low_end + 1;
    if !tok(high_start)?.is_number() {
        return None;
    }
    let mut high_end = high_start + 1;
    let mut stray_plus = None;
    if let Some((_, last)) = unit_after(&tokens[..limit], high_start + 1) {
        high_end = last + 1;
        if tokens[high_start + 1].is_text("+") {
            stray_plus = Some(high_start + 1);
        }
    } else if tok(high_start + 1).is_some_and(|t| t.is_text("+")) {
        stray_plus = Some(high_start + 1);
        high_end = high_start + 2;
    }
    Some(Pair {
        low: at..low_end,
        high: high_start..high_end,
        stray_plus,
    })
}

#[derive(Debug)]
struct Candidate {
    group: IntervalGroup,
    cue: Option<Cue>,
}

fn level_before(tokens: &[Token], cue_start: usize, floor: usize) -> Option<(Decimal, usize)> {
    if cue_start >= floor + 2 && tokens[cue_start - 1].is(TokenKind::PercentSign) && tokens[cue_start - 2].is_number() {
        Some((decimal_of(&tokens[cue_start - 2]), cue_start - 2))
    } else {
        None
    }
}

fn make_group(tokens: &[Token], pair: &Pair, anchor: Range<usize>, cue: Option<Cue>, level: Option<Decimal>, bracketed: bool) -> IntervalGroup {
    let number_in = |r: &Range<usize>| decimal_of(&tokens[r.start]);
    IntervalGroup {
        low: number_in(&pair.low),
        high: number_in(&pair.high),
        kind: match cue {
            Some(Cue::Confidence) => IntervalKind::ConfidenceInterval,
            Some(Cue::Range) => IntervalKind::Range,
            _ => IntervalKind::Other,
        },
        anchor_span: (tokens[anchor.start].start, tokens[anchor.end - 1].end),
        anchor_tokens: anchor,
        low_tokens: pair.low.clone(),
        high_tokens: pair.high.clone(),
        confidence_level: level,
        bracketed,
        cued: cue.is_some(),
    }
}

/// Examines the top-level contents of one bracket pair. Returns a candidate
/// only when the contents form an interval expression and nothing else.
fn bracket_candidate(tokens: &[Token], open: usize, close: usize, nested: &[Range<usize>]) -> Option<(Candidate, Option<usize>)> {
    let inside = |i: usize| !nested.iter().any(|r| r.contains(&i));
    let mut cue: Option<Cue> = None;
    let mut level = None;
    let mut pair: Option<Pair> = None;
    let mut i = open + 1;
    while i < close {
        if !inside(i) {
            i += 1;
            continue;
        }
        if let Some((c, used)) = cue_at(tokens, i) {
            if c == Cue::Confidence && level.is_none() {
                level = level_before(tokens, i, open + 1).map(|(l, _)| l);
            }
            // range wins over any other cue
            cue = match (cue, c) {
                (Some(Cue::Range), _) => Some(Cue::Range),
                _ => Some(c),
            };
            i += used;
            continue;
        }
        if pair.is_none() {
            if let Some(p) = pair_at(tokens, i, close) {
                i = p.high.end;
                pair = Some(p);
                continue;
            }
        }
        let t = &tokens[i];
        let is_level = t.is_number() && tokens.get(i + 1).is_some_and(|n| n.is(TokenKind::PercentSign)) && cue_at(tokens, i + 2).is_some_and(|(c, _)| c == Cue::Confidence);
        if is_level {
            i += 2;
            continue;
        }
        if is_filler(t) {
            i += 1;
            continue;
        }
        return None;
    }
    let pair = pair?;
    let stray = pair.stray_plus;
    let group = make_group(tokens, &pair, open..close + 1, cue, level, true);
    Some((Candidate { group, cue }, stray))
}

/// Finds interval groups whose tokens lie inside the char window.
///
/// Bracketed groups are classified by their cue word; an unbracketed `CI` or
/// `range` cue followed by a pair also forms a group. A bare bracketed pair
/// right after a value is a confidence interval when an earlier CI group is
/// separated from it by a comparison cue.
pub fn parse_interval_group(tokens: &[Token], window: Range<usize>) -> IntervalParse {
    let first = tokens.iter().position(|t| t.start >= window.start).unwrap_or(tokens.len());
    let last = tokens.iter().rposition(|t| t.end <= window.end).map(|p| p + 1).unwrap_or(0);
    let mut result = IntervalParse::default();
    if first >= last {
        return result;
    }

    let mut stack = Vec::new();
    let mut brackets: Vec<(usize, usize)> = Vec::new();
    for i in first..last {
        match tokens[i].kind {
            TokenKind::OpenBracket => stack.push(i),
            TokenKind::CloseBracket => {
                if let Some(open) = stack.pop() {
                    brackets.push((open, i));
                }
            }
            _ => {}
        }
    }
    brackets.sort();

    let mut candidates: Vec<Candidate> = Vec::new();
    for &(open, close) in &brackets {
        let nested: Vec<Range<usize>> = brackets
            .iter()
            .filter(|&&(o, c)| o > open && c < close)
            .map(|&(o, c)| o..c + 1)
            .collect();
        if let Some((candidate, stray)) = bracket_candidate(tokens, open, close, &nested) {
            if let Some(p) = stray {
                result.diagnostics.push(LexDiagnostic {
                    kind: LexIssueKind::StrayPlus,
                    start: tokens[p].start,
                    end: tokens[p].end,
                    detail: "open-ended `+` after interval bound ignored".into(),
                });
            }
            candidates.push(candidate);
        }
    }

    // cue-anchored groups outside accepted brackets
    let covered = |candidates: &[Candidate], i: usize| candidates.iter().any(|c| c.group.anchor_tokens.contains(&i));
    let mut i = first;
    while i < last {
        if covered(&candidates, i) {
            i += 1;
            continue;
        }
        let Some((cue, used)) = cue_at(tokens, i) else {
            i += 1;
            continue;
        };
        if cue == Cue::Deviation {
            i += used;
            continue;
        }
        let mut j = i + used;
        let level_after = if j + 1 < last && tokens[j].is_number() && tokens[j + 1].is(TokenKind::PercentSign) && cue == Cue::Confidence {
            let l = decimal_of(&tokens[j]);
            j += 2;
            Some(l)
        } else {
            None
        };
        while j < last && is_filler(&tokens[j]) && !tokens[j].is_text("%") {
            j += 1;
        }
        match pair_at(tokens, j, last) {
            Some(pair) => {
                let (level, anchor_start) = match level_before(tokens, i, first) {
                    Some((l, at)) if cue == Cue::Confidence => (Some(l), at),
                    _ => (level_after, i),
                };
                let group = make_group(tokens, &pair, anchor_start..pair.high.end, Some(cue), level, false);
                i = pair.high.end;
                candidates.push(Candidate { group, cue: Some(cue) });
            }
            None => i += used,
        }
    }
    candidates.sort_by_key(|c| c.group.anchor_tokens.start);

    // elided CI cue on the sibling of a comparison
    for idx in 0..candidates.len() {
        if candidates[idx].cue.is_some() || !candidates[idx].group.bracketed {
            continue;
        }
        let open = candidates[idx].group.anchor_tokens.start;
        let follows_value = open > 0 && {
            let prev = &tokens[open - 1];
            prev.is_number() || prev.is(TokenKind::PercentSign) || time_unit_token(prev).is_some()
        };
        if !follows_value {
            continue;
        }
        let sibling = candidates[..idx].iter().rev().find(|c| c.group.kind == IntervalKind::ConfidenceInterval);
        if let Some(sibling) = sibling {
            let between = sibling.group.anchor_tokens.end..open;
            if between.clone().any(|t| is_comparison_cue(&tokens[t])) {
                candidates[idx].group.kind = IntervalKind::ConfidenceInterval;
            }
        }
    }

    for c in candidates {
        let mut group = c.group;
        if group.low.value() > group.high.value() {
            result.diagnostics.push(LexDiagnostic {
                kind: LexIssueKind::MalformedInterval,
                start: group.anchor_span.0,
                end: group.anchor_span.1,
                detail: format!("interval low {} exceeds high {}", group.low, group.high),
            });
            group.kind = IntervalKind::Other;
        }
        result.groups.push(group);
    }
    result
}

/// Everything the downstream modules need from one sentence.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub tokens: Vec<Token>,
    pub numerics: Vec<NumericMention>,
    pub intervals: IntervalParse,
    pub diagnostics: Vec<LexDiagnostic>,
}

impl Analysis {
    pub fn new(text: &str) -> Analysis {
        Analysis::from_tokens(tokenize(text))
    }

    pub fn from_tokens(tokens: Vec<Token>) -> Analysis {
        let numerics = recognize_numerics(&tokens);
        let len = tokens.last().map_or(0, |t| t.end);
        let intervals = parse_interval_group(&tokens, 0..len);
        let mut diagnostics = intervals.diagnostics.clone();
        diagnostics.extend(spelled_number_diagnostics(&tokens));
        Analysis {
            tokens,
            numerics,
            intervals,
            diagnostics,
        }
    }

    /// Mention covering token `t`, if any.
    pub fn numeric_at(&self, t: usize) -> Option<&NumericMention> {
        let idx = self.numerics.partition_point(|m| m.tokens.end <= t);
        self.numerics.get(idx).filter(|m| m.tokens.contains(&t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn tokenizes_percent_lists() {
        let tokens = tokenize("45%, 40%");
        assert_eq!(texts(&tokens), ["45", "%", ",", "40", "%"]);
        assert_eq!(tokens[1].kind, TokenKind::PercentSign);
        assert_eq!(tokens[2].kind, TokenKind::Punctuation);
    }

    #[test]
    fn tokenizes_ranges_and_years() {
        let tokens = tokenize("70.2-84.2");
        assert_eq!(texts(&tokens), ["70.2", "-", "84.2"]);
        assert_eq!(tokens[1].kind, TokenKind::Hyphen);
        let tokens = tokenize("5-year");
        assert_eq!(texts(&tokens), ["5", "-", "year"]);
        assert_eq!(tokenize("1.2.3").len(), 3);
        assert!(tokenize("").is_empty());
        assert!(tokenize("   ").is_empty());
    }

    #[test]
    fn tokenizes_mixed_words() {
        let tokens = tokenize("CD8-Low/FoxP3-High (PF-05280586)");
        assert_eq!(texts(&tokens), ["CD8", "-", "Low", "/", "FoxP3", "-", "High", "(", "PF", "-", "05280586", ")"]);
    }

    #[test]
    fn recognizes_durations_and_percents() {
        let tokens = tokenize("median 14.1 months");
        let m = recognize_numerics(&tokens);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].value.value(), 14.1);
        assert_eq!(m[0].unit, Unit::Months);
        assert_eq!(m[0].kind, NumericKind::Duration);
        assert_eq!((m[0].start, m[0].end), (7, 18));

        let m = recognize_numerics(&tokenize("97.8%"));
        assert_eq!((m[0].unit, m[0].kind), (Unit::Percent, NumericKind::Percent));
        assert_eq!(m[0].value.to_string(), "97.8");

        let m = recognize_numerics(&tokenize("24 patients (33%)"));
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].kind, NumericKind::BareNumber);
        assert_eq!(m[1].kind, NumericKind::Percent);
        assert_eq!(m[1].value.value(), 33.0);
    }

    #[test]
    fn range_low_inherits_unit() {
        let m = recognize_numerics(&tokenize("4-26 months"));
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].unit, Unit::Months);
        assert_eq!((m[0].start, m[0].end), (0, 1));
        assert_eq!(m[1].unit, Unit::Months);
    }

    #[test]
    fn expands_series() {
        let tokens = tokenize("3-, 5- and 10-year survival");
        let s = expand_distributed_series(&tokens);
        assert_eq!(s.len(), 1);
        let values: Vec<(f64, Unit)> = s[0].elements.iter().map(|m| (m.value.value(), m.unit)).collect();
        assert_eq!(values, [(3.0, Unit::Years), (5.0, Unit::Years), (10.0, Unit::Years)]);
        let spans: Vec<(usize, usize)> = s[0].elements.iter().map(|m| (m.start, m.end)).collect();
        assert_eq!(spans, [(0, 2), (4, 6), (11, 18)]);

        let s = expand_distributed_series(&tokenize("5-year"));
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].elements.len(), 1);

        let tokens = tokenize("the 1-year LRFS rates; the 3-year rates were 50.6%");
        let s = expand_distributed_series(&tokens);
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].elements[0].value.value(), 3.0);

        assert!(expand_distributed_series(&tokenize("4-26 months")).is_empty());
        assert!(expand_distributed_series(&tokenize("5-FU was given")).is_empty());
    }

    #[test]
    fn oxford_comma_series() {
        let s = expand_distributed_series(&tokenize("1-, 3-, and 5-year OS"));
        assert_eq!(s[0].elements.len(), 3);
    }

    #[test]
    fn numerics_cover_series_once() {
        let tokens = tokenize("3-, 5- and 10-year survival rates were 45%, 40% and 35%");
        let m = recognize_numerics(&tokens);
        let kinds: Vec<NumericKind> = m.iter().map(|m| m.kind).collect();
        assert_eq!(kinds.iter().filter(|k| **k == NumericKind::TimePointSeriesElement).count(), 3);
        assert_eq!(kinds.iter().filter(|k| **k == NumericKind::Percent).count(), 3);
        let numbers = tokens.iter().filter(|t| t.is_number()).count();
        assert_eq!(m.len(), numbers);
    }

    fn groups(text: &str) -> IntervalParse {
        let tokens = tokenize(text);
        parse_interval_group(&tokens, 0..text.chars().count())
    }

    #[test]
    fn classifies_confidence_interval() {
        let g = groups("(95% CI 70.2-84.2)");
        assert_eq!(g.groups.len(), 1);
        let g = &g.groups[0];
        assert_eq!((g.low.value(), g.high.value()), (70.2, 84.2));
        assert_eq!(g.kind, IntervalKind::ConfidenceInterval);
        assert_eq!(g.confidence_level.map(Decimal::value), Some(95.0));
        assert_eq!(g.anchor_span, (0, 18));
    }

    #[test]
    fn classifies_range() {
        let g = groups("mean duration of 9 months (range: 4-26 months)");
        assert_eq!(g.groups.len(), 1);
        assert_eq!(g.groups[0].kind, IntervalKind::Range);
        assert_eq!((g.groups[0].low.value(), g.groups[0].high.value()), (4.0, 26.0));
    }

    #[test]
    fn elided_cue_after_comparison() {
        let g = groups("median 14.1 months [95% CI 13.2-16.2] vs 10.7 months [9.5-12.4]");
        assert_eq!(g.groups.len(), 2);
        assert_eq!(g.groups[1].kind, IntervalKind::ConfidenceInterval);
        assert_eq!((g.groups[1].low.value(), g.groups[1].high.value()), (9.5, 12.4));
        assert_eq!(g.groups[1].confidence_level, None);

        let g = groups("median 14.1 months [9.5-12.4]");
        assert_eq!(g.groups[0].kind, IntervalKind::Other);
    }

    #[test]
    fn open_range_with_plus() {
        let g = groups("median duration of 4 months (range, 2-22 + months)");
        assert_eq!(g.groups.len(), 1);
        assert_eq!(g.groups[0].kind, IntervalKind::Range);
        assert_eq!((g.groups[0].low.value(), g.groups[0].high.value()), (2.0, 22.0));
        assert!(g.diagnostics.iter().any(|d| d.kind == LexIssueKind::StrayPlus));
    }

    #[test]
    fn malformed_interval() {
        let g = groups("(95% CI 16.2-13.2)");
        assert_eq!(g.groups[0].kind, IntervalKind::Other);
        assert_eq!(g.diagnostics[0].kind, LexIssueKind::MalformedInterval);
    }

    #[test]
    fn nested_parenthetical_is_not_a_group() {
        let g = groups("(median 14.1 months [95% CI 13.2-16.2] vs 10.7 months [9.5-12.4])");
        assert_eq!(g.groups.len(), 2);
        assert!(g.groups.iter().all(|g| g.kind == IntervalKind::ConfidenceInterval));
    }

    #[test]
    fn unbracketed_ci() {
        let g = groups("OS was 14 months, 95% CI 12-16, in the arm");
        assert_eq!(g.groups.len(), 1);
        assert_eq!(g.groups[0].kind, IntervalKind::ConfidenceInterval);
        assert!(!g.groups[0].bracketed);
        assert_eq!(g.groups[0].confidence_level.map(Decimal::value), Some(95.0));
    }

    #[test]
    fn deviation_is_never_ci() {
        let g = groups("mean 3.2 (SD 1.1-5.0)");
        assert_eq!(g.groups[0].kind, IntervalKind::Other);
        let g = groups("(95% CI, range 4-26)");
        assert_eq!(g.groups[0].kind, IntervalKind::Range);
    }

    #[test]
    fn window_restricts_groups() {
        let text = "(95% CI 1-2) and (95% CI 3-4)";
        let tokens = tokenize(text);
        let g = parse_interval_group(&tokens, 13..text.len());
        assert_eq!(g.groups.len(), 1);
        assert_eq!(g.groups[0].low.value(), 3.0);
    }

    #[test]
    fn spelled_numbers_flagged() {
        let d = spelled_number_diagnostics(&tokenize("after twelve months of therapy"));
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, LexIssueKind::SpelledNumber);
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(Decimal::parse("14.10").unwrap().to_string(), "14.10");
        assert!(Decimal::parse("1.").is_none());
        assert!(Decimal::parse(".5").is_none());
        assert!(Decimal::parse("1,000").is_none());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn tokens_tile_text(text in "[ a-zA-Z0-9%().,;:\\-\\[\\]–±/+]{0,60}") {
                let tokens = tokenize(&text);
                let chars: Vec<char> = text.chars().collect();
                let mut pos = 0;
                for t in &tokens {
                    prop_assert!(t.start >= pos && t.start < t.end && t.end <= chars.len());
                    prop_assert!(chars[pos..t.start].iter().all(|c| c.is_whitespace()));
                    let surface: String = chars[t.start..t.end].iter().collect();
                    prop_assert_eq!(&surface, &t.text);
                    pos = t.end;
                }
                prop_assert!(chars[pos..].iter().all(|c| c.is_whitespace()));
            }

            #[test]
            fn numeric_round_trip(int in 0u32..100000, frac in proptest::option::of("[0-9]{1,4}")) {
                let surface = match &frac {
                    Some(f) => format!("{int}.{f}"),
                    None => int.to_string(),
                };
                let tokens = tokenize(&format!("{surface} months"));
                let m = recognize_numerics(&tokens);
                prop_assert_eq!(m.len(), 1);
                prop_assert_eq!(m[0].value.to_string(), surface);
            }

            #[test]
            fn every_number_token_covered_once(text in "[ a-z0-9%().,\\-]{0,50}") {
                let tokens = tokenize(&text);
                let mentions = recognize_numerics(&tokens);
                for (i, t) in tokens.iter().enumerate() {
                    let covering = mentions.iter().filter(|m| m.tokens.contains(&i)).count();
                    if t.is_number() {
                        prop_assert_eq!(covering, 1);
                    }
                }
            }

            #[test]
            fn intervals_are_sane(low in 0u32..200, high in 0u32..200, cue in prop_oneof![Just("95% CI"), Just("range"), Just(""), Just("SD")]) {
                let text = format!("value 10% ({cue} {low}-{high})");
                let parse = groups_of(&text);
                for g in parse.groups {
                    if g.kind == IntervalKind::ConfidenceInterval {
                        prop_assert!(g.low.value() <= g.high.value());
                        prop_assert_eq!(cue, "95% CI");
                    }
                }
            }
        }

        fn groups_of(text: &str) -> IntervalParse {
            let tokens = tokenize(text);
            parse_interval_group(&tokens, 0..text.chars().count())
        }
    }
}
