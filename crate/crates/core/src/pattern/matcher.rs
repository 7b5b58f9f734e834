use std::collections::BTreeMap;
use std::ops::Range;

use super::ast::{FirstSet, Node, PatternAst, TokenClass};
use crate::lexical::{recognize_numerics, NumericKind, NumericMention, Token, TokenKind};

/// Tokens of one sentence plus the numeric mentions the token classes need.
pub struct MatchInput<'a> {
    tokens: &'a [Token],
    /// For each token starting a percent/duration mention, its end token.
    mention_end: Vec<Option<(NumericKind, usize)>>,
}

impl<'a> MatchInput<'a> {
    pub fn new(tokens: &'a [Token]) -> MatchInput<'a> {
        let numerics = recognize_numerics(tokens);
        MatchInput::with_numerics(tokens, &numerics)
    }

    pub fn with_numerics(tokens: &'a [Token], numerics: &[NumericMention]) -> MatchInput<'a> {
        let mut mention_end = vec![None; tokens.len()];
        for m in numerics {
            mention_end[m.tokens.start] = Some((m.kind, m.tokens.end));
        }
        MatchInput { tokens, mention_end }
    }

    pub fn tokens(&self) -> &'a [Token] {
        self.tokens
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMatch {
    pub pattern: String,
    /// Char offsets of the match.
    pub start: usize,
    pub end: usize,
    pub tokens: Range<usize>,
    /// Capture name to char span.
    pub captures: BTreeMap<String, (usize, usize)>,
}

#[derive(Clone)]
struct State {
    pos: usize,
    captures: Vec<(usize, usize, usize)>,
}

struct Matcher<'p> {
    names: Vec<&'p str>,
}

fn push_unique(out: &mut Vec<State>, state: State) {
    if !out.iter().any(|s| s.pos == state.pos) {
        out.push(state);
    }
}

impl<'p> Matcher<'p> {
    fn new(pattern: &'p PatternAst) -> Self {
        Matcher {
            names: pattern.capture_names(),
        }
    }

    fn class_len(input: &MatchInput<'_>, class: TokenClass, pos: usize) -> Option<usize> {
        let token = input.tokens.get(pos)?;
        match class {
            TokenClass::Num => token.is_number().then_some(1),
            TokenClass::Word => (token.kind == TokenKind::Word).then_some(1),
            TokenClass::Pct | TokenClass::Dur => {
                let want = if class == TokenClass::Pct { NumericKind::Percent } else { NumericKind::Duration };
                match input.mention_end[pos] {
                    Some((kind, end)) if kind == want => Some(end - pos),
                    _ => None,
                }
            }
        }
    }

    /// All distinct end states reachable from `input_states`, in priority
    /// order (greedy branches first).
    fn run(&self, node: &Node, input: &MatchInput<'_>, states: Vec<State>) -> Vec<State> {
        if states.is_empty() {
            return states;
        }
        let n = input.tokens.len();
        match node {
            Node::Literal { text, case_insensitive } => states
                .into_iter()
                .filter(|s| {
                    s.pos < n && {
                        let t = &input.tokens[s.pos];
                        if *case_insensitive {
                            t.eq_ignore_case(text)
                        } else {
                            t.text == *text
                        }
                    }
                })
                .map(|s| State { pos: s.pos + 1, ..s })
                .collect(),
            Node::Class(class) => states
                .into_iter()
                .filter_map(|s| Self::class_len(input, *class, s.pos).map(|len| State { pos: s.pos + len, ..s }))
                .collect(),
            Node::Gap(max) => {
                let mut out = Vec::new();
                for s in states {
                    for skip in 0..=*max {
                        if s.pos + skip > n {
                            break;
                        }
                        push_unique(&mut out, State { pos: s.pos + skip, captures: s.captures.clone() });
                    }
                }
                out
            }
            Node::Seq(nodes) => nodes.iter().fold(states, |acc, n| self.run(n, input, acc)),
            Node::Alt(nodes) => {
                let mut out = Vec::new();
                for branch in nodes {
                    for s in self.run(branch, input, states.clone()) {
                        push_unique(&mut out, s);
                    }
                }
                out
            }
            Node::Opt(inner) => {
                let mut out = self.run(inner, input, states.clone());
                for s in states {
                    push_unique(&mut out, s);
                }
                out
            }
            Node::Capture { name, node } => {
                let idx = self.names.iter().position(|n| n == name).unwrap_or(0);
                let mut out = Vec::new();
                for s in states {
                    let start = s.pos;
                    for mut end in self.run(node, input, vec![s]) {
                        end.captures.push((idx, start, end.pos));
                        push_unique(&mut out, end);
                    }
                }
                out
            }
        }
    }

    /// Longest non-empty match starting at `pos`.
    fn longest_at(&self, pattern: &PatternAst, input: &MatchInput<'_>, pos: usize) -> Option<State> {
        let ends = self.run(&pattern.root, input, vec![State { pos, captures: Vec::new() }]);
        let mut best: Option<State> = None;
        for s in ends {
            if s.pos > pos && best.as_ref().is_none_or(|b| s.pos > b.pos) {
                best = Some(s);
            }
        }
        best
    }
}

fn may_start(first: &FirstSet, token: &Token) -> bool {
    match first {
        FirstSet::Any => true,
        FirstSet::Tokens { literals, numbers, words } => {
            (*numbers && token.is_number())
                || (*words && token.kind == TokenKind::Word)
                || literals.iter().any(|(text, ci)| if *ci { token.eq_ignore_case(text) } else { token.text == *text })
        }
    }
}

fn to_match(pattern: &PatternAst, names: &[&str], input: &MatchInput<'_>, start: usize, state: State) -> PatternMatch {
    let tokens = input.tokens;
    let span = |a: usize, b: usize| {
        if a == b {
            let at = tokens.get(a).map_or_else(|| tokens.last().map_or(0, |t| t.end), |t| t.start);
            (at, at)
        } else {
            (tokens[a].start, tokens[b - 1].end)
        }
    };
    let mut captures = BTreeMap::new();
    for &(idx, a, b) in &state.captures {
        captures.insert(names[idx].to_string(), span(a, b));
    }
    let (s, e) = span(start, state.pos);
    PatternMatch {
        pattern: pattern.name.clone(),
        start: s,
        end: e,
        tokens: start..state.pos,
        captures,
    }
}

/// Leftmost, longest, non-overlapping matches of `pattern`, in order.
pub fn find_matches_in(pattern: &PatternAst, input: &MatchInput<'_>) -> Vec<PatternMatch> {
    let matcher = Matcher::new(pattern);
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < input.tokens.len() {
        if !may_start(&pattern.first, &input.tokens[pos]) {
            pos += 1;
            continue;
        }
        match matcher.longest_at(pattern, input, pos) {
            Some(state) => {
                let end = state.pos;
                out.push(to_match(pattern, &matcher.names, input, pos, state));
                pos = end;
            }
            None => pos += 1,
        }
    }
    out
}

pub fn find_matches(pattern: &PatternAst, tokens: &[Token]) -> Vec<PatternMatch> {
    find_matches_in(pattern, &MatchInput::new(tokens))
}

/// Whether the pattern matches anywhere; stops at the first match.
pub fn is_match(pattern: &PatternAst, input: &MatchInput<'_>) -> bool {
    let matcher = Matcher::new(pattern);
    (0..input.tokens.len()).any(|pos| may_start(&pattern.first, &input.tokens[pos]) && matcher.longest_at(pattern, input, pos).is_some())
}
