use std::fmt;

/// Token classes usable in patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenClass {
    /// Any number token.
    Num,
    /// A percentage: number followed by `%`.
    Pct,
    /// A duration: number followed by a time unit.
    Dur,
    /// Any word token.
    Word,
}

impl TokenClass {
    pub fn keyword(self) -> &'static str {
        match self {
            TokenClass::Num => "NUM",
            TokenClass::Pct => "PCT",
            TokenClass::Dur => "DUR",
            TokenClass::Word => "WORD",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    /// Matches one token. Stored lowercased when case-insensitive.
    Literal { text: String, case_insensitive: bool },
    Alt(Vec<Node>),
    Seq(Vec<Node>),
    Opt(Box<Node>),
    Class(TokenClass),
    Capture { name: String, node: Box<Node> },
    /// Skips between zero and `max` tokens.
    Gap(usize),
}

/// A compiled, immutable token pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternAst {
    pub name: String,
    pub root: Node,
    pub(crate) first: FirstSet,
}

impl PatternAst {
    pub(crate) fn new(name: String, root: Node) -> PatternAst {
        let first = first_set(&root);
        PatternAst { name, root, first }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn capture_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        collect_captures(&self.root, &mut out);
        out
    }
}

fn collect_captures<'a>(node: &'a Node, out: &mut Vec<&'a str>) {
    match node {
        Node::Capture { name, node } => {
            out.push(name);
            collect_captures(node, out);
        }
        Node::Alt(nodes) | Node::Seq(nodes) => nodes.iter().for_each(|n| collect_captures(n, out)),
        Node::Opt(node) => collect_captures(node, out),
        _ => {}
    }
}

/// Tokens a match can start with, used to skip start positions quickly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum FirstSet {
    Any,
    Tokens { literals: Vec<(String, bool)>, numbers: bool, words: bool },
}

impl FirstSet {
    fn empty() -> FirstSet {
        FirstSet::Tokens {
            literals: Vec::new(),
            numbers: false,
            words: false,
        }
    }

    fn union(self, other: FirstSet) -> FirstSet {
        match (self, other) {
            (FirstSet::Any, _) | (_, FirstSet::Any) => FirstSet::Any,
            (
                FirstSet::Tokens { mut literals, numbers, words },
                FirstSet::Tokens {
                    literals: l2,
                    numbers: n2,
                    words: w2,
                },
            ) => {
                literals.extend(l2);
                FirstSet::Tokens {
                    literals,
                    numbers: numbers || n2,
                    words: words || w2,
                }
            }
        }
    }
}

/// `(first set, can match empty)`.
fn first_of(node: &Node) -> (FirstSet, bool) {
    match node {
        Node::Literal { text, case_insensitive } => (
            FirstSet::Tokens {
                literals: vec![(text.clone(), *case_insensitive)],
                numbers: false,
                words: false,
            },
            false,
        ),
        Node::Class(TokenClass::Word) => (
            FirstSet::Tokens {
                literals: Vec::new(),
                numbers: false,
                words: true,
            },
            false,
        ),
        Node::Class(_) => (
            FirstSet::Tokens {
                literals: Vec::new(),
                numbers: true,
                words: false,
            },
            false,
        ),
        Node::Gap(0) => (FirstSet::empty(), true),
        Node::Gap(_) => (FirstSet::Any, true),
        Node::Opt(inner) => (first_of(inner).0, true),
        Node::Capture { node, .. } => first_of(node),
        Node::Alt(nodes) => nodes.iter().fold((FirstSet::empty(), false), |(set, nullable), n| {
            let (s, e) = first_of(n);
            (set.union(s), nullable || e)
        }),
        Node::Seq(nodes) => {
            let mut set = FirstSet::empty();
            for n in nodes {
                let (s, e) = first_of(n);
                set = set.union(s);
                if !e {
                    return (set, false);
                }
            }
            (set, true)
        }
    }
}

fn first_set(node: &Node) -> FirstSet {
    match first_of(node) {
        (_, true) => FirstSet::Any,
        (set, false) => set,
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Literal { text, case_insensitive } => {
                if !case_insensitive {
                    f.write_str("=")?;
                }
                write!(f, "\"{}\"", text.replace('\\', "\\\\").replace('"', "\\\""))
            }
            Node::Alt(nodes) => {
                f.write_str("(")?;
                for (i, n) in nodes.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{n}")?;
                }
                f.write_str(")")
            }
            Node::Seq(nodes) => {
                f.write_str("(")?;
                for (i, n) in nodes.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{n}")?;
                }
                f.write_str(")")
            }
            Node::Opt(n) => write!(f, "{n}?"),
            Node::Class(c) => f.write_str(c.keyword()),
            Node::Capture { name, node } => write!(f, "cap:{name}({node})"),
            Node::Gap(k) => write!(f, "gap<={k}"),
        }
    }
}

impl fmt::Display for PatternAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
    }
}
