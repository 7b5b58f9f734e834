//! Tag encoding, the rule tagger, and the external-prediction adapter.

mod bio;
mod import;
mod mentions;
mod rules;

pub use bio::{all_tags, decode, encode, span_tokens, RepairNote, Tag, TagSequence};
pub(crate) use import::build_spans;
pub use import::{import_predictions, write_annotations, ImportReport};
pub use mentions::{Mention, MentionLabel, MentionLexicon};
pub use rules::{rule_tag, rule_tag_with_diagnostics, RuleDiagnostic, RuleIssueKind, RuleOutput, RuleTagger};
