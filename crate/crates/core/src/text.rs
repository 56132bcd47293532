//! Sentence splitting and keyword spotting.
//!
//! Both are rule-based. Sentences end at `.`, `!` or `?` followed by
//! whitespace and an uppercase letter or digit, or by the end of the text.
//! Keywords are structure names matched case-insensitively on whole words.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::graph::StoryGraph;

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}')
}

/// Splits running text into trimmed sentences.
///
/// `"It is approx. 4 nm wide."` splits after `approx.` because a digit
/// follows; abbreviations are not recognised.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((_, c)) = chars.next() {
        if !is_terminator(c) {
            continue;
        }
        while let Some(&(_, n)) = chars.peek() {
            if is_terminator(n) || is_closer(n) {
                chars.next();
            } else {
                break;
            }
        }
        let end = chars.peek().map_or(text.len(), |&(i, _)| i);
        let boundary = match chars.peek() {
            None => true,
            Some(&(_, n)) if n.is_whitespace() => {
                let next_visible = text[end..]
                    .trim_start()
                    .trim_start_matches(['"', '\'', '(', '[', '\u{201c}', '\u{2018}'])
                    .chars()
                    .next();
                next_visible.is_some_and(|v| v.is_uppercase() || v.is_ascii_digit())
            }
            _ => false,
        };
        if boundary {
            push_trimmed(&mut out, &text[start..end]);
            start = end;
        }
    }
    push_trimmed(&mut out, &text[start..]);
    out
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.into());
    }
}

/// Lowercased alphanumeric word runs.
fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
        .collect()
}

/// Canonical form of a name: lowercase words joined by single spaces.
pub fn normalize_name(name: &str) -> String {
    words(name).join(" ")
}

/// Maps normalized structure names to node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeywordIndex {
    entries: BTreeMap<String, String>,
    longest: usize,
}

impl KeywordIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every name of every node. A name shared by two nodes stays with the
    /// first one in graph order.
    pub fn from_graph(graph: &StoryGraph) -> Self {
        let mut index = KeywordIndex::new();
        for node in graph.nodes() {
            for name in node.names() {
                index.insert(name, &node.id);
            }
        }
        index
    }

    /// Returns false when the name is blank or already taken.
    pub fn insert(&mut self, name: &str, node_id: &str) -> bool {
        let key = normalize_name(name);
        if key.is_empty() || self.entries.contains_key(&key) {
            return false;
        }
        self.longest = self.longest.max(key.split(' ').count());
        self.entries.insert(key, node_id.into());
        true
    }

    pub fn lookup(&self, name: &str) -> Option<&str> {
        self.entries.get(&normalize_name(name)).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Node ids named in `sentence`, by first occurrence, without repeats.
/// At each word the longest matching name wins.
pub fn detect_keywords(sentence: &str, index: &KeywordIndex) -> Vec<String> {
    let tokens = words(sentence);
    let mut found: Vec<String> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let max = index.longest.min(tokens.len() - i);
        let hit = (1..=max).rev().find_map(|len| {
            let key = tokens[i..i + len].join(" ");
            index.entries.get(&key).map(|id| (len, id))
        });
        match hit {
            Some((len, id)) => {
                if !found.contains(id) {
                    found.push(id.clone());
                }
                i += len;
            }
            None => i += 1,
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn index(names: &[(&str, &str)]) -> KeywordIndex {
        let mut ix = KeywordIndex::new();
        for (name, id) in names {
            ix.insert(name, id);
        }
        ix
    }

    #[test]
    fn splits_on_terminator_and_capital() {
        assert_eq!(
            split_sentences("A binds B. C follows."),
            vec!["A binds B.", "C follows."]
        );
        assert!(split_sentences("").is_empty());
        assert!(split_sentences("   ").is_empty());
    }

    #[test]
    fn digit_after_abbreviation_splits() {
        assert_eq!(
            split_sentences("It is approx. 4 nm wide."),
            vec!["It is approx.", "4 nm wide."]
        );
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(
            split_sentences("See e.g. the capsid. Then RNA!"),
            vec!["See e.g. the capsid.", "Then RNA!"]
        );
        assert_eq!(
            split_sentences("Why? \"Because.\" Done"),
            vec!["Why?", "\"Because.\"", "Done"]
        );
    }

    #[test]
    fn keywords_in_order_of_occurrence() {
        let ix = index(&[("Capsid", "capsid"), ("RNA", "rna"), ("Reverse Transcriptase", "rt")]);
        assert_eq!(
            detect_keywords("The capsid protects the RNA.", &ix),
            vec!["capsid", "rna"]
        );
        assert!(detect_keywords("Nothing to see here.", &ix).is_empty());
        assert_eq!(detect_keywords("RNA and rna and RNA.", &ix), vec!["rna"]);
        assert_eq!(
            detect_keywords("The reverse\ttranscriptase copies RNA.", &ix),
            vec!["rt", "rna"]
        );
    }

    #[test]
    fn whole_words_only() {
        let ix = index(&[("RNA", "rna")]);
        assert!(detect_keywords("The mRNAs and tRNA.", &ix).is_empty());
    }

    #[test]
    fn longest_match_wins() {
        let ix = index(&[("HIV", "hiv"), ("HIV capsid", "capsid"), ("capsid", "shell")]);
        assert_eq!(detect_keywords("The HIV capsid is conical.", &ix), vec!["capsid"]);
        assert_eq!(detect_keywords("HIV has a capsid.", &ix), vec!["hiv", "shell"]);
    }

    #[test]
    fn first_owner_keeps_shared_name() {
        let mut ix = KeywordIndex::new();
        assert!(ix.insert("Plasma", "blood"));
        assert!(!ix.insert("plasma", "membrane"));
        assert_eq!(ix.lookup("PLASMA"), Some("blood"));
    }

    proptest! {
        #[test]
        fn splitting_preserves_non_whitespace(text in "[A-Za-z0-9 .!?\"']{0,80}") {
            let joined: String = split_sentences(&text).concat().chars().filter(|c| !c.is_whitespace()).collect();
            let original: String = text.chars().filter(|c| !c.is_whitespace()).collect();
            prop_assert_eq!(joined, original);
        }
    }
}
