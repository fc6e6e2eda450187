//! Counted word trie with a cached best completion at every node.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::letters::LetterSet;

/// The highest-count word stored at or below a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Best {
    pub count: u64,
    pub word: Arc<str>,
}

impl Best {
    /// Count descending, then lexicographic ascending.
    fn beats(&self, other: &Best) -> bool {
        match self.count.cmp(&other.count) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => self.word < other.word,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Node {
    /// Sorted by letter byte.
    children: Vec<(u8, Node)>,
    count: u64,
    word: Option<Arc<str>>,
    best: Option<Best>,
}

impl Node {
    fn child(&self, letter: u8) -> Option<&Node> {
        self.children
            .binary_search_by_key(&letter, |(l, _)| *l)
            .ok()
            .map(|i| &self.children[i].1)
    }

    fn child_mut_or_insert(&mut self, letter: u8) -> &mut Node {
        let i = match self.children.binary_search_by_key(&letter, |(l, _)| *l) {
            Ok(i) => i,
            Err(i) => {
                self.children.insert(i, (letter, Node::default()));
                i
            }
        };
        &mut self.children[i].1
    }

    fn offer(&mut self, candidate: &Best) {
        if self.best.as_ref().is_none_or(|b| candidate.beats(b)) {
            self.best = Some(candidate.clone());
        }
    }
}

/// Words over `a`–`z` with occurrence counts.
///
/// Each node caches the best word in its subtree, so a prefix query costs one
/// walk down the prefix. Counts only ever grow, which lets [`UnigramTrie::add`]
/// refresh the caches by offering the updated word along its own path.
#[derive(Debug, Clone, Default)]
pub struct UnigramTrie {
    root: Node,
    words: usize,
}

impl UnigramTrie {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of distinct stored words.
    pub fn len(&self) -> usize {
        self.words
    }

    pub fn is_empty(&self) -> bool {
        self.words == 0
    }

    /// Adds `count` occurrences of `word`, which must already be validated.
    /// Returns the new total count.
    pub fn add(&mut self, word: &str, count: u64) -> u64 {
        debug_assert!(crate::letters::is_word(word) && count >= 1);
        let mut node = &mut self.root;
        for b in word.bytes() {
            node = node.child_mut_or_insert(b);
        }
        if node.count == 0 {
            self.words += 1;
            node.word = Some(Arc::from(word));
        }
        node.count += count;
        let best = Best {
            count: node.count,
            word: node.word.clone().expect("terminal word set"),
        };

        let mut node = &mut self.root;
        node.offer(&best);
        for b in word.bytes() {
            node = node.child_mut_or_insert(b);
            node.offer(&best);
        }
        best.count
    }

    fn find(&self, prefix: &str) -> Option<&Node> {
        prefix.bytes().try_fold(&self.root, |node, b| node.child(b))
    }

    /// Count stored for exactly `word` (0 if absent).
    pub fn count(&self, word: &str) -> u64 {
        self.find(word).map_or(0, |n| n.count)
    }

    /// Best completion of `prefix`; the prefix itself counts if stored.
    pub fn best(&self, prefix: &str) -> Option<&Best> {
        self.find(prefix).and_then(|n| n.best.as_ref())
    }

    /// Letters `c` for which some stored word starts with `prefix + c`.
    pub fn next_letters(&self, prefix: &str) -> LetterSet {
        self.find(prefix)
            .map(|n| n.children.iter().map(|(b, _)| *b as char).collect())
            .unwrap_or_default()
    }

    /// All `(word, count)` pairs in lexicographic order.
    pub fn entries(&self) -> Vec<(Arc<str>, u64)> {
        let mut out = Vec::with_capacity(self.words);
        let mut stack = vec![&self.root];
        while let Some(node) = stack.pop() {
            if let Some(w) = &node.word {
                out.push((w.clone(), node.count));
            }
            stack.extend(node.children.iter().rev().map(|(_, c)| c));
        }
        out
    }
}
