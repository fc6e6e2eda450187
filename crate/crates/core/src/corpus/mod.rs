//! Unigram/bigram word model used for per-key predictions and for deciding
//! which keys can be merged away.
//!
//! Corpus files are plain UTF-8 text, one entry per line:
//! `word<TAB>count` for unigrams and `prev<TAB>next<TAB>count` for bigrams.
//! Blank lines and lines starting with `#` are ignored. Words are lowercased
//! on load and must then consist of `a`–`z` only. Duplicate entries add up.

mod trie;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::letters::{normalize_word, LetterSet, ALPHABET_LEN};

pub use trie::{Best, UnigramTrie};

const BUNDLED_UNIGRAMS: &str = include_str!("../../data/unigrams.tsv");
const BUNDLED_BIGRAMS: &str = include_str!("../../data/bigrams.tsv");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{source_name} line {line}: {reason}")]
    Malformed {
        source_name: &'static str,
        line: usize,
        reason: String,
    },
    #[error("invalid word {0:?}: only letters a-z are allowed")]
    InvalidWord(String),
    #[error("reading {path}: {err}")]
    Io { path: String, err: std::io::Error },
}

/// Which table a prediction came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Bigram,
    Unigram,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub word: String,
    pub score: u64,
    pub source: Source,
}

/// Unigram and bigram tries.
///
/// Every successor word in a bigram trie is also present in the unigram trie,
/// so the set of letters that extend a prefix never depends on which table
/// answered.
#[derive(Debug, Clone, Default)]
pub struct NgramModel {
    unigrams: UnigramTrie,
    bigrams: BTreeMap<String, UnigramTrie>,
}

impl NgramModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a model from in-memory entries. Error line numbers are 1-based
    /// positions within the respective sequence.
    pub fn build<U, B>(unigram_lines: U, bigram_lines: B) -> Result<Self, CorpusError>
    where
        U: IntoIterator,
        U::Item: EntryRef<1>,
        B: IntoIterator,
        B::Item: EntryRef<2>,
    {
        let mut model = NgramModel::new();
        for (i, entry) in unigram_lines.into_iter().enumerate() {
            let ([word], count) = entry.parts();
            let word = check_entry("unigrams", i + 1, word, count)?;
            model.unigrams.add(&word, count);
        }
        let mut pending = Vec::new();
        for (i, entry) in bigram_lines.into_iter().enumerate() {
            let ([prev, next], count) = entry.parts();
            let prev = check_entry("bigrams", i + 1, prev, count)?;
            let next = check_entry("bigrams", i + 1, next, count)?;
            pending.push((prev, next, count));
        }
        for (prev, next, count) in pending {
            model.add_bigram(&prev, &next, count);
        }
        Ok(model)
    }

    /// Parses the two TSV texts described in the module docs.
    pub fn from_tsv(unigrams: &str, bigrams: &str) -> Result<Self, CorpusError> {
        let uni = parse_lines::<1>("unigrams", unigrams)?;
        let bi = parse_lines::<2>("bigrams", bigrams)?;
        // Line numbers were already checked while parsing.
        Self::build(uni, bi)
    }

    /// Loads `unigrams.tsv` and `bigrams.tsv` from a directory. A missing
    /// bigram file means an empty bigram table.
    pub fn load_dir(dir: &Path) -> Result<Self, CorpusError> {
        let read = |name: &str, required: bool| -> Result<String, CorpusError> {
            let path = dir.join(name);
            match std::fs::read_to_string(&path) {
                Ok(s) => Ok(s),
                Err(e) if !required && e.kind() == std::io::ErrorKind::NotFound => {
                    Ok(String::new())
                }
                Err(err) => Err(CorpusError::Io {
                    path: path.display().to_string(),
                    err,
                }),
            }
        };
        Self::from_tsv(&read("unigrams.tsv", true)?, &read("bigrams.tsv", false)?)
    }

    /// The corpus shipped with the crate: a 10,000-word English frequency
    /// list plus bigrams from public-domain speeches.
    pub fn bundled() -> Arc<NgramModel> {
        static MODEL: OnceLock<Arc<NgramModel>> = OnceLock::new();
        MODEL
            .get_or_init(|| {
                Arc::new(
                    NgramModel::from_tsv(BUNDLED_UNIGRAMS, BUNDLED_BIGRAMS)
                        .expect("bundled corpus is well formed"),
                )
            })
            .clone()
    }

    pub fn unigrams(&self) -> &UnigramTrie {
        &self.unigrams
    }

    pub fn successors(&self, prev: &str) -> Option<&UnigramTrie> {
        self.bigrams.get(prev)
    }

    pub fn bigram_count(&self) -> usize {
        self.bigrams.values().map(UnigramTrie::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.unigrams.is_empty()
    }

    fn add_bigram(&mut self, prev: &str, next: &str, count: u64) {
        if self.unigrams.count(next) == 0 {
            self.unigrams.add(next, 1);
        }
        self.bigrams
            .entry(prev.to_string())
            .or_default()
            .add(next, count);
    }

    /// Highest-count completion of `prefix`, preferring successors of
    /// `prev_word` and falling back to unigrams.
    pub fn predict(&self, prev_word: Option<&str>, prefix: &str) -> Option<Prediction> {
        if prefix.is_empty() {
            return None;
        }
        let from_bigram = prev_word
            .and_then(|p| self.bigrams.get(p))
            .and_then(|t| t.best(prefix))
            .map(|b| (b, Source::Bigram));
        from_bigram
            .or_else(|| self.unigrams.best(prefix).map(|b| (b, Source::Unigram)))
            .map(|(best, source)| Prediction {
                word: best.word.to_string(),
                score: best.count,
                source,
            })
    }

    /// Letters `c` for which `predict(prev_word, prefix + c)` is some.
    pub fn extendable_letters(&self, prev_word: Option<&str>, prefix: &str) -> LetterSet {
        let bigram = prev_word
            .and_then(|p| self.bigrams.get(p))
            .map(|t| t.next_letters(prefix))
            .unwrap_or_default();
        bigram.union(self.unigrams.next_letters(prefix))
    }

    /// Adds one occurrence of `word`. Returns the new count.
    pub fn learn_word(&mut self, word: &str) -> Result<u64, CorpusError> {
        let word = normalize_word(word).ok_or_else(|| CorpusError::InvalidWord(word.into()))?;
        Ok(self.unigrams.add(&word, 1))
    }

    /// Adds one occurrence of the pair `prev next`. Returns the new pair count.
    pub fn learn_bigram(&mut self, prev: &str, next: &str) -> Result<u64, CorpusError> {
        let prev = normalize_word(prev).ok_or_else(|| CorpusError::InvalidWord(prev.into()))?;
        let next = normalize_word(next).ok_or_else(|| CorpusError::InvalidWord(next.into()))?;
        self.add_bigram(&prev, &next, 1);
        Ok(self.bigrams[&prev].count(&next))
    }

    /// Count-weighted letter occurrences over the unigram table.
    pub fn letter_frequencies(&self) -> [u64; ALPHABET_LEN] {
        let mut freq = [0u64; ALPHABET_LEN];
        for (word, count) in self.unigrams.entries() {
            for b in word.bytes() {
                freq[(b - b'a') as usize] += count;
            }
        }
        freq
    }

    /// Letters by descending corpus frequency, ties alphabetical.
    pub fn letter_ranking(&self) -> Vec<char> {
        let freq = self.letter_frequencies();
        let mut letters: Vec<usize> = (0..ALPHABET_LEN).collect();
        letters.sort_by(|&a, &b| freq[b].cmp(&freq[a]).then(a.cmp(&b)));
        letters.into_iter().map(crate::letters::letter_at).collect()
    }

    pub fn unigram_tsv(&self) -> String {
        let mut out = String::new();
        for (word, count) in self.unigrams.entries() {
            let _ = writeln!(out, "{word}\t{count}");
        }
        out
    }

    pub fn bigram_tsv(&self) -> String {
        let mut out = String::new();
        for (prev, trie) in &self.bigrams {
            for (next, count) in trie.entries() {
                let _ = writeln!(out, "{prev}\t{next}\t{count}");
            }
        }
        out
    }
}

/// One corpus entry: `N` words and a count.
pub trait EntryRef<const N: usize> {
    fn parts(&self) -> ([&str; N], u64);
}

impl<S: AsRef<str>> EntryRef<1> for (S, u64) {
    fn parts(&self) -> ([&str; 1], u64) {
        ([self.0.as_ref()], self.1)
    }
}

impl<S: AsRef<str>> EntryRef<1> for &(S, u64) {
    fn parts(&self) -> ([&str; 1], u64) {
        ([self.0.as_ref()], self.1)
    }
}

impl<S: AsRef<str>> EntryRef<2> for (S, S, u64) {
    fn parts(&self) -> ([&str; 2], u64) {
        ([self.0.as_ref(), self.1.as_ref()], self.2)
    }
}

impl<S: AsRef<str>> EntryRef<2> for &(S, S, u64) {
    fn parts(&self) -> ([&str; 2], u64) {
        ([self.0.as_ref(), self.1.as_ref()], self.2)
    }
}

/// Parsed line: words plus count.
pub struct Line<const N: usize> {
    words: [String; N],
    count: u64,
}

impl<const N: usize> EntryRef<N> for Line<N> {
    fn parts(&self) -> ([&str; N], u64) {
        (std::array::from_fn(|i| self.words[i].as_str()), self.count)
    }
}

fn check_entry(
    source_name: &'static str,
    line: usize,
    word: &str,
    count: u64,
) -> Result<String, CorpusError> {
    if count == 0 {
        return Err(CorpusError::Malformed {
            source_name,
            line,
            reason: "count must be at least 1".into(),
        });
    }
    normalize_word(word).ok_or_else(|| CorpusError::Malformed {
        source_name,
        line,
        reason: format!("{word:?} is not a word of letters a-z"),
    })
}

fn parse_lines<const N: usize>(
    source_name: &'static str,
    text: &str,
) -> Result<Vec<Line<N>>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |reason: String| CorpusError::Malformed {
            source_name,
            line: i + 1,
            reason,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != N + 1 {
            return Err(malformed(format!(
                "expected {} tab-separated fields, found {}",
                N + 1,
                fields.len()
            )));
        }
        let count: u64 = fields[N]
            .trim()
            .parse()
            .map_err(|_| malformed(format!("bad count {:?}", fields[N])))?;
        let mut words: [String; N] = std::array::from_fn(|_| String::new());
        for (slot, field) in words.iter_mut().zip(&fields[..N]) {
            *slot = check_entry(source_name, i + 1, field, count)?;
        }
        out.push(Line { words, count });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> NgramModel {
        NgramModel::build(
            [("in", 5u64), ("input", 3), ("inside", 9), ("the", 20)],
            [("the", "input", 7u64)],
        )
        .unwrap()
    }

    #[test]
    fn build_counts_terminals() {
        let m = NgramModel::build([("in", 5u64), ("input", 3)], Vec::<(&str, &str, u64)>::new())
            .unwrap();
        assert_eq!(m.unigrams().len(), 2);
        assert_eq!(&*m.unigrams().best("in").unwrap().word, "in");
    }

    #[test]
    fn empty_model_predicts_nothing() {
        let m = NgramModel::new();
        assert!(m.predict(None, "a").is_none());
        assert!(m.extendable_letters(None, "").is_empty());
    }

    #[test]
    fn bigram_takes_precedence() {
        let m = toy();
        let p = m.predict(Some("the"), "in").unwrap();
        assert_eq!(p.word, "input");
        assert_eq!(p.source, Source::Bigram);
        assert_eq!(p.score, 7);
        let p = m.predict(None, "in").unwrap();
        assert_eq!((p.word.as_str(), p.source), ("inside", Source::Unigram));
        // Unknown context falls back to unigrams.
        assert_eq!(m.predict(Some("zebra"), "in").unwrap().word, "inside");
        assert!(m.predict(None, "iny").is_none());
    }

    #[test]
    fn extendable_excludes_dead_letters() {
        let m = toy();
        let ext = m.extendable_letters(None, "in");
        assert_eq!(ext.iter().collect::<String>(), "ps");
        assert!(!ext.contains('y') && !ext.contains('w'));
    }

    #[test]
    fn duplicates_accumulate() {
        let m = NgramModel::from_tsv("a\t2\n# comment\n\nA\t3\n", "a\tb\t1\na\tb\t4\n").unwrap();
        assert_eq!(m.unigrams().count("a"), 5);
        assert_eq!(m.successors("a").unwrap().count("b"), 5);
        // Bigram successor missing from the unigram list is added with count 1.
        assert_eq!(m.unigrams().count("b"), 1);
    }

    #[test]
    fn malformed_lines_report_line_number() {
        let err = NgramModel::from_tsv("ok\t1\nbad-word\t2\n", "").unwrap_err();
        assert!(matches!(err, CorpusError::Malformed { line: 2, .. }), "{err}");
        let err = NgramModel::from_tsv("", "a\t1\n").unwrap_err();
        assert!(matches!(err, CorpusError::Malformed { line: 1, .. }));
        let err = NgramModel::from_tsv("a\t0\n", "").unwrap_err();
        assert!(err.to_string().contains("at least 1"));
        let err = NgramModel::build([("x1", 1u64)], Vec::<(&str, &str, u64)>::new()).unwrap_err();
        assert!(matches!(err, CorpusError::Malformed { line: 1, .. }));
    }

    #[test]
    fn learning() {
        let mut m = toy();
        assert!(m.predict(None, "zyz").is_none());
        m.learn_word("zyzzyva").unwrap();
        assert_eq!(m.predict(None, "zyz").unwrap().word, "zyzzyva");
        assert_eq!(m.learn_word("Zyzzyva").unwrap(), 2);
        assert!(m.learn_word("zy zz").is_err());
        assert_eq!(m.learn_bigram("the", "inside").unwrap(), 1);
        assert_eq!(m.learn_bigram("the", "inside").unwrap(), 2);
        assert_eq!(m.predict(Some("the"), "ins").unwrap().word, "inside");
    }

    #[test]
    fn tsv_round_trip() {
        let m = toy();
        let again = NgramModel::from_tsv(&m.unigram_tsv(), &m.bigram_tsv()).unwrap();
        assert_eq!(again.unigram_tsv(), m.unigram_tsv());
        assert_eq!(again.bigram_tsv(), m.bigram_tsv());
    }

    #[test]
    fn bundled_corpus_facts() {
        let m = NgramModel::bundled();
        assert_eq!(m.unigrams().len(), 10_000);
        assert_eq!(m.predict(None, "inp").unwrap().word, "input");
        assert!(m.predict(None, "iny").is_none());
        assert_eq!(m.extendable_letters(None, ""), LetterSet::ALL);
        assert_eq!(&m.letter_ranking()[..2], &['e', 't']);
    }
}
