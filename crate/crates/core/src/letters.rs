//! Lowercase `a`–`z` letters and compact sets of them.

use std::fmt;

/// Number of letter keys on the keyboard.
pub const ALPHABET_LEN: usize = 26;

/// Returns true when `word` is non-empty and consists only of `a`–`z`.
pub fn is_word(word: &str) -> bool {
    !word.is_empty() && word.bytes().all(|b| b.is_ascii_lowercase())
}

/// Lowercases `raw` and checks that the result is a plain `a`–`z` word.
pub fn normalize_word(raw: &str) -> Option<String> {
    let lowered = raw.trim().to_lowercase();
    is_word(&lowered).then_some(lowered)
}

/// Zero-based alphabet index of a lowercase letter.
pub fn letter_index(c: char) -> Option<usize> {
    c.is_ascii_lowercase().then(|| (c as u8 - b'a') as usize)
}

pub fn letter_at(index: usize) -> char {
    debug_assert!(index < ALPHABET_LEN);
    (b'a' + index as u8) as char
}

/// A set of letters stored as a 26-bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct LetterSet(u32);

impl LetterSet {
    pub const EMPTY: LetterSet = LetterSet(0);
    pub const ALL: LetterSet = LetterSet((1 << ALPHABET_LEN) - 1);

    pub fn contains(self, c: char) -> bool {
        letter_index(c).is_some_and(|i| self.0 & (1 << i) != 0)
    }

    pub fn insert(&mut self, c: char) {
        if let Some(i) = letter_index(c) {
            self.0 |= 1 << i;
        }
    }

    pub fn remove(&mut self, c: char) {
        if let Some(i) = letter_index(c) {
            self.0 &= !(1 << i);
        }
    }

    pub fn union(self, other: LetterSet) -> LetterSet {
        LetterSet(self.0 | other.0)
    }

    pub fn complement(self) -> LetterSet {
        LetterSet(!self.0 & Self::ALL.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Letters in alphabetical order.
    pub fn iter(self) -> impl Iterator<Item = char> {
        (0..ALPHABET_LEN)
            .filter(move |i| self.0 & (1 << i) != 0)
            .map(letter_at)
    }
}

impl FromIterator<char> for LetterSet {
    fn from_iter<I: IntoIterator<Item = char>>(iter: I) -> Self {
        let mut set = LetterSet::EMPTY;
        for c in iter {
            set.insert(c);
        }
        set
    }
}

impl serde::Serialize for LetterSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl fmt::Debug for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.iter().collect::<String>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_rejects_non_letters() {
        assert_eq!(normalize_word("Input"), Some("input".to_string()));
        assert_eq!(normalize_word("don't"), None);
        assert_eq!(normalize_word("café"), None);
        assert_eq!(normalize_word(""), None);
    }

    #[test]
    fn set_ops() {
        let s: LetterSet = "hello".chars().collect();
        assert_eq!(s.len(), 4);
        assert!(s.contains('l') && !s.contains('z'));
        assert_eq!(s.complement().len(), 22);
        assert_eq!(s.union(s.complement()), LetterSet::ALL);
        assert_eq!(s.iter().collect::<String>(), "ehlo");
    }
}
